//! File formats: word-list TSV, variety metadata CSV, JSON configuration,
//! and result tables written as CSV or JSON.
//!
//! Result CSV uses `\n` line endings and a float encoding that round-trips
//! exactly: finite values use the shortest representation that parses back
//! to the same bits, non-finite values use the literals `nan`, `inf` and
//! `-inf`.

use std::collections::HashMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{SwadeshDataset, VarietyMeta};

/// Defaults for analytic parameters and the cognacy threshold, loadable
/// from a JSON file. Missing fields keep their built-in defaults; unknown
/// fields are rejected to catch typos.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub lambda: f64,
    pub mu: f64,
    pub n_eff: f64,
    pub l_eff: f64,
    pub m: u32,
    pub theta: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            lambda: 1.4e-4,
            mu: 1.6e-4,
            n_eff: 5.18,
            l_eff: 7.63,
            m: 207,
            theta: 0.5,
        }
    }
}

/// Loads a [`Config`] from a JSON file.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Config {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn dataset_error(path: &Path, line: u64, message: impl Into<String>) -> Error {
    Error::Dataset {
        path: path.display().to_string(),
        line,
        message: message.into(),
    }
}

const META_HEADER: [&str; 5] = ["variety", "name", "latitude", "longitude", "clade"];

/// Loads variety metadata from a CSV file with header
/// `variety,name,latitude,longitude,clade`.
pub fn load_variety_meta(path: &Path) -> Result<Vec<VarietyMeta>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io_err) => Error::Io(io_err),
            other => dataset_error(path, 1, format!("{other:?}")),
        })?;
    {
        let headers = reader
            .headers()
            .map_err(|e| dataset_error(path, 1, e.to_string()))?;
        if headers.iter().collect::<Vec<_>>() != META_HEADER {
            return Err(dataset_error(
                path,
                1,
                format!(
                    "expected header '{}', found '{}'",
                    META_HEADER.join(","),
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
    }
    let mut metas = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| dataset_error(path, 0, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != 5 {
            return Err(dataset_error(
                path,
                line,
                format!("expected 5 fields, found {}", record.len()),
            ));
        }
        let number = |i: usize, name: &str| -> Result<f64> {
            record[i].parse::<f64>().map_err(|_| {
                dataset_error(path, line, format!("invalid {name} '{}'", &record[i]))
            })
        };
        let meta = VarietyMeta {
            id: record[0].to_string(),
            name: record[1].to_string(),
            latitude: number(2, "latitude")?,
            longitude: number(3, "longitude")?,
            clade: record[4].to_string(),
        };
        meta.validate()
            .map_err(|e| dataset_error(path, line, e.to_string()))?;
        metas.push(meta);
    }
    Ok(metas)
}

const LISTS_HEADER: &str = "variety\tconcept\tword";

/// Loads a dataset from a word-list TSV (`variety<TAB>concept<TAB>word`,
/// empty word = missing entry) and a metadata CSV. Every variety in the
/// lists must appear in the metadata; varieties with no list rows keep
/// all-missing lists. Concepts are ordered by first appearance.
pub fn load_dataset(lists_path: &Path, meta_path: &Path) -> Result<SwadeshDataset> {
    let varieties = load_variety_meta(meta_path)?;
    let variety_index: HashMap<&str, usize> = varieties
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();

    let text = fs::read_to_string(lists_path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end_matches('\r') == LISTS_HEADER => {}
        Some((_, header)) => {
            return Err(dataset_error(
                lists_path,
                1,
                format!("expected header '{}', found '{header}'", LISTS_HEADER.replace('\t', "\\t")),
            ));
        }
        None => return Err(dataset_error(lists_path, 1, "empty file")),
    }

    let mut concepts: Vec<String> = Vec::new();
    let mut concept_index: HashMap<String, usize> = HashMap::new();
    // (variety, concept) -> (line, word)
    let mut cells: HashMap<(usize, usize), (u64, Option<String>)> = HashMap::new();

    for (i, raw) in lines {
        let line_no = (i + 1) as u64;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(dataset_error(
                lists_path,
                line_no,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let (variety, concept, word) = (fields[0], fields[1], fields[2]);
        if variety.is_empty() || concept.is_empty() {
            return Err(dataset_error(
                lists_path,
                line_no,
                "variety and concept must be non-empty",
            ));
        }
        let &v = variety_index.get(variety).ok_or_else(|| {
            dataset_error(
                lists_path,
                line_no,
                format!("variety '{variety}' not present in metadata"),
            )
        })?;
        let c = *concept_index.entry(concept.to_string()).or_insert_with(|| {
            concepts.push(concept.to_string());
            concepts.len() - 1
        });
        let word = if word.is_empty() {
            None
        } else {
            Some(word.to_string())
        };
        if let Some((first_line, _)) = cells.insert((v, c), (line_no, word)) {
            return Err(dataset_error(
                lists_path,
                line_no,
                format!(
                    "duplicate entry for variety '{variety}', concept '{concept}' \
                     (first defined at line {first_line})"
                ),
            ));
        }
    }

    let n_concepts = concepts.len();
    let mut words: Vec<Option<String>> = vec![None; varieties.len() * n_concepts];
    for ((v, c), (_, word)) in cells {
        words[v * n_concepts + c] = word;
    }
    SwadeshDataset::new(varieties, concepts, words)
}

/// One value in a result table.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A rectangular result table with named columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: Vec<S>) -> Table {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; the arity must match the header.
    pub fn push_row(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity does not match table header"
        );
        self.rows.push(row);
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }
}

/// Output encoding for result tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
}

/// Formats a float so that parsing the text recovers the identical bits:
/// shortest round-trip form for finite values, `nan` / `inf` / `-inf`
/// otherwise.
pub fn format_float(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:?}")
    }
}

/// Parses the encoding produced by [`format_float`].
pub fn parse_float(s: &str) -> Option<f64> {
    match s {
        "nan" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => s.parse().ok(),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => format_float(*v),
        Cell::Text(s) => csv_escape(s),
    }
}

fn cell_json(cell: &Cell) -> serde_json::Value {
    match cell {
        Cell::Int(v) => serde_json::Value::from(*v),
        // JSON has no non-finite numbers; fall back to the CSV literals.
        Cell::Float(v) if !v.is_finite() => serde_json::Value::from(format_float(*v)),
        Cell::Float(v) => serde_json::Value::from(*v),
        Cell::Text(s) => serde_json::Value::from(s.as_str()),
    }
}

/// Writes a table to `writer` in the chosen format. CSV uses `\n` line
/// endings and ends with a newline; JSON is a pretty-printed array of
/// row objects keyed by column name.
pub fn write_table<W: io::Write>(table: &Table, mut writer: W, format: TableFormat) -> Result<()> {
    match format {
        TableFormat::Csv => {
            let header: Vec<String> = table.columns.iter().map(|c| csv_escape(c)).collect();
            writeln!(writer, "{}", header.join(","))?;
            for row in &table.rows {
                let fields: Vec<String> = row.iter().map(cell_text).collect();
                writeln!(writer, "{}", fields.join(","))?;
            }
        }
        TableFormat::Json => {
            let rows: Vec<serde_json::Value> = table
                .rows
                .iter()
                .map(|row| {
                    let mut object = serde_json::Map::new();
                    for (name, cell) in table.columns.iter().zip(row) {
                        object.insert(name.clone(), cell_json(cell));
                    }
                    serde_json::Value::Object(object)
                })
                .collect();
            let text = serde_json::to_string_pretty(&rows).expect("table values are serializable");
            writeln!(writer, "{text}")?;
        }
    }
    Ok(())
}

/// Writes a table to a file, choosing the format from the extension
/// (`.json` selects JSON, anything else CSV).
pub fn write_table_file(table: &Table, path: &Path) -> Result<()> {
    let format = match path.extension().and_then(|e| e.to_str()) {
        Some("json") => TableFormat::Json,
        _ => TableFormat::Csv,
    };
    let file = fs::File::create(path)?;
    write_table(table, io::BufWriter::new(file), format)
}

/// Reads back a CSV result table, classifying each field as `Int` when it
/// parses as `i64`, else `Float` when it parses via [`parse_float`], else
/// `Text`.
pub fn read_table_csv(path: &Path) -> Result<Table> {
    let mut reader = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io_err) => Error::Io(io_err),
            other => dataset_error(path, 1, format!("{other:?}")),
        })?;
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| dataset_error(path, 1, e.to_string()))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut table = Table::new(columns);
    for record in reader.records() {
        let record = record.map_err(|e| dataset_error(path, 0, e.to_string()))?;
        let row = record
            .iter()
            .map(|field| {
                if let Ok(v) = field.parse::<i64>() {
                    Cell::Int(v)
                } else if let Some(v) = parse_float(field) {
                    Cell::Float(v)
                } else {
                    Cell::Text(field.to_string())
                }
            })
            .collect();
        table.push_row(row);
    }
    Ok(table)
}
