//! Command-line interface: relative-error curves, pair simulation, Monte
//! Carlo validation, dating, and dataset estimation.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags or parameter
//! ranges), 1 for data-level failures (unreadable files, saturated
//! signals, uninformative statistics).

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use lexiclock_core::analytics::{self, DatingMethod};
use lexiclock_core::dataio::{self, format_float, Cell, Table, TableFormat};
use lexiclock_core::error::Error as CoreError;
use lexiclock_core::estimation;
use lexiclock_core::metrics;
use lexiclock_core::params::EvolutionParams;
use lexiclock_core::simulator::{self, SamplingMode, SimParams};

#[derive(Parser)]
#[command(
    name = "lexiclock",
    version,
    about = "Lexicon-evolution toolkit: dating statistics, simulation, and rate estimation",
    max_term_width = 100
)]
struct Cli {
    #[command(flatten)]
    globals: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Word replacement rate per year (overrides config).
    #[arg(long, global = true, value_name = "RATE")]
    lambda: Option<f64>,

    /// Per-character mutation rate per year (overrides config).
    #[arg(long, global = true, value_name = "RATE")]
    mu: Option<f64>,

    /// Effective alphabet size (overrides config).
    #[arg(long, global = true, value_name = "N")]
    n_eff: Option<f64>,

    /// Effective word length (overrides config).
    #[arg(long, global = true, value_name = "L")]
    l_eff: Option<f64>,

    /// Concepts per list (overrides config).
    #[arg(long, global = true, value_name = "M")]
    m: Option<u32>,

    /// Cognacy detection threshold on normalized Levenshtein distance.
    #[arg(long, global = true, value_name = "THETA")]
    theta: Option<f64>,

    /// Master RNG seed.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: one per core). Results do not depend on
    /// this value.
    #[arg(long, global = true, value_name = "K")]
    threads: Option<usize>,

    /// JSON config file with parameter defaults.
    #[arg(long, global = true, env = "LEXICLOCK_CONFIG", value_name = "PATH")]
    config: Option<PathBuf>,
}

/// Parameter set after merging built-in defaults, the config file, and
/// command-line flags (highest precedence last).
struct Effective {
    params: EvolutionParams,
    theta: f64,
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Relative dating error of the three statistics over a time grid.
    Curves(CurvesArgs),
    /// Simulate one pair of lists descending from a common ancestor.
    Simulate(SimulateArgs),
    /// Monte Carlo check of simulated moments against the closed forms.
    Validate(ValidateArgs),
    /// Invert observed statistics into separation-time estimates.
    Date(DateArgs),
    /// Estimate alphabet size, word length, and rates from a dataset.
    Estimate(EstimateArgs),
    /// Rate estimates as a function of the geographic distance cutoff.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct CurvesArgs {
    /// First grid point in years.
    #[arg(long, default_value_t = 300.0)]
    t_min: f64,
    /// Last grid point in years.
    #[arg(long, default_value_t = 6000.0)]
    t_max: f64,
    /// Grid step in years.
    #[arg(long, default_value_t = 100.0)]
    step: f64,
    /// Output file (.json for JSON, otherwise CSV); stdout if omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    /// Replay every replacement and mutation event.
    Events,
    /// Draw directly from the exact endpoint distribution.
    Endpoint,
}

impl From<SamplerArg> for SamplingMode {
    fn from(s: SamplerArg) -> Self {
        match s {
            SamplerArg::Events => SamplingMode::Events,
            SamplerArg::Endpoint => SamplingMode::Endpoint,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    /// Years from the common ancestor to each list.
    #[arg(long)]
    t: f64,
    /// Alphabet size for simulation (integer).
    #[arg(long, default_value_t = 5)]
    n_sym: u32,
    /// Word length for simulation.
    #[arg(long, default_value_t = 8)]
    l_word: u32,
    #[arg(long, value_enum, default_value_t = SamplerArg::Events)]
    sampler: SamplerArg,
    /// Output JSON file; stdout if omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Years from the common ancestor to each list.
    #[arg(long)]
    t: f64,
    /// Alphabet size for simulation (integer).
    #[arg(long, default_value_t = 5)]
    n_sym: u32,
    /// Word length for simulation.
    #[arg(long, default_value_t = 8)]
    l_word: u32,
    /// Number of independent pair replicates.
    #[arg(long, default_value_t = 100_000)]
    replicates: u64,
    #[arg(long, value_enum, default_value_t = SamplerArg::Endpoint)]
    sampler: SamplerArg,
    /// Optional JSON report file (a summary always goes to stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DateArgs {
    /// Observed cognate fraction to invert.
    #[arg(long, value_name = "VALUE")]
    omega: Option<f64>,
    /// Observed recentred overlap (all concepts) to invert.
    #[arg(long, value_name = "VALUE")]
    phi: Option<f64>,
    /// Observed recentred overlap (cognate concepts) to invert.
    #[arg(long, value_name = "VALUE")]
    varphi: Option<f64>,
    /// Observed ancestor-vs-descendant cognate fraction to invert.
    #[arg(long, value_name = "VALUE")]
    ancestor: Option<f64>,
    /// Word-list TSV; with --meta and --pair, dates a variety pair.
    #[arg(long, value_name = "FILE", requires = "meta", requires = "pair")]
    lists: Option<PathBuf>,
    /// Variety metadata CSV.
    #[arg(long, value_name = "FILE", requires = "lists")]
    meta: Option<PathBuf>,
    /// The two variety ids to compare.
    #[arg(long, num_args = 2, value_names = ["A", "B"], requires = "lists")]
    pair: Option<Vec<String>>,
    /// Output file (.json for JSON, otherwise CSV); stdout if omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    /// Word-list TSV file.
    #[arg(long, value_name = "FILE")]
    lists: PathBuf,
    /// Variety metadata CSV file.
    #[arg(long, value_name = "FILE")]
    meta: PathBuf,
    /// Years from the common root to every variety; enables rate
    /// estimation.
    #[arg(long)]
    t_root: Option<f64>,
    /// Geographic cutoff in km: only cross-clade pairs farther apart
    /// contribute to rates.
    #[arg(long, default_value_t = 0.0)]
    g: f64,
    /// Optional JSON report file (a summary always goes to stdout).
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Word-list TSV file.
    #[arg(long, value_name = "FILE")]
    lists: PathBuf,
    /// Variety metadata CSV file.
    #[arg(long, value_name = "FILE")]
    meta: PathBuf,
    /// Years from the common root to every variety.
    #[arg(long)]
    t_root: f64,
    /// First cutoff in km.
    #[arg(long, default_value_t = 0.0)]
    g_min: f64,
    /// Last cutoff in km.
    #[arg(long, default_value_t = 1500.0)]
    g_max: f64,
    /// Cutoff step in km.
    #[arg(long, default_value_t = 100.0)]
    step: f64,
    /// Output file (.json for JSON, otherwise CSV); stdout if omitted.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
}

enum CliError {
    /// Bad flag values or combinations: exit 2.
    Usage(String),
    /// Failures on data or model domain: exit 1.
    Data(String),
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Data(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(threads) = cli.globals.threads {
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Data(format!("thread pool: {e}")))?;
    }
    let effective = resolve_params(&cli.globals)?;
    match cli.command {
        Command::Curves(args) => cmd_curves(&effective, args),
        Command::Simulate(args) => cmd_simulate(&effective, args),
        Command::Validate(args) => cmd_validate(&effective, args),
        Command::Date(args) => cmd_date(&effective, args),
        Command::Estimate(args) => cmd_estimate(&effective, args),
        Command::Sweep(args) => cmd_sweep(&effective, args),
    }
}

/// Merges defaults, config file, and flags, then validates ranges.
/// Violations here are usage errors (exit 2).
fn resolve_params(globals: &GlobalOpts) -> CliResult<Effective> {
    let mut config = dataio::Config::default();
    if let Some(path) = &globals.config {
        config = dataio::load_config(path).map_err(|e| CliError::Data(e.to_string()))?;
    }
    let params = EvolutionParams {
        lambda: globals.lambda.unwrap_or(config.lambda),
        mu: globals.mu.unwrap_or(config.mu),
        n_eff: globals.n_eff.unwrap_or(config.n_eff),
        l_eff: globals.l_eff.unwrap_or(config.l_eff),
        m: globals.m.unwrap_or(config.m),
    };
    params
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let theta = globals.theta.unwrap_or(config.theta);
    if !(0.0..=1.0).contains(&theta) {
        return Err(CliError::Usage(format!(
            "theta must be in [0, 1] (got {theta})"
        )));
    }
    Ok(Effective {
        params,
        theta,
        seed: globals.seed,
    })
}

/// Writes a table to the file named by `output` (format chosen by
/// extension) or as CSV to stdout.
fn emit_table(table: &Table, output: Option<&Path>) -> CliResult<()> {
    match output {
        Some(path) => dataio::write_table_file(table, path)?,
        None => dataio::write_table(table, std::io::stdout().lock(), TableFormat::Csv)?,
    }
    Ok(())
}

fn emit_json(value: &serde_json::Value, output: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).expect("report is serializable");
    match output {
        Some(path) => {
            let mut file = std::fs::File::create(path)?;
            writeln!(file, "{text}")?;
        }
        None => println!("{text}"),
    }
    Ok(())
}

fn cmd_curves(effective: &Effective, args: CurvesArgs) -> CliResult<()> {
    let rows = analytics::error_curves(&effective.params, args.t_min, args.t_max, args.step)
        .map_err(|e| match e {
            CoreError::InvalidGrid(_) | CoreError::InvalidParameter(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        })?;
    let mut table = Table::new(vec!["t", "r_omega", "r_phi", "r_varphi"]);
    for row in rows {
        table.push_row(vec![
            Cell::Float(row.t),
            Cell::Float(row.r_omega),
            Cell::Float(row.r_phi),
            Cell::Float(row.r_varphi),
        ]);
    }
    emit_table(&table, args.output.as_deref())
}

fn sim_params(effective: &Effective, t: f64, n_sym: u32, l_word: u32) -> CliResult<SimParams> {
    let p = SimParams {
        lambda: effective.params.lambda,
        mu: effective.params.mu,
        n_sym,
        l_word,
        m: effective.params.m,
        t,
        seed: effective.seed,
    };
    p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(p)
}

fn cmd_simulate(effective: &Effective, args: SimulateArgs) -> CliResult<()> {
    let p = sim_params(effective, args.t, args.n_sym, args.l_word)?;
    let sample = match args.sampler.into() {
        SamplingMode::Events => simulator::evolve_pair_events(&p),
        SamplingMode::Endpoint => simulator::evolve_pair_endpoint(&p),
    }?;
    let stats = sample.statistics(f64::from(p.n_sym))?;
    let concepts: Vec<serde_json::Value> = (0..sample.n_concepts())
        .map(|i| {
            serde_json::json!({
                "word_a": sample.list_a[i].symbols,
                "word_b": sample.list_b[i].symbols,
                "lineage_a": sample.list_a[i].lineage,
                "lineage_b": sample.list_b[i].lineage,
                "cognate": sample.cognate(i),
            })
        })
        .collect();
    let report = serde_json::json!({
        "params": p,
        "sampler": match args.sampler { SamplerArg::Events => "events", SamplerArg::Endpoint => "endpoint" },
        "statistics": {
            "omega": stats.omega,
            "phi": stats.phi,
            "varphi": stats.varphi,
            "chi": stats.chi,
            "mean_distance": stats.mean_distance,
        },
        "concepts": concepts,
    });
    emit_json(&report, args.output.as_deref())
}

fn cmd_validate(effective: &Effective, args: ValidateArgs) -> CliResult<()> {
    let p = sim_params(effective, args.t, args.n_sym, args.l_word)?;
    if args.replicates < 2 {
        return Err(CliError::Usage("--replicates must be at least 2".into()));
    }
    let mode: SamplingMode = args.sampler.into();
    let analytic_params = p.analytic();
    let sample = simulator::monte_carlo(&p, args.replicates, mode)?;

    let analytic = [
        analytics::moments_omega(&analytic_params, p.t)?,
        analytics::moments_phi(&analytic_params, p.t)?,
        analytics::moments_varphi(&analytic_params, p.t)?,
        analytics::moments_chi(&analytic_params, p.t)?,
    ];
    let observed = [sample.omega, sample.phi, sample.varphi, sample.chi];
    let names = ["omega", "phi", "varphi", "chi"];

    let mut rows = serde_json::Map::new();
    println!(
        "{:<8} {:>14} {:>14} {:>8} {:>14} {:>14} {:>10}",
        "stat", "mean(model)", "mean(sample)", "z", "var(model)", "var(sample)", "var rel"
    );
    for ((name, a), o) in names.iter().zip(analytic).zip(observed) {
        let z = if o.std_error > 0.0 {
            (o.mean - a.mean) / o.std_error
        } else if o.mean == a.mean {
            0.0
        } else {
            f64::INFINITY
        };
        let var_rel = if a.variance > 0.0 {
            (o.variance - a.variance) / a.variance
        } else if o.variance == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        println!(
            "{name:<8} {:>14.8} {:>14.8} {:>8.3} {:>14.6e} {:>14.6e} {:>9.4}%",
            a.mean,
            o.mean,
            z,
            a.variance,
            o.variance,
            100.0 * var_rel
        );
        rows.insert(
            (*name).to_string(),
            serde_json::json!({
                "analytic_mean": a.mean,
                "sample_mean": o.mean,
                "std_error": o.std_error,
                "z": z,
                "analytic_variance": a.variance,
                "sample_variance": o.variance,
                "variance_rel_dev": var_rel,
            }),
        );
    }
    // The per-replicate identity chi = phi - varphi makes this residual
    // exactly the covariance defect of the sample decomposition.
    let residual = sample.phi.variance - sample.varphi.variance - sample.chi.variance;
    println!("variance decomposition residual: {}", format_float(residual));
    let report = serde_json::json!({
        "params": p,
        "sampler": mode,
        "replicates": args.replicates,
        "statistics": rows,
        "decomposition_residual": residual,
    });
    if args.output.is_some() {
        emit_json(&report, args.output.as_deref())?;
    }
    Ok(())
}

fn date_one(
    effective: &Effective,
    method: DatingMethod,
    value: f64,
) -> CliResult<analytics::DatingResult> {
    analytics::date_from_statistic(value, &effective.params, method).map_err(|e| e.into())
}

fn cmd_date(effective: &Effective, args: DateArgs) -> CliResult<()> {
    let mut requests: Vec<(DatingMethod, f64)> = Vec::new();
    for (method, value) in [
        (DatingMethod::Omega, args.omega),
        (DatingMethod::Phi, args.phi),
        (DatingMethod::Varphi, args.varphi),
        (DatingMethod::Ancestor, args.ancestor),
    ] {
        if let Some(v) = value {
            requests.push((method, v));
        }
    }
    let from_dataset = args.lists.is_some();
    if from_dataset && !requests.is_empty() {
        return Err(CliError::Usage(
            "give either statistic values or --lists/--meta/--pair, not both".into(),
        ));
    }
    if from_dataset {
        let lists = args.lists.as_ref().expect("checked above");
        let meta = args.meta.as_ref().expect("clap requires");
        let pair = args.pair.as_ref().expect("clap requires");
        let ds = dataio::load_dataset(lists, meta)?;
        let index = |id: &str| {
            ds.variety_index(id)
                .ok_or_else(|| CliError::Data(format!("variety '{id}' not in dataset")))
        };
        let (a, b) = (index(&pair[0])?, index(&pair[1])?);
        let (wa, wb) = (ds.word_list(a), ds.word_list(b));
        let flags = metrics::detect_cognates(&wa, &wb, effective.theta)?;
        let stats = metrics::pair_statistics(&wa, &wb, &flags, effective.params.n_eff)?;
        requests = vec![
            (DatingMethod::Omega, stats.omega),
            (DatingMethod::Phi, stats.phi),
            (DatingMethod::Varphi, stats.varphi),
        ];
    } else if requests.is_empty() {
        return Err(CliError::Usage(
            "nothing to date: give --omega/--phi/--varphi/--ancestor or --lists/--meta/--pair"
                .into(),
        ));
    }
    let mut table = Table::new(vec!["method", "value", "t_hat", "t_lower", "t_upper"]);
    for (method, value) in requests {
        let d = date_one(effective, method, value)?;
        table.push_row(vec![
            method.to_string().into(),
            Cell::Float(value),
            Cell::Float(d.t_hat),
            Cell::Float(d.t_lower),
            Cell::Float(d.t_upper),
        ]);
    }
    emit_table(&table, args.output.as_deref())
}

fn opt_float(v: Option<f64>) -> serde_json::Value {
    match v {
        Some(x) if x.is_finite() => serde_json::json!(x),
        Some(x) => serde_json::json!(format_float(x)),
        None => serde_json::Value::Null,
    }
}

fn cmd_estimate(effective: &Effective, args: EstimateArgs) -> CliResult<()> {
    if let Some(t_root) = args.t_root {
        if !(t_root > 0.0 && t_root.is_finite()) {
            return Err(CliError::Usage(format!(
                "--t-root must be finite and > 0 (got {t_root})"
            )));
        }
    }
    if !(args.g >= 0.0 && args.g.is_finite()) {
        return Err(CliError::Usage(format!(
            "--g must be finite and >= 0 (got {})",
            args.g
        )));
    }
    let ds = dataio::load_dataset(&args.lists, &args.meta)?;
    let n_eff = estimation::estimate_n(&ds)?;
    let l_eff = estimation::estimate_l(&ds, n_eff)?;
    println!("varieties: {}", ds.n_varieties());
    println!("concepts:  {}", ds.n_concepts());
    println!("n_eff:     {n_eff:.4}");
    println!("l_eff:     {l_eff:.4}");

    let mut lambda = None;
    let mut mu = None;
    let mut mu_hat = None;
    let mut saturated = false;
    let mut pair_count = None;
    if let Some(t_root) = args.t_root {
        let pairs = estimation::admissible_pairs(&ds, args.g)?;
        pair_count = Some(pairs.len());
        let l = estimation::estimate_lambda(&ds, t_root, args.g, effective.theta)?;
        let m = estimation::estimate_mu(&ds, t_root, args.g, n_eff, l)?;
        println!("pairs:     {} (cross-clade, distance > {} km)", pairs.len(), args.g);
        println!("lambda:    {l:.6e}");
        println!("mu:        {:.6e}", m.mu);
        println!("mu_hat:    {:.6e}", m.mu_hat);
        if m.saturated {
            println!("warning: mu < 0 (replacement alone overexplains the distances)");
        }
        lambda = Some(l);
        mu = Some(m.mu);
        mu_hat = Some(m.mu_hat);
        saturated = m.saturated;
    }
    let report = serde_json::json!({
        "varieties": ds.n_varieties(),
        "concepts": ds.n_concepts(),
        "n_eff": n_eff,
        "l_eff": l_eff,
        "t_root": opt_float(args.t_root),
        "g": args.g,
        "pair_count": pair_count,
        "lambda": opt_float(lambda),
        "mu": opt_float(mu),
        "mu_hat": opt_float(mu_hat),
        "saturated": saturated,
        "theta": effective.theta,
    });
    if args.output.is_some() {
        emit_json(&report, args.output.as_deref())?;
    }
    Ok(())
}

fn cmd_sweep(effective: &Effective, args: SweepArgs) -> CliResult<()> {
    let ds = dataio::load_dataset(&args.lists, &args.meta)?;
    let rows = estimation::sweep_g(
        &ds,
        args.t_root,
        args.g_min,
        args.g_max,
        args.step,
        effective.theta,
    )
    .map_err(|e| match e {
        CoreError::InvalidGrid(_) | CoreError::InvalidParameter(_) => {
            CliError::Usage(e.to_string())
        }
        other => CliError::Data(other.to_string()),
    })?;
    let mut table = Table::new(vec!["g", "pair_count", "lambda", "mu_hat"]);
    for row in rows {
        // Missing estimates appear as the `nan` sentinel in CSV.
        table.push_row(vec![
            Cell::Float(row.g),
            Cell::Int(row.pair_count as i64),
            Cell::Float(row.lambda.unwrap_or(f64::NAN)),
            Cell::Float(row.mu_hat.unwrap_or(f64::NAN)),
        ]);
    }
    emit_table(&table, args.output.as_deref())
}
