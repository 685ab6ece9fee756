//! Release gate: one test per headline guarantee of the library.
//!
//! Each test prints a single `PASS ...` line with the measured values;
//! run with `--nocapture` to see them alongside the assertions:
//!
//! ```text
//! cargo test -p lexiclock-cli --test acceptance -- --nocapture
//! ```
//!
//! The statistical tests use fixed seeds, so they are deterministic and
//! the tolerances (4 standard errors on means, 5% on variances) leave
//! no room for flakiness once a seed has been checked in.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use lexiclock_core::analytics::{
    band_relative_error, date_from_statistic, error_curves, moments_chi, moments_omega,
    moments_phi, moments_varphi, phi_variance_terms, relative_error, DatingMethod, Statistic,
};
use lexiclock_core::estimation::{
    estimate_l, estimate_lambda, estimate_mu, estimate_n, SwadeshDataset, VarietyMeta,
};
use lexiclock_core::metrics;
use lexiclock_core::params::EvolutionParams;
use lexiclock_core::simulator::{
    evolve_word_list, monte_carlo, random_word_list, replicate_rng, SamplingMode, SimParams,
};

/// Baseline simulation setup matching the default analytic calibration
/// with an integer alphabet and word length.
fn sim_params(t: f64, seed: u64) -> SimParams {
    SimParams {
        lambda: 1.4e-4,
        mu: 1.6e-4,
        n_sym: 5,
        l_word: 8,
        m: 207,
        t,
        seed,
    }
}

#[test]
fn omega_error_endpoints() {
    let p = EvolutionParams::default();
    let r300 = relative_error(&p, 300.0, Statistic::Omega).unwrap();
    let r6000 = relative_error(&p, 6000.0, Statistic::Omega).unwrap();
    assert!(
        (r300 - 0.49).abs() <= 0.01,
        "relative error at t=300 is {r300}, expected 0.49 +/- 0.01"
    );
    assert!(
        (r6000 - 0.18).abs() <= 0.01,
        "relative error at t=6000 is {r6000}, expected 0.18 +/- 0.01"
    );
    println!(
        "PASS omega error endpoints: R(300)={r300:.4} (target 0.49 +/- 0.01), \
         R(6000)={r6000:.4} (target 0.18 +/- 0.01)"
    );
}

#[test]
fn error_curve_ordering() {
    let p = EvolutionParams::default();
    let rows = error_curves(&p, 300.0, 6000.0, 100.0).unwrap();
    assert_eq!(rows.len(), 58);
    for row in &rows {
        assert!(
            row.r_varphi <= row.r_phi,
            "t={}: r_varphi={} exceeds r_phi={}",
            row.t,
            row.r_varphi,
            row.r_phi
        );
        if row.t <= 4000.0 {
            assert!(
                row.r_phi < row.r_omega,
                "t={}: r_phi={} not below r_omega={}",
                row.t,
                row.r_phi,
                row.r_omega
            );
        }
    }
    let at = |t: f64| rows.iter().find(|r| r.t == t).expect("grid point");
    let r5000 = at(5000.0);
    let r6000 = at(6000.0);
    assert!(r5000.r_phi > r5000.r_omega, "no crossing by t=5000");
    assert!(r6000.r_varphi < r6000.r_omega, "r_varphi not below r_omega at t=6000");
    println!(
        "PASS error curve ordering: r_varphi<=r_phi on all 58 points; r_phi<r_omega through \
         t=4000 and {:.4}>{:.4} at t=5000; r_varphi {:.4} < r_omega {:.4} at t=6000",
        r5000.r_phi, r5000.r_omega, r6000.r_varphi, r6000.r_omega
    );
}

#[test]
fn truncated_variance_identity() {
    let p = EvolutionParams::default();
    let rate = p.lambda + p.mu;
    let ratio = p.lambda / rate;
    let mut worst = 0.0_f64;
    for k in 0..58 {
        let t = 300.0 + 100.0 * k as f64;
        let mean = moments_phi(&p, t).unwrap().mean;
        let replacement_term = phi_variance_terms(&p, t).unwrap()[0];
        let truncated = band_relative_error(mean, replacement_term, rate, t).unwrap();
        let expected = ratio * relative_error(&p, t, Statistic::Omega).unwrap();
        let rel = ((truncated - expected) / expected).abs();
        worst = worst.max(rel);
        assert!(
            rel <= 1e-12,
            "t={t}: truncated error {truncated} vs {expected} (rel {rel:.3e})"
        );
    }
    println!(
        "PASS truncated variance identity: keeping only the replacement variance term gives \
         (lambda/(lambda+mu))*r_omega, max relative deviation {worst:.3e} over 58 grid points"
    );
}

#[test]
fn monte_carlo_moments() {
    let replicates = 100_000_u64;
    let started = Instant::now();
    let mut max_z = 0.0_f64;
    let mut max_var_dev = 0.0_f64;
    let mut max_residual_ratio = 0.0_f64;
    for &t in &[500.0, 1000.0, 2000.0, 4000.0] {
        let sp = sim_params(t, t as u64);
        let summary = monte_carlo(&sp, replicates, SamplingMode::Endpoint).unwrap();
        let ap = sp.analytic();
        let cases = [
            ("omega", summary.omega, moments_omega(&ap, t).unwrap()),
            ("phi", summary.phi, moments_phi(&ap, t).unwrap()),
            ("varphi", summary.varphi, moments_varphi(&ap, t).unwrap()),
        ];
        for (name, sample, analytic) in cases {
            let z = (sample.mean - analytic.mean).abs() / sample.std_error;
            assert!(z < 4.0, "{name} at t={t}: mean z={z:.2}");
            max_z = max_z.max(z);
            let var_dev = ((sample.variance - analytic.variance) / analytic.variance).abs();
            assert!(
                var_dev < 0.05,
                "{name} at t={t}: variance off by {:.2}%",
                100.0 * var_dev
            );
            max_var_dev = max_var_dev.max(var_dev);
        }
        // The sample decomposition residual equals twice the sample
        // covariance of varphi and chi, whose standard deviation is
        // close to 2*sqrt(Var[varphi]*Var[chi]/n) when the statistics
        // are uncorrelated. Five of those is a generous error bar.
        let residual =
            summary.phi.variance - summary.varphi.variance - summary.chi.variance;
        let var_varphi = moments_varphi(&ap, t).unwrap().variance;
        let var_chi = moments_chi(&ap, t).unwrap().variance;
        let bound = 10.0 * (var_varphi * var_chi / replicates as f64).sqrt();
        assert!(
            residual.abs() <= bound,
            "t={t}: decomposition residual {residual:.3e} outside +/- {bound:.3e}"
        );
        max_residual_ratio = max_residual_ratio.max(residual.abs() / bound);
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "took {elapsed:.0}s, budget is 300s");
    println!(
        "PASS monte carlo moments: 4 time points x {replicates} endpoint replicates in \
         {elapsed:.1}s; max mean |z|={max_z:.2} (<4), max variance deviation \
         {:.2}% (<5%), max residual/bound={max_residual_ratio:.2} (<1)",
        100.0 * max_var_dev
    );
}

#[test]
fn sampler_equivalence() {
    let replicates = 10_000_u64;
    let events = monte_carlo(&sim_params(1000.0, 101), replicates, SamplingMode::Events).unwrap();
    let endpoint =
        monte_carlo(&sim_params(1000.0, 202), replicates, SamplingMode::Endpoint).unwrap();
    let cases = [
        ("omega", events.omega, endpoint.omega),
        ("phi", events.phi, endpoint.phi),
        ("varphi", events.varphi, endpoint.varphi),
        ("chi", events.chi, endpoint.chi),
    ];
    let mut zs = Vec::new();
    for (name, a, b) in cases {
        let z = (a.mean - b.mean).abs() / (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(z < 4.0, "{name}: samplers disagree, two-sample z={z:.2}");
        zs.push(format!("{name} {z:.2}"));
    }
    println!(
        "PASS sampler equivalence: event-driven vs endpoint two-sample |z| at t=1000, \
         {replicates} replicates each: {} (all < 4)",
        zs.join(", ")
    );
}

#[test]
fn dating_round_trip() {
    let p = EvolutionParams::default();
    let mut worst = 0.0_f64;
    for &t in &[100.0, 1000.0, 5000.0] {
        let cases = [
            (DatingMethod::Omega, moments_omega(&p, t).unwrap().mean),
            (DatingMethod::Phi, moments_phi(&p, t).unwrap().mean),
            (DatingMethod::Varphi, moments_varphi(&p, t).unwrap().mean),
        ];
        for (method, mean) in cases {
            let dated = date_from_statistic(mean, &p, method).unwrap();
            let rel = ((dated.t_hat - t) / t).abs();
            assert!(rel <= 1e-9, "{method} at t={t}: round trip off by {rel:.3e}");
            worst = worst.max(rel);
        }
    }
    let dated = date_from_statistic(0.755784, &p, DatingMethod::Omega).unwrap();
    assert!(
        (dated.t_lower - 728.4).abs() <= 1.0 && (dated.t_upper - 1294.2).abs() <= 1.0,
        "interval [{:.2}, {:.2}] not within 1 year of [728.4, 1294.2]",
        dated.t_lower,
        dated.t_upper
    );
    let implied = (dated.t_upper - dated.t_lower) / (2.0 * dated.t_hat);
    assert!(
        (implied - 0.2828).abs() <= 0.001,
        "implied relative error {implied:.4} not within 0.001 of 0.2828"
    );
    println!(
        "PASS dating round trip: max relative deviation {worst:.2e} over 9 cases; \
         interval [{:.1}, {:.1}] (target [728.4, 1294.2] +/- 1y); implied relative \
         error {implied:.4} (target 0.2828 +/- 0.001)",
        dated.t_lower, dated.t_upper
    );
}

/// Edit distance straight from the recursive definition, memoized on
/// prefix lengths. Independent of the two-row implementation under
/// test; `memo` is a caller-provided scratch buffer of at least
/// `(a.len() + 1) * (b.len() + 1)` cells, treated as uninitialized.
fn reference_levenshtein(a: &[u32], b: &[u32], memo: &mut [Option<usize>]) -> usize {
    fn go(a: &[u32], b: &[u32], i: usize, j: usize, memo: &mut [Option<usize>], w: usize) -> usize {
        if i == 0 {
            return j;
        }
        if j == 0 {
            return i;
        }
        if let Some(v) = memo[i * w + j] {
            return v;
        }
        let substitute = go(a, b, i - 1, j - 1, memo, w) + usize::from(a[i - 1] != b[j - 1]);
        let delete = go(a, b, i - 1, j, memo, w) + 1;
        let insert = go(a, b, i, j - 1, memo, w) + 1;
        let v = substitute.min(delete).min(insert);
        memo[i * w + j] = Some(v);
        v
    }
    let w = b.len() + 1;
    memo[..(a.len() + 1) * w].fill(None);
    go(a, b, a.len(), b.len(), memo, w)
}

#[test]
fn edit_distance_oracle() {
    let started = Instant::now();
    let mut words: Vec<Vec<u32>> = Vec::new();
    for len in 0..=6_u32 {
        for code in 0..3_u32.pow(len) {
            let mut word = Vec::with_capacity(len as usize);
            let mut rest = code;
            for _ in 0..len {
                word.push(rest % 3);
                rest /= 3;
            }
            words.push(word);
        }
    }
    assert_eq!(words.len(), 1093);
    let mut memo = vec![None; 49];
    let mut pairs = 0_u64;
    for a in &words {
        for b in &words {
            let expected = reference_levenshtein(a, b, &mut memo);
            assert_eq!(
                metrics::levenshtein(a, b),
                expected,
                "distance mismatch for {a:?} vs {b:?}"
            );
            if !(a.is_empty() && b.is_empty()) {
                let longer = a.len().max(b.len()) as f64;
                let normalized = metrics::normalized_levenshtein(a, b).unwrap();
                assert_eq!(normalized, expected as f64 / longer);
            }
            pairs += 1;
        }
    }
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 60.0, "took {elapsed:.0}s, budget is 60s");
    println!(
        "PASS edit distance oracle: {pairs} exhaustive pairs (lengths 0..=6, 3 symbols) \
         match the recursive definition exactly, {elapsed:.1}s"
    );
}

#[test]
fn synthetic_recovery() {
    let started = Instant::now();
    let (lambda, mu, n_sym, l_word, m) = (1.4e-4, 1.6e-4, 5_u32, 8_u32, 207_u32);
    let t_root = 1350.0;
    let mut rng = replicate_rng(20_260_823, 0);
    let ancestor = random_word_list(m, l_word, n_sym, &mut rng);
    let mut next_tag = 1_u64;
    let mut varieties = Vec::new();
    let mut words = Vec::new();
    for v in 0..40_usize {
        let list = evolve_word_list(&ancestor, lambda, mu, n_sym, t_root, &mut next_tag, &mut rng);
        let (clade, lon) = if v < 20 { ("east", 0.0) } else { ("west", 25.0) };
        varieties.push(VarietyMeta {
            id: format!("v{v:02}"),
            name: format!("Variety {v:02}"),
            latitude: 0.1 * (v % 20) as f64,
            longitude: lon,
            clade: clade.to_string(),
        });
        for word in &list {
            let text: String = word
                .symbols
                .iter()
                .map(|&s| char::from(b'a' + s as u8))
                .collect();
            words.push(Some(text));
        }
    }
    let concepts = (0..m).map(|c| format!("c{c:03}")).collect();
    let ds = SwadeshDataset::new(varieties, concepts, words).unwrap();

    let n_est = estimate_n(&ds).unwrap();
    let l_est = estimate_l(&ds, n_est).unwrap();
    let lambda_est = estimate_lambda(&ds, t_root, 0.0, 0.5).unwrap();
    let mu_est = estimate_mu(&ds, t_root, 0.0, n_est, lambda_est).unwrap();
    let mu_hat_true = (n_sym as f64 - 1.0) / n_sym as f64 * mu;

    let n_err = (n_est / n_sym as f64 - 1.0).abs();
    let l_err = (l_est / l_word as f64 - 1.0).abs();
    let lambda_err = (lambda_est / lambda - 1.0).abs();
    let mu_err = (mu_est.mu_hat / mu_hat_true - 1.0).abs();
    assert!(n_err <= 0.03, "n_eff {n_est:.4} off by {:.1}%", 100.0 * n_err);
    assert!(l_err <= 0.03, "l_eff {l_est:.4} off by {:.1}%", 100.0 * l_err);
    assert!(
        lambda_err <= 0.10,
        "lambda {lambda_est:.4e} off by {:.1}%",
        100.0 * lambda_err
    );
    assert!(
        mu_err <= 0.10,
        "mu_hat {:.4e} off by {:.1}%",
        mu_est.mu_hat,
        100.0 * mu_err
    );
    assert!(!mu_est.saturated);
    let elapsed = started.elapsed().as_secs_f64();
    assert!(elapsed < 300.0, "took {elapsed:.0}s, budget is 300s");
    println!(
        "PASS synthetic recovery: 40 varieties from one root at t_root=1350 give \
         n_eff={n_est:.4} ({:+.1}%), l_eff={l_est:.4} ({:+.1}%), lambda={lambda_est:.4e} \
         ({:+.1}%), mu_hat={:.4e} ({:+.1}%), {elapsed:.1}s",
        100.0 * (n_est / n_sym as f64 - 1.0),
        100.0 * (l_est / l_word as f64 - 1.0),
        100.0 * (lambda_est / lambda - 1.0),
        mu_est.mu_hat,
        100.0 * (mu_est.mu_hat / mu_hat_true - 1.0)
    );
}

/// Two clades of six varieties for exercising the dataset commands.
fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let words_x = ["aaaa", "aabb", "bbaa", "abab"];
    let words_y = ["aaaa", "aabb", "bbaa", "wxyz"];
    let mut meta = String::from("variety,name,latitude,longitude,clade\n");
    let mut lists = String::from("variety\tconcept\tword\n");
    for (clade, lon, words) in [("x", 0.0, words_x), ("y", 10.0, words_y)] {
        for i in 0..6 {
            let id = format!("{clade}{i}");
            meta.push_str(&format!("{id},Variety {id},{i}.0,{lon},{clade}\n"));
            for (c, w) in words.iter().enumerate() {
                lists.push_str(&format!("{id}\tc{c}\t{w}\n"));
            }
        }
    }
    let lists_path = dir.join("lists.tsv");
    let meta_path = dir.join("meta.csv");
    fs::write(&lists_path, lists).unwrap();
    fs::write(&meta_path, meta).unwrap();
    (lists_path, meta_path)
}

#[test]
fn cli_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let (lists, meta) = write_fixture(dir.path());
    let lists = lists.to_str().unwrap().to_string();
    let meta = meta.to_str().unwrap().to_string();
    let commands: Vec<(&str, Vec<String>)> = vec![
        ("curves.csv", vec!["curves".into()]),
        (
            "simulate.json",
            vec!["simulate".into(), "--t".into(), "800".into(), "--seed".into(), "9".into()],
        ),
        (
            "validate.json",
            vec![
                "validate".into(),
                "--t".into(),
                "1000".into(),
                "--replicates".into(),
                "5000".into(),
                "--seed".into(),
                "5".into(),
            ],
        ),
        (
            "estimate.json",
            vec![
                "estimate".into(),
                "--lists".into(),
                lists.clone(),
                "--meta".into(),
                meta.clone(),
                "--t-root".into(),
                "1000".into(),
            ],
        ),
        (
            "sweep.csv",
            vec![
                "sweep".into(),
                "--lists".into(),
                lists.clone(),
                "--meta".into(),
                meta.clone(),
                "--t-root".into(),
                "1000".into(),
                "--g-max".into(),
                "2000".into(),
                "--step".into(),
                "500".into(),
            ],
        ),
    ];
    let mut checked = 0;
    for (file, args) in &commands {
        let mut outputs = Vec::new();
        for threads in ["1", "3", "3"] {
            let path = dir.path().join(format!("{threads}-{}-{file}", outputs.len()));
            let status = Command::new(env!("CARGO_BIN_EXE_lexiclock"))
                .args(args)
                .args(["--threads", threads, "--output"])
                .arg(&path)
                .env_remove("LEXICLOCK_CONFIG")
                .status()
                .expect("binary runs");
            assert!(status.success(), "{file}: exit {status:?}");
            outputs.push(fs::read(&path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{file}: differs between thread counts");
        assert_eq!(outputs[1], outputs[2], "{file}: differs between repeated runs");
        checked += 1;
    }
    println!(
        "PASS cli determinism: {checked} commands produced byte-identical output files \
         across --threads 1, --threads 3, and a repeated run"
    );
}
