//! Command-line driver. Exit codes: 0 success, 2 usage or validation error,
//! 3 degraded experiment.
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::estimators::{fit_naive, fit_rr, fit_tsr, CausalCurve, Column, LabeledDataset, Provenance, Role, StageConfig};
use crate::experiments::{collect_experiment, emit_report, fmt_sig6, EstimatorName, ExperimentConfig, ExperimentReport};
use crate::graph::{
    check_assumption_new, check_gact3, check_pmar, check_selection_backdoor, decompose_proxies, tsr_case,
    CausalDag, NodeSet, TsrCase,
};
use crate::linear_models::FeatureMap;
use crate::scm::{builtin_example, linspace, oracle_do_curve, SampleMode, EXAMPLE_NAMES};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGRADED: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "proxicause", version, about = "Causal effects from selection-biased data with proxies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the graphical criteria of a DAG file.
    CheckGraph {
        path: PathBuf,
        /// Proxy subset for GACT3 (comma separated); defaults to all of Z.
        #[arg(long, value_delimiter = ',')]
        zt: Option<Vec<String>>,
    },
    /// Monte Carlo E[Y | do(X = x)] for a builtin example.
    Oracle {
        example: String,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "grid")]
        x: Option<Vec<f64>>,
        /// `lo:hi:points`.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        #[arg(long, default_value_t = 1_000_000)]
        nmc: usize,
        #[command(flatten)]
        seed: SeedArg,
    },
    /// Fit an estimator to user CSV files.
    Fit(FitArgs),
    /// Run a replication study and write CSV reports.
    Run(RunArgs),
    /// List the builtin examples.
    ListExamples,
}

#[derive(Debug, Args)]
struct SeedArg {
    #[arg(long, env = "PROXICAUSE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Selection-biased rows: X, Z and Y columns.
    #[arg(long)]
    selected: PathBuf,
    /// External rows: X and Z columns.
    #[arg(long)]
    external: PathBuf,
    /// DAG file carrying the role and scope annotations.
    #[arg(long)]
    dag: PathBuf,
    #[arg(long, default_value = "tsr")]
    estimator: EstimatorName,
    /// Polynomial degree in the treatment.
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// Integrate stage two numerically even when it is linear.
    #[arg(long)]
    integral: bool,
    /// Points at which to print the fitted curve.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x: Option<Vec<f64>>,
    /// Fit even when the identification assumption fails.
    #[arg(long)]
    force: bool,
    #[command(flatten)]
    seed: SeedArg,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Experiment configuration file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    example: Option<String>,
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    mode: Option<Vec<SampleMode>>,
    #[arg(long, value_delimiter = ',')]
    estimators: Option<Vec<EstimatorName>>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    oracle_mc: Option<usize>,
    #[arg(long, env = "PROXICAUSE_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

/// Parses `args` (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::CheckGraph { path, zt } => check_graph(&path, zt.as_deref(), out),
        Command::Oracle {
            example,
            x,
            grid,
            nmc,
            seed,
        } => oracle(&example, x, grid.as_deref(), nmc, seed.seed, out),
        Command::Fit(a) => fit(&a, out, err),
        Command::Run(a) => run_study(&a, out),
        Command::ListExamples => list_examples(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ExperimentDegraded { .. } => EXIT_DEGRADED,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn load_dag(path: &Path) -> Result<CausalDag> {
    CausalDag::from_json(&read(path)?).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn check_graph(path: &Path, zt: Option<&[String]>, out: &mut dyn Write) -> Result<i32> {
    let dag = load_dag(path)?;
    let roles = dag.roles().ok_or(Error::RolesUnset("x, y and z"))?;
    let zt: NodeSet = match zt {
        Some(names) => dag.set(&names.iter().map(String::as_str).collect::<Vec<_>>())?,
        None => roles.z.clone(),
    };
    let assumption = check_assumption_new(&dag)?;
    let reports = [
        check_pmar(&dag)?,
        assumption.clone(),
        check_selection_backdoor(&dag)?,
        check_gact3(&dag, &zt)?,
    ];
    for r in &reports {
        writeln!(out, "{r}")?;
    }
    if assumption.holds {
        writeln!(out, "TSR case: {}", tsr_case(&dag, true)?)?;
        Ok(EXIT_OK)
    } else {
        Ok(EXIT_USAGE)
    }
}

fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Parse(format!("grid '{spec}' is not lo:hi:points"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if points == 0 || !(lo <= hi) {
        return Err(bad());
    }
    Ok(linspace(lo, hi, points))
}

fn oracle(
    example: &str,
    x: Option<Vec<f64>>,
    grid: Option<&str>,
    nmc: usize,
    seed: u64,
    out: &mut dyn Write,
) -> Result<i32> {
    let ex = builtin_example(example)?;
    if nmc == 0 {
        return Err(Error::InvalidArgument("--nmc must be at least 1".into()));
    }
    let points = match (x, grid) {
        (Some(x), _) => x,
        (None, Some(g)) => parse_grid(g)?,
        (None, None) => ex.x_grid_with(9)?,
    };
    if points.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("x values must be finite".into()));
    }
    let curve = oracle_do_curve(&ex.scm, &points, nmc, seed)?;
    let analytic = ex.truths.causal_effect;
    writeln!(out, "x,do_mean,mc_se{}", if analytic.is_some() { ",analytic" } else { "" })?;
    for i in 0..points.len() {
        write!(out, "{},{},{}", fmt_sig6(curve.x[i]), fmt_sig6(curve.mean[i]), fmt_sig6(curve.se[i]))?;
        match analytic {
            Some(f) => writeln!(out, ",{}", fmt_sig6(f(curve.x[i])))?,
            None => writeln!(out)?,
        }
    }
    Ok(EXIT_OK)
}

/// Reads the named columns of a headed CSV file.
fn read_csv(path: &Path, wanted: &[(String, Role)], provenance: Provenance) -> Result<LabeledDataset> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let at = |e: csv::Error| Error::Parse(format!("{}: {e}", path.display()));
    let header = reader.headers().map_err(at)?.clone();
    let index: Vec<usize> = wanted
        .iter()
        .map(|(name, _)| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::ColumnNotFound(format!("{name} in {}", path.display())))
        })
        .collect::<Result<_>>()?;
    let mut values = vec![Vec::new(); wanted.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(at)?;
        for (k, &i) in index.iter().enumerate() {
            let field = record.get(i).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| {
                Error::Parse(format!(
                    "{}: line {}: '{field}' in column '{}' is not a number",
                    path.display(),
                    line + 2,
                    wanted[k].0
                ))
            })?;
            values[k].push(v);
        }
    }
    let columns = wanted
        .iter()
        .zip(values)
        .map(|((name, role), values)| Column {
            name: name.clone(),
            role: *role,
            values,
        })
        .collect();
    LabeledDataset::new(provenance, columns)
}

fn fit(a: &FitArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let dag = load_dag(&a.dag)?;
    let roles = dag.roles().ok_or(Error::RolesUnset("x, y and z"))?.clone();
    let assumption = check_assumption_new(&dag)?;
    let linear = !a.integral;
    let case = if assumption.holds {
        tsr_case(&dag, linear)?
    } else if a.force {
        writeln!(err, "warning: fitting despite failed check\n{assumption}")?;
        let (plus, minus) = decompose_proxies(&dag)?;
        match (plus.is_empty() && minus.is_empty(), minus.is_empty()) {
            (true, _) => TsrCase::NoProxies,
            (false, true) => TsrCase::ZplusOnly,
            (false, false) if linear => TsrCase::FullLinearShortcut,
            _ => TsrCase::FullIntegral,
        }
    } else {
        writeln!(err, "{assumption}")?;
        return Err(Error::AssumptionViolated(
            "Assumption-2 fails for this graph; pass --force to fit anyway".into(),
        ));
    };

    let (plus, minus) = decompose_proxies(&dag)?;
    let named = |s: &NodeSet, role: Role| -> Vec<(String, Role)> {
        dag.names(s).into_iter().map(|n| (n, role)).collect()
    };
    let mut ext_cols = named(&roles.x, Role::X);
    ext_cols.extend(named(&plus, Role::Zplus));
    ext_cols.extend(named(&minus, Role::Zminus));
    let mut sel_cols = ext_cols.clone();
    sel_cols.push((dag.name(roles.y).to_string(), Role::Y));
    let selected = read_csv(&a.selected, &sel_cols, Provenance::Selected)?;
    let external = read_csv(&a.external, &ext_cols, Provenance::External)?;

    let (nx, np, nm) = (roles.x.len(), plus.len(), minus.len());
    let mut outcome = Vec::new();
    outcome.extend((0..nx).map(|c| (c, a.degree)));
    outcome.extend((nx..nx + np + nm).map(|c| (c, 1)));
    let outcome = FeatureMap::additive(&outcome)?;
    let treatment = FeatureMap::additive(&(0..nx).map(|c| (c, a.degree)).collect::<Vec<_>>())?;
    let proxy_inputs = if case == TsrCase::ZminusOnlyUnconfounded { nx } else { nx + np };
    let proxy = FeatureMap::polynomial(&(0..proxy_inputs).collect::<Vec<_>>(), 1)?;

    let curve: CausalCurve = match a.estimator {
        EstimatorName::Naive => fit_naive(&selected, &treatment)?,
        EstimatorName::Rr | EstimatorName::RrRidge => {
            let mut cfg = StageConfig::ols(outcome, treatment).with_cv_seed(a.seed.seed);
            if a.estimator == EstimatorName::RrRidge {
                cfg = cfg.with_ridge(true, false);
            }
            fit_rr(&selected, &external, &cfg)?
        }
        EstimatorName::Tsr | EstimatorName::TsrRidge => {
            let mut cfg = StageConfig::ols(outcome, proxy).with_cv_seed(a.seed.seed);
            if a.estimator == EstimatorName::TsrRidge {
                let full = matches!(case, TsrCase::FullLinearShortcut | TsrCase::FullIntegral);
                cfg = cfg.with_ridge(true, full);
            }
            fit_tsr(&selected, &external, case, &cfg)?
        }
    };
    writeln!(out, "estimator: {}", a.estimator)?;
    if let Some(c) = curve.case() {
        writeln!(out, "case: {c}")?;
    }
    writeln!(out, "curve: {curve}")?;
    if let Some(xs) = &a.x {
        if nx != 1 {
            return Err(Error::InvalidArgument("--x needs a single treatment column".into()));
        }
        writeln!(out, "x,estimate")?;
        for &x in xs {
            writeln!(out, "{},{}", fmt_sig6(x), fmt_sig6(curve.at(x)))?;
        }
    }
    Ok(EXIT_OK)
}

fn study_config(a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&a.config, &a.example) {
        (Some(path), _) => ExperimentConfig::from_json(&read(path)?)?,
        (None, Some(ex)) => ExperimentConfig::new(ex),
        (None, None) => return Err(Error::InvalidArgument("give --config or --example".into())),
    };
    if let Some(ex) = &a.example {
        cfg.example = ex.clone();
    }
    if let Some(n) = &a.n {
        cfg.n = n.clone();
    }
    if let Some(m) = &a.mode {
        cfg.modes = m.clone();
    }
    if let Some(e) = &a.estimators {
        cfg.estimators = e.clone();
    }
    if let Some(r) = a.runs {
        cfg.runs = r;
    }
    if let Some(m) = a.oracle_mc {
        cfg.oracle_mc = m;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if a.workers.is_some() {
        cfg.workers = a.workers;
    }
    builtin_example(&cfg.example)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Fixed-width summary of a report.
pub fn summary_table(report: &ExperimentReport) -> String {
    let mut s = format!(
        "{:<10} {:>6} {:<9} {:>12} {:>12} {:>12} {:>12} {:>5} {:>5}\n",
        "estimator", "n", "mode", "mse_S", "sd_S", "mse_D", "sd_D", "runs", "fail"
    );
    for c in &report.cells {
        s.push_str(&format!(
            "{:<10} {:>6} {:<9} {:>12} {:>12} {:>12} {:>12} {:>5} {:>5}\n",
            c.estimator.as_str(),
            c.n,
            c.mode.to_string(),
            fmt_sig6(c.mse_s_mean),
            fmt_sig6(c.mse_s_sd),
            fmt_sig6(c.mse_d_mean),
            fmt_sig6(c.mse_d_sd),
            c.runs,
            c.failures
        ));
    }
    s
}

fn run_study(a: &RunArgs, out: &mut dyn Write) -> Result<i32> {
    let cfg = study_config(a)?;
    let report = collect_experiment(&cfg)?;
    let files = emit_report(&report, &a.out)?;
    writeln!(out, "example: {} ({} runs, seed {})", cfg.example, cfg.runs, cfg.seed)?;
    write!(out, "{}", summary_table(&report))?;
    writeln!(out, "wrote {} files to {}", files.len(), a.out.display())?;
    report.check()?;
    Ok(EXIT_OK)
}

fn list_examples(out: &mut dyn Write) -> Result<i32> {
    for name in EXAMPLE_NAMES {
        let ex = builtin_example(name)?;
        writeln!(out, "{:<14} {:<24} {}", name, ex.case.as_str(), ex.description)?;
    }
    Ok(EXIT_OK)
}
