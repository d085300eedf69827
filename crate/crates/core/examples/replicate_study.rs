//! A reduced replication of the quadratic variance study, written as CSV.
//!
//! `cargo run --release --example replicate_study -- out_dir`
use proxicause::cli::summary_table;
use proxicause::experiments::{emit_report, run_experiment, ExperimentConfig};
use proxicause::scm::SampleMode;

fn main() -> proxicause::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "study-out".into());
    let mut cfg = ExperimentConfig::new("var-quadratic");
    cfg.n = vec![500, 5000];
    cfg.runs = 20;
    cfg.modes = vec![SampleMode::Disjoint, SampleMode::SubsetOfD];
    cfg.seed = 1;
    let report = run_experiment(&cfg)?;
    print!("{}", summary_table(&report));
    let files = emit_report(&report, std::path::Path::new(&out))?;
    println!("wrote {} files to {out}", files.len());
    Ok(())
}
