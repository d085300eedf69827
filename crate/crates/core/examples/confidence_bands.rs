//! Pointwise bands of the two-step and repeated-regression curves on the
//! latent-confounder example, against the Monte Carlo truth.
use proxicause::experiments::{collect_experiment, EstimatorName, ExperimentConfig};
use proxicause::scm::SampleMode;

fn main() -> proxicause::Result<()> {
    let mut cfg = ExperimentConfig::new("motivating");
    cfg.n = vec![2000];
    cfg.runs = 40;
    cfg.modes = vec![SampleMode::Disjoint];
    cfg.estimators = vec![EstimatorName::Rr, EstimatorName::Tsr];
    cfg.grid_points = 11;
    cfg.oracle_mc = 100_000;
    let report = collect_experiment(&cfg)?;
    let tsr = report.band(EstimatorName::Tsr, 2000, SampleMode::Disjoint).unwrap();
    let rr = report.band(EstimatorName::Rr, 2000, SampleMode::Disjoint).unwrap();
    println!("{:>7} {:>9} {:>9} {:>9} {:>9}", "x", "truth", "tsr lo", "tsr hi", "rr mean");
    for i in 0..tsr.x.len() {
        println!(
            "{:7.2} {:9.3} {:9.3} {:9.3} {:9.3}",
            tsr.x[i], tsr.truth[i], tsr.lower[i], tsr.upper[i], rr.mean[i]
        );
    }
    Ok(())
}
