//! Naive, repeated-regression and two-step estimates on a confounded example,
//! scored against both the causal and the observational truth.
use proxicause::estimators::{evaluate_mse, fit_naive, fit_rr, fit_tsr};
use proxicause::scm::{builtin_example, make_paired, SampleMode};

fn main() -> proxicause::Result<()> {
    let ex = builtin_example("ex1")?;
    let train = make_paired(&ex.scm, &ex.selection, 5000, SampleMode::Disjoint, 1)?;
    let test = make_paired(&ex.scm, &ex.selection, 5000, SampleMode::Disjoint, 2)?;
    let xs = test.external.values("X")?;
    let causal = ex.truths.causal_effect.unwrap();
    let observational = ex.truths.cond_expectation.unwrap();

    let curves = [
        fit_naive(&train.selected, &ex.maps.treatment)?,
        fit_rr(&train.selected, &train.external, &ex.rr_config())?,
        fit_tsr(&train.selected, &train.external, ex.case, &ex.tsr_config())?,
    ];
    println!("{:<6} {:>12} {:>14}", "", "mse do(X)", "mse E[Y|X]");
    for c in &curves {
        println!(
            "{:<6} {:>12.4} {:>14.4}",
            c.kind().to_string(),
            evaluate_mse(c, xs, causal)?,
            evaluate_mse(c, xs, observational)?
        );
    }
    println!("tsr curve: {}", curves[2]);
    Ok(())
}
