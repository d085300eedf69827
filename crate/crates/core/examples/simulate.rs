//! Samples a structural causal model, applies selection and builds the paired
//! selected/external datasets the estimators consume.
use proxicause::scm::{apply_selection, builtin_example, make_paired, sample, SampleMode, ScmSpec};
use proxicause::stats;

fn main() -> proxicause::Result<()> {
    let ex = builtin_example("ex1")?;
    println!("{}: {}", ex.name, ex.description);

    let pool = sample(&ex.scm, 10_000, 1)?;
    let mask = apply_selection(&pool, &ex.selection, 2)?;
    let kept = mask.iter().filter(|&&m| m).count();
    println!("selected {kept} of {} rows", pool.nrows());

    for mode in [SampleMode::Disjoint, SampleMode::SubsetOfD] {
        let p = make_paired(&ex.scm, &ex.selection, 2000, mode, 3)?;
        println!(
            "{mode:>8}: |S| = {:4}, |D| = {}, mean X in S {:.2} vs D {:.2}",
            p.selected.nrows(),
            p.external.nrows(),
            stats::mean(p.selected.values("X")?),
            stats::mean(p.external.values("X")?)
        );
    }

    // models round-trip through JSON, so custom ones can live in files
    let text = ex.scm.to_json();
    assert_eq!(ScmSpec::from_json(&text)?, ex.scm);
    println!("{text}");
    Ok(())
}
