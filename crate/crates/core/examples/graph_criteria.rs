//! Checks every graphical criterion on the bundled figure fixtures.
//!
//! Run with `cargo run --example graph_criteria`.
use proxicause::graph::{check_assumption_new, check_gact3, check_pmar, check_selection_backdoor, fixture, tsr_case, FIXTURES};

fn main() -> proxicause::Result<()> {
    for (name, _) in FIXTURES {
        let dag = fixture(name)?;
        let z = dag.roles().expect("fixtures carry roles").z.clone();
        println!("== {name}");
        println!("{}", check_pmar(&dag)?);
        println!("{}", check_assumption_new(&dag)?);
        println!("{}", check_selection_backdoor(&dag)?);
        println!("{}", check_gact3(&dag, &z)?);
        println!("estimator case: {}", tsr_case(&dag, true)?);
    }
    Ok(())
}
