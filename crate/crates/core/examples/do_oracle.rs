//! Monte Carlo interventional curves compared with closed-form truths.
use proxicause::scm::{builtin_example, oracle_do_curve, EXAMPLE_NAMES};

fn main() -> proxicause::Result<()> {
    for name in EXAMPLE_NAMES {
        let ex = builtin_example(name)?;
        let grid = ex.x_grid_with(5)?;
        let o = oracle_do_curve(&ex.scm, &grid, 100_000, 7)?;
        println!("== {name}");
        for i in 0..grid.len() {
            let analytic = ex.truths.causal_effect.map_or("-".to_string(), |f| format!("{:.3}", f(grid[i])));
            println!("  x = {:7.3}  do-mean {:8.3} +- {:.3}  analytic {analytic}", grid[i], o.mean[i], o.se[i]);
        }
    }
    Ok(())
}
