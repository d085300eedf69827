//! Fits the two-step estimator to CSV files through the command-line entry
//! point, as `proxicause fit` would.
use proxicause::scm::{builtin_example, make_paired, SampleMode};

fn main() -> proxicause::Result<()> {
    let dir = std::env::temp_dir().join("proxicause-fit-example");
    std::fs::create_dir_all(&dir)?;
    let ex = builtin_example("ex5")?;
    let p = make_paired(&ex.scm, &ex.selection, 3000, SampleMode::Disjoint, 4)?;
    for (file, ds) in [("selected.csv", &p.selected), ("external.csv", &p.external)] {
        let cols = ds.columns();
        let mut text = cols.iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(",") + "\n";
        for i in 0..ds.nrows() {
            text += &(cols.iter().map(|c| c.values[i].to_string()).collect::<Vec<_>>().join(",") + "\n");
        }
        std::fs::write(dir.join(file), text)?;
    }
    let dag = dir.join("graph.json");
    std::fs::write(&dag, ex.dag.to_json())?;

    let path = |f: &str| dir.join(f).to_string_lossy().into_owned();
    let args = [
        "proxicause", "fit", "--selected", &path("selected.csv"), "--external", &path("external.csv"),
        "--dag", &path("graph.json"), "--x", "-2,-1,0,1",
    ];
    let code = proxicause::cli::run(args, &mut std::io::stdout(), &mut std::io::stderr());
    let f = ex.truths.causal_effect.unwrap();
    println!("truth: {}", [-2.0, -1.0, 0.0, 1.0].map(f).map(|v| format!("{v:.3}")).join(", "));
    std::process::exit(code);
}
