use proxicause::graph::tsr_case;
use proxicause::linear_models::{expand_features, fit_ols, FeatureMap};
use proxicause::scm::*;
use proxicause::stats;
use proxicause::Error;

use nalgebra::{DMatrix, DVector};

#[test]
fn sampling_is_deterministic_in_the_seed() {
    let ex = builtin_example("ex1").unwrap();
    let a = sample(&ex.scm, 1000, 42).unwrap();
    let b = sample(&ex.scm, 1000, 42).unwrap();
    let c = sample(&ex.scm, 1000, 43).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.column("X").unwrap(), c.column("X").unwrap());
}

#[test]
fn exogenous_moments_match_their_parameters() {
    let ex = builtin_example("ex2").unwrap();
    let t = sample(&ex.scm, 200_000, 1).unwrap();
    let z = t.column("Zplus").unwrap();
    // Z+ ~ N(-1, 2^2)
    assert!((stats::mean(z) + 1.0).abs() < 0.03);
    assert!((stats::var(z) - 4.0).abs() < 0.06);
    // X = Z+ + e, so Var(X) = 5
    assert!((stats::var(t.column("X").unwrap()) - 5.0).abs() < 0.08);
}

#[test]
fn variance_study_selects_half_the_population() {
    // X + Z+ ~ N(-2, 2) and the threshold sits at its mean
    let ex = builtin_example("var-quadratic").unwrap();
    let t = sample(&ex.scm, 200_000, 9).unwrap();
    let mask = apply_selection(&t, &ex.selection, 10).unwrap();
    let frac = mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64;
    assert!((frac - 0.5).abs() < 0.005, "fraction {frac}");
}

#[test]
fn logistic_selection_matches_its_probability() {
    // ex2 selects with sigmoid(X) * sigmoid(-Z+); compare to the Monte Carlo
    // average of that product over the same rows
    let ex = builtin_example("ex2").unwrap();
    let t = sample(&ex.scm, 200_000, 3).unwrap();
    let mask = apply_selection(&t, &ex.selection, 4).unwrap();
    let (x, z) = (t.column("X").unwrap(), t.column("Zplus").unwrap());
    let sig = |v: f64| 1.0 / (1.0 + (-v).exp());
    let expected: f64 = x.iter().zip(z).map(|(x, z)| sig(*x) * sig(-z)).sum::<f64>() / x.len() as f64;
    let frac = mask.iter().filter(|&&m| m).count() as f64 / mask.len() as f64;
    assert!((frac - expected).abs() < 0.005, "{frac} vs {expected}");
}

#[test]
fn subset_mode_keeps_selected_rows_of_the_pool() {
    let ex = builtin_example("var-linear").unwrap();
    let p = make_paired(&ex.scm, &ex.selection, 2000, SampleMode::SubsetOfD, 5).unwrap();
    let rows = p.selected_rows.as_ref().unwrap();
    assert_eq!(p.external.nrows(), 2000);
    assert_eq!(rows.len(), p.selected.nrows());
    let dx = p.external.values("X").unwrap();
    let sx = p.selected.values("X").unwrap();
    for (k, &r) in rows.iter().enumerate() {
        assert_eq!(dx[r], sx[k]);
    }
    assert!(p.external.column("Y").is_err());
}

#[test]
fn disjoint_mode_draws_an_independent_pool() {
    let ex = builtin_example("var-linear").unwrap();
    let p = make_paired(&ex.scm, &ex.selection, 500, SampleMode::Disjoint, 5).unwrap();
    assert!(p.selected_rows.is_none());
    assert_eq!(p.external.nrows(), 500);
    let dx = p.external.values("X").unwrap();
    assert!(p.selected.values("X").unwrap().iter().all(|v| !dx.contains(v)));
    // every selected row satisfies the threshold
    let (x, z) = (p.selected.values("X").unwrap(), p.selected.values("Zplus").unwrap());
    assert!(x.iter().zip(z).all(|(x, z)| x + z < -2.0));
}

#[test]
fn empty_selection_is_reported_after_retries() {
    let ex = builtin_example("var-linear").unwrap();
    let never = SelectionSpec::threshold(vec![Condition::new(vec![Term::var(1.0, "X")], Comparator::Greater, 1e6)]);
    let err = make_paired(&ex.scm, &never, 100, SampleMode::Disjoint, 1).unwrap_err();
    assert_eq!(err, Error::EmptySelection { attempts: 10 });
}

#[test]
fn latent_variables_are_never_exported() {
    let ex = builtin_example("motivating").unwrap();
    let p = make_paired(&ex.scm, &ex.selection, 1000, SampleMode::Disjoint, 2).unwrap();
    assert!(p.selected.column("U").is_err());
    assert!(p.external.column("U").is_err());
    assert!(p.selected.column("Zminus").is_ok());
}

#[test]
fn builtin_cases_match_their_graphs() {
    for name in EXAMPLE_NAMES {
        let ex = builtin_example(name).unwrap();
        assert_eq!(tsr_case(&ex.dag, true).unwrap(), ex.case, "{name}");
    }
    assert!(matches!(builtin_example("ex9"), Err(Error::UnknownExample(_))));
}

#[test]
fn grid_spans_the_central_mass_of_the_treatment() {
    // var-*: X ~ N(0,1), so the 0.5% and 99.5% quantiles are -+2.5758
    let g = builtin_example("var-linear").unwrap().x_grid().unwrap();
    assert_eq!(g.len(), 101);
    assert!((g[0] + 2.5758).abs() < 0.03 && (g[100] - 2.5758).abs() < 0.03);
    assert!(g.windows(2).all(|w| w[1] > w[0]));
}

/// Quadratic least squares of Y on X over a large observational sample.
fn observational_fit(name: &str) -> (Box<dyn Fn(f64) -> f64>, f64, f64) {
    let ex = builtin_example(name).unwrap();
    let t = sample(&ex.scm, 300_000, 77).unwrap();
    let x = t.column("X").unwrap();
    let y = t.column("Y").unwrap();
    let fmap = FeatureMap::polynomial(&[0], 2).unwrap();
    let design = expand_features(&fmap, &DMatrix::from_column_slice(x.len(), 1, x))
        .unwrap()
        .with_response(DVector::from_column_slice(y))
        .unwrap();
    let m = fit_ols(&design, &fmap).unwrap();
    (
        Box::new(move |v| m.predict_row(&[v])),
        stats::quantile(x, 0.1),
        stats::quantile(x, 0.9),
    )
}

#[test]
fn conditional_expectations_match_simulation() {
    for name in ["var-linear", "var-quadratic", "ex1", "ex2", "ex3", "ex4", "ex5", "ex6"] {
        let ex = builtin_example(name).unwrap();
        let truth = ex.truths.cond_expectation.unwrap();
        let (fit, lo, hi) = observational_fit(name);
        for x in linspace(lo, hi, 7) {
            let (a, b) = (fit(x), truth(x));
            assert!((a - b).abs() < 0.05 * (1.0 + b.abs()), "{name} at {x}: {a} vs {b}");
        }
    }
}

#[test]
fn oracle_matches_closed_form_truths() {
    for name in ["ex2", "ex5", "ex6"] {
        let ex = builtin_example(name).unwrap();
        let f = ex.truths.causal_effect.unwrap();
        let grid = [-1.0, 0.5, 2.0];
        let o = oracle_do_curve(&ex.scm, &grid, 100_000, 11).unwrap();
        for i in 0..grid.len() {
            let tol = 5.0 * o.se[i] + 1e-9;
            assert!((o.mean[i] - f(grid[i])).abs() <= tol, "{name} at {}", grid[i]);
        }
    }
}

#[test]
fn motivating_oracle_matches_the_derived_effect() {
    // E[Y | do(x)] = 0.5x^2 + 2E[Z- | do(x)] + 2E[U] = 0.5x^2 + 2x
    let ex = builtin_example("motivating").unwrap();
    let grid = [-3.0, 0.0, 1.5, 4.0];
    let o = oracle_do_curve(&ex.scm, &grid, 200_000, 3).unwrap();
    for i in 0..grid.len() {
        let x = grid[i];
        assert!((o.mean[i] - (0.5 * x * x + 2.0 * x)).abs() <= 5.0 * o.se[i]);
    }
}

#[test]
fn intervention_on_an_identity_mechanism_is_the_constant() {
    let spec = ScmSpec {
        variables: vec![
            Assignment::exogenous("X", 0.0, 1.0),
            Assignment::structural("Y", vec![Term::var(1.0, "X")], 0.0),
        ],
        treatment: "X".into(),
        target: "Y".into(),
        zplus: vec![],
        zminus: vec![],
    };
    let o = oracle_do_curve(&spec, &[-2.0, 3.5], 10, 0).unwrap();
    assert_eq!(o.mean, vec![-2.0, 3.5]);
    assert_eq!(o.se, vec![0.0, 0.0]);
    assert!(oracle_do_curve(&spec, &[0.0], 0, 0).is_err());
}

#[test]
fn oracle_interpolation_is_linear_and_clamped() {
    let o = OracleCurve {
        x: vec![0.0, 1.0, 3.0],
        mean: vec![0.0, 2.0, 6.0],
        se: vec![0.0; 3],
    };
    assert_eq!(o.interpolate(0.5), 1.0);
    assert_eq!(o.interpolate(2.0), 4.0);
    assert_eq!(o.interpolate(-5.0), 0.0);
    assert_eq!(o.interpolate(9.0), 6.0);
}

#[test]
fn specs_round_trip_through_json() {
    for name in EXAMPLE_NAMES {
        let ex = builtin_example(name).unwrap();
        assert_eq!(ScmSpec::from_json(&ex.scm.to_json()).unwrap(), ex.scm);
        let sel = serde_json::to_string(&ex.selection).unwrap();
        assert_eq!(serde_json::from_str::<SelectionSpec>(&sel).unwrap(), ex.selection);
    }
    assert!(matches!(ScmSpec::from_json("{"), Err(Error::Parse(_))));
}

#[test]
fn specs_reject_forward_references() {
    let spec = ScmSpec {
        variables: vec![
            Assignment::structural("Y", vec![Term::var(1.0, "X")], 1.0),
            Assignment::exogenous("X", 0.0, 1.0),
        ],
        treatment: "X".into(),
        target: "Y".into(),
        zplus: vec![],
        zminus: vec![],
    };
    assert!(matches!(spec.validate(), Err(Error::InvalidScm(_))));
}
