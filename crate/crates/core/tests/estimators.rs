use proxicause::estimators::*;
use proxicause::graph::TsrCase;
use proxicause::linear_models::{expand_features, fit_ols, FeatureMap, FittedLinearModel};
use proxicause::scm::{builtin_example, make_paired, BuiltinExample, PairedSample, SampleMode};
use proxicause::seed;
use proxicause::{stats, Error};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

fn lin(cols: &[usize]) -> FeatureMap {
    FeatureMap::polynomial(cols, 1).unwrap()
}

fn paired(ex: &BuiltinExample, n: usize, s: u64) -> PairedSample {
    make_paired(&ex.scm, &ex.selection, n, SampleMode::Disjoint, s).unwrap()
}

#[test]
fn closed_form_arithmetic() {
    let one = FittedLinearModel::from_coefficients(lin(&[0, 1]), vec![1.0, 2.0, 3.0]).unwrap();
    let two = FittedLinearModel::from_coefficients(lin(&[0]), vec![4.0, 5.0]).unwrap();
    assert_eq!(rr_closed_form(&one, &two, 0.0).unwrap(), 13.0);

    let one = FittedLinearModel::from_coefficients(lin(&[0, 1]), vec![0.0, 1.0, 1.0]).unwrap();
    let two = FittedLinearModel::from_coefficients(lin(&[0]), vec![0.0, 0.0]).unwrap();
    for x in [-3.0, 0.0, 2.5] {
        assert_eq!(rr_closed_form(&one, &two, x).unwrap(), x);
    }

    let quad = FittedLinearModel::from_coefficients(FeatureMap::polynomial(&[0, 1], 2).unwrap(), vec![0.0; 6]).unwrap();
    assert!(rr_closed_form(&quad, &two, 0.0).is_err());
}

#[test]
fn pipeline_rr_matches_the_closed_form() {
    let ex = builtin_example("var-linear").unwrap();
    let cfg = StageConfig::ols(lin(&[0, 1]), lin(&[0]));
    let mut rng = seed::rng(99);
    for d in 0..50 {
        let p = paired(&ex, 400, d);
        let curve = fit_rr(&p.selected, &p.external, &cfg).unwrap();
        // alpha regresses the proxy on the treatment over the external data
        let x = p.external.values("X").unwrap();
        let z = p.external.values("Zplus").unwrap();
        let design = expand_features(&lin(&[0]), &DMatrix::from_column_slice(x.len(), 1, x))
            .unwrap()
            .with_response(DVector::from_column_slice(z))
            .unwrap();
        let alpha = fit_ols(&design, &lin(&[0])).unwrap();
        for _ in 0..10 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let want = rr_closed_form(curve.stage_one(), &alpha, x).unwrap();
            assert!((curve.at(x) - want).abs() < 1e-8);
        }
    }
}

#[test]
fn zplus_only_adds_the_external_proxy_mean() {
    let ex = builtin_example("var-linear").unwrap();
    let p = paired(&ex, 1000, 4);
    let curve = fit_tsr(&p.selected, &p.external, TsrCase::ZplusOnly, &StageConfig::ols(lin(&[0, 1]), lin(&[0]))).unwrap();
    let b = curve.stage_one().coefficients();
    let zbar = stats::mean(p.external.values("Zplus").unwrap());
    for x in [-2.0, 0.0, 1.3] {
        assert!((curve.at(x) - (b[0] + b[1] * x + b[2] * zbar)).abs() < 1e-10);
    }
}

#[test]
fn integral_equals_linear_shortcut_for_linear_stage_two() {
    let ex = builtin_example("motivating").unwrap();
    for s in 0..5 {
        let p = paired(&ex, 2000, s);
        let cfg = ex.tsr_config();
        let a = fit_tsr(&p.selected, &p.external, TsrCase::FullLinearShortcut, &cfg).unwrap();
        let b = fit_tsr(&p.selected, &p.external, TsrCase::FullIntegral, &cfg).unwrap();
        for x in [-4.0, -1.0, 0.0, 2.0, 5.0] {
            assert!((a.at(x) - b.at(x)).abs() < 1e-8, "{} vs {}", a.at(x), b.at(x));
        }
    }
}

#[test]
fn full_integral_averages_nonlinear_stage_two() {
    // stage two with a Z+^2 term: the integral uses the second moment of Z+
    let ex = builtin_example("motivating").unwrap();
    let p = paired(&ex, 3000, 8);
    let two = FeatureMap::additive(&[(0, 1), (1, 2)]).unwrap();
    let cfg = StageConfig::ols(ex.maps.outcome.clone(), two);
    let curve = fit_tsr(&p.selected, &p.external, TsrCase::FullIntegral, &cfg).unwrap();
    let b = curve.stage_one().coefficients();
    let g = curve.stage_two()[0].coefficients();
    let zp = p.external.values("Zplus").unwrap();
    let (m1, m2) = (stats::mean(zp), zp.iter().map(|z| z * z).sum::<f64>() / zp.len() as f64);
    // outcome map: {1, x, x^2, z+, z-}; stage two: {1, x, z+, z+^2}
    for x in [-2.0, 0.5, 3.0] {
        let ez = g[0] + g[1] * x + g[2] * m1 + g[3] * m2;
        let want = b[0] + b[1] * x + b[2] * x * x + b[3] * m1 + b[4] * ez;
        assert!((curve.at(x) - want).abs() < 1e-9);
    }
    let short = fit_tsr(&p.selected, &p.external, TsrCase::FullLinearShortcut, &cfg);
    assert!(matches!(short, Err(Error::CaseMismatch(_))));
}

#[test]
fn ridge_at_zero_penalty_is_ols() {
    let ex = builtin_example("ex1").unwrap();
    let p = paired(&ex, 1000, 2);
    let ols = fit_tsr(&p.selected, &p.external, ex.case, &ex.tsr_config()).unwrap();
    let mut cfg = ex.tsr_config().with_ridge(true, true);
    cfg.cv_grid = vec![0.0];
    let ridge = fit_tsr(&p.selected, &p.external, ex.case, &cfg).unwrap();
    for x in [-8.0, -4.0, 0.0] {
        assert!((ols.at(x) - ridge.at(x)).abs() < 1e-8);
    }
}

fn unselected(n: usize, s: u64) -> (LabeledDataset, LabeledDataset) {
    let mut rng = seed::rng(s);
    let x: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let y: Vec<f64> = x.iter().map(|x| 3.0 * x + rng.sample::<f64, _>(StandardNormal)).collect();
    let sel = LabeledDataset::from_parts(Provenance::Selected, vec![("X", Role::X, x.clone()), ("Y", Role::Y, y)]).unwrap();
    let ext = LabeledDataset::from_parts(Provenance::External, vec![("X", Role::X, x)]).unwrap();
    (sel, ext)
}

#[test]
fn naive_recovers_an_unconfounded_slope() {
    let (s, _) = unselected(5000, 1);
    let curve = fit_naive(&s, &lin(&[0])).unwrap();
    let slope = curve.at(1.0) - curve.at(0.0);
    assert!((slope - 3.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn tsr_without_proxies_is_the_naive_curve() {
    let (s, d) = unselected(500, 2);
    let map = FeatureMap::polynomial(&[0], 2).unwrap();
    let naive = fit_naive(&s, &map).unwrap();
    let tsr = fit_tsr(&s, &d, TsrCase::NoProxies, &StageConfig::ols(map.clone(), map)).unwrap();
    for x in [-2.0, 0.0, 0.7, 3.0] {
        assert!((naive.at(x) - tsr.at(x)).abs() < 1e-12);
    }
}

#[test]
fn rr_recovers_the_observational_regression() {
    let ex = builtin_example("ex1").unwrap();
    let p = paired(&ex, 5000, 3);
    let test = paired(&ex, 5000, 1003);
    let curve = fit_rr(&p.selected, &p.external, &ex.rr_config()).unwrap();
    let xs = test.external.values("X").unwrap();
    let obs = evaluate_mse(&curve, xs, ex.truths.cond_expectation.unwrap()).unwrap();
    let causal = evaluate_mse(&curve, xs, ex.truths.causal_effect.unwrap()).unwrap();
    assert!(obs < 0.1, "observational mse {obs}");
    assert!(causal > 15.0 && causal < 25.0, "causal mse {causal}");
}

#[test]
fn zminus_case_recovers_the_mediated_effect() {
    let ex = builtin_example("ex5").unwrap();
    let p = paired(&ex, 20_000, 6);
    let curve = fit_tsr(&p.selected, &p.external, ex.case, &ex.tsr_config()).unwrap();
    let f = ex.truths.causal_effect.unwrap();
    // the selected rows concentrate near x = 0
    for x in [-2.0, -1.0, 0.0, 1.0] {
        assert!((curve.at(x) - f(x)).abs() < 0.2, "at {x}: {} vs {}", curve.at(x), f(x));
    }
}

#[test]
fn rr_and_tsr_converge_without_confounding() {
    let ex = builtin_example("var-linear").unwrap();
    let gap = |n: usize| {
        let mut g = 0.0;
        for s in 0..20 {
            let p = paired(&ex, n, 500 + s);
            let rr = fit_rr(&p.selected, &p.external, &ex.rr_config()).unwrap();
            let tsr = fit_tsr(&p.selected, &p.external, ex.case, &ex.tsr_config()).unwrap();
            g += [-1.5, 0.0, 1.5].iter().map(|&x| (rr.at(x) - tsr.at(x)).abs()).sum::<f64>();
        }
        g
    };
    assert!(gap(5000) < 0.5 * gap(500));
}

#[test]
fn mse_of_trivial_curves() {
    let (s, _) = unselected(200, 3);
    let curve = fit_naive(&s, &lin(&[0])).unwrap();
    let pts = [-1.0, 0.0, 2.0];
    assert!(evaluate_mse(&curve, &pts, |x| curve.at(x)).unwrap().abs() < 1e-24);
    assert!((evaluate_mse(&curve, &pts, |x| curve.at(x) + 1.0).unwrap() - 1.0).abs() < 1e-12);
    assert!(evaluate_mse(&curve, &[], |x| x).is_err());
}

#[test]
fn naive_on_the_quadratic_study_matches_the_reported_error() {
    let ex = builtin_example("var-quadratic").unwrap();
    let mut m = Vec::new();
    for s in 0..20 {
        let p = paired(&ex, 500, s);
        let t = paired(&ex, 500, 100 + s);
        let c = fit_naive(&p.selected, &ex.maps.treatment).unwrap();
        m.push(evaluate_mse(&c, t.selected.values("X").unwrap(), ex.truths.causal_effect.unwrap()).unwrap());
    }
    let mean = stats::mean(&m);
    assert!(mean > 12.53 / 2.0 && mean < 12.53 * 2.0, "mean {mean}");
}

#[test]
fn case_and_provenance_mismatches_are_rejected() {
    let ex = builtin_example("ex5").unwrap();
    let p = paired(&ex, 500, 1);
    let cfg = ex.tsr_config();
    assert!(matches!(
        fit_tsr(&p.selected, &p.external, TsrCase::ZplusOnly, &cfg),
        Err(Error::CaseMismatch(_))
    ));
    assert!(fit_tsr(&p.external, &p.selected, ex.case, &cfg).is_err());
    assert!(fit_rr(&p.selected, &p.selected, &ex.rr_config()).is_err());
}

#[test]
fn datasets_validate_their_columns() {
    let ok = LabeledDataset::from_parts(Provenance::External, vec![("X", Role::X, vec![1.0, 2.0])]);
    assert!(ok.is_ok());
    let ragged = LabeledDataset::from_parts(
        Provenance::Selected,
        vec![("X", Role::X, vec![1.0, 2.0]), ("Y", Role::Y, vec![1.0])],
    );
    assert!(ragged.is_err());
    let nan = LabeledDataset::from_parts(
        Provenance::Selected,
        vec![("X", Role::X, vec![f64::NAN]), ("Y", Role::Y, vec![1.0])],
    );
    assert!(nan.is_err());
    let ext_y = LabeledDataset::from_parts(Provenance::External, vec![("Y", Role::Y, vec![1.0])]);
    assert!(ext_y.is_err());
}
