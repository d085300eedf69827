use super::sample::sample;
use super::spec::{Assignment, Comparator, Condition, ScmSpec, SelectionSpec, Term};
use crate::error::{Error, Result};
use crate::estimators::StageConfig;
use crate::graph::{fixture, CausalDag, TsrCase};
use crate::linear_models::FeatureMap;
use crate::stats;

/// Every builtin data-generating process, in listing order.
pub const EXAMPLE_NAMES: [&str; 9] = [
    "var-linear",
    "var-quadratic",
    "ex1",
    "ex2",
    "ex3",
    "ex4",
    "ex5",
    "ex6",
    "motivating",
];

/// Closed-form reference curves, where known.
#[derive(Debug, Clone, Copy, Default)]
pub struct TruthFunctions {
    pub cond_expectation: Option<fn(f64) -> f64>,
    pub causal_effect: Option<fn(f64) -> f64>,
}

/// Feature maps used in the experiments for one example.
///
/// `outcome` indexes `[X, Z+.., Z-..]`, `treatment` indexes `[X]` and
/// `proxy` indexes `[X, Z+..]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecommendedMaps {
    pub outcome: FeatureMap,
    pub treatment: FeatureMap,
    pub proxy: FeatureMap,
}

#[derive(Debug, Clone)]
pub struct BuiltinExample {
    pub name: &'static str,
    pub description: &'static str,
    pub scm: ScmSpec,
    pub selection: SelectionSpec,
    pub truths: TruthFunctions,
    pub maps: RecommendedMaps,
    pub case: TsrCase,
    pub dag: CausalDag,
}

impl BuiltinExample {
    /// Stage configuration for the two-step estimator.
    pub fn tsr_config(&self) -> StageConfig {
        StageConfig::ols(self.maps.outcome.clone(), self.maps.proxy.clone())
    }

    /// Stage configuration for repeated regression.
    pub fn rr_config(&self) -> StageConfig {
        StageConfig::ols(self.maps.outcome.clone(), self.maps.treatment.clone())
    }

    /// 101 equally spaced points over the central 99% of the population
    /// distribution of the treatment, from a fixed-seed pilot sample.
    pub fn x_grid(&self) -> Result<Vec<f64>> {
        self.x_grid_with(101)
    }

    pub fn x_grid_with(&self, points: usize) -> Result<Vec<f64>> {
        if points < 2 {
            return Err(Error::InvalidArgument("grid needs at least 2 points".into()));
        }
        let pilot = sample(&self.scm, 200_000, PILOT_SEED)?;
        let mut x = pilot.column(&self.scm.treatment)?.to_vec();
        x.sort_by(f64::total_cmp);
        let lo = stats::quantile_sorted(&x, 0.005);
        let hi = stats::quantile_sorted(&x, 0.995);
        Ok(linspace(lo, hi, points))
    }

    /// The designated ground truth is available in closed form.
    pub fn has_analytic_truth(&self) -> bool {
        self.truths.causal_effect.is_some()
    }
}

const PILOT_SEED: u64 = 0x05EE_D0F6_121D;

pub fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| lo + step * i as f64).collect()
}

fn additive(x_degree: u32, proxies: usize) -> FeatureMap {
    let mut d = vec![(0, x_degree)];
    d.extend((1..=proxies).map(|c| (c, 1)));
    FeatureMap::additive(&d).expect("valid additive map")
}

fn maps(x_degree: u32, proxies: usize, proxy_inputs: usize) -> RecommendedMaps {
    RecommendedMaps {
        outcome: additive(x_degree, proxies),
        treatment: additive(x_degree, 0),
        proxy: FeatureMap::polynomial(&(0..proxy_inputs).collect::<Vec<_>>(), 1)
            .expect("valid proxy map"),
    }
}

fn spec(variables: Vec<Assignment>, zplus: &[&str], zminus: &[&str]) -> ScmSpec {
    ScmSpec {
        variables,
        treatment: "X".into(),
        target: "Y".into(),
        zplus: zplus.iter().map(|s| s.to_string()).collect(),
        zminus: zminus.iter().map(|s| s.to_string()).collect(),
    }
}

use Assignment as A;

fn var_study(quadratic: bool) -> (ScmSpec, SelectionSpec) {
    let y = if quadratic {
        vec![Term::pow(3.0, "X", 2), Term::var(5.0, "Zplus")]
    } else {
        vec![Term::var(3.0, "X"), Term::var(5.0, "Zplus")]
    };
    (
        spec(
            vec![
                A::exogenous("X", 0.0, 1.0),
                A::exogenous("Zplus", -2.0, 1.0),
                A::structural("Y", y, 1.0),
            ],
            &["Zplus"],
            &[],
        ),
        SelectionSpec::threshold(vec![Condition::new(
            vec![Term::var(1.0, "X"), Term::var(1.0, "Zplus")],
            Comparator::Less,
            -2.0,
        )]),
    )
}

/// Looks up a builtin example by name.
pub fn builtin_example(name: &str) -> Result<BuiltinExample> {
    let (description, scm, selection, truths, maps, case, graph): (
        &str,
        ScmSpec,
        SelectionSpec,
        TruthFunctions,
        RecommendedMaps,
        TsrCase,
        &str,
    ) = match name {
        "var-linear" | "var-quadratic" => {
            let quad = name == "var-quadratic";
            let (scm, sel) = var_study(quad);
            let f: fn(f64) -> f64 = if quad { |x| 3.0 * x * x - 10.0 } else { |x| 3.0 * x - 10.0 };
            (
                if quad {
                    "independent proxy, quadratic effect: Y = 3X^2 + 5Z+ + e"
                } else {
                    "independent proxy, linear effect: Y = 3X + 5Z+ + e"
                },
                scm,
                sel,
                TruthFunctions {
                    cond_expectation: Some(f),
                    causal_effect: Some(f),
                },
                maps(if quad { 2 } else { 1 }, 1, 1),
                TsrCase::ZplusOnly,
                "fig2a",
            )
        }
        "ex1" => (
            "confounder drives treatment and selection: X = 2Z+ + e, Y = 0.2X^2 + 5Z+ + e",
            spec(
                vec![
                    A::exogenous("Zplus", -2.0, 1.0),
                    A::structural("X", vec![Term::var(2.0, "Zplus")], 1.0),
                    A::structural("Y", vec![Term::pow(0.2, "X", 2), Term::var(5.0, "Zplus")], 1.0),
                ],
                &["Zplus"],
                &[],
            ),
            SelectionSpec::threshold(vec![Condition::new(
                vec![Term::var(1.0, "X"), Term::var(1.0, "Zplus")],
                Comparator::Less,
                -6.0,
            )]),
            TruthFunctions {
                cond_expectation: Some(|x| 0.2 * x * x - 2.0 + 2.0 * x),
                causal_effect: Some(|x| 0.2 * x * x - 10.0),
            },
            maps(2, 1, 1),
            TsrCase::ZplusOnly,
            "fig4a",
        ),
        "ex2" => (
            "confounder with logistic selection: X = Z+ + e, Y = X + 5Z+ + e",
            spec(
                vec![
                    A::exogenous("Zplus", -1.0, 2.0),
                    A::structural("X", vec![Term::var(1.0, "Zplus")], 1.0),
                    A::structural("Y", vec![Term::var(1.0, "X"), Term::var(5.0, "Zplus")], 1.0),
                ],
                &["Zplus"],
                &[],
            ),
            SelectionSpec::logistic(&[(1.0, "X"), (-1.0, "Zplus")]),
            TruthFunctions {
                cond_expectation: Some(|x| 5.0 * x - 1.0),
                causal_effect: Some(|x| x - 5.0),
            },
            maps(2, 1, 1),
            TsrCase::ZplusOnly,
            "fig4a",
        ),
        "ex3" | "ex4" => {
            let ex3 = name == "ex3";
            let mut vars = vec![
                A::exogenous("ZB", 2.0, 0.3),
                A::structural("X", vec![Term::var(1.0, "ZB")], 1.0),
                A::exogenous("ZA", if ex3 { -0.3 } else { 0.0 }, 1.0),
            ];
            let x_term = if ex3 { Term::pow(0.2, "X", 2) } else { Term::var(0.5, "X") };
            vars.push(A::structural(
                "Y",
                vec![x_term, Term::var(1.0, "ZA"), Term::var(3.0, "ZB")],
                1.0,
            ));
            let sel = if ex3 {
                SelectionSpec::threshold(vec![
                    Condition::new(vec![Term::var(1.0, "ZA")], Comparator::Greater, 0.0),
                    Condition::new(vec![Term::var(1.0, "X")], Comparator::Less, 9.0),
                ])
            } else {
                SelectionSpec::logistic(&[(-1.0, "X"), (-1.0, "ZA")])
            };
            let truths = if ex3 {
                TruthFunctions {
                    cond_expectation: Some(|x| 0.2 * x * x + 5.7 + 3.0 * (0.09 / 1.09) * (x - 2.0)),
                    causal_effect: Some(|x| 0.2 * x * x + 5.7),
                }
            } else {
                TruthFunctions {
                    cond_expectation: Some(|x| 0.5 * x + 6.0 + 3.0 * (0.09 / 1.09) * (x - 2.0)),
                    causal_effect: Some(|x| 0.5 * x + 6.0),
                }
            };
            (
                if ex3 {
                    "two non-descendant proxies, threshold selection: Y = 0.2X^2 + ZA + 3ZB + e"
                } else {
                    "two non-descendant proxies, logistic selection: Y = 0.5X + ZA + 3ZB + e"
                },
                spec(vars, &["ZA", "ZB"], &[]),
                sel,
                truths,
                maps(2, 2, 1),
                TsrCase::ZplusOnly,
                "fig4b",
            )
        }
        "ex5" | "ex6" => {
            let ex5 = name == "ex5";
            let vars = if ex5 {
                vec![
                    A::exogenous("Zplus", -1.0, 1.0),
                    A::structural("X", vec![Term::var(1.0, "Zplus")], 1.0),
                    A::structural("Zminus", vec![Term::var(-2.0, "X")], 1.0),
                    A::structural(
                        "Y",
                        vec![Term::pow(1.0, "X", 2), Term::var(1.0, "Zminus"), Term::var(2.0, "Zplus")],
                        1.0,
                    ),
                ]
            } else {
                vec![
                    A::exogenous("Zplus", 2.0, 1.0),
                    A::structural("X", vec![Term::var(1.0, "Zplus")], 1.0),
                    A::structural("Zminus", vec![Term::var(1.0, "X")], 1.0),
                    A::structural(
                        "Y",
                        vec![Term::var(0.1, "X"), Term::var(0.5, "Zminus"), Term::var(0.3, "Zplus")],
                        0.1,
                    ),
                ]
            };
            let sel = if ex5 {
                SelectionSpec::logistic(&[(-1.0, "X"), (-1.0, "Zminus")])
            } else {
                SelectionSpec::threshold(vec![
                    Condition::new(
                        vec![Term::product(1.0, &[("Zminus", 1), ("X", 1)])],
                        Comparator::Less,
                        1.0,
                    ),
                    Condition::new(
                        vec![
                            Term::product(1.0, &[("Zminus", 2), ("X", 2)]),
                            Term::var(1.0, "Zminus"),
                        ],
                        Comparator::Greater,
                        1.0,
                    ),
                ])
            };
            let truths = if ex5 {
                TruthFunctions {
                    cond_expectation: Some(|x| x * x - x - 1.0),
                    causal_effect: Some(|x| x * x - 2.0 * x - 2.0),
                }
            } else {
                TruthFunctions {
                    cond_expectation: Some(|x| 0.3 + 0.75 * x),
                    causal_effect: Some(|x| 0.6 * (x + 1.0)),
                }
            };
            (
                if ex5 {
                    "mediating proxy, logistic selection: Z- = -2X + e, Y = X^2 + Z- + 2Z+ + e"
                } else {
                    "mediating proxy, non-convex threshold selection: Y = (X + 5Z- + 3Z+ + e)/10"
                },
                spec(vars, &["Zplus"], &["Zminus"]),
                sel,
                truths,
                maps(2, 2, 1),
                TsrCase::ZminusOnlyUnconfounded,
                "fig4c",
            )
        }
        "motivating" => (
            "latent confounder shielded by Z+, mediator Z- drives selection",
            spec(
                vec![
                    A::exogenous("U", 0.0, 1.0),
                    A::structural("Zplus", vec![Term::var(2.0, "U")], 1.0),
                    A::structural("X", vec![Term::var(1.0, "Zplus")], 1.0),
                    A::structural("Zminus", vec![Term::var(1.0, "X"), Term::var(2.0, "U")], 2.0),
                    A::structural(
                        "Y",
                        vec![Term::pow(0.5, "X", 2), Term::var(2.0, "Zminus"), Term::var(2.0, "U")],
                        3.0,
                    ),
                ],
                &["Zplus"],
                &["Zminus"],
            ),
            SelectionSpec::threshold(vec![Condition::new(
                vec![Term::var(1.0, "X"), Term::var(1.0, "Zminus")],
                Comparator::Greater,
                5.0,
            )]),
            TruthFunctions::default(),
            maps(2, 2, 2),
            TsrCase::FullLinearShortcut,
            "fig2d",
        ),
        other => return Err(Error::UnknownExample(other.to_string())),
    };
    Ok(BuiltinExample {
        name: EXAMPLE_NAMES.iter().find(|&&n| n == name).copied().unwrap_or("custom"),
        description,
        scm,
        selection,
        truths,
        maps,
        case,
        dag: fixture(graph)?,
    })
}
