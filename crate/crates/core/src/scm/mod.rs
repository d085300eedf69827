//! Structural causal models: specification, sampling, selection, paired
//! datasets, the interventional oracle and the builtin examples.

mod registry;
mod sample;
mod spec;

pub use registry::{
    builtin_example, linspace, BuiltinExample, RecommendedMaps, TruthFunctions, EXAMPLE_NAMES,
};
pub use sample::{
    apply_selection, make_paired, oracle_do_curve, sample, OracleCurve, PairedSample, SampleMode,
    SampleTable,
};
pub use spec::{Assignment, Comparator, Condition, ScmSpec, SelectionSpec, Term};
