//! Causal DAGs, d-separation and the graphical recoverability criteria.

mod criteria;
mod dag;
mod dsep;
mod fixtures;

pub use criteria::{
    check_assumption_new, check_do_calculus_rule, check_gact3, check_pmar,
    check_selection_backdoor, decompose_proxies, proper_backdoor_graph, proper_causal_nodes,
    tsr_case, Criterion, CriterionReport, DoRule, Failure, TsrCase, Witness,
};
pub use dag::{CausalDag, DagFile, Node, NodeId, NodeSet, Roles, RolesFile, Scopes, ScopesFile};
pub use fixtures::{fixture, FIXTURES};
pub use dsep::{ancestors, d_separated, descendants, mutilate, open_path};
