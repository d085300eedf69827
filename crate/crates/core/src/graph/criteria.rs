use std::fmt;

use serde::{Deserialize, Serialize};

use super::dag::{CausalDag, NodeId, NodeSet, Roles};
use super::dsep::{ancestors, d_separated, descendants, find_open_path, mutilate, open_path};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "PMAR")]
    Pmar,
    #[serde(rename = "Assumption-2")]
    AssumptionNew,
    #[serde(rename = "Selection-Backdoor")]
    SelectionBackdoor,
    #[serde(rename = "GACT3")]
    Gact3,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::Pmar => "PMAR",
            Criterion::AssumptionNew => "Assumption-2",
            Criterion::SelectionBackdoor => "Selection-Backdoor",
            Criterion::Gact3 => "GACT3",
        })
    }
}

/// Why a condition failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// An unblocked path, rendered with arrows.
    Path(String),
    /// `node` is missing from dataset scope `scope` (`M` or `T`).
    MissingScope { node: String, scope: char },
    /// A proxy that may not be a descendant of the named causal-path node.
    ForbiddenDescendant { node: String, of: String },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::Path(p) => write!(f, "open path {p}"),
            Witness::MissingScope { node, scope } => write!(f, "{node} not in {scope}"),
            Witness::ForbiddenDescendant { node, of } => {
                write!(f, "{node} is a descendant of causal-path node {of}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub condition: u8,
    pub label: String,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub holds: bool,
    pub failures: Vec<Failure>,
}

impl CriterionReport {
    fn new(criterion: Criterion, failures: Vec<Failure>) -> Self {
        CriterionReport {
            criterion,
            holds: failures.is_empty(),
            failures,
        }
    }

    /// Condition numbers that failed, deduplicated and sorted.
    pub fn failed_conditions(&self) -> Vec<u8> {
        let mut c: Vec<u8> = self.failures.iter().map(|f| f.condition).collect();
        c.dedup();
        c
    }
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.criterion, if self.holds { "HOLDS" } else { "FAILS" })?;
        for fail in &self.failures {
            write!(f, "\n  condition {} ({}): {}", fail.condition, fail.label, fail.witness)?;
        }
        Ok(())
    }
}

/// Estimator form implied by the graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TsrCase {
    #[serde(rename = "NoProxies")]
    NoProxies,
    #[serde(rename = "ZminusOnly-Unconfounded")]
    ZminusOnlyUnconfounded,
    #[serde(rename = "ZplusOnly")]
    ZplusOnly,
    #[serde(rename = "Full-LinearShortcut")]
    FullLinearShortcut,
    #[serde(rename = "Full-Integral")]
    FullIntegral,
}

impl TsrCase {
    pub const ALL: [TsrCase; 5] = [
        TsrCase::NoProxies,
        TsrCase::ZminusOnlyUnconfounded,
        TsrCase::ZplusOnly,
        TsrCase::FullLinearShortcut,
        TsrCase::FullIntegral,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TsrCase::NoProxies => "NoProxies",
            TsrCase::ZminusOnlyUnconfounded => "ZminusOnly-Unconfounded",
            TsrCase::ZplusOnly => "ZplusOnly",
            TsrCase::FullLinearShortcut => "Full-LinearShortcut",
            TsrCase::FullIntegral => "Full-Integral",
        }
    }

    pub fn uses_zplus(self) -> bool {
        !matches!(self, TsrCase::NoProxies | TsrCase::ZminusOnlyUnconfounded)
    }

    pub fn uses_zminus(self) -> bool {
        matches!(
            self,
            TsrCase::ZminusOnlyUnconfounded | TsrCase::FullLinearShortcut | TsrCase::FullIntegral
        )
    }
}

impl fmt::Display for TsrCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for TsrCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TsrCase::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown TSR case '{s}'")))
    }
}

fn roles(dag: &CausalDag) -> Result<&Roles> {
    dag.roles().ok_or(Error::RolesUnset("x, y and z"))
}

fn selection(dag: &CausalDag) -> Result<NodeId> {
    dag.selection_node().ok_or(Error::NoSelectionNode)
}

/// Splits Z into non-descendants (`Z+`) and descendants (`Z-`) of X.
pub fn decompose_proxies(dag: &CausalDag) -> Result<(NodeSet, NodeSet)> {
    let r = roles(dag)?;
    let de = descendants(dag, &r.x)?;
    let (minus, plus): (NodeSet, NodeSet) = r.z.iter().partition(|v| de.contains(v));
    Ok((plus, minus))
}

fn union(a: &NodeSet, b: &NodeSet) -> NodeSet {
    a.union(b).copied().collect()
}

fn single(v: NodeId) -> NodeSet {
    [v].into()
}

/// Checks `a ⫫ b | c` and turns an open path into a failure.
fn separation(
    g: &CausalDag,
    a: &NodeSet,
    b: &NodeSet,
    c: &NodeSet,
    condition: u8,
    label: &str,
) -> Result<Option<Failure>> {
    if d_separated(g, a, b, c)? {
        return Ok(None);
    }
    let path = open_path(g, a, b, c)?.expect("d-connected sets have an open path");
    Ok(Some(Failure {
        condition,
        label: label.to_string(),
        witness: Witness::Path(g.render_path(&path)),
    }))
}

fn scope_failures(
    dag: &CausalDag,
    nodes: &NodeSet,
    scope: char,
    condition: u8,
    label: &str,
) -> Vec<Failure> {
    let set = if scope == 'M' { &dag.scopes().m } else { &dag.scopes().t };
    nodes
        .iter()
        .filter(|v| !set.contains(v))
        .map(|&v| Failure {
            condition,
            label: label.to_string(),
            witness: Witness::MissingScope {
                node: dag.name(v).to_string(),
                scope,
            },
        })
        .collect()
}

const PMAR_LABEL: &str = "X and Z block all paths between S and Y";
const SCOPE_LABEL: &str = "dataset scopes";

fn pmar_failure(dag: &CausalDag) -> Result<Option<Failure>> {
    let r = roles(dag)?;
    let s = selection(dag)?;
    separation(dag, &single(s), &single(r.y), &union(&r.x, &r.z), 1, PMAR_LABEL)
}

/// `S ⫫ Y | X ∪ Z`.
pub fn check_pmar(dag: &CausalDag) -> Result<CriterionReport> {
    let failures = pmar_failure(dag)?.into_iter().collect();
    Ok(CriterionReport::new(Criterion::Pmar, failures))
}

/// PMAR, backdoor blocking by `Z+`, and the scope requirements.
pub fn check_assumption_new(dag: &CausalDag) -> Result<CriterionReport> {
    let r = roles(dag)?;
    let (zplus, zminus) = decompose_proxies(dag)?;
    let mut failures: Vec<Failure> = pmar_failure(dag)?.into_iter().collect();

    let g_under_x = mutilate(dag, &NodeSet::new(), &r.x)?;
    failures.extend(separation(
        &g_under_x,
        &single(r.y),
        &r.x,
        &zplus,
        2,
        "Z+ blocks all backdoor paths between X and Y",
    )?);

    let mut in_m = union(&r.z, &r.x);
    in_m.insert(r.y);
    failures.extend(scope_failures(dag, &in_m, 'M', 3, SCOPE_LABEL));
    let mut in_t = r.z.clone();
    if !zminus.is_empty() {
        in_t.extend(&r.x);
    }
    failures.extend(scope_failures(dag, &in_t, 'T', 3, SCOPE_LABEL));
    Ok(CriterionReport::new(Criterion::AssumptionNew, failures))
}

/// The selection-backdoor criterion: PMAR, backdoor blocking by `Z+`,
/// `Z- ⫫ Y | X ∪ Z+`, and scopes.
pub fn check_selection_backdoor(dag: &CausalDag) -> Result<CriterionReport> {
    let r = roles(dag)?;
    let (zplus, zminus) = decompose_proxies(dag)?;
    let mut failures: Vec<Failure> = pmar_failure(dag)?.into_iter().collect();

    let g_under_x = mutilate(dag, &NodeSet::new(), &r.x)?;
    failures.extend(separation(
        &g_under_x,
        &single(r.y),
        &r.x,
        &zplus,
        2,
        "Z+ blocks all backdoor paths between X and Y",
    )?);
    failures.extend(separation(
        dag,
        &zminus,
        &single(r.y),
        &union(&r.x, &zplus),
        3,
        "X and Z+ block all paths between Z- and Y",
    )?);

    let mut in_m = union(&r.z, &r.x);
    in_m.insert(r.y);
    failures.extend(scope_failures(dag, &in_m, 'M', 4, SCOPE_LABEL));
    failures.extend(scope_failures(dag, &r.z, 'T', 4, SCOPE_LABEL));
    Ok(CriterionReport::new(Criterion::SelectionBackdoor, failures))
}

/// Nodes outside X lying on a proper causal path from X to Y (Y included
/// when reachable).
pub fn proper_causal_nodes(dag: &CausalDag) -> Result<NodeSet> {
    let r = roles(dag)?;
    // forward from X without re-entering X
    let mut fwd = NodeSet::new();
    let mut stack: Vec<NodeId> = r.x.iter().copied().collect();
    while let Some(v) = stack.pop() {
        for &c in dag.children(v) {
            if !r.x.contains(&c) && fwd.insert(c) {
                stack.push(c);
            }
        }
    }
    // backward from Y without passing through X
    let mut bwd: NodeSet = single(r.y);
    let mut stack = vec![r.y];
    while let Some(v) = stack.pop() {
        for &p in dag.parents(v) {
            if !r.x.contains(&p) && bwd.insert(p) {
                stack.push(p);
            }
        }
    }
    Ok(fwd.intersection(&bwd).copied().collect())
}

/// The graph with the first edge of every proper causal path removed.
pub fn proper_backdoor_graph(dag: &CausalDag) -> Result<CausalDag> {
    let r = roles(dag)?;
    let cn = proper_causal_nodes(dag)?;
    Ok(dag.without_edges(|a, b| r.x.contains(&a) && cn.contains(&b)))
}

fn is_directed(dag: &CausalDag, path: &[NodeId]) -> bool {
    path.windows(2).all(|w| dag.has_edge(w[0], w[1]))
}

/// The adjustment criterion for combined selection-biased and external data,
/// with `zt` the proxies observed externally.
pub fn check_gact3(dag: &CausalDag, zt: &NodeSet) -> Result<CriterionReport> {
    let r = roles(dag)?;
    let s = selection(dag)?;
    if let Some(v) = zt.iter().find(|v| !r.z.contains(v)) {
        return Err(Error::InvalidArgument(format!(
            "ZT node '{}' is not a proxy",
            dag.name(*v)
        )));
    }
    let mut failures = Vec::new();

    // 1. no proxy is a descendant (in G with edges into X removed) of a
    //    causal-path node
    let g_over_x = mutilate(dag, &r.x, &NodeSet::new())?;
    for w in proper_causal_nodes(dag)? {
        let de = descendants(&g_over_x, &single(w))?;
        for &z in r.z.intersection(&de) {
            failures.push(Failure {
                condition: 1,
                label: "no proxy descends from a proper causal path".into(),
                witness: Witness::ForbiddenDescendant {
                    node: dag.name(z).to_string(),
                    of: dag.name(w).to_string(),
                },
            });
        }
    }

    // 2. every non-causal proper path from X to Y is blocked by Z and S
    let mut cond = r.z.clone();
    cond.insert(s);
    if let Some(v) = cond.iter().find(|&&v| v == r.y || r.x.contains(&v)) {
        return Err(Error::OverlappingSets(dag.name(*v).to_string()));
    }
    let non_causal = |p: &[NodeId]| !is_directed(dag, p);
    if let Some(path) = find_open_path(dag, &r.x, &single(r.y), &cond, &r.x, &non_causal) {
        failures.push(Failure {
            condition: 2,
            label: "Z and S block all non-causal paths from X to Y".into(),
            witness: Witness::Path(dag.render_path(&path)),
        });
    }

    // 3. ZT separates Y from S in the proper backdoor graph
    let pbd = proper_backdoor_graph(dag)?;
    failures.extend(separation(
        &pbd,
        &single(r.y),
        &single(s),
        zt,
        3,
        "ZT separates Y from S in the proper backdoor graph",
    )?);
    Ok(CriterionReport::new(Criterion::Gact3, failures))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DoRule {
    /// Insertion or deletion of observations.
    One,
    /// Action / observation exchange.
    Two,
    /// Insertion or deletion of actions.
    Three,
}

impl TryFrom<u8> for DoRule {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(DoRule::One),
            2 => Ok(DoRule::Two),
            3 => Ok(DoRule::Three),
            other => Err(Error::InvalidArgument(format!("do-calculus rule {other} (expected 1-3)"))),
        }
    }
}

/// Side condition of a do-calculus rule for `P(y | do(x), z, w)`: `z` is
/// the set being inserted, deleted or exchanged.
pub fn check_do_calculus_rule(
    dag: &CausalDag,
    rule: DoRule,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
    w: &NodeSet,
) -> Result<bool> {
    let sets = [x, y, z, w];
    for (i, a) in sets.iter().enumerate() {
        dag.check_ids(a)?;
        for b in &sets[i + 1..] {
            if let Some(v) = a.intersection(b).next() {
                return Err(Error::OverlappingSets(dag.name(*v).to_string()));
            }
        }
    }
    let none = NodeSet::new();
    let xw = union(x, w);
    match rule {
        DoRule::One => d_separated(&mutilate(dag, x, &none)?, y, z, &xw),
        DoRule::Two => d_separated(&mutilate(dag, x, z)?, y, z, &xw),
        DoRule::Three => {
            let g_over_x = mutilate(dag, x, &none)?;
            let anc_w = ancestors(&g_over_x, w)?;
            let z_w: NodeSet = z.iter().filter(|v| !anc_w.contains(v)).copied().collect();
            d_separated(&mutilate(dag, &union(x, &z_w), &none)?, y, z, &xw)
        }
    }
}

/// Chooses the estimator form for a graph satisfying the main assumption.
///
/// `Z-` is treated as unconfounded with X when X and `Z-` are separated in
/// the graph without X's outgoing edges, both marginally and given `Z+`.
pub fn tsr_case(dag: &CausalDag, linear_stage_two: bool) -> Result<TsrCase> {
    let report = check_assumption_new(dag)?;
    if !report.holds {
        return Err(Error::AssumptionViolated(report.to_string()));
    }
    let r = roles(dag)?;
    let (zplus, zminus) = decompose_proxies(dag)?;
    if r.z.is_empty() {
        return Ok(TsrCase::NoProxies);
    }
    if zminus.is_empty() {
        return Ok(TsrCase::ZplusOnly);
    }
    let g_under_x = mutilate(dag, &NodeSet::new(), &r.x)?;
    let unconfounded = d_separated(&g_under_x, &r.x, &zminus, &NodeSet::new())?
        && d_separated(&g_under_x, &r.x, &zminus, &zplus)?;
    if unconfounded {
        return Ok(TsrCase::ZminusOnlyUnconfounded);
    }
    Ok(if linear_stage_two {
        TsrCase::FullLinearShortcut
    } else {
        TsrCase::FullIntegral
    })
}
