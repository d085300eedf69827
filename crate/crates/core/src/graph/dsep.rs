use std::collections::VecDeque;

use super::dag::{CausalDag, NodeId, NodeSet};
use crate::error::{Error, Result};

/// All nodes reachable from `seed` along directed edges, excluding `seed`.
pub fn descendants(dag: &CausalDag, seed: &NodeSet) -> Result<NodeSet> {
    dag.check_ids(seed)?;
    Ok(reach(dag, seed, |v| dag.children(v)))
}

/// All nodes with a directed path into `seed`, excluding `seed`.
pub fn ancestors(dag: &CausalDag, seed: &NodeSet) -> Result<NodeSet> {
    dag.check_ids(seed)?;
    Ok(reach(dag, seed, |v| dag.parents(v)))
}

fn reach<'a>(dag: &'a CausalDag, seed: &NodeSet, next: impl Fn(NodeId) -> &'a [NodeId]) -> NodeSet {
    let mut seen = vec![false; dag.len()];
    let mut stack: Vec<NodeId> = seed.iter().copied().collect();
    let mut out = NodeSet::new();
    while let Some(v) = stack.pop() {
        for &w in next(v) {
            if !seen[w.0] {
                seen[w.0] = true;
                out.insert(w);
                stack.push(w);
            }
        }
    }
    out.retain(|v| !seed.contains(v));
    out
}

/// Removes edges into `remove_into` and out of `remove_out_of`.
pub fn mutilate(dag: &CausalDag, remove_into: &NodeSet, remove_out_of: &NodeSet) -> Result<CausalDag> {
    dag.check_ids(remove_into)?;
    dag.check_ids(remove_out_of)?;
    Ok(dag.without_edges(|a, b| remove_into.contains(&b) || remove_out_of.contains(&a)))
}

fn check_disjoint(dag: &CausalDag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<()> {
    for s in [a, b, c] {
        dag.check_ids(s)?;
    }
    for (p, q) in [(a, b), (a, c), (b, c)] {
        if let Some(v) = p.intersection(q).next() {
            return Err(Error::OverlappingSets(dag.name(*v).to_string()));
        }
    }
    if let Some(v) = c.iter().find(|&&v| dag.is_latent(v)) {
        return Err(Error::LatentConditioning(dag.name(*v).to_string()));
    }
    Ok(())
}

/// `A ⫫ B | C` by reachability (Bayes ball).
pub fn d_separated(dag: &CausalDag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<bool> {
    check_disjoint(dag, a, b, c)?;
    if a.is_empty() || b.is_empty() {
        return Ok(true);
    }
    let reached = reachable(dag, a, c);
    Ok(!b.iter().any(|v| reached[v.0]))
}

/// Nodes d-connected to `a` given `c`.
fn reachable(dag: &CausalDag, a: &NodeSet, c: &NodeSet) -> Vec<bool> {
    let n = dag.len();
    let mut in_c = vec![false; n];
    for v in c {
        in_c[v.0] = true;
    }
    // C together with its ancestors: colliders here are open.
    let mut anc_c = in_c.clone();
    for v in reach(dag, c, |v| dag.parents(v)) {
        anc_c[v.0] = true;
    }

    // state: (node, arrived from a child = true / from a parent = false)
    let mut visited = vec![[false; 2]; n];
    let mut reached = vec![false; n];
    let mut queue: VecDeque<(NodeId, bool)> = a.iter().map(|&v| (v, true)).collect();
    while let Some((v, up)) = queue.pop_front() {
        if visited[v.0][up as usize] {
            continue;
        }
        visited[v.0][up as usize] = true;
        if !in_c[v.0] {
            reached[v.0] = true;
        }
        if up {
            if !in_c[v.0] {
                queue.extend(dag.parents(v).iter().map(|&p| (p, true)));
                queue.extend(dag.children(v).iter().map(|&ch| (ch, false)));
            }
        } else {
            if !in_c[v.0] {
                queue.extend(dag.children(v).iter().map(|&ch| (ch, false)));
            }
            if anc_c[v.0] {
                queue.extend(dag.parents(v).iter().map(|&p| (p, true)));
            }
        }
    }
    reached
}

/// Whether the interior node `path[i]` blocks the path. `opened[v]` is set
/// when `v` or one of its descendants is conditioned on.
fn blocks(dag: &CausalDag, path: &[NodeId], i: usize, in_c: &[bool], opened: &[bool]) -> bool {
    let (prev, mid, next) = (path[i - 1], path[i], path[i + 1]);
    let collider = dag.has_edge(prev, mid) && dag.has_edge(next, mid);
    if collider {
        !opened[mid.0]
    } else {
        in_c[mid.0]
    }
}

/// Conditioning membership and "collider opened" flags for `c`.
fn blocking_tables(dag: &CausalDag, c: &NodeSet) -> (Vec<bool>, Vec<bool>) {
    let n = dag.len();
    let mut in_c = vec![false; n];
    for v in c {
        in_c[v.0] = true;
    }
    let mut opened = in_c.clone();
    for v in reach(dag, c, |v| dag.parents(v)) {
        opened[v.0] = true;
    }
    (in_c, opened)
}

/// Enumerates simple paths from `from` to any node of `to` whose interior
/// avoids `avoid`, and returns the first one that is open given `c` and
/// accepted by `keep`. Pruning stops at blocked prefixes.
pub(crate) fn find_open_path(
    dag: &CausalDag,
    from: &NodeSet,
    to: &NodeSet,
    c: &NodeSet,
    avoid: &NodeSet,
    keep: &dyn Fn(&[NodeId]) -> bool,
) -> Option<Vec<NodeId>> {
    let (in_c, opened) = blocking_tables(dag, c);
    let mut on_path = vec![false; dag.len()];
    for &s in from {
        let mut path = vec![s];
        on_path[s.0] = true;
        if let Some(p) = dfs(dag, &mut path, &mut on_path, to, avoid, &in_c, &opened, keep) {
            return Some(p);
        }
        on_path[s.0] = false;
    }
    None
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    dag: &CausalDag,
    path: &mut Vec<NodeId>,
    on_path: &mut [bool],
    to: &NodeSet,
    avoid: &NodeSet,
    in_c: &[bool],
    opened: &[bool],
    keep: &dyn Fn(&[NodeId]) -> bool,
) -> Option<Vec<NodeId>> {
    let v = *path.last().unwrap();
    let neighbours: Vec<NodeId> = dag
        .children(v)
        .iter()
        .chain(dag.parents(v))
        .copied()
        .collect();
    for w in neighbours {
        if on_path[w.0] {
            continue;
        }
        path.push(w);
        let len = path.len();
        // the node before w is now interior
        let prefix_open = len < 3 || !blocks(dag, path, len - 2, in_c, opened);
        if prefix_open {
            if to.contains(&w) {
                if keep(path) {
                    return Some(path.clone());
                }
            } else if !avoid.contains(&w) {
                on_path[w.0] = true;
                let found = dfs(dag, path, on_path, to, avoid, in_c, opened, keep);
                on_path[w.0] = false;
                if found.is_some() {
                    return found;
                }
            }
        }
        path.pop();
    }
    None
}

/// An open path between `a` and `b` given `c`, if one exists.
pub fn open_path(dag: &CausalDag, a: &NodeSet, b: &NodeSet, c: &NodeSet) -> Result<Option<Vec<NodeId>>> {
    check_disjoint(dag, a, b, c)?;
    Ok(find_open_path(dag, a, b, c, &NodeSet::new(), &|_| true))
}
