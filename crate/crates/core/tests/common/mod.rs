use std::collections::BTreeSet;

/// Textbook definition: some simple path in the skeleton has every collider
/// in `c` or with a descendant in `c`, and no other node in `c`.
pub fn brute_connected(n: usize, edges: &[(usize, usize)], a: &[usize], b: &[usize], c: &[usize]) -> bool {
    let has = |x: usize, y: usize| edges.contains(&(x, y));
    let mut desc_or_self = vec![BTreeSet::new(); n];
    for v in (0..n).rev() {
        desc_or_self[v].insert(v);
        for w in v + 1..n {
            if has(v, w) {
                let d = desc_or_self[w].clone();
                desc_or_self[v].extend(d);
            }
        }
    }
    let open = |path: &[usize]| {
        path.windows(3).all(|w| {
            let collider = has(w[0], w[1]) && has(w[2], w[1]);
            if collider {
                desc_or_self[w[1]].iter().any(|d| c.contains(d))
            } else {
                !c.contains(&w[1])
            }
        })
    };
    fn walk(
        path: &mut Vec<usize>,
        n: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        b: &[usize],
        open: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        let v = *path.last().unwrap();
        if path.len() > 1 && b.contains(&v) {
            return open(path);
        }
        for w in 0..n {
            if adj(v, w) && !path.contains(&w) {
                path.push(w);
                if walk(path, n, adj, b, open) {
                    return true;
                }
                path.pop();
            }
        }
        false
    }
    let adj = |x: usize, y: usize| has(x, y) || has(y, x);
    a.iter().any(|&s| walk(&mut vec![s], n, &adj, b, &open))
}
