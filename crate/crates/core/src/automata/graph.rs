//! Strongly connected components and accepting lassos of explicit graphs.

use std::collections::VecDeque;

/// Tarjan's algorithm without recursion. Returns the component id of every
/// node; ids are assigned in reverse topological order.
pub(crate) fn sccs(succ: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = succ.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut counter = 0;
    let mut comps = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&(v, next)) = call.last() {
            if next == 0 {
                index[v] = counter;
                low[v] = counter;
                counter += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if next < succ[v].len() {
                let w = succ[v][next];
                call.last_mut().expect("frame").1 += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    comp[w] = comps;
                    if w == v {
                        break;
                    }
                }
                comps += 1;
            }
        }
    }
    comp
}

/// Nodes lying in a component that contains a cycle.
fn cyclic(succ: &[Vec<usize>], comp: &[usize]) -> Vec<bool> {
    let mut size = vec![0usize; comp.iter().copied().max().map_or(0, |m| m + 1)];
    for &c in comp {
        size[c] += 1;
    }
    (0..succ.len())
        .map(|v| size[comp[v]] > 1 || succ[v].contains(&v))
        .collect()
}

/// Nodes from which some accepting cycle is reachable.
pub(crate) fn live(succ: &[Vec<usize>], accepting: &[bool]) -> Vec<bool> {
    let comp = sccs(succ);
    let cyc = cyclic(succ, &comp);
    let ncomp = comp.iter().copied().max().map_or(0, |m| m + 1);
    let mut good = vec![false; ncomp];
    for v in 0..succ.len() {
        if accepting[v] && cyc[v] {
            good[comp[v]] = true;
        }
    }
    // Components come in reverse topological order: successors first.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for v in 0..succ.len() {
        members[comp[v]].push(v);
    }
    for c in 0..ncomp {
        if !good[c] {
            good[c] = members[c].iter().any(|&v| succ[v].iter().any(|&w| good[comp[w]]));
        }
    }
    (0..succ.len()).map(|v| good[comp[v]]).collect()
}

/// A path given as `(node, edge index)` steps.
pub(crate) type Path = Vec<(usize, usize)>;

/// Shortest path from `from` to a node satisfying `target`, through nodes
/// allowed by `keep`, taking at least one edge when `nonempty`.
fn bfs(
    succ: &[Vec<usize>],
    from: usize,
    target: &dyn Fn(usize) -> bool,
    keep: &dyn Fn(usize) -> bool,
    nonempty: bool,
) -> Option<(usize, Path)> {
    if !nonempty && target(from) {
        return Some((from, Vec::new()));
    }
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; succ.len()];
    let mut seen = vec![false; succ.len()];
    let mut queue = VecDeque::from([from]);
    if !nonempty {
        seen[from] = true;
    }
    while let Some(v) = queue.pop_front() {
        for (i, &w) in succ[v].iter().enumerate() {
            if !keep(w) || seen[w] {
                continue;
            }
            seen[w] = true;
            parent[w] = Some((v, i));
            if target(w) {
                let mut path = Vec::new();
                let mut cur = w;
                loop {
                    let (p, e) = parent[cur].expect("bfs parent");
                    path.push((p, e));
                    cur = p;
                    if cur == from {
                        break;
                    }
                }
                path.reverse();
                return Some((w, path));
            }
            queue.push_back(w);
        }
    }
    None
}

/// An accepting lasso from `init`: a path to an accepting node on a cycle and
/// the cycle through it.
pub(crate) fn accepting_lasso(succ: &[Vec<usize>], accepting: &[bool], init: usize) -> Option<(Path, Path)> {
    let comp = sccs(succ);
    let cyc = cyclic(succ, &comp);
    let (a, prefix) = bfs(succ, init, &|v| accepting[v] && cyc[v], &|_| true, false)?;
    let (_, cycle) = bfs(succ, a, &|v| v == a, &|v| comp[v] == comp[a], true)?;
    Some((prefix, cycle))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn components_and_lassos() {
        // 0 -> 1 -> 2 -> 1, 2 -> 3
        let succ = vec![vec![1], vec![2], vec![1, 3], vec![]];
        let comp = sccs(&succ);
        assert_eq!(comp[1], comp[2]);
        assert_ne!(comp[0], comp[1]);
        let acc = vec![false, false, true, false];
        assert_eq!(live(&succ, &acc), vec![true, true, true, false]);
        let (prefix, cycle) = accepting_lasso(&succ, &acc, 0).unwrap();
        assert_eq!(prefix, vec![(0, 0), (1, 0)]);
        assert_eq!(cycle, vec![(2, 0), (1, 0)]);
        assert!(accepting_lasso(&succ, &[false, false, false, true], 0).is_none());
    }

    #[test]
    fn self_loop_counts_as_cycle() {
        let succ = vec![vec![0]];
        let (prefix, cycle) = accepting_lasso(&succ, &[true], 0).unwrap();
        assert!(prefix.is_empty());
        assert_eq!(cycle, vec![(0, 0)]);
    }
}
