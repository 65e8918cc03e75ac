//! Iterative Tarjan strongly connected components.

/// Component id per node; ids are in reverse topological order of the
/// condensation (a component's id is larger than those it can reach).
pub fn tarjan_scc(adj: &[Vec<usize>]) -> (Vec<usize>, usize) {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next_index = 0usize;
    let mut ncomp = 0usize;

    // Explicit DFS frames: (node, next child position).
    let mut frames: Vec<(usize, usize)> = Vec::new();
    for start in 0..n {
        if index[start] != usize::MAX {
            continue;
        }
        frames.push((start, 0));
        index[start] = next_index;
        low[start] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start] = true;

        while let Some(&mut (v, ref mut ci)) = frames.last_mut() {
            if *ci < adj[v].len() {
                let w = adj[v][*ci];
                *ci += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    frames.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                frames.pop();
                if let Some(&mut (p, _)) = frames.last_mut() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// Components with no arc into a different component.
pub fn sink_components(adj: &[Vec<usize>], comp: &[usize], ncomp: usize) -> Vec<bool> {
    let mut is_sink = vec![true; ncomp];
    for (v, out) in adj.iter().enumerate() {
        for &w in out {
            if comp[v] != comp[w] {
                is_sink[comp[v]] = false;
            }
        }
    }
    is_sink
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        // 0 <-> 1 -> 2 <-> 3
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2]];
        let (comp, ncomp) = tarjan_scc(&adj);
        assert_eq!(ncomp, 2);
        assert_eq!(comp[0], comp[1]);
        assert_eq!(comp[2], comp[3]);
        assert_ne!(comp[0], comp[2]);
        let sinks = sink_components(&adj, &comp, ncomp);
        assert!(sinks[comp[2]]);
        assert!(!sinks[comp[0]]);
    }

    #[test]
    fn singletons() {
        let adj = vec![vec![1], vec![2], vec![]];
        let (comp, ncomp) = tarjan_scc(&adj);
        assert_eq!(ncomp, 3);
        let sinks = sink_components(&adj, &comp, ncomp);
        assert_eq!(sinks.iter().filter(|&&s| s).count(), 1);
        assert!(sinks[comp[2]]);
    }

    #[test]
    fn deep_path_does_not_overflow() {
        let n = 200_000;
        let adj: Vec<Vec<usize>> = (0..n)
            .map(|v| if v + 1 < n { vec![v + 1] } else { vec![] })
            .collect();
        let (comp, ncomp) = tarjan_scc(&adj);
        assert_eq!(ncomp, n);
        assert_eq!(comp[0], n - 1);
    }
}
