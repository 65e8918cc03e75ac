//! Reachability of colorings under folding maps, cut-percolation,
//! left-cut-percolation, absorbing folding problems, and the constructive
//! builder of percolating tree sequences.
//!
//! Colorings are state vectors keyed by their raw assignment (no
//! color-renaming quotient): the reachability preorder is defined on
//! literal colorings. Edge subsets and left-vertex subsets are bitmasks.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::bigraph::Bigraph;
use crate::coloring::{ColorVec, ColoredBigraph, Coloring};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::fold::{self, Fold, FoldSet, Side};
use crate::scc;
use crate::tree::{induced_coloring_tree, leaf_measure, FoldingTree};

/// Default cap on visited search states.
pub const DEFAULT_BUDGET: usize = 1 << 24;

/// A folding problem: base graph, initial coloring, objective colorings
/// and allowed folds.
#[derive(Debug, Clone)]
pub struct FoldingProblem<'a> {
    pub graph: &'a Bigraph,
    pub folds: &'a FoldSet,
    pub initial: ColorVec,
    pub objectives: BTreeSet<ColorVec>,
}

impl<'a> FoldingProblem<'a> {
    pub fn new(
        graph: &'a Bigraph,
        folds: &'a FoldSet,
        initial: ColorVec,
        objectives: BTreeSet<ColorVec>,
    ) -> Result<Self> {
        if initial.len() != graph.edge_count() {
            return Err(Error::ColoringSizeMismatch {
                got: initial.len(),
                expected: graph.edge_count(),
            });
        }
        if objectives.iter().any(|c| c.len() != graph.edge_count()) {
            return Err(Error::ColoringSizeMismatch {
                got: 0,
                expected: graph.edge_count(),
            });
        }
        Ok(FoldingProblem {
            graph,
            folds,
            initial,
            objectives,
        })
    }
}

/// All monochromatic colorings over a palette of the given size.
pub fn monochromatic_set(palette_size: usize, edges: usize) -> BTreeSet<ColorVec> {
    if edges == 0 {
        return [Vec::new()].into_iter().collect();
    }
    (0..palette_size as u32)
        .map(|c| vec![c; edges])
        .collect()
}

/// Per-fold edge maps for both sides, precomputed once per engine run.
pub(crate) struct EdgeMaps {
    pub left: Vec<Vec<usize>>,
    pub right: Vec<Vec<usize>>,
}

impl EdgeMaps {
    pub(crate) fn new(graph: &Bigraph, folds: &FoldSet) -> Self {
        EdgeMaps {
            left: folds.iter().map(|f| f.edge_map(graph, Side::Left)).collect(),
            right: folds
                .iter()
                .map(|f| f.edge_map(graph, Side::Right))
                .collect(),
        }
    }

    pub(crate) fn apply(&self, fold: usize, side: Side, state: &[u32]) -> ColorVec {
        let map = match side {
            Side::Left => &self.left[fold],
            Side::Right => &self.right[fold],
        };
        map.iter().map(|&e| state[e]).collect()
    }
}

/// Compose a coloring with one folding map: `c ∘ f_L` or `c ∘ f_L^*`.
pub fn apply_fold(graph: &Bigraph, c: &Coloring, fold: &Fold, side: Side) -> Result<Coloring> {
    if c.len() != graph.edge_count() {
        return Err(Error::ColoringSizeMismatch {
            got: c.len(),
            expected: graph.edge_count(),
        });
    }
    if fold.involution().len() != graph.vertex_count()
        || !graph.is_endomorphism_map(fold.left_map())
    {
        return Err(Error::HostMismatch);
    }
    let map = fold.edge_map(graph, side);
    let colors: ColorVec = map.iter().map(|&e| c.colors()[e]).collect();
    c.with_colors(colors)
}

/// The set of colorings reachable from a start state, with BFS parents for
/// witness reconstruction. Transitions use both folding maps of every
/// allowed fold (using a fold's dual is always permitted by the preorder).
pub struct ReachSet {
    pub nodes: Vec<ColorVec>,
    pub index: HashMap<ColorVec, usize>,
    pub parent: Vec<Option<(usize, usize, Side)>>,
    pub dist: Vec<usize>,
}

pub fn reach_set(
    graph: &Bigraph,
    folds: &FoldSet,
    start: &ColorVec,
    budget: usize,
) -> Result<ReachSet> {
    let maps = EdgeMaps::new(graph, folds);
    let mut nodes = vec![start.clone()];
    let mut index: HashMap<ColorVec, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    let mut parent: Vec<Option<(usize, usize, Side)>> = vec![None];
    let mut dist = vec![0usize];
    let mut queue = VecDeque::from([0usize]);
    while let Some(at) = queue.pop_front() {
        let state = nodes[at].clone();
        for fold_idx in 0..folds.len() {
            for side in [Side::Left, Side::Right] {
                let next = maps.apply(fold_idx, side, &state);
                if !index.contains_key(&next) {
                    if nodes.len() >= budget {
                        return Err(Error::BudgetExceeded {
                            visited: nodes.len(),
                            budget,
                            frontier: queue.len(),
                        });
                    }
                    let id = nodes.len();
                    index.insert(next.clone(), id);
                    nodes.push(next);
                    parent.push(Some((at, fold_idx, side)));
                    dist.push(dist[at] + 1);
                    queue.push_back(id);
                }
            }
        }
    }
    Ok(ReachSet {
        nodes,
        index,
        parent,
        dist,
    })
}

impl ReachSet {
    /// The fold/side steps from the start to `node`.
    pub fn steps_to(&self, mut node: usize) -> Vec<(usize, Side)> {
        let mut steps = Vec::new();
        while let Some((prev, fold, side)) = self.parent[node] {
            steps.push((fold, side));
            node = prev;
        }
        steps.reverse();
        steps
    }
}

/// The full reachability digraph over the state space of colorings using
/// the image colors of `c`, with strongly connected components and
/// maximality flags.
pub struct ReachabilityDigraph {
    pub nodes: Vec<ColorVec>,
    pub index: HashMap<ColorVec, usize>,
    /// Arcs per node: (fold index, side, target node).
    pub arcs: Vec<Vec<(usize, Side, usize)>>,
    pub scc: Vec<usize>,
    pub scc_count: usize,
    /// A coloring is maximal iff everything reachable from it reaches back,
    /// i.e. its component is a sink of the condensation.
    pub maximal: Vec<bool>,
}

pub fn reachability_digraph(
    graph: &Bigraph,
    c: &Coloring,
    folds: &FoldSet,
    budget: usize,
) -> Result<ReachabilityDigraph> {
    if c.len() != graph.edge_count() {
        return Err(Error::ColoringSizeMismatch {
            got: c.len(),
            expected: graph.edge_count(),
        });
    }
    let image: Vec<u32> = c.image().into_iter().collect();
    let e = graph.edge_count();
    let space: u128 = (image.len().max(1) as u128)
        .checked_pow(e as u32)
        .unwrap_or(u128::MAX);
    if space > budget as u128 {
        return Err(Error::BudgetExceeded {
            visited: 0,
            budget,
            frontier: space.min(u128::from(u64::MAX)) as usize,
        });
    }
    // Enumerate the full space in lexicographic order of image positions.
    let mut nodes: Vec<ColorVec> = Vec::with_capacity(space as usize);
    let mut counter = vec![0usize; e];
    loop {
        nodes.push(counter.iter().map(|&i| image[i]).collect());
        let mut pos = e;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            counter[pos] += 1;
            if counter[pos] < image.len() {
                break;
            }
            counter[pos] = 0;
        }
        if counter.iter().all(|&i| i == 0) {
            break;
        }
    }
    debug_assert_eq!(nodes.len(), space as usize);
    let index: HashMap<ColorVec, usize> = nodes
        .iter()
        .enumerate()
        .map(|(i, n)| (n.clone(), i))
        .collect();
    let maps = EdgeMaps::new(graph, folds);
    let mut arcs: Vec<Vec<(usize, Side, usize)>> = Vec::with_capacity(nodes.len());
    for state in &nodes {
        let mut out = Vec::with_capacity(2 * folds.len());
        for fold_idx in 0..folds.len() {
            for side in [Side::Left, Side::Right] {
                let next = maps.apply(fold_idx, side, state);
                out.push((fold_idx, side, index[&next]));
            }
        }
        arcs.push(out);
    }
    let adj: Vec<Vec<usize>> = arcs
        .iter()
        .map(|out| out.iter().map(|&(_, _, t)| t).collect())
        .collect();
    let (comp, ncomp) = scc::tarjan_scc(&adj);
    let sinks = scc::sink_components(&adj, &comp, ncomp);
    let maximal: Vec<bool> = (0..nodes.len()).map(|v| sinks[comp[v]]).collect();
    Ok(ReachabilityDigraph {
        nodes,
        index,
        arcs,
        scc: comp,
        scc_count: ncomp,
        maximal,
    })
}

/// A positive reachability witness: the shortest fold/side sequence from
/// the initial coloring into the objective set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReachWitness {
    pub steps: Vec<(usize, Side)>,
    /// The coloring states along the path, starting at the initial one.
    pub path: Vec<ColorVec>,
}

/// Decide `c ⪯ 𝒞` and return a shortest witness.
pub fn reaches(problem: &FoldingProblem, budget: usize) -> Result<Option<ReachWitness>> {
    let rs = reach_set(problem.graph, problem.folds, &problem.initial, budget)?;
    let goal = (0..rs.nodes.len())
        .find(|&i| problem.objectives.contains(&rs.nodes[i]));
    let Some(goal) = goal else {
        return Ok(None);
    };
    let steps = rs.steps_to(goal);
    // Re-drive the witness and verify it lands in the objectives.
    let maps = EdgeMaps::new(problem.graph, problem.folds);
    let mut path = vec![problem.initial.clone()];
    for &(fold_idx, side) in &steps {
        let next = maps.apply(fold_idx, side, path.last().unwrap());
        path.push(next);
    }
    if !problem.objectives.contains(path.last().unwrap()) {
        return Err(Error::Internal("reach witness fails replay".into()));
    }
    // Reachability depth bound: |im(c)|^{e(G)} − 1.
    let image = problem.initial.iter().collect::<BTreeSet<_>>().len().max(1);
    let bound = (image as u128)
        .checked_pow(problem.graph.edge_count() as u32)
        .unwrap_or(u128::MAX);
    if (steps.len() as u128) + 1 > bound {
        return Err(Error::Internal(
            "shortest path exceeds the state-space bound".into(),
        ));
    }
    Ok(Some(ReachWitness { steps, path }))
}

/// A percolation witness over subsets: the sequence of subsets grows from
/// a singleton to the full set along preimages of left-folding maps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetWitness {
    /// Fold indices applied at each step.
    pub steps: Vec<usize>,
    /// The subsets, as sorted index lists, from the singleton to the full
    /// set.
    pub sets: Vec<Vec<usize>>,
}

fn mask_to_vec(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Start element, fold steps, and the visited subsets of a hit.
type SubsetSearchHit = (usize, Vec<usize>, Vec<u64>);

/// BFS over subsets: start at singletons, step `S ↦ m^{-1}(S)`, succeed at
/// the full set. `maps[fold][x] = image of element x`.
fn subset_percolation(
    n: usize,
    maps: &[Vec<usize>],
    budget: usize,
) -> Result<Option<SubsetSearchHit>> {
    if n == 0 {
        return Ok(None);
    }
    if n > 63 {
        return Err(Error::InvalidParameter(
            "subset search supports at most 63 elements".into(),
        ));
    }
    let full: u64 = (1 << n) - 1;
    let mut parent: HashMap<u64, (u64, usize)> = HashMap::new();
    let mut queue = VecDeque::new();
    let mut starts: HashMap<u64, usize> = HashMap::new();
    for x in 0..n {
        let mask = 1u64 << x;
        if starts.insert(mask, x).is_none() {
            queue.push_back(mask);
        }
    }
    let mut visited: BTreeSet<u64> = starts.keys().copied().collect();
    let reconstruct = |end: u64,
                       parent: &HashMap<u64, (u64, usize)>,
                       starts: &HashMap<u64, usize>|
     -> (usize, Vec<usize>, Vec<u64>) {
        let mut sets = vec![end];
        let mut steps = Vec::new();
        let mut at = end;
        while let Some(&(prev, fold)) = parent.get(&at) {
            steps.push(fold);
            sets.push(prev);
            at = prev;
        }
        steps.reverse();
        sets.reverse();
        (starts[&at], steps, sets)
    };
    if let Some(&x) = starts.get(&full) {
        // Single-element ground set: the singleton is already everything.
        return Ok(Some((x, Vec::new(), vec![full])));
    }
    while let Some(mask) = queue.pop_front() {
        for (fold_idx, map) in maps.iter().enumerate() {
            // Preimage of the current subset under the folding map.
            let mut next = 0u64;
            for (x, &img) in map.iter().enumerate() {
                if mask >> img & 1 == 1 {
                    next |= 1 << x;
                }
            }
            if visited.contains(&next) {
                continue;
            }
            if visited.len() >= budget {
                return Err(Error::BudgetExceeded {
                    visited: visited.len(),
                    budget,
                    frontier: queue.len(),
                });
            }
            visited.insert(next);
            parent.insert(next, (mask, fold_idx));
            if next == full {
                return Ok(Some(reconstruct(full, &parent, &starts)));
            }
            queue.push_back(next);
        }
    }
    Ok(None)
}

/// Decide cut-percolation of `graph` with the given folds and return a
/// replayable witness. The witness is re-verified before returning, and a
/// positive answer additionally asserts edge-transitivity under the
/// fold-generated subgroup.
pub fn is_cut_percolating(
    graph: &Bigraph,
    folds: &FoldSet,
    budget: usize,
) -> Result<Option<SubsetWitness>> {
    let e = graph.edge_count();
    let maps: Vec<Vec<usize>> = folds
        .iter()
        .map(|f| f.edge_map(graph, Side::Left))
        .collect();
    let Some((_, steps, sets)) = subset_percolation(e, &maps, budget)? else {
        return Ok(None);
    };
    verify_subset_witness(e, &maps, &steps, &sets)?;
    let group = fold::fold_group(graph, folds);
    if !fold::is_edge_transitive(graph, &group)? {
        return Err(Error::Internal(
            "cut-percolating graph must be edge-transitive under its fold group".into(),
        ));
    }
    Ok(Some(SubsetWitness {
        steps,
        sets: sets.into_iter().map(|m| mask_to_vec(m, e)).collect(),
    }))
}

/// Decide left-cut-percolation of a colored bigraph: the same search over
/// subsets of the left part, using folds of the colored bigraph.
pub fn is_left_cut_percolating(
    h: &ColoredBigraph,
    folds: &FoldSet,
    budget: usize,
) -> Result<Option<SubsetWitness>> {
    for f in folds.iter() {
        if !f.preserves_coloring(h) {
            return Err(Error::NotColorPreserving);
        }
    }
    let graph = h.graph();
    let n1 = graph.v1_count();
    // Left-folding maps restricted to the left part (part-preserving).
    let maps: Vec<Vec<usize>> = folds
        .iter()
        .map(|f| f.left_map()[..n1].to_vec())
        .collect();
    let Some((_, steps, sets)) = subset_percolation(n1, &maps, budget)? else {
        return Ok(None);
    };
    verify_subset_witness(n1, &maps, &steps, &sets)?;
    let group = fold::fold_group(graph, folds);
    if !fold::is_left_vertex_transitive(graph, &group)? {
        return Err(Error::Internal(
            "left-percolating graph must be left-vertex-transitive under its fold group".into(),
        ));
    }
    Ok(Some(SubsetWitness {
        steps,
        sets: sets.into_iter().map(|m| mask_to_vec(m, n1)).collect(),
    }))
}

/// Direct recomputation of a subset witness: singleton start, preimage
/// steps, full-set finish.
fn verify_subset_witness(
    n: usize,
    maps: &[Vec<usize>],
    steps: &[usize],
    sets: &[u64],
) -> Result<()> {
    let full: u64 = (1 << n) - 1;
    let ok = sets.first().map(|m| m.count_ones() == 1).unwrap_or(false)
        && *sets.last().unwrap() == full
        && sets.len() == steps.len() + 1
        && steps.iter().enumerate().all(|(i, &fold)| {
            let mut pre = 0u64;
            for (x, &img) in maps[fold].iter().enumerate() {
                if sets[i] >> img & 1 == 1 {
                    pre |= 1 << x;
                }
            }
            pre == sets[i + 1]
        });
    if ok {
        Ok(())
    } else {
        Err(Error::Internal("percolation witness fails replay".into()))
    }
}

/// Verify a percolation witness against a graph and fold set without
/// searching.
pub fn replay_subset_witness(
    graph: &Bigraph,
    folds: &FoldSet,
    witness: &SubsetWitness,
    left_vertices: bool,
) -> Result<()> {
    let n = if left_vertices {
        graph.v1_count()
    } else {
        graph.edge_count()
    };
    let maps: Vec<Vec<usize>> = if left_vertices {
        folds.iter().map(|f| f.left_map()[..n].to_vec()).collect()
    } else {
        folds.iter().map(|f| f.edge_map(graph, Side::Left)).collect()
    };
    if witness.steps.iter().any(|&s| s >= maps.len()) {
        return Err(Error::InvalidParameter("fold index out of range".into()));
    }
    let sets: Vec<u64> = witness
        .sets
        .iter()
        .map(|set| {
            let mut mask = 0u64;
            for &x in set {
                if x >= n {
                    return Err(Error::VertexOutOfRange(x));
                }
                mask |= 1 << x;
            }
            Ok(mask)
        })
        .collect::<Result<_>>()?;
    verify_subset_witness(n, &maps, &witness.steps, &sets)
}

/// Why a problem fails to be absorbing.
#[derive(Debug, Clone)]
pub struct AbsorbingViolation {
    pub coloring: ColorVec,
    pub fold: usize,
    pub side: Side,
    pub dead_child: ColorVec,
}

#[derive(Debug, Clone)]
pub struct AbsorbingReport {
    pub absorbing: bool,
    pub violation: Option<AbsorbingViolation>,
}

/// Is `c` maximal in the reachability preorder, i.e. does every coloring
/// reachable from it reach back?
pub fn is_maximal(
    graph: &Bigraph,
    folds: &FoldSet,
    c: &ColorVec,
    budget: usize,
) -> Result<bool> {
    let rs = reach_set(graph, folds, c, budget)?;
    let problem = FoldingProblem::new(
        graph,
        folds,
        c.clone(),
        [c.clone()].into_iter().collect(),
    )?;
    let back = reaches_objective_flags(&problem, &rs);
    Ok(back.iter().all(|&b| b))
}

/// Decide whether the problem is absorbing: every reachable non-objective
/// coloring that still reaches the objectives keeps both fold-children
/// able to reach them.
pub fn is_absorbing(problem: &FoldingProblem, budget: usize) -> Result<AbsorbingReport> {
    let rs = reach_set(problem.graph, problem.folds, &problem.initial, budget)?;
    let reaches_obj = reaches_objective_flags(problem, &rs);
    let maps = EdgeMaps::new(problem.graph, problem.folds);
    for (i, state) in rs.nodes.iter().enumerate() {
        if !reaches_obj[i] || problem.objectives.contains(state) {
            continue;
        }
        for fold_idx in 0..problem.folds.len() {
            for side in [Side::Left, Side::Right] {
                let child = maps.apply(fold_idx, side, state);
                let child_id = rs.index[&child];
                if !reaches_obj[child_id] {
                    return Ok(AbsorbingReport {
                        absorbing: false,
                        violation: Some(AbsorbingViolation {
                            coloring: state.clone(),
                            fold: fold_idx,
                            side,
                            dead_child: child,
                        }),
                    });
                }
            }
        }
    }
    Ok(AbsorbingReport {
        absorbing: true,
        violation: None,
    })
}

/// For every node of the reach set, can it reach the objective set?
/// Computed by backward closure over the reversed arcs.
fn reaches_objective_flags(problem: &FoldingProblem, rs: &ReachSet) -> Vec<bool> {
    let maps = EdgeMaps::new(problem.graph, problem.folds);
    let n = rs.nodes.len();
    let mut rev: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, state) in rs.nodes.iter().enumerate() {
        for fold_idx in 0..problem.folds.len() {
            for side in [Side::Left, Side::Right] {
                let next = maps.apply(fold_idx, side, state);
                rev[rs.index[&next]].push(i);
            }
        }
    }
    let mut flag = vec![false; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, state) in rs.nodes.iter().enumerate() {
        if problem.objectives.contains(state) {
            flag[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &u in &rev[v] {
            if !flag[u] {
                flag[u] = true;
                queue.push_back(u);
            }
        }
    }
    flag
}

/// One stage of the constructive percolating sequence.
#[derive(Debug, Clone)]
pub struct PercolationStage {
    pub tree: FoldingTree,
    /// Objective mass of the stage's induced coloring tree.
    pub mass: Dyadic,
}

#[derive(Debug, Clone)]
pub struct PercolationSequence {
    pub stages: Vec<PercolationStage>,
    /// Maximum shortest-path length to the objectives over the reachable
    /// colorings that reach them; the contraction constant used.
    pub tight_bound: usize,
    /// The generic state-space bound `|im(c)|^{e(G)} − 1`.
    pub loose_bound: u128,
}

/// Build the nested folding trees of the absorbing construction: each
/// stage appends, at every leaf of the 1-extension, the shortest reach
/// branch of that leaf's coloring. Ties among shortest paths break by
/// lexicographic fold index, then side.
///
/// Preconditions: the problem is absorbing and the initial coloring
/// reaches the objectives. Stage masses satisfy the exact contraction
/// `1 − μ_n ≤ (1 − μ_{n−1}) · (1 − 2^{−B})`, which is asserted here.
pub fn build_percolating_sequence(
    problem: &FoldingProblem,
    stages: usize,
    budget: usize,
) -> Result<PercolationSequence> {
    let report = is_absorbing(problem, budget)?;
    if !report.absorbing {
        return Err(Error::NotAbsorbing);
    }
    let rs = reach_set(problem.graph, problem.folds, &problem.initial, budget)?;
    let reaches_obj = reaches_objective_flags(problem, &rs);
    if !reaches_obj[0] {
        return Err(Error::ObjectiveUnreachable);
    }

    // Backward BFS from the objectives assigns every reaching node its
    // shortest-path length and a canonical next step.
    let maps = EdgeMaps::new(problem.graph, problem.folds);
    let n = rs.nodes.len();
    let mut dist: Vec<usize> = vec![usize::MAX; n];
    let mut next_step: Vec<Option<(usize, Side)>> = vec![None; n];
    {
        // arcs[i] lists (fold, side, target).
        let mut arcs: Vec<Vec<(usize, Side, usize)>> = Vec::with_capacity(n);
        for state in &rs.nodes {
            let mut out = Vec::new();
            for fold_idx in 0..problem.folds.len() {
                for side in [Side::Left, Side::Right] {
                    let next = maps.apply(fold_idx, side, state);
                    out.push((fold_idx, side, rs.index[&next]));
                }
            }
            arcs.push(out);
        }
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (i, state) in rs.nodes.iter().enumerate() {
            if problem.objectives.contains(state) {
                dist[i] = 0;
                queue.push_back(i);
            }
        }
        let mut rev: Vec<Vec<(usize, usize, Side)>> = vec![Vec::new(); n];
        for (i, out) in arcs.iter().enumerate() {
            for &(fold_idx, side, t) in out {
                rev[t].push((i, fold_idx, side));
            }
        }
        while let Some(v) = queue.pop_front() {
            for &(u, _, _) in &rev[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        // Canonical next step: smallest (fold, side) arc that decreases the
        // distance.
        for (i, out) in arcs.iter().enumerate() {
            if dist[i] == usize::MAX || dist[i] == 0 {
                continue;
            }
            next_step[i] = out
                .iter()
                .find(|&&(_, _, t)| dist[t] + 1 == dist[i])
                .map(|&(fold_idx, side, _)| (fold_idx, side));
        }
    }

    let tight_bound = (0..n)
        .filter(|&i| reaches_obj[i] && !problem.objectives.contains(&rs.nodes[i]))
        .map(|i| dist[i])
        .max()
        .unwrap_or(0);
    let image = problem
        .initial
        .iter()
        .collect::<BTreeSet<_>>()
        .len()
        .max(1);
    let loose_bound = (image as u128)
        .checked_pow(problem.graph.edge_count() as u32)
        .unwrap_or(u128::MAX)
        .saturating_sub(1);
    if (tight_bound as u128) > loose_bound {
        return Err(Error::Internal(
            "shortest-path bound exceeds the state-space bound".into(),
        ));
    }

    // Shortest reach branch per coloring node.
    let branch_for = |mut at: usize| -> Vec<(usize, Side)> {
        let mut steps = Vec::new();
        while dist[at] > 0 {
            let (fold_idx, side) = next_step[at].expect("reaching node has a next step");
            steps.push((fold_idx, side));
            let next = maps.apply(fold_idx, side, &rs.nodes[at]);
            at = rs.index[&next];
        }
        steps
    };

    let mut out = Vec::with_capacity(stages + 1);
    let mut current = FoldingTree::empty();
    let mut prev_gap: Option<Dyadic> = None;
    let contraction = Dyadic::pow2_inv(tight_bound.max(1) as u32).one_minus();
    for stage in 0..=stages {
        if stage > 0 {
            let coloring_tree =
                induced_coloring_tree(problem.graph, problem.folds, &current, &problem.initial)?;
            let mut next = current.clone();
            for leaf in coloring_tree.tree().leaves() {
                let coloring = coloring_tree.label(&leaf);
                let node = *rs
                    .index
                    .get(coloring)
                    .ok_or_else(|| Error::Internal("stage leaf left the reach set".into()))?;
                if !reaches_obj[node] {
                    return Err(Error::Internal(
                        "absorbing construction reached a dead coloring".into(),
                    ));
                }
                let steps = branch_for(node);
                if steps.len() > tight_bound {
                    return Err(Error::Internal("branch exceeds the tight bound".into()));
                }
                let branch = FoldingTree::branch(&steps, problem.folds)?;
                next.graft(&leaf, &branch)?;
            }
            if !next.extends(&current) {
                return Err(Error::Internal("stage tree does not extend its predecessor".into()));
            }
            current = next;
        }
        let coloring_tree =
            induced_coloring_tree(problem.graph, problem.folds, &current, &problem.initial)?;
        let measure = leaf_measure(&coloring_tree, &problem.objectives);
        let mass = measure.objective_mass().clone();
        let gap = mass.one_minus();
        if let Some(prev) = &prev_gap {
            // 1 − μ_n ≤ (1 − μ_{n−1}) · (1 − 2^{−B}), exactly.
            let allowed = prev * &contraction;
            if gap > allowed {
                return Err(Error::Internal(format!(
                    "stage {stage} violates the mass contraction: gap {gap} > {allowed}"
                )));
            }
        }
        prev_gap = Some(gap);
        out.push(PercolationStage {
            tree: current.clone(),
            mass,
        });
    }
    // Masses are non-decreasing.
    for w in out.windows(2) {
        if w[1].mass < w[0].mass {
            return Err(Error::Internal("stage masses decreased".into()));
        }
    }
    Ok(PercolationSequence {
        stages: out,
        tight_bound,
        loose_bound,
    })
}
