//! Folds of bigraphs: cut-involutions paired with a side, their folding
//! maps, the automorphism action on folds, and the fold-generated subgroup.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bigraph::{Bigraph, Endomorphism, VertexSet};
use crate::coloring::ColoredBigraph;
use crate::error::{Error, Result};
use crate::iso::{self, Perm};

/// Which folding map of a fold to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A fold `(f, L)`: an involutive automorphism whose fixed set is a cut,
/// together with a union `L` of components of `G − Fix(f)` such that
/// `(L, Fix(f), f(L))` partitions the vertices.
///
/// `Fix(f)` and both folding maps are materialized at construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fold {
    map: Perm,
    fix: Vec<usize>,
    side: Vec<usize>,
    side_image: Vec<usize>,
    left_map: Vec<usize>,
    right_map: Vec<usize>,
}

impl Fold {
    /// Validate the three defining conditions and build the fold.
    pub fn new(graph: &Bigraph, map: Perm, side: &VertexSet) -> Result<Self> {
        if !graph.is_automorphism_map(&map) {
            return Err(Error::NotAnAutomorphism);
        }
        let n = graph.vertex_count();
        if (0..n).any(|v| map[map[v]] != v) {
            return Err(Error::NotAFold("map is not an involution".into()));
        }
        let fix: VertexSet = (0..n).filter(|&v| map[v] == v).collect();
        if !graph.is_cut(&fix)? {
            return Err(Error::NotAFold("fixed set is not a cut".into()));
        }
        let comps = graph.components_of_complement(&fix);
        let is_union_of_comps = {
            let mut union = VertexSet::new();
            let mut ok = true;
            for comp in &comps {
                if comp.iter().any(|v| side.contains(v)) {
                    if !comp.is_subset(side) {
                        ok = false;
                        break;
                    }
                    union.extend(comp.iter().copied());
                }
            }
            ok && union == *side
        };
        if !is_union_of_comps {
            return Err(Error::NotAFold(
                "side is not a union of components of G - Fix(f)".into(),
            ));
        }
        let side_image: VertexSet = side.iter().map(|&v| map[v]).collect();
        let mut all = VertexSet::new();
        all.extend(side.iter().copied());
        all.extend(fix.iter().copied());
        all.extend(side_image.iter().copied());
        let disjoint = side.len() + fix.len() + side_image.len() == all.len();
        if !(disjoint && all.len() == n) {
            return Err(Error::NotAFold(
                "(L, Fix(f), f(L)) is not a partition of V(G)".into(),
            ));
        }
        let left_map: Vec<usize> = (0..n)
            .map(|v| if side.contains(&v) { v } else { map[v] })
            .collect();
        let right_map: Vec<usize> = (0..n)
            .map(|v| if side.contains(&v) { map[v] } else { v })
            .collect();
        debug_assert!(graph.is_endomorphism_map(&left_map));
        debug_assert!(graph.is_endomorphism_map(&right_map));
        Ok(Fold {
            map,
            fix: fix.into_iter().collect(),
            side: side.iter().copied().collect(),
            side_image: side_image.into_iter().collect(),
            left_map,
            right_map,
        })
    }

    /// The cut-involution `f`.
    pub fn involution(&self) -> &Perm {
        &self.map
    }

    /// `Fix(f)` in sorted order.
    pub fn fix(&self) -> &[usize] {
        &self.fix
    }

    pub fn fix_set(&self) -> VertexSet {
        self.fix.iter().copied().collect()
    }

    /// The side `L` in sorted order.
    pub fn side(&self) -> &[usize] {
        &self.side
    }

    pub fn side_set(&self) -> VertexSet {
        self.side.iter().copied().collect()
    }

    /// `f(L)` in sorted order.
    pub fn side_image(&self) -> &[usize] {
        &self.side_image
    }

    /// The left-folding map `f_L` on vertices.
    pub fn left_map(&self) -> &[usize] {
        &self.left_map
    }

    /// The right-folding map `f_L^*` on vertices.
    pub fn right_map(&self) -> &[usize] {
        &self.right_map
    }

    pub fn vertex_map(&self, which: Side) -> &[usize] {
        match which {
            Side::Left => &self.left_map,
            Side::Right => &self.right_map,
        }
    }

    /// The dual fold `(f, f(L))`.
    pub fn dual(&self, graph: &Bigraph) -> Fold {
        let image: VertexSet = self.side_image.iter().copied().collect();
        Fold::new(graph, self.map.clone(), &image).expect("dual of a fold is a fold")
    }

    /// Both folding maps as verified endomorphisms.
    pub fn folding_maps(&self, graph: &Bigraph) -> (Endomorphism, Endomorphism) {
        (
            Endomorphism::new(graph, self.left_map.clone()).expect("left folding map"),
            Endomorphism::new(graph, self.right_map.clone()).expect("right folding map"),
        )
    }

    /// The action of a folding map on edge indices: entry `e` is the index
    /// of the image of edge `e`.
    pub fn edge_map(&self, graph: &Bigraph, which: Side) -> Vec<usize> {
        let vm = self.vertex_map(which);
        (0..graph.edge_count())
            .map(|e| {
                graph
                    .map_edge(vm, e)
                    .expect("folding maps are endomorphisms")
            })
            .collect()
    }

    /// Does the involution preserve the coloring of `h`?
    pub fn preserves_coloring(&self, h: &ColoredBigraph) -> bool {
        let g = h.graph();
        (0..g.edge_count()).all(|e| {
            let img = g.map_edge(&self.map, e).expect("automorphism");
            h.edge_color(img) == h.edge_color(e)
        })
    }

    /// Is `Fix(f)` an independent set?
    pub fn is_independent(&self, graph: &Bigraph) -> bool {
        graph
            .is_independent_set(&self.fix_set())
            .expect("fix is a vertex set")
    }
}

/// A canonically ordered collection of folds over one host, with its
/// dual-closure and automorphism-invariance status.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldSet {
    folds: Vec<Fold>,
    dual_closed: bool,
    aut_invariant: bool,
}

impl FoldSet {
    /// Canonicalize (sort, dedup) and compute the status flags. The group
    /// used for the invariance flag is `Aut` of the plain host graph.
    pub fn new(graph: &Bigraph, mut folds: Vec<Fold>) -> Self {
        folds.sort();
        folds.dedup();
        let dual_closed = folds
            .iter()
            .all(|f| folds.binary_search(&f.dual(graph)).is_ok());
        let auts = iso::bigraph_automorphisms(graph);
        let aut_invariant = folds.iter().all(|f| {
            auts.iter().all(|h| {
                let acted = act(graph, h, f).expect("automorphism action");
                folds.binary_search(&acted).is_ok()
            })
        });
        FoldSet {
            folds,
            dual_closed,
            aut_invariant,
        }
    }

    pub fn folds(&self) -> &[Fold] {
        &self.folds
    }

    pub fn len(&self) -> usize {
        self.folds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.folds.is_empty()
    }

    pub fn get(&self, idx: usize) -> &Fold {
        &self.folds[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fold> {
        self.folds.iter()
    }

    pub fn is_dual_closed(&self) -> bool {
        self.dual_closed
    }

    /// Invariance under `Aut` of the plain host graph.
    pub fn is_aut_invariant(&self) -> bool {
        self.aut_invariant
    }

    /// Invariance under an explicit list of automorphisms.
    pub fn is_invariant_under(&self, graph: &Bigraph, group: &[Perm]) -> Result<bool> {
        for h in group {
            for f in &self.folds {
                let acted = act(graph, h, f)?;
                if self.folds.binary_search(&acted).is_err() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Index of the dual of fold `idx`.
    pub fn dual_index(&self, graph: &Bigraph, idx: usize) -> Option<usize> {
        self.folds
            .binary_search(&self.folds[idx].dual(graph))
            .ok()
    }

    /// The involutions of the folds, deduplicated, in sorted order.
    pub fn involutions(&self) -> Vec<Perm> {
        let set: BTreeSet<Perm> = self.folds.iter().map(|f| f.involution().clone()).collect();
        set.into_iter().collect()
    }
}

/// All folds of a bigraph, including duals.
///
/// For each involutive automorphism whose fixed set is a cut, the
/// components of `G − Fix(f)` are paired into f-orbits; a valid side picks
/// exactly one component from each orbit, and an f-invariant component
/// rules the involution out entirely (no choice of sides can then partition
/// the vertices).
pub fn enumerate_folds(graph: &Bigraph) -> FoldSet {
    let mut folds = Vec::new();
    for f in iso::bigraph_automorphisms(graph) {
        let n = graph.vertex_count();
        if (0..n).any(|v| f[f[v]] != v) {
            continue;
        }
        let fix: VertexSet = (0..n).filter(|&v| f[v] == v).collect();
        if !graph.is_cut(&fix).expect("fix is a vertex set") {
            continue;
        }
        let comps = graph.components_of_complement(&fix);
        let image_of = |comp: &VertexSet| -> VertexSet { comp.iter().map(|&v| f[v]).collect() };
        if comps.iter().any(|c| image_of(c) == *c) {
            continue;
        }
        // Pair components into f-orbits.
        let mut paired: Vec<(VertexSet, VertexSet)> = Vec::new();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for (i, comp) in comps.iter().enumerate() {
            if used.contains(&i) {
                continue;
            }
            let img = image_of(comp);
            let j = comps
                .iter()
                .position(|c| *c == img)
                .expect("automorphism permutes components");
            used.insert(i);
            used.insert(j);
            paired.push((comp.clone(), img));
        }
        for choice in 0..1u64 << paired.len() {
            let mut side = VertexSet::new();
            for (bit, (a, b)) in paired.iter().enumerate() {
                if choice >> bit & 1 == 0 {
                    side.extend(a.iter().copied());
                } else {
                    side.extend(b.iter().copied());
                }
            }
            folds.push(Fold::new(graph, f.clone(), &side).expect("constructed fold is valid"));
        }
    }
    FoldSet::new(graph, folds)
}

/// Folds of a colored bigraph: folds of the underlying graph whose
/// involution preserves the coloring.
pub fn enumerate_colored_folds(h: &ColoredBigraph) -> FoldSet {
    let all = enumerate_folds(h.graph());
    let kept: Vec<Fold> = all
        .folds()
        .iter()
        .filter(|f| f.preserves_coloring(h))
        .cloned()
        .collect();
    FoldSet::new(h.graph(), kept)
}

/// Folds whose fixed set is also an independent set.
pub fn enumerate_independent_folds(graph: &Bigraph) -> FoldSet {
    let all = enumerate_folds(graph);
    let kept: Vec<Fold> = all
        .folds()
        .iter()
        .filter(|f| f.is_independent(graph))
        .cloned()
        .collect();
    FoldSet::new(graph, kept)
}

/// The left action `h · (f, L) = (h ∘ f ∘ h⁻¹, h(L))`.
pub fn act(graph: &Bigraph, h: &Perm, fold: &Fold) -> Result<Fold> {
    if !graph.is_automorphism_map(h) {
        return Err(Error::NotAnAutomorphism);
    }
    let conj = iso::compose(&iso::compose(h, fold.involution()), &iso::invert(h));
    let side: VertexSet = fold.side().iter().map(|&v| h[v]).collect();
    let acted = Fold::new(graph, conj, &side)?;
    debug_assert_eq!(
        acted.fix_set(),
        fold.fix().iter().map(|&v| h[v]).collect::<VertexSet>()
    );
    Ok(acted)
}

/// The subgroup of `Aut(G)` generated by the involutions of the given
/// folds, materialized as a sorted element list.
pub fn fold_group(graph: &Bigraph, folds: &FoldSet) -> Vec<Perm> {
    let generators = folds.involutions();
    let mut group: BTreeSet<Perm> = BTreeSet::new();
    let mut queue = vec![identity_perm(graph)];
    group.insert(identity_perm(graph));
    while let Some(g) = queue.pop() {
        for gen in &generators {
            let next = iso::compose(gen, &g);
            if group.insert(next.clone()) {
                queue.push(next);
            }
        }
    }
    group.into_iter().collect()
}

fn identity_perm(graph: &Bigraph) -> Perm {
    iso::identity(graph.vertex_count())
}

/// Is the induced action of `k` on the edges transitive?
pub fn is_edge_transitive(graph: &Bigraph, k: &[Perm]) -> Result<bool> {
    for h in k {
        if !graph.is_automorphism_map(h) {
            return Err(Error::NotAnAutomorphism);
        }
    }
    let m = graph.edge_count();
    if m <= 1 {
        return Ok(true);
    }
    Ok(orbit_size(m, k, |h, e| {
        graph.map_edge(h, e).expect("automorphism maps edges")
    }) == m)
}

/// Is the induced action of `k` on the left vertices transitive?
pub fn is_left_vertex_transitive(graph: &Bigraph, k: &[Perm]) -> Result<bool> {
    for h in k {
        if !graph.is_automorphism_map(h) {
            return Err(Error::NotAnAutomorphism);
        }
    }
    let m = graph.v1_count();
    if m <= 1 {
        return Ok(true);
    }
    Ok(orbit_size(m, k, |h, v| h[v]) == m)
}

/// Size of the orbit of element 0 under the group generated by `k`.
fn orbit_size(m: usize, k: &[Perm], apply: impl Fn(&Perm, usize) -> usize) -> usize {
    let mut seen = vec![false; m];
    seen[0] = true;
    let mut stack = vec![0];
    let mut count = 1;
    while let Some(x) = stack.pop() {
        for h in k {
            let y = apply(h, x);
            if !seen[y] {
                seen[y] = true;
                count += 1;
                stack.push(y);
            }
        }
    }
    count
}
