//! Exhaustive isomorphism, automorphism and homomorphism machinery for
//! bigraphs, colored bigraphs and flags.
//!
//! Everything here is plain backtracking with part/degree/color pruning;
//! hosts in this tool stay tiny (no more than ~16 vertices), so no
//! canonical-labeling machinery is needed.


use crate::bigraph::Bigraph;
use crate::coloring::ColoredBigraph;
use crate::error::{Error, Result};
use crate::flag::Flag;

/// A vertex map stored as `map[v] = image of v`.
pub type Perm = Vec<usize>;

pub fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// `outer ∘ inner`: apply `inner` first.
pub fn compose(outer: &[usize], inner: &[usize]) -> Perm {
    inner.iter().map(|&v| outer[v]).collect()
}

pub fn invert(p: &[usize]) -> Perm {
    let mut inv = vec![0; p.len()];
    for (v, &w) in p.iter().enumerate() {
        inv[w] = v;
    }
    inv
}

/// Translation table from `a`'s palette ids to `b`'s, matched by name.
/// `None` entries are colors of `a` that `b` does not declare.
fn palette_translation(a: &ColoredBigraph, b: &ColoredBigraph) -> Vec<Option<u32>> {
    a.coloring()
        .palette()
        .iter()
        .map(|name| {
            b.coloring()
                .palette()
                .iter()
                .position(|other| other == name)
                .map(|i| i as u32)
        })
        .collect()
}

fn palettes_equal(a: &ColoredBigraph, b: &ColoredBigraph) -> bool {
    let mut pa: Vec<&String> = a.coloring().palette().iter().collect();
    let mut pb: Vec<&String> = b.coloring().palette().iter().collect();
    pa.sort();
    pb.sort();
    pa == pb
}

/// Sorted multiset of (translated) colors on the edges at `v`.
fn incident_colors(h: &ColoredBigraph, v: usize, translate: Option<&[Option<u32>]>) -> Vec<u32> {
    let g = h.graph();
    let mut out = Vec::new();
    for (e, &(x, y)) in g.edges().iter().enumerate() {
        if x == v || y == v {
            let c = h.edge_color(e);
            match translate {
                None => out.push(c),
                Some(t) => out.push(t[c as usize].unwrap_or(u32::MAX)),
            }
        }
    }
    out.sort_unstable();
    out
}

/// Backtracking search for bijections `a -> b` preserving parts, edges,
/// non-edges and colors, with some images pinned. Vertices are assigned in
/// index order, candidates in ascending order, so the output is
/// lexicographically sorted.
fn search_isomorphisms(
    a: &ColoredBigraph,
    b: &ColoredBigraph,
    pinned: &[(usize, usize)],
    limit: Option<usize>,
) -> Vec<Perm> {
    let (ga, gb) = (a.graph(), b.graph());
    if ga.v1_count() != gb.v1_count()
        || ga.v2_count() != gb.v2_count()
        || ga.edge_count() != gb.edge_count()
    {
        return Vec::new();
    }
    let translate = palette_translation(a, b);
    let n = ga.vertex_count();

    let mut forced: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    for &(v, w) in pinned {
        match forced[v] {
            Some(prev) if prev != w => return Vec::new(),
            Some(_) => continue,
            None => {
                if used[w] {
                    return Vec::new();
                }
                forced[v] = Some(w);
                used[w] = true;
            }
        }
    }

    // Static per-vertex candidate lists.
    let sig_b: Vec<(bool, usize, Vec<u32>)> = (0..n)
        .map(|w| (gb.is_left(w), gb.degree(w), incident_colors(b, w, None)))
        .collect();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(n);
    for v in 0..n {
        let sig = (
            ga.is_left(v),
            ga.degree(v),
            incident_colors(a, v, Some(&translate)),
        );
        let cands: Vec<usize> = match forced[v] {
            Some(w) => {
                if sig_b[w] == sig {
                    vec![w]
                } else {
                    return Vec::new();
                }
            }
            None => (0..n).filter(|&w| sig_b[w] == sig).collect(),
        };
        if cands.is_empty() {
            return Vec::new();
        }
        candidates.push(cands);
    }

    let mut map: Vec<usize> = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    let mut found = Vec::new();
    backtrack_iso(
        a,
        b,
        &translate,
        &candidates,
        0,
        &mut map,
        &mut taken,
        &mut found,
        limit,
    );
    found
}

#[allow(clippy::too_many_arguments)]
fn backtrack_iso(
    a: &ColoredBigraph,
    b: &ColoredBigraph,
    translate: &[Option<u32>],
    candidates: &[Vec<usize>],
    v: usize,
    map: &mut Vec<usize>,
    taken: &mut Vec<bool>,
    found: &mut Vec<Perm>,
    limit: Option<usize>,
) {
    let n = a.graph().vertex_count();
    if v == n {
        found.push(map.clone());
        return;
    }
    'next: for &w in &candidates[v] {
        if taken[w] {
            continue;
        }
        if let Some(l) = limit {
            if found.len() >= l {
                return;
            }
        }
        // Check edges, non-edges and colors against the assigned prefix.
        let (ga, gb) = (a.graph(), b.graph());
        for u in 0..v {
            let (p, q) = if ga.is_left(v) && !ga.is_left(u) {
                (v, u)
            } else if ga.is_left(u) && !ga.is_left(v) {
                (u, v)
            } else {
                continue;
            };
            let (pi, qi) = if p == v { (w, map[q]) } else { (map[p], w) };
            match (ga.edge_index(p, q), gb.edge_index(pi, qi)) {
                (None, None) => {}
                (Some(ea), Some(eb)) => {
                    if translate[a.edge_color(ea) as usize] != Some(b.edge_color(eb)) {
                        continue 'next;
                    }
                }
                _ => continue 'next,
            }
        }
        map[v] = w;
        taken[w] = true;
        backtrack_iso(a, b, translate, candidates, v + 1, map, taken, found, limit);
        map[v] = usize::MAX;
        taken[w] = false;
        if let Some(l) = limit {
            if found.len() >= l {
                return;
            }
        }
    }
}

/// All automorphisms of a colored bigraph, in lexicographic order.
pub fn automorphisms(h: &ColoredBigraph) -> Vec<Perm> {
    search_isomorphisms(h, h, &[], None)
}

/// All part-preserving automorphisms of a plain bigraph.
pub fn bigraph_automorphisms(g: &Bigraph) -> Vec<Perm> {
    automorphisms(&ColoredBigraph::monochromatic(g.clone()))
}

/// All automorphisms of a flag (they fix every labeled vertex).
pub fn flag_automorphisms(f: &Flag) -> Vec<Perm> {
    let pinned: Vec<(usize, usize)> = f.theta().iter().map(|&v| (v, v)).collect();
    search_isomorphisms(f.host(), f.host(), &pinned, None)
}

/// One isomorphism of colored bigraphs, if any. Palette mismatch is
/// reported separately from plain non-isomorphism.
pub fn isomorphism(a: &ColoredBigraph, b: &ColoredBigraph) -> Result<Option<Perm>> {
    if !palettes_equal(a, b) {
        return Err(Error::PaletteMismatch);
    }
    Ok(search_isomorphisms(a, b, &[], Some(1)).into_iter().next())
}

/// All isomorphisms of colored bigraphs.
pub fn all_isomorphisms(a: &ColoredBigraph, b: &ColoredBigraph) -> Result<Vec<Perm>> {
    if !palettes_equal(a, b) {
        return Err(Error::PaletteMismatch);
    }
    Ok(search_isomorphisms(a, b, &[], None))
}

/// The first element of `k` that is an isomorphism from `a` to `b`.
///
/// The host graphs must coincide; this is the restricted witness search
/// used by the stability notions.
pub fn isomorphism_within(
    a: &ColoredBigraph,
    b: &ColoredBigraph,
    k: &[Perm],
) -> Result<Option<Perm>> {
    if a.graph() != b.graph() {
        return Err(Error::HostMismatch);
    }
    if !palettes_equal(a, b) {
        return Err(Error::PaletteMismatch);
    }
    for g in k {
        if !a.graph().is_automorphism_map(g) {
            return Err(Error::NotAnAutomorphism);
        }
        if is_colored_isomorphism(a, b, g) {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

/// One flag isomorphism, if any.
pub fn flag_isomorphism(f1: &Flag, f2: &Flag) -> Result<Option<Perm>> {
    Ok(all_flag_isomorphisms_limited(f1, f2, Some(1))?.into_iter().next())
}

/// All flag isomorphisms.
pub fn all_flag_isomorphisms(f1: &Flag, f2: &Flag) -> Result<Vec<Perm>> {
    all_flag_isomorphisms_limited(f1, f2, None)
}

fn all_flag_isomorphisms_limited(
    f1: &Flag,
    f2: &Flag,
    limit: Option<usize>,
) -> Result<Vec<Perm>> {
    if !palettes_equal(f1.host(), f2.host()) {
        return Err(Error::PaletteMismatch);
    }
    if f1.k() != f2.k() {
        return Ok(Vec::new());
    }
    let pinned: Vec<(usize, usize)> = f1
        .theta()
        .iter()
        .zip(f2.theta())
        .map(|(&v, &w)| (v, w))
        .collect();
    Ok(search_isomorphisms(f1.host(), f2.host(), &pinned, limit))
}

/// Definitional check that `p` is an isomorphism from `a` to `b`:
/// part-preserving bijection, edges to edges, non-edges to non-edges,
/// colors preserved by name. Independent of the search code paths.
pub fn is_colored_isomorphism(a: &ColoredBigraph, b: &ColoredBigraph, p: &[usize]) -> bool {
    let (ga, gb) = (a.graph(), b.graph());
    let n = ga.vertex_count();
    if p.len() != n || gb.vertex_count() != n || ga.v1_count() != gb.v1_count() {
        return false;
    }
    let mut seen = vec![false; n];
    for v in 0..n {
        let w = p[v];
        if w >= n || seen[w] || ga.is_left(v) != gb.is_left(w) {
            return false;
        }
        seen[w] = true;
    }
    for u in 0..ga.v1_count() {
        for w in ga.v1_count()..n {
            match (ga.edge_index(u, w), gb.edge_index(p[u], p[w])) {
                (None, None) => {}
                (Some(ea), Some(eb)) => {
                    let ca = a.coloring().color_name(a.edge_color(ea));
                    let cb = b.coloring().color_name(b.edge_color(eb));
                    if ca != cb {
                        return false;
                    }
                }
                _ => return false,
            }
        }
    }
    true
}

/// Definitional check that `p` is a flag isomorphism from `f1` to `f2`.
pub fn is_flag_isomorphism(f1: &Flag, f2: &Flag, p: &[usize]) -> bool {
    if f1.k() != f2.k() {
        return false;
    }
    if f1
        .theta()
        .iter()
        .zip(f2.theta())
        .any(|(&v, &w)| p.get(v) != Some(&w))
    {
        return false;
    }
    is_colored_isomorphism(f1.host(), f2.host(), p)
}

/// Number of flag homomorphisms from `f1` to `f2`: part-, color- and
/// label-preserving maps sending edges to edges, with non-edges
/// unconstrained.
pub fn hom_count(f1: &Flag, f2: &Flag) -> u64 {
    if f1.k() != f2.k() {
        return 0;
    }
    let (ga, gb) = (f1.graph(), f2.graph());
    let translate = palette_translation(f1.host(), f2.host());
    // Any edge colored outside the target palette admits no image.
    if ga
        .edges()
        .iter()
        .enumerate()
        .any(|(e, _)| translate[f1.host().edge_color(e) as usize].is_none())
    {
        return 0;
    }
    let n = ga.vertex_count();
    let mut map: Vec<usize> = vec![usize::MAX; n];
    for (&v, &w) in f1.theta().iter().zip(f2.theta()) {
        if ga.is_left(v) != gb.is_left(w) {
            return 0;
        }
        map[v] = w;
    }
    // Adjacency of each vertex to smaller-index vertices, precomputed.
    let mut count = 0u64;
    count_homs(f1, f2, &translate, 0, &mut map, &mut count);
    count
}

fn count_homs(
    f1: &Flag,
    f2: &Flag,
    translate: &[Option<u32>],
    v: usize,
    map: &mut Vec<usize>,
    count: &mut u64,
) {
    let (ga, gb) = (f1.graph(), f2.graph());
    let n = ga.vertex_count();
    if v == n {
        *count += 1;
        return;
    }
    if map[v] != usize::MAX {
        if hom_prefix_ok(f1, f2, translate, v, map) {
            count_homs(f1, f2, translate, v + 1, map, count);
        }
        return;
    }
    let range = if ga.is_left(v) {
        0..gb.v1_count()
    } else {
        gb.v1_count()..gb.vertex_count()
    };
    for w in range {
        map[v] = w;
        if hom_prefix_ok(f1, f2, translate, v, map) {
            count_homs(f1, f2, translate, v + 1, map, count);
        }
    }
    map[v] = usize::MAX;
}

/// Check the edges between `v` and assigned vertices `u <= v`.
fn hom_prefix_ok(
    f1: &Flag,
    f2: &Flag,
    translate: &[Option<u32>],
    v: usize,
    map: &[usize],
) -> bool {
    let (ga, gb) = (f1.graph(), f2.graph());
    for u in 0..=v {
        if map[u] == usize::MAX {
            continue;
        }
        let (p, q) = if ga.is_left(v) && !ga.is_left(u) {
            (v, u)
        } else if ga.is_left(u) && !ga.is_left(v) {
            (u, v)
        } else {
            continue;
        };
        if let Some(ea) = ga.edge_index(p, q) {
            match gb.edge_index(map[p], map[q]) {
                Some(eb) => {
                    if translate[f1.host().edge_color(ea) as usize]
                        != Some(f2.host().edge_color(eb))
                    {
                        return false;
                    }
                }
                None => return false,
            }
        }
    }
    true
}

/// Homomorphism count between colored bigraphs (no labels).
pub fn colored_hom_count(a: &ColoredBigraph, b: &ColoredBigraph) -> u64 {
    hom_count(&Flag::unlabeled(a.clone()), &Flag::unlabeled(b.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::coloring::Coloring;
    use itertools::Itertools;

    /// Brute-force oracle: all part-preserving bijections preserving edges,
    /// non-edges and colors, by enumerating both part permutations.
    fn automorphism_oracle(h: &ColoredBigraph) -> Vec<Perm> {
        let g = h.graph();
        let (n1, n) = (g.v1_count(), g.vertex_count());
        let mut out = Vec::new();
        for left in (0..n1).permutations(n1) {
            for right in (n1..n).permutations(n - n1) {
                let p: Perm = left.iter().chain(right.iter()).copied().collect();
                if is_colored_isomorphism(h, h, &p) {
                    out.push(p);
                }
            }
        }
        out.sort();
        out
    }

    #[test]
    fn aut_k12_order_two() {
        let h = ColoredBigraph::monochromatic(catalog::star(2).unwrap());
        let auts = automorphisms(&h);
        assert_eq!(auts, automorphism_oracle(&h));
        assert_eq!(auts.len(), 2);
    }

    #[test]
    fn aut_c6_order_six() {
        let h = ColoredBigraph::monochromatic(catalog::even_cycle(3).unwrap());
        let auts = automorphisms(&h);
        assert_eq!(auts, automorphism_oracle(&h));
        assert_eq!(auts.len(), 6);
    }

    #[test]
    fn aut_rainbow_c6_trivial() {
        let h = ColoredBigraph::rainbow(catalog::even_cycle(3).unwrap());
        let auts = automorphisms(&h);
        assert_eq!(auts, vec![identity(6)]);
    }

    #[test]
    fn iso_identity_case() {
        let h = ColoredBigraph::monochromatic(catalog::even_cycle(2).unwrap());
        let w = isomorphism(&h, &h).unwrap().unwrap();
        assert!(is_colored_isomorphism(&h, &h, &w));
    }

    #[test]
    fn iso_rotated_coloring() {
        let g = catalog::even_cycle(3).unwrap();
        let c = Coloring::from_ids(2, vec![0, 0, 1, 0, 1, 1]).unwrap();
        let a = ColoredBigraph::new(g.clone(), c.clone()).unwrap();
        // Apply a nontrivial automorphism to the coloring.
        let rho = &bigraph_automorphisms(&g)[1];
        let colors: Vec<u32> = (0..g.edge_count())
            .map(|e| c.colors()[g.map_edge(rho, e).unwrap()])
            .collect();
        let b = ColoredBigraph::new(g.clone(), c.with_colors(colors).unwrap()).unwrap();
        let w = isomorphism(&a, &b).unwrap().expect("relabeled coloring");
        assert!(is_colored_isomorphism(&a, &b, &w));
    }

    #[test]
    fn iso_distinguishes_class_sizes() {
        let g = catalog::even_cycle(3).unwrap();
        let a = ColoredBigraph::new(
            g.clone(),
            Coloring::from_ids(2, vec![0, 0, 0, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        let b = ColoredBigraph::new(
            g.clone(),
            Coloring::from_ids(2, vec![0, 0, 0, 1, 1, 1]).unwrap(),
        )
        .unwrap();
        assert_eq!(isomorphism(&a, &b).unwrap(), None);
    }

    #[test]
    fn iso_palette_mismatch_is_distinct() {
        let g = catalog::star(1).unwrap();
        let a = ColoredBigraph::new(g.clone(), Coloring::monochromatic(1, "x")).unwrap();
        let b = ColoredBigraph::new(g, Coloring::monochromatic(1, "y")).unwrap();
        assert_eq!(isomorphism(&a, &b), Err(Error::PaletteMismatch));
    }

    #[test]
    fn iso_witnesses_compose_to_automorphisms() {
        let g = catalog::even_cycle(2).unwrap();
        let c = Coloring::from_ids(2, vec![0, 1, 1, 0]).unwrap();
        let a = ColoredBigraph::new(g.clone(), c).unwrap();
        let swapped = Coloring::from_ids(2, vec![1, 0, 0, 1]).unwrap();
        let b = ColoredBigraph::new(g, swapped).unwrap();
        // Same class sizes but different literal colorings.
        let fwd = isomorphism(&a, &b).unwrap();
        let back = isomorphism(&b, &a).unwrap();
        assert_eq!(fwd.is_some(), back.is_some());
        if let (Some(f), Some(g_)) = (fwd, back) {
            let round = compose(&g_, &f);
            assert!(is_colored_isomorphism(&a, &a, &round));
        }
    }

    // Oracle: exhaustive enumeration of all maps.
    fn hom_count_oracle(f1: &Flag, f2: &Flag) -> u64 {
        let (ga, gb) = (f1.graph(), f2.graph());
        if f1.k() != f2.k() {
            return 0;
        }
        let n = ga.vertex_count();
        let mut total = 0;
        let choices: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                if ga.is_left(v) {
                    (0..gb.v1_count()).collect()
                } else {
                    (gb.v1_count()..gb.vertex_count()).collect()
                }
            })
            .collect();
        for assignment in choices.into_iter().multi_cartesian_product() {
            let label_ok = f1
                .theta()
                .iter()
                .zip(f2.theta())
                .all(|(&v, &w)| assignment[v] == w);
            if !label_ok {
                continue;
            }
            let edges_ok = ga.edges().iter().enumerate().all(|(e, &(u, w))| {
                match gb.edge_index(assignment[u], assignment[w]) {
                    Some(eb) => {
                        f1.host().coloring().color_name(f1.host().edge_color(e))
                            == f2.host().coloring().color_name(f2.host().edge_color(eb))
                    }
                    None => false,
                }
            });
            if edges_ok {
                total += 1;
            }
        }
        total
    }

    #[test]
    fn hom_star_into_c6() {
        let f1 = Flag::unlabeled(ColoredBigraph::monochromatic(catalog::star(2).unwrap()));
        let f2 = Flag::unlabeled(ColoredBigraph::monochromatic(
            catalog::even_cycle(3).unwrap(),
        ));
        assert_eq!(hom_count(&f1, &f2), hom_count_oracle(&f1, &f2));
        assert_eq!(hom_count(&f1, &f2), 12);
    }

    #[test]
    fn hom_self_at_least_identity() {
        let g = catalog::even_cycle(2).unwrap();
        let f = Flag::new(ColoredBigraph::rainbow(g), vec![0, 2]).unwrap();
        assert!(hom_count(&f, &f) >= 1);
    }

    #[test]
    fn hom_edge_into_edgeless_is_zero() {
        let edge = Flag::unlabeled(ColoredBigraph::monochromatic(catalog::star(1).unwrap()));
        let edgeless =
            Flag::unlabeled(ColoredBigraph::monochromatic(
                Bigraph::from_parts(1, 1, &[]).unwrap(),
            ));
        assert_eq!(hom_count(&edge, &edgeless), 0);
    }

    #[test]
    fn hom_multiplicative_over_source_components() {
        // Source: disjoint union of an edge and a path with two edges.
        let m = Bigraph::from_parts(2, 3, &[(0, 0), (1, 1), (1, 2)]).unwrap();
        let split_a = Bigraph::from_parts(1, 1, &[(0, 0)]).unwrap();
        let split_b = Bigraph::from_parts(1, 2, &[(0, 0), (0, 1)]).unwrap();
        let target = ColoredBigraph::monochromatic(catalog::even_cycle(3).unwrap());
        let whole = Flag::unlabeled(ColoredBigraph::monochromatic(m));
        let fa = Flag::unlabeled(ColoredBigraph::monochromatic(split_a));
        let fb = Flag::unlabeled(ColoredBigraph::monochromatic(split_b));
        let ft = Flag::unlabeled(target);
        assert_eq!(
            hom_count(&whole, &ft),
            hom_count(&fa, &ft) * hom_count(&fb, &ft)
        );
    }

    #[test]
    fn flag_homs_respect_labels() {
        let g = catalog::star(2).unwrap();
        let mono = ColoredBigraph::monochromatic(g);
        let f1 = Flag::new(mono.clone(), vec![1]).unwrap();
        // Hom from the labeled star to itself: the center is forced, the
        // labeled leaf is pinned, the other leaf has 2 choices.
        assert_eq!(hom_count(&f1, &f1), hom_count_oracle(&f1, &f1));
        assert_eq!(hom_count(&f1, &f1), 2);
    }

    #[test]
    fn flag_automorphisms_fix_labels() {
        let g = catalog::even_cycle(3).unwrap();
        let f = Flag::new(ColoredBigraph::monochromatic(g), vec![0]).unwrap();
        let auts = flag_automorphisms(&f);
        // Fixing u1 of the 6-cycle leaves the identity and one reflection.
        assert_eq!(auts.len(), 2);
        assert!(auts.iter().all(|p| p[0] == 0));
    }
}
