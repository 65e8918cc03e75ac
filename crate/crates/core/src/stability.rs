//! Fold-stability in its plain, strong, symmetric and left-symmetric
//! variants, the equivalence of the three obstruction notions, and the
//! consistency harnesses that cross-check the equivalent characterizations
//! of cut-percolation and left-cut-percolation.

use std::collections::{BTreeMap, BTreeSet};

use crate::bigraph::Bigraph;
use crate::coloring::{tensor, ColorVec, ColoredBigraph, Coloring, LeftColoring};
use crate::error::{Error, Result};
use crate::fold::{self, FoldSet, Side};
use crate::iso::{self, Perm};
use crate::percolation::{
    self, is_absorbing, is_cut_percolating, is_left_cut_percolating, is_maximal,
    monochromatic_set, reach_set, reaches, FoldingProblem,
};

/// Inputs shared by all stability checks: host, coloring, the subgroup `K`
/// the witnesses must come from, the folds to stabilize against, and the
/// pool the inverse folds may come from.
#[derive(Debug, Clone, Copy)]
pub struct StabilityQuery<'a> {
    pub graph: &'a Bigraph,
    pub coloring: &'a Coloring,
    pub group: &'a [Perm],
    pub allowed: &'a FoldSet,
    pub inverse_pool: &'a FoldSet,
}

/// Outcome of the plain fold-stability check.
#[derive(Debug, Clone)]
pub struct FoldStabilityReport {
    pub stable: bool,
    /// Per allowed fold, the witness `g ∈ K` taking `(G, c)` to
    /// `(G, c ∘ f_L)`.
    pub witnesses: Vec<Option<Perm>>,
}

/// Outcome of the strong fold-stability check.
#[derive(Debug, Clone)]
pub struct StrongStabilityReport {
    pub stable: bool,
    pub plain: FoldStabilityReport,
    /// Per allowed fold, the index in the inverse pool of a fold `(h, L)`
    /// with `h` color-preserving and `Fix(h) = Fix(f)`.
    pub inverse_witnesses: Vec<Option<usize>>,
}

/// Witnesses per ordered color pair: the automorphism and the full color
/// permutation it induces.
pub type SigmaWitnesses = BTreeMap<(u32, u32), Option<(Perm, Vec<u32>)>>;

/// Outcome of the symmetric fold-stability check.
#[derive(Debug, Clone)]
pub struct SymmetricStabilityReport {
    pub stable: bool,
    pub strong: StrongStabilityReport,
    /// Per ordered pair of image colors `(i, j)`: a witness `g ∈ K` and the
    /// color permutation `σ` with `σ(i) = j` and `g: (G,c) → (G,σ∘c)`.
    pub color_witnesses: SigmaWitnesses,
}

/// Outcome of the left-symmetric fold-stability check on `ℓ ⊗ c`.
#[derive(Debug, Clone)]
pub struct LeftSymmetricStabilityReport {
    pub stable: bool,
    pub strong: StrongStabilityReport,
    /// Per ordered pair of left colors `(i, j)`: a witness `g ∈ K` and the
    /// permutation `σ` of left colors with `σ(i) = j` and
    /// `g: (G, ℓ⊗c) → (G, (σ∘ℓ)⊗c)`.
    pub color_witnesses: SigmaWitnesses,
}

/// `c ∘ g` for an automorphism `g`, as a raw vector.
fn compose_with_perm(graph: &Bigraph, cv: &[u32], g: &Perm) -> ColorVec {
    (0..graph.edge_count())
        .map(|e| cv[graph.map_edge(g, e).expect("automorphism maps edges")])
        .collect()
}

/// Is `c` fold-stable: for every allowed fold, some `g ∈ K` is an
/// isomorphism from `(G, c)` to `(G, c ∘ f_L)`.
pub fn is_fold_stable(q: &StabilityQuery) -> Result<FoldStabilityReport> {
    let source = ColoredBigraph::new(q.graph.clone(), q.coloring.clone())?;
    let mut witnesses = Vec::with_capacity(q.allowed.len());
    for fold in q.allowed.iter() {
        let folded = percolation::apply_fold(q.graph, q.coloring, fold, Side::Left)?;
        let target = ColoredBigraph::new(q.graph.clone(), folded)?;
        witnesses.push(iso::isomorphism_within(&source, &target, q.group)?);
    }
    Ok(FoldStabilityReport {
        stable: witnesses.iter().all(Option::is_some),
        witnesses,
    })
}

/// Is `c` strongly fold-stable: fold-stable, and every allowed fold has an
/// inverse fold `(h, L)` in the pool with `h ∈ Aut((G, c))` and
/// `Fix(h) = Fix(f)`. Each inverse witness is re-verified through the
/// identity `c ∘ f_L ∘ h_L = c`.
pub fn is_strongly_fold_stable(q: &StabilityQuery) -> Result<StrongStabilityReport> {
    let plain = is_fold_stable(q)?;
    let host = ColoredBigraph::new(q.graph.clone(), q.coloring.clone())?;
    let mut inverse_witnesses = Vec::with_capacity(q.allowed.len());
    for fold in q.allowed.iter() {
        let found = q.inverse_pool.iter().position(|h| {
            h.side() == fold.side() && h.fix() == fold.fix() && h.preserves_coloring(&host)
        });
        if let Some(idx) = found {
            let h = q.inverse_pool.get(idx);
            let f_edges = fold.edge_map(q.graph, Side::Left);
            let h_edges = h.edge_map(q.graph, Side::Left);
            let cv = q.coloring.colors();
            let undone = (0..q.graph.edge_count()).all(|e| cv[f_edges[h_edges[e]]] == cv[e]);
            if !undone {
                return Err(Error::Internal(
                    "inverse fold fails the undo identity c ∘ f_L ∘ h_L = c".into(),
                ));
            }
        }
        inverse_witnesses.push(found);
    }
    Ok(StrongStabilityReport {
        stable: plain.stable && inverse_witnesses.iter().all(Option::is_some),
        plain,
        inverse_witnesses,
    })
}

/// The color permutation forced by `g` when `g: (G,c) → (G,σ∘c)`, if
/// consistent: `σ(c(g(e))) = c(e)` on the image colors, identity outside.
fn induced_color_permutation(
    graph: &Bigraph,
    cv: &[u32],
    g: &Perm,
    palette: usize,
) -> Option<Vec<u32>> {
    let composed = compose_with_perm(graph, cv, g);
    let mut sigma: Vec<Option<u32>> = vec![None; palette];
    for e in 0..graph.edge_count() {
        let from = composed[e];
        let to = cv[e];
        match sigma[from as usize] {
            None => sigma[from as usize] = Some(to),
            Some(prev) if prev != to => return None,
            _ => {}
        }
    }
    let assigned: Vec<u32> = sigma.iter().flatten().copied().collect();
    let distinct: BTreeSet<u32> = assigned.iter().copied().collect();
    if distinct.len() != assigned.len() {
        return None;
    }
    // Identity extension outside the constrained colors; sound because the
    // constrained colors map within the coloring's image.
    let full: Vec<u32> = (0..palette as u32)
        .map(|x| sigma[x as usize].unwrap_or(x))
        .collect();
    let as_set: BTreeSet<u32> = full.iter().copied().collect();
    if as_set.len() != palette {
        return None;
    }
    Some(full)
}

/// Is `c` symmetrically fold-stable: strongly fold-stable, and every
/// ordered pair of image colors is witnessed by some `g ∈ K` whose induced
/// color permutation sends the first to the second.
pub fn is_symmetrically_fold_stable(q: &StabilityQuery) -> Result<SymmetricStabilityReport> {
    let strong = is_strongly_fold_stable(q)?;
    for g in q.group {
        if !q.graph.is_automorphism_map(g) {
            return Err(Error::NotAnAutomorphism);
        }
    }
    let cv = q.coloring.colors();
    let palette = q.coloring.palette().len();
    let image: Vec<u32> = q.coloring.image().into_iter().collect();
    let mut color_witnesses = BTreeMap::new();
    for &i in &image {
        for &j in &image {
            let mut witness = None;
            for g in q.group {
                if let Some(sigma) = induced_color_permutation(q.graph, cv, g, palette) {
                    if sigma[i as usize] == j {
                        debug_assert!(verify_sigma_witness(q.graph, q.coloring, g, &sigma));
                        witness = Some((g.clone(), sigma));
                        break;
                    }
                }
            }
            color_witnesses.insert((i, j), witness);
        }
    }
    Ok(SymmetricStabilityReport {
        stable: strong.stable && color_witnesses.values().all(Option::is_some),
        strong,
        color_witnesses,
    })
}

/// Definitional replay: is `g` an isomorphism `(G,c) → (G,σ∘c)`?
fn verify_sigma_witness(graph: &Bigraph, coloring: &Coloring, g: &Perm, sigma: &[u32]) -> bool {
    let recolored: ColorVec = coloring
        .colors()
        .iter()
        .map(|&c| sigma[c as usize])
        .collect();
    let a = ColoredBigraph::new(graph.clone(), coloring.clone()).expect("valid host");
    let b = ColoredBigraph::new(
        graph.clone(),
        coloring.with_colors(recolored).expect("same palette"),
    )
    .expect("valid host");
    iso::is_colored_isomorphism(&a, &b, g)
}

/// Is `ℓ ⊗ c` left-symmetrically fold-stable: strongly fold-stable, and
/// every ordered pair of left colors `(i, j)` is witnessed by `g ∈ K` and a
/// permutation `σ` of the left palette with `σ(i) = j` and
/// `g: (G, ℓ⊗c) → (G, (σ∘ℓ)⊗c)`.
pub fn is_left_symmetrically_fold_stable(
    graph: &Bigraph,
    left: &LeftColoring,
    coloring: &Coloring,
    group: &[Perm],
    allowed: &FoldSet,
    inverse_pool: &FoldSet,
) -> Result<LeftSymmetricStabilityReport> {
    let product = tensor(graph, left, coloring)?;
    let q = StabilityQuery {
        graph,
        coloring: &product,
        group,
        allowed,
        inverse_pool,
    };
    let strong = is_strongly_fold_stable(&q)?;
    for g in group {
        if !graph.is_automorphism_map(g) {
            return Err(Error::NotAnAutomorphism);
        }
    }
    let image: Vec<u32> = left.image().into_iter().collect();
    let lp = left.palette().len();
    let mut color_witnesses = BTreeMap::new();
    for &i in &image {
        for &j in &image {
            let mut witness = None;
            'search: for g in group {
                // The edge-coloring part must be preserved outright; the
                // left part pins σ on the left colors seen at edge
                // endpoints.
                let mut sigma: Vec<Option<u32>> = vec![None; lp];
                for (e, &(u, _)) in graph.edges().iter().enumerate() {
                    let img = graph.map_edge(g, e).expect("automorphism maps edges");
                    if coloring.colors()[img] != coloring.colors()[e] {
                        continue 'search;
                    }
                    let from = left.colors()[g[u]];
                    let to = left.colors()[u];
                    match sigma[from as usize] {
                        None => sigma[from as usize] = Some(to),
                        Some(prev) if prev != to => continue 'search,
                        _ => {}
                    }
                }
                // Impose σ(i) = j and close up to a permutation.
                match sigma[i as usize] {
                    Some(v) if v != j => continue 'search,
                    None => sigma[i as usize] = Some(j),
                    _ => {}
                }
                let assigned: Vec<u32> = sigma.iter().flatten().copied().collect();
                let distinct: BTreeSet<u32> = assigned.iter().copied().collect();
                if distinct.len() != assigned.len() {
                    continue 'search;
                }
                let mut free_targets: Vec<u32> = (0..lp as u32)
                    .filter(|t| !distinct.contains(t))
                    .collect();
                free_targets.reverse();
                let full: Vec<u32> = sigma
                    .iter()
                    .map(|s| match s {
                        Some(v) => *v,
                        None => free_targets.pop().expect("counts match"),
                    })
                    .collect();
                // Replay the definition before accepting the witness.
                let relabeled: Vec<u32> =
                    left.colors().iter().map(|&c| full[c as usize]).collect();
                let sigma_left = LeftColoring::new(left.palette().to_vec(), relabeled)?;
                let target = tensor(graph, &sigma_left, coloring)?;
                let a = ColoredBigraph::new(graph.clone(), product.clone())?;
                let b = ColoredBigraph::new(graph.clone(), target)?;
                if iso::is_colored_isomorphism(&a, &b, g) {
                    witness = Some((g.clone(), full));
                    break;
                }
            }
            color_witnesses.insert((i, j), witness);
        }
    }
    Ok(LeftSymmetricStabilityReport {
        stable: strong.stable && color_witnesses.values().all(Option::is_some),
        strong,
        color_witnesses,
    })
}

/// All partitions of `{0..n}` with at most `max_blocks` blocks, as
/// restricted-growth vectors (entry = block index of element).
pub fn set_partitions(n: usize, max_blocks: usize) -> Vec<Vec<u32>> {
    fn rec(
        pos: usize,
        n: usize,
        max_blocks: usize,
        used: u32,
        current: &mut Vec<u32>,
        out: &mut Vec<Vec<u32>>,
    ) {
        if pos == n {
            out.push(current.clone());
            return;
        }
        for b in 0..=used.min(max_blocks as u32 - 1) {
            current[pos] = b;
            let next_used = if b == used { used + 1 } else { used };
            rec(pos + 1, n, max_blocks, next_used, current, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    if max_blocks == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    rec(0, n, max_blocks, 0, &mut current, &mut out);
    out
}

/// The kernel partition of a coloring: colors renumbered by first
/// occurrence.
pub fn kernel(cv: &[u32]) -> Vec<u32> {
    let mut seen: BTreeMap<u32, u32> = BTreeMap::new();
    cv.iter()
        .map(|&c| {
            let next = seen.len() as u32;
            *seen.entry(c).or_insert(next)
        })
        .collect()
}

/// Verdicts for one edge partition in the obstruction-equivalence scan.
#[derive(Debug, Clone)]
pub struct PartitionVerdicts {
    pub partition: Vec<u32>,
    pub fold_stable: bool,
    pub strongly_fold_stable: bool,
    pub maximal: bool,
    /// Only set when the rainbow-reachability hypothesis applies to this
    /// partition and the fold group acts edge-transitively.
    pub symmetric: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub partitions: Vec<PartitionVerdicts>,
    /// Indices of partitions whose verdicts disagree.
    pub disagreements: Vec<usize>,
    pub consistent: bool,
    pub edge_transitive: bool,
}

/// Scan all edge colorings up to color renaming and check that
/// fold-stability, strong fold-stability and reachability-maximality
/// agree; where a rainbow coloring reaches the partition and the fold
/// group is edge-transitive, symmetric fold-stability must agree too.
pub fn check_obstruction_equivalence(
    graph: &Bigraph,
    folds: &FoldSet,
    palette_size: usize,
    budget: usize,
) -> Result<ObstructionReport> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let auts = iso::bigraph_automorphisms(graph);
    if !folds.is_invariant_under(graph, &auts)? {
        return Err(Error::NotAutInvariant);
    }
    let e = graph.edge_count();
    if palette_size == 0 && e > 0 {
        return Err(Error::PaletteTooSmall { need: 1, have: 0 });
    }

    // Kernels of colorings reachable from a rainbow coloring: a partition
    // is rainbow-reachable (up to renaming) iff its kernel appears here.
    let group = fold::fold_group(graph, folds);
    let edge_transitive = fold::is_edge_transitive(graph, &group)?;
    let rainbow: ColorVec = (0..e as u32).collect();
    let rainbow_kernels: BTreeSet<Vec<u32>> = reach_set(graph, folds, &rainbow, budget)?
        .nodes
        .iter()
        .map(|n| kernel(n))
        .collect();

    let mut partitions = Vec::new();
    let mut disagreements = Vec::new();
    for partition in set_partitions(e, palette_size.max(1)) {
        let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
        let coloring = Coloring::from_ids(blocks, partition.clone())?;
        let q = StabilityQuery {
            graph,
            coloring: &coloring,
            group: &auts,
            allowed: folds,
            inverse_pool: folds,
        };
        let plain = is_fold_stable(&q)?;
        let strong = is_strongly_fold_stable(&q)?;
        let maximal = is_maximal(graph, folds, coloring.colors(), budget)?;
        let symmetric = if edge_transitive && rainbow_kernels.contains(&kernel(&partition)) {
            Some(is_symmetrically_fold_stable(&q)?.stable)
        } else {
            None
        };
        let agree = plain.stable == strong.stable
            && strong.stable == maximal
            && symmetric.is_none_or(|s| s == plain.stable);
        if !agree {
            disagreements.push(partitions.len());
        }
        partitions.push(PartitionVerdicts {
            partition,
            fold_stable: plain.stable,
            strongly_fold_stable: strong.stable,
            maximal,
            symmetric,
        });
    }
    Ok(ObstructionReport {
        consistent: disagreements.is_empty(),
        disagreements,
        partitions,
        edge_transitive,
    })
}

/// How an item of a theorem harness was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemMode {
    Computed,
    /// Logically certified from absorbing + reachability rather than by a
    /// numeric limit.
    CertifiedByConstruction,
    Skipped,
}

#[derive(Debug, Clone)]
pub struct ItemResult {
    pub id: &'static str,
    pub verdict: Option<bool>,
    pub mode: ItemMode,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub items: Vec<ItemResult>,
    /// All computed items share one boolean value and no anomaly was
    /// recorded.
    pub consistent: bool,
    /// The shared verdict, when consistent and at least one item computed.
    pub verdict: Option<bool>,
    /// Theorem-level contradictions (software bugs if nonempty).
    pub anomalies: Vec<String>,
    /// Transitivity of the fold-generated subgroup on edges (left vertices
    /// for the left-sided harness); exposed even when scans are skipped.
    pub transitivity: Option<bool>,
}

fn finish_report(
    items: Vec<ItemResult>,
    anomalies: Vec<String>,
    transitivity: Option<bool>,
) -> TheoremReport {
    let computed: Vec<bool> = items.iter().filter_map(|i| i.verdict).collect();
    let consistent = anomalies.is_empty()
        && (computed.is_empty() || computed.iter().all(|&v| v == computed[0]));
    TheoremReport {
        verdict: if consistent {
            computed.first().copied()
        } else {
            None
        },
        consistent,
        items,
        anomalies,
        transitivity,
    }
}

/// Maximality with an elementary shortcut: a non-monochromatic coloring
/// that reaches an objective whose whole forward orbit stays in the
/// objective set can never be maximal, because folding maps only shrink
/// the image of a coloring. Falls back to the full check otherwise.
fn is_maximal_hybrid(
    graph: &Bigraph,
    folds: &FoldSet,
    cv: &ColorVec,
    mono_like: &BTreeSet<ColorVec>,
    budget: usize,
) -> Result<bool> {
    if mono_like.contains(cv) {
        // Monochromatic-like states only reach monochromatic-like states.
        return is_maximal(graph, folds, cv, budget);
    }
    let problem = FoldingProblem::new(graph, folds, cv.clone(), mono_like.clone())?;
    if reaches(&problem, budget)?.is_some() {
        return Ok(false);
    }
    is_maximal(graph, folds, cv, budget)
}

/// Cross-check the equivalent characterizations of cut-percolation on a
/// finite connected bigraph with an automorphism-invariant fold set.
///
/// Items: (1) the subset search; (2) every coloring reaches the
/// monochromatic set; (3) a rainbow coloring does; (4)/(5) the percolation
/// variants, certified via absorbing + reachability; (6)/(7)/(8)
/// fold-stable / strongly fold-stable / maximal colorings are all
/// monochromatic; (9) symmetric fold-stability plus edge-transitivity
/// under the fold-generated subgroup. All computed items must agree.
pub fn verify_cutperc_theorem(
    graph: &Bigraph,
    folds: &FoldSet,
    palette_size: usize,
    budget: usize,
    skip_partition_scans: bool,
) -> Result<TheoremReport> {
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    let auts = iso::bigraph_automorphisms(graph);
    if !folds.is_invariant_under(graph, &auts)? {
        return Err(Error::NotAutInvariant);
    }
    let e = graph.edge_count();
    if palette_size < e {
        return Err(Error::PaletteTooSmall {
            need: e,
            have: palette_size,
        });
    }

    let mut items = Vec::new();
    let mut anomalies = Vec::new();

    // (1) Cut-percolation by subset search.
    let witness = is_cut_percolating(graph, folds, budget)?;
    items.push(ItemResult {
        id: "cut_percolating",
        verdict: Some(witness.is_some()),
        mode: ItemMode::Computed,
        detail: match &witness {
            Some(w) => format!("witness of length {}", w.steps.len()),
            None => "subset search exhausted".into(),
        },
    });

    let mono_for = |blocks: usize| monochromatic_set(blocks, e);

    // (2) Every coloring reaches the monochromatic set; scanning partitions
    // suffices because reachability into the monochromatic set is invariant
    // under renaming colors.
    if skip_partition_scans {
        items.push(ItemResult {
            id: "every_coloring_reaches_monochromatic",
            verdict: None,
            mode: ItemMode::Skipped,
            detail: "partition scan skipped".into(),
        });
    } else {
        let mut failing = None;
        for partition in set_partitions(e, palette_size) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let problem =
                FoldingProblem::new(graph, folds, partition.clone(), mono_for(blocks))?;
            if reaches(&problem, budget)?.is_none() {
                failing = Some(partition);
                break;
            }
        }
        items.push(ItemResult {
            id: "every_coloring_reaches_monochromatic",
            verdict: Some(failing.is_none()),
            mode: ItemMode::Computed,
            detail: match &failing {
                Some(p) => format!("stuck partition {p:?}"),
                None => "all partitions reach".into(),
            },
        });
    }

    // (3) A rainbow coloring reaches the monochromatic set.
    let rainbow: ColorVec = (0..e as u32).collect();
    let rainbow_problem = FoldingProblem::new(graph, folds, rainbow.clone(), mono_for(e.max(1)))?;
    let rainbow_reaches = reaches(&rainbow_problem, budget)?;
    items.push(ItemResult {
        id: "rainbow_reaches_monochromatic",
        verdict: Some(rainbow_reaches.is_some()),
        mode: ItemMode::Computed,
        detail: match &rainbow_reaches {
            Some(w) => format!("path of length {}", w.steps.len()),
            None => "rainbow coloring is stuck".into(),
        },
    });

    // (4) Every coloring percolates to the monochromatic set. A coloring
    // that cannot even reach settles the item negatively; when every
    // coloring reaches, the instances must in addition be absorbing (which
    // reachability of everything in fact forces), and the item is
    // certified by that construction.
    if skip_partition_scans {
        items.push(ItemResult {
            id: "every_coloring_percolates",
            verdict: None,
            mode: ItemMode::Skipped,
            detail: "partition scan skipped".into(),
        });
    } else {
        let mut verdict = Some(true);
        let mut detail = "absorbing + reachable for every partition".to_string();
        let mut stuck = None;
        for partition in set_partitions(e, palette_size) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let problem =
                FoldingProblem::new(graph, folds, partition.clone(), mono_for(blocks))?;
            if reaches(&problem, budget)?.is_none() {
                stuck = Some(partition);
                break;
            }
        }
        match stuck {
            Some(partition) => {
                verdict = Some(false);
                detail = format!("partition {partition:?} does not reach");
            }
            None => {
                for partition in set_partitions(e, palette_size) {
                    let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
                    let problem = FoldingProblem::new(
                        graph,
                        folds,
                        partition.clone(),
                        mono_for(blocks),
                    )?;
                    if !is_absorbing(&problem, budget)?.absorbing {
                        verdict = None;
                        detail = format!(
                            "every partition reaches, yet {partition:?} is not absorbing"
                        );
                        anomalies.push(format!("item every_coloring_percolates: {detail}"));
                        break;
                    }
                }
            }
        }
        items.push(ItemResult {
            id: "every_coloring_percolates",
            verdict,
            mode: ItemMode::CertifiedByConstruction,
            detail,
        });
    }

    // (5) A rainbow coloring percolates: certified the same way.
    {
        let (verdict, detail) = if rainbow_reaches.is_none() {
            (
                Some(false),
                "rainbow coloring does not even reach".to_string(),
            )
        } else if is_absorbing(&rainbow_problem, budget)?.absorbing {
            (
                Some(true),
                "rainbow instance is absorbing and reaches".to_string(),
            )
        } else {
            let d = "rainbow instance reaches but is not absorbing".to_string();
            anomalies.push(format!("item rainbow_percolates: {d}"));
            (None, d)
        };
        items.push(ItemResult {
            id: "rainbow_percolates",
            verdict,
            mode: ItemMode::CertifiedByConstruction,
            detail,
        });
    }

    // (6)-(8) stability and maximality scans.
    if skip_partition_scans {
        for id in [
            "fold_stable_implies_monochromatic",
            "strongly_fold_stable_implies_monochromatic",
            "maximal_implies_monochromatic",
        ] {
            items.push(ItemResult {
                id,
                verdict: None,
                mode: ItemMode::Skipped,
                detail: "partition scan skipped".into(),
            });
        }
    } else {
        let mut stable_cex = None;
        let mut strong_cex = None;
        let mut maximal_cex = None;
        for partition in set_partitions(e, palette_size) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            if blocks <= 1 {
                continue;
            }
            let coloring = Coloring::from_ids(blocks, partition.clone())?;
            let q = StabilityQuery {
                graph,
                coloring: &coloring,
                group: &auts,
                allowed: folds,
                inverse_pool: folds,
            };
            if stable_cex.is_none() && is_fold_stable(&q)?.stable {
                stable_cex = Some(partition.clone());
            }
            if strong_cex.is_none() && is_strongly_fold_stable(&q)?.stable {
                strong_cex = Some(partition.clone());
            }
            if maximal_cex.is_none()
                && is_maximal_hybrid(graph, folds, &partition, &mono_for(blocks), budget)?
            {
                maximal_cex = Some(partition.clone());
            }
        }
        for (id, cex) in [
            ("fold_stable_implies_monochromatic", stable_cex),
            ("strongly_fold_stable_implies_monochromatic", strong_cex),
            ("maximal_implies_monochromatic", maximal_cex),
        ] {
            items.push(ItemResult {
                id,
                verdict: Some(cex.is_none()),
                mode: ItemMode::Computed,
                detail: match cex {
                    Some(p) => format!("non-monochromatic counterexample {p:?}"),
                    None => "no non-monochromatic instance".into(),
                },
            });
        }
    }

    // (9) Edge-transitivity under the fold group plus the symmetric scan.
    let group = fold::fold_group(graph, folds);
    let transitive = fold::is_edge_transitive(graph, &group)?;
    if skip_partition_scans {
        items.push(ItemResult {
            id: "symmetric_and_edge_transitive",
            verdict: if transitive { None } else { Some(false) },
            mode: ItemMode::Skipped,
            detail: format!("edge-transitive: {transitive}; symmetric partition scan skipped"),
        });
    } else {
        let mut sym_cex = None;
        for partition in set_partitions(e, palette_size) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            if blocks <= 1 {
                continue;
            }
            let coloring = Coloring::from_ids(blocks, partition.clone())?;
            let q = StabilityQuery {
                graph,
                coloring: &coloring,
                group: &auts,
                allowed: folds,
                inverse_pool: folds,
            };
            if is_symmetrically_fold_stable(&q)?.stable {
                sym_cex = Some(partition);
                break;
            }
        }
        items.push(ItemResult {
            id: "symmetric_and_edge_transitive",
            verdict: Some(transitive && sym_cex.is_none()),
            mode: ItemMode::Computed,
            detail: format!(
                "edge-transitive: {transitive}; symmetric counterexample: {sym_cex:?}"
            ),
        });
    }

    Ok(finish_report(items, anomalies, Some(transitive)))
}

/// Cross-check the equivalent characterizations of left-cut-percolation of
/// a finite connected colored bigraph with a fold set invariant under the
/// colored automorphism group. Left colorings enter the reachability
/// machinery through their product with the fixed edge coloring.
pub fn verify_leftcutperc_theorem(
    h: &ColoredBigraph,
    folds: &FoldSet,
    palette_size: usize,
    budget: usize,
) -> Result<TheoremReport> {
    let graph = h.graph();
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    for f in folds.iter() {
        if !f.preserves_coloring(h) {
            return Err(Error::NotColorPreserving);
        }
    }
    let colored_auts = iso::automorphisms(h);
    if !folds.is_invariant_under(graph, &colored_auts)? {
        return Err(Error::NotAutInvariant);
    }
    let n1 = graph.v1_count();
    if palette_size < n1 {
        return Err(Error::PaletteTooSmall {
            need: n1,
            have: palette_size,
        });
    }

    let mut items = Vec::new();
    let mut anomalies = Vec::new();

    // (1) Left-cut-percolation by subset search.
    let witness = is_left_cut_percolating(h, folds, budget)?;
    items.push(ItemResult {
        id: "left_cut_percolating",
        verdict: Some(witness.is_some()),
        mode: ItemMode::Computed,
        detail: match &witness {
            Some(w) => format!("witness of length {}", w.steps.len()),
            None => "subset search exhausted".into(),
        },
    });

    // Product colorings over a left palette; the objective set is
    // ℳ = {ℓ' ⊗ c : ℓ' monochromatic over that palette}.
    let product_problem = |left: &LeftColoring| -> Result<(ColorVec, BTreeSet<ColorVec>)> {
        let lp = left.palette().len();
        let start = tensor(graph, left, h.coloring())?;
        let objectives: BTreeSet<ColorVec> = (0..lp)
            .map(|c| {
                let mono = LeftColoring::new(left.palette().to_vec(), vec![c as u32; n1])?;
                Ok(tensor(graph, &mono, h.coloring())?.colors().clone())
            })
            .collect::<Result<_>>()?;
        Ok((start.colors().clone(), objectives))
    };

    // (2) Every left coloring's product reaches ℳ.
    let mut failing = None;
    for partition in set_partitions(n1, palette_size) {
        let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
        let left = LeftColoring::from_ids(blocks, partition.clone())?;
        let (start, objectives) = product_problem(&left)?;
        let problem = FoldingProblem::new(graph, folds, start, objectives)?;
        if reaches(&problem, budget)?.is_none() {
            failing = Some(partition);
            break;
        }
    }
    items.push(ItemResult {
        id: "every_left_coloring_reaches_monochromatic",
        verdict: Some(failing.is_none()),
        mode: ItemMode::Computed,
        detail: match &failing {
            Some(p) => format!("stuck left partition {p:?}"),
            None => "all left partitions reach".into(),
        },
    });

    // (3) A rainbow left coloring's product reaches ℳ.
    let rainbow = LeftColoring::rainbow(n1);
    let (r_start, r_objectives) = product_problem(&rainbow)?;
    let rainbow_problem = FoldingProblem::new(graph, folds, r_start, r_objectives)?;
    let rainbow_reaches = reaches(&rainbow_problem, budget)?;
    items.push(ItemResult {
        id: "rainbow_left_reaches_monochromatic",
        verdict: Some(rainbow_reaches.is_some()),
        mode: ItemMode::Computed,
        detail: match &rainbow_reaches {
            Some(w) => format!("path of length {}", w.steps.len()),
            None => "rainbow left coloring is stuck".into(),
        },
    });

    // (4) Every left coloring percolates: a non-reaching left coloring
    // settles the item negatively; otherwise absorption certifies it.
    {
        let mut verdict = Some(true);
        let mut detail = "absorbing + reachable for every left partition".to_string();
        let mut stuck = None;
        for partition in set_partitions(n1, palette_size) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let left = LeftColoring::from_ids(blocks, partition.clone())?;
            let (start, objectives) = product_problem(&left)?;
            let problem = FoldingProblem::new(graph, folds, start, objectives)?;
            if reaches(&problem, budget)?.is_none() {
                stuck = Some(partition);
                break;
            }
        }
        match stuck {
            Some(partition) => {
                verdict = Some(false);
                detail = format!("left partition {partition:?} does not reach");
            }
            None => {
                for partition in set_partitions(n1, palette_size) {
                    let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
                    let left = LeftColoring::from_ids(blocks, partition.clone())?;
                    let (start, objectives) = product_problem(&left)?;
                    let problem = FoldingProblem::new(graph, folds, start, objectives)?;
                    if !is_absorbing(&problem, budget)?.absorbing {
                        verdict = None;
                        detail = format!(
                            "every left partition reaches, yet {partition:?} is not absorbing"
                        );
                        anomalies
                            .push(format!("item every_left_coloring_percolates: {detail}"));
                        break;
                    }
                }
            }
        }
        items.push(ItemResult {
            id: "every_left_coloring_percolates",
            verdict,
            mode: ItemMode::CertifiedByConstruction,
            detail,
        });
    }

    // (5) The rainbow left coloring percolates.
    {
        let (verdict, detail) = if rainbow_reaches.is_none() {
            (
                Some(false),
                "rainbow left coloring does not even reach".to_string(),
            )
        } else if is_absorbing(&rainbow_problem, budget)?.absorbing {
            (
                Some(true),
                "rainbow left instance is absorbing and reaches".to_string(),
            )
        } else {
            let d = "rainbow left instance reaches but is not absorbing".to_string();
            anomalies.push(format!("item rainbow_left_percolates: {d}"));
            (None, d)
        };
        items.push(ItemResult {
            id: "rainbow_left_percolates",
            verdict,
            mode: ItemMode::CertifiedByConstruction,
            detail,
        });
    }

    // (6)-(8): stability of ℓ ⊗ c with K = Aut((G, c)), plus maximality;
    // (9) needs the left-symmetric scan.
    let mut stable_cex = None;
    let mut strong_cex = None;
    let mut maximal_cex = None;
    let mut sym_cex = None;
    for partition in set_partitions(n1, palette_size) {
        let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
        if blocks <= 1 {
            continue;
        }
        let left = LeftColoring::from_ids(blocks, partition.clone())?;
        let product = tensor(graph, &left, h.coloring())?;
        let q = StabilityQuery {
            graph,
            coloring: &product,
            group: &colored_auts,
            allowed: folds,
            inverse_pool: folds,
        };
        if stable_cex.is_none() && is_fold_stable(&q)?.stable {
            stable_cex = Some(partition.clone());
        }
        if strong_cex.is_none() && is_strongly_fold_stable(&q)?.stable {
            strong_cex = Some(partition.clone());
        }
        let (start, objectives) = product_problem(&left)?;
        if maximal_cex.is_none() && is_maximal_hybrid(graph, folds, &start, &objectives, budget)? {
            maximal_cex = Some(partition.clone());
        }
        if sym_cex.is_none()
            && is_left_symmetrically_fold_stable(
                graph,
                &left,
                h.coloring(),
                &colored_auts,
                folds,
                folds,
            )?
            .stable
        {
            sym_cex = Some(partition.clone());
        }
    }
    for (id, cex) in [
        ("left_fold_stable_implies_monochromatic", stable_cex),
        (
            "left_strongly_fold_stable_implies_monochromatic",
            strong_cex,
        ),
        ("left_maximal_implies_monochromatic", maximal_cex),
    ] {
        items.push(ItemResult {
            id,
            verdict: Some(cex.is_none()),
            mode: ItemMode::Computed,
            detail: match cex {
                Some(p) => format!("non-monochromatic counterexample {p:?}"),
                None => "no non-monochromatic instance".into(),
            },
        });
    }

    // (9) Left-vertex-transitivity plus the left-symmetric scan.
    let group = fold::fold_group(graph, folds);
    let transitive = fold::is_left_vertex_transitive(graph, &group)?;
    items.push(ItemResult {
        id: "left_symmetric_and_left_vertex_transitive",
        verdict: Some(transitive && sym_cex.is_none()),
        mode: ItemMode::Computed,
        detail: format!(
            "left-vertex-transitive: {transitive}; left-symmetric counterexample: {sym_cex:?}"
        ),
    });

    Ok(finish_report(items, anomalies, Some(transitive)))
}
