//! Property and lemma-level invariants beyond the acceptance criteria:
//! group axioms, preorder structure, stability propagation along
//! reachability, sink-class structure, and the core-isomorphism versus
//! density-table equivalence.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use cutperc_core::catalog;
use cutperc_core::coloring::{ColorVec, Coloring};
use cutperc_core::density::{core_iso_decide, flag_density, random_family, BigraphonFamily};
use cutperc_core::fold::{enumerate_folds, Side};
use cutperc_core::iso;
use cutperc_core::percolation::{
    is_cut_percolating, monochromatic_set, reach_set, reachability_digraph, reaches,
    FoldingProblem, DEFAULT_BUDGET,
};
use cutperc_core::stability::{
    is_fold_stable, is_strongly_fold_stable, set_partitions, StabilityQuery,
};
use cutperc_core::{Bigraph, ColoredBigraph, Flag, FoldSet};

fn arbitrary_bigraph() -> impl Strategy<Value = Bigraph> {
    (1usize..=3, 1usize..=3)
        .prop_flat_map(|(n1, n2)| {
            let slots = n1 * n2;
            (Just(n1), Just(n2), 0u32..(1 << slots))
        })
        .prop_map(|(n1, n2, mask)| {
            let edges: Vec<(usize, usize)> = (0..n1)
                .flat_map(|i| (0..n2).map(move |j| (i, j)))
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, p)| p)
                .collect();
            Bigraph::from_parts(n1, n2, &edges).unwrap()
        })
}

proptest! {
    /// Automorphism lists satisfy the group axioms.
    #[test]
    fn automorphisms_form_a_group(g in arbitrary_bigraph()) {
        let auts = iso::bigraph_automorphisms(&g);
        let id = iso::identity(g.vertex_count());
        prop_assert!(auts.contains(&id));
        for a in &auts {
            prop_assert!(auts.contains(&iso::invert(a)));
            for b in &auts {
                prop_assert!(auts.contains(&iso::compose(a, b)));
            }
        }
    }

    /// Inducing on the full vertex set is the identity, and components
    /// partition the vertices.
    #[test]
    fn induced_and_components(g in arbitrary_bigraph()) {
        let all: BTreeSet<usize> = g.vertices().collect();
        let (sub, _) = g.induced(&all).unwrap();
        prop_assert_eq!(&sub, &g);
        let comps = g.connected_components();
        let mut seen = BTreeSet::new();
        for comp in &comps {
            for &v in comp {
                prop_assert!(seen.insert(v), "components overlap");
            }
        }
        prop_assert_eq!(seen.len(), g.vertex_count());
    }

    /// Isomorphism witnesses are symmetric and compose to automorphisms.
    #[test]
    fn iso_witnesses_symmetric(g in arbitrary_bigraph(), perm_seed in 0u64..1000) {
        let auts = iso::bigraph_automorphisms(&g);
        let pick = &auts[(perm_seed as usize) % auts.len()];
        let e = g.edge_count();
        if e == 0 {
            return Ok(());
        }
        let ids: ColorVec = (0..e as u32).map(|i| i % 2).collect();
        let c = Coloring::from_ids(2, ids).unwrap();
        let a = ColoredBigraph::new(g.clone(), c.clone()).unwrap();
        let permuted: ColorVec = (0..e)
            .map(|i| c.colors()[g.map_edge(pick, i).unwrap()])
            .collect();
        let b = ColoredBigraph::new(g.clone(), c.with_colors(permuted).unwrap()).unwrap();
        let fwd = iso::isomorphism(&a, &b).unwrap();
        let back = iso::isomorphism(&b, &a).unwrap();
        prop_assert_eq!(fwd.is_some(), back.is_some());
        prop_assert!(fwd.is_some(), "relabeled coloring must be isomorphic");
        let round = iso::compose(&back.unwrap(), &fwd.unwrap());
        prop_assert!(iso::is_colored_isomorphism(&a, &a, &round));
    }

    /// Hom counts multiply over the components of a disjoint union.
    #[test]
    fn hom_counts_multiply(a in arbitrary_bigraph(), b in arbitrary_bigraph()) {
        // Assemble the disjoint union of a and b.
        let (na1, na2) = (a.v1_count(), a.v2_count());
        let (nb1, nb2) = (b.v1_count(), b.v2_count());
        let mut edges: Vec<(usize, usize)> = a
            .edges()
            .iter()
            .map(|&(u, w)| (u, w - na1))
            .collect();
        edges.extend(
            b.edges()
                .iter()
                .map(|&(u, w)| (na1 + u, na2 + (w - nb1))),
        );
        let union = Bigraph::from_parts(na1 + nb1, na2 + nb2, &edges).unwrap();
        let target = Flag::unlabeled(ColoredBigraph::monochromatic(
            catalog::even_cycle(3).unwrap(),
        ));
        let fu = Flag::unlabeled(ColoredBigraph::monochromatic(union));
        let fa = Flag::unlabeled(ColoredBigraph::monochromatic(a));
        let fb = Flag::unlabeled(ColoredBigraph::monochromatic(b));
        prop_assert_eq!(
            iso::hom_count(&fu, &target),
            iso::hom_count(&fa, &target) * iso::hom_count(&fb, &target)
        );
    }
}

/// Group axioms of the automorphism lists on every catalog graph with at
/// most eight vertices, with all pairs composed.
#[test]
fn automorphism_group_axioms_on_catalog() {
    for graph in [
        catalog::star(3).unwrap(),
        catalog::even_cycle(4).unwrap(),
        catalog::hypercube(3).unwrap(),
        catalog::complete_minus_matching(3).unwrap(),
        catalog::path(4).unwrap(),
    ] {
        assert!(graph.vertex_count() <= 8);
        let auts = iso::bigraph_automorphisms(&graph);
        let id = iso::identity(graph.vertex_count());
        assert!(auts.contains(&id));
        for a in &auts {
            assert!(auts.contains(&iso::invert(a)));
            for b in &auts {
                assert!(auts.contains(&iso::compose(a, b)));
            }
        }
    }
}

/// The reachability relation is transitive: everything reachable from a
/// reachable coloring is reachable.
#[test]
fn reachability_is_transitive() {
    for graph in [
        catalog::star(2).unwrap(),
        catalog::even_cycle(2).unwrap(),
        catalog::path(4).unwrap(),
    ] {
        let folds = enumerate_folds(&graph);
        let rainbow: ColorVec = (0..graph.edge_count() as u32).collect();
        let rs = reach_set(&graph, &folds, &rainbow, DEFAULT_BUDGET).unwrap();
        for node in &rs.nodes {
            let inner = reach_set(&graph, &folds, node, DEFAULT_BUDGET).unwrap();
            for c in &inner.nodes {
                assert!(rs.index.contains_key(c), "reachability is not transitive");
            }
        }
    }
}

/// Monochromatic colorings absorb: every folding map fixes them.
#[test]
fn monochromatic_absorption() {
    for graph in [
        catalog::star(3).unwrap(),
        catalog::even_cycle(3).unwrap(),
        catalog::complete(2, 3).unwrap(),
    ] {
        let folds = enumerate_folds(&graph);
        let mono: ColorVec = vec![0; graph.edge_count()];
        for fold in folds.iter() {
            for side in [Side::Left, Side::Right] {
                let map = fold.edge_map(&graph, side);
                let image: ColorVec = map.iter().map(|&e| mono[e]).collect();
                assert_eq!(image, mono);
            }
        }
    }
}

/// Closing an arbitrary fold subset under duals changes neither
/// reachability nor percolation outcomes.
#[test]
fn dual_closure_insensitivity_on_catalog() {
    for graph in [
        catalog::even_cycle(2).unwrap(),
        catalog::even_cycle(3).unwrap(),
        catalog::complete(2, 3).unwrap(),
    ] {
        let all = enumerate_folds(&graph);
        // Keep one fold of each dual pair.
        let mut kept: Vec<cutperc_core::Fold> = Vec::new();
        for fold in all.iter() {
            let dual = fold.dual(&graph);
            if !kept.contains(&dual) {
                kept.push(fold.clone());
            }
        }
        let half = FoldSet::new(&graph, kept);
        let closed = FoldSet::new(
            &graph,
            half.iter().flat_map(|f| [f.clone(), f.dual(&graph)]).collect(),
        );
        assert!(closed.is_dual_closed());

        let e = graph.edge_count();
        let rainbow: ColorVec = (0..e as u32).collect();
        let mono = monochromatic_set(e, e);
        let reach_half = reaches(
            &FoldingProblem::new(&graph, &half, rainbow.clone(), mono.clone()).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        let reach_closed = reaches(
            &FoldingProblem::new(&graph, &closed, rainbow.clone(), mono).unwrap(),
            DEFAULT_BUDGET,
        )
        .unwrap();
        assert_eq!(reach_half.is_some(), reach_closed.is_some());

        let perc_half = is_cut_percolating(&graph, &half, DEFAULT_BUDGET).unwrap();
        let perc_closed = is_cut_percolating(&graph, &closed, DEFAULT_BUDGET).unwrap();
        assert_eq!(perc_half.is_some(), perc_closed.is_some());
    }
}

/// Stability propagates along reachability: when the fold set is invariant
/// and dual-closed and a coloring is fold-stable, everything reachable
/// from it is fold-stable and isomorphic to it.
#[test]
fn stability_propagates_to_reachable_colorings() {
    for graph in [
        catalog::even_cycle(2).unwrap(),
        catalog::even_cycle(3).unwrap(),
        catalog::path(4).unwrap(),
    ] {
        let folds = enumerate_folds(&graph);
        let auts = iso::bigraph_automorphisms(&graph);
        let e = graph.edge_count();
        for partition in set_partitions(e, e) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let coloring = Coloring::from_ids(blocks, partition).unwrap();
            let q = StabilityQuery {
                graph: &graph,
                coloring: &coloring,
                group: &auts,
                allowed: &folds,
                inverse_pool: &folds,
            };
            if !is_fold_stable(&q).unwrap().stable {
                continue;
            }
            let source = ColoredBigraph::new(graph.clone(), coloring.clone()).unwrap();
            let rs = reach_set(&graph, &folds, coloring.colors(), DEFAULT_BUDGET).unwrap();
            for node in &rs.nodes {
                let reached = coloring.with_colors(node.clone()).unwrap();
                let rq = StabilityQuery {
                    graph: &graph,
                    coloring: &reached,
                    group: &auts,
                    allowed: &folds,
                    inverse_pool: &folds,
                };
                assert!(
                    is_fold_stable(&rq).unwrap().stable,
                    "reachable coloring lost stability"
                );
                let target = ColoredBigraph::new(graph.clone(), reached.clone()).unwrap();
                assert!(
                    iso::isomorphism_within(&source, &target, &auts)
                        .unwrap()
                        .is_some(),
                    "reachable coloring is not isomorphic to the stable source"
                );
            }
        }
    }
}

/// Within every sink class of the full reachability digraph, colorings are
/// pairwise isomorphic and strongly fold-stable. The path with four edges
/// has folds but is not edge-transitive, so it contributes sink classes of
/// non-monochromatic colorings.
#[test]
fn sink_classes_are_isomorphic_and_strongly_stable() {
    let mut nontrivial_sinks = 0usize;
    for graph in [catalog::even_cycle(2).unwrap(), catalog::path(4).unwrap()] {
        let folds = enumerate_folds(&graph);
        let auts = iso::bigraph_automorphisms(&graph);
        let e = graph.edge_count();
        let rainbow = Coloring::rainbow(e);
        let dg = reachability_digraph(&graph, &rainbow, &folds, DEFAULT_BUDGET).unwrap();
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (node, &scc) in dg.scc.iter().enumerate() {
            if dg.maximal[node] {
                classes.entry(scc).or_default().push(node);
            }
        }
        for members in classes.values() {
            let first = &dg.nodes[members[0]];
            let blocks = first.iter().collect::<BTreeSet<_>>().len().max(1);
            if blocks > 1 {
                nontrivial_sinks += 1;
            }
            let base_coloring = rainbow.with_colors(first.clone()).unwrap();
            let base = ColoredBigraph::new(graph.clone(), base_coloring.clone()).unwrap();
            let q = StabilityQuery {
                graph: &graph,
                coloring: &base_coloring,
                group: &auts,
                allowed: &folds,
                inverse_pool: &folds,
            };
            assert!(
                is_strongly_fold_stable(&q).unwrap().stable,
                "sink-class coloring is not strongly fold-stable"
            );
            for &other in &members[1..] {
                let other_coloring =
                    rainbow.with_colors(dg.nodes[other].clone()).unwrap();
                let target = ColoredBigraph::new(graph.clone(), other_coloring).unwrap();
                assert!(
                    iso::isomorphism(&base, &target).unwrap().is_some(),
                    "sink-class colorings are not isomorphic"
                );
            }
        }
    }
    assert!(nontrivial_sinks > 0, "expected non-monochromatic sink classes");
}

/// Strong fold-stability of a coloring forces equality in the fold
/// Cauchy-Schwarz characterization for every allowed fold, and plain
/// stability with respect to the fold-generated subgroup upgrades to
/// strong stability with respect to the full automorphism group on a
/// connected host with a dual-closed fold set.
#[test]
fn stability_upgrades_and_equality_characterization() {
    use cutperc_core::density::cs_equality_characterization;
    for graph in [
        catalog::even_cycle(2).unwrap(),
        catalog::even_cycle(3).unwrap(),
        catalog::path(4).unwrap(),
    ] {
        let folds = enumerate_folds(&graph);
        let auts = iso::bigraph_automorphisms(&graph);
        let generated = cutperc_core::fold::fold_group(&graph, &folds);
        let e = graph.edge_count();
        let mut strong_cases = 0usize;
        for partition in set_partitions(e, e) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let coloring = Coloring::from_ids(blocks, partition).unwrap();
            let full = StabilityQuery {
                graph: &graph,
                coloring: &coloring,
                group: &auts,
                allowed: &folds,
                inverse_pool: &folds,
            };
            let strong = is_strongly_fold_stable(&full).unwrap();
            if strong.stable {
                strong_cases += 1;
                let h = ColoredBigraph::new(graph.clone(), coloring.clone()).unwrap();
                for fold in folds.iter() {
                    assert!(
                        cs_equality_characterization(&h, fold).unwrap(),
                        "strongly stable coloring without core isomorphism"
                    );
                }
            }
            // Plain stability over the generated subgroup upgrades.
            let small = StabilityQuery {
                group: &generated,
                ..full
            };
            if is_fold_stable(&small).unwrap().stable {
                assert!(
                    is_strongly_fold_stable(&full).unwrap().stable,
                    "plain stability failed to upgrade to strong stability"
                );
            }
        }
        assert!(strong_cases > 0, "no strongly stable coloring found");
    }
}

/// Strong fold-stability also propagates along reachability when the fold
/// set is invariant and dual-closed.
#[test]
fn strong_stability_propagates() {
    for graph in [catalog::even_cycle(2).unwrap(), catalog::path(4).unwrap()] {
        let folds = enumerate_folds(&graph);
        let auts = iso::bigraph_automorphisms(&graph);
        let e = graph.edge_count();
        for partition in set_partitions(e, e) {
            let blocks = partition.iter().collect::<BTreeSet<_>>().len().max(1);
            let coloring = Coloring::from_ids(blocks, partition).unwrap();
            let q = StabilityQuery {
                graph: &graph,
                coloring: &coloring,
                group: &auts,
                allowed: &folds,
                inverse_pool: &folds,
            };
            if !is_strongly_fold_stable(&q).unwrap().stable {
                continue;
            }
            let rs = reach_set(&graph, &folds, coloring.colors(), DEFAULT_BUDGET).unwrap();
            for node in &rs.nodes {
                let reached = coloring.with_colors(node.clone()).unwrap();
                let rq = StabilityQuery {
                    graph: &graph,
                    coloring: &reached,
                    group: &auts,
                    allowed: &folds,
                    inverse_pool: &folds,
                };
                assert!(
                    is_strongly_fold_stable(&rq).unwrap().stable,
                    "reachable coloring lost strong stability"
                );
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// The nine characterizations must agree on every finite connected
    /// bigraph; running the full harness on random graphs is the broadest
    /// integration check available.
    #[test]
    fn theorem_consistency_on_random_graphs(
        g in arbitrary_bigraph().prop_filter("connected", |g| {
            g.is_connected() && g.edge_count() <= 7 && g.vertex_count() >= 2
        })
    ) {
        use cutperc_core::stability::verify_cutperc_theorem;
        let folds = enumerate_folds(&g);
        let report = verify_cutperc_theorem(
            &g,
            &folds,
            g.edge_count().max(1),
            DEFAULT_BUDGET,
            false,
        )
        .unwrap();
        prop_assert!(report.consistent, "items: {:#?}", report.items);
        prop_assert!(report.verdict.is_some());
    }

    /// The left-sided characterizations must agree on every finite
    /// connected colored bigraph.
    #[test]
    fn left_theorem_consistency_on_random_graphs(
        g in arbitrary_bigraph().prop_filter("connected", |g| {
            g.is_connected() && g.vertex_count() >= 2
        }),
        color_mask in 0u32..256,
    ) {
        use cutperc_core::fold::enumerate_colored_folds;
        use cutperc_core::stability::verify_leftcutperc_theorem;
        let e = g.edge_count();
        let ids: ColorVec = (0..e).map(|i| color_mask >> i & 1).collect();
        let coloring = Coloring::new(vec!["1".into(), "2".into()], ids).unwrap();
        let h = ColoredBigraph::new(g.clone(), coloring).unwrap();
        let folds = enumerate_colored_folds(&h);
        let report = verify_leftcutperc_theorem(
            &h,
            &folds,
            g.v1_count().max(1),
            DEFAULT_BUDGET,
        )
        .unwrap();
        prop_assert!(report.consistent, "items: {:#?}", report.items);
        prop_assert!(report.verdict.is_some());
    }
}

/// The harness also holds over the independent-fold subset, which is a
/// proper automorphism-invariant subset on K_{2,3} (only the left swap
/// has an independent fixed set, so edge-transitivity fails and every
/// item flips to false).
#[test]
fn theorem_with_independent_folds() {
    use cutperc_core::fold::enumerate_independent_folds;
    use cutperc_core::stability::verify_cutperc_theorem;

    let k23 = catalog::complete(2, 3).unwrap();
    let ind = enumerate_independent_folds(&k23);
    assert_eq!(ind.len(), 2);
    let report = verify_cutperc_theorem(&k23, &ind, 6, DEFAULT_BUDGET, false).unwrap();
    assert!(report.consistent, "{:#?}", report.items);
    assert_eq!(report.verdict, Some(false));

    let c4 = catalog::even_cycle(2).unwrap();
    let ind = enumerate_independent_folds(&c4);
    let report = verify_cutperc_theorem(&c4, &ind, 4, DEFAULT_BUDGET, false).unwrap();
    assert!(report.consistent);
    assert_eq!(report.verdict, Some(true));

    let c6 = catalog::even_cycle(3).unwrap();
    let ind = enumerate_independent_folds(&c6);
    let report = verify_cutperc_theorem(&c6, &ind, 6, DEFAULT_BUDGET, false).unwrap();
    assert!(report.consistent);
    assert_eq!(report.verdict, Some(true));
}

/// The harness rejects fold sets that are not invariant under the
/// automorphism group.
#[test]
fn theorem_rejects_non_invariant_fold_sets() {
    use cutperc_core::stability::verify_cutperc_theorem;
    let c4 = catalog::even_cycle(2).unwrap();
    let all = enumerate_folds(&c4);
    let half = FoldSet::new(&c4, vec![all.get(0).clone()]);
    assert!(matches!(
        verify_cutperc_theorem(&c4, &half, 4, DEFAULT_BUDGET, false),
        Err(cutperc_core::Error::NotAutInvariant)
    ));
}

/// The left-sided harness is also consistent on the 6-cycle, where the
/// left part has three vertices.
#[test]
fn left_theorem_on_c6() {
    use cutperc_core::fold::enumerate_colored_folds;
    use cutperc_core::stability::verify_leftcutperc_theorem;
    let c6 = catalog::even_cycle(3).unwrap();
    let h = ColoredBigraph::monochromatic(c6);
    let folds = enumerate_colored_folds(&h);
    let report = verify_leftcutperc_theorem(&h, &folds, 3, DEFAULT_BUDGET).unwrap();
    assert!(report.consistent, "{:#?}", report.items);
    assert_eq!(report.verdict, Some(true));
}

/// Core isomorphism is equivalent to equality of the core density tables
/// across the test family, on all same-type pairs of flag classes with at
/// most five vertices. (The statement has no isolated-vertex
/// restriction.)
#[test]
fn core_iso_matches_core_table_equality() {
    let classes = common::flag_classes(common::enumerate_flags(5, 2, false));
    let palette = vec!["1".to_string(), "2".to_string()];
    let families: Vec<BigraphonFamily> = (200..204)
        .map(|seed| random_family(seed, &palette, 3, 3, false).unwrap())
        .collect();

    // Cache the core tables per class representative.
    let flags: Vec<&Flag> = classes.iter().map(|(rep, _)| rep).collect();
    let tables: Vec<Vec<_>> = flags
        .iter()
        .map(|f| {
            let core = f.core_flag();
            families
                .iter()
                .map(|fam| flag_density(&core, fam).unwrap())
                .collect::<Vec<_>>()
        })
        .collect();

    // Group by type so only comparable pairs are visited.
    let mut by_type: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (i, f) in flags.iter().enumerate() {
        by_type.entry(common::type_key(f)).or_default().push(i);
    }
    let mut pairs = 0usize;
    let mut iso_pairs = 0usize;
    for members in by_type.values() {
        for (a, &i) in members.iter().enumerate() {
            for &j in members.iter().skip(a + 1) {
                assert!(flags[i].same_type(flags[j]));
                pairs += 1;
                let report = core_iso_decide(flags[i], flags[j]).unwrap();
                let tables_equal = (0..families.len())
                    .all(|f| tables[i][f].entries() == tables[j][f].entries());
                if report.isomorphic {
                    iso_pairs += 1;
                    assert!(
                        tables_equal,
                        "isomorphic cores with different density tables"
                    );
                } else {
                    assert!(
                        !tables_equal,
                        "non-isomorphic cores not separated by the test family"
                    );
                }
            }
        }
    }
    assert!(iso_pairs > 0);
    println!("core-table equivalence: {pairs} same-type pairs, {iso_pairs} isomorphic");
}
