//! Helpers shared by the integration suites.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::Zero;

use cutperc_core::catalog;
use cutperc_core::coloring::Coloring;
use cutperc_core::density::{BigraphonFamily, FiniteProbabilitySpace};
use cutperc_core::{Bigraph, ColoredBigraph};

/// The graph list of the main harness criterion, with names.
pub fn harness_graphs() -> Vec<(&'static str, Bigraph)> {
    vec![
        ("K_{1,1}", catalog::star(1).unwrap()),
        ("K_{1,2}", catalog::star(2).unwrap()),
        ("C_4", catalog::even_cycle(2).unwrap()),
        ("C_6", catalog::even_cycle(3).unwrap()),
        ("C_8", catalog::even_cycle(4).unwrap()),
        ("K_{2,3}", catalog::complete(2, 3).unwrap()),
        ("K_{3,3}-M", catalog::complete_minus_matching(3).unwrap()),
        ("path_3", catalog::path(3).unwrap()),
    ]
}

/// A two-block coloring: the first edge in one class, the rest in another.
pub fn two_block(edges: usize) -> Option<Coloring> {
    if edges < 2 {
        return None;
    }
    let mut ids = vec![1u32; edges];
    ids[0] = 0;
    Some(Coloring::from_ids(2, ids).unwrap())
}

/// The block family of the linear-dependence argument: two families over
/// disjoint spaces glued with halved weights and zero cross blocks. If two
/// density functions are proportional against every family, gluing forces
/// one proportionality constant, so the block family separates whenever
/// the two inputs disagree on the constant.
pub fn coupled_family(a: &BigraphonFamily, b: &BigraphonFamily) -> BigraphonFamily {
    let half = |w: &BigRational| w / BigRational::from_integer(2.into());
    let glue_space = |x: &FiniteProbabilitySpace,
                      y: &FiniteProbabilitySpace|
     -> FiniteProbabilitySpace {
        let labels: Vec<String> = (0..x.len())
            .map(|i| format!("a:{}", x.label(i)))
            .chain((0..y.len()).map(|i| format!("b:{}", y.label(i))))
            .collect();
        let weights: Vec<BigRational> = (0..x.len())
            .map(|i| half(x.weight(i)))
            .chain((0..y.len()).map(|i| half(y.weight(i))))
            .collect();
        FiniteProbabilitySpace::new(labels, weights).unwrap()
    };
    let left = glue_space(a.left(), b.left());
    let right = glue_space(a.right(), b.right());
    let mut members = BTreeMap::new();
    for (color, ma) in a.members() {
        let mb = b
            .member(color)
            .expect("coupled families share the palette");
        let rows = ma.len() + mb.len();
        let cols = ma[0].len() + mb[0].len();
        let mut m = vec![vec![BigRational::zero(); cols]; rows];
        for (i, row) in ma.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[i][j] = v.clone();
            }
        }
        for (i, row) in mb.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m[ma.len() + i][ma[0].len() + j] = v.clone();
            }
        }
        members.insert(color.clone(), m);
    }
    BigraphonFamily::new(left, right, members).unwrap()
}

/// The standard test colorings of a graph: monochromatic, rainbow, and a
/// two-block split when the graph has enough edges.
pub fn test_colorings(graph: &Bigraph) -> Vec<(String, ColoredBigraph)> {
    let mut out = vec![
        (
            "mono".to_string(),
            ColoredBigraph::monochromatic(graph.clone()),
        ),
        ("rainbow".to_string(), ColoredBigraph::rainbow(graph.clone())),
    ];
    if let Some(c) = two_block(graph.edge_count()) {
        out.push((
            "two-block".to_string(),
            ColoredBigraph::new(graph.clone(), c).unwrap(),
        ));
    }
    out
}

use cutperc_core::coloring::ColorVec;
use cutperc_core::iso;
use cutperc_core::Flag;

fn palette_two() -> Vec<String> {
    vec!["1".to_string(), "2".to_string()]
}

/// Every flag on at most `max_v` vertices over a fixed two-color palette
/// with at most `max_k` labels, optionally requiring all isolated vertices
/// to be labeled.
pub fn enumerate_flags(max_v: usize, max_k: usize, label_isolated: bool) -> Vec<Flag> {
    let mut out = Vec::new();
    for n1 in 0..=max_v {
        for n2 in 0..=(max_v - n1) {
            let slots: Vec<(usize, usize)> = (0..n1)
                .flat_map(|i| (0..n2).map(move |j| (i, j)))
                .collect();
            for edge_mask in 0..(1u32 << slots.len()) {
                let edges: Vec<(usize, usize)> = slots
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| edge_mask >> b & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect();
                let graph = Bigraph::from_parts(n1, n2, &edges).unwrap();
                let e = graph.edge_count();
                for color_mask in 0..(1u32 << e) {
                    let ids: ColorVec = (0..e).map(|i| color_mask >> i & 1).collect();
                    let coloring = Coloring::new(palette_two(), ids).unwrap();
                    let h = ColoredBigraph::new(graph.clone(), coloring).unwrap();
                    for k in 0..=max_k {
                        for theta in ordered_injections(graph.vertex_count(), k) {
                            let flag = Flag::new(h.clone(), theta).unwrap();
                            if label_isolated {
                                let labeled = flag.labeled_set();
                                let isolated_unlabeled = graph
                                    .vertices()
                                    .any(|v| graph.degree(v) == 0 && !labeled.contains(&v));
                                if isolated_unlabeled {
                                    continue;
                                }
                            }
                            out.push(flag);
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn ordered_injections(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for v in 0..n {
            if !current.contains(&v) {
                current.push(v);
                rec(n, k, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    rec(n, k, &mut current, &mut out);
    out
}

/// An isomorphism-invariant bucket key for flags.
fn flag_key(f: &Flag) -> String {
    let g = f.graph();
    let c = f.host().coloring();
    let mut vertex_sig: Vec<String> = g
        .vertices()
        .map(|v| {
            let mut colors: Vec<u32> = g
                .edges()
                .iter()
                .enumerate()
                .filter(|(_, &(a, b))| a == v || b == v)
                .map(|(e, _)| c.colors()[e])
                .collect();
            colors.sort_unstable();
            format!("{}{}:{:?}", g.is_left(v) as u8, g.degree(v), colors)
        })
        .collect();
    vertex_sig.sort();
    let theta_sig: Vec<String> = f
        .theta()
        .iter()
        .map(|&v| format!("{}{}", g.is_left(v) as u8, g.degree(v)))
        .collect();
    format!(
        "{}|{}|{}|{:?}|{:?}|{}",
        g.v1_count(),
        g.v2_count(),
        g.edge_count(),
        vertex_sig,
        theta_sig,
        type_key(f),
    )
}

/// The exact type fingerprint of a flag: side pattern and colored
/// adjacency of the labeled restriction in label order. Two flags have the
/// same type exactly when these agree.
pub fn type_key(f: &Flag) -> String {
    let g = f.graph();
    let c = f.host().coloring();
    let mut cells = Vec::new();
    for &v in f.theta() {
        cells.push(format!("s{}", g.is_left(v) as u8));
    }
    for (i, &v) in f.theta().iter().enumerate() {
        for (j, &w) in f.theta().iter().enumerate() {
            if i == j || !g.is_left(v) || g.is_left(w) {
                continue;
            }
            if let Some(e) = g.edge_index(v, w) {
                cells.push(format!("{i}-{j}:{}", c.colors()[e]));
            }
        }
    }
    cells.join(",")
}

/// Deduplicate flags into isomorphism classes; each class keeps a
/// representative and, when available, one other distinct member.
pub fn flag_classes(flags: Vec<Flag>) -> Vec<(Flag, Option<Flag>)> {
    let mut buckets: BTreeMap<String, Vec<(Flag, Option<Flag>)>> = BTreeMap::new();
    for flag in flags {
        let key = flag_key(&flag);
        let bucket = buckets.entry(key).or_default();
        let mut matched = false;
        for (rep, alt) in bucket.iter_mut() {
            if iso::flag_isomorphism(rep, &flag).unwrap().is_some() {
                if alt.is_none() && *rep != flag {
                    *alt = Some(flag.clone());
                }
                matched = true;
                break;
            }
        }
        if !matched {
            bucket.push((flag, None));
        }
    }
    buckets.into_values().flatten().collect()
}
