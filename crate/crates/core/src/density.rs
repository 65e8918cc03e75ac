//! Exact rational homomorphism densities over finite bigraphons, the fold
//! Cauchy–Schwarz inequality with its equality characterization, geometric
//! tree-density comparison, and flag-core isomorphism decisions.
//!
//! Every verdict here is exact big-rational arithmetic; equality versus
//! strict inequality is decided without any rounding.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bigraph::{Bigraph, EdgeSet, VertexSet};
use crate::coloring::{ColorVec, ColoredBigraph};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::flag::Flag;
use crate::fold::{Fold, Side};
use crate::iso::{self, Perm};
use crate::tree::ColoringTree;

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// A finite probability space: labeled points with non-negative rational
/// weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteProbabilitySpace {
    labels: Vec<String>,
    weights: Vec<BigRational>,
}

impl FiniteProbabilitySpace {
    pub fn new(labels: Vec<String>, weights: Vec<BigRational>) -> Result<Self> {
        if labels.len() != weights.len() || labels.is_empty() {
            return Err(Error::InvalidParameter(
                "space needs one weight per point and at least one point".into(),
            ));
        }
        if weights.iter().any(|w| w.is_negative()) {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        let total: BigRational = weights.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidParameter(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(FiniteProbabilitySpace { labels, weights })
    }

    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::EmptyPart);
        }
        let w = rat(1, n as i64);
        FiniteProbabilitySpace::new(labels, vec![w; n])
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weight(&self, i: usize) -> &BigRational {
        &self.weights[i]
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn has_positive_weight(&self, i: usize) -> bool {
        self.weights[i].is_positive()
    }
}

/// A finite bigraphon: a non-negative rational matrix over a pair of
/// finite probability spaces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteBigraphon {
    left: FiniteProbabilitySpace,
    right: FiniteProbabilitySpace,
    values: Vec<Vec<BigRational>>,
}

impl FiniteBigraphon {
    pub fn new(
        left: FiniteProbabilitySpace,
        right: FiniteProbabilitySpace,
        values: Vec<Vec<BigRational>>,
    ) -> Result<Self> {
        if values.len() != left.len() || values.iter().any(|row| row.len() != right.len()) {
            return Err(Error::InvalidParameter("matrix shape mismatch".into()));
        }
        if values.iter().flatten().any(|v| v.is_negative()) {
            return Err(Error::InvalidParameter("negative bigraphon value".into()));
        }
        Ok(FiniteBigraphon {
            left,
            right,
            values,
        })
    }

    pub fn left(&self) -> &FiniteProbabilitySpace {
        &self.left
    }

    pub fn right(&self) -> &FiniteProbabilitySpace {
        &self.right
    }

    pub fn value(&self, x: usize, y: usize) -> &BigRational {
        &self.values[x][y]
    }

    pub fn values(&self) -> &Vec<Vec<BigRational>> {
        &self.values
    }
}

/// The natural bigraphon of a bigraph: the 0/1 adjacency kernel over
/// uniform spaces on the two parts.
pub fn natural_bigraphon(graph: &Bigraph) -> Result<FiniteBigraphon> {
    if graph.v1_count() == 0 || graph.v2_count() == 0 {
        return Err(Error::EmptyPart);
    }
    let left = FiniteProbabilitySpace::uniform(
        graph
            .left_vertices()
            .map(|v| graph.label(v).into())
            .collect(),
    )?;
    let right = FiniteProbabilitySpace::uniform(
        graph
            .right_vertices()
            .map(|v| graph.label(v).into())
            .collect(),
    )?;
    let n1 = graph.v1_count();
    let values: Vec<Vec<BigRational>> = (0..n1)
        .map(|u| {
            (0..graph.v2_count())
                .map(|j| {
                    if graph.has_edge(u, n1 + j) {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    FiniteBigraphon::new(left, right, values)
}

/// A family of bigraphons over one pair of spaces, keyed by color name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigraphonFamily {
    left: FiniteProbabilitySpace,
    right: FiniteProbabilitySpace,
    members: BTreeMap<String, Vec<Vec<BigRational>>>,
}

impl BigraphonFamily {
    pub fn new(
        left: FiniteProbabilitySpace,
        right: FiniteProbabilitySpace,
        members: BTreeMap<String, Vec<Vec<BigRational>>>,
    ) -> Result<Self> {
        for m in members.values() {
            if m.len() != left.len() || m.iter().any(|row| row.len() != right.len()) {
                return Err(Error::InvalidParameter(
                    "family member shape mismatch".into(),
                ));
            }
            if m.iter().flatten().any(|v| v.is_negative()) {
                return Err(Error::InvalidParameter("negative bigraphon value".into()));
            }
        }
        Ok(BigraphonFamily {
            left,
            right,
            members,
        })
    }

    /// The same bigraphon for every color of the palette.
    pub fn constant(w: &FiniteBigraphon, palette: &[String]) -> Self {
        BigraphonFamily {
            left: w.left.clone(),
            right: w.right.clone(),
            members: palette
                .iter()
                .map(|c| (c.clone(), w.values.clone()))
                .collect(),
        }
    }

    /// `W^H`: for every color of `h`, the natural bigraphon of the bigraph
    /// of that color class (over the same vertex sets).
    pub fn natural(h: &ColoredBigraph) -> Result<Self> {
        let graph = h.graph();
        if graph.v1_count() == 0 || graph.v2_count() == 0 {
            return Err(Error::EmptyPart);
        }
        let mut members = BTreeMap::new();
        for (id, name) in h.coloring().palette().iter().enumerate() {
            let class = h.color_class_bigraph(id as u32);
            let w = natural_bigraphon(&class)?;
            members.insert(name.clone(), w.values);
        }
        let any = natural_bigraphon(graph)?;
        BigraphonFamily::new(any.left, any.right, members)
    }

    pub fn left(&self) -> &FiniteProbabilitySpace {
        &self.left
    }

    pub fn right(&self) -> &FiniteProbabilitySpace {
        &self.right
    }

    pub fn member(&self, color: &str) -> Option<&Vec<Vec<BigRational>>> {
        self.members.get(color)
    }

    pub fn colors(&self) -> impl Iterator<Item = &String> {
        self.members.keys()
    }

    pub fn members(&self) -> &BTreeMap<String, Vec<Vec<BigRational>>> {
        &self.members
    }
}

/// A seeded random family over uniform spaces: entries are `k/8` with `k`
/// uniform in `1..=8`, or `0..=8` when zeros are allowed.
pub fn random_family(
    seed: u64,
    palette: &[String],
    left_points: usize,
    right_points: usize,
    allow_zero: bool,
) -> Result<BigraphonFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let left =
        FiniteProbabilitySpace::uniform((1..=left_points).map(|i| format!("x{i}")).collect())?;
    let right =
        FiniteProbabilitySpace::uniform((1..=right_points).map(|i| format!("y{i}")).collect())?;
    let lo: i64 = if allow_zero { 0 } else { 1 };
    let members: BTreeMap<String, Vec<Vec<BigRational>>> = palette
        .iter()
        .map(|c| {
            let m: Vec<Vec<BigRational>> = (0..left_points)
                .map(|_| {
                    (0..right_points)
                        .map(|_| rat(rng.random_range(lo..=8), 8))
                        .collect()
                })
                .collect();
            (c.clone(), m)
        })
        .collect();
    BigraphonFamily::new(left, right, members)
}

/// The homomorphism density function of a flag: a table of exact rationals
/// indexed by assignments of the labeled left vertices to left points and
/// labeled right vertices to right points, both in label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DensityTable {
    t1_len: usize,
    t2_len: usize,
    left_size: usize,
    right_size: usize,
    entries: Vec<BigRational>,
}

impl DensityTable {
    pub fn entry(&self, xs: &[usize], ys: &[usize]) -> &BigRational {
        assert_eq!(xs.len(), self.t1_len);
        assert_eq!(ys.len(), self.t2_len);
        let mut idx = 0usize;
        for &x in xs {
            idx = idx * self.left_size + x;
        }
        for &y in ys {
            idx = idx * self.right_size + y;
        }
        &self.entries[idx]
    }

    /// The unique entry of a table with no labeled coordinates.
    pub fn scalar(&self) -> &BigRational {
        assert_eq!(self.entries.len(), 1, "table has labeled coordinates");
        &self.entries[0]
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.entries
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.t1_len, self.t2_len)
    }

    /// All `(xs, ys, entry)` points in flat order.
    pub fn points(&self) -> Vec<(Vec<usize>, Vec<usize>, &BigRational)> {
        let mut out = Vec::with_capacity(self.entries.len());
        for (flat, entry) in self.entries.iter().enumerate() {
            let mut rem = flat;
            let mut ys = vec![0usize; self.t2_len];
            for y in ys.iter_mut().rev() {
                *y = rem % self.right_size;
                rem /= self.right_size;
            }
            let mut xs = vec![0usize; self.t1_len];
            for x in xs.iter_mut().rev() {
                *x = rem % self.left_size;
                rem /= self.left_size;
            }
            out.push((xs, ys, entry));
        }
        out
    }

    /// Entrywise equality restricted to atoms at which every coordinate
    /// has positive weight.
    pub fn equal_on_positive_atoms(&self, other: &Self, family: &BigraphonFamily) -> bool {
        if self.shape() != other.shape() || self.entries.len() != other.entries.len() {
            return false;
        }
        self.points()
            .into_iter()
            .zip(other.points())
            .all(|((xs, ys, a), (_, _, b))| {
                let positive = xs.iter().all(|&x| family.left.has_positive_weight(x))
                    && ys.iter().all(|&y| family.right.has_positive_weight(y));
                !positive || a == b
            })
    }
}

/// Compute the density table of a flag against a family.
///
/// The sum over unlabeled assignments is factored through the right part:
/// with every left vertex placed, the integrand splits as a product over
/// right vertices, each contributing either a fixed product (labeled) or a
/// weighted sum over its point choices (unlabeled).
pub fn flag_density(flag: &Flag, family: &BigraphonFamily) -> Result<DensityTable> {
    let graph = flag.graph();
    let coloring = flag.host().coloring();
    let matrices: Vec<&Vec<Vec<BigRational>>> = (0..graph.edge_count())
        .map(|e| {
            family
                .member(coloring.color_name(coloring.colors()[e]))
                .ok_or(Error::PaletteMismatch)
        })
        .collect::<Result<_>>()?;
    let (xn, yn) = (family.left.len(), family.right.len());
    let t1 = flag.t1();
    let t2 = flag.t2();
    let n1 = graph.v1_count();
    // slot_of[u]: Ok(i) = labeled coordinate i; Err(i) = free coordinate i.
    let mut slot_of: Vec<std::result::Result<usize, usize>> = Vec::with_capacity(n1);
    let labeled_left: BTreeMap<usize, usize> =
        t1.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut free_count = 0usize;
    for u in 0..n1 {
        match labeled_left.get(&u) {
            Some(&i) => slot_of.push(Ok(i)),
            None => {
                slot_of.push(Err(free_count));
                free_count += 1;
            }
        }
    }
    let labeled_right: BTreeMap<usize, usize> =
        t2.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    // Incidence by right vertex: (left endpoint, edge index).
    let mut by_right: Vec<Vec<(usize, usize)>> = vec![Vec::new(); graph.v2_count()];
    for (e, &(u, w)) in graph.edges().iter().enumerate() {
        by_right[w - n1].push((u, e));
    }

    let table_len = xn.pow(t1.len() as u32) * yn.pow(t2.len() as u32);
    let mut entries = Vec::with_capacity(table_len);
    let mut xs = vec![0usize; t1.len()];
    let mut ys = vec![0usize; t2.len()];
    loop {
        let mut entry = BigRational::zero();
        let mut free = vec![0usize; free_count];
        loop {
            let point_of = |u: usize| -> usize {
                match slot_of[u] {
                    Ok(i) => xs[i],
                    Err(i) => free[i],
                }
            };
            let mut term = BigRational::one();
            for &i in &free {
                term *= family.left.weight(i);
            }
            if !term.is_zero() {
                for (w_local, inc) in by_right.iter().enumerate() {
                    let w = n1 + w_local;
                    let factor = match labeled_right.get(&w) {
                        Some(&i) => {
                            let y = ys[i];
                            let mut p = BigRational::one();
                            for &(u, e) in inc {
                                p *= &matrices[e][point_of(u)][y];
                                if p.is_zero() {
                                    break;
                                }
                            }
                            p
                        }
                        None => {
                            let mut s = BigRational::zero();
                            for y in 0..yn {
                                let weight = family.right.weight(y);
                                if weight.is_zero() {
                                    continue;
                                }
                                let mut p = weight.clone();
                                for &(u, e) in inc {
                                    p *= &matrices[e][point_of(u)][y];
                                    if p.is_zero() {
                                        break;
                                    }
                                }
                                s += p;
                            }
                            s
                        }
                    };
                    term *= factor;
                    if term.is_zero() {
                        break;
                    }
                }
            }
            entry += term;
            // Advance the free-left odometer.
            let mut done = true;
            for pos in (0..free.len()).rev() {
                free[pos] += 1;
                if free[pos] < xn {
                    done = false;
                    break;
                }
                free[pos] = 0;
            }
            if done {
                break;
            }
        }
        entries.push(entry);
        // Advance the (xs, ys) odometer, ys fastest.
        let mut carried = true;
        for pos in (0..ys.len()).rev() {
            ys[pos] += 1;
            if ys[pos] < yn {
                carried = false;
                break;
            }
            ys[pos] = 0;
        }
        if carried {
            for pos in (0..xs.len()).rev() {
                xs[pos] += 1;
                if xs[pos] < xn {
                    carried = false;
                    break;
                }
                xs[pos] = 0;
            }
        }
        if carried {
            break;
        }
    }
    debug_assert_eq!(entries.len(), table_len);
    Ok(DensityTable {
        t1_len: t1.len(),
        t2_len: t2.len(),
        left_size: xn,
        right_size: yn,
        entries,
    })
}

/// The scalar density `t(H, W)` of a colored bigraph.
pub fn colored_density(h: &ColoredBigraph, family: &BigraphonFamily) -> Result<BigRational> {
    Ok(flag_density(&Flag::unlabeled(h.clone()), family)?
        .scalar()
        .clone())
}

/// A pair of non-negative scalars, not both zero, witnessing the linear
/// dependence `λ₁ · t(F₁, W) = λ₂ · t(F₂, W)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearDependenceWitness {
    pub lambda1: BigRational,
    pub lambda2: BigRational,
}

/// Find `(λ₁, λ₂)` with `λ₁·a = λ₂·b` entrywise on the masked atoms.
fn proportionality_witness(
    a: &DensityTable,
    b: &DensityTable,
    mask: &[bool],
) -> Option<LinearDependenceWitness> {
    assert_eq!(a.entries.len(), b.entries.len());
    assert_eq!(a.entries.len(), mask.len());
    let live = |t: &DensityTable| -> Vec<BigRational> {
        t.entries
            .iter()
            .zip(mask)
            .filter(|(_, &m)| m)
            .map(|(v, _)| v.clone())
            .collect()
    };
    let av = live(a);
    let bv = live(b);
    if av.iter().all(Zero::is_zero) {
        return Some(LinearDependenceWitness {
            lambda1: BigRational::one(),
            lambda2: BigRational::zero(),
        });
    }
    if bv.iter().all(Zero::is_zero) {
        return Some(LinearDependenceWitness {
            lambda1: BigRational::zero(),
            lambda2: BigRational::one(),
        });
    }
    let pivot = av.iter().position(|v| !v.is_zero()).unwrap();
    if bv[pivot].is_zero() {
        return None;
    }
    let r = &bv[pivot] / &av[pivot];
    if av.iter().zip(&bv).all(|(x, y)| y == &(&r * x)) {
        Some(LinearDependenceWitness {
            lambda1: r,
            lambda2: BigRational::one(),
        })
    } else {
        None
    }
}

/// The two flags of a fold: the colored bigraph restricted to each side
/// together with the cut, labeled by the cut vertices in sorted order,
/// with the cut-internal edges removed.
pub fn core_flags_of_fold(h: &ColoredBigraph, fold: &Fold) -> Result<(Flag, Flag)> {
    let side_flag = |side: &[usize]| -> Result<Flag> {
        let keep: VertexSet = side.iter().chain(fold.fix()).copied().collect();
        let induced = h.induced(&keep)?;
        let theta: Vec<usize> = fold
            .fix()
            .iter()
            .map(|&v| {
                induced
                    .graph()
                    .vertex_by_label(h.graph().label(v))
                    .expect("cut vertex kept")
            })
            .collect();
        let theta_set: VertexSet = theta.iter().copied().collect();
        let internal: EdgeSet = induced
            .graph()
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(u, w))| theta_set.contains(&u) && theta_set.contains(&w))
            .map(|(e, _)| e)
            .collect();
        Flag::new(induced.remove_edges(&internal), theta)
    };
    Ok((side_flag(fold.side())?, side_flag(fold.side_image())?))
}

/// Outcome of the fold Cauchy–Schwarz check in squared form:
/// `t(H,W)² ≤ t((G,c∘f_L),W) · t((G,c∘f_L^*),W)`.
#[derive(Debug, Clone)]
pub struct CsReport {
    pub base: BigRational,
    pub left_child: BigRational,
    pub right_child: BigRational,
    pub equal: bool,
    /// The linear-dependence witness of the equality case for this family.
    pub dependence: Option<LinearDependenceWitness>,
}

/// Check the fold Cauchy–Schwarz inequality for one fold and one family,
/// classifying equality. The classification is cross-validated against
/// linear dependence of the two side flags on the atoms where the cut flag
/// is positive, and the scalar density is cross-validated against the
/// split identity `t(H,W) = ∫ t(F₁)·t(F₂)·t(F)`.
pub fn check_fold_cs(
    h: &ColoredBigraph,
    fold: &Fold,
    family: &BigraphonFamily,
) -> Result<CsReport> {
    let graph = h.graph();
    let base = colored_density(h, family)?;
    let child = |side: Side| -> Result<BigRational> {
        let folded = crate::percolation::apply_fold(graph, h.coloring(), fold, side)?;
        colored_density(&ColoredBigraph::new(graph.clone(), folded)?, family)
    };
    let left_child = child(Side::Left)?;
    let right_child = child(Side::Right)?;
    let lhs = &base * &base;
    let rhs = &left_child * &right_child;
    if lhs > rhs {
        return Err(Error::Internal(format!(
            "fold Cauchy–Schwarz violated: {base}² > {left_child} · {right_child}"
        )));
    }
    let equal = lhs == rhs;

    let (f1, f2) = core_flags_of_fold(h, fold)?;
    let cut_flag = {
        let keep: VertexSet = fold.fix().iter().copied().collect();
        let induced = h.induced(&keep)?;
        let theta: Vec<usize> = fold
            .fix()
            .iter()
            .map(|&v| {
                induced
                    .graph()
                    .vertex_by_label(graph.label(v))
                    .expect("cut vertex kept")
            })
            .collect();
        Flag::new(induced, theta)?
    };
    let t1 = flag_density(&f1, family)?;
    let t2 = flag_density(&f2, family)?;
    let tf = flag_density(&cut_flag, family)?;

    let mut total = BigRational::zero();
    let mut mask = Vec::with_capacity(tf.entries().len());
    for ((xs, ys, a), (b, f)) in t1
        .points()
        .into_iter()
        .zip(t2.entries().iter().zip(tf.entries()))
    {
        let mut weight = BigRational::one();
        for &x in &xs {
            weight *= family.left.weight(x);
        }
        for &y in &ys {
            weight *= family.right.weight(y);
        }
        mask.push(!weight.is_zero() && f.is_positive());
        total += weight * a * b * f;
    }
    if total != base {
        return Err(Error::Internal(
            "fold split identity failed: t(H,W) != ∫ t(F1)·t(F2)·t(F)".into(),
        ));
    }
    let dependence = proportionality_witness(&t1, &t2, &mask);
    if equal != dependence.is_some() {
        return Err(Error::Internal(
            "equality classification disagrees with linear dependence".into(),
        ));
    }
    Ok(CsReport {
        base,
        left_child,
        right_child,
        equal,
        dependence,
    })
}

/// Decide combinatorially whether equality holds in the fold
/// Cauchy–Schwarz inequality for every family: the connected cores of the
/// two side flags must be isomorphic.
pub fn cs_equality_characterization(h: &ColoredBigraph, fold: &Fold) -> Result<bool> {
    let (f1, f2) = core_flags_of_fold(h, fold)?;
    Ok(core_iso_decide(&f1, &f2)?.isomorphic)
}

#[derive(Debug, Clone)]
pub struct CoreIsoReport {
    pub isomorphic: bool,
    /// An isomorphism between the core flags, in the vertex indexing of
    /// the core restrictions.
    pub witness: Option<Perm>,
}

/// Decide whether the connected cores of two same-type flags are
/// isomorphic.
pub fn core_iso_decide(f1: &Flag, f2: &Flag) -> Result<CoreIsoReport> {
    if !f1.same_type(f2) {
        return Err(Error::Precondition("flags must have the same type".into()));
    }
    let c1 = f1.core_flag();
    let c2 = f2.core_flag();
    let witness = iso::flag_isomorphism(&c1, &c2)?;
    Ok(CoreIsoReport {
        isomorphic: witness.is_some(),
        witness,
    })
}

/// Upgrade a core isomorphism plus a host isomorphism to a full flag
/// isomorphism.
///
/// `core_iso` maps the connected core of `f1` onto that of `f2` (original
/// vertex indices on both sides) and must be a flag isomorphism of the
/// core restrictions; `host_iso` is a colored-bigraph isomorphism of the
/// hosts that may ignore the labels. Non-core components are relocated by
/// iterating `g ∘ f⁻¹` until they leave the core of `f2`; the result is
/// checked against the flag-isomorphism verifier before it is returned.
pub fn upgrade_core_iso(
    f1: &Flag,
    f2: &Flag,
    core_iso: &BTreeMap<usize, usize>,
    host_iso: &Perm,
) -> Result<Perm> {
    let core1 = f1.connected_core();
    let core2 = f2.connected_core();
    if core_iso.keys().copied().collect::<VertexSet>() != core1
        || core_iso.values().copied().collect::<VertexSet>() != core2
    {
        return Err(Error::Precondition(
            "core map must biject the connected cores".into(),
        ));
    }
    for (i, (&v, &w)) in f1.theta().iter().zip(f2.theta()).enumerate() {
        if core_iso.get(&v) != Some(&w) {
            return Err(Error::Precondition(format!(
                "core map must send label {} to label {}",
                i + 1,
                i + 1
            )));
        }
    }
    {
        let (g1, g2) = (f1.graph(), f2.graph());
        let (col1, col2) = (f1.host().coloring(), f2.host().coloring());
        for &u in &core1 {
            if g1.is_left(u) != g2.is_left(core_iso[&u]) {
                return Err(Error::Precondition("core map must preserve parts".into()));
            }
            for &v in &core1 {
                if !g1.is_left(u) || g1.is_left(v) {
                    continue;
                }
                match (
                    g1.edge_index(u, v),
                    g2.edge_index(core_iso[&u], core_iso[&v]),
                ) {
                    (None, None) => {}
                    (Some(e1), Some(e2)) => {
                        if col1.color_name(col1.colors()[e1])
                            != col2.color_name(col2.colors()[e2])
                        {
                            return Err(Error::Precondition(
                                "core map must preserve colors".into(),
                            ));
                        }
                    }
                    _ => {
                        return Err(Error::Precondition(
                            "core map must preserve edges".into(),
                        ))
                    }
                }
            }
        }
    }
    if !iso::is_colored_isomorphism(f1.host(), f2.host(), host_iso) {
        return Err(Error::Precondition(
            "host map must be a colored isomorphism".into(),
        ));
    }

    let comps2 = f2.graph().connected_components();
    let comp2_of = |v: usize| -> usize {
        comps2
            .iter()
            .position(|c| c.contains(&v))
            .expect("vertex in some component")
    };
    let core2_comps: BTreeSet<usize> = comps2
        .iter()
        .enumerate()
        .filter(|(_, c)| c.iter().all(|v| core2.contains(v)))
        .map(|(i, _)| i)
        .collect();
    let core_iso_inv: BTreeMap<usize, usize> = core_iso.iter().map(|(&a, &b)| (b, a)).collect();

    let n = f1.graph().vertex_count();
    let mut result = vec![usize::MAX; n];
    let k2 = f2.k();
    for v in 0..n {
        if let Some(&w) = core_iso.get(&v) {
            result[v] = w;
            continue;
        }
        // Relocate along g ∘ f⁻¹ until outside the core of f2.
        let mut w = host_iso[v];
        let mut hops = 0usize;
        while core2_comps.contains(&comp2_of(w)) {
            hops += 1;
            if hops > k2 + 1 {
                return Err(Error::Internal(
                    "component relocation failed to terminate".into(),
                ));
            }
            w = host_iso[core_iso_inv[&w]];
        }
        result[v] = w;
    }
    if !iso::is_flag_isomorphism(f1, f2, &result) {
        return Err(Error::Internal(
            "upgraded map fails the flag-isomorphism verifier".into(),
        ));
    }
    Ok(result)
}

/// One aggregated leaf term of a geometric-mean certificate.
#[derive(Debug, Clone)]
pub struct CertificateTerm {
    pub coloring: ColorVec,
    pub density: BigRational,
    pub exponent: Dyadic,
}

/// The right-hand side of a tree density comparison: a product of
/// densities with dyadic exponents summing to one.
#[derive(Debug, Clone)]
pub struct GeometricMeanCertificate {
    pub terms: Vec<CertificateTerm>,
}

#[derive(Debug, Clone)]
pub struct TreeCompareReport {
    /// Whether `t((G,c),W) ≤ ∏ t((G,ψ(η)),W)^{2^{-|η|}}` holds exactly.
    pub leq: bool,
    pub equality: bool,
    pub base: BigRational,
    pub certificate: GeometricMeanCertificate,
}

/// Compare the root density of a coloring tree against the geometric mean
/// of its leaf densities, exactly, by raising both sides to the `2^h`
/// power.
pub fn tree_density_compare(
    h: &ColoredBigraph,
    tree: &ColoringTree,
    family: &BigraphonFamily,
    height_cap: usize,
) -> Result<TreeCompareReport> {
    let height = tree
        .tree()
        .height()
        .ok_or_else(|| Error::InvalidParameter("coloring tree is empty".into()))?;
    if height > height_cap {
        return Err(Error::HeightCapExceeded {
            height,
            cap: height_cap,
        });
    }
    if tree.root_coloring() != h.coloring().colors() {
        return Err(Error::Precondition(
            "tree root must carry the coloring of the host".into(),
        ));
    }
    let measure = crate::tree::leaf_measure(tree, &BTreeSet::new());
    let base = colored_density(h, family)?;
    let mut terms = Vec::new();
    let mut rhs: Vec<(BigRational, u64)> = Vec::new();
    let mut exponent_total = 0u64;
    for (coloring, mass) in measure.per_coloring() {
        let colored = ColoredBigraph::new(
            h.graph().clone(),
            h.coloring().with_colors(coloring.clone())?,
        )?;
        let density = colored_density(&colored, family)?;
        // mass · 2^h is an integer because every leaf depth is at most h.
        let scaled = mass.to_rational() * BigRational::from_integer(BigInt::from(1u64) << height);
        let exp = scaled
            .to_integer()
            .to_u64()
            .ok_or_else(|| Error::Internal("certificate exponent overflow".into()))?;
        exponent_total += exp;
        rhs.push((density.clone(), exp));
        terms.push(CertificateTerm {
            coloring: coloring.clone(),
            density,
            exponent: mass.clone(),
        });
    }
    if exponent_total != 1u64 << height {
        return Err(Error::Internal(
            "certificate exponents do not sum to 1".into(),
        ));
    }
    let order = compare_geometric(&base, 1u64 << height, &rhs);
    Ok(TreeCompareReport {
        leq: order != Ordering::Greater,
        equality: order == Ordering::Equal,
        base,
        certificate: GeometricMeanCertificate { terms },
    })
}

/// Trial-divide `n` by primes below the limit; `None` when a cofactor
/// remains.
fn trial_factor(n: &BigUint, limit: u64) -> Option<BTreeMap<u64, u64>> {
    if n.is_zero() {
        return None;
    }
    let mut out = BTreeMap::new();
    let mut rest = n.clone();
    let one = BigUint::one();
    let mut p = 2u64;
    while p < limit {
        let bp = BigUint::from(p);
        if &bp * &bp > rest {
            break;
        }
        while (&rest % &bp).is_zero() {
            *out.entry(p).or_insert(0) += 1;
            rest /= &bp;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if rest == one {
        return Some(out);
    }
    if let Some(small) = rest.to_u64() {
        if small < limit.saturating_mul(limit) {
            // The cofactor is prime: it has no factor below its root.
            *out.entry(small).or_insert(0) += 1;
            return Some(out);
        }
    }
    None
}

/// Exact comparison of `lhs^{lhs_exp}` against `∏ baseᵉ` for non-negative
/// rational bases. Bases are factored into primes when trial division
/// succeeds, in which case exponent vectors settle most comparisons;
/// otherwise the comparison falls back to big-integer products.
fn compare_geometric(lhs: &BigRational, lhs_exp: u64, rhs: &[(BigRational, u64)]) -> Ordering {
    let lhs_zero = lhs.is_zero() && lhs_exp > 0;
    let rhs_zero = rhs.iter().any(|(b, e)| b.is_zero() && *e > 0);
    match (lhs_zero, rhs_zero) {
        (true, true) => return Ordering::Equal,
        (true, false) => return Ordering::Less,
        (false, true) => return Ordering::Greater,
        (false, false) => {}
    }

    let limit = 10_000u64;
    let factored = (|| -> Option<BTreeMap<u64, i128>> {
        let mut ledger: BTreeMap<u64, i128> = BTreeMap::new();
        let mut add = |n: &BigUint, scale: i128| -> Option<()> {
            if n.is_one() {
                return Some(());
            }
            for (p, e) in trial_factor(n, limit)? {
                let slot = ledger.entry(p).or_insert(0);
                *slot += scale * e as i128;
                if *slot == 0 {
                    ledger.remove(&p);
                }
            }
            Some(())
        };
        add(lhs.numer().magnitude(), lhs_exp as i128)?;
        add(lhs.denom().magnitude(), -(lhs_exp as i128))?;
        for (b, e) in rhs {
            add(b.numer().magnitude(), -(*e as i128))?;
            add(b.denom().magnitude(), *e as i128)?;
        }
        Some(ledger)
    })();

    if let Some(ledger) = factored {
        let pos = ledger.values().any(|&e| e > 0);
        let neg = ledger.values().any(|&e| e < 0);
        match (pos, neg) {
            (false, false) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            (true, true) => {
                // Mixed signs: multiply out the reduced ratio.
                let mut num = BigUint::one();
                let mut den = BigUint::one();
                for (p, e) in &ledger {
                    let base = BigUint::from(*p);
                    if *e > 0 {
                        num *= base.pow(*e as u32);
                    } else {
                        den *= base.pow((-e) as u32);
                    }
                }
                num.cmp(&den)
            }
        }
    } else {
        // Fallback: cross-multiplied big products.
        let mut left = lhs.numer().magnitude().pow(lhs_exp as u32);
        let mut right = lhs.denom().magnitude().pow(lhs_exp as u32);
        for (b, e) in rhs {
            left *= b.denom().magnitude().pow(*e as u32);
            right *= b.numer().magnitude().pow(*e as u32);
        }
        left.cmp(&right)
    }
}
