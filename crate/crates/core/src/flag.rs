//! Flags: colored bigraphs with an injective partial labeling of vertices.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::bigraph::{Bigraph, EdgeSet, VertexSet};
use crate::coloring::ColoredBigraph;
use crate::error::{Error, Result};

/// A flag `(H, θ)`: a colored bigraph with an injection `θ: [k] → V(H)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Flag {
    host: ColoredBigraph,
    /// `theta[i]` is the vertex labeled `i + 1`.
    theta: Vec<usize>,
}

impl Flag {
    pub fn new(host: ColoredBigraph, theta: Vec<usize>) -> Result<Self> {
        let n = host.graph().vertex_count();
        if let Some(&v) = theta.iter().find(|&&v| v >= n) {
            return Err(Error::VertexOutOfRange(v));
        }
        let distinct: BTreeSet<usize> = theta.iter().copied().collect();
        if distinct.len() != theta.len() {
            return Err(Error::ThetaNotInjective);
        }
        Ok(Flag { host, theta })
    }

    /// The flag with no labeled vertices.
    pub fn unlabeled(host: ColoredBigraph) -> Self {
        Flag {
            host,
            theta: Vec::new(),
        }
    }

    pub fn host(&self) -> &ColoredBigraph {
        &self.host
    }

    pub fn graph(&self) -> &Bigraph {
        self.host.graph()
    }

    pub fn theta(&self) -> &[usize] {
        &self.theta
    }

    pub fn k(&self) -> usize {
        self.theta.len()
    }

    /// `T(F)`: the set of labeled vertices.
    pub fn labeled_set(&self) -> VertexSet {
        self.theta.iter().copied().collect()
    }

    /// Labeled vertices in the left part, in label order.
    pub fn t1(&self) -> Vec<usize> {
        self.theta
            .iter()
            .copied()
            .filter(|&v| self.graph().is_left(v))
            .collect()
    }

    /// Labeled vertices in the right part, in label order.
    pub fn t2(&self) -> Vec<usize> {
        self.theta
            .iter()
            .copied()
            .filter(|&v| !self.graph().is_left(v))
            .collect()
    }

    /// The connected core `C(F)`: union of the components meeting `T(F)`.
    pub fn connected_core(&self) -> VertexSet {
        let labeled = self.labeled_set();
        let mut core = VertexSet::new();
        for comp in self.graph().connected_components() {
            if comp.iter().any(|v| labeled.contains(v)) {
                core.extend(comp);
            }
        }
        core
    }

    pub fn is_core_connected(&self) -> bool {
        self.connected_core().len() == self.graph().vertex_count()
    }

    /// The flag induced by `s`, which must contain every labeled vertex.
    pub fn restrict(&self, s: &VertexSet) -> Result<Flag> {
        if !self.labeled_set().is_subset(s) {
            return Err(Error::RestrictionDropsLabel);
        }
        let host = self.host.induced(s)?;
        // Recompute θ in the restricted index space via labels.
        let theta = self
            .theta
            .iter()
            .map(|&v| {
                host.graph()
                    .vertex_by_label(self.graph().label(v))
                    .expect("labeled vertex kept by restriction")
            })
            .collect();
        Flag::new(host, theta)
    }

    /// The restriction of the flag to its connected core.
    pub fn core_flag(&self) -> Flag {
        self.restrict(&self.connected_core())
            .expect("core contains all labels")
    }

    /// The flag with the given edge indices removed (labels untouched).
    pub fn remove_edges(&self, drop: &EdgeSet) -> Flag {
        Flag {
            host: self.host.remove_edges(drop),
            theta: self.theta.clone(),
        }
    }

    /// Same type: equal `k` and the label-induced map is an isomorphism of
    /// the labeled restrictions.
    pub fn same_type(&self, other: &Flag) -> bool {
        if self.k() != other.k() {
            return false;
        }
        let (g1, g2) = (self.graph(), other.graph());
        let (c1, c2) = (self.host.coloring(), other.host.coloring());
        for i in 0..self.k() {
            if g1.is_left(self.theta[i]) != g2.is_left(other.theta[i]) {
                return false;
            }
        }
        for i in 0..self.k() {
            for j in 0..self.k() {
                let (a, b) = (self.theta[i], self.theta[j]);
                let (x, y) = (other.theta[i], other.theta[j]);
                if !g1.is_left(a) || g1.is_left(b) {
                    continue;
                }
                let e1 = g1.edge_index(a, b);
                let e2 = g2.edge_index(x, y);
                match (e1, e2) {
                    (None, None) => {}
                    (Some(e1), Some(e2)) => {
                        if c1.color_name(c1.colors()[e1]) != c2.color_name(c2.colors()[e2]) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::coloring::Coloring;

    #[test]
    fn theta_must_be_injective() {
        let g = catalog::star(2).unwrap();
        let h = ColoredBigraph::monochromatic(g);
        assert!(matches!(
            Flag::new(h, vec![0, 0]),
            Err(Error::ThetaNotInjective)
        ));
    }

    #[test]
    fn core_of_unlabeled_flag_is_empty() {
        let g = catalog::star(2).unwrap();
        let f = Flag::unlabeled(ColoredBigraph::monochromatic(g));
        assert!(f.connected_core().is_empty());
    }

    #[test]
    fn core_picks_labeled_component() {
        // Two disjoint edges; label a vertex of the first one.
        let g = Bigraph::from_parts(2, 2, &[(0, 0), (1, 1)]).unwrap();
        let f = Flag::new(ColoredBigraph::monochromatic(g), vec![0]).unwrap();
        let core = f.connected_core();
        assert_eq!(core, [0, 2].into_iter().collect());
        assert!(!f.is_core_connected());
        let cf = f.core_flag();
        assert_eq!(cf.graph().vertex_count(), 2);
        assert_eq!(cf.k(), 1);
    }

    #[test]
    fn core_connected_flag_keeps_everything() {
        let g = catalog::even_cycle(3).unwrap();
        let f = Flag::new(ColoredBigraph::monochromatic(g), vec![0]).unwrap();
        assert!(f.is_core_connected());
        assert_eq!(f.connected_core().len(), 6);
    }

    #[test]
    fn restriction_must_keep_labels() {
        let g = catalog::star(2).unwrap();
        let f = Flag::new(ColoredBigraph::monochromatic(g), vec![1]).unwrap();
        let s: VertexSet = [0, 2].into_iter().collect();
        assert!(matches!(
            f.restrict(&s),
            Err(Error::RestrictionDropsLabel)
        ));
    }

    #[test]
    fn same_type_checks_labeled_part() {
        let g = catalog::star(2).unwrap();
        let mono = ColoredBigraph::monochromatic(g.clone());
        // Label the center and one leaf: the labeled restriction has an edge.
        let f1 = Flag::new(mono.clone(), vec![0, 1]).unwrap();
        let f2 = Flag::new(mono.clone(), vec![0, 2]).unwrap();
        assert!(f1.same_type(&f2));
        // Two labeled leaves: no edge between labels; different type.
        let f3 = Flag::new(mono, vec![1, 2]).unwrap();
        assert!(!f1.same_type(&f3));

        let bi = ColoredBigraph::new(
            g.clone(),
            Coloring::from_ids(2, vec![0, 1]).unwrap(),
        )
        .unwrap();
        let f4 = Flag::new(bi.clone(), vec![0, 1]).unwrap();
        let f5 = Flag::new(bi, vec![0, 2]).unwrap();
        // Labeled edges carry different colors.
        assert!(!f4.same_type(&f5));
    }
}
