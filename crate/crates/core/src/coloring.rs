//! Edge colorings, colored bigraphs and left (vertex) colorings.
//!
//! Color values are arbitrary strings at the API boundary and are interned
//! to dense `u32` ids against a palette internally. The raw assignment
//! vector (`Vec<u32>` indexed by edge) is the state the search engines work
//! with.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::bigraph::{Bigraph, EdgeSet, VertexSet};
use crate::error::{Error, Result};

/// Raw coloring state: one palette id per edge index.
pub type ColorVec = Vec<u32>;

/// A total edge coloring over a declared palette.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Coloring {
    palette: Vec<String>,
    colors: ColorVec,
}

impl Coloring {
    pub fn new(palette: Vec<String>, colors: ColorVec) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &palette {
            if !seen.insert(p) {
                return Err(Error::DuplicateLabel(p.clone()));
            }
        }
        if colors.iter().any(|&c| c as usize >= palette.len()) {
            return Err(Error::InvalidParameter("color id outside palette".into()));
        }
        Ok(Coloring { palette, colors })
    }

    /// Constant coloring of `edges` edges with a one-color palette.
    pub fn monochromatic(edges: usize, color: &str) -> Self {
        Coloring {
            palette: vec![color.to_string()],
            colors: vec![0; edges],
        }
    }

    /// Injective coloring `edge i -> color i` over palette `c1..ce`.
    pub fn rainbow(edges: usize) -> Self {
        Coloring {
            palette: (1..=edges).map(|i| format!("c{i}")).collect(),
            colors: (0..edges as u32).collect(),
        }
    }

    /// Coloring with the given per-edge ids over the canonical palette `1..k`.
    pub fn from_ids(num_colors: usize, colors: ColorVec) -> Result<Self> {
        Coloring::new((1..=num_colors).map(|i| i.to_string()).collect(), colors)
    }

    /// Build from a map edge-label-pair -> color string; palette is the
    /// sorted set of used colors.
    pub fn from_map(graph: &Bigraph, map: &BTreeMap<(String, String), String>) -> Result<Self> {
        if map.len() != graph.edge_count() {
            return Err(Error::ColoringSizeMismatch {
                got: map.len(),
                expected: graph.edge_count(),
            });
        }
        let palette: Vec<String> = map
            .values()
            .cloned()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let mut colors = vec![0u32; graph.edge_count()];
        for ((a, b), col) in map {
            let u = graph
                .vertex_by_label(a)
                .ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let w = graph
                .vertex_by_label(b)
                .ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            let e = graph
                .edge_index(u, w)
                .ok_or_else(|| Error::UnknownVertex(format!("{a}|{b} is not an edge")))?;
            colors[e] = palette.iter().position(|p| p == col).unwrap() as u32;
        }
        Coloring::new(palette, colors)
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn colors(&self) -> &ColorVec {
        &self.colors
    }

    pub fn color_name(&self, id: u32) -> &str {
        &self.palette[id as usize]
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// The set of color ids actually used.
    pub fn image(&self) -> BTreeSet<u32> {
        self.colors.iter().copied().collect()
    }

    pub fn is_monochromatic(&self) -> bool {
        self.image().len() <= 1
    }

    pub fn is_rainbow(&self) -> bool {
        self.image().len() == self.colors.len()
    }

    /// Same palette, different assignment vector.
    pub fn with_colors(&self, colors: ColorVec) -> Result<Self> {
        Coloring::new(self.palette.clone(), colors)
    }
}

/// A bigraph together with a total edge coloring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ColoredBigraph {
    graph: Bigraph,
    coloring: Coloring,
}

impl ColoredBigraph {
    pub fn new(graph: Bigraph, coloring: Coloring) -> Result<Self> {
        if coloring.len() != graph.edge_count() {
            return Err(Error::ColoringSizeMismatch {
                got: coloring.len(),
                expected: graph.edge_count(),
            });
        }
        Ok(ColoredBigraph { graph, coloring })
    }

    /// The graph with a constant coloring.
    pub fn monochromatic(graph: Bigraph) -> Self {
        let coloring = Coloring::monochromatic(graph.edge_count(), "1");
        ColoredBigraph { graph, coloring }
    }

    /// The graph with an injective coloring.
    pub fn rainbow(graph: Bigraph) -> Self {
        let coloring = Coloring::rainbow(graph.edge_count());
        ColoredBigraph { graph, coloring }
    }

    pub fn graph(&self) -> &Bigraph {
        &self.graph
    }

    pub fn coloring(&self) -> &Coloring {
        &self.coloring
    }

    pub fn edge_color(&self, edge_idx: usize) -> u32 {
        self.coloring.colors()[edge_idx]
    }

    /// The colored bigraph induced by a vertex set.
    pub fn induced(&self, s: &VertexSet) -> Result<ColoredBigraph> {
        let (sub, _) = self.graph.induced(s)?;
        let mut colors = Vec::with_capacity(sub.edge_count());
        for &(u, w) in sub.edges() {
            let ou = self.graph.vertex_by_label(sub.label(u)).unwrap();
            let ow = self.graph.vertex_by_label(sub.label(w)).unwrap();
            colors.push(self.coloring.colors()[self.graph.edge_index(ou, ow).unwrap()]);
        }
        ColoredBigraph::new(sub, self.coloring.with_colors(colors)?)
    }

    /// The colored bigraph with the given edge indices removed.
    pub fn remove_edges(&self, drop: &EdgeSet) -> ColoredBigraph {
        let graph = self.graph.remove_edges(drop);
        let colors: ColorVec = self
            .coloring
            .colors()
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, &c)| c)
            .collect();
        ColoredBigraph {
            graph,
            coloring: Coloring {
                palette: self.coloring.palette.clone(),
                colors,
            },
        }
    }

    /// `H_i`: the bigraph on the same vertices keeping only edges of color `i`.
    pub fn color_class_bigraph(&self, color: u32) -> Bigraph {
        let drop: EdgeSet = (0..self.graph.edge_count())
            .filter(|&e| self.coloring.colors()[e] != color)
            .collect();
        self.graph.remove_edges(&drop)
    }

    pub fn is_monochromatic(&self) -> bool {
        self.coloring.is_monochromatic()
    }
}

/// A total coloring of the left vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LeftColoring {
    palette: Vec<String>,
    colors: Vec<u32>,
}

impl LeftColoring {
    pub fn new(palette: Vec<String>, colors: Vec<u32>) -> Result<Self> {
        let c = Coloring::new(palette, colors)?;
        Ok(LeftColoring {
            palette: c.palette,
            colors: c.colors,
        })
    }

    pub fn monochromatic(n1: usize, color: &str) -> Self {
        LeftColoring {
            palette: vec![color.to_string()],
            colors: vec![0; n1],
        }
    }

    pub fn rainbow(n1: usize) -> Self {
        LeftColoring {
            palette: (1..=n1).map(|i| format!("l{i}")).collect(),
            colors: (0..n1 as u32).collect(),
        }
    }

    pub fn from_ids(num_colors: usize, colors: Vec<u32>) -> Result<Self> {
        LeftColoring::new((1..=num_colors).map(|i| i.to_string()).collect(), colors)
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn image(&self) -> BTreeSet<u32> {
        self.colors.iter().copied().collect()
    }

    pub fn is_monochromatic(&self) -> bool {
        self.image().len() <= 1
    }

    pub fn is_rainbow(&self) -> bool {
        self.image().len() == self.colors.len()
    }
}

/// The product coloring `(l ⊗ c)(u, v) = (l(u), c(u, v))` over the product
/// palette.
pub fn tensor(graph: &Bigraph, left: &LeftColoring, coloring: &Coloring) -> Result<Coloring> {
    if left.len() != graph.v1_count() {
        return Err(Error::ColoringSizeMismatch {
            got: left.len(),
            expected: graph.v1_count(),
        });
    }
    if coloring.len() != graph.edge_count() {
        return Err(Error::ColoringSizeMismatch {
            got: coloring.len(),
            expected: graph.edge_count(),
        });
    }
    // Unambiguous pair encoding: escape separators inside components.
    let escape = |s: &str| s.replace('\\', "\\\\").replace(',', "\\,");
    // Full product palette, row-major over (left color, edge color).
    let mut palette = Vec::with_capacity(left.palette.len() * coloring.palette().len());
    for a in &left.palette {
        for b in coloring.palette() {
            palette.push(format!("({},{})", escape(a), escape(b)));
        }
    }
    let width = coloring.palette().len() as u32;
    let colors: ColorVec = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, &(u, _))| left.colors[u] * width + coloring.colors()[e])
        .collect();
    Coloring::new(palette, colors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn palette_and_image() {
        let c = Coloring::from_ids(3, vec![0, 0, 2]).unwrap();
        assert_eq!(c.image().len(), 2);
        assert!(!c.is_monochromatic());
        assert!(!c.is_rainbow());
        assert!(Coloring::monochromatic(4, "x").is_monochromatic());
        assert!(Coloring::rainbow(4).is_rainbow());
    }

    #[test]
    fn coloring_must_cover_edges() {
        let g = catalog::even_cycle(2).unwrap();
        let c = Coloring::monochromatic(3, "1");
        assert!(matches!(
            ColoredBigraph::new(g, c),
            Err(Error::ColoringSizeMismatch { .. })
        ));
    }

    #[test]
    fn color_class_bigraph_keeps_vertices() {
        let g = catalog::even_cycle(2).unwrap();
        let h = ColoredBigraph::new(
            g.clone(),
            Coloring::from_ids(2, vec![0, 1, 0, 1]).unwrap(),
        )
        .unwrap();
        let h0 = h.color_class_bigraph(0);
        assert_eq!(h0.vertex_count(), 4);
        assert_eq!(h0.edge_count(), 2);
    }

    #[test]
    fn tensor_shapes() {
        let g = catalog::even_cycle(2).unwrap();
        let mono_l = LeftColoring::monochromatic(2, "a");
        let mono_c = Coloring::monochromatic(4, "b");
        let t = tensor(&g, &mono_l, &mono_c).unwrap();
        assert!(t.is_monochromatic());

        let rain_l = LeftColoring::rainbow(2);
        let t2 = tensor(&g, &rain_l, &mono_c).unwrap();
        assert_eq!(t2.image().len(), 2);
    }

    #[test]
    fn tensor_single_left_vertex_is_monochromatic() {
        let g = catalog::star(2).unwrap();
        let rain_l = LeftColoring::rainbow(1);
        let c = Coloring::monochromatic(2, "b");
        assert!(tensor(&g, &rain_l, &c).unwrap().is_monochromatic());
    }
}
