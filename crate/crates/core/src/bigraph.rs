//! Bigraphs: bipartite graphs with a fixed bipartition and edges oriented
//! from the left part to the right part.
//!
//! Vertices are addressed by a single index space `0..v(G)`: indices
//! `0..v1(G)` are the left part, `v1(G)..v(G)` the right part. Every vertex
//! carries a stable string label; labels are what appear in documents and
//! reports, indices are what the algorithms use.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A set of vertex indices in canonical (sorted) form.
pub type VertexSet = BTreeSet<usize>;

/// A set of edge indices in canonical (sorted) form.
pub type EdgeSet = BTreeSet<usize>;

/// A finite bigraph `(V1, V2, E)` with `E ⊆ V1 × V2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bigraph {
    v1_labels: Vec<String>,
    v2_labels: Vec<String>,
    /// Edges as (left index, right index) pairs in global indices,
    /// sorted ascending and duplicate-free.
    edges: Vec<(usize, usize)>,
}

impl Bigraph {
    /// Build a bigraph from labeled parts and label pairs.
    pub fn new(
        v1_labels: Vec<String>,
        v2_labels: Vec<String>,
        edge_labels: &[(String, String)],
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for l in &v1_labels {
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        for l in &v2_labels {
            if v1_labels.contains(l) {
                return Err(Error::OverlappingParts(l.clone()));
            }
            if !seen.insert(l.clone()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let index: BTreeMap<&str, usize> = v1_labels
            .iter()
            .chain(v2_labels.iter())
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let n1 = v1_labels.len();
        let mut edges = Vec::with_capacity(edge_labels.len());
        for (a, b) in edge_labels {
            let &u = index
                .get(a.as_str())
                .ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let &w = index
                .get(b.as_str())
                .ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            if u >= n1 || w < n1 {
                return Err(Error::BadEdgeOrientation(a.clone(), b.clone()));
            }
            edges.push((u, w));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|p| p[0] == p[1]) {
            let (u, w) = edges
                .windows(2)
                .find(|p| p[0] == p[1])
                .map(|p| p[0])
                .unwrap();
            return Err(Error::DuplicateEdge(
                v1_labels[u].clone(),
                v2_labels[w - n1].clone(),
            ));
        }
        Ok(Bigraph {
            v1_labels,
            v2_labels,
            edges,
        })
    }

    /// Build from part sizes and (left-local, right-local) index pairs,
    /// with labels `u1..`, `v1..`.
    pub fn from_parts(n1: usize, n2: usize, local_edges: &[(usize, usize)]) -> Result<Self> {
        let v1: Vec<String> = (1..=n1).map(|i| format!("u{i}")).collect();
        let v2: Vec<String> = (1..=n2).map(|i| format!("v{i}")).collect();
        let labeled: Vec<(String, String)> = local_edges
            .iter()
            .map(|&(i, j)| {
                if i >= n1 || j >= n2 {
                    Err(Error::VertexOutOfRange(i.max(j)))
                } else {
                    Ok((v1[i].clone(), v2[j].clone()))
                }
            })
            .collect::<Result<_>>()?;
        Bigraph::new(v1, v2, &labeled)
    }

    pub fn v1_count(&self) -> usize {
        self.v1_labels.len()
    }

    pub fn v2_count(&self) -> usize {
        self.v2_labels.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.v1_labels.len() + self.v2_labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_left(&self, v: usize) -> bool {
        v < self.v1_labels.len()
    }

    /// All vertex indices, left part first.
    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        0..self.vertex_count()
    }

    pub fn left_vertices(&self) -> impl Iterator<Item = usize> {
        0..self.v1_count()
    }

    pub fn right_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.v1_count()..self.vertex_count()
    }

    /// Edges as (left, right) global index pairs, in canonical order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self, v: usize) -> &str {
        let n1 = self.v1_labels.len();
        if v < n1 {
            &self.v1_labels[v]
        } else {
            &self.v2_labels[v - n1]
        }
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.v1_labels
            .iter()
            .chain(self.v2_labels.iter())
            .position(|l| l == label)
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.edges.binary_search(&(u, w)).is_ok()
    }

    /// Canonical index of an edge, if present.
    pub fn edge_index(&self, u: usize, w: usize) -> Option<usize> {
        self.edges.binary_search(&(u, w)).ok()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = if self.is_left(v) {
            self.edges
                .iter()
                .filter(|&&(u, _)| u == v)
                .map(|&(_, w)| w)
                .collect()
        } else {
            self.edges
                .iter()
                .filter(|&&(_, w)| w == v)
                .map(|&(u, _)| u)
                .collect()
        };
        out.sort_unstable();
        out
    }

    fn check_subset(&self, s: &VertexSet) -> Result<()> {
        if let Some(&v) = s.iter().find(|&&v| v >= self.vertex_count()) {
            return Err(Error::VertexOutOfRange(v));
        }
        Ok(())
    }

    /// The bigraph induced by the vertex set `s`, keeping labels.
    ///
    /// Also returns the map old index -> new index.
    pub fn induced(&self, s: &VertexSet) -> Result<(Bigraph, BTreeMap<usize, usize>)> {
        self.check_subset(s)?;
        let n1 = self.v1_count();
        let keep_left: Vec<usize> = s.iter().copied().filter(|&v| v < n1).collect();
        let keep_right: Vec<usize> = s.iter().copied().filter(|&v| v >= n1).collect();
        let mut remap = BTreeMap::new();
        for (new, &old) in keep_left.iter().chain(keep_right.iter()).enumerate() {
            remap.insert(old, new);
        }
        let v1: Vec<String> = keep_left.iter().map(|&v| self.label(v).to_owned()).collect();
        let v2: Vec<String> = keep_right
            .iter()
            .map(|&v| self.label(v).to_owned())
            .collect();
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|&&(u, w)| s.contains(&u) && s.contains(&w))
            .map(|&(u, w)| (remap[&u], remap[&w]))
            .collect();
        edges.sort_unstable();
        Ok((
            Bigraph {
                v1_labels: v1,
                v2_labels: v2,
                edges,
            },
            remap,
        ))
    }

    /// `G − S`: the bigraph induced by the complement of `s`.
    pub fn remove_vertices(&self, s: &VertexSet) -> Result<(Bigraph, BTreeMap<usize, usize>)> {
        self.check_subset(s)?;
        let keep: VertexSet = self.vertices().filter(|v| !s.contains(v)).collect();
        self.induced(&keep)
    }

    /// The bigraph with the given edge indices removed.
    pub fn remove_edges(&self, drop: &EdgeSet) -> Bigraph {
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !drop.contains(i))
            .map(|(_, &e)| e)
            .collect();
        Bigraph {
            v1_labels: self.v1_labels.clone(),
            v2_labels: self.v2_labels.clone(),
            edges,
        }
    }

    /// Connected components as vertex sets, sorted by least vertex.
    pub fn connected_components(&self) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Connected components of `G − s`, expressed in the original vertex
    /// indices.
    pub fn components_of_complement(&self, s: &VertexSet) -> Vec<VertexSet> {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        for &v in s {
            seen[v] = true;
        }
        let mut comps = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = VertexSet::new();
            let mut queue = VecDeque::from([start]);
            seen[start] = true;
            while let Some(v) = queue.pop_front() {
                comp.insert(v);
                for w in self.neighbors(v) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comps.push(comp);
        }
        comps
    }

    /// Empty and one-vertex graphs count as connected.
    pub fn is_connected(&self) -> bool {
        self.connected_components().len() <= 1
    }

    /// Is `s` a vertex cut, i.e. is `G − s` disconnected?
    pub fn is_cut(&self, s: &VertexSet) -> Result<bool> {
        let (rest, _) = self.remove_vertices(s)?;
        Ok(rest.connected_components().len() >= 2)
    }

    /// Does `s` contain no edge of the graph?
    pub fn is_independent_set(&self, s: &VertexSet) -> Result<bool> {
        self.check_subset(s)?;
        Ok(self
            .edges
            .iter()
            .all(|&(u, w)| !(s.contains(&u) && s.contains(&w))))
    }

    /// Image of an edge under a vertex map, if it is again an edge.
    pub fn map_edge(&self, map: &[usize], edge_idx: usize) -> Option<usize> {
        let (u, w) = self.edges[edge_idx];
        self.edge_index(map[u], map[w])
    }

    /// Does `map` send vertices part-preservingly and edges to edges?
    pub fn is_endomorphism_map(&self, map: &[usize]) -> bool {
        let n = self.vertex_count();
        if map.len() != n || map.iter().any(|&v| v >= n) {
            return false;
        }
        let n1 = self.v1_count();
        if (0..n).any(|v| (v < n1) != (map[v] < n1)) {
            return false;
        }
        self.edges.iter().all(|&(u, w)| self.has_edge(map[u], map[w]))
    }

    /// Is `map` a part-preserving bijection preserving edges and non-edges?
    pub fn is_automorphism_map(&self, map: &[usize]) -> bool {
        if !self.is_endomorphism_map(map) {
            return false;
        }
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        for &v in map {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        // Bijective + edges preserved; count forces non-edges preserved.
        true
    }
}

/// A total map `V(G) → V(G)` that preserves parts and sends edges to edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Endomorphism {
    map: Vec<usize>,
}

impl Endomorphism {
    pub fn new(graph: &Bigraph, map: Vec<usize>) -> Result<Self> {
        if graph.is_endomorphism_map(&map) {
            Ok(Endomorphism { map })
        } else {
            Err(Error::NotAFold("not a graph endomorphism".into()))
        }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, v: usize) -> usize {
        self.map[v]
    }

    /// Image of the map as a sorted vertex set.
    pub fn image(&self) -> VertexSet {
        self.map.iter().copied().collect()
    }
}
