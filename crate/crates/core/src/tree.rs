//! Finite binary trees indexed by strings over {1, 2}, folding trees,
//! coloring trees and Cantor leaf measures.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::bigraph::Bigraph;
use crate::coloring::ColorVec;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::fold::{FoldSet, Side};

/// A node address: the sequence of child choices (1 = left, 2 = right)
/// from the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodePath(pub Vec<u8>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn child(&self, digit: u8) -> NodePath {
        debug_assert!(digit == 1 || digit == 2);
        let mut v = self.0.clone();
        v.push(digit);
        NodePath(v)
    }

    pub fn parent(&self) -> Option<NodePath> {
        if self.0.is_empty() {
            None
        } else {
            Some(NodePath(self.0[..self.0.len() - 1].to_vec()))
        }
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }

    /// Concatenation `self · other`.
    pub fn join(&self, other: &NodePath) -> NodePath {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        NodePath(v)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            for d in &self.0 {
                write!(f, "{d}")?;
            }
            Ok(())
        }
    }
}

/// A finite prefix-closed set of node addresses. The empty tree is allowed.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BinaryTree {
    nodes: BTreeSet<NodePath>,
}

impl BinaryTree {
    pub fn empty() -> Self {
        BinaryTree::default()
    }

    /// The tree containing only the root.
    pub fn root_only() -> Self {
        let mut nodes = BTreeSet::new();
        nodes.insert(NodePath::root());
        BinaryTree { nodes }
    }

    pub fn new(nodes: BTreeSet<NodePath>) -> Result<Self> {
        for node in &nodes {
            if let Some(p) = node.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "tree is not prefix-closed at {node}"
                    )));
                }
            }
        }
        Ok(BinaryTree { nodes })
    }

    pub fn nodes(&self) -> &BTreeSet<NodePath> {
        &self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn contains(&self, node: &NodePath) -> bool {
        self.nodes.contains(node)
    }

    /// `None` for the empty tree, otherwise the maximal node depth.
    pub fn height(&self) -> Option<usize> {
        self.nodes.iter().map(NodePath::depth).max()
    }

    pub fn is_leaf(&self, node: &NodePath) -> bool {
        self.contains(node)
            && !self.contains(&node.child(1))
            && !self.contains(&node.child(2))
    }

    pub fn leaves(&self) -> Vec<NodePath> {
        self.nodes
            .iter()
            .filter(|n| self.is_leaf(n))
            .cloned()
            .collect()
    }

    /// The 1-extension `T↑`: the root plus every child of a node of `T`.
    pub fn one_extension(&self) -> BinaryTree {
        let mut nodes = BTreeSet::new();
        nodes.insert(NodePath::root());
        for node in &self.nodes {
            nodes.insert(node.child(1));
            nodes.insert(node.child(2));
        }
        BinaryTree { nodes }
    }

    /// The restriction to depth at most `n`.
    pub fn restrict(&self, n: usize) -> BinaryTree {
        BinaryTree {
            nodes: self
                .nodes
                .iter()
                .filter(|node| node.depth() <= n)
                .cloned()
                .collect(),
        }
    }

    /// Graft a copy of `sub` at `prefix`. The prefix must be the root or
    /// have its parent in `self` so that the result stays prefix-closed.
    pub fn graft(&mut self, prefix: &NodePath, sub: &BinaryTree) -> Result<()> {
        if let Some(p) = prefix.parent() {
            if !self.nodes.contains(&p) {
                return Err(Error::InvalidParameter(
                    "graft point is not adjacent to the tree".into(),
                ));
            }
        }
        for node in &sub.nodes {
            self.nodes.insert(prefix.join(node));
        }
        Ok(())
    }

    /// Is `self` a subtree of `other` (as node sets)?
    pub fn is_subtree_of(&self, other: &BinaryTree) -> bool {
        self.nodes.is_subset(&other.nodes)
    }
}

/// A folding tree: a total labeling of a binary tree by folds, given as
/// indices into an ambient [`FoldSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldingTree {
    tree: BinaryTree,
    labels: BTreeMap<NodePath, usize>,
}

impl FoldingTree {
    pub fn empty() -> Self {
        FoldingTree {
            tree: BinaryTree::empty(),
            labels: BTreeMap::new(),
        }
    }

    pub fn new(tree: BinaryTree, labels: BTreeMap<NodePath, usize>, folds: &FoldSet) -> Result<Self> {
        for node in tree.nodes() {
            match labels.get(node) {
                None => {
                    return Err(Error::InvalidParameter(format!(
                        "folding tree node {node} is unlabeled"
                    )))
                }
                Some(&idx) if idx >= folds.len() => {
                    return Err(Error::InvalidParameter(format!(
                        "fold index {idx} out of range"
                    )))
                }
                _ => {}
            }
        }
        if labels.keys().any(|n| !tree.contains(n)) {
            return Err(Error::InvalidParameter(
                "folding tree has labels outside the tree".into(),
            ));
        }
        Ok(FoldingTree { tree, labels })
    }

    /// A single branch following `steps`; step `i` applies its fold on the
    /// given side, so the branch visits the corresponding children.
    pub fn branch(steps: &[(usize, Side)], folds: &FoldSet) -> Result<Self> {
        let mut tree = BinaryTree::empty();
        let mut labels = BTreeMap::new();
        let mut at = NodePath::root();
        for &(fold_idx, side) in steps {
            tree.nodes.insert(at.clone());
            labels.insert(at.clone(), fold_idx);
            at = at.child(match side {
                Side::Left => 1,
                Side::Right => 2,
            });
        }
        FoldingTree::new(tree, labels, folds)
    }

    pub fn tree(&self) -> &BinaryTree {
        &self.tree
    }

    pub fn label(&self, node: &NodePath) -> Option<usize> {
        self.labels.get(node).copied()
    }

    pub fn labels(&self) -> &BTreeMap<NodePath, usize> {
        &self.labels
    }

    /// Does `other` extend `self` (same labels on the smaller tree)?
    pub fn extends(&self, smaller: &FoldingTree) -> bool {
        smaller.tree.is_subtree_of(&self.tree)
            && smaller
                .labels
                .iter()
                .all(|(n, &l)| self.labels.get(n) == Some(&l))
    }

    /// Graft `sub` at `prefix`, translating its labels.
    pub fn graft(&mut self, prefix: &NodePath, sub: &FoldingTree) -> Result<()> {
        self.tree.graft(prefix, &sub.tree)?;
        for (node, &label) in &sub.labels {
            self.labels.insert(prefix.join(node), label);
        }
        Ok(())
    }
}

/// A coloring tree: a total labeling of a binary tree by raw colorings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoringTree {
    tree: BinaryTree,
    labels: BTreeMap<NodePath, ColorVec>,
}

impl ColoringTree {
    pub fn new(tree: BinaryTree, labels: BTreeMap<NodePath, ColorVec>) -> Result<Self> {
        for node in tree.nodes() {
            if !labels.contains_key(node) {
                return Err(Error::InvalidParameter(format!(
                    "coloring tree node {node} is unlabeled"
                )));
            }
        }
        Ok(ColoringTree { tree, labels })
    }

    pub fn tree(&self) -> &BinaryTree {
        &self.tree
    }

    pub fn label(&self, node: &NodePath) -> &ColorVec {
        &self.labels[node]
    }

    pub fn root_coloring(&self) -> &ColorVec {
        self.label(&NodePath::root())
    }
}

/// The coloring tree `φ[c]` induced by a folding tree on an initial
/// coloring: it lives on the 1-extension of the folding tree's index tree,
/// the root is labeled `c`, and the children of a node labeled `c'` carry
/// `c' ∘ f_L` and `c' ∘ f_L^*`.
pub fn induced_coloring_tree(
    graph: &Bigraph,
    folds: &FoldSet,
    phi: &FoldingTree,
    c: &ColorVec,
) -> Result<ColoringTree> {
    if c.len() != graph.edge_count() {
        return Err(Error::ColoringSizeMismatch {
            got: c.len(),
            expected: graph.edge_count(),
        });
    }
    let left_maps: Vec<Vec<usize>> = folds
        .iter()
        .map(|f| f.edge_map(graph, Side::Left))
        .collect();
    let right_maps: Vec<Vec<usize>> = folds
        .iter()
        .map(|f| f.edge_map(graph, Side::Right))
        .collect();
    let extension = phi.tree().one_extension();
    let mut labels: BTreeMap<NodePath, ColorVec> = BTreeMap::new();
    labels.insert(NodePath::root(), c.clone());
    // BTreeSet iteration visits parents before children (prefixes sort
    // first), so one pass suffices.
    for node in extension.nodes() {
        if node.depth() == 0 {
            continue;
        }
        let parent = node.parent().expect("non-root node");
        let digit = *node.0.last().unwrap();
        let fold_idx = phi.label(&parent).ok_or_else(|| {
            Error::InvalidParameter(format!("internal node {parent} has no fold"))
        })?;
        let map = match digit {
            1 => &left_maps[fold_idx],
            _ => &right_maps[fold_idx],
        };
        let parent_coloring = labels[&parent].clone();
        let child: ColorVec = map.iter().map(|&e| parent_coloring[e]).collect();
        labels.insert(node.clone(), child);
    }
    ColoringTree::new(extension, labels)
}

/// The Cantor measure of a coloring tree's leaves, with the mass of an
/// objective set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafMeasure {
    per_coloring: BTreeMap<ColorVec, Dyadic>,
    objective_mass: Dyadic,
}

impl LeafMeasure {
    pub fn per_coloring(&self) -> &BTreeMap<ColorVec, Dyadic> {
        &self.per_coloring
    }

    pub fn objective_mass(&self) -> &Dyadic {
        &self.objective_mass
    }
}

/// Aggregate the leaf masses `2^{-|η|}` of a coloring tree by coloring.
/// The masses always sum to exactly 1.
pub fn leaf_measure(tree: &ColoringTree, objectives: &BTreeSet<ColorVec>) -> LeafMeasure {
    let mut per_coloring: BTreeMap<ColorVec, Dyadic> = BTreeMap::new();
    let mut total = Dyadic::zero();
    let mut objective_mass = Dyadic::zero();
    for leaf in tree.tree().leaves() {
        let mass = Dyadic::pow2_inv(leaf.depth() as u32);
        let coloring = tree.label(&leaf);
        total = &total + &mass;
        if objectives.contains(coloring) {
            objective_mass = &objective_mass + &mass;
        }
        per_coloring
            .entry(coloring.clone())
            .and_modify(|m| *m = &*m + &mass)
            .or_insert(mass);
    }
    assert!(total.is_one(), "leaf masses of a finite tree sum to 1");
    LeafMeasure {
        per_coloring,
        objective_mass,
    }
}
