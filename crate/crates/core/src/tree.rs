//! Binary decision trees over threshold cuts.
//!
//! Trees live in an id-keyed arena (a sorted map, which doubles as the
//! on-disk `nodes` table). An inner node — a *cut* — tests one feature
//! against a threshold; an example goes left when its value is at or below
//! the threshold, right otherwise. Node ids are stable across the pruning
//! operations: a pruned tree keeps the ids of every surviving node, which
//! is what lets tests and witness checks speak about "the same node"
//! before and after pruning.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{majority_label, Dataset, FeatureBox, Label};
use crate::scalar::Scalar;

pub type NodeId = u32;

#[derive(Debug, Clone, PartialEq)]
pub enum Node<S> {
    Cut {
        feature: usize,
        threshold: S,
        left: NodeId,
        right: NodeId,
    },
    Leaf {
        label: Label,
    },
}

impl<S> Node<S> {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("node {referenced} is referenced by node {by} but does not exist")]
    MissingNode { by: NodeId, referenced: NodeId },
    #[error("root node {0} does not exist")]
    MissingRoot(NodeId),
    #[error("node {0} has more than one parent")]
    MultipleParents(NodeId),
    #[error("cycle through node {0}")]
    Cycle(NodeId),
    #[error("node {0} is not reachable from the root")]
    Unreachable(NodeId),
    #[error("cut {node} tests feature {feature} but the tree is declared over {d} features")]
    FeatureOutOfRange { node: NodeId, feature: usize, d: usize },
}

/// An immutable binary decision tree over `d` features.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionTree<S: Scalar> {
    d: usize,
    root: NodeId,
    nodes: BTreeMap<NodeId, Node<S>>,
}

impl<S: Scalar> DecisionTree<S> {
    /// Validate and assemble a tree from an id-keyed node table. Every node
    /// must be reachable from the root through exactly one parent, and all
    /// cut features must lie below `d`.
    pub fn from_parts(
        d: usize,
        root: NodeId,
        nodes: BTreeMap<NodeId, Node<S>>,
    ) -> Result<Self, TreeError> {
        if !nodes.contains_key(&root) {
            return Err(TreeError::MissingRoot(root));
        }
        let mut parent: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        for (&id, node) in &nodes {
            if let Node::Cut {
                feature,
                left,
                right,
                ..
            } = node
            {
                if *feature >= d {
                    return Err(TreeError::FeatureOutOfRange {
                        node: id,
                        feature: *feature,
                        d,
                    });
                }
                for child in [*left, *right] {
                    if !nodes.contains_key(&child) {
                        return Err(TreeError::MissingNode {
                            by: id,
                            referenced: child,
                        });
                    }
                    match parent.entry(child) {
                        Entry::Vacant(e) => {
                            e.insert(id);
                        }
                        Entry::Occupied(_) => return Err(TreeError::MultipleParents(child)),
                    }
                }
            }
        }
        if parent.contains_key(&root) {
            // The root has a parent, so following parents from the root
            // must eventually repeat: report the cycle.
            return Err(TreeError::Cycle(root));
        }
        // Reachability (with the single-parent and root checks above, the
        // reachable part is acyclic; anything left over is detached).
        let mut seen: BTreeSet<NodeId> = BTreeSet::new();
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            if !seen.insert(id) {
                return Err(TreeError::Cycle(id));
            }
            if let Node::Cut { left, right, .. } = &nodes[&id] {
                stack.push(*left);
                stack.push(*right);
            }
        }
        if let Some(&orphan) = nodes.keys().find(|id| !seen.contains(id)) {
            return Err(TreeError::Unreachable(orphan));
        }
        Ok(DecisionTree { d, root, nodes })
    }

    /// The one-leaf tree.
    pub fn leaf(d: usize, label: Label) -> Self {
        let mut nodes = BTreeMap::new();
        nodes.insert(0, Node::Leaf { label });
        DecisionTree { d, root: 0, nodes }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node<S> {
        &self.nodes[&id]
    }

    pub fn nodes(&self) -> impl Iterator<Item = (NodeId, &Node<S>)> {
        self.nodes.iter().map(|(&id, n)| (id, n))
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Number of cuts (inner nodes); the tree size `s`.
    pub fn num_cuts(&self) -> usize {
        self.nodes.values().filter(|n| !n.is_leaf()).count()
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[&id].is_leaf()
    }

    pub fn children(&self, id: NodeId) -> Option<(NodeId, NodeId)> {
        match &self.nodes[&id] {
            Node::Cut { left, right, .. } => Some((*left, *right)),
            Node::Leaf { .. } => None,
        }
    }

    pub fn parent_map(&self) -> BTreeMap<NodeId, NodeId> {
        let mut parent = BTreeMap::new();
        for (&id, node) in &self.nodes {
            if let Node::Cut { left, right, .. } = node {
                parent.insert(*left, id);
                parent.insert(*right, id);
            }
        }
        parent
    }

    /// Node ids of the subtree rooted at `v`, preorder.
    pub fn subtree_ids(&self, v: NodeId) -> Vec<NodeId> {
        let mut out = Vec::new();
        let mut stack = vec![v];
        while let Some(id) = stack.pop() {
            out.push(id);
            if let Node::Cut { left, right, .. } = &self.nodes[&id] {
                stack.push(*right);
                stack.push(*left);
            }
        }
        out
    }

    /// Number of cuts in the subtree rooted at `v`.
    pub fn subtree_cuts(&self, v: NodeId) -> usize {
        self.subtree_ids(v)
            .iter()
            .filter(|id| !self.nodes[id].is_leaf())
            .count()
    }

    /// Postorder over all nodes (children before parents).
    pub fn postorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded || self.is_leaf(id) {
                out.push(id);
                continue;
            }
            let (l, r) = self.children(id).unwrap();
            stack.push((id, true));
            stack.push((r, false));
            stack.push((l, false));
        }
        out
    }

    pub fn fresh_id(&self) -> NodeId {
        self.nodes.keys().next_back().map_or(0, |&m| m + 1)
    }

    /// Route one example to its leaf.
    pub fn route(&self, values: &[S]) -> NodeId {
        let mut at = self.root;
        loop {
            match &self.nodes[&at] {
                Node::Leaf { .. } => return at,
                Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if values[*feature].total_cmp(threshold) != std::cmp::Ordering::Greater {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// The label an example receives.
    pub fn classify(&self, values: &[S]) -> Label {
        match &self.nodes[&self.route(values)] {
            Node::Leaf { label } => *label,
            Node::Cut { .. } => unreachable!("route ends at a leaf"),
        }
    }

    /// Training errors on a dataset.
    pub fn errors_on(&self, data: &Dataset<S>) -> usize {
        data.examples()
            .iter()
            .filter(|e| self.classify(&e.values) != e.label)
            .count()
    }

    /// Per-node region of the feature space: the box an example must lie in
    /// to reach the node. The root gets the full box.
    pub fn path_boxes(&self) -> BTreeMap<NodeId, FeatureBox<S>> {
        let mut out = BTreeMap::new();
        let mut stack = vec![(self.root, FeatureBox::full(self.d))];
        while let Some((id, b)) = stack.pop() {
            if let Node::Cut {
                feature,
                threshold,
                left,
                right,
            } = &self.nodes[&id]
            {
                stack.push((*left, b.tighten_upper(*feature, threshold)));
                stack.push((*right, b.tighten_lower(*feature, threshold)));
            }
            out.insert(id, b);
        }
        out
    }

    /// Canonical structural identity: two trees get the same key iff they
    /// have the same shape, the same cut features/thresholds, and the same
    /// leaf labels — regardless of node ids. (A postfix walk of a full
    /// binary tree is uniquely decodable, so the token list is a key.)
    pub fn shape_key(&self) -> ShapeKey<S> {
        let mut toks = Vec::with_capacity(self.nodes.len());
        for id in self.postorder() {
            match &self.nodes[&id] {
                Node::Leaf { label } => toks.push(ShapeTok::Leaf(*label)),
                Node::Cut {
                    feature, threshold, ..
                } => toks.push(ShapeTok::Cut(*feature, threshold.key())),
            }
        }
        toks
    }

    /// Size-style metrics used for reporting and test budgets.
    pub fn metrics(&self) -> TreeMetrics {
        let mut depth = 0usize;
        let mut max_path_features = 0usize;
        let mut max_path_feature_thresholds = 0usize;
        // DFS with an explicit path of (feature, threshold-key) steps.
        let mut path: Vec<(usize, <S as Scalar>::Key)> = Vec::new();
        self.metrics_walk(
            self.root,
            0,
            &mut path,
            &mut depth,
            &mut max_path_features,
            &mut max_path_feature_thresholds,
        );
        TreeMetrics {
            s: self.num_cuts(),
            depth,
            max_path_features,
            max_path_feature_thresholds,
        }
    }

    fn metrics_walk(
        &self,
        id: NodeId,
        edges: usize,
        path: &mut Vec<(usize, <S as Scalar>::Key)>,
        depth: &mut usize,
        max_path_features: &mut usize,
        max_path_feature_thresholds: &mut usize,
    ) {
        match &self.nodes[&id] {
            Node::Leaf { .. } => {
                *depth = (*depth).max(edges);
                let mut feats: Vec<usize> = path.iter().map(|(f, _)| *f).collect();
                feats.sort_unstable();
                feats.dedup();
                *max_path_features = (*max_path_features).max(feats.len());
                for &f in &feats {
                    let mut thrs: Vec<&<S as Scalar>::Key> = path
                        .iter()
                        .filter(|(pf, _)| *pf == f)
                        .map(|(_, k)| k)
                        .collect();
                    thrs.sort();
                    thrs.dedup();
                    *max_path_feature_thresholds = (*max_path_feature_thresholds).max(thrs.len());
                }
            }
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                path.push((*feature, threshold.key()));
                self.metrics_walk(
                    *left,
                    edges + 1,
                    path,
                    depth,
                    max_path_features,
                    max_path_feature_thresholds,
                );
                self.metrics_walk(
                    *right,
                    edges + 1,
                    path,
                    depth,
                    max_path_features,
                    max_path_feature_thresholds,
                );
                path.pop();
            }
        }
    }

    /// Check the two conditions that make a tree worth pruning at all:
    /// every leaf receives at least one example, and every leaf is labeled
    /// with a most-frequent label of its examples (either label qualifies
    /// on a tie).
    pub fn validate_reasonable(&self, data: &Dataset<S>) -> ReasonablenessReport {
        let mut blue: BTreeMap<NodeId, usize> = BTreeMap::new();
        let mut red: BTreeMap<NodeId, usize> = BTreeMap::new();
        for e in data.examples() {
            let leaf = self.route(&e.values);
            match e.label {
                Label::Blue => *blue.entry(leaf).or_default() += 1,
                Label::Red => *red.entry(leaf).or_default() += 1,
            }
        }
        let mut empty_leaves = Vec::new();
        let mut misl_labeled = Vec::new();
        for (&id, node) in &self.nodes {
            if let Node::Leaf { label } = node {
                let nb = blue.get(&id).copied().unwrap_or(0);
                let nr = red.get(&id).copied().unwrap_or(0);
                if nb + nr == 0 {
                    empty_leaves.push(id);
                    continue;
                }
                let ok = match label {
                    Label::Blue => nb >= nr,
                    Label::Red => nr >= nb,
                };
                if !ok {
                    misl_labeled.push(id);
                }
            }
        }
        ReasonablenessReport {
            empty_leaves,
            non_majority_leaves: misl_labeled,
        }
    }

    /// Rebuild the subtree at `v` as a standalone tree (ids preserved).
    pub fn subtree(&self, v: NodeId) -> DecisionTree<S> {
        let mut nodes = BTreeMap::new();
        for id in self.subtree_ids(v) {
            nodes.insert(id, self.nodes[&id].clone());
        }
        DecisionTree {
            d: self.d,
            root: v,
            nodes,
        }
    }

    /// Replace the subtree at `v` with a leaf carrying `label`, keeping
    /// `v`'s id for the new leaf so the parent link is untouched.
    pub(crate) fn splice_leaf(&self, v: NodeId, label: Label) -> DecisionTree<S> {
        let mut nodes = self.nodes.clone();
        for id in self.subtree_ids(v) {
            nodes.remove(&id);
        }
        nodes.insert(v, Node::Leaf { label });
        DecisionTree {
            d: self.d,
            root: self.root,
            nodes,
        }
    }

    /// Replace the subtree at `v` with the subtree of one of its children
    /// (the raising step). The kept child takes `v`'s place.
    pub(crate) fn splice_child(&self, v: NodeId, kept: NodeId) -> DecisionTree<S> {
        debug_assert!(matches!(
            self.children(v), Some((l, r)) if l == kept || r == kept
        ));
        let keep: BTreeSet<NodeId> = self.subtree_ids(kept).into_iter().collect();
        let mut nodes = self.nodes.clone();
        for id in self.subtree_ids(v) {
            if !keep.contains(&id) {
                nodes.remove(&id);
            }
        }
        let mut root = self.root;
        if v == self.root {
            root = kept;
        } else {
            let parent = *self
                .parent_map()
                .get(&v)
                .expect("non-root node has a parent");
            if let Some(Node::Cut { left, right, .. }) = nodes.get_mut(&parent) {
                if *left == v {
                    *left = kept;
                } else {
                    *right = kept;
                }
            }
        }
        DecisionTree {
            d: self.d,
            root,
            nodes,
        }
    }

    /// Majority label of the examples routed through node `v`, blue on ties.
    pub fn majority_at(&self, v: NodeId, data: &Dataset<S>) -> Label {
        let boxes = self.path_boxes();
        let region = &boxes[&v];
        let mut nb = 0;
        let mut nr = 0;
        for e in data.examples() {
            if region.contains(&e.values) {
                match e.label {
                    Label::Blue => nb += 1,
                    Label::Red => nr += 1,
                }
            }
        }
        majority_label(nb, nr)
    }
}

pub type ShapeKey<S> = Vec<ShapeTok<<S as Scalar>::Key>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShapeTok<K> {
    Leaf(Label),
    Cut(usize, K),
}

/// Size-style tree parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeMetrics {
    /// Number of cuts.
    pub s: usize,
    /// Longest root-to-leaf path, in edges.
    pub depth: usize,
    /// Largest number of distinct features on one root-to-leaf path.
    pub max_path_features: usize,
    /// Largest number of distinct thresholds of a single feature on one
    /// root-to-leaf path.
    pub max_path_feature_thresholds: usize,
}

/// Outcome of the reasonableness check. An empty report means the tree is
/// reasonable for the dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReasonablenessReport {
    pub empty_leaves: Vec<NodeId>,
    pub non_majority_leaves: Vec<NodeId>,
}

impl ReasonablenessReport {
    pub fn is_reasonable(&self) -> bool {
        self.empty_leaves.is_empty() && self.non_majority_leaves.is_empty()
    }
}
