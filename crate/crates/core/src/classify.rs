//! Routing, per-node example statistics, and heavy-path classification.
//!
//! The heavy-path index answers "which leaf does this point reach" with
//! O(log² s) threshold probes instead of walking the full depth: decompose
//! the tree into heavy paths, precompute for every position on a path the
//! box a point must lie in to descend that far along it, then binary-search
//! the deepest admissible position per path. Useful when paths are long and
//! probes are the expensive unit (say, each threshold comparison is an
//! oblivious-memory access), useless for balanced trees — which is fine,
//! balanced trees are shallow anyway.

use std::collections::BTreeMap;

use crate::model::{Dataset, FeatureBox, Label};
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

/// Example statistics for one node, from routing the dataset through the
/// unmodified tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeStats {
    /// Blue examples reaching the node.
    pub n_blue: usize,
    /// Red examples reaching the node.
    pub n_red: usize,
    /// Cuts in the node's subtree.
    pub s_v: usize,
    /// Errors if the subtree were a single majority leaf: `min(n_blue, n_red)`.
    pub t_v: usize,
    /// Errors the current subtree actually makes on its examples.
    pub subtree_errors: usize,
}

/// Route every example and aggregate per-node counts, subtree sizes, and
/// error figures.
pub fn annotate_stats<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
) -> BTreeMap<NodeId, NodeStats> {
    let mut blue: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut red: BTreeMap<NodeId, usize> = BTreeMap::new();
    for id in tree.ids() {
        blue.insert(id, 0);
        red.insert(id, 0);
    }
    for e in data.examples() {
        let mut v = tree.root();
        loop {
            match e.label {
                Label::Blue => *blue.get_mut(&v).unwrap() += 1,
                Label::Red => *red.get_mut(&v).unwrap() += 1,
            }
            match tree.node(v) {
                Node::Leaf { .. } => break,
                Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    v = if e.values[*feature].total_cmp(threshold)
                        != std::cmp::Ordering::Greater
                    {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    let mut out: BTreeMap<NodeId, NodeStats> = BTreeMap::new();
    for v in tree.postorder() {
        let n_blue = blue[&v];
        let n_red = red[&v];
        let (s_v, subtree_errors) = match tree.node(v) {
            Node::Leaf { label } => {
                let wrong = match label {
                    Label::Blue => n_red,
                    Label::Red => n_blue,
                };
                (0, wrong)
            }
            Node::Cut { left, right, .. } => {
                let l = &out[left];
                let r = &out[right];
                (1 + l.s_v + r.s_v, l.subtree_errors + r.subtree_errors)
            }
        };
        out.insert(
            v,
            NodeStats {
                n_blue,
                n_red,
                s_v,
                t_v: n_blue.min(n_red),
                subtree_errors,
            },
        );
    }
    out
}

/// Plain root-to-leaf descent. One probe per cut on the way down.
pub fn classify_naive<S: Scalar>(tree: &DecisionTree<S>, values: &[S]) -> (NodeId, usize) {
    let mut v = tree.root();
    let mut probes = 0;
    loop {
        match tree.node(v) {
            Node::Leaf { .. } => return (v, probes),
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                probes += 1;
                v = if values[*feature].total_cmp(threshold) != std::cmp::Ordering::Greater {
                    *left
                } else {
                    *right
                };
            }
        }
    }
}

/// One heavy path: a maximal chain of cuts each of which is the heavy child
/// of the previous, plus the entry boxes used to binary-search along it.
#[derive(Debug)]
struct HeavyPath<S: Scalar> {
    nodes: Vec<NodeId>,
    /// `boxes[p]` contains a point iff, having reached `nodes[0]`, it
    /// descends the path at least to `nodes[p]`. `boxes[0]` is the full box.
    boxes: Vec<FeatureBox<S>>,
    /// The child a point exits to when it stops at position `p < last`:
    /// the sibling of `nodes[p + 1]`. `None` at the last position.
    off_child: Vec<Option<NodeId>>,
}

/// Heavy-path decomposition over a tree.
///
/// An edge to child `u` of `v` is heavy when `2·|T_u| > |T_v|`, node counts;
/// at most one child qualifies, and a leaf child never does (its subtree is
/// a single node). Every leaf is therefore a singleton path, and any
/// root-to-leaf walk crosses at most `⌊log₂ N⌋` light edges.
#[derive(Debug)]
pub struct HldIndex<S: Scalar> {
    paths: Vec<HeavyPath<S>>,
    /// Path index per path head. Every light child and the root head a path.
    head_path: BTreeMap<NodeId, usize>,
}

impl<S: Scalar> HldIndex<S> {
    pub fn build(tree: &DecisionTree<S>) -> Self {
        let sizes = subtree_sizes(tree);
        let mut index = HldIndex {
            paths: Vec::new(),
            head_path: BTreeMap::new(),
        };
        index.decompose(tree, &sizes, tree.root());
        index
    }

    fn decompose(
        &mut self,
        tree: &DecisionTree<S>,
        sizes: &BTreeMap<NodeId, usize>,
        head: NodeId,
    ) {
        let path_idx = self.paths.len();
        self.head_path.insert(head, path_idx);
        self.paths.push(HeavyPath {
            nodes: Vec::new(),
            boxes: Vec::new(),
            off_child: Vec::new(),
        });

        let mut region = FeatureBox::full(tree.d());
        let mut v = head;
        let mut light_children: Vec<NodeId> = Vec::new();
        loop {
            let path = &mut self.paths[path_idx];
            path.nodes.push(v);
            path.boxes.push(region.clone());
            match tree.node(v) {
                Node::Leaf { .. } => {
                    path.off_child.push(None);
                    break;
                }
                Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } => match heavy_child(sizes, v, *left, *right) {
                    Some(h) => {
                        let (next, off) = if h == *left { (*left, *right) } else { (*right, *left) };
                        path.off_child.push(Some(off));
                        light_children.push(off);
                        region = if next == *left {
                            region.tighten_upper(*feature, threshold)
                        } else {
                            region.tighten_lower(*feature, threshold)
                        };
                        v = next;
                    }
                    None => {
                        path.off_child.push(None);
                        light_children.push(*left);
                        light_children.push(*right);
                        break;
                    }
                },
            }
        }
        for child in light_children {
            self.decompose(tree, sizes, child);
        }
    }

    /// Classify a point. Returns the leaf reached and the number of probes:
    /// box-membership tests during the per-path binary searches plus the
    /// single routing comparison wherever a path ends in a cut under the
    /// point.
    pub fn classify(&self, tree: &DecisionTree<S>, values: &[S]) -> (NodeId, usize) {
        let mut probes = 0usize;
        let mut head = tree.root();
        loop {
            let path = &self.paths[self.head_path[&head]];
            // Deepest position whose box contains the point. Position 0 is
            // admissible by arrival.
            let mut lo = 0usize;
            let mut hi = path.nodes.len() - 1;
            while lo < hi {
                let mid = (lo + hi + 1) / 2;
                probes += 1;
                if path.boxes[mid].contains(values) {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            let stop = path.nodes[lo];
            match path.off_child[lo] {
                Some(off) => {
                    // Point is admissible here but not one deeper, so it
                    // routes away from the heavy child — no probe needed.
                    head = off;
                }
                None => match tree.node(stop) {
                    Node::Leaf { .. } => return (stop, probes),
                    Node::Cut {
                        feature,
                        threshold,
                        left,
                        right,
                    } => {
                        probes += 1;
                        head = if values[*feature].total_cmp(threshold)
                            != std::cmp::Ordering::Greater
                        {
                            *left
                        } else {
                            *right
                        };
                    }
                },
            }
        }
    }

    /// Number of heavy paths (equals light edges + 1).
    pub fn num_paths(&self) -> usize {
        self.paths.len()
    }

    /// Length, in nodes, of the longest heavy path.
    pub fn longest_path(&self) -> usize {
        self.paths.iter().map(|p| p.nodes.len()).max().unwrap_or(0)
    }
}

fn subtree_sizes<S: Scalar>(tree: &DecisionTree<S>) -> BTreeMap<NodeId, usize> {
    let mut sizes = BTreeMap::new();
    for v in tree.postorder() {
        let sz = match tree.node(v) {
            Node::Leaf { .. } => 1,
            Node::Cut { left, right, .. } => 1 + sizes[left] + sizes[right],
        };
        sizes.insert(v, sz);
    }
    sizes
}

fn heavy_child(
    sizes: &BTreeMap<NodeId, usize>,
    v: NodeId,
    left: NodeId,
    right: NodeId,
) -> Option<NodeId> {
    let total = sizes[&v];
    if 2 * sizes[&left] > total {
        Some(left)
    } else if 2 * sizes[&right] > total {
        Some(right)
    } else {
        None
    }
}

/// Maximum number of light edges on any root-to-leaf path. Bounded by
/// `⌊log₂ N⌋` for a tree of `N` nodes.
pub fn max_light_edges<S: Scalar>(tree: &DecisionTree<S>) -> usize {
    let sizes = subtree_sizes(tree);
    let mut light: BTreeMap<NodeId, usize> = BTreeMap::new();
    let mut best = 0;
    // preorder so parents are settled first
    let mut stack = vec![tree.root()];
    light.insert(tree.root(), 0);
    while let Some(v) = stack.pop() {
        let here = light[&v];
        match tree.node(v) {
            Node::Leaf { .. } => best = best.max(here),
            Node::Cut { left, right, .. } => {
                let heavy = heavy_child(&sizes, v, *left, *right);
                for child in [*left, *right] {
                    let step = if Some(child) == heavy { 0 } else { 1 };
                    light.insert(child, here + step);
                    stack.push(child);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Label::{Blue, Red};
    use crate::scalar::Rat;
    use crate::tree::Node;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn half(n: i64) -> Rat {
        Rat::new(n, 2)
    }

    /// Path tree of `s` cuts on feature 0, thresholds 1/2, 3/2, …; each cut
    /// sends small values to a leaf and the rest deeper.
    fn path_tree(s: usize) -> DecisionTree<Rat> {
        let mut nodes = BTreeMap::new();
        let mut id = 0u32;
        for i in 0..s {
            let leaf = id + 1;
            let next = id + 2;
            nodes.insert(
                id,
                Node::Cut {
                    feature: 0,
                    threshold: half(2 * i as i64 + 1),
                    left: leaf,
                    right: next,
                },
            );
            nodes.insert(leaf, Node::Leaf { label: Blue });
            id = next;
        }
        nodes.insert(id, Node::Leaf { label: Red });
        DecisionTree::from_parts(1, 0, nodes).unwrap()
    }

    fn random_tree(rng: &mut ChaCha8Rng, d: usize, depth: usize) -> DecisionTree<Rat> {
        fn grow(
            rng: &mut ChaCha8Rng,
            d: usize,
            depth: usize,
            nodes: &mut BTreeMap<NodeId, Node<Rat>>,
            next: &mut u32,
        ) -> NodeId {
            let id = *next;
            *next += 1;
            if depth == 0 || rng.gen_bool(0.3) {
                let label = if rng.gen_bool(0.5) { Blue } else { Red };
                nodes.insert(id, Node::Leaf { label });
            } else {
                let feature = rng.gen_range(0..d);
                let threshold = half(2 * rng.gen_range(0..10) + 1);
                let left = grow(rng, d, depth - 1, nodes, next);
                let right = grow(rng, d, depth - 1, nodes, next);
                nodes.insert(
                    id,
                    Node::Cut {
                        feature,
                        threshold,
                        left,
                        right,
                    },
                );
            }
            id
        }
        let mut nodes = BTreeMap::new();
        let mut next = 0;
        let root = grow(rng, d, depth, &mut nodes, &mut next);
        DecisionTree::from_parts(d, root, nodes).unwrap()
    }

    #[test]
    fn stats_count_examples_and_cuts() {
        // root: f0 <= 1/2, left = blue leaf, right = cut f0 <= 3/2 with
        // blue/red leaves.
        let mut nodes = BTreeMap::new();
        nodes.insert(
            0,
            Node::Cut {
                feature: 0,
                threshold: half(1),
                left: 1,
                right: 2,
            },
        );
        nodes.insert(1, Node::Leaf { label: Blue });
        nodes.insert(
            2,
            Node::Cut {
                feature: 0,
                threshold: half(3),
                left: 3,
                right: 4,
            },
        );
        nodes.insert(3, Node::Leaf { label: Blue });
        nodes.insert(4, Node::Leaf { label: Red });
        let tree: DecisionTree<Rat> = DecisionTree::from_parts(1, 0, nodes).unwrap();

        let data = Dataset::from_rows(
            1,
            vec![
                (vec![r(0)], Blue),
                (vec![r(1)], Red), // lands on blue leaf 3: a subtree error
                (vec![r(2)], Red),
                (vec![r(2)], Red),
            ],
        )
        .unwrap();

        let stats = annotate_stats(&tree, &data);
        assert_eq!(
            stats[&0],
            NodeStats {
                n_blue: 1,
                n_red: 3,
                s_v: 2,
                t_v: 1,
                subtree_errors: 1
            }
        );
        assert_eq!(stats[&2].n_red, 3);
        assert_eq!(stats[&2].n_blue, 0);
        assert_eq!(stats[&2].t_v, 0);
        assert_eq!(stats[&2].subtree_errors, 1);
        assert_eq!(stats[&3], NodeStats {
            n_blue: 0,
            n_red: 1,
            s_v: 0,
            t_v: 0,
            subtree_errors: 1
        });
    }

    #[test]
    fn leaf_only_tree_classifies_in_zero_probes() {
        let tree: DecisionTree<Rat> = DecisionTree::leaf(2, Blue);
        let index = HldIndex::build(&tree);
        let (leaf, probes) = index.classify(&tree, &[r(5), r(-3)]);
        assert_eq!(leaf, tree.root());
        assert_eq!(probes, 0);
    }

    #[test]
    fn path_tree_decomposes_into_one_long_path_plus_leaves() {
        let tree = path_tree(64);
        let index = HldIndex::build(&tree);
        // all 64 cuts form the root path (a cut-to-leaf edge is never
        // heavy); every leaf hangs off it as a singleton path.
        assert_eq!(index.longest_path(), 64);
        assert_eq!(index.num_paths(), 1 + 65);
        assert_eq!(max_light_edges(&tree), 1);
    }

    #[test]
    fn path_tree_probe_budget() {
        let tree = path_tree(64);
        let index = HldIndex::build(&tree);
        let budget = 8; // ⌈log₂ 65⌉ + 1
        for i in 0..=64 {
            let point = [r(i)];
            let (expect, _) = classify_naive(&tree, &point);
            let (got, probes) = index.classify(&tree, &point);
            assert_eq!(got, expect, "value {}", i);
            assert!(probes <= budget, "value {} took {} probes", i, probes);
        }
    }

    #[test]
    fn hld_matches_naive_on_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x1dc5);
        for _ in 0..40 {
            let d = rng.gen_range(1..4);
            let tree = random_tree(&mut rng, d, 7);
            let index = HldIndex::build(&tree);
            for _ in 0..25 {
                let point: Vec<Rat> = (0..d)
                    .map(|_| {
                        // mix grid values and midpoints to hit boundaries
                        if rng.gen_bool(0.5) {
                            r(rng.gen_range(0..11))
                        } else {
                            half(2 * rng.gen_range(0..10) + 1)
                        }
                    })
                    .collect();
                let (expect, _) = classify_naive(&tree, &point);
                let (got, _) = index.classify(&tree, &point);
                assert_eq!(got, expect);
            }
        }
    }

    #[test]
    fn light_edges_within_log_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xbeef);
        for _ in 0..60 {
            let tree = random_tree(&mut rng, 3, 9);
            let n = tree.num_nodes();
            let bound = (n as f64).log2().floor() as usize;
            assert!(
                max_light_edges(&tree) <= bound,
                "{} light edges on {} nodes",
                max_light_edges(&tree),
                n
            );
        }
    }
}
