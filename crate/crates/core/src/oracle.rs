//! Brute-force enumeration of every prunable tree.
//!
//! This is the ground truth the dynamic programs are tested against, so it
//! deliberately shares no machinery with them: it materializes the full
//! reachable set of pruned trees by structural recursion, deduplicates by
//! shape, and reads optima off the finished list. Exponential on purpose —
//! the size guard refuses trees past a configured cut cap rather than
//! letting a test silently take hours.
//!
//! Reachability recursions (members are whole subtree shapes):
//!
//! * raising: `reach(v) = {cut(v, L, R) : L ∈ reach(left), R ∈ reach(right)}
//!   ∪ reach(left) ∪ reach(right)`, a leaf reaching only itself;
//! * replacement: `reach(v) = {cut(v, L, R) : …} ∪ {majority leaf of the
//!   examples routed to v}`.

use std::collections::{BTreeMap, HashSet};
use std::rc::Rc;

use thiserror::Error;

use crate::model::{majority_label, Dataset, Label, Operation};
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId, ShapeTok};

/// Default refusal threshold for the enumeration, in cuts.
pub const DEFAULT_CUT_CAP: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("tree has {s} cuts; the enumeration oracle refuses above {cap} (the reachable set grows exponentially)")]
    TreeTooLarge { s: usize, cap: usize },
}

/// A pruned-tree shape, hash-consed within one enumeration.
enum Shape<S> {
    Leaf(Label),
    Cut {
        feature: usize,
        threshold: S,
        left: Rc<Shape<S>>,
        right: Rc<Shape<S>>,
    },
}

type Key<S> = Vec<ShapeTok<<S as Scalar>::Key>>;

impl<S: Scalar> Shape<S> {
    fn key(&self) -> Key<S> {
        let mut out = Vec::new();
        self.push_key(&mut out);
        out
    }

    fn push_key(&self, out: &mut Key<S>) {
        match self {
            Shape::Leaf(label) => out.push(ShapeTok::Leaf(*label)),
            Shape::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                left.push_key(out);
                right.push_key(out);
                out.push(ShapeTok::Cut(*feature, threshold.key()));
            }
        }
    }

    fn cuts(&self) -> usize {
        match self {
            Shape::Leaf(_) => 0,
            Shape::Cut { left, right, .. } => 1 + left.cuts() + right.cuts(),
        }
    }

    fn classify(&self, values: &[S]) -> Label {
        match self {
            Shape::Leaf(label) => *label,
            Shape::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                if values[*feature].total_cmp(threshold) != std::cmp::Ordering::Greater {
                    left.classify(values)
                } else {
                    right.classify(values)
                }
            }
        }
    }

    fn to_tree(&self, d: usize) -> DecisionTree<S> {
        let mut nodes = BTreeMap::new();
        let mut next = 0u32;
        let root = self.build(&mut nodes, &mut next);
        DecisionTree::from_parts(d, root, nodes).expect("shapes are well-formed trees")
    }

    fn build(&self, nodes: &mut BTreeMap<NodeId, Node<S>>, next: &mut u32) -> NodeId {
        let id = *next;
        *next += 1;
        match self {
            Shape::Leaf(label) => {
                nodes.insert(id, Node::Leaf { label: *label });
            }
            Shape::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                let l = left.build(nodes, next);
                let r = right.build(nodes, next);
                nodes.insert(
                    id,
                    Node::Cut {
                        feature: *feature,
                        threshold: threshold.clone(),
                        left: l,
                        right: r,
                    },
                );
            }
        }
        id
    }
}

/// One member of the reachable set.
#[derive(Debug)]
pub struct ReachMember<S: Scalar> {
    pub tree: DecisionTree<S>,
    /// Cuts removed relative to the input tree.
    pub pruned: usize,
    /// Training errors of this member on the enumeration dataset.
    pub errors: usize,
}

/// The full deduplicated set of trees obtainable from the input by the
/// chosen pruning operation (the input itself included, at `pruned = 0`).
#[derive(Debug)]
pub struct ReachSet<S: Scalar> {
    s: usize,
    members: Vec<ReachMember<S>>,
    keys: HashSet<Key<S>>,
}

impl<S: Scalar> ReachSet<S> {
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn members(&self) -> &[ReachMember<S>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Is a tree (by structure, ids ignored) a member?
    pub fn contains_tree(&self, tree: &DecisionTree<S>) -> bool {
        self.keys.contains(&tree.shape_key())
    }

    /// Minimum errors over members pruning exactly `k` cuts.
    pub fn min_errors_exact(&self, k: usize) -> Option<usize> {
        self.members
            .iter()
            .filter(|m| m.pruned == k)
            .map(|m| m.errors)
            .min()
    }

    /// Minimum errors over members pruning at least `k` cuts.
    pub fn min_errors_at_least(&self, k: usize) -> Option<usize> {
        self.members
            .iter()
            .filter(|m| m.pruned >= k)
            .map(|m| m.errors)
            .min()
    }

    /// Errors per exact budget, indexed `0..=s`. `None` marks budgets no
    /// member realizes (does not happen on well-formed binary trees, which
    /// always admit one-cut steps down to a single leaf).
    pub fn exact_front(&self) -> Vec<Option<usize>> {
        (0..=self.s).map(|k| self.min_errors_exact(k)).collect()
    }

    /// Suffix minimum of the exact front: errors per at-least budget.
    pub fn at_least_front(&self) -> Vec<Option<usize>> {
        (0..=self.s).map(|k| self.min_errors_at_least(k)).collect()
    }
}

/// Enumerate every tree reachable by the operation, with the default size
/// guard.
pub fn enumerate_pruned_trees<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    op: Operation,
) -> Result<ReachSet<S>, OracleError> {
    enumerate_pruned_trees_capped(tree, data, op, DEFAULT_CUT_CAP)
}

pub fn enumerate_pruned_trees_capped<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    op: Operation,
    cap: usize,
) -> Result<ReachSet<S>, OracleError> {
    let s = tree.num_cuts();
    if s > cap {
        return Err(OracleError::TreeTooLarge { s, cap });
    }

    // Majority labels per node (for replacement), from the original routing.
    let majorities = if op == Operation::Replacement {
        node_majorities(tree, data)
    } else {
        BTreeMap::new()
    };

    let shapes = reach(tree, tree.root(), op, &majorities);
    let mut keys = HashSet::new();
    let mut members = Vec::with_capacity(shapes.len());
    for shape in &shapes {
        let key = shape.key();
        if !keys.insert(key) {
            continue;
        }
        let errors = data
            .examples()
            .iter()
            .filter(|e| shape.classify(&e.values) != e.label)
            .count();
        members.push(ReachMember {
            tree: shape.to_tree(tree.d()),
            pruned: s - shape.cuts(),
            errors,
        });
    }
    Ok(ReachSet { s, members, keys })
}

fn node_majorities<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
) -> BTreeMap<NodeId, Label> {
    let boxes = tree.path_boxes();
    let mut counts: BTreeMap<NodeId, (usize, usize)> = BTreeMap::new();
    for (id, region) in &boxes {
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
        counts.insert(*id, (nb, nr));
    }
    counts
        .into_iter()
        .map(|(id, (nb, nr))| (id, majority_label(nb, nr)))
        .collect()
}

fn reach<S: Scalar>(
    tree: &DecisionTree<S>,
    v: NodeId,
    op: Operation,
    majorities: &BTreeMap<NodeId, Label>,
) -> Vec<Rc<Shape<S>>> {
    match tree.node(v) {
        Node::Leaf { label } => vec![Rc::new(Shape::Leaf(*label))],
        Node::Cut {
            feature,
            threshold,
            left,
            right,
        } => {
            let ls = reach(tree, *left, op, majorities);
            let rs = reach(tree, *right, op, majorities);
            let mut seen: HashSet<Key<S>> = HashSet::new();
            let mut out: Vec<Rc<Shape<S>>> = Vec::new();
            let mut push = |shape: Rc<Shape<S>>, out: &mut Vec<Rc<Shape<S>>>| {
                if seen.insert(shape.key()) {
                    out.push(shape);
                }
            };
            for l in &ls {
                for r in &rs {
                    push(
                        Rc::new(Shape::Cut {
                            feature: *feature,
                            threshold: threshold.clone(),
                            left: Rc::clone(l),
                            right: Rc::clone(r),
                        }),
                        &mut out,
                    );
                }
            }
            match op {
                Operation::Raising => {
                    for sub in ls.iter().chain(rs.iter()) {
                        push(Rc::clone(sub), &mut out);
                    }
                }
                Operation::Replacement => {
                    push(Rc::new(Shape::Leaf(majorities[&v])), &mut out);
                }
            }
            out
        }
    }
}

/// Errors per budget for both variants, straight off the reachable set.
pub fn oracle_pareto<S: Scalar>(reach: &ReachSet<S>) -> OracleFronts {
    OracleFronts {
        exact: reach.exact_front(),
        at_least: reach.at_least_front(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleFronts {
    pub exact: Vec<Option<usize>>,
    pub at_least: Vec<Option<usize>>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Label::{Blue, Red};
    use crate::scalar::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    /// A path tree of `s` cuts on feature 0 with thresholds 1/2, 3/2, …:
    /// cut i sends values <= i+1/2 to a leaf, larger values deeper.
    /// Leaf labels alternate blue/red along the path.
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
                    threshold: Rat::new(2 * i as i64 + 1, 2),
                    left: leaf,
                    right: next,
                },
            );
            nodes.insert(
                leaf,
                Node::Leaf {
                    label: if i % 2 == 0 { Blue } else { Red },
                },
            );
            id = next;
        }
        nodes.insert(
            id,
            Node::Leaf {
                label: if s % 2 == 0 { Blue } else { Red },
            },
        );
        DecisionTree::from_parts(1, 0, nodes).unwrap()
    }

    fn path_data(s: usize) -> Dataset<Rat> {
        // one example per leaf region, labeled by the leaf above it
        let rows = (0..=s)
            .map(|i| {
                (
                    vec![r(i as i64)],
                    if i % 2 == 0 { Blue } else { Red },
                )
            })
            .collect();
        Dataset::from_rows(1, rows).unwrap()
    }

    /// Independent reachability count: a from-scratch string-encoded
    /// recursion, sharing nothing with the `Shape` machinery.
    fn raising_reach_strings(tree: &DecisionTree<Rat>, v: NodeId) -> HashSet<String> {
        match tree.node(v) {
            Node::Leaf { label } => {
                let mut s = HashSet::new();
                s.insert(format!("L{}", label));
                s
            }
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                let ls = raising_reach_strings(tree, *left);
                let rs = raising_reach_strings(tree, *right);
                let mut out = HashSet::new();
                for l in &ls {
                    for r in &rs {
                        out.insert(format!("C{}@{}({})({})", feature, threshold, l, r));
                    }
                }
                out.extend(ls);
                out.extend(rs);
                out
            }
        }
    }

    #[test]
    fn raising_count_matches_independent_recursion_on_paths() {
        for s in 1..=6 {
            let tree = path_tree(s);
            let data = path_data(s);
            let reach = enumerate_pruned_trees(&tree, &data, Operation::Raising).unwrap();
            let expected = raising_reach_strings(&tree, tree.root());
            assert_eq!(reach.len(), expected.len(), "path of {} cuts", s);
        }
    }

    #[test]
    fn single_cut_raising_reach_is_three_members() {
        let tree = path_tree(1);
        let data = path_data(1);
        let reach = enumerate_pruned_trees(&tree, &data, Operation::Raising).unwrap();
        // the tree itself, and each child leaf
        assert_eq!(reach.len(), 3);
        assert_eq!(reach.exact_front(), vec![Some(0), Some(1)]);
    }

    #[test]
    fn single_cut_replacement_reach_is_two_members() {
        let tree = path_tree(1);
        let data = path_data(1);
        let reach = enumerate_pruned_trees(&tree, &data, Operation::Replacement).unwrap();
        // the tree itself and the majority leaf (blue on the 1-1 tie)
        assert_eq!(reach.len(), 2);
        assert_eq!(reach.exact_front(), vec![Some(0), Some(1)]);
    }

    #[test]
    fn fronts_cover_every_budget_on_small_trees() {
        for s in 1..=5 {
            let tree = path_tree(s);
            let data = path_data(s);
            for op in [Operation::Replacement, Operation::Raising] {
                let reach = enumerate_pruned_trees(&tree, &data, op).unwrap();
                let front = reach.exact_front();
                assert_eq!(front.len(), s + 1);
                assert!(front.iter().all(|e| e.is_some()), "{:?} s={}", op, s);
                // at-least is the suffix minimum of exact
                let at_least = reach.at_least_front();
                for k in 0..=s {
                    let suffix_min = (k..=s).filter_map(|j| front[j]).min();
                    assert_eq!(at_least[k], suffix_min);
                }
            }
        }
    }

    #[test]
    fn unpruned_tree_is_always_a_member_at_zero() {
        let tree = path_tree(3);
        let data = path_data(3);
        for op in [Operation::Replacement, Operation::Raising] {
            let reach = enumerate_pruned_trees(&tree, &data, op).unwrap();
            assert!(reach.contains_tree(&tree));
            assert_eq!(reach.min_errors_exact(0), Some(tree.errors_on(&data)));
        }
    }

    #[test]
    fn size_guard_refuses_large_trees() {
        let tree = path_tree(11);
        let data = path_data(11);
        let err = enumerate_pruned_trees(&tree, &data, Operation::Raising).unwrap_err();
        assert_eq!(err, OracleError::TreeTooLarge { s: 11, cap: 10 });
        // but an explicit cap can lift it
        assert!(
            enumerate_pruned_trees_capped(&tree, &data, Operation::Raising, 12).is_ok()
        );
    }
}
