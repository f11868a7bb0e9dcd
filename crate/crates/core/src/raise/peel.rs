//! Feasibility solvers built on zero-error peeling.
//!
//! [`solve_zero_zero`] answers the simplest raising question — is there a
//! raised tree making no errors at all — by repeatedly cutting off a leaf
//! that holds a misclassified example. Removing such a leaf is never wrong:
//! while it survives, its example stays misclassified, so any zero-error
//! raising discards it. The peeling order is fixed (deepest leaf first,
//! smallest id on ties) but immaterial to the outcome.
//!
//! [`solve_raising_subsets`] lifts this to budgets (k, t): walk every tree
//! reachable by `k` single-cut raisings, and for each, every way of writing
//! off up to `t` examples; the remainder must peel to zero errors. Pure
//! enumeration — it exists to cross-check the dynamic programs on small
//! instances, not to be fast.

use std::collections::{BTreeMap, HashSet};

use crate::model::Dataset;
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

/// The largest raised tree with zero training errors, or `None` when every
/// raising misclassifies something (in particular when the tree is a single
/// wrong leaf).
pub fn solve_zero_zero<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
) -> Option<DecisionTree<S>> {
    let mut cur = tree.clone();
    loop {
        let mut bad: Vec<NodeId> = Vec::new();
        for e in data.examples() {
            let leaf = cur.route(&e.values);
            if cur.classify(&e.values) != e.label && !bad.contains(&leaf) {
                bad.push(leaf);
            }
        }
        if bad.is_empty() {
            return Some(cur);
        }
        let depths = node_depths(&cur);
        let victim = bad
            .into_iter()
            .max_by_key(|id| (depths[id], std::cmp::Reverse(*id)))
            .unwrap();
        if victim == cur.root() {
            return None;
        }
        let parent = cur.parent_map()[&victim];
        let (l, r) = cur.children(parent).unwrap();
        let sibling = if l == victim { r } else { l };
        cur = cur.splice_child(parent, sibling);
    }
}

fn node_depths<S: Scalar>(tree: &DecisionTree<S>) -> BTreeMap<NodeId, usize> {
    let mut depths = BTreeMap::new();
    let mut stack = vec![(tree.root(), 0usize)];
    while let Some((v, d)) = stack.pop() {
        depths.insert(v, d);
        if let Some((l, r)) = tree.children(v) {
            stack.push((l, d + 1));
            stack.push((r, d + 1));
        }
    }
    depths
}

/// Is some raising with at least `k` cuts pruned and at most `t` errors
/// reachable? Exhaustive: deduplicated breadth-first search over `k`
/// single-cut raisings (each discards a child that is already a leaf),
/// then every example subset of size up to `t` written off before peeling
/// the rest to zero.
pub fn solve_raising_subsets<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    k: usize,
    t: usize,
) -> Option<DecisionTree<S>> {
    let mut level: Vec<DecisionTree<S>> = vec![tree.clone()];
    for _ in 0..k {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for cur in &level {
            for (v, kept) in single_cut_raisings(cur) {
                let raised = cur.splice_child(v, kept);
                if seen.insert(raised.shape_key()) {
                    next.push(raised);
                }
            }
        }
        level = next;
        if level.is_empty() {
            return None;
        }
    }

    let n = data.len();
    for size in 0..=t.min(n) {
        for cand in &level {
            if size == n {
                // all examples written off; anything goes
                return Some(cand.clone());
            }
            let mut found = None;
            for_each_subset(n, size, &mut |drop| {
                if found.is_some() {
                    return;
                }
                let rows = data
                    .examples()
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !drop.contains(i))
                    .map(|(_, e)| (e.values.clone(), e.label))
                    .collect();
                let reduced = Dataset::from_rows(data.d(), rows).unwrap();
                if let Some(w) = solve_zero_zero(cand, &reduced) {
                    found = Some(w);
                }
            });
            if let Some(w) = found {
                return Some(w);
            }
        }
    }
    None
}

/// All raisings that remove exactly one cut: the discarded child must
/// already be a leaf. Any raising decomposes into such steps.
fn single_cut_raisings<S: Scalar>(tree: &DecisionTree<S>) -> Vec<(NodeId, NodeId)> {
    let mut out = Vec::new();
    for (id, node) in tree.nodes() {
        if let Node::Cut { left, right, .. } = node {
            if tree.is_leaf(*left) {
                out.push((id, *right));
            }
            if tree.is_leaf(*right) {
                out.push((id, *left));
            }
        }
    }
    out
}

/// Call `f` on every `size`-subset of `0..n`, in lexicographic order.
fn for_each_subset(n: usize, size: usize, f: &mut impl FnMut(&[usize])) {
    fn go(n: usize, size: usize, start: usize, acc: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if acc.len() == size {
            f(acc);
            return;
        }
        let remaining = size - acc.len();
        for i in start..=(n - remaining) {
            acc.push(i);
            go(n, size, i + 1, acc, f);
            acc.pop();
        }
    }
    if size > n {
        return;
    }
    go(n, size, 0, &mut Vec::new(), f);
}
