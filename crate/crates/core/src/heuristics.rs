//! Greedy pruning baselines.
//!
//! These are the cheap bottom-up passes a practitioner would reach for
//! first: accept any local prune that doesn't hurt training error, walk
//! upward once, stop. They come with no optimality story — the exact
//! solvers exist to measure how much that costs. Both heuristics report
//! how many cuts they pruned and the training errors of what's left, so
//! a result plots directly against a Pareto front.
//!
//! The raising pass composes only genuine raising steps, so everything
//! it produces is reachable by the raising solvers too; in particular
//! its "replace with a leaf" move collapses a subtree onto the label of
//! one of its own leaves rather than conjuring a fresh majority leaf.
//! On a reasonable tree the two coincide — some leaf always carries the
//! subtree's majority label — but after earlier raising steps a subtree
//! can drift, and then the collapse settles for the best label it still
//! contains.

use crate::classify::{annotate_stats, NodeStats};
use crate::model::{Dataset, Label};
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

/// What a greedy pass did: the pruned tree, how many cuts it removed,
/// and the training errors of the result.
#[derive(Debug, Clone)]
pub struct HeuristicResult<S: Scalar> {
    pub tree: DecisionTree<S>,
    pub k_used: usize,
    pub t_result: usize,
}

/// Bottom-up greedy subtree replacement: visit cuts in postorder and
/// replace the subtree at each with its majority leaf whenever that
/// does not increase overall training errors (ties are taken — a free
/// prune is a prune).
///
/// Visiting order makes the majority labels stable: the examples
/// reaching a node are fixed by the cuts above it, and those are
/// processed later, so stats computed once on the input stay valid.
pub fn heuristic_replacement<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
) -> HeuristicResult<S> {
    let stats = annotate_stats(tree, data);
    let mut current = tree.clone();
    let mut errors = current.errors_on(data);

    for v in cuts_postorder(tree) {
        let candidate = current.splice_leaf(v, majority(&stats[&v]));
        let e = candidate.errors_on(data);
        if e <= errors {
            current = candidate;
            errors = e;
        }
    }

    HeuristicResult {
        k_used: tree.num_cuts() - current.num_cuts(),
        t_result: errors,
        tree: current,
    }
}

/// Bottom-up greedy subtree raising: at each cut, weigh two moves —
/// collapse the whole subtree to a leaf (the raising analogue of
/// replacement, see the module notes) or make the one elementary raise
/// available there, which keeps the larger child and discards the other
/// one *when that other is a leaf* (two leaves tie toward keeping the
/// left). Apply whichever available move wins without increasing
/// training errors: fewer errors first, then more cuts pruned, then
/// collapse over raise.
///
/// Elementary raises only: a cut whose children are both inner nodes
/// offers no raise here, which is exactly why this pass gets stuck on
/// the non-monotone gap family — the winning move there discards a
/// whole branch at once, and no chain of individually harmless steps
/// reaches it.
pub fn heuristic_raising<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
) -> HeuristicResult<S> {
    let stats = annotate_stats(tree, data);
    let mut current = tree.clone();
    let mut errors = current.errors_on(data);

    for v in cuts_postorder(tree) {
        // collapse listed first so it wins ties against the raise
        let mut moves: Vec<DecisionTree<S>> = Vec::new();
        if let Some(label) = collapse_label(&current, v, &stats[&v]) {
            moves.push(current.splice_leaf(v, label));
        }
        if let Some(kept) = elementary_keep(&current, v) {
            moves.push(current.splice_child(v, kept));
        }

        let mut best: Option<(DecisionTree<S>, usize, usize)> = None;
        for cand in moves {
            let e = cand.errors_on(data);
            if e > errors {
                continue;
            }
            let pruned = current.num_cuts() - cand.num_cuts();
            let wins = match &best {
                None => true,
                Some((_, be, bp)) => e < *be || (e == *be && pruned > *bp),
            };
            if wins {
                best = Some((cand, e, pruned));
            }
        }

        if let Some((cand, e, _)) = best {
            current = cand;
            errors = e;
        }
    }

    HeuristicResult {
        k_used: tree.num_cuts() - current.num_cuts(),
        t_result: errors,
        tree: current,
    }
}

fn majority(stats: &NodeStats) -> Label {
    if stats.n_blue >= stats.n_red {
        Label::Blue
    } else {
        Label::Red
    }
}

/// The label to collapse `v`'s current subtree to: its examples'
/// majority when a leaf of that label survives below `v`, otherwise the
/// one label still present.
fn collapse_label<S: Scalar>(
    tree: &DecisionTree<S>,
    v: NodeId,
    stats: &NodeStats,
) -> Option<Label> {
    let mut has_blue = false;
    let mut has_red = false;
    for id in tree.subtree_ids(v) {
        if let Node::Leaf { label } = tree.node(id) {
            match label {
                Label::Blue => has_blue = true,
                Label::Red => has_red = true,
            }
        }
    }
    match (has_blue, has_red) {
        (true, true) => Some(majority(stats)),
        (true, false) => Some(Label::Blue),
        (false, true) => Some(Label::Red),
        (false, false) => None,
    }
}

/// The child an elementary raise at `v` would keep, if the op exists:
/// the discarded child must be a leaf, and the larger child survives
/// (left on ties).
fn elementary_keep<S: Scalar>(tree: &DecisionTree<S>, v: NodeId) -> Option<NodeId> {
    let (l, r) = tree.children(v)?;
    match (tree.is_leaf(l), tree.is_leaf(r)) {
        (true, true) => Some(l),
        (true, false) => Some(r),
        (false, true) => Some(l),
        (false, false) => None,
    }
}

/// Cut ids of `tree` in postorder. Processing in this order keeps every
/// id valid when visited: a greedy move at `v` only rewrites `v`'s own
/// subtree, and strict descendants come earlier in the list.
fn cuts_postorder<S: Scalar>(tree: &DecisionTree<S>) -> Vec<NodeId> {
    tree.postorder()
        .into_iter()
        .filter(|&id| !tree.is_leaf(id))
        .collect()
}
