//! Optimal pruning by subtree raising.
//!
//! Raising at a cut `v` discards one child's subtree and promotes the other
//! into `v`'s place, removing `1 + s_discarded` cuts. Unlike replacement,
//! the promoted subtree then sees examples it was never built for — every
//! ancestor constraint that vanished widens its region — so subtree optima
//! depend on which ancestor cuts survive. All solvers here therefore work
//! with *(node, feature box)* states, the box recording the region the
//! subtree is answerable for.
//!
//! Three independent solvers cover the same question from different angles:
//!
//! * [`solve_raising_boxdp`] / [`pareto_raising`] — top-down memoized
//!   dynamic program over (node, box, budget); the workhorse.
//! * [`solve_raising_exact_fptk`] — bottom-up enumeration of exactly the
//!   states whose boxes are assembled from ancestor thresholds and remain
//!   relevant under the global budget. Different traversal, different
//!   state discovery; must agree with the box DP wherever both run.
//! * [`solve_zero_zero`] and [`solve_raising_subsets`] — zero-error
//!   peeling and its tolerance-`t` wrapper, used as a cross-check for
//!   feasibility questions.

mod dp;
mod peel;
mod relevant;

pub use dp::{pareto_raising, solve_raising_boxdp, solve_raising_boxdp_with_stats, DpStats};
pub use peel::{solve_raising_subsets, solve_zero_zero};
pub use relevant::solve_raising_exact_fptk;

use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

/// Raise at `v`, keeping child `kept` (which must be a child of `v`).
pub fn apply_raising<S: Scalar>(
    tree: &DecisionTree<S>,
    v: NodeId,
    kept: NodeId,
) -> DecisionTree<S> {
    tree.splice_child(v, kept)
}

/// Errors per budget for both raising variants, from one full-budget run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RaisingFronts {
    /// `exact[k]` = fewest errors over raisings pruning exactly `k` cuts.
    /// Not monotone in general.
    pub exact: Vec<usize>,
    /// `at_least[k]` = fewest errors pruning `k` or more; the suffix
    /// minimum of `exact`.
    pub at_least: Vec<usize>,
}

/// Can `pruned` be obtained from `tree` by raising alone? Pure structure
/// matching, no dataset involved.
///
/// A raised tree is what is left after deleting some cuts and, for each,
/// one child's subtree. Matching therefore recurses: equal leaves match;
/// equal root cuts (same feature and threshold) match when both child
/// pairs do; otherwise `pruned` must match entirely inside one child of
/// `tree`. The descend option stays open even for equal root cuts — a
/// tree that repeats a cut along a path can reach a pruning whose root
/// coincides with its own while the pruning actually lives in a child.
pub fn is_prunable_to<S: Scalar>(tree: &DecisionTree<S>, pruned: &DecisionTree<S>) -> bool {
    match_nodes(tree, tree.root(), pruned, pruned.root())
}

fn match_nodes<S: Scalar>(
    tree: &DecisionTree<S>,
    v: NodeId,
    pruned: &DecisionTree<S>,
    p: NodeId,
) -> bool {
    match (tree.node(v), pruned.node(p)) {
        (Node::Leaf { label: a }, Node::Leaf { label: b }) => a == b,
        (Node::Leaf { .. }, Node::Cut { .. }) => false,
        (
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            },
            pn,
        ) => {
            if let Node::Cut {
                feature: pf,
                threshold: pt,
                left: pl,
                right: pr,
            } = pn
            {
                if feature == pf
                    && threshold.total_cmp(pt) == std::cmp::Ordering::Equal
                    && match_nodes(tree, *left, pruned, *pl)
                    && match_nodes(tree, *right, pruned, *pr)
                {
                    return true;
                }
            }
            match_nodes(tree, *left, pruned, p) || match_nodes(tree, *right, pruned, p)
        }
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use std::collections::BTreeMap;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::model::Label::{Blue, Red};
    use crate::model::Dataset;
    use crate::scalar::{Rat, Scalar};
    use crate::tree::{DecisionTree, Node, NodeId};

    pub fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    /// Small random tree over `d` features with half-integer thresholds.
    pub fn random_tree(rng: &mut ChaCha8Rng, d: usize, depth: usize) -> DecisionTree<Rat> {
        fn grow(
            rng: &mut ChaCha8Rng,
            d: usize,
            depth: usize,
            nodes: &mut BTreeMap<NodeId, Node<Rat>>,
            next: &mut u32,
        ) -> NodeId {
            let id = *next;
            *next += 1;
            if depth == 0 || rng.gen_bool(0.4) {
                let label = if rng.gen_bool(0.5) { Blue } else { Red };
                nodes.insert(id, Node::Leaf { label });
            } else {
                let feature = rng.gen_range(0..d);
                let threshold = Rat::new(2 * rng.gen_range(0..6) + 1, 2);
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

    pub fn random_data(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Dataset<Rat> {
        let rows = (0..n)
            .map(|_| {
                let values = (0..d).map(|_| r(rng.gen_range(0..6))).collect();
                let label = if rng.gen_bool(0.5) { Blue } else { Red };
                (values, label)
            })
            .collect();
        Dataset::from_rows(d, rows).unwrap()
    }

    /// A fresh deterministic generator per test.
    pub fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }
}
