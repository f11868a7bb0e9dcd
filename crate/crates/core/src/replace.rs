//! Optimal pruning by subtree replacement.
//!
//! A replacement pruning picks an antichain of cut nodes and turns each
//! one's subtree into a single leaf labeled by the majority of the examples
//! routed there. Replacing `v` removes exactly `s_v` cuts and costs
//! `t_v = min(n_blue, n_red)` errors on `v`'s examples; choices in disjoint
//! subtrees are independent. That makes the exact-budget optimum a textbook
//! tree knapsack:
//!
//! ```text
//! opt(leaf, 0)  = errors of the leaf on its examples
//! opt(v, s_v)   = t_v                      (replace v outright)
//! opt(v, k')    = min over k_l + k_r = k' of opt(left, k_l) + opt(right, k_r)
//! ```
//!
//! The split case tops out at `s_v − 1` cuts, so the two cases never
//! overlap. A second, dual table — most cuts removable within an error
//! budget — answers at-least-`k` queries cheaply when the error budget is
//! the small side; both directions are implemented and must agree.

use std::collections::BTreeMap;

use crate::classify::{annotate_stats, NodeStats};
use crate::model::{majority_label, Dataset, Variant};
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

/// A feasible pruning: its error count, what was removed, and the tree.
#[derive(Debug, Clone)]
pub struct PruneOutcome<S: Scalar> {
    /// Training errors of the witness tree (minimal for the query).
    pub min_errors: usize,
    /// Cuts removed. Equals the requested `k` for exact queries; may exceed
    /// it for at-least queries.
    pub pruned: usize,
    /// Ids of the removed cut nodes, ascending.
    pub pruned_nodes: Vec<NodeId>,
    /// The pruned tree itself.
    pub tree: DecisionTree<S>,
}

/// Replace the subtree at `v` by its majority leaf.
pub fn apply_replacement<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    v: NodeId,
) -> DecisionTree<S> {
    let label = tree.majority_at(v, data);
    let mut out = tree.clone();
    out = out.splice_leaf(v, label);
    out
}

/// Minimum errors over replacement prunings with the given budget.
/// `None` when no pruning satisfies the query (`k` beyond the tree, or
/// every candidate exceeds `t` errors).
pub fn solve_replacement<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    variant: Variant,
    k: usize,
    t: usize,
) -> Option<PruneOutcome<S>> {
    let s = tree.num_cuts();
    if k > s {
        return None;
    }
    let stats = annotate_stats(tree, data);
    match variant {
        Variant::Exact => {
            let tables = primal_tables(tree, &stats, k);
            let errors = tables.front(tree.root())[k];
            if errors > t {
                return None;
            }
            Some(tables.witness(tree, &stats, k, errors))
        }
        Variant::AtLeast => {
            if t < k {
                solve_at_least_dual(tree, data, &stats, k, t)
            } else {
                let tables = primal_tables(tree, &stats, s);
                let front = tables.front(tree.root());
                let (best_k, errors) = (k..=s)
                    .map(|k2| (k2, front[k2]))
                    .min_by_key(|&(k2, e)| (e, k2))?;
                if errors > t {
                    return None;
                }
                Some(tables.witness(tree, &stats, best_k, errors))
            }
        }
    }
}

/// Errors of the best pruning at every exact budget `0..=s`.
pub fn pareto_replacement<S: Scalar>(tree: &DecisionTree<S>, data: &Dataset<S>) -> Vec<usize> {
    let stats = annotate_stats(tree, data);
    let tables = primal_tables(tree, &stats, tree.num_cuts());
    tables.front(tree.root()).to_vec()
}

/// How one budget entry at a cut node was achieved.
#[derive(Debug, Clone, Copy)]
enum Choice {
    /// Replace the node's subtree by its majority leaf.
    Replace,
    /// Keep the node; the left subtree takes this many cuts of the budget.
    Split(usize),
}

struct PrimalTables {
    /// Per node: errors per exact budget `0..=min(cap, s_v)`.
    best: BTreeMap<NodeId, Vec<usize>>,
    /// Per cut node: the winning choice per budget, aligned with `best`.
    choices: BTreeMap<NodeId, Vec<Choice>>,
}

impl PrimalTables {
    fn front(&self, v: NodeId) -> &[usize] {
        &self.best[&v]
    }

    /// Rebuild the optimal tree for budget `k` at the root.
    fn witness<S: Scalar>(
        &self,
        tree: &DecisionTree<S>,
        stats: &BTreeMap<NodeId, NodeStats>,
        k: usize,
        errors: usize,
    ) -> PruneOutcome<S> {
        let mut replaced = Vec::new();
        self.collect(tree, tree.root(), k, &mut replaced);
        let mut out = tree.clone();
        let mut pruned_nodes = Vec::new();
        for v in replaced {
            pruned_nodes.extend(out.subtree_ids(v).into_iter().filter(|id| !out.is_leaf(*id)));
            let st = &stats[&v];
            out = out.splice_leaf(v, majority_label(st.n_blue, st.n_red));
        }
        pruned_nodes.sort_unstable();
        PruneOutcome {
            min_errors: errors,
            pruned: pruned_nodes.len(),
            pruned_nodes,
            tree: out,
        }
    }

    fn collect<S: Scalar>(
        &self,
        tree: &DecisionTree<S>,
        v: NodeId,
        k: usize,
        replaced: &mut Vec<NodeId>,
    ) {
        if let Node::Cut { left, right, .. } = tree.node(v) {
            match self.choices[&v][k] {
                Choice::Replace => replaced.push(v),
                Choice::Split(k_l) => {
                    self.collect(tree, *left, k_l, replaced);
                    self.collect(tree, *right, k - k_l, replaced);
                }
            }
        }
    }
}

fn primal_tables<S: Scalar>(
    tree: &DecisionTree<S>,
    stats: &BTreeMap<NodeId, NodeStats>,
    cap: usize,
) -> PrimalTables {
    let mut best: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
    let mut choices: BTreeMap<NodeId, Vec<Choice>> = BTreeMap::new();
    for v in tree.postorder() {
        match tree.node(v) {
            Node::Leaf { .. } => {
                best.insert(v, vec![stats[&v].subtree_errors]);
            }
            Node::Cut { left, right, .. } => {
                let s_v = stats[&v].s_v;
                let top = cap.min(s_v);
                let bl = &best[left];
                let br = &best[right];
                let mut row = Vec::with_capacity(top + 1);
                let mut ch = Vec::with_capacity(top + 1);
                for k in 0..=top {
                    if k == s_v {
                        row.push(stats[&v].t_v);
                        ch.push(Choice::Replace);
                        continue;
                    }
                    let lo = k.saturating_sub(br.len() - 1);
                    let hi = k.min(bl.len() - 1);
                    debug_assert!(lo <= hi, "every budget under s_v must split");
                    let (k_l, e) = (lo..=hi)
                        .map(|k_l| (k_l, bl[k_l] + br[k - k_l]))
                        .min_by_key(|&(_, e)| e)
                        .unwrap();
                    row.push(e);
                    ch.push(Choice::Split(k_l));
                }
                best.insert(v, row);
                choices.insert(v, ch);
            }
        }
    }
    PrimalTables { best, choices }
}

/// Dual direction: most cuts removable within each error budget.
#[derive(Debug, Clone, Copy)]
enum DualChoice {
    Replace,
    /// Keep the node; the left subtree gets this much of the error budget.
    Split(usize),
}

fn solve_at_least_dual<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    stats: &BTreeMap<NodeId, NodeStats>,
    k: usize,
    t: usize,
) -> Option<PruneOutcome<S>> {
    // maxp[v][t'] = most cuts removable in v's subtree with ≤ t' errors
    // there; None when even t' errors are unavoidable.
    let mut maxp: BTreeMap<NodeId, Vec<Option<usize>>> = BTreeMap::new();
    let mut choices: BTreeMap<NodeId, Vec<Option<DualChoice>>> = BTreeMap::new();
    for v in tree.postorder() {
        match tree.node(v) {
            Node::Leaf { .. } => {
                let e = stats[&v].subtree_errors;
                maxp.insert(
                    v,
                    (0..=t).map(|t2| if t2 >= e { Some(0) } else { None }).collect(),
                );
            }
            Node::Cut { left, right, .. } => {
                let st = &stats[&v];
                let ml = &maxp[left];
                let mr = &maxp[right];
                let mut row = Vec::with_capacity(t + 1);
                let mut ch = Vec::with_capacity(t + 1);
                for t2 in 0..=t {
                    let mut cur: Option<(usize, DualChoice)> = if st.t_v <= t2 {
                        Some((st.s_v, DualChoice::Replace))
                    } else {
                        None
                    };
                    for t_l in 0..=t2 {
                        if let (Some(a), Some(b)) = (ml[t_l], mr[t2 - t_l]) {
                            if cur.map_or(true, |(best, _)| a + b > best) {
                                cur = Some((a + b, DualChoice::Split(t_l)));
                            }
                        }
                    }
                    row.push(cur.map(|(p, _)| p));
                    ch.push(cur.map(|(_, c)| c));
                }
                maxp.insert(v, row);
                choices.insert(v, ch);
            }
        }
    }

    let root_row = &maxp[&tree.root()];
    let t_star = (0..=t).find(|&t2| root_row[t2].map_or(false, |p| p >= k))?;

    // Backtrack at the minimal feasible budget.
    let mut replaced = Vec::new();
    collect_dual(tree, &choices, tree.root(), t_star, &mut replaced);
    let mut out = tree.clone();
    let mut pruned_nodes = Vec::new();
    for v in replaced {
        pruned_nodes.extend(out.subtree_ids(v).into_iter().filter(|id| !out.is_leaf(*id)));
        let st = &stats[&v];
        out = out.splice_leaf(v, majority_label(st.n_blue, st.n_red));
    }
    pruned_nodes.sort_unstable();
    debug_assert_eq!(out.errors_on(data), t_star);
    Some(PruneOutcome {
        min_errors: t_star,
        pruned: pruned_nodes.len(),
        pruned_nodes,
        tree: out,
    })
}

fn collect_dual<S: Scalar>(
    tree: &DecisionTree<S>,
    choices: &BTreeMap<NodeId, Vec<Option<DualChoice>>>,
    v: NodeId,
    t: usize,
    replaced: &mut Vec<NodeId>,
) {
    if let Node::Cut { left, right, .. } = tree.node(v) {
        match choices[&v][t].expect("backtracking a feasible entry") {
            DualChoice::Replace => replaced.push(v),
            DualChoice::Split(t_l) => {
                collect_dual(tree, choices, *left, t_l, replaced);
                collect_dual(tree, choices, *right, t - t_l, replaced);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Label::{Blue, Red};
    use crate::model::{Label, Operation};
    use crate::oracle::enumerate_pruned_trees;
    use crate::scalar::Rat;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
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

    fn random_data(rng: &mut ChaCha8Rng, d: usize, n: usize) -> Dataset<Rat> {
        let rows = (0..n)
            .map(|_| {
                let values = (0..d).map(|_| r(rng.gen_range(0..6))).collect();
                let label = if rng.gen_bool(0.5) { Blue } else { Red };
                (values, label)
            })
            .collect();
        Dataset::from_rows(d, rows).unwrap()
    }

    fn check_witness(
        out: &PruneOutcome<Rat>,
        tree: &DecisionTree<Rat>,
        data: &Dataset<Rat>,
    ) {
        assert_eq!(out.tree.errors_on(data), out.min_errors);
        assert_eq!(out.tree.num_cuts(), tree.num_cuts() - out.pruned);
        assert_eq!(out.pruned_nodes.len(), out.pruned);
        for id in &out.pruned_nodes {
            // every listed id was a cut; it may survive as the replacement
            // leaf (an antichain root keeps its id) but never as a cut
            assert!(!tree.is_leaf(*id));
            assert!(!out.tree.contains(*id) || out.tree.is_leaf(*id));
        }
    }

    #[test]
    fn pareto_matches_oracle_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut checked = 0;
        while checked < 40 {
            let d = rng.gen_range(1..4);
            let tree = random_tree(&mut rng, d, 4);
            if tree.num_cuts() == 0 || tree.num_cuts() > 7 {
                continue;
            }
            checked += 1;
            let n = rng.gen_range(1..11);
            let data = random_data(&mut rng, d, n);
            let reach = enumerate_pruned_trees(&tree, &data, Operation::Replacement).unwrap();
            let front = pareto_replacement(&tree, &data);
            let oracle_front: Vec<usize> =
                reach.exact_front().into_iter().map(Option::unwrap).collect();
            assert_eq!(front, oracle_front);
        }
    }

    #[test]
    fn solver_agrees_with_oracle_and_witnesses_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xfeed);
        for _ in 0..25 {
            let d = rng.gen_range(1..3);
            let tree = random_tree(&mut rng, d, 3);
            let s = tree.num_cuts();
            if s == 0 || s > 6 {
                continue;
            }
            let data = random_data(&mut rng, d, 8);
            let reach = enumerate_pruned_trees(&tree, &data, Operation::Replacement).unwrap();
            let n = data.len();
            for k in 0..=s {
                for t in 0..=n {
                    for variant in [Variant::Exact, Variant::AtLeast] {
                        let want = match variant {
                            Variant::Exact => reach.min_errors_exact(k).filter(|&e| e <= t),
                            Variant::AtLeast => reach.min_errors_at_least(k).filter(|&e| e <= t),
                        };
                        let got = solve_replacement(&tree, &data, variant, k, t);
                        assert_eq!(got.as_ref().map(|o| o.min_errors), want);
                        if let Some(out) = got {
                            check_witness(&out, &tree, &data);
                            assert!(reach.contains_tree(&out.tree));
                            match variant {
                                Variant::Exact => assert_eq!(out.pruned, k),
                                Variant::AtLeast => assert!(out.pruned >= k),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn dual_and_primal_at_least_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xd0a1);
        for _ in 0..25 {
            let tree = random_tree(&mut rng, 2, 4);
            let s = tree.num_cuts();
            if s == 0 {
                continue;
            }
            let data = random_data(&mut rng, 2, 10);
            let stats = annotate_stats(&tree, &data);
            for k in 0..=s {
                for t in 0..=data.len() {
                    // dual path, forced
                    let dual = solve_at_least_dual(&tree, &data, &stats, k, t);
                    // primal path, forced
                    let tables = primal_tables(&tree, &stats, s);
                    let front = tables.front(tree.root());
                    let primal = (k..=s).map(|k2| front[k2]).min().filter(|&e| e <= t);
                    assert_eq!(dual.map(|o| o.min_errors), primal, "k={} t={}", k, t);
                }
            }
        }
    }

    #[test]
    fn full_replacement_collapses_to_majority_leaf() {
        // two cuts, all-blue data: pruning everything should cost nothing
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let tree = loop {
            let t = random_tree(&mut rng, 1, 3);
            if t.num_cuts() >= 2 {
                break t;
            }
        };
        let s = tree.num_cuts();
        let data = Dataset::from_rows(
            1,
            (0..5).map(|i| (vec![r(i)], Blue)).collect::<Vec<_>>(),
        )
        .unwrap();
        let out = solve_replacement(&tree, &data, Variant::Exact, s, 0).unwrap();
        assert_eq!(out.min_errors, 0);
        assert_eq!(out.tree.num_cuts(), 0);
        assert_eq!(
            out.tree.node(out.tree.root()),
            &Node::Leaf { label: Label::Blue }
        );
    }

    #[test]
    fn budgets_beyond_the_tree_are_infeasible() {
        let tree: DecisionTree<Rat> = DecisionTree::leaf(1, Blue);
        let data = Dataset::from_rows(1, vec![(vec![r(0)], Red)]).unwrap();
        assert!(solve_replacement(&tree, &data, Variant::Exact, 1, 9).is_none());
        assert!(solve_replacement(&tree, &data, Variant::AtLeast, 1, 9).is_none());
        // the leaf itself, kept, makes one error
        let out = solve_replacement(&tree, &data, Variant::Exact, 0, 1).unwrap();
        assert_eq!(out.min_errors, 1);
        assert!(solve_replacement(&tree, &data, Variant::Exact, 0, 0).is_none());
    }
}
