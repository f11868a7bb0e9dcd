//! Memoized top-down dynamic program over (node, box, budget) states.
//!
//! The value `Q[v, B][k']` is the fewest errors a raised version of `v`'s
//! subtree can make on the examples inside box `B`, over raisings removing
//! exactly (or at least) `k'` cuts from that subtree. At a cut with
//! children `u`, `w` three things can happen:
//!
//! * raise, keeping `u`: the cut and all of `w`'s subtree go, costing
//!   `1 + s_w` of the budget; `u` is then solved *on the same box* since
//!   `v`'s constraint is gone;
//! * raise, keeping `w`: symmetric;
//! * keep the cut: the budget splits across the children, whose boxes
//!   tighten by `v`'s threshold on `v`'s feature.
//!
//! Only surviving ancestors constrain a node, so every box bound is either
//! a sentinel or a threshold from the node's root path — asserted at every
//! memo insertion in debug builds, since the state-count bound rests on it.
//! At-least budgets use the same recurrence with child budgets clamped at
//! zero instead of declared infeasible.

use std::collections::{BTreeMap, HashMap};

use crate::model::{Dataset, FeatureBox, Label, Variant};
use crate::replace::PruneOutcome;
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

use super::RaisingFronts;

/// How one budget entry was achieved, for witness rebuilding.
#[derive(Debug, Clone, Copy)]
enum Tag {
    /// The node is a leaf; nothing to decide.
    Leaf,
    /// Raise, keeping the left child.
    KeepLeft,
    /// Raise, keeping the right child.
    KeepRight,
    /// Keep the cut; the left child takes this much of the budget.
    Split(u32),
}

struct Entry {
    q: Vec<usize>,
    tag: Vec<Tag>,
}

/// Size figures from one solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpStats {
    /// Distinct (node, box) states memoized.
    pub memo_states: usize,
    /// Distinct boxes whose example counts were taken.
    pub boxes_counted: usize,
}

struct BoxDp<'a, S: Scalar> {
    tree: &'a DecisionTree<S>,
    data: &'a Dataset<S>,
    /// Cuts per subtree.
    cuts: BTreeMap<NodeId, usize>,
    variant: Variant,
    cap: usize,
    memo: HashMap<(NodeId, FeatureBox<S>), Entry>,
    /// (blue, red) example counts per box, shared across nodes.
    counts: HashMap<FeatureBox<S>, (usize, usize)>,
    /// Per node and feature: the box bounds its states may legally use.
    #[cfg(debug_assertions)]
    allowed: BTreeMap<NodeId, Vec<AllowedBounds<S>>>,
}

#[cfg(debug_assertions)]
#[derive(Clone)]
struct AllowedBounds<S: Scalar> {
    lo: std::collections::HashSet<crate::scalar::Bound<S>>,
    hi: std::collections::HashSet<crate::scalar::Bound<S>>,
}

impl<'a, S: Scalar> BoxDp<'a, S> {
    fn new(tree: &'a DecisionTree<S>, data: &'a Dataset<S>, variant: Variant, cap: usize) -> Self {
        let mut cuts = BTreeMap::new();
        for v in tree.postorder() {
            let c = match tree.node(v) {
                Node::Leaf { .. } => 0,
                Node::Cut { left, right, .. } => 1 + cuts[left] + cuts[right],
            };
            cuts.insert(v, c);
        }
        BoxDp {
            tree,
            data,
            cuts,
            variant,
            cap,
            memo: HashMap::new(),
            counts: HashMap::new(),
            #[cfg(debug_assertions)]
            allowed: allowed_bounds(tree),
        }
    }

    fn box_counts(&mut self, bx: &FeatureBox<S>) -> (usize, usize) {
        if let Some(&c) = self.counts.get(bx) {
            return c;
        }
        let mut nb = 0;
        let mut nr = 0;
        for e in self.data.examples() {
            if bx.contains(&e.values) {
                match e.label {
                    Label::Blue => nb += 1,
                    Label::Red => nr += 1,
                }
            }
        }
        self.counts.insert(bx.clone(), (nb, nr));
        (nb, nr)
    }

    /// Compute and memoize the budget row for (v, bx).
    fn ensure(&mut self, v: NodeId, bx: &FeatureBox<S>) {
        if self.memo.contains_key(&(v, bx.clone())) {
            return;
        }
        #[cfg(debug_assertions)]
        {
            let al = &self.allowed[&v];
            for f in 0..self.tree.d() {
                debug_assert!(
                    al[f].lo.contains(bx.lo(f)) && al[f].hi.contains(bx.hi(f)),
                    "box bound at node {} feature {} is not an ancestor threshold",
                    v,
                    f
                );
            }
        }
        let entry = match self.tree.node(v) {
            Node::Leaf { label } => {
                let (nb, nr) = self.box_counts(bx);
                let e = match label {
                    Label::Blue => nr,
                    Label::Red => nb,
                };
                Entry {
                    q: vec![e],
                    tag: vec![Tag::Leaf],
                }
            }
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            } => {
                let (u, w) = (*left, *right);
                let (f, thr) = (*feature, threshold.clone());
                let s_u = self.cuts[&u];
                let s_w = self.cuts[&w];
                let s_v = 1 + s_u + s_w;
                let top = self.cap.min(s_v);

                let bl = bx.tighten_upper(f, &thr);
                let br = bx.tighten_lower(f, &thr);
                self.ensure(u, &bl);
                self.ensure(w, &br);
                // the keep-a-child options see the parent box unchanged;
                // skip them when no budget in range can afford the raise
                let left_possible = self.variant == Variant::AtLeast || top >= 1 + s_w;
                let right_possible = self.variant == Variant::AtLeast || top >= 1 + s_u;
                if left_possible {
                    self.ensure(u, bx);
                }
                if right_possible {
                    self.ensure(w, bx);
                }

                let qu_split = &self.memo[&(u, bl.clone())].q;
                let qw_split = &self.memo[&(w, br.clone())].q;
                let qu_keep = left_possible.then(|| &self.memo[&(u, bx.clone())].q);
                let qw_keep = right_possible.then(|| &self.memo[&(w, bx.clone())].q);

                let mut q = Vec::with_capacity(top + 1);
                let mut tag = Vec::with_capacity(top + 1);
                for k in 0..=top {
                    let mut best = usize::MAX;
                    let mut bt = None;
                    match self.variant {
                        Variant::Exact => {
                            if k >= 1 + s_w {
                                let e = qu_keep.unwrap()[k - 1 - s_w];
                                if e < best {
                                    best = e;
                                    bt = Some(Tag::KeepLeft);
                                }
                            }
                            if k >= 1 + s_u {
                                let e = qw_keep.unwrap()[k - 1 - s_u];
                                if e < best {
                                    best = e;
                                    bt = Some(Tag::KeepRight);
                                }
                            }
                        }
                        Variant::AtLeast => {
                            let e = qu_keep.unwrap()[k.saturating_sub(1 + s_w)];
                            if e < best {
                                best = e;
                                bt = Some(Tag::KeepLeft);
                            }
                            let e = qw_keep.unwrap()[k.saturating_sub(1 + s_u)];
                            if e < best {
                                best = e;
                                bt = Some(Tag::KeepRight);
                            }
                        }
                    }
                    // keep the cut and split the budget; the range is empty
                    // when k exceeds what both children together can shed
                    let lo = k.saturating_sub(qw_split.len() - 1);
                    let hi = k.min(qu_split.len() - 1);
                    for k_u in lo..=hi {
                        let e = qu_split[k_u].saturating_add(qw_split[k - k_u]);
                        if e < best {
                            best = e;
                            bt = Some(Tag::Split(k_u as u32));
                        }
                    }
                    debug_assert!(
                        best < usize::MAX,
                        "every budget within a subtree's cut count is feasible"
                    );
                    q.push(best);
                    tag.push(bt.unwrap());
                }
                Entry { q, tag }
            }
        };
        self.memo.insert((v, bx.clone()), entry);
    }

    /// Rebuild the optimal raised subtree for (v, bx, k). Surviving nodes
    /// keep their original ids.
    fn rebuild(
        &self,
        v: NodeId,
        bx: &FeatureBox<S>,
        k: usize,
        nodes: &mut BTreeMap<NodeId, Node<S>>,
    ) -> NodeId {
        let entry = &self.memo[&(v, bx.clone())];
        match entry.tag[k] {
            Tag::Leaf => {
                nodes.insert(v, self.tree.node(v).clone());
                v
            }
            Tag::KeepLeft => {
                let (u, w) = self.tree.children(v).unwrap();
                let k2 = match self.variant {
                    Variant::Exact => k - 1 - self.cuts[&w],
                    Variant::AtLeast => k.saturating_sub(1 + self.cuts[&w]),
                };
                self.rebuild(u, bx, k2, nodes)
            }
            Tag::KeepRight => {
                let (u, w) = self.tree.children(v).unwrap();
                let k2 = match self.variant {
                    Variant::Exact => k - 1 - self.cuts[&u],
                    Variant::AtLeast => k.saturating_sub(1 + self.cuts[&u]),
                };
                self.rebuild(w, bx, k2, nodes)
            }
            Tag::Split(k_u) => {
                if let Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } = self.tree.node(v)
                {
                    let bl = bx.tighten_upper(*feature, threshold);
                    let br = bx.tighten_lower(*feature, threshold);
                    let l = self.rebuild(*left, &bl, k_u as usize, nodes);
                    let r = self.rebuild(*right, &br, k - k_u as usize, nodes);
                    nodes.insert(
                        v,
                        Node::Cut {
                            feature: *feature,
                            threshold: threshold.clone(),
                            left: l,
                            right: r,
                        },
                    );
                    v
                } else {
                    unreachable!("split tags only appear on cuts")
                }
            }
        }
    }

    fn stats(&self) -> DpStats {
        DpStats {
            memo_states: self.memo.len(),
            boxes_counted: self.counts.len(),
        }
    }
}

#[cfg(debug_assertions)]
fn allowed_bounds<S: Scalar>(
    tree: &DecisionTree<S>,
) -> BTreeMap<NodeId, Vec<AllowedBounds<S>>> {
    use crate::scalar::Bound;

    fn dfs<S: Scalar>(
        tree: &DecisionTree<S>,
        v: NodeId,
        current: &mut Vec<AllowedBounds<S>>,
        out: &mut BTreeMap<NodeId, Vec<AllowedBounds<S>>>,
    ) {
        out.insert(v, current.clone());
        if let Node::Cut {
            feature,
            threshold,
            left,
            right,
        } = tree.node(v)
        {
            let t = Bound::Finite(threshold.clone());
            let added_hi = current[*feature].hi.insert(t.clone());
            dfs(tree, *left, current, out);
            if added_hi {
                current[*feature].hi.remove(&t);
            }
            let added_lo = current[*feature].lo.insert(t.clone());
            dfs(tree, *right, current, out);
            if added_lo {
                current[*feature].lo.remove(&t);
            }
        }
    }

    let mut current = vec![
        AllowedBounds {
            lo: [Bound::NegInf].into_iter().collect(),
            hi: [Bound::PosInf].into_iter().collect(),
        };
        tree.d()
    ];
    let mut out = BTreeMap::new();
    dfs(tree, tree.root(), &mut current, &mut out);
    out
}

/// Fewest errors over raisings pruning exactly / at least `k` cuts, with a
/// witness; `None` when the query is infeasible within `t` errors.
pub fn solve_raising_boxdp<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    variant: Variant,
    k: usize,
    t: usize,
) -> Option<PruneOutcome<S>> {
    solve_raising_boxdp_with_stats(tree, data, variant, k, t).0
}

/// Same, also reporting memo sizes (for the state-count bound checks).
pub fn solve_raising_boxdp_with_stats<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    variant: Variant,
    k: usize,
    t: usize,
) -> (Option<PruneOutcome<S>>, DpStats) {
    let s = tree.num_cuts();
    let empty = DpStats {
        memo_states: 0,
        boxes_counted: 0,
    };
    if k > s {
        return (None, empty);
    }
    let mut dp = BoxDp::new(tree, data, variant, k);
    let full = FeatureBox::full(tree.d());
    dp.ensure(tree.root(), &full);
    let errors = dp.memo[&(tree.root(), full.clone())].q[k];
    let stats = dp.stats();
    if errors > t {
        return (None, stats);
    }
    let mut nodes = BTreeMap::new();
    let root = dp.rebuild(tree.root(), &full, k, &mut nodes);
    let witness = DecisionTree::from_parts(tree.d(), root, nodes)
        .expect("rebuilt witnesses are well-formed");
    let pruned = s - witness.num_cuts();
    debug_assert!(match variant {
        Variant::Exact => pruned == k,
        Variant::AtLeast => pruned >= k,
    });
    debug_assert_eq!(witness.errors_on(data), errors);
    let pruned_nodes = tree
        .ids()
        .filter(|id| !tree.is_leaf(*id) && !witness.contains(*id))
        .collect();
    (
        Some(PruneOutcome {
            min_errors: errors,
            pruned,
            pruned_nodes,
            tree: witness,
        }),
        stats,
    )
}

/// Both raising fronts from a single full-budget exact run.
pub fn pareto_raising<S: Scalar>(tree: &DecisionTree<S>, data: &Dataset<S>) -> RaisingFronts {
    let s = tree.num_cuts();
    let mut dp = BoxDp::new(tree, data, Variant::Exact, s);
    let full = FeatureBox::full(tree.d());
    dp.ensure(tree.root(), &full);
    let exact = dp.memo[&(tree.root(), full)].q.clone();
    let mut at_least = exact.clone();
    for k in (0..s).rev() {
        at_least[k] = at_least[k].min(at_least[k + 1]);
    }
    RaisingFronts { exact, at_least }
}
