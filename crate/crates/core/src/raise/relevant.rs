//! Bottom-up exact-budget solver over explicitly enumerated states.
//!
//! Where the memoized DP discovers (node, box) states top-down on demand,
//! this solver *constructs* every state a node could possibly be asked
//! about, walking the tree in post-order. The box a node can see is fully
//! determined by which ancestor cuts survive, so each bound is either a
//! sentinel or an ancestor threshold of the right orientation: lower bounds
//! come from ancestors the node sits right of, upper bounds from ancestors
//! it sits left of.
//!
//! Not every combination matters. A bound looser than some ancestor's
//! threshold means that ancestor was raised away, which costs budget — at
//! least one cut per violated ancestor. States whose implied removals
//! already exceed the global budget `k` can never be consulted and are
//! skipped; for the rest, budgets run only to `k − implied`. Every lookup
//! a parent performs is then *required* to hit an enumerated child state —
//! the accesses are deliberately unguarded, so a gap in the enumeration
//! argument would crash the differential tests rather than silently agree.

use std::collections::{BTreeMap, HashMap};

use crate::model::{Dataset, FeatureBox, Label};
use crate::replace::PruneOutcome;
use crate::scalar::{Bound, Scalar};
use crate::tree::{DecisionTree, Node, NodeId};

#[derive(Debug, Clone, Copy)]
enum Tag {
    Leaf,
    KeepLeft,
    KeepRight,
    Split(u32),
}

struct Entry {
    /// `q[k']` for `k' ∈ 0..=min(s_v, k − implied removals)`.
    q: Vec<usize>,
    tag: Vec<Tag>,
}

/// Fewest errors over raisings pruning exactly `k` cuts, within `t`;
/// bottom-up enumeration. Must agree with the box DP wherever both run.
pub fn solve_raising_exact_fptk<S: Scalar>(
    tree: &DecisionTree<S>,
    data: &Dataset<S>,
    k: usize,
    t: usize,
) -> Option<PruneOutcome<S>> {
    let s = tree.num_cuts();
    if k > s {
        return None;
    }

    let d = tree.d();
    let cuts = cut_counts(tree);
    let ancestors = ancestor_cuts(tree);
    let mut tables: BTreeMap<NodeId, HashMap<FeatureBox<S>, Entry>> = BTreeMap::new();
    let mut counts: HashMap<FeatureBox<S>, (usize, usize)> = HashMap::new();

    for v in tree.postorder() {
        let anc = &ancestors[&v];
        let mut table: HashMap<FeatureBox<S>, Entry> = HashMap::new();
        for bx in candidate_boxes(d, anc) {
            let implied = implied_removals(anc, &bx);
            if implied > k {
                continue;
            }
            let top = cuts[&v].min(k - implied);
            let entry = match tree.node(v) {
                Node::Leaf { label } => {
                    let (nb, nr) = box_counts(data, &mut counts, &bx);
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
                    let (s_u, s_w) = (cuts[&u], cuts[&w]);
                    let bl = bx.tighten_upper(*feature, threshold);
                    let br = bx.tighten_lower(*feature, threshold);
                    let tu = &tables[&u];
                    let tw = &tables[&w];
                    let qu_split = &tu[&bl].q;
                    let qw_split = &tw[&br].q;
                    let mut q = Vec::with_capacity(top + 1);
                    let mut tag = Vec::with_capacity(top + 1);
                    for k2 in 0..=top {
                        let mut best = usize::MAX;
                        let mut bt = None;
                        if k2 >= 1 + s_w {
                            let e = tu[&bx].q[k2 - 1 - s_w];
                            if e < best {
                                best = e;
                                bt = Some(Tag::KeepLeft);
                            }
                        }
                        if k2 >= 1 + s_u {
                            let e = tw[&bx].q[k2 - 1 - s_u];
                            if e < best {
                                best = e;
                                bt = Some(Tag::KeepRight);
                            }
                        }
                        let lo = k2.saturating_sub(qw_split.len() - 1);
                        let hi = k2.min(qu_split.len() - 1);
                        for k_u in lo..=hi {
                            let e = qu_split[k_u].saturating_add(qw_split[k2 - k_u]);
                            if e < best {
                                best = e;
                                bt = Some(Tag::Split(k_u as u32));
                            }
                        }
                        debug_assert!(best < usize::MAX);
                        q.push(best);
                        tag.push(bt.unwrap());
                    }
                    Entry { q, tag }
                }
            };
            table.insert(bx, entry);
        }
        tables.insert(v, table);
    }

    let full = FeatureBox::full(d);
    let root_entry = &tables[&tree.root()][&full];
    let errors = root_entry.q[k];
    if errors > t {
        return None;
    }

    let mut nodes = BTreeMap::new();
    let root = rebuild(tree, &cuts, &tables, tree.root(), &full, k, &mut nodes);
    let witness =
        DecisionTree::from_parts(d, root, nodes).expect("rebuilt witnesses are well-formed");
    let pruned = s - witness.num_cuts();
    debug_assert_eq!(pruned, k);
    debug_assert_eq!(witness.errors_on(data), errors);
    let pruned_nodes = tree
        .ids()
        .filter(|id| !tree.is_leaf(*id) && !witness.contains(*id))
        .collect();
    Some(PruneOutcome {
        min_errors: errors,
        pruned,
        pruned_nodes,
        tree: witness,
    })
}

fn rebuild<S: Scalar>(
    tree: &DecisionTree<S>,
    cuts: &BTreeMap<NodeId, usize>,
    tables: &BTreeMap<NodeId, HashMap<FeatureBox<S>, Entry>>,
    v: NodeId,
    bx: &FeatureBox<S>,
    k: usize,
    nodes: &mut BTreeMap<NodeId, Node<S>>,
) -> NodeId {
    match tables[&v][bx].tag[k] {
        Tag::Leaf => {
            nodes.insert(v, tree.node(v).clone());
            v
        }
        Tag::KeepLeft => {
            let (u, w) = tree.children(v).unwrap();
            rebuild(tree, cuts, tables, u, bx, k - 1 - cuts[&w], nodes)
        }
        Tag::KeepRight => {
            let (u, w) = tree.children(v).unwrap();
            rebuild(tree, cuts, tables, w, bx, k - 1 - cuts[&u], nodes)
        }
        Tag::Split(k_u) => {
            if let Node::Cut {
                feature,
                threshold,
                left,
                right,
            } = tree.node(v)
            {
                let bl = bx.tighten_upper(*feature, threshold);
                let br = bx.tighten_lower(*feature, threshold);
                let l = rebuild(tree, cuts, tables, *left, &bl, k_u as usize, nodes);
                let r = rebuild(tree, cuts, tables, *right, &br, k - k_u as usize, nodes);
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

fn cut_counts<S: Scalar>(tree: &DecisionTree<S>) -> BTreeMap<NodeId, usize> {
    let mut cuts = BTreeMap::new();
    for v in tree.postorder() {
        let c = match tree.node(v) {
            Node::Leaf { .. } => 0,
            Node::Cut { left, right, .. } => 1 + cuts[left] + cuts[right],
        };
        cuts.insert(v, c);
    }
    cuts
}

/// One ancestor cut of a node, seen from below.
struct AncestorCut<S> {
    feature: usize,
    threshold: S,
    /// Whether the node lies in the ancestor's left subtree (the ancestor
    /// caps values from above) or its right (it bounds from below).
    left_of: bool,
}

fn ancestor_cuts<S: Scalar>(tree: &DecisionTree<S>) -> BTreeMap<NodeId, Vec<AncestorCut<S>>> {
    fn dfs<S: Scalar>(
        tree: &DecisionTree<S>,
        v: NodeId,
        path: &mut Vec<AncestorCut<S>>,
        out: &mut BTreeMap<NodeId, Vec<AncestorCut<S>>>,
    ) {
        out.insert(
            v,
            path.iter()
                .map(|a| AncestorCut {
                    feature: a.feature,
                    threshold: a.threshold.clone(),
                    left_of: a.left_of,
                })
                .collect(),
        );
        if let Node::Cut {
            feature,
            threshold,
            left,
            right,
        } = tree.node(v)
        {
            path.push(AncestorCut {
                feature: *feature,
                threshold: threshold.clone(),
                left_of: true,
            });
            dfs(tree, *left, path, out);
            path.last_mut().unwrap().left_of = false;
            dfs(tree, *right, path, out);
            path.pop();
        }
    }
    let mut out = BTreeMap::new();
    dfs(tree, tree.root(), &mut Vec::new(), &mut out);
    out
}

/// Every box assemblable from a node's ancestor thresholds: per feature,
/// lower bounds from right-side ancestors plus `−∞`, upper bounds from
/// left-side ancestors plus `+∞`, all combinations.
fn candidate_boxes<S: Scalar>(d: usize, anc: &[AncestorCut<S>]) -> Vec<FeatureBox<S>> {
    let mut lo_cands: Vec<Vec<Bound<S>>> = vec![vec![Bound::NegInf]; d];
    let mut hi_cands: Vec<Vec<Bound<S>>> = vec![vec![Bound::PosInf]; d];
    for a in anc {
        let cand = Bound::Finite(a.threshold.clone());
        let list = if a.left_of {
            &mut hi_cands[a.feature]
        } else {
            &mut lo_cands[a.feature]
        };
        if !list.contains(&cand) {
            list.push(cand);
        }
    }
    let mut boxes = vec![FeatureBox::full(d)];
    for f in 0..d {
        let mut next = Vec::with_capacity(boxes.len() * lo_cands[f].len() * hi_cands[f].len());
        for bx in &boxes {
            for lo in &lo_cands[f] {
                for hi in &hi_cands[f] {
                    next.push(bx.with_bounds(f, lo.clone(), hi.clone()));
                }
            }
        }
        boxes = next;
    }
    boxes
}

/// How many ancestor cuts must have been raised away for the node to see
/// this box: every right-side ancestor whose threshold still exceeds the
/// lower bound, and every left-side one still under the upper bound.
/// Strict comparisons, so duplicated thresholds on a path count cleanly.
fn implied_removals<S: Scalar>(anc: &[AncestorCut<S>], bx: &FeatureBox<S>) -> usize {
    anc.iter()
        .filter(|a| {
            let cand = Bound::Finite(a.threshold.clone());
            if a.left_of {
                cand < *bx.hi(a.feature)
            } else {
                cand > *bx.lo(a.feature)
            }
        })
        .count()
}

fn box_counts<S: Scalar>(
    data: &Dataset<S>,
    cache: &mut HashMap<FeatureBox<S>, (usize, usize)>,
    bx: &FeatureBox<S>,
) -> (usize, usize) {
    if let Some(&c) = cache.get(bx) {
        return c;
    }
    let mut nb = 0;
    let mut nr = 0;
    for e in data.examples() {
        if bx.contains(&e.values) {
            match e.label {
                Label::Blue => nb += 1,
                Label::Red => nr += 1,
            }
        }
    }
    cache.insert(bx.clone(), (nb, nr));
    (nb, nr)
}
