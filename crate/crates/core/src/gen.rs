//! Instance generators with independently known answers.
//!
//! Three families. The *gap* family ([`gen_nonmonotone`]) is the
//! construction showing that exact-budget raising is genuinely
//! non-monotone: pruning the full budget `k` restores a perfect tree
//! while every smaller nonzero budget forces an error. The *reduction*
//! families ([`gen_independent_set`], [`gen_hitting_set`]) encode graph
//! and set-cover questions as path-shaped pruning instances whose
//! feasibility we can also decide by brute force over vertex subsets —
//! ground truth that owes nothing to the solvers under test. Finally
//! [`gen_random`] produces seeded dataset/tree pairs for differential
//! and scale testing.
//!
//! All trees produced here are reasonable: every leaf receives at least
//! one example and carries its majority label.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

use crate::ingest::{induce_greedy, InduceOptions};
use crate::model::{Dataset, Label, Operation, SolveSpec, Variant};
use crate::scalar::Scalar;
use crate::tree::{DecisionTree, Node, NodeId};

// ---------------------------------------------------------------------------
// Graphs

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("line {line}: cannot parse {text:?}")]
    Parse { line: usize, text: String },
    #[error("edge ({u}, {v}): vertex out of range 1..={n}")]
    VertexOutOfRange { u: usize, v: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
}

/// A simple undirected graph. Vertices are `0..n` internally; the text
/// format is 1-indexed. Edges are stored normalized (`u < v`, sorted,
/// deduplicated).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Graph, GraphError> {
        let mut norm = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u + 1));
            }
            if u >= n || v >= n {
                return Err(GraphError::VertexOutOfRange {
                    u: u + 1,
                    v: v + 1,
                    n,
                });
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Graph { n, edges: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Parse the edge-list format: first line the vertex count, then one
    /// `u v` pair per line, 1-indexed. Blank lines are allowed.
    pub fn parse(text: &str) -> Result<Graph, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line, first) = lines.next().ok_or_else(|| GraphError::Parse {
            line: 1,
            text: String::new(),
        })?;
        let n: usize = first.parse().map_err(|_| GraphError::Parse {
            line,
            text: first.to_string(),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let mut it = l.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<usize, GraphError> {
                tok.and_then(|t| t.parse::<usize>().ok())
                    .filter(|v| *v >= 1)
                    .ok_or_else(|| GraphError::Parse {
                        line,
                        text: l.to_string(),
                    })
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(GraphError::Parse {
                    line,
                    text: l.to_string(),
                });
            }
            edges.push((u - 1, v - 1));
        }
        Graph::new(n, edges)
    }

    /// Serialize in the same 1-indexed edge-list format `parse` reads.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for (u, v) in &self.edges {
            out.push_str(&format!("{} {}\n", u + 1, v + 1));
        }
        out
    }

    /// Erdős–Rényi style draw: each possible edge independently with
    /// probability `edge_prob`.
    pub fn random(rng: &mut ChaCha8Rng, n: usize, edge_prob: f64) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(edge_prob) {
                    edges.push((u, v));
                }
            }
        }
        Graph::new(n, edges).expect("generated edges are in range")
    }

    /// Brute force over all vertex subsets of size `kappa`.
    pub fn has_independent_set(&self, kappa: usize) -> bool {
        if kappa > self.n {
            return false;
        }
        let mut adj = vec![0u64; self.n];
        for &(u, v) in &self.edges {
            adj[u] |= 1 << v;
            adj[v] |= 1 << u;
        }
        subsets_of_size(self.n, kappa)
            .any(|mask| (0..self.n).all(|v| mask & (1 << v) == 0 || adj[v] & mask == 0))
    }
}

/// Brute force over all `kappa`-subsets of `0..universe_size`: does some
/// subset intersect every given set?
pub fn hitting_set_exists(universe_size: usize, sets: &[Vec<usize>], kappa: usize) -> bool {
    let masks: Vec<u64> = sets
        .iter()
        .map(|s| s.iter().fold(0u64, |m, &u| m | 1 << u))
        .collect();
    subsets_of_size(universe_size, kappa.min(universe_size))
        .any(|h| masks.iter().all(|m| m & h != 0))
}

/// All bitmasks over `0..n` with exactly `size` bits set, ascending.
fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    (0u64..1 << n).filter(move |m| m.count_ones() as usize == size)
}

// ---------------------------------------------------------------------------
// The non-monotone gap family

/// A gap instance: pruning exactly `k` cuts by raising restores a
/// zero-error tree, while every budget strictly between 0 and `k` forces
/// at least one error.
#[derive(Debug, Clone)]
pub struct GapInstance<S: Scalar> {
    pub data: Dataset<S>,
    pub tree: DecisionTree<S>,
    pub k: usize,
}

impl<S: Scalar> GapInstance<S> {
    /// Does an exact-budget raising front show the promised pattern?
    /// Zero errors at budgets 0 and `k`, at least one everywhere between.
    pub fn front_matches(&self, exact_front: &[usize]) -> bool {
        exact_front.len() > self.k
            && exact_front[0] == 0
            && exact_front[self.k] == 0
            && (1..self.k).all(|j| exact_front[j] >= 1)
    }
}

/// Build the gap instance for budget `k`.
///
/// There are `k` binary features. Two red examples sit at the all-zeros
/// point and at the point with only feature 0 set; for every other
/// feature `j` there are two blue examples with feature `j` set, one on
/// each side of feature 0. The tree splits on feature 0 at the root and
/// hangs one identical chain under each side: the chain tests features
/// `1..k` in order, sending set examples to blue leaves and ending in a
/// red leaf. Raising the root away (and with it one whole chain — `k`
/// pruned cuts in total) leaves a single chain that still classifies
/// everything, but no smaller nonzero budget does.
///
/// # Panics
///
/// If `k < 2`; smaller budgets have no gap to show.
pub fn gen_nonmonotone<S: Scalar>(k: usize) -> GapInstance<S> {
    assert!(k >= 2, "the gap construction needs k >= 2, got {k}");
    let d = k;
    let zero = || vec![S::from_int(0); d];

    let mut rows: Vec<(Vec<S>, Label)> = Vec::new();
    for j in 1..k {
        let mut one_side = zero();
        one_side[j] = S::from_int(1);
        rows.push((one_side, Label::Blue));
        let mut other_side = zero();
        other_side[0] = S::from_int(1);
        other_side[j] = S::from_int(1);
        rows.push((other_side, Label::Blue));
    }
    rows.push((zero(), Label::Red));
    let mut red2 = zero();
    red2[0] = S::from_int(1);
    rows.push((red2, Label::Red));
    let data = Dataset::from_rows(d, rows).expect("gap data is well-formed");

    let mut nodes = BTreeMap::new();
    let mut next: NodeId = 0;
    let root = {
        let id = next;
        next += 1;
        let left = chain::<S>(1, k, &mut nodes, &mut next);
        let right = chain::<S>(1, k, &mut nodes, &mut next);
        nodes.insert(
            id,
            Node::Cut {
                feature: 0,
                threshold: S::from_int(0),
                left,
                right,
            },
        );
        id
    };
    let tree = DecisionTree::from_parts(d, root, nodes).expect("gap tree is well-formed");

    GapInstance { data, tree, k }
}

/// One chain of the gap tree: cuts on features `from..k`, each sending
/// the set side to a blue leaf, with a red leaf after the last cut.
fn chain<S: Scalar>(
    from: usize,
    k: usize,
    nodes: &mut BTreeMap<NodeId, Node<S>>,
    next: &mut NodeId,
) -> NodeId {
    let id = *next;
    *next += 1;
    let left = if from + 1 < k {
        chain(from + 1, k, nodes, next)
    } else {
        let leaf = *next;
        *next += 1;
        nodes.insert(leaf, Node::Leaf { label: Label::Red });
        leaf
    };
    let right = *next;
    *next += 1;
    nodes.insert(right, Node::Leaf { label: Label::Blue });
    nodes.insert(
        id,
        Node::Cut {
            feature: from,
            threshold: S::from_int(0),
            left,
            right,
        },
    );
    id
}

// ---------------------------------------------------------------------------
// Hardness reductions

/// A reduction instance: the pruning question `solve` is feasible on
/// `(tree, data)` if and only if `truth`, which was computed by brute
/// force on the source combinatorial problem.
#[derive(Debug, Clone)]
pub struct ReductionInstance<S: Scalar> {
    pub data: Dataset<S>,
    pub tree: DecisionTree<S>,
    pub solve: SolveSpec,
    pub truth: bool,
}

/// Encode `kappa`-independent-set on `g` as an exact raising question
/// with zero allowed errors.
///
/// One binary feature per vertex plus a guard feature. The tree is a
/// path testing each vertex feature in order (set examples exit to blue
/// leaves) and ends in a guard cut separating the all-zeros red example
/// from the guard example. Per edge there is a blue example with both
/// endpoint features set; per vertex a blue example that also sets the
/// guard, which keeps every leaf occupied and pins the guard cut in
/// place. Pruning a vertex cut (one elementary raising) selects that
/// vertex; an edge example is misclassified exactly when both its
/// endpoints are selected, so a zero-error pruning of exactly `kappa`
/// cuts is an independent set of size `kappa`.
pub fn gen_independent_set<S: Scalar>(g: &Graph, kappa: usize) -> ReductionInstance<S> {
    let n = g.n();
    let guard = n;
    let d = n + 1;
    let zero = || vec![S::from_int(0); d];

    let mut rows: Vec<(Vec<S>, Label)> = Vec::new();
    for &(u, v) in g.edges() {
        let mut e = zero();
        e[u] = S::from_int(1);
        e[v] = S::from_int(1);
        rows.push((e, Label::Blue));
    }
    for v in 0..n {
        let mut e = zero();
        e[v] = S::from_int(1);
        e[guard] = S::from_int(1);
        rows.push((e, Label::Blue));
    }
    let mut star = zero();
    star[guard] = S::from_int(1);
    rows.push((star, Label::Blue));
    rows.push((zero(), Label::Red));
    let data = Dataset::from_rows(d, rows).expect("reduction data is well-formed");

    ReductionInstance {
        data,
        tree: feature_path_tree::<S>(d),
        solve: SolveSpec {
            operation: Operation::Raising,
            variant: Variant::Exact,
            k: kappa,
            t: 0,
        },
        truth: g.has_independent_set(kappa),
    }
}

/// Encode `kappa`-hitting-set as an exact raising question with zero
/// allowed errors.
///
/// Same scaffold as [`gen_independent_set`], with elements `0..universe_size`
/// as the path features and one blue example per input set (its member
/// features set). A zero-error pruning must *keep* a cut from every set
/// — the kept elements hit everything — so feasibility at exactly
/// `universe_size - kappa` pruned cuts means a hitting set of size
/// `kappa` exists.
///
/// # Panics
///
/// If `kappa > universe_size`, a set is empty, or an element is out of
/// range.
pub fn gen_hitting_set<S: Scalar>(
    universe_size: usize,
    sets: &[Vec<usize>],
    kappa: usize,
) -> ReductionInstance<S> {
    assert!(kappa <= universe_size, "kappa must be at most the universe");
    assert!(
        sets.iter()
            .all(|s| !s.is_empty() && s.iter().all(|&u| u < universe_size)),
        "sets must be non-empty with elements in 0..universe_size"
    );
    let guard = universe_size;
    let d = universe_size + 1;
    let zero = || vec![S::from_int(0); d];

    let mut rows: Vec<(Vec<S>, Label)> = Vec::new();
    for set in sets {
        let mut e = zero();
        for &u in set {
            e[u] = S::from_int(1);
        }
        rows.push((e, Label::Blue));
    }
    for u in 0..universe_size {
        let mut e = zero();
        e[u] = S::from_int(1);
        e[guard] = S::from_int(1);
        rows.push((e, Label::Blue));
    }
    let mut star = zero();
    star[guard] = S::from_int(1);
    rows.push((star, Label::Blue));
    rows.push((zero(), Label::Red));
    let data = Dataset::from_rows(d, rows).expect("reduction data is well-formed");

    ReductionInstance {
        data,
        tree: feature_path_tree::<S>(d),
        solve: SolveSpec {
            operation: Operation::Raising,
            variant: Variant::Exact,
            k: universe_size - kappa,
            t: 0,
        },
        truth: hitting_set_exists(universe_size, sets, kappa),
    }
}

/// The reduction scaffold: a path of cuts on features `0..d-1` at
/// threshold 0, each sending the set side to a blue leaf; the final cut
/// (the guard) has the red leaf on its zero side and a blue leaf on the
/// other.
fn feature_path_tree<S: Scalar>(d: usize) -> DecisionTree<S> {
    let mut nodes = BTreeMap::new();
    let mut next: NodeId = 0;
    let guard = d - 1;

    fn rec<S: Scalar>(
        f: usize,
        guard: usize,
        nodes: &mut BTreeMap<NodeId, Node<S>>,
        next: &mut NodeId,
    ) -> NodeId {
        let id = *next;
        *next += 1;
        let left = if f < guard {
            rec(f + 1, guard, nodes, next)
        } else {
            let leaf = *next;
            *next += 1;
            nodes.insert(leaf, Node::Leaf { label: Label::Red });
            leaf
        };
        let right = *next;
        *next += 1;
        nodes.insert(right, Node::Leaf { label: Label::Blue });
        nodes.insert(
            id,
            Node::Cut {
                feature: f,
                threshold: S::from_int(0),
                left,
                right,
            },
        );
        id
    }

    let root = rec(0, guard, &mut nodes, &mut next);
    DecisionTree::from_parts(d, root, nodes).expect("path tree is well-formed")
}

// ---------------------------------------------------------------------------
// Random instances

/// Parameters for [`gen_random`]. Feature values are integers in
/// `0..value_range`; labels are blue with probability `class_balance`;
/// the tree is grown greedily with the given `min_leaf`.
#[derive(Debug, Clone)]
pub struct RandomParams {
    pub n: usize,
    pub d: usize,
    pub value_range: i64,
    pub class_balance: f64,
    pub min_leaf: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            n: 30,
            d: 3,
            value_range: 6,
            class_balance: 0.5,
            min_leaf: 1,
        }
    }
}

/// Seeded random dataset plus a greedily induced tree over it. The same
/// seed and parameters always reproduce the same instance, and the tree
/// is reasonable by construction.
pub fn gen_random<S: Scalar>(seed: u64, params: &RandomParams) -> (Dataset<S>, DecisionTree<S>) {
    assert!(params.n > 0 && params.d > 0 && params.value_range > 0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..params.n)
        .map(|_| {
            let values = (0..params.d)
                .map(|_| S::from_int(rng.gen_range(0..params.value_range)))
                .collect();
            let label = if rng.gen_bool(params.class_balance) {
                Label::Blue
            } else {
                Label::Red
            };
            (values, label)
        })
        .collect();
    let data = Dataset::from_rows(params.d, rows).expect("random data is well-formed");
    let tree = induce_greedy(
        &data,
        &InduceOptions {
            min_leaf: params.min_leaf,
            max_depth: None,
        },
    );
    (data, tree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Label::{Blue, Red};
    use crate::raise::{pareto_raising, solve_raising_boxdp, testutil::rng};
    use crate::scalar::Rat;

    fn feasible(inst: &ReductionInstance<Rat>) -> bool {
        assert_eq!(inst.solve.operation, Operation::Raising);
        assert_eq!(inst.solve.variant, Variant::Exact);
        solve_raising_boxdp(&inst.tree, &inst.data, Variant::Exact, inst.solve.k, inst.solve.t)
            .is_some()
    }

    #[test]
    fn gap_instance_shapes() {
        let g2 = gen_nonmonotone::<Rat>(2);
        assert_eq!(g2.data.len(), 4);
        assert_eq!(g2.tree.num_cuts(), 3);
        assert_eq!(g2.tree.errors_on(&g2.data), 0);

        let g3 = gen_nonmonotone::<Rat>(3);
        assert_eq!(g3.data.len(), 6);
        let (blue, red) = g3.data.label_counts();
        assert_eq!((blue, red), (4, 2));

        for k in 2..6 {
            let g = gen_nonmonotone::<Rat>(k);
            assert!(g.tree.validate_reasonable(&g.data).is_reasonable());
        }
    }

    #[test]
    #[should_panic(expected = "k >= 2")]
    fn gap_instance_rejects_tiny_budgets() {
        gen_nonmonotone::<Rat>(1);
    }

    #[test]
    fn gap_front_shows_the_non_monotone_pattern() {
        for k in 2..5 {
            let g = gen_nonmonotone::<Rat>(k);
            let fronts = pareto_raising(&g.tree, &g.data);
            assert!(
                g.front_matches(&fronts.exact),
                "k={k}: front {:?}",
                fronts.exact
            );
        }
    }

    #[test]
    fn triangle_has_no_independent_pair() {
        let g = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let inst = gen_independent_set::<Rat>(&g, 2);
        assert!(!inst.truth);
        assert!(!feasible(&inst));
        // ... but a single vertex is fine
        let inst1 = gen_independent_set::<Rat>(&g, 1);
        assert!(inst1.truth);
        assert!(feasible(&inst1));
    }

    #[test]
    fn path_endpoints_are_independent() {
        let g = Graph::parse("3\n1 2\n2 3\n").unwrap();
        let inst = gen_independent_set::<Rat>(&g, 2);
        assert!(inst.truth);
        assert!(feasible(&inst));
        assert_eq!(inst.solve.k, 2);
    }

    #[test]
    fn empty_selection_is_always_independent() {
        let g = Graph::new(2, [(0, 1)]).unwrap();
        let inst = gen_independent_set::<Rat>(&g, 0);
        assert!(inst.truth);
        assert!(feasible(&inst));
    }

    #[test]
    fn reduction_trees_are_reasonable_and_initially_correct() {
        let g = Graph::new(4, [(0, 1), (2, 3), (1, 2)]).unwrap();
        let inst = gen_independent_set::<Rat>(&g, 2);
        assert!(inst.tree.validate_reasonable(&inst.data).is_reasonable());
        assert_eq!(inst.tree.errors_on(&inst.data), 0);

        let h = gen_hitting_set::<Rat>(3, &[vec![0, 1], vec![1, 2]], 1);
        assert!(h.tree.validate_reasonable(&h.data).is_reasonable());
        assert_eq!(h.tree.errors_on(&h.data), 0);
    }

    #[test]
    fn singleton_sets_need_one_element_each() {
        // two disjoint singletons cannot be hit by one element
        let inst = gen_hitting_set::<Rat>(2, &[vec![0], vec![1]], 1);
        assert!(!inst.truth);
        assert!(!feasible(&inst));
    }

    #[test]
    fn shared_element_hits_both_sets() {
        let inst = gen_hitting_set::<Rat>(3, &[vec![0, 1], vec![1, 2]], 1);
        assert!(inst.truth);
        assert!(feasible(&inst));
        assert_eq!(inst.solve.k, 2); // universe 3, keep 1
    }

    #[test]
    fn solver_feasibility_tracks_graph_truth() {
        let mut g = rng(0xa1);
        for _ in 0..12 {
            let n = g.gen_range(2..6);
            let graph = Graph::random(&mut g, n, 0.5);
            let kappa = g.gen_range(0..=n);
            let inst = gen_independent_set::<Rat>(&graph, kappa);
            assert_eq!(
                feasible(&inst),
                inst.truth,
                "graph {:?} kappa {kappa}",
                graph
            );
        }
    }

    #[test]
    fn solver_feasibility_tracks_hitting_truth() {
        let mut g = rng(0xa2);
        for _ in 0..12 {
            let universe = g.gen_range(2..5usize);
            let num_sets = g.gen_range(1..4usize);
            let sets: Vec<Vec<usize>> = (0..num_sets)
                .map(|_| {
                    let size = g.gen_range(1..=universe);
                    let mut all: Vec<usize> = (0..universe).collect();
                    for i in 0..size {
                        let j = g.gen_range(i..universe);
                        all.swap(i, j);
                    }
                    let mut s = all[..size].to_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            let kappa = g.gen_range(0..=universe);
            let inst = gen_hitting_set::<Rat>(universe, &sets, kappa);
            assert_eq!(
                feasible(&inst),
                inst.truth,
                "universe {universe} sets {:?} kappa {kappa}",
                sets
            );
        }
    }

    #[test]
    fn graph_parsing_round_trips_and_rejects_garbage() {
        let g = Graph::parse("4\n1 2\n3 4\n2 3\n").unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.edges(), &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(Graph::parse(&g.to_text()).unwrap(), g);

        assert!(matches!(
            Graph::parse("3\n1 1\n"),
            Err(GraphError::SelfLoop(1))
        ));
        assert!(matches!(
            Graph::parse("3\n1 9\n"),
            Err(GraphError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            Graph::parse("3\n1 two\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
        assert!(matches!(
            Graph::parse("3\n1 2 3\n"),
            Err(GraphError::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn independence_and_hitting_brute_force_spot_checks() {
        let triangle = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(triangle.has_independent_set(1));
        assert!(!triangle.has_independent_set(2));
        let empty = Graph::new(4, []).unwrap();
        assert!(empty.has_independent_set(4));
        assert!(!empty.has_independent_set(5));

        assert!(hitting_set_exists(3, &[vec![0, 1], vec![1, 2]], 1));
        assert!(!hitting_set_exists(2, &[vec![0], vec![1]], 1));
        assert!(hitting_set_exists(2, &[vec![0], vec![1]], 2));
    }

    #[test]
    fn random_instances_are_deterministic_and_reasonable() {
        let params = RandomParams::default();
        let (d1, t1) = gen_random::<Rat>(7, &params);
        let (d2, t2) = gen_random::<Rat>(7, &params);
        assert_eq!(t1, t2);
        assert_eq!(d1.examples(), d2.examples());

        let (d3, t3) = gen_random::<Rat>(8, &params);
        assert!(t3.validate_reasonable(&d3).is_reasonable());
        assert!(t3.num_cuts() <= d3.len() - 1);

        for (label, n_blue_expected) in [(0.0, 0), (1.0, 20)] {
            let p = RandomParams {
                n: 20,
                class_balance: label,
                ..RandomParams::default()
            };
            let (d, _) = gen_random::<Rat>(9, &p);
            assert_eq!(d.label_counts().0, n_blue_expected);
        }
    }

    #[test]
    fn gap_examples_route_to_pure_leaves() {
        // spot-check the k=2 construction end to end
        let g = gen_nonmonotone::<Rat>(2);
        let r = |v: i64| Rat::from_int(v);
        assert_eq!(g.tree.classify(&[r(0), r(0)]), Red);
        assert_eq!(g.tree.classify(&[r(1), r(0)]), Red);
        assert_eq!(g.tree.classify(&[r(0), r(1)]), Blue);
        assert_eq!(g.tree.classify(&[r(1), r(1)]), Blue);
    }
}
