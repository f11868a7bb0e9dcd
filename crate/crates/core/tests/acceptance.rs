//! The acceptance gate: one test per shipping criterion, each printing a
//! single PASS line with its measured runtime (visible with
//! `cargo test --test acceptance -- --nocapture`). Everything here goes
//! through the public API only.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use prunex_core::classify::{classify_naive, max_light_edges, HldIndex};
use prunex_core::gen::{
    gen_hitting_set, gen_independent_set, gen_nonmonotone, gen_random, Graph, RandomParams,
};
use prunex_core::heuristics::{heuristic_raising, heuristic_replacement};
use prunex_core::oracle::{enumerate_pruned_trees, oracle_pareto};
use prunex_core::raise::{
    is_prunable_to, pareto_raising, solve_raising_boxdp, solve_raising_exact_fptk,
    solve_raising_subsets,
};
use prunex_core::replace::pareto_replacement;
use prunex_core::tree::{DecisionTree, Node};
use prunex_core::{Dataset, Label, NodeId, Operation, Rat, Tree, Variant};

/// Seeded instances in the oracle-checkable regime: n ≤ 12, d ≤ 3,
/// 1 ≤ s ≤ 7. Deterministic: seeds are consumed in order and filtered.
fn small_instances(count: usize) -> Vec<(Dataset, Tree)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let i = seed as usize;
        let params = RandomParams {
            n: 6 + i % 7,
            d: 1 + i % 3,
            value_range: 2 + (i % 2) as i64,
            class_balance: 0.5,
            min_leaf: 1,
        };
        let (data, tree) = gen_random::<Rat>(seed, &params);
        seed += 1;
        if (1..=7).contains(&tree.num_cuts()) {
            out.push((data, tree));
        }
    }
    out
}

#[test]
fn replacement_front_equals_the_oracle_on_200_instances() {
    let start = Instant::now();
    for (i, (data, tree)) in small_instances(200).iter().enumerate() {
        let front = pareto_replacement(tree, data);
        let reach = enumerate_pruned_trees(tree, data, Operation::Replacement)
            .expect("s ≤ 7 is under the enumeration cap");
        let oracle = oracle_pareto(&reach);
        assert_eq!(front.len(), oracle.at_least.len(), "instance {i}");
        for (k, &errors) in front.iter().enumerate() {
            assert_eq!(
                Some(errors),
                oracle.at_least[k],
                "instance {i}, budget {k}"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:.1?}");
    println!("PASS replacement front equals the oracle on 200 instances ({elapsed:.1?})");
}

#[test]
fn raising_solvers_equal_the_oracle_on_200_instances() {
    let start = Instant::now();
    for (i, (data, tree)) in small_instances(200).iter().enumerate() {
        let s = tree.num_cuts();
        let n = data.len();
        let reach = enumerate_pruned_trees(tree, data, Operation::Raising)
            .expect("s ≤ 7 is under the enumeration cap");
        let oracle = oracle_pareto(&reach);
        let fronts = pareto_raising(tree, data);

        for k in 0..=s {
            let exact = oracle.exact[k].expect("every exact raising budget is reachable");
            let at_least = oracle.at_least[k].expect("suffix of a total front");
            assert_eq!(fronts.exact[k], exact, "instance {i}, budget {k}");
            assert_eq!(fronts.at_least[k], at_least, "instance {i}, budget {k}");

            let solved = solve_raising_boxdp(tree, data, Variant::Exact, k, n)
                .expect("feasible at t = n");
            assert_eq!(solved.min_errors, exact, "instance {i}, budget {k}");
            let solved = solve_raising_boxdp(tree, data, Variant::AtLeast, k, n)
                .expect("feasible at t = n");
            assert_eq!(solved.min_errors, at_least, "instance {i}, budget {k}");

            let fptk = solve_raising_exact_fptk(tree, data, k, n).expect("feasible at t = n");
            assert_eq!(fptk.min_errors, exact, "instance {i}, budget {k}");
            assert_eq!(
                solve_raising_exact_fptk(tree, data, k, 0).is_some(),
                exact == 0,
                "instance {i}, budget {k}"
            );
        }

        for k in 0..=2.min(s) {
            for t in 0..=2 {
                assert_eq!(
                    solve_raising_subsets(tree, data, k, t).is_some(),
                    oracle.exact[k].expect("total front") <= t,
                    "instance {i}, k {k}, t {t}"
                );
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:.1?}");
    println!("PASS raising solvers equal the oracle on 200 instances ({elapsed:.1?})");
}

#[test]
fn gap_family_fronts_vanish_only_at_the_full_budget() {
    let start = Instant::now();
    for k in 2..=6 {
        let g = gen_nonmonotone::<Rat>(k);
        let fronts = pareto_raising(&g.tree, &g.data);
        assert_eq!(fronts.exact[0], 0, "k = {k}");
        assert_eq!(fronts.exact[k], 0, "k = {k}");
        for j in 1..k {
            assert!(
                fronts.exact[j] >= 1,
                "k = {k}: budget {j} reached {} errors",
                fronts.exact[j]
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:.1?}");
    println!("PASS gap-family fronts vanish only at the full budget, k = 2..=6 ({elapsed:.1?})");
}

#[test]
fn reduction_feasibility_equals_brute_force_truth() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACC4);

    for i in 0..60 {
        let n = 2 + i % 7; // up to 8 vertices
        let p = [0.2, 0.45, 0.7][i % 3];
        let graph = Graph::random(&mut rng, n, p);
        let kappa = rng.gen_range(0..=n + 1); // occasionally impossible by size
        let inst = gen_independent_set::<Rat>(&graph, kappa);
        let feasible =
            solve_raising_boxdp(&inst.tree, &inst.data, Variant::Exact, inst.solve.k, inst.solve.t)
                .is_some();
        assert_eq!(
            feasible, inst.truth,
            "graph {i}: n {n}, edges {:?}, kappa {kappa}",
            graph.edges()
        );
    }

    for i in 0..60 {
        let universe = 2 + i % 5; // |U| up to 6
        let num_sets = 1 + rng.gen_range(0..4);
        let sets: Vec<Vec<usize>> = (0..num_sets)
            .map(|_| {
                let size = rng.gen_range(1..=universe);
                let mut pool: Vec<usize> = (0..universe).collect();
                for j in 0..size {
                    let swap = rng.gen_range(j..universe);
                    pool.swap(j, swap);
                }
                let mut set = pool[..size].to_vec();
                set.sort_unstable();
                set
            })
            .collect();
        let kappa = rng.gen_range(0..=universe);
        let inst = gen_hitting_set::<Rat>(universe, &sets, kappa);
        let feasible =
            solve_raising_boxdp(&inst.tree, &inst.data, Variant::Exact, inst.solve.k, inst.solve.t)
                .is_some();
        assert_eq!(
            feasible, inst.truth,
            "hitting {i}: universe {universe}, sets {sets:?}, kappa {kappa}"
        );
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:.1?}");
    println!("PASS reduction feasibility equals brute-force truth on 60 + 60 instances ({elapsed:.1?})");
}

/// A random tree shape with the given number of cuts: budget split
/// recursively, features and half-integer thresholds drawn uniformly.
fn random_tree(rng: &mut ChaCha8Rng, d: usize, cuts: usize) -> Tree {
    fn grow(
        rng: &mut ChaCha8Rng,
        d: usize,
        cuts: usize,
        next: &mut NodeId,
        nodes: &mut BTreeMap<NodeId, Node<Rat>>,
    ) -> NodeId {
        let id = *next;
        *next += 1;
        if cuts == 0 {
            let label = if rng.gen_bool(0.5) {
                Label::Blue
            } else {
                Label::Red
            };
            nodes.insert(id, Node::Leaf { label });
            return id;
        }
        let feature = rng.gen_range(0..d);
        let threshold = Rat::new(rng.gen_range(0..6) * 2 + 1, 2);
        let left_cuts = rng.gen_range(0..cuts);
        let left = grow(rng, d, left_cuts, next, nodes);
        let right = grow(rng, d, cuts - 1 - left_cuts, next, nodes);
        nodes.insert(
            id,
            Node::Cut {
                feature,
                threshold,
                left,
                right,
            },
        );
        id
    }

    let mut nodes = BTreeMap::new();
    let mut next = 0;
    let root = grow(rng, d, cuts, &mut next, &mut nodes);
    DecisionTree::from_parts(d, root, nodes).expect("generated tree is well-formed")
}

#[test]
fn hld_routing_agrees_with_naive_descent_and_paths_are_log_light() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x41D);
    let d = 5;

    for i in 0..100usize {
        let s = 5 + i * 5; // 5 ..= 500 cuts
        let tree = random_tree(&mut rng, d, s);
        let index = HldIndex::build(&tree);

        for _ in 0..100 {
            let values: Vec<Rat> = (0..d).map(|_| Rat::from(rng.gen_range(0..7))).collect();
            let (naive_leaf, _) = classify_naive(&tree, &values);
            let (hld_leaf, _) = index.classify(&tree, &values);
            assert_eq!(naive_leaf, hld_leaf, "tree {i}");
        }

        let node_count = 2 * s + 1;
        let bound = usize::ilog2(node_count) as usize;
        let light = max_light_edges(&tree);
        assert!(
            light <= bound,
            "tree {i}: {light} light edges on a path, bound {bound}"
        );
    }

    let elapsed = start.elapsed();
    println!("PASS heavy-light routing agrees with naive descent on 10^4 pairs ({elapsed:.1?})");
}

#[test]
fn replacement_fronts_are_monotone_on_reasonable_trees() {
    let start = Instant::now();
    for seed in 0..100u64 {
        let params = RandomParams {
            n: 40,
            d: 4,
            value_range: 4,
            class_balance: 0.5,
            min_leaf: 2,
        };
        let (data, tree) = gen_random::<Rat>(1_000 + seed, &params);
        assert!(tree.validate_reasonable(&data).is_reasonable());
        let front = pareto_replacement(&tree, &data);
        for k in 1..front.len() {
            assert!(
                front[k - 1] <= front[k],
                "seed {seed}: front decreases at {k}: {front:?}"
            );
        }
    }
    let elapsed = start.elapsed();
    println!("PASS replacement fronts are monotone on 100 reasonable trees ({elapsed:.1?})");
}

#[test]
fn heuristics_never_beat_the_exact_fronts() {
    let start = Instant::now();
    for seed in 0..50u64 {
        let params = RandomParams {
            n: 26,
            d: 3,
            value_range: 4,
            class_balance: 0.5,
            min_leaf: 1,
        };
        let (data, tree) = gen_random::<Rat>(2_000 + seed, &params);

        let rep = heuristic_replacement(&tree, &data);
        let rep_front = pareto_replacement(&tree, &data);
        assert!(
            rep.t_result >= rep_front[rep.k_used],
            "seed {seed}: replacement heuristic ({}, {}) beats {rep_front:?}",
            rep.k_used,
            rep.t_result
        );

        let rai = heuristic_raising(&tree, &data);
        let rai_fronts = pareto_raising(&tree, &data);
        assert!(
            rai.t_result >= rai_fronts.exact[rai.k_used],
            "seed {seed}: raising heuristic ({}, {}) beats {:?}",
            rai.k_used,
            rai.t_result,
            rai_fronts.exact
        );
    }
    let elapsed = start.elapsed();
    println!("PASS heuristics never beat the exact fronts on 50 instances ({elapsed:.1?})");
}

#[test]
fn full_raising_sweep_finishes_at_survey_scale() {
    // the working regime reported for real datasets: a few hundred
    // examples, ten features, a tree of about sixty cuts
    let params = RandomParams {
        n: 600,
        d: 10,
        value_range: 4,
        class_balance: 0.5,
        min_leaf: 8,
    };
    let (data, tree) = gen_random::<Rat>(42, &params);
    let metrics = tree.metrics();
    assert!(
        (40..=80).contains(&metrics.s),
        "induced size drifted: s = {}",
        metrics.s
    );
    assert!(metrics.max_path_features <= 10);

    let start = Instant::now();
    let fronts = pareto_raising(&tree, &data);
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(600), "sweep took {elapsed:.1?}");
    assert_eq!(fronts.exact.len(), metrics.s + 1);

    // witness re-validation at sampled budgets — the only correctness
    // claim at this scale
    for k in [metrics.s / 4, metrics.s / 2, metrics.s] {
        let outcome = solve_raising_boxdp(&tree, &data, Variant::Exact, k, data.len())
            .expect("feasible at t = n");
        assert!(is_prunable_to(&tree, &outcome.tree), "budget {k}");
        assert_eq!(outcome.tree.errors_on(&data), outcome.min_errors, "budget {k}");
        assert_eq!(outcome.min_errors, fronts.exact[k], "budget {k}");
    }

    println!(
        "PASS full raising sweep at survey scale: s = {}, n = {}, swept in {elapsed:.1?}",
        metrics.s,
        data.len()
    );
}
