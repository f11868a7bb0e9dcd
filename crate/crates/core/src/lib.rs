//! Exact pruning of binary decision trees.
//!
//! Two pruning operations are covered. *Subtree replacement* swaps the
//! subtree under a cut for a single majority-labeled leaf; *subtree
//! raising* replaces a cut's subtree by the subtree of one of its
//! children. For both, this crate answers the bi-objective question
//! exactly: over all ways to prune a given number of cuts, what is the
//! minimum number of training errors — as a single solve, as a full
//! Pareto front over every budget, and with a witness tree per optimum.
//!
//! The solver families:
//!
//! * [`replace`] — a tree knapsack over per-node budgets (fast, poly time);
//! * [`raise`] — a box-indexed dynamic program (the workhorse), a
//!   relevant-threshold variant that restricts the state space by the
//!   budget, a zero-error peeler, and a small enumerative solver, all of
//!   which cross-check each other;
//! * [`oracle`] — brute-force enumeration of every prunable tree, the
//!   ground truth the solvers are tested against;
//! * [`gen`] — instance generators with known answers (including
//!   reductions from independent set and hitting set whose feasibility is
//!   decided by graph brute force);
//! * [`heuristics`] — the classic greedy pruning passes, for comparing
//!   against the exact fronts.
//!
//! All of it is generic over the [`scalar::Scalar`] value type; the
//! crate-root aliases fix the default instantiation to exact `i64`
//! rationals, which is what the CLI and the file formats use. Routing
//! comparisons on rationals are exact, so half-integer thresholds (which
//! the generators and the domain reducer produce on purpose) never
//! misroute.

pub mod classify;
pub mod gen;
pub mod heuristics;
pub mod ingest;
pub mod model;
pub mod oracle;
pub mod raise;
pub mod replace;
pub mod scalar;
pub mod tree;

/// Exact rational scalar: the default value type.
pub type Rat = scalar::Rat;

/// Default-instantiation aliases. Code that does not care about the
/// scalar abstraction can use these and never mention a type parameter.
pub type Dataset = model::Dataset<Rat>;
pub type Example = model::Example<Rat>;
pub type Tree = tree::DecisionTree<Rat>;
pub type FeatureBox = model::FeatureBox<Rat>;

pub use model::{Label, Operation, SolveSpec, Variant};
pub use tree::NodeId;
