//! Examples, datasets, and the small shared vocabulary of the solvers.
//!
//! A dataset is a list of `d`-dimensional examples, each labeled blue or
//! red. Per feature we keep the canonical separating threshold set: the
//! midpoints between consecutive distinct values, which is the unique
//! minimum-size set that separates every pair of distinct values.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::scalar::{Bound, Scalar};

/// Binary class label. Ties in majority votes go to blue throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Blue,
    Red,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Blue => Label::Red,
            Label::Red => Label::Blue,
        }
    }

    pub fn parse(text: &str) -> Option<Label> {
        match text {
            "blue" => Some(Label::Blue),
            "red" => Some(Label::Red),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Blue => write!(f, "blue"),
            Label::Red => write!(f, "red"),
        }
    }
}

/// Majority label of a `(blue, red)` count pair; blue wins ties.
pub fn majority_label(n_blue: usize, n_red: usize) -> Label {
    if n_blue >= n_red {
        Label::Blue
    } else {
        Label::Red
    }
}

/// One labeled example. Ids are stable identifiers assigned at load time
/// (file order for CSV input) and survive deduplication, so diagnostics can
/// name the original row.
#[derive(Debug, Clone, PartialEq)]
pub struct Example<S> {
    pub id: u32,
    pub values: Vec<S>,
    pub label: Label,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("example {id} has {got} values, expected {expected}")]
    WrongArity { id: u32, got: usize, expected: usize },
    #[error("dataset has no examples")]
    Empty,
}

/// A labeled dataset with cached per-feature threshold sets.
#[derive(Debug, Clone)]
pub struct Dataset<S: Scalar> {
    d: usize,
    examples: Vec<Example<S>>,
    thresholds: Vec<Vec<S>>,
}

impl<S: Scalar> Dataset<S> {
    pub fn new(d: usize, examples: Vec<Example<S>>) -> Result<Self, ModelError> {
        if examples.is_empty() {
            return Err(ModelError::Empty);
        }
        for e in &examples {
            if e.values.len() != d {
                return Err(ModelError::WrongArity {
                    id: e.id,
                    got: e.values.len(),
                    expected: d,
                });
            }
        }
        let thresholds = (0..d)
            .map(|i| compute_thresholds(examples.iter().map(|e| e.values[i].clone())))
            .collect();
        Ok(Dataset {
            d,
            examples,
            thresholds,
        })
    }

    /// Build from `(values, label)` rows, assigning ids by position.
    pub fn from_rows(d: usize, rows: Vec<(Vec<S>, Label)>) -> Result<Self, ModelError> {
        let examples = rows
            .into_iter()
            .enumerate()
            .map(|(i, (values, label))| Example {
                id: i as u32,
                values,
                label,
            })
            .collect();
        Self::new(d, examples)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn examples(&self) -> &[Example<S>] {
        &self.examples
    }

    /// Separating thresholds of one feature (midpoints of consecutive
    /// distinct values, in increasing order).
    pub fn thresholds(&self, feature: usize) -> &[S] {
        &self.thresholds[feature]
    }

    pub fn label_counts(&self) -> (usize, usize) {
        let blue = self
            .examples
            .iter()
            .filter(|e| e.label == Label::Blue)
            .count();
        (blue, self.examples.len() - blue)
    }

    pub fn metrics(&self) -> DatasetMetrics {
        let distinct_per_feature: Vec<usize> = (0..self.d)
            .map(|i| {
                let mut vals: Vec<&S> = self.examples.iter().map(|e| &e.values[i]).collect();
                vals.sort_by(|a, b| a.total_cmp(b));
                vals.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
                vals.len()
            })
            .collect();
        let max_distinct = distinct_per_feature.iter().copied().max().unwrap_or(0);

        // Largest number of differing features over cross-class pairs.
        let mut delta_max = 0usize;
        for (i, a) in self.examples.iter().enumerate() {
            for b in &self.examples[i + 1..] {
                if a.label == b.label {
                    continue;
                }
                let diff = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .filter(|(x, y)| x.total_cmp(y) != Ordering::Equal)
                    .count();
                delta_max = delta_max.max(diff);
            }
        }

        DatasetMetrics {
            n: self.examples.len(),
            d: self.d,
            distinct_per_feature,
            max_distinct,
            delta_max,
        }
    }
}

/// Instance-size parameters of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetMetrics {
    pub n: usize,
    pub d: usize,
    /// Distinct value count of each feature.
    pub distinct_per_feature: Vec<usize>,
    /// Maximum of `distinct_per_feature`.
    pub max_distinct: usize,
    /// Maximum number of features on which a blue and a red example differ.
    pub delta_max: usize,
}

/// Minimum-size separating threshold set of a value multiset: one midpoint
/// between each pair of consecutive distinct values.
pub fn compute_thresholds<S: Scalar>(values: impl IntoIterator<Item = S>) -> Vec<S> {
    let mut vals: Vec<S> = values.into_iter().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals.dedup_by(|a, b| a.total_cmp(b) == Ordering::Equal);
    vals.windows(2).map(|w| S::midpoint(&w[0], &w[1])).collect()
}

/// An axis-aligned box of feature values: per feature a half-open interval
/// `(lo, hi]`, with infinite bounds where nothing constrains the feature.
///
/// Equality and hashing go through [`Bound`], which compares by value and
/// hashes by [`Scalar::Key`] — so boxes work as map keys for any scalar,
/// floats included.
#[derive(Debug, Clone)]
pub struct FeatureBox<S: Scalar> {
    bounds: Vec<(Bound<S>, Bound<S>)>,
}

impl<S: Scalar> FeatureBox<S> {
    pub fn full(d: usize) -> Self {
        FeatureBox {
            bounds: vec![(Bound::NegInf, Bound::PosInf); d],
        }
    }

    pub fn d(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(Bound<S>, Bound<S>)] {
        &self.bounds
    }

    pub fn lo(&self, feature: usize) -> &Bound<S> {
        &self.bounds[feature].0
    }

    pub fn hi(&self, feature: usize) -> &Bound<S> {
        &self.bounds[feature].1
    }

    /// Intersect with `value <= threshold` on one feature (the left branch
    /// of a cut): the upper bound can only tighten downward.
    pub fn tighten_upper(&self, feature: usize, threshold: &S) -> Self {
        let mut out = self.clone();
        let t = Bound::Finite(threshold.clone());
        if t < out.bounds[feature].1 {
            out.bounds[feature].1 = t;
        }
        out
    }

    /// Intersect with `value > threshold` on one feature (the right branch
    /// of a cut): the lower bound can only tighten upward.
    pub fn tighten_lower(&self, feature: usize, threshold: &S) -> Self {
        let mut out = self.clone();
        let t = Bound::Finite(threshold.clone());
        if t > out.bounds[feature].0 {
            out.bounds[feature].0 = t;
        }
        out
    }

    /// Replace both bounds of one feature outright.
    pub fn with_bounds(&self, feature: usize, lo: Bound<S>, hi: Bound<S>) -> Self {
        let mut out = self.clone();
        out.bounds[feature] = (lo, hi);
        out
    }
}

impl<S: Scalar> PartialEq for FeatureBox<S> {
    fn eq(&self, other: &Self) -> bool {
        self.bounds == other.bounds
    }
}

impl<S: Scalar> Eq for FeatureBox<S> {}

impl<S: Scalar> std::hash::Hash for FeatureBox<S> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.bounds.hash(state);
    }
}

impl<S: Scalar> FeatureBox<S> {

    pub fn contains(&self, values: &[S]) -> bool {
        debug_assert_eq!(values.len(), self.bounds.len());
        self.bounds
            .iter()
            .zip(values)
            .all(|((lo, hi), v)| lo.below(v) && hi.at_or_above(v))
    }
}

/// Which pruning operation a solve is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operation {
    Replacement,
    Raising,
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Operation::Replacement => write!(f, "replacement"),
            Operation::Raising => write!(f, "raising"),
        }
    }
}

/// Whether the pruned-node budget is hit exactly or is a lower bound.
/// The two differ for raising: pruning more nodes can *decrease* the error
/// floor, so the exact-budget front need not be monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Exact,
    AtLeast,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Variant::Exact => write!(f, "exact"),
            Variant::AtLeast => write!(f, "at_least"),
        }
    }
}

/// A fully specified solve request: operation, budget semantics, the
/// pruned-node count `k`, and the error budget `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveSpec {
    pub operation: Operation,
    pub variant: Variant,
    pub k: usize,
    pub t: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rat;

    fn r(n: i64) -> Rat {
        Rat::from_int(n)
    }

    #[test]
    fn thresholds_are_midpoints_of_consecutive_distinct_values() {
        // {0, 1, 3} -> {1/2, 2}
        let t = compute_thresholds(vec![r(0), r(1), r(3)]);
        assert_eq!(t, vec![Rat::new(1, 2), r(2)]);
        // duplicates collapse first
        let t = compute_thresholds(vec![r(3), r(0), r(1), r(1), r(0)]);
        assert_eq!(t, vec![Rat::new(1, 2), r(2)]);
        // a single distinct value needs no separators
        assert!(compute_thresholds(vec![r(5), r(5)]).is_empty());
    }

    #[test]
    fn majority_breaks_ties_toward_blue() {
        assert_eq!(majority_label(2, 1), Label::Blue);
        assert_eq!(majority_label(1, 2), Label::Red);
        assert_eq!(majority_label(2, 2), Label::Blue);
        assert_eq!(majority_label(0, 0), Label::Blue);
    }

    #[test]
    fn dataset_metrics_on_tiny_instance() {
        // One feature, values {0, 1, 2}: blue, blue, red.
        let data = Dataset::from_rows(
            1,
            vec![
                (vec![r(0)], Label::Blue),
                (vec![r(1)], Label::Blue),
                (vec![r(2)], Label::Red),
            ],
        )
        .unwrap();
        let m = data.metrics();
        assert_eq!(m.n, 3);
        assert_eq!(m.max_distinct, 3);
        assert_eq!(m.delta_max, 1);
        assert_eq!(data.thresholds(0), &[Rat::new(1, 2), Rat::new(3, 2)]);
    }

    #[test]
    fn box_tightening_and_membership() {
        let b: FeatureBox<Rat> = FeatureBox::full(2);
        assert!(b.contains(&[r(100), r(-100)]));
        let b = b.tighten_upper(0, &Rat::new(1, 2));
        let b = b.tighten_lower(1, &r(0));
        assert!(b.contains(&[r(0), r(1)]));
        assert!(!b.contains(&[r(1), r(1)])); // feature 0 above 1/2
        assert!(!b.contains(&[r(0), r(0)])); // feature 1 not above 0
        // tightening never loosens
        let b2 = b.tighten_upper(0, &r(5));
        assert_eq!(b2.hi(0), &Bound::Finite(Rat::new(1, 2)));
        let b3 = b.tighten_lower(1, &r(-3));
        assert_eq!(b3.lo(1), &Bound::Finite(r(0)));
    }

    #[test]
    fn wrong_arity_is_rejected() {
        let err = Dataset::new(
            2,
            vec![Example {
                id: 7,
                values: vec![r(1)],
                label: Label::Red,
            }],
        )
        .unwrap_err();
        assert_eq!(
            err,
            ModelError::WrongArity {
                id: 7,
                got: 1,
                expected: 2
            }
        );
    }
}
