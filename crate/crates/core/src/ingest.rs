//! Getting data in and out: CSV datasets, the tree file format, domain
//! preprocessing, and a small greedy inducer so the toolchain can start
//! from a bare CSV.
//!
//! Loading a CSV goes through [`RawTable`] (strings plus per-column
//! kinds), then [`RawTable::binarize`] turns it into a [`Dataset`]:
//! categorical columns become one 0/1 indicator feature per category, the
//! class column becomes blue/red with blue = the largest original class,
//! and contradicting duplicate rows can be dropped. Numeric cells are
//! parsed exactly (decimals become rationals under the default scalar),
//! so no value ever shifts across a threshold during a round trip.
//!
//! The tree file is JSON with explicit node ids and `num/den` thresholds;
//! see [`read_tree`]/[`write_tree`]. All structural validation is done by
//! the tree constructor, so a file that names a missing child or forms a
//! cycle fails with the offending node id.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{compute_thresholds, majority_label, Dataset, Example, Label, ModelError};
use crate::scalar::{Scalar, ScalarParseError};
use crate::tree::{DecisionTree, Node, NodeId, TreeError};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("csv file has no columns")]
    NoColumns,
    #[error("csv file has no data rows")]
    NoRows,
    #[error("row {row}: expected {expected} fields, got {got}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },
    #[error("no column named {0:?}")]
    MissingClassColumn(String),
    #[error("row {row}, column {column:?}: {source}")]
    BadNumeric {
        row: usize,
        column: String,
        source: ScalarParseError,
    },
    #[error("row {row}: empty class value")]
    EmptyClass { row: usize },
    #[error("row {row}: class {text:?} is not \"blue\" or \"red\"")]
    BadLabel { row: usize, text: String },
    #[error("tree file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tree file: node id {0:?} is not a non-negative integer")]
    BadNodeKey(String),
    #[error("tree file: node {node}: {source}")]
    BadThreshold {
        node: NodeId,
        source: ScalarParseError,
    },
    #[error("tree file: node {node}: class {text:?} is not \"blue\" or \"red\"")]
    BadClass { node: NodeId, text: String },
    #[error("tree file: {0}")]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

// ---------------------------------------------------------------------------
// CSV datasets

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ColumnKind {
    Numeric,
    Categorical,
    Class,
}

/// A parsed-but-not-yet-typed CSV table: header names, string cells, and
/// an inferred kind per column. A column is numeric when every cell in it
/// parses as an exact decimal (or `a/b` fraction); anything else is
/// categorical. Exactly one column is the class.
#[derive(Debug, Clone)]
pub struct RawTable {
    pub columns: Vec<String>,
    pub kinds: Vec<ColumnKind>,
    pub rows: Vec<Vec<String>>,
}

/// Knobs for [`RawTable::binarize`] / [`load_dataset_csv`]. `class_col`
/// selects the class column by name; the default is the last column.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub class_col: Option<String>,
    pub binarize_categorical: bool,
    pub binarize_class: bool,
    pub dedup_contradictions: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            class_col: None,
            binarize_categorical: true,
            binarize_class: true,
            dedup_contradictions: true,
        }
    }
}

/// A binarized table: the dataset plus the bookkeeping a caller needs to
/// interpret it — expanded feature names, which original class became
/// blue, and which rows were dropped as contradictions.
#[derive(Debug, Clone)]
pub struct Binarized<S: Scalar> {
    pub dataset: Dataset<S>,
    /// One name per feature; an expanded categorical column contributes
    /// `column=value` names.
    pub feature_names: Vec<String>,
    /// The original class string mapped to blue.
    pub blue_class: String,
    /// Example ids (original row order) dropped by deduplication.
    pub dropped: Vec<u32>,
}

impl RawTable {
    pub fn read_path(path: impl AsRef<Path>, class_col: Option<&str>) -> Result<Self, IngestError> {
        let text = std::fs::read_to_string(path)?;
        Self::read_str(&text, class_col)
    }

    pub fn read_str(text: &str, class_col: Option<&str>) -> Result<Self, IngestError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let columns: Vec<String> = rdr.headers()?.iter().map(String::from).collect();
        if columns.is_empty() {
            return Err(IngestError::NoColumns);
        }
        let mut rows: Vec<Vec<String>> = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != columns.len() {
                return Err(IngestError::RaggedRow {
                    row: i + 1,
                    expected: columns.len(),
                    got: rec.len(),
                });
            }
            rows.push(rec.iter().map(String::from).collect());
        }

        let class_idx = match class_col {
            Some(name) => columns
                .iter()
                .position(|c| c == name)
                .ok_or_else(|| IngestError::MissingClassColumn(name.to_string()))?,
            None => columns.len() - 1,
        };
        let kinds = (0..columns.len())
            .map(|c| {
                if c == class_idx {
                    ColumnKind::Class
                } else if rows
                    .iter()
                    .all(|r| crate::scalar::Rat::parse_cell(&r[c]).is_ok())
                {
                    ColumnKind::Numeric
                } else {
                    ColumnKind::Categorical
                }
            })
            .collect();
        Ok(RawTable {
            columns,
            kinds,
            rows,
        })
    }

    fn class_idx(&self) -> usize {
        self.kinds
            .iter()
            .position(|k| *k == ColumnKind::Class)
            .expect("RawTable always has a class column")
    }

    /// Turn the table into a typed dataset.
    ///
    /// Class mapping: if every class cell is already literally `blue` or
    /// `red`, those are taken at face value (so our own files round-trip
    /// even when red is the larger class). Otherwise, with
    /// `binarize_class` on, the most frequent class string becomes blue
    /// (ties to the lexicographically smallest) and everything else red;
    /// with it off, any other class value is an error.
    ///
    /// Deduplication keeps the first of any set of rows that share all
    /// feature values but disagree on the class. Example ids always count
    /// original rows, so dropped ids leave gaps.
    pub fn binarize<S: Scalar>(&self, options: &LoadOptions) -> Result<Binarized<S>, IngestError> {
        if self.rows.is_empty() {
            return Err(IngestError::NoRows);
        }
        let class_idx = self.class_idx();

        for (i, row) in self.rows.iter().enumerate() {
            if row[class_idx].is_empty() {
                return Err(IngestError::EmptyClass { row: i + 1 });
            }
        }

        let literal = self
            .rows
            .iter()
            .all(|r| Label::parse(&r[class_idx]).is_some());
        let blue_class = if literal {
            "blue".to_string()
        } else if options.binarize_class {
            let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
            for row in &self.rows {
                *counts.entry(row[class_idx].as_str()).or_default() += 1;
            }
            // BTreeMap iterates names in order, so max_by_key's "last wins
            // on ties" must be inverted: keep the first maximum.
            let mut best: (&str, usize) = ("", 0);
            for (name, n) in counts {
                if n > best.1 {
                    best = (name, n);
                }
            }
            best.0.to_string()
        } else {
            let bad = self
                .rows
                .iter()
                .position(|r| Label::parse(&r[class_idx]).is_none())
                .unwrap();
            return Err(IngestError::BadLabel {
                row: bad + 1,
                text: self.rows[bad][class_idx].clone(),
            });
        };

        // Expand columns into features. A categorical column becomes one
        // indicator per distinct value, in sorted value order.
        let mut feature_names = Vec::new();
        let mut cells: Vec<Vec<S>> = vec![Vec::new(); self.rows.len()];
        for (c, name) in self.columns.iter().enumerate() {
            match self.kinds[c] {
                ColumnKind::Class => {}
                ColumnKind::Numeric => {
                    feature_names.push(name.clone());
                    for (i, row) in self.rows.iter().enumerate() {
                        let v = S::parse_cell(&row[c]).map_err(|source| {
                            IngestError::BadNumeric {
                                row: i + 1,
                                column: name.clone(),
                                source,
                            }
                        })?;
                        cells[i].push(v);
                    }
                }
                ColumnKind::Categorical => {
                    if !options.binarize_categorical {
                        let bad = self
                            .rows
                            .iter()
                            .position(|r| S::parse_cell(&r[c]).is_err())
                            .unwrap();
                        return Err(IngestError::BadNumeric {
                            row: bad + 1,
                            column: name.clone(),
                            source: S::parse_cell(&self.rows[bad][c]).unwrap_err(),
                        });
                    }
                    let mut values: Vec<&str> =
                        self.rows.iter().map(|r| r[c].as_str()).collect();
                    values.sort_unstable();
                    values.dedup();
                    for value in values {
                        feature_names.push(format!("{}={}", name, value));
                        for (i, row) in self.rows.iter().enumerate() {
                            let ind = i64::from(row[c] == value);
                            cells[i].push(S::from_int(ind));
                        }
                    }
                }
            }
        }

        let labels: Vec<Label> = self
            .rows
            .iter()
            .map(|row| {
                let cell = &row[class_idx];
                if literal {
                    Label::parse(cell).unwrap()
                } else if *cell == blue_class {
                    Label::Blue
                } else {
                    Label::Red
                }
            })
            .collect();

        // Contradiction dedup: remember the first label seen for each
        // value vector; later rows that disagree are dropped.
        let mut examples = Vec::new();
        let mut dropped = Vec::new();
        let mut first: BTreeMap<Vec<S::Key>, Label> = BTreeMap::new();
        for (i, values) in cells.into_iter().enumerate() {
            let id = i as u32;
            if options.dedup_contradictions {
                let key: Vec<S::Key> = values.iter().map(|v| v.key()).collect();
                match first.get(&key) {
                    Some(seen) if *seen != labels[i] => {
                        dropped.push(id);
                        continue;
                    }
                    Some(_) => {}
                    None => {
                        first.insert(key, labels[i]);
                    }
                }
            }
            examples.push(Example {
                id,
                values,
                label: labels[i],
            });
        }

        let d = feature_names.len();
        Ok(Binarized {
            dataset: Dataset::new(d, examples)?,
            feature_names,
            blue_class,
            dropped,
        })
    }
}

/// Load a CSV into a dataset; see [`RawTable`] for the column rules and
/// [`LoadOptions`] for the knobs.
pub fn load_dataset_csv<S: Scalar>(
    path: impl AsRef<Path>,
    options: &LoadOptions,
) -> Result<Dataset<S>, IngestError> {
    let table = RawTable::read_path(path, options.class_col.as_deref())?;
    Ok(table.binarize(options)?.dataset)
}

/// Write a dataset as CSV with generated `f0..f{d-1}` feature headers and
/// a final `class` column of `blue`/`red`. Cells use the exact decimal
/// form when one exists, so a reload reproduces the dataset.
pub fn write_dataset_csv<S: Scalar>(
    path: impl AsRef<Path>,
    data: &Dataset<S>,
) -> Result<(), IngestError> {
    std::fs::write(path, dataset_to_csv(data))?;
    Ok(())
}

pub fn dataset_to_csv<S: Scalar>(data: &Dataset<S>) -> String {
    let mut out = String::new();
    for f in 0..data.d() {
        out.push_str(&format!("f{},", f));
    }
    out.push_str("class\n");
    for e in data.examples() {
        for v in &e.values {
            out.push_str(&v.format_cell());
            out.push(',');
        }
        out.push_str(&format!("{}\n", e.label));
    }
    out
}

// ---------------------------------------------------------------------------
// Tree files

#[derive(Serialize, Deserialize)]
struct TreeDoc {
    d: usize,
    root: NodeId,
    nodes: BTreeMap<String, NodeDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum NodeDoc {
    Cut {
        feature: usize,
        threshold: String,
        left: NodeId,
        right: NodeId,
    },
    Leaf {
        class: String,
    },
}

pub fn tree_to_json<S: Scalar>(tree: &DecisionTree<S>) -> String {
    let nodes = tree
        .nodes()
        .map(|(id, node)| {
            let doc = match node {
                Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } => NodeDoc::Cut {
                    feature: *feature,
                    threshold: threshold.format_fraction(),
                    left: *left,
                    right: *right,
                },
                Node::Leaf { label } => NodeDoc::Leaf {
                    class: label.to_string(),
                },
            };
            (id.to_string(), doc)
        })
        .collect();
    let doc = TreeDoc {
        d: tree.d(),
        root: tree.root(),
        nodes,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("tree serialization cannot fail");
    text.push('\n');
    text
}

pub fn tree_from_json<S: Scalar>(text: &str) -> Result<DecisionTree<S>, IngestError> {
    let doc: TreeDoc = serde_json::from_str(text)?;
    let mut nodes = BTreeMap::new();
    for (key, node) in doc.nodes {
        let id: NodeId = key
            .parse()
            .map_err(|_| IngestError::BadNodeKey(key.clone()))?;
        let node = match node {
            NodeDoc::Cut {
                feature,
                threshold,
                left,
                right,
            } => Node::Cut {
                feature,
                threshold: S::parse_fraction(&threshold)
                    .map_err(|source| IngestError::BadThreshold { node: id, source })?,
                left,
                right,
            },
            NodeDoc::Leaf { class } => Node::Leaf {
                label: Label::parse(&class)
                    .ok_or_else(|| IngestError::BadClass {
                        node: id,
                        text: class.clone(),
                    })?,
            },
        };
        nodes.insert(id, node);
    }
    Ok(DecisionTree::from_parts(doc.d, doc.root, nodes)?)
}

pub fn write_tree<S: Scalar>(
    path: impl AsRef<Path>,
    tree: &DecisionTree<S>,
) -> Result<(), IngestError> {
    std::fs::write(path, tree_to_json(tree))?;
    Ok(())
}

pub fn read_tree<S: Scalar>(path: impl AsRef<Path>) -> Result<DecisionTree<S>, IngestError> {
    tree_from_json(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Domain reduction

/// Result of [`reduce_to_tree_domains`]: the shrunk dataset, the tree
/// renumbered onto the kept features (same shape, same node ids), and the
/// map from new feature index back to the original one.
#[derive(Debug, Clone)]
pub struct DomainReduction<S: Scalar> {
    pub dataset: Dataset<S>,
    pub tree: DecisionTree<S>,
    pub kept_features: Vec<usize>,
}

/// Collapse the dataset onto what the tree can actually distinguish:
/// features no cut uses are dropped, and within each kept feature every
/// value is replaced by a canonical representative of its inter-threshold
/// region — the midpoint between the two enclosing tree thresholds, or
/// one unit beyond the extremes. Each kept feature therefore takes at
/// most one more distinct value than the tree has thresholds on it, and
/// every example still reaches exactly the leaf it did before.
pub fn reduce_to_tree_domains<S: Scalar>(
    data: &Dataset<S>,
    tree: &DecisionTree<S>,
) -> DomainReduction<S> {
    let mut per_feature: BTreeMap<usize, Vec<S>> = BTreeMap::new();
    for (_, node) in tree.nodes() {
        if let Node::Cut {
            feature, threshold, ..
        } = node
        {
            per_feature
                .entry(*feature)
                .or_default()
                .push(threshold.clone());
        }
    }
    for thr in per_feature.values_mut() {
        thr.sort_by(|a, b| a.total_cmp(b));
        thr.dedup_by(|a, b| a.total_cmp(b) == std::cmp::Ordering::Equal);
    }

    let kept_features: Vec<usize> = per_feature.keys().copied().collect();
    let renumber: BTreeMap<usize, usize> = kept_features
        .iter()
        .enumerate()
        .map(|(new, old)| (*old, new))
        .collect();

    let examples = data
        .examples()
        .iter()
        .map(|e| Example {
            id: e.id,
            values: kept_features
                .iter()
                .map(|f| representative(&per_feature[f], &e.values[*f]))
                .collect(),
            label: e.label,
        })
        .collect();
    let dataset =
        Dataset::new(kept_features.len(), examples).expect("reduction keeps every example");

    let nodes = tree
        .nodes()
        .map(|(id, node)| {
            let node = match node {
                Node::Cut {
                    feature,
                    threshold,
                    left,
                    right,
                } => Node::Cut {
                    feature: renumber[feature],
                    threshold: threshold.clone(),
                    left: *left,
                    right: *right,
                },
                Node::Leaf { label } => Node::Leaf { label: *label },
            };
            (id, node)
        })
        .collect();
    let tree = DecisionTree::from_parts(kept_features.len(), tree.root(), nodes)
        .expect("renumbering preserves structure");

    DomainReduction {
        dataset,
        tree,
        kept_features,
    }
}

/// Representative of `v`'s region in the half-open partition induced by
/// the sorted thresholds `thr`: values in `(thr[p-1], thr[p]]` share the
/// midpoint of that gap; values at or below the first threshold sit one
/// unit under it, values above the last one unit over it.
fn representative<S: Scalar>(thr: &[S], v: &S) -> S {
    let p = thr.partition_point(|t| t.total_cmp(v) == std::cmp::Ordering::Less);
    if p == 0 {
        thr[0].one_below()
    } else if p == thr.len() {
        thr[p - 1].one_above()
    } else {
        S::midpoint(&thr[p - 1], &thr[p])
    }
}

// ---------------------------------------------------------------------------
// Greedy induction

/// Stopping controls for [`induce_greedy`]. `min_leaf` is the smallest
/// example count a split may leave on either side; `max_depth` caps cut
/// nesting (`Some(0)` forces a single leaf).
#[derive(Debug, Clone)]
pub struct InduceOptions {
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

impl Default for InduceOptions {
    fn default() -> Self {
        InduceOptions {
            min_leaf: 1,
            max_depth: None,
        }
    }
}

/// Grow a tree top-down by information gain over the node's separating
/// thresholds. Splits stop at pure nodes and wherever `min_leaf` or
/// `max_depth` binds; an impure node takes the best admissible split even
/// at zero gain (an xor-shaped dataset is separable, but no single split
/// shows it), so the only impure leaves are ones no threshold can split.
/// Ties go to the smallest feature, then the smallest threshold. Leaves
/// are labeled by their majority; the result always passes
/// `validate_reasonable`.
pub fn induce_greedy<S: Scalar>(data: &Dataset<S>, options: &InduceOptions) -> DecisionTree<S> {
    let rows: Vec<usize> = (0..data.len()).collect();
    let mut nodes = BTreeMap::new();
    let mut next: NodeId = 0;
    let root = grow(data, options, rows, 0, &mut nodes, &mut next);
    DecisionTree::from_parts(data.d(), root, nodes).expect("induction builds a valid tree")
}

fn grow<S: Scalar>(
    data: &Dataset<S>,
    options: &InduceOptions,
    rows: Vec<usize>,
    depth: usize,
    nodes: &mut BTreeMap<NodeId, Node<S>>,
    next: &mut NodeId,
) -> NodeId {
    let id = *next;
    *next += 1;

    let (nb, nr) = class_counts(data, &rows);
    let depth_bound = options.max_depth.is_some_and(|m| depth >= m);
    let split = if nb == 0 || nr == 0 || depth_bound {
        None
    } else {
        best_split(data, options, &rows)
    };

    match split {
        Some((feature, threshold)) => {
            let (left_rows, right_rows) = partition(data, &rows, feature, &threshold);
            let left = grow(data, options, left_rows, depth + 1, nodes, next);
            let right = grow(data, options, right_rows, depth + 1, nodes, next);
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
        None => {
            nodes.insert(
                id,
                Node::Leaf {
                    label: majority_label(nb, nr),
                },
            );
        }
    }
    id
}

fn class_counts<S: Scalar>(data: &Dataset<S>, rows: &[usize]) -> (usize, usize) {
    let blue = rows
        .iter()
        .filter(|&&i| data.examples()[i].label == Label::Blue)
        .count();
    (blue, rows.len() - blue)
}

fn partition<S: Scalar>(
    data: &Dataset<S>,
    rows: &[usize],
    feature: usize,
    threshold: &S,
) -> (Vec<usize>, Vec<usize>) {
    rows.iter().partition(|&&i| {
        data.examples()[i].values[feature].total_cmp(threshold) != std::cmp::Ordering::Greater
    })
}

fn best_split<S: Scalar>(
    data: &Dataset<S>,
    options: &InduceOptions,
    rows: &[usize],
) -> Option<(usize, S)> {
    let (nb, nr) = class_counts(data, rows);
    let here = entropy(nb, nr);
    let n = rows.len() as f64;

    let mut best: Option<(f64, usize, S)> = None;
    for feature in 0..data.d() {
        let thresholds = compute_thresholds(
            rows.iter()
                .map(|&i| data.examples()[i].values[feature].clone()),
        );
        for threshold in thresholds {
            let (l, r) = partition(data, rows, feature, &threshold);
            if l.len() < options.min_leaf || r.len() < options.min_leaf {
                continue;
            }
            let (lb, lr) = class_counts(data, &l);
            let (rb, rr) = class_counts(data, &r);
            let gain = here
                - (l.len() as f64 / n) * entropy(lb, lr)
                - (r.len() as f64 / n) * entropy(rb, rr);
            // Strict comparison: the first of equally good splits wins,
            // which is the smallest feature and then threshold.
            if best.as_ref().is_none_or(|(g, _, _)| gain > *g) {
                best = Some((gain, feature, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

fn entropy(nb: usize, nr: usize) -> f64 {
    let n = (nb + nr) as f64;
    let term = |c: usize| {
        if c == 0 {
            0.0
        } else {
            let p = c as f64 / n;
            -p * p.log2()
        }
    };
    term(nb) + term(nr)
}
