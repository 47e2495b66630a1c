//! Design-matrix construction: one-hot encoding with a stored recipe.
//!
//! Categorical predictors expand to indicator columns named `column=level`,
//! with the most frequent level (ties broken alphabetically) as the omitted
//! reference. Constant columns — numeric predictors with a single value, or
//! indicator levels never observed — are excluded with a note rather than an
//! error, since they carry no information but often appear in subsets.
//!
//! The encoding is recorded per source column so a fitted model can rebuild
//! the exact same design on new data, and can reject rows whose category
//! labels the training data never defined.

use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Dataset, Role};
use crate::error::Error;
use crate::Result;

/// How one source column maps into design columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "encoding", rename_all = "snake_case")]
pub enum ColumnEncoding {
    /// Continuous or binary column copied through as a single design column.
    Numeric { column: String },
    /// Categorical column expanded to one indicator per entry of `levels`.
    /// `reference` is the omitted baseline; `known` lists every label the
    /// training schema defined (prediction rejects anything else).
    OneHot {
        column: String,
        reference: String,
        levels: Vec<String>,
        known: Vec<String>,
    },
}

impl ColumnEncoding {
    /// Source column name.
    pub fn column(&self) -> &str {
        match self {
            ColumnEncoding::Numeric { column } => column,
            ColumnEncoding::OneHot { column, .. } => column,
        }
    }

    /// Design column names contributed by this encoding, in order.
    pub fn design_names(&self) -> Vec<String> {
        match self {
            ColumnEncoding::Numeric { column } => vec![column.clone()],
            ColumnEncoding::OneHot { column, levels, .. } => levels
                .iter()
                .map(|l| format!("{column}={l}"))
                .collect(),
        }
    }
}

/// A dense row-major design matrix with a leading intercept column.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    /// Per-source-column encodings, in predictor order.
    pub encodings: Vec<ColumnEncoding>,
    /// Names of the non-intercept design columns, aligned with the data
    /// layout (the intercept occupies position 0 and has no name).
    pub names: Vec<String>,
    /// Row-major values, `n_rows * n_cols`; column 0 is always 1.0.
    pub data: Vec<f64>,
    pub n_rows: usize,
    /// Total width including the intercept: `names.len() + 1`.
    pub n_cols: usize,
    /// Human-readable notes about excluded constant columns.
    pub notes: Vec<String>,
}

/// Builds a design matrix over `predictors` from `d`.
///
/// Every predictor must exist with role `predictor` or `protected` and be
/// listed at most once. Constant columns are excluded with a note.
pub fn encode_design(d: &Dataset, predictors: &[String]) -> Result<DesignMatrix> {
    let mut seen = std::collections::BTreeSet::new();
    for p in predictors {
        if !seen.insert(p.as_str()) {
            return Err(Error::InvalidSpec {
                message: format!("predictor {p:?} listed more than once"),
            });
        }
    }

    let mut encodings: Vec<ColumnEncoding> = Vec::new();
    let mut notes: Vec<String> = Vec::new();

    for name in predictors {
        let decl = d.column_schema(name)?;
        match decl.role {
            Role::Predictor | Role::Protected => {}
            other => {
                return Err(Error::RoleMismatch {
                    column: name.clone(),
                    actual: other.as_str().into(),
                    expected: "predictor or protected".into(),
                })
            }
        }
        match decl.kind {
            ColumnKind::Continuous | ColumnKind::Binary => {
                let vals = d.numeric(name)?;
                let first = vals[0];
                if vals.iter().all(|&v| v == first) {
                    notes.push(format!("{name}: constant column, excluded from design"));
                } else {
                    encodings.push(ColumnEncoding::Numeric {
                        column: name.clone(),
                    });
                }
            }
            ColumnKind::Categorical => {
                let codes = d.codes(name)?;
                let cats = &decl.categories;
                let mut counts = vec![0usize; cats.len()];
                for &c in codes {
                    counts[c as usize] += 1;
                }
                // Reference: most frequent level, ties broken by the
                // alphabetically smallest label.
                let reference = cats
                    .iter()
                    .zip(&counts)
                    .max_by(|(la, ca), (lb, cb)| ca.cmp(cb).then_with(|| lb.cmp(la)))
                    .map(|(l, _)| l.clone())
                    .expect("categorical column has categories");
                let mut levels = Vec::new();
                for (label, &count) in cats.iter().zip(&counts) {
                    if *label == reference {
                        continue;
                    }
                    if count == 0 {
                        notes.push(format!(
                            "{name}={label}: level not observed, indicator excluded"
                        ));
                    } else {
                        levels.push(label.clone());
                    }
                }
                if levels.is_empty() {
                    notes.push(format!("{name}: constant column, excluded from design"));
                } else {
                    encodings.push(ColumnEncoding::OneHot {
                        column: name.clone(),
                        reference,
                        levels,
                        known: cats.clone(),
                    });
                }
            }
        }
    }

    let (data, names, n_cols) = materialize(d, &encodings)?;
    Ok(DesignMatrix {
        encodings,
        names,
        data,
        n_rows: d.n_rows(),
        n_cols,
        notes,
    })
}

/// Rebuilds design rows (with intercept) on `d` from stored encodings.
/// Rejects unseen category labels and kind mismatches — this is the path
/// predictions take on fresh data.
pub fn design_rows_for(d: &Dataset, encodings: &[ColumnEncoding]) -> Result<(Vec<f64>, usize)> {
    let (data, _, n_cols) = materialize(d, encodings)?;
    Ok((data, n_cols))
}

fn materialize(
    d: &Dataset,
    encodings: &[ColumnEncoding],
) -> Result<(Vec<f64>, Vec<String>, usize)> {
    let mut names = Vec::new();
    for enc in encodings {
        names.extend(enc.design_names());
    }
    let n_cols = names.len() + 1;
    let n_rows = d.n_rows();
    let mut data = vec![0.0; n_rows * n_cols];
    for row in 0..n_rows {
        data[row * n_cols] = 1.0;
    }

    let mut col = 1usize;
    for enc in encodings {
        match enc {
            ColumnEncoding::Numeric { column } => {
                let decl = d.column_schema(column)?;
                if decl.kind == ColumnKind::Categorical {
                    return Err(Error::KindMismatch {
                        column: column.clone(),
                        message: "model expects a numeric column here".into(),
                    });
                }
                let vals = d.numeric(column)?;
                for (row, &v) in vals.iter().enumerate() {
                    data[row * n_cols + col] = v;
                }
                col += 1;
            }
            ColumnEncoding::OneHot {
                column,
                levels,
                known,
                ..
            } => {
                let decl = d.column_schema(column)?;
                if decl.kind != ColumnKind::Categorical {
                    return Err(Error::KindMismatch {
                        column: column.clone(),
                        message: "model expects a categorical column here".into(),
                    });
                }
                let codes = d.codes(column)?;
                // Map this dataset's codes to design offsets via labels, so
                // prediction data may declare categories in any order.
                let mut offset_of_code: Vec<Option<usize>> =
                    Vec::with_capacity(decl.categories.len());
                for label in &decl.categories {
                    if let Some(pos) = levels.iter().position(|l| l == label) {
                        offset_of_code.push(Some(pos));
                    } else if known.iter().any(|k| k == label) {
                        offset_of_code.push(None); // reference or excluded level
                    } else {
                        // Defer the error until the label is actually seen in
                        // a row; a merely-declared label costs nothing.
                        offset_of_code.push(Some(usize::MAX));
                    }
                }
                for (row, &code) in codes.iter().enumerate() {
                    match offset_of_code[code as usize] {
                        Some(usize::MAX) => {
                            return Err(Error::UnknownCategory {
                                row: row + 1,
                                column: column.clone(),
                                value: decl.categories[code as usize].clone(),
                            })
                        }
                        Some(offset) => data[row * n_cols + col + offset] = 1.0,
                        None => {}
                    }
                }
                col += levels.len();
            }
        }
    }
    Ok((data, names, n_cols))
}
