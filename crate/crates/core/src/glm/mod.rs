//! Model fitting: ordinary least squares and logistic regression.
//!
//! Both families share the design-matrix pipeline from [`crate::data::design`]
//! and the pivoted QR solver in [`qr`]. Logistic regression runs iteratively
//! reweighted least squares with two guard rails: exactly collinear columns
//! are dropped up front (with a note), and a quasi-complete-separation check
//! aborts the fit when any standardized coefficient magnitude exceeds 15 —
//! past that point the likelihood surface is flat and "convergence" would
//! just mean running into the iteration cap.
//!
//! A [`FittedModel`] stores everything needed to predict on new data: the
//! encoding recipe and a coefficient per design column, plus the intercept.
//! Coefficients can be zeroed after the fact (the classic remedy of keeping
//! a variable in the regression but ignoring it when scoring); doing so
//! marks the stored fit statistics stale.

pub mod qr;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::design::{design_rows_for, encode_design, ColumnEncoding};
use crate::data::{ColumnKind, Dataset, Role};
use crate::error::Error;
use crate::Result;

/// Relative pivot threshold below which a design column is collinear.
const COLLINEAR_TOL: f64 = 1e-10;
/// IRLS stops when the largest score (gradient) component is below this.
const IRLS_GRADIENT_TOL: f64 = 1e-8;
/// …or when the relative log-likelihood change is below this.
const IRLS_LL_TOL: f64 = 1e-10;
/// Hard cap on IRLS iterations.
const IRLS_MAX_ITER: usize = 100;
/// Standardized-coefficient magnitude that flags quasi-complete separation.
const SEPARATION_LIMIT: f64 = 15.0;

/// Model family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Ols,
    Logistic,
}

/// A model specification: which outcome, which predictors, which family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub id: String,
    pub family: Family,
    pub outcome: String,
    pub predictors: Vec<String>,
}

impl ModelSpec {
    /// Structural checks: nonempty id, no duplicate predictors, outcome not
    /// among the predictors. An empty predictor list is allowed (intercept-
    /// only model).
    pub fn validate(&self) -> Result<()> {
        if self.id.is_empty() {
            return Err(Error::InvalidSpec {
                message: "model id must not be empty".into(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.predictors {
            if !seen.insert(p.as_str()) {
                return Err(Error::InvalidSpec {
                    message: format!("model {:?} lists predictor {p:?} twice", self.id),
                });
            }
            if *p == self.outcome {
                return Err(Error::InvalidSpec {
                    message: format!("model {:?} uses its outcome as a predictor", self.id),
                });
            }
        }
        Ok(())
    }

    /// Parses and validates a specification from JSON.
    pub fn from_json(text: &str) -> Result<ModelSpec> {
        let spec: ModelSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "model specification".into(),
            message: e.to_string(),
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model spec serializes")
    }
}

/// Which direction of an accuracy value is better.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    HigherIsBetter,
    LowerIsBetter,
}

/// An accuracy value tagged with its orientation, so callers can never
/// compare a mean-absolute-error to a classification rate by mistake.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub value: f64,
    pub orientation: Orientation,
}

/// A fitted model: recipe, coefficients, and fit statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub spec: ModelSpec,
    /// Per-source-column encodings captured at fit time.
    pub encodings: Vec<ColumnEncoding>,
    /// One coefficient per design column (name → value). Collinear and
    /// zeroed columns appear with coefficient 0.
    pub coefficients: BTreeMap<String, f64>,
    pub intercept: f64,
    pub train_rows: usize,
    /// OLS only: in-sample R².
    pub r_squared: Option<f64>,
    /// Logistic only: in-sample McFadden pseudo-R².
    pub mcfadden_r2: Option<f64>,
    /// Logistic only: maximized log-likelihood.
    pub log_likelihood: Option<f64>,
    /// Logistic only: intercept-only log-likelihood.
    pub null_log_likelihood: Option<f64>,
    /// IRLS iterations used (0 for OLS).
    pub iterations: usize,
    pub converged: bool,
    /// Excluded constants, collinear drops, zeroed coefficients.
    pub notes: Vec<String>,
    /// True once coefficients were altered after fitting; the stored fit
    /// statistics then describe the original fit, not the altered model.
    pub stale: bool,
}

impl FittedModel {
    /// Design column names in design order (the order predictions use).
    pub fn design_names(&self) -> Vec<String> {
        self.encodings
            .iter()
            .flat_map(|e| e.design_names())
            .collect()
    }

    fn coefficient_vector(&self) -> Vec<f64> {
        let mut v = vec![self.intercept];
        for name in self.design_names() {
            v.push(*self.coefficients.get(&name).expect("coefficient exists"));
        }
        v
    }
}

fn outcome_values<'d>(d: &'d Dataset, spec: &ModelSpec) -> Result<&'d [f64]> {
    let decl = d.column_schema(&spec.outcome)?;
    if decl.role != Role::Outcome {
        return Err(Error::RoleMismatch {
            column: spec.outcome.clone(),
            actual: decl.role.as_str().into(),
            expected: "outcome".into(),
        });
    }
    match (spec.family, decl.kind) {
        (Family::Ols, ColumnKind::Continuous | ColumnKind::Binary) => {}
        (Family::Logistic, ColumnKind::Binary) => {}
        (Family::Ols, ColumnKind::Categorical) => {
            return Err(Error::KindMismatch {
                column: spec.outcome.clone(),
                message: "least squares needs a continuous or binary outcome".into(),
            })
        }
        (Family::Logistic, _) => {
            return Err(Error::KindMismatch {
                column: spec.outcome.clone(),
                message: "logistic regression needs a binary outcome".into(),
            })
        }
    }
    d.numeric(&spec.outcome)
}

/// Fits `spec` on `d`, dispatching on the model family.
pub fn fit(d: &Dataset, spec: &ModelSpec) -> Result<FittedModel> {
    spec.validate()?;
    match spec.family {
        Family::Ols => fit_ols(d, spec),
        Family::Logistic => fit_logistic(d, spec),
    }
}

fn fit_ols(d: &Dataset, spec: &ModelSpec) -> Result<FittedModel> {
    let y = outcome_values(d, spec)?.to_vec();
    let design = encode_design(d, &spec.predictors)?;
    let n = design.n_rows;
    if n <= design.n_cols {
        return Err(Error::TooFewRows {
            needed: design.n_cols + 1,
            got: n,
        });
    }
    let mean = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    if sst == 0.0 {
        return Err(Error::Degenerate {
            message: format!("outcome {:?} is constant; nothing to fit", spec.outcome),
        });
    }

    let ls = qr::solve_least_squares(&design.data, n, design.n_cols, &y, COLLINEAR_TOL);
    let mut notes = design.notes.clone();
    for &col in &ls.dropped {
        let label = if col == 0 {
            "intercept".to_string()
        } else {
            design.names[col - 1].clone()
        };
        notes.push(format!(
            "{label}: linearly dependent, dropped (coefficient set to zero)"
        ));
    }

    let r_squared = 1.0 - ls.residual_ss / sst;
    let mut coefficients = BTreeMap::new();
    for (i, name) in design.names.iter().enumerate() {
        coefficients.insert(name.clone(), ls.coefficients[i + 1]);
    }
    Ok(FittedModel {
        spec: spec.clone(),
        encodings: design.encodings,
        coefficients,
        intercept: ls.coefficients[0],
        train_rows: n,
        r_squared: Some(r_squared),
        mcfadden_r2: None,
        log_likelihood: None,
        null_log_likelihood: None,
        iterations: 0,
        converged: true,
        notes,
        stale: false,
    })
}

pub(crate) fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

/// Bernoulli log-likelihood with probabilities clamped away from 0/1 so a
/// single extreme prediction cannot produce −∞.
fn bernoulli_ll(y: &[f64], mu: &[f64]) -> f64 {
    y.iter()
        .zip(mu)
        .map(|(&yi, &mi)| {
            let m = mi.clamp(1e-12, 1.0 - 1e-12);
            yi * m.ln() + (1.0 - yi) * (1.0 - m).ln()
        })
        .sum()
}

/// Log-likelihood of the intercept-only model (the exact optimum is the
/// observed base rate, so no iteration is needed).
fn null_ll(y: &[f64]) -> f64 {
    let n = y.len() as f64;
    let p = y.iter().sum::<f64>() / n;
    n * (p * p.ln() + (1.0 - p) * (1.0 - p).ln())
}

fn fit_logistic(d: &Dataset, spec: &ModelSpec) -> Result<FittedModel> {
    let y = outcome_values(d, spec)?.to_vec();
    let ones = y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == y.len() {
        return Err(Error::OneClassOutcome {
            column: spec.outcome.clone(),
        });
    }
    let design = encode_design(d, &spec.predictors)?;
    let n = design.n_rows;
    if n <= design.n_cols {
        return Err(Error::TooFewRows {
            needed: design.n_cols + 1,
            got: n,
        });
    }

    // Rank screen on the unweighted design: exactly collinear columns are
    // dropped once, before any reweighting.
    let screen = qr::solve_least_squares(&design.data, n, design.n_cols, &y, COLLINEAR_TOL);
    let mut notes = design.notes.clone();
    for &col in &screen.dropped {
        let label = if col == 0 {
            "intercept".to_string()
        } else {
            design.names[col - 1].clone()
        };
        notes.push(format!(
            "{label}: linearly dependent, dropped (coefficient set to zero)"
        ));
    }
    let mut kept = screen.kept.clone();
    kept.sort_unstable();
    let p = kept.len();

    // Dense reduced design, plus the population SD of each kept column (for
    // the standardized separation check; the intercept is exempt).
    let mut x = vec![0.0; n * p];
    for row in 0..n {
        for (j, &col) in kept.iter().enumerate() {
            x[row * p + j] = design.data[row * design.n_cols + col];
        }
    }
    let sd: Vec<f64> = (0..p)
        .map(|j| {
            let mean = (0..n).map(|i| x[i * p + j]).sum::<f64>() / n as f64;
            let var =
                (0..n).map(|i| (x[i * p + j] - mean).powi(2)).sum::<f64>() / n as f64;
            var.sqrt()
        })
        .collect();

    let mut beta = vec![0.0; p];
    let mut eta = vec![0.0; n];
    let mut mu = vec![0.0; n];
    for i in 0..n {
        let mut e = 0.0;
        for j in 0..p {
            e += x[i * p + j] * beta[j];
        }
        eta[i] = e;
        mu[i] = sigmoid(e);
    }
    let mut ll_old = bernoulli_ll(&y, &mu);
    let mut iterations = 0;
    let mut converged = false;

    let mut wx = vec![0.0; n * p];
    let mut wz = vec![0.0; n];
    while iterations < IRLS_MAX_ITER {
        iterations += 1;
        // Weighted working response: z = eta + (y − mu)/w, w = mu(1 − mu).
        for i in 0..n {
            let m = mu[i].clamp(1e-10, 1.0 - 1e-10);
            let w = m * (1.0 - m);
            let sw = w.sqrt();
            let z = eta[i] + (y[i] - m) / w;
            wz[i] = sw * z;
            for j in 0..p {
                wx[i * p + j] = sw * x[i * p + j];
            }
        }
        let ls = qr::solve_least_squares(&wx, n, p, &wz, 1e-12);
        if ls.rank < p {
            return Err(Error::NumericFailure {
                message: "design lost rank during reweighting".into(),
            });
        }
        beta = ls.coefficients;

        for (j, &col) in kept.iter().enumerate() {
            if col == 0 {
                continue; // intercept: scale-free, exempt from the check
            }
            let standardized = beta[j].abs() * sd[j];
            if standardized > SEPARATION_LIMIT {
                return Err(Error::Separation {
                    column: design.names[col - 1].clone(),
                    coefficient: standardized,
                });
            }
        }

        for i in 0..n {
            let mut e = 0.0;
            for j in 0..p {
                e += x[i * p + j] * beta[j];
            }
            eta[i] = e;
            mu[i] = sigmoid(e);
        }
        let ll_new = bernoulli_ll(&y, &mu);
        // Score vector at the new coefficients.
        let mut max_grad = 0.0f64;
        for j in 0..p {
            let g: f64 = (0..n).map(|i| x[i * p + j] * (y[i] - mu[i])).sum();
            max_grad = max_grad.max(g.abs());
        }
        let ll_change = (ll_new - ll_old).abs() / ll_old.abs().max(1.0);
        ll_old = ll_new;
        if max_grad < IRLS_GRADIENT_TOL || ll_change < IRLS_LL_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            iterations: IRLS_MAX_ITER,
        });
    }

    let log_likelihood = ll_old;
    let null = null_ll(&y);
    let mcfadden = 1.0 - log_likelihood / null;

    let mut coefficients = BTreeMap::new();
    for name in &design.names {
        coefficients.insert(name.clone(), 0.0);
    }
    let mut intercept = 0.0;
    for (j, &col) in kept.iter().enumerate() {
        if col == 0 {
            intercept = beta[j];
        } else {
            coefficients.insert(design.names[col - 1].clone(), beta[j]);
        }
    }
    Ok(FittedModel {
        spec: spec.clone(),
        encodings: design.encodings,
        coefficients,
        intercept,
        train_rows: n,
        r_squared: None,
        mcfadden_r2: Some(mcfadden),
        log_likelihood: Some(log_likelihood),
        null_log_likelihood: Some(null),
        iterations,
        converged,
        notes,
        stale: false,
    })
}

/// Predictions on `d`: the linear predictor for OLS, the event probability
/// for logistic models. Rebuilds the design from the stored recipe and
/// rejects categories the training data never defined.
pub fn predict(m: &FittedModel, d: &Dataset) -> Result<Vec<f64>> {
    let (rows, n_cols) = design_rows_for(d, &m.encodings)?;
    let coef = m.coefficient_vector();
    debug_assert_eq!(coef.len(), n_cols);
    let n = d.n_rows();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut eta = 0.0;
        for j in 0..n_cols {
            eta += rows[i * n_cols + j] * coef[j];
        }
        out.push(match m.spec.family {
            Family::Ols => eta,
            Family::Logistic => sigmoid(eta),
        });
    }
    Ok(out)
}

/// Goodness of fit of `m` evaluated on `d`: R² for OLS, McFadden pseudo-R²
/// for logistic models. The null model uses `d`'s own outcome mean, so
/// evaluating on the training data reproduces the stored statistic; on
/// held-out data the value may be negative.
pub fn goodness_of_fit(m: &FittedModel, d: &Dataset) -> Result<f64> {
    let y = outcome_values(d, &m.spec)?;
    let pred = predict(m, d)?;
    match m.spec.family {
        Family::Ols => {
            let n = y.len() as f64;
            let mean = y.iter().sum::<f64>() / n;
            let sst: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
            if sst == 0.0 {
                return Err(Error::Degenerate {
                    message: "evaluation outcome is constant; R² undefined".into(),
                });
            }
            let sse: f64 = y
                .iter()
                .zip(&pred)
                .map(|(&yi, &pi)| (yi - pi) * (yi - pi))
                .sum();
            Ok(1.0 - sse / sst)
        }
        Family::Logistic => {
            let ones = y.iter().filter(|&&v| v == 1.0).count();
            if ones == 0 || ones == y.len() {
                return Err(Error::Degenerate {
                    message: "evaluation outcome has a single class; fit measure undefined"
                        .into(),
                });
            }
            let ll = bernoulli_ll(y, &pred);
            let null = null_ll(y);
            Ok(1.0 - ll / null)
        }
    }
}

/// Mean predictive accuracy of `m` on `d`: mean absolute error for OLS
/// (lower is better), classification accuracy at the 0.5 threshold for
/// logistic models (higher is better; 0.5 itself classifies as positive).
pub fn mean_accuracy(m: &FittedModel, d: &Dataset) -> Result<Accuracy> {
    let y = outcome_values(d, &m.spec)?;
    let pred = predict(m, d)?;
    match m.spec.family {
        Family::Ols => {
            let mae = y
                .iter()
                .zip(&pred)
                .map(|(&yi, &pi)| (yi - pi).abs())
                .sum::<f64>()
                / y.len() as f64;
            Ok(Accuracy {
                value: mae,
                orientation: Orientation::LowerIsBetter,
            })
        }
        Family::Logistic => {
            let hits = y
                .iter()
                .zip(&pred)
                .filter(|(&yi, &pi)| (pi >= 0.5) == (yi == 1.0))
                .count();
            Ok(Accuracy {
                value: hits as f64 / y.len() as f64,
                orientation: Orientation::HigherIsBetter,
            })
        }
    }
}

/// Copy of `m` with the named design-column coefficients set to zero.
///
/// Victims are design-column names (`school=hs03`, not `school`). The copy
/// predicts with the remaining coefficients as they were fitted — nothing is
/// refit — and its stored fit statistics are marked stale.
pub fn zero_coefficients(m: &FittedModel, victims: &[String]) -> Result<FittedModel> {
    let mut out = m.clone();
    for v in victims {
        match out.coefficients.get_mut(v) {
            Some(c) => *c = 0.0,
            None => return Err(Error::UnknownColumn { name: v.clone() }),
        }
    }
    if !victims.is_empty() {
        out.stale = true;
        out.notes
            .push(format!("coefficients zeroed without refit: {}", victims.join(", ")));
    }
    Ok(out)
}
