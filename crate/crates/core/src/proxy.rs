//! Proxy-power measurement: how much protected information a model's
//! predictors carry, and how much work they do with it.
//!
//! Three complementary views, combined by [`build_proxy_report`]:
//!
//! - **Variable importance** — the fit a model loses when one predictor is
//!   removed and the rest are refitted (added-last ΔR², or ΔMcFadden for
//!   logistic models). A variable can be strongly associated with a
//!   protected attribute yet do no decision work; importance isolates the
//!   work.
//! - **Semi-partial proxy power** — the fit a model *gains* when a protected
//!   attribute is added to its predictors. If the attribute adds nothing,
//!   the model has already absorbed everything the attribute could explain;
//!   the interesting quantity is how little it adds.
//! - **Substitute detection** — majority-map accuracy between a predictor
//!   and a protected attribute in both directions. This catches categorical
//!   stand-ins (a dominantly one-race school, a name-change flag) that
//!   regression measures can dilute.
//!
//! The per-variable *intuitive product* — association strength times
//! importance — is reported as a diagnostic: it ranks suspects usefully but
//! does not decompose explained variance, so no rule in [`crate::rules`]
//! thresholds on it.
//!
//! When a lock-box split is supplied, every model is fitted on the fitting
//! rows and every fit measure is evaluated on the held-out rows; the report
//! then describes out-of-sample proxy power. Held-out differences can dip
//! microscopically below zero from sampling noise, so the report clamps
//! importances and semi-partials at zero; the raw in-sample operations
//! ([`variable_importance`], [`semi_partial_r2`]) are left unclamped.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::lockbox::LockBoxSplit;
use crate::data::{ColumnKind, Dataset, Role};
use crate::error::Error;
use crate::glm::{self, Family, ModelSpec};
use crate::stats;
use crate::Result;

/// Importance at or below this threshold counts as "no decision work".
pub const IMPORTANCE_FLOOR: f64 = 1e-6;

/// Fits `spec` on `fit_d` and measures goodness of fit on `eval_d`.
fn measure_with(fit_d: &Dataset, eval_d: &Dataset, spec: &ModelSpec) -> Result<f64> {
    let m = glm::fit(fit_d, spec)?;
    glm::goodness_of_fit(&m, eval_d)
}

fn spec_without(spec: &ModelSpec, v: &str) -> ModelSpec {
    let mut s = spec.clone();
    s.predictors.retain(|p| p != v);
    s
}

fn spec_plus(spec: &ModelSpec, extra: &[String]) -> ModelSpec {
    let mut s = spec.clone();
    for e in extra {
        if !s.predictors.iter().any(|p| p == e) {
            s.predictors.push(e.clone());
        }
    }
    s
}

/// In-sample added-last importance of predictor `v` in `spec`: the model's
/// fit measure minus the fit of the same model with `v` removed and the
/// rest refitted. Nonnegative up to floating-point noise (the larger model
/// can always represent the smaller one).
pub fn variable_importance(d: &Dataset, spec: &ModelSpec, v: &str) -> Result<f64> {
    spec.validate()?;
    if !spec.predictors.iter().any(|p| p == v) {
        return Err(Error::InvalidSpec {
            message: format!("{v:?} is not a predictor of model {:?}", spec.id),
        });
    }
    let full = measure_with(d, d, spec)?;
    let reduced = measure_with(d, d, &spec_without(spec, v))?;
    Ok(full - reduced)
}

/// In-sample semi-partial proxy power: the fit gained by adding the
/// protected attributes to the model's predictors. Zero means the model's
/// facially neutral predictors already reproduce everything the protected
/// attributes could explain about the outcome.
pub fn semi_partial_r2(d: &Dataset, spec: &ModelSpec, protected: &[String]) -> Result<f64> {
    spec.validate()?;
    check_protected(d, protected)?;
    let base = measure_with(d, d, spec)?;
    let augmented = measure_augmented(d, d, &spec_plus(spec, protected))?;
    Ok(augmented - base)
}

/// `measure_with` for a protected-augmented spec: a separation failure in
/// the augmented logistic fit means the protected attribute splits the
/// outcome cleanly, which deserves a clearer message than a bare
/// fitting error.
fn measure_augmented(fit_d: &Dataset, eval_d: &Dataset, spec: &ModelSpec) -> Result<f64> {
    measure_with(fit_d, eval_d, spec).map_err(|e| match e {
        Error::Separation {
            column,
            coefficient,
        } => Error::NumericFailure {
            message: format!(
                "protected attribute separates outcome ({column}, standardized coefficient {coefficient:.2})"
            ),
        },
        other => other,
    })
}

/// Per-protected-attribute totals of the intuitive product measure
/// (|association| × added-last importance, summed over predictors),
/// computed in-sample. Diagnostic only: unlike the semi-partial measure it
/// does not decompose explained variance.
pub fn intuitive_total_proxy_power(
    d: &Dataset,
    spec: &ModelSpec,
    protected: &[String],
) -> Result<BTreeMap<String, f64>> {
    spec.validate()?;
    check_protected(d, protected)?;
    let mut totals: BTreeMap<String, f64> = protected.iter().map(|p| (p.clone(), 0.0)).collect();
    for v in &spec.predictors {
        let importance = variable_importance(d, spec, v)?;
        for p in protected {
            let assoc = stats::assoc_auto(d, v, p)?;
            *totals.get_mut(p).expect("protected key") += assoc.value.abs() * importance;
        }
    }
    Ok(totals)
}

pub(crate) fn check_protected(d: &Dataset, protected: &[String]) -> Result<()> {
    if protected.is_empty() {
        return Err(Error::InvalidSpec {
            message: "at least one protected attribute is required".into(),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for p in protected {
        if !seen.insert(p.as_str()) {
            return Err(Error::InvalidSpec {
                message: format!("protected attribute {p:?} listed twice"),
            });
        }
        let decl = d.column_schema(p)?;
        if decl.role != Role::Protected {
            return Err(Error::RoleMismatch {
                column: p.clone(),
                actual: decl.role.as_str().into(),
                expected: "protected".into(),
            });
        }
    }
    Ok(())
}

/// Result of majority-map substitution analysis between a variable and a
/// protected attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubstituteFinding {
    pub variable: String,
    pub protected: String,
    /// Accuracy of predicting the protected attribute from the variable via
    /// each variable level's majority protected class.
    pub forward_rate: f64,
    /// Accuracy of the reverse map (variable from protected attribute).
    pub reverse_rate: f64,
    /// Both directions reach the threshold: the variable is effectively a
    /// relabeling of the protected attribute.
    pub symmetric: bool,
    /// At least one direction reaches the threshold.
    pub near_perfect: bool,
    /// Fraction of rows in variable levels (with at least two rows) whose
    /// protected value is unique — rows for which the variable reveals the
    /// protected attribute outright. Singleton levels are ignored: a unique
    /// value "reveals" nothing beyond row identity.
    pub affected_fraction: f64,
    /// True when the variable was continuous and was grouped into deciles
    /// before mapping.
    pub binned: bool,
}

/// Type-7 (linear interpolation) quantile of already-sorted values.
pub(crate) fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Grouping keys for substitution analysis: binary and categorical columns
/// group by value; continuous columns are cut into deciles.
fn substitute_keys(d: &Dataset, column: &str) -> Result<Vec<String>> {
    let decl = d.column_schema(column)?;
    match decl.kind {
        ColumnKind::Binary | ColumnKind::Categorical => d.group_keys(column),
        ColumnKind::Continuous => {
            let vals = d.numeric(column)?;
            let mut sorted = vals.to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let thresholds: Vec<f64> = (1..10)
                .map(|k| quantile_sorted(&sorted, k as f64 / 10.0))
                .collect();
            Ok(vals
                .iter()
                .map(|&v| {
                    let bin = thresholds.iter().filter(|&&t| v > t).count();
                    format!("decile{bin}")
                })
                .collect())
        }
    }
}

/// Accuracy of the majority-class map from `from` keys to `to` keys.
fn majority_map_rate(from: &[String], to: &[String]) -> f64 {
    let mut groups: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for (f, t) in from.iter().zip(to) {
        *groups
            .entry(f.as_str())
            .or_default()
            .entry(t.as_str())
            .or_insert(0) += 1;
    }
    let hits: usize = groups
        .values()
        .map(|counts| counts.values().copied().max().unwrap_or(0))
        .sum();
    hits as f64 / from.len() as f64
}

/// Tests whether `v` substitutes for protected attribute `p`.
///
/// `threshold` (in (0, 1]) is the rate at which a direction counts as
/// near-perfect. The protected side must be binary or categorical;
/// a continuous `v` is grouped into deciles.
pub fn detect_substitute(
    d: &Dataset,
    v: &str,
    p: &str,
    threshold: f64,
) -> Result<SubstituteFinding> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::InvalidSpec {
            message: format!("substitute threshold {threshold} must be in (0, 1]"),
        });
    }
    let p_decl = d.column_schema(p)?;
    if p_decl.kind == ColumnKind::Continuous {
        return Err(Error::KindMismatch {
            column: p.into(),
            message: "substitution analysis needs a binary or categorical protected attribute"
                .into(),
        });
    }
    let binned = d.column_schema(v)?.kind == ColumnKind::Continuous;
    let keys_v = substitute_keys(d, v)?;
    let keys_p = d.group_keys(p)?;

    let forward_rate = majority_map_rate(&keys_v, &keys_p);
    let reverse_rate = majority_map_rate(&keys_p, &keys_v);

    // Rows whose variable level (with ≥ 2 rows) is pure in the protected
    // attribute.
    let mut group_stats: BTreeMap<&str, (usize, &str, bool)> = BTreeMap::new();
    for (kv, kp) in keys_v.iter().zip(&keys_p) {
        let e = group_stats
            .entry(kv.as_str())
            .or_insert((0, kp.as_str(), true));
        e.0 += 1;
        if e.1 != kp.as_str() {
            e.2 = false;
        }
    }
    let affected: usize = group_stats
        .values()
        .filter(|(count, _, pure)| *count >= 2 && *pure)
        .map(|(count, _, _)| count)
        .sum();

    Ok(SubstituteFinding {
        variable: v.into(),
        protected: p.into(),
        forward_rate,
        reverse_rate,
        symmetric: forward_rate >= threshold && reverse_rate >= threshold,
        near_perfect: forward_rate >= threshold || reverse_rate >= threshold,
        affected_fraction: affected as f64 / d.n_rows() as f64,
        binned,
    })
}

/// The three prediction vectors of the coefficient-zeroing decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroingDecomposition {
    /// Model fitted with the protected attributes included.
    pub full_predictions: Vec<f64>,
    /// Same coefficients, protected coefficients set to zero at scoring
    /// time. Proxy effects are *not* re-absorbed into the neutral
    /// predictors.
    pub zeroed_predictions: Vec<f64>,
    /// Model refitted without the protected attributes. Proxy effects *are*
    /// re-absorbed: correlated neutral predictors pick the signal back up.
    pub omitted_predictions: Vec<f64>,
    /// Mean absolute difference between the zeroed and omitted predictions —
    /// the share of protected signal that neutral predictors smuggle back in
    /// when the attribute is merely omitted rather than neutralized.
    pub indirect_gap: f64,
}

/// Compares the zeroed-coefficient treatment of protected attributes with
/// plain omission, on the same data.
pub fn zeroing_decomposition(
    d: &Dataset,
    spec: &ModelSpec,
    protected: &[String],
) -> Result<ZeroingDecomposition> {
    spec.validate()?;
    check_protected(d, protected)?;
    let full_spec = spec_plus(spec, protected);
    let full = glm::fit(d, &full_spec)?;

    // Design columns originating from protected source columns.
    let victims: Vec<String> = full
        .encodings
        .iter()
        .filter(|e| protected.iter().any(|p| p == e.column()))
        .flat_map(|e| e.design_names())
        .collect();
    let zeroed = glm::zero_coefficients(&full, &victims)?;
    let omitted = glm::fit(d, spec)?;

    let full_predictions = glm::predict(&full, d)?;
    let zeroed_predictions = glm::predict(&zeroed, d)?;
    let omitted_predictions = glm::predict(&omitted, d)?;
    let indirect_gap = zeroed_predictions
        .iter()
        .zip(&omitted_predictions)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / d.n_rows() as f64;

    Ok(ZeroingDecomposition {
        full_predictions,
        zeroed_predictions,
        omitted_predictions,
        indirect_gap,
    })
}

/// Where a report's fit measures were evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvaluationSet {
    Train,
    Lockbox,
}

/// Per-predictor proxy measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariableProxyPower {
    pub variable: String,
    /// Protected attribute → association measure value (signed for Pearson;
    /// Cramér's V and the correlation ratio are already nonnegative).
    pub association_to_protected: BTreeMap<String, f64>,
    /// Added-last importance (clamped at zero for held-out evaluation).
    pub importance: f64,
    /// Protected attribute → |association| × importance. Diagnostic only.
    pub intuitive_product: BTreeMap<String, f64>,
}

/// A model's proxy-power measurements against a set of protected attributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProxyPowerReport {
    pub model_id: String,
    pub outcome: String,
    pub family: Family,
    pub evaluation_set: EvaluationSet,
    pub per_variable: Vec<VariableProxyPower>,
    /// Protected attribute → semi-partial proxy power (clamped at zero).
    pub semi_partial: BTreeMap<String, f64>,
    /// Protected attribute → sum of per-variable products. Diagnostic only.
    pub total_intuitive: BTreeMap<String, f64>,
    /// Weighted (or unweighted) mean of the semi-partial map — the scalar
    /// the comparison rules consume.
    pub average_proxy_power: f64,
    pub notes: Vec<String>,
}

/// Averages a report's semi-partial proxy powers.
///
/// `weights`, when given, must cover exactly the report's protected
/// attributes with nonnegative weights of positive total; they are
/// normalized to sum to one.
pub fn average_proxy_power(
    report: &ProxyPowerReport,
    weights: Option<&BTreeMap<String, f64>>,
) -> Result<f64> {
    weighted_mean(&report.semi_partial, weights)
}

fn weighted_mean(
    values: &BTreeMap<String, f64>,
    weights: Option<&BTreeMap<String, f64>>,
) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidSpec {
            message: "no protected attributes to average over".into(),
        });
    }
    match weights {
        None => Ok(values.values().sum::<f64>() / values.len() as f64),
        Some(w) => {
            for key in w.keys() {
                if !values.contains_key(key) {
                    return Err(Error::InvalidSpec {
                        message: format!("weight for unknown protected attribute {key:?}"),
                    });
                }
            }
            let mut total = 0.0;
            for key in values.keys() {
                let weight = *w.get(key).ok_or_else(|| Error::InvalidSpec {
                    message: format!("missing weight for protected attribute {key:?}"),
                })?;
                if !(weight >= 0.0) {
                    return Err(Error::InvalidSpec {
                        message: format!("weight for {key:?} must be nonnegative"),
                    });
                }
                total += weight;
            }
            if total <= 0.0 {
                return Err(Error::InvalidSpec {
                    message: "weights must not all be zero".into(),
                });
            }
            Ok(values
                .iter()
                .map(|(key, v)| v * w[key] / total)
                .sum())
        }
    }
}

/// Builds the full proxy-power report for one model.
///
/// With a lock-box split, models are fitted on the fitting rows and all fit
/// measures evaluate on the held-out rows (after verifying the split's
/// digest); without one, everything is in-sample. Held-out importances and
/// semi-partials are clamped at zero.
pub fn build_proxy_report(
    d: &Dataset,
    split: Option<&LockBoxSplit>,
    spec: &ModelSpec,
    protected: &[String],
    weights: Option<&BTreeMap<String, f64>>,
) -> Result<ProxyPowerReport> {
    spec.validate()?;
    check_protected(d, protected)?;

    let (fit_d, eval_d, evaluation_set) = match split {
        Some(s) => {
            s.verify_against(d)?;
            (
                s.train_set(d),
                s.test_set(d),
                EvaluationSet::Lockbox,
            )
        }
        None => (d.clone(), d.clone(), EvaluationSet::Train),
    };

    let full_model = glm::fit(&fit_d, spec)?;
    let full_measure = glm::goodness_of_fit(&full_model, &eval_d)?;
    let mut notes = full_model.notes.clone();

    let mut per_variable = Vec::with_capacity(spec.predictors.len());
    for v in &spec.predictors {
        let reduced = measure_with(&fit_d, &eval_d, &spec_without(spec, v))?;
        let importance = (full_measure - reduced).max(0.0);
        let mut association_to_protected = BTreeMap::new();
        let mut intuitive_product = BTreeMap::new();
        for p in protected {
            let assoc = stats::assoc_auto(&eval_d, v, p)?;
            association_to_protected.insert(p.clone(), assoc.value);
            intuitive_product.insert(p.clone(), assoc.value.abs() * importance);
        }
        per_variable.push(VariableProxyPower {
            variable: v.clone(),
            association_to_protected,
            importance,
            intuitive_product,
        });
    }

    let mut semi_partial = BTreeMap::new();
    for p in protected {
        let augmented = measure_augmented(&fit_d, &eval_d, &spec_plus(spec, &[p.clone()]))?;
        semi_partial.insert(p.clone(), (augmented - full_measure).max(0.0));
    }

    let mut total_intuitive: BTreeMap<String, f64> =
        protected.iter().map(|p| (p.clone(), 0.0)).collect();
    for row in &per_variable {
        for (p, prod) in &row.intuitive_product {
            *total_intuitive.get_mut(p).expect("protected key") += prod;
        }
    }

    let average = weighted_mean(&semi_partial, weights)?;
    notes.push(
        "per-variable products are diagnostic only; they do not decompose explained variance"
            .into(),
    );

    Ok(ProxyPowerReport {
        model_id: spec.id.clone(),
        outcome: spec.outcome.clone(),
        family: spec.family,
        evaluation_set,
        per_variable,
        semi_partial,
        total_intuitive,
        average_proxy_power: average,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{ColumnData, ColumnSchema, Schema};

    fn close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() < tol, "got {got}, want {want}");
    }

    fn continuous(name: &str, role: Role) -> ColumnSchema {
        ColumnSchema {
            name: name.into(),
            kind: ColumnKind::Continuous,
            role,
            categories: vec![],
        }
    }

    fn binary(name: &str, role: Role) -> ColumnSchema {
        ColumnSchema {
            name: name.into(),
            kind: ColumnKind::Binary,
            role,
            categories: vec![],
        }
    }

    /// Deterministic fixture with a = protected-correlated predictor,
    /// b = independent predictor, y driven by both.
    fn correlated_fixture() -> (Dataset, ModelSpec) {
        let schema = Schema {
            columns: vec![
                binary("m", Role::Protected),
                continuous("a", Role::Predictor),
                continuous("b", Role::Predictor),
                continuous("y", Role::Outcome),
            ],
        };
        let n = 40;
        let mut m = Vec::new();
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let mi = (i % 2) as f64;
            // Deterministic pseudo-noise, bounded away from symmetry.
            let e1 = ((i * 7 % 13) as f64 - 6.0) / 13.0;
            let e2 = ((i * 11 % 17) as f64 - 8.0) / 17.0;
            let ai = 2.0 * mi + e1;
            let bi = e2 * 3.0;
            m.push(mi);
            a.push(ai);
            b.push(bi);
            y.push(1.5 * mi + 0.8 * ai + 0.5 * bi + ((i * 5 % 7) as f64 - 3.0) / 7.0);
        }
        let d = Dataset::new(
            schema,
            vec![
                ColumnData::Numeric(m),
                ColumnData::Numeric(a),
                ColumnData::Numeric(b),
                ColumnData::Numeric(y),
            ],
        )
        .unwrap();
        let spec = ModelSpec {
            id: "base".into(),
            family: Family::Ols,
            outcome: "y".into(),
            predictors: vec!["a".into(), "b".into()],
        };
        (d, spec)
    }

    #[test]
    fn duplicated_predictor_has_zero_importance() {
        // a2 is an exact copy of a: removing either leaves fit unchanged.
        let schema = Schema {
            columns: vec![
                continuous("a", Role::Predictor),
                continuous("a2", Role::Predictor),
                continuous("b", Role::Predictor),
                continuous("y", Role::Outcome),
            ],
        };
        let n = 24;
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut y = Vec::new();
        for i in 0..n {
            let ai = (i as f64 * 0.37).sin() * 2.0;
            let bi = ((i * 13 % 19) as f64 - 9.0) / 5.0;
            a.push(ai);
            b.push(bi);
            y.push(1.2 * ai - 0.7 * bi + ((i % 5) as f64 - 2.0) / 11.0);
        }
        let d = Dataset::new(
            schema,
            vec![
                ColumnData::Numeric(a.clone()),
                ColumnData::Numeric(a),
                ColumnData::Numeric(b),
                ColumnData::Numeric(y),
            ],
        )
        .unwrap();
        let spec = ModelSpec {
            id: "dup".into(),
            family: Family::Ols,
            outcome: "y".into(),
            predictors: vec!["a".into(), "a2".into(), "b".into()],
        };
        let imp_a = variable_importance(&d, &spec, "a").unwrap();
        let imp_a2 = variable_importance(&d, &spec, "a2").unwrap();
        let imp_b = variable_importance(&d, &spec, "b").unwrap();
        assert!(imp_a.abs() < 1e-12, "copy absorbs removal: {imp_a}");
        assert!(imp_a2.abs() < 1e-12);
        assert!(imp_b > 0.05, "unique predictor does real work: {imp_b}");
    }

    #[test]
    fn orthogonal_components_make_importance_exactly_additive() {
        // Build three exactly orthogonal, mean-zero regressors by
        // Gram-Schmidt, then give the outcome fixed shares of variance:
        // 0.65 from the legitimate predictor, 0.05 from the protected
        // attribute, 0.30 unexplained.
        let n = 20;
        let raw: Vec<Vec<f64>> = vec![
            (0..n).map(|i| if i < n / 2 { 1.0 } else { -1.0 }).collect(),
            (0..n).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            (0..n).map(|i| ((i * i + 3 * i) % 11) as f64 - 5.0).collect(),
        ];
        let mut basis: Vec<Vec<f64>> = Vec::new();
        for mut v in raw {
            let mean = v.iter().sum::<f64>() / n as f64;
            v.iter_mut().for_each(|x| *x -= mean);
            for b in &basis {
                let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        let y: Vec<f64> = (0..n)
            .map(|i| {
                0.65f64.sqrt() * basis[0][i]
                    + 0.05f64.sqrt() * basis[1][i]
                    + 0.30f64.sqrt() * basis[2][i]
            })
            .collect();
        let schema = Schema {
            columns: vec![
                continuous("legit", Role::Predictor),
                continuous("prot", Role::Protected),
                continuous("y", Role::Outcome),
            ],
        };
        let d = Dataset::new(
            schema,
            vec![
                ColumnData::Numeric(basis[0].clone()),
                ColumnData::Numeric(basis[1].clone()),
                ColumnData::Numeric(y),
            ],
        )
        .unwrap();
        let spec = ModelSpec {
            id: "legit-only".into(),
            family: Family::Ols,
            outcome: "y".into(),
            predictors: vec!["legit".into()],
        };
        let base = measure_with(&d, &d, &spec).unwrap();
        close(base, 0.65, 1e-10);
        let sp = semi_partial_r2(&d, &spec, &["prot".into()]).unwrap();
        close(sp, 0.05, 1e-10);
    }

    #[test]
    fn semi_partial_is_zero_when_attribute_is_already_in_the_model() {
        let (d, mut spec) = correlated_fixture();
        spec.predictors.push("m".into());
        let sp = semi_partial_r2(&d, &spec, &["m".into()]).unwrap();
        close(sp, 0.0, 1e-12);
    }

    #[test]
    fn semi_partial_requires_protected_role() {
        let (d, spec) = correlated_fixture();
        assert!(matches!(
            semi_partial_r2(&d, &spec, &["b".into()]),
            Err(Error::RoleMismatch { .. })
        ));
        assert!(matches!(
            semi_partial_r2(&d, &spec, &[]),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn importance_requires_membership() {
        let (d, spec) = correlated_fixture();
        assert!(matches!(
            variable_importance(&d, &spec, "m"),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn substitute_detection_identity_and_independence() {
        let schema = Schema {
            columns: vec![
                binary("v", Role::Predictor),
                binary("p", Role::Protected),
                binary("y", Role::Outcome),
            ],
        };
        // v == p exactly.
        let mut rows = String::from("v,p,y\n");
        for i in 0..20 {
            let b = i % 2;
            let y = (i % 3 == 0) as u8;
            rows.push_str(&format!("{b},{b},{y}\n"));
        }
        let d = Dataset::from_csv(&rows, &schema).unwrap();
        let f = detect_substitute(&d, "v", "p", 0.95).unwrap();
        assert_eq!(f.forward_rate, 1.0);
        assert_eq!(f.reverse_rate, 1.0);
        assert!(f.symmetric && f.near_perfect);
        assert_eq!(f.affected_fraction, 1.0);
    }

    #[test]
    fn substitute_detection_asymmetric_many_to_one() {
        // v has three levels: two map to p=0, one to p=1. Forward is
        // perfect; reverse cannot distinguish the two p=0 levels.
        let schema = Schema {
            columns: vec![
                ColumnSchema {
                    name: "v".into(),
                    kind: ColumnKind::Categorical,
                    role: Role::Predictor,
                    categories: vec!["a".into(), "b".into(), "c".into()],
                },
                binary("p", Role::Protected),
                binary("y", Role::Outcome),
            ],
        };
        let mut rows = String::from("v,p,y\n");
        for _ in 0..3 {
            rows.push_str("a,0,0\n");
            rows.push_str("b,0,1\n");
        }
        for _ in 0..4 {
            rows.push_str("c,1,0\n");
        }
        let d = Dataset::from_csv(&rows, &schema).unwrap();
        let f = detect_substitute(&d, "v", "p", 0.95).unwrap();
        assert_eq!(f.forward_rate, 1.0);
        close(f.reverse_rate, 0.7, 1e-12);
        assert!(f.near_perfect);
        assert!(!f.symmetric);
        assert_eq!(f.affected_fraction, 1.0);
    }

    #[test]
    fn singleton_levels_do_not_count_as_affected() {
        let schema = Schema {
            columns: vec![
                ColumnSchema {
                    name: "v".into(),
                    kind: ColumnKind::Categorical,
                    role: Role::Predictor,
                    categories: (0..8).map(|i| format!("id{i}")).collect(),
                },
                binary("p", Role::Protected),
                binary("y", Role::Outcome),
            ],
        };
        // Every v level is a singleton: forward map is trivially perfect,
        // but no level has the support to reveal anything.
        let mut rows = String::from("v,p,y\n");
        for i in 0..8 {
            rows.push_str(&format!("id{i},{},0\n", i % 2));
        }
        let d = Dataset::from_csv(&rows, &schema).unwrap();
        let f = detect_substitute(&d, "v", "p", 0.95).unwrap();
        assert_eq!(f.forward_rate, 1.0);
        assert_eq!(f.affected_fraction, 0.0);
    }

    #[test]
    fn continuous_variables_group_by_decile() {
        let schema = Schema {
            columns: vec![
                continuous("v", Role::Predictor),
                binary("p", Role::Protected),
                binary("y", Role::Outcome),
            ],
        };
        // v below 0 ⇔ p = 0, in two clusters of 20.
        let mut rows = String::from("v,p,y\n");
        for i in 0..20 {
            rows.push_str(&format!("{},0,0\n", -10.0 + i as f64 * 0.1));
        }
        for i in 0..20 {
            rows.push_str(&format!("{},1,0\n", 10.0 + i as f64 * 0.1));
        }
        let d = Dataset::from_csv(&rows, &schema).unwrap();
        let f = detect_substitute(&d, "v", "p", 0.95).unwrap();
        assert_eq!(f.forward_rate, 1.0);
        assert_eq!(f.affected_fraction, 1.0);
        // Reverse direction: p has two levels mapping onto ten deciles.
        assert!(f.reverse_rate < 0.5);
        assert!(f.near_perfect && !f.symmetric);
    }

    #[test]
    fn continuous_protected_attribute_is_rejected() {
        let (d, _) = correlated_fixture();
        assert!(matches!(
            detect_substitute(&d, "b", "a", 0.95),
            Err(Error::KindMismatch { .. })
        ));
        assert!(matches!(
            detect_substitute(&d, "a", "m", 0.0),
            Err(Error::InvalidSpec { .. })
        ));
    }

    #[test]
    fn zeroing_reveals_indirect_pickup() {
        let (d, spec) = correlated_fixture();
        let z = zeroing_decomposition(&d, &spec, &["m".into()]).unwrap();
        assert_eq!(z.full_predictions.len(), d.n_rows());
        // a correlates with m, so refitting without m re-absorbs part of
        // the protected effect that zeroing removes.
        assert!(z.indirect_gap > 0.05, "gap {}", z.indirect_gap);
        // And zeroing actually changed something relative to the full fit.
        let moved = z
            .full_predictions
            .iter()
            .zip(&z.zeroed_predictions)
            .any(|(a, b)| (a - b).abs() > 1e-9);
        assert!(moved);
    }

    #[test]
    fn report_is_clamped_and_averages_semi_partials() {
        let (d, spec) = correlated_fixture();
        let report = build_proxy_report(&d, None, &spec, &["m".into()], None).unwrap();
        assert_eq!(report.evaluation_set, EvaluationSet::Train);
        assert_eq!(report.model_id, "base");
        assert_eq!(report.per_variable.len(), 2);
        for row in &report.per_variable {
            assert!(row.importance >= 0.0);
            for (p, product) in &row.intuitive_product {
                let assoc = row.association_to_protected[p];
                close(*product, assoc.abs() * row.importance, 1e-15);
                assert!(*product >= 0.0);
            }
        }
        for sp in report.semi_partial.values() {
            assert!(*sp >= 0.0);
        }
        close(
            report.average_proxy_power,
            report.semi_partial["m"],
            1e-15,
        );
    }

    #[test]
    fn report_with_lockbox_tags_holdout_and_verifies_digest() {
        let (d, spec) = correlated_fixture();
        let split = crate::data::lockbox::lockbox_split(&d, 0.3, 7).unwrap();
        let report =
            build_proxy_report(&d, Some(&split), &spec, &["m".into()], None).unwrap();
        assert_eq!(report.evaluation_set, EvaluationSet::Lockbox);

        // A tampered dataset must be rejected before any measurement.
        let mut bad = split.clone();
        bad.digest = format!("{}0", &bad.digest[..63]);
        assert!(matches!(
            build_proxy_report(&d, Some(&bad), &spec, &["m".into()], None),
            Err(Error::DigestMismatch { .. })
        ));
    }

    #[test]
    fn weights_validate_and_normalize() {
        let mut semi = BTreeMap::new();
        semi.insert("race".to_string(), 0.02);
        semi.insert("sex".to_string(), 0.06);
        let report = ProxyPowerReport {
            model_id: "m".into(),
            outcome: "y".into(),
            family: Family::Ols,
            evaluation_set: EvaluationSet::Train,
            per_variable: vec![],
            semi_partial: semi,
            total_intuitive: BTreeMap::new(),
            average_proxy_power: 0.0,
            notes: vec![],
        };
        close(average_proxy_power(&report, None).unwrap(), 0.04, 1e-15);

        let mut w = BTreeMap::new();
        w.insert("race".to_string(), 3.0);
        w.insert("sex".to_string(), 1.0);
        close(
            average_proxy_power(&report, Some(&w)).unwrap(),
            0.75 * 0.02 + 0.25 * 0.06,
            1e-15,
        );

        let mut missing = BTreeMap::new();
        missing.insert("race".to_string(), 1.0);
        assert!(average_proxy_power(&report, Some(&missing)).is_err());

        let mut unknown = BTreeMap::new();
        unknown.insert("race".to_string(), 1.0);
        unknown.insert("sex".to_string(), 1.0);
        unknown.insert("age".to_string(), 1.0);
        assert!(average_proxy_power(&report, Some(&unknown)).is_err());

        let mut zeros = BTreeMap::new();
        zeros.insert("race".to_string(), 0.0);
        zeros.insert("sex".to_string(), 0.0);
        assert!(average_proxy_power(&report, Some(&zeros)).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let vals = [1.0, 2.0, 3.0, 4.0];
        close(quantile_sorted(&vals, 0.0), 1.0, 1e-15);
        close(quantile_sorted(&vals, 1.0), 4.0, 1e-15);
        close(quantile_sorted(&vals, 0.5), 2.5, 1e-15);
        close(quantile_sorted(&vals, 1.0 / 3.0), 2.0, 1e-12);
    }
}
