//! The verdict engine: turns proxy measurements into decisions.
//!
//! Four rules, in increasing order of how much they compare:
//!
//! - [`no_proxy_rule_check`] inspects a single model and flags individual
//!   predictors — near-perfect substitutes that carry decision weight are
//!   prohibited, and predictors that do no decision work are superfluous
//!   (there is no reason to use a variable that explains nothing, so
//!   keeping one that tracks a protected attribute is indefensible).
//! - [`capped_rule`] accepts every model whose proxy power is at or below a
//!   fixed cap and treats all compliant models as equals.
//! - [`compare_min_proxy_power`] selects, among models whose accuracy is
//!   practically equivalent to the best, the one with the least proxy
//!   power — the "less discriminatory alternative".
//! - [`lexicographic_compare`] is the deterministic total order used to
//!   break remaining ties: accuracy (quantized by the equivalence band),
//!   then proxy power, then predictor count, then model id.
//!
//! [`disparate_impact_screen`] is the traditional selection-rate check
//! (four-fifths rule plus a significance test) kept alongside the proxy
//! rules for models whose internals cannot be audited.
//!
//! Every verdict carries a structured decision trail so that the outcome
//! can be audited step by step rather than trusted.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::data::lockbox::LockBoxSplit;
use crate::data::Dataset;
use crate::error::Error;
use crate::glm::{self, Accuracy, ModelSpec, Orientation};
use crate::proxy::{self, IMPORTANCE_FLOOR};
use crate::stats::{ContingencyTable, TestKind};
use crate::Result;

/// Proxy-power differences at or below this are treated as ties.
pub const PROXY_TIE_TOLERANCE: f64 = 1e-6;

/// Selection-rate ratio below which the disparate-impact screen flags.
pub const FOUR_FIFTHS_RATIO: f64 = 0.8;

/// Attached to every screening report: the threshold is a rule of thumb,
/// not a finding of fairness or unfairness.
pub const FOUR_FIFTHS_CAVEAT: &str =
    "the four-fifths rule is arbitrary even if occasionally useful";

/// Cap applied by [`capped_rule`] when the policy does not set one.
pub const DEFAULT_CAP: f64 = 0.05;

/// Tunable thresholds shared by the rules.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Policy {
    /// Accuracy differences at or below this band count as practically
    /// equivalent.
    #[serde(rename = "band")]
    pub equivalence_band: f64,
    /// Proxy-power ceiling for [`capped_rule`]; `None` uses [`DEFAULT_CAP`].
    pub cap: Option<f64>,
    /// Majority-map rate at which a substitute counts as near-perfect.
    pub substitute_threshold: f64,
    /// Protected attribute columns the rules measure against.
    pub protected: Vec<String>,
    /// Optional weights for averaging proxy power across protected
    /// attributes (for example, expected applicant shares).
    pub weights: Option<BTreeMap<String, f64>>,
}

impl Default for Policy {
    fn default() -> Self {
        Policy {
            equivalence_band: 0.005,
            cap: None,
            substitute_threshold: 0.95,
            protected: Vec::new(),
            weights: None,
        }
    }
}

impl Policy {
    pub fn validate(&self) -> Result<()> {
        if !(self.equivalence_band >= 0.0) || !self.equivalence_band.is_finite() {
            return Err(Error::InvalidSpec {
                message: format!(
                    "equivalence band {} must be a finite value ≥ 0",
                    self.equivalence_band
                ),
            });
        }
        if let Some(cap) = self.cap {
            if !(cap > 0.0 && cap <= 1.0) {
                return Err(Error::InvalidSpec {
                    message: format!("cap {cap} must lie in (0, 1]"),
                });
            }
        }
        if !(self.substitute_threshold > 0.0 && self.substitute_threshold <= 1.0) {
            return Err(Error::InvalidSpec {
                message: format!(
                    "substitute threshold {} must lie in (0, 1]",
                    self.substitute_threshold
                ),
            });
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Policy> {
        let p: Policy = serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "policy".into(),
            message: e.to_string(),
        })?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("policy serializes")
    }
}

/// Which rule produced a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    NoProxy,
    MinProxy,
    Capped,
    Lexicographic,
}

/// One recorded decision step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailStep {
    /// What was being tested (e.g. "accuracy_within_band").
    pub criterion: String,
    /// The models (or variables) involved in this step.
    pub models: Vec<String>,
    /// The values that were compared, rendered for the record.
    pub values: Vec<String>,
    /// What the step concluded.
    pub outcome: String,
}

/// A flagged variable or model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// The variable (no-proxy rule) or model id (capped rule) at fault.
    pub subject: String,
    /// Machine-readable class: "prohibited", "superfluous", "over_cap".
    pub kind: String,
    pub message: String,
}

/// Winner-versus-runner-up gaps, all oriented so that positive favors the
/// winner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub accuracy_gap: f64,
    pub proxy_gap: f64,
    pub variable_count_gap: i64,
}

impl Margins {
    fn zero() -> Margins {
        Margins {
            accuracy_gap: 0.0,
            proxy_gap: 0.0,
            variable_count_gap: 0,
        }
    }
}

/// Outcome of applying one rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub rule: Rule,
    /// A model id, or "tie".
    pub winner: String,
    pub margins: Margins,
    pub trail: Vec<TrailStep>,
    pub violations: Vec<Violation>,
}

/// A model reduced to the quantities the comparison rules consume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredModel {
    pub model_id: String,
    pub accuracy: Accuracy,
    pub average_proxy_power: f64,
    pub predictor_count: usize,
}

/// Fits and scores one model: accuracy plus average proxy power, both
/// measured on the lock-box rows when a split is supplied.
pub fn score_model(
    d: &Dataset,
    split: Option<&LockBoxSplit>,
    spec: &ModelSpec,
    policy: &Policy,
) -> Result<ScoredModel> {
    let report = proxy::build_proxy_report(d, split, spec, &policy.protected, policy.weights.as_ref())?;
    let (fit_d, eval_d) = match split {
        Some(s) => (s.train_set(d), s.test_set(d)),
        None => (d.clone(), d.clone()),
    };
    let model = glm::fit(&fit_d, spec)?;
    let accuracy = glm::mean_accuracy(&model, &eval_d)?;
    if !accuracy.value.is_finite() || !report.average_proxy_power.is_finite() {
        return Err(Error::NumericFailure {
            message: format!("non-finite score for model {:?}", spec.id),
        });
    }
    Ok(ScoredModel {
        model_id: spec.id.clone(),
        accuracy,
        average_proxy_power: report.average_proxy_power,
        predictor_count: spec.predictors.len(),
    })
}

/// How much better `a`'s accuracy is than `b`'s, as a signed value in
/// "goodness" units (positive favors `a`, whatever the orientation).
fn accuracy_advantage(a: &Accuracy, b: &Accuracy) -> f64 {
    match a.orientation {
        Orientation::HigherIsBetter => a.value - b.value,
        Orientation::LowerIsBetter => b.value - a.value,
    }
}

fn check_comparable(a: &ScoredModel, b: &ScoredModel) -> Result<()> {
    if a.accuracy.orientation != b.accuracy.orientation {
        return Err(Error::MixedOrientation);
    }
    for m in [a, b] {
        if !m.accuracy.value.is_finite() || !m.average_proxy_power.is_finite() {
            return Err(Error::NumericFailure {
                message: format!("non-finite score for model {:?}", m.model_id),
            });
        }
    }
    Ok(())
}

/// The lexicographic comparison with the criterion that decided it.
/// Returns `Ordering::Less` when `a` ranks ahead of (better than) `b`.
pub(crate) fn decide(
    a: &ScoredModel,
    b: &ScoredModel,
    policy: &Policy,
) -> Result<(Ordering, &'static str)> {
    check_comparable(a, b)?;
    let band = policy.equivalence_band;

    // Accuracy, quantized by the equivalence band so that the comparison is
    // transitive. (A raw "within band" relation is not an order: it admits
    // chains where a ~ b, b ~ c, but a and c differ by more than the band.)
    let (ka, kb) = if band == 0.0 {
        (a.accuracy.value, b.accuracy.value)
    } else {
        (
            (a.accuracy.value / band).floor(),
            (b.accuracy.value / band).floor(),
        )
    };
    let acc_cmp = match a.accuracy.orientation {
        Orientation::HigherIsBetter => kb.partial_cmp(&ka).expect("finite"),
        Orientation::LowerIsBetter => ka.partial_cmp(&kb).expect("finite"),
    };
    if acc_cmp != Ordering::Equal {
        return Ok((acc_cmp, "accuracy"));
    }

    // Proxy power, quantized by the tie tolerance; lower is better.
    let pa = (a.average_proxy_power / PROXY_TIE_TOLERANCE).floor();
    let pb = (b.average_proxy_power / PROXY_TIE_TOLERANCE).floor();
    let proxy_cmp = pa.partial_cmp(&pb).expect("finite");
    if proxy_cmp != Ordering::Equal {
        return Ok((proxy_cmp, "average_proxy_power"));
    }

    let count_cmp = a.predictor_count.cmp(&b.predictor_count);
    if count_cmp != Ordering::Equal {
        return Ok((count_cmp, "predictor_count"));
    }

    let id_cmp = a.model_id.cmp(&b.model_id);
    if id_cmp != Ordering::Equal {
        return Ok((id_cmp, "model_id"));
    }
    Ok((Ordering::Equal, "identical"))
}

/// Total order over scored models: accuracy (quantized by the equivalence
/// band, orientation-aware), then average proxy power, then predictor
/// count, then model id. `Ordering::Less` means the first model ranks
/// ahead. Errors when the two accuracies use different orientations.
pub fn lexicographic_compare(
    a: &ScoredModel,
    b: &ScoredModel,
    policy: &Policy,
) -> Result<Ordering> {
    Ok(decide(a, b, policy)?.0)
}

fn fmt(v: f64) -> String {
    format!("{v:.6}")
}

/// Audits a single model's predictors.
///
/// For each predictor, measures added-last importance (in-sample) and runs
/// substitution analysis against every protected attribute in the policy.
/// Predictors with no importance are flagged superfluous; predictors with
/// importance that substitute for a protected attribute — near-perfectly
/// overall, or outright for some subpopulation — are flagged prohibited.
pub fn no_proxy_rule_check(d: &Dataset, spec: &ModelSpec, policy: &Policy) -> Result<Verdict> {
    policy.validate()?;
    spec.validate()?;
    proxy::check_protected(d, &policy.protected)?;

    let mut trail = Vec::new();
    let mut violations = Vec::new();
    for v in &spec.predictors {
        let importance = proxy::variable_importance(d, spec, v)?;
        if importance <= IMPORTANCE_FLOOR {
            violations.push(Violation {
                subject: v.clone(),
                kind: "superfluous".into(),
                message: format!(
                    "superfluous — remove: {v:?} explains no part of the decision \
                     (importance {importance:.2e})"
                ),
            });
            trail.push(TrailStep {
                criterion: "variable_importance".into(),
                models: vec![v.clone()],
                values: vec![fmt(importance)],
                outcome: "superfluous".into(),
            });
            continue;
        }
        for p in &policy.protected {
            let f = proxy::detect_substitute(d, v, p, policy.substitute_threshold)?;
            let outcome = if f.near_perfect {
                violations.push(Violation {
                    subject: v.clone(),
                    kind: "prohibited".into(),
                    message: format!(
                        "prohibited — near-perfect substitute for {p:?} \
                         (forward rate {:.3}, reverse rate {:.3}) with decision influence",
                        f.forward_rate, f.reverse_rate
                    ),
                });
                "prohibited (near-perfect substitute)"
            } else if f.affected_fraction > 0.0 {
                violations.push(Violation {
                    subject: v.clone(),
                    kind: "prohibited".into(),
                    message: format!(
                        "prohibited — reveals {p:?} outright for {:.1}% of rows \
                         with decision influence",
                        f.affected_fraction * 100.0
                    ),
                });
                "prohibited (reveals a subpopulation)"
            } else {
                "clean"
            };
            trail.push(TrailStep {
                criterion: "substitute_screen".into(),
                models: vec![v.clone(), p.clone()],
                values: vec![
                    fmt(f.forward_rate),
                    fmt(f.reverse_rate),
                    fmt(f.affected_fraction),
                    fmt(importance),
                ],
                outcome: outcome.into(),
            });
        }
    }
    trail.push(TrailStep {
        criterion: "no_proxy_summary".into(),
        models: vec![spec.id.clone()],
        values: vec![violations.len().to_string()],
        outcome: if violations.is_empty() {
            "clean".into()
        } else {
            format!("{} violation(s)", violations.len())
        },
    });

    Ok(Verdict {
        rule: Rule::NoProxy,
        winner: "tie".into(),
        margins: Margins::zero(),
        trail,
        violations,
    })
}

/// Margins of `winner` over `runner`, oriented so positive favors the
/// winner.
fn margins_between(winner: &ScoredModel, runner: &ScoredModel) -> Margins {
    Margins {
        accuracy_gap: accuracy_advantage(&winner.accuracy, &runner.accuracy),
        proxy_gap: runner.average_proxy_power - winner.average_proxy_power,
        variable_count_gap: runner.predictor_count as i64 - winner.predictor_count as i64,
    }
}

/// Selects the less discriminatory alternative: among models whose
/// accuracy is within the equivalence band of the best, the one with the
/// lowest average proxy power wins; proxy ties within
/// [`PROXY_TIE_TOLERANCE`] fall through to [`lexicographic_compare`].
///
/// All models must share one outcome and family. With a lock-box split,
/// fitting uses only the fitting rows and every score comes from the
/// held-out rows.
pub fn compare_min_proxy_power(
    d: &Dataset,
    split: Option<&LockBoxSplit>,
    specs: &[ModelSpec],
    policy: &Policy,
) -> Result<Verdict> {
    policy.validate()?;
    if specs.len() < 2 {
        return Err(Error::InvalidSpec {
            message: "comparison needs at least two models".into(),
        });
    }
    for s in specs {
        if s.outcome != specs[0].outcome || s.family != specs[0].family {
            return Err(Error::InvalidSpec {
                message: format!(
                    "models must share one outcome and family to be compared \
                     ({:?} differs from {:?})",
                    s.id, specs[0].id
                ),
            });
        }
    }
    let scored: Vec<ScoredModel> = specs
        .iter()
        .map(|s| score_model(d, split, s, policy))
        .collect::<Result<_>>()?;
    rank_scored(&scored, policy, Rule::MinProxy)
}

/// The ranking core shared with the competition harness: band filter on
/// accuracy, minimum proxy power, lexicographic tie-break.
pub(crate) fn rank_scored(
    scored: &[ScoredModel],
    policy: &Policy,
    rule: Rule,
) -> Result<Verdict> {
    let mut trail = Vec::new();

    // Best accuracy in goodness terms; every model is compared to it.
    let best = scored
        .iter()
        .max_by(|a, b| {
            accuracy_advantage(&a.accuracy, &b.accuracy)
                .partial_cmp(&0.0)
                .expect("finite accuracy")
        })
        .expect("non-empty");
    for pair in scored.windows(2) {
        check_comparable(&pair[0], &pair[1])?;
    }

    let mut candidates: Vec<&ScoredModel> = Vec::new();
    for m in scored {
        let gap = accuracy_advantage(&best.accuracy, &m.accuracy);
        let included = gap <= policy.equivalence_band;
        if included {
            candidates.push(m);
        }
        trail.push(TrailStep {
            criterion: "accuracy_within_band".into(),
            models: vec![m.model_id.clone()],
            values: vec![fmt(m.accuracy.value), fmt(gap), fmt(policy.equivalence_band)],
            outcome: if included {
                "practically equivalent".into()
            } else {
                "excluded — outside equivalence band".into()
            },
        });
    }

    let min_pp = candidates
        .iter()
        .map(|m| m.average_proxy_power)
        .fold(f64::INFINITY, f64::min);
    let mut tied: Vec<&ScoredModel> = candidates
        .iter()
        .copied()
        .filter(|m| m.average_proxy_power <= min_pp + PROXY_TIE_TOLERANCE)
        .collect();
    trail.push(TrailStep {
        criterion: "min_average_proxy_power".into(),
        models: candidates.iter().map(|m| m.model_id.clone()).collect(),
        values: candidates
            .iter()
            .map(|m| fmt(m.average_proxy_power))
            .collect(),
        outcome: format!(
            "minimum {} shared by {} model(s)",
            fmt(min_pp),
            tied.len()
        ),
    });

    tied.sort_by(|a, b| decide(a, b, policy).expect("validated above").0);
    let winner_model = tied[0];
    let winner = if tied.len() >= 2 {
        let (ord, criterion) = decide(tied[0], tied[1], policy)?;
        trail.push(TrailStep {
            criterion: format!("tiebreak_{criterion}"),
            models: vec![tied[0].model_id.clone(), tied[1].model_id.clone()],
            values: vec![],
            outcome: if ord == Ordering::Equal {
                "indistinguishable — tie".into()
            } else {
                format!("{:?} ranks first", tied[0].model_id)
            },
        });
        if ord == Ordering::Equal {
            "tie".to_string()
        } else {
            tied[0].model_id.clone()
        }
    } else {
        winner_model.model_id.clone()
    };

    // Runner-up for the margins: the best of the rest, or the co-winner.
    let runner = if tied.len() >= 2 {
        Some(tied[1])
    } else {
        let mut rest: Vec<&ScoredModel> = scored
            .iter()
            .filter(|m| !std::ptr::eq(*m, winner_model))
            .collect();
        rest.sort_by(|a, b| decide(a, b, policy).expect("validated above").0);
        rest.first().copied()
    };
    let margins = runner
        .map(|r| margins_between(winner_model, r))
        .unwrap_or_else(Margins::zero);

    Ok(Verdict {
        rule,
        winner,
        margins,
        trail,
        violations: Vec::new(),
    })
}

/// One model's semi-partial proxy power, for [`capped_rule`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CappedMeasurement {
    pub model_id: String,
    pub semi_partial: f64,
}

/// Applies a fixed proxy-power cap: models at or below the cap are all
/// compliant and mutually tied; when any model exceeds it, the lowest
/// measurement wins and every over-cap model is flagged.
pub fn capped_rule(measurements: &[CappedMeasurement], policy: &Policy) -> Result<Verdict> {
    policy.validate()?;
    let cap = policy.cap.unwrap_or(DEFAULT_CAP);
    if measurements.is_empty() {
        return Err(Error::InvalidSpec {
            message: "capped rule needs at least one measurement".into(),
        });
    }
    for m in measurements {
        if !m.semi_partial.is_finite() {
            return Err(Error::InvalidSpec {
                message: format!("non-finite measurement for model {:?}", m.model_id),
            });
        }
    }

    let mut trail = Vec::new();
    let mut violations = Vec::new();
    for m in measurements {
        let compliant = m.semi_partial <= cap;
        if !compliant {
            violations.push(Violation {
                subject: m.model_id.clone(),
                kind: "over_cap".into(),
                message: format!(
                    "proxy power {} exceeds the cap {}",
                    fmt(m.semi_partial),
                    fmt(cap)
                ),
            });
        }
        trail.push(TrailStep {
            criterion: "cap_threshold".into(),
            models: vec![m.model_id.clone()],
            values: vec![fmt(m.semi_partial), fmt(cap)],
            outcome: if compliant {
                "compliant".into()
            } else {
                "over cap".into()
            },
        });
    }

    // Order by measurement, id as the determinism floor.
    let mut ranked: Vec<&CappedMeasurement> = measurements.iter().collect();
    ranked.sort_by(|a, b| {
        a.semi_partial
            .partial_cmp(&b.semi_partial)
            .expect("finite")
            .then_with(|| a.model_id.cmp(&b.model_id))
    });
    let winner = if violations.is_empty() {
        trail.push(TrailStep {
            criterion: "cap_verdict".into(),
            models: measurements.iter().map(|m| m.model_id.clone()).collect(),
            values: vec![],
            outcome: "all compliant — differences under the cap are ignored".into(),
        });
        "tie".to_string()
    } else {
        trail.push(TrailStep {
            criterion: "cap_verdict".into(),
            models: vec![ranked[0].model_id.clone()],
            values: vec![fmt(ranked[0].semi_partial)],
            outcome: format!("{:?} has the lowest proxy power", ranked[0].model_id),
        });
        ranked[0].model_id.clone()
    };
    let margins = if ranked.len() >= 2 {
        Margins {
            accuracy_gap: 0.0,
            proxy_gap: ranked[1].semi_partial - ranked[0].semi_partial,
            variable_count_gap: 0,
        }
    } else {
        Margins::zero()
    };

    Ok(Verdict {
        rule: Rule::Capped,
        winner,
        margins,
        trail,
        violations,
    })
}

/// Selection-rate screening of binary decisions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    /// Protected-group selection rate over comparison-group selection rate.
    pub selection_rate_ratio: f64,
    pub protected_rate: f64,
    pub comparison_rate: f64,
    /// Which significance test ran (Fisher exact when any expected cell is
    /// below five, otherwise chi-square).
    pub test: TestKind,
    /// Chi-square statistic; absent on the Fisher path and when no test
    /// could run.
    pub statistic: Option<f64>,
    pub p_value: f64,
    /// True when the ratio falls below four fifths.
    pub flagged: bool,
    pub caveat: String,
    /// Present when the significance test was vacuous (e.g. everyone
    /// selected).
    pub note: Option<String>,
}

/// Four-fifths screening of `selected` outcomes against membership in a
/// protected group (`group[i] = true` means protected).
pub fn disparate_impact_screen(selected: &[bool], group: &[bool]) -> Result<ScreeningReport> {
    if selected.len() != group.len() {
        return Err(Error::InvalidSpec {
            message: format!(
                "selection series has {} rows but group series has {}",
                selected.len(),
                group.len()
            ),
        });
    }
    let ratio = crate::stats::selection_rate_ratio(selected, group)?;
    let mut counts = [[0u64; 2]; 2]; // [group][selected]
    for (&s, &g) in selected.iter().zip(group) {
        counts[g as usize][s as usize] += 1;
    }
    let protected_total = counts[1][0] + counts[1][1];
    let comparison_total = counts[0][0] + counts[0][1];
    let protected_rate = counts[1][1] as f64 / protected_total as f64;
    let comparison_rate = counts[0][1] as f64 / comparison_total as f64;

    let selected_total = counts[0][1] + counts[1][1];
    let rejected_total = counts[0][0] + counts[1][0];
    let (test, statistic, p_value, note) = if selected_total == 0 || rejected_total == 0 {
        (
            TestKind::ChiSquare,
            None,
            1.0,
            Some("every row shares one selection outcome; no significance test ran".to_string()),
        )
    } else {
        let table = ContingencyTable::new(
            vec!["comparison".into(), "protected".into()],
            vec!["rejected".into(), "selected".into()],
            vec![counts[0][0], counts[0][1], counts[1][0], counts[1][1]],
        )?;
        if table.min_expected() < 5.0 {
            let p = crate::stats::fisher_exact_2x2(&table)?;
            (TestKind::FisherExact, None, p, None)
        } else {
            let stat = table.chi_square();
            let df = (table.n_rows() - 1) * (table.n_cols() - 1);
            let p = crate::stats::special::chi2_sf(stat, df as f64);
            (TestKind::ChiSquare, Some(stat), p, None)
        }
    };

    Ok(ScreeningReport {
        selection_rate_ratio: ratio,
        protected_rate,
        comparison_rate,
        test,
        statistic,
        p_value,
        flagged: ratio < FOUR_FIFTHS_RATIO,
        caveat: FOUR_FIFTHS_CAVEAT.into(),
        note,
    })
}
