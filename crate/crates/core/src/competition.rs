//! Lock-box model competition with pre-commitment.
//!
//! The protocol: hold out a test set whose content is pinned by a digest
//! (the "lock box"), let each party submit a model specification —
//! optionally pre-committed as a hash before data is seen — then fit every
//! submission on the fitting rows only and score accuracy and proxy power
//! on the held-out rows only. The ranking is the deterministic
//! lexicographic order from [`crate::rules`], with the party name as a
//! final tie-break so a winner always exists.
//!
//! Pre-commitment makes retrofitting visible: a party that "tunes" its
//! specification after seeing results can no longer reproduce the digest it
//! committed to, and is disqualified rather than rescored.
//!
//! [`run_opaque_competition`] is the degraded variant for parties that
//! submit bare predictions instead of auditable specifications: proxy
//! power is unmeasurable, so models compete on accuracy and selection-rate
//! balance alone.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::data::lockbox::LockBoxSplit;
use crate::data::{sha256_hex, ColumnKind, Dataset, Role};
use crate::error::Error;
use crate::glm::{Accuracy, ModelSpec, Orientation};
use crate::proxy;
use crate::rules::{self, Policy, ScoredModel, TrailStep};
use crate::Result;

/// A hash pinned to one model specification before scoring.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Commitment {
    pub model_id: String,
    /// SHA-256 of the canonical specification serialization, hex-encoded.
    pub digest: String,
    /// When the commitment was made (RFC 3339).
    pub timestamp: String,
}

/// One party's entry in a competition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Submission {
    pub party: String,
    pub spec: ModelSpec,
    pub commitment: Option<Commitment>,
}

/// A scored, ranked entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    pub party: String,
    pub model_id: String,
    pub accuracy: Accuracy,
    pub average_proxy_power: f64,
    pub predictor_count: usize,
}

/// A submission that could not be scored, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disqualification {
    pub party: String,
    pub model_id: String,
    pub reason: String,
}

/// Outcome of a competition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompetitionResult {
    /// Digest of the held-out rows the scores were measured on.
    pub lockbox_digest: String,
    /// Best first.
    pub ranked: Vec<RankedEntry>,
    /// Winning party.
    pub winner: String,
    /// Adjacent-pair comparison records for the final ranking.
    pub trail: Vec<TrailStep>,
    pub disqualified: Vec<Disqualification>,
}

/// Canonical serialization a commitment digest is computed over: UTF-8
/// JSON with keys in sorted order, the predictor list sorted, and no
/// whitespace. Reordering predictors does not change the digest; renaming
/// anything does.
pub fn canonical_spec_json(spec: &ModelSpec) -> String {
    let mut predictors = spec.predictors.clone();
    predictors.sort();
    // serde_json maps are sorted by key, so this serializes canonically.
    json!({
        "family": spec.family,
        "id": spec.id,
        "outcome": spec.outcome,
        "predictors": predictors,
    })
    .to_string()
}

fn spec_digest(spec: &ModelSpec) -> String {
    sha256_hex(canonical_spec_json(spec).as_bytes())
}

/// Commits to a model specification: SHA-256 over [`canonical_spec_json`],
/// stamped with the current UTC time.
pub fn commit_model(spec: &ModelSpec) -> Result<Commitment> {
    spec.validate()?;
    Ok(Commitment {
        model_id: spec.id.clone(),
        digest: spec_digest(spec),
        timestamp: chrono::Utc::now().to_rfc3339(),
    })
}

/// True iff the specification reproduces the committed digest. The digest
/// covers the model id, family, outcome, and (sorted) predictors, so any
/// retrofit of those is detected; the timestamp is informational.
pub fn verify_commitment(spec: &ModelSpec, c: &Commitment) -> bool {
    spec_digest(spec) == c.digest
}

/// Runs the lock-box competition over `d` (the full dataset the split
/// indexes into).
///
/// Submissions with a commitment are verified first; failures disqualify.
/// Each surviving specification is fitted on the fitting rows only and
/// scored on the held-out rows only. Requires at least two submissions
/// with distinct party names, sharing one outcome and family.
pub fn run_competition(
    d: &Dataset,
    split: &LockBoxSplit,
    submissions: &[Submission],
    policy: &Policy,
) -> Result<CompetitionResult> {
    policy.validate()?;
    proxy::check_protected(d, &policy.protected)?;
    split.verify_against(d)?;
    if submissions.len() < 2 {
        return Err(Error::InvalidSpec {
            message: "a competition needs at least two submissions".into(),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for s in submissions {
        if !seen.insert(s.party.as_str()) {
            return Err(Error::InvalidSpec {
                message: format!("duplicate party name {:?}", s.party),
            });
        }
        if s.spec.outcome != submissions[0].spec.outcome
            || s.spec.family != submissions[0].spec.family
        {
            return Err(Error::InvalidSpec {
                message: format!(
                    "all submissions must share one outcome and family; \
                     {:?} differs from {:?}",
                    s.party, submissions[0].party
                ),
            });
        }
    }

    let mut disqualified = Vec::new();
    let mut scored: Vec<(String, ScoredModel)> = Vec::new();
    for sub in submissions {
        if let Some(c) = &sub.commitment {
            if !verify_commitment(&sub.spec, c) {
                disqualified.push(Disqualification {
                    party: sub.party.clone(),
                    model_id: sub.spec.id.clone(),
                    reason: format!(
                        "retrofit suspected — commitment mismatch \
                         (committed {}, specification hashes to {})",
                        c.digest,
                        spec_digest(&sub.spec)
                    ),
                });
                continue;
            }
        }
        match rules::score_model(d, Some(split), &sub.spec, policy) {
            Ok(s) => scored.push((sub.party.clone(), s)),
            Err(e) => disqualified.push(Disqualification {
                party: sub.party.clone(),
                model_id: sub.spec.id.clone(),
                reason: format!("scoring failed: {e}"),
            }),
        }
    }
    if scored.is_empty() {
        return Err(Error::Degenerate {
            message: "no submission survived scoring".into(),
        });
    }

    // Total order: the lexicographic rule, then the party name.
    scored.sort_by(|(pa, a), (pb, b)| {
        rules::lexicographic_compare(a, b, policy)
            .expect("scores validated during scoring")
            .then_with(|| pa.cmp(pb))
    });

    let mut trail = Vec::new();
    for pair in scored.windows(2) {
        let (ref pa, ref a) = pair[0];
        let (ref pb, ref b) = pair[1];
        let (ord, decided_by) = rules::decide(a, b, policy)?;
        let criterion = if ord == std::cmp::Ordering::Equal {
            "party_name"
        } else {
            decided_by
        };
        trail.push(TrailStep {
            criterion: criterion.into(),
            models: vec![
                format!("{pa}/{}", a.model_id),
                format!("{pb}/{}", b.model_id),
            ],
            values: vec![
                format!("{:.6}", a.accuracy.value),
                format!("{:.6}", b.accuracy.value),
                format!("{:.6}", a.average_proxy_power),
                format!("{:.6}", b.average_proxy_power),
            ],
            outcome: format!("{pa:?} ranks ahead of {pb:?}"),
        });
    }
    if trail.is_empty() {
        trail.push(TrailStep {
            criterion: "sole_survivor".into(),
            models: vec![scored[0].0.clone()],
            values: vec![],
            outcome: "only one submission survived scoring".into(),
        });
    }

    let ranked: Vec<RankedEntry> = scored
        .iter()
        .map(|(party, s)| RankedEntry {
            party: party.clone(),
            model_id: s.model_id.clone(),
            accuracy: s.accuracy,
            average_proxy_power: s.average_proxy_power,
            predictor_count: s.predictor_count,
        })
        .collect();

    Ok(CompetitionResult {
        lockbox_digest: split.digest.clone(),
        winner: ranked[0].party.clone(),
        ranked,
        trail,
        disqualified,
    })
}

/// One party's bare predictions, aligned with the full dataset's rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaqueSubmission {
    pub party: String,
    pub predictions: Vec<f64>,
}

/// A ranked opaque entry: accuracy plus the selection-rate screen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaqueEntry {
    pub party: String,
    pub accuracy: Accuracy,
    pub selection_rate_ratio: f64,
    /// min(ratio, 1/ratio): 1.0 is perfectly balanced selection.
    pub balance: f64,
    pub flagged: bool,
}

/// Outcome of an opaque (predictions-only) competition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpaqueResult {
    pub lockbox_digest: String,
    pub ranked: Vec<OpaqueEntry>,
    pub winner: String,
    /// Always "unmeasurable": without the specification there is nothing
    /// to decompose.
    pub proxy_power: String,
    pub trail: Vec<TrailStep>,
}

/// Scores prediction-only submissions on the lock-box rows: accuracy at
/// the 0.5 threshold against a binary outcome, then selection-rate balance
/// against the binary protected column `group`, then party name.
///
/// Proxy power cannot be measured without the model's insides; the result
/// says so rather than reporting zero.
pub fn run_opaque_competition(
    d: &Dataset,
    split: &LockBoxSplit,
    submissions: &[OpaqueSubmission],
    group: &str,
) -> Result<OpaqueResult> {
    split.verify_against(d)?;
    if submissions.len() < 2 {
        return Err(Error::InvalidSpec {
            message: "a competition needs at least two submissions".into(),
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for s in submissions {
        if !seen.insert(s.party.as_str()) {
            return Err(Error::InvalidSpec {
                message: format!("duplicate party name {:?}", s.party),
            });
        }
        if s.predictions.len() != d.n_rows() {
            return Err(Error::InvalidSpec {
                message: format!(
                    "party {:?} submitted {} predictions for {} rows",
                    s.party,
                    s.predictions.len(),
                    d.n_rows()
                ),
            });
        }
        if s.predictions.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidSpec {
                message: format!("party {:?} submitted non-finite predictions", s.party),
            });
        }
    }
    let outcome_decl = d.schema().outcome()?;
    if outcome_decl.kind != ColumnKind::Binary {
        return Err(Error::KindMismatch {
            column: outcome_decl.name.clone(),
            message: "opaque competitions need a binary outcome".into(),
        });
    }
    let group_decl = d.column_schema(group)?;
    if group_decl.role != Role::Protected {
        return Err(Error::RoleMismatch {
            column: group.into(),
            actual: group_decl.role.as_str().into(),
            expected: "protected".into(),
        });
    }
    if group_decl.kind != ColumnKind::Binary {
        return Err(Error::KindMismatch {
            column: group.into(),
            message: "the selection-rate screen needs a binary protected column".into(),
        });
    }

    let outcome = d.binary_as_bool(&outcome_decl.name)?;
    let group_vals = d.binary_as_bool(group)?;
    let test = &split.test_indices;

    let mut entries: Vec<OpaqueEntry> = Vec::with_capacity(submissions.len());
    for s in submissions {
        let selected: Vec<bool> = test.iter().map(|&i| s.predictions[i] >= 0.5).collect();
        let truth: Vec<bool> = test.iter().map(|&i| outcome[i]).collect();
        let grp: Vec<bool> = test.iter().map(|&i| group_vals[i]).collect();
        let hits = selected.iter().zip(&truth).filter(|(a, b)| a == b).count();
        let screen = rules::disparate_impact_screen(&selected, &grp)?;
        entries.push(OpaqueEntry {
            party: s.party.clone(),
            accuracy: Accuracy {
                value: hits as f64 / test.len() as f64,
                orientation: Orientation::HigherIsBetter,
            },
            selection_rate_ratio: screen.selection_rate_ratio,
            balance: screen
                .selection_rate_ratio
                .min(1.0 / screen.selection_rate_ratio),
            flagged: screen.flagged,
        });
    }

    entries.sort_by(|a, b| {
        b.accuracy
            .value
            .partial_cmp(&a.accuracy.value)
            .expect("finite")
            .then_with(|| b.balance.partial_cmp(&a.balance).expect("finite"))
            .then_with(|| a.party.cmp(&b.party))
    });

    let mut trail = Vec::new();
    for pair in entries.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let criterion = if a.accuracy.value != b.accuracy.value {
            "accuracy"
        } else if a.balance != b.balance {
            "selection_balance"
        } else {
            "party_name"
        };
        trail.push(TrailStep {
            criterion: criterion.into(),
            models: vec![a.party.clone(), b.party.clone()],
            values: vec![
                format!("{:.6}", a.accuracy.value),
                format!("{:.6}", b.accuracy.value),
                format!("{:.6}", a.balance),
                format!("{:.6}", b.balance),
            ],
            outcome: format!("{:?} ranks ahead of {:?}", a.party, b.party),
        });
    }

    Ok(OpaqueResult {
        lockbox_digest: split.digest.clone(),
        winner: entries[0].party.clone(),
        ranked: entries,
        proxy_power: "unmeasurable".into(),
        trail,
    })
}
