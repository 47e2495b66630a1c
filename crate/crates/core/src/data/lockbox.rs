//! Held-out "lock box" splits with tamper-evident digests.
//!
//! A lock-box split reserves a seeded random subset of rows for evaluation.
//! The split commits to the held-out rows by hashing their canonical byte
//! rendering, so any later substitution of the evaluation data — swapping
//! rows, editing cells, re-deriving a friendlier split — is detectable by
//! anyone holding the digest.
//!
//! The shuffle draws from the named substream `(seed, "lockbox")` of the
//! crate's documented PRNG (see [`crate::rng`]), making splits reproducible
//! from the seed alone.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::Dataset;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

/// A train/test partition plus a digest of the held-out rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LockBoxSplit {
    pub seed: u64,
    pub test_fraction: f64,
    /// Fitting rows, ascending.
    pub train_indices: Vec<usize>,
    /// Held-out rows, ascending.
    pub test_indices: Vec<usize>,
    /// SHA-256 (hex) over the canonical rendering of the held-out rows, in
    /// ascending original order, without a header.
    pub digest: String,
}

/// Splits `d` into fitting and held-out rows.
///
/// The held-out size is `round(n * test_fraction)`, clamped so both sides
/// keep at least one row. `test_fraction` must lie strictly between 0 and 1.
pub fn lockbox_split(d: &Dataset, test_fraction: f64, seed: u64) -> Result<LockBoxSplit> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidFraction {
            value: test_fraction,
        });
    }
    let n = d.n_rows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let k = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);

    let mut order: Vec<usize> = (0..n).collect();
    SplitMix64::for_column(seed, "lockbox").shuffle(&mut order);
    let mut test_indices: Vec<usize> = order[..k].to_vec();
    let mut train_indices: Vec<usize> = order[k..].to_vec();
    test_indices.sort_unstable();
    train_indices.sort_unstable();

    let digest = rows_digest(d, &test_indices);
    Ok(LockBoxSplit {
        seed,
        test_fraction,
        train_indices,
        test_indices,
        digest,
    })
}

/// SHA-256 (hex) over the canonical rendering of the given rows, in the
/// given order. See [`Dataset::canonical_row`] internals: numeric cells as
/// `{:.16e}`, labels CSV-quoted, comma-joined, `\n` per row, no header.
pub fn rows_digest(d: &Dataset, indices: &[usize]) -> String {
    let mut h = Sha256::new();
    for &i in indices {
        h.update(d.canonical_row(i).as_bytes());
    }
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

impl LockBoxSplit {
    /// Confirms that `d`'s held-out rows still hash to the committed digest.
    pub fn verify_against(&self, d: &Dataset) -> Result<()> {
        if self.test_indices.iter().any(|&i| i >= d.n_rows()) {
            return Err(Error::InvalidSpec {
                message: "lock-box indices out of range for this dataset".into(),
            });
        }
        let actual = rows_digest(d, &self.test_indices);
        if actual != self.digest {
            return Err(Error::DigestMismatch {
                expected: self.digest.clone(),
                actual,
            });
        }
        Ok(())
    }

    /// The held-out rows as a dataset.
    pub fn test_set(&self, d: &Dataset) -> Dataset {
        d.subset(&self.test_indices)
    }

    /// The fitting rows as a dataset.
    pub fn train_set(&self, d: &Dataset) -> Dataset {
        d.subset(&self.train_indices)
    }
}
