//! Association measures with significance tests.
//!
//! Every measure returns an [`AssociationResult`] pairing the effect size
//! with its test statistic and p-value, so callers never report a
//! correlation without the evidence behind it. Measure selection for a pair
//! of columns follows the column kinds (see [`assoc_auto`]):
//!
//! - continuous × continuous → Pearson r, Student t test;
//! - continuous × (binary or categorical) → correlation ratio, ANOVA F;
//! - (binary or categorical) × same → Cramér's V, chi-square (no continuity
//!   correction).
//!
//! The 2×2 Fisher test is exact: for tables with up to 100 observations the
//! hypergeometric enumeration runs entirely in 128-bit integers, so tail
//! membership (`P(table) ≤ P(observed)`) is decided without any floating
//! point. Larger tables fall back to log-gamma arithmetic with a relative
//! slack of 1e-9 on the inclusion rule.

pub mod special;

use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Dataset};
use crate::error::Error;
use crate::Result;

/// Effect-size family of an [`AssociationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    PearsonR,
    CramersV,
    CorrelationRatio,
    MeanDifference,
}

/// Significance test attached to an [`AssociationResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    StudentT,
    ChiSquare,
    AnovaF,
    WelchT,
    FisherExact,
}

/// An effect size together with its significance test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub measure: Measure,
    pub value: f64,
    pub test: TestKind,
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Pearson correlation with a two-sided Student t test (df = n − 2).
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<AssociationResult> {
    if x.len() != y.len() {
        return Err(Error::InvalidSpec {
            message: format!("length mismatch: {} vs {}", x.len(), y.len()),
        });
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::TooFewRows { needed: 3, got: n });
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate {
            message: "constant input; correlation undefined".into(),
        });
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    let df = nf - 2.0;
    let (statistic, p_value) = if r.abs() == 1.0 {
        (f64::INFINITY * r.signum(), 0.0)
    } else {
        let t = r * (df / (1.0 - r * r)).sqrt();
        (t, special::t_sf_two_sided(t, df))
    };
    Ok(AssociationResult {
        measure: Measure::PearsonR,
        value: r,
        test: TestKind::StudentT,
        statistic,
        p_value,
        n,
    })
}

/// A cross-tabulation of two discrete columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContingencyTable {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    /// Row-major counts, `row_labels.len() * col_labels.len()`.
    pub counts: Vec<u64>,
}

impl ContingencyTable {
    /// Builds a table, requiring at least 2×2 dimensions and a positive
    /// total in every row and column.
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        counts: Vec<u64>,
    ) -> Result<ContingencyTable> {
        let (r, c) = (row_labels.len(), col_labels.len());
        if r < 2 || c < 2 {
            return Err(Error::Degenerate {
                message: "contingency table needs at least two levels per side".into(),
            });
        }
        if counts.len() != r * c {
            return Err(Error::InvalidSpec {
                message: format!("expected {} counts, got {}", r * c, counts.len()),
            });
        }
        let t = ContingencyTable {
            row_labels,
            col_labels,
            counts,
        };
        if t.row_sums().iter().any(|&s| s == 0) || t.col_sums().iter().any(|&s| s == 0) {
            return Err(Error::Degenerate {
                message: "contingency table has an empty row or column".into(),
            });
        }
        Ok(t)
    }

    /// Cross-tabulates two binary/categorical columns, keeping only levels
    /// actually observed (sorted), and requires at least two observed levels
    /// on each side.
    pub fn from_columns(d: &Dataset, a: &str, b: &str) -> Result<ContingencyTable> {
        let ka = d.group_keys(a)?;
        let kb = d.group_keys(b)?;
        let mut cell_counts: std::collections::BTreeMap<(String, String), u64> =
            std::collections::BTreeMap::new();
        for (x, y) in ka.iter().zip(&kb) {
            *cell_counts.entry((x.clone(), y.clone())).or_insert(0) += 1;
        }
        let row_labels: Vec<String> = {
            let set: std::collections::BTreeSet<&String> =
                cell_counts.keys().map(|(x, _)| x).collect();
            set.into_iter().cloned().collect()
        };
        let col_labels: Vec<String> = {
            let set: std::collections::BTreeSet<&String> =
                cell_counts.keys().map(|(_, y)| y).collect();
            set.into_iter().cloned().collect()
        };
        if row_labels.len() < 2 || col_labels.len() < 2 {
            return Err(Error::Degenerate {
                message: format!(
                    "cross-tab of {a:?} by {b:?} needs two observed levels per side"
                ),
            });
        }
        let mut counts = vec![0u64; row_labels.len() * col_labels.len()];
        for ((x, y), count) in cell_counts {
            let i = row_labels.iter().position(|l| *l == x).unwrap();
            let j = col_labels.iter().position(|l| *l == y).unwrap();
            counts[i * col_labels.len() + j] = count;
        }
        ContingencyTable::new(row_labels, col_labels, counts)
    }

    pub fn n_rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        let c = self.n_cols();
        self.counts.chunks(c).map(|row| row.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let c = self.n_cols();
        let mut sums = vec![0u64; c];
        for (i, count) in self.counts.iter().enumerate() {
            sums[i % c] += count;
        }
        sums
    }

    /// Pearson chi-square statistic (no continuity correction).
    pub fn chi_square(&self) -> f64 {
        let total = self.total() as f64;
        let rows = self.row_sums();
        let cols = self.col_sums();
        let mut chi2 = 0.0;
        for i in 0..self.n_rows() {
            for j in 0..self.n_cols() {
                let expected = rows[i] as f64 * cols[j] as f64 / total;
                let observed = self.counts[i * self.n_cols() + j] as f64;
                chi2 += (observed - expected) * (observed - expected) / expected;
            }
        }
        chi2
    }

    /// Smallest expected cell count under independence.
    pub fn min_expected(&self) -> f64 {
        let total = self.total() as f64;
        let rows = self.row_sums();
        let cols = self.col_sums();
        let mut min = f64::INFINITY;
        for &r in &rows {
            for &c in &cols {
                min = min.min(r as f64 * c as f64 / total);
            }
        }
        min
    }
}

/// Cramér's V with a chi-square test, df = (r−1)(c−1).
pub fn cramers_v(table: &ContingencyTable) -> Result<AssociationResult> {
    let chi2 = table.chi_square();
    let n = table.total() as f64;
    let k = (table.n_rows().min(table.n_cols()) - 1) as f64;
    let v = (chi2 / (n * k)).sqrt().clamp(0.0, 1.0);
    let df = ((table.n_rows() - 1) * (table.n_cols() - 1)) as f64;
    Ok(AssociationResult {
        measure: Measure::CramersV,
        value: v,
        test: TestKind::ChiSquare,
        statistic: chi2,
        p_value: special::chi2_sf(chi2, df),
        n: table.total() as usize,
    })
}

/// Correlation ratio (eta) of `values` across discrete `groups`, with a
/// one-way ANOVA F test. Perfect separation (zero within-group variance)
/// reports an infinite F and p = 0.
pub fn correlation_ratio(groups: &[&str], values: &[f64]) -> Result<AssociationResult> {
    if groups.len() != values.len() {
        return Err(Error::InvalidSpec {
            message: format!("length mismatch: {} vs {}", groups.len(), values.len()),
        });
    }
    let n = values.len();
    if n < 3 {
        return Err(Error::TooFewRows { needed: 3, got: n });
    }
    let mut by_group: std::collections::BTreeMap<&str, (usize, f64)> =
        std::collections::BTreeMap::new();
    for (&g, &v) in groups.iter().zip(values) {
        let e = by_group.entry(g).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += v;
    }
    let k = by_group.len();
    if k < 2 {
        return Err(Error::Degenerate {
            message: "grouping has a single level; correlation ratio undefined".into(),
        });
    }
    if k >= n {
        return Err(Error::Degenerate {
            message: "no within-group degrees of freedom".into(),
        });
    }
    let grand_mean = values.iter().sum::<f64>() / n as f64;
    let sst: f64 = values
        .iter()
        .map(|v| (v - grand_mean) * (v - grand_mean))
        .sum();
    if sst == 0.0 {
        return Err(Error::Degenerate {
            message: "constant values; correlation ratio undefined".into(),
        });
    }
    let ssb: f64 = by_group
        .values()
        .map(|&(count, sum)| {
            let gm = sum / count as f64;
            count as f64 * (gm - grand_mean) * (gm - grand_mean)
        })
        .sum();
    let eta = (ssb / sst).sqrt().clamp(0.0, 1.0);
    let ssw = (sst - ssb).max(0.0);
    let df1 = (k - 1) as f64;
    let df2 = (n - k) as f64;
    let (statistic, p_value) = if ssw == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = (ssb / df1) / (ssw / df2);
        (f, special::f_sf(f, df1, df2))
    };
    Ok(AssociationResult {
        measure: Measure::CorrelationRatio,
        value: eta,
        test: TestKind::AnovaF,
        statistic,
        p_value,
        n,
    })
}

/// Welch two-sample t test; `value` is the mean difference `x̄ − ȳ`.
pub fn two_sample_t(x: &[f64], y: &[f64]) -> Result<AssociationResult> {
    if x.len() < 2 || y.len() < 2 {
        return Err(Error::TooFewRows {
            needed: 2,
            got: x.len().min(y.len()),
        });
    }
    let (nx, ny) = (x.len() as f64, y.len() as f64);
    let mx = x.iter().sum::<f64>() / nx;
    let my = y.iter().sum::<f64>() / ny;
    let vx = x.iter().map(|v| (v - mx) * (v - mx)).sum::<f64>() / (nx - 1.0);
    let vy = y.iter().map(|v| (v - my) * (v - my)).sum::<f64>() / (ny - 1.0);
    let se2 = vx / nx + vy / ny;
    if se2 == 0.0 {
        return Err(Error::Degenerate {
            message: "both samples constant; t statistic undefined".into(),
        });
    }
    let t = (mx - my) / se2.sqrt();
    let df = se2 * se2
        / ((vx / nx) * (vx / nx) / (nx - 1.0) + (vy / ny) * (vy / ny) / (ny - 1.0));
    Ok(AssociationResult {
        measure: Measure::MeanDifference,
        value: mx - my,
        test: TestKind::WelchT,
        statistic: t,
        p_value: special::t_sf_two_sided(t, df),
        n: x.len() + y.len(),
    })
}

/// Exact binomial coefficient in 128-bit arithmetic. Intermediate products
/// stay below u128::MAX for n ≤ 100 (the exact-path limit of
/// [`fisher_exact_2x2`]).
fn binom_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 1..=k {
        result = result * (n - k + i) as u128 / i as u128;
    }
    result
}

/// Two-sided Fisher exact test for a 2×2 table.
///
/// Enumerates the hypergeometric distribution over all tables with the
/// observed margins and sums the probability of every table no more likely
/// than the observed one. With at most 100 observations the tail-inclusion
/// comparison is done in exact integer arithmetic; beyond that, log-gamma
/// probabilities are compared with a 1e-9 relative slack.
pub fn fisher_exact_2x2(table: &ContingencyTable) -> Result<f64> {
    if table.n_rows() != 2 || table.n_cols() != 2 {
        return Err(Error::InvalidSpec {
            message: "Fisher exact test requires a 2×2 table".into(),
        });
    }
    let a_obs = table.counts[0];
    let r1 = table.counts[0] + table.counts[1];
    let r2 = table.counts[2] + table.counts[3];
    let c1 = table.counts[0] + table.counts[2];
    let n = r1 + r2;

    let a_min = c1.saturating_sub(r2);
    let a_max = r1.min(c1);

    if n <= 100 {
        // Exact path: the probability of table `a` is proportional to
        // N(a) = C(r1, a) · C(r2, c1 − a); compare numerators directly.
        let num = |a: u64| binom_u128(r1, a) * binom_u128(r2, c1 - a);
        let n_obs = num(a_obs);
        let denom = binom_u128(n, c1);
        let mut tail: u128 = 0;
        for a in a_min..=a_max {
            let na = num(a);
            if na <= n_obs {
                tail += na;
            }
        }
        Ok(tail as f64 / denom as f64)
    } else {
        let ln_num = |a: u64| {
            let a = a as f64;
            let (r1, r2, c1) = (r1 as f64, r2 as f64, c1 as f64);
            special::ln_gamma(r1 + 1.0) - special::ln_gamma(a + 1.0)
                - special::ln_gamma(r1 - a + 1.0)
                + special::ln_gamma(r2 + 1.0)
                - special::ln_gamma(c1 - a + 1.0)
                - special::ln_gamma(r2 - (c1 - a) + 1.0)
        };
        let ln_denom = special::ln_gamma(n as f64 + 1.0)
            - special::ln_gamma(c1 as f64 + 1.0)
            - special::ln_gamma((n - c1) as f64 + 1.0);
        let ln_obs = ln_num(a_obs);
        let slack = (1e-9f64).ln_1p();
        let mut tail = 0.0;
        for a in a_min..=a_max {
            let ln_a = ln_num(a);
            if ln_a <= ln_obs + slack {
                tail += (ln_a - ln_denom).exp();
            }
        }
        Ok(tail.min(1.0))
    }
}

/// Ratio of selection rates: protected-group rate over comparison-group
/// rate. `group[i]` marks protected-class membership.
pub fn selection_rate_ratio(selected: &[bool], group: &[bool]) -> Result<f64> {
    if selected.len() != group.len() {
        return Err(Error::InvalidSpec {
            message: format!(
                "length mismatch: {} vs {}",
                selected.len(),
                group.len()
            ),
        });
    }
    let mut counts = [0u64; 2]; // members of [comparison, protected]
    let mut picks = [0u64; 2];
    for (&s, &g) in selected.iter().zip(group) {
        let idx = usize::from(g);
        counts[idx] += 1;
        if s {
            picks[idx] += 1;
        }
    }
    if counts[0] == 0 || counts[1] == 0 {
        return Err(Error::Degenerate {
            message: "selection-rate ratio needs members in both groups".into(),
        });
    }
    let rate_protected = picks[1] as f64 / counts[1] as f64;
    let rate_comparison = picks[0] as f64 / counts[0] as f64;
    if rate_comparison == 0.0 {
        return Err(Error::Degenerate {
            message: "comparison group selects no one; ratio undefined".into(),
        });
    }
    Ok(rate_protected / rate_comparison)
}

/// Picks the association measure appropriate to the two columns' kinds (see
/// the module docs for the mapping) and computes it.
pub fn assoc_auto(d: &Dataset, a: &str, b: &str) -> Result<AssociationResult> {
    let ka = d.column_schema(a)?.kind;
    let kb = d.column_schema(b)?.kind;
    use ColumnKind::*;
    match (ka, kb) {
        (Continuous, Continuous) => pearson_r(d.numeric(a)?, d.numeric(b)?),
        (Continuous, Binary | Categorical) => {
            let keys = d.group_keys(b)?;
            let refs: Vec<&str> = keys.iter().map(|s| s.as_str()).collect();
            correlation_ratio(&refs, d.numeric(a)?)
        }
        (Binary | Categorical, Continuous) => {
            let keys = d.group_keys(a)?;
            let refs: Vec<&str> = keys.iter().map(|s| s.as_str()).collect();
            correlation_ratio(&refs, d.numeric(b)?)
        }
        (Binary | Categorical, Binary | Categorical) => {
            cramers_v(&ContingencyTable::from_columns(d, a, b)?)
        }
    }
}
