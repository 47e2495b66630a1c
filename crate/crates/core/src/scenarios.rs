//! Seeded synthetic scenario generators.
//!
//! Five small worlds, each built so that a known proxy relationship holds
//! by construction — useful as demo data and as fixtures whose true
//! structure is known exactly:
//!
//! - `marital_lending` — two facially neutral flags (a name change, joint
//!   accounts) are deterministic functions of marital status, which alone
//!   drives default.
//! - `accent_origin` — a rare accent marker substitutes for national
//!   origin about 95% of the time while explaining little variance,
//!   separating "substitution rate" from "R²".
//! - `segregated_school` — a high-school attended is race-pure for a
//!   configurable share of applicants (default 20%), while admissions
//!   depend only on SAT and GPA.
//! - `hiring_major` — undergraduate major correlates with sex but adds no
//!   profit signal beyond the skill variables, so dropping it rebalances
//!   selections without costing predicted profit.
//! - `digital_footprint` — device and email host capture the latent
//!   financial behavior that drives rare defaults, while credit score is a
//!   race-entangled summary of the same behavior; the footprint model ends
//!   up the less discriminatory alternative.
//!
//! Determinism: every column draws from its own [`SplitMix64`] substream
//! keyed by `(seed, column name)` (latent factors use reserved names), so
//! the same config always yields byte-identical CSV output and adding a
//! column can never perturb existing ones.

use serde::{Deserialize, Serialize};

use crate::data::{ColumnData, ColumnKind, ColumnSchema, Dataset, Role, Schema};
use crate::error::Error;
use crate::glm::sigmoid;
use crate::proxy::quantile_sorted;
use crate::rng::SplitMix64;
use crate::Result;

/// The available scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioName {
    MaritalLending,
    AccentOrigin,
    SegregatedSchool,
    HiringMajor,
    DigitalFootprint,
}

impl ScenarioName {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScenarioName::MaritalLending => "marital_lending",
            ScenarioName::AccentOrigin => "accent_origin",
            ScenarioName::SegregatedSchool => "segregated_school",
            ScenarioName::HiringMajor => "hiring_major",
            ScenarioName::DigitalFootprint => "digital_footprint",
        }
    }

    pub fn all() -> [ScenarioName; 5] {
        [
            ScenarioName::MaritalLending,
            ScenarioName::AccentOrigin,
            ScenarioName::SegregatedSchool,
            ScenarioName::HiringMajor,
            ScenarioName::DigitalFootprint,
        ]
    }
}

impl std::str::FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<ScenarioName> {
        ScenarioName::all()
            .into_iter()
            .find(|name| name.as_str() == s)
            .ok_or_else(|| Error::Parse {
                what: "scenario".into(),
                message: format!(
                    "unknown scenario {s:?}; expected one of: {}",
                    ScenarioName::all().map(|n| n.as_str()).join(", ")
                ),
            })
    }
}

impl std::fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Configuration for one generator run.
///
/// `noise` is scenario-specific: proxy flip probability
/// (`marital_lending`), extra exception rate (`accent_origin`), segregated
/// share override (`segregated_school`, 0 keeps the default 0.20), extra
/// profit noise (`hiring_major`), extra credit-score noise
/// (`digital_footprint`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub name: ScenarioName,
    pub n: usize,
    pub seed: u64,
    pub noise: f64,
}

impl ScenarioConfig {
    fn validate(&self) -> Result<()> {
        if !(self.noise >= 0.0) || !self.noise.is_finite() {
            return Err(Error::InvalidSpec {
                message: format!("noise {} must be a finite value ≥ 0", self.noise),
            });
        }
        let needed = match self.name {
            ScenarioName::MaritalLending => 100,
            ScenarioName::AccentOrigin
            | ScenarioName::SegregatedSchool
            | ScenarioName::HiringMajor => 1000,
            // Defaults are rare events; smaller samples cannot hold the
            // calibrated rates.
            ScenarioName::DigitalFootprint => 10000,
        };
        if self.n < needed {
            return Err(Error::TooFewRows {
                needed,
                got: self.n,
            });
        }
        Ok(())
    }

    fn stream(&self, column: &str) -> SplitMix64 {
        SplitMix64::for_column(self.seed, column)
    }
}

/// Generates the configured scenario.
pub fn generate(cfg: &ScenarioConfig) -> Result<Dataset> {
    cfg.validate()?;
    match cfg.name {
        ScenarioName::MaritalLending => marital_lending(cfg),
        ScenarioName::AccentOrigin => accent_origin(cfg),
        ScenarioName::SegregatedSchool => segregated_school(cfg),
        ScenarioName::HiringMajor => hiring_major(cfg),
        ScenarioName::DigitalFootprint => digital_footprint(cfg),
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

fn continuous(name: &str, role: Role) -> ColumnSchema {
    ColumnSchema {
        name: name.into(),
        kind: ColumnKind::Continuous,
        role,
        categories: vec![],
    }
}

fn categorical(name: &str, role: Role, categories: &[&str]) -> ColumnSchema {
    ColumnSchema {
        name: name.into(),
        kind: ColumnKind::Categorical,
        role,
        categories: categories.iter().map(|s| s.to_string()).collect(),
    }
}

/// Divorce drives default; a name change and the absence of joint accounts
/// are (noise-flipped) images of marital status. `noise` is the flip
/// probability; at 0 the proxies are exact.
fn marital_lending(cfg: &ScenarioConfig) -> Result<Dataset> {
    let n = cfg.n;
    let flip = cfg.noise.min(0.5);

    let mut r_marital = cfg.stream("marital_status");
    let divorced: Vec<bool> = (0..n).map(|_| r_marital.bernoulli(0.35)).collect();

    let mut r_name = cfg.stream("name_change");
    let name_change: Vec<f64> = divorced
        .iter()
        .map(|&d| (d ^ r_name.bernoulli(flip)) as u8 as f64)
        .collect();

    let mut r_joint = cfg.stream("joint_accounts");
    let joint_accounts: Vec<f64> = divorced
        .iter()
        .map(|&d| (!d ^ r_joint.bernoulli(flip)) as u8 as f64)
        .collect();

    let mut r_default = cfg.stream("default");
    let default: Vec<f64> = divorced
        .iter()
        .map(|&d| r_default.bernoulli(if d { 0.55 } else { 0.12 }) as u8 as f64)
        .collect();

    let schema = Schema {
        columns: vec![
            binary("marital_status", Role::Protected),
            binary("name_change", Role::Predictor),
            binary("joint_accounts", Role::Predictor),
            binary("default", Role::Outcome),
        ],
    };
    Dataset::new(
        schema,
        vec![
            ColumnData::Numeric(divorced.iter().map(|&d| d as u8 as f64).collect()),
            ColumnData::Numeric(name_change),
            ColumnData::Numeric(joint_accounts),
            ColumnData::Numeric(default),
        ],
    )
}

/// A rare accent marker: 95% of accented speakers are foreign-born, 5% of
/// unaccented speakers are. `noise` widens both exception rates.
fn accent_origin(cfg: &ScenarioConfig) -> Result<Dataset> {
    let n = cfg.n;
    let p_foreign_accent = (0.95 - cfg.noise).clamp(0.5, 1.0);
    let p_foreign_plain = (0.05 + cfg.noise).clamp(0.0, 0.5);

    let mut r_accent = cfg.stream("accent");
    let accent: Vec<bool> = (0..n).map(|_| r_accent.bernoulli(0.0226)).collect();

    let mut r_origin = cfg.stream("national_origin");
    let origin: Vec<f64> = accent
        .iter()
        .map(|&a| {
            let p = if a { p_foreign_accent } else { p_foreign_plain };
            r_origin.bernoulli(p) as u8 as f64
        })
        .collect();

    let schema = Schema {
        columns: vec![
            binary("accent", Role::Predictor),
            // The protected attribute is the thing being predicted here.
            binary("national_origin", Role::Outcome),
        ],
    };
    Dataset::new(
        schema,
        vec![
            ColumnData::Numeric(accent.iter().map(|&a| a as u8 as f64).collect()),
            ColumnData::Numeric(origin),
        ],
    )
}

const SCHOOLS: usize = 20;

/// Twenty high schools, four of them single-race (two per race); SAT and
/// GPA differ by race and drive admission, the school itself does not.
/// `noise` > 0 overrides the default 0.20 segregated share.
fn segregated_school(cfg: &ScenarioConfig) -> Result<Dataset> {
    let n = cfg.n;
    let seg_share = if cfg.noise > 0.0 {
        cfg.noise.min(1.0)
    } else {
        0.20
    };

    let mut r_school = cfg.stream("high_school");
    let mut r_race = cfg.stream("race");
    let mut school = Vec::with_capacity(n);
    let mut race = Vec::with_capacity(n); // 0 = group_a, 1 = group_b
    for _ in 0..n {
        if r_school.bernoulli(seg_share) {
            // Schools 0..4 are segregated: 0,1 all group_a; 2,3 all group_b.
            let s = r_school.below(4) as u32;
            school.push(s);
            race.push((s >= 2) as u32);
        } else {
            school.push(4 + r_school.below((SCHOOLS - 4) as u64) as u32);
            race.push(r_race.bernoulli(0.3) as u32);
        }
    }

    let mut r_sat = cfg.stream("sat");
    let sat: Vec<f64> = race
        .iter()
        .map(|&r| {
            let mean = if r == 0 { 1020.0 } else { 975.0 };
            mean + 140.0 * r_sat.next_normal()
        })
        .collect();

    let mut r_gpa = cfg.stream("gpa");
    let gpa: Vec<f64> = race
        .iter()
        .zip(&sat)
        .map(|(&r, &s)| {
            let shift = if r == 0 { 0.04 } else { -0.08 };
            (2.8 + 0.0012 * (s - 1000.0) + shift + 0.35 * r_gpa.next_normal()).clamp(0.0, 4.0)
        })
        .collect();

    let mut r_admit = cfg.stream("admit");
    let admit: Vec<f64> = sat
        .iter()
        .zip(&gpa)
        .map(|(&s, &g)| {
            let p = sigmoid(-0.8 + 0.0045 * (s - 1000.0) + (g - 2.8));
            r_admit.bernoulli(p) as u8 as f64
        })
        .collect();

    let school_names: Vec<String> = (1..=SCHOOLS).map(|i| format!("hs{i:02}")).collect();
    let schema = Schema {
        columns: vec![
            categorical("race", Role::Protected, &["group_a", "group_b"]),
            ColumnSchema {
                name: "high_school".into(),
                kind: ColumnKind::Categorical,
                role: Role::Predictor,
                categories: school_names,
            },
            continuous("sat", Role::Predictor),
            continuous("gpa", Role::Predictor),
            binary("admit", Role::Outcome),
        ],
    };
    Dataset::new(
        schema,
        vec![
            ColumnData::Categorical(race),
            ColumnData::Categorical(school),
            ColumnData::Numeric(sat),
            ColumnData::Numeric(gpa),
            ColumnData::Numeric(admit),
        ],
    )
}

/// Undergraduate major leans with sex but profit depends only on the two
/// latent skills, which the aptitude and domain-test scores measure.
/// `noise` adds to the profit noise floor.
fn hiring_major(cfg: &ScenarioConfig) -> Result<Dataset> {
    let n = cfg.n;

    let mut r_sex = cfg.stream("sex");
    let male: Vec<bool> = (0..n).map(|_| r_sex.bernoulli(0.5)).collect();

    let mut r_g = cfg.stream("latent_g");
    let g: Vec<f64> = (0..n).map(|_| r_g.next_normal()).collect();
    let mut r_h = cfg.stream("latent_h");
    let h: Vec<f64> = (0..n).map(|_| r_h.next_normal()).collect();

    let mut r_major = cfg.stream("undergrad_major");
    // 1 = stem.
    let major: Vec<u32> = male
        .iter()
        .zip(&h)
        .map(|(&m, &hi)| {
            let sexsign = if m { 1.0 } else { -1.0 };
            (hi + 1.2 * sexsign + r_major.next_normal() > 0.0) as u32
        })
        .collect();

    let aptitude: Vec<f64> = g.iter().map(|&gi| 100.0 + 15.0 * gi).collect();

    let mut r_test = cfg.stream("domain_test");
    let domain_test: Vec<f64> = h
        .iter()
        .map(|&hi| 50.0 + 10.0 * (hi + r_test.next_normal()))
        .collect();

    let mut r_profit = cfg.stream("profit");
    let sd = 10.0 * (1.0 + cfg.noise);
    let profit: Vec<f64> = g
        .iter()
        .zip(&h)
        .map(|(&gi, &hi)| 200.0 + 20.0 * gi + 20.0 * hi + sd * r_profit.next_normal())
        .collect();

    let schema = Schema {
        columns: vec![
            binary("sex", Role::Protected), // 1 = male
            categorical("undergrad_major", Role::Predictor, &["liberal_arts", "stem"]),
            continuous("aptitude", Role::Predictor),
            continuous("domain_test", Role::Predictor),
            continuous("profit", Role::Outcome),
        ],
    };
    Dataset::new(
        schema,
        vec![
            ColumnData::Numeric(male.iter().map(|&m| m as u8 as f64).collect()),
            ColumnData::Categorical(major),
            ColumnData::Numeric(aptitude),
            ColumnData::Numeric(domain_test),
            ColumnData::Numeric(profit),
        ],
    )
}

const RACES: [&str; 5] = ["asian", "white", "other", "hispanic", "black"];
const RACE_PROBS: [f64; 5] = [0.06, 0.60, 0.09, 0.15, 0.10];
const RACE_FIN: [f64; 5] = [0.5, 0.3, 0.1, -0.3, -0.5];
const CREDIT_MEANS: [f64; 5] = [745.0, 734.0, 732.0, 701.0, 677.0];
const DEVICES: [&str; 3] = ["desktop", "tablet", "mobile"];
const DEVICE_RATES: [f64; 3] = [0.0074, 0.0091, 0.0214];
const EMAIL_TIERS: [&str; 7] = [
    "corporate",
    "edu",
    "own_domain",
    "gmail",
    "outlook",
    "yahoo",
    "freemail",
];

/// Rare-event lending world. A latent financial factor `f` differs by
/// race; behavior `L = -f + 0.5s` drives default. Device and email host
/// read `L` (behavior), while credit score reads `f` plus a race-level
/// mean — so the credit-score model retains conditional race signal the
/// footprint model does not. Per-device default intercepts are solved
/// numerically so the realized rates track the published per-device
/// figures. `noise` adds to the credit-score noise floor.
fn digital_footprint(cfg: &ScenarioConfig) -> Result<Dataset> {
    let n = cfg.n;

    let mut r_race = cfg.stream("race");
    let race: Vec<u32> = (0..n)
        .map(|_| {
            let u = r_race.next_f64();
            let mut acc = 0.0;
            for (i, p) in RACE_PROBS.iter().enumerate() {
                acc += p;
                if u < acc {
                    return i as u32;
                }
            }
            (RACE_PROBS.len() - 1) as u32
        })
        .collect();

    let m: Vec<f64> = race.iter().map(|&r| 2.2 * RACE_FIN[r as usize]).collect();
    let mut r_f = cfg.stream("latent_f");
    let f: Vec<f64> = m.iter().map(|&mi| mi + r_f.next_normal()).collect();
    let mut r_s = cfg.stream("latent_s");
    let behavior: Vec<f64> = f
        .iter()
        .map(|&fi| -1.0 * fi + 0.5 * r_s.next_normal())
        .collect();

    // Device and email-host latents mix behavior with extra wealth signal,
    // then cut at fixed population shares.
    let mut r_dev = cfg.stream("device");
    let dev_lat: Vec<f64> = behavior
        .iter()
        .zip(&f)
        .map(|(&l, &fi)| l - 0.4 * fi + 0.3 * r_dev.next_normal())
        .collect();
    let device = cut_by_quantiles(&dev_lat, &[0.55, 0.85]);

    let mut r_mail = cfg.stream("email_host");
    let mail_lat: Vec<f64> = behavior
        .iter()
        .zip(&f)
        .map(|(&l, &fi)| l - 0.4 * fi + 0.45 * r_mail.next_normal())
        .collect();
    let email = cut_by_quantiles(&mail_lat, &[0.10, 0.25, 0.45, 0.65, 0.80, 0.92]);

    let mut r_income = cfg.stream("income");
    let income: Vec<f64> = f
        .iter()
        .map(|&fi| 40.0 + 8.0 * fi + 12.0 * r_income.next_normal())
        .collect();

    let mut r_credit = cfg.stream("credit_score");
    let credit_sd = 100.0 + cfg.noise;
    let credit: Vec<f64> = race
        .iter()
        .zip(&f)
        .map(|(&r, &fi)| {
            CREDIT_MEANS[r as usize]
                + 15.0 * (fi - 2.2 * RACE_FIN[r as usize])
                + credit_sd * r_credit.next_normal()
        })
        .collect();

    // Solve each device class's intercept so that the class's expected
    // default rate hits its published target.
    let mut intercepts = [0.0f64; 3];
    for dev in 0..3 {
        let ls: Vec<f64> = behavior
            .iter()
            .zip(&device)
            .filter(|(_, &d)| d as usize == dev)
            .map(|(&l, _)| l)
            .collect();
        intercepts[dev] = solve_intercept(&ls, DEVICE_RATES[dev]);
    }

    let mut r_default = cfg.stream("default");
    let default: Vec<f64> = behavior
        .iter()
        .zip(&device)
        .map(|(&l, &dev)| {
            let p = sigmoid(intercepts[dev as usize] + 1.7 * l);
            r_default.bernoulli(p) as u8 as f64
        })
        .collect();

    let schema = Schema {
        columns: vec![
            categorical("race", Role::Protected, &RACES),
            categorical("device", Role::Predictor, &DEVICES),
            categorical("email_host", Role::Predictor, &EMAIL_TIERS),
            continuous("income", Role::Predictor),
            continuous("credit_score", Role::Predictor),
            binary("default", Role::Outcome),
        ],
    };
    Dataset::new(
        schema,
        vec![
            ColumnData::Categorical(race),
            ColumnData::Categorical(device),
            ColumnData::Categorical(email),
            ColumnData::Numeric(income),
            ColumnData::Numeric(credit),
            ColumnData::Numeric(default),
        ],
    )
}

/// Assigns each value the index of its quantile bin: `cuts` are cumulative
/// shares, so `[0.55, 0.85]` produces codes 0/1/2 holding roughly 55%,
/// 30%, and 15% of rows.
fn cut_by_quantiles(values: &[f64], cuts: &[f64]) -> Vec<u32> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let thresholds: Vec<f64> = cuts.iter().map(|&q| quantile_sorted(&sorted, q)).collect();
    values
        .iter()
        .map(|&v| thresholds.iter().filter(|&&t| v > t).count() as u32)
        .collect()
}

/// Bisects the intercept `a` so that mean(sigmoid(a + 1.7·L)) over the
/// class hits `target`.
fn solve_intercept(ls: &[f64], target: f64) -> f64 {
    let rate = |a: f64| -> f64 {
        ls.iter().map(|&l| sigmoid(a + 1.7 * l)).sum::<f64>() / ls.len().max(1) as f64
    };
    let (mut lo, mut hi) = (-15.0f64, 5.0f64);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if rate(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proxy::detect_substitute;
    use crate::stats;

    fn cfg(name: ScenarioName, n: usize, seed: u64, noise: f64) -> ScenarioConfig {
        ScenarioConfig {
            name,
            n,
            seed,
            noise,
        }
    }

    #[test]
    fn generators_are_deterministic_and_seed_sensitive() {
        for name in ScenarioName::all() {
            let n = if name == ScenarioName::DigitalFootprint {
                10000
            } else {
                1000
            };
            let a = generate(&cfg(name, n, 7, 0.0)).unwrap();
            let b = generate(&cfg(name, n, 7, 0.0)).unwrap();
            assert_eq!(a.to_csv(), b.to_csv(), "{name} must be reproducible");
            let c = generate(&cfg(name, n, 8, 0.0)).unwrap();
            assert_ne!(a.to_csv(), c.to_csv(), "{name} must react to the seed");

            // Generated data must survive its own serialization.
            let back = Dataset::from_csv(&a.to_csv(), a.schema()).unwrap();
            assert_eq!(back, a, "{name} round-trip");
        }
    }

    #[test]
    fn config_validation_rejects_bad_inputs() {
        assert!(matches!(
            generate(&cfg(ScenarioName::MaritalLending, 50, 1, 0.0)),
            Err(Error::TooFewRows { .. })
        ));
        assert!(matches!(
            generate(&cfg(ScenarioName::DigitalFootprint, 5000, 1, 0.0)),
            Err(Error::TooFewRows { .. })
        ));
        assert!(generate(&cfg(ScenarioName::MaritalLending, 5000, 1, -0.1)).is_err());
        assert!("marital_lending".parse::<ScenarioName>().is_ok());
        assert!("no_such_scenario".parse::<ScenarioName>().is_err());
    }

    #[test]
    fn marital_proxies_are_exact_at_zero_noise_and_dissolve_at_half() {
        let d = generate(&cfg(ScenarioName::MaritalLending, 5000, 42, 0.0)).unwrap();
        let m = d.numeric("marital_status").unwrap();
        let nc = d.numeric("name_change").unwrap();
        let ja = d.numeric("joint_accounts").unwrap();
        for i in 0..d.n_rows() {
            assert_eq!(nc[i], m[i]);
            assert_eq!(ja[i], 1.0 - m[i]);
        }
        let divorce_rate = m.iter().sum::<f64>() / m.len() as f64;
        assert!((divorce_rate - 0.35).abs() < 0.02, "{divorce_rate}");
        let default_rate = d.numeric("default").unwrap().iter().sum::<f64>() / d.n_rows() as f64;
        // 0.35·0.55 + 0.65·0.12 = 0.2705
        assert!((default_rate - 0.2705).abs() < 0.02, "{default_rate}");

        // Heavy flips destroy the association.
        let noisy = generate(&cfg(ScenarioName::MaritalLending, 5000, 42, 0.5)).unwrap();
        let assoc = stats::assoc_auto(&noisy, "name_change", "marital_status").unwrap();
        assert!(assoc.value.abs() < 0.2, "association {}", assoc.value);
    }

    #[test]
    fn accent_substitutes_at_ninety_five_percent() {
        let d = generate(&cfg(ScenarioName::AccentOrigin, 20000, 42, 0.0)).unwrap();
        let f = detect_substitute(&d, "accent", "national_origin", 0.90).unwrap();
        assert!(
            (f.forward_rate - 0.95).abs() < 0.01,
            "forward {}",
            f.forward_rate
        );
        let accent = d.numeric("accent").unwrap();
        let share = accent.iter().sum::<f64>() / accent.len() as f64;
        assert!((share - 0.0226).abs() < 0.005, "accent share {share}");
    }

    #[test]
    fn school_race_purity_tracks_the_segregated_share() {
        let d = generate(&cfg(ScenarioName::SegregatedSchool, 20000, 42, 0.0)).unwrap();
        let f = detect_substitute(&d, "high_school", "race", 0.95).unwrap();
        assert!(
            (f.affected_fraction - 0.20).abs() < 0.02,
            "affected {}",
            f.affected_fraction
        );
        assert!(!f.near_perfect, "majority map should stay imperfect");

        // The segregated schools really are single-race.
        let schools = d.group_keys("high_school").unwrap();
        let races = d.group_keys("race").unwrap();
        for (s, r) in schools.iter().zip(&races) {
            match s.as_str() {
                "hs01" | "hs02" => assert_eq!(r, "group_a"),
                "hs03" | "hs04" => assert_eq!(r, "group_b"),
                _ => {}
            }
        }

        // Override: a tiny segregated share.
        let d = generate(&cfg(ScenarioName::SegregatedSchool, 40000, 42, 0.0025)).unwrap();
        let f = detect_substitute(&d, "high_school", "race", 0.95).unwrap();
        assert!(
            (f.affected_fraction - 0.0025).abs() < 0.002,
            "affected {}",
            f.affected_fraction
        );
    }

    #[test]
    fn hiring_major_leans_with_sex_but_profit_centers_on_200() {
        let d = generate(&cfg(ScenarioName::HiringMajor, 5000, 42, 0.0)).unwrap();
        let profit = d.numeric("profit").unwrap();
        let mean = profit.iter().sum::<f64>() / profit.len() as f64;
        assert!((mean - 200.0).abs() < 2.0, "profit mean {mean}");

        let assoc = stats::assoc_auto(&d, "undergrad_major", "sex").unwrap();
        assert!(assoc.value > 0.3, "major–sex association {}", assoc.value);
    }

    #[test]
    fn footprint_device_shares_and_default_rates_hold() {
        let d = generate(&cfg(ScenarioName::DigitalFootprint, 10000, 1, 0.0)).unwrap();
        let device = d.group_keys("device").unwrap();
        let default = d.numeric("default").unwrap();
        let n = d.n_rows() as f64;

        for (label, want_share, want_rate) in [
            ("desktop", 0.55, 0.0074),
            ("tablet", 0.30, 0.0091),
            ("mobile", 0.15, 0.0214),
        ] {
            let idx: Vec<usize> = device
                .iter()
                .enumerate()
                .filter(|(_, dv)| dv.as_str() == label)
                .map(|(i, _)| i)
                .collect();
            let share = idx.len() as f64 / n;
            assert!((share - want_share).abs() < 0.01, "{label} share {share}");
            let rate = idx.iter().map(|&i| default[i]).sum::<f64>() / idx.len() as f64;
            // n = 10000 is the floor; allow a generous sampling window.
            assert!(
                (rate - want_rate).abs() < 0.012,
                "{label} default rate {rate} (want ≈ {want_rate})"
            );
        }

        // Email tiers cover all seven labels.
        let tiers: std::collections::BTreeSet<String> =
            d.group_keys("email_host").unwrap().into_iter().collect();
        assert_eq!(tiers.len(), 7);
    }
}
