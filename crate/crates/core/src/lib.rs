//! Measurement of proxy discrimination in decision models.
//!
//! A facially neutral variable can carry information about a protected
//! attribute (race, sex, marital status, national origin) into a model that
//! never sees the attribute itself. This crate quantifies that leakage and
//! turns the measurements into decision rules:
//!
//! - [`stats`] — association measures between column pairs (Pearson r,
//!   Cramér's V, correlation ratio) with exact or asymptotic significance
//!   tests, implemented from first principles on top of [`stats::special`].
//! - [`glm`] — ordinary least squares via pivoted Householder QR and
//!   logistic regression via iteratively reweighted least squares, with
//!   collinearity and separation diagnostics.
//! - [`proxy`] — variable importance (fit lost when a variable is removed),
//!   semi-partial explanatory power of protected attributes given a model's
//!   predictors, substitute detection, and coefficient-zeroing decomposition.
//! - [`rules`] — screening and comparison rules: a strict no-proxy audit,
//!   selection among candidate models by minimum proxy power within an
//!   accuracy equivalence band, a proxy-power cap, a lexicographic total
//!   order, and a four-fifths selection-rate screen.
//! - [`competition`] — a held-out "lock box" evaluation protocol with
//!   hash-committed model specifications, so competing parties cannot
//!   retrofit their models to the evaluation data.
//! - [`scenarios`] — deterministic synthetic data generators reproducing the
//!   canonical fact patterns used throughout the test suite.
//!
//! Everything is deterministic: datasets hash to stable digests, generators
//! are pure functions of their configuration, and reports serialize with
//! sorted keys so equal inputs give byte-equal outputs.

pub mod competition;
pub mod data;
pub mod error;
pub mod glm;
pub mod proxy;
pub mod rng;
pub mod rules;
pub mod scenarios;
pub mod stats;

pub use error::Error;

/// Crate result type.
pub type Result<T> = std::result::Result<T, Error>;
