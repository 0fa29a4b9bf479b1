//! PAC-Bayes certificates for martingale processes.
//!
//! The crate is organised bottom-up:
//!
//! - [`measures`]: finite and diagonal-Gaussian measures, KL, change of measure, Gibbs posteriors;
//! - [`processes`]: martingale increment models, variation ledgers and the exponential supermartingale;
//! - [`certificates`]: closed-form evaluators for every bound kind;
//! - [`learners`]: batch and online Gibbs learners that emit certificates;
//! - [`bandit`]: importance-weighted off-policy estimates for an exploring bandit policy;
//! - [`harness`]: Monte-Carlo experiments, configuration and the `pacmart` CLI.
//!
//! The measure and certificate layers are generic over [`Scalar`] (`f32` or
//! `f64`); the simulation layers work in `f64`. The aliases below fix the
//! common `f64` instantiations.

// `!(x > 0)` is the NaN-rejecting form used throughout input validation
#![allow(clippy::neg_cmp_op_on_partial_ord)]

#[cfg(test)]
#[macro_use]
mod testutil;

pub mod bandit;
pub mod certificates;
pub mod distributions;
pub mod error;
pub mod harness;
pub mod learners;
pub mod measures;
pub mod montecarlo;
pub mod processes;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use certificates::{BoundCertificate, CertificateKind};
pub use distributions::StockDistribution;
pub use measures::{HypothesisSpace, PosteriorMeasure, ScoreFunction};
pub use processes::VariationLedger;

pub type Measure = measures::PosteriorMeasure<f64>;
pub type Certificate = certificates::BoundCertificate<f64>;
pub type Ledger = processes::VariationLedger<f64>;
pub type Score = measures::ScoreFunction<f64>;
