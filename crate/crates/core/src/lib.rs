//! Complete convergence of Baum-Katz series for sums of linear autoregression
//! sequences.
//!
//! For the recursion `xi_1 = theta_1`, `xi_k = q_k xi_{k-1} + theta_k` with
//! independent innovations `theta_k`, the partial sums `S_n = xi_1 + ... + xi_n`
//! are weighted sums `S_n = sum_k a(n,k) theta_k`. The crate computes those
//! weights exactly, evaluates tail probabilities `P{|S_n| > eps n^(1/p)}`
//! (closed form for Gaussian noise, exhaustive enumeration for finite support,
//! Monte Carlo otherwise), accumulates the series
//! `sum_n n^(r/p - 2) P{|S_n| > eps n^(1/p)}` with a log-log slope diagnostic,
//! predicts convergence from moment conditions, and checks the classical
//! probability inequalities on the weighted terms.
//!
//! | module | contents |
//! |---|---|
//! | [`model`] | recursion, weights `a(n,k)`, path simulation |
//! | [`distributions`] | innovation laws, moments, tails, symmetrization |
//! | [`rng`] | counter-based random streams |
//! | [`oracle`] | exact Gaussian tails and finite-support enumeration |
//! | [`montecarlo`] | replicated tail estimation with Wilson intervals |
//! | [`series`] | series accumulation, slope diagnostic, predictor |
//! | [`ineq`] | inequality verification harness |
//! | [`cli`] | batch experiment runner behind the `bk-autoreg` binary |
//!
//! Runnable examples live in `crates/core/examples/`.

pub mod cli;
pub mod distributions;
mod error;
pub mod ineq;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod oracle;
pub mod rng;
pub mod series;

pub use distributions::{Moment, NoiseSpec};
pub use error::{Error, Result};
pub use model::{ModelSpec, PathMode, PathResult};
pub use montecarlo::{Engine, Method, TailEstimate};
pub use oracle::TailQuery;
pub use series::{SeriesParams, SeriesTable, Verdict};

