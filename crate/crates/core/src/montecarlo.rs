//! Replicated estimation of `P{|S_n| > eps n^(1/p)}`.
//!
//! Replication `i` of a path of length `n` always draws from substream
//! `(seed, n, i)`, and workers only combine integer hit counts, so the
//! result is bit-identical for any thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::distributions::{NoiseSpec, Sampler};
use crate::error::{invalid, Error, Result};
use crate::model::{Coefficients, ModelSpec};
use crate::numeric::normal_quantile;
use crate::oracle::{enumerable, enumerate_tail, exact_gaussian_tail, TailQuery};
use crate::rng::Stream;
use crate::series::SeriesParams;

pub const DEFAULT_CONFIDENCE: f64 = 0.99;
pub const MIN_REPLICATIONS: u64 = 100;
/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "BK_AUTOREG_THREADS";

const BLOCK: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    MonteCarlo,
    ExactGaussian,
    Enumerated,
}

impl Method {
    pub fn is_exact(&self) -> bool {
        !matches!(self, Method::MonteCarlo)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::MonteCarlo => "MonteCarlo",
            Method::ExactGaussian => "ExactGaussian",
            Method::Enumerated => "Enumerated",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "MonteCarlo" => Ok(Method::MonteCarlo),
            "ExactGaussian" => Ok(Method::ExactGaussian),
            "Enumerated" => Ok(Method::Enumerated),
            other => Err(invalid(format!("unknown method '{other}'"))),
        }
    }
}

/// A tail probability with its interval and provenance.
///
/// Exact methods carry a degenerate interval and zero replications.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailEstimate {
    pub point: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub replications: u64,
    pub hits: u64,
    pub method: Method,
    pub confidence: f64,
}

impl TailEstimate {
    pub fn exact(value: f64, method: Method) -> Self {
        debug_assert!(method.is_exact());
        Self {
            point: value,
            ci_low: value,
            ci_high: value,
            replications: 0,
            hits: 0,
            method,
            confidence: 1.0,
        }
    }

    pub fn monte_carlo(hits: u64, replications: u64, confidence: f64) -> Self {
        let (lo, hi) = wilson_interval(hits, replications, confidence);
        Self {
            point: hits as f64 / replications as f64,
            ci_low: lo,
            ci_high: hi,
            replications,
            hits,
            method: Method::MonteCarlo,
            confidence,
        }
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.ci_low + self.ci_high)
    }

    pub fn contains(&self, value: f64) -> bool {
        self.ci_low <= value && value <= self.ci_high
    }
}

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && hits <= trials, "need 0 <= hits <= trials, trials > 0");
    let n = trials as f64;
    let phat = hits as f64 / n;
    let z = normal_quantile(1.0 - (1.0 - confidence) / 2.0);
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (phat + z2 / (2.0 * n)) / denom;
    let half = z / denom * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if hits == 0 { 0.0 } else { (center - half).clamp(0.0, phat) };
    let hi = if hits == trials { 1.0 } else { (center + half).clamp(phat, 1.0) };
    (lo, hi)
}

enum PathCoefficients {
    Constant(f64),
    Sequence(Vec<f64>),
}

#[inline]
fn path_sum(coeffs: &PathCoefficients, n: usize, sampler: &Sampler, rng: &mut Stream) -> f64 {
    let mut xi = 0.0;
    let mut sum = 0.0;
    match coeffs {
        PathCoefficients::Constant(q) => {
            for _ in 0..n {
                xi = q * xi + sampler.draw(rng);
                sum += xi;
            }
        }
        PathCoefficients::Sequence(qs) => {
            // qs[0] = q_1 multiplies xi_0 = 0
            for q in &qs[..n] {
                xi = q * xi + sampler.draw(rng);
                sum += xi;
            }
        }
    }
    sum
}

/// Monte Carlo configuration: replications, seed, confidence, workers.
#[derive(Clone, Debug, PartialEq)]
pub struct Engine {
    replications: u64,
    seed: u64,
    confidence: f64,
    threads: Option<usize>,
}

impl Engine {
    pub fn new(replications: u64, seed: u64) -> Result<Self> {
        if replications < MIN_REPLICATIONS {
            return Err(Error::TooFewReplications(replications));
        }
        Ok(Self {
            replications,
            seed,
            confidence: DEFAULT_CONFIDENCE,
            threads: None,
        })
    }

    pub fn with_confidence(mut self, confidence: f64) -> Result<Self> {
        if !(confidence > 0.0 && confidence < 1.0) {
            return Err(invalid(format!("confidence must lie in (0, 1), got {confidence}")));
        }
        self.confidence = confidence;
        Ok(self)
    }

    /// Fix the worker count; otherwise `BK_AUTOREG_THREADS` or the rayon default applies.
    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads.max(1));
        self
    }

    pub fn replications(&self) -> u64 {
        self.replications
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    fn worker_count(&self) -> Option<usize> {
        self.threads.or_else(|| {
            std::env::var(THREADS_ENV)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&t| t > 0)
        })
    }

    fn install<T: Send>(&self, job: impl FnOnce() -> T + Send) -> Result<T> {
        match self.worker_count() {
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| invalid(format!("thread pool: {e}")))?;
                Ok(pool.install(job))
            }
            None => Ok(job()),
        }
    }

    /// Count `|S_n| > t` for every threshold on one shared set of paths.
    pub fn count_exceedances(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        thresholds: &[f64],
    ) -> Result<Vec<u64>> {
        if n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        if thresholds.iter().any(|t| t.is_nan()) {
            return Err(Error::NonFinite("threshold"));
        }
        let len = n as usize;
        let coeffs = match model.coefficients() {
            Coefficients::Constant(q) => PathCoefficients::Constant(*q),
            Coefficients::Sequence(_) => {
                let mut qs = model.coefficients_up_to(len)?;
                qs[0] = 0.0;
                PathCoefficients::Sequence(qs)
            }
        };
        let sampler = spec.sampler()?;
        let reps = self.replications;
        let seed = self.seed;
        let blocks = reps.div_ceil(BLOCK);
        let k = thresholds.len();
        self.install(|| {
            (0..blocks)
                .into_par_iter()
                .map(|b| {
                    let mut hits = vec![0u64; k];
                    for rep in b * BLOCK..((b + 1) * BLOCK).min(reps) {
                        let mut rng = Stream::substream(seed, n, rep);
                        let s = path_sum(&coeffs, len, &sampler, &mut rng).abs();
                        for (h, t) in hits.iter_mut().zip(thresholds) {
                            if s > *t {
                                *h += 1;
                            }
                        }
                    }
                    hits
                })
                .reduce(
                    || vec![0u64; k],
                    |mut acc, part| {
                        for (a, p) in acc.iter_mut().zip(part) {
                            *a += p;
                        }
                        acc
                    },
                )
        })
    }

    /// One estimate per threshold, all from the same simulated paths.
    pub fn estimate_tails(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        thresholds: &[f64],
    ) -> Result<Vec<TailEstimate>> {
        let hits = self.count_exceedances(model, spec, n, thresholds)?;
        Ok(hits
            .into_iter()
            .map(|h| TailEstimate::monte_carlo(h, self.replications, self.confidence))
            .collect())
    }

    pub fn estimate_tail(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        query: &TailQuery,
    ) -> Result<TailEstimate> {
        Ok(self.estimate_tails(model, spec, query.n, &[query.threshold()])?[0])
    }

    /// Tail estimates along `n_grid`, preferring exact oracles:
    /// Gaussian noise with constant `q` is evaluated in closed form, finite
    /// support within the enumeration budget is enumerated, anything else is
    /// simulated.
    pub fn tail_curve(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        params: &SeriesParams,
        n_grid: &[u64],
    ) -> Result<Vec<(u64, TailEstimate)>> {
        check_grid(n_grid)?;
        n_grid
            .iter()
            .map(|&n| {
                let query = TailQuery::new(n, params.p, params.epsilon)?;
                let est = match spec {
                    NoiseSpec::Normal { sigma } if model.constant_q().is_some() => {
                        TailEstimate::exact(
                            exact_gaussian_tail(model, &query, *sigma)?,
                            Method::ExactGaussian,
                        )
                    }
                    _ if enumerable(spec, n) => TailEstimate::exact(
                        enumerate_tail(model, spec, &query)?,
                        Method::Enumerated,
                    ),
                    _ => self.estimate_tail(model, spec, &query)?,
                };
                Ok((n, est))
            })
            .collect()
    }
}

pub(crate) fn check_grid(n_grid: &[u64]) -> Result<()> {
    if n_grid.is_empty() {
        return Err(invalid("n grid is empty"));
    }
    if n_grid[0] == 0 {
        return Err(invalid("n grid entries must be >= 1"));
    }
    if n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("n grid must be strictly increasing"));
    }
    Ok(())
}

/// [`Engine::estimate_tail`] at the default confidence.
pub fn estimate_tail(
    model: &ModelSpec,
    spec: &NoiseSpec,
    query: &TailQuery,
    replications: u64,
    seed: u64,
) -> Result<TailEstimate> {
    Engine::new(replications, seed)?.estimate_tail(model, spec, query)
}

/// [`Engine::tail_curve`] at the default confidence.
pub fn tail_curve(
    model: &ModelSpec,
    spec: &NoiseSpec,
    params: &SeriesParams,
    n_grid: &[u64],
    replications: u64,
    seed: u64,
) -> Result<Vec<(u64, TailEstimate)>> {
    Engine::new(replications, seed)?.tail_curve(model, spec, params, n_grid)
}
