//! Baum-Katz series `sum_n n^(r/p-2) P{|S_n| > eps n^(1/p)}`: accumulation
//! over a tail curve, a log-log slope diagnostic, the moment-based predictor
//! and the per-`n` necessity bounds.

use std::fmt;

use crate::distributions::NoiseSpec;
use crate::error::{invalid, Error, Result};
use crate::model::{Coefficients, ModelSpec};
use crate::montecarlo::{check_grid, Method, TailEstimate};
use crate::numeric::{ls_slope, CompensatedSum};

/// Half-width of the slope band around `-1` where no verdict is given.
pub const DEFAULT_DEAD_BAND: f64 = 0.15;
/// Terms below this are treated as underflow: the series converges by domination.
pub const UNDERFLOW_TERM: f64 = 1e-300;
/// Minimum number of grid points in the fitting window.
pub const MIN_FIT_POINTS: usize = 4;
// Gaps wider than this are summed via the integral of the interpolant.
const EXPLICIT_GAP: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesParams {
    pub p: f64,
    pub r: f64,
    pub epsilon: f64,
}

impl SeriesParams {
    pub fn new(p: f64, r: f64, epsilon: f64) -> Result<Self> {
        if !(p.is_finite() && r.is_finite() && epsilon.is_finite()) {
            return Err(Error::NonFinite("series parameters"));
        }
        if !(p > 0.0 && p < 2.0) {
            return Err(invalid(format!("p must lie in (0, 2), got {p}")));
        }
        if r < p {
            return Err(invalid(format!("r must be >= p, got r = {r}, p = {p}")));
        }
        if epsilon <= 0.0 {
            return Err(invalid(format!("epsilon must be > 0, got {epsilon}")));
        }
        Ok(Self { p, r, epsilon })
    }

    /// `r/p - 2`.
    pub fn exponent(&self) -> f64 {
        self.r / self.p - 2.0
    }
}

/// `n^(r/p-2) * tail`.
pub fn bk_term(n: u64, params: &SeriesParams, tail: f64) -> f64 {
    if tail == 0.0 {
        return 0.0;
    }
    (n as f64).powf(params.exponent()) * tail
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Converges,
    Diverges,
    Unknown(String),
}

impl Outcome {
    fn from_bool(converges: bool) -> Self {
        if converges {
            Outcome::Converges
        } else {
            Outcome::Diverges
        }
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, Outcome::Unknown(_))
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Converges => f.write_str("Converges"),
            Outcome::Diverges => f.write_str("Diverges"),
            Outcome::Unknown(reason) => write!(f, "Unknown({reason})"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Theorem1,
    Theorem2,
    Example1,
    Diagnostic,
    Remark1,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub outcome: Outcome,
    pub source: Source,
}

impl Verdict {
    fn new(outcome: Outcome, source: Source) -> Self {
        Self { outcome, source }
    }

    fn unknown(reason: &str, source: Source) -> Self {
        Self::new(Outcome::Unknown(reason.to_string()), source)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self.outcome, self.source)
    }
}

/// Which end of a tail interval feeds the terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailBasis {
    /// Exact value, or the interval midpoint for Monte Carlo rows.
    Center,
    /// Upper interval end.
    Pessimistic,
    /// Lower interval end.
    Optimistic,
}

impl TailBasis {
    pub fn value(&self, est: &TailEstimate) -> f64 {
        match (self, est.method) {
            (_, Method::ExactGaussian | Method::Enumerated) => est.point,
            (TailBasis::Center, Method::MonteCarlo) => est.midpoint(),
            (TailBasis::Pessimistic, Method::MonteCarlo) => est.ci_high,
            (TailBasis::Optimistic, Method::MonteCarlo) => est.ci_low,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesRow {
    pub n: u64,
    pub tail: TailEstimate,
    pub term: f64,
    pub partial_sum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesTable {
    pub rows: Vec<SeriesRow>,
    /// Least-squares slope of `ln term` on `ln n` over the last decade.
    pub slope: Option<f64>,
    pub verdict: Verdict,
    pub basis: TailBasis,
}

impl SeriesTable {
    pub fn last_partial_sum(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.partial_sum)
    }

    /// Partial sum at the grid point `n`, if present.
    pub fn partial_sum_at(&self, n: u64) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.partial_sum)
    }
}

/// Center, pessimistic and optimistic tables for one curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesBands {
    pub center: SeriesTable,
    pub pessimistic: SeriesTable,
    pub optimistic: SeriesTable,
}

/// Accumulate at the centre basis with the default dead band.
pub fn accumulate(curve: &[(u64, TailEstimate)], params: &SeriesParams) -> Result<SeriesTable> {
    accumulate_with(curve, params, TailBasis::Center, DEFAULT_DEAD_BAND)
}

pub fn accumulate_bands(
    curve: &[(u64, TailEstimate)],
    params: &SeriesParams,
) -> Result<SeriesBands> {
    Ok(SeriesBands {
        center: accumulate_with(curve, params, TailBasis::Center, DEFAULT_DEAD_BAND)?,
        pessimistic: accumulate_with(curve, params, TailBasis::Pessimistic, DEFAULT_DEAD_BAND)?,
        optimistic: accumulate_with(curve, params, TailBasis::Optimistic, DEFAULT_DEAD_BAND)?,
    })
}

/// Terms, partial sums and the slope verdict for a tail curve.
///
/// Partial sums estimate the series over every integer from the first grid
/// point: between grid points the term is interpolated as a power law in `n`
/// (linearly when an end is zero). On a grid of consecutive integers this is
/// the plain running sum of the terms.
pub fn accumulate_with(
    curve: &[(u64, TailEstimate)],
    params: &SeriesParams,
    basis: TailBasis,
    dead_band: f64,
) -> Result<SeriesTable> {
    let grid: Vec<u64> = curve.iter().map(|(n, _)| *n).collect();
    check_grid(&grid)?;
    if !(dead_band >= 0.0 && dead_band.is_finite()) {
        return Err(invalid(format!("dead band must be finite and >= 0, got {dead_band}")));
    }

    let mut rows = Vec::with_capacity(curve.len());
    let mut acc = CompensatedSum::new();
    let mut prev: Option<(u64, f64)> = None;
    for &(n, tail) in curve {
        let t = basis.value(&tail);
        if !(0.0..=1.0).contains(&t) {
            return Err(invalid(format!("tail value {t} at n = {n} is outside [0, 1]")));
        }
        let term = bk_term(n, params, t);
        match prev {
            None => acc.add(term),
            Some((n0, t0)) => acc.add(gap_sum(n0, t0, n, term)),
        }
        prev = Some((n, term));
        rows.push(SeriesRow { n, tail, term, partial_sum: acc.value() });
    }

    let (slope, verdict) = diagnose(&rows, dead_band);
    Ok(SeriesTable { rows, slope, verdict, basis })
}

/// Sum of the interpolated terms over `n0 < n <= n1`.
fn gap_sum(n0: u64, t0: f64, n1: u64, t1: f64) -> f64 {
    let gap = n1 - n0;
    if gap == 1 {
        return t1;
    }
    if t0 <= 0.0 || t1 <= 0.0 {
        // linear interpolation: interior points sum to (gap - 1)(t0 + t1)/2
        return t1 + (gap - 1) as f64 * (t0 + t1) / 2.0;
    }
    let (a, b) = (n0 as f64, n1 as f64);
    let beta = (t1 / t0).ln() / (b / a).ln();
    let f = |x: f64| t0 * (x / a).powf(beta);
    if gap <= EXPLICIT_GAP {
        let mut s = CompensatedSum::new();
        for k in n0 + 1..n1 {
            s.add(f(k as f64));
        }
        s.add(t1);
        return s.value();
    }
    // Euler-Maclaurin: sum_{a<n<=b} f = int_a^b f + (f(b) - f(a))/2 + (f'(b) - f'(a))/12
    let integral = if (beta + 1.0).abs() < 1e-12 {
        t0 * a * (b / a).ln()
    } else {
        t0 * a * ((b / a).powf(beta + 1.0) - 1.0) / (beta + 1.0)
    };
    let deriv = |x: f64, fx: f64| beta * fx / x;
    integral + (t1 - t0) / 2.0 + (deriv(b, t1) - deriv(a, t0)) / 12.0
}

fn diagnose(rows: &[SeriesRow], dead_band: f64) -> (Option<f64>, Verdict) {
    let n_max = rows.last().map_or(0, |r| r.n) as f64;
    let window: Vec<&SeriesRow> = rows.iter().filter(|r| r.n as f64 >= n_max / 10.0).collect();
    if window.len() < MIN_FIT_POINTS {
        return (None, Verdict::unknown("insufficient points", Source::Diagnostic));
    }
    if window.iter().any(|r| r.term < UNDERFLOW_TERM) {
        return (None, Verdict::new(Outcome::Converges, Source::Diagnostic));
    }
    let x: Vec<f64> = window.iter().map(|r| (r.n as f64).ln()).collect();
    let y: Vec<f64> = window.iter().map(|r| r.term.ln()).collect();
    let Some(slope) = ls_slope(&x, &y) else {
        return (None, Verdict::unknown("insufficient points", Source::Diagnostic));
    };
    let outcome = if slope < -1.0 - dead_band {
        Outcome::Converges
    } else if slope > -1.0 + dead_band {
        Outcome::Diverges
    } else {
        Outcome::Unknown("slope within dead band".to_string())
    };
    (Some(slope), Verdict::new(outcome, Source::Diagnostic))
}

fn check_centering(params: &SeriesParams, spec: &NoiseSpec) -> Result<()> {
    if params.r >= 1.0 && !spec.is_centered() {
        return Err(Error::NonZeroMean { mean: spec.mean(), r: params.r });
    }
    Ok(())
}

/// Convergence verdict from the moment conditions.
///
/// * `-1 <= q < 1`: converges iff `E|theta|^r < inf`.
/// * `q = 1`, `p < 2/3`: converges iff `E|theta|^(r/(1-p)) < inf`.
/// * `q = 1`, `p >= 2/3`: diverges for Gaussian noise, otherwise unknown.
/// * coefficient sequences with `sup |q_k| < 1`: as for `|q| < 1`.
pub fn predict(model: &ModelSpec, params: &SeriesParams, spec: &NoiseSpec) -> Result<Verdict> {
    spec.validate()?;
    check_centering(params, spec)?;
    let verdict = match model.coefficients() {
        Coefficients::Constant(q) if *q < 1.0 => Verdict::new(
            Outcome::from_bool(spec.moment_finite(params.r)),
            Source::Theorem1,
        ),
        Coefficients::Constant(_) if params.p < 2.0 / 3.0 => Verdict::new(
            Outcome::from_bool(spec.moment_finite(params.r / (1.0 - params.p))),
            Source::Theorem2,
        ),
        Coefficients::Constant(_) => match spec {
            NoiseSpec::Normal { .. } => Verdict::new(Outcome::Diverges, Source::Example1),
            _ => Verdict::unknown(
                "outside Theorem 2; Example 1 covers only Gaussian",
                Source::Example1,
            ),
        },
        Coefficients::Sequence(_) if model.uniformly_contracting() => Verdict::new(
            Outcome::from_bool(spec.moment_finite(params.r)),
            Source::Remark1,
        ),
        Coefficients::Sequence(_) => Verdict::unknown(
            "coefficient sequence is not uniformly bounded below 1 in modulus",
            Source::Remark1,
        ),
    };
    Ok(verdict)
}

/// Predicted versus diagnosed outcome.
#[derive(Clone, Debug, PartialEq)]
pub enum Comparison {
    Agree(Outcome),
    Disagree,
    Unknown,
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::Agree(o) => write!(f, "AGREE({o})"),
            Comparison::Disagree => f.write_str("DISAGREE"),
            Comparison::Unknown => f.write_str("UNKNOWN"),
        }
    }
}

pub fn compare(predicted: &Verdict, diagnosed: &Verdict) -> Comparison {
    match (&predicted.outcome, &diagnosed.outcome) {
        (Outcome::Unknown(_), _) | (_, Outcome::Unknown(_)) => Comparison::Unknown,
        (a, b) if a == b => Comparison::Agree(a.clone()),
        _ => Comparison::Disagree,
    }
}

/// Threshold multiplier in the per-`n` lower bound: `eps` for `q >= 0` or
/// `q = -1`, `eps / (1 + q)` for `-1 < q < 0`.
pub fn necessity_epsilon(q: f64, epsilon: f64) -> f64 {
    if q >= 0.0 || q == -1.0 {
        epsilon
    } else {
        epsilon / (1.0 + q)
    }
}

fn necessity_q(model: &ModelSpec, spec: &NoiseSpec) -> Result<f64> {
    let q = model
        .constant_q()
        .ok_or_else(|| Error::UnsupportedModel(format!("{model}: constant coefficient required")))?;
    if q == 1.0 {
        return Err(Error::UnsupportedModel(
            "q = 1 has no per-term necessity bound".to_string(),
        ));
    }
    if !spec.is_symmetric() {
        return Err(Error::NotSymmetric("necessity_lower_bound"));
    }
    spec.validate()?;
    Ok(q)
}

/// `n P{|theta| > eps_1 n^(1/p)}` for `-1 < q < 1`, and
/// `floor((n+1)/2) P{|theta| > eps n^(1/p)}` for `q = -1`.
pub fn necessity_lower_bound(
    model: &ModelSpec,
    n: u64,
    params: &SeriesParams,
    spec: &NoiseSpec,
) -> Result<f64> {
    let q = necessity_q(model, spec)?;
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let scale = (n as f64).powf(1.0 / params.p);
    let eps1 = necessity_epsilon(q, params.epsilon);
    let multiplier = if q == -1.0 { n.div_ceil(2) } else { n };
    Ok(multiplier as f64 * spec.abs_tail(eps1 * scale))
}

/// `sum_k P{|a(n,k) theta_k| > eps n^(1/p)}`, written for `|q| < 1` as
/// `sum_k P{(1 - q^(n-k+1)) |theta| > eps (1-q) n^(1/p)}`.
pub fn weighted_exceedance_sum(
    model: &ModelSpec,
    n: u64,
    params: &SeriesParams,
    spec: &NoiseSpec,
) -> Result<f64> {
    let q = necessity_q(model, spec)?;
    if q == -1.0 {
        return Err(Error::UnsupportedModel(
            "q = -1 uses the exact count instead".to_string(),
        ));
    }
    let rhs = params.epsilon * (1.0 - q) * (n as f64).powf(1.0 / params.p);
    let mut acc = CompensatedSum::new();
    let mut qm = 1.0;
    for _ in 0..n {
        qm *= q;
        acc.add(spec.abs_tail(rhs / (1.0 - qm)));
    }
    Ok(acc.value())
}

/// `2^lo, 2^(lo+1), ..., 2^hi`.
pub fn powers_of_two(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|e| 1u64 << e).collect()
}
