//! Linear autoregression paths and their weighted-sum representation.
//!
//! The recursion `xi_1 = theta_1`, `xi_k = q_k xi_{k-1} + theta_k` gives
//! partial sums `S_n = sum_{k<=n} a(n,k) theta_k` with
//!
//! ```text
//! a(n,k) = 0                                          n < k
//!        = 1                                          n = k
//!        = 1 + sum_{l=1}^{n-k} prod_{j=k+1}^{k+l} q_j   n > k
//! ```
//!
//! For a constant coefficient `q` the weight only depends on `m = n - k + 1`
//! and reduces to `(1 - q^m) / (1 - q)` for `q < 1` and to `m` for `q = 1`.

use crate::error::{invalid, Error, Result};

/// Below this distance from 1 the geometric closed form loses too many digits
/// and the weight is accumulated term by term instead.
pub const NEAR_UNIT_Q: f64 = 1e-8;

/// Largest `n` for which a full weight table may be materialized.
pub const MAX_TABLE_N: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum Coefficients {
    Constant(f64),
    /// `q_1, ..., q_max` (1-based in the recursion; `q_1` never multiplies anything).
    Sequence(Vec<f64>),
}

/// Autoregression coefficients, constant or given as an explicit sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    coefficients: Coefficients,
    bound: Option<f64>,
}

impl ModelSpec {
    /// Constant coefficient `q` with `|q| <= 1`.
    pub fn constant(q: f64) -> Result<Self> {
        if !q.is_finite() {
            return Err(Error::NonFinite("q"));
        }
        if q.abs() > 1.0 {
            return Err(invalid(format!("|q| = {} exceeds 1", q.abs())));
        }
        Ok(Self {
            coefficients: Coefficients::Constant(q),
            bound: None,
        })
    }

    /// Coefficient sequence `q_1..q_max`, every entry with `|q_k| <= 1`.
    pub fn sequence(q: Vec<f64>) -> Result<Self> {
        if q.is_empty() {
            return Err(invalid("coefficient sequence is empty"));
        }
        for (i, v) in q.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite("q_k"));
            }
            if v.abs() > 1.0 {
                return Err(invalid(format!("|q_{}| = {} exceeds 1", i + 1, v.abs())));
            }
        }
        Ok(Self {
            coefficients: Coefficients::Sequence(q),
            bound: None,
        })
    }

    /// Attach the contraction bound `q_bar` used by [`Self::uniformly_contracting`].
    pub fn with_bound(mut self, bound: f64) -> Result<Self> {
        if !bound.is_finite() || bound < 0.0 {
            return Err(invalid(format!("contraction bound {bound} must be finite and >= 0")));
        }
        self.bound = Some(bound);
        Ok(self)
    }

    pub fn coefficients(&self) -> &Coefficients {
        &self.coefficients
    }

    pub fn bound(&self) -> Option<f64> {
        self.bound
    }

    /// The constant coefficient, if the model has one.
    pub fn constant_q(&self) -> Option<f64> {
        match self.coefficients {
            Coefficients::Constant(q) => Some(q),
            Coefficients::Sequence(_) => None,
        }
    }

    /// `q_k` for a 1-based index `k`.
    pub fn coefficient(&self, k: usize) -> Result<f64> {
        match &self.coefficients {
            Coefficients::Constant(q) => Ok(*q),
            Coefficients::Sequence(qs) => {
                if k == 0 || k > qs.len() {
                    Err(Error::CoefficientOutOfRange { index: k, len: qs.len() })
                } else {
                    Ok(qs[k - 1])
                }
            }
        }
    }

    /// Longest path the model can drive, `None` when unbounded.
    pub fn max_len(&self) -> Option<usize> {
        match &self.coefficients {
            Coefficients::Constant(_) => None,
            Coefficients::Sequence(qs) => Some(qs.len()),
        }
    }

    /// True iff a bound `q_bar < 1` was supplied and `sup_k |q_k| <= q_bar`.
    /// A constant model qualifies when `|q| <= q_bar < 1`.
    pub fn uniformly_contracting(&self) -> bool {
        let Some(bound) = self.bound else {
            return false;
        };
        if bound >= 1.0 {
            return false;
        }
        match &self.coefficients {
            Coefficients::Constant(q) => q.abs() <= bound,
            Coefficients::Sequence(qs) => qs.iter().all(|q| q.abs() <= bound),
        }
    }

    /// `q_1..q_n` materialized, for the simulation hot loop.
    pub(crate) fn coefficients_up_to(&self, n: usize) -> Result<Vec<f64>> {
        match &self.coefficients {
            Coefficients::Constant(q) => Ok(vec![*q; n]),
            Coefficients::Sequence(qs) => {
                if n > qs.len() {
                    Err(Error::CoefficientOutOfRange { index: n, len: qs.len() })
                } else {
                    Ok(qs[..n].to_vec())
                }
            }
        }
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        match self.max_len() {
            Some(len) if n > len => Err(Error::CoefficientOutOfRange { index: n, len }),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.coefficients {
            Coefficients::Constant(q) => write!(f, "q:{q}")?,
            Coefficients::Sequence(qs) => {
                write!(f, "q-seq:")?;
                for (i, q) in qs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{q}")?;
                }
            }
        }
        if let Some(b) = self.bound {
            write!(f, ";bound:{b}")?;
        }
        Ok(())
    }
}

/// One step of the recursion: `q_k * prev_xi + theta_k`.
///
/// For `k = 1` pass `prev_xi = 0`, which yields `xi_1 = theta_1`.
pub fn step_recursion(prev_xi: f64, q_k: f64, theta_k: f64) -> Result<f64> {
    if !prev_xi.is_finite() {
        return Err(Error::NonFinite("prev_xi"));
    }
    if !q_k.is_finite() {
        return Err(Error::NonFinite("q_k"));
    }
    if !theta_k.is_finite() {
        return Err(Error::NonFinite("theta_k"));
    }
    Ok(q_k * prev_xi + theta_k)
}

/// Lags up to this are summed directly, so `a(n,n) = 1` exactly.
const SHORT_LAG: u64 = 32;

/// `sum_{l=0}^{m-1} q^l`, the constant-coefficient weight at lag `m = n - k + 1`.
pub(crate) fn constant_weight(q: f64, m: u64) -> f64 {
    debug_assert!(m >= 1);
    if q == 1.0 {
        m as f64
    } else if m <= SHORT_LAG || (1.0 - q).abs() < NEAR_UNIT_Q {
        // Horner: 1 + q(1 + q(1 + ...))
        let mut acc = 1.0;
        for _ in 1..m {
            acc = 1.0 + q * acc;
        }
        acc
    } else if q == 0.0 {
        1.0
    } else {
        // 1 - q^m via expm1 so that |q| near 1 does not cancel
        let a = q.abs();
        let ln_a = if a >= 0.5 { (a - 1.0).ln_1p() } else { a.ln() };
        let e = m as f64 * ln_a;
        let one_minus_qm = if q > 0.0 || m.is_multiple_of(2) {
            -e.exp_m1()
        } else {
            1.0 + e.exp()
        };
        one_minus_qm / (1.0 - q)
    }
}

/// The weight `a(n,k)`.
pub fn weight(n: usize, k: usize, model: &ModelSpec) -> Result<f64> {
    if n == 0 || k == 0 {
        return Err(invalid(format!("weight indices must be >= 1 (n = {n}, k = {k})")));
    }
    if n < k {
        return Ok(0.0);
    }
    if n == k {
        return Ok(1.0);
    }
    match &model.coefficients {
        Coefficients::Constant(q) => Ok(constant_weight(*q, (n - k + 1) as u64)),
        Coefficients::Sequence(qs) => {
            if n > qs.len() {
                return Err(Error::CoefficientOutOfRange { index: n, len: qs.len() });
            }
            let mut product = 1.0;
            let mut sum = 1.0;
            for &q in &qs[k..n] {
                product *= q;
                sum += product;
            }
            Ok(sum)
        }
    }
}

/// The row `a(n,1), ..., a(n,n)` in O(n).
///
/// Sequence models use the backward form `a(n,k) = 1 + q_{k+1} a(n,k+1)`.
pub fn weight_row(model: &ModelSpec, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(invalid("row index n must be >= 1"));
    }
    match &model.coefficients {
        Coefficients::Constant(q) => Ok((1..=n)
            .map(|k| constant_weight(*q, (n - k + 1) as u64))
            .collect()),
        Coefficients::Sequence(qs) => {
            if n > qs.len() {
                return Err(Error::CoefficientOutOfRange { index: n, len: qs.len() });
            }
            let mut row = vec![1.0; n];
            for k in (1..n).rev() {
                row[k - 1] = 1.0 + qs[k] * row[k];
            }
            Ok(row)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// Run the recursion and take cumulative sums, O(n).
    Recursive,
    /// Evaluate every `S_m = sum_k a(m,k) theta_k` from the weights, O(n^2).
    Weighted,
}

/// A simulated path `xi_1..xi_n` with partial sums `S_1..S_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathResult {
    pub xi: Vec<f64>,
    pub partial_sums: Vec<f64>,
}

impl PathResult {
    pub fn n(&self) -> usize {
        self.xi.len()
    }

    /// `S_n` at the end of the path.
    pub fn last_sum(&self) -> f64 {
        *self.partial_sums.last().expect("paths are non-empty")
    }
}

/// Drive the model with the given innovations.
pub fn simulate_path(model: &ModelSpec, noise: &[f64], mode: PathMode) -> Result<PathResult> {
    let n = noise.len();
    if n == 0 {
        return Err(Error::EmptyNoise);
    }
    if noise.iter().any(|t| !t.is_finite()) {
        return Err(Error::NonFinite("noise"));
    }
    model.check_len(n)?;

    match mode {
        PathMode::Recursive => {
            let qs = model.coefficients_up_to(n)?;
            let mut xi = Vec::with_capacity(n);
            let mut sums = Vec::with_capacity(n);
            let mut prev = 0.0;
            let mut total = 0.0;
            for (k, &theta) in noise.iter().enumerate() {
                prev = step_recursion(prev, if k == 0 { 0.0 } else { qs[k] }, theta)?;
                total += prev;
                xi.push(prev);
                sums.push(total);
            }
            Ok(PathResult { xi, partial_sums: sums })
        }
        PathMode::Weighted => {
            let mut sums = Vec::with_capacity(n);
            match model.coefficients {
                Coefficients::Constant(q) => {
                    // a(m,k) depends on m - k only
                    let lag: Vec<f64> = (1..=n as u64).map(|m| constant_weight(q, m)).collect();
                    for m in 1..=n {
                        let s: f64 = (1..=m).map(|k| lag[m - k] * noise[k - 1]).sum();
                        sums.push(s);
                    }
                }
                Coefficients::Sequence(_) => {
                    for m in 1..=n {
                        let mut s = 0.0;
                        for k in 1..=m {
                            s += weight(m, k, model)? * noise[k - 1];
                        }
                        sums.push(s);
                    }
                }
            }
            let mut xi = Vec::with_capacity(n);
            let mut prev = 0.0;
            for &s in &sums {
                xi.push(s - prev);
                prev = s;
            }
            Ok(PathResult { xi, partial_sums: sums })
        }
    }
}

/// Full triangular table `a(n,k)` for `1 <= k <= n <= n_max`, row-major.
///
/// Refused above [`MAX_TABLE_N`]; use [`weight_row`] or [`weight`] instead.
pub fn weight_table(model: &ModelSpec, n_max: usize) -> Result<Vec<Vec<f64>>> {
    if n_max > MAX_TABLE_N {
        return Err(invalid(format!(
            "weight table of size {n_max} exceeds {MAX_TABLE_N}; compute rows on demand"
        )));
    }
    (1..=n_max).map(|n| weight_row(model, n)).collect()
}
