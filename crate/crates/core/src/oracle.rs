//! Exact tail probabilities `P{|S_n| > eps n^(1/p)}`.
//!
//! Gaussian innovations make `S_n` Gaussian with variance
//! `sigma^2 sum_k a(n,k)^2`, so the tail is a single `erfc` evaluation.
//! Finite-support innovations are handled by summing over every noise word.

use crate::distributions::NoiseSpec;
use crate::error::{invalid, Error, Result};
use crate::model::{constant_weight, weight_row, Coefficients, ModelSpec, NEAR_UNIT_Q};
use crate::numeric::{normal_two_sided_sf, CompensatedSum};

/// Largest number of noise words [`enumerate_tail`] will visit.
pub const ENUMERATION_BUDGET: u64 = 1 << 24;

/// The event `|S_n| > eps n^(1/p)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailQuery {
    pub n: u64,
    pub p: f64,
    pub epsilon: f64,
}

impl TailQuery {
    pub fn new(n: u64, p: f64, epsilon: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        // p = 2 (the CLT scaling) is a valid tail query even though the series needs p < 2
        if !(p > 0.0 && p <= 2.0) {
            return Err(invalid(format!("p must lie in (0, 2], got {p}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
        }
        Ok(Self { n, p, epsilon })
    }

    /// The query whose threshold `eps n^(1/p)` equals `threshold`.
    pub fn from_threshold(n: u64, p: f64, threshold: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n must be >= 1"));
        }
        Self::new(n, p, threshold / (n as f64).powf(1.0 / p))
    }

    pub fn threshold(&self) -> f64 {
        self.epsilon * (self.n as f64).powf(1.0 / self.p)
    }
}

/// `Var S_n = sigma^2 sum_k a(n,k)^2` under Gaussian innovations.
pub fn variance_of_sum(model: &ModelSpec, n: u64, sigma: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(invalid(format!("sigma must be finite and > 0, got {sigma}")));
    }
    let mut acc = CompensatedSum::new();
    match model.coefficients() {
        Coefficients::Constant(q) => {
            let q = *q;
            if q != 1.0 && (1.0 - q).abs() < NEAR_UNIT_Q {
                // Horner recursion w(m) = 1 + q w(m-1) keeps this O(n)
                let mut w = 0.0;
                for _ in 0..n {
                    w = 1.0 + q * w;
                    acc.add(w * w);
                }
            } else {
                for m in 1..=n {
                    let w = constant_weight(q, m);
                    acc.add(w * w);
                }
            }
        }
        Coefficients::Sequence(_) => {
            let row = weight_row(model, n as usize)?;
            for w in row {
                acc.add(w * w);
            }
        }
    }
    Ok(sigma * sigma * acc.value())
}

/// `n(n+1)(2n+1)/6`, the `q = 1` weight-square sum, rounded once.
pub fn unit_root_square_sum(n: u64) -> f64 {
    let n = n as u128;
    (n * (n + 1) * (2 * n + 1) / 6) as f64
}

/// `Phi_0(x) = (2 pi)^(-1/2) int_0^x exp(-t^2/2) dt`, odd in `x`.
pub fn phi0(x: f64) -> f64 {
    if x.is_infinite() {
        return 0.5_f64.copysign(x);
    }
    0.5 * libm::erf(x / std::f64::consts::SQRT_2)
}

/// `P{|S_n| > threshold}` under `N(0, sigma^2)` innovations.
pub fn gaussian_tail_at(model: &ModelSpec, n: u64, sigma: f64, threshold: f64) -> Result<f64> {
    if threshold.is_nan() {
        return Err(Error::NonFinite("threshold"));
    }
    let sd = variance_of_sum(model, n, sigma)?.sqrt();
    Ok(normal_two_sided_sf(threshold / sd))
}

/// `1 - 2 Phi_0(eps n^(1/p) / sd(S_n))`, evaluated as one `erfc`.
pub fn exact_gaussian_tail(model: &ModelSpec, query: &TailQuery, sigma: f64) -> Result<f64> {
    gaussian_tail_at(model, query.n, sigma, query.threshold())
}

/// Limit of the `q = 1`, `p = 2/3` Gaussian tail: `2(1 - Phi(eps sqrt 3))`.
pub fn unit_root_limit(epsilon: f64) -> f64 {
    normal_two_sided_sf(epsilon * 3f64.sqrt())
}

fn finite_support(spec: &NoiseSpec) -> Result<Vec<(f64, f64)>> {
    spec.validate()?;
    spec.support()
        .ok_or_else(|| Error::InfiniteSupport(spec.to_string()))
}

fn check_budget(m: usize, n: u64) -> Result<()> {
    let required = (m as f64).powf(n as f64);
    if required > ENUMERATION_BUDGET as f64 {
        return Err(Error::EnumerationTooLarge { required, budget: ENUMERATION_BUDGET });
    }
    Ok(())
}

/// True when `spec` has finite support and `m^n` fits the budget.
pub fn enumerable(spec: &NoiseSpec, n: u64) -> bool {
    spec.support()
        .is_some_and(|s| (s.len() as f64).powf(n as f64) <= ENUMERATION_BUDGET as f64)
}

fn walk(weights: &[f64], atoms: &[(f64, f64)], partial: f64, prob: f64, t: f64, acc: &mut CompensatedSum) {
    match weights.split_first() {
        None => {
            if partial.abs() > t {
                acc.add(prob);
            }
        }
        Some((w, rest)) => {
            for &(v, p) in atoms {
                walk(rest, atoms, partial + w * v, prob * p, t, acc);
            }
        }
    }
}

fn walk_count(weights: &[f64], partial: f64, t: f64, hits: &mut u64) {
    match weights.split_first() {
        None => {
            if partial.abs() > t {
                *hits += 1;
            }
        }
        Some((w, rest)) => {
            walk_count(rest, partial - w, t, hits);
            walk_count(rest, partial + w, t, hits);
        }
    }
}

/// Rademacher innovations: `(#{words with |S_n| > threshold}, 2^n)`.
pub fn rademacher_exceedance_count(model: &ModelSpec, n: u64, threshold: f64) -> Result<(u64, u64)> {
    check_budget(2, n)?;
    let weights = weight_row(model, n as usize)?;
    let mut hits = 0;
    walk_count(&weights, 0.0, threshold, &mut hits);
    Ok((hits, 1u64 << n))
}

/// Exact `P{|S_n| > threshold}` by summing over all `m^n` noise words.
///
/// Rademacher noise is counted in integers, so the result is an exact dyadic.
pub fn enumerate_tail_at(model: &ModelSpec, spec: &NoiseSpec, n: u64, threshold: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    let atoms = finite_support(spec)?;
    check_budget(atoms.len(), n)?;
    if *spec == NoiseSpec::Rademacher {
        let (hits, total) = rademacher_exceedance_count(model, n, threshold)?;
        return Ok(hits as f64 / total as f64);
    }
    let weights = weight_row(model, n as usize)?;
    let mut acc = CompensatedSum::new();
    walk(&weights, &atoms, 0.0, 1.0, threshold, &mut acc);
    Ok(acc.value())
}

pub fn enumerate_tail(model: &ModelSpec, spec: &NoiseSpec, query: &TailQuery) -> Result<f64> {
    enumerate_tail_at(model, spec, query.n, query.threshold())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(v: f64) -> ModelSpec {
        ModelSpec::constant(v).unwrap()
    }

    #[test]
    fn variance_examples() {
        assert_eq!(variance_of_sum(&q(1.0), 3, 1.0).unwrap(), 14.0);
        assert_eq!(variance_of_sum(&q(0.0), 10, 2.0).unwrap(), 40.0);
        assert_eq!(variance_of_sum(&q(0.5), 2, 1.0).unwrap(), 3.25);
        assert!(variance_of_sum(&q(0.5), 0, 1.0).is_err());
    }

    #[test]
    fn phi0_examples() {
        assert_eq!(phi0(0.0), 0.0);
        assert_eq!(phi0(f64::INFINITY), 0.5);
        assert_eq!(phi0(f64::NEG_INFINITY), -0.5);
        // Phi(1) - 1/2, 50-digit reference
        let v = phi0(1.0); assert!((v - 0.341_344_746_068_542_9).abs() < 1e-15, "{v:.20}");
        assert_eq!(phi0(-1.3), -phi0(1.3));
    }

    #[test]
    fn gaussian_tail_examples() {
        let t = exact_gaussian_tail(&q(0.0), &TailQuery::new(1, 2.0, 1.0).unwrap(), 1.0).unwrap();
        assert!((t - 0.317_310_507_862_914_1).abs() < 1e-15, "{t:.20}");
        assert_eq!(gaussian_tail_at(&q(0.7), 5, 1.0, 0.0).unwrap(), 1.0);
        let lim = unit_root_limit(1.0);
        assert!((lim - 0.083_264_516_663_550_5).abs() < 1e-15);
    }

    #[test]
    fn enumeration_examples() {
        let r = NoiseSpec::Rademacher;
        assert_eq!(enumerate_tail_at(&q(0.0), &r, 2, 1.5).unwrap(), 0.5);
        assert_eq!(enumerate_tail_at(&q(1.0), &r, 2, 2.5).unwrap(), 0.5);
        assert_eq!(enumerate_tail_at(&q(0.5), &r, 6, 100.0).unwrap(), 0.0);
        let tp = NoiseSpec::ShiftedTwoPoint { a: -1.0, b: 2.0, prob_a: 2.0 / 3.0 };
        assert_eq!(enumerate_tail_at(&q(0.3), &tp, 5, 1e6).unwrap(), 0.0);
        // P{|theta_1| > 1.5} = 1/3
        assert!((enumerate_tail_at(&q(0.3), &tp, 1, 1.5).unwrap() - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn enumeration_rejects_bad_inputs() {
        let r = NoiseSpec::Rademacher;
        assert!(matches!(
            enumerate_tail_at(&q(0.0), &r, 25, 1.0),
            Err(Error::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            enumerate_tail_at(&q(0.0), &NoiseSpec::standard_normal(), 3, 1.0),
            Err(Error::InfiniteSupport(_))
        ));
        assert!(enumerable(&r, 24));
        assert!(!enumerable(&r, 25));
    }

    #[test]
    fn rademacher_counts_are_complementary() {
        for &qq in &[-1.0, -0.5, 0.0, 0.5, 1.0] {
            for n in 1..=12u64 {
                for &t in &[0.5, 1.0, 2.5, 4.0] {
                    let (hit, total) = rademacher_exceedance_count(&q(qq), n, t).unwrap();
                    let weights = weight_row(&q(qq), n as usize).unwrap();
                    // independent count of the complement by brute-force bit words
                    let mut inside = 0u64;
                    for word in 0..(1u64 << n) {
                        let s: f64 = weights
                            .iter()
                            .enumerate()
                            .map(|(k, w)| if word >> k & 1 == 1 { *w } else { -*w })
                            .sum();
                        if s.abs() <= t {
                            inside += 1;
                        }
                    }
                    assert_eq!(hit + inside, total);
                }
            }
        }
    }

    #[test]
    fn query_validation() {
        assert!(TailQuery::new(0, 1.0, 1.0).is_err());
        assert!(TailQuery::new(1, 2.5, 1.0).is_err());
        assert!(TailQuery::new(1, 2.0, 1.0).is_ok());
        assert!(TailQuery::new(1, 0.0, 1.0).is_err());
        assert!(TailQuery::new(1, 1.0, 0.0).is_err());
        let tq = TailQuery::from_threshold(8, 1.5, 2.0).unwrap();
        assert!((tq.threshold() - 2.0).abs() < 1e-15);
    }
}
