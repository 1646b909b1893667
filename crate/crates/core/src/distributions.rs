//! Innovation laws with controllable moment structure.
//!
//! Every family except [`NoiseSpec::ShiftedTwoPoint`] is symmetric about 0.
//! The families are picked so that each side of a moment dichotomy can be
//! realized: light tails (normal, uniform, Rademacher), polynomial tails with
//! a prescribed index (symmetric Pareto, Student t), and an asymmetric
//! finite-support law for the centring conditions.

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use rand_distr::{Distribution, StandardNormal};
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{invalid, Error, Result};
use crate::numeric::{integrate, normal_two_sided_sf};

/// Relative tolerance for quadrature-based moments.
pub const QUADRATURE_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum NoiseSpec {
    Normal { sigma: f64 },
    /// Uniform on `{-1, +1}`.
    Rademacher,
    /// Uniform on `[-half_width, half_width]`.
    Uniform { half_width: f64 },
    /// `S * X` with `S` a Rademacher sign and `X` Pareto with minimum `scale`
    /// and index `alpha`, so `P{|theta| > x} = (x / scale)^(-alpha)` for `x >= scale`.
    SymmetricPareto { alpha: f64, scale: f64 },
    /// Standard Student t with `nu` degrees of freedom.
    StudentT { nu: f64 },
    /// `a` with probability `prob_a`, otherwise `b`.
    ShiftedTwoPoint { a: f64, b: f64, prob_a: f64 },
}

/// An absolute moment `E|theta|^s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Moment {
    /// Closed form.
    Exact(f64),
    /// Adaptive quadrature at [`QUADRATURE_TOL`].
    Numeric(f64),
    Infinite,
}

impl Moment {
    pub fn value(&self) -> f64 {
        match *self {
            Moment::Exact(v) | Moment::Numeric(v) => v,
            Moment::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        !matches!(self, Moment::Infinite)
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Moment::Numeric(_))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite and > 0, got {v}")))
    }
}

impl NoiseSpec {
    pub fn standard_normal() -> Self {
        NoiseSpec::Normal { sigma: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSpec::Normal { sigma } => positive("sigma", sigma),
            NoiseSpec::Rademacher => Ok(()),
            NoiseSpec::Uniform { half_width } => positive("half_width", half_width),
            NoiseSpec::SymmetricPareto { alpha, scale } => {
                positive("alpha", alpha)?;
                positive("scale", scale)
            }
            NoiseSpec::StudentT { nu } => positive("nu", nu),
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => {
                if !a.is_finite() || !b.is_finite() {
                    return Err(Error::NonFinite("two-point atoms"));
                }
                if !(prob_a > 0.0 && prob_a < 1.0) {
                    return Err(invalid(format!("prob_a must lie in (0, 1), got {prob_a}")));
                }
                Ok(())
            }
        }
    }

    /// Supremum of the `s` with `E|theta|^s < inf`.
    pub fn tail_index(&self) -> f64 {
        match *self {
            NoiseSpec::SymmetricPareto { alpha, .. } => alpha,
            NoiseSpec::StudentT { nu } => nu,
            _ => f64::INFINITY,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match *self {
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => a == -b && (a == 0.0 || prob_a == 0.5),
            _ => true,
        }
    }

    /// `E theta`; zero for the symmetric families by symmetry.
    pub fn mean(&self) -> f64 {
        match *self {
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => prob_a * a + (1.0 - prob_a) * b,
            _ => 0.0,
        }
    }

    /// True when the mean vanishes up to round-off in the atoms.
    pub fn is_centered(&self) -> bool {
        match *self {
            NoiseSpec::ShiftedTwoPoint { a, b, .. } => {
                self.mean().abs() <= 1e-12 * a.abs().max(b.abs())
            }
            _ => true,
        }
    }

    /// Atoms and their probabilities, for finite-support laws.
    pub fn support(&self) -> Option<Vec<(f64, f64)>> {
        match *self {
            NoiseSpec::Rademacher => Some(vec![(-1.0, 0.5), (1.0, 0.5)]),
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => {
                if a == b {
                    Some(vec![(a, 1.0)])
                } else {
                    Some(vec![(a, prob_a), (b, 1.0 - prob_a)])
                }
            }
            _ => None,
        }
    }

    /// Largest attainable `|theta|`, infinite for unbounded laws.
    pub fn max_abs(&self) -> f64 {
        match *self {
            NoiseSpec::Rademacher => 1.0,
            NoiseSpec::Uniform { half_width } => half_width,
            NoiseSpec::ShiftedTwoPoint { a, b, .. } => a.abs().max(b.abs()),
            _ => f64::INFINITY,
        }
    }

    /// `P{|theta| > x}`.
    pub fn abs_tail(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 1.0;
        }
        match *self {
            NoiseSpec::Normal { sigma } => normal_two_sided_sf(x / sigma),
            NoiseSpec::Rademacher => {
                if x < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            NoiseSpec::Uniform { half_width } => (1.0 - x / half_width).max(0.0),
            NoiseSpec::SymmetricPareto { alpha, scale } => {
                if x <= scale {
                    1.0
                } else {
                    (x / scale).powf(-alpha)
                }
            }
            NoiseSpec::StudentT { nu } => {
                if x == 0.0 {
                    1.0
                } else {
                    let t = StudentsT::new(0.0, 1.0, nu).expect("validated nu");
                    2.0 * t.sf(x)
                }
            }
            NoiseSpec::ShiftedTwoPoint { .. } => self
                .support()
                .expect("finite support")
                .iter()
                .filter(|(v, _)| v.abs() > x)
                .map(|(_, p)| p)
                .sum(),
        }
    }

    /// `E|theta|^s`, infinite once `s` reaches the tail index.
    pub fn abs_moment(&self, s: f64) -> Result<Moment> {
        if !s.is_finite() || s <= 0.0 {
            return Err(invalid(format!("moment order must be finite and > 0, got {s}")));
        }
        self.validate()?;
        if !self.moment_finite(s) {
            return Ok(Moment::Infinite);
        }
        Ok(match *self {
            NoiseSpec::Normal { sigma } => Moment::Exact(
                sigma.powf(s) * 2f64.powf(s / 2.0) * gamma((s + 1.0) / 2.0)
                    / std::f64::consts::PI.sqrt(),
            ),
            NoiseSpec::Rademacher => Moment::Exact(1.0),
            NoiseSpec::Uniform { half_width } => Moment::Exact(half_width.powf(s) / (s + 1.0)),
            NoiseSpec::SymmetricPareto { alpha, scale } => {
                Moment::Exact(alpha * scale.powf(s) / (alpha - s))
            }
            NoiseSpec::StudentT { nu } => Moment::Numeric(student_abs_moment(nu, s)?),
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => {
                Moment::Exact(prob_a * a.abs().powf(s) + (1.0 - prob_a) * b.abs().powf(s))
            }
        })
    }

    /// `E|theta|^s < inf`, i.e. `s < tail_index`.
    pub fn moment_finite(&self, s: f64) -> bool {
        s < self.tail_index()
    }

    /// The median; the smallest `m` with `F(m) >= 1/2` for the two-point law.
    pub fn median(&self) -> f64 {
        match *self {
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => {
                let (lo, p_lo, hi) = if a <= b { (a, prob_a, b) } else { (b, 1.0 - prob_a, a) };
                if p_lo >= 0.5 {
                    lo
                } else {
                    hi
                }
            }
            _ => 0.0,
        }
    }

    /// A prepared sampler for hot loops.
    pub fn sampler(&self) -> Result<Sampler> {
        self.validate()?;
        Ok(match *self {
            NoiseSpec::Normal { sigma } => Sampler::Normal { sigma },
            NoiseSpec::Rademacher => Sampler::Rademacher,
            NoiseSpec::Uniform { half_width } => Sampler::Uniform { half_width },
            NoiseSpec::SymmetricPareto { alpha, scale } => Sampler::Pareto {
                neg_inv_alpha: -1.0 / alpha,
                scale,
            },
            NoiseSpec::StudentT { nu } => Sampler::StudentT(
                rand_distr::StudentT::new(nu).map_err(|e| invalid(e.to_string()))?,
            ),
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => Sampler::TwoPoint { a, b, prob_a },
        })
    }
}

/// `E|T|^s` for Student t by quadrature: the density on `[0, 1]` directly,
/// the tail after `x = w^(-1/(nu - s))`, which removes the algebraic decay.
fn student_abs_moment(nu: f64, s: f64) -> Result<f64> {
    let delta = nu - s;
    let norm =
        (ln_gamma((nu + 1.0) / 2.0) - ln_gamma(nu / 2.0)).exp() / (nu * std::f64::consts::PI).sqrt();
    let expo = -(nu + 1.0) / 2.0;
    let body = integrate(
        |x: f64| x.powf(s) * (1.0 + x * x / nu).powf(expo),
        0.0,
        1.0,
        QUADRATURE_TOL * 0.1,
    )?;
    let tail = integrate(
        |w: f64| (w.powf(2.0 / delta) + 1.0 / nu).powf(expo) / delta,
        0.0,
        1.0,
        QUADRATURE_TOL * 0.1,
    )?;
    Ok(2.0 * norm * (body + tail))
}

/// Sampler prepared from a [`NoiseSpec`].
#[derive(Clone, Debug)]
pub enum Sampler {
    Normal { sigma: f64 },
    Rademacher,
    Uniform { half_width: f64 },
    Pareto { neg_inv_alpha: f64, scale: f64 },
    StudentT(rand_distr::StudentT<f64>),
    TwoPoint { a: f64, b: f64, prob_a: f64 },
}

const UNIT: f64 = 1.0 / (1u64 << 53) as f64;

impl Sampler {
    #[inline]
    pub fn draw<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Sampler::Normal { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
            Sampler::Rademacher => {
                if rng.next_u64() >> 63 == 0 {
                    -1.0
                } else {
                    1.0
                }
            }
            Sampler::Uniform { half_width } => {
                let u = (rng.next_u64() >> 11) as f64 * UNIT;
                half_width * (2.0 * u - 1.0)
            }
            Sampler::Pareto { neg_inv_alpha, scale } => {
                let bits = rng.next_u64();
                // bits 11..64 give u in (0, 1], bit 0 gives the sign
                let u = ((bits >> 11) + 1) as f64 * UNIT;
                let x = scale * u.powf(neg_inv_alpha);
                if bits & 1 == 0 {
                    x
                } else {
                    -x
                }
            }
            Sampler::StudentT(ref t) => t.sample(rng),
            Sampler::TwoPoint { a, b, prob_a } => {
                let u = (rng.next_u64() >> 11) as f64 * UNIT;
                if u < prob_a {
                    a
                } else {
                    b
                }
            }
        }
    }
}

impl Distribution<f64> for Sampler {
    fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.draw(rng)
    }
}

/// One variate from `spec`.
pub fn sample<R: RngCore + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> Result<f64> {
    Ok(spec.sampler()?.draw(rng))
}

/// One draw of `theta - theta'` with independent copies.
pub fn symmetrize<R: RngCore + ?Sized>(spec: &NoiseSpec, rng: &mut R) -> Result<f64> {
    let s = spec.sampler()?;
    let x = s.draw(rng);
    let y = s.draw(rng);
    Ok(x - y)
}

impl fmt::Display for NoiseSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            NoiseSpec::Normal { sigma } => write!(f, "normal:{sigma}"),
            NoiseSpec::Rademacher => write!(f, "rademacher"),
            NoiseSpec::Uniform { half_width } => write!(f, "uniform:{half_width}"),
            NoiseSpec::SymmetricPareto { alpha, scale } => write!(f, "pareto:{alpha},{scale}"),
            NoiseSpec::StudentT { nu } => write!(f, "student:{nu}"),
            NoiseSpec::ShiftedTwoPoint { a, b, prob_a } => write!(f, "twopoint:{a},{b},{prob_a}"),
        }
    }
}

impl FromStr for NoiseSpec {
    type Err = Error;

    /// `normal:SIGMA`, `rademacher`, `uniform:H`, `pareto:ALPHA[,SCALE]`,
    /// `student:NU`, `twopoint:A,B,PROB_A`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (family, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<f64>()
                        .map_err(|_| invalid(format!("bad number '{t}' in noise spec '{s}'")))
                })
                .collect::<Result<_>>()?
        };
        let want = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(invalid(format!("noise spec '{s}' expects {k} parameter(s)")))
            }
        };
        let spec = match family.to_ascii_lowercase().as_str() {
            "normal" | "gauss" | "gaussian" => {
                if nums.is_empty() {
                    NoiseSpec::standard_normal()
                } else {
                    want(1)?;
                    NoiseSpec::Normal { sigma: nums[0] }
                }
            }
            "rademacher" => {
                want(0)?;
                NoiseSpec::Rademacher
            }
            "uniform" => {
                want(1)?;
                NoiseSpec::Uniform { half_width: nums[0] }
            }
            "pareto" => match nums.len() {
                1 => NoiseSpec::SymmetricPareto { alpha: nums[0], scale: 1.0 },
                _ => {
                    want(2)?;
                    NoiseSpec::SymmetricPareto { alpha: nums[0], scale: nums[1] }
                }
            },
            "student" | "t" => {
                want(1)?;
                NoiseSpec::StudentT { nu: nums[0] }
            }
            "twopoint" => {
                want(3)?;
                NoiseSpec::ShiftedTwoPoint { a: nums[0], b: nums[1], prob_a: nums[2] }
            }
            other => return Err(invalid(format!("unknown noise family '{other}'"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    const TWO_POINT: NoiseSpec = NoiseSpec::ShiftedTwoPoint { a: -1.0, b: 2.0, prob_a: 2.0 / 3.0 };

    #[test]
    fn supports() {
        let mut rng = Stream::new(3);
        for _ in 0..1000 {
            let r = sample(&NoiseSpec::Rademacher, &mut rng).unwrap();
            assert!(r == -1.0 || r == 1.0);
            let u = sample(&NoiseSpec::Uniform { half_width: 2.0 }, &mut rng).unwrap();
            assert!((-2.0..=2.0).contains(&u));
            let s = symmetrize(&NoiseSpec::Rademacher, &mut rng).unwrap();
            assert!([-2.0, 0.0, 2.0].contains(&s));
            let p = sample(&NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 2.0 }, &mut rng).unwrap();
            assert!(p.abs() >= 2.0);
        }
    }

    #[test]
    fn normal_sample_mean() {
        let mut rng = Stream::new(11);
        let s = NoiseSpec::standard_normal().sampler().unwrap();
        let n = 1_000_000;
        let mean = (0..n).map(|_| s.draw(&mut rng)).sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.005, "{mean}");
    }

    #[test]
    fn moment_examples() {
        assert_eq!(NoiseSpec::Rademacher.abs_moment(7.3).unwrap(), Moment::Exact(1.0));
        assert_eq!(
            NoiseSpec::SymmetricPareto { alpha: 2.5, scale: 1.0 }.abs_moment(2.5).unwrap(),
            Moment::Infinite
        );
        let u = NoiseSpec::Uniform { half_width: 1.0 }.abs_moment(2.0).unwrap().value();
        assert!((u - 1.0 / 3.0).abs() < 1e-15);
        let g = NoiseSpec::standard_normal().abs_moment(2.0).unwrap().value();
        assert!((g - 1.0).abs() < 1e-14);
        assert!(NoiseSpec::Rademacher.abs_moment(0.0).is_err());
        assert!(NoiseSpec::Rademacher.abs_moment(-1.0).is_err());
    }

    #[test]
    fn moment_finite_examples() {
        assert!(!NoiseSpec::StudentT { nu: 1.5 }.moment_finite(2.0));
        assert!(NoiseSpec::SymmetricPareto { alpha: 2.5, scale: 1.0 }.moment_finite(2.0));
        assert!(NoiseSpec::Normal { sigma: 3.0 }.moment_finite(100.0));
    }

    #[test]
    fn student_moment_matches_gamma_identity() {
        // E|T|^s = nu^{s/2} Gamma((s+1)/2) Gamma((nu-s)/2) / (sqrt(pi) Gamma(nu/2))
        let oracle = |nu: f64, s: f64| {
            (s / 2.0 * nu.ln() + ln_gamma((s + 1.0) / 2.0) + ln_gamma((nu - s) / 2.0)
                - ln_gamma(nu / 2.0))
            .exp()
                / std::f64::consts::PI.sqrt()
        };
        for &(nu, s) in &[(3.0, 1.0), (3.0, 2.0), (2.5, 2.4), (1.8, 0.5), (10.0, 4.0), (4.0, 3.99)] {
            let m = NoiseSpec::StudentT { nu }.abs_moment(s).unwrap();
            assert!(m.is_numeric());
            let want = oracle(nu, s);
            assert!(
                (m.value() - want).abs() <= 1e-7 * want,
                "nu={nu} s={s}: {} vs {want}",
                m.value()
            );
        }
        assert_eq!(NoiseSpec::StudentT { nu: 1.8 }.abs_moment(2.0).unwrap(), Moment::Infinite);
    }

    #[test]
    fn moment_finiteness_agrees_with_abs_moment() {
        let specs = [
            NoiseSpec::standard_normal(),
            NoiseSpec::Rademacher,
            NoiseSpec::Uniform { half_width: 0.5 },
            NoiseSpec::SymmetricPareto { alpha: 2.5, scale: 1.0 },
            NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 3.0 },
            NoiseSpec::StudentT { nu: 3.0 },
            NoiseSpec::StudentT { nu: 1.8 },
            TWO_POINT,
        ];
        for spec in specs {
            for i in 1..=32 {
                let s = 0.25 * i as f64;
                let m = spec.abs_moment(s).unwrap();
                assert_eq!(spec.moment_finite(s), m.is_finite(), "{spec} s={s}");
                if m.is_finite() {
                    assert!(m.value().is_finite() && m.value() > 0.0);
                }
            }
        }
    }

    #[test]
    fn sample_moments_converge() {
        let cases = [
            (NoiseSpec::standard_normal(), 0.5),
            (NoiseSpec::Normal { sigma: 2.0 }, 3.0),
            (NoiseSpec::Uniform { half_width: 2.0 }, 1.5),
            (NoiseSpec::Rademacher, 2.0),
            (TWO_POINT, 2.5),
            (NoiseSpec::SymmetricPareto { alpha: 5.0, scale: 1.0 }, 2.0),
            (NoiseSpec::StudentT { nu: 6.0 }, 2.0),
            (NoiseSpec::StudentT { nu: 5.0 }, 1.0),
        ];
        for (i, (spec, s)) in cases.iter().enumerate() {
            assert!(s + 1.0 < spec.tail_index());
            let sampler = spec.sampler().unwrap();
            let mut rng = Stream::substream(99, i as u64, 0);
            let n = 1_000_000;
            let (mut m1, mut m2) = (0.0, 0.0);
            for _ in 0..n {
                let v = sampler.draw(&mut rng).abs().powf(*s);
                m1 += v;
                m2 += v * v;
            }
            let mean = m1 / n as f64;
            let se = ((m2 / n as f64 - mean * mean).max(0.0) / n as f64).sqrt();
            let want = spec.abs_moment(*s).unwrap().value();
            assert!(
                (mean - want).abs() <= 5.0 * se.max(1e-15),
                "{spec} s={s}: {mean} vs {want} (se {se})"
            );
        }
    }

    #[test]
    fn symmetrization_doubles_variance() {
        for (i, spec) in [
            NoiseSpec::standard_normal(),
            NoiseSpec::Uniform { half_width: 1.0 },
            NoiseSpec::Rademacher,
        ]
        .iter()
        .enumerate()
        {
            let var = spec.abs_moment(2.0).unwrap().value();
            let mut rng = Stream::substream(5, i as u64, 0);
            let n = 1_000_000;
            let v = (0..n)
                .map(|_| symmetrize(spec, &mut rng).unwrap().powi(2))
                .sum::<f64>()
                / n as f64;
            assert!((v / (2.0 * var) - 1.0).abs() < 0.01, "{spec}: {v}");
        }
    }

    fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let (n, m) = (a.len() as f64, b.len() as f64);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            d = d.max((i as f64 / n - j as f64 / m).abs());
        }
        d
    }

    #[test]
    fn symmetrized_law_is_symmetric() {
        let n = 100_000;
        // two-sample KS critical value at level 0.01
        let critical = 1.628 * (2.0 / n as f64).sqrt();
        for (i, spec) in [
            NoiseSpec::standard_normal(),
            NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 },
            NoiseSpec::StudentT { nu: 2.5 },
            NoiseSpec::Uniform { half_width: 3.0 },
        ]
        .iter()
        .enumerate()
        {
            let mut r1 = Stream::substream(17, i as u64, 0);
            let mut r2 = Stream::substream(17, i as u64, 1);
            let a: Vec<f64> = (0..n).map(|_| symmetrize(spec, &mut r1).unwrap()).collect();
            let b: Vec<f64> = (0..n).map(|_| -symmetrize(spec, &mut r2).unwrap()).collect();
            let d = ks_two_sample(a, b);
            assert!(d < critical, "{spec}: D = {d}, critical {critical}");
        }
    }

    #[test]
    fn two_point_symmetrization_table() {
        // theta - theta' over the 2x2 outcome table
        let support = TWO_POINT.support().unwrap();
        let mut zero = 0.0;
        let mut values = Vec::new();
        for &(x, px) in &support {
            for &(y, py) in &support {
                let d: f64 = x - y;
                if d == 0.0 {
                    zero += px * py;
                }
                values.push(d);
            }
        }
        assert!((zero - 5.0 / 9.0).abs() < 1e-15);
        values.sort_by(f64::total_cmp);
        values.dedup();
        assert_eq!(values, vec![-3.0, 0.0, 3.0]);
    }

    #[test]
    fn medians() {
        assert_eq!(NoiseSpec::Normal { sigma: 5.0 }.median(), 0.0);
        assert_eq!(TWO_POINT.median(), -1.0);
        assert_eq!(NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 }.median(), 0.0);
        let right = NoiseSpec::ShiftedTwoPoint { a: -1.0, b: 2.0, prob_a: 0.25 };
        assert_eq!(right.median(), 2.0);
    }

    #[test]
    fn tails() {
        let p = NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 };
        assert!((p.abs_tail(100.0) - 1e-3).abs() < 1e-18);
        assert_eq!(p.abs_tail(0.5), 1.0);
        assert_eq!(NoiseSpec::Uniform { half_width: 2.0 }.abs_tail(0.5), 0.75);
        assert_eq!(NoiseSpec::Rademacher.abs_tail(0.999), 1.0);
        assert_eq!(NoiseSpec::Rademacher.abs_tail(1.0), 0.0);
        assert!((TWO_POINT.abs_tail(1.5) - 1.0 / 3.0).abs() < 1e-15);
        // Cauchy: P{|T| > 1} = 1/2
        assert!((NoiseSpec::StudentT { nu: 1.0 }.abs_tail(1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn centring_and_symmetry() {
        assert!(TWO_POINT.is_centered());
        assert!(!TWO_POINT.is_symmetric());
        let off = NoiseSpec::ShiftedTwoPoint { a: 0.0, b: 1.0, prob_a: 0.5 };
        assert!(!off.is_centered());
        assert!(NoiseSpec::ShiftedTwoPoint { a: -2.0, b: 2.0, prob_a: 0.5 }.is_symmetric());
    }

    #[test]
    fn noise_strings_round_trip() {
        for spec in [
            NoiseSpec::Normal { sigma: 1.5 },
            NoiseSpec::Rademacher,
            NoiseSpec::Uniform { half_width: 2.0 },
            NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 },
            NoiseSpec::StudentT { nu: 1.8 },
            TWO_POINT,
        ] {
            assert_eq!(spec.to_string().parse::<NoiseSpec>().unwrap(), spec);
        }
        assert!("pareto:-1".parse::<NoiseSpec>().is_err());
        assert!("twopoint:1,2".parse::<NoiseSpec>().is_err());
        assert!("cauchy".parse::<NoiseSpec>().is_err());
    }
}
