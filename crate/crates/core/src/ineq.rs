//! Numerical checks of the classical inequalities for sums of independent
//! terms, applied to the weighted terms `X_k = a(n,k) theta_k` of the
//! autoregression sum.
//!
//! Finite-support noise is enumerated exactly over all noise words; other
//! laws fall back to Monte Carlo, where a violation whose two sides have
//! overlapping confidence intervals is flagged rather than counted.
//!
//! Every threshold is evaluated at `x - 1e-9` and `x + 1e-9` so results do
//! not hinge on whether an atom sits exactly on the boundary.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::distributions::{NoiseSpec, Sampler};
use crate::error::{invalid, Error, Result};
use crate::model::{weight_row, ModelSpec};
use crate::montecarlo::wilson_interval;
use crate::numeric::{normal_quantile, CompensatedSum};
use crate::oracle::{enumerable, ENUMERATION_BUDGET};
use crate::rng::Stream;

pub const PERTURBATION: f64 = 1e-9;
/// Relative slack for exact comparisons, absorbing floating-point rounding.
pub const EXACT_SLACK: f64 = 1e-12;
pub const DEFAULT_DRAWS: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 0x14E9_5EED;
pub const MAX_ENUMERATED_N: u64 = 12;
/// Largest accepted max/min spread of the moment ratio across `n`.
pub const MZ_SPREAD_LIMIT: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CheckMethod {
    Enumerated,
    MonteCarlo,
}

impl fmt::Display for CheckMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IneqReport {
    pub name: String,
    pub instances_checked: u64,
    pub violations: u64,
    /// Monte Carlo violations within interval overlap.
    pub flagged: u64,
    /// Smallest `rhs - lhs` seen; `inf` when nothing was asserted.
    pub worst_margin: f64,
    pub method: CheckMethod,
}

impl IneqReport {
    pub fn new(name: &str, method: CheckMethod) -> Self {
        Self {
            name: name.to_string(),
            instances_checked: 0,
            violations: 0,
            flagged: 0,
            worst_margin: f64::INFINITY,
            method,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Fold another report's counts into this one.
    pub fn absorb(&mut self, other: &IneqReport) {
        self.instances_checked += other.instances_checked;
        self.violations += other.violations;
        self.flagged += other.flagged;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        if other.method == CheckMethod::MonteCarlo {
            self.method = CheckMethod::MonteCarlo;
        }
    }

    fn record(&mut self, lhs: Est, rhs: Est) {
        self.instances_checked += 1;
        let margin = rhs.value - lhs.value;
        self.worst_margin = self.worst_margin.min(margin);
        let slack = EXACT_SLACK * lhs.value.abs().max(rhs.value.abs()).max(1.0);
        if margin >= -slack {
            return;
        }
        if self.method == CheckMethod::MonteCarlo && lhs.lo <= rhs.hi {
            self.flagged += 1;
        } else {
            self.violations += 1;
        }
    }
}

impl fmt::Display for IneqReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} instances, {} violations, {} flagged, worst margin {:e} ({})",
            self.name,
            self.instances_checked,
            self.violations,
            self.flagged,
            self.worst_margin,
            self.method
        )
    }
}

/// A value with a confidence range; exact values have `lo = hi = value`.
#[derive(Clone, Copy, Debug)]
struct Est {
    value: f64,
    lo: f64,
    hi: f64,
}

impl Est {
    fn exact(value: f64) -> Self {
        Self { value, lo: value, hi: value }
    }

    fn scale(self, c: f64) -> Self {
        Self { value: self.value * c, lo: self.lo * c, hi: self.hi * c }
    }

    fn proportion(hits: u64, trials: u64, confidence: f64) -> Self {
        let (lo, hi) = wilson_interval(hits, trials, confidence);
        Self { value: hits as f64 / trials as f64, lo, hi }
    }

    fn mean(samples: &[f64], confidence: f64) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().copied().collect::<CompensatedSum>().value() / n;
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let half = normal_quantile(1.0 - (1.0 - confidence) / 2.0) * (var / n).sqrt();
        Self { value: mean, lo: mean - half, hi: mean + half }
    }
}

fn perturbed(x: f64) -> impl Iterator<Item = f64> {
    [x - PERTURBATION, x + PERTURBATION].into_iter().filter(|v| *v > 0.0)
}

fn power(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.abs().powf(m)
    }
}

/// A finite discrete law: sorted distinct atoms with probabilities.
#[derive(Clone, Debug, PartialEq)]
pub struct Discrete {
    atoms: Vec<(f64, f64)>,
}

impl Discrete {
    /// Sort and merge equal values.
    pub fn new(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += p,
                _ => merged.push((v, p)),
            }
        }
        Self { atoms: merged }
    }

    pub fn from_spec(spec: &NoiseSpec) -> Result<Self> {
        spec.validate()?;
        let atoms = spec
            .support()
            .ok_or_else(|| Error::InfiniteSupport(spec.to_string()))?;
        Ok(Self::new(atoms))
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    /// Law of `X - X'` with `X'` an independent copy.
    pub fn symmetrized(&self) -> Self {
        let mut pairs = Vec::with_capacity(self.atoms.len() * self.atoms.len());
        for &(x, px) in &self.atoms {
            for &(y, py) in &self.atoms {
                pairs.push((x - y, px * py));
            }
        }
        Self::new(pairs)
    }

    pub fn prob(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.atoms
            .iter()
            .filter(|(v, _)| pred(*v))
            .map(|(_, p)| *p)
            .collect::<CompensatedSum>()
            .value()
    }

    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.atoms
            .iter()
            .map(|(v, p)| p * f(*v))
            .collect::<CompensatedSum>()
            .value()
    }

    /// Smallest `m` with `P{X <= m} >= 1/2`.
    pub fn median(&self) -> f64 {
        let mut cdf = CompensatedSum::new();
        for &(v, p) in &self.atoms {
            cdf.add(p);
            if cdf.value() >= 0.5 {
                return v;
            }
        }
        self.atoms.last().map_or(0.0, |a| a.0)
    }
}

/// One noise word of a weighted sum at fixed `n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WordOutcome {
    pub prob: f64,
    /// `S_n = sum_k X_k`.
    pub sum: f64,
    /// `max_j |X_1 + ... + X_j|`.
    pub max_partial: f64,
    /// `max_j |X_j|`.
    pub max_term: f64,
    /// `sum_j X_j^2`.
    pub sum_sq: f64,
}

/// All `m^n` noise words with `X_k = a(n,k) theta_k`, in lexicographic order.
pub fn outcome_table(model: &ModelSpec, spec: &NoiseSpec, n: u64) -> Result<Vec<WordOutcome>> {
    if n == 0 {
        return Err(invalid("n must be >= 1"));
    }
    spec.validate()?;
    let atoms = spec
        .support()
        .ok_or_else(|| Error::InfiniteSupport(spec.to_string()))?;
    if !enumerable(spec, n) {
        return Err(Error::EnumerationTooLarge {
            required: (atoms.len() as f64).powf(n as f64),
            budget: ENUMERATION_BUDGET,
        });
    }
    let weights = weight_row(model, n as usize)?;
    let mut out = Vec::with_capacity(atoms.len().pow(n as u32));
    let start = WordOutcome { prob: 1.0, sum: 0.0, max_partial: 0.0, max_term: 0.0, sum_sq: 0.0 };
    extend(&weights, &atoms, start, &mut out);
    Ok(out)
}

fn extend(weights: &[f64], atoms: &[(f64, f64)], acc: WordOutcome, out: &mut Vec<WordOutcome>) {
    match weights.split_first() {
        None => out.push(acc),
        Some((w, rest)) => {
            for &(v, p) in atoms {
                let x = w * v;
                let sum = acc.sum + x;
                let next = WordOutcome {
                    prob: acc.prob * p,
                    sum,
                    max_partial: acc.max_partial.max(sum.abs()),
                    max_term: acc.max_term.max(x.abs()),
                    sum_sq: acc.sum_sq + x * x,
                };
                extend(rest, atoms, next, out);
            }
        }
    }
}

fn table_prob(table: &[WordOutcome], pred: impl Fn(&WordOutcome) -> bool) -> f64 {
    table
        .iter()
        .filter(|w| pred(w))
        .map(|w| w.prob)
        .collect::<CompensatedSum>()
        .value()
}

fn table_expect(table: &[WordOutcome], f: impl Fn(&WordOutcome) -> f64) -> f64 {
    table.iter().map(|w| w.prob * f(w)).collect::<CompensatedSum>().value()
}

fn sum_law(table: &[WordOutcome]) -> Discrete {
    Discrete::new(table.iter().map(|w| (w.sum, w.prob)).collect())
}

/// Exact `P{|S_n| > x}` from the outcome table.
pub fn enumerated_tail(model: &ModelSpec, spec: &NoiseSpec, n: u64, x: f64) -> Result<f64> {
    let table = outcome_table(model, spec, n)?;
    Ok(table_prob(&table, |w| w.sum.abs() > x))
}

fn c_sym(m: f64) -> f64 {
    if m <= 1.0 {
        1.0
    } else {
        2f64.powf(m - 1.0)
    }
}

fn c_r(n: u64, r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else {
        (n as f64).powf(r - 1.0)
    }
}

fn require_symmetric(spec: &NoiseSpec, what: &'static str) -> Result<()> {
    if spec.is_symmetric() {
        Ok(())
    } else {
        Err(Error::NotSymmetric(what))
    }
}

fn require_moment(spec: &NoiseSpec, m: f64) -> Result<()> {
    if spec.moment_finite(m) {
        Ok(())
    } else {
        Err(Error::InfiniteMoment { spec: spec.to_string(), order: m })
    }
}

fn require_small_n(n: u64) -> Result<()> {
    if n == 0 || n > MAX_ENUMERATED_N {
        return Err(invalid(format!("n must lie in 1..={MAX_ENUMERATED_N}, got {n}")));
    }
    Ok(())
}

fn require_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(invalid(format!("{name} must be finite and > 0, got {v}")));
    }
    Ok(())
}

fn weak_sym_exact(report: &mut IneqReport, law: &Discrete, sym: &Discrete, x: f64, a: f64) {
    let mu = law.median();
    for x in perturbed(x) {
        let left = Est::exact(0.5 * law.prob(|v| (v - mu).abs() >= x));
        let mid = Est::exact(sym.prob(|v| v.abs() >= x));
        let right = Est::exact(2.0 * law.prob(|v| (v - a).abs() >= x / 2.0));
        report.record(left, mid);
        report.record(mid, right);
    }
}

fn sym_moment_exact(report: &mut IneqReport, law: &Discrete, sym: &Discrete, m: f64, a: f64) {
    let mu = law.median();
    let left = Est::exact(0.5 * law.expect(|v| power(v - mu, m)));
    let mid = Est::exact(sym.expect(|v| power(v, m)));
    let right = Est::exact(2.0 * c_sym(m) * law.expect(|v| power(v - a, m)));
    report.record(left, mid);
    report.record(mid, right);
}

fn levy_exact(report: &mut IneqReport, table: &[WordOutcome], x: f64) {
    for x in perturbed(x) {
        let tail = Est::exact(table_prob(table, |w| w.sum.abs() > x));
        let max_sum = Est::exact(0.5 * table_prob(table, |w| w.max_partial > x));
        let max_term = Est::exact(0.5 * table_prob(table, |w| w.max_term > 2.0 * x));
        report.record(max_sum, tail);
        report.record(max_term, max_sum);
    }
}

fn hj_exact(report: &mut IneqReport, table: &[WordOutcome], s: f64, t: f64) {
    for d in [-PERTURBATION, PERTURBATION] {
        let (s, t) = (s + d, t + d);
        if s <= 0.0 || t <= 0.0 {
            continue;
        }
        let lhs = table_prob(table, |w| w.sum.abs() >= 2.0 * t + s);
        let pt = table_prob(table, |w| w.sum.abs() >= t);
        let pm = table_prob(table, |w| w.max_term >= s);
        report.record(Est::exact(lhs), Est::exact(4.0 * pt * pt + pm));
    }
}

fn cr_exact(report: &mut IneqReport, table: &[WordOutcome], weights: &[f64], law: &Discrete, r: f64) {
    let n = weights.len() as u64;
    let lhs = table_expect(table, |w| power(w.sum, r));
    let theta = law.expect(|v| power(v, r));
    let terms: f64 = weights.iter().map(|w| power(*w, r) * theta).collect::<CompensatedSum>().value();
    report.record(Est::exact(lhs), Est::exact(c_r(n, r) * terms));
}

/// Moment ratio `E|S_n|^m / E(sum X_j^2)^(m/2)` and its two parts.
#[derive(Clone, Debug, PartialEq)]
pub struct MzReport {
    pub report: IneqReport,
    pub ratio: f64,
    pub sum_moment: f64,
    pub square_function_moment: f64,
}

fn mz_exact(table: &[WordOutcome], m: f64) -> MzReport {
    let num = table_expect(table, |w| power(w.sum, m));
    let den = table_expect(table, |w| power(w.sum_sq, m / 2.0));
    let ratio = num / den;
    let mut report = IneqReport::new("marcinkiewicz-zygmund", CheckMethod::Enumerated);
    if m == 2.0 {
        let tol = EXACT_SLACK;
        report.record(Est::exact((ratio - 1.0).abs()), Est::exact(tol));
    }
    MzReport { report, ratio, sum_moment: num, square_function_moment: den }
}

/// Settings for the checks; Monte Carlo is used only for laws that cannot
/// be enumerated.
#[derive(Clone, Debug, PartialEq)]
pub struct Harness {
    pub draws: u64,
    pub seed: u64,
    pub confidence: f64,
}

impl Default for Harness {
    fn default() -> Self {
        Self { draws: DEFAULT_DRAWS, seed: DEFAULT_SEED, confidence: 0.99 }
    }
}

// Experiment tags keep the Monte Carlo streams of different checks apart.
const TAG_WEAK: u64 = 1;
const TAG_MOMENT: u64 = 2;
const TAG_MZ: u64 = 3;
const TAG_CR: u64 = 4;

impl Harness {
    fn stream(&self, tag: u64, n: u64) -> Stream {
        Stream::substream(self.seed, tag << 32 | n, 0)
    }

    fn draw_pairs(&self, tag: u64, weights: &[f64], sampler: &Sampler) -> (Vec<f64>, Vec<f64>) {
        let mut rng = self.stream(tag, weights.len() as u64);
        let mut xs = Vec::with_capacity(self.draws as usize);
        let mut ys = Vec::with_capacity(self.draws as usize);
        for _ in 0..self.draws {
            xs.push(weights.iter().map(|w| w * sampler.draw(&mut rng)).sum());
            ys.push(weights.iter().map(|w| w * sampler.draw(&mut rng)).sum());
        }
        (xs, ys)
    }

    fn sample_median(spec: &NoiseSpec, xs: &[f64]) -> f64 {
        if spec.is_symmetric() {
            return 0.0;
        }
        let mut sorted = xs.to_vec();
        sorted.sort_by(f64::total_cmp);
        sorted[(sorted.len() - 1) / 2]
    }

    fn weak_sym_mc(&self, spec: &NoiseSpec, weights: &[f64], x: f64, a: f64, name: &str) -> Result<IneqReport> {
        let sampler = spec.sampler()?;
        let (xs, ys) = self.draw_pairs(TAG_WEAK, weights, &sampler);
        let mu = Self::sample_median(spec, &xs);
        let mut report = IneqReport::new(name, CheckMethod::MonteCarlo);
        let count = |pred: &dyn Fn(usize) -> bool| (0..xs.len()).filter(|&i| pred(i)).count() as u64;
        for x in perturbed(x) {
            let left = Est::proportion(count(&|i| (xs[i] - mu).abs() >= x), self.draws, self.confidence).scale(0.5);
            let mid = Est::proportion(count(&|i| (xs[i] - ys[i]).abs() >= x), self.draws, self.confidence);
            let right = Est::proportion(count(&|i| (xs[i] - a).abs() >= x / 2.0), self.draws, self.confidence).scale(2.0);
            report.record(left, mid);
            report.record(mid, right);
        }
        Ok(report)
    }

    fn sym_moment_mc(&self, spec: &NoiseSpec, weights: &[f64], m: f64, a: f64, name: &str) -> Result<IneqReport> {
        let sampler = spec.sampler()?;
        let (xs, ys) = self.draw_pairs(TAG_MOMENT, weights, &sampler);
        let mu = Self::sample_median(spec, &xs);
        let f = |g: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..xs.len()).map(g).collect() };
        let left = Est::mean(&f(&|i| power(xs[i] - mu, m)), self.confidence).scale(0.5);
        let mid = Est::mean(&f(&|i| power(xs[i] - ys[i], m)), self.confidence);
        let right = Est::mean(&f(&|i| power(xs[i] - a, m)), self.confidence).scale(2.0 * c_sym(m));
        let mut report = IneqReport::new(name, CheckMethod::MonteCarlo);
        report.record(left, mid);
        report.record(mid, right);
        Ok(report)
    }

    /// `1/2 P{|X - mu X| >= x} <= P{|X^sym| >= x} <= 2 P{|X - a| >= x/2}` for `X = theta`.
    pub fn weak_symmetrization(&self, spec: &NoiseSpec, x: f64, a: f64) -> Result<IneqReport> {
        require_positive("x", x)?;
        spec.validate()?;
        if spec.support().is_none() {
            return self.weak_sym_mc(spec, &[1.0], x, a, "weak-symmetrization");
        }
        let law = Discrete::from_spec(spec)?;
        let mut report = IneqReport::new("weak-symmetrization", CheckMethod::Enumerated);
        weak_sym_exact(&mut report, &law, &law.symmetrized(), x, a);
        Ok(report)
    }

    /// Weak symmetrization for `X = S_n`.
    pub fn weak_symmetrization_sum(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        x: f64,
        a: f64,
    ) -> Result<IneqReport> {
        require_positive("x", x)?;
        if !enumerable(spec, n) {
            let weights = weight_row(model, n as usize)?;
            return self.weak_sym_mc(spec, &weights, x, a, "weak-symmetrization-sum");
        }
        let law = sum_law(&outcome_table(model, spec, n)?);
        let mut report = IneqReport::new("weak-symmetrization-sum", CheckMethod::Enumerated);
        weak_sym_exact(&mut report, &law, &law.symmetrized(), x, a);
        Ok(report)
    }

    /// `1/2 E|X - mu X|^m <= E|X^sym|^m <= 2 c E|X - a|^m` with `c = max(1, 2^(m-1))`.
    pub fn symmetrization_moment(&self, spec: &NoiseSpec, m: f64, a: f64) -> Result<IneqReport> {
        require_positive("m", m)?;
        spec.validate()?;
        require_moment(spec, m)?;
        if spec.support().is_none() {
            return self.sym_moment_mc(spec, &[1.0], m, a, "symmetrization-moment");
        }
        let law = Discrete::from_spec(spec)?;
        let mut report = IneqReport::new("symmetrization-moment", CheckMethod::Enumerated);
        sym_moment_exact(&mut report, &law, &law.symmetrized(), m, a);
        Ok(report)
    }

    pub fn symmetrization_moment_sum(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        m: f64,
        a: f64,
    ) -> Result<IneqReport> {
        require_positive("m", m)?;
        require_moment(spec, m)?;
        if !enumerable(spec, n) {
            let weights = weight_row(model, n as usize)?;
            return self.sym_moment_mc(spec, &weights, m, a, "symmetrization-moment-sum");
        }
        let law = sum_law(&outcome_table(model, spec, n)?);
        let mut report = IneqReport::new("symmetrization-moment-sum", CheckMethod::Enumerated);
        sym_moment_exact(&mut report, &law, &law.symmetrized(), m, a);
        Ok(report)
    }

    /// `P{|S_n| > x} >= 1/2 P{max_j |S_j| > x} >= 1/2 P{max_j |X_j| > 2x}`.
    pub fn levy(&self, model: &ModelSpec, spec: &NoiseSpec, n: u64, x: f64) -> Result<IneqReport> {
        require_symmetric(spec, "the Levy inequality")?;
        require_small_n(n)?;
        require_positive("x", x)?;
        let table = outcome_table(model, spec, n)?;
        let mut report = IneqReport::new("levy", CheckMethod::Enumerated);
        levy_exact(&mut report, &table, x);
        Ok(report)
    }

    /// `P{|S_n| >= 2t + s} <= 4 P{|S_n| >= t}^2 + P{max_j |X_j| >= s}`.
    pub fn hoffmann_jorgensen(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        s: f64,
        t: f64,
    ) -> Result<IneqReport> {
        require_symmetric(spec, "the Hoffmann-Jorgensen inequality")?;
        require_small_n(n)?;
        require_positive("s", s)?;
        require_positive("t", t)?;
        let table = outcome_table(model, spec, n)?;
        let mut report = IneqReport::new("hoffmann-jorgensen", CheckMethod::Enumerated);
        hj_exact(&mut report, &table, s, t);
        Ok(report)
    }

    /// Ratio `E|S_n|^m / E(sum_j X_j^2)^(m/2)`; asserted equal to 1 for `m = 2`.
    pub fn marcinkiewicz_zygmund(
        &self,
        model: &ModelSpec,
        spec: &NoiseSpec,
        n: u64,
        m: f64,
    ) -> Result<MzReport> {
        if !(m >= 1.0 && m.is_finite()) {
            return Err(invalid(format!("m must be >= 1, got {m}")));
        }
        spec.validate()?;
        if !spec.is_centered() {
            return Err(Error::NonZeroMean { mean: spec.mean(), r: m });
        }
        require_moment(spec, m)?;
        if enumerable(spec, n) {
            return Ok(mz_exact(&outcome_table(model, spec, n)?, m));
        }
        let weights = weight_row(model, n as usize)?;
        let sampler = spec.sampler()?;
        let mut rng = self.stream(TAG_MZ, n);
        let mut num = Vec::with_capacity(self.draws as usize);
        let mut den = Vec::with_capacity(self.draws as usize);
        let mut diff = Vec::new();
        for _ in 0..self.draws {
            let (mut s, mut sq) = (0.0, 0.0);
            for w in &weights {
                let x = w * sampler.draw(&mut rng);
                s += x;
                sq += x * x;
            }
            num.push(power(s, m));
            den.push(power(sq, m / 2.0));
            if m == 2.0 {
                diff.push(s * s - sq);
            }
        }
        let (num, den) = (Est::mean(&num, self.confidence), Est::mean(&den, self.confidence));
        let ratio = num.value / den.value;
        let mut report = IneqReport::new("marcinkiewicz-zygmund", CheckMethod::MonteCarlo);
        if m == 2.0 {
            // paired difference S^2 - sum X^2 has mean zero
            let d = Est::mean(&diff, self.confidence);
            let lhs = Est { value: d.value.abs(), lo: d.lo.abs().min(d.hi.abs()), hi: d.hi.abs().max(d.lo.abs()) };
            let lhs = if d.lo <= 0.0 && d.hi >= 0.0 { Est { lo: 0.0, ..lhs } } else { lhs };
            report.record(lhs, Est::exact(EXACT_SLACK));
        }
        Ok(MzReport { report, ratio, sum_moment: num.value, square_function_moment: den.value })
    }

    /// `E|S_n|^r <= c_r sum_j E|X_j|^r` with `c_r = 1` for `r <= 1`, else `n^(r-1)`.
    pub fn cr(&self, model: &ModelSpec, spec: &NoiseSpec, n: u64, r: f64) -> Result<IneqReport> {
        require_positive("r", r)?;
        spec.validate()?;
        require_moment(spec, r)?;
        let weights = weight_row(model, n as usize)?;
        if enumerable(spec, n) {
            let table = outcome_table(model, spec, n)?;
            let mut report = IneqReport::new("cr", CheckMethod::Enumerated);
            cr_exact(&mut report, &table, &weights, &Discrete::from_spec(spec)?, r);
            return Ok(report);
        }
        let sampler = spec.sampler()?;
        let mut rng = self.stream(TAG_CR, n);
        let samples: Vec<f64> = (0..self.draws)
            .map(|_| power(weights.iter().map(|w| w * sampler.draw(&mut rng)).sum(), r))
            .collect();
        let theta = spec.abs_moment(r)?.value();
        let rhs = c_r(n, r) * weights.iter().map(|w| power(*w, r)).sum::<f64>() * theta;
        let mut report = IneqReport::new("cr", CheckMethod::MonteCarlo);
        report.record(Est::mean(&samples, self.confidence), Est::exact(rhs));
        Ok(report)
    }
}

pub fn check_weak_symmetrization(spec: &NoiseSpec, x: f64, a: f64) -> Result<IneqReport> {
    Harness::default().weak_symmetrization(spec, x, a)
}

pub fn check_symmetrization_moment(spec: &NoiseSpec, m: f64, a: f64) -> Result<IneqReport> {
    Harness::default().symmetrization_moment(spec, m, a)
}

pub fn check_levy(model: &ModelSpec, spec: &NoiseSpec, n: u64, x: f64) -> Result<IneqReport> {
    Harness::default().levy(model, spec, n, x)
}

pub fn check_hoffmann_jorgensen(
    model: &ModelSpec,
    spec: &NoiseSpec,
    n: u64,
    s: f64,
    t: f64,
) -> Result<IneqReport> {
    Harness::default().hoffmann_jorgensen(model, spec, n, s, t)
}

pub fn check_marcinkiewicz_zygmund(
    model: &ModelSpec,
    spec: &NoiseSpec,
    n: u64,
    m: f64,
) -> Result<MzReport> {
    Harness::default().marcinkiewicz_zygmund(model, spec, n, m)
}

pub fn check_cr(model: &ModelSpec, spec: &NoiseSpec, n: u64, r: f64) -> Result<IneqReport> {
    Harness::default().cr(model, spec, n, r)
}

/// `(sum a_i^2)^(r/2) <= n^max(0, r/2 - 1) sum a_i^r` for positive `a_i`.
pub fn check_power_mean(values: &[f64], r: f64) -> Result<bool> {
    require_positive("r", r)?;
    if values.is_empty() || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(invalid("values must be non-empty, finite and positive"));
    }
    Ok(power_mean_margin(values, r) >= 0.0)
}

// rhs - lhs with the relative slack folded in
fn power_mean_margin(values: &[f64], r: f64) -> f64 {
    let n = values.len() as f64;
    let lhs = values.iter().map(|a| a * a).sum::<f64>().powf(r / 2.0);
    let rhs = n.powf((r / 2.0 - 1.0).max(0.0)) * values.iter().map(|a| a.powf(r)).sum::<f64>();
    rhs - lhs + EXACT_SLACK * lhs.max(rhs)
}

/// Grids for [`full_sweep`].
#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub qs: Vec<f64>,
    pub max_n: u64,
    /// Innovation laws for the symmetric-only checks.
    pub symmetric_specs: Vec<NoiseSpec>,
    /// Additional laws for the checks that allow asymmetry.
    pub asymmetric_specs: Vec<NoiseSpec>,
    pub moments: Vec<f64>,
    pub shifts: Vec<f64>,
    pub mz_orders: Vec<f64>,
    pub mz_max_n: u64,
    pub power_mean_tuples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            qs: vec![-1.0, -0.5, 0.0, 0.5, 1.0],
            max_n: 10,
            symmetric_specs: vec![
                NoiseSpec::Rademacher,
                NoiseSpec::ShiftedTwoPoint { a: -2.0, b: 2.0, prob_a: 0.5 },
            ],
            asymmetric_specs: vec![NoiseSpec::ShiftedTwoPoint { a: -1.0, b: 2.0, prob_a: 2.0 / 3.0 }],
            moments: vec![0.25, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
            shifts: vec![-1.0, 0.0, 0.5, 1.0],
            mz_orders: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            mz_max_n: 12,
            power_mean_tuples: 10_000,
            seed: DEFAULT_SEED,
        }
    }
}

/// `0.5, 1, ..., 2n`.
fn half_grid(n: u64) -> impl Iterator<Item = f64> + Clone {
    (1..=4 * n).map(|k| 0.5 * k as f64)
}

struct Cell {
    model: ModelSpec,
    spec: NoiseSpec,
    n: u64,
}

fn merge_into(reports: &mut Vec<IneqReport>, part: Vec<IneqReport>) {
    for r in part {
        match reports.iter_mut().find(|x| x.name == r.name) {
            Some(x) => x.absorb(&r),
            None => reports.push(r),
        }
    }
}

fn sweep_cell(cell: &Cell, cfg: &SweepConfig) -> Result<Vec<IneqReport>> {
    let table = outcome_table(&cell.model, &cell.spec, cell.n)?;
    let weights = weight_row(&cell.model, cell.n as usize)?;
    let law = sum_law(&table);
    let sym = law.symmetrized();
    let theta = Discrete::from_spec(&cell.spec)?;
    let method = CheckMethod::Enumerated;

    let mut weak = IneqReport::new("weak-symmetrization-sum", method);
    let mut moment = IneqReport::new("symmetrization-moment-sum", method);
    let mut levy = IneqReport::new("levy", method);
    let mut hj = IneqReport::new("hoffmann-jorgensen", method);
    let mut mz = IneqReport::new("marcinkiewicz-zygmund", method);
    let mut cr = IneqReport::new("cr", method);

    for x in half_grid(cell.n) {
        for &a in &cfg.shifts {
            weak_sym_exact(&mut weak, &law, &sym, x, a);
        }
    }
    for &m in &cfg.moments {
        for &a in &cfg.shifts {
            sym_moment_exact(&mut moment, &law, &sym, m, a);
        }
        cr_exact(&mut cr, &table, &weights, &theta, m);
    }
    if cell.spec.is_symmetric() {
        for x in half_grid(cell.n) {
            levy_exact(&mut levy, &table, x);
        }
        for s in half_grid(cell.n) {
            for t in half_grid(cell.n) {
                hj_exact(&mut hj, &table, s, t);
            }
        }
    }
    if cell.spec.is_centered() {
        mz.absorb(&mz_exact(&table, 2.0).report);
    }
    Ok(vec![weak, moment, levy, hj, mz, cr])
}

/// Moment ratios over `n = 2..=max_n` for one `(q, law, m)`.
pub fn mz_ratios(model: &ModelSpec, spec: &NoiseSpec, m: f64, max_n: u64) -> Result<Vec<f64>> {
    (2..=max_n)
        .map(|n| Ok(mz_exact(&outcome_table(model, spec, n)?, m).ratio))
        .collect()
}

/// Every enumerated check over the configured grids.
pub fn full_sweep(cfg: &SweepConfig) -> Result<Vec<IneqReport>> {
    let specs: Vec<&NoiseSpec> = cfg.symmetric_specs.iter().chain(&cfg.asymmetric_specs).collect();
    let mut cells = Vec::new();
    for &q in &cfg.qs {
        let model = ModelSpec::constant(q)?;
        for spec in &specs {
            for n in 1..=cfg.max_n {
                cells.push(Cell { model: model.clone(), spec: **spec, n });
            }
        }
    }
    let parts: Vec<Vec<IneqReport>> = cells.par_iter().map(|c| sweep_cell(c, cfg)).collect::<Result<_>>()?;

    let mut reports = Vec::new();
    // generic-input symmetrization checks on theta itself
    let mut weak = IneqReport::new("weak-symmetrization", CheckMethod::Enumerated);
    let mut moment = IneqReport::new("symmetrization-moment", CheckMethod::Enumerated);
    for spec in &specs {
        let law = Discrete::from_spec(spec)?;
        let sym = law.symmetrized();
        for x in half_grid(4) {
            for &a in &cfg.shifts {
                weak_sym_exact(&mut weak, &law, &sym, x, a);
            }
        }
        for &m in &cfg.moments {
            for &a in &cfg.shifts {
                sym_moment_exact(&mut moment, &law, &sym, m, a);
            }
        }
    }
    reports.push(weak);
    reports.push(moment);
    for part in parts {
        merge_into(&mut reports, part);
    }

    let mut spread = IneqReport::new("marcinkiewicz-zygmund-spread", CheckMethod::Enumerated);
    for &q in &cfg.qs {
        let model = ModelSpec::constant(q)?;
        for spec in specs.iter().filter(|s| s.is_centered()) {
            for &m in &cfg.mz_orders {
                let ratios = mz_ratios(&model, spec, m, cfg.mz_max_n)?;
                let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                spread.record(Est::exact(max / min), Est::exact(MZ_SPREAD_LIMIT));
            }
        }
    }
    reports.push(spread);

    let mut pm = IneqReport::new("power-mean", CheckMethod::Enumerated);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for _ in 0..cfg.power_mean_tuples {
        let len = rng.random_range(1..=16usize);
        let r: f64 = 8.0 * (1.0 - rng.random::<f64>());
        let values: Vec<f64> = (0..len).map(|_| 10f64.powf(rng.random_range(-3.0..3.0))).collect();
        let margin = power_mean_margin(&values, r);
        pm.instances_checked += 1;
        pm.worst_margin = pm.worst_margin.min(margin);
        if margin < 0.0 {
            pm.violations += 1;
        }
    }
    reports.push(pm);
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::enumerate_tail_at;

    fn q(v: f64) -> ModelSpec {
        ModelSpec::constant(v).unwrap()
    }

    const TWO_POINT: NoiseSpec = NoiseSpec::ShiftedTwoPoint { a: -1.0, b: 2.0, prob_a: 2.0 / 3.0 };

    #[test]
    fn rademacher_weak_symmetrization() {
        let law = Discrete::from_spec(&NoiseSpec::Rademacher).unwrap();
        let sym = law.symmetrized();
        assert_eq!(sym.atoms(), &[(-2.0, 0.25), (0.0, 0.5), (2.0, 0.25)]);
        assert_eq!(sym.prob(|v| v.abs() >= 1.5), 0.5);
        let r = check_weak_symmetrization(&NoiseSpec::Rademacher, 1.5, 0.0).unwrap();
        assert_eq!(r.method, CheckMethod::Enumerated);
        assert_eq!((r.instances_checked, r.violations), (4, 0));
        let r = check_weak_symmetrization(&NoiseSpec::Rademacher, 10.0, 0.0).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.worst_margin >= 0.0);
        let r = check_weak_symmetrization(&TWO_POINT, 2.0, 0.0).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn two_point_symmetrization_table() {
        let sym = Discrete::from_spec(&TWO_POINT).unwrap().symmetrized();
        let p0 = sym.prob(|v| v == 0.0);
        assert!((p0 - 5.0 / 9.0).abs() < 1e-15);
        assert!((sym.prob(|v| v == 3.0) - 2.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn symmetrization_moment_cases() {
        let law = Discrete::from_spec(&NoiseSpec::Rademacher).unwrap();
        assert_eq!(law.symmetrized().expect(|v| v * v), 2.0);
        let r = check_symmetrization_moment(&NoiseSpec::Rademacher, 2.0, 0.0).unwrap();
        assert_eq!(r.violations, 0);
        let r = check_symmetrization_moment(&NoiseSpec::standard_normal(), 2.0, 0.0).unwrap();
        assert_eq!(r.method, CheckMethod::MonteCarlo);
        assert_eq!(r.violations, 0);
        let tiny = NoiseSpec::Uniform { half_width: 1e-200 };
        let r = check_symmetrization_moment(&tiny, 2.0, 0.0).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.worst_margin.abs() < 1e-300);
        let heavy = NoiseSpec::SymmetricPareto { alpha: 1.5, scale: 1.0 };
        assert!(matches!(
            check_symmetrization_moment(&heavy, 2.0, 0.0),
            Err(Error::InfiniteMoment { .. })
        ));
    }

    #[test]
    fn levy_examples() {
        let table = outcome_table(&q(0.0), &NoiseSpec::Rademacher, 3).unwrap();
        assert_eq!(table_prob(&table, |w| w.sum.abs() > 2.5), 0.25);
        assert_eq!(table_prob(&table, |w| w.max_partial > 2.5), 0.25);
        assert_eq!(table_prob(&table, |w| w.max_term > 5.0), 0.0);
        let r = check_levy(&q(0.0), &NoiseSpec::Rademacher, 3, 2.5).unwrap();
        assert_eq!((r.instances_checked, r.violations), (4, 0));
        let r = check_levy(&q(1.0), &NoiseSpec::Rademacher, 2, 0.5).unwrap();
        assert_eq!(r.violations, 0);
        let table = outcome_table(&q(1.0), &NoiseSpec::Rademacher, 2).unwrap();
        assert!(table.iter().all(|w| w.max_term == 2.0));
        assert!(matches!(check_levy(&q(0.0), &TWO_POINT, 3, 1.0), Err(Error::NotSymmetric(_))));
        assert!(check_levy(&q(0.0), &NoiseSpec::Rademacher, 13, 1.0).is_err());
    }

    #[test]
    fn hoffmann_jorgensen_example() {
        let table = outcome_table(&q(0.0), &NoiseSpec::Rademacher, 4).unwrap();
        assert_eq!(table_prob(&table, |w| w.sum.abs() >= 3.0), 0.125);
        assert_eq!(table_prob(&table, |w| w.sum.abs() >= 1.0), 1.0 - 6.0 / 16.0);
        let r = check_hoffmann_jorgensen(&q(0.0), &NoiseSpec::Rademacher, 4, 1.0, 1.0).unwrap();
        assert_eq!(r.violations, 0);
        let r = check_hoffmann_jorgensen(&q(0.5), &NoiseSpec::Rademacher, 4, 50.0, 50.0).unwrap();
        assert_eq!(r.violations, 0);
    }

    #[test]
    fn marcinkiewicz_zygmund_examples() {
        let r = check_marcinkiewicz_zygmund(&q(0.0), &NoiseSpec::Rademacher, 5, 2.0).unwrap();
        assert_eq!(r.sum_moment, 5.0);
        assert!((r.ratio - 1.0).abs() <= 1e-12);
        for qv in [-1.0, -0.5, 0.3, 1.0] {
            let r = check_marcinkiewicz_zygmund(&q(qv), &TWO_POINT, 7, 2.0).unwrap();
            assert!((r.ratio - 1.0).abs() <= 1e-12, "{}", r.ratio);
            assert_eq!(r.report.violations, 0);
        }
        // E S_3^4 = n + 3n(n-1) = 21 and sum X_j^2 = 3 on every word
        let r = check_marcinkiewicz_zygmund(&q(0.0), &NoiseSpec::Rademacher, 3, 4.0).unwrap();
        assert_eq!(r.sum_moment, 21.0);
        assert_eq!(r.square_function_moment, 9.0);
        let r = Harness { draws: 200_000, ..Harness::default() }
            .marcinkiewicz_zygmund(&q(0.5), &NoiseSpec::standard_normal(), 6, 2.0)
            .unwrap();
        assert_eq!(r.report.violations, 0);
        assert!((r.ratio - 1.0).abs() < 0.02);
        let shifted = NoiseSpec::ShiftedTwoPoint { a: 0.0, b: 1.0, prob_a: 0.5 };
        assert!(check_marcinkiewicz_zygmund(&q(0.0), &shifted, 3, 2.0).is_err());
    }

    #[test]
    fn cr_examples() {
        let table = outcome_table(&q(0.0), &NoiseSpec::Rademacher, 2).unwrap();
        let lhs = table_expect(&table, |w| power(w.sum, 0.5));
        assert!((lhs - 0.5 * 2f64.sqrt()).abs() < 1e-15);
        for (qv, n, r) in [(0.0, 2, 0.5), (0.0, 4, 2.0), (0.7, 6, 1.0), (-1.0, 5, 1.0), (1.0, 8, 3.0)] {
            let rep = check_cr(&q(qv), &NoiseSpec::Rademacher, n, r).unwrap();
            assert_eq!(rep.violations, 0, "{qv} {n} {r}");
        }
        let table = outcome_table(&q(0.0), &NoiseSpec::Rademacher, 4).unwrap();
        assert_eq!(table_expect(&table, |w| w.sum * w.sum), 4.0);
        let rep = check_cr(&q(0.2), &NoiseSpec::StudentT { nu: 3.5 }, 8, 1.5).unwrap();
        assert_eq!(rep.method, CheckMethod::MonteCarlo);
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn power_mean_examples() {
        assert!(check_power_mean(&[1.0; 4], 2.0).unwrap());
        assert_eq!(power_mean_margin(&[1.0; 4], 2.0) - EXACT_SLACK * 4.0, 0.0);
        for r in [0.1, 1.0, 2.5, 8.0] {
            assert!(check_power_mean(&[3.0], r).unwrap());
        }
        assert!(check_power_mean(&[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn harness_matches_oracle_exactly() {
        for spec in [NoiseSpec::Rademacher, TWO_POINT] {
            for qv in [-1.0, -0.5, 0.0, 0.5, 1.0] {
                for n in 1..=9 {
                    for x in [0.3, 1.0, 1.5, 2.0, 4.5] {
                        let a = enumerated_tail(&q(qv), &spec, n, x).unwrap();
                        let b = enumerate_tail_at(&q(qv), &spec, n, x).unwrap();
                        assert_eq!(a, b, "{spec} q={qv} n={n} x={x}");
                    }
                }
            }
        }
    }

    #[test]
    fn medians() {
        assert_eq!(Discrete::from_spec(&NoiseSpec::Rademacher).unwrap().median(), -1.0);
        assert_eq!(Discrete::from_spec(&TWO_POINT).unwrap().median(), -1.0);
    }

    #[test]
    fn small_sweep_is_clean() {
        let cfg = SweepConfig { max_n: 5, mz_max_n: 6, power_mean_tuples: 500, ..SweepConfig::default() };
        let reports = full_sweep(&cfg).unwrap();
        assert_eq!(reports.len(), 10);
        for r in &reports {
            assert!(r.instances_checked > 0, "{r}");
            assert_eq!(r.violations, 0, "{r}");
        }
    }
}
