//! Batch experiment runner behind the `bk-autoreg` binary.
//!
//! Settings come from built-in defaults, then an optional flat `key = value`
//! file (`--config`), then command-line flags. Output is CSV with a
//! `#`-prefixed preamble echoing the effective configuration. The worker
//! count is never echoed, so output does not depend on it.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 invalid configuration,
//! 3 oracle-backed `series` run whose diagnostic contradicts the predictor,
//! 4 inequality violations.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::distributions::{Moment, NoiseSpec};
use crate::ineq::{full_sweep, SweepConfig};
use crate::model::{simulate_path, ModelSpec, PathMode};
use crate::montecarlo::{Engine, TailEstimate, MIN_REPLICATIONS};
use crate::numeric::{fmt_f64, parse_f64};
use crate::oracle::{exact_gaussian_tail, unit_root_limit, unit_root_square_sum, TailQuery};
use crate::rng::Stream;
use crate::series::{accumulate_bands, compare, predict, Comparison, Outcome, SeriesParams, Source};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DISAGREE: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;

/// Configuration keys in echo order.
const KEYS: [&str; 15] = [
    "q", "q-seq", "q-bound", "p", "r", "eps", "noise", "n-grid", "reps", "seed", "confidence",
    "n", "mode", "out", "threads",
];
// Keys that never reach the preamble.
const UNECHOED: [&str; 2] = ["out", "threads"];

const DEFAULTS: [(&str, &str); 11] = [
    ("q", "0.5"),
    ("p", "1"),
    ("r", "2"),
    ("eps", "1"),
    ("noise", "normal:1"),
    ("n-grid", "2^4..2^14"),
    ("reps", "100000"),
    ("seed", "1"),
    ("confidence", "0.99"),
    ("n", "100"),
    ("mode", "recursive"),
];

#[derive(Parser, Debug)]
#[command(name = "bk-autoreg", version, about = "Baum-Katz series experiments for linear autoregression")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Simulate one path: theta, xi and partial sums.
    Simulate,
    /// Tail probabilities P{|S_n| > eps n^(1/p)} along the n grid.
    Tail,
    /// Series terms, partial sums, slope diagnostic and predicted verdict.
    Series,
    /// Predicted verdict only.
    Predict,
    /// Exact Gaussian tails for q = 1 along the n grid.
    Example1,
    /// Enumerated sweep of the probability inequalities.
    CheckInequalities,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Tail => "tail",
            Command::Series => "series",
            Command::Predict => "predict",
            Command::Example1 => "example1",
            Command::CheckInequalities => "check-inequalities",
        }
    }
}

#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Flat key = value configuration file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Constant coefficient q in [-1, 1].
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Comma-separated coefficient sequence q_1, q_2, ...
    #[arg(long = "q-seq", global = true, allow_hyphen_values = true)]
    pub q_seq: Option<String>,
    /// Declared bound sup |q_k| for a sequence.
    #[arg(long = "q-bound", global = true)]
    pub q_bound: Option<String>,
    #[arg(long, global = true)]
    pub p: Option<String>,
    #[arg(long, global = true)]
    pub r: Option<String>,
    #[arg(long, global = true)]
    pub eps: Option<String>,
    /// normal:SIGMA, rademacher, uniform:H, pareto:ALPHA[,SCALE], student:NU, twopoint:A,B,PA
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub noise: Option<String>,
    /// 2^4..2^17, 10^2..10^6, 1..100, 10^3..10^6/20 (points per decade) or a comma list.
    #[arg(long = "n-grid", global = true)]
    pub n_grid: Option<String>,
    #[arg(long, global = true)]
    pub reps: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<String>,
    #[arg(long, global = true)]
    pub confidence: Option<String>,
    /// Output file; standard output when absent or `-`.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// Worker threads; defaults to BK_AUTOREG_THREADS or all cores.
    #[arg(long, global = true)]
    pub threads: Option<String>,
    /// Path length for `simulate`.
    #[arg(long, global = true)]
    pub n: Option<String>,
    /// recursive or weighted, for `simulate`.
    #[arg(long, global = true)]
    pub mode: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &String)> {
        let all = [
            ("q", &self.q),
            ("q-seq", &self.q_seq),
            ("q-bound", &self.q_bound),
            ("p", &self.p),
            ("r", &self.r),
            ("eps", &self.eps),
            ("noise", &self.noise),
            ("n-grid", &self.n_grid),
            ("reps", &self.reps),
            ("seed", &self.seed),
            ("confidence", &self.confidence),
            ("out", &self.out),
            ("threads", &self.threads),
            ("n", &self.n),
            ("mode", &self.mode),
        ];
        all.into_iter().filter_map(|(k, v)| v.as_ref().map(|v| (k, v))).collect()
    }
}

/// Invalid configuration, anchored to where the value came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub origin: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.origin, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug)]
struct Setting {
    value: String,
    origin: String,
}

/// Raw settings after layering defaults, file and flags.
#[derive(Clone, Debug, Default)]
pub struct Settings {
    values: BTreeMap<&'static str, Setting>,
}

fn known_key(key: &str) -> Option<&'static str> {
    KEYS.iter().copied().find(|k| *k == key)
}

impl Settings {
    pub fn defaults() -> Self {
        let mut s = Self::default();
        for (k, v) in DEFAULTS {
            s.set(k, v, "default");
        }
        s
    }

    fn set(&mut self, key: &'static str, value: &str, origin: &str) {
        // a coefficient sequence replaces the constant and vice versa
        match key {
            "q" => {
                self.values.remove("q-seq");
            }
            "q-seq" => {
                self.values.remove("q");
            }
            _ => {}
        }
        self.values.insert(key, Setting { value: value.trim().to_string(), origin: origin.to_string() });
    }

    /// Layer a `key = value` file; `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path, text: &str) -> Result<(), ConfigError> {
        let mut seen = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let origin = format!("{}:{}", path.display(), i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                return Err(ConfigError { origin, message: format!("expected key = value, got '{line}'") });
            };
            let k = k.trim();
            let Some(key) = known_key(k) else {
                return Err(ConfigError { origin, message: format!("unknown key '{k}'") });
            };
            if let Some(prev) = seen.insert(key, i + 1) {
                return Err(ConfigError { origin, message: format!("duplicate key '{k}' (first set on line {prev})") });
            }
            self.set(key, v, &origin);
        }
        Ok(())
    }

    pub fn apply_flags(&mut self, flags: &Flags) {
        for (k, v) in flags.pairs() {
            self.set(k, v, &format!("--{k}"));
        }
    }

    fn get(&self, key: &str) -> Option<&Setting> {
        self.values.get(key)
    }

    fn parse<T>(&self, key: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some(s) => f(&s.value)
                .map(Some)
                .map_err(|m| ConfigError { origin: s.origin.clone(), message: format!("{key}: {m}") }),
        }
    }

    fn require<T>(&self, key: &str, f: impl FnOnce(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        self.parse(key, f)?.ok_or_else(|| ConfigError {
            origin: "config".to_string(),
            message: format!("missing value for '{key}'"),
        })
    }

    fn origin(&self, key: &str) -> String {
        self.get(key).map_or_else(|| "config".to_string(), |s| s.origin.clone())
    }

    /// Effective settings in a fixed order, excluding output path and workers.
    fn echo(&self) -> Vec<(&'static str, String)> {
        KEYS.iter()
            .filter(|k| !UNECHOED.contains(k))
            .filter_map(|k| self.get(k).map(|s| (*k, s.value.clone())))
            .collect()
    }
}

fn float(s: &str) -> Result<f64, String> {
    parse_f64(s).ok_or_else(|| format!("'{s}' is not a number"))
}

fn integer(s: &str) -> Result<u64, String> {
    let s = s.trim();
    if let Some((b, e)) = s.split_once('^') {
        let b: u64 = b.parse().map_err(|_| format!("'{s}' is not an integer"))?;
        let e: u32 = e.parse().map_err(|_| format!("'{s}' is not an integer"))?;
        return b.checked_pow(e).ok_or_else(|| format!("'{s}' overflows"));
    }
    s.replace('_', "").parse().map_err(|_| format!("'{s}' is not an integer"))
}

/// Parse an n grid: `B^a..B^b`, `a..b`, `a..b/k` (k log-spaced points per
/// decade) or a comma-separated list. The result is strictly increasing.
pub fn parse_n_grid(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    let grid: Vec<u64> = if let Some((lo, hi)) = s.split_once("..") {
        let (hi, per_decade) = match hi.split_once('/') {
            Some((h, k)) => (h, Some(integer(k)?)),
            None => (hi, None),
        };
        match (lo.split_once('^'), hi.split_once('^'), per_decade) {
            (Some((b0, e0)), Some((b1, e1)), None) if b0.trim() == b1.trim() => {
                let base: u64 = b0.trim().parse().map_err(|_| format!("bad base '{b0}'"))?;
                let e0: u32 = e0.trim().parse().map_err(|_| format!("bad exponent '{e0}'"))?;
                let e1: u32 = e1.trim().parse().map_err(|_| format!("bad exponent '{e1}'"))?;
                if base < 2 {
                    return Err(format!("base must be >= 2, got {base}"));
                }
                (e0..=e1)
                    .map(|e| base.checked_pow(e).ok_or_else(|| format!("{base}^{e} overflows")))
                    .collect::<Result<_, _>>()?
            }
            (_, _, None) => (integer(lo)?..=integer(hi)?).collect(),
            (_, _, Some(k)) => {
                let (a, b) = (integer(lo)?, integer(hi)?);
                if a == 0 || k == 0 || a > b {
                    return Err(format!("invalid log grid '{s}'"));
                }
                let steps = ((b as f64 / a as f64).log10() * k as f64).round() as u64;
                let mut g: Vec<u64> = (0..=steps)
                    .map(|i| (a as f64 * 10f64.powf(i as f64 / k as f64)).round() as u64)
                    .collect();
                *g.last_mut().expect("non-empty") = b;
                g.dedup();
                g
            }
        }
    } else {
        s.split(',').map(integer).collect::<Result<_, _>>()?
    };
    if grid.is_empty() {
        return Err("empty n grid".to_string());
    }
    if grid[0] == 0 {
        return Err("n grid entries must be >= 1".to_string());
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err("n grid must be strictly increasing".to_string());
    }
    Ok(grid)
}

/// Validated experiment settings.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub noise: NoiseSpec,
    pub series: SeriesParams,
    pub n_grid: Vec<u64>,
    pub replications: u64,
    pub seed: u64,
    pub confidence: f64,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    pub n: u64,
    pub mode: PathMode,
    echo: Vec<(&'static str, String)>,
}

impl ExperimentConfig {
    pub fn from_settings(s: &Settings) -> Result<Self, ConfigError> {
        let bound = s.parse("q-bound", float)?;
        let model = match s.parse("q-seq", |v| v.split(',').map(float).collect::<Result<Vec<_>, _>>())? {
            Some(seq) => ModelSpec::sequence(seq),
            None => ModelSpec::constant(s.require("q", float)?),
        };
        let model_origin = s.origin(if s.get("q-seq").is_some() { "q-seq" } else { "q" });
        let mut model = model.map_err(|e| ConfigError { origin: model_origin.clone(), message: e.to_string() })?;
        if let Some(b) = bound {
            model = model
                .with_bound(b)
                .map_err(|e| ConfigError { origin: s.origin("q-bound"), message: e.to_string() })?;
        }
        let noise = s.require("noise", |v| v.parse::<NoiseSpec>().map_err(|e| e.to_string()))?;
        let (p, r, eps) = (s.require("p", float)?, s.require("r", float)?, s.require("eps", float)?);
        let series = SeriesParams::new(p, r, eps)
            .map_err(|e| ConfigError { origin: s.origin("p"), message: e.to_string() })?;
        let n_grid = s.require("n-grid", parse_n_grid)?;
        let replications = s.require("reps", |v| match integer(v)? {
            r if r < MIN_REPLICATIONS => Err(format!("must be >= {MIN_REPLICATIONS}, got {r}")),
            r => Ok(r),
        })?;
        let seed = s.require("seed", integer)?;
        let confidence = s.require("confidence", |v| {
            let c = float(v)?;
            if c > 0.0 && c < 1.0 {
                Ok(c)
            } else {
                Err(format!("must lie in (0, 1), got {c}"))
            }
        })?;
        let n = s.require("n", |v| match integer(v)? {
            0 => Err("must be >= 1".to_string()),
            n => Ok(n),
        })?;
        let mode = s.require("mode", |v| match v {
            "recursive" => Ok(PathMode::Recursive),
            "weighted" => Ok(PathMode::Weighted),
            o => Err(format!("unknown mode '{o}' (recursive or weighted)")),
        })?;
        let threads = s.parse("threads", |v| match integer(v)? {
            0 => Err("must be >= 1".to_string()),
            t => Ok(t as usize),
        })?;
        let output_path = s
            .parse("out", |v| Ok(v.to_string()))?
            .filter(|v| v != "-")
            .map(PathBuf::from);
        Ok(Self {
            model,
            noise,
            series,
            n_grid,
            replications,
            seed,
            confidence,
            output_path,
            threads,
            n,
            mode,
            echo: s.echo(),
        })
    }

    fn engine(&self) -> crate::Result<Engine> {
        let mut e = Engine::new(self.replications, self.seed)?.with_confidence(self.confidence)?;
        if let Some(t) = self.threads {
            e = e.with_threads(t);
        }
        Ok(e)
    }

    fn preamble(&self, command: Command, w: &mut dyn Write) -> io::Result<()> {
        writeln!(w, "# bk-autoreg {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(w, "# command: {}", command.name())?;
        for (k, v) in &self.echo {
            let v = match (command, *k) {
                (Command::Example1, "q") => "1",
                (Command::Example1, "noise") => "normal:1",
                (Command::Example1, "q-seq" | "q-bound") => continue,
                _ => v.as_str(),
            };
            writeln!(w, "# {k} = {v}")?;
        }
        Ok(())
    }
}

/// Layer defaults, the optional file and the flags.
pub fn load_config(flags: &Flags) -> Result<ExperimentConfig, ConfigError> {
    let mut settings = Settings::defaults();
    if let Some(path) = &flags.config {
        let text = fs::read_to_string(path).map_err(|e| ConfigError {
            origin: path.display().to_string(),
            message: format!("cannot read: {e}"),
        })?;
        settings.apply_file(path, &text)?;
    }
    settings.apply_flags(flags);
    ExperimentConfig::from_settings(&settings)
}

#[derive(Debug)]
enum RunError {
    Config(ConfigError),
    Library(crate::Error),
    Io(io::Error),
}

impl From<crate::Error> for RunError {
    fn from(e: crate::Error) -> Self {
        RunError::Library(e)
    }
}

impl From<io::Error> for RunError {
    fn from(e: io::Error) -> Self {
        RunError::Io(e)
    }
}

fn moment_cell(m: &Moment) -> String {
    fmt_f64(m.value())
}

fn csv_text(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn estimate_cells(e: &TailEstimate) -> String {
    format!("{},{},{},{}", fmt_f64(e.point), fmt_f64(e.ci_low), fmt_f64(e.ci_high), e.method)
}

fn cmd_simulate(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let sampler = cfg.noise.sampler()?;
    let mut rng = Stream::new(cfg.seed);
    let noise: Vec<f64> = (0..cfg.n).map(|_| sampler.draw(&mut rng)).collect();
    let path = simulate_path(&cfg.model, &noise, cfg.mode)?;
    writeln!(w, "k,theta,xi,partial_sum")?;
    for (k, ((theta, xi), s)) in noise.iter().zip(&path.xi).zip(&path.partial_sums).enumerate() {
        writeln!(w, "{},{},{},{}", k + 1, fmt_f64(*theta), fmt_f64(*xi), fmt_f64(*s))?;
    }
    Ok(EXIT_OK)
}

fn cmd_tail(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let curve = cfg.engine()?.tail_curve(&cfg.model, &cfg.noise, &cfg.series, &cfg.n_grid)?;
    writeln!(w, "n,threshold,tail,ci_low,ci_high,method,replications,hits")?;
    for (n, e) in &curve {
        let threshold = TailQuery::new(*n, cfg.series.p, cfg.series.epsilon)?.threshold();
        writeln!(w, "{n},{},{},{},{}", fmt_f64(threshold), estimate_cells(e), e.replications, e.hits)?;
    }
    Ok(EXIT_OK)
}

fn cmd_series(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let curve = cfg.engine()?.tail_curve(&cfg.model, &cfg.noise, &cfg.series, &cfg.n_grid)?;
    let bands = accumulate_bands(&curve, &cfg.series)?;
    writeln!(w, "n,tail,ci_low,ci_high,method,term,partial_sum")?;
    for row in &bands.center.rows {
        writeln!(
            w,
            "{},{},{},{}",
            row.n,
            estimate_cells(&row.tail),
            fmt_f64(row.term),
            fmt_f64(row.partial_sum)
        )?;
    }
    let slope = bands.center.slope.map_or_else(|| "none".to_string(), fmt_f64);
    writeln!(w, "# slope: {slope}")?;
    writeln!(w, "# diagnostic: {}", bands.center.verdict)?;
    writeln!(w, "# diagnostic-pessimistic: {}", bands.pessimistic.verdict)?;
    writeln!(w, "# diagnostic-optimistic: {}", bands.optimistic.verdict)?;
    let comparison = match predict(&cfg.model, &cfg.series, &cfg.noise) {
        Ok(v) => {
            writeln!(w, "# predicted: {v}")?;
            compare(&v, &bands.center.verdict)
        }
        Err(e) => {
            writeln!(w, "# predicted: unavailable ({e})")?;
            Comparison::Unknown
        }
    };
    writeln!(w, "# comparison: {comparison}")?;
    let oracle_backed = curve.iter().all(|(_, e)| e.method.is_exact());
    if oracle_backed && comparison == Comparison::Disagree {
        return Ok(EXIT_DISAGREE);
    }
    Ok(EXIT_OK)
}

fn cmd_predict(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let v = predict(&cfg.model, &cfg.series, &cfg.noise)?;
    let order = match v.source {
        Source::Theorem1 | Source::Remark1 => Some(cfg.series.r),
        Source::Theorem2 => Some(cfg.series.r / (1.0 - cfg.series.p)),
        _ => None,
    };
    let (order_cell, moment_cell_text) = match order {
        Some(s) if !v.outcome.is_unknown() => (fmt_f64(s), moment_cell(&cfg.noise.abs_moment(s)?)),
        _ => (String::new(), String::new()),
    };
    let (outcome, reason) = match &v.outcome {
        Outcome::Unknown(reason) => ("Unknown", reason.as_str()),
        Outcome::Converges => ("Converges", ""),
        Outcome::Diverges => ("Diverges", ""),
    };
    writeln!(w, "outcome,source,moment_order,abs_moment,reason")?;
    writeln!(w, "{outcome},{},{order_cell},{moment_cell_text},{}", v.source, csv_text(reason))?;
    Ok(EXIT_OK)
}

fn cmd_example1(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let model = ModelSpec::constant(1.0)?;
    writeln!(w, "# example1 uses q = 1 and standard normal noise")?;
    writeln!(w, "n,variance,threshold,tail,method")?;
    for &n in &cfg.n_grid {
        let query = TailQuery::new(n, cfg.series.p, cfg.series.epsilon)?;
        let tail = exact_gaussian_tail(&model, &query, 1.0)?;
        writeln!(
            w,
            "{n},{},{},{},ExactGaussian",
            fmt_f64(unit_root_square_sum(n)),
            fmt_f64(query.threshold()),
            fmt_f64(tail)
        )?;
    }
    if (cfg.series.p - 2.0 / 3.0).abs() < 1e-12 {
        writeln!(w, "# limit: {}", fmt_f64(unit_root_limit(cfg.series.epsilon)))?;
    }
    Ok(EXIT_OK)
}

fn cmd_check_inequalities(cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    let sweep = SweepConfig { seed: cfg.seed, ..SweepConfig::default() };
    let reports = full_sweep(&sweep)?;
    writeln!(w, "name,method,instances,violations,flagged,worst_margin")?;
    for r in &reports {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.name,
            r.method,
            r.instances_checked,
            r.violations,
            r.flagged,
            fmt_f64(r.worst_margin)
        )?;
    }
    Ok(if reports.iter().all(|r| r.passed()) { EXIT_OK } else { EXIT_VIOLATION })
}

fn execute(command: Command, cfg: &ExperimentConfig, w: &mut dyn Write) -> Result<i32, RunError> {
    cfg.preamble(command, w)?;
    match command {
        Command::Simulate => cmd_simulate(cfg, w),
        Command::Tail => cmd_tail(cfg, w),
        Command::Series => cmd_series(cfg, w),
        Command::Predict => cmd_predict(cfg, w),
        Command::Example1 => cmd_example1(cfg, w),
        Command::CheckInequalities => cmd_check_inequalities(cfg, w),
    }
}

fn run_parsed(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, RunError> {
    let cfg = load_config(&cli.flags).map_err(RunError::Config)?;
    match &cfg.output_path {
        Some(path) => {
            let mut buf = Vec::new();
            let code = execute(cli.command, &cfg, &mut buf)?;
            fs::write(path, buf)?;
            Ok(code)
        }
        None => execute(cli.command, &cfg, stdout),
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    match run_parsed(&cli, stdout) {
        Ok(code) => code,
        Err(RunError::Config(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
        Err(RunError::Library(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
        Err(RunError::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
    }
}
