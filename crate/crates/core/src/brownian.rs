//! Monte Carlo exit times of planar Brownian motion.
//!
//! Each step draws an isotropic Gaussian increment with per-coordinate standard
//! deviation `s = step_fraction · d(z, ∂D)` and advances the clock by `s²`. A path
//! stops when `d < absorb_eps`, when it lands outside, or when the step segment
//! crosses a slit. Stopping inside the `absorb_eps` band biases times slightly low.
//!
//! Path `i` uses its own ChaCha8 stream `(seed, i)`, so batches are reproducible
//! bit for bit regardless of how rayon schedules the paths.

use crate::classify::{Decision, Verdict};
use crate::comb::{CombSpec, Location, Point};
use crate::error::{Error, Result};
use crate::logspace::KahanSum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

/// A planar domain Brownian paths can be run in.
pub trait ExitDomain: Sync {
    fn locate(&self, z: Point) -> Location;

    /// Whether the segment `a -> b` between two interior points leaves the domain.
    fn step_escapes(&self, _a: Point, _b: Point) -> bool {
        false
    }
}

/// `{|Im z| < 1}`.
#[derive(Debug, Clone, Copy)]
pub struct Strip;

/// `{Re z > left}`.
#[derive(Debug, Clone, Copy)]
pub struct HalfPlane {
    pub left: f64,
}

/// `{Re z > left, |Im z| < 1}`.
#[derive(Debug, Clone, Copy)]
pub struct SubStrip {
    pub left: f64,
}

/// A comb with no teeth past its last materialized one, so nothing is censored.
#[derive(Debug, Clone, Copy)]
pub struct OpenTailComb<'a>(pub &'a CombSpec);

fn interior(d: f64) -> Location {
    if d > 0.0 {
        Location::Interior(d)
    } else {
        Location::Exterior
    }
}

impl ExitDomain for Strip {
    fn locate(&self, z: Point) -> Location {
        interior(1.0 - z.im.abs())
    }
}

impl ExitDomain for HalfPlane {
    fn locate(&self, z: Point) -> Location {
        interior(z.re - self.left)
    }
}

impl ExitDomain for SubStrip {
    fn locate(&self, z: Point) -> Location {
        interior((z.re - self.left).min(1.0 - z.im.abs()))
    }
}

impl ExitDomain for CombSpec {
    fn locate(&self, z: Point) -> Location {
        CombSpec::locate(self, z, false)
    }

    fn step_escapes(&self, a: Point, b: Point) -> bool {
        self.segment_crosses_ray(a, b)
    }
}

impl ExitDomain for OpenTailComb<'_> {
    fn locate(&self, z: Point) -> Location {
        self.0.locate(z, true)
    }

    fn step_escapes(&self, a: Point, b: Point) -> bool {
        self.0.segment_crosses_ray(a, b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplerConfig {
    pub seed: u64,
    /// In `(0, 1/4]`.
    pub step_fraction: f64,
    /// In `(0, 1/10)`.
    pub absorb_eps: f64,
    /// Paths still running after this many steps are reported as nonconvergent.
    pub max_steps: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            step_fraction: 0.25,
            absorb_eps: 1e-3,
            max_steps: 1_000_000,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_fraction > 0.0 && self.step_fraction <= 0.25) {
            return Err(Error::Config(format!(
                "step_fraction = {} must lie in (0, 1/4]",
                self.step_fraction
            )));
        }
        if !(self.absorb_eps > 0.0 && self.absorb_eps < 0.1) {
            return Err(Error::Config(format!(
                "absorb_eps = {} must lie in (0, 1/10)",
                self.absorb_eps
            )));
        }
        if self.max_steps == 0 {
            return Err(Error::Config("max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// How a single path ended in a single domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum PathOutcome {
    Exited(f64),
    /// Left the materialized part of a truncated comb.
    Truncated,
    Nonconvergent,
}

impl PathOutcome {
    pub fn time(self) -> Option<f64> {
        match self {
            PathOutcome::Exited(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExitTimeBatch {
    pub seed: u64,
    pub n_samples: usize,
    pub step_fraction: f64,
    pub absorb_eps: f64,
    /// Recorded exit times in path order.
    pub times: Vec<f64>,
    pub truncation_hits: usize,
    pub nonconvergent: usize,
}

impl ExitTimeBatch {
    fn from_outcomes(cfg: &SamplerConfig, outcomes: impl Iterator<Item = PathOutcome>) -> Self {
        let mut batch = Self {
            seed: cfg.seed,
            n_samples: 0,
            step_fraction: cfg.step_fraction,
            absorb_eps: cfg.absorb_eps,
            times: Vec::new(),
            truncation_hits: 0,
            nonconvergent: 0,
        };
        for o in outcomes {
            batch.n_samples += 1;
            match o {
                PathOutcome::Exited(t) => batch.times.push(t),
                PathOutcome::Truncated => batch.truncation_hits += 1,
                PathOutcome::Nonconvergent => batch.nonconvergent += 1,
            }
        }
        batch
    }

    /// Fraction of paths without a recorded time.
    pub fn censored_fraction(&self) -> f64 {
        if self.n_samples == 0 {
            0.0
        } else {
            (self.truncation_hits + self.nonconvergent) as f64 / self.n_samples as f64
        }
    }
}

fn domain_distance(domain: &dyn ExitDomain, z: Point) -> Result<f64> {
    match domain.locate(z) {
        Location::Interior(d) => Ok(d),
        _ => Err(Error::StartOutsideDomain),
    }
}

/// Runs one noise stream through nested domains `domains[0] ⊂ domains[1] ⊂ ...`.
///
/// The step scale comes from the smallest distance among domains still running,
/// so every domain sees a valid (if finer than necessary) step and all domains
/// share one trajectory. Exit times are then ordered along the nesting.
fn run_coupled(
    domains: &[&dyn ExitDomain],
    start: Point,
    cfg: &SamplerConfig,
    path: u64,
) -> Vec<PathOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(path);
    let mut outcome: Vec<Option<PathOutcome>> = vec![None; domains.len()];
    let mut alive = domains.len();
    let mut z = start;
    let mut t = 0.0f64;
    let mut d = vec![0.0; domains.len()];
    for (k, dom) in domains.iter().enumerate() {
        d[k] = match dom.locate(z) {
            Location::Interior(v) => v,
            _ => 0.0,
        };
    }
    let mut steps = 0u64;
    while alive > 0 {
        let d_min = (0..domains.len())
            .filter(|&k| outcome[k].is_none())
            .map(|k| d[k])
            .fold(f64::INFINITY, f64::min);
        let s = cfg.step_fraction * d_min;
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        let next = Point::new(z.re + s * dx, z.im + s * dy);
        t += s * s;
        steps += 1;
        for (k, dom) in domains.iter().enumerate() {
            if outcome[k].is_some() {
                continue;
            }
            let ended = match dom.locate(next) {
                Location::Interior(v) if !dom.step_escapes(z, next) => {
                    d[k] = v;
                    (v < cfg.absorb_eps).then_some(PathOutcome::Exited(t))
                }
                Location::BeyondTruncation => Some(PathOutcome::Truncated),
                _ => Some(PathOutcome::Exited(t)),
            };
            if ended.is_some() {
                outcome[k] = ended;
                alive -= 1;
            }
        }
        z = next;
        if steps >= cfg.max_steps {
            break;
        }
    }
    outcome
        .into_iter()
        .map(|o| o.unwrap_or(PathOutcome::Nonconvergent))
        .collect()
}

fn check_start(domains: &[&dyn ExitDomain], start: Point, cfg: &SamplerConfig) -> Result<()> {
    cfg.validate()?;
    for dom in domains {
        let d = domain_distance(*dom, start)?;
        if d < cfg.absorb_eps {
            return Err(Error::Config(format!(
                "start lies within absorb_eps of the boundary (d = {d})"
            )));
        }
    }
    Ok(())
}

pub fn sample_exit_times(
    domain: &dyn ExitDomain,
    start: Point,
    n: usize,
    cfg: &SamplerConfig,
) -> Result<ExitTimeBatch> {
    check_start(&[domain], start, cfg)?;
    let outcomes: Vec<PathOutcome> = (0..n as u64)
        .into_par_iter()
        .map(|i| run_coupled(&[domain], start, cfg, i)[0])
        .collect();
    Ok(ExitTimeBatch::from_outcomes(cfg, outcomes.into_iter()))
}

/// Per-path outcomes for nested domains driven by shared noise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoupledBatch {
    pub n_samples: usize,
    /// `outcomes[i][k]` is path `i` in domain `k`.
    pub outcomes: Vec<Vec<PathOutcome>>,
}

impl CoupledBatch {
    /// Counts `(violations, compared)` of `τ_k ≤ τ_{k+1}` over paths where every
    /// domain recorded a time.
    pub fn ordering_violations(&self) -> (usize, usize) {
        let mut violations = 0;
        let mut compared = 0;
        for row in &self.outcomes {
            let times: Option<Vec<f64>> = row.iter().map(|o| o.time()).collect();
            if let Some(times) = times {
                compared += 1;
                if times.windows(2).any(|w| w[0] > w[1]) {
                    violations += 1;
                }
            }
        }
        (violations, compared)
    }

    pub fn batch(&self, k: usize, cfg: &SamplerConfig) -> ExitTimeBatch {
        ExitTimeBatch::from_outcomes(cfg, self.outcomes.iter().map(|row| row[k]))
    }
}

/// `domains` must be listed innermost first.
pub fn sample_coupled(
    domains: &[&dyn ExitDomain],
    start: Point,
    n: usize,
    cfg: &SamplerConfig,
) -> Result<CoupledBatch> {
    if domains.is_empty() {
        return Err(Error::Config("at least one domain is required".into()));
    }
    check_start(domains, start, cfg)?;
    let outcomes = (0..n as u64)
        .into_par_iter()
        .map(|i| run_coupled(domains, start, cfg, i))
        .collect();
    Ok(CoupledBatch {
        n_samples: n,
        outcomes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentConfig {
    /// Censored fraction above which estimates are flagged `biased_low`.
    pub truncation_cap: f64,
    /// Turn an exceeded cap into [`Error::TooManyTruncations`].
    pub strict: bool,
}

impl Default for MomentConfig {
    fn default() -> Self {
        Self {
            truncation_cap: 0.01,
            strict: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentEstimate {
    pub p: f64,
    pub mean_p: f64,
    pub std_err: f64,
    /// The first-half estimate lies within 3 standard errors of the full one.
    pub stable: bool,
    pub n_used: usize,
    pub truncation_hits: usize,
    pub biased_low: bool,
}

fn mean_and_se(times: &[f64], p: f64) -> (f64, f64) {
    let n = times.len() as f64;
    let mean = times
        .iter()
        .map(|t| t.powf(p))
        .collect::<KahanSum>()
        .value()
        / n;
    if times.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let ss = times
        .iter()
        .map(|t| (t.powf(p) - mean).powi(2))
        .collect::<KahanSum>()
        .value();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

pub fn moment_estimate(
    batch: &ExitTimeBatch,
    p: f64,
    cfg: &MomentConfig,
) -> Result<MomentEstimate> {
    if batch.times.is_empty() {
        return Err(Error::Config("batch has no recorded exit times".into()));
    }
    if !(p >= 0.0) {
        return Err(Error::Config(format!(
            "moment order p = {p} must be nonnegative"
        )));
    }
    let censored = batch.truncation_hits + batch.nonconvergent;
    let biased_low = batch.censored_fraction() > cfg.truncation_cap;
    if biased_low && cfg.strict {
        return Err(Error::TooManyTruncations {
            hits: censored,
            n: batch.n_samples,
            cap: cfg.truncation_cap,
        });
    }
    let (mean_p, std_err, stable) = if p == 0.0 {
        (1.0, 0.0, true)
    } else {
        let (mean, se) = mean_and_se(&batch.times, p);
        let half = &batch.times[..batch.times.len().div_ceil(2)];
        let (mean_half, _) = mean_and_se(half, p);
        (mean, se, (mean - mean_half).abs() < 3.0 * se)
    };
    Ok(MomentEstimate {
        p,
        mean_p,
        std_err,
        stable,
        n_used: batch.times.len(),
        truncation_hits: batch.truncation_hits,
        biased_low,
    })
}

/// What `h̃ = h/2` and the verdict predict for `E[τ^p]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MomentExpectation {
    ExpectedFinite,
    ExpectedInfinite,
    Unknown,
}

pub fn moment_expectation(verdict: &Verdict, p: f64) -> MomentExpectation {
    // h ≥ 1/2 for every simply connected domain
    if p < 0.25 {
        return MomentExpectation::ExpectedFinite;
    }
    match verdict.decision {
        Decision::InfiniteHardy => MomentExpectation::ExpectedFinite,
        Decision::FiniteHardy if p < verdict.bound_interval.lower / 2.0 => {
            MomentExpectation::ExpectedFinite
        }
        Decision::FiniteHardy if p > verdict.bound_interval.upper / 2.0 => {
            MomentExpectation::ExpectedInfinite
        }
        _ => MomentExpectation::Unknown,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticConfig {
    pub sampler: SamplerConfig,
    pub moments: MomentConfig,
    pub n_samples: usize,
    pub start: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurkholderEntry {
    pub p: f64,
    pub expectation: MomentExpectation,
    /// Estimates on the first `n/4`, `n/2` and `n` paths.
    pub growth: Vec<(usize, f64, f64)>,
    pub estimate: MomentEstimate,
    /// The estimate is stable and did not drift by more than 3 standard errors
    /// across the prefix sizes.
    pub looks_finite: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BurkholderReport {
    pub decision: Decision,
    pub entries: Vec<BurkholderEntry>,
    pub truncation_hits: usize,
    pub nonconvergent: usize,
}

/// Labels only: heavy tails make any finite-sample verdict on `E[τ^p] = ∞` soft.
pub fn burkholder_diagnostic(
    spec: &CombSpec,
    verdict: &Verdict,
    ps: &[f64],
    cfg: &DiagnosticConfig,
) -> Result<BurkholderReport> {
    let mut report = BurkholderReport {
        decision: verdict.decision,
        entries: Vec::new(),
        truncation_hits: 0,
        nonconvergent: 0,
    };
    if ps.is_empty() {
        return Ok(report);
    }
    if let Some(p) = ps.iter().find(|&&p| !(p > 0.0 && p <= 5.0)) {
        return Err(Error::Config(format!(
            "moment order {p} must lie in (0, 5]"
        )));
    }
    let batch = sample_exit_times(spec, cfg.start, cfg.n_samples, &cfg.sampler)?;
    report.truncation_hits = batch.truncation_hits;
    report.nonconvergent = batch.nonconvergent;
    let lenient = MomentConfig {
        strict: false,
        ..cfg.moments
    };
    for &p in ps {
        let estimate = moment_estimate(&batch, p, &cfg.moments)?;
        let mut growth = Vec::new();
        for div in [4, 2, 1] {
            let m = batch.times.len() / div;
            if m < 2 {
                continue;
            }
            let prefix = ExitTimeBatch {
                times: batch.times[..m].to_vec(),
                ..batch.clone()
            };
            let e = moment_estimate(&prefix, p, &lenient)?;
            growth.push((m, e.mean_p, e.std_err));
        }
        let drift_ok = growth.iter().all(|&(_, m, _)| {
            (m - estimate.mean_p).abs() < 3.0 * growth[0].2.max(estimate.std_err)
        });
        report.entries.push(BurkholderEntry {
            p,
            expectation: moment_expectation(verdict, p),
            growth,
            estimate,
            looks_finite: estimate.stable && drift_ok,
        });
    }
    Ok(report)
}
