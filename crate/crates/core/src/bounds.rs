//! Criterion ratios and two-sided bound series for the Hardy number.
//!
//! For a comb with gaps `α_n` and tooth positions `x_n`, `h(C) = ∞` exactly when
//!
//! ```text
//! R_n = Σ_{i≤n} ln α_i / ln x_n  →  ∞      (equivalently with ln Σ α_i below),
//! ```
//!
//! and in general
//!
//! ```text
//! liminf (R_n - 1)  ≤  h(C)  ≤  liminf (4 R_n + nK / ln x_n + 4),   K = 4 ln φ.
//! ```
//!
//! A truncated comb cannot exhibit a limit, so every "liminf" here is a tail-window
//! minimum over `n ∈ [⌈N/2⌉, N]` and is reported as such.

use crate::comb::{CombSpec, LogEnvelope};
use crate::error::{Error, Result};
use crate::logspace::{ls_slope, KahanSum, LogSumExpAcc};
use serde::Serialize;

/// `K = 4 ln((1 + √5) / 2)`.
pub fn golden_k() -> f64 {
    4.0 * ((1.0 + 5f64.sqrt()) / 2.0).ln()
}

/// Per-index criterion and bound values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSeries {
    pub n: usize,
    pub sum_log_gaps: f64,
    pub log_x_n: f64,
    #[serde(rename = "ratio_R")]
    pub ratio_r: f64,
    #[serde(rename = "ratio_Rprime")]
    pub ratio_r_prime: f64,
    #[serde(rename = "upper_U")]
    pub upper_u: f64,
    #[serde(rename = "lower_L")]
    pub lower_l: f64,
    #[serde(skip)]
    pub k: f64,
}

/// Inclusive index window `[start, end]` (1-based `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TailWindow {
    pub start: usize,
    pub end: usize,
}

impl TailWindow {
    /// `[⌈N/2⌉, N]`, never starting below 1.
    pub fn upper_half(n_max: usize) -> Self {
        Self {
            start: n_max.div_ceil(2).max(1),
            end: n_max,
        }
    }

    pub fn len(&self) -> usize {
        self.end + 1 - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end < self.start
    }

    /// Slice of a per-index series (element `i` holds index `i + 1`).
    pub fn slice<'a, T>(&self, per_index: &'a [T]) -> &'a [T] {
        &per_index[self.start - 1..self.end]
    }

    pub fn contains(&self, n: usize) -> bool {
        (self.start..=self.end).contains(&n)
    }
}

/// One record per `n = 1..N`. `ratio_r` divides by `ln x_n` taken from the
/// coordinates; `ratio_r_prime` by a separate log-sum-exp over the gap logs.
pub fn criterion_series(spec: &CombSpec) -> Result<Vec<BoundSeries>> {
    let k = golden_k();
    let mut sum = KahanSum::default();
    let mut lse = LogSumExpAcc::default();
    let mut out = Vec::with_capacity(spec.truncate_n());
    for (i, &lg) in spec.log_gaps().iter().enumerate() {
        let n = i + 1;
        sum.add(lg);
        lse.push(lg);
        let log_x_n = spec.log_x_coord(n)?;
        let log_sum_gaps = lse.value();
        if !(log_x_n > 0.0) || !(log_sum_gaps > 0.0) {
            return Err(Error::DegenerateLog { n });
        }
        let s = sum.value();
        let ratio_r = s / log_x_n;
        out.push(BoundSeries {
            n,
            sum_log_gaps: s,
            log_x_n,
            ratio_r,
            ratio_r_prime: s / log_sum_gaps,
            upper_u: 4.0 * ratio_r + n as f64 * k / log_x_n + 4.0,
            lower_l: ratio_r - 1.0,
            k,
        });
    }
    Ok(out)
}

/// `U_n = 4 Σ ln α_i / ln x_n + nK / ln x_n + 4`.
pub fn upper_bound_series(spec: &CombSpec) -> Result<Vec<f64>> {
    Ok(criterion_series(spec)?.iter().map(|s| s.upper_u).collect())
}

/// `L_n = R_n - 1`.
pub fn lower_bound_series(spec: &CombSpec) -> Result<Vec<f64>> {
    Ok(criterion_series(spec)?.iter().map(|s| s.lower_l).collect())
}

/// Tail-window bound estimates for `h(C)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundSummary {
    pub window: TailWindow,
    /// Tail minimum of `U_n`.
    pub upper: f64,
    /// Tail minimum of `L_n`.
    pub lower_raw: f64,
    /// `max(1/2, lower_raw)`: every simply connected domain has `h ≥ 1/2`.
    pub lower: f64,
}

pub fn bound_summary(series: &[BoundSeries]) -> BoundSummary {
    let window = TailWindow::upper_half(series.len());
    let tail = window.slice(series);
    let upper = tail.iter().map(|s| s.upper_u).fold(f64::INFINITY, f64::min);
    let lower_raw = tail.iter().map(|s| s.lower_l).fold(f64::INFINITY, f64::min);
    BoundSummary {
        window,
        upper,
        lower_raw,
        lower: lower_raw.max(0.5),
    }
}

/// Axis quasi-hyperbolic distance `δ_C(x_a, x_b) = 2 Σ_{i=a+1}^{b} arcsinh(α_i / 2)`.
///
/// On `[x_{i-1}, x_i]` the boundary distance is `√(1 + t²)` with `t` the offset to
/// the nearer tooth, so each gap contributes `2 ∫_0^{α/2} dt/√(1+t²)`. The
/// arguments are unordered.
pub fn qh_axis_distance(spec: &CombSpec, a: usize, b: usize) -> Result<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if hi > spec.truncate_n() {
        return Err(Error::IndexOutOfRange {
            index: hi,
            max: spec.truncate_n(),
        });
    }
    let mut acc = KahanSum::default();
    for i in lo + 1..=hi {
        acc.add((spec.gap(i)? / 2.0).asinh());
    }
    Ok(2.0 * acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrendHint {
    DivergesToInfinity,
    BoundedAbove,
    Inconclusive,
}

/// Thresholds for the tail diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendConfig {
    /// A monotone tail counts as diverging only if its least-squares slope exceeds this.
    pub slope_tol: f64,
    /// An oscillating tail counts as bounded if the minimum over its second half comes
    /// back to within this relative band of the value at the window start.
    pub band_tol: f64,
    /// Below this many teeth the report is always inconclusive.
    pub min_n: usize,
}

impl Default for TrendConfig {
    fn default() -> Self {
        Self {
            slope_tol: 1e-3,
            band_tol: 0.05,
            min_n: 8,
        }
    }
}

/// Shape of a tail segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailShape {
    pub min: f64,
    pub max: f64,
    pub slope: f64,
    pub monotone: bool,
    pub hint: TrendHint,
}

/// Classifies `values` (indices `first_n, first_n + 1, ...`).
pub fn tail_shape(values: &[f64], first_n: usize, cfg: &TrendConfig) -> TailShape {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if values.len() < 2 {
        return TailShape {
            min,
            max,
            slope: 0.0,
            monotone: true,
            hint: TrendHint::Inconclusive,
        };
    }
    let xs: Vec<f64> = (0..values.len()).map(|i| (first_n + i) as f64).collect();
    let slope = ls_slope(&xs, values);
    let monotone = values
        .windows(2)
        .all(|w| w[1] - w[0] >= -1e-12 * w[0].abs().max(1.0));
    let hint = if monotone {
        if slope > cfg.slope_tol {
            TrendHint::DivergesToInfinity
        } else {
            TrendHint::BoundedAbove
        }
    } else if late_min(values) <= values[0] * (1.0 + cfg.band_tol) {
        TrendHint::BoundedAbove
    } else {
        TrendHint::Inconclusive
    };
    TailShape {
        min,
        max,
        slope,
        monotone,
        hint,
    }
}

fn late_min(values: &[f64]) -> f64 {
    values[values.len() / 2..]
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Which quantity `term_ratio_tail` holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TermRatio {
    /// `ln α_n / (b_n - b_{n-1})` for a declared envelope.
    EnvelopeIncrement,
    /// `ln α_n / n`, the subexponential-growth proxy.
    PerIndex,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrendReport {
    pub window: TailWindow,
    pub tail_min: f64,
    pub tail_max: f64,
    pub slope: f64,
    pub monotone: bool,
    pub term_ratio: TermRatio,
    pub term_ratio_tail: Vec<f64>,
    /// Hint from the `R_n` tail.
    pub verdict_hint: TrendHint,
    /// Hint from the `R'_n` tail.
    pub prime_hint: TrendHint,
    /// Tail minimum of `R'_n`.
    pub prime_tail_min: f64,
}

pub fn trend_report(spec: &CombSpec, envelope: Option<&LogEnvelope>) -> Result<TrendReport> {
    trend_report_with(spec, envelope, &TrendConfig::default())
}

/// Tail diagnostics for `R_n` and `R'_n`. Never a substitute for a rule-based
/// verdict; short combs always come back inconclusive.
pub fn trend_report_with(
    spec: &CombSpec,
    envelope: Option<&LogEnvelope>,
    cfg: &TrendConfig,
) -> Result<TrendReport> {
    let series = criterion_series(spec)?;
    let window = TailWindow::upper_half(series.len());
    let tail = window.slice(&series);
    let r: Vec<f64> = tail.iter().map(|s| s.ratio_r).collect();
    let rp: Vec<f64> = tail.iter().map(|s| s.ratio_r_prime).collect();
    let mut shape = tail_shape(&r, window.start, cfg);
    let mut prime = tail_shape(&rp, window.start, cfg);
    if spec.truncate_n() < cfg.min_n {
        shape.hint = TrendHint::Inconclusive;
        prime.hint = TrendHint::Inconclusive;
    }

    let log_gaps = spec.log_gaps();
    let (term_ratio, term_ratio_tail) = match envelope {
        Some(env) => (
            TermRatio::EnvelopeIncrement,
            (window.start.max(2)..=window.end)
                .map(|n| env.increment(n).map_or(f64::NAN, |d| log_gaps[n - 1] / d))
                .collect(),
        ),
        None => (
            TermRatio::PerIndex,
            (window.start..=window.end)
                .map(|n| log_gaps[n - 1] / n as f64)
                .collect(),
        ),
    };

    Ok(TrendReport {
        window,
        tail_min: shape.min,
        tail_max: shape.max,
        slope: shape.slope,
        monotone: shape.monotone,
        term_ratio,
        term_ratio_tail,
        verdict_hint: shape.hint,
        prime_hint: prime.hint,
        prime_tail_min: prime.min,
    })
}

/// Term ratios `ln α_n / (b_n - b_{n-1})` (with `b_0 = 0`) and partial-sum ratios
/// `Σ_{i≤n} ln α_i / b_n` for `n = 1..N`. Each partial ratio is a weighted mean of
/// the term ratios up to `n`, which is the finite form of Stolz–Cesàro.
pub fn stolz_ratios(spec: &CombSpec, envelope: &LogEnvelope) -> Option<(Vec<f64>, Vec<f64>)> {
    let mut terms = Vec::with_capacity(spec.truncate_n());
    let mut partials = Vec::with_capacity(spec.truncate_n());
    let mut sum = KahanSum::default();
    let mut prev_b = 0.0;
    for (i, &lg) in spec.log_gaps().iter().enumerate() {
        let b = envelope.value(i + 1)?;
        sum.add(lg);
        terms.push(lg / (b - prev_b));
        partials.push(sum.value() / b);
        prev_b = b;
    }
    Some((terms, partials))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::comb::{GapFamily, LogEnvelope, OscillatingParams};
    use std::f64::consts::E;

    fn spec(family: GapFamily, n: usize) -> CombSpec {
        CombSpec::materialize(family, n).unwrap()
    }

    #[test]
    fn k_from_closed_form() {
        assert!((golden_k() - 1.9248473002384138).abs() < 1e-15);
    }

    // Reference values below come from 50-digit arithmetic.

    #[test]
    fn constant_e_ratio() {
        let s = criterion_series(&spec(GapFamily::Constant { alpha: E }, 10)).unwrap();
        assert!((s[9].ratio_r - 3.0279310656411387).abs() < 1e-13);
        assert!((s[0].ratio_r - 1.0).abs() < 1e-15);
        assert!((s[0].upper_u - 9.924847300238414).abs() < 1e-13);
        assert_eq!(s[0].lower_l.max(0.5), 0.5);
    }

    #[test]
    fn double_exp_limit() {
        let s = criterion_series(&spec(GapFamily::DoubleExp, 40)).unwrap();
        let lim = E / (E - 1.0);
        assert!((s[39].ratio_r_prime - 1.5819767068693264).abs() < 1e-12);
        assert!((s[39].ratio_r_prime - lim).abs() < 1e-6);
        let b = bound_summary(&s);
        assert_eq!(b.window, TailWindow { start: 20, end: 40 });
        assert!((b.upper - 10.327906827477306).abs() < 1e-9);
        assert!((b.lower - 0.5819767036086294).abs() < 1e-9);
    }

    #[test]
    fn constant_two_upper_value() {
        let u = upper_bound_series(&spec(GapFamily::Constant { alpha: 2.0 }, 10)).unwrap();
        assert!((u[9] - 19.68042666544893).abs() < 1e-12);
        assert!(u.windows(2).skip(3).all(|w| w[1] > w[0]));
    }

    #[test]
    fn polynomial_lower_grows() {
        let l = lower_bound_series(&spec(GapFamily::Polynomial { p: 1.0 }, 200)).unwrap();
        assert!((l[199] - 86.56829521779366).abs() < 1e-9);
        assert!(l[199] > 50.0);
    }

    #[test]
    fn axis_distance_closed_form() {
        let s = spec(GapFamily::Explicit(vec![2.0]), 1);
        assert!(
            (qh_axis_distance(&s, 0, 1).unwrap() - 2.0 * (1f64 + 2f64.sqrt()).ln()).abs() < 1e-15
        );
        assert_eq!(qh_axis_distance(&s, 1, 1).unwrap(), 0.0);
        let c = spec(GapFamily::Constant { alpha: 2.0 }, 5);
        for n in 1..=5 {
            let want = 2.0 * n as f64 * 1f64.asinh();
            assert!((qh_axis_distance(&c, 0, n).unwrap() - want).abs() < 1e-13);
        }
        let x = spec(GapFamily::Explicit(vec![2.0, 5.0, 9.0]), 3);
        assert!((qh_axis_distance(&x, 0, 3).unwrap() - 7.039544558970925).abs() < 1e-13);
    }

    #[test]
    fn axis_distance_overflow() {
        let s = spec(GapFamily::DoubleExp, 10);
        assert!(qh_axis_distance(&s, 0, 6).is_ok());
        assert!(matches!(
            qh_axis_distance(&s, 0, 8),
            Err(Error::Overflow { index: 7 })
        ));
        assert!(matches!(
            qh_axis_distance(&s, 0, 11),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn trend_examples() {
        let d = trend_report(&spec(GapFamily::DoubleExp, 40), None).unwrap();
        assert_eq!(d.prime_hint, TrendHint::BoundedAbove);
        assert_eq!(d.verdict_hint, TrendHint::BoundedAbove);
        assert!(d.tail_min >= 1.55 && d.tail_max <= 1.60);

        let c = trend_report(&spec(GapFamily::Constant { alpha: 2.0 }, 40), None).unwrap();
        assert_eq!(c.verdict_hint, TrendHint::DivergesToInfinity);

        let env = LogEnvelope::Linear { r: 1.0, b1: 1.0 };
        let osc = spec(
            GapFamily::Oscillating(OscillatingParams::new(2.0, env.clone())),
            64,
        );
        let o = trend_report(&osc, Some(&env)).unwrap();
        assert_eq!(o.verdict_hint, TrendHint::BoundedAbove);
        assert!(o.prime_tail_min <= 2.0 + 2f64.ln());
        assert_eq!(o.term_ratio, TermRatio::EnvelopeIncrement);

        let short = trend_report(&spec(GapFamily::Constant { alpha: 2.0 }, 5), None).unwrap();
        assert_eq!(short.verdict_hint, TrendHint::Inconclusive);
    }

    #[test]
    fn tail_shape_cases() {
        let cfg = TrendConfig::default();
        let flat = [1.0, 1.0, 1.0, 1.0];
        assert_eq!(tail_shape(&flat, 1, &cfg).hint, TrendHint::BoundedAbove);
        let rising_oscillation = [1.0, 3.0, 2.0, 5.0, 4.0, 7.0];
        assert_eq!(
            tail_shape(&rising_oscillation, 1, &cfg).hint,
            TrendHint::Inconclusive
        );
        let saw = [3.0, 3.5, 4.0, 2.5, 3.0, 3.5];
        assert_eq!(tail_shape(&saw, 1, &cfg).hint, TrendHint::BoundedAbove);
    }
}
