//! Rule-based verdicts on the finiteness of `h(C)`.
//!
//! Rules are keyed to the declared gap family, never inferred from samples: a
//! finite prefix cannot certify an asymptotic hypothesis. They are tried in order
//!
//! 1. bounded gaps                                  ⇒ `h = ∞`
//! 2. `ln α_n / n → 0`                              ⇒ `h = ∞`
//! 3. `α_n ≤ e^{b_n}`, `ln α_n / (b_n - b_{n-1}) → ∞` ⇒ `h = ∞` (with `b_n = n` as a special case)
//! 4. `α_n = e^{cn}`                                ⇒ `h = ∞`
//! 5. sparse spikes `e^{b_{k_m}}` on a constant background ⇒ `h < ∞`
//! 6. `α_n = e^{e^n}`                               ⇒ `h < ∞`
//!
//! and anything else is undetermined, with only the numeric tail diagnostics attached.

use crate::bounds::{bound_summary, criterion_series, trend_report, TailWindow, TrendReport};
use crate::comb::{CombSpec, CustomFamily, GapFamily, LogEnvelope, OscillatingParams};
use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Decision {
    InfiniteHardy,
    FiniteHardy,
    Undetermined,
}

/// The result a verdict rests on. Wire names are fixed by the verdict JSON format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Justification {
    #[serde(rename = "Thm1_2_Subexponential")]
    Subexponential,
    #[serde(rename = "Thm1_3_GeneralBound")]
    EnvelopeIncrement,
    #[serde(rename = "Cor1_4_ExpBound")]
    UnitEnvelope,
    #[serde(rename = "Thm1_5_Oscillating")]
    SparseSpikes,
    #[serde(rename = "Thm1_6_DoubleExp")]
    DoubleExponential,
    #[serde(rename = "Sec1_ExponentialType")]
    ExponentialType,
    #[serde(rename = "BoundedGaps_Thm1_1")]
    BoundedGaps,
    /// Summability of `Σ_j (max_{n≤j} α_n²) θ^j` for every `θ ∈ (0,1)`. Implied by
    /// and ranked after the subexponential rule, so `classify` never reaches it.
    #[serde(rename = "Cor4_1_Bou")]
    ExitMomentSeries,
    NumericTrendOnly,
}

impl Justification {
    pub fn wire_name(self) -> &'static str {
        match self {
            Justification::Subexponential => "Thm1_2_Subexponential",
            Justification::EnvelopeIncrement => "Thm1_3_GeneralBound",
            Justification::UnitEnvelope => "Cor1_4_ExpBound",
            Justification::SparseSpikes => "Thm1_5_Oscillating",
            Justification::DoubleExponential => "Thm1_6_DoubleExp",
            Justification::ExponentialType => "Sec1_ExponentialType",
            Justification::BoundedGaps => "BoundedGaps_Thm1_1",
            Justification::ExitMomentSeries => "Cor4_1_Bou",
            Justification::NumericTrendOnly => "NumericTrendOnly",
        }
    }
}

/// `[lower, upper]`; `[∞, ∞]` marks an infinite Hardy number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInterval {
    pub lower: f64,
    pub upper: f64,
}

impl BoundInterval {
    pub const INFINITE: BoundInterval = BoundInterval {
        lower: f64::INFINITY,
        upper: f64::INFINITY,
    };

    pub fn is_infinite(&self) -> bool {
        self.lower.is_infinite() && self.upper.is_infinite()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub justification: Justification,
    pub bound_interval: BoundInterval,
    pub notes: String,
    pub trend: Option<TrendReport>,
}

impl Verdict {
    /// `{"decision", "justification", "bound_lower", "bound_upper", "notes"}`;
    /// infinite bounds are written as the string `"inf"`.
    pub fn to_json(&self) -> Value {
        let bound = |v: f64| {
            if v.is_finite() {
                json!(v)
            } else {
                json!("inf")
            }
        };
        json!({
            "decision": self.decision,
            "justification": self.justification.wire_name(),
            "bound_lower": bound(self.bound_interval.lower),
            "bound_upper": bound(self.bound_interval.upper),
            "notes": self.notes,
        })
    }
}

/// What is known symbolically about a family's asymptotics.
#[derive(Debug, Clone, Default)]
struct Profile {
    bounded: bool,
    subexponential: bool,
    /// Declared envelope, and whether `ln α_n / (b_n - b_{n-1}) → ∞` for it.
    envelope: Option<(LogEnvelope, bool)>,
    exponential_type: bool,
    sparse_spikes: bool,
    double_exponential: bool,
}

fn profile(family: &GapFamily) -> Profile {
    let mut p = Profile::default();
    match family {
        GapFamily::Explicit(_) => {}
        GapFamily::Constant { .. } => p.bounded = true,
        // p ln(n+1) / n → 0
        GapFamily::Polynomial { .. } => p.subexponential = true,
        GapFamily::Exponential { .. } => p.exponential_type = true,
        GapFamily::SubexpExp { p: exp } => {
            if *exp < 1.0 {
                p.subexponential = true;
            } else {
                // n^p / (n^p - (n-1)^p) ~ n/p → ∞ and the increments grow for p ≥ 1
                p.envelope = Some((LogEnvelope::Power { p: *exp }, true));
            }
        }
        GapFamily::DoubleExp => p.double_exponential = true,
        GapFamily::Oscillating(params) => {
            p.sparse_spikes = true;
            p.envelope = Some((params.envelope.clone(), false));
        }
        GapFamily::Custom(CustomFamily::AlternatingPower { .. }) => p.subexponential = true,
        // b_n / (b_n - b_{n-1}) ~ n^{1-k} / k → ∞
        GapFamily::Custom(CustomFamily::ExpExpPower { k }) => {
            p.envelope = Some((LogEnvelope::ExpPower { k: *k }, true))
        }
        // b_n / (b_n - b_{n-1}) ~ ln² m / (ln m - 1) → ∞
        GapFamily::Custom(CustomFamily::ExpExpNOverLogN) => {
            p.envelope = Some((LogEnvelope::ExpNOverLogN, true))
        }
    }
    p
}

/// The envelope declared by a family, if any.
pub fn declared_envelope(family: &GapFamily) -> Option<LogEnvelope> {
    profile(family).envelope.map(|(e, _)| e)
}

pub fn classify(spec: &CombSpec) -> Verdict {
    let prof = profile(spec.family());
    let series = match criterion_series(spec) {
        Ok(s) => s,
        Err(e) => {
            return Verdict {
                decision: Decision::Undetermined,
                justification: Justification::NumericTrendOnly,
                bound_interval: BoundInterval {
                    lower: 0.5,
                    upper: f64::INFINITY,
                },
                notes: format!("criterion series unavailable: {e}"),
                trend: None,
            }
        }
    };
    let summary = bound_summary(&series);
    let last = series
        .last()
        .expect("materialized specs have at least one tooth");
    let trend = trend_report(spec, prof.envelope.as_ref().map(|(e, _)| e)).ok();
    let tail = format!(
        "R_{} = {:.6}, R'_{} = {:.6}",
        last.n, last.ratio_r, last.n, last.ratio_r_prime
    );

    let infinite = |justification, why: &str| Verdict {
        decision: Decision::InfiniteHardy,
        justification,
        bound_interval: BoundInterval::INFINITE,
        notes: format!("{why}; {tail}"),
        trend: trend.clone(),
    };
    let finite = |justification, why: &str| Verdict {
        decision: Decision::FiniteHardy,
        justification,
        bound_interval: BoundInterval {
            lower: summary.lower,
            upper: summary.upper,
        },
        notes: format!(
            "{why}; bounds are tail minima over n in [{}, {}]; {tail}",
            summary.window.start, summary.window.end
        ),
        trend: trend.clone(),
    };

    if prof.bounded {
        return infinite(Justification::BoundedGaps, "gap sequence is bounded");
    }
    if prof.subexponential {
        return infinite(
            Justification::Subexponential,
            "ln(alpha_n)/n -> 0 for this family",
        );
    }
    if let Some((env, true)) = &prof.envelope {
        if env.is_identity() {
            return infinite(
                Justification::UnitEnvelope,
                "alpha_n <= e^n and alpha_n -> infinity",
            );
        }
        return infinite(
            Justification::EnvelopeIncrement,
            "alpha_n <= e^(b_n) with ln(alpha_n)/(b_n - b_(n-1)) -> infinity",
        );
    }
    if prof.exponential_type {
        return infinite(
            Justification::ExponentialType,
            "alpha_n = e^(cn): R_n grows like n/2, no sharp oscillations",
        );
    }
    if prof.sparse_spikes {
        return finite(
            Justification::SparseSpikes,
            "sparse spikes e^(b_k) on a constant background keep liminf R'_n <= 2 + ln(c)/r",
        );
    }
    if prof.double_exponential {
        return finite(
            Justification::DoubleExponential,
            "alpha_n = e^(e^n): R'_n -> e/(e-1)",
        );
    }

    let hint = trend
        .as_ref()
        .map(|t| format!("{:?}", t.verdict_hint))
        .unwrap_or_default();
    Verdict {
        decision: Decision::Undetermined,
        justification: Justification::NumericTrendOnly,
        bound_interval: BoundInterval {
            lower: summary.lower,
            upper: summary.upper,
        },
        notes: format!("no symbolic rule applies; numeric trend hint {hint}; {tail}"),
        trend,
    }
}

/// Outcome of the exit-moment series test for one `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSeriesCheck {
    pub theta: f64,
    /// Least-squares slope of `ln` term over the tail window, i.e. `ln` of the
    /// estimated term ratio.
    pub log_term_ratio: f64,
    pub converges: bool,
}

/// Tests `Σ_j (max_{n≤j} α_n²) θ^j < ∞` on the materialized prefix: the `ln` terms
/// `2 max_{n≤j} ln α_n + j ln θ` must decay geometrically over the tail window.
pub fn moment_series_check(spec: &CombSpec, theta: f64) -> MomentSeriesCheck {
    if !(theta > 0.0 && theta < 1.0) {
        return MomentSeriesCheck {
            theta,
            log_term_ratio: f64::NAN,
            converges: false,
        };
    }
    let ln_theta = theta.ln();
    let mut running_max = f64::NEG_INFINITY;
    let terms: Vec<f64> = spec
        .log_gaps()
        .iter()
        .enumerate()
        .map(|(i, &lg)| {
            running_max = running_max.max(lg);
            2.0 * running_max + (i + 1) as f64 * ln_theta
        })
        .collect();
    let window = TailWindow::upper_half(terms.len());
    let tail = window.slice(&terms);
    let xs: Vec<f64> = (window.start..=window.end).map(|n| n as f64).collect();
    let slope = crate::logspace::ls_slope(&xs, tail);
    let converges = tail.len() >= 2 && slope < 0.0 && tail[tail.len() - 1] <= tail[0];
    MomentSeriesCheck {
        theta,
        log_term_ratio: slope,
        converges,
    }
}

/// True when the series converges at every requested `θ`.
pub fn exit_moment_series_converges(spec: &CombSpec, thetas: &[f64]) -> bool {
    !thetas.is_empty()
        && thetas
            .iter()
            .all(|&t| moment_series_check(spec, t).converges)
}

/// Sparse-spike comb with `α_n = c` off the greedy subsequence and `e^{b_{k_m}}` on it.
pub fn build_counterexample(params: OscillatingParams, n: usize) -> Result<CombSpec> {
    if !(params.c > 1.0) {
        return Err(Error::InvalidFamilyParam(format!(
            "c = {} must exceed 1",
            params.c
        )));
    }
    if n >= 2 && !(params.r(n) > 0.0) {
        return Err(Error::InvalidFamilyParam(
            "envelope increments must be positive".into(),
        ));
    }
    CombSpec::materialize(GapFamily::Oscillating(params), n)
}

/// Tail checks on a sparse-spike comb.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub spikes: Vec<usize>,
    /// `(k_m, I_{k_m})` with `I_k = Σ_{i≤k} ln α_i / ln Σ_{i≤k} α_i`.
    pub spike_ratios: Vec<(usize, f64)>,
    /// Minimum of `I_{k_m}` over spikes in the tail window (the last spike if none).
    pub spike_ratio_tail_min: f64,
    /// `2 + ln(c) / r`.
    pub spike_ratio_bound: f64,
    /// Tail minimum of `ln α_n / (b_n - b_{n-1})`.
    pub term_ratio_tail_min: f64,
    /// `ln(c) / r`.
    pub term_ratio_bound: f64,
}

pub fn counterexample_report(spec: &CombSpec) -> Option<CounterexampleReport> {
    let GapFamily::Oscillating(params) = spec.family() else {
        return None;
    };
    let series = criterion_series(spec).ok()?;
    let n_max = spec.truncate_n();
    let window = TailWindow::upper_half(n_max);
    let spikes = spec.spike_indices().to_vec();
    let spike_ratios: Vec<(usize, f64)> = spikes
        .iter()
        .map(|&k| (k, series[k - 1].ratio_r_prime))
        .collect();
    let in_tail: Vec<f64> = spike_ratios
        .iter()
        .filter(|(k, _)| window.contains(*k))
        .map(|&(_, v)| v)
        .collect();
    let spike_ratio_tail_min = if in_tail.is_empty() {
        spike_ratios.last().map_or(f64::NAN, |&(_, v)| v)
    } else {
        in_tail.into_iter().fold(f64::INFINITY, f64::min)
    };
    let r = params.r(n_max);
    let log_c = params.c.ln();
    let term_ratio_tail_min = (window.start.max(2)..=window.end)
        .filter_map(|n| {
            params
                .envelope
                .increment(n)
                .map(|d| spec.log_gaps()[n - 1] / d)
        })
        .fold(f64::INFINITY, f64::min);
    Some(CounterexampleReport {
        spikes,
        spike_ratios,
        spike_ratio_tail_min,
        spike_ratio_bound: 2.0 + log_c / r,
        term_ratio_tail_min,
        term_ratio_bound: log_c / r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn verdict(family: GapFamily, n: usize) -> Verdict {
        classify(&CombSpec::materialize(family, n).unwrap())
    }

    fn unit_osc() -> OscillatingParams {
        OscillatingParams::new(2.0, LogEnvelope::Linear { r: 1.0, b1: 1.0 })
    }

    #[test]
    fn polynomial_is_subexponential() {
        let v = verdict(GapFamily::Polynomial { p: 3.0 }, 40);
        assert_eq!(v.decision, Decision::InfiniteHardy);
        assert_eq!(v.justification, Justification::Subexponential);
        assert!(v.bound_interval.is_infinite());
        let j = v.to_json();
        assert_eq!(j["decision"], "InfiniteHardy");
        assert_eq!(j["justification"], "Thm1_2_Subexponential");
        assert_eq!(j["bound_upper"], "inf");
    }

    #[test]
    fn double_exp_interval() {
        let v = verdict(GapFamily::DoubleExp, 40);
        assert_eq!(v.decision, Decision::FiniteHardy);
        assert_eq!(v.justification, Justification::DoubleExponential);
        let b = v.bound_interval;
        assert!((b.lower - 0.582).abs() < 1e-3 && (b.upper - 10.328).abs() < 1e-3);
        let e = std::f64::consts::E;
        assert!(
            b.contains(e / (e - 1.0) - 1.0 + 1e-8) && b.contains(4.0 * e / (e - 1.0) + 4.0 - 1e-8)
        );
    }

    #[test]
    fn oscillating_is_finite() {
        let v = verdict(GapFamily::Oscillating(unit_osc()), 64);
        assert_eq!(v.decision, Decision::FiniteHardy);
        assert_eq!(v.justification, Justification::SparseSpikes);
        assert!(v.bound_interval.lower <= v.bound_interval.upper);
    }

    #[test]
    fn rule_precedence() {
        let cases = [
            (
                GapFamily::Constant { alpha: 3.0 },
                Justification::BoundedGaps,
            ),
            (
                GapFamily::SubexpExp { p: 0.5 },
                Justification::Subexponential,
            ),
            (GapFamily::SubexpExp { p: 1.0 }, Justification::UnitEnvelope),
            (
                GapFamily::SubexpExp { p: 2.0 },
                Justification::EnvelopeIncrement,
            ),
            (
                GapFamily::Exponential { c: 1.0 },
                Justification::ExponentialType,
            ),
            (
                GapFamily::Custom(CustomFamily::AlternatingPower { p: 2.0 }),
                Justification::Subexponential,
            ),
            (
                GapFamily::Custom(CustomFamily::ExpExpPower { k: 0.5 }),
                Justification::EnvelopeIncrement,
            ),
            (
                GapFamily::Custom(CustomFamily::ExpExpNOverLogN),
                Justification::EnvelopeIncrement,
            ),
        ];
        for (family, want) in cases {
            let v = verdict(family.clone(), 30);
            assert_eq!(v.decision, Decision::InfiniteHardy, "{family:?}");
            assert_eq!(v.justification, want, "{family:?}");
        }
    }

    #[test]
    fn explicit_gets_trend_only() {
        let v = verdict(GapFamily::from_gaps(&[2.0; 20]), 20);
        assert_eq!(v.decision, Decision::Undetermined);
        assert_eq!(v.justification, Justification::NumericTrendOnly);
        assert!(v.trend.is_some());
    }

    #[test]
    fn shifted_envelope_increments_stay_positive() {
        let env = LogEnvelope::ExpNOverLogN;
        let r = env.min_increment(2000).unwrap();
        assert!(r > 2.0, "r = {r}");
    }

    #[test]
    fn moment_series_examples() {
        let poly = CombSpec::materialize(GapFamily::Polynomial { p: 2.0 }, 200).unwrap();
        assert!(exit_moment_series_converges(&poly, &[0.5]));
        let dexp = CombSpec::materialize(GapFamily::DoubleExp, 40).unwrap();
        assert!(!exit_moment_series_converges(&dexp, &[0.9]));
        let c = CombSpec::materialize(GapFamily::Constant { alpha: 2.0 }, 40).unwrap();
        assert!(exit_moment_series_converges(&c, &[0.1, 0.5, 0.9, 0.99]));
        assert!(!exit_moment_series_converges(&c, &[]));
        assert!(!exit_moment_series_converges(&c, &[1.5]));
    }

    #[test]
    fn moment_series_partial_sums_settle() {
        // 12-digit stabilisation of the partial sums by j = 200 for polynomial gaps
        let poly = CombSpec::materialize(GapFamily::Polynomial { p: 2.0 }, 200).unwrap();
        let mut running = 0f64;
        let mut sum = 0.0;
        let mut at_150 = 0.0;
        for (j, lg) in poly.log_gaps().iter().enumerate() {
            running = running.max(*lg);
            sum += (2.0 * running + (j + 1) as f64 * 0.5f64.ln()).exp();
            if j + 1 == 150 {
                at_150 = sum;
            }
        }
        assert!(((sum - at_150) / sum).abs() < 1e-12);
    }

    #[test]
    fn counterexample_gaps() {
        let spec = build_counterexample(unit_osc(), 7).unwrap();
        let e = std::f64::consts::E;
        let gaps: Vec<f64> = (1..=7).map(|n| spec.gap(n).unwrap()).collect();
        let want = [e, e * e, e.powi(3), 2.0, 2.0, e.powi(6), 2.0];
        for (g, w) in gaps.iter().zip(want) {
            assert!((g - w).abs() < 1e-12 * w);
        }
        let one = build_counterexample(unit_osc(), 1).unwrap();
        assert!((one.gap(1).unwrap() - e).abs() < 1e-15);
        assert!(build_counterexample(
            OscillatingParams::new(0.9, LogEnvelope::Linear { r: 1.0, b1: 1.0 }),
            5
        )
        .is_err());
    }

    #[test]
    fn counterexample_bounds() {
        let spec = build_counterexample(unit_osc(), 64).unwrap();
        let rep = counterexample_report(&spec).unwrap();
        assert!((rep.spike_ratio_bound - (2.0 + 2f64.ln())).abs() < 1e-15);
        assert!(rep.spike_ratio_tail_min <= rep.spike_ratio_bound);
        assert!((rep.term_ratio_tail_min - 2f64.ln()).abs() < 1e-15);
    }
}
