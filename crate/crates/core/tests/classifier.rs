use comb_hardy::bounds::{criterion_series, TailWindow};
use comb_hardy::classify::{
    build_counterexample, classify, counterexample_report, Decision, Justification,
};
use comb_hardy::{CombSpec, GapFamily, LogEnvelope, OscillatingParams};

fn unit_oscillating() -> GapFamily {
    GapFamily::Oscillating(OscillatingParams::new(
        2.0,
        LogEnvelope::Linear { r: 1.0, b1: 1.0 },
    ))
}

fn truth_table() -> Vec<(GapFamily, Decision)> {
    vec![
        (GapFamily::Constant { alpha: 2.0 }, Decision::InfiniteHardy),
        (GapFamily::Polynomial { p: 1.0 }, Decision::InfiniteHardy),
        (GapFamily::Polynomial { p: 3.0 }, Decision::InfiniteHardy),
        (GapFamily::SubexpExp { p: 0.5 }, Decision::InfiniteHardy),
        (GapFamily::Exponential { c: 1.0 }, Decision::InfiniteHardy),
        (GapFamily::DoubleExp, Decision::FiniteHardy),
        (unit_oscillating(), Decision::FiniteHardy),
    ]
}

#[test]
fn decisions_stable_under_doubling() {
    for (family, want) in truth_table() {
        let mut seen = None;
        for n in [20, 40, 80, 160] {
            let v = classify(&CombSpec::materialize(family.clone(), n).unwrap());
            assert_eq!(v.decision, want, "{family:?} at N = {n}");
            let key = (v.decision, v.justification);
            assert!(
                seen.is_none() || seen == Some(key),
                "{family:?} changed at N = {n}"
            );
            seen = Some(key);
        }
    }
}

#[test]
fn numeric_consistency_with_the_criterion() {
    for (family, want) in truth_table() {
        let spec = CombSpec::materialize(family.clone(), 400).unwrap();
        let series = criterion_series(&spec).unwrap();
        match want {
            Decision::InfiniteHardy => {
                let r = series.last().unwrap().ratio_r;
                assert!(r > 10.0, "{family:?}: R_400 = {r}");
            }
            _ => {
                let w = TailWindow::upper_half(400);
                let tail: Vec<f64> = w.slice(&series).iter().map(|s| s.ratio_r_prime).collect();
                let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
                assert!(min < 3.0, "{family:?}: tail min = {min}");
            }
        }
    }
}

#[test]
fn double_exp_interval_contains_limits() {
    let e = std::f64::consts::E;
    for n in [40, 80] {
        let v = classify(&CombSpec::materialize(GapFamily::DoubleExp, n).unwrap());
        assert_eq!(v.justification, Justification::DoubleExponential);
        let b = v.bound_interval;
        assert!(b.lower < b.upper);
        assert!((b.upper - (4.0 * e / (e - 1.0) + 4.0)).abs() < 1e-4);
        assert!((b.lower - (e / (e - 1.0) - 1.0)).abs() < 1e-4);
    }
}

#[test]
fn counterexample_proof_bounds() {
    for n in [64, 200, 1000] {
        let spec = build_counterexample(
            OscillatingParams::new(2.0, LogEnvelope::Linear { r: 1.0, b1: 1.0 }),
            n,
        )
        .unwrap();
        let rep = counterexample_report(&spec).unwrap();
        assert!(
            rep.spike_ratio_tail_min <= 2.0 + 2f64.ln() + 0.05,
            "N = {n}: {rep:?}"
        );
        assert!(rep.term_ratio_tail_min <= 2f64.ln() + 1e-12);
    }
}

#[test]
fn verdict_json_shape() {
    let v = classify(&CombSpec::materialize(GapFamily::DoubleExp, 40).unwrap());
    let j = v.to_json();
    for key in [
        "decision",
        "justification",
        "bound_lower",
        "bound_upper",
        "notes",
    ] {
        assert!(j.get(key).is_some(), "{key}");
    }
    assert_eq!(j["justification"], "Thm1_6_DoubleExp");
    assert!(j["bound_lower"].as_f64().unwrap() < j["bound_upper"].as_f64().unwrap());
}
