use comb_hardy::bounds::{bound_summary, criterion_series, qh_axis_distance};
use comb_hardy::classify::{classify, Decision};
use comb_hardy::qh::{grid_delta, hardy_estimate, Connectivity, GridConfig, GridTarget};
use comb_hardy::{CombSpec, GapFamily, Point};

fn explicit(xs: &[f64]) -> CombSpec {
    CombSpec::materialize(GapFamily::Explicit(xs.to_vec()), xs.len()).unwrap()
}

fn to_point(spec: &CombSpec, cell: f64, clip: f64, target: Point) -> f64 {
    let cfg = GridConfig::new(cell, clip, Connectivity::Eight).unwrap();
    grid_delta(spec, &cfg, Point::ORIGIN, GridTarget::Point(target))
        .unwrap()
        .value
}

#[test]
fn grid_agrees_with_closed_form_on_small_combs() {
    for xs in [
        vec![2.0, 5.0, 9.0],
        vec![3.0, 4.5, 10.0, 12.0],
        vec![1.5, 11.0],
    ] {
        let spec = explicit(&xs);
        let n = xs.len();
        let exact = qh_axis_distance(&spec, 0, n).unwrap();
        let g = to_point(&spec, 0.02, xs[n - 1] + 2.0, Point::real(xs[n - 1]));
        assert!(g >= exact * (1.0 - 1e-3), "{xs:?}: {g} < {exact}");
        assert!((g - exact).abs() / exact < 0.02, "{xs:?}: {g} vs {exact}");
    }
}

#[test]
fn refinement_is_cauchy() {
    let spec = explicit(&[2.0, 5.0, 9.0, 11.0]);
    let target = Point::new(10.0, 0.5);
    let coarse = to_point(&spec, 0.04, 13.0, target);
    let fine = to_point(&spec, 0.02, 13.0, target);
    let cfg = GridConfig::new(0.04, 13.0, Connectivity::Eight).unwrap();
    let err = grid_delta(&spec, &cfg, Point::ORIGIN, GridTarget::Point(target))
        .unwrap()
        .discretization_error;
    assert!(fine <= coarse + err);
    assert!((coarse - fine).abs() / fine < 0.01, "{coarse} vs {fine}");
}

#[test]
fn larger_clip_never_increases_distance() {
    let spec = explicit(&[2.0, 5.0, 9.0]);
    let target = Point::new(3.5, 2.5);
    let mut last = f64::INFINITY;
    for clip in [4.5, 6.0, 9.0, 12.0] {
        let v = to_point(&spec, 0.05, clip, target);
        assert!(v <= last + 1e-12, "clip {clip}: {v} > {last}");
        last = v;
    }
}

#[test]
fn circle_target_below_point_target() {
    let spec = explicit(&[2.0, 5.0]);
    let cfg = GridConfig::new(0.02, 5.0, Connectivity::Eight).unwrap();
    let circle = grid_delta(&spec, &cfg, Point::ORIGIN, GridTarget::Circle(4.0)).unwrap();
    let point = grid_delta(
        &spec,
        &cfg,
        Point::ORIGIN,
        GridTarget::Point(Point::real(4.0)),
    )
    .unwrap();
    assert!(circle.value > 0.0 && circle.value <= point.value);
}

#[test]
fn four_connectivity_is_coarser() {
    let spec = explicit(&[2.0, 5.0]);
    let target = Point::new(3.5, 3.0);
    let eight = to_point(&spec, 0.05, 6.0, target);
    let cfg = GridConfig::new(0.05, 6.0, Connectivity::Four).unwrap();
    let four = grid_delta(&spec, &cfg, Point::ORIGIN, GridTarget::Point(target)).unwrap();
    assert!(four.value >= eight - 1e-12);
    assert!(four.value - four.discretization_error <= eight);
}

#[test]
fn single_tooth_near_circle() {
    let spec = explicit(&[4.0]);
    let cfg = GridConfig::new(0.05, 5.0, Connectivity::Eight).unwrap();
    let est = hardy_estimate(&spec, &cfg, &[2.0, 3.0]).unwrap();
    assert!(est.delta.iter().all(|&d| d > 0.0));
    let direct = grid_delta(&spec, &cfg, Point::ORIGIN, GridTarget::Circle(3.0)).unwrap();
    assert!((direct.value - est.delta[1]).abs() < 1e-12);
}

#[test]
fn bounded_gaps_grow_past_threshold() {
    let spec = CombSpec::materialize(GapFamily::Constant { alpha: 2.0 }, 120).unwrap();
    assert_eq!(classify(&spec).decision, Decision::InfiniteHardy);
    let cfg = GridConfig::new(0.1, 210.0, Connectivity::Eight).unwrap();
    let est = hardy_estimate(&spec, &cfg, &[50.0, 100.0, 200.0]).unwrap();
    let q = &est.delta_over_logr;
    assert!(q[0] < q[1] && q[1] < q[2], "{q:?}");
    assert!(q[2] > 5.0);
}

#[test]
fn double_exp_sandwich_overlaps_verdict() {
    let spec = CombSpec::materialize(GapFamily::DoubleExp, 4).unwrap();
    let verdict = classify(&spec);
    assert_eq!(verdict.decision, Decision::FiniteHardy);
    let cfg = GridConfig::new(0.2, 110.0, Connectivity::Eight).unwrap();
    let est = hardy_estimate(&spec, &cfg, &[10.0, 31.6, 100.0]).unwrap();
    let band_max = est.delta_over_logr.iter().copied().fold(0.0, f64::max);
    let u_tail = bound_summary(
        &criterion_series(&CombSpec::materialize(GapFamily::DoubleExp, 40).unwrap()).unwrap(),
    )
    .upper;
    assert!(band_max < 2.0 * u_tail);
    let b = verdict.bound_interval;
    assert!(
        est.sandwich_low <= b.upper && b.lower <= est.sandwich_high,
        "{est:?} vs {b:?}"
    );
}
