use comb_hardy::comb::Location;
use comb_hardy::{CombSpec, GapFamily, Point};
use proptest::prelude::*;

fn gaps() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1.01f64..10.0, 1..=10)
}

fn comb(gaps: &[f64]) -> CombSpec {
    CombSpec::materialize(GapFamily::from_gaps(gaps), gaps.len()).unwrap()
}

proptest! {
    #[test]
    fn axis_is_farthest_from_boundary(g in gaps(), t in 0.0f64..1.0, y in -30.0f64..30.0) {
        let spec = comb(&g);
        let x = t * spec.coords().last().unwrap();
        let on_axis = spec.dist_to_boundary(Point::real(x)).unwrap();
        let off_axis = spec.dist_to_boundary(Point::new(x, y)).unwrap();
        prop_assert!(on_axis > 0.0);
        prop_assert!(off_axis <= on_axis);
    }

    #[test]
    fn axis_distance_between_teeth(g in gaps(), i in 0usize..10, t in 0.0f64..1.0) {
        let spec = comb(&g);
        let i = 1 + i % g.len();
        let (lo, hi) = (spec.x_coord(i - 1).unwrap(), spec.x_coord(i).unwrap());
        let x = lo + t * (hi - lo);
        let d = spec.dist_to_boundary(Point::real(x)).unwrap();
        let near = (x - lo).min(hi - x);
        prop_assert!((d - (1.0 + near * near).sqrt()).abs() <= 1e-12 * d);
        let mirrored = spec.dist_to_boundary(Point::real(lo + hi - x)).unwrap();
        prop_assert!((d - mirrored).abs() <= 1e-12 * d);
    }

    #[test]
    fn rays_and_wall_are_boundary(g in gaps(), k in 0usize..11, y in 1.0f64..50.0, sign in prop::bool::ANY) {
        let spec = comb(&g);
        let k = k % (g.len() + 1);
        let y = if sign { y } else { -y };
        let xk = spec.x_coord(k).unwrap();
        prop_assert_eq!(spec.dist_to_boundary(Point::new(xk, y)).unwrap(), 0.0);
        prop_assert_eq!(spec.dist_to_boundary(Point::new(spec.wall(), y - 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn inserting_a_tooth_never_increases_distance(
        g in prop::collection::vec(2.5f64..10.0, 2..=8),
        at in 1usize..8,
        frac in 0.41f64..0.59,
        zx in 0.0f64..1.0,
        zy in -5.0f64..5.0,
    ) {
        let at = 1 + at % (g.len() - 1);
        let mut split = g.clone();
        let gap = split[at];
        split[at] = gap * frac;
        split.insert(at + 1, gap * (1.0 - frac));
        let (before, after) = (comb(&g), comb(&split));
        let x_end = *before.coords().last().unwrap();
        let z = Point::new(before.wall() + zx * (x_end - before.wall()), zy);
        if let Location::Interior(d_after) = after.locate(z, false) {
            let d_before = before.dist_to_boundary(z).unwrap();
            prop_assert!(d_after <= d_before + 1e-12 * d_before.max(1.0), "{m} vs {d_before}", m = d_after);
        }
    }
}

#[test]
fn beyond_truncation_is_reported() {
    let spec = comb(&[2.0, 3.0]);
    assert!(spec.contains(Point::new(5.5, 0.0)).is_err());
    assert_eq!(
        spec.locate(Point::new(5.5, 0.0), true),
        Location::Interior(0.5f64.hypot(1.0))
    );
}
