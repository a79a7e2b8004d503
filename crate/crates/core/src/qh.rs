//! Numerical quasi-hyperbolic distances.
//!
//! `δ_C(a, b) = inf ∫_γ |dz| / d(z, ∂C)` is approximated from above by shortest
//! paths on an origin-anchored square lattice. Edges between adjacent interior
//! nodes weigh `|u - v| / d((u + v) / 2)` and edges that cross a tooth are dropped.
//! Because the lattice is anchored at the origin, lattices with a larger clip
//! radius contain the smaller ones, so values never increase as the clip grows.

use crate::bounds::{qh_axis_distance, TailWindow};
use crate::comb::{CombSpec, Location, Point};
use crate::error::{Error, Result};
use serde::Serialize;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// Refuse lattices larger than this many nodes.
pub const MAX_GRID_NODES: usize = 80_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    /// Worst-case relative overestimate of Euclidean length by lattice paths.
    pub fn anisotropy(self) -> f64 {
        match self {
            Connectivity::Four => 1.0 - FRAC_1_SQRT_2,
            Connectivity::Eight => 1.0 - (PI / 8.0).cos(),
        }
    }

    fn offsets(self) -> &'static [(i64, i64)] {
        const FOUR: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        const EIGHT: [(i64, i64); 8] = [
            (1, 0),
            (-1, 0),
            (0, 1),
            (0, -1),
            (1, 1),
            (1, -1),
            (-1, 1),
            (-1, -1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

impl TryFrom<u32> for Connectivity {
    type Error = Error;

    fn try_from(v: u32) -> Result<Self> {
        match v {
            4 => Ok(Connectivity::Four),
            8 => Ok(Connectivity::Eight),
            _ => Err(Error::Config(format!(
                "connectivity must be 4 or 8, got {v}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridConfig {
    pub cell: f64,
    /// The lattice covers `|z| ≤ clip_radius`, `Re z ≤ x_N`.
    pub clip_radius: f64,
    pub connectivity: Connectivity,
}

impl GridConfig {
    pub fn new(cell: f64, clip_radius: f64, connectivity: Connectivity) -> Result<Self> {
        let cfg = Self {
            cell,
            clip_radius,
            connectivity,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        // the cell has to resolve the unit half-length of a tooth gap
        if !(self.cell > 0.0 && self.cell < 0.25) {
            return Err(Error::Config(format!(
                "cell = {} must lie in (0, 1/4)",
                self.cell
            )));
        }
        if !(self.clip_radius > 1.0) || !self.clip_radius.is_finite() {
            return Err(Error::Config(format!(
                "clip_radius = {} must exceed 1",
                self.clip_radius
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QhMethod {
    ClosedForm,
    Quadrature,
    GridPath,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum QhTarget {
    PointToPoint,
    PointToCircleSet { radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QhDistanceResult {
    pub value: f64,
    pub method: QhMethod,
    pub config: Option<GridConfig>,
    pub target: QhTarget,
    /// Bound on how far below `value` the true distance may lie. Grid paths only
    /// overestimate through lattice anisotropy, so this is `value` times
    /// [`Connectivity::anisotropy`]. Zero for the closed form.
    pub discretization_error: f64,
    /// Grid node that attained the value (circle targets only).
    pub attained_at: Option<Point>,
}

pub fn closed_form_axis(spec: &CombSpec, a: usize, b: usize) -> Result<QhDistanceResult> {
    Ok(QhDistanceResult {
        value: qh_axis_distance(spec, a, b)?,
        method: QhMethod::ClosedForm,
        config: None,
        target: QhTarget::PointToPoint,
        discretization_error: 0.0,
        attained_at: None,
    })
}

/// `∫_{x_a}^{x_b} dx / d(x, ∂C)` along the real axis by adaptive Simpson, split
/// at the teeth and at the midpoints between them where the integrand has kinks.
pub fn axis_quadrature(
    spec: &CombSpec,
    a: usize,
    b: usize,
    rel_tol: f64,
) -> Result<QhDistanceResult> {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    let xa = spec.x_coord(a)?;
    spec.x_coord(b)?;
    let f = |x: f64| 1.0 / spec.dist_to_boundary(Point::real(x)).unwrap_or(0.0);
    let mut breaks = vec![xa];
    for k in a..b {
        let lo = spec.x_coord(k)?;
        let hi = spec.x_coord(k + 1)?;
        breaks.push(0.5 * (lo + hi));
        breaks.push(hi);
    }
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], rel_tol * (w[1] - w[0]).max(1e-300), 48);
    }
    Ok(QhDistanceResult {
        value: total,
        method: QhMethod::Quadrature,
        config: None,
        target: QhTarget::PointToPoint,
        discretization_error: 0.0,
        attained_at: None,
    })
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Target of a grid query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridTarget {
    Point(Point),
    /// `F_r`, discretized as interior nodes within `cell/√2` of `|z| = r`.
    Circle(f64),
}

struct Lattice<'a> {
    spec: &'a CombSpec,
    h: f64,
    clip: f64,
    x_max: f64,
    i_min: i64,
    i_max: i64,
    j_max: i64,
    ny: usize,
    /// Lazily filled `d(node, ∂C)`; NaN means not yet computed, 0 means not interior.
    dist_cache: Vec<f64>,
}

impl<'a> Lattice<'a> {
    fn new(spec: &'a CombSpec, cfg: &GridConfig) -> Result<Self> {
        cfg.validate()?;
        let h = cfg.cell;
        let x_last = *spec.coords().last().expect("x_0 is always present");
        let x_max = x_last.min(cfg.clip_radius);
        let x_min = spec.wall().max(-cfg.clip_radius);
        let i_min = (x_min / h).floor() as i64;
        let i_max = (x_max / h).ceil() as i64;
        let j_max = (cfg.clip_radius / h).floor() as i64;
        let nx = (i_max - i_min + 1) as usize;
        let ny = (2 * j_max + 1) as usize;
        let nodes = nx
            .checked_mul(ny)
            .filter(|&n| n <= MAX_GRID_NODES)
            .ok_or_else(|| {
                Error::Config(format!(
                    "lattice of {nx} x {ny} nodes is too large; coarsen the cell or clip"
                ))
            })?;
        Ok(Self {
            spec,
            h,
            clip: cfg.clip_radius,
            x_max: x_last,
            i_min,
            i_max,
            j_max,
            ny,
            dist_cache: vec![f64::NAN; nodes],
        })
    }

    fn index(&self, i: i64, j: i64) -> Option<usize> {
        if i < self.i_min || i > self.i_max || j.abs() > self.j_max {
            return None;
        }
        Some((i - self.i_min) as usize * self.ny + (j + self.j_max) as usize)
    }

    fn coords(&self, idx: usize) -> (i64, i64) {
        (
            self.i_min + (idx / self.ny) as i64,
            (idx % self.ny) as i64 - self.j_max,
        )
    }

    fn point(&self, i: i64, j: i64) -> Point {
        // round-off must not push the last column past x_N
        Point::new((i as f64 * self.h).min(self.x_max), j as f64 * self.h)
    }

    fn interior_distance(&self, z: Point) -> f64 {
        if z.abs() > self.clip {
            return 0.0;
        }
        match self.spec.locate(z, false) {
            Location::Interior(d) => d,
            _ => 0.0,
        }
    }

    fn node_distance(&mut self, idx: usize) -> f64 {
        let cached = self.dist_cache[idx];
        if !cached.is_nan() {
            return cached;
        }
        let (i, j) = self.coords(idx);
        let d = self.interior_distance(self.point(i, j));
        self.dist_cache[idx] = d;
        d
    }

    /// Midpoint-rule weight of the straight segment `u -> v`, `None` if it leaves the domain.
    fn segment_weight(&self, u: Point, v: Point, pieces: usize) -> Option<f64> {
        if self.spec.segment_crosses_ray(u, v) {
            return None;
        }
        let len = u.dist(v);
        let mut w = 0.0;
        for k in 0..pieces {
            let t = (k as f64 + 0.5) / pieces as f64;
            let m = Point::new(u.re + t * (v.re - u.re), u.im + t * (v.im - u.im));
            let d = self.interior_distance(m);
            if !(d > 0.0) {
                return None;
            }
            w += len / pieces as f64 / d;
        }
        Some(w)
    }

    /// Interior nodes around `z` reachable by a straight segment, with its weight.
    fn attach(&mut self, z: Point) -> Vec<(usize, f64)> {
        let ci = (z.re / self.h).round() as i64;
        let cj = (z.im / self.h).round() as i64;
        let mut out = Vec::new();
        for di in -1..=1 {
            for dj in -1..=1 {
                let Some(idx) = self.index(ci + di, cj + dj) else {
                    continue;
                };
                if !(self.node_distance(idx) > 0.0) {
                    continue;
                }
                let p = self.point(ci + di, cj + dj);
                let w = if p == z {
                    Some(0.0)
                } else {
                    self.segment_weight(z, p, 4)
                };
                if let Some(w) = w {
                    out.push((idx, w));
                }
            }
        }
        out
    }
}

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    cost: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `source` until every circle band has been reached.
/// Returns, per radius, the distance and attaining node.
fn circle_search(
    lat: &mut Lattice<'_>,
    cfg: &GridConfig,
    source: Point,
    radii: &[f64],
) -> Result<Vec<(f64, Point)>> {
    let band = lat.h * FRAC_1_SQRT_2;
    let mut found: Vec<Option<(f64, Point)>> = vec![None; radii.len()];
    let mut remaining = radii.len();
    let mut dist = vec![f64::INFINITY; lat.dist_cache.len()];
    let mut heap = BinaryHeap::new();
    for (idx, w) in lat.attach(source) {
        if w < dist[idx] {
            dist[idx] = w;
            heap.push(Entry { cost: w, idx });
        }
    }
    let offsets = cfg.connectivity.offsets();
    while let Some(Entry { cost, idx }) = heap.pop() {
        if cost > dist[idx] {
            continue;
        }
        let (i, j) = lat.coords(idx);
        let p = lat.point(i, j);
        let modulus = p.abs();
        let first = radii.partition_point(|&r| r < modulus - band);
        for k in first..radii.len() {
            if radii[k] > modulus + band {
                break;
            }
            if found[k].is_none() {
                found[k] = Some((cost, p));
                remaining -= 1;
            }
        }
        if remaining == 0 {
            break;
        }
        for &(di, dj) in offsets {
            let Some(nidx) = lat.index(i + di, j + dj) else {
                continue;
            };
            if !(lat.node_distance(nidx) > 0.0) {
                continue;
            }
            let q = lat.point(i + di, j + dj);
            let Some(w) = lat.segment_weight(p, q, 1) else {
                continue;
            };
            let next = cost + w;
            if next < dist[nidx] {
                dist[nidx] = next;
                heap.push(Entry {
                    cost: next,
                    idx: nidx,
                });
            }
        }
    }
    found
        .into_iter()
        .map(|f| f.ok_or(Error::Unreachable))
        .collect()
}

fn point_search(
    lat: &mut Lattice<'_>,
    cfg: &GridConfig,
    source: Point,
    target: Point,
) -> Result<f64> {
    let exits = lat.attach(target);
    if exits.is_empty() {
        return Err(Error::Unreachable);
    }
    let mut exit_cost = vec![f64::INFINITY; lat.dist_cache.len()];
    for &(idx, w) in &exits {
        exit_cost[idx] = exit_cost[idx].min(w);
    }
    let mut best = f64::INFINITY;
    let mut dist = vec![f64::INFINITY; lat.dist_cache.len()];
    let mut heap = BinaryHeap::new();
    for (idx, w) in lat.attach(source) {
        if w < dist[idx] {
            dist[idx] = w;
            heap.push(Entry { cost: w, idx });
        }
    }
    let offsets = cfg.connectivity.offsets();
    while let Some(Entry { cost, idx }) = heap.pop() {
        if cost >= best {
            break;
        }
        if cost > dist[idx] {
            continue;
        }
        best = best.min(cost + exit_cost[idx]);
        let (i, j) = lat.coords(idx);
        let p = lat.point(i, j);
        for &(di, dj) in offsets {
            let Some(nidx) = lat.index(i + di, j + dj) else {
                continue;
            };
            if !(lat.node_distance(nidx) > 0.0) {
                continue;
            }
            let q = lat.point(i + di, j + dj);
            let Some(w) = lat.segment_weight(p, q, 1) else {
                continue;
            };
            let next = cost + w;
            if next < dist[nidx] {
                dist[nidx] = next;
                heap.push(Entry {
                    cost: next,
                    idx: nidx,
                });
            }
        }
    }
    if best.is_finite() {
        Ok(best)
    } else {
        Err(Error::Unreachable)
    }
}

fn check_interior(spec: &CombSpec, cfg: &GridConfig, z: Point) -> Result<()> {
    if z.abs() > cfg.clip_radius {
        return Err(Error::Config(format!(
            "point {z:?} lies outside the clip radius"
        )));
    }
    match spec.locate(z, false) {
        Location::Interior(_) => Ok(()),
        Location::Exterior => Err(Error::StartOutsideDomain),
        Location::BeyondTruncation => Err(Error::OutsideTruncation {
            last_x: *spec.coords().last().unwrap(),
        }),
    }
}

/// Shortest lattice path from `source` to `target`.
pub fn grid_delta(
    spec: &CombSpec,
    cfg: &GridConfig,
    source: Point,
    target: GridTarget,
) -> Result<QhDistanceResult> {
    cfg.validate()?;
    check_interior(spec, cfg, source)?;
    let result = |value: f64, target, attained_at| QhDistanceResult {
        value,
        method: QhMethod::GridPath,
        config: Some(*cfg),
        target,
        discretization_error: value * cfg.connectivity.anisotropy(),
        attained_at,
    };
    match target {
        GridTarget::Point(t) => {
            check_interior(spec, cfg, t)?;
            if t == source {
                return Ok(result(0.0, QhTarget::PointToPoint, None));
            }
            let mut lat = Lattice::new(spec, cfg)?;
            let v = point_search(&mut lat, cfg, source, t)?;
            Ok(result(v, QhTarget::PointToPoint, None))
        }
        GridTarget::Circle(r) => {
            if !(r > 0.0 && r < cfg.clip_radius) {
                return Err(Error::Config(format!(
                    "radius {r} must lie in (0, clip_radius)"
                )));
            }
            let mut lat = Lattice::new(spec, cfg)?;
            let (v, at) = circle_search(&mut lat, cfg, source, &[r])?[0];
            Ok(result(
                v,
                QhTarget::PointToCircleSet { radius: r },
                Some(at),
            ))
        }
    }
}

/// `δ_C(0, F_r) / ln r` over several radii, with the factor-2 sandwich for `h(C)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HardyEstimate {
    pub radii: Vec<f64>,
    pub delta: Vec<f64>,
    pub delta_over_logr: Vec<f64>,
    /// Node at which each `δ_C(0, F_r)` was attained.
    pub attained_at: Vec<Point>,
    /// Tail minimum of `δ / ln r` over the upper half of the radii.
    pub tail_min: f64,
    pub sandwich_low: f64,
    pub sandwich_high: f64,
    pub config: GridConfig,
}

/// One Dijkstra run from the origin serves every radius. Diagnostic only: a finite
/// set of radii says nothing certain about a `liminf`.
pub fn hardy_estimate(spec: &CombSpec, cfg: &GridConfig, radii: &[f64]) -> Result<HardyEstimate> {
    cfg.validate()?;
    if radii.is_empty() {
        return Err(Error::Config("at least one radius is required".into()));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("radii must be strictly increasing".into()));
    }
    let x_last = *spec.coords().last().unwrap();
    let r_max = *radii.last().unwrap();
    if !(radii[0] > 1.0) || r_max >= cfg.clip_radius || r_max >= x_last {
        return Err(Error::Config(format!(
            "radii must lie in (1, min(clip_radius, x_N)) = (1, {})",
            cfg.clip_radius.min(x_last)
        )));
    }
    let mut lat = Lattice::new(spec, cfg)?;
    let hits = circle_search(&mut lat, cfg, Point::ORIGIN, radii)?;
    let delta: Vec<f64> = hits.iter().map(|h| h.0).collect();
    let delta_over_logr: Vec<f64> = delta.iter().zip(radii).map(|(d, r)| d / r.ln()).collect();
    let window = TailWindow::upper_half(radii.len());
    let tail_min = window
        .slice(&delta_over_logr)
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    Ok(HardyEstimate {
        radii: radii.to_vec(),
        delta,
        delta_over_logr,
        attained_at: hits.iter().map(|h| h.1).collect(),
        tail_min,
        sandwich_low: tail_min / 2.0,
        sandwich_high: 2.0 * tail_min,
        config: *cfg,
    })
}
