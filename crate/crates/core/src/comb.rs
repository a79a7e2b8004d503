//! The canonical one-sided comb domain
//!
//! ```text
//! C = { Re z > -x_1 } \ ⋃_{n ≥ 0} { x_n + iy : |y| ≥ 1 },   x_0 = 0,
//! ```
//!
//! where the gaps `α_n = x_n - x_{n-1}` satisfy `inf α_n > 1`. Two-sided combs and
//! combs with other tooth half-lengths reduce to this form (a sandwich between two
//! combs with constant half-length, an affine rescaling, and a split at `x_0`), so
//! it is the only form modelled here.
//!
//! A [`CombSpec`] is always a finite prefix of `N` teeth beyond `x_0`. Gap logs are
//! kept for every tooth; coordinates as floats only while `x_n` stays below a cap,
//! since e.g. `α_n = e^{e^n}` leaves `f64` range at `n = 7`.

use crate::error::{Error, Result};
use crate::logspace::log_add_exp;
use serde::{Deserialize, Serialize};

/// Coordinates are only materialized as floats while `x_n` stays below this.
pub const DEFAULT_FLOAT_CAP: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub re: f64,
    pub im: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { re: 0.0, im: 0.0 };

    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn abs(self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.re - other.re).hypot(self.im - other.im)
    }

    pub fn midpoint(self, other: Point) -> Point {
        Point::new(0.5 * (self.re + other.re), 0.5 * (self.im + other.im))
    }
}

/// An exponent envelope `b_n` (so that `α_n ≤ e^{b_n}`), indexed from 1.
#[derive(Debug, Clone, PartialEq)]
pub enum LogEnvelope {
    /// `b_n = b1 + (n - 1) r`.
    Linear { r: f64, b1: f64 },
    /// `b_n = n^p`.
    Power { p: f64 },
    /// `b_n = e^{n^k}`.
    ExpPower { k: f64 },
    /// `b_n = e^{m / ln m}` with `m = n + 2`; the shift keeps `m > e`, where
    /// `m / ln m` is increasing.
    ExpNOverLogN,
    /// Explicit values `b_1, b_2, ...`.
    Custom(Vec<f64>),
}

impl LogEnvelope {
    pub fn value(&self, n: usize) -> Option<f64> {
        if n == 0 {
            return None;
        }
        let nf = n as f64;
        match self {
            LogEnvelope::Linear { r, b1 } => Some(b1 + (nf - 1.0) * r),
            LogEnvelope::Power { p } => Some(nf.powf(*p)),
            LogEnvelope::ExpPower { k } => Some(nf.powf(*k).exp()),
            LogEnvelope::ExpNOverLogN => {
                let m = nf + 2.0;
                Some((m / m.ln()).exp())
            }
            LogEnvelope::Custom(v) => v.get(n - 1).copied(),
        }
    }

    /// `b_n - b_{n-1}` for `n ≥ 2`.
    pub fn increment(&self, n: usize) -> Option<f64> {
        if n < 2 {
            return None;
        }
        if let LogEnvelope::Linear { r, .. } = self {
            return Some(*r);
        }
        Some(self.value(n)? - self.value(n - 1)?)
    }

    /// `inf_{2 ≤ n ≤ n_max} (b_n - b_{n-1})`; exact `r` for the linear family.
    pub fn min_increment(&self, n_max: usize) -> Option<f64> {
        if let LogEnvelope::Linear { r, .. } = self {
            return Some(*r);
        }
        (2..=n_max)
            .map(|n| self.increment(n))
            .try_fold(f64::INFINITY, |acc, d| d.map(|d| acc.min(d)))
    }

    /// True when `b_n = n` identically.
    pub fn is_identity(&self) -> bool {
        match self {
            LogEnvelope::Linear { r, b1 } => *r == 1.0 && *b1 == 1.0,
            LogEnvelope::Power { p } => *p == 1.0,
            _ => false,
        }
    }

    fn validate(&self, n_max: usize) -> Result<()> {
        for n in 1..=n_max {
            let b = self
                .value(n)
                .ok_or_else(|| Error::InvalidFamilyParam(format!("envelope has no value b_{n}")))?;
            if !(b > 0.0) || !b.is_finite() {
                return Err(Error::InvalidFamilyParam(format!(
                    "b_{n} = {b} must be positive"
                )));
            }
        }
        if n_max >= 2 {
            let r = self.min_increment(n_max).unwrap_or(0.0);
            if !(r > 0.0) {
                return Err(Error::InvalidFamilyParam(format!(
                    "envelope increments must be bounded below by r > 0 (got {r})"
                )));
            }
        } else if let LogEnvelope::Linear { r, .. } = self {
            if !(*r > 0.0) {
                return Err(Error::InvalidFamilyParam(format!(
                    "r = {r} must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the sparse-spike comb: `α_n = c` off a subsequence `k_m` and
/// `α_{k_m} = e^{b_{k_m}}` on it, with `b_{k_m} ≥ Σ_{i<m} b_{k_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillatingParams {
    pub c: f64,
    pub envelope: LogEnvelope,
}

impl OscillatingParams {
    pub fn new(c: f64, envelope: LogEnvelope) -> Self {
        Self { c, envelope }
    }

    /// Spike indices chosen greedily: `k_1 = 1`, then each `k_m` is the smallest
    /// index past `k_{m-1}` with `b_{k_m} ≥ Σ_{i<m} b_{k_i}`.
    pub fn spike_indices(&self, n_max: usize) -> Vec<usize> {
        let mut ks = Vec::new();
        if n_max == 0 {
            return ks;
        }
        ks.push(1);
        let mut sum = self.envelope.value(1).unwrap_or(f64::NAN);
        let mut n = 2;
        while n <= n_max {
            match self.envelope.value(n) {
                Some(b) if b >= sum => {
                    ks.push(n);
                    sum += b;
                }
                Some(_) => {}
                None => break,
            }
            n += 1;
        }
        ks
    }

    /// `r = inf (b_n - b_{n-1})` over the first `n_max` indices.
    pub fn r(&self, n_max: usize) -> f64 {
        self.envelope
            .min_increment(n_max.max(2))
            .unwrap_or(f64::NAN)
    }

    pub(crate) fn validate(&self, n_max: usize) -> Result<()> {
        if !(self.c > 1.0) || !self.c.is_finite() {
            return Err(Error::InvalidFamilyParam(format!(
                "c = {} must exceed 1",
                self.c
            )));
        }
        self.envelope.validate(n_max)?;
        let log_c = self.c.ln();
        for n in 1..=n_max {
            let b = self.envelope.value(n).unwrap_or(f64::NAN);
            if log_c > b {
                return Err(Error::InvalidFamilyParam(format!(
                    "c = {} exceeds e^b_{n} = e^{b}, so alpha_n <= e^b_n fails",
                    self.c
                )));
            }
        }
        Ok(())
    }
}

/// Named gap formulas that do not warrant their own top-level family.
#[derive(Debug, Clone, PartialEq)]
pub enum CustomFamily {
    /// `α_n = 2` for odd `n`, `α_n = n^p` for even `n`.
    AlternatingPower { p: f64 },
    /// `α_n = e^{e^{n^k}}`, `0 < k < 1`.
    ExpExpPower { k: f64 },
    /// `α_n = e^{e^{m / ln m}}`, `m = n + 2`.
    ExpExpNOverLogN,
}

impl CustomFamily {
    pub fn id(&self) -> &'static str {
        match self {
            CustomFamily::AlternatingPower { .. } => "alternating_power",
            CustomFamily::ExpExpPower { .. } => "exp_exp_power",
            CustomFamily::ExpExpNOverLogN => "exp_exp_n_over_log_n",
        }
    }
}

/// The declarative description of a gap sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum GapFamily {
    /// Tooth positions `x_1, x_2, ...` (`x_0 = 0` is implicit).
    Explicit(Vec<f64>),
    /// `α_n = alpha`.
    Constant {
        alpha: f64,
    },
    /// `α_n = (n + 1)^p`; the shift keeps every gap above 1.
    Polynomial {
        p: f64,
    },
    /// `α_n = e^{cn}`.
    Exponential {
        c: f64,
    },
    /// `α_n = e^{n^p}`.
    SubexpExp {
        p: f64,
    },
    /// `α_n = e^{e^n}`.
    DoubleExp,
    Oscillating(OscillatingParams),
    Custom(CustomFamily),
}

impl GapFamily {
    /// Explicit family from a list of gaps.
    pub fn from_gaps(gaps: &[f64]) -> Self {
        let mut x = 0.0;
        GapFamily::Explicit(
            gaps.iter()
                .map(|g| {
                    x += g;
                    x
                })
                .collect(),
        )
    }

    pub fn name(&self) -> &'static str {
        match self {
            GapFamily::Explicit(_) => "explicit",
            GapFamily::Constant { .. } => "constant",
            GapFamily::Polynomial { .. } => "polynomial",
            GapFamily::Exponential { .. } => "exponential",
            GapFamily::SubexpExp { .. } => "subexp_exp",
            GapFamily::DoubleExp => "double_exp",
            GapFamily::Oscillating(_) => "oscillating",
            GapFamily::Custom(c) => c.id(),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidFamilyParam(msg));
        match self {
            GapFamily::Explicit(x) if x.len() < n => bad(format!(
                "explicit family has {} teeth, truncation asks for {n}",
                x.len()
            )),
            GapFamily::Constant { alpha } if !(*alpha > 1.0) || !alpha.is_finite() => {
                bad(format!("constant gap {alpha} must exceed 1"))
            }
            GapFamily::Polynomial { p } | GapFamily::SubexpExp { p }
                if !(*p > 0.0) || !p.is_finite() =>
            {
                bad(format!("exponent p = {p} must be positive"))
            }
            GapFamily::Exponential { c } if !(*c > 0.0) || !c.is_finite() => {
                bad(format!("rate c = {c} must be positive"))
            }
            GapFamily::Oscillating(params) => params.validate(n),
            GapFamily::Custom(CustomFamily::AlternatingPower { p })
                if !(*p > 0.0) || !p.is_finite() =>
            {
                bad(format!("exponent p = {p} must be positive"))
            }
            GapFamily::Custom(CustomFamily::ExpExpPower { k }) if !(*k > 0.0 && *k < 1.0) => {
                bad(format!("exponent k = {k} must lie in (0, 1)"))
            }
            _ => Ok(()),
        }
    }

    /// `(ln α_n, α_n)` for `n ≥ 1`; the float may be `inf`.
    fn gap(&self, n: usize, spikes: &[usize]) -> (f64, f64) {
        let nf = n as f64;
        let from_log = |l: f64| (l, l.exp());
        match self {
            GapFamily::Explicit(x) => {
                let prev = if n >= 2 { x[n - 2] } else { 0.0 };
                let g = x[n - 1] - prev;
                (g.ln(), g)
            }
            GapFamily::Constant { alpha } => (alpha.ln(), *alpha),
            GapFamily::Polynomial { p } => (p * (nf + 1.0).ln(), (nf + 1.0).powf(*p)),
            GapFamily::Exponential { c } => from_log(c * nf),
            GapFamily::SubexpExp { p } => from_log(nf.powf(*p)),
            GapFamily::DoubleExp => from_log(nf.exp()),
            GapFamily::Oscillating(params) => {
                if spikes.binary_search(&n).is_ok() {
                    from_log(params.envelope.value(n).unwrap_or(f64::NAN))
                } else {
                    (params.c.ln(), params.c)
                }
            }
            GapFamily::Custom(CustomFamily::AlternatingPower { p }) => {
                if n % 2 == 1 {
                    (2f64.ln(), 2.0)
                } else {
                    (p * nf.ln(), nf.powf(*p))
                }
            }
            GapFamily::Custom(CustomFamily::ExpExpPower { k }) => from_log(nf.powf(*k).exp()),
            GapFamily::Custom(CustomFamily::ExpExpNOverLogN) => {
                from_log(LogEnvelope::ExpNOverLogN.value(n).unwrap_or(f64::NAN))
            }
        }
    }
}

/// Where a point sits relative to a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// Interior point with its Euclidean distance to the boundary.
    Interior(f64),
    /// On the boundary or outside.
    Exterior,
    /// To the right of the last materialized tooth.
    BeyondTruncation,
}

/// A materialized comb: the family, the truncation depth `N`, and the gap logs.
#[derive(Debug, Clone, PartialEq)]
pub struct CombSpec {
    family: GapFamily,
    truncate_n: usize,
    log_gaps: Vec<f64>,
    gap_floats: Vec<f64>,
    log_x: Vec<f64>,
    x: Vec<f64>,
    spikes: Vec<usize>,
    float_cap: f64,
}

impl CombSpec {
    pub fn materialize(family: GapFamily, truncate_n: usize) -> Result<Self> {
        Self::materialize_with_cap(family, truncate_n, DEFAULT_FLOAT_CAP)
    }

    pub fn materialize_with_cap(
        family: GapFamily,
        truncate_n: usize,
        float_cap: f64,
    ) -> Result<Self> {
        if truncate_n == 0 {
            return Err(Error::InvalidFamilyParam(
                "truncate_n must be at least 1".into(),
            ));
        }
        family.validate(truncate_n)?;
        if let GapFamily::Explicit(xs) = &family {
            if xs.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidFamilyParam(
                    "explicit coordinates must be finite".into(),
                ));
            }
        }
        let spikes = match &family {
            GapFamily::Oscillating(p) => p.spike_indices(truncate_n),
            _ => Vec::new(),
        };

        let mut log_gaps = Vec::with_capacity(truncate_n);
        let mut gap_floats = Vec::with_capacity(truncate_n);
        for n in 1..=truncate_n {
            let (lg, g) = family.gap(n, &spikes);
            if !(lg > 0.0) {
                return Err(Error::InvalidFamilyParam(format!(
                    "gap alpha_{n} = {g} must exceed 1"
                )));
            }
            log_gaps.push(lg);
            gap_floats.push(if g <= float_cap { g } else { f64::INFINITY });
        }

        let mut log_x = Vec::with_capacity(truncate_n + 1);
        let mut x = vec![0.0];
        log_x.push(f64::NEG_INFINITY);
        match &family {
            GapFamily::Explicit(xs) => {
                for &v in &xs[..truncate_n] {
                    log_x.push(v.ln());
                    if v <= float_cap {
                        x.push(v);
                    }
                }
            }
            _ => {
                let mut acc = 0.0;
                let mut overflowed = false;
                for (lg, g) in log_gaps.iter().zip(&gap_floats) {
                    let prev = *log_x.last().unwrap();
                    log_x.push(log_add_exp(prev, *lg));
                    acc += g;
                    if !overflowed && acc <= float_cap {
                        x.push(acc);
                    } else {
                        overflowed = true;
                    }
                }
            }
        }

        Ok(Self {
            family,
            truncate_n,
            log_gaps,
            gap_floats,
            log_x,
            x,
            spikes,
            float_cap,
        })
    }

    pub fn family(&self) -> &GapFamily {
        &self.family
    }

    pub fn truncate_n(&self) -> usize {
        self.truncate_n
    }

    /// `ln α_1, ..., ln α_N`.
    pub fn log_gaps(&self) -> &[f64] {
        &self.log_gaps
    }

    /// Spike indices `k_m` for the oscillating family, empty otherwise.
    pub fn spike_indices(&self) -> &[usize] {
        &self.spikes
    }

    pub fn float_cap(&self) -> f64 {
        self.float_cap
    }

    /// `α_n` as a float, if it is below the cap.
    pub fn gap(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        if n == 0 {
            return Err(Error::IndexOutOfRange {
                index: 0,
                max: self.truncate_n,
            });
        }
        let g = self.gap_floats[n - 1];
        if g.is_finite() {
            Ok(g)
        } else {
            Err(Error::Overflow { index: n })
        }
    }

    /// Float coordinates `x_0 .. x_M` with `M ≤ N` the last index below the cap.
    pub fn coords(&self) -> &[f64] {
        &self.x
    }

    /// Number of teeth past `x_0` that have float coordinates.
    pub fn materialized_teeth(&self) -> usize {
        self.x.len() - 1
    }

    pub fn x_coord(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        self.x.get(n).copied().ok_or(Error::Overflow { index: n })
    }

    /// `ln x_n`, always available; `-inf` for `n = 0`.
    pub fn log_x_coord(&self, n: usize) -> Result<f64> {
        self.check_index(n)?;
        Ok(self.log_x[n])
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.truncate_n {
            Err(Error::IndexOutOfRange {
                index: n,
                max: self.truncate_n,
            })
        } else {
            Ok(())
        }
    }

    fn last_x(&self) -> f64 {
        *self.x.last().unwrap()
    }

    /// Abscissa of the left wall, `-x_1` (`-inf` when `x_1` overflows).
    pub fn wall(&self) -> f64 {
        -self.gap_floats[0]
    }

    /// Like [`contains`](Self::contains) and [`dist_to_boundary`](Self::dist_to_boundary)
    /// together. With `open_tail`, the comb is taken to have no teeth past the last
    /// materialized one instead of reporting [`Location::BeyondTruncation`].
    pub fn locate(&self, z: Point, open_tail: bool) -> Location {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Location::Exterior;
        }
        if !open_tail && z.re > self.last_x() {
            return Location::BeyondTruncation;
        }
        let wall = z.re - self.wall();
        if !(wall > 0.0) {
            return Location::Exterior;
        }
        // Distance to the ray at x_k is increasing in |Re z - x_k|, so only the
        // nearest ray on each side can be the closest one.
        let idx = self.x.partition_point(|&v| v <= z.re);
        let mut d = wall;
        if idx >= 1 {
            d = d.min(ray_distance(z, self.x[idx - 1]));
        }
        if idx < self.x.len() {
            d = d.min(ray_distance(z, self.x[idx]));
        }
        if d > 0.0 {
            Location::Interior(d)
        } else {
            Location::Exterior
        }
    }

    pub fn contains(&self, z: Point) -> Result<bool> {
        match self.locate(z, false) {
            Location::Interior(_) => Ok(true),
            Location::Exterior => Ok(false),
            Location::BeyondTruncation => Err(Error::OutsideTruncation {
                last_x: self.last_x(),
            }),
        }
    }

    /// Euclidean distance `d(z, ∂C)`; 0 for points outside or on the boundary.
    pub fn dist_to_boundary(&self, z: Point) -> Result<f64> {
        match self.locate(z, false) {
            Location::Interior(d) => Ok(d),
            Location::Exterior => Ok(0.0),
            Location::BeyondTruncation => Err(Error::OutsideTruncation {
                last_x: self.last_x(),
            }),
        }
    }

    /// Whether the straight segment `a -> b` meets one of the materialized rays.
    pub fn segment_crosses_ray(&self, a: Point, b: Point) -> bool {
        let (lo, hi) = if a.re <= b.re {
            (a.re, b.re)
        } else {
            (b.re, a.re)
        };
        let start = self.x.partition_point(|&v| v < lo);
        let end = self.x.partition_point(|&v| v <= hi);
        self.x[start..end].iter().any(|&xk| {
            if a.re == b.re {
                let (ylo, yhi) = if a.im <= b.im {
                    (a.im, b.im)
                } else {
                    (b.im, a.im)
                };
                yhi >= 1.0 || ylo <= -1.0
            } else {
                let t = (xk - a.re) / (b.re - a.re);
                let y = a.im + t * (b.im - a.im);
                y.abs() >= 1.0
            }
        })
    }
}

fn ray_distance(z: Point, xk: f64) -> f64 {
    let h = (z.re - xk).abs();
    let ay = z.im.abs();
    if ay >= 1.0 {
        h
    } else {
        h.hypot(1.0 - ay)
    }
}
