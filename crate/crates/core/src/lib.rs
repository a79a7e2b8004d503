//! Hardy-number criteria, bounds and numerical cross-checks for comb domains.
//!
//! The crate is organised bottom-up:
//!
//! - [`comb`]: the comb domain, its gap families, membership and boundary distance;
//! - [`bounds`]: the ratio criterion, upper/lower bound series, closed-form axis
//!   quasi-hyperbolic distance and tail diagnostics;
//! - [`classify`]: rule-based verdicts on whether `h(C) = ∞`;
//! - [`qh`]: a grid shortest-path estimator of the quasi-hyperbolic distance;
//! - [`brownian`]: a Monte Carlo sampler of planar Brownian exit times;
//! - [`spec_file`]: the JSON comb description format.
//!
//! Everything is a deterministic function of immutable inputs.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod brownian;
pub mod classify;
pub mod comb;
pub mod error;
pub mod logspace;
pub mod qh;
pub mod spec_file;

pub use comb::{CombSpec, CustomFamily, GapFamily, LogEnvelope, OscillatingParams, Point};
pub use error::{Error, Result};
