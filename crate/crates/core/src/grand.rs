//! Grand Lebesgue norms, grand sequence norms, epsilon profiles, the
//! vanishing-limit closure criterion and the embedding constants relating the
//! grand norm to ordinary `L^r` norms.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::GrandExponent;
use crate::grid::{maximize, EpsilonGrid, Supremum};
use crate::lp::weighted_lp;
use crate::measure::{MeasureSpace, SampledFunction};

/// Points in the zero-ward tail used by [`closure_criterion`].
pub const ZERO_TAIL_POINTS: usize = 8;
/// The tail reaches `min_eps * ZERO_TAIL_DEPTH`.
pub const ZERO_TAIL_DEPTH: f64 = 1e-12;
/// Default threshold for the closure criterion.
pub const DEFAULT_CLOSURE_TOLERANCE: f64 = 1e-6;

/// Supremum of `eps^(theta/(p-eps)) ||v||_{p-eps}` for raw weights and values.
pub(crate) fn grand_sup(
    weights: &[f64],
    values: &[f64],
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<Supremum> {
    grid.check_for(exp)?;
    let p = exp.p();
    let limit = grid.include_zero_limit().then(|| {
        if exp.theta() == 0.0 {
            weighted_lp(weights, values, p)
        } else {
            0.0
        }
    });
    Ok(maximize(grid, limit, |eps| {
        exp.factor(eps) * weighted_lp(weights, values, p - eps)
    }))
}

/// `sup_{0 < eps <= p-1} eps^(theta/(p-eps)) ||f||_{p-eps}`.
///
/// With `theta = 0` on a probability space this is `||f||_p`; with
/// `theta = 1` it is the Iwaniec-Sbordone grand norm.
pub fn grand_norm(f: &SampledFunction, exp: &GrandExponent, grid: &EpsilonGrid) -> Result<f64> {
    Ok(grand_sup(f.space().weights(), f.values(), exp, grid)?.value)
}

/// Grand norm of a sequence indexed by a counting-measure space.
pub fn grand_sequence_norm(
    u: &SampledFunction,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<f64> {
    require_counting(u.space())?;
    grand_norm(u, exp, grid)
}

pub(crate) fn require_counting(space: &MeasureSpace) -> Result<()> {
    if let Some(i) = space.weights().iter().position(|&w| w != 1.0) {
        return Err(Error::NotCountingMeasure {
            point: space.points()[i],
            weight: space.weights()[i],
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileEntry {
    pub eps: f64,
    pub value: f64,
}

/// The map `eps -> eps^(theta/(p-eps)) ||f||_{p-eps}` sampled on a grid and
/// its refinement. An entry with `eps = 0` holds the `eps -> 0` limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonProfile {
    pub entries: Vec<ProfileEntry>,
    pub argmax_eps: f64,
    pub sup_value: f64,
}

impl EpsilonProfile {
    /// `eps,value` rows with a header, LF line endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,value\n");
        for e in &self.entries {
            writeln!(out, "{:e},{:e}", e.eps, e.value).expect("writing to a String");
        }
        out
    }

    pub fn value_at(&self, eps: f64) -> Option<f64> {
        self.entries.iter().find(|e| e.eps == eps).map(|e| e.value)
    }
}

pub fn epsilon_profile(
    f: &SampledFunction,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<EpsilonProfile> {
    let sup = grand_sup(f.space().weights(), f.values(), exp, grid)?;
    Ok(EpsilonProfile {
        entries: sup
            .evaluations
            .iter()
            .map(|&(eps, value)| ProfileEntry { eps, value })
            .collect(),
        argmax_eps: sup.argmax,
        sup_value: sup.value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ClosureOutcome {
    /// With `theta = 0` the limit is `||f||_p`, so the criterion says nothing.
    Inapplicable,
    Evaluated(ClosureEstimate),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureEstimate {
    /// Whether the limit estimate is below the tolerance.
    pub holds: bool,
    /// Profile value at the smallest evaluated epsilon.
    pub limit_estimate: f64,
    pub tolerance: f64,
    /// Zero-ward tail `(eps, value)`, ascending in `eps`, ending at `min_eps`.
    pub tail: Vec<(f64, f64)>,
}

impl ClosureEstimate {
    /// True when the profile does not increase along the `k` smallest tail
    /// points as `eps` moves toward zero.
    pub fn decreasing_toward_zero(&self, k: usize) -> bool {
        let k = k.min(self.tail.len());
        self.tail[..k].windows(2).all(|w| w[0].1 <= w[1].1)
    }
}

/// Estimates `lim_{eps -> 0} eps^(theta/(p-eps)) ||f||_{p-eps}` by extending
/// the grid geometrically below `min_eps` and reading the smallest point.
pub fn closure_criterion(
    f: &SampledFunction,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
    tol: f64,
) -> Result<ClosureOutcome> {
    grid.check_for(exp)?;
    if exp.theta() == 0.0 {
        return Ok(ClosureOutcome::Inapplicable);
    }
    let (weights, values, p) = (f.space().weights(), f.values(), exp.p());
    let top = grid.min_eps();
    let bottom = top * ZERO_TAIL_DEPTH;
    let last = (ZERO_TAIL_POINTS - 1) as f64;
    let tail: Vec<(f64, f64)> = (0..ZERO_TAIL_POINTS)
        .map(|k| {
            let eps = if k == ZERO_TAIL_POINTS - 1 {
                top
            } else {
                bottom * (top / bottom).powf(k as f64 / last)
            };
            (eps, exp.factor(eps) * weighted_lp(weights, values, p - eps))
        })
        .collect();
    let limit_estimate = tail[0].1;
    Ok(ClosureOutcome::Evaluated(ClosureEstimate {
        holds: limit_estimate < tol,
        limit_estimate,
        tolerance: tol,
        tail,
    }))
}

/// Constants of the embeddings `L^p -> L^{p),theta} -> L^{p-eps}` on one space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmbeddingConstants {
    /// `||f||_{p),theta} <= upper * ||f||_p`.
    pub upper: f64,
    /// `||f||_{p-eps} <= lower * ||f||_{p),theta}`.
    pub lower: f64,
}

/// `upper` is the supremum of `eps^(theta/(p-eps)) mu(space)^(1/(p-eps) - 1/p)`
/// (Hölder on a finite measure), taken over the same grid the grand norm uses;
/// `lower` is the reciprocal weight at `eps`.
pub fn embedding_constants(
    exp: &GrandExponent,
    eps: f64,
    space: &MeasureSpace,
    grid: &EpsilonGrid,
) -> Result<EmbeddingConstants> {
    exp.check_eps(eps)?;
    grid.check_for(exp)?;
    let mass = space.total_mass();
    let p = exp.p();
    let limit = grid
        .include_zero_limit()
        .then_some(if exp.theta() == 0.0 { 1.0 } else { 0.0 });
    let upper = maximize(grid, limit, |e| {
        exp.factor(e) * mass.powf(1.0 / (p - e) - 1.0 / p)
    })
    .value;
    Ok(EmbeddingConstants {
        upper,
        lower: 1.0 / exp.factor(eps),
    })
}
