//! Classical `L^r` norms on atomic measure spaces.

use crate::error::{Error, Result};
use crate::measure::SampledFunction;

/// Sentinel for the essential-supremum norm.
pub const INFINITE_ORDER: f64 = f64::INFINITY;

/// `(sum_i w_i |f_i|^r)^(1/r)`, or `max |f_i|` for `r = INFINITE_ORDER`.
pub fn lp_norm(f: &SampledFunction, r: f64) -> Result<f64> {
    check_order(r)?;
    Ok(weighted_lp(f.space().weights(), f.values(), r))
}

pub(crate) fn check_order(r: f64) -> Result<()> {
    if r.is_nan() || r < 1.0 {
        return Err(Error::ExponentBelowOne(r));
    }
    Ok(())
}

/// Unchecked kernel shared by every norm in the crate.
///
/// Values are rescaled by their largest magnitude before powering so large
/// or tiny samples neither overflow nor flush to zero. Zero samples add an
/// exact `+0.0`, so restricting a function to its support gives a
/// bit-identical result.
pub(crate) fn weighted_lp(weights: &[f64], values: &[f64], r: f64) -> f64 {
    let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 || r == INFINITE_ORDER {
        return peak;
    }
    let sum: f64 = weights
        .iter()
        .zip(values)
        .map(|(w, v)| w * (v.abs() / peak).powf(r))
        .sum();
    peak * sum.powf(1.0 / r)
}
