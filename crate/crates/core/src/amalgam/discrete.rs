//! The discrete space attached to a well-spread family and the discrete
//! (partition-of-unity) form of the grand amalgam norm.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::GrandExponent;
use crate::grand::{grand_norm, grand_sequence_norm, require_counting};
use crate::grid::EpsilonGrid;
use crate::measure::{MeasureSpace, SampledFunction};

use super::bupu::{validate_bupu, Bupu};
use super::window::{canonical_norm, translate_window, Window};

/// Two-sided multiplicative bounds `low <= ratio <= high`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleBounds {
    pub low: f64,
    pub high: f64,
}

impl ScaleBounds {
    pub fn contains(&self, ratio: f64, slack: f64) -> bool {
        ratio >= self.low * (1.0 - slack) && ratio <= self.high * (1.0 + slack)
    }
}

/// Bounds on `||sum_i a_i chi_{B_i}||_r / ||a||_{l^r}` valid for every order
/// `r = p - eps` a supremum over `grid` can visit, when every `B_i` has mass
/// in `[low_mass, high_mass]` and at most `overlap` of them meet at a point.
///
/// `r -> c^(1/r)` is monotone, so the extremes sit at the ends of the span.
pub(crate) fn root_bounds(
    low_mass: f64,
    high_mass: f64,
    overlap: usize,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> ScaleBounds {
    let (lo_eps, hi_eps) = grid.eps_span();
    let orders = [exp.p() - hi_eps, exp.p() - lo_eps];
    let k = overlap.max(1) as f64;
    let low = orders
        .iter()
        .map(|r| low_mass.powf(1.0 / r))
        .fold(f64::INFINITY, f64::min);
    let high = orders
        .iter()
        .map(|r| k.powf(1.0 - 1.0 / r) * high_mass.powf(1.0 / r))
        .fold(0.0, f64::max);
    ScaleBounds { low, high }
}

/// `sum_i |lambda_i| chi_{x_i + U}` on the window's space. Overlapping
/// translates add up.
pub fn step_function(lambda: &[f64], u: &Window, x: &[i64]) -> Result<SampledFunction> {
    if lambda.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: lambda.len(),
        });
    }
    let space = u.space();
    let mut values = vec![0.0; space.len()];
    for (&l, &xi) in lambda.iter().zip(x) {
        for &i in translate_window(u, xi).members() {
            values[i] += l.abs();
        }
    }
    SampledFunction::new(space.clone(), values)
}

/// Translates `x_i + U`, checked to be nonempty and pairwise disjoint.
fn disjoint_translates(u: &Window, x: &[i64]) -> Result<Vec<Window>> {
    let translates: Vec<Window> = x.iter().map(|&xi| translate_window(u, xi)).collect();
    let mut owner = vec![usize::MAX; u.space().len()];
    for (i, t) in translates.iter().enumerate() {
        if t.is_empty() {
            return Err(Error::EmptyTranslate(i));
        }
        for &m in t.members() {
            if owner[m] != usize::MAX {
                return Err(Error::OverlappingTranslates {
                    first: owner[m],
                    second: i,
                });
            }
            owner[m] = i;
        }
    }
    Ok(translates)
}

/// `||sum_i |lambda_i| chi_{x_i+U}||_{p),theta}` for a separated family.
///
/// Disjointness turns each `L^r` integral into `sum_i |lambda_i|^r mu(x_i+U)`,
/// so this is the grand norm of `lambda` on the index set weighted by the
/// translate masses. With unit masses that is the counting measure, and the
/// result is bit-identical to [`grand_sequence_norm`].
pub fn discrete_space_norm(
    lambda: &SampledFunction,
    u: &Window,
    x: &[i64],
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<f64> {
    require_counting(lambda.space())?;
    if lambda.len() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            found: lambda.len(),
        });
    }
    let masses: Vec<f64> = disjoint_translates(u, x)?
        .iter()
        .map(Window::mass)
        .collect();
    let weighted = lambda.rehome(Arc::new(lambda.space().reweighted(masses)?))?;
    grand_norm(&weighted, exp, grid)
}

/// `m_low <= discrete_space_norm / ||lambda||_{l^{p),theta}} <= m_high`, with
/// `m = mu(U)^(1/(p-eps))` at its extremes over the grid's epsilon span.
pub fn discrete_space_bounds(u: &Window, exp: &GrandExponent, grid: &EpsilonGrid) -> ScaleBounds {
    root_bounds(u.mass(), u.mass(), 1, exp, grid)
}

/// `i -> ||f psi_i||_{p),theta}`.
pub fn local_norms(
    f: &SampledFunction,
    psi: &Bupu,
    local: &GrandExponent,
    grid_p: &EpsilonGrid,
) -> Result<Vec<f64>> {
    grid_p.check_for(local)?;
    psi.functions()
        .iter()
        .map(|phi| {
            let product = f.mul(phi)?;
            let atoms = product
                .values()
                .iter()
                .zip(phi.values())
                .zip(f.space().weights())
                .filter(|((_, &ph), _)| ph != 0.0)
                .map(|((&v, _), &w)| (v, w))
                .collect();
            canonical_norm(atoms, local, grid_p)
        })
        .collect()
}

/// `||{ ||f psi_i||_{p),theta} }_i||_{l^{q),theta}}` for a valid partition.
pub fn discrete_amalgam_norm(
    f: &SampledFunction,
    psi: &Bupu,
    local: &GrandExponent,
    global: &GrandExponent,
    grid_p: &EpsilonGrid,
    grid_q: &EpsilonGrid,
) -> Result<f64> {
    let validation = validate_bupu(psi);
    if !validation.all_pass() {
        return Err(Error::InvalidBupu(validation.failures().join(", ")));
    }
    let a = local_norms(f, psi, local, grid_p)?;
    sequence_norm(a, global, grid_q)
}

pub(crate) fn sequence_norm(
    a: Vec<f64>,
    global: &GrandExponent,
    grid_q: &EpsilonGrid,
) -> Result<f64> {
    let index = Arc::new(MeasureSpace::counting(a.len())?);
    grand_sequence_norm(&SampledFunction::new(index, a)?, global, grid_q)
}
