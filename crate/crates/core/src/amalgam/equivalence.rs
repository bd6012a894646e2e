//! Continuous, discrete and step-function forms of the grand amalgam norm,
//! side by side, with per-instance bounds on their ratios.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::GrandExponent;
use crate::grand::grand_norm;
use crate::grid::EpsilonGrid;

use super::bupu::{max_cover, validate_bupu, Bupu, BupuValidation};
use super::discrete::{local_norms, root_bounds, sequence_norm, step_function, ScaleBounds};
use super::window::{amalgam_norm, translate_window, Window};

/// Relative slack applied when checking a ratio against its bounds.
pub const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EquivalenceOptions {
    /// Accept partitions whose last block is short.
    pub allow_ragged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceNorms {
    pub continuous: f64,
    pub discrete: f64,
    pub step: f64,
}

/// `None` when the denominator vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceRatios {
    pub continuous_over_discrete: Option<f64>,
    pub step_over_discrete: Option<f64>,
    pub continuous_over_step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceBounds {
    /// `step / discrete` lies in `[m_low, m_high]`.
    pub m_low: f64,
    pub m_high: f64,
    pub continuous_over_discrete: ScaleBounds,
    pub continuous_over_step: ScaleBounds,
}

/// Counts and masses the bounds are built from. `B_i = U + y_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceGeometry {
    /// `max_x #{i : B_i meets Q + x}`.
    pub k: usize,
    /// Largest mass of `{x : B_i meets Q + x}`.
    pub s_max: f64,
    /// `max_x #{i : B_i inside Q + x}`.
    pub l: usize,
    /// Smallest mass of `{x : B_i inside Q + x}`.
    pub t_min: f64,
    /// False when some `B_i` fits in no translate of `Q`; the lower bound is
    /// then reported as 0.
    pub lower_available: bool,
    /// `max_x #{i : x in B_i}`.
    pub support_overlap: usize,
    pub support_mass_min: f64,
    pub support_mass_max: f64,
    /// `mu(Q + x) == mu(Q)` for every `x`, compared exactly.
    pub translate_mass_invariant: bool,
    /// Largest value taken by any `psi_i`.
    pub psi_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub norms: EquivalenceNorms,
    pub ratios: EquivalenceRatios,
    pub bounds: EquivalenceBounds,
    pub geometry: EquivalenceGeometry,
    pub within_bounds: bool,
    pub bupu_validation: BupuValidation,
}

/// Smallest and largest of `g(r)` at the two ends of the order span the
/// grid can visit. Every `g` used here is monotone in `r`.
fn order_extremes(exp: &GrandExponent, grid: &EpsilonGrid, g: impl Fn(f64) -> f64) -> (f64, f64) {
    let (lo_eps, hi_eps) = grid.eps_span();
    let a = g(exp.p() - hi_eps);
    let b = g(exp.p() - lo_eps);
    (a.min(b), a.max(b))
}

fn geometry(q: &Window, psi: &Bupu, validation: &BupuValidation) -> EquivalenceGeometry {
    let space = q.space();
    let n = space.len();
    let supports = psi.supports();
    let translates: Vec<Window> = space
        .points()
        .iter()
        .map(|&x| translate_window(q, x))
        .collect();

    let mut meet = vec![0usize; n];
    let mut inside = vec![0usize; n];
    let mut s_max = 0.0_f64;
    let mut t_min = f64::INFINITY;
    let mut lower_available = true;
    for b in &supports {
        let mut s_mass = 0.0;
        let mut t_mass = 0.0;
        for (x, t) in translates.iter().enumerate() {
            let w = space.weights()[x];
            if b.intersects(t) {
                meet[x] += 1;
                s_mass += w;
            }
            if b.is_subset_of(t) {
                inside[x] += 1;
                t_mass += w;
            }
        }
        s_max = s_max.max(s_mass);
        if t_mass > 0.0 {
            t_min = t_min.min(t_mass);
        } else {
            lower_available = false;
        }
    }

    let (mass_min, mass_max) = supports
        .iter()
        .map(Window::mass)
        .fold((f64::INFINITY, 0.0_f64), |(lo, hi), m| {
            (lo.min(m), hi.max(m))
        });

    EquivalenceGeometry {
        k: meet.into_iter().max().unwrap_or(0),
        s_max,
        l: inside.into_iter().max().unwrap_or(0),
        t_min: if lower_available { t_min } else { 0.0 },
        lower_available,
        support_overlap: max_cover(&supports, n),
        support_mass_min: mass_min,
        support_mass_max: mass_max,
        translate_mass_invariant: translates.iter().all(|t| t.mass() == q.mass()),
        psi_sup: validation.bounded.measured_sup,
    }
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

fn check(r: Option<f64>, b: &ScaleBounds) -> bool {
    r.map_or(true, |r| b.contains(r, BOUND_SLACK))
}

/// Computes the control-function amalgam norm with window `Q`, the discrete
/// norm `||{ ||f psi_i|| }_i||` and the step-function norm
/// `||sum_i ||f psi_i|| chi_{U+y_i}||_{q),theta}`, and bounds their ratios.
///
/// Writing `a_i = ||f psi_i||_{p),theta}` and `r` for an order the outer
/// supremum visits:
///
/// * `F(x) <= sum_{i : B_i meets Q+x} a_i / (1 - delta)`, where `delta` is
///   the partition's deviation from 1, so `||F||_r <= K^(1-1/r) S_max^(1/r)
///   ||a||_r / (1 - delta)`;
/// * `a_i <= psi_sup F(x)` whenever `B_i` lies inside `Q + x`, so averaging
///   over those `x` gives `||a||_r <= psi_sup (L / T_min)^(1/r) ||F||_r`;
/// * the step function obeys the bounds of [`root_bounds`].
#[allow(clippy::too_many_arguments)]
pub fn equivalence_report(
    f: &crate::measure::SampledFunction,
    q: &Window,
    psi: &Bupu,
    local: &GrandExponent,
    global: &GrandExponent,
    grid_p: &EpsilonGrid,
    grid_q: &EpsilonGrid,
    options: EquivalenceOptions,
) -> Result<EquivalenceReport> {
    if psi.is_ragged() && !options.allow_ragged {
        return Err(Error::RaggedBupu);
    }
    let validation = validate_bupu(psi);
    if !validation.all_pass() {
        return Err(Error::InvalidBupu(validation.failures().join(", ")));
    }
    let geo = geometry(q, psi, &validation);

    let continuous = amalgam_norm(f, q, local, global, grid_p, grid_q)?;
    let a = local_norms(f, psi, local, grid_p)?;
    let step = grand_norm(
        &step_function(&a, psi.window(), psi.centers())?,
        global,
        grid_q,
    )?;
    let discrete = sequence_norm(a, global, grid_q)?;

    let delta = validation.partition.max_deviation;
    let (_, upper) = order_extremes(global, grid_q, |r| {
        (geo.k as f64).powf(1.0 - 1.0 / r) * geo.s_max.powf(1.0 / r)
    });
    let c_over_d = ScaleBounds {
        low: if geo.lower_available {
            let dens = geo.l as f64 / geo.t_min;
            let (_, worst) = order_extremes(global, grid_q, |r| dens.powf(1.0 / r));
            1.0 / (geo.psi_sup * worst)
        } else {
            0.0
        },
        high: upper / (1.0 - delta),
    };
    let m = root_bounds(
        geo.support_mass_min,
        geo.support_mass_max,
        geo.support_overlap,
        global,
        grid_q,
    );
    let c_over_s = ScaleBounds {
        low: c_over_d.low / m.high,
        high: c_over_d.high / m.low,
    };

    let ratios = EquivalenceRatios {
        continuous_over_discrete: ratio(continuous, discrete),
        step_over_discrete: ratio(step, discrete),
        continuous_over_step: ratio(continuous, step),
    };
    let within_bounds = check(ratios.continuous_over_discrete, &c_over_d)
        && check(ratios.step_over_discrete, &m)
        && check(ratios.continuous_over_step, &c_over_s);

    Ok(EquivalenceReport {
        norms: EquivalenceNorms {
            continuous,
            discrete,
            step,
        },
        ratios,
        bounds: EquivalenceBounds {
            m_low: m.low,
            m_high: m.high,
            continuous_over_discrete: c_over_d,
            continuous_over_step: c_over_s,
        },
        geometry: geo,
        within_bounds,
        bupu_validation: validation,
    })
}
