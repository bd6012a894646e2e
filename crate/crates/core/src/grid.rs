//! Epsilon grids and the one-dimensional supremum search behind every norm.
//!
//! Each grand norm is `sup` over `eps` in `(0, p - 1]` of a continuous
//! profile. The search evaluates a geometric grid, zooms into the bracket
//! around the best grid point for a few rounds, finishes with golden-section
//! search, and optionally compares against the `eps -> 0` limit. The reported
//! value is the largest profile value actually evaluated, so it never falls
//! below any grid term.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponent::GrandExponent;

pub const DEFAULT_POINTS: usize = 64;
pub const DEFAULT_MIN_EPS_FRACTION: f64 = 1e-6;
pub const DEFAULT_REFINEMENT_ROUNDS: usize = 4;
pub const DEFAULT_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Interior points evaluated per zoom round.
const ZOOM_POINTS: usize = 7;
const GOLDEN_MAX_ITERATIONS: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// A strictly increasing discretisation of `(0, p - 1]` ending exactly at
/// `p - 1`, plus the refinement policy used when taking suprema over it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonGrid {
    eps_values: Vec<f64>,
    include_zero_limit: bool,
    refinement_rounds: usize,
    relative_tolerance: f64,
}

impl EpsilonGrid {
    pub fn from_values(
        eps_values: Vec<f64>,
        include_zero_limit: bool,
        refinement_rounds: usize,
        relative_tolerance: f64,
    ) -> Result<Self> {
        if eps_values.len() < 2 {
            return Err(Error::InvalidGrid("need at least two points".into()));
        }
        if eps_values[0].is_nan() || eps_values[0] <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "smallest value {} is not positive",
                eps_values[0]
            )));
        }
        if eps_values.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        if let Some(w) = eps_values.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid(format!(
                "values not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if !(relative_tolerance.is_finite() && relative_tolerance > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "relative tolerance {relative_tolerance} must be positive"
            )));
        }
        Ok(Self {
            eps_values,
            include_zero_limit,
            refinement_rounds,
            relative_tolerance,
        })
    }

    /// 64 geometric points from `1e-6 (p - 1)` to `p - 1`, four zoom rounds,
    /// relative tolerance `1e-9`, with the `eps -> 0` limit included.
    pub fn default_for(exp: &GrandExponent) -> Self {
        make_epsilon_grid(
            exp,
            DEFAULT_POINTS,
            DEFAULT_MIN_EPS_FRACTION * exp.eps_upper(),
            DEFAULT_REFINEMENT_ROUNDS,
            DEFAULT_RELATIVE_TOLERANCE,
        )
        .expect("default grid parameters are valid")
    }

    pub fn with_zero_limit(mut self, include: bool) -> Self {
        self.include_zero_limit = include;
        self
    }

    pub fn eps_values(&self) -> &[f64] {
        &self.eps_values
    }

    pub fn min_eps(&self) -> f64 {
        self.eps_values[0]
    }

    pub fn upper(&self) -> f64 {
        *self.eps_values.last().expect("grid is nonempty")
    }

    pub fn include_zero_limit(&self) -> bool {
        self.include_zero_limit
    }

    pub fn refinement_rounds(&self) -> usize {
        self.refinement_rounds
    }

    pub fn relative_tolerance(&self) -> f64 {
        self.relative_tolerance
    }

    /// Errors unless the grid ends exactly at `p - 1`.
    pub fn check_for(&self, exp: &GrandExponent) -> Result<()> {
        if self.upper() != exp.eps_upper() {
            return Err(Error::GridMismatch {
                grid_upper: self.upper(),
                expected: exp.eps_upper(),
            });
        }
        Ok(())
    }

    /// Every `eps` a supremum over this grid may evaluate lies in
    /// `[min_eps, p - 1]`, plus `0` when the limit is included.
    pub fn eps_span(&self) -> (f64, f64) {
        let lo = if self.include_zero_limit {
            0.0
        } else {
            self.min_eps()
        };
        (lo, self.upper())
    }
}

/// Geometric grid from `min_eps` to `p - 1` inclusive.
pub fn make_epsilon_grid(
    exp: &GrandExponent,
    points: usize,
    min_eps: f64,
    refinement_rounds: usize,
    tol: f64,
) -> Result<EpsilonGrid> {
    let upper = exp.eps_upper();
    if points < 2 {
        return Err(Error::InvalidGrid("need at least two points".into()));
    }
    if !(min_eps > 0.0 && min_eps < upper) {
        return Err(Error::EpsilonOutOfRange {
            eps: min_eps,
            upper,
        });
    }
    let span = upper / min_eps;
    let last = points - 1;
    let eps_values = (0..points)
        .map(|k| match k {
            0 => min_eps,
            k if k == last => upper,
            k => min_eps * span.powf(k as f64 / last as f64),
        })
        .collect();
    EpsilonGrid::from_values(eps_values, true, refinement_rounds, tol)
}

/// Outcome of maximising a profile over an epsilon grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Supremum {
    pub value: f64,
    /// Maximising `eps`; `0.0` when the `eps -> 0` limit wins.
    pub argmax: f64,
    /// Every `(eps, value)` evaluated, sorted by `eps`.
    pub evaluations: Vec<(f64, f64)>,
}

/// Maximises `objective` over the grid, its refinement, and optionally the
/// supplied `eps -> 0` limit value.
pub(crate) fn maximize(
    grid: &EpsilonGrid,
    zero_limit: Option<f64>,
    objective: impl Fn(f64) -> f64,
) -> Supremum {
    let mut evals: Vec<(f64, f64)> = grid.eps_values.iter().map(|&e| (e, objective(e))).collect();
    let best = argmax(&evals);
    let n = evals.len();
    let mut lo = evals[best.saturating_sub(1)];
    let mut hi = evals[(best + 1).min(n - 1)];
    let mut top = evals[best];

    for _ in 0..grid.refinement_rounds {
        if hi.0 - lo.0 <= grid.relative_tolerance * top.0 {
            break;
        }
        let step = (hi.0 - lo.0) / (ZOOM_POINTS + 1) as f64;
        let mut local = vec![lo];
        for k in 1..=ZOOM_POINTS {
            let e = lo.0 + step * k as f64;
            let pt = (e, objective(e));
            evals.push(pt);
            local.push(pt);
        }
        local.push(hi);
        // keep the incumbent if it beats every new interior point
        let k = argmax(&local);
        if local[k].1 >= top.1 {
            top = local[k];
        }
        let pos = local
            .iter()
            .position(|p| p.0 >= top.0)
            .unwrap_or(local.len() - 1);
        lo = local[pos.saturating_sub(1)];
        hi = local[(pos + 1).min(local.len() - 1)];
        if lo.0 > top.0 {
            lo = top;
        }
        if hi.0 < top.0 {
            hi = top;
        }
    }

    golden_section(&mut evals, lo.0, hi.0, grid.relative_tolerance, &objective);

    evals.sort_by(|a, b| a.0.total_cmp(&b.0));
    evals.dedup_by(|a, b| a.0 == b.0);
    let k = argmax(&evals);
    let (mut argmax_eps, mut value) = evals[k];
    if let Some(limit) = zero_limit {
        evals.insert(0, (0.0, limit));
        if limit > value {
            value = limit;
            argmax_eps = 0.0;
        }
    }
    Supremum {
        value,
        argmax: argmax_eps,
        evaluations: evals,
    }
}

fn golden_section(
    evals: &mut Vec<(f64, f64)>,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    objective: &impl Fn(f64) -> f64,
) {
    if hi <= lo {
        return;
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    evals.push((x1, f1));
    evals.push((x2, f2));
    for _ in 0..GOLDEN_MAX_ITERATIONS {
        if hi - lo <= tol * x1.max(x2) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = objective(x2);
            evals.push((x2, f2));
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = objective(x1);
            evals.push((x1, f1));
        }
    }
}

/// First index of the largest value.
fn argmax(points: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, p) in points.iter().enumerate() {
        if p.1 > points[best].1 {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp(p: f64, theta: f64) -> GrandExponent {
        GrandExponent::new(p, theta).unwrap()
    }

    #[test]
    fn geometric_examples() {
        let g = make_epsilon_grid(&exp(2.0, 1.0), 3, 0.25, 0, 1e-9).unwrap();
        assert_eq!(g.eps_values(), &[0.25, 0.5, 1.0]);
        let g = make_epsilon_grid(&exp(3.0, 1.0), 2, 0.5, 0, 1e-9).unwrap();
        assert_eq!(g.eps_values(), &[0.5, 2.0]);
        assert!(make_epsilon_grid(&exp(2.0, 1.0), 8, 1.0, 0, 1e-9).is_err());
        assert!(make_epsilon_grid(&exp(2.0, 1.0), 8, 1.5, 0, 1e-9).is_err());
        assert!(make_epsilon_grid(&exp(2.0, 1.0), 1, 0.1, 0, 1e-9).is_err());
    }

    #[test]
    fn default_grid_invariants() {
        for p in [1.1, 1.5, 2.0, 3.0, 7.5] {
            let e = exp(p, 1.0);
            let g = EpsilonGrid::default_for(&e);
            assert_eq!(g.eps_values().len(), DEFAULT_POINTS);
            assert_eq!(g.upper(), p - 1.0);
            assert_eq!(g.min_eps(), 1e-6 * (p - 1.0));
            assert!(g.eps_values().windows(2).all(|w| w[0] < w[1]));
            assert!(g.check_for(&e).is_ok());
            assert!(g.check_for(&exp(p + 0.5, 1.0)).is_err());
        }
    }

    #[test]
    fn from_values_validation() {
        assert!(EpsilonGrid::from_values(vec![0.1, 0.1], true, 0, 1e-9).is_err());
        assert!(EpsilonGrid::from_values(vec![0.0, 0.1], true, 0, 1e-9).is_err());
        assert!(EpsilonGrid::from_values(vec![0.1, 0.2], true, 0, 0.0).is_err());
        assert!(EpsilonGrid::from_values(vec![0.1], true, 0, 1e-9).is_err());
    }

    #[test]
    fn refinement_finds_interior_peak() {
        let e = exp(3.0, 1.0);
        let g = EpsilonGrid::default_for(&e).with_zero_limit(false);
        let peak = 0.7368;
        let s = maximize(&g, None, |x| 1.0 - (x - peak).powi(2));
        assert!((s.argmax - peak).abs() < 1e-6);
        assert!((s.value - 1.0).abs() < 1e-15);
        assert!(s.evaluations.windows(2).all(|w| w[0].0 < w[1].0));
    }

    #[test]
    fn endpoint_peaks_and_limit() {
        let e = exp(2.0, 1.0);
        let g = EpsilonGrid::default_for(&e);
        let s = maximize(&g, None, |x| x);
        assert_eq!(s.value, 1.0);
        assert_eq!(s.argmax, 1.0);
        let s = maximize(&g, Some(5.0), |x| 1.0 - x);
        assert_eq!(s.value, 5.0);
        assert_eq!(s.argmax, 0.0);
        assert_eq!(s.evaluations[0], (0.0, 5.0));
    }

    #[test]
    fn never_below_grid_terms() {
        let e = exp(2.5, 1.0);
        let g = EpsilonGrid::default_for(&e);
        let f = |x: f64| (7.0 * x).sin() + 0.3 * x;
        let s = maximize(&g, None, f);
        for &x in g.eps_values() {
            assert!(f(x) <= s.value);
        }
    }

    // Adjacent factor values on a fine grid differ by less than 10%. The
    // default 64-point grid is too coarse for this near eps = 1 when
    // theta / (p - eps) approaches 1, hence the 512-point grid here. For
    // p >= 4 the geometric spacing near p - 1 is too wide even at 512 points.
    #[test]
    fn factor_continuity_on_fine_grid() {
        for (p, theta) in [(1.5, 1.0), (2.0, 1.0), (3.0, 1.0), (2.0, 0.5), (2.5, 2.0)] {
            let e = exp(p, theta);
            let g = make_epsilon_grid(&e, 512, 1e-6 * (p - 1.0), 3, 1e-9).unwrap();
            assert!(g.refinement_rounds() >= 3);
            let vals: Vec<f64> = g.eps_values().iter().map(|&x| e.factor(x)).collect();
            for w in vals.windows(2) {
                let rel = (w[1] - w[0]).abs() / w[0].max(w[1]);
                assert!(rel < 0.1, "p={p} theta={theta} jump {rel}");
            }
        }
    }

    #[test]
    fn zero_theta_factor_is_one_on_grid() {
        let e = exp(2.7, 0.0);
        let g = EpsilonGrid::default_for(&e);
        assert!(g.eps_values().iter().all(|&x| e.factor(x) == 1.0));
    }
}
