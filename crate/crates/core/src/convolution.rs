//! Convolution on finite abelian groups and numerical checks of the
//! convolution-algebra property of grand Lebesgue and grand amalgam norms.
//!
//! A compact group is modelled by a finite group with probability-normalized
//! Haar weights. The integers with counting measure are modelled by `Z_N`
//! with unit weights and supports kept far enough from the wrap-around that
//! every convolution is exact.

use std::sync::Arc;

use serde::Serialize;

use crate::amalgam::window::{amalgam_norm, Window};
use crate::error::{Error, Result};
use crate::exponent::GrandExponent;
use crate::grand::grand_norm;
use crate::grid::EpsilonGrid;
use crate::lp::lp_norm;
use crate::measure::{same_space, GroupShape, MeasureSpace, SampledFunction};

/// Relative slack on every inequality checked in this module.
pub const CONVOLUTION_SLACK: f64 = 1e-12;

/// Warning attached to checks run on a counting-normalized group.
pub const HYPOTHESES_NOT_MET: &str = "hypotheses-not-met";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Total mass 1: the compact case.
    Probability,
    /// Unit mass per element.
    Counting,
}

/// `Z_{n1} x ... x Z_{nk}` with uniform Haar weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteAbelianGroup {
    shape: GroupShape,
    normalization: Normalization,
    space: Arc<MeasureSpace>,
}

impl FiniteAbelianGroup {
    pub fn new(shape: GroupShape, normalization: Normalization) -> Result<Self> {
        let weight = match normalization {
            Normalization::Probability => 1.0 / shape.order() as f64,
            Normalization::Counting => 1.0,
        };
        let space = Arc::new(MeasureSpace::group(shape.clone(), weight)?);
        Ok(Self {
            shape,
            normalization,
            space,
        })
    }

    pub fn cyclic(n: usize, normalization: Normalization) -> Result<Self> {
        Self::new(GroupShape::cyclic(n)?, normalization)
    }

    /// `Z_n` with counting measure, standing in for the integers. Functions
    /// supported on `0..m` convolve exactly when `n >= 2m - 1`.
    pub fn truncated_integers(n: usize) -> Result<Self> {
        Self::cyclic(n, Normalization::Counting)
    }

    pub fn shape(&self) -> &GroupShape {
        &self.shape
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn haar_weight(&self) -> f64 {
        self.space.weights()[0]
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn is_compact_model(&self) -> bool {
        self.normalization == Normalization::Probability
    }

    fn check(&self, f: &SampledFunction) -> Result<()> {
        if same_space(f.space(), &self.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }
}

/// `(f * g)(x) = sum_y f(y) g(x - y) w`.
///
/// The terms for `y` and `x - y` are added as one pair, and pairs are visited
/// in an order that does not depend on which argument comes first, so
/// `f * g` and `g * f` agree bit for bit.
pub fn convolve(
    f: &SampledFunction,
    g: &SampledFunction,
    group: &FiniteAbelianGroup,
) -> Result<SampledFunction> {
    group.check(f)?;
    group.check(g)?;
    let (a, b) = (f.values(), g.values());
    let n = group.order();
    let w = group.haar_weight();
    let shape = group.shape();
    let values = (0..n)
        .map(|x| {
            let mut sum = 0.0;
            for y in 0..n {
                let z = shape.sub(x, y);
                if y < z {
                    sum += a[y] * b[z] + a[z] * b[y];
                } else if y == z {
                    sum += a[y] * b[y];
                }
            }
            sum * w
        })
        .collect();
    SampledFunction::new(group.space().clone(), values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct YoungRow {
    /// `0` stands for the order `p` itself.
    pub eps: f64,
    /// `||f * g||_{p-eps}`.
    pub lhs: f64,
    /// `||f||_{p-eps} ||g||_{p-eps}`.
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubmultiplicativityReport {
    /// `||f * g||_{p),theta}`.
    pub lhs: f64,
    /// `||f||_{p),theta} ||g||_{p),theta}`.
    pub rhs: f64,
    /// `lhs / rhs`; `None` when `rhs = 0`.
    pub ratio: Option<f64>,
    pub per_eps: Vec<YoungRow>,
    /// `1 / ||1||_{p),theta}`, the bound Young and Hölder give for the ratio
    /// on a probability space. Absent for counting measure.
    pub proven_bound: Option<f64>,
    pub within_proven_bound: bool,
    /// `ratio <= 1` and every Young row passes.
    pub pass: bool,
    pub warnings: Vec<String>,
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

fn at_most(r: Option<f64>, bound: f64) -> bool {
    r.map_or(true, |r| r <= bound * (1.0 + CONVOLUTION_SLACK))
}

fn warnings(group: &FiniteAbelianGroup) -> Vec<String> {
    if group.is_compact_model() {
        Vec::new()
    } else {
        vec![HYPOTHESES_NOT_MET.to_string()]
    }
}

/// `||1||_{p),theta}` on a probability space, `sup eps^(theta/(p-eps))`.
fn unit_norm(group: &FiniteAbelianGroup, exp: &GrandExponent, grid: &EpsilonGrid) -> Result<f64> {
    grand_norm(
        &SampledFunction::constant(group.space().clone(), 1.0)?,
        exp,
        grid,
    )
}

/// Compares `||f * g||_{p),theta}` with `||f||_{p),theta} ||g||_{p),theta}`,
/// and `||f * g||_r` with `||f||_r ||g||_r` at every grid order `r = p - eps`.
///
/// On a probability space Young's inequality and `||g||_1 <= ||g||_r` give
/// every row. Taking `r` at the maximiser of the weight gives
/// `ratio <= 1 / ||1||_{p),theta}`, which is at most 1 when `p >= 2` or
/// `theta = 0` but can exceed 1 otherwise. Counting-normalized groups are
/// checked as well and carry a warning.
pub fn submultiplicativity_check(
    f: &SampledFunction,
    g: &SampledFunction,
    group: &FiniteAbelianGroup,
    exp: &GrandExponent,
    grid: &EpsilonGrid,
) -> Result<SubmultiplicativityReport> {
    let fg = convolve(f, g, group)?;
    let lhs = grand_norm(&fg, exp, grid)?;
    let rhs = grand_norm(f, exp, grid)? * grand_norm(g, exp, grid)?;

    let mut eps: Vec<f64> = grid.eps_values().to_vec();
    if grid.include_zero_limit() {
        eps.insert(0, 0.0);
    }
    let per_eps = eps
        .into_iter()
        .map(|e| {
            let r = exp.p() - e;
            let lhs = lp_norm(&fg, r)?;
            let rhs = lp_norm(f, r)? * lp_norm(g, r)?;
            Ok(YoungRow {
                eps: e,
                lhs,
                rhs,
                pass: lhs <= rhs * (1.0 + CONVOLUTION_SLACK),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let ratio = ratio(lhs, rhs);
    let proven_bound = if group.is_compact_model() {
        Some(1.0 / unit_norm(group, exp, grid)?)
    } else {
        None
    };
    Ok(SubmultiplicativityReport {
        lhs,
        rhs,
        ratio,
        within_proven_bound: proven_bound.map_or(true, |b| at_most(ratio, b)),
        pass: at_most(ratio, 1.0) && per_eps.iter().all(|r| r.pass),
        per_eps,
        proven_bound,
        warnings: warnings(group),
    })
}

/// Measured constants relating amalgam norms to grand norms on one group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmalgamConstants {
    /// `||1||_{q),theta}`.
    pub kappa_q: f64,
    /// `||1||_{p),theta}`.
    pub a_max: f64,
    /// `||chi_{x}||_{q),theta}` for a single element `x`.
    pub lambda_q: f64,
    /// `order / #Q`.
    pub window_ratio: f64,
    /// `W(h) / ||h||_{p),theta}` for `h = f, g, f * g`; `None` when `h = 0`.
    pub alpha_f: Option<f64>,
    pub alpha_g: Option<f64>,
    pub alpha_fg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmalgamSubmultiplicativityReport {
    /// `W(f * g)`, the amalgam norm with window `Q`.
    pub lhs: f64,
    /// `W(f) W(g)`.
    pub rhs: f64,
    pub ratio: Option<f64>,
    /// `ratio <= constant_C` for every pair on this group and window.
    #[serde(rename = "constant_C")]
    pub constant_c: Option<f64>,
    /// `kappa_q / (a_max alpha_f alpha_g)`, the bound for this pair.
    pub measured_bound: Option<f64>,
    /// `||f||_{p),theta} ||g||_{q),theta}`, the decoupled double supremum.
    pub decoupled_bound: f64,
    /// `lhs / decoupled_bound`.
    pub decoupled_ratio: Option<f64>,
    pub constants: AmalgamConstants,
    pub pass: bool,
    pub warnings: Vec<String>,
}

/// Compares `W(f * g)` with `W(f) W(g)` for the amalgam norm
/// `W(h) = ||x -> ||h chi_{Q+x}||_{p),theta}||_{q),theta}`.
///
/// `W(h) <= kappa_q ||h||_{p),theta}` because every restriction is smaller
/// than `h`, and averaging `||h chi_{Q+x}||_r^r` over `x` gives
/// `||h||_{p),theta} <= window_ratio W(h) / lambda_q`. With the convolution
/// bound `||f * g|| <= ||f|| ||g|| / a_max` this yields
/// `ratio <= kappa_q window_ratio^2 / (a_max lambda_q^2)`.
#[allow(clippy::too_many_arguments)]
pub fn amalgam_submultiplicativity_check(
    f: &SampledFunction,
    g: &SampledFunction,
    group: &FiniteAbelianGroup,
    q: &Window,
    local: &GrandExponent,
    global: &GrandExponent,
    grid_p: &EpsilonGrid,
    grid_q: &EpsilonGrid,
) -> Result<AmalgamSubmultiplicativityReport> {
    group.check(f)?;
    if !same_space(q.space(), group.space()) {
        return Err(Error::SpaceMismatch);
    }
    let fg = convolve(f, g, group)?;
    let w = |h: &SampledFunction| amalgam_norm(h, q, local, global, grid_p, grid_q);
    let (w_f, w_g, w_fg) = (w(f)?, w(g)?, w(&fg)?);
    let (n_f, n_g, n_fg) = (
        grand_norm(f, local, grid_p)?,
        grand_norm(g, local, grid_p)?,
        grand_norm(&fg, local, grid_p)?,
    );

    let kappa_q = unit_norm(group, global, grid_q)?;
    let a_max = unit_norm(group, local, grid_p)?;
    let delta = SampledFunction::indicator(group.space().clone(), &[0])?;
    let lambda_q = grand_norm(&delta, global, grid_q)?;
    let window_ratio = group.order() as f64 / q.len() as f64;
    let constants = AmalgamConstants {
        kappa_q,
        a_max,
        lambda_q,
        window_ratio,
        alpha_f: ratio(w_f, n_f),
        alpha_g: ratio(w_g, n_g),
        alpha_fg: ratio(w_fg, n_fg),
    };

    let rhs = w_f * w_g;
    let r = ratio(w_fg, rhs);
    let compact = group.is_compact_model();
    let constant_c =
        compact.then(|| kappa_q * window_ratio * window_ratio / (a_max * lambda_q * lambda_q));
    let measured_bound = match (compact, constants.alpha_f, constants.alpha_g) {
        (true, Some(af), Some(ag)) => Some(kappa_q / (a_max * af * ag)),
        _ => None,
    };
    let decoupled_bound = n_f * grand_norm(g, global, grid_q)?;
    let pass = constant_c.map_or(true, |c| at_most(r, c))
        && measured_bound.map_or(true, |b| at_most(r, b));

    Ok(AmalgamSubmultiplicativityReport {
        lhs: w_fg,
        rhs,
        ratio: r,
        constant_c,
        measured_bound,
        decoupled_bound,
        decoupled_ratio: ratio(w_fg, decoupled_bound),
        constants,
        pass,
        warnings: warnings(group),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessReport {
    pub m: usize,
    pub p: f64,
    /// `||chi * chi||_p / ||chi||_p^2` for `chi = chi_{[0, m)}` on the integers.
    pub ratio_m: f64,
    pub ratio_2m: f64,
    /// `ratio_2m > ratio_m > 1`.
    pub growing: bool,
}

/// `||chi_{[0,m)} * chi_{[0,m)}||_p / ||chi_{[0,m)}||_p^2` with counting measure.
pub fn witness_ratio(m: usize, p: f64) -> Result<f64> {
    if m < 2 || !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidWitness { m, p });
    }
    let group = FiniteAbelianGroup::truncated_integers(2 * m)?;
    let support: Vec<i64> = (0..m as i64).collect();
    let chi = SampledFunction::indicator(group.space().clone(), &support)?;
    let conv = convolve(&chi, &chi, &group)?;
    Ok(lp_norm(&conv, p)? / lp_norm(&chi, p)?.powi(2))
}

/// Submultiplicativity failing on the integers: the ratio exceeds 1 and
/// grows with the support length, roughly like `m^(1-1/p)`.
pub fn noncompact_witness(m: usize, p: f64) -> Result<WitnessReport> {
    let ratio_m = witness_ratio(m, p)?;
    let ratio_2m = witness_ratio(2 * m, p)?;
    Ok(WitnessReport {
        m,
        p,
        ratio_m,
        ratio_2m,
        growing: ratio_2m > ratio_m && ratio_m > 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp(p: f64, theta: f64) -> GrandExponent {
        GrandExponent::new(p, theta).unwrap()
    }

    fn prob(n: usize) -> FiniteAbelianGroup {
        FiniteAbelianGroup::cyclic(n, Normalization::Probability).unwrap()
    }

    fn func(group: &FiniteAbelianGroup, v: Vec<f64>) -> SampledFunction {
        SampledFunction::new(group.space().clone(), v).unwrap()
    }

    #[test]
    fn delta_is_identity() {
        let grp = prob(8);
        let mut d = vec![0.0; 8];
        d[0] = 8.0;
        let g = func(&grp, (0..8).map(|i| (i as f64).cos()).collect());
        let out = convolve(&func(&grp, d), &g, &grp).unwrap();
        assert_eq!(out.values(), g.values());
    }

    #[test]
    fn constants_convolve_to_constant() {
        let grp = prob(16);
        let one = SampledFunction::constant(grp.space().clone(), 1.0).unwrap();
        let out = convolve(&one, &one, &grp).unwrap();
        assert!(out.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn truncated_integers_pair() {
        let grp = FiniteAbelianGroup::truncated_integers(4).unwrap();
        let chi = SampledFunction::indicator(grp.space().clone(), &[0, 1]).unwrap();
        let out = convolve(&chi, &chi, &grp).unwrap();
        assert_eq!(out.values(), &[1.0, 2.0, 1.0, 0.0]);
    }

    #[test]
    fn product_group_convolution() {
        let shape = GroupShape::new(vec![2, 3]).unwrap();
        let grp = FiniteAbelianGroup::new(shape.clone(), Normalization::Counting).unwrap();
        let f = func(&grp, vec![1.0, 2.0, 0.0, -1.0, 0.5, 3.0]);
        let g = func(&grp, vec![0.0, 1.0, 4.0, 2.0, -2.0, 1.0]);
        let out = convolve(&f, &g, &grp).unwrap();
        for x in 0..6 {
            let want: f64 = (0..6)
                .map(|y| f.values()[y] * g.values()[shape.sub(x, y)])
                .sum();
            assert!((out.values()[x] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn mismatched_group_rejected() {
        let a = prob(8);
        let b = prob(16);
        let f = SampledFunction::constant(a.space().clone(), 1.0).unwrap();
        let g = SampledFunction::constant(b.space().clone(), 1.0).unwrap();
        assert!(matches!(convolve(&f, &g, &a), Err(Error::SpaceMismatch)));
    }

    #[test]
    fn constants_ratio_is_reciprocal_unit_norm() {
        let grp = prob(8);
        let one = SampledFunction::constant(grp.space().clone(), 1.0).unwrap();
        for (p, t, want) in [
            (2.0, 0.0, 1.0),
            (2.0, 1.0, 1.0),
            (3.0, 1.0, 0.5),
            (1.5, 1.0, 2.0),
        ] {
            let e = exp(p, t);
            let r = submultiplicativity_check(&one, &one, &grp, &e, &EpsilonGrid::default_for(&e))
                .unwrap();
            let ratio = r.ratio.unwrap();
            assert!((ratio - want).abs() < 1e-12, "p={p} t={t} ratio={ratio}");
            assert!(r.within_proven_bound);
            assert!(r.per_eps.iter().all(|row| row.pass));
            assert_eq!(r.pass, want <= 1.0);
        }
    }

    #[test]
    fn atom_pair_ratio_at_most_one() {
        let n = 16;
        let grp = prob(n);
        let mut v = vec![0.0; n];
        v[3] = n as f64;
        let f = func(&grp, v);
        let e = exp(2.0, 0.0);
        let r = submultiplicativity_check(&f, &f, &grp, &e, &EpsilonGrid::default_for(&e)).unwrap();
        // f * f is n at 6, so ||f*f||_2 = sqrt(n) = ||f||_2^2 / sqrt(n)
        let want = 1.0 / (n as f64).sqrt();
        assert!((r.ratio.unwrap() - want).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn counting_group_is_flagged() {
        let grp = FiniteAbelianGroup::cyclic(8, Normalization::Counting).unwrap();
        let f = SampledFunction::indicator(grp.space().clone(), &[0, 1]).unwrap();
        let e = exp(2.0, 0.0);
        let r = submultiplicativity_check(&f, &f, &grp, &e, &EpsilonGrid::default_for(&e)).unwrap();
        assert_eq!(r.warnings, vec![HYPOTHESES_NOT_MET.to_string()]);
        assert_eq!(r.proven_bound, None);
    }

    #[test]
    fn zero_amalgam_check() {
        let grp = prob(16);
        let z = SampledFunction::zeros(grp.space().clone());
        let q = Window::contiguous(grp.space().clone(), 0, 4).unwrap();
        let e = exp(2.0, 1.0);
        let g = EpsilonGrid::default_for(&e);
        let r = amalgam_submultiplicativity_check(&z, &z, &grp, &q, &e, &e, &g, &g).unwrap();
        assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, None));
        assert!(r.pass);
    }

    #[test]
    fn whole_window_amalgam_reduces() {
        let grp = prob(8);
        let one = SampledFunction::constant(grp.space().clone(), 1.0).unwrap();
        let q = Window::whole(grp.space().clone());
        for (p, t) in [(2.0, 0.0), (2.0, 1.0), (3.0, 1.0)] {
            let e = exp(p, t);
            let g = EpsilonGrid::default_for(&e);
            let a =
                amalgam_submultiplicativity_check(&one, &one, &grp, &q, &e, &e, &g, &g).unwrap();
            let s = submultiplicativity_check(&one, &one, &grp, &e, &g).unwrap();
            // W(h) = ||h|| ||1||, so the amalgam ratio is the grand ratio / ||1||
            let k = a.constants.kappa_q;
            assert!((a.ratio.unwrap() - s.ratio.unwrap() / k).abs() < 1e-12);
            assert!(a.pass);
        }
    }

    #[test]
    fn witness_values() {
        let w = noncompact_witness(2, 2.0).unwrap();
        assert!((w.ratio_m - 6f64.sqrt() / 2.0).abs() < 1e-15);
        assert!(w.growing);
        assert!(witness_ratio(4, 2.0).unwrap() > w.ratio_m);
        for p in [1.01, 1.5, 3.0, 10.0, 100.0] {
            assert!(witness_ratio(2, p).unwrap() > 1.0, "p={p}");
        }
        assert!(matches!(
            noncompact_witness(1, 2.0),
            Err(Error::InvalidWitness { .. })
        ));
        assert!(noncompact_witness(2, 1.0).is_err());
    }

    fn vals(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-4.0f64..4.0, n)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn commutative_exactly(a in vals(12), b in vals(12)) {
            let grp = prob(12);
            let (f, g) = (func(&grp, a), func(&grp, b));
            let fg = convolve(&f, &g, &grp).unwrap();
            let gf = convolve(&g, &f, &grp).unwrap();
            prop_assert_eq!(fg.values(), gf.values());
        }

        #[test]
        fn associative(a in vals(10), b in vals(10), c in vals(10)) {
            let grp = prob(10);
            let (f, g, h) = (func(&grp, a), func(&grp, b), func(&grp, c));
            let left = convolve(&convolve(&f, &g, &grp).unwrap(), &h, &grp).unwrap();
            let right = convolve(&f, &convolve(&g, &h, &grp).unwrap(), &grp).unwrap();
            let scale = f.values().iter().chain(g.values()).chain(h.values())
                .fold(1.0_f64, |m, v| m.max(v.abs())).powi(3);
            for (l, r) in left.values().iter().zip(right.values()) {
                prop_assert!((l - r).abs() <= 1e-10 * scale);
            }
        }

        #[test]
        fn young_rows_and_ratio(
            a in vals(16),
            b in vals(16),
            (p, t) in prop::sample::select(vec![(2.0, 0.0), (2.0, 1.0), (3.0, 1.0), (1.5, 0.0), (2.5, 2.0)]),
        ) {
            let grp = prob(16);
            let e = exp(p, t);
            let r = submultiplicativity_check(
                &func(&grp, a), &func(&grp, b), &grp, &e, &EpsilonGrid::default_for(&e),
            ).unwrap();
            prop_assert!(r.per_eps.iter().all(|row| row.pass));
            prop_assert!(r.within_proven_bound);
            prop_assert!(r.pass);
        }

        #[test]
        fn young_rows_below_two(a in vals(8), b in vals(8), t in 0.5f64..3.0) {
            let grp = prob(8);
            let e = exp(1.5, t);
            let r = submultiplicativity_check(
                &func(&grp, a), &func(&grp, b), &grp, &e, &EpsilonGrid::default_for(&e),
            ).unwrap();
            prop_assert!(r.per_eps.iter().all(|row| row.pass));
            prop_assert!(r.within_proven_bound);
        }

        #[test]
        fn amalgam_ratio_below_constant(
            a in vals(16),
            b in vals(16),
            t in prop::sample::select(vec![0.0, 1.0]),
        ) {
            let grp = prob(16);
            let q = Window::contiguous(grp.space().clone(), 0, 4).unwrap();
            let e = exp(2.0, t);
            let g = EpsilonGrid::default_for(&e);
            let r = amalgam_submultiplicativity_check(
                &func(&grp, a), &func(&grp, b), &grp, &q, &e, &e, &g, &g,
            ).unwrap();
            prop_assert!(r.pass, "{:?}", r);
        }
    }
}
