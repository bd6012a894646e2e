use serde::Serialize;

use crate::error::{Error, Result};

/// The pair `(p, theta)` indexing a grand Lebesgue space, with `1 < p < inf`
/// and `theta >= 0`. Suprema run over `eps` in `(0, p - 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrandExponent {
    p: f64,
    theta: f64,
}

impl GrandExponent {
    pub fn new(p: f64, theta: f64) -> Result<Self> {
        let p_ok = p.is_finite() && p > 1.0;
        let theta_ok = theta.is_finite() && theta >= 0.0;
        if !(p_ok && theta_ok) {
            return Err(Error::InvalidGrandExponent { p, theta });
        }
        Ok(Self { p, theta })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Right end `p - 1` of the epsilon interval.
    pub fn eps_upper(&self) -> f64 {
        self.p - 1.0
    }

    pub fn check_eps(&self, eps: f64) -> Result<()> {
        if !(eps > 0.0 && eps <= self.eps_upper()) {
            return Err(Error::EpsilonOutOfRange {
                eps,
                upper: self.eps_upper(),
            });
        }
        Ok(())
    }

    /// `eps^(theta / (p - eps))` without the range check.
    pub(crate) fn factor(&self, eps: f64) -> f64 {
        if self.theta == 0.0 {
            1.0
        } else {
            eps.powf(self.theta / (self.p - eps))
        }
    }
}

/// The weight `eps^(theta / (p - eps))` applied to `||f||_{p - eps}`.
pub fn grand_factor(eps: f64, exp: &GrandExponent) -> Result<f64> {
    exp.check_eps(eps)?;
    Ok(exp.factor(eps))
}
