//! Generalized fractional derivative.
//!
//! `D^α f(s) = I · s^{1-α} · f'(s)` with `I = Γ(β) / Γ(β - α + 1)`, where
//! `β` is the second fractional parameter (unrelated to the potential depth).
//! The second iterate is
//! `D^α D^α f(s) = I² [(1 - α) s^{1-2α} f'(s) + s^{2-2α} f''(s)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::{central_diff, default_step, gamma, second_central_diff};

/// The fractional order pair `(α, β)` with the derived gamma ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrder", into = "RawOrder")]
pub struct FractionalOrder {
    alpha: f64,
    beta_frac: f64,
    i_factor: f64,
}

#[derive(Serialize, Deserialize)]
struct RawOrder {
    alpha: f64,
    beta_frac: f64,
}

impl TryFrom<RawOrder> for FractionalOrder {
    type Error = Error;

    fn try_from(raw: RawOrder) -> Result<Self> {
        FractionalOrder::new(raw.alpha, raw.beta_frac)
    }
}

impl From<FractionalOrder> for RawOrder {
    fn from(fo: FractionalOrder) -> Self {
        RawOrder {
            alpha: fo.alpha,
            beta_frac: fo.beta_frac,
        }
    }
}

impl FractionalOrder {
    pub fn new(alpha: f64, beta_frac: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1], got {alpha}"
            )));
        }
        if !(beta_frac > 0.0 && beta_frac <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "beta_frac must lie in (0, 1], got {beta_frac}"
            )));
        }
        let shifted = beta_frac - alpha + 1.0;
        assert!(shifted > 0.0, "beta_frac - alpha + 1 must be positive");
        let i_factor = if alpha == 1.0 && beta_frac == 1.0 {
            1.0
        } else {
            gamma(beta_frac)? / gamma(shifted)?
        };
        Ok(Self {
            alpha,
            beta_frac,
            i_factor,
        })
    }

    /// The ordinary-derivative order `α = β = 1`.
    pub fn classical() -> Self {
        Self {
            alpha: 1.0,
            beta_frac: 1.0,
            i_factor: 1.0,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta_frac(&self) -> f64 {
        self.beta_frac
    }

    pub fn i_factor(&self) -> f64 {
        self.i_factor
    }

    /// `I⁻²`, the factor that multiplies the transformed coefficients.
    pub fn inv_i_sq(&self) -> f64 {
        1.0 / (self.i_factor * self.i_factor)
    }

    pub fn is_classical(&self) -> bool {
        self.alpha == 1.0 && self.beta_frac == 1.0
    }
}

/// `Γ(β) / Γ(β - α + 1)`.
pub fn i_factor(fo: &FractionalOrder) -> f64 {
    fo.i_factor
}

fn check_point(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "fractional derivative needs s > 0, got {s}"
        )))
    }
}

/// First fractional derivative given the ordinary derivative `f'(s)`.
pub fn gfd_first_exact(df: f64, fo: &FractionalOrder, s: f64) -> Result<f64> {
    check_point(s)?;
    if fo.is_classical() {
        return Ok(df);
    }
    Ok(fo.i_factor * s.powf(1.0 - fo.alpha) * df)
}

/// Second iterate given `f'(s)` and `f''(s)`.
pub fn gfd_second_exact(df: f64, d2f: f64, fo: &FractionalOrder, s: f64) -> Result<f64> {
    check_point(s)?;
    if fo.is_classical() {
        return Ok(d2f);
    }
    let a = fo.alpha;
    let i2 = fo.i_factor * fo.i_factor;
    Ok(i2 * ((1.0 - a) * s.powf(1.0 - 2.0 * a) * df + s.powf(2.0 - 2.0 * a) * d2f))
}

/// First fractional derivative with `f'` from central differences.
pub fn gfd_first<F: Fn(f64) -> f64>(f: F, fo: &FractionalOrder, s: f64) -> Result<f64> {
    check_point(s)?;
    let h = default_step(s).min(0.5 * s);
    gfd_first_exact(central_diff(&f, s, h), fo, s)
}

/// Second iterate with both derivatives from central differences.
pub fn gfd_second<F: Fn(f64) -> f64>(f: F, fo: &FractionalOrder, s: f64) -> Result<f64> {
    check_point(s)?;
    let h1 = default_step(s).min(0.5 * s);
    // second differences lose twice the digits; use a wider stencil
    let h2 = (1e-4 * s.abs().max(1.0)).min(0.5 * s);
    gfd_second_exact(
        central_diff(&f, s, h1),
        second_central_diff(&f, s, h2),
        fo,
        s,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn i_factor_examples() {
        assert_eq!(i_factor(&FractionalOrder::new(1.0, 1.0).unwrap()), 1.0);
        let half = FractionalOrder::new(0.5, 1.0).unwrap();
        assert_relative_eq!(i_factor(&half), 2.0 / PI.sqrt(), max_relative = 1e-13);
        let both = FractionalOrder::new(0.5, 0.5).unwrap();
        assert_relative_eq!(i_factor(&both), PI.sqrt(), max_relative = 1e-13);
    }

    #[test]
    fn order_validation() {
        assert!(FractionalOrder::new(0.0, 1.0).is_err());
        assert!(FractionalOrder::new(1.1, 1.0).is_err());
        assert!(FractionalOrder::new(0.5, 0.0).is_err());
        assert!(FractionalOrder::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn first_examples() {
        let fo = FractionalOrder::classical();
        assert_eq!(gfd_first_exact(6.0, &fo, 3.0).unwrap(), 6.0);
        let half = FractionalOrder::new(0.5, 1.0).unwrap();
        assert_relative_eq!(
            gfd_first_exact(1.0, &half, 4.0).unwrap(),
            4.0 / PI.sqrt(),
            max_relative = 1e-13
        );
        assert_eq!(gfd_first(|_| 3.0, &half, 2.0).unwrap(), 0.0);
        assert!((gfd_first(|s| s, &half, 4.0).unwrap() - 4.0 / PI.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn second_examples() {
        let fo = FractionalOrder::classical();
        assert_eq!(gfd_second_exact(10.0, 2.0, &fo, 5.0).unwrap(), 2.0);
        let half = FractionalOrder::new(0.5, 1.0).unwrap();
        assert_relative_eq!(
            gfd_second_exact(1.0, 0.0, &half, 1.0).unwrap(),
            2.0 / PI,
            max_relative = 1e-13
        );
        assert_eq!(gfd_second(|_| -1.0, &half, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_point() {
        let fo = FractionalOrder::classical();
        assert!(gfd_first_exact(1.0, &fo, 0.0).is_err());
        assert!(gfd_second_exact(1.0, 1.0, &fo, -2.0).is_err());
        assert!(gfd_first(|s| s, &fo, -1.0).is_err());
    }

    #[test]
    fn serde_round_trip_revalidates() {
        let fo = FractionalOrder::new(0.7, 0.9).unwrap();
        let json = serde_json::to_string(&fo).unwrap();
        let back: FractionalOrder = serde_json::from_str(&json).unwrap();
        assert_eq!(fo, back);
        assert!(serde_json::from_str::<FractionalOrder>(r#"{"alpha":2.0,"beta_frac":1.0}"#).is_err());
    }
}
