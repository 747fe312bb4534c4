//! Eigenfunctions: weight `ρ`, factor `Φ`, Rodrigues polynomials and the
//! assembled radial function.
//!
//! On the NU coordinate `x ∈ (0, q^{-1/α})`, with `g(x) = 1 - q x^α`:
//!
//! ```text
//! ρ(x) = x^{A11} g^{-(A11 q + B11)/(α q)}     from (σ_f ρ)' = τ_f ρ
//! Φ(x) = x^{C}   g^{-(C q + D)/(α q)}         from Φ'/Φ = π_f/σ_f
//! y_n  = ρ⁻¹ dⁿ/dxⁿ (σ_fⁿ ρ)
//! R    = Φ · y_n  ∝  x^C g^{-(Cq+D)/(αq)} P_n^{(a,b)}(1 - 2 q x^α)
//! ```
//!
//! The physical radius enters through `x = e^{-2β1 r} / q`, which sends
//! `r ∈ [0, ∞)` onto `(0, 1/q]` with the origin at the `g = 0` endpoint.
//! Radius-space evaluation is only defined for `α = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprTerm};
use crate::gfd::FractionalOrder;
use crate::nucore::{nu_branch, NuIntermediates, WellShape};
use crate::specfun::{jacobi, simpson, JacobiParams};

/// Deepest Rodrigues derivative computed by term rewriting.
pub const MAX_RODRIGUES_DEGREE: usize = 6;

/// Argument convention for the Jacobi factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum JacobiArgument {
    /// `1 - 2 q x^α`, mapping the NU interval onto `(-1, 1)`.
    #[default]
    Interval,
    /// `1 - q x^α`, as printed alongside the closed-form wavefunction.
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavefunctionSpec {
    pub n: usize,
    pub eps: f64,
    pub alpha: f64,
    pub q: f64,
    pub a11: f64,
    pub b11: f64,
    pub c_exp: f64,
    pub d_exp: f64,
    pub norm_const: f64,
    pub nu: NuIntermediates,
}

impl WavefunctionSpec {
    /// Exponent of `g` in `ρ`: `-(A11 q + B11)/(α q)`.
    pub fn rho_g_exp(&self) -> f64 {
        -(self.a11 * self.q + self.b11) / (self.alpha * self.q)
    }

    /// Exponent of `g` in `Φ`: `-(C q + D)/(α q)`.
    pub fn phi_g_exp(&self) -> f64 {
        -(self.c_exp * self.q + self.d_exp) / (self.alpha * self.q)
    }

    /// Upper end of the NU interval, `q^{-1/α}`.
    pub fn x_max(&self) -> f64 {
        self.q.powf(-1.0 / self.alpha)
    }

    pub fn jacobi_params(&self) -> Result<JacobiParams> {
        JacobiParams::new(self.n, self.a11, self.rho_g_exp())
    }

    fn g(&self, x: f64) -> f64 {
        1.0 - self.q * x.powf(self.alpha)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if x > 0.0 && self.g(x) > 0.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "x = {x} outside (0, {})",
                self.x_max()
            )))
        }
    }

    pub fn jacobi_argument(&self, x: f64, arg: JacobiArgument) -> f64 {
        let t = x.powf(self.alpha);
        match arg {
            JacobiArgument::Interval => 1.0 - 2.0 * self.q * t,
            JacobiArgument::Printed => 1.0 - self.q * t,
        }
    }
}

/// Builds the eigenfunction exponents from the branch selected at `eps`.
pub fn build_spec(eps: f64, shape: &WellShape, fo: &FractionalOrder, n: usize) -> Result<WavefunctionSpec> {
    let nu = nu_branch(&shape.at(eps), fo)?;
    let alpha = fo.alpha();
    let q = shape.q;
    let spec = WavefunctionSpec {
        n,
        eps,
        alpha,
        q,
        a11: nu.t0_tau - 1.0,
        b11: nu.t1_tau + q * (1.0 + alpha),
        c_exp: nu.pi0,
        d_exp: nu.pi1,
        norm_const: 1.0,
        nu,
    };
    spec.jacobi_params().map_err(|e| {
        Error::InvalidParameter(format!("level n = {n} at eps = {eps} is not normalizable: {e}"))
    })?;
    Ok(spec)
}

pub fn rho_weight(spec: &WavefunctionSpec, x: f64) -> Result<f64> {
    spec.check_domain(x)?;
    Ok(x.powf(spec.a11) * spec.g(x).powf(spec.rho_g_exp()))
}

pub fn phi_factor(spec: &WavefunctionSpec, x: f64) -> Result<f64> {
    spec.check_domain(x)?;
    Ok(x.powf(spec.c_exp) * spec.g(x).powf(spec.phi_g_exp()))
}

/// `σ_fⁿ ρ` as a single term.
pub fn rodrigues_kernel(spec: &WavefunctionSpec, n: usize) -> Expr {
    let nf = n as f64;
    Expr::single(
        spec.q,
        spec.alpha,
        ExprTerm::new(1.0, nf + spec.a11, nf + spec.rho_g_exp()),
    )
}

/// `y_n(x) = ρ⁻¹ dⁿ/dxⁿ (σ_fⁿ ρ)` with exact term-rewriting derivatives.
pub fn rodrigues_yn(spec: &WavefunctionSpec, n: usize, x: f64) -> Result<f64> {
    if n > MAX_RODRIGUES_DEGREE {
        return Err(Error::Unsupported(format!(
            "Rodrigues degree {n} exceeds the cap of {MAX_RODRIGUES_DEGREE}"
        )));
    }
    let rho = rho_weight(spec, x)?;
    Ok(rodrigues_kernel(spec, n).nth_derivative(n).eval(x) / rho)
}

/// Unnormalized-by-convention radial function on the NU coordinate, scaled by `norm_const`.
pub fn radial_nu(spec: &WavefunctionSpec, x: f64, arg: JacobiArgument) -> Result<f64> {
    let phi = phi_factor(spec, x)?;
    let p = spec.jacobi_params()?;
    Ok(spec.norm_const * phi * jacobi(&p, spec.jacobi_argument(x, arg)))
}

/// `x(r) = e^{-2β1 r} / q`.
pub fn x_of_r(beta1: f64, q: f64, r: f64) -> f64 {
    (-2.0 * beta1 * r).exp() / q
}

/// Radial function in radius space; requires `α = 1`. `R(0) = 0` when the
/// `g` exponent is positive and the value diverges when it is negative.
pub fn radial_r(spec: &WavefunctionSpec, beta1: f64, r: f64) -> Result<f64> {
    if spec.alpha != 1.0 {
        return Err(Error::Unsupported(format!(
            "radius-space wavefunctions are only defined for alpha = 1, got {}",
            spec.alpha
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!("r must be nonnegative, got {r}")));
    }
    if r == 0.0 {
        let e = spec.phi_g_exp();
        return Ok(if e > 0.0 {
            0.0
        } else if e == 0.0 {
            let p = spec.jacobi_params()?;
            spec.norm_const * spec.x_max().powf(spec.c_exp) * jacobi(&p, -1.0)
        } else {
            f64::INFINITY
        });
    }
    radial_nu(spec, x_of_r(beta1, spec.q, r), JacobiArgument::Interval)
}

/// Default radius cutoff and interval count for normalization.
pub const DEFAULT_R_MAX: f64 = 20.0;
pub const DEFAULT_INTERVALS: usize = 4000;

fn finite_positive(integral: f64) -> Result<f64> {
    if integral.is_finite() && integral > 0.0 {
        Ok(integral)
    } else {
        Err(Error::Domain(format!("normalization integral diverges ({integral})")))
    }
}

/// Sets `norm_const` so that `∫₀^{r_max} R(r)² dr = 1`.
pub fn normalize(spec: &WavefunctionSpec, beta1: f64, r_max: f64, intervals: usize) -> Result<WavefunctionSpec> {
    let unit = WavefunctionSpec {
        norm_const: 1.0,
        ..*spec
    };
    // probe for the alpha restriction before integrating
    radial_r(&unit, beta1, r_max)?;
    let integral = simpson(
        |r| radial_r(&unit, beta1, r).map(|v| v * v).unwrap_or(f64::NAN),
        0.0,
        r_max,
        intervals,
    )?;
    let integral = finite_positive(integral)?;
    Ok(WavefunctionSpec {
        norm_const: integral.sqrt().recip(),
        ..*spec
    })
}

/// Sets `norm_const` so that `∫ R(x)² dx = 1` over the NU interval.
pub fn normalize_nu(spec: &WavefunctionSpec, intervals: usize) -> Result<WavefunctionSpec> {
    let unit = WavefunctionSpec {
        norm_const: 1.0,
        ..*spec
    };
    let hi = spec.x_max();
    let integral = simpson(
        |x| {
            if x <= 0.0 || x >= hi {
                // endpoint values of the integrand, zero when the exponents are positive
                let e = if x <= 0.0 { spec.c_exp } else { spec.phi_g_exp() };
                if e > 0.0 { 0.0 } else { f64::NAN }
            } else {
                radial_nu(&unit, x, JacobiArgument::Interval)
                    .map(|v| v * v)
                    .unwrap_or(f64::NAN)
            }
        },
        0.0,
        hi,
        intervals,
    )?;
    let integral = finite_positive(integral)?;
    Ok(WavefunctionSpec {
        norm_const: integral.sqrt().recip(),
        ..*spec
    })
}

/// Sign changes of the Jacobi factor over `samples` interior points of `(-1, 1)`.
pub fn jacobi_sign_changes(spec: &WavefunctionSpec, samples: usize) -> Result<usize> {
    let p = spec.jacobi_params()?;
    let mut changes = 0;
    let mut prev: Option<f64> = None;
    for i in 1..samples {
        let z = -1.0 + 2.0 * i as f64 / samples as f64;
        let v = jacobi(&p, z);
        if v == 0.0 {
            continue;
        }
        if let Some(pv) = prev {
            if (pv < 0.0) != (v < 0.0) {
                changes += 1;
            }
        }
        prev = Some(v);
    }
    Ok(changes)
}
