//! Fractional Nikiforov-Uvarov algebra for the transformed Woods-Saxon equation.
//!
//! With `t = x^α` and `I⁻²` the inverse squared gamma ratio, the transformed
//! equation has
//!
//! ```text
//! τ̄_f(x) = (1 - α + I⁻²)(1 - q t)
//! σ_f(x) = x (1 - q t)
//! σ̃_f(x) = I⁻² (-ε q² t² + (2εq - βq - γ) t + β - ε)
//! ```
//!
//! Taking `K = w x^{α-1}` makes the expression under the square root of `π_f`
//! a quadratic in `t`,
//! `U(t; w) = (a0 - q w) t² + (b0 + w) t + c0`, and `(σ'_f - τ̄_f)/2 = g0 + g1 t`.
//! Every term of `λ = K + π'_f` and `λ_n = -n τ'_f - n(n-1)/2 σ''_f` carries the
//! factor `x^{α-1}`, so the quantization condition reduces to `L(ε) = L_n(ε)`
//! on the coefficients.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Expr, ExprTerm};
use crate::gfd::FractionalOrder;

/// Potential shape in dimensionless units: depth `β`, surface strength `γ`, deformation `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellShape {
    pub beta_pot: f64,
    pub gamma_p: f64,
    pub q: f64,
}

impl WellShape {
    pub fn new(beta_pot: f64, gamma_p: f64, q: f64) -> Result<Self> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::InvalidParameter(format!("q must be positive, got {q}")));
        }
        if !beta_pot.is_finite() || !gamma_p.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "beta_pot and gamma_p must be finite, got {beta_pot}, {gamma_p}"
            )));
        }
        Ok(Self {
            beta_pot,
            gamma_p,
            q,
        })
    }

    pub fn at(&self, eps: f64) -> DimensionlessParams {
        DimensionlessParams {
            eps,
            beta_pot: self.beta_pot,
            gamma_p: self.gamma_p,
            q: self.q,
        }
    }
}

/// `(ε, β, γ, q)`: energy, depth and surface strength scaled by `2ħ²β1²/μ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionlessParams {
    pub eps: f64,
    pub beta_pot: f64,
    pub gamma_p: f64,
    pub q: f64,
}

impl DimensionlessParams {
    pub fn new(eps: f64, beta_pot: f64, gamma_p: f64, q: f64) -> Result<Self> {
        let shape = WellShape::new(beta_pot, gamma_p, q)?;
        if !eps.is_finite() {
            return Err(Error::InvalidParameter(format!("eps must be finite, got {eps}")));
        }
        Ok(shape.at(eps))
    }

    pub fn shape(&self) -> WellShape {
        WellShape {
            beta_pot: self.beta_pot,
            gamma_p: self.gamma_p,
            q: self.q,
        }
    }
}

/// Why a parameter point admits no real NU branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Infeasibility {
    /// `c0 < 0`: the constant term of `π_f` would be imaginary.
    NegativeC0 { c0: f64 },
    /// The quadratic for `w` has complex roots.
    ComplexW { discriminant: f64 },
    /// No real candidate has `τ'_f < 0`.
    NoDescendingBranch,
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::NegativeC0 { c0 } => write!(f, "c0 = {c0:e} < 0"),
            Infeasibility::ComplexW { discriminant } => {
                write!(f, "complex w roots (discriminant {discriminant:e})")
            }
            Infeasibility::NoDescendingBranch => write!(f, "no branch with tau' < 0"),
        }
    }
}

/// Coefficients of `τ̄_f`, `σ_f` and `σ̃_f` in the variable `t = x^α`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedCoefficients {
    pub alpha: f64,
    pub q: f64,
    /// `1 - α + I⁻²`, so that `τ̄_f = tau_bar_mult · (1 - q t)`.
    pub tau_bar_mult: f64,
    /// `σ̃_f = st2 t² + st1 t + st0` (the `I⁻²` factor already applied).
    pub st2: f64,
    pub st1: f64,
    pub st0: f64,
}

impl TransformedCoefficients {
    pub fn tau_bar(&self, x: f64) -> f64 {
        self.tau_bar_mult * (1.0 - self.q * x.powf(self.alpha))
    }

    pub fn sigma(&self, x: f64) -> f64 {
        x * (1.0 - self.q * x.powf(self.alpha))
    }

    pub fn sigma_tilde(&self, x: f64) -> f64 {
        let t = x.powf(self.alpha);
        (self.st2 * t + self.st1) * t + self.st0
    }
}

pub fn transformed_coefficients(dp: &DimensionlessParams, fo: &FractionalOrder) -> TransformedCoefficients {
    let ii = fo.inv_i_sq();
    let (eps, beta, gamma, q) = (dp.eps, dp.beta_pot, dp.gamma_p, dp.q);
    TransformedCoefficients {
        alpha: fo.alpha(),
        q,
        tau_bar_mult: 1.0 - fo.alpha() + ii,
        st2: -ii * eps * q * q,
        st1: ii * (2.0 * eps * q - beta * q - gamma),
        st0: ii * (beta - eps),
    }
}

/// `(σ'_f - τ̄_f)/2 = g0 + g1 t` and `U(t; w) = (a0 - q w) t² + (b0 + w) t + c0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnderRoot {
    pub g0: f64,
    pub g1: f64,
    pub a0: f64,
    pub b0: f64,
    pub c0: f64,
}

impl UnderRoot {
    /// `U(t; w)`.
    pub fn eval(&self, q: f64, w: f64, t: f64) -> f64 {
        ((self.a0 - q * w) * t + (self.b0 + w)) * t + self.c0
    }

    /// `(b0 + w)² - 4 c0 (a0 - q w)`, the `t`-discriminant of `U`.
    pub fn t_discriminant(&self, q: f64, w: f64) -> f64 {
        let b = self.b0 + w;
        b * b - 4.0 * self.c0 * (self.a0 - q * w)
    }
}

pub fn quadratic_under_root(dp: &DimensionlessParams, fo: &FractionalOrder) -> UnderRoot {
    let ii = fo.inv_i_sq();
    let alpha = fo.alpha();
    let (eps, beta, gamma, q) = (dp.eps, dp.beta_pot, dp.gamma_p, dp.q);
    let g0 = 0.5 * (alpha - ii);
    let g1 = 0.5 * (ii - 2.0 * alpha) * q;
    UnderRoot {
        g0,
        g1,
        a0: g1 * g1 + ii * eps * q * q,
        b0: 2.0 * g0 * g1 - ii * (2.0 * eps * q - beta * q - gamma),
        c0: g0 * g0 + ii * (eps - beta),
    }
}

/// Roots of `w² + (2 b0 + 4 c0 q) w + (b0² - 4 a0 c0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WRoots {
    pub plus: f64,
    pub minus: f64,
    /// Discriminant of the quadratic in `w`; negative means the roots are
    /// complex and `plus`/`minus` hold the shared real part.
    pub discriminant: f64,
}

impl WRoots {
    pub fn is_real(&self) -> bool {
        self.discriminant >= 0.0
    }
}

pub fn double_zero_w(u: &UnderRoot, q: f64) -> WRoots {
    let lin = 2.0 * u.b0 + 4.0 * u.c0 * q;
    let constant = u.b0 * u.b0 - 4.0 * u.a0 * u.c0;
    // lin² - 4·constant, expanded to avoid cancellation
    let discriminant = 16.0 * u.c0 * (u.a0 + q * u.b0 + q * q * u.c0);
    if discriminant < 0.0 {
        let re = -0.5 * lin;
        return WRoots {
            plus: re,
            minus: re,
            discriminant,
        };
    }
    let sq = discriminant.sqrt();
    let big = -0.5 * (lin + lin.signum() * sq);
    let (r1, r2) = if big == 0.0 {
        (0.0, -lin)
    } else {
        (big, constant / big)
    };
    WRoots {
        plus: r1.max(r2),
        minus: r1.min(r2),
        discriminant,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WChoice {
    Minus,
    Plus,
}

/// Outer sign in front of the square root of `π_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PiSign {
    Minus,
    Plus,
}

impl PiSign {
    pub fn value(self) -> f64 {
        match self {
            PiSign::Minus => -1.0,
            PiSign::Plus => 1.0,
        }
    }
}

/// The selected NU branch and everything derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NuIntermediates {
    pub under_root: UnderRoot,
    pub q: f64,
    pub alpha: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    pub w_choice: WChoice,
    pub w_selected: f64,
    pub branch_sign: PiSign,
    /// `sign(b0 + w)`, fixes the cross term of the perfect square.
    pub root_sign: f64,
    pub pi0: f64,
    pub pi1: f64,
    pub t0_tau: f64,
    pub t1_tau: f64,
    /// `L = w + α·pi1`, with `λ = L · x^{α-1}`.
    pub lambda_coeff: f64,
}

impl NuIntermediates {
    /// `√(a0 - q w)` for the selected `w`.
    pub fn slope_root(&self) -> f64 {
        (self.under_root.a0 - self.q * self.w_selected).max(0.0).sqrt()
    }

    pub fn const_root(&self) -> f64 {
        self.under_root.c0.max(0.0).sqrt()
    }

    pub fn pi(&self, x: f64) -> f64 {
        self.pi0 + self.pi1 * x.powf(self.alpha)
    }

    pub fn tau(&self, x: f64) -> f64 {
        self.t0_tau + self.t1_tau * x.powf(self.alpha)
    }

    /// Relative `t`-discriminant of `U(t; w_selected)`; zero for a double zero.
    pub fn discriminant_gap(&self) -> f64 {
        let u = &self.under_root;
        u.t_discriminant(self.q, self.w_selected) / u.b0.powi(2).max(1.0)
    }

    /// `U(t; w) - (√(a0 - q w) t + s √c0)²`.
    pub fn perfect_square_gap(&self, t: f64) -> f64 {
        let sq = self.slope_root() * t + self.root_sign * self.const_root();
        self.under_root.eval(self.q, self.w_selected, t) - sq * sq
    }
}

fn clamp_tiny_negative(v: f64, scale: f64) -> f64 {
    if v < 0.0 && v > -1e-12 * scale.max(1.0) {
        0.0
    } else {
        v
    }
}

/// Picks the `(w, ±)` candidate with `τ'_f < 0`, preferring `(w-, -)`.
pub fn select_pi_branch(
    u: &UnderRoot,
    roots: &WRoots,
    fo: &FractionalOrder,
    q: f64,
) -> std::result::Result<NuIntermediates, Infeasibility> {
    let c0 = clamp_tiny_negative(u.c0, u.g0 * u.g0);
    if c0 < 0.0 {
        return Err(Infeasibility::NegativeC0 { c0: u.c0 });
    }
    if !roots.is_real() {
        return Err(Infeasibility::ComplexW {
            discriminant: roots.discriminant,
        });
    }
    let alpha = fo.alpha();
    let kappa = 1.0 - alpha + fo.inv_i_sq();
    let sqrt_c0 = c0.sqrt();
    let order = [
        (WChoice::Minus, PiSign::Minus),
        (WChoice::Minus, PiSign::Plus),
        (WChoice::Plus, PiSign::Minus),
        (WChoice::Plus, PiSign::Plus),
    ];
    for (choice, sign) in order {
        let w = match choice {
            WChoice::Minus => roots.minus,
            WChoice::Plus => roots.plus,
        };
        let slope_sq = clamp_tiny_negative(u.a0 - q * w, u.a0.abs());
        if slope_sq < 0.0 {
            continue;
        }
        let root_sign = if u.b0 + w >= 0.0 { 1.0 } else { -1.0 };
        let sg = sign.value();
        let pi0 = u.g0 + sg * root_sign * sqrt_c0;
        let pi1 = u.g1 + sg * slope_sq.sqrt();
        let t1_tau = -kappa * q + 2.0 * pi1;
        if t1_tau >= 0.0 {
            continue;
        }
        return Ok(NuIntermediates {
            under_root: *u,
            q,
            alpha,
            w_plus: roots.plus,
            w_minus: roots.minus,
            w_choice: choice,
            w_selected: w,
            branch_sign: sign,
            root_sign,
            pi0,
            pi1,
            t0_tau: kappa + 2.0 * pi0,
            t1_tau,
            lambda_coeff: w + alpha * pi1,
        });
    }
    Err(Infeasibility::NoDescendingBranch)
}

/// Full pipeline at one parameter point.
pub fn nu_branch(
    dp: &DimensionlessParams,
    fo: &FractionalOrder,
) -> std::result::Result<NuIntermediates, Infeasibility> {
    let u = quadratic_under_root(dp, fo);
    let roots = double_zero_w(&u, dp.q);
    select_pi_branch(&u, &roots, fo, dp.q)
}

/// The `x`-independent coefficients of `λ` and `λ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaCoefficients {
    pub l: f64,
    pub ln: f64,
}

pub fn lambda_coefficients(nu: &NuIntermediates, fo: &FractionalOrder, q: f64, n: usize) -> LambdaCoefficients {
    let a = fo.alpha();
    let nf = n as f64;
    LambdaCoefficients {
        l: nu.w_selected + a * nu.pi1,
        ln: -nf * a * nu.t1_tau + 0.5 * nf * (nf - 1.0) * q * a * (1.0 + a),
    }
}

/// `λ` and `λ_n` at a point `x`, differentiating `π_f`, `τ_f` and `σ_f` in `x`
/// directly instead of using the factored coefficients.
pub fn lambda_at(nu: &NuIntermediates, fo: &FractionalOrder, q: f64, n: usize, x: f64) -> (f64, f64) {
    let a = fo.alpha();
    let k = ExprTerm::new(nu.w_selected, a - 1.0, 0.0).eval(x, q, a);
    let pi = Expr::new(
        q,
        a,
        vec![ExprTerm::new(nu.pi0, 0.0, 0.0), ExprTerm::new(nu.pi1, a, 0.0)],
    );
    let tau = Expr::new(
        q,
        a,
        vec![ExprTerm::new(nu.t0_tau, 0.0, 0.0), ExprTerm::new(nu.t1_tau, a, 0.0)],
    );
    let sigma = Expr::single(q, a, ExprTerm::new(1.0, 1.0, 1.0));
    let nf = n as f64;
    let lambda = k + pi.derivative().eval(x);
    let lambda_n = -nf * tau.derivative().eval(x) - 0.5 * nf * (nf - 1.0) * sigma.nth_derivative(2).eval(x);
    (lambda, lambda_n)
}

/// `F(ε) = L - L_n` together with the branch it was evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    pub nu: NuIntermediates,
}

pub fn energy_residual(
    dp: &DimensionlessParams,
    fo: &FractionalOrder,
    n: usize,
) -> std::result::Result<Residual, Infeasibility> {
    let nu = nu_branch(dp, fo)?;
    let lc = lambda_coefficients(&nu, fo, dp.q, n);
    Ok(Residual { value: lc.l - lc.ln, nu })
}
