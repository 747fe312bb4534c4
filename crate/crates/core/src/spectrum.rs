//! Bound-state energies: the classical closed form, the fractional implicit
//! solve, unit conversion and the nuclear parametrization.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gfd::FractionalOrder;
use crate::nucore::{energy_residual, NuIntermediates, PiSign, WChoice, WellShape};
use crate::par::Execution;

/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.326_980_4;

/// Nucleon mass used as the default reduced mass, MeV/c².
pub const NUCLEON_MASS: f64 = 939.0;

/// Physical parameters of the generalized Woods-Saxon well
/// `V(r) = -V0/(1 + q e^{2β1 r}) - c e^{2β1 r}/(1 + q e^{2β1 r})²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    /// Depth scale, MeV.
    pub v0: f64,
    pub q: f64,
    /// Surface term strength, MeV.
    pub c: f64,
    /// fm⁻¹.
    pub beta1: f64,
    /// Reduced mass, MeV/c².
    pub mu: f64,
}

impl PotentialParams {
    pub fn new(v0: f64, q: f64, c: f64, beta1: f64, mu: f64) -> Result<Self> {
        if !(q > 0.0) || !(beta1 > 0.0) || !(mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "q, beta1 and mu must be positive (q = {q}, beta1 = {beta1}, mu = {mu})"
            )));
        }
        if !v0.is_finite() || !c.is_finite() || !q.is_finite() || !beta1.is_finite() || !mu.is_finite() {
            return Err(Error::InvalidParameter("potential parameters must be finite".into()));
        }
        Ok(Self { v0, q, c, beta1, mu })
    }

    /// Builds physical parameters that reproduce a dimensionless shape.
    pub fn from_shape(shape: &WellShape, beta1: f64, mu: f64) -> Result<Self> {
        let scale = 2.0 * HBAR_C * HBAR_C * beta1 * beta1 / mu;
        Self::new(shape.beta_pot * scale, shape.q, shape.gamma_p * scale, beta1, mu)
    }

    /// `2 (ħc)² β1² / μ`, the MeV value of one dimensionless unit.
    pub fn energy_scale(&self) -> f64 {
        2.0 * HBAR_C * HBAR_C * self.beta1 * self.beta1 / self.mu
    }

    pub fn shape(&self) -> WellShape {
        let scale = self.energy_scale();
        WellShape {
            beta_pot: self.v0 / scale,
            gamma_p: self.c / scale,
            q: self.q,
        }
    }
}

/// `E = -2 (ħc)² β1² ε / μ`.
pub fn eps_to_energy(eps: f64, pp: &PotentialParams) -> f64 {
    -pp.energy_scale() * eps
}

pub fn energy_to_eps(energy_mev: f64, pp: &PotentialParams) -> f64 {
    -energy_mev / pp.energy_scale()
}

/// Woods-Saxon parameters from mass number, radius parameter and diffuseness:
/// `V0 = 40.5 + 0.13 A`, `β1 = 1/(2a)`, `q = exp(-r0 A^{1/3} / a)`.
pub fn nuclear_params(a_mass: f64, r0: f64, a_diff: f64, c: f64, mu: f64) -> Result<PotentialParams> {
    if !(a_mass >= 1.0) || !(r0 > 0.0) || !(a_diff > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need A >= 1, r0 > 0, a > 0 (A = {a_mass}, r0 = {r0}, a = {a_diff})"
        )));
    }
    let radius = nuclear_radius(a_mass, r0);
    PotentialParams::new(
        40.5 + 0.13 * a_mass,
        (-radius / a_diff).exp(),
        c,
        0.5 / a_diff,
        mu,
    )
}

/// `R = r0 A^{1/3}`.
pub fn nuclear_radius(a_mass: f64, r0: f64) -> f64 {
    r0 * a_mass.cbrt()
}

/// Sign of the `β/2` term in the classical closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MiddleSign {
    /// `(Λ/4 - β/Λ)²`
    Minus,
    /// `(Λ/4 + β/Λ)²`, the form printed with `+β/2`.
    Plus,
}

/// The default is the sign whose levels lie closer to the Numerov oracle on
/// the reference well.
impl Default for MiddleSign {
    fn default() -> Self {
        MiddleSign::Minus
    }
}

impl MiddleSign {
    pub fn value(self) -> f64 {
        match self {
            MiddleSign::Minus => -1.0,
            MiddleSign::Plus => 1.0,
        }
    }
}

/// `Λ = √(1 + 4γ/q) + 1 + 2n`.
pub fn classical_lambda(n: usize, q: f64, gamma_p: f64) -> Result<f64> {
    let inner = 1.0 + 4.0 * gamma_p / q;
    if !(inner >= 0.0) {
        return Err(Error::Domain(format!("1 + 4γ/q must be nonnegative, got {inner}")));
    }
    Ok(inner.sqrt() + 1.0 + 2.0 * n as f64)
}

/// Closed-form `ε_n = Λ²/16 + β²/Λ² ± β/2` at `α = β_frac = 1`.
pub fn classical_eps(n: usize, q: f64, beta_pot: f64, gamma_p: f64, sign: MiddleSign) -> Result<f64> {
    let lam = classical_lambda(n, q, gamma_p)?;
    let l2 = lam * lam;
    Ok(l2 / 16.0 + beta_pot * beta_pot / l2 + sign.value() * 0.5 * beta_pot)
}

/// Controls for the bracketing root search over `ε`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub grid_points: usize,
    /// Overrides the default `(0, hi]` window.
    pub window: Option<(f64, f64)>,
    pub exec: Execution,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            grid_points: 20_000,
            window: None,
            exec: Execution::default(),
        }
    }
}

/// Default search window `(0, hi]` with
/// `hi = max(100, 4β + 4γ/q + 4, (|β| + √(|γ|/q) + 2)²)`.
pub fn scan_window(shape: &WellShape) -> (f64, f64) {
    let b = shape.beta_pot;
    let g = shape.gamma_p / shape.q;
    let hi = [100.0, 4.0 * b + 4.0 * g + 4.0, (b.abs() + g.abs().sqrt() + 2.0).powi(2)]
        .into_iter()
        .fold(f64::MIN, f64::max);
    (0.0, hi)
}

/// A root of the quantization residual in dimensionless units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelSolution {
    pub n: usize,
    pub eps: f64,
    pub residual: f64,
    pub nu: NuIntermediates,
    pub window: (f64, f64),
}

/// Algebraic certificates re-evaluated on a solved level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub residual: f64,
    pub discriminant_gap: f64,
    pub max_square_gap: f64,
    pub t1_tau: f64,
}

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const DISCRIMINANT_TOL: f64 = 1e-10;
pub const SQUARE_TOL: f64 = 1e-9;

impl Certificate {
    pub fn of(level: &LevelSolution) -> Self {
        let nu = &level.nu;
        let max_square_gap = [0.0, 0.5, 1.0, 2.0]
            .into_iter()
            .map(|t| nu.perfect_square_gap(t).abs())
            .fold(0.0, f64::max);
        Self {
            residual: level.residual,
            discriminant_gap: nu.discriminant_gap(),
            max_square_gap,
            t1_tau: nu.t1_tau,
        }
    }

    pub fn passes(&self) -> bool {
        self.residual.abs() < RESIDUAL_TOL
            && self.discriminant_gap.abs() < DISCRIMINANT_TOL
            && self.max_square_gap < SQUARE_TOL
            && self.t1_tau < 0.0
    }
}

type BranchKey = (WChoice, PiSign);

fn branch_key(nu: &NuIntermediates) -> BranchKey {
    (nu.w_choice, nu.branch_sign)
}

fn residual_at(shape: &WellShape, fo: &FractionalOrder, n: usize, eps: f64) -> Option<(f64, NuIntermediates)> {
    energy_residual(&shape.at(eps), fo, n)
        .ok()
        .map(|r| (r.value, r.nu))
}

fn refine(
    shape: &WellShape,
    fo: &FractionalOrder,
    n: usize,
    mut lo: f64,
    mut f_lo: f64,
    mut hi: f64,
    key: BranchKey,
) -> Option<f64> {
    if f_lo == 0.0 {
        return Some(lo);
    }
    for _ in 0..200 {
        if hi - lo < 1e-12 * lo.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let (f_mid, nu) = residual_at(shape, fo, n, mid)?;
        if branch_key(&nu) != key {
            return None;
        }
        if f_mid == 0.0 {
            return Some(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Bisects between an infeasible and a feasible point for the outermost
/// feasible point on the feasible side's branch; returns it with its residual.
fn feasible_edge(
    shape: &WellShape,
    fo: &FractionalOrder,
    n: usize,
    mut outside: f64,
    mut inside: f64,
    key: BranchKey,
) -> Option<(f64, f64)> {
    for _ in 0..100 {
        let mid = 0.5 * (outside + inside);
        if mid == outside || mid == inside {
            break;
        }
        match residual_at(shape, fo, n, mid) {
            Some((_, nu)) if branch_key(&nu) == key => inside = mid,
            _ => outside = mid,
        }
    }
    residual_at(shape, fo, n, inside).map(|(f, _)| (inside, f))
}

/// Every certified root of `F(ε; n)` in the search window, ascending in `ε`.
pub fn solve_all_roots(n: usize, shape: &WellShape, fo: &FractionalOrder, opts: &SolveOptions) -> Result<Vec<LevelSolution>> {
    if opts.grid_points < 2 {
        return Err(Error::InvalidParameter("grid_points must be at least 2".into()));
    }
    let window = opts.window.unwrap_or_else(|| scan_window(shape));
    let (lo, hi) = window;
    if !(hi > lo) {
        return Err(Error::InvalidParameter(format!("empty eps window ({lo}, {hi}]")));
    }
    let step = (hi - lo) / opts.grid_points as f64;
    let samples = opts.exec.map_range(opts.grid_points, |i| {
        let eps = lo + step * (i + 1) as f64;
        (eps, residual_at(shape, fo, n, eps))
    });

    let mut brackets = Vec::new();
    for pair in samples.windows(2) {
        let (ea, ra) = &pair[0];
        let (eb, rb) = &pair[1];
        if let (Some((fa, na)), Some((fb, nb))) = (ra, rb) {
            if branch_key(na) != branch_key(nb) {
                continue;
            }
            if *fa == 0.0 || (*fa < 0.0) != (*fb < 0.0) {
                brackets.push((*ea, *fa, *eb, branch_key(na)));
            }
            continue;
        }
        // a root can sit between a feasibility edge and the first feasible sample
        let edge = match (ra, rb) {
            (None, Some((fb, nb))) => feasible_edge(shape, fo, n, *ea, *eb, branch_key(nb)).map(|e| (e, *eb, *fb)),
            (Some((fa, na)), None) => feasible_edge(shape, fo, n, *eb, *ea, branch_key(na)).map(|e| (e, *ea, *fa)),
            _ => None,
        };
        if let Some(((e_edge, f_edge), e_in, f_in)) = edge {
            if (f_edge < 0.0) != (f_in < 0.0) {
                let key = residual_at(shape, fo, n, e_in).map(|(_, nu)| branch_key(&nu));
                if let Some(key) = key {
                    if e_edge < e_in {
                        brackets.push((e_edge, f_edge, e_in, key));
                    } else {
                        brackets.push((e_in, f_in, e_edge, key));
                    }
                }
            }
        }
    }

    let mut roots = Vec::new();
    for (a, fa, b, key) in brackets {
        let Some(eps) = refine(shape, fo, n, a, fa, b, key) else {
            continue;
        };
        let Some((residual, nu)) = residual_at(shape, fo, n, eps) else {
            continue;
        };
        // sign flips across a branch discontinuity are not roots
        if residual.abs() >= RESIDUAL_TOL {
            continue;
        }
        roots.push(LevelSolution {
            n,
            eps,
            residual,
            nu,
            window,
        });
    }
    Ok(roots)
}

/// Solves `L(ε) = L_n(ε)` for level `n`. When several roots exist the deepest
/// (largest `ε`) is returned.
pub fn solve_level(n: usize, shape: &WellShape, fo: &FractionalOrder, opts: &SolveOptions) -> Result<LevelSolution> {
    let roots = solve_all_roots(n, shape, fo, opts)?;
    roots
        .into_iter()
        .rfind(|r| r.eps > 0.0)
        .ok_or_else(|| Error::NoBoundState {
            n,
            reason: "no sign change of the quantization residual in the feasible eps window".into(),
        })
}

/// A solved level in physical units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLevel {
    pub n: usize,
    pub eps_n: f64,
    pub energy_mev: f64,
    pub residual: f64,
    pub feasible: bool,
    pub reason: Option<String>,
}

impl EnergyLevel {
    pub fn from_solution(sol: &LevelSolution, pp: &PotentialParams) -> Self {
        let cert = Certificate::of(sol);
        let feasible = cert.passes() && sol.eps > 0.0;
        Self {
            n: sol.n,
            eps_n: sol.eps,
            energy_mev: eps_to_energy(sol.eps, pp),
            residual: sol.residual,
            feasible,
            reason: (!feasible).then(|| format!("certificate failed: {cert:?}")),
        }
    }
}

pub fn solve_eps_fractional(n: usize, pp: &PotentialParams, fo: &FractionalOrder, opts: &SolveOptions) -> Result<EnergyLevel> {
    let sol = solve_level(n, &pp.shape(), fo, opts)?;
    Ok(EnergyLevel::from_solution(&sol, pp))
}

/// Largest level cap accepted by [`enumerate_levels`].
pub const MAX_LEVEL_CAP: usize = 50;

/// Solves `n = 0, 1, …` until the first level without a bound state or the cap.
pub fn enumerate_solutions(
    shape: &WellShape,
    fo: &FractionalOrder,
    n_max_cap: usize,
    opts: &SolveOptions,
) -> Result<Vec<LevelSolution>> {
    if n_max_cap > MAX_LEVEL_CAP {
        return Err(Error::InvalidParameter(format!(
            "n_max_cap must be <= {MAX_LEVEL_CAP}, got {n_max_cap}"
        )));
    }
    let inner = SolveOptions {
        exec: Execution::Sequential,
        ..*opts
    };
    let results = opts
        .exec
        .map_range(n_max_cap + 1, |n| solve_level(n, shape, fo, &inner));
    let mut levels = Vec::new();
    for r in results {
        match r {
            Ok(sol) if Certificate::of(&sol).passes() => levels.push(sol),
            Ok(_) | Err(Error::NoBoundState { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(levels)
}

pub fn enumerate_levels(
    pp: &PotentialParams,
    fo: &FractionalOrder,
    n_max_cap: usize,
    opts: &SolveOptions,
) -> Result<Vec<EnergyLevel>> {
    Ok(enumerate_solutions(&pp.shape(), fo, n_max_cap, opts)?
        .iter()
        .map(|s| EnergyLevel::from_solution(s, pp))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn shape(beta: f64, gamma: f64, q: f64) -> WellShape {
        WellShape::new(beta, gamma, q).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        assert_relative_eq!(classical_eps(0, 1.0, 25.0, 0.0, MiddleSign::Plus).unwrap(), 169.0, max_relative = 1e-14);
        assert_relative_eq!(classical_eps(0, 1.0, 25.0, 0.0, MiddleSign::Minus).unwrap(), 144.0, max_relative = 1e-14);
        assert_relative_eq!(classical_eps(0, 1.0, 0.0, 0.0, MiddleSign::Minus).unwrap(), 0.25, max_relative = 1e-14);
        assert!(classical_eps(0, 1.0, 1.0, -1.0, MiddleSign::Minus).is_err());
    }

    #[test]
    fn closed_form_is_a_perfect_square_for_both_signs() {
        for n in 0..6 {
            for (q, beta, gamma) in [(0.5, 9.0, 0.0), (1.0, 25.0, 1.0), (2.0, 49.0, 5.0), (1.3, 0.7, 0.2)] {
                let lam = classical_lambda(n, q, gamma).unwrap();
                let minus = classical_eps(n, q, beta, gamma, MiddleSign::Minus).unwrap();
                let plus = classical_eps(n, q, beta, gamma, MiddleSign::Plus).unwrap();
                let sq_m = (lam / 4.0 - beta / lam).powi(2);
                let sq_p = (lam / 4.0 + beta / lam).powi(2);
                assert!((minus - sq_m).abs() <= 1e-13 * sq_m.max(1.0));
                assert!((plus - sq_p).abs() <= 1e-13 * sq_p.max(1.0));
            }
        }
    }

    #[test]
    fn eps_to_energy_examples() {
        let pp = PotentialParams::new(50.0, 1.0, 0.0, 1.0 / 1.3, 939.0).unwrap();
        assert_eq!(eps_to_energy(0.0, &pp), 0.0);
        let e1 = eps_to_energy(1.0, &pp);
        assert!((e1 + 49.07).abs() < 0.01, "{e1}");
        assert_relative_eq!(eps_to_energy(2.0, &pp), 2.0 * e1, max_relative = 1e-15);
        assert_relative_eq!(energy_to_eps(e1, &pp), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn nuclear_params_examples() {
        let pp = nuclear_params(56.0, 1.285, 0.65, 0.0, NUCLEON_MASS).unwrap();
        assert_relative_eq!(pp.v0, 47.78, max_relative = 1e-12);
        let r = nuclear_radius(56.0, 1.285);
        assert!((r - 4.916).abs() < 1e-3);
        assert!((pp.q - 5.2e-4).abs() < 0.05e-4, "{}", pp.q);
        // q e^{2β1 r} = e^{(r - R)/a}
        for x in [0.0, 2.0, 7.5] {
            let lhs = pp.q * (2.0 * pp.beta1 * x).exp();
            let rhs = ((x - r) / 0.65).exp();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
        }
        assert!(nuclear_params(0.5, 1.285, 0.65, 0.0, NUCLEON_MASS).is_err());
    }

    #[test]
    fn shape_round_trip() {
        let s = shape(25.0, 1.0, 2.0);
        let pp = PotentialParams::from_shape(&s, 0.8, 939.0).unwrap();
        let back = pp.shape();
        assert_relative_eq!(back.beta_pot, 25.0, max_relative = 1e-14);
        assert_relative_eq!(back.gamma_p, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn classical_solve_lands_on_closed_form() {
        let fo = FractionalOrder::classical();
        let sol = solve_level(0, &shape(25.0, 0.0, 1.0), &fo, &SolveOptions::default()).unwrap();
        let plus = classical_eps(0, 1.0, 25.0, 0.0, MiddleSign::Plus).unwrap();
        assert!((sol.eps - plus).abs() < 1e-8 * plus);
        assert!(Certificate::of(&sol).passes());
    }

    #[test]
    fn zero_depth_well_has_no_bound_state() {
        let fo = FractionalOrder::classical();
        let err = solve_level(0, &shape(0.0, 0.0, 1.0), &fo, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoBoundState { n: 0, .. }));
        let pp = PotentialParams::new(0.0, 1.0, 0.0, 0.77, 939.0).unwrap();
        assert!(enumerate_levels(&pp, &fo, 5, &SolveOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn fractional_solve_approaches_classical() {
        let s = shape(25.0, 0.0, 1.0);
        let opts = SolveOptions::default();
        let eps: Vec<f64> = [0.9, 0.95, 0.99, 0.999, 1.0]
            .iter()
            .map(|&a| {
                let fo = FractionalOrder::new(a, 1.0).unwrap();
                let sol = solve_level(0, &s, &fo, &opts).unwrap();
                assert!(sol.residual.abs() < 1e-9);
                sol.eps
            })
            .collect();
        let gaps: Vec<f64> = eps.iter().map(|e| (e - eps[4]).abs()).collect();
        for w in gaps.windows(2) {
            assert!(w[1] < w[0], "not converging: {eps:?}");
        }
        assert!(gaps[3] / eps[4] < 1e-3);
    }

    #[test]
    fn enumerate_terminates_and_is_stable() {
        let fo = FractionalOrder::classical();
        let pp = PotentialParams::from_shape(&shape(25.0, 0.0, 1.0), 0.77, 939.0).unwrap();
        let a = enumerate_levels(&pp, &fo, 10, &SolveOptions::default()).unwrap();
        let b = enumerate_levels(
            &pp,
            &fo,
            10,
            &SolveOptions {
                exec: Execution::Sequential,
                ..SolveOptions::default()
            },
        )
        .unwrap();
        assert_eq!(a, b);
        assert!(!a.is_empty() && a.len() < 10);
        for (n, lvl) in a.iter().enumerate() {
            assert_eq!(lvl.n, n);
            assert!(lvl.energy_mev < 0.0);
            assert!(lvl.feasible);
        }
    }

    #[test]
    fn level_cap_is_enforced() {
        let fo = FractionalOrder::classical();
        assert!(enumerate_solutions(&shape(25.0, 0.0, 1.0), &fo, 51, &SolveOptions::default()).is_err());
    }
}
