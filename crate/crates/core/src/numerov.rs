//! Numerov shooting for the s-wave radial equation `u'' = (2μ/ħ²c²)(V - E) u`.
//!
//! Outward integration from `u(r_min) = 0`, `u(r_min + h) = h`. The number of
//! interior nodes at energy `E` equals the number of Dirichlet levels on
//! `[r_min, r_max]` below `E`, so level `n` is located by bisecting on the
//! node count.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectrum::{PotentialParams, HBAR_C};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub r_min: f64,
    pub r_max: f64,
    pub steps: usize,
}

impl Default for RadialGrid {
    fn default() -> Self {
        Self {
            r_min: 1e-4,
            r_max: 25.0,
            steps: 10_000,
        }
    }
}

impl RadialGrid {
    pub fn new(r_min: f64, r_max: f64, steps: usize) -> Result<Self> {
        if !(r_min > 0.0) || !(r_max > r_min) || steps < 100 {
            return Err(Error::InvalidParameter(format!(
                "grid needs 0 < r_min < r_max and steps >= 100 (got {r_min}, {r_max}, {steps})"
            )));
        }
        Ok(Self { r_min, r_max, steps })
    }

    pub fn h(&self) -> f64 {
        (self.r_max - self.r_min) / self.steps as f64
    }

    pub fn r(&self, i: usize) -> f64 {
        self.r_min + self.h() * i as f64
    }

    /// Same interval with the step halved.
    pub fn refined(&self) -> Self {
        Self {
            steps: 2 * self.steps,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingResult {
    pub energy_mev: f64,
    pub nodes: usize,
    /// `u(r_max) / max |u|` at the returned energy.
    pub boundary_mismatch: f64,
    pub converged: bool,
}

/// `V(r) = -V0/(1 + q e^{2β1 r}) - c e^{2β1 r}/(1 + q e^{2β1 r})²`, MeV.
pub fn potential_eval(pp: &PotentialParams, r: f64) -> f64 {
    let e = (2.0 * pp.beta1 * r).exp();
    if !e.is_finite() {
        return 0.0;
    }
    let d = 1.0 + pp.q * e;
    -pp.v0 / d - pp.c * e / (d * d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Integration {
    pub r: Vec<f64>,
    pub u: Vec<f64>,
    pub nodes: usize,
    pub mismatch: f64,
}

const RESCALE_AT: f64 = 1e100;

struct Stepper<'a, V> {
    v: &'a V,
    k: f64,
    energy: f64,
    grid: RadialGrid,
    h2: f64,
}

impl<'a, V: Fn(f64) -> f64> Stepper<'a, V> {
    fn new(v: &'a V, mu: f64, energy: f64, grid: RadialGrid) -> Self {
        let h = grid.h();
        Self {
            v,
            k: 2.0 * mu / (HBAR_C * HBAR_C),
            energy,
            grid,
            h2: h * h,
        }
    }

    fn f(&self, i: usize) -> f64 {
        let r = self.grid.r(i);
        self.k * ((self.v)(r) - self.energy)
    }

    /// Runs the recurrence, handing each new sample to `sink`. Returns
    /// `(nodes, u_end, max |u|)` after any rescaling.
    fn run(&self, mut sink: impl FnMut(usize, f64, f64)) -> (usize, f64, f64) {
        let h = self.grid.h();
        let mut u_prev = 0.0;
        let mut u_cur = h;
        let mut f_prev = self.f(0);
        let mut f_cur = self.f(1);
        sink(0, u_prev, 1.0);
        sink(1, u_cur, 1.0);
        let mut nodes = 0;
        let mut max_abs = u_cur.abs();
        for i in 2..=self.grid.steps {
            let f_next = self.f(i);
            let u_next = (2.0 * u_cur * (1.0 + 5.0 * self.h2 * f_cur / 12.0)
                - u_prev * (1.0 - self.h2 * f_prev / 12.0))
                / (1.0 - self.h2 * f_next / 12.0);
            let crossed = u_next != 0.0 && u_cur != 0.0 && (u_next < 0.0) != (u_cur < 0.0);
            let touched_zero = u_cur == 0.0 && u_prev != 0.0 && (u_next < 0.0) != (u_prev < 0.0);
            if crossed || touched_zero {
                nodes += 1;
            }
            u_prev = u_cur;
            u_cur = u_next;
            f_prev = f_cur;
            f_cur = f_next;
            let mut scale = 1.0;
            if u_cur.abs() > RESCALE_AT {
                scale = 1.0 / RESCALE_AT;
                u_prev *= scale;
                u_cur *= scale;
                max_abs *= scale;
            }
            max_abs = max_abs.max(u_cur.abs());
            sink(i, u_cur, scale);
        }
        (nodes, u_cur, max_abs)
    }
}

/// Integrates outward at `energy` and returns the samples.
pub fn numerov_integrate<V: Fn(f64) -> f64>(v: &V, mu: f64, energy: f64, grid: &RadialGrid) -> Integration {
    let stepper = Stepper::new(v, mu, energy, *grid);
    let mut u = Vec::with_capacity(grid.steps + 1);
    let (nodes, u_end, max_abs) = stepper.run(|_, val, scale| {
        if scale != 1.0 {
            for s in u.iter_mut() {
                *s *= scale;
            }
        }
        u.push(val);
    });
    let r = (0..=grid.steps).map(|i| grid.r(i)).collect();
    Integration {
        r,
        u,
        nodes,
        mismatch: if max_abs > 0.0 { u_end / max_abs } else { 0.0 },
    }
}

fn shoot<V: Fn(f64) -> f64>(v: &V, mu: f64, energy: f64, grid: &RadialGrid) -> (usize, f64) {
    let (nodes, u_end, max_abs) = Stepper::new(v, mu, energy, *grid).run(|_, _, _| {});
    (nodes, if max_abs > 0.0 { u_end / max_abs } else { 0.0 })
}

/// Largest level index accepted by [`find_spectrum`].
pub const MAX_SHOOTING_LEVEL: usize = 20;
pub const ENERGY_TOL: f64 = 1e-8;

/// Smallest sampled potential value on the grid.
pub fn potential_min<V: Fn(f64) -> f64>(v: &V, grid: &RadialGrid) -> f64 {
    (0..=grid.steps).map(|i| v(grid.r(i))).fold(f64::INFINITY, f64::min)
}

/// Levels `0..=n_max` with energies in `(e_lo, e_hi)`; missing levels are skipped.
pub fn find_spectrum<V>(
    v: &V,
    mu: f64,
    grid: &RadialGrid,
    n_max: usize,
    window: (f64, f64),
    exec: Execution,
) -> Result<Vec<ShootingResult>>
where
    V: Fn(f64) -> f64 + Sync,
{
    if n_max > MAX_SHOOTING_LEVEL {
        return Err(Error::InvalidParameter(format!(
            "n_max must be <= {MAX_SHOOTING_LEVEL}, got {n_max}"
        )));
    }
    let (e_lo, e_hi) = window;
    if !(e_hi > e_lo) {
        return Err(Error::InvalidParameter(format!("empty energy window ({e_lo}, {e_hi})")));
    }
    let top_nodes = shoot(v, mu, e_hi, grid).0;
    let levels = exec.map_range(n_max + 1, |n| {
        if top_nodes <= n {
            return None;
        }
        let (mut lo, mut hi) = (e_lo, e_hi);
        while hi - lo > ENERGY_TOL {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if shoot(v, mu, mid, grid).0 > n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let energy = 0.5 * (lo + hi);
        let (nodes, mismatch) = shoot(v, mu, energy, grid);
        Some(ShootingResult {
            energy_mev: energy,
            nodes: nodes.min(n),
            boundary_mismatch: mismatch,
            converged: hi - lo <= 2.0 * ENERGY_TOL,
        })
    });
    Ok(levels.into_iter().flatten().collect())
}

/// Bound s-wave levels of the generalized Woods-Saxon well, `E ∈ (V_min, 0)`.
pub fn find_ws_spectrum(pp: &PotentialParams, grid: &RadialGrid, n_max: usize, exec: Execution) -> Result<Vec<ShootingResult>> {
    let v = |r: f64| potential_eval(pp, r);
    let v_min = potential_min(&v, grid);
    if v_min >= 0.0 {
        return Ok(Vec::new());
    }
    find_spectrum(&v, pp.mu, grid, n_max, (v_min, 0.0), exec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{nuclear_params, nuclear_radius, NUCLEON_MASS};
    use std::f64::consts::PI;

    const MU: f64 = 939.0;

    #[test]
    fn potential_limits() {
        let pp = nuclear_params(56.0, 1.285, 0.65, 10.0, NUCLEON_MASS).unwrap();
        assert!(potential_eval(&pp, 200.0).abs() < 1e-30);
        assert_eq!(potential_eval(&pp, 1e6), 0.0);
        let tiny_q = PotentialParams::new(50.0, 1e-12, 0.0, 0.77, MU).unwrap();
        assert!((potential_eval(&tiny_q, 1.0) + 50.0).abs() < 1e-9);
        let bare = nuclear_params(56.0, 1.285, 0.65, 0.0, NUCLEON_MASS).unwrap();
        let r = nuclear_radius(56.0, 1.285);
        assert!((potential_eval(&bare, r) + 23.89).abs() < 1e-9);
    }

    #[test]
    fn free_decay_has_no_nodes() {
        let grid = RadialGrid::new(1e-4, 10.0, 1000).unwrap();
        let out = numerov_integrate(&|_| 0.0, MU, -5.0, &grid);
        assert_eq!(out.nodes, 0);
        assert!(out.u.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn box_ground_state() {
        let l = 5.0;
        let grid = RadialGrid::new(1e-4, l, 10_000).unwrap();
        let floor = -100.0;
        let levels = find_spectrum(&|_| floor, MU, &grid, 1, (floor, 0.0), Execution::default()).unwrap();
        let want = PI * PI * HBAR_C * HBAR_C / (2.0 * MU * l * l);
        assert!((want - 8.19).abs() < 0.01);
        let got = levels[0].energy_mev - floor;
        assert!(((got - want) / want).abs() < 1e-3, "{got} vs {want}");
        assert!(levels.iter().all(|l| l.converged));
    }

    #[test]
    fn oscillator_levels() {
        let hw = 10.0;
        let grid = RadialGrid::new(1e-4, 12.0, 10_000).unwrap();
        let floor = -100.0;
        let v = |r: f64| 0.5 * MU * hw * hw * r * r / (HBAR_C * HBAR_C) + floor;
        let levels = find_spectrum(&v, MU, &grid, 1, (floor, floor + 50.0), Execution::default()).unwrap();
        for (n, lvl) in levels.iter().enumerate() {
            let want = (2.0 * n as f64 + 1.5) * hw;
            let got = lvl.energy_mev - floor;
            assert!(((got - want) / want).abs() < 2e-3, "n={n}: {got} vs {want}");
            assert_eq!(lvl.nodes, n);
        }
        assert_eq!(levels.len(), 2);
    }

    #[test]
    fn empty_well_has_no_levels() {
        let pp = PotentialParams::new(0.0, 1.0, 0.0, 0.77, MU).unwrap();
        assert!(find_ws_spectrum(&pp, &RadialGrid::default(), 5, Execution::Sequential).unwrap().is_empty());
    }

    #[test]
    fn ws_levels_converge_and_deepen() {
        let pp = nuclear_params(56.0, 1.285, 0.65, 0.0, NUCLEON_MASS).unwrap();
        let grid = RadialGrid::default();
        let coarse = find_ws_spectrum(&pp, &grid, 10, Execution::default()).unwrap();
        let fine = find_ws_spectrum(&pp, &grid.refined(), 10, Execution::default()).unwrap();
        assert!(!coarse.is_empty());
        assert_eq!(coarse.len(), fine.len());
        for (n, (a, b)) in coarse.iter().zip(&fine).enumerate() {
            assert_eq!(a.nodes, n);
            assert!((a.energy_mev - b.energy_mev).abs() < 1e-4);
            assert!(a.energy_mev < 0.0 && a.energy_mev > -pp.v0);
        }
        let deeper = PotentialParams { v0: 1.1 * pp.v0, ..pp };
        let deep = find_ws_spectrum(&deeper, &grid, 10, Execution::default()).unwrap();
        assert!(deep.len() >= coarse.len());
        for (a, b) in coarse.iter().zip(&deep) {
            assert!(b.energy_mev < a.energy_mev);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(RadialGrid::new(0.0, 10.0, 1000).is_err());
        assert!(RadialGrid::new(1e-4, 10.0, 50).is_err());
        let grid = RadialGrid::default();
        assert!(find_spectrum(&|_| -1.0, MU, &grid, 21, (-1.0, 0.0), Execution::Sequential).is_err());
    }
}
