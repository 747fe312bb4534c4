//! Special functions and small numeric kernels shared by the solver.

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Gamma function on the positive real axis.
///
/// Lanczos approximation (g = 7, nine terms). Arguments below one half are
/// shifted up with `Γ(x) = Γ(x + 1) / x`, so no reflection is needed.
pub fn gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("gamma requires x > 0, got {x}")));
    }
    if x < 0.5 {
        return Ok(lanczos(x + 1.0) / x);
    }
    Ok(lanczos(x))
}

fn lanczos(x: f64) -> f64 {
    let z = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (z + k as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
}

/// Degree and exponents of a Jacobi polynomial `P_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    n: usize,
    a: f64,
    b: f64,
}

impl JacobiParams {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0) || !(b > -1.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "Jacobi exponents must exceed -1, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { n, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }
}

/// Evaluates `P_n^{(a,b)}(x)` with the three-term recurrence. Valid for any real `x`.
pub fn jacobi(p: &JacobiParams, x: f64) -> f64 {
    let (a, b) = (p.a, p.b);
    if p.n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = (a + 1.0) + 0.5 * (a + b + 2.0) * (x - 1.0);
    for k in 2..=p.n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let c0 = 2.0 * k * (k + a + b) * (s - 2.0);
        let c1 = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let c2 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = (c1 * cur - c2 * prev) / c0;
        prev = cur;
        cur = next;
    }
    cur
}

/// Composite Simpson rule over uniformly spaced samples with spacing `h`.
///
/// The sample count must be odd (an even number of intervals) and at least three.
pub fn simpson_samples(samples: &[f64], h: f64) -> Result<f64> {
    let intervals = samples.len().saturating_sub(1);
    if intervals < 2 || intervals % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Simpson needs an even interval count >= 2, got {intervals}"
        )));
    }
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in samples.iter().enumerate().take(intervals).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    Ok(h / 3.0 * (samples[0] + samples[intervals] + 4.0 * odd + 2.0 * even))
}

/// Composite Simpson estimate of `∫_lo^hi f`.
pub fn simpson<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, intervals: usize) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "Simpson needs lo < hi, got [{lo}, {hi}]"
        )));
    }
    if intervals < 2 || intervals % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "Simpson needs an even interval count >= 2, got {intervals}"
        )));
    }
    let h = (hi - lo) / intervals as f64;
    let samples: Vec<f64> = (0..=intervals).map(|i| f(lo + h * i as f64)).collect();
    simpson_samples(&samples, h)
}

/// Default finite-difference step, `1e-6 * max(1, |x|)`.
pub fn default_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// Symmetric difference quotient `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Second symmetric difference `(f(x+h) - 2f(x) + f(x-h)) / h²`.
pub fn second_central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// Stirling series for ln Γ after shifting the argument above 20.
    fn gamma_oracle(x: f64) -> f64 {
        let mut shift = 1.0;
        let mut z = x;
        while z < 20.0 {
            shift *= z;
            z += 1.0;
        }
        let zi = 1.0 / z;
        let zi2 = zi * zi;
        let series = zi
            * (1.0 / 12.0
                - zi2
                    * (1.0 / 360.0
                        - zi2 * (1.0 / 1260.0 - zi2 * (1.0 / 1680.0 - zi2 * (1.0 / 1188.0)))));
        let ln = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln() + series;
        ln.exp() / shift
    }

    #[test]
    fn gamma_examples() {
        assert_relative_eq!(gamma(1.0).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(gamma(5.0).unwrap(), 24.0, max_relative = 1e-14);
        assert_relative_eq!(
            gamma(0.5).unwrap(),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(gamma(0.0).is_err());
        assert!(gamma(-1.5).is_err());
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn gamma_matches_stirling_oracle() {
        let mut x = 0.01;
        while x <= 30.0 {
            let got = gamma(x).unwrap();
            let want = gamma_oracle(x);
            assert!(
                ((got - want) / want).abs() < 1e-12,
                "x = {x}: {got} vs {want}"
            );
            x += 0.0731;
        }
    }

    #[test]
    fn gamma_recurrence() {
        for x in [0.1, 0.5, 1.3, 7.7] {
            let lhs = gamma(x + 1.0).unwrap();
            let rhs = x * gamma(x).unwrap();
            assert!(((lhs - rhs) / rhs).abs() < 1e-12, "x = {x}");
        }
    }

    #[test]
    fn jacobi_examples() {
        let p0 = JacobiParams::new(0, 2.5, -0.3).unwrap();
        assert_eq!(jacobi(&p0, 17.0), 1.0);
        let p1 = JacobiParams::new(1, 0.0, 0.0).unwrap();
        assert_relative_eq!(jacobi(&p1, 0.5), 0.5, epsilon = 1e-15);
        let p2 = JacobiParams::new(2, 1.0, 1.0).unwrap();
        assert_relative_eq!(jacobi(&p2, 1.0), 3.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_rejects_bad_exponents() {
        assert!(JacobiParams::new(2, -1.0, 0.0).is_err());
        assert!(JacobiParams::new(2, 0.0, -1.2).is_err());
    }

    fn binomial(top: f64, k: usize) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (top - i as f64) / (i as f64 + 1.0))
    }

    #[test]
    fn jacobi_endpoint_identity() {
        for n in 0..=5 {
            for a in [0.0, 1.0, 2.0, 3.0] {
                for b in [0.0, 0.5, 4.0] {
                    let p = JacobiParams::new(n, a, b).unwrap();
                    let want = binomial(n as f64 + a, n);
                    assert_relative_eq!(jacobi(&p, 1.0), want, max_relative = 1e-12);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn jacobi_reflection(n in 0usize..=6, a in -0.9f64..5.0, b in -0.9f64..5.0, x in -1.5f64..1.5) {
            let pab = JacobiParams::new(n, a, b).unwrap();
            let pba = JacobiParams::new(n, b, a).unwrap();
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = jacobi(&pab, -x);
            let rhs = sign * jacobi(&pba, x);
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
        }

        #[test]
        fn jacobi_satisfies_its_ode(n in 0usize..=6, a in -0.5f64..4.0, b in -0.5f64..4.0, x in -0.9f64..0.9) {
            let p = JacobiParams::new(n, a, b).unwrap();
            let f = |z: f64| jacobi(&p, z);
            // five-point central stencils, exact through degree five
            let h = 1e-3;
            let d1 = (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h);
            let d2 = (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
                / (12.0 * h * h);
            let nf = n as f64;
            let residual = (1.0 - x * x) * d2 + (b - a - (a + b + 2.0) * x) * d1
                + nf * (nf + a + b + 1.0) * f(x);
            let scale = f(x).abs().max(1.0) * (nf * (nf + a + b + 1.0)).max(1.0);
            prop_assert!(residual.abs() < 1e-7 * scale, "residual {}", residual);
        }
    }

    #[test]
    fn simpson_examples() {
        assert_relative_eq!(simpson(|_| 1.0, 0.0, 1.0, 10).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            simpson(|x| x * x, 0.0, 1.0, 10).unwrap(),
            1.0 / 3.0,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            simpson(|x| (-x).exp(), 0.0, 5.0, 1000).unwrap(),
            1.0 - (-5.0f64).exp(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn simpson_rejects_odd_intervals() {
        assert!(simpson(|x| x, 0.0, 1.0, 9).is_err());
        assert!(simpson(|x| x, 0.0, 1.0, 0).is_err());
        assert!(simpson(|x| x, 1.0, 0.0, 10).is_err());
        assert!(simpson_samples(&[1.0, 2.0], 0.1).is_err());
    }

    #[test]
    fn central_diff_examples() {
        assert!((central_diff(|x| x * x, 3.0, 1e-5) - 6.0).abs() < 1e-8);
        assert_eq!(central_diff(|_| 4.2, 1.7, 1e-3), 0.0);
        assert!((central_diff(f64::sin, 0.0, default_step(0.0)) - 1.0).abs() < 1e-9);
    }
}
