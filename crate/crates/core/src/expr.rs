//! Exact differentiation of sums of `coef · x^e · (1 - q x^α)^f`.
//!
//! The family is closed under `d/dx`:
//! `d/dx [c x^e g^f] = c e x^{e-1} g^f - c f q α x^{e+α-1} g^{f-1}`, with `g = 1 - q x^α`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExprTerm {
    pub coef: f64,
    pub e: f64,
    pub f: f64,
}

impl ExprTerm {
    pub fn new(coef: f64, e: f64, f: f64) -> Self {
        Self { coef, e, f }
    }

    pub fn eval(&self, x: f64, q: f64, alpha: f64) -> f64 {
        if self.coef == 0.0 {
            return 0.0;
        }
        let g = 1.0 - q * x.powf(alpha);
        self.coef * x.powf(self.e) * g.powf(self.f)
    }
}

/// A sum of [`ExprTerm`]s sharing the same `q` and `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expr {
    q: f64,
    alpha: f64,
    terms: Vec<ExprTerm>,
}

impl Expr {
    pub fn new(q: f64, alpha: f64, terms: Vec<ExprTerm>) -> Self {
        let mut expr = Self { q, alpha, terms };
        expr.simplify();
        expr
    }

    pub fn single(q: f64, alpha: f64, term: ExprTerm) -> Self {
        Self::new(q, alpha, vec![term])
    }

    pub fn terms(&self) -> &[ExprTerm] {
        &self.terms
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.eval(x, self.q, self.alpha))
            .sum()
    }

    pub fn derivative(&self) -> Self {
        let (q, a) = (self.q, self.alpha);
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for t in &self.terms {
            if t.e != 0.0 {
                out.push(ExprTerm::new(t.coef * t.e, t.e - 1.0, t.f));
            }
            if t.f != 0.0 && q != 0.0 {
                out.push(ExprTerm::new(-t.coef * t.f * q * a, t.e + a - 1.0, t.f - 1.0));
            }
        }
        Self::new(q, a, out)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |acc, _| acc.derivative())
    }

    /// Merges terms with identical exponents and drops zero coefficients.
    fn simplify(&mut self) {
        let mut merged: Vec<ExprTerm> = Vec::with_capacity(self.terms.len());
        for t in self.terms.drain(..) {
            match merged.iter_mut().find(|m| m.e == t.e && m.f == t.f) {
                Some(m) => m.coef += t.coef,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coef != 0.0);
        self.terms = merged;
    }
}
