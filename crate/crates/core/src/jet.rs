//! Truncated univariate Taylor series ("jets").
//!
//! A jet of order `J` about `center` stores the Taylor coefficients
//! `c_0..=c_J` of a function `f(center + d)`; all arithmetic truncates at `d^(J+1)`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub center: f64,
    pub coeffs: Vec<f64>,
}

/// Jets in the generating-function variable xi.
pub type XiJet = Jet;

impl Jet {
    pub fn constant(center: f64, order: usize, value: f64) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { center, coeffs }
    }

    /// The identity function `d -> center + d`.
    pub fn variable(center: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = center;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { center, coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k`-th derivative at the center.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs.get(k).copied().unwrap_or(0.0) * fact
    }

    /// Evaluate the truncated series at `center + d`.
    pub fn eval(&self, d: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * d + c)
    }

    pub fn scale(&self, a: f64) -> Jet {
        Jet {
            center: self.center,
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
        }
    }

    pub fn add_scalar(&self, a: f64) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] += a;
        out
    }

    /// `1 / self`; the value must be nonzero.
    pub fn recip(&self) -> Jet {
        let n = self.coeffs.len();
        let a = &self.coeffs;
        let mut r = vec![0.0; n];
        r[0] = 1.0 / a[0];
        for k in 1..n {
            let s: f64 = (1..=k).map(|i| a[i] * r[k - i]).sum();
            r[k] = -s / a[0];
        }
        Jet {
            center: self.center,
            coeffs: r,
        }
    }

    pub fn div(&self, other: &Jet) -> Jet {
        self * &other.recip()
    }

    /// Square root; the value must be positive.
    pub fn sqrt(&self) -> Result<Jet> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::SqrtAtZero);
        }
        let n = a.len();
        let mut r = vec![0.0; n];
        r[0] = a[0].sqrt();
        for k in 1..n {
            let s: f64 = (1..k).map(|i| r[i] * r[k - i]).sum();
            r[k] = (a[k] - s) / (2.0 * r[0]);
        }
        Ok(Jet {
            center: self.center,
            coeffs: r,
        })
    }

    /// `exp(self)`.
    pub fn exp(&self) -> Jet {
        let a = &self.coeffs;
        let n = a.len();
        let mut r = vec![0.0; n];
        r[0] = a[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|i| i as f64 * a[i] * r[k - i]).sum();
            r[k] = s / k as f64;
        }
        Jet {
            center: self.center,
            coeffs: r,
        }
    }

    /// Multiply in place by the linear factor `(a + b d)`.
    pub fn mul_linear(&mut self, a: f64, b: f64) {
        let c = &mut self.coeffs;
        for k in (0..c.len()).rev() {
            let prev = if k > 0 { c[k - 1] } else { 0.0 };
            c[k] = a * c[k] + b * prev;
        }
    }

    /// Reinterpret this jet's coefficients as the Taylor series of an outer
    /// function `f` about `inner.value()` and return `f(inner)`.
    pub fn compose(outer: &Jet, inner: &Jet) -> Jet {
        let n = inner.coeffs.len();
        let mut delta = inner.clone();
        delta.coeffs[0] = 0.0;
        // Horner in the jet ring.
        let mut acc = Jet::constant(inner.center, n - 1, 0.0);
        for &c in outer.coeffs.iter().rev() {
            acc = &acc * &delta;
            acc.coeffs[0] += c;
        }
        acc
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        debug_assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        Jet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        debug_assert_eq!(self.coeffs.len(), rhs.coeffs.len());
        Jet {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.coeffs.len().min(rhs.coeffs.len());
        let mut c = vec![0.0; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Jet {
            center: self.center,
            coeffs: c,
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &Jet, b: &Jet, tol: f64) -> bool {
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .all(|(x, y)| (x - y).abs() <= tol * (1.0 + x.abs().max(y.abs())))
    }

    fn jet_strategy() -> impl Strategy<Value = Jet> {
        prop::collection::vec(-3.0f64..3.0, 6).prop_map(|coeffs| Jet {
            center: 0.5,
            coeffs,
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in jet_strategy(), b in jet_strategy(), c in jet_strategy()) {
            prop_assert!(close(&(&a * &b), &(&b * &a), 1e-12));
            prop_assert!(close(&(&(&a * &b) * &c), &(&a * &(&b * &c)), 1e-10));
            prop_assert!(close(&(&a * &(&b + &c)), &(&(&a * &b) + &(&a * &c)), 1e-10));
            let one = Jet::constant(0.5, 5, 1.0);
            prop_assert!(close(&(&a * &one), &a, 1e-15));
        }

        #[test]
        fn reciprocal_and_sqrt(a in jet_strategy()) {
            let mut a = a;
            a.coeffs[0] = a.coeffs[0].abs() + 0.5;
            let one = Jet::constant(0.5, 5, 1.0);
            prop_assert!(close(&(&a * &a.recip()), &one, 1e-9));
            let r = a.sqrt().unwrap();
            prop_assert!(close(&(&r * &r), &a, 1e-9));
        }
    }

    #[test]
    fn derivatives_of_known_functions() {
        // exp(x) about 0.3.
        let x = Jet::variable(0.3, 8);
        let e = x.exp();
        for k in 0..=8 {
            assert!((e.derivative(k) - 0.3f64.exp()).abs() < 1e-13);
        }
        // sqrt(x (2 - x)) about 1: value 1, first derivative 0, second -1.
        let xi = Jet::variable(1.0, 4);
        let two_minus = (-&xi).add_scalar(2.0);
        let w = (&xi * &two_minus).sqrt().unwrap();
        assert!((w.value() - 1.0).abs() < 1e-15);
        assert!(w.derivative(1).abs() < 1e-15);
        assert!((w.derivative(2) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn composition_matches_direct() {
        // exp(sin-like polynomial) two ways.
        let x = Jet::variable(0.2, 6);
        let inner = &x * &x;
        let direct = inner.exp();
        let outer = Jet::variable(inner.value(), 6).exp();
        let composed = Jet::compose(&outer, &inner);
        assert!(close(&direct, &composed, 1e-13));
    }

    #[test]
    fn linear_factor_product() {
        let mut j = Jet::constant(0.0, 3, 1.0);
        j.mul_linear(1.0, -0.5);
        j.mul_linear(1.0, -0.25);
        assert_eq!(j.coeffs, vec![1.0, -0.75, 0.125, 0.0]);
    }
}
