//! Orthonormal Hermite and Laguerre wave functions.
//!
//! Hermite functions are orthonormal on the real line for the weight
//! `exp(-x^2)`, Laguerre functions on `[0, inf)` for `x^alpha exp(-x)`.
//! Both are produced by forward recurrences on the normalized functions with a
//! logarithmic scale carried separately, so neither overflow nor premature
//! underflow occurs for degrees in the thousands.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaveKind {
    Hermite,
    Laguerre { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFunctionFamily {
    pub kind: WaveKind,
    pub max_degree: usize,
}

const RESCALE: f64 = 1e150;

impl WaveFunctionFamily {
    pub fn hermite(max_degree: usize) -> Self {
        WaveFunctionFamily {
            kind: WaveKind::Hermite,
            max_degree,
        }
    }

    pub fn laguerre(alpha: f64, max_degree: usize) -> Result<Self> {
        if !(alpha > -1.0) {
            return Err(Error::OutOfRange {
                value: alpha,
                lo: -1.0,
                hi: f64::INFINITY,
            });
        }
        Ok(WaveFunctionFamily {
            kind: WaveKind::Laguerre { alpha },
            max_degree,
        })
    }

    /// Value of `phi_j(x)`.
    pub fn wave(&self, j: usize, x: f64) -> Result<f64> {
        if j > self.max_degree {
            return Err(Error::IndexOutOfRange {
                index: j,
                max: self.max_degree,
            });
        }
        self.check_domain(x)?;
        let mut out = vec![0.0; j + 1];
        self.fill(x, &mut out);
        Ok(out[j])
    }

    /// Values `phi_0(x), ..., phi_{len-1}(x)`.
    pub fn all(&self, len: usize, x: f64) -> Result<Vec<f64>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        if len - 1 > self.max_degree {
            return Err(Error::IndexOutOfRange {
                index: len - 1,
                max: self.max_degree,
            });
        }
        self.check_domain(x)?;
        let mut out = vec![0.0; len];
        self.fill(x, &mut out);
        Ok(out)
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        match self.kind {
            WaveKind::Laguerre { .. } if x < 0.0 || !x.is_finite() => Err(Error::OutOfRange {
                value: x,
                lo: 0.0,
                hi: f64::INFINITY,
            }),
            WaveKind::Hermite if !x.is_finite() => Err(Error::OutOfRange {
                value: x,
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }),
            _ => Ok(()),
        }
    }

    /// Natural log of `|phi_0(x)|`, or `-inf` where it vanishes.
    fn log_ground(&self, x: f64) -> f64 {
        match self.kind {
            WaveKind::Hermite => -0.5 * x * x - 0.25 * std::f64::consts::PI.ln(),
            WaveKind::Laguerre { alpha } => {
                if x == 0.0 {
                    if alpha == 0.0 {
                        -0.5 * libm::lgamma(alpha + 1.0)
                    } else if alpha > 0.0 {
                        f64::NEG_INFINITY
                    } else {
                        f64::INFINITY
                    }
                } else {
                    0.5 * alpha * x.ln() - 0.5 * x - 0.5 * libm::lgamma(alpha + 1.0)
                }
            }
        }
    }

    /// Runs the recurrence with unit start and a separately carried log-scale.
    fn fill(&self, x: f64, out: &mut [f64]) {
        let len = out.len();
        let log0 = self.log_ground(x);
        if log0 == f64::NEG_INFINITY {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        // Unscaled values u_j with phi_j = u_j * exp(scale); every time
        // |u| grows past RESCALE the stored history is rescaled.
        let mut u = vec![0.0; len];
        let mut scale = log0;
        u[0] = 1.0;
        // Indices whose stored value carries a different scale get their
        // own offset, applied when writing out.
        let mut offsets = vec![0.0f64; len];
        for j in 0..len - 1 {
            let prev = if j > 0 { u[j - 1] } else { 0.0 };
            let jf = j as f64;
            let next = match self.kind {
                WaveKind::Hermite => {
                    (2.0 / (jf + 1.0)).sqrt() * x * u[j] - (jf / (jf + 1.0)).sqrt() * prev
                }
                WaveKind::Laguerre { alpha } => {
                    ((2.0 * jf + alpha + 1.0 - x) * u[j] - (jf * (jf + alpha)).sqrt() * prev)
                        / ((jf + 1.0) * (jf + 1.0 + alpha)).sqrt()
                }
            };
            u[j + 1] = next;
            if next.abs() > RESCALE {
                // Values before j keep their offsets relative to the new scale.
                let shift = next.abs().ln();
                u[j] /= next.abs();
                u[j + 1] /= next.abs();
                for off in offsets.iter_mut().take(j) {
                    *off -= shift;
                }
                scale += shift;
            }
        }
        for j in 0..len {
            let lg = scale + offsets[j];
            out[j] = if u[j] == 0.0 { 0.0 } else { u[j] * lg.exp() };
        }
    }
}

/// Log-magnitude of `phi_j(x)` (useful for tail cutoffs); `-inf` at exact zeros.
pub fn log_abs_wave(family: &WaveFunctionFamily, j: usize, x: f64) -> Result<f64> {
    family.check_domain(x)?;
    let log0 = family.log_ground(x);
    if log0 == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let mut scale = log0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    for k in 0..j {
        let kf = k as f64;
        let next = match family.kind {
            WaveKind::Hermite => (2.0 / (kf + 1.0)).sqrt() * x * b - (kf / (kf + 1.0)).sqrt() * a,
            WaveKind::Laguerre { alpha } => {
                ((2.0 * kf + alpha + 1.0 - x) * b - (kf * (kf + alpha)).sqrt() * a)
                    / ((kf + 1.0) * (kf + 1.0 + alpha)).sqrt()
            }
        };
        a = b;
        b = next;
        let m = a.abs().max(b.abs());
        if m > RESCALE {
            a /= m;
            b /= m;
            scale += m.ln();
        }
    }
    Ok(if b == 0.0 {
        f64::NEG_INFINITY
    } else {
        scale + b.abs().ln()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussLegendre;
    use std::f64::consts::PI;

    #[test]
    fn ground_states() {
        let h = WaveFunctionFamily::hermite(5);
        for x in [-2.0, 0.0, 0.7, 3.0] {
            let want = PI.powf(-0.25) * (-x * x / 2.0f64).exp();
            assert!((h.wave(0, x).unwrap() - want).abs() < 1e-15);
        }
        let l = WaveFunctionFamily::laguerre(0.0, 5).unwrap();
        for x in [0.0, 0.5, 4.0, 20.0] {
            assert!((l.wave(0, x).unwrap() - (-x / 2.0f64).exp()).abs() < 1e-15);
        }
    }

    #[test]
    fn orthonormality_hermite() {
        let fam = WaveFunctionFamily::hermite(60);
        let rule = GaussLegendre::new(600);
        let (xs, ws) = rule.mapped(-18.0, 18.0);
        let vals: Vec<Vec<f64>> = xs.iter().map(|&x| fam.all(61, x).unwrap()).collect();
        for j in 0..=60 {
            for k in j..=60 {
                let s: f64 = vals.iter().zip(&ws).map(|(v, w)| w * v[j] * v[k]).sum();
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((s - want).abs() < 1e-10, "j={j} k={k} s={s}");
            }
        }
    }

    #[test]
    fn orthonormality_laguerre() {
        for alpha in [0.0, 3.0] {
            let fam = WaveFunctionFamily::laguerre(alpha, 60).unwrap();
            let rule = GaussLegendre::new(120);
            let mut xs = Vec::new();
            let mut ws = Vec::new();
            for panel in 0..10 {
                let (x, w) = rule.mapped(35.0 * panel as f64, 35.0 * (panel + 1) as f64);
                xs.extend(x);
                ws.extend(w);
            }
            let vals: Vec<Vec<f64>> = xs.iter().map(|&x| fam.all(61, x).unwrap()).collect();
            for j in 0..=60 {
                for k in j..=60 {
                    let s: f64 = vals.iter().zip(&ws).map(|(v, w)| w * v[j] * v[k]).sum();
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((s - want).abs() < 1e-10, "alpha={alpha} j={j} k={k} s={s}");
                }
            }
        }
    }

    #[test]
    fn hermite_parity() {
        let fam = WaveFunctionFamily::hermite(200);
        for x in [0.3, 2.5, 11.0] {
            let p = fam.all(201, x).unwrap();
            let m = fam.all(201, -x).unwrap();
            for j in 0..=200 {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                assert!((m[j] - sign * p[j]).abs() <= 1e-15 * p[j].abs().max(1e-300));
            }
        }
    }

    #[test]
    fn recurrence_residual() {
        let fam = WaveFunctionFamily::hermite(2000);
        let x = 12.5;
        let v = fam.all(2001, x).unwrap();
        for j in 1..2000 {
            let jf = j as f64;
            let lhs = ((jf + 1.0) / 2.0).sqrt() * v[j + 1];
            let rhs = x * v[j] - (jf / 2.0).sqrt() * v[j - 1];
            let scale = lhs.abs().max(x * v[j].abs()).max(1e-300);
            assert!((lhs - rhs).abs() <= 1e-12 * scale, "j={j}");
        }
    }

    #[test]
    fn high_degree_is_finite_and_log_consistent() {
        let fam = WaveFunctionFamily::hermite(2000);
        let v = fam.all(2001, 70.0).unwrap();
        assert!(v.iter().all(|x| x.is_finite()));
        let direct = v[2000].abs().ln();
        let logv = log_abs_wave(&fam, 2000, 70.0).unwrap();
        assert!((direct - logv).abs() < 1e-9);
        // Deep in the classically forbidden region the ground state underflows
        // while the top degree stays representable.
        let far = fam.all(2001, 64.0).unwrap();
        assert_eq!(far[0], 0.0);
        assert!(far[2000] > 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        let l = WaveFunctionFamily::laguerre(0.5, 3).unwrap();
        assert!(l.wave(1, -0.1).is_err());
        assert!(l.wave(4, 1.0).is_err());
        assert!(WaveFunctionFamily::laguerre(-1.0, 3).is_err());
    }
}
