//! Airy function Ai and its derivative on the real line.
//!
//! Evaluation strategy by region:
//! - `|x| <= 2`: Maclaurin series.
//! - `x > 2`: the steepest-descent integral
//!   `Ai(x) = exp(-z)/pi * int_0^inf exp(-sqrt(x) u^2) cos(u^3/3) du`, `z = 2/3 x^(3/2)`,
//!   evaluated by Gauss–Legendre.
//! - `-9 < x < -2`: Taylor continuation of the Airy equation from tabulated anchors.
//! - `x <= -9`: the oscillatory asymptotic expansion.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// `Ai(0) = 3^(-2/3) / Gamma(2/3)`.
pub const AI0: f64 = 0.355_028_053_887_817_2;
/// `-Ai'(0) = 3^(-1/3) / Gamma(1/3)`.
pub const AIP0: f64 = 0.258_819_403_792_806_8;

/// Documented working range of the checked entry points.
pub const AIRY_RANGE: f64 = 50.0;

pub fn airy_ai(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(ai_pair(x).0)
}

pub fn airy_ai_prime(x: f64) -> Result<f64> {
    check_range(x)?;
    Ok(ai_pair(x).1)
}

fn check_range(x: f64) -> Result<()> {
    if x.is_finite() && x.abs() <= AIRY_RANGE {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            value: x,
            lo: -AIRY_RANGE,
            hi: AIRY_RANGE,
        })
    }
}

/// `(Ai(x), Ai'(x))`, unchecked. Valid for `x >= -AIRY_RANGE` and any positive `x`
/// (values underflow to zero far right).
pub fn ai_pair(x: f64) -> (f64, f64) {
    if x.abs() <= 2.0 {
        maclaurin(x)
    } else if x > 2.0 {
        if x > 110.0 {
            (0.0, 0.0)
        } else {
            steepest_descent(x)
        }
    } else if x > -9.0 {
        taylor_from_anchor(x)
    } else {
        asymptotic_negative(-x)
    }
}

/// `Ai(x)` without range checks.
pub fn ai(x: f64) -> f64 {
    ai_pair(x).0
}

fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    // f'' = x f, f(0)=1, f'(0)=0; g'' = x g, g(0)=0, g'(0)=1.
    let mut f = 1.0;
    let mut fp = 0.0;
    let mut g = x;
    let mut gp = 1.0;
    let mut tf = 1.0;
    let mut tfp = 0.5 * x * x;
    let mut tg = x;
    let mut tgp = 1.0;
    fp += tfp;
    for k in 1..60 {
        let kf = k as f64;
        tf *= x3 / ((3.0 * kf) * (3.0 * kf - 1.0));
        tg *= x3 / ((3.0 * kf) * (3.0 * kf + 1.0));
        tgp *= x3 / ((3.0 * kf - 2.0) * (3.0 * kf));
        if k > 1 {
            tfp *= x3 / ((3.0 * (kf - 1.0)) * (3.0 * kf - 1.0));
            fp += tfp;
        }
        f += tf;
        g += tg;
        gp += tgp;
        if tf.abs() + tg.abs() + tgp.abs() + tfp.abs() < 1e-18 {
            break;
        }
    }
    (AI0 * f - AIP0 * g, AI0 * fp - AIP0 * gp)
}

fn steepest_descent(x: f64) -> (f64, f64) {
    let rule = GaussLegendre::new(96);
    let sx = x.sqrt();
    let upper = (40.0 / sx).sqrt();
    let (mut a, mut ap) = (0.0, 0.0);
    let half = 0.5 * upper;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let u = half * (t + 1.0);
        let damp = (-sx * u * u).exp() * w * half;
        let (s, c) = (u * u * u / 3.0).sin_cos();
        a += damp * c;
        ap += damp * (-sx * c - u * s);
    }
    let scale = (-2.0 / 3.0 * x * sx).exp() / PI;
    (a * scale, ap * scale)
}

const ANCHOR_STEP: f64 = 0.25;
const ANCHOR_START: f64 = -2.0;
const ANCHOR_COUNT: usize = 29; // -2.0 down to -9.0

fn anchors() -> &'static [(f64, f64)] {
    static ANCHORS: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    ANCHORS.get_or_init(|| {
        let mut out = Vec::with_capacity(ANCHOR_COUNT);
        let mut state = maclaurin(ANCHOR_START);
        out.push(state);
        for i in 1..ANCHOR_COUNT {
            let a = ANCHOR_START - (i - 1) as f64 * ANCHOR_STEP;
            state = taylor_step(a, state, -ANCHOR_STEP);
            out.push(state);
        }
        out
    })
}

/// Advance `(y, y')` of `y'' = x y` from `a` to `a + t` by a Taylor series.
fn taylor_step(a: f64, (y0, y1): (f64, f64), t: f64) -> (f64, f64) {
    let mut c = [0.0f64; 64];
    c[0] = y0;
    c[1] = y1;
    for k in 0..62 {
        let prev = if k >= 1 { c[k - 1] } else { 0.0 };
        c[k + 2] = (a * c[k] + prev) / ((k + 1) as f64 * (k + 2) as f64);
    }
    let mut y = 0.0;
    let mut yp = 0.0;
    for k in (0..64).rev() {
        y = y * t + c[k];
        if k >= 1 {
            yp = yp * t + k as f64 * c[k];
        }
    }
    (y, yp)
}

fn taylor_from_anchor(x: f64) -> (f64, f64) {
    let idx = ((ANCHOR_START - x) / ANCHOR_STEP).round() as usize;
    let idx = idx.min(ANCHOR_COUNT - 1);
    let a = ANCHOR_START - idx as f64 * ANCHOR_STEP;
    taylor_step(a, anchors()[idx], x - a)
}

/// DLMF 9.7.9/9.7.10 for `Ai(-z)`, `Ai'(-z)`, `z >= 9`.
fn asymptotic_negative(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let mut u = 1.0f64;
    let mut su_even = 0.0;
    let mut su_odd = 0.0;
    let mut sv_even = 0.0;
    let mut sv_odd = 0.0;
    let mut zpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..40usize {
        let kf = k as f64;
        if k > 0 {
            u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
                / ((2.0 * kf - 1.0) * 216.0 * kf);
            zpow *= zeta;
        }
        let v = if k == 0 {
            1.0
        } else {
            -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u
        };
        let tu = u / zpow;
        let tv = v / zpow;
        if tu.abs() > last || tu.abs() < 1e-18 {
            break;
        }
        last = tu.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            su_even += sign * tu;
            sv_even += sign * tv;
        } else {
            su_odd += sign * tu;
            sv_odd += sign * tv;
        }
    }
    let (s, c) = (zeta - PI / 4.0).sin_cos();
    let q = z.sqrt().sqrt();
    let pre = 1.0 / PI.sqrt();
    let ai = pre / q * (c * su_even + s * su_odd);
    let aip = pre * q * (s * sv_even - c * sv_odd);
    (ai, aip)
}

/// `int_x^inf Ai(t) dt`.
pub fn ai_integral_to_infinity(x: f64) -> f64 {
    // Integrate the decaying tail on [x, x + L] with panels; beyond, Ai is below 1e-30.
    let upper = x.max(0.0) + 20.0;
    let rule = GaussLegendre::new(40);
    let panels = ((upper - x) / 2.0).ceil().max(1.0) as usize;
    let width = (upper - x) / panels as f64;
    (0..panels)
        .map(|i| {
            let a = x + i as f64 * width;
            rule.integrate(a, a + width, ai)
        })
        .sum()
}

/// `tr K_Ai` on `(s, inf)`: `(2 s^2 Ai^2 - 2 s Ai'^2 - Ai Ai') / 3`.
pub fn airy_kernel_trace(s: f64) -> f64 {
    let (a, ap) = ai_pair(s);
    (2.0 * s * s * a * a - 2.0 * s * ap * ap - a * ap) / 3.0
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_at_origin() {
        assert!((airy_ai(0.0).unwrap() - 0.355_028_053_887_817_2).abs() < 1e-16);
        assert!((airy_ai_prime(0.0).unwrap() + 0.258_819_403_792_806_8).abs() < 1e-16);
    }

    #[test]
    fn reference_values() {
        // 30-digit reference values.
        let table = [
            (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_21),
            (-1.0, 0.535_560_883_292_352_12, -0.010_160_567_116_645_209),
            (-2.0, 0.227_407_428_201_685_58, 0.618_259_020_741_691_04),
            (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_624_8e-4),
            (-9.0, -0.022_133_721_547_341_404, -0.975_663_980_926_331_59),
            (
                10.0,
                1.104_753_255_289_868_6e-10,
                -3.520_633_676_738_923_6e-10,
            ),
            (-15.0, 0.278_217_490_870_828_93, 0.272_374_204_308_642_02),
        ];
        for (x, a, ap) in table {
            let (ai, aip) = ai_pair(x);
            assert!((ai - a).abs() < 1e-14, "Ai({x}) = {ai}, want {a}");
            assert!((aip - ap).abs() < 1e-14, "Ai'({x}) = {aip}, want {ap}");
        }
    }

    #[test]
    fn methods_agree_at_switch_points() {
        let pairs = [
            (maclaurin(2.0), steepest_descent(2.0)),
            (maclaurin(-2.0), taylor_from_anchor(-2.0)),
            (taylor_from_anchor(-9.0), asymptotic_negative(9.0)),
            (maclaurin(3.0), steepest_descent(3.0)),
            (taylor_from_anchor(-8.0), asymptotic_negative(8.0)),
        ];
        for (a, b) in pairs {
            assert!((a.0 - b.0).abs() < 1e-13, "{a:?} vs {b:?}");
            assert!((a.1 - b.1).abs() < 1e-13, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn airy_equation_residual() {
        // Eighth-order central stencil for the second derivative.
        const C: [f64; 5] = [
            -205.0 / 72.0,
            8.0 / 5.0,
            -1.0 / 5.0,
            8.0 / 315.0,
            -1.0 / 560.0,
        ];
        let h = 0.01;
        let mut x = -10.0;
        while x <= 5.0 {
            let mut fd = C[0] * ai(x);
            for (k, c) in C.iter().enumerate().skip(1) {
                fd += c * (ai(x + k as f64 * h) + ai(x - k as f64 * h));
            }
            fd /= h * h;
            let resid = (fd - x * ai(x)).abs();
            assert!(resid < 1e-10, "x={x}: {resid}");
            x += 0.05;
        }
    }

    #[test]
    fn derivative_consistency() {
        // Ai' against a fourth-order finite difference of Ai.
        let h = 1e-3;
        let mut x = -14.9;
        while x < 15.0 {
            let fd = (ai(x - 2.0 * h) - 8.0 * ai(x - h) + 8.0 * ai(x + h) - ai(x + 2.0 * h))
                / (12.0 * h);
            assert!((fd - ai_pair(x).1).abs() < 1e-9, "x={x}");
            x += 0.1;
        }
    }

    #[test]
    fn wronskian_like_identity_for_trace() {
        // d/ds tr K_Ai(s, inf) = -K_Ai(s, s) = -(Ai'^2 - s Ai^2)
        let h = 1e-4;
        for &s in &[-6.0, -2.5, 0.0, 1.7, 4.0] {
            let fd = (airy_kernel_trace(s + h) - airy_kernel_trace(s - h)) / (2.0 * h);
            let (a, ap) = ai_pair(s);
            assert!((fd + ap * ap - s * a * a).abs() < 1e-7, "s={s}");
        }
    }

    #[test]
    fn out_of_range() {
        assert!(airy_ai(51.0).is_err());
        assert!(airy_ai_prime(-60.0).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }

    #[test]
    fn integral_of_ai() {
        // int_0^inf Ai = 1/3.
        assert!((ai_integral_to_infinity(0.0) - 1.0 / 3.0).abs() < 1e-14);
    }
}
