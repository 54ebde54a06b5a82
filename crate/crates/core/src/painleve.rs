//! Hastings–McLeod (xi = 1) and Ablowitz–Segur (0 < xi < 1) solutions of
//! Painlevé II, `q'' = s q + 2 q^3`, `q(s) ~ sqrt(xi) Ai(s)` as `s -> inf`,
//! and the Painlevé route to `F_2` and `F_+-`.

use nalgebra::{DMatrix, DVector};

use crate::airy::{ai_integral_to_infinity, ai_pair, airy_kernel_trace};
use crate::error::{Error, Result};
use crate::fredholm::LimitTarget;
use crate::quadrature::{
    cheb_barycentric, cheb_coefficients, cheb_diff_matrix, cheb_eval, cheb_integral_coefficients,
    cheb_points, clenshaw_curtis_weights,
};

/// Default collocation degree.
pub const DEFAULT_DEGREE: usize = 200;
/// Default window `[-L_-, L_+]`.
pub const DEFAULT_L_MINUS: f64 = 10.0;
pub const DEFAULT_L_PLUS: f64 = 6.0;

const NEWTON_MAX_ITER: usize = 60;
const NEWTON_TOL: f64 = 1e-13;
/// Acceptance bound on the ODE residual of the returned solution.
pub const RESIDUAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PIISolution {
    pub xi: f64,
    pub l_minus: f64,
    pub l_plus: f64,
    /// Chebyshev–Lobatto nodes, from `L_+` down to `-L_-`.
    pub grid: Vec<f64>,
    pub q_values: Vec<f64>,
    pub q_prime_values: Vec<f64>,
    /// Max ODE residual over the interior nodes.
    pub residual: f64,
    q_coeffs: Vec<f64>,
    qp_coeffs: Vec<f64>,
    /// Antiderivative of `u_00 = q'^2 - s q^2 - q^4`, vanishing at `-L_-`.
    u00_integral: Vec<f64>,
    /// Antiderivative of `q`, vanishing at `-L_-`.
    q_integral: Vec<f64>,
}

impl PIISolution {
    fn to_unit(&self, s: f64) -> f64 {
        (2.0 * s - (self.l_plus - self.l_minus)) / (self.l_plus + self.l_minus)
    }

    fn half(&self) -> f64 {
        0.5 * (self.l_plus + self.l_minus)
    }

    fn check(&self, s: f64) -> Result<()> {
        if s >= -self.l_minus - 1e-12 && s <= self.l_plus + 1e-12 {
            Ok(())
        } else {
            Err(Error::WindowCoverage(format!(
                "s = {s} outside the solution window [{}, {}]",
                -self.l_minus, self.l_plus
            )))
        }
    }

    /// `q(s)` on the window; `sqrt(xi) Ai(s)` to the right of it.
    pub fn q(&self, s: f64) -> Result<f64> {
        if s > self.l_plus {
            return Ok(self.xi.sqrt() * ai_pair(s).0);
        }
        self.check(s)?;
        Ok(cheb_eval(&self.q_coeffs, self.to_unit(s)))
    }

    pub fn q_prime(&self, s: f64) -> Result<f64> {
        if s > self.l_plus {
            return Ok(self.xi.sqrt() * ai_pair(s).1);
        }
        self.check(s)?;
        Ok(cheb_eval(&self.qp_coeffs, self.to_unit(s)))
    }

    /// `q(s)` by barycentric interpolation of the nodal values.
    pub fn q_interp(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let pts = cheb_points(self.grid.len() - 1);
        Ok(cheb_barycentric(&pts, &self.q_values, self.to_unit(s)))
    }

    /// `int_s^inf q(t) dt`.
    pub fn q_tail_integral(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let total_window = cheb_eval(&self.q_integral, 1.0);
        let left = cheb_eval(&self.q_integral, self.to_unit(s));
        Ok(total_window - left + self.xi.sqrt() * ai_integral_to_infinity(self.l_plus))
    }

    /// `int_s^{L_+} u_00`.
    fn u00_integral(&self, s: f64) -> f64 {
        cheb_eval(&self.u00_integral, 1.0) - cheb_eval(&self.u00_integral, self.to_unit(s))
    }

    /// `log F_2(s; xi)`.
    pub fn log_f2(&self, s: f64) -> Result<f64> {
        self.check(s)?;
        let boundary = -self.xi * airy_kernel_trace(self.l_plus);
        Ok(boundary - self.u00_integral(s))
    }

    /// Window integral `int_{-L_-}^{L_+} q` by Clenshaw–Curtis on the nodes.
    pub fn window_integral(&self) -> f64 {
        let w = clenshaw_curtis_weights(self.grid.len() - 1);
        self.half()
            * w.iter()
                .zip(&self.q_values)
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }
}

/// Solve for `q(s; xi)` on `[-l_minus, l_plus]` with the default degree.
pub fn solve_q(xi: f64, l_minus: f64, l_plus: f64) -> Result<PIISolution> {
    solve_q_with(xi, l_minus, l_plus, DEFAULT_DEGREE)
}

/// Damped-Newton Chebyshev collocation.
///
/// Right end: `q = sqrt(xi) Ai`. For xi = 1 the left end is pinned to the
/// leading Hastings–McLeod asymptote `sqrt(L_-/2)`. For xi < 1 the left end
/// carries no condition and `q'(L_+) = sqrt(xi) Ai'(L_+)` is pinned instead.
pub fn solve_q_with(xi: f64, l_minus: f64, l_plus: f64, degree: usize) -> Result<PIISolution> {
    match solve_from(xi, l_minus, l_plus, degree, None) {
        // Newton from the Airy guess fails for xi near 1; continue in xi.
        Err(Error::NewtonDivergence { .. }) if xi > 0.4 && xi < 1.0 => {
            let prev_xi = (xi - (0.5 * (1.0 - xi)).min(0.15)).max(0.3);
            let prev = solve_q_with(prev_xi, l_minus, l_plus, degree)?;
            let ratio = (xi / prev_xi).sqrt();
            let guess: Vec<f64> = prev.q_values.iter().map(|v| v * ratio).collect();
            solve_from(xi, l_minus, l_plus, degree, Some(guess))
        }
        other => other,
    }
}

fn solve_from(
    xi: f64,
    l_minus: f64,
    l_plus: f64,
    degree: usize,
    guess: Option<Vec<f64>>,
) -> Result<PIISolution> {
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    if l_plus < 6.0 || !(l_minus > 0.0) || l_minus > 10.0 {
        return Err(Error::WindowCoverage(format!(
            "need L_+ >= 6 and 0 < L_- <= 10, got L_- = {l_minus}, L_+ = {l_plus}"
        )));
    }
    let n = degree;
    let half = 0.5 * (l_plus + l_minus);
    let mid = 0.5 * (l_plus - l_minus);
    let t = cheb_points(n);
    let s: Vec<f64> = t.iter().map(|&t| mid + half * t).collect();
    let d1 = {
        let d = cheb_diff_matrix(n);
        DMatrix::from_fn(n + 1, n + 1, |i, j| d[i][j] / half)
    };
    let d2 = &d1 * &d1;
    let sq = xi.sqrt();
    let (ai_r, aip_r) = ai_pair(l_plus);
    let hm = xi == 1.0;

    let residual = |q: &DVector<f64>| -> DVector<f64> {
        let qpp = &d2 * q;
        let qp_r = (d1.row(0) * q)[0];
        let mut r = DVector::zeros(n + 1);
        for i in 1..n {
            r[i] = qpp[i] - s[i] * q[i] - 2.0 * q[i] * q[i] * q[i];
        }
        r[0] = q[0] - sq * ai_r;
        if hm {
            r[n] = q[n] - (0.5 * l_minus).sqrt();
        } else {
            r[n] = qp_r - sq * aip_r;
        }
        r
    };
    let jacobian = |q: &DVector<f64>| -> DMatrix<f64> {
        let mut j = d2.clone();
        for i in 1..n {
            j[(i, i)] -= s[i] + 6.0 * q[i] * q[i];
        }
        j.row_mut(0).fill(0.0);
        j[(0, 0)] = 1.0;
        if hm {
            j.row_mut(n).fill(0.0);
            j[(n, n)] = 1.0;
        } else {
            let row = d1.row(0).clone_owned();
            j.row_mut(n).copy_from(&row);
        }
        j
    };

    let mut q = match guess {
        Some(g) => DVector::from_vec(g),
        None => DVector::from_iterator(n + 1, s.iter().map(|&x| initial_guess(x, xi))),
    };
    let mut r = residual(&q);
    let mut norm = r.amax();
    let mut iterations = 0;
    // Rounding in the Jacobian solve leaves nodal residuals near 1e-12;
    // stop once they stop improving and keep the best iterate.
    let mut best = (norm, q.clone(), r.clone());
    let mut stalls = 0;
    while iterations < NEWTON_MAX_ITER && norm > NEWTON_TOL && (stalls < 3 || best.0 > RESIDUAL_TOL)
    {
        iterations += 1;
        let step = jacobian(&q).lu().solve(&r).ok_or(Error::NewtonDivergence {
            residual: norm,
            iterations,
        })?;
        let mut lambda = 1.0;
        loop {
            let trial = &q - &step * lambda;
            let rt = residual(&trial);
            let nt = rt.amax();
            if nt < (1.0 - 0.25 * lambda) * norm || lambda < 1e-3 {
                q = trial;
                r = rt;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
        if norm < 0.5 * best.0 {
            stalls = 0;
        } else {
            stalls += 1;
        }
        if norm < best.0 {
            best = (norm, q.clone(), r.clone());
        }
    }
    let (_, q, r) = best;
    let interior_residual = (1..n).map(|i| r[i].abs()).fold(0.0, f64::max);
    if !(interior_residual < RESIDUAL_TOL) {
        return Err(Error::NewtonDivergence {
            residual: interior_residual,
            iterations,
        });
    }
    let qp = &d1 * &q;
    let q_values: Vec<f64> = q.iter().copied().collect();
    let q_prime_values: Vec<f64> = qp.iter().copied().collect();
    let q_coeffs = cheb_coefficients(&q_values);
    let qp_coeffs = cheb_coefficients(&q_prime_values);
    let u00: Vec<f64> = (0..=n)
        .map(|i| {
            let (a, b) = (q_values[i], q_prime_values[i]);
            b * b - s[i] * a * a - a * a * a * a
        })
        .collect();
    let scale_integral = |c: Vec<f64>| -> Vec<f64> {
        cheb_integral_coefficients(&c)
            .into_iter()
            .map(|v| v * half)
            .collect()
    };
    let u00_integral = scale_integral(cheb_coefficients(&u00));
    let q_integral = scale_integral(q_coeffs.clone());
    Ok(PIISolution {
        xi,
        l_minus,
        l_plus,
        grid: s,
        q_values,
        q_prime_values,
        residual: interior_residual,
        q_coeffs,
        qp_coeffs,
        u00_integral,
        q_integral,
    })
}

/// `sqrt(xi) Ai(s)`; at xi = 1 blended into the `sqrt(-s/2)` growth on the left.
fn initial_guess(s: f64, xi: f64) -> f64 {
    let a = xi.sqrt() * ai_pair(s).0;
    if xi < 1.0 {
        return a;
    }
    // Smooth max(-s, 0) with negligible weight at the right end.
    let k = 3.0;
    let soft = if -k * s > 30.0 {
        -s
    } else {
        (-k * s).exp().ln_1p() / k
    };
    (a * a + 0.5 * soft).sqrt()
}

/// `F_2`, `F_+` or `F_-` at `s` from a Painlevé II solution.
pub fn f_via_painleve(target: LimitTarget, sol: &PIISolution, s: f64) -> Result<f64> {
    let log_f2 = sol.log_f2(s)?;
    match target {
        LimitTarget::F2 => Ok(log_f2.exp()),
        LimitTarget::FPlus => Ok((0.5 * log_f2 - 0.5 * sol.q_tail_integral(s)?).exp()),
        LimitTarget::FMinus => Ok((0.5 * log_f2 + 0.5 * sol.q_tail_integral(s)?).exp()),
        LimitTarget::Beta(_) => Err(Error::InvalidEnsemble(
            "the Painlevé route covers F_2 and F_+- only".into(),
        )),
    }
}

/// Convenience form solving on the default window; `xi = 0` gives 1.
pub fn f_via_painleve_at(target: LimitTarget, s: f64, xi: f64) -> Result<f64> {
    if xi == 0.0 {
        return Ok(1.0);
    }
    let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS)?;
    f_via_painleve(target, &sol, s)
}

/// Result of [`total_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalIntegral {
    pub value: f64,
    /// `artanh sqrt(xi)`.
    pub exact: f64,
    /// Spread between the two tail windows.
    pub tail_uncertainty: f64,
}

/// Point `-HANDOVER` where the continuation takes over from collocation.
pub const HANDOVER: f64 = 6.0;

/// Far-left endpoint of the continuation used by [`total_integral`].
pub const TAIL_REACH: f64 = 240.0;

/// `int_{-inf}^{inf} q(s; xi) ds` for `0 < xi < 1`.
///
/// The collocation solution is continued leftwards by a Taylor-series
/// integrator. With `Q(s) = int_s^inf q`, the identity `q = (q'' - 2 q^3)/s`
/// integrated by parts gives the boundary-corrected estimate
/// `R(L) = Q(-L) - q'(-L)/L + q(-L)/L^2`, whose remaining error oscillates;
/// a smooth window average over `L` removes it.
pub fn total_integral(xi: f64) -> Result<TotalIntegral> {
    total_integral_with(xi, DEFAULT_L_MINUS, TAIL_REACH)
}

#[doc(hidden)]
pub fn total_integral_with(xi: f64, l_minus: f64, reach: f64) -> Result<TotalIntegral> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        });
    }
    let sol = solve_q(xi, l_minus, DEFAULT_L_PLUS)?;
    // The free left end is the least accurate part of the collocation
    // solution, so hand over to the integrator inside the window.
    let start = -HANDOVER.min(sol.l_minus);
    let q0 = sol.q(start)?;
    let qp0 = sol.q_prime(start)?;
    let big_q0 = sol.q_tail_integral(start)?;

    // Record (L, R(L)) along the continuation.
    let mut samples: Vec<(f64, f64)> = Vec::new();
    let mut state = TaylorState {
        s: start,
        q: q0,
        qp: qp0,
        big_q: big_q0,
    };
    let record_from = 0.25 * reach;
    while state.s > -reach {
        let h = state.step_size().min(state.s + reach);
        if h <= 0.0 {
            break;
        }
        state = state.advance(-h);
        if !state.q.is_finite() {
            return Err(Error::TailEstimate(format!(
                "continuation blew up at s = {}",
                state.s
            )));
        }
        let l = -state.s;
        if l >= record_from {
            let r = state.big_q - state.qp / l + state.q / (l * l);
            samples.push((l, r));
        }
    }
    if samples.len() < 16 {
        return Err(Error::TailEstimate("too few continuation samples".into()));
    }
    let lo = samples.first().map(|p| p.0).unwrap_or(record_from);
    let hi = samples.last().map(|p| p.0).unwrap_or(reach);
    let mid = 0.5 * (lo + hi);
    let full = window_average(&samples, lo, hi);
    let upper = window_average(&samples, mid, hi);
    let value = full;
    let tail_uncertainty = (full - upper).abs();
    if !value.is_finite() || tail_uncertainty > 1e-6 {
        return Err(Error::TailEstimate(format!(
            "window averages disagree by {tail_uncertainty:e}"
        )));
    }
    Ok(TotalIntegral {
        value,
        exact: xi.sqrt().atanh(),
        tail_uncertainty,
    })
}

/// Average of `r(L)` over `[a, b]` under the weight `sin^2(pi (L - a)/(b - a))`,
/// by the trapezoid rule on the (nonuniform) sample points.
fn window_average(samples: &[(f64, f64)], a: f64, b: f64) -> f64 {
    let pts: Vec<&(f64, f64)> = samples.iter().filter(|p| p.0 >= a && p.0 <= b).collect();
    let weight = |l: f64| {
        let t = (l - a) / (b - a);
        let v = (std::f64::consts::PI * t).sin();
        v * v
    };
    let mut num = 0.0;
    let mut den = 0.0;
    for w in pts.windows(2) {
        let (l0, r0) = *w[0];
        let (l1, r1) = *w[1];
        let dl = l1 - l0;
        num += 0.5 * dl * (weight(l0) * r0 + weight(l1) * r1);
        den += 0.5 * dl * (weight(l0) + weight(l1));
    }
    num / den
}

/// Taylor-series integrator state for `q'' = s q + 2 q^3`, `Q' = -q`.
#[derive(Debug, Clone, Copy)]
struct TaylorState {
    s: f64,
    q: f64,
    qp: f64,
    big_q: f64,
}

const TAYLOR_ORDER: usize = 32;

impl TaylorState {
    /// Taylor coefficients of `q` about the current point.
    fn coefficients(&self) -> [f64; TAYLOR_ORDER + 1] {
        let mut a = [0.0; TAYLOR_ORDER + 1];
        let mut sq = [0.0; TAYLOR_ORDER + 1];
        let mut cube = [0.0; TAYLOR_ORDER + 1];
        a[0] = self.q;
        a[1] = self.qp;
        for k in 0..=TAYLOR_ORDER - 2 {
            // Cauchy products up to index k (a[0..=k] known).
            sq[k] = (0..=k).map(|i| a[i] * a[k - i]).sum();
            cube[k] = (0..=k).map(|i| a[i] * sq[k - i]).sum();
            let prev = if k >= 1 { a[k - 1] } else { 0.0 };
            a[k + 2] = (self.s * a[k] + prev + 2.0 * cube[k]) / ((k + 1) as f64 * (k + 2) as f64);
        }
        a
    }

    fn step_size(&self) -> f64 {
        let a = self.coefficients();
        let scale = self.q.abs().max(self.qp.abs()).max(1e-30);
        let mut h = 0.5f64;
        for k in [TAYLOR_ORDER - 1, TAYLOR_ORDER] {
            if a[k] != 0.0 {
                h = h.min((1e-17 * scale / a[k].abs()).powf(1.0 / k as f64));
            }
        }
        0.9 * h
    }

    fn advance(&self, h: f64) -> TaylorState {
        let a = self.coefficients();
        let mut q = 0.0;
        let mut qp = 0.0;
        let mut int = 0.0;
        for k in (0..=TAYLOR_ORDER).rev() {
            q = q * h + a[k];
            if k >= 1 {
                qp = qp * h + k as f64 * a[k];
            }
        }
        // int_{s}^{s+h} q = sum a_k h^(k+1)/(k+1).
        for k in (0..=TAYLOR_ORDER).rev() {
            int = int * h + a[k] / (k + 1) as f64;
        }
        int *= h;
        TaylorState {
            s: self.s + h,
            q,
            qp,
            big_q: self.big_q - int,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::{limit_f, s_derivatives, s_derivatives_with, DerivativeOptions};

    #[test]
    fn residual_and_boundary() {
        for xi in [0.2, 0.5, 0.8, 1.0] {
            let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
            assert!(sol.residual < 1e-9, "xi={xi} residual={:e}", sol.residual);
            let want = xi.sqrt() * ai_pair(DEFAULT_L_PLUS).0;
            assert!((sol.q_values[0] - want).abs() < 1e-10);
        }
    }

    #[test]
    fn small_xi_linearization() {
        let xi = 1e-6;
        let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
        for (&s, &q) in sol.grid.iter().zip(&sol.q_values) {
            assert!((q - xi.sqrt() * ai_pair(s).0).abs() < 1e-8, "s={s}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(solve_q(0.0, DEFAULT_L_MINUS, DEFAULT_L_PLUS).is_err());
        assert!(solve_q(0.5, 12.0, 8.0).is_err());
        assert!(solve_q(0.5, 10.0, 4.0).is_err());
        assert_eq!(
            f_via_painleve_at(LimitTarget::FPlus, 0.0, 0.0).unwrap(),
            1.0
        );
    }

    #[test]
    fn hastings_mcleod_value_from_determinant() {
        let sol = solve_q(1.0, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
        // (log F_2)'' = -q^2.
        let d = s_derivatives(|s| Ok(limit_f(LimitTarget::F2, s, 1.0)?.ln()), 0.0, 2).unwrap();
        let q0 = (-d[2]).sqrt();
        assert!((sol.q(0.0).unwrap() - q0).abs() < 1e-6);
    }

    #[test]
    fn painleve_route_matches_determinants() {
        for xi in [0.5, 1.0] {
            let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
            for s in [-4.0, -2.0, 0.0, 2.0] {
                let det = limit_f(LimitTarget::F2, s, xi).unwrap();
                let pii = f_via_painleve(LimitTarget::F2, &sol, s).unwrap();
                assert!((det - pii).abs() < 1e-7, "xi={xi} s={s}");
                let p = f_via_painleve(LimitTarget::FPlus, &sol, s).unwrap();
                let m = f_via_painleve(LimitTarget::FMinus, &sol, s).unwrap();
                assert!((p * m - pii).abs() < 1e-8);
                let pd = limit_f(LimitTarget::FPlus, s, xi).unwrap();
                assert!((p - pd).abs() < 1e-7, "xi={xi} s={s} {p} {pd}");
            }
        }
    }

    #[test]
    fn total_integral_values() {
        for xi in [0.25, 0.81] {
            let t = total_integral(xi).unwrap();
            assert!((t.value - t.exact).abs() < 1e-6, "xi={xi} {t:?}");
        }
        assert!((total_integral(0.25).unwrap().exact - 0.5 * 3f64.ln()).abs() < 1e-15);
        let tiny = total_integral(1e-8).unwrap();
        assert!(tiny.value.abs() < 1e-3);
    }

    #[test]
    fn log_derivatives_match_determinants() {
        let opts = DerivativeOptions {
            width: 2.0,
            degree: 30,
            validate: true,
        };
        for xi in [0.5, 1.0] {
            let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
            for k in 0..=5 {
                let s = -6.0 + 2.0 * k as f64;
                let (q, qp) = (sol.q(s).unwrap(), sol.q_prime(s).unwrap());
                let u00 = qp * qp - s * q * q - q.powi(4);
                let d2 =
                    s_derivatives_with(|t| Ok(limit_f(LimitTarget::F2, t, xi)?.ln()), s, 1, opts)
                        .unwrap();
                assert!((d2[1] - u00).abs() < 1e-6, "xi={xi} s={s}");
                for (target, sign) in [(LimitTarget::FPlus, 1.0), (LimitTarget::FMinus, -1.0)] {
                    let d = s_derivatives_with(|t| Ok(limit_f(target, t, xi)?.ln()), s, 1, opts)
                        .unwrap();
                    let want = 0.5 * qp * qp - 0.5 * q.powi(4) - 0.5 * s * q * q + sign * 0.5 * q;
                    assert!((d[1] - want).abs() < 1e-6, "xi={xi} s={s} {target:?}");
                }
            }
        }
    }

    #[test]
    fn tail_exponential_increases_to_limit() {
        let xi = 0.5;
        let sol = solve_q(xi, DEFAULT_L_MINUS, DEFAULT_L_PLUS).unwrap();
        // q > 0 to the right of its first zero, so the exponential increases there.
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=80 {
            let s = -2.0 + 0.1 * k as f64;
            let v = (-sol.q_tail_integral(s).unwrap()).exp();
            assert!(v > prev - 1e-12 && v < 1.0);
            prev = v;
        }
        let limit = (-xi.sqrt().atanh()).exp();
        assert!(((-sol.q_tail_integral(-10.0).unwrap()).exp() - limit).abs() < 0.05);
    }
}
