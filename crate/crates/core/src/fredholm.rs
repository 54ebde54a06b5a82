//! Nyström discretization of the Airy-type operators on `(s, inf)`, Fredholm
//! determinants with their xi-jets, the limit laws `F_2`, `F_+`, `F_-`, `F_1`,
//! `F_4`, induced k-th largest level limit distributions, and spectral
//! s-derivatives.

use nalgebra::DMatrix;

use crate::airy::{ai, ai_pair};
use crate::ensemble::Beta;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::quadrature::{
    cheb_coefficients, cheb_derivative_coefficients, cheb_eval, cheb_points, GaussLegendre,
};
use crate::tridiag::symmetric_eigenvalues;

/// Scale of the algebraic map `x = s + L (1 + t) / (1 - t)`.
pub const MAP_SCALE: f64 = 4.0;
/// Nodes beyond `s + NODE_CUTOFF` are dropped.
pub const NODE_CUTOFF: f64 = 60.0;
/// Default node count for `|s| <= 8`.
pub const DEFAULT_NODES: usize = 80;
/// Working window of the limit laws.
pub const S_WINDOW: (f64, f64) = (-10.0, 8.0);
/// Highest xi-jet order accepted by the validated routines.
pub const MAX_JET_ORDER: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// `K_Ai(x, y) = (Ai(x) Ai'(y) - Ai'(x) Ai(y)) / (x - y)`.
    AiryK,
    /// `V_Ai(x, y) = Ai((x + y) / 2) / 2`.
    VAi,
}

/// How the jet variable enters the linear factors of the determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignMode {
    /// `prod (1 - xi lambda)`.
    Linear,
    /// `prod (1 - sqrt(xi) nu)`.
    SqrtMinus,
    /// `prod (1 + sqrt(xi) nu)`.
    SqrtPlus,
}

/// The auxiliary determinants and the limit laws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LimitTarget {
    F2,
    /// `F_+ = det(I - sqrt(xi) V_Ai)`.
    FPlus,
    /// `F_- = det(I + sqrt(xi) V_Ai)`.
    FMinus,
    Beta(Beta),
}

#[derive(Debug, Clone)]
pub struct KernelDiscretization {
    pub kernel: Kernel,
    pub s: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `W^(1/2) K W^(1/2)`.
    pub matrix: DMatrix<f64>,
    /// Eigenvalues in descending order.
    pub spectrum: Vec<f64>,
}

/// Nyström discretization of `kernel` on `(s, inf)` with an `m`-point rule.
pub fn discretize(kernel: Kernel, s: f64, m: usize) -> Result<KernelDiscretization> {
    if m < 8 {
        return Err(Error::OutOfRange {
            value: m as f64,
            lo: 8.0,
            hi: f64::INFINITY,
        });
    }
    if !s.is_finite() {
        return Err(Error::WindowCoverage(format!(
            "nonfinite left endpoint {s}"
        )));
    }
    let rule = GaussLegendre::new(m);
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        let x = s + MAP_SCALE * (1.0 + t) / (1.0 - t);
        if x - s > NODE_CUTOFF {
            continue;
        }
        nodes.push(x);
        weights.push(w * 2.0 * MAP_SCALE / ((1.0 - t) * (1.0 - t)));
    }
    let len = nodes.len();
    let sw: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let mut matrix = DMatrix::zeros(len, len);
    match kernel {
        Kernel::AiryK => {
            let pairs: Vec<(f64, f64)> = nodes.iter().map(|&x| ai_pair(x)).collect();
            for i in 0..len {
                let (ai_i, aip_i) = pairs[i];
                let xi = nodes[i];
                matrix[(i, i)] = sw[i] * sw[i] * (aip_i * aip_i - xi * ai_i * ai_i);
                for j in 0..i {
                    let (ai_j, aip_j) = pairs[j];
                    let k = (ai_i * aip_j - aip_i * ai_j) / (xi - nodes[j]);
                    let v = sw[i] * k * sw[j];
                    matrix[(i, j)] = v;
                    matrix[(j, i)] = v;
                }
            }
        }
        Kernel::VAi => {
            for i in 0..len {
                for j in 0..=i {
                    let v = sw[i] * 0.5 * ai(0.5 * (nodes[i] + nodes[j])) * sw[j];
                    matrix[(i, j)] = v;
                    matrix[(j, i)] = v;
                }
            }
        }
    }
    // Entries this small only feed denormals into the eigensolver.
    matrix.iter_mut().for_each(|v| {
        if v.abs() < 1e-150 {
            *v = 0.0
        }
    });
    let mut spectrum = symmetric_eigenvalues(&matrix);
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok(KernelDiscretization {
        kernel,
        s,
        nodes,
        weights,
        matrix,
        spectrum,
    })
}

/// Node count used by the limit-law routines at `s`.
pub fn default_nodes(s: f64) -> usize {
    if s.abs() <= 8.0 {
        DEFAULT_NODES
    } else {
        DEFAULT_NODES + (10.0 * (s.abs() - 8.0)).ceil() as usize
    }
}

impl KernelDiscretization {
    /// `prod (1 - xi lambda_i)` from the spectrum.
    pub fn det(&self, xi: f64) -> f64 {
        self.spectrum.iter().map(|l| 1.0 - xi * l).product()
    }

    /// `det(I - xi A)` by LU factorization of the dense matrix.
    pub fn det_direct(&self, xi: f64) -> f64 {
        let n = self.matrix.nrows();
        let a = DMatrix::identity(n, n) - &self.matrix * xi;
        a.lu().determinant()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// Largest deviation of the matrix from symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.matrix.transpose();
        (&self.matrix - t).amax()
    }
}

/// The determinant as a truncated Taylor series in xi about `xi_star`.
pub fn det_jet(
    disc: &KernelDiscretization,
    xi_star: f64,
    order: usize,
    mode: SignMode,
) -> Result<Jet> {
    match mode {
        SignMode::Linear => {
            let mut jet = Jet::constant(xi_star, order, 1.0);
            for &l in &disc.spectrum {
                jet.mul_linear(1.0 - xi_star * l, -l);
            }
            Ok(jet)
        }
        SignMode::SqrtMinus | SignMode::SqrtPlus => {
            if xi_star <= 0.0 {
                return Err(Error::SqrtAtZero);
            }
            let w = Jet::variable(xi_star, order).sqrt()?;
            let sign = if mode == SignMode::SqrtMinus {
                -1.0
            } else {
                1.0
            };
            Ok(sqrt_product(&disc.spectrum, &w, sign))
        }
    }
}

/// `prod (1 + sign * nu_i * w)` for a jet `w`.
fn sqrt_product(spectrum: &[f64], w: &Jet, sign: f64) -> Jet {
    let mut acc = Jet::constant(w.center, w.order(), 1.0);
    for &nu in spectrum {
        let factor = w.scale(sign * nu).add_scalar(1.0);
        acc = &acc * &factor;
    }
    acc
}

/// Even and odd parts of `D(w) = prod (1 - nu_i w)` as power series in `u = w^2`,
/// truncated at `u^(order+1)`.
fn even_odd_series(spectrum: &[f64], order: usize) -> (Vec<f64>, Vec<f64>) {
    let len = 2 * order + 2;
    let mut c = vec![0.0; len];
    c[0] = 1.0;
    for &nu in spectrum {
        for k in (1..len).rev() {
            c[k] -= nu * c[k - 1];
        }
    }
    let even = (0..=order).map(|k| c[2 * k]).collect();
    let odd = (0..=order).map(|k| c[2 * k + 1]).collect();
    (even, odd)
}

fn check_xi(xi: f64) -> Result<()> {
    if (0.0..=1.0).contains(&xi) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            value: xi,
            lo: 0.0,
            hi: 1.0,
        })
    }
}

fn check_window(s: f64) -> Result<()> {
    if s >= S_WINDOW.0 && s <= S_WINDOW.1 {
        Ok(())
    } else {
        Err(Error::WindowCoverage(format!(
            "s = {s} outside the working window [{}, {}]",
            S_WINDOW.0, S_WINDOW.1
        )))
    }
}

/// Limit law `target(s; xi)` with window and argument checks.
pub fn limit_f(target: LimitTarget, s: f64, xi: f64) -> Result<f64> {
    check_xi(xi)?;
    check_window(s)?;
    Ok(limit_jet_unchecked(target, s, xi, 0)?.value())
}

/// `F_beta(s; xi)`.
pub fn limit_f_beta(beta: Beta, s: f64, xi: f64) -> Result<f64> {
    limit_f(LimitTarget::Beta(beta), s, xi)
}

/// Jet in xi of a limit law about `xi_star`.
pub fn limit_jet(target: LimitTarget, s: f64, xi_star: f64, order: usize) -> Result<Jet> {
    check_xi(xi_star)?;
    check_window(s)?;
    limit_jet_unchecked(target, s, xi_star, order)
}

/// As [`limit_jet`] without the window check; used inside derivative windows
/// that reach slightly past the working window.
pub fn limit_jet_unchecked(target: LimitTarget, s: f64, xi_star: f64, order: usize) -> Result<Jet> {
    let m = default_nodes(s);
    match target {
        LimitTarget::F2 | LimitTarget::Beta(Beta::Unitary) => {
            let disc = discretize(Kernel::AiryK, s, m)?;
            det_jet(&disc, xi_star, order, SignMode::Linear)
        }
        LimitTarget::FPlus | LimitTarget::FMinus => {
            let disc = discretize(Kernel::VAi, s, m)?;
            let mode = if target == LimitTarget::FPlus {
                SignMode::SqrtMinus
            } else {
                SignMode::SqrtPlus
            };
            if xi_star == 0.0 {
                if order == 0 {
                    return Ok(Jet::constant(0.0, 0, 1.0));
                }
                return Err(Error::SqrtAtZero);
            }
            det_jet(&disc, xi_star, order, mode)
        }
        LimitTarget::Beta(Beta::Symplectic) => {
            let disc = discretize(Kernel::VAi, s, m)?;
            if xi_star == 0.0 {
                // Even part of D(w) in u = w^2 = xi.
                let (even, _) = even_odd_series(&disc.spectrum, order);
                return Ok(Jet {
                    center: 0.0,
                    coeffs: even,
                });
            }
            let w = Jet::variable(xi_star, order).sqrt()?;
            let plus = sqrt_product(&disc.spectrum, &w, -1.0);
            let minus = sqrt_product(&disc.spectrum, &w, 1.0);
            Ok((&plus + &minus).scale(0.5))
        }
        LimitTarget::Beta(Beta::Orthogonal) => {
            let disc = discretize(Kernel::VAi, s, m)?;
            let x = Jet::variable(xi_star, order);
            let two_minus = (-&x).add_scalar(2.0);
            let xibar = &x * &two_minus;
            if xi_star == 0.0 {
                // F_1 = Ev(xibar) + xi Od(xibar) with D(w) = Ev(w^2) + w Od(w^2).
                let (even, odd) = even_odd_series(&disc.spectrum, order);
                let ev = Jet::compose(
                    &Jet {
                        center: 0.0,
                        coeffs: even,
                    },
                    &xibar,
                );
                let od = Jet::compose(
                    &Jet {
                        center: 0.0,
                        coeffs: odd,
                    },
                    &xibar,
                );
                return Ok(&ev + &(&x * &od));
            }
            let w = xibar.sqrt()?;
            let r = x.div(&two_minus).sqrt()?;
            let plus = sqrt_product(&disc.spectrum, &w, -1.0);
            let minus = sqrt_product(&disc.spectrum, &w, 1.0);
            let one_plus = r.add_scalar(1.0);
            let one_minus = (-&r).add_scalar(1.0);
            Ok((&(&plus * &one_plus) + &(&minus * &one_minus)).scale(0.5))
        }
    }
}

/// `P(x_(n-k) <= x)` in the limit: `sum_{j<=k} (-1)^j / j! d^j/dxi^j F_beta(s; xi)` at xi = 1.
pub fn kth_largest_limit_cdf(beta: Beta, k: usize, s: f64) -> Result<f64> {
    check_window(s)?;
    kth_largest_unchecked(beta, k, s)
}

pub(crate) fn kth_largest_unchecked(beta: Beta, k: usize, s: f64) -> Result<f64> {
    let jet = limit_jet_unchecked(LimitTarget::Beta(beta), s, 1.0, k)?;
    Ok(induced_from_jet(&jet, k))
}

/// Partial sum `sum_{j<=k} (-1)^j c_j` of the Taylor coefficients of a jet about xi = 1.
pub fn induced_from_jet(jet: &Jet, k: usize) -> f64 {
    jet.coeffs
        .iter()
        .take(k + 1)
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { *c } else { -*c })
        .sum()
}

/// Chebyshev window settings for [`s_derivatives`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeOptions {
    pub width: f64,
    pub degree: usize,
    pub validate: bool,
}

impl Default for DerivativeOptions {
    fn default() -> Self {
        DerivativeOptions {
            width: 6.0,
            degree: 40,
            validate: true,
        }
    }
}

/// Relative tolerance of the degree-doubling check at derivative order `k`.
pub fn derivative_tolerance(k: usize) -> f64 {
    if k <= 2 {
        1e-8
    } else {
        1e-8 * 10f64.powf((k as f64 - 2.0) / 2.0)
    }
}

/// Derivatives `f^(k)(s0)`, `k = 0..=kmax`, by spectral differentiation.
pub fn s_derivatives<F>(f: F, s0: f64, kmax: usize) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    s_derivatives_with(f, s0, kmax, DerivativeOptions::default())
}

pub fn s_derivatives_with<F>(
    f: F,
    s0: f64,
    kmax: usize,
    opts: DerivativeOptions,
) -> Result<Vec<f64>>
where
    F: Fn(f64) -> Result<f64>,
{
    if kmax > 8 {
        return Err(Error::OutOfRange {
            value: kmax as f64,
            lo: 0.0,
            hi: 8.0,
        });
    }
    let half = 0.5 * opts.width;
    let (base, sup) = cheb_window_derivatives(&f, s0, half, opts.degree, kmax)?;
    if opts.validate {
        let (fine, _) = cheb_window_derivatives(&f, s0, half, 2 * opts.degree, kmax)?;
        for k in 0..=kmax {
            let scale = fine[k].abs().max(sup).max(f64::MIN_POSITIVE);
            let discrepancy = (base[k] - fine[k]).abs() / scale;
            let tolerance = derivative_tolerance(k);
            if discrepancy > tolerance {
                return Err(Error::DerivativeValidation {
                    order: k,
                    discrepancy,
                    tolerance,
                });
            }
        }
    }
    Ok(base)
}

/// Derivatives at the window center and the sup of `|f|` over the sample.
fn cheb_window_derivatives<F>(
    f: &F,
    s0: f64,
    half: f64,
    degree: usize,
    kmax: usize,
) -> Result<(Vec<f64>, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let pts = cheb_points(degree);
    let values = pts
        .iter()
        .map(|&t| f(s0 + half * t))
        .collect::<Result<Vec<f64>>>()?;
    let sup = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let mut coeffs = cheb_coefficients(&values);
    chop(&mut coeffs);
    let mut out = Vec::with_capacity(kmax + 1);
    let mut c = coeffs;
    let mut factor = 1.0;
    for _ in 0..=kmax {
        out.push(cheb_eval(&c, 0.0) * factor);
        c = cheb_derivative_coefficients(&c);
        factor /= half;
    }
    Ok((out, sup))
}

/// Drops the trailing coefficients that sit at the rounding-noise plateau.
fn chop(c: &mut Vec<f64>) {
    let big = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = 64.0 * f64::EPSILON * big;
    while c.len() > 1 && c.last().map(|v| v.abs() <= floor).unwrap_or(false) {
        c.pop();
    }
}
