//! Exact finite-n generating functions of the unitary (beta = 2) Gaussian and
//! Laguerre ensembles: `E_{2,n}(x; xi) = det(I - xi K_n)` on `(x, inf)` reduces
//! to `det(I_n - xi A(x))` with the Gram matrix `A_jk = int_x^inf phi_j phi_k`.

use nalgebra::DMatrix;

use crate::ensemble::{scaling, Beta, EffectiveIndex, EnsembleSpec, Family, ScalingParams};
use crate::error::{Error, Result};
use crate::fredholm::induced_from_jet;
use crate::jet::Jet;
use crate::quadrature::GaussLegendre;
use crate::tridiag::symmetric_eigenvalues;
use crate::wave::{log_abs_wave, WaveFunctionFamily};

/// Gauss–Legendre nodes per panel.
const PANEL_NODES: usize = 20;
/// Acceptable tail mass beyond the quadrature cutoff.
const TAIL_TOL: f64 = 1e-12;
/// Target tail mass when choosing the cutoff.
const TAIL_TARGET: f64 = 1e-32;

#[derive(Debug, Clone)]
pub struct GramCache {
    pub spec: EnsembleSpec,
    pub x: f64,
    pub gram: DMatrix<f64>,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
}

impl GramCache {
    /// `E_{2,n}(x; xi) = prod (1 - xi lambda_i)`.
    pub fn e2n(&self, xi: f64) -> f64 {
        self.eigenvalues.iter().map(|l| 1.0 - xi * l).product()
    }

    /// Expected number of levels in `(x, inf)`.
    pub fn expected_count(&self) -> f64 {
        self.gram.trace()
    }
}

fn require_unitary(spec: &EnsembleSpec) -> Result<()> {
    spec.validate()?;
    if spec.beta != Beta::Unitary {
        return Err(Error::InvalidEnsemble(
            "exact finite-n values are available for beta = 2 only".into(),
        ));
    }
    Ok(())
}

fn family_of(spec: &EnsembleSpec) -> Result<WaveFunctionFamily> {
    match spec.family {
        Family::Gaussian => Ok(WaveFunctionFamily::hermite(spec.n)),
        Family::Laguerre => WaveFunctionFamily::laguerre(spec.alpha().unwrap_or(0.0), spec.n),
    }
}

/// Squared local wavenumber of `phi_{n-1}` (negative in forbidden regions).
fn wavenumber_sq(spec: &EnsembleSpec, alpha: f64, y: f64) -> f64 {
    let n = spec.n as f64;
    match spec.family {
        Family::Gaussian => 2.0 * n - 1.0 - y * y,
        Family::Laguerre => {
            let y = y.max(1e-300);
            (n - 1.0 + 0.5 * (alpha + 1.0)) / y - 0.25 - alpha * alpha / (4.0 * y * y)
        }
    }
}

/// Right turning point of `phi_{n-1}`.
fn turning_point(spec: &EnsembleSpec, alpha: f64) -> f64 {
    let n = spec.n as f64;
    match spec.family {
        Family::Gaussian => (2.0 * n - 1.0).sqrt(),
        Family::Laguerre => {
            let nu = 4.0 * (n - 1.0) + 2.0 * (alpha + 1.0);
            0.5 * (nu + (nu * nu - 4.0 * alpha * alpha).max(0.0).sqrt())
        }
    }
}

/// Right cutoff `U` with estimated tail mass `int_U^inf phi_{n-1}^2` below target.
fn right_cutoff(spec: &EnsembleSpec, wave: &WaveFunctionFamily, alpha: f64) -> Result<(f64, f64)> {
    let top = spec.n - 1;
    let start = turning_point(spec, alpha);
    let step = match spec.family {
        Family::Gaussian => 0.25,
        Family::Laguerre => 0.25 * (spec.n as f64).cbrt().max(1.0),
    };
    let mut u = start;
    let mut estimate = f64::INFINITY;
    for _ in 0..4000 {
        u += step;
        let kappa = (-wavenumber_sq(spec, alpha, u)).max(1e-3).sqrt();
        let log_phi = log_abs_wave(wave, top, u)?;
        estimate = (2.0 * log_phi).exp() / (2.0 * kappa);
        if estimate < TAIL_TARGET {
            return Ok((u, estimate));
        }
    }
    if estimate < TAIL_TOL {
        Ok((u, estimate))
    } else {
        Err(Error::Cutoff(estimate))
    }
}

/// Panel edges on `[a, b]` with widths of about one local wavelength.
fn panels(spec: &EnsembleSpec, alpha: f64, a: f64, b: f64) -> Vec<f64> {
    let (min_w, max_w) = match spec.family {
        Family::Gaussian => (0.02, 1.0),
        Family::Laguerre => (0.02, 2.0),
    };
    let mut edges = vec![a];
    let mut y = a;
    // Geometric grading towards a nearby Laguerre endpoint singularity.
    if spec.family == Family::Laguerre && a > 0.0 && a < min_w {
        let mut w = 0.5 * a;
        while w < min_w && y + w < b {
            y += w;
            edges.push(y);
            w *= 2.0;
        }
    }
    while y < b {
        let k2 = wavenumber_sq(spec, alpha, y).max(0.0);
        let w = if k2 > 0.0 {
            (2.0 * std::f64::consts::PI / k2.sqrt()).clamp(min_w, max_w)
        } else {
            max_w
        };
        y = (y + w).min(b);
        edges.push(y);
    }
    edges
}

/// Gram matrix `A(x)` of the first `n` wave functions on `(x, inf)`.
///
/// Off-diagonal entries use the exact Wronskian identity; diagonal entries use
/// panelled Gauss–Legendre quadrature. `quad_order`, when given, is the
/// minimum total node count and must be at least `2n`.
pub fn gram(spec: &EnsembleSpec, x: f64, quad_order: Option<usize>) -> Result<GramCache> {
    require_unitary(spec)?;
    let n = spec.n;
    if let Some(m) = quad_order {
        if m < 2 * n {
            return Err(Error::OutOfRange {
                value: m as f64,
                lo: 2.0 * n as f64,
                hi: f64::INFINITY,
            });
        }
    }
    if !x.is_finite() {
        return Err(Error::OutOfRange {
            value: x,
            lo: f64::NEG_INFINITY,
            hi: f64::INFINITY,
        });
    }
    let wave = family_of(spec)?;
    let alpha = spec.alpha().unwrap_or(0.0);
    let (upper, _) = right_cutoff(spec, &wave, alpha)?;
    let lower = match spec.family {
        Family::Gaussian => x.max(-upper),
        Family::Laguerre => x.max(0.0),
    };
    let identity = |spec: &EnsembleSpec| GramCache {
        spec: *spec,
        x,
        gram: DMatrix::identity(n, n),
        eigenvalues: vec![1.0; n],
    };
    if spec.family == Family::Laguerre && x <= 0.0 {
        return Ok(identity(spec));
    }
    if lower >= upper {
        return Ok(GramCache {
            spec: *spec,
            x,
            gram: DMatrix::zeros(n, n),
            eigenvalues: vec![0.0; n],
        });
    }

    // Diagonal by quadrature.
    let mut edges = panels(spec, alpha, lower, upper);
    if let Some(m) = quad_order {
        while (edges.len() - 1) * PANEL_NODES < m {
            edges = refine(&edges);
        }
    }
    let rule = GaussLegendre::new(PANEL_NODES);
    let mut diag = vec![0.0; n];
    for w in edges.windows(2) {
        let (xs, ws) = rule.mapped(w[0], w[1]);
        for (&y, &wt) in xs.iter().zip(&ws) {
            let v = wave.all(n, y)?;
            for (d, phi) in diag.iter_mut().zip(&v) {
                *d += wt * phi * phi;
            }
        }
    }

    // Off-diagonal by the Wronskian identity at the left end. Below the
    // Gaussian cutoff every function is negligible and the entries vanish.
    let mut a = DMatrix::zeros(n, n);
    for (j, d) in diag.iter().enumerate() {
        a[(j, j)] = *d;
    }
    if spec.family == Family::Laguerre || x > -upper {
        let vals = wave.all(n + 1, x)?;
        let ders = derivatives(spec, alpha, x, &vals);
        for j in 0..n {
            for k in 0..j {
                let w = vals[j] * ders[k] - ders[j] * vals[k];
                let v = match spec.family {
                    // (phi_j phi_k' - phi_j' phi_k)' = 2 (j - k) phi_j phi_k
                    Family::Gaussian => -w / (2.0 * (j as f64 - k as f64)),
                    // (y (phi_j phi_k' - phi_j' phi_k))' = (j - k) phi_j phi_k
                    Family::Laguerre => -x * w / (j as f64 - k as f64),
                };
                a[(j, k)] = v;
                a[(k, j)] = v;
            }
        }
    }
    let eigenvalues = symmetric_eigenvalues(&a);
    Ok(GramCache {
        spec: *spec,
        x,
        gram: a,
        eigenvalues,
    })
}

fn refine(edges: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * edges.len());
    for w in edges.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*edges.last().unwrap());
    out
}

/// `phi_j'(x)` for `j < n` from values `phi_0..=phi_n`.
fn derivatives(spec: &EnsembleSpec, alpha: f64, x: f64, vals: &[f64]) -> Vec<f64> {
    let n = vals.len() - 1;
    (0..n)
        .map(|j| {
            let jf = j as f64;
            match spec.family {
                Family::Gaussian => {
                    let down = if j > 0 {
                        (jf / 2.0).sqrt() * vals[j - 1]
                    } else {
                        0.0
                    };
                    down - ((jf + 1.0) / 2.0).sqrt() * vals[j + 1]
                }
                Family::Laguerre => {
                    // x phi_j' = (j + alpha/2 - x/2) phi_j - sqrt(j (j + alpha)) phi_{j-1}
                    let down = if j > 0 {
                        (jf * (jf + alpha)).sqrt() * vals[j - 1]
                    } else {
                        0.0
                    };
                    ((jf + 0.5 * alpha - 0.5 * x) * vals[j] - down) / x
                }
            }
        })
        .collect()
}

/// Jet of `prod (1 - xi lambda_i)` about `xi_star`, truncated at order `order`.
pub fn e2n_jet(cache: &GramCache, xi_star: f64, order: usize) -> Jet {
    let mut jet = Jet::constant(xi_star, order, 1.0);
    for &l in &cache.eigenvalues {
        jet.mul_linear(1.0 - xi_star * l, -l);
    }
    jet
}

/// Gap probabilities `P(exactly k levels in (x, inf))`, `k = 0..=n`.
pub fn gap_probabilities(cache: &GramCache) -> Vec<f64> {
    let n = cache.eigenvalues.len();
    let jet = e2n_jet(cache, 1.0, n);
    jet.coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 0 { *c } else { -*c })
        .collect()
}

/// `P(x_(n-k) <= x)`: at most `k` levels above `x`.
pub fn kth_largest_finite_cdf(spec: &EnsembleSpec, k: usize, x: f64) -> Result<f64> {
    require_unitary(spec)?;
    if k >= spec.n {
        return Err(Error::IndexOutOfRange {
            index: k,
            max: spec.n - 1,
        });
    }
    let cache = gram(spec, x, None)?;
    Ok(induced_from_jet(&e2n_jet(&cache, 1.0, k), k))
}

/// Soft-edge scaling of a beta = 2 ensemble at its own index.
pub fn unitary_scaling(spec: &EnsembleSpec) -> Result<ScalingParams> {
    require_unitary(spec)?;
    let index = match spec.family {
        Family::Gaussian => EffectiveIndex::gaussian(spec.n as f64),
        Family::Laguerre => EffectiveIndex::laguerre(spec.n as f64, spec.p.unwrap_or(0.0)),
    };
    scaling(&index)
}

/// `E_{2,n}(mu_n + sigma_n s; xi)`.
pub fn e2n_scaled(spec: &EnsembleSpec, s: f64, xi: f64) -> Result<f64> {
    let sc = unitary_scaling(spec)?;
    Ok(gram(spec, sc.level(s), None)?.e2n(xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::airy::erfc;
    use crate::fredholm::{limit_f, LimitTarget};

    fn gue(n: usize) -> EnsembleSpec {
        EnsembleSpec::gaussian(Beta::Unitary, n).unwrap()
    }

    /// erfc by its Maclaurin series, independent of the library routine.
    fn erfc_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..80 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum
    }

    #[test]
    fn ground_state_examples() {
        let c = gram(&gue(1), 0.0, None).unwrap();
        assert!((c.gram[(0, 0)] - 0.5).abs() < 1e-14);
        let c = gram(&gue(1), 1.0, None).unwrap();
        let want = 1.0 - 0.7 * erfc_series(1.0) / 2.0;
        assert!((c.e2n(0.7) - want).abs() < 1e-13);
        assert!((erfc(1.0) - erfc_series(1.0)).abs() < 1e-14);
    }

    #[test]
    fn far_left_gives_powers() {
        for n in 1..=10 {
            let c = gram(&gue(n), -30.0, None).unwrap();
            let xi: f64 = 0.37;
            assert!((c.e2n(xi) - (1.0 - xi).powi(n as i32)).abs() < 1e-10);
        }
        let lue = EnsembleSpec::laguerre(Beta::Unitary, 6, 9.0).unwrap();
        let c = gram(&lue, -1.0, None).unwrap();
        assert!((c.e2n(0.5) - 0.5f64.powi(6)).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_in_unit_interval() {
        for spec in [
            gue(40),
            EnsembleSpec::laguerre(Beta::Unitary, 30, 45.0).unwrap(),
            EnsembleSpec::laguerre(Beta::Unitary, 12, 11.5).unwrap(),
        ] {
            let sc = unitary_scaling(&spec).unwrap();
            for s in [-8.0, -3.0, 0.0, 2.0] {
                let c = gram(&spec, sc.level(s), None).unwrap();
                assert!(c
                    .eigenvalues
                    .iter()
                    .all(|&l| (-1e-10..=1.0 + 1e-10).contains(&l)));
                assert!((&c.gram - c.gram.transpose()).amax() == 0.0);
            }
        }
    }

    #[test]
    fn wronskian_matches_quadrature() {
        // Brute-force Gram entries with a fine uniform rule.
        for spec in [
            gue(12),
            EnsembleSpec::laguerre(Beta::Unitary, 10, 14.5).unwrap(),
        ] {
            let sc = unitary_scaling(&spec).unwrap();
            let x = sc.level(-1.3);
            let c = gram(&spec, x, None).unwrap();
            let wave = family_of(&spec).unwrap();
            let rule = GaussLegendre::new(60);
            let mut a = DMatrix::<f64>::zeros(spec.n, spec.n);
            let mut lo = x;
            while lo < x + 80.0 {
                let (xs, ws) = rule.mapped(lo, lo + 0.5);
                for (&y, &w) in xs.iter().zip(&ws) {
                    let v = wave.all(spec.n, y).unwrap();
                    for j in 0..spec.n {
                        for k in 0..spec.n {
                            a[(j, k)] += w * v[j] * v[k];
                        }
                    }
                }
                lo += 0.5;
            }
            assert!((&a - &c.gram).amax() < 1e-12, "{:?}", spec.family);
        }
    }

    #[test]
    fn gap_probabilities_complete() {
        for spec in [
            gue(15),
            EnsembleSpec::laguerre(Beta::Unitary, 15, 20.0).unwrap(),
        ] {
            let sc = unitary_scaling(&spec).unwrap();
            for s in [-4.0, -1.0, 1.5] {
                let c = gram(&spec, sc.level(s), None).unwrap();
                let g = gap_probabilities(&c);
                assert!(g.iter().all(|&v| v > -1e-12));
                assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!((g[0] - c.e2n(1.0)).abs() < 1e-15);
                let d = e2n_jet(&c, 0.0, 1).coeffs[1];
                assert!((-d - c.expected_count()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn polynomial_in_xi() {
        let spec = gue(9);
        let c = gram(&spec, 1.2, None).unwrap();
        let jet = e2n_jet(&c, 0.0, 9);
        assert!((jet.eval(1.0) - c.e2n(1.0)).abs() < 1e-10);
    }

    #[test]
    fn kth_largest_properties() {
        let spec = gue(10);
        let sc = unitary_scaling(&spec).unwrap();
        // k = n - 1 is the smallest level: its CDF runs from 0 to 1.
        assert!(kth_largest_finite_cdf(&spec, 9, -40.0).unwrap().abs() < 1e-12);
        assert!((kth_largest_finite_cdf(&spec, 9, 40.0).unwrap() - 1.0).abs() < 1e-12);
        let v = kth_largest_finite_cdf(&spec, 0, sc.mu).unwrap();
        assert!(v > 0.0 && v < 1.0);
        for k in [0, 2] {
            let mut prev = -1.0;
            for i in 0..30 {
                let x = sc.level(-5.0 + 0.3 * i as f64);
                let v = kth_largest_finite_cdf(&spec, k, x).unwrap();
                assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
        assert!(kth_largest_finite_cdf(&spec, 10, 0.0).is_err());
        let goe = EnsembleSpec::gaussian(Beta::Orthogonal, 4).unwrap();
        assert!(gram(&goe, 0.0, None).is_err());
        assert!(gram(&gue(4), 0.0, Some(7)).is_err());
    }

    #[test]
    fn converges_to_limit_at_rate_h() {
        for xi in [0.5, 1.0] {
            let mut errs = Vec::new();
            let ns = [20usize, 40, 80, 160];
            for &n in &ns {
                let spec = gue(n);
                let sup = (0..=18)
                    .map(|i| {
                        let s = -6.0 + 0.5 * i as f64;
                        let e = e2n_scaled(&spec, s, xi).unwrap();
                        (e - limit_f(LimitTarget::F2, s, xi).unwrap()).abs()
                    })
                    .fold(0.0, f64::max);
                errs.push(sup);
            }
            let hs: Vec<f64> = ns
                .iter()
                .map(|&n| unitary_scaling(&gue(n)).unwrap().h)
                .collect();
            let slope = (errs[3] / errs[0]).ln() / (hs[3] / hs[0]).ln();
            assert!((slope - 1.0).abs() < 0.2, "xi={xi} slope={slope}");
        }
    }
}
