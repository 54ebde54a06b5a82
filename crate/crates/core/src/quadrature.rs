//! Gauss–Legendre rules and Chebyshev–Lobatto machinery.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an m-point Gauss–Legendre rule on (-1, 1).
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Rules are cached per size; repeated calls are cheap.
    pub fn new(m: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&m) {
            return rule.clone();
        }
        let rule = Arc::new(Self::compute(m));
        cache.lock().unwrap().insert(m, rule.clone());
        rule
    }

    fn compute(m: usize) -> GaussLegendre {
        assert!(m >= 1);
        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let mf = m as f64;
        for i in 0..(m + 1) / 2 {
            // Tricomi initial guess followed by Newton on P_m.
            let theta = PI * (4.0 * i as f64 + 3.0) / (4.0 * mf + 2.0);
            let mut x = (1.0 - (mf - 1.0) / (8.0 * mf * mf * mf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(m, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(m, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[m - 1 - i] = x;
            weights[i] = w;
            weights[m - 1 - i] = w;
        }
        if m % 2 == 1 {
            nodes[m / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .sum::<f64>()
            * half
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| w * half).collect();
        (x, w)
    }
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if m == 0 {
        return (1.0, 0.0);
    }
    let d = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Chebyshev–Lobatto points `cos(pi j / n)`, j = 0..=n, ordered from +1 down to -1.
pub fn cheb_points(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![1.0];
    }
    (0..=n).map(|j| (PI * j as f64 / n as f64).cos()).collect()
}

/// Spectral differentiation matrix on the Chebyshev–Lobatto points (row-major).
///
/// Diagonal entries use the negative-sum trick.
pub fn cheb_diff_matrix(n: usize) -> Vec<Vec<f64>> {
    let x = cheb_points(n);
    let c = |j: usize| -> f64 {
        let base = if j == 0 || j == n { 2.0 } else { 1.0 };
        if j % 2 == 0 {
            base
        } else {
            -base
        }
    };
    let mut d = vec![vec![0.0; n + 1]; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            if i != j {
                d[i][j] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    for (i, row) in d.iter_mut().enumerate() {
        let s: f64 = row
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, v)| v)
            .sum();
        row[i] = -s;
    }
    d
}

/// Chebyshev coefficients of the interpolant through values at `cheb_points(n)`.
pub fn cheb_coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len() - 1;
    if n == 0 {
        return vec![values[0]];
    }
    let nf = n as f64;
    (0..=n)
        .map(|k| {
            let mut s = 0.0;
            for (j, &v) in values.iter().enumerate() {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                s += w * v * (PI * (j * k) as f64 / nf).cos();
            }
            let scale = if k == 0 || k == n { 1.0 / nf } else { 2.0 / nf };
            s * scale
        })
        .collect()
}

/// Coefficients of the derivative of a Chebyshev series.
pub fn cheb_derivative_coefficients(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut d = vec![0.0; n + 1];
    for k in (1..n).rev() {
        d[k - 1] = d[k + 1] + 2.0 * k as f64 * c[k];
    }
    d[0] *= 0.5;
    d.truncate(n - 1);
    d
}

/// Coefficients of the antiderivative of a Chebyshev series, normalized to vanish at `t = -1`.
pub fn cheb_integral_coefficients(c: &[f64]) -> Vec<f64> {
    let n = c.len();
    let get = |k: usize| c.get(k).copied().unwrap_or(0.0);
    let mut b = vec![0.0; n + 1];
    for (k, bk) in b.iter_mut().enumerate().skip(1) {
        *bk = if k == 1 {
            get(0) - 0.5 * get(2)
        } else {
            (get(k - 1) - get(k + 1)) / (2.0 * k as f64)
        };
    }
    // T_k(-1) = (-1)^k.
    let at_minus_one: f64 = b
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, v)| if k % 2 == 0 { *v } else { -*v })
        .sum();
    b[0] = -at_minus_one;
    b
}

/// Clenshaw evaluation of a Chebyshev series at `t` in [-1, 1].
pub fn cheb_eval(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &ck in c.iter().skip(1).rev() {
        let b0 = 2.0 * t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c.first().copied().unwrap_or(0.0)
}

/// Clenshaw–Curtis weights for the Chebyshev–Lobatto points on [-1, 1].
pub fn clenshaw_curtis_weights(n: usize) -> Vec<f64> {
    if n == 0 {
        return vec![2.0];
    }
    let nf = n as f64;
    let mut w = vec![0.0; n + 1];
    for (j, wj) in w.iter_mut().enumerate() {
        let theta = PI * j as f64 / nf;
        let mut s = 0.0;
        for k in 0..=n / 2 {
            let bk = if k == 0 || 2 * k == n { 1.0 } else { 2.0 };
            let denom = 1.0 - 4.0 * (k * k) as f64;
            s += bk * (2.0 * k as f64 * theta).cos() / denom;
        }
        let cj = if j == 0 || j == n { 1.0 } else { 2.0 };
        *wj = cj * s / nf;
    }
    w
}

/// Barycentric interpolation through Chebyshev–Lobatto points.
pub fn cheb_barycentric(points: &[f64], values: &[f64], t: f64) -> f64 {
    let n = points.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for (j, (&x, &v)) in points.iter().zip(values).enumerate() {
        let diff = t - x;
        if diff == 0.0 {
            return v;
        }
        let mut w = if j % 2 == 0 { 1.0 } else { -1.0 };
        if j == 0 || j == n {
            w *= 0.5;
        }
        num += w * v / diff;
        den += w / diff;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        for m in [1, 2, 5, 20, 81] {
            let rule = GaussLegendre::new(m);
            let total: f64 = rule.weights.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "m={m}");
            let deg = 2 * m - 1;
            let val = rule.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((val - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn gauss_legendre_large_rule() {
        let rule = GaussLegendre::new(1500);
        let val = rule.integrate(0.0, PI, f64::sin);
        assert!((val - 2.0).abs() < 1e-12);
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn chebyshev_roundtrip_and_derivative() {
        let n = 30;
        let pts = cheb_points(n);
        let vals: Vec<f64> = pts.iter().map(|&t| (2.0 * t).exp()).collect();
        let c = cheb_coefficients(&vals);
        assert!((cheb_eval(&c, 0.3) - 0.6f64.exp()).abs() < 1e-14);
        let ic = cheb_integral_coefficients(&c);
        let want = ((1.2f64).exp() - (-2.0f64).exp()) / 2.0;
        assert!((cheb_eval(&ic, 0.6) - want).abs() < 1e-14);
        let dc = cheb_derivative_coefficients(&c);
        assert!((cheb_eval(&dc, 0.3) - 2.0 * 0.6f64.exp()).abs() < 1e-12);
        let d = cheb_diff_matrix(n);
        let dv: f64 = d[7].iter().zip(&vals).map(|(a, b)| a * b).sum();
        assert!((dv - 2.0 * (2.0 * pts[7]).exp()).abs() < 1e-10);
        assert!((cheb_barycentric(&pts, &vals, -0.77) - (-1.54f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn clenshaw_curtis_integrates() {
        let n = 24;
        let w = clenshaw_curtis_weights(n);
        let pts = cheb_points(n);
        let val: f64 = pts.iter().zip(&w).map(|(&t, &w)| w * t.exp()).sum();
        assert!((val - (1f64.exp() - (-1f64).exp())).abs() < 1e-14);
    }
}
