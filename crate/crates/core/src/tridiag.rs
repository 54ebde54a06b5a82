//! Eigenvalues of real symmetric tridiagonal matrices by the implicit-shift QL
//! iteration, and of dense symmetric matrices via Householder reduction.

use nalgebra::{DMatrix, SymmetricTridiagonal};

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal `d`
/// and off-diagonal `e` (`e.len() == d.len() - 1`). Values only.
pub fn tridiagonal_eigenvalues(d: &[f64], e: &[f64]) -> Vec<f64> {
    let n = d.len();
    assert!(n == 0 || e.len() + 1 == n, "off-diagonal length mismatch");
    let mut d = d.to_vec();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    ql_implicit(&mut d, &mut e);
    d.sort_by(|a, b| a.total_cmp(b));
    d
}

/// In-place implicit QL with Wilkinson-type shifts; `e[n-1]` is workspace.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    if n <= 1 {
        return;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible off-diagonal element to split the matrix.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m] == 0.0 {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut early = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    early = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if early {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

/// Eigenvalues (ascending) of a dense symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![a[(0, 0)]];
    }
    let tri = SymmetricTridiagonal::new(a.clone());
    let d: Vec<f64> = tri.diagonal().iter().copied().collect();
    let e: Vec<f64> = tri.off_diagonal().iter().copied().collect();
    tridiagonal_eigenvalues(&d, &e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn discrete_laplacian() {
        let n = 50;
        let vals = tridiagonal_eigenvalues(&vec![2.0; n], &vec![-1.0; n - 1]);
        for (k, v) in vals.iter().enumerate() {
            let want = 2.0 - 2.0 * (PI * (k + 1) as f64 / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-13);
        }
    }

    #[test]
    fn dense_matches_trace_and_known_values() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        let v = symmetric_eigenvalues(&a);
        let want = [2.0 - 2f64.sqrt(), 2.0, 2.0 + 2f64.sqrt()];
        for (x, y) in v.iter().zip(want) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn graded_and_split_matrices() {
        // Off-diagonal zeros split the problem; tiny entries must not produce NaN.
        let d = [1.0, 1e-200, 3.0, -2.0, 0.0];
        let e = [0.0, 1e-160, 1e-300, 4.0];
        let v = tridiagonal_eigenvalues(&d, &e);
        assert!(v.iter().all(|x| x.is_finite()));
        let sum: f64 = v.iter().sum();
        assert!((sum - 2.0).abs() < 1e-14);
    }
}
