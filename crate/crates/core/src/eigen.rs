//! Eigenvalues of dense real symmetric matrices.
//!
//! Full spectra come from cyclic Jacobi rotations; the exhaustive sweeps,
//! which only need the largest eigenvalue, use tridiagonalization plus
//! bisection instead.

use crate::error::{OimError, Result};

/// Asymmetry accepted on input, relative to `max(1, ||A||_F)`.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Convergence when the off-diagonal Frobenius norm drops below this fraction of `||A||_F`.
pub const CONVERGENCE_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 64;

/// All eigenvalues of the symmetric row-major `n x n` matrix `a`, in descending order.
///
/// The input is symmetrized by averaging before the rotations start.
pub fn symmetric_eigenvalues(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(OimError::DimensionMismatch { expected: n * n, got: a.len() });
    }
    if let Some(i) = a.iter().position(|x| !x.is_finite()) {
        return Err(OimError::NonFinite(format!("matrix entry ({}, {})", i / n, i % n)));
    }
    let norm = frobenius(a);
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            asym = asym.max((a[i * n + j] - a[j * n + i]).abs());
        }
    }
    if asym > SYMMETRY_TOL * norm.max(1.0) {
        return Err(OimError::Asymmetric(asym));
    }

    let mut m = a.to_vec();
    for i in 0..n {
        for j in i + 1..n {
            let avg = 0.5 * (m[i * n + j] + m[j * n + i]);
            m[i * n + j] = avg;
            m[j * n + i] = avg;
        }
    }
    jacobi_in_place(n, &mut m, norm)?;
    let mut eig: Vec<f64> = (0..n).map(|i| m[i * n + i]).collect();
    eig.sort_unstable_by(|x, y| y.total_cmp(x));
    Ok(eig)
}

pub(crate) fn frobenius(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn off_diagonal_norm(n: usize, a: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += 2.0 * a[i * n + j] * a[i * n + j];
        }
    }
    s.sqrt()
}

/// Diagonalizes the symmetric matrix `a` in place; eigenvalues end on the diagonal.
fn jacobi_in_place(n: usize, a: &mut [f64], norm: f64) -> Result<()> {
    let target = CONVERGENCE_TOL * norm;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(n, a) <= target {
            return Ok(());
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }
    let off = off_diagonal_norm(n, a);
    if off <= target {
        Ok(())
    } else {
        Err(OimError::NoConvergence { sweeps: MAX_SWEEPS, off })
    }
}

/// Largest eigenvalue of the symmetric row-major matrix `a`, by Householder
/// reduction to tridiagonal form followed by Sturm-sequence bisection.
///
/// Used by the exhaustive sweeps, which only need the top of each spectrum.
/// `a` is overwritten. The caller guarantees symmetry and finiteness.
pub fn largest_eigenvalue_in_place(n: usize, a: &mut [f64]) -> f64 {
    if n == 0 {
        return f64::NAN;
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    tridiagonalize(n, a, &mut diag, &mut off);
    top_of_tridiagonal(&diag, &off)
}

fn tridiagonalize(n: usize, a: &mut [f64], diag: &mut [f64], off: &mut [f64]) {
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let norm2: f64 = (k + 1..n).map(|i| a[i * n + k] * a[i * n + k]).sum();
        diag[k] = a[k * n + k];
        if norm2 == 0.0 {
            off[k] = 0.0;
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let alpha = if x0 >= 0.0 { -norm2.sqrt() } else { norm2.sqrt() };
        off[k] = alpha;
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let vtv = norm2 - 2.0 * x0 * alpha + alpha * alpha;
        let beta = 2.0 / vtv;
        // w = beta A v, then q = w - (beta/2)(v.w) v, A -= v q^T + q v^T
        for i in k + 1..n {
            w[i] = beta * (k + 1..n).map(|j| a[i * n + j] * v[j]).sum::<f64>();
        }
        let kfac = 0.5 * beta * (k + 1..n).map(|i| v[i] * w[i]).sum::<f64>();
        for i in k + 1..n {
            w[i] -= kfac * v[i];
        }
        for i in k + 1..n {
            for j in k + 1..=i {
                let upd = a[i * n + j] - v[i] * w[j] - w[i] * v[j];
                a[i * n + j] = upd;
                a[j * n + i] = upd;
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    diag[n - 1] = a[(n - 1) * n + n - 1];
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let e2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn top_of_tridiagonal(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let radius = |i: usize| {
        (if i > 0 { off[i - 1].abs() } else { 0.0 }) + (if i + 1 < n { off[i].abs() } else { 0.0 })
    };
    let mut lo = (0..n).map(|i| diag[i] - radius(i)).fold(f64::INFINITY, f64::min);
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::NEG_INFINITY, f64::max);
    let scale = lo.abs().max(hi.abs()).max(1.0);
    for _ in 0..200 {
        if hi - lo <= 4.0 * f64::EPSILON * scale {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if sturm_count(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn closed_forms() {
        let e = symmetric_eigenvalues(2, &[-2.0, 1.0, 1.0, -2.0]).unwrap();
        assert!(close(&e, &[-1.0, -3.0], 1e-12), "{e:?}");
        let e = symmetric_eigenvalues(3, &[0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(e, vec![3.0, 0.0, -1.0]);
        let e = symmetric_eigenvalues(3, &[0.0, -1.0, 1.0, -1.0, 0.0, 1.0, 1.0, 1.0, -2.0]).unwrap();
        assert!(close(&e, &[1.0, 0.0, -3.0], 1e-12), "{e:?}");
    }

    #[test]
    fn degenerate_inputs() {
        assert!(symmetric_eigenvalues(0, &[]).unwrap().is_empty());
        assert_eq!(symmetric_eigenvalues(1, &[-0.4]).unwrap(), vec![-0.4]);
        assert!(symmetric_eigenvalues(2, &[0.0; 4]).unwrap().iter().all(|&x| x == 0.0));
        assert!(matches!(symmetric_eigenvalues(2, &[0.0, 1.0, 2.0, 0.0]), Err(OimError::Asymmetric(_))));
        assert!(matches!(symmetric_eigenvalues(1, &[f64::NAN]), Err(OimError::NonFinite(_))));
        assert!(symmetric_eigenvalues(2, &[0.0; 3]).is_err());
        // Tiny asymmetry is averaged away.
        let e = symmetric_eigenvalues(2, &[0.0, 1.0 + 1e-13, 1.0, 0.0]).unwrap();
        assert!(close(&e, &[1.0, -1.0], 1e-12));
    }

    #[test]
    fn top_eigenvalue_small_cases() {
        assert_eq!(largest_eigenvalue_in_place(1, &mut [2.5]), 2.5);
        let top = largest_eigenvalue_in_place(2, &mut [-2.0, 1.0, 1.0, -2.0]);
        assert!((top + 1.0).abs() < 1e-13);
        let top = largest_eigenvalue_in_place(3, &mut [0.0, -1.0, 1.0, -1.0, 0.0, 1.0, 1.0, 1.0, -2.0]);
        assert!((top - 1.0).abs() < 1e-13);
        let top = largest_eigenvalue_in_place(3, &mut [0.0; 9]);
        assert!(top.abs() < 1e-15);
        let mut d = [0.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0, 0.0, -1.0];
        assert!((largest_eigenvalue_in_place(3, &mut d) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn top_eigenvalue_agrees_with_jacobi() {
        let mut state = 0x2545_F491_4F6C_DD1Du64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        for n in 1..=24 {
            let mut a = vec![0.0; n * n];
            for i in 0..n {
                for j in 0..=i {
                    let x = (next() * 4.0).round();
                    a[i * n + j] = x;
                    a[j * n + i] = x;
                }
            }
            let full = symmetric_eigenvalues(n, &a).unwrap();
            let top = largest_eigenvalue_in_place(n, &mut a.clone());
            assert!((full[0] - top).abs() < 1e-11, "n={n}: {} vs {top}", full[0]);
        }
    }
}
