//! Small dense linear-algebra helpers for the simulator.
//!
//! Matrices are flat row-major slices. Sizes never exceed 16x16 (four
//! qubits), so simple cubic algorithms are perfectly adequate.

use num_complex::Complex;

use crate::scalar::{real, Real};

/// `out = a * b` for square `dim x dim` complex matrices.
pub fn mat_mul<R: Real>(a: &[Complex<R>], b: &[Complex<R>], dim: usize) -> Vec<Complex<R>> {
    debug_assert_eq!(a.len(), dim * dim);
    debug_assert_eq!(b.len(), dim * dim);
    let zero = Complex::new(R::zero(), R::zero());
    let mut out = vec![zero; dim * dim];
    for r in 0..dim {
        for k in 0..dim {
            let ark = a[r * dim + k];
            if ark == zero {
                continue;
            }
            for c in 0..dim {
                out[r * dim + c] = out[r * dim + c] + ark * b[k * dim + c];
            }
        }
    }
    out
}

/// Conjugate transpose of a square complex matrix.
pub fn dagger<R: Real>(m: &[Complex<R>], dim: usize) -> Vec<Complex<R>> {
    let mut out = vec![Complex::new(R::zero(), R::zero()); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            out[c * dim + r] = m[r * dim + c].conj();
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// The complex matrix `H = A + iB` is embedded as the real symmetric
/// `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
/// doubled; a cyclic Jacobi iteration then diagonalizes the embedding.
pub fn hermitian_eigenvalues<R: Real>(m: &[Complex<R>], dim: usize) -> Vec<R> {
    debug_assert_eq!(m.len(), dim * dim);
    let n = 2 * dim;
    let mut a = vec![R::zero(); n * n];
    for r in 0..dim {
        for c in 0..dim {
            let v = m[r * dim + c];
            a[r * n + c] = v.re;
            a[(r + dim) * n + (c + dim)] = v.re;
            a[r * n + (c + dim)] = -v.im;
            a[(r + dim) * n + c] = v.im;
        }
    }
    let mut eigs = jacobi_symmetric_eigenvalues(&mut a, n);
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    // Every eigenvalue of H appears twice in the embedding; keep one copy.
    eigs.into_iter().step_by(2).collect()
}

/// Cyclic Jacobi sweeps on a real symmetric matrix (destroys `a`).
fn jacobi_symmetric_eigenvalues<R: Real>(a: &mut [R], n: usize) -> Vec<R> {
    let tol = R::epsilon() * real::<R>(64.0);
    for _sweep in 0..64 {
        let mut off = R::zero();
        for r in 0..n {
            for c in (r + 1)..n {
                off += a[r * n + c] * a[r * n + c];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol * real::<R>(1e-3) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // Classic Jacobi rotation zeroing a[p][q].
                let theta = (aqq - app) / (real::<R>(2.0) * apq);
                let t = {
                    let sign = if theta >= R::zero() { R::one() } else { -R::one() };
                    sign / (theta.abs() + (theta * theta + R::one()).sqrt())
                };
                let c = R::one() / (t * t + R::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
