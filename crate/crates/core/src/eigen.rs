//! Dense symmetric eigensolver based on cyclic Jacobi rotations.
//!
//! Each sweep visits every off-diagonal pair (p, q) in row order and applies
//! the plane rotation that annihilates `a[p][q]`. Later rotations partially
//! undo earlier zeros but the off-diagonal mass decreases monotonically, and
//! convergence is quadratic once the matrix is nearly diagonal. Eigenvectors
//! are not accumulated; the spectrum is all we need here.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Stop once the off-diagonal Frobenius norm drops below this.
const OFF_NORM_TOL: f64 = 1e-12;
/// Hard cap on sweeps; desk-scale symmetric matrices converge in far fewer.
const MAX_SWEEPS: usize = 100;

/// Frobenius norm of the off-diagonal part.
fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += 2.0 * a[(i, j)] * a[(i, j)];
        }
    }
    sum.sqrt()
}

/// Eigenvalues of a symmetric matrix, sorted ascending.
///
/// The input is consumed as working storage. Symmetry is the caller's
/// responsibility; only the upper triangle drives the rotations but both
/// triangles are updated to keep the working matrix symmetric.
pub(crate) fn symmetric_eigenvalues(mut a: DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    debug_assert_eq!(n, a.ncols());
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![a[(0, 0)]]);
    }

    let mut converged = false;
    let mut last_off = off_diagonal_norm(&a);
    for _ in 0..MAX_SWEEPS {
        if last_off < OFF_NORM_TOL {
            converged = true;
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                // Rotation angle that zeroes a[(p, q)] (Golub & Van Loan, sym.schur2).
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(p, k)] = a[(k, p)];
                    a[(k, q)] = s * akp + c * akq;
                    a[(q, k)] = a[(k, q)];
                }
                a[(p, p)] -= t * apq;
                a[(q, q)] += t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
            }
        }
        last_off = off_diagonal_norm(&a);
    }
    if !converged && last_off >= OFF_NORM_TOL {
        return Err(Error::EigenNoConvergence {
            sweeps: MAX_SWEEPS,
            off_norm: last_off,
        });
    }

    let mut eig: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}
