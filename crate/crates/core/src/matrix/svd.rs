//! Singular value decomposition via one-sided Jacobi rotations, plus the
//! numerical rank built on it.
//!
//! One-sided Jacobi is slow for large matrices but converges to high relative
//! accuracy and handles complex entries with no special casing, which is what
//! the rank-driven analysis downstream needs.

use num_complex::Complex64;

use super::qr::complete_to_unitary;
use super::{ComplexMatrix, MatrixError};

const MAX_SWEEPS: usize = 128;
const JACOBI_TOL: f64 = 1e-14;

/// Thin SVD `A = U diag(σ) V^H` with `σ` sorted descending,
/// `U` m x k, `V` n x k, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Orthogonalizes the columns of `work` (m x n, m >= n) by plane rotations,
/// accumulating the rotations into `v` (n x n).
fn jacobi_orthogonalize(work: &mut ComplexMatrix, v: &mut ComplexMatrix) -> Result<(), MatrixError> {
    let (m, n) = work.shape();
    debug_assert!(m >= n);
    let mut worst = 0.0_f64;
    for _sweep in 0..MAX_SWEEPS {
        worst = 0.0;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::ZERO;
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    app += wp.norm_sqr();
                    aqq += wq.norm_sqr();
                    apq += wp.conj() * wq;
                }
                let scale = (app * aqq).sqrt();
                if scale == 0.0 {
                    continue;
                }
                let off = apq.norm() / scale;
                worst = worst.max(off);
                if off <= JACOBI_TOL {
                    continue;
                }
                rotated = true;
                // Eigenvectors of the 2x2 Hermitian Gram block [[app, apq], [apq^*, aqq]].
                let mid = 0.5 * (app + aqq);
                let diff = 0.5 * (app - aqq);
                let rad = (diff * diff + apq.norm_sqr()).sqrt();
                let lambda_top = mid + rad;
                // Pick the eigenvector form that avoids cancellation.
                let (x, y) = if app >= aqq {
                    (Complex64::new(lambda_top - aqq, 0.0), apq.conj())
                } else {
                    (apq, Complex64::new(lambda_top - app, 0.0))
                };
                let vn = (x.norm_sqr() + y.norm_sqr()).sqrt();
                let (x, y) = (x / vn, y / vn);
                // J = [[x, -y^*], [y, x^*]] is unitary; J^H G J is diagonal
                // with the larger eigenvalue moved to position p.
                for i in 0..m {
                    let wp = work[(i, p)];
                    let wq = work[(i, q)];
                    work[(i, p)] = x * wp + y * wq;
                    work[(i, q)] = -y.conj() * wp + x.conj() * wq;
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = x * vp + y * vq;
                    v[(i, q)] = -y.conj() * vp + x.conj() * vq;
                }
            }
        }
        if !rotated {
            return Ok(());
        }
    }
    Err(MatrixError::SvdNonConvergence {
        sweeps: MAX_SWEEPS,
        residual: worst,
    })
}

/// SVD of a matrix with `m >= n`; returns (U m x n, σ, V n x n).
fn svd_tall(a: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix), MatrixError> {
    let (m, n) = a.shape();
    let mut work = a.clone();
    let mut v = ComplexMatrix::identity(n);
    jacobi_orthogonalize(&mut work, &mut v)?;

    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|j| (0..m).map(|i| work[(i, j)].norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let zero_tol = sigma_max * f64::EPSILON * (m.max(n) as f64);

    let v_sorted = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    let mut u = ComplexMatrix::zeros(m, n);
    let mut nonzero = 0;
    for (jj, &j) in order.iter().enumerate() {
        if sigma[jj] > zero_tol && sigma[jj] > 0.0 {
            for i in 0..m {
                u[(i, jj)] = work[(i, j)] / sigma[jj];
            }
            nonzero = jj + 1;
        }
    }
    if nonzero < n {
        // Columns past the numerical rank carry no direction information;
        // fill them with an orthonormal complement so U stays column-orthonormal.
        let filled = if nonzero == 0 {
            ComplexMatrix::identity(m).block(0..m, 0..n)
        } else {
            let base = u.block(0..m, 0..nonzero);
            let completed = complete_to_unitary(&base);
            completed.block(0..m, 0..n)
        };
        u = filled;
    }
    Ok((u, sigma, v_sorted))
}

/// Thin SVD with singular values sorted descending.
pub fn svd(a: &ComplexMatrix) -> Result<Svd, MatrixError> {
    let (m, n) = a.shape();
    if m >= n {
        let (u, sigma, v) = svd_tall(a)?;
        Ok(Svd {
            u,
            singular_values: sigma,
            v,
        })
    } else {
        let (u, sigma, v) = svd_tall(&a.hermitian())?;
        // A^H = U Σ V^H  ⇒  A = V Σ U^H.
        Ok(Svd {
            u: v,
            singular_values: sigma,
            v: u,
        })
    }
}

/// Full SVD: `U` m x m and `V` n x n unitary, σ of length min(m, n).
pub(crate) fn svd_full(
    a: &ComplexMatrix,
) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix), MatrixError> {
    let thin = svd(a)?;
    let (m, n) = a.shape();
    let u = if thin.u.cols() < m {
        complete_to_unitary(&thin.u)
    } else {
        thin.u
    };
    let v = if thin.v.cols() < n {
        complete_to_unitary(&thin.v)
    } else {
        thin.v
    };
    Ok((u, thin.singular_values, v))
}

/// Default rank tolerance: `max(rows, cols) * machine-epsilon * σ_max`.
pub fn default_rank_tolerance(rows: usize, cols: usize, sigma_max: f64) -> f64 {
    rows.max(cols) as f64 * f64::EPSILON * sigma_max
}

/// Number of singular values strictly above the tolerance.
pub fn numerical_rank(a: &ComplexMatrix, tol: Option<f64>) -> Result<usize, MatrixError> {
    let sv = svd(a)?.singular_values;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let threshold = tol.unwrap_or_else(|| default_rank_tolerance(a.rows(), a.cols(), sigma_max));
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}

/// Rank against an explicit absolute singular-value threshold.
pub fn numerical_rank_with_tol(a: &ComplexMatrix, threshold: f64) -> Result<usize, MatrixError> {
    let sv = svd(a)?.singular_values;
    Ok(sv.iter().filter(|&&s| s > threshold).count())
}
