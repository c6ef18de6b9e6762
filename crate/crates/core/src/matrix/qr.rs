//! Householder QR factorization for complex matrices.

use num_complex::Complex64;

use super::{ComplexMatrix, MatrixError};

/// Thin QR factorization `A = Q R` with `Q` (m x k) column-orthonormal and
/// `R` (k x n) upper triangular, `k = min(m, n)`.
#[derive(Debug, Clone)]
pub struct Qr {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
}

/// Householder reflectors of `A`, applied in place; `work` ends up upper
/// triangular. Each reflector is the unit vector of `I - 2 w w^H`, supported
/// on rows `k..m`.
fn householder_reduce(work: &mut ComplexMatrix) -> Vec<Option<Vec<Complex64>>> {
    let (m, n) = work.shape();
    let kmax = m.min(n);
    let mut reflectors = Vec::with_capacity(kmax);
    for k in 0..kmax {
        let mut norm_sq = 0.0;
        for i in k..m {
            norm_sq += work[(i, k)].norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm <= f64::EPSILON * 16.0 * (m as f64) {
            // Column already (numerically) zero below and at the pivot.
            reflectors.push(None);
            continue;
        }
        let x0 = work[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            Complex64::ONE
        };
        let alpha = -phase * norm;
        // v = x - alpha e1; the sign choice makes |v_0| = |x_0| + ‖x‖.
        let mut v: Vec<Complex64> = (k..m).map(|i| work[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm <= f64::EPSILON * norm {
            reflectors.push(None);
            continue;
        }
        for z in &mut v {
            *z /= vnorm;
        }
        // Apply H = I - 2 v v^H to the trailing block.
        for j in k..n {
            let mut dot = Complex64::ZERO;
            for i in k..m {
                dot += v[i - k].conj() * work[(i, j)];
            }
            dot *= 2.0;
            for i in k..m {
                let upd = dot * v[i - k];
                work[(i, j)] -= upd;
            }
        }
        work[(k, k)] = alpha;
        for i in (k + 1)..m {
            work[(i, k)] = Complex64::ZERO;
        }
        reflectors.push(Some(v));
    }
    reflectors
}

/// Accumulates `Q = H_0 H_1 ... H_{k-1}` from stored reflectors.
fn accumulate_q(m: usize, reflectors: &[Option<Vec<Complex64>>]) -> ComplexMatrix {
    let mut q = ComplexMatrix::identity(m);
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(v) = refl else { continue };
        for j in 0..m {
            let mut dot = Complex64::ZERO;
            for i in k..m {
                dot += v[i - k].conj() * q[(i, j)];
            }
            dot *= 2.0;
            for i in k..m {
                let upd = dot * v[i - k];
                q[(i, j)] -= upd;
            }
        }
    }
    q
}

/// Thin Householder QR. `Q` has orthonormal columns and `Q R = A` up to
/// working precision.
pub fn qr_decompose(a: &ComplexMatrix) -> Result<Qr, MatrixError> {
    let (q_full, r_full) = qr_full(a)?;
    let (m, n) = a.shape();
    let k = m.min(n);
    Ok(Qr {
        q: q_full.block(0..m, 0..k),
        r: r_full.block(0..k, 0..n),
    })
}

/// Full QR: `Q` is m x m unitary, `R` is m x n upper triangular.
pub(crate) fn qr_full(a: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix), MatrixError> {
    let mut work = a.clone();
    let reflectors = householder_reduce(&mut work);
    let q = accumulate_q(a.rows(), &reflectors);
    Ok((q, work))
}

/// Extends a column-orthonormal `n x p` matrix (`p <= n`) to an `n x n`
/// unitary whose first `p` columns are exactly the input columns.
pub(crate) fn complete_to_unitary(cols: &ComplexMatrix) -> ComplexMatrix {
    let (n, p) = cols.shape();
    debug_assert!(p <= n);
    if p == n {
        return cols.clone();
    }
    debug_assert!(cols.orthonormal_defect() < 1e-8, "completion needs orthonormal input");
    let (q, _) = qr_full(cols).expect("qr of validated matrix");
    // The trailing columns of Q span the orthogonal complement of col(cols).
    cols.hstack(&q.block(0..n, p..n))
}
