//! CS decomposition of a partitioned matrix with orthonormal columns.
//!
//! For `[Q1; Q2]` with orthonormal columns, produces unitary `U1`, `U2`, `V1`
//! and structured cosine/sine factors `C`, `S` such that `Q1 = U1 C V1^H` and
//! `Q2 = U2 S V1^H`. The block layout puts the identity part of `C` top-left
//! and the identity part of `S` bottom-right, mirroring the shape needed to
//! expose private and common row subspaces of a channel pair.

use num_complex::Complex64;

use super::qr::complete_to_unitary;
use super::svd::{numerical_rank_with_tol, svd_full};
use super::{ComplexMatrix, MatrixError};

/// Structured CS factors. With `n` shared columns and counts `(k, l, m0)`
/// (`k + l + m0 = n`), `C` carries `I_k` top-left followed by the cosine block
/// `diag(c_1..c_l)` (descending, strictly inside (0,1)); `S` carries the sine
/// block `diag(s_1..s_l)` (ascending) followed by `I_{m0}` bottom-right, with
/// `c_i^2 + s_i^2 = 1`.
#[derive(Debug, Clone)]
pub struct CsDecomposition {
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub v1: ComplexMatrix,
    pub c: ComplexMatrix,
    pub s: ComplexMatrix,
    /// Size of the identity block of `C` (directions seen only by block 1).
    pub count_ones_c: usize,
    /// Size of the strictly-mixed cosine/sine block.
    pub count_mixed: usize,
    /// Size of the identity block of `S` (directions seen only by block 2).
    pub count_ones_s: usize,
}

impl CsDecomposition {
    /// Cosine diagonal of the mixed block, descending.
    pub fn cosines(&self) -> Vec<f64> {
        (0..self.count_mixed)
            .map(|i| self.c[(self.count_ones_c + i, self.count_ones_c + i)].re)
            .collect()
    }

    /// Sine diagonal of the mixed block, aligned with [`Self::cosines`].
    pub fn sines(&self) -> Vec<f64> {
        let row0 = self.u2.rows() - self.count_mixed - self.count_ones_s;
        (0..self.count_mixed)
            .map(|i| self.s[(row0 + i, self.count_ones_c + i)].re)
            .collect()
    }
}

/// CS decomposition with the block sizes inferred from the numerical ranks of
/// `Q1` and `Q2`.
pub fn cs_decompose(q1: &ComplexMatrix, q2: &ComplexMatrix) -> Result<CsDecomposition, MatrixError> {
    if q1.cols() != q2.cols() {
        return Err(MatrixError::DimensionMismatch {
            op: "cs_decompose",
            left: format!("{}x{}", q1.rows(), q1.cols()),
            right: format!("{}x{}", q2.rows(), q2.cols()),
        });
    }
    let n = q1.cols();
    let stack = q1.vstack(q2);
    let defect = stack.orthonormal_defect();
    if defect > crate::TOL_UNITARY * (n as f64).sqrt().max(1.0) {
        return Err(MatrixError::NotOrthonormal {
            defect,
            tol: crate::TOL_UNITARY,
        });
    }
    // Columns of the stack have unit norm, so a fixed threshold separates the
    // cosine/sine classes cleanly.
    let tol = (q1.rows() + q2.rows()).max(n) as f64 * f64::EPSILON * 32.0;
    let rank1 = numerical_rank_with_tol(q1, tol)?;
    let rank2 = numerical_rank_with_tol(q2, tol)?;
    if rank1 + rank2 < n {
        return Err(MatrixError::Degenerate(format!(
            "rank(Q1) + rank(Q2) = {} < {} shared columns",
            rank1 + rank2,
            n
        )));
    }
    let k = n - rank2;
    let m0 = n - rank1;
    let l = rank1 + rank2 - n;
    cs_decompose_with_counts(q1, q2, k, l, m0)
}

/// CS decomposition with the block sizes pinned by the caller (the GSVD pins
/// them from the channel rank profile so both stay consistent).
pub(crate) fn cs_decompose_with_counts(
    q1: &ComplexMatrix,
    q2: &ComplexMatrix,
    k: usize,
    l: usize,
    m0: usize,
) -> Result<CsDecomposition, MatrixError> {
    let n = q1.cols();
    let (m1, m2) = (q1.rows(), q2.rows());
    assert_eq!(k + l + m0, n, "CS block counts must partition the columns");
    assert!(k + l <= m1, "rank of Q1 exceeds its row count");
    assert!(l + m0 <= m2, "rank of Q2 exceeds its row count");

    // SVD of Q1 orders the shared basis by descending cosine: the first k
    // columns of Z span directions fully inside block 1, the last m0 fully
    // inside block 2.
    let (u1, d, z) = svd_full(q1)?;

    // Q2 against the same basis: columns are mutually orthogonal with norms
    // equal to the sines.
    let b2 = q2.matmul(&z);

    let mut cosines = Vec::with_capacity(l);
    let mut sines = Vec::with_capacity(l);
    for i in 0..l {
        let c_raw = d.get(k + i).copied().unwrap_or(0.0);
        let s_raw = (0..m2)
            .map(|r| b2[(r, k + i)].norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = (c_raw * c_raw + s_raw * s_raw).sqrt();
        if scale == 0.0 {
            return Err(MatrixError::Degenerate(format!(
                "mixed direction {i} vanished in both blocks"
            )));
        }
        cosines.push(c_raw / scale);
        sines.push(s_raw / scale);
    }

    let mut c = ComplexMatrix::zeros(m1, n);
    for i in 0..k {
        c[(i, i)] = Complex64::ONE;
    }
    for i in 0..l {
        c[(k + i, k + i)] = Complex64::new(cosines[i], 0.0);
    }

    let mut s = ComplexMatrix::zeros(m2, n);
    let mixed_row0 = m2 - l - m0;
    for i in 0..l {
        s[(mixed_row0 + i, k + i)] = Complex64::new(sines[i], 0.0);
    }
    for j in 0..m0 {
        s[(m2 - m0 + j, k + l + j)] = Complex64::ONE;
    }

    // U2 columns for the nonzero sine directions come straight from Q2 Z.
    let mut u2 = ComplexMatrix::zeros(m2, m2);
    let mut assigned = ComplexMatrix::zeros(m2, l + m0);
    for i in 0..(l + m0) {
        let col = b2.column(k + i);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(MatrixError::Degenerate(format!(
                "sine direction {i} vanished in block 2"
            )));
        }
        for r in 0..m2 {
            assigned[(r, i)] = col[r] / norm;
        }
    }
    if l + m0 > 0 {
        let completed = complete_to_unitary(&assigned);
        // Leading completion columns pad the zero rows of S.
        for j in 0..mixed_row0 {
            u2.set_column(j, &completed.column(l + m0 + j));
        }
        for i in 0..(l + m0) {
            u2.set_column(mixed_row0 + i, &assigned.column(i));
        }
    } else {
        u2 = ComplexMatrix::identity(m2);
    }

    Ok(CsDecomposition {
        u1,
        u2,
        v1: z,
        c,
        s,
        count_ones_c: k,
        count_mixed: l,
        count_ones_s: m0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::qr_decompose;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn check_factors(q1: &ComplexMatrix, q2: &ComplexMatrix, cs: &CsDecomposition) {
        let r1 = cs.u1.matmul(&cs.c).matmul(&cs.v1.hermitian());
        let r2 = cs.u2.matmul(&cs.s).matmul(&cs.v1.hermitian());
        assert!(r1.sub(q1).frobenius_norm() < 1e-10);
        assert!(r2.sub(q2).frobenius_norm() < 1e-10);
        assert!(cs.u1.orthonormal_defect() < 1e-10);
        assert!(cs.u2.orthonormal_defect() < 1e-10);
        assert!(cs.v1.orthonormal_defect() < 1e-10);
        // C^H C + S^H S = I.
        let ident = cs
            .c
            .hermitian()
            .matmul(&cs.c)
            .sub(&ComplexMatrix::identity(q1.cols()).sub(&cs.s.hermitian().matmul(&cs.s)));
        assert!(ident.frobenius_norm() < 1e-10);
    }

    #[test]
    fn identity_zero_split() {
        let q1 = ComplexMatrix::identity(2);
        let q2 = ComplexMatrix::zeros(2, 2);
        let cs = cs_decompose(&q1, &q2).unwrap();
        assert_eq!(cs.count_ones_c, 2);
        assert_eq!(cs.count_mixed, 0);
        assert_eq!(cs.count_ones_s, 0);
        assert!(cs.c.sub(&ComplexMatrix::identity(2)).frobenius_norm() < 1e-12);
        assert!(cs.s.frobenius_norm() < 1e-12);
        check_factors(&q1, &q2, &cs);
    }

    #[test]
    fn balanced_split() {
        let half = ComplexMatrix::identity(2).scale(Complex64::new(1.0 / 2.0_f64.sqrt(), 0.0));
        let cs = cs_decompose(&half, &half).unwrap();
        assert_eq!(cs.count_mixed, 2);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for c in cs.cosines() {
            assert!((c - inv_sqrt2).abs() < 1e-12);
        }
        for s in cs.sines() {
            assert!((s - inv_sqrt2).abs() < 1e-12);
        }
        check_factors(&half, &half, &cs);
    }

    #[test]
    fn random_orthonormal_stack() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let raw = ComplexMatrix::from_fn(7, 5, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        });
        let q = qr_decompose(&raw).unwrap().q;
        let q1 = q.block(0..3, 0..5);
        let q2 = q.block(3..7, 0..5);
        let cs = cs_decompose(&q1, &q2).unwrap();
        check_factors(&q1, &q2, &cs);
        // Elementwise CS identity on the mixed block.
        for (c, s) in cs.cosines().iter().zip(cs.sines()) {
            assert!((c * c + s * s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_non_orthonormal_stack() {
        let q1 = ComplexMatrix::identity(2);
        let q2 = ComplexMatrix::identity(2);
        let err = cs_decompose(&q1, &q2).unwrap_err();
        assert!(matches!(err, MatrixError::NotOrthonormal { .. }));
    }
}
