//! Generalized singular value decomposition of a channel matrix pair.
//!
//! For `H1` (m1 x n) and `H2` (m2 x n) the factorization produces unitary
//! `U`, `V`, `W`, `Q` and a nonsingular upper-triangular `R_tri` with
//!
//! ```text
//! U^H H1 Q = Σ1 [W^H R_tri, 0]
//! V^H H2 Q = Σ2 [W^H R_tri, 0]
//! ```
//!
//! where `Σ1` carries an identity block for directions private to the first
//! row space, a diagonal cosine block for the shared directions, and zeros
//! elsewhere; `Σ2` mirrors it with sines and its identity block bottom-right.
//!
//! Construction route: a rank-revealing SVD of the stacked pair splits off an
//! orthonormal basis `Y` of the stack's column space together with a full
//! row-rank trailing factor; the CS decomposition of the partitioned `Y`
//! yields `U`, `V`, `Σ1`, `Σ2`, and a QR pass on the trailing factor yields
//! `Q`, `W`, `R_tri`.

use serde::{Deserialize, Serialize};

use super::cs::cs_decompose_with_counts;
use super::qr::{complete_to_unitary, qr_full};
use super::svd::{default_rank_tolerance, svd, svd_full};
use super::{ComplexMatrix, MatrixError};

/// Ranks of a channel pair and the derived subspace dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile {
    /// Rank of the first matrix.
    pub r1: usize,
    /// Rank of the second matrix.
    pub r2: usize,
    /// Rank of the stacked pair.
    pub r0: usize,
    /// Dimension of the common row space, `s = r1 + r2 - r0`.
    pub s: usize,
    /// `r̃1 = r1 - s`, directions private to the first row space.
    pub rt1: usize,
    /// `r̃2 = r2 - s`, directions private to the second row space.
    pub rt2: usize,
}

impl RankProfile {
    /// Builds a profile from the three ranks, validating consistency.
    pub fn from_ranks(r1: usize, r2: usize, r0: usize) -> Result<Self, MatrixError> {
        if r0 > r1 + r2 || r0 < r1.max(r2) {
            return Err(MatrixError::Degenerate(format!(
                "inconsistent ranks: r1={r1}, r2={r2}, r0={r0}"
            )));
        }
        let s = r1 + r2 - r0;
        Ok(RankProfile {
            r1,
            r2,
            r0,
            s,
            rt1: r1 - s,
            rt2: r2 - s,
        })
    }

    /// Profile with the roles of the two matrices swapped.
    pub fn swapped(&self) -> Self {
        RankProfile {
            r1: self.r2,
            r2: self.r1,
            r0: self.r0,
            s: self.s,
            rt1: self.rt2,
            rt2: self.rt1,
        }
    }
}

/// The factor set of the generalized singular value decomposition.
#[derive(Debug, Clone)]
pub struct GsvdFactors {
    /// Left unitary for the first matrix (m1 x m1).
    pub u: ComplexMatrix,
    /// Left unitary for the second matrix (m2 x m2).
    pub v: ComplexMatrix,
    /// Shared-basis unitary (r0 x r0).
    pub w: ComplexMatrix,
    /// Right unitary on the input space (n x n).
    pub q: ComplexMatrix,
    /// Nonsingular upper-triangular factor (r0 x r0).
    pub r_tri: ComplexMatrix,
    /// Structured cosine factor (m1 x r0).
    pub sigma1: ComplexMatrix,
    /// Structured sine factor (m2 x r0).
    pub sigma2: ComplexMatrix,
    pub profile: RankProfile,
    /// Set when some singular value sat within 10x of the rank-tolerance
    /// boundary, i.e. the rank decision is numerically ambiguous.
    pub rank_warning: bool,
}

impl GsvdFactors {
    /// The nonsingular mixing matrix `P = W^H R_tri` seen by the reduced input.
    pub fn p_matrix(&self) -> ComplexMatrix {
        self.w.hermitian().matmul(&self.r_tri)
    }

    /// Cosine diagonal of the shared block of `Σ1`, descending.
    pub fn s1_diag(&self) -> Vec<f64> {
        let k = self.profile.rt1;
        (0..self.profile.s).map(|i| self.sigma1[(k + i, k + i)].re).collect()
    }

    /// Sine diagonal of the shared block of `Σ2`, aligned with [`Self::s1_diag`].
    pub fn s2_diag(&self) -> Vec<f64> {
        let m2 = self.sigma2.rows();
        let row0 = m2 - self.profile.s - self.profile.rt2;
        let k = self.profile.rt1;
        (0..self.profile.s).map(|i| self.sigma2[(row0 + i, k + i)].re).collect()
    }

    /// All nonzero diagonal gains of `Σ1` and `Σ2` (identity blocks included).
    pub fn nonzero_gains(&self) -> Vec<f64> {
        let mut gains = Vec::new();
        if self.profile.rt1 > 0 {
            gains.push(1.0);
        }
        if self.profile.rt2 > 0 {
            gains.push(1.0);
        }
        gains.extend(self.s1_diag());
        gains.extend(self.s2_diag());
        gains
    }

    /// Relative reconstruction residuals of the two defining identities.
    pub fn reconstruction_residual(&self, h1: &ComplexMatrix, h2: &ComplexMatrix) -> (f64, f64) {
        let n = self.q.rows();
        let r0 = self.profile.r0;
        let p = self.p_matrix();
        let mut p_padded = ComplexMatrix::zeros(r0, n);
        for i in 0..r0 {
            for j in 0..r0 {
                p_padded[(i, j)] = p[(i, j)];
            }
        }
        let lhs1 = self.u.hermitian().matmul(h1).matmul(&self.q);
        let rhs1 = self.sigma1.matmul(&p_padded);
        let lhs2 = self.v.hermitian().matmul(h2).matmul(&self.q);
        let rhs2 = self.sigma2.matmul(&p_padded);
        (
            lhs1.sub(&rhs1).frobenius_norm() / h1.frobenius_norm(),
            lhs2.sub(&rhs2).frobenius_norm() / h2.frobenius_norm(),
        )
    }
}

/// Ranks of `H1`, `H2` and their stack under a single absolute threshold, so
/// the profile identity `s = r1 + r2 - r0` comes out of consistent decisions.
/// Returns the profile plus the ambiguity flag.
pub(crate) fn profile_from_matrices(
    h1: &ComplexMatrix,
    h2: &ComplexMatrix,
    tol: Option<f64>,
) -> Result<(RankProfile, bool, f64), MatrixError> {
    if h1.cols() != h2.cols() {
        return Err(MatrixError::DimensionMismatch {
            op: "gsvd",
            left: format!("{}x{}", h1.rows(), h1.cols()),
            right: format!("{}x{}", h2.rows(), h2.cols()),
        });
    }
    let stack = h1.vstack(h2);
    let sv_stack = svd(&stack)?.singular_values;
    let sigma_max = sv_stack.first().copied().unwrap_or(0.0);
    let threshold = tol.unwrap_or_else(|| {
        default_rank_tolerance(stack.rows().max(stack.cols()), stack.cols(), sigma_max)
    });
    let sv1 = svd(h1)?.singular_values;
    let sv2 = svd(h2)?.singular_values;
    let count = |sv: &[f64]| sv.iter().filter(|&&s| s > threshold).count();
    let (r1, r2, r0) = (count(&sv1), count(&sv2), count(&sv_stack));
    let ambiguous = threshold > 0.0
        && sv1
            .iter()
            .chain(&sv2)
            .chain(&sv_stack)
            .any(|&s| s > threshold / 10.0 && s < threshold * 10.0);
    let profile = RankProfile::from_ranks(r1, r2, r0)?;
    Ok((profile, ambiguous, threshold))
}

/// GSVD with the default rank tolerance.
pub fn gsvd(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Result<GsvdFactors, MatrixError> {
    gsvd_with_tol(h1, h2, None)
}

/// GSVD with an explicit absolute rank tolerance.
pub fn gsvd_with_tol(
    h1: &ComplexMatrix,
    h2: &ComplexMatrix,
    tol: Option<f64>,
) -> Result<GsvdFactors, MatrixError> {
    let (profile, rank_warning, _threshold) = profile_from_matrices(h1, h2, tol)?;
    if profile.r1 == 0 || profile.r2 == 0 {
        return Err(MatrixError::Degenerate(
            "gsvd requires both matrices to be nonzero".into(),
        ));
    }
    let (m1, n) = h1.shape();
    let m2 = h2.rows();
    let r0 = profile.r0;

    // Rank-revealing split of the stack: Y holds an orthonormal basis of the
    // column space, T the full-row-rank trailing factor with stack = Y T.
    let stack = h1.vstack(h2);
    let (u_g, sv, v_g) = svd_full(&stack)?;
    let y = u_g.block(0..(m1 + m2), 0..r0);
    let mut t = ComplexMatrix::zeros(r0, n);
    for i in 0..r0 {
        for j in 0..n {
            t[(i, j)] = v_g[(j, i)].conj() * sv[i];
        }
    }

    let y1 = y.block(0..m1, 0..r0);
    let y2 = y.block(m1..(m1 + m2), 0..r0);
    let cs = cs_decompose_with_counts(&y1, &y2, profile.rt1, profile.s, profile.rt2)?;

    // Z^H T is full row rank; rotate its row space onto the leading input
    // coordinates: M Q = [F, 0] with F = R_m^H nonsingular lower triangular.
    let m_mat = cs.v1.hermitian().matmul(&t);
    let (q_full, r_m) = qr_full(&m_mat.hermitian())?;
    let q = if q_full.cols() == n {
        q_full
    } else {
        complete_to_unitary(&q_full)
    };
    let f = r_m.block(0..r0, 0..r0).hermitian();

    // F = Ŵ R̂ gives the W^H R_tri split.
    let (w_hat, r_hat) = qr_full(&f)?;
    let r_tri = r_hat;
    let w = w_hat.hermitian();

    Ok(GsvdFactors {
        u: cs.u1,
        v: cs.u2,
        w,
        q,
        r_tri,
        sigma1: cs.c,
        sigma2: cs.s,
        profile,
        rank_warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_complex(rng: &mut ChaCha8Rng, m: usize, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(m, n, |_, _| {
            Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    fn example_pair() -> (ComplexMatrix, ComplexMatrix) {
        // H1 = [I2 | 0], H2 = [0 | I2] on three inputs.
        let h1 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
        let h2 = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        (h1, h2)
    }

    fn check_all_invariants(h1: &ComplexMatrix, h2: &ComplexMatrix, g: &GsvdFactors) {
        assert!(g.u.orthonormal_defect() < crate::TOL_UNITARY);
        assert!(g.v.orthonormal_defect() < crate::TOL_UNITARY);
        assert!(g.w.orthonormal_defect() < crate::TOL_UNITARY);
        assert!(g.q.orthonormal_defect() < crate::TOL_UNITARY);
        for i in 0..g.profile.r0 {
            for j in 0..i {
                assert!(g.r_tri[(i, j)].norm() < 1e-10);
            }
            assert!(g.r_tri[(i, i)].norm() > 1e-12);
        }
        let (res1, res2) = g.reconstruction_residual(h1, h2);
        assert!(res1 < crate::TOL_RECONSTRUCTION, "residual 1: {res1}");
        assert!(res2 < crate::TOL_RECONSTRUCTION, "residual 2: {res2}");
        assert_eq!(g.profile.s, g.profile.r1 + g.profile.r2 - g.profile.r0);
        for (c, s) in g.s1_diag().iter().zip(g.s2_diag()) {
            assert!((c * c + s * s - 1.0).abs() < crate::TOL_CS_IDENTITY);
            assert!(*c > 0.0 && s > 0.0);
        }
        let s1 = g.s1_diag();
        for w in s1.windows(2) {
            assert!(w[0] >= w[1] - 1e-14, "S1 diagonal must be descending");
        }
    }

    #[test]
    fn motivating_example_profile() {
        let (h1, h2) = example_pair();
        let g = gsvd(&h1, &h2).unwrap();
        assert_eq!(
            g.profile,
            RankProfile {
                r1: 2,
                r2: 2,
                r0: 3,
                s: 1,
                rt1: 1,
                rt2: 1
            }
        );
        check_all_invariants(&h1, &h2, &g);
        // One shared direction split evenly between the receivers.
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        assert!((g.s1_diag()[0] - inv_sqrt2).abs() < 1e-12);
        assert!((g.s2_diag()[0] - inv_sqrt2).abs() < 1e-12);
    }

    #[test]
    fn identical_channels_share_everything() {
        let h = ComplexMatrix::identity(3);
        let g = gsvd(&h, &h).unwrap();
        assert_eq!(g.profile.s, 3);
        assert_eq!(g.profile.rt1, 0);
        assert_eq!(g.profile.rt2, 0);
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        for (c, s) in g.s1_diag().iter().zip(g.s2_diag()) {
            assert!((c - inv_sqrt2).abs() < 1e-12);
            assert!((s - inv_sqrt2).abs() < 1e-12);
        }
        check_all_invariants(&h, &h, &g);
    }

    #[test]
    fn zero_matrix_rejected() {
        let z = ComplexMatrix::zeros(2, 3);
        let h = ComplexMatrix::identity(3).block(0..2, 0..3);
        assert!(matches!(gsvd(&z, &h), Err(MatrixError::Degenerate(_))));
    }

    #[test]
    fn random_pairs_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..25 {
            let m1 = rng.random_range(1..=6);
            let m2 = rng.random_range(1..=6);
            let n = rng.random_range(1..=6);
            let h1 = random_complex(&mut rng, m1, n);
            let h2 = random_complex(&mut rng, m2, n);
            let g = gsvd(&h1, &h2).unwrap();
            check_all_invariants(&h1, &h2, &g);
        }
    }

    #[test]
    fn swap_symmetry() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        // Structured pair with a genuine shared subspace.
        let common = random_complex(&mut rng, 2, 6);
        let p1 = random_complex(&mut rng, 2, 6);
        let p2 = random_complex(&mut rng, 1, 6);
        let h1 = p1.vstack(&common);
        let h2 = common.vstack(&p2);
        let g12 = gsvd(&h1, &h2).unwrap();
        let g21 = gsvd(&h2, &h1).unwrap();
        assert_eq!(g12.profile.swapped(), g21.profile);
        assert_eq!(g12.profile.s, 2);
    }

    #[test]
    fn low_rank_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        // H1 rank 1, H2 rank 2, overlapping in one direction.
        let u = random_complex(&mut rng, 3, 1);
        let v = random_complex(&mut rng, 1, 4);
        let h1 = u.matmul(&v);
        let h2 = v.vstack(&random_complex(&mut rng, 1, 4));
        let g = gsvd(&h1, &h2).unwrap();
        assert_eq!((g.profile.r1, g.profile.r2, g.profile.r0), (1, 2, 2));
        assert_eq!(g.profile.s, 1);
        check_all_invariants(&h1, &h2, &g);
    }
}
