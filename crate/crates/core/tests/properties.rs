//! Property tests for the factorization kernels and the region/scheme
//! integer arithmetic.

use num_complex::Complex64;
use proptest::prelude::*;

use sdof_core::channel::ChannelSpec;
use sdof_core::matrix::{
    gsvd, numerical_rank, qr_decompose, svd, ComplexMatrix, RankProfile,
};
use sdof_core::region::{
    compare, enumerate_vertices, region_no_privacy, region_with_privacy, RegionMode,
    RegionRelation,
};
use sdof_core::scheme::{DimensionLayout, SchemeError};

fn complex_matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(m, n)| {
        proptest::collection::vec(
            (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(re, im)| Complex64::new(re, im)),
            m * n,
        )
        .prop_map(move |data| ComplexMatrix::new(m, n, data).unwrap())
    })
}

fn channel_pair(max_dim: usize) -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1..=max_dim, 1..=max_dim, 1..=max_dim).prop_flat_map(|(m1, m2, n)| {
        let entries = |len: usize| {
            proptest::collection::vec(
                (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im)),
                len,
            )
        };
        (entries(m1 * n), entries(m2 * n)).prop_map(move |(a, b)| {
            (
                ComplexMatrix::new(m1, n, a).unwrap(),
                ComplexMatrix::new(m2, n, b).unwrap(),
            )
        })
    })
}

fn profile_strategy() -> impl Strategy<Value = RankProfile> {
    (1..=6usize, 1..=6usize).prop_flat_map(|(r1, r2)| {
        (Just(r1), Just(r2), 0..=r1.min(r2)).prop_map(|(r1, r2, s)| {
            RankProfile::from_ranks(r1, r2, r1 + r2 - s).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_reconstructs(a in complex_matrix(7)) {
        let qr = qr_decompose(&a).unwrap();
        let resid = qr.q.matmul(&qr.r).sub(&a).frobenius_norm();
        prop_assert!(resid <= 1e-10 * a.frobenius_norm().max(1.0));
        prop_assert!(qr.q.orthonormal_defect() < 1e-10);
    }

    #[test]
    fn svd_reconstructs_sorted(a in complex_matrix(7)) {
        let s = svd(&a).unwrap();
        let k = s.singular_values.len();
        let mut sigma = ComplexMatrix::zeros(k, k);
        for i in 0..k {
            sigma[(i, i)] = Complex64::new(s.singular_values[i], 0.0);
        }
        let resid = s.u.matmul(&sigma).matmul(&s.v.hermitian()).sub(&a).frobenius_norm();
        prop_assert!(resid <= 1e-10 * a.frobenius_norm().max(1.0));
        for w in s.singular_values.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn rank_invariant_under_unitary(a in complex_matrix(6)) {
        let r = numerical_rank(&a, None).unwrap();
        // Deterministic unitary from the matrix itself plus a perturbation.
        let seed = ComplexMatrix::from_fn(a.rows(), a.rows(), |i, j| {
            Complex64::new((1 + i * 3 + j) as f64, (2 * i + j * j) as f64 * 0.37)
        });
        let q = qr_decompose(&seed).unwrap().q;
        prop_assert_eq!(numerical_rank(&q.matmul(&a), None).unwrap(), r);
    }

    #[test]
    fn gsvd_profile_and_swap((h1, h2) in channel_pair(6)) {
        prop_assume!(h1.frobenius_norm() > 1e-6 && h2.frobenius_norm() > 1e-6);
        let g = gsvd(&h1, &h2).unwrap();
        let p = g.profile;
        prop_assert_eq!(p.s, p.r1 + p.r2 - p.r0);
        prop_assert_eq!(p.rt1 + p.s + p.rt2, p.r0);
        let (res1, res2) = g.reconstruction_residual(&h1, &h2);
        prop_assert!(res1 < 1e-8 && res2 < 1e-8, "residuals {} {}", res1, res2);
        for (c, s) in g.s1_diag().iter().zip(g.s2_diag()) {
            prop_assert!((c * c + s * s - 1.0).abs() < 1e-10);
        }
        let swapped = gsvd(&h2, &h1).unwrap();
        prop_assert_eq!(swapped.profile, p.swapped());
    }

    #[test]
    fn privacy_region_contained(profile in profile_strategy(), n_e in 0..=4usize) {
        let t1 = region_no_privacy(profile, n_e);
        let t2 = region_with_privacy(profile, n_e);
        let rel = compare(&t2, &t1).unwrap();
        prop_assert!(rel == RegionRelation::Equal || rel == RegionRelation::ASubsetB);
        // Vertices are feasible and integral by construction.
        for v in enumerate_vertices(&t1).vertices {
            prop_assert!(t1.contains_int(v));
        }
    }

    #[test]
    fn region_shrinks_with_budget(profile in profile_strategy(), n_e in 0..=3usize) {
        let now = region_no_privacy(profile, n_e);
        let next = region_no_privacy(profile, n_e + 1);
        for v in enumerate_vertices(&next).vertices {
            prop_assert!(now.contains_int(v));
        }
    }

    #[test]
    fn layouts_conserve_dimensions(profile in profile_strategy(), n_e in 0..=4usize) {
        for mode in [RegionMode::NoPrivacy, RegionMode::MutualPrivacy] {
            let region = match mode {
                RegionMode::NoPrivacy => region_no_privacy(profile, n_e),
                RegionMode::MutualPrivacy => region_with_privacy(profile, n_e),
            };
            for t in region.integer_points() {
                match DimensionLayout::for_target(profile, n_e, t, mode) {
                    Ok(l) => {
                        prop_assert_eq!(l.dims_sum(), profile.r0);
                        prop_assert_eq!(l.range_a.len(), l.dims_a);
                        prop_assert_eq!(l.range_b.len(), l.dims_b);
                        prop_assert_eq!(l.range_c.len(), l.dims_c);
                        if mode == RegionMode::MutualPrivacy {
                            prop_assert!(l.privacy_disjoint());
                        }
                    }
                    Err(SchemeError::NeedsTimeShare)
                    | Err(SchemeError::RegimeUnsupported { .. }) => {}
                    Err(e) => prop_assert!(false, "unexpected error {}", e),
                }
            }
        }
    }

    #[test]
    fn channel_json_round_trip((h1, h2) in channel_pair(5)) {
        let spec = ChannelSpec::new(1, 10.0, h1, h2).unwrap();
        let json = spec.to_canonical_json();
        let (back, warnings) = ChannelSpec::from_json_str(&json).unwrap();
        prop_assert!(warnings.is_empty());
        prop_assert_eq!(back.h1, spec.h1);
        prop_assert_eq!(back.h2, spec.h2);
    }
}
