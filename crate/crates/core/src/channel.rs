//! Channel model for the two-receiver broadcast wiretap setup, the reduction
//! to parallel independent channels, and the worst-case eavesdropper
//! constructions used by the converse cuts.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::{
    gsvd_with_tol, numerical_rank, svd, ComplexMatrix, GsvdFactors, MatrixError, RankProfile,
};

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("{field}: expected {expected}, got {got}")]
    Dimension {
        field: &'static str,
        expected: String,
        got: String,
    },
    #[error("power budget must be positive, got {0}")]
    NonPositivePower(f64),
    #[error("channel JSON schema violation: {0}")]
    Schema(String),
    #[error("channel has zero rank; no parallel reduction exists")]
    ZeroRank,
}

/// Two-receiver MIMO broadcast wiretap channel. Noise variance is one per
/// receive dimension, so `p_bar` is a linear SNR budget.
#[derive(Debug, Clone, Serialize)]
pub struct ChannelSpec {
    pub n_t: usize,
    pub n_r1: usize,
    pub n_r2: usize,
    pub n_e: usize,
    pub p_bar: f64,
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
}

impl ChannelSpec {
    pub fn new(
        n_e: usize,
        p_bar: f64,
        h1: ComplexMatrix,
        h2: ComplexMatrix,
    ) -> Result<Self, ChannelError> {
        if h1.cols() != h2.cols() {
            return Err(ChannelError::Dimension {
                field: "h2",
                expected: format!("{} columns", h1.cols()),
                got: format!("{} columns", h2.cols()),
            });
        }
        if !p_bar.is_finite() || p_bar <= 0.0 {
            return Err(ChannelError::NonPositivePower(p_bar));
        }
        Ok(ChannelSpec {
            n_t: h1.cols(),
            n_r1: h1.rows(),
            n_r2: h2.rows(),
            n_e,
            p_bar,
            h1,
            h2,
        })
    }

    /// Non-fatal warnings for regimes outside the model's assumptions, where
    /// the region degenerates through the `{.}+` clamps.
    pub fn regime_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.n_e >= self.n_t {
            warnings.push(format!(
                "eavesdropper budget n_e = {} is not below n_t = {}; secrecy degrees of freedom collapse",
                self.n_e, self.n_t
            ));
        }
        if let (Ok(r1), Ok(r2)) = (
            numerical_rank(&self.h1, None),
            numerical_rank(&self.h2, None),
        ) {
            if self.n_e >= r1.min(r2) {
                warnings.push(format!(
                    "n_e = {} is not below min(rank H1, rank H2) = {}; at least one receiver has zero secrecy rate",
                    self.n_e,
                    r1.min(r2)
                ));
            }
        }
        warnings
    }

    /// Parses the shared channel JSON schema. Unknown top-level fields are
    /// collected as warnings; dimension mismatches are fatal.
    pub fn from_json_str(text: &str) -> Result<(Self, Vec<String>), ChannelError> {
        #[derive(Deserialize)]
        struct Raw {
            n_t: usize,
            n_r1: usize,
            n_r2: usize,
            n_e: usize,
            p_bar: f64,
            h1: ComplexMatrix,
            h2: ComplexMatrix,
        }
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ChannelError::Schema(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| ChannelError::Schema("top level must be an object".into()))?;
        const KNOWN: [&str; 7] = ["n_t", "n_r1", "n_r2", "n_e", "p_bar", "h1", "h2"];
        let mut warnings = Vec::new();
        for key in obj.keys() {
            if !KNOWN.contains(&key.as_str()) {
                warnings.push(format!("unknown field `{key}` ignored"));
            }
        }
        for key in KNOWN {
            if !obj.contains_key(key) {
                return Err(ChannelError::Schema(format!("missing field `{key}`")));
            }
        }
        let raw: Raw = serde_json::from_value(serde_json::Value::Object(
            obj.iter()
                .filter(|(k, _)| KNOWN.contains(&k.as_str()))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        ))
        .map_err(|e| ChannelError::Schema(e.to_string()))?;

        let check = |field: &'static str, expected: (usize, usize), got: (usize, usize)| {
            if expected != got {
                Err(ChannelError::Dimension {
                    field,
                    expected: format!("{}x{}", expected.0, expected.1),
                    got: format!("{}x{}", got.0, got.1),
                })
            } else {
                Ok(())
            }
        };
        check("h1", (raw.n_r1, raw.n_t), raw.h1.shape())?;
        check("h2", (raw.n_r2, raw.n_t), raw.h2.shape())?;
        let spec = ChannelSpec::new(raw.n_e, raw.p_bar, raw.h1, raw.h2)?;
        Ok((spec, warnings))
    }

    /// Canonical JSON form (stable field order) used for hashing and export.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("channel spec serializes")
    }
}

/// Rank profile of the channel pair.
pub fn rank_profile(spec: &ChannelSpec) -> Result<RankProfile, ChannelError> {
    rank_profile_with_tol(spec, None)
}

/// Rank profile with an explicit absolute singular-value threshold.
pub fn rank_profile_with_tol(
    spec: &ChannelSpec,
    tol: Option<f64>,
) -> Result<RankProfile, ChannelError> {
    let (profile, _, _) = crate::matrix::profile_from_matrices(&spec.h1, &spec.h2, tol)?;
    Ok(profile)
}

/// The channel after the simultaneous diagonalization and gain flattening:
/// `rt1` channels private to receiver 1, `s` common channels, `rt2` private
/// to receiver 2, all with gain `s_min`, under an input budget scaled down by
/// the worst-case input-mixing gain `s_p`.
#[derive(Debug, Clone)]
pub struct ParallelChannel {
    pub profile: RankProfile,
    /// Smallest nonzero diagonal gain across both structured factors.
    pub s_min: f64,
    /// Largest singular value of the mixing matrix `P = W^H R_tri`.
    pub s_p: f64,
    /// Power available to the reduced input: `p_bar / s_p^2`.
    pub effective_power: f64,
    /// Original total budget, kept for SNR sweeps.
    pub p_bar: f64,
    pub factors: GsvdFactors,
}

/// Reduces the channel pair to parallel independent channels.
pub fn reduce_to_parallel(spec: &ChannelSpec) -> Result<ParallelChannel, ChannelError> {
    reduce_to_parallel_with_tol(spec, None)
}

pub fn reduce_to_parallel_with_tol(
    spec: &ChannelSpec,
    tol: Option<f64>,
) -> Result<ParallelChannel, ChannelError> {
    let factors = match gsvd_with_tol(&spec.h1, &spec.h2, tol) {
        Ok(f) => f,
        Err(MatrixError::Degenerate(_)) => return Err(ChannelError::ZeroRank),
        Err(e) => return Err(e.into()),
    };
    let gains = factors.nonzero_gains();
    let s_min = gains.iter().copied().fold(f64::INFINITY, f64::min);
    if !s_min.is_finite() || s_min <= 0.0 {
        return Err(ChannelError::ZeroRank);
    }
    let p = factors.p_matrix();
    let s_p = svd(&p)?.singular_values[0];
    Ok(ParallelChannel {
        profile: factors.profile,
        s_min,
        s_p,
        effective_power: spec.p_bar / (s_p * s_p),
        p_bar: spec.p_bar,
        factors,
    })
}

/// Which converse cut an eavesdropper construction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CutKind {
    User1,
    User2,
    Sum,
}

/// Receiver selector for the single-user cuts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Receiver {
    One,
    Two,
}

/// A worst-case eavesdropper for one cut: `h_tilde` absorbs up to `n_e` rows
/// of the cut matrix, chosen so the complementary block keeps as little rank
/// as possible; the converse bound is the residual's rank.
#[derive(Debug, Clone)]
pub struct EveConstruction {
    pub cut: CutKind,
    /// The adversary's channel rows; `None` when `n_e = 0`.
    pub h_tilde: Option<ComplexMatrix>,
    /// The complementary block; `None` when the adversary takes every row.
    pub residual: Option<ComplexMatrix>,
    pub residual_rank: usize,
    pub h_tilde_rank: usize,
    /// Row indices of the cut matrix assigned to the adversary.
    pub selected_rows: Vec<usize>,
    /// Set when no row subset attains `{rank - n_e}+` and the construction
    /// fell back to splitting an orthonormal row-space basis instead.
    pub from_reduced_basis: bool,
}

fn rank_of(m: &ComplexMatrix) -> Result<usize, ChannelError> {
    Ok(numerical_rank(m, None)?)
}

fn rank_of_complement(
    mat: &ComplexMatrix,
    removed: &[usize],
) -> Result<(Option<ComplexMatrix>, usize), ChannelError> {
    let keep: Vec<usize> = (0..mat.rows()).filter(|i| !removed.contains(i)).collect();
    match mat.select_rows(&keep) {
        Some(sub) => {
            let r = rank_of(&sub)?;
            Ok((Some(sub), r))
        }
        None => Ok((None, 0)),
    }
}

/// Visits all `k`-subsets of `0..n` in lexicographic order; stops early when
/// the visitor returns `true`.
fn for_each_combination(
    n: usize,
    k: usize,
    mut visit: impl FnMut(&[usize]) -> Result<bool, ChannelError>,
) -> Result<(), ChannelError> {
    if k == 0 || k > n {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if visit(&idx)? {
            return Ok(());
        }
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return Ok(());
            }
        }
        idx[i] += 1;
        for j in (i + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n.saturating_sub(k));
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if out > 1 << 40 {
            return u128::MAX;
        }
    }
    out
}

const EXHAUSTIVE_SUBSET_CAP: u128 = 20_000;

/// Selects `n_e` rows of `mat` for the adversary so the remaining rows keep
/// rank `{rank(mat) - n_e}+` when such a subset exists. Exhaustive search at
/// desk scale, greedy beyond, and a row-space-basis split as a last resort.
fn select_adversary_rows(
    mat: &ComplexMatrix,
    n_e: usize,
    cut: CutKind,
) -> Result<EveConstruction, ChannelError> {
    let m = mat.rows();
    let rank = rank_of(mat)?;

    if n_e == 0 {
        return Ok(EveConstruction {
            cut,
            h_tilde: None,
            residual: Some(mat.clone()),
            residual_rank: rank,
            h_tilde_rank: 0,
            selected_rows: Vec::new(),
            from_reduced_basis: false,
        });
    }
    if n_e >= m {
        return Ok(EveConstruction {
            cut,
            h_tilde: Some(mat.clone()),
            residual: None,
            residual_rank: 0,
            h_tilde_rank: rank,
            selected_rows: (0..m).collect(),
            from_reduced_basis: false,
        });
    }

    let target_residual = rank.saturating_sub(n_e);
    let target_h = n_e.min(rank);

    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    let mut consider = |rows: &[usize]| -> Result<bool, ChannelError> {
        let h = mat.select_rows(rows).expect("nonempty selection");
        let h_rank = rank_of(&h)?;
        let (_, res_rank) = rank_of_complement(mat, rows)?;
        let better = match &best {
            None => true,
            Some((b_res, b_h, _)) => res_rank < *b_res || (res_rank == *b_res && h_rank > *b_h),
        };
        if better {
            best = Some((res_rank, h_rank, rows.to_vec()));
        }
        Ok(res_rank == target_residual && h_rank == target_h)
    };

    if binomial(m, n_e) <= EXHAUSTIVE_SUBSET_CAP {
        for_each_combination(m, n_e, &mut consider)?;
    } else {
        // Greedy: repeatedly move a row into the adversary set whose removal
        // drops the residual rank, falling back to the first untaken row.
        let mut taken: Vec<usize> = Vec::new();
        for _ in 0..n_e {
            let (_, current) = rank_of_complement(mat, &taken)?;
            let mut pick = None;
            let mut fallback = None;
            for row in 0..m {
                if taken.contains(&row) {
                    continue;
                }
                if fallback.is_none() {
                    fallback = Some(row);
                }
                let mut trial = taken.clone();
                trial.push(row);
                let (_, after) = rank_of_complement(mat, &trial)?;
                if after < current {
                    pick = Some(row);
                    break;
                }
            }
            taken.push(pick.or(fallback).expect("rows remain"));
        }
        taken.sort_unstable();
        consider(&taken)?;
    }

    let (best_res, best_h, rows) = best.expect("at least one subset considered");
    if best_res == target_residual {
        let h_tilde = mat.select_rows(&rows);
        let (residual, residual_rank) = rank_of_complement(mat, &rows)?;
        return Ok(EveConstruction {
            cut,
            h_tilde,
            residual,
            residual_rank,
            h_tilde_rank: best_h,
            selected_rows: rows,
            from_reduced_basis: false,
        });
    }

    // No literal row subset attains the bound (rows too aligned); split an
    // orthonormal basis of the row space instead. The basis rows are valid
    // adversary channels and the complementary block has exact rank.
    let decomp = svd(mat)?;
    let mut basis = ComplexMatrix::zeros(rank, mat.cols());
    for i in 0..rank {
        for j in 0..mat.cols() {
            basis[(i, j)] = decomp.v[(j, i)].conj() * decomp.singular_values[i];
        }
    }
    let split = n_e.min(rank);
    let h_tilde = basis.select_rows(&(0..split).collect::<Vec<_>>());
    let residual = basis.select_rows(&(split..rank).collect::<Vec<_>>());
    Ok(EveConstruction {
        cut,
        h_tilde,
        residual,
        residual_rank: rank - split,
        h_tilde_rank: split,
        selected_rows: Vec::new(),
        from_reduced_basis: true,
    })
}

/// Worst-case eavesdropper for a single-user cut: rows of that user's channel
/// matrix whose removal leaves rank `{r_i - n_e}+`.
pub fn worst_case_eve_single(
    spec: &ChannelSpec,
    user: Receiver,
) -> Result<EveConstruction, ChannelError> {
    let (mat, cut) = match user {
        Receiver::One => (&spec.h1, CutKind::User1),
        Receiver::Two => (&spec.h2, CutKind::User2),
    };
    select_adversary_rows(mat, spec.n_e, cut)
}

/// Worst-case eavesdropper for the cooperative sum cut: rows of the stacked
/// pair whose removal leaves rank `{r0 - n_e}+`.
pub fn worst_case_eve_sum(spec: &ChannelSpec) -> Result<EveConstruction, ChannelError> {
    let stack = spec.h1.vstack(&spec.h2);
    select_adversary_rows(&stack, spec.n_e, CutKind::Sum)
}

/// Seeded random channel with i.i.d. standard complex Gaussian entries.
pub fn generate_random_channel(
    n_t: usize,
    n_r1: usize,
    n_r2: usize,
    n_e: usize,
    p_bar: f64,
    seed: u64,
) -> Result<ChannelSpec, ChannelError> {
    if n_t == 0 || n_r1 == 0 || n_r2 == 0 {
        return Err(ChannelError::Dimension {
            field: "dims",
            expected: "positive antenna counts".into(),
            got: format!("{n_t}x{n_r1}x{n_r2}"),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut draw = |rows: usize, cols: usize| {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal) * inv_sqrt2,
                rng.sample::<f64, _>(StandardNormal) * inv_sqrt2,
            )
        })
    };
    let h1 = draw(n_r1, n_t);
    let h2 = draw(n_r2, n_t);
    ChannelSpec::new(n_e, p_bar, h1, h2)
}

/// The motivating 3x2x2x1 fixture: `H1 = [I2 | 0]`, `H2 = [0 | I2]`.
pub fn example_channel(p_bar: f64) -> ChannelSpec {
    let h1 = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]).unwrap();
    let h2 = ComplexMatrix::from_real_rows(&[vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
    ChannelSpec::new(1, p_bar, h1, h2).unwrap()
}
