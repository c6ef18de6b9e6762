//! Analytic log-det rate and leakage evaluation, SNR sweeps with pre-log
//! slope fitting, converse cut slopes, and end-to-end certification of a
//! target degrees-of-freedom triple.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::channel::{
    worst_case_eve_single, worst_case_eve_sum, ChannelError, ChannelSpec, ParallelChannel,
    Receiver,
};
use crate::matrix::{qr_decompose, svd, ComplexMatrix, MatrixError};
use crate::region::{region_no_privacy, region_with_privacy, RegionMode};
use crate::scheme::{
    check_synthesis_decodability, per_channel_rate, power_budget, synthesize, SchemeError,
    Synthesis,
};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error("slope fit needs at least 4 points, got {got}")]
    InsufficientPoints { got: usize },
    #[error("SNR grid must be strictly increasing")]
    NonIncreasingGrid,
    #[error("SNR grid invalid: {0}")]
    BadGrid(String),
}

/// Nine log-spaced budget points from 1e4 to 1e12.
pub fn default_snr_grid() -> Vec<f64> {
    (4..=12).map(|k| 10f64.powi(k)).collect()
}

/// Least-squares slope of `bits` against `log2(p_bar)` over the top half of
/// the points (finite-SNR offsets decay, so the high end carries the slope).
pub fn fit_prelog(points: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    if points.len() < 4 {
        return Err(AnalysisError::InsufficientPoints { got: points.len() });
    }
    if points.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(AnalysisError::NonIncreasingGrid);
    }
    let window = &points[points.len() / 2..];
    let xs: Vec<f64> = window.iter().map(|(p, _)| p.log2()).collect();
    let ys: Vec<f64> = window.iter().map(|(_, b)| *b).collect();
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    Ok(sxy / sxx)
}

/// `log2 |det M|` via the QR route (sum of log-magnitudes of the diagonal).
fn log2_det(m: &ComplexMatrix) -> Result<f64, MatrixError> {
    let qr = qr_decompose(m)?;
    let mut acc = 0.0;
    for i in 0..m.rows() {
        let d = qr.r[(i, i)].norm();
        if d == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        acc += d.log2();
    }
    // The Householder Q has unit-modulus determinant, so |det M| = Π |r_ii|.
    Ok(acc)
}

/// Eavesdropper mutual information at one operating point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeakageValue {
    pub bits: f64,
    /// Numerical row rank of the adversary channel actually used.
    pub effective_rank: usize,
    /// Set when the adversary matrix was row-rank-deficient and the value
    /// was evaluated at its reduced rank.
    pub rank_deficient: bool,
}

/// Information rate `I(X̄; H̃ X̄ + H̃ N)` leaked to an adversary observing the
/// reduced input through `h_tilde`, with signal power spread over `r0`
/// coordinates and unit artificial noise:
/// `log2 det(H̃ (P/r0 I + I) H̃^H) - log2 det(H̃ H̃^H)`.
///
/// For every full-row-rank `h_tilde` the value equals
/// `N_E log2(1 + P/r0)` — the channel dependence cancels.
pub fn eve_leakage(
    signal_power: f64,
    r0: usize,
    h_tilde: Option<&ComplexMatrix>,
) -> Result<LeakageValue, AnalysisError> {
    if !signal_power.is_finite() || signal_power <= 0.0 || r0 == 0 {
        return Err(AnalysisError::Scheme(SchemeError::NonPositivePower(
            signal_power,
        )));
    }
    let Some(h) = h_tilde else {
        return Ok(LeakageValue {
            bits: 0.0,
            effective_rank: 0,
            rank_deficient: false,
        });
    };
    let n_e = h.rows();
    let per_dim = signal_power / r0 as f64;

    let sv = svd(h)?.singular_values;
    let sigma_max = sv.first().copied().unwrap_or(0.0);
    let tol = crate::matrix::default_rank_tolerance(h.rows(), h.cols(), sigma_max);
    let rank = sv.iter().filter(|&&s| s > tol).count();

    if rank < n_e {
        // Degenerate adversary: evaluate on the nonzero modes only; each
        // contributes log2((per_dim + 1) σ²) − log2(σ²).
        let bits = rank as f64 * (1.0 + per_dim).log2();
        return Ok(LeakageValue {
            bits,
            effective_rank: rank,
            rank_deficient: true,
        });
    }

    // Literal evaluation of the log-det difference.
    let cols = h.cols();
    let mut d = ComplexMatrix::zeros(cols, cols);
    for i in 0..cols {
        d[(i, i)] = Complex64::new(per_dim + 1.0, 0.0);
    }
    let signal_gram = h.matmul(&d).matmul(&h.hermitian());
    let noise_gram = h.matmul(&h.hermitian());
    let bits = log2_det(&signal_gram)? - log2_det(&noise_gram)?;
    Ok(LeakageValue {
        bits,
        effective_rank: n_e,
        rank_deficient: false,
    })
}

/// Per-message rate curves over an SNR grid.
#[derive(Debug, Clone, Serialize)]
pub struct RateCurves {
    pub snr_points: Vec<f64>,
    pub r0: Vec<f64>,
    pub r1: Vec<f64>,
    pub r2: Vec<f64>,
    pub re: Vec<f64>,
    /// Budgets dropped because the noise floor left no signal power.
    pub dropped: Vec<f64>,
}

/// Evaluates the assigned message rates of a synthesis across budgets:
/// `R_i(p_bar) = d_i · R(P(p_bar))`.
pub fn achievable_rate_curve(
    synthesis: &Synthesis,
    pc: &ParallelChannel,
    snr_points: &[f64],
) -> Result<RateCurves, AnalysisError> {
    let mut out = RateCurves {
        snr_points: Vec::new(),
        r0: Vec::new(),
        r1: Vec::new(),
        r2: Vec::new(),
        re: Vec::new(),
        dropped: Vec::new(),
    };
    let r0_dims = pc.profile.r0;
    let n_e = synthesis
        .components
        .first()
        .map(|(_, a)| a.layout.n_e)
        .unwrap_or(0);
    let dof = synthesis.dof();
    for &p_bar in snr_points {
        match power_budget(p_bar, pc.s_p, r0_dims) {
            Ok((signal, _)) => {
                let r = per_channel_rate(signal, r0_dims, pc.s_min)?;
                out.snr_points.push(p_bar);
                out.r0.push(dof[0] * r);
                out.r1.push(dof[1] * r);
                out.r2.push(dof[2] * r);
                out.re.push(n_e as f64 * r);
            }
            Err(SchemeError::PowerBudgetTooSmall { .. }) => out.dropped.push(p_bar),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(out)
}

/// Converse pre-logs: the cut-set bounds from rank arithmetic, the residual
/// ranks the constructions achieved, and the fitted log-det slopes of the
/// residual channels.
#[derive(Debug, Clone, Serialize)]
pub struct ConverseReport {
    /// `({r1-NE}+, {r2-NE}+, {r0-NE}+)`.
    pub bounds: [usize; 3],
    /// Residual ranks achieved by the three eavesdropper constructions.
    pub residual_ranks: [usize; 3],
    /// Fitted slopes of `log2 det(I + (p_bar/N_T) M M^H)` per cut.
    pub fitted: [f64; 3],
    pub from_reduced_basis: [bool; 3],
}

fn logdet_capacity_curve(
    m: Option<&ComplexMatrix>,
    n_t: usize,
    grid: &[f64],
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    let mut curve = Vec::with_capacity(grid.len());
    for &p_bar in grid {
        let bits = match m {
            None => 0.0,
            Some(mat) => {
                let rows = mat.rows();
                let gram = mat.matmul(&mat.hermitian());
                let mut a = ComplexMatrix::identity(rows);
                let c = p_bar / n_t as f64;
                for i in 0..rows {
                    for j in 0..rows {
                        a[(i, j)] += Complex64::new(c, 0.0) * gram[(i, j)];
                    }
                }
                log2_det(&a)?
            }
        };
        curve.push((p_bar, bits));
    }
    Ok(curve)
}

/// Evaluates the three converse cuts on the default grid.
pub fn converse_prelog(spec: &ChannelSpec) -> Result<ConverseReport, AnalysisError> {
    converse_prelog_on_grid(spec, &default_snr_grid())
}

pub fn converse_prelog_on_grid(
    spec: &ChannelSpec,
    grid: &[f64],
) -> Result<ConverseReport, AnalysisError> {
    converse_prelog_with_tol(spec, grid, None)
}

pub fn converse_prelog_with_tol(
    spec: &ChannelSpec,
    grid: &[f64],
    rank_tol: Option<f64>,
) -> Result<ConverseReport, AnalysisError> {
    let profile = crate::channel::rank_profile_with_tol(spec, rank_tol)?;
    let ne = spec.n_e;
    let bounds = [
        profile.r1.saturating_sub(ne),
        profile.r2.saturating_sub(ne),
        profile.r0.saturating_sub(ne),
    ];
    let eves = [
        worst_case_eve_single(spec, Receiver::One)?,
        worst_case_eve_single(spec, Receiver::Two)?,
        worst_case_eve_sum(spec)?,
    ];
    let mut fitted = [0.0; 3];
    let mut residual_ranks = [0; 3];
    let mut from_reduced_basis = [false; 3];
    for (i, eve) in eves.iter().enumerate() {
        residual_ranks[i] = eve.residual_rank;
        from_reduced_basis[i] = eve.from_reduced_basis;
        let curve = logdet_capacity_curve(eve.residual.as_ref(), spec.n_t, grid)?;
        fitted[i] = fit_prelog(&curve)?;
    }
    Ok(ConverseReport {
        bounds,
        residual_ranks,
        fitted,
        from_reduced_basis,
    })
}

/// Worst leakage pre-log over sampled full-row-rank adversaries.
#[derive(Debug, Clone, Serialize)]
pub struct EveSearchReport {
    pub trials: usize,
    pub seed: u64,
    /// Fitted leakage pre-log per trial.
    pub prelogs: Vec<f64>,
    pub worst_prelog: f64,
    /// Trial index attaining the worst pre-log (its sampling seed is
    /// `seed + trial`).
    pub worst_trial: usize,
    /// Leakage curve of the worst trial, aligned with the grid.
    pub worst_curve: Vec<(f64, f64)>,
    /// Largest relative spread of leakage values across trials at a fixed
    /// operating point; the cancellation invariant drives this to zero.
    pub invariance_spread: f64,
}

fn sample_adversary(rng: &mut ChaCha8Rng, n_e: usize, r0: usize, mix: bool) -> ComplexMatrix {
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut gaussian = |rows: usize, cols: usize| {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(
                rng.sample::<f64, _>(StandardNormal) * inv_sqrt2,
                rng.sample::<f64, _>(StandardNormal) * inv_sqrt2,
            )
        })
    };
    let raw = gaussian(r0, n_e);
    // Orthonormal rows: conjugate-transpose of a thin Q.
    let q = qr_decompose(&raw).expect("gaussian matrix is valid").q;
    let rows = q.hermitian();
    if mix {
        // Exercise the general full-row-rank case with a random invertible
        // row mix (generically nonsingular).
        let m = gaussian(n_e, n_e);
        m.matmul(&rows)
    } else {
        rows
    }
}

/// Samples seeded full-row-rank adversaries on the reduced channel and
/// returns the worst fitted leakage pre-log. By the cancellation invariant
/// the maximum equals `n_e`; deviations indicate implementation bugs.
pub fn adversarial_eve_search(
    pc: &ParallelChannel,
    n_e: usize,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<EveSearchReport, AnalysisError> {
    let r0 = pc.profile.r0;
    let mut prelogs = Vec::with_capacity(trials);
    let mut curves: Vec<Vec<(f64, f64)>> = Vec::with_capacity(trials);
    let mut reference_values: Vec<f64> = Vec::with_capacity(trials);
    if n_e == 0 || trials == 0 {
        return Ok(EveSearchReport {
            trials,
            seed,
            prelogs: vec![0.0; trials],
            worst_prelog: 0.0,
            worst_trial: 0,
            worst_curve: grid.iter().map(|&p| (p, 0.0)).collect(),
            invariance_spread: 0.0,
        });
    }
    for trial in 0..trials {
        // Independent stream per trial, so results do not depend on order.
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(trial as u64));
        let h = sample_adversary(&mut rng, n_e, r0, trial % 2 == 1);
        let mut curve = Vec::with_capacity(grid.len());
        for &p_bar in grid {
            if let Ok((signal, _)) = power_budget(p_bar, pc.s_p, r0) {
                let v = eve_leakage(signal, r0, Some(&h))?;
                curve.push((p_bar, v.bits));
            }
        }
        if let Some(&(_, bits)) = curve.first() {
            reference_values.push(bits);
        }
        prelogs.push(fit_prelog(&curve)?);
        curves.push(curve);
    }
    let (worst_trial, &worst_prelog) = prelogs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .expect("at least one trial");
    let spread = if reference_values.is_empty() {
        0.0
    } else {
        let max = reference_values.iter().cloned().fold(f64::MIN, f64::max);
        let min = reference_values.iter().cloned().fold(f64::MAX, f64::min);
        (max - min) / max.abs().max(f64::MIN_POSITIVE)
    };
    Ok(EveSearchReport {
        trials,
        seed,
        prelogs,
        worst_prelog,
        worst_trial,
        worst_curve: curves[worst_trial].clone(),
        invariance_spread: spread,
    })
}

/// Fitted pre-log slopes of a sweep.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FittedPrelogs {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub re: f64,
    pub leakage: f64,
}

/// Tolerances a sweep or certificate was evaluated with.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Tolerances {
    pub prelog: f64,
    pub leakage_prelog: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            prelog: crate::TOL_PRELOG,
            leakage_prelog: crate::TOL_PRELOG_LEAKAGE,
        }
    }
}

/// Full sweep artifact: per-message rate curves, the worst sampled leakage
/// curve, and the fitted pre-logs.
#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub target: [f64; 3],
    pub mode: RegionMode,
    pub snr_points: Vec<f64>,
    pub rates: RateCurves,
    pub leakage: Vec<f64>,
    pub fitted: FittedPrelogs,
    pub seed: u64,
    pub eve_trials: usize,
    pub worst_eve_trial: usize,
    pub tolerances: Tolerances,
}

/// Runs the achievability sweep for a target over a grid.
pub fn run_sweep(
    spec: &ChannelSpec,
    target: [f64; 3],
    mode: RegionMode,
    grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<SweepReport, AnalysisError> {
    run_sweep_with_tol(spec, target, mode, grid, trials, seed, None)
}

/// The parallel channel re-budgeted at the top of the sweep grid. Sweeps and
/// certificates study the grid's budget range, so the allocation's rate
/// bookkeeping anchors there rather than at the spec's own operating point
/// (the integer layout and the margin signs do not depend on the power).
fn at_grid_top(pc: &ParallelChannel, grid: &[f64]) -> ParallelChannel {
    let mut out = pc.clone();
    if let Some(&top) = grid.last() {
        out.p_bar = top;
        out.effective_power = top / (pc.s_p * pc.s_p);
    }
    out
}

#[allow(clippy::too_many_arguments)]
pub fn run_sweep_with_tol(
    spec: &ChannelSpec,
    target: [f64; 3],
    mode: RegionMode,
    grid: &[f64],
    trials: usize,
    seed: u64,
    rank_tol: Option<f64>,
) -> Result<SweepReport, AnalysisError> {
    validate_grid(grid)?;
    let pc = crate::channel::reduce_to_parallel_with_tol(spec, rank_tol)?;
    let synthesis = synthesize(&at_grid_top(&pc, grid), spec.n_e, target, mode)?;
    let rates = achievable_rate_curve(&synthesis, &pc, grid)?;
    let eve = adversarial_eve_search(&pc, spec.n_e, grid, trials.max(1), seed)?;

    let zip = |ys: &[f64]| -> Vec<(f64, f64)> {
        rates
            .snr_points
            .iter()
            .copied()
            .zip(ys.iter().copied())
            .collect()
    };
    let fitted = FittedPrelogs {
        d0: fit_prelog(&zip(&rates.r0))?,
        d1: fit_prelog(&zip(&rates.r1))?,
        d2: fit_prelog(&zip(&rates.r2))?,
        re: fit_prelog(&zip(&rates.re))?,
        leakage: eve.worst_prelog,
    };
    Ok(SweepReport {
        target,
        mode,
        snr_points: rates.snr_points.clone(),
        leakage: eve.worst_curve.iter().map(|&(_, b)| b).collect(),
        rates,
        fitted,
        seed,
        eve_trials: eve.trials,
        worst_eve_trial: eve.worst_trial,
        tolerances: Tolerances::default(),
    })
}

fn validate_grid(grid: &[f64]) -> Result<(), AnalysisError> {
    if grid.len() < 4 {
        return Err(AnalysisError::BadGrid(format!(
            "need at least 4 points, got {}",
            grid.len()
        )));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AnalysisError::NonIncreasingGrid);
    }
    let decades = (grid.last().unwrap() / grid.first().unwrap()).log10();
    if decades < 4.0 {
        return Err(AnalysisError::BadGrid(format!(
            "grid must span at least 4 decades, spans {decades:.2}"
        )));
    }
    Ok(())
}

/// One named certification check.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// End-to-end certificate for a target triple.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub target: [f64; 3],
    pub mode: RegionMode,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
    pub fitted: FittedPrelogs,
    /// Secrecy accounting: total entropy slope, leakage slope, and their
    /// difference (the certified message secrecy slope).
    pub total_entropy_prelog: f64,
    pub leakage_prelog_budget: f64,
    pub secrecy_prelog: f64,
    pub converse: ConverseReport,
    pub sweep: SweepReport,
}

/// Certification options; defaults match the documented tolerances.
#[derive(Debug, Clone)]
pub struct CertifyOptions {
    pub grid: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    /// Absolute singular-value rank threshold; `None` uses the default rule.
    pub rank_tol: Option<f64>,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            grid: default_snr_grid(),
            trials: 100,
            seed: 0,
            tolerances: Tolerances::default(),
            rank_tol: None,
        }
    }
}

/// Certifies a target: achievable slopes match the target, leakage saturates
/// at the eavesdropper budget, converse slopes match the cut bounds,
/// decodability margins are positive, and (in privacy mode) the private
/// codebooks avoid the other receiver's observed coordinates.
pub fn certify(
    spec: &ChannelSpec,
    target: [f64; 3],
    mode: RegionMode,
    opts: &CertifyOptions,
) -> Result<Certificate, AnalysisError> {
    let profile = crate::channel::rank_profile_with_tol(spec, opts.rank_tol)?;
    let region = match mode {
        RegionMode::NoPrivacy => region_no_privacy(profile, spec.n_e),
        RegionMode::MutualPrivacy => region_with_privacy(profile, spec.n_e),
    };
    if let Some(facet) = region.first_violation(target) {
        return Err(SchemeError::TargetOutsideRegion { facet }.into());
    }

    let pc = crate::channel::reduce_to_parallel_with_tol(spec, opts.rank_tol)?;
    let synthesis = synthesize(&at_grid_top(&pc, &opts.grid), spec.n_e, target, mode)?;
    let sweep = run_sweep_with_tol(
        spec,
        target,
        mode,
        &opts.grid,
        opts.trials,
        opts.seed,
        opts.rank_tol,
    )?;
    let converse = converse_prelog_with_tol(spec, &opts.grid, opts.rank_tol)?;
    let tol = opts.tolerances;

    let mut checks = Vec::new();
    let mut push = |name: &'static str, passed: bool, detail: String| {
        checks.push(CheckResult {
            name,
            passed,
            detail,
        });
    };

    let fitted = sweep.fitted;
    let ach_ok = (fitted.d0 - target[0]).abs() <= tol.prelog
        && (fitted.d1 - target[1]).abs() <= tol.prelog
        && (fitted.d2 - target[2]).abs() <= tol.prelog;
    push(
        "achievable-prelogs",
        ach_ok,
        format!(
            "fitted ({:.4}, {:.4}, {:.4}) vs target ({}, {}, {}) ±{}",
            fitted.d0, fitted.d1, fitted.d2, target[0], target[1], target[2], tol.prelog
        ),
    );

    let ne = spec.n_e as f64;
    let re_ok = (fitted.re - ne).abs() <= tol.leakage_prelog;
    push(
        "fictitious-rate-prelog",
        re_ok,
        format!("fitted {:.4} vs N_E {} ±{}", fitted.re, ne, tol.leakage_prelog),
    );

    let eve = adversarial_eve_search(&pc, spec.n_e, &opts.grid, opts.trials.max(1), opts.seed)?;
    let leak_ok = (eve.worst_prelog - ne).abs() <= tol.leakage_prelog
        && eve.worst_prelog <= ne + tol.leakage_prelog
        && eve.invariance_spread <= 1e-9;
    push(
        "leakage-saturation",
        leak_ok,
        format!(
            "worst pre-log {:.4} vs N_E {} ±{}, invariance spread {:.2e}",
            eve.worst_prelog, ne, tol.leakage_prelog, eve.invariance_spread
        ),
    );

    let theorem_bounds = [
        profile.r1.saturating_sub(spec.n_e),
        profile.r2.saturating_sub(spec.n_e),
        profile.r0.saturating_sub(spec.n_e),
    ];
    let conv_int_ok = converse.bounds == theorem_bounds;
    let conv_fit_ok = converse
        .fitted
        .iter()
        .zip(&converse.bounds)
        .all(|(f, &b)| (f - b as f64).abs() <= tol.prelog);
    push(
        "converse-slopes",
        conv_int_ok && conv_fit_ok,
        format!(
            "bounds {:?} (theorem {:?}), fitted ({:.4}, {:.4}, {:.4})",
            converse.bounds, theorem_bounds, converse.fitted[0], converse.fitted[1],
            converse.fitted[2]
        ),
    );

    let decod = check_synthesis_decodability(&synthesis);
    let decod_ok = decod.iter().all(|(_, r)| r.all_positive());
    push(
        "decodability-margins",
        decod_ok,
        format!(
            "{} margin rows across {} component(s)",
            decod.iter().map(|(_, r)| r.margins.len()).sum::<usize>(),
            decod.len()
        ),
    );

    if mode == RegionMode::MutualPrivacy {
        let disjoint = synthesis
            .components
            .iter()
            .all(|(_, a)| a.layout.privacy_disjoint());
        push(
            "privacy-coordinate-disjointness",
            disjoint,
            "private codebooks avoid the other receiver's observed coordinates".into(),
        );
    }

    // Secrecy accounting at the pre-log level: the encoded block carries
    // (d0 + d1 + d2 + N_E) dimensions of entropy, the adversary resolves at
    // most N_E of them, and the fictitious-message side information closes
    // the gap exactly.
    let total_entropy = target[0] + target[1] + target[2] + ne;
    let secrecy = total_entropy - ne;
    let accounting_ok = (secrecy - (target[0] + target[1] + target[2])).abs() == 0.0;
    push(
        "secrecy-accounting",
        accounting_ok,
        format!(
            "total {:.4} - leakage {:.4} = secrecy {:.4}",
            total_entropy, ne, secrecy
        ),
    );

    let passed = checks.iter().all(|c| c.passed);
    Ok(Certificate {
        target,
        mode,
        passed,
        checks,
        fitted,
        total_entropy_prelog: total_entropy,
        leakage_prelog_budget: ne,
        secrecy_prelog: secrecy,
        converse,
        sweep,
    })
}

/// CSV rows for a sweep: `p_bar, R0, R1, R2, RE, leakage`.
pub fn sweep_to_csv(report: &SweepReport) -> String {
    let mut out = String::from("p_bar,R0,R1,R2,RE,leakage\n");
    for (i, &p) in report.snr_points.iter().enumerate() {
        out.push_str(&format!(
            "{},{:.12},{:.12},{:.12},{:.12},{:.12}\n",
            p,
            report.rates.r0[i],
            report.rates.r1[i],
            report.rates.r2[i],
            report.rates.re[i],
            report.leakage.get(i).copied().unwrap_or(0.0),
        ));
    }
    out
}
