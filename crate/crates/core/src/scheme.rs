//! Dimension-allocation transmission schemes over the parallel-channel
//! reduction: codebook dimension counts, rate budgets including the
//! fictitious message, the artificial-noise power split, and sequential
//! decoding feasibility margins.
//!
//! The signal space has `r0` coordinates: `rt1` private to receiver 1, `s`
//! common, `rt2` private to receiver 2, in that order. Three codebooks are
//! laid out over index ranges of that vector: `A` (carrying `W1` jointly
//! with the common pair), `B` (the common/fictitious pair `(W0, WE)`,
//! possibly borrowing private coordinates), and `C` (carrying `W2`).

use serde::Serialize;
use thiserror::Error;

use crate::channel::{ParallelChannel, Receiver};
use crate::matrix::RankProfile;
use crate::region::{region_no_privacy, region_with_privacy, RegionMode, SdofRegion};

/// Rate back-off factor: assigned code rates sit at `(1 - δ)` of their
/// budget so the strict decodability inequalities hold with a reportable
/// margin at corner targets.
pub const DECODING_MARGIN_DELTA: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("power must be positive, got {0}")]
    NonPositivePower(f64),
    #[error(
        "power budget too small: p_bar = {p_bar} with s_p = {s_p} leaves no signal power after \
         {r0} noise units; need p_bar > {min_feasible}"
    )]
    PowerBudgetTooSmall {
        p_bar: f64,
        s_p: f64,
        r0: usize,
        min_feasible: f64,
    },
    #[error("target lies outside the region: violates {facet}")]
    TargetOutsideRegion { facet: String },
    #[error("target component {value} is not a nonnegative integer")]
    NonIntegerTarget { value: f64 },
    #[error(
        "combined budget N_E' = {n_e_prime} exceeds min(r1, r2) = {min_rank}; the construction \
         is undefined in this degenerate regime"
    )]
    RegimeUnsupported { n_e_prime: usize, min_rank: usize },
    #[error("target {target:?} is not a convex combination of two integer corner allocations")]
    NotDecomposable { target: [f64; 3] },
    #[error("target needs time-sharing between the two corner constructions")]
    NeedsTimeShare,
}

/// Which of the two constructions applies for the target's combined budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseId {
    /// `s <= N_E' <= min(r1, r2)`: the slice is a rectangle and the common
    /// pair borrows `N_E' - s` coordinates from each private block.
    Case1,
    /// `N_E' < s`: the sum bound is active; surplus common coordinates carry
    /// private data and the two corners are reached by mirrored layouts.
    Case2,
}

/// How the `B` block subdivides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BSplit {
    /// Case 1: `(b1, b0, b2)` rows borrowed from private-1, common, private-2.
    Case1 { b1: usize, b0: usize, b2: usize },
    /// Case 2: the common block splits into coordinates reassigned to a
    /// private codebook and the `kept` coordinates forming `B` itself.
    Case2 { to_private: usize, kept: usize },
}

/// Half-open coordinate range into the parallel-channel vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoordRange {
    pub start: usize,
    pub end: usize,
}

impl CoordRange {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn disjoint(&self, other: &CoordRange) -> bool {
        self.is_empty() || other.is_empty() || self.end <= other.start || other.end <= self.start
    }
}

/// The integer part of an allocation: codebook dimension counts and their
/// coordinate ranges. Pure rank arithmetic, independent of powers and rates.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionLayout {
    pub case_id: CaseId,
    pub mode: RegionMode,
    pub profile: RankProfile,
    pub n_e: usize,
    /// `N_E' = N_E + d0` by definition.
    pub n_e_prime: usize,
    /// Coordinates available to the `(W0, WE)` decode at each receiver:
    /// `N_E'` in both base cases, `s` in the privacy-mode Case-2 variant.
    pub b_budget: usize,
    pub d_target: [i64; 3],
    pub dims_a: usize,
    pub dims_b: usize,
    pub dims_c: usize,
    pub b_split: BSplit,
    /// Receiver whose corner anchors a Case-2 layout; `None` for Case 1 and
    /// the privacy variant.
    pub anchor: Option<u8>,
    pub range_a: CoordRange,
    pub range_b: CoordRange,
    pub range_c: CoordRange,
}

fn range(start: usize, len: usize) -> CoordRange {
    CoordRange {
        start,
        end: start + len,
    }
}

impl DimensionLayout {
    /// Layout for an integer target, validating that the private-message
    /// dimensions fit. Targets on a Case-2 sum facet outside both corner
    /// rectangles return [`SchemeError::NeedsTimeShare`].
    pub fn for_target(
        profile: RankProfile,
        n_e: usize,
        target: [i64; 3],
        mode: RegionMode,
    ) -> Result<Self, SchemeError> {
        let layout = Self::build(profile, n_e, target, mode, false)?;
        Ok(layout)
    }

    /// Layout without the fit validation, for inspecting infeasible targets
    /// (decodability reports then show the negative margins).
    pub fn forced(
        profile: RankProfile,
        n_e: usize,
        target: [i64; 3],
        mode: RegionMode,
    ) -> Result<Self, SchemeError> {
        Self::build(profile, n_e, target, mode, true)
    }

    fn build(
        profile: RankProfile,
        n_e: usize,
        target: [i64; 3],
        mode: RegionMode,
        forced: bool,
    ) -> Result<Self, SchemeError> {
        for &t in &target {
            if t < 0 {
                return Err(SchemeError::NonIntegerTarget { value: t as f64 });
            }
        }
        let (t0, t1, t2) = (target[0] as usize, target[1] as usize, target[2] as usize);
        let (r1, r2, s) = (profile.r1, profile.r2, profile.s);
        let (rt1, rt2) = (profile.rt1, profile.rt2);
        let n_e_prime = n_e + t0;
        let min_rank = r1.min(r2);

        let privacy_variant = mode == RegionMode::MutualPrivacy && n_e_prime < s;

        if privacy_variant {
            // Case-2 construction instantiated with the whole common block:
            // B spans all s common coordinates, A and C stay fully private.
            if !forced && (t1 > rt1 || t2 > rt2) {
                return Err(SchemeError::TargetOutsideRegion {
                    facet: if t1 > rt1 {
                        format!("d1 <= {rt1}")
                    } else {
                        format!("d2 <= {rt2}")
                    },
                });
            }
            return Ok(DimensionLayout {
                case_id: CaseId::Case2,
                mode,
                profile,
                n_e,
                n_e_prime,
                b_budget: s,
                d_target: target,
                dims_a: rt1,
                dims_b: s,
                dims_c: rt2,
                b_split: BSplit::Case2 {
                    to_private: 0,
                    kept: s,
                },
                anchor: None,
                range_a: range(0, rt1),
                range_b: range(rt1, s),
                range_c: range(rt1 + s, rt2),
            });
        }

        if n_e_prime >= s {
            // Case 1.
            if n_e_prime > min_rank {
                return Err(SchemeError::RegimeUnsupported { n_e_prime, min_rank });
            }
            let dims_a = r1 - n_e_prime;
            let dims_b = 2 * n_e_prime - s;
            let dims_c = r2 - n_e_prime;
            if !forced && (t1 > dims_a || t2 > dims_c) {
                return Err(SchemeError::TargetOutsideRegion {
                    facet: if t1 > dims_a {
                        format!("d0+d1 <= {}", r1 - n_e)
                    } else {
                        format!("d0+d2 <= {}", r2 - n_e)
                    },
                });
            }
            let borrow = n_e_prime - s;
            return Ok(DimensionLayout {
                case_id: CaseId::Case1,
                mode,
                profile,
                n_e,
                n_e_prime,
                b_budget: n_e_prime,
                d_target: target,
                dims_a,
                dims_b,
                dims_c,
                b_split: BSplit::Case1 {
                    b1: borrow,
                    b0: s,
                    b2: borrow,
                },
                anchor: None,
                range_a: range(0, dims_a),
                range_b: range(dims_a, dims_b),
                range_c: range(dims_a + dims_b, dims_c),
            });
        }

        // Case 2 without privacy: N_E' < s <= min(r1, r2). The construction
        // anchored at receiver 1's corner grants the surplus common
        // coordinates to A; the mirror grants them to C.
        let anchor = if t2 <= rt2 {
            Receiver::One
        } else if t1 <= rt1 {
            Receiver::Two
        } else if forced {
            Receiver::One
        } else {
            return Err(SchemeError::NeedsTimeShare);
        };
        let surplus = s - n_e_prime;
        let (dims_a, dims_c, anchor_id) = match anchor {
            Receiver::One => (rt1 + surplus, rt2, 1),
            Receiver::Two => (rt1, rt2 + surplus, 2),
        };
        let dims_b = n_e_prime;
        if !forced && (t1 > dims_a || t2 > dims_c) {
            return Err(SchemeError::TargetOutsideRegion {
                facet: if t1 > dims_a {
                    format!("d0+d1 <= {}", r1 - n_e)
                } else {
                    format!("d0+d2 <= {}", r2 - n_e)
                },
            });
        }
        let (range_a, range_b, range_c) = match anchor {
            Receiver::One => (
                range(0, dims_a),
                range(dims_a, dims_b),
                range(dims_a + dims_b, dims_c),
            ),
            Receiver::Two => (
                range(0, rt1),
                range(rt1, dims_b),
                range(rt1 + dims_b, dims_c),
            ),
        };
        Ok(DimensionLayout {
            case_id: CaseId::Case2,
            mode,
            profile,
            n_e,
            n_e_prime,
            b_budget: n_e_prime,
            d_target: target,
            dims_a,
            dims_b,
            dims_c,
            b_split: BSplit::Case2 {
                to_private: surplus,
                kept: n_e_prime,
            },
            anchor: Some(anchor_id),
            range_a,
            range_b,
            range_c,
        })
    }

    /// Coordinates receiver 1 observes: its private block plus the common block.
    pub fn rx1_observed(&self) -> CoordRange {
        range(0, self.profile.r1)
    }

    /// Coordinates receiver 2 observes: the common block plus its private block.
    pub fn rx2_observed(&self) -> CoordRange {
        CoordRange {
            start: self.profile.rt1,
            end: self.profile.r0,
        }
    }

    /// Structural mutual-privacy check: `W1`'s coordinates are invisible to
    /// receiver 2 and `W2`'s to receiver 1.
    pub fn privacy_disjoint(&self) -> bool {
        self.range_a.disjoint(&self.rx2_observed()) && self.range_c.disjoint(&self.rx1_observed())
    }

    /// Dimension conservation: the three codebooks tile the signal space.
    pub fn dims_sum(&self) -> usize {
        self.dims_a + self.dims_b + self.dims_c
    }
}

/// Per-parallel-channel rate with the artificial noise folded in:
/// `R = log2(1 + s_min^2 (P/r0) / (s_min^2 + 1))`.
pub fn per_channel_rate(signal_power: f64, r0: usize, s_min: f64) -> Result<f64, SchemeError> {
    if !signal_power.is_finite() || signal_power <= 0.0 {
        return Err(SchemeError::NonPositivePower(signal_power));
    }
    if !s_min.is_finite() || s_min <= 0.0 || r0 == 0 {
        return Err(SchemeError::NonPositivePower(s_min));
    }
    let snr = s_min * s_min * (signal_power / r0 as f64) / (s_min * s_min + 1.0);
    Ok((1.0 + snr).log2())
}

/// Splits the budget into signal power and the `r0` artificial-noise units:
/// `(p_bar / s_p^2 - r0, r0)`.
pub fn power_budget(p_bar: f64, s_p: f64, r0: usize) -> Result<(f64, f64), SchemeError> {
    if !p_bar.is_finite() || p_bar <= 0.0 || !s_p.is_finite() || s_p <= 0.0 {
        return Err(SchemeError::NonPositivePower(p_bar.min(s_p)));
    }
    let signal = p_bar / (s_p * s_p) - r0 as f64;
    if signal <= 0.0 {
        return Err(SchemeError::PowerBudgetTooSmall {
            p_bar,
            s_p,
            r0,
            min_feasible: r0 as f64 * s_p * s_p,
        });
    }
    Ok((signal, r0 as f64))
}

/// Assigned message rates in bits per channel use.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MessageRates {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    pub re: f64,
}

/// A concrete allocation: layout plus the rate/power bookkeeping at one
/// operating point.
#[derive(Debug, Clone, Serialize)]
pub struct SchemeAllocation {
    pub layout: DimensionLayout,
    /// Per-parallel-channel rate `R`.
    pub rate_per_channel: f64,
    /// `(d0 R, d1 R, d2 R, N_E R)`.
    pub rates: MessageRates,
    pub signal_power: f64,
    pub noise_power_total: f64,
    /// Back-off factor applied to code rates in the decodability checks.
    pub delta: f64,
}

impl SchemeAllocation {
    fn build(pc: &ParallelChannel, layout: DimensionLayout) -> Result<Self, SchemeError> {
        let (signal_power, noise_total) = power_budget(pc.p_bar, pc.s_p, pc.profile.r0)?;
        let r = per_channel_rate(signal_power, pc.profile.r0, pc.s_min)?;
        let t = layout.d_target;
        Ok(SchemeAllocation {
            rates: MessageRates {
                r0: t[0] as f64 * r,
                r1: t[1] as f64 * r,
                r2: t[2] as f64 * r,
                re: layout.n_e as f64 * r,
            },
            rate_per_channel: r,
            signal_power,
            noise_power_total: noise_total,
            delta: DECODING_MARGIN_DELTA,
            layout,
        })
    }

    /// Achieved degrees of freedom: rates divided by the per-channel rate.
    pub fn dof(&self) -> [f64; 3] {
        [
            self.rates.r0 / self.rate_per_channel,
            self.rates.r1 / self.rate_per_channel,
            self.rates.r2 / self.rate_per_channel,
        ]
    }
}

/// Synthesis result: a single allocation or a convex time-share of two.
#[derive(Debug, Clone, Serialize)]
pub struct Synthesis {
    pub target: [f64; 3],
    pub mode: RegionMode,
    /// `(weight, allocation)` pairs; weights sum to one.
    pub components: Vec<(f64, SchemeAllocation)>,
}

impl Synthesis {
    pub fn is_time_shared(&self) -> bool {
        self.components.len() > 1
    }

    /// Time-share-weighted degrees of freedom, equal to the target.
    pub fn dof(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (w, alloc) in &self.components {
            let d = alloc.dof();
            for i in 0..3 {
                out[i] += w * d[i];
            }
        }
        out
    }

    /// Time-share-weighted assigned rates.
    pub fn effective_rates(&self) -> MessageRates {
        let mut acc = MessageRates {
            r0: 0.0,
            r1: 0.0,
            r2: 0.0,
            re: 0.0,
        };
        for (w, a) in &self.components {
            acc.r0 += w * a.rates.r0;
            acc.r1 += w * a.rates.r1;
            acc.r2 += w * a.rates.r2;
            acc.re += w * a.rates.re;
        }
        acc
    }
}

fn region_for(profile: RankProfile, n_e: usize, mode: RegionMode) -> SdofRegion {
    match mode {
        RegionMode::NoPrivacy => region_no_privacy(profile, n_e),
        RegionMode::MutualPrivacy => region_with_privacy(profile, n_e),
    }
}

const INT_EPS: f64 = 1e-9;

fn as_integer_triple(t: [f64; 3]) -> Option<[i64; 3]> {
    let mut out = [0i64; 3];
    for i in 0..3 {
        let r = t[i].round();
        if (t[i] - r).abs() > INT_EPS {
            return None;
        }
        out[i] = r as i64;
    }
    Some(out)
}

/// All integer points of the region that admit a single (non-time-shared)
/// allocation.
fn single_synthesizable_points(
    region: &SdofRegion,
    n_e: usize,
    mode: RegionMode,
) -> Vec<[i64; 3]> {
    region
        .integer_points()
        .into_iter()
        .filter(|&p| DimensionLayout::for_target(region.profile, n_e, p, mode).is_ok())
        .collect()
}

/// Finds `λ ∈ [0, 1]` with `t = λ p + (1 - λ) q`, if the target lies on the
/// segment between the two anchors.
fn segment_weight(t: [f64; 3], p: [i64; 3], q: [i64; 3]) -> Option<f64> {
    let mut lambda: Option<f64> = None;
    for i in 0..3 {
        let (pi, qi) = (p[i] as f64, q[i] as f64);
        if (pi - qi).abs() < INT_EPS {
            if (t[i] - qi).abs() > INT_EPS {
                return None;
            }
        } else {
            let l = (t[i] - qi) / (pi - qi);
            match lambda {
                None => lambda = Some(l),
                Some(prev) if (prev - l).abs() > 1e-8 => return None,
                _ => {}
            }
        }
    }
    let l = lambda.unwrap_or(1.0);
    if (-INT_EPS..=1.0 + INT_EPS).contains(&l) {
        Some(l.clamp(0.0, 1.0))
    } else {
        None
    }
}

/// Synthesizes an allocation (or a two-corner time-share) achieving `target`
/// over the parallel channel, in the given region mode.
pub fn synthesize(
    pc: &ParallelChannel,
    n_e: usize,
    target: [f64; 3],
    mode: RegionMode,
) -> Result<Synthesis, SchemeError> {
    let profile = pc.profile;
    let region = region_for(profile, n_e, mode);
    if let Some(facet) = region.first_violation(target) {
        return Err(SchemeError::TargetOutsideRegion { facet });
    }

    if let Some(t) = as_integer_triple(target) {
        match DimensionLayout::for_target(profile, n_e, t, mode) {
            Ok(layout) => {
                return Ok(Synthesis {
                    target,
                    mode,
                    components: vec![(1.0, SchemeAllocation::build(pc, layout)?)],
                });
            }
            Err(SchemeError::NeedsTimeShare) => {}
            Err(e) => return Err(e),
        }
    }

    // Fractional target, or an integer point reachable only by mixing the
    // two Case-2 corner layouts: decompose over a segment between two
    // single-allocation anchor points.
    let anchors = single_synthesizable_points(&region, n_e, mode);
    for (i, &p) in anchors.iter().enumerate() {
        for &q in anchors.iter().skip(i + 1) {
            if let Some(lambda) = segment_weight(target, p, q) {
                let lp = DimensionLayout::for_target(profile, n_e, p, mode)?;
                let lq = DimensionLayout::for_target(profile, n_e, q, mode)?;
                let mut components = Vec::new();
                if lambda > INT_EPS {
                    components.push((lambda, SchemeAllocation::build(pc, lp)?));
                }
                if 1.0 - lambda > INT_EPS {
                    components.push((1.0 - lambda, SchemeAllocation::build(pc, lq)?));
                }
                return Ok(Synthesis {
                    target,
                    mode,
                    components,
                });
            }
        }
    }
    Err(SchemeError::NotDecomposable { target })
}

/// One decodability condition: a message (or message pair) decoded at one
/// receiver, with the capacity side, the backed-off assigned rate, and the
/// resulting margin in bits per use.
#[derive(Debug, Clone, Serialize)]
pub struct MessageMargin {
    pub message: &'static str,
    pub receiver: u8,
    pub capacity_bits: f64,
    pub rate_bits: f64,
    pub margin_bits: f64,
}

/// Sequential-decoding feasibility report for one allocation.
#[derive(Debug, Clone, Serialize)]
pub struct DecodabilityReport {
    pub margins: Vec<MessageMargin>,
}

impl DecodabilityReport {
    pub fn all_positive(&self) -> bool {
        self.margins.iter().all(|m| m.margin_bits > 0.0)
    }
}

/// Margins for every message actually carried by the allocation. The
/// capacity side is the observed-dimension budget times the per-channel
/// rate; the rate side is backed off by `(1 - δ)`.
pub fn check_decodability(alloc: &SchemeAllocation) -> DecodabilityReport {
    let r = alloc.rate_per_channel;
    let scale = 1.0 - alloc.delta;
    let l = &alloc.layout;
    let t = l.d_target;
    let mut margins = Vec::new();
    let mut push = |message: &'static str, receiver: u8, cap_dims: usize, rate: f64| {
        margins.push(MessageMargin {
            message,
            receiver,
            capacity_bits: cap_dims as f64 * r,
            rate_bits: rate,
            margin_bits: cap_dims as f64 * r - scale * rate,
        });
    };
    let common_rate = (t[0] as usize + l.n_e) as f64 * r;
    if t[0] > 0 || l.n_e > 0 {
        push("W0+WE", 1, l.b_budget, common_rate);
        push("W0+WE", 2, l.b_budget, common_rate);
    }
    if t[1] > 0 {
        push("W1", 1, l.dims_a, t[1] as f64 * r);
    }
    if t[2] > 0 {
        push("W2", 2, l.dims_c, t[2] as f64 * r);
    }
    DecodabilityReport { margins }
}

/// Decodability across all time-share components.
pub fn check_synthesis_decodability(s: &Synthesis) -> Vec<(f64, DecodabilityReport)> {
    s.components
        .iter()
        .map(|(w, a)| (*w, check_decodability(a)))
        .collect()
}
