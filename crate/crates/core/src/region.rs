//! Exact secrecy-degrees-of-freedom region polytopes over `(d0, d1, d2)`.
//!
//! Region bounds are `{.}+`-clamped integer rank differences, so everything
//! here is exact integer arithmetic: constraint evaluation, lattice-point
//! enumeration, and extreme-point extraction.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::matrix::RankProfile;

#[derive(Debug, Error)]
pub enum RegionError {
    #[error("d0 = {d0} is infeasible for this region (max {max})")]
    InfeasibleD0 { d0: i64, max: i64 },
    #[error("regions have mismatched profiles or eavesdropper budgets")]
    MismatchedRegions,
}

/// Whether the mutual-privacy constraint is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionMode {
    NoPrivacy,
    MutualPrivacy,
}

/// One facet `coeffs . (d0,d1,d2) <= bound` with 0/1 coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Constraint {
    pub coeffs: [i64; 3],
    pub bound: i64,
    pub label: &'static str,
    /// Set when the `{.}+` clamp fired, i.e. the raw rank difference was
    /// negative and the bound was pinned at zero.
    pub clamped: bool,
}

/// A region polytope: the listed facets plus nonnegativity.
#[derive(Debug, Clone, PartialEq)]
pub struct SdofRegion {
    pub constraints: Vec<Constraint>,
    pub mode: RegionMode,
    pub profile: RankProfile,
    pub n_e: usize,
}

fn clamp_pos(v: i64) -> (i64, bool) {
    if v < 0 {
        (0, true)
    } else {
        (v, false)
    }
}

fn facet(coeffs: [i64; 3], raw: i64, label: &'static str) -> Constraint {
    let (bound, clamped) = clamp_pos(raw);
    Constraint {
        coeffs,
        bound,
        label,
        clamped,
    }
}

/// Region without the mutual-privacy constraint: pairwise cut bounds plus
/// the cooperative sum bound.
pub fn region_no_privacy(profile: RankProfile, n_e: usize) -> SdofRegion {
    let ne = n_e as i64;
    let (r1, r2, r0) = (profile.r1 as i64, profile.r2 as i64, profile.r0 as i64);
    SdofRegion {
        constraints: vec![
            facet([1, 1, 0], r1 - ne, "d0+d1"),
            facet([1, 0, 1], r2 - ne, "d0+d2"),
            facet([1, 1, 1], r0 - ne, "d0+d1+d2"),
        ],
        mode: RegionMode::NoPrivacy,
        profile,
        n_e,
    }
}

/// Region with mutual privacy: pairwise cut bounds plus per-user bounds that
/// confine each private message to the subspace the other receiver misses.
pub fn region_with_privacy(profile: RankProfile, n_e: usize) -> SdofRegion {
    let ne = n_e as i64;
    let (r1, r2, s) = (profile.r1 as i64, profile.r2 as i64, profile.s as i64);
    SdofRegion {
        constraints: vec![
            facet([1, 1, 0], r1 - ne, "d0+d1"),
            facet([1, 0, 1], r2 - ne, "d0+d2"),
            facet([0, 1, 0], r1 - s, "d1"),
            facet([0, 0, 1], r2 - s, "d2"),
        ],
        mode: RegionMode::MutualPrivacy,
        profile,
        n_e,
    }
}

impl SdofRegion {
    /// Exact membership for integer points.
    pub fn contains_int(&self, p: [i64; 3]) -> bool {
        if p.iter().any(|&x| x < 0) {
            return false;
        }
        self.constraints.iter().all(|c| {
            c.coeffs[0] * p[0] + c.coeffs[1] * p[1] + c.coeffs[2] * p[2] <= c.bound
        })
    }

    /// Closed-region membership for real points (time-sharing makes the
    /// region convex, so fractional points are meaningful).
    pub fn contains(&self, p: [f64; 3]) -> bool {
        const EPS: f64 = 1e-9;
        if p.iter().any(|&x| !x.is_finite() || x < -EPS) {
            return false;
        }
        self.constraints.iter().all(|c| {
            let lhs = c.coeffs[0] as f64 * p[0] + c.coeffs[1] as f64 * p[1] + c.coeffs[2] as f64 * p[2];
            lhs <= c.bound as f64 + EPS
        })
    }

    /// First violated facet for a real point, for error reporting.
    pub fn first_violation(&self, p: [f64; 3]) -> Option<String> {
        const EPS: f64 = 1e-9;
        for (i, &x) in p.iter().enumerate() {
            if !x.is_finite() || x < -EPS {
                return Some(format!("d{i} >= 0"));
            }
        }
        for c in &self.constraints {
            let lhs = c.coeffs[0] as f64 * p[0] + c.coeffs[1] as f64 * p[1] + c.coeffs[2] as f64 * p[2];
            if lhs > c.bound as f64 + EPS {
                return Some(format!("{} <= {}", c.label, c.bound));
            }
        }
        None
    }

    /// Largest feasible `d0` (the origin direction is always feasible, so
    /// this is the min of the bounds on facets involving `d0`).
    pub fn d0_max(&self) -> i64 {
        self.constraints
            .iter()
            .filter(|c| c.coeffs[0] == 1)
            .map(|c| c.bound)
            .min()
            .unwrap_or(0)
    }

    /// Per-axis bounding box (max feasible coordinate along each axis).
    fn bounding_box(&self) -> [i64; 3] {
        let mut bb = [i64::MAX; 3];
        for (axis, entry) in bb.iter_mut().enumerate() {
            for c in &self.constraints {
                if c.coeffs[axis] == 1 {
                    *entry = (*entry).min(c.bound);
                }
            }
            if *entry == i64::MAX {
                *entry = 0;
            }
        }
        bb
    }

    /// All feasible integer points.
    pub fn integer_points(&self) -> Vec<[i64; 3]> {
        let bb = self.bounding_box();
        let mut pts = Vec::new();
        for d0 in 0..=bb[0] {
            for d1 in 0..=bb[1] {
                for d2 in 0..=bb[2] {
                    let p = [d0, d1, d2];
                    if self.contains_int(p) {
                        pts.push(p);
                    }
                }
            }
        }
        pts
    }
}

/// Fixed-`d0` slice geometry: rectangle when the two pairwise bounds already
/// imply the sum bound, pentagon when the sum bound cuts a corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseKind {
    Rectangle,
    Pentagon,
}

/// Classifies the fixed-`d0` slice. The boundary `d0 + n_e = s` belongs to
/// the rectangle case, where both analyses agree.
pub fn classify_case(profile: RankProfile, n_e: usize, d0: i64) -> Result<CaseKind, RegionError> {
    let region = region_no_privacy(profile, n_e);
    let max = region.d0_max();
    if d0 < 0 || d0 > max {
        return Err(RegionError::InfeasibleD0 { d0, max });
    }
    if d0 + n_e as i64 >= profile.s as i64 {
        Ok(CaseKind::Rectangle)
    } else {
        Ok(CaseKind::Pentagon)
    }
}

/// Extreme points of the polytope plus, per feasible `d0`, the ordered slice
/// polygon in the `(d1, d2)` plane.
#[derive(Debug, Clone, Serialize)]
pub struct RegionVertexSet {
    pub vertices: Vec<[i64; 3]>,
    pub fixed_d0_polygons: BTreeMap<i64, Vec<[i64; 2]>>,
}

/// Directions used by the extremality test. A feasible lattice point `v` is
/// a vertex of the polytope iff no direction `d` here has both `v + d` and
/// `v - d` feasible; with 0/1 facet coefficients and integer bounds this test
/// is exact (any rank-deficient tight set admits a witness direction from
/// this list, and non-tight facets have integer slack at least one while
/// every `|n . d|` is at most one for the witness).
const DIRECTIONS_3D: [[i64; 3]; 13] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, -1, 0],
    [1, 0, 1],
    [1, 0, -1],
    [0, 1, 1],
    [0, 1, -1],
    [1, 1, 1],
    [1, 1, -1],
    [1, -1, 1],
    [1, -1, -1],
];

/// Enumerates all extreme points by lattice scan plus the direction test.
pub fn enumerate_vertices(region: &SdofRegion) -> RegionVertexSet {
    let pts = region.integer_points();
    let mut vertices: Vec<[i64; 3]> = pts
        .iter()
        .copied()
        .filter(|&p| {
            !DIRECTIONS_3D.iter().any(|d| {
                let plus = [p[0] + d[0], p[1] + d[1], p[2] + d[2]];
                let minus = [p[0] - d[0], p[1] - d[1], p[2] - d[2]];
                region.contains_int(plus) && region.contains_int(minus)
            })
        })
        .collect();
    vertices.sort_unstable();

    let mut fixed_d0_polygons = BTreeMap::new();
    for d0 in 0..=region.d0_max() {
        fixed_d0_polygons.insert(d0, slice_polygon(region, d0));
    }
    RegionVertexSet {
        vertices,
        fixed_d0_polygons,
    }
}

/// Ordered (counter-clockwise) vertex list of the fixed-`d0` slice polygon.
fn slice_polygon(region: &SdofRegion, d0: i64) -> Vec<[i64; 2]> {
    // Residual 2-D constraints after fixing d0.
    let slice: Vec<([i64; 2], i64)> = region
        .constraints
        .iter()
        .filter(|c| c.coeffs[1] != 0 || c.coeffs[2] != 0)
        .map(|c| ([c.coeffs[1], c.coeffs[2]], c.bound - c.coeffs[0] * d0))
        .collect();
    let feasible = |p: [i64; 2]| -> bool {
        p[0] >= 0
            && p[1] >= 0
            && slice.iter().all(|(g, b)| g[0] * p[0] + g[1] * p[1] <= *b)
    };
    if !feasible([0, 0]) {
        return Vec::new();
    }
    let mut bb = [i64::MAX; 2];
    for (axis, entry) in bb.iter_mut().enumerate() {
        for (g, b) in &slice {
            if g[axis] == 1 {
                *entry = (*entry).min(*b);
            }
        }
        if *entry == i64::MAX {
            *entry = 0;
        }
    }
    const DIRECTIONS_2D: [[i64; 2]; 4] = [[1, 0], [0, 1], [1, 1], [1, -1]];
    let mut verts = Vec::new();
    for d1 in 0..=bb[0] {
        for d2 in 0..=bb[1] {
            let p = [d1, d2];
            if !feasible(p) {
                continue;
            }
            let extreme = !DIRECTIONS_2D.iter().any(|d| {
                feasible([p[0] + d[0], p[1] + d[1]]) && feasible([p[0] - d[0], p[1] - d[1]])
            });
            if extreme {
                verts.push(p);
            }
        }
    }
    order_ccw(&mut verts);
    verts
}

/// Orders polygon vertices counter-clockwise around their centroid, starting
/// from the lexicographically smallest.
fn order_ccw(verts: &mut [[i64; 2]]) {
    if verts.len() <= 2 {
        verts.sort_unstable();
        return;
    }
    let n = verts.len() as f64;
    let cx = verts.iter().map(|v| v[0] as f64).sum::<f64>() / n;
    let cy = verts.iter().map(|v| v[1] as f64).sum::<f64>() / n;
    verts.sort_by(|a, b| {
        let aa = (a[1] as f64 - cy).atan2(a[0] as f64 - cx);
        let ab = (b[1] as f64 - cy).atan2(b[0] as f64 - cx);
        aa.partial_cmp(&ab).unwrap()
    });
    let start = verts
        .iter()
        .enumerate()
        .min_by_key(|(_, v)| **v)
        .map(|(i, _)| i)
        .unwrap_or(0);
    verts.rotate_left(start);
}

/// Set relation between two regions over the same profile and budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionRelation {
    Equal,
    ASubsetB,
    BSubsetA,
    Incomparable,
}

/// Decides the set relation via mutual vertex membership (both polytopes are
/// convex hulls of their vertex sets).
pub fn compare(a: &SdofRegion, b: &SdofRegion) -> Result<RegionRelation, RegionError> {
    if a.profile != b.profile || a.n_e != b.n_e {
        return Err(RegionError::MismatchedRegions);
    }
    let va = enumerate_vertices(a).vertices;
    let vb = enumerate_vertices(b).vertices;
    let a_in_b = va.iter().all(|&v| b.contains_int(v));
    let b_in_a = vb.iter().all(|&v| a.contains_int(v));
    Ok(match (a_in_b, b_in_a) {
        (true, true) => RegionRelation::Equal,
        (true, false) => RegionRelation::ASubsetB,
        (false, true) => RegionRelation::BSubsetA,
        (false, false) => RegionRelation::Incomparable,
    })
}

/// JSON export shape for regions (constraints, vertices, slice polygons).
#[derive(Debug, Serialize)]
pub struct RegionExport {
    pub mode: RegionMode,
    pub n_e: usize,
    pub profile: RankProfile,
    pub constraints: Vec<Constraint>,
    pub vertices: Vec<[i64; 3]>,
    pub fixed_d0_polygons: BTreeMap<i64, Vec<[i64; 2]>>,
}

impl RegionExport {
    pub fn build(region: &SdofRegion) -> Self {
        let vs = enumerate_vertices(region);
        RegionExport {
            mode: region.mode,
            n_e: region.n_e,
            profile: region.profile,
            constraints: region.constraints.clone(),
            vertices: vs.vertices,
            fixed_d0_polygons: vs.fixed_d0_polygons,
        }
    }
}
