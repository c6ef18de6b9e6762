//! Output envelopes and table renderers.
//!
//! Every artifact embeds the canonical input hash, the seed, and the
//! tolerance set, so a run can be reproduced from its output alone. Nothing
//! here emits timestamps; re-running a command yields byte-identical output.

use serde::Serialize;
use serde_json::{json, Value};

use sdof_core::analysis::{Certificate, ConverseReport, SweepReport};
use sdof_core::channel::ParallelChannel;
use sdof_core::matrix::GsvdFactors;
use sdof_core::region::{RegionExport, RegionMode};
use sdof_core::scheme::{check_synthesis_decodability, BSplit, CaseId, Synthesis};

/// Tolerance set recorded in every artifact.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ToleranceSet {
    /// Absolute singular-value rank threshold; `null` means the default
    /// `max(dim) * eps * sigma_max` rule.
    pub rank: Option<f64>,
    pub prelog: f64,
    pub leakage_prelog: f64,
    pub unitary: f64,
    pub reconstruction: f64,
}

impl ToleranceSet {
    pub fn new(rank: Option<f64>, prelog: f64) -> Self {
        ToleranceSet {
            rank,
            prelog,
            leakage_prelog: sdof_core::TOL_PRELOG_LEAKAGE,
            unitary: sdof_core::TOL_UNITARY,
            reconstruction: sdof_core::TOL_RECONSTRUCTION,
        }
    }
}

/// JSON envelope shared by all commands.
pub fn envelope(
    command: &str,
    input_hash: &str,
    seed: u64,
    tolerances: &ToleranceSet,
    warnings: &[String],
    result: Value,
) -> String {
    let doc = json!({
        "command": command,
        "input_hash": input_hash,
        "seed": seed,
        "tolerances": tolerances,
        "warnings": warnings,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable document");
    text.push('\n');
    text
}

/// Header lines shared by all table outputs.
pub fn table_header(
    command: &str,
    input_hash: &str,
    seed: u64,
    tolerances: &ToleranceSet,
    warnings: &[String],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("== sdof {command} ==\n"));
    out.push_str(&format!("input    : {input_hash}\n"));
    out.push_str(&format!("seed     : {seed}\n"));
    out.push_str(&format!(
        "tolerances: rank={} prelog={} leakage={}\n",
        tolerances
            .rank
            .map(|t| format!("{t:e}"))
            .unwrap_or_else(|| "default".into()),
        tolerances.prelog,
        tolerances.leakage_prelog
    ));
    for w in warnings {
        out.push_str(&format!("warning  : {w}\n"));
    }
    out.push('\n');
    out
}

/// Serializable view of the GSVD factors plus the reduction quantities.
#[derive(Serialize)]
pub struct GsvdExport<'a> {
    pub profile: sdof_core::matrix::RankProfile,
    pub rank_warning: bool,
    pub s1_diag: Vec<f64>,
    pub s2_diag: Vec<f64>,
    pub s_min: f64,
    pub s_p: f64,
    pub effective_power: f64,
    pub reconstruction_residuals: [f64; 2],
    pub u: &'a sdof_core::matrix::ComplexMatrix,
    pub v: &'a sdof_core::matrix::ComplexMatrix,
    pub w: &'a sdof_core::matrix::ComplexMatrix,
    pub q: &'a sdof_core::matrix::ComplexMatrix,
    pub r_tri: &'a sdof_core::matrix::ComplexMatrix,
    pub sigma1: &'a sdof_core::matrix::ComplexMatrix,
    pub sigma2: &'a sdof_core::matrix::ComplexMatrix,
}

impl<'a> GsvdExport<'a> {
    pub fn new(factors: &'a GsvdFactors, pc: &ParallelChannel, residuals: [f64; 2]) -> Self {
        GsvdExport {
            profile: factors.profile,
            rank_warning: factors.rank_warning,
            s1_diag: factors.s1_diag(),
            s2_diag: factors.s2_diag(),
            s_min: pc.s_min,
            s_p: pc.s_p,
            effective_power: pc.effective_power,
            reconstruction_residuals: residuals,
            u: &factors.u,
            v: &factors.v,
            w: &factors.w,
            q: &factors.q,
            r_tri: &factors.r_tri,
            sigma1: &factors.sigma1,
            sigma2: &factors.sigma2,
        }
    }
}

pub fn gsvd_table(pc: &ParallelChannel, residuals: [f64; 2]) -> String {
    let p = pc.profile;
    let f = &pc.factors;
    let mut out = String::new();
    out.push_str(&format!(
        "rank profile : r1={} r2={} r0={} s={} rt1={} rt2={}\n",
        p.r1, p.r2, p.r0, p.s, p.rt1, p.rt2
    ));
    if f.rank_warning {
        out.push_str("note         : a singular value sits near the rank tolerance boundary\n");
    }
    out.push_str(&format!(
        "S1 diagonal  : [{}]\n",
        f.s1_diag()
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    out.push_str(&format!(
        "S2 diagonal  : [{}]\n",
        f.s2_diag()
            .iter()
            .map(|x| format!("{x:.6}"))
            .collect::<Vec<_>>()
            .join(", ")
    ));
    out.push_str(&format!("s_min        : {:.6}\n", pc.s_min));
    out.push_str(&format!("s_P          : {:.6}\n", pc.s_p));
    out.push_str(&format!(
        "effective P  : {:.6} (= p_bar / s_P^2)\n",
        pc.effective_power
    ));
    out.push_str(&format!(
        "residuals    : {:.3e} (H1), {:.3e} (H2)\n",
        residuals[0], residuals[1]
    ));
    out
}

pub fn region_table(export: &RegionExport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "mode     : {}\n",
        match export.mode {
            RegionMode::NoPrivacy => "no mutual privacy",
            RegionMode::MutualPrivacy => "mutual privacy",
        }
    ));
    let p = export.profile;
    out.push_str(&format!(
        "profile  : r1={} r2={} r0={} s={}   n_e={}\n",
        p.r1, p.r2, p.r0, p.s, export.n_e
    ));
    out.push_str("facets   :\n");
    for c in &export.constraints {
        out.push_str(&format!(
            "  {} <= {}{}\n",
            c.label,
            c.bound,
            if c.clamped { "   (clamped at 0)" } else { "" }
        ));
    }
    out.push_str(&format!(
        "vertices : {}\n",
        export
            .vertices
            .iter()
            .map(|v| format!("({},{},{})", v[0], v[1], v[2]))
            .collect::<Vec<_>>()
            .join(" ")
    ));
    out.push_str("slices   :\n");
    for (d0, poly) in &export.fixed_d0_polygons {
        out.push_str(&format!(
            "  d0={d0}: {}\n",
            poly.iter()
                .map(|v| format!("({},{})", v[0], v[1]))
                .collect::<Vec<_>>()
                .join(" ")
        ));
    }
    out
}

fn case_name(case: CaseId) -> &'static str {
    match case {
        CaseId::Case1 => "case 1",
        CaseId::Case2 => "case 2",
    }
}

pub fn scheme_table(synthesis: &Synthesis) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "target    : ({}, {}, {})\n",
        synthesis.target[0], synthesis.target[1], synthesis.target[2]
    ));
    if synthesis.is_time_shared() {
        out.push_str(&format!(
            "time-share: {} components\n",
            synthesis.components.len()
        ));
    }
    for (idx, (w, alloc)) in synthesis.components.iter().enumerate() {
        let l = &alloc.layout;
        out.push_str(&format!(
            "component {idx} (weight {w:.6}): {} at ({}, {}, {})\n",
            case_name(l.case_id),
            l.d_target[0],
            l.d_target[1],
            l.d_target[2]
        ));
        out.push_str(&format!(
            "  N_E' = {}   dims: A={} B={} C={}   coordinates: A=[{}..{}) B=[{}..{}) C=[{}..{})\n",
            l.n_e_prime,
            l.dims_a,
            l.dims_b,
            l.dims_c,
            l.range_a.start,
            l.range_a.end,
            l.range_b.start,
            l.range_b.end,
            l.range_c.start,
            l.range_c.end
        ));
        match l.b_split {
            BSplit::Case1 { b1, b0, b2 } => {
                out.push_str(&format!("  B split: b1={b1} b0={b0} b2={b2}\n"));
            }
            BSplit::Case2 { to_private, kept } => {
                out.push_str(&format!(
                    "  common split: {to_private} coordinates to the private codebook, {kept} kept in B\n"
                ));
            }
        }
        out.push_str(&format!(
            "  rates (bits/use): R0={:.6} R1={:.6} R2={:.6} RE={:.6}  (R={:.6})\n",
            alloc.rates.r0,
            alloc.rates.r1,
            alloc.rates.r2,
            alloc.rates.re,
            alloc.rate_per_channel
        ));
        out.push_str(&format!(
            "  power: signal={:.6} artificial-noise={:.6}\n",
            alloc.signal_power, alloc.noise_power_total
        ));
    }
    out.push_str("decodability margins (bits/use):\n");
    for (w, report) in check_synthesis_decodability(synthesis) {
        for m in &report.margins {
            out.push_str(&format!(
                "  [w={w:.3}] {:>5} @ rx{}: capacity {:.6}  rate {:.6}  margin {:+.6}\n",
                m.message, m.receiver, m.capacity_bits, m.rate_bits, m.margin_bits
            ));
        }
    }
    out
}

pub fn sweep_table(report: &SweepReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "target : ({}, {}, {})   trials={}  worst eavesdropper trial={}\n",
        report.target[0], report.target[1], report.target[2], report.eve_trials,
        report.worst_eve_trial
    ));
    out.push_str(&format!(
        "{:>14} {:>12} {:>12} {:>12} {:>12} {:>12}\n",
        "p_bar", "R0", "R1", "R2", "RE", "leakage"
    ));
    for (i, &p) in report.snr_points.iter().enumerate() {
        out.push_str(&format!(
            "{:>14.6e} {:>12.4} {:>12.4} {:>12.4} {:>12.4} {:>12.4}\n",
            p,
            report.rates.r0[i],
            report.rates.r1[i],
            report.rates.r2[i],
            report.rates.re[i],
            report.leakage.get(i).copied().unwrap_or(0.0)
        ));
    }
    out.push_str(&format!(
        "fitted pre-logs: d0={:.4} d1={:.4} d2={:.4} re={:.4} leakage={:.4}\n",
        report.fitted.d0, report.fitted.d1, report.fitted.d2, report.fitted.re,
        report.fitted.leakage
    ));
    out
}

/// Sweep CSV with reproducibility metadata in comment lines.
pub fn sweep_csv(
    report: &SweepReport,
    input_hash: &str,
    seed: u64,
    tolerances: &ToleranceSet,
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# input_hash: {input_hash}\n"));
    out.push_str(&format!("# seed: {seed}\n"));
    out.push_str(&format!(
        "# target: {},{},{}\n",
        report.target[0], report.target[1], report.target[2]
    ));
    out.push_str(&format!(
        "# tolerances: prelog={} leakage_prelog={}\n",
        tolerances.prelog, tolerances.leakage_prelog
    ));
    out.push_str(&sdof_core::analysis::sweep_to_csv(report));
    out
}

pub fn converse_table(report: &ConverseReport) -> String {
    let cuts = ["user 1", "user 2", "sum"];
    let mut out = String::new();
    out.push_str(&format!(
        "{:>8} {:>8} {:>14} {:>12} {:>8}\n",
        "cut", "bound", "residual rank", "fitted", "basis?"
    ));
    for (i, cut) in cuts.iter().enumerate() {
        out.push_str(&format!(
            "{:>8} {:>8} {:>14} {:>12.4} {:>8}\n",
            cut,
            report.bounds[i],
            report.residual_ranks[i],
            report.fitted[i],
            if report.from_reduced_basis[i] { "yes" } else { "no" }
        ));
    }
    out
}

pub fn certificate_table(cert: &Certificate) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "target : ({}, {}, {})   mode: {}\n",
        cert.target[0],
        cert.target[1],
        cert.target[2],
        match cert.mode {
            RegionMode::NoPrivacy => "no mutual privacy",
            RegionMode::MutualPrivacy => "mutual privacy",
        }
    ));
    for c in &cert.checks {
        out.push_str(&format!(
            "  [{}] {:<32} {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        ));
    }
    out.push_str(&format!(
        "secrecy accounting: total {:.4} - leakage {:.4} = {:.4}\n",
        cert.total_entropy_prelog, cert.leakage_prelog_budget, cert.secrecy_prelog
    ));
    out.push_str(&format!(
        "certificate: {}\n",
        if cert.passed { "PASS" } else { "FAIL" }
    ));
    out
}
