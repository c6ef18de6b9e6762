//! Command-line front end: channel ingestion, subcommand dispatch, and
//! table/JSON/CSV emission for regions, schemes, sweeps, converse bounds and
//! certificates.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};

use sdof_core::analysis::{
    certify, converse_prelog_with_tol, run_sweep_with_tol, AnalysisError, CertifyOptions,
    Tolerances,
};
use sdof_core::channel::{
    generate_random_channel, reduce_to_parallel_with_tol, ChannelError, ChannelSpec,
};
use sdof_core::matrix::MatrixError;
use sdof_core::region::{region_no_privacy, region_with_privacy, RegionExport, RegionMode};
use sdof_core::scheme::{check_synthesis_decodability, synthesize, SchemeError};

use output::{
    certificate_table, converse_table, envelope, gsvd_table, region_table, scheme_table,
    sweep_csv, sweep_table, table_header, GsvdExport, ToleranceSet,
};

/// Adversary samples drawn by sweeps and certificates.
const EVE_TRIALS: usize = 100;

#[derive(Parser)]
#[command(
    name = "sdof",
    version,
    about = "Secrecy degrees of freedom analysis for two-receiver MIMO broadcast wiretap channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Factor the channel pair and report the private/common subspace structure
    Gsvd(CommonOpts),
    /// Print the s.d.o.f. region facets, vertices and fixed-d0 slice polygons
    Region(CommonOpts),
    /// Synthesize a dimension allocation (possibly time-shared) for a target
    Scheme(CommonOpts),
    /// Evaluate per-message rate and leakage curves over an SNR sweep
    Sweep(CommonOpts),
    /// Certify achievability, leakage and converse pre-logs for a target
    Certify(CommonOpts),
    /// Report the three converse cut bounds and their fitted log-det slopes
    Converse(CommonOpts),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gsvd(_) => "gsvd",
            Command::Region(_) => "region",
            Command::Scheme(_) => "scheme",
            Command::Sweep(_) => "sweep",
            Command::Certify(_) => "certify",
            Command::Converse(_) => "converse",
        }
    }

    fn opts(&self) -> &CommonOpts {
        match self {
            Command::Gsvd(o)
            | Command::Region(o)
            | Command::Scheme(o)
            | Command::Sweep(o)
            | Command::Certify(o)
            | Command::Converse(o) => o,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Channel JSON file (see the schema in the README)
    #[arg(long, conflicts_with = "random")]
    input: Option<PathBuf>,

    /// Generate a random channel with dims NTxNR1xNR2 from --seed
    #[arg(long, value_name = "NTxNR1xNR2")]
    random: Option<String>,

    /// Eavesdropper antenna budget (used with --random; overrides the
    /// file's value when given)
    #[arg(long)]
    ne: Option<usize>,

    /// Total average power budget, linear scale (overrides the file's value)
    #[arg(long)]
    pbar: Option<f64>,

    /// Impose the mutual-privacy constraint
    #[arg(long)]
    privacy: bool,

    /// Target triple d0,d1,d2 (scheme, sweep and certify)
    #[arg(long, value_name = "d0,d1,d2")]
    target: Option<String>,

    /// Smallest sweep budget
    #[arg(long, default_value_t = 1e4)]
    snr_min: f64,

    /// Largest sweep budget
    #[arg(long, default_value_t = 1e12)]
    snr_max: f64,

    /// Number of log-spaced sweep points
    #[arg(long, default_value_t = 9)]
    snr_points: usize,

    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,

    /// Output path (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,

    /// Seed for random channel generation and adversary sampling
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Absolute singular-value threshold for rank decisions
    #[arg(long)]
    tol_rank: Option<f64>,

    /// Absolute tolerance for pre-log slope matches
    #[arg(long, default_value_t = sdof_core::TOL_PRELOG)]
    tol_prelog: f64,
}

/// Process failure with its exit code and machine-readable kind.
#[derive(Debug)]
struct CliError {
    code: u8,
    kind: &'static str,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            kind: "input",
            message: message.into(),
        }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        CliError {
            code: 3,
            kind: "infeasible_target",
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        CliError {
            code: 4,
            kind: "numerical_failure",
            message: message.into(),
        }
    }
}

impl From<ChannelError> for CliError {
    fn from(e: ChannelError) -> Self {
        match e {
            ChannelError::Schema(_)
            | ChannelError::Dimension { .. }
            | ChannelError::NonPositivePower(_) => CliError::input(e.to_string()),
            ChannelError::ZeroRank => CliError::numeric(e.to_string()),
            ChannelError::Matrix(m) => m.into(),
        }
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        match e {
            MatrixError::Empty { .. }
            | MatrixError::DimensionMismatch { .. }
            | MatrixError::NonFinite { .. } => CliError::input(e.to_string()),
            _ => CliError::numeric(e.to_string()),
        }
    }
}

impl From<SchemeError> for CliError {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::TargetOutsideRegion { .. }
            | SchemeError::NotDecomposable { .. }
            | SchemeError::NonIntegerTarget { .. }
            | SchemeError::RegimeUnsupported { .. }
            | SchemeError::NeedsTimeShare => CliError::infeasible(e.to_string()),
            SchemeError::PowerBudgetTooSmall { .. } | SchemeError::NonPositivePower(_) => {
                CliError::input(e.to_string())
            }
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Channel(c) => c.into(),
            AnalysisError::Matrix(m) => m.into(),
            AnalysisError::Scheme(s) => s.into(),
            AnalysisError::BadGrid(_)
            | AnalysisError::NonIncreasingGrid
            | AnalysisError::InsufficientPoints { .. } => CliError::input(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let obj = serde_json::json!({
                "error": { "code": e.code, "kind": e.kind, "message": e.message }
            });
            eprintln!("{obj}");
            ExitCode::from(e.code)
        }
    }
}

fn parse_dims(text: &str) -> Result<(usize, usize, usize), CliError> {
    let parts: Vec<&str> = text.split(['x', 'X']).collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "--random expects NTxNR1xNR2, got `{text}`"
        )));
    }
    let mut dims = [0usize; 3];
    for (i, p) in parts.iter().enumerate() {
        dims[i] = p
            .parse()
            .map_err(|_| CliError::input(format!("bad dimension `{p}` in --random")))?;
    }
    Ok((dims[0], dims[1], dims[2]))
}

fn parse_target(opts: &CommonOpts) -> Result<[f64; 3], CliError> {
    let text = opts
        .target
        .as_ref()
        .ok_or_else(|| CliError::input("this subcommand requires --target d0,d1,d2"))?;
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(CliError::input(format!(
            "--target expects d0,d1,d2, got `{text}`"
        )));
    }
    let mut out = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        out[i] = p
            .trim()
            .parse()
            .map_err(|_| CliError::input(format!("bad target component `{p}`")))?;
        if !out[i].is_finite() || out[i] < 0.0 {
            return Err(CliError::input(format!(
                "target components must be finite and nonnegative, got `{p}`"
            )));
        }
    }
    Ok(out)
}

/// Loads or generates the channel; returns the spec, accumulated warnings,
/// and the canonical input hash.
fn load_channel(opts: &CommonOpts) -> Result<(ChannelSpec, Vec<String>, String), CliError> {
    let mut warnings = Vec::new();
    let spec = if let Some(path) = &opts.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        let (mut spec, schema_warnings) = ChannelSpec::from_json_str(&text)?;
        warnings.extend(schema_warnings);
        if opts.ne.is_some() || opts.pbar.is_some() {
            spec = ChannelSpec::new(
                opts.ne.unwrap_or(spec.n_e),
                opts.pbar.unwrap_or(spec.p_bar),
                spec.h1,
                spec.h2,
            )?;
        }
        spec
    } else if let Some(dims) = &opts.random {
        let (n_t, n_r1, n_r2) = parse_dims(dims)?;
        generate_random_channel(
            n_t,
            n_r1,
            n_r2,
            opts.ne.unwrap_or(1),
            opts.pbar.unwrap_or(100.0),
            opts.seed,
        )?
    } else {
        return Err(CliError::input(
            "exactly one input source is required: --input <file> or --random NTxNR1xNR2",
        ));
    };
    warnings.extend(spec.regime_warnings());
    let canonical = spec.to_canonical_json();
    let hash = format!("sha256:{:x}", Sha256::digest(canonical.as_bytes()));
    Ok((spec, warnings, hash))
}

fn snr_grid(opts: &CommonOpts) -> Result<Vec<f64>, CliError> {
    let finite = opts.snr_min.is_finite() && opts.snr_max.is_finite();
    if !finite || opts.snr_min <= 0.0 || opts.snr_max <= opts.snr_min || opts.snr_points < 2 {
        return Err(CliError::input(
            "need 0 < snr-min < snr-max and at least 2 points",
        ));
    }
    let n = opts.snr_points;
    let (lo, hi) = (opts.snr_min.log10(), opts.snr_max.log10());
    Ok((0..n)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (n - 1) as f64))
        .collect())
}

fn mode_of(opts: &CommonOpts) -> RegionMode {
    if opts.privacy {
        RegionMode::MutualPrivacy
    } else {
        RegionMode::NoPrivacy
    }
}

fn write_output(opts: &CommonOpts, text: &str) -> Result<(), CliError> {
    match &opts.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: &Command) -> Result<(), CliError> {
    let opts = command.opts();
    let (spec, warnings, hash) = load_channel(opts)?;
    let tolerances = ToleranceSet::new(opts.tol_rank, opts.tol_prelog);
    let name = command.name();

    if opts.format == Format::Csv && !matches!(command, Command::Sweep(_)) {
        return Err(CliError::input("csv output is only defined for `sweep`"));
    }

    let render = |result: serde_json::Value, table: String| -> String {
        match opts.format {
            Format::Json => envelope(name, &hash, opts.seed, &tolerances, &warnings, result),
            _ => {
                let mut text = table_header(name, &hash, opts.seed, &tolerances, &warnings);
                text.push_str(&table);
                text
            }
        }
    };

    match command {
        Command::Gsvd(_) => {
            let pc = reduce_to_parallel_with_tol(&spec, opts.tol_rank)?;
            let residuals = {
                let (a, b) = pc.factors.reconstruction_residual(&spec.h1, &spec.h2);
                [a, b]
            };
            let export = GsvdExport::new(&pc.factors, &pc, residuals);
            let text = render(
                serde_json::to_value(&export).expect("serializable"),
                gsvd_table(&pc, residuals),
            );
            write_output(opts, &text)
        }
        Command::Region(_) => {
            let profile = sdof_core::channel::rank_profile_with_tol(&spec, opts.tol_rank)?;
            let region = match mode_of(opts) {
                RegionMode::NoPrivacy => region_no_privacy(profile, spec.n_e),
                RegionMode::MutualPrivacy => region_with_privacy(profile, spec.n_e),
            };
            let export = RegionExport::build(&region);
            let text = render(
                serde_json::to_value(&export).expect("serializable"),
                region_table(&export),
            );
            write_output(opts, &text)
        }
        Command::Scheme(_) => {
            let target = parse_target(opts)?;
            let pc = reduce_to_parallel_with_tol(&spec, opts.tol_rank)?;
            let synthesis = synthesize(&pc, spec.n_e, target, mode_of(opts))?;
            let decodability = check_synthesis_decodability(&synthesis);
            let result = serde_json::json!({
                "synthesis": synthesis,
                "decodability": decodability
                    .iter()
                    .map(|(w, r)| serde_json::json!({ "weight": w, "report": r }))
                    .collect::<Vec<_>>(),
            });
            let text = render(result, scheme_table(&synthesis));
            write_output(opts, &text)
        }
        Command::Sweep(_) => {
            let target = parse_target(opts)?;
            let grid = snr_grid(opts)?;
            let report = run_sweep_with_tol(
                &spec,
                target,
                mode_of(opts),
                &grid,
                EVE_TRIALS,
                opts.seed,
                opts.tol_rank,
            )?;
            let text = match opts.format {
                Format::Csv => sweep_csv(&report, &hash, opts.seed, &tolerances),
                _ => render(
                    serde_json::to_value(&report).expect("serializable"),
                    sweep_table(&report),
                ),
            };
            write_output(opts, &text)
        }
        Command::Certify(_) => {
            let target = parse_target(opts)?;
            let grid = snr_grid(opts)?;
            let cert = certify(
                &spec,
                target,
                mode_of(opts),
                &CertifyOptions {
                    grid,
                    trials: EVE_TRIALS,
                    seed: opts.seed,
                    tolerances: Tolerances {
                        prelog: opts.tol_prelog,
                        leakage_prelog: sdof_core::TOL_PRELOG_LEAKAGE,
                    },
                    rank_tol: opts.tol_rank,
                },
            )?;
            let text = render(
                serde_json::to_value(&cert).expect("serializable"),
                certificate_table(&cert),
            );
            write_output(opts, &text)?;
            if cert.passed {
                Ok(())
            } else {
                let failed: Vec<&str> = cert
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name)
                    .collect();
                Err(CliError::numeric(format!(
                    "certificate failed checks: {}",
                    failed.join(", ")
                )))
            }
        }
        Command::Converse(_) => {
            let grid = snr_grid(opts)?;
            let report = converse_prelog_with_tol(&spec, &grid, opts.tol_rank)?;
            let text = render(
                serde_json::to_value(&report).expect("serializable"),
                converse_table(&report),
            );
            write_output(opts, &text)
        }
    }
}
