//! Config-driven execution shared by the command-line front end.
//!
//! A [`RunConfig`] names one of four commands — `bounds`, `verify`, `scan`,
//! `check-identities` — plus the window, lattice and numeric knobs they need.
//! [`run`] resolves defaults, executes, writes the artifact (a file when an
//! output path is set, standard output otherwise; nothing else is ever
//! printed on that stream), and reports a [`RunStatus`]:
//!
//! - `Success` (0): the run completed and every requested check passed;
//! - `CheckFailed` (1): the run completed but a verification or identity
//!   check did not hold;
//! - `InvalidConfig` (2): the configuration could not be parsed or violates
//!   a precondition of the requested method;
//! - `NonConvergence` (3): the numerics did not settle; partial artifacts
//!   are still written with `converged = false` where that makes sense.
//!
//! Identical configs produce byte-identical artifacts: all grids and
//! enumeration orders are deterministic, and parallel reductions are
//! order-independent, so the output does not depend on the thread count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Error;
use crate::frame_bounds::{
    frame_bounds_gram, frame_bounds_janssen, scan_lattices, verify_no_frame, FrameBoundsResult,
    ScanNumerics, ScanRow, ShapeGrid, write_scan_csv, DEFAULT_GRID_RES, DEFAULT_SECTION_RADIUS,
};
use crate::lattice::{Lattice, PhaseSpacePoint};
use crate::phase_space::{ambiguity, wigner, wigner_via_ambiguity};
use crate::summation::{
    symplectic_poisson_check, vanishing_sum_check, DEFAULT_TAIL_TARGET,
};
use crate::windows::Window;
use crate::Result;

/// Covolume used when a lattice preset is requested without `volume`.
pub const DEFAULT_COVOLUME: f64 = 0.5;

/// What to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Bounds,
    Verify,
    Scan,
    CheckIdentities,
}

/// Window selection: `hermite:N`, `gaussian`, or `sampled:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WindowSpec {
    Hermite(usize),
    Gaussian,
    Sampled(PathBuf),
}

impl FromStr for WindowSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "gaussian" {
            return Ok(Self::Gaussian);
        }
        if let Some(rest) = s.strip_prefix("hermite:") {
            let n = rest.parse::<usize>().map_err(|_| {
                Error::InvalidConfig(format!("bad hermite order {rest:?} in window spec"))
            })?;
            return Ok(Self::Hermite(n));
        }
        if let Some(rest) = s.strip_prefix("sampled:") {
            if rest.is_empty() {
                return Err(Error::InvalidConfig("empty path in sampled window spec".into()));
            }
            return Ok(Self::Sampled(PathBuf::from(rest)));
        }
        Err(Error::InvalidConfig(format!(
            "unknown window spec {s:?} (expected hermite:N, gaussian or sampled:PATH)"
        )))
    }
}

/// Lattice selection: `square`, `hexagonal`, or `matrix:PATH`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeSpec {
    Square,
    Hexagonal,
    Matrix(PathBuf),
}

impl FromStr for LatticeSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Self::Square),
            "hexagonal" => Ok(Self::Hexagonal),
            _ => {
                if let Some(rest) = s.strip_prefix("matrix:") {
                    if rest.is_empty() {
                        return Err(Error::InvalidConfig(
                            "empty path in matrix lattice spec".into(),
                        ));
                    }
                    Ok(Self::Matrix(PathBuf::from(rest)))
                } else {
                    Err(Error::InvalidConfig(format!(
                        "unknown lattice spec {s:?} (expected square, hexagonal or matrix:PATH)"
                    )))
                }
            }
        }
    }
}

/// Bound-computation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodSpec {
    Janssen,
    Gram,
    Both,
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "janssen" => Ok(Self::Janssen),
            "gram" => Ok(Self::Gram),
            "both" => Ok(Self::Both),
            _ => Err(Error::InvalidConfig(format!(
                "unknown method {s:?} (expected janssen, gram or both)"
            ))),
        }
    }
}

/// Artifact format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormatSpec {
    Json,
    Csv,
}

impl FromStr for FormatSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            _ => Err(Error::InvalidConfig(format!(
                "unknown format {s:?} (expected json or csv)"
            ))),
        }
    }
}

/// One resolved run: the command plus every knob, each `None` until set by a
/// flag or the config file.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub window: Option<WindowSpec>,
    pub lattice: Option<LatticeSpec>,
    pub volume: Option<f64>,
    pub grid_res: Option<usize>,
    pub tail: Option<f64>,
    pub section_radius: Option<f64>,
    pub method: Option<MethodSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<FormatSpec>,
    /// `check-identities` only: relaxed tolerances on smaller fixtures.
    pub quick: Option<bool>,
    /// Key-value file supplying any knob not set by a flag (flags win).
    pub config_file: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        Self {
            command,
            window: None,
            lattice: None,
            volume: None,
            grid_res: None,
            tail: None,
            section_radius: None,
            method: None,
            out: None,
            format: None,
            quick: None,
            config_file: None,
        }
    }
}

/// Exit-status contract of [`run`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Success,
    CheckFailed,
    InvalidConfig,
    NonConvergence,
}

impl RunStatus {
    /// The process exit code this status maps to.
    pub fn code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::CheckFailed => 1,
            Self::InvalidConfig => 2,
            Self::NonConvergence => 3,
        }
    }
}

/// Status plus a one-line human summary (for the log stream, never the
/// artifact stream).
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub status: RunStatus,
    pub message: String,
}

/// Executes a config end to end; never panics on bad input, always maps
/// errors onto the exit-status contract.
pub fn run(config: &RunConfig) -> RunOutcome {
    match execute(config) {
        Ok(outcome) => outcome,
        Err(e) => RunOutcome { status: status_for(&e), message: e.to_string() },
    }
}

/// Which exit status an error belongs to: configuration and input problems
/// are `InvalidConfig`; numeric trouble during an otherwise valid run is
/// `NonConvergence`.
fn status_for(e: &Error) -> RunStatus {
    match e {
        Error::DimensionMismatch(_)
        | Error::SingularMatrix(_)
        | Error::InvalidSamples(_)
        | Error::HermiteOrderCap { .. }
        | Error::UnsupportedDimension(_)
        | Error::WindowPrecondition(_)
        | Error::LatticePrecondition(_)
        | Error::NonIntegerRedundancy { .. }
        | Error::AlternatingPhaseUnsupported(_)
        | Error::SectionTooSmall { .. }
        | Error::InvalidConfig(_)
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => RunStatus::InvalidConfig,
        Error::NonFinite(_)
        | Error::PointCapExceeded { .. }
        | Error::QuadratureNonConvergence(_)
        | Error::TailNotReached { .. }
        | Error::InsufficientDecay { .. }
        | Error::GridTooCoarse { .. }
        | Error::SeriesInvariant(_)
        | Error::Eigen(_)
        | Error::BoundsNotConverged { .. } => RunStatus::NonConvergence,
    }
}

fn execute(config: &RunConfig) -> Result<RunOutcome> {
    let mut resolved = config.clone();
    if let Some(path) = &config.config_file {
        apply_config_file(&mut resolved, path)?;
    }
    match resolved.command {
        CommandKind::Bounds => run_bounds(&resolved),
        CommandKind::Verify => run_verify(&resolved),
        CommandKind::Scan => run_scan(&resolved),
        CommandKind::CheckIdentities => run_check_identities(&resolved),
    }
}

/// Merges a `key = value` file into the config; only fields not already set
/// by flags are filled, so flags win on conflict.  `#` starts a comment.
pub fn apply_config_file(config: &mut RunConfig, path: &Path) -> Result<()> {
    let text = fs::read_to_string(path)?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!(
                "{}:{}: expected key = value, got {raw:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_f64 = |what: &str| -> Result<f64> {
            value.parse::<f64>().map_err(|_| {
                Error::InvalidConfig(format!("bad {what} value {value:?} in config file"))
            })
        };
        match key {
            "window" => fill(&mut config.window, value.parse()?),
            "lattice" => fill(&mut config.lattice, value.parse()?),
            "volume" => fill(&mut config.volume, parse_f64("volume")?),
            "grid-res" => {
                let res = value.parse::<usize>().map_err(|_| {
                    Error::InvalidConfig(format!("bad grid-res value {value:?} in config file"))
                })?;
                fill(&mut config.grid_res, res);
            }
            "tail" => fill(&mut config.tail, parse_f64("tail")?),
            "section-radius" => fill(&mut config.section_radius, parse_f64("section-radius")?),
            "method" => fill(&mut config.method, value.parse()?),
            "out" => fill(&mut config.out, PathBuf::from(value)),
            "format" => fill(&mut config.format, value.parse()?),
            "quick" => {
                let flag = value.parse::<bool>().map_err(|_| {
                    Error::InvalidConfig(format!("bad quick value {value:?} in config file"))
                })?;
                fill(&mut config.quick, flag);
            }
            _ => {
                return Err(Error::InvalidConfig(format!(
                    "unknown config key {key:?} (known: window, lattice, volume, grid-res, tail, section-radius, method, out, format, quick)"
                )))
            }
        }
    }
    Ok(())
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

fn build_window(config: &RunConfig) -> Result<Window> {
    let spec = config
        .window
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("a window spec is required (--window)".into()))?;
    match spec {
        WindowSpec::Hermite(n) => Window::hermite(&[*n]),
        WindowSpec::Gaussian => Window::gaussian(1),
        WindowSpec::Sampled(path) => Window::sampled_from_csv(path),
    }
}

fn build_lattice(config: &RunConfig) -> Result<Lattice> {
    let spec = config
        .lattice
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("a lattice spec is required (--lattice)".into()))?;
    match spec {
        LatticeSpec::Square => Lattice::square(config.volume.unwrap_or(DEFAULT_COVOLUME)),
        LatticeSpec::Hexagonal => Lattice::hexagonal(config.volume.unwrap_or(DEFAULT_COVOLUME)),
        LatticeSpec::Matrix(path) => {
            if config.volume.is_some() {
                return Err(Error::InvalidConfig(
                    "volume cannot be combined with an explicit matrix lattice; scale the matrix instead".into(),
                ));
            }
            read_matrix_lattice(path)
        }
    }
}

/// Reads a generator matrix: one whitespace-separated row per line, `2d`
/// rows of `2d` entries.
fn read_matrix_lattice(path: &Path) -> Result<Lattice> {
    let text = fs::read_to_string(path)?;
    let mut rows = Vec::new();
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>().map_err(|_| {
                    Error::InvalidConfig(format!(
                        "bad matrix entry {tok:?} in {}",
                        path.display()
                    ))
                })
            })
            .collect::<Result<_>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "no matrix rows found in {}",
            path.display()
        )));
    }
    Lattice::from_rows(&rows)
}

/// Writes the artifact payload to the output path, or to standard output
/// when none is set.
fn write_artifact(out: &Option<PathBuf>, payload: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, payload)?,
        None => std::io::stdout().write_all(payload.as_bytes())?,
    }
    Ok(())
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}

fn bounds_csv(results: &[FrameBoundsResult]) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["method", "A", "B", "converged", "grid_res", "truncation_radius"])?;
    for r in results {
        writer.write_record([
            r.method.clone(),
            format!("{}", r.lower_a),
            format!("{}", r.upper_b),
            format!("{}", r.converged),
            format!("{}", r.grid_res),
            format!("{}", r.truncation_radius),
        ])?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::InvalidConfig(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(e.to_string()))
}

fn run_bounds(config: &RunConfig) -> Result<RunOutcome> {
    let window = build_window(config)?;
    let lattice = build_lattice(config)?;
    let grid_res = config.grid_res.unwrap_or(DEFAULT_GRID_RES);
    let tail = config.tail.unwrap_or(DEFAULT_TAIL_TARGET);
    let radius = config.section_radius.unwrap_or(DEFAULT_SECTION_RADIUS);
    let method = config.method.unwrap_or(MethodSpec::Janssen);

    let mut results = Vec::new();
    if matches!(method, MethodSpec::Janssen | MethodSpec::Both) {
        results.push(frame_bounds_janssen(&window, &lattice, grid_res, tail)?);
    }
    if matches!(method, MethodSpec::Gram | MethodSpec::Both) {
        results.push(frame_bounds_gram(&window, &lattice, radius)?);
    }

    let payload = match config.format.unwrap_or(FormatSpec::Json) {
        FormatSpec::Json => {
            if results.len() == 1 {
                json_line(&results[0])?
            } else {
                json_line(&results)?
            }
        }
        FormatSpec::Csv => bounds_csv(&results)?,
    };
    write_artifact(&config.out, &payload)?;

    if results.iter().all(|r| r.converged) {
        let summary = results
            .iter()
            .map(|r| format!("{}: A = {:.6}, B = {:.6}", r.method, r.lower_a, r.upper_b))
            .collect::<Vec<_>>()
            .join("; ");
        Ok(RunOutcome { status: RunStatus::Success, message: summary })
    } else {
        Ok(RunOutcome {
            status: RunStatus::NonConvergence,
            message: "bounds did not converge; artifact written with converged = false".into(),
        })
    }
}

fn run_verify(config: &RunConfig) -> Result<RunOutcome> {
    if config.format == Some(FormatSpec::Csv) {
        return Err(Error::InvalidConfig("verify reports serialize to JSON only".into()));
    }
    let window = build_window(config)?;
    let lattice = build_lattice(config)?;
    let grid_res = config.grid_res.unwrap_or(DEFAULT_GRID_RES);
    let tail = config.tail.unwrap_or(DEFAULT_TAIL_TARGET);
    let report = verify_no_frame(&window, &lattice, grid_res, tail)?;
    write_artifact(&config.out, &json_line(&report)?)?;

    let status = if report.passed() {
        RunStatus::Success
    } else if report.converged == Some(false) {
        RunStatus::NonConvergence
    } else {
        RunStatus::CheckFailed
    };
    Ok(RunOutcome { status, message: report.conclusion })
}

/// Scan row with non-finite bounds mapped to `null` for JSON output.
#[derive(Serialize)]
struct ScanRowJson {
    s: f64,
    tau: f64,
    h: f64,
    #[serde(rename = "A")]
    lower_a: Option<f64>,
    #[serde(rename = "B")]
    upper_b: Option<f64>,
    converged: bool,
}

impl From<&ScanRow> for ScanRowJson {
    fn from(row: &ScanRow) -> Self {
        Self {
            s: row.s,
            tau: row.tau,
            h: row.h,
            lower_a: row.lower_a.is_finite().then_some(row.lower_a),
            upper_b: row.upper_b.is_finite().then_some(row.upper_b),
            converged: row.converged,
        }
    }
}

fn run_scan(config: &RunConfig) -> Result<RunOutcome> {
    let window = build_window(config)?;
    if config.lattice.is_some() {
        return Err(Error::InvalidConfig(
            "scan sweeps lattice shapes itself; drop the lattice spec".into(),
        ));
    }
    let volume = config.volume.unwrap_or(DEFAULT_COVOLUME);
    if !(volume.is_finite() && volume > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "covolume must be positive and finite, got {volume}"
        )));
    }
    let numerics = ScanNumerics {
        grid_res: config.grid_res.unwrap_or(DEFAULT_GRID_RES),
        target_tail: config.tail.unwrap_or(DEFAULT_TAIL_TARGET),
        section_radius: config.section_radius.unwrap_or(DEFAULT_SECTION_RADIUS),
    };
    let shape = ShapeGrid::default();
    let rows = scan_lattices(&window, 1.0 / volume, &shape, &numerics)?;

    let payload = match config.format.unwrap_or(FormatSpec::Csv) {
        FormatSpec::Csv => {
            let mut bytes = Vec::new();
            write_scan_csv(&rows, &mut bytes)?;
            String::from_utf8(bytes).map_err(|e| Error::InvalidConfig(e.to_string()))?
        }
        FormatSpec::Json => {
            let mapped: Vec<ScanRowJson> = rows.iter().map(ScanRowJson::from).collect();
            json_line(&mapped)?
        }
    };
    write_artifact(&config.out, &payload)?;

    let failed = rows.iter().filter(|r| !r.converged).count();
    if failed == 0 {
        Ok(RunOutcome {
            status: RunStatus::Success,
            message: format!("{} lattice cells scanned", rows.len()),
        })
    } else {
        Ok(RunOutcome {
            status: RunStatus::NonConvergence,
            message: format!(
                "{failed} of {} lattice cells did not converge (rows flagged in the artifact)",
                rows.len()
            ),
        })
    }
}

// ---------------------------------------------------------------------------
// Identity suite
// ---------------------------------------------------------------------------

/// One named identity check: a residual measured against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityCheck {
    fn new(name: &str, residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            residual,
            tolerance,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }
}

/// Artifact of `check-identities`.
#[derive(Debug, Clone, Serialize)]
pub struct IdentitySummary {
    pub quick: bool,
    pub checks: Vec<IdentityCheck>,
    pub passed: bool,
}

fn run_check_identities(config: &RunConfig) -> Result<RunOutcome> {
    if config.format == Some(FormatSpec::Csv) {
        return Err(Error::InvalidConfig(
            "identity summaries serialize to JSON only".into(),
        ));
    }
    let quick = config.quick.unwrap_or(false);
    let tail = config.tail.unwrap_or(DEFAULT_TAIL_TARGET);
    let summary = run_identity_suite(quick, tail)?;
    write_artifact(&config.out, &json_line(&summary)?)?;
    let failed: Vec<&str> = summary
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name.as_str())
        .collect();
    if summary.passed {
        Ok(RunOutcome {
            status: RunStatus::Success,
            message: format!("{} identity checks passed", summary.checks.len()),
        })
    } else {
        Ok(RunOutcome {
            status: RunStatus::CheckFailed,
            message: format!("identity checks failed: {}", failed.join(", ")),
        })
    }
}

/// Runs the self-verification suite: transform identities and vanishing
/// sums evaluated through independent numerical routes, each reduced to a
/// single residual.
///
/// `quick` shrinks the fixtures and relaxes tolerances for a fast smoke
/// pass; the full suite is the one the acceptance checks rely on.
pub fn run_identity_suite(quick: bool, tail: f64) -> Result<IdentitySummary> {
    let mut checks = Vec::new();
    checks.push(poisson_identity_check(quick, tail)?);
    checks.push(algebraic_relation_check(quick)?);
    checks.push(symplectic_ft_check(quick)?);
    checks.push(eigenfunction_sign_check(quick)?);
    checks.push(vanishing_sum_identity_check(quick, tail)?);
    let passed = checks.iter().all(|c| c.passed);
    Ok(IdentitySummary { quick, checks, passed })
}

/// Fixed non-preset lattices used by the identity fixtures.
fn fixture_lattices(quick: bool) -> Result<Vec<Lattice>> {
    let mut lattices = vec![Lattice::square(1.0)?, Lattice::square(0.5)?];
    if !quick {
        lattices.push(Lattice::hexagonal(0.5)?);
        lattices.push(Lattice::from_rows(&[vec![1.25, 0.0], vec![0.0, 0.8]])?);
        lattices.push(Lattice::from_rows(&[vec![0.9, 0.3], vec![0.0, 1.1]])?);
    }
    Ok(lattices)
}

/// Poisson summation in its phase-space form: the ambiguity function summed
/// over a lattice must match the Wigner distribution summed over the
/// adjoint lattice (scaled by the covolume) — two independent quadrature
/// routes on both sides.
fn poisson_identity_check(quick: bool, tail: f64) -> Result<IdentityCheck> {
    let g = Window::gaussian(1)?;
    let mut residual = 0.0f64;
    for lattice in fixture_lattices(quick)? {
        let check = symplectic_poisson_check(
            &lattice,
            |p| ambiguity(&g, &g, p),
            |p| wigner(&g, &g, p),
            tail,
        )?;
        residual = residual.max(check.residual);
    }
    Ok(IdentityCheck::new("poisson_gaussian", residual, if quick { 1e-8 } else { 1e-9 }))
}

/// The dilation relation between the Wigner and ambiguity pictures,
/// checked pointwise: the direct Wigner quadrature against the reflected
/// ambiguity route at doubled arguments.
fn algebraic_relation_check(quick: bool) -> Result<IdentityCheck> {
    let f = Window::hermite(&[2])?;
    let g = Window::hermite(&[1])?;
    let n = if quick { 3 } else { 5 };
    let mut points = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
            let w = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            points.push(PhaseSpacePoint::new_1d(x, w));
        }
    }
    points.push(PhaseSpacePoint::new_1d(1.0 / std::f64::consts::SQRT_2, 1.0 / std::f64::consts::PI));
    let residuals: Vec<Result<f64>> = points
        .par_iter()
        .map(|p| {
            let direct = wigner(&f, &g, p)?;
            let routed = wigner_via_ambiguity(&f, &g, p)?;
            Ok((direct - routed).norm())
        })
        .collect();
    let mut residual = 0.0f64;
    for r in residuals {
        residual = residual.max(r?);
    }
    Ok(IdentityCheck::new("wigner_ambiguity_dilation", residual, 1e-8))
}

/// A phase-space function sampled on a square grid, for discrete
/// symplectic Fourier transforms.
struct SampledPlane {
    step: f64,
    half: i64,
    /// Row-major over `(i, j)`, value at `(i·step, j·step)` for
    /// `i, j ∈ [-half, half]`.
    values: Vec<Complex64>,
}

impl SampledPlane {
    fn fill<F>(radius: f64, step: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<Complex64> + Sync,
    {
        let half = (radius / step).round() as i64;
        let n = (2 * half + 1) as usize;
        let rows: Vec<Result<Vec<Complex64>>> = (-half..=half)
            .into_par_iter()
            .map(|i| {
                let mut row = Vec::with_capacity(n);
                for j in -half..=half {
                    row.push(eval(i as f64 * step, j as f64 * step)?);
                }
                Ok(row)
            })
            .collect();
        let mut values = Vec::with_capacity(n * n);
        for row in rows {
            values.extend(row?);
        }
        Ok(Self { step, half, values })
    }

    /// `∫ F(z') e^{2πi σ(z, z')} dz'` by the trapezoid-on-a-decaying-tail
    /// rule: plain Riemann summation is spectrally accurate here because
    /// the integrand decays like a Gaussian inside the sampled box.
    fn symplectic_ft(&self, zx: f64, zw: f64) -> Complex64 {
        let n = (2 * self.half + 1) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut idx = 0;
        for i in -self.half..=self.half {
            let x = i as f64 * self.step;
            for j in -self.half..=self.half {
                let w = j as f64 * self.step;
                let phase = 2.0 * std::f64::consts::PI * (zx * w - zw * x);
                acc += self.values[idx] * Complex64::new(0.0, phase).exp();
                idx += 1;
            }
        }
        debug_assert_eq!(idx, n * n);
        acc * (self.step * self.step)
    }
}

/// The symplectic Fourier transform carries the ambiguity picture to the
/// Wigner picture: `F_σ(A_g f) = W_g f`, checked on a target grid with the
/// transform realised as a discrete sum over a sampled plane.
fn symplectic_ft_check(quick: bool) -> Result<IdentityCheck> {
    let f = Window::hermite(&[1])?;
    let g = Window::hermite(&[1])?;
    let (radius, step, targets) = if quick { (7.0, 0.25, 9) } else { (8.0, 0.125, 41) };
    let plane = SampledPlane::fill(radius, step, |x, w| {
        ambiguity(&f, &g, &PhaseSpacePoint::new_1d(x, w))
    })?;
    let span = 2.0;
    let residuals: Vec<Result<f64>> = (0..targets * targets)
        .into_par_iter()
        .map(|flat| {
            let i = flat / targets;
            let j = flat % targets;
            let zx = -span + 2.0 * span * i as f64 / (targets - 1) as f64;
            let zw = -span + 2.0 * span * j as f64 / (targets - 1) as f64;
            let lhs = plane.symplectic_ft(zx, zw);
            let rhs = wigner(&f, &g, &PhaseSpacePoint::new_1d(zx, zw))?;
            Ok((lhs - rhs).norm())
        })
        .collect();
    let mut residual = 0.0f64;
    for r in residuals {
        residual = residual.max(r?);
    }
    Ok(IdentityCheck::new(
        "symplectic_fourier_transform",
        residual,
        if quick { 1e-4 } else { 1e-6 },
    ))
}

/// The `√2`-dilated self-ambiguity function is an eigenfunction of the
/// symplectic Fourier transform with eigenvalue `+1` for even windows and
/// `-1` for odd ones.
fn eigenfunction_sign_check(quick: bool) -> Result<IdentityCheck> {
    let windows: Vec<(Window, f64)> = if quick {
        vec![(Window::gaussian(1)?, 1.0), (Window::hermite(&[1])?, -1.0)]
    } else {
        vec![
            (Window::gaussian(1)?, 1.0),
            (Window::hermite(&[1])?, -1.0),
            (Window::hermite(&[2])?, 1.0),
            (Window::hermite(&[3])?, -1.0),
        ]
    };
    let (radius, step) = if quick { (5.0, 0.25) } else { (6.0, 0.125) };
    let scale = std::f64::consts::SQRT_2;
    let mut residual = 0.0f64;
    for (g, sign) in &windows {
        let plane = SampledPlane::fill(radius, step, |x, w| {
            ambiguity(g, g, &PhaseSpacePoint::new_1d(scale * x, scale * w))
        })?;
        let targets = 5;
        let span = 1.5;
        let residuals: Vec<Result<f64>> = (0..targets * targets)
            .into_par_iter()
            .map(|flat| {
                let i = flat / targets;
                let j = flat % targets;
                let zx = -span + 2.0 * span * i as f64 / (targets - 1) as f64;
                let zw = -span + 2.0 * span * j as f64 / (targets - 1) as f64;
                let lhs = plane.symplectic_ft(zx, zw);
                let rhs = ambiguity(g, g, &PhaseSpacePoint::new_1d(scale * zx, scale * zw))?;
                Ok((lhs - rhs * *sign).norm())
            })
            .collect();
        for r in residuals {
            residual = residual.max(r?);
        }
    }
    Ok(IdentityCheck::new(
        "symplectic_fourier_eigenfunction_signs",
        residual,
        if quick { 1e-5 } else { 1e-6 },
    ))
}

/// For an odd analysis window on a symplectic lattice of covolume `2^{-d}`,
/// the lattice sum of the cross-Wigner transform and the adjoint-lattice
/// sum of the cross-ambiguity function both vanish identically.
fn vanishing_sum_identity_check(quick: bool, tail: f64) -> Result<IdentityCheck> {
    let gaussian = Window::gaussian(1)?;
    let h1 = Window::hermite(&[1])?;
    let h2 = Window::hermite(&[2])?;
    let h3 = Window::hermite(&[3])?;
    let square = Lattice::square(0.5)?;
    let hexagonal = Lattice::hexagonal(0.5)?;
    let sheared = Lattice::from_rows(&[vec![0.9, 0.2], vec![0.0, 0.5 / 0.9]])?;

    let mut combos: Vec<(&Window, &Window, &Lattice)> = vec![
        (&gaussian, &h1, &square),
        (&gaussian, &h1, &hexagonal),
        (&h2, &h1, &square),
    ];
    if !quick {
        combos.extend([
            (&h2, &h1, &hexagonal),
            (&gaussian, &h3, &square),
            (&h2, &h3, &hexagonal),
            (&h1, &h1, &square),
            (&h3, &h3, &hexagonal),
            (&gaussian, &h1, &sheared),
            (&h2, &h3, &sheared),
        ]);
    }
    let mut residual = 0.0f64;
    for (f, g, lattice) in combos {
        let sums = vanishing_sum_check(f, g, lattice, tail)?;
        residual = residual
            .max(sums.wigner_sum.value.norm())
            .max(sums.ambiguity_sum.value.norm());
    }
    Ok(IdentityCheck::new("vanishing_lattice_sums", residual, 1e-7))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::TempDir;

    #[test]
    fn window_specs_parse_and_reject() {
        assert_eq!("gaussian".parse::<WindowSpec>().unwrap(), WindowSpec::Gaussian);
        assert_eq!("hermite:3".parse::<WindowSpec>().unwrap(), WindowSpec::Hermite(3));
        assert_eq!(
            "sampled:data/w.csv".parse::<WindowSpec>().unwrap(),
            WindowSpec::Sampled(PathBuf::from("data/w.csv"))
        );
        assert!("hermite:x".parse::<WindowSpec>().is_err());
        assert!("triangle".parse::<WindowSpec>().is_err());
    }

    #[test]
    fn lattice_specs_parse_and_reject() {
        assert_eq!("square".parse::<LatticeSpec>().unwrap(), LatticeSpec::Square);
        assert_eq!("hexagonal".parse::<LatticeSpec>().unwrap(), LatticeSpec::Hexagonal);
        assert_eq!(
            "matrix:m.txt".parse::<LatticeSpec>().unwrap(),
            LatticeSpec::Matrix(PathBuf::from("m.txt"))
        );
        assert!("rect".parse::<LatticeSpec>().is_err());
        assert!("matrix:".parse::<LatticeSpec>().is_err());
    }

    #[test]
    fn config_file_fills_only_unset_fields() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(
            &path,
            "# a comment\nwindow = hermite:2\nvolume = 0.25\nmethod = gram\n",
        )
        .unwrap();
        let mut config = RunConfig::new(CommandKind::Bounds);
        config.volume = Some(0.5); // flag wins
        apply_config_file(&mut config, &path).unwrap();
        assert_eq!(config.window, Some(WindowSpec::Hermite(2)));
        assert_eq!(config.volume, Some(0.5));
        assert_eq!(config.method, Some(MethodSpec::Gram));
    }

    #[test]
    fn config_file_rejects_unknown_keys() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("run.conf");
        fs::write(&path, "wndow = hermite:2\n").unwrap();
        let mut config = RunConfig::new(CommandKind::Bounds);
        let err = apply_config_file(&mut config, &path).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    #[test]
    fn matrix_lattice_file_round_trips() {
        let dir = TempDir::new().unwrap();
        let path = dir.path().join("gen.txt");
        fs::write(&path, "# generator rows\n0.9 0.2\n0.0 0.5555555555555556\n").unwrap();
        let lattice = read_matrix_lattice(&path).unwrap();
        assert!((lattice.volume() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounds_run_writes_deterministic_json() {
        let dir = TempDir::new().unwrap();
        let out = dir.path().join("bounds.json");
        let mut config = RunConfig::new(CommandKind::Bounds);
        config.window = Some(WindowSpec::Gaussian);
        config.lattice = Some(LatticeSpec::Square);
        config.volume = Some(0.5);
        config.out = Some(out.clone());
        let first = run(&config);
        assert_eq!(first.status, RunStatus::Success, "{}", first.message);
        let first_bytes = fs::read(&out).unwrap();
        let second = run(&config);
        assert_eq!(second.status, RunStatus::Success);
        assert_eq!(first_bytes, fs::read(&out).unwrap());
        let parsed: serde_json::Value = serde_json::from_slice(&first_bytes).unwrap();
        assert_eq!(parsed["method"], "janssen_series");
        assert!(parsed["A"].as_f64().unwrap() > 1.0);
    }

    #[test]
    fn missing_window_is_invalid_config() {
        let mut config = RunConfig::new(CommandKind::Bounds);
        config.lattice = Some(LatticeSpec::Square);
        let outcome = run(&config);
        assert_eq!(outcome.status, RunStatus::InvalidConfig);
    }

    #[test]
    fn odd_redundancy_on_the_series_route_is_invalid_config() {
        let mut config = RunConfig::new(CommandKind::Bounds);
        config.window = Some(WindowSpec::Gaussian);
        config.lattice = Some(LatticeSpec::Square);
        config.volume = Some(1.0);
        let outcome = run(&config);
        assert_eq!(outcome.status, RunStatus::InvalidConfig);
        // The finite-section route accepts the same lattice.
        config.method = Some(MethodSpec::Gram);
        config.out = None;
        let dir = TempDir::new().unwrap();
        config.out = Some(dir.path().join("gram.json"));
        let outcome = run(&config);
        assert_eq!(outcome.status, RunStatus::Success, "{}", outcome.message);
    }

    #[test]
    fn quick_identity_suite_passes() {
        let summary = run_identity_suite(true, 1e-10).unwrap();
        assert!(summary.quick);
        assert_eq!(summary.checks.len(), 5);
        for check in &summary.checks {
            assert!(
                check.passed,
                "{} residual {} above {}",
                check.name, check.residual, check.tolerance
            );
        }
    }
}
