//! Subcommands behind the `povm` binary.
//!
//! Every command reads a JSON config, computes a report and writes it under
//! the output directory. Reports carry the toolkit version and a SHA-256 of
//! the effective config, and are byte-identical across runs.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Error;
use crate::interval_sets::CircleSet;
use crate::linalg::{format_real, HermitianOperator, StateVector};
use crate::line_povm::{
    nonuniqueness_witness, nonuniqueness_witness_for, variance_additivity_check, DensityKind,
    DensityProfile, LineGrid, NonuniquenessWitness, SmearedPositionPovm, VarianceAdditivity,
};
use crate::moments::{moment_coefficient, moment_operator, recover_gram};
use crate::phase_povm::{GeneratorSpec, Indexing, PhasePovm};
use crate::quadrature::moment_coefficient_by_quadrature;
use crate::spectral::{
    idempotence_defect, spectral_measure, support_compare, variance_report_with, SupportComparison,
    VarianceReport,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Tolerances a report must meet for the command to exit successfully.
pub const ROUND_TRIP_TOL: f64 = 1e-12;
pub const COVARIANCE_TOL: f64 = 1e-12;
pub const VARIANCE_RESIDUAL_TOL: f64 = 1e-9;
pub const MEAN_AGREEMENT_TOL: f64 = 1e-10;
pub const ORACLE_TOL: f64 = 1e-11;
pub const LINE_MOMENT_TOL: f64 = 1e-8;
pub const WITNESS_GAP: f64 = 0.1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// The computation ran but a certified property failed.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invariant(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::NotFirstMoment(_) | Error::NoConvergence { .. } | Error::BoundaryMass { .. } => {
                CliError::Invariant(e.to_string())
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Flags shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    pub format: Format,
}

fn read_config<T: DeserializeOwned + Default>(path: Option<&Path>) -> CliResult<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
        }
    }
}

fn require_config<T: DeserializeOwned>(path: Option<&Path>, command: &str) -> CliResult<T> {
    let p = path.ok_or_else(|| CliError::Config(format!("{command} needs --config")))?;
    let text = fs::read_to_string(p).map_err(|source| CliError::Io {
        path: p.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))
}

/// SHA-256 of the compact JSON form of the effective config.
pub fn config_hash<T: Serialize>(config: &T) -> String {
    let bytes = serde_json::to_vec(config).expect("config serializes");
    Sha256::digest(&bytes)
        .iter()
        .fold(String::new(), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

#[derive(Serialize)]
struct Envelope<'a, C, R> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config_hash: String,
    config: &'a C,
    result: &'a R,
}

fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn write_json<C: Serialize, R: Serialize>(
    opts: &Options,
    command: &str,
    name: &str,
    config: &C,
    result: &R,
) -> CliResult<PathBuf> {
    let env = Envelope {
        tool: "povm",
        version: VERSION,
        command,
        config_hash: config_hash(config),
        config,
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("report serializes");
    text.push('\n');
    write_file(&opts.out, name, &text)
}

fn csv_header(config_hash: &str) -> String {
    format!("# povm {VERSION} config {config_hash}\n")
}

fn default_sets() -> Vec<CircleSet> {
    [(0.0, PI), (0.5 * PI, 1.5 * PI), (0.0, PI / 3.0), (1.0, 4.0)]
        .iter()
        .map(|&(a, b)| CircleSet::interval(a, b).expect("valid default set"))
        .collect()
}

fn default_shifts() -> Vec<f64> {
    vec![0.5 * PI, 1.0, PI]
}

// ---------------------------------------------------------------- build

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildConfig {
    pub generator: GeneratorSpec,
    pub indexing: Indexing,
    #[serde(default = "default_sets")]
    pub sets: Vec<CircleSet>,
    /// Builds once per dimension instead of at `indexing`'s own; ℕ indexing only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuildEntry {
    pub dim: usize,
    pub set: CircleSet,
    pub value: HermitianOperator,
}

/// `F(X)` for every configured set.
pub fn build(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let mut config: BuildConfig = require_config(opts.config.as_deref(), "build")?;
    if opts.dims.is_some() {
        config.dims = opts.dims.clone();
    }
    let indexings = match (&config.dims, config.indexing) {
        (Some(dims), Indexing::Nat { .. }) => {
            dims.iter().map(|&dim| Indexing::Nat { dim }).collect()
        }
        (Some(_), Indexing::Int { .. }) => {
            return Err(CliError::Config("dims applies to nat indexing only".into()))
        }
        (None, ix) => vec![ix],
    };
    let mut entries = Vec::new();
    for ix in indexings {
        let povm = PhasePovm::from_spec(&config.generator, ix)?;
        for set in &config.sets {
            entries.push(BuildEntry {
                dim: ix.dim(),
                set: set.clone(),
                value: povm.value(set),
            });
        }
    }
    match opts.format {
        Format::Json => Ok(vec![write_json(
            opts,
            "build",
            "build.json",
            &config,
            &entries,
        )?]),
        Format::Csv => {
            let hash = config_hash(&config);
            let mut paths = Vec::new();
            for (i, e) in entries.iter().enumerate() {
                let body = format!("{}{}", csv_header(&hash), e.value.matrix().to_csv());
                paths.push(write_file(
                    &opts.out,
                    &format!("fx_d{}_{i}.csv", e.dim),
                    &body,
                )?);
            }
            Ok(paths)
        }
    }
}

// ---------------------------------------------------------------- dilemma-report

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DilemmaConfig {
    pub generator: GeneratorSpec,
    pub indexing: Indexing,
    #[serde(default = "default_sets")]
    pub sets: Vec<CircleSet>,
    #[serde(default = "default_shifts")]
    pub shifts: Vec<f64>,
    /// Random states drawn from `seed`, in addition to the basis state `|0>`.
    #[serde(default = "default_state_count")]
    pub random_states: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_state_count() -> usize {
    4
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CovarianceWitness {
    pub set_index: usize,
    pub shift: f64,
    pub defect: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DilemmaReport {
    pub dim: usize,
    pub first_moment: HermitianOperator,
    pub round_trip_residual: f64,
    pub support: SupportComparison,
    pub povm_covariance_defect: f64,
    pub spectral_covariance_defect: f64,
    /// `(set, shift)` maximizing the spectral-measure defect.
    pub spectral_covariance_witness: CovarianceWitness,
    pub povm_commutator_norm: f64,
    pub spectral_commutator_norm: f64,
    pub spectral_multiplicativity_defect: f64,
    pub variance: Vec<VarianceReport>,
}

impl DilemmaReport {
    /// Properties every covariant POVM must satisfy; failures are scientific, not configuration.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.round_trip_residual > ROUND_TRIP_TOL {
            out.push(format!(
                "round-trip residual {:e}",
                self.round_trip_residual
            ));
        }
        if self.povm_covariance_defect > COVARIANCE_TOL {
            out.push(format!(
                "POVM covariance defect {:e}",
                self.povm_covariance_defect
            ));
        }
        for (i, v) in self.variance.iter().enumerate() {
            if v.residual().abs() > VARIANCE_RESIDUAL_TOL {
                out.push(format!("state {i}: variance residual {:e}", v.residual()));
            }
            if (v.mean - v.mean_spectral).abs() > MEAN_AGREEMENT_TOL {
                out.push(format!(
                    "state {i}: means differ by {:e}",
                    v.mean - v.mean_spectral
                ));
            }
        }
        out
    }
}

pub fn dilemma_report(config: &DilemmaConfig) -> CliResult<DilemmaReport> {
    if config.sets.is_empty() || config.shifts.is_empty() {
        return Err(CliError::Config("sets and shifts must be nonempty".into()));
    }
    let povm = PhasePovm::from_spec(&config.generator, config.indexing)?;
    let ix = povm.indexing();
    let f1 = moment_operator(&povm, 1);
    let recovered = recover_gram(&f1, ix)?;
    let round_trip_residual = recovered
        .matrix()
        .sub(povm.gram().matrix())?
        .matrix()
        .max_abs_entry();
    let spectral = spectral_measure(&f1)?;

    let mut povm_cov: f64 = 0.0;
    let mut witness = CovarianceWitness {
        set_index: 0,
        shift: config.shifts[0],
        defect: -1.0,
    };
    for (i, set) in config.sets.iter().enumerate() {
        for &x in &config.shifts {
            povm_cov = povm_cov.max(povm.covariance_defect(set, x)?);
            let d = spectral.covariance_defect(ix, set, x)?;
            if d > witness.defect {
                witness = CovarianceWitness {
                    set_index: i,
                    shift: x,
                    defect: d,
                };
            }
        }
    }

    let mut povm_comm: f64 = 0.0;
    let mut spec_comm: f64 = 0.0;
    let mut mult: f64 = 0.0;
    for (i, x) in config.sets.iter().enumerate() {
        for y in &config.sets[i + 1..] {
            povm_comm = povm_comm.max(povm.commutator_norm(x, y)?);
            let (ex, ey) = (
                spectral.value(&x.to_real_set()),
                spectral.value(&y.to_real_set()),
            );
            spec_comm = spec_comm.max(ex.matrix().commutator(ey.matrix())?.spectral_norm()?);
            mult = mult.max(spectral.multiplicativity_defect(&x.to_real_set(), &y.to_real_set())?);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut states = vec![StateVector::basis(ix.dim(), 0)?];
    for _ in 0..config.random_states {
        states.push(StateVector::random(ix.dim(), &mut rng)?);
    }
    let variance = states
        .iter()
        .map(|phi| variance_report_with(&povm, &spectral, phi))
        .collect::<crate::error::Result<_>>()?;

    Ok(DilemmaReport {
        dim: ix.dim(),
        support: support_compare(&povm)?,
        first_moment: f1,
        round_trip_residual,
        povm_covariance_defect: povm_cov,
        spectral_covariance_defect: witness.defect,
        spectral_covariance_witness: witness,
        povm_commutator_norm: povm_comm,
        spectral_commutator_norm: spec_comm,
        spectral_multiplicativity_defect: mult,
        variance,
    })
}

pub fn cmd_dilemma_report(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let mut config: DilemmaConfig = require_config(opts.config.as_deref(), "dilemma-report")?;
    if let Some(seed) = opts.seed {
        config.seed = seed;
    }
    let report = dilemma_report(&config)?;
    let path = write_json(
        opts,
        "dilemma-report",
        "dilemma_report.json",
        &config,
        &report,
    )?;
    let bad = report.violations();
    if !bad.is_empty() {
        return Err(CliError::Invariant(bad.join("; ")));
    }
    Ok(vec![path])
}

// ---------------------------------------------------------------- convergence

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConvergenceConfig {
    /// Dimensions of the ℕ-indexed canonical sweep, ascending.
    pub dims: Vec<usize>,
    /// Half widths `L` of the ℤ-indexed canonical sweep, ascending.
    pub half_widths: Vec<usize>,
    pub window: usize,
    pub set: CircleSet,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            dims: vec![8, 16, 32, 64],
            half_widths: vec![8, 16, 32],
            window: 5,
            set: CircleSet::interval(0.0, PI).expect("valid set"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub indexing: &'static str,
    pub dim: usize,
    pub min_eig: f64,
    pub max_eig: f64,
    /// Central-window defect for ℤ, full-window defect for ℕ.
    pub idempotence_defect: f64,
    pub window: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Spectrum of `F[1]` strictly widens along the ℕ sweep.
    pub nat_spectrum_widening: bool,
    /// Central-window defect strictly decreases along the ℤ sweep.
    pub int_defect_decreasing: bool,
    pub nat_min_full_window_defect: f64,
}

fn strictly<T: Copy>(xs: &[T], ok: impl Fn(T, T) -> bool) -> bool {
    xs.windows(2).all(|w| ok(w[0], w[1]))
}

pub fn convergence(config: &ConvergenceConfig) -> CliResult<ConvergenceReport> {
    if !strictly(&config.dims, |a, b| a < b) || !strictly(&config.half_widths, |a, b| a < b) {
        return Err(CliError::Config(
            "dims and half widths must be strictly ascending".into(),
        ));
    }
    let mut rows = Vec::new();
    let sweep = config
        .dims
        .iter()
        .map(|&dim| (Indexing::Nat { dim }, "nat"))
        .chain(
            config
                .half_widths
                .iter()
                .map(|&half_width| (Indexing::Int { half_width }, "int")),
        );
    for (ix, label) in sweep {
        let povm = PhasePovm::from_spec(&GeneratorSpec::Constant, ix)?;
        let support = support_compare(&povm)?;
        let window = if label == "nat" {
            ix.dim()
        } else {
            config.window
        };
        if window > ix.dim() {
            return Err(Error::WindowTooLarge {
                window,
                dim: ix.dim(),
            }
            .into());
        }
        rows.push(ConvergenceRow {
            indexing: label,
            dim: ix.dim(),
            min_eig: support.spectrum_interval.0,
            max_eig: support.spectrum_interval.1,
            idempotence_defect: idempotence_defect(&povm, &config.set, window)?,
            window,
        });
    }
    let nat: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.indexing == "nat").collect();
    let int: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.indexing == "int").collect();
    Ok(ConvergenceReport {
        nat_spectrum_widening: strictly(&nat, |a, b| {
            b.min_eig < a.min_eig && b.max_eig > a.max_eig && b.min_eig > 0.0 && b.max_eig < TAU
        }),
        int_defect_decreasing: strictly(&int, |a, b| b.idempotence_defect < a.idempotence_defect),
        nat_min_full_window_defect: nat
            .iter()
            .map(|r| r.idempotence_defect)
            .fold(f64::INFINITY, f64::min),
        rows,
    })
}

impl ConvergenceReport {
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = csv_header(config_hash);
        out.push_str("indexing,dim,min_eig,max_eig,idempotence_defect,window\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.indexing,
                r.dim,
                format_real(r.min_eig),
                format_real(r.max_eig),
                format_real(r.idempotence_defect),
                r.window
            );
        }
        out
    }
}

pub fn cmd_convergence(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let mut config: ConvergenceConfig = read_config(opts.config.as_deref())?;
    if let Some(dims) = &opts.dims {
        config.dims = dims.clone();
    }
    let report = convergence(&config)?;
    let path = match opts.format {
        Format::Json => write_json(opts, "convergence", "convergence.json", &config, &report)?,
        Format::Csv => write_file(
            &opts.out,
            "convergence.csv",
            &report.to_csv(&config_hash(&config)),
        )?,
    };
    if config.dims.len() > 1 && !report.nat_spectrum_widening {
        return Err(CliError::Invariant(
            "nat spectrum does not widen monotonically".into(),
        ));
    }
    if config.half_widths.len() > 1 && !report.int_defect_decreasing {
        return Err(CliError::Invariant(
            "int idempotence defect does not decrease".into(),
        ));
    }
    Ok(vec![path])
}

// ---------------------------------------------------------------- line

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PacketSpec {
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LineConfig {
    pub grid: LineGrid,
    pub densities: Vec<DensityKind>,
    pub state: PacketSpec,
    /// Pair of densities for the nonuniqueness witness; uniform widths 1 and 2 when absent.
    pub witness: Option<[DensityKind; 2]>,
}

impl Default for LineConfig {
    fn default() -> Self {
        Self {
            grid: LineGrid {
                n_points: 2001,
                spacing: 0.01,
            },
            densities: vec![
                DensityKind::Delta { center: 0.0 },
                DensityKind::Uniform {
                    half_width: 1.0,
                    center: 0.0,
                },
                DensityKind::Gaussian {
                    sigma: 0.5,
                    center: 0.0,
                },
            ],
            state: PacketSpec {
                center: 0.0,
                width: 0.5,
            },
            witness: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityReport {
    pub density: DensityKind,
    pub mean: f64,
    pub variance: f64,
    pub interior_points: usize,
    /// `max |F1_jj - (q_j - mean)|` over interior points.
    pub first_moment_error: f64,
    pub additivity: VarianceAdditivity,
}

#[derive(Debug, Clone, Serialize)]
pub struct LineReport {
    pub densities: Vec<DensityReport>,
    pub witness: NonuniquenessWitness,
}

impl LineReport {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, d) in self.densities.iter().enumerate() {
            if d.first_moment_error > LINE_MOMENT_TOL {
                out.push(format!(
                    "density {i}: first moment error {:e}",
                    d.first_moment_error
                ));
            }
            if !d.additivity.holds() {
                out.push(format!(
                    "density {i}: variance residual {:e}",
                    d.additivity.residual
                ));
            }
        }
        if self.witness.moment_gap > LINE_MOMENT_TOL || self.witness.measure_gap <= WITNESS_GAP {
            out.push(format!(
                "witness gaps: moment {:e}, measure {}",
                self.witness.moment_gap, self.witness.measure_gap
            ));
        }
        out
    }
}

pub fn line(config: &LineConfig) -> CliResult<LineReport> {
    let grid = LineGrid::new(config.grid.n_points, config.grid.spacing)?;
    let phi = grid.gaussian_state(config.state.center, config.state.width)?;
    let points = grid.points();
    let mut densities = Vec::new();
    for kind in &config.densities {
        let profile = DensityProfile::new(grid, kind.clone())?;
        let povm = SmearedPositionPovm::new(profile);
        let mean = povm.density().mean();
        let m = povm.first_moment();
        let interior = povm.interior_points();
        let first_moment_error = interior
            .iter()
            .map(|&j| (m.entries()[j] - (points[j] - mean)).abs())
            .fold(0.0, f64::max);
        densities.push(DensityReport {
            density: povm.density().kind().clone(),
            mean,
            variance: povm.density().variance(),
            interior_points: interior.len(),
            first_moment_error,
            additivity: variance_additivity_check(&povm, &phi)?,
        });
    }
    let witness = match &config.witness {
        None => nonuniqueness_witness(&grid)?,
        Some([a, b]) => nonuniqueness_witness_for(
            DensityProfile::new(grid, a.clone())?,
            DensityProfile::new(grid, b.clone())?,
        )?,
    };
    Ok(LineReport { densities, witness })
}

pub fn cmd_line(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let config: LineConfig = read_config(opts.config.as_deref())?;
    let report = line(&config)?;
    let path = write_json(opts, "line", "line_report.json", &config, &report)?;
    let bad = report.violations();
    if !bad.is_empty() {
        return Err(CliError::Invariant(bad.join("; ")));
    }
    Ok(vec![path])
}

// ---------------------------------------------------------------- oracle-check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleConfig {
    pub max_k: u32,
    pub max_d: i64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_k: 6,
            max_d: 64,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct OracleRow {
    pub k: u32,
    pub d: i64,
    pub closed: [f64; 2],
    pub quadrature: [f64; 2],
    pub abs_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub max_abs_error: f64,
    pub worst: (u32, i64),
    pub rows: Vec<OracleRow>,
}

pub fn oracle_check(config: &OracleConfig) -> CliResult<OracleReport> {
    if config.max_d < 0 {
        return Err(CliError::Config("max_d must be nonnegative".into()));
    }
    let mut rows = Vec::new();
    for k in 0..=config.max_k {
        for d in -config.max_d..=config.max_d {
            let c = moment_coefficient(k, d);
            let q = moment_coefficient_by_quadrature(k, d);
            rows.push(OracleRow {
                k,
                d,
                closed: [c.re, c.im],
                quadrature: [q.re, q.im],
                abs_error: (c - q).norm(),
            });
        }
    }
    let worst = rows.iter().fold(
        &rows[0],
        |w, r| if r.abs_error > w.abs_error { r } else { w },
    );
    Ok(OracleReport {
        max_abs_error: worst.abs_error,
        worst: (worst.k, worst.d),
        rows,
    })
}

impl OracleReport {
    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut out = csv_header(config_hash);
        out.push_str("k,d,closed_re,closed_im,quad_re,quad_im,abs_error\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.k,
                r.d,
                format_real(r.closed[0]),
                format_real(r.closed[1]),
                format_real(r.quadrature[0]),
                format_real(r.quadrature[1]),
                format_real(r.abs_error)
            );
        }
        out
    }
}

pub fn cmd_oracle_check(opts: &Options) -> CliResult<Vec<PathBuf>> {
    let config: OracleConfig = read_config(opts.config.as_deref())?;
    let report = oracle_check(&config)?;
    let path = match opts.format {
        Format::Json => write_json(opts, "oracle-check", "oracle_check.json", &config, &report)?,
        Format::Csv => write_file(
            &opts.out,
            "oracle_check.csv",
            &report.to_csv(&config_hash(&config)),
        )?,
    };
    if report.max_abs_error > ORACLE_TOL {
        return Err(CliError::Invariant(format!(
            "oracle error {:e} at k={}, d={}",
            report.max_abs_error, report.worst.0, report.worst.1
        )));
    }
    Ok(vec![path])
}
