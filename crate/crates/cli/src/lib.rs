//! The `prolate` command line: basis caching, Born data synthesis and
//! ingestion, reconstruction, extrapolation, validation and the stability
//! experiment.

pub mod cache;
pub mod experiment;

use cache::{cache_dir, load_or_compute, CacheKey, Outcome};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use prolate_core::analysis::{extrapolate, extrapolate_with, validate_basis, BasisRef};
use prolate_core::disk::{default_truncation, DiskBasis, ScaledDiskBasis};
use prolate_core::forward::{
    add_noise, add_noise_absolute, ingest_farfield, synthesize_born, DataGrid, IngestOptions,
};
use prolate_core::geometry::{build_polar_quadrature, build_quadrature, Geometry, Shape};
use prolate_core::io::{self, CachedBasis, ResultFile};
use prolate_core::numerics::QuadratureRule;
use prolate_core::recon::{
    choose_alpha_partial, reconstruct_full, reconstruct_partial, NormalizedSymSet, ReconOptions,
    ReconstructionResult,
};
use prolate_core::setup::{ProblemSetup, Regime, SetupConfig};
use prolate_core::symset::compute_symset_basis;
use prolate_core::{Point, Result};
use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(
    name = "prolate",
    version,
    about = "Prolate bases and spectral-cutoff inverse scattering"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a basis, or load it from the cache.
    Basis {
        #[command(subcommand)]
        kind: BasisCommand,
    },
    /// Born data for a setup file.
    Synthesize(SynthesizeArgs),
    /// Resample far-field measurements onto the data domain.
    Ingest(IngestArgs),
    /// Spectral-cutoff reconstruction.
    Reconstruct(ReconstructArgs),
    /// Band-limited extension of data on the data disk.
    Extrapolate(ExtrapolateArgs),
    /// Numerical health report for a cached basis.
    Validate(ValidateArgs),
    /// Error-versus-bound sweep over noise levels and cutoffs.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Subcommand)]
pub enum BasisCommand {
    Disk(DiskArgs),
    Symset(SymsetArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleKind {
    /// Polar Gauss rule.
    Polar,
    /// Midpoint grid.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryKind {
    Disk,
    #[value(name = "L")]
    L,
    #[value(name = "M")]
    M,
}

#[derive(Debug, Args)]
pub struct DiskArgs {
    #[arg(long)]
    pub c: f64,
    #[arg(long, default_value_t = 8)]
    pub m_max: usize,
    #[arg(long, default_value_t = 8)]
    pub n_max: usize,
    /// Galerkin truncation; defaults to 2 n_max + ceil(c) + 10.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Cache directory.
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SymsetArgs {
    /// Take geometry, scale and bandwidth from a setup file.
    #[arg(long, conflicts_with_all = ["geometry", "c"])]
    pub setup: Option<PathBuf>,
    #[arg(long, value_enum, required_unless_present = "setup")]
    pub geometry: Option<GeometryKind>,
    #[arg(long, required_unless_present = "setup")]
    pub c: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Unit vector `x,y`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub x_star: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1.0)]
    pub h: f64,
    #[arg(long, value_enum, default_value_t = RuleKind::Polar)]
    pub rule: RuleKind,
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    #[arg(long, default_value_t = 40)]
    pub modes: usize,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    pub setup: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Noise level, relative to the data norm unless --noise-abs is given.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long, requires = "noise")]
    pub noise_abs: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = RuleKind::Polar)]
    pub rule: RuleKind,
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// CSV with columns xhat_x,xhat_y,theta_x,theta_y,k,re,im.
    pub input: PathBuf,
    /// Setup file fixing the regime; its contrast is ignored.
    #[arg(long)]
    pub setup: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = RuleKind::Polar)]
    pub rule: RuleKind,
    #[arg(long, default_value_t = 200)]
    pub resolution: usize,
    /// Largest distance to a sample before a node counts as missing.
    #[arg(long)]
    pub cutoff: Option<f64>,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("cutoff").required(true).args(["alpha", "auto_alpha"]))]
pub struct ReconstructArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub basis: PathBuf,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// A-priori cutoff c0 (delta/E)^(1/(1+sigma)) for partial-data bases.
    #[arg(long, num_args = 4, value_names = ["DELTA", "E", "SIGMA", "C0"], allow_negative_numbers = true)]
    pub auto_alpha: Option<Vec<f64>>,
    /// Result JSON.
    #[arg(short, long)]
    pub out: PathBuf,
    /// Field CSV `x,y,q` on a grid over the data domain.
    #[arg(long)]
    pub field: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    pub field_grid: usize,
    /// Drop the imaginary part of the reconstruction.
    #[arg(long)]
    pub realify: bool,
}

#[derive(Debug, Args)]
pub struct ExtrapolateArgs {
    pub data: PathBuf,
    #[arg(long)]
    pub basis: PathBuf,
    /// CSV with header `x,y`.
    #[arg(long)]
    pub targets: PathBuf,
    /// Keep only modes with |mu| > alpha; noise grows like 1/|mu| off the disk.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    pub basis: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub setup: PathBuf,
    /// Absolute noise levels.
    #[arg(long, value_delimiter = ',', required = true)]
    pub deltas: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of consecutive seeds starting at --seed.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value_t = 16)]
    pub m_max: usize,
    #[arg(long, default_value_t = 16)]
    pub n_max: usize,
    #[arg(long, default_value_t = 240)]
    pub resolution: usize,
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] prolate_core::Error),
    #[error("{0}")]
    Checks(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use prolate_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Checks(_) => 1,
            CliError::Core(e) => match e {
                E::Parameter(_)
                | E::Containment(_)
                | E::NodeMismatch(_)
                | E::Format(_)
                | E::Json(_)
                | E::Io(_) => 2,
                E::NoConvergence { .. }
                | E::EmptyQuadrature
                | E::EmptyCutoff { .. }
                | E::InsufficientCoverage { .. } => 1,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Parses `args` (program name first) and runs the command; returns the exit
/// code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Basis {
            kind: BasisCommand::Disk(a),
        } => basis_disk(a),
        Command::Basis {
            kind: BasisCommand::Symset(a),
        } => basis_symset(a),
        Command::Synthesize(a) => synthesize(a),
        Command::Ingest(a) => ingest(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Extrapolate(a) => extrapolate_cmd(a),
        Command::Validate(a) => validate(a),
        Command::Experiment(a) => experiment_cmd(a),
    }
}

fn report_cache(path: &Path, outcome: &Outcome) {
    match outcome {
        Outcome::Loaded => eprintln!("loaded cached basis"),
        Outcome::Computed => eprintln!("computed basis"),
        Outcome::Replaced(why) => eprintln!("cached basis rejected ({why}); recomputed"),
    }
    println!("{}", path.display());
}

fn basis_disk(a: DiskArgs) -> CliResult<()> {
    let truncation = a
        .truncation
        .unwrap_or_else(|| default_truncation(a.c, a.n_max));
    let key = CacheKey::new("disk", a.c)
        .param("m_max", a.m_max as f64)
        .param("n_max", a.n_max as f64)
        .truncation(truncation);
    let dir = cache_dir(a.out.as_deref());
    let (path, basis, outcome) = load_or_compute(&dir, &key, || {
        DiskBasis::compute_with_truncation(a.c, a.m_max, a.n_max, truncation).map(CachedBasis::Disk)
    })?;
    if let CachedBasis::Disk(b) = &basis {
        let usable = b.modes.iter().filter(|m| m.usable).count();
        eprintln!("{} modes, {} resolved", b.modes.len(), usable);
    }
    report_cache(&path, &outcome);
    Ok(())
}

fn build_rule(kind: RuleKind, g: &Geometry, resolution: usize) -> Result<QuadratureRule> {
    match kind {
        RuleKind::Polar => build_polar_quadrature(g, resolution),
        RuleKind::Grid => build_quadrature(g, resolution),
    }
}

fn read_setup(path: &Path) -> CliResult<SetupConfig> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn basis_symset(a: SymsetArgs) -> CliResult<()> {
    let (geometry, c) = match &a.setup {
        Some(p) => {
            let regime = read_setup(p)?.regime()?;
            (regime.data_geometry()?, regime.bandwidth())
        }
        None => {
            let base = match a.geometry.expect("required by clap") {
                GeometryKind::Disk => Geometry::disk(a.radius)?,
                GeometryKind::L => match a.theta {
                    Some(t) => Geometry::limited_aperture(t)?,
                    None => return usage("--geometry L needs --theta"),
                },
                GeometryKind::M => match a.x_star.as_deref() {
                    Some([x, y]) => Geometry::multi_freq(Point::new(*x, *y))?,
                    _ => return usage("--geometry M needs --x-star x,y"),
                },
            };
            (base.scaled(a.h)?, a.c.expect("required by clap"))
        }
    };
    let mut key = CacheKey::new("symset", c)
        .param("h", geometry.h)
        .resolution(a.resolution);
    key = match geometry.shape {
        Shape::Disk { radius } => key.param("disk", radius),
        Shape::LimitedAperture { theta } => key.param("theta", theta),
        Shape::MultiFreq { x_star } => key.param("x_star.x", x_star.x).param("x_star.y", x_star.y),
    };
    key = key
        .param("modes", a.modes as f64)
        .param("grid_rule", (a.rule == RuleKind::Grid) as u8 as f64);
    let dir = cache_dir(a.out.as_deref());
    let (path, basis, outcome) = load_or_compute(&dir, &key, || {
        let rule = build_rule(a.rule, &geometry, a.resolution)?;
        compute_symset_basis(c, &geometry, &rule, a.modes).map(CachedBasis::SymSet)
    })?;
    if let CachedBasis::SymSet(b) = &basis {
        eprintln!(
            "{} modes on {} nodes, |alpha_0| = {}",
            b.modes.len(),
            b.quad.len(),
            b.modes[0].alpha.norm()
        );
    }
    report_cache(&path, &outcome);
    Ok(())
}

fn stamp(data: &mut DataGrid, regime: &Regime, geometry: Geometry, resolution: usize) {
    data.geometry = Some(geometry);
    data.meta.k = Some(regime.wavenumber());
    data.meta.c = Some(regime.bandwidth());
    data.meta.resolution = Some(resolution);
}

fn synthesize(a: SynthesizeArgs) -> CliResult<()> {
    let setup = ProblemSetup::from_config(&read_setup(&a.setup)?)?;
    let containment = setup.validate()?;
    eprintln!(
        "support inside the data domain ({} samples, margin {})",
        containment.samples, containment.margin
    );
    let geometry = setup.data_geometry()?;
    let rule = build_rule(a.rule, &geometry, a.resolution)?;
    let mut data = synthesize_born(&setup.contrast, setup.effective_kernel_scale(), &rule)?;
    if data.meta.under_resolved {
        eprintln!("warning: the contrast quadrature may not resolve the kernel");
    }
    if let Some(delta) = a.noise {
        data = if a.noise_abs {
            add_noise_absolute(&data, delta, a.seed)?
        } else {
            add_noise(&data, delta, a.seed)?
        };
        eprintln!(
            "noise: relative {}, absolute {}",
            data.meta.delta, data.meta.delta_abs
        );
    }
    stamp(&mut data, &setup.regime, geometry, a.resolution);
    eprintln!(
        "c = {}, {} nodes",
        setup.regime.bandwidth(),
        data.rule.len()
    );
    io::save_data(&a.out, &data)?;
    Ok(())
}

fn ingest(a: IngestArgs) -> CliResult<()> {
    let regime = read_setup(&a.setup)?.regime()?;
    let samples = io::read_farfield(File::open(&a.input)?)?;
    let geometry = regime.data_geometry()?;
    let rule = build_rule(a.rule, &geometry, a.resolution)?;
    let mut data = ingest_farfield(
        &samples,
        regime.kernel_scale(),
        &rule,
        IngestOptions { cutoff: a.cutoff },
    )?;
    stamp(&mut data, &regime, geometry, a.resolution);
    eprintln!(
        "{} samples, missing weight fraction {}",
        samples.len(),
        data.missing_fraction()
    );
    io::save_data(&a.out, &data)?;
    Ok(())
}

/// Rebuilds the scaled disk basis on the nodes the data file describes.
fn scaled_for(base: DiskBasis, data: &DataGrid) -> CliResult<ScaledDiskBasis> {
    let (Some(k), Some(c), Some(resolution)) = (data.meta.k, data.meta.c, data.meta.resolution)
    else {
        return usage(
            "data file lacks k, c or resolution; it was not produced for the full-aperture regime",
        );
    };
    if c != base.c {
        return usage(format!(
            "basis bandwidth {} differs from the data bandwidth {c}",
            base.c
        ));
    }
    Ok(ScaledDiskBasis::with_resolution(base, k, resolution)?)
}

fn field_points(g: &Geometry, n: usize) -> Vec<Point> {
    let (bx, by) = g.bounding_box();
    let n = n.max(2);
    let mut out = Vec::new();
    for j in 0..n {
        let y = -by + 2.0 * by * j as f64 / (n - 1) as f64;
        for i in 0..n {
            let x = -bx + 2.0 * bx * i as f64 / (n - 1) as f64;
            let p = Point::new(x, y);
            if g.contains(p) {
                out.push(p);
            }
        }
    }
    out
}

fn reconstruct(a: ReconstructArgs) -> CliResult<()> {
    let data = io::load_data(&a.data)?;
    let basis = io::load_basis(&a.basis)?;
    let options = ReconOptions { realify: a.realify };
    let write_field = |result: &ReconstructionResult,
                       values: &dyn Fn(Point) -> Complex64,
                       g: &Geometry|
     -> CliResult<()> {
        if let Some(path) = &a.field {
            let pts = field_points(g, a.field_grid);
            let mut vals: Vec<Complex64> = pts.iter().map(|&p| values(p)).collect();
            if result.realified {
                vals.iter_mut().for_each(|v| v.im = 0.0);
            }
            io::write_field(File::create(path)?, &pts, &vals)?;
        }
        Ok(())
    };
    let result = match basis {
        CachedBasis::Disk(base) => {
            if a.auto_alpha.is_some() {
                return usage("--auto-alpha applies to symmetric-set bases; pass --alpha");
            }
            let scaled = scaled_for(base, &data)?;
            let result =
                reconstruct_full(&data, &scaled, a.alpha.expect("required by clap"), &options)?;
            write_field(&result, &|p| result.eval(&scaled, p), &scaled.geometry())?;
            result
        }
        CachedBasis::SymSet(b) => {
            let alpha = match (&a.alpha, &a.auto_alpha) {
                (Some(alpha), _) => *alpha,
                (None, Some(v)) => choose_alpha_partial(v[0], v[1], v[2], v[3])?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            let result = reconstruct_partial(&data, &b, alpha, &options)?;
            let norm = NormalizedSymSet::new(&b);
            write_field(&result, &|p| result.eval(&norm, p), &b.geometry)?;
            result
        }
    };
    eprintln!(
        "alpha = {}, {} modes retained, data residual {}",
        result.alpha,
        result.modes.len(),
        result.residual
    );
    io::write_json(File::create(&a.out)?, &ResultFile::from(&result))?;
    Ok(())
}

fn extrapolate_cmd(a: ExtrapolateArgs) -> CliResult<()> {
    let data = io::load_data(&a.data)?;
    let CachedBasis::Disk(base) = io::load_basis(&a.basis)? else {
        return usage("extrapolation needs a disk basis");
    };
    let scaled = scaled_for(base, &data)?;
    let targets = io::read_points(File::open(&a.targets)?)?;
    let values = match a.alpha {
        None => extrapolate(&data, &scaled, &targets)?,
        Some(alpha) => extrapolate_with(&data, &scaled, &targets, |m| scaled.mu(m).norm() > alpha)?,
    };
    io::write_complex_field(File::create(&a.out)?, &targets, &values)?;
    Ok(())
}

fn validate(a: ValidateArgs) -> CliResult<()> {
    let basis = io::load_basis(&a.basis)?;
    let checks = match &basis {
        CachedBasis::Disk(b) => validate_basis(BasisRef::Disk(b))?,
        CachedBasis::SymSet(b) => validate_basis(BasisRef::SymSet(b))?,
    };
    io::write_report(File::create(&a.out)?, &checks)?;
    let failed: Vec<&str> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.check.as_str())
        .collect();
    for c in &checks {
        eprintln!(
            "{:<28} {:>12.3e} <= {:.1e} {}",
            c.check,
            c.residual,
            c.threshold,
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Checks(format!(
            "failed checks: {}",
            failed.join(", ")
        )))
    }
}

fn experiment_cmd(a: ExperimentArgs) -> CliResult<()> {
    let setup = ProblemSetup::from_config(&read_setup(&a.setup)?)?;
    let Regime::Full { k, c } = setup.regime else {
        return usage("the stability experiment runs in the full-aperture regime");
    };
    setup.validate()?;
    let base = DiskBasis::compute(c, a.m_max, a.n_max)?;
    let basis = ScaledDiskBasis::with_resolution(base, k, a.resolution)?;
    let seeds: Vec<u64> = (0..a.seeds).map(|i| a.seed.wrapping_add(i)).collect();
    let rows =
        experiment::experiment_stability(&setup.contrast, &basis, &a.deltas, &a.alphas, &seeds)?;
    let violations = rows.iter().filter(|r| r.error > r.bound).count();
    eprintln!("{} rows, {} above the bound", rows.len(), violations);
    experiment::write_table(std::io::BufWriter::new(File::create(&a.out)?), &rows)?;
    Ok(())
}
