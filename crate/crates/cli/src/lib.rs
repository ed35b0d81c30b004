//! Subcommands of the `qwalk` binary.
//!
//! Every command writes plain CSV/text files into an output directory and
//! returns a short summary for stdout. Failures carry the exit code the
//! binary should report.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use qwalk::ensemble::pair_distributions;
use qwalk::io::manifest::{RunManifest, DEFAULT_CONFIGURATIONS, DEFAULT_SEED};
use qwalk::io::tables::{
    distributions_table, fit_csv, peaks_table, read_distributions, variance_from_table,
    variance_table, StepTable,
};
use qwalk::io::unitary::{read_unitary, write_unitary};
use qwalk::io::IoError;
use qwalk::{
    compose_total_unitary, draw_schedule, find_peaks, load_fixture_schedule, run_ensemble, tvd,
    unitarity_defect, EnsembleSpec, Fixture, NoiseKind, NoiseSpec, PhaseSchedule, VarianceSeries,
    WalkConfig,
};

/// Largest tolerated entry of |U†U − I| for written or checked unitaries.
pub const UNITARITY_TOLERANCE: f64 = 1e-12;

/// Lattice used when only a fixture is given.
pub const FIXTURE_SITES: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Schema(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::File { .. } => CliError::Io(e.to_string()),
            IoError::Schema { .. } | IoError::Core(_) => CliError::Schema(e.to_string()),
        }
    }
}

impl From<qwalk::Error> for CliError {
    fn from(e: qwalk::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Brick-wall quantum walk simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// One walk: per-step distributions, variance and the phases used.
    Simulate(RunArgs),
    /// Monte Carlo average over noise configurations.
    Ensemble(EnsembleArgs),
    /// Peaks of a variance series and the line through them.
    Peaks(PeaksArgs),
    /// Per-step distance between measured and simulated distributions.
    Compare(CompareArgs),
    /// Composed unitary of the whole walk, or a unitarity check of a file.
    Unitary(UnitaryArgs),
    /// Export the phase schedule a run would use.
    Phases(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON run manifest.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Overrides the manifest seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory; overrides the manifest.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Measured phase table: SortedWeak, SortedStrong or UnsortedStrong.
    #[arg(long)]
    pub fixture: Option<Fixture>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Noise configuration drawn for single runs.
    #[arg(long, default_value_t = 1)]
    pub config_index: u64,
}

#[derive(Debug, Clone, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Overrides the manifest configuration count.
    #[arg(long)]
    pub configurations: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct PeaksArgs {
    /// CSV with a `step` column and a variance column.
    pub variance_file: PathBuf,
    /// Column to read; defaults to `variance`, then `central_variance`.
    #[arg(long)]
    pub column: Option<String>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Measured `step,p1,…` distributions.
    pub measured: PathBuf,
    /// Simulated `step,p1,…` distributions.
    pub simulated: PathBuf,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct UnitaryArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Read a unitary file and check it instead of composing one.
    #[arg(long, conflicts_with_all = ["manifest", "fixture", "seed", "out"])]
    pub check: Option<PathBuf>,
}

pub fn run(cli: Cli) -> CliResult<String> {
    match cli.command {
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Ensemble(a) => cmd_ensemble(&a),
        Command::Peaks(a) => cmd_peaks(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Unitary(a) => match &a.check {
            Some(path) => cmd_check_unitary(path),
            None => cmd_unitary(&a.run),
        },
        Command::Phases(a) => cmd_phases(&a),
    }
}

/// Manifest with command-line overrides applied.
pub fn resolve_manifest(args: &CommonArgs) -> CliResult<RunManifest> {
    let mut manifest = match (&args.manifest, args.fixture) {
        (Some(path), _) => RunManifest::from_path(path)?,
        (None, Some(f)) => RunManifest {
            walk: WalkConfig::new(FIXTURE_SITES, load_fixture_schedule(f).len())?,
            noise: NoiseSpec::none(),
            configurations: DEFAULT_CONFIGURATIONS,
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("out"),
            formats: vec!["csv".into()],
        },
        (None, None) => {
            return Err(CliError::Schema("either --manifest or --fixture is required".into()))
        }
    };
    if let Some(seed) = args.seed {
        manifest.seed = seed;
    }
    if let Some(out) = &args.out {
        manifest.output_dir = out.clone();
    }
    if let Some(f) = args.fixture {
        manifest.noise = f.spec();
    }
    Ok(manifest)
}

/// Phases for a single run: the fixture if one is given, else a draw.
pub fn resolve_schedule(manifest: &RunManifest, fixture: Option<Fixture>, index: u64) -> CliResult<PhaseSchedule> {
    let steps = manifest.walk.steps;
    match fixture {
        Some(f) => {
            let mut schedule = load_fixture_schedule(f);
            if steps > schedule.len() {
                return Err(CliError::Schema(format!(
                    "fixture {f} has {} steps, manifest asks for {steps}",
                    schedule.len()
                )));
            }
            schedule.phases.truncate(steps);
            Ok(schedule)
        }
        None if steps == 0 => Ok(PhaseSchedule {
            phases: Vec::new(),
            spec: manifest.noise,
            seed: manifest.seed,
            config_index: index,
        }),
        None => Ok(draw_schedule(&manifest.noise, steps, manifest.seed, index)?),
    }
}

fn prepare_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn cmd_simulate(args: &RunArgs) -> CliResult<String> {
    let manifest = resolve_manifest(&args.common)?;
    if manifest.noise.kind == NoiseKind::Dynamic && args.common.fixture.is_none() && manifest.configurations > 1 {
        log::warn!(
            "simulate runs configuration {} only; use `ensemble` for all {}",
            args.config_index,
            manifest.configurations
        );
    }
    let schedule = resolve_schedule(&manifest, args.common.fixture, args.config_index)?;
    let dists = pair_distributions(&manifest.walk, &schedule)?;
    let series = VarianceSeries::from_distributions(&dists);

    let dir = &manifest.output_dir;
    prepare_dir(dir)?;
    distributions_table(&dists).write(&dir.join("distributions.csv"))?;
    variance_table(&series).write(&dir.join("variance.csv"))?;
    write_text(&dir.join("schedule.txt"), &schedule.to_text())?;
    write_text(&dir.join("manifest.json"), &manifest.to_json())?;

    let last = series.values().last().copied().unwrap_or(0.0);
    Ok(format!(
        "simulated {} sites over {} steps; final variance {last:.6}; wrote {}",
        manifest.walk.sites,
        manifest.walk.steps,
        dir.display()
    ))
}

pub fn cmd_ensemble(args: &EnsembleArgs) -> CliResult<String> {
    let mut manifest = resolve_manifest(&args.common)?;
    if args.common.fixture.is_some() {
        return Err(CliError::Schema(
            "ensemble draws its own schedules; --fixture applies to single runs".into(),
        ));
    }
    if manifest.noise.kind != NoiseKind::Dynamic {
        return Err(CliError::Schema("ensemble needs noise.kind Dynamic".into()));
    }
    if let Some(r) = args.configurations {
        if r == 0 {
            return Err(CliError::Schema("--configurations must be >= 1".into()));
        }
        manifest.configurations = r;
    }
    let spec = EnsembleSpec {
        walk: manifest.walk.clone(),
        noise: manifest.noise,
        configurations: manifest.configurations,
        seed: manifest.seed,
    };
    let result = run_ensemble(&spec)?;

    let dir = &manifest.output_dir;
    prepare_dir(dir)?;
    distributions_table(&result.averaged).write(&dir.join("avg_distributions.csv"))?;

    let mut bands = StepTable::new(vec![
        "central_variance".into(),
        "mean_of_variances".into(),
        "std_band".into(),
    ]);
    for (n, &central) in result.central.values().iter().enumerate() {
        bands.push(n, vec![central, result.mean_of_variances[n], result.band[n]]);
    }
    bands.write(&dir.join("variance_bands.csv"))?;

    let mut per_config = StepTable::new((1..=spec.configurations).map(|r| format!("c{r}")).collect());
    for n in 0..result.central.len() {
        per_config.push(n, result.per_config.iter().map(|row| row[n]).collect());
    }
    per_config.write(&dir.join("perconfig_variance.csv"))?;
    write_text(&dir.join("manifest.json"), &manifest.to_json())?;

    Ok(format!(
        "averaged {} configurations of {} sites over {} steps; wrote {}",
        spec.configurations,
        spec.walk.sites,
        spec.walk.steps,
        dir.display()
    ))
}

pub fn cmd_peaks(args: &PeaksArgs) -> CliResult<String> {
    let label = args.variance_file.display().to_string();
    let table = StepTable::read(&args.variance_file)?;
    let series = variance_from_table(&table, args.column.as_deref(), &label)?;
    let peaks = find_peaks(&series)?.with_fit();

    prepare_dir(&args.out)?;
    peaks_table(&peaks).write(&args.out.join("peaks.csv"))?;
    let fit_path = args.out.join("peak_fit.csv");
    match peaks.fit {
        Some(fit) => {
            write_text(&fit_path, &fit_csv(fit.slope, fit.intercept, fit.residual_norm))?;
            Ok(format!(
                "{} peaks; slope {:.6}, intercept {:.6}",
                peaks.steps.len(),
                fit.slope,
                fit.intercept
            ))
        }
        None => {
            // a stale fit from an earlier run would be misleading
            if fit_path.exists() {
                fs::remove_file(&fit_path).map_err(|e| CliError::Io(format!("{}: {e}", fit_path.display())))?;
            }
            log::warn!("{} peak(s) in {label}; need 2 to fit a line", peaks.steps.len());
            Ok(format!("{} peaks; no fit", peaks.steps.len()))
        }
    }
}

pub fn cmd_compare(args: &CompareArgs) -> CliResult<String> {
    let measured = read_distributions(&args.measured)?;
    let simulated = read_distributions(&args.simulated)?;
    let mut table = StepTable::new(vec!["tvd".into()]);
    let mut worst: Option<(usize, f64)> = None;
    for m in &measured {
        let s = simulated
            .iter()
            .find(|s| s.step() == m.step())
            .ok_or_else(|| {
                CliError::Schema(format!(
                    "step {} of {} is missing from {}",
                    m.step(),
                    args.measured.display(),
                    args.simulated.display()
                ))
            })?;
        if s.len() != m.len() {
            return Err(CliError::Schema(format!(
                "column count differs: {} modes measured, {} simulated",
                m.len(),
                s.len()
            )));
        }
        let d = tvd(m, s)?;
        table.push(m.step(), vec![d]);
        if worst.is_none_or(|(_, w)| d > w) {
            worst = Some((m.step(), d));
        }
    }
    prepare_dir(&args.out)?;
    table.write(&args.out.join("tvd_per_step.csv"))?;
    Ok(match worst {
        Some((step, d)) => format!("max tvd {d:.9} at step {step} over {} steps", measured.len()),
        None => "no steps to compare".into(),
    })
}

pub fn cmd_unitary(args: &RunArgs) -> CliResult<String> {
    let manifest = resolve_manifest(&args.common)?;
    let schedule = resolve_schedule(&manifest, args.common.fixture, args.config_index)?;
    let u = compose_total_unitary(&manifest.walk, &schedule)?;
    let defect = unitarity_defect(&u);
    if defect > UNITARITY_TOLERANCE {
        return Err(CliError::Numerical(format!(
            "composed matrix is not unitary: max |U†U − I| = {defect:e}"
        )));
    }
    prepare_dir(&manifest.output_dir)?;
    let path = manifest.output_dir.join("total_unitary.txt");
    write_unitary(&path, &u)?;
    Ok(format!("{}×{} unitary, defect {defect:.3e}; wrote {}", u.nrows(), u.ncols(), path.display()))
}

pub fn cmd_check_unitary(path: &Path) -> CliResult<String> {
    let u = read_unitary(path)?;
    let defect = unitarity_defect(&u);
    if defect > UNITARITY_TOLERANCE {
        return Err(CliError::Numerical(format!(
            "{}: not unitary, max |U†U − I| = {defect:e}",
            path.display()
        )));
    }
    Ok(format!("{}: unitary, defect {defect:.3e}", path.display()))
}

pub fn cmd_phases(args: &RunArgs) -> CliResult<String> {
    let manifest = resolve_manifest(&args.common)?;
    let schedule = resolve_schedule(&manifest, args.common.fixture, args.config_index)?;
    prepare_dir(&manifest.output_dir)?;
    let path = manifest.output_dir.join("schedule.txt");
    write_text(&path, &schedule.to_text())?;
    Ok(format!("{} phases; wrote {}", schedule.len(), path.display()))
}
