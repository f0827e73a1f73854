//! Run directories: manifests, streamed snapshots, invariant series, carpet
//! files and post-run diagnostics, plus the re-check entry points used by
//! the command-line tool.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::thread;

use crate::carpet::CarpetGrid;
use crate::coherent::{
    bifurcation_speed, solve_travelling_wave, torus_residual, track_fields,
    travelling_wave_multipliers, Polarity, ShockTrace, TrackerConfig, TravellingWave,
    TravellingWaveProblem,
};
use crate::config::{fmt_f64, parse_config, RunConfig};
use crate::conserved::{self, drift_series, Drift, InvariantSample};
use crate::error::{Error, Result};
use crate::evolver::{simulate, Observer, RunSummary};
use crate::io::{self, Colormap};
use crate::linear::{evolve_linear, linear_carpet, revival_constancy, ConstancyReport, RationalTime};
use crate::spectral::{Grid, SpectralField};

pub const MANIFEST: &str = "manifest.txt";
pub const INVARIANTS: &str = "invariants.csv";
pub const SNAPSHOT_DIR: &str = "snapshots";
pub const CARPET_DATA: &str = "carpet.bin";
pub const CARPET_GRAY: &str = "carpet.pgm";
pub const CARPET_DIVERGING: &str = "carpet_diverging.ppm";
pub const SHOCK_TRACE: &str = "shock_trace.csv";
pub const DIAGNOSTICS: &str = "diagnostics.csv";

/// Drift limits checked by [`verify`] for conservative runs.
pub const MASS_DRIFT_LIMIT: f64 = 1e-8;
pub const ENERGY_DRIFT_LIMIT: f64 = 1e-6;
pub const HAMILTONIAN_DRIFT_LIMIT: f64 = 1e-5;

/// Subinterval buffer and pass threshold of the revival check.
pub const REVIVAL_BUFFER: f64 = 0.1;
pub const REVIVAL_TOLERANCE: f64 = 0.02;

/// What one run directory ended up containing.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub label: String,
    pub dir: PathBuf,
    pub summary: RunSummary,
    pub invariants: Vec<InvariantSample>,
    pub drift: Option<Drift>,
    pub carpet: CarpetGrid,
    pub traces: Vec<ShockTrace>,
}

struct DirectoryWriter {
    snapshots: PathBuf,
    snapshot_count: usize,
    invariants: Vec<InvariantSample>,
    carpet: CarpetGrid,
}

impl Observer for DirectoryWriter {
    fn snapshot(&mut self, time: f64, field: &SpectralField) -> Result<()> {
        let path = self.snapshots.join(format!("snap_{:06}.bin", self.snapshot_count));
        self.snapshot_count += 1;
        io::write_snapshot(field, time, &path)
    }

    fn invariants(&mut self, sample: &InvariantSample) -> Result<()> {
        self.invariants.push(*sample);
        Ok(())
    }

    fn carpet_row(&mut self, time: f64, field: &SpectralField) -> Result<()> {
        self.carpet.push_field(time, field)
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Manifest text: comments naming the preset and derived reference values,
/// then the resolved configuration.
pub fn manifest_text(config: &RunConfig) -> String {
    let mut s = String::from("# akdv run manifest\n");
    if let Some(p) = config.preset {
        let _ = writeln!(s, "# preset: {}", p.name());
    }
    for (name, value) in config.derived() {
        let _ = writeln!(s, "# {name} = {}", fmt_f64(value));
    }
    s.push_str(&config.to_text());
    s
}

fn write_carpet_files(carpet: &CarpetGrid, dir: &Path) -> Result<()> {
    if carpet.is_empty() {
        return Ok(());
    }
    io::write_carpet_data(carpet, &dir.join(CARPET_DATA))?;
    io::write_carpet_image(carpet, &dir.join(CARPET_GRAY), Colormap::Gray)?;
    io::write_carpet_image(carpet, &dir.join(CARPET_DIVERGING), Colormap::Diverging)
}

fn tracker_config(config: &RunConfig) -> TrackerConfig {
    TrackerConfig {
        smoothing: config.tracking.smoothing,
        search_radius: config.tracking.radius,
        ..TrackerConfig::default()
    }
}

/// Tracks shock and antishock through the carpet rows at or after
/// `track_start`.
pub fn track_run(carpet: &CarpetGrid, config: &RunConfig) -> Result<Vec<ShockTrace>> {
    let grid = carpet.grid()?;
    let (times, fields): (Vec<f64>, Vec<SpectralField>) = (0..carpet.rows())
        .filter(|&i| carpet.times()[i] >= config.tracking.start)
        .map(|i| Ok((carpet.times()[i], SpectralField::forward(&grid, carpet.row(i))?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();
    let tracker = tracker_config(config);
    [Polarity::Shock, Polarity::Antishock]
        .into_iter()
        .map(|p| track_fields(&times, &fields, p, &tracker))
        .collect()
}

fn diagnostics_text(
    summary: Option<&RunSummary>,
    drift: Option<&Drift>,
    traces: &[ShockTrace],
    failure: Option<&Error>,
) -> String {
    let mut s = String::from("quantity,value\n");
    let mut row = |k: &str, v: String| {
        let _ = writeln!(s, "{k},{v}");
    };
    row("status", if failure.is_some() { "failed" } else { "ok" }.into());
    if let Some(e) = failure {
        row("error", e.to_string().replace(',', ";"));
    }
    if let Some(sm) = summary {
        row("steps", sm.steps.to_string());
        row("dt", fmt_f64(sm.dt));
        row("final_time", fmt_f64(sm.final_time));
        for (name, t) in &sm.marks {
            row(name, fmt_f64(*t));
        }
    }
    if let Some(d) = drift {
        row("mass_drift", fmt_f64(d.mass));
        row("energy_drift", fmt_f64(d.energy));
        row("hamiltonian_drift", fmt_f64(d.hamiltonian));
    }
    for tr in traces {
        let name = io::polarity_name(tr.polarity);
        row(&format!("{name}_velocity"), fmt_f64(tr.velocity));
        row(&format!("{name}_residual_rms"), fmt_f64(tr.residual_rms));
    }
    s
}

/// Runs one expanded configuration into `dir`.  Everything produced before
/// a failure is still written.
fn run_single(label: String, config: &RunConfig, dir: PathBuf) -> Result<RunReport> {
    create_dir(&dir)?;
    io::write_text(&dir.join(MANIFEST), &manifest_text(config))?;
    let snapshots = dir.join(SNAPSHOT_DIR);
    create_dir(&snapshots)?;
    let grid = Grid::new(config.n, config.length)?;
    let mut writer = DirectoryWriter {
        snapshots,
        snapshot_count: 0,
        invariants: Vec::new(),
        carpet: CarpetGrid::for_grid(&grid),
    };
    let outcome = simulate(config, &mut writer);
    io::write_invariants_csv(&writer.invariants, &dir.join(INVARIANTS))?;
    write_carpet_files(&writer.carpet, &dir)?;
    let drift = drift_series(&writer.invariants).ok();

    let summary = match outcome {
        Ok(s) => s,
        Err(e) => {
            let text = diagnostics_text(None, drift.as_ref(), &[], Some(&e));
            io::write_text(&dir.join(DIAGNOSTICS), &text)?;
            return Err(e);
        }
    };
    let traces = if config.tracking.enabled {
        match track_run(&writer.carpet, config) {
            Ok(t) => t,
            Err(e) => {
                let text = diagnostics_text(Some(&summary), drift.as_ref(), &[], Some(&e));
                io::write_text(&dir.join(DIAGNOSTICS), &text)?;
                return Err(e);
            }
        }
    } else {
        Vec::new()
    };
    if !traces.is_empty() {
        io::write_text(&dir.join(SHOCK_TRACE), &io::shock_traces_csv(&traces))?;
    }
    let text = diagnostics_text(Some(&summary), drift.as_ref(), &traces, None);
    io::write_text(&dir.join(DIAGNOSTICS), &text)?;
    Ok(RunReport {
        label,
        dir,
        summary,
        invariants: writer.invariants,
        drift,
        carpet: writer.carpet,
        traces,
    })
}

/// Executes `config` (every member of a sweep or companion pair, each in
/// its own subdirectory and thread) and returns the reports in order.
pub fn run(config: &RunConfig) -> Result<Vec<RunReport>> {
    let root = config.output_dir.clone();
    create_dir(&root)?;
    let subruns = config.expand()?;
    if subruns.len() > 1 {
        io::write_text(&root.join(MANIFEST), &manifest_text(config))?;
    }
    let jobs: Vec<(String, RunConfig, PathBuf)> = subruns
        .into_iter()
        .map(|(label, mut c)| {
            let dir = if label.is_empty() { root.clone() } else { root.join(&label) };
            c.output_dir = dir.clone();
            (label, c, dir)
        })
        .collect();
    let results: Vec<Result<RunReport>> = if jobs.len() == 1 {
        jobs.into_iter().map(|(l, c, d)| run_single(l, &c, d)).collect()
    } else {
        thread::scope(|scope| {
            let handles: Vec<_> = jobs
                .iter()
                .map(|(l, c, d)| scope.spawn(move || run_single(l.clone(), c, d.clone())))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("run thread panicked"))
                .collect()
        })
    };
    results.into_iter().collect()
}

/// Exact linear evolution of the initial data, sampled at `carpet_rows`
/// evenly spaced times in `[0, t_end]`.
pub fn run_linear(config: &RunConfig) -> Result<RunReport> {
    let dir = config.output_dir.clone();
    create_dir(&dir)?;
    io::write_text(&dir.join(MANIFEST), &manifest_text(config))?;
    let snapshots = dir.join(SNAPSHOT_DIR);
    create_dir(&snapshots)?;
    let grid = Grid::new(config.n, config.length)?;
    let spec = config.model.linearized();
    let field0 = config.initial.to_field(&grid)?;
    let rows = config.carpet_rows.max(2);
    let times: Vec<f64> = (0..rows)
        .map(|i| config.t_end * i as f64 / (rows - 1) as f64)
        .collect();
    let carpet = linear_carpet(&field0, &spec, &times)?;
    let invariants: Vec<InvariantSample> = (0..rows)
        .map(|i| {
            let f = SpectralField::forward(&grid, carpet.row(i))?;
            Ok(conserved::sample(&f, &spec, times[i]))
        })
        .collect::<Result<_>>()?;
    let final_field = evolve_linear(&field0, &spec, config.t_end);
    io::write_snapshot(&field0, 0.0, &snapshots.join("snap_000000.bin"))?;
    io::write_snapshot(&final_field, config.t_end, &snapshots.join("snap_000001.bin"))?;
    io::write_invariants_csv(&invariants, &dir.join(INVARIANTS))?;
    write_carpet_files(&carpet, &dir)?;
    let drift = drift_series(&invariants).ok();
    let traces = if config.tracking.enabled {
        track_run(&carpet, config)?
    } else {
        Vec::new()
    };
    if !traces.is_empty() {
        io::write_text(&dir.join(SHOCK_TRACE), &io::shock_traces_csv(&traces))?;
    }
    let summary = RunSummary {
        steps: 0,
        dt: 0.0,
        final_time: config.t_end,
        marks: Vec::new(),
        final_field,
    };
    let text = diagnostics_text(Some(&summary), drift.as_ref(), &traces, None);
    io::write_text(&dir.join(DIAGNOSTICS), &text)?;
    Ok(RunReport {
        label: String::new(),
        dir,
        summary,
        invariants,
        drift,
        carpet,
        traces,
    })
}

/// Evolves the initial data of `config` exactly to `t = πp/q` and tests
/// piecewise constancy on the `2q` subintervals.
pub fn revival_check(config: &RunConfig, p: i64, q: i64) -> Result<ConstancyReport> {
    let grid = Grid::new(config.n, config.length)?;
    let t = RationalTime::new(p, q)?;
    let field0 = config.initial.to_field(&grid)?;
    let field = evolve_linear(&field0, &config.model.linearized(), t);
    revival_constancy(&field, t, 8, REVIVAL_BUFFER, REVIVAL_TOLERANCE)
}

/// Solution of a travelling-wave problem together with its torus residual.
#[derive(Clone, Debug)]
pub struct TravellingWaveReport {
    pub wave: TravellingWave,
    pub multipliers: [f64; 2],
    pub torus_residual: f64,
}

/// Solves for a wave of speed `lambda` on the grid of `config`, keeping
/// `modes` Fourier modes and pinning the first-mode amplitude, starting from
/// a single cosine.
pub fn travelling_wave(
    config: &RunConfig,
    lambda: f64,
    amplitude: f64,
    modes: usize,
) -> Result<TravellingWaveReport> {
    let grid = Grid::new(config.n, config.length)?;
    let problem = TravellingWaveProblem::new(config.model.clone(), grid.clone(), lambda, modes)
        .with_amplitude(amplitude);
    let mut guess = SpectralField::zeros(&grid);
    guess.set_coeff(1, amplitude.into())?;
    let wave = solve_travelling_wave(&problem, &guess)?;
    let multipliers = travelling_wave_multipliers(&wave.field, lambda)?;
    let residual = torus_residual(&wave.field, &config.model, &multipliers)?;
    let dir = &config.output_dir;
    create_dir(dir)?;
    io::write_text(&dir.join(MANIFEST), &manifest_text(config))?;
    io::write_snapshot(&wave.field, 0.0, &dir.join("travelling_wave.bin"))?;
    let mut s = String::from("quantity,value\n");
    let _ = writeln!(s, "lambda,{}", fmt_f64(lambda));
    let _ = writeln!(s, "bifurcation_speed,{}", fmt_f64(bifurcation_speed(&config.model, &grid, 1)));
    let _ = writeln!(s, "amplitude,{}", fmt_f64(amplitude));
    let _ = writeln!(s, "modes,{modes}");
    let _ = writeln!(s, "newton_residual,{}", fmt_f64(wave.residual));
    let _ = writeln!(s, "iterations,{}", wave.iterations);
    let _ = writeln!(s, "lambda_energy,{}", fmt_f64(multipliers[0]));
    let _ = writeln!(s, "lambda_mass,{}", fmt_f64(multipliers[1]));
    let _ = writeln!(s, "torus_residual,{}", fmt_f64(residual));
    io::write_text(&dir.join(DIAGNOSTICS), &s)?;
    Ok(TravellingWaveReport {
        wave,
        multipliers,
        torus_residual: residual,
    })
}

/// Run directories below (and including) `dir` that hold a carpet or an
/// invariant series.
fn run_dirs(dir: &Path, marker: &str) -> Result<Vec<PathBuf>> {
    if dir.join(marker).is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let mut out = Vec::new();
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut subdirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_dir() && p.join(marker).is_file())
        .collect();
    subdirs.sort();
    out.append(&mut subdirs);
    if out.is_empty() {
        return Err(Error::Format {
            path: dir.to_path_buf(),
            msg: format!("no {marker} in this directory or its subdirectories"),
        });
    }
    Ok(out)
}

/// Re-renders the carpet images of a run directory from its carpet data.
pub fn render_carpets(dir: &Path) -> Result<Vec<PathBuf>> {
    let dirs = run_dirs(dir, CARPET_DATA)?;
    for d in &dirs {
        let carpet = io::read_carpet_data(&d.join(CARPET_DATA))?;
        io::write_carpet_image(&carpet, &d.join(CARPET_GRAY), Colormap::Gray)?;
        io::write_carpet_image(&carpet, &d.join(CARPET_DIVERGING), Colormap::Diverging)?;
    }
    Ok(dirs)
}

/// Drift of one run directory as recorded on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub dir: PathBuf,
    pub drift: Drift,
    /// Whether the limits apply (conservative family).
    pub checked: bool,
    pub pass: bool,
}

/// Re-reads the manifest and invariant series of each run below `dir` and
/// checks the drift limits for conservative families.
pub fn verify(dir: &Path) -> Result<Vec<Verification>> {
    let mut out = Vec::new();
    for d in run_dirs(dir, INVARIANTS)? {
        let config = parse_config(&io::read_text(&d.join(MANIFEST))?)?;
        let samples = io::read_invariants_csv(&d.join(INVARIANTS))?;
        let drift = drift_series(&samples)?;
        let checked = config.model.is_conservative();
        let pass = !checked
            || (drift.mass < MASS_DRIFT_LIMIT
                && drift.energy < ENERGY_DRIFT_LIMIT
                && drift.hamiltonian < HAMILTONIAN_DRIFT_LIMIT);
        out.push(Verification {
            dir: d,
            drift,
            checked,
            pass,
        });
    }
    Ok(out)
}
