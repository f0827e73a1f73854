use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use akdv::config::{fmt_f64, parse_config, RunConfig};
use akdv::error::{Error, Result};
use akdv::io::polarity_name;
use akdv::run;
use clap::{Parser, Subcommand};

/// Pseudo-spectral laboratory for alternating-dispersion KdV models.
#[derive(Parser)]
#[command(name = "akdv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a configuration and write its run directory.
    Simulate {
        config: PathBuf,
        /// Overrides `output_dir` from the configuration.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Evolve the linearised model exactly and write its carpet.
    Linear {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Test piecewise constancy of the linear evolution at t = πp/q.
    RevivalCheck {
        config: PathBuf,
        #[arg(long)]
        p: i64,
        #[arg(long)]
        q: i64,
    },
    /// Solve for a travelling wave of the given speed.
    TravellingWave {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Pinned real part of the first Fourier coefficient.
        #[arg(long, default_value_t = 0.05, allow_hyphen_values = true)]
        amplitude: f64,
        /// Number of Fourier modes kept.
        #[arg(long, default_value_t = 16)]
        modes: usize,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Re-render carpet images from a run directory.
    Carpet { run_dir: PathBuf },
    /// Re-check invariant drift of a run directory.
    Verify { run_dir: PathBuf },
}

fn load(path: &Path, output_dir: Option<PathBuf>) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut config = parse_config(&text)?;
    if let Some(dir) = output_dir {
        config.output_dir = dir;
    }
    Ok(config)
}

fn print_report(r: &run::RunReport) {
    let label = if r.label.is_empty() { "run" } else { &r.label };
    println!(
        "{label}: {} steps, dt = {}, t = {} -> {}",
        r.summary.steps,
        fmt_f64(r.summary.dt),
        fmt_f64(r.summary.final_time),
        r.dir.display()
    );
    if let Some(d) = &r.drift {
        println!(
            "  drift: mass {:.3e}, energy {:.3e}, hamiltonian {:.3e}",
            d.mass, d.energy, d.hamiltonian
        );
    }
    for t in &r.traces {
        println!(
            "  {}: velocity {:.6}, rms residual {:.3e}",
            polarity_name(t.polarity),
            t.velocity,
            t.residual_rms
        );
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Simulate { config, output_dir } => {
            for r in run::run(&load(&config, output_dir)?)? {
                print_report(&r);
            }
        }
        Command::Linear { config, output_dir } => {
            print_report(&run::run_linear(&load(&config, output_dir)?)?);
        }
        Command::RevivalCheck { config, p, q } => {
            let report = run::revival_check(&load(&config, None)?, p, q)?;
            println!(
                "t = {p}π/{q}: statistic {:.4e} (tolerance {}) over {} subintervals: {}",
                report.statistic,
                report.tolerance,
                report.interval_ranges.len(),
                if report.pass { "constant" } else { "not constant" }
            );
            if !report.pass {
                return Err(Error::Analysis("revival check failed".into()));
            }
        }
        Command::TravellingWave {
            config,
            lambda,
            amplitude,
            modes,
            output_dir,
        } => {
            let config = load(&config, output_dir)?;
            let r = run::travelling_wave(&config, lambda, amplitude, modes)?;
            println!(
                "lambda = {lambda}: residual {:.3e} after {} iterations, torus residual {:.3e} -> {}",
                r.wave.residual,
                r.wave.iterations,
                r.torus_residual,
                config.output_dir.display()
            );
        }
        Command::Carpet { run_dir } => {
            for d in run::render_carpets(&run_dir)? {
                println!("rendered {}", d.display());
            }
        }
        Command::Verify { run_dir } => {
            let mut ok = true;
            for v in run::verify(&run_dir)? {
                let verdict = match (v.checked, v.pass) {
                    (false, _) => "not conservative, unchecked",
                    (true, true) => "ok",
                    (true, false) => "drift above limits",
                };
                println!(
                    "{}: mass {:.3e}, energy {:.3e}, hamiltonian {:.3e}: {verdict}",
                    v.dir.display(),
                    v.drift.mass,
                    v.drift.energy,
                    v.drift.hamiltonian
                );
                ok &= v.pass;
            }
            if !ok {
                return Err(Error::Analysis("invariant drift above limits".into()));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("akdv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
