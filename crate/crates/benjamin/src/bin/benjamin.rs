//! Command-line front end for the solver library.
//!
//! Exit codes: 0 success, 2 configuration error, 3 solver nonconvergence,
//! 4 divergence.

use benjamin::config::RunConfig;
use benjamin::error::SolverError;
use benjamin::fourier::PeriodicGrid;
use benjamin::presets;
use benjamin::profile::{write_profile, StoredProfile, WaveBranch};
use benjamin::runner::{comparison_csv, execute, write_artifacts};
use benjamin::waves::{depression_wave, generate_wave, CgnConfig, WaveRequest};
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "benjamin", about = "Periodic Benjamin-equation solver suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a preset or a config file and write its artifacts.
    Run {
        /// Named preset from the catalogue.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Path to a TOML run configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Shrink domain, grid, and horizon proportionally (presets only);
        /// values below 1 are reduced, non-reference variants.
        #[arg(long, default_value_t = 1.0)]
        scale: f64,
        /// Artifact directory.
        #[arg(long, default_value = "out")]
        output: PathBuf,
    },
    /// Generate a solitary-wave profile file.
    GenerateWave {
        /// Wave speed.
        #[arg(long)]
        cs: f64,
        /// Nonlocal-term coefficient in [0, 1).
        #[arg(long)]
        gamma: f64,
        /// Number of pulses in the continuation seed.
        #[arg(long, default_value_t = 1)]
        pulses: usize,
        /// Seed pulse centers (one per pulse; defaults to an even spread).
        #[arg(long, value_delimiter = ',')]
        offsets: Option<Vec<f64>>,
        /// Solve the depression branch instead (ignores --cs and --pulses).
        #[arg(long, default_value_t = false)]
        depression: bool,
        /// Half-length of the periodic domain.
        #[arg(long, default_value_t = 256.0)]
        half_length: f64,
        /// Number of grid intervals (even).
        #[arg(long, default_value_t = 4096)]
        intervals: usize,
        /// Output profile file.
        #[arg(long, default_value = "wave.profile")]
        output: PathBuf,
    },
    /// Compare two run directories sharing grid and snapshot schedule.
    Compare {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Output CSV (stdout when omitted).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the preset catalogue.
    ListPresets,
    /// Verify catalogue integrity and exercise both steppers briefly.
    SelfTest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &SolverError) -> u8 {
    match e {
        SolverError::Nonconvergence { .. } | SolverError::Stagnation { .. } => 3,
        SolverError::Divergence { .. } => 4,
        SolverError::ContinuationLeg { source, .. } => exit_code(source),
        _ => 2,
    }
}

fn dispatch(cmd: Command) -> Result<(), SolverError> {
    match cmd {
        Command::Run {
            preset,
            config,
            scale,
            output,
        } => match (preset, config) {
            (Some(name), None) => {
                let plan = presets::build(&name, scale)?;
                if scale != 1.0 {
                    println!("scale = {scale}: reduced variant, not the reference experiment");
                }
                let outcome = presets::execute_plan(&plan, &output)?;
                for line in outcome.lines {
                    println!("{line}");
                }
                Ok(())
            }
            (None, Some(path)) => {
                let cfg = RunConfig::from_file(&path)?;
                let report = execute(&cfg)?;
                let dir = cfg.output.directory.clone().unwrap_or(output);
                write_artifacts(&report, &dir)?;
                println!(
                    "{}: {} snapshots, elapsed {:.2}s",
                    dir.display(),
                    report.snapshots.len(),
                    report.elapsed
                );
                Ok(())
            }
            _ => Err(SolverError::Config(
                "provide exactly one of --preset or --config".into(),
            )),
        },
        Command::GenerateWave {
            cs,
            gamma,
            pulses,
            offsets,
            depression,
            half_length,
            intervals,
            output,
        } => {
            let grid = PeriodicGrid::new(half_length, intervals)?;
            let cfg = CgnConfig::default();
            let (profile, branch, pulses) = if depression {
                (depression_wave(&grid, gamma, &cfg)?, WaveBranch::Depression, 1)
            } else {
                let seed_offsets = offsets.unwrap_or_else(|| spread(pulses));
                if seed_offsets.len() != pulses {
                    return Err(SolverError::Config(format!(
                        "--offsets must list {pulses} centers"
                    )));
                }
                let request = WaveRequest {
                    params: benjamin::equation::EquationParams::new(1.0, 1.0, gamma, 1.0),
                    speed: cs,
                    offsets: seed_offsets,
                    gamma_step: 0.01,
                };
                (generate_wave(&grid, &request, &cfg)?, WaveBranch::Elevation, pulses)
            };
            let residual = profile.residual;
            let stored = StoredProfile::from_nodal(
                &grid,
                profile.nodal,
                if depression { 0.9 } else { cs },
                gamma,
                branch,
                pulses,
                residual,
            )?;
            write_profile(&output, &stored)?;
            println!("{}: residual {residual:.3e}", output.display());
            Ok(())
        }
        Command::Compare { left, right, output } => {
            let a = benjamin::runner::read_report_dir(&left)?;
            let b = benjamin::runner::read_report_dir(&right)?;
            let cmp = benjamin::runner::compare_reports(&a, &b)?;
            let csv = comparison_csv(&cmp);
            match output {
                Some(path) => std::fs::write(path, csv).map_err(SolverError::Io)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::ListPresets => {
            for info in presets::CATALOGUE {
                println!("{:<28} {}", info.name, info.summary);
            }
            Ok(())
        }
        Command::SelfTest => {
            for line in presets::self_test()? {
                println!("{line}");
            }
            // brief functional exercise of both steppers
            for scheme in ["hybrid", "spectral"] {
                let toml = format!(
                    r#"
forcing = "manufactured"
[equation]
alpha = 0.0
beta = 1.0
gamma = -1.0
delta = -0.5
[domain]
half_length = 1.0
intervals = 32
[time]
step = 0.01
final_time = 1.0
[solver]
scheme = "{scheme}"
[initial]
kind = "expression"
formula = "sin(pi * x)"
"#
                );
                let cfg = RunConfig::from_toml(&toml)?;
                cfg.validate()?;
                let report = execute(&cfg)?;
                let err = report.errors.last().map(|e| e.l2).unwrap_or(f64::NAN);
                if !(err < 1e-3) {
                    return Err(SolverError::Config(format!(
                        "{scheme} self-test error too large: {err:.3e}"
                    )));
                }
                println!("{scheme} stepper: ok (manufactured error {err:.3e})");
            }
            Ok(())
        }
    }
}

/// Evenly spread seed centers used when --offsets is omitted.
fn spread(pulses: usize) -> Vec<f64> {
    let gap = 8.0;
    (0..pulses)
        .map(|i| (i as f64 - (pulses as f64 - 1.0) / 2.0) * gap)
        .collect()
}
