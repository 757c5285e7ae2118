//! Named experiment presets.
//!
//! Every preset is a complete, runnable experiment: convergence tables for
//! both steppers, travelling-wave validation runs, solitary-wave generation
//! suites, overtaking collisions, perturbation-stability studies, and the
//! depression-wave instability study.  Parameters are locked in the
//! builders below and asserted by [`self_test`] so the catalogue cannot
//! drift from its documentation.
//!
//! Long experiments accept a `scale` factor that shrinks the domain, the
//! grid, the final time, and all pulse offsets proportionally while keeping
//! the mesh width and the time step.  `scale = 1` is the full published
//! experiment; anything else is a reduced, non-reference variant intended
//! for quick checks.

use crate::config::{
    DomainSection, EquationSection, InitialCondition, OutputSection, PerturbationMode, RunConfig,
    Scheme, SolverSection, TimeSection,
};
use crate::diagnostics::nodal_l2;
use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use crate::fourier::PeriodicGrid;
use crate::profile::{write_profile, StoredProfile, WaveBranch};
use crate::runner::{
    execute, manufactured_solution, travelling_wave_errors, write_artifacts, RunReport,
};
use crate::waves::{depression_wave, generate_wave, CgnConfig, WaveRequest};
use std::fmt::Write as _;
use std::path::Path;

/// A solitary-wave profile to generate before the runs of a preset.
#[derive(Debug, Clone)]
pub struct WaveJob {
    /// File name of the stored profile, relative to the output directory.
    pub file: String,
    pub half_length: f64,
    pub intervals: usize,
    pub gamma: f64,
    pub speed: f64,
    /// Pulse centers of the continuation seed; one entry per pulse.
    pub seed_offsets: Vec<f64>,
    /// Generate on the depression branch instead of by continuation.
    pub depression: bool,
}

impl WaveJob {
    fn single(file: &str, half_length: f64, intervals: usize, gamma: f64, speed: f64) -> Self {
        Self {
            file: file.to_string(),
            half_length,
            intervals,
            gamma,
            speed,
            seed_offsets: vec![0.0],
            depression: false,
        }
    }
}

/// One labelled run inside a preset; artifacts land in `<out>/<label>/`.
#[derive(Debug, Clone)]
pub struct LabeledRun {
    pub label: String,
    pub config: RunConfig,
    /// When set, the initial condition is a travelling wave of this speed and
    /// the preset reports shape/phase/L2 tracking errors against it.
    pub reference_speed: Option<f64>,
}

/// Generated profiles followed by evolution runs.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub waves: Vec<WaveJob>,
    pub runs: Vec<LabeledRun>,
}

/// Which convergence table a table preset produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvergenceTable {
    /// Manufactured solution, spline stepper, N doubling at fixed M = 1000.
    SpatialHybrid,
    /// Manufactured solution, spline stepper, N = M doubling together.
    TemporalHybrid,
    /// Travelling wave of the pure nonlocal equation, spline stepper,
    /// errors against a reference run with a much smaller step.
    TemporalNonlocal,
    /// Manufactured solution, Fourier stepper, M doubling at fixed N = 100.
    TemporalSpectral,
}

/// What a preset does when executed.
#[derive(Debug, Clone)]
pub enum PresetPlan {
    Table(ConvergenceTable),
    Experiment(ExperimentPlan),
    /// Profile generation only; writes one profile file per job plus a
    /// summary of residuals and invariants.
    WaveSuite(Vec<WaveJob>),
}

/// Catalogue entry.
#[derive(Debug, Clone, Copy)]
pub struct PresetInfo {
    pub name: &'static str,
    pub summary: &'static str,
}

/// All preset names with one-line summaries.
pub const CATALOGUE: &[PresetInfo] = &[
    PresetInfo {
        name: "table1",
        summary: "spatial convergence of the spline stepper on a manufactured solution",
    },
    PresetInfo {
        name: "table2",
        summary: "temporal convergence of the spline stepper on a manufactured solution",
    },
    PresetInfo {
        name: "table3",
        summary: "temporal convergence of the spline stepper on the pure nonlocal equation",
    },
    PresetInfo {
        name: "table4",
        summary: "temporal convergence of the Fourier stepper on a manufactured solution",
    },
    PresetInfo {
        name: "bo-validation",
        summary: "closed-form travelling wave of the pure nonlocal equation, both steppers",
    },
    PresetInfo {
        name: "benjamin-gamma05-validation",
        summary: "generated gamma = 0.5 wave tracked by both steppers to T = 100",
    },
    PresetInfo {
        name: "gaussian-resolution",
        summary: "Gaussian hump resolving into solitary waves plus a dispersive tail",
    },
    PresetInfo {
        name: "soliton-families",
        summary: "single- and multi-pulse solitary-wave profiles across gamma",
    },
    PresetInfo {
        name: "propagation-suite",
        summary: "long-time propagation of generated waves with invariant tracking",
    },
    PresetInfo {
        name: "bo-collision",
        summary: "clean overtaking collision of two closed-form nonlocal-equation waves",
    },
    PresetInfo {
        name: "collision-g01-045-075",
        summary: "overtaking collision, gamma = 0.1, speeds 0.45 and 0.75",
    },
    PresetInfo {
        name: "collision-g01-025-085",
        summary: "overtaking collision, gamma = 0.1, speeds 0.25 and 0.85",
    },
    PresetInfo {
        name: "collision-g099",
        summary: "overtaking collision, gamma = 0.99, speeds 0.45 and 0.75",
    },
    PresetInfo {
        name: "collision-twopulse",
        summary: "two-pulse wave overtaken by collision with a single pulse, gamma = 0.5",
    },
    PresetInfo {
        name: "perturb-single-g05",
        summary: "single pulse, gamma = 0.5, multiplied by 1.1; settles to a deeper pulse",
    },
    PresetInfo {
        name: "perturb-single-g099",
        summary: "single pulse, gamma = 0.99, multiplied by 1.2; long radiating transient",
    },
    PresetInfo {
        name: "perturb-twopulse-small",
        summary: "two-pulse wave under a small asymmetric perturbation; peaks dance",
    },
    PresetInfo {
        name: "perturb-twopulse-large",
        summary: "two-pulse wave under a large asymmetric perturbation; resolves into pulses",
    },
    PresetInfo {
        name: "depression-wave",
        summary: "depression-branch wave; travels unchanged then loses shape",
    },
];

fn round_even(x: f64) -> usize {
    let n = x.round() as usize;
    if n % 2 == 0 {
        n.max(2)
    } else {
        n + 1
    }
}

/// Snap a final time to an integer number of steps.
fn snap_time(final_time: f64, step: f64) -> f64 {
    let m = (final_time / step).round().max(1.0);
    m * step
}

struct ScaledDomain {
    half_length: f64,
    intervals: usize,
    final_time: f64,
}

/// Shrink domain, grid, and horizon by `scale`, keeping mesh and step.
fn scaled(half_length: f64, intervals: usize, final_time: f64, step: f64, scale: f64) -> ScaledDomain {
    ScaledDomain {
        half_length: half_length * scale,
        intervals: round_even(intervals as f64 * scale),
        final_time: snap_time(final_time * scale, step),
    }
}

fn stride_for(final_time: f64, step: f64, snapshots: usize) -> usize {
    let steps = (final_time / step).round() as usize;
    (steps / snapshots.max(1)).max(1)
}

fn run_config(
    params: (f64, f64, f64, f64),
    half_length: f64,
    intervals: usize,
    step: f64,
    final_time: f64,
    scheme: Scheme,
    initial: InitialCondition,
    stride: usize,
) -> RunConfig {
    RunConfig {
        equation: EquationSection {
            alpha: params.0,
            beta: params.1,
            gamma: params.2,
            delta: params.3,
        },
        domain: DomainSection {
            half_length,
            intervals,
        },
        time: TimeSection {
            step,
            final_time,
        },
        solver: SolverSection {
            scheme,
            tolerance: None,
            max_iterations: None,
        },
        initial,
        forcing: None,
        output: OutputSection {
            directory: None,
            snapshot_stride: stride,
        },
    }
}

/// Build the plan for a named preset at the given scale.
pub fn build(name: &str, scale: f64) -> Result<PresetPlan> {
    if !(scale > 0.0 && scale <= 1.0) {
        return Err(SolverError::Config(format!(
            "scale must be in (0, 1], got {scale}"
        )));
    }
    let plan = match name {
        "table1" => PresetPlan::Table(ConvergenceTable::SpatialHybrid),
        "table2" => PresetPlan::Table(ConvergenceTable::TemporalHybrid),
        "table3" => PresetPlan::Table(ConvergenceTable::TemporalNonlocal),
        "table4" => PresetPlan::Table(ConvergenceTable::TemporalSpectral),
        "bo-validation" => {
            let ic = InitialCondition::BoWave {
                speeds: vec![0.25],
                offsets: vec![0.0],
            };
            // the periodic closed-form wave needs c_s L > pi, so scale only
            // shortens the horizon here
            let t = snap_time(100.0 * scale, 0.01);
            let hybrid = run_config(
                (0.0, 1.0, 1.0, 0.0),
                15.0,
                256,
                0.01,
                t,
                Scheme::Hybrid,
                ic.clone(),
                stride_for(t, 0.01, 100),
            );
            let ts = snap_time(100.0 * scale, 0.02);
            let spectral = run_config(
                (0.0, 1.0, 1.0, 0.0),
                15.0,
                1024,
                0.02,
                ts,
                Scheme::Spectral,
                ic,
                stride_for(ts, 0.02, 100),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![],
                runs: vec![
                    LabeledRun {
                        label: "hybrid-n256".into(),
                        config: hybrid,
                        reference_speed: Some(0.25),
                    },
                    LabeledRun {
                        label: "spectral-n1024".into(),
                        config: spectral,
                        reference_speed: Some(0.25),
                    },
                ],
            })
        }
        "benjamin-gamma05-validation" => {
            let dh = scaled(128.0, 2048, 100.0, 0.01, scale);
            let ds = scaled(128.0, 256, 100.0, 0.01, scale);
            let wave_fine = WaveJob::single("wave-g05-n2048.profile", dh.half_length, dh.intervals, 0.5, 0.75);
            let wave_coarse = WaveJob::single("wave-g05-n256.profile", ds.half_length, ds.intervals, 0.5, 0.75);
            let profile_ic = |file: &str| InitialCondition::Profile {
                paths: vec![file.into()],
                offsets: vec![0.0],
                scales: vec![1.0],
            };
            let hybrid = run_config(
                (1.0, 1.0, 0.5, 1.0),
                dh.half_length,
                dh.intervals,
                0.01,
                dh.final_time,
                Scheme::Hybrid,
                profile_ic(&wave_fine.file),
                stride_for(dh.final_time, 0.01, 50),
            );
            let spectral = run_config(
                (1.0, 1.0, 0.5, 1.0),
                ds.half_length,
                ds.intervals,
                0.01,
                ds.final_time,
                Scheme::Spectral,
                profile_ic(&wave_coarse.file),
                stride_for(ds.final_time, 0.01, 50),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![wave_fine, wave_coarse],
                runs: vec![
                    LabeledRun {
                        label: format!("hybrid-n{}", dh.intervals),
                        config: hybrid,
                        reference_speed: Some(0.75),
                    },
                    LabeledRun {
                        label: format!("spectral-n{}", ds.intervals),
                        config: spectral,
                        reference_speed: Some(0.75),
                    },
                ],
            })
        }
        "gaussian-resolution" => {
            let d = scaled(300.0, 6000, 100.0, 0.01, scale);
            let config = run_config(
                (0.0, 1.0, -1.0, -1.0),
                d.half_length,
                d.intervals,
                0.01,
                d.final_time,
                Scheme::Spectral,
                InitialCondition::Gaussian {
                    amplitude: 2.0,
                    width: 4.0,
                },
                stride_for(d.final_time, 0.01, 100),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![],
                runs: vec![LabeledRun {
                    label: format!("spectral-n{}", d.intervals),
                    config,
                    reference_speed: None,
                }],
            })
        }
        "soliton-families" => {
            let d = scaled(256.0, 4096, 1.0, 1.0, scale);
            let mut jobs = Vec::new();
            for gamma in [0.1, 0.5, 0.9, 0.95, 0.99] {
                jobs.push(WaveJob::single(
                    &format!("single-g{}.profile", gamma_tag(gamma)),
                    d.half_length,
                    d.intervals,
                    gamma,
                    0.75,
                ));
            }
            for gamma in [0.1, 0.5, 0.9] {
                jobs.push(WaveJob {
                    file: format!("twopulse-g{}.profile", gamma_tag(gamma)),
                    half_length: d.half_length,
                    intervals: d.intervals,
                    gamma,
                    speed: 0.75,
                    seed_offsets: two_pulse_seed(),
                    depression: false,
                });
                jobs.push(WaveJob {
                    file: format!("threepulse-g{}.profile", gamma_tag(gamma)),
                    half_length: d.half_length,
                    intervals: d.intervals,
                    gamma,
                    speed: 0.75,
                    seed_offsets: three_pulse_seed(),
                    depression: false,
                });
            }
            PresetPlan::WaveSuite(jobs)
        }
        "propagation-suite" => {
            let d = scaled(256.0, 4096, 300.0, 0.02, scale);
            let mut waves = Vec::new();
            let mut runs = Vec::new();
            let mut push = |file: String, seed_offsets: Vec<f64>, gamma: f64, label: String| {
                waves.push(WaveJob {
                    file: file.clone(),
                    half_length: d.half_length,
                    intervals: d.intervals,
                    gamma,
                    speed: 0.75,
                    seed_offsets,
                    depression: false,
                });
                let config = run_config(
                    (1.0, 1.0, gamma, 1.0),
                    d.half_length,
                    d.intervals,
                    0.02,
                    d.final_time,
                    Scheme::Hybrid,
                    InitialCondition::Profile {
                        paths: vec![file.into()],
                        offsets: vec![0.0],
                        scales: vec![1.0],
                    },
                    stride_for(d.final_time, 0.02, 60),
                );
                runs.push(LabeledRun {
                    label,
                    config,
                    reference_speed: Some(0.75),
                });
            };
            for gamma in [0.1, 0.5, 0.9, 0.95, 0.99] {
                let tag = gamma_tag(gamma);
                push(
                    format!("single-g{tag}.profile"),
                    vec![0.0],
                    gamma,
                    format!("single-g{tag}"),
                );
            }
            push(
                "twopulse-g05.profile".into(),
                two_pulse_seed(),
                0.5,
                "twopulse-g05".into(),
            );
            push(
                "threepulse-g05.profile".into(),
                three_pulse_seed(),
                0.5,
                "threepulse-g05".into(),
            );
            PresetPlan::Experiment(ExperimentPlan { waves, runs })
        }
        "bo-collision" => {
            let h = 512.0 / 4096.0;
            let k = h / 20.0;
            let d = scaled(256.0, 4096, 400.0, k, scale);
            let config = run_config(
                (1.0, 1.0, 1.0, 0.0),
                d.half_length,
                d.intervals,
                k,
                d.final_time,
                Scheme::Hybrid,
                InitialCondition::BoWave {
                    speeds: vec![1.0, 0.25],
                    offsets: vec![-100.0 * scale, 100.0 * scale],
                },
                stride_for(d.final_time, k, 100),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![],
                runs: vec![LabeledRun {
                    label: format!("hybrid-n{}", d.intervals),
                    config,
                    reference_speed: None,
                }],
            })
        }
        "collision-g01-045-075" => collision_plan(0.1, 0.45, 0.75, 3000.0, scale),
        "collision-g01-025-085" => collision_plan(0.1, 0.25, 0.85, 1500.0, scale),
        "collision-g099" => collision_plan(0.99, 0.45, 0.75, 3000.0, scale),
        "collision-twopulse" => {
            // slow single pulse ahead at +256, fast two-pulse wave behind at -256
            let d = scaled(512.0, 8192, 3000.0, 0.02, scale);
            let slow = WaveJob::single("single-g05-c045.profile", d.half_length, d.intervals, 0.5, 0.45);
            let fast = WaveJob {
                file: "twopulse-g05-c075.profile".into(),
                half_length: d.half_length,
                intervals: d.intervals,
                gamma: 0.5,
                speed: 0.75,
                seed_offsets: two_pulse_seed(),
                depression: false,
            };
            let config = run_config(
                (1.0, 1.0, 0.5, 1.0),
                d.half_length,
                d.intervals,
                0.02,
                d.final_time,
                Scheme::Hybrid,
                InitialCondition::Profile {
                    paths: vec![slow.file.clone().into(), fast.file.clone().into()],
                    offsets: vec![256.0 * scale, -256.0 * scale],
                    scales: vec![1.0, 1.0],
                },
                stride_for(d.final_time, 0.02, 100),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![slow, fast],
                runs: vec![LabeledRun {
                    label: format!("hybrid-n{}", d.intervals),
                    config,
                    reference_speed: None,
                }],
            })
        }
        "perturb-single-g05" => perturb_single_plan(0.5, 1.1, 2048.0, 32768 * 2, 1000.0, scale),
        "perturb-single-g099" => perturb_single_plan(0.99, 1.2, 1024.0, 32768, 1000.0, scale),
        "perturb-twopulse-small" => perturb_twopulse_plan(0.05, scale),
        "perturb-twopulse-large" => perturb_twopulse_plan(0.4, scale),
        "depression-wave" => {
            let d = scaled(1024.0, 16384, 1120.0, 0.02, scale);
            let wave = WaveJob {
                file: "depression-g094.profile".into(),
                half_length: d.half_length,
                intervals: d.intervals,
                gamma: 0.94,
                speed: 0.9,
                seed_offsets: vec![0.0],
                depression: true,
            };
            let config = run_config(
                (1.4, -1.0, 0.94, 0.5),
                d.half_length,
                d.intervals,
                0.02,
                d.final_time,
                Scheme::Hybrid,
                InitialCondition::Profile {
                    paths: vec![wave.file.clone().into()],
                    offsets: vec![0.0],
                    scales: vec![1.0],
                },
                stride_for(d.final_time, 0.02, 100),
            );
            PresetPlan::Experiment(ExperimentPlan {
                waves: vec![wave],
                runs: vec![LabeledRun {
                    label: format!("hybrid-n{}", d.intervals),
                    config,
                    reference_speed: None,
                }],
            })
        }
        other => {
            return Err(SolverError::Config(format!(
                "unknown preset '{other}'; see list-presets"
            )))
        }
    };
    Ok(plan)
}

fn gamma_tag(gamma: f64) -> String {
    format!("{gamma}").replace("0.", "0").replace('.', "")
}

/// Seed pulse centers for two-pulse continuation.
pub fn two_pulse_seed() -> Vec<f64> {
    vec![-4.0, 4.0]
}

/// Seed pulse centers for three-pulse continuation.
pub fn three_pulse_seed() -> Vec<f64> {
    vec![-8.0, 0.0, 8.0]
}

fn collision_plan(gamma: f64, slow: f64, fast: f64, final_time: f64, scale: f64) -> PresetPlan {
    let d = scaled(512.0, 8192, final_time, 0.02, scale);
    let tag = gamma_tag(gamma);
    let slow_job = WaveJob::single(
        &format!("single-g{tag}-c{}.profile", speed_tag(slow)),
        d.half_length,
        d.intervals,
        gamma,
        slow,
    );
    let fast_job = WaveJob::single(
        &format!("single-g{tag}-c{}.profile", speed_tag(fast)),
        d.half_length,
        d.intervals,
        gamma,
        fast,
    );
    let config = run_config(
        (1.0, 1.0, gamma, 1.0),
        d.half_length,
        d.intervals,
        0.02,
        d.final_time,
        Scheme::Hybrid,
        InitialCondition::Profile {
            paths: vec![slow_job.file.clone().into(), fast_job.file.clone().into()],
            offsets: vec![256.0 * scale, -256.0 * scale],
            scales: vec![1.0, 1.0],
        },
        stride_for(d.final_time, 0.02, 100),
    );
    PresetPlan::Experiment(ExperimentPlan {
        waves: vec![slow_job, fast_job],
        runs: vec![LabeledRun {
            label: format!("hybrid-n{}", d.intervals),
            config,
            reference_speed: None,
        }],
    })
}

fn speed_tag(speed: f64) -> String {
    format!("{speed}").replace("0.", "0")
}

fn perturb_single_plan(
    gamma: f64,
    factor: f64,
    half_length: f64,
    intervals: usize,
    final_time: f64,
    scale: f64,
) -> PresetPlan {
    let d = scaled(half_length, intervals, final_time, 0.02, scale);
    let tag = gamma_tag(gamma);
    let wave = WaveJob::single(
        &format!("single-g{tag}.profile"),
        d.half_length,
        d.intervals,
        gamma,
        0.75,
    );
    let config = run_config(
        (1.0, 1.0, gamma, 1.0),
        d.half_length,
        d.intervals,
        0.02,
        d.final_time,
        Scheme::Hybrid,
        InitialCondition::Perturbed {
            path: wave.file.clone().into(),
            mode: PerturbationMode::Multiplicative,
            factor,
        },
        stride_for(d.final_time, 0.02, 100),
    );
    PresetPlan::Experiment(ExperimentPlan {
        waves: vec![wave],
        runs: vec![LabeledRun {
            label: format!("hybrid-n{}", d.intervals),
            config,
            reference_speed: None,
        }],
    })
}

fn perturb_twopulse_plan(factor: f64, scale: f64) -> PresetPlan {
    let d = scaled(1024.0, 32768, 1000.0, 0.02, scale);
    let wave = WaveJob {
        file: "twopulse-g05.profile".into(),
        half_length: d.half_length,
        intervals: d.intervals,
        gamma: 0.5,
        speed: 0.75,
        seed_offsets: two_pulse_seed(),
        depression: false,
    };
    let config = run_config(
        (1.0, 1.0, 0.5, 1.0),
        d.half_length,
        d.intervals,
        0.02,
        d.final_time,
        Scheme::Hybrid,
        InitialCondition::Perturbed {
            path: wave.file.clone().into(),
            mode: PerturbationMode::Asymmetric,
            factor,
        },
        stride_for(d.final_time, 0.02, 100),
    );
    PresetPlan::Experiment(ExperimentPlan {
        waves: vec![wave],
        runs: vec![LabeledRun {
            label: format!("hybrid-n{}", d.intervals),
            config,
            reference_speed: None,
        }],
    })
}

/// Execute one wave job, writing the profile into `out_dir`.
pub fn execute_wave_job(job: &WaveJob, out_dir: &Path) -> Result<StoredProfile> {
    let grid = PeriodicGrid::new(job.half_length, job.intervals)?;
    let cfg = CgnConfig::default();
    let (profile, branch) = if job.depression {
        (depression_wave(&grid, job.gamma, &cfg)?, WaveBranch::Depression)
    } else {
        let params = EquationParams::new(1.0, 1.0, job.gamma, 1.0);
        let request = WaveRequest {
            params,
            speed: job.speed,
            offsets: job.seed_offsets.clone(),
            gamma_step: 0.01,
        };
        (generate_wave(&grid, &request, &cfg)?, WaveBranch::Elevation)
    };
    let stored = StoredProfile::from_nodal(
        &grid,
        profile.nodal,
        job.speed,
        job.gamma,
        branch,
        job.seed_offsets.len(),
        profile.residual,
    )?;
    write_profile(&out_dir.join(&job.file), &stored)?;
    Ok(stored)
}

/// Resolve relative profile paths inside an initial condition against `dir`.
fn anchor_paths(ic: &mut InitialCondition, dir: &Path) {
    let fix = |p: &mut std::path::PathBuf| {
        if p.is_relative() {
            *p = dir.join(&*p);
        }
    };
    match ic {
        InitialCondition::Profile { paths, .. } => paths.iter_mut().for_each(fix),
        InitialCondition::Perturbed { path, .. } => fix(path),
        _ => {}
    }
}

/// Result of executing a preset: human-readable progress lines.
#[derive(Debug, Default)]
pub struct PresetOutcome {
    pub lines: Vec<String>,
}

/// Execute a preset plan, writing all artifacts under `out_dir`.
pub fn execute_plan(plan: &PresetPlan, out_dir: &Path) -> Result<PresetOutcome> {
    std::fs::create_dir_all(out_dir).map_err(SolverError::Io)?;
    let mut outcome = PresetOutcome::default();
    match plan {
        PresetPlan::Table(kind) => {
            let table = convergence_table(*kind)?;
            let csv = table.to_csv();
            std::fs::write(out_dir.join("table.csv"), &csv).map_err(SolverError::Io)?;
            outcome.lines.push(format!(
                "wrote {} ({} rows)",
                out_dir.join("table.csv").display(),
                table.rows.len()
            ));
        }
        PresetPlan::WaveSuite(jobs) => {
            let mut summary = String::from("file,gamma,speed,pulses,residual,l2_norm,amplitude\n");
            for job in jobs {
                let stored = execute_wave_job(job, out_dir)?;
                let grid = PeriodicGrid::new(job.half_length, job.intervals)?;
                let norm = nodal_l2(&stored.nodal, grid.spacing());
                let amplitude = stored
                    .nodal
                    .iter()
                    .cloned()
                    .fold(f64::INFINITY, f64::min);
                let _ = writeln!(
                    summary,
                    "{},{},{},{},{:.16e},{:.16e},{:.16e}",
                    job.file, job.gamma, job.speed, job.seed_offsets.len(),
                    stored.residual, norm, amplitude
                );
                outcome
                    .lines
                    .push(format!("{}: residual {:.3e}", job.file, stored.residual));
            }
            std::fs::write(out_dir.join("waves.csv"), summary).map_err(SolverError::Io)?;
        }
        PresetPlan::Experiment(exp) => {
            let mut profiles = Vec::new();
            for job in &exp.waves {
                let stored = execute_wave_job(job, out_dir)?;
                outcome
                    .lines
                    .push(format!("{}: residual {:.3e}", job.file, stored.residual));
                profiles.push(stored);
            }
            for run in &exp.runs {
                let mut config = run.config.clone();
                anchor_paths(&mut config.initial, out_dir);
                config.validate()?;
                let report = execute(&config)?;
                let dir = out_dir.join(&run.label);
                write_artifacts(&report, &dir)?;
                outcome.lines.push(format!(
                    "{}: {} steps, {} snapshots",
                    run.label,
                    config.time.steps(),
                    report.snapshots.len()
                ));
                if let Some(speed) = run.reference_speed {
                    let errs = tracking_errors(&report, speed, &profiles, &config)?;
                    std::fs::write(dir.join("tracking.csv"), errs.clone())
                        .map_err(SolverError::Io)?;
                    outcome.lines.push(format!("{}: {}", run.label, errs.lines().nth(1).unwrap_or("")));
                }
            }
        }
    }
    Ok(outcome)
}

/// Shape/phase/L2 tracking errors of a run whose initial condition is a
/// travelling wave of known speed.
fn tracking_errors(
    report: &RunReport,
    speed: f64,
    profiles: &[StoredProfile],
    config: &RunConfig,
) -> Result<String> {
    // the profile matching the run grid, or the initial snapshot itself
    let grid = &report.grid;
    let stored = profiles
        .iter()
        .find(|p| p.grid.intervals() == grid.intervals() && p.grid.half_length() == grid.half_length())
        .cloned();
    let stored = match stored {
        Some(p) => p,
        None => StoredProfile::from_nodal(
            grid,
            report.snapshots[0].values.clone(),
            speed,
            config.equation.gamma,
            WaveBranch::Elevation,
            1,
            f64::NAN,
        )?,
    };
    let errs = travelling_wave_errors(report, &stored, speed)?;
    Ok(format!(
        "max_l2,max_h1,shape_error,phase_error\n{:.16e},{:.16e},{:.16e},{:.16e}\n",
        errs.max_l2, errs.max_h1, errs.shape_error, errs.phase_error
    ))
}

/// One row of a convergence table.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub intervals: usize,
    pub steps: usize,
    pub linf: f64,
    pub linf_rate: Option<f64>,
    pub l2: f64,
    pub l2_rate: Option<f64>,
}

/// A computed convergence table.
#[derive(Debug, Clone)]
pub struct TableReport {
    pub kind: ConvergenceTable,
    pub rows: Vec<TableRow>,
}

impl TableReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("intervals,steps,linf_error,linf_rate,l2_error,l2_rate\n");
        for r in &self.rows {
            let fmt_rate = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{:.16e},{},{:.16e},{}",
                r.intervals,
                r.steps,
                r.linf,
                fmt_rate(r.linf_rate),
                r.l2,
                fmt_rate(r.l2_rate)
            );
        }
        out
    }
}

/// Parameters of the manufactured-solution test problem.
pub fn manufactured_params() -> (f64, f64, f64, f64) {
    (0.0, 1.0, -1.0, -0.5)
}

/// Run configuration for the forced problem with known solution
/// u(t, x) = e^t sin(pi x) on [-1, 1], integrated to T = 1.
pub fn manufactured_config(intervals: usize, steps: usize, scheme: Scheme) -> RunConfig {
    let step = 1.0 / steps as f64;
    let mut cfg = run_config(
        manufactured_params(),
        1.0,
        intervals,
        step,
        1.0,
        scheme,
        InitialCondition::Expression {
            formula: "sin(pi * x)".into(),
        },
        0,
    );
    cfg.forcing = Some(crate::config::ForcingKind::Manufactured);
    cfg.solver.max_iterations = Some(400);
    cfg
}

/// Final-time errors of a manufactured-solution run: (max nodal error,
/// normalized discrete L2 error).
pub fn final_errors_vs_exact(report: &RunReport) -> (f64, f64) {
    let grid = &report.grid;
    let last = report.final_snapshot();
    let exact: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| manufactured_solution(last.t, x))
        .collect();
    let diff: Vec<f64> = exact
        .iter()
        .zip(&last.values)
        .map(|(e, v)| v - e)
        .collect();
    let linf = diff.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let l2 = nodal_l2(&diff, grid.spacing()) / nodal_l2(&exact, grid.spacing());
    (linf, l2)
}

fn push_row(rows: &mut Vec<TableRow>, intervals: usize, steps: usize, linf: f64, l2: f64, ratio: f64) {
    let (linf_rate, l2_rate) = match rows.last() {
        Some(prev) => (
            Some((prev.linf / linf).ln() / ratio.ln()),
            Some((prev.l2 / l2).ln() / ratio.ln()),
        ),
        None => (None, None),
    };
    rows.push(TableRow {
        intervals,
        steps,
        linf,
        linf_rate,
        l2,
        l2_rate,
    });
}

/// Compute a convergence table.
pub fn convergence_table(kind: ConvergenceTable) -> Result<TableReport> {
    let mut rows = Vec::new();
    match kind {
        ConvergenceTable::SpatialHybrid => {
            // 8 cells is the coarsest mesh the banded spline solver accepts
            for intervals in [8usize, 16, 32, 64, 128, 256] {
                let report = execute(&manufactured_config(intervals, 1000, Scheme::Hybrid))?;
                let (linf, l2) = final_errors_vs_exact(&report);
                push_row(&mut rows, intervals, 1000, linf, l2, 2.0);
            }
        }
        ConvergenceTable::TemporalHybrid => {
            for n in [20usize, 40, 80, 160, 320, 640] {
                let report = execute(&manufactured_config(n, n, Scheme::Hybrid))?;
                let (linf, l2) = final_errors_vs_exact(&report);
                push_row(&mut rows, n, n, linf, l2, 2.0);
            }
        }
        ConvergenceTable::TemporalSpectral => {
            for steps in [400usize, 800, 1600] {
                let report = execute(&manufactured_config(100, steps, Scheme::Spectral))?;
                let (linf, l2) = final_errors_vs_exact(&report);
                push_row(&mut rows, 100, steps, linf, l2, 2.0);
            }
        }
        ConvergenceTable::TemporalNonlocal => {
            // travelling wave of the pure nonlocal equation on [-15, 15];
            // errors against a reference run with a much smaller step, which
            // cancels the shared spatial error
            let intervals = 600;
            let base = |steps: usize| {
                let step = 1.0 / steps as f64;
                run_config(
                    (0.0, 1.0, 1.0, 0.0),
                    15.0,
                    intervals,
                    step,
                    1.0,
                    Scheme::Hybrid,
                    InitialCondition::BoWave {
                        speeds: vec![0.25],
                        offsets: vec![0.0],
                    },
                    0,
                )
            };
            let reference = execute(&base(10_000))?;
            let ref_final = &reference.final_snapshot().values;
            let norm = reference.initial_norm;
            let h = reference.grid.spacing();
            for steps in [1250usize, 1600, 2000, 2500, 3200, 4000] {
                let report = execute(&base(steps))?;
                let diff: Vec<f64> = report
                    .final_snapshot()
                    .values
                    .iter()
                    .zip(ref_final)
                    .map(|(a, b)| a - b)
                    .collect();
                let linf = diff.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
                let l2 = nodal_l2(&diff, h) / norm;
                let ratio = if let Some(prev) = rows.last() {
                    steps as f64 / prev.steps as f64
                } else {
                    1.0
                };
                push_row(&mut rows, intervals, steps, linf, l2, ratio);
            }
        }
    }
    Ok(TableReport { kind, rows })
}

/// Assert the locked parameters of every preset; returns one line per check.
pub fn self_test() -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let mut check = |name: &str, ok: bool, what: &str| {
        lines.push(format!(
            "{}: {} ({what})",
            name,
            if ok { "ok" } else { "MISMATCH" }
        ));
        if ok {
            Ok(())
        } else {
            Err(SolverError::Config(format!(
                "preset {name} drifted: {what}"
            )))
        }
    };

    for info in CATALOGUE {
        build(info.name, 1.0)?;
    }
    check("catalogue", CATALOGUE.len() == 19, "19 presets")?;

    let exp = |name: &str| -> Result<ExperimentPlan> {
        match build(name, 1.0)? {
            PresetPlan::Experiment(e) => Ok(e),
            _ => Err(SolverError::Config(format!("{name} is not an experiment"))),
        }
    };

    let bo = exp("bo-validation")?;
    let c = &bo.runs[0].config;
    check(
        "bo-validation",
        c.domain.half_length == 15.0
            && c.domain.intervals == 256
            && c.time.step == 0.01
            && c.time.final_time == 100.0
            && c.equation.alpha == 0.0
            && c.equation.beta == 1.0
            && c.equation.gamma == 1.0
            && c.equation.delta == 0.0,
        "L=15 N=256 k=0.01 T=100, pure nonlocal coefficients",
    )?;

    let val = exp("benjamin-gamma05-validation")?;
    check(
        "benjamin-gamma05-validation",
        val.runs[0].config.domain.intervals == 2048
            && val.runs[1].config.domain.intervals == 256
            && val.runs[0].config.domain.half_length == 128.0
            && val.runs[0].config.time.step == 0.01
            && val.runs[0].config.equation.gamma == 0.5
            && val.runs[0].reference_speed == Some(0.75),
        "L=128, hybrid N=2048 / spectral N=256, k=1e-2, gamma=0.5, c=0.75",
    )?;

    let gauss = exp("gaussian-resolution")?;
    let c = &gauss.runs[0].config;
    check(
        "gaussian-resolution",
        c.domain.half_length == 300.0
            && c.domain.intervals == 6000
            && c.time.step == 0.01
            && c.time.final_time == 100.0
            && matches!(
                c.initial,
                InitialCondition::Gaussian {
                    amplitude,
                    width
                } if amplitude == 2.0 && width == 4.0
            ),
        "L=300 N=6000 k=0.01 T=100, 2 exp(-(x/4)^2)",
    )?;

    let boc = exp("bo-collision")?;
    let c = &boc.runs[0].config;
    check(
        "bo-collision",
        c.domain.half_length == 256.0
            && c.domain.intervals == 4096
            && (c.time.step - 0.125 / 20.0).abs() < 1e-15
            && c.time.final_time == 400.0
            && matches!(
                &c.initial,
                InitialCondition::BoWave { speeds, offsets }
                    if speeds == &[1.0, 0.25] && offsets == &[-100.0, 100.0]
            ),
        "L=256 N=4096 k=h/20 T=400, waves c=1 at -100 and c=0.25 at +100",
    )?;

    for (name, gamma, speeds, t) in [
        ("collision-g01-045-075", 0.1, (0.45, 0.75), 3000.0),
        ("collision-g01-025-085", 0.1, (0.25, 0.85), 1500.0),
        ("collision-g099", 0.99, (0.45, 0.75), 3000.0),
    ] {
        let plan = exp(name)?;
        let c = &plan.runs[0].config;
        check(
            name,
            c.domain.half_length == 512.0
                && c.domain.intervals == 8192
                && c.time.step == 0.02
                && c.time.final_time == t
                && c.equation.gamma == gamma
                && plan.waves[0].speed == speeds.0
                && plan.waves[1].speed == speeds.1,
            "L=512 h=0.125 k=0.02, slow wave at +256, fast at -256",
        )?;
    }

    let tp = exp("collision-twopulse")?;
    check(
        "collision-twopulse",
        tp.waves[0].speed == 0.45
            && tp.waves[1].speed == 0.75
            && tp.waves[1].seed_offsets.len() == 2
            && tp.runs[0].config.equation.gamma == 0.5
            && tp.runs[0].config.time.final_time == 3000.0,
        "gamma=0.5, two-pulse c=0.75 overtakes single c=0.45",
    )?;

    let p1 = exp("perturb-single-g05")?;
    let c = &p1.runs[0].config;
    check(
        "perturb-single-g05",
        c.domain.half_length == 2048.0
            && c.domain.intervals == 65536
            && c.time.step == 0.02
            && matches!(
                &c.initial,
                InitialCondition::Perturbed { mode: PerturbationMode::Multiplicative, factor, .. }
                    if *factor == 1.1
            ),
        "L=2048 h=0.0625 k=0.02, multiplicative r=1.1",
    )?;

    let p2 = exp("perturb-single-g099")?;
    let c = &p2.runs[0].config;
    check(
        "perturb-single-g099",
        c.domain.half_length == 1024.0
            && c.domain.intervals == 32768
            && c.time.final_time == 1000.0
            && matches!(
                &c.initial,
                InitialCondition::Perturbed { mode: PerturbationMode::Multiplicative, factor, .. }
                    if *factor == 1.2
            ),
        "L=1024 h=0.0625 k=0.02 T=1000, multiplicative r=1.2",
    )?;

    for (name, r) in [("perturb-twopulse-small", 0.05), ("perturb-twopulse-large", 0.4)] {
        let p = exp(name)?;
        let c = &p.runs[0].config;
        check(
            name,
            c.domain.half_length == 1024.0
                && c.domain.intervals == 32768
                && c.time.final_time == 1000.0
                && matches!(
                    &c.initial,
                    InitialCondition::Perturbed { mode: PerturbationMode::Asymmetric, factor, .. }
                        if *factor == r
                ),
            "L=1024 h=0.0625 k=0.02 T=1000, asymmetric perturbation",
        )?;
    }

    let dep = exp("depression-wave")?;
    let c = &dep.runs[0].config;
    check(
        "depression-wave",
        c.equation.alpha == 1.4
            && c.equation.beta == -1.0
            && c.equation.gamma == 0.94
            && c.equation.delta == 0.5
            && c.domain.half_length == 1024.0
            && c.domain.intervals == 16384
            && c.time.final_time == 1120.0
            && dep.waves[0].depression
            && dep.waves[0].gamma == 0.94,
        "coefficients (1.4, -1, 0.94, 0.5), L=1024 N=16384 k=0.02 T=1120",
    )?;

    let prop = exp("propagation-suite")?;
    check(
        "propagation-suite",
        prop.runs.len() == 7
            && prop.runs.iter().all(|r| {
                r.config.domain.half_length == 256.0
                    && r.config.domain.intervals == 4096
                    && r.config.time.final_time == 300.0
                    && r.reference_speed == Some(0.75)
            }),
        "L=256 N=4096 T=300, five single-pulse gammas plus two- and three-pulse",
    )?;

    match build("soliton-families", 1.0)? {
        PresetPlan::WaveSuite(jobs) => check(
            "soliton-families",
            jobs.len() == 11 && jobs.iter().all(|j| j.speed == 0.75),
            "five singles, three two-pulse, three three-pulse, all c=0.75",
        )?,
        _ => check("soliton-families", false, "expected a wave suite")?,
    }

    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_self_test_passes() {
        let lines = self_test().unwrap();
        assert!(lines.iter().all(|l| l.contains("ok")));
    }

    #[test]
    fn unknown_preset_is_a_config_error() {
        assert!(matches!(
            build("no-such-preset", 1.0),
            Err(SolverError::Config(_))
        ));
    }

    #[test]
    fn scale_shrinks_domain_and_horizon_but_not_step() {
        let full = match build("collision-g099", 1.0).unwrap() {
            PresetPlan::Experiment(e) => e,
            _ => unreachable!(),
        };
        let small = match build("collision-g099", 0.125).unwrap() {
            PresetPlan::Experiment(e) => e,
            _ => unreachable!(),
        };
        let (f, s) = (&full.runs[0].config, &small.runs[0].config);
        assert_eq!(s.domain.half_length, f.domain.half_length * 0.125);
        assert_eq!(s.domain.intervals, f.domain.intervals / 8);
        assert_eq!(s.time.step, f.time.step);
        assert!(s.time.final_time < f.time.final_time);
        // the mesh width is preserved
        let hf = f.domain.half_length / f.domain.intervals as f64;
        let hs = s.domain.half_length / s.domain.intervals as f64;
        assert!((hf - hs).abs() < 1e-12);
    }

    #[test]
    fn scale_out_of_range_is_rejected() {
        assert!(build("bo-collision", 0.0).is_err());
        assert!(build("bo-collision", 1.5).is_err());
    }

    #[test]
    fn spectral_temporal_table_reproduces_fourth_order() {
        let table = convergence_table(ConvergenceTable::TemporalSpectral).unwrap();
        assert_eq!(table.rows.len(), 3);
        for row in &table.rows[1..] {
            let rate = row.l2_rate.unwrap();
            assert!((rate - 4.0).abs() < 0.1, "l2 rate {rate}");
        }
        // published end row: Linf 6.839e-11, L2 2.437e-11 at N=100, M=1600
        let last = table.rows.last().unwrap();
        assert!(last.l2 / 2.437e-11 < 2.0 && last.l2 / 2.437e-11 > 0.5);
    }

    #[test]
    fn table_preset_writes_csv() {
        let dir = tempfile::tempdir().unwrap();
        let plan = build("table4", 1.0).unwrap();
        let outcome = execute_plan(&plan, dir.path()).unwrap();
        assert!(!outcome.lines.is_empty());
        let csv = std::fs::read_to_string(dir.path().join("table.csv")).unwrap();
        assert!(csv.starts_with("intervals,steps,"));
        assert_eq!(csv.lines().count(), 4);
    }
}
