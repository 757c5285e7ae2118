//! Simulation runner: turns a [`RunConfig`] into a completed run with
//! deterministic artifacts.
//!
//! A run proceeds in three phases: the initial condition is assembled on
//! the configured grid, the selected stepper advances it to the final time
//! while snapshots and invariant series are collected, and the artifacts
//! are optionally written as CSV files plus a manifest that records the
//! resolved configuration, the code version, and wall-clock timings.

use crate::config::{
    ForcingKind, InitialCondition, PerturbationMode, RunConfig, Scheme,
};
use crate::diagnostics::{
    nodal_invariants, shape_phase_fit, spline_invariants, InvariantReport,
};
use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use crate::fourier::{
    fft_slot, forward_transform, inverse_transform, PeriodicGrid, SpectralField,
};
use crate::hybrid::{HybridSolver, HybridState, StepperConfig};
use crate::profile::{read_profile, StoredProfile};
use crate::spectral::{SpectralSolver, SpectralState};
use crate::spline::SplineSpace;
use crate::waves::{bo_periodic_wave, kdv_solitary_wave};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

/// One stored snapshot: time and nodal values.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Per-snapshot error record against a known reference solution.
#[derive(Debug, Clone, Copy)]
pub struct ErrorRecord {
    pub t: f64,
    /// Normalized L2 error.
    pub l2: f64,
    /// Normalized H1 error (spectrally weighted).
    pub h1: f64,
}

/// Completed run.
#[derive(Debug)]
pub struct RunReport {
    pub config: RunConfig,
    pub grid: PeriodicGrid,
    pub snapshots: Vec<Snapshot>,
    pub invariants: Vec<(f64, InvariantReport)>,
    pub errors: Vec<ErrorRecord>,
    /// Wall-clock seconds spent stepping.
    pub elapsed: f64,
    /// Initial nodal L2 norm, used for normalization.
    pub initial_norm: f64,
}

impl RunReport {
    pub fn final_snapshot(&self) -> &Snapshot {
        self.snapshots.last().expect("run stores the final state")
    }
}

/// Exact solution reproduced by the manufactured forcing.
pub fn manufactured_solution(t: f64, x: f64) -> f64 {
    t.exp() * (PI * x).sin()
}

/// Source term that makes `manufactured_solution` exact for `params` on
/// [-1, 1].
pub fn manufactured_forcing(params: &EquationParams) -> impl Fn(f64, f64) -> f64 {
    let (alpha, beta, gamma, delta) =
        (params.alpha, params.beta, params.gamma, params.delta);
    move |t: f64, x: f64| {
        let e = t.exp();
        e * (PI * x).sin()
            + alpha * PI * e * (PI * x).cos()
            + beta * PI / 2.0 * e * e * (2.0 * PI * x).sin()
            + (delta * PI.powi(3) - gamma * PI * PI) * e * (PI * x).cos()
    }
}

/// Translate (and, if needed, spectrally refine) a stored profile onto
/// `grid`, shifted by `offset`.
pub fn place_profile(
    profile: &StoredProfile,
    grid: &PeriodicGrid,
    offset: f64,
) -> Result<Vec<f64>> {
    if (profile.grid.half_length() - grid.half_length()).abs()
        > 1e-12 * grid.half_length()
    {
        return Err(SolverError::GridMismatch(format!(
            "profile domain [{:.3}] differs from run domain [{:.3}]",
            profile.grid.half_length(),
            grid.half_length()
        )));
    }
    let n_src = profile.grid.intervals();
    let n_dst = grid.intervals();
    if n_dst < n_src {
        return Err(SolverError::GridMismatch(format!(
            "cannot place an N = {n_src} profile on a coarser N = {n_dst} grid"
        )));
    }
    // zero-pad the spectrum onto the run grid and apply the translation
    // phase exp(-i kappa offset)
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n_dst];
    for slot in 0..n_src {
        let k = crate::fourier::signed_index(slot, n_src);
        if 2 * k.unsigned_abs() as usize == n_src {
            continue; // drop the source Nyquist mode
        }
        let kappa = PI * k as f64 / grid.half_length();
        let phase = Complex64::from_polar(1.0, -kappa * offset);
        coeffs[fft_slot(k, n_dst)] = profile.field.coeffs()[slot] * phase;
    }
    let field = SpectralField::new(coeffs, grid.clone())?;
    inverse_transform(&field)
}

/// Assemble the initial nodal values for a run.
pub fn build_initial(
    grid: &PeriodicGrid,
    ic: &InitialCondition,
    params: &EquationParams,
) -> Result<Vec<f64>> {
    let nodes = grid.nodes();
    match ic {
        InitialCondition::Zero => Ok(vec![0.0; nodes.len()]),
        InitialCondition::KdvSoliton { speed, offsets } => {
            let wave = kdv_solitary_wave(params, *speed)?;
            Ok(nodes
                .iter()
                .map(|&x| offsets.iter().map(|&x0| wave(grid.wrap(x - x0))).sum())
                .collect())
        }
        InitialCondition::BoWave { speeds, offsets } => {
            let mut total = vec![0.0; nodes.len()];
            for (i, &c) in speeds.iter().enumerate() {
                let wave = bo_periodic_wave(grid, c)?;
                let x0 = offsets.get(i).copied().unwrap_or(0.0);
                for (acc, &x) in total.iter_mut().zip(nodes) {
                    *acc += wave(grid.wrap(x - x0), 0.0);
                }
            }
            Ok(total)
        }
        InitialCondition::Profile {
            paths,
            offsets,
            scales,
        } => {
            let mut total = vec![0.0; nodes.len()];
            for (i, path) in paths.iter().enumerate() {
                let profile = read_profile(path)?;
                let offset = offsets.get(i).copied().unwrap_or(0.0);
                let scale = scales.get(i).copied().unwrap_or(1.0);
                let placed = place_profile(&profile, grid, offset)?;
                for (acc, v) in total.iter_mut().zip(&placed) {
                    *acc += scale * v;
                }
            }
            Ok(total)
        }
        InitialCondition::Gaussian { amplitude, width } => Ok(nodes
            .iter()
            .map(|&x| amplitude * (-(x / width).powi(2)).exp())
            .collect()),
        InitialCondition::Perturbed { path, mode, factor } => {
            let profile = read_profile(path)?;
            let placed = place_profile(&profile, grid, 0.0)?;
            Ok(nodes
                .iter()
                .zip(&placed)
                .map(|(&x, &v)| match mode {
                    PerturbationMode::Multiplicative => factor * v,
                    PerturbationMode::Asymmetric => (factor * (x.tanh() + 1.0) + 1.0) * v,
                })
                .collect())
        }
        InitialCondition::Expression { formula } => {
            let expr: meval::Expr = formula
                .parse()
                .map_err(|e| SolverError::Config(format!("initial.formula: {e}")))?;
            let f = expr
                .bind("x")
                .map_err(|e| SolverError::Config(format!("initial.formula: {e}")))?;
            Ok(nodes.iter().map(|&x| f(x)).collect())
        }
    }
}

fn snapshot_times(steps: usize, stride: usize) -> impl Fn(usize) -> bool {
    move |step: usize| step == steps || (stride > 0 && step % stride == 0)
}

/// Execute a validated configuration.
pub fn execute(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let params = config.equation.params();
    let grid = PeriodicGrid::new(config.domain.half_length, config.domain.intervals)?;
    let initial = build_initial(&grid, &config.initial, &params)?;
    let steps = config.time.steps();
    let stride = config.output.snapshot_stride;
    let want = snapshot_times(steps, stride);
    let k = config.time.step;

    let forcing_fn = config
        .forcing
        .map(|ForcingKind::Manufactured| manufactured_forcing(&params));
    let forcing: Option<&dyn Fn(f64, f64) -> f64> =
        forcing_fn.as_ref().map(|f| f as &dyn Fn(f64, f64) -> f64);

    let mut snapshots = Vec::new();
    let mut invariants = Vec::new();
    let started = Instant::now();

    match config.solver.scheme {
        Scheme::Hybrid => {
            let space = SplineSpace::new(&grid, 4)?;
            let mut stepper_cfg = StepperConfig::default();
            if let Some(tol) = config.solver.tolerance {
                stepper_cfg.tolerance = tol;
            }
            if let Some(cap) = config.solver.max_iterations {
                stepper_cfg.max_iterations = cap;
            }
            let solver = HybridSolver::new(space.clone(), params, k, stepper_cfg)?;
            let field = forward_transform(&initial, &grid)?;
            let coeffs = space.project(|x| field.evaluate(x).re)?;
            let mut record = |t: f64, c: &[f64]| {
                snapshots.push(Snapshot {
                    t,
                    values: space.node_values(c),
                });
                invariants.push((t, spline_invariants(&space, &params, c)));
            };
            record(0.0, &coeffs);
            let mut state = HybridState::new(0.0, coeffs);
            let mut failure = None;
            solver.run(&mut state, steps, forcing, |step, t, c| {
                if want(step) {
                    snapshots.push(Snapshot {
                        t,
                        values: space.node_values(c),
                    });
                    invariants.push((t, spline_invariants(&space, &params, c)));
                }
                if !state_is_finite(c) {
                    failure = Some(step);
                }
            })?;
            if let Some(step) = failure {
                return Err(SolverError::Divergence {
                    step,
                    context: "non-finite state".into(),
                });
            }
        }
        Scheme::Spectral => {
            let solver = SpectralSolver::new(&grid, params, k)?;
            let field = forward_transform(&initial, &grid)?;
            let mut record = |t: f64, f: &SpectralField| -> Result<()> {
                let values = inverse_transform(f)?;
                invariants.push((t, nodal_invariants(&grid, &params, &values)));
                snapshots.push(Snapshot { t, values });
                Ok(())
            };
            record(0.0, &field)?;
            let mut state = SpectralState::new(0.0, field);
            let mut io_error = None;
            solver.run(&mut state, steps, forcing, |step, t, f| {
                if want(step) && io_error.is_none() {
                    if let Err(e) = record(t, f) {
                        io_error = Some(e);
                    }
                }
            })?;
            if let Some(e) = io_error {
                return Err(e);
            }
        }
    }
    let elapsed = started.elapsed().as_secs_f64();

    let h = grid.spacing();
    let initial_norm = crate::diagnostics::nodal_l2(&snapshots[0].values, h);

    // error series against built-in references
    let mut errors = Vec::new();
    if config.forcing == Some(ForcingKind::Manufactured) {
        for snap in &snapshots {
            errors.push(reference_errors(&grid, snap, initial_norm, |x| {
                manufactured_solution(snap.t, x)
            })?);
        }
    }

    let invariants = invariants
        .into_iter()
        .map(|(t, r)| r.map(|inv| (t, inv)))
        .collect::<Result<Vec<_>>>()?;

    Ok(RunReport {
        config: config.clone(),
        grid,
        snapshots,
        invariants,
        errors,
        elapsed,
        initial_norm,
    })
}

fn state_is_finite(c: &[f64]) -> bool {
    c.iter().all(|v| v.is_finite())
}

/// L2/H1 errors of a snapshot against a pointwise reference.
pub fn reference_errors(
    grid: &PeriodicGrid,
    snap: &Snapshot,
    norm: f64,
    reference: impl Fn(f64) -> f64,
) -> Result<ErrorRecord> {
    let diff: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(&snap.values)
        .map(|(&x, &v)| v - reference(x))
        .collect();
    let l2 = crate::diagnostics::nodal_l2(&diff, grid.spacing()) / norm;
    let field = forward_transform(&diff, grid)?;
    let mut h1 = 0.0;
    for slot in 0..grid.intervals() {
        let kappa = grid.kappa()[slot];
        h1 += (1.0 + kappa * kappa) * field.coeffs()[slot].norm_sqr();
    }
    let h1 = (2.0 * grid.half_length() * h1).sqrt() / norm;
    Ok(ErrorRecord { t: snap.t, l2, h1 })
}

fn fmt_row(values: impl IntoIterator<Item = f64>) -> String {
    let mut row = String::new();
    for (i, v) in values.into_iter().enumerate() {
        if i > 0 {
            row.push(',');
        }
        let _ = write!(row, "{v:.16e}");
    }
    row
}

/// Write the CSV artifacts and manifest for a completed run.
pub fn write_artifacts(report: &RunReport, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)
        .map_err(|e| SolverError::Io(std::io::Error::new(e.kind(), format!("creating {}: {e}", dir.display()))))?;
    let write = |name: &str, contents: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| SolverError::Io(std::io::Error::new(e.kind(), format!("writing {}: {e}", path.display()))))
    };

    let mut manifest = String::new();
    let _ = writeln!(manifest, "# run manifest");
    let _ = writeln!(manifest, "version = \"{}\"", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(manifest, "elapsed_seconds = {:.6}", report.elapsed);
    let _ = writeln!(manifest, "steps = {}", report.config.time.steps());
    let _ = writeln!(manifest, "snapshots = {}", report.snapshots.len());
    let _ = writeln!(manifest, "initial_norm = {:.16e}", report.initial_norm);
    manifest.push('\n');
    manifest.push_str(&report.config.to_toml());
    write("manifest.toml", manifest)?;

    let n = report.grid.intervals();
    let mut snaps = String::from("t");
    for j in 0..n {
        let _ = write!(snaps, ",v{j}");
    }
    snaps.push('\n');
    for s in &report.snapshots {
        snaps.push_str(&fmt_row(std::iter::once(s.t).chain(s.values.iter().copied())));
        snaps.push('\n');
    }
    write("snapshots.csv", snaps)?;

    let mut inv = String::from("t,mean,momentum,energy,hamiltonian\n");
    for (t, r) in &report.invariants {
        inv.push_str(&fmt_row([*t, r.mean, r.momentum, r.energy, r.hamiltonian]));
        inv.push('\n');
    }
    write("invariants.csv", inv)?;

    if !report.errors.is_empty() {
        let mut err = String::from("t,l2,h1\n");
        for e in &report.errors {
            err.push_str(&fmt_row([e.t, e.l2, e.h1]));
            err.push('\n');
        }
        write("errors.csv", err)?;
    }
    Ok(())
}

/// Load a run directory written by [`write_artifacts`] back into a report.
pub fn read_report_dir(dir: &Path) -> Result<RunReport> {
    let read = |name: &str| -> Result<String> {
        let path = dir.join(name);
        std::fs::read_to_string(&path).map_err(|e| {
            SolverError::Io(std::io::Error::new(
                e.kind(),
                format!("reading {}: {e}", path.display()),
            ))
        })
    };
    let manifest = read("manifest.toml")?;
    let config: RunConfig = toml::from_str(&manifest)
        .map_err(|e| SolverError::Config(format!("{}: {e}", dir.join("manifest.toml").display())))?;
    config.validate()?;
    let meta: toml::Value = toml::from_str(&manifest)
        .map_err(|e| SolverError::Config(format!("manifest: {e}")))?;
    let scalar = |key: &str| -> f64 {
        meta.get(key).and_then(|v| v.as_float()).unwrap_or(f64::NAN)
    };
    let grid = PeriodicGrid::new(config.domain.half_length, config.domain.intervals)?;

    let parse_rows = |text: &str, name: &str| -> Result<Vec<Vec<f64>>> {
        text.lines()
            .skip(1)
            .filter(|l| !l.is_empty())
            .map(|line| {
                line.split(',')
                    .map(|f| {
                        f.parse::<f64>().map_err(|e| {
                            SolverError::Config(format!("{name}: bad float '{f}': {e}"))
                        })
                    })
                    .collect()
            })
            .collect()
    };

    let snapshots = parse_rows(&read("snapshots.csv")?, "snapshots.csv")?
        .into_iter()
        .map(|row| Snapshot {
            t: row[0],
            values: row[1..].to_vec(),
        })
        .collect::<Vec<_>>();
    for s in &snapshots {
        if s.values.len() != grid.intervals() {
            return Err(SolverError::Config(format!(
                "snapshots.csv: row width {} does not match N = {}",
                s.values.len(),
                grid.intervals()
            )));
        }
    }
    let invariants = parse_rows(&read("invariants.csv")?, "invariants.csv")?
        .into_iter()
        .map(|row| {
            (
                row[0],
                crate::diagnostics::InvariantReport {
                    mean: row[1],
                    momentum: row[2],
                    energy: row[3],
                    hamiltonian: row[4],
                },
            )
        })
        .collect();
    let errors = match std::fs::read_to_string(dir.join("errors.csv")) {
        Ok(text) => parse_rows(&text, "errors.csv")?
            .into_iter()
            .map(|row| ErrorRecord {
                t: row[0],
                l2: row[1],
                h1: row[2],
            })
            .collect(),
        Err(_) => Vec::new(),
    };
    Ok(RunReport {
        config,
        grid,
        snapshots,
        invariants,
        errors,
        elapsed: scalar("elapsed_seconds"),
        initial_norm: scalar("initial_norm"),
    })
}

/// Travelling-wave fidelity of a run whose initial condition is a single
/// stored profile moving at `speed`: per-snapshot L2/H1 errors against the
/// exactly translated profile, plus shape/phase errors of the final state.
#[derive(Debug, Clone, Copy)]
pub struct TravellingWaveErrors {
    pub max_l2: f64,
    pub max_h1: f64,
    pub shape_error: f64,
    pub phase_error: f64,
}

pub fn travelling_wave_errors(
    report: &RunReport,
    profile: &StoredProfile,
    speed: f64,
) -> Result<TravellingWaveErrors> {
    let grid = &report.grid;
    let placed = place_profile(profile, grid, 0.0)?;
    let reference_field = forward_transform(&placed, grid)?;
    let norm = crate::diagnostics::nodal_l2(&placed, grid.spacing());

    let mut max_l2: f64 = 0.0;
    let mut max_h1: f64 = 0.0;
    for snap in &report.snapshots {
        let rec = reference_errors(grid, snap, norm, |x| {
            reference_field.evaluate(grid.wrap(x - speed * snap.t)).re
        })?;
        max_l2 = max_l2.max(rec.l2);
        max_h1 = max_h1.max(rec.h1);
    }

    let last = report.final_snapshot();
    let fit = shape_phase_fit(
        grid.nodes(),
        &vec![grid.spacing(); grid.intervals()],
        &last.values,
        |x, order| match order {
            0 => reference_field.evaluate(grid.wrap(x)).re,
            _ => derivative_eval(&reference_field, grid.wrap(x), order),
        },
        speed,
        last.t,
    )?;
    Ok(TravellingWaveErrors {
        max_l2,
        max_h1,
        shape_error: fit.shape_error,
        phase_error: fit.phase_error,
    })
}

/// Shape/phase fit of every stored snapshot against a translating stored
/// profile; returns one (t, fit) pair per snapshot.
pub fn shape_phase_series(
    report: &RunReport,
    profile: &StoredProfile,
    speed: f64,
) -> Result<Vec<(f64, crate::diagnostics::ShapeFit)>> {
    let grid = &report.grid;
    let placed = place_profile(profile, grid, 0.0)?;
    let reference_field = forward_transform(&placed, grid)?;
    let weights = vec![grid.spacing(); grid.intervals()];
    let mut series = Vec::with_capacity(report.snapshots.len());
    for snap in &report.snapshots {
        let fit = shape_phase_fit(
            grid.nodes(),
            &weights,
            &snap.values,
            |x, order| match order {
                0 => reference_field.evaluate(grid.wrap(x)).re,
                _ => derivative_eval(&reference_field, grid.wrap(x), order),
            },
            speed,
            snap.t,
        )?;
        series.push((snap.t, fit));
    }
    Ok(series)
}

fn derivative_eval(field: &SpectralField, x: f64, order: usize) -> f64 {
    let d = crate::fourier::spectral_derivative(field, order as u32)
        .expect("derivative of a valid field");
    d.evaluate(x).re
}

/// Per-time differences between two runs on identical grids and snapshot
/// schedules.
#[derive(Debug, Clone)]
pub struct RunComparison {
    pub rows: Vec<ErrorRecord>,
    pub max_l2: f64,
    pub max_h1: f64,
}

pub fn compare_reports(a: &RunReport, b: &RunReport) -> Result<RunComparison> {
    if a.grid.intervals() != b.grid.intervals()
        || (a.grid.half_length() - b.grid.half_length()).abs() > 1e-12
    {
        return Err(SolverError::GridMismatch(
            "compared runs use different grids".into(),
        ));
    }
    if a.snapshots.len() != b.snapshots.len() {
        return Err(SolverError::GridMismatch(
            "compared runs have different snapshot schedules".into(),
        ));
    }
    let norm = a.initial_norm;
    let mut rows = Vec::with_capacity(a.snapshots.len());
    let mut max_l2: f64 = 0.0;
    let mut max_h1: f64 = 0.0;
    for (sa, sb) in a.snapshots.iter().zip(&b.snapshots) {
        if (sa.t - sb.t).abs() > 1e-9 {
            return Err(SolverError::GridMismatch(
                "snapshot times do not align".into(),
            ));
        }
        let rec = reference_errors(&a.grid, sa, norm, {
            let nodes = a.grid.nodes();
            let values = &sb.values;
            let h = a.grid.spacing();
            let x0 = nodes[0];
            move |x| {
                let idx = ((x - x0) / h).round() as usize % values.len();
                values[idx]
            }
        })?;
        max_l2 = max_l2.max(rec.l2);
        max_h1 = max_h1.max(rec.h1);
        rows.push(rec);
    }
    Ok(RunComparison {
        rows,
        max_l2,
        max_h1,
    })
}

/// Render a comparison as CSV.
pub fn comparison_csv(cmp: &RunComparison) -> String {
    let mut out = String::from("t,l2,h1\n");
    for r in &cmp.rows {
        out.push_str(&fmt_row([r.t, r.l2, r.h1]));
        out.push('\n');
    }
    let _ = writeln!(out, "max,{:.16e},{:.16e}", cmp.max_l2, cmp.max_h1);
    out
}
