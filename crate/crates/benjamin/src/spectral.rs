//! Integrating-factor pseudospectral scheme.
//!
//! The linear part `u_t = -alpha u_x + gamma H u_xx + delta u_xxx` is
//! diagonal in Fourier space with purely imaginary symbol
//! `omega(kappa) = -i (alpha kappa - gamma kappa |kappa| + delta kappa^3)`
//! and is removed exactly by the substitution `v = e^{-omega t} u_hat`.
//! The remaining nonlinearity (plus any source term) is integrated with
//! classical RK4; phases are recomputed exactly from the symbol at each
//! stage, so the linear dynamics carry no time-stepping error.

use num_complex::Complex64;

use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use crate::fourier::{
    forward_transform, inverse_transform_unchecked, signed_index, PeriodicGrid,
    SpectralField,
};
use crate::hybrid::Forcing;

/// Linear symbol per FFT slot, with the Nyquist entry zeroed to keep the
/// odd-order multipliers real-symmetric.
pub fn linear_symbol(grid: &PeriodicGrid, params: &EquationParams) -> Vec<Complex64> {
    let n = grid.intervals();
    (0..n)
        .map(|m| {
            let k = signed_index(m, n);
            if 2 * k.unsigned_abs() as usize == n {
                return Complex64::new(0.0, 0.0);
            }
            let kappa = grid.kappa()[m];
            let phase =
                params.alpha * kappa - params.gamma * kappa * kappa.abs() + params.delta * kappa.powi(3);
            Complex64::new(0.0, -phase)
        })
        .collect()
}

/// Nonlinear term `-(beta/2) (u^2)_x` plus the source, in Fourier space.
pub fn nonlinear_term(
    field: &SpectralField,
    params: &EquationParams,
    source: Option<&SpectralField>,
) -> Result<SpectralField> {
    let grid = field.grid().clone();
    let n = grid.intervals();
    let u = inverse_transform_unchecked(field);
    let squares: Vec<f64> = u.iter().map(|v| v * v).collect();
    let sq_hat = forward_transform(&squares, &grid)?;
    let mut out = SpectralField::zeros(grid.clone());
    for m in 0..n {
        let k = signed_index(m, n);
        let kappa = if 2 * k.unsigned_abs() as usize == n {
            0.0
        } else {
            grid.kappa()[m]
        };
        let mut v = -0.5 * params.beta * Complex64::new(0.0, kappa) * sq_hat.coeffs()[m];
        if let Some(s) = source {
            v += s.coeffs()[m];
        }
        out.coeffs_mut()[m] = v;
    }
    Ok(out)
}

/// State carried between spectral steps.
#[derive(Debug, Clone)]
pub struct SpectralState {
    pub t: f64,
    pub field: SpectralField,
    pub step_index: usize,
}

impl SpectralState {
    pub fn new(t0: f64, field: SpectralField) -> Self {
        Self {
            t: t0,
            field,
            step_index: 0,
        }
    }
}

/// Integrating-factor RK4 stepper with precomputed stage phases.
pub struct SpectralSolver {
    grid: PeriodicGrid,
    params: EquationParams,
    dt: f64,
    half_fwd: Vec<Complex64>,
    half_bwd: Vec<Complex64>,
    full_fwd: Vec<Complex64>,
    full_bwd: Vec<Complex64>,
}

impl SpectralSolver {
    pub fn new(grid: &PeriodicGrid, params: EquationParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(SolverError::InvalidInput("time step must be positive".into()));
        }
        let omega = linear_symbol(grid, &params);
        let phase = |scale: f64| -> Vec<Complex64> {
            omega.iter().map(|w| (w * scale).exp()).collect()
        };
        Ok(Self {
            grid: grid.clone(),
            params,
            dt,
            half_fwd: phase(0.5 * dt),
            half_bwd: phase(-0.5 * dt),
            full_fwd: phase(dt),
            full_bwd: phase(-dt),
        })
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn source_at(&self, t: f64, forcing: Option<Forcing>) -> Result<Option<SpectralField>> {
        match forcing {
            None => Ok(None),
            Some(f) => {
                let samples: Vec<f64> = self.grid.nodes().iter().map(|&x| f(t, x)).collect();
                Ok(Some(forward_transform(&samples, &self.grid)?))
            }
        }
    }

    fn stage(
        &self,
        base: &SpectralField,
        phase_fwd: Option<&[Complex64]>,
        phase_bwd: Option<&[Complex64]>,
        t: f64,
        forcing: Option<Forcing>,
    ) -> Result<Vec<Complex64>> {
        // k_i = dt * e^{-omega tau} N(t + tau, e^{omega tau} base)
        let mut shifted = base.clone();
        if let Some(p) = phase_fwd {
            for (c, ph) in shifted.coeffs_mut().iter_mut().zip(p) {
                *c *= ph;
            }
        }
        let source = self.source_at(t, forcing)?;
        let mut n = nonlinear_term(&shifted, &self.params, source.as_ref())?;
        for (i, c) in n.coeffs_mut().iter_mut().enumerate() {
            if let Some(p) = phase_bwd {
                *c *= p[i];
            }
            *c *= self.dt;
        }
        Ok(n.coeffs().to_vec())
    }

    pub fn step(&self, state: &mut SpectralState, forcing: Option<Forcing>) -> Result<()> {
        if state.field.grid() != &self.grid {
            return Err(SolverError::GridMismatch(
                "state grid differs from solver grid".into(),
            ));
        }
        let n = self.grid.intervals();
        let k = self.dt;
        let t = state.t;
        let v0 = state.field.clone();

        let add = |f: &SpectralField, inc: &[Complex64], w: f64| -> SpectralField {
            let mut out = f.clone();
            for (c, d) in out.coeffs_mut().iter_mut().zip(inc) {
                *c += w * d;
            }
            out
        };

        let k1 = self.stage(&v0, None, None, t, forcing)?;
        let k2 = self.stage(
            &add(&v0, &k1, 0.5),
            Some(&self.half_fwd),
            Some(&self.half_bwd),
            t + 0.5 * k,
            forcing,
        )?;
        let k3 = self.stage(
            &add(&v0, &k2, 0.5),
            Some(&self.half_fwd),
            Some(&self.half_bwd),
            t + 0.5 * k,
            forcing,
        )?;
        let k4 = self.stage(
            &add(&v0, &k3, 1.0),
            Some(&self.full_fwd),
            Some(&self.full_bwd),
            t + k,
            forcing,
        )?;

        let coeffs = state.field.coeffs_mut();
        for i in 0..n {
            let v = v0.coeffs()[i] + (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i]) / 6.0;
            coeffs[i] = self.full_fwd[i] * v;
            if !coeffs[i].is_finite() {
                return Err(SolverError::Divergence {
                    step: state.step_index,
                    context: "pseudospectral step produced non-finite modes".into(),
                });
            }
        }
        state.t += k;
        state.step_index += 1;
        Ok(())
    }

    pub fn run(
        &self,
        state: &mut SpectralState,
        steps: usize,
        forcing: Option<Forcing>,
        mut observer: impl FnMut(usize, f64, &SpectralField),
    ) -> Result<()> {
        for _ in 0..steps {
            self.step(state, forcing)?;
            observer(state.step_index, state.t, &state.field);
        }
        Ok(())
    }
}
