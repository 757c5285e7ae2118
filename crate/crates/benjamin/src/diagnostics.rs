//! Conserved quantities, shape/phase fits, and convergence bookkeeping.
//!
//! The equation preserves the mean, the momentum `I = 1/2 int u^2`, and
//! the Hamiltonian-type functional
//!
//! ```text
//! E = int ( beta/6 u^3 - gamma/2 u H u_x + delta/2 u_x^2 ),
//! ```
//!
//! reported here together with `H = I + E`. For spline fields the local
//! terms use the cell Gauss rule and the nonlocal term the trapezoid rule
//! through the Fourier interpolant, matching their discrete conservation
//! properties; for spectral fields everything is nodal.

use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use crate::fourier::{
    forward_transform, hilbert_transform, inverse_transform_unchecked, spectral_derivative,
    PeriodicGrid, SpectralField,
};
use crate::spline::SplineSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantReport {
    pub mean: f64,
    pub momentum: f64,
    pub energy: f64,
    pub hamiltonian: f64,
}

/// `I_N[H u_x]` at the nodes, from nodal values of `u_x`.
fn hilbert_of_derivative(grid: &PeriodicGrid, ux: &[f64]) -> Result<Vec<f64>> {
    let hat = forward_transform(ux, grid)?;
    Ok(inverse_transform_unchecked(&hilbert_transform(&hat)))
}

/// Invariants of a spline field.
pub fn spline_invariants(
    space: &SplineSpace,
    params: &EquationParams,
    coeffs: &[f64],
) -> Result<InvariantReport> {
    let h = space.spacing();
    let mean = h * coeffs.iter().sum::<f64>();
    let (vals, ders) = space.quadrature_values(coeffs);
    let weights = space.quadrature_weights();
    let mut momentum = 0.0;
    let mut local = 0.0;
    for ((&v, &dv), &w) in vals.iter().zip(&ders).zip(&weights) {
        momentum += 0.5 * w * v * v;
        local += w * (params.beta / 6.0 * v.powi(3) + 0.5 * params.delta * dv * dv);
    }
    let nodal_u = space.node_values(coeffs);
    let nodal_ux = space.node_derivatives(coeffs);
    let hux = hilbert_of_derivative(space.grid(), &nodal_ux)?;
    let nonlocal: f64 = nodal_u.iter().zip(&hux).map(|(u, g)| u * g).sum::<f64>() * h;
    let energy = local - 0.5 * params.gamma * nonlocal;
    Ok(InvariantReport {
        mean,
        momentum,
        energy,
        hamiltonian: momentum + energy,
    })
}

/// Invariants of nodal values, all integrals by the trapezoid rule with
/// spectral differentiation.
pub fn nodal_invariants(
    grid: &PeriodicGrid,
    params: &EquationParams,
    values: &[f64],
) -> Result<InvariantReport> {
    if values.len() != grid.intervals() {
        return Err(SolverError::GridMismatch(
            "value count differs from grid size".into(),
        ));
    }
    let h = grid.spacing();
    let hat = forward_transform(values, grid)?;
    let ux = inverse_transform_unchecked(&spectral_derivative(&hat, 1)?);
    let hux = inverse_transform_unchecked(&hilbert_transform(&spectral_derivative(&hat, 1)?));
    let mut mean = 0.0;
    let mut momentum = 0.0;
    let mut energy = 0.0;
    for i in 0..values.len() {
        let u = values[i];
        mean += h * u;
        momentum += 0.5 * h * u * u;
        energy += h
            * (params.beta / 6.0 * u.powi(3) + 0.5 * params.delta * ux[i] * ux[i]
                - 0.5 * params.gamma * u * hux[i]);
    }
    Ok(InvariantReport {
        mean,
        momentum,
        energy,
        hamiltonian: momentum + energy,
    })
}

/// Invariants of a spectral field at its grid nodes.
pub fn spectral_invariants(
    params: &EquationParams,
    field: &SpectralField,
) -> Result<InvariantReport> {
    nodal_invariants(field.grid(), params, &inverse_transform_unchecked(field))
}

/// Weighted L2 norm of `a - b`.
pub fn weighted_l2_diff(weights: &[f64], a: &[f64], b: &[f64]) -> f64 {
    weights
        .iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Trapezoid L2 norm of nodal values.
pub fn nodal_l2(values: &[f64], h: f64) -> f64 {
    (h * values.iter().map(|v| v * v).sum::<f64>()).sqrt()
}

/// Result of fitting a translate of a reference profile to a solution.
#[derive(Debug, Clone, Copy)]
pub struct ShapeFit {
    /// Optimal translation time `tau`.
    pub tau: f64,
    /// Relative L2 misfit at the optimum.
    pub shape_error: f64,
    /// `tau - t`: lag of the observed wave behind the exact translate.
    pub phase_error: f64,
}

/// Fit `reference(x - speed tau)` to samples `u` at abscissae `xs` with
/// quadrature weights `weights`, minimizing over `tau` near `t`. The
/// reference closure returns the profile derivative of the requested
/// order (0..=2) and must wrap periodically.
pub fn shape_phase_fit(
    xs: &[f64],
    weights: &[f64],
    u: &[f64],
    reference: impl Fn(f64, usize) -> f64,
    speed: f64,
    t: f64,
) -> Result<ShapeFit> {
    if xs.len() != u.len() || xs.len() != weights.len() {
        return Err(SolverError::InvalidInput(
            "mismatched sample/weight lengths".into(),
        ));
    }
    if speed == 0.0 {
        return Err(SolverError::InvalidInput(
            "shape fit needs a nonzero propagation speed".into(),
        ));
    }
    let misfit_sq = |tau: f64| -> f64 {
        xs.iter()
            .zip(weights.iter().zip(u))
            .map(|(&x, (&w, &ui))| {
                let r = reference(x - speed * tau, 0);
                w * (ui - r) * (ui - r)
            })
            .sum()
    };
    // Newton on d(xi^2)/dtau
    let derivs = |tau: f64| -> (f64, f64) {
        let mut g = 0.0;
        let mut gp = 0.0;
        for (&x, (&w, &ui)) in xs.iter().zip(weights.iter().zip(u)) {
            let xi = x - speed * tau;
            let r = reference(xi, 0);
            let r1 = reference(xi, 1);
            let r2 = reference(xi, 2);
            g += 2.0 * w * (ui - r) * speed * r1;
            gp += 2.0 * w * (speed * r1 * speed * r1 - (ui - r) * speed * speed * r2);
        }
        (g, gp)
    };
    let mut tau = t;
    let mut newton_ok = false;
    for _ in 0..60 {
        let (g, gp) = derivs(tau);
        if gp.abs() < 1e-300 {
            break;
        }
        let step = g / gp;
        tau -= step;
        if !tau.is_finite() {
            break;
        }
        if step.abs() <= 1e-13 * tau.abs().max(1.0) {
            newton_ok = gp > 0.0;
            break;
        }
    }
    if !newton_ok {
        // golden-section fallback over one grid period of translation
        let period = {
            // span of the sample abscissae plus one spacing
            let (min, max) = xs
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
                    (a.min(x), b.max(x))
                });
            (max - min) * xs.len() as f64 / (xs.len() as f64 - 1.0)
        };
        let half = 0.5 * period / speed.abs();
        let (mut a, mut b) = (t - half, t + half);
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut c = b - phi * (b - a);
        let mut d = a + phi * (b - a);
        let (mut fc, mut fd) = (misfit_sq(c), misfit_sq(d));
        for _ in 0..200 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = misfit_sq(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = misfit_sq(d);
            }
            if (b - a).abs() < 1e-12 * t.abs().max(1.0) {
                break;
            }
        }
        tau = 0.5 * (a + b);
        // polish with a few Newton steps from the bracketed minimum
        for _ in 0..10 {
            let (g, gp) = derivs(tau);
            if gp <= 0.0 {
                break;
            }
            let step = g / gp;
            tau -= step;
            if step.abs() <= 1e-13 * tau.abs().max(1.0) {
                break;
            }
        }
    }
    let ref_norm_sq: f64 = xs
        .iter()
        .zip(weights)
        .map(|(&x, &w)| {
            let r = reference(x - speed * tau, 0);
            w * r * r
        })
        .sum();
    if ref_norm_sq <= 0.0 {
        return Err(SolverError::InvalidInput("reference profile is zero".into()));
    }
    Ok(ShapeFit {
        tau,
        shape_error: (misfit_sq(tau).max(0.0) / ref_norm_sq).sqrt(),
        phase_error: tau - t,
    })
}

/// Pearson correlation coefficient.
pub fn linear_correlation(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

/// One row of an observed-order table.
#[derive(Debug, Clone, Copy)]
pub struct ConvergenceRow {
    pub resolution: f64,
    pub error: f64,
    /// Observed rate relative to the previous row, if both errors are
    /// nonzero.
    pub rate: Option<f64>,
}

/// Observed rates `log(e_prev/e) / log(h_prev/h)` between consecutive
/// rows.
pub fn convergence_rates(resolutions: &[f64], errors: &[f64]) -> Vec<ConvergenceRow> {
    let mut rows = Vec::with_capacity(errors.len());
    for i in 0..errors.len() {
        let rate = if i > 0 && errors[i - 1] > 0.0 && errors[i] > 0.0 {
            Some((errors[i - 1] / errors[i]).ln() / (resolutions[i - 1] / resolutions[i]).ln())
        } else {
            None
        };
        rows.push(ConvergenceRow {
            resolution: resolutions[i],
            error: errors[i],
            rate,
        });
    }
    rows
}

/// A refined extremum of the solution.
#[derive(Debug, Clone, Copy)]
pub struct Peak {
    pub location: f64,
    pub height: f64,
}

/// Newton refinement of an extremum of `f` near `x0`; the closure returns
/// derivatives of order 0..=2.
pub fn refine_extremum(x0: f64, f: impl Fn(f64, usize) -> f64) -> Result<Peak> {
    let mut x = x0;
    for _ in 0..50 {
        let d1 = f(x, 1);
        let d2 = f(x, 2);
        if d2.abs() < 1e-300 {
            break;
        }
        let step = d1 / d2;
        x -= step;
        if !x.is_finite() {
            return Err(SolverError::PeakNotFound(format!(
                "extremum refinement diverged from x = {x0}"
            )));
        }
        if step.abs() < 1e-13 * x.abs().max(1.0) {
            return Ok(Peak {
                location: x,
                height: f(x, 0),
            });
        }
    }
    Ok(Peak {
        location: x,
        height: f(x, 0),
    })
}

/// Locate all extrema of `sign * u` above `threshold` from nodal values,
/// refined through the evaluator closure.
pub fn peak_census(
    xs: &[f64],
    values: &[f64],
    sign: f64,
    threshold: f64,
    evaluator: impl Fn(f64, usize) -> f64,
) -> Result<Vec<Peak>> {
    let n = values.len();
    let mut peaks = Vec::new();
    for i in 0..n {
        let prev = sign * values[(i + n - 1) % n];
        let here = sign * values[i];
        let next = sign * values[(i + 1) % n];
        if here >= prev && here > next && here >= threshold {
            let peak = refine_extremum(xs[i], &evaluator)?;
            peaks.push(peak);
        }
    }
    Ok(peaks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn invariants_of_cosine() {
        // u = cos x on [-pi, pi]: mean 0, I = pi/2,
        // E = delta pi/2 - gamma pi/2 (cubic term integrates to zero)
        let grid = PeriodicGrid::new(PI, 128).unwrap();
        let params = EquationParams::new(1.0, 1.0, 0.4, 0.7);
        let u: Vec<f64> = grid.nodes().iter().map(|&x| x.cos()).collect();
        let rep = nodal_invariants(&grid, &params, &u).unwrap();
        assert_abs_diff_eq!(rep.mean, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rep.momentum, PI / 2.0, epsilon = 1e-12);
        let expect_e = 0.5 * PI * (params.delta - params.gamma);
        assert_abs_diff_eq!(rep.energy, expect_e, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.hamiltonian, rep.momentum + rep.energy, epsilon = 1e-14);
    }

    #[test]
    fn spline_and_nodal_invariants_agree() {
        let grid = PeriodicGrid::new(10.0, 256).unwrap();
        let space = SplineSpace::new(&grid, 4).unwrap();
        let params = EquationParams::new(1.0, 1.0, 0.5, 1.0);
        let f = |x: f64| -0.5 / x.cosh().powi(2);
        let coeffs = space.project(f).unwrap();
        let rep_s = spline_invariants(&space, &params, &coeffs).unwrap();
        let u: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        let rep_n = nodal_invariants(&grid, &params, &u).unwrap();
        assert_abs_diff_eq!(rep_s.mean, rep_n.mean, epsilon = 1e-8);
        assert_abs_diff_eq!(rep_s.momentum, rep_n.momentum, epsilon = 1e-8);
        assert_abs_diff_eq!(rep_s.energy, rep_n.energy, epsilon = 1e-7);
    }

    #[test]
    fn shape_fit_recovers_exact_translate() {
        let grid = PeriodicGrid::new(20.0, 256).unwrap();
        let space = SplineSpace::new(&grid, 4).unwrap();
        let profile = |x: f64| -0.6 / (0.4 * x).cosh().powi(2);
        let coeffs = space.project(profile).unwrap();
        let speed = 0.75;
        let t = 3.2;
        let xs = space.quadrature_points();
        let weights = space.quadrature_weights();
        let u: Vec<f64> = xs.iter().map(|&x| space.eval(&coeffs, x - speed * t, 0)).collect();
        let fit = shape_phase_fit(
            &xs,
            &weights,
            &u,
            |x, d| space.eval(&coeffs, x, d),
            speed,
            t + 0.05, // seed slightly off
        )
        .unwrap();
        assert_abs_diff_eq!(fit.tau, t, epsilon = 1e-10);
        assert!(fit.shape_error < 1e-12, "shape error {:e}", fit.shape_error);
    }

    #[test]
    fn shape_fit_matches_brute_scan() {
        let grid = PeriodicGrid::new(20.0, 128).unwrap();
        let space = SplineSpace::new(&grid, 4).unwrap();
        let profile = |x: f64| -0.6 / (0.4 * x).cosh().powi(2);
        let coeffs = space.project(profile).unwrap();
        let speed = 0.75;
        let t = 2.0;
        let xs = space.quadrature_points();
        let weights = space.quadrature_weights();
        // perturbed translate: optimum no longer exactly at t
        let u: Vec<f64> = xs
            .iter()
            .map(|&x| space.eval(&coeffs, x - speed * t, 0) + 1e-3 * (0.5 * x).sin())
            .collect();
        let fit = shape_phase_fit(&xs, &weights, &u, |x, d| space.eval(&coeffs, x, d), speed, t)
            .unwrap();
        let misfit = |tau: f64| -> f64 {
            xs.iter()
                .zip(weights.iter().zip(&u))
                .map(|(&x, (&w, &ui))| {
                    let r = space.eval(&coeffs, x - speed * tau, 0);
                    w * (ui - r) * (ui - r)
                })
                .sum()
        };
        let mut best = (f64::INFINITY, t);
        let mut tau = t - 0.2;
        while tau <= t + 0.2 {
            let m = misfit(tau);
            if m < best.0 {
                best = (m, tau);
            }
            tau += 1e-5;
        }
        assert!((fit.tau - best.1).abs() < 2e-5, "{} vs {}", fit.tau, best.1);
        assert!(misfit(fit.tau) <= best.0 + 1e-18);
    }

    #[test]
    fn rate_table_from_factor_sixteen() {
        let rows = convergence_rates(&[1.0, 0.5], &[1.0, 1.0 / 16.0]);
        assert!(rows[0].rate.is_none());
        assert_abs_diff_eq!(rows[1].rate.unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn correlation_of_linear_data_is_one() {
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 0.2 * v).collect();
        assert_abs_diff_eq!(linear_correlation(&x, &y).abs(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn census_finds_two_bumps() {
        let grid = PeriodicGrid::new(20.0, 512).unwrap();
        let f = |x: f64, d: usize| -> f64 {
            let bump = |x: f64, c: f64, a: f64| a * (-(x - c) * (x - c)).exp();
            let g = |x: f64| bump(x, -5.0, 1.0) + bump(x, 6.0, 0.5);
            match d {
                0 => g(x),
                1 => (g(x + 1e-5) - g(x - 1e-5)) / 2e-5,
                _ => (g(x + 1e-4) - 2.0 * g(x) + g(x - 1e-4)) / 1e-8,
            }
        };
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x, 0)).collect();
        let peaks = peak_census(grid.nodes(), &values, 1.0, 0.2, f).unwrap();
        assert_eq!(peaks.len(), 2);
        assert_abs_diff_eq!(peaks[0].location, -5.0, epsilon = 1e-6);
        assert_abs_diff_eq!(peaks[0].height, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(peaks[1].location, 6.0, epsilon = 1e-6);
    }

    #[test]
    fn refine_extremum_of_cosine() {
        let f = |x: f64, d: usize| match d {
            0 => x.cos(),
            1 => -x.sin(),
            _ => -x.cos(),
        };
        let p = refine_extremum(0.3, f).unwrap();
        assert_abs_diff_eq!(p.location, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.height, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn shape_fit_rejects_zero_speed() {
        let xs = [0.0, 1.0];
        let w = [1.0, 1.0];
        let u = [0.0, 0.0];
        assert!(shape_phase_fit(&xs, &w, &u, |_, _| 0.0, 0.0, 0.0).is_err());
    }
}
