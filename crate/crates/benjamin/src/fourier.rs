//! Discrete Fourier infrastructure on a uniform periodic mesh of `[-L, L]`:
//! transforms, multiplier operators (Hilbert transform, derivatives) and
//! pointwise-product convolution.
//!
//! Coefficients are stored in FFT order: slot `m` holds wavenumber index
//! `k = m` for `m < N/2` and `k = m - N` otherwise. The forward transform
//! carries the `1/N` factor so that `coeff(0)` is the mean, and coefficients
//! refer to the physical basis `exp(i kappa_k x)` with `kappa_k = pi k / L`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Result, SolverError};

struct GridInner {
    half_length: f64,
    intervals: usize,
    nodes: Vec<f64>,
    kappa: Vec<f64>, // FFT order
    fft_forward: Arc<dyn Fft<f64>>,
    fft_inverse: Arc<dyn Fft<f64>>,
}

/// Uniform periodic mesh on `[-L, L]` with `N` intervals and the associated
/// scaled wavenumber ladder `kappa_k = pi k / L`, `k = -N/2 .. N/2 - 1`.
#[derive(Clone)]
pub struct PeriodicGrid {
    inner: Arc<GridInner>,
}

impl std::fmt::Debug for PeriodicGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PeriodicGrid")
            .field("half_length", &self.inner.half_length)
            .field("intervals", &self.inner.intervals)
            .finish()
    }
}

impl PartialEq for PeriodicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.inner.half_length == other.inner.half_length
            && self.inner.intervals == other.inner.intervals
    }
}

impl PeriodicGrid {
    pub fn new(half_length: f64, intervals: usize) -> Result<Self> {
        if !(half_length > 0.0) {
            return Err(SolverError::InvalidInput(format!(
                "half_length must be positive, got {half_length}"
            )));
        }
        if intervals == 0 || intervals % 2 != 0 {
            return Err(SolverError::InvalidInput(format!(
                "intervals must be a positive even integer, got {intervals}"
            )));
        }
        let n = intervals;
        let h = 2.0 * half_length / n as f64;
        let nodes: Vec<f64> = (0..n).map(|j| -half_length + j as f64 * h).collect();
        let kappa: Vec<f64> = (0..n)
            .map(|m| {
                let k = signed_index(m, n);
                PI * k as f64 / half_length
            })
            .collect();
        let mut planner = FftPlanner::new();
        let fft_forward = planner.plan_fft_forward(n);
        let fft_inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                half_length,
                intervals,
                nodes,
                kappa,
                fft_forward,
                fft_inverse,
            }),
        })
    }

    pub fn half_length(&self) -> f64 {
        self.inner.half_length
    }

    pub fn intervals(&self) -> usize {
        self.inner.intervals
    }

    /// Mesh spacing `h = 2L/N`.
    pub fn spacing(&self) -> f64 {
        2.0 * self.inner.half_length / self.inner.intervals as f64
    }

    /// Nodes `x_j = -L + j h`, `j = 0 .. N-1`.
    pub fn nodes(&self) -> &[f64] {
        &self.inner.nodes
    }

    /// Scaled wavenumbers in FFT storage order.
    pub fn kappa(&self) -> &[f64] {
        &self.inner.kappa
    }

    /// Wrap `x` into `[-L, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let l = self.inner.half_length;
        let period = 2.0 * l;
        let mut y = (x + l).rem_euclid(period) - l;
        if y >= l {
            y -= period;
        }
        y
    }
}

/// Signed wavenumber index for FFT slot `m`.
pub fn signed_index(m: usize, n: usize) -> i64 {
    if m < n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// FFT slot for signed wavenumber index `k` in `-N/2 .. N/2-1`.
pub fn fft_slot(k: i64, n: usize) -> usize {
    if k >= 0 {
        k as usize
    } else {
        (k + n as i64) as usize
    }
}

/// Complex Fourier coefficient vector of length `N` over a [`PeriodicGrid`].
#[derive(Debug, Clone)]
pub struct SpectralField {
    coeffs: Vec<Complex64>, // FFT order
    grid: PeriodicGrid,
}

impl SpectralField {
    pub fn new(coeffs: Vec<Complex64>, grid: PeriodicGrid) -> Result<Self> {
        if coeffs.len() != grid.intervals() {
            return Err(SolverError::InvalidInput(format!(
                "coefficient vector length {} does not match grid with N = {}",
                coeffs.len(),
                grid.intervals()
            )));
        }
        Ok(Self { coeffs, grid })
    }

    pub fn zeros(grid: PeriodicGrid) -> Self {
        let n = grid.intervals();
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
            grid,
        }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Coefficients in FFT storage order.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient for signed wavenumber index `k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs[fft_slot(k, self.coeffs.len())]
    }

    pub fn set_coeff(&mut self, k: i64, value: Complex64) {
        let n = self.coeffs.len();
        self.coeffs[fft_slot(k, n)] = value;
    }

    /// Largest relative violation of `coeff(-k) = conj(coeff(k))`.
    pub fn symmetry_residue(&self) -> f64 {
        let n = self.coeffs.len();
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        let mut worst = self.coeff(0).im.abs();
        // Nyquist slot has no conjugate partner; realness requires it real.
        worst = worst.max(self.coeffs[n / 2].im.abs());
        for k in 1..(n as i64) / 2 {
            let d = (self.coeff(-k) - self.coeff(k).conj()).norm();
            worst = worst.max(d);
        }
        worst / scale
    }

    /// Whether the field is consistent with real nodal values.
    pub fn is_real_symmetric(&self, tol: f64) -> bool {
        self.symmetry_residue() <= tol
    }

    /// Force exact conjugate symmetry by averaging paired coefficients.
    pub fn symmetrize(&mut self) {
        let n = self.coeffs.len();
        self.coeffs[0].im = 0.0;
        self.coeffs[n / 2].im = 0.0;
        for k in 1..(n as i64) / 2 {
            let avg = 0.5 * (self.coeff(k) + self.coeff(-k).conj());
            self.set_coeff(k, avg);
            self.set_coeff(-k, avg.conj());
        }
    }

    /// l2 norm of the coefficient vector.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// L2 norm of the trigonometric interpolant: `sqrt(2L sum |c_k|^2)`.
    pub fn l2_norm(&self) -> f64 {
        (2.0 * self.grid.half_length()
            * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>())
        .sqrt()
    }

    /// Evaluate the trigonometric interpolant at an arbitrary point.
    pub fn evaluate(&self, x: f64) -> Complex64 {
        let n = self.coeffs.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in self.coeffs.iter().enumerate() {
            let kappa = self.grid.kappa()[m];
            acc += c * Complex64::new(0.0, kappa * x).exp();
        }
        let _ = n;
        acc
    }
}

/// Discrete Fourier coefficients of real nodal values.
pub fn forward_transform(values: &[f64], grid: &PeriodicGrid) -> Result<SpectralField> {
    if values.len() != grid.intervals() {
        return Err(SolverError::InvalidInput(format!(
            "value vector length {} does not match grid with N = {}",
            values.len(),
            grid.intervals()
        )));
    }
    let buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward_transform_complex(buf, grid)
}

/// Forward transform of complex nodal values (used by convolution internals).
pub fn forward_transform_complex(
    mut buf: Vec<Complex64>,
    grid: &PeriodicGrid,
) -> Result<SpectralField> {
    if buf.len() != grid.intervals() {
        return Err(SolverError::InvalidInput(format!(
            "value vector length {} does not match grid with N = {}",
            buf.len(),
            grid.intervals()
        )));
    }
    let n = grid.intervals() as f64;
    grid.inner.fft_forward.process(&mut buf);
    // Nodes start at -L, so coefficients of exp(i kappa_k x) pick up (-1)^k.
    for (m, c) in buf.iter_mut().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        *c *= sign / n;
    }
    SpectralField::new(buf, grid.clone())
}

/// Node values of the trigonometric polynomial, verifying that the imaginary
/// residue stays below `1e-12` relative before discarding it.
pub fn inverse_transform(field: &SpectralField) -> Result<Vec<f64>> {
    let residue = field.symmetry_residue();
    let tol = 1e-12;
    if residue > tol {
        return Err(SolverError::SymmetryViolation { residue, tol });
    }
    Ok(inverse_transform_unchecked(field))
}

/// Node values without the conjugate-symmetry check; for hot paths where
/// symmetry holds by construction.
pub fn inverse_transform_unchecked(field: &SpectralField) -> Vec<f64> {
    inverse_transform_complex(field).into_iter().map(|c| c.re).collect()
}

/// Full complex node values of the interpolant.
pub fn inverse_transform_complex(field: &SpectralField) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(m, c)| if m % 2 == 0 { *c } else { -*c })
        .collect();
    field.grid.inner.fft_inverse.process(&mut buf);
    buf
}

/// Periodic Hilbert transform as the multiplier `-i sign(k)`, `sign(0) = 0`.
/// The Nyquist mode is zeroed to preserve realness.
pub fn hilbert_transform(field: &SpectralField) -> SpectralField {
    let n = field.coeffs().len();
    let mut out = field.clone();
    for (m, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = signed_index(m, n);
        if k == 0 || m == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            let s = if k > 0 { 1.0 } else { -1.0 };
            *c *= Complex64::new(0.0, -s);
        }
    }
    out
}

/// Spectral differentiation: multiplier `(i kappa_k)^order` for `order <= 3`.
/// The Nyquist mode is zeroed for odd orders.
pub fn spectral_derivative(field: &SpectralField, order: u32) -> Result<SpectralField> {
    if order == 0 || order > 3 {
        return Err(SolverError::InvalidInput(format!(
            "derivative order must be 1..=3, got {order}"
        )));
    }
    let n = field.coeffs().len();
    let kappa = field.grid().kappa().to_vec();
    let mut out = field.clone();
    for (m, c) in out.coeffs_mut().iter_mut().enumerate() {
        if order % 2 == 1 && m == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            let ik = Complex64::new(0.0, kappa[m]);
            *c *= ik.powu(order);
        }
    }
    Ok(out)
}

/// Coefficients of the nodal pointwise product of two interpolants.
pub fn fourier_convolution(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if a.grid() != b.grid() {
        return Err(SolverError::GridMismatch(
            "convolution operands live on different grids".into(),
        ));
    }
    let va = inverse_transform_complex(a);
    let vb = inverse_transform_complex(b);
    let prod: Vec<Complex64> = va.iter().zip(&vb).map(|(x, y)| x * y).collect();
    forward_transform_complex(prod, a.grid())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equation::EquationParams;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn grid(l: f64, n: usize) -> PeriodicGrid {
        PeriodicGrid::new(l, n).unwrap()
    }

    #[test]
    fn grid_invariants() {
        let g = grid(2.5, 16);
        assert_eq!(g.nodes().len(), 16);
        assert_eq!(g.nodes()[0], -2.5);
        assert!((g.spacing() * 16.0 - 5.0).abs() < 1e-15);
        for w in g.nodes().windows(2) {
            assert!(w[1] > w[0]);
        }
        // kappa(-k) = -kappa(k)
        for k in 1..8i64 {
            let plus = g.kappa()[fft_slot(k, 16)];
            let minus = g.kappa()[fft_slot(-k, 16)];
            assert_eq!(plus, -minus);
        }
    }

    #[test]
    fn rejects_odd_or_zero_n() {
        assert!(PeriodicGrid::new(1.0, 7).is_err());
        assert!(PeriodicGrid::new(1.0, 0).is_err());
        assert!(PeriodicGrid::new(-1.0, 8).is_err());
    }

    #[test]
    fn forward_constant_is_dc() {
        let g = grid(3.0, 8);
        let f = forward_transform(&vec![1.0; 8], &g).unwrap();
        assert!((f.coeff(0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        for k in 1..4i64 {
            assert!(f.coeff(k).norm() < 1e-14);
            assert!(f.coeff(-k).norm() < 1e-14);
        }
    }

    #[test]
    fn forward_single_cos_mode() {
        let g = grid(2.0, 8);
        let vals: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / 2.0).cos()).collect();
        let f = forward_transform(&vals, &g).unwrap();
        assert!((f.coeff(1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!((f.coeff(-1) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        assert!(f.coeff(0).norm() < 1e-14);
        assert!(f.coeff(2).norm() < 1e-14);
    }

    #[test]
    fn forward_length_mismatch_errors() {
        let g = grid(1.0, 8);
        assert!(forward_transform(&vec![0.0; 9], &g).is_err());
    }

    #[test]
    fn round_trip_identity() {
        let g = grid(1.7, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let back = inverse_transform(&forward_transform(&vals, &g).unwrap()).unwrap();
        for (a, b) in vals.iter().zip(&back) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let g = grid(1.3, 8);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vals: Vec<f64> = (0..8).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = forward_transform(&vals, &g).unwrap();
        for (j, &x) in g.nodes().iter().enumerate() {
            let v = f.evaluate(x);
            assert!((v.re - vals[j]).abs() < 1e-12);
            assert!(v.im.abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_constant() {
        let g = grid(1.0, 8);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(0, Complex64::new(2.0, 0.0));
        let v = inverse_transform(&f).unwrap();
        for x in v {
            assert!((x - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_single_sin_mode() {
        let l = 2.0;
        let g = grid(l, 8);
        let mut f = SpectralField::zeros(g.clone());
        // sin(pi x / L) = (e^{i} - e^{-i}) / 2i
        f.set_coeff(1, Complex64::new(0.0, -0.5));
        f.set_coeff(-1, Complex64::new(0.0, 0.5));
        let v = inverse_transform(&f).unwrap();
        for (j, &x) in g.nodes().iter().enumerate() {
            assert!((v[j] - (PI * x / l).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn inverse_rejects_asymmetric() {
        let g = grid(1.0, 8);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(1, Complex64::new(1.0, 0.0));
        // no conjugate partner
        assert!(inverse_transform(&f).is_err());
    }

    #[test]
    fn hilbert_cos_to_sin() {
        let l = 3.0;
        let g = grid(l, 16);
        let vals: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).cos()).collect();
        let h = hilbert_transform(&forward_transform(&vals, &g).unwrap());
        let out = inverse_transform(&h).unwrap();
        for (j, &x) in g.nodes().iter().enumerate() {
            assert!((out[j] - (PI * x / l).sin()).abs() < 1e-13);
        }
    }

    #[test]
    fn hilbert_kills_constants() {
        let g = grid(1.0, 8);
        let h = hilbert_transform(&forward_transform(&vec![5.0; 8], &g).unwrap());
        assert!(h.coeff_norm() < 1e-14);
    }

    #[test]
    fn hilbert_matches_cotangent_quadrature() {
        // Principal-value quadrature of the cotangent kernel by the midpoint
        // rule skipping the singular node, evaluated at the half-offset
        // points; compared at the nodes via a dense evaluation.
        let l = 5.0;
        let n = 512;
        let g = grid(l, n);
        let f = |x: f64| (-x * x).exp() + 0.3 * (PI * x / l).sin();
        let vals: Vec<f64> = g.nodes().iter().map(|&x| f(x)).collect();
        let spec = hilbert_transform(&forward_transform(&vals, &g).unwrap());
        let ours = inverse_transform(&spec).unwrap();

        // Midpoint-node quadrature oracle: G f(x_i) approximated with samples
        // at y_j = x_j + h/2 so no sample coincides with the singularity.
        let h = g.spacing();
        let mut worst = 0.0f64;
        let scale = ours.iter().map(|v| v.abs()).fold(0.0, f64::max);
        for (i, &x) in g.nodes().iter().enumerate() {
            let mut acc = 0.0;
            for j in 0..n {
                let y = g.nodes()[j] + 0.5 * h;
                acc += (PI * (x - y) / (2.0 * l)).tan().recip() * f(y);
            }
            let approx = acc * h / (2.0 * l);
            worst = worst.max((approx - ours[i]).abs() / scale);
        }
        assert!(worst < 1e-6, "quadrature mismatch {worst:.3e}");
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let g = grid(1.0, 8);
        let f = forward_transform(&vec![3.0; 8], &g).unwrap();
        assert!(spectral_derivative(&f, 1).unwrap().coeff_norm() < 1e-14);
    }

    #[test]
    fn derivative_of_sin() {
        let l = 4.0;
        let g = grid(l, 16);
        let vals: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).sin()).collect();
        let d = spectral_derivative(&forward_transform(&vals, &g).unwrap(), 1).unwrap();
        let out = inverse_transform(&d).unwrap();
        for (j, &x) in g.nodes().iter().enumerate() {
            assert!((out[j] - (PI / l) * (PI * x / l).cos()).abs() < 1e-13);
        }
    }

    #[test]
    fn third_derivative_multiplier() {
        let l = 1.0;
        let g = grid(l, 16);
        let mut f = SpectralField::zeros(g);
        f.set_coeff(2, Complex64::new(1.0, 0.0)); // e^{2 pi i x / L}
        let d = spectral_derivative(&f, 3).unwrap();
        let expected = Complex64::new(0.0, 2.0 * PI / l).powu(3);
        assert!((d.coeff(2) - expected).norm() < 1e-12);
    }

    #[test]
    fn derivative_order_validation() {
        let g = grid(1.0, 8);
        let f = SpectralField::zeros(g);
        assert!(spectral_derivative(&f, 0).is_err());
        assert!(spectral_derivative(&f, 4).is_err());
    }

    #[test]
    fn convolution_constants() {
        let g = grid(1.0, 8);
        let one = forward_transform(&vec![1.0; 8], &g).unwrap();
        let c = fourier_convolution(&one, &one).unwrap();
        assert!((c.coeff(0) - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn convolution_linearity_with_constant() {
        let l = 2.0;
        let g = grid(l, 16);
        let cosv: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).cos()).collect();
        let a = forward_transform(&cosv, &g).unwrap();
        let b = forward_transform(&vec![2.0; 16], &g).unwrap();
        let c = fourier_convolution(&a, &b).unwrap();
        assert!((c.coeff(1) - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((c.coeff(-1) - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn convolution_cos_squared() {
        // cos^2 = 1/2 + (1/2) cos(2 pi x / L)
        let l = 2.0;
        let g = grid(l, 16);
        let cosv: Vec<f64> = g.nodes().iter().map(|&x| (PI * x / l).cos()).collect();
        let a = forward_transform(&cosv, &g).unwrap();
        let c = fourier_convolution(&a, &a).unwrap();
        assert!((c.coeff(0) - Complex64::new(0.5, 0.0)).norm() < 1e-13);
        assert!((c.coeff(2) - Complex64::new(0.25, 0.0)).norm() < 1e-13);
        assert!((c.coeff(-2) - Complex64::new(0.25, 0.0)).norm() < 1e-13);
        assert!(c.coeff(1).norm() < 1e-13);
    }

    #[test]
    fn convolution_grid_mismatch() {
        let a = SpectralField::zeros(grid(1.0, 8));
        let b = SpectralField::zeros(grid(1.0, 16));
        assert!(fourier_convolution(&a, &b).is_err());
    }

    #[test]
    fn parseval() {
        let g = grid(2.3, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let vals: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = forward_transform(&vals, &g).unwrap();
        let nodal = g.spacing() * vals.iter().map(|v| v * v).sum::<f64>();
        let spectral = 2.0 * g.half_length() * f.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>();
        assert!((nodal - spectral).abs() / nodal < 1e-12);
    }

    #[test]
    fn hilbert_antisymmetric_pairing() {
        let g = grid(1.5, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let a: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ha = inverse_transform(&hilbert_transform(&forward_transform(&a, &g).unwrap())).unwrap();
        let hb = inverse_transform(&hilbert_transform(&forward_transform(&b, &g).unwrap())).unwrap();
        let lhs: f64 = ha.iter().zip(&b).map(|(x, y)| x * y).sum();
        let rhs: f64 = a.iter().zip(&hb).map(|(x, y)| x * y).sum();
        let scale = lhs.abs().max(rhs.abs()).max(1e-30);
        assert!((lhs + rhs).abs() / scale < 1e-12);
    }

    #[test]
    fn hilbert_squared_negates_zero_mean() {
        let g = grid(2.0, 32);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let mut vals: Vec<f64> = (0..32).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mean = vals.iter().sum::<f64>() / 32.0;
        for v in vals.iter_mut() {
            *v -= mean;
        }
        let mut f = forward_transform(&vals, &g).unwrap();
        // Nyquist is annihilated by the multiplier; drop it from the input so
        // H^2 = -I holds on the remaining modes.
        f.set_coeff(-16, Complex64::new(0.0, 0.0));
        let twice = hilbert_transform(&hilbert_transform(&f));
        for k in -15i64..16 {
            assert!((twice.coeff(k) + f.coeff(k)).norm() < 1e-13);
        }
    }

    #[test]
    fn derivative_commutes_with_hilbert() {
        let g = grid(1.0, 16);
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let vals: Vec<f64> = (0..16).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = forward_transform(&vals, &g).unwrap();
        let a = hilbert_transform(&spectral_derivative(&f, 2).unwrap());
        let b = spectral_derivative(&hilbert_transform(&f), 2).unwrap();
        for (x, y) in a.coeffs().iter().zip(b.coeffs()) {
            assert_eq!(x, y);
        }
    }

    #[test]
    fn params_reexport_compiles() {
        let p = EquationParams::new(1.0, 1.0, 0.5, 1.0);
        assert!(!p.is_bo());
    }
}
