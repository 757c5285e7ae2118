//! Randomized structural checks for the Fourier and spline infrastructure.
//!
//! Each property pins an algebraic identity that the solvers rely on:
//! Parseval's theorem, antisymmetry of the periodic Hilbert transform,
//! partition of unity and projection idempotence for the spline space,
//! agreement of the banded kernels with dense oracles, and realness
//! preservation by both time steppers.

use benjamin::banded::DenseLu;
use benjamin::diagnostics::nodal_l2;
use benjamin::equation::EquationParams;
use benjamin::fourier::{
    forward_transform, hilbert_transform, inverse_transform, spectral_derivative, PeriodicGrid,
};
use benjamin::hybrid::{HybridSolver, HybridState, StepperConfig};
use benjamin::spectral::{SpectralSolver, SpectralState};
use benjamin::spline::SplineSpace;
use proptest::prelude::*;

fn grid(half_length: f64, n: usize) -> PeriodicGrid {
    PeriodicGrid::new(half_length, n).expect("valid grid")
}

/// Strategy: a vector of `n` node values in [-1, 1].
fn nodal(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, n)
}

fn subtract_mean(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    for x in v.iter_mut() {
        *x -= mean;
    }
}

fn dot_h(a: &[f64], b: &[f64], h: f64) -> f64 {
    h * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Parseval: the trapezoidal L2 norm of the node values equals the
    /// coefficient-space norm of the interpolating trigonometric polynomial.
    #[test]
    fn parseval_identity(values in nodal(64), half in 1.0f64..20.0) {
        let g = grid(half, 64);
        let field = forward_transform(&values, &g).unwrap();
        let nodal_norm = nodal_l2(&values, g.spacing());
        prop_assert!((field.l2_norm() - nodal_norm).abs() <= 1e-12 * (1.0 + nodal_norm));
    }

    /// Round trip: forward then inverse transform reproduces the samples.
    #[test]
    fn transform_round_trip(values in nodal(48)) {
        let g = grid(3.0, 48);
        let field = forward_transform(&values, &g).unwrap();
        let back = inverse_transform(&field).unwrap();
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    /// The Hilbert transform is antisymmetric: <Hu, v> = -<u, Hv>.
    #[test]
    fn hilbert_antisymmetry(u in nodal(64), v in nodal(64)) {
        let g = grid(5.0, 64);
        let h = g.spacing();
        let uf = forward_transform(&u, &g).unwrap();
        let vf = forward_transform(&v, &g).unwrap();
        let hu = inverse_transform(&hilbert_transform(&uf)).unwrap();
        let hv = inverse_transform(&hilbert_transform(&vf)).unwrap();
        let lhs = dot_h(&hu, &v, h);
        let rhs = -dot_h(&u, &hv, h);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    /// H(Hu) = -u on mean-free fields (the mean mode sits in the kernel).
    #[test]
    fn hilbert_squares_to_minus_identity(mut u in nodal(64)) {
        subtract_mean(&mut u);
        let g = grid(5.0, 64);
        let uf = forward_transform(&u, &g).unwrap();
        // The Nyquist mode is annihilated along with the mean, so drop it
        // from the reference too.
        let mut uf_ref = uf.clone();
        uf_ref.set_coeff(-32, num_complex::Complex64::new(0.0, 0.0));
        let twice = hilbert_transform(&hilbert_transform(&uf));
        let back = inverse_transform(&twice).unwrap();
        let reference = inverse_transform(&uf_ref).unwrap();
        for (a, b) in back.iter().zip(&reference) {
            prop_assert!((a + b).abs() <= 1e-12);
        }
    }

    /// Differentiating twice with order 1 agrees with one order-2 call.
    #[test]
    fn derivative_composition(values in nodal(32)) {
        let g = grid(2.0, 32);
        let mut f = forward_transform(&values, &g).unwrap();
        // Odd-order derivatives annihilate the unpaired Nyquist mode, so
        // remove it up front to compare like with like.
        f.set_coeff(-16, num_complex::Complex64::new(0.0, 0.0));
        let d1d1 = spectral_derivative(&spectral_derivative(&f, 1).unwrap(), 1).unwrap();
        let d2 = spectral_derivative(&f, 2).unwrap();
        let a = inverse_transform(&d1d1).unwrap();
        let b = inverse_transform(&d2).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-9);
        }
    }

    /// Cubic periodic B-splines form a partition of unity: with all
    /// coefficients equal to one the spline is identically one.
    #[test]
    fn spline_partition_of_unity(x in -6.0f64..6.0) {
        let g = grid(6.0, 24);
        let space = SplineSpace::new(&g, 4).unwrap();
        let ones = vec![1.0; space.dim()];
        prop_assert!((space.eval(&ones, x, 0) - 1.0).abs() <= 1e-12);
        prop_assert!(space.eval(&ones, x, 1).abs() <= 1e-10);
    }

    /// L2 projection is idempotent: projecting a function that is already a
    /// spline returns the same coefficients.
    #[test]
    fn projection_idempotence(c in nodal(24)) {
        let g = grid(4.0, 24);
        let space = SplineSpace::new(&g, 4).unwrap();
        let projected = space.project(|x| space.eval(&c, x, 0)).unwrap();
        for (a, b) in c.iter().zip(&projected) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
    }

    /// The cyclic banded LU solver agrees with a dense LU oracle on the
    /// spline mass matrix.
    #[test]
    fn banded_solve_matches_dense_oracle(rhs in nodal(24)) {
        let g = grid(4.0, 24);
        let space = SplineSpace::new(&g, 4).unwrap();
        let mass = space.mass_matrix();
        let banded = mass.factorize().unwrap().solve(&rhs);
        let dense = DenseLu::factorize(mass.to_dense()).unwrap().solve(&rhs);
        for (a, b) in banded.iter().zip(&dense) {
            prop_assert!((a - b).abs() <= 1e-10);
        }
    }

    /// The banded matvec agrees with the dense matvec.
    #[test]
    fn banded_matvec_matches_dense(x in nodal(24)) {
        let g = grid(4.0, 24);
        let space = SplineSpace::new(&g, 4).unwrap();
        let mat = space.theta1_matrix(&EquationParams::new(1.0, 1.0, 0.0, 1.0));
        let fast = mat.matvec(&x);
        let dense = mat.to_dense();
        for (i, f) in fast.iter().enumerate() {
            let slow: f64 = dense[i].iter().zip(&x).map(|(a, b)| a * b).sum();
            prop_assert!((f - slow).abs() <= 1e-12 * (1.0 + slow.abs()));
        }
    }

    /// One integrating-factor step on a real field stays real-symmetric,
    /// and with no nonlinearity it preserves the L2 norm exactly (the
    /// linear flow is an isometry).
    #[test]
    fn spectral_step_preserves_realness_and_linear_norm(mut values in nodal(32), seed in 0u8..4) {
        subtract_mean(&mut values);
        let g = grid(2.0, 32);
        let gamma = 0.25 * f64::from(seed);
        let params = EquationParams::new(1.0, 0.0, gamma, 0.5);
        let solver = SpectralSolver::new(&g, params, 1e-3).unwrap();
        let field = forward_transform(&values, &g).unwrap();
        let norm0 = field.l2_norm();
        let mut state = SpectralState::new(0.0, field);
        for _ in 0..5 {
            solver.step(&mut state, None).unwrap();
        }
        prop_assert!(state.field.is_real_symmetric(1e-12));
        prop_assert!((state.field.l2_norm() - norm0).abs() <= 1e-11 * (1.0 + norm0));
    }

    /// One hybrid step from smooth random spline data keeps the node values
    /// bounded and finite (no spurious blow-up from the inner iteration).
    #[test]
    fn hybrid_step_stays_finite(c in nodal(32)) {
        let g = grid(2.0, 32);
        let params = EquationParams::new(1.0, 1.0, 0.5, 0.5);
        let space = SplineSpace::new(&g, 4).unwrap();
        let solver = HybridSolver::new(space, params, 1e-3, StepperConfig::default()).unwrap();
        // Damp the random coefficients so the data is of moderate size.
        let coeffs: Vec<f64> = c.iter().map(|v| 0.5 * v).collect();
        let mut state = HybridState::new(0.0, coeffs);
        let diag = solver.step(&mut state, None).unwrap();
        prop_assert!(diag.iterations >= 1);
        for v in solver.space().node_values(&state.coeffs) {
            prop_assert!(v.is_finite());
            prop_assert!(v.abs() < 10.0);
        }
    }
}

/// Deterministic Richardson check: the classical RK4 reference integrator
/// used by the wave-speed diagnostics has local error O(k^5), so halving the
/// step of a one-step comparison should shrink the error by about 16. Here
/// the role of RK4 is played by the integrating-factor stepper on a
/// nonlinear problem, whose underlying explicit scheme is fourth order.
#[test]
fn spectral_one_step_richardson() {
    let g = grid(2.0, 64);
    let params = EquationParams::new(0.0, 1.0, 0.0, -0.5);
    let values: Vec<f64> = g.nodes().iter().map(|&x| (std::f64::consts::PI * x).sin()).collect();
    let field = forward_transform(&values, &g).unwrap();

    let mut errors = Vec::new();
    for &k in &[1e-2, 5e-3, 2.5e-3] {
        let coarse = SpectralSolver::new(&g, params, k).unwrap();
        let fine = SpectralSolver::new(&g, params, k / 10.0).unwrap();
        let mut sc = SpectralState::new(0.0, field.clone());
        let mut sf = SpectralState::new(0.0, field.clone());
        coarse.step(&mut sc, None).unwrap();
        for _ in 0..10 {
            fine.step(&mut sf, None).unwrap();
        }
        let a = inverse_transform(&sc.field).unwrap();
        let b = inverse_transform(&sf.field).unwrap();
        let diff: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        errors.push(nodal_l2(&diff, g.spacing()));
    }
    let r1 = (errors[0] / errors[1]).log2();
    let r2 = (errors[1] / errors[2]).log2();
    assert!(
        (r1 - 5.0).abs() < 0.4 && (r2 - 5.0).abs() < 0.4,
        "local orders {r1:.2}, {r2:.2} should be near 5"
    );
}
