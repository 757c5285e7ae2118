//! Periodic B-spline Galerkin space on a uniform mesh.
//!
//! The trial space is spanned by translates of the cardinal B-spline of
//! order `r` (degree `r - 1`, smoothness `C^{r-2}`), periodized over
//! `[-L, L]`. All local integrals use a 5-point Gauss-Legendre rule per
//! mesh cell, which is exact for the polynomial integrands that occur up
//! to order `r = 5`. The nonlocal term couples to the Fourier side through
//! nodal values and the trapezoid rule.

use std::sync::Arc;

use num_complex::Complex64;

use crate::banded::CyclicBandedMatrix;
use crate::equation::EquationParams;
use crate::error::{Result, SolverError};
use crate::fourier::{forward_transform, hilbert_transform, inverse_transform_unchecked, PeriodicGrid};

/// 5-point Gauss-Legendre rule on [0, 1].
const GL_NODES: [f64; 5] = [
    0.046910077030668004,
    0.23076534494715845,
    0.5,
    0.7692346550528415,
    0.953089922969332,
];
const GL_WEIGHTS: [f64; 5] = [
    0.11846344252809454,
    0.23931433524968324,
    0.28444444444444444,
    0.23931433524968324,
    0.11846344252809454,
];

/// Cardinal B-spline `M_r` supported on `[0, r]`, normalized so the
/// translates sum to one.
pub fn cardinal_bspline(order: usize, t: f64) -> f64 {
    if t < 0.0 || t >= order as f64 {
        return 0.0;
    }
    if order == 1 {
        // half-open indicator of [0, 1)
        return 1.0;
    }
    let r = order as f64;
    (t * cardinal_bspline(order - 1, t) + (r - t) * cardinal_bspline(order - 1, t - 1.0))
        / (r - 1.0)
}

pub fn cardinal_bspline_d1(order: usize, t: f64) -> f64 {
    cardinal_bspline(order - 1, t) - cardinal_bspline(order - 1, t - 1.0)
}

pub fn cardinal_bspline_d2(order: usize, t: f64) -> f64 {
    cardinal_bspline_d1(order - 1, t) - cardinal_bspline_d1(order - 1, t - 1.0)
}

#[derive(Debug)]
struct SpaceInner {
    order: usize,
    grid: PeriodicGrid,
    h: f64,
    x0: f64,
    // tables[d][q] = value at local coordinate d + s_q, d in 0..order
    val: Vec<[f64; 5]>,
    d1: Vec<[f64; 5]>,
    d2: Vec<[f64; 5]>,
    // values at integer knots, index 0..=order
    node_val: Vec<f64>,
    node_d1: Vec<f64>,
}

/// Uniform periodic spline space; cheaply clonable handle.
#[derive(Debug, Clone)]
pub struct SplineSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for SplineSpace {
    fn eq(&self, other: &Self) -> bool {
        self.inner.order == other.inner.order && self.inner.grid == other.inner.grid
    }
}

impl SplineSpace {
    /// Space of mesh size `2L / N` sharing nodes with `grid`. Requires
    /// `order >= 3` (second derivatives appear in the dispersive form) and
    /// enough cells for the cyclic band storage.
    pub fn new(grid: &PeriodicGrid, order: usize) -> Result<Self> {
        if order < 3 {
            return Err(SolverError::InvalidInput(
                "spline order must be at least 3".into(),
            ));
        }
        let n = grid.intervals();
        if 2 * order - 1 > n {
            return Err(SolverError::InvalidInput(format!(
                "mesh with {n} cells is too coarse for order {order}"
            )));
        }
        let mut val = vec![[0.0; 5]; order];
        let mut d1 = vec![[0.0; 5]; order];
        let mut d2 = vec![[0.0; 5]; order];
        for d in 0..order {
            for q in 0..5 {
                let t = d as f64 + GL_NODES[q];
                val[d][q] = cardinal_bspline(order, t);
                d1[d][q] = cardinal_bspline_d1(order, t);
                d2[d][q] = cardinal_bspline_d2(order, t);
            }
        }
        let node_val: Vec<f64> = (0..=order).map(|d| cardinal_bspline(order, d as f64)).collect();
        let node_d1: Vec<f64> = (0..=order)
            .map(|d| cardinal_bspline_d1(order, d as f64))
            .collect();
        Ok(Self {
            inner: Arc::new(SpaceInner {
                order,
                grid: grid.clone(),
                h: grid.spacing(),
                x0: -grid.half_length(),
                val,
                d1,
                d2,
                node_val,
                node_d1,
            }),
        })
    }

    pub fn order(&self) -> usize {
        self.inner.order
    }

    pub fn dim(&self) -> usize {
        self.inner.grid.intervals()
    }

    pub fn spacing(&self) -> f64 {
        self.inner.h
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.inner.grid
    }

    pub fn band(&self) -> usize {
        self.inner.order - 1
    }

    fn wrap(&self, j: i64) -> usize {
        j.rem_euclid(self.dim() as i64) as usize
    }

    /// Quadrature abscissa `q` inside cell `m`.
    pub fn quad_point(&self, m: usize, q: usize) -> f64 {
        self.inner.x0 + (m as f64 + GL_NODES[q]) * self.inner.h
    }

    /// Value of the field with coefficients `c` at quadrature point
    /// `(m, q)`; also returns the first derivative.
    fn eval_at_quad(&self, c: &[f64], m: usize, q: usize) -> (f64, f64) {
        let s = &self.inner;
        let mut v = 0.0;
        let mut dv = 0.0;
        for d in 0..s.order {
            let cj = c[self.wrap(m as i64 - d as i64)];
            v += cj * s.val[d][q];
            dv += cj * s.d1[d][q];
        }
        (v, dv / s.h)
    }

    /// Evaluate the spline with coefficients `c` at an arbitrary point,
    /// periodically wrapped. `deriv` in `0..=2`.
    pub fn eval(&self, c: &[f64], x: f64, deriv: usize) -> f64 {
        let s = &self.inner;
        let n = self.dim() as f64;
        let mut u = (x - s.x0) / s.h;
        u -= (u / n).floor() * n;
        let m = (u.floor() as i64).min(self.dim() as i64 - 1).max(0);
        let frac = u - m as f64;
        let mut acc = 0.0;
        for d in 0..s.order {
            let cj = c[self.wrap(m - d as i64)];
            let t = d as f64 + frac;
            acc += cj
                * match deriv {
                    0 => cardinal_bspline(s.order, t),
                    1 => cardinal_bspline_d1(s.order, t),
                    2 => cardinal_bspline_d2(s.order, t),
                    _ => panic!("derivative order {deriv} not supported"),
                };
        }
        acc / s.h.powi(deriv as i32)
    }

    /// Field values at the mesh nodes.
    pub fn node_values(&self, c: &[f64]) -> Vec<f64> {
        let s = &self.inner;
        (0..self.dim())
            .map(|j| {
                (1..s.order)
                    .map(|d| c[self.wrap(j as i64 - d as i64)] * s.node_val[d])
                    .sum()
            })
            .collect()
    }

    /// First-derivative values at the mesh nodes.
    pub fn node_derivatives(&self, c: &[f64]) -> Vec<f64> {
        let s = &self.inner;
        (0..self.dim())
            .map(|j| {
                (1..s.order)
                    .map(|d| c[self.wrap(j as i64 - d as i64)] * s.node_d1[d])
                    .sum::<f64>()
                    / s.h
            })
            .collect()
    }

    /// Gram matrix `(B_j, B_i)`.
    pub fn mass_matrix(&self) -> CyclicBandedMatrix<f64> {
        let s = &self.inner;
        let mut mat = CyclicBandedMatrix::zeros(self.dim(), self.band());
        for m in 0..self.dim() {
            for q in 0..5 {
                let w = GL_WEIGHTS[q] * s.h;
                for da in 0..s.order {
                    let i = self.wrap(m as i64 - da as i64);
                    for db in 0..s.order {
                        let offset = da as i64 - db as i64;
                        mat.add_at_offset(i, offset, w * s.val[da][q] * s.val[db][q]);
                    }
                }
            }
        }
        mat
    }

    /// Local-term stiffness `(alpha B_j - delta B_j'', B_i')`.
    pub fn theta1_matrix(&self, params: &EquationParams) -> CyclicBandedMatrix<f64> {
        let s = &self.inner;
        let mut mat = CyclicBandedMatrix::zeros(self.dim(), self.band());
        for m in 0..self.dim() {
            for q in 0..5 {
                let w = GL_WEIGHTS[q] * s.h;
                for da in 0..s.order {
                    let i = self.wrap(m as i64 - da as i64);
                    let test = s.d1[da][q] / s.h;
                    for db in 0..s.order {
                        let trial = params.alpha * s.val[db][q]
                            - params.delta * s.d2[db][q] / (s.h * s.h);
                        mat.add_at_offset(i, da as i64 - db as i64, w * test * trial);
                    }
                }
            }
        }
        mat
    }

    /// Convection matrix `(phi B_j, B_i')` weighted by the spline field
    /// `phi`; the linearization of the convective form.
    pub fn weighted_convection_matrix(&self, phi: &[f64]) -> CyclicBandedMatrix<f64> {
        let s = &self.inner;
        let mut mat = CyclicBandedMatrix::zeros(self.dim(), self.band());
        for m in 0..self.dim() {
            for q in 0..5 {
                let (pq, _) = self.eval_at_quad(phi, m, q);
                let w = GL_WEIGHTS[q] * s.h * pq;
                for da in 0..s.order {
                    let i = self.wrap(m as i64 - da as i64);
                    let test = s.d1[da][q] / s.h;
                    for db in 0..s.order {
                        mat.add_at_offset(i, da as i64 - db as i64, w * test * s.val[db][q]);
                    }
                }
            }
        }
        mat
    }

    /// Dual vector `scale * (v w, B_i')` for spline fields `v`, `w`.
    pub fn weighted_gradient_form(&self, v: &[f64], w: &[f64], scale: f64) -> Vec<f64> {
        let s = &self.inner;
        let mut out = vec![0.0; self.dim()];
        for m in 0..self.dim() {
            for q in 0..5 {
                let (vq, _) = self.eval_at_quad(v, m, q);
                let (wq, _) = self.eval_at_quad(w, m, q);
                let f = scale * GL_WEIGHTS[q] * s.h * vq * wq;
                for d in 0..s.order {
                    out[self.wrap(m as i64 - d as i64)] += f * s.d1[d][q] / s.h;
                }
            }
        }
        out
    }

    /// Convective form `(beta/2) (v w, B_i')`.
    pub fn b_form(&self, params: &EquationParams, v: &[f64], w: &[f64]) -> Vec<f64> {
        self.weighted_gradient_form(v, w, 0.5 * params.beta)
    }

    /// Nonlocal form `-gamma (I_N[H v_x], B_i')` evaluated with the
    /// trapezoid rule at the mesh nodes; `H` applied spectrally.
    pub fn theta2_dual(&self, params: &EquationParams, v: &[f64]) -> Result<Vec<f64>> {
        let s = &self.inner;
        if params.gamma == 0.0 {
            return Ok(vec![0.0; self.dim()]);
        }
        let g = self.node_derivatives(v);
        let hat = forward_transform(&g, &s.grid)?;
        let hg = inverse_transform_unchecked(&hilbert_transform(&hat));
        let mut out = vec![0.0; self.dim()];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for e in 1..s.order {
                acc += s.node_d1[e] * hg[self.wrap(i as i64 + e as i64)];
            }
            *slot = -params.gamma * acc;
        }
        Ok(out)
    }

    /// Load vector `(f, B_i)`.
    pub fn load_vector(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let s = &self.inner;
        let mut out = vec![0.0; self.dim()];
        for m in 0..self.dim() {
            for q in 0..5 {
                let fv = f(self.quad_point(m, q)) * GL_WEIGHTS[q] * s.h;
                for d in 0..s.order {
                    out[self.wrap(m as i64 - d as i64)] += fv * s.val[d][q];
                }
            }
        }
        out
    }

    /// L2 projection of `f` onto the spline space.
    pub fn project(&self, f: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        let load = self.load_vector(f);
        let lu = self.mass_matrix().factorize()?;
        Ok(lu.solve(&load))
    }

    /// L2 norm of the spline field over the period.
    pub fn l2_norm(&self, c: &[f64]) -> f64 {
        let s = &self.inner;
        let mut acc = 0.0;
        for m in 0..self.dim() {
            for q in 0..5 {
                let (vq, _) = self.eval_at_quad(c, m, q);
                acc += GL_WEIGHTS[q] * s.h * vq * vq;
            }
        }
        acc.sqrt()
    }

    /// L2 norm of `field - f` over the period (quadrature at the GL points).
    pub fn l2_error(&self, c: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        let s = &self.inner;
        let mut acc = 0.0;
        for m in 0..self.dim() {
            for q in 0..5 {
                let (vq, _) = self.eval_at_quad(c, m, q);
                let diff = vq - f(self.quad_point(m, q));
                acc += GL_WEIGHTS[q] * s.h * diff * diff;
            }
        }
        acc.sqrt()
    }

    /// Values and first derivatives at all quadrature points, cell-major.
    pub fn quadrature_values(&self, c: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.dim();
        let mut vals = Vec::with_capacity(5 * n);
        let mut ders = Vec::with_capacity(5 * n);
        for m in 0..n {
            for q in 0..5 {
                let (v, dv) = self.eval_at_quad(c, m, q);
                vals.push(v);
                ders.push(dv);
            }
        }
        (vals, ders)
    }

    /// Quadrature weights matching `quadrature_values` ordering.
    pub fn quadrature_weights(&self) -> Vec<f64> {
        let h = self.inner.h;
        (0..self.dim())
            .flat_map(|_| GL_WEIGHTS.iter().map(move |w| w * h))
            .collect()
    }

    /// Quadrature abscissae matching `quadrature_values` ordering.
    pub fn quadrature_points(&self) -> Vec<f64> {
        (0..self.dim())
            .flat_map(|m| (0..5).map(move |q| self.quad_point(m, q)))
            .collect()
    }
}

/// Lift a real cyclic banded matrix to complex entries.
pub fn complexify(
    real: &CyclicBandedMatrix<f64>,
    scale: Complex64,
) -> CyclicBandedMatrix<Complex64> {
    let n = real.dim();
    let b = real.band();
    let mut out = CyclicBandedMatrix::zeros(n, b);
    for i in 0..n {
        for d in -(b as i64)..=(b as i64) {
            let j = (i as i64 + d).rem_euclid(n as i64) as usize;
            out.add_at_offset(i, d, scale * real.get(i, j));
        }
    }
    out
}
