//! Cyclic banded matrices and their LU solves: a banded core factorized
//! without pivoting plus a low-rank Woodbury correction for the periodic
//! wrap-around corner blocks.

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Result, SolverError};

/// Field scalar with a modulus, implemented for `f64` and `Complex64`.
pub trait Scalar:
    Copy
    + PartialEq
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
    + Zero
    + One
    + std::fmt::Debug
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Cyclic banded matrix of dimension `n` with half-bandwidth `band`: entry
/// `(i, j)` may be nonzero only when `(j - i) mod n` maps into
/// `-band ..= band`. Stored row-wise by diagonal offset.
#[derive(Debug, Clone)]
pub struct CyclicBandedMatrix<T: Scalar> {
    n: usize,
    band: usize,
    // rows[i][d + band] = entry (i, (i + d) mod n)
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> CyclicBandedMatrix<T> {
    pub fn zeros(n: usize, band: usize) -> Self {
        assert!(n >= 2, "matrix dimension too small");
        assert!(2 * band + 1 <= n, "band too wide for cyclic storage");
        Self {
            n,
            band,
            rows: vec![vec![T::zero(); 2 * band + 1]; n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn band(&self) -> usize {
        self.band
    }

    fn offset_of(&self, i: usize, j: usize) -> Option<usize> {
        let n = self.n as i64;
        let mut d = j as i64 - i as i64;
        if d > n / 2 {
            d -= n;
        } else if d < -(n / 2) {
            d += n;
        }
        if d.unsigned_abs() as usize <= self.band {
            Some((d + self.band as i64) as usize)
        } else {
            None
        }
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        match self.offset_of(i, j) {
            Some(s) => self.rows[i][s],
            None => T::zero(),
        }
    }

    /// Entry at `(i, (i + d) mod n)` for diagonal offset `d`.
    pub fn get_at_offset(&self, i: usize, d: i64) -> T {
        debug_assert!(d.unsigned_abs() as usize <= self.band);
        self.rows[i][(d + self.band as i64) as usize]
    }

    /// Add `value` at `(i, (i + d) mod n)` for diagonal offset `d`.
    pub fn add_at_offset(&mut self, i: usize, d: i64, value: T) {
        debug_assert!(d.unsigned_abs() as usize <= self.band);
        self.rows[i][(d + self.band as i64) as usize] += value;
    }

    pub fn set_at_offset(&mut self, i: usize, d: i64, value: T) {
        debug_assert!(d.unsigned_abs() as usize <= self.band);
        self.rows[i][(d + self.band as i64) as usize] = value;
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.n);
        let b = self.band as i64;
        let n = self.n as i64;
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let mut acc = T::zero();
            for d in -b..=b {
                let j = (i as i64 + d).rem_euclid(n) as usize;
                acc += self.rows[i][(d + b) as usize] * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut dense = vec![vec![T::zero(); self.n]; self.n];
        let b = self.band as i64;
        let n = self.n as i64;
        for i in 0..self.n {
            for d in -b..=b {
                let j = (i as i64 + d).rem_euclid(n) as usize;
                dense[i][j] += self.rows[i][(d + b) as usize];
            }
        }
        dense
    }

    pub fn factorize(&self) -> Result<CyclicBandedLu<T>> {
        CyclicBandedLu::new(self)
    }
}

/// LU factorization of a cyclic banded matrix: banded core (no pivoting)
/// plus a rank-`2 band` Woodbury correction for the corner blocks.
pub struct CyclicBandedLu<T: Scalar> {
    n: usize,
    band: usize,
    // Core band LU, rows[i][d + band]; L unit lower within band, U upper.
    lu: Vec<Vec<T>>,
    // Correction rows: (unit-vector row index, sparse corner row values).
    corrections: Vec<(usize, Vec<(usize, T)>)>,
    // y_cols[m] = B^{-1} e_{i_m}
    y_cols: Vec<Vec<T>>,
    // Dense LU (with partial pivoting) of the small capacitance matrix.
    cap: DenseLu<T>,
}

impl<T: Scalar> CyclicBandedLu<T> {
    fn new(a: &CyclicBandedMatrix<T>) -> Result<Self> {
        let n = a.n;
        let b = a.band;

        // Split into banded core and corner corrections.
        let mut core = vec![vec![T::zero(); 2 * b + 1]; n];
        let mut corrections: Vec<(usize, Vec<(usize, T)>)> = Vec::new();
        for i in 0..n {
            let mut corner: Vec<(usize, T)> = Vec::new();
            for s in 0..2 * b + 1 {
                let d = s as i64 - b as i64;
                let j = i as i64 + d;
                if (0..n as i64).contains(&j) {
                    core[i][s] = a.rows[i][s];
                } else {
                    let jw = j.rem_euclid(n as i64) as usize;
                    let v = a.rows[i][s];
                    if v != T::zero() {
                        corner.push((jw, v));
                    }
                }
            }
            if !corner.is_empty() {
                corrections.push((i, corner));
            }
        }

        // Banded LU of the core, no pivoting.
        let mut lu = core;
        for k in 0..n {
            let pivot = lu[k][b];
            if pivot.modulus() < 1e-300 {
                return Err(SolverError::SingularMatrix(format!(
                    "zero pivot in banded core at row {k}"
                )));
            }
            let imax = (k + b).min(n - 1);
            for i in k + 1..=imax {
                // entry (i, k) sits at offset k - i
                let s_ik = (k as i64 - i as i64 + b as i64) as usize;
                let factor = lu[i][s_ik] / pivot;
                lu[i][s_ik] = factor;
                let jmax = (k + b).min(n - 1);
                for j in k + 1..=jmax {
                    let s_kj = (j as i64 - k as i64 + b as i64) as usize;
                    let s_ij = (j as i64 - i as i64 + b as i64) as usize;
                    let upd = factor * lu[k][s_kj];
                    lu[i][s_ij] -= upd;
                }
            }
        }

        let mut partial = Self {
            n,
            band: b,
            lu,
            corrections: Vec::new(),
            y_cols: Vec::new(),
            cap: DenseLu::identity(0),
        };

        // Woodbury data: Y = B^{-1} U, S = I + W^T Y.
        let m = corrections.len();
        let mut y_cols = Vec::with_capacity(m);
        for (row, _) in &corrections {
            let mut e = vec![T::zero(); n];
            e[*row] = T::one();
            partial.solve_core_in_place(&mut e);
            y_cols.push(e);
        }
        let mut s_mat = vec![vec![T::zero(); m]; m];
        for (mi, (_, corner)) in corrections.iter().enumerate() {
            for (ml, y) in y_cols.iter().enumerate() {
                let mut acc = if mi == ml { T::one() } else { T::zero() };
                for &(col, v) in corner {
                    acc += v * y[col];
                }
                s_mat[mi][ml] = acc;
            }
        }
        let cap = DenseLu::factorize(s_mat)?;

        partial.corrections = corrections;
        partial.y_cols = y_cols;
        partial.cap = cap;
        Ok(partial)
    }

    fn solve_core_in_place(&self, x: &mut [T]) {
        let n = self.n;
        let b = self.band;
        // forward: L y = x
        for i in 0..n {
            let jmin = i.saturating_sub(b);
            let mut acc = x[i];
            for j in jmin..i {
                let s = (j as i64 - i as i64 + b as i64) as usize;
                acc -= self.lu[i][s] * x[j];
            }
            x[i] = acc;
        }
        // backward: U x = y
        for i in (0..n).rev() {
            let jmax = (i + b).min(n - 1);
            let mut acc = x[i];
            for j in i + 1..=jmax {
                let s = (j as i64 - i as i64 + b as i64) as usize;
                acc -= self.lu[i][s] * x[j];
            }
            x[i] = acc / self.lu[i][b];
        }
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        assert_eq!(rhs.len(), self.n);
        let mut y = rhs.to_vec();
        self.solve_core_in_place(&mut y);
        let m = self.corrections.len();
        if m == 0 {
            return y;
        }
        let mut z = vec![T::zero(); m];
        for (mi, (_, corner)) in self.corrections.iter().enumerate() {
            let mut acc = T::zero();
            for &(col, v) in corner {
                acc += v * y[col];
            }
            z[mi] = acc;
        }
        let s = self.cap.solve(&z);
        for (ml, yc) in self.y_cols.iter().enumerate() {
            for i in 0..self.n {
                let upd = yc[i] * s[ml];
                y[i] -= upd;
            }
        }
        y
    }
}

/// Dense LU with partial pivoting; used for the Woodbury capacitance matrix
/// and as a reference solver in tests.
pub struct DenseLu<T: Scalar> {
    n: usize,
    lu: Vec<Vec<T>>,
    perm: Vec<usize>,
}

impl<T: Scalar> DenseLu<T> {
    fn identity(n: usize) -> Self {
        let mut lu = vec![vec![T::zero(); n]; n];
        for (i, row) in lu.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Self {
            n,
            lu,
            perm: (0..n).collect(),
        }
    }

    pub fn factorize(mut a: Vec<Vec<T>>) -> Result<Self> {
        let n = a.len();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (imax, pmax) = (k..n)
                .map(|i| (i, a[i][k].modulus()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pmax < 1e-300 {
                return Err(SolverError::SingularMatrix(format!(
                    "dense LU: zero pivot at column {k}"
                )));
            }
            a.swap(k, imax);
            perm.swap(k, imax);
            let pivot = a[k][k];
            for i in k + 1..n {
                let factor = a[i][k] / pivot;
                a[i][k] = factor;
                for j in k + 1..n {
                    let upd = factor * a[k][j];
                    a[i][j] -= upd;
                }
            }
        }
        Ok(Self { n, lu: a, perm })
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let n = self.n;
        let mut x: Vec<T> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let mut acc = x[i];
            for j in 0..i {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= self.lu[i][j] * x[j];
            }
            x[i] = acc / self.lu[i][i];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_spd_like(n: usize, band: usize, rng: &mut ChaCha8Rng) -> CyclicBandedMatrix<f64> {
        let mut a = CyclicBandedMatrix::zeros(n, band);
        for i in 0..n {
            for d in 1..=band as i64 {
                let v = rng.gen_range(-0.5..0.5) / d as f64;
                a.add_at_offset(i, d, v);
                let j = (i as i64 + d).rem_euclid(n as i64) as usize;
                a.add_at_offset(j, -d, v);
            }
        }
        for i in 0..n {
            a.add_at_offset(i, 0, 4.0 + rng.gen_range(0.0..1.0));
        }
        a
    }

    #[test]
    fn matvec_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for &n in &[8usize, 16, 64] {
            let a = random_spd_like(n, 3, &mut rng);
            let dense = a.to_dense();
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let y = a.matvec(&x);
            for i in 0..n {
                let yref: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
                assert!((y[i] - yref).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn solve_matches_dense_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for &n in &[8usize, 16, 32, 64] {
            let a = random_spd_like(n, 3, &mut rng);
            let lu = a.factorize().unwrap();
            let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let x = lu.solve(&rhs);
            let dense_lu = DenseLu::factorize(a.to_dense()).unwrap();
            let xref = dense_lu.solve(&rhs);
            for i in 0..n {
                assert!((x[i] - xref[i]).abs() < 1e-12, "n={n} i={i}");
            }
            // residual check
            let back = a.matvec(&x);
            for i in 0..n {
                assert!((back[i] - rhs[i]).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn solve_matches_dense_complex() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 24;
        let mut a = CyclicBandedMatrix::<Complex64>::zeros(n, 3);
        for i in 0..n {
            for d in -3i64..=3 {
                a.add_at_offset(
                    i,
                    d,
                    Complex64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)),
                );
            }
            a.add_at_offset(i, 0, Complex64::new(5.0, 1.0));
        }
        let rhs: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let x = a.factorize().unwrap().solve(&rhs);
        let xref = DenseLu::factorize(a.to_dense()).unwrap().solve(&rhs);
        for i in 0..n {
            assert!((x[i] - xref[i]).norm() < 1e-11);
        }
    }

    #[test]
    fn structural_symmetry_retained() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_spd_like(16, 3, &mut rng);
        let d = a.to_dense();
        for i in 0..16 {
            for j in 0..16 {
                assert!((d[i][j] - d[j][i]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn singular_matrix_detected() {
        let a = CyclicBandedMatrix::<f64>::zeros(8, 2);
        assert!(a.factorize().is_err());
    }
}
