//! Dense complex binary64 matrices and deterministic random sampling of
//! Shilov boundaries and model points. Kept small on purpose: LU solves,
//! modified Gram–Schmidt, and a ChaCha-based Gaussian source are all the
//! numerics the engine needs.

use alloc::vec::Vec;

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zero(rows: usize, cols: usize) -> CMat {
        CMat {
            rows,
            cols,
            data: alloc::vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> CMat {
        let mut m = CMat::zero(n, n);
        for k in 0..n {
            m.set(k, k, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> CMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows);
        let mut out = CMat::zero(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    let v = out.get(i, j) + a * rhs.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) + rhs.get(i, j))
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) - rhs.get(i, j))
    }

    pub fn scale(&self, c: Complex64) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j) * c)
    }

    pub fn herm(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Solve A·X = B by LU with partial pivoting (A square).
    pub fn solve(&self, b: &CMat) -> Result<CMat> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut x = b.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a.get(col, col).norm();
            for r in col + 1..n {
                let m = a.get(r, col).norm();
                if m > best {
                    best = m;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Err(Error::SingularConstantTerm);
            }
            if piv != col {
                for j in 0..n {
                    let t = a.get(col, j);
                    a.set(col, j, a.get(piv, j));
                    a.set(piv, j, t);
                }
                for j in 0..x.cols {
                    let t = x.get(col, j);
                    x.set(col, j, x.get(piv, j));
                    x.set(piv, j, t);
                }
            }
            let d = a.get(col, col);
            for r in col + 1..n {
                let factor = a.get(r, col) / d;
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a.get(r, j) - factor * a.get(col, j);
                    a.set(r, j, v);
                }
                for j in 0..x.cols {
                    let v = x.get(r, j) - factor * x.get(col, j);
                    x.set(r, j, v);
                }
            }
        }
        // Back substitution.
        for col in (0..n).rev() {
            let d = a.get(col, col);
            for j in 0..x.cols {
                let mut acc = x.get(col, j);
                for k in col + 1..n {
                    acc -= a.get(col, k) * x.get(k, j);
                }
                x.set(col, j, acc / d);
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.solve(&CMat::identity(self.rows))
    }

    /// Orthonormalize columns by modified Gram–Schmidt with one
    /// re-orthogonalization pass.
    pub fn orthonormalize_columns(&self) -> Result<CMat> {
        let mut m = self.clone();
        for j in 0..m.cols {
            for _pass in 0..2 {
                for k in 0..j {
                    // proj = ⟨col_j, col_k⟩
                    let mut proj = Complex64::new(0.0, 0.0);
                    for r in 0..m.rows {
                        proj += m.get(r, k).conj() * m.get(r, j);
                    }
                    for r in 0..m.rows {
                        let v = m.get(r, j) - proj * m.get(r, k);
                        m.set(r, j, v);
                    }
                }
            }
            let mut norm2 = 0.0;
            for r in 0..m.rows {
                norm2 += m.get(r, j).norm_sqr();
            }
            if norm2 < 1e-24 {
                return Err(Error::SingularConstantTerm);
            }
            let inv = 1.0 / libm::sqrt(norm2);
            for r in 0..m.rows {
                let v = m.get(r, j) * inv;
                m.set(r, j, v);
            }
        }
        Ok(m)
    }
}

/// Deterministic Gaussian source seeded from a u64.
pub struct GaussianRng {
    rng: ChaCha12Rng,
    spare: Option<f64>,
}

impl GaussianRng {
    pub fn new(seed: u64) -> GaussianRng {
        GaussianRng {
            rng: ChaCha12Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    fn uniform01(&mut self) -> f64 {
        // 53 random bits into (0,1].
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 1.0) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        let u1 = self.uniform01();
        let u2 = self.uniform01();
        let r = libm::sqrt(-2.0 * libm::log(u1));
        let theta = 2.0 * core::f64::consts::PI * u2;
        self.spare = Some(r * libm::sin(theta));
        r * libm::cos(theta)
    }

    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    pub fn gaussian_matrix(&mut self, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| self.complex_normal())
    }

    /// Uniform small rational-style integer in [-bound, bound].
    pub fn int_in(&mut self, bound: u64) -> i64 {
        let span = 2 * bound + 1;
        (self.rng.next_u64() % span) as i64 - bound as i64
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solve_round_trip() {
        let mut rng = GaussianRng::new(42);
        let a = rng.gaussian_matrix(5, 5);
        let b = rng.gaussian_matrix(5, 2);
        let x = a.solve(&b).unwrap();
        let back = a.mul(&x);
        assert!(back.sub(&b).max_abs() < 1e-10);
    }

    #[test]
    fn mgs_gives_orthonormal_columns() {
        let mut rng = GaussianRng::new(7);
        let a = rng.gaussian_matrix(6, 3);
        let q = a.orthonormalize_columns().unwrap();
        let g = q.herm().mul(&q);
        assert!(g.sub(&CMat::identity(3)).max_abs() < 1e-12);
    }

    #[test]
    fn gaussian_is_seed_deterministic() {
        let mut a = GaussianRng::new(123);
        let mut b = GaussianRng::new(123);
        for _ in 0..100 {
            assert_eq!(a.normal().to_bits(), b.normal().to_bits());
        }
    }
}
