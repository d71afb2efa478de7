//! Matrix algebra over coefficient scalars and over truncated series: matrix
//! products, Hermitian transpose, the pseudo-product ⟨Z,V⟩ = Z·V̄ᵗ, the ⊗
//! action of flattened coefficient matrices, the ⊙ Whitney product, and
//! Neumann-series inversion for unit-constant-term matrices.
//!
//! Flattening convention for the ⊗ action is row-major throughout:
//! w_{11},…,w_{1q},…,w_{q1},…,w_{qq} (and the same for Z).

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numeric::CMat;
use crate::scalar::{Backend, Scalar};
use crate::series::{Signature, TSeries, Var};

/// Dense matrix of coefficient scalars (row-major).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Scalar>,
}

impl ScalarMat {
    pub fn zero(rows: usize, cols: usize, backend: Backend) -> ScalarMat {
        ScalarMat {
            rows,
            cols,
            data: alloc::vec![Scalar::zero(backend); rows * cols],
        }
    }

    pub fn identity(n: usize, backend: Backend) -> ScalarMat {
        let mut m = ScalarMat::zero(n, n, backend);
        for k in 0..n {
            m.set(k, k, Scalar::one(backend));
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Scalar>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> ScalarMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        ScalarMat { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.cols + j] = v;
    }

    pub fn backend(&self) -> Backend {
        self.data
            .first()
            .map(|s| s.backend())
            .unwrap_or(Backend::Exact)
    }

    pub fn mul(&self, rhs: &ScalarMat) -> Result<ScalarMat> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "{}x{} * {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            )));
        }
        let backend = self.backend();
        let mut out = ScalarMat::zero(self.rows, rhs.cols, backend);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = Scalar::zero(backend);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ScalarMat::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).add(rhs.get(i, j))
        })
    }

    pub fn sub(&self, rhs: &ScalarMat) -> ScalarMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ScalarMat::from_fn(self.rows, self.cols, |i, j| {
            self.get(i, j).sub(rhs.get(i, j))
        })
    }

    pub fn neg(&self) -> ScalarMat {
        ScalarMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).neg())
    }

    pub fn scale(&self, c: &Scalar) -> ScalarMat {
        ScalarMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn transpose(&self) -> ScalarMat {
        ScalarMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn conj(&self) -> ScalarMat {
        ScalarMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).conj())
    }

    pub fn herm(&self) -> ScalarMat {
        ScalarMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn is_hermitian(&self) -> bool {
        self.rows == self.cols && *self == self.herm()
    }

    pub fn is_hermitian_tol(&self, tol: f64) -> bool {
        self.rows == self.cols && self.sub(&self.herm()).max_abs() <= tol
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    /// Kronecker product (row-major blocks).
    pub fn kron(&self, rhs: &ScalarMat) -> ScalarMat {
        ScalarMat::from_fn(self.rows * rhs.rows, self.cols * rhs.cols, |i, j| {
            self.get(i / rhs.rows, j / rhs.cols)
                .mul(rhs.get(i % rhs.rows, j % rhs.cols))
        })
    }

    /// Inverse by Gauss–Jordan elimination; exact over the rationals, partial
    /// pivoting on the float backend.
    pub fn inverse(&self) -> Result<ScalarMat> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("inverse of non-square".into()));
        }
        let n = self.rows;
        let backend = self.backend();
        let mut a = self.clone();
        let mut inv = ScalarMat::identity(n, backend);
        for col in 0..n {
            // Pivot: largest magnitude (float) or first nonzero (exact).
            let mut piv = None;
            let mut best = 0.0f64;
            for r in col..n {
                let mag = a.get(r, col).abs();
                if !a.get(r, col).is_zero() {
                    match backend {
                        Backend::Exact => {
                            piv = Some(r);
                            break;
                        }
                        Backend::Float => {
                            if mag > best {
                                best = mag;
                                piv = Some(r);
                            }
                        }
                    }
                }
            }
            let piv = piv.ok_or(Error::SingularConstantTerm)?;
            if piv != col {
                for j in 0..n {
                    let tmp = a.get(col, j).clone();
                    a.set(col, j, a.get(piv, j).clone());
                    a.set(piv, j, tmp);
                    let tmp = inv.get(col, j).clone();
                    inv.set(col, j, inv.get(piv, j).clone());
                    inv.set(piv, j, tmp);
                }
            }
            let d = a.get(col, col).inv()?;
            for j in 0..n {
                a.set(col, j, a.get(col, j).mul(&d));
                inv.set(col, j, inv.get(col, j).mul(&d));
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let na = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, na);
                    let ni = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, ni);
                }
            }
        }
        Ok(inv)
    }

    pub fn det(&self) -> Result<Scalar> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("det of non-square".into()));
        }
        let n = self.rows;
        let backend = self.backend();
        let mut a = self.clone();
        let mut det = Scalar::one(backend);
        for col in 0..n {
            let mut piv = None;
            for r in col..n {
                if !a.get(r, col).is_zero() {
                    piv = Some(r);
                    break;
                }
            }
            let piv = match piv {
                Some(p) => p,
                None => return Ok(Scalar::zero(backend)),
            };
            if piv != col {
                for j in 0..n {
                    let tmp = a.get(col, j).clone();
                    a.set(col, j, a.get(piv, j).clone());
                    a.set(piv, j, tmp);
                }
                det = det.neg();
            }
            det = det.mul(a.get(col, col));
            let d = a.get(col, col).inv()?;
            for r in col + 1..n {
                if a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).mul(&d);
                for j in col..n {
                    let na = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, na);
                }
            }
        }
        Ok(det)
    }

    pub fn lift_float(&self) -> ScalarMat {
        ScalarMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).lift_float())
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }
}

impl fmt::Display for ScalarMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

/// Rectangular matrix with series entries sharing one catalog and truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixSeries {
    pub rows: usize,
    pub cols: usize,
    sig: Signature,
    trunc: u32,
    backend: Backend,
    entries: Vec<TSeries>,
}

impl MatrixSeries {
    pub fn zero(
        rows: usize,
        cols: usize,
        sig: Signature,
        trunc: u32,
        backend: Backend,
    ) -> MatrixSeries {
        MatrixSeries {
            rows,
            cols,
            sig,
            trunc,
            backend,
            entries: alloc::vec![TSeries::zero(sig, trunc, backend); rows * cols],
        }
    }

    pub fn from_fn<F: FnMut(usize, usize) -> TSeries>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> MatrixSeries {
        assert!(rows * cols > 0, "empty matrix needs explicit constructor");
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        let (sig, trunc, backend) = (
            entries[0].signature(),
            entries[0].truncation(),
            entries[0].backend(),
        );
        for e in &entries {
            assert_eq!(e.signature(), sig, "mixed catalogs in MatrixSeries");
            assert_eq!(e.truncation(), trunc, "mixed truncations in MatrixSeries");
            assert_eq!(e.backend(), backend, "mixed backends in MatrixSeries");
        }
        MatrixSeries { rows, cols, sig, trunc, backend, entries }
    }

    /// The symbol matrix Z (q×N) of a signature.
    pub fn z_matrix(sig: Signature, trunc: u32, backend: Backend) -> MatrixSeries {
        MatrixSeries::from_fn(sig.q as usize, sig.n() as usize, |i, j| {
            TSeries::var(Var::z(i as u32 + 1, j as u32 + 1), sig, trunc, backend)
        })
    }

    /// The symbol matrix W (q×q) of a signature.
    pub fn w_matrix(sig: Signature, trunc: u32, backend: Backend) -> MatrixSeries {
        MatrixSeries::from_fn(sig.q as usize, sig.q as usize, |i, j| {
            TSeries::var(Var::w(i as u32 + 1, j as u32 + 1), sig, trunc, backend)
        })
    }

    pub fn identity(n: usize, sig: Signature, trunc: u32, backend: Backend) -> MatrixSeries {
        let mut m = MatrixSeries::zero(n, n, sig, trunc, backend);
        for k in 0..n {
            m.set(k, k, TSeries::one(sig, trunc, backend));
        }
        m
    }

    pub fn scalar_identity(c: &Scalar, n: usize, sig: Signature, trunc: u32) -> MatrixSeries {
        let mut m = MatrixSeries::zero(n, n, sig, trunc, c.backend());
        for k in 0..n {
            m.set(k, k, TSeries::constant(c.clone(), sig, trunc));
        }
        m
    }

    pub fn signature(&self) -> Signature {
        self.sig
    }

    pub fn truncation(&self) -> u32 {
        self.trunc
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn get(&self, i: usize, j: usize) -> &TSeries {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: TSeries) {
        assert_eq!(v.signature(), self.sig);
        assert_eq!(v.truncation(), self.trunc);
        assert_eq!(v.backend(), self.backend);
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), &TSeries)> {
        self.entries
            .iter()
            .enumerate()
            .map(|(k, e)| ((k / self.cols, k % self.cols), e))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.entries.iter().all(|e| e.is_zero_tol(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.max_abs()).fold(0.0, f64::max)
    }

    pub fn map<F: FnMut(&TSeries) -> TSeries>(&self, mut f: F) -> MatrixSeries {
        MatrixSeries {
            rows: self.rows,
            cols: self.cols,
            sig: self.sig,
            trunc: self.trunc,
            backend: self.backend,
            entries: self.entries.iter().map(|e| f(e)).collect(),
        }
    }

    pub fn try_map<F: FnMut(&TSeries) -> Result<TSeries>>(&self, mut f: F) -> Result<MatrixSeries> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            entries.push(f(e)?);
        }
        let first = &entries[0];
        let (sig, trunc, backend) = (first.signature(), first.truncation(), first.backend());
        Ok(MatrixSeries {
            rows: self.rows,
            cols: self.cols,
            sig,
            trunc,
            backend,
            entries,
        })
    }

    pub fn add(&self, rhs: &MatrixSeries) -> Result<MatrixSeries> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(Error::DimensionMismatch(alloc::format!(
                "add {}x{} and {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            )));
        }
        let mut out = self.clone();
        out.trunc = self.trunc.min(rhs.trunc);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j).add(rhs.get(i, j))?);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, rhs: &MatrixSeries) -> Result<MatrixSeries> {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> MatrixSeries {
        self.map(|e| e.neg())
    }

    pub fn scalar_mul(&self, c: &Scalar) -> MatrixSeries {
        self.map(|e| e.scalar_mul(c))
    }

    pub fn series_mul(&self, s: &TSeries) -> Result<MatrixSeries> {
        self.try_map(|e| e.mul(s))
    }

    pub fn mat_mul(&self, rhs: &MatrixSeries) -> Result<MatrixSeries> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "mat_mul {}x{} * {}x{}",
                self.rows,
                self.cols,
                rhs.rows,
                rhs.cols
            )));
        }
        let trunc = self.trunc.min(rhs.trunc);
        let mut out = MatrixSeries::zero(self.rows, rhs.cols, self.sig, trunc, self.backend);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = TSeries::zero(self.sig, trunc, self.backend);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(rhs.get(k, j))?)?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Left multiplication by a constant coefficient matrix.
    pub fn lmul_scalar(&self, m: &ScalarMat) -> Result<MatrixSeries> {
        if m.cols != self.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "lmul {}x{} * {}x{}",
                m.rows,
                m.cols,
                self.rows,
                self.cols
            )));
        }
        let mut out = MatrixSeries::zero(m.rows, self.cols, self.sig, self.trunc, self.backend);
        for i in 0..m.rows {
            for j in 0..self.cols {
                let mut acc = TSeries::zero(self.sig, self.trunc, self.backend);
                for k in 0..self.rows {
                    acc = acc.add(&self.get(k, j).scalar_mul(m.get(i, k)))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// Right multiplication by a constant coefficient matrix.
    pub fn rmul_scalar(&self, m: &ScalarMat) -> Result<MatrixSeries> {
        if self.cols != m.rows {
            return Err(Error::DimensionMismatch(alloc::format!(
                "rmul {}x{} * {}x{}",
                self.rows,
                self.cols,
                m.rows,
                m.cols
            )));
        }
        let mut out = MatrixSeries::zero(self.rows, m.cols, self.sig, self.trunc, self.backend);
        for i in 0..self.rows {
            for j in 0..m.cols {
                let mut acc = TSeries::zero(self.sig, self.trunc, self.backend);
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).scalar_mul(m.get(k, j)))?;
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> MatrixSeries {
        let mut out =
            MatrixSeries::zero(self.cols, self.rows, self.sig, self.trunc, self.backend);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Conjugate-transpose: entrywise conjugation involution, then transpose.
    pub fn herm_transpose(&self) -> MatrixSeries {
        let mut out =
            MatrixSeries::zero(self.cols, self.rows, self.sig, self.trunc, self.backend);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj_involution());
            }
        }
        out
    }

    /// Pseudo-product ⟨A,B⟩ = A·B̄ᵗ.
    pub fn pseudo_product(&self, rhs: &MatrixSeries) -> Result<MatrixSeries> {
        if self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "pseudo_product needs equal column counts, got {} and {}",
                self.cols,
                rhs.cols
            )));
        }
        self.mat_mul(&rhs.herm_transpose())
    }

    /// The ⊗ action: V is (rows·cols)² coefficients acting on the row-major
    /// flattening of this matrix.
    pub fn tensor_action(&self, v: &ScalarMat) -> Result<MatrixSeries> {
        let flat = self.rows * self.cols;
        if v.rows != flat || v.cols != flat {
            return Err(Error::DimensionMismatch(alloc::format!(
                "tensor action needs {flat}x{flat}, got {}x{}",
                v.rows,
                v.cols
            )));
        }
        let mut out = MatrixSeries::zero(self.rows, self.cols, self.sig, self.trunc, self.backend);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let row = i * self.cols + j;
                let mut acc = TSeries::zero(self.sig, self.trunc, self.backend);
                for k in 0..self.rows {
                    for l in 0..self.cols {
                        let c = v.get(row, k * self.cols + l);
                        if !c.is_zero() {
                            acc = acc.add(&self.get(k, l).scalar_mul(c))?;
                        }
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    /// The ⊙ Whitney product: `z2` is the 1×q last-row block, `z` is p×q;
    /// entry (k,j) of the result is z2_{j}·z_{kj}.
    pub fn odot(z2: &MatrixSeries, z: &MatrixSeries) -> Result<MatrixSeries> {
        if z2.rows != 1 || z2.cols != z.cols {
            return Err(Error::DimensionMismatch(alloc::format!(
                "odot needs 1x{} row block, got {}x{}",
                z.cols,
                z2.rows,
                z2.cols
            )));
        }
        let mut out = MatrixSeries::zero(z.rows, z.cols, z.sig, z.trunc, z.backend);
        for k in 0..z.rows {
            for j in 0..z.cols {
                out.set(k, j, z2.get(0, j).mul(z.get(k, j))?);
            }
        }
        Ok(out)
    }

    /// The constant-term matrix.
    pub fn constant_term(&self) -> ScalarMat {
        ScalarMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).constant_term())
    }

    /// Inverse via Neumann series after factoring out the constant part:
    /// A = C(I + H) with H of positive order, A⁻¹ = (Σ (−H)^k) C⁻¹.
    pub fn mat_inverse(&self) -> Result<MatrixSeries> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch("mat_inverse of non-square".into()));
        }
        let c = self.constant_term();
        let c_inv = c.inverse().map_err(|_| Error::SingularConstantTerm)?;
        // H = C⁻¹·A − I has order ≥ 1.
        let h = self
            .lmul_scalar(&c_inv)?
            .sub(&MatrixSeries::identity(self.rows, self.sig, self.trunc, self.backend))?;
        let mut acc = MatrixSeries::identity(self.rows, self.sig, self.trunc, self.backend);
        let mut pow = MatrixSeries::identity(self.rows, self.sig, self.trunc, self.backend);
        for k in 0..self.trunc {
            pow = pow.mat_mul(&h)?;
            if pow.is_zero() {
                break;
            }
            let signed = if k % 2 == 0 { pow.neg() } else { pow.clone() };
            acc = acc.add(&signed)?;
        }
        // A⁻¹ = (I − H + H² − …)·C⁻¹
        acc.rmul_scalar(&c_inv)
    }

    pub fn substitute<F>(&self, image: &F, out_sig: Signature, allow_const: bool) -> Result<MatrixSeries>
    where
        F: Fn(Var) -> Result<TSeries>,
    {
        self.try_map(|e| e.substitute(image, out_sig, allow_const))
    }

    pub fn truncate(&self, d: u32) -> MatrixSeries {
        let mut out = self.map(|e| e.truncate(d));
        out.trunc = d.min(self.trunc);
        out
    }

    pub fn homogeneous_part(&self, d: u32) -> MatrixSeries {
        self.map(|e| e.homogeneous_part(d))
    }

    pub fn lift_float(&self) -> MatrixSeries {
        let mut out = self.map(|e| e.lift_float());
        out.backend = Backend::Float;
        out
    }

    /// Drop float coefficients below tol in every entry.
    pub fn chop(&self, tol: f64) -> MatrixSeries {
        self.map(|e| e.chop(tol))
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixSeries {
        assert!(r0 + rows <= self.rows && c0 + cols <= self.cols);
        let mut out = MatrixSeries::zero(rows, cols, self.sig, self.trunc, self.backend);
        for i in 0..rows {
            for j in 0..cols {
                out.set(i, j, self.get(r0 + i, c0 + j).clone());
            }
        }
        out
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &MatrixSeries) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols);
        for i in 0..b.rows {
            for j in 0..b.cols {
                self.set(r0 + i, c0 + j, b.get(i, j).clone());
            }
        }
    }

    /// Stack vertically (same column count).
    pub fn vstack(top: &MatrixSeries, bottom: &MatrixSeries) -> Result<MatrixSeries> {
        if top.cols != bottom.cols {
            return Err(Error::DimensionMismatch("vstack".into()));
        }
        let mut out = MatrixSeries::zero(
            top.rows + bottom.rows,
            top.cols,
            top.sig,
            top.trunc.min(bottom.trunc),
            top.backend,
        );
        for i in 0..top.rows {
            for j in 0..top.cols {
                out.set(i, j, top.get(i, j).truncate(out.trunc));
            }
        }
        for i in 0..bottom.rows {
            for j in 0..bottom.cols {
                out.set(top.rows + i, j, bottom.get(i, j).truncate(out.trunc));
            }
        }
        Ok(out)
    }

    /// Stack horizontally (same row count).
    pub fn hstack(left: &MatrixSeries, right: &MatrixSeries) -> Result<MatrixSeries> {
        if left.rows != right.rows {
            return Err(Error::DimensionMismatch("hstack".into()));
        }
        let mut out = MatrixSeries::zero(
            left.rows,
            left.cols + right.cols,
            left.sig,
            left.trunc.min(right.trunc),
            left.backend,
        );
        for i in 0..left.rows {
            for j in 0..left.cols {
                out.set(i, j, left.get(i, j).truncate(out.trunc));
            }
            for j in 0..right.cols {
                out.set(i, left.cols + j, right.get(i, j).truncate(out.trunc));
            }
        }
        Ok(out)
    }

    /// Numeric evaluation at a point.
    pub fn eval<F>(&self, point: &F) -> CMat
    where
        F: Fn(Var) -> Complex64,
    {
        CMat::from_fn(self.rows, self.cols, |i, j| self.get(i, j).eval(point))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn sig(p: u32, q: u32) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn herm_transpose_conjugates() {
        let s = sig(3, 1);
        let iz = TSeries::var(Var::z(1, 1), s, 4, Backend::Exact)
            .scalar_mul(&Scalar::i(Backend::Exact));
        let m = MatrixSeries::from_fn(1, 1, |_, _| iz.clone());
        let h = m.herm_transpose();
        let expected = TSeries::var(Var::zbar(1, 1), s, 4, Backend::Exact)
            .scalar_mul(&Scalar::i(Backend::Exact).neg());
        assert_eq!(h.get(0, 0), &expected);
        assert_eq!(h.herm_transpose(), m);
    }

    #[test]
    fn identity_action() {
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let id = MatrixSeries::identity(1, s, 4, Backend::Exact);
        assert_eq!(id.mat_mul(&z).unwrap(), z);
    }

    #[test]
    fn pseudo_product_q1_n2() {
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let p = z.pseudo_product(&z).unwrap();
        assert_eq!(p.rows, 1);
        assert_eq!(p.cols, 1);
        // z_{11}zb_{11} + z_{12}zb_{12}
        let e = p.get(0, 0);
        assert_eq!(e.num_terms(), 2);
        use crate::series::Monomial;
        for j in 1..=2 {
            let m = Monomial::from_pairs(&[(Var::z(1, j), 1), (Var::zbar(1, j), 1)]);
            assert_eq!(e.coeff(&m), Scalar::one(Backend::Exact));
        }
    }

    #[test]
    fn pseudo_product_of_zero() {
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let zero = MatrixSeries::zero(1, 2, s, 4, Backend::Exact);
        assert!(zero.pseudo_product(&z).unwrap().is_zero());
    }

    #[test]
    fn tensor_action_identity_and_scale() {
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let id = ScalarMat::identity(2, Backend::Exact);
        assert_eq!(z.tensor_action(&id).unwrap(), z);
        let two = id.scale(&Scalar::from_int(2, Backend::Exact));
        assert_eq!(
            z.tensor_action(&two).unwrap(),
            z.scalar_mul(&Scalar::from_int(2, Backend::Exact))
        );
    }

    #[test]
    fn tensor_action_swap() {
        // q=1, N=2, V=[[0,1],[1,0]] swaps z_{11} and z_{12}.
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let mut v = ScalarMat::zero(2, 2, Backend::Exact);
        v.set(0, 1, Scalar::one(Backend::Exact));
        v.set(1, 0, Scalar::one(Backend::Exact));
        let out = z.tensor_action(&v).unwrap();
        assert_eq!(out.get(0, 0), z.get(0, 1));
        assert_eq!(out.get(0, 1), z.get(0, 0));
    }

    #[test]
    fn odot_q1_p3() {
        // Z = (z1, z2, z3)ᵗ on the boundary side is modelled here by three
        // series entries; odot gives (z3z1, z3z2, z3z3)ᵗ.
        let s = sig(4, 1); // catalog with at least 3 z's
        let d = 4;
        let zcol = MatrixSeries::from_fn(3, 1, |i, _| {
            TSeries::var(Var::z(1, i as u32 + 1), s, d, Backend::Exact)
        });
        let last = MatrixSeries::from_fn(1, 1, |_, _| {
            TSeries::var(Var::z(1, 3), s, d, Backend::Exact)
        });
        let out = MatrixSeries::odot(&last, &zcol).unwrap();
        for k in 0..3 {
            let expected = zcol.get(2, 0).mul(zcol.get(k, 0)).unwrap();
            assert_eq!(out.get(k, 0), &expected);
            assert_eq!(out.get(k, 0).order(), Some(2));
        }
        let zero = MatrixSeries::zero(1, 1, s, d, Backend::Exact);
        assert!(MatrixSeries::odot(&zero, &zcol).unwrap().is_zero());
    }

    #[test]
    fn neumann_inverse() {
        let s = sig(3, 1);
        // I + [[w]] at D=4 inverts to I − w + w².
        let w = TSeries::var(Var::w(1, 1), s, 4, Backend::Exact);
        let one = TSeries::one(s, 4, Backend::Exact);
        let a = MatrixSeries::from_fn(1, 1, |_, _| one.add(&w).unwrap());
        let inv = a.mat_inverse().unwrap();
        let w2 = w.mul(&w).unwrap();
        let expected = one.sub(&w).unwrap().add(&w2).unwrap();
        assert_eq!(inv.get(0, 0), &expected);

        let two = MatrixSeries::scalar_identity(&Scalar::from_int(2, Backend::Exact), 2, s, 4);
        let half = two.mat_inverse().unwrap();
        assert_eq!(
            half.get(0, 0).constant_term(),
            Scalar::from_ratio(1, 2, Backend::Exact)
        );

        // Multiply-back residual vanishes to truncation.
        let prod = a.mat_mul(&inv).unwrap();
        assert_eq!(prod, MatrixSeries::identity(1, s, 4, Backend::Exact));
    }

    #[test]
    fn herm_reverses_products() {
        let s = sig(3, 1);
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let a = z.pseudo_product(&z).unwrap(); // 1x1
        let b = MatrixSeries::from_fn(1, 1, |_, _| {
            TSeries::var(Var::w(1, 1), s, 4, Backend::Exact)
        });
        let lhs = a.mat_mul(&b).unwrap().herm_transpose();
        let rhs = b.herm_transpose().mat_mul(&a.herm_transpose()).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn scalar_mat_inverse_exact() {
        let m = ScalarMat::from_fn(2, 2, |i, j| {
            Scalar::from_int([[1, 2], [3, 5]][i][j], Backend::Exact)
        });
        let inv = m.inverse().unwrap();
        assert_eq!(
            m.mul(&inv).unwrap(),
            ScalarMat::identity(2, Backend::Exact)
        );
        let d = m.det().unwrap();
        assert_eq!(d, Scalar::from_int(-1, Backend::Exact));
    }
}
