//! BSD-model signatures, the model substitution eliminating W, embedding
//! residuals, the generalized Cayley transform and its inverse, transport of
//! boundary maps to model coordinates, and numeric sampling.
//!
//! The model M over a signature (p,q) is Im W = Z·Z̄ᵗ. Identity testing on M
//! goes through the Hermitian-parameter substitution W = S + i·Z·Z̄ᵗ with S
//! Hermitian: a series identity holds on M iff the substituted series
//! vanishes identically in the free variables (z, z̄, s).

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matser::MatrixSeries;
use crate::numeric::{CMat, GaussianRng};
use crate::scalar::{Backend, Scalar};
use crate::series::{Monomial, Signature, TSeries, Var, VarKind};

/// Alias kept for readability at module boundaries.
pub type ModelSignature = Signature;

/// The model substitution for one signature/truncation/backend: sends
/// w_{kl} ↦ s_{kl} + i⟨Z_k,Z_l⟩ and wb_{kl} ↦ s_{lk} − i⟨Z_l,Z_k⟩; all other
/// variables map to themselves.
pub struct ModelSubst {
    sig: Signature,
    trunc: u32,
    backend: Backend,
    w_images: Vec<TSeries>, // row-major q×q
}

impl ModelSubst {
    pub fn new(sig: Signature, trunc: u32, backend: Backend) -> ModelSubst {
        let q = sig.q as usize;
        let z = MatrixSeries::z_matrix(sig, trunc, backend);
        let gram = z.pseudo_product(&z).expect("Z has matching columns");
        let i_unit = Scalar::i(backend);
        let mut w_images = Vec::with_capacity(q * q);
        for k in 0..q {
            for l in 0..q {
                let s_var = TSeries::var(Var::s(k as u32 + 1, l as u32 + 1), sig, trunc, backend);
                let img = s_var
                    .add(&gram.get(k, l).scalar_mul(&i_unit))
                    .expect("same catalog");
                w_images.push(img);
            }
        }
        ModelSubst { sig, trunc, backend, w_images }
    }

    pub fn image(&self, v: Var) -> Result<TSeries> {
        let q = self.sig.q;
        match v.kind {
            VarKind::W => Ok(self.w_images[((v.i - 1) * q + (v.j - 1)) as usize].clone()),
            VarKind::WBar => {
                Ok(self.w_images[((v.i - 1) * q + (v.j - 1)) as usize].conj_involution())
            }
            _ => Ok(TSeries::var(v, self.sig, self.trunc, self.backend)),
        }
    }

    pub fn apply(&self, s: &TSeries) -> Result<TSeries> {
        s.substitute(&|v| self.image(v), self.sig, false)
    }

    pub fn apply_matrix(&self, m: &MatrixSeries) -> Result<MatrixSeries> {
        m.try_map(|e| self.apply(e))
    }
}

/// A pair (F, G) of matrix series over the source catalog, mapping the source
/// model into the target model: F is q'×N', G is q'×q'.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    pub source: Signature,
    pub target: Signature,
    pub f: MatrixSeries,
    pub g: MatrixSeries,
    /// Set when the embedding deliberately does not fix the origin.
    pub unrecentred: bool,
}

impl Embedding {
    pub fn new(
        source: Signature,
        target: Signature,
        f: MatrixSeries,
        g: MatrixSeries,
    ) -> Result<Embedding> {
        Self::with_flags(source, target, f, g, false)
    }

    pub fn with_flags(
        source: Signature,
        target: Signature,
        f: MatrixSeries,
        g: MatrixSeries,
        unrecentred: bool,
    ) -> Result<Embedding> {
        let (qp, np) = (target.q as usize, target.n() as usize);
        if f.rows != qp || f.cols != np {
            return Err(Error::DimensionMismatch(alloc::format!(
                "F must be {}x{}, got {}x{}",
                qp,
                np,
                f.rows,
                f.cols
            )));
        }
        if g.rows != qp || g.cols != qp {
            return Err(Error::DimensionMismatch(alloc::format!(
                "G must be {}x{}, got {}x{}",
                qp,
                qp,
                g.rows,
                g.cols
            )));
        }
        if f.signature() != source || g.signature() != source {
            return Err(Error::CatalogMismatch);
        }
        for (_, e) in f.entries().chain(g.entries()) {
            if !e.is_holomorphic() {
                return Err(Error::NotAnEmbedding(
                    "F, G must be holomorphic in the source coordinates".into(),
                ));
            }
        }
        if !unrecentred {
            let fc = f.constant_term();
            let gc = g.constant_term();
            if fc.max_abs() != 0.0 || gc.max_abs() != 0.0 {
                return Err(Error::NotAnEmbedding(
                    "F(0) = 0 and G(0) = 0 required unless flagged un-recentred".into(),
                ));
            }
        }
        Ok(Embedding { source, target, f, g, unrecentred })
    }

    pub fn truncation(&self) -> u32 {
        self.f.truncation()
    }

    pub fn backend(&self) -> Backend {
        self.f.backend()
    }

    pub fn lift_float(&self) -> Embedding {
        Embedding {
            source: self.source,
            target: self.target,
            f: self.f.lift_float(),
            g: self.g.lift_float(),
            unrecentred: self.unrecentred,
        }
    }

    pub fn truncate(&self, d: u32) -> Embedding {
        Embedding {
            source: self.source,
            target: self.target,
            f: self.f.truncate(d),
            g: self.g.truncate(d),
            unrecentred: self.unrecentred,
        }
    }

    /// F₁: rows 1..q of F.
    pub fn f1(&self) -> MatrixSeries {
        self.f.block(0, 0, self.source.q as usize, self.f.cols)
    }

    /// F₂: rows q+1..q' of F (empty when q' = q).
    pub fn f2_rows(&self) -> Option<MatrixSeries> {
        let q = self.source.q as usize;
        if self.f.rows > q {
            Some(self.f.block(q, 0, self.f.rows - q, self.f.cols))
        } else {
            None
        }
    }

    /// The f-half of F₁ (first N columns).
    pub fn f_half(&self) -> MatrixSeries {
        self.f1().block(0, 0, self.source.q as usize, self.source.n() as usize)
    }

    /// The φ-half of F₁ (columns N+1..2N); the extra components carrying the
    /// geometric rank.
    pub fn phi_half(&self) -> MatrixSeries {
        let n = self.source.n() as usize;
        self.f1().block(0, n, self.source.q as usize, n)
    }
}

/// Outcome of an identity test on the model.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    /// Substituted residual matrix in (z, z̄, s).
    pub matrix: MatrixSeries,
    /// Weighted degree up to which the residual was checked.
    pub degree: u32,
    pub is_zero: bool,
    /// Worst offending entry/monomial/coefficient when nonzero.
    pub worst: Option<((usize, usize), Monomial, Scalar)>,
}

impl ResidualReport {
    fn from_matrix(matrix: MatrixSeries, tol: f64) -> ResidualReport {
        let degree = matrix.truncation();
        let chopped = matrix.chop(tol);
        let is_zero = chopped.is_zero();
        let mut worst: Option<((usize, usize), Monomial, Scalar)> = None;
        if !is_zero {
            for ((i, j), e) in chopped.entries() {
                if let Some((m, c)) = e.worst_term() {
                    let better = match &worst {
                        None => true,
                        Some((_, _, wc)) => c.abs() > wc.abs(),
                    };
                    if better {
                        worst = Some(((i, j), m, c));
                    }
                }
            }
        }
        ResidualReport { matrix, degree, is_zero, worst }
    }

    pub fn describe(&self) -> String {
        if self.is_zero {
            alloc::format!("residual: zero to degree {}", self.degree)
        } else {
            match &self.worst {
                Some(((i, j), m, c)) => alloc::format!(
                    "residual: NONZERO to degree {}; worst entry ({},{}) monomial {} coefficient {}",
                    self.degree,
                    i,
                    j,
                    m,
                    c
                ),
                None => alloc::format!("residual: NONZERO to degree {}", self.degree),
            }
        }
    }
}

/// Embedding residual (G − Ḡᵗ)/2i − F·F̄ᵗ after model substitution; zero to
/// degree D iff the pair maps the source model into the target model to that
/// order.
pub fn residual(e: &Embedding, degree: u32, tol: f64) -> Result<ResidualReport> {
    let d = degree.min(e.truncation());
    let f = e.f.truncate(d);
    let g = e.g.truncate(d);
    let subst = ModelSubst::new(e.source, d, e.backend());
    let fm = subst.apply_matrix(&f)?;
    let gm = subst.apply_matrix(&g)?;
    let im_g = gm
        .sub(&gm.herm_transpose())?
        .scalar_mul(&Scalar::i(e.backend()).neg())
        .scalar_mul(&Scalar::from_ratio(1, 2, e.backend()));
    let ff = fm.pseudo_product(&fm)?;
    let r = im_g.sub(&ff)?;
    Ok(ResidualReport::from_matrix(r, tol))
}

/// Identity test for a self-map (Z', W') of one model: used as the
/// preservation certificate for automorphisms. Checks
/// (W' − W̄'ᵗ)/2i = Z'·Z̄'ᵗ after model substitution.
pub fn self_map_residual(
    sig: Signature,
    z_image: &MatrixSeries,
    w_image: &MatrixSeries,
    tol: f64,
) -> Result<ResidualReport> {
    let subst = ModelSubst::new(sig, z_image.truncation(), z_image.backend());
    let zm = subst.apply_matrix(z_image)?;
    let wm = subst.apply_matrix(w_image)?;
    let im_w = wm
        .sub(&wm.herm_transpose())?
        .scalar_mul(&Scalar::i(z_image.backend()).neg())
        .scalar_mul(&Scalar::from_ratio(1, 2, z_image.backend()));
    let r = im_w.sub(&zm.pseudo_product(&zm)?)?;
    Ok(ResidualReport::from_matrix(r, tol))
}

/// Symbolic generalized Cayley transform: the p×q boundary matrix
/// Z̃ = C(W,Z), with Z̃ᵗ = (W+iI)⁻¹·[W−iI, 2Z], expanded at the origin. The
/// first q rows carry the (W±iI) block, the last N rows carry 2Z.
pub fn cayley_symbolic(sig: Signature, trunc: u32, backend: Backend) -> Result<MatrixSeries> {
    let q = sig.q as usize;
    let z = MatrixSeries::z_matrix(sig, trunc, backend);
    let w = MatrixSeries::w_matrix(sig, trunc, backend);
    let i_id = MatrixSeries::scalar_identity(&Scalar::i(backend), q, sig, trunc);
    let w_plus = w.add(&i_id)?;
    let w_minus = w.sub(&i_id)?;
    let inv = w_plus.mat_inverse()?;
    let b1 = inv.mat_mul(&w_minus)?; // q×q
    let b2 = inv
        .mat_mul(&z)?
        .scalar_mul(&Scalar::from_int(2, backend)); // q×N
    MatrixSeries::vstack(&b1.transpose(), &b2.transpose())
}

/// Numeric Cayley transform of a model point.
pub fn cayley_numeric(w: &CMat, z: &CMat) -> Result<CMat> {
    let q = w.rows;
    let i_unit = Complex64::new(0.0, 1.0);
    let mut w_plus = w.clone();
    let mut w_minus = w.clone();
    for k in 0..q {
        w_plus.set(k, k, w_plus.get(k, k) + i_unit);
        w_minus.set(k, k, w_minus.get(k, k) - i_unit);
    }
    let b1 = w_plus.solve(&w_minus)?;
    let b2 = w_plus.solve(z)?.scale(Complex64::new(2.0, 0.0));
    let p = q + z.cols;
    Ok(CMat::from_fn(p, q, |i, j| {
        if i < q {
            b1.get(j, i)
        } else {
            b2.get(j, i - q)
        }
    }))
}

/// Blockwise inverse of the Cayley transform, symbolic. `zt` is a p×q matrix
/// series (possibly with constant part, e.g. an expansion around the base
/// point); requires I − ζ₁ invertible at the expansion point.
pub fn inverse_cayley_symbolic(
    sig: Signature,
    zt: &MatrixSeries,
) -> Result<(MatrixSeries, MatrixSeries)> {
    let q = sig.q as usize;
    let n = sig.n() as usize;
    if zt.rows != q + n || zt.cols != q {
        return Err(Error::DimensionMismatch(alloc::format!(
            "inverse Cayley of {}x{}, expected {}x{}",
            zt.rows,
            zt.cols,
            q + n,
            q
        )));
    }
    let backend = zt.backend();
    let trunc = zt.truncation();
    let sig_in = zt.signature();
    let zeta1 = zt.block(0, 0, q, q).transpose();
    let zeta2 = zt.block(q, 0, n, q).transpose();
    let id = MatrixSeries::identity(q, sig_in, trunc, backend);
    let w = id
        .add(&zeta1)?
        .mat_mul(&id.sub(&zeta1)?.mat_inverse()?)?
        .scalar_mul(&Scalar::i(backend));
    let i_id = MatrixSeries::scalar_identity(&Scalar::i(backend), q, sig_in, trunc);
    let z = w
        .add(&i_id)?
        .mat_mul(&zeta2)?
        .scalar_mul(&Scalar::from_ratio(1, 2, backend));
    Ok((w, z))
}

/// Numeric blockwise inverse Cayley.
pub fn inverse_cayley_numeric(sig: Signature, zt: &CMat) -> Result<(CMat, CMat)> {
    let q = sig.q as usize;
    let n = sig.n() as usize;
    let zeta1 = CMat::from_fn(q, q, |i, j| zt.get(j, i));
    let zeta2 = CMat::from_fn(q, n, |i, j| zt.get(q + j, i));
    let id = CMat::identity(q);
    let w = id
        .sub(&zeta1)
        .solve(&id.add(&zeta1))
        .map_err(|_| Error::SingularConstantTerm)?;
    // solve gives (I−ζ₁)⁻¹(I+ζ₁); multiply in the right order
    let w = w.scale(Complex64::new(0.0, 1.0));
    let mut w_plus = w.clone();
    for k in 0..q {
        w_plus.set(k, k, w_plus.get(k, k) + Complex64::new(0.0, 1.0));
    }
    let z = w_plus.mul(&zeta2).scale(Complex64::new(0.5, 0.0));
    Ok((w, z))
}

/// The Cayley image of the origin: [−I_q; 0] as a p×q numeric matrix.
pub fn base_point(sig: Signature) -> CMat {
    CMat::from_fn(sig.p as usize, sig.q as usize, |i, j| {
        if i == j && i < sig.q as usize {
            Complex64::new(-1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Which class representative to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Linear,
    Whitney,
}

/// A polynomial (or rational Möbius) self-contained boundary map, applicable
/// to boundary matrices of series or numbers. Transport via the Cayley
/// transform turns these into model embeddings.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryMap {
    /// Z ↦ [Z; 0] padded into p'×q'.
    Linear { source: Signature, target: Signature },
    /// Rows 1..p−1 copied; rows p..2p−1 carry z_{pj}·z_{kj}; zero padded.
    Whitney { source: Signature, target: Signature },
    /// φ_b(Z) = [√(1−b²)·Z′·(I−bZ″)⁻¹ ; (bI−Z″)·(I−bZ″)⁻¹] with Z″ the last
    /// q rows. Involutive; b = 0 gives (Z′, −Z″).
    Moebius {
        sig: Signature,
        b: Scalar,
        coeff: Scalar, // √(1−b²)
    },
    /// Constant unitary (boundary rotation): Z ↦ U·Z·E with U p×p unitary,
    /// E q×q unitary.
    Unitary {
        sig: Signature,
        u: crate::matser::ScalarMat,
        e: crate::matser::ScalarMat,
    },
}

impl BoundaryMap {
    pub fn source(&self) -> Signature {
        match self {
            BoundaryMap::Linear { source, .. } | BoundaryMap::Whitney { source, .. } => *source,
            BoundaryMap::Moebius { sig, .. } | BoundaryMap::Unitary { sig, .. } => *sig,
        }
    }

    pub fn target(&self) -> Signature {
        match self {
            BoundaryMap::Linear { target, .. } | BoundaryMap::Whitney { target, .. } => *target,
            BoundaryMap::Moebius { sig, .. } | BoundaryMap::Unitary { sig, .. } => *sig,
        }
    }

    /// Apply to a p×q matrix of series over any catalog.
    pub fn apply_to_series(&self, zt: &MatrixSeries) -> Result<MatrixSeries> {
        let src = self.source();
        let (p, q) = (src.p as usize, src.q as usize);
        if zt.rows != p || zt.cols != q {
            return Err(Error::DimensionMismatch(alloc::format!(
                "boundary map expects {}x{}, got {}x{}",
                p,
                q,
                zt.rows,
                zt.cols
            )));
        }
        let sig_in = zt.signature();
        let trunc = zt.truncation();
        let backend = zt.backend();
        match self {
            BoundaryMap::Linear { target, .. } => {
                let (pp, qp) = (target.p as usize, target.q as usize);
                let mut out = MatrixSeries::zero(pp, qp, sig_in, trunc, backend);
                out.set_block(0, 0, zt);
                Ok(out)
            }
            BoundaryMap::Whitney { target, .. } => {
                let (pp, qp) = (target.p as usize, target.q as usize);
                let mut out = MatrixSeries::zero(pp, qp, sig_in, trunc, backend);
                // rows 1..p−1 copied
                out.set_block(0, 0, &zt.block(0, 0, p - 1, q));
                // rows p..2p−1: entry (p−1+k, j) = z_{pj}·z_{kj}
                let last = zt.block(p - 1, 0, 1, q);
                let quad = MatrixSeries::odot(&last, zt)?;
                out.set_block(p - 1, 0, &quad);
                Ok(out)
            }
            BoundaryMap::Moebius { sig, b, coeff } => {
                let n = sig.n() as usize;
                let zp = zt.block(0, 0, n, q);
                let zpp = zt.block(n, 0, q, q);
                let b_mat = MatrixSeries::scalar_identity(b, q, sig_in, trunc);
                let id = MatrixSeries::identity(q, sig_in, trunc, backend);
                let denom = id.sub(&zpp.lmul_scalar(
                    &crate::matser::ScalarMat::identity(q, backend).scale(b),
                )?)?;
                let denom_inv = denom.mat_inverse()?;
                let top = zp.scalar_mul(coeff).mat_mul(&denom_inv)?;
                let bottom = b_mat.sub(&zpp)?.mat_mul(&denom_inv)?;
                MatrixSeries::vstack(&top, &bottom)
            }
            BoundaryMap::Unitary { u, e, .. } => zt.lmul_scalar(u)?.rmul_scalar(e),
        }
    }

    /// Numeric application.
    pub fn eval(&self, zt: &CMat) -> Result<CMat> {
        let src = self.source();
        let (p, q) = (src.p as usize, src.q as usize);
        match self {
            BoundaryMap::Linear { target, .. } => {
                let (pp, qp) = (target.p as usize, target.q as usize);
                Ok(CMat::from_fn(pp, qp, |i, j| {
                    if i < p && j < q {
                        zt.get(i, j)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }))
            }
            BoundaryMap::Whitney { target, .. } => {
                let (pp, qp) = (target.p as usize, target.q as usize);
                Ok(CMat::from_fn(pp, qp, |i, j| {
                    if j >= q {
                        Complex64::new(0.0, 0.0)
                    } else if i < p - 1 {
                        zt.get(i, j)
                    } else if i < 2 * p - 1 {
                        zt.get(p - 1, j) * zt.get(i - (p - 1), j)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                }))
            }
            BoundaryMap::Moebius { sig, b, coeff } => {
                let n = sig.n() as usize;
                let zp = CMat::from_fn(n, q, |i, j| zt.get(i, j));
                let zpp = CMat::from_fn(q, q, |i, j| zt.get(n + i, j));
                let bval = b.to_c64();
                let id = CMat::identity(q);
                let denom = id.sub(&zpp.scale(bval));
                let denom_inv = denom.inverse()?;
                let top = zp.scale(coeff.to_c64()).mul(&denom_inv);
                let bottom = id.scale(bval).sub(&zpp).mul(&denom_inv);
                Ok(CMat::from_fn(p, q, |i, j| {
                    if i < n {
                        top.get(i, j)
                    } else {
                        bottom.get(i - n, j)
                    }
                }))
            }
            BoundaryMap::Unitary { u, e, .. } => Ok(u.to_cmat().mul(zt).mul(&e.to_cmat())),
        }
    }
}

/// Möbius boundary transformation with parameter 0 ≤ b < 1; the coefficient
/// √(1−b²) is exact for Pythagorean b, otherwise `NotRepresentable` signals a
/// float lift.
pub fn moebius_map(sig: Signature, b: Scalar) -> Result<BoundaryMap> {
    let backend = b.backend();
    let one = Scalar::one(backend);
    let in_range = match &b {
        Scalar::Exact(g) => {
            use num_traits::{Signed, Zero};
            g.im.is_zero()
                && !g.re.is_negative()
                && g.re < num_rational::BigRational::from_integer(1.into())
        }
        Scalar::Float(c) => c.im == 0.0 && c.re >= 0.0 && c.re < 1.0,
    };
    if !in_range {
        return Err(Error::ParameterOutOfRange(alloc::format!(
            "moebius parameter must satisfy 0 <= b < 1, got {b}"
        )));
    }
    let coeff = if b.is_zero() {
        one.clone()
    } else {
        one.sub(&b.mul(&b)).sqrt_pos_real()?
    };
    Ok(BoundaryMap::Moebius { sig, b, coeff })
}

/// Build the boundary representative of one of the two equivalence classes.
pub fn class_representative(
    kind: ClassKind,
    source: Signature,
    target: Signature,
) -> Result<BoundaryMap> {
    if target.n() != 2 * source.n() {
        return Err(Error::DimensionMismatch(alloc::format!(
            "class representative needs p'-q' = 2(p-q): source {source}, target {target}"
        )));
    }
    match kind {
        ClassKind::Linear => {
            if target.p < source.p || target.q < source.q {
                return Err(Error::DimensionMismatch(
                    "target cannot host the linear block".into(),
                ));
            }
            Ok(BoundaryMap::Linear { source, target })
        }
        ClassKind::Whitney => {
            if target.p < 2 * source.p - 1 || target.q < source.q {
                return Err(Error::DimensionMismatch(alloc::format!(
                    "target cannot host the Whitney block: needs p' >= {}",
                    2 * source.p - 1
                )));
            }
            Ok(BoundaryMap::Whitney { source, target })
        }
    }
}

/// The displayed Whitney-type block with its natural dimensions
/// (2p−1)×q, independent of any p'−q' bookkeeping; used by the honest q>1
/// boundary-membership report.
pub fn whitney_displayed_block(source: Signature) -> Result<(BoundaryMap, Signature)> {
    let natural = Signature::new(2 * source.p - 1, source.q)?;
    Ok((
        BoundaryMap::Whitney { source, target: natural },
        natural,
    ))
}

/// Boundary-membership report for a boundary map: I_{q'} − V̄ᵗV composed with
/// the symbolic Cayley parametrization and model-substituted. Zero iff the
/// map carries the source boundary into the target boundary near the base
/// point.
pub fn boundary_membership(
    v: &BoundaryMap,
    trunc: u32,
    backend: Backend,
    tol: f64,
) -> Result<ResidualReport> {
    let source = v.source();
    let cay = cayley_symbolic(source, trunc, backend)?;
    let img = v.apply_to_series(&cay)?;
    let subst = ModelSubst::new(source, trunc, backend);
    let img_m = subst.apply_matrix(&img)?;
    let gram = img_m.herm_transpose().mat_mul(&img_m)?;
    let id = MatrixSeries::identity(gram.rows, source, trunc, backend);
    let r = id.sub(&gram)?;
    Ok(ResidualReport::from_matrix(r, tol))
}

/// Transport a boundary-to-boundary map to a model embedding via
/// inverse_cayley_target ∘ V ∘ cayley_source, expanded at the origin.
pub fn transport_boundary_map(
    v: &BoundaryMap,
    source: Signature,
    target: Signature,
    trunc: u32,
    backend: Backend,
) -> Result<Embedding> {
    if v.source() != source || v.target() != target {
        return Err(Error::SignatureMismatch(
            "boundary map signatures disagree with transport request".into(),
        ));
    }
    let cay = cayley_symbolic(source, trunc, backend)?;
    let img = v.apply_to_series(&cay)?;
    // Base point check: V(cayley(0)) must be the target base point.
    let base_t = base_point(target);
    let c0 = img.constant_term().to_cmat();
    if c0.sub(&base_t).max_abs() > 1e-12 {
        return Err(Error::BasePointMismatch(alloc::format!(
            "V maps the source base point off the target base point (error {:.3e})",
            c0.sub(&base_t).max_abs()
        )));
    }
    let (w, z) = inverse_cayley_symbolic(target, &img)?;
    Embedding::new(source, target, z, w)
}

/// Numeric Shilov-boundary samples: orthonormalized Gaussian columns,
/// deterministic per seed.
pub fn sample_shilov(sig: Signature, count: usize, seed: u64) -> Result<Vec<CMat>> {
    let mut rng = GaussianRng::new(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let g = rng.gaussian_matrix(sig.p as usize, sig.q as usize);
        out.push(g.orthonormalize_columns()?);
    }
    Ok(out)
}

/// Numeric model samples (W, Z) with W = S + i·Z·Z̄ᵗ, S random Hermitian.
pub fn sample_model(sig: Signature, count: usize, seed: u64) -> Result<Vec<(CMat, CMat)>> {
    let mut rng = GaussianRng::new(seed);
    let q = sig.q as usize;
    let n = sig.n() as usize;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let z = rng.gaussian_matrix(q, n).scale(Complex64::new(0.5, 0.0));
        let raw = rng.gaussian_matrix(q, q);
        let s = raw.add(&raw.herm()).scale(Complex64::new(0.5, 0.0));
        let zz = z.mul(&z.herm());
        let w = s.add(&zz.scale(Complex64::new(0.0, 1.0)));
        out.push((w, z));
    }
    Ok(out)
}

/// Max-norm boundary defect ‖I_q − Z̄ᵗZ‖.
pub fn boundary_defect(z: &CMat) -> f64 {
    let g = z.herm().mul(z);
    g.sub(&CMat::identity(z.cols)).max_abs()
}

/// Max-norm model defect ‖(W−W̄ᵗ)/2i − ZZ̄ᵗ‖.
pub fn model_defect(w: &CMat, z: &CMat) -> f64 {
    let im_w = w.sub(&w.herm()).scale(Complex64::new(0.0, -0.5));
    im_w.sub(&z.mul(&z.herm())).max_abs()
}

/// Assignment of catalog variables at a numeric model point (used to evaluate
/// symbolic residuals numerically).
pub fn model_point_assignment(w: &CMat, z: &CMat) -> impl Fn(Var) -> Complex64 {
    let w = w.clone();
    let z = z.clone();
    let s = {
        let zz = z.mul(&z.herm());
        w.sub(&zz.scale(Complex64::new(0.0, 1.0)))
    };
    move |v: Var| {
        let (i, j) = (v.i as usize - 1, v.j as usize - 1);
        match v.kind {
            VarKind::Z => z.get(i, j),
            VarKind::ZBar => z.get(i, j).conj(),
            VarKind::W => w.get(i, j),
            VarKind::WBar => w.get(i, j).conj(),
            VarKind::S => s.get(i, j),
            VarKind::SBar => s.get(i, j).conj(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(p: u32, q: u32) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn model_substitution_q1n1() {
        let s = sig(2, 1);
        let subst = ModelSubst::new(s, 4, Backend::Exact);
        let img = subst.image(Var::w(1, 1)).unwrap();
        // w ↦ s + i·z·z̄
        let expect = TSeries::var(Var::s(1, 1), s, 4, Backend::Exact)
            .add(
                &TSeries::var(Var::z(1, 1), s, 4, Backend::Exact)
                    .mul(&TSeries::var(Var::zbar(1, 1), s, 4, Backend::Exact))
                    .unwrap()
                    .scalar_mul(&Scalar::i(Backend::Exact)),
            )
            .unwrap();
        assert_eq!(img, expect);
        // Im part: (w − w̄)/2i ↦ z·z̄ exactly.
        let wbar = subst.image(Var::wbar(1, 1)).unwrap();
        let im = img
            .sub(&wbar)
            .unwrap()
            .scalar_mul(&Scalar::i(Backend::Exact).neg())
            .scalar_mul(&Scalar::from_ratio(1, 2, Backend::Exact));
        let zzbar = TSeries::var(Var::z(1, 1), s, 4, Backend::Exact)
            .mul(&TSeries::var(Var::zbar(1, 1), s, 4, Backend::Exact))
            .unwrap();
        assert_eq!(im, zzbar);
    }

    #[test]
    fn model_substitution_offdiag_q2() {
        let s = sig(4, 2);
        let subst = ModelSubst::new(s, 4, Backend::Exact);
        // (w₁₂ − w̄₂₁)/2i ↦ ⟨Z₁,Z₂⟩
        let w12 = subst.image(Var::w(1, 2)).unwrap();
        let wb21 = subst.image(Var::wbar(2, 1)).unwrap();
        let im = w12
            .sub(&wb21)
            .unwrap()
            .scalar_mul(&Scalar::i(Backend::Exact).neg())
            .scalar_mul(&Scalar::from_ratio(1, 2, Backend::Exact));
        let z = MatrixSeries::z_matrix(s, 4, Backend::Exact);
        let gram = z.pseudo_product(&z).unwrap();
        assert_eq!(&im, gram.get(0, 1));
    }

    #[test]
    fn linear_class_residual_vanishes() {
        // (3,1)→(5,1): F = (z₁₁, z₁₂, 0, 0), G = (w₁₁).
        let s = sig(3, 1);
        let t = sig(5, 1);
        let d = 6;
        let f = MatrixSeries::from_fn(1, 4, |_, j| {
            if j < 2 {
                TSeries::var(Var::z(1, j as u32 + 1), s, d, Backend::Exact)
            } else {
                TSeries::zero(s, d, Backend::Exact)
            }
        });
        let g = MatrixSeries::from_fn(1, 1, |_, _| {
            TSeries::var(Var::w(1, 1), s, d, Backend::Exact)
        });
        let e = Embedding::new(s, t, f, g).unwrap();
        let rep = residual(&e, d, 1e-9).unwrap();
        assert!(rep.is_zero, "{}", rep.describe());
    }

    #[test]
    fn broken_map_reports_offender() {
        // F = (2z₁₁, z₁₂, 0, 0): Im w − FF̄ᵗ picks up −3·z₁₁·z̄₁₁.
        let s = sig(3, 1);
        let t = sig(5, 1);
        let d = 6;
        let f = MatrixSeries::from_fn(1, 4, |_, j| match j {
            0 => TSeries::var(Var::z(1, 1), s, d, Backend::Exact)
                .scalar_mul(&Scalar::from_int(2, Backend::Exact)),
            1 => TSeries::var(Var::z(1, 2), s, d, Backend::Exact),
            _ => TSeries::zero(s, d, Backend::Exact),
        });
        let g = MatrixSeries::from_fn(1, 1, |_, _| {
            TSeries::var(Var::w(1, 1), s, d, Backend::Exact)
        });
        let e = Embedding::new(s, t, f, g).unwrap();
        let rep = residual(&e, d, 1e-9).unwrap();
        assert!(!rep.is_zero);
        let m = Monomial::from_pairs(&[(Var::z(1, 1), 1), (Var::zbar(1, 1), 1)]);
        assert_eq!(
            rep.matrix.get(0, 0).coeff(&m),
            Scalar::from_int(-3, Backend::Exact)
        );
    }

    #[test]
    fn cayley_examples_numeric() {
        // q=1, p=2: (w,z) = (0,0) ↦ Z̃ᵗ = (−1, 0).
        let zt = cayley_numeric(&CMat::zero(1, 1), &CMat::zero(1, 1)).unwrap();
        assert!((zt.get(0, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(zt.get(1, 0).norm() < 1e-14);
        assert!(boundary_defect(&zt) < 1e-14);

        // (w,z) = (i,1) ↦ (0, −i).
        let mut w = CMat::zero(1, 1);
        w.set(0, 0, Complex64::new(0.0, 1.0));
        let mut z = CMat::zero(1, 1);
        z.set(0, 0, Complex64::new(1.0, 0.0));
        let zt = cayley_numeric(&w, &z).unwrap();
        assert!(zt.get(0, 0).norm() < 1e-14);
        assert!((zt.get(1, 0) - Complex64::new(0.0, -1.0)).norm() < 1e-14);
        assert!(boundary_defect(&zt) < 1e-14);

        // ζ₁ = −1 inverts to w = 0.
        let (w_back, _z_back) = inverse_cayley_numeric(sig(2, 1), &base_point(sig(2, 1))).unwrap();
        assert!(w_back.get(0, 0).norm() < 1e-14);
    }

    #[test]
    fn cayley_lands_on_boundary_symbolically() {
        // I_q − C̄ᵗC vanishes after model substitution, (3,1) at D=4.
        let s = sig(3, 1);
        let c = cayley_symbolic(s, 4, Backend::Exact).unwrap();
        let subst = ModelSubst::new(s, 4, Backend::Exact);
        let cm = subst.apply_matrix(&c).unwrap();
        let gram = cm.herm_transpose().mat_mul(&cm).unwrap();
        let r = MatrixSeries::identity(1, s, 4, Backend::Exact)
            .sub(&gram)
            .unwrap();
        assert!(r.is_zero(), "nonzero: {}", r.get(0, 0));
    }

    #[test]
    fn cayley_round_trip_symbolic() {
        for s in [sig(3, 1), sig(4, 2)] {
            let d = 4;
            let c = cayley_symbolic(s, d, Backend::Exact).unwrap();
            let (w, z) = inverse_cayley_symbolic(s, &c).unwrap();
            assert_eq!(&w, &MatrixSeries::w_matrix(s, d, Backend::Exact));
            assert_eq!(&z, &MatrixSeries::z_matrix(s, d, Backend::Exact));
        }
    }

    #[test]
    fn cayley_round_trip_numeric() {
        let s = sig(3, 1);
        for (w, z) in sample_model(s, 50, 11).unwrap() {
            let zt = cayley_numeric(&w, &z).unwrap();
            assert!(boundary_defect(&zt) < 1e-10);
            let (w2, z2) = inverse_cayley_numeric(s, &zt).unwrap();
            assert!(w.sub(&w2).max_abs() < 1e-10);
            assert!(z.sub(&z2).max_abs() < 1e-10);
        }
    }

    #[test]
    fn whitney_representative_on_unit_sphere() {
        // (3,1)→(5,1): (z₁,z₂,z₃) ↦ (z₁,z₂,z₃z₁,z₃z₂,z₃²) keeps unit norm.
        let v = class_representative(ClassKind::Whitney, sig(3, 1), sig(5, 1)).unwrap();
        for z in sample_shilov(sig(3, 1), 25, 3).unwrap() {
            let img = v.eval(&z).unwrap();
            assert!(boundary_defect(&img) < 1e-12);
        }
        // Degenerate last row agrees with linear on first p−1 rows.
        let mut z = CMat::zero(3, 1);
        z.set(0, 0, Complex64::new(0.6, 0.0));
        z.set(1, 0, Complex64::new(0.8, 0.0));
        let img = v.eval(&z).unwrap();
        assert!((img.get(0, 0).re - 0.6).abs() < 1e-14);
        assert!((img.get(1, 0).re - 0.8).abs() < 1e-14);
        for r in 2..5 {
            assert!(img.get(r, 0).norm() < 1e-14);
        }
    }

    #[test]
    fn transported_representatives_have_zero_residual() {
        let d = 5;
        let s = sig(3, 1);
        let t = sig(5, 1);
        for kind in [ClassKind::Linear, ClassKind::Whitney] {
            let v = class_representative(kind, s, t).unwrap();
            let e = transport_boundary_map(&v, s, t, d, Backend::Exact).unwrap();
            let rep = residual(&e, d, 1e-9).unwrap();
            assert!(rep.is_zero, "{:?}: {}", kind, rep.describe());
        }
    }

    #[test]
    fn transport_of_scaled_map_reports_nonzero() {
        // Scaling the linear representative by 2 is not boundary-preserving;
        // transport must fail the base-point check... the base point scales
        // too, so instead perturb by zeroing one row of the copy: that moves
        // the boundary image while fixing the base point? Simplest honest
        // check: compose with a non-unitary "rotation".
        let s = sig(3, 1);
        let t = sig(5, 1);
        let mut u = crate::matser::ScalarMat::identity(5, Backend::Exact);
        u.set(3, 3, Scalar::from_int(2, Backend::Exact)); // breaks unitarity off the base point
        let v = class_representative(ClassKind::Whitney, s, t).unwrap();
        let cay = cayley_symbolic(s, 4, Backend::Exact).unwrap();
        let img = v
            .apply_to_series(&cay)
            .unwrap()
            .lmul_scalar(&u)
            .unwrap();
        let (w, z) = inverse_cayley_symbolic(t, &img).unwrap();
        let e = Embedding::new(s, t, z, w).unwrap();
        let rep = residual(&e, 4, 1e-9).unwrap();
        assert!(!rep.is_zero);
    }

    #[test]
    fn shilov_samples_are_deterministic_and_on_boundary() {
        let s = sig(3, 1);
        let a = sample_shilov(s, 5, 99).unwrap();
        let b = sample_shilov(s, 5, 99).unwrap();
        assert_eq!(a, b);
        for z in &a {
            assert!(boundary_defect(z) < 1e-12);
        }
        for (w, z) in sample_model(s, 5, 99).unwrap() {
            assert!(model_defect(&w, &z) < 1e-12);
        }
    }
}
