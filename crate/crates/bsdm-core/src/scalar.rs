//! Coefficient arithmetic with two interchangeable backends: exact Gaussian
//! rationals and complex binary64, with conjugation and a partial square root
//! of positive reals.
//!
//! Exact values keep fractions reduced with positive denominators (num-rational
//! maintains this on construction). Mixing backends in a binary operation is a
//! `BackendMismatch` error on the checked entry points; the series layer
//! enforces backend uniformity so its internal arithmetic uses the infallible
//! operators.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::{BigInt, Sign};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Which coefficient arithmetic a value (or a whole series) lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Float,
}

/// A Gaussian rational a + b·i with reduced components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRat { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRat {
            re: BigRational::from_integer(BigInt::from(re)),
            im: BigRational::from_integer(BigInt::from(im)),
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRat {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    fn to_c64(&self) -> Complex64 {
        Complex64::new(
            self.re.to_f64().unwrap_or(f64::NAN),
            self.im.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// A coefficient scalar over ℂ.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(GaussRat),
    Float(Complex64),
}

/// Integer square root with a perfect-square check.
fn exact_sqrt_bigint(n: &BigInt) -> Option<BigInt> {
    if n.sign() == Sign::Minus {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Square root of a nonnegative rational, exact only (perfect squares of
/// numerator and denominator).
pub fn exact_sqrt_rational(x: &BigRational) -> Option<BigRational> {
    let num = exact_sqrt_bigint(x.numer())?;
    let den = exact_sqrt_bigint(x.denom())?;
    Some(BigRational::new(num, den))
}

impl Scalar {
    pub fn backend(&self) -> Backend {
        match self {
            Scalar::Exact(_) => Backend::Exact,
            Scalar::Float(_) => Backend::Float,
        }
    }

    pub fn zero(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRat::from_ints(0, 0)),
            Backend::Float => Scalar::Float(Complex64::new(0.0, 0.0)),
        }
    }

    pub fn one(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRat::from_ints(1, 0)),
            Backend::Float => Scalar::Float(Complex64::new(1.0, 0.0)),
        }
    }

    /// The imaginary unit.
    pub fn i(backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRat::from_ints(0, 1)),
            Backend::Float => Scalar::Float(Complex64::new(0.0, 1.0)),
        }
    }

    pub fn from_int(n: i64, backend: Backend) -> Self {
        match backend {
            Backend::Exact => Scalar::Exact(GaussRat::from_ints(n, 0)),
            Backend::Float => Scalar::Float(Complex64::new(n as f64, 0.0)),
        }
    }

    pub fn from_ratio(num: i64, den: i64, backend: Backend) -> Self {
        assert!(den != 0, "zero denominator");
        match backend {
            Backend::Exact => Scalar::Exact(GaussRat::from_ratio(num, den)),
            Backend::Float => Scalar::Float(Complex64::new(num as f64 / den as f64, 0.0)),
        }
    }

    pub fn exact(re_num: i64, re_den: i64, im_num: i64, im_den: i64) -> Self {
        Scalar::Exact(GaussRat::new(
            BigRational::new(BigInt::from(re_num), BigInt::from(re_den)),
            BigRational::new(BigInt::from(im_num), BigInt::from(im_den)),
        ))
    }

    /// True structural zero (float: both parts exactly 0.0).
    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.re == 0.0 && c.im == 0.0,
        }
    }

    /// Zero test with the float tolerance; exact values ignore the tolerance.
    pub fn is_zero_tol(&self, tol: f64) -> bool {
        match self {
            Scalar::Exact(g) => g.is_zero(),
            Scalar::Float(c) => c.norm() <= tol,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(g) => g.re.is_one() && g.im.is_zero(),
            Scalar::Float(c) => c.re == 1.0 && c.im == 0.0,
        }
    }

    /// Magnitude as f64 (exact values converted).
    pub fn abs(&self) -> f64 {
        self.to_c64().norm()
    }

    pub fn to_c64(&self) -> Complex64 {
        match self {
            Scalar::Exact(g) => g.to_c64(),
            Scalar::Float(c) => *c,
        }
    }

    /// Lift to the float backend (identity on float values).
    pub fn lift_float(&self) -> Scalar {
        Scalar::Float(self.to_c64())
    }

    pub fn add(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => {
                Scalar::Exact(GaussRat::new(&a.re + &b.re, &a.im + &b.im))
            }
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a + b),
            _ => panic!("scalar backend mismatch"),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Scalar {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(GaussRat::new(-&a.re, -&a.im)),
            Scalar::Float(a) => Scalar::Float(-a),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Scalar {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(GaussRat::new(
                &a.re * &b.re - &a.im * &b.im,
                &a.re * &b.im + &a.im * &b.re,
            )),
            (Scalar::Float(a), Scalar::Float(b)) => Scalar::Float(a * b),
            _ => panic!("scalar backend mismatch"),
        }
    }

    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        match self {
            Scalar::Exact(a) => {
                let n = a.norm_sq();
                Ok(Scalar::Exact(GaussRat::new(&a.re / &n, -&a.im / &n)))
            }
            Scalar::Float(a) => Ok(Scalar::Float(a.inv())),
        }
    }

    pub fn div(&self, rhs: &Scalar) -> Result<Scalar> {
        Ok(self.mul(&rhs.inv()?))
    }

    /// Complex conjugate.
    pub fn conj(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(GaussRat::new(a.re.clone(), -&a.im)),
            Scalar::Float(a) => Scalar::Float(a.conj()),
        }
    }

    /// Checked binary ops with the spec's error contract.
    pub fn try_add(&self, rhs: &Scalar) -> Result<Scalar> {
        if self.backend() != rhs.backend() {
            return Err(Error::BackendMismatch);
        }
        Ok(self.add(rhs))
    }

    pub fn try_mul(&self, rhs: &Scalar) -> Result<Scalar> {
        if self.backend() != rhs.backend() {
            return Err(Error::BackendMismatch);
        }
        Ok(self.mul(rhs))
    }

    pub fn is_real(&self) -> bool {
        match self {
            Scalar::Exact(a) => a.im.is_zero(),
            Scalar::Float(a) => a.im == 0.0,
        }
    }

    /// Real-part sign check used by the square root and positivity gates.
    pub fn is_positive_real(&self) -> bool {
        match self {
            Scalar::Exact(a) => a.im.is_zero() && a.re.is_positive(),
            Scalar::Float(a) => a.im == 0.0 && a.re > 0.0,
        }
    }

    /// Partial square root of positive reals. Exact backend fails with
    /// `NotRepresentable` on non-perfect squares, signalling a float lift.
    pub fn sqrt_pos_real(&self) -> Result<Scalar> {
        if !self.is_positive_real() {
            return Err(Error::NotPositiveReal);
        }
        match self {
            Scalar::Exact(a) => match exact_sqrt_rational(&a.re) {
                Some(r) => Ok(Scalar::Exact(GaussRat::new(r, BigRational::zero()))),
                None => Err(Error::NotRepresentable),
            },
            Scalar::Float(a) => Ok(Scalar::Float(Complex64::new(libm::sqrt(a.re), 0.0))),
        }
    }

    pub fn pow(&self, mut n: u32) -> Scalar {
        let mut acc = Scalar::one(self.backend());
        let mut base = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Real part as a rational (exact backend only).
    pub fn exact_re(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(g) => Some(&g.re),
            Scalar::Float(_) => None,
        }
    }
}

fn fmt_rational(r: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    /// Canonical text form: exact `a/b+c/di`, float decimal literals.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(g) => {
                if g.is_zero() {
                    return write!(f, "0");
                }
                if g.im.is_zero() {
                    return fmt_rational(&g.re, f);
                }
                if g.re.is_zero() {
                    fmt_rational(&g.im, f)?;
                    return write!(f, "i");
                }
                fmt_rational(&g.re, f)?;
                if g.im.is_positive() {
                    write!(f, "+")?;
                }
                fmt_rational(&g.im, f)?;
                write!(f, "i")
            }
            Scalar::Float(c) => {
                if c.re == 0.0 && c.im == 0.0 {
                    return write!(f, "0.0");
                }
                if c.im == 0.0 {
                    return write!(f, "{:?}", c.re);
                }
                if c.re == 0.0 {
                    return write!(f, "{:?}i", c.im);
                }
                if c.im > 0.0 || c.im.is_nan() {
                    write!(f, "{:?}+{:?}i", c.re, c.im)
                } else {
                    write!(f, "{:?}{:?}i", c.re, c.im)
                }
            }
        }
    }
}

/// Parses the canonical scalar text. The backend is inferred from the
/// literals: a `.` or `e` exponent marks float, otherwise exact.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::ParseError("empty scalar".to_string()));
    }
    let is_float = s.contains('.') || s.contains('e') || s.contains('E');
    // Split into real and imaginary pieces at a '+'/'-' that is not leading
    // and not part of an exponent.
    let bytes = s.as_bytes();
    let mut split = None;
    for k in 1..bytes.len() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-')
            && !(bytes[k - 1] as char == 'e' || bytes[k - 1] as char == 'E')
        {
            split = Some(k);
        }
    }
    let (re_str, im_str) = if s.ends_with('i') {
        match split {
            Some(k) => (&s[..k], &s[k..s.len() - 1]),
            None => ("0", &s[..s.len() - 1]),
        }
    } else {
        (s, "0")
    };
    let norm_im = |t: &str| -> String {
        match t {
            "" | "+" => "1".to_string(),
            "-" => "-1".to_string(),
            other => other.to_string(),
        }
    };
    let im_str = norm_im(im_str);
    if is_float {
        let re: f64 = re_str
            .parse()
            .map_err(|_| Error::ParseError(s.to_string()))?;
        let im: f64 = im_str
            .parse()
            .map_err(|_| Error::ParseError(s.to_string()))?;
        Ok(Scalar::Float(Complex64::new(re, im)))
    } else {
        let parse_rat = |t: &str| -> Result<BigRational> {
            let t = t.trim();
            if let Some((n, d)) = t.split_once('/') {
                let n: BigInt = n.parse().map_err(|_| Error::ParseError(t.to_string()))?;
                let d: BigInt = d.parse().map_err(|_| Error::ParseError(t.to_string()))?;
                if d.is_zero() {
                    return Err(Error::ParseError("zero denominator".to_string()));
                }
                Ok(BigRational::new(n, d))
            } else {
                let n: BigInt = t.parse().map_err(|_| Error::ParseError(t.to_string()))?;
                Ok(BigRational::from_integer(n))
            }
        };
        Ok(Scalar::Exact(GaussRat::new(
            parse_rat(re_str)?,
            parse_rat(&im_str)?,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, Backend::Exact)
    }

    #[test]
    fn rational_addition() {
        let a = q(1, 2);
        let b = q(1, 3);
        assert_eq!(a.add(&b), q(5, 6));
    }

    #[test]
    fn i_squared_is_minus_one() {
        let i = Scalar::i(Backend::Exact);
        assert_eq!(i.mul(&i), Scalar::from_int(-1, Backend::Exact));
    }

    #[test]
    fn inv_of_one_plus_i() {
        // (1+i)·((1/2)−(1/2)i) = 1 by hand multiplication.
        let z = Scalar::exact(1, 1, 1, 1);
        let inv = z.inv().unwrap();
        assert_eq!(inv, Scalar::exact(1, 2, -1, 2));
        assert!(z.mul(&inv).is_one());
    }

    #[test]
    fn inv_zero_fails() {
        assert_eq!(
            Scalar::zero(Backend::Exact).inv(),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn mixed_backend_rejected() {
        let a = Scalar::one(Backend::Exact);
        let b = Scalar::one(Backend::Float);
        assert_eq!(a.try_add(&b), Err(Error::BackendMismatch));
    }

    #[test]
    fn conj_examples() {
        let z = Scalar::exact(2, 1, 3, 1);
        assert_eq!(z.conj(), Scalar::exact(2, 1, -3, 1));
        assert_eq!(z.conj().conj(), z);
        let r = Scalar::from_int(5, Backend::Exact);
        assert_eq!(r.conj(), r);
    }

    #[test]
    fn conj_is_ring_involution() {
        let a = Scalar::exact(3, 7, -2, 5);
        let b = Scalar::exact(-1, 4, 9, 2);
        assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
        assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
    }

    #[test]
    fn sqrt_examples() {
        // Lemma-style V=√a at a=4 gives 2.
        assert_eq!(
            Scalar::from_int(4, Backend::Exact).sqrt_pos_real().unwrap(),
            Scalar::from_int(2, Backend::Exact)
        );
        assert_eq!(
            Scalar::one(Backend::Exact).sqrt_pos_real().unwrap(),
            Scalar::one(Backend::Exact)
        );
        assert_eq!(
            Scalar::from_int(2, Backend::Exact).sqrt_pos_real(),
            Err(Error::NotRepresentable)
        );
        assert_eq!(
            Scalar::from_int(-1, Backend::Exact).sqrt_pos_real(),
            Err(Error::NotPositiveReal)
        );
        let f = Scalar::from_int(2, Backend::Float).sqrt_pos_real().unwrap();
        let back = f.mul(&f).to_c64();
        assert!((back.re - 2.0).abs() < 1e-12);
    }

    #[test]
    fn sqrt_of_rational_square() {
        assert_eq!(q(9, 25).sqrt_pos_real().unwrap(), q(3, 5));
    }

    #[test]
    fn text_round_trip() {
        for s in [
            q(3, 4),
            Scalar::exact(1, 2, -1, 3),
            Scalar::exact(0, 1, 7, 2),
            Scalar::from_int(-2, Backend::Exact),
            Scalar::zero(Backend::Exact),
            Scalar::Float(Complex64::new(1.5, -0.25)),
            Scalar::Float(Complex64::new(0.0, 2.0)),
        ] {
            let text = alloc::format!("{s}");
            let back = parse_scalar(&text).unwrap();
            assert_eq!(back, s, "round trip of {text}");
        }
    }
}
