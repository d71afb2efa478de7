//! Error type shared by every module of the engine.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the engine, from scalar arithmetic up to
/// the classification pipeline. Payloads carry enough context to pinpoint the
/// offending entry or monomial in reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    DivisionByZero,
    BackendMismatch,
    NotPositiveReal,
    /// Exact square root does not exist over the rationals; the caller may
    /// lift to the float backend and retry.
    NotRepresentable,
    CatalogMismatch,
    /// A substitution image has too low an order for truncation to be sound.
    OrderViolation(String),
    NotAUnit,
    DimensionMismatch(String),
    SingularConstantTerm,
    BasePointMismatch(String),
    /// The rearranged coefficient matrix is not Hermitian PSD of rank one;
    /// no model-preserving change exists within the tensor construction.
    NotPositiveDefinite(String),
    RealityRelationViolated(String),
    PointNotOnModel(String),
    ParameterOutOfRange(String),
    SignatureMismatch(String),
    NotAnEmbedding(String),
    GramRelationViolated(String),
    RankUndetermined(String),
    FactorizationFailed {
        row: usize,
        col: usize,
        monomial: String,
    },
    ReductionIncomplete(String),
    UnsupportedSignature(String),
    HypothesisViolated(String),
    CertificationFailed(String),
    ParseError(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::BackendMismatch => write!(f, "mixed exact/float scalar backends"),
            Error::NotPositiveReal => write!(f, "square root requires a positive real argument"),
            Error::NotRepresentable => {
                write!(f, "square root is not representable on the exact backend")
            }
            Error::CatalogMismatch => write!(f, "series drawn from different variable catalogs"),
            Error::OrderViolation(m) => write!(f, "substitution order violation: {m}"),
            Error::NotAUnit => write!(f, "series has zero constant term, not invertible"),
            Error::DimensionMismatch(m) => write!(f, "dimension mismatch: {m}"),
            Error::SingularConstantTerm => write!(f, "constant term matrix is singular"),
            Error::BasePointMismatch(m) => write!(f, "base point mismatch: {m}"),
            Error::NotPositiveDefinite(m) => {
                write!(f, "coefficient matrix not PSD of rank one: {m}")
            }
            Error::RealityRelationViolated(m) => write!(f, "reality relations violated: {m}"),
            Error::PointNotOnModel(m) => write!(f, "point does not satisfy the model equation: {m}"),
            Error::ParameterOutOfRange(m) => write!(f, "parameter out of range: {m}"),
            Error::SignatureMismatch(m) => write!(f, "signature mismatch: {m}"),
            Error::NotAnEmbedding(m) => write!(f, "not an embedding: {m}"),
            Error::GramRelationViolated(m) => write!(f, "Gram relations violated: {m}"),
            Error::RankUndetermined(m) => write!(f, "geometric rank undetermined: {m}"),
            Error::FactorizationFailed { row, col, monomial } => write!(
                f,
                "factorization failed at entry ({row},{col}), offending monomial {monomial}"
            ),
            Error::ReductionIncomplete(m) => write!(f, "reduction incomplete: {m}"),
            Error::UnsupportedSignature(m) => write!(f, "unsupported signature: {m}"),
            Error::HypothesisViolated(m) => write!(f, "theorem hypothesis violated: {m}"),
            Error::CertificationFailed(m) => {
                write!(f, "automorphism preservation certificate failed: {m}")
            }
            Error::ParseError(m) => write!(f, "parse error: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
