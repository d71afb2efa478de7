//! Exact-arithmetic engine for truncated formal power series over matrix
//! variables, implementing, verifying and normalizing formal holomorphic
//! embeddings between BSD-models (Heisenberg-type quadric models of Shilov
//! boundaries of type-I bounded symmetric domains), up to the classifier
//! deciding equivalence to the linear or Whitney-type class.
//!
//! The crate is `no_std` (alloc required); IO, file formats and the CLI live
//! in the companion `bsdm-cli` crate.

#![no_std]

extern crate alloc;

pub mod error;
pub mod scalar;
pub mod series;
pub mod matser;
pub mod numeric;
pub mod model;
pub mod autgroup;
pub mod normalize;

pub use error::{Error, Result};
pub use scalar::{Backend, Scalar};
pub use series::{Monomial, Signature, TSeries, Var, VarKind};
pub use matser::{MatrixSeries, ScalarMat};
