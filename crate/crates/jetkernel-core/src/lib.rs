//! Exact computer algebra for matrices of linear differential operators with
//! polynomial coefficients.
//!
//! The crate works over exact coefficient fields (arbitrary-precision
//! rationals or integers mod a prime) and keeps operators in the Hasse
//! (divided-power) derivative basis, which stays well-defined in positive
//! characteristic. On top of the operator algebra it provides:
//!
//! - truncated jet algebras and the correspondence between differential
//!   operators and linear maps out of them ([`jet`]),
//! - degree-truncated polynomial kernels with stabilization scans and
//!   zero-kernel minor certificates ([`kernel`]),
//! - seeded generators for structured operator families (triangular
//!   witnesses, constant-coefficient and universal families, the
//!   infinite-kernel subspace) together with mod-p specialization
//!   ([`family`]),
//! - group actions on operators: conjugation by invertible polynomial
//!   matrices and pullback along polynomial automorphisms ([`transform`]).

pub mod error;
pub mod field;
pub mod multiindex;
pub mod poly;
pub mod matrix;
pub mod modular;
pub mod operator;
pub mod transform;
pub mod jet;
pub mod kernel;
pub mod family;

pub use error::Error;
pub use field::{FieldSpec, Scalar};
pub use multiindex::MultiIndex;
pub use poly::{Poly, PolyVec};
pub use matrix::ExactMatrix;
pub use operator::{MatrixOperator, ScalarOperator};
pub use transform::{InvertiblePolyMatrix, PolyAutomorphism};
pub use jet::{JetElement, JetLinearMap, JetPresentation};
pub use kernel::{KernelReport, SemicontinuityTable, TruncationMatrix, ZeroKernelCertificate};
pub use family::{FamilyMode, FamilySpec, SamplePoint};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
