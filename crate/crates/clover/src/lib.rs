//! Exact-arithmetic engine for the clover calculus of homology 3-spheres.
//!
//! The crate models oriented Jacobi diagrams ([`diagram`]), enumerates
//! their isomorphism classes by degree ([`enumerate`]), realizes the
//! graded groups A_k = (free abelian group on degree-k diagrams)/(AS, IHX)
//! by integer linear algebra ([`space`], [`linalg`]), models LP surgeries
//! as pure data ([`lp`], [`ylink`]), and evaluates the linking-number
//! contraction coefficients and the resulting bracket ([`contract`]).
//! All arithmetic is exact: fixed-width integers with checked operations
//! on the contraction hot path, arbitrary precision in the linear algebra.

pub mod contract;
pub mod diagram;
pub mod enumerate;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod space;
pub mod words;
pub mod ylink;

pub use error::Error;

pub type Result<T> = std::result::Result<T, Error>;
