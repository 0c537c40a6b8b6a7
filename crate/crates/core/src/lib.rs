//! Random fields of elasticity tensors that are homogeneous and isotropic
//! with respect to a point group acting on a fixed-point space `V^H`.
//!
//! Layers, bottom up:
//! - [`tensor`]: 21-component storage, the orthogonal action, Ogden tensors and
//!   the rank-8 invariant couplings `L^q`.
//! - [`groups`]: the sixteen group cases `K1`..`K16`, orbit strata, stabilizers.
//! - [`rep`]: spherical harmonics, coupling coefficients, fixed-point bases and
//!   isotypic decompositions.
//! - [`covariance`]: spectral densities, field specifications and kernels.
//! - [`simulate`] and [`estimate`]: spectral sampling and Monte Carlo checks.

pub mod covariance;
pub mod estimate;
pub mod groups;
pub mod linalg;
pub mod rep;
pub mod simulate;
pub mod special;
pub mod tensor;

pub use covariance::{FMatrix, FieldSpec, SpectralAtom};
pub use groups::GroupId;
pub use tensor::{ElasTensor, Ortho3, Tensor21, Vec3};
