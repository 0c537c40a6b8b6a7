//! Representation theory of the orthogonal action on `V`: real spherical
//! harmonics, coupling coefficients, fixed-point bases `V^H`, isotypic
//! decompositions and the coupled basis of `S²(V)` used by the isotropic case.

mod basis;
mod coupled;
mod gg;
pub mod harmonics;
mod irreps;
pub mod snapshot;

pub use basis::{fixed_point_basis, host_basis, host_rep, isotypic_decomposition, projector};
pub use coupled::{
    coupled_basis, m_family_labels, m_functions, m_to_l_expansion, uncoupled_basis, uncoupled_index,
    CoupledBasisTensor, MToL, M_COUNT,
};
pub use gg::{clebsch_gordan, gg_coefficients, GGTable};
pub use harmonics::{d_matrix, harmonics, real_harmonic};
pub use irreps::irrep_matrix;

use crate::groups::{GroupError, GroupId, IrrepCount};
use crate::tensor::{Tensor21, TensorError};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RepError {
    #[error("degrees violate the triangle rule: ℓ = {l}, ℓ₁ = {l1}, ℓ₂ = {l2}")]
    Triangle { l: usize, l1: usize, l2: usize },
    #[error("degree {0} is above the supported maximum")]
    Degree(usize),
    #[error("{group} has no irrep `{label}`")]
    UnknownIrrep { group: GroupId, label: String },
    #[error("{group}: computed {found} for {label}, table lists {expected}")]
    Mismatch { group: GroupId, label: String, expected: usize, found: usize },
    #[error("L-basis expansion residual {0:.3e} above tolerance")]
    Insufficient(f64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Position of a basis element: irrep label, copy (from 1) and row (from 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisLabel {
    pub irrep: &'static str,
    pub copy: usize,
    pub row: usize,
}

/// Orthonormal tensors with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub vectors: Vec<Tensor21>,
    pub labels: Vec<BasisLabel>,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// The `21 × d` matrix with the basis tensors as columns.
    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(21, self.len(), |i, j| self.vectors[j].0[i])
    }

    /// Coordinates of `t` (orthogonal projection).
    pub fn coordinates(&self, t: &Tensor21) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.vectors.iter().map(|v| v.0.dot(&t.0)))
    }

    /// The tensor with the given coordinates.
    pub fn embed(&self, c: &[f64]) -> Tensor21 {
        assert_eq!(c.len(), self.len());
        let mut t = Tensor21::zero();
        for (v, &x) in self.vectors.iter().zip(c) {
            t.0 += v.0 * x;
        }
        t
    }

    /// Largest deviation of the Gram matrix from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.matrix();
        let n = self.len();
        (m.transpose() * &m - DMatrix::identity(n, n)).abs().max()
    }
}

/// Irreducible components found in a decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct UStructure {
    pub group: GroupId,
    pub parts: Vec<IrrepCount>,
}

impl UStructure {
    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|p| p.multiplicity * p.dim).sum()
    }

    pub fn multiplicity(&self, label: &str) -> usize {
        self.parts.iter().find(|p| p.label == label).map_or(0, |p| p.multiplicity)
    }
}

impl std::fmt::Display for UStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: Vec<String> = self
            .parts
            .iter()
            .map(|p| if p.label.contains('+') { format!("{}({})", p.multiplicity, p.label) } else { format!("{}{}", p.multiplicity, p.label) })
            .collect();
        write!(f, "{}", s.join(" + "))
    }
}
