//! Spectral densities `f`, field specifications and the one- and two-point
//! correlation tensors.
//!
//! All matrices act on the host space of the group case (see
//! [`crate::rep::host_basis`]) in its orthonormal coordinates. The spectral
//! measure is a finite list of atoms.

mod isotropic;
mod kernel;
mod validate;

pub use isotropic::{from_u, h_relations, kernel_o3_quadrature, phi_masses, to_u, v_coordinates, RelationRow, U_COUNT};
pub use kernel::{j_functions, kernel, kernel_o2_bessel, kernel_unchecked};
pub use validate::{commutant_average, constraint_set, validate_f, Check, ConstraintSet, ValidityReport};

pub(crate) use kernel::coset_family;
pub use kernel::CosetFamily;

use crate::groups::{stratum_of, GroupId};
use crate::rep::{fixed_point_basis, host_basis, RepError};
use crate::tensor::{ElasTensor, Vec3};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CovarianceError {
    #[error("{group}: expected a {expected}×{expected} density, got {found}×{found}")]
    Dimension { group: GroupId, expected: usize, found: usize },
    #[error("density matrix is not square ({0}×{1})")]
    NotSquare(usize, usize),
    #[error("{group}: expected {expected} mean coefficients, got {found}")]
    MeanLength { group: GroupId, expected: usize, found: usize },
    #[error("atom {atom}: weight {weight} is negative or not finite")]
    Weight { atom: usize, weight: f64 },
    #[error("atom {atom}: declared stratum {declared}, the point lies in stratum {found}")]
    Stratum { atom: usize, declared: usize, found: usize },
    #[error("atom {atom}: violates {}", .violations.join(", "))]
    InvalidDensity { atom: usize, violations: Vec<String> },
    #[error("{0} is not a finite group")]
    Infinite(GroupId),
    #[error("{op} is defined for {expected}, not {found}")]
    WrongGroup { op: &'static str, expected: &'static str, found: GroupId },
    #[error("expected {expected} u-parameters, got {found}")]
    ULength { expected: usize, found: usize },
    #[error("sphere quadrature did not converge (last change {0:.3e})")]
    Quadrature(f64),
    #[error(transparent)]
    Rep(#[from] RepError),
}

/// Spectral density value: a symmetric matrix on the host space.
#[derive(Debug, Clone, PartialEq)]
pub struct FMatrix(DMatrix<f64>);

impl FMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self, CovarianceError> {
        if !m.is_square() {
            return Err(CovarianceError::NotSquare(m.nrows(), m.ncols()));
        }
        Ok(FMatrix(m))
    }

    pub fn from_row_slice(d: usize, entries: &[f64]) -> Result<Self, CovarianceError> {
        if entries.len() != d * d {
            return Err(CovarianceError::NotSquare(d, entries.len() / d.max(1)));
        }
        Ok(FMatrix(DMatrix::from_row_slice(d, d, entries)))
    }

    /// `I / d`.
    pub fn uniform(d: usize) -> Self {
        FMatrix(DMatrix::identity(d, d) / d as f64)
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    /// Scaled to unit trace.
    pub fn normalized(&self) -> Self {
        FMatrix(&self.0 / self.trace())
    }
}

/// A point mass of the spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralAtom {
    /// Wavevector. For `K2` and `K16` only `|p|` matters.
    pub p: Vec3,
    pub weight: f64,
    pub f: FMatrix,
    /// Stratum the point is declared to lie in, checked on validation.
    pub stratum: Option<usize>,
}

impl SpectralAtom {
    pub fn new(p: Vec3, weight: f64, f: FMatrix) -> Self {
        SpectralAtom { p, weight, f, stratum: None }
    }

    /// Atom at radius `lambda`, placed on the `z` axis.
    pub fn radial(lambda: f64, weight: f64, f: FMatrix) -> Self {
        Self::new(Vec3::new(0.0, 0.0, lambda), weight, f)
    }
}

/// Mean coefficients and spectral atoms of a field of case `group`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSpec {
    pub group: GroupId,
    pub mean: Vec<f64>,
    pub atoms: Vec<SpectralAtom>,
}

/// `⟨C(x), C(y)⟩` in host coordinates.
pub type KernelValue = DMatrix<f64>;

impl FieldSpec {
    /// Zero mean, no atoms.
    pub fn new(group: GroupId) -> Self {
        FieldSpec { group, mean: vec![0.0; group.trivial_multiplicity()], atoms: Vec::new() }
    }

    pub fn host_dim(&self) -> usize {
        self.group.host_dim()
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Checks shapes, weights and declared strata, then every density.
    pub fn validate(&self) -> Result<Vec<ValidityReport>, CovarianceError> {
        self.check_shape()?;
        let mut out = Vec::with_capacity(self.atoms.len());
        for (n, a) in self.atoms.iter().enumerate() {
            let r = validate_f(self.group, &a.p, &a.f)?;
            if !r.is_valid() {
                return Err(CovarianceError::InvalidDensity {
                    atom: n,
                    violations: r.violations().map(|c| c.name.clone()).collect(),
                });
            }
            out.push(r);
        }
        Ok(out)
    }

    pub(crate) fn check_shape(&self) -> Result<(), CovarianceError> {
        let k = self.group;
        if self.mean.len() != k.trivial_multiplicity() {
            return Err(CovarianceError::MeanLength { group: k, expected: k.trivial_multiplicity(), found: self.mean.len() });
        }
        let d = k.host_dim();
        for (n, a) in self.atoms.iter().enumerate() {
            if !(a.weight.is_finite() && a.weight >= 0.0) {
                return Err(CovarianceError::Weight { atom: n, weight: a.weight });
            }
            if a.f.dim() != d {
                return Err(CovarianceError::Dimension { group: k, expected: d, found: a.f.dim() });
            }
            if let Some(s) = a.stratum {
                let found = stratum_of(k, &a.p);
                if found != s {
                    return Err(CovarianceError::Stratum { atom: n, declared: s, found });
                }
            }
        }
        Ok(())
    }

    /// Mean in host coordinates.
    pub fn mean_host(&self) -> DVector<f64> {
        host_basis(self.group).coordinates(&mean_tensor(self).to_tensor21())
    }
}

/// One-point correlation tensor `Σ_m C_m T^{trivial,m,1}`.
pub fn mean_tensor(spec: &FieldSpec) -> ElasTensor {
    let b = fixed_point_basis(&spec.group.spec());
    let n = b.len().min(spec.mean.len());
    let mut c = vec![0.0; b.len()];
    c[..n].copy_from_slice(&spec.mean[..n]);
    b.embed(&c).to_elas()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::enumerate_elements;
    use crate::tensor::rotate_tensor;

    #[test]
    fn zero_mean_is_zero_tensor() {
        for &k in &GroupId::ALL {
            assert_eq!(mean_tensor(&FieldSpec::new(k)).frobenius_norm(), 0.0);
        }
    }

    #[test]
    fn isotropic_mean_matches_lame_form() {
        // coordinates of λδδ + μ(δδ + δδ) in the fixed basis
        let (lam, mu) = (1.7, 0.4);
        let t = ElasTensor::isotropic(lam, mu);
        let b = fixed_point_basis(&GroupId::K16.spec());
        let c = b.coordinates(&t.to_tensor21());
        let spec = FieldSpec { group: GroupId::K16, mean: c.as_slice().to_vec(), atoms: vec![] };
        let m = mean_tensor(&spec);
        for n in 0..21 {
            assert!((m.components()[n] - t.components()[n]).abs() < 1e-13);
        }
    }

    #[test]
    fn cubic_mean_is_fixed() {
        let spec = FieldSpec { group: GroupId::K15, mean: vec![1.0, 0.0, 0.0], atoms: vec![] };
        let m = mean_tensor(&spec);
        assert!(m.frobenius_norm() > 0.5);
        for g in enumerate_elements(GroupId::K9).unwrap() {
            let r = rotate_tensor(g, &m);
            for n in 0..21 {
                assert!((r.components()[n] - m.components()[n]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shape_errors() {
        let mut s = FieldSpec::new(GroupId::K5);
        s.mean.pop();
        assert!(matches!(s.validate(), Err(CovarianceError::MeanLength { .. })));
        let mut s = FieldSpec::new(GroupId::K5);
        s.atoms.push(SpectralAtom::new(Vec3::new(1.0, 2.0, 3.0), -1.0, FMatrix::uniform(9)));
        assert!(matches!(s.validate(), Err(CovarianceError::Weight { .. })));
        s.atoms[0].weight = 1.0;
        s.atoms[0].f = FMatrix::uniform(4);
        assert!(matches!(s.validate(), Err(CovarianceError::Dimension { .. })));
        s.atoms[0].f = FMatrix::uniform(9);
        s.atoms[0].stratum = Some(1);
        assert!(matches!(s.validate(), Err(CovarianceError::Stratum { .. })));
        s.atoms[0].stratum = None;
        assert!(s.validate().is_ok());
    }
}
