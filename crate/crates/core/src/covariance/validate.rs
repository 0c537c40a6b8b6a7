//! Admissibility of a density value `f(p)`: nonnegative, unit trace, and
//! commuting with `U` on the stabilizer of `p`, spelled out per group case.

use super::isotropic::{h_relations, phi_masses, to_u};
use super::{CovarianceError, FMatrix};
use crate::groups::{stabilizer, stratum_of, GroupId};
use crate::linalg::min_eigenvalue;
use crate::rep::{coupled_basis, host_basis, host_rep};
use crate::tensor::{Ortho3, Vec3};
use nalgebra::DMatrix;
use std::f64::consts::{PI, SQRT_2};

pub const PSD_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-12;
pub const STRUCTURE_TOL: f64 = 1e-10;
const ORIGIN: f64 = 1e-12;

/// Which structural constraints apply at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintSet {
    /// Commutation with `U(g)` for `g` in the (finite) stabilizer.
    Stabilizer { order: usize },
    /// `K4`, `K14`: commutation with the whole of `U(O(2)×Z2c)`, i.e. the
    /// trivial block arbitrary and the blocks between copies of each `U^ℓ`
    /// proportional to the identity.
    AxialBlocks,
    /// `K16`: the 2×2 density lies in the disk `(v₁−½)² + v₂² ≤ ¼`.
    Disk,
    /// `K2`, `λ > 0`: the entry relations among the 29 free entries.
    Axial,
    /// `K2`, `λ = 0`: commutation with `O(3)` and `Φ₂({0}) = 2Φ₃({0})`.
    Origin,
}

pub fn constraint_set(k: GroupId, p: &Vec3) -> ConstraintSet {
    match k {
        GroupId::K2 if p.norm() <= ORIGIN => ConstraintSet::Origin,
        GroupId::K2 => ConstraintSet::Axial,
        GroupId::K16 => ConstraintSet::Disk,
        GroupId::K4 | GroupId::K14 => ConstraintSet::AxialBlocks,
        _ => ConstraintSet::Stabilizer { order: stabilizer(k, p).len() },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    /// Size of the violation, 0 when exactly satisfied.
    pub defect: f64,
    pub tol: f64,
}

impl Check {
    fn new(name: impl Into<String>, defect: f64, tol: f64) -> Self {
        Check { name: name.into(), defect, tol }
    }

    pub fn passed(&self) -> bool {
        self.defect <= self.tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    pub group: GroupId,
    pub stratum: usize,
    pub constraints: ConstraintSet,
    pub checks: Vec<Check>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }
}

fn commutator_defect(f: &DMatrix<f64>, us: &[DMatrix<f64>]) -> f64 {
    us.iter().map(|u| (u * f - f * u).abs().max()).fold(0.0, f64::max)
}

fn reps(k: GroupId, gs: &[Ortho3]) -> Vec<DMatrix<f64>> {
    gs.iter().map(|g| host_rep(k, g)).collect()
}

fn axial_generators() -> [Ortho3; 2] {
    [Ortho3::rot_z(1.0), Ortho3::reflection(&Vec3::y())]
}

/// Checks `f` as the density value at `p` for case `k`.
pub fn validate_f(k: GroupId, p: &Vec3, f: &FMatrix) -> Result<ValidityReport, CovarianceError> {
    let d = k.host_dim();
    if f.dim() != d {
        return Err(CovarianceError::Dimension { group: k, expected: d, found: f.dim() });
    }
    let m = f.matrix();
    let mut checks = vec![
        Check::new("symmetric", (m - m.transpose()).abs().max(), TRACE_TOL),
        Check::new("nonnegative-definite", (-min_eigenvalue(m)).max(0.0), PSD_TOL),
        Check::new("unit trace", (m.trace() - 1.0).abs(), TRACE_TOL),
    ];
    let set = constraint_set(k, p);
    match set {
        ConstraintSet::Stabilizer { .. } => {
            let us = reps(k, &stabilizer(k, p));
            checks.push(Check::new("stabilizer commutation", commutator_defect(m, &us), STRUCTURE_TOL));
        }
        ConstraintSet::AxialBlocks => {
            let us = reps(k, &[Ortho3::rot_z(1.0), Ortho3::rot_x(PI)]);
            checks.push(Check::new("block form (identity blocks)", commutator_defect(m, &us), STRUCTURE_TOL));
        }
        ConstraintSet::Disk => {
            let (v1, v2) = (m[(0, 0)], 0.5 * (m[(0, 1)] + m[(1, 0)]));
            let excess = (v1 - 0.5).powi(2) + v2 * v2 - 0.25;
            checks.push(Check::new("disk (v1-1/2)^2+v2^2<=1/4", excess.max(0.0), PSD_TOL));
        }
        ConstraintSet::Axial => {
            let us = reps(k, &axial_generators());
            checks.push(Check::new("axial commutation", commutator_defect(m, &us), STRUCTURE_TOL));
            let raw = super::isotropic::raw_frame(m);
            for r in h_relations() {
                checks.push(Check::new(r.name.clone(), r.defect(&raw), STRUCTURE_TOL));
            }
        }
        ConstraintSet::Origin => {
            let us = reps(k, &[Ortho3::rot_z(1.0), Ortho3::rot_x(SQRT_2)]);
            checks.push(Check::new("isotropic commutation", commutator_defect(m, &us), STRUCTURE_TOL));
            let [_, m2, m3] = phi_masses(&to_u(f)?);
            checks.push(Check::new("phi2phi3", (m2 - 2.0 * m3).abs(), STRUCTURE_TOL));
        }
    }
    Ok(ValidityReport { group: k, stratum: stratum_of(k, p), constraints: set, checks })
}

/// Orthogonal projection of `a` onto the matrices commuting with `U` on the
/// stabilizer of `p` (the group average of `U(g) a U(g)ᵀ`). Maps
/// nonnegative matrices to nonnegative matrices.
pub fn commutant_average(k: GroupId, p: &Vec3, a: &DMatrix<f64>) -> DMatrix<f64> {
    let avg = |gs: &[Ortho3]| {
        let mut s = DMatrix::zeros(a.nrows(), a.ncols());
        for g in gs {
            let u = host_rep(k, g);
            s += &u * a * u.transpose();
        }
        s / gs.len() as f64
    };
    // U has frequencies up to 8 under rotations about z, so 18 equally
    // spaced angles integrate the conjugation exactly
    let circle = |flip: Ortho3| -> Vec<Ortho3> {
        (0..18)
            .flat_map(|j| {
                let r = Ortho3::rot_z(2.0 * PI * j as f64 / 18.0);
                [r, r * flip]
            })
            .collect()
    };
    match constraint_set(k, p) {
        ConstraintSet::Stabilizer { .. } => avg(&stabilizer(k, p)),
        ConstraintSet::AxialBlocks => avg(&circle(Ortho3::rot_x(PI))),
        ConstraintSet::Axial => avg(&circle(Ortho3::reflection(&Vec3::y()))),
        ConstraintSet::Disk => a.clone(),
        ConstraintSet::Origin => {
            let b = host_basis(k).matrix();
            let a21 = &b * a * b.transpose();
            let mut s = DMatrix::zeros(21, 21);
            for fam in coupled_basis(0) {
                let t = DMatrix::from_fn(21, 21, |i, j| fam.pole()[(i, j)]);
                s += &t * a21.dot(&t);
            }
            b.transpose() * s * b
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::orbit_strata;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_psd(d: usize, rng: &mut impl Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        &a * a.transpose()
    }

    pub(crate) fn valid_f(k: GroupId, p: &Vec3, rng: &mut impl Rng) -> FMatrix {
        let f = commutant_average(k, p, &random_psd(k.host_dim(), rng));
        FMatrix::new(f).unwrap().normalized()
    }

    #[test]
    fn disk_examples() {
        let p = Vec3::new(0.0, 0.0, 1.0);
        let centre = FMatrix::from_row_slice(2, &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(validate_f(GroupId::K16, &p, &centre).unwrap().is_valid());
        let bad = FMatrix::from_row_slice(2, &[1.0, 0.6, 0.6, 0.0]).unwrap();
        let r = validate_f(GroupId::K16, &p, &bad).unwrap();
        assert!(!r.is_valid());
        assert!(r.violations().any(|c| c.name.starts_with("disk")));
    }

    #[test]
    fn averaged_densities_are_valid_on_every_stratum() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &k in &GroupId::ALL {
            for s in orbit_strata(k) {
                let p = s.representative * 1.3;
                let f = valid_f(k, &p, &mut rng);
                let r = validate_f(k, &p, &f).unwrap();
                assert!(r.is_valid(), "{k} stratum {}: {:?}", s.index, r.violations().collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn generic_density_fails_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for (k, p) in [
            (GroupId::K6, Vec3::new(0.0, 0.0, 1.0)),
            (GroupId::K4, Vec3::new(1.0, 0.0, 2.0)),
            (GroupId::K2, Vec3::new(0.0, 0.0, 2.0)),
            (GroupId::K2, Vec3::zeros()),
        ] {
            let f = FMatrix::new(random_psd(k.host_dim(), &mut rng)).unwrap().normalized();
            let r = validate_f(k, &p, &f).unwrap();
            assert!(!r.is_valid(), "{k}");
            assert!(r.checks[..3].iter().all(Check::passed));
        }
    }

    #[test]
    fn block_form_has_identity_blocks() {
        // the U^2 copies: the entries pairing row 1 with row 1 and row 2
        // with row 2 agree, and rows 1 and 2 do not mix
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = Vec3::new(0.3, 0.0, 1.0);
        let f = valid_f(GroupId::K4, &p, &mut rng);
        let (_, adapted) = crate::rep::isotypic_decomposition(GroupId::K4).unwrap();
        let b = host_basis(GroupId::K4).matrix().transpose() * adapted.matrix();
        let fa = b.transpose() * f.matrix() * &b;
        let idx: Vec<usize> = (0..adapted.len()).filter(|&i| adapted.labels[i].irrep != "U0gg").collect();
        for &i in &idx {
            for &j in &idx {
                let (li, lj) = (adapted.labels[i], adapted.labels[j]);
                if li.irrep != lj.irrep || li.row != lj.row {
                    assert!(fa[(i, j)].abs() < 1e-12);
                } else if li.row == 1 {
                    let (i2, j2) = (i + 1, j + 1);
                    assert!((fa[(i, j)] - fa[(i2, j2)]).abs() < 1e-12);
                }
            }
        }
        // a perturbation of one block entry is caught
        let mut g = fa.clone();
        g[(idx[0], idx[0])] += 0.01;
        g[(idx[1], idx[1])] -= 0.01;
        let back = FMatrix::new(&b * g * b.transpose()).unwrap();
        let r = validate_f(GroupId::K4, &p, &back).unwrap();
        assert!(r.violations().any(|c| c.name.starts_with("block form")));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let f = FMatrix::uniform(3);
        assert!(matches!(validate_f(GroupId::K5, &Vec3::x(), &f), Err(CovarianceError::Dimension { .. })));
    }
}
