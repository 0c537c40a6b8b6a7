//! The sixteen group cases `K1`..`K16`, their elasticity classes, element
//! lists for the finite ones, orbit strata and isotropy subgroups.

mod strata;
mod wigner;

pub use strata::{orbit_strata, stabilizer, stratum_of, subgroups_conjugate, IsotropySubgroup, Stratum};
pub use wigner::{gordienko_unitary, wigner_matrix, wigner_to_gordienko};

use crate::tensor::{Ortho3, Vec3};
use rand::Rng;
use std::f64::consts::PI;
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("{0} is a continuous group; use its descriptor instead of an element list")]
    Continuous(GroupId),
    #[error("unknown group `{0}`")]
    Unknown(String),
    #[error("imaginary residue {0:e} after change of basis")]
    BasisMismatch(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupId {
    K1,
    K2,
    K3,
    K4,
    K5,
    K6,
    K7,
    K8,
    K9,
    K10,
    K11,
    K12,
    K13,
    K14,
    K15,
    K16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElasticityClass {
    Triclinic,
    Monoclinic,
    Orthotropic,
    Trigonal,
    Tetragonal,
    TransverseIsotropic,
    Cubic,
    Isotropic,
}

impl ElasticityClass {
    pub const ALL: [ElasticityClass; 8] = [
        ElasticityClass::Triclinic,
        ElasticityClass::Monoclinic,
        ElasticityClass::Orthotropic,
        ElasticityClass::Trigonal,
        ElasticityClass::Tetragonal,
        ElasticityClass::TransverseIsotropic,
        ElasticityClass::Cubic,
        ElasticityClass::Isotropic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ElasticityClass::Triclinic => "triclinic",
            ElasticityClass::Monoclinic => "monoclinic",
            ElasticityClass::Orthotropic => "orthotropic",
            ElasticityClass::Trigonal => "trigonal",
            ElasticityClass::Tetragonal => "tetragonal",
            ElasticityClass::TransverseIsotropic => "transverse isotropic",
            ElasticityClass::Cubic => "cubic",
            ElasticityClass::Isotropic => "isotropic",
        }
    }

    /// The symmetry group `H` of the class, given by the group case with
    /// `K = H`.
    pub fn symmetry_group(self) -> GroupId {
        match self {
            ElasticityClass::Triclinic => GroupId::K1,
            ElasticityClass::Monoclinic => GroupId::K3,
            ElasticityClass::Orthotropic => GroupId::K5,
            ElasticityClass::Trigonal => GroupId::K10,
            ElasticityClass::Tetragonal => GroupId::K12,
            ElasticityClass::TransverseIsotropic => GroupId::K14,
            ElasticityClass::Cubic => GroupId::K15,
            ElasticityClass::Isotropic => GroupId::K16,
        }
    }

    pub fn h_name(self) -> &'static str {
        self.symmetry_group().group_name()
    }

    pub fn normalizer_name(self) -> &'static str {
        match self {
            ElasticityClass::Triclinic => "O(3)",
            ElasticityClass::Monoclinic => "O(2)xZ2c",
            ElasticityClass::Orthotropic => "OxZ2c",
            ElasticityClass::Trigonal => "D6xZ2c",
            ElasticityClass::Tetragonal => "D8xZ2c",
            ElasticityClass::TransverseIsotropic => "O(2)xZ2c",
            ElasticityClass::Cubic => "OxZ2c",
            ElasticityClass::Isotropic => "O(3)",
        }
    }

    /// `dim V^H`.
    pub fn dim(self) -> usize {
        match self {
            ElasticityClass::Triclinic => 21,
            ElasticityClass::Monoclinic => 13,
            ElasticityClass::Orthotropic => 9,
            ElasticityClass::Trigonal => 6,
            ElasticityClass::Tetragonal => 6,
            ElasticityClass::TransverseIsotropic => 5,
            ElasticityClass::Cubic => 3,
            ElasticityClass::Isotropic => 2,
        }
    }
}

/// How a group is given: an explicit element list or one of the two
/// continuous families.
#[derive(Debug, Clone)]
pub enum GroupKind {
    Finite(Vec<Ortho3>),
    /// `O(2) × Z2c` with the `z`-axis as the rotation axis.
    O2xZ2c,
    O3,
}

#[derive(Debug, Clone)]
pub struct GroupSpec {
    pub id: GroupId,
    pub kind: GroupKind,
}

impl GroupSpec {
    pub fn new(id: GroupId) -> Self {
        let kind = match id {
            GroupId::K2 | GroupId::K16 => GroupKind::O3,
            GroupId::K4 | GroupId::K14 => GroupKind::O2xZ2c,
            _ => GroupKind::Finite(enumerate_elements(id).unwrap().to_vec()),
        };
        GroupSpec { id, kind }
    }

    pub fn elements(&self) -> Option<&[Ortho3]> {
        match &self.kind {
            GroupKind::Finite(e) => Some(e),
            _ => None,
        }
    }

    /// A generating set. For continuous groups this is a pair of rotations
    /// by angles incommensurate with `π`, plus the flips.
    pub fn generators(&self) -> Vec<Ortho3> {
        generators(self.id)
    }

    pub fn contains(&self, g: &Ortho3) -> bool {
        match &self.kind {
            GroupKind::Finite(e) => e.iter().any(|h| h.distance(g) < 1e-9),
            GroupKind::O3 => true,
            GroupKind::O2xZ2c => {
                let p = g.proper();
                let m = p.matrix();
                (m[(2, 2)].abs() - 1.0).abs() < 1e-9
            }
        }
    }
}

impl GroupId {
    pub const ALL: [GroupId; 16] = [
        GroupId::K1,
        GroupId::K2,
        GroupId::K3,
        GroupId::K4,
        GroupId::K5,
        GroupId::K6,
        GroupId::K7,
        GroupId::K8,
        GroupId::K9,
        GroupId::K10,
        GroupId::K11,
        GroupId::K12,
        GroupId::K13,
        GroupId::K14,
        GroupId::K15,
        GroupId::K16,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn from_number(n: usize) -> Option<GroupId> {
        GroupId::ALL.get(n.checked_sub(1)?).copied()
    }

    pub fn class(self) -> ElasticityClass {
        use GroupId::*;
        match self {
            K1 | K2 => ElasticityClass::Triclinic,
            K3 | K4 => ElasticityClass::Monoclinic,
            K5 | K6 | K7 | K8 | K9 => ElasticityClass::Orthotropic,
            K10 | K11 => ElasticityClass::Trigonal,
            K12 | K13 => ElasticityClass::Tetragonal,
            K14 => ElasticityClass::TransverseIsotropic,
            K15 => ElasticityClass::Cubic,
            K16 => ElasticityClass::Isotropic,
        }
    }

    pub fn group_name(self) -> &'static str {
        use GroupId::*;
        match self {
            K1 => "Z2c",
            K2 | K16 => "O(3)",
            K3 => "Z2xZ2c",
            K4 | K14 => "O(2)xZ2c",
            K5 => "D2xZ2c",
            K6 | K12 => "D4xZ2c",
            K7 | K11 => "D6xZ2c",
            K8 => "TxZ2c",
            K9 | K15 => "OxZ2c",
            K10 => "D3xZ2c",
            K13 => "D8xZ2c",
        }
    }

    pub fn is_finite(self) -> bool {
        !matches!(self, GroupId::K2 | GroupId::K4 | GroupId::K14 | GroupId::K16)
    }

    pub fn order(self) -> Option<usize> {
        use GroupId::*;
        Some(match self {
            K1 => 2,
            K3 => 4,
            K5 => 8,
            K6 | K12 => 16,
            K7 | K11 => 24,
            K8 => 24,
            K9 | K15 => 48,
            K10 => 12,
            K13 => 32,
            K2 | K4 | K14 | K16 => return None,
        })
    }

    /// Dimension of the space the field takes values in. Equal to the class
    /// dimension except for `K7`, see [`crate::rep::host_basis`].
    pub fn host_dim(self) -> usize {
        self.irreps().iter().map(|r| r.multiplicity * r.dim).sum()
    }

    /// Irreducible components of `U` with multiplicities.
    pub fn irreps(self) -> &'static [IrrepCount] {
        use GroupId::*;
        macro_rules! c {
            ($l:expr, $m:expr, $d:expr) => {
                IrrepCount { label: $l, multiplicity: $m, dim: $d }
            };
        }
        match self {
            K1 => &[c!("Ag", 21, 1)],
            K2 => &[c!("U0g", 2, 1), c!("U2g", 2, 5), c!("U4g", 1, 9)],
            K3 => &[c!("Ag", 13, 1)],
            K4 => &[c!("U0gg", 5, 1), c!("U2g", 3, 2), c!("U4g", 1, 2)],
            K5 => &[c!("Ag", 9, 1)],
            K6 => &[c!("A1g", 6, 1), c!("B1g", 3, 1)],
            K7 => &[c!("A1g", 5, 1), c!("E2g", 2, 2)],
            K8 => &[c!("Ag", 3, 1), c!("1Eg+2Eg", 3, 2)],
            K9 => &[c!("A1g", 3, 1), c!("Eg", 3, 2)],
            K10 => &[c!("A1g", 6, 1)],
            K11 => &[c!("A1g", 5, 1), c!("B1g", 1, 1)],
            K12 => &[c!("A1g", 6, 1)],
            K13 => &[c!("A1g", 5, 1), c!("B2g", 1, 1)],
            K14 => &[c!("U0gg", 5, 1)],
            K15 => &[c!("A1g", 3, 1)],
            K16 => &[c!("U0g", 2, 1)],
        }
    }

    /// Multiplicity of the trivial representation in `U`.
    pub fn trivial_multiplicity(self) -> usize {
        self.irreps()[0].multiplicity
    }

    pub fn spec(self) -> GroupSpec {
        GroupSpec::new(self)
    }

    /// A random element: uniform over the list for finite groups, random
    /// angles for the continuous ones.
    pub fn random_element<R: Rng + ?Sized>(self, rng: &mut R) -> Ortho3 {
        match self {
            GroupId::K2 | GroupId::K16 => {
                let mut a = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                if a.norm() < 1e-3 {
                    a = Vec3::z();
                }
                let g = Ortho3::rot_axis(&a, rng.gen_range(0.0..2.0 * PI));
                if rng.gen_bool(0.5) {
                    g.neg()
                } else {
                    g
                }
            }
            GroupId::K4 | GroupId::K14 => {
                let mut g = Ortho3::rot_z(rng.gen_range(0.0..2.0 * PI));
                if rng.gen_bool(0.5) {
                    g = g * Ortho3::rot_x(PI);
                }
                if rng.gen_bool(0.5) {
                    g = g.neg();
                }
                g
            }
            _ => {
                let e = enumerate_elements(self).unwrap();
                e[rng.gen_range(0..e.len())]
            }
        }
    }
}

impl fmt::Display for GroupId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K{}", self.number())
    }
}

impl std::str::FromStr for GroupId {
    type Err = GroupError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        t.strip_prefix('K')
            .or_else(|| t.strip_prefix('k'))
            .and_then(|n| n.parse::<usize>().ok())
            .and_then(GroupId::from_number)
            .ok_or_else(|| GroupError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IrrepCount {
    pub label: &'static str,
    pub multiplicity: usize,
    pub dim: usize,
}

/// Rotation by `2π/3` about `(1,1,1)`: `(x, y, z) ↦ (z, x, y)`.
pub fn cyclic_permutation() -> Ortho3 {
    Ortho3::rot_axis(&Vec3::new(1.0, 1.0, 1.0), 2.0 * PI / 3.0)
}

fn generators(id: GroupId) -> Vec<Ortho3> {
    use GroupId::*;
    let inv = Ortho3::inversion();
    let flip = Ortho3::rot_x(PI);
    let dihedral = |n: f64| vec![Ortho3::rot_z(2.0 * PI / n), flip, inv];
    match id {
        K1 => vec![inv],
        K3 => vec![Ortho3::rot_z(PI), inv],
        K5 => dihedral(2.0),
        K6 | K12 => dihedral(4.0),
        K7 | K11 => dihedral(6.0),
        K10 => dihedral(3.0),
        K13 => dihedral(8.0),
        K8 => vec![Ortho3::rot_z(PI), flip, cyclic_permutation(), inv],
        K9 | K15 => vec![Ortho3::rot_z(PI / 2.0), cyclic_permutation(), inv],
        K4 | K14 => vec![Ortho3::rot_z(1.0), flip, inv],
        K2 | K16 => vec![Ortho3::rot_z(1.0), Ortho3::rot_x(std::f64::consts::SQRT_2), inv],
    }
}

/// Closure of a finite generating set under products.
pub fn closure(gens: &[Ortho3]) -> Vec<Ortho3> {
    let mut out = vec![Ortho3::identity()];
    let mut frontier = out.clone();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for g in gens {
                let p = *g * *a;
                if !out.iter().any(|h| h.distance(&p) < 1e-9) {
                    out.push(p);
                    next.push(p);
                }
            }
        }
        frontier = next;
        assert!(out.len() <= 1024, "generators do not close to a finite group");
    }
    out
}

/// The full element list of a finite group, identity first.
pub fn enumerate_elements(id: GroupId) -> Result<&'static [Ortho3], GroupError> {
    static CACHE: OnceLock<Vec<Vec<Ortho3>>> = OnceLock::new();
    if !id.is_finite() {
        return Err(GroupError::Continuous(id));
    }
    let all = CACHE.get_or_init(|| {
        GroupId::ALL
            .iter()
            .map(|&k| if k.is_finite() { closure(&generators(k)) } else { Vec::new() })
            .collect()
    });
    Ok(&all[id as usize])
}
