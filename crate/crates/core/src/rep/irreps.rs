//! Real matrices of the irreducible representations appearing in `U`.

use super::RepError;
use crate::groups::{cyclic_permutation, GroupId};
use crate::tensor::{Mat3, Ortho3};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Order of the principal axis of the dihedral groups.
fn dihedral_order(k: GroupId) -> Option<usize> {
    use GroupId::*;
    match k {
        K5 => Some(2),
        K6 | K12 => Some(4),
        K7 | K11 => Some(6),
        K10 => Some(3),
        K13 => Some(8),
        _ => None,
    }
}

fn proper(g: &Ortho3) -> Mat3 {
    *g.proper().matrix()
}

enum Dihedral {
    /// Rotation about `z` by the angle.
    Rotation(f64),
    /// Half-turn about the horizontal axis at the azimuth.
    Flip(f64),
}

fn dihedral_part(g: &Ortho3) -> Dihedral {
    let h = proper(g);
    if h[(2, 2)] > 0.0 {
        Dihedral::Rotation(h[(1, 0)].atan2(h[(0, 0)]))
    } else {
        // h = 2aaᵀ − I with a = (cos α, sin α, 0)
        Dihedral::Flip(0.5 * h[(1, 0)].atan2(h[(0, 0)]))
    }
}

fn steps(angle: f64, unit: f64) -> i64 {
    (angle / unit).round() as i64
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn rot2(t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[t.cos(), -t.sin(), t.sin(), t.cos()])
}

/// Power `k` with `h = d·c^k`, `d` diagonal, `c` the cyclic permutation.
fn cyclic_class(h: &Mat3) -> usize {
    let c = *cyclic_permutation().matrix();
    let mut ck = Mat3::identity();
    for k in 0..3 {
        // h·c^{-k} diagonal
        let d = h * ck.transpose();
        if (d - Mat3::from_diagonal(&d.diagonal())).abs().max() < 1e-9 {
            return k;
        }
        ck = c * ck;
    }
    unreachable!("element outside the tetrahedral group")
}

/// `ρ(g)` for the irrep `label` of the finite group `k`. Inversion acts
/// trivially on every `g` irrep, so only the proper part of `g` is used.
pub fn irrep_matrix(k: GroupId, label: &str, g: &Ortho3) -> Result<DMatrix<f64>, RepError> {
    let unknown = || RepError::UnknownIrrep { group: k, label: label.to_string() };
    if !k.is_finite() {
        return Err(unknown());
    }
    match label {
        "Ag" | "A1g" => return Ok(DMatrix::identity(1, 1)),
        _ => {}
    }
    if let Some(n) = dihedral_order(k) {
        let unit = PI / n as f64;
        let part = dihedral_part(g);
        // for D8 the B labels follow the convention where the twofold axes
        // of the tetragonal subgroup carry the sign −1 in B1
        let label = match (k, label) {
            (GroupId::K13, "B1g") => "B2g",
            (GroupId::K13, "B2g") => "B1g",
            _ => label,
        };
        let one = |v: f64| Ok(DMatrix::from_element(1, 1, v));
        return match (label, part) {
            ("A2g", Dihedral::Rotation(_)) => one(1.0),
            ("A2g", Dihedral::Flip(_)) => one(-1.0),
            ("B1g", Dihedral::Rotation(t)) | ("B2g", Dihedral::Rotation(t)) => one(parity(steps(t, 2.0 * unit))),
            ("B1g", Dihedral::Flip(a)) => one(parity(steps(a, unit))),
            ("B2g", Dihedral::Flip(a)) => one(-parity(steps(a, unit))),
            (l, part) if l.starts_with('E') && l.ends_with('g') => {
                let j: f64 = l[1..l.len() - 1].parse().unwrap_or(1.0);
                Ok(match part {
                    Dihedral::Rotation(t) => rot2(j * t),
                    Dihedral::Flip(a) => {
                        let (c, s) = ((2.0 * j * a).cos(), (2.0 * j * a).sin());
                        DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
                    }
                })
            }
            _ => Err(unknown()),
        };
    }
    match (k, label) {
        (GroupId::K8, "1Eg+2Eg") => {
            let kk = cyclic_class(&proper(g));
            Ok(rot2(2.0 * PI * kk as f64 / 3.0))
        }
        (GroupId::K9, "Eg") | (GroupId::K15, "Eg") => {
            let b = plane_basis();
            let p = proper(g).abs();
            Ok(DMatrix::from_fn(2, 2, |i, j| (b.column(i).transpose() * p * b.column(j))[(0, 0)]))
        }
        _ => Err(unknown()),
    }
}

/// Orthonormal basis of the plane `x + y + z = 0`, as columns.
fn plane_basis() -> nalgebra::Matrix3x2<f64> {
    let a = nalgebra::Vector3::new(1.0, -1.0, 0.0) / 2f64.sqrt();
    let b = nalgebra::Vector3::new(1.0, 1.0, -2.0) / 6f64.sqrt();
    nalgebra::Matrix3x2::from_columns(&[a, b])
}
