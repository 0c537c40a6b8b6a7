//! Rank-4 elasticity tensors over R³ and their 21-dimensional coordinates.
//!
//! Components are enumerated in the fixed order below, written with axis
//! labels `-1 → y`, `0 → z`, `1 → x`:
//!
//! ```text
//!  1 yyyy   2 zzzz   3 xxxx   4 zxzx   5 yxyx   6 yzyz   7 yyzz
//!  8 yyxx   9 zzxx  10 yxyz  11 yyzx  12 xxzx  13 zzzx  14 zxyx
//! 15 xxyz  16 yyyz  17 zzyz  18 zxyz  19 yyyx  20 xxyx  21 zzyx
//! ```
//!
//! [`ElasTensor`] holds the raw components `C_ijkl`; [`Tensor21`] holds
//! orthonormal (Kelvin) coordinates `W_I·C_I` where `W_I² ` is the number of
//! index quadruples equivalent to `I` under the minor and major symmetries.
//! With this scaling the Euclidean product of [`Tensor21`] equals the
//! Frobenius product of the full tensors.

mod lfun;
mod ogden;

pub use lfun::{l_function, l_function_raw, l_symmetry_defect, Rank8Block, L_COUNT};
pub use ogden::{ogden_tensor, OgdenTensor};

use nalgebra::{Matrix3, SMatrix, SVector, Vector3};
use std::sync::OnceLock;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat21 = SMatrix<f64, 21, 21>;
pub type Vec21 = SVector<f64, 21>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("matrix is not orthogonal (|gᵀg − I| = {0:.3e})")]
    NotOrthogonal(f64),
    #[error("Ogden tensor order {0} out of range 0..=3")]
    OgdenOrder(usize),
    #[error("L-function index {0} out of range 1..=29")]
    LIndex(usize),
    #[error("L-function {0} is singular at x = 0")]
    SingularInput(usize),
}

/// Axis triples of the 21 independent components, in storage order.
pub const COMPONENTS: [[usize; 4]; 21] = [
    [1, 1, 1, 1],
    [2, 2, 2, 2],
    [0, 0, 0, 0],
    [2, 0, 2, 0],
    [1, 0, 1, 0],
    [1, 2, 1, 2],
    [1, 1, 2, 2],
    [1, 1, 0, 0],
    [2, 2, 0, 0],
    [1, 0, 1, 2],
    [1, 1, 2, 0],
    [0, 0, 2, 0],
    [2, 2, 2, 0],
    [2, 0, 1, 0],
    [0, 0, 1, 2],
    [1, 1, 1, 2],
    [2, 2, 1, 2],
    [2, 0, 1, 2],
    [1, 1, 1, 0],
    [0, 0, 1, 0],
    [2, 2, 1, 0],
];

/// Compact labels of [`COMPONENTS`] (`-1`, `0`, `1` per slot).
pub const COMPONENT_LABELS: [&str; 21] = [
    "-1-1-1-1", "0000", "1111", "0101", "-11-11", "-10-10", "-1-100", "-1-111", "0011", "-11-10",
    "-1-101", "1101", "0001", "01-11", "11-10", "-1-1-10", "00-10", "01-10", "-1-1-11", "11-11",
    "00-11",
];

struct Tables {
    index: [u8; 81],
    orbits: [Vec<[usize; 4]>; 21],
    weight: [f64; 21],
}

fn flat(i: usize, j: usize, k: usize, l: usize) -> usize {
    ((i * 3 + j) * 3 + k) * 3 + l
}

fn orbit_of(c: [usize; 4]) -> Vec<[usize; 4]> {
    let [i, j, k, l] = c;
    let mut out: Vec<[usize; 4]> = Vec::new();
    for (a, b) in [(i, j), (j, i)] {
        for (p, q) in [(k, l), (l, k)] {
            for t in [[a, b, p, q], [p, q, a, b]] {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut index = [u8::MAX; 81];
        let orbits: [Vec<[usize; 4]>; 21] = std::array::from_fn(|n| orbit_of(COMPONENTS[n]));
        let mut weight = [0.0; 21];
        for n in 0..21 {
            weight[n] = (orbits[n].len() as f64).sqrt();
            for t in &orbits[n] {
                index[flat(t[0], t[1], t[2], t[3])] = n as u8;
            }
        }
        assert!(index.iter().all(|&v| v != u8::MAX));
        Tables { index, orbits, weight }
    })
}

/// Storage index of the component `C_ijkl` (axes 0 = x, 1 = y, 2 = z).
pub fn component_index(i: usize, j: usize, k: usize, l: usize) -> usize {
    tables().index[flat(i, j, k, l)] as usize
}

/// All index quadruples equivalent to component `n`.
pub fn component_orbit(n: usize) -> &'static [[usize; 4]] {
    &tables().orbits[n]
}

/// Kelvin weights `W_I`.
pub fn kelvin_weights() -> &'static [f64; 21] {
    &tables().weight
}

/// An element of O(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ortho3(Mat3);

impl Ortho3 {
    pub const TOL: f64 = 1e-12;

    pub fn new(m: Mat3) -> Result<Self, TensorError> {
        let e = (m.transpose() * m - Mat3::identity()).abs().max();
        let d = (m.determinant().abs() - 1.0).abs();
        if e > Self::TOL || d > Self::TOL {
            return Err(TensorError::NotOrthogonal(e.max(d)));
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn inversion() -> Self {
        Self(-Mat3::identity())
    }

    pub fn rot_x(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self(Mat3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn rot_y(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self(Mat3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rot_z(t: f64) -> Self {
        let (s, c) = t.sin_cos();
        Self(Mat3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    /// Rotation by `t` about `axis` (Rodrigues).
    pub fn rot_axis(axis: &Vec3, t: f64) -> Self {
        let n = axis.normalize();
        let k = Mat3::new(0.0, -n.z, n.y, n.z, 0.0, -n.x, -n.y, n.x, 0.0);
        Self(Mat3::identity() + k * t.sin() + k * k * (1.0 - t.cos()))
    }

    /// Reflection through the plane with normal `n`.
    pub fn reflection(n: &Vec3) -> Self {
        let n = n.normalize();
        Self(Mat3::identity() - n * n.transpose() * 2.0)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn compose(&self, other: &Ortho3) -> Ortho3 {
        Ortho3(self.0 * other.0)
    }

    pub fn inverse(&self) -> Ortho3 {
        Ortho3(self.0.transpose())
    }

    pub fn neg(&self) -> Ortho3 {
        Ortho3(-self.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Proper part `det(g)·g`, a rotation.
    pub fn proper(&self) -> Ortho3 {
        Ortho3(self.0 * self.det().signum())
    }

    pub fn distance(&self, other: &Ortho3) -> f64 {
        (self.0 - other.0).abs().max()
    }
}

impl std::ops::Mul for Ortho3 {
    type Output = Ortho3;
    fn mul(self, rhs: Ortho3) -> Ortho3 {
        self.compose(&rhs)
    }
}

/// Elasticity tensor stored as its 21 independent raw components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasTensor {
    c: [f64; 21],
}

impl Default for ElasTensor {
    fn default() -> Self {
        Self::zero()
    }
}

impl ElasTensor {
    pub fn zero() -> Self {
        Self { c: [0.0; 21] }
    }

    pub fn from_components(c: [f64; 21]) -> Self {
        Self { c }
    }

    /// Builds from a function of the index quadruple, reading one
    /// representative per component.
    pub fn from_fn(f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut c = [0.0; 21];
        for (n, ijkl) in COMPONENTS.iter().enumerate() {
            c[n] = f(ijkl[0], ijkl[1], ijkl[2], ijkl[3]);
        }
        Self { c }
    }

    /// Projects an arbitrary 3×3×3×3 array (row-major) onto the symmetric
    /// subspace by averaging over each component's index orbit.
    pub fn symmetrize_full(a: &[f64; 81]) -> Self {
        let mut c = [0.0; 21];
        for (n, cn) in c.iter_mut().enumerate() {
            let orb = component_orbit(n);
            *cn = orb.iter().map(|t| a[flat(t[0], t[1], t[2], t[3])]).sum::<f64>() / orb.len() as f64;
        }
        Self { c }
    }

    /// `λ δ_ij δ_kl + μ (δ_ik δ_jl + δ_il δ_jk)`.
    pub fn isotropic(lambda: f64, mu: f64) -> Self {
        let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
        Self::from_fn(|i, j, k, l| lambda * d(i, j) * d(k, l) + mu * (d(i, k) * d(j, l) + d(i, l) * d(j, k)))
    }

    pub fn components(&self) -> &[f64; 21] {
        &self.c
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.c[component_index(i, j, k, l)]
    }

    pub fn to_full(&self) -> [f64; 81] {
        let mut a = [0.0; 81];
        for (n, v) in self.c.iter().enumerate() {
            for t in component_orbit(n) {
                a[flat(t[0], t[1], t[2], t[3])] = *v;
            }
        }
        a
    }

    pub fn frobenius_norm(&self) -> f64 {
        let w = kelvin_weights();
        self.c.iter().zip(w).map(|(c, w)| (c * w).powi(2)).sum::<f64>().sqrt()
    }

    pub fn to_tensor21(&self) -> Tensor21 {
        let w = kelvin_weights();
        Tensor21(Vec21::from_fn(|n, _| self.c[n] * w[n]))
    }

    /// 6×6 Voigt matrix in the order 11, 22, 33, 23, 13, 12 (no scaling).
    pub fn to_voigt(&self) -> [[f64; 6]; 6] {
        let mut m = [[0.0; 6]; 6];
        for (a, row) in m.iter_mut().enumerate() {
            for (b, v) in row.iter_mut().enumerate() {
                let (i, j) = VOIGT[a];
                let (k, l) = VOIGT[b];
                *v = self.get(i, j, k, l);
            }
        }
        m
    }

    /// Inverse of [`to_voigt`](Self::to_voigt); the upper triangle is read.
    pub fn from_voigt(m: &[[f64; 6]; 6]) -> Self {
        Self::from_fn(|i, j, k, l| {
            let (a, b) = (voigt_index(i, j), voigt_index(k, l));
            m[a.min(b)][a.max(b)]
        })
    }
}

/// Voigt pairs in the order 11, 22, 33, 23, 13, 12.
pub const VOIGT: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)];

pub fn voigt_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (0, 0) => 0,
        (1, 1) => 1,
        (2, 2) => 2,
        (1, 2) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

/// Map from storage index to the Voigt pair `(a, b)` with `a ≤ b`.
pub fn storage_to_voigt(n: usize) -> (usize, usize) {
    let [i, j, k, l] = COMPONENTS[n];
    let (a, b) = (voigt_index(i, j), voigt_index(k, l));
    (a.min(b), a.max(b))
}

/// Orthonormal coordinates of an elasticity tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tensor21(pub Vec21);

impl Tensor21 {
    pub fn zero() -> Self {
        Tensor21(Vec21::zeros())
    }

    pub fn basis(n: usize) -> Self {
        let mut v = Vec21::zeros();
        v[n] = 1.0;
        Tensor21(v)
    }

    pub fn from_slice(s: &[f64]) -> Self {
        Tensor21(Vec21::from_column_slice(s))
    }

    pub fn as_vector(&self) -> &Vec21 {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn to_elas(&self) -> ElasTensor {
        let w = kelvin_weights();
        ElasTensor { c: std::array::from_fn(|n| self.0[n] / w[n]) }
    }
}

impl From<ElasTensor> for Tensor21 {
    fn from(c: ElasTensor) -> Self {
        c.to_tensor21()
    }
}

impl From<Tensor21> for ElasTensor {
    fn from(t: Tensor21) -> Self {
        t.to_elas()
    }
}

/// `g·C`, components `g_ia g_jb g_kc g_ld C_abcd`.
pub fn rotate_tensor(g: &Ortho3, c: &ElasTensor) -> ElasTensor {
    let m = g.matrix();
    let full = c.to_full();
    ElasTensor::from_fn(|i, j, k, l| {
        let mut s = 0.0;
        for a in 0..3 {
            let ga = m[(i, a)];
            if ga == 0.0 {
                continue;
            }
            for b in 0..3 {
                let gb = ga * m[(j, b)];
                if gb == 0.0 {
                    continue;
                }
                for cc in 0..3 {
                    let gc = gb * m[(k, cc)];
                    if gc == 0.0 {
                        continue;
                    }
                    for d in 0..3 {
                        s += gc * m[(l, d)] * full[flat(a, b, cc, d)];
                    }
                }
            }
        }
        s
    })
}

/// Matrix of `C ↦ g·C` in [`Tensor21`] coordinates.
pub fn rep_matrix_21(g: &Ortho3) -> Mat21 {
    let m = g.matrix();
    let w = kelvin_weights();
    let mut r = Mat21::zeros();
    for (ii, rep) in COMPONENTS.iter().enumerate() {
        let [i, j, k, l] = *rep;
        for jj in 0..21 {
            let mut s = 0.0;
            for t in component_orbit(jj) {
                s += m[(i, t[0])] * m[(j, t[1])] * m[(k, t[2])] * m[(l, t[3])];
            }
            r[(ii, jj)] = s * w[ii] / w[jj];
        }
    }
    r
}

/// Derivative of [`rep_matrix_21`] along the antisymmetric generator `a`
/// (so that `rep(exp(t·a)) = exp(t·rep_lie_21(a))`).
pub fn rep_lie_21(a: &Mat3) -> Mat21 {
    let w = kelvin_weights();
    let d = |p: usize, q: usize| if p == q { 1.0 } else { 0.0 };
    let mut r = Mat21::zeros();
    for (ii, rep) in COMPONENTS.iter().enumerate() {
        let [i, j, k, l] = *rep;
        for jj in 0..21 {
            let mut s = 0.0;
            for t in component_orbit(jj) {
                let [p, q, u, v] = *t;
                s += a[(i, p)] * d(j, q) * d(k, u) * d(l, v)
                    + d(i, p) * a[(j, q)] * d(k, u) * d(l, v)
                    + d(i, p) * d(j, q) * a[(k, u)] * d(l, v)
                    + d(i, p) * d(j, q) * d(k, u) * a[(l, v)];
            }
            r[(ii, jj)] = s * w[ii] / w[jj];
        }
    }
    r
}

/// Generators of rotations about x, y, z.
pub fn so3_generators() -> [Mat3; 3] {
    [
        Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0),
        Mat3::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0),
        Mat3::new(0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_tensor(seed: u64) -> ElasTensor {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let mut c = [0.0; 21];
        for v in c.iter_mut() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            *v = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
        }
        ElasTensor::from_components(c)
    }

    #[test]
    fn index_tables_are_consistent() {
        let total: usize = (0..21).map(|n| component_orbit(n).len()).sum();
        assert_eq!(total, 81);
        for (n, c) in COMPONENTS.iter().enumerate() {
            assert_eq!(component_index(c[0], c[1], c[2], c[3]), n);
            assert_eq!(component_index(c[1], c[0], c[3], c[2]), n);
            assert_eq!(component_index(c[2], c[3], c[0], c[1]), n);
        }
        assert_eq!(kelvin_weights()[0], 1.0);
        assert_eq!(kelvin_weights()[3], 2.0);
        assert!((kelvin_weights()[6] - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn labels_match_axes() {
        for (n, lab) in COMPONENT_LABELS.iter().enumerate() {
            let mut axes = Vec::new();
            let b = lab.as_bytes();
            let mut i = 0;
            while i < b.len() {
                if b[i] == b'-' {
                    axes.push(1);
                    i += 2;
                } else {
                    axes.push(if b[i] == b'0' { 2 } else { 0 });
                    i += 1;
                }
            }
            assert_eq!(axes.as_slice(), COMPONENTS[n].as_slice(), "{lab}");
        }
    }

    #[test]
    fn kelvin_round_trip_preserves_norm() {
        let c = sample_tensor(3);
        let t = c.to_tensor21();
        assert!((t.norm() - c.frobenius_norm()).abs() < 1e-12);
        let full = c.to_full();
        let direct = full.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!((direct - t.norm()).abs() < 1e-12);
        let back = t.to_elas();
        for n in 0..21 {
            assert!((back.components()[n] - c.components()[n]).abs() < 1e-15);
        }
    }

    #[test]
    fn identity_and_inversion_act_trivially() {
        let c = sample_tensor(5);
        assert_eq!(rotate_tensor(&Ortho3::identity(), &c), c);
        let r = rotate_tensor(&Ortho3::inversion(), &c);
        for n in 0..21 {
            assert!((r.components()[n] - c.components()[n]).abs() < 1e-15);
        }
    }

    #[test]
    fn isotropic_tensor_is_fixed() {
        let c = ElasTensor::isotropic(1.3, 0.7);
        let r = rotate_tensor(&Ortho3::rot_z(std::f64::consts::FRAC_PI_2), &c);
        let g = Ortho3::rot_axis(&Vec3::new(0.3, -1.0, 2.0), 0.77);
        let r2 = rotate_tensor(&g, &c);
        for n in 0..21 {
            assert!((r.components()[n] - c.components()[n]).abs() < 1e-14);
            assert!((r2.components()[n] - c.components()[n]).abs() < 1e-14);
        }
    }

    #[test]
    fn rep_matrix_matches_contraction() {
        let g = Ortho3::rot_axis(&Vec3::new(1.0, 2.0, -0.5), 1.1).compose(&Ortho3::reflection(&Vec3::new(0.2, 0.1, 1.0)));
        let m = rep_matrix_21(&g);
        assert!((m.transpose() * m - Mat21::identity()).abs().max() < 1e-12);
        for n in 0..21 {
            let e = Tensor21::basis(n).to_elas();
            let direct = rotate_tensor(&g, &e).to_tensor21();
            assert!((m.column(n) - direct.0).abs().max() < 1e-13);
        }
        let rx = rep_matrix_21(&Ortho3::rot_x(std::f64::consts::PI));
        for v in rx.iter() {
            assert!(v.abs() < 1e-12 || (v.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rep_is_homomorphism() {
        let a = Ortho3::rot_axis(&Vec3::new(0.4, 1.0, 0.1), 0.6);
        let b = Ortho3::rot_axis(&Vec3::new(-1.0, 0.3, 0.9), 2.1).neg();
        let lhs = rep_matrix_21(&a.compose(&b));
        let rhs = rep_matrix_21(&a) * rep_matrix_21(&b);
        assert!((lhs - rhs).abs().max() < 1e-12);
    }

    #[test]
    fn lie_action_is_derivative() {
        let gens = so3_generators();
        let h = 1e-6;
        let a = gens[0] * 0.3 + gens[1] * -0.2 + gens[2] * 0.9;
        let axis = Vec3::new(0.3, -0.2, 0.9);
        let t = axis.norm();
        let gp = rep_matrix_21(&Ortho3::rot_axis(&axis, h * t));
        let gm = rep_matrix_21(&Ortho3::rot_axis(&axis, -h * t));
        let fd = (gp - gm) / (2.0 * h);
        assert!((fd - rep_lie_21(&a)).abs().max() < 1e-8);
    }

    #[test]
    fn voigt_round_trip() {
        let c = sample_tensor(11);
        let v = c.to_voigt();
        assert_eq!(ElasTensor::from_voigt(&v), c);
        assert_eq!(storage_to_voigt(0), (1, 1));
        assert_eq!(storage_to_voigt(3), (4, 4));
    }

    #[test]
    fn non_orthogonal_rejected() {
        let m = Mat3::new(1.0, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(Ortho3::new(m), Err(TensorError::NotOrthogonal(_))));
        assert!(Ortho3::new(*Ortho3::rot_y(0.3).matrix()).is_ok());
    }
}
