//! The isotropic case `K2`. At the pole `p = λẑ` the density commutes with
//! `U(O(2))` on all of `V`; it is fixed by 29 of its raw entries `u_i`,
//! the other entries following from linear relations. Entries are numbered
//! from 1 in the storage order of [`crate::tensor::COMPONENTS`].

use super::{CovarianceError, FMatrix, FieldSpec, KernelValue};
use crate::groups::GroupId;
use crate::rep::{coupled_basis, harmonics, host_basis};
use crate::special::gauss_legendre;
use crate::tensor::{kelvin_weights, Mat21, Vec3};
use nalgebra::DMatrix;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const U_COUNT: usize = 29;

type E = (usize, usize);

/// Pairs of raw entries that agree, by printed row.
const EQUAL: [[(E, E); 3]; 7] = [
    [((1, 1), (3, 3)), ((1, 2), (2, 3)), ((1, 6), (3, 4))],
    [((1, 7), (3, 9)), ((1, 8), (3, 8)), ((2, 4), (2, 6))],
    [((2, 7), (2, 9)), ((4, 4), (6, 6)), ((4, 5), (5, 6))],
    [((4, 9), (6, 7)), ((5, 7), (5, 9)), ((7, 7), (9, 9))],
    [((10, 10), (14, 14)), ((10, 11), (14, 15)), ((10, 13), (14, 17))],
    [((11, 11), (15, 15)), ((12, 13), (16, 17)), ((13, 13), (17, 17))],
    [((18, 19), (18, 20)), ((19, 19), (20, 20)), ((19, 21), (20, 21))],
];

/// Needed for the pole to commute with rotations about `z`; not among the
/// printed pairs.
const EQUAL_EXTRA: (E, E) = ((12, 12), (16, 16));

/// Entries given by linear combinations of free entries.
const DERIVED: [(&[E], &[(f64, E)]); 15] = [
    (&[(1, 3)], &[(-1.0, (1, 1)), (8.0, (5, 5)), (-2.0, (8, 8)), (4.0, (1, 8))]),
    (&[(1, 4), (3, 6)], &[(1.0, (1, 6)), (-4.0, (18, 19))]),
    (&[(1, 5), (3, 5)], &[(0.5, (1, 1)), (-2.0, (19, 19)), (-0.5, (1, 8))]),
    (&[(1, 9), (3, 7)], &[(1.0, (1, 7)), (-4.0, (19, 21))]),
    (&[(2, 8)], &[(1.0, (1, 2)), (-2.0, (2, 5))]),
    (&[(4, 6)], &[(1.0, (4, 4)), (-2.0, (18, 18))]),
    (&[(4, 7), (6, 9)], &[(1.0, (4, 9)), (-2.0, (18, 21))]),
    (&[(4, 8), (6, 8)], &[(1.0, (1, 6)), (-2.0, (4, 5)), (-2.0, (18, 19))]),
    (&[(5, 8)], &[(-0.5, (1, 1)), (2.0, (5, 5)), (-1.0, (8, 8)), (2.0, (19, 19)), (1.5, (1, 8))]),
    (&[(7, 8), (8, 9)], &[(1.0, (1, 7)), (-2.0, (5, 7)), (-2.0, (19, 21))]),
    (&[(7, 9)], &[(1.0, (7, 7)), (-2.0, (21, 21))]),
    (&[(10, 12), (14, 16)], &[(-0.5, (11, 11)), (0.5, (12, 12)), (-1.0, (10, 11))]),
    (&[(11, 12), (15, 16)], &[(-2.0, (10, 10)), (0.5, (11, 11)), (0.5, (12, 12))]),
    (&[(11, 13), (15, 17)], &[(1.0, (12, 13)), (-2.0, (10, 13))]),
    (&[(19, 20)], &[(0.5, (1, 1)), (-2.0, (5, 5)), (0.5, (8, 8)), (-1.0, (19, 19)), (-1.0, (1, 8))]),
];

/// `u_i = c · f(i, j)`.
const U_MAP: [(f64, E); U_COUNT] = [
    (2.0, (1, 1)),
    (1.0, (2, 2)),
    (2.0, (4, 4)),
    (1.0, (5, 5)),
    (2.0, (7, 7)),
    (1.0, (8, 8)),
    (1.0, (1, 2)),
    (1.0, (1, 6)),
    (1.0, (1, 7)),
    (1.0, (1, 8)),
    (1.0, (2, 4)),
    (1.0, (2, 5)),
    (1.0, (2, 7)),
    (1.0, (4, 5)),
    (1.0, (4, 9)),
    (1.0, (5, 9)),
    (2.0, (10, 10)),
    (2.0, (11, 11)),
    (2.0, (12, 12)),
    (2.0, (13, 13)),
    (1.0, (10, 11)),
    (1.0, (10, 13)),
    (1.0, (12, 13)),
    (1.0, (18, 18)),
    (2.0, (19, 19)),
    (1.0, (21, 21)),
    (1.0, (18, 19)),
    (1.0, (18, 21)),
    (1.0, (19, 21)),
];

/// Named group of linear relations `Σ c · f(i, j) = 0` between raw
/// entries: one printed row, the extra equality, or the vanishing entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RelationRow {
    pub name: String,
    pub relations: Vec<Vec<(f64, usize, usize)>>,
}

impl RelationRow {
    /// Largest residual over the row.
    pub fn defect(&self, raw: &DMatrix<f64>) -> f64 {
        self.relations
            .iter()
            .map(|t| t.iter().map(|&(c, i, j)| c * raw[(i - 1, j - 1)]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }
}

fn mentioned() -> Vec<E> {
    let mut m: Vec<E> = U_MAP.iter().map(|&(_, e)| e).collect();
    for row in &EQUAL {
        for &(a, b) in row {
            m.extend([a, b]);
        }
    }
    m.extend([EQUAL_EXTRA.0, EQUAL_EXTRA.1]);
    for (lhs, rhs) in &DERIVED {
        m.extend(lhs.iter().copied());
        m.extend(rhs.iter().map(|&(_, e)| e));
    }
    m
}

/// All entry relations at the pole, grouped into named rows.
pub fn h_relations() -> &'static [RelationRow] {
    static R: OnceLock<Vec<RelationRow>> = OnceLock::new();
    R.get_or_init(|| {
        let eq = |(a, b): (E, E)| vec![(1.0, a.0, a.1), (-1.0, b.0, b.1)];
        let mut rows = Vec::new();
        for (n, row) in EQUAL.iter().enumerate() {
            rows.push(RelationRow { name: format!("H1 row {}", n + 1), relations: row.iter().map(|&p| eq(p)).collect() });
        }
        rows.push(RelationRow { name: "H1 f12,12=f16,16".into(), relations: vec![eq(EQUAL_EXTRA)] });
        for (n, (lhs, rhs)) in DERIVED.iter().enumerate() {
            let relations = lhs
                .iter()
                .map(|&(i, j)| {
                    let mut t = vec![(1.0, i, j)];
                    t.extend(rhs.iter().map(|&(c, (a, b))| (-c, a, b)));
                    t
                })
                .collect();
            rows.push(RelationRow { name: format!("H2 row {}", n + 1), relations });
        }
        let known = mentioned();
        let mut zeros = Vec::new();
        for i in 1..=21 {
            for j in i..=21 {
                if !known.contains(&(i, j)) {
                    zeros.push(vec![(1.0, i, j)]);
                }
            }
        }
        rows.push(RelationRow { name: "H zero entries".into(), relations: zeros });
        rows
    })
}

/// Kelvin-frame matrix (host coordinates of `K2`) to raw entries.
pub(crate) fn raw_frame(f: &DMatrix<f64>) -> DMatrix<f64> {
    let w = kelvin_weights();
    let kel = to_kelvin21(f);
    DMatrix::from_fn(21, 21, |i, j| kel[(i, j)] / (w[i] * w[j]))
}

fn to_kelvin21(f: &DMatrix<f64>) -> DMatrix<f64> {
    let b = host_basis(GroupId::K2).matrix();
    &b * f * b.transpose()
}

fn from_kelvin21(f: &DMatrix<f64>) -> DMatrix<f64> {
    let b = host_basis(GroupId::K2).matrix();
    b.transpose() * f * &b
}

/// Density at the pole with the free entries `u`.
pub fn from_u(u: &[f64]) -> Result<FMatrix, CovarianceError> {
    if u.len() != U_COUNT {
        return Err(CovarianceError::ULength { expected: U_COUNT, found: u.len() });
    }
    let mut raw = DMatrix::zeros(21, 21);
    let mut known = [[false; 21]; 21];
    let set = |raw: &mut DMatrix<f64>, (i, j): E, v: f64, known: &mut [[bool; 21]; 21]| {
        raw[(i - 1, j - 1)] = v;
        raw[(j - 1, i - 1)] = v;
        known[i - 1][j - 1] = true;
        known[j - 1][i - 1] = true;
    };
    for (&(c, e), &x) in U_MAP.iter().zip(u) {
        set(&mut raw, e, x / c, &mut known);
    }
    for &(a, b) in EQUAL.iter().flatten().chain([&EQUAL_EXTRA]) {
        if known[a.0 - 1][a.1 - 1] {
            let v = raw[(a.0 - 1, a.1 - 1)];
            set(&mut raw, b, v, &mut known);
        } else {
            let v = raw[(b.0 - 1, b.1 - 1)];
            set(&mut raw, a, v, &mut known);
        }
    }
    for (lhs, rhs) in &DERIVED {
        let v: f64 = rhs.iter().map(|&(c, (i, j))| c * raw[(i - 1, j - 1)]).sum();
        for &e in lhs.iter() {
            set(&mut raw, e, v, &mut known);
        }
    }
    let w = kelvin_weights();
    let kel = DMatrix::from_fn(21, 21, |i, j| raw[(i, j)] * w[i] * w[j]);
    FMatrix::new(from_kelvin21(&kel))
}

/// The 29 free entries of a density.
pub fn to_u(f: &FMatrix) -> Result<Vec<f64>, CovarianceError> {
    if f.dim() != 21 {
        return Err(CovarianceError::Dimension { group: GroupId::K2, expected: 21, found: f.dim() });
    }
    let raw = raw_frame(f.matrix());
    Ok(U_MAP.iter().map(|&(c, (i, j))| c * raw[(i - 1, j - 1)]).collect())
}

/// Masses `u₁+…+u₆`, `u₁₇+…+u₂₀`, `u₂₄+u₂₅+u₂₆` carried by the three blocks.
pub fn phi_masses(u: &[f64]) -> [f64; 3] {
    [u[0..6].iter().sum(), u[16..20].iter().sum(), u[23..26].iter().sum()]
}

/// Block-normalized coordinates `v₁..v₂₆`.
pub fn v_coordinates(u: &[f64]) -> Vec<f64> {
    let [a, b, c] = phi_masses(u);
    let mut v = Vec::with_capacity(26);
    v.extend(u[0..5].iter().map(|x| x / a));
    v.extend(u[6..16].iter().map(|x| x / a));
    v.extend(u[17..20].iter().map(|x| x / b));
    v.extend(u[20..23].iter().map(|x| x / b));
    v.extend(u[24..26].iter().map(|x| x / c));
    v.extend(u[26..29].iter().map(|x| x / c));
    v
}

/// Projections `B_{t,u} = Σ_v ⟨f, T^{2t,v,0}⟩ T^{2t,v,u}` of a pole density.
fn harmonic_parts(f: &DMatrix<f64>) -> Vec<Vec<Mat21>> {
    let kel = to_kelvin21(f);
    let f21 = Mat21::from_fn(|i, j| kel[(i, j)]);
    (0..5)
        .map(|t| {
            let mut parts = vec![Mat21::zeros(); 4 * t + 1];
            for fam in coupled_basis(t) {
                let c = fam.pole().dot(&f21);
                for (u, blk) in fam.blocks.iter().enumerate() {
                    parts[u] += blk * c;
                }
            }
            parts
        })
        .collect()
}

/// Sphere averages `⟨cos(λ n·z) S^u_{2t}(n)⟩` for `t = 0..4`.
fn plane_wave_moments(lambda: f64, z: &Vec3) -> Result<Vec<Vec<f64>>, CovarianceError> {
    let r = z.norm();
    let kr = lambda * r;
    let mut out: Vec<Vec<f64>> = (0..5).map(|t| vec![0.0; 4 * t + 1]).collect();
    if kr == 0.0 {
        out[0][0] = 1.0 / (4.0 * PI).sqrt();
        return Ok(out);
    }
    let e3 = z / r;
    let seed = if e3.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let e1 = (seed - e3 * seed.dot(&e3)).normalize();
    let e2 = e3.cross(&e1);
    const NPHI: usize = 18;
    let eval = |nt: usize| {
        let mut acc: Vec<Vec<f64>> = (0..5).map(|t| vec![0.0; 4 * t + 1]).collect();
        for (t, w) in gauss_legendre(nt) {
            let c = 0.5 * w * (kr * t).cos() / NPHI as f64;
            let s = (1.0 - t * t).max(0.0).sqrt();
            for j in 0..NPHI {
                let phi = 2.0 * PI * (j as f64 + 0.5) / NPHI as f64;
                let n = e1 * (s * phi.cos()) + e2 * (s * phi.sin()) + e3 * t;
                for (l, a) in acc.iter_mut().enumerate() {
                    for (x, h) in a.iter_mut().zip(harmonics(2 * l, &n)) {
                        *x += c * h;
                    }
                }
            }
        }
        acc
    };
    let mut nt = 16 + kr.ceil() as usize;
    let mut prev = eval(nt);
    let mut change = f64::INFINITY;
    while nt <= 4096 {
        nt *= 2;
        let next = eval(nt);
        change = prev.iter().flatten().zip(next.iter().flatten()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prev = next;
        if change < 1e-13 {
            out = prev;
            return Ok(out);
        }
    }
    Err(CovarianceError::Quadrature(change))
}

/// `⟨C(x), C(y)⟩` for `K2` as the sphere average of the plane wave against
/// `f(p) = Σ f_{2t,v} M^{2t,v}(p)`, computed by Gauss–Legendre quadrature
/// in `n·(y−x)/|y−x|` and a trapezoid rule in azimuth.
pub fn kernel_o3_quadrature(spec: &FieldSpec, x: &Vec3, y: &Vec3) -> Result<KernelValue, CovarianceError> {
    if spec.group != GroupId::K2 {
        return Err(CovarianceError::WrongGroup { op: "kernel_o3_quadrature", expected: "K2", found: spec.group });
    }
    spec.validate()?;
    o3_kernel(spec, &(y - x))
}

pub(crate) fn o3_kernel(spec: &FieldSpec, z: &Vec3) -> Result<KernelValue, CovarianceError> {
    let mut k = Mat21::zeros();
    for a in &spec.atoms {
        let parts = harmonic_parts(a.f.matrix());
        let mom = plane_wave_moments(a.p.norm(), z)?;
        for t in 0..5 {
            let c = (4.0 * PI / (4 * t + 1) as f64).sqrt() * a.weight;
            for (blk, m) in parts[t].iter().zip(&mom[t]) {
                k += blk * (c * m);
            }
        }
    }
    Ok(from_kelvin21(&DMatrix::from_fn(21, 21, |i, j| k[(i, j)])))
}
