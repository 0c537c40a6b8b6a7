//! Fixed-point spaces `V^H`, the host space of each group case, and adapted
//! bases of the isotypic components.

use super::coupled::{uncoupled_basis, uncoupled_index};
use super::irreps::irrep_matrix;
use super::{BasisLabel, BasisSet, RepError, UStructure};
use crate::groups::{GroupId, GroupKind, GroupSpec, IrrepCount};
use crate::linalg::{null_space, orthonormalize};
use crate::tensor::{rep_lie_21, rep_matrix_21, so3_generators, Mat21, Ortho3, Tensor21};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::OnceLock;

const TOL: f64 = 1e-8;

/// Group average `(1/|G|) Σ rep_matrix_21(g)` for finite groups, the
/// orthogonal projector onto the common fixed space of the generators for
/// the continuous ones.
pub fn projector(g: &GroupSpec) -> Mat21 {
    match g.elements() {
        Some(e) => e.iter().map(rep_matrix_21).sum::<Mat21>() / e.len() as f64,
        None => {
            let gens = continuous_generators(&g.kind);
            let n = nullspace_of(&gens.iter().map(|h| to_d(&rep_matrix_21(h)) - DMatrix::identity(21, 21)).collect::<Vec<_>>());
            let p = &n * n.transpose();
            Mat21::from_fn(|i, j| p[(i, j)])
        }
    }
}

fn continuous_generators(kind: &GroupKind) -> Vec<Ortho3> {
    match kind {
        GroupKind::O3 => vec![Ortho3::rot_z(1.0), Ortho3::rot_x(std::f64::consts::SQRT_2)],
        GroupKind::O2xZ2c => vec![Ortho3::rot_z(1.0), Ortho3::rot_x(PI)],
        GroupKind::Finite(e) => e.clone(),
    }
}

fn to_d(m: &Mat21) -> DMatrix<f64> {
    DMatrix::from_fn(21, 21, |i, j| m[(i, j)])
}

fn nullspace_of(blocks: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = blocks[0].ncols();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut a = DMatrix::zeros(rows, n);
    let mut r = 0;
    for b in blocks {
        a.view_mut((r, 0), (b.nrows(), n)).copy_from(b);
        r += b.nrows();
    }
    null_space(&a, 1e-9)
}

/// Gram–Schmidt of `P e_1, P e_2, …` for a projector `P`.
fn range_basis(p: &DMatrix<f64>) -> Vec<DVector<f64>> {
    let cols: Vec<DVector<f64>> = (0..p.ncols()).map(|j| p.column(j).into_owned()).collect();
    orthonormalize(&cols, TOL)
}

fn trivial_label(k: GroupId) -> &'static str {
    k.irreps()[0].label
}

/// Orthonormal basis of `V^G`, the tensors fixed by every element of `G`.
pub fn fixed_point_basis(g: &GroupSpec) -> BasisSet {
    let p = to_d(&projector(g));
    let vecs = range_basis(&p);
    let label = trivial_label(g.id);
    BasisSet {
        labels: (0..vecs.len()).map(|i| BasisLabel { irrep: label, copy: i + 1, row: 1 }).collect(),
        vectors: vecs.iter().map(|v| Tensor21::from_slice(v.as_slice())).collect(),
    }
}

fn cached<T: Clone>(cell: &'static OnceLock<Vec<T>>, k: GroupId, f: impl Fn(GroupId) -> T) -> T {
    cell.get_or_init(|| GroupId::ALL.iter().map(|&g| f(g)).collect())[k.number() - 1].clone()
}

fn fixed_cached(k: GroupId) -> BasisSet {
    static C: OnceLock<Vec<BasisSet>> = OnceLock::new();
    cached(&C, k, |g| fixed_point_basis(&g.spec()))
}

/// The space the field of case `k` takes values in: `V^H` for the class
/// group `H` of `k`. For `K7` the hexagonal group does not normalize the
/// orthotropic group, so the host is `V^{D6h}` plus the `q = ±2` rows of the
/// two `ℓ = 2` copies, the smallest `D6h`-invariant space carrying `E2g`
/// twice; see the decisions ledger.
pub fn host_basis(k: GroupId) -> BasisSet {
    static C: OnceLock<Vec<BasisSet>> = OnceLock::new();
    cached(&C, k, compute_host)
}

fn compute_host(k: GroupId) -> BasisSet {
    if k != GroupId::K7 {
        return fixed_cached(k.class().symmetry_group());
    }
    let mut b = fixed_cached(GroupId::K7);
    let t = uncoupled_basis();
    for copy in 1..=2 {
        for (row, m) in [(1, -2), (2, 2)] {
            b.vectors.push(t.vectors[uncoupled_index(2, copy, m)]);
            b.labels.push(BasisLabel { irrep: "E2g", copy, row });
        }
    }
    b
}

/// `U(g)` on the host space of `k`, `Bᵀ rep_matrix_21(g) B`.
pub fn host_rep(k: GroupId, g: &Ortho3) -> DMatrix<f64> {
    let b = host_basis(k).matrix();
    b.transpose() * to_d(&rep_matrix_21(g)) * b
}

fn degree_of(label: &str) -> Option<usize> {
    label.strip_prefix('U')?.trim_end_matches('g').parse().ok()
}

/// Decomposition of `U` on the host space of `k` into isotypic components,
/// with an adapted basis: copy `c` of an irrep `ρ` is spanned by
/// `v_1, …, v_d` with `U(g) v_j = Σ_i ρ_ij(g) v_i`. For `K2` the rows follow
/// the harmonics `S_ℓ^m`, `m = −ℓ..ℓ`; for the O(2) cases row 1 is fixed by
/// the flip and both rows rotate by `ℓθ`.
///
/// The computed multiplicities must agree with the table in
/// [`GroupId::irreps`]; a mismatch is an error.
pub fn isotypic_decomposition(k: GroupId) -> Result<(UStructure, BasisSet), RepError> {
    let host = host_basis(k);
    let (parts, basis) = match k.spec().kind {
        GroupKind::Finite(ref e) => finite_decomposition(k, e, &host)?,
        GroupKind::O3 => o3_decomposition(k, &host),
        GroupKind::O2xZ2c => o2_decomposition(k, &host)?,
    };
    for (want, got) in k.irreps().iter().zip(&parts) {
        if want.multiplicity != got.multiplicity {
            return Err(RepError::Mismatch {
                group: k,
                label: want.label.to_string(),
                expected: want.multiplicity,
                found: got.multiplicity,
            });
        }
    }
    if basis.len() != host.len() {
        return Err(RepError::Mismatch { group: k, label: "total".into(), expected: host.len(), found: basis.len() });
    }
    Ok((UStructure { group: k, parts }, basis))
}

fn push_copy(basis: &mut BasisSet, label: &'static str, copy: usize, rows: &[DVector<f64>]) {
    for (r, v) in rows.iter().enumerate() {
        basis.vectors.push(Tensor21::from_slice(v.as_slice()));
        basis.labels.push(BasisLabel { irrep: label, copy, row: r + 1 });
    }
}

fn trivial_part(k: GroupId, basis: &mut BasisSet) -> IrrepCount {
    let f = fixed_cached(k);
    let label = trivial_label(k);
    for (i, v) in f.vectors.iter().enumerate() {
        basis.vectors.push(*v);
        basis.labels.push(BasisLabel { irrep: label, copy: i + 1, row: 1 });
    }
    IrrepCount { label, multiplicity: f.len(), dim: 1 }
}

fn finite_decomposition(
    k: GroupId,
    elems: &[Ortho3],
    host: &BasisSet,
) -> Result<(Vec<IrrepCount>, BasisSet), RepError> {
    let b = host.matrix();
    let us: Vec<DMatrix<f64>> = elems.iter().map(|g| b.transpose() * to_d(&rep_matrix_21(g)) * &b).collect();
    let d = host.len();
    let mut basis = BasisSet { vectors: vec![], labels: vec![] };
    let mut parts = Vec::new();
    for (idx, irrep) in k.irreps().iter().enumerate() {
        if idx == 0 {
            parts.push(trivial_part(k, &mut basis));
            continue;
        }
        let rhos: Vec<DMatrix<f64>> =
            elems.iter().map(|g| irrep_matrix(k, irrep.label, g)).collect::<Result<_, _>>()?;
        let dim = rhos[0].nrows();
        let scale = dim as f64 / elems.len() as f64;
        // P_i1 = (d/|G|) Σ ρ_i1(g) U(g)
        let p: Vec<DMatrix<f64>> = (0..dim)
            .map(|i| rhos.iter().zip(&us).map(|(r, u)| u * r[(i, 0)]).fold(DMatrix::zeros(d, d), |a, x| a + x) * scale)
            .collect();
        let range = range_basis(&p[0]);
        let mut span: Vec<DVector<f64>> = Vec::new();
        let mut copy = 0;
        for r in &range {
            let mut w = r.clone();
            for s in &span {
                let c = s.dot(&w);
                w.axpy(-c, s, 1.0);
            }
            let w = &p[0] * w;
            if w.norm() < 1e-6 {
                continue;
            }
            copy += 1;
            let v1 = w.normalize();
            let rows: Vec<DVector<f64>> =
                (0..dim).map(|i| if i == 0 { v1.clone() } else { (&p[i] * &v1).normalize() }).collect();
            span.extend(rows.iter().cloned());
            let full: Vec<DVector<f64>> = rows.iter().map(|v| &b * v).collect();
            push_copy(&mut basis, irrep.label, copy, &full);
        }
        parts.push(IrrepCount { label: irrep.label, multiplicity: copy, dim });
    }
    Ok((parts, basis))
}

fn o3_decomposition(k: GroupId, host: &BasisSet) -> (Vec<IrrepCount>, BasisSet) {
    let mut basis = BasisSet { vectors: vec![], labels: vec![] };
    if host.len() < 21 {
        return (vec![trivial_part(k, &mut basis)], basis);
    }
    let cas = casimir();
    let t = uncoupled_basis();
    let mut parts = Vec::new();
    for irrep in k.irreps() {
        let l = degree_of(irrep.label).unwrap_or(0);
        let shifted = &cas + DMatrix::identity(21, 21) * (l * (l + 1)) as f64;
        let mult = null_space(&shifted, 1e-9).ncols() / (2 * l + 1);
        for (v, lab) in t.vectors.iter().zip(&t.labels) {
            if degree_of(lab.irrep) == Some(l) {
                basis.vectors.push(*v);
                basis.labels.push(BasisLabel { irrep: irrep.label, ..*lab });
            }
        }
        parts.push(IrrepCount { label: irrep.label, multiplicity: mult, dim: 2 * l + 1 });
    }
    (parts, basis)
}

/// `Σ_a J_a²` on `V`, eigenvalue `−ℓ(ℓ+1)` on the degree-`ℓ` components.
pub(crate) fn casimir() -> DMatrix<f64> {
    so3_generators().iter().map(|a| {
        let j = to_d(&rep_lie_21(a));
        &j * &j
    }).fold(DMatrix::zeros(21, 21), |s, x| s + x)
}

fn o2_decomposition(k: GroupId, host: &BasisSet) -> Result<(Vec<IrrepCount>, BasisSet), RepError> {
    let b = host.matrix();
    let lz = b.transpose() * to_d(&rep_lie_21(&so3_generators()[2])) * &b;
    let flip = b.transpose() * to_d(&rep_matrix_21(&Ortho3::rot_x(PI))) * &b;
    let d = host.len();
    let id = DMatrix::<f64>::identity(d, d);
    let mut basis = BasisSet { vectors: vec![], labels: vec![] };
    let mut parts = Vec::new();
    for (idx, irrep) in k.irreps().iter().enumerate() {
        if idx == 0 {
            parts.push(trivial_part(k, &mut basis));
            continue;
        }
        let l = degree_of(irrep.label).ok_or_else(|| RepError::UnknownIrrep { group: k, label: irrep.label.into() })?;
        let lf = l as f64;
        let iso = &lz * &lz + &id * (lf * lf);
        let n = nullspace_of(&[iso, &flip - &id]);
        let firsts = range_basis(&(&n * n.transpose()));
        for (c, v1) in firsts.iter().enumerate() {
            let v2 = &lz * v1 / lf;
            push_copy(&mut basis, irrep.label, c + 1, &[&b * v1, &b * v2]);
        }
        parts.push(IrrepCount { label: irrep.label, multiplicity: firsts.len(), dim: 2 });
    }
    Ok((parts, basis))
}
