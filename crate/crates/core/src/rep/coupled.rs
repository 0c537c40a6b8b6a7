//! The uncoupled basis `T^{ℓ,v,q}` of `V` adapted to O(3), the coupled basis
//! `T^{2t,v,u}` of `S²(V)`, the invariant functions `M^{2t,v}(p)` and their
//! expansion in the couplings `L^q`.

use super::gg::gg_coefficients;
use super::harmonics::harmonics;
use super::{BasisLabel, BasisSet, RepError};
use crate::linalg::lstsq;
use crate::tensor::{l_function, ElasTensor, Mat21, Tensor21, Vec3, L_COUNT};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Number of invariant functions `M^{2t,v}`.
pub const M_COUNT: usize = 29;

/// Family sizes `m_{2t}` for `t = 0..4`.
const FAMILY_SIZES: [usize; 5] = [7, 10, 8, 3, 1];

type Copy = (usize, usize);

/// Factor pairs `((ℓ, copy), (ℓ', copy'))` of each family, in table order.
const FAMILIES: [&[(Copy, Copy)]; 5] = [
    &[((0, 1), (0, 1)), ((0, 1), (0, 2)), ((2, 1), (2, 1)), ((0, 2), (0, 2)), ((2, 1), (2, 2)), ((2, 2), (2, 2)), ((4, 1), (4, 1))],
    &[
        ((0, 1), (2, 1)),
        ((0, 2), (2, 1)),
        ((0, 1), (2, 2)),
        ((2, 1), (2, 1)),
        ((0, 2), (2, 2)),
        ((2, 1), (4, 1)),
        ((2, 2), (2, 1)),
        ((2, 2), (2, 2)),
        ((2, 2), (4, 1)),
        ((4, 1), (4, 1)),
    ],
    &[
        ((0, 1), (4, 1)),
        ((2, 1), (2, 1)),
        ((0, 2), (4, 1)),
        ((2, 2), (2, 1)),
        ((2, 1), (4, 1)),
        ((2, 2), (2, 2)),
        ((2, 2), (4, 1)),
        ((4, 1), (4, 1)),
    ],
    &[((2, 1), (4, 1)), ((2, 2), (4, 1)), ((4, 1), (4, 1))],
    &[((4, 1), (4, 1))],
];

/// Index of `T^{ℓ,copy,m}` in [`uncoupled_basis`].
pub fn uncoupled_index(l: usize, copy: usize, m: i32) -> usize {
    match l {
        0 => copy - 1,
        2 => 2 + 5 * (copy - 1) + (m + 2) as usize,
        4 => 12 + (m + 4) as usize,
        _ => panic!("no degree-{l} component in V"),
    }
}

fn fib_sphere(n: usize) -> Vec<Vec3> {
    let ga = PI * (3.0 - 5.0_f64.sqrt());
    (0..n)
        .map(|i| {
            let t = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let s = (1.0 - t * t).sqrt();
            Vec3::new(s * (ga * i as f64).cos(), s * (ga * i as f64).sin(), t)
        })
        .collect()
}

/// Symmetric traceless tensor `H` of rank `l` with `H·x^l = S_l^m(x)` on the
/// unit sphere, flattened over `3^l` indices. The polynomial coefficients are
/// fitted on sample points; the fit is exact since the monomials of degree `l`
/// are independent on the sphere.
fn harmonic_tensor(l: usize, m: i32) -> Vec<f64> {
    let mut monos = Vec::new();
    for a in 0..=l {
        for b in 0..=(l - a) {
            monos.push([a, b, l - a - b]);
        }
    }
    let pts = fib_sphere(64);
    let a = DMatrix::from_fn(pts.len(), monos.len(), |i, j| {
        let p = pts[i];
        p.x.powi(monos[j][0] as i32) * p.y.powi(monos[j][1] as i32) * p.z.powi(monos[j][2] as i32)
    });
    let b = DVector::from_iterator(pts.len(), pts.iter().map(|p| harmonics(l, p)[(m + l as i32) as usize]));
    let (c, _) = lstsq(&a, &b);
    let fact = |n: usize| (1..=n).product::<usize>() as f64;
    let mut out = vec![0.0; 3usize.pow(l as u32)];
    for (n, v) in out.iter_mut().enumerate() {
        let mut cnt = [0usize; 3];
        let mut r = n;
        for _ in 0..l {
            cnt[r % 3] += 1;
            r /= 3;
        }
        let j = monos.iter().position(|e| *e == cnt).unwrap();
        *v = c[j] * fact(cnt[0]) * fact(cnt[1]) * fact(cnt[2]) / fact(l);
    }
    out
}

fn normalized(t: Tensor21) -> Tensor21 {
    Tensor21(t.0 / t.norm())
}

/// Orthonormal basis `T^{0,1}, T^{0,2}, T^{2,1,q}, T^{2,2,q}, T^{4,1,q}` of `V`
/// (`q` ascending) with `rep_matrix_21(g) T^{ℓ,v,q} = Σ_{q'} D^ℓ_{q'q}(g) T^{ℓ,v,q'}`.
/// `T^{0,1} = δ⊗δ/3`; `T^{0,2}` is the symmetrized `δ_ik δ_jl` made
/// orthogonal to it.
pub fn uncoupled_basis() -> &'static BasisSet {
    static B: OnceLock<BasisSet> = OnceLock::new();
    B.get_or_init(build_uncoupled)
}

fn build_uncoupled() -> BasisSet {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let t01 = normalized(ElasTensor::from_fn(|i, j, k, l| d(i, j) * d(k, l)).into());
    let ii: Tensor21 = ElasTensor::from_fn(|i, j, k, l| 0.5 * (d(i, k) * d(j, l) + d(i, l) * d(j, k))).into();
    let t02 = normalized(Tensor21(ii.0 - t01.0 * t01.0.dot(&ii.0)));
    let mut vectors = vec![t01, t02];
    let mut labels = vec![
        BasisLabel { irrep: "U0g", copy: 1, row: 1 },
        BasisLabel { irrep: "U0g", copy: 2, row: 1 },
    ];
    let a2: Vec<Vec<f64>> = (-2..=2).map(|m| harmonic_tensor(2, m)).collect();
    let am = |q: usize, i: usize, j: usize| a2[q][i * 3 + j];
    let first: Vec<Tensor21> = (0..5)
        .map(|q| ElasTensor::from_fn(|i, j, k, l| d(i, j) * am(q, k, l) + am(q, i, j) * d(k, l)).into())
        .collect();
    let second: Vec<Tensor21> = (0..5)
        .map(|q| {
            ElasTensor::from_fn(|i, j, k, l| {
                d(i, k) * am(q, j, l) + d(i, l) * am(q, j, k) + d(j, k) * am(q, i, l) + d(j, l) * am(q, i, k)
            })
            .into()
        })
        .collect();
    // equivariance makes the norms and overlaps independent of q
    let n1 = first[0].norm();
    let t21: Vec<Tensor21> = first.iter().map(|t| Tensor21(t.0 / n1)).collect();
    let overlap = second[0].0.dot(&t21[0].0);
    let rest: Vec<Tensor21> = second.iter().zip(&t21).map(|(s, t)| Tensor21(s.0 - t.0 * overlap)).collect();
    let n2 = rest[0].norm();
    let t22: Vec<Tensor21> = rest.iter().map(|t| Tensor21(t.0 / n2)).collect();
    for (copy, set) in [(1, &t21), (2, &t22)] {
        for (q, t) in set.iter().enumerate() {
            vectors.push(*t);
            labels.push(BasisLabel { irrep: "U2g", copy, row: q + 1 });
        }
    }
    let h4: Vec<Tensor21> = (-4..=4)
        .map(|m| {
            let h = harmonic_tensor(4, m);
            ElasTensor::from_fn(|i, j, k, l| h[((i * 3 + j) * 3 + k) * 3 + l]).into()
        })
        .collect();
    let n4 = h4[0].norm();
    for (q, t) in h4.iter().enumerate() {
        vectors.push(Tensor21(t.0 / n4));
        labels.push(BasisLabel { irrep: "U4g", copy: 1, row: q + 1 });
    }
    BasisSet { vectors, labels }
}

/// One family `T^{2t,v,u}`, `u = −2t..2t`, as symmetric 21×21 blocks in
/// Kelvin coordinates on both factors.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledBasisTensor {
    pub t: usize,
    pub v: usize,
    pub blocks: Vec<Mat21>,
}

impl CoupledBasisTensor {
    pub fn degree(&self) -> usize {
        2 * self.t
    }

    /// The `u = 0` member, the value of `M^{2t,v}` at the pole.
    pub fn pole(&self) -> &Mat21 {
        &self.blocks[2 * self.t]
    }
}

fn build_family(t: usize, v: usize, pair: (Copy, Copy)) -> CoupledBasisTensor {
    let ((la, ca), (lb, cb)) = pair;
    let b = uncoupled_basis();
    let ell = 2 * t;
    let g = gg_coefficients(ell, la, lb).expect("table degrees satisfy the triangle rule");
    let nb = 2 * lb + 1;
    let blocks = (0..=2 * ell)
        .map(|u| {
            let mut x = Mat21::zeros();
            for qa in 0..(2 * la + 1) {
                for qb in 0..nb {
                    let c = g.data[(u, qa * nb + qb)];
                    if c != 0.0 {
                        let ta = &b.vectors[uncoupled_index(la, ca, qa as i32 - la as i32)].0;
                        let tb = &b.vectors[uncoupled_index(lb, cb, qb as i32 - lb as i32)].0;
                        x += ta * tb.transpose() * c;
                    }
                }
            }
            if (la, ca) == (lb, cb) {
                x
            } else {
                (x + x.transpose()) * std::f64::consts::FRAC_1_SQRT_2
            }
        })
        .collect();
    CoupledBasisTensor { t, v, blocks }
}

fn all_families() -> &'static [Vec<CoupledBasisTensor>] {
    static F: OnceLock<Vec<Vec<CoupledBasisTensor>>> = OnceLock::new();
    F.get_or_init(|| {
        (0..5)
            .map(|t| FAMILIES[t].iter().enumerate().map(|(i, &p)| build_family(t, i + 1, p)).collect())
            .collect()
    })
}

/// The `m_{2t}` families of degree `2t` (`t = 0..4`).
pub fn coupled_basis(t: usize) -> &'static [CoupledBasisTensor] {
    assert!(t <= 4, "t = {t} above 4");
    debug_assert_eq!(all_families()[t].len(), FAMILY_SIZES[t]);
    &all_families()[t]
}

/// The `(2t, v)` label of each of the [`M_COUNT`] invariant functions.
pub fn m_family_labels() -> Vec<(usize, usize)> {
    (0..5).flat_map(|t| (1..=FAMILY_SIZES[t]).map(move |v| (2 * t, v))).collect()
}

/// `M^{2t,v}(p) = Σ_u √(4π/(4t+1)) S^u_{2t}(p̂) T^{2t,v,u}`, all 29 in the
/// order of [`m_family_labels`]. At `p = 0` the direction is read as `ẑ`.
pub fn m_functions(p: &Vec3) -> Vec<Mat21> {
    let mut out = Vec::with_capacity(M_COUNT);
    for t in 0..5 {
        let ell = 2 * t;
        let s = harmonics(ell, p);
        let c = (4.0 * PI / (2 * ell + 1) as f64).sqrt();
        for fam in coupled_basis(t) {
            let mut m = Mat21::zeros();
            for (u, blk) in fam.blocks.iter().enumerate() {
                m += blk * (c * s[u]);
            }
            out.push(m);
        }
    }
    out
}

/// The invariant functions `M^{2t,v}` written as `Σ_q c_{nq} L^q`.
#[derive(Debug, Clone)]
pub struct MToL {
    /// Row `n` (order of [`m_family_labels`]), column `q − 1`.
    pub coefficients: DMatrix<f64>,
    /// Largest least-squares residual over the sample, per entry.
    pub residual: f64,
    /// Rank of the `L^q` system on the sample.
    pub rank: usize,
}

impl MToL {
    /// `Σ_q c_{nq} L^q(p)`.
    pub fn evaluate(&self, n: usize, p: &Vec3) -> Result<Mat21, RepError> {
        let mut m = Mat21::zeros();
        for q in 1..=L_COUNT {
            let c = self.coefficients[(n, q - 1)];
            if c != 0.0 {
                m += l_function(q, p)? * c;
            }
        }
        Ok(m)
    }
}

/// Least-squares expansion over a fixed overdetermined set of directions.
/// Fails when the residual is above `1e-9`, which would mean the `L^q` do not
/// span the invariant functions.
pub fn m_to_l_expansion() -> Result<&'static MToL, RepError> {
    static R: OnceLock<Result<MToL, RepError>> = OnceLock::new();
    R.get_or_init(compute_m_to_l).as_ref().map_err(|e| e.clone())
}

fn compute_m_to_l() -> Result<MToL, RepError> {
    let pts = fib_sphere(24);
    let rows = 441 * pts.len();
    let mut a = DMatrix::zeros(rows, L_COUNT);
    let mut b = DMatrix::zeros(rows, M_COUNT);
    for (s, p) in pts.iter().enumerate() {
        for q in 1..=L_COUNT {
            let l = l_function(q, p)?;
            for (e, v) in l.iter().enumerate() {
                a[(s * 441 + e, q - 1)] = *v;
            }
        }
        for (n, m) in m_functions(p).iter().enumerate() {
            for (e, v) in m.iter().enumerate() {
                b[(s * 441 + e, n)] = *v;
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax).count();
    let x = svd.solve(&b, 1e-10 * smax).expect("svd with u and v");
    let residual = (&a * &x - &b).abs().max();
    let coefficients = x.transpose().map(|v| if v.abs() < 1e-13 { 0.0 } else { v });
    if residual > 1e-9 {
        return Err(RepError::Insufficient(residual));
    }
    Ok(MToL { coefficients, residual, rank })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rep::harmonics::d_matrix;
    use crate::tensor::{rep_matrix_21, Ortho3};

    #[test]
    fn uncoupled_orthonormal_and_equivariant() {
        let b = uncoupled_basis();
        assert_eq!(b.len(), 21);
        assert!(b.orthonormality_defect() < 1e-12);
        let g = Ortho3::rot_axis(&Vec3::new(0.2, -0.7, 1.0), 1.3).neg();
        let r = rep_matrix_21(&g);
        for (l, copies) in [(0, 2), (2, 2), (4, 1)] {
            let d = d_matrix(l, &g);
            for c in 1..=copies {
                for q in -(l as i32)..=l as i32 {
                    let lhs = r * b.vectors[uncoupled_index(l, c, q)].0;
                    let mut rhs = Tensor21::zero().0;
                    for q2 in -(l as i32)..=l as i32 {
                        rhs += b.vectors[uncoupled_index(l, c, q2)].0 * d[((q2 + l as i32) as usize, (q + l as i32) as usize)];
                    }
                    assert!((lhs - rhs).norm() < 1e-11, "l={l} c={c} q={q}");
                }
            }
        }
    }

    #[test]
    fn first_isotropic_tensor() {
        let t = uncoupled_basis().vectors[0].to_elas();
        assert!((t.get(0, 0, 1, 1) - 1.0 / 3.0).abs() < 1e-15);
        assert!(t.get(0, 1, 0, 1).abs() < 1e-15);
    }

    #[test]
    fn family_sizes_and_orthonormality() {
        let sizes: Vec<usize> = (0..5).map(|t| coupled_basis(t).len()).collect();
        assert_eq!(sizes, vec![7, 10, 8, 3, 1]);
        for t in 0..5 {
            for fam in coupled_basis(t) {
                assert_eq!(fam.blocks.len(), 4 * t + 1);
                for (i, a) in fam.blocks.iter().enumerate() {
                    assert!((a - a.transpose()).abs().max() < 1e-13);
                    for (j, b) in fam.blocks.iter().enumerate() {
                        let ip = a.component_mul(b).sum();
                        let e = if i == j { 1.0 } else { 0.0 };
                        assert!((ip - e).abs() < 1e-11, "t={t} v={}", fam.v);
                    }
                }
            }
        }
        // T^{0,1,0} = T^{0,1} ⊗ T^{0,1}
        let t01 = uncoupled_basis().vectors[0].0;
        assert!((coupled_basis(0)[0].blocks[0] - t01 * t01.transpose()).abs().max() < 1e-15);
    }

    #[test]
    fn poles_span_a_29_dimensional_commutant() {
        let mut cols = Vec::new();
        for t in 0..5 {
            for fam in coupled_basis(t) {
                let p = fam.pole();
                cols.push(DVector::from_column_slice(p.as_slice()));
                for g in [Ortho3::rot_z(1.0), Ortho3::rot_x(PI)] {
                    let u = rep_matrix_21(&g);
                    assert!((u * p * u.transpose() - p).abs().max() < 1e-11);
                }
            }
        }
        let m = crate::linalg::hstack(&cols, 441);
        assert_eq!(crate::linalg::rank(&m, 1e-10), 29);
    }

    #[test]
    fn m_functions_are_equivariant() {
        let p = Vec3::new(0.3, -0.4, 0.5);
        let g = Ortho3::rot_axis(&Vec3::new(1.0, 1.0, 0.0), 0.8);
        let u = rep_matrix_21(&g);
        let a = m_functions(&p);
        let b = m_functions(&g.apply(&p));
        for (x, y) in a.iter().zip(&b) {
            assert!((u * x * u.transpose() - y).abs().max() < 1e-11);
        }
        let pole = m_functions(&Vec3::z());
        let mut n = 0;
        for t in 0..5 {
            for fam in coupled_basis(t) {
                assert!((pole[n] - fam.pole()).abs().max() < 1e-12);
                n += 1;
            }
        }
    }

    #[test]
    fn expansion_in_l_functions() {
        let e = m_to_l_expansion().unwrap_or_else(|err| panic!("{err}"));
        assert_eq!(e.rank, 29);
        assert!(e.residual < 1e-9);
        // fresh directions
        for p in [Vec3::new(0.9, -0.2, 0.1), Vec3::new(-0.3, 0.35, -0.8)] {
            let m = m_functions(&p);
            for n in 0..M_COUNT {
                assert!((e.evaluate(n, &p).unwrap() - m[n]).abs().max() < 1e-9, "n={n}");
            }
        }
        // M^{0,1} is a multiple of L^1 alone
        let row = e.coefficients.row(0);
        assert!(row.iter().skip(1).all(|v| v.abs() < 1e-10));
        assert!((row[0] - 1.0 / 9.0).abs() < 1e-10);
    }
}
