//! The 29 rank-8 invariant couplings `L^q(x)`.
//!
//! Each `L^q` is written with unprimed indices `i j k l` and primed indices
//! `i' j' k' l'` (here `a b c d`). Entries for `q ≥ 8` are homogeneous of
//! degree 0 in `x`, so they are evaluated at the unit vector `x/‖x‖`.
//!
//! The expressions follow the reference table term for term, with three
//! rows repaired where a printed term repeats one free index and drops
//! another (so is not a tensor): in `q = 11` the terms `δ_{kj'} x_l x_{j'}`
//! and `δ_{jk'} x_j x_{l'}` read `δ_{kj'} x_l x_{i'}` and `δ_{jk'} x_i x_{l'}`;
//! in `q = 25` the `I_{jl··}` term carries `x_i x_k`; in `q = 22` five terms
//! are completed to the pattern of their neighbours. [`l_function`] projects
//! the raw rank-8 array onto `S²(S²)⊗S²(S²)` before returning 21×21 Kelvin
//! coordinates; [`l_symmetry_defect`] measures how far the raw array is from
//! symmetric.

use super::{component_orbit, kelvin_weights, Mat21, TensorError, Vec3, COMPONENTS};
use super::ogden::ogden_tensor;
use std::sync::OnceLock;

pub type Rank8Block = Mat21;

pub const L_COUNT: usize = 29;

struct Ogden {
    i4: Vec<f64>,
    i6: Vec<f64>,
}

fn ogden() -> &'static Ogden {
    static O: OnceLock<Ogden> = OnceLock::new();
    O.get_or_init(|| Ogden {
        i4: ogden_tensor(1).unwrap().data().to_vec(),
        i6: ogden_tensor(2).unwrap().data().to_vec(),
    })
}

#[inline]
fn f8(i: usize, j: usize, k: usize, l: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((((((i * 3 + j) * 3 + k) * 3 + l) * 3 + a) * 3 + b) * 3 + c) * 3 + d
}

/// Evaluates the printed expression of `L^q` at the index tuple.
#[allow(clippy::too_many_arguments)]
fn entry(q: usize, x: &[f64; 3], o: &Ogden, t: [usize; 8]) -> f64 {
    let [i, j, k, l, a, b, c, d] = t;
    let dl = |p: usize, r: usize| if p == r { 1.0 } else { 0.0 };
    let i4 = |p: usize, r: usize, s: usize, u: usize| o.i4[((p * 3 + r) * 3 + s) * 3 + u];
    let i6 = |p: usize, r: usize, s: usize, u: usize, v: usize, w: usize| {
        o.i6[((((p * 3 + r) * 3 + s) * 3 + u) * 3 + v) * 3 + w]
    };
    let xx = |p: usize| x[p];
    // recurring sums
    let s4 = |p: usize, r: usize, s: usize, u: usize| {
        dl(p, s) * xx(r) * xx(u) + dl(p, u) * xx(r) * xx(s) + dl(r, s) * xx(p) * xx(u) + dl(r, u) * xx(p) * xx(s)
    };
    let s2 = |p: usize, r: usize, s: usize, u: usize| dl(p, r) * xx(s) * xx(u) + dl(s, u) * xx(p) * xx(r);
    let x4 = |p: usize, r: usize, s: usize, u: usize| xx(p) * xx(r) * xx(s) * xx(u);
    match q {
        1 => dl(i, j) * dl(k, l) * dl(a, b) * dl(c, d),
        2 => 2.0 * (dl(i, j) * dl(k, l) * i4(a, b, c, d) + dl(a, b) * dl(c, d) * i4(i, j, k, l)),
        3 => {
            2.0 * (dl(i, j) * (dl(a, b) * i4(k, l, c, d) + dl(c, d) * i4(k, l, a, b))
                + dl(k, l) * (dl(a, b) * i4(i, j, c, d) + dl(c, d) * i4(i, j, a, b)))
        }
        4 => 4.0 * i4(i, j, k, l) * i4(a, b, c, d),
        5 => {
            8.0 * (dl(i, j) * i6(k, l, a, b, c, d)
                + dl(k, l) * i6(i, j, a, b, c, d)
                + dl(a, b) * i6(i, j, k, l, c, d)
                + dl(c, d) * i6(i, j, k, l, a, b))
        }
        6 => 4.0 * (i4(i, j, a, b) * i4(k, l, c, d) + i4(i, j, c, d) * i4(k, l, a, b)),
        7 => {
            4.0 * (i4(i, j, a, c) * i4(k, l, b, d)
                + i4(i, j, a, d) * i4(k, l, b, c)
                + i4(i, j, b, c) * i4(k, l, a, d)
                + i4(i, j, b, d) * i4(k, l, a, c))
        }
        8 => {
            dl(i, j) * dl(k, l) * (dl(a, b) * xx(c) * xx(d) + dl(c, d) * xx(a) * xx(b))
                + dl(a, b) * dl(c, d) * (dl(i, j) * xx(k) * xx(l) + dl(k, l) * xx(i) * xx(j))
        }
        9 => {
            2.0 * (i4(i, j, k, l) * (dl(a, b) * xx(c) * xx(d) + dl(c, d) * xx(a) * xx(b))
                + i4(a, b, c, d) * (dl(i, j) * xx(k) * xx(l) + dl(k, l) * xx(i) * xx(j)))
        }
        10 => dl(i, j) * dl(k, l) * s4(a, b, c, d) + dl(a, b) * dl(c, d) * s4(i, j, k, l),
        11 => {
            dl(i, j)
                * dl(a, b)
                * (dl(k, c) * xx(l) * xx(d) + dl(k, d) * xx(l) * xx(c) + dl(l, c) * xx(k) * xx(d) + dl(l, d) * xx(k) * xx(c))
                + dl(i, j)
                    * dl(c, d)
                    * (dl(k, a) * xx(l) * xx(b) + dl(k, b) * xx(l) * xx(a) + dl(l, a) * xx(k) * xx(b) + dl(l, b) * xx(k) * xx(a))
                + dl(k, l)
                    * dl(a, b)
                    * (dl(i, c) * xx(j) * xx(d) + dl(j, c) * xx(i) * xx(d) + dl(i, d) * xx(j) * xx(c) + dl(j, d) * xx(i) * xx(c))
                + dl(k, l)
                    * dl(c, d)
                    * (dl(i, a) * xx(j) * xx(b) + dl(i, b) * xx(j) * xx(a) + dl(j, a) * xx(i) * xx(b) + dl(j, b) * xx(i) * xx(a))
        }
        12 => 2.0 * (i4(i, j, k, l) * s4(a, b, c, d) + i4(a, b, c, d) * s4(i, j, k, l)),
        13 => {
            2.0 * ((dl(i, j) * i4(k, l, a, b) + dl(k, l) * i4(i, j, a, b)) * xx(c) * xx(d)
                + (dl(i, j) * i4(k, l, c, d) + dl(k, l) * i4(i, j, c, d)) * xx(a) * xx(b)
                + (dl(a, b) * i4(i, j, c, d) + dl(c, d) * i4(i, j, a, b)) * xx(k) * xx(l)
                + (dl(a, b) * i4(k, l, c, d) + dl(c, d) * i4(k, l, a, b)) * xx(i) * xx(j))
        }
        14 => {
            2.0 * ((dl(i, j) * i4(k, l, a, c) + dl(k, l) * i4(i, j, a, c)) * xx(b) * xx(d)
                + (dl(i, j) * i4(k, l, a, d) + dl(k, l) * i4(i, j, a, d)) * xx(b) * xx(c)
                + (dl(i, j) * i4(k, l, b, c) + dl(k, l) * i4(i, j, b, c)) * xx(a) * xx(d)
                + (dl(i, j) * i4(k, l, b, d) + dl(k, l) * i4(i, j, b, d)) * xx(a) * xx(c)
                + (dl(a, b) * i4(i, k, c, d) + dl(c, d) * i4(i, k, a, b)) * xx(j) * xx(l)
                + (dl(a, b) * i4(i, l, c, d) + dl(c, d) * i4(i, l, a, b)) * xx(j) * xx(k)
                + (dl(a, b) * i4(j, k, c, d) + dl(c, d) * i4(j, k, a, b)) * xx(i) * xx(l)
                + (dl(a, b) * i4(j, l, c, d) + dl(c, d) * i4(j, l, a, b)) * xx(i) * xx(k))
        }
        15 => {
            8.0 * (i6(i, j, k, l, a, b) * xx(c) * xx(d)
                + i6(i, j, k, l, c, d) * xx(a) * xx(b)
                + i6(i, j, a, b, c, d) * xx(k) * xx(l)
                + i6(k, l, a, b, c, d) * xx(i) * xx(j))
        }
        16 => {
            8.0 * (i6(i, j, k, l, a, c) * xx(b) * xx(d)
                + i6(i, j, k, l, a, d) * xx(b) * xx(c)
                + i6(i, j, k, l, b, c) * xx(a) * xx(d)
                + i6(i, j, k, l, b, d) * xx(a) * xx(c)
                + i6(i, k, a, b, c, d) * xx(j) * xx(l)
                + i6(i, l, a, b, c, d) * xx(j) * xx(k)
                + i6(j, k, a, b, c, d) * xx(i) * xx(l)
                + i6(j, l, a, b, c, d) * xx(i) * xx(k))
        }
        17 => {
            2.0 * (i4(i, j, a, b)
                * (dl(k, c) * xx(l) * xx(d) + dl(k, d) * xx(l) * xx(c) + dl(l, c) * xx(k) * xx(d) + dl(l, d) * xx(k) * xx(c))
                + i4(i, j, c, d)
                    * (dl(k, a) * xx(l) * xx(b) + dl(k, b) * xx(l) * xx(a) + dl(l, a) * xx(k) * xx(b) + dl(l, b) * xx(k) * xx(a))
                + i4(k, l, a, b)
                    * (dl(i, c) * xx(j) * xx(d) + dl(i, d) * xx(j) * xx(c) + dl(j, c) * xx(i) * xx(d) + dl(j, d) * xx(i) * xx(c))
                + i4(k, l, c, d)
                    * (dl(i, a) * xx(j) * xx(b) + dl(i, b) * xx(j) * xx(a) + dl(j, a) * xx(i) * xx(b) + dl(j, b) * xx(i) * xx(a)))
        }
        18 => dl(i, j) * dl(k, l) * x4(a, b, c, d) + dl(a, b) * dl(c, d) * x4(i, j, k, l),
        19 => (dl(i, j) * xx(k) * xx(l) + dl(k, l) * xx(i) * xx(j)) * (dl(a, b) * xx(c) * xx(d) + dl(c, d) * xx(a) * xx(b)),
        20 => 2.0 * (i4(i, j, k, l) * x4(a, b, c, d) + i4(a, b, c, d) * x4(i, j, k, l)),
        21 => {
            (dl(i, j) * xx(k) * xx(l) + dl(k, l) * xx(i) * xx(j)) * s4(a, b, c, d)
                + (dl(a, b) * xx(c) * xx(d) + dl(c, d) * xx(a) * xx(b)) * s4(i, j, k, l)
        }
        22 => {
            dl(i, j)
                * (dl(k, a) * xx(l) * xx(b) * xx(c) * xx(d)
                    + dl(k, b) * xx(l) * xx(a) * xx(c) * xx(d)
                    + dl(k, c) * xx(l) * xx(a) * xx(b) * xx(d)
                    + dl(k, d) * xx(l) * xx(a) * xx(b) * xx(c)
                    + dl(l, a) * xx(k) * xx(b) * xx(c) * xx(d)
                    + dl(l, b) * xx(k) * xx(a) * xx(c) * xx(d)
                    + dl(l, c) * xx(k) * xx(a) * xx(b) * xx(d)
                    + dl(l, d) * xx(k) * xx(a) * xx(b) * xx(c))
                + dl(k, l)
                    * (dl(i, a) * xx(j) * xx(b) * xx(c) * xx(d)
                        + dl(i, b) * xx(j) * xx(a) * xx(c) * xx(d)
                        + dl(i, c) * xx(j) * xx(a) * xx(b) * xx(d)
                        + dl(i, d) * xx(j) * xx(a) * xx(b) * xx(c)
                        + dl(j, a) * xx(i) * xx(b) * xx(c) * xx(d)
                        + dl(j, b) * xx(i) * xx(a) * xx(c) * xx(d)
                        + dl(j, c) * xx(i) * xx(a) * xx(b) * xx(d)
                        + dl(j, d) * xx(i) * xx(a) * xx(b) * xx(c))
                + dl(a, b)
                    * (dl(i, c) * xx(j) * xx(k) * xx(l) * xx(d)
                        + dl(j, c) * xx(i) * xx(k) * xx(l) * xx(d)
                        + dl(k, c) * xx(i) * xx(j) * xx(l) * xx(d)
                        + dl(l, c) * xx(i) * xx(j) * xx(k) * xx(d)
                        + dl(i, d) * xx(j) * xx(k) * xx(l) * xx(c)
                        + dl(j, d) * xx(i) * xx(k) * xx(l) * xx(c)
                        + dl(k, d) * xx(i) * xx(j) * xx(l) * xx(c)
                        + dl(l, d) * xx(i) * xx(j) * xx(k) * xx(c))
                + dl(c, d)
                    * (dl(i, a) * xx(j) * xx(k) * xx(l) * xx(b)
                        + dl(j, a) * xx(i) * xx(k) * xx(l) * xx(b)
                        + dl(k, a) * xx(i) * xx(j) * xx(l) * xx(b)
                        + dl(l, a) * xx(i) * xx(j) * xx(k) * xx(b)
                        + dl(i, b) * xx(j) * xx(k) * xx(l) * xx(a)
                        + dl(j, b) * xx(i) * xx(k) * xx(l) * xx(a)
                        + dl(k, b) * xx(i) * xx(j) * xx(l) * xx(a)
                        + dl(l, b) * xx(i) * xx(j) * xx(k) * xx(a))
        }
        23 => s4(i, j, k, l) * s4(a, b, c, d),
        24 => {
            2.0 * (i4(i, j, a, b) * xx(k) * xx(l) * xx(c) * xx(d)
                + i4(i, j, c, d) * xx(k) * xx(l) * xx(a) * xx(b)
                + i4(k, l, a, b) * xx(i) * xx(j) * xx(c) * xx(d)
                + i4(k, l, c, d) * xx(i) * xx(j) * xx(a) * xx(b))
        }
        25 => {
            2.0 * ((i4(i, j, a, c) * xx(b) * xx(d)
                + i4(i, j, a, d) * xx(b) * xx(c)
                + i4(i, j, b, c) * xx(a) * xx(d)
                + i4(i, j, b, d) * xx(a) * xx(c))
                * xx(k)
                * xx(l)
                + (i4(i, k, a, b) * xx(c) * xx(d) + i4(i, k, c, d) * xx(a) * xx(b)) * xx(j) * xx(l)
                + (i4(i, l, a, b) * xx(c) * xx(d) + i4(i, l, c, d) * xx(a) * xx(b)) * xx(j) * xx(k)
                + (i4(j, k, a, b) * xx(c) * xx(d) + i4(j, k, c, d) * xx(a) * xx(b)) * xx(i) * xx(l)
                + (i4(j, l, a, b) * xx(c) * xx(d) + i4(j, l, c, d) * xx(a) * xx(b)) * xx(i) * xx(k)
                + (i4(k, l, a, c) * xx(b) * xx(d)
                    + i4(k, l, a, d) * xx(b) * xx(c)
                    + i4(k, l, b, c) * xx(a) * xx(d)
                    + i4(k, l, b, d) * xx(a) * xx(c))
                    * xx(i)
                    * xx(j))
        }
        26 => s2(i, j, k, l) * x4(a, b, c, d) + s2(a, b, c, d) * x4(i, j, k, l),
        27 => s4(i, j, k, l) * x4(a, b, c, d) + s4(a, b, c, d) * x4(i, j, k, l),
        28 => {
            let t3 = |p: usize| {
                dl(p, a) * xx(b) * xx(c) * xx(d)
                    + dl(p, b) * xx(a) * xx(c) * xx(d)
                    + dl(p, c) * xx(a) * xx(b) * xx(d)
                    + dl(p, d) * xx(a) * xx(b) * xx(c)
            };
            t3(i) * xx(j) * xx(k) * xx(l) + t3(j) * xx(i) * xx(k) * xx(l) + t3(k) * xx(i) * xx(j) * xx(l) + t3(l) * xx(i) * xx(j) * xx(k)
        }
        29 => x4(i, j, k, l) * x4(a, b, c, d),
        _ => unreachable!(),
    }
}

fn check(q: usize, x: &Vec3) -> Result<[f64; 3], TensorError> {
    if !(1..=L_COUNT).contains(&q) {
        return Err(TensorError::LIndex(q));
    }
    let n = x.norm();
    if q >= 8 {
        if n == 0.0 || !n.is_finite() {
            return Err(TensorError::SingularInput(q));
        }
        Ok([x.x / n, x.y / n, x.z / n])
    } else {
        Ok([0.0; 3])
    }
}

/// Raw rank-8 array of `L^q(x)`, flattened row-major over `(i j k l a b c d)`.
pub fn l_function_raw(q: usize, x: &Vec3) -> Result<Vec<f64>, TensorError> {
    let xh = check(q, x)?;
    let o = ogden();
    let mut out = vec![0.0; 6561];
    for (n, v) in out.iter_mut().enumerate() {
        let mut m = n;
        let mut t = [0usize; 8];
        for s in t.iter_mut().rev() {
            *s = m % 3;
            m /= 3;
        }
        *v = entry(q, &xh, o, t);
    }
    Ok(out)
}

fn project(raw: &[f64]) -> Rank8Block {
    let w = kelvin_weights();
    let mut m = Mat21::zeros();
    for p in 0..21 {
        for r in 0..21 {
            let mut s = 0.0;
            for a in component_orbit(p) {
                for b in component_orbit(r) {
                    s += raw[f8(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])];
                }
            }
            m[(p, r)] = s / (w[p] * w[r]);
        }
    }
    m
}

/// `L^q(x)` as a 21×21 block in Kelvin coordinates on both factors.
pub fn l_function(q: usize, x: &Vec3) -> Result<Rank8Block, TensorError> {
    Ok(project(&l_function_raw(q, x)?))
}

/// Largest deviation of the raw array from the `V⊗V` symmetries
/// (minor and major symmetry within each factor) at direction `x`.
pub fn l_symmetry_defect(q: usize, x: &Vec3) -> Result<f64, TensorError> {
    let raw = l_function_raw(q, x)?;
    let mut worst: f64 = 0.0;
    for p in 0..21 {
        for r in 0..21 {
            let a0 = COMPONENTS[p];
            let b0 = COMPONENTS[r];
            let v0 = raw[f8(a0[0], a0[1], a0[2], a0[3], b0[0], b0[1], b0[2], b0[3])];
            for a in component_orbit(p) {
                for b in component_orbit(r) {
                    let v = raw[f8(a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3])];
                    worst = worst.max((v - v0).abs());
                }
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{rep_matrix_21, Ortho3};

    #[test]
    fn constant_entries() {
        let x = Vec3::new(0.3, 0.1, -0.7);
        let raw = l_function_raw(1, &x).unwrap();
        assert_eq!(raw[f8(0, 0, 1, 1, 2, 2, 0, 0)], 1.0);
        assert_eq!(raw[f8(0, 1, 1, 1, 2, 2, 0, 0)], 0.0);
        let l4 = l_function_raw(4, &x).unwrap();
        assert!((l4[f8(0, 1, 0, 1, 2, 2, 2, 2)] - 4.0 * 0.5).abs() < 1e-15);
        let y = Vec3::new(-1.0, 2.0, 0.5);
        assert_eq!(l4, l_function_raw(4, &y).unwrap());
    }

    #[test]
    fn l29_at_pole() {
        let raw = l_function_raw(29, &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        let nz: Vec<usize> = (0..6561).filter(|&n| raw[n] != 0.0).collect();
        assert_eq!(nz, vec![6560]);
        let m = l_function(29, &Vec3::z()).unwrap();
        assert_eq!(m[(1, 1)], 1.0);
        assert_eq!(m.iter().filter(|v| **v != 0.0).count(), 1);
    }

    #[test]
    fn errors() {
        assert_eq!(l_function(30, &Vec3::x()), Err(TensorError::LIndex(30)));
        assert_eq!(l_function(8, &Vec3::zeros()), Err(TensorError::SingularInput(8)));
        assert!(l_function(7, &Vec3::zeros()).is_ok());
    }

    #[test]
    fn equivariance_sample() {
        let x = Vec3::new(0.2, -0.5, 0.9);
        let g = Ortho3::rot_axis(&Vec3::new(1.0, 1.0, 0.2), 0.9).neg();
        let r = rep_matrix_21(&g);
        for q in 1..=L_COUNT {
            let lhs = l_function(q, &g.apply(&x)).unwrap();
            let rhs = r * l_function(q, &x).unwrap() * r.transpose();
            assert!((lhs - rhs).abs().max() < 1e-10, "q = {q} {}", (lhs - rhs).abs().max());
        }
    }
}
