//! Real orthonormal spherical harmonics `S_ℓ^m` and their rotation matrices.
//!
//! `S_ℓ^m(x̂) = √2 N P_ℓ^m(cos θ) cos mφ` for `m > 0`, `N P_ℓ(cos θ)` for
//! `m = 0` and `−√2 N P_ℓ^{|m|}(cos θ) sin |m|φ` for `m < 0`, without the
//! Condon–Shortley phase, polar axis `z`. Vectors are indexed by `m + ℓ`.

use crate::special::gauss_legendre;
use crate::tensor::{Ortho3, Vec3};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Largest degree supported by the quadrature behind [`d_matrix`].
pub const MAX_DEGREE: usize = 8;

fn unit(x: &Vec3) -> Vec3 {
    let n = x.norm();
    if n == 0.0 {
        Vec3::z()
    } else {
        x / n
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// All `2ℓ + 1` harmonics of degree `l` at the direction of `x`
/// (the zero vector is read as `ẑ`).
pub fn harmonics(l: usize, x: &Vec3) -> Vec<f64> {
    let u = unit(x);
    let t = u.z;
    let mut out = vec![0.0; 2 * l + 1];
    // (x + iy)^m = sin^m θ · e^{imφ}
    let (mut re, mut im) = (1.0, 0.0);
    for m in 0..=l {
        if m > 0 {
            let r = re * u.x - im * u.y;
            im = re * u.y + im * u.x;
            re = r;
        }
        // P_ℓ^m(t) / sin^m θ by the upward recurrence in ℓ
        let mut pmm = 1.0;
        for k in 0..m {
            pmm *= (2 * k + 1) as f64;
        }
        let p = if l == m {
            pmm
        } else {
            let mut a = pmm;
            let mut b = t * (2 * m + 1) as f64 * pmm;
            for n in (m + 2)..=l {
                let c = (t * (2 * n - 1) as f64 * b - (n + m - 1) as f64 * a) / (n - m) as f64;
                a = b;
                b = c;
            }
            b
        };
        let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - m) / factorial(l + m)).sqrt();
        if m == 0 {
            out[l] = norm * p;
        } else {
            let s = std::f64::consts::SQRT_2 * norm * p;
            out[l + m] = s * re;
            out[l - m] = -s * im;
        }
    }
    out
}

/// A single harmonic `S_ℓ^m(x̂)`.
pub fn real_harmonic(l: usize, m: i32, x: &Vec3) -> f64 {
    assert!(m.unsigned_abs() as usize <= l, "order {m} exceeds degree {l}");
    harmonics(l, x)[(m + l as i32) as usize]
}

fn sphere_rule() -> &'static [(Vec3, f64)] {
    use std::sync::OnceLock;
    static RULE: OnceLock<Vec<(Vec3, f64)>> = OnceLock::new();
    RULE.get_or_init(|| {
        // exact for polynomials of degree ≤ 2·MAX_DEGREE on the sphere
        let nphi = 2 * MAX_DEGREE + 2;
        let mut pts = Vec::new();
        for (t, w) in gauss_legendre(MAX_DEGREE + 1) {
            let s = (1.0 - t * t).sqrt();
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                pts.push((Vec3::new(s * phi.cos(), s * phi.sin(), t), w * 2.0 * PI / nphi as f64));
            }
        }
        pts
    })
}

/// Matrix `D^ℓ(g)` with `S_ℓ^m(gᵀx) = Σ_{m'} D_{m'm} S_ℓ^{m'}(x)`, so the
/// columns describe how `g` moves each harmonic. Orthogonal, and
/// `D(gh) = D(g) D(h)`.
pub fn d_matrix(l: usize, g: &Ortho3) -> DMatrix<f64> {
    assert!(l <= MAX_DEGREE, "degree {l} above {MAX_DEGREE}");
    let n = 2 * l + 1;
    let gt = g.inverse();
    let mut d = DMatrix::zeros(n, n);
    for (x, w) in sphere_rule() {
        let a = harmonics(l, x);
        let b = harmonics(l, &gt.apply(x));
        for i in 0..n {
            let wa = w * a[i];
            for j in 0..n {
                d[(i, j)] += wa * b[j];
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;

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

    #[test]
    fn low_degree_closed_forms() {
        let x = Vec3::new(0.3, -0.5, 0.8).normalize();
        let c1 = (3.0 / (4.0 * PI)).sqrt();
        let h1 = harmonics(1, &x);
        assert!((h1[2] - c1 * x.x).abs() < 1e-15);
        assert!((h1[1] - c1 * x.z).abs() < 1e-15);
        assert!((h1[0] + c1 * x.y).abs() < 1e-15);
        let h2 = harmonics(2, &x);
        let c = 0.5 * (15.0 / PI).sqrt();
        assert!((h2[4] - 0.5 * c * (x.x * x.x - x.y * x.y)).abs() < 1e-15);
        assert!((h2[0] + c * x.x * x.y).abs() < 1e-15);
        assert!((h2[2] - 0.25 * (5.0 / PI).sqrt() * (3.0 * x.z * x.z - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn orthonormal_under_quadrature() {
        for l in 0..=MAX_DEGREE {
            for l2 in [l, (l + 2).min(MAX_DEGREE)] {
                let mut g = DMatrix::<f64>::zeros(2 * l + 1, 2 * l2 + 1);
                for (x, w) in sphere_rule() {
                    let a = harmonics(l, x);
                    let b = harmonics(l2, x);
                    for i in 0..a.len() {
                        for j in 0..b.len() {
                            g[(i, j)] += w * a[i] * b[j];
                        }
                    }
                }
                if l == l2 {
                    g -= DMatrix::identity(2 * l + 1, 2 * l + 1);
                }
                assert!(g.abs().max() < 1e-13, "l={l} l2={l2}");
            }
        }
    }

    #[test]
    fn d_matrix_is_a_representation() {
        let g = Ortho3::rot_axis(&Vec3::new(1.0, 2.0, -0.5), 0.9);
        let h = Ortho3::rot_axis(&Vec3::new(-0.3, 0.1, 1.0), 2.2).neg();
        for l in 0..=MAX_DEGREE {
            let dg = d_matrix(l, &g);
            let dh = d_matrix(l, &h);
            let dgh = d_matrix(l, &(g * h));
            assert!((&dg * &dh - dgh).abs().max() < 1e-12, "l={l}");
            let n = 2 * l + 1;
            assert!((dg.transpose() * &dg - DMatrix::identity(n, n)).abs().max() < 1e-12);
            // defining relation at sample points
            for x in fib_sphere(7) {
                let lhs = harmonics(l, &g.inverse().apply(&x));
                let rhs = dg.transpose() * nalgebra::DVector::from_vec(harmonics(l, &x));
                for m in 0..n {
                    assert!((lhs[m] - rhs[m]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn z_rotation_mixes_plus_minus_m() {
        let phi = 0.4;
        let d = d_matrix(3, &Ortho3::rot_z(phi));
        // S^m(Rz(-φ)x) with cos mφ pairs
        assert!((d[(3 + 2, 3 + 2)] - (2.0 * phi).cos()).abs() < 1e-13);
        assert!((d[(3, 3)] - 1.0).abs() < 1e-13);
    }
}
