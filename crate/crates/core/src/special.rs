//! Bessel functions and Gauss–Legendre rules.

use gauss_quad::GaussLegendre;
use std::num::NonZeroUsize;

/// Bessel function of the first kind `J_n(x)` for integer order.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x < 0.0 {
        let v = puruspe::Jn(n, -x);
        return if n.is_multiple_of(2) { v } else { -v };
    }
    puruspe::Jn(n, x)
}

/// Spherical Bessel function `j_ℓ(x)`.
pub fn spherical_j(l: u32, x: f64) -> f64 {
    let ax = x.abs();
    let sign = if x < 0.0 && l % 2 == 1 { -1.0 } else { 1.0 };
    let v = if ax < 0.5 + 0.1 * l as f64 {
        series_j(l, ax)
    } else if l == 0 {
        ax.sin() / ax
    } else {
        let (j, _, _, _) = puruspe::besseljy(l as f64 + 0.5, ax);
        j * (std::f64::consts::FRAC_PI_2 / ax).sqrt()
    };
    sign * v
}

fn series_j(l: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 0..l {
        lead *= x / (2 * k + 3) as f64;
    }
    // x^l / (2l+1)!! with the first factor already folded in
    let mut term = 1.0;
    let mut sum = 1.0;
    let z = 0.5 * x * x;
    for k in 1..60 {
        term *= -z / (k as f64 * (2 * l + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Legendre polynomial `P_ℓ(t)` by the three-term recurrence.
pub fn legendre_p(l: usize, t: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, t);
    if l == 0 {
        return p0;
    }
    for n in 1..l {
        let p2 = ((2 * n + 1) as f64 * t * p1 - n as f64 * p0) / (n + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n.max(1)).unwrap());
    rule.iter().map(|&(x, w)| (x, w)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_zero_and_known_values() {
        assert_eq!(bessel_j(0, 0.0), 1.0);
        assert!((bessel_j(0, 2.404825557695773)).abs() < 1e-14);
        assert!((bessel_j(1, 1.0) - 0.44005058574493355).abs() < 1e-15);
        assert!((bessel_j(3, -2.0) + bessel_j(3, 2.0)).abs() < 1e-16);
    }

    #[test]
    fn spherical_against_closed_forms() {
        for &x in &[1e-6_f64, 0.01, 0.3, 0.7, 1.5, 4.0, 13.0, 40.0] {
            let s = x.sin();
            let c = x.cos();
            let j0 = s / x;
            let j1 = s / (x * x) - c / x;
            let j2 = (3.0 / (x * x) - 1.0) * s / x - 3.0 * c / (x * x);
            assert!((spherical_j(0, x) - j0).abs() < 1e-14, "x={x}");
            if x < 0.1 {
                let series = x / 3.0 - x.powi(3) / 30.0 + x.powi(5) / 840.0;
                assert!((spherical_j(1, x) - series).abs() < 1e-15, "x={x}");
            } else {
                assert!((spherical_j(1, x) - j1).abs() < 1e-14, "x={x}");
            }
            if x > 0.2 {
                assert!((spherical_j(2, x) - j2).abs() < 1e-13, "x={x}");
            }
        }
        assert_eq!(spherical_j(3, 0.0), 0.0);
        assert_eq!(spherical_j(0, 0.0), 1.0);
    }

    #[test]
    fn series_matches_upward_region() {
        for l in 0..9 {
            let x = 0.5 + 0.1 * l as f64;
            let a = series_j(l, x);
            let (j, _, _, _) = puruspe::besseljy(l as f64 + 0.5, x);
            let b = j * (std::f64::consts::FRAC_PI_2 / x).sqrt();
            assert!((a - b).abs() < 1e-14 * b.abs().max(1e-3), "l={l}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let r = gauss_legendre(5);
        let s: f64 = r.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-15);
        assert!((legendre_p(2, 0.5) + 0.125).abs() < 1e-16);
    }
}
