//! Coupling coefficients for products of real spherical harmonics.
//!
//! `g^{m[m₁,m₂]}_{ℓ[ℓ₁,ℓ₂]}` are the real coefficients with
//! `e_m = Σ g^{m[m₁,m₂]} S^{m₁}_{ℓ₁} ⊗ S^{m₂}_{ℓ₂}` transforming under
//! rotations exactly like `S^m_ℓ`. They come from the complex Clebsch–Gordan
//! coefficients conjugated by the real/complex change of basis.

use super::RepError;
use nalgebra::{Complex, DMatrix};
use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

type C = Complex<f64>;

/// Largest `ℓ₁`, `ℓ₂` accepted.
pub const MAX_FACTOR_DEGREE: usize = 4;

/// One table `g_{ℓ[ℓ₁,ℓ₂]}`: a `(2ℓ+1) × (2ℓ₁+1)(2ℓ₂+1)` matrix, rows indexed
/// by `m + ℓ`, columns by `(m₁ + ℓ₁)(2ℓ₂ + 1) + m₂ + ℓ₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct GGTable {
    pub l: usize,
    pub l1: usize,
    pub l2: usize,
    pub data: DMatrix<f64>,
}

impl GGTable {
    pub fn get(&self, m: i32, m1: i32, m2: i32) -> f64 {
        let r = (m + self.l as i32) as usize;
        let c = (m1 + self.l1 as i32) as usize * (2 * self.l2 + 1) + (m2 + self.l2 as i32) as usize;
        self.data[(r, c)]
    }
}

fn fact(n: i64) -> f64 {
    (1..=n).fold(1.0, |a, k| a * k as f64)
}

/// Complex Clebsch–Gordan coefficient `⟨j₁ m₁ j₂ m₂ | J M⟩` (Racah formula).
pub fn clebsch_gordan(j1: i64, m1: i64, j2: i64, m2: i64, j: i64, m: i64) -> f64 {
    if m1 + m2 != m || j < (j1 - j2).abs() || j > j1 + j2 || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    let pre = ((2 * j + 1) as f64 * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j)
        / fact(j1 + j2 + j + 1))
    .sqrt();
    let pre2 = (fact(j + m) * fact(j - m) * fact(j1 - m1) * fact(j1 + m1) * fact(j2 - m2) * fact(j2 + m2)).sqrt();
    let mut s = 0.0;
    for k in 0..=(j1 + j2 - j) {
        let a = [j1 + j2 - j - k, j1 - m1 - k, j2 + m2 - k, j - j2 + m1 + k, j - j1 - m2 + k];
        if a.iter().any(|&v| v < 0) {
            continue;
        }
        let den = fact(k) * a.iter().map(|&v| fact(v)).product::<f64>();
        s += if k % 2 == 0 { 1.0 } else { -1.0 } / den;
    }
    pre * pre2 * s
}

/// Rows `m`, columns `μ`: `S^m = Σ_μ C_{mμ} Y^μ` with `Y` the
/// Condon–Shortley complex harmonics.
fn real_from_complex(l: usize) -> DMatrix<C> {
    let n = 2 * l + 1;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut c = DMatrix::from_element(n, n, C::new(0.0, 0.0));
    c[(l, l)] = C::new(1.0, 0.0);
    for k in 1..=l {
        let sg = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[(l + k, l + k)] = C::new(sg * s, 0.0);
        c[(l + k, l - k)] = C::new(s, 0.0);
        c[(l - k, l + k)] = C::new(0.0, sg * s);
        c[(l - k, l - k)] = C::new(0.0, -s);
    }
    c
}

fn compute(l: usize, l1: usize, l2: usize) -> GGTable {
    let (n, n1, n2) = (2 * l + 1, 2 * l1 + 1, 2 * l2 + 1);
    let c = real_from_complex(l);
    let c1 = real_from_complex(l1);
    let c2 = real_from_complex(l2);
    let mut g = DMatrix::from_element(n, n1 * n2, C::new(0.0, 0.0));
    for mu1 in 0..n1 {
        for mu2 in 0..n2 {
            let (a, b) = (mu1 as i64 - l1 as i64, mu2 as i64 - l2 as i64);
            let mu = a + b;
            if mu.abs() > l as i64 {
                continue;
            }
            let cg = clebsch_gordan(l1 as i64, a, l2 as i64, b, l as i64, mu);
            if cg == 0.0 {
                continue;
            }
            let mu_i = (mu + l as i64) as usize;
            for m in 0..n {
                let cm = c[(m, mu_i)] * cg;
                if cm.norm() == 0.0 {
                    continue;
                }
                for m1 in 0..n1 {
                    let x = cm * c1[(m1, mu1)].conj();
                    if x.norm() == 0.0 {
                        continue;
                    }
                    for m2 in 0..n2 {
                        g[(m, m1 * n2 + m2)] += x * c2[(m2, mu2)].conj();
                    }
                }
            }
        }
    }
    // odd ℓ₁ + ℓ₂ + ℓ gives a purely imaginary table
    let odd = (l + l1 + l2) % 2 == 1;
    let mut data = g.map(|z| if odd { z.im } else { z.re });
    let first = data.row(0).iter().cloned().find(|v| v.abs() > 1e-12).unwrap_or(1.0);
    if first < 0.0 {
        data = -data;
    }
    data.apply(|v| {
        if v.abs() < 1e-15 {
            *v = 0.0
        }
    });
    GGTable { l, l1, l2, data }
}

/// The table `g_{ℓ[ℓ₁,ℓ₂]}`, cached. Each table is scaled by one overall sign
/// so that its first nonzero entry (in row `m = −ℓ`) is positive; flipping
/// signs of individual rows would break the transformation law.
pub fn gg_coefficients(l: usize, l1: usize, l2: usize) -> Result<GGTable, RepError> {
    if l1 > MAX_FACTOR_DEGREE || l2 > MAX_FACTOR_DEGREE {
        return Err(RepError::Degree(l1.max(l2)));
    }
    if l + l1.min(l2) < l1.max(l2) || l > l1 + l2 {
        return Err(RepError::Triangle { l, l1, l2 });
    }
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize, usize), GGTable>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().unwrap().get(&(l, l1, l2)) {
        return Ok(t.clone());
    }
    let t = compute(l, l1, l2);
    cache.lock().unwrap().insert((l, l1, l2), t.clone());
    Ok(t)
}
