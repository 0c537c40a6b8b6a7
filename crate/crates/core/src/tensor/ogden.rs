//! Ogden tensors `I^ν` of rank `2ν+2`.
//!
//! `I⁰ = δ`, `I¹_ijkl = (δ_ik δ_jl + δ_il δ_jk)/2` and, for ν ≥ 2,
//!
//! ```text
//! I^ν_{i1…i(2ν+2)} = ν⁻¹ Σ_{r=1..ν} I¹_{i1 p i(2r+1) i(2r+2)} I^{ν−1}_{p i2 (pairs without r)}
//! ```

use super::TensorError;

#[derive(Debug, Clone, PartialEq)]
pub struct OgdenTensor {
    rank: usize,
    data: Vec<f64>,
}

impl OgdenTensor {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        debug_assert_eq!(idx.len(), self.rank);
        self.data[offset(idx)]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

fn offset(idx: &[usize]) -> usize {
    idx.iter().fold(0, |acc, &i| acc * 3 + i)
}

fn unflatten(mut n: usize, rank: usize) -> Vec<usize> {
    let mut idx = vec![0; rank];
    for slot in idx.iter_mut().rev() {
        *slot = n % 3;
        n /= 3;
    }
    idx
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

fn i1(i: usize, j: usize, k: usize, l: usize) -> f64 {
    0.5 * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k))
}

/// The Ogden tensor `I^ν` for `0 ≤ ν ≤ 3`.
pub fn ogden_tensor(nu: usize) -> Result<OgdenTensor, TensorError> {
    if nu > 3 {
        return Err(TensorError::OgdenOrder(nu));
    }
    Ok(build(nu))
}

fn build(nu: usize) -> OgdenTensor {
    let rank = 2 * nu + 2;
    let len = 3usize.pow(rank as u32);
    let mut data = vec![0.0; len];
    match nu {
        0 => {
            for (n, v) in data.iter_mut().enumerate() {
                let idx = unflatten(n, 2);
                *v = delta(idx[0], idx[1]);
            }
        }
        1 => {
            for (n, v) in data.iter_mut().enumerate() {
                let x = unflatten(n, 4);
                *v = i1(x[0], x[1], x[2], x[3]);
            }
        }
        _ => {
            let prev = build(nu - 1);
            for (n, v) in data.iter_mut().enumerate() {
                let x = unflatten(n, rank);
                let mut s = 0.0;
                for r in 1..=nu {
                    let (a, b) = (x[2 * r], x[2 * r + 1]);
                    let mut rest = Vec::with_capacity(rank - 2);
                    rest.push(0);
                    rest.push(x[1]);
                    for q in 1..=nu {
                        if q != r {
                            rest.push(x[2 * q]);
                            rest.push(x[2 * q + 1]);
                        }
                    }
                    for p in 0..3 {
                        let c = i1(x[0], p, a, b);
                        if c != 0.0 {
                            rest[0] = p;
                            s += c * prev.get(&rest);
                        }
                    }
                }
                *v = s / nu as f64;
            }
        }
    }
    OgdenTensor { rank, data }
}
