//! Spectral simulation of Gaussian fields.
//!
//! Each atom is expanded as `Σ_n u_n(x) ξ_n` with deterministic carriers
//! `u_n` and independent amplitudes `ξ_n ~ N(0, Σ_n)`, `Σ_n = w U f Uᵀ` in
//! host coordinates, so that `Σ_n u_n(x) u_n(y) Σ_n` is the kernel of the
//! atom. The finite groups are exact; the continuous ones are truncated.

use crate::covariance::{coset_family, CovarianceError, FieldSpec, SpectralAtom};
use crate::groups::GroupId;
use crate::rep::{harmonics, host_basis, host_rep};
use crate::special::{bessel_j, gauss_legendre, spherical_j};
use crate::tensor::{ElasTensor, Mat3, Ortho3, Vec3};
use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulateError {
    #[error(transparent)]
    Spec(#[from] CovarianceError),
    #[error("the grid is empty")]
    EmptyGrid,
    #[error("matrix is not symmetric (defect {0:.3e})")]
    NotSymmetric(f64),
    #[error("matrix is indefinite beyond tolerance (pivot {0:.3e})")]
    Indefinite(f64),
    #[error("truncation tail {tail:.3e} exceeds tolerance {tol:.3e}; raise the cutoff")]
    Truncation { tail: f64, tol: f64 },
}

/// Points, truncation and seed of a simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationPlan {
    pub points: Vec<Vec3>,
    /// Harmonic degree cutoff (`K2`, `K16`) or azimuthal order cutoff
    /// (`K4`, `K14`). Ignored for finite groups.
    pub l_max: usize,
    pub seed: u64,
    /// Largest accepted truncation tail, if any.
    pub tolerance: Option<f64>,
}

impl SimulationPlan {
    pub fn new(points: Vec<Vec3>, seed: u64) -> Self {
        SimulationPlan { points, l_max: 8, seed, tolerance: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationMetadata {
    pub spec_hash: u64,
    pub seed: u64,
    pub l_max: usize,
    pub realization: u64,
    /// Largest variance deficit of the truncated expansion on the grid.
    pub tail: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationField {
    pub values: Vec<ElasTensor>,
    /// The same values in host coordinates.
    pub coordinates: Vec<DVector<f64>>,
    pub metadata: RealizationMetadata,
}

/// Amplitude of one carrier of one atom, in host coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeDraw {
    pub atom: usize,
    pub carrier: usize,
    pub xi: DVector<f64>,
}

/// Lower factor `L` with `L Lᵀ = m` by diagonal pivoting. Rows are in the
/// original order, so `L` is lower triangular up to the pivot permutation
/// (exactly so when the pivots come in order, as for diagonal-dominant
/// input). Pivots below `tol · max diag` end the factorization and leave
/// the trailing columns zero.
pub fn cholesky_psd(m: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>, SimulateError> {
    let n = m.nrows();
    let asym = (m - m.transpose()).abs().max();
    let scale = m.diagonal().iter().fold(0.0_f64, |a, &b| a.max(b.abs())).max(f64::MIN_POSITIVE);
    if asym > tol * scale.max(1.0) {
        return Err(SimulateError::NotSymmetric(asym));
    }
    let mut a = (m + m.transpose()) * 0.5;
    let mut l = DMatrix::zeros(n, n);
    let mut done = vec![false; n];
    for k in 0..n {
        let (piv, d) = (0..n)
            .filter(|&i| !done[i])
            .map(|i| (i, a[(i, i)]))
            .fold((usize::MAX, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
        if d <= tol * scale {
            // the remaining Schur complement must vanish up to tol
            let rest = (0..n).filter(|&i| !done[i]).map(|i| a[(i, i)]).fold(f64::INFINITY, f64::min);
            if rest < -tol * scale * 10.0 {
                return Err(SimulateError::Indefinite(rest));
            }
            break;
        }
        let s = d.sqrt();
        done[piv] = true;
        for i in 0..n {
            if !done[i] || i == piv {
                l[(i, k)] = a[(i, piv)] / s;
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !done[i] && !done[j] {
                    a[(i, j)] -= l[(i, k)] * l[(j, k)];
                }
            }
        }
    }
    Ok(l)
}

#[derive(Debug, Clone)]
enum Carrier {
    /// `s Π_B trig_B(p_B · (rᵀx)_B)`, sine on the blocks in `mask`.
    Coset { p: Vec3, rt: Mat3, blocks: Vec<Vec<usize>>, mask: u32, scale: f64 },
    /// `s cos(q·x)` or `s sin(q·x)`.
    Plane { q: Vec3, sine: bool, scale: f64 },
    /// `√(4π) j_ℓ(λ|x|) S_ℓ^m(x̂)`.
    Spherical { lambda: f64, l: usize, m: usize },
    /// `√ε_n J_n(k⊥ρ) trig(nφ) trig(k₃x₃)`.
    Cylindrical { kperp: f64, kz: f64, n: u32, sin_az: bool, sin_ax: bool },
}

impl Carrier {
    fn value(&self, x: &Vec3) -> f64 {
        match self {
            Carrier::Coset { p, rt, blocks, mask, scale } => {
                let y = rt * x;
                let mut v = *scale;
                for (b, blk) in blocks.iter().enumerate() {
                    let a: f64 = blk.iter().map(|&i| p[i] * y[i]).sum();
                    v *= if mask >> b & 1 == 1 { a.sin() } else { a.cos() };
                }
                v
            }
            Carrier::Plane { q, sine, scale } => {
                let a = q.dot(x);
                scale * if *sine { a.sin() } else { a.cos() }
            }
            Carrier::Spherical { lambda, l, m } => {
                (4.0 * PI).sqrt() * spherical_j(*l as u32, lambda * x.norm()) * harmonics(*l, x)[*m]
            }
            Carrier::Cylindrical { kperp, kz, n, sin_az, sin_ax } => {
                let rho = x.x.hypot(x.y);
                let phi = x.y.atan2(x.x);
                let eps = if *n == 0 { 1.0 } else { 2.0f64.sqrt() };
                let az = if *sin_az { (*n as f64 * phi).sin() } else { (*n as f64 * phi).cos() };
                let ax = if *sin_ax { (kz * x.z).sin() } else { (kz * x.z).cos() };
                eps * bessel_j(*n, kperp * rho) * az * ax
            }
        }
    }
}

#[derive(Debug, Clone)]
struct Term {
    atom: usize,
    carrier: usize,
    u: Carrier,
    factor: DMatrix<f64>,
}

/// The carriers of a spec with factored amplitude covariances.
#[derive(Debug, Clone)]
pub struct Expansion {
    group: GroupId,
    terms: Vec<Term>,
    mean: DVector<f64>,
}

fn carriers(k: GroupId, a: &SpectralAtom, l_max: usize) -> Result<Vec<(Carrier, DMatrix<f64>)>, CovarianceError> {
    let f = a.f.matrix();
    let mut out = Vec::new();
    match k {
        GroupId::K2 => {
            let nt = (l_max + 9).div_ceil(2);
            let nphi = l_max + 9;
            let lambda = a.p.norm();
            for (t, wt) in gauss_legendre(nt) {
                let theta = t.clamp(-1.0, 1.0).acos();
                for j in 0..nphi {
                    let phi = 2.0 * PI * (j as f64 + 0.5) / nphi as f64;
                    let g = Ortho3::rot_z(phi) * Ortho3::rot_y(theta);
                    let n = g.apply(&Vec3::z());
                    let u = host_rep(k, &g);
                    let cov = &u * f * u.transpose() * a.weight;
                    let scale = (0.5 * wt / nphi as f64).sqrt();
                    for sine in [false, true] {
                        out.push((Carrier::Plane { q: n * lambda, sine, scale }, cov.clone()));
                    }
                }
            }
        }
        GroupId::K16 => {
            for l in 0..=l_max {
                for m in 0..=2 * l {
                    out.push((Carrier::Spherical { lambda: a.p.norm(), l, m }, f * a.weight));
                }
            }
        }
        GroupId::K4 | GroupId::K14 => {
            let (kperp, kz) = (a.p.x.hypot(a.p.y), a.p.z);
            for n in 0..=l_max as u32 {
                for sin_az in [false, true] {
                    if n == 0 && sin_az {
                        continue;
                    }
                    for sin_ax in [false, true] {
                        out.push((Carrier::Cylindrical { kperp, kz, n, sin_az, sin_ax }, f * a.weight));
                    }
                }
            }
        }
        _ => {
            let fam = coset_family(k)?;
            let scale = 1.0 / (fam.reps.len() as f64).sqrt();
            for (r, u) in fam.reps.iter().zip(&fam.u) {
                let cov = u * f * u.transpose() * a.weight;
                let rt = r.matrix().transpose();
                for mask in 0..(1u32 << fam.blocks.len()) {
                    out.push((Carrier::Coset { p: a.p, rt, blocks: fam.blocks.clone(), mask, scale }, cov.clone()));
                }
            }
        }
    }
    Ok(out)
}

/// Carrier values `u_n(x)` of one atom, in expansion order.
pub fn u_basis_functions(k: GroupId, atom: &SpectralAtom, x: &Vec3, plan: &SimulationPlan) -> Result<Vec<f64>, SimulateError> {
    Ok(carriers(k, atom, plan.l_max)?.iter().map(|(c, _)| c.value(x)).collect())
}

const CHOLESKY_TOL: f64 = 1e-12;

impl Expansion {
    pub fn new(spec: &FieldSpec, plan: &SimulationPlan) -> Result<Self, SimulateError> {
        spec.validate()?;
        let mut terms = Vec::new();
        for (i, a) in spec.atoms.iter().enumerate() {
            for (n, (u, cov)) in carriers(spec.group, a, plan.l_max)?.into_iter().enumerate() {
                let factor = cholesky_psd(&cov, CHOLESKY_TOL)?;
                terms.push(Term { atom: i, carrier: n, u, factor });
            }
        }
        Ok(Expansion { group: spec.group, terms, mean: spec.mean_host() })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// Carrier values at `x`, one per term.
    pub fn carriers_at(&self, x: &Vec3) -> Vec<f64> {
        self.terms.iter().map(|t| t.u.value(x)).collect()
    }

    /// Covariance of the expansion between `x` and `y`, exact for the
    /// truncated field.
    pub fn covariance(&self, x: &Vec3, y: &Vec3) -> DMatrix<f64> {
        let d = self.mean.len();
        let mut out = DMatrix::zeros(d, d);
        for t in &self.terms {
            let c = t.u.value(x) * t.u.value(y);
            if c != 0.0 {
                out += &t.factor * t.factor.transpose() * c;
            }
        }
        out
    }

    /// Amplitudes of realization `r`. Each term has its own stream keyed by
    /// `(seed, r, atom, carrier)`.
    pub fn draw(&self, seed: u64, r: u64) -> Vec<AmplitudeDraw> {
        let d = self.mean.len();
        self.terms
            .iter()
            .map(|t| {
                let mut key = [0u8; 32];
                key[..8].copy_from_slice(&seed.to_le_bytes());
                key[8..16].copy_from_slice(&r.to_le_bytes());
                key[16..24].copy_from_slice(&(t.atom as u64).to_le_bytes());
                key[24..].copy_from_slice(&(t.carrier as u64).to_le_bytes());
                let mut rng = ChaCha8Rng::from_seed(key);
                let z = DVector::from_fn(d, |_, _| StandardNormal.sample(&mut rng));
                AmplitudeDraw { atom: t.atom, carrier: t.carrier, xi: &t.factor * z }
            })
            .collect()
    }

    /// Host coordinates of the field at the points whose carrier rows are
    /// given, for the drawn amplitudes.
    pub fn evaluate(&self, carriers: &[Vec<f64>], draws: &[AmplitudeDraw]) -> Vec<DVector<f64>> {
        carriers
            .iter()
            .map(|row| {
                let mut v = self.mean.clone();
                for (c, a) in row.iter().zip(draws) {
                    if *c != 0.0 {
                        v.axpy(*c, &a.xi, 1.0);
                    }
                }
                v
            })
            .collect()
    }
}

/// Largest variance deficit of the truncated expansion over the points:
/// `1 − Σ_{ℓ≤L} (2ℓ+1) j_ℓ(λρ)²` for the spherical cases and
/// `1 − Σ_{n≤N} ε_n J_n(k⊥ρ)²` for the cylindrical ones. Zero for finite
/// groups.
pub fn tail_bound(spec: &FieldSpec, plan: &SimulationPlan) -> f64 {
    let mut worst = 0.0_f64;
    for a in &spec.atoms {
        for x in &plan.points {
            let t = match spec.group {
                GroupId::K2 | GroupId::K16 => {
                    let s = a.p.norm() * x.norm();
                    1.0 - (0..=plan.l_max).map(|l| (2 * l + 1) as f64 * spherical_j(l as u32, s).powi(2)).sum::<f64>()
                }
                GroupId::K4 | GroupId::K14 => {
                    let s = a.p.x.hypot(a.p.y) * x.x.hypot(x.y);
                    1.0 - (0..=plan.l_max as u32).map(|n| if n == 0 { 1.0 } else { 2.0 } * bessel_j(n, s).powi(2)).sum::<f64>()
                }
                _ => 0.0,
            };
            worst = worst.max(t);
        }
    }
    worst.max(0.0)
}

/// Stable hash of a spec (FNV-1a over its numbers).
pub fn spec_hash(spec: &FieldSpec) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(spec.group.number() as u64);
    spec.mean.iter().for_each(|m| eat(m.to_bits()));
    for a in &spec.atoms {
        a.p.iter().for_each(|x| eat(x.to_bits()));
        eat(a.weight.to_bits());
        a.f.matrix().iter().for_each(|x| eat(x.to_bits()));
    }
    h
}

/// Realization `r` of the field on the plan's grid.
pub fn sample_realization(spec: &FieldSpec, plan: &SimulationPlan, r: u64) -> Result<RealizationField, SimulateError> {
    if plan.points.is_empty() {
        return Err(SimulateError::EmptyGrid);
    }
    let tail = tail_bound(spec, plan);
    if let Some(tol) = plan.tolerance {
        if tail > tol {
            return Err(SimulateError::Truncation { tail, tol });
        }
    }
    let exp = Expansion::new(spec, plan)?;
    let draws = exp.draw(plan.seed, r);
    let basis = host_basis(spec.group);
    let coordinates: Vec<DVector<f64>> = plan
        .points
        .par_iter()
        .map(|x| exp.evaluate(&[exp.carriers_at(x)], &draws).remove(0))
        .collect();
    let values = coordinates.iter().map(|c| basis.embed(c.as_slice()).to_elas()).collect();
    let metadata = RealizationMetadata { spec_hash: spec_hash(spec), seed: plan.seed, l_max: plan.l_max, realization: r, tail };
    Ok(RealizationField { values, coordinates, metadata })
}

/// Realization 0 of the field on the plan's grid.
pub fn sample_field(spec: &FieldSpec, plan: &SimulationPlan) -> Result<RealizationField, SimulateError> {
    sample_realization(spec, plan, 0)
}

#[cfg(test)]
mod tests;
