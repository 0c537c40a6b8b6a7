//! Two-point correlation tensors.
//!
//! For a finite `K` each atom contributes
//! `w (1/|K|) Σ_g cos(gp·z) U(g) f U(g)ᵀ`. The sum is organised by the left
//! cosets `rM` of the subgroup `M` of diagonal sign matrices acting
//! trivially on the host: on a coset `U` is constant and the cosine average
//! factorises over the coordinate blocks on which `M` acts by one sign.

use super::isotropic::o3_kernel;
use super::{CovarianceError, FieldSpec, KernelValue};
use crate::groups::{enumerate_elements, GroupId};
use crate::rep::host_rep;
use crate::special::bessel_j;
use crate::tensor::{Ortho3, Vec3};
use nalgebra::DMatrix;
use std::sync::OnceLock;

/// Coset decomposition used by the finite-group kernels and carriers.
#[derive(Debug, Clone)]
pub struct CosetFamily {
    /// Coset representatives `r`.
    pub reps: Vec<Ortho3>,
    /// `U(r)` on the host.
    pub u: Vec<DMatrix<f64>>,
    /// Coordinate blocks: `M` consists of all sign matrices constant on each.
    pub blocks: Vec<Vec<usize>>,
}

impl CosetFamily {
    /// `Π_B cos(p_B · w_B)`.
    pub fn block_cos(&self, p: &Vec3, w: &Vec3) -> f64 {
        self.blocks.iter().map(|b| b.iter().map(|&i| p[i] * w[i]).sum::<f64>().cos()).product()
    }
}

fn is_diagonal(g: &Ortho3) -> bool {
    let m = g.matrix();
    (0..3).all(|i| (0..3).all(|j| i == j || m[(i, j)].abs() < 1e-12))
}

fn build_family(k: GroupId) -> CosetFamily {
    let elems = enumerate_elements(k).expect("finite group");
    let d = k.host_dim();
    let id = DMatrix::<f64>::identity(d, d);
    let m: Vec<Ortho3> = elems
        .iter()
        .filter(|g| is_diagonal(g) && (host_rep(k, g) - &id).abs().max() < 1e-10)
        .copied()
        .collect();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for i in 0..3 {
        match blocks.iter_mut().find(|b| m.iter().all(|g| g.matrix()[(b[0], b[0])] == g.matrix()[(i, i)])) {
            Some(b) => b.push(i),
            None => blocks.push(vec![i]),
        }
    }
    assert_eq!(m.len(), 1 << blocks.len(), "{k}: M is not a full sign group on its blocks");
    let mut reps: Vec<Ortho3> = Vec::new();
    for g in elems {
        let ginv = g.inverse();
        let seen = reps.iter().any(|r| {
            let h = ginv * *r;
            m.iter().any(|x| x.distance(&h) < 1e-9)
        });
        if !seen {
            reps.push(*g);
        }
    }
    assert_eq!(reps.len() * m.len(), elems.len());
    let u = reps.iter().map(|r| host_rep(k, r)).collect();
    CosetFamily { reps, u, blocks }
}

pub(crate) fn coset_family(k: GroupId) -> Result<&'static CosetFamily, CovarianceError> {
    static C: OnceLock<Vec<Option<CosetFamily>>> = OnceLock::new();
    let all = C.get_or_init(|| GroupId::ALL.iter().map(|&g| g.is_finite().then(|| build_family(g))).collect());
    all[k as usize].as_ref().ok_or(CovarianceError::Infinite(k))
}

/// `j_r(p, z)`, the average of `cos(gp·z)` over each coset `rM`. Their mean
/// is the group average `(1/|K|) Σ_g cos(gp·z)`.
pub fn j_functions(k: GroupId, p: &Vec3, z: &Vec3) -> Result<Vec<f64>, CovarianceError> {
    let fam = coset_family(k)?;
    Ok(fam.reps.iter().map(|r| fam.block_cos(p, &r.inverse().apply(z))).collect())
}

fn finite_kernel(spec: &FieldSpec, z: &Vec3) -> Result<KernelValue, CovarianceError> {
    let fam = coset_family(spec.group)?;
    let d = spec.host_dim();
    let n = fam.reps.len() as f64;
    let mut out = DMatrix::zeros(d, d);
    for a in &spec.atoms {
        let j = j_functions(spec.group, &a.p, z)?;
        for (u, jr) in fam.u.iter().zip(j) {
            out += u * a.f.matrix() * u.transpose() * (a.weight * jr / n);
        }
    }
    Ok(out)
}

fn o2_kernel(spec: &FieldSpec, z: &Vec3) -> KernelValue {
    let d = spec.host_dim();
    let mut out = DMatrix::zeros(d, d);
    let rho = z.x.hypot(z.y);
    for a in &spec.atoms {
        let s = bessel_j(0, a.p.x.hypot(a.p.y) * rho) * (a.p.z * z.z).cos();
        out += a.f.matrix() * (a.weight * s);
    }
    out
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 + x.powi(4) / 120.0
    } else {
        x.sin() / x
    }
}

fn isotropic_kernel(spec: &FieldSpec, z: &Vec3) -> KernelValue {
    let d = spec.host_dim();
    let r = z.norm();
    spec.atoms.iter().fold(DMatrix::zeros(d, d), |acc, a| acc + a.f.matrix() * (a.weight * sinc(a.p.norm() * r)))
}

/// `⟨C(x), C(y)⟩` for the `K4`/`K14` cases: `J₀(p⊥ρ) cos(p₃z₃) f` summed
/// over atoms, with `ρ` the distance of `y − x` from the axis.
pub fn kernel_o2_bessel(spec: &FieldSpec, x: &Vec3, y: &Vec3) -> Result<KernelValue, CovarianceError> {
    if !matches!(spec.group, GroupId::K4 | GroupId::K14) {
        return Err(CovarianceError::WrongGroup { op: "kernel_o2_bessel", expected: "K4 or K14", found: spec.group });
    }
    spec.validate()?;
    Ok(o2_kernel(spec, &(y - x)))
}

/// Two-point correlation tensor of a validated spec.
pub fn kernel(spec: &FieldSpec, x: &Vec3, y: &Vec3) -> Result<KernelValue, CovarianceError> {
    spec.validate()?;
    kernel_unchecked(spec, x, y)
}

/// [`kernel`] without validating the densities; shapes are still checked.
pub fn kernel_unchecked(spec: &FieldSpec, x: &Vec3, y: &Vec3) -> Result<KernelValue, CovarianceError> {
    spec.check_shape()?;
    let z = y - x;
    match spec.group {
        GroupId::K2 => o3_kernel(spec, &z),
        GroupId::K4 | GroupId::K14 => Ok(o2_kernel(spec, &z)),
        GroupId::K16 => Ok(isotropic_kernel(spec, &z)),
        _ => finite_kernel(spec, &z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covariance::{commutant_average, FMatrix, SpectralAtom};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rvec(rng: &mut impl Rng, s: f64) -> Vec3 {
        Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
    }

    fn valid_atom(k: GroupId, p: Vec3, w: f64, rng: &mut impl Rng) -> SpectralAtom {
        let d = k.host_dim();
        let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
        let f = FMatrix::new(commutant_average(k, &p, &(&a * a.transpose()))).unwrap().normalized();
        SpectralAtom::new(p, w, f)
    }

    #[test]
    fn j_at_zero_and_orthotropic_product() {
        let p = Vec3::new(0.3, -1.2, 2.0);
        assert_eq!(j_functions(GroupId::K1, &p, &Vec3::zeros()).unwrap(), vec![1.0]);
        let z = Vec3::new(0.7, 0.2, -1.1);
        let j = j_functions(GroupId::K5, &p, &z).unwrap();
        assert_eq!(j.len(), 1);
        let want = (p.x * z.x).cos() * (p.y * z.y).cos() * (p.z * z.z).cos();
        assert!((j[0] - want).abs() < 1e-15);
        assert!(matches!(j_functions(GroupId::K2, &p, &z), Err(CovarianceError::Infinite(_))));
    }

    #[test]
    fn j_mean_is_the_group_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &k in GroupId::ALL.iter().filter(|k| k.is_finite()) {
            let e = enumerate_elements(k).unwrap();
            for _ in 0..5 {
                let (p, z) = (rvec(&mut rng, 3.0), rvec(&mut rng, 3.0));
                let j = j_functions(k, &p, &z).unwrap();
                let mean = j.iter().sum::<f64>() / j.len() as f64;
                let direct = e.iter().map(|g| g.apply(&p).dot(&z).cos()).sum::<f64>() / e.len() as f64;
                assert!((mean - direct).abs() < 1e-13, "{k}");
            }
        }
        assert_eq!(j_functions(GroupId::K7, &Vec3::x(), &Vec3::y()).unwrap().len(), 6);
    }

    #[test]
    fn finite_kernel_matches_full_group_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for &k in GroupId::ALL.iter().filter(|k| k.is_finite()) {
            let e = enumerate_elements(k).unwrap();
            let atom = valid_atom(k, rvec(&mut rng, 2.0), 0.8, &mut rng);
            let spec = FieldSpec { group: k, mean: vec![0.0; k.trivial_multiplicity()], atoms: vec![atom.clone()] };
            let (x, y) = (rvec(&mut rng, 2.0), rvec(&mut rng, 2.0));
            let got = kernel(&spec, &x, &y).unwrap();
            let mut want = DMatrix::zeros(k.host_dim(), k.host_dim());
            for g in e {
                let u = host_rep(k, g);
                want += &u * atom.f.matrix() * u.transpose() * (g.apply(&atom.p).dot(&(y - x)).cos() * 0.8 / e.len() as f64);
            }
            assert!((got - want).abs().max() < 1e-13, "{k}");
        }
    }

    #[test]
    fn tetragonal_kernel_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let p = Vec3::new(0.9, 0.4, 1.3);
        let atom = valid_atom(GroupId::K12, p, 1.0, &mut rng);
        let f = atom.f.matrix().clone();
        let spec = FieldSpec { group: GroupId::K12, mean: vec![0.0; 6], atoms: vec![atom] };
        let z = Vec3::new(0.3, -0.8, 0.5);
        let s = 0.5 * ((p.x * z.x).cos() * (p.y * z.y).cos() + (p.x * z.y).cos() * (p.y * z.x).cos()) * (p.z * z.z).cos();
        assert!((kernel(&spec, &Vec3::zeros(), &z).unwrap() - f * s).abs().max() < 1e-14);
    }

    #[test]
    fn isotropic_and_axial_closed_forms() {
        let f = FMatrix::from_row_slice(2, &[0.7, 0.2, 0.2, 0.3]).unwrap();
        let spec = FieldSpec { group: GroupId::K16, mean: vec![0.0; 2], atoms: vec![SpectralAtom::radial(2.0, 1.0, f.clone())] };
        let y = Vec3::new(0.0, 0.3, 0.4);
        let k = kernel(&spec, &Vec3::zeros(), &y).unwrap();
        assert!((k - f.matrix() * (1.0f64).sin()).abs().max() < 1e-15);

        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let p = Vec3::new(1.5, 0.0, 0.7);
        let atom = valid_atom(GroupId::K4, p, 1.0, &mut rng);
        let f = atom.f.matrix().clone();
        let spec = FieldSpec { group: GroupId::K4, mean: vec![0.0; 5], atoms: vec![atom] };
        let k = kernel_o2_bessel(&spec, &Vec3::zeros(), &Vec3::new(0.0, 0.0, 2.0)).unwrap();
        assert!((k - &f * (1.4f64).cos()).abs().max() < 1e-15);
        let k = kernel_o2_bessel(&spec, &Vec3::zeros(), &Vec3::new(0.6, 0.8, 0.0)).unwrap();
        assert!((k - &f * bessel_j(0, 1.5)).abs().max() < 1e-15);
        assert!(kernel_o2_bessel(&FieldSpec::new(GroupId::K5), &Vec3::zeros(), &Vec3::x()).is_err());
    }

    #[test]
    fn unit_mass_gives_unit_trace_at_zero_separation() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for &k in &GroupId::ALL {
            let atoms = vec![valid_atom(k, Vec3::new(0.2, 0.5, 1.1), 0.25, &mut rng), valid_atom(k, Vec3::new(-1.0, 0.3, 0.4), 0.75, &mut rng)];
            let atoms = match k {
                GroupId::K2 | GroupId::K16 => atoms.into_iter().map(|a| SpectralAtom::radial(a.p.norm(), a.weight, valid_atom(k, Vec3::z() * a.p.norm(), 1.0, &mut rng).f)).collect(),
                _ => atoms,
            };
            let spec = FieldSpec { group: k, mean: vec![0.0; k.trivial_multiplicity()], atoms };
            let x = rvec(&mut rng, 1.0);
            assert!((kernel(&spec, &x, &x).unwrap().trace() - 1.0).abs() < 1e-12, "{k}");
        }
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let f = FMatrix::from_row_slice(2, &[1.0, 0.6, 0.6, 0.0]).unwrap();
        let spec = FieldSpec { group: GroupId::K16, mean: vec![0.0; 2], atoms: vec![SpectralAtom::radial(1.0, 1.0, f)] };
        match kernel(&spec, &Vec3::zeros(), &Vec3::x()) {
            Err(CovarianceError::InvalidDensity { violations, .. }) => assert!(violations.iter().any(|v| v.starts_with("disk"))),
            other => panic!("{other:?}"),
        }
    }
}
