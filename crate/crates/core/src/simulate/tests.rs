use super::*;
use crate::covariance::{commutant_average, kernel, FMatrix};
use crate::groups::enumerate_elements;
use rand::Rng;

fn rvec(rng: &mut impl Rng, s: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

fn atom(k: GroupId, p: Vec3, w: f64, rng: &mut impl Rng) -> SpectralAtom {
    let d = k.host_dim();
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    let f = FMatrix::new(commutant_average(k, &p, &(&a * a.transpose()))).unwrap().normalized();
    SpectralAtom::new(p, w, f)
}

fn spec(k: GroupId, atoms: Vec<SpectralAtom>) -> FieldSpec {
    FieldSpec { group: k, mean: (0..k.trivial_multiplicity()).map(|i| 0.5 + i as f64).collect(), atoms }
}

#[test]
fn cholesky_examples() {
    let i = DMatrix::<f64>::identity(4, 4);
    assert_eq!(cholesky_psd(&i, 1e-12).unwrap(), i);
    let r1 = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
    assert_eq!(cholesky_psd(&r1, 1e-12).unwrap(), DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 0.0]));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = DMatrix::from_fn(21, 21, |_, _| rng.gen_range(-1.0..1.0));
    let m = a.transpose() * &a;
    let l = cholesky_psd(&m, 1e-12).unwrap();
    assert!((&l * l.transpose() - &m).abs().max() < 1e-10);
    // rank 5 out of 21
    let b = DMatrix::from_fn(21, 5, |_, _| rng.gen_range(-1.0..1.0));
    let m = &b * b.transpose();
    let l = cholesky_psd(&m, 1e-12).unwrap();
    assert!((&l * l.transpose() - &m).abs().max() < 1e-10);
    assert!(l.columns(5, 16).iter().all(|&x| x == 0.0));
    let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
    assert!(matches!(cholesky_psd(&bad, 1e-12), Err(SimulateError::Indefinite(_))));
}

#[test]
fn zero_atoms_give_the_mean() {
    let s = spec(GroupId::K6, vec![]);
    let plan = SimulationPlan::new(vec![Vec3::x(), Vec3::new(0.2, 3.0, -1.0)], 5);
    let r = sample_field(&s, &plan).unwrap();
    let m = crate::covariance::mean_tensor(&s);
    for v in &r.values {
        assert!(v.components().iter().zip(m.components()).all(|(a, b)| (a - b).abs() < 1e-14));
    }
}

#[test]
fn carrier_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let plan = SimulationPlan::new(vec![Vec3::zeros()], 0);
    for (k, n) in [
        (GroupId::K1, 2),
        (GroupId::K3, 4),
        (GroupId::K5, 8),
        (GroupId::K6, 16),
        (GroupId::K7, 24),
        (GroupId::K8, 24),
        (GroupId::K9, 48),
        (GroupId::K10, 12),
        (GroupId::K11, 24),
        (GroupId::K12, 16),
        (GroupId::K13, 32),
        (GroupId::K15, 48),
    ] {
        let a = atom(k, Vec3::new(0.3, 0.7, 1.1), 1.0, &mut rng);
        assert_eq!(u_basis_functions(k, &a, &Vec3::x(), &plan).unwrap().len(), n, "{k}");
    }
}

#[test]
fn orthotropic_carriers_at_origin() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a = atom(GroupId::K5, Vec3::new(0.3, 0.7, 1.1), 1.0, &mut rng);
    let u = u_basis_functions(GroupId::K5, &a, &Vec3::zeros(), &SimulationPlan::new(vec![], 0)).unwrap();
    assert_eq!(u.iter().filter(|&&x| x != 0.0).count(), 1);
    assert_eq!(u[0], 1.0);
}

#[test]
fn carrier_identity_for_finite_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let plan = SimulationPlan::new(vec![], 0);
    for &k in GroupId::ALL.iter().filter(|k| k.is_finite()) {
        let e = enumerate_elements(k).unwrap();
        for _ in 0..20 {
            let a = atom(k, rvec(&mut rng, 3.0), 1.0, &mut rng);
            let (x, y) = (rvec(&mut rng, 3.0), rvec(&mut rng, 3.0));
            let ux = u_basis_functions(k, &a, &x, &plan).unwrap();
            let uy = u_basis_functions(k, &a, &y, &plan).unwrap();
            let s: f64 = ux.iter().zip(&uy).map(|(a, b)| a * b).sum();
            let avg = e.iter().map(|g| g.apply(&a.p).dot(&(y - x)).cos()).sum::<f64>() / e.len() as f64;
            assert!((s - avg).abs() < 1e-12, "{k}");
        }
    }
}

#[test]
fn expansion_covariance_equals_kernel_for_finite_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for &k in GroupId::ALL.iter().filter(|k| k.is_finite()) {
        let s = spec(k, vec![atom(k, rvec(&mut rng, 2.0), 0.3, &mut rng), atom(k, rvec(&mut rng, 2.0), 0.7, &mut rng)]);
        let exp = Expansion::new(&s, &SimulationPlan::new(vec![], 0)).unwrap();
        let (x, y) = (rvec(&mut rng, 2.0), rvec(&mut rng, 2.0));
        let got = exp.covariance(&x, &y);
        let want = kernel(&s, &x, &y).unwrap();
        assert!((got - want).abs().max() < 1e-12, "{k}");
    }
}

#[test]
fn truncated_covariance_converges_for_continuous_groups() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let x = Vec3::new(0.3, -0.2, 0.5);
    let y = Vec3::new(-0.4, 0.6, 0.1);
    for k in [GroupId::K16, GroupId::K2, GroupId::K4, GroupId::K14] {
        let a = match k {
            GroupId::K2 | GroupId::K16 => {
                let b = atom(k, Vec3::new(0.0, 0.0, 2.5), 1.0, &mut rng);
                SpectralAtom::radial(2.5, 1.0, b.f)
            }
            _ => atom(k, Vec3::new(2.0, 0.0, 1.0), 1.0, &mut rng),
        };
        let s = spec(k, vec![a]);
        let want = kernel(&s, &x, &y).unwrap();
        let mut prev_var = f64::INFINITY;
        let mut err = f64::INFINITY;
        for l in [2, 4, 8, 16] {
            let mut plan = SimulationPlan::new(vec![x], 0);
            plan.l_max = l;
            let exp = Expansion::new(&s, &plan).unwrap();
            err = (exp.covariance(&x, &y) - &want).abs().max();
            let var = (exp.covariance(&x, &x) - kernel(&s, &x, &x).unwrap()).abs().max();
            assert!(var <= prev_var + 1e-14, "{k} l={l}");
            prev_var = var;
        }
        assert!(err < 1e-10, "{k}: {err}");
    }
}

#[test]
fn realizations_live_in_the_host_space_and_are_reproducible() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pts: Vec<Vec3> = (0..6).map(|_| rvec(&mut rng, 2.0)).collect();
    for k in [GroupId::K7, GroupId::K10, GroupId::K16] {
        let p = if k == GroupId::K16 { Vec3::new(0.0, 0.0, 1.2) } else { Vec3::new(0.4, 1.0, 0.3) };
        let s = spec(k, vec![atom(k, p, 1.0, &mut rng)]);
        let plan = SimulationPlan::new(pts.clone(), 99);
        let a = sample_field(&s, &plan).unwrap();
        let b = sample_field(&s, &plan).unwrap();
        assert_eq!(a, b);
        let basis = host_basis(k);
        for v in &a.values {
            let t = v.to_tensor21();
            let back = basis.embed(basis.coordinates(&t).as_slice());
            assert!((back.0 - t.0).norm() < 1e-10);
        }
        // adding points leaves the values at the old points unchanged
        let mut more = pts.clone();
        more.insert(2, Vec3::new(5.0, 5.0, 5.0));
        let c = sample_field(&s, &SimulationPlan::new(more, 99)).unwrap();
        assert_eq!(c.values[0], a.values[0]);
        assert_eq!(c.values[3], a.values[2]);
    }
}

#[test]
fn tail_tolerance_is_enforced() {
    let f = FMatrix::uniform(2);
    let s = spec(GroupId::K16, vec![SpectralAtom::radial(3.0, 1.0, f)]);
    let mut plan = SimulationPlan::new(vec![Vec3::new(4.0, 0.0, 0.0)], 1);
    plan.l_max = 2;
    plan.tolerance = Some(1e-3);
    assert!(matches!(sample_field(&s, &plan), Err(SimulateError::Truncation { .. })));
    plan.l_max = 40;
    assert!(sample_field(&s, &plan).is_ok());
    assert!(tail_bound(&s, &plan) < 1e-3);
}

#[test]
fn empty_grid_is_an_error() {
    let s = spec(GroupId::K1, vec![]);
    assert!(matches!(sample_field(&s, &SimulationPlan::new(vec![], 0)), Err(SimulateError::EmptyGrid)));
}
