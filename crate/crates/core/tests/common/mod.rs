#![allow(dead_code)]

use elastrf_core::covariance::commutant_average;
use elastrf_core::groups::orbit_strata;
use elastrf_core::{FMatrix, FieldSpec, GroupId, SpectralAtom, Vec3};
use nalgebra::DMatrix;
use rand::Rng;

pub fn rvec(rng: &mut impl Rng, s: f64) -> Vec3 {
    Vec3::new(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s..s))
}

/// Random wavevector, sometimes on a lower-dimensional stratum.
pub fn wavevector(k: GroupId, rng: &mut impl Rng) -> Vec3 {
    let strata = orbit_strata(k);
    if rng.gen_bool(0.3) && strata.len() > 1 {
        let s = &strata[rng.gen_range(1..strata.len())];
        s.representative * rng.gen_range(0.5..2.0)
    } else {
        rvec(rng, 2.0)
    }
}

pub fn density(k: GroupId, p: &Vec3, rng: &mut impl Rng) -> FMatrix {
    let d = k.host_dim();
    let a = DMatrix::from_fn(d, d, |_, _| rng.gen_range(-1.0..1.0));
    FMatrix::new(commutant_average(k, p, &(&a * a.transpose()))).unwrap().normalized()
}

pub fn atom(k: GroupId, rng: &mut impl Rng) -> SpectralAtom {
    let p = match k {
        GroupId::K2 | GroupId::K16 => Vec3::new(0.0, 0.0, rng.gen_range(0.3..3.0)),
        _ => wavevector(k, rng),
    };
    let f = density(k, &p, rng);
    SpectralAtom::new(p, rng.gen_range(0.2..2.0), f)
}

/// A valid spec with 1 to `max_atoms` atoms and a random mean.
pub fn spec(k: GroupId, max_atoms: usize, rng: &mut impl Rng) -> FieldSpec {
    let n = rng.gen_range(1..=max_atoms);
    FieldSpec {
        group: k,
        mean: (0..k.trivial_multiplicity()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        atoms: (0..n).map(|_| atom(k, rng)).collect(),
    }
}
