//! Passage from the complex spherical (Wigner) basis of `R³` to the real
//! Gordienko basis.

use super::GroupError;
use crate::tensor::{Mat3, Ortho3};
use nalgebra::{Complex, Matrix3};

type C = Complex<f64>;

/// The fixed unitary `U` relating the two bases.
pub fn gordienko_unitary() -> Matrix3<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C::new(0.0, 0.0);
    Matrix3::new(
        C::new(-s, 0.0),
        z,
        C::new(0.0, s),
        z,
        C::new(0.0, -1.0),
        z,
        C::new(-s, 0.0),
        z,
        C::new(0.0, -s),
    )
}

/// Matrix of `g` in the spherical basis `e₊ = −(x + iy)/√2`, `e₀ = z`,
/// `e₋ = (x − iy)/√2`, entries `⟨e_m, g e_n⟩`.
pub fn wigner_matrix(g: &Ortho3) -> Matrix3<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C::new(0.0, 0.0);
    let b = Matrix3::new(
        C::new(-s, 0.0),
        C::new(0.0, -s),
        z,
        z,
        z,
        C::new(1.0, 0.0),
        C::new(s, 0.0),
        C::new(0.0, -s),
        z,
    );
    let gc: Matrix3<C> = g.matrix().map(|v| C::new(v, 0.0));
    b.conjugate() * gc * b.transpose()
}

/// Real matrix of `g` in the Gordienko basis, `U† D(g) U`.
///
/// The conjugation is taken in this order because the other order leaves
/// an imaginary part for every spherical basis phase convention.
pub fn wigner_to_gordienko(g: &Ortho3) -> Result<Mat3, GroupError> {
    let u = gordienko_unitary();
    let r = u.adjoint() * wigner_matrix(g) * u;
    let residue = r.iter().fold(0.0_f64, |a, c| a.max(c.im.abs()));
    if residue > 1e-12 {
        return Err(GroupError::BasisMismatch(residue));
    }
    Ok(r.map(|c| c.re))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unitary_and_identity() {
        let u = gordienko_unitary();
        let e = u.adjoint() * u - Matrix3::<C>::identity();
        assert!(e.iter().all(|c| c.norm() < 1e-15));
        let r = wigner_to_gordienko(&Ortho3::identity()).unwrap();
        assert!((r - Mat3::identity()).abs().max() < 1e-15);
    }

    #[test]
    fn z_rotation_block() {
        let phi = 0.7_f64;
        let r = wigner_to_gordienko(&Ortho3::rot_z(phi)).unwrap();
        // oracle: conjugate the diagonal phases e^{∓iφ} by U directly
        let u = gordienko_unitary();
        let d = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            C::from_polar(1.0, -phi),
            C::new(1.0, 0.0),
            C::from_polar(1.0, phi),
        ));
        let o = (u.adjoint() * d * u).map(|c| c.re);
        assert!((r - o).abs().max() < 1e-14);
        assert!((r[(1, 1)] - 1.0).abs() < 1e-14);
        assert!((r[(0, 0)] - phi.cos()).abs() < 1e-14);
        assert!((r[(0, 2)].abs() - phi.sin()).abs() < 1e-14);
    }

    #[test]
    fn real_for_all_of_o3() {
        let g = Ortho3::rot_axis(&crate::tensor::Vec3::new(1.0, -2.0, 0.5), 2.3).neg();
        let h = Ortho3::rot_axis(&crate::tensor::Vec3::new(0.2, 1.0, 3.0), -0.4);
        let a = wigner_to_gordienko(&g).unwrap();
        let b = wigner_to_gordienko(&h).unwrap();
        let ab = wigner_to_gordienko(&(g * h)).unwrap();
        assert!((a * b - ab).abs().max() < 1e-13);
        assert!((a.transpose() * a - Mat3::identity()).abs().max() < 1e-13);
    }
}
