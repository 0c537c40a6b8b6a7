//! Small dense linear-algebra helpers shared by the numeric modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Orthonormal basis of the span of `vecs` by modified Gram–Schmidt with one
/// reorthogonalisation pass. Vectors whose residual norm falls below `tol`
/// are dropped.
pub fn orthonormalize(vecs: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vecs {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = b.dot(&w);
                w.axpy(-c, b, 1.0);
            }
        }
        let n = w.norm();
        if n > tol {
            out.push(w / n);
        }
    }
    out
}

/// Columns spanning the null space of `a`: right singular vectors whose
/// singular value is below `tol·max(1, σ_max)`.
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let m = a.nrows().max(n);
    let mut padded = DMatrix::zeros(m, n);
    padded.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
    let svd = padded.svd(false, true);
    let vt = svd.v_t.expect("requested v_t");
    let sv = &svd.singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max).max(1.0);
    let mut idx: Vec<usize> = (0..n).filter(|&i| sv[i] < tol * smax).collect();
    idx.sort_by(|&i, &j| sv[i].partial_cmp(&sv[j]).unwrap());
    let mut out = DMatrix::zeros(n, idx.len());
    for (c, &i) in idx.iter().enumerate() {
        out.set_column(c, &vt.row(i).transpose());
    }
    out
}

/// Smallest eigenvalue of the symmetric part of `m`.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    let s = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(s)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |a, &b| a.max(b.abs()))
}

/// Rank by singular values above `tol·σ_max`.
pub fn rank(m: &DMatrix<f64>, tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0_f64, f64::max);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol * smax).count()
}

/// Least-squares solve `a x ≈ b` via SVD. Returns the solution and the
/// residual norm.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, f64) {
    let svd = a.clone().svd(true, true);
    let x = svd.solve(b, 1e-13).expect("svd with u and v");
    let r = (a * &x - b).norm();
    (x, r)
}

/// Stack columns into a matrix.
pub fn hstack(cols: &[DVector<f64>], nrows: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(nrows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let v = vec![
            DVector::from_vec(vec![1.0, 1.0, 0.0]),
            DVector::from_vec(vec![2.0, 2.0, 0.0]),
            DVector::from_vec(vec![0.0, 1.0, 1.0]),
        ];
        let b = orthonormalize(&v, 1e-10);
        assert_eq!(b.len(), 2);
        assert!(b[0].dot(&b[1]).abs() < 1e-14);
    }

    #[test]
    fn null_space_of_rank_one() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 2.0, 3.0]);
        let n = null_space(&a, 1e-10);
        assert_eq!(n.ncols(), 2);
        assert!((&a * &n).norm() < 1e-12);
    }
}
