//! Frozen copy of the computed tables (fixed-point dimensions, decompositions
//! and the `M → L` coefficients), kept in `data/tables.txt` so that changes in
//! the numerics show up as a diff. Set `ELASTRF_BLESS=1` to rewrite it.

use super::{fixed_point_basis, isotypic_decomposition, m_family_labels, m_to_l_expansion, RepError};
use crate::groups::GroupId;

/// Location of the committed snapshot, relative to the crate root.
pub const SNAPSHOT_PATH: &str = "data/tables.txt";

/// Text form of all computed tables.
pub fn snapshot_text() -> Result<String, RepError> {
    let mut s = String::new();
    for &k in &GroupId::ALL {
        s += &format!("fixed {k} {}\n", fixed_point_basis(&k.spec()).len());
    }
    for &k in &GroupId::ALL {
        let (u, _) = isotypic_decomposition(k)?;
        s += &format!("structure {k} {u}\n");
    }
    let e = m_to_l_expansion()?;
    for (n, (l, v)) in m_family_labels().into_iter().enumerate() {
        for q in 0..e.coefficients.ncols() {
            let c = e.coefficients[(n, q)];
            if c != 0.0 {
                s += &format!("mtol {l} {v} {} {c:.17e}\n", q + 1);
            }
        }
    }
    Ok(s)
}

/// Compares two snapshots token by token; numbers within `tol`.
pub fn compare(expected: &str, actual: &str, tol: f64) -> Result<(), String> {
    let a: Vec<&str> = expected.lines().collect();
    let b: Vec<&str> = actual.lines().collect();
    if a.len() != b.len() {
        return Err(format!("line count {} vs {}", a.len(), b.len()));
    }
    for (n, (x, y)) in a.iter().zip(&b).enumerate() {
        let tx: Vec<&str> = x.split_whitespace().collect();
        let ty: Vec<&str> = y.split_whitespace().collect();
        let same = tx.len() == ty.len()
            && tx.iter().zip(&ty).all(|(p, q)| match (p.parse::<f64>(), q.parse::<f64>()) {
                (Ok(u), Ok(v)) => (u - v).abs() <= tol,
                _ => p == q,
            });
        if !same {
            return Err(format!("line {}: `{x}` vs `{y}`", n + 1));
        }
    }
    Ok(())
}
