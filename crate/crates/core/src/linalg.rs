//! Small dense symmetric eigen and factorization helpers.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::model::QMatrix;

/// Eigenvalues of a symmetric matrix in ascending order. Only the lower
/// triangle is read.
pub fn symmetric_eigenvalues(a: &QMatrix) -> Vec<f64> {
    let n = a.n();
    let m = DMatrix::from_row_slice(n, n, a.as_slice());
    let mut eig: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    eig
}

pub fn smallest_eigenvalue(a: &QMatrix) -> f64 {
    symmetric_eigenvalues(a).first().copied().unwrap_or(0.0)
}

/// Positive semidefiniteness of the quadratic form `xᵀAx`, tested on the
/// symmetric part of `A` with a diagonally pivoted LDLᵀ factorization.
///
/// A pivot below `-tol·scale` rejects; once the largest remaining pivot is
/// below `tol·scale`, the remaining Schur complement must vanish to within
/// the same tolerance.
pub fn is_psd(a: &QMatrix, tol: f64) -> bool {
    let n = a.n();
    let mut s: Vec<f64> = (0..n * n)
        .map(|k| {
            let (i, j) = (k / n, k % n);
            0.5 * (a.get(i, j) + a.get(j, i))
        })
        .collect();
    let scale = s.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let eps = tol * scale;
    let mut active: Vec<usize> = (0..n).collect();
    while !active.is_empty() {
        let (pos, &p) = active
            .iter()
            .enumerate()
            .max_by(|(_, &i), (_, &j)| s[i * n + i].partial_cmp(&s[j * n + j]).unwrap())
            .unwrap();
        let pivot = s[p * n + p];
        if pivot < -eps {
            return false;
        }
        if pivot <= eps {
            return active
                .iter()
                .all(|&i| active.iter().all(|&j| s[i * n + j].abs() <= eps));
        }
        active.swap_remove(pos);
        for &i in &active {
            let f = s[i * n + p] / pivot;
            if f == 0.0 {
                continue;
            }
            for &j in &active {
                s[i * n + j] -= f * s[p * n + j];
            }
        }
    }
    true
}
