//! Thin wrapper around faer's self-adjoint eigendecomposition.

use crate::matrix::SquareMatrix;

/// Eigenvalues in ascending order; `vectors` column k pairs with `values[k]`.
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: faer::Mat<f64>,
}

pub fn symmetric_eigen(m: &SquareMatrix) -> SymmetricEigen {
    let n = m.size();
    let fm = faer::Mat::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigendecomposition failed to converge");
    let values = (0..n).map(|i| evd.S()[i]).collect();
    SymmetricEigen {
        values,
        vectors: evd.U().to_owned(),
    }
}

/// (smallest, largest) eigenvalue of a symmetric matrix.
pub fn eigenvalue_extremes(m: &SquareMatrix) -> (f64, f64) {
    let eig = symmetric_eigen(m);
    (
        *eig.values.first().unwrap_or(&0.0),
        *eig.values.last().unwrap_or(&0.0),
    )
}
