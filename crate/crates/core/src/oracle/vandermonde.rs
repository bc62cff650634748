use crate::error::{Error, Result};
use crate::numerics::{det, DenseMatrix, Scalar};

/// `det(x_j^i)_{i ∈ {0..n−2, n}} − (Σx_j)·∏_{j<k}(x_k − x_j)` for the `n`
/// given points.
pub fn vandermonde_sum_identity(points: &[Scalar]) -> Result<Scalar> {
    let n = points.len();
    if n == 0 {
        return Err(Error::Shape("no points".into()));
    }
    let rows: Vec<i64> = (0..n as i64 - 1).chain([n as i64]).collect();
    let m = DenseMatrix::from_fn(n, n, |i, j| points[j].powi(rows[i]));
    let mut delta = points[0].int_like(1);
    let mut sum = points[0].int_like(0);
    for k in 0..n {
        sum = sum + &points[k];
        for j in 0..k {
            delta = delta * (points[k].clone() - &points[j]);
        }
    }
    Ok(det(&m)? - sum * delta)
}
