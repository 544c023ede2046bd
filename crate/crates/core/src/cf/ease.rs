//! EASE: closed-form item-item ridge regression with a zero-diagonal
//! constraint.
//!
//! With Gram matrix `G = XᵀX` and `P = (G + λI)⁻¹`, the weights are
//! `B[i][j] = -P[i][j] / P[j][j]` off the diagonal and `B[j][j] = 0`.
//! A user with binary row `x` is scored by `x · B`.

use super::{CfError, DenseMatrix, ItemWeightMatrix};
use crate::data::InteractionMatrix;
use nalgebra::DMatrix;

/// Regularization used when building the personalized EASE sample pool.
pub const EASE_POOL_LAMBDA: f64 = 5000.0;

pub fn fit_ease(x: &InteractionMatrix, lambda: f64) -> Result<ItemWeightMatrix, CfError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(CfError::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    if x.is_empty() {
        return Err(CfError::EmptyMatrix);
    }
    let n = x.n_items();
    let mut gram = DMatrix::<f64>::zeros(n, n);
    for row in x.rows() {
        for &a in row {
            for &b in row {
                gram[(a as usize, b as usize)] += 1.0;
            }
        }
    }
    for i in 0..n {
        gram[(i, i)] += lambda;
    }
    let p = gram
        .cholesky()
        .ok_or_else(|| CfError::Solve("Gram matrix is not positive definite".into()))?
        .inverse();
    let weights = DenseMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            -p[(i, j)] / p[(j, j)]
        }
    });
    Ok(ItemWeightMatrix::new(x.items().to_vec(), weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::ItemId;

    fn tiny() -> InteractionMatrix {
        // X = [[1,1],[1,0]]
        InteractionMatrix::from_user_items([("u1", vec!["i1", "i2"]), ("u2", vec!["i1"])])
    }

    #[test]
    fn two_by_two_closed_form() {
        let b = fit_ease(&tiny(), 1.0).unwrap();
        // P = 1/5 [[2,-1],[-1,3]]  =>  B = [[0, 1/3], [1/2, 0]]
        assert_eq!(b.weight(0, 0), 0.0);
        assert_eq!(b.weight(1, 1), 0.0);
        assert!((b.weight(0, 1) - 1.0 / 3.0).abs() < 1e-12);
        assert!((b.weight(1, 0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn user_scores_are_row_times_weights() {
        let b = fit_ease(&tiny(), 1.0).unwrap();
        let s = b.score(&[ItemId::new("i1")], &[ItemId::new("i1"), ItemId::new("i2")]);
        assert_eq!(s[0].1, 0.0);
        assert!((s[1].1 - 1.0 / 3.0).abs() < 1e-12);
        assert!(s[1].1 > s[0].1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(fit_ease(&tiny(), 0.0), Err(CfError::InvalidParameter(_))));
        let empty = InteractionMatrix::from_user_items(Vec::<(String, Vec<String>)>::new());
        assert!(matches!(fit_ease(&empty, 1.0), Err(CfError::EmptyMatrix)));
    }
}
