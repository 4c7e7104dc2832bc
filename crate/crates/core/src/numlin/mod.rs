//! Dense linear algebra: minimum-norm least squares, subspace projections and
//! an updatable QR factorization.

mod cod;
mod matrix;
mod updqr;

pub use cod::{rank_tolerance, Cod};
pub use matrix::DenseMatrix;
pub use updqr::{QrOptions, RowId, UpdatableQr};

pub(crate) use matrix::{axpy, dot, max_abs, norm2};

use crate::error::{Error, Result};

fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(Error::dims(format!(
            "{what} has length {got}, expected {want}"
        )));
    }
    Ok(())
}

/// `A⁺ b`, the least-squares solution of smallest Euclidean norm.
pub fn min_norm_ls(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    check_len("right-hand side", b.len(), a.n_rows())?;
    Ok(Cod::new(a).solve(b))
}

/// Orthogonal projection of `v` onto the row space of `A`.
pub fn project_row_space(a: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    check_len("vector", v.len(), a.n_cols())?;
    Ok(Cod::new(&a.transpose()).project_range(v))
}

/// Orthogonal projection of `v` onto the null space of `A`.
pub fn project_null_space(a: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let row = project_row_space(a, v)?;
    Ok(v.iter().zip(&row).map(|(x, p)| x - p).collect())
}

/// Numerical rank of `A`.
pub fn rank(a: &DenseMatrix) -> usize {
    Cod::new(a).rank()
}

/// Dimension of the null space of `A`.
pub fn nullity(a: &DenseMatrix) -> usize {
    a.n_cols() - rank(a)
}

/// `X⁺ v`.
pub fn pinv_apply(x: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    min_norm_ls(x, v)
}

/// `X X⁺ v`, the projection of `v` onto the column space of `X`.
pub fn col_project(x: &DenseMatrix, v: &[f64]) -> Result<Vec<f64>> {
    check_len("vector", v.len(), x.n_rows())?;
    Ok(Cod::new(x).project_range(v))
}

/// The explicit pseudoinverse `X⁺` (`p x n` for an `n x p` matrix).
pub fn pinv(x: &DenseMatrix) -> DenseMatrix {
    let cod = Cod::new(x);
    let (n, p) = (x.n_rows(), x.n_cols());
    let mut out = DenseMatrix::zeros(p, n);
    let mut e = vec![0.0; n];
    for i in 0..n {
        e[i] = 1.0;
        for (j, v) in cod.solve(&e).into_iter().enumerate() {
            out[(j, i)] = v;
        }
        e[i] = 0.0;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn min_norm_ls_examples() {
        let id = DenseMatrix::identity(3);
        assert_eq!(
            min_norm_ls(&id, &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        let a = DenseMatrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let x = min_norm_ls(&a, &[0.0, 2.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15);
        assert!(min_norm_ls(&a, &[1.0]).is_err());
    }

    #[test]
    fn null_projection_of_difference_operator_is_mean() {
        let d = DenseMatrix::from_rows(
            &[
                vec![-1.0, 1.0, 0.0, 0.0],
                vec![0.0, -1.0, 1.0, 0.0],
                vec![0.0, 0.0, -1.0, 1.0],
            ],
            4,
        )
        .unwrap();
        let v = [1.0, 5.0, -2.0, 4.0];
        let p = project_null_space(&d, &v).unwrap();
        for x in p {
            assert!((x - 2.0).abs() < 1e-14);
        }
        assert_eq!(nullity(&d), 1);
    }

    #[test]
    fn zero_matrix_projects_nothing() {
        let z = DenseMatrix::zeros(2, 3);
        assert_eq!(
            project_null_space(&z, &[1.0, 2.0, 3.0]).unwrap(),
            vec![1.0, 2.0, 3.0]
        );
        assert_eq!(nullity(&DenseMatrix::zeros(0, 4)), 4);
        assert_eq!(nullity(&DenseMatrix::identity(3)), 0);
    }

    #[test]
    fn square_pinv_is_inverse() {
        let x = DenseMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 1.0]], 2).unwrap();
        let v = pinv_apply(&x, &[3.0, 2.0]).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14 && (v[1] - 1.0).abs() < 1e-14);
        let xp = pinv(&x);
        let prod = x.matmul(&xp).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((prod[(i, j)] - want).abs() < 1e-14);
            }
        }
    }
}
