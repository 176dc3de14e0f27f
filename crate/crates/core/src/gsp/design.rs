use ndarray::{Array1, Array2, ArrayView1, ShapeBuilder};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The `NP × N` Khatri-Rao operator `YᵀV ⊙ V`. Its product with a frequency
/// response `g` equals `vec(V diag(g) Vᵀ Y)`, `vec` stacking the columns of
/// the `N × P` result.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix<T> {
    matrix: Array2<T>,
    n_nodes: usize,
    n_signals: usize,
}

impl<T: Real> DesignMatrix<T> {
    pub fn matrix(&self) -> &Array2<T> {
        &self.matrix
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn n_signals(&self) -> usize {
        self.n_signals
    }

    /// `A g`, the vectorized synthesized signals.
    pub fn apply(&self, g: ArrayView1<'_, T>) -> Array1<T> {
        self.matrix.dot(&g)
    }

    /// Largest column ℓ2 norm, i.e. the `1 → 2` operator norm.
    pub fn max_column_norm(&self) -> T {
        crate::linalg::max_column_norm(&self.matrix)
    }
}

/// Builds `YᵀV ⊙ V`. Row `i + p·N`, column `k` holds `V_ik (YᵀV)_pk`.
pub fn khatri_rao_design<T: Real>(y: &Array2<T>, eigvecs: &Array2<T>) -> Result<DesignMatrix<T>> {
    let (n, p) = y.dim();
    if eigvecs.dim() != (n, n) {
        return Err(Error::Dimension(format!(
            "observations {n}x{p} with eigvecs {:?}",
            eigvecs.dim()
        )));
    }
    let ytv = y.t().dot(eigvecs);
    let matrix = Array2::from_shape_fn((n * p, n), |(row, k)| {
        let (i, col) = (row % n, row / n);
        eigvecs[[i, k]] * ytv[[col, k]]
    });
    Ok(DesignMatrix {
        matrix,
        n_nodes: n,
        n_signals: p,
    })
}

/// Column-major vectorization of a matrix.
pub fn vec_col_major<T: Real>(m: &Array2<T>) -> Array1<T> {
    m.t().iter().copied().collect()
}

/// Inverse of [`vec_col_major`].
pub fn unvec_col_major<T: Real>(v: &Array1<T>, rows: usize, cols: usize) -> Result<Array2<T>> {
    if v.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "cannot reshape {} entries into {rows}x{cols}",
            v.len()
        )));
    }
    Ok(Array2::from_shape_vec((rows, cols).f(), v.to_vec()).expect("length checked"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn identities_give_selector_columns() {
        let eye = Array2::<f64>::eye(3);
        let a = khatri_rao_design(&eye, &eye).unwrap();
        assert_eq!(a.matrix().dim(), (9, 3));
        for k in 0..3 {
            let mut e = Array2::zeros((3, 3));
            e[[k, k]] = 1.0;
            assert_eq!(a.matrix().column(k).to_owned(), vec_col_major(&e));
        }
    }

    #[test]
    fn ones_response_reproduces_observations() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = array![[h, h], [h, -h]];
        let y = array![[1.0, 2.0, -1.0], [0.5, 0.0, 3.0]];
        let a = khatri_rao_design(&y, &v).unwrap();
        let out = a.apply(Array1::ones(2).view());
        let expected = vec_col_major(&y);
        for (o, e) in out.iter().zip(expected.iter()) {
            assert!((o - e).abs() < 1e-14);
        }
    }

    #[test]
    fn vec_is_column_major() {
        let m = array![[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]];
        assert_eq!(vec_col_major(&m), array![1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
        assert_eq!(unvec_col_major(&vec_col_major(&m), 3, 2).unwrap(), m);
        assert!(unvec_col_major(&array![1.0, 2.0], 3, 2).is_err());
    }
}
