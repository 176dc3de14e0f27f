//! Small dense helpers: norms, the mean-removing projector and a Cholesky
//! factorization.

use ndarray::{Array1, Array2, ArrayView1};

use crate::error::{Error, Result};
use crate::gsp::eigen::eig_sym_matrix;
use crate::scalar::Real;

pub fn frobenius_norm<T: Real>(m: &Array2<T>) -> T {
    m.iter().map(|&x| x * x).sum::<T>().sqrt()
}

pub fn l2_norm<T: Real>(v: ArrayView1<'_, T>) -> T {
    v.iter().map(|&x| x * x).sum::<T>().sqrt()
}

/// Entrywise ℓ1 norm `‖M‖_{1,1}`.
pub fn l11_norm<T: Real>(m: &Array2<T>) -> T {
    m.iter().map(|x| x.abs()).sum()
}

/// `‖M‖_{1→2}`: the largest column ℓ2 norm.
pub fn max_column_norm<T: Real>(m: &Array2<T>) -> T {
    m.columns().into_iter().map(|c| l2_norm(c)).fold(T::zero(), T::max)
}

/// `‖M‖_{2→2}`: the largest singular value, from the eigenvalues of the
/// smaller Gram matrix.
pub fn spectral_norm<T: Real>(m: &Array2<T>) -> Result<T> {
    if m.is_empty() {
        return Ok(T::zero());
    }
    let gram = if m.nrows() >= m.ncols() {
        m.t().dot(m)
    } else {
        m.dot(&m.t())
    };
    let dec = eig_sym_matrix(&gram)?;
    Ok(dec.eigvals()[0].max(T::zero()).sqrt())
}

/// `P₁⊥ v = v - mean(v)·1`.
pub fn project_out_mean<T: Real>(v: ArrayView1<'_, T>) -> Array1<T> {
    let mean = v.sum() / T::from_count(v.len());
    v.mapv(|x| x - mean)
}

/// `I - 11ᵀ/N`.
pub fn mean_projector<T: Real>(n: usize) -> Array2<T> {
    let inv = T::from_count(n).recip();
    Array2::from_shape_fn((n, n), |(i, j)| if i == j { T::one() - inv } else { -inv })
}

/// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
#[derive(Debug, Clone)]
pub struct Cholesky<T> {
    lower: Array2<T>,
}

impl<T: Real> Cholesky<T> {
    pub fn factor(m: &Array2<T>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::Dimension(format!("cholesky of {:?}", m.dim())));
        }
        let mut l = Array2::zeros((n, n));
        for j in 0..n {
            let mut diag = m[[j, j]];
            for k in 0..j {
                diag -= l[[j, k]] * l[[j, k]];
            }
            if !(diag > T::zero()) {
                return Err(Error::Domain(format!("matrix not positive definite at pivot {j}")));
            }
            let ljj = diag.sqrt();
            l[[j, j]] = ljj;
            for i in (j + 1)..n {
                let mut s = m[[i, j]];
                for k in 0..j {
                    s -= l[[i, k]] * l[[j, k]];
                }
                l[[i, j]] = s / ljj;
            }
        }
        Ok(Self { lower: l })
    }

    pub fn solve(&self, b: ArrayView1<'_, T>) -> Array1<T> {
        let l = &self.lower;
        let n = l.nrows();
        let mut y = b.to_owned();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[[i, k]] * y[k];
            }
            y[i] = s / l[[i, i]];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[[k, i]] * y[k];
            }
            y[i] = s / l[[i, i]];
        }
        y
    }
}

/// Solves a small dense square system by Gaussian elimination with partial
/// pivoting. Returns `None` when the matrix is numerically singular.
pub fn solve_dense<T: Real>(a: &Array2<T>, b: &Array1<T>) -> Option<Array1<T>> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = a.iter().fold(T::zero(), |s, v| s.max(v.abs()));
    let tiny = scale * T::epsilon() * T::from_count(n.max(1)) * T::lit(16.0);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[[i, col]].abs().partial_cmp(&m[[j, col]].abs()).unwrap())?;
        if !(m[[pivot, col]].abs() > tiny) {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                m.swap([pivot, k], [col, k]);
            }
            x.swap(pivot, col);
        }
        for row in (col + 1)..n {
            let f = m[[row, col]] / m[[col, col]];
            if f != T::zero() {
                for k in col..n {
                    let v = m[[col, k]];
                    m[[row, k]] -= f * v;
                }
                let xc = x[col];
                x[row] -= f * xc;
            }
        }
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[[i, k]] * x[k];
        }
        x[i] = s / m[[i, i]];
    }
    Some(x)
}
