//! Symmetric eigendecomposition via Householder tridiagonalization followed
//! by the implicit QL iteration (the EISPACK `tred2`/`tql2` pair).

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::gsp::shift::ShiftOperator;
use crate::scalar::Real;

/// Orthonormal eigenbasis of a symmetric shift operator, eigenvalues in
/// descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition<T> {
    eigvecs: Array2<T>,
    eigvals: Array1<T>,
}

impl<T: Real> SpectralDecomposition<T> {
    /// Wraps externally computed eigenpairs. Columns of `eigvecs` pair with
    /// `eigvals`; the ordering is taken as given.
    pub fn from_parts(eigvecs: Array2<T>, eigvals: Array1<T>) -> Result<Self> {
        let (r, c) = eigvecs.dim();
        if r != c || c != eigvals.len() {
            return Err(Error::Dimension(format!(
                "eigvecs {r}x{c} with {} eigenvalues",
                eigvals.len()
            )));
        }
        Ok(Self { eigvecs, eigvals })
    }

    pub fn eigvecs(&self) -> &Array2<T> {
        &self.eigvecs
    }

    pub fn eigvals(&self) -> &Array1<T> {
        &self.eigvals
    }

    pub fn n(&self) -> usize {
        self.eigvals.len()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> Array2<T> {
        let scaled = &self.eigvecs * &self.eigvals;
        scaled.dot(&self.eigvecs.t())
    }

    /// Frobenius norm of `VᵀV - I`.
    pub fn orthonormality_error(&self) -> T {
        let mut gram = self.eigvecs.t().dot(&self.eigvecs);
        for i in 0..self.n() {
            gram[[i, i]] -= T::one();
        }
        gram.iter().map(|&x| x * x).sum::<T>().sqrt()
    }
}

/// Eigendecomposition of a shift operator.
pub fn eig_sym<T: Real>(shift: &ShiftOperator<T>) -> Result<SpectralDecomposition<T>> {
    eig_sym_matrix(shift.matrix())
}

/// Eigendecomposition of any symmetric matrix. Asymmetry larger than a few
/// hundred ulps of the largest entry is rejected.
pub fn eig_sym_matrix<T: Real>(matrix: &Array2<T>) -> Result<SpectralDecomposition<T>> {
    let (n, m) = matrix.dim();
    if n != m {
        return Err(Error::Dimension(format!("eig_sym on a {n}x{m} matrix")));
    }
    if n == 0 {
        return Err(Error::Dimension("eig_sym on an empty matrix".into()));
    }
    let scale = matrix.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if !scale.is_finite() {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    let mut asym = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            asym = asym.max((matrix[[i, j]] - matrix[[j, i]]).abs());
        }
    }
    if asym > T::lit(256.0) * T::epsilon() * scale.max(T::one()) {
        return Err(Error::NotSymmetric {
            max_asymmetry: asym.as_f64(),
        });
    }

    let half = T::lit(0.5);
    let mut v = Array2::from_shape_fn((n, n), |(i, j)| half * (matrix[[i, j]] + matrix[[j, i]]));
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tridiagonalize(&mut v, &mut d, &mut e);
    tridiagonal_ql(&mut v, &mut d, &mut e)?;

    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps solver order among ties.
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).expect("finite eigenvalues"));
    let eigvals = Array1::from_iter(order.iter().map(|&k| d[k]));
    let eigvecs = Array2::from_shape_fn((n, n), |(i, j)| v[[i, order[j]]]);
    Ok(SpectralDecomposition { eigvecs, eigvals })
}

fn tridiagonalize<T: Real>(v: &mut Array2<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[[n - 1, j]];
    }

    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for dk in d.iter().take(i) {
            scale += dk.abs();
        }
        if scale == T::zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[[i - 1, j]];
                v[[i, j]] = T::zero();
                v[[j, i]] = T::zero();
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }

            for j in 0..i {
                f = d[j];
                v[[j, i]] = f;
                g = e[j] + v[[j, j]] * f;
                for k in (j + 1)..i {
                    g += v[[k, j]] * d[k];
                    e[k] += v[[k, j]] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[[k, j]] -= f * e[k] + g * d[k];
                }
                d[j] = v[[i - 1, j]];
                v[[i, j]] = T::zero();
            }
        }
        d[i] = h;
    }

    // Accumulate the Householder reflections.
    for i in 0..n.saturating_sub(1) {
        v[[n - 1, i]] = v[[i, i]];
        v[[i, i]] = T::one();
        let h = d[i + 1];
        if h != T::zero() {
            for k in 0..=i {
                d[k] = v[[k, i + 1]] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[[k, i + 1]] * v[[k, j]];
                }
                for k in 0..=i {
                    let dk = d[k];
                    v[[k, j]] -= g * dk;
                }
            }
        }
        for k in 0..=i {
            v[[k, i + 1]] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[[n - 1, j]];
        v[[n - 1, j]] = T::zero();
    }
    v[[n - 1, n - 1]] = T::one();
    e[0] = T::zero();
}

fn tridiagonal_ql<T: Real>(v: &mut Array2<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();

    let eps = T::epsilon();
    let two = T::lit(2.0);
    let max_sweeps = 60 * n.max(1);
    let mut f = T::zero();
    let mut tst1 = T::zero();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 && e[m].abs() > eps * tst1 {
            m += 1;
        }

        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(Error::NoConvergence);
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let vk1 = v[[k, i + 1]];
                        let vk = v[[k, i]];
                        v[[k, i + 1]] = s * vk + c * vk1;
                        v[[k, i]] = c * vk - s * vk1;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    Ok(())
}
