//! Dense real symmetric matrices and a cyclic Jacobi eigensolver.
//!
//! Matrices in this crate are tiny (at most `n(n-1)/2 = 66` rows for `n = 12`),
//! so the solver favours unconditional accuracy over speed.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Index;

use crate::{Error, Result};

/// Off-diagonal Frobenius norm, relative to the full norm, at which a Jacobi
/// run is considered converged.
pub const JACOBI_REL_TOL: f64 = 1e-13;
/// Sweep limit for the Jacobi solver.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Dense symmetric `n x n` matrix, row-major.
///
/// Symmetry is a storage invariant: every constructor fills the upper
/// triangle and mirrors it, so `m[(i, j)] == m[(j, i)]` bit for bit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { 0.0 })
    }

    /// Builds a matrix from the upper triangle `f(i, j)` with `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = f(i, j);
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    /// Builds from a row-major slice, averaging `(i, j)` and `(j, i)`.
    pub fn from_row_major(n: usize, values: &[f64]) -> Result<Self> {
        if values.len() != n * n {
            return Err(Error::Dimension(alloc::format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                values.len()
            )));
        }
        Ok(Self::from_fn(n, |i, j| 0.5 * (values[i * n + j] + values[j * n + i])))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// Sum of squares of all entries.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn frobenius(&self) -> f64 {
        libm::sqrt(self.frobenius_sq())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |i, j| self[(i, j)] + other[(i, j)]))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)]))
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(alloc::format!(
                "matrix shapes differ: {} vs {}",
                self.n,
                other.n
            )));
        }
        Ok(())
    }

    /// Largest absolute entry of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    /// Largest absolute off-diagonal entry.
    pub fn max_abs_off_diagonal(&self) -> f64 {
        let mut m = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    m = m.max(libm::fabs(self[(i, j)]));
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)] * x[j]).sum())
            .collect()
    }

    /// `<x, A x>`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `Q A Q^T` for `Q` given by its rows.
    pub fn conjugate_by_rows(&self, rows: &[Vec<f64>]) -> Self {
        let m = rows.len();
        let ax: Vec<Vec<f64>> = rows.iter().map(|r| self.mul_vec(r)).collect();
        Self::from_fn(m, |i, j| dot(&rows[i], &ax[j]))
    }

    /// Eigen-decomposition by cyclic Jacobi rotations.
    pub fn eigen(&self) -> Result<SymEigen> {
        jacobi(self, true)
    }

    /// Ascending eigenvalues only.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(jacobi(self, false)?.values)
    }
}

impl Index<(usize, usize)> for SymMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

/// Ascending eigenvalues with unit eigenvectors.
///
/// `vectors[i]` belongs to `values[i]`; each eigenvector has its first
/// non-negligible component positive.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub sweeps: usize,
}

/// With `want_vectors == false` the rotations are not accumulated and
/// `vectors` is left empty.
fn jacobi(m: &SymMatrix, want_vectors: bool) -> Result<SymEigen> {
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = if want_vectors { vec![0.0; n * n] } else { Vec::new() };
    if want_vectors {
        for i in 0..n {
            v[i * n + i] = 1.0;
        }
    }
    let sweeps = jacobi_in_place(&mut a, n, want_vectors.then_some(v.as_mut_slice()))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    let values = order.iter().map(|&i| a[i * n + i]).collect();
    if !want_vectors {
        return Ok(SymEigen { values, vectors: Vec::new(), sweeps });
    }
    let vectors = order
        .iter()
        .map(|&col| {
            let mut vec: Vec<f64> = (0..n).map(|k| v[k * n + col]).collect();
            if let Some(first) = vec.iter().copied().find(|x| libm::fabs(*x) > 1e-12) {
                if first < 0.0 {
                    vec.iter_mut().for_each(|x| *x = -*x);
                }
            }
            vec
        })
        .collect();
    Ok(SymEigen { values, vectors, sweeps })
}

/// Ascending eigenvalues of the row-major symmetric `n x n` matrix in `a`,
/// written to `out`. `a` is overwritten. Allocation-free for hot loops.
pub fn eigenvalues_in_place(a: &mut [f64], n: usize, out: &mut [f64]) -> Result<()> {
    jacobi_in_place(a, n, None)?;
    for i in 0..n {
        out[i] = a[i * n + i];
    }
    out[..n].sort_by(f64::total_cmp);
    Ok(())
}

/// Cyclic Jacobi sweeps until the off-diagonal Frobenius norm drops below
/// `JACOBI_REL_TOL` times the initial Frobenius norm. Rotations are
/// accumulated into the columns of `v` when given. Returns the sweep count.
fn jacobi_in_place(a: &mut [f64], n: usize, mut v: Option<&mut [f64]>) -> Result<usize> {
    let norm = libm::sqrt(a[..n * n].iter().map(|x| x * x).sum());
    let target = JACOBI_REL_TOL * norm;
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        libm::sqrt(s)
    };

    let mut sweeps = 0;
    while off(a) > target {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::Numerical(alloc::format!(
                "Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps \
                 (off-diagonal norm {:e})",
                off(a)
            )));
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + libm::sqrt(theta * theta + 1.0))
                } else {
                    -1.0 / (-theta + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                if let Some(v) = v.as_deref_mut() {
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    Ok(sweeps)
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Sum of the `k` smallest entries of an ascending list.
pub fn lowest_sum(ascending: &[f64], k: usize) -> f64 {
    ascending[..k].iter().sum()
}

/// Sum of the `k` largest entries of an ascending list.
pub fn highest_sum(ascending: &[f64], k: usize) -> f64 {
    ascending[ascending.len() - k..].iter().sum()
}

/// Modified Gram-Schmidt. Vectors that become numerically dependent on
/// earlier ones are dropped.
pub fn gram_schmidt(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &out {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let len = norm(&w);
        if len > 1e-10 {
            w.iter_mut().for_each(|x| *x /= len);
            out.push(w);
        }
    }
    out
}
