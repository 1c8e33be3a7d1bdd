//! Frame components of symmetric 2-tensors and algebraic curvature tensors,
//! the Kulkarni-Nomizu product, and the contractions built on it.
//!
//! All components are with respect to one orthonormal frame, so the metric
//! `g` is the identity matrix and no index is ever raised or lowered.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{dot, SymMatrix};
use crate::{rng, Error, Result};

/// Squared tensor norm summed over every index tuple.
pub trait FullNorm {
    fn full_norm_sq(&self) -> f64;

    fn full_norm(&self) -> f64 {
        libm::sqrt(self.full_norm_sq())
    }
}

/// A symmetric (0,2)-tensor: metric, Ricci, Schouten, trace-free Ricci.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SymTwoTensor {
    entries: SymMatrix,
}

impl SymTwoTensor {
    pub fn new(entries: SymMatrix) -> Result<Self> {
        if entries.dim() < 2 {
            return Err(Error::Dimension(format!(
                "symmetric 2-tensor needs dim >= 2, got {}",
                entries.dim()
            )));
        }
        Ok(Self { entries })
    }

    /// The metric `g` in an orthonormal frame.
    pub fn metric(n: usize) -> Self {
        Self { entries: SymMatrix::identity(n) }
    }

    pub fn zeros(n: usize) -> Self {
        Self { entries: SymMatrix::zeros(n) }
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::diagonal(values))
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &SymMatrix {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { entries: self.entries.scaled(c) }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        Ok(Self { entries: self.entries.add(&other.entries)? })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { entries: self.entries.sub(&other.entries)? })
    }

    /// `T - (tr T / n) g`.
    pub fn trace_free(&self) -> Self {
        let n = self.dim();
        let mean = self.trace() / n as f64;
        Self {
            entries: SymMatrix::from_fn(n, |i, j| {
                self.get(i, j) - if i == j { mean } else { 0.0 }
            }),
        }
    }

    /// Components `T(f_a, f_b)` with respect to the frame rows `f`.
    pub fn in_frame(&self, frame: &Frame) -> Self {
        Self { entries: self.entries.conjugate_by_rows(frame.rows()) }
    }
}

impl FullNorm for SymTwoTensor {
    fn full_norm_sq(&self) -> f64 {
        self.entries.frobenius_sq()
    }
}

/// Orthonormal frame stored as the rows of an orthogonal matrix.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Frame {
    rows: Vec<Vec<f64>>,
}

/// Tolerance on `|F F^T - I|` for a frame to count as orthonormal.
pub const FRAME_TOL: f64 = 1e-10;

impl Frame {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("frame must be square".into()));
        }
        let frame = Self { rows };
        let residual = frame.orthonormality_residual();
        if !(residual <= FRAME_TOL) {
            return Err(Error::Frame { residual });
        }
        Ok(frame)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// `max |F F^T - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let n = self.rows.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max(libm::fabs(dot(&self.rows[i], &self.rows[j]) - target));
            }
        }
        worst
    }
}

/// An algebraic curvature tensor `T[i][j][k][l]` with the Riemann symmetries.
///
/// Antisymmetry in each pair and pair exchange hold bit for bit: every
/// constructor computes one representative per `(i<j) <= (k<l)` block and
/// writes all eight signed copies.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    n: usize,
    data: Vec<f64>,
}

impl CurvatureTensor {
    pub fn zeros(n: usize) -> Result<Self> {
        check_curvature_dim(n)?;
        Ok(Self { n, data: vec![0.0; n * n * n * n] })
    }

    /// Builds a tensor from its representatives `f(i, j, k, l)` with `i < j`,
    /// `k < l` and `(i, j) <= (k, l)` lexicographically.
    pub fn from_representatives(
        n: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for (i, j) in pairs(n) {
            for (k, l) in pairs(n) {
                if (i, j) <= (k, l) {
                    let v = f(i, j, k, l);
                    t.set_block(i, j, k, l, v);
                }
            }
        }
        Ok(t)
    }

    /// Expands a list of representative components; every other
    /// representative is zero.
    pub fn from_entries(n: usize, entries: &[(usize, usize, usize, usize, f64)]) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        let mut seen = alloc::collections::BTreeSet::new();
        for (idx, &(i, j, k, l, v)) in entries.iter().enumerate() {
            if i >= n || j >= n || k >= n || l >= n {
                return Err(Error::Validation(format!(
                    "entry {idx} [{i},{j},{k},{l}] has an index outside 0..{n}"
                )));
            }
            if !(i < j && k < l && (i, j) <= (k, l)) {
                return Err(Error::Validation(format!(
                    "entry {idx} [{i},{j},{k},{l}] is not a representative \
                     (need i<j, k<l, (i,j) <= (k,l))"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "entry {idx} [{i},{j},{k},{l}] is not finite"
                )));
            }
            if !seen.insert((i, j, k, l)) {
                return Err(Error::Validation(format!(
                    "entry {idx} [{i},{j},{k},{l}] duplicates an earlier representative"
                )));
            }
            t.set_block(i, j, k, l, v);
        }
        Ok(t)
    }

    /// Non-zero representatives in lexicographic order.
    pub fn representatives(&self) -> Vec<(usize, usize, usize, usize, f64)> {
        let mut out = Vec::new();
        for (i, j) in pairs(self.n) {
            for (k, l) in pairs(self.n) {
                if (i, j) <= (k, l) {
                    let v = self.get(i, j, k, l);
                    if v != 0.0 {
                        out.push((i, j, k, l, v));
                    }
                }
            }
        }
        out
    }

    fn set_block(&mut self, i: usize, j: usize, k: usize, l: usize, v: f64) {
        for (a, b, c, d, s) in [
            (i, j, k, l, v),
            (j, i, k, l, -v),
            (i, j, l, k, -v),
            (j, i, l, k, v),
            (k, l, i, j, v),
            (l, k, i, j, -v),
            (k, l, j, i, -v),
            (l, k, j, i, v),
        ] {
            let at = self.offset(a, b, c, d);
            self.data[at] = s;
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.n + j) * self.n + k) * self.n + l
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// All `n^4` components, row-major in `(i, j, k, l)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.offset(i, j, k, l)]
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| c * x).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self { n: self.n, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() })
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Dimension(format!(
                "curvature tensors of dimension {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| libm::fabs(a - b))
            .fold(0.0, f64::max)
    }

    /// Largest first-Bianchi defect `|T_ijkl + T_jkil + T_kijl|`.
    pub fn bianchi_residual(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let s = self.get(i, j, k, l) + self.get(j, k, i, l) + self.get(k, i, j, l);
                        worst = worst.max(libm::fabs(s));
                    }
                }
            }
        }
        worst
    }

    /// Checks the pair antisymmetries, pair exchange and (optionally) the
    /// first Bianchi identity, each to `tol * (1 + max|T|)`.
    pub fn validate(&self, tol: f64, check_bianchi: bool) -> Result<()> {
        let n = self.n;
        let bound = tol * (1.0 + self.max_abs());
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let t = self.get(i, j, k, l);
                        let worst = libm::fabs(t + self.get(j, i, k, l))
                            .max(libm::fabs(t + self.get(i, j, l, k)))
                            .max(libm::fabs(t - self.get(k, l, i, j)));
                        if worst > bound {
                            return Err(Error::Validation(format!(
                                "component [{i},{j},{k},{l}] breaks the pair symmetries by {worst:e}"
                            )));
                        }
                        if check_bianchi {
                            let b = t + self.get(j, k, i, l) + self.get(k, i, j, l);
                            if libm::fabs(b) > bound {
                                return Err(Error::Validation(format!(
                                    "first Bianchi identity fails at [{i},{j},{k},{l}] by {:e}",
                                    libm::fabs(b)
                                )));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Components `T(f_a, f_b, f_c, f_d)` in the frame whose rows are `f`.
    pub fn in_frame(&self, frame: &Frame) -> Result<Self> {
        if frame.dim() != self.n {
            return Err(Error::Dimension(format!(
                "frame of dimension {} for a tensor of dimension {}",
                frame.dim(),
                self.n
            )));
        }
        let n = self.n;
        let f = frame.rows();
        // Contract one slot at a time: O(n^5).
        let mut cur = self.data.clone();
        for slot in 0..4 {
            let mut next = vec![0.0; cur.len()];
            let stride = n.pow(3 - slot as u32);
            for base in 0..cur.len() {
                let idx = (base / stride) % n;
                let rest = base - idx * stride;
                let mut s = 0.0;
                for m in 0..n {
                    s += f[idx][m] * cur[rest + m * stride];
                }
                next[base] = s;
            }
            cur = next;
        }
        let raw = Self { n, data: cur };
        Self::from_representatives(n, |i, j, k, l| raw.get(i, j, k, l))
    }
}

impl FullNorm for CurvatureTensor {
    fn full_norm_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }
}

fn check_curvature_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Dimension(format!("curvature tensors need dim >= 3, got {n}")));
    }
    Ok(())
}

/// Lexicographically ordered pairs `(i, j)` with `i < j`.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

/// `(S ⊙ T)(X,Y,Z,W) = S(X,Z)T(Y,W) - S(X,W)T(Y,Z) + S(Y,W)T(X,Z) - S(Y,Z)T(X,W)`.
pub fn kulkarni_nomizu(s: &SymTwoTensor, t: &SymTwoTensor) -> Result<CurvatureTensor> {
    if s.dim() != t.dim() {
        return Err(Error::Dimension(format!(
            "Kulkarni-Nomizu product of dimensions {} and {}",
            s.dim(),
            t.dim()
        )));
    }
    // Grouped as (a + c) - (b + d) so that swapping S and T permutes
    // commutative additions only and the product is symmetric bit for bit.
    CurvatureTensor::from_representatives(s.dim(), |i, j, k, l| {
        let a = s.get(i, k) * t.get(j, l);
        let c = s.get(j, l) * t.get(i, k);
        let b = s.get(i, l) * t.get(j, k);
        let d = s.get(j, k) * t.get(i, l);
        (a + c) - (b + d)
    })
}

/// `Ric(X, Y) = Σ_j Rm(X, e_j, Y, e_j)`.
pub fn ricci_contract(rm: &CurvatureTensor) -> SymTwoTensor {
    let n = rm.dim();
    SymTwoTensor {
        entries: SymMatrix::from_fn(n, |i, k| (0..n).map(|j| rm.get(i, j, k, j)).sum()),
    }
}

pub fn scalar_curvature(rm: &CurvatureTensor) -> f64 {
    ricci_contract(rm).trace()
}

/// Seeded random algebraic curvature tensor with Gaussian-distributed
/// components, projected onto the Riemann symmetries and the Bianchi kernel.
pub fn symmetrize_random(seed: u64, dim: usize) -> Result<CurvatureTensor> {
    check_curvature_dim(dim)?;
    let n = dim;
    let mut r = rng::seeded(seed);
    let raw: Vec<f64> = (0..n * n * n * n).map(|_| rng::normal(&mut r)).collect();
    let at = |i: usize, j: usize, k: usize, l: usize| raw[((i * n + j) * n + k) * n + l];
    let anti = |i, j, k, l| 0.25 * (at(i, j, k, l) - at(j, i, k, l) - at(i, j, l, k) + at(j, i, l, k));
    let paired = |i, j, k, l| 0.5 * (anti(i, j, k, l) + anti(k, l, i, j));
    let sym = CurvatureTensor::from_representatives(n, paired)?;
    CurvatureTensor::from_representatives(n, |i, j, k, l| {
        let cyclic = sym.get(i, j, k, l) + sym.get(j, k, i, l) + sym.get(k, i, j, l);
        sym.get(i, j, k, l) - cyclic / 3.0
    })
}
