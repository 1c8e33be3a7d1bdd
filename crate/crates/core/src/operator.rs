//! The curvature operator on `Λ²` as a symmetric matrix, its spectrum, and
//! its block structure in a Ricci eigenframe.

use alloc::format;
use alloc::vec::Vec;

use crate::decompose::orthogonal_decompose;
use crate::linalg::SymMatrix;
use crate::tensor::{kulkarni_nomizu, pairs, CurvatureTensor, FullNorm, Frame, SymTwoTensor, FRAME_TOL};
use crate::{Error, Result};

/// Threshold on `μ_1 + ... + μ_k` separating positive / nonnegative / indefinite.
pub const K_POSITIVITY_TOL: f64 = 1e-10;
/// `|W|^2 < CONFORMALLY_FLAT_TOL * (1 + |Rm|^2)` counts as conformally flat.
pub const CONFORMALLY_FLAT_TOL: f64 = 1e-9;

/// Lexicographic basis `e_i ∧ e_j`, `i < j`, of `Λ²` in dimension `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BivectorIndex {
    n: usize,
    pairs: Vec<(usize, usize)>,
}

impl BivectorIndex {
    pub fn new(n: usize) -> Self {
        Self { n, pairs: pairs(n).collect() }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `N = n(n-1)/2`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn flat(&self, i: usize, j: usize) -> Option<usize> {
        if i >= j || j >= self.n {
            return None;
        }
        // Pairs starting at a < i occupy Σ_{a<i} (n-1-a) slots.
        Some(i * (2 * self.n - i - 1) / 2 + (j - i - 1))
    }
}

/// A symmetric operator on `Λ²` in the lexicographic bivector basis.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BivectorMatrix {
    pub index: BivectorIndex,
    pub matrix: SymMatrix,
}

impl BivectorMatrix {
    /// `<T(e_i ∧ e_j), e_k ∧ e_l> = T_ijkl` in the tensor's own frame.
    pub fn of_tensor(t: &CurvatureTensor) -> Self {
        let index = BivectorIndex::new(t.dim());
        let p = index.pairs().to_vec();
        let matrix = SymMatrix::from_fn(p.len(), |a, b| {
            let (i, j) = p[a];
            let (k, l) = p[b];
            t.get(i, j, k, l)
        });
        Self { index, matrix }
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.matrix.frobenius_sq()
    }

    pub fn spectrum(&self) -> Result<SpectralSummary> {
        spectrum(self)
    }
}

/// `g(𝔯(X ∧ Y), Z ∧ W) = Rm(X, Y, Z, W)` evaluated on the frame rows.
pub fn curvature_operator(rm: &CurvatureTensor, frame: &Frame) -> Result<BivectorMatrix> {
    if frame.dim() != rm.dim() {
        return Err(Error::Dimension(format!(
            "frame of dimension {} for a tensor of dimension {}",
            frame.dim(),
            rm.dim()
        )));
    }
    let residual = frame.orthonormality_residual();
    if !(residual <= FRAME_TOL) {
        return Err(Error::Frame { residual });
    }
    Ok(BivectorMatrix::of_tensor(&rm.in_frame(frame)?))
}

/// Ascending eigenvalues and their running sums.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    /// `prefix_sums[k - 1] = μ_1 + ... + μ_k`.
    pub prefix_sums: Vec<f64>,
}

impl SpectralSummary {
    pub fn from_ascending(eigenvalues: Vec<f64>) -> Self {
        let prefix_sums = eigenvalues
            .iter()
            .scan(0.0, |acc, x| {
                *acc += x;
                Some(*acc)
            })
            .collect();
        Self { eigenvalues, prefix_sums }
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `μ_1 + ... + μ_k`.
    pub fn lowest_sum(&self, k: usize) -> f64 {
        self.prefix_sums[k - 1]
    }

    /// `μ_{N-k+1} + ... + μ_N`.
    pub fn highest_sum(&self, k: usize) -> f64 {
        crate::linalg::highest_sum(&self.eigenvalues, k)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }
}

pub fn spectrum(m: &BivectorMatrix) -> Result<SpectralSummary> {
    Ok(SpectralSummary::from_ascending(m.matrix.eigenvalues()?))
}

/// Orthonormal Ricci eigenframe (rows ordered by ascending eigenvalue) and
/// the eigenvalues `λ_1 <= ... <= λ_n`.
pub fn ricci_eigenframe(ric: &SymTwoTensor) -> Result<(Frame, Vec<f64>)> {
    let e = ric.matrix().eigen()?;
    Ok((Frame::new(e.vectors)?, e.values))
}

/// `λ_ij = (λ_i + λ_j - R/(n-1)) / (n-2)` for `i < j`, in lexicographic order.
pub fn schouten_pair_eigenvalues(ricci_eigenvalues: &[f64], scalar: f64) -> Vec<f64> {
    let n = ricci_eigenvalues.len();
    let nf = n as f64;
    pairs(n)
        .map(|(i, j)| (ricci_eigenvalues[i] + ricci_eigenvalues[j] - scalar / (nf - 1.0)) / (nf - 2.0))
        .collect()
}

/// `𝔯 = 𝔖 + 𝔚` expressed in a Ricci eigenframe.
#[derive(Debug, Clone, PartialEq)]
pub struct RicciFrameBlocks {
    pub frame: Frame,
    pub ricci_eigenvalues: Vec<f64>,
    pub scalar: f64,
    /// Operator of `S ⊙ g`; diagonal in this frame.
    pub schouten: BivectorMatrix,
    /// Operator of the Weyl tensor.
    pub weyl: BivectorMatrix,
    /// Operator of `Rm` itself in the same frame.
    pub operator: BivectorMatrix,
}

impl RicciFrameBlocks {
    /// Closed-form diagonal of `𝔖` from the Ricci eigenvalues.
    pub fn pair_eigenvalues(&self) -> Vec<f64> {
        schouten_pair_eigenvalues(&self.ricci_eigenvalues, self.scalar)
    }

    /// `max |𝔖 + 𝔚 - 𝔯|`.
    pub fn reconstruction_residual(&self) -> f64 {
        self.schouten
            .matrix
            .add(&self.weyl.matrix)
            .map(|sum| sum.max_abs_diff(&self.operator.matrix))
            .unwrap_or(f64::INFINITY)
    }
}

/// Builds `𝔖` and `𝔚` from the Schouten and Weyl tensors rotated into the
/// Ricci eigenframe.
pub fn ricci_frame_blocks(rm: &CurvatureTensor) -> Result<RicciFrameBlocks> {
    let d = orthogonal_decompose(rm)?;
    let (frame, ricci_eigenvalues) = ricci_eigenframe(&d.ricci)?;
    let g = SymTwoTensor::metric(rm.dim());
    let sg = kulkarni_nomizu(&d.schouten, &g)?;
    Ok(RicciFrameBlocks {
        schouten: curvature_operator(&sg, &frame)?,
        weyl: curvature_operator(&d.weyl, &frame)?,
        operator: curvature_operator(rm, &frame)?,
        frame,
        ricci_eigenvalues,
        scalar: d.scalar,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum Positivity {
    Positive,
    Nonneg,
    Indefinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPositivity {
    pub verdict: Positivity,
    pub margin: f64,
}

/// Classifies `μ_1 + ... + μ_k`.
pub fn k_positivity(s: &SpectralSummary, k: usize) -> Result<KPositivity> {
    if k == 0 || k > s.len() {
        return Err(Error::Range(format!("k = {k} outside 1..={}", s.len())));
    }
    let margin = s.lowest_sum(k);
    let verdict = if margin > K_POSITIVITY_TOL {
        Positivity::Positive
    } else if margin >= -K_POSITIVITY_TOL {
        Positivity::Nonneg
    } else {
        Positivity::Indefinite
    };
    Ok(KPositivity { verdict, margin })
}

/// Certified bounds `[μ_1, μ_N]` on every sectional curvature, valid when
/// the operator is diagonal in a product bivector basis, i.e. when the
/// Weyl tensor vanishes.
pub fn sectional_range(rm: &CurvatureTensor) -> Result<(f64, f64)> {
    let d = orthogonal_decompose(rm)?;
    let tol = CONFORMALLY_FLAT_TOL * (1.0 + rm.full_norm_sq());
    let weyl_norm_sq = d.weyl_norm_sq();
    if weyl_norm_sq >= tol {
        return Err(Error::NotConformallyFlat { weyl_norm_sq, tol });
    }
    let s = spectrum(&BivectorMatrix::of_tensor(rm))?;
    Ok((s.min(), s.max()))
}

/// `(λ_1 + 2λ_2 + λ_3) - 2R/(n-2)` from ascending Ricci eigenvalues.
pub fn quasi_positive_quantity(ricci_ascending: &[f64], scalar: f64, n: usize) -> Result<f64> {
    if n < 3 || ricci_ascending.len() < 3 {
        return Err(Error::Dimension(format!(
            "needs n >= 3 and three Ricci eigenvalues (n = {n}, got {})",
            ricci_ascending.len()
        )));
    }
    let l = ricci_ascending;
    Ok((l[0] + 2.0 * l[1] + l[2]) - 2.0 * scalar / (n as f64 - 2.0))
}
