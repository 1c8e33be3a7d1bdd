//! Eigenvalue-sum inequalities for real symmetric matrices and the pinching
//! constants built from them.
//!
//! Every check returns a [`BoundCheck`] in the orientation `lhs >= rhs`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::{gram_schmidt, highest_sum, lowest_sum, SymMatrix};
use crate::{rng, Error, Result};

/// Absolute slack below which an inequality still counts as satisfied,
/// scaled by `1 + |rhs|`.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "kebab-case"))]
pub enum EqualityCase {
    /// Every entry is zero.
    AllZero,
    /// The `k` lowest entries equal `-(N-k)c` and the rest equal `kc`, `c > 0`.
    TwoLevel,
    /// `k = N`: both sides are zero for every zero-sum sequence.
    FullSum,
}

/// `lhs >= rhs` evaluated with slack.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub equality_case: Option<EqualityCase>,
}

impl BoundCheck {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        Self { lhs, rhs, slack, holds: slack >= -BOUND_TOL * (1.0 + libm::fabs(rhs)), equality_case: None }
    }

    fn with_case(mut self, case: Option<EqualityCase>) -> Self {
        self.equality_case = case;
        self
    }
}

/// `sqrt(k(N-k)/N)`, the coefficient of the zero-sum lowest-k bound.
pub fn lowest_k_coefficient(big_n: usize, k: usize) -> f64 {
    let (nf, kf) = (big_n as f64, k as f64);
    libm::sqrt(kf * (nf - kf) / nf)
}

fn check_k(k: usize, len: usize) -> Result<()> {
    if k == 0 || k > len {
        return Err(Error::Range(format!("k = {k} outside 1..={len}")));
    }
    Ok(())
}

/// For a zero-sum sequence, `a_1 + ... + a_k >= -sqrt(k(N-k)/N) |a|`
/// (entries sorted ascending first). Inputs whose sum drifts from zero by
/// less than `1e-9 (1 + max|a_i|)` are centered; larger drift is rejected.
pub fn zero_sum_lowest_bound(a: &[f64], k: usize) -> Result<BoundCheck> {
    let n = a.len();
    check_k(k, n)?;
    let scale = 1.0 + a.iter().map(|x| libm::fabs(*x)).fold(0.0, f64::max);
    let sum: f64 = a.iter().sum();
    if !(libm::fabs(sum) < BOUND_TOL * scale) {
        return Err(Error::Precondition(format!("sequence sums to {sum:e}, expected 0")));
    }
    let mean = sum / n as f64;
    let mut v: Vec<f64> = a.iter().map(|x| x - mean).collect();
    v.sort_by(f64::total_cmp);
    let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
    let check = BoundCheck::new(lowest_sum(&v, k), -lowest_k_coefficient(n, k) * norm);
    Ok(check.with_case(classify_equality(&v, k, BOUND_TOL * scale)))
}

fn classify_equality(sorted: &[f64], k: usize, tol: f64) -> Option<EqualityCase> {
    if sorted.iter().all(|x| libm::fabs(*x) <= tol) {
        return Some(EqualityCase::AllZero);
    }
    if k == sorted.len() {
        return Some(EqualityCase::FullSum);
    }
    let (low, high) = sorted.split_at(k);
    let lo = low.iter().sum::<f64>() / low.len() as f64;
    let hi = high.iter().sum::<f64>() / high.len() as f64;
    let flat = |part: &[f64], level: f64| part.iter().all(|x| libm::fabs(x - level) <= tol);
    (lo < -tol && flat(low, lo) && flat(high, hi)).then_some(EqualityCase::TwoLevel)
}

/// `Σ_{j<=k} λ_j(A+B) >= Σ_{j<=k} (λ_j(A) + λ_j(B))` and the mirrored
/// `Σ_{top k} (λ_j(A) + λ_j(B)) >= Σ_{top k} λ_j(A+B)`.
pub fn eigen_sum_subadditivity(a: &SymMatrix, b: &SymMatrix, k: usize) -> Result<(BoundCheck, BoundCheck)> {
    let sum = a.add(b)?;
    check_k(k, a.dim())?;
    let (ea, eb, es) = (a.eigenvalues()?, b.eigenvalues()?, sum.eigenvalues()?);
    let lower = BoundCheck::new(lowest_sum(&es, k), lowest_sum(&ea, k) + lowest_sum(&eb, k));
    let upper = BoundCheck::new(highest_sum(&ea, k) + highest_sum(&eb, k), highest_sum(&es, k));
    Ok((lower, upper))
}

/// `Σ_j <x_j, A x_j>` for an orthonormal tuple.
pub fn tuple_sum(a: &SymMatrix, tuple: &[Vec<f64>]) -> f64 {
    tuple.iter().map(|x| a.quadratic_form(x)).sum()
}

/// Ky Fan extremal sums probed with random orthonormal `k`-tuples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct KyFanReport {
    /// Top-k eigenvalue sum against the largest probed tuple sum.
    pub upper: BoundCheck,
    /// Smallest probed tuple sum against the bottom-k eigenvalue sum.
    pub lower: BoundCheck,
    pub trials: usize,
}

impl KyFanReport {
    pub fn holds(&self) -> bool {
        self.upper.holds && self.lower.holds
    }

    pub fn worst_slack(&self) -> f64 {
        self.upper.slack.min(self.lower.slack)
    }
}

/// Draws `k` Gaussian vectors and orthonormalises them; redraws in the
/// (measure-zero) dependent case.
pub fn random_orthonormal_tuple(rng: &mut impl rand::Rng, n: usize, k: usize) -> Vec<Vec<f64>> {
    loop {
        let raw: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng::normal(rng)).collect()).collect();
        let q = gram_schmidt(&raw);
        if q.len() == k {
            return q;
        }
    }
}

pub fn ky_fan_check(a: &SymMatrix, k: usize, trials: usize, seed: u64) -> Result<KyFanReport> {
    let n = a.dim();
    check_k(k, n)?;
    let eig = a.eigenvalues()?;
    let mut rng = rng::seeded(seed);
    let mut best = f64::NEG_INFINITY;
    let mut worst = f64::INFINITY;
    for _ in 0..trials {
        let s = tuple_sum(a, &random_orthonormal_tuple(&mut rng, n, k));
        best = best.max(s);
        worst = worst.min(s);
    }
    if trials == 0 {
        best = highest_sum(&eig, k);
        worst = lowest_sum(&eig, k);
    }
    Ok(KyFanReport {
        upper: BoundCheck::new(highest_sum(&eig, k), best),
        lower: BoundCheck::new(worst, lowest_sum(&eig, k)),
        trials,
    })
}

/// `[(N-1)/N (|A|_2^2 - tr(A)^2/N)]^{1/2} >= |λ_i - tr(A)/N|` for every `i`.
pub fn concentration_check(a: &SymMatrix) -> Result<Vec<BoundCheck>> {
    let n = a.dim() as f64;
    let tr = a.trace();
    let radicand = (n - 1.0) / n * (a.frobenius_sq() - tr * tr / n);
    let bound = libm::sqrt(radicand.max(0.0));
    Ok(a.eigenvalues()?.into_iter().map(|l| BoundCheck::new(bound, libm::fabs(l - tr / n))).collect())
}

/// The named pinching constants. `id` strings are the report/CLI names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ThresholdKind {
    /// `sqrt(m(m-1)/((m+1)(m-2)))` reading `n` as the manifold dimension `m`.
    SectionalWeyl,
    /// The same expression reading `n` as half the (even) manifold dimension.
    SectionalWeylHalfDim,
    /// `sqrt(kN/(N-k))`.
    KPositiveWeyl,
    /// `sqrt(kN/(N-k)) (n-2)/n`.
    WeylIntegral,
    /// `sqrt(Nk/(N-k)) / (n(n-1))`, multiplier of the Yamabe constant.
    YamabeIntegral,
    /// `(n-2)/(n^2(n-1)) sqrt(k(N-k)/N)`, multiplier of the Yamabe constant.
    ScalarIntegral,
    /// `sqrt(Nk/(N-k)) min(1, n(n-2)/(8(n-1)))`, harmonic-Weyl gap.
    HarmonicWeylGapRicci,
    /// `1/(sqrt(2n)(n-1))`, harmonic-Weyl gap against the Yamabe constant.
    HarmonicWeylGapYamabe,
    /// `8π²`.
    WeylL2FourDim,
}

impl ThresholdKind {
    pub const ALL: [ThresholdKind; 9] = [
        Self::SectionalWeyl,
        Self::SectionalWeylHalfDim,
        Self::KPositiveWeyl,
        Self::WeylIntegral,
        Self::YamabeIntegral,
        Self::ScalarIntegral,
        Self::HarmonicWeylGapRicci,
        Self::HarmonicWeylGapYamabe,
        Self::WeylL2FourDim,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::SectionalWeyl => "thm14",
            Self::SectionalWeylHalfDim => "thm14_halfdim",
            Self::KPositiveWeyl => "cor34",
            Self::WeylIntegral => "thm15",
            Self::YamabeIntegral => "thm16",
            Self::ScalarIntegral => "cor17",
            Self::HarmonicWeylGapRicci => "thm19_gap1",
            Self::HarmonicWeylGapYamabe => "thm19_gap2",
            Self::WeylL2FourDim => "gb4",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.id() == id)
    }

    /// Whether the constant depends on `k`.
    pub fn uses_k(self) -> bool {
        !matches!(
            self,
            Self::SectionalWeyl | Self::SectionalWeylHalfDim | Self::HarmonicWeylGapYamabe | Self::WeylL2FourDim
        )
    }
}

fn range_err(kind: ThresholdKind, what: String) -> Error {
    Error::Range(format!("{}: {what}", kind.id()))
}

fn sectional_weyl_coefficient(m: f64) -> f64 {
    libm::sqrt(m * (m - 1.0) / ((m + 1.0) * (m - 2.0)))
}

/// The dimension/k-dependent coefficient of the named inequality.
/// `k` is ignored by kinds for which [`ThresholdKind::uses_k`] is false.
pub fn threshold(kind: ThresholdKind, n: usize, k: usize) -> Result<f64> {
    use ThresholdKind::*;
    let min_n = match kind {
        SectionalWeyl | KPositiveWeyl | ScalarIntegral | HarmonicWeylGapRicci | WeylL2FourDim => 4,
        SectionalWeylHalfDim | WeylIntegral => 3,
        YamabeIntegral | HarmonicWeylGapYamabe => 8,
    };
    if kind == WeylL2FourDim {
        if n != 4 {
            return Err(range_err(kind, format!("defined in dimension 4 only, got {n}")));
        }
        return Ok(8.0 * PI * PI);
    }
    if n < min_n {
        let extra = if kind == SectionalWeylHalfDim { " (n = 2 divides by zero)" } else { "" };
        return Err(range_err(kind, format!("needs n >= {min_n}, got {n}{extra}")));
    }
    let big_n = n * (n - 1) / 2;
    let k_max = match kind {
        KPositiveWeyl => big_n - 1,
        HarmonicWeylGapRicci => (n - 1) / 2,
        _ => n - 1,
    };
    if kind.uses_k() && (k == 0 || k > k_max) {
        return Err(range_err(kind, format!("k = {k} outside 1..={k_max} for n = {n}")));
    }
    let (nf, kf, bf) = (n as f64, k as f64, big_n as f64);
    let kn = libm::sqrt(kf * bf / (bf - kf));
    Ok(match kind {
        SectionalWeyl | SectionalWeylHalfDim => sectional_weyl_coefficient(nf),
        KPositiveWeyl => kn,
        WeylIntegral => kn * (nf - 2.0) / nf,
        YamabeIntegral => kn / (nf * (nf - 1.0)),
        ScalarIntegral => (nf - 2.0) / (nf * nf * (nf - 1.0)) * lowest_k_coefficient(big_n, k),
        HarmonicWeylGapRicci => kn * f64::min(1.0, nf * (nf - 2.0) / (8.0 * (nf - 1.0))),
        HarmonicWeylGapYamabe => 1.0 / (libm::sqrt(2.0 * nf) * (nf - 1.0)),
        WeylL2FourDim => unreachable!(),
    })
}

/// An inequality between rationals decided exactly, with its float view.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExactCheck {
    pub check: BoundCheck,
    pub strict_holds: bool,
}

/// `1 + 1/(n-p) > 4p(n-p)/(n(n-2))` for `n >= 8`, `1 <= p <= n/2 - 2`,
/// the degree window of the Yamabe-pinching vanishing argument.
pub fn form_degree_inequality(n: u32, p: u32) -> Result<ExactCheck> {
    if n < 8 || p == 0 || 2 * p + 4 > n {
        return Err(Error::Range(format!("needs n >= 8 and 1 <= p <= n/2 - 2, got n = {n}, p = {p}")));
    }
    let (ni, pi) = (n as i128, p as i128);
    // (n-p+1)/(n-p) > 4p(n-p)/(n(n-2)), cross-multiplied by positive denominators.
    let strict_holds = (ni - pi + 1) * ni * (ni - 2) > 4 * pi * (ni - pi) * (ni - pi);
    let (nf, pf) = (n as f64, p as f64);
    let check = BoundCheck::new(1.0 + 1.0 / (nf - pf), 4.0 * pf * (nf - pf) / (nf * (nf - 2.0)));
    Ok(ExactCheck { check, strict_holds })
}

/// `(k a - c |W|, k a + c |W|)` with `c = sqrt(k(N-k)/N)`: the lower and
/// upper eigenvalue-sum bounds derived from a `Ric_k` bound `k a`.
pub fn ric_k_weyl_bounds(a: f64, weyl_norm: f64, n: usize, k: usize) -> Result<(f64, f64)> {
    if !(weyl_norm >= 0.0) {
        return Err(Error::Precondition(format!("|W| = {weyl_norm} must be nonnegative")));
    }
    let big_n = n * (n.max(1) - 1) / 2;
    check_k(k, big_n)?;
    let c = lowest_k_coefficient(big_n, k) * weyl_norm;
    let ka = k as f64 * a;
    Ok((ka - c, ka + c))
}

/// `kR/(n(n-1)) - sqrt(k(N-k)/N) (sqrt(1/(n-2)) |Ric°| + |W|)`.
pub fn scalar_pinching_lower_bound(scalar: f64, ric0_norm: f64, weyl_norm: f64, n: usize, k: usize) -> Result<f64> {
    if n < 4 {
        return Err(Error::Dimension(format!("needs n >= 4, got {n}")));
    }
    if !(ric0_norm >= 0.0 && weyl_norm >= 0.0) {
        return Err(Error::Precondition("norms must be nonnegative".into()));
    }
    let big_n = n * (n - 1) / 2;
    check_k(k, big_n)?;
    let nf = n as f64;
    let pinch = libm::sqrt(1.0 / (nf - 2.0)) * ric0_norm + weyl_norm;
    Ok(k as f64 * scalar / (nf * (nf - 1.0)) - lowest_k_coefficient(big_n, k) * pinch)
}
