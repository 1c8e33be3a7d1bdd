//! Hypothesis checks for the pinching theorems, on one tensor or on a
//! quadrature-weighted field of tensors.
//!
//! A report carries the hypothesis quantities, the threshold they are
//! compared against, the margin (positive when the strict hypothesis holds)
//! and the conclusion the theorem draws. Topological conclusions are text;
//! nothing here computes topology.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::bounds::{lowest_k_coefficient, threshold, ThresholdKind};
use crate::decompose::{orthogonal_decompose, DecomposedCurvature};
use crate::operator::{
    quasi_positive_quantity, ricci_eigenframe, schouten_pair_eigenvalues, spectrum, BivectorMatrix,
    SpectralSummary, CONFORMALLY_FLAT_TOL,
};
use crate::ricci_k::{ric_k_max, ric_k_min, RicKOptions};
use crate::tensor::{CurvatureTensor, FullNorm};
use crate::{Error, Result, DEFAULT_TOL};

pub const CONTRADICTION: &str = "paper-contradiction candidate";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize), serde(rename_all = "snake_case"))]
pub enum Verdict {
    HypothesesMet,
    NotMet,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct CertificateReport {
    pub theorem_id: String,
    pub inputs: BTreeMap<String, f64>,
    pub hypothesis_values: BTreeMap<String, f64>,
    pub threshold: f64,
    pub margin: f64,
    pub verdict: Verdict,
    pub conclusion_text: String,
    pub notes: Vec<String>,
}

impl CertificateReport {
    fn new(theorem_id: &str) -> Self {
        Self {
            theorem_id: theorem_id.to_string(),
            inputs: BTreeMap::new(),
            hypothesis_values: BTreeMap::new(),
            threshold: f64::NAN,
            margin: f64::NAN,
            verdict: Verdict::NotMet,
            conclusion_text: String::new(),
            notes: Vec::new(),
        }
    }

    fn input(&mut self, key: &str, v: f64) {
        self.inputs.insert(key.to_string(), v);
    }

    fn value(&mut self, key: &str, v: f64) {
        self.hypothesis_values.insert(key.to_string(), v);
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Sets margin/threshold and the verdict of one strict inequality.
    fn strict(&mut self, threshold: f64, margin: f64, tol: f64) {
        self.threshold = threshold;
        self.margin = margin;
        self.verdict = strict_verdict(margin, threshold, tol);
    }

    /// Forces `not_met`: a precondition outside the compared inequality failed.
    fn fail(&mut self, why: impl Into<String>) {
        self.verdict = Verdict::NotMet;
        self.note(why);
    }

    pub fn is_met(&self) -> bool {
        self.verdict == Verdict::HypothesesMet
    }

    pub fn has_contradiction_note(&self) -> bool {
        self.notes.iter().any(|n| n.starts_with(CONTRADICTION))
    }
}

/// `margin > tol (1 + |threshold|)` is met, `|margin|` within that band is
/// degenerate, anything below is not met.
pub fn strict_verdict(margin: f64, threshold: f64, tol: f64) -> Verdict {
    let band = tol * (1.0 + libm::fabs(threshold));
    if margin.is_nan() {
        Verdict::Degenerate
    } else if margin > band {
        Verdict::HypothesesMet
    } else if margin >= -band {
        Verdict::Degenerate
    } else {
        Verdict::NotMet
    }
}

/// Theorems evaluated at a single curvature tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointwiseTheorem {
    /// `sec >= a > 0` and `|W| < c(n) a` give a positive curvature operator.
    SectionalPositive,
    /// `sec <= -a < 0` and `|W| < c(n) a` give a negative curvature operator.
    SectionalNegative,
    /// `sec >= a > 0` and `|W| < sqrt(kN/(N-k)) a` give k-positivity.
    KPositive,
    /// Conformally flat: operator spectrum is `{λ_ij}` and bounds `sec`.
    ConformallyFlatSpectrum,
    /// Conformally flat: sign of `sec` (Hopf), optionally `Ric_k > 0 ⇒ k-positive`.
    ConformallyFlatSign,
    /// Conformally flat with quasi-positive `λ_1 + 2λ_2 + λ_3 - 2R/(n-2)`.
    ConformallyFlatQuasiPositive,
    /// `Ric_k - sqrt(k(N-k)/N)|W| >= ka` with a diameter bound.
    DiameterBetti,
    /// `(Ric_m - c|W|) diam^2 >= -ε(m)` in dimension `2m`.
    EulerVanishing,
}

impl PointwiseTheorem {
    pub const ALL: [PointwiseTheorem; 8] = [
        Self::SectionalPositive,
        Self::SectionalNegative,
        Self::KPositive,
        Self::ConformallyFlatSpectrum,
        Self::ConformallyFlatSign,
        Self::ConformallyFlatQuasiPositive,
        Self::DiameterBetti,
        Self::EulerVanishing,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::SectionalPositive => "thm14_pos",
            Self::SectionalNegative => "thm14_neg",
            Self::KPositive => "cor34",
            Self::ConformallyFlatSpectrum => "cor25_lcf",
            Self::ConformallyFlatSign => "thm27_lcf",
            Self::ConformallyFlatQuasiPositive => "cor28_quasipos",
            Self::DiameterBetti => "diam_betti_hyp",
            Self::EulerVanishing => "ht25_hyp",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }
}

/// Theorems over a weighted field of samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldTheorem {
    /// `(⨍|W|^{n/2})^{2/n} < sqrt(kN/(N-k)) (n-2)/n a`.
    WeylIntegral,
    /// `(∫ P^{n/2})^{2/n} < λ(g)/(n(n-1)) sqrt(Nk/(N-k))`, `n >= 8`.
    YamabeIntegral,
    /// `(∫ P^{n/2})^{2/n} < (n-2)/(n^2(n-1)) sqrt(k(N-k)/N) λ(g)`, `R > 0`.
    ScalarIntegral,
    /// Dimension 4, `Ric > 0`, `∫|W|^2 < 8π²`.
    WeylL2FourDim,
    /// `λ(g) >= n(n-1) a Vol^{2/n}` from `Ric >= (n-1)a`.
    YamabeLowerBound,
    /// Harmonic Weyl gap against `Ric_k >= ka`.
    HarmonicWeylGapRicci,
    /// Harmonic Weyl gap against the Yamabe constant.
    HarmonicWeylGapYamabe,
}

impl FieldTheorem {
    pub const ALL: [FieldTheorem; 7] = [
        Self::WeylIntegral,
        Self::YamabeIntegral,
        Self::ScalarIntegral,
        Self::WeylL2FourDim,
        Self::YamabeLowerBound,
        Self::HarmonicWeylGapRicci,
        Self::HarmonicWeylGapYamabe,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Self::WeylIntegral => "thm15",
            Self::YamabeIntegral => "thm16",
            Self::ScalarIntegral => "cor17",
            Self::WeylL2FourDim => "gb4",
            Self::YamabeLowerBound => "prop43_yamabe_lb",
            Self::HarmonicWeylGapRicci => "thm19_gap1",
            Self::HarmonicWeylGapYamabe => "thm19_gap2",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.id() == id)
    }

    /// Whether per-sample `Ric_k` minima are needed when `a` is not supplied.
    pub fn needs_ric_k(self) -> bool {
        matches!(self, Self::WeylIntegral | Self::HarmonicWeylGapRicci)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyParams {
    pub k: Option<usize>,
    /// Override for the curvature lower-bound constant `a`.
    pub a: Option<f64>,
    pub yamabe: Option<f64>,
    /// `a` in `Ric >= (n-1)a`, used to bound the Yamabe constant from below.
    pub ricci_lower: Option<f64>,
    pub harmonic_weyl: bool,
    pub diameter: Option<f64>,
    pub ric_k: RicKOptions,
    pub tol: f64,
}

impl Default for CertifyParams {
    fn default() -> Self {
        Self {
            k: None,
            a: None,
            yamabe: None,
            ricci_lower: None,
            harmonic_weyl: false,
            diameter: None,
            ric_k: RicKOptions::default(),
            tol: DEFAULT_TOL,
        }
    }
}

fn ceil_half(n: usize) -> usize {
    n.div_ceil(2)
}

fn need_k(theorem: &str, k: Option<usize>, lo: usize, hi: usize) -> Result<usize> {
    let k = k.ok_or_else(|| Error::Usage(format!("{theorem} requires k")))?;
    if k < lo || k > hi {
        return Err(Error::Usage(format!("{theorem} requires {lo} <= k <= {hi}, got {k}")));
    }
    Ok(k)
}

fn need_dim(theorem: &str, n: usize, min: usize) -> Result<()> {
    if n < min {
        return Err(Error::Dimension(format!("{theorem} requires n >= {min}, got {n}")));
    }
    Ok(())
}

/// Betti-number conclusion shared by the k-positivity results.
fn k_positive_betti_text(n: usize, k: usize) -> (String, Option<String>) {
    if k <= ceil_half(n) {
        ("b_p(M)=0 for all 1 ≤ p ≤ n−1".into(), None)
    } else if k < n {
        (format!("b_p(M)=0 for all 1 ≤ p ≤ n−k (here n−k = {})", n - k), None)
    } else {
        (String::new(), Some(format!("no Betti-number conclusion is stated for k = {k} ≥ n")))
    }
}

fn ambiguous_betti_text(n: usize, k: usize) -> (String, Option<String>) {
    if k <= ceil_half(n) {
        ("b_p(M)=0 for all 1 ≤ p ≤ n−1".into(), None)
    } else {
        (
            format!("b_1(M)=⋯=b_{{n−k}}(M) (here n−k = {})", n - k),
            Some("the stated conclusion b_1(M)=⋯=b_{n−k}(M) names no common value; reproduced as written".into()),
        )
    }
}

/// Pointwise data computed once per tensor.
struct Point<'a> {
    rm: &'a CurvatureTensor,
    n: usize,
    d: DecomposedCurvature,
    spec: SpectralSummary,
}

impl<'a> Point<'a> {
    fn new(rm: &'a CurvatureTensor) -> Result<Self> {
        let d = orthogonal_decompose(rm)?;
        let spec = spectrum(&BivectorMatrix::of_tensor(rm))?;
        Ok(Self { rm, n: rm.dim(), d, spec })
    }

    fn weyl_norm(&self) -> f64 {
        self.d.weyl.full_norm()
    }

    fn conformally_flat(&self) -> (bool, f64, f64) {
        let w2 = self.d.weyl_norm_sq();
        let tol = CONFORMALLY_FLAT_TOL * (1.0 + self.rm.full_norm_sq());
        (w2 < tol, w2, tol)
    }
}

/// Resolves `a` for `sec >= a` (or `sec <= -a` when `negative`).
/// Returns `a` and whether the sectional-curvature hypothesis holds with it.
fn sectional_constant(p: &Point, params: &CertifyParams, negative: bool, r: &mut CertificateReport) -> Result<(f64, bool)> {
    let computed = if negative {
        -ric_k_max(p.rm, 1, &params.ric_k)?.value
    } else {
        ric_k_min(p.rm, 1, &params.ric_k)?.value
    };
    let key = if negative { "sectional_max" } else { "sectional_min" };
    r.value(key, if negative { -computed } else { computed });
    let mut holds = true;
    let a = match params.a {
        Some(a) => {
            r.note(format!("a = {a} supplied by the user (computed bound {computed})"));
            if a > computed + params.tol * (1.0 + libm::fabs(computed)) {
                holds = false;
                r.note(if negative {
                    format!("sec <= -a fails: maximal sectional curvature {} exceeds -a", -computed)
                } else {
                    format!("sec >= a fails: minimal sectional curvature {computed} is below a")
                });
            }
            a
        }
        None => {
            r.note(format!(
                "a computed by multi-start search ({} restarts, seed {}); global optimality is not certified",
                params.ric_k.restarts, params.ric_k.seed
            ));
            computed
        }
    };
    r.input("a", a);
    Ok((a, holds))
}

fn degenerate_if_nonpositive(a: f64, r: &mut CertificateReport, what: &str) -> bool {
    if a <= 0.0 {
        r.verdict = Verdict::Degenerate;
        r.note(format!("{what} = {a} is not positive; the theorem needs a > 0"));
        true
    } else {
        false
    }
}

pub fn certify_pointwise(rm: &CurvatureTensor, theorem: PointwiseTheorem, params: &CertifyParams) -> Result<CertificateReport> {
    let p = Point::new(rm)?;
    let n = p.n;
    let big_n = n * (n - 1) / 2;
    let mut r = CertificateReport::new(theorem.id());
    r.input("n", n as f64);
    let tol = params.tol;
    match theorem {
        PointwiseTheorem::SectionalPositive | PointwiseTheorem::SectionalNegative => {
            need_dim(theorem.id(), n, 4)?;
            let negative = theorem == PointwiseTheorem::SectionalNegative;
            let coeff = threshold(ThresholdKind::SectionalWeyl, n, 1)?;
            r.value("threshold_coefficient", coeff);
            if n % 2 == 0 && n / 2 >= 3 {
                let alt = threshold(ThresholdKind::SectionalWeylHalfDim, n / 2, 1)?;
                r.value("threshold_coefficient_halfdim_reading", alt);
                r.note(format!(
                    "the printed constant reads n as half the dimension in the statement; that reading gives {alt} \
                     instead of {coeff} and does not match the k = 1 case it is derived from"
                ));
            } else if n == 4 {
                r.note("reading n as half the dimension (n = 2) makes the printed constant divide by zero; the manifold-dimension reading is used");
            }
            if n % 2 == 1 {
                r.note("the theorem is stated for even dimension; the operator sign conclusion still follows for odd n");
            }
            let (a, holds) = sectional_constant(&p, params, negative, &mut r)?;
            let w = p.weyl_norm();
            r.value("weyl_norm", w);
            let thr = coeff * a;
            r.strict(thr, thr - w, tol);
            if !holds {
                r.verdict = Verdict::NotMet;
            }
            degenerate_if_nonpositive(a, &mut r, "a");
            if negative {
                let mu_n = p.spec.max();
                r.value("mu_max", mu_n);
                r.conclusion_text = "the curvature operator is negative; (−1)^n χ(M) > 0 (n = half the dimension)".into();
                if r.is_met() && !(mu_n < 0.0) {
                    r.note(format!("{CONTRADICTION}: hypotheses met but μ_N = {mu_n} is not negative"));
                }
            } else {
                let mu_1 = p.spec.min();
                r.value("mu_1", mu_1);
                r.conclusion_text = "the curvature operator is positive; χ(M) > 0".into();
                if r.is_met() && !(mu_1 > 0.0) {
                    r.note(format!("{CONTRADICTION}: hypotheses met but μ_1 = {mu_1} is not positive"));
                }
            }
        }
        PointwiseTheorem::KPositive => {
            need_dim(theorem.id(), n, 4)?;
            let k = need_k(theorem.id(), params.k, 1, big_n - 1)?;
            r.input("k", k as f64);
            let coeff = threshold(ThresholdKind::KPositiveWeyl, n, k)?;
            r.value("threshold_coefficient", coeff);
            let (a, holds) = sectional_constant(&p, params, false, &mut r)?;
            let w = p.weyl_norm();
            r.value("weyl_norm", w);
            let thr = coeff * a;
            r.strict(thr, thr - w, tol);
            if !holds {
                r.verdict = Verdict::NotMet;
            }
            degenerate_if_nonpositive(a, &mut r, "a");
            let s = p.spec.lowest_sum(k);
            r.value("eigen_sum_lowest_k", s);
            let (betti, extra) = k_positive_betti_text(n, k);
            r.conclusion_text = if betti.is_empty() {
                "the curvature operator is k-positive".into()
            } else {
                format!("the curvature operator is k-positive; {betti}")
            };
            if let Some(e) = extra {
                r.note(e);
            }
            if r.is_met() && !(s > 0.0) {
                r.note(format!("{CONTRADICTION}: hypotheses met but μ_1+…+μ_k = {s} is not positive"));
            }
        }
        PointwiseTheorem::ConformallyFlatSpectrum => {
            let (flat, w2, wtol) = p.conformally_flat();
            r.value("weyl_norm_sq", w2);
            let (_, ric_eig) = ricci_eigenframe(&p.d.ricci)?;
            let pairs = schouten_pair_eigenvalues(&ric_eig, p.d.scalar);
            let lo = pairs.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = pairs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            r.value("pair_eigenvalue_min", lo);
            r.value("pair_eigenvalue_max", hi);
            r.value("mu_1", p.spec.min());
            r.value("mu_max", p.spec.max());
            r.strict(wtol, wtol - w2, 0.0);
            if !flat {
                r.verdict = Verdict::NotMet;
                r.note("the Weyl tensor is above the conformal-flatness tolerance");
            } else {
                r.verdict = Verdict::HypothesesMet;
                let mut sorted = pairs.clone();
                sorted.sort_by(f64::total_cmp);
                let gap = sorted.iter().zip(&p.spec.eigenvalues).map(|(a, b)| libm::fabs(a - b)).fold(0.0, f64::max);
                r.value("spectrum_vs_pair_eigenvalues", gap);
                if gap > 1e-8 * (1.0 + p.rm.max_abs()) {
                    r.note(format!("{CONTRADICTION}: operator spectrum differs from the λ_ij list by {gap}"));
                }
            }
            r.conclusion_text = format!(
                "the curvature operator has eigenvalues λ_ij = (λ_i+λ_j−R/(n−1))/(n−2) and sec ∈ [{lo}, {hi}]"
            );
        }
        PointwiseTheorem::ConformallyFlatSign => {
            need_dim(theorem.id(), n, 4)?;
            let (flat, w2, _) = p.conformally_flat();
            r.value("weyl_norm_sq", w2);
            if let Some(k) = params.k {
                let k = need_k(theorem.id(), Some(k), 1, n - 1)?;
                r.input("k", k as f64);
                let ric = ric_k_min(rm, k, &params.ric_k)?;
                r.value("ric_k_min", ric.value);
                let s = p.spec.lowest_sum(k);
                r.value("eigen_sum_lowest_k", s);
                r.strict(0.0, ric.value, tol);
                let (betti, extra) = ambiguous_betti_text(n, k);
                r.conclusion_text = format!("the curvature operator is k-positive; {betti}");
                if let Some(e) = extra {
                    r.note(e);
                }
                if !flat {
                    r.fail("the Weyl tensor is above the conformal-flatness tolerance");
                }
                if r.is_met() && !(s > 0.0) {
                    r.note(format!(
                        "{CONTRADICTION}: conformally flat with Ric_k = {} > 0 but μ_1+…+μ_k = {s} is not positive",
                        ric.value
                    ));
                }
            } else {
                let lo = p.spec.min();
                let hi = p.spec.max();
                r.value("sectional_lower_bound", lo);
                r.value("sectional_upper_bound", hi);
                let (margin, text) = if lo > 0.0 || lo >= -hi {
                    (lo, "sec > 0, so χ(M) > 0")
                } else {
                    (-hi, "sec < 0, so (−1)^{n/2} χ(M) > 0")
                };
                r.strict(0.0, margin, tol);
                r.conclusion_text = text.into();
                if n % 2 == 1 {
                    r.note("the Hopf conjecture concerns even dimension; n is odd");
                }
                if !flat {
                    r.fail("the Weyl tensor is above the conformal-flatness tolerance");
                }
            }
        }
        PointwiseTheorem::ConformallyFlatQuasiPositive => {
            let (flat, w2, _) = p.conformally_flat();
            r.value("weyl_norm_sq", w2);
            let (_, ric_eig) = ricci_eigenframe(&p.d.ricci)?;
            let q = quasi_positive_quantity(&ric_eig, p.d.scalar, n)?;
            r.value("quasi_positive_quantity", q);
            r.strict(0.0, q, tol);
            if r.verdict == Verdict::Degenerate {
                r.note("the quantity vanishes here; quasi-positivity needs it nonnegative everywhere and positive somewhere");
            }
            r.note("quasi-positivity is a global condition; this report evaluates one point");
            r.conclusion_text = if n == 4 || n == 6 {
                "M is diffeomorphic to a spherical space form; (M,g) is conformally equivalent to the sphere with its canonical metric".into()
            } else {
                "M is diffeomorphic to a spherical space form".into()
            };
            if !flat {
                r.fail("the Weyl tensor is above the conformal-flatness tolerance");
            }
        }
        PointwiseTheorem::DiameterBetti => {
            need_dim(theorem.id(), n, 4)?;
            let k = need_k(theorem.id(), params.k, ceil_half(n), n - 1)?;
            r.input("k", k as f64);
            let ric = ric_k_min(rm, k, &params.ric_k)?;
            let c = lowest_k_coefficient(big_n, k);
            let w = p.weyl_norm();
            let q = ric.value - c * w;
            r.value("ric_k_min", ric.value);
            r.value("weyl_norm", w);
            r.value("pinched_ric_k", q);
            let a = params.a.unwrap_or(q / k as f64);
            if params.a.is_none() {
                r.note("a set to (Ric_k − sqrt(k(N−k)/N)|W|)/k, the largest constant the hypothesis allows");
            }
            r.input("a", a);
            let margin = q - k as f64 * a;
            r.threshold = k as f64 * a;
            r.margin = margin;
            r.verdict = if margin >= -tol * (1.0 + libm::fabs(r.threshold)) { Verdict::HypothesesMet } else { Verdict::NotMet };
            if let Some(dm) = params.diameter {
                r.input("diameter", dm);
                r.value("a_diameter_sq", a * dm * dm);
            }
            let mut text = format!(
                "b_p(M) ≤ C(n,p)·exp(C(n,aD²)·sqrt(−aD²p(n−p))) for all 1 ≤ p ≤ n−k (here n−k = {}); C(n,aD²) is not explicit",
                n - k
            );
            if a >= 0.0 {
                text.push_str("; since a ≥ 0, b_p(M) ≤ C(n,p)");
                for pdeg in 1..=(n - k) {
                    r.value(&format!("binomial_bound_p{pdeg}"), binomial(n, pdeg));
                }
            } else {
                r.note("a < 0: the effective bound needs aD² ≥ −ε(n) with ε(n) not explicit");
            }
            r.conclusion_text = text;
            // The argument passes through the average of the lowest n−p eigenvalues.
            for pdeg in 1..=(n - k) {
                let avg = p.spec.lowest_sum(n - pdeg) / (n - pdeg) as f64;
                if avg < a - tol * (1.0 + libm::fabs(a)) {
                    r.note(format!(
                        "{CONTRADICTION}: (μ_1+…+μ_{{n−p}})/(n−p) = {avg} < a = {a} at p = {pdeg}, against the stated chain"
                    ));
                }
            }
        }
        PointwiseTheorem::EulerVanishing => {
            if n % 2 == 1 || n < 4 {
                return Err(Error::Dimension(format!("{} requires even n >= 4, got {n}", theorem.id())));
            }
            let m = n / 2;
            r.input("k", m as f64);
            let ric = ric_k_min(rm, m, &params.ric_k)?;
            let w = p.weyl_norm();
            let c = lowest_k_coefficient(big_n, m);
            let mf = m as f64;
            let printed = mf * (mf - 3.0) / (mf - 1.0);
            r.value("ric_k_min", ric.value);
            r.value("weyl_norm", w);
            r.value("coefficient", c);
            if printed >= 0.0 {
                let pc = libm::sqrt(printed);
                r.value("printed_coefficient", pc);
                r.value("printed_quantity", ric.value - pc * w);
            }
            r.note(format!(
                "the printed coefficient sqrt(m(m−3)/(m−1)) (here m = {m}) differs from sqrt(k(N−k)/N) = {c} at k = m \
                 that the eigenvalue estimate supplies; the latter is used for the verdict"
            ));
            let dsq = params.diameter.map(|d| d * d).unwrap_or(1.0);
            if let Some(dm) = params.diameter {
                r.input("diameter", dm);
            } else {
                r.note("no diameter supplied; diam² taken as 1");
            }
            let q = (ric.value - c * w) * dsq;
            r.value("pinched_quantity", q);
            r.threshold = 0.0;
            r.margin = q;
            if q >= -tol {
                r.verdict = Verdict::HypothesesMet;
            } else {
                r.verdict = Verdict::Degenerate;
                r.note("negative quantity: whether it exceeds −ε(n) cannot be decided because ε(n) is not explicit");
            }
            r.note("b_1(M) ≥ 1 is a topological hypothesis and is assumed");
            r.conclusion_text = "χ(M)=0".into();
            let s = p.spec.lowest_sum(m);
            r.value("eigen_sum_lowest_m", s);
            if s < ric.value - c * w - tol * (1.0 + libm::fabs(ric.value)) {
                r.note(format!(
                    "{CONTRADICTION}: μ_1+…+μ_m = {s} is below Ric_m − c|W| = {}, against the stated estimate",
                    ric.value - c * w
                ));
            }
        }
    }
    Ok(r)
}

fn binomial(n: usize, p: usize) -> f64 {
    (0..p).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Weighted samples of one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureField {
    dim: usize,
    samples: Vec<(f64, CurvatureTensor)>,
}

impl CurvatureField {
    pub fn new(samples: Vec<(f64, CurvatureTensor)>) -> Result<Self> {
        let dim = samples.first().ok_or(Error::EmptyField)?.1.dim();
        for (i, (w, t)) in samples.iter().enumerate() {
            if t.dim() != dim {
                return Err(Error::Dimension(format!("sample {i} has dimension {} but sample 0 has {dim}", t.dim())));
            }
            if !(*w > 0.0 && w.is_finite()) {
                return Err(Error::Validation(format!("sample {i} has non-positive weight {w}")));
            }
        }
        Ok(Self { dim, samples })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn samples(&self) -> &[(f64, CurvatureTensor)] {
        &self.samples
    }

    pub fn total_volume(&self) -> f64 {
        self.samples.iter().map(|s| s.0).sum()
    }

    /// Homothety `g ↦ c g`: curvature components scale by `1/c`, volume
    /// elements by `c^{n/2}`.
    pub fn rescaled(&self, c: f64) -> Self {
        let wscale = libm::pow(c, self.dim as f64 / 2.0);
        Self {
            dim: self.dim,
            samples: self.samples.iter().map(|(w, t)| (w * wscale, t.scaled(1.0 / c))).collect(),
        }
    }
}

/// `(Σ w_s q_s^p)^{1/p}`.
pub fn weighted_lp_norm(weights: &[f64], values: &[f64], p: f64) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptyField);
    }
    if !(p >= 1.0) {
        return Err(Error::Range(format!("p = {p} must be >= 1")));
    }
    let s: f64 = weights.iter().zip(values).map(|(w, q)| w * libm::pow(libm::fabs(*q), p)).sum();
    Ok(libm::pow(s, 1.0 / p))
}

/// `(Σ w_s q(T_s)^p)^{1/p}`; with `p = n/2` this is the `(∫ q^{n/2})^{2/n}`
/// of the integral pinching conditions.
pub fn lp_norm(field: &CurvatureField, quantity: impl Fn(&CurvatureTensor) -> f64, p: f64) -> Result<f64> {
    let w: Vec<f64> = field.samples.iter().map(|s| s.0).collect();
    let q: Vec<f64> = field.samples.iter().map(|s| quantity(&s.1)).collect();
    weighted_lp_norm(&w, &q, p)
}

/// Everything the field theorems read from one sample.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SampleSummary {
    pub weight: f64,
    pub dim: usize,
    pub norm_sq: f64,
    pub scalar: f64,
    pub weyl_norm: f64,
    pub traceless_ricci_norm: f64,
    /// `sqrt(1/(n-2))|Ric°| + |W|`.
    pub pinching: f64,
    pub ricci_min: f64,
    /// `min_u Ric_k(u)` when requested.
    pub ric_k_min: Option<f64>,
    pub ric_k_converged: Option<bool>,
}

pub fn summarize_sample(rm: &CurvatureTensor, weight: f64, k: Option<usize>, opts: &RicKOptions) -> Result<SampleSummary> {
    let d = orthogonal_decompose(rm)?;
    let ricci_min = d.ricci.matrix().eigenvalues()?[0];
    let ric = k.map(|k| ric_k_min(rm, k, opts)).transpose()?;
    Ok(SampleSummary {
        weight,
        dim: rm.dim(),
        norm_sq: rm.full_norm_sq(),
        scalar: d.scalar,
        weyl_norm: d.weyl.full_norm(),
        traceless_ricci_norm: d.traceless_ricci.full_norm(),
        pinching: d.pinching_quantity(),
        ricci_min,
        ric_k_min: ric.as_ref().map(|r| r.value),
        ric_k_converged: ric.as_ref().map(|r| r.converged),
    })
}

/// Which `k` (if any) [`summarize_sample`] must evaluate `Ric_k` for.
pub fn required_ric_k(theorem: FieldTheorem, params: &CertifyParams) -> Option<usize> {
    if theorem.needs_ric_k() && params.a.is_none() {
        params.k
    } else {
        None
    }
}

/// Sequential convenience wrapper: sample `i` uses seed `seed + i`.
pub fn certify_field(field: &CurvatureField, theorem: FieldTheorem, params: &CertifyParams) -> Result<CertificateReport> {
    let k = required_ric_k(theorem, params);
    let summaries = field
        .samples
        .iter()
        .enumerate()
        .map(|(i, (w, t))| {
            let opts = RicKOptions { seed: params.ric_k.seed.wrapping_add(i as u64), ..params.ric_k };
            summarize_sample(t, *w, k, &opts)
        })
        .collect::<Result<Vec<_>>>()?;
    certify_summaries(&summaries, theorem, params)
}

/// Volume of the unit round `S^n`: `2π^{(n+1)/2} / Γ((n+1)/2)`.
pub fn sphere_volume(n: usize) -> f64 {
    let h = (n as f64 + 1.0) / 2.0;
    2.0 * libm::pow(PI, h) / libm::tgamma(h)
}

/// `n(n-1) a Vol^{2/n}`, the Yamabe lower bound under `Ric >= (n-1)a`.
pub fn yamabe_lower_bound(n: usize, a: f64, volume: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension(format!("needs n >= 3, got {n}")));
    }
    if !(a > 0.0 && volume > 0.0) {
        return Err(Error::Range(format!("a = {a} and volume = {volume} must be positive")));
    }
    let nf = n as f64;
    Ok(nf * (nf - 1.0) * a * libm::pow(volume, 2.0 / nf))
}

/// `[a Vol]^{2/n} <= λ(g)/(n(n-1)) <= [Vol(S^n)]^{2/n}`, as `(lower,
/// middle, upper)`; `middle` only when a Yamabe constant is known.
pub fn yamabe_chain(n: usize, a: f64, volume: f64, yamabe: Option<f64>) -> Result<(f64, Option<f64>, f64)> {
    yamabe_lower_bound(n, a, volume)?;
    let nf = n as f64;
    Ok((
        libm::pow(a * volume, 2.0 / nf),
        yamabe.map(|l| l / (nf * (nf - 1.0))),
        libm::pow(sphere_volume(n), 2.0 / nf),
    ))
}

fn field_dim(samples: &[SampleSummary]) -> Result<usize> {
    let n = samples.first().ok_or(Error::EmptyField)?.dim;
    if let Some(s) = samples.iter().find(|s| s.dim != n) {
        return Err(Error::Dimension(format!("mixed dimensions {n} and {}", s.dim)));
    }
    Ok(n)
}

/// `a = min_s Ric_k(s)/k` unless supplied.
fn field_ric_k_constant(samples: &[SampleSummary], k: usize, params: &CertifyParams, r: &mut CertificateReport) -> Result<(f64, bool)> {
    let computed = samples
        .iter()
        .map(|s| s.ric_k_min.map(|v| v / k as f64))
        .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)));
    if let Some(c) = computed {
        r.value("ric_k_over_k_min", c);
        if samples.iter().any(|s| s.ric_k_converged == Some(false)) {
            r.note("Ric_k search did not report convergence on every sample");
        }
    }
    let mut holds = true;
    let a = match (params.a, computed) {
        (Some(a), c) => {
            r.note(match c {
                Some(c) => format!("a = {a} supplied by the user (computed min Ric_k/k = {c})"),
                None => format!("a = {a} supplied by the user"),
            });
            if let Some(c) = c {
                if a > c + params.tol * (1.0 + libm::fabs(c)) {
                    holds = false;
                    r.note(format!("Ric_k >= ka fails: computed min Ric_k/k = {c} is below a"));
                }
            }
            a
        }
        (None, Some(c)) => {
            r.note(format!(
                "a computed as min over samples of Ric_k/k ({} restarts, seed {} + sample index)",
                params.ric_k.restarts, params.ric_k.seed
            ));
            c
        }
        (None, None) => return Err(Error::Usage("Ric_k values were not computed and no a was supplied".into())),
    };
    r.input("a", a);
    Ok((a, holds))
}

/// Yamabe constant: supplied, or bounded below from a Ricci lower bound.
/// Returns the constant and whether the Ricci bound it came from holds.
fn field_yamabe(n: usize, volume: f64, samples: &[SampleSummary], params: &CertifyParams, r: &mut CertificateReport) -> Result<(f64, bool)> {
    if let Some(l) = params.yamabe {
        r.input("yamabe", l);
        r.note("Yamabe constant supplied by the user");
        return Ok((l, true));
    }
    let a = params.ricci_lower.ok_or_else(|| {
        Error::Usage(format!("{} needs a Yamabe constant or a Ricci lower bound", r.theorem_id))
    })?;
    r.input("ricci_lower", a);
    let observed = samples.iter().map(|s| s.ricci_min).fold(f64::INFINITY, f64::min) / (n as f64 - 1.0);
    r.value("ricci_min_over_n_minus_1", observed);
    let holds = a <= observed + params.tol * (1.0 + libm::fabs(observed));
    if !holds {
        r.note(format!("Ric >= (n−1)a fails on the samples: observed min Ric/(n−1) = {observed}"));
    }
    let l = if a > 0.0 { yamabe_lower_bound(n, a, volume)? } else { 0.0 };
    r.value("yamabe_lower_bound", l);
    r.note("Yamabe constant replaced by its lower bound n(n−1)a Vol^{2/n}");
    Ok((l, holds))
}

fn weyl_vanishes(samples: &[SampleSummary]) -> (bool, f64) {
    let worst = samples.iter().map(|s| s.weyl_norm).fold(0.0, f64::max);
    let flat = samples.iter().all(|s| s.weyl_norm * s.weyl_norm < CONFORMALLY_FLAT_TOL * (1.0 + s.norm_sq));
    (flat, worst)
}

fn gap_cross_check(samples: &[SampleSummary], r: &mut CertificateReport) {
    let (flat, worst) = weyl_vanishes(samples);
    r.value("max_weyl_norm", worst);
    if r.is_met() && !flat {
        r.note(format!("{CONTRADICTION}: the theorem concludes W ≡ 0 but max |W| over samples is {worst}"));
    }
}

/// Field theorems from precomputed per-sample summaries.
pub fn certify_summaries(samples: &[SampleSummary], theorem: FieldTheorem, params: &CertifyParams) -> Result<CertificateReport> {
    let n = field_dim(samples)?;
    let nf = n as f64;
    let tol = params.tol;
    let weights: Vec<f64> = samples.iter().map(|s| s.weight).collect();
    let volume: f64 = weights.iter().sum();
    let mut r = CertificateReport::new(theorem.id());
    r.input("n", nf);
    r.input("samples", samples.len() as f64);
    r.input("volume", volume);
    let weyl: Vec<f64> = samples.iter().map(|s| s.weyl_norm).collect();
    let pinch: Vec<f64> = samples.iter().map(|s| s.pinching).collect();
    let vol_2n = libm::pow(volume, 2.0 / nf);

    match theorem {
        FieldTheorem::WeylIntegral | FieldTheorem::HarmonicWeylGapRicci => {
            let gap = theorem == FieldTheorem::HarmonicWeylGapRicci;
            let (kind, lo_n, k_hi) = if gap {
                (ThresholdKind::HarmonicWeylGapRicci, 4, (n.max(1) - 1) / 2)
            } else {
                (ThresholdKind::WeylIntegral, 3, n - 1)
            };
            if gap && !params.harmonic_weyl {
                return Err(Error::Usage(format!("{} requires the harmonic-Weyl assertion", theorem.id())));
            }
            need_dim(theorem.id(), n, lo_n)?;
            let k = need_k(theorem.id(), params.k, 1, k_hi)?;
            r.input("k", k as f64);
            let coeff = threshold(kind, n, k)?;
            r.value("threshold_coefficient", coeff);
            let (a, holds) = field_ric_k_constant(samples, k, params, &mut r)?;
            let lhs = weighted_lp_norm(&weights, &weyl, nf / 2.0)?;
            r.value("weyl_lp_norm", lhs);
            r.value("normalized_weyl_lp_norm", lhs / vol_2n);
            r.note(
                "compared as (∫|W|^{n/2})^{2/n} < coefficient·a·Vol^{2/n}, equivalent to the volume-normalized form \
                 and unchanged by homotheties on both sides",
            );
            let thr = coeff * a * vol_2n;
            r.strict(thr, thr - lhs, tol);
            if !holds {
                r.verdict = Verdict::NotMet;
            }
            degenerate_if_nonpositive(a, &mut r, "a");
            if gap {
                r.note("harmonic Weyl curvature is a user assertion and is not verified");
                r.conclusion_text = "W ≡ 0 (the Weyl tensor vanishes identically)".into();
                gap_cross_check(samples, &mut r);
            } else {
                let (betti, extra) = ambiguous_betti_text(n, k);
                r.conclusion_text = betti;
                if let Some(e) = extra {
                    r.note(e);
                }
            }
        }
        FieldTheorem::YamabeIntegral | FieldTheorem::ScalarIntegral | FieldTheorem::HarmonicWeylGapYamabe => {
            let (kind, lo_n) = match theorem {
                FieldTheorem::YamabeIntegral => (ThresholdKind::YamabeIntegral, 8),
                FieldTheorem::ScalarIntegral => (ThresholdKind::ScalarIntegral, 4),
                _ => (ThresholdKind::HarmonicWeylGapYamabe, 8),
            };
            let gap = theorem == FieldTheorem::HarmonicWeylGapYamabe;
            if gap && !params.harmonic_weyl {
                return Err(Error::Usage(format!("{} requires the harmonic-Weyl assertion", theorem.id())));
            }
            if params.yamabe.is_none() && params.ricci_lower.is_none() {
                return Err(Error::Usage(format!("{} needs a Yamabe constant or a Ricci lower bound", theorem.id())));
            }
            need_dim(theorem.id(), n, lo_n)?;
            let k = if gap { 1 } else { need_k(theorem.id(), params.k, 1, n - 1)? };
            if !gap {
                r.input("k", k as f64);
            }
            let coeff = threshold(kind, n, k)?;
            r.value("threshold_coefficient", coeff);
            let (l, holds) = field_yamabe(n, volume, samples, params, &mut r)?;
            let lhs = weighted_lp_norm(&weights, &pinch, nf / 2.0)?;
            r.value("pinching_lp_norm", lhs);
            let thr = coeff * l;
            r.strict(thr, thr - lhs, tol);
            if !holds {
                r.verdict = Verdict::NotMet;
            }
            if l <= 0.0 {
                r.verdict = Verdict::Degenerate;
                r.note("the theorem needs a positive Yamabe constant");
            }
            let half = ceil_half(n);
            match theorem {
                FieldTheorem::YamabeIntegral => {
                    let top = half.saturating_sub(2);
                    r.conclusion_text = if k <= half {
                        format!("b_p(M)=0 for all 1 ≤ p ≤ ⌈n/2⌉−2 (here p ≤ {top})")
                    } else {
                        format!("b_p(M)=0 for all 1 ≤ p ≤ min{{⌈n/2⌉−2, n−k}} (here p ≤ {})", top.min(n - k))
                    };
                }
                FieldTheorem::ScalarIntegral => {
                    let rmin = samples.iter().map(|s| s.scalar).fold(f64::INFINITY, f64::min);
                    r.value("scalar_min", rmin);
                    if !(rmin > 0.0) {
                        r.fail(format!("positive scalar curvature fails: min R over samples is {rmin}"));
                    }
                    r.conclusion_text = if k <= half + 1 {
                        "b_p(M)=0 for all 1 ≤ p ≤ n−1".into()
                    } else {
                        format!("b_p(M)=0 for all 1 ≤ p ≤ n−k (here n−k = {})", n - k)
                    };
                }
                _ => {
                    r.note("harmonic Weyl curvature is a user assertion and is not verified");
                    r.conclusion_text = "W ≡ 0 (the Weyl tensor vanishes identically)".into();
                    gap_cross_check(samples, &mut r);
                }
            }
        }
        FieldTheorem::WeylL2FourDim => {
            if n != 4 {
                return Err(Error::Dimension(format!("gb4 is a dimension-4 statement, got n = {n}")));
            }
            let lhs: f64 = samples.iter().map(|s| s.weight * s.weyl_norm * s.weyl_norm).sum();
            r.value("weyl_l2_norm_sq", lhs);
            let thr = threshold(ThresholdKind::WeylL2FourDim, 4, 0)?;
            r.strict(thr, thr - lhs, tol);
            let rmin = samples.iter().map(|s| s.ricci_min).fold(f64::INFINITY, f64::min);
            r.value("ricci_min", rmin);
            if !(rmin > tol) {
                r.fail(format!("positive Ricci curvature fails: min Ricci eigenvalue over samples is {rmin}"));
            }
            r.conclusion_text = "χ(M)=2".into();
        }
        FieldTheorem::YamabeLowerBound => {
            need_dim(theorem.id(), n, 3)?;
            let observed = samples.iter().map(|s| s.ricci_min).fold(f64::INFINITY, f64::min) / (nf - 1.0);
            r.value("ricci_min_over_n_minus_1", observed);
            let supplied = params.a.or(params.ricci_lower);
            let a = supplied.unwrap_or(observed);
            let holds = a <= observed + tol * (1.0 + libm::fabs(observed));
            if supplied.is_some() {
                r.note(format!("a = {a} supplied by the user (observed min Ric/(n−1) = {observed})"));
                if !holds {
                    r.note("Ric >= (n−1)a fails on the samples");
                }
            }
            r.input("a", a);
            r.conclusion_text = "λ(g) ≥ n(n−1)a[Vol(g)]^{2/n}".into();
            if a <= 0.0 {
                r.threshold = 0.0;
                r.margin = a;
                r.verdict = Verdict::Degenerate;
                r.note("a is not positive; the bound is vacuous");
                return Ok(r);
            }
            let bound = yamabe_lower_bound(n, a, volume)?;
            let (lo, mid, hi) = yamabe_chain(n, a, volume, params.yamabe)?;
            r.value("chain_lower", lo);
            r.value("chain_upper_sphere", hi);
            r.threshold = bound;
            match params.yamabe {
                Some(l) => {
                    r.input("yamabe", l);
                    r.margin = l - bound;
                    r.verdict = if r.margin >= -tol * (1.0 + bound) { Verdict::HypothesesMet } else { Verdict::NotMet };
                    if r.verdict == Verdict::NotMet {
                        r.note("the supplied Yamabe constant is below the lower bound");
                    }
                    if let Some(m) = mid {
                        r.value("chain_middle", m);
                        if m > hi * (1.0 + tol) {
                            r.note("λ(g)/(n(n−1)) exceeds [Vol(S^n)]^{2/n}; no metric has such a Yamabe constant");
                        }
                    }
                }
                None => {
                    r.margin = bound;
                    r.verdict = Verdict::HypothesesMet;
                }
            }
            if !holds {
                r.verdict = Verdict::NotMet;
            }
            if lo > hi * (1.0 + tol) {
                r.note("[a·Vol]^{2/n} exceeds [Vol(S^n)]^{2/n}; the samples violate volume comparison for this a");
            }
        }
    }
    Ok(r)
}
