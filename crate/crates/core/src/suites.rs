//! Seeded randomized drivers for the eigenvalue-sum inequalities and the
//! `Ric_k` search. Each run reports how many checks failed and the worst
//! slack seen, so callers can shard trials (seed + shard) and merge.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::bounds::{
    concentration_check, eigen_sum_subadditivity, form_degree_inequality, ky_fan_check, tuple_sum,
    zero_sum_lowest_bound, BoundCheck, EqualityCase,
};
use crate::linalg::{highest_sum, SymMatrix};
use crate::ricci_k::{ric_k_grid_min, ric_k_min, RicKOptions};
use crate::zoo::random_curvature;
use crate::{rng, Error, Result};

/// Largest sequence length drawn by the zero-sum suite (`N` for `n = 12`).
pub const ZERO_SUM_MAX_LEN: usize = 66;
/// Largest matrix size drawn by the matrix-inequality suites.
pub const MATRIX_MAX_DIM: usize = 12;
/// Grid size used by the `Ric_k` suite.
pub const RIC_K_GRID_POINTS: usize = 100_000;
/// Allowed gap between the local search and the grid minimum.
pub const RIC_K_GRID_TOL: f64 = 1e-3;
const KY_FAN_TUPLES: usize = 4;
const PERTURBATION: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ZeroSumLowest,
    Subadditivity,
    KyFan,
    Concentration,
    FormDegree,
    RicKGrid,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Self::ZeroSumLowest, Self::Subadditivity, Self::KyFan, Self::Concentration, Self::FormDegree, Self::RicKGrid];

    pub fn id(self) -> &'static str {
        match self {
            Self::ZeroSumLowest => "lemma32",
            Self::Subadditivity => "lemma31",
            Self::KyFan => "kyfan",
            Self::Concentration => "concentration",
            Self::FormDegree => "lemma44",
            Self::RicKGrid => "rick-grid",
        }
    }

    pub fn from_id(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.id() == id)
    }

    pub fn default_trials(self) -> usize {
        match self {
            Self::ZeroSumLowest => 100_000,
            Self::Subadditivity | Self::KyFan | Self::Concentration => 10_000,
            Self::FormDegree => 0,
            Self::RicKGrid => 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub checks: usize,
    pub failures: usize,
    pub worst_slack: f64,
    pub notes: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.id().into(),
            trials: 0,
            checks: 0,
            failures: 0,
            worst_slack: f64::INFINITY,
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, c: &BoundCheck) {
        self.checks += 1;
        self.worst_slack = self.worst_slack.min(c.slack);
        if !c.holds {
            self.failures += 1;
        }
    }

    /// Counts a yes/no check that carries no slack.
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.notes.len() < 8 {
                self.notes.push(what());
            }
        }
    }

    /// Combines shard reports of the same suite.
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.trials += other.trials;
        self.checks += other.checks;
        self.failures += other.failures;
        self.worst_slack = self.worst_slack.min(other.worst_slack);
        self.notes.extend(other.notes);
        self
    }
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<SuiteReport> {
    let mut r = SuiteReport::new(suite);
    r.trials = trials;
    match suite {
        Suite::ZeroSumLowest => zero_sum_suite(&mut r, trials, seed)?,
        Suite::Subadditivity | Suite::KyFan | Suite::Concentration => matrix_suite(suite, &mut r, trials, seed)?,
        Suite::FormDegree => form_degree_suite(&mut r)?,
        Suite::RicKGrid => ric_k_grid_suite(&mut r, trials, seed)?,
    }
    Ok(r)
}

/// Zero-sum sequence mixing Gaussian, integer-valued and heavy-tailed draws.
fn random_zero_sum(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let style = rng.random_range(0..3);
    let mut v: Vec<f64> = (0..n)
        .map(|_| match style {
            0 => rng::normal(rng),
            1 => rng.random_range(-5i32..=5) as f64,
            _ => {
                let g = rng::normal(rng);
                g * g * g * 10.0
            }
        })
        .collect();
    let mean = v.iter().sum::<f64>() / n as f64;
    v.iter_mut().for_each(|x| *x -= mean);
    v
}

/// `c (-(N-k), ..., -(N-k), k, ..., k)` with `k` low entries.
pub fn two_level_sequence(n: usize, k: usize, c: f64) -> Vec<f64> {
    (0..n).map(|i| if i < k { -c * (n - k) as f64 } else { c * k as f64 }).collect()
}

fn zero_sum_suite(r: &mut SuiteReport, trials: usize, seed: u64) -> Result<()> {
    let mut rng = rng::seeded(seed);
    for _ in 0..trials {
        let n = rng.random_range(1..=ZERO_SUM_MAX_LEN);
        let k = rng.random_range(1..=n);
        let a = random_zero_sum(&mut rng, n);
        r.record(&zero_sum_lowest_bound(&a, k)?);
    }
    let families = (trials / 100).max(10);
    for _ in 0..families {
        let n = rng.random_range(2..=ZERO_SUM_MAX_LEN);
        let k = rng.random_range(1..n);
        let c = libm::exp(rng.random_range(-3.0..3.0));
        let mut a = two_level_sequence(n, k, c);
        // Unsorted input must classify the same way.
        a.reverse();
        let check = zero_sum_lowest_bound(&a, k)?;
        r.record(&check);
        r.expect(check.equality_case == Some(EqualityCase::TwoLevel), || format!("two-level n={n} k={k} not detected"));
        r.expect(libm::fabs(check.slack) <= 1e-9 * (1.0 + libm::fabs(check.rhs)), || {
            format!("two-level n={n} k={k} has slack {}", check.slack)
        });

        let zero = zero_sum_lowest_bound(&vec![0.0; n], rng.random_range(1..=n))?;
        r.expect(zero.equality_case == Some(EqualityCase::AllZero), || format!("zero sequence n={n} not detected"));

        // Every zero-sum pair (-x, x) is two-level, so perturb from length 3 up.
        let n = n.max(3);
        let k = k.min(n - 1);
        let mut p = two_level_sequence(n, k, c);
        let scale = c * n as f64;
        for x in p.iter_mut() {
            *x += PERTURBATION * scale * rng::normal(&mut rng);
        }
        let mean = p.iter().sum::<f64>() / n as f64;
        p.iter_mut().for_each(|x| *x -= mean);
        let check = zero_sum_lowest_bound(&p, k)?;
        r.record(&check);
        r.expect(check.equality_case.is_none(), || format!("perturbed two-level n={n} k={k} flagged as equality"));
    }
    Ok(())
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize) -> SymMatrix {
    let scale = libm::exp(rng.random_range(-2.0..2.0));
    let raw: Vec<f64> = (0..n * n).map(|_| scale * rng::normal(rng)).collect();
    SymMatrix::from_fn(n, |i, j| 0.5 * (raw[i * n + j] + raw[j * n + i]))
}

fn matrix_suite(suite: Suite, r: &mut SuiteReport, trials: usize, seed: u64) -> Result<()> {
    let mut rng = rng::seeded(seed);
    for t in 0..trials {
        let n = rng.random_range(1..=MATRIX_MAX_DIM);
        let a = random_symmetric(&mut rng, n);
        let b = random_symmetric(&mut rng, n);
        match suite {
            Suite::Subadditivity => {
                for k in 1..=n {
                    let (lo, hi) = eigen_sum_subadditivity(&a, &b, k)?;
                    r.record(&lo);
                    r.record(&hi);
                }
            }
            Suite::KyFan => {
                let eig = a.eigen()?;
                for k in 1..=n {
                    let rep = ky_fan_check(&a, k, KY_FAN_TUPLES, seed.wrapping_add(t as u64).wrapping_mul(31).wrapping_add(k as u64))?;
                    r.record(&rep.upper);
                    r.record(&rep.lower);
                    // The top-k eigenvectors attain the maximum.
                    let top: Vec<Vec<f64>> = eig.vectors[n - k..].to_vec();
                    let s = tuple_sum(&a, &top);
                    let target = highest_sum(&eig.values, k);
                    r.record(&BoundCheck::new(s, target));
                    r.record(&BoundCheck::new(target, s));
                }
            }
            _ => {
                for m in [&a, &b] {
                    for c in concentration_check(m)? {
                        r.record(&c);
                    }
                }
            }
        }
    }
    Ok(())
}

fn form_degree_suite(r: &mut SuiteReport) -> Result<()> {
    for n in 8u32..=64 {
        for p in 1..=(n / 2 - 2) {
            let c = form_degree_inequality(n, p)?;
            r.record(&c.check);
            r.expect(c.strict_holds, || format!("n={n} p={p} fails exactly"));
        }
    }
    r.trials = r.checks / 2;
    Ok(())
}

fn ric_k_grid_suite(r: &mut SuiteReport, trials: usize, seed: u64) -> Result<()> {
    let mut rng = rng::seeded(seed);
    for t in 0..trials {
        let n = 3 + t % 2;
        let weyl = if n == 4 { rng.random_range(0.0..1.0) } else { 0.0 };
        let rm = random_curvature(n, seed.wrapping_add(t as u64), weyl, rng.random_range(0.0..1.0), rng.random_range(-3.0..3.0))?;
        let grid = ric_k_grid_min(&rm, RIC_K_GRID_POINTS)?;
        let opts = RicKOptions { seed: seed.wrapping_add(t as u64), ..Default::default() };
        for k in 1..n {
            let found = ric_k_min(&rm, k, &opts)?.value;
            let gap = grid[k - 1] - found;
            r.record(&BoundCheck::new(RIC_K_GRID_TOL, libm::fabs(gap)));
        }
    }
    Ok(())
}

/// Parses a suite name for error messages at the command line.
pub fn parse_suite(id: &str) -> Result<Suite> {
    Suite::from_id(id).ok_or_else(|| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.id()).collect();
        Error::Usage(format!("unknown suite {id:?}; expected one of {}", names.join(", ")))
    })
}
