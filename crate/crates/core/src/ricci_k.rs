//! kth-intermediate Ricci curvature.
//!
//! For a unit vector `u`, the infimum of `Σ_{i<=k} Rm(u, e_i, u, e_i)` over
//! orthonormal `e_1..e_k ⊥ u` is the sum of the `k` smallest eigenvalues of
//! `v ↦ Rm(u, v, u, ·)` on `u^⊥` (Ky Fan). The outer minimum over `u` is
//! found by multi-start projected gradient descent on the sphere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::linalg::{dot, gram_schmidt, lowest_sum, norm, SymMatrix};
use crate::tensor::CurvatureTensor;
use crate::{rng, Error, Result};

pub const DEFAULT_RESTARTS: usize = 64;
pub const DEFAULT_STEP_TOL: f64 = 1e-8;
/// Forward-difference step for the gradient.
pub const FD_STEP: f64 = 1e-5;
pub const INITIAL_STEP: f64 = 0.1;
pub const MAX_ITERATIONS: usize = 200;
const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicKOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tol: f64,
}

impl Default for RicKOptions {
    fn default() -> Self {
        Self { restarts: DEFAULT_RESTARTS, seed: 0, tol: DEFAULT_STEP_TOL }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RicKResult {
    pub k: usize,
    pub value: f64,
    pub argmin_direction: Vec<f64>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Orthonormal basis of `u^⊥`: Gram-Schmidt of `u` followed by the standard
/// axes, skipping the axis most aligned with `u`.
pub fn complement_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let drop = (0..n).max_by(|&a, &b| libm::fabs(u[a]).total_cmp(&libm::fabs(u[b]))).unwrap_or(0);
    let mut seq = vec![u.to_vec()];
    seq.extend((0..n).filter(|&j| j != drop).map(|j| {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        e
    }));
    let mut basis = gram_schmidt(&seq);
    basis.remove(0);
    basis
}

fn check_unit(rm: &CurvatureTensor, u: &[f64]) -> Result<()> {
    if u.len() != rm.dim() {
        return Err(Error::Dimension(format!("direction of length {} in dimension {}", u.len(), rm.dim())));
    }
    let len = norm(u);
    if !(libm::fabs(len - 1.0) <= UNIT_TOL) {
        return Err(Error::Precondition(format!("|u| = {len} is not 1")));
    }
    Ok(())
}

fn check_k(rm: &CurvatureTensor, k: usize) -> Result<()> {
    let n = rm.dim();
    if k == 0 || k >= n {
        return Err(Error::Range(format!("k = {k} outside 1..={}", n - 1)));
    }
    Ok(())
}

/// `w_ij = Rm(u, e_i, u, e_j)` on all of `R^n`.
fn directional_form(rm: &CurvatureTensor, u: &[f64]) -> Vec<f64> {
    let n = rm.dim();
    let mut w = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let mut s = 0.0;
            for a in 0..n {
                if u[a] == 0.0 {
                    continue;
                }
                for b in 0..n {
                    s += u[a] * u[b] * rm.get(a, i, b, j);
                }
            }
            w[i * n + j] = s;
            w[j * n + i] = s;
        }
    }
    w
}

/// Matrix of `v ↦ Rm(u, v, u, ·)` in the given orthonormal basis of `u^⊥`.
pub fn directional_operator_in(rm: &CurvatureTensor, u: &[f64], basis: &[Vec<f64>]) -> SymMatrix {
    let n = rm.dim();
    let w = directional_form(rm, u);
    let wb: Vec<Vec<f64>> = basis
        .iter()
        .map(|b| (0..n).map(|i| (0..n).map(|j| w[i * n + j] * b[j]).sum()).collect())
        .collect();
    SymMatrix::from_fn(basis.len(), |p, q| dot(&basis[p], &wb[q]))
}

pub fn directional_operator(rm: &CurvatureTensor, u: &[f64]) -> Result<SymMatrix> {
    check_unit(rm, u)?;
    Ok(directional_operator_in(rm, u, &complement_basis(u)))
}

/// Ascending eigenvalues of the directional operator; `ric_k_at(u, k)` is
/// the sum of the first `k`.
pub fn directional_eigenvalues(rm: &CurvatureTensor, u: &[f64]) -> Result<Vec<f64>> {
    directional_operator(rm, u)?.eigenvalues()
}

pub fn ric_k_at(rm: &CurvatureTensor, u: &[f64], k: usize) -> Result<f64> {
    check_k(rm, k)?;
    Ok(lowest_sum(&directional_eigenvalues(rm, u)?, k))
}

fn normalized(v: &[f64]) -> Vec<f64> {
    let len = norm(v);
    v.iter().map(|x| x / len).collect()
}

/// Flips `u` so its first non-negligible component is positive; the
/// objective is even in `u`.
fn canonical_sign(mut u: Vec<f64>) -> Vec<f64> {
    if let Some(first) = u.iter().copied().find(|x| libm::fabs(*x) > 1e-12) {
        if first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
    u
}

/// The seeded starting directions used by [`ric_k_min`].
pub fn start_directions(n: usize, restarts: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::seeded(seed);
    (0..restarts).map(|_| rng::unit_vector(&mut rng, n)).collect()
}

/// `u ↦ Σ` of the `k` smallest directional eigenvalues with reusable
/// scratch space. Uses the Householder complement of `u` rather than the
/// Gram-Schmidt one; the spectrum does not depend on the basis.
struct Objective<'a> {
    rm: &'a [f64],
    n: usize,
    k: usize,
    w: Vec<f64>,
    m: Vec<f64>,
    eig: Vec<f64>,
    v: Vec<f64>,
    p: Vec<f64>,
    unit: Vec<f64>,
}

impl<'a> Objective<'a> {
    fn new(rm: &'a CurvatureTensor, k: usize) -> Self {
        let n = rm.dim();
        Self {
            rm: rm.as_slice(),
            n,
            k,
            w: vec![0.0; n * n],
            m: vec![0.0; (n - 1) * (n - 1)],
            eig: vec![0.0; n - 1],
            v: vec![0.0; n],
            p: vec![0.0; n],
            unit: vec![0.0; n],
        }
    }

    /// Value at `x / |x|`.
    fn value(&mut self, x: &[f64]) -> Result<f64> {
        let n = self.n;
        let len = norm(x);
        for (dst, xi) in self.unit.iter_mut().zip(x) {
            *dst = xi / len;
        }
        let u = &self.unit;
        let (n2, n3) = (n * n, n * n * n);
        self.w.iter_mut().for_each(|x| *x = 0.0);
        for a in 0..n {
            for b in 0..n {
                let c = u[a] * u[b];
                if c == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let row = &self.rm[a * n3 + i * n2 + b * n..a * n3 + i * n2 + b * n + n];
                    for j in i..n {
                        self.w[i * n + j] += c * row[j];
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                self.w[i * n + j] = self.w[j * n + i];
            }
        }
        // H = I - beta v v^T with v = u + sign(u_0) e_0 maps e_0 to -sign(u_0) u,
        // so columns 1.. of H span u^⊥.
        let sign = if u[0] >= 0.0 { 1.0 } else { -1.0 };
        self.v.copy_from_slice(u);
        self.v[0] += sign;
        let beta = 2.0 / dot(&self.v, &self.v);
        for i in 0..n {
            self.p[i] = (0..n).map(|j| self.w[i * n + j] * self.v[j]).sum();
        }
        let vwv = dot(&self.v, &self.p);
        let m = n - 1;
        for i in 1..n {
            for j in 1..n {
                let (vi, vj) = (self.v[i], self.v[j]);
                self.m[(i - 1) * m + (j - 1)] = self.w[i * n + j] - beta * (vi * self.p[j] + self.p[i] * vj)
                    + beta * beta * vwv * vi * vj;
            }
        }
        crate::linalg::eigenvalues_in_place(&mut self.m, m, &mut self.eig)?;
        Ok(lowest_sum(&self.eig, self.k))
    }
}

/// One local search from `start`: forward-difference gradient of
/// `u ↦ ric_k_at(u/|u|, k)`, geodesic step against it, step halved on
/// every rejected move. Returns the final value and (sign-normalised)
/// direction.
pub fn descend(rm: &CurvatureTensor, k: usize, start: &[f64], tol: f64) -> Result<(f64, Vec<f64>)> {
    check_k(rm, k)?;
    let n = rm.dim();
    let mut obj = Objective::new(rm, k);
    let mut u = normalized(start);
    let mut f = obj.value(&u)?;
    let mut step = INITIAL_STEP;
    let mut have_grad = false;
    let mut g = vec![0.0; n];
    let mut probe = vec![0.0; n];
    let mut trial = vec![0.0; n];
    for _ in 0..MAX_ITERATIONS {
        if step < tol {
            break;
        }
        if !have_grad {
            for c in 0..n {
                probe.copy_from_slice(&u);
                probe[c] += FD_STEP;
                g[c] = (obj.value(&probe)? - f) / FD_STEP;
            }
            let radial = dot(&g, &u);
            g.iter_mut().zip(&u).for_each(|(x, ui)| *x -= radial * ui);
            let len = norm(&g);
            if !(len > 1e-14) {
                break;
            }
            g.iter_mut().for_each(|x| *x /= len);
            have_grad = true;
        }
        let (c, s) = (libm::cos(step), libm::sin(step));
        for ((t, ui), gi) in trial.iter_mut().zip(&u).zip(&g) {
            *t = ui * c - gi * s;
        }
        let ft = obj.value(&trial)?;
        if ft < f {
            u = normalized(&trial);
            f = ft;
            have_grad = false;
        } else {
            step *= 0.5;
        }
    }
    Ok((f, canonical_sign(u)))
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

/// Picks the best local result by `(value, direction)` and decides the
/// convergence flag: at least two restarts, or at least half of them,
/// within `10 tol` of the best value.
pub fn select_best(k: usize, results: Vec<(f64, Vec<f64>)>, tol: f64) -> Result<RicKResult> {
    let restarts = results.len();
    let best = results
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)))
        .cloned()
        .ok_or_else(|| Error::Usage("at least one restart is required".into()))?;
    let near = results.iter().filter(|r| r.0 <= best.0 + 10.0 * tol).count();
    Ok(RicKResult {
        k,
        value: best.0,
        argmin_direction: best.1,
        restarts_used: restarts,
        converged: near >= 2 || 2 * near >= restarts,
    })
}

/// `min_u ric_k_at(u, k)` by multi-start local search.
pub fn ric_k_min(rm: &CurvatureTensor, k: usize, opts: &RicKOptions) -> Result<RicKResult> {
    check_k(rm, k)?;
    let starts = start_directions(rm.dim(), opts.restarts, opts.seed);
    let results = starts.iter().map(|s| descend(rm, k, s, opts.tol)).collect::<Result<Vec<_>>>()?;
    select_best(k, results, opts.tol)
}

/// `max_u` of the sum of the `k` largest directional eigenvalues, computed
/// as `-min` for `-Rm`. The returned direction is the maximiser.
pub fn ric_k_max(rm: &CurvatureTensor, k: usize, opts: &RicKOptions) -> Result<RicKResult> {
    let mut r = ric_k_min(&rm.scaled(-1.0), k, opts)?;
    r.value = -r.value;
    Ok(r)
}

/// Near-uniform deterministic point sets on `S^2` (spherical Fibonacci)
/// and `S^3` (super-Fibonacci spiral).
pub fn sphere_grid(n: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let m = count as f64;
    match n {
        3 => {
            let golden = core::f64::consts::PI * (3.0 - libm::sqrt(5.0));
            Ok((0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / m;
                    let r = libm::sqrt((1.0 - z * z).max(0.0));
                    let phi = golden * i as f64;
                    vec![r * libm::cos(phi), r * libm::sin(phi), z]
                })
                .collect())
        }
        4 => {
            let tau = 2.0 * core::f64::consts::PI;
            let phi = core::f64::consts::SQRT_2;
            // Real root of psi^4 = psi + 4.
            let psi = 1.533_751_168_755_204_3;
            Ok((0..count)
                .map(|i| {
                    let s = i as f64 + 0.5;
                    let r = libm::sqrt(s / m);
                    let big_r = libm::sqrt(1.0 - s / m);
                    let alpha = tau * s / phi;
                    let beta = tau * s / psi;
                    vec![r * libm::sin(alpha), r * libm::cos(alpha), big_r * libm::sin(beta), big_r * libm::cos(beta)]
                })
                .collect())
        }
        _ => Err(Error::Dimension(format!("grid available for n = 3 and n = 4 only, got {n}"))),
    }
}

/// Brute-force `min_u ric_k_at(u, k)` over [`sphere_grid`] for every `k`
/// (`result[k - 1]`).
pub fn ric_k_grid_min(rm: &CurvatureTensor, count: usize) -> Result<Vec<f64>> {
    let n = rm.dim();
    let mut best = vec![f64::INFINITY; n - 1];
    let mut obj = Objective::new(rm, 1);
    for u in sphere_grid(n, count)? {
        obj.value(&u)?;
        let mut acc = 0.0;
        for (k, e) in obj.eig.iter().enumerate() {
            acc += e;
            if acc < best[k] {
                best[k] = acc;
            }
        }
    }
    Ok(best)
}
