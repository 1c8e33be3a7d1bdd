//! Acceptance run: one PASS/FAIL line per criterion with its runtime.
//!
//! Exits nonzero if any criterion fails other than those listed in
//! `KNOWN_FAILURES`; set `ACCEPTANCE_STRICT=1` to fail on those too.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use curvop_core::bounds::{
    form_degree_inequality, ric_k_weyl_bounds, scalar_pinching_lower_bound, threshold, ThresholdKind,
};
use curvop_core::certify::{
    certify_field, certify_pointwise, CertifyParams, CurvatureField, FieldTheorem, PointwiseTheorem, Verdict,
};
use curvop_core::linalg::lowest_sum;
use curvop_core::operator::{ricci_frame_blocks, spectrum};
use curvop_core::ricci_k::{ric_k_grid_min, ric_k_max, ric_k_min, RicKOptions};
use curvop_core::suites::{run_suite, Suite};
use curvop_core::tensor::FullNorm;
use curvop_core::zoo::{product, random_curvature, space_form};
use curvop_core::{orthogonal_decompose, BivectorMatrix, CurvatureTensor, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

/// The eigenvalue-sum lower bound from a `Ric_k >= ka` hypothesis is false
/// for conformally flat tensors with k >= 3 (e.g. `S⊙g`, `S = diag(0,0,0,1)`),
/// so criterion 6 cannot reach zero violations.
const KNOWN_FAILURES: &[u32] = &[6];

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1_space_forms() -> Outcome {
    let mut checked = 0;
    for n in 3..=8 {
        for c in [1.0, -0.5, 2.5, 0.0] {
            let rm = space_form(n, c).map_err(|e| e.to_string())?;
            let s = spectrum(&BivectorMatrix::of_tensor(&rm)).map_err(|e| e.to_string())?;
            let worst = s.eigenvalues.iter().map(|e| (e - c).abs()).fold(0.0, f64::max);
            ensure(worst < 1e-10, || format!("n={n} c={c}: eigenvalue off by {worst}"))?;
            let d = orthogonal_decompose(&rm).map_err(|e| e.to_string())?;
            let w = d.weyl.full_norm();
            ensure(w < 1e-12, || format!("n={n} c={c}: |W| = {w}"))?;
            let r = c * (n * (n - 1)) as f64;
            ensure((d.scalar - r).abs() < 1e-10, || format!("n={n} c={c}: R = {} vs {r}", d.scalar))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} space forms, n = 3..8"))
}

fn c2_product() -> Outcome {
    let rm = product(&[(2, 1.0), (2, 1.0)]).map_err(|e| e.to_string())?;
    let d = orthogonal_decompose(&rm).map_err(|e| e.to_string())?;
    ensure((d.scalar - 4.0).abs() < 1e-12, || format!("R = {}", d.scalar))?;
    let id = SymMatrix::identity(4);
    let ric = d.ricci.matrix().max_abs_diff(&id);
    ensure(ric < 1e-12, || format!("Ricci differs from Id by {ric}"))?;
    let w2 = d.weyl_norm_sq();
    ensure((w2 - 16.0 / 3.0).abs() < 1e-9, || format!("|W|² = {w2}"))?;
    let s = spectrum(&BivectorMatrix::of_tensor(&rm)).map_err(|e| e.to_string())?;
    for (x, y) in s.eigenvalues.iter().zip([0.0, 0.0, 0.0, 0.0, 1.0, 1.0]) {
        ensure((x - y).abs() < 1e-10, || format!("spectrum {:?}", s.eigenvalues))?;
    }
    let b = ricci_frame_blocks(&rm).map_err(|e| e.to_string())?;
    let tr = b.weyl.trace().abs();
    ensure(tr < 1e-10, || format!("Weyl block trace {tr}"))?;
    let fro = b.weyl.frobenius_sq();
    ensure((fro - 4.0 / 3.0).abs() < 1e-9, || format!("Frobenius² of the Weyl block {fro}"))?;
    ensure((w2 - 4.0 * fro).abs() < 1e-9, || format!("norm bridge {w2} vs 4·{fro}"))?;
    Ok(format!("|W|² = {w2:.12}, Frobenius² = {fro:.12}"))
}

fn c3_frame_blocks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for t in 0..100u64 {
        let n = 4 + (t % 3) as usize;
        let rm = random_curvature(n, 300 + t, rng.random_range(0.0..3.0), rng.random_range(0.0..3.0), rng.random_range(-10.0..10.0))
            .map_err(|e| e.to_string())?;
        let b = ricci_frame_blocks(&rm).map_err(|e| e.to_string())?;
        let res = b.reconstruction_residual();
        let lam = &b.ricci_eigenvalues;
        let nf = n as f64;
        let mut diag = 0.0f64;
        let mut off = 0.0f64;
        let pairs = b.schouten.index.pairs().to_vec();
        let (sch, len) = (b.schouten.matrix.as_slice(), pairs.len());
        for (a, &(i, j)) in pairs.iter().enumerate() {
            let expect = (lam[i] + lam[j] - b.scalar / (nf - 1.0)) / (nf - 2.0);
            diag = diag.max((sch[a * len + a] - expect).abs());
            for c in 0..len {
                if c != a {
                    off = off.max(sch[a * len + c].abs());
                }
            }
        }
        let tr = b.weyl.trace().abs();
        worst = worst.max(res).max(diag).max(tr).max(off);
        ensure(res < 1e-8 && diag < 1e-8 && off < 1e-8 && tr < 1e-8, || {
            format!("tensor {t} (n={n}): residual {res}, diagonal {diag}, off-diagonal {off}, Weyl trace {tr}")
        })?;
    }
    Ok(format!("100 tensors, worst residual {worst:.2e}"))
}

fn suite_line(suite: Suite, trials: usize, seed: u64) -> Outcome {
    let r = run_suite(suite, trials, seed).map_err(|e| e.to_string())?;
    ensure(r.passed() && r.worst_slack >= -1e-9, || {
        format!("{}: {} failures, worst slack {:e}, {:?}", r.suite, r.failures, r.worst_slack, r.notes)
    })?;
    Ok(format!("{} {} checks, worst slack {:.3e}", r.suite, r.checks, r.worst_slack))
}

fn c4_zero_sum() -> Outcome {
    // 10⁵ random sequences plus 10³ two-level, zero and perturbed families.
    suite_line(Suite::ZeroSumLowest, 100_000, 4)
}

fn c5_matrix_suites() -> Outcome {
    let parts = [Suite::Subadditivity, Suite::KyFan, Suite::Concentration]
        .into_iter()
        .map(|s| suite_line(s, 10_000, 5))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(parts.join("; "))
}

#[derive(Default)]
struct SandwichCounts {
    scalar_checks: usize,
    scalar_violations: usize,
    lower_checks: usize,
    lower_violations: usize,
    upper_violations: usize,
    worst_lower: Option<(f64, String)>,
}

fn c6_sandwich() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let params: Vec<(usize, u64, f64, f64, f64)> = (0..200u64)
        .map(|t| {
            let n = 4 + (t % 3) as usize;
            let ws = if t % 4 == 0 { 0.0 } else { rng.random_range(0.0..2.0) };
            (n, 600 + t, ws, rng.random_range(0.0..2.0), rng.random_range(-5.0..15.0))
        })
        .collect();
    let per: Vec<Result<SandwichCounts, String>> = params
        .par_iter()
        .map(|&(n, seed, ws, rs, r)| {
            let rm = random_curvature(n, seed, ws, rs, r).map_err(|e| e.to_string())?;
            let d = orthogonal_decompose(&rm).map_err(|e| e.to_string())?;
            let s = spectrum(&BivectorMatrix::of_tensor(&rm)).map_err(|e| e.to_string())?;
            let (w, ric0) = (d.weyl.full_norm(), d.traceless_ricci.full_norm());
            let big_n = n * (n - 1) / 2;
            let mut out = SandwichCounts::default();
            for k in 1..=big_n {
                let b = scalar_pinching_lower_bound(d.scalar, ric0, w, n, k).map_err(|e| e.to_string())?;
                out.scalar_checks += 1;
                if s.lowest_sum(k) < b - 1e-9 * (1.0 + b.abs()) {
                    out.scalar_violations += 1;
                }
            }
            let grid = if n == 4 { Some(ric_k_grid_min(&rm, 100_000).map_err(|e| e.to_string())?) } else { None };
            let ricci = d.ricci.matrix().eigenvalues().map_err(|e| e.to_string())?;
            let opts = RicKOptions { seed, ..Default::default() };
            for k in 1..n {
                let (lo, hi) = if k == n - 1 {
                    (ricci[0], ricci[n - 1])
                } else {
                    let lo = ric_k_min(&rm, k, &opts).map_err(|e| e.to_string())?.value;
                    let hi = ric_k_max(&rm, k, &opts).map_err(|e| e.to_string())?.value;
                    (grid.as_ref().map_or(lo, |g| lo.min(g[k - 1])), hi)
                };
                let kf = k as f64;
                let (lower, _) = ric_k_weyl_bounds(lo / kf, w, n, k).map_err(|e| e.to_string())?;
                let (_, upper) = ric_k_weyl_bounds(hi / kf, w, n, k).map_err(|e| e.to_string())?;
                let sum = s.lowest_sum(k);
                out.lower_checks += 1;
                if sum < lower - 1e-9 * (1.0 + lower.abs()) {
                    out.lower_violations += 1;
                    let gap = sum - lower;
                    if out.worst_lower.as_ref().is_none_or(|(g, _)| gap < *g) {
                        out.worst_lower = Some((gap, format!("n={n} k={k} |W|={w:.3}: Σμ = {sum:.4} < {lower:.4}")));
                    }
                }
                if sum > upper + 1e-9 * (1.0 + upper.abs()) {
                    out.upper_violations += 1;
                }
            }
            Ok(out)
        })
        .collect();
    let mut total = SandwichCounts::default();
    for p in per {
        let p = p?;
        total.scalar_checks += p.scalar_checks;
        total.scalar_violations += p.scalar_violations;
        total.lower_checks += p.lower_checks;
        total.lower_violations += p.lower_violations;
        total.upper_violations += p.upper_violations;
        if let Some((g, m)) = p.worst_lower {
            if total.worst_lower.as_ref().is_none_or(|(h, _)| g < *h) {
                total.worst_lower = Some((g, m));
            }
        }
    }
    let summary = format!(
        "scalar bound {}/{} violations; Ric_k lower {}/{}; Ric_k upper {}/{}",
        total.scalar_violations,
        total.scalar_checks,
        total.lower_violations,
        total.lower_checks,
        total.upper_violations,
        total.lower_checks
    );
    if total.scalar_violations + total.lower_violations + total.upper_violations == 0 {
        Ok(summary)
    } else {
        let worst = total.worst_lower.map(|(_, m)| format!("; worst {m}")).unwrap_or_default();
        Err(summary + &worst)
    }
}

/// Equal-measure Hopf-coordinate grid on `S^3`, or a latitude/longitude
/// equal-area grid on `S^2`, of about `count` points.
fn brute_force_grid(n: usize, count: usize) -> Vec<Vec<f64>> {
    let tau = 2.0 * PI;
    match n {
        3 => {
            let rows = ((count as f64 / PI).sqrt()) as usize;
            let cols = count / rows;
            let mut out = Vec::with_capacity(rows * cols);
            for i in 0..rows {
                let z = -1.0 + 2.0 * (i as f64 + 0.5) / rows as f64;
                let r = (1.0 - z * z).sqrt();
                let shift = if i % 2 == 0 { 0.0 } else { 0.5 };
                for j in 0..cols {
                    let phi = tau * (j as f64 + shift) / cols as f64;
                    out.push(vec![r * phi.cos(), r * phi.sin(), z]);
                }
            }
            out
        }
        4 => {
            // Uniform measure on S^3 is uniform in (t, α, β) for
            // u = (√t cos α, √t sin α, √(1−t) cos β, √(1−t) sin β).
            let rows = ((count as f64 / (PI * PI)).cbrt()) as usize;
            let cols = ((count / rows) as f64).sqrt() as usize;
            let mut out = Vec::with_capacity(rows * cols * cols);
            for i in 0..rows {
                let t = (i as f64 + 0.5) / rows as f64;
                let (p, q) = (t.sqrt(), (1.0 - t).sqrt());
                for a in 0..cols {
                    let alpha = tau * a as f64 / cols as f64;
                    for b in 0..cols {
                        let beta = tau * (b as f64 + 0.5 * (a % 2) as f64) / cols as f64;
                        out.push(vec![p * alpha.cos(), p * alpha.sin(), q * beta.cos(), q * beta.sin()]);
                    }
                }
            }
            out
        }
        _ => unreachable!(),
    }
}

/// Lowest `n-1` eigenvalues of `v ↦ Rm(u, v, u, ·)` restricted to `u^⊥`,
/// via projection with `u` pushed far up the spectrum.
fn directional_eigs(rm: &CurvatureTensor, u: &[f64]) -> Vec<f64> {
    let n = rm.dim();
    let big = 1e3 * (1.0 + rm.max_abs());
    let m = SymMatrix::from_fn(n, |a, b| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * u[j] * rm.get(i, a, j, b);
            }
        }
        s + big * u[a] * u[b]
    });
    let mut e = m.eigenvalues().expect("small symmetric matrix");
    e.pop();
    e
}

fn c7_ric_k_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for t in 0..20u64 {
        let n = 3 + (t % 2) as usize;
        let ws = if n == 4 { rng.random_range(0.0..1.0) } else { 0.0 };
        let rm = random_curvature(n, 700 + t, ws, rng.random_range(0.0..1.0), rng.random_range(-3.0..3.0))
            .map_err(|e| e.to_string())?;
        let grid = brute_force_grid(n, 100_000);
        points = points.max(grid.len());
        let mut best = vec![f64::INFINITY; n - 1];
        for u in &grid {
            let e = directional_eigs(&rm, u);
            for k in 1..n {
                best[k - 1] = best[k - 1].min(lowest_sum(&e, k));
            }
        }
        let opts = RicKOptions { seed: 700 + t, ..Default::default() };
        for k in 1..n {
            let found = ric_k_min(&rm, k, &opts).map_err(|e| e.to_string())?.value;
            let gap = (best[k - 1] - found).abs();
            worst = worst.max(gap);
            ensure(gap <= 1e-3, || format!("tensor {t} (n={n}) k={k}: optimizer {found}, grid {}", best[k - 1]))?;
        }
    }
    Ok(format!("20 tensors, {points}-point grids, worst gap {worst:.2e}"))
}

fn c8_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 4..=20 {
        let a = threshold(ThresholdKind::SectionalWeyl, m, 1).map_err(|e| e.to_string())?;
        let b = threshold(ThresholdKind::KPositiveWeyl, m, 1).map_err(|e| e.to_string())?;
        worst = worst.max((a - b).abs());
    }
    ensure(worst < 1e-15, || format!("threshold difference {worst:e}"))?;
    let mut cases = 0;
    for n in 8..=64u32 {
        for p in 1..=n / 2 - 2 {
            let c = form_degree_inequality(n, p).map_err(|e| e.to_string())?;
            ensure(c.strict_holds && c.check.holds, || format!("n={n} p={p}: {c:?}"))?;
            cases += 1;
        }
    }
    Ok(format!("threshold difference {worst:e}; {cases} degree cases"))
}

fn c9_k_positive_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params: Vec<(usize, u64, f64, f64, f64)> = (0..200u64)
        .map(|t| {
            let n = 4 + (t % 3) as usize;
            let ws = rng.random_range(-5.0f64..1.0).exp();
            let rs = rng.random_range(-5.0f64..0.5).exp();
            let r = (n * (n - 1)) as f64 * rng.random_range(-0.5..2.0);
            (n, 900 + t, ws, rs, r)
        })
        .collect();
    let per: Vec<Result<(usize, usize, usize), String>> = params
        .par_iter()
        .map(|&(n, seed, ws, rs, r)| {
            let rm = random_curvature(n, seed, ws, rs, r).map_err(|e| e.to_string())?;
            let s = spectrum(&BivectorMatrix::of_tensor(&rm)).map_err(|e| e.to_string())?;
            let (mut checked, mut met, mut bad) = (0, 0, 0);
            let big_n = n * (n - 1) / 2;
            let mut ks = vec![1, 2, n - 1, big_n / 2, big_n - 1];
            ks.dedup();
            for k in ks {
                let p = CertifyParams { k: Some(k), ric_k: RicKOptions { seed, ..Default::default() }, ..Default::default() };
                let rep = certify_pointwise(&rm, PointwiseTheorem::KPositive, &p).map_err(|e| e.to_string())?;
                checked += 1;
                if rep.is_met() {
                    met += 1;
                    if !(s.lowest_sum(k) > 0.0) {
                        bad += 1;
                    }
                }
            }
            Ok((checked, met, bad))
        })
        .collect();
    let (mut checked, mut met, mut bad) = (0, 0, 0);
    for p in per {
        let (c, m, b) = p?;
        checked += c;
        met += m;
        bad += b;
    }
    ensure(bad == 0, || format!("{bad} of {met} met verdicts lack k-positivity"))?;
    ensure(met > 0, || "no met verdicts: the run exercised nothing".into())?;
    Ok(format!("{checked} certificates, {met} met, 0 counterexamples"))
}

fn c10_homothety() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for f in 0..20u64 {
        let n = rng.random_range(4..=7);
        let count = rng.random_range(1..=5);
        let samples = (0..count)
            .map(|i| {
                let t = random_curvature(n, 1000 + 10 * f + i, rng.random_range(0.0..2.0), rng.random_range(0.0..2.0), rng.random_range(0.0..30.0))?;
                Ok((rng.random_range(0.1..3.0), t))
            })
            .collect::<Result<Vec<_>, curvop_core::Error>>()
            .map_err(|e| e.to_string())?;
        let field = CurvatureField::new(samples).map_err(|e| e.to_string())?;
        let c = rng.random_range(-2.0f64..2.0).exp();
        let a = rng.random_range(0.1..2.0);
        let run = |fld: &CurvatureField, a: f64| {
            let p = CertifyParams { k: Some(1), a: Some(a), ..Default::default() };
            certify_field(fld, FieldTheorem::WeylIntegral, &p).map_err(|e| e.to_string())
        };
        let before = run(&field, a)?;
        let after = run(&field.rescaled(c), a / c)?;
        let (x, y) = (before.hypothesis_values["weyl_lp_norm"], after.hypothesis_values["weyl_lp_norm"]);
        let gap = (x - y).abs();
        worst = worst.max(gap);
        ensure(gap < 1e-9, || format!("field {f} (c = {c}): {x} vs {y}"))?;
        ensure(before.verdict == after.verdict, || format!("field {f}: verdict {:?} vs {:?}", before.verdict, after.verdict))?;
    }
    Ok(format!("20 fields, worst change {worst:.2e}"))
}

fn c11_four_dim() -> Outcome {
    let rm = product(&[(2, 1.0), (2, 1.0)]).map_err(|e| e.to_string())?;
    let field = CurvatureField::new(vec![(1.0, rm)]).map_err(|e| e.to_string())?;
    let r = certify_field(&field, FieldTheorem::WeylL2FourDim, &CertifyParams::default()).map_err(|e| e.to_string())?;
    let expect = 8.0 * PI * PI - 16.0 / 3.0;
    ensure(r.verdict == Verdict::HypothesesMet, || format!("verdict {:?}", r.verdict))?;
    ensure((r.margin - expect).abs() < 1e-6, || format!("margin {} vs {expect}", r.margin))?;
    ensure(r.conclusion_text == "χ(M)=2", || format!("conclusion {:?}", r.conclusion_text))?;
    Ok(format!("margin {:.9}", r.margin))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 11] = [
        (1, "space-form exactness", Duration::from_secs(1), c1_space_forms),
        (2, "S²×S² worked example", Duration::from_secs(1), c2_product),
        (3, "Ricci-frame block reconstruction", Duration::from_secs(10), c3_frame_blocks),
        (4, "zero-sum lowest-k bound suite", Duration::from_secs(30), c4_zero_sum),
        (5, "subadditivity / Ky Fan / concentration", Duration::from_secs(30), c5_matrix_suites),
        (6, "eigenvalue-sum sandwich", Duration::from_secs(120), c6_sandwich),
        (7, "Ric_k against grid brute force", Duration::from_secs(120), c7_ric_k_oracle),
        (8, "threshold identity and degree inequality", Duration::from_secs(1), c8_identities),
        (9, "k-positivity certificate soundness", Duration::from_secs(120), c9_k_positive_soundness),
        (10, "homothety invariance", Duration::from_secs(10), c10_homothety),
        (11, "four-dimensional Weyl L² certificate", Duration::from_secs(1), c11_four_dim),
    ];
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut unexpected = Vec::new();
    let mut failed = Vec::new();
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if outcome.is_ok() && elapsed > budget {
            outcome = Err(format!("took {elapsed:.2?}, budget {budget:.0?}"));
        }
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("{tag} {id:>2} {name} [{:.2?}] {detail}", elapsed);
        if outcome.is_err() {
            failed.push(id);
            if strict || !KNOWN_FAILURES.contains(&id) {
                unexpected.push(id);
            }
        }
    }
    println!("{} of {} criteria passed; failed: {failed:?}", 11 - failed.len(), 11);
    if !unexpected.is_empty() {
        println!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
