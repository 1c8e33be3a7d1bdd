//! Subcommand bodies. Each returns a serializable report; `render_*`
//! functions give the human-readable form.

use std::fmt::Write as _;

use curvop_core::certify::{
    certify_pointwise, certify_summaries, required_ric_k, summarize_sample, CertificateReport, CertifyParams,
    CurvatureField, FieldTheorem, PointwiseTheorem, SampleSummary,
};
use curvop_core::operator::{curvature_operator, ricci_frame_blocks, spectrum as op_spectrum};
use curvop_core::ricci_k::{ric_k_grid_min, ric_k_max, ric_k_min, RicKOptions, RicKResult};
use curvop_core::suites::{run_suite, Suite, SuiteReport};
use curvop_core::tensor::{kulkarni_nomizu, FullNorm};
use curvop_core::{orthogonal_decompose, BivectorIndex, BivectorMatrix, CurvatureTensor, Frame, SymTwoTensor};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// Shards used by the randomized oracle suites; fixed so that output does
/// not depend on the thread count.
pub const ORACLE_SHARDS: u64 = 8;

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub bianchi: f64,
    pub schouten_reconstruction: f64,
    pub orthogonal_reconstruction: f64,
    pub weyl_trace: f64,
    pub concircular_identity: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecomposeReport {
    pub dimension: usize,
    pub scalar: f64,
    pub ricci_eigenvalues: Vec<f64>,
    pub traceless_ricci_norm: f64,
    pub weyl_norm: f64,
    pub weyl_norm_sq: f64,
    pub concircular_norm: f64,
    pub pinching_quantity: f64,
    pub residuals: Residuals,
}

pub fn decompose(rm: &CurvatureTensor) -> CliResult<DecomposeReport> {
    let d = orthogonal_decompose(rm)?;
    let n = rm.dim() as f64;
    let z2 = d.concircular_norm_sq()?;
    let identity = 4.0 / (n - 2.0) * d.traceless_ricci_norm_sq() + d.weyl_norm_sq();
    Ok(DecomposeReport {
        dimension: rm.dim(),
        scalar: d.scalar,
        ricci_eigenvalues: d.ricci.matrix().eigenvalues()?,
        traceless_ricci_norm: d.traceless_ricci.full_norm(),
        weyl_norm: d.weyl.full_norm(),
        weyl_norm_sq: d.weyl_norm_sq(),
        concircular_norm: z2.sqrt(),
        pinching_quantity: d.pinching_quantity(),
        residuals: Residuals {
            bianchi: rm.bianchi_residual(),
            schouten_reconstruction: d.reconstruct_schouten().max_abs_diff(rm),
            orthogonal_reconstruction: d.reconstruct_orthogonal().max_abs_diff(rm),
            weyl_trace: d.weyl_trace_residual(),
            concircular_identity: (z2 - identity).abs(),
        },
    })
}

pub fn render_decompose(r: &DecomposeReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dimension            {}", r.dimension);
    let _ = writeln!(s, "scalar curvature     {}", r.scalar);
    let _ = writeln!(s, "Ricci eigenvalues    {}", join(&r.ricci_eigenvalues));
    let _ = writeln!(s, "|Ric°|                {}", r.traceless_ricci_norm);
    let _ = writeln!(s, "|W|                  {}", r.weyl_norm);
    let _ = writeln!(s, "|W|^2                {}", r.weyl_norm_sq);
    let _ = writeln!(s, "|Z|                  {}", r.concircular_norm);
    let _ = writeln!(s, "pinching quantity    {}", r.pinching_quantity);
    let _ = writeln!(s, "residuals");
    let q = &r.residuals;
    let _ = writeln!(s, "  first Bianchi             {:e}", q.bianchi);
    let _ = writeln!(s, "  S⊙g + W - Rm              {:e}", q.schouten_reconstruction);
    let _ = writeln!(s, "  orthogonal reconstruction {:e}", q.orthogonal_reconstruction);
    let _ = writeln!(s, "  Weyl trace                {:e}", q.weyl_trace);
    let _ = writeln!(s, "  |Z|^2 identity            {:e}", q.concircular_identity);
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameChoice {
    Standard,
    Ricci,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub frame: FrameChoice,
    pub eigenvalues: Vec<f64>,
    pub prefix_sums: Vec<f64>,
    pub pair_order: Vec<(usize, usize)>,
    /// Rows of the frame the blocks are written in.
    pub frame_rows: Vec<Vec<f64>>,
    pub ricci_eigenvalues: Option<Vec<f64>>,
    /// Closed-form diagonal of the Schouten block in the Ricci frame.
    pub pair_eigenvalues: Option<Vec<f64>>,
    pub operator: Vec<Vec<f64>>,
    pub schouten_block: Vec<Vec<f64>>,
    pub weyl_block: Vec<Vec<f64>>,
    pub weyl_block_trace: f64,
    pub reconstruction_residual: f64,
}

fn rows(m: &BivectorMatrix) -> Vec<Vec<f64>> {
    m.matrix.as_slice().chunks(m.len()).map(|r| r.to_vec()).collect()
}

pub fn spectrum(rm: &CurvatureTensor, frame: FrameChoice) -> CliResult<SpectrumReport> {
    let summary = op_spectrum(&BivectorMatrix::of_tensor(rm))?;
    let (frame_obj, ricci, pairs, op, sb, wb) = match frame {
        FrameChoice::Standard => {
            let d = orthogonal_decompose(rm)?;
            let id = Frame::identity(rm.dim());
            let sg = kulkarni_nomizu(&d.schouten, &SymTwoTensor::metric(rm.dim()))?;
            (
                id.clone(),
                None,
                None,
                curvature_operator(rm, &id)?,
                curvature_operator(&sg, &id)?,
                curvature_operator(&d.weyl, &id)?,
            )
        }
        FrameChoice::Ricci => {
            let b = ricci_frame_blocks(rm)?;
            let pairs = b.pair_eigenvalues();
            (b.frame, Some(b.ricci_eigenvalues), Some(pairs), b.operator, b.schouten, b.weyl)
        }
    };
    let residual = sb.matrix.add(&wb.matrix)?.max_abs_diff(&op.matrix);
    Ok(SpectrumReport {
        frame,
        eigenvalues: summary.eigenvalues.clone(),
        prefix_sums: summary.prefix_sums.clone(),
        pair_order: BivectorIndex::new(rm.dim()).pairs().to_vec(),
        frame_rows: frame_obj.rows().to_vec(),
        ricci_eigenvalues: ricci,
        pair_eigenvalues: pairs,
        weyl_block_trace: wb.trace(),
        operator: rows(&op),
        schouten_block: rows(&sb),
        weyl_block: rows(&wb),
        reconstruction_residual: residual,
    })
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(" ")
}

/// Row-major matrix dump preceded by the bivector order.
pub fn matrix_dump(title: &str, pairs: &[(usize, usize)], m: &[Vec<f64>]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# {title}");
    let order: Vec<String> = pairs.iter().map(|(i, j)| format!("({i},{j})")).collect();
    let _ = writeln!(s, "# pair order: {}", order.join(" "));
    for r in m {
        let _ = writeln!(s, "{}", r.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(" "));
    }
    s
}

pub fn render_spectrum(r: &SpectrumReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "eigenvalues  {}", join(&r.eigenvalues));
    let _ = writeln!(s, "prefix sums  {}", join(&r.prefix_sums));
    if let Some(l) = &r.ricci_eigenvalues {
        let _ = writeln!(s, "Ricci eigenvalues  {}", join(l));
    }
    if let Some(p) = &r.pair_eigenvalues {
        let _ = writeln!(s, "λ_ij (pair order)  {}", join(p));
    }
    let _ = writeln!(s, "Weyl block trace  {:e}", r.weyl_block_trace);
    let _ = writeln!(s, "max |S + W - operator|  {:e}", r.reconstruction_residual);
    let frame = match r.frame {
        FrameChoice::Standard => "standard frame",
        FrameChoice::Ricci => "Ricci eigenframe",
    };
    s.push_str(&matrix_dump(&format!("curvature operator, {frame}"), &r.pair_order, &r.operator));
    s.push_str(&matrix_dump(&format!("Schouten block S, {frame}"), &r.pair_order, &r.schouten_block));
    s.push_str(&matrix_dump(&format!("Weyl block W, {frame}"), &r.pair_order, &r.weyl_block));
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct RicKEntry {
    pub k: usize,
    pub min: RicKResult,
    pub max: Option<RicKResult>,
    pub grid_min: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SecKReport {
    pub dimension: usize,
    pub restarts: usize,
    pub seed: u64,
    pub grid_points: Option<usize>,
    pub entries: Vec<RicKEntry>,
}

pub fn seck(rm: &CurvatureTensor, k: Option<usize>, with_max: bool, grid: Option<usize>, opts: &RicKOptions) -> CliResult<SecKReport> {
    let n = rm.dim();
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (1..n).collect(),
    };
    let grid_min = grid.map(|g| ric_k_grid_min(rm, g)).transpose()?;
    let entries = ks
        .par_iter()
        .map(|&k| {
            Ok(RicKEntry {
                k,
                min: ric_k_min(rm, k, opts)?,
                max: if with_max { Some(ric_k_max(rm, k, opts)?) } else { None },
                grid_min: grid_min.as_ref().and_then(|g| g.get(k.wrapping_sub(1)).copied()),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SecKReport { dimension: n, restarts: opts.restarts, seed: opts.seed, grid_points: grid, entries })
}

pub fn render_seck(r: &SecKReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "dimension {}, {} restarts, seed {}", r.dimension, r.restarts, r.seed);
    for e in &r.entries {
        let _ = write!(s, "k={}  min Ric_k = {}", e.k, e.min.value);
        if !e.min.converged {
            s.push_str(" (not converged)");
        }
        let _ = write!(s, "  at u = [{}]", join(&e.min.argmin_direction));
        if let Some(m) = &e.max {
            let _ = write!(s, "  max = {}", m.value);
        }
        if let Some(g) = e.grid_min {
            let _ = write!(s, "  grid min = {g}");
        }
        s.push('\n');
    }
    s
}

/// Which certifier a theorem id belongs to.
#[derive(Debug, Clone, Copy)]
pub enum TheoremChoice {
    Pointwise(PointwiseTheorem),
    Field(FieldTheorem),
}

pub fn parse_theorem(id: &str) -> CliResult<TheoremChoice> {
    if let Some(t) = PointwiseTheorem::from_id(id) {
        return Ok(TheoremChoice::Pointwise(t));
    }
    if let Some(t) = FieldTheorem::from_id(id) {
        return Ok(TheoremChoice::Field(t));
    }
    let all: Vec<&str> = PointwiseTheorem::ALL
        .iter()
        .map(|t| t.id())
        .chain(FieldTheorem::ALL.iter().map(|t| t.id()))
        .collect();
    Err(CliError::Usage(format!("unknown theorem {id:?}; expected one of {}", all.join(", "))))
}

/// Per-sample summaries computed in parallel; sample `i` searches `Ric_k`
/// with seed `seed + i`, so results do not depend on scheduling.
pub fn summarize_field(field: &CurvatureField, theorem: FieldTheorem, params: &CertifyParams) -> CliResult<Vec<SampleSummary>> {
    let k = required_ric_k(theorem, params);
    field
        .samples()
        .par_iter()
        .enumerate()
        .map(|(i, (w, t))| {
            let opts = RicKOptions { seed: params.ric_k.seed.wrapping_add(i as u64), ..params.ric_k };
            summarize_sample(t, *w, k, &opts).map_err(CliError::from)
        })
        .collect()
}

pub fn certify_field_parallel(field: &CurvatureField, theorem: FieldTheorem, params: &CertifyParams) -> CliResult<CertificateReport> {
    if theorem.needs_ric_k() && params.a.is_none() && params.k.is_none() {
        return Err(CliError::Usage(format!("{} requires --k", theorem.id())));
    }
    let summaries = summarize_field(field, theorem, params)?;
    Ok(certify_summaries(&summaries, theorem, params)?)
}

pub fn certify_tensor(rm: &CurvatureTensor, theorem: PointwiseTheorem, params: &CertifyParams) -> CliResult<CertificateReport> {
    Ok(certify_pointwise(rm, theorem, params)?)
}

fn verdict_name(r: &CertificateReport) -> &'static str {
    use curvop_core::certify::Verdict::*;
    match r.verdict {
        HypothesesMet => "hypotheses_met",
        NotMet => "not_met",
        Degenerate => "degenerate",
    }
}

pub fn render_certificate(r: &CertificateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "theorem     {}", r.theorem_id);
    let _ = writeln!(s, "verdict     {}", verdict_name(r));
    let _ = writeln!(s, "threshold   {}", r.threshold);
    let _ = writeln!(s, "margin      {}", r.margin);
    let _ = writeln!(s, "conclusion  {}", r.conclusion_text);
    let _ = writeln!(s, "inputs");
    for (k, v) in &r.inputs {
        let _ = writeln!(s, "  {k} = {v}");
    }
    let _ = writeln!(s, "hypothesis values");
    for (k, v) in &r.hypothesis_values {
        let _ = writeln!(s, "  {k} = {v}");
    }
    if !r.notes.is_empty() {
        let _ = writeln!(s, "notes");
        for n in &r.notes {
            let _ = writeln!(s, "  - {n}");
        }
    }
    s
}

/// Splits `trials` over [`ORACLE_SHARDS`] shards seeded `seed + shard`.
pub fn oracle(suite: Suite, trials: usize, seed: u64) -> CliResult<SuiteReport> {
    if suite == Suite::FormDegree {
        return Ok(run_suite(suite, trials, seed)?);
    }
    let shards = ORACLE_SHARDS as usize;
    let reports = (0..shards)
        .into_par_iter()
        .map(|s| {
            let count = trials / shards + usize::from(s < trials % shards);
            run_suite(suite, count, seed.wrapping_add(s as u64)).map_err(CliError::from)
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(reports.into_iter().reduce(SuiteReport::merge).expect("at least one shard"))
}

pub fn render_oracle(r: &SuiteReport) -> String {
    let mut s = String::new();
    let status = if r.passed() { "pass" } else { "FAIL" };
    let _ = writeln!(
        s,
        "{}: {status} ({} trials, {} checks, {} failures, worst slack {:e})",
        r.suite, r.trials, r.checks, r.failures, r.worst_slack
    );
    for n in &r.notes {
        let _ = writeln!(s, "  - {n}");
    }
    s
}
