//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use curvop_core::certify::CertifyParams;
use curvop_core::ricci_k::{RicKOptions, DEFAULT_RESTARTS};
use curvop_core::suites::{parse_suite, Suite};
use curvop_core::zoo::{Factor, ModelSpec};
use curvop_core::DEFAULT_TOL;

use crate::commands::{self, FrameChoice, TheoremChoice};
use crate::error::{CliError, CliResult, EXIT_OK, EXIT_USAGE};
use crate::files::{self, LoadOptions, ModelFile, TensorFile};
use crate::json::to_stable_string;

#[derive(Debug, Parser)]
#[command(name = "curvop", version, about = "Curvature operators, Weyl pinching and intermediate Ricci curvature")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Emit stable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Validation and certificate tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "CURVOP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Skip the first Bianchi identity when loading tensors.
    #[arg(long, global = true)]
    pub no_bianchi_check: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scalar, Ricci, Schouten, Weyl and concircular parts with residuals.
    Decompose { path: PathBuf },
    /// Curvature-operator spectrum and the Schouten/Weyl block dump.
    Spectrum {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "standard")]
        frame: FrameChoice,
    },
    /// Intermediate Ricci curvature Ric_k by multi-start search.
    Seck {
        path: PathBuf,
        /// Single k (default: every k in 1..n-1).
        #[arg(long)]
        k: Option<usize>,
        /// Also report the maximum over directions.
        #[arg(long)]
        max: bool,
        /// Compare against a brute-force grid of this many points (n = 3, 4).
        #[arg(long)]
        grid: Option<usize>,
        /// Multi-start count.
        #[arg(long, default_value_t = DEFAULT_RESTARTS)]
        restarts: usize,
    },
    /// Evaluate a theorem's hypotheses on a tensor or field file.
    Certify(CertifyArgs),
    /// Write a generated tensor file to stdout or --output.
    Zoo {
        #[command(subcommand)]
        model: ZooModel,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
        /// Write the model description instead of expanded components.
        #[arg(long, global = true)]
        as_model: bool,
    },
    /// Run a randomized or exhaustive inequality suite.
    Oracle {
        /// lemma32, lemma31, kyfan, concentration, lemma44 or rick-grid.
        suite: String,
        #[arg(long)]
        trials: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Tensor file for pointwise checks, field file for integral ones.
    pub path: PathBuf,
    /// Certificate id, e.g. thm14_pos, cor34, thm15, gb4.
    #[arg(long)]
    pub theorem: String,
    /// Positivity or Ric_k order, where the certificate takes one.
    #[arg(long)]
    pub k: Option<usize>,
    /// Curvature constant a (computed from the data when omitted).
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Yamabe constant λ(g).
    #[arg(long, allow_negative_numbers = true)]
    pub yamabe: Option<f64>,
    /// a in Ric >= (n-1)a, used to bound λ(g) from below.
    #[arg(long, allow_negative_numbers = true)]
    pub ricci_lower: Option<f64>,
    /// Diameter bound D, for the diameter/Betti estimate.
    #[arg(long)]
    pub diameter: Option<f64>,
    /// Assert that the Weyl tensor is harmonic (not verifiable from samples).
    #[arg(long)]
    pub assert_harmonic_weyl: bool,
    /// Multi-start count for every Ric_k search.
    #[arg(long, default_value_t = DEFAULT_RESTARTS)]
    pub restarts: usize,
}

#[derive(Debug, Subcommand)]
pub enum ZooModel {
    /// Constant sectional curvature.
    SpaceForm {
        #[arg(long)]
        dimension: usize,
        #[arg(long, allow_negative_numbers = true)]
        curvature: f64,
    },
    /// Product of space forms, one `--factor DIM:CURVATURE` per factor.
    Product {
        #[arg(long = "factor", required = true, value_parser = parse_factor)]
        factors: Vec<Factor>,
    },
    /// Seeded random tensor with prescribed |W|, |Ric°| and R.
    Random {
        #[arg(long)]
        dimension: usize,
        #[arg(long, default_value_t = 1.0)]
        weyl_scale: f64,
        #[arg(long, default_value_t = 1.0)]
        ricci_scale: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
        scalar: f64,
    },
}

fn parse_factor(s: &str) -> Result<Factor, String> {
    let (d, c) = s.split_once(':').ok_or_else(|| format!("expected DIM:CURVATURE, got {s:?}"))?;
    Ok(Factor {
        dimension: d.trim().parse().map_err(|e| format!("bad dimension {d:?}: {e}"))?,
        curvature: c.trim().parse().map_err(|e| format!("bad curvature {c:?}: {e}"))?,
    })
}

/// Output of one command: stdout text and an exit code.
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce(&T) -> String) -> String {
    if json {
        to_stable_string(value)
    } else {
        text(value)
    }
}

pub fn run(cli: Cli) -> CliResult<Outcome> {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol.is_finite()) {
        return Err(CliError::Usage(format!("--tol must be positive, got {}", g.tol)));
    }
    let load = LoadOptions { tol: g.tol, check_bianchi: !g.no_bianchi_check };
    let stdout = match &cli.command {
        Command::Decompose { path } => {
            let r = commands::decompose(&files::load_tensor(path, load)?)?;
            emit(g.json, &r, commands::render_decompose)
        }
        Command::Spectrum { path, frame } => {
            let r = commands::spectrum(&files::load_tensor(path, load)?, *frame)?;
            emit(g.json, &r, commands::render_spectrum)
        }
        Command::Seck { path, k, max, grid, restarts } => {
            let opts = RicKOptions { restarts: *restarts, seed: g.seed, ..Default::default() };
            let r = commands::seck(&files::load_tensor(path, load)?, *k, *max, *grid, &opts)?;
            emit(g.json, &r, commands::render_seck)
        }
        Command::Certify(a) => {
            let params = CertifyParams {
                k: a.k,
                a: a.a,
                yamabe: a.yamabe,
                ricci_lower: a.ricci_lower,
                harmonic_weyl: a.assert_harmonic_weyl,
                diameter: a.diameter,
                ric_k: RicKOptions { restarts: a.restarts, seed: g.seed, ..Default::default() },
                tol: g.tol,
            };
            let r = match commands::parse_theorem(&a.theorem)? {
                TheoremChoice::Pointwise(t) => commands::certify_tensor(&files::load_tensor(&a.path, load)?, t, &params)?,
                TheoremChoice::Field(t) => commands::certify_field_parallel(&files::load_field(&a.path, load)?, t, &params)?,
            };
            emit(g.json, &r, commands::render_certificate)
        }
        Command::Zoo { model, output, as_model } => {
            let spec = match model {
                ZooModel::SpaceForm { dimension, curvature } => {
                    ModelSpec::SpaceForm { dimension: *dimension, curvature: *curvature }
                }
                ZooModel::Product { factors } => ModelSpec::Product { factors: factors.clone() },
                ZooModel::Random { dimension, weyl_scale, ricci_scale, scalar } => ModelSpec::Random {
                    dimension: *dimension,
                    seed: g.seed,
                    weyl_scale: *weyl_scale,
                    ricci_scale: *ricci_scale,
                    scalar: *scalar,
                },
            };
            let t = spec.build()?;
            let text = if *as_model {
                to_stable_string(&ModelFile { model: spec })
            } else {
                to_stable_string(&TensorFile::from_tensor(&t))
            };
            match output {
                Some(p) => {
                    std::fs::write(p, &text).map_err(|source| CliError::Io { path: p.clone(), source })?;
                    String::new()
                }
                None => text,
            }
        }
        Command::Oracle { suite, trials } => {
            let suite: Suite = parse_suite(suite)?;
            let r = commands::oracle(suite, trials.unwrap_or(suite.default_trials()), g.seed)?;
            let code = if r.passed() { EXIT_OK } else { 1 };
            return Ok(Outcome { stdout: emit(g.json, &r, commands::render_oracle), code });
        }
    };
    Ok(Outcome { stdout, code: EXIT_OK })
}

/// Parses, configures the thread pool, runs, prints, and returns the exit
/// code. Argument errors exit with the usage code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    if let Some(t) = cli.global.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return EXIT_USAGE;
        }
        // Fails only if a pool already exists, which keeps the earlier one.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match run(cli) {
        Ok(o) => {
            let mut out = std::io::stdout().lock();
            let _ = out.write_all(o.stdout.as_bytes());
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
