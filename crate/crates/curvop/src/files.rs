//! JSON tensor and field files.
//!
//! A tensor file is `{"dimension": n, "riemann": [[i, j, k, l, value], ...]}`
//! listing representatives with `i < j`, `k < l`, `(i, j) <= (k, l)`, or
//! `{"model": {...}}` naming a generated tensor. A field file is
//! `{"dimension": n, "samples": [{"weight": w, "riemann": [...]}, ...]}`
//! where each sample may use `model` instead of `riemann`.

use std::path::Path;

use curvop_core::certify::CurvatureField;
use curvop_core::zoo::ModelSpec;
use curvop_core::{CurvatureTensor, Error as CoreError};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTensor {
    dimension: Option<usize>,
    riemann: Option<Vec<Vec<f64>>>,
    model: Option<ModelSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    weight: f64,
    riemann: Option<Vec<Vec<f64>>>,
    model: Option<ModelSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawField {
    dimension: Option<usize>,
    samples: Vec<RawSample>,
}

/// How strictly loaded tensors are checked.
#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub tol: f64,
    pub check_bianchi: bool,
}

/// Tensor file as written by `curvop zoo`.
#[derive(Debug, Clone, Serialize)]
pub struct TensorFile {
    pub dimension: usize,
    pub riemann: Vec<(usize, usize, usize, usize, f64)>,
}

impl TensorFile {
    pub fn from_tensor(t: &CurvatureTensor) -> Self {
        Self { dimension: t.dim(), riemann: t.representatives() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelFile {
    pub model: ModelSpec,
}

fn parse_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_path_buf(), message: message.into() }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn entries(raw: &[Vec<f64>]) -> Result<Vec<(usize, usize, usize, usize, f64)>, String> {
    raw.iter()
        .enumerate()
        .map(|(idx, e)| {
            if e.len() != 5 {
                return Err(format!("riemann entry {idx} has {} fields, expected [i, j, k, l, value]", e.len()));
            }
            let index = |x: f64| (x >= 0.0 && x.fract() == 0.0 && x < 1e6).then_some(x as usize);
            match (index(e[0]), index(e[1]), index(e[2]), index(e[3])) {
                (Some(i), Some(j), Some(k), Some(l)) => Ok((i, j, k, l, e[4])),
                _ => Err(format!("riemann entry {idx} has an index that is not a non-negative integer")),
            }
        })
        .collect()
}

fn build(
    path: &Path,
    what: &str,
    dimension: Option<usize>,
    riemann: Option<&[Vec<f64>]>,
    model: Option<&ModelSpec>,
    opts: LoadOptions,
) -> CliResult<CurvatureTensor> {
    let t = match (riemann, model) {
        (Some(r), None) => {
            let n = dimension.ok_or_else(|| parse_err(path, format!("{what}: riemann components need a dimension")))?;
            let e = entries(r).map_err(|m| parse_err(path, format!("{what}: {m}")))?;
            CurvatureTensor::from_entries(n, &e)
        }
        (None, Some(m)) => {
            if let Some(n) = dimension {
                if n != m.dimension() {
                    return Err(parse_err(
                        path,
                        format!("{what}: dimension {n} does not match the model's dimension {}", m.dimension()),
                    ));
                }
            }
            m.build()
        }
        _ => return Err(parse_err(path, format!("{what}: give exactly one of riemann or model"))),
    };
    let t = t.map_err(|e| prefix(path, what, e))?;
    t.validate(opts.tol, opts.check_bianchi).map_err(|e| prefix(path, what, e))?;
    Ok(t)
}

fn prefix(path: &Path, what: &str, e: CoreError) -> CliError {
    match e {
        CoreError::Validation(m) => parse_err(path, format!("{what}: {m}")),
        other => CliError::Core(other),
    }
}

pub fn parse_tensor(path: &Path, text: &str, opts: LoadOptions) -> CliResult<CurvatureTensor> {
    let raw: RawTensor = serde_json::from_str(text).map_err(|e| parse_err(path, e.to_string()))?;
    build(path, "tensor", raw.dimension, raw.riemann.as_deref(), raw.model.as_ref(), opts)
}

pub fn load_tensor(path: &Path, opts: LoadOptions) -> CliResult<CurvatureTensor> {
    parse_tensor(path, &read(path)?, opts)
}

/// Parses a field file; a plain tensor file becomes one sample of weight 1.
pub fn parse_field(path: &Path, text: &str, opts: LoadOptions) -> CliResult<CurvatureField> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(path, e.to_string()))?;
    if value.get("samples").is_none() {
        return Ok(CurvatureField::new(vec![(1.0, parse_tensor(path, text, opts)?)])?);
    }
    let raw: RawField = serde_json::from_value(value).map_err(|e| parse_err(path, e.to_string()))?;
    let samples = raw
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let what = format!("sample {i}");
            let t = build(path, &what, raw.dimension, s.riemann.as_deref(), s.model.as_ref(), opts)?;
            Ok((s.weight, t))
        })
        .collect::<CliResult<Vec<_>>>()?;
    CurvatureField::new(samples).map_err(|e| prefix(path, "field", e))
}

pub fn load_field(path: &Path, opts: LoadOptions) -> CliResult<CurvatureField> {
    parse_field(path, &read(path)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use curvop_core::zoo::product;

    const OPTS: LoadOptions = LoadOptions { tol: 1e-9, check_bianchi: true };

    #[test]
    fn round_trips_through_zoo_format() {
        let t = product(&[(2, 1.0), (2, 1.0)]).unwrap();
        let text = crate::json::to_stable_string(&TensorFile::from_tensor(&t));
        assert_eq!(parse_tensor(Path::new("x"), &text, OPTS).unwrap(), t);
    }

    #[test]
    fn model_files_load() {
        let text = r#"{"model": {"kind": "space_form", "dimension": 4, "curvature": 1.0}}"#;
        let t = parse_tensor(Path::new("x"), text, OPTS).unwrap();
        assert_eq!(t.get(0, 1, 0, 1), 1.0);
    }

    #[test]
    fn bad_entries_are_named() {
        let text = r#"{"dimension": 4, "riemann": [[0, 1, 0, 1, 1.0], [0, 5, 0, 5, 1.0]]}"#;
        let e = parse_tensor(Path::new("bad.json"), text, OPTS).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("entry 1"), "{e}");
        let text = r#"{"dimension": 4, "riemann": [[0, 1, 0, 1.5, 1.0]]}"#;
        assert!(parse_tensor(Path::new("x"), text, OPTS).is_err());
    }

    #[test]
    fn bianchi_failure_can_be_skipped() {
        // A lone R_{0123} breaks the first Bianchi identity.
        let text = r#"{"dimension": 4, "riemann": [[0, 1, 2, 3, 1.0]]}"#;
        assert!(parse_tensor(Path::new("x"), text, OPTS).is_err());
        let loose = LoadOptions { check_bianchi: false, ..OPTS };
        assert!(parse_tensor(Path::new("x"), text, loose).is_ok());
    }

    #[test]
    fn fields_load() {
        let text = r#"{"dimension": 4, "samples": [
            {"weight": 0.5, "model": {"kind": "space_form", "dimension": 4, "curvature": 1.0}},
            {"weight": 1.5, "riemann": [[0, 1, 0, 1, 1.0]]}]}"#;
        let f = parse_field(Path::new("x"), text, OPTS).unwrap();
        assert_eq!(f.samples().len(), 2);
        assert_eq!(f.total_volume(), 2.0);
        let text = r#"{"dimension": 4, "samples": [{"weight": -1.0, "riemann": []}]}"#;
        assert_eq!(parse_field(Path::new("x"), text, OPTS).unwrap_err().exit_code(), 2);
        let text = r#"{"dimension": 4, "samples": []}"#;
        assert_eq!(parse_field(Path::new("x"), text, OPTS).unwrap_err().exit_code(), 2);
    }
}
