use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Operands of incompatible or unsupported dimension.
    Dimension(String),
    /// A frame whose rows are not orthonormal.
    Frame { residual: f64 },
    /// An iterative method did not converge.
    Numerical(String),
    /// A scalar argument outside its admissible range.
    Range(String),
    /// An input violates an operation's precondition.
    Precondition(String),
    /// The Weyl tensor is not small enough to treat the input as conformally flat.
    NotConformallyFlat { weyl_norm_sq: f64, tol: f64 },
    /// Two independently computed sides of an identity disagree.
    InternalConsistency(String),
    /// Parameters do not match what the requested check needs.
    Usage(String),
    /// A curvature field without samples.
    EmptyField,
    /// A tensor fails symmetry or Bianchi validation.
    Validation(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension(m) => write!(f, "dimension error: {m}"),
            Error::Frame { residual } => {
                write!(f, "frame is not orthonormal (max |F F^T - I| = {residual:e})")
            }
            Error::Numerical(m) => write!(f, "numerical error: {m}"),
            Error::Range(m) => write!(f, "range error: {m}"),
            Error::Precondition(m) => write!(f, "precondition violated: {m}"),
            Error::NotConformallyFlat { weyl_norm_sq, tol } => write!(
                f,
                "not conformally flat: |W|^2 = {weyl_norm_sq:e} exceeds tolerance {tol:e}"
            ),
            Error::InternalConsistency(m) => write!(f, "internal consistency error: {m}"),
            Error::Usage(m) => write!(f, "usage error: {m}"),
            Error::EmptyField => f.write_str("curvature field has no samples"),
            Error::Validation(m) => write!(f, "validation error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
