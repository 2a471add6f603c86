use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is singular (det = 0)")]
    SingularMatrix,

    #[error("matrix is not hyperbolic: {0}")]
    NotHyperbolic(String),

    #[error("map has nonzero degree ({0}, {1}); a degree-0 map is required")]
    NonzeroDegree(i64, i64),

    #[error("m * (I - A)^-1 * deg_h is not integral for m = {0}")]
    NonIntegralDegree(u64),

    #[error("lift is undersampled: wrapped increment {increment:.3} at sample {index} (limit 0.45)")]
    UndersampledLift { index: usize, increment: f64 },

    #[error("mode cutoff {cutoff} too large for {samples} samples (need samples >= 2*cutoff + 2)")]
    CutoffTooLarge { cutoff: usize, samples: usize },

    #[error("enumeration budget exceeded: {needed} points requested, budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },

    #[error("branches of the degree-{m} torus collide at fiber 0 (distance {distance:e})")]
    DistinctnessFailure { m: u64, distance: f64 },

    #[error("cost guard exceeded: {0}")]
    CostGuard(String),

    #[error("value does not fit in a machine integer: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid configuration:\n{}", .0.iter().map(|v| format!("  {v}")).collect::<Vec<_>>().join("\n"))]
    Validation(Vec<Violation>),

    #[error("verification failed: {}", .0.join(", "))]
    Verification(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One failed validation rule, keyed by the config field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl Error {
    /// Process exit code: 1 usage/parse, 2 inadmissible system, 3 verification failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NotHyperbolic(_) | Error::SingularMatrix => 2,
            Error::Validation(v) if v.iter().any(|v| v.path == "matrix") => 2,
            Error::Parse(_) | Error::Validation(_) => 1,
            Error::Verification(_) | Error::DistinctnessFailure { .. } => 3,
            _ => 1,
        }
    }
}
