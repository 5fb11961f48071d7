//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("failed to parse mesh file: {0}")]
    MeshParse(String),

    #[error("mesh is not watertight: {0}")]
    NotWatertight(String),

    #[error("mesh has inconsistently wound faces: {0}")]
    InconsistentWinding(String),

    #[error("degenerate face {face}: {reason}")]
    DegenerateFace { face: usize, reason: String },

    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),

    #[error("field/matrix does not belong to this mesh")]
    MeshMismatch,

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),

    #[error("linear solver failed: {reason}{}", condition_suffix(.condition))]
    SolverFailure {
        reason: String,
        condition: Option<f64>,
    },

    #[error("iteration diverged after {iterations} sweeps (residual {residual:.3e})")]
    Divergence { iterations: usize, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("matrix is not positive definite (eigenvalue {eigenvalue:.6e} <= 0)")]
    NotPositiveDefinite { eigenvalue: f64 },

    #[error("impedance resonance degeneracy: 1 + h S / C vanishes")]
    ResonanceDegeneracy,

    #[error("momentum-transfer coverage incomplete: {missing} of {required} lattice points missing (first gaps: {examples})")]
    Coverage {
        missing: usize,
        required: usize,
        examples: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

fn condition_suffix(condition: &Option<f64>) -> String {
    match condition {
        Some(c) => format!(" (condition estimate {c:.3e})"),
        None => String::new(),
    }
}

impl Error {
    /// Coarse classification used by the CLI to pick an exit code.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::MeshParse(_)
                | Error::NotWatertight(_)
                | Error::InconsistentWinding(_)
                | Error::DegenerateFace { .. }
                | Error::DegenerateMesh(_)
                | Error::MeshMismatch
                | Error::InsufficientData(_)
                | Error::Coverage { .. }
                | Error::Io(_)
        )
    }
}
