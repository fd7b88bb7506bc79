use thiserror::Error;

/// Errors raised by the solvers and their input validation.
#[derive(Debug, Error)]
pub enum LatticeError {
    #[error("invalid geometry: {0}")]
    Geometry(String),
    #[error("invalid frequency: {0}")]
    Frequency(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("mode {j} out of range 1..={max}")]
    ModeIndex { j: i64, max: i64 },
    #[error("mode {0} is below cut-off")]
    BelowCutoff(usize),
    #[error("degenerate root: {0}")]
    DegenerateRoot(String),
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("resonant configuration: {0}")]
    Resonant(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("confluent pole at mode {0}")]
    ConfluentPole(usize),
    #[error("quadrature did not converge: achieved {achieved:.3e} with {nodes} nodes")]
    NonConvergence { achieved: f64, nodes: usize },
    #[error("window error: {0}")]
    Window(String),
    #[error("config error: {0}")]
    Config(String),
}

impl LatticeError {
    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            LatticeError::Geometry(_)
            | LatticeError::Frequency(_)
            | LatticeError::ModeIndex { .. }
            | LatticeError::BelowCutoff(_)
            | LatticeError::Unsupported(_)
            | LatticeError::Window(_)
            | LatticeError::Config(_)
            | LatticeError::Domain(_) => 2,
            LatticeError::DegenerateRoot(_)
            | LatticeError::Degenerate(_)
            | LatticeError::Resonant(_)
            | LatticeError::ConfluentPole(_) => 3,
            LatticeError::NonConvergence { .. } => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, LatticeError>;
