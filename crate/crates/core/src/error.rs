use thiserror::Error;

use crate::registry::ModeId;

pub type Result<T, E = FockError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("environment mode for element `{element}` port {port} already registered")]
    DuplicateEnvironment { element: String, port: ModeId },

    #[error("mode {0} is not registered")]
    UnknownMode(ModeId),

    #[error("two-mode element needs distinct modes, got {0} twice")]
    SameMode(ModeId),

    #[error("mode {mode} would hold {count} photons, cap is {cap}")]
    OccupationCap { mode: ModeId, count: u32, cap: u8 },

    #[error("occupation vector has {got} entries, registry has {expected}")]
    OccupationLength { expected: usize, got: usize },

    #[error("environment mode {0} is already excited")]
    EnvironmentExcited(ModeId),

    #[error("{name} = {value} is outside (0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("mode set is empty")]
    EmptyModeSet,

    #[error("state is not normalized (norm^2 = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("mode sets do not match")]
    ModeMismatch,

    #[error("states live on different registries")]
    RegistryMismatch,

    #[error("registries share mode {0}")]
    OverlappingModes(ModeId),

    #[error("outcome was rejected by post-selection")]
    RejectedOutcome,

    #[error("fidelity has imaginary residue {0}")]
    ComplexFidelity(f64),

    #[error("malformed state dump line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
