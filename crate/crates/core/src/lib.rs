//! Few-photon Fock-space simulation of lossy linear optics with cross-Kerr
//! media, built around a two-party teleportation setup.
//!
//! Loss is never applied as a non-unitary map. Each absorbing port couples
//! to its own vacuum environment mode, so every state stays pure on the
//! enlarged space and reduced states come from an explicit partial trace.

pub mod density;
pub mod elements;
pub mod error;
pub mod formulas;
pub mod registry;
pub mod state;
pub mod stations;

pub use density::{fidelity, partial_trace, DensityMatrix};
pub use elements::{
    apply_beam_splitter, apply_cross_kerr, apply_detector_loss, apply_loss_coupler,
    apply_phase_plate, measure_modes, BeamSplitterParams, CrossKerrParams, DetectorParams,
    Measurement, OpticalElement, PhasePlateParams,
};
pub use error::{FockError, Result};
pub use num_complex::Complex64;
pub use registry::{ModeId, ModeKind, ModeRegistry};
pub use state::{FockStateVector, OccupationVector};
pub use stations::{
    bob_correct, build_quantum_channel, prepare_input, run_protocol, BellLabel, BellOutcome,
    BobSetting, Classification, InputStateSpec, NoiseProfile,
};
