//! The three stations of the teleportation setup and the end-to-end run.
//!
//! Mode layout: 1,2 carry the dual-rail input qubit, 3–6 the shared channel
//! (3,4 go to Alice, 5,6 to Bob).
//!
//! * Channel: one photon enters BS1 at mode 3 and one enters BS2 at mode 5;
//!   BS1(3,4), BS2(5,6), a pi cross-Kerr KM1 between modes 4 and 6, BS3(5,6).
//! * Alice: Mach–Zehnder BS4(3,4) … BS5(3,4) whose mode-4 arm meets mode 2
//!   in KM2, then BS6(1,2) with crossed output ports, then detectors D1–D4.
//! * Bob: Mach–Zehnder BS7(5,6) … BS8(5,6) with plate phi1 in the mode-5
//!   arm, followed by plates phi2 on mode 5 and phi3 on mode 6.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use num_complex::Complex64;

use crate::density::{fidelity, partial_trace};
use crate::elements::{
    apply_beam_splitter, apply_cross_kerr, apply_detector_loss, apply_phase_plate, cross_ports,
    measure_modes, BeamSplitterParams, CrossKerrParams, DetectorParams, PhasePlateParams,
};
use crate::error::{FockError, Result};
use crate::registry::{ModeId, ModeRegistry};
use crate::state::FockStateVector;

/// Element labels; environment modes are keyed by these.
pub mod labels {
    pub const BS1: &str = "BS1";
    pub const BS2: &str = "BS2";
    pub const BS3: &str = "BS3";
    pub const BS4: &str = "BS4";
    pub const BS5: &str = "BS5";
    pub const BS6: &str = "BS6";
    pub const BS7: &str = "BS7";
    pub const BS8: &str = "BS8";
    pub const KM1: &str = "KM1";
    pub const KM2: &str = "KM2";
    pub const PHI1: &str = "PHI1";
    pub const PHI2: &str = "PHI2";
    pub const PHI3: &str = "PHI3";
    pub const DETECTORS: [&str; 4] = ["D1", "D2", "D3", "D4"];
}

/// Kerr phase used by both media.
pub const KERR_PHASE: f64 = PI;

const NORM_SLACK: f64 = 1e-12;

fn m(label: u8) -> ModeId {
    ModeId::system(label)
}

/// Qubit `c1|0,1> + c2|1,0>` to be teleported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputStateSpec {
    c1: Complex64,
    c2: Complex64,
}

impl InputStateSpec {
    pub fn new(c1: Complex64, c2: Complex64) -> Result<Self> {
        let norm_sqr = c1.norm_sqr() + c2.norm_sqr();
        if !norm_sqr.is_finite() || (norm_sqr - 1.0).abs() > NORM_SLACK {
            return Err(FockError::NotNormalized { norm_sqr });
        }
        Ok(InputStateSpec { c1, c2 })
    }

    /// `c1 = cos(gamma)`, `c2 = sin(gamma) e^{i lambda}`.
    pub fn from_angles(gamma: f64, lambda: f64) -> Self {
        InputStateSpec {
            c1: Complex64::new(gamma.cos(), 0.0),
            c2: Complex64::from_polar(gamma.sin(), lambda),
        }
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn c2(&self) -> Complex64 {
        self.c2
    }
}

/// Survival probabilities of every lossy component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseProfile {
    /// Beam splitters.
    pub kappa: f64,
    /// Cross-Kerr media.
    pub eta: f64,
    /// Detector efficiency.
    pub epsilon: f64,
    /// Phase plates.
    pub varkappa: f64,
}

impl Default for NoiseProfile {
    fn default() -> Self {
        NoiseProfile {
            kappa: 0.98,
            eta: 0.98,
            epsilon: 0.7,
            varkappa: 1.0,
        }
    }
}

impl NoiseProfile {
    pub fn new(kappa: f64, eta: f64, epsilon: f64, varkappa: f64) -> Result<Self> {
        let p = NoiseProfile {
            kappa,
            eta,
            epsilon,
            varkappa,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn ideal() -> Self {
        NoiseProfile {
            kappa: 1.0,
            eta: 1.0,
            epsilon: 1.0,
            varkappa: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("kappa", self.kappa),
            ("eta", self.eta),
            ("epsilon", self.epsilon),
            ("varkappa", self.varkappa),
        ] {
            if !(value > 0.0 && value <= 1.0) {
                return Err(FockError::InvalidProbability { name, value });
            }
        }
        Ok(())
    }

    /// xi = kappa / 2.
    pub fn xi(&self) -> f64 {
        self.kappa / 2.0
    }

    fn beam_splitter(&self) -> Result<BeamSplitterParams> {
        BeamSplitterParams::balanced(self.kappa)
    }

    fn kerr(&self) -> Result<CrossKerrParams> {
        CrossKerrParams::new(KERR_PHASE, self.eta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
    ];

    /// Detector pattern on modes 1–4 that heralds this Bell state.
    pub fn pattern(self) -> [u8; 4] {
        match self {
            BellLabel::PsiPlus => [0, 1, 1, 0],
            BellLabel::PsiMinus => [1, 0, 1, 0],
            BellLabel::PhiPlus => [1, 0, 0, 1],
            BellLabel::PhiMinus => [0, 1, 0, 1],
        }
    }

    pub fn from_pattern(pattern: &[u8]) -> Option<BellLabel> {
        BellLabel::ALL.into_iter().find(|l| l.pattern() == pattern)
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PsiPlus => "Psi+",
            BellLabel::PsiMinus => "Psi-",
            BellLabel::PhiPlus => "Phi+",
            BellLabel::PhiMinus => "Phi-",
        }
    }

    /// `(|0110> ± |1001>)/sqrt2` for Psi, `(|0101> ± |1010>)/sqrt2` for Phi,
    /// on modes 1–4.
    pub fn state(self) -> FockStateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (first, second, sign) = match self {
            BellLabel::PsiPlus => ([0, 1, 1, 0], [1, 0, 0, 1], 1.0),
            BellLabel::PsiMinus => ([0, 1, 1, 0], [1, 0, 0, 1], -1.0),
            BellLabel::PhiPlus => ([0, 1, 0, 1], [1, 0, 1, 0], 1.0),
            BellLabel::PhiMinus => ([0, 1, 0, 1], [1, 0, 1, 0], -1.0),
        };
        FockStateVector::from_terms(
            ModeRegistry::with_system_modes(1..=4),
            [
                (first.to_vec(), Complex64::new(r, 0.0)),
                (second.to_vec(), Complex64::new(sign * r, 0.0)),
            ],
        )
        .expect("two-term Bell state is well formed")
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Accepted(BellLabel),
    Rejected,
}

impl Classification {
    /// Accepted iff exactly one photon in {1,2} and exactly one in {3,4}.
    pub fn of_pattern(pattern: &[u8; 4]) -> Self {
        if pattern[0] + pattern[1] == 1 && pattern[2] + pattern[3] == 1 {
            Classification::Accepted(
                BellLabel::from_pattern(pattern).expect("every one-one pattern is a Bell pattern"),
            )
        } else {
            Classification::Rejected
        }
    }

    pub fn label(&self) -> Option<BellLabel> {
        match self {
            Classification::Accepted(l) => Some(*l),
            Classification::Rejected => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    pub pattern: [u8; 4],
    pub probability: f64,
    /// Normalized state of modes 5, 6 and every environment mode.
    pub conditional_state: FockStateVector,
    pub classification: Classification,
}

/// Phases of Bob's three plates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BobSetting {
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
}

impl BobSetting {
    /// `None` means Bob leaves the modes alone.
    pub fn for_label(label: BellLabel) -> Option<BobSetting> {
        let three_halves = PI + FRAC_PI_2;
        match label {
            BellLabel::PsiPlus => None,
            // sigma_z
            BellLabel::PsiMinus => Some(BobSetting {
                phi1: PI,
                phi2: PI,
                phi3: PI,
            }),
            // sigma_x
            BellLabel::PhiPlus => Some(BobSetting {
                phi1: 0.0,
                phi2: three_halves,
                phi3: three_halves,
            }),
            // sigma_y
            BellLabel::PhiMinus => Some(BobSetting {
                phi1: 0.0,
                phi2: PI,
                phi3: 0.0,
            }),
        }
    }
}

/// `c1|0,1>_12 + c2|1,0>_12`, prepared without loss.
pub fn prepare_input(spec: &InputStateSpec) -> FockStateVector {
    FockStateVector::from_terms(
        ModeRegistry::with_system_modes([1, 2]),
        [(vec![0, 1], spec.c1), (vec![1, 0], spec.c2)],
    )
    .expect("input qubit is well formed")
}

/// Entangled resource on modes 3–6 plus the channel's environment modes.
pub fn build_quantum_channel(noise: &NoiseProfile) -> Result<FockStateVector> {
    noise.validate()?;
    let bs = noise.beam_splitter()?;
    let mut state = FockStateVector::from_terms(
        ModeRegistry::with_system_modes(3..=6),
        [(vec![1, 0, 1, 0], Complex64::new(1.0, 0.0))],
    )?;
    apply_beam_splitter(&mut state, labels::BS1, m(3), m(4), &bs)?;
    apply_beam_splitter(&mut state, labels::BS2, m(5), m(6), &bs)?;
    apply_cross_kerr(&mut state, labels::KM1, m(4), m(6), &noise.kerr()?)?;
    apply_beam_splitter(&mut state, labels::BS3, m(5), m(6), &bs)?;
    Ok(state)
}

/// Lossless channel state `(i/sqrt2)(|0110> + |1001>)` on modes 3–6.
pub fn ideal_channel() -> FockStateVector {
    let amp = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    FockStateVector::from_terms(
        ModeRegistry::with_system_modes(3..=6),
        [(vec![0, 1, 1, 0], amp), (vec![1, 0, 0, 1], amp)],
    )
    .expect("channel state is well formed")
}

/// Fidelity of the traced lossy channel with [`ideal_channel`].
pub fn simulated_channel_fidelity(noise: &NoiseProfile) -> Result<f64> {
    let state = build_quantum_channel(noise)?;
    let rho = partial_trace(&state, &[m(3), m(4), m(5), m(6)])?;
    fidelity(&rho, &ideal_channel())
}

/// Alice's analyzer up to (but excluding) the photon counting. Needs modes
/// 1–4; anything else in the state rides along untouched.
pub fn alice_premeasure(joint: &FockStateVector, noise: &NoiseProfile) -> Result<FockStateVector> {
    noise.validate()?;
    let bs = noise.beam_splitter()?;
    let mut state = joint.clone();
    apply_beam_splitter(&mut state, labels::BS4, m(3), m(4), &bs)?;
    apply_cross_kerr(&mut state, labels::KM2, m(2), m(4), &noise.kerr()?)?;
    apply_beam_splitter(&mut state, labels::BS5, m(3), m(4), &bs)?;
    apply_beam_splitter(&mut state, labels::BS6, m(1), m(2), &bs)?;
    cross_ports(&mut state, m(1), m(2))?;
    let det = DetectorParams::new(noise.epsilon)?;
    for (label, mode) in labels::DETECTORS.iter().zip(1..=4) {
        apply_detector_loss(&mut state, label, m(mode), &det)?;
    }
    Ok(state)
}

/// Same as [`alice_premeasure`] but without detector absorption, i.e. the
/// field arriving at the detectors.
pub fn alice_analyzer_field(
    input: &FockStateVector,
    noise: &NoiseProfile,
) -> Result<FockStateVector> {
    alice_premeasure(
        input,
        &NoiseProfile {
            epsilon: 1.0,
            ..*noise
        },
    )
}

/// Count photons on modes 1–4 and classify every pattern.
pub fn measure_alice(premeasured: &FockStateVector) -> Result<Vec<BellOutcome>> {
    let modes = [m(1), m(2), m(3), m(4)];
    Ok(measure_modes(premeasured, &modes)?
        .into_iter()
        .map(|meas| {
            let pattern: [u8; 4] = meas
                .pattern
                .as_slice()
                .try_into()
                .expect("four measured modes");
            BellOutcome {
                pattern,
                probability: meas.probability,
                conditional_state: meas.state,
                classification: Classification::of_pattern(&pattern),
            }
        })
        .collect())
}

/// Full protocol; rejected patterns are kept so probabilities sum to one.
pub fn run_protocol(spec: &InputStateSpec, noise: &NoiseProfile) -> Result<Vec<BellOutcome>> {
    let joint = prepare_input(spec).tensor(&build_quantum_channel(noise)?)?;
    measure_alice(&alice_premeasure(&joint, noise)?)
}

/// Bob's rotation for a heralded outcome.
pub fn bob_correct(outcome: &BellOutcome, noise: &NoiseProfile) -> Result<FockStateVector> {
    let label = outcome
        .classification
        .label()
        .ok_or(FockError::RejectedOutcome)?;
    noise.validate()?;
    let mut state = outcome.conditional_state.clone();
    let Some(setting) = BobSetting::for_label(label) else {
        return Ok(state);
    };
    let bs = noise.beam_splitter()?;
    let plate = |phi| PhasePlateParams::new(phi, noise.varkappa);
    apply_beam_splitter(&mut state, labels::BS7, m(5), m(6), &bs)?;
    apply_phase_plate(&mut state, labels::PHI1, m(5), &plate(setting.phi1)?)?;
    apply_beam_splitter(&mut state, labels::BS8, m(5), m(6), &bs)?;
    apply_phase_plate(&mut state, labels::PHI2, m(5), &plate(setting.phi2)?)?;
    apply_phase_plate(&mut state, labels::PHI3, m(6), &plate(setting.phi3)?)?;
    Ok(state)
}

/// Target `c1|0,1>_56 + c2|1,0>_56`.
pub fn teleport_target(spec: &InputStateSpec) -> FockStateVector {
    FockStateVector::from_terms(
        ModeRegistry::with_system_modes([5, 6]),
        [(vec![0, 1], spec.c1), (vec![1, 0], spec.c2)],
    )
    .expect("target qubit is well formed")
}

/// Fidelity of the reduced state on modes 5,6 with the teleport target.
pub fn teleported_fidelity(state: &FockStateVector, spec: &InputStateSpec) -> Result<f64> {
    let rho = partial_trace(state, &[m(5), m(6)])?;
    fidelity(&rho, &teleport_target(spec))
}

/// Per-outcome summary after Bob's correction.
#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub label: BellLabel,
    pub pattern: [u8; 4],
    pub probability: f64,
    pub fidelity: f64,
}

/// Run the protocol, correct every accepted outcome, and report fidelities
/// in Bell-label order. Also returns the total accepted probability.
pub fn teleport(spec: &InputStateSpec, noise: &NoiseProfile) -> Result<(Vec<TeleportReport>, f64)> {
    let outcomes = run_protocol(spec, noise)?;
    let mut reports = Vec::new();
    for outcome in &outcomes {
        if let Classification::Accepted(label) = outcome.classification {
            let corrected = bob_correct(outcome, noise)?;
            reports.push(TeleportReport {
                label,
                pattern: outcome.pattern,
                probability: outcome.probability,
                fidelity: teleported_fidelity(&corrected, spec)?,
            });
        }
    }
    reports.sort_by_key(|r| r.label);
    let accepted = reports.iter().map(|r| r.probability).sum();
    Ok((reports, accepted))
}

/// Detection statistics when a Bell state is fed straight into Alice's
/// analyzer: `(pattern, probability)` for every pattern, lexicographic.
pub fn bell_state_statistics(
    label: BellLabel,
    noise: &NoiseProfile,
) -> Result<Vec<([u8; 4], f64)>> {
    let field = alice_premeasure(&label.state(), noise)?;
    Ok(measure_alice(&field)?
        .into_iter()
        .map(|o| (o.pattern, o.probability))
        .collect())
}
