//! Optical elements acting on a [`FockStateVector`].
//!
//! Every absorbing element is dilated: each lossy port gets a fresh vacuum
//! environment mode and a real two-mode coupler moves amplitude into it.
//! Nothing is ever destroyed, so the global norm and the photon number summed
//! over system and environment are conserved exactly.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::registry::ModeId;
use crate::state::{FockStateVector, OccupationVector};

fn check_probability(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(FockError::InvalidProbability { name, value })
    }
}

/// Symmetric beam splitter with transmission `cos(theta)` and reflection
/// `i sin(theta)`, preceded by absorption with survival `kappa` per port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    pub theta: f64,
    pub kappa: f64,
}

impl BeamSplitterParams {
    pub fn new(theta: f64, kappa: f64) -> Result<Self> {
        check_probability("kappa", kappa)?;
        Ok(BeamSplitterParams { theta, kappa })
    }

    /// 50/50 splitter.
    pub fn balanced(kappa: f64) -> Result<Self> {
        Self::new(FRAC_PI_4, kappa)
    }

    pub fn transmission(&self) -> Complex64 {
        Complex64::new(self.theta.cos(), 0.0)
    }

    pub fn reflection(&self) -> Complex64 {
        Complex64::new(0.0, self.theta.sin())
    }

    /// Gamma = 1 - kappa.
    pub fn damping(&self) -> f64 {
        1.0 - self.kappa
    }
}

/// Cross-Kerr medium imprinting `exp(-i phi n_a n_b)`, with survival `eta`
/// on each mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossKerrParams {
    pub phi: f64,
    pub eta: f64,
}

impl CrossKerrParams {
    pub fn new(phi: f64, eta: f64) -> Result<Self> {
        check_probability("eta", eta)?;
        Ok(CrossKerrParams { phi, eta })
    }

    /// Lambda = 1 - eta.
    pub fn damping(&self) -> f64 {
        1.0 - self.eta
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePlateParams {
    pub phi: f64,
    pub varkappa: f64,
}

impl PhasePlateParams {
    pub fn new(phi: f64, varkappa: f64) -> Result<Self> {
        check_probability("varkappa", varkappa)?;
        Ok(PhasePlateParams { phi, varkappa })
    }

    pub fn damping(&self) -> f64 {
        1.0 - self.varkappa
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorParams {
    pub epsilon: f64,
}

impl DetectorParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        check_probability("epsilon", epsilon)?;
        Ok(DetectorParams { epsilon })
    }
}

const FACTORIAL: [f64; 7] = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0, 720.0];

fn binomial(n: usize, k: usize) -> f64 {
    FACTORIAL[n] / (FACTORIAL[k] * FACTORIAL[n - k])
}

/// Linear two-mode transform of creation operators:
/// `a+ -> u[0][0] a+ + u[1][0] b+`, `b+ -> u[0][1] a+ + u[1][1] b+`.
fn mix_modes(
    state: &mut FockStateVector,
    pa: usize,
    pb: usize,
    u: [[Complex64; 2]; 2],
) -> Result<()> {
    let mut out: BTreeMap<OccupationVector, Complex64> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let (na, nb) = (occ.0[pa] as usize, occ.0[pb] as usize);
        if na == 0 && nb == 0 {
            *out.entry(occ.clone()).or_default() += amp;
            continue;
        }
        let n = na + nb;
        // Coefficients of a+^k b+^(n-k) in the expanded product.
        let mut poly = [Complex64::default(); 7];
        for i in 0..=na {
            let ci = binomial(na, i) * u[0][0].powu(i as u32) * u[1][0].powu((na - i) as u32);
            for j in 0..=nb {
                let cj = binomial(nb, j) * u[0][1].powu(j as u32) * u[1][1].powu((nb - j) as u32);
                poly[i + j] += ci * cj;
            }
        }
        let inv = (FACTORIAL[na] * FACTORIAL[nb]).sqrt().recip();
        for (k, coeff) in poly.iter().enumerate().take(n + 1) {
            if *coeff == Complex64::default() {
                continue;
            }
            let mut counts = occ.0.clone();
            if k > u8::MAX as usize || n - k > u8::MAX as usize {
                unreachable!("photon counts bounded by the cap");
            }
            counts[pa] = k as u8;
            counts[pb] = (n - k) as u8;
            let weight = (FACTORIAL[k] * FACTORIAL[n - k]).sqrt() * inv;
            *out.entry(OccupationVector(counts)).or_default() += amp * coeff * weight;
        }
    }
    state.replace_terms(out)
}

fn distinct(state: &FockStateVector, a: ModeId, b: ModeId) -> Result<(usize, usize)> {
    if a == b {
        return Err(FockError::SameMode(a));
    }
    Ok((state.registry().require(a)?, state.registry().require(b)?))
}

/// Couple `mode` to the vacuum environment mode `env`, keeping amplitude
/// `sqrt(survival)` per photon in `mode`.
pub fn apply_loss_coupler(
    state: &mut FockStateVector,
    mode: ModeId,
    survival: f64,
    env: ModeId,
) -> Result<()> {
    check_probability("survival", survival)?;
    let (pm, pe) = distinct(state, mode, env)?;
    if state.terms().any(|(occ, _)| occ.0[pe] != 0) {
        return Err(FockError::EnvironmentExcited(env));
    }
    if survival == 1.0 {
        return Ok(());
    }
    let keep = Complex64::new(survival.sqrt(), 0.0);
    let leak = Complex64::new((1.0 - survival).sqrt(), 0.0);
    mix_modes(state, pm, pe, [[keep, -leak], [leak, keep]])
}

/// Fresh environment for `(element, mode)` followed by a loss coupler.
fn absorb(
    state: &mut FockStateVector,
    element: &str,
    mode: ModeId,
    survival: f64,
) -> Result<ModeId> {
    state.registry().require(mode)?;
    let env = state.register_environment_mode(element, mode)?;
    apply_loss_coupler(state, mode, survival, env)?;
    Ok(env)
}

/// Ideal `exp[i theta (a+ b + b+ a)]` without absorption.
pub fn apply_ideal_beam_splitter(
    state: &mut FockStateVector,
    a: ModeId,
    b: ModeId,
    theta: f64,
) -> Result<()> {
    let (pa, pb) = distinct(state, a, b)?;
    let t = Complex64::new(theta.cos(), 0.0);
    let r = Complex64::new(0.0, theta.sin());
    mix_modes(state, pa, pb, [[t, r], [r, t]])
}

/// Absorbing beam splitter: loss on both input ports, then ideal mixing.
pub fn apply_beam_splitter(
    state: &mut FockStateVector,
    element: &str,
    a: ModeId,
    b: ModeId,
    params: &BeamSplitterParams,
) -> Result<()> {
    check_probability("kappa", params.kappa)?;
    distinct(state, a, b)?;
    absorb(state, element, a, params.kappa)?;
    absorb(state, element, b, params.kappa)?;
    apply_ideal_beam_splitter(state, a, b, params.theta)
}

/// Absorbing cross-Kerr medium. Absorption acts first, so a photon lost in
/// the medium carries no conditional phase.
pub fn apply_cross_kerr(
    state: &mut FockStateVector,
    element: &str,
    a: ModeId,
    b: ModeId,
    params: &CrossKerrParams,
) -> Result<()> {
    check_probability("eta", params.eta)?;
    let (pa, pb) = distinct(state, a, b)?;
    absorb(state, element, a, params.eta)?;
    absorb(state, element, b, params.eta)?;
    let phi = params.phi;
    state.map_amplitudes(|occ, amp| {
        let n = (occ.0[pa] as u32 * occ.0[pb] as u32) as f64;
        amp * Complex64::from_polar(1.0, -phi * n)
    });
    Ok(())
}

/// Absorbing phase plate: loss, then `exp(i phi n)`.
pub fn apply_phase_plate(
    state: &mut FockStateVector,
    element: &str,
    mode: ModeId,
    params: &PhasePlateParams,
) -> Result<()> {
    check_probability("varkappa", params.varkappa)?;
    let pm = state.registry().require(mode)?;
    absorb(state, element, mode, params.varkappa)?;
    let phi = params.phi;
    state.map_amplitudes(|occ, amp| amp * Complex64::from_polar(1.0, phi * occ.0[pm] as f64));
    Ok(())
}

/// Finite detector efficiency, modelled as absorption in front of an ideal
/// photon-number-resolving readout.
pub fn apply_detector_loss(
    state: &mut FockStateVector,
    element: &str,
    mode: ModeId,
    params: &DetectorParams,
) -> Result<()> {
    check_probability("epsilon", params.epsilon)?;
    absorb(state, element, mode, params.epsilon)?;
    Ok(())
}

/// Lossless exchange of two output ports (crossed fibres).
pub fn cross_ports(state: &mut FockStateVector, a: ModeId, b: ModeId) -> Result<()> {
    let (pa, pb) = distinct(state, a, b)?;
    state.swap_positions(pa, pb);
    Ok(())
}

/// One photon-number pattern of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Counts on the measured modes, in the order they were requested.
    pub pattern: Vec<u8>,
    pub probability: f64,
    /// Normalized post-measurement state on the unmeasured modes.
    pub state: FockStateVector,
}

/// Photon-number-resolving measurement of `modes`. Patterns come out in
/// lexicographic order.
pub fn measure_modes(state: &FockStateVector, modes: &[ModeId]) -> Result<Vec<Measurement>> {
    if modes.is_empty() {
        return Err(FockError::EmptyModeSet);
    }
    state.ensure_normalized(crate::density::NORM_TOLERANCE)?;
    let mut seen = Vec::with_capacity(modes.len());
    for m in modes {
        if seen.contains(m) {
            return Err(FockError::SameMode(*m));
        }
        seen.push(*m);
    }
    state
        .split_on(modes)?
        .into_iter()
        .map(|(pattern, mut rest)| {
            let probability = rest.normalize()?;
            Ok(Measurement {
                pattern,
                probability,
                state: rest,
            })
        })
        .collect()
}

/// A configured element, for building circuits as data.
#[derive(Debug, Clone, PartialEq)]
pub enum OpticalElement {
    BeamSplitter {
        label: String,
        a: ModeId,
        b: ModeId,
        params: BeamSplitterParams,
    },
    CrossKerr {
        label: String,
        a: ModeId,
        b: ModeId,
        params: CrossKerrParams,
    },
    PhasePlate {
        label: String,
        mode: ModeId,
        params: PhasePlateParams,
    },
    Detector {
        label: String,
        mode: ModeId,
        params: DetectorParams,
    },
}

impl OpticalElement {
    pub fn label(&self) -> &str {
        match self {
            OpticalElement::BeamSplitter { label, .. }
            | OpticalElement::CrossKerr { label, .. }
            | OpticalElement::PhasePlate { label, .. }
            | OpticalElement::Detector { label, .. } => label,
        }
    }

    pub fn apply(&self, state: &mut FockStateVector) -> Result<()> {
        match self {
            OpticalElement::BeamSplitter {
                label,
                a,
                b,
                params,
            } => apply_beam_splitter(state, label, *a, *b, params),
            OpticalElement::CrossKerr {
                label,
                a,
                b,
                params,
            } => apply_cross_kerr(state, label, *a, *b, params),
            OpticalElement::PhasePlate {
                label,
                mode,
                params,
            } => apply_phase_plate(state, label, *mode, params),
            OpticalElement::Detector {
                label,
                mode,
                params,
            } => apply_detector_loss(state, label, *mode, params),
        }
    }
}
