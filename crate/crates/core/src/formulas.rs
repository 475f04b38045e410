//! Closed-form expressions for the lossy protocol, used as oracles for the
//! simulator.
//!
//! Every function takes the survival probabilities `(kappa, eta)` directly
//! and derives `xi = kappa/2`, `s = sqrt(eta)`, `g = sqrt(1 - kappa)` and
//! `l = sqrt(1 - eta)` internally.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::registry::{ModeId, ModeRegistry};
use crate::state::FockStateVector;
use crate::stations::{labels, InputStateSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn check(name: &'static str, value: f64) -> Result<f64> {
    if value > 0.0 && value <= 1.0 {
        Ok(value)
    } else {
        Err(FockError::InvalidProbability { name, value })
    }
}

struct Loss {
    xi: f64,
    s: f64,
    eta: f64,
    g: f64,
    l: f64,
}

impl Loss {
    fn new(kappa: f64, eta: f64) -> Result<Self> {
        check("kappa", kappa)?;
        check("eta", eta)?;
        Ok(Loss {
            xi: kappa / 2.0,
            s: eta.sqrt(),
            eta,
            g: (1.0 - kappa).sqrt(),
            l: (1.0 - eta).sqrt(),
        })
    }
}

/// Fidelity of the lossy channel state with the ideal one:
/// `(xi^3/2)[1 + 4 sqrt(eta)(1 + eta) + eta(6 + eta)]`.
pub fn channel_fidelity(kappa: f64, eta: f64) -> Result<f64> {
    let p = Loss::new(kappa, eta)?;
    Ok(p.xi.powi(3) / 2.0 * (1.0 + 4.0 * p.s * (1.0 + eta) + eta * (6.0 + eta)))
}

/// Amplitudes of the 0110-heralded state on modes 5,6 (detectors ideal):
/// `a|0,1> + b|1,0>` plus single environment excitations with weights `c`,
/// `d`, `f` (times `sqrt(1-kappa)`) and `e` (times `sqrt(1-eta)`).
///
/// `c`: BS2 absorption at mode 5; `d`: BS3 absorption at mode 6; `e`: KM1
/// absorption at mode 6; `f`: BS3 absorption at mode 5.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalCoefficients {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
    pub e: Complex64,
    pub f: Complex64,
}

impl ConditionalCoefficients {
    /// Coefficients exactly as published, including the `e` and `f`
    /// expressions that disagree with the element relations.
    pub fn literal(spec: &InputStateSpec, kappa: f64, eta: f64) -> Result<Self> {
        let p = Loss::new(kappa, eta)?;
        let (xi, s) = (p.xi, p.s);
        let (c1, c2) = (spec.c1(), spec.c2());
        let base = Self::shared(&p, c1, c2);
        let e = xi.powf(2.5)
            * (-s * (1.0 + 0.5 * s - s * (1.0 - s) + eta) * c1
                + I * (1.0 - 1.5 * s - s * (1.0 + s) - 0.5 * eta) * c2);
        let f = xi.powf(2.5) * (I * s * (1.0 - eta) * c1 + (1.0 - 2.0 * s - eta) * c2);
        Ok(ConditionalCoefficients { e, f, ..base })
    }

    /// Published `a`–`d` with `f` carrying `(1 + eta)` in its `c1` term and
    /// `e = i f`; this set agrees with the dilated simulation.
    pub fn reconciled(spec: &InputStateSpec, kappa: f64, eta: f64) -> Result<Self> {
        let p = Loss::new(kappa, eta)?;
        let (xi, s) = (p.xi, p.s);
        let (c1, c2) = (spec.c1(), spec.c2());
        let base = Self::shared(&p, c1, c2);
        let f = xi.powf(2.5) * (I * s * (1.0 + eta) * c1 + (1.0 - 2.0 * s - eta) * c2);
        Ok(ConditionalCoefficients {
            e: I * f,
            f,
            ..base
        })
    }

    fn shared(p: &Loss, c1: Complex64, c2: Complex64) -> Self {
        let (xi, s, eta) = (p.xi, p.s, p.eta);
        let h = eta * s;
        let a = xi.powi(3) * (-s * (1.0 + s + 3.0 * eta - h) * c1 + I * (1.0 - s - eta + h) * c2);
        let b = xi.powi(3) * (I * s * (1.0 - s - eta + h) * c1 + (1.0 - 3.0 * s - eta - h) * c2);
        let c = xi.powi(2) * (I * s * (1.0 + eta) * c1 + (1.0 - 2.0 * s - eta) * c2);
        let d = xi.powf(2.5) * (-eta * (1.0 + 2.0 * s - eta) * c1 + I * s * (1.0 + eta) * c2);
        let zero = Complex64::default();
        ConditionalCoefficients {
            a,
            b,
            c,
            d,
            e: zero,
            f: zero,
        }
    }

    pub fn named(&self) -> [(&'static str, Complex64); 6] {
        [
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("e", self.e),
            ("f", self.f),
        ]
    }

    /// The unnormalized 0110-heralded state on modes 5,6 and the channel
    /// environments it involves, with ideal detectors.
    pub fn conditional_state(&self, kappa: f64, eta: f64) -> Result<FockStateVector> {
        let p = Loss::new(kappa, eta)?;
        let mut reg = ModeRegistry::with_system_modes([5, 6]);
        let envs = [
            (labels::BS2, 5, self.c * p.g),
            (labels::BS3, 6, self.d * p.g),
            (labels::KM1, 6, self.e * p.l),
            (labels::BS3, 5, self.f * p.g),
        ];
        let ids = envs
            .iter()
            .map(|(el, port, _)| reg.register_environment_mode(el, ModeId::system(*port)))
            .collect::<Result<Vec<_>>>()?;
        let width = reg.len();
        let mut terms = vec![
            (one_hot(width, &[0, 1]), self.a),
            (one_hot(width, &[1, 0]), self.b),
        ];
        for (id, (_, _, amp)) in ids.iter().zip(envs) {
            let mut counts = vec![0u8; width];
            counts[reg.require(*id)?] = 1;
            terms.push((counts, amp));
        }
        FockStateVector::from_terms(reg, terms)
    }
}

fn one_hot(width: usize, head: &[u8]) -> Vec<u8> {
    let mut v = vec![0u8; width];
    v[..head.len()].copy_from_slice(head);
    v
}

/// `N = [|a|^2 + |b|^2 + (1 - 2 xi)(|c|^2 + |d|^2 + |f|^2) + |e|^2 (1 - eta)]^(-1/2)`.
pub fn normalization(coeffs: &ConditionalCoefficients, kappa: f64, eta: f64) -> Result<f64> {
    let p = Loss::new(kappa, eta)?;
    let weight = coeffs.a.norm_sqr()
        + coeffs.b.norm_sqr()
        + (1.0 - 2.0 * p.xi) * (coeffs.c.norm_sqr() + coeffs.d.norm_sqr() + coeffs.f.norm_sqr())
        + coeffs.e.norm_sqr() * (1.0 - eta);
    if weight <= 0.0 {
        return Err(FockError::NotNormalized { norm_sqr: weight });
    }
    Ok(weight.sqrt().recip())
}

/// `N^2 (|a|^2|c1|^2 + a b* c1* c2 + a* b c1 c2* + |b|^2|c2|^2)` with the
/// given coefficients.
pub fn teleport_fidelity_with(
    coeffs: &ConditionalCoefficients,
    spec: &InputStateSpec,
    kappa: f64,
    eta: f64,
) -> Result<f64> {
    let n = normalization(coeffs, kappa, eta)?;
    let (a, b, c1, c2) = (coeffs.a, coeffs.b, spec.c1(), spec.c2());
    let overlap = a.norm_sqr() * c1.norm_sqr()
        + a * b.conj() * c1.conj() * c2
        + a.conj() * b * c1 * c2.conj()
        + b.norm_sqr() * c2.norm_sqr();
    Ok(n * n * overlap.re)
}

/// Fidelity of the 0110-heralded teleported state (reconciled coefficients).
pub fn teleport_fidelity(spec: &InputStateSpec, kappa: f64, eta: f64) -> Result<f64> {
    teleport_fidelity_with(
        &ConditionalCoefficients::reconciled(spec, kappa, eta)?,
        spec,
        kappa,
        eta,
    )
}

/// `P(0110) = N^-2 epsilon^2` (reconciled coefficients).
pub fn detection_probability_0110(
    spec: &InputStateSpec,
    kappa: f64,
    eta: f64,
    epsilon: f64,
) -> Result<f64> {
    check("epsilon", epsilon)?;
    let n = normalization(
        &ConditionalCoefficients::reconciled(spec, kappa, eta)?,
        kappa,
        eta,
    )?;
    Ok(epsilon * epsilon / (n * n))
}

/// Registry of the channel station: modes 3–6 and its eight environment
/// modes in the order the simulator allocates them.
pub fn channel_registry() -> ModeRegistry {
    let mut reg = ModeRegistry::with_system_modes(3..=6);
    for (el, port) in [
        (labels::BS1, 3),
        (labels::BS1, 4),
        (labels::BS2, 5),
        (labels::BS2, 6),
        (labels::KM1, 4),
        (labels::KM1, 6),
        (labels::BS3, 5),
        (labels::BS3, 6),
    ] {
        reg.register_environment_mode(el, ModeId::system(port))
            .expect("fixed labels are distinct");
    }
    reg
}

/// Sparse builder over a fixed registry: system counts plus a list of
/// excited environment modes.
struct Builder {
    reg: ModeRegistry,
    system: usize,
    terms: Vec<(Vec<u8>, Complex64)>,
}

impl Builder {
    fn new(reg: ModeRegistry, system: usize) -> Self {
        Builder {
            reg,
            system,
            terms: Vec::new(),
        }
    }

    fn env(&self, element: &str, port: u8) -> usize {
        let id = self
            .reg
            .find_environment(element, ModeId::system(port))
            .expect("environment registered");
        self.reg.position(id).expect("environment registered")
    }

    fn add(&mut self, system: &[u8], envs: &[(&str, u8)], amp: Complex64) {
        debug_assert_eq!(system.len(), self.system);
        let mut counts = vec![0u8; self.reg.len()];
        counts[..system.len()].copy_from_slice(system);
        for (el, port) in envs {
            counts[self.env(el, *port)] += 1;
        }
        self.terms.push((counts, amp));
    }

    fn finish(self) -> Result<FockStateVector> {
        FockStateVector::from_terms(self.reg, self.terms)
    }
}

/// The four branches of the channel state with both photons still in
/// modes 3–6: `xi^(3/2)[(1-s)|1010> + i s(1+s)|0110> + i(1+s)|1001> -
/// s(1-s)|0101>]`. Keys are occupations of modes 3,4,5,6.
pub fn channel_two_photon_branches(kappa: f64, eta: f64) -> Result<[([u8; 4], Complex64); 4]> {
    let p = Loss::new(kappa, eta)?;
    let (x, s) = (p.xi.powf(1.5), p.s);
    Ok([
        ([1, 0, 1, 0], re(x * (1.0 - s))),
        ([0, 1, 1, 0], I * x * s * (1.0 + s)),
        ([1, 0, 0, 1], I * x * (1.0 + s)),
        ([0, 1, 0, 1], re(-x * s * (1.0 - s))),
    ])
}

// Second-photon absorption amplitudes (env, weight) shared by the
// one-photon lines and the absorbed sector.
fn second_photon_absorbed(p: &Loss, kerr_sign: f64) -> [((&'static str, u8), Complex64); 4] {
    let q = p.xi.sqrt();
    [
        ((labels::BS2, 5), re(p.g)),
        ((labels::BS3, 5), re(p.g * q)),
        ((labels::KM1, 6), I * q * p.l),
        ((labels::BS3, 6), kerr_sign * I * q * p.s * p.g),
    ]
}

/// Part of the channel state where the photon launched into modes 3,4 has
/// been absorbed (no photon left in modes 3,4). Defined over
/// [`channel_registry`].
pub fn channel_absorbed_sector(kappa: f64, eta: f64) -> Result<FockStateVector> {
    let p = Loss::new(kappa, eta)?;
    let q = p.xi.sqrt();
    let first: [((&str, u8), Complex64); 2] =
        [((labels::BS1, 3), re(p.g)), ((labels::KM1, 4), I * q * p.l)];
    let mut b = Builder::new(channel_registry(), 4);
    for (env1, w1) in first {
        b.add(&[0, 0, 1, 0], &[env1], w1 * p.xi * (1.0 - p.s));
        b.add(&[0, 0, 0, 1], &[env1], w1 * I * p.xi * (1.0 + p.s));
        for (env2, w2) in second_photon_absorbed(&p, 1.0) {
            b.add(&[0, 0, 0, 0], &[env1, env2], w1 * w2);
        }
    }
    b.finish()
}

/// Complete channel state over [`channel_registry`]: two-photon branches,
/// the one-photon lines with the mode-5/6 photon absorbed, and
/// [`channel_absorbed_sector`].
pub fn channel_state(kappa: f64, eta: f64) -> Result<FockStateVector> {
    let p = Loss::new(kappa, eta)?;
    let q = p.xi.sqrt();
    let mut b = Builder::new(channel_registry(), 4);
    for (pattern, amp) in channel_two_photon_branches(kappa, eta)? {
        b.add(&pattern, &[], amp);
    }
    for (env, w) in second_photon_absorbed(&p, 1.0) {
        b.add(&[1, 0, 0, 0], &[env], q * w);
    }
    for (env, w) in second_photon_absorbed(&p, -1.0) {
        b.add(&[0, 1, 0, 0], &[env], I * q * p.s * w);
    }
    let absorbed = channel_absorbed_sector(kappa, eta)?;
    b.finish()?.added(&absorbed)
}

/// Registry of Alice's analyzer fed with modes 1–4: the four modes and the
/// eight environment modes of BS4, KM2, BS5, BS6 in allocation order.
pub fn analyzer_registry() -> ModeRegistry {
    let mut reg = ModeRegistry::with_system_modes(1..=4);
    for (el, port) in [
        (labels::BS4, 3),
        (labels::BS4, 4),
        (labels::KM2, 2),
        (labels::KM2, 4),
        (labels::BS5, 3),
        (labels::BS5, 4),
        (labels::BS6, 1),
        (labels::BS6, 2),
    ] {
        reg.register_environment_mode(el, ModeId::system(port))
            .expect("fixed labels are distinct");
    }
    reg
}

/// Sign of the Psi Bell state fed to the analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsiSign {
    Plus,
    Minus,
}

impl PsiSign {
    fn value(self) -> f64 {
        match self {
            PsiSign::Plus => 1.0,
            PsiSign::Minus => -1.0,
        }
    }
}

/// The four explicit two-photon amplitudes of `(|0110> ± |1001>)/sqrt2`
/// after Alice's analyzer (ideal detectors), keyed by the pattern on modes
/// 1–4.
pub fn analyzer_bell_branches(
    sign: PsiSign,
    kappa: f64,
    eta: f64,
) -> Result<[([u8; 4], Complex64); 4]> {
    let p = Loss::new(kappa, eta)?;
    let (s, e, sg) = (p.s, p.eta, sign.value());
    let x = p.xi.powf(1.5) * FRAC_1_SQRT_2;
    Ok([
        ([1, 0, 1, 0], re(x * ((s + e) - sg * (s + 1.0)))),
        ([0, 1, 1, 0], I * x * ((s + e) + sg * (s + 1.0))),
        ([0, 1, 0, 1], re(x * (-(s - e) + sg * (s - 1.0)))),
        ([1, 0, 0, 1], I * x * ((s - e) + sg * (s - 1.0))),
    ])
}

/// Full output of Alice's analyzer (ideal detectors) for a Psi Bell-state
/// input: explicit branches plus every absorption term, over
/// [`analyzer_registry`].
pub fn bell_state_through_analyzer(sign: PsiSign, kappa: f64, eta: f64) -> Result<FockStateVector> {
    let p = Loss::new(kappa, eta)?;
    let (xi, s, sg) = (p.xi, p.s, sign.value());
    let r = (xi * p.eta).sqrt();
    let q = xi.sqrt();
    let mut b = Builder::new(analyzer_registry(), 4);

    // Amplitudes below carry the overall 1/sqrt2 and the per-environment
    // weights g or l through `add`.
    let g = p.g;
    let l = p.l;
    let weight = |el: &str| if el == labels::KM2 { l } else { g };
    let add = |b: &mut Builder, sys: [u8; 4], envs: &[(&'static str, u8)], amp: Complex64| {
        let w: f64 = envs.iter().map(|(el, _)| weight(el)).product();
        b.add(&sys, envs, amp * w * FRAC_1_SQRT_2);
    };

    for (pattern, amp) in analyzer_bell_branches(sign, kappa, eta)? {
        b.add(&pattern, &[], amp);
    }

    const L3_4: (&str, u8) = (labels::BS4, 3);
    const L4_4: (&str, u8) = (labels::BS4, 4);
    const K2: (&str, u8) = (labels::KM2, 2);
    const K3: (&str, u8) = (labels::KM2, 4);
    const L3_5: (&str, u8) = (labels::BS5, 4);
    const L4_5: (&str, u8) = (labels::BS5, 3);
    const L1_6: (&str, u8) = (labels::BS6, 1);
    const L2_6: (&str, u8) = (labels::BS6, 2);

    // One photon left on modes 3,4.
    add(&mut b, [0, 0, 1, 0], &[L2_6], re(xi * (s + p.eta)));
    add(&mut b, [0, 0, 0, 1], &[L2_6], I * xi * (s - p.eta));
    add(&mut b, [0, 0, 1, 0], &[K2], re(xi * (1.0 - s)));
    add(&mut b, [0, 0, 0, 1], &[K2], I * xi * (1.0 + s));
    add(&mut b, [0, 0, 0, 1], &[L1_6], re(xi * sg * (s - 1.0)));
    add(&mut b, [0, 0, 1, 0], &[L1_6], I * xi * sg * (s + 1.0));

    // One photon left on modes 1,2.
    for (env, c) in [
        (L3_4, re(r)),
        (L3_5, -I * r * r),
        (K3, I * r * q),
        (L4_5, re(r * q)),
    ] {
        add(&mut b, [1, 0, 0, 0], &[env], c);
        add(&mut b, [0, 1, 0, 0], &[env], I * c);
    }
    for (env, c) in [
        (L3_5, re(q * r)),
        (K3, re(q * q)),
        (L4_4, re(q)),
        (L4_5, I * q * q),
    ] {
        add(&mut b, [0, 1, 0, 0], &[env], sg * c);
        add(&mut b, [1, 0, 0, 0], &[env], sg * I * c);
    }

    // Both photons absorbed.
    for (env, c) in [(L3_4, re(1.0)), (L3_5, -I * r), (K3, I * q), (L4_5, re(q))] {
        add(&mut b, [0, 0, 0, 0], &[env, L2_6], s * c);
    }
    for (env, c) in [(L3_4, re(1.0)), (L3_5, I * r), (K3, I * q), (L4_5, re(q))] {
        add(&mut b, [0, 0, 0, 0], &[env, K2], c);
    }
    for (env, c) in [(L3_5, re(r)), (K3, re(q)), (L4_4, re(1.0)), (L4_5, I * q)] {
        add(&mut b, [0, 0, 0, 0], &[env, L1_6], sg * c);
    }
    b.finish()
}
