//! Sparse multimode Fock-state vectors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::registry::{ModeId, ModeKind, ModeRegistry};

/// Largest photon count any single mode may hold.
pub const OCCUPATION_CAP: u8 = 3;

/// Photon counts, one per registered mode, in registry order.
///
/// Ordering is lexicographic by mode position, which fixes the iteration
/// order of every state and therefore the dump format.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OccupationVector(pub Vec<u8>);

impl OccupationVector {
    pub fn vacuum(len: usize) -> Self {
        OccupationVector(vec![0; len])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn counts(&self) -> &[u8] {
        &self.0
    }
}

impl std::fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(',')?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

/// Pure state in the dilated (system plus environment) picture.
#[derive(Debug, Clone, PartialEq)]
pub struct FockStateVector {
    registry: ModeRegistry,
    terms: BTreeMap<OccupationVector, Complex64>,
    prune_epsilon: f64,
}

impl FockStateVector {
    /// The all-vacuum state on `registry`.
    pub fn vacuum(registry: ModeRegistry) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(
            OccupationVector::vacuum(registry.len()),
            Complex64::new(1.0, 0.0),
        );
        FockStateVector {
            registry,
            terms,
            prune_epsilon: 0.0,
        }
    }

    /// Build a state from explicit terms. Repeated keys are summed. No
    /// normalization is applied.
    pub fn from_terms<I, V>(registry: ModeRegistry, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (V, Complex64)>,
        V: Into<Vec<u8>>,
    {
        let mut state = FockStateVector {
            registry,
            terms: BTreeMap::new(),
            prune_epsilon: 0.0,
        };
        for (occ, amp) in terms {
            let occ = OccupationVector(occ.into());
            state.check_occupation(&occ)?;
            *state.terms.entry(occ).or_default() += amp;
        }
        state.prune();
        Ok(state)
    }

    /// Drop amplitudes whose magnitude is at most `epsilon` on every later
    /// write. The default of 0 only removes exact zeros.
    pub fn with_prune_epsilon(mut self, epsilon: f64) -> Self {
        self.prune_epsilon = epsilon.max(0.0);
        self.prune();
        self
    }

    pub fn registry(&self) -> &ModeRegistry {
        &self.registry
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OccupationVector, &Complex64)> + '_ {
        self.terms.iter()
    }

    pub fn amplitude(&self, counts: &[u8]) -> Complex64 {
        self.terms
            .get(&OccupationVector(counts.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Amplitude addressed by mode id; unspecified modes are taken as vacuum.
    pub fn amplitude_of(&self, occupied: &[(ModeId, u8)]) -> Result<Complex64> {
        let mut counts = vec![0u8; self.registry.len()];
        for &(id, n) in occupied {
            counts[self.registry.require(id)?] = n;
        }
        Ok(self.amplitude(&counts))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 {
            return Err(FockError::NotNormalized { norm_sqr: 0.0 });
        }
        let scale = n2.sqrt().recip();
        for amp in self.terms.values_mut() {
            *amp *= scale;
        }
        Ok(n2)
    }

    pub(crate) fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let n2 = self.norm_sqr();
        if (n2 - 1.0).abs() > tol {
            return Err(FockError::NotNormalized { norm_sqr: n2 });
        }
        Ok(())
    }

    /// Photon count summed over every mode, if all terms agree.
    pub fn total_photons(&self) -> Option<u32> {
        let mut totals = self.terms.keys().map(OccupationVector::total);
        let first = totals.next()?;
        totals.all(|t| t == first).then_some(first)
    }

    /// Largest photon count found in `mode` across all terms.
    pub fn max_occupation(&self, mode: ModeId) -> Result<u8> {
        let pos = self.registry.require(mode)?;
        Ok(self.terms.keys().map(|o| o.0[pos]).max().unwrap_or(0))
    }

    /// Register a fresh environment mode and extend every term with vacuum.
    pub fn register_environment_mode(&mut self, element: &str, port: ModeId) -> Result<ModeId> {
        let id = self.registry.register_environment_mode(element, port)?;
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(mut occ, amp)| {
                occ.0.push(0);
                (occ, amp)
            })
            .collect();
        Ok(id)
    }

    /// Tensor product. Mode ids of the two factors must be disjoint.
    pub fn tensor(&self, other: &FockStateVector) -> Result<FockStateVector> {
        let registry = self.registry.joined(&other.registry)?;
        let mut terms = BTreeMap::new();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut occ = a.0.clone();
                occ.extend_from_slice(&b.0);
                terms.insert(OccupationVector(occ), x * y);
            }
        }
        let mut out = FockStateVector {
            registry,
            terms,
            prune_epsilon: self.prune_epsilon.max(other.prune_epsilon),
        };
        out.prune();
        Ok(out)
    }

    /// Express this state over `target`, matching modes by kind rather than
    /// id. Modes absent from `target` must be empty in every term.
    pub fn reindexed(&self, target: &ModeRegistry) -> Result<FockStateVector> {
        let mapping: Vec<Option<usize>> = self
            .registry
            .iter()
            .map(|(_, kind)| position_of_kind(target, kind))
            .collect();
        let mut terms = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let mut counts = vec![0u8; target.len()];
            for (i, &n) in occ.0.iter().enumerate() {
                match mapping[i] {
                    Some(p) => counts[p] = n,
                    None if n == 0 => {}
                    None => {
                        let id = self.registry.ids().nth(i).expect("position in range");
                        return Err(FockError::UnknownMode(id));
                    }
                }
            }
            *terms.entry(OccupationVector(counts)).or_default() += amp;
        }
        let mut out = FockStateVector {
            registry: target.clone(),
            terms,
            prune_epsilon: self.prune_epsilon,
        };
        out.prune();
        Ok(out)
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &FockStateVector) -> Result<Complex64> {
        if !self.registry.same_layout(&other.registry) {
            return Err(FockError::RegistryMismatch);
        }
        let (small, large, conj_small) = if self.len() <= other.len() {
            (self, other, true)
        } else {
            (other, self, false)
        };
        let mut acc = Complex64::default();
        for (occ, a) in &small.terms {
            if let Some(b) = large.terms.get(occ) {
                acc += if conj_small {
                    a.conj() * b
                } else {
                    b.conj() * a
                };
            }
        }
        Ok(acc)
    }

    /// Keep only terms satisfying `keep`, without renormalizing.
    pub fn filtered(&self, mut keep: impl FnMut(&OccupationVector) -> bool) -> FockStateVector {
        FockStateVector {
            registry: self.registry.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(o, _)| keep(o))
                .map(|(o, a)| (o.clone(), *a))
                .collect(),
            prune_epsilon: self.prune_epsilon,
        }
    }

    pub fn scaled(&self, factor: Complex64) -> FockStateVector {
        let mut out = self.clone();
        for amp in out.terms.values_mut() {
            *amp *= factor;
        }
        out.prune();
        out
    }

    /// Sum of two states on the same registry.
    pub fn added(&self, other: &FockStateVector) -> Result<FockStateVector> {
        if !self.registry.same_layout(&other.registry) {
            return Err(FockError::RegistryMismatch);
        }
        let mut out = self.clone();
        for (occ, amp) in &other.terms {
            *out.terms.entry(occ.clone()).or_default() += amp;
        }
        out.prune();
        Ok(out)
    }

    /// Multiply every term by `phase(occupation)`.
    pub(crate) fn map_amplitudes(
        &mut self,
        mut f: impl FnMut(&OccupationVector, Complex64) -> Complex64,
    ) {
        for (occ, amp) in self.terms.iter_mut() {
            *amp = f(occ, *amp);
        }
        self.prune();
    }

    /// Replace all terms. Callers guarantee the keys match the registry.
    pub(crate) fn replace_terms(
        &mut self,
        terms: BTreeMap<OccupationVector, Complex64>,
    ) -> Result<()> {
        for occ in terms.keys() {
            self.check_occupation(occ)?;
        }
        self.terms = terms;
        self.prune();
        Ok(())
    }

    /// Exchange the contents of two modes.
    pub(crate) fn swap_positions(&mut self, a: usize, b: usize) {
        self.terms = std::mem::take(&mut self.terms)
            .into_iter()
            .map(|(mut occ, amp)| {
                occ.0.swap(a, b);
                (occ, amp)
            })
            .collect();
    }

    /// Split off the modes in `measured`: returns, per pattern on those
    /// modes, the unnormalized remainder on the other modes.
    pub(crate) fn split_on(
        &self,
        measured: &[ModeId],
    ) -> Result<BTreeMap<Vec<u8>, FockStateVector>> {
        let positions = measured
            .iter()
            .map(|id| self.registry.require(*id))
            .collect::<Result<Vec<_>>>()?;
        let rest_registry = self.registry.without(measured);
        let mut groups: BTreeMap<Vec<u8>, BTreeMap<OccupationVector, Complex64>> = BTreeMap::new();
        for (occ, amp) in &self.terms {
            let pattern: Vec<u8> = positions.iter().map(|&p| occ.0[p]).collect();
            let rest: Vec<u8> = occ
                .0
                .iter()
                .enumerate()
                .filter(|(i, _)| !positions.contains(i))
                .map(|(_, &n)| n)
                .collect();
            groups
                .entry(pattern)
                .or_default()
                .insert(OccupationVector(rest), *amp);
        }
        Ok(groups
            .into_iter()
            .map(|(pattern, terms)| {
                (
                    pattern,
                    FockStateVector {
                        registry: rest_registry.clone(),
                        terms,
                        prune_epsilon: self.prune_epsilon,
                    },
                )
            })
            .collect())
    }

    fn check_occupation(&self, occ: &OccupationVector) -> Result<()> {
        if occ.0.len() != self.registry.len() {
            return Err(FockError::OccupationLength {
                expected: self.registry.len(),
                got: occ.0.len(),
            });
        }
        if let Some((i, &n)) = occ.0.iter().enumerate().find(|(_, &n)| n > OCCUPATION_CAP) {
            return Err(FockError::OccupationCap {
                mode: self.registry.ids().nth(i).expect("position in range"),
                count: n as u32,
                cap: OCCUPATION_CAP,
            });
        }
        Ok(())
    }

    fn prune(&mut self) {
        let eps = self.prune_epsilon;
        self.terms.retain(|_, a| a.norm() > eps);
    }

    /// One line per term: `occupations<TAB>re<TAB>im`, 17 significant digits.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (occ, amp) in &self.terms {
            let _ = writeln!(out, "{occ}\t{}\t{}", fmt_sig17(amp.re), fmt_sig17(amp.im));
        }
        out
    }

    /// Parse the output of [`FockStateVector::dump`] against `registry`.
    pub fn parse_dump(registry: ModeRegistry, text: &str) -> Result<FockStateVector> {
        let mut terms = Vec::new();
        for (i, line) in text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let err = |reason: &str| FockError::Parse {
                line: i + 1,
                reason: reason.to_owned(),
            };
            let mut fields = line.split('\t');
            let (Some(occ), Some(re), Some(im), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(err("expected three tab-separated fields"));
            };
            let counts = occ
                .split(',')
                .map(|c| c.trim().parse::<u8>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| err("bad occupation count"))?;
            let re: f64 = re.trim().parse().map_err(|_| err("bad real part"))?;
            let im: f64 = im.trim().parse().map_err(|_| err("bad imaginary part"))?;
            terms.push((counts, Complex64::new(re, im)));
        }
        FockStateVector::from_terms(registry, terms)
    }
}

fn position_of_kind(registry: &ModeRegistry, kind: &ModeKind) -> Option<usize> {
    registry.iter().position(|(_, k)| k == kind)
}

/// Scientific notation with 17 significant digits. Locale independent.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// |<a|b>|, insensitive to a global phase between the two states.
pub fn overlap_up_to_global_phase(a: &FockStateVector, b: &FockStateVector) -> Result<f64> {
    Ok(a.inner(b)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_amplitudes_are_not_stored() {
        let reg = ModeRegistry::with_system_modes([1, 2]);
        let s = FockStateVector::from_terms(
            reg,
            [(vec![1, 0], c(1.0, 0.0)), (vec![0, 1], c(0.0, 0.0))],
        )
        .unwrap();
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn cap_is_a_hard_error() {
        let reg = ModeRegistry::with_system_modes([1]);
        let err = FockStateVector::from_terms(reg, [(vec![4], c(1.0, 0.0))]).unwrap_err();
        assert!(matches!(err, FockError::OccupationCap { count: 4, .. }));
    }

    #[test]
    fn new_environment_mode_reads_vacuum() {
        let reg = ModeRegistry::with_system_modes([1, 2]);
        let mut s = FockStateVector::from_terms(reg, [(vec![1, 0], c(1.0, 0.0))]).unwrap();
        let env = s
            .register_environment_mode("BS1", ModeId::system(1))
            .unwrap();
        assert_eq!(s.registry().len(), 3);
        assert_eq!(s.max_occupation(env).unwrap(), 0);
        assert_eq!(s.amplitude(&[1, 0, 0]), c(1.0, 0.0));
    }

    #[test]
    fn global_phase_does_not_change_overlap() {
        let reg = ModeRegistry::with_system_modes([1, 2]);
        let b = FockStateVector::from_terms(
            reg.clone(),
            [
                (vec![1, 0], c(FRAC_1_SQRT_2, 0.0)),
                (vec![0, 1], c(0.0, FRAC_1_SQRT_2)),
            ],
        )
        .unwrap();
        let a = b.scaled(Complex64::from_polar(1.0, std::f64::consts::PI / 3.0));
        assert!((overlap_up_to_global_phase(&a, &b).unwrap() - 1.0).abs() < 1e-15);

        let x = FockStateVector::from_terms(reg.clone(), [(vec![1, 0], c(1.0, 0.0))]).unwrap();
        let y = FockStateVector::from_terms(reg, [(vec![0, 1], c(1.0, 0.0))]).unwrap();
        assert_eq!(overlap_up_to_global_phase(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn overlap_rejects_different_registries() {
        let a = FockStateVector::vacuum(ModeRegistry::with_system_modes([1]));
        let b = FockStateVector::vacuum(ModeRegistry::with_system_modes([2]));
        assert_eq!(
            overlap_up_to_global_phase(&a, &b),
            Err(FockError::RegistryMismatch)
        );
    }

    #[test]
    fn tensor_orders_modes_by_factor() {
        let a = FockStateVector::from_terms(
            ModeRegistry::with_system_modes([1, 2]),
            [(vec![0, 1], c(1.0, 0.0))],
        )
        .unwrap();
        let b = FockStateVector::from_terms(
            ModeRegistry::with_system_modes([3]),
            [(vec![1], c(0.0, 1.0))],
        )
        .unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.amplitude(&[0, 1, 1]), c(0.0, 1.0));
        assert!(a.tensor(&a).is_err());
    }

    #[test]
    fn dump_line_format() {
        let reg = ModeRegistry::with_system_modes([1, 2]);
        let s = FockStateVector::from_terms(reg, [(vec![0, 1], c(0.5, -0.25))]).unwrap();
        assert_eq!(
            s.dump(),
            "0,1\t5.0000000000000000e-1\t-2.5000000000000000e-1\n"
        );
    }

    #[test]
    fn malformed_dump_is_rejected() {
        let reg = ModeRegistry::with_system_modes([1, 2]);
        assert!(FockStateVector::parse_dump(reg.clone(), "0,1\t0.5\n").is_err());
        assert!(FockStateVector::parse_dump(reg, "0,x\t0.5\t0\n").is_err());
    }
}
