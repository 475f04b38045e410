//! Reduced density matrices and state fidelity.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{FockError, Result};
use crate::registry::ModeId;
use crate::state::{FockStateVector, OccupationVector};

/// Input norms may drift this far from 1 before partial traces refuse them.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Density operator on an ordered subset of modes, stored densely over the
/// occupation patterns that actually occur.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    modes: Vec<ModeId>,
    basis: Vec<OccupationVector>,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn modes(&self) -> &[ModeId] {
        &self.modes
    }

    pub fn basis(&self) -> &[OccupationVector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// <row| rho |col>, zero for patterns outside the support.
    pub fn entry(&self, row: &[u8], col: &[u8]) -> Complex64 {
        match (self.index_of(row), self.index_of(col)) {
            (Some(i), Some(j)) => self.matrix[(i, j)],
            _ => Complex64::default(),
        }
    }

    fn index_of(&self, counts: &[u8]) -> Option<usize> {
        self.basis
            .binary_search_by(|probe| probe.0.as_slice().cmp(counts))
            .ok()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Largest |rho_ij - conj(rho_ji)|.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        if self.dim() == 0 {
            return Vec::new();
        }
        let mut values: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }
}

/// Trace out everything except `keep`.
pub fn partial_trace(state: &FockStateVector, keep: &[ModeId]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(FockError::EmptyModeSet);
    }
    state.ensure_normalized(NORM_TOLERANCE)?;
    let registry = state.registry();
    let keep_pos = keep
        .iter()
        .map(|id| registry.require(*id))
        .collect::<Result<Vec<_>>>()?;

    // Group amplitudes by the configuration of the traced-out modes.
    let mut blocks: BTreeMap<Vec<u8>, Vec<(OccupationVector, Complex64)>> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let kept = OccupationVector(keep_pos.iter().map(|&p| occ.0[p]).collect());
        let traced: Vec<u8> = occ
            .0
            .iter()
            .enumerate()
            .filter(|(i, _)| !keep_pos.contains(i))
            .map(|(_, &n)| n)
            .collect();
        blocks.entry(traced).or_default().push((kept, *amp));
    }

    let mut basis: Vec<OccupationVector> = blocks
        .values()
        .flat_map(|b| b.iter().map(|(k, _)| k.clone()))
        .collect();
    basis.sort();
    basis.dedup();
    let index = |o: &OccupationVector| basis.binary_search(o).expect("pattern in basis");

    let n = basis.len();
    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for block in blocks.values() {
        for (ki, ai) in block {
            let i = index(ki);
            for (kj, aj) in block {
                matrix[(i, index(kj))] += ai * aj.conj();
            }
        }
    }
    Ok(DensityMatrix {
        modes: keep.to_vec(),
        basis,
        matrix,
    })
}

/// <target| rho |target> for a pure target on the same modes as `rho`.
pub fn fidelity(rho: &DensityMatrix, target: &FockStateVector) -> Result<f64> {
    let target_modes: Vec<ModeId> = target.registry().ids().collect();
    if target_modes != rho.modes {
        return Err(FockError::ModeMismatch);
    }
    target.ensure_normalized(NORM_TOLERANCE)?;
    let coords: Vec<(usize, Complex64)> = target
        .terms()
        .filter_map(|(occ, amp)| rho.index_of(&occ.0).map(|i| (i, *amp)))
        .collect();
    let mut acc = Complex64::default();
    for &(i, ai) in &coords {
        for &(j, aj) in &coords {
            acc += ai.conj() * rho.matrix[(i, j)] * aj;
        }
    }
    if acc.im.abs() > 1e-12 {
        return Err(FockError::ComplexFidelity(acc.im));
    }
    Ok(acc.re)
}
