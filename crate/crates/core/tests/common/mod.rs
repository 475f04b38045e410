#![allow(dead_code)]

use fockport::{FockStateVector, ModeId};
use num_complex::Complex64;

pub fn m(label: u8) -> ModeId {
    ModeId::system(label)
}

/// Largest componentwise |a - b| after expressing `reference` over the
/// registry of `sim`.
pub fn max_difference(sim: &FockStateVector, reference: &FockStateVector) -> f64 {
    let reference = reference
        .reindexed(sim.registry())
        .expect("reference modes exist in simulation");
    let diff = sim
        .added(&reference.scaled(Complex64::new(-1.0, 0.0)))
        .unwrap();
    diff.terms().map(|(_, a)| a.norm()).fold(0.0, f64::max)
}

pub fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got:.17e}, want {want:.17e}, tol {tol:e}"
    );
}
