//! Python bindings. Built with maturin as the `fockport` module.

use fockport::formulas::{self, ConditionalCoefficients};
use fockport::stations::{self, BellLabel, Classification};
use fockport::{Complex64, FockError, FockStateVector, InputStateSpec, ModeKind, NoiseProfile};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: FockError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "NoiseProfile", module = "fockport", frozen, from_py_object)]
#[derive(Clone)]
struct PyNoiseProfile(NoiseProfile);

#[pymethods]
impl PyNoiseProfile {
    #[new]
    #[pyo3(signature = (kappa = 0.98, eta = 0.98, epsilon = 0.7, varkappa = 1.0))]
    fn new(kappa: f64, eta: f64, epsilon: f64, varkappa: f64) -> PyResult<Self> {
        NoiseProfile::new(kappa, eta, epsilon, varkappa)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn ideal() -> Self {
        Self(NoiseProfile::ideal())
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon
    }

    #[getter]
    fn varkappa(&self) -> f64 {
        self.0.varkappa
    }

    fn __repr__(&self) -> String {
        let n = &self.0;
        format!(
            "NoiseProfile(kappa={}, eta={}, epsilon={}, varkappa={})",
            n.kappa, n.eta, n.epsilon, n.varkappa
        )
    }
}

#[pyclass(name = "InputState", module = "fockport", frozen, from_py_object)]
#[derive(Clone)]
struct PyInputState(InputStateSpec);

#[pymethods]
impl PyInputState {
    /// `c1|0,1> + c2|1,0>`; must be normalized.
    #[new]
    fn new(c1: Complex64, c2: Complex64) -> PyResult<Self> {
        InputStateSpec::new(c1, c2).map(Self).map_err(err)
    }

    /// `c1 = cos(gamma)`, `c2 = sin(gamma) exp(i lam)`.
    #[staticmethod]
    fn from_angles(gamma: f64, lam: f64) -> Self {
        Self(InputStateSpec::from_angles(gamma, lam))
    }

    #[getter]
    fn c1(&self) -> Complex64 {
        self.0.c1()
    }

    #[getter]
    fn c2(&self) -> Complex64 {
        self.0.c2()
    }
}

#[pyclass(name = "FockState", module = "fockport", frozen)]
struct PyFockState(FockStateVector);

#[pymethods]
impl PyFockState {
    /// Mode names in occupation order: "m5", or "BS3:m6" for the
    /// environment of BS3 fed by mode 6.
    fn modes(&self) -> Vec<String> {
        self.0
            .registry()
            .iter()
            .map(|(id, kind)| match kind {
                ModeKind::System(_) => id.to_string(),
                ModeKind::Environment { element, port } => format!("{element}:{port}"),
            })
            .collect()
    }

    fn terms(&self) -> Vec<(Vec<u8>, Complex64)> {
        self.0.terms().map(|(o, a)| (o.0.clone(), *a)).collect()
    }

    fn amplitude(&self, counts: Vec<u8>) -> Complex64 {
        self.0.amplitude(&counts)
    }

    fn norm_sqr(&self) -> f64 {
        self.0.norm_sqr()
    }

    fn dump(&self) -> String {
        self.0.dump()
    }

    /// Fidelity of the reduced state on modes 5,6 with the input qubit.
    fn teleported_fidelity(&self, spec: &PyInputState) -> PyResult<f64> {
        stations::teleported_fidelity(&self.0, &spec.0).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "BellOutcome", module = "fockport", frozen)]
struct PyBellOutcome(stations::BellOutcome);

#[pymethods]
impl PyBellOutcome {
    #[getter]
    fn pattern(&self) -> (u8, u8, u8, u8) {
        let p = self.0.pattern;
        (p[0], p[1], p[2], p[3])
    }

    #[getter]
    fn probability(&self) -> f64 {
        self.0.probability
    }

    /// Bell label ("Psi+", ...) or None for a rejected pattern.
    #[getter]
    fn label(&self) -> Option<&'static str> {
        self.0.classification.label().map(BellLabel::name)
    }

    #[getter]
    fn accepted(&self) -> bool {
        self.0.classification != Classification::Rejected
    }

    fn conditional_state(&self) -> PyFockState {
        PyFockState(self.0.conditional_state.clone())
    }

    /// Apply Bob's rotation for this outcome.
    fn correct(&self, noise: &PyNoiseProfile) -> PyResult<PyFockState> {
        stations::bob_correct(&self.0, &noise.0)
            .map(PyFockState)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "BellOutcome(pattern={:?}, probability={}, label={:?})",
            self.0.pattern,
            self.0.probability,
            self.label()
        )
    }
}

/// Every detection pattern with its probability and conditional state.
#[pyfunction]
fn run_protocol(spec: &PyInputState, noise: &PyNoiseProfile) -> PyResult<Vec<PyBellOutcome>> {
    stations::run_protocol(&spec.0, &noise.0)
        .map(|v| v.into_iter().map(PyBellOutcome).collect())
        .map_err(err)
}

/// `[(label, pattern, probability, fidelity)]` after Bob's correction, and
/// the total accepted probability.
#[pyfunction]
#[allow(clippy::type_complexity)]
fn teleport(
    spec: &PyInputState,
    noise: &PyNoiseProfile,
) -> PyResult<(Vec<(&'static str, String, f64, f64)>, f64)> {
    let (reports, accepted) = stations::teleport(&spec.0, &noise.0).map_err(err)?;
    let rows = reports
        .into_iter()
        .map(|r| {
            let pattern = r.pattern.iter().map(|n| n.to_string()).collect();
            (r.label.name(), pattern, r.probability, r.fidelity)
        })
        .collect();
    Ok((rows, accepted))
}

#[pyfunction]
fn build_quantum_channel(noise: &PyNoiseProfile) -> PyResult<PyFockState> {
    stations::build_quantum_channel(&noise.0)
        .map(PyFockState)
        .map_err(err)
}

#[pyfunction]
fn channel_fidelity(kappa: f64, eta: f64) -> PyResult<f64> {
    formulas::channel_fidelity(kappa, eta).map_err(err)
}

#[pyfunction]
fn simulated_channel_fidelity(noise: &PyNoiseProfile) -> PyResult<f64> {
    stations::simulated_channel_fidelity(&noise.0).map_err(err)
}

#[pyfunction]
fn teleport_fidelity(spec: &PyInputState, kappa: f64, eta: f64) -> PyResult<f64> {
    formulas::teleport_fidelity(&spec.0, kappa, eta).map_err(err)
}

#[pyfunction]
fn detection_probability_0110(
    spec: &PyInputState,
    kappa: f64,
    eta: f64,
    epsilon: f64,
) -> PyResult<f64> {
    formulas::detection_probability_0110(&spec.0, kappa, eta, epsilon).map_err(err)
}

/// Closed-form coefficients a..f of the 0110-heralded state, as a dict.
/// `published=True` returns the printed expressions verbatim.
#[pyfunction]
#[pyo3(signature = (spec, kappa, eta, published = false))]
fn conditional_coefficients<'py>(
    py: Python<'py>,
    spec: &PyInputState,
    kappa: f64,
    eta: f64,
    published: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let co = if published {
        ConditionalCoefficients::literal(&spec.0, kappa, eta)
    } else {
        ConditionalCoefficients::reconciled(&spec.0, kappa, eta)
    }
    .map_err(err)?;
    let dict = PyDict::new(py);
    for (name, value) in co.named() {
        dict.set_item(name, value)?;
    }
    Ok(dict)
}

/// `{input label: {pattern: probability}}` for Bell states sent through
/// Alice's analyzer.
#[pyfunction]
fn bell_table<'py>(py: Python<'py>, noise: &PyNoiseProfile) -> PyResult<Bound<'py, PyDict>> {
    let table = PyDict::new(py);
    for label in BellLabel::ALL {
        let row = PyDict::new(py);
        for (pattern, p) in stations::bell_state_statistics(label, &noise.0).map_err(err)? {
            let key: String = pattern.iter().map(|n| n.to_string()).collect();
            row.set_item(key, p)?;
        }
        table.set_item(label.name(), row)?;
    }
    Ok(table)
}

#[pymodule]
#[pyo3(name = "fockport")]
fn fockport_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNoiseProfile>()?;
    m.add_class::<PyInputState>()?;
    m.add_class::<PyFockState>()?;
    m.add_class::<PyBellOutcome>()?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(teleport, m)?)?;
    m.add_function(wrap_pyfunction!(build_quantum_channel, m)?)?;
    m.add_function(wrap_pyfunction!(channel_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(simulated_channel_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(teleport_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(detection_probability_0110, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(bell_table, m)?)?;
    Ok(())
}
