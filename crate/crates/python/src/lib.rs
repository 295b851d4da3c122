//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (inputs may also be `int` or `"p/q"` / decimal strings); sender indices
//! are zero-based, as in the Rust API.

use persuasion_core::builtins;
use persuasion_core::constructions;
use persuasion_core::equilibrium::{self, MixedProfile, PureProfile};
use persuasion_core::io;
use persuasion_core::persuasion;
use persuasion_core::rational::{format_rational, parse_rational, Rational};
use persuasion_core::signal;
use persuasion_core::{Error, GameSpec};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((format_rational(r),))
}

fn rational_arg(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    parse_rational(&obj.str()?.to_string()).map_err(err)
}

/// JSON values to Python objects; `"p/q"` strings stay strings.
fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(k) => k.into_pyobject(py)?.into_any(),
            None => n.to_string().into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(m) => {
            let dict = PyDict::new(py);
            for (k, x) in m {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

#[pyclass(name = "Game", frozen)]
struct PyGame {
    inner: GameSpec,
}

#[pymethods]
impl PyGame {
    /// `"ecig"`, `"policy"` or `"policy(<ε>)"`.
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        Ok(Self { inner: builtins::by_name(name).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_game(text).map_err(err)? })
    }

    /// A builtin name or a game file path.
    #[staticmethod]
    fn load(source: &str) -> PyResult<Self> {
        Ok(Self { inner: io::load_game(source).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::pretty(&io::game_to_json(&self.inner))
    }

    #[getter]
    fn sender_count(&self) -> usize {
        self.inner.sender_count()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions().to_vec()
    }

    #[getter]
    fn receiver_states(&self) -> Vec<String> {
        self.inner.receiver_states().to_vec()
    }

    fn sender_states(&self, i: usize) -> PyResult<Vec<String>> {
        if i >= self.inner.sender_count() {
            return Err(PyValueError::new_err("sender index out of range"));
        }
        Ok(self.inner.sender_states(i).to_vec())
    }

    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &io::validation_to_json(&self.inner, &persuasion_core::validate_game(&self.inner)))
    }

    fn __repr__(&self) -> String {
        format!(
            "Game(senders={}, actions={:?}, receiver_states={:?})",
            self.inner.sender_count(),
            self.inner.actions(),
            self.inner.receiver_states()
        )
    }
}

#[pyclass(name = "Signal", frozen, from_py_object)]
#[derive(Clone)]
struct PySignal {
    inner: persuasion_core::Signal,
}

#[pymethods]
impl PySignal {
    #[staticmethod]
    fn from_json(game: &PyGame, text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::parse_signal(&game.inner, text).map_err(err)? })
    }

    /// The signal recommending `action` in every state.
    #[staticmethod]
    fn constant(game: &PyGame, sender: usize, action: usize) -> PyResult<Self> {
        Ok(Self { inner: persuasion_core::Signal::constant(&game.inner, sender, action).map_err(err)? })
    }

    #[staticmethod]
    fn full_info(game: &PyGame, sender: usize) -> PyResult<Self> {
        Ok(Self { inner: signal::full_info_signal(&game.inner, sender).map_err(err)? })
    }

    fn to_json(&self, game: &PyGame) -> String {
        io::pretty(&io::signal_to_json(&game.inner, &self.inner))
    }

    #[getter]
    fn sender(&self) -> usize {
        self.inner.sender()
    }

    fn __eq__(&self, other: &PySignal) -> bool {
        self.inner == other.inner
    }
}

fn wrap(signals: Vec<PySignal>) -> Vec<persuasion_core::Signal> {
    signals.into_iter().map(|s| s.inner).collect()
}

#[pyfunction]
fn receiver_value<'py>(py: Python<'py>, game: &PyGame, pi: &PySignal) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &signal::receiver_value(&game.inner, &pi.inner))
}

#[pyfunction]
fn sender_value<'py>(py: Python<'py>, game: &PyGame, sender: usize, pi: &PySignal) -> PyResult<Bound<'py, PyAny>> {
    if sender >= game.inner.sender_count() {
        return Err(PyValueError::new_err("sender index out of range"));
    }
    fraction(py, &signal::sender_value(&game.inner, sender, &pi.inner))
}

#[pyfunction]
fn is_incentive_compatible(game: &PyGame, pi: &PySignal) -> bool {
    signal::is_ic(&game.inner, &pi.inner)
}

#[pyfunction]
fn is_fully_informative(game: &PyGame, pi: &PySignal) -> bool {
    signal::is_fully_informative(&game.inner, &pi.inner).fully_informative
}

#[pyfunction]
fn simulate(game: &PyGame, sender: usize, pi: &PySignal) -> PyResult<PySignal> {
    Ok(PySignal { inner: constructions::simulate(&game.inner, sender, &pi.inner).map_err(err)? })
}

/// Returns the improved signal and its trace as a dict.
#[pyfunction]
#[pyo3(signature = (game, sender, pi, epsilon=None))]
fn improve<'py>(
    py: Python<'py>,
    game: &PyGame,
    sender: usize,
    pi: &PySignal,
    epsilon: Option<&Bound<'py, PyAny>>,
) -> PyResult<(PySignal, Bound<'py, PyAny>)> {
    let eps = epsilon.map(rational_arg).transpose()?;
    let (s, trace) = constructions::improve(&game.inner, sender, &pi.inner, eps).map_err(err)?;
    let t = to_py(py, &io::trace_to_json(&game.inner, sender, &trace))?;
    Ok((PySignal { inner: s }, t))
}

#[pyfunction]
fn mix_with_full_info(game: &PyGame, pi: &PySignal, epsilon: &Bound<'_, PyAny>) -> PyResult<PySignal> {
    let eps = rational_arg(epsilon)?;
    Ok(PySignal { inner: constructions::mix_with_full_info(&game.inner, &pi.inner, &eps).map_err(err)? })
}

/// Sender-optimal IC signal and its exact value.
#[pyfunction]
fn optimal_signal<'py>(py: Python<'py>, game: &PyGame, sender: usize) -> PyResult<(PySignal, Bound<'py, PyAny>)> {
    let opt = persuasion::optimal_signal(&game.inner, sender).map_err(err)?;
    Ok((PySignal { inner: opt.signal }, fraction(py, &opt.value)?))
}

/// `{"receiver": Fraction, "senders": [Fraction, ...]}` for a pure profile.
#[pyfunction]
fn profile_payoffs<'py>(py: Python<'py>, game: &PyGame, signals: Vec<PySignal>) -> PyResult<Bound<'py, PyDict>> {
    let profile = PureProfile::new(&game.inner, wrap(signals)).map_err(err)?;
    let p = equilibrium::profile_payoffs(&game.inner, &profile);
    let d = PyDict::new(py);
    d.set_item("receiver", fraction(py, &p.receiver_value)?)?;
    let senders = PyList::empty(py);
    for v in &p.sender_values {
        senders.append(fraction(py, v)?)?;
    }
    d.set_item("senders", senders)?;
    Ok(d)
}

/// The verdict record for a pure profile, with rationals as `"p/q"` strings.
#[pyfunction]
fn check_equilibrium<'py>(py: Python<'py>, game: &PyGame, signals: Vec<PySignal>) -> PyResult<Bound<'py, PyAny>> {
    let profile = PureProfile::new(&game.inner, wrap(signals)).map_err(err)?;
    let report = equilibrium::check_equilibrium(&game.inner, &MixedProfile::from(&profile)).map_err(err)?;
    to_py(py, &io::report_to_json(&game.inner, &report))
}

#[pymodule]
fn competing_persuasion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PySignal>()?;
    m.add_function(wrap_pyfunction!(receiver_value, m)?)?;
    m.add_function(wrap_pyfunction!(sender_value, m)?)?;
    m.add_function(wrap_pyfunction!(is_incentive_compatible, m)?)?;
    m.add_function(wrap_pyfunction!(is_fully_informative, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(improve, m)?)?;
    m.add_function(wrap_pyfunction!(mix_with_full_info, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_signal, m)?)?;
    m.add_function(wrap_pyfunction!(profile_payoffs, m)?)?;
    m.add_function(wrap_pyfunction!(check_equilibrium, m)?)?;
    Ok(())
}
