//! Python bindings: requirement analysis, scenario runs and the traceability
//! model, with errors raised as `ValueError`.

use std::collections::BTreeMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tdss_core::ceg::{self, Causality, Requirement, RequirementKind};
use tdss_core::diagram::{render, trace_to_diagram};
use tdss_core::dsl::{lower_specs, lower_test, parse_file};
use tdss_core::engine::{ExecutionTrace, DEFAULT_STEP_BUDGET};
use tdss_core::harness::{self, Verdict};
use tdss_core::model::{check_consistency, derive_view, ElementKind, SystemModel, ViewKind};
use tdss_core::{walkthrough, Timestamp};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn requirement(id: &str, text: &str, kind: &str) -> PyResult<Requirement> {
    let kind: RequirementKind = kind.parse().map_err(value_error)?;
    Ok(Requirement::new(id, kind, text))
}

/// `"causal"` or `"non-causal"`.
#[pyfunction]
#[pyo3(signature = (text, kind = "functional"))]
fn classify(text: &str, kind: &str) -> PyResult<&'static str> {
    Ok(match ceg::classify(&requirement("R", text, kind)?) {
        Causality::Causal => "causal",
        Causality::NonCausal => "non-causal",
    })
}

#[pyclass(frozen, get_all, name = "TestCase")]
struct PyTestCase {
    id: String,
    positive: bool,
    assignment: Vec<(String, bool)>,
    expected: Vec<(String, bool)>,
}

#[pymethods]
impl PyTestCase {
    fn __repr__(&self) -> String {
        format!(
            "TestCase({:?}, positive={})",
            self.id,
            if self.positive { "True" } else { "False" }
        )
    }
}

/// Minimal test suite for a conditional requirement sentence.
#[pyfunction]
#[pyo3(signature = (requirement_id, text, kind = "functional"))]
fn derive_tests(requirement_id: &str, text: &str, kind: &str) -> PyResult<Vec<PyTestCase>> {
    let req = requirement(requirement_id, text, kind)?;
    let conditional = ceg::extract(&req).map_err(value_error)?;
    Ok(ceg::derive_tests(&ceg::build_graph(&conditional), requirement_id)
        .into_iter()
        .map(|c| PyTestCase {
            id: c.id(),
            positive: c.is_positive(),
            assignment: c.assignment,
            expected: c.expected,
        })
        .collect())
}

#[pyclass(frozen, name = "TestRun")]
struct PyTestRun {
    #[pyo3(get)]
    test_id: String,
    #[pyo3(get)]
    verdict: &'static str,
    #[pyo3(get)]
    message: Option<String>,
    trace: ExecutionTrace,
}

#[pymethods]
impl PyTestRun {
    /// One line per selected event.
    #[getter]
    fn trace(&self) -> Vec<String> {
        self.trace.to_lines().lines().map(str::to_string).collect()
    }

    #[getter]
    fn terminal(&self) -> String {
        self.trace.terminal.to_string()
    }

    fn diagram(&self, title: &str) -> String {
        render(&trace_to_diagram(&self.trace, title))
    }

    fn __repr__(&self) -> String {
        format!("TestRun({:?}, {:?})", self.test_id, self.verdict)
    }
}

/// Runs one test scenario of `tests` against every spec scenario of `spec`.
/// `now` is in milliseconds since the Unix epoch and defaults to the clock.
#[pyfunction]
#[pyo3(signature = (spec, tests, test_id, budget = DEFAULT_STEP_BUDGET, now = None))]
fn run_test(spec: &str, tests: &str, test_id: &str, budget: usize, now: Option<i64>) -> PyResult<PyTestRun> {
    let spec = parse_file("spec", spec).map_err(value_error)?;
    let tests = parse_file("tests", tests).map_err(value_error)?;
    let test = lower_test(&tests, test_id).ok_or_else(|| value_error(format!("no test scenario `{test_id}`")))?;
    let now = now.map_or_else(Timestamp::now, Timestamp);
    let run = harness::run_test(&lower_specs(&spec), &test, budget, now).map_err(value_error)?;
    let message = match &run.verdict {
        Verdict::Fail(m) => Some(m.clone()),
        Verdict::Inconclusive(reason) => Some(Verdict::Inconclusive(*reason).to_string()),
        Verdict::Pass => None,
    };
    Ok(PyTestRun {
        test_id: run.test_id,
        verdict: run.verdict.keyword(),
        message,
        trace: run.trace,
    })
}

#[pyclass(name = "Model")]
struct PyModel {
    inner: SystemModel,
}

#[pymethods]
impl PyModel {
    #[new]
    fn new() -> Self {
        PyModel {
            inner: SystemModel::new(),
        }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: SystemModel::from_json(text).map_err(value_error)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    /// Element ids, optionally restricted to one kind such as `"TestCase"`.
    #[pyo3(signature = (kind = None))]
    fn ids(&self, kind: Option<&str>) -> PyResult<Vec<String>> {
        let kind: Option<ElementKind> = kind.map(str::parse).transpose().map_err(value_error)?;
        Ok(self
            .inner
            .elements()
            .iter()
            .filter(|e| kind.is_none_or(|k| e.kind == k))
            .map(|e| e.id.clone())
            .collect())
    }

    fn check(&self) -> Vec<String> {
        check_consistency(&self.inner).iter().map(ToString::to_string).collect()
    }

    /// The view as an aligned text table.
    #[pyo3(signature = (kind, focus = None))]
    fn view(&self, kind: &str, focus: Option<&str>) -> PyResult<String> {
        let kind: ViewKind = kind.parse().map_err(value_error)?;
        Ok(derive_view(&self.inner, kind, focus).map_err(value_error)?.to_table())
    }

    fn __len__(&self) -> usize {
        self.inner.elements().len()
    }
}

/// The bundled timer-charging project, file name to content.
#[pyfunction]
fn example_project() -> BTreeMap<&'static str, &'static str> {
    walkthrough::FILES.into_iter().collect()
}

#[pymodule]
fn tdss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(derive_tests, m)?)?;
    m.add_function(wrap_pyfunction!(run_test, m)?)?;
    m.add_function(wrap_pyfunction!(example_project, m)?)?;
    m.add_class::<PyTestCase>()?;
    m.add_class::<PyTestRun>()?;
    m.add_class::<PyModel>()?;
    Ok(())
}
