use std::collections::BTreeMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use dlaf::classify::{is_marginal, OccurrenceRef};
use dlaf::effects::{analyze_effects, DeterministicProgram, SideEffectSet};
use dlaf::pga::{
    behavior_extract, bisimilar, first_canonical, parse_pga, parse_pga_seq, project_program, second_canonical,
    sufficiently_similar, translate_ft,
};
use dlaf::scl::{check_schema, Schema};
use dlaf::semantics::{holds, instruction_trace, run_expected, ExpectationPolicy, StepBudget, Valuation};
use dlaf::sos::{parse_command, sos_run, SosOutcome};
use dlaf::syntax::{self, eliminate_connectives, to_normal_form};

type State = BTreeMap<String, u64>;

fn err(e: dlaf::Error) -> PyErr {
    match e {
        dlaf::Error::Syntax { .. } | dlaf::Error::UnknownSchema(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn valuation(init: Option<State>) -> Valuation {
    let init = init.unwrap_or_default();
    Valuation::from_pairs(init.iter().map(|(k, v)| (k.as_str(), *v)))
}

fn policy(name: &str) -> PyResult<ExpectationPolicy> {
    ExpectationPolicy::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown policy {name:?}")))
}

fn state(g: &Valuation) -> State {
    g.to_map(&[])
}

fn pairs(s: &SideEffectSet) -> Vec<(String, u64)> {
    s.entries().map(|(k, v)| (k.to_string(), v)).collect()
}

/// A program of the dynamic logic.
#[pyclass(name = "Program", module = "pydlaf", frozen, eq, hash)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyProgram {
    inner: syntax::Program,
}

#[pymethods]
impl PyProgram {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        syntax::parse_program(src).map(|inner| PyProgram { inner }).map_err(err)
    }

    /// Runs the program. Returns `(outcome, final state or None, trace)`.
    #[pyo3(signature = (init=None, max_steps=10_000))]
    fn run(&self, init: Option<State>, max_steps: usize) -> PyResult<(String, Option<State>, Vec<String>)> {
        let (o, trace) = instruction_trace(&self.inner, &valuation(init), StepBudget::new(max_steps)).map_err(err)?;
        Ok((o.kind().to_string(), o.valuation().map(state), trace.iter().map(|t| t.to_string()).collect()))
    }

    /// Runs the program under expected evaluation.
    #[pyo3(signature = (init=None, policy="default", max_steps=10_000))]
    fn run_expected(&self, init: Option<State>, policy: &str, max_steps: usize) -> PyResult<(String, Option<State>)> {
        let o = run_expected(&self.inner, &valuation(init), self::policy(policy)?, StepBudget::new(max_steps))
            .map_err(err)?;
        Ok((o.kind().to_string(), o.valuation().map(state)))
    }

    /// Side effects of a deterministic program, as `(var, value)` pairs.
    #[pyo3(signature = (init=None, policy="default", max_steps=10_000))]
    fn effects(&self, init: Option<State>, policy: &str, max_steps: usize) -> PyResult<Vec<(String, u64)>> {
        let d = DeterministicProgram::new(&self.inner).map_err(err)?;
        let r = analyze_effects(&d, &valuation(init), self::policy(policy)?, StepBudget::new(max_steps)).map_err(err)?;
        Ok(pairs(&r.effects))
    }

    /// Instructions executed by a deterministic program.
    #[pyo3(signature = (init=None, max_steps=10_000))]
    fn canonical(&self, init: Option<State>, max_steps: usize) -> PyResult<Vec<String>> {
        let d = DeterministicProgram::new(&self.inner).map_err(err)?;
        let r = analyze_effects(&d, &valuation(init), ExpectationPolicy::Default, StepBudget::new(max_steps))
            .map_err(err)?;
        Ok(r.canonical.instrs.iter().map(|i| i.to_string()).collect())
    }

    /// Marginality verdict for the occurrence `occ` (`"1"` or `"1:andl"`).
    #[pyo3(signature = (occ, init=None, policy="default", max_steps=10_000))]
    fn classify(
        &self,
        occ: &str,
        init: Option<State>,
        policy: &str,
        max_steps: usize,
    ) -> PyResult<BTreeMap<String, PyObject>> {
        let occ = OccurrenceRef::parse(occ).map_err(PyValueError::new_err)?;
        let d = DeterministicProgram::new(&self.inner).map_err(err)?;
        let v = is_marginal(&d, &occ, &valuation(init), self::policy(policy)?, StepBudget::new(max_steps))
            .map_err(err)?;
        Python::with_gil(|py| {
            let mut m = BTreeMap::new();
            m.insert("occurrence".into(), v.occurrence.to_string().into_py(py));
            m.insert("marginal".into(), v.marginal.into_py(py));
            m.insert("h_E_exists".into(), v.h_e_exists.into_py(py));
            m.insert("delta".into(), pairs(&v.delta).into_py(py));
            m.insert("effect".into(), pairs(&v.effect).into_py(py));
            Ok(m)
        })
    }

    /// The program with complex tests split into primitive ones.
    fn eliminate(&self) -> PyResult<Self> {
        eliminate_connectives(&self.inner).map(|inner| PyProgram { inner }).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Program({:?})", self.inner.to_string())
    }
}

/// A formula, evaluated with short-circuit semantics.
#[pyclass(name = "Formula", module = "pydlaf", frozen, eq, hash)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyFormula {
    inner: syntax::Formula,
}

#[pymethods]
impl PyFormula {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        syntax::parse_formula(src).map(|inner| PyFormula { inner }).map_err(err)
    }

    /// Truth value and the state after evaluation.
    #[pyo3(signature = (init=None))]
    fn holds(&self, init: Option<State>) -> (bool, State) {
        let (b, h) = holds(&self.inner, &valuation(init));
        (b, state(&h))
    }

    fn normal_form(&self) -> PyResult<Self> {
        to_normal_form(&self.inner).map(|inner| PyFormula { inner }).map_err(err)
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", self.inner.to_string())
    }
}

/// Runs a WHILE command by its operational semantics; `None` when stuck.
#[pyfunction]
#[pyo3(signature = (command, init=None, max_steps=10_000))]
fn sos(command: &str, init: Option<State>, max_steps: usize) -> PyResult<Option<State>> {
    let c = parse_command(command).map_err(err)?;
    match sos_run(&c, &valuation(init), StepBudget::new(max_steps)).map_err(err)? {
        SosOutcome::Completed(h) => Ok(Some(state(&h))),
        SosOutcome::Stuck => Ok(None),
    }
}

/// Checks one axiom schema. Returns `(passed, violations)`.
#[pyfunction]
#[pyo3(signature = (schema, trials=500, seed=0))]
fn scl_check(schema: &str, trials: usize, seed: u64) -> PyResult<(bool, usize)> {
    let s = Schema::parse(schema).map_err(err)?;
    let r = check_schema(s, trials, seed);
    Ok((r.passed, r.violations))
}

#[pyfunction]
fn schemas() -> Vec<&'static str> {
    Schema::ALL.iter().map(|s| s.name()).collect()
}

/// First and second canonical form of an instruction sequence.
#[pyfunction]
fn pga_canon(src: &str) -> PyResult<(String, String)> {
    let first = first_canonical(&parse_pga(src).map_err(err)?);
    let second = second_canonical(&first);
    Ok((first.to_string(), second.to_string()))
}

#[pyfunction]
fn pga_behavior(src: &str) -> PyResult<String> {
    let s = parse_pga_seq(src).map_err(err)?;
    behavior_extract(&s).map(|g| g.to_string()).map_err(err)
}

#[pyfunction]
fn pga_bisimilar(a: &str, b: &str) -> PyResult<bool> {
    let ga = behavior_extract(&parse_pga_seq(a).map_err(err)?).map_err(err)?;
    let gb = behavior_extract(&parse_pga_seq(b).map_err(err)?).map_err(err)?;
    Ok(bisimilar(&ga, &gb))
}

#[pyfunction]
fn pga_project(src: &str) -> PyResult<String> {
    Ok(project_program(&parse_pga_seq(src).map_err(err)?).to_string())
}

#[pyfunction]
fn pga_translate(src: &str) -> PyResult<PyProgram> {
    let s = parse_pga_seq(src).map_err(err)?;
    translate_ft(&s).map(|inner| PyProgram { inner }).map_err(err)
}

/// Do the translations with and without projection run alike at `init`?
#[pyfunction]
#[pyo3(signature = (src, init=None, max_steps=10_000))]
fn pga_similar(src: &str, init: Option<State>, max_steps: usize) -> PyResult<bool> {
    let s = parse_pga_seq(src).map_err(err)?;
    let r = sufficiently_similar(&s, &valuation(init), StepBudget::new(max_steps)).map_err(err)?;
    Ok(r.similar)
}

#[pymodule]
fn pydlaf(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProgram>()?;
    m.add_class::<PyFormula>()?;
    m.add_function(wrap_pyfunction!(sos, m)?)?;
    m.add_function(wrap_pyfunction!(scl_check, m)?)?;
    m.add_function(wrap_pyfunction!(schemas, m)?)?;
    m.add_function(wrap_pyfunction!(pga_canon, m)?)?;
    m.add_function(wrap_pyfunction!(pga_behavior, m)?)?;
    m.add_function(wrap_pyfunction!(pga_bisimilar, m)?)?;
    m.add_function(wrap_pyfunction!(pga_project, m)?)?;
    m.add_function(wrap_pyfunction!(pga_translate, m)?)?;
    m.add_function(wrap_pyfunction!(pga_similar, m)?)?;
    Ok(())
}
