//! Python bindings. Errors from the library surface as `ValueError`.

use std::hash::{DefaultHasher, Hash, Hasher};

use otmlab::asm::{parse_program, print_program};
use otmlab::instances::{generate, SuiteSpec};
use otmlab::oracle::{CanonOracle, CodeOracle};
use otmlab::problems::{Canonification, Problem};
use otmlab::reductions::{compose, verify_suite, witness_by_name, Reduction};
use otmlab::setcode::{self, encode, encode_canonical, seeded_enumeration};
use otmlab::vm::{self, Fuel, Outcome, RunOptions};
use pyo3::basic::CompareOp;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn hash_of(x: &impl Hash) -> u64 {
    let mut h = DefaultHasher::new();
    x.hash(&mut h);
    h.finish()
}

fn problem(id: &str) -> PyResult<Problem> {
    id.parse().map_err(err)
}

fn canon(p: Problem, policy: &str) -> PyResult<Canonification> {
    match policy {
        "canonical" => Ok(Canonification::canonical(p)),
        "adversarial" => Ok(Canonification::adversarial(p)),
        other => Err(err(format!("unknown policy '{other}' (expected canonical or adversarial)"))),
    }
}

/// An ordinal below epsilon_0 in Cantor normal form.
#[pyclass(frozen, skip_from_py_object, module = "otmlab_py")]
#[derive(Clone)]
struct Ordinal(otmlab::Ordinal);

#[pymethods]
impl Ordinal {
    /// Accepts a natural number or text such as `"w^2*3+w+5"`.
    #[new]
    fn new(value: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(n) = value.extract::<u64>() {
            return Ok(Ordinal(otmlab::Ordinal::finite(n)));
        }
        let text: String = value.extract()?;
        text.parse().map(Ordinal).map_err(err)
    }

    #[staticmethod]
    fn omega() -> Self {
        Ordinal(otmlab::Ordinal::omega())
    }

    /// `w^exp`.
    #[staticmethod]
    fn w_pow(exp: &Ordinal) -> Self {
        Ordinal(otmlab::Ordinal::w_pow(exp.0.clone()))
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Ordinal('{}')", self.0)
    }

    fn __add__(&self, rhs: &Ordinal) -> Self {
        Ordinal(self.0.add(&rhs.0))
    }

    fn __mul__(&self, rhs: &Ordinal) -> Self {
        Ordinal(self.0.mul(&rhs.0))
    }

    fn __richcmp__(&self, other: &Ordinal, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }

    fn __hash__(&self) -> u64 {
        hash_of(&self.0)
    }

    /// The `d` with `lower + d == self`, or `None` if `lower > self`.
    fn sub_left(&self, lower: &Ordinal) -> Option<Ordinal> {
        self.0.sub_left(&lower.0).map(Ordinal)
    }

    fn succ(&self) -> Self {
        Ordinal(self.0.succ())
    }

    fn pred(&self) -> Option<Ordinal> {
        self.0.pred().map(Ordinal)
    }

    fn is_limit(&self) -> bool {
        self.0.is_limit()
    }

    /// The value as an int, or `None` if infinite.
    fn finite(&self) -> Option<u64> {
        self.0.as_finite()
    }
}

#[pyfunction]
fn pair(a: &Ordinal, b: &Ordinal) -> PyResult<Ordinal> {
    otmlab::pairing::pair(&a.0, &b.0).map(Ordinal).map_err(err)
}

#[pyfunction]
fn unpair(c: &Ordinal) -> PyResult<(Ordinal, Ordinal)> {
    otmlab::pairing::unpair(&c.0)
        .map(|(a, b)| (Ordinal(a), Ordinal(b)))
        .map_err(err)
}

/// A hereditarily finite set, written like `{{},{{}}}`.
#[pyclass(frozen, skip_from_py_object, module = "otmlab_py", name = "SetValue")]
#[derive(Clone)]
struct PySet(otmlab::SetValue);

#[pymethods]
impl PySet {
    #[new]
    fn new(literal: &str) -> PyResult<Self> {
        literal.parse().map(PySet).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_literal()
    }

    fn __repr__(&self) -> String {
        format!("SetValue('{}')", self.0.to_literal())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __contains__(&self, x: &PySet) -> bool {
        self.0.contains(&x.0)
    }

    fn __richcmp__(&self, other: &PySet, op: CompareOp) -> bool {
        op.matches(self.0.cmp(&other.0))
    }

    fn __hash__(&self) -> u64 {
        hash_of(&self.0)
    }

    fn elements(&self) -> Vec<PySet> {
        self.0.elements().iter().cloned().map(PySet).collect()
    }

    fn rank(&self) -> usize {
        self.0.rank()
    }
}

/// A set of ordinals read as a membership graph, written like `[2,5,6]`.
#[pyclass(frozen, skip_from_py_object, module = "otmlab_py")]
#[derive(Clone)]
struct Code(otmlab::Code);

#[pymethods]
impl Code {
    /// Accepts code text or a list of naturals and ordinals.
    #[new]
    fn new(value: &Bound<'_, PyAny>) -> PyResult<Self> {
        if let Ok(text) = value.extract::<String>() {
            return text.parse().map(Code).map_err(err);
        }
        let mut elems = std::collections::BTreeSet::new();
        for item in value.try_iter()? {
            elems.insert(Ordinal::new(&item?)?.0);
        }
        Ok(Code(otmlab::Code::new(elems)))
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Code('{}')", self.0.to_text())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __eq__(&self, other: &Code) -> bool {
        self.0 == other.0
    }

    fn __hash__(&self) -> u64 {
        hash_of(&self.0)
    }

    fn elements(&self) -> Vec<Ordinal> {
        self.0.elements().iter().cloned().map(Ordinal).collect()
    }

    /// The `(i, j)` pairs, meaning node `i` is a member of node `j`.
    fn edges(&self) -> PyResult<Vec<(Ordinal, Ordinal)>> {
        let edges = self.0.edges().map_err(err)?;
        Ok(edges.into_iter().map(|(i, j)| (Ordinal(i), Ordinal(j))).collect())
    }
}

/// Encodes `x` with the canonical enumeration, or a shuffled one for `seed`.
#[pyfunction]
#[pyo3(signature = (x, seed=None))]
fn encode_set(x: &PySet, seed: Option<u64>) -> PyResult<Code> {
    match seed {
        None => Ok(Code(encode_canonical(&x.0))),
        Some(s) => encode(&x.0, &seeded_enumeration(&x.0, s)).map(Code).map_err(err),
    }
}

#[pyfunction]
fn decode(c: &Code) -> PyResult<PySet> {
    setcode::decode(&c.0).map(PySet).map_err(err)
}

#[pyfunction]
fn check_rep(c: &Code, x: &PySet) -> bool {
    setcode::check_rep(&c.0, &x.0)
}

/// A transition table.
#[pyclass(frozen, skip_from_py_object, module = "otmlab_py")]
struct Program(vm::Program);

#[pymethods]
impl Program {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_program(text).map(Program).map_err(err)
    }

    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        otmlab::programs::bundled(name)
            .map(Program)
            .ok_or_else(|| err(format!("no bundled program '{name}'")))
    }

    fn __str__(&self) -> String {
        print_program(&self.0)
    }

    fn __eq__(&self, other: &Program) -> bool {
        self.0 == other.0
    }

    #[getter]
    fn halt(&self) -> u32 {
        self.0.halt()
    }

    fn __len__(&self) -> usize {
        self.0.rule_count()
    }
}

/// Runs `program` on `code`. Miracle calls are answered by a canonification
/// of `oracle` if given. Returns a dict with `outcome`, `steps`,
/// `limit_jumps`, `oracle_calls`, `output` (a Code or None) and `trace`
/// (JSON lines, empty unless `trace=True`).
#[pyfunction]
#[pyo3(signature = (program, code, oracle=None, policy="canonical", max_steps=None, max_limits=None, window=None, trace=false))]
#[allow(clippy::too_many_arguments)]
fn run<'py>(
    py: Python<'py>,
    program: &Program,
    code: &Code,
    oracle: Option<&str>,
    policy: &str,
    max_steps: Option<u64>,
    max_limits: Option<u32>,
    window: Option<usize>,
    trace: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let oracle = oracle.map(|id| Ok::<_, PyErr>(CanonOracle::new(canon(problem(id)?, policy)?))).transpose()?;
    let d = Fuel::default();
    let opts = RunOptions {
        fuel: Fuel {
            max_steps_per_segment: max_steps.unwrap_or(d.max_steps_per_segment),
            max_limit_jumps: max_limits.unwrap_or(d.max_limit_jumps),
            window: window.unwrap_or(d.window),
        },
        trace,
    };
    let r = py.detach(|| vm::run(&program.0, &code.0, oracle.as_ref().map(|o| o as &dyn CodeOracle), &opts));
    let out = PyDict::new(py);
    out.set_item("outcome", r.outcome.name())?;
    if let Outcome::Halted(cfg) = &r.outcome {
        out.set_item("time", cfg.time.to_text())?;
    }
    out.set_item("steps", r.steps)?;
    out.set_item("limit_jumps", r.limit_jumps)?;
    out.set_item("oracle_calls", r.oracle_calls)?;
    out.set_item("output", r.output().map(Code))?;
    out.set_item("trace", r.trace.iter().map(|t| t.to_json()).collect::<Vec<_>>())?;
    Ok(out)
}

#[pyfunction]
fn check(problem_id: &str, x: &PySet, y: &PySet) -> PyResult<bool> {
    Ok(problem(problem_id)?.check(&x.0, &y.0))
}

/// The answer a canonification of the problem gives on `x`.
#[pyfunction]
#[pyo3(signature = (problem_id, x, policy="canonical"))]
fn canonify(problem_id: &str, x: &PySet, policy: &str) -> PyResult<PySet> {
    Ok(PySet(canon(problem(problem_id)?, policy)?.apply(&x.0)))
}

fn resolve(witness: &str) -> PyResult<Reduction> {
    let mut acc: Option<Reduction> = None;
    for name in witness.split('+') {
        let next = witness_by_name(name).ok_or_else(|| err(format!("unknown witness '{name}'")))?;
        acc = Some(match (acc, next) {
            (None, r) => r,
            (Some(Reduction::Gw(a)), Reduction::Gw(b)) => Reduction::Gw(compose(&a, &b).map_err(err)?),
            _ => return Err(err("only generalized Weihrauch witnesses can be composed")),
        });
    }
    acc.ok_or_else(|| err("empty witness name"))
}

/// Applies a witness to one instance; returns the solution and the number
/// of oracle calls.
#[pyfunction]
#[pyo3(signature = (witness, x, policy="canonical", seeds=vec![1, 2, 3]))]
fn reduce(witness: &str, x: &PySet, policy: &str, seeds: Vec<u64>) -> PyResult<(PySet, usize)> {
    let r = resolve(witness)?;
    let (z, calls) = r.solve(canon(r.target(), policy)?, &x.0, &seeds).map_err(err)?;
    Ok((PySet(z), calls))
}

/// Checks a witness on a generated suite; returns `(passed, jsonl)`.
#[pyfunction]
#[pyo3(signature = (witness, max_rank=2, max_carrier=4, seeds=3, limit=None))]
fn verify(
    py: Python<'_>,
    witness: &str,
    max_rank: usize,
    max_carrier: usize,
    seeds: u64,
    limit: Option<usize>,
) -> PyResult<(bool, String)> {
    if max_rank > 3 {
        return Err(err("max_rank above 3 is too large to enumerate"));
    }
    let r = resolve(witness)?;
    let spec = SuiteSpec {
        max_rank,
        max_carrier,
        limit,
    };
    let seeds: Vec<u64> = (1..=seeds).collect();
    let report = py.detach(|| verify_suite(&r, &generate(r.source(), &spec), &seeds));
    Ok((report.passed(), report.to_jsonl()))
}

#[pymodule]
fn otmlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Ordinal>()?;
    m.add_class::<PySet>()?;
    m.add_class::<Code>()?;
    m.add_class::<Program>()?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(unpair, m)?)?;
    m.add_function(wrap_pyfunction!(encode_set, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(check_rep, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(canonify, m)?)?;
    m.add_function(wrap_pyfunction!(reduce, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
