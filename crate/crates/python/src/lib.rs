//! Python bindings for the standpoint reasoner.

use std::collections::{BTreeMap, BTreeSet};

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use standpoint::ast;
use standpoint::cli;
use standpoint::fosl;
use standpoint::frontend;
use standpoint::reasoner::{self, DecideConfig, Validity, Verdict};
use standpoint::sat::{emit_dimacs, to_cnf};
use standpoint::semantics::{self, Mode, OracleConfig};
use standpoint::ssnf;
use standpoint::translate::translate_formula;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_error(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn mode(text: &str) -> PyResult<Mode> {
    text.parse().map_err(value_error)
}

/// A propositional standpoint formula.
#[pyclass(frozen, eq, hash, skip_from_py_object, module = "standpoint")]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Formula {
    inner: ast::Formula,
}

#[pymethods]
impl Formula {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text)
    }

    /// Number of distinct subformulas.
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn atoms(&self) -> BTreeSet<String> {
        self.inner.atoms()
    }

    fn standpoints(&self) -> BTreeSet<String> {
        self.inner.standpoints()
    }

    fn modal_depth(&self) -> usize {
        ssnf::modal_depth(&self.inner)
    }

    fn nnf(&self) -> Formula {
        Formula {
            inner: ast::nnf(&self.inner),
        }
    }

    fn ssnf(&self) -> Formula {
        Formula {
            inner: ssnf::ssnf(&self.inner),
        }
    }

    fn __str__(&self) -> String {
        frontend::print_formula(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("Formula({:?})", frontend::print_formula(&self.inner))
    }
}

/// A finite standpoint structure: precisifications, σ and δ.
#[pyclass(frozen, eq, skip_from_py_object, module = "standpoint")]
#[derive(Clone, PartialEq, Eq)]
struct Structure {
    inner: semantics::Structure,
}

#[pymethods]
impl Structure {
    #[new]
    fn new(
        precisifications: Vec<String>,
        sigma: BTreeMap<String, BTreeSet<usize>>,
        delta: BTreeMap<String, BTreeSet<usize>>,
    ) -> PyResult<Self> {
        semantics::Structure::new(precisifications, sigma, delta)
            .map(|inner| Structure { inner })
            .map_err(value_error)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        frontend::parse_structure(text)
            .map(|inner| Structure { inner })
            .map_err(value_error)
    }

    fn to_json(&self) -> String {
        frontend::print_structure(&self.inner)
    }

    #[getter]
    fn precisifications(&self) -> Vec<String> {
        self.inner.precisifications().to_vec()
    }

    #[getter]
    fn sigma(&self) -> BTreeMap<String, BTreeSet<usize>> {
        self.inner.sigma().clone()
    }

    #[getter]
    fn delta(&self) -> BTreeMap<String, BTreeSet<usize>> {
        self.inner.delta().clone()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Truth value of `formula` at each precisification.
    fn check(&self, formula: &Formula) -> Vec<bool> {
        let table = semantics::model_check(&self.inner, &formula.inner);
        (0..self.inner.len()).map(|pi| table.root_at(pi)).collect()
    }

    fn holds(&self, formula: &Formula) -> bool {
        semantics::eval_global(&self.inner, &formula.inner)
    }

    fn __repr__(&self) -> String {
        format!("Structure({})", self.inner.precisifications().join(", "))
    }
}

#[pyfunction]
fn parse(text: &str) -> PyResult<Formula> {
    frontend::parse_formula(text)
        .map(|inner| Formula { inner })
        .map_err(value_error)
}

fn decide_config(
    mode_name: &str,
    nonempty: bool,
    precisifications: Option<usize>,
) -> PyResult<DecideConfig> {
    Ok(DecideConfig {
        mode: mode(mode_name)?,
        nonempty,
        precisifications,
        ..DecideConfig::default()
    })
}

/// Returns a model, or `None` when the formula is unsatisfiable.
#[pyfunction]
#[pyo3(signature = (formula, mode="global", nonempty=false, precisifications=None))]
fn sat(
    formula: &Formula,
    mode: &str,
    nonempty: bool,
    precisifications: Option<usize>,
) -> PyResult<Option<Structure>> {
    let config = decide_config(mode, nonempty, precisifications)?;
    match reasoner::decide(&formula.inner, &config).map_err(runtime_error)? {
        Verdict::Sat(inner) => Ok(Some(Structure { inner })),
        Verdict::Unsat => Ok(None),
    }
}

/// Returns `(True, None)` for a valid formula, else `(False, countermodel)`.
#[pyfunction]
#[pyo3(signature = (formula, nonempty=false))]
fn valid(formula: &Formula, nonempty: bool) -> PyResult<(bool, Option<Structure>)> {
    let config = decide_config("global", nonempty, None)?;
    match reasoner::valid(&formula.inner, &config).map_err(runtime_error)? {
        Validity::Valid => Ok((true, None)),
        Validity::Invalid(inner) => Ok((false, Some(Structure { inner }))),
    }
}

/// Exhaustive small-model search.
#[pyfunction]
#[pyo3(signature = (formula, mode="global", nonempty=false, cap=None))]
fn oracle(
    formula: &Formula,
    mode: &str,
    nonempty: bool,
    cap: Option<usize>,
) -> PyResult<Option<Structure>> {
    let config = OracleConfig {
        mode: self::mode(mode)?,
        nonempty,
        cap,
        ..OracleConfig::default()
    };
    semantics::sat_oracle(&formula.inner, &config)
        .map(|m| m.map(|inner| Structure { inner }))
        .map_err(runtime_error)
}

/// Keeps one witness precisification per modal demand of a model.
#[pyfunction]
fn prune(structure: &Structure, formula: &Formula) -> PyResult<Structure> {
    semantics::prune(&structure.inner, &formula.inner)
        .map(|inner| Structure { inner })
        .map_err(value_error)
}

/// The translation over `n` precisifications as formula text or DIMACS.
#[pyfunction]
#[pyo3(signature = (formula, n=None, format="prop"))]
fn translate(formula: &Formula, n: Option<usize>, format: &str) -> PyResult<String> {
    let t = translate_formula(&formula.inner, n).map_err(value_error)?;
    match format {
        "prop" => Ok(t.formula.to_string()),
        "dimacs" => Ok(emit_dimacs(&to_cnf(&t.formula))),
        other => Err(value_error(format!("unknown format '{other}'"))),
    }
}

/// `(True, [])` when every modal body is a sentence, else `(False, free variables)`.
#[pyfunction]
fn fo_sentential(text: &str) -> PyResult<(bool, Vec<String>)> {
    let f = fosl::parse_fo_formula(text).map_err(value_error)?;
    Ok(match fosl::is_sentential(&f) {
        fosl::Sentential::Accepted => (true, vec![]),
        fosl::Sentential::Rejected { free_vars, .. } => (false, free_vars),
    })
}

/// First-order translation as formula text or TPTP.
#[pyfunction]
#[pyo3(signature = (text, n=None, format="prop"))]
fn fo_translate(text: &str, n: Option<usize>, format: &str) -> PyResult<String> {
    let f = fosl::parse_fo_formula(text).map_err(value_error)?;
    let f = if fosl::fo_modal_depth(&f) > 1 {
        fosl::fo_ssnf(&f).map_err(value_error)?
    } else {
        f
    };
    let t = fosl::fo_translate(&f, n).map_err(value_error)?;
    match format {
        "prop" => Ok(fosl::print_fo_formula(&t.formula)),
        "tptp" => fosl::to_tptp(&t.formula, "f0")
            .map(|out| out.text)
            .map_err(value_error),
        other => Err(value_error(format!("unknown format '{other}'"))),
    }
}

/// Runs a command-line invocation, e.g. `run(["sat", "p & ~p"])`.
/// Returns `(exit code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(i32, String, String)> {
    use clap::Parser;
    let argv = std::iter::once("standpoint".to_string()).chain(args);
    let parsed = cli::Args::try_parse_from(argv).map_err(value_error)?;
    let config = parsed.into_config().map_err(value_error)?;
    let outcome = cli::run(&config);
    Ok((outcome.code, outcome.stdout, outcome.stderr))
}

#[pymodule]
fn standpoint_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Formula>()?;
    m.add_class::<Structure>()?;
    m.add_function(wrap_pyfunction!(parse, m)?)?;
    m.add_function(wrap_pyfunction!(sat, m)?)?;
    m.add_function(wrap_pyfunction!(valid, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(prune, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(fo_sentential, m)?)?;
    m.add_function(wrap_pyfunction!(fo_translate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
