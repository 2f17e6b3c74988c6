//! Python bindings: resolutions of F2 and shipped modules, Steenrod squares
//! on the classes of shipped or user extensions, and table checks.

use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use extsq::chainmap::{lift_to_extension, TieBreak};
use extsq::extension::{library, library_module, ExactExtension, LIBRARY_NAMES};
use extsq::module::CompiledModule;
use extsq::sq::{steenrod_squares as squares, verify_table as check_table, DeltaTable};

fn err(e: extsq::Error) -> PyErr {
    match e {
        extsq::Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn tie_break(name: &str) -> PyResult<TieBreak> {
    match name {
        "natural" => Ok(TieBreak::Natural),
        "reversed" => Ok(TieBreak::Reversed),
        _ => Err(PyValueError::new_err(format!("tie break must be 'natural' or 'reversed', not '{name}'"))),
    }
}

fn extension(name: &str) -> PyResult<ExactExtension> {
    let e = if LIBRARY_NAMES.contains(&name) {
        library(name).map_err(err)?
    } else {
        ExactExtension::from_file(name).map_err(err)?
    };
    let report = e.verify_exact();
    if !report.is_exact() {
        return Err(PyValueError::new_err(format!("not exact: {}", report.failures.join("; "))));
    }
    Ok(e)
}

fn f2(s: u32, t: i32) -> PyResult<extsq::resolution::Resolution> {
    extsq::steenrod::check_degree(t.max(0) as u32).map_err(err)?;
    Ok(extsq::resolution::resolve_f2(s, t))
}

/// A minimal resolution through a finite frontier.
#[pyclass(frozen)]
struct Resolution {
    inner: extsq::resolution::Resolution,
}

#[pymethods]
impl Resolution {
    #[getter]
    fn s_max(&self) -> u32 {
        self.inner.s_max()
    }

    #[getter]
    fn t_max(&self) -> i32 {
        self.inner.t_max()
    }

    /// `(name, degree)` for the generators in homological degree `s`.
    fn generators(&self, s: u32) -> Vec<(String, i32)> {
        if s > self.inner.s_max() {
            return Vec::new();
        }
        self.inner.generators(s).iter().map(|g| (g.name(), g.degree)).collect()
    }

    /// The differential of a generator such as `"2_2"`.
    fn differential(&self, name: &str) -> PyResult<String> {
        let g = self
            .inner
            .generator_by_name(name)
            .ok_or_else(|| PyValueError::new_err(format!("no generator {name}")))?;
        Ok(self.inner.format_differential(g))
    }

    /// One line `s_g t : d(s_g)` per generator.
    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn canonical_hash(&self) -> String {
        extsq::checkpoint::canonical_hash(&self.inner)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        extsq::checkpoint::save(&self.inner, path).map_err(err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Resolution> {
        Ok(Resolution {
            inner: extsq::checkpoint::load(path).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Resolution({}, s_max={}, t_max={})",
            self.inner.module().name(),
            self.inner.s_max(),
            self.inner.t_max()
        )
    }
}

/// Resolves F2, or a shipped module such as `"e0_m0"`.
#[pyfunction]
#[pyo3(signature = (s_max, t_max, module = "F2"))]
fn resolve(py: Python<'_>, s_max: u32, t_max: i32, module: &str) -> PyResult<Resolution> {
    extsq::steenrod::check_degree(t_max.max(0) as u32).map_err(err)?;
    let m = if module == "F2" {
        CompiledModule::f2(0)
    } else {
        library_module(module).map_err(err)?.compile().map_err(err)?
    };
    let inner = py.detach(move || extsq::resolution::resolve(Arc::new(m), s_max, t_max));
    Ok(Resolution { inner })
}

/// `(Sq^s x, ..., Sq^0 x)` for the class of a shipped extension or an
/// extension file, each entry a sum of generators or `"0"`.
#[pyfunction]
#[pyo3(signature = (extension_name, tie_break = "natural"))]
fn steenrod_squares(py: Python<'_>, extension_name: &str, tie_break: &str) -> PyResult<Vec<String>> {
    let tie = self::tie_break(tie_break)?;
    let e = extension(extension_name)?;
    let res = f2(2 * e.length() as u32, 2 * e.t())?;
    let sq = py.detach(|| squares(&res, &e, tie)).map_err(err)?;
    Ok(sq.classes.iter().rev().map(ToString::to_string).collect())
}

/// The class an extension represents, as a sum of generators or `"0"`.
#[pyfunction]
fn top_cocycle(extension_name: &str) -> PyResult<String> {
    let e = extension(extension_name)?;
    let t = e.modules().iter().map(|m| m.max_degree()).max().unwrap_or(0).max(e.t());
    let res = f2(e.length() as u32, t)?;
    Ok(lift_to_extension(&res, &e, TieBreak::Natural)
        .map_err(err)?
        .top_cocycle()
        .to_string())
}

/// Failing equations of the shipped Δ table for `c0`, `c1` or `f0`.
#[pyfunction]
fn verify_table(name: &str) -> PyResult<Vec<String>> {
    let e = extension(name)?;
    let table = DeltaTable::library(name).map_err(err)?;
    let res = f2(2 * e.length() as u32, 2 * e.t())?;
    Ok(check_table(&res, &e, &table).map_err(err)?.failures)
}

#[pyfunction]
fn library_names() -> Vec<&'static str> {
    LIBRARY_NAMES.to_vec()
}

#[pymodule(name = "extsq")]
mod extsq_module {
    #[pymodule_export]
    use super::{library_names, resolve, steenrod_squares, top_cocycle, verify_table, Resolution};
}
