//! Python bindings for the unitary-core library.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use unitary_core::formulas;
use unitary_core::gf2k::Field;
use unitary_core::group::builders::{
    build, build_family, flatten, parse_case, parse_spec, FamilyDescriptor, FamilyTheorem,
};
use unitary_core::group::iso;
use unitary_core::group::Group as CoreGroup;
use unitary_core::unitary::{self, ThetaMethod};

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn build_core(spec: &str) -> PyResult<CoreGroup> {
    build(&parse_spec(spec).map_err(value_err)?).map_err(value_err)
}

fn field_of(q: u16) -> PyResult<Field> {
    if !q.is_power_of_two() || !(2..=256).contains(&q) {
        return Err(value_err(format!("field must be a power of two in 2..=256, got {q}")));
    }
    Field::new(q.trailing_zeros() as u8).map_err(value_err)
}

fn theta_of(name: &str) -> PyResult<ThetaMethod> {
    match name {
        "exhaustive" => Ok(ThetaMethod::Exhaustive),
        "sampled" => Ok(ThetaMethod::Sampled),
        "lemma" => Ok(ThetaMethod::Lemma),
        other => Err(value_err(format!("unknown theta method {other:?}"))),
    }
}

/// A finite 2-group built from a spec string such as "Q8 . D8 x Z4".
#[pyclass(name = "Group", frozen)]
struct PyGroup {
    inner: CoreGroup,
    spec: String,
}

#[pymethods]
impl PyGroup {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self { inner: build_core(spec)?, spec: spec.to_string() })
    }

    #[getter]
    fn spec(&self) -> &str {
        &self.spec
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn abelian(&self) -> bool {
        self.inner.is_abelian()
    }

    #[getter]
    fn exponent(&self) -> u64 {
        self.inner.exponent()
    }

    #[getter]
    fn center_order(&self) -> usize {
        self.inner.center().order()
    }

    #[getter]
    fn derived_order(&self) -> usize {
        self.inner.derived().order()
    }

    /// Sizes of the involution sets: (|Omega_1|, |Omega_c|).
    fn omega(&self) -> (usize, usize) {
        let counts = self.inner.omega_sets();
        (counts.count1(), counts.count_c())
    }

    fn __repr__(&self) -> String {
        format!("Group({:?}, order={})", self.spec, self.inner.order())
    }
}

/// Count |V_*(FG)| by "brute", "recursion", or "formula".
#[pyfunction]
#[pyo3(signature = (spec, field=2, method="recursion", theta="lemma", budget=None))]
fn vstar(spec: &str, field: u16, method: &str, theta: &str, budget: Option<u64>) -> PyResult<u128> {
    let group = build_core(spec)?;
    let f = field_of(field)?;
    match method {
        "brute" => unitary::count_vstar_bruteforce(&group, &f, budget).map_err(value_err),
        "recursion" => {
            let value = if group.is_abelian() {
                formulas::abelian_vstar(&group, f.k()).map_err(value_err)?
            } else {
                unitary::vstar_recursion(&group, &f, theta_of(theta)?).map_err(value_err)?
            };
            value.to_u128().ok_or_else(|| value_err("order exceeds u128"))
        }
        "formula" => {
            let flat = flatten(&parse_spec(spec).map_err(value_err)?).map_err(value_err)?;
            let value = formulas::vstar_recursion_symbolic(&flat, f.k()).map_err(value_err)?;
            value.to_u128().ok_or_else(|| value_err("order exceeds u128"))
        }
        other => Err(value_err(format!("unknown method {other:?}"))),
    }
}

/// The theta invariant of the recursion, as an integer.
#[pyfunction]
#[pyo3(signature = (spec, field=2, method="lemma"))]
fn theta(spec: &str, field: u16, method: &str) -> PyResult<u128> {
    let group = build_core(spec)?;
    let f = field_of(field)?;
    let value = unitary::theta(&group, &f, theta_of(method)?).map_err(value_err)?;
    value.to_u128().ok_or_else(|| value_err("theta is not an integer"))
}

/// Whether two spec strings build isomorphic groups.
#[pyfunction]
fn is_isomorphic(spec_a: &str, spec_b: &str) -> PyResult<bool> {
    iso::is_isomorphic(&build_core(spec_a)?, &build_core(spec_b)?).map_err(value_err)
}

/// Spec string for one classification family instance.
#[pyfunction]
#[pyo3(signature = (theorem, case, n=1, m=1, k=1, r=2))]
fn classify(theorem: &str, case: &str, n: u32, m: u32, k: u32, r: u32) -> PyResult<String> {
    let desc = FamilyDescriptor {
        theorem: theorem.parse::<FamilyTheorem>().map_err(value_err)?,
        case: parse_case(case).map_err(value_err)?,
        n,
        m,
        k,
        r,
    };
    Ok(build_family(&desc).map_err(value_err)?.to_string())
}

#[pymodule]
fn unitary_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(vstar, m)?)?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(is_isomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    Ok(())
}
