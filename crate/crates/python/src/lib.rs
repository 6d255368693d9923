//! Python bindings: `import kleinhilb`.

use kleinhilb::character::{
    extended_character, weight_multiplicity as multiplicity, CharacterError, CharacterSeries,
};
use kleinhilb::cyclotomic::CyclotomicInteger;
use kleinhilb::lattice_theta::{
    theta_untwisted as untwisted, twisted_theta as twisted, LatticeError,
};
use kleinhilb::lie_data::{cartan_matrix, coxeter_number, zeta_order, DynkinType, LieError};
use kleinhilb::oracle::{count_colored_partitions, typea_series_oracle, OracleError};
use kleinhilb::qseries::demote_to_integer;
use kleinhilb::zeta_series::{self, Budget, SurfaceSpec, ZetaError};
use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(
    kleinhilb,
    BudgetError,
    PyException,
    "A computation would exceed its resource budget."
);
create_exception!(
    kleinhilb,
    IntegralityError,
    PyException,
    "A series has a non-integral coefficient."
);

fn lie_err(e: LieError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn lattice_err(e: LatticeError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn zeta_err(e: ZetaError) -> PyErr {
    match e {
        ZetaError::Budget { .. } => BudgetError::new_err(e.to_string()),
        ZetaError::Integrality { .. } => IntegralityError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn character_err(e: CharacterError) -> PyErr {
    match e {
        CharacterError::Budget { .. } => BudgetError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn oracle_err(e: OracleError) -> PyErr {
    match e {
        OracleError::Budget(_) => BudgetError::new_err(e.to_string()),
        OracleError::BadModulus(_) => PyValueError::new_err(e.to_string()),
    }
}

fn cyclo_coeffs(c: &CyclotomicInteger) -> Vec<BigInt> {
    c.coeffs().to_vec()
}

/// A simply-laced Dynkin type such as `A3`, `D5` or `E8`.
#[pyclass(name = "DynkinType", module = "kleinhilb", frozen, from_py_object)]
#[derive(Clone)]
struct PyDynkinType {
    inner: DynkinType,
}

#[pymethods]
impl PyDynkinType {
    #[new]
    fn new(name: &str) -> PyResult<Self> {
        name.parse()
            .map(|inner| PyDynkinType { inner })
            .map_err(lie_err)
    }

    #[getter]
    fn series(&self) -> String {
        self.inner.series().to_string()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn coxeter_number(&self) -> u64 {
        coxeter_number(self.inner)
    }

    /// Order `1 + h` of the root of unity in the twisted theta sum.
    #[getter]
    fn zeta_order(&self) -> u64 {
        zeta_order(self.inner)
    }

    fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        cartan_matrix(self.inner).rows()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("DynkinType('{}')", self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __hash__(&self) -> u64 {
        let base = match self.inner.series() {
            kleinhilb::lie_data::Series::A => 0,
            kleinhilb::lie_data::Series::D => 1 << 32,
            kleinhilb::lie_data::Series::E => 2 << 32,
        };
        base + self.inner.rank() as u64
    }
}

/// Accepts either a `DynkinType` or its name.
#[derive(FromPyObject)]
enum TypeArg {
    Typed(PyDynkinType),
    Name(String),
}

impl TypeArg {
    fn resolve(self) -> PyResult<DynkinType> {
        match self {
            TypeArg::Typed(t) => Ok(t.inner),
            TypeArg::Name(s) => s.parse().map_err(lie_err),
        }
    }
}

/// Result of `local_series`: the series over `Z[zeta]` and, when every
/// coefficient is a rational integer, its integer form.
#[pyclass(name = "LocalSeries", module = "kleinhilb", frozen)]
struct PyLocalSeries {
    #[pyo3(get)]
    dynkin_type: PyDynkinType,
    #[pyo3(get)]
    truncation: usize,
    #[pyo3(get)]
    integral: bool,
    #[pyo3(get)]
    first_failure_degree: Option<usize>,
    coefficients: Option<Vec<BigInt>>,
    cyclotomic: Vec<Vec<BigInt>>,
}

#[pymethods]
impl PyLocalSeries {
    /// Integer coefficients; raises `IntegralityError` if the certificate failed.
    #[getter]
    fn coefficients(&self) -> PyResult<Vec<BigInt>> {
        self.coefficients.clone().ok_or_else(|| {
            IntegralityError::new_err(format!(
                "coefficient of q^{} is not a rational integer",
                self.first_failure_degree.unwrap_or(0)
            ))
        })
    }

    /// Coefficients in the power basis `1, zeta, ..., zeta^(phi-1)`.
    #[getter]
    fn cyclotomic(&self) -> Vec<Vec<BigInt>> {
        self.cyclotomic.clone()
    }

    fn __len__(&self) -> usize {
        self.truncation + 1
    }

    fn __repr__(&self) -> String {
        format!(
            "LocalSeries(type='{}', truncation={}, integral={})",
            self.dynkin_type.inner, self.truncation, self.integral
        )
    }
}

/// The multivariate character, truncated at `q^order`.
#[pyclass(name = "Character", module = "kleinhilb", frozen)]
struct PyCharacter {
    inner: CharacterSeries,
}

#[pymethods]
impl PyCharacter {
    #[getter]
    fn truncation(&self) -> usize {
        self.inner.truncation
    }

    #[getter]
    fn support_size(&self) -> usize {
        self.inner.support_len()
    }

    fn multiplicity(&self, beta: Vec<i32>, degree: usize) -> PyResult<BigInt> {
        self.inner
            .weight_multiplicity(&beta, degree)
            .map_err(character_err)
    }

    /// `[(beta, multiplicity), ...]` for the coefficient of `q^degree`.
    fn coefficient(&self, degree: usize) -> PyResult<Vec<(Vec<i32>, BigInt)>> {
        let c = self.inner.coefficient(degree).map_err(character_err)?;
        Ok(c.iter().map(|(b, m)| (b.to_vec(), m.clone())).collect())
    }

    fn specialize_at_one(&self) -> Vec<BigInt> {
        self.inner.specialize_at_one().into_coeffs()
    }

    fn specialize_at_zeta(&self) -> Vec<Vec<BigInt>> {
        self.inner
            .specialize_at_zeta()
            .coeffs()
            .iter()
            .map(cyclo_coeffs)
            .collect()
    }
}

fn budget(budget_mb: Option<u64>) -> Budget {
    budget_mb.map(Budget::from_megabytes).unwrap_or_default()
}

#[pyfunction]
fn local_series(py: Python<'_>, dynkin_type: TypeArg, order: usize) -> PyResult<PyLocalSeries> {
    let t = dynkin_type.resolve()?;
    let r = py
        .detach(|| zeta_series::local_series(t, order))
        .map_err(zeta_err)?;
    Ok(PyLocalSeries {
        dynkin_type: PyDynkinType { inner: t },
        truncation: order,
        integral: r.certificate.ok,
        first_failure_degree: r.certificate.first_failure_degree,
        coefficients: r.series.map(|s| s.into_coeffs()),
        cyclotomic: r.cyclotomic.coeffs().iter().map(cyclo_coeffs).collect(),
    })
}

/// Global series of a surface whose smooth locus has Euler characteristic
/// `chi0`, with the given singular points.
#[pyfunction]
#[pyo3(signature = (chi0, singularities, order))]
fn surface_series(
    py: Python<'_>,
    chi0: i64,
    singularities: Vec<TypeArg>,
    order: usize,
) -> PyResult<Vec<BigInt>> {
    let sings = singularities
        .into_iter()
        .map(TypeArg::resolve)
        .collect::<PyResult<Vec<_>>>()?;
    let spec = SurfaceSpec::new(chi0, sings);
    let s = py
        .detach(|| zeta_series::surface_series(&spec, order))
        .map_err(zeta_err)?;
    Ok(s.into_coeffs())
}

#[pyfunction]
fn twisted_theta(py: Python<'_>, dynkin_type: TypeArg, order: usize) -> PyResult<Vec<Vec<BigInt>>> {
    let t = dynkin_type.resolve()?;
    let s = py.detach(|| twisted(t, order)).map_err(lattice_err)?;
    Ok(s.coeffs().iter().map(cyclo_coeffs).collect())
}

#[pyfunction]
fn theta_untwisted(py: Python<'_>, dynkin_type: TypeArg, order: usize) -> PyResult<Vec<BigInt>> {
    let t = dynkin_type.resolve()?;
    let s = py.detach(|| untwisted(t, order)).map_err(lattice_err)?;
    Ok(s.into_coeffs())
}

#[pyfunction]
#[pyo3(signature = (dynkin_type, order, budget_mb = None))]
fn character(
    py: Python<'_>,
    dynkin_type: TypeArg,
    order: usize,
    budget_mb: Option<u64>,
) -> PyResult<PyCharacter> {
    let t = dynkin_type.resolve()?;
    let inner = py
        .detach(|| extended_character(t, order, &budget(budget_mb)))
        .map_err(character_err)?;
    Ok(PyCharacter { inner })
}

#[pyfunction]
#[pyo3(signature = (dynkin_type, beta, degree, budget_mb = None))]
fn weight_multiplicity(
    py: Python<'_>,
    dynkin_type: TypeArg,
    beta: Vec<i32>,
    degree: usize,
    budget_mb: Option<u64>,
) -> PyResult<BigInt> {
    let t = dynkin_type.resolve()?;
    py.detach(|| multiplicity(t, &beta, degree, &budget(budget_mb)))
        .map_err(character_err)
}

/// True iff the character specialized at the root of unity reproduces the
/// local series to `q^order`.
#[pyfunction]
fn check_specialization(py: Python<'_>, dynkin_type: TypeArg, order: usize) -> PyResult<bool> {
    let t = dynkin_type.resolve()?;
    py.detach(|| {
        let c = extended_character(t, order, &Budget::default()).map_err(character_err)?;
        let local = zeta_series::local_series(t, order).map_err(zeta_err)?;
        let special = demote_to_integer(&c.specialize_at_zeta()).ok();
        Ok(special.is_some() && special == local.series)
    })
}

/// Counts of torus-fixed ideals of colength `0..=max_m` for `C^2 / Z_r`.
#[pyfunction]
fn typea_oracle(py: Python<'_>, r: u32, max_m: usize) -> PyResult<Vec<BigInt>> {
    let s = py
        .detach(|| typea_series_oracle(r, max_m))
        .map_err(oracle_err)?;
    Ok(s.into_coeffs())
}

/// Number of `colors`-tuples of partitions of total size `k`.
#[pyfunction]
#[pyo3(signature = (k, colors = 1))]
fn partitions(k: usize, colors: u32) -> BigInt {
    count_colored_partitions(k, colors)
}

#[pymodule(name = "kleinhilb")]
fn kleinhilb_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("BudgetError", m.py().get_type::<BudgetError>())?;
    m.add("IntegralityError", m.py().get_type::<IntegralityError>())?;
    m.add_class::<PyDynkinType>()?;
    m.add_class::<PyLocalSeries>()?;
    m.add_class::<PyCharacter>()?;
    m.add_function(wrap_pyfunction!(local_series, m)?)?;
    m.add_function(wrap_pyfunction!(surface_series, m)?)?;
    m.add_function(wrap_pyfunction!(twisted_theta, m)?)?;
    m.add_function(wrap_pyfunction!(theta_untwisted, m)?)?;
    m.add_function(wrap_pyfunction!(character, m)?)?;
    m.add_function(wrap_pyfunction!(weight_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(check_specialization, m)?)?;
    m.add_function(wrap_pyfunction!(typea_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(partitions, m)?)?;
    Ok(())
}
