//! Python bindings: the `pyresurgence` extension module.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyComplex;
use rug::Rational;

use resurgence::fitlab::{self, FitConfig};
use resurgence::gfunc::{self, Method};
use resurgence::mpcore::{to_decimal, MpComplex, PrecisionContext};
use resurgence::polyengine::{self, RationalPolynomial};
use resurgence::verify::{self, VerifyOptions};
use resurgence::{resurgent, Error};

create_exception!(pyresurgence, ResurgenceError, PyException);
create_exception!(pyresurgence, DomainError, ResurgenceError);
create_exception!(pyresurgence, BranchCutError, DomainError);
create_exception!(pyresurgence, PrecisionError, ResurgenceError);
create_exception!(pyresurgence, ReconstructionError, ResurgenceError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::BranchCut(_) => BranchCutError::new_err(msg),
        Error::Domain(_) | Error::Degenerate(_) | Error::Unwrap { .. } | Error::Smoothness { .. } => {
            DomainError::new_err(msg)
        }
        Error::Precision(_) | Error::CrossCheck { .. } => PrecisionError::new_err(msg),
        Error::Reconstruction { .. } => ReconstructionError::new_err(msg),
        Error::Parse(_) => PyValueError::new_err(msg),
    }
}

fn context(digits: u32) -> PyResult<PrecisionContext> {
    PrecisionContext::new(digits).map_err(py_err)
}

fn rational_text(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

fn poly_terms(p: &RationalPolynomial) -> Vec<String> {
    p.coeffs().iter().map(rational_text).collect()
}

fn parse_rational(text: &str) -> PyResult<Rational> {
    let p = RationalPolynomial::parse_line(text).map_err(py_err)?;
    if p.coeffs().len() > 1 {
        return Err(PyValueError::new_err(format!("expected one rational, got {text:?}")));
    }
    Ok(p.coeff(0))
}

/// Accepts a string literal or any object with numeric `real` and `imag`.
fn complex_arg(z: &Bound<'_, PyAny>, ctx: &PrecisionContext) -> PyResult<MpComplex> {
    if let Ok(s) = z.extract::<String>() {
        return MpComplex::parse(&s, ctx).map_err(py_err);
    }
    let re: f64 = z.getattr("real")?.extract()?;
    let im: f64 = z.getattr("imag")?.extract()?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(PyValueError::new_err("z must be finite"));
    }
    Ok(MpComplex::from_f64(ctx, re, im))
}

fn real_arg(u: &Bound<'_, PyAny>, ctx: &PrecisionContext) -> PyResult<rug::Float> {
    if let Ok(s) = u.extract::<String>() {
        return ctx.parse(&s).map_err(py_err);
    }
    let v: f64 = u.extract()?;
    Ok(ctx.real(v))
}

/// Value of G(z) with its error bound, as decimal strings.
#[pyclass(module = "pyresurgence", frozen, get_all)]
struct GValue {
    re: String,
    im: String,
    err: String,
    method: String,
}

#[pymethods]
impl GValue {
    fn __complex__<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyComplex>> {
        let re: f64 = self.re.parse().map_err(|_| PyValueError::new_err("bad real part"))?;
        let im: f64 = self.im.parse().map_err(|_| PyValueError::new_err("bad imaginary part"))?;
        Ok(PyComplex::from_doubles(py, re, im))
    }

    fn __repr__(&self) -> String {
        format!("GValue(re={}, im={}, err={}, method={})", self.re, self.im, self.err, self.method)
    }
}

/// G(z) = sum_{n>=1} sqrt(n) z^n, analytically continued off [1, inf).
#[pyfunction]
#[pyo3(signature = (z, digits = 50, method = None, crosscheck = false))]
fn g(z: &Bound<'_, PyAny>, digits: u32, method: Option<&str>, crosscheck: bool) -> PyResult<GValue> {
    let ctx = context(digits)?;
    let z = complex_arg(z, &ctx)?;
    let r = match method {
        Some(name) => {
            let m: Method = name.parse().map_err(py_err)?;
            gfunc::g_with(&z, m, &ctx).map_err(py_err)?
        }
        None => gfunc::g_auto(&z, &ctx, crosscheck).map_err(py_err)?,
    };
    Ok(GValue {
        re: to_decimal(&r.value.re, digits),
        im: to_decimal(&r.value.im, digits),
        err: r.err.to_string_radix(10, Some(6)),
        method: r.method.to_string(),
    })
}

/// Names of the methods whose domain contains z.
#[pyfunction]
#[pyo3(signature = (z, digits = 50))]
fn applicable_methods(z: &Bound<'_, PyAny>, digits: u32) -> PyResult<Vec<String>> {
    let ctx = context(digits)?;
    let z = complex_arg(z, &ctx)?;
    Ok(gfunc::applicable_methods(&z, &ctx).iter().map(|m| m.to_string()).collect())
}

/// S(u) as (x, S, digits left after cancellation).
#[pyfunction]
#[pyo3(signature = (u, digits = None))]
fn s_of_u(u: &Bound<'_, PyAny>, digits: Option<u32>) -> PyResult<(String, String, i64)> {
    let probe = context(30)?;
    let u_probe = real_arg(u, &probe)?.to_f64();
    let digits = digits.unwrap_or_else(|| resurgent::required_digits(u_probe, 30, 20));
    let ctx = context(digits)?;
    let s = resurgent::s_of_u(&real_arg(u, &ctx)?, &ctx).map_err(py_err)?;
    let shown = s.digits_effective.clamp(1, 40) as u32;
    Ok((to_decimal(&s.x, 20), to_decimal(&s.s, shown), s.digits_effective))
}

/// Delta_0..Delta_K as lists of "num/den" coefficients, lowest degree first.
#[pyfunction]
fn deltas(k_max: usize) -> Vec<Vec<String>> {
    polyengine::delta_table_fast(k_max).iter().map(poly_terms).collect()
}

/// g_0..g_K.
#[pyfunction]
fn g_sequence(k_max: usize) -> Vec<String> {
    polyengine::g_sequence(k_max).iter().map(rational_text).collect()
}

/// The shipped exact P_k(0).
#[pyfunction]
fn shipped_constants() -> Vec<String> {
    fitlab::shipped_constants().iter().map(rational_text).collect()
}

/// Table of Delta_k, F_k and optionally P_k.
#[pyclass(module = "pyresurgence", name = "PolyTable", frozen)]
struct PyPolyTable {
    inner: polyengine::PolyTable,
}

#[pymethods]
impl PyPolyTable {
    /// Deltas and antidifferences only.
    #[staticmethod]
    fn build(k_max: usize) -> Self {
        Self {
            inner: polyengine::PolyTable::build(k_max),
        }
    }

    /// P_0..P_K from the shipped constants.
    #[staticmethod]
    fn shipped(k_max: usize) -> PyResult<Self> {
        let inner = fitlab::shipped_table(k_max).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// P_0..P_K from constants given as "num/den" strings.
    #[staticmethod]
    fn with_constants(constants: Vec<String>) -> PyResult<Self> {
        let qs = constants.iter().map(|c| parse_rational(c)).collect::<PyResult<Vec<_>>>()?;
        if qs.is_empty() {
            return Err(PyValueError::new_err("need at least one constant"));
        }
        let inner = polyengine::assemble(qs.len() - 1, &qs).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = polyengine::PolyTable::from_text(text).map_err(py_err)?;
        Ok(Self { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn k_max(&self) -> usize {
        self.inner.k_max()
    }

    fn delta(&self, k: usize) -> PyResult<Vec<String>> {
        self.inner
            .deltas()
            .get(k)
            .map(poly_terms)
            .ok_or_else(|| PyValueError::new_err(format!("k = {k} is beyond the table")))
    }

    /// P_k, or None when no constants are attached.
    fn poly(&self, k: usize) -> PyResult<Option<Vec<String>>> {
        if k > self.inner.k_max() {
            return Err(PyValueError::new_err(format!("k = {k} is beyond the table")));
        }
        Ok(self.inner.poly(k).as_ref().map(poly_terms))
    }

    /// (k, denominator, largest prime factor, bound 2k+3) per polynomial.
    fn smoothness(&self) -> Vec<(usize, String, u64, u64)> {
        self.inner
            .smoothness_summary()
            .into_iter()
            .map(|r| (r.k, r.denominator.to_string(), r.largest_prime, r.bound))
            .collect()
    }

    fn __len__(&self) -> usize {
        self.inner.k_max() + 1
    }
}

/// Recovers P_0(0)..P_K(0) by sampling S(u) on even u and peeling.
#[pyfunction]
#[pyo3(signature = (u_min = 402, u_max = 600, count = 100, k_max = 12, digits = None))]
fn fit(py: Python<'_>, u_min: u32, u_max: u32, count: usize, k_max: usize, digits: Option<u32>) -> PyResult<Vec<String>> {
    let mut cfg = FitConfig {
        u_min,
        u_max,
        count,
        k_max,
        ..FitConfig::default()
    };
    cfg.digits = digits.unwrap_or_else(|| cfg.min_digits().max(FitConfig::default().digits));
    cfg.validate().map_err(py_err)?;
    let out = py.detach(|| fitlab::fit_constants(&cfg)).map_err(py_err)?;
    if let Some(e) = out.failure {
        return Err(py_err(e));
    }
    Ok(out.constants().iter().map(rational_text).collect())
}

/// (C, R, stable digits) from the exact derivatives of P_k at 0 over [k_lo, k_hi].
#[pyfunction]
#[pyo3(signature = (k_lo = 110, k_hi = 150, digits = 40))]
fn extract_cr(py: Python<'_>, k_lo: usize, k_hi: usize, digits: u32) -> PyResult<(String, String, u32)> {
    let ctx = context(digits)?;
    let est = py.detach(|| fitlab::extract_cr(k_lo, k_hi, &ctx)).map_err(py_err)?;
    Ok((to_decimal(&est.c, digits), to_decimal(&est.r, digits), est.stable_digits))
}

/// (passed, report line) for acceptance criterion `id` in 1..=10.
#[pyfunction]
#[pyo3(signature = (id, quick = true))]
fn run_criterion(py: Python<'_>, id: u8, quick: bool) -> PyResult<(bool, String)> {
    if !(1..=10).contains(&id) {
        return Err(PyValueError::new_err("criterion id must lie in 1..=10"));
    }
    let r = py.detach(|| verify::run_criterion(id, VerifyOptions { quick }));
    Ok((r.passed, r.line()))
}

#[pymodule]
fn pyresurgence(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("ResurgenceError", py.get_type::<ResurgenceError>())?;
    m.add("DomainError", py.get_type::<DomainError>())?;
    m.add("BranchCutError", py.get_type::<BranchCutError>())?;
    m.add("PrecisionError", py.get_type::<PrecisionError>())?;
    m.add("ReconstructionError", py.get_type::<ReconstructionError>())?;
    m.add("C_REFERENCE", fitlab::C_REFERENCE)?;
    m.add("R_REFERENCE", fitlab::R_REFERENCE)?;
    m.add_class::<GValue>()?;
    m.add_class::<PyPolyTable>()?;
    m.add_function(wrap_pyfunction!(g, m)?)?;
    m.add_function(wrap_pyfunction!(applicable_methods, m)?)?;
    m.add_function(wrap_pyfunction!(s_of_u, m)?)?;
    m.add_function(wrap_pyfunction!(deltas, m)?)?;
    m.add_function(wrap_pyfunction!(g_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(shipped_constants, m)?)?;
    m.add_function(wrap_pyfunction!(fit, m)?)?;
    m.add_function(wrap_pyfunction!(extract_cr, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let q = parse_rational("-433/24192").unwrap();
        assert_eq!(rational_text(&q), "-433/24192");
        assert_eq!(rational_text(&parse_rational("7").unwrap()), "7/1");
    }

    #[test]
    fn delta_terms() {
        let d = deltas(1);
        assert_eq!(d[1], vec!["-1/24", "0/1", "2/1"]);
    }
}
