use num_bigint::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use simplek::bits::{self, BitString, StringIndex};
use simplek::kraft;
use simplek::lab::{Lab, LabConfig};
use simplek::theorem;
use simplek::vm;

/// Accepts `^` or the empty Python string for Λ.
fn parse(s: &str) -> PyResult<BitString> {
    if s.is_empty() {
        return Ok(BitString::empty());
    }
    s.parse()
        .map_err(|e| PyValueError::new_err(format!("bad bit string {s:?}: {e}")))
}

#[pyfunction]
fn index_of(x: &str) -> PyResult<BigUint> {
    Ok(bits::index_of(&parse(x)?).0)
}

#[pyfunction]
fn string_of(n: BigUint) -> String {
    bits::string_of(&StringIndex(n)).to_string()
}

#[pyfunction]
fn pair(x: &str, y: &str) -> PyResult<String> {
    Ok(bits::pair(&parse(x)?, &parse(y)?).to_string())
}

#[pyfunction]
fn unpair(z: &str) -> PyResult<(String, String)> {
    let (a, b) = bits::unpair(&parse(z)?);
    Ok((a.to_string(), b.to_string()))
}

#[pyfunction]
fn tuple_encode(parts: Vec<String>) -> PyResult<String> {
    if parts.is_empty() {
        return Err(PyValueError::new_err("tuple_encode needs at least one string"));
    }
    let parts = parts.iter().map(|p| parse(p)).collect::<PyResult<Vec<_>>>()?;
    Ok(bits::tuple_encode(&parts).to_string())
}

/// Members of the maximal length-uniform δ-simple set.
#[pyfunction]
fn simple_set(delta: u32) -> Vec<String> {
    bits::build_simple_set(delta)
        .members()
        .iter()
        .map(ToString::to_string)
        .collect()
}

/// Runs a program on the reference machine; `None` when undefined.
#[pyfunction]
#[pyo3(signature = (program, data, budget = vm::DEFAULT_STEP_BUDGET))]
fn run(program: &str, data: &str, budget: u64) -> PyResult<Option<String>> {
    Ok(vm::run_bits(&parse(program)?, &parse(data)?, budget)
        .output()
        .map(ToString::to_string))
}

#[pyfunction]
fn program_count(max_len_bits: usize) -> u64 {
    vm::program_count(max_len_bits)
}

#[pyfunction]
fn assign_codewords(lengths: Vec<usize>) -> PyResult<Vec<String>> {
    kraft::assign_codewords(&lengths)
        .map(|codes| codes.iter().map(ToString::to_string).collect())
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

/// An in-memory lab: halting index, K_U table, κ and the computer W.
#[pyclass(name = "Lab")]
struct PyLab {
    lab: Lab,
}

#[pymethods]
impl PyLab {
    #[new]
    #[pyo3(signature = (delta = 8, max_len = None, steps = vm::DEFAULT_STEP_BUDGET, allow_partial = false))]
    fn new(delta: u32, max_len: Option<usize>, steps: u64, allow_partial: bool) -> PyResult<Self> {
        let base = LabConfig::with_delta(delta);
        let config = LabConfig {
            max_len: max_len.unwrap_or(base.max_len),
            steps,
            allow_partial,
            ..base
        };
        let lab = Lab::build(&config).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyLab { lab })
    }

    #[getter]
    fn kappa(&self) -> u32 {
        self.lab.kappa.kappa
    }

    #[getter]
    fn max_len(&self) -> usize {
        self.lab.config.max_len
    }

    #[getter]
    fn records(&self) -> usize {
        self.lab.index.len()
    }

    fn k(&self, x: &str, d: &str) -> PyResult<Option<u32>> {
        Ok(self.lab.ktable.k(&parse(x)?, &parse(d)?))
    }

    fn k_joint(&self, x: &str, y: &str, d: &str) -> PyResult<Option<u32>> {
        Ok(self.lab.ktable.k_joint(&parse(x)?, &parse(y)?, &parse(d)?))
    }

    fn k_w(&self, alpha: &str, s: &str, d: &str) -> PyResult<Option<u32>> {
        Ok(theorem::k_w(&self.lab.w, &parse(alpha)?, &parse(s)?, &parse(d)?))
    }

    /// W(program, data); `None` when undefined.
    fn eval_w(&self, program: &str, data: &str) -> PyResult<Option<String>> {
        Ok(self
            .lab
            .w
            .eval(&parse(program)?, &parse(data)?, self.lab.config.steps)
            .output()
            .map(ToString::to_string))
    }

    /// `(all_exact, [(alpha, gamma, d, lhs, rhs, residual), ...])`
    #[allow(clippy::type_complexity)]
    fn verify(&self) -> PyResult<(bool, Vec<(String, String, String, i64, i64, i64)>)> {
        let report = self
            .lab
            .verify()
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        let rows = report
            .rows
            .iter()
            .map(|r| {
                (
                    r.alpha.to_string(),
                    r.gamma.to_string(),
                    r.d.to_string(),
                    r.lhs,
                    r.rhs,
                    r.residual,
                )
            })
            .collect();
        Ok((report.all_exact, rows))
    }

    /// Histogram of the chain-rule defect Δ over all triples of S_δ.
    fn defect_survey(&self) -> Vec<(i64, u64)> {
        self.lab.survey().histogram.into_iter().collect()
    }
}

#[pymodule]
#[pyo3(name = "simplek")]
fn simplek_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(index_of, m)?)?;
    m.add_function(wrap_pyfunction!(string_of, m)?)?;
    m.add_function(wrap_pyfunction!(pair, m)?)?;
    m.add_function(wrap_pyfunction!(unpair, m)?)?;
    m.add_function(wrap_pyfunction!(tuple_encode, m)?)?;
    m.add_function(wrap_pyfunction!(simple_set, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(program_count, m)?)?;
    m.add_function(wrap_pyfunction!(assign_codewords, m)?)?;
    m.add_class::<PyLab>()?;
    Ok(())
}
