//! Python bindings: action evaluation, lower bounds, certificate sweeps,
//! minimization and orbit extension.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fourbody::action::{polyline_action, PolylinePath};
use fourbody::bounds;
use fourbody::extension::{classify_period, extend, Extender, PeriodClass, ENDPOINT_TOL};
use fourbody::geometry::{Configuration, RotationAngle};
use fourbody::minimizer::{minimize, MinimizeOptions, PathRecord};
use fourbody::testpaths::{all_tables, build_test_path, certificate_sweep, Frac, Variant};

fn val_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_variant(s: &str) -> PyResult<Variant> {
    match s {
        "e1" | "E1" => Ok(Variant::E1),
        "e2" | "E2" => Ok(Variant::E2),
        _ => Err(PyValueError::new_err(format!("unknown variant `{s}`"))),
    }
}

fn variant_str(v: Variant) -> &'static str {
    match v {
        Variant::E1 => "e1",
        Variant::E2 => "e2",
    }
}

fn to_path(times: Vec<f64>, nodes: Vec<[[f64; 2]; 4]>) -> PyResult<PolylinePath> {
    let configs = nodes.into_iter().map(|bodies| Configuration { bodies }).collect();
    PolylinePath::new(times, configs).map_err(val_err)
}

/// Lower bound g1 for the E1 boundary class, theta in (0, pi/10].
#[pyfunction]
fn g1(theta: f64) -> PyResult<f64> {
    bounds::g1(theta).map_err(val_err)
}

/// Lower bound g2 for the E2 boundary class, theta in (0, pi/10].
#[pyfunction]
fn g2(theta: f64) -> PyResult<f64> {
    bounds::g2(theta).map_err(val_err)
}

/// Action lower bound for paths through total collision.
#[pyfunction]
fn total_collision_bound() -> f64 {
    bounds::total_collision_bound()
}

/// Closed-form action of a piecewise-linear path. Nodes are per-time lists
/// of four [x, y] rows summing to the origin. Returns a dict with the
/// total/kinetic/potential split and the six pairwise Kepler actions.
#[pyfunction]
fn action(py: Python<'_>, times: Vec<f64>, nodes: Vec<[[f64; 2]; 4]>) -> PyResult<Py<PyDict>> {
    let path = to_path(times, nodes)?;
    let b = polyline_action(&path).map_err(val_err)?;
    let d = PyDict::new_bound(py);
    d.set_item("total", b.total)?;
    d.set_item("kinetic", b.kinetic)?;
    d.set_item("potential", b.potential)?;
    d.set_item("pairwise", b.pairwise.to_vec())?;
    Ok(d.into())
}

/// Certificate test path for theta = p/q * pi: (times, nodes).
#[pyfunction]
fn test_path(variant: &str, p: i64, q: i64) -> PyResult<(Vec<f64>, Vec<[[f64; 2]; 4]>)> {
    let variant = parse_variant(variant)?;
    let theta = RotationAngle::rational(p, q).map_err(val_err)?;
    let path = build_test_path(variant, theta).map_err(val_err)?;
    Ok((
        path.times().to_vec(),
        path.nodes().iter().map(|c| c.bodies).collect(),
    ))
}

/// Sweep the certificate A_test(theta) < g(theta) over the certified range.
#[pyfunction]
#[pyo3(signature = (variant, step_p=1, step_q=10000))]
fn certify(py: Python<'_>, variant: &str, step_p: i64, step_q: i64) -> PyResult<Py<PyDict>> {
    let variant = parse_variant(variant)?;
    let rep = certificate_sweep(variant, Frac { p: step_p, q: step_q }, None);
    let d = PyDict::new_bound(py);
    d.set_item("variant", variant_str(variant))?;
    d.set_item("overall_pass", rep.overall_pass)?;
    d.set_item("angles", rep.records.len())?;
    d.set_item("min_margin", rep.min_margin)?;
    d.set_item("min_margin_theta", (rep.min_margin_theta.p, rep.min_margin_theta.q))?;
    Ok(d.into())
}

/// Classification of the extended orbit: ("periodic", period) or
/// ("quasi-periodic", None).
#[pyfunction]
#[pyo3(signature = (variant, p, q, irrational=false))]
fn period(variant: &str, p: i64, q: i64, irrational: bool) -> PyResult<(String, Option<f64>)> {
    let variant = parse_variant(variant)?;
    let theta = if irrational {
        RotationAngle::irrational(p as f64 * std::f64::consts::PI / q as f64)
    } else {
        RotationAngle::rational(p, q).map_err(val_err)?
    };
    Ok(match classify_period(variant, theta) {
        PeriodClass::Periodic { period } => ("periodic".into(), Some(period)),
        PeriodClass::QuasiPeriodic => ("quasi-periodic".into(), None),
    })
}

/// Embedded node tables: id, variant, interval and repair audit.
#[pyfunction]
fn tables(py: Python<'_>) -> PyResult<Vec<Py<PyDict>>> {
    let mut out = Vec::new();
    for t in all_tables() {
        let d = PyDict::new_bound(py);
        d.set_item("id", &t.id)?;
        d.set_item("variant", variant_str(t.variant))?;
        d.set_item("interval", ((t.interval.0.p, t.interval.0.q), (t.interval.1.p, t.interval.1.q)))?;
        d.set_item("repairs", t.repairs.len())?;
        out.push(d.into());
    }
    Ok(out)
}

/// A minimized discrete path.
#[pyclass(name = "Path")]
struct PyPath {
    record: PathRecord,
}

#[pymethods]
impl PyPath {
    #[getter]
    fn action(&self) -> f64 {
        self.record.action
    }

    #[getter]
    fn variant(&self) -> &'static str {
        variant_str(self.record.variant)
    }

    #[getter]
    fn theta(&self) -> (i64, i64) {
        (self.record.theta.p, self.record.theta.q)
    }

    #[getter]
    fn segments(&self) -> usize {
        self.record.n
    }

    #[getter]
    fn min_pair_distance(&self) -> f64 {
        self.record.min_pair_distance
    }

    #[getter]
    fn residuals(&self) -> (f64, f64) {
        (self.record.residuals.start, self.record.residuals.end)
    }

    #[getter]
    fn nodes(&self) -> Vec<[[f64; 2]; 4]> {
        self.record.nodes.clone()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string_pretty(&self.record).map_err(val_err)
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        Ok(Self {
            record: serde_json::from_str(s).map_err(val_err)?,
        })
    }

    /// Samples the periodic/quasi-periodic extension over [t0, t1].
    #[pyo3(signature = (t0, t1, samples_per_unit=100))]
    fn extend(&self, t0: f64, t1: f64, samples_per_unit: usize) -> PyResult<Vec<(f64, [[f64; 2]; 4])>> {
        let var = self.record.to_variable().map_err(val_err)?;
        let traj = extend(&var.to_polyline(), self.record.variant, var.theta, t0, t1, samples_per_unit)
            .map_err(val_err)?;
        Ok(traj.samples.into_iter().map(|(t, c)| (t, c.bodies)).collect())
    }

    /// Evaluates the extension at a single time.
    fn at(&self, t: f64) -> PyResult<[[f64; 2]; 4]> {
        let var = self.record.to_variable().map_err(val_err)?;
        let ext = Extender::new(var.to_polyline(), self.record.variant, var.theta, ENDPOINT_TOL)
            .map_err(val_err)?;
        Ok(ext.eval(t).bodies)
    }
}

/// Minimizes the action for theta = p/q * pi over N-segment discrete paths.
#[pyfunction(name = "minimize")]
#[pyo3(signature = (variant, p, q, segments=40, restarts=4, seed=0, max_iterations=3000, gradient_tolerance=1e-8))]
#[allow(clippy::too_many_arguments)]
fn py_minimize(
    variant: &str,
    p: i64,
    q: i64,
    segments: usize,
    restarts: usize,
    seed: u64,
    max_iterations: usize,
    gradient_tolerance: f64,
) -> PyResult<PyPath> {
    let variant = parse_variant(variant)?;
    let theta = RotationAngle::rational(p, q).map_err(val_err)?;
    let opts = MinimizeOptions {
        restarts,
        seed,
        max_iterations,
        gradient_tolerance,
    };
    let res = minimize(variant, theta, segments, &opts).map_err(val_err)?;
    Ok(PyPath {
        record: res.to_record().map_err(val_err)?,
    })
}

#[pymodule]
fn fourbody_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(g1, m)?)?;
    m.add_function(wrap_pyfunction!(g2, m)?)?;
    m.add_function(wrap_pyfunction!(total_collision_bound, m)?)?;
    m.add_function(wrap_pyfunction!(action, m)?)?;
    m.add_function(wrap_pyfunction!(test_path, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(period, m)?)?;
    m.add_function(wrap_pyfunction!(tables, m)?)?;
    m.add_function(wrap_pyfunction!(py_minimize, m)?)?;
    m.add_class::<PyPath>()?;
    Ok(())
}
