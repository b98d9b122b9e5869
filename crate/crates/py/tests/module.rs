//! Drive the module through an embedded interpreter.

use pyo3::prelude::*;
use pyo3::types::{IntoPyDict, PyDict};

fn with_module<R>(f: impl FnOnce(&Bound<'_, PyModule>) -> PyResult<R>) -> R {
    Python::initialize();
    Python::attach(|py| {
        let m = pyo3::wrap_pymodule!(ymh_py::ymh)(py);
        f(m.bind(py)).unwrap()
    })
}

#[test]
fn bps_energy_is_eight_pi() {
    let e: f64 = with_module(|m| m.getattr("bps_energy")?.call0()?.extract());
    assert!((e / (8.0 * std::f64::consts::PI) - 1.0).abs() < 1e-3, "{e}");
}

#[test]
fn snapshot_round_trip_through_python() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.ymh");
    let (a, b): (f64, f64) = with_module(|m| {
        let field = m.getattr("Field")?;
        let f = field.call_method1("perturbed_trivial", (8usize, 0.25))?;
        f.call_method1("save", (path.clone(),))?;
        let g = field.call_method1("load", (path.clone(),))?;
        let e = |x: &Bound<'_, PyAny>| -> PyResult<f64> {
            x.call_method0("energy")?.cast_into::<PyDict>()?.get_item("total")?.unwrap().extract()
        };
        Ok((e(&f)?, e(&g)?))
    });
    assert_eq!(a, b);
    assert!(a > 0.0);
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|m| {
        let py = m.py();
        let e = m.getattr("bps_energy")?.call((), Some(&[("epsilon", -1.0)].into_py_dict(py)?)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let e = m.getattr("Field")?.call_method1("load", ("/nonexistent.ymh",)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyOSError>(py));
        Ok(())
    });
}
