use pyo3::prelude::*;
use pyo3::types::PyDict;

fn with_module<F: for<'py> FnOnce(Python<'py>, &Bound<'py, PyModule>)>(f: F) {
    Python::initialize();
    Python::attach(|py| {
        let m = PyModule::new(py, "pgx").unwrap();
        pgx::pgx(&m).unwrap();
        f(py, &m);
    });
}

#[test]
fn module_functions() {
    with_module(|_, m| {
        let r: (u32, u32) = m.getattr("residue_params").unwrap().call1((11,)).unwrap().extract().unwrap();
        assert_eq!(r, (2, 2));
        let g: Vec<u64> = m.getattr("gamma").unwrap().call1((vec![2u64, 4],)).unwrap().extract().unwrap();
        assert_eq!(g, vec![2, 4, 8]);
        let names: Vec<String> = m.getattr("catalog_names").unwrap().call1((3, 5)).unwrap().extract().unwrap();
        assert_eq!(names.len(), 2);
    });
}

#[test]
fn analyze_returns_a_dict() {
    with_module(|_, m| {
        let d = m.getattr("analyze").unwrap().call1(("Phi2(21)", 5)).unwrap();
        let d = d.cast::<PyDict>().unwrap();
        let get = |k: &str| d.get_item(k).unwrap().unwrap();
        assert_eq!(get("order_exponent").extract::<u32>().unwrap(), 3);
        assert!(get("multiplier").extract::<Vec<u64>>().unwrap().is_empty());
        assert!(!get("capable").extract::<bool>().unwrap());
    });
}

#[test]
fn errors_map_to_python_exceptions() {
    with_module(|py, m| {
        let e = m.getattr("catalog_names").unwrap().call1((6, 5)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
        let e = m.getattr("be_multiplier").unwrap().call1(("Phi2(21)", 2)).unwrap_err();
        assert!(e.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}
