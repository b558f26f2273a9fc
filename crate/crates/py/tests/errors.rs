use algrowth::Error;
use pyalgrowth::to_py;
use pyo3::exceptions::{PyMemoryError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

#[test]
fn engine_errors_map_to_python_exceptions() {
    Python::attach(|py| {
        let parse = Error::Parse {
            line: 2,
            column: 5,
            message: "expected value".into(),
        };
        assert!(to_py(parse).is_instance_of::<PyValueError>(py));
        assert!(to_py(Error::validation("bad")).is_instance_of::<PyValueError>(py));
        assert!(to_py(Error::Unsupported("odd modulus".into())).is_instance_of::<PyNotImplementedError>(py));
        assert!(to_py(Error::Resource("budget".into())).is_instance_of::<PyMemoryError>(py));
        let e = to_py(Error::Internal("oops".into()));
        assert!(e.is_instance_of::<PyRuntimeError>(py));
        assert!(e.value(py).to_string().contains("oops"));
    });
}
