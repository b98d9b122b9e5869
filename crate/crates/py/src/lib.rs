//! Python module `ymh`.
//!
//! Build the shared library with `cargo build --release -p ymh-py` and load
//! `libymh_py.so` under the name `ymh.so` (see `python/smoke_test.py`).

use pyo3::prelude::*;

#[pymodule]
pub mod ymh {
    use std::path::PathBuf;

    use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
    use pyo3::prelude::*;
    use pyo3::types::PyDict;
    use ymh_core::energy::{el_residuals, total_energy, EnergyReport};
    use ymh_core::flow::{self, FlowParams, FlowTrace};
    use ymh_core::grid::Region;
    use ymh_core::io::{load_snapshot, save_snapshot};
    use ymh_core::measures::{self, charge_degree_with_level, charge_volume};
    use ymh_core::radial::{self, bps_profile_scaled, hedgehog_to_grid, initial_guess, radial_energy};
    use ymh_core::{Configuration, EnergyParams, Error, Grid};

    fn err(e: Error) -> PyErr {
        match e {
            Error::Io { .. } | Error::BadMagic | Error::TruncatedFile => PyOSError::new_err(e.to_string()),
            Error::HiggsVanishesOnSphere { .. } => PyRuntimeError::new_err(e.to_string()),
            _ => PyValueError::new_err(e.to_string()),
        }
    }

    fn params(epsilon: f64, lambda: f64) -> PyResult<EnergyParams> {
        EnergyParams::new(epsilon, lambda).map_err(err)
    }

    fn report<'py>(py: Python<'py>, r: &EnergyReport) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("curvature", r.curvature)?;
        d.set_item("gradient", r.gradient)?;
        d.set_item("potential", r.potential)?;
        d.set_item("total", r.total)?;
        d.set_item("normalized", r.normalized)?;
        Ok(d)
    }

    fn trace<'py>(py: Python<'py>, t: &FlowTrace) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        d.set_item("status", format!("{:?}", t.status))?;
        d.set_item("iterations", t.iterations())?;
        d.set_item("energy", t.energy.clone())?;
        d.set_item("residual", t.residual.clone())?;
        Ok(d)
    }

    /// A configuration on a grid together with its ε and λ.
    #[pyclass(frozen)]
    pub struct Field {
        cfg: Configuration,
        p: EnergyParams,
    }

    #[pymethods]
    impl Field {
        /// Read a YMH1 snapshot.
        #[staticmethod]
        fn load(path: PathBuf) -> PyResult<Self> {
            let (cfg, p) = load_snapshot(&path).map_err(err)?;
            Ok(Field { cfg, p })
        }

        /// Member `y` of the sweepout family on the cube `[−1, 1]³` with `n` sites per side.
        #[staticmethod]
        #[pyo3(signature = (y, epsilon, lambda_ = 1.0, n = 33))]
        fn sweepout(y: [f64; 3], epsilon: f64, lambda_: f64, n: usize) -> PyResult<Self> {
            let p = params(epsilon, lambda_)?;
            let g = Grid::dirichlet_cube(n, 1.0).map_err(err)?;
            Ok(Field { cfg: flow::build_sweepout(y, p, &g).map_err(err)?, p })
        }

        /// Charge-one monopole lifted to `[−L, L]³`: the closed form when
        /// `λ = 0`, otherwise a relaxed radial profile.
        #[staticmethod]
        #[pyo3(signature = (epsilon, lambda_ = 1.0, n = 65, half_width = None))]
        fn monopole(py: Python<'_>, epsilon: f64, lambda_: f64, n: usize, half_width: Option<f64>) -> PyResult<Self> {
            let p = params(epsilon, lambda_)?;
            let hw = half_width.unwrap_or(8.0 * epsilon);
            let cfg = py
                .detach(|| -> ymh_core::Result<Configuration> {
                    let r_max = (20.0 * epsilon).max(2.0 * hw);
                    let prof = if lambda_ == 0.0 {
                        bps_profile_scaled(r_max, 4000, epsilon)?
                    } else {
                        let fp = FlowParams { step0: 1.0, tol_residual: 1e-6, max_iters: 200, backtrack: 0.5 };
                        radial::radial_relax(&initial_guess(r_max, 4000, p)?, p, &fp)?.0
                    };
                    hedgehog_to_grid(&prof, &Grid::dirichlet_cube(n, hw)?)
                })
                .map_err(err)?;
            Ok(Field { cfg, p })
        }

        /// Random perturbation of the trivial pair on the periodic unit box
        /// with normalised energy `amplitude`.
        #[staticmethod]
        #[pyo3(signature = (n, epsilon, lambda_ = 1.0, amplitude = 0.1, seed = 0))]
        fn perturbed_trivial(n: usize, epsilon: f64, lambda_: f64, amplitude: f64, seed: u64) -> PyResult<Self> {
            let p = params(epsilon, lambda_)?;
            let g = Grid::periodic([n; 3], 1.0 / n as f64).map_err(err)?;
            Ok(Field { cfg: flow::perturbed_trivial(p, &g, amplitude, seed).map_err(err)?, p })
        }

        fn save(&self, path: PathBuf) -> PyResult<()> {
            save_snapshot(&self.cfg, self.p, &path).map_err(err)
        }

        #[getter]
        fn dims(&self) -> [usize; 3] {
            self.cfg.grid.dims()
        }

        #[getter]
        fn spacing(&self) -> f64 {
            self.cfg.grid.spacing()
        }

        #[getter]
        fn epsilon(&self) -> f64 {
            self.p.epsilon
        }

        #[getter]
        fn lambda_(&self) -> f64 {
            self.p.lambda
        }

        /// Energy terms as a dict.
        fn energy<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
            report(py, &total_energy(&self.cfg, self.p))
        }

        /// Discrete L² norm of the Euler–Lagrange residual.
        fn residual(&self) -> f64 {
            el_residuals(&self.cfg, self.p).norm
        }

        /// `|Φ|` at every site, row-major.
        fn higgs_norm(&self) -> Vec<f64> {
            self.cfg.phi.iter().map(|v| v.norm()).collect()
        }

        /// Gradient descent; returns the relaxed field and its trace.
        #[pyo3(signature = (step0 = 0.1, tol_residual = 1e-6, max_iters = 10_000, backtrack = 0.5))]
        fn relax<'py>(
            &self,
            py: Python<'py>,
            step0: f64,
            tol_residual: f64,
            max_iters: usize,
            backtrack: f64,
        ) -> PyResult<(Field, Bound<'py, PyDict>)> {
            let fp = FlowParams { step0, tol_residual, max_iters, backtrack };
            let (cfg, t) = py.detach(|| flow::relax(&self.cfg, self.p, &fp)).map_err(err)?;
            Ok((Field { cfg, p: self.p }, trace(py, &t)?))
        }

        #[pyo3(signature = (center, radius, level = 4))]
        fn charge_degree(&self, center: [f64; 3], radius: f64, level: u32) -> PyResult<f64> {
            charge_degree_with_level(&self.cfg, center, radius, level).map_err(err)
        }

        /// `(1/8π)∫κ` over the whole grid.
        fn charge_volume(&self) -> PyResult<f64> {
            charge_volume(&self.cfg, self.p, Region::All).map_err(err)
        }

        /// `(μ(B), κ(B))` for the ball `B_radius(center)`.
        fn ball_mass(&self, center: [f64; 3], radius: f64) -> PyResult<(f64, f64)> {
            measures::measures(&self.cfg, self.p).ball_mass(center, radius).map_err(err)
        }
    }

    /// Normalised energy of the closed-form BPS monopole.
    #[pyfunction]
    #[pyo3(signature = (r_max = 20.0, n = 4000, epsilon = 1.0))]
    fn bps_energy(r_max: f64, n: usize, epsilon: f64) -> PyResult<f64> {
        let prof = bps_profile_scaled(r_max, n, epsilon).map_err(err)?;
        Ok(radial_energy(&prof, params(epsilon, 0.0)?).normalized)
    }

    /// Relax the radial profile; returns the trace, the profile and the energy.
    #[pyfunction]
    #[pyo3(signature = (epsilon = 1.0, lambda_ = 1.0, r_max = 20.0, n = 4000, tol_residual = 1e-8))]
    fn radial_relax<'py>(
        py: Python<'py>,
        epsilon: f64,
        lambda_: f64,
        r_max: f64,
        n: usize,
        tol_residual: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = params(epsilon, lambda_)?;
        let fp = FlowParams { step0: 1.0, tol_residual, max_iters: 200, backtrack: 0.5 };
        let (prof, t) = radial::radial_relax(&initial_guess(r_max, n, p).map_err(err)?, p, &fp).map_err(err)?;
        let d = trace(py, &t)?;
        d.set_item("r", prof.r.clone())?;
        d.set_item("H", prof.h.clone())?;
        d.set_item("K", prof.k.clone())?;
        d.set_item("report", report(py, &radial_energy(&prof, p))?)?;
        Ok(d)
    }

    /// The invariant suite as `(name, passed, value, threshold)` tuples.
    #[pyfunction]
    #[pyo3(signature = (seed = 0))]
    fn verify(py: Python<'_>, seed: u64) -> PyResult<Vec<(String, bool, f64, f64)>> {
        let checks = py.detach(|| ymh_core::verify::run_suite(seed)).map_err(err)?;
        Ok(checks.into_iter().map(|c| (c.name.to_string(), c.passed, c.value, c.threshold)).collect())
    }
}
