//! Python module `sit_rd`: model parameters, release profiles, simulation,
//! front tracking and the construction checks of `sit-core`.

use std::collections::HashMap;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use sit_core::construct::{
    verify_profile_ordering, verify_scalar, verify_system, Inequality, ScalarSub, ScalarSuper, SystemSub, SystemSuper,
    WaveSystem,
};
use sit_core::experiments::{run, ExperimentConfig};
use sit_core::solver::{simulate as run_system, Grid, SchemeConfig, StateField};
use sit_core::wave::{self, FrontTrajectory};

fn to_py(e: sit_core::Error) -> PyErr {
    match e.exit_code() {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ModelParams", get_all, set_all, skip_from_py_object)]
#[derive(Clone)]
struct PyModelParams {
    beta: f64,
    k: f64,
    nu_e: f64,
    mu_e: f64,
    mu_f: f64,
    mu_m: f64,
    mu_s: f64,
    gamma: f64,
    r: f64,
    d: f64,
}

impl From<&PyModelParams> for sit_core::ModelParams {
    fn from(p: &PyModelParams) -> Self {
        sit_core::ModelParams {
            beta: p.beta,
            k: p.k,
            nu_e: p.nu_e,
            mu_e: p.mu_e,
            mu_f: p.mu_f,
            mu_m: p.mu_m,
            mu_s: p.mu_s,
            gamma: p.gamma,
            r: p.r,
            d: p.d,
        }
    }
}

#[pymethods]
impl PyModelParams {
    /// Defaults are the reference parameter set; any field can be overridden by
    /// keyword, case-insensitively (`D=1.0` or `d=1.0`).
    #[new]
    #[pyo3(signature = (**kwargs))]
    fn new(kwargs: Option<HashMap<String, f64>>) -> PyResult<Self> {
        let p = sit_core::ModelParams::default();
        let mut s = PyModelParams {
            beta: p.beta,
            k: p.k,
            nu_e: p.nu_e,
            mu_e: p.mu_e,
            mu_f: p.mu_f,
            mu_m: p.mu_m,
            mu_s: p.mu_s,
            gamma: p.gamma,
            r: p.r,
            d: p.d,
        };
        for (key, v) in kwargs.unwrap_or_default() {
            let slot = match key.to_ascii_lowercase().as_str() {
                "beta" => &mut s.beta,
                "k" => &mut s.k,
                "nu_e" => &mut s.nu_e,
                "mu_e" => &mut s.mu_e,
                "mu_f" => &mut s.mu_f,
                "mu_m" => &mut s.mu_m,
                "mu_s" => &mut s.mu_s,
                "gamma" => &mut s.gamma,
                "r" => &mut s.r,
                "d" => &mut s.d,
                _ => return Err(PyValueError::new_err(format!("unknown parameter {key}"))),
            };
            *slot = v;
        }
        sit_core::ModelParams::from(&s).validate().map_err(to_py)?;
        Ok(s)
    }

    fn offspring_number(&self) -> f64 {
        sit_core::ModelParams::from(self).offspring_number()
    }

    /// `(E*, F*, M*)`; raises ValueError when the offspring number is at most 1.
    fn equilibrium(&self) -> PyResult<(f64, f64, f64)> {
        let eq = sit_core::ModelParams::from(self).equilibrium().map_err(to_py)?;
        Ok((eq.e_star, eq.f_star, eq.m_star))
    }

    fn reaction(&self, e: f64, f: f64, m: f64, ms: f64) -> (f64, f64, f64) {
        let [a, b, c] = sit_core::ModelParams::from(self).reaction(e, f, m, ms);
        (a, b, c)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", sit_core::ModelParams::from(self))
    }
}

#[pyclass(name = "ReleaseProfile", skip_from_py_object)]
#[derive(Clone)]
struct PyReleaseProfile(sit_core::ReleaseProfile);

#[pymethods]
impl PyReleaseProfile {
    /// `A e^{-eta (x - c t)}` ahead of the moving edge `x = c t`, zero behind.
    #[new]
    fn new(a: f64, eta: f64, c: f64) -> PyResult<Self> {
        sit_core::ReleaseProfile::new(a, eta, c).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn off() -> Self {
        Self(sit_core::ReleaseProfile::off())
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn eta(&self) -> f64 {
        self.0.eta
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    fn lambda_at(&self, t: f64, x: f64) -> f64 {
        self.0.lambda_at(t, x)
    }

    fn release_mass(&self) -> f64 {
        self.0.release_mass()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.0)
    }
}

#[pyfunction]
fn gamma1(mu: f64, params: PyRef<'_, PyModelParams>) -> f64 {
    wave::gamma1(mu, &(&*params).into())
}

/// Minimal invasion speed: dict with `c_bar`, `mu_bar`, `gamma1_at_mu_bar`, `condition_ok`.
#[pyfunction]
fn minimal_speed(py: Python<'_>, params: PyRef<'_, PyModelParams>) -> PyResult<Py<PyAny>> {
    let s = wave::minimal_speed(&(&*params).into()).map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("c_bar", s.c_bar)?;
    d.set_item("mu_bar", s.mu_bar)?;
    d.set_item("gamma1_at_mu_bar", s.gamma1_at_mu_bar)?;
    d.set_item("condition_ok", s.condition_ok)?;
    Ok(d.into_any().unbind())
}

#[pyfunction]
#[pyo3(signature = (beta=10.0, delta=2.0, mu=1.0, k=200.0))]
fn kpp_speed(beta: f64, delta: f64, mu: f64, k: f64) -> PyResult<f64> {
    wave::kpp_speed(&sit_core::ScalarParams { beta, delta, mu, k }).map_err(to_py)
}

/// Result of [`simulate`]: snapshot times, nodes and per-snapshot densities.
#[pyclass(name = "Trajectory", get_all)]
struct PyTrajectory {
    t: Vec<f64>,
    x: Vec<f64>,
    e: Vec<Vec<f64>>,
    f: Vec<Vec<f64>>,
    m: Vec<Vec<f64>>,
    ms: Vec<Vec<f64>>,
    dt: f64,
    max_clip_ratio: f64,
    max_e_over_k: f64,
}

/// Run the system from the equilibrium restricted to `x < step_at`.
#[pyfunction]
#[pyo3(signature = (params, release, x_min=-100.0, x_max=300.0, dx=0.25, t_end=400.0, snapshot_every=5.0, step_at=0.0))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    py: Python<'_>,
    params: PyRef<'_, PyModelParams>,
    release: PyRef<'_, PyReleaseProfile>,
    x_min: f64,
    x_max: f64,
    dx: f64,
    t_end: f64,
    snapshot_every: f64,
    step_at: f64,
) -> PyResult<PyTrajectory> {
    let p: sit_core::ModelParams = (&*params).into();
    let pr = release.0;
    let traj = py
        .detach(|| -> sit_core::Result<_> {
            let grid = Grid::with_spacing(x_min, x_max, dx)?;
            let eq = p.equilibrium()?;
            let cfg = SchemeConfig { t_end, snapshot_every, ..Default::default() };
            run_system(&StateField::step_profile(&grid, &eq, step_at), &grid, &p, &pr, &cfg)
        })
        .map_err(to_py)?;
    let col = |f: fn(&StateField) -> &Vec<f64>| traj.snapshots.iter().map(|s| f(s).clone()).collect::<Vec<_>>();
    Ok(PyTrajectory {
        t: traj.times(),
        x: traj.grid.nodes(),
        e: col(|s| &s.e),
        f: col(|s| &s.f),
        m: col(|s| &s.m),
        ms: col(|s| &s.ms),
        dt: traj.dt,
        max_clip_ratio: traj.max_clip_ratio,
        max_e_over_k: traj.max_e_over_k,
    })
}

/// Largest `x` with `f(x) >= threshold` on each snapshot (`-inf` if none).
#[pyfunction]
fn track_front(traj: PyRef<'_, PyTrajectory>, threshold: f64) -> PyResult<Vec<f64>> {
    let n = traj.x.len();
    if n < 2 {
        return Err(PyValueError::new_err("trajectory has too few nodes"));
    }
    let grid = Grid::new(traj.x[0], traj.x[n - 1], n).map_err(to_py)?;
    Ok(traj.f.iter().map(|f| wave::front_position(&grid, f, threshold)).collect())
}

/// Outcome name (`invasion`, `blocked`, `pushed_back`, `reinvasion`, `extinct`).
#[pyfunction]
fn classify(times: Vec<f64>, positions: Vec<f64>, release: PyRef<'_, PyReleaseProfile>, horizon: f64) -> PyResult<String> {
    let ft = FrontTrajectory { times, positions, threshold: f64::NAN };
    let o = wave::classify_outcome(&ft, &release.0, horizon).map_err(to_py)?;
    Ok(o.kind.as_str().to_string())
}

/// Build the four super- and sub-solutions at speed `c` and check them on
/// `samples` points; returns `{name: (pass, worst_margin)}` plus the
/// sub-below-super ordering.
#[pyfunction]
#[pyo3(signature = (c, samples=10_000, tol=1e-8))]
fn verify_constructions(py: Python<'_>, c: f64, samples: usize, tol: f64) -> PyResult<HashMap<String, (bool, f64)>> {
    py.detach(|| -> sit_core::Result<_> {
        let p = sit_core::ModelParams::default();
        let s = sit_core::ScalarParams::default();
        let sup = SystemSuper::new(c, &p, None)?;
        let sub = SystemSub::new(c, &p)?;
        let reps = [
            ("scalar_super", verify_scalar(&ScalarSuper::new(c, 0.1, &s)?, Inequality::Super, samples, tol)),
            ("scalar_sub", verify_scalar(&ScalarSub::new(c, &s)?, Inequality::Sub, samples, tol)),
            ("system_super", verify_system(&sup, Inequality::Super, samples, tol)),
            ("system_sub", verify_system(&sub, Inequality::Sub, samples, tol)),
        ];
        let mut out: HashMap<String, (bool, f64)> =
            reps.into_iter().map(|(k, r)| (k.to_string(), (r.pass, r.worst_margin()))).collect();
        let ord = verify_profile_ordering(&sub, &sup, (sub.window().0, sup.window().1), samples, 0.0);
        out.insert("ordering".into(), (ord.pass, ord.worst));
        Ok(out)
    })
    .map_err(to_py)
}

/// Run an experiment from a TOML configuration; returns `(exit_code, report)`.
#[pyfunction]
fn run_experiment(py: Python<'_>, config: &str, out: &str) -> PyResult<(i32, String)> {
    let cfg = ExperimentConfig::from_toml_str(config).map_err(to_py)?;
    let rep = py.detach(|| run(&cfg, std::path::Path::new(out))).map_err(to_py)?;
    Ok((rep.exit_code(), rep.to_string()))
}

#[pymodule]
fn sit_rd(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyReleaseProfile>()?;
    m.add_class::<PyTrajectory>()?;
    m.add_function(wrap_pyfunction!(gamma1, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_speed, m)?)?;
    m.add_function(wrap_pyfunction!(kpp_speed, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(track_front, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify_constructions, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
