//! Python bindings: the model, certification and simulation surface of
//! the core crate exposed as the `muscu_py` extension module.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use muscu_core as core;

fn model_err(e: core::ModelError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// ((muscle, segment), window-or-None) entry of a certification report.
type SegmentWindowEntry = ((u8, u8), Option<(f64, f64)>);

/// Frame and routing lengths; all internal computation is in meters.
#[pyclass(frozen)]
struct SystemParams {
    inner: core::SystemParams,
}

#[pymethods]
impl SystemParams {
    /// Build from millimeter lengths, as bench tables give them.
    #[staticmethod]
    #[allow(clippy::too_many_arguments)]
    fn from_mm(
        l0: f64,
        l1: f64,
        b1: f64,
        b2: f64,
        d1: f64,
        d2: f64,
        ell1: f64,
        ell2: f64,
        r1: f64,
        r2: f64,
        s1: f64,
        s2: f64,
    ) -> PyResult<Self> {
        core::SystemParams::from_millimeters(l0, l1, b1, b2, d1, d2, ell1, ell2, r1, r2, s1, s2)
            .map(|inner| SystemParams { inner })
            .map_err(model_err)
    }

    /// Lengths in meters, in table order
    /// (L0, L1, b1, b2, d1, d2, ell1, ell2, r1, r2, s1, s2).
    fn as_meters(&self) -> [f64; 12] {
        let p = &self.inner;
        [
            p.l0, p.l1, p.b1, p.b2, p.d1, p.d2, p.ell1, p.ell2, p.r1, p.r2, p.s1, p.s2,
        ]
    }
}

/// Validated model with the four canonical cable segments.
#[pyclass(frozen)]
struct MuscleModel {
    inner: core::MuscleModel,
}

#[pymethods]
impl MuscleModel {
    #[new]
    fn new(params: &SystemParams) -> PyResult<Self> {
        core::MuscleModel::new(params.inner)
            .map(|inner| MuscleModel { inner })
            .map_err(model_err)
    }

    /// Segment phase angles (alpha11, alpha12, alpha21, alpha22) in radians.
    fn alphas(&self) -> (f64, f64, f64, f64) {
        let c = self.inner.coeffs();
        (c[0].alpha, c[1].alpha, c[2].alpha, c[3].alpha)
    }

    /// Canonical coefficients (a, b, c, alpha, rho) of segment (muscle, segment).
    fn segment_coeffs(&self, muscle: u8, segment: u8) -> PyResult<(f64, f64, f64, f64, f64)> {
        check_index(muscle, segment)?;
        let c = self.inner.coeff(muscle, segment);
        Ok((c.a, c.b, c.c, c.alpha, c.rho))
    }

    fn segment_length(&self, muscle: u8, segment: u8, theta: f64) -> PyResult<f64> {
        check_index(muscle, segment)?;
        Ok(self.inner.coeff(muscle, segment).length(theta))
    }

    fn segment_length_d1(&self, muscle: u8, segment: u8, theta: f64) -> PyResult<f64> {
        check_index(muscle, segment)?;
        Ok(self.inner.coeff(muscle, segment).length_d1(theta))
    }

    fn segment_length_d2(&self, muscle: u8, segment: u8, theta: f64) -> PyResult<f64> {
        check_index(muscle, segment)?;
        Ok(self.inner.coeff(muscle, segment).length_d2(theta))
    }

    /// Total cable length q_i(theta).
    fn muscle_length(&self, muscle: u8, theta: f64) -> PyResult<f64> {
        check_index(muscle, 1)?;
        Ok(self.inner.muscle_length(muscle, theta))
    }

    /// (dq1/dtheta, dq2/dtheta) at theta.
    fn jacobian(&self, theta: f64) -> (f64, f64) {
        let j = self.inner.muscle_jacobian(theta);
        (j[0], j[1])
    }
}

fn check_index(muscle: u8, segment: u8) -> PyResult<()> {
    if (1..=2).contains(&muscle) && (1..=2).contains(&segment) {
        Ok(())
    } else {
        Err(PyValueError::new_err(format!(
            "segment index out of range: ({muscle},{segment}); both are 1 or 2"
        )))
    }
}

/// Balanced tension pair (v1, v2) at the target, newtons.
#[pyfunction]
fn internal_force(model: &MuscleModel, theta_d: f64, gain: f64) -> (f64, f64) {
    let v = core::internal_force(&model.inner, theta_d, gain);
    (v.v1, v.v2)
}

/// Joint torque at `theta` under the pair balanced at `theta_d`.
#[pyfunction]
fn torque(model: &MuscleModel, theta: f64, theta_d: f64, gain: f64) -> f64 {
    let v = core::internal_force(&model.inner, theta_d, gain);
    core::torque(&model.inner, theta, &v)
}

/// Control potential at `theta` for the pair balanced at `theta_d`.
#[pyfunction]
fn potential(model: &MuscleModel, theta: f64, theta_d: f64, gain: f64) -> f64 {
    let v = core::internal_force(&model.inner, theta_d, gain);
    core::potential(&model.inner, theta, theta_d, &v)
}

/// Curvature of the control potential at the target, J/rad^2.
#[pyfunction]
fn potential_curvature(model: &MuscleModel, theta_d: f64, gain: f64) -> f64 {
    core::potential_curvature(&model.inner, theta_d, gain)
}

/// Full certification output.
#[pyclass(frozen)]
struct StabilityReport {
    inner: core::StabilityReport,
}

#[pymethods]
impl StabilityReport {
    /// "certified", "not_certified" or "unknown".
    #[getter]
    fn verdict(&self) -> &'static str {
        match self.inner.verdict {
            core::Verdict::Certified => "certified",
            core::Verdict::NotCertified(_) => "not_certified",
            core::Verdict::Unknown(_) => "unknown",
        }
    }

    #[getter]
    fn reasons(&self) -> Vec<String> {
        match &self.inner.verdict {
            core::Verdict::Certified => Vec::new(),
            core::Verdict::NotCertified(r) | core::Verdict::Unknown(r) => r.clone(),
        }
    }

    /// Certified open interval (lo, hi), or None when a window is
    /// undetermined.
    #[getter]
    fn certified(&self) -> Option<(f64, f64)> {
        self.inner.certified.map(|c| (c.lo, c.hi))
    }

    #[getter]
    fn theta0(&self) -> f64 {
        self.inner.theta0
    }

    #[getter]
    fn theta0_bound(&self) -> f64 {
        self.inner.theta0_bound
    }

    #[getter]
    fn tension_window(&self) -> (f64, f64) {
        (self.inner.tension_window.lo, self.inner.tension_window.hi)
    }

    /// Per-segment curvature windows as
    /// [((muscle, segment), (lo, hi) | None), ...].
    #[getter]
    fn segment_windows(&self) -> Vec<SegmentWindowEntry> {
        let idx = [(1u8, 1u8), (1, 2), (2, 1), (2, 2)];
        self.inner
            .segment_windows
            .iter()
            .zip(idx)
            .map(|(w, ij)| (ij, w.known().map(|k| (k.lo, k.hi))))
            .collect()
    }

    /// Analytic potential curvature at the target.
    #[getter]
    fn pdd(&self) -> f64 {
        self.inner.pdd_at_target
    }

    /// Balanced tensions (v1, v2) at the target.
    #[getter]
    fn tensions(&self) -> (f64, f64) {
        let v = &self.inner.tensions_at_target;
        (v.v1, v.v2)
    }

    fn __repr__(&self) -> String {
        format!(
            "StabilityReport(verdict='{}', theta_d={}, certified={:?})",
            self.verdict(),
            self.inner.theta_d,
            self.certified()
        )
    }
}

/// Certify the target angle.
#[pyfunction]
#[pyo3(signature = (model, theta_d, gain=1.0, theta0=None))]
fn check_equilibrium(
    model: &MuscleModel,
    theta_d: f64,
    gain: f64,
    theta0: Option<f64>,
) -> PyResult<StabilityReport> {
    let dyn_params = core::DynParams {
        inertia: 1.0,
        viscosity: 1.0,
        gain,
        theta_d,
        penalty: None,
    };
    core::check_equilibrium(&model.inner, &dyn_params, theta0)
        .map(|inner| StabilityReport { inner })
        .map_err(model_err)
}

/// Certified open interval (lo, hi) for the default or pinned margin.
/// Raises when a cable-2 window is undetermined.
#[pyfunction]
#[pyo3(signature = (model, theta0=None))]
fn certified_interval(model: &MuscleModel, theta0: Option<f64>) -> PyResult<(f64, f64)> {
    let theta0 = core::resolve_theta0(&model.inner, theta0).map_err(model_err)?;
    core::certified_interval(&model.inner, theta0)
        .map(|c| (c.lo, c.hi))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Recorded run of the penalized dynamics.
#[pyclass(frozen)]
struct Trajectory {
    inner: core::Trajectory,
}

#[pymethods]
impl Trajectory {
    #[getter]
    fn times(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn thetas(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.theta).collect()
    }

    #[getter]
    fn omegas(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.omega).collect()
    }

    #[getter]
    fn energies(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.energy).collect()
    }

    #[getter]
    fn penalty_active(&self) -> Vec<bool> {
        self.inner.samples.iter().map(|s| s.penalty_active).collect()
    }

    /// (t, theta, omega) of the last sample.
    #[getter]
    fn final_state(&self) -> (f64, f64, f64) {
        let s = self.inner.final_sample();
        (s.t, s.theta, s.omega)
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// Integrate the dynamics with fixed-step RK4. `penalty` is an optional
/// (epsilon, theta_min, theta_max) triple of hard-stop parameters.
#[pyfunction]
#[pyo3(signature = (model, inertia, viscosity, gain, theta_d, theta_init,
                    omega_init=0.0, dt=1e-4, t_final=10.0, penalty=None))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    model: &MuscleModel,
    inertia: f64,
    viscosity: f64,
    gain: f64,
    theta_d: f64,
    theta_init: f64,
    omega_init: f64,
    dt: f64,
    t_final: f64,
    penalty: Option<(f64, f64, f64)>,
) -> PyResult<Trajectory> {
    let dyn_params = core::DynParams {
        inertia,
        viscosity,
        gain,
        theta_d,
        penalty: penalty.map(|(epsilon, theta_min, theta_max)| core::Penalty {
            epsilon,
            theta_min,
            theta_max,
        }),
    };
    dyn_params.validate().map_err(model_err)?;
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PyValueError::new_err("dt must be positive"));
    }
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(PyValueError::new_err("t_final must be non-negative"));
    }
    core::simulate(
        core::State {
            theta: theta_init,
            omega: omega_init,
        },
        &model.inner,
        &dyn_params,
        dt,
        t_final,
    )
    .map(|inner| Trajectory { inner })
    .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Scan the control potential on a uniform grid; returns
/// (argmin, min, strict_local_min_at_target).
#[pyfunction]
#[pyo3(signature = (model, theta_d, gain, lo, hi, n=4096))]
fn scan_potential(
    model: &MuscleModel,
    theta_d: f64,
    gain: f64,
    lo: f64,
    hi: f64,
    n: usize,
) -> PyResult<(f64, f64, bool)> {
    if n < 16 || hi.partial_cmp(&lo) != Some(std::cmp::Ordering::Greater) {
        return Err(PyValueError::new_err("need n >= 16 and hi > lo"));
    }
    let force = core::internal_force(&model.inner, theta_d, gain);
    let scan = core::scan_potential(&model.inner, theta_d, &force, lo, hi, n);
    Ok((scan.argmin, scan.min, scan.strict_local_min_at_target))
}

/// Grid-check every resolved curvature window; raises RuntimeError on
/// any in-window violation. Returns the number of samples verified.
#[pyfunction]
#[pyo3(signature = (model, theta0=None, grid_n=4096))]
fn cross_validate_windows(
    model: &MuscleModel,
    theta0: Option<f64>,
    grid_n: usize,
) -> PyResult<usize> {
    let theta0 = core::resolve_theta0(&model.inner, theta0).map_err(model_err)?;
    core::cross_validate_windows(&model.inner, theta0, grid_n)
        .map(|v| v.checks.iter().map(|c| c.samples).sum())
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

#[pymodule]
fn muscu_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<SystemParams>()?;
    m.add_class::<MuscleModel>()?;
    m.add_class::<StabilityReport>()?;
    m.add_class::<Trajectory>()?;
    m.add_function(wrap_pyfunction!(internal_force, m)?)?;
    m.add_function(wrap_pyfunction!(torque, m)?)?;
    m.add_function(wrap_pyfunction!(potential, m)?)?;
    m.add_function(wrap_pyfunction!(potential_curvature, m)?)?;
    m.add_function(wrap_pyfunction!(check_equilibrium, m)?)?;
    m.add_function(wrap_pyfunction!(certified_interval, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(scan_potential, m)?)?;
    m.add_function(wrap_pyfunction!(cross_validate_windows, m)?)?;
    Ok(())
}
