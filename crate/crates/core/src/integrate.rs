//! Fixed-step time integration of the joint dynamics with energy
//! bookkeeping.
//!
//! Classical explicit 4-stage Runge-Kutta on the first-order system.
//! The penalty ramp is evaluated inside every stage like any other
//! term; there is no event detection, so runs are reproducible for a
//! given configuration and step. When penalties engage, the step must
//! resolve the stiff wall: keep `dt` well below `sqrt(I * epsilon)`.

use std::fmt;

use crate::dynamics::{internal_force, ode_rhs, potential, DynParams, InternalForce, State};
use crate::geometry::MuscleModel;

/// Default integration step, seconds.
pub const DEFAULT_DT: f64 = 1e-4;

/// One recorded integration step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// s
    pub t: f64,
    /// rad
    pub theta: f64,
    /// rad/s
    pub omega: f64,
    /// Total energy `0.5 I omega^2 + P(theta)`, joules.
    pub energy: f64,
    /// True when the angle sat strictly outside the stop interval.
    pub penalty_active: bool,
}

/// Time-sampled run: every step is recorded, including the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub dt: f64,
}

impl Trajectory {
    pub fn final_sample(&self) -> &Sample {
        self.samples.last().expect("trajectory has at least one sample")
    }
}

/// Integration blew up to a non-finite state; the last finite samples
/// are retained.
#[derive(Debug, Clone)]
pub struct Diverged {
    pub partial: Trajectory,
    /// Index of the step whose result was non-finite.
    pub at_step: usize,
}

impl fmt::Display for Diverged {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "integration diverged at step {} (t = {:.6} s); {} finite samples kept",
            self.at_step,
            self.at_step as f64 * self.partial.dt,
            self.partial.samples.len()
        )
    }
}

impl std::error::Error for Diverged {}

/// One classical RK4 step of an autonomous two-dimensional system.
pub fn rk4_step<F: Fn(&State) -> State>(rhs: F, state: &State, dt: f64) -> State {
    let k1 = rhs(state);
    let k2 = rhs(&State {
        theta: state.theta + 0.5 * dt * k1.theta,
        omega: state.omega + 0.5 * dt * k1.omega,
    });
    let k3 = rhs(&State {
        theta: state.theta + 0.5 * dt * k2.theta,
        omega: state.omega + 0.5 * dt * k2.omega,
    });
    let k4 = rhs(&State {
        theta: state.theta + dt * k3.theta,
        omega: state.omega + dt * k3.omega,
    });
    State {
        theta: state.theta + dt / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta),
        omega: state.omega + dt / 6.0 * (k1.omega + 2.0 * k2.omega + 2.0 * k3.omega + k4.omega),
    }
}

/// Advances the joint dynamics by one step under the given balanced
/// tension pair. Returns the index-0 divergence error when the result
/// is non-finite.
pub fn step(
    state: &State,
    model: &MuscleModel,
    dyn_params: &DynParams,
    force: &InternalForce,
    dt: f64,
) -> Result<State, Diverged> {
    assert!(dt > 0.0, "dt must be positive");
    let next = rk4_step(|s| ode_rhs(s, model, dyn_params, force), state, dt);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Diverged {
            partial: Trajectory {
                samples: vec![make_sample(0.0, state, model, dyn_params, force)],
                dt,
            },
            at_step: 1,
        })
    }
}

fn make_sample(
    t: f64,
    state: &State,
    model: &MuscleModel,
    dyn_params: &DynParams,
    force: &InternalForce,
) -> Sample {
    let energy = 0.5 * dyn_params.inertia * state.omega * state.omega
        + potential(model, state.theta, dyn_params.theta_d, force);
    Sample {
        t,
        theta: state.theta,
        omega: state.omega,
        energy,
        penalty_active: dyn_params
            .penalty
            .as_ref()
            .is_some_and(|p| p.active(state.theta)),
    }
}

/// Number of steps for a run of length `t_final`: `floor(t_final / dt)`,
/// with a one-ulp-scale bump so exact multiples are not lost to the
/// division rounding down.
fn step_count(t_final: f64, dt: f64) -> usize {
    ((t_final / dt) * (1.0 + 4.0 * f64::EPSILON)).floor() as usize
}

/// Integrates from `init` for `floor(t_final/dt)` steps, recording every
/// step. Sample count is always `floor(t_final/dt) + 1`; `t_final = 0`
/// yields the initial condition alone.
pub fn simulate(
    init: State,
    model: &MuscleModel,
    dyn_params: &DynParams,
    dt: f64,
    t_final: f64,
) -> Result<Trajectory, Diverged> {
    assert!(dt > 0.0, "dt must be positive");
    assert!(t_final >= 0.0, "t_final must be non-negative");
    let force = internal_force(model, dyn_params.theta_d, dyn_params.gain);
    let n_steps = step_count(t_final, dt);
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(make_sample(0.0, &init, model, dyn_params, &force));
    let mut state = init;
    for n in 1..=n_steps {
        state = rk4_step(|s| ode_rhs(s, model, dyn_params, &force), &state, dt);
        if !state.is_finite() {
            return Err(Diverged {
                partial: Trajectory { samples, dt },
                at_step: n,
            });
        }
        samples.push(make_sample(n as f64 * dt, &state, model, dyn_params, &force));
    }
    Ok(Trajectory { samples, dt })
}
