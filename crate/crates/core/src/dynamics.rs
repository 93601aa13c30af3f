//! Torque, feed-forward tension control, potential energy, and the
//! (optionally penalized) equation of motion.
//!
//! The control input is a constant tension pair chosen orthogonal to the
//! cable-length Jacobian at the target angle, so the net joint torque
//! vanishes there by construction. Everything here is a pure function of
//! the model and the state.

use crate::error::ModelError;
use crate::geometry::MuscleModel;

/// Joint state: angle and angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// rad
    pub theta: f64,
    /// rad/s
    pub omega: f64,
}

impl State {
    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.omega.is_finite()
    }
}

/// Constant tension pair balancing at the target angle, in newtons.
///
/// `v = gain * (dq2/dtheta(theta_d), -dq1/dtheta(theta_d))`, which is
/// orthogonal to the Jacobian at `theta_d` for any gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InternalForce {
    pub v1: f64,
    pub v2: f64,
}

impl InternalForce {
    /// Cable tensions are physical only when both components are
    /// positive; a `false` here means the target angle sits outside the
    /// positive-tension window and the result is not realizable with
    /// pulling cables.
    pub fn both_positive(&self) -> bool {
        self.v1 > 0.0 && self.v2 > 0.0
    }
}

/// One-sided quadratic-well penalty approximating hard angle stops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Penalty {
    /// Penalty scale; the restoring torque is `overshoot / epsilon`.
    pub epsilon: f64,
    /// rad
    pub theta_min: f64,
    /// rad
    pub theta_max: f64,
}

impl Penalty {
    /// Penalty torque term `(theta - theta_max)^+ / eps - (theta_min - theta)^+ / eps`.
    ///
    /// Exactly zero on `[theta_min, theta_max]`.
    pub fn force(&self, theta: f64) -> f64 {
        if theta > self.theta_max {
            (theta - self.theta_max) / self.epsilon
        } else if theta < self.theta_min {
            -(self.theta_min - theta) / self.epsilon
        } else {
            0.0
        }
    }

    /// True strictly outside the stop interval.
    pub fn active(&self, theta: f64) -> bool {
        theta > self.theta_max || theta < self.theta_min
    }
}

/// Inertial, friction and control parameters of one scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynParams {
    /// Moment of inertia, kg m^2.
    pub inertia: f64,
    /// Viscous friction coefficient, N m s/rad.
    pub viscosity: f64,
    /// Tension gain k > 0 scaling the balanced pair.
    pub gain: f64,
    /// Target angle, rad.
    pub theta_d: f64,
    /// Hard-stop approximation; absent reproduces the unconstrained dynamics.
    pub penalty: Option<Penalty>,
}

impl DynParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        for (name, value) in [
            ("inertia", self.inertia),
            ("viscosity", self.viscosity),
            ("gain", self.gain),
        ] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
            if value <= 0.0 {
                return Err(ModelError::NonPositiveParam { name, value });
            }
        }
        if !self.theta_d.is_finite() {
            return Err(ModelError::NonFinite { name: "theta_d" });
        }
        if let Some(pen) = &self.penalty {
            if !pen.epsilon.is_finite() || pen.epsilon <= 0.0 {
                return Err(ModelError::NonPositiveParam {
                    name: "epsilon",
                    value: pen.epsilon,
                });
            }
            if !(pen.theta_min < self.theta_d && self.theta_d < pen.theta_max) {
                return Err(ModelError::PenaltyBounds {
                    theta_min: pen.theta_min,
                    theta_d: self.theta_d,
                    theta_max: pen.theta_max,
                });
            }
        }
        Ok(())
    }
}

/// Balanced tension pair at `theta_d`:
/// `(gain * dq2/dtheta, -gain * dq1/dtheta)` evaluated at the target.
pub fn internal_force(model: &MuscleModel, theta_d: f64, gain: f64) -> InternalForce {
    let j = model.muscle_jacobian(theta_d);
    InternalForce {
        v1: gain * j[1],
        v2: -gain * j[0],
    }
}

/// Joint torque under constant tensions `force`:
/// `tau(theta) = -<dq/dtheta(theta), force>` (virtual work).
pub fn torque(model: &MuscleModel, theta: f64, force: &InternalForce) -> f64 {
    let j = model.muscle_jacobian(theta);
    -(j[0] * force.v1 + j[1] * force.v2)
}

/// Split of a tension pair into a torque-producing part along the
/// Jacobian direction and a torque-free part orthogonal to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TensionSplit {
    /// `-tau J*`, the component doing work on the joint.
    pub driving: [f64; 2],
    /// The remainder, orthogonal to the Jacobian.
    pub internal: [f64; 2],
    /// Set when the Jacobian vanished and the pseudo-inverse was taken
    /// as zero, leaving the whole input classified as internal.
    pub jacobian_degenerate: bool,
}

/// Decomposes `f = -tau(theta) J(theta)* + v(theta)` with
/// `J* = J/|J|^2`, or `J* = 0` when the Jacobian vanishes.
pub fn decompose_tension(model: &MuscleModel, theta: f64, f: [f64; 2]) -> TensionSplit {
    decompose_raw(model.muscle_jacobian(theta), f)
}

fn decompose_raw(j: [f64; 2], f: [f64; 2]) -> TensionSplit {
    let norm2 = j[0] * j[0] + j[1] * j[1];
    if norm2 == 0.0 {
        return TensionSplit {
            driving: [0.0, 0.0],
            internal: f,
            jacobian_degenerate: true,
        };
    }
    let tau = -(j[0] * f[0] + j[1] * f[1]);
    let driving = [-tau * j[0] / norm2, -tau * j[1] / norm2];
    TensionSplit {
        driving,
        internal: [f[0] - driving[0], f[1] - driving[1]],
        jacobian_degenerate: false,
    }
}

/// Elastic potential of the constant tension pair,
/// `P(theta) = <q(theta) - q(theta_d), force>` in joules.
///
/// `P(theta_d) = 0` and `dP/dtheta = -tau`; a strict local minimum at
/// the target makes it a Lyapunov candidate for the closed loop.
pub fn potential(model: &MuscleModel, theta: f64, theta_d: f64, force: &InternalForce) -> f64 {
    let dq1 = model.muscle_length(1, theta) - model.muscle_length(1, theta_d);
    let dq2 = model.muscle_length(2, theta) - model.muscle_length(2, theta_d);
    dq1 * force.v1 + dq2 * force.v2
}

/// Right-hand side of the first-order system
/// `d(theta, omega)/dt = (omega, (tau - mu omega - penalty)/I)`.
///
/// With no penalty configured this is exactly the unconstrained
/// equation of motion; `(theta_d, 0)` is its equilibrium.
pub fn ode_rhs(state: &State, model: &MuscleModel, dyn_params: &DynParams, force: &InternalForce) -> State {
    let tau = torque(model, state.theta, force);
    let pen = dyn_params
        .penalty
        .as_ref()
        .map_or(0.0, |p| p.force(state.theta));
    State {
        theta: state.omega,
        omega: (tau - dyn_params.viscosity * state.omega - pen) / dyn_params.inertia,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stable_geometry;
    use crate::geometry::MuscleModel;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn model() -> MuscleModel {
        MuscleModel::new(stable_geometry(0.03)).unwrap()
    }

    fn dynp(gain: f64, penalty: Option<Penalty>) -> DynParams {
        DynParams {
            inertia: 4.2e-3,
            viscosity: 0.1,
            gain,
            theta_d: PI / 12.0,
            penalty,
        }
    }

    #[test]
    fn internal_force_orthogonal_to_jacobian() {
        let m = model();
        let theta_d = PI / 12.0;
        let v = internal_force(&m, theta_d, 371.6);
        let j = m.muscle_jacobian(theta_d);
        let dot = j[0] * v.v1 + j[1] * v.v2;
        let scale = j[0].hypot(j[1]) * v.v1.hypot(v.v2);
        assert!(dot.abs() <= 1e-12 * scale);
    }

    #[test]
    fn internal_force_positive_in_window() {
        let v = internal_force(&model(), PI / 12.0, 1.0);
        assert!(v.both_positive(), "{v:?}");
    }

    #[test]
    fn bench_tension_pair_consistent() {
        // Measured stable-bench tensions (7.84, 7.05) N: solving the gain
        // from v1 must reproduce v2 within the ingestion tolerance.
        let p = crate::geometry::SystemParams::from_millimeters(
            285.0, 110.0, 87.0, 5.0, 198.0, 280.0, 99.0, 99.0, 35.0, 35.0, 35.0, 35.0,
        )
        .unwrap();
        let m = MuscleModel::new(p).unwrap();
        let j = m.muscle_jacobian(PI / 12.0);
        let gain = 7.84 / j[1];
        let v2 = -gain * j[0];
        assert!(gain > 0.0);
        assert!((v2 - 7.05).abs() / 7.05 < 0.02, "v2 = {v2}");
    }

    #[test]
    fn torque_vanishes_at_target() {
        let m = model();
        let theta_d = PI / 12.0;
        let v = internal_force(&m, theta_d, 371.6);
        let scale = m.muscle_jacobian(theta_d)[1].abs() * (v.v1.abs() + v.v2.abs());
        assert!(torque(&m, theta_d, &v).abs() <= 1e-12 * scale);
    }

    #[test]
    fn torque_drives_toward_target() {
        let m = model();
        let v = internal_force(&m, PI / 12.0, 371.6);
        assert!(torque(&m, PI / 18.0, &v) > 0.0);
    }

    #[test]
    fn torque_linear_in_gain() {
        let m = model();
        let v1 = internal_force(&m, PI / 12.0, 100.0);
        let v2 = internal_force(&m, PI / 12.0, 200.0);
        for k in 0..20 {
            let theta = -0.2 + 0.05 * k as f64;
            assert_relative_eq!(
                2.0 * torque(&m, theta, &v1),
                torque(&m, theta, &v2),
                max_relative = 1e-12,
                epsilon = 1e-300
            );
        }
    }

    #[test]
    fn decompose_balanced_input_has_no_driving_part() {
        let m = model();
        let theta_d = PI / 12.0;
        let v = internal_force(&m, theta_d, 371.6);
        let split = decompose_tension(&m, theta_d, [v.v1, v.v2]);
        let scale = v.v1.hypot(v.v2);
        assert!(split.driving[0].abs() <= 1e-12 * scale);
        assert!(split.driving[1].abs() <= 1e-12 * scale);
        assert!(!split.jacobian_degenerate);
    }

    #[test]
    fn decompose_jacobian_parallel_input_is_all_driving() {
        let m = model();
        let theta = 0.3;
        let j = m.muscle_jacobian(theta);
        let f = [2.5 * j[0], 2.5 * j[1]];
        let split = decompose_tension(&m, theta, f);
        let scale = f[0].hypot(f[1]);
        assert!(split.internal[0].abs() <= 1e-12 * scale);
        assert!(split.internal[1].abs() <= 1e-12 * scale);
    }

    #[test]
    fn decompose_reconstructs_and_stays_orthogonal() {
        let m = model();
        for (k, theta) in [(0u32, -0.1), (1, 0.2), (2, 0.9)] {
            let f = [0.7 + k as f64, -1.3 * k as f64 + 0.2];
            let split = decompose_tension(&m, theta, f);
            let j = m.muscle_jacobian(theta);
            assert_relative_eq!(split.driving[0] + split.internal[0], f[0], epsilon = 1e-12);
            assert_relative_eq!(split.driving[1] + split.internal[1], f[1], epsilon = 1e-12);
            let dot = split.internal[0] * j[0] + split.internal[1] * j[1];
            assert!(dot.abs() <= 1e-12 * j[0].hypot(j[1]) * f[0].hypot(f[1]).max(1.0));
            // Driving part is parallel to J: zero cross product.
            let cross = split.driving[0] * j[1] - split.driving[1] * j[0];
            assert!(cross.abs() <= 1e-12 * j[0].hypot(j[1]) * f[0].hypot(f[1]).max(1.0));
        }
    }

    #[test]
    fn decompose_zero_jacobian_flagged() {
        let split = super::decompose_raw([0.0, 0.0], [1.0, 2.0]);
        assert!(split.jacobian_degenerate);
        assert_eq!(split.driving, [0.0, 0.0]);
        assert_eq!(split.internal, [1.0, 2.0]);
    }

    #[test]
    fn potential_zero_at_target_and_positive_nearby() {
        let m = model();
        let theta_d = PI / 12.0;
        let v = internal_force(&m, theta_d, 371.6);
        assert_eq!(potential(&m, theta_d, theta_d, &v), 0.0);
        for k in 1..=60 {
            let delta = 0.005 * k as f64;
            assert!(potential(&m, theta_d + delta, theta_d, &v) > 0.0);
            assert!(potential(&m, theta_d - delta, theta_d, &v) > 0.0);
        }
    }

    #[test]
    fn potential_gradient_is_minus_torque() {
        let m = model();
        let theta_d = PI / 12.0;
        let v = internal_force(&m, theta_d, 371.6);
        let h = 1e-6;
        for k in 0..=20 {
            let theta = -0.1 + 0.04 * k as f64;
            let fd = (potential(&m, theta + h, theta_d, &v) - potential(&m, theta - h, theta_d, &v))
                / (2.0 * h);
            let tau = torque(&m, theta, &v);
            assert_relative_eq!(fd, -tau, max_relative = 1e-6, epsilon = 1e-9);
        }
    }

    #[test]
    fn rhs_zero_at_equilibrium() {
        let m = model();
        let dp = dynp(371.6, None);
        let v = internal_force(&m, dp.theta_d, dp.gain);
        let rhs = ode_rhs(
            &State {
                theta: dp.theta_d,
                omega: 0.0,
            },
            &m,
            &dp,
            &v,
        );
        assert_eq!(rhs.theta, 0.0);
        assert!(rhs.omega.abs() < 1e-10);
    }

    #[test]
    fn penalty_zero_inside_bounds() {
        let pen = Penalty {
            epsilon: 1e-3,
            theta_min: -PI / 180.0,
            theta_max: 41.0 * PI / 180.0,
        };
        assert_eq!(pen.force(pen.theta_min), 0.0);
        assert_eq!(pen.force(0.2), 0.0);
        assert_eq!(pen.force(pen.theta_max), 0.0);
        assert!(!pen.active(0.2));
    }

    #[test]
    fn penalty_one_sided_ramps() {
        let pen = Penalty {
            epsilon: 1e-3,
            theta_min: -PI / 180.0,
            theta_max: 41.0 * PI / 180.0,
        };
        let delta = 1e-3;
        assert_relative_eq!(
            pen.force(pen.theta_max + delta),
            delta / pen.epsilon,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            pen.force(pen.theta_min - delta),
            -delta / pen.epsilon,
            max_relative = 1e-12
        );
        assert!(pen.active(pen.theta_max + delta));

        // The ramp enters the acceleration with a minus sign.
        let m = model();
        let dp = dynp(371.6, Some(pen));
        let v = internal_force(&m, dp.theta_d, dp.gain);
        let theta = pen.theta_max + delta;
        let with = ode_rhs(&State { theta, omega: 0.0 }, &m, &dp, &v);
        let without = ode_rhs(&State { theta, omega: 0.0 }, &m, &dynp(371.6, None), &v);
        assert_relative_eq!(
            with.omega,
            without.omega - delta / pen.epsilon / dp.inertia,
            max_relative = 1e-12
        );
    }

    #[test]
    fn dyn_params_validation() {
        let mut dp = dynp(1.0, None);
        assert!(dp.validate().is_ok());
        dp.gain = 0.0;
        assert!(matches!(
            dp.validate(),
            Err(ModelError::NonPositiveParam { name: "gain", .. })
        ));
        let bad = DynParams {
            penalty: Some(Penalty {
                epsilon: 1e-3,
                theta_min: 0.3,
                theta_max: 0.7,
            }),
            ..dynp(1.0, None)
        };
        assert!(matches!(bad.validate(), Err(ModelError::PenaltyBounds { .. })));
    }
}
