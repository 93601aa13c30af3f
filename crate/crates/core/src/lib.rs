//! Feed-forward position control of a single-joint, two-cable linkage
//! with routing pulleys: cable-length geometry in closed form, balanced
//! tension control with its torque and potential, fixed-step simulation
//! of the (optionally penalized) dynamics, and certification of target
//! angles via closed-form stability windows cross-checked by numeric
//! oracles.

pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod integrate;
pub mod stability;
pub mod verify;

pub use dynamics::{
    decompose_tension, internal_force, ode_rhs, potential, torque, DynParams, InternalForce,
    Penalty, State, TensionSplit,
};
pub use error::ModelError;
pub use geometry::{
    compute_alpha, derive_coeffs, raw_segment_length, MuscleModel, SegmentCoeffs, SystemParams,
};
pub use integrate::{rk4_step, simulate, step, Diverged, Sample, Trajectory, DEFAULT_DT};
pub use stability::{
    c_theta0, certified_interval, check_equilibrium, default_theta0, potential_curvature,
    resolve_theta0, segment_gammas, segment_windows, stable_window_muscle1,
    stable_window_muscle2, tension_window, theta0_upper_bound, AngleInterval, AssumptionCheck,
    SegmentGammas, SegmentWindow, StabilityReport, UndeterminedWindow, Verdict,
};
pub use verify::{
    cross_validate_windows, fd_derivative, scan_potential, FdOrder, OracleConfig, PotentialScan,
    SoundnessError, WindowCheck, WindowCrossValidation,
};
