//! Library surface behind the `muscu` binary: configuration parsing,
//! command runners, and CSV/report formatting. Kept as a library so
//! integration and acceptance tests drive the exact code the binary
//! runs.

pub mod config;
pub mod csvfmt;
pub mod report;
pub mod run;

pub use config::{
    config_echo, parse_angle, Angle, ConfigError, GeometryMm, ResolvedScenario, ScenarioConfig, TensionGate,
    SCHEMA_VERSION, TENSION_CONSISTENCY_TOL,
};
pub use run::{
    parse_range, parse_trajectory_csv, run_check, run_potential, run_simulate, run_sweep,
    set_sweep_param, EXIT_CERTIFIED, EXIT_INVALID_CONFIG, EXIT_NOT_CERTIFIED, EXIT_UNKNOWN,
    EXIT_VERIFY_FAILED,
};
