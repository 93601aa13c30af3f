//! Scenario configuration: JSON schema, angle parsing, and resolution
//! into validated model and dynamics parameters.
//!
//! Geometry is ingested in millimeters (the unit bench tables use);
//! everything downstream runs in meters and radians. Angle fields are
//! unit-tagged: `"pi/12"`-style rational multiples of pi (which avoid
//! decimal drift), `"0.25 rad"`, `"15 deg"`, or `{"rad": 0.25}` /
//! `{"deg": 15.0}`. Bare numbers are rejected.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use muscu_core::{DynParams, ModelError, MuscleModel, Penalty, SystemParams};

/// The only schema this build reads or writes.
pub const SCHEMA_VERSION: u32 = 1;

/// Ingesting a tension pair solves the gain from `v1` and back-checks
/// `v2`; measured pairs from real rigs carry a few percent of
/// inconsistency, so the gate is loose but still catches swapped or
/// mismatched pairs.
pub const TENSION_CONSISTENCY_TOL: f64 = 0.05;

/// An angle in radians, parsed from a unit-tagged representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

/// Parses `pi`-multiple strings (`pi/12`, `41pi/180`, `-5pi/18`,
/// `2*pi/3`) and tagged decimals (`0.25 rad`, `15 deg`).
pub fn parse_angle(text: &str) -> Result<f64, String> {
    let t = text.trim();
    let (sign, rest) = match t.strip_prefix('-') {
        Some(r) => (-1.0, r.trim_start()),
        None => (1.0, t.strip_prefix('+').unwrap_or(t).trim_start()),
    };
    if let Some(idx) = rest.find("pi") {
        let coef_str = rest[..idx].trim().trim_end_matches('*').trim();
        let coef = if coef_str.is_empty() {
            1.0
        } else {
            coef_str
                .parse::<f64>()
                .map_err(|_| format!("bad pi coefficient in angle `{text}`"))?
        };
        let after = rest[idx + 2..].trim();
        let div = if after.is_empty() {
            1.0
        } else if let Some(d) = after.strip_prefix('/') {
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad pi divisor in angle `{text}`"))?;
            if d == 0.0 {
                return Err(format!("zero divisor in angle `{text}`"));
            }
            d
        } else {
            return Err(format!("unrecognized angle `{text}`"));
        };
        return Ok(sign * coef * PI / div);
    }
    if let Some(v) = rest.strip_suffix("rad") {
        return v
            .trim()
            .parse::<f64>()
            .map(|x| sign * x)
            .map_err(|_| format!("bad radian value in angle `{text}`"));
    }
    if let Some(v) = rest.strip_suffix("deg") {
        return v
            .trim()
            .parse::<f64>()
            .map(|x| sign * x.to_radians())
            .map_err(|_| format!("bad degree value in angle `{text}`"));
    }
    Err(format!(
        "angle `{text}` needs a unit tag: use `pi/12`, `0.25 rad` or `15 deg`"
    ))
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(1))?;
        map.serialize_entry("rad", &self.0)?;
        map.end()
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;
        impl<'de> Visitor<'de> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(
                    f,
                    "a unit-tagged angle: \"pi/12\", \"0.25 rad\", \"15 deg\", or {{\"rad\": x}} / {{\"deg\": x}}"
                )
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Angle, A::Error> {
                let key: String = map
                    .next_key()?
                    .ok_or_else(|| de::Error::custom("empty angle object"))?;
                let value: f64 = map.next_value()?;
                if map.next_key::<String>()?.is_some() {
                    return Err(de::Error::custom("angle object takes a single key"));
                }
                match key.as_str() {
                    "rad" => Ok(Angle(value)),
                    "deg" => Ok(Angle(value.to_radians())),
                    other => Err(de::Error::custom(format!(
                        "unknown angle unit `{other}` (use rad or deg)"
                    ))),
                }
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Err(E::custom(format!(
                    "bare number {v} is not a valid angle: a unit tag is required"
                )))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                self.visit_f64(v as f64)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                self.visit_f64(v as f64)
            }
        }
        deserializer.deserialize_any(AngleVisitor)
    }
}

/// Frame lengths in millimeters, keyed like the bench tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryMm {
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(rename = "L1")]
    pub l1: f64,
    pub b1: f64,
    pub b2: f64,
    pub d1: f64,
    pub d2: f64,
    pub ell1: f64,
    pub ell2: f64,
    pub r1: f64,
    pub r2: f64,
    pub s1: f64,
    pub s2: f64,
}

/// Hard-stop approximation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PenaltyConfig {
    pub epsilon: f64,
    pub theta_min: Angle,
    pub theta_max: Angle,
}

/// Inertia, friction and control. Exactly one of `k` and `tensions`
/// must be present.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsConfig {
    /// kg m^2
    pub inertia: f64,
    /// Viscous friction, N m s/rad.
    pub mu: f64,
    /// Tension gain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    /// Measured tension pair (v1, v2) in newtons; the gain is solved
    /// from v1 and v2 is back-checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tensions: Option<[f64; 2]>,
    pub theta_d: Angle,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty: Option<PenaltyConfig>,
}

/// Initial state and horizon of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub theta_init: Angle,
    /// rad/s
    #[serde(default)]
    pub omega_init: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_final: f64,
}

fn default_dt() -> f64 {
    muscu_core::DEFAULT_DT
}

/// Certification options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct StabilityConfig {
    /// Pinned domain margin; defaults to half the admissible bound.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<Angle>,
}

/// One scenario: geometry, dynamics, and optional simulation and
/// certification blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
    pub geometry_mm: GeometryMm,
    pub dynamics: DynamicsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stability: Option<StabilityConfig>,
}

/// Configuration rejection; always names the offending field or the
/// violated model assumption.
#[derive(Debug)]
pub enum ConfigError {
    Io {
        path: String,
        source: std::io::Error,
    },
    Parse {
        path: String,
        field: String,
        message: String,
    },
    SchemaVersion {
        found: u32,
    },
    Field {
        field: String,
        message: String,
    },
    Model(ModelError),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io { path, source } => write!(f, "cannot read config `{path}`: {source}"),
            ConfigError::Parse {
                path,
                field,
                message,
            } => write!(f, "config `{path}`: field `{field}`: {message}"),
            ConfigError::SchemaVersion { found } => write!(
                f,
                "unsupported schema_version {found}; this build reads version {SCHEMA_VERSION}"
            ),
            ConfigError::Field { field, message } => write!(f, "field `{field}`: {message}"),
            ConfigError::Model(e) => write!(f, "model rejected: {e}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl From<ModelError> for ConfigError {
    fn from(e: ModelError) -> Self {
        ConfigError::Model(e)
    }
}

/// Whether resolving a tension pair back-checks the second component
/// against the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TensionGate {
    Check,
    Skip,
}

/// A parsed and validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    /// Echo of the configuration as parsed.
    pub config: ScenarioConfig,
    pub model: MuscleModel,
    pub dyn_params: DynParams,
    /// Pinned domain margin, already range-checked.
    pub pinned_theta0: Option<f64>,
    /// The tension pair as given, when the gain came from one.
    pub tension_input: Option<[f64; 2]>,
}

impl ScenarioConfig {
    pub fn from_json(path_label: &str, text: &str) -> Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: ScenarioConfig =
            serde_path_to_error::deserialize(de).map_err(|e| ConfigError::Parse {
                path: path_label.to_string(),
                field: e.path().to_string(),
                message: e.inner().to_string(),
            })?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let label = path.display().to_string();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: label.clone(),
            source,
        })?;
        Self::from_json(&label, &text)
    }

    /// Validates everything and builds the model and dynamics.
    pub fn resolve(&self) -> Result<ResolvedScenario, ConfigError> {
        self.resolve_with(TensionGate::Check)
    }

    /// Like [`resolve`](Self::resolve), but with an explicit choice of
    /// tension-pair back-check. Sweep rows skip it: a measured pair
    /// belongs to the base geometry, so only `v1` (the kept cable-1
    /// load) is meaningful for a counterfactual row.
    pub fn resolve_with(&self, gate: TensionGate) -> Result<ResolvedScenario, ConfigError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(ConfigError::SchemaVersion {
                found: self.schema_version,
            });
        }
        let g = &self.geometry_mm;
        let params = SystemParams::from_millimeters(
            g.l0, g.l1, g.b1, g.b2, g.d1, g.d2, g.ell1, g.ell2, g.r1, g.r2, g.s1, g.s2,
        )?;
        let model = MuscleModel::new(params)?;

        let theta_d = self.dynamics.theta_d.0;
        let gain = match (self.dynamics.k, self.dynamics.tensions) {
            (Some(k), None) => k,
            (None, Some([v1, v2])) => {
                if !(v1 > 0.0 && v2 > 0.0 && v1.is_finite() && v2.is_finite()) {
                    return Err(ConfigError::Field {
                        field: "dynamics.tensions".into(),
                        message: format!("tensions must be positive forces, got ({v1}, {v2}) N"),
                    });
                }
                let j = model.muscle_jacobian(theta_d);
                if j[1] <= 0.0 {
                    return Err(ConfigError::Field {
                        field: "dynamics.tensions".into(),
                        message: format!(
                            "cannot solve the gain: cable-2 slope at theta_d is {:.3e} <= 0",
                            j[1]
                        ),
                    });
                }
                let k = v1 / j[1];
                let v2_implied = -k * j[0];
                let rel = (v2_implied - v2).abs() / v2.abs().max(v2_implied.abs());
                if gate == TensionGate::Check && (rel.is_nan() || rel > TENSION_CONSISTENCY_TOL) {
                    return Err(ConfigError::Field {
                        field: "dynamics.tensions".into(),
                        message: format!(
                            "pair ({v1}, {v2}) N inconsistent with the geometry: v1 implies \
                             v2 = {v2_implied:.4} N ({:.1}% off, tolerance {:.0}%)",
                            rel * 100.0,
                            TENSION_CONSISTENCY_TOL * 100.0
                        ),
                    });
                }
                k
            }
            (None, None) => {
                return Err(ConfigError::Field {
                    field: "dynamics.k".into(),
                    message: "exactly one of `k` and `tensions` is required; neither given".into(),
                })
            }
            (Some(_), Some(_)) => {
                return Err(ConfigError::Field {
                    field: "dynamics.k".into(),
                    message: "exactly one of `k` and `tensions` is required; both given".into(),
                })
            }
        };

        let dyn_params = DynParams {
            inertia: self.dynamics.inertia,
            viscosity: self.dynamics.mu,
            gain,
            theta_d,
            penalty: self.dynamics.penalty.map(|p| Penalty {
                epsilon: p.epsilon,
                theta_min: p.theta_min.0,
                theta_max: p.theta_max.0,
            }),
        };
        dyn_params.validate()?;

        if let Some(sim) = &self.simulation {
            if !(sim.dt > 0.0 && sim.dt.is_finite()) {
                return Err(ConfigError::Field {
                    field: "simulation.dt".into(),
                    message: format!("dt must be positive and finite, got {}", sim.dt),
                });
            }
            if !(sim.t_final >= 0.0 && sim.t_final.is_finite()) {
                return Err(ConfigError::Field {
                    field: "simulation.t_final".into(),
                    message: format!("t_final must be non-negative, got {}", sim.t_final),
                });
            }
            if !sim.theta_init.0.is_finite() || !sim.omega_init.is_finite() {
                return Err(ConfigError::Field {
                    field: "simulation.theta_init".into(),
                    message: "initial state must be finite".into(),
                });
            }
        }

        let pinned_theta0 = self.stability.and_then(|s| s.theta0).map(|a| a.0);
        // Range-check a pinned margin now so a bad one is a config
        // rejection rather than a late failure.
        muscu_core::resolve_theta0(&model, pinned_theta0)?;

        Ok(ResolvedScenario {
            config: self.clone(),
            model,
            dyn_params,
            pinned_theta0,
            tension_input: self.dynamics.tensions,
        })
    }
}

/// Canonical single-line JSON echo of a configuration; parsing it back
/// reproduces the run bit-identically.
pub fn config_echo(config: &ScenarioConfig) -> String {
    serde_json::to_string(config).expect("config serializes")
}
