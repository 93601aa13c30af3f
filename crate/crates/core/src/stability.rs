//! Closed-form certification of target angles.
//!
//! A target angle is certified asymptotically stable when the balanced
//! tension pair is positive there (the tension window) and every one of
//! the four segment-length curvatures is positive there (the per-segment
//! curvature windows). Positive curvature of all segments makes the
//! control potential strictly convex at the target, which combined with
//! viscous friction gives asymptotic stability.
//!
//! The curvature sign of one segment is governed by the quadratic
//! `A s^2 + B s + A` in `s = sin(theta/2 + alpha)` with `A = b rho < 0`,
//! `B = a^2 + b^2 + c^2`: the curvature is positive exactly where `s`
//! exceeds the smaller root `min(|b|/rho, rho/|b|)`. For cable 1 the
//! resulting window is two-sided; for cable 2 the sine is decreasing
//! over the whole domain, so the window is one-sided but only resolvable
//! when `|b|` clears one of two case bounds built from the domain-edge
//! value `C_theta0` — between the bounds the analysis is silent and the
//! window is reported as undetermined rather than guessed.
//!
//! The certified set is the intersection of the tension window with all
//! four segment windows. (The per-segment conditions must hold
//! simultaneously for the potential curvature argument, so intersection,
//! not union, is the sound combination.)

use std::f64::consts::{FRAC_PI_4, PI};
use std::fmt;

use crate::dynamics::{internal_force, DynParams, InternalForce};
use crate::error::ModelError;
use crate::geometry::{MuscleModel, SegmentCoeffs};

/// Open angle interval, radians. Empty iff `lo >= hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AngleInterval {
    pub fn new(lo: f64, hi: f64) -> Self {
        AngleInterval { lo, hi }
    }

    pub fn is_empty(&self) -> bool {
        self.lo >= self.hi
    }

    /// Strict membership (the interval is open).
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn intersect(&self, other: &AngleInterval) -> AngleInterval {
        AngleInterval {
            lo: self.lo.max(other.lo),
            hi: self.hi.min(other.hi),
        }
    }
}

impl fmt::Display for AngleInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "(empty)")
        } else {
            write!(f, "({:.9}, {:.9})", self.lo, self.hi)
        }
    }
}

/// Inverse-sine angles of the curvature-sign quadratic roots for one
/// segment. Only the branch whose argument is at most one exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentGammas {
    /// `asin(|b|/rho)`, present when `|b| < rho`.
    pub asin_b_over_rho: Option<f64>,
    /// `asin(rho/|b|)`, present when `rho < |b|`.
    pub asin_rho_over_b: Option<f64>,
}

/// Root angles for one segment; each lies in `[0, pi/2]`.
pub fn segment_gammas(coeffs: &SegmentCoeffs) -> SegmentGammas {
    let b_abs = coeffs.b.abs();
    SegmentGammas {
        asin_b_over_rho: (b_abs <= coeffs.rho).then(|| (b_abs / coeffs.rho).asin()),
        asin_rho_over_b: (coeffs.rho <= b_abs).then(|| (coeffs.rho / b_abs).asin()),
    }
}

/// Curvature window of one segment: an interval, or undetermined when
/// `|b|` falls in the gap between the two case bounds of the cable-2
/// analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SegmentWindow {
    Known(AngleInterval),
    Unknown {
        b_abs: f64,
        /// Case 1 applies when `|b|` is below this.
        case1_bound: f64,
        /// Case 2 applies when `|b|` is above this.
        case2_bound: f64,
    },
}

impl SegmentWindow {
    pub fn known(&self) -> Option<&AngleInterval> {
        match self {
            SegmentWindow::Known(w) => Some(w),
            SegmentWindow::Unknown { .. } => None,
        }
    }
}

/// A cable-2 segment window could not be resolved.
#[derive(Debug, Clone, PartialEq)]
pub struct UndeterminedWindow {
    pub muscle: u8,
    pub segment: u8,
    pub b_abs: f64,
    pub case1_bound: f64,
    pub case2_bound: f64,
}

impl fmt::Display for UndeterminedWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "curvature window for segment ({},{}) undetermined: |b| = {:.6} lies in the \
             case gap (case 1 needs |b| < {:.6}, case 2 needs |b| > {:.6})",
            self.muscle, self.segment, self.b_abs, self.case1_bound, self.case2_bound
        )
    }
}

impl std::error::Error for UndeterminedWindow {}

/// Upper bound of the admissible domain margin:
/// `min(2 min(alpha21, alpha22) - pi, pi/4)`.
///
/// Positive whenever both cable-2 phase angles exceed `pi/2`, which the
/// model construction guarantees.
pub fn theta0_upper_bound(model: &MuscleModel) -> Result<f64, ModelError> {
    let a21 = model.coeff(2, 1).alpha;
    let a22 = model.coeff(2, 2).alpha;
    let bound = (2.0 * a21.min(a22) - PI).min(FRAC_PI_4);
    if bound <= 0.0 {
        return Err(ModelError::Theta0OutOfRange {
            theta0: 0.0,
            bound,
        });
    }
    Ok(bound)
}

/// Default domain margin: half the admissible upper bound.
pub fn default_theta0(model: &MuscleModel) -> Result<f64, ModelError> {
    Ok(0.5 * theta0_upper_bound(model)?)
}

/// Resolves the margin to use: a pinned value validated against the
/// admissible range, or the default.
pub fn resolve_theta0(model: &MuscleModel, pinned: Option<f64>) -> Result<f64, ModelError> {
    let bound = theta0_upper_bound(model)?;
    match pinned {
        None => Ok(0.5 * bound),
        Some(theta0) => {
            if !theta0.is_finite() || theta0 <= 0.0 || theta0 >= bound {
                Err(ModelError::Theta0OutOfRange { theta0, bound })
            } else {
                Ok(theta0)
            }
        }
    }
}

/// Sine amplitude of the canonical form at the lower domain edge:
/// `C_theta0 = rho sin(-theta0/2 + alpha)`.
///
/// For cable-2 segments this satisfies `c < C_theta0 < rho` for every
/// admissible `theta0`.
pub fn c_theta0(coeffs: &SegmentCoeffs, theta0: f64) -> f64 {
    coeffs.rho * (-theta0 / 2.0 + coeffs.alpha).sin()
}

/// Window of target angles with positive balanced tensions:
/// `(-theta0, pi - 2 max(alpha11, alpha12))`. May be empty; that is a
/// verdict, not an error.
pub fn tension_window(model: &MuscleModel, theta0: f64) -> AngleInterval {
    let hi = PI - 2.0 * model.coeff(1, 1).alpha.max(model.coeff(1, 2).alpha);
    AngleInterval::new(-theta0, hi)
}

/// Curvature window of a cable-1 segment. Always resolvable: the sine
/// of `theta/2 + alpha` sweeps past its maximum on the domain, so the
/// window is the two-sided band around it, clipped to the domain.
pub fn stable_window_muscle1(coeffs: &SegmentCoeffs, theta0: f64) -> AngleInterval {
    debug_assert_eq!(coeffs.muscle, 1);
    let b_abs = coeffs.b.abs();
    let gamma = if coeffs.rho > b_abs {
        (b_abs / coeffs.rho).asin()
    } else {
        (coeffs.rho / b_abs).asin()
    };
    AngleInterval::new(
        (-theta0).max(2.0 * (gamma - coeffs.alpha)),
        PI.min(2.0 * (PI - gamma - coeffs.alpha)),
    )
}

/// Curvature window of a cable-2 segment, resolvable only when `|b|`
/// clears one of the two case bounds derived from `C_theta0`.
pub fn stable_window_muscle2(coeffs: &SegmentCoeffs, theta0: f64) -> SegmentWindow {
    debug_assert_eq!(coeffs.muscle, 2);
    let b_abs = coeffs.b.abs();
    let big_c = c_theta0(coeffs, theta0);
    let case1_bound = coeffs.rho.min(big_c);
    let case2_bound = coeffs.rho * (coeffs.rho / big_c).max(1.0);
    if b_abs < case1_bound {
        let gamma = (b_abs / coeffs.rho).asin();
        SegmentWindow::Known(AngleInterval::new(
            -theta0,
            2.0 * (PI - gamma - coeffs.alpha),
        ))
    } else if b_abs > case2_bound {
        let gamma = (coeffs.rho / b_abs).asin();
        SegmentWindow::Known(AngleInterval::new(
            -theta0,
            2.0 * (PI - gamma - coeffs.alpha),
        ))
    } else {
        SegmentWindow::Unknown {
            b_abs,
            case1_bound,
            case2_bound,
        }
    }
}

/// All four segment windows in order (1,1), (1,2), (2,1), (2,2).
pub fn segment_windows(model: &MuscleModel, theta0: f64) -> [SegmentWindow; 4] {
    [
        SegmentWindow::Known(stable_window_muscle1(model.coeff(1, 1), theta0)),
        SegmentWindow::Known(stable_window_muscle1(model.coeff(1, 2), theta0)),
        stable_window_muscle2(model.coeff(2, 1), theta0),
        stable_window_muscle2(model.coeff(2, 2), theta0),
    ]
}

/// Certified set: the tension window intersected with every segment
/// window. Fails when any cable-2 window is undetermined.
pub fn certified_interval(
    model: &MuscleModel,
    theta0: f64,
) -> Result<AngleInterval, UndeterminedWindow> {
    let mut acc = tension_window(model, theta0);
    for (sw, coeffs) in segment_windows(model, theta0).iter().zip(model.coeffs()) {
        match sw {
            SegmentWindow::Known(w) => acc = acc.intersect(w),
            SegmentWindow::Unknown {
                b_abs,
                case1_bound,
                case2_bound,
            } => {
                return Err(UndeterminedWindow {
                    muscle: coeffs.muscle,
                    segment: coeffs.segment,
                    b_abs: *b_abs,
                    case1_bound: *case1_bound,
                    case2_bound: *case2_bound,
                })
            }
        }
    }
    Ok(acc)
}

/// Curvature of the control potential at the target,
/// `P''(theta_d) = k ((q11'' + q12'') q2' - (q21'' + q22'') q1')`.
pub fn potential_curvature(model: &MuscleModel, theta_d: f64, gain: f64) -> f64 {
    let j = model.muscle_jacobian(theta_d);
    gain * (model.muscle_length_d2(1, theta_d) * j[1] - model.muscle_length_d2(2, theta_d) * j[0])
}

/// One validated assumption with its measured margin (distance to the
/// rejection boundary; positive means satisfied).
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck {
    pub name: &'static str,
    pub passed: bool,
    pub margin: f64,
    pub detail: String,
}

/// Certification verdict for one target angle.
#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Certified,
    /// The target fails the tension window or a resolved curvature
    /// window; the certificate definitely does not apply.
    NotCertified(Vec<String>),
    /// The target passes every resolved constraint but at least one
    /// window is undetermined; no conclusion either way.
    Unknown(Vec<String>),
}

impl Verdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified)
    }
}

/// Full certification output for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub theta_d: f64,
    pub gain: f64,
    pub assumptions: Vec<AssumptionCheck>,
    pub theta0: f64,
    pub theta0_bound: f64,
    /// `C_theta0` for segments (2,1) and (2,2).
    pub c_theta0: [f64; 2],
    pub tension_window: AngleInterval,
    /// Windows in order (1,1), (1,2), (2,1), (2,2).
    pub segment_windows: [SegmentWindow; 4],
    /// Present only when every window is resolved.
    pub certified: Option<AngleInterval>,
    pub verdict: Verdict,
    /// Analytic potential curvature at the target, J/rad^2.
    pub pdd_at_target: f64,
    pub tensions_at_target: InternalForce,
}

fn assumption_checks(model: &MuscleModel, theta0: f64, bound: f64) -> Vec<AssumptionCheck> {
    let mut out = Vec::with_capacity(9);
    for c in model.coeffs() {
        let margin = (c.rho - c.b.abs()).abs();
        out.push(AssumptionCheck {
            name: "segment_nondegenerate",
            passed: margin > 0.0,
            margin,
            detail: format!(
                "({},{}): |sqrt(a^2+c^2) - |b|| = {margin:.6e} m",
                c.muscle, c.segment
            ),
        });
    }
    for c in model.coeffs() {
        let margin = c.a.abs();
        let want = if c.muscle == 1 { "a > 0" } else { "a < 0" };
        out.push(AssumptionCheck {
            name: "along_base_sign",
            passed: if c.muscle == 1 { c.a > 0.0 } else { c.a < 0.0 },
            margin,
            detail: format!("({},{}): {want}, |a| = {margin:.6e} m", c.muscle, c.segment),
        });
    }
    out.push(AssumptionCheck {
        name: "theta0_margin",
        passed: theta0 > 0.0 && theta0 < bound,
        margin: bound - theta0,
        detail: format!("theta0 = {theta0:.9} in (0, {bound:.9})"),
    });
    out
}

/// Runs the full certification for the scenario's target angle.
///
/// `pinned_theta0` overrides the default domain margin; values outside
/// the admissible range are a configuration error.
pub fn check_equilibrium(
    model: &MuscleModel,
    dyn_params: &DynParams,
    pinned_theta0: Option<f64>,
) -> Result<StabilityReport, ModelError> {
    dyn_params.validate()?;
    let bound = theta0_upper_bound(model)?;
    let theta0 = resolve_theta0(model, pinned_theta0)?;
    let assumptions = assumption_checks(model, theta0, bound);

    let theta_d = dyn_params.theta_d;
    let t_window = tension_window(model, theta0);
    let windows = segment_windows(model, theta0);
    let c0 = [
        c_theta0(model.coeff(2, 1), theta0),
        c_theta0(model.coeff(2, 2), theta0),
    ];

    let mut exclusions: Vec<String> = Vec::new();
    let mut gaps: Vec<String> = Vec::new();
    if !t_window.contains(theta_d) {
        exclusions.push(format!(
            "theta_d = {theta_d:.9} outside the positive-tension window {t_window}"
        ));
    }
    for (sw, c) in windows.iter().zip(model.coeffs()) {
        match sw {
            SegmentWindow::Known(w) => {
                if !w.contains(theta_d) {
                    exclusions.push(format!(
                        "theta_d = {theta_d:.9} outside the curvature window for segment ({},{}) = {w}",
                        c.muscle, c.segment
                    ));
                }
            }
            SegmentWindow::Unknown {
                b_abs,
                case1_bound,
                case2_bound,
            } => gaps.push(
                UndeterminedWindow {
                    muscle: c.muscle,
                    segment: c.segment,
                    b_abs: *b_abs,
                    case1_bound: *case1_bound,
                    case2_bound: *case2_bound,
                }
                .to_string(),
            ),
        }
    }

    let certified = certified_interval(model, theta0).ok();
    // An exclusion by a resolved window is decisive regardless of any
    // undetermined ones; the gap only blocks a positive verdict.
    let verdict = if !exclusions.is_empty() {
        Verdict::NotCertified(exclusions)
    } else if !gaps.is_empty() {
        Verdict::Unknown(gaps)
    } else {
        Verdict::Certified
    };

    Ok(StabilityReport {
        theta_d,
        gain: dyn_params.gain,
        assumptions,
        theta0,
        theta0_bound: bound,
        c_theta0: c0,
        tension_window: t_window,
        segment_windows: windows,
        certified,
        verdict,
        pdd_at_target: potential_curvature(model, theta_d, dyn_params.gain),
        tensions_at_target: internal_force(model, theta_d, dyn_params.gain),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stable_geometry;
    use crate::geometry::SystemParams;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    fn model(kappa: f64) -> MuscleModel {
        MuscleModel::new(stable_geometry(kappa)).unwrap()
    }

    /// Geometry whose target pi/12 is not certifiable (segment (1,2)
    /// window excludes it and segment (2,2) is in the case gap).
    fn uncertifiable_geometry() -> SystemParams {
        SystemParams::from_millimeters(
            70.0, 15.0, 20.0, 20.0, 30.0, 30.0, 30.0, 30.0, 15.0, 15.0, 25.0, 25.0,
        )
        .unwrap()
    }

    fn dynp(theta_d: f64) -> DynParams {
        DynParams {
            inertia: 4.2e-3,
            viscosity: 0.1,
            gain: 371.6,
            theta_d,
            penalty: None,
        }
    }

    #[test]
    fn theta0_bound_for_stable_geometry() {
        // alpha2j = 3 pi/4 gives min(pi/2, pi/4) = pi/4.
        let bound = theta0_upper_bound(&model(1.0)).unwrap();
        assert_relative_eq!(bound, FRAC_PI_4, epsilon = 1e-12);
        assert_relative_eq!(default_theta0(&model(1.0)).unwrap(), FRAC_PI_4 / 2.0);
    }

    #[test]
    fn theta0_bound_near_quadrant_edge() {
        // alpha21 = pi/2 + 0.01 exactly by construction: bound = 0.02.
        let phi: f64 = FRAC_PI_2 + 0.01;
        let p = SystemParams {
            l0: 1.0,
            l1: 0.2,
            b1: 0.5,
            b2: 1.0 + phi.cos(),
            d1: 1.0,
            d2: phi.sin(),
            ell1: 0.2,
            ell2: 0.2,
            r1: 0.5,
            r2: 0.5,
            s1: 0.5,
            s2: 0.5,
        };
        let m = MuscleModel::new(p).unwrap();
        assert_relative_eq!(m.coeff(2, 1).alpha, phi, epsilon = 1e-12);
        assert_relative_eq!(theta0_upper_bound(&m).unwrap(), 0.02, epsilon = 1e-12);
    }

    #[test]
    fn resolve_theta0_rejects_out_of_range() {
        let m = model(1.0);
        assert!(resolve_theta0(&m, Some(0.1)).is_ok());
        for bad in [0.0, -0.1, FRAC_PI_4, 1.0, f64::NAN] {
            assert!(matches!(
                resolve_theta0(&m, Some(bad)),
                Err(ModelError::Theta0OutOfRange { .. })
            ));
        }
    }

    #[test]
    fn c_theta0_reference_values() {
        let m = model(1.0);
        // theta0 -> 0 recovers rho sin(alpha) = c.
        let c21 = m.coeff(2, 1);
        assert_relative_eq!(c_theta0(c21, 1e-9), c21.c, epsilon = 1e-8);
        // theta0 = 0.1: C = 4 sin(3 pi / 4 - 0.05).
        assert_relative_eq!(
            c_theta0(c21, 0.1),
            4.0 * (3.0 * FRAC_PI_4 - 0.05).sin(),
            epsilon = 1e-12
        );
        // c < C < rho across admissible margins, both cable-2 segments.
        for k in 1..30 {
            let theta0 = FRAC_PI_4 * k as f64 / 30.0;
            for seg in [m.coeff(2, 1), m.coeff(2, 2)] {
                let big_c = c_theta0(seg, theta0);
                assert!(seg.c < big_c && big_c < seg.rho, "theta0 = {theta0}");
            }
        }
    }

    #[test]
    fn c_theta0_monotone_in_margin() {
        // C falls toward c as the margin shrinks and rises toward rho
        // as it approaches the admissible bound, so enlarging the
        // margin never hurts the cable-2 case conditions.
        let m = model(1.0);
        let seg = m.coeff(2, 1);
        let mut prev = c_theta0(seg, 0.01);
        for theta0 in [0.1, 0.35, 0.7] {
            let cur = c_theta0(seg, theta0);
            assert!(cur > prev, "C must grow with theta0");
            prev = cur;
        }
    }

    #[test]
    fn tension_window_for_stable_geometry() {
        // alpha1j = pi/4 gives hi = pi/2.
        let w = tension_window(&model(1.0), 0.1);
        assert_relative_eq!(w.hi, FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(w.lo, -0.1);
    }

    #[test]
    fn cable1_windows_for_stable_geometry() {
        let m = model(1.0);
        let theta0 = FRAC_PI_4 / 2.0;
        // (1,1): rho = 2 sqrt2 > |b| = 1; both clips engage.
        let w11 = stable_window_muscle1(m.coeff(1, 1), theta0);
        assert_relative_eq!(w11.lo, -theta0);
        assert_relative_eq!(w11.hi, PI);
        // (1,2): rho = 1/2 < |b| = 1, gamma = asin(1/2) = pi/6.
        let w12 = stable_window_muscle1(m.coeff(1, 2), theta0);
        assert_relative_eq!(w12.lo, -theta0, epsilon = 1e-12);
        assert_relative_eq!(w12.hi, PI);
        // A margin larger than pi/6 exposes the gamma-side lower clip.
        let w12_wide = stable_window_muscle1(m.coeff(1, 2), 0.6);
        assert_relative_eq!(w12_wide.lo, -PI / 6.0, epsilon = 1e-12);
    }

    #[test]
    fn cable2_windows_for_stable_geometry() {
        let m = model(1.0);
        let theta0 = FRAC_PI_4 / 2.0;
        // (2,1): case 1, hi = 2 (pi - asin(1/4) - 3 pi/4).
        match stable_window_muscle2(m.coeff(2, 1), theta0) {
            SegmentWindow::Known(w) => {
                assert_relative_eq!(w.lo, -theta0);
                assert_relative_eq!(w.hi, 1.065435816510739, epsilon = 1e-12);
            }
            other => panic!("expected resolved window, got {other:?}"),
        }
        // (2,2): case 2, gamma = asin(1/2), hi = pi/6.
        match stable_window_muscle2(m.coeff(2, 2), theta0) {
            SegmentWindow::Known(w) => {
                assert_relative_eq!(w.hi, PI / 6.0, epsilon = 1e-12);
            }
            other => panic!("expected resolved window, got {other:?}"),
        }
    }

    #[test]
    fn cable2_case_gap_reported() {
        // Bench-style segment whose |b| sits between the case bounds at
        // the default margin.
        let c = SegmentCoeffs::new(-0.28, -0.099, 0.015, 2, 1).unwrap();
        match stable_window_muscle2(&c, FRAC_PI_4 / 2.0) {
            SegmentWindow::Unknown {
                b_abs,
                case1_bound,
                case2_bound,
            } => {
                assert_relative_eq!(b_abs, 0.099);
                assert!(case1_bound < b_abs && b_abs < case2_bound);
            }
            other => panic!("expected case gap, got {other:?}"),
        }
    }

    #[test]
    fn case1_holds_for_all_margins_when_b_below_c() {
        // C > c for every admissible margin, so |b| < min(rho, c) keeps
        // case 1 applicable no matter how small theta0 gets.
        let m = model(1.0);
        let seg = m.coeff(2, 1);
        assert!(seg.b.abs() < seg.rho.min(seg.c));
        for t0 in [0.2, 0.1, 0.05, 1e-4] {
            assert!(seg.b.abs() < seg.rho.min(c_theta0(seg, t0)));
        }
    }

    #[test]
    fn certified_interval_for_stable_geometry() {
        for kappa in [1.0, 0.03] {
            let m = model(kappa);
            let theta0 = default_theta0(&m).unwrap();
            let cert = certified_interval(&m, theta0).unwrap();
            assert_relative_eq!(cert.hi, PI / 6.0, epsilon = 1e-12);
            assert!(cert.lo <= 0.0);
            // Contains (0, pi/6) and sits inside the tension window.
            let t = tension_window(&m, theta0);
            assert!(cert.lo >= t.lo && cert.hi <= t.hi);
        }
    }

    #[test]
    fn certified_interval_fails_on_case_gap() {
        let m = MuscleModel::new(uncertifiable_geometry()).unwrap();
        let theta0 = default_theta0(&m).unwrap();
        let err = certified_interval(&m, theta0).unwrap_err();
        assert_eq!((err.muscle, err.segment), (2, 2));
        assert!(err.to_string().contains("undetermined"));
    }

    #[test]
    fn verdict_certified_for_stable_target() {
        let m = model(0.03);
        let report = check_equilibrium(&m, &dynp(PI / 12.0), None).unwrap();
        assert!(report.verdict.is_certified());
        assert!(report.pdd_at_target > 0.0);
        assert!(report.tensions_at_target.both_positive());
        assert!(report.assumptions.iter().all(|a| a.passed));
        let cert = report.certified.unwrap();
        assert!(cert.contains(PI / 12.0));
    }

    #[test]
    fn verdict_not_certified_for_gap_geometry() {
        // Known window (1,2) excludes pi/12, so the verdict is decisive
        // even though segment (2,2) is undetermined.
        let m = MuscleModel::new(uncertifiable_geometry()).unwrap();
        let report = check_equilibrium(&m, &dynp(PI / 12.0), None).unwrap();
        match &report.verdict {
            Verdict::NotCertified(reasons) => {
                assert!(reasons.iter().any(|r| r.contains("(1,2)")), "{reasons:?}");
            }
            other => panic!("expected NotCertified, got {other:?}"),
        }
        assert!(report.certified.is_none());
        assert!(report.pdd_at_target < 0.0);
    }

    #[test]
    fn verdict_unknown_when_only_gap_blocks() {
        // Bench geometry with only d2 moved in: segment (2,1) lands in
        // the case gap while pi/12 passes the tension window and every
        // resolved curvature window.
        let p = SystemParams::from_millimeters(
            285.0, 110.0, 87.0, 5.0, 198.0, 15.0, 99.0, 99.0, 35.0, 35.0, 35.0, 35.0,
        )
        .unwrap();
        let m = MuscleModel::new(p).unwrap();
        let report = check_equilibrium(&m, &dynp(PI / 12.0), None).unwrap();
        match &report.verdict {
            Verdict::Unknown(gaps) => {
                assert!(gaps.iter().any(|g| g.contains("(2,1)")), "{gaps:?}");
            }
            other => panic!("expected Unknown, got {other:?}"),
        }
        assert!(report.certified.is_none());
        assert!(matches!(
            report.segment_windows[2],
            SegmentWindow::Unknown { .. }
        ));
    }

    #[test]
    fn boundary_target_not_certified() {
        let m = model(0.03);
        let theta0 = default_theta0(&m).unwrap();
        let report = check_equilibrium(&m, &dynp(-theta0), None).unwrap();
        match &report.verdict {
            Verdict::NotCertified(reasons) => {
                assert!(
                    reasons.iter().any(|r| r.contains("positive-tension window")),
                    "{reasons:?}"
                );
            }
            other => panic!("expected NotCertified, got {other:?}"),
        }
    }

    #[test]
    fn report_consistency_across_targets() {
        let m = model(0.03);
        let theta0 = default_theta0(&m).unwrap();
        let cert = certified_interval(&m, theta0).unwrap();
        for k in 0..200 {
            let theta_d = -0.6 + 1.8 * k as f64 / 200.0;
            let report = check_equilibrium(&m, &dynp(theta_d), None).unwrap();
            let inside = cert.contains(theta_d);
            assert_eq!(
                report.verdict.is_certified(),
                inside,
                "theta_d = {theta_d}"
            );
        }
    }

    #[test]
    fn scale_invariance_of_windows_and_verdict() {
        let base = model(1.0);
        let theta0 = default_theta0(&base).unwrap();
        let cert_base = certified_interval(&base, theta0).unwrap();
        for lambda in [0.1, 3.7, 42.0] {
            let scaled = model(lambda);
            for (a, b) in scaled.coeffs().iter().zip(base.coeffs()) {
                assert_relative_eq!(a.alpha, b.alpha, epsilon = 1e-12);
            }
            let cert = certified_interval(&scaled, theta0).unwrap();
            assert_relative_eq!(cert.lo, cert_base.lo, epsilon = 1e-9);
            assert_relative_eq!(cert.hi, cert_base.hi, epsilon = 1e-9);
            let r1 = check_equilibrium(&base, &dynp(PI / 12.0), None).unwrap();
            let r2 = check_equilibrium(&scaled, &dynp(PI / 12.0), None).unwrap();
            assert_eq!(r1.verdict.is_certified(), r2.verdict.is_certified());
        }
    }

    #[test]
    fn empty_interval_semantics() {
        let e = AngleInterval::new(0.5, 0.5);
        assert!(e.is_empty());
        assert!(!e.contains(0.5));
        let w = AngleInterval::new(0.0, 1.0).intersect(&AngleInterval::new(2.0, 3.0));
        assert!(w.is_empty());
        assert_eq!(format!("{e}"), "(empty)");
    }

    #[test]
    fn gamma_branches_populated_by_ratio() {
        let m = model(1.0);
        let g11 = segment_gammas(m.coeff(1, 1));
        assert!(g11.asin_b_over_rho.is_some() && g11.asin_rho_over_b.is_none());
        let g12 = segment_gammas(m.coeff(1, 2));
        assert!(g12.asin_b_over_rho.is_none() && g12.asin_rho_over_b.is_some());
        assert_relative_eq!(g12.asin_rho_over_b.unwrap(), PI / 6.0, epsilon = 1e-12);
        for g in [g11, g12] {
            for v in [g.asin_b_over_rho, g.asin_rho_over_b].into_iter().flatten() {
                assert!((0.0..=FRAC_PI_2).contains(&v));
            }
        }
    }
}
