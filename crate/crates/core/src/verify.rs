//! Independent numeric oracles: finite differences, potential grid
//! scans, and curvature-sign cross-validation of the certified windows.
//!
//! Nothing here calls the analytic derivative it is checking to produce
//! its reference value; the references come from function values alone.

use std::fmt;

use crate::dynamics::{potential, InternalForce};
use crate::geometry::MuscleModel;
use crate::stability::{segment_windows, AngleInterval, SegmentWindow};

/// Step for first-order central differences.
pub const FD_STEP_FIRST: f64 = 1e-6;
/// Step for second-order central differences. Larger than the
/// first-order step: the second difference divides rounding noise by
/// `h^2`, so `h ~ eps^(1/4)` balances truncation against roundoff.
pub const FD_STEP_SECOND: f64 = 1e-4;
/// Default grid resolution for scans and window cross-validation.
pub const DEFAULT_GRID_N: usize = 4096;

/// Oracle settings shared by the cross-checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub fd_step: f64,
    pub fd_step_second: f64,
    pub grid_n: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            fd_step: FD_STEP_FIRST,
            fd_step_second: FD_STEP_SECOND,
            grid_n: DEFAULT_GRID_N,
        }
    }
}

/// Which derivative a central stencil approximates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdOrder {
    First,
    Second,
}

/// Central finite difference of `f` at `x`.
pub fn fd_derivative<F: Fn(f64) -> f64>(f: F, x: f64, h: f64, order: FdOrder) -> f64 {
    assert!(h > 0.0, "step must be positive");
    match order {
        FdOrder::First => (f(x + h) - f(x - h)) / (2.0 * h),
        FdOrder::Second => (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h),
    }
}

/// Result of a uniform grid scan of the control potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialScan {
    /// Grid point with the smallest potential.
    pub argmin: f64,
    pub min: f64,
    /// Grid spacing.
    pub cell: f64,
    /// Whether the grid node nearest the target is strictly below both
    /// neighbours.
    pub strict_local_min_at_target: bool,
}

/// Scans `P` on `n` uniform samples of `[lo, hi]` and classifies the
/// target node.
pub fn scan_potential(
    model: &MuscleModel,
    theta_d: f64,
    force: &InternalForce,
    lo: f64,
    hi: f64,
    n: usize,
) -> PotentialScan {
    assert!(n >= 16, "grid too coarse");
    assert!(hi > lo, "empty scan range");
    scan_min(|theta| potential(model, theta, theta_d, force), theta_d, lo, hi, n)
}

fn scan_min<F: Fn(f64) -> f64>(f: F, target: f64, lo: f64, hi: f64, n: usize) -> PotentialScan {
    let cell = (hi - lo) / (n - 1) as f64;
    let mut argmin = lo;
    let mut min = f64::INFINITY;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let x = lo + cell * k as f64;
        let v = f(x);
        values.push(v);
        if v < min {
            min = v;
            argmin = x;
        }
    }
    let near = ((target - lo) / cell).round() as isize;
    let strict = near >= 1
        && (near as usize) < n - 1
        && values[near as usize] < values[near as usize - 1]
        && values[near as usize] < values[near as usize + 1];
    PotentialScan {
        argmin,
        min,
        cell,
        strict_local_min_at_target: strict,
    }
}

/// Dense-grid verification of one claimed curvature window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowCheck {
    pub muscle: u8,
    pub segment: u8,
    /// The claimed window; absent when the window is undetermined (the
    /// check then passes vacuously).
    pub window: Option<AngleInterval>,
    /// In-window samples whose analytic curvature was verified positive.
    pub samples: usize,
    /// First angle above the window where the curvature is non-positive,
    /// probed informationally over the rest of the domain.
    pub sign_change_above: Option<f64>,
    /// Likewise below the window.
    pub sign_change_below: Option<f64>,
}

/// A claimed window contained a sample with non-positive curvature.
/// By construction of the windows this must never fire.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SoundnessError {
    pub muscle: u8,
    pub segment: u8,
    pub theta: f64,
    pub curvature: f64,
}

impl fmt::Display for SoundnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "curvature soundness violated in segment ({},{}): f''({:.12}) = {:.6e} <= 0 \
             inside the claimed window",
            self.muscle, self.segment, self.theta, self.curvature
        )
    }
}

impl std::error::Error for SoundnessError {}

/// Cross-validation outcome for all four windows at one margin.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowCrossValidation {
    pub theta0: f64,
    pub grid_n: usize,
    pub checks: Vec<WindowCheck>,
}

/// Samples every resolved window densely and asserts the analytic
/// curvature is positive at each sample; also probes outside each
/// window (reported, not asserted) for the nearest sign change.
///
/// Grids cover the open window shrunk by one cell at each end, honoring
/// the strict inequalities of the window derivation.
pub fn cross_validate_windows(
    model: &MuscleModel,
    theta0: f64,
    grid_n: usize,
) -> Result<WindowCrossValidation, SoundnessError> {
    assert!(grid_n >= 16, "grid too coarse");
    let windows = segment_windows(model, theta0);
    let mut checks = Vec::with_capacity(4);
    for (sw, coeffs) in windows.iter().zip(model.coeffs()) {
        let window = match sw {
            SegmentWindow::Known(w) if !w.is_empty() => *w,
            SegmentWindow::Known(_) | SegmentWindow::Unknown { .. } => {
                checks.push(WindowCheck {
                    muscle: coeffs.muscle,
                    segment: coeffs.segment,
                    window: sw.known().copied(),
                    samples: 0,
                    sign_change_above: None,
                    sign_change_below: None,
                });
                continue;
            }
        };
        let cell = (window.hi - window.lo) / grid_n as f64;
        let mut samples = 0;
        for k in 0..=grid_n {
            let theta = (window.lo + cell) + (window.hi - window.lo - 2.0 * cell) * k as f64
                / grid_n as f64;
            let d2 = coeffs.length_d2(theta);
            if d2 <= 0.0 {
                return Err(SoundnessError {
                    muscle: coeffs.muscle,
                    segment: coeffs.segment,
                    theta,
                    curvature: d2,
                });
            }
            samples += 1;
        }
        let probe = |from: f64, to: f64| -> Option<f64> {
            if (to - from).abs() < cell.abs() {
                return None;
            }
            let steps = 256;
            let h = (to - from) / steps as f64;
            (0..=steps)
                .map(|k| from + h * k as f64)
                .find(|&theta| coeffs.length_d2(theta) <= 0.0)
        };
        checks.push(WindowCheck {
            muscle: coeffs.muscle,
            segment: coeffs.segment,
            window: Some(window),
            samples,
            sign_change_above: probe(window.hi, std::f64::consts::PI),
            sign_change_below: probe(window.lo, -theta0),
        });
    }
    Ok(WindowCrossValidation {
        theta0,
        grid_n,
        checks,
    })
}
