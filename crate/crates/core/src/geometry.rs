//! Cable routing geometry: segment lengths in closed form and their
//! analytic derivatives.
//!
//! Each of the two cables runs from an anchor point on the fixed base,
//! over a routing pulley carried by a virtual link that rotates at half
//! the joint angle, to an attachment on the moving link. Both straight
//! segments of both cables reduce to one canonical length expression
//!
//! ```text
//! f(theta) = sqrt(a^2 + b^2 + c^2 + 2 b rho sin(theta/2 + alpha)),
//! rho = sqrt(a^2 + c^2),  sin(alpha) = c/rho,  cos(alpha) = a/rho,
//! ```
//!
//! with per-segment constants `(a, b, c)` assembled from the frame
//! lengths. Everything downstream (torque, potential, stability windows)
//! is computed from `(a, b, c, alpha, rho)` alone.

use std::f64::consts::TAU;

use crate::error::ModelError;

/// Relative tolerance below which `sqrt(a^2+c^2)` and `|b|` are treated
/// as equal and the segment is rejected as degenerate.
pub const DEGENERACY_REL_TOL: f64 = 1e-12;

/// Frame and routing lengths, in meters.
///
/// `b1`/`b2` locate the cable anchors along the base measured from its
/// far end; they may be zero or negative (anchor beyond the base end)
/// but must stay strictly below `l0` so that the along-base coefficient
/// of segment (1,1) is positive and of (2,1) negative. Every other
/// field is a strictly positive length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Base length.
    pub l0: f64,
    /// Moving-link length.
    pub l1: f64,
    /// Anchor offset of cable 1 along the base.
    pub b1: f64,
    /// Anchor offset of cable 2 along the base.
    pub b2: f64,
    /// Perpendicular offset of the cable-1 anchor.
    pub d1: f64,
    /// Perpendicular offset of the cable-2 anchor.
    pub d2: f64,
    /// Virtual-link length carrying the cable-1 routing pulley.
    pub ell1: f64,
    /// Virtual-link length carrying the cable-2 routing pulley.
    pub ell2: f64,
    /// Along-link offset of the cable-1 tip attachment.
    pub r1: f64,
    /// Along-link offset of the cable-2 tip attachment.
    pub r2: f64,
    /// Perpendicular offset of the cable-1 tip attachment.
    pub s1: f64,
    /// Perpendicular offset of the cable-2 tip attachment.
    pub s2: f64,
}

impl SystemParams {
    /// Builds params from millimeter inputs (the unit used by bench
    /// configurations); all internal computation is in meters.
    #[allow(clippy::too_many_arguments)]
    pub fn from_millimeters(
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
    ) -> Result<Self, ModelError> {
        let p = SystemParams {
            l0: l0 / 1000.0,
            l1: l1 / 1000.0,
            b1: b1 / 1000.0,
            b2: b2 / 1000.0,
            d1: d1 / 1000.0,
            d2: d2 / 1000.0,
            ell1: ell1 / 1000.0,
            ell2: ell2 / 1000.0,
            r1: r1 / 1000.0,
            r2: r2 / 1000.0,
            s1: s1 / 1000.0,
            s2: s2 / 1000.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Checks the length-sign invariants.
    pub fn validate(&self) -> Result<(), ModelError> {
        let positive = [
            ("L0", self.l0),
            ("L1", self.l1),
            ("d1", self.d1),
            ("d2", self.d2),
            ("ell1", self.ell1),
            ("ell2", self.ell2),
            ("r1", self.r1),
            ("r2", self.r2),
            ("s1", self.s1),
            ("s2", self.s2),
        ];
        for (name, value) in positive {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
            if value <= 0.0 {
                return Err(ModelError::NonPositiveLength { name, value });
            }
        }
        for (name, value) in [("b1", self.b1), ("b2", self.b2)] {
            if !value.is_finite() {
                return Err(ModelError::NonFinite { name });
            }
            if value >= self.l0 {
                return Err(ModelError::AnchorBeyondBase {
                    name,
                    value,
                    base: self.l0,
                });
            }
        }
        Ok(())
    }
}

/// Canonical constants of one straight cable segment.
///
/// Invariants enforced at construction: `b < 0`, `c > 0`, `a > 0` for
/// cable 1 and `a < 0` for cable 2, and `rho != |b|` (pulley and
/// neighbouring routing point never coincide).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Phase angle in `[0, 2pi)` with `sin(alpha) = c/rho`, `cos(alpha) = a/rho`.
    pub alpha: f64,
    /// `sqrt(a^2 + c^2)`.
    pub rho: f64,
    /// Cable index, 1 or 2.
    pub muscle: u8,
    /// Segment index along the cable, 1 (base-to-pulley) or 2 (pulley-to-tip).
    pub segment: u8,
}

/// Phase angle of the direction `(a, c)`, mapped into `[0, 2pi)`.
pub fn compute_alpha(a: f64, c: f64) -> Result<f64, ModelError> {
    if a == 0.0 && c == 0.0 {
        return Err(ModelError::DegenerateDirection);
    }
    let alpha = c.atan2(a);
    Ok(if alpha < 0.0 { alpha + TAU } else { alpha })
}

impl SegmentCoeffs {
    /// Builds and validates the coefficients of segment `(muscle, segment)`.
    pub fn new(a: f64, b: f64, c: f64, muscle: u8, segment: u8) -> Result<Self, ModelError> {
        if b >= 0.0 {
            return Err(ModelError::CoefficientSign {
                what: "b",
                muscle,
                segment,
                value: b,
            });
        }
        if c <= 0.0 {
            return Err(ModelError::CoefficientSign {
                what: "c",
                muscle,
                segment,
                value: c,
            });
        }
        match muscle {
            1 if a <= 0.0 => {
                return Err(ModelError::CoefficientSign {
                    what: "a",
                    muscle,
                    segment,
                    value: a,
                })
            }
            2 if a >= 0.0 => {
                return Err(ModelError::CoefficientSign {
                    what: "a",
                    muscle,
                    segment,
                    value: a,
                })
            }
            _ => {}
        }
        let rho = a.hypot(c);
        let b_abs = b.abs();
        if (rho - b_abs).abs() <= DEGENERACY_REL_TOL * rho.max(b_abs) {
            return Err(ModelError::SegmentDegenerate {
                muscle,
                segment,
                rho,
                b_abs,
            });
        }
        let alpha = compute_alpha(a, c)?;
        debug_assert!((alpha.sin() * rho - c).abs() <= 1e-12 * rho);
        debug_assert!((alpha.cos() * rho - a).abs() <= 1e-12 * rho);
        Ok(SegmentCoeffs {
            a,
            b,
            c,
            alpha,
            rho,
            muscle,
            segment,
        })
    }

    /// Segment length `f(theta)` via the canonical expression.
    ///
    /// Positive for every `theta`: the radicand is bounded below by
    /// `(rho - |b|)^2 > 0`.
    pub fn length(&self, theta: f64) -> f64 {
        debug_assert!(theta.is_finite());
        let s = (theta / 2.0 + self.alpha).sin();
        (self.a * self.a + self.b * self.b + self.c * self.c + 2.0 * self.b * self.rho * s).sqrt()
    }

    /// First derivative `f'(theta) = (b rho / 2) cos(theta/2 + alpha) / f(theta)`.
    pub fn length_d1(&self, theta: f64) -> f64 {
        debug_assert!(theta.is_finite());
        let cos = (theta / 2.0 + self.alpha).cos();
        self.b * self.rho / 2.0 * cos / self.length(theta)
    }

    /// Second derivative
    /// `f''(theta) = -(b rho / 4) f^-3 (A sin^2 + B sin + A)` with
    /// `A = b rho`, `B = a^2 + b^2 + c^2` and `sin = sin(theta/2 + alpha)`.
    ///
    /// Its sign is the sign of the quadratic `A s^2 + B s + A`, whose
    /// roots are `|b|/rho` and `rho/|b|`; `f'' > 0` exactly where
    /// `sin(theta/2 + alpha)` exceeds the smaller root.
    pub fn length_d2(&self, theta: f64) -> f64 {
        debug_assert!(theta.is_finite());
        let s = (theta / 2.0 + self.alpha).sin();
        let big_a = self.b * self.rho;
        let big_b = self.a * self.a + self.b * self.b + self.c * self.c;
        let f = self.length(theta);
        -(big_a / 4.0) * (big_a * s * s + big_b * s + big_a) / (f * f * f)
    }
}

/// Derives the four segment coefficient sets from the frame lengths:
///
/// ```text
/// (1,1): a = L0 - b1,    b = -ell1, c = d1
/// (1,2): a = r1,         b = -ell1, c = s1
/// (2,1): a = -(L0 - b2), b = -ell2, c = d2
/// (2,2): a = -r2,        b = -ell2, c = s2
/// ```
pub fn derive_coeffs(params: &SystemParams) -> Result<[SegmentCoeffs; 4], ModelError> {
    params.validate()?;
    Ok([
        SegmentCoeffs::new(params.l0 - params.b1, -params.ell1, params.d1, 1, 1)?,
        SegmentCoeffs::new(params.r1, -params.ell1, params.s1, 1, 2)?,
        SegmentCoeffs::new(-(params.l0 - params.b2), -params.ell2, params.d2, 2, 1)?,
        SegmentCoeffs::new(-params.r2, -params.ell2, params.s2, 2, 2)?,
    ])
}

/// Segment length evaluated from the raw planar coordinates of the two
/// endpoints, before any canonical rewriting. Used as the independent
/// cross-check of [`SegmentCoeffs::length`].
pub fn raw_segment_length(params: &SystemParams, muscle: u8, segment: u8, theta: f64) -> f64 {
    let h = theta / 2.0;
    match (muscle, segment) {
        (1, 1) => {
            let x = params.l0 - params.b1 - params.ell1 * h.sin();
            let y = params.d1 - params.ell1 * h.cos();
            x.hypot(y)
        }
        (1, 2) => {
            let x = params.r1 - params.ell1 * h.sin();
            let y = params.s1 - params.ell1 * h.cos();
            x.hypot(y)
        }
        (2, 1) => {
            // Pulley angle measured on the other side of the joint.
            let phi = std::f64::consts::PI + (std::f64::consts::PI + theta) / 2.0;
            let x = params.l0 - params.b2 + params.ell2 * phi.cos();
            let y = params.d2 + params.ell2 * phi.sin();
            x.hypot(y)
        }
        (2, 2) => {
            let phi = (std::f64::consts::PI - theta) / 2.0;
            let x = params.r2 + params.ell2 * phi.cos();
            let y = params.s2 - params.ell2 * phi.sin();
            x.hypot(y)
        }
        _ => panic!("segment index out of range: ({muscle},{segment})"),
    }
}

/// Validated model: frame lengths plus the four canonical segments.
#[derive(Debug, Clone, PartialEq)]
pub struct MuscleModel {
    params: SystemParams,
    coeffs: [SegmentCoeffs; 4],
}

impl MuscleModel {
    pub fn new(params: SystemParams) -> Result<Self, ModelError> {
        let coeffs = derive_coeffs(&params)?;
        Ok(MuscleModel { params, coeffs })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// The four segments in order (1,1), (1,2), (2,1), (2,2).
    pub fn coeffs(&self) -> &[SegmentCoeffs; 4] {
        &self.coeffs
    }

    /// Coefficients of segment `(muscle, segment)`, both 1-based.
    pub fn coeff(&self, muscle: u8, segment: u8) -> &SegmentCoeffs {
        assert!(
            (1..=2).contains(&muscle) && (1..=2).contains(&segment),
            "segment index out of range: ({muscle},{segment})"
        );
        &self.coeffs[(2 * (muscle - 1) + (segment - 1)) as usize]
    }

    /// Total cable length `q_i(theta)`, the sum of the two segments.
    pub fn muscle_length(&self, muscle: u8, theta: f64) -> f64 {
        self.coeff(muscle, 1).length(theta) + self.coeff(muscle, 2).length(theta)
    }

    /// Cable-length Jacobian `(dq1/dtheta, dq2/dtheta)`.
    pub fn muscle_jacobian(&self, theta: f64) -> [f64; 2] {
        [
            self.coeff(1, 1).length_d1(theta) + self.coeff(1, 2).length_d1(theta),
            self.coeff(2, 1).length_d1(theta) + self.coeff(2, 2).length_d1(theta),
        ]
    }

    /// Sum of segment curvatures `d2 q_i / dtheta^2`.
    pub fn muscle_length_d2(&self, muscle: u8, theta: f64) -> f64 {
        self.coeff(muscle, 1).length_d2(theta) + self.coeff(muscle, 2).length_d2(theta)
    }
}

/// Geometry family certifiable around small positive targets:
/// relations (L0-b1, d1) = 2k, ell = k, r = s = k/(2 sqrt 2),
/// (L0-b2, d2) = 2 sqrt(2) k. Shared by tests across the crate.
#[cfg(test)]
pub(crate) fn stable_geometry(kappa: f64) -> SystemParams {
    let l0 = 4.0 * kappa;
    SystemParams {
        l0,
        l1: kappa,
        b1: l0 - 2.0 * kappa,
        b2: l0 - 2.0 * 2f64.sqrt() * kappa,
        d1: 2.0 * kappa,
        d2: 2.0 * 2f64.sqrt() * kappa,
        ell1: kappa,
        ell2: kappa,
        r1: kappa / (2.0 * 2f64.sqrt()),
        r2: kappa / (2.0 * 2f64.sqrt()),
        s1: kappa / (2.0 * 2f64.sqrt()),
        s2: kappa / (2.0 * 2f64.sqrt()),
    }
}
