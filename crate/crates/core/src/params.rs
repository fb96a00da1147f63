//! Parameter domain: the curvature relation that closes the generating-curve
//! ODE, normalization of a raw `a*k1 + b*k2 = c` relation into the canonical
//! `(m, n)` form with `n >= 0`, and the regime dispatch used by classification.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance used to collapse near-boundary parameters onto the
/// regime boundary. The ODE behaves structurally differently on the boundary,
/// so snapping beats silent misclassification.
pub const BOUNDARY_SNAP: f64 = 1e-12;

/// The curvature relation that closes the generating-curve system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WeingartenSpec {
    /// Constant Gauss curvature `K = k1*k2 - 1`.
    GaussConstant { k: f64 },
    /// Linear relation `k1 = m*k2 + n` with `m != 0` and `n >= 0` after
    /// normalization. `orientation_flipped` records that the original
    /// relation had `n < 0` and both curvatures were negated.
    LinearPrincipal {
        m: f64,
        n: f64,
        orientation_flipped: bool,
    },
    /// `k1` constant (the `b = 0` sub-case of the raw relation).
    Kappa1Constant { c1: f64 },
    /// `k2` constant (the `a = 0` sub-case of the raw relation).
    Kappa2Constant { c2: f64 },
}

impl WeingartenSpec {
    pub fn gauss(k: f64) -> Self {
        WeingartenSpec::GaussConstant { k }
    }

    /// Canonical linear spec, `n >= 0` assumed.
    pub fn linear(m: f64, n: f64) -> Self {
        WeingartenSpec::LinearPrincipal {
            m,
            n,
            orientation_flipped: false,
        }
    }

    /// Trivial relations carry no regime: umbilical `(m, n) = (1, 0)` and
    /// constant mean curvature `m = -1`.
    pub fn trivial_kind(&self) -> Option<TrivialKind> {
        match *self {
            WeingartenSpec::LinearPrincipal { m, n, .. } => {
                if rel_eq(m, -1.0) {
                    Some(TrivialKind::Cmc)
                } else if rel_eq(m, 1.0) && n.abs() <= BOUNDARY_SNAP {
                    Some(TrivialKind::Umbilic)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// Initial conditions of the generating curve. The paper fixes `x(0) = 0` by
/// a horizontal translation and `z(0) = 1` by a dilatation; only the starting
/// angle is free.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitialConditions {
    pub x0: f64,
    pub z0: f64,
    /// Starting angle in radians, normalized into `[0, 2*pi)`.
    pub theta0: f64,
}

impl InitialConditions {
    pub fn new(theta0: f64) -> Self {
        let mut t = theta0.rem_euclid(TAU);
        if t >= TAU {
            t = 0.0;
        }
        InitialConditions {
            x0: 0.0,
            z0: 1.0,
            theta0: t,
        }
    }

    pub fn horizontal() -> Self {
        InitialConditions::new(0.0)
    }
}

impl Default for InitialConditions {
    fn default() -> Self {
        InitialConditions::horizontal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TrivialKind {
    /// `(m, n) = (1, 0)`: umbilical surfaces.
    Umbilic,
    /// `m = -1`: constant mean curvature.
    Cmc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConstantPrincipal {
    Kappa1(f64),
    Kappa2(f64),
}

/// Result of normalizing a raw `a*k1 + b*k2 = c` relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NormalizedOutcome {
    Linear {
        m: f64,
        n: f64,
        orientation_flipped: bool,
    },
    Trivial(TrivialKind),
    ConstantPc(ConstantPrincipal),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParamError {
    #[error("degenerate relation: a = b = 0")]
    DegenerateRelation,
    #[error("trivial Weingarten relation (umbilic or CMC) has no regime")]
    TrivialSpec,
}

fn rel_eq(v: f64, target: f64) -> bool {
    (v - target).abs() <= BOUNDARY_SNAP * v.abs().max(target.abs()).max(1.0)
}

/// Snap `v` to zero when it is within `BOUNDARY_SNAP` (relative to `scale`).
fn snap_zero(v: f64, scale: f64) -> f64 {
    if v.abs() <= BOUNDARY_SNAP * scale.max(1.0) {
        0.0
    } else {
        v
    }
}

/// Normalize `a*k1 + b*k2 = c` into canonical form.
///
/// For `a != 0` this is `m = -b/a`, `n = |c/a|`; a negative `c/a` is absorbed
/// by a change of orientation on the surface (both curvatures negated), which
/// preserves `m` and negates `n`.
pub fn normalize_linear(a: f64, b: f64, c: f64) -> Result<NormalizedOutcome, ParamError> {
    if a == 0.0 && b == 0.0 {
        return Err(ParamError::DegenerateRelation);
    }
    if a == 0.0 {
        return Ok(NormalizedOutcome::ConstantPc(ConstantPrincipal::Kappa2(
            c / b,
        )));
    }
    if b == 0.0 {
        return Ok(NormalizedOutcome::ConstantPc(ConstantPrincipal::Kappa1(
            c / a,
        )));
    }
    let m = -b / a;
    let n_raw = c / a;
    if rel_eq(m, 1.0) && n_raw == 0.0 {
        return Ok(NormalizedOutcome::Trivial(TrivialKind::Umbilic));
    }
    if rel_eq(m, -1.0) {
        return Ok(NormalizedOutcome::Trivial(TrivialKind::Cmc));
    }
    // Signed zero counts as n = 0, not flipped.
    let orientation_flipped = n_raw < 0.0;
    Ok(NormalizedOutcome::Linear {
        m,
        n: n_raw.abs(),
        orientation_flipped,
    })
}

/// Qualitative regime of a parameter set, one label per valid input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    /// `K > 0`: convex arc with one minimum, vertical at both ends.
    KPositive,
    /// `K = 0`: horizontal straight line.
    Horosphere,
    /// `-1 < K < 0`: concave arc meeting the ideal boundary at an angle.
    KNegShallow,
    /// `K = -1`: half-circle orthogonal to the ideal boundary.
    KGeodesic,
    /// `K < -1`: concave arc, vertical at both ends.
    KNegSteep,
    /// `n + m - 1 > 0`, `m < n + 1`: translation-periodic curve.
    LwPeriodic,
    /// `n + m - 1 > 0`, `m >= n + 1`, `n > 0`: one minimum, self-intersecting.
    LwMinSelfInt,
    /// `n + m - 1 > 0`, `m >= n + 1`, `n = 0`: convex graph.
    LwConvexGraph,
    /// `n + m - 1 = 0`, starting angle zero: horosphere.
    LwHorosphere,
    /// `n + m - 1 = 0`, starting angle nonzero: asymptotic to the boundary.
    LwAsymptotic,
    /// `n + m - 1 < 0`: concave graph with a boundary contact angle.
    LwConcaveGraph,
    /// One principal curvature constant.
    ConstantPc,
}

/// Dispatch a normalized spec to its regime. `theta0` is reduced into
/// `[0, 2*pi)` before the split; it only matters on the `n + m - 1 = 0` line.
pub fn regime_of(spec: &WeingartenSpec, theta0: f64) -> Result<RegimeLabel, ParamError> {
    let theta0 = theta0.rem_euclid(TAU);
    match *spec {
        WeingartenSpec::GaussConstant { k } => {
            let k = snap_zero(k, k.abs());
            let kp1 = snap_zero(k + 1.0, k.abs());
            Ok(if k > 0.0 {
                RegimeLabel::KPositive
            } else if k == 0.0 {
                RegimeLabel::Horosphere
            } else if kp1 > 0.0 {
                RegimeLabel::KNegShallow
            } else if kp1 == 0.0 {
                RegimeLabel::KGeodesic
            } else {
                RegimeLabel::KNegSteep
            })
        }
        WeingartenSpec::LinearPrincipal { m, n, .. } => {
            if spec.trivial_kind().is_some() {
                return Err(ParamError::TrivialSpec);
            }
            let scale = m.abs().max(n.abs());
            let d = snap_zero(n + m - 1.0, scale);
            if d > 0.0 {
                let e = snap_zero(m - n - 1.0, scale);
                if e < 0.0 {
                    Ok(RegimeLabel::LwPeriodic)
                } else if n > 0.0 {
                    Ok(RegimeLabel::LwMinSelfInt)
                } else {
                    Ok(RegimeLabel::LwConvexGraph)
                }
            } else if d == 0.0 {
                if theta0 == 0.0 {
                    Ok(RegimeLabel::LwHorosphere)
                } else {
                    Ok(RegimeLabel::LwAsymptotic)
                }
            } else {
                Ok(RegimeLabel::LwConcaveGraph)
            }
        }
        WeingartenSpec::Kappa1Constant { .. } | WeingartenSpec::Kappa2Constant { .. } => {
            Ok(RegimeLabel::ConstantPc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn umbilic_relation_is_trivial() {
        assert_eq!(
            normalize_linear(1.0, -1.0, 0.0),
            Ok(NormalizedOutcome::Trivial(TrivialKind::Umbilic))
        );
    }

    #[test]
    fn cmc_relation_is_trivial() {
        assert_eq!(
            normalize_linear(2.0, 2.0, 1.0),
            Ok(NormalizedOutcome::Trivial(TrivialKind::Cmc))
        );
    }

    #[test]
    fn plain_linear_relation() {
        assert_eq!(
            normalize_linear(2.0, 4.0, 6.0),
            Ok(NormalizedOutcome::Linear {
                m: -2.0,
                n: 3.0,
                orientation_flipped: false
            })
        );
    }

    #[test]
    fn negative_offset_flips_orientation() {
        // Negating both curvatures in k1 = m*k2 + n preserves m and negates n.
        assert_eq!(
            normalize_linear(1.0, 2.0, -1.0),
            Ok(NormalizedOutcome::Linear {
                m: -2.0,
                n: 1.0,
                orientation_flipped: true
            })
        );
    }

    #[test]
    fn a_zero_gives_constant_kappa2() {
        assert_eq!(
            normalize_linear(0.0, 1.0, 0.5),
            Ok(NormalizedOutcome::ConstantPc(ConstantPrincipal::Kappa2(
                0.5
            )))
        );
    }

    #[test]
    fn b_zero_gives_constant_kappa1() {
        assert_eq!(
            normalize_linear(3.0, 0.0, 6.0),
            Ok(NormalizedOutcome::ConstantPc(ConstantPrincipal::Kappa1(
                2.0
            )))
        );
    }

    #[test]
    fn degenerate_relation_rejected() {
        assert_eq!(
            normalize_linear(0.0, 0.0, 1.0),
            Err(ParamError::DegenerateRelation)
        );
    }

    #[test]
    fn signed_zero_offset_is_not_flipped() {
        assert_eq!(
            normalize_linear(1.0, -2.0, -0.0),
            Ok(NormalizedOutcome::Linear {
                m: 2.0,
                n: 0.0,
                orientation_flipped: false
            })
        );
    }

    #[test]
    fn regime_examples() {
        assert_eq!(
            regime_of(&WeingartenSpec::gauss(1.0), 0.0),
            Ok(RegimeLabel::KPositive)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(1.0, 2.0), 0.0),
            Ok(RegimeLabel::LwPeriodic)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(-2.0, 3.0), PI / 2.0),
            Ok(RegimeLabel::LwAsymptotic)
        );
    }

    #[test]
    fn regime_covers_gauss_cases() {
        assert_eq!(
            regime_of(&WeingartenSpec::gauss(0.0), 0.0),
            Ok(RegimeLabel::Horosphere)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::gauss(-0.5), 0.0),
            Ok(RegimeLabel::KNegShallow)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::gauss(-1.0), 0.0),
            Ok(RegimeLabel::KGeodesic)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::gauss(-2.0), 0.0),
            Ok(RegimeLabel::KNegSteep)
        );
    }

    #[test]
    fn regime_covers_linear_cases() {
        assert_eq!(
            regime_of(&WeingartenSpec::linear(3.0, 1.0), 0.0),
            Ok(RegimeLabel::LwMinSelfInt)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(2.0, 0.0), 0.0),
            Ok(RegimeLabel::LwConvexGraph)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(0.5, 0.5), 0.0),
            Ok(RegimeLabel::LwHorosphere)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(-2.0, 1.0), 0.0),
            Ok(RegimeLabel::LwConcaveGraph)
        );
        assert_eq!(
            regime_of(&WeingartenSpec::linear(-1.0, 1.0), 0.0),
            Err(ParamError::TrivialSpec)
        );
    }

    #[test]
    fn near_boundary_snaps_onto_horosphere_line() {
        // n + m - 1 within 1e-12 of zero classifies as the = 0 case.
        let spec = WeingartenSpec::linear(0.5, 0.5 + 1e-13);
        assert_eq!(regime_of(&spec, 0.0), Ok(RegimeLabel::LwHorosphere));
    }

    #[test]
    fn theta0_reduced_before_dispatch() {
        let spec = WeingartenSpec::linear(-2.0, 3.0);
        assert_eq!(regime_of(&spec, TAU), Ok(RegimeLabel::LwHorosphere));
        assert_eq!(regime_of(&spec, -PI), Ok(RegimeLabel::LwAsymptotic));
    }
}
