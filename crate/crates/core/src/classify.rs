//! A-priori classification of a parameter set — qualitative regime features
//! plus quantitative predictions — and its verification against the measured
//! features of a traced curve.

use serde::{Deserialize, Serialize};

use crate::analysis::{
    self, contact_angle, extrema, features, first_integral_residual, integral_identity_residual,
    measured_height, period_pair, symmetry_deviation, unit_speed_residual, weingarten_residual,
    End,
};
use crate::closedform;
use crate::odetrace::{derivative, GeneratingCurve, TerminationReason};
use crate::params::{regime_of, ParamError, RegimeLabel, WeingartenSpec};

/// Verification tolerances, pinned once.
pub mod tolerances {
    pub const FIRST_INTEGRAL: f64 = 1e-8;
    pub const WEINGARTEN: f64 = 1e-8;
    pub const INTEGRAL_IDENTITY: f64 = 1e-6;
    pub const UNIT_SPEED: f64 = 1e-6;
    pub const SYMMETRY: f64 = 1e-6;
    pub const HEIGHT: f64 = 1e-6;
    pub const CONTACT_ANGLE: f64 = 1e-3;
    /// Curvature of z'' below which a trace counts as flat.
    pub const CONVEXITY_EPS: f64 = 1e-9;
    /// Height below which an end counts as asymptotic to the boundary.
    pub const ASYMPTOTIC_Z: f64 = 1e-3;
    /// |sin theta| bound at an asymptotic end (tangential, not transverse).
    pub const ASYMPTOTIC_SIN: f64 = 0.1;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convexity {
    Convex,
    Concave,
    Flat,
    Mixed,
}

/// Qualitative features a regime's theorem asserts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictedFeatures {
    pub is_graph: bool,
    pub convexity: Convexity,
    /// Counts are per period for the periodic regime, totals elsewhere.
    pub num_minima: usize,
    pub num_maxima: usize,
    pub has_self_intersections: bool,
    pub periodic: bool,
    pub complete_proxy: bool,
    pub asymptotic_to_boundary: bool,
}

/// Quantitative predictions where the theorems give formulas. `height` is the
/// value derived from the endpoint height via `log(z_max/z_min)`;
/// `height_printed` is the formula as printed in the source theorems. The two
/// disagree for `K < -1` and both are carried.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantitativePredictions {
    pub height: Option<f64>,
    pub height_printed: Option<f64>,
    pub contact_angle: Option<f64>,
    pub boundary_angle: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub regime: RegimeLabel,
    pub predicted: PredictedFeatures,
    pub quantitative: QuantitativePredictions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mismatch {
    pub feature: String,
    pub predicted: String,
    pub measured: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub first_integral: Option<f64>,
    pub weingarten: f64,
    pub integral_identity: Option<f64>,
    pub unit_speed: f64,
    pub symmetry_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
    pub residuals: ResidualSummary,
    pub notes: Vec<String>,
}

fn q_none() -> QuantitativePredictions {
    QuantitativePredictions {
        height: None,
        height_printed: None,
        contact_angle: None,
        boundary_angle: None,
    }
}

/// Fill the classification report for a parameter set from the regime table.
/// The feature table encodes the theorems for a horizontal start; the
/// starting angle matters only on the `n + m - 1 = 0` line.
pub fn predict(spec: &WeingartenSpec, theta0: f64) -> Result<ClassificationReport, ParamError> {
    let regime = regime_of(spec, theta0)?;
    let horosphere = PredictedFeatures {
        is_graph: true,
        convexity: Convexity::Flat,
        num_minima: 0,
        num_maxima: 0,
        has_self_intersections: false,
        periodic: false,
        complete_proxy: true,
        asymptotic_to_boundary: false,
    };
    let (predicted, quantitative) = match regime {
        RegimeLabel::KPositive => {
            let k = match *spec {
                WeingartenSpec::GaussConstant { k } => k,
                _ => unreachable!(),
            };
            let h = closedform::height_exact(k).expect("defined for K > 0");
            (
                PredictedFeatures {
                    is_graph: true,
                    convexity: Convexity::Convex,
                    num_minima: 1,
                    num_maxima: 0,
                    has_self_intersections: false,
                    periodic: false,
                    complete_proxy: false,
                    asymptotic_to_boundary: false,
                },
                QuantitativePredictions {
                    height: Some(h.derived_log_ratio),
                    height_printed: Some(h.paper_formula),
                    contact_angle: None,
                    boundary_angle: None,
                },
            )
        }
        RegimeLabel::Horosphere | RegimeLabel::LwHorosphere => (
            horosphere,
            QuantitativePredictions {
                height: Some(0.0),
                height_printed: Some(0.0),
                contact_angle: None,
                boundary_angle: None,
            },
        ),
        RegimeLabel::KNegShallow | RegimeLabel::KGeodesic => {
            let k = match *spec {
                WeingartenSpec::GaussConstant { k } => k,
                _ => unreachable!(),
            };
            let angle = closedform::boundary_angle(k).expect("defined for -1 <= K < 0");
            (
                PredictedFeatures {
                    is_graph: true,
                    convexity: Convexity::Concave,
                    num_minima: 0,
                    num_maxima: 1,
                    has_self_intersections: false,
                    periodic: false,
                    // The boundary contact is an ideal endpoint, not an edge.
                    complete_proxy: true,
                    asymptotic_to_boundary: false,
                },
                QuantitativePredictions {
                    height: None,
                    height_printed: None,
                    contact_angle: Some(angle),
                    boundary_angle: Some(angle),
                },
            )
        }
        RegimeLabel::KNegSteep => {
            let k = match *spec {
                WeingartenSpec::GaussConstant { k } => k,
                _ => unreachable!(),
            };
            let h = closedform::height_exact(k).expect("defined for K < -1");
            (
                PredictedFeatures {
                    is_graph: true,
                    convexity: Convexity::Concave,
                    num_minima: 0,
                    num_maxima: 1,
                    has_self_intersections: false,
                    periodic: false,
                    complete_proxy: false,
                    asymptotic_to_boundary: false,
                },
                QuantitativePredictions {
                    height: Some(h.derived_log_ratio),
                    height_printed: Some(h.paper_formula),
                    contact_angle: None,
                    boundary_angle: None,
                },
            )
        }
        RegimeLabel::LwPeriodic => (
            PredictedFeatures {
                is_graph: false,
                convexity: Convexity::Mixed,
                num_minima: 1,
                num_maxima: 1,
                has_self_intersections: true,
                periodic: true,
                complete_proxy: true,
                asymptotic_to_boundary: false,
            },
            q_none(),
        ),
        RegimeLabel::LwMinSelfInt => (
            PredictedFeatures {
                is_graph: false,
                convexity: Convexity::Mixed,
                num_minima: 1,
                num_maxima: 0,
                has_self_intersections: true,
                periodic: false,
                complete_proxy: true,
                asymptotic_to_boundary: false,
            },
            q_none(),
        ),
        RegimeLabel::LwConvexGraph => (
            PredictedFeatures {
                is_graph: true,
                convexity: Convexity::Convex,
                num_minima: 1,
                num_maxima: 0,
                has_self_intersections: false,
                periodic: false,
                complete_proxy: true,
                asymptotic_to_boundary: false,
            },
            q_none(),
        ),
        RegimeLabel::LwAsymptotic => (
            PredictedFeatures {
                is_graph: false,
                convexity: Convexity::Mixed,
                num_minima: 0,
                num_maxima: 1,
                has_self_intersections: true,
                periodic: false,
                // Height decays like 1/s^2, so the trace runs to the
                // arc-length cap in both directions.
                complete_proxy: true,
                asymptotic_to_boundary: true,
            },
            q_none(),
        ),
        RegimeLabel::LwConcaveGraph => {
            let (m, n) = match *spec {
                WeingartenSpec::LinearPrincipal { m, n, .. } => (m, n),
                _ => unreachable!(),
            };
            let angle = (-n / (m - 1.0)).clamp(-1.0, 1.0).acos();
            (
                PredictedFeatures {
                    is_graph: true,
                    convexity: Convexity::Concave,
                    num_minima: 0,
                    num_maxima: 1,
                    has_self_intersections: false,
                    periodic: false,
                    complete_proxy: false,
                    asymptotic_to_boundary: false,
                },
                QuantitativePredictions {
                    height: None,
                    height_printed: None,
                    contact_angle: Some(angle),
                    boundary_angle: None,
                },
            )
        }
        // Totally geodesic planes, equidistant surfaces, horospheres and
        // horizontal right-cylinders: reported without a trace.
        RegimeLabel::ConstantPc => (horosphere, q_none()),
    };
    Ok(ClassificationReport {
        regime,
        predicted,
        quantitative,
    })
}

fn measured_convexity(curve: &GeneratingCurve) -> Convexity {
    let mut has_pos = false;
    let mut has_neg = false;
    for p in &curve.samples {
        let Ok((_, _, dtheta)) = derivative(&curve.spec, p) else {
            continue;
        };
        let zpp = dtheta * p.theta.cos();
        if zpp > tolerances::CONVEXITY_EPS {
            has_pos = true;
        } else if zpp < -tolerances::CONVEXITY_EPS {
            has_neg = true;
        }
    }
    match (has_pos, has_neg) {
        (true, true) => Convexity::Mixed,
        (true, false) => Convexity::Convex,
        (false, true) => Convexity::Concave,
        (false, false) => Convexity::Flat,
    }
}

/// Complete-surface proxy, measured: the trace runs to the arc-length cap in
/// both directions, or both ends contact the boundary satisfying the
/// `-1 <= K < 0` angle law `sin theta_1 = sqrt(-K)` within the angle
/// tolerance.
fn measured_complete_proxy(curve: &GeneratingCurve) -> bool {
    let both_max = matches!(curve.left_end, TerminationReason::MaxArcLength)
        && matches!(curve.right_end, TerminationReason::MaxArcLength);
    if both_max {
        return true;
    }
    let WeingartenSpec::GaussConstant { k } = curve.spec else {
        return false;
    };
    if !(-1.0..0.0).contains(&k) {
        return false;
    }
    let law = closedform::boundary_angle(k).expect("range checked");
    [End::Left, End::Right].into_iter().all(|end| {
        let term = match end {
            End::Left => &curve.left_end,
            End::Right => &curve.right_end,
        };
        matches!(term, TerminationReason::BoundaryContact { .. })
            && contact_angle(curve, end)
                .map(|a| (a - law).abs() <= tolerances::CONTACT_ANGLE)
                .unwrap_or(false)
    })
}

fn measured_asymptotic(curve: &GeneratingCurve) -> bool {
    [curve.first(), curve.last()].into_iter().all(|p| {
        p.z < tolerances::ASYMPTOTIC_Z && p.theta.sin().abs() < tolerances::ASYMPTOTIC_SIN
    })
}

/// Count extrema inside the first period window `s in [0, s_period)` of a
/// periodic trace, where `s_period` is the arc length of one full
/// theta-revolution.
fn per_period_extrema(
    curve: &GeneratingCurve,
    minima: &[f64],
    maxima: &[f64],
) -> Option<(usize, usize)> {
    // First theta-revolution end: bisect theta = theta0 + 2 pi.
    let target = curve.ic.theta0 + std::f64::consts::TAU;
    let mut s_period = None;
    let mut prev: Option<&crate::odetrace::CurveState> = None;
    for p in curve.samples.iter().filter(|p| p.s >= 0.0) {
        if let Some(a) = prev {
            if (a.theta - target) * (p.theta - target) <= 0.0 && a.theta != p.theta {
                let increasing = p.theta > a.theta;
                let (mut lo, mut hi) = (a.s, p.s);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    let th = curve.state_at(mid).map(|st| st.theta).unwrap_or(target);
                    if (th < target) == increasing {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                s_period = Some(0.5 * (lo + hi));
                break;
            }
        }
        prev = Some(p);
    }
    let sp = s_period?;
    let count = |list: &[f64]| list.iter().filter(|&&s| (0.0..sp - 1e-9).contains(&s)).count();
    Some((count(minima), count(maxima)))
}

fn push_bool(mis: &mut Vec<Mismatch>, feature: &str, predicted: bool, measured: bool) {
    if predicted != measured {
        mis.push(Mismatch {
            feature: feature.to_string(),
            predicted: predicted.to_string(),
            measured: measured.to_string(),
        });
    }
}

fn push_count(mis: &mut Vec<Mismatch>, feature: &str, predicted: usize, measured: usize) {
    if predicted != measured {
        mis.push(Mismatch {
            feature: feature.to_string(),
            predicted: predicted.to_string(),
            measured: measured.to_string(),
        });
    }
}

fn push_value(mis: &mut Vec<Mismatch>, feature: &str, predicted: f64, measured: f64, tol: f64) {
    if (predicted - measured).abs() > tol {
        mis.push(Mismatch {
            feature: feature.to_string(),
            predicted: format!("{predicted:.9}"),
            measured: format!("{measured:.9}"),
        });
    }
}

/// Compare a report against the measured features and residuals of a trace.
/// Failures are data, not errors.
pub fn verify(
    spec: &WeingartenSpec,
    curve: &GeneratingCurve,
    report: &ClassificationReport,
) -> VerificationOutcome {
    let feats = features(curve);
    let mut mismatches = Vec::new();
    let mut notes = Vec::new();

    push_bool(
        &mut mismatches,
        "is_graph",
        report.predicted.is_graph,
        feats.is_graph_over_boundary,
    );
    push_bool(
        &mut mismatches,
        "has_self_intersections",
        report.predicted.has_self_intersections,
        !feats.self_intersections.is_empty(),
    );
    push_bool(
        &mut mismatches,
        "periodic",
        report.predicted.periodic,
        feats.period_x.is_some(),
    );
    push_bool(
        &mut mismatches,
        "complete_proxy",
        report.predicted.complete_proxy,
        measured_complete_proxy(curve),
    );
    push_bool(
        &mut mismatches,
        "asymptotic_to_boundary",
        report.predicted.asymptotic_to_boundary,
        measured_asymptotic(curve),
    );

    let measured_conv = measured_convexity(curve);
    if report.predicted.convexity != measured_conv {
        mismatches.push(Mismatch {
            feature: "convexity".to_string(),
            predicted: format!("{:?}", report.predicted.convexity),
            measured: format!("{measured_conv:?}"),
        });
    }

    let (minima, maxima) = extrema(curve);
    let (n_min, n_max) = if report.regime == RegimeLabel::LwPeriodic {
        per_period_extrema(curve, &minima, &maxima).unwrap_or((minima.len(), maxima.len()))
    } else {
        (minima.len(), maxima.len())
    };
    push_count(&mut mismatches, "num_minima", report.predicted.num_minima, n_min);
    push_count(&mut mismatches, "num_maxima", report.predicted.num_maxima, n_max);

    if report.predicted.periodic {
        match period_pair(curve) {
            Ok((p1, p2)) => {
                if (p1 - p2).abs() > tolerances::HEIGHT.max(1e-6) {
                    mismatches.push(Mismatch {
                        feature: "period_consistency".to_string(),
                        predicted: format!("{p1:.9}"),
                        measured: format!("{p2:.9}"),
                    });
                }
            }
            Err(_) => mismatches.push(Mismatch {
                feature: "period".to_string(),
                predicted: "finite".to_string(),
                measured: "not detected".to_string(),
            }),
        }
    }

    if let Some(h_pred) = report.quantitative.height {
        push_value(
            &mut mismatches,
            "height",
            h_pred,
            measured_height(curve),
            tolerances::HEIGHT,
        );
    }
    if let (Some(hd), Some(hp)) = (report.quantitative.height, report.quantitative.height_printed)
    {
        if (hd - hp).abs() > tolerances::HEIGHT {
            notes.push(format!(
                "height formula discrepancy: printed {hp:.9} vs derived endpoint value {hd:.9}; \
                 the measured trace is gated against the derived value"
            ));
        }
    }
    if let Some(a_pred) = report.quantitative.contact_angle {
        let measured = contact_angle(curve, End::Right)
            .or_else(|_| contact_angle(curve, End::Left));
        match measured {
            Ok(a) => push_value(
                &mut mismatches,
                "contact_angle",
                a_pred,
                a,
                tolerances::CONTACT_ANGLE,
            ),
            Err(_) => mismatches.push(Mismatch {
                feature: "contact_angle".to_string(),
                predicted: format!("{a_pred:.9}"),
                measured: "no boundary contact".to_string(),
            }),
        }
    }

    // Residuals.
    let first_integral = first_integral_residual(curve);
    let weingarten = weingarten_residual(spec, curve);
    let integral_identity = match *spec {
        WeingartenSpec::LinearPrincipal { m, n, .. } => {
            Some(integral_identity_residual(curve, m, n))
        }
        _ => None,
    };
    let unit_speed = unit_speed_residual(curve);
    let mut symmetry_max: Option<f64> = None;
    for &s0 in minima.iter().chain(&maxima) {
        if let Ok(d) = symmetry_deviation(curve, s0) {
            symmetry_max = Some(symmetry_max.unwrap_or(0.0).max(d));
        }
    }
    let residuals = ResidualSummary {
        first_integral,
        weingarten,
        integral_identity,
        unit_speed,
        symmetry_max,
    };
    let residuals_ok = first_integral.is_none_or(|r| r <= tolerances::FIRST_INTEGRAL)
        && weingarten <= tolerances::WEINGARTEN
        && integral_identity.is_none_or(|r| r <= tolerances::INTEGRAL_IDENTITY)
        && unit_speed <= tolerances::UNIT_SPEED
        && symmetry_max.is_none_or(|r| r <= tolerances::SYMMETRY);
    if !residuals_ok {
        notes.push(format!(
            "residuals out of tolerance: first_integral {:?}, weingarten {:.3e}, \
             integral_identity {:?}, unit_speed {:.3e}, symmetry {:?}",
            first_integral, weingarten, integral_identity, unit_speed, symmetry_max
        ));
    }

    VerificationOutcome {
        passed: mismatches.is_empty() && residuals_ok,
        mismatches,
        residuals,
        notes,
    }
}

/// Classify then verify in one call: trace with default options, predict, and
/// compare. Convenience for the CLI and the acceptance grid.
pub fn classify_and_verify(
    spec: &WeingartenSpec,
    theta0: f64,
) -> Result<(ClassificationReport, VerificationOutcome), ClassifyError> {
    let report = predict(spec, theta0)?;
    let ic = crate::params::InitialConditions::new(theta0);
    let curve = crate::odetrace::trace(spec, &ic, &crate::odetrace::TraceOptions::default())?;
    let outcome = verify(spec, &curve, &report);
    Ok((report, outcome))
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ClassifyError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    Trace(#[from] crate::odetrace::TraceError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
}
