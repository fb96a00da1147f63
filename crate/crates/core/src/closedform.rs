//! Analytic solutions for the constant-Gauss-curvature case, used as
//! independent oracles against the numerical tracer.
//!
//! With a horizontal starting vector the height profile satisfies
//! `z'^2 = K (z^2 - 1)`, hence `z'' = K z`:
//! `z = cosh(sqrt(K) s)` for `K > 0`, `z = 1` for `K = 0` and
//! `z = cos(sqrt(-K) s)` for `K < 0`. The horizontal coordinate is the
//! elliptic integral `x(s) = integral of sqrt(1 - z'(t)^2)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProfileKind {
    Cosh,
    Flat,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KProfile {
    pub k: f64,
    pub kind: ProfileKind,
}

impl KProfile {
    pub fn new(k: f64) -> Self {
        let kind = if k > 0.0 {
            ProfileKind::Cosh
        } else if k == 0.0 {
            ProfileKind::Flat
        } else {
            ProfileKind::Cos
        };
        KProfile { k, kind }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum HalfWidth {
    Bounded(f64),
    Unbounded,
}

impl HalfWidth {
    pub fn bounded(&self) -> Option<f64> {
        match *self {
            HalfWidth::Bounded(v) => Some(v),
            HalfWidth::Unbounded => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("arc length {s} outside the maximal domain of the K = {k} profile")]
    OutOfDomain { k: f64, s: f64 },
    #[error("height formula undefined for K = {0} (requires K > 0 or K < -1)")]
    UndefinedHeight(f64),
    #[error("boundary angle defined only for -1 <= K < 0, got K = {0}")]
    OutOfRange(f64),
}

/// Half-width of the maximal domain of the profile:
/// `arcsinh(1/sqrt(K))/sqrt(K)` for `K > 0`, the first zero of the cosine
/// `pi/(2 sqrt(-K))` for `-1 <= K < 0`, `arcsin(1/sqrt(-K))/sqrt(-K)` for
/// `K < -1` (where the tangent turns vertical before the height vanishes),
/// and unbounded for `K = 0`.
pub fn domain_half_width(k: f64) -> HalfWidth {
    if k == 0.0 {
        HalfWidth::Unbounded
    } else if k > 0.0 {
        let r = k.sqrt();
        HalfWidth::Bounded((1.0 / r).asinh() / r)
    } else if k >= -1.0 {
        let r = (-k).sqrt();
        HalfWidth::Bounded(std::f64::consts::FRAC_PI_2 / r)
    } else {
        let r = (-k).sqrt();
        HalfWidth::Bounded((1.0 / r).asin() / r)
    }
}

fn check_domain(k: f64, s: f64) -> Result<(), ClosedFormError> {
    if let HalfWidth::Bounded(hw) = domain_half_width(k) {
        if s.abs() > hw * (1.0 + 1e-12) + 1e-15 {
            return Err(ClosedFormError::OutOfDomain { k, s });
        }
    }
    Ok(())
}

/// Exact height profile.
pub fn z_exact(k: f64, s: f64) -> Result<f64, ClosedFormError> {
    check_domain(k, s)?;
    Ok(if k > 0.0 {
        (k.sqrt() * s).cosh()
    } else if k == 0.0 {
        1.0
    } else {
        ((-k).sqrt() * s).cos()
    })
}

/// Exact slope `z'(s)` of the height profile.
pub fn zprime_exact(k: f64, s: f64) -> Result<f64, ClosedFormError> {
    check_domain(k, s)?;
    Ok(if k > 0.0 {
        let r = k.sqrt();
        r * (r * s).sinh()
    } else if k == 0.0 {
        0.0
    } else {
        let r = (-k).sqrt();
        -r * (r * s).sin()
    })
}

/// Horizontal coordinate `x(s) = integral_0^s sqrt(1 - z'(t)^2) dt`.
///
/// The integrand has a square-root singularity where the tangent turns
/// vertical, removed by the substitution `t = s sin(u)` before quadrature.
pub fn x_exact(k: f64, s: f64) -> Result<f64, ClosedFormError> {
    check_domain(k, s)?;
    if k == 0.0 || s == 0.0 {
        return Ok(s);
    }
    let r = s.abs();
    let f = |u: f64| {
        let t = r * u.sin();
        let zp = zprime_exact(k, t).unwrap_or(1.0);
        (1.0 - zp * zp).max(0.0).sqrt() * r * u.cos()
    };
    let val = quad::integrate(&f, 0.0, std::f64::consts::FRAC_PI_2, 1e-11);
    Ok(val.copysign(s))
}

/// Height of the surface band, both routes: the formula as printed in the
/// source theorems and the value derived from the endpoint height
/// `z_end = sqrt((K+1)/K)` via `|log(z_max / z_min)|`. The two agree for
/// `K > 0` and disagree for `K < -1`; both are reported, neither silently
/// preferred.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeightPair {
    pub paper_formula: f64,
    pub derived_log_ratio: f64,
}

pub fn height_exact(k: f64) -> Result<HeightPair, ClosedFormError> {
    if k > 0.0 {
        let v = 0.5 * ((k + 1.0) / k).ln();
        Ok(HeightPair {
            paper_formula: v,
            derived_log_ratio: v,
        })
    } else if k < -1.0 {
        Ok(HeightPair {
            paper_formula: 0.5 * ((k - 1.0) / k).ln(),
            // z_end = sqrt((K+1)/K) < 1, so log(z_max/z_min) = log(1/z_end).
            derived_log_ratio: 0.5 * (k / (k + 1.0)).ln(),
        })
    } else {
        Err(ClosedFormError::UndefinedHeight(k))
    }
}

/// Angle at which the profile meets the ideal boundary for `-1 <= K < 0`:
/// `sin(theta_1) = sqrt(-K)`.
pub fn boundary_angle(k: f64) -> Result<f64, ClosedFormError> {
    if (-1.0..0.0).contains(&k) {
        Ok((-k).sqrt().asin())
    } else {
        Err(ClosedFormError::OutOfRange(k))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, PI};

    #[test]
    fn z_exact_examples() {
        assert_eq!(z_exact(1.0, 0.0).unwrap(), 1.0);
        let s1 = (1.0 + 2.0f64.sqrt()).ln();
        assert_relative_eq!(z_exact(1.0, s1).unwrap(), 2.0f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(z_exact(-1.0, PI / 3.0).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn half_width_examples() {
        assert_relative_eq!(
            domain_half_width(1.0).bounded().unwrap(),
            (1.0 + 2.0f64.sqrt()).ln(),
            epsilon = 1e-14
        );
        assert_relative_eq!(
            domain_half_width(-2.0).bounded().unwrap(),
            PI / (4.0 * 2.0f64.sqrt()),
            epsilon = 1e-14
        );
        // First zero of cos(s/2).
        assert_relative_eq!(domain_half_width(-0.25).bounded().unwrap(), PI, epsilon = 1e-14);
        assert_eq!(domain_half_width(0.0), HalfWidth::Unbounded);
    }

    #[test]
    fn out_of_domain_rejected() {
        assert!(z_exact(1.0, 1.0).is_err());
        assert!(x_exact(-2.0, 1.0).is_err());
    }

    #[test]
    fn x_exact_is_the_unit_half_circle_for_geodesic_curvature() {
        // z = cos s, x = sin s: the half-circle orthogonal to the boundary.
        for &s in &[0.1, 0.5, 1.0, 1.4, FRAC_PI_2 * 0.999] {
            let x = x_exact(-1.0, s).unwrap();
            assert_abs_diff_eq!(x, s.sin(), epsilon = 1e-10);
            let z = z_exact(-1.0, s).unwrap();
            assert_abs_diff_eq!(x * x + z * z, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn x_exact_at_zero_is_zero() {
        assert_eq!(x_exact(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(x_exact(-0.5, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn x_exact_endpoint_is_finite() {
        // Full half-width integral with the endpoint singularity removed.
        let hw = domain_half_width(1.0).bounded().unwrap();
        let x1 = x_exact(1.0, hw).unwrap();
        assert!(x1.is_finite() && x1 > 0.0);
    }

    #[test]
    fn height_examples() {
        let h = height_exact(1.0).unwrap();
        assert_relative_eq!(h.paper_formula, 0.5 * 2.0f64.ln(), epsilon = 1e-14);
        assert_eq!(h.paper_formula, h.derived_log_ratio);
        let h3 = height_exact(3.0).unwrap();
        assert_relative_eq!(h3.paper_formula, 0.5 * (4.0f64 / 3.0).ln(), epsilon = 1e-14);
        // K = -2: printed formula and derived endpoint value disagree.
        let hm2 = height_exact(-2.0).unwrap();
        assert_relative_eq!(hm2.paper_formula, 0.5 * 1.5f64.ln(), epsilon = 1e-14);
        assert_relative_eq!(hm2.derived_log_ratio, 0.5 * 2.0f64.ln(), epsilon = 1e-14);
        assert!(height_exact(-0.5).is_err());
    }

    #[test]
    fn boundary_angle_examples() {
        assert_relative_eq!(boundary_angle(-0.25).unwrap(), FRAC_PI_6, epsilon = 1e-14);
        assert_relative_eq!(boundary_angle(-1.0).unwrap(), FRAC_PI_2, epsilon = 1e-14);
        assert_relative_eq!(boundary_angle(-0.5).unwrap(), FRAC_PI_4, epsilon = 1e-14);
        assert!(boundary_angle(0.5).is_err());
    }

    #[test]
    fn second_order_check_by_finite_differences() {
        // z'' = K z under central differences with h = 1e-4.
        let h = 1e-4;
        for &k in &[1.0, 0.5, -0.5, -1.0, -2.0] {
            let s = 0.3 * domain_half_width(k).bounded().unwrap_or(1.0);
            let zpp =
                (z_exact(k, s + h).unwrap() - 2.0 * z_exact(k, s).unwrap() + z_exact(k, s - h).unwrap())
                    / (h * h);
            assert_abs_diff_eq!(zpp, k * z_exact(k, s).unwrap(), epsilon = 1e-7);
        }
    }

    #[test]
    fn trace_matches_closed_form_on_the_common_domain() {
        use crate::odetrace::{trace, TraceOptions};
        use crate::params::{InitialConditions, WeingartenSpec};
        for &k in &[1.0, 0.5, -0.5, -1.0, -2.0] {
            let curve = trace(
                &WeingartenSpec::gauss(k),
                &InitialConditions::horizontal(),
                &TraceOptions::default(),
            )
            .unwrap();
            let hw = domain_half_width(k).bounded().unwrap();
            let mut worst = 0.0_f64;
            for p in curve.samples.iter().filter(|p| p.s.abs() <= hw) {
                worst = worst.max((p.z - z_exact(k, p.s).unwrap()).abs());
            }
            assert!(worst <= 1e-8, "K = {k}: max |z - z_exact| = {worst:.3e}");
            // Cross-oracle on x at an interior point.
            let s_probe = 0.5 * hw;
            let st = curve.state_at(s_probe).unwrap();
            assert_abs_diff_eq!(st.x, x_exact(k, s_probe).unwrap(), epsilon = 1e-8);
        }
    }

    #[test]
    fn first_integral_identity() {
        for &k in &[1.0, 0.5, -0.5, -1.0, -2.0] {
            let hw = domain_half_width(k).bounded().unwrap();
            for i in 0..20 {
                let s = hw * (i as f64) / 20.0;
                let z = z_exact(k, s).unwrap();
                let zp = zprime_exact(k, s).unwrap();
                assert_abs_diff_eq!(zp * zp - k * (z * z - 1.0), 0.0, epsilon = 1e-12);
            }
        }
    }
}
