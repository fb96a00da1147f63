//! Measured geometric facts of a traced curve: principal curvatures and
//! Weingarten residuals, extrema, self-intersections, contact angles,
//! period, height and symmetry deviation.

use std::collections::{HashMap, HashSet};
use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::odetrace::{derivative, CurveState, GeneratingCurve, TerminationReason, TraceError};
use crate::params::{regime_of, RegimeLabel, WeingartenSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("the designated end did not terminate with boundary contact")]
    NoBoundaryContact,
    #[error("curve regime is not periodic")]
    NotPeriodic,
    #[error("reference point is not an extremum of z")]
    NotAnExtremum,
    #[error(transparent)]
    Trace(#[from] TraceError),
}

/// Principal curvatures at a state: `k1 = z theta' + cos theta` (the
/// hyperbolic curvature of the generating curve) and `k2 = cos theta`,
/// with `theta'` taken from the spec's closure, never finite differences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrincipalCurvaturePair {
    pub kappa1: f64,
    pub kappa2: f64,
    pub gauss: f64,
}

pub fn principal_curvatures(
    spec: &WeingartenSpec,
    state: &CurveState,
) -> Result<PrincipalCurvaturePair, AnalysisError> {
    let (_, _, dtheta) = derivative(spec, state)?;
    let kappa2 = state.theta.cos();
    let kappa1 = state.z * dtheta + kappa2;
    Ok(PrincipalCurvaturePair {
        kappa1,
        kappa2,
        gauss: kappa1 * kappa2 - 1.0,
    })
}

/// Max residual of the defining relation along the trace:
/// `|k1 - m k2 - n|` for linear specs, `|k1 k2 - 1 - K|` for constant K.
pub fn weingarten_residual(spec: &WeingartenSpec, curve: &GeneratingCurve) -> f64 {
    let mut worst = 0.0_f64;
    for p in &curve.samples {
        let Ok(pc) = principal_curvatures(spec, p) else {
            continue; // singular endpoint sample
        };
        let r = match *spec {
            WeingartenSpec::GaussConstant { k } => (pc.gauss - k).abs(),
            WeingartenSpec::LinearPrincipal { m, n, .. } => {
                (pc.kappa1 - m * pc.kappa2 - n).abs()
            }
            WeingartenSpec::Kappa1Constant { c1 } => (pc.kappa1 - c1).abs(),
            WeingartenSpec::Kappa2Constant { c2 } => (pc.kappa2 - c2).abs(),
        };
        worst = worst.max(r);
    }
    worst
}

/// Max violation of the constant-curvature first integral
/// `sin^2 theta - K (z^2 - 1) = sin^2 theta_0` along the trace.
/// Returns `None` for non-constant-curvature specs.
pub fn first_integral_residual(curve: &GeneratingCurve) -> Option<f64> {
    let WeingartenSpec::GaussConstant { k } = curve.spec else {
        return None;
    };
    let c0 = curve.ic.theta0.sin().powi(2);
    let mut worst = 0.0_f64;
    for p in &curve.samples {
        let st = p.theta.sin();
        worst = worst.max((st * st - k * (p.z * p.z - 1.0) - c0).abs());
    }
    Some(worst)
}

/// Max deviation of the chord/arc ratio from unity over adjacent samples.
pub fn unit_speed_residual(curve: &GeneratingCurve) -> f64 {
    let mut worst = 0.0_f64;
    for w in curve.samples.windows(2) {
        let ds = w[1].s - w[0].s;
        if ds <= 0.0 {
            continue;
        }
        let chord = ((w[1].x - w[0].x).powi(2) + (w[1].z - w[0].z).powi(2)).sqrt();
        worst = worst.max((chord / ds - 1.0).abs());
    }
    worst
}

/// Locations of the interior extrema of `z` (where `sin theta = 0`),
/// found from unwrapped `theta` crossing multiples of pi and refined on the
/// interpolated curve; classified by the sign of `z'' = theta' cos theta`.
pub fn extrema(curve: &GeneratingCurve) -> (Vec<f64>, Vec<f64>) {
    let mut minima = Vec::new();
    let mut maxima = Vec::new();
    let mut push = |s: f64, state: &CurveState| {
        let Ok((_, _, dtheta)) = derivative(&curve.spec, state) else {
            return;
        };
        let zpp = dtheta * state.theta.cos();
        if zpp > 1e-12 {
            minima.push(s);
        } else if zpp < -1e-12 {
            maxima.push(s);
        }
        // near-zero z'': a straight line, not an extremum
    };

    let mut last_hit = f64::NEG_INFINITY;
    for (i, w) in curve.samples.windows(2).enumerate() {
        let (p, q) = (&w[0], &w[1]);
        // Sample sitting on a multiple of pi.
        let kp = (p.theta / PI).round();
        if (p.theta - kp * PI).abs() <= 1e-9 && p.s - last_hit > 1e-9 {
            push(p.s, p);
            last_hit = p.s;
        }
        // Strict crossing inside the interval.
        let a = p.theta / PI;
        let b = q.theta / PI;
        let k = if b > a { a.floor() + 1.0 } else { a.ceil() - 1.0 };
        if (k - a) * (b - k) > 0.0 {
            let target = k * PI;
            // Bisection on the interpolated theta.
            let (mut lo, mut hi) = (p.s, q.s);
            let increasing = b > a;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let th = curve.state_at(mid).map(|st| st.theta).unwrap_or(target);
                if (th < target) == increasing {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let s_ev = 0.5 * (lo + hi);
            if s_ev - last_hit > 1e-9 {
                if let Ok(st) = curve.state_at(s_ev) {
                    push(s_ev, &st);
                    last_hit = s_ev;
                }
            }
        }
        // Trailing sample handled by the next window; check the final one.
        if i + 2 == curve.samples.len() {
            let kq = (q.theta / PI).round();
            if (q.theta - kq * PI).abs() <= 1e-9 && q.s - last_hit > 1e-9 {
                push(q.s, q);
            }
        }
    }
    (minima, maxima)
}

/// A transverse crossing of the sampled polyline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionRecord {
    pub x: f64,
    pub z: f64,
    pub s_first: f64,
    pub s_second: f64,
}

fn seg_cross(p: (f64, f64), p2: (f64, f64), q: (f64, f64), q2: (f64, f64)) -> Option<(f64, f64)> {
    let d1 = (p2.0 - p.0, p2.1 - p.1);
    let d2 = (q2.0 - q.0, q2.1 - q.1);
    let denom = d1.0 * d2.1 - d1.1 * d2.0;
    if denom.abs() < 1e-300 {
        return None;
    }
    let w = (q.0 - p.0, q.1 - p.1);
    let t = (w.0 * d2.1 - w.1 * d2.0) / denom;
    let u = (w.0 * d1.1 - w.1 * d1.0) / denom;
    // Half-open so a crossing at a shared sample is counted once.
    if (0.0..1.0).contains(&t) && (0.0..1.0).contains(&u) {
        Some((t, u))
    } else {
        None
    }
}

/// All transverse crossings between non-adjacent polyline segments, pruned
/// by a uniform-grid spatial hash and ordered by the first arc parameter.
pub fn self_intersections(curve: &GeneratingCurve) -> Vec<IntersectionRecord> {
    let n = curve.samples.len();
    if n < 4 {
        return Vec::new();
    }
    let seg = |i: usize| {
        let a = &curve.samples[i];
        let b = &curve.samples[i + 1];
        ((a.x, a.z), (b.x, b.z))
    };
    let mut max_len = 0.0_f64;
    for i in 0..n - 1 {
        let (a, b) = seg(i);
        max_len = max_len.max((b.0 - a.0).abs().max((b.1 - a.1).abs()));
    }
    let cell = (2.0 * max_len).max(1e-9);
    let key = |x: f64, z: f64| ((x / cell).floor() as i64, (z / cell).floor() as i64);

    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for i in 0..n - 1 {
        let (a, b) = seg(i);
        let (ix0, iz0) = key(a.0.min(b.0), a.1.min(b.1));
        let (ix1, iz1) = key(a.0.max(b.0), a.1.max(b.1));
        for ix in ix0..=ix1 {
            for iz in iz0..=iz1 {
                grid.entry((ix, iz)).or_default().push(i);
            }
        }
    }

    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut out = Vec::new();
    for i in 0..n - 1 {
        let (a, b) = seg(i);
        let (ix0, iz0) = key(a.0.min(b.0), a.1.min(b.1));
        let (ix1, iz1) = key(a.0.max(b.0), a.1.max(b.1));
        let mut candidates: Vec<usize> = Vec::new();
        for ix in ix0..=ix1 {
            for iz in iz0..=iz1 {
                if let Some(list) = grid.get(&(ix, iz)) {
                    candidates.extend(list.iter().copied().filter(|&j| j > i + 1));
                }
            }
        }
        candidates.sort_unstable();
        candidates.dedup();
        for j in candidates {
            if !seen.insert((i, j)) {
                continue;
            }
            let (c, d) = seg(j);
            if let Some((t, u)) = seg_cross(a, b, c, d) {
                let sa = curve.samples[i].s + t * (curve.samples[i + 1].s - curve.samples[i].s);
                let sb = curve.samples[j].s + u * (curve.samples[j + 1].s - curve.samples[j].s);
                out.push(IntersectionRecord {
                    x: a.0 + t * (b.0 - a.0),
                    z: a.1 + t * (b.1 - a.1),
                    s_first: sa,
                    s_second: sb,
                });
            }
        }
    }
    out.sort_by(|p, q| {
        (p.s_first, p.s_second)
            .partial_cmp(&(q.s_first, q.s_second))
            .unwrap()
    });
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum End {
    Left,
    Right,
}

/// Contact angle with the ideal boundary at a boundary-contact end,
/// extrapolated to `z = 0` over inward samples with geometrically spaced
/// heights (Neville polynomial extrapolation; the single final sample is the
/// fallback). Reported as the unsigned angle in `[0, pi]`.
pub fn contact_angle(curve: &GeneratingCurve, end: End) -> Result<f64, AnalysisError> {
    let term = match end {
        End::Left => &curve.left_end,
        End::Right => &curve.right_end,
    };
    if !matches!(term, TerminationReason::BoundaryContact { .. }) {
        return Err(AnalysisError::NoBoundaryContact);
    }
    // Walk inward from the end, picking samples whose z grows geometrically.
    let mut pts: Vec<(f64, f64)> = Vec::new(); // (z, theta)
    let iter: Box<dyn Iterator<Item = &CurveState>> = match end {
        End::Left => Box::new(curve.samples.iter()),
        End::Right => Box::new(curve.samples.iter().rev()),
    };
    for p in iter {
        if pts.is_empty() || p.z >= 1.5 * pts.last().unwrap().0 {
            pts.push((p.z, p.theta));
        }
        if pts.len() == 8 {
            break;
        }
    }
    let theta_hat = if pts.len() < 2 {
        pts.first().map(|p| p.1).unwrap_or(0.0)
    } else {
        neville_at_zero(&pts)
    };
    Ok(theta_hat.cos().clamp(-1.0, 1.0).acos())
}

fn neville_at_zero(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len();
    let mut val: Vec<f64> = pts.iter().map(|p| p.1).collect();
    for level in 1..n {
        for i in 0..n - level {
            let (zi, zj) = (pts[i].0, pts[i + level].0);
            // Evaluate the interpolating polynomial at z = 0.
            val[i] = (zj * val[i] - zi * val[i + 1]) / (zj - zi);
        }
    }
    val[0]
}

/// Arc length and x at the first point (s >= 0) where theta reaches `target`.
pub(crate) fn forward_theta_crossing(curve: &GeneratingCurve, target: f64) -> Option<CurveState> {
    let mut prev: Option<&CurveState> = None;
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
                return curve.state_at(0.5 * (lo + hi)).ok();
            }
        }
        prev = Some(p);
    }
    None
}

/// Translation period in `x` of a periodic-regime curve: `delta x` between
/// returns of `(z, theta mod 2 pi)` to the starting value. Requires the
/// trace to cover two full theta-revolutions so that translation invariance
/// is confirmed, not coincidental; the first revolution's `delta x` is
/// reported.
pub fn period(curve: &GeneratingCurve) -> Result<f64, AnalysisError> {
    let regime =
        regime_of(&curve.spec, curve.ic.theta0).map_err(|_| AnalysisError::NotPeriodic)?;
    if regime != RegimeLabel::LwPeriodic {
        return Err(AnalysisError::NotPeriodic);
    }
    let t0 = curve.ic.theta0;
    let one = forward_theta_crossing(curve, t0 + TAU).ok_or(AnalysisError::NotPeriodic)?;
    let two = forward_theta_crossing(curve, t0 + 2.0 * TAU).ok_or(AnalysisError::NotPeriodic)?;
    let _second = two.x - one.x;
    Ok(one.x - curve.ic.x0)
}

/// Both successive period measurements, for consistency checks.
pub fn period_pair(curve: &GeneratingCurve) -> Result<(f64, f64), AnalysisError> {
    let regime =
        regime_of(&curve.spec, curve.ic.theta0).map_err(|_| AnalysisError::NotPeriodic)?;
    if regime != RegimeLabel::LwPeriodic {
        return Err(AnalysisError::NotPeriodic);
    }
    let t0 = curve.ic.theta0;
    let one = forward_theta_crossing(curve, t0 + TAU).ok_or(AnalysisError::NotPeriodic)?;
    let two = forward_theta_crossing(curve, t0 + 2.0 * TAU).ok_or(AnalysisError::NotPeriodic)?;
    Ok((one.x - curve.ic.x0, two.x - one.x))
}

/// Hyperbolic height proxy of the traced band: `log(z_max / z_min)`.
pub fn measured_height(curve: &GeneratingCurve) -> f64 {
    let mut zmin = f64::INFINITY;
    let mut zmax = 0.0_f64;
    for p in &curve.samples {
        zmin = zmin.min(p.z);
        zmax = zmax.max(p.z);
    }
    (zmax / zmin).ln()
}

/// Max distance between the curve and its mirror image across the vertical
/// line through `s0`, which must be an extremum of `z`.
pub fn symmetry_deviation(curve: &GeneratingCurve, s0: f64) -> Result<f64, AnalysisError> {
    let pivot = curve.state_at(s0)?;
    if pivot.theta.sin().abs() > 1e-9 {
        return Err(AnalysisError::NotAnExtremum);
    }
    let (lo, hi) = curve.s_range();
    let reach = (hi - s0).min(s0 - lo);
    let mut worst = 0.0_f64;
    for p in curve.samples.iter().filter(|p| p.s > s0 && p.s - s0 <= reach) {
        let d = p.s - s0;
        let q = curve.state_at(s0 - d)?;
        let mx = 2.0 * pivot.x - q.x;
        worst = worst.max(((p.x - mx).powi(2) + (p.z - q.z).powi(2)).sqrt());
    }
    Ok(worst)
}

/// Residual of the integral identity obtained from the linear closure by
/// multiplying with `sin theta` and integrating:
/// `z(s) (n + cos theta(s)) = (2 - m) integral_0^s sin t cos t dt` plus the
/// constant `z(0) (n + cos theta(0))`.
/// Evaluated in this primitive form: dividing through by `z` (the form the
/// identity is usually quoted in) amplifies trace and quadrature error by
/// `1/z`, which is unbounded at a boundary-contact end. The running integral
/// uses the trapezoid rule on the samples with the Euler-Maclaurin
/// endpoint-derivative correction, so the quadrature error stays below the
/// integration error.
pub fn integral_identity_residual(curve: &GeneratingCurve, m: f64, n: f64) -> f64 {
    let spec = &curve.spec;
    let f = |p: &CurveState| p.theta.sin() * p.theta.cos();
    let fprime = |p: &CurveState| {
        derivative(spec, p)
            .map(|(_, _, dt)| (2.0 * p.theta).cos() * dt)
            .unwrap_or(0.0)
    };
    let mut worst = 0.0_f64;
    let mut acc = 0.0_f64;
    let mut prev: Option<&CurveState> = None;
    for p in curve.samples.iter().filter(|p| p.s >= 0.0) {
        if let Some(a) = prev {
            let h = p.s - a.s;
            acc += 0.5 * h * (f(a) + f(p)) + h * h / 12.0 * (fprime(a) - fprime(p));
        } else if p.s > 0.0 {
            // Samples must start at s = 0 for the running integral.
            prev = Some(p);
            continue;
        }
        if p.s > 0.0 {
            let lhs = p.z * (n + p.theta.cos());
            let rhs = (2.0 - m) * acc + curve.ic.z0 * (n + curve.ic.theta0.cos());
            worst = worst.max((lhs - rhs).abs());
        }
        prev = Some(p);
    }
    worst
}

/// Second integral from the same closure, multiplied by `cos theta`:
/// `z(s) sin theta(s) = s + integral_0^s (n cos t + (m-2) cos^2 t) dt` plus
/// the constant `z(0) sin theta(0)`, again in primitive form. Used only as
/// an extra residual check.
pub fn second_integral_residual(curve: &GeneratingCurve, m: f64, n: f64) -> f64 {
    let spec = &curve.spec;
    let f = |p: &CurveState| {
        let c = p.theta.cos();
        n * c + (m - 2.0) * c * c
    };
    let fprime = |p: &CurveState| {
        derivative(spec, p)
            .map(|(_, _, dt)| {
                let (st, ct) = p.theta.sin_cos();
                (-n * st - 2.0 * (m - 2.0) * ct * st) * dt
            })
            .unwrap_or(0.0)
    };
    let mut worst = 0.0_f64;
    let mut acc = 0.0_f64;
    let mut prev: Option<&CurveState> = None;
    for p in curve.samples.iter().filter(|p| p.s >= 0.0) {
        if let Some(a) = prev {
            let h = p.s - a.s;
            acc += 0.5 * h * (f(a) + f(p)) + h * h / 12.0 * (fprime(a) - fprime(p));
        } else if p.s > 0.0 {
            prev = Some(p);
            continue;
        }
        if p.s > 0.0 {
            let lhs = p.z * p.theta.sin();
            let rhs = p.s + acc + curve.ic.z0 * curve.ic.theta0.sin();
            worst = worst.max((lhs - rhs).abs());
        }
        prev = Some(p);
    }
    worst
}

/// Measured geometric facts of a traced curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSet {
    pub minima: Vec<f64>,
    pub maxima: Vec<f64>,
    pub self_intersections: Vec<IntersectionRecord>,
    pub contact_angles: (Option<f64>, Option<f64>),
    pub period_x: Option<f64>,
    pub height: Option<f64>,
    pub is_graph_over_boundary: bool,
    pub theta_range: (f64, f64),
}

pub fn features(curve: &GeneratingCurve) -> FeatureSet {
    let (minima, maxima) = extrema(curve);
    let self_int = self_intersections(curve);
    let left_angle = contact_angle(curve, End::Left).ok();
    let right_angle = contact_angle(curve, End::Right).ok();
    let period_x = period(curve).ok();
    let mut theta_min = f64::INFINITY;
    let mut theta_max = f64::NEG_INFINITY;
    let mut inc = true;
    let mut dec = true;
    for w in curve.samples.windows(2) {
        if w[1].x < w[0].x - 1e-12 {
            inc = false;
        }
        if w[1].x > w[0].x + 1e-12 {
            dec = false;
        }
    }
    for p in &curve.samples {
        theta_min = theta_min.min(p.theta);
        theta_max = theta_max.max(p.theta);
    }
    FeatureSet {
        minima,
        maxima,
        self_intersections: self_int.clone(),
        contact_angles: (left_angle, right_angle),
        period_x,
        height: Some(measured_height(curve)),
        is_graph_over_boundary: (inc || dec) && self_int.is_empty(),
        theta_range: (theta_min, theta_max),
    }
}
