//! Arc-length integration of the generating-curve system
//!
//! ```text
//! x' = cos(theta),  z' = sin(theta),
//! theta' = (K + sin^2 theta) / (z cos theta)        (constant Gauss curvature)
//! theta' = ((m - 1) cos theta + n) / z              (k1 = m k2 + n)
//! ```
//!
//! with event detection for boundary contact (`z` reaching a small floor),
//! vertical tangents (`cos theta -> 0`, constant-curvature specs only) and
//! symmetry points (`sin theta = 0`, recorded as extra samples, not terminal).
//!
//! The stepper is an embedded Dormand-Prince 5(4) pair. Near a vertical
//! tangent the `s`-parametrized equation has unbounded `theta'`, so the final
//! approach switches the independent variable to `theta` and integrates
//! `dz/dtheta`, `dx/dtheta`, `ds/dtheta` with a fixed-step classical
//! Runge-Kutta scheme up to the singular angle.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{InitialConditions, WeingartenSpec};

/// Threshold on `|cos theta|` below which the constant-curvature closure is
/// treated as singular. Matches the default `event_tol`.
pub(crate) const SINGULAR_COS_EPS: f64 = 1e-10;

/// Switch to the theta-parametrized final approach once `|cos theta|` drops
/// below this and a vertical tangent lies on the trajectory.
const THETA_SWITCH_COS: f64 = 0.05;

/// Per-step bound on `|delta theta|`. Keeps the chord/arc ratio of adjacent
/// samples within 1e-6 of unity (the deviation is `(delta theta)^2 / 24`).
const MAX_STEP_DTHETA: f64 = 4e-3;

const MIN_STEP: f64 = 1e-13;

/// Fixed step count of the theta-parametrized final approach.
const THETA_MODE_STEPS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveState {
    /// Euclidean arc length, zero at the initial point.
    pub s: f64,
    pub x: f64,
    /// Height above the ideal boundary, strictly positive.
    pub z: f64,
    /// Tangent angle in radians, unwrapped (continuous along a trace).
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TerminationReason {
    /// `z` reached the floor; the trace stops just above the ideal boundary.
    BoundaryContact { z_final: f64, theta_final: f64 },
    /// `cos theta` reached zero (constant Gauss curvature specs only).
    VerticalTangent { s: f64 },
    /// Reserved for traces cut at a recorded symmetry point.
    SymmetryPoint { s: f64, theta: f64 },
    MaxArcLength,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    pub s_max: f64,
    pub z_floor: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub event_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            s_max: 50.0,
            z_floor: 1e-6,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_step: 1e-2,
            event_tol: 1e-10,
        }
    }
}

impl TraceOptions {
    pub fn validate(&self) -> Result<(), TraceError> {
        let all_positive = self.s_max > 0.0
            && self.z_floor > 0.0
            && self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.max_step > 0.0
            && self.event_tol > 0.0;
        if !all_positive || self.z_floor >= 1.0 {
            return Err(TraceError::InvalidOptions);
        }
        Ok(())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("vertical tangent singularity: |cos theta| below threshold")]
    SingularVerticalTangent,
    #[error("nonpositive height z = {0}")]
    NonpositiveHeight(f64),
    #[error("spec cannot be traced: {0}")]
    UnsupportedSpec(&'static str),
    #[error("trace options out of range")]
    InvalidOptions,
    #[error("reflection point is not an extremum of z")]
    NotAnExtremum,
    #[error("arc length {0} outside the traced range")]
    OutOfRange(f64),
}

/// Right-hand side of the governing system at `state`: `(dx, dz, dtheta)`.
pub fn derivative(
    spec: &WeingartenSpec,
    state: &CurveState,
) -> Result<(f64, f64, f64), TraceError> {
    if state.z <= 0.0 {
        return Err(TraceError::NonpositiveHeight(state.z));
    }
    let (sin_t, cos_t) = state.theta.sin_cos();
    let dtheta = match *spec {
        WeingartenSpec::GaussConstant { k } => {
            if cos_t.abs() <= SINGULAR_COS_EPS {
                return Err(TraceError::SingularVerticalTangent);
            }
            (k + sin_t * sin_t) / (state.z * cos_t)
        }
        WeingartenSpec::LinearPrincipal { m, n, .. } => ((m - 1.0) * cos_t + n) / state.z,
        WeingartenSpec::Kappa1Constant { c1 } => (c1 - cos_t) / state.z,
        WeingartenSpec::Kappa2Constant { .. } => 0.0,
    };
    Ok((cos_t, sin_t, dtheta))
}

/// A traced generating curve: ordered samples with strictly increasing `s`,
/// bracketing `s = 0`, plus the termination at each end.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratingCurve {
    pub samples: Vec<CurveState>,
    pub spec: WeingartenSpec,
    pub ic: InitialConditions,
    pub left_end: TerminationReason,
    pub right_end: TerminationReason,
}

impl GeneratingCurve {
    pub fn first(&self) -> &CurveState {
        self.samples.first().expect("non-empty curve")
    }

    pub fn last(&self) -> &CurveState {
        self.samples.last().expect("non-empty curve")
    }

    pub fn s_range(&self) -> (f64, f64) {
        (self.first().s, self.last().s)
    }

    /// State at arbitrary arc length by cubic Hermite interpolation between
    /// the bracketing samples, using the analytic derivatives of the closure.
    /// Falls back to linear interpolation where the closure is singular
    /// (the tiny final interval at a vertical tangent).
    pub fn state_at(&self, s: f64) -> Result<CurveState, TraceError> {
        let (lo, hi) = self.s_range();
        if s < lo - 1e-12 || s > hi + 1e-12 {
            return Err(TraceError::OutOfRange(s));
        }
        let s = s.clamp(lo, hi);
        let idx = match self
            .samples
            .binary_search_by(|p| p.s.partial_cmp(&s).unwrap())
        {
            Ok(i) => return Ok(self.samples[i]),
            Err(i) => i,
        };
        let a = &self.samples[idx - 1];
        let b = &self.samples[idx];
        let h = b.s - a.s;
        let t = (s - a.s) / h;
        match (derivative(&self.spec, a), derivative(&self.spec, b)) {
            (Ok(da), Ok(db)) => {
                let x = hermite(a.x, da.0, b.x, db.0, h, t);
                let z = hermite(a.z, da.1, b.z, db.1, h, t);
                let theta = hermite(a.theta, da.2, b.theta, db.2, h, t);
                Ok(CurveState { s, x, z, theta })
            }
            _ => Ok(CurveState {
                s,
                x: a.x + t * (b.x - a.x),
                z: a.z + t * (b.z - a.z),
                theta: a.theta + t * (b.theta - a.theta),
            }),
        }
    }
}

fn hermite(y0: f64, d0: f64, y1: f64, d1: f64, h: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

// State vector used internally: [x, z, theta]. The system is autonomous in s.
type Vec3 = [f64; 3];

struct Directed<'a> {
    spec: &'a WeingartenSpec,
    dir: f64,
}

impl Directed<'_> {
    fn f(&self, y: &Vec3) -> Result<Vec3, TraceError> {
        let st = CurveState {
            s: 0.0,
            x: y[0],
            z: y[1],
            theta: y[2],
        };
        let (dx, dz, dt) = derivative(self.spec, &st)?;
        Ok([self.dir * dx, self.dir * dz, self.dir * dt])
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &Vec3, coeffs: &[f64], ks: &[Vec3], h: f64) -> Vec3 {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One embedded 5(4) step. Returns the fifth-order solution and the
/// difference against the fourth-order one.
fn dopri5_step(sys: &Directed, y: &Vec3, h: f64) -> Result<(Vec3, Vec3), TraceError> {
    let _ = C;
    let k1 = sys.f(y)?;
    let k2 = sys.f(&axpy(y, &A2, &[k1], h))?;
    let k3 = sys.f(&axpy(y, &A3, &[k1, k2], h))?;
    let k4 = sys.f(&axpy(y, &A4, &[k1, k2, k3], h))?;
    let k5 = sys.f(&axpy(y, &A5, &[k1, k2, k3, k4], h))?;
    let k6 = sys.f(&axpy(y, &A6, &[k1, k2, k3, k4, k5], h))?;
    let ks = [k1, k2, k3, k4, k5, k6];
    let y5 = axpy(y, &B5[..6], &ks, h);
    let k7 = sys.f(&y5)?;
    let ks7 = [k1, k2, k3, k4, k5, k6, k7];
    let y4 = axpy(y, &B4, &ks7, h);
    let err = [y5[0] - y4[0], y5[1] - y4[1], y5[2] - y4[2]];
    Ok((y5, err))
}

/// Classical RK4 advance over `ds`, split into `n` substeps. Used for dense
/// evaluation inside an accepted step during event bisection.
fn advance_rk4(sys: &Directed, y0: &Vec3, ds: f64, n: usize) -> Result<Vec3, TraceError> {
    let h = ds / n as f64;
    let mut y = *y0;
    for _ in 0..n {
        let k1 = sys.f(&y)?;
        let k2 = sys.f(&axpy(&y, &[0.5], &[k1], h))?;
        let k3 = sys.f(&axpy(&y, &[0.5], &[k2], h))?;
        let k4 = sys.f(&axpy(&y, &[1.0], &[k3], h))?;
        for i in 0..3 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(y)
}

/// Bisect an event inside `(0, h]`: `g` changes sign between `y0` and the
/// step endpoint. Returns `(delta, state)` at the located event.
fn locate_event(
    sys: &Directed,
    y0: &Vec3,
    h: f64,
    tol: f64,
    g: impl Fn(&Vec3) -> f64,
) -> Result<(f64, Vec3), TraceError> {
    let g0 = g(y0);
    let mut lo = 0.0_f64;
    let mut hi = h;
    let mut y_hi = advance_rk4(sys, y0, hi, 8)?;
    for _ in 0..80 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let y_mid = advance_rk4(sys, y0, mid, 8)?;
        if (g(&y_mid) > 0.0) == (g0 > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            y_hi = y_mid;
        }
    }
    Ok((hi, y_hi))
}

fn state_from(sigma: f64, dir: f64, y: &Vec3) -> CurveState {
    CurveState {
        s: dir * sigma,
        x: y[0],
        z: y[1],
        theta: y[2],
    }
}

/// Does a vertical tangent lie ahead on this constant-curvature trajectory?
/// Uses the first integral `sin^2 theta = C z^2 - K` with
/// `C = (K + sin^2 theta) / z^2`: the singular angle is reachable iff
/// `z_vert^2 = (1 + K) / C > 0`.
fn vertical_approach(k: f64, y: &Vec3, dir: f64) -> bool {
    let (sin_t, cos_t) = y[2].sin_cos();
    if cos_t.abs() >= THETA_SWITCH_COS {
        return false;
    }
    if (k + 1.0).abs() <= 1e-9 {
        // K = -1: the trajectory reaches the boundary, never a vertical point.
        return false;
    }
    let c = (k + sin_t * sin_t) / (y[1] * y[1]);
    if (1.0 + k) / c <= 0.0 {
        return false;
    }
    // |cos theta| must be shrinking along the direction of travel.
    let dtheta = dir * (k + sin_t * sin_t) / (y[1] * cos_t);
    cos_t.signum() * (-sin_t * dtheta) < 0.0
}

/// Final approach to a vertical tangent with `theta` as the independent
/// variable: `ds/dtheta = z cos t / (K + sin^2 t)` and the corresponding
/// `dx`, `dz`. Integrates up to the singular angle itself, where the
/// integrands vanish smoothly.
fn theta_mode_finish(
    k: f64,
    opts: &TraceOptions,
    sigma: f64,
    dir: f64,
    y: &Vec3,
    samples: &mut Vec<CurveState>,
) -> TerminationReason {
    let (sin_t, cos_t) = y[2].sin_cos();
    let dtheta_sign = (dir * (k + sin_t * sin_t) / (y[1] * cos_t)).signum();
    // Nearest singular angle (odd multiple of pi/2) in the travel direction.
    let base = ((y[2] - std::f64::consts::FRAC_PI_2) / std::f64::consts::PI).round();
    let mut target = std::f64::consts::FRAC_PI_2 + base * std::f64::consts::PI;
    if (target - y[2]) * dtheta_sign <= 0.0 {
        target += dtheta_sign * std::f64::consts::PI;
    }
    // w = [x, z, s] as functions of theta.
    let rhs = |theta: f64, w: &Vec3| -> Vec3 {
        let (st, ct) = theta.sin_cos();
        let denom = k + st * st;
        let ds = w[1] * ct / denom;
        [ct * ds, st * ds, ds]
    };
    let mut w = [y[0], y[1], dir * sigma];
    let mut theta = y[2];
    let h = (target - y[2]) / THETA_MODE_STEPS as f64;
    for _ in 0..THETA_MODE_STEPS {
        let k1 = rhs(theta, &w);
        let w2 = [
            w[0] + 0.5 * h * k1[0],
            w[1] + 0.5 * h * k1[1],
            w[2] + 0.5 * h * k1[2],
        ];
        let k2 = rhs(theta + 0.5 * h, &w2);
        let w3 = [
            w[0] + 0.5 * h * k2[0],
            w[1] + 0.5 * h * k2[1],
            w[2] + 0.5 * h * k2[2],
        ];
        let k3 = rhs(theta + 0.5 * h, &w3);
        let w4 = [w[0] + h * k3[0], w[1] + h * k3[1], w[2] + h * k3[2]];
        let k4 = rhs(theta + h, &w4);
        let w_new = [
            w[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            w[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            w[2] + h / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
        ];
        let theta_new = theta + h;
        if w_new[1] <= opts.z_floor {
            // Boundary event inside the approach: bisect in theta.
            let (mut t_lo, mut t_hi) = (theta, theta_new);
            let (mut w_lo, mut w_hi) = (w, w_new);
            for _ in 0..200 {
                if (t_hi - t_lo).abs() <= opts.event_tol * 1e-2 {
                    break;
                }
                let tm = 0.5 * (t_lo + t_hi);
                let hm = tm - t_lo;
                let k1 = rhs(t_lo, &w_lo);
                let k2 = rhs(
                    t_lo + 0.5 * hm,
                    &[
                        w_lo[0] + 0.5 * hm * k1[0],
                        w_lo[1] + 0.5 * hm * k1[1],
                        w_lo[2] + 0.5 * hm * k1[2],
                    ],
                );
                let k3 = rhs(
                    t_lo + 0.5 * hm,
                    &[
                        w_lo[0] + 0.5 * hm * k2[0],
                        w_lo[1] + 0.5 * hm * k2[1],
                        w_lo[2] + 0.5 * hm * k2[2],
                    ],
                );
                let k4 = rhs(
                    tm,
                    &[
                        w_lo[0] + hm * k3[0],
                        w_lo[1] + hm * k3[1],
                        w_lo[2] + hm * k3[2],
                    ],
                );
                let wm = [
                    w_lo[0] + hm / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                    w_lo[1] + hm / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                    w_lo[2] + hm / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
                ];
                if wm[1] > opts.z_floor {
                    t_lo = tm;
                    w_lo = wm;
                } else {
                    t_hi = tm;
                    w_hi = wm;
                }
            }
            samples.push(CurveState {
                s: w_hi[2],
                x: w_hi[0],
                z: w_hi[1],
                theta: t_hi,
            });
            return TerminationReason::BoundaryContact {
                z_final: w_hi[1],
                theta_final: t_hi,
            };
        }
        w = w_new;
        theta = theta_new;
        samples.push(CurveState {
            s: w[2],
            x: w[0],
            z: w[1],
            theta,
        });
    }
    TerminationReason::VerticalTangent { s: w[2] }
}

/// Integrate one half-trace in the given direction (`dir = +1` or `-1`).
/// Returns samples ordered by increasing distance from the start (the first
/// sample is the initial state).
fn half_trace(
    spec: &WeingartenSpec,
    ic: &InitialConditions,
    opts: &TraceOptions,
    dir: f64,
) -> (Vec<CurveState>, TerminationReason) {
    let sys = Directed { spec, dir };
    let mut y: Vec3 = [ic.x0, ic.z0, ic.theta0];
    let mut sigma = 0.0_f64;
    let mut samples = vec![state_from(sigma, dir, &y)];

    // Degenerate start: already on a vertical tangent of a constant-K spec.
    if let WeingartenSpec::GaussConstant { .. } = spec {
        if ic.theta0.cos().abs() <= opts.event_tol {
            return (samples, TerminationReason::VerticalTangent { s: 0.0 });
        }
    }

    let mut h = opts.max_step.min(1e-3);
    loop {
        if sigma >= opts.s_max - 1e-14 {
            return (samples, TerminationReason::MaxArcLength);
        }
        if let WeingartenSpec::GaussConstant { k } = *spec {
            if vertical_approach(k, &y, dir) {
                let end = theta_mode_finish(k, opts, sigma, dir, &y, &mut samples);
                return (samples, end);
            }
        }

        // Proactive caps: step budget to s_max and the per-step theta bound.
        h = h.min(opts.max_step).min(opts.s_max - sigma);
        if let Ok(k1) = sys.f(&y) {
            let cap = MAX_STEP_DTHETA / k1[2].abs().max(1e-30);
            h = h.min(cap);
        }
        if h < MIN_STEP {
            return (samples, TerminationReason::StepUnderflow);
        }

        let (y_new, err) = match dopri5_step(&sys, &y, h) {
            Ok(v) => v,
            Err(_) => {
                h *= 0.5;
                if h < MIN_STEP {
                    return (samples, TerminationReason::StepUnderflow);
                }
                continue;
            }
        };

        let mut err_norm = 0.0_f64;
        for i in 0..3 {
            let tol = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            err_norm += (err[i] / tol) * (err[i] / tol);
        }
        err_norm = (err_norm / 3.0).sqrt();
        let dtheta = (y_new[2] - y[2]).abs();

        if err_norm > 1.0 || dtheta > MAX_STEP_DTHETA {
            let shrink_err = if err_norm > 1.0 {
                0.9 * err_norm.powf(-0.2)
            } else {
                1.0
            };
            let shrink_theta = if dtheta > MAX_STEP_DTHETA {
                0.9 * MAX_STEP_DTHETA / dtheta
            } else {
                1.0
            };
            h *= shrink_err.min(shrink_theta).max(0.1);
            if h < MIN_STEP {
                return (samples, TerminationReason::StepUnderflow);
            }
            continue;
        }

        // Boundary contact inside the step.
        if y[1] > opts.z_floor && y_new[1] <= opts.z_floor {
            let g = |w: &Vec3| w[1] - opts.z_floor;
            if let Ok((delta, y_ev)) = locate_event(&sys, &y, h, opts.event_tol, g) {
                sigma += delta;
                samples.push(state_from(sigma, dir, &y_ev));
                return (
                    samples,
                    TerminationReason::BoundaryContact {
                        z_final: y_ev[1],
                        theta_final: y_ev[2],
                    },
                );
            }
            return (samples, TerminationReason::StepUnderflow);
        }

        // Symmetry candidate: theta crossing a multiple of pi inside the
        // step. Recorded as an extra refined sample, not terminal.
        let a = y[2] / std::f64::consts::PI;
        let b = y_new[2] / std::f64::consts::PI;
        let k_mult = if b > a { a.floor() + 1.0 } else { a.ceil() - 1.0 };
        if (k_mult - a) * (b - k_mult) > 0.0 {
            let target = k_mult * std::f64::consts::PI;
            let g = |w: &Vec3| w[2] - target;
            if let Ok((delta, y_ev)) = locate_event(&sys, &y, h, opts.event_tol, g) {
                if delta > 0.0 && delta < h {
                    samples.push(state_from(sigma + delta, dir, &y_ev));
                }
            }
        }

        sigma += h;
        y = y_new;
        samples.push(state_from(sigma, dir, &y));

        let grow = if err_norm > 0.0 {
            (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        h *= grow;
    }
}

/// Trace the generating curve in both arc-length directions from `s = 0`
/// until an event fires per direction.
pub fn trace(
    spec: &WeingartenSpec,
    ic: &InitialConditions,
    opts: &TraceOptions,
) -> Result<GeneratingCurve, TraceError> {
    opts.validate()?;
    match spec {
        WeingartenSpec::GaussConstant { .. } => {}
        WeingartenSpec::LinearPrincipal { .. } => {
            if spec.trivial_kind().is_some() {
                return Err(TraceError::UnsupportedSpec(
                    "trivial linear relation (umbilic or CMC)",
                ));
            }
        }
        _ => {
            return Err(TraceError::UnsupportedSpec(
                "constant principal curvature specs are classified, not traced",
            ))
        }
    }

    let (mut left, left_end) = half_trace(spec, ic, opts, -1.0);
    let (right, right_end) = half_trace(spec, ic, opts, 1.0);
    left.reverse();
    left.pop(); // drop the duplicated s = 0 sample
    let mut samples = left;
    samples.extend(right);
    // Guard against equal consecutive s from event refinement.
    samples.dedup_by(|b, a| (b.s - a.s).abs() < 1e-15);
    Ok(GeneratingCurve {
        samples,
        spec: *spec,
        ic: *ic,
        left_end,
        right_end,
    })
}

/// Extend a curve by mirror reflection across the vertical line through the
/// point at arc length `s0`, which must be an extremum of `z` (`sin theta`
/// vanishing there). Samples beyond `s0` are replaced by the mirror image of
/// the samples before it.
pub fn reflect_extend(curve: &GeneratingCurve, s0: f64) -> Result<GeneratingCurve, TraceError> {
    let pivot = curve.state_at(s0)?;
    if pivot.theta.sin().abs() > 1e-9 {
        return Err(TraceError::NotAnExtremum);
    }
    let x0 = pivot.x;
    let theta0 = pivot.theta;
    let mut samples: Vec<CurveState> = curve
        .samples
        .iter()
        .copied()
        .filter(|p| p.s < s0 - 1e-15)
        .collect();
    samples.push(pivot);
    for p in curve.samples.iter().rev() {
        if p.s < s0 - 1e-15 {
            samples.push(CurveState {
                s: 2.0 * s0 - p.s,
                x: 2.0 * x0 - p.x,
                z: p.z,
                theta: 2.0 * theta0 - p.theta,
            });
        }
    }
    let right_end = match &curve.left_end {
        TerminationReason::BoundaryContact {
            z_final,
            theta_final,
        } => TerminationReason::BoundaryContact {
            z_final: *z_final,
            theta_final: 2.0 * theta0 - theta_final,
        },
        TerminationReason::VerticalTangent { s } => {
            TerminationReason::VerticalTangent { s: 2.0 * s0 - s }
        }
        TerminationReason::SymmetryPoint { s, theta } => TerminationReason::SymmetryPoint {
            s: 2.0 * s0 - s,
            theta: 2.0 * theta0 - theta,
        },
        other => other.clone(),
    };
    Ok(GeneratingCurve {
        samples,
        spec: curve.spec,
        ic: curve.ic,
        left_end: curve.left_end.clone(),
        right_end,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::WeingartenSpec;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_3, PI};

    fn state(z: f64, theta: f64) -> CurveState {
        CurveState {
            s: 0.0,
            x: 0.0,
            z,
            theta,
        }
    }

    #[test]
    fn derivative_gauss_at_start() {
        let (dx, dz, dt) = derivative(&WeingartenSpec::gauss(1.0), &state(1.0, 0.0)).unwrap();
        assert_eq!((dx, dz, dt), (1.0, 0.0, 1.0));
    }

    #[test]
    fn derivative_linear_at_start() {
        let (dx, dz, dt) = derivative(&WeingartenSpec::linear(3.0, 1.0), &state(1.0, 0.0)).unwrap();
        assert_eq!((dx, dz, dt), (1.0, 0.0, 3.0));
    }

    #[test]
    fn derivative_linear_hand_evaluated() {
        // Independent scalar evaluation: dtheta = ((m-1) cos t + n) / z
        // = (-3 * 0.5 + 1) / 0.5 = -1 at theta = -pi/3, z = 1/2.
        let (dx, dz, dt) =
            derivative(&WeingartenSpec::linear(-2.0, 1.0), &state(0.5, -FRAC_PI_3)).unwrap();
        assert_relative_eq!(dx, 0.5, max_relative = 1e-15);
        assert_relative_eq!(dz, -(3.0f64.sqrt()) / 2.0, max_relative = 1e-15);
        assert_relative_eq!(dt, -1.0, max_relative = 1e-14);
    }

    #[test]
    fn derivative_errors() {
        assert!(matches!(
            derivative(&WeingartenSpec::gauss(1.0), &state(1.0, PI / 2.0)),
            Err(TraceError::SingularVerticalTangent)
        ));
        assert!(matches!(
            derivative(&WeingartenSpec::gauss(1.0), &state(0.0, 0.0)),
            Err(TraceError::NonpositiveHeight(_))
        ));
    }

    #[test]
    fn flat_trace_is_a_horizontal_line() {
        let curve = trace(
            &WeingartenSpec::gauss(0.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        assert_eq!(curve.left_end, TerminationReason::MaxArcLength);
        assert_eq!(curve.right_end, TerminationReason::MaxArcLength);
        for p in &curve.samples {
            assert_eq!(p.z, 1.0);
            assert_eq!(p.theta, 0.0);
        }
    }

    #[test]
    fn positive_curvature_ends_at_vertical_tangents() {
        let curve = trace(
            &WeingartenSpec::gauss(1.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        let s1 = (1.0 + 2.0f64.sqrt()).ln();
        match curve.right_end {
            TerminationReason::VerticalTangent { s } => {
                assert_relative_eq!(s, s1, epsilon = 1e-8)
            }
            ref other => panic!("unexpected right end {other:?}"),
        }
        match curve.left_end {
            TerminationReason::VerticalTangent { s } => {
                assert_relative_eq!(s, -s1, epsilon = 1e-8)
            }
            ref other => panic!("unexpected left end {other:?}"),
        }
        assert_relative_eq!(curve.last().z, 2.0f64.sqrt(), epsilon = 1e-8);
    }

    #[test]
    fn concave_graph_reaches_the_boundary() {
        let curve = trace(
            &WeingartenSpec::linear(-2.0, 1.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        for end in [&curve.left_end, &curve.right_end] {
            match end {
                TerminationReason::BoundaryContact { theta_final, .. } => {
                    // cos(theta_bar) = -n/(m-1) = 1/3
                    assert_relative_eq!(theta_final.cos(), 1.0 / 3.0, epsilon = 1e-4);
                }
                other => panic!("unexpected end {other:?}"),
            }
        }
    }

    #[test]
    fn samples_strictly_increasing_and_bracket_zero() {
        let curve = trace(
            &WeingartenSpec::linear(1.0, 2.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        let (lo, hi) = curve.s_range();
        assert!(lo < 0.0 && hi > 0.0);
        for w in curve.samples.windows(2) {
            assert!(w[1].s > w[0].s);
        }
    }

    #[test]
    fn reflect_even_curve_is_identity() {
        let curve = trace(
            &WeingartenSpec::gauss(1.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        let reflected = reflect_extend(&curve, 0.0).unwrap();
        for p in reflected.samples.iter().filter(|p| p.s > 0.0) {
            let q = curve.state_at(p.s).unwrap();
            assert!((p.x - q.x).abs() <= 1e-12, "x mismatch at s={}", p.s);
            assert!((p.z - q.z).abs() <= 1e-12, "z mismatch at s={}", p.s);
            assert!(
                (p.theta - q.theta).abs() <= 1e-12,
                "theta mismatch at s={}",
                p.s
            );
        }
    }

    #[test]
    fn reflect_at_non_extremum_rejected() {
        let curve = trace(
            &WeingartenSpec::gauss(1.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        assert!(matches!(
            reflect_extend(&curve, 0.4),
            Err(TraceError::NotAnExtremum)
        ));
    }

    #[test]
    fn unsupported_specs_rejected() {
        let opts = TraceOptions::default();
        let ic = InitialConditions::horizontal();
        assert!(matches!(
            trace(&WeingartenSpec::Kappa1Constant { c1: 1.0 }, &ic, &opts),
            Err(TraceError::UnsupportedSpec(_))
        ));
        assert!(matches!(
            trace(&WeingartenSpec::linear(-1.0, 2.0), &ic, &opts),
            Err(TraceError::UnsupportedSpec(_))
        ));
    }

    #[test]
    fn theta_monotone_when_initial_turning_is_nonzero() {
        // theta'(0) = n + m - 1 != 0 keeps theta monotone. Near boundary
        // contact theta' -> 0, so allow machine-level jitter there.
        for (m, n) in [(1.0, 2.0), (3.0, 1.0), (-2.0, 1.0)] {
            let curve = trace(
                &WeingartenSpec::linear(m, n),
                &InitialConditions::horizontal(),
                &TraceOptions::default(),
            )
            .unwrap();
            let sign = (n + m - 1.0).signum();
            for w in curve.samples.windows(2) {
                assert!(
                    sign * (w[1].theta - w[0].theta) > -1e-9,
                    "(m,n)=({m},{n}): theta not monotone at s={}",
                    w[0].s
                );
            }
        }
    }

    #[test]
    fn theta_bounded_for_concave_graphs() {
        // n + m - 1 < 0: theta stays inside (-pi/2, pi/2).
        let curve = trace(
            &WeingartenSpec::linear(-2.0, 1.0),
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        for p in &curve.samples {
            assert!(p.theta.abs() < PI / 2.0, "theta out of range at s={}", p.s);
        }
    }

    #[test]
    fn reflect_periodic_curve_at_half_period_lands_one_period_over() {
        // Reflecting at the first theta = pi point continues the curve by
        // one full period: the new endpoint is the start translated in x.
        let spec = WeingartenSpec::linear(1.0, 2.0);
        let curve = trace(
            &spec,
            &InitialConditions::horizontal(),
            &TraceOptions::default(),
        )
        .unwrap();
        let s2 = crate::analysis::forward_theta_crossing(&curve, PI).unwrap().s;
        let reflected = reflect_extend(&curve, s2).unwrap();
        let end = reflected.state_at(2.0 * s2).unwrap();
        assert_relative_eq!(end.z, 1.0, epsilon = 1e-8);
        assert_relative_eq!(end.theta, 2.0 * PI, epsilon = 1e-8);
        // The half-period symmetry construction: period = 2 x(s2).
        let period = crate::analysis::period(&curve).unwrap();
        let x2 = curve.state_at(s2).unwrap().x;
        assert!((period - 2.0 * x2).abs() <= 1e-6);
        assert!((end.x - 2.0 * x2).abs() <= 1e-8);
    }

    #[test]
    fn trace_is_deterministic() {
        let spec = WeingartenSpec::linear(1.0, 2.0);
        let ic = InitialConditions::horizontal();
        let opts = TraceOptions::default();
        let a = trace(&spec, &ic, &opts).unwrap();
        let b = trace(&spec, &ic, &opts).unwrap();
        assert_eq!(a.samples, b.samples);
    }
}
