//! The acceptance grid: fourteen numbered criteria pinning the numerical
//! tracer against the analytic oracles and the classification theorems, plus
//! the canonical figure table shared between the CLI and the tests.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_6, TAU};

use crate::analysis::{
    contact_angle, extrema, first_integral_residual, forward_theta_crossing,
    integral_identity_residual, measured_height, period_pair, principal_curvatures,
    self_intersections, symmetry_deviation, weingarten_residual, End,
};
use crate::classify::{predict, verify};
use crate::emit::{render_svg, FigureStyle};
use crate::odetrace::{trace, GeneratingCurve, TerminationReason, TraceOptions};
use crate::params::{InitialConditions, WeingartenSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// One figure from the canonical table: output file name, caption, member
/// parameter sets `(spec, theta0)`. Ungated figures (the tilted-start
/// constant-curvature pair) are rendered without a classification check —
/// no theorem covers them.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureSet {
    pub file_name: &'static str,
    pub caption: &'static str,
    pub members: Vec<(WeingartenSpec, f64)>,
    pub gated: bool,
}

pub fn figure_sets() -> Vec<FigureSet> {
    vec![
        FigureSet {
            file_name: "gauss-positive-and-flat.svg",
            caption: "Constant Gauss curvature: K = 1 and K = 0",
            members: vec![(WeingartenSpec::gauss(1.0), 0.0), (WeingartenSpec::gauss(0.0), 0.0)],
            gated: true,
        },
        FigureSet {
            file_name: "gauss-negative.svg",
            caption: "Constant Gauss curvature: K = -0.5 and K = -2",
            members: vec![
                (WeingartenSpec::gauss(-0.5), 0.0),
                (WeingartenSpec::gauss(-2.0), 0.0),
            ],
            gated: true,
        },
        FigureSet {
            file_name: "gauss-tilted-start.svg",
            caption: "Tilted start theta0 = pi/4: K = 0 and K = -1/4",
            members: vec![
                (WeingartenSpec::gauss(0.0), FRAC_PI_4),
                (WeingartenSpec::gauss(-0.25), FRAC_PI_4),
            ],
            gated: false,
        },
        FigureSet {
            file_name: "linear-periodic-and-selfint.svg",
            caption: "Linear relation k1 = m k2 + n: (m, n) = (1, 2) and (3, 1)",
            members: vec![
                (WeingartenSpec::linear(1.0, 2.0), 0.0),
                (WeingartenSpec::linear(3.0, 1.0), 0.0),
            ],
            gated: true,
        },
        FigureSet {
            file_name: "linear-graphs.svg",
            caption: "Linear relation k1 = m k2 + n: (m, n) = (2, 0) and (-2, 1)",
            members: vec![
                (WeingartenSpec::linear(2.0, 0.0), 0.0),
                (WeingartenSpec::linear(-2.0, 1.0), 0.0),
            ],
            gated: true,
        },
        FigureSet {
            file_name: "linear-asymptotic.svg",
            caption: "Linear relation (m, n) = (-2, 3), theta0 = pi/2",
            members: vec![(WeingartenSpec::linear(-2.0, 3.0), FRAC_PI_2)],
            gated: true,
        },
    ]
}

/// Render one figure of the table to SVG text.
pub fn render_figure(set: &FigureSet) -> Result<String, crate::emit::EmitError> {
    let curves: Vec<GeneratingCurve> = set
        .members
        .iter()
        .map(|(spec, theta0)| traced(spec, *theta0))
        .collect();
    render_svg(
        &curves,
        &FigureStyle {
            caption: set.caption.to_string(),
            width_px: 640.0,
        },
    )
}

fn traced(spec: &WeingartenSpec, theta0: f64) -> GeneratingCurve {
    trace(spec, &InitialConditions::new(theta0), &TraceOptions::default())
        .expect("acceptance parameter sets trace without error")
}

fn result(id: usize, name: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

/// Run the full acceptance grid. Deterministic and self-contained.
pub fn run_all() -> Vec<CriterionResult> {
    let mut out = Vec::new();

    let k_values = [1.0, 0.5, -0.5, -1.0, -2.0];
    let k_curves: Vec<(f64, GeneratingCurve)> = k_values
        .iter()
        .map(|&k| (k, traced(&WeingartenSpec::gauss(k), 0.0)))
        .collect();
    let k_shallow = traced(&WeingartenSpec::gauss(-0.25), 0.0);
    let lin_params = [
        (1.0, 2.0, 0.0),
        (3.0, 1.0, 0.0),
        (2.0, 0.0, 0.0),
        (-2.0, 1.0, 0.0),
        (-2.0, 3.0, 0.0),
        (0.5, 0.5, 0.0),
        (-2.0, 3.0, FRAC_PI_2),
    ];
    let lin_curves: Vec<((f64, f64, f64), GeneratingCurve)> = lin_params
        .iter()
        .map(|&(m, n, t0)| ((m, n, t0), traced(&WeingartenSpec::linear(m, n), t0)))
        .collect();
    let lin = |m: f64, n: f64, t0: f64| -> &GeneratingCurve {
        &lin_curves
            .iter()
            .find(|(p, _)| *p == (m, n, t0))
            .expect("parameter set in grid")
            .1
    };

    // 1. First-integral conservation on the constant-curvature grid.
    {
        let mut worst = 0.0_f64;
        for (_, c) in &k_curves {
            worst = worst.max(first_integral_residual(c).expect("constant-K trace"));
        }
        out.push(result(
            1,
            "first integral conserved on the constant-curvature grid",
            worst <= 1e-8,
            format!("max residual {worst:.3e} (tol 1e-8)"),
        ));
    }

    // 2. K = 1 endpoint data against the closed form.
    {
        let c = &k_curves[0].1;
        let s1 = (1.0 + 2.0f64.sqrt()).ln();
        let s_err = match c.right_end {
            TerminationReason::VerticalTangent { s } => (s - s1).abs(),
            _ => f64::INFINITY,
        };
        let z_err = (c.last().z - 2.0f64.sqrt()).abs();
        let h_err = (measured_height(c) - 0.5 * 2.0f64.ln()).abs();
        out.push(result(
            2,
            "K = 1 half-width, endpoint height and band height",
            s_err <= 1e-6 && z_err <= 1e-6 && h_err <= 1e-6,
            format!("|s1 err| {s_err:.3e}, |z err| {z_err:.3e}, |height err| {h_err:.3e} (tol 1e-6)"),
        ));
    }

    // 3. K = -1 trace is the unit half-circle with k1 = 0.
    {
        let c = &k_curves[3].1;
        let mut circle = 0.0_f64;
        let mut kappa1 = 0.0_f64;
        for p in &c.samples {
            circle = circle.max((p.x * p.x + p.z * p.z - 1.0).abs());
            if let Ok(pc) = principal_curvatures(&c.spec, p) {
                kappa1 = kappa1.max(pc.kappa1.abs());
            }
        }
        out.push(result(
            3,
            "K = -1 trace is the geodesic half-circle",
            circle <= 1e-8 && kappa1 <= 1e-8,
            format!("max |x^2+z^2-1| {circle:.3e}, max |kappa1| {kappa1:.3e} (tol 1e-8)"),
        ));
    }

    // 4. K = -0.25 boundary contact angle.
    {
        let a = contact_angle(&k_shallow, End::Right).expect("boundary contact");
        let err = (a - FRAC_PI_6).abs();
        out.push(result(
            4,
            "K = -0.25 contact angle is pi/6",
            err <= 1e-4,
            format!("angle {a:.9}, |err| {err:.3e} (tol 1e-4)"),
        ));
    }

    // 5. Linear relation residual along each trace.
    {
        let sets = [
            (1.0, 2.0, 0.0),
            (3.0, 1.0, 0.0),
            (2.0, 0.0, 0.0),
            (-2.0, 1.0, 0.0),
            (-2.0, 3.0, 0.0),
        ];
        let mut worst = 0.0_f64;
        for &(m, n, t0) in &sets {
            worst = worst.max(weingarten_residual(&WeingartenSpec::linear(m, n), lin(m, n, t0)));
        }
        out.push(result(
            5,
            "linear Weingarten residual on the (m, n) grid",
            worst <= 1e-8,
            format!("max |k1 - m k2 - n| {worst:.3e} (tol 1e-8)"),
        ));
    }

    // 6. (m, n) = (-2, 1) contact angle: value and z_floor stability.
    {
        let c = lin(-2.0, 1.0, 0.0);
        let a = contact_angle(c, End::Right).expect("boundary contact");
        let target = (1.0f64 / 3.0).acos();
        let halved = trace(
            &WeingartenSpec::linear(-2.0, 1.0),
            &InitialConditions::horizontal(),
            &TraceOptions {
                z_floor: 5e-7,
                ..TraceOptions::default()
            },
        )
        .expect("trace with halved z_floor");
        let a2 = contact_angle(&halved, End::Right).expect("boundary contact");
        let err = (a - target).abs();
        let drift = (a - a2).abs();
        out.push(result(
            6,
            "(-2, 1) contact angle arccos(1/3), stable under halved z_floor",
            err <= 1e-3 && drift < 1e-4,
            format!("|err| {err:.3e} (tol 1e-3), z_floor drift {drift:.3e} (tol 1e-4)"),
        ));
    }

    // 7. (m, n) = (1, 2) periodicity: period agreement, per-period features.
    {
        let c = lin(1.0, 2.0, 0.0);
        let (p1, p2) = period_pair(c).expect("periodic regime");
        let s_per = forward_theta_crossing(c, c.ic.theta0 + TAU)
            .expect("one full revolution traced")
            .s;
        let crossings = self_intersections(c)
            .iter()
            .filter(|r| (0.0..s_per).contains(&r.s_first))
            .count();
        let (minima, maxima) = extrema(c);
        let in_period = |list: &[f64]| list.iter().filter(|&&s| (0.0..s_per - 1e-9).contains(&s)).count();
        let (n_min, n_max) = (in_period(&minima), in_period(&maxima));
        let agree = (p1 - p2).abs();
        out.push(result(
            7,
            "(1, 2) period detected, consistent, one min/max and a crossing per period",
            agree <= 1e-6 && crossings >= 1 && n_min == 1 && n_max == 1,
            format!(
                "periods {p1:.9}/{p2:.9} (|diff| {agree:.3e}, tol 1e-6), \
                 {crossings} crossings, {n_min} minima, {n_max} maxima per period"
            ),
        ));
    }

    // 8. (m, n) = (0.5, 0.5) stays the horosphere.
    {
        let c = lin(0.5, 0.5, 0.0);
        let mut z_dev = 0.0_f64;
        let mut t_dev = 0.0_f64;
        for p in &c.samples {
            z_dev = z_dev.max((p.z - 1.0).abs());
            t_dev = t_dev.max(p.theta.abs());
        }
        let (lo, hi) = c.s_range();
        out.push(result(
            8,
            "(0.5, 0.5) trace is the exact horizontal line",
            z_dev <= 1e-10 && t_dev <= 1e-10 && lo <= -50.0 + 1e-9 && hi >= 50.0 - 1e-9,
            format!("max |z-1| {z_dev:.3e}, max |theta| {t_dev:.3e} (tol 1e-10), s in [{lo}, {hi}]"),
        ));
    }

    // 9. (m, n) = (-2, 3), theta0 = pi/2: asymptotic ends, one max, crossing.
    {
        let c = lin(-2.0, 3.0, FRAC_PI_2);
        let z_ends = (c.first().z, c.last().z);
        let crossings = self_intersections(c).len();
        let (_, maxima) = extrema(c);
        out.push(result(
            9,
            "(-2, 3) at theta0 = pi/2 runs to the boundary with one max and a crossing",
            z_ends.0 < 1e-3 && z_ends.1 < 1e-3 && crossings >= 1 && maxima.len() == 1,
            format!(
                "end heights {:.3e}/{:.3e} (< 1e-3), {crossings} crossings, {} maxima",
                z_ends.0,
                z_ends.1,
                maxima.len()
            ),
        ));
    }

    // 10. Mirror symmetry at every detected extremum of every grid trace.
    {
        let mut worst = 0.0_f64;
        let mut count = 0usize;
        let all: Vec<&GeneratingCurve> = k_curves
            .iter()
            .map(|(_, c)| c)
            .chain(std::iter::once(&k_shallow))
            .chain(lin_curves.iter().map(|(_, c)| c))
            .collect();
        for c in all {
            let (minima, maxima) = extrema(c);
            for &s0 in minima.iter().chain(&maxima) {
                if let Ok(d) = symmetry_deviation(c, s0) {
                    worst = worst.max(d);
                    count += 1;
                }
            }
        }
        out.push(result(
            10,
            "mirror symmetry at every detected extremum",
            worst <= 1e-6 && count > 0,
            format!("max deviation {worst:.3e} over {count} extrema (tol 1e-6)"),
        ));
    }

    // 11. Integral identity residual on (3, 1) and (-2, 1).
    {
        let r1 = integral_identity_residual(lin(3.0, 1.0, 0.0), 3.0, 1.0);
        let r2 = integral_identity_residual(lin(-2.0, 1.0, 0.0), -2.0, 1.0);
        out.push(result(
            11,
            "integral identity residual on (3, 1) and (-2, 1)",
            r1 <= 1e-6 && r2 <= 1e-6,
            format!("residuals {r1:.3e}, {r2:.3e} (tol 1e-6)"),
        ));
    }

    // 12. Classification end-to-end on the grid plus the negative control.
    {
        let mut failures = Vec::new();
        for (k, c) in &k_curves {
            let spec = WeingartenSpec::gauss(*k);
            let report = predict(&spec, 0.0).expect("non-trivial");
            if !verify(&spec, c, &report).passed {
                failures.push(format!("K={k}"));
            }
        }
        {
            let spec = WeingartenSpec::gauss(-0.25);
            let report = predict(&spec, 0.0).expect("non-trivial");
            if !verify(&spec, &k_shallow, &report).passed {
                failures.push("K=-0.25".to_string());
            }
        }
        for ((m, n, t0), c) in &lin_curves {
            let spec = WeingartenSpec::linear(*m, *n);
            let report = predict(&spec, *t0).expect("non-trivial");
            if !verify(&spec, c, &report).passed {
                failures.push(format!("(m,n,theta0)=({m},{n},{t0})"));
            }
        }
        // Negative control: a perturbed trace must fail.
        let spec = WeingartenSpec::gauss(1.0);
        let report = predict(&spec, 0.0).expect("non-trivial");
        let mut bad = k_curves[0].1.clone();
        for p in &mut bad.samples {
            p.z += 1e-3;
        }
        let control = verify(&spec, &bad, &report);
        if control.passed {
            failures.push("negative control passed".to_string());
        }
        out.push(result(
            12,
            "verify(predict) passes on the grid; perturbed control fails",
            failures.is_empty(),
            if failures.is_empty() {
                "all parameter sets verified; control rejected".to_string()
            } else {
                format!("failures: {}", failures.join(", "))
            },
        ));
    }

    // 13. The figure table renders and each gated curve matches its regime.
    {
        let sets = figure_sets();
        let mut failures = Vec::new();
        for set in &sets {
            match render_figure(set) {
                Ok(svg) => {
                    if svg.matches("<polyline").count() != set.members.len() {
                        failures.push(format!("{}: wrong curve count", set.file_name));
                    }
                }
                Err(e) => failures.push(format!("{}: {e}", set.file_name)),
            }
            if !set.gated {
                continue;
            }
            for (spec, t0) in &set.members {
                let report = predict(spec, *t0).expect("non-trivial");
                let curve = traced(spec, *t0);
                let outcome = verify(spec, &curve, &report);
                if !outcome.passed {
                    failures.push(format!(
                        "{}: {:?} mismatches {:?}",
                        set.file_name, report.regime, outcome.mismatches
                    ));
                }
            }
        }
        out.push(result(
            13,
            "figure table renders; gated figures match their regime",
            sets.len() == 6 && failures.is_empty(),
            if failures.is_empty() {
                format!("{} figures", sets.len())
            } else {
                format!("failures: {}", failures.join("; "))
            },
        ));
    }

    // 14. Height discrepancy probe at K = -2: both values reported, the
    //     measured height gated against the derived endpoint value.
    {
        let spec = WeingartenSpec::gauss(-2.0);
        let report = predict(&spec, 0.0).expect("non-trivial");
        let c = &k_curves[4].1;
        let derived = 0.5 * 2.0f64.ln();
        let printed = 0.5 * 1.5f64.ln();
        let h = measured_height(c);
        let outcome = verify(&spec, c, &report);
        let reported = report.quantitative.height == Some(derived)
            && report.quantitative.height_printed == Some(printed);
        let noted = outcome.notes.iter().any(|n| n.contains("discrepancy"));
        let gate = (h - derived).abs() <= 1e-6;
        out.push(result(
            14,
            "K = -2 height: printed and derived values both reported, measured pins derived",
            reported && noted && gate,
            format!(
                "measured {h:.9}, derived {derived:.9}, printed {printed:.9}, \
                 |measured - derived| {:.3e} (tol 1e-6)",
                (h - derived).abs()
            ),
        ));
    }

    out
}
