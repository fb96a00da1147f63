//! Property-based checks: normalization algebra, closed-form parity,
//! trace invariants, and serialization round-trips.

use proptest::prelude::*;

use weingarten_core::closedform::{domain_half_width, x_exact, z_exact};
use weingarten_core::emit::{write_curve, CurveFormat};
use weingarten_core::odetrace::trace;
use weingarten_core::params::{normalize_linear, regime_of, NormalizedOutcome};
use weingarten_core::{CurveState, InitialConditions, TraceOptions, WeingartenSpec};

/// Exact scale factors so float division in the normalizer cannot round.
fn pow2_scale() -> impl Strategy<Value = f64> {
    (-20i32..20).prop_map(|e| (2.0f64).powi(e))
}

proptest! {
    #[test]
    fn normalize_is_idempotent_on_canonical_inputs(
        m in -8.0f64..8.0,
        n in 0.0f64..8.0,
        a in pow2_scale(),
    ) {
        prop_assume!(m != 0.0);
        prop_assume!((m - 1.0).abs() > 1e-9 || n > 1e-9);
        prop_assume!((m + 1.0).abs() > 1e-9);
        let got = normalize_linear(a, -m * a, n * a).unwrap();
        prop_assert_eq!(
            got,
            NormalizedOutcome::Linear { m, n, orientation_flipped: false }
        );
    }

    #[test]
    fn normalize_is_scale_invariant(
        a in -4.0f64..4.0,
        b in -4.0f64..4.0,
        c in -4.0f64..4.0,
        lambda in pow2_scale(),
    ) {
        prop_assume!(a != 0.0 && b != 0.0);
        let base = normalize_linear(a, b, c);
        let scaled = normalize_linear(lambda * a, lambda * b, lambda * c);
        prop_assert_eq!(base, scaled);
    }

    #[test]
    fn regime_dispatch_is_total_on_nontrivial_linear_specs(
        m in -8.0f64..8.0,
        n in 0.0f64..8.0,
        theta0 in 0.0f64..std::f64::consts::TAU,
    ) {
        prop_assume!(m != 0.0);
        let spec = WeingartenSpec::linear(m, n);
        if spec.trivial_kind().is_none() {
            prop_assert!(regime_of(&spec, theta0).is_ok());
        }
    }

    #[test]
    fn closed_form_parity(k in -3.0f64..3.0, frac in 0.01f64..0.99) {
        prop_assume!(k != 0.0);
        let hw = domain_half_width(k).bounded().unwrap();
        let s = frac * hw;
        prop_assert_eq!(z_exact(k, s).unwrap(), z_exact(k, -s).unwrap());
        let x = x_exact(k, s).unwrap();
        prop_assert!((x + x_exact(k, -s).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn traces_are_unit_speed(k in -2.5f64..2.5) {
        // Keep traces short so the property suite stays fast.
        let opts = TraceOptions { s_max: 5.0, ..TraceOptions::default() };
        let curve = trace(&WeingartenSpec::gauss(k), &InitialConditions::horizontal(), &opts)
            .unwrap();
        for w in curve.samples.windows(2) {
            let ds = w[1].s - w[0].s;
            prop_assume!(ds > 0.0);
            let chord = ((w[1].x - w[0].x).powi(2) + (w[1].z - w[0].z).powi(2)).sqrt();
            prop_assert!((chord / ds - 1.0).abs() <= 1e-6, "ratio off at s={}", w[0].s);
        }
        for p in &curve.samples {
            prop_assert!(p.z > 0.0);
        }
    }

    #[test]
    fn csv_round_trips_any_samples(
        rows in proptest::collection::vec(
            (-1e3f64..1e3, -1e3f64..1e3, 1e-6f64..1e3, -10.0f64..10.0),
            1..40,
        ),
    ) {
        let mut s = -500.0;
        let samples: Vec<CurveState> = rows
            .iter()
            .map(|&(ds, x, z, theta)| {
                s += ds.abs() + 1e-3;
                CurveState { s, x, z, theta }
            })
            .collect();
        let curve = weingarten_core::GeneratingCurve {
            samples: samples.clone(),
            spec: WeingartenSpec::gauss(0.0),
            ic: InitialConditions::horizontal(),
            left_end: weingarten_core::TerminationReason::MaxArcLength,
            right_end: weingarten_core::TerminationReason::MaxArcLength,
        };
        let mut buf = Vec::new();
        write_curve(&curve, CurveFormat::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        for (line, p) in text.lines().skip(1).zip(&samples) {
            let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
            prop_assert_eq!(v, vec![p.s, p.x, p.z, p.theta]);
        }
    }
}
