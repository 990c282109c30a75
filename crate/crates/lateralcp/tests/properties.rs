//! Property-based tests for numerical invariants that hold on whole input
//! domains rather than at hand-picked points.

use lateralcp::config::RunConfig;
use lateralcp::interp::Pchip;
use lateralcp::quad::gl_integrate;
use lateralcp::response::{shape_cp, shape_pws, shape_vdw};
use proptest::prelude::*;

proptest! {
    /// An n-point Gauss–Legendre rule integrates polynomials of degree
    /// ≤ 2n − 1 exactly (up to rounding in the evaluation itself).
    #[test]
    fn gauss_legendre_integrates_polynomials_exactly(
        coeffs in prop::collection::vec(-1.0f64..1.0, 1..=16),
        a in -10.0f64..10.0,
        width in 0.01f64..20.0,
    ) {
        let b = a + width;
        let poly = |x: f64| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
        let numeric = gl_integrate(&mut |x| poly(x), a, b, 8);
        // Closed form from the antiderivative Σ c_i x^{i+1}/(i+1).
        let anti = |x: f64| {
            coeffs
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (i, c)| acc * x + c / (i as f64 + 1.0))
                * x
        };
        let exact = anti(b) - anti(a);
        // Round-off scale of the antiderivative evaluation.
        let scale = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.abs() * a.abs().max(b.abs()).powi(i as i32 + 1))
            .sum::<f64>()
            .max(1e-300);
        prop_assert!(
            (numeric - exact).abs() <= 1e-12 * scale,
            "GL8 missed degree-{} polynomial on [{a}, {b}]: {numeric} vs {exact}",
            coeffs.len() - 1
        );
    }

    /// Monotone data produce a monotone interpolant (the Fritsch–Carlson
    /// guarantee), and the interpolant never leaves the data range.
    #[test]
    fn pchip_preserves_monotonicity(
        dx in prop::collection::vec(0.01f64..3.0, 3..=12),
        dy in prop::collection::vec(0.0f64..2.0, 3..=12),
        fracs in prop::collection::vec(0.0f64..1.0, 2..=40),
    ) {
        let n = dx.len().min(dy.len());
        let mut x = vec![0.0];
        let mut y = vec![0.0];
        for i in 0..n {
            x.push(x[i] + dx[i]);
            y.push(y[i] + dy[i]);
        }
        let spline = Pchip::new(x.clone(), y.clone()).unwrap();
        let span = *x.last().unwrap();
        let mut queries: Vec<f64> = fracs.iter().map(|f| f * span).collect();
        queries.sort_by(f64::total_cmp);
        let lo = y[0];
        let hi = *y.last().unwrap();
        let mut prev = f64::NEG_INFINITY;
        for &q in &queries {
            let v = spline.eval(q).unwrap();
            prop_assert!(v >= prev - 1e-12 * hi.abs().max(1.0), "not monotone at {q}");
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12 * hi.abs().max(1.0));
            prev = v;
        }
    }

    /// Length values accept nm/um/mm/m suffixes and parse to the exact
    /// correctly-rounded SI value (one decimal-to-binary conversion, no
    /// multiply-after-parse double rounding).
    #[test]
    fn length_parsing_is_correctly_rounded(
        mantissa in -1e4f64..1e4,
        unit in prop::sample::select(vec![("nm", -9), ("um", -6), ("mm", -3), ("m", 0)]),
    ) {
        let (suffix, shift) = unit;
        let mut cfg = RunConfig::default();
        cfg.apply_kv("z_a", &format!("{mantissa}{suffix}")).unwrap();
        let expected: f64 = format!("{mantissa}e{shift}").parse().unwrap();
        prop_assert_eq!(cfg.z_a, expected);
    }

    /// The retarded, pairwise and non-retarded response shapes are positive,
    /// bounded by their zero-separation values and strictly decreasing.
    #[test]
    fn response_shapes_decay_monotonically(
        z1 in 0.0f64..30.0,
        step in 1e-6f64..5.0,
    ) {
        let z2 = z1 + step;
        for (f, cap) in [
            (shape_cp as fn(f64) -> f64, 1.0),
            (shape_pws, 1.0),
            (shape_vdw, 12.0),
        ] {
            let (v1, v2) = (f(z1), f(z2));
            prop_assert!(v1 > 0.0 && v2 > 0.0);
            prop_assert!(v1 <= cap * (1.0 + 1e-12));
            prop_assert!(v2 < v1, "shape not decreasing: f({z1}) = {v1}, f({z2}) = {v2}");
        }
    }
}
