//! One-dimensional quadrature building blocks: cached Gauss–Legendre rules, a
//! globally adaptive panel integrator, and doubling schemes for smooth and
//! periodic integrands.
//!
//! All routines are deterministic: panel refinement breaks ties by insertion
//! order and final sums are accumulated in coordinate order, so results do not
//! depend on timing or thread count.

use crate::error::{LcpError, Result};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of an n-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug)]
pub struct GlRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn gl_cache() -> &'static Mutex<HashMap<usize, Arc<GlRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GlRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// n-point Gauss–Legendre rule on [-1, 1], computed on first use and cached.
pub fn gauss_legendre(n: usize) -> Arc<GlRule> {
    assert!(n >= 1, "Gauss-Legendre order must be >= 1");
    if let Some(rule) = gl_cache().lock().unwrap().get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gl(n));
    let mut cache = gl_cache().lock().unwrap();
    Arc::clone(cache.entry(n).or_insert(rule))
}

/// Legendre polynomial P_n(x) and its derivative.
fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut p_prev = 1.0; // P_{j-1}
    let mut p = x; // P_j
    for j in 1..n {
        let jf = j as f64;
        let p_next = ((2.0 * jf + 1.0) * x * p - jf * p_prev) / (jf + 1.0);
        p_prev = p;
        p = p_next;
    }
    let denom = x * x - 1.0;
    let dp = if denom.abs() > 1e-300 {
        n as f64 * (x * p - p_prev) / denom
    } else {
        // Interior Newton iterations never reach |x| = 1; this is a guard.
        0.5 * (n * (n + 1)) as f64 * x.signum()
    };
    (p, dp)
}

fn compute_gl(n: usize) -> GlRule {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Standard cosine initial guess for the i-th root of P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, d) = legendre_and_derivative(n, z);
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-15 * (1.0 + z.abs()) {
                break;
            }
        }
        // One polishing step so the weight uses a fully converged node.
        let (p, dp) = legendre_and_derivative(n, z);
        z -= p / dp;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    GlRule { nodes, weights }
}

/// Single fixed-order Gauss–Legendre pass over [a, b].
pub fn gl_integrate<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, n: usize) -> f64 {
    let rule = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut sum = 0.0;
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        sum += w * f(c + h * x);
    }
    sum * h
}

/// Outcome of an adaptive or doubling quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadEstimate {
    pub value: f64,
    /// Conservative absolute error estimate.
    pub err: f64,
    /// Number of integrand evaluations.
    pub evals: usize,
    /// False when the refinement budget ran out before the tolerance was met.
    pub converged: bool,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    seq: u64,
}

fn eval_panel<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, seq: u64) -> Result<Panel> {
    let coarse = gl_integrate(f, a, b, 16);
    let fine = gl_integrate(f, a, b, 32);
    if !fine.is_finite() || !coarse.is_finite() {
        return Err(LcpError::Divergent(format!(
            "integrand produced a non-finite value on [{a:e}, {b:e}]"
        )));
    }
    Ok(Panel {
        a,
        b,
        value: fine,
        err: (fine - coarse).abs(),
        seq,
    })
}

/// Globally adaptive Gauss–Legendre integration of `f` over [a, b].
///
/// Every panel carries a 32-point estimate with the 16/32-point difference as
/// its error. The panel with the largest error is bisected until
/// `Σ err ≤ max(abs_tol, rel_tol · |Σ value|)` or `max_panels` is reached.
/// `breakpoints` strictly inside (a, b) seed the initial subdivision; use them
/// for integrable kinks and known scale changes.
pub fn adaptive_gl<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_panels: usize,
) -> Result<QuadEstimate> {
    assert!(b >= a, "adaptive_gl requires b >= a");
    if a == b {
        return Ok(QuadEstimate {
            value: 0.0,
            err: 0.0,
            evals: 0,
            converged: true,
        });
    }
    let mut edges: Vec<f64> = breakpoints
        .iter()
        .copied()
        .filter(|&x| x > a && x < b)
        .collect();
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges.insert(0, a);
    edges.push(b);

    let mut evals = 0usize;
    let mut seq = 0u64;
    let mut panels: Vec<Panel> = Vec::with_capacity(edges.len() + 16);
    for w in edges.windows(2) {
        panels.push(eval_panel(f, w[0], w[1], seq)?);
        seq += 1;
        evals += 48;
    }

    let width_floor = 1e-14 * (a.abs() + b.abs() + 1.0);
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let total_err: f64 = panels.iter().map(|p| p.err).sum();
        let target = abs_tol.max(rel_tol * total.abs());
        if total_err <= target || panels.len() >= max_panels {
            let converged = total_err <= target;
            // Deterministic left-to-right accumulation.
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            let err = panels.iter().map(|p| p.err).sum();
            return Ok(QuadEstimate {
                value,
                err,
                evals,
                converged,
            });
        }
        // Worst panel; ties resolved by insertion order.
        let mut worst = 0usize;
        for (i, p) in panels.iter().enumerate() {
            if p.err > panels[worst].err
                || (p.err == panels[worst].err && p.seq < panels[worst].seq)
            {
                worst = i;
            }
        }
        let Panel { a: pa, b: pb, .. } = panels[worst];
        if pb - pa < width_floor {
            // Cannot refine further; report what we achieved.
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            let err = panels.iter().map(|p| p.err).sum();
            return Ok(QuadEstimate {
                value,
                err,
                evals,
                converged: false,
            });
        }
        let mid = 0.5 * (pa + pb);
        let left = eval_panel(f, pa, mid, seq)?;
        seq += 1;
        let right = eval_panel(f, mid, pb, seq)?;
        seq += 1;
        evals += 96;
        panels[worst] = left;
        panels.push(right);
    }
}

/// Gauss–Legendre with order doubling until two consecutive orders agree to
/// the requested tolerance. Suited to smooth integrands on a fixed interval.
pub fn gl_auto<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    n_start: usize,
    n_max: usize,
) -> Result<QuadEstimate> {
    let mut n = n_start;
    let mut prev = gl_integrate(f, a, b, n);
    let mut evals = n;
    loop {
        n *= 2;
        let cur = gl_integrate(f, a, b, n);
        evals += n;
        if !cur.is_finite() {
            return Err(LcpError::Divergent(
                "integrand produced a non-finite value".into(),
            ));
        }
        let err = (cur - prev).abs();
        if err <= abs_tol.max(rel_tol * cur.abs()) {
            return Ok(QuadEstimate {
                value: cur,
                err,
                evals,
                converged: true,
            });
        }
        if n >= n_max {
            return Ok(QuadEstimate {
                value: cur,
                err,
                evals,
                converged: false,
            });
        }
        prev = cur;
    }
}

/// Trapezoid rule over one full period of a periodic integrand (spectrally
/// accurate), doubling the grid until two consecutive levels agree. Previous
/// evaluations are reused, so level k costs the same as a fresh 2^k grid.
pub fn trapezoid_periodic_auto<F: FnMut(f64) -> f64>(
    f: &mut F,
    period: f64,
    rel_tol: f64,
    abs_tol: f64,
    n_start: usize,
    n_max: usize,
) -> Result<QuadEstimate> {
    assert!(period > 0.0 && n_start >= 2);
    let mut n = n_start;
    let h = period / n as f64;
    let mut sum = 0.0;
    for i in 0..n {
        sum += f(i as f64 * h);
    }
    let mut prev = sum * h;
    let mut evals = n;
    loop {
        // Add midpoints of the current grid.
        let h = period / n as f64;
        let mut mid = 0.0;
        for i in 0..n {
            mid += f((i as f64 + 0.5) * h);
        }
        evals += n;
        n *= 2;
        let cur = 0.5 * prev + 0.5 * h * mid;
        if !cur.is_finite() {
            return Err(LcpError::Divergent(
                "integrand produced a non-finite value".into(),
            ));
        }
        let err = (cur - prev).abs();
        if err <= abs_tol.max(rel_tol * cur.abs()) {
            return Ok(QuadEstimate {
                value: cur,
                err,
                evals,
                converged: true,
            });
        }
        if n >= n_max {
            return Ok(QuadEstimate {
                value: cur,
                err,
                evals,
                converged: false,
            });
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn gl5_matches_reference_nodes() {
        let rule = gauss_legendre(5);
        let x_ref = [
            -0.906_179_845_938_664,
            -0.538_469_310_105_683,
            0.0,
            0.538_469_310_105_683,
            0.906_179_845_938_664,
        ];
        let w_ref = [
            0.236_926_885_056_189_08,
            0.478_628_670_499_366_47,
            0.568_888_888_888_888_9,
            0.478_628_670_499_366_47,
            0.236_926_885_056_189_08,
        ];
        for i in 0..5 {
            assert_relative_eq!(rule.nodes[i], x_ref[i], epsilon = 1e-14);
            assert_relative_eq!(rule.weights[i], w_ref[i], epsilon = 1e-14);
        }
    }

    #[test]
    fn gl_exact_for_low_degree_polynomials() {
        // n-point GL is exact up to degree 2n-1.
        let mut f = |x: f64| 5.0 * x.powi(3) - 2.0 * x * x + x - 7.0;
        let got = gl_integrate(&mut f, -1.0, 2.0, 2);
        // Exact: 5/4 x^4 - 2/3 x^3 + x^2/2 - 7x over [-1, 2]
        let prim = |x: f64| 1.25 * x.powi(4) - 2.0 / 3.0 * x.powi(3) + 0.5 * x * x - 7.0 * x;
        assert_relative_eq!(got, prim(2.0) - prim(-1.0), epsilon = 1e-12);
    }

    #[test]
    fn adaptive_handles_truncated_exponential() {
        let mut f = |x: f64| (-x).exp();
        let est = adaptive_gl(&mut f, 0.0, 60.0, &[], 1e-12, 0.0, 200).unwrap();
        assert!(est.converged);
        assert_relative_eq!(est.value, 1.0, epsilon = 1e-11);
        assert!(est.err <= 1e-10);
    }

    #[test]
    fn adaptive_with_breakpoint_on_kink() {
        let mut f = |x: f64| (x - 1.0 / 3.0).abs();
        let est = adaptive_gl(&mut f, 0.0, 1.0, &[1.0 / 3.0], 1e-13, 0.0, 100).unwrap();
        // ∫ |x - 1/3| over [0,1] = (1/3)²/2 + (2/3)²/2 = 5/18
        assert_relative_eq!(est.value, 5.0 / 18.0, epsilon = 1e-13);
        assert!(est.converged);
    }

    #[test]
    fn adaptive_reports_nonconvergence_honestly() {
        // Integrable singularity off the breakpoint grid: the estimator keeps
        // a finite error and flags converged = false once the panel budget is
        // spent.
        let c = 0.123_456_789;
        let mut f = |x: f64| (x - c).abs().powf(-0.5);
        let est = adaptive_gl(&mut f, 0.0, 1.0, &[], 1e-15, 0.0, 12).unwrap();
        assert!(!est.converged);
        assert!(est.err > 0.0);
        // ∫ = 2(√c + √(1−c)); the truncated estimate is in the ballpark.
        let exact = 2.0 * (c.sqrt() + (1.0 - c).sqrt());
        assert!((est.value - exact).abs() / exact < 0.2);
    }

    #[test]
    fn gl_auto_converges_on_smooth_integrand() {
        let mut f = |x: f64| x.sin();
        let est = gl_auto(&mut f, 0.0, std::f64::consts::PI, 1e-13, 0.0, 8, 256).unwrap();
        assert!(est.converged);
        assert_relative_eq!(est.value, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn trapezoid_periodic_is_spectral() {
        // ∫_0^{2π} e^{cos θ} dθ = 2π I_0(1)
        let mut f = |th: f64| th.cos().exp();
        let est =
            trapezoid_periodic_auto(&mut f, 2.0 * std::f64::consts::PI, 1e-13, 0.0, 8, 4096)
                .unwrap();
        assert!(est.converged);
        let i0_1 = 1.266_065_877_752_008_3; // I_0(1)
        assert_relative_eq!(est.value, 2.0 * std::f64::consts::PI * i0_1, epsilon = 1e-12);
    }

    #[test]
    fn non_finite_integrand_is_an_error() {
        let mut f = |x: f64| 1.0 / (x - 0.5);
        let res = adaptive_gl(&mut f, 0.0, 1.0, &[], 1e-6, 0.0, 100);
        // The pole at 0.5 is symmetric, GL nodes never hit it exactly, so the
        // value stays finite; force a NaN instead.
        drop(res);
        let mut g = |x: f64| if x > 0.5 { f64::NAN } else { 1.0 };
        assert!(adaptive_gl(&mut g, 0.0, 1.0, &[], 1e-6, 0.0, 100).is_err());
    }

    proptest! {
        #[test]
        fn adaptive_matches_closed_form_cubics(
            c0 in -5.0..5.0f64,
            c1 in -5.0..5.0f64,
            c2 in -5.0..5.0f64,
            c3 in -5.0..5.0f64,
            b in 0.5..4.0f64,
        ) {
            let mut f = |x: f64| c0 + c1 * x + c2 * x * x + c3 * x.powi(3);
            let est = adaptive_gl(&mut f, -1.0, b, &[], 1e-12, 1e-14, 64).unwrap();
            let prim = |x: f64| c0 * x + c1 * x * x / 2.0 + c2 * x.powi(3) / 3.0 + c3 * x.powi(4) / 4.0;
            let exact = prim(b) - prim(-1.0);
            prop_assert!((est.value - exact).abs() <= 1e-10 * (1.0 + exact.abs()));
        }
    }
}
