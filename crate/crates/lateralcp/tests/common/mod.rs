//! Shared helpers for the integration-test targets: independent reference
//! implementations (kept deliberately naive) and the rubidium parameter set
//! used by the condensate figures.

#![allow(dead_code)]

use lateralcp::config::RunConfig;
use lateralcp::constants::{C, EPS0, HBAR};
use lateralcp::quad::{adaptive_gl, trapezoid_periodic_auto};
use std::f64::consts::PI;

/// Rubidium parameters behind the condensate figure: mass, trap angular
/// frequency, α(0)/ε₀ volume, effective transition frequency.
pub const RB_MASS: f64 = 1.45e-25;
pub const RB_OMEGA_X: f64 = 2.0 * PI * 229.0;
pub const RB_ALPHA_VOLUME: f64 = 47.3e-30;
pub const RB_OMEGA_A: f64 = 2.414e15;

/// Deterministic low-discrepancy samples in [0, 1).
pub fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Pairwise-summation response by direct two-dimensional quadrature of the
/// retarded atom–atom kernel over the surface plane:
///
///   g_pws(k, z) = −(15ħcα₀ / 8π²ε₀) · (1/2π)
///                 ∫₀^∞ dρ ρ (ρ² + z²)^{−7/2} ∫₀^{2π} dθ cos(kρ cos θ),
///
/// normalized so the k → 0 limit reproduces the planar retarded response.
/// The radial integral is truncated at ρ = 60 z (relative tail < 2e-8).
pub fn g_pws_brute_force(k: f64, z_a: f64, alpha0_si: f64) -> f64 {
    let rho_max = 60.0 * z_a;
    let mut radial = |rho: f64| {
        let q = k * rho;
        let ring = if q == 0.0 {
            2.0 * PI
        } else {
            let mut f = |theta: f64| (q * theta.cos()).cos();
            trapezoid_periodic_auto(&mut f, 2.0 * PI, 1e-11, 0.0, 64, 1 << 15)
                .unwrap()
                .value
        };
        rho * (rho * rho + z_a * z_a).powf(-3.5) * ring
    };
    // Break at the height scale and at enough radial oscillation periods for
    // the refinement to resolve the cos(kρ) ringing.
    let mut breaks = vec![z_a];
    if k > 0.0 {
        let period = 2.0 * PI / k;
        let mut edge = period;
        while edge < rho_max {
            breaks.push(edge);
            edge += period;
        }
    }
    let integral = adaptive_gl(&mut radial, 0.0, rho_max, &breaks, 1e-10, 0.0, 6000)
        .expect("pairwise reference quadrature");
    assert!(
        integral.converged,
        "pairwise reference quadrature did not converge"
    );
    let calibration = 15.0 * HBAR * C * alpha0_si / (8.0 * PI * PI * EPS0);
    -calibration / (2.0 * PI) * integral.value
}

/// Configuration preloaded with the condensate-figure caption parameters.
pub fn fig4_run_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    for (k, v) in [
        ("profile.kind", "vgrooves"),
        ("profile.lambda_c", "4um"),
        ("profile.depth", "250nm"),
        ("profile.groove_width_frac", "0.5"),
        ("alpha.model", "lorentz"),
        ("alpha.alpha0_volume_m3", "47.3e-30"),
        ("alpha.omega_a_rad_per_s", "2.414e15"),
        ("bec.mass_kg", "1.45e-25"),
        ("bec.z_cm", "2um"),
        ("bec.tf_radius", "1um"),
    ] {
        cfg.apply_kv(k, v).unwrap();
    }
    cfg.bec.omega_x_rad_per_s = RB_OMEGA_X;
    cfg
}
