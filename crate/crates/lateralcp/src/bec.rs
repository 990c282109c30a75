//! Dipolar frequency shift of a trapped Bose–Einstein condensate above a
//! corrugated surface.
//!
//! The lateral interaction adds a curvature ∂²U/∂x² to the harmonic trap; to
//! first order the relative shift of the dipole frequency is the curvature
//! averaged over the Thomas–Fermi cloud,
//!
//!   γ = ⟨∂²U/∂x²⟩ / (2 m ω_x²)
//!     = −(5 k_c² / 4π m ω_x²) Σ_{n≥1} n² aₙ · Tₙ,
//!
//!   Tₙ = ∫₀¹ dρ ρ (1−ρ²)^{3/2} ∫₀^{2π} dθ g(n k_c, z_cm + ρR sinθ)
//!        · cos(n k_c ρR cosθ),
//!
//! where R is the Thomas–Fermi radius and the cloud column density in the
//! (x, z) plane is (5/2πR⁵)(R² − ρ²)^{3/2}. As R → 0 the average collapses to
//! the single-atom curvature at the trap centre.

use crate::corrugation::CorrugationProfile;
use crate::error::{LcpError, Result};
use crate::interp::Pchip;
use crate::quad;
use crate::response::{ResponseEngine, ResponseMethod, ResponseQuery};
use std::f64::consts::PI;

/// Trap and cloud parameters.
#[derive(Debug, Clone, Copy)]
pub struct BecConfig {
    /// Atomic mass, kg.
    pub mass: f64,
    /// Trap dipole (axial) angular frequency, rad/s.
    pub omega_x: f64,
    /// Height of the cloud centre above the mean surface plane, m.
    pub z_cm: f64,
    /// Thomas–Fermi radius, m (0 recovers the single-atom limit exactly).
    pub tf_radius: f64,
}

impl BecConfig {
    pub fn new(mass: f64, omega_x: f64, z_cm: f64, tf_radius: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("omega_x", omega_x), ("z_cm", z_cm)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(LcpError::InvalidParameter(format!(
                    "BEC parameter {name} must be finite and > 0 (got {v:e})"
                )));
            }
        }
        if !(tf_radius >= 0.0) || !tf_radius.is_finite() {
            return Err(LcpError::InvalidParameter(
                "Thomas–Fermi radius must be finite and ≥ 0".into(),
            ));
        }
        Ok(BecConfig {
            mass,
            omega_x,
            z_cm,
            tf_radius,
        })
    }

    fn check_clearance(&self) -> Result<()> {
        if self.z_cm <= self.tf_radius {
            return Err(LcpError::SurfaceContact(format!(
                "condensate touches the surface: z_cm = {:e} m is not above the \
                 Thomas–Fermi radius {:e} m",
                self.z_cm, self.tf_radius
            )));
        }
        Ok(())
    }
}

/// Normalised Thomas–Fermi column density in the (x, z) plane at in-plane
/// radius ρ from the cloud centre: (5/2πR⁵)(R² − ρ²)^{3/2} for ρ ≤ R.
pub fn tf_column_density(rho: f64, tf_radius: f64) -> f64 {
    assert!(tf_radius > 0.0, "column density needs R > 0");
    if rho.abs() >= tf_radius {
        return 0.0;
    }
    let r2 = tf_radius * tf_radius;
    5.0 / (2.0 * PI * tf_radius.powi(5)) * (r2 - rho * rho).powf(1.5)
}

/// Relative dipole-frequency shift in the point-cloud limit,
/// γ₀ = (∂²U/∂x²)(x = 0, z_cm) / (2 m ω_x²).
pub fn gamma_single_atom(
    profile: &CorrugationProfile,
    engine: &ResponseEngine,
    bec: &BecConfig,
) -> Result<f64> {
    bec.check_clearance()?;
    let curv = crate::corrugation::lateral_curvature(profile, 0.0, bec.z_cm, engine)?;
    Ok(curv / (2.0 * bec.mass * bec.omega_x * bec.omega_x))
}

/// Relative dipole-frequency shift of the finite-size cloud.
pub fn gamma_bec(
    profile: &CorrugationProfile,
    engine: &ResponseEngine,
    bec: &BecConfig,
) -> Result<f64> {
    gamma_bec_with_err(profile, engine, bec).map(|(v, _)| v)
}

pub fn gamma_bec_with_err(
    profile: &CorrugationProfile,
    engine: &ResponseEngine,
    bec: &BecConfig,
) -> Result<(f64, f64)> {
    bec.check_clearance()?;
    let r = bec.tf_radius;
    if r == 0.0 {
        // The R → 0 limit is exact; any finite radius runs the full average.
        return Ok((gamma_single_atom(profile, engine, bec)?, 0.0));
    }
    if engine.method == ResponseMethod::Pfa {
        return gamma_pfa(profile, engine, bec);
    }

    let kc = profile.k_c();
    let z_lo = bec.z_cm - r;
    let z_hi = bec.z_cm + r;
    let rel_tol = engine.rel_tol;
    let trap = 2.0 * bec.mass * bec.omega_x * bec.omega_x;

    // Quadrature engines get a per-harmonic interpolation cache over the
    // cloud's height range; closed-form engines are cheap enough to sample
    // directly.
    let needs_cache = engine.method == ResponseMethod::QuadratureExact;
    let mut work = engine.clone();

    let mut gamma = 0.0_f64;
    let mut err = 0.0_f64;
    let mut amp_scale = 0.0_f64;
    let mut small_run = 0_usize;
    let mut last_bound = f64::INFINITY;

    for n in 1..=profile.n_max() {
        let an = profile.fourier_coefficient(n);
        let kn = n as f64 * kc;
        // coefₙ with γ = Σ coefₙ·Tₙ, coefₙ = −5 (n k_c)² aₙ / (4π m ω²).
        let coef = -5.0 * kn * kn * an / (2.0 * PI * trap);
        if coef == 0.0 {
            last_bound = 0.0;
            small_run += 1;
            if small_run >= 2 && amp_scale > 0.0 {
                return Ok((gamma, err));
            }
            continue;
        }
        if needs_cache {
            work.build_cache(&[kn], z_lo * (1.0 - 1e-12), z_hi * (1.0 + 1e-12), 65)?;
        }
        let term_abs_tol = 0.1 * rel_tol * amp_scale / coef.abs();
        let g_sampler = |z: f64| work.g_with_err(&ResponseQuery::new(kn, z)?);
        let (t_n, t_err) = cloud_average(&g_sampler, kn, bec.z_cm, r, rel_tol, term_abs_tol)?;
        let g_rel = if needs_cache { 10.0 * rel_tol } else { 1e-13 };
        let bound = coef.abs() * t_n.abs();
        amp_scale = amp_scale.max(bound);
        gamma += coef * t_n;
        err += coef.abs() * (t_err + g_rel * t_n.abs());
        last_bound = bound;
        if bound <= 0.25 * rel_tol * amp_scale {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 2 {
            return Ok((gamma, err + 2.0 * bound));
        }
    }

    let series_exact = matches!(
        profile,
        CorrugationProfile::Sinusoid { .. } | CorrugationProfile::FourierSeries { .. }
    );
    if series_exact || amp_scale == 0.0 || last_bound <= rel_tol * amp_scale {
        return Ok((gamma, err + 2.0 * last_bound.min(amp_scale)));
    }
    Err(LcpError::Accuracy {
        context: format!(
            "BEC harmonic series truncated at n_max = {}",
            profile.n_max()
        ),
        achieved: last_bound / amp_scale,
        requested: rel_tol,
        value: gamma,
    })
}

/// PFA cloud average: the local rule ∂²U/∂x² = h″(x)·g(0, z) averaged over
/// the column density. Piecewise-linear profiles have h″ = 0 almost
/// everywhere, so their PFA shift vanishes identically.
fn gamma_pfa(
    profile: &CorrugationProfile,
    engine: &ResponseEngine,
    bec: &BecConfig,
) -> Result<(f64, f64)> {
    let r = bec.tf_radius;
    let trap = 2.0 * bec.mass * bec.omega_x * bec.omega_x;
    if matches!(profile, CorrugationProfile::VGrooves { .. }) {
        return Ok((0.0, 0.0));
    }
    // g(0, z) over the cloud height range through a monotone-cubic table so
    // that models needing quadrature stay affordable.
    let z_lo = (bec.z_cm - r) * (1.0 - 1e-12);
    let z_hi = (bec.z_cm + r) * (1.0 + 1e-12);
    let n_z = 65;
    let ratio = (z_hi / z_lo).powf(1.0 / (n_z as f64 - 1.0));
    let mut zs: Vec<f64> = (0..n_z).map(|i| z_lo * ratio.powi(i as i32)).collect();
    zs[n_z - 1] = z_hi;
    let vals = crate::exec::map_ordered(&zs, |&z| engine.g_pfa_with_err(z));
    let mut g0 = Vec::with_capacity(n_z);
    for v in vals {
        g0.push(v?.0);
    }
    let table = Pchip::new(zs, g0)?;

    let kc = profile.k_c();
    // The curvature profile of the remaining variants is a finite cosine
    // series; average each harmonic with the same cloud kernel, replacing
    // g(n k_c, ·) by g(0, ·).
    let mut gamma = 0.0_f64;
    let mut err = 0.0_f64;
    for n in 1..=profile.n_max() {
        let an = profile.fourier_coefficient(n);
        if an == 0.0 {
            continue;
        }
        let kn = n as f64 * kc;
        let coef = -5.0 * kn * kn * an / (2.0 * PI * trap);
        let g_sampler = |z: f64| table.eval(z).map(|v| (v, 0.0));
        let (t_n, t_err) = cloud_average(&g_sampler, kn, bec.z_cm, r, engine.rel_tol, 0.0)?;
        gamma += coef * t_n;
        err += coef.abs() * (t_err + 1e-6 * t_n.abs());
    }
    Ok((gamma, err))
}

/// Evaluates Tₙ = ∫₀¹dρ ρ(1−ρ²)^{3/2} ∫₀^{2π}dθ g(z_cm + ρR sinθ)·cos(k ρR cosθ)
/// by level-doubled product quadrature (Gauss–Legendre in φ with ρ = sin φ,
/// trapezoid in the periodic θ).
fn cloud_average<F>(
    g: &F,
    k: f64,
    z_cm: f64,
    r: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<(f64, f64)>,
{
    let mut prev: Option<f64> = None;
    let mut last_diff = 0.0_f64;
    for level in 0..=4_u32 {
        let n_phi = 32_usize << level;
        let n_theta = 64_usize << level;
        let rule = quad::gauss_legendre(n_phi);
        let dtheta = 2.0 * PI / n_theta as f64;
        let mut total = 0.0_f64;
        for (&node, &w) in rule.nodes.iter().zip(rule.weights.iter()) {
            let phi = 0.25 * PI * (node + 1.0);
            let (sin_phi, cos_phi) = phi.sin_cos();
            let rho = sin_phi;
            let jacobian = sin_phi * cos_phi.powi(4);
            let mut ring = 0.0_f64;
            for j in 0..n_theta {
                let theta = dtheta * j as f64;
                let (sin_t, cos_t) = theta.sin_cos();
                let z = z_cm + rho * r * sin_t;
                let (gv, _) = g(z)?;
                ring += gv * (k * rho * r * cos_t).cos();
            }
            total += w * 0.25 * PI * jacobian * ring * dtheta;
        }
        if let Some(p) = prev {
            last_diff = (total - p).abs();
            if last_diff <= rel_tol * total.abs() + abs_tol {
                return Ok((total, last_diff));
            }
        }
        prev = Some(total);
    }
    Err(LcpError::Accuracy {
        context: format!("cloud average at k = {k:e}"),
        achieved: last_diff / prev.unwrap_or(1.0).abs().max(f64::MIN_POSITIVE),
        requested: rel_tol,
        value: prev.unwrap_or(0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarizability::PolarizabilityModel;
    use approx::assert_relative_eq;

    fn fig_profile(lambda_c: f64) -> CorrugationProfile {
        CorrugationProfile::v_grooves(lambda_c, 250e-9, 0.5 * lambda_c, 50).unwrap()
    }

    fn cp_engine() -> ResponseEngine {
        let model = PolarizabilityModel::static_from_volume(47.3e-30).unwrap();
        ResponseEngine::new(ResponseMethod::AnalyticCp, model)
    }

    fn bec(r: f64) -> BecConfig {
        BecConfig::new(1.45e-25, 2.0 * PI * 229.0, 2e-6, r).unwrap()
    }

    #[test]
    fn column_density_normalised() {
        let r = 1e-6;
        let mut f = |rho: f64| 2.0 * PI * rho * tf_column_density(rho, r);
        let est = quad::adaptive_gl(&mut f, 0.0, r, &[], 1e-9, 0.0, 200).unwrap();
        assert_relative_eq!(est.value, 1.0, max_relative = 1e-6);
        assert_eq!(tf_column_density(1.1 * r, r), 0.0);
    }

    #[test]
    fn zero_radius_identical_to_single_atom() {
        let p = fig_profile(4e-6);
        let engine = cp_engine();
        let b = bec(0.0);
        let g_bec = gamma_bec(&p, &engine, &b).unwrap();
        let g_atom = gamma_single_atom(&p, &engine, &b).unwrap();
        assert_eq!(g_bec, g_atom);
        assert!(g_atom > 0.0);
    }

    #[test]
    fn small_radius_limit_recovers_single_atom() {
        // k_c z_cm ≈ 3: near the response peak used by the frozen figure.
        let lambda_c = 2.0 * PI * 2e-6 / 3.0;
        let p = fig_profile(lambda_c);
        let engine = cp_engine();
        let g_atom = gamma_single_atom(&p, &engine, &bec(0.0)).unwrap();
        let g_small = gamma_bec(&p, &engine, &bec(1e-9)).unwrap();
        assert!(
            (g_small / g_atom - 1.0).abs() <= 1e-3,
            "gamma({:e})/gamma(0) = {}",
            1e-9,
            g_small / g_atom
        );
    }

    #[test]
    fn shift_grows_with_cloud_size() {
        let lambda_c = 2.0 * PI * 2e-6 / 3.0;
        let p = fig_profile(lambda_c);
        let engine = cp_engine();
        let g0 = gamma_bec(&p, &engine, &bec(0.0)).unwrap();
        let g_half = gamma_bec(&p, &engine, &bec(0.5e-6)).unwrap();
        let g_one = gamma_bec(&p, &engine, &bec(1e-6)).unwrap();
        assert!(g0 > 0.0);
        assert!(g_half > g0, "gamma(0.5um) = {g_half:e} vs gamma(0) = {g0:e}");
        assert!(g_one > g_half, "gamma(1um) = {g_one:e} vs gamma(0.5um) = {g_half:e}");
    }

    #[test]
    fn pfa_shift_vanishes_for_vgrooves_only() {
        let model = PolarizabilityModel::static_from_volume(47.3e-30).unwrap();
        let pfa = ResponseEngine::new(ResponseMethod::Pfa, model);
        let b = bec(0.8e-6);
        let vg = fig_profile(4e-6);
        assert_eq!(gamma_bec(&vg, &pfa, &b).unwrap(), 0.0);
        let sin = CorrugationProfile::sinusoid(4e-6, 100e-9).unwrap();
        let g_sin = gamma_bec(&sin, &pfa, &b).unwrap();
        assert!(g_sin != 0.0);
        // Against the closed-form curvature averaged by an independent route:
        // for a static model g(0, z) ∝ z⁻⁵ exactly.
        let g_atom = gamma_single_atom(&sin, &pfa, &bec(0.0)).unwrap();
        assert!(g_sin.signum() == g_atom.signum());
    }

    #[test]
    fn surface_contact_rejected() {
        let p = fig_profile(4e-6);
        let engine = cp_engine();
        let b = BecConfig::new(1.45e-25, 2.0 * PI * 229.0, 1e-6, 1.5e-6).unwrap();
        assert!(matches!(
            gamma_bec(&p, &engine, &b),
            Err(LcpError::SurfaceContact(_))
        ));
    }

    #[test]
    fn quadrature_engine_uses_cache_and_matches_closed_form() {
        let model = PolarizabilityModel::static_from_volume(47.3e-30).unwrap();
        let exact = ResponseEngine::new(ResponseMethod::QuadratureExact, model)
            .with_tolerances(1e-4, 0.0)
            .unwrap();
        let cp = cp_engine();
        let lambda_c = 2.0 * PI * 2e-6 / 3.0;
        let p = fig_profile(lambda_c);
        let b = bec(0.5e-6);
        let g_q = gamma_bec(&p, &exact, &b).unwrap();
        let g_cp = gamma_bec(&p, &cp, &b).unwrap();
        assert_relative_eq!(g_q, g_cp, max_relative = 5e-3);
    }

    #[test]
    fn config_validation() {
        assert!(BecConfig::new(0.0, 1.0, 1e-6, 0.0).is_err());
        assert!(BecConfig::new(1e-25, -1.0, 1e-6, 0.0).is_err());
        assert!(BecConfig::new(1e-25, 1.0, 1e-6, -1e-7).is_err());
        assert!(BecConfig::new(1e-25, 1.0, 1e-6, f64::INFINITY).is_err());
    }
}
