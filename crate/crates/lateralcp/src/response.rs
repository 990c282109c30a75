//! The response function g(k, z_A) relating each lateral Fourier component of
//! a corrugation to the first-order interaction energy, together with its
//! closed-form limits and the PFA / PWS approximations.
//!
//! Exact evaluation reduces to a smooth triple quadrature in scale-free
//! variables (t = ξz/c, u = |k′|z, θ):
//!
//!   g(k, z) = −(ħc / 8π³ε₀ z⁵) ∫₀^∞ dt α(i·ct/z) ∫₀^∞ du·u ∫₀^{2π} dθ m(t,u,θ; kz)
//!
//! with the reduced kernel `scattering::reduced_kernel`. Closed forms:
//!
//!   retarded (static α):  g = −(3ħcα(0)/8π²ε₀z⁵)·F(kz),
//!       F(Z) = e^{−Z}(1 + Z + 16Z²/45 + Z³/45)
//!   van der Waals:        g = −(ħ·G(kz)/64π²ε₀z⁴)·∫₀^∞α(iξ)dξ,
//!       G(Z) = Z²[2K₂(Z) + Z·K₃(Z)],  G(0) = 12
//!   pairwise summation:   g_PWS = −(3ħcα(0)/8π²ε₀z⁵)·F_PWS(kz),
//!       F_PWS(Z) = e^{−Z}(1 + Z + Z²/3)

use crate::bessel;
use crate::constants::{C, EPS0, HBAR};
use crate::error::{LcpError, Result};
use crate::exec;
use crate::interp::Pchip;
use crate::polarizability::PolarizabilityModel;
use crate::quad;
use crate::scattering::reduced_kernel;
use std::cell::Cell;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Dimensionless truncation of the frequency integral (t = ξz/c); the kernel
/// decays at least as e^{−2t}, so t = 50 leaves a relative tail below e^{−90}.
const T_MAX: f64 = 50.0;
/// The u integral is truncated at kz + U_SPAN; the integrand is suppressed by
/// e^{−2(u − kz)} beyond u = kz.
const U_SPAN: f64 = 50.0;

/// Tolerance split between the nested quadratures. The reported error budget
/// 0.5 + 0.25 + 0.1 < 1 keeps a converged evaluation inside `rel_tol`.
const OUTER_FRAC: f64 = 0.5;
const U_FRAC: f64 = 0.25;
const THETA_FRAC: f64 = 0.1;

/// Retarded-regime shape function F(Z) (F(0) = 1, strictly decreasing).
pub fn shape_cp(zeta: f64) -> f64 {
    (-zeta).exp() * (1.0 + zeta + 16.0 * zeta * zeta / 45.0 + zeta.powi(3) / 45.0)
}

/// Pairwise-summation shape function F_PWS(Z) = e^{−Z}(1 + Z + Z²/3).
pub fn shape_pws(zeta: f64) -> f64 {
    (-zeta).exp() * (1.0 + zeta + zeta * zeta / 3.0)
}

/// Van der Waals shape function G(Z) = Z²[2K₂(Z) + Z·K₃(Z)], G(0) = 12.
pub fn shape_vdw(zeta: f64) -> f64 {
    assert!(zeta >= 0.0, "shape_vdw requires Z >= 0");
    if zeta < 1e-6 {
        // Small-argument expansion: G = 12 − 2Z² + O(Z⁴ ln Z).
        12.0 - 2.0 * zeta * zeta
    } else {
        zeta * zeta * (2.0 * bessel::k2(zeta) + zeta * bessel::k3(zeta))
    }
}

/// Planar retarded Casimir–Polder potential U⁰(z) = −3ħcα(0)/(32π²ε₀z⁴);
/// its height derivative links the k → 0 response to the proximity force
/// rule, g(0, z) = −dU⁰/dz.
pub fn u0_plane_cp(alpha0_si: f64, z_a: f64) -> f64 {
    -3.0 * HBAR * C * alpha0_si / (32.0 * PI * PI * EPS0 * z_a.powi(4))
}

/// Magnitude of the retarded prefactor: g = −cp_prefactor·F(kz).
fn cp_prefactor(alpha0_si: f64, z_a: f64) -> f64 {
    3.0 * HBAR * C * alpha0_si / (8.0 * PI * PI * EPS0 * z_a.powi(5))
}

/// Closed-form ratios carry only rounding error.
fn closed_ratio(v: f64) -> (f64, f64) {
    (v, 1e-14 * v.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseMethod {
    /// Full triple quadrature of the scattering kernel.
    QuadratureExact,
    /// Retarded closed form (exact for a frequency-independent α).
    AnalyticCp,
    /// Van der Waals closed form (needs ∫α dξ).
    AnalyticVdw,
    /// Proximity force approximation: g(k, z) ≈ g(0, z).
    Pfa,
    /// Pairwise summation, calibrated in the planar retarded limit.
    Pws,
}

impl fmt::Display for ResponseMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResponseMethod::QuadratureExact => "exact",
            ResponseMethod::AnalyticCp => "analytic-cp",
            ResponseMethod::AnalyticVdw => "analytic-vdw",
            ResponseMethod::Pfa => "pfa",
            ResponseMethod::Pws => "pws",
        };
        f.write_str(s)
    }
}

impl FromStr for ResponseMethod {
    type Err = LcpError;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "exact" | "quadrature" | "quadrature-exact" => Ok(ResponseMethod::QuadratureExact),
            "analytic-cp" | "cp" => Ok(ResponseMethod::AnalyticCp),
            "analytic-vdw" | "vdw" => Ok(ResponseMethod::AnalyticVdw),
            "pfa" => Ok(ResponseMethod::Pfa),
            "pws" => Ok(ResponseMethod::Pws),
            other => Err(LcpError::Config(format!(
                "unknown method `{other}` (expected exact|analytic-cp|analytic-vdw|pfa|pws)"
            ))),
        }
    }
}

/// A (k, z_A) evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct ResponseQuery {
    pub k: f64,
    pub z_a: f64,
}

impl ResponseQuery {
    pub fn new(k: f64, z_a: f64) -> Result<Self> {
        if !(k >= 0.0) || !k.is_finite() {
            return Err(LcpError::InvalidParameter(
                "corrugation wavenumber k must be finite and ≥ 0".into(),
            ));
        }
        if !(z_a > 0.0) || !z_a.is_finite() {
            return Err(LcpError::InvalidParameter(
                "atom height z_a must be finite and > 0".into(),
            ));
        }
        Ok(ResponseQuery { k, z_a })
    }
}

/// Cached g values on a (k, z) grid: one monotone-cubic interpolant in z per
/// distinct k. Interpolation error on held-out points stays within 10× the
/// engine tolerance (validated by the test suite).
#[derive(Debug, Clone)]
pub struct ZGridCache {
    entries: Vec<(f64, Pchip)>,
    z_lo: f64,
    z_hi: f64,
}

impl ZGridCache {
    fn lookup(&self, k: f64, z: f64) -> Option<&Pchip> {
        if !(z >= self.z_lo && z <= self.z_hi) {
            return None;
        }
        self.entries
            .iter()
            .find(|(kk, _)| (kk - k).abs() <= 1e-9 * kk.abs().max(k.abs()).max(1.0))
            .map(|(_, p)| p)
    }
}

/// Evaluator for g(k, z_A) with a selectable method, polarizability model,
/// quadrature tolerances and an optional z-grid cache.
#[derive(Debug, Clone)]
pub struct ResponseEngine {
    pub method: ResponseMethod,
    pub model: PolarizabilityModel,
    pub rel_tol: f64,
    pub abs_tol: f64,
    cache: Option<ZGridCache>,
}

impl ResponseEngine {
    pub fn new(method: ResponseMethod, model: PolarizabilityModel) -> Self {
        ResponseEngine {
            method,
            model,
            rel_tol: 1e-6,
            abs_tol: 0.0,
            cache: None,
        }
    }

    pub fn with_tolerances(mut self, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        if !(rel_tol > 0.0 && rel_tol < 0.5) || !rel_tol.is_finite() {
            return Err(LcpError::InvalidParameter(
                "rel_tol must lie in (0, 0.5)".into(),
            ));
        }
        if !(abs_tol >= 0.0) || !abs_tol.is_finite() {
            return Err(LcpError::InvalidParameter(
                "abs_tol must be finite and ≥ 0".into(),
            ));
        }
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        Ok(self)
    }

    /// Response function value, J/m.
    pub fn g(&self, q: &ResponseQuery) -> Result<f64> {
        self.g_with_err(q).map(|(v, _)| v)
    }

    /// Response function with a conservative absolute error estimate.
    pub fn g_with_err(&self, q: &ResponseQuery) -> Result<(f64, f64)> {
        if let Some(cache) = &self.cache {
            if let Some(interp) = cache.lookup(q.k, q.z_a) {
                let v = interp.eval(q.z_a)?;
                // Interpolation is validated to 10× the quadrature tolerance.
                return Ok((v, 10.0 * self.rel_tol * v.abs()));
            }
        }
        self.g_direct_with_err(q.k, q.z_a)
    }

    /// g(0, z_A) — the proximity-force building block −dU⁰/dz_A — evaluated
    /// by this engine's own method (the PFA method defers to the closed form
    /// for a static model and to quadrature otherwise).
    pub fn g_pfa(&self, z_a: f64) -> Result<f64> {
        self.g_pfa_with_err(z_a).map(|(v, _)| v)
    }

    /// As [`Self::g_pfa`], with the error estimate.
    pub fn g_pfa_with_err(&self, z_a: f64) -> Result<(f64, f64)> {
        let q = ResponseQuery::new(0.0, z_a)?;
        match self.method {
            ResponseMethod::Pfa => self.g_direct_with_err(0.0, z_a),
            _ => self.g_with_err(&q),
        }
    }

    /// Deviation ratio ρ_PFA = g(k, z)/g(0, z) for this engine's method.
    pub fn rho_pfa(&self, q: &ResponseQuery) -> Result<f64> {
        self.rho_pfa_with_err(q).map(|(v, _)| v)
    }

    pub fn rho_pfa_with_err(&self, q: &ResponseQuery) -> Result<(f64, f64)> {
        let zeta = q.k * q.z_a;
        match self.method {
            ResponseMethod::AnalyticCp => Ok(closed_ratio(shape_cp(zeta))),
            ResponseMethod::Pws => Ok(closed_ratio(shape_pws(zeta))),
            ResponseMethod::AnalyticVdw => Ok(closed_ratio(shape_vdw(zeta) / 12.0)),
            ResponseMethod::Pfa => Ok((1.0, 0.0)),
            ResponseMethod::QuadratureExact => {
                let (num, num_err) = self.g_with_err(q)?;
                let (den, den_err) = self.g_with_err(&ResponseQuery::new(0.0, q.z_a)?)?;
                let rho = num / den;
                let err = rho.abs() * (num_err / num.abs() + den_err / den.abs());
                Ok((rho, err))
            }
        }
    }

    /// Deviation ratio ρ_PWS = g(k, z)/g_PWS(k, z). The PWS normalization is
    /// fixed in the planar retarded limit, so the ratio is undefined for the
    /// van der Waals closed form.
    pub fn rho_pws(&self, q: &ResponseQuery) -> Result<f64> {
        self.rho_pws_with_err(q).map(|(v, _)| v)
    }

    pub fn rho_pws_with_err(&self, q: &ResponseQuery) -> Result<(f64, f64)> {
        let zeta = q.k * q.z_a;
        match self.method {
            ResponseMethod::AnalyticVdw => Err(LcpError::CalibrationDomain(
                "ρ_PWS is calibrated in the retarded limit and is not defined for the \
                 van der Waals closed form"
                    .into(),
            )),
            ResponseMethod::Pws => Ok((1.0, 0.0)),
            ResponseMethod::AnalyticCp => Ok(closed_ratio(shape_cp(zeta) / shape_pws(zeta))),
            ResponseMethod::Pfa => Ok(closed_ratio(1.0 / shape_pws(zeta))),
            ResponseMethod::QuadratureExact => {
                let (num, num_err) = self.g_with_err(q)?;
                let alpha0 = self.model.alpha_static()?;
                let den = -cp_prefactor(alpha0, q.z_a) * shape_pws(zeta);
                let rho = num / den;
                let err = (num_err / den).abs();
                Ok((rho, err))
            }
        }
    }

    /// Builds the z-grid cache: for every k in `ks`, g is evaluated on an
    /// `n_z`-point geometric grid spanning [z_lo, z_hi] and interpolated
    /// monotone-cubically. Grid points are evaluated through the worker pool;
    /// results are deterministic regardless of thread count. Repeated calls
    /// with the same span extend the cache with the new k values; a call with
    /// a different span replaces it.
    pub fn build_cache(&mut self, ks: &[f64], z_lo: f64, z_hi: f64, n_z: usize) -> Result<()> {
        if !(z_lo > 0.0 && z_hi > z_lo) {
            return Err(LcpError::InvalidParameter(
                "cache span requires 0 < z_lo < z_hi".into(),
            ));
        }
        if n_z < 8 {
            return Err(LcpError::InvalidParameter(
                "cache grid needs at least 8 points".into(),
            ));
        }
        let keep_existing = matches!(&self.cache,
            Some(c) if c.z_lo == z_lo && c.z_hi == z_hi);
        if !keep_existing {
            self.cache = None;
        }
        let ratio = (z_hi / z_lo).powf(1.0 / (n_z as f64 - 1.0));
        let mut zs: Vec<f64> = (0..n_z)
            .map(|i| z_lo * ratio.powi(i as i32))
            .collect();
        zs[n_z - 1] = z_hi; // close the span exactly despite rounding
        let mut entries = Vec::with_capacity(ks.len());
        for &k in ks {
            if let Some(c) = &self.cache {
                if c.lookup(k, 0.5 * (z_lo + z_hi)).is_some() {
                    continue; // already cached for this k
                }
            }
            let values = exec::map_ordered(&zs, |&z| self.g_direct_with_err(k, z));
            let mut g = Vec::with_capacity(n_z);
            for v in values {
                g.push(v?.0);
            }
            entries.push((k, Pchip::new(zs.clone(), g)?));
        }
        match &mut self.cache {
            Some(c) => c.entries.extend(entries),
            None => {
                self.cache = Some(ZGridCache {
                    entries,
                    z_lo,
                    z_hi,
                })
            }
        }
        Ok(())
    }

    pub fn has_cache(&self) -> bool {
        self.cache.is_some()
    }

    /// Cache-free dispatch over the methods.
    fn g_direct_with_err(&self, k: f64, z_a: f64) -> Result<(f64, f64)> {
        let q = ResponseQuery::new(k, z_a)?;
        let zeta = q.k * q.z_a;
        match self.method {
            ResponseMethod::AnalyticCp => {
                let alpha0 = self.model.alpha_static()?;
                let v = -cp_prefactor(alpha0, z_a) * shape_cp(zeta);
                Ok((v, 1e-14 * v.abs()))
            }
            ResponseMethod::Pws => {
                let alpha0 = self.model.alpha_static()?;
                let v = -cp_prefactor(alpha0, z_a) * shape_pws(zeta);
                Ok((v, 1e-14 * v.abs()))
            }
            ResponseMethod::AnalyticVdw => {
                let ia = self.model.integrated_alpha()?;
                let v = -HBAR * shape_vdw(zeta) * ia / (64.0 * PI * PI * EPS0 * z_a.powi(4));
                Ok((v, 1e-12 * v.abs()))
            }
            ResponseMethod::Pfa => match self.model {
                PolarizabilityModel::Static { alpha0 } => {
                    let v = -cp_prefactor(alpha0, z_a);
                    Ok((v, 1e-14 * v.abs()))
                }
                _ => self.g_quadrature(0.0, z_a),
            },
            ResponseMethod::QuadratureExact => self.g_quadrature(q.k, q.z_a),
        }
    }

    /// Triple quadrature of the reduced kernel.
    fn g_quadrature(&self, k: f64, z_a: f64) -> Result<(f64, f64)> {
        let zeta = k * z_a;
        let (xi_lo, xi_hi) = self.model.xi_support();
        let t_lo = (xi_lo * z_a / C).max(0.0);
        let t_hi = (xi_hi * z_a / C).min(T_MAX);
        if !(t_hi > t_lo) {
            return Err(LcpError::Range(format!(
                "polarizability support [{xi_lo:e}, {xi_hi:e}] rad/s does not overlap the \
                 frequency window of the kernel at z_a = {z_a:e} m"
            )));
        }

        let rel_outer = OUTER_FRAC * self.rel_tol;
        let rel_u = U_FRAC * self.rel_tol;
        let rel_theta = THETA_FRAC * self.rel_tol;
        let u_hi = zeta + U_SPAN;
        let u_breaks: Vec<f64> = if zeta > 0.0 && zeta < u_hi {
            vec![zeta]
        } else {
            vec![]
        };
        let mut t_breaks: Vec<f64> = Vec::new();
        if let PolarizabilityModel::Lorentz { omega_a, .. } = self.model {
            let knee = omega_a * z_a / C;
            if knee > t_lo && knee < t_hi {
                t_breaks.push(knee);
            }
        }

        // Convergence bookkeeping shared by the nested closures.
        let worst_u = Cell::new(0.0f64);
        let worst_theta = Cell::new(0.0f64);
        let model_failed = Cell::new(false);

        let model = &self.model;
        let mut t_integrand = |t: f64| -> f64 {
            let alpha = match model.alpha_at(C * t / z_a) {
                Ok(a) => a,
                Err(_) => {
                    model_failed.set(true);
                    return 0.0;
                }
            };
            if alpha == 0.0 {
                return 0.0;
            }
            let mut u_integrand = |u: f64| -> f64 {
                let mut theta_integrand = |th: f64| reduced_kernel(t, u, th, zeta);
                match quad::gl_auto(&mut theta_integrand, 0.0, PI, rel_theta, 0.0, 16, 1024) {
                    Ok(est) => {
                        if !est.converged && est.value != 0.0 {
                            worst_theta
                                .set(worst_theta.get().max((est.err / est.value.abs()).min(1.0)));
                        }
                        // θ-integrand is even about θ = π: ∫₀^{2π} = 2∫₀^π.
                        2.0 * u * est.value
                    }
                    Err(_) => {
                        model_failed.set(true);
                        0.0
                    }
                }
            };
            match quad::adaptive_gl(&mut u_integrand, 0.0, u_hi, &u_breaks, rel_u, 0.0, 600) {
                Ok(est) => {
                    if !est.converged && est.value != 0.0 {
                        worst_u.set(worst_u.get().max((est.err / est.value.abs()).min(1.0)));
                    }
                    alpha * est.value
                }
                Err(_) => {
                    model_failed.set(true);
                    0.0
                }
            }
        };

        let outer = quad::adaptive_gl(
            &mut t_integrand,
            t_lo,
            t_hi,
            &t_breaks,
            rel_outer,
            0.0,
            800,
        )?;
        if model_failed.get() {
            return Err(LcpError::Divergent(
                "kernel quadrature failed to evaluate the integrand".into(),
            ));
        }

        let prefactor = HBAR * C / (8.0 * PI.powi(3) * EPS0 * z_a.powi(5));
        let value = -prefactor * outer.value;
        let inner_rel = worst_u.get().max(U_FRAC * self.rel_tol)
            + worst_theta.get().max(THETA_FRAC * self.rel_tol);
        let err = prefactor * outer.err + value.abs() * inner_rel;

        let achieved = if value != 0.0 {
            err / value.abs()
        } else {
            err
        };
        if !outer.converged || achieved > self.rel_tol.max(1e-15) * 4.0 {
            return Err(LcpError::Accuracy {
                context: format!("g(k={k:e}, z={z_a:e}) kernel quadrature"),
                achieved,
                requested: self.rel_tol,
                value,
            });
        }
        Ok((value, err))
    }
}
