//! First-order nonspecular reflection on a corrugated perfect reflector,
//! evaluated on the imaginary frequency axis.
//!
//! Conventions: all lateral wavevectors enter through their magnitudes
//! `k_out`, `k_in` plus the relative angle `delta_phi` between outgoing and
//! incoming directions (the response cannot depend on the absolute corrugation
//! direction). On the imaginary axis the normal components are
//! κ = √(ξ²/c² + k²); choosing k_z = +iκ (outgoing) and −iκ (incoming) makes
//! every quantity below real.

use crate::constants::C;
use crate::error::{LcpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

/// One (outgoing, incoming) plane-wave pair at imaginary frequency ξ.
#[derive(Debug, Clone, Copy)]
pub struct ScatterKinematics {
    /// Imaginary frequency, rad/s (> 0).
    pub xi: f64,
    /// Outgoing lateral wavevector magnitude, rad/m (≥ 0).
    pub k_out: f64,
    /// Incoming lateral wavevector magnitude, rad/m (≥ 0).
    pub k_in: f64,
    /// Angle from the incoming to the outgoing lateral direction, rad.
    pub delta_phi: f64,
    /// κ for the outgoing leg, √(ξ²/c² + k_out²).
    pub kappa_out: f64,
    /// κ for the incoming leg.
    pub kappa_in: f64,
}

impl ScatterKinematics {
    pub fn new(xi: f64, k_out: f64, k_in: f64, delta_phi: f64) -> Result<Self> {
        if !(xi > 0.0) || !xi.is_finite() {
            return Err(LcpError::InvalidParameter(
                "imaginary frequency must be finite and > 0".into(),
            ));
        }
        if !(k_out >= 0.0) || !(k_in >= 0.0) || !k_out.is_finite() || !k_in.is_finite() {
            return Err(LcpError::InvalidParameter(
                "lateral wavevector magnitudes must be finite and ≥ 0".into(),
            ));
        }
        if !delta_phi.is_finite() {
            return Err(LcpError::InvalidParameter("delta_phi must be finite".into()));
        }
        Ok(ScatterKinematics {
            xi,
            k_out,
            k_in,
            delta_phi,
            kappa_out: (xi / C).hypot(k_out),
            kappa_in: (xi / C).hypot(k_in),
        })
    }
}

/// First-order reflection matrix element (per unit corrugation amplitude) of a
/// perfectly conducting corrugated mirror, outgoing polarization first.
///
/// In the specular limit (k_out = k_in, delta_phi = 0) the matrix is diagonal
/// and equals 2κ·r_p with r_TE = −1, r_TM = +1.
pub fn reflection_first_order_pc(
    p_out: Polarization,
    p_in: Polarization,
    kin: &ScatterKinematics,
) -> Result<f64> {
    let c = kin.delta_phi.cos();
    let s = kin.delta_phi.sin();
    use Polarization::*;
    match (p_out, p_in) {
        (Te, Te) => Ok(-2.0 * kin.kappa_in * c),
        (Te, Tm) => Ok(-2.0 * (kin.xi / C) * s),
        (Tm, Te) => {
            if kin.kappa_out == 0.0 {
                return Err(LcpError::SingularKinematics(
                    "TM,TE element undefined at kappa_out = 0".into(),
                ));
            }
            Ok(-2.0 * (kin.xi * kin.kappa_in / (C * kin.kappa_out)) * s)
        }
        (Tm, Tm) => {
            if kin.kappa_out == 0.0 {
                return Err(LcpError::SingularKinematics(
                    "TM,TM element undefined at kappa_out = 0".into(),
                ));
            }
            Ok(2.0 * kin.k_out * kin.k_in / kin.kappa_out
                + 2.0 * (kin.xi / C) * (kin.xi / C) * c / kin.kappa_out)
        }
    }
}

/// Scalar product of outgoing and incoming polarization unit vectors on the
/// imaginary axis (real with the ±iκ branch choice). Singular combinations at
/// ξ = 0 are impossible here because kinematics require ξ > 0.
pub fn polarization_overlap(
    p_out: Polarization,
    p_in: Polarization,
    kin: &ScatterKinematics,
) -> Result<f64> {
    let cphi = kin.delta_phi.cos();
    let sphi = kin.delta_phi.sin();
    let cx = C / kin.xi;
    use Polarization::*;
    match (p_out, p_in) {
        (Te, Te) => Ok(cphi),
        (Te, Tm) => Ok(cx * kin.kappa_in * sphi),
        (Tm, Te) => Ok(cx * kin.kappa_out * sphi),
        (Tm, Tm) => Ok(-cx * cx * (kin.kappa_out * kin.kappa_in * cphi + kin.k_out * kin.k_in)),
    }
}

/// Polarization-summed perfect-conductor kernel at height `z_a`:
///
///   Σ_{pp'} ⟨ε_p|ε_{p'}⟩ · R_{pp'} · e^{−(κ_out+κ_in) z_a} / (2 κ_in)
///
/// evaluated in a combined form with no intermediate 1/ξ² factors:
///
///   −(c²/ξ²) · e^{−(κ_out+κ_in) z_a} · B,
///   B = 2ξ²/c² + k_out·k_in·cosΔφ · (1 + ξ²/(c² κ_out κ_in)) + k_out²k_in²/(κ_out κ_in).
pub fn integrand_sum_pc(kin: &ScatterKinematics, z_a: f64) -> Result<f64> {
    if !(z_a > 0.0) {
        return Err(LcpError::InvalidParameter(
            "atom height must be positive".into(),
        ));
    }
    // Work in the scale-free variables used by `reduced_kernel`.
    let t = kin.xi * z_a / C;
    let u = kin.k_out * z_a;
    let v = kin.k_in * z_a;
    let cphi = kin.delta_phi.cos();
    let m = reduced_kernel_uv(t, u, v, u * v * cphi);
    // m = z_a² · B · e^{−(κ_out+κ_in) z_a}; kernel = −(c²/ξ²) B e^{···}.
    Ok(-(m / (t * t)))
}

/// Smooth reduced kernel for the triple quadrature of the response function.
///
/// In units of the atom height z (t = ξz/c, u = |k'|z, θ = angle between k'
/// and the corrugation vector, ζ = k·z):
///
///   m(t, u, θ; ζ) = e^{−(w_out + w_in)} · [ 2t² + u(u − ζcosθ)(1 + t²/W) + u²v²/W ]
///
/// with v² = u² + ζ² − 2uζcosθ, w_out = √(t²+u²), w_in = √(t²+v²) and
/// W = w_out·w_in. The 1/ξ² singularities of the factored pieces cancel in
/// this form; W ≥ t² and W ≥ uv keep every division benign, and m → 0 as
/// W → 0.
pub fn reduced_kernel(t: f64, u: f64, theta: f64, zeta: f64) -> f64 {
    let ct = theta.cos();
    let dot = u * (u - zeta * ct); // k'·(k'−k) in units of 1/z²
    let v2 = u * u + zeta * zeta - 2.0 * u * zeta * ct;
    let v = v2.max(0.0).sqrt();
    reduced_kernel_uv(t, u, v, dot)
}

/// Same kernel parametrized by the two magnitudes and the lateral dot product
/// `dot` = k_out·k_in·cosΔφ (in 1/z² units).
fn reduced_kernel_uv(t: f64, u: f64, v: f64, dot: f64) -> f64 {
    let w_out = t.hypot(u);
    let w_in = t.hypot(v);
    let w = w_out * w_in;
    if w == 0.0 {
        return 0.0;
    }
    let bracket = 2.0 * t * t + dot * (1.0 + t * t / w) + u * u * v * v / w;
    (-(w_out + w_in)).exp() * bracket
}
