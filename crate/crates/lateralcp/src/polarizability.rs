//! Atomic dynamic polarizability α(iξ) on the imaginary frequency axis.
//!
//! All values are SI polarizabilities (C²·m²/J). The commonly quoted
//! "polarizability volume" α_vol = α/(4πε₀) (m³) is accepted through the
//! `*_from_volume` constructors.

use crate::constants::EPS0;
use crate::error::{LcpError, Result};
use std::io::Read;

/// Relative slack allowed when evaluating a tabulated model at its grid ends,
/// so that integration up to the exact boundary never trips the range check.
const EDGE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone)]
pub enum PolarizabilityModel {
    /// Frequency-independent α(iξ) = α₀ (the retarded/static limit).
    Static { alpha0: f64 },
    /// Single-resonance model α(iξ) = α₀ / (1 + (ξ/ω_a)²).
    Lorentz { alpha0: f64, omega_a: f64 },
    /// Tabulated α(iξ) on a strictly increasing ξ grid (rad/s), interpolated
    /// log-linearly in α. Queries outside the grid span are range errors.
    Tabulated { xi: Vec<f64>, alpha: Vec<f64> },
}

impl PolarizabilityModel {
    /// Static model from a polarizability volume α₀/(4πε₀) in m³.
    pub fn static_from_volume(alpha0_volume_m3: f64) -> Result<Self> {
        if !(alpha0_volume_m3 > 0.0 && alpha0_volume_m3.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "static polarizability volume must be positive and finite".into(),
            ));
        }
        Ok(PolarizabilityModel::Static {
            alpha0: 4.0 * std::f64::consts::PI * EPS0 * alpha0_volume_m3,
        })
    }

    /// Lorentz model from a polarizability volume (m³) and resonance ω_a (rad/s).
    pub fn lorentz_from_volume(alpha0_volume_m3: f64, omega_a: f64) -> Result<Self> {
        if !(alpha0_volume_m3 > 0.0 && alpha0_volume_m3.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "polarizability volume must be positive and finite".into(),
            ));
        }
        if !(omega_a > 0.0 && omega_a.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "resonance frequency must be positive and finite".into(),
            ));
        }
        Ok(PolarizabilityModel::Lorentz {
            alpha0: 4.0 * std::f64::consts::PI * EPS0 * alpha0_volume_m3,
            omega_a,
        })
    }

    /// Tabulated model from parallel arrays (ξ in rad/s, α in SI units).
    pub fn tabulated(xi: Vec<f64>, alpha: Vec<f64>) -> Result<Self> {
        if xi.len() != alpha.len() || xi.len() < 2 {
            return Err(LcpError::InvalidParameter(
                "tabulated polarizability needs ≥ 2 matched (xi, alpha) pairs".into(),
            ));
        }
        if xi[0] < 0.0 || xi.iter().any(|v| !v.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "tabulated xi grid must be finite and non-negative".into(),
            ));
        }
        if xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LcpError::InvalidParameter(
                "tabulated xi grid must be strictly increasing".into(),
            ));
        }
        if alpha.iter().any(|&a| !(a > 0.0) || !a.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "tabulated alpha values must be positive and finite".into(),
            ));
        }
        Ok(PolarizabilityModel::Tabulated { xi, alpha })
    }

    /// Reads a tabulated model from CSV with header `xi_rad_per_s,alpha_si`.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        {
            let headers = rdr
                .headers()
                .map_err(|e| LcpError::Parse(format!("polarizability table: {e}")))?;
            let want = ["xi_rad_per_s", "alpha_si"];
            if headers.len() != 2 || headers.iter().zip(want).any(|(h, w)| h != w) {
                return Err(LcpError::Parse(
                    "polarizability table must have header `xi_rad_per_s,alpha_si`".into(),
                ));
            }
        }
        let mut xi = Vec::new();
        let mut alpha = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| LcpError::Parse(format!("polarizability table: {e}")))?;
            let x: f64 = rec[0]
                .parse()
                .map_err(|_| LcpError::Parse(format!("bad xi value `{}`", &rec[0])))?;
            let a: f64 = rec[1]
                .parse()
                .map_err(|_| LcpError::Parse(format!("bad alpha value `{}`", &rec[1])))?;
            xi.push(x);
            alpha.push(a);
        }
        Self::tabulated(xi, alpha)
    }

    pub fn from_csv_path(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    /// α(iξ) at imaginary frequency ξ ≥ 0 (rad/s).
    pub fn alpha_at(&self, xi_query: f64) -> Result<f64> {
        if !(xi_query >= 0.0) || !xi_query.is_finite() {
            return Err(LcpError::InvalidParameter(
                "imaginary frequency must be finite and ≥ 0".into(),
            ));
        }
        match self {
            PolarizabilityModel::Static { alpha0 } => Ok(*alpha0),
            PolarizabilityModel::Lorentz { alpha0, omega_a } => {
                let r = xi_query / omega_a;
                Ok(alpha0 / (1.0 + r * r))
            }
            PolarizabilityModel::Tabulated { xi, alpha } => {
                let lo = xi[0];
                let hi = *xi.last().unwrap();
                let slack = EDGE_SLACK * hi.max(1.0);
                if xi_query < lo - slack || xi_query > hi + slack {
                    return Err(LcpError::Range(format!(
                        "xi = {xi_query:e} rad/s outside tabulated span [{lo:e}, {hi:e}]"
                    )));
                }
                let q = xi_query.clamp(lo, hi);
                let j = match xi.partition_point(|&v| v <= q) {
                    0 => 0,
                    p if p >= xi.len() => xi.len() - 2,
                    p => p - 1,
                };
                // Log-linear in α, linear in ξ.
                let w = (q - xi[j]) / (xi[j + 1] - xi[j]);
                Ok((alpha[j].ln() + w * (alpha[j + 1].ln() - alpha[j].ln())).exp())
            }
        }
    }

    /// Static polarizability α(0).
    pub fn alpha_static(&self) -> Result<f64> {
        match self {
            PolarizabilityModel::Static { alpha0 }
            | PolarizabilityModel::Lorentz { alpha0, .. } => Ok(*alpha0),
            PolarizabilityModel::Tabulated { .. } => self.alpha_at(0.0),
        }
    }

    /// ∫₀^∞ α(iξ) dξ.
    ///
    /// - Static: divergent (the integral has no UV cutoff) — an error.
    /// - Lorentz: exactly α₀·ω_a·π/2.
    /// - Tabulated: exact integral of the log-linear interpolant over the grid
    ///   span only; no extrapolation beyond the table is attempted.
    pub fn integrated_alpha(&self) -> Result<f64> {
        match self {
            PolarizabilityModel::Static { .. } => Err(LcpError::Divergent(
                "∫ α dξ diverges for a frequency-independent polarizability".into(),
            )),
            PolarizabilityModel::Lorentz { alpha0, omega_a } => {
                Ok(alpha0 * omega_a * std::f64::consts::FRAC_PI_2)
            }
            PolarizabilityModel::Tabulated { xi, alpha } => {
                let mut total = 0.0;
                for j in 0..xi.len() - 1 {
                    let dx = xi[j + 1] - xi[j];
                    let lam = (alpha[j + 1] / alpha[j]).ln() / dx;
                    // ∫ α_j e^{λ(ξ-ξ_j)} dξ over the segment.
                    let seg = if (lam * dx).abs() < 1e-12 {
                        alpha[j] * dx * (1.0 + 0.5 * lam * dx)
                    } else {
                        alpha[j] * (lam * dx).exp_m1() / lam
                    };
                    total += seg;
                }
                Ok(total)
            }
        }
    }

    /// The ξ span on which the model is defined: (0, ∞) for closed forms, the
    /// grid span for tabulated data. Used to clip frequency integrals.
    pub fn xi_support(&self) -> (f64, f64) {
        match self {
            PolarizabilityModel::Static { .. } | PolarizabilityModel::Lorentz { .. } => {
                (0.0, f64::INFINITY)
            }
            PolarizabilityModel::Tabulated { xi, .. } => (xi[0], *xi.last().unwrap()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ALPHA_VOL: f64 = 47.3e-30;
    const OMEGA_A: f64 = 2.414e15;

    #[test]
    fn lorentz_halves_at_resonance() {
        let m = PolarizabilityModel::lorentz_from_volume(ALPHA_VOL, OMEGA_A).unwrap();
        let a0 = m.alpha_static().unwrap();
        assert_relative_eq!(m.alpha_at(OMEGA_A).unwrap(), 0.5 * a0, max_relative = 1e-14);
    }

    #[test]
    fn lorentz_integrated_alpha_closed_form() {
        let m = PolarizabilityModel::lorentz_from_volume(ALPHA_VOL, OMEGA_A).unwrap();
        let a0 = m.alpha_static().unwrap();
        assert_relative_eq!(
            m.integrated_alpha().unwrap(),
            0.5 * std::f64::consts::PI * a0 * OMEGA_A,
            max_relative = 1e-14
        );
    }

    #[test]
    fn static_integrated_alpha_diverges() {
        let m = PolarizabilityModel::static_from_volume(ALPHA_VOL).unwrap();
        assert!(matches!(m.integrated_alpha(), Err(LcpError::Divergent(_))));
    }

    fn lorentz_table(n: usize, xi_max: f64) -> PolarizabilityModel {
        let lorentz = PolarizabilityModel::lorentz_from_volume(ALPHA_VOL, OMEGA_A).unwrap();
        let xi: Vec<f64> = (0..n).map(|i| xi_max * i as f64 / (n - 1) as f64).collect();
        let alpha: Vec<f64> = xi.iter().map(|&x| lorentz.alpha_at(x).unwrap()).collect();
        PolarizabilityModel::tabulated(xi, alpha).unwrap()
    }

    #[test]
    fn tabulated_tracks_its_source_model() {
        let table = lorentz_table(2000, 20.0 * OMEGA_A);
        let lorentz = PolarizabilityModel::lorentz_from_volume(ALPHA_VOL, OMEGA_A).unwrap();
        for &xi in &[0.0, 0.3 * OMEGA_A, OMEGA_A, 7.7 * OMEGA_A] {
            assert_relative_eq!(
                table.alpha_at(xi).unwrap(),
                lorentz.alpha_at(xi).unwrap(),
                max_relative = 1e-4
            );
        }
        // Integral over the span vs the analytic integral restricted to it:
        // ∫₀^X α₀/(1+r²) = α₀ ω_a atan(X/ω_a).
        let a0 = lorentz.alpha_static().unwrap();
        let want = a0 * OMEGA_A * (20.0f64).atan();
        assert_relative_eq!(table.integrated_alpha().unwrap(), want, max_relative = 1e-4);
    }

    #[test]
    fn tabulated_refuses_out_of_span_queries() {
        let table = lorentz_table(50, 5.0 * OMEGA_A);
        assert!(table.alpha_at(6.0 * OMEGA_A).is_err());
        // Boundary with slack is fine.
        assert!(table.alpha_at(5.0 * OMEGA_A * (1.0 + 1e-12)).is_ok());
    }

    #[test]
    fn csv_round_trip() {
        let csv_text = "xi_rad_per_s,alpha_si\n0,5.3e-39\n1e15,2.6e-39\n2e15,1.1e-39\n";
        let m = PolarizabilityModel::from_csv_reader(csv_text.as_bytes()).unwrap();
        assert_relative_eq!(m.alpha_at(0.0).unwrap(), 5.3e-39, max_relative = 1e-12);
        assert_relative_eq!(m.alpha_at(2e15).unwrap(), 1.1e-39, max_relative = 1e-12);
        assert!(PolarizabilityModel::from_csv_reader("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(PolarizabilityModel::static_from_volume(-1.0).is_err());
        assert!(PolarizabilityModel::lorentz_from_volume(ALPHA_VOL, 0.0).is_err());
        assert!(PolarizabilityModel::tabulated(vec![0.0, 1.0], vec![1.0, -2.0]).is_err());
        assert!(PolarizabilityModel::tabulated(vec![1.0, 0.5], vec![1.0, 2.0]).is_err());
    }
}
