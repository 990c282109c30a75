//! Periodic corrugation profiles and the lateral interaction they induce.
//!
//! A profile h(x) with period λ_c decomposes as h(x) = a₀ + Σ_{n≥1} aₙ cos(n k_c x)
//! (the profiles here are even in x, so only cosines appear). To first order
//! in h the laterally varying part of the atom–surface interaction is
//!
//!   U_lat(x, z) = Σ_{n≥1} aₙ cos(n k_c x) · g(n k_c, z),
//!
//! while the proximity force approximation replaces every g(n k_c, z) by
//! g(0, z), i.e. U_PFA = (h(x) − a₀)·g(0, z).

use crate::error::{LcpError, Result};
use crate::response::{ResponseEngine, ResponseMethod, ResponseQuery};
use std::f64::consts::PI;

/// An even, λ_c-periodic surface profile.
#[derive(Debug, Clone)]
pub enum CorrugationProfile {
    /// h(x) = h₀·cos(k_c x): a single harmonic about the mean plane.
    Sinusoid { lambda_c: f64, amplitude: f64 },
    /// Plateaus of height `depth` separated by symmetric triangular grooves
    /// of width `groove_width` (cut down to height 0), grooves centred on
    /// x = (m + 1/2)·λ_c.
    VGrooves {
        lambda_c: f64,
        depth: f64,
        groove_width: f64,
        n_max: usize,
    },
    /// Explicit cosine series a₀ + Σ aₙ cos(n k_c x).
    FourierSeries {
        lambda_c: f64,
        a0: f64,
        an: Vec<f64>,
    },
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(LcpError::InvalidParameter(format!(
            "{name} must be finite and > 0 (got {v:e})"
        )));
    }
    Ok(())
}

impl CorrugationProfile {
    pub fn sinusoid(lambda_c: f64, amplitude: f64) -> Result<Self> {
        check_positive("lambda_c", lambda_c)?;
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(LcpError::InvalidParameter(
                "sinusoid amplitude must be finite and ≥ 0".into(),
            ));
        }
        Ok(CorrugationProfile::Sinusoid {
            lambda_c,
            amplitude,
        })
    }

    pub fn v_grooves(lambda_c: f64, depth: f64, groove_width: f64, n_max: usize) -> Result<Self> {
        check_positive("lambda_c", lambda_c)?;
        check_positive("groove depth", depth)?;
        if !(groove_width > 0.0 && groove_width < lambda_c) {
            return Err(LcpError::InvalidParameter(format!(
                "groove width must lie in (0, lambda_c); got {groove_width:e} with \
                 lambda_c = {lambda_c:e}"
            )));
        }
        if n_max < 1 {
            return Err(LcpError::InvalidParameter(
                "v-groove harmonic cutoff n_max must be ≥ 1".into(),
            ));
        }
        Ok(CorrugationProfile::VGrooves {
            lambda_c,
            depth,
            groove_width,
            n_max,
        })
    }

    pub fn fourier_series(lambda_c: f64, a0: f64, an: Vec<f64>) -> Result<Self> {
        check_positive("lambda_c", lambda_c)?;
        if !a0.is_finite() || an.iter().any(|a| !a.is_finite()) {
            return Err(LcpError::InvalidParameter(
                "Fourier coefficients must be finite".into(),
            ));
        }
        Ok(CorrugationProfile::FourierSeries { lambda_c, a0, an })
    }

    /// Load an explicit cosine series from CSV rows `n,a_n_m` (harmonic
    /// index and coefficient in metres; `n = 0` sets the mean offset).
    /// Harmonics absent from the file are zero; duplicates are rejected.
    pub fn fourier_from_csv_reader<R: std::io::Read>(lambda_c: f64, reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        {
            let headers = rdr
                .headers()
                .map_err(|e| LcpError::Parse(format!("profile table: {e}")))?;
            let want = ["n", "a_n_m"];
            if headers.len() != 2 || headers.iter().zip(want).any(|(h, w)| h != w) {
                return Err(LcpError::Parse(
                    "profile table must have header `n,a_n_m`".into(),
                ));
            }
        }
        let mut entries: Vec<(usize, f64)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| LcpError::Parse(format!("profile table: {e}")))?;
            let n: usize = rec[0]
                .parse()
                .map_err(|_| LcpError::Parse(format!("bad harmonic index `{}`", &rec[0])))?;
            let a: f64 = rec[1]
                .parse()
                .map_err(|_| LcpError::Parse(format!("bad coefficient `{}`", &rec[1])))?;
            if entries.iter().any(|&(m, _)| m == n) {
                return Err(LcpError::Parse(format!("duplicate harmonic index {n}")));
            }
            entries.push((n, a));
        }
        if entries.is_empty() {
            return Err(LcpError::Parse("profile table has no data rows".into()));
        }
        let top = entries.iter().map(|&(n, _)| n).max().unwrap();
        let mut a0 = 0.0;
        let mut an = vec![0.0; top];
        for (n, a) in entries {
            if n == 0 {
                a0 = a;
            } else {
                an[n - 1] = a;
            }
        }
        Self::fourier_series(lambda_c, a0, an)
    }

    pub fn fourier_from_csv_path(lambda_c: f64, path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::fourier_from_csv_reader(lambda_c, file)
    }

    pub fn lambda_c(&self) -> f64 {
        match self {
            CorrugationProfile::Sinusoid { lambda_c, .. }
            | CorrugationProfile::VGrooves { lambda_c, .. }
            | CorrugationProfile::FourierSeries { lambda_c, .. } => *lambda_c,
        }
    }

    /// Fundamental corrugation wavenumber k_c = 2π/λ_c.
    pub fn k_c(&self) -> f64 {
        2.0 * PI / self.lambda_c()
    }

    /// Harmonics carried by the profile: the series representation is exact
    /// at this order for `Sinusoid`/`FourierSeries` and a truncation for
    /// `VGrooves`.
    pub fn n_max(&self) -> usize {
        match self {
            CorrugationProfile::Sinusoid { .. } => 1,
            CorrugationProfile::VGrooves { n_max, .. } => *n_max,
            CorrugationProfile::FourierSeries { an, .. } => an.len(),
        }
    }

    pub fn series_is_exact(&self) -> bool {
        !matches!(self, CorrugationProfile::VGrooves { .. })
    }

    /// Profile height at lateral position x.
    pub fn height(&self, x: f64) -> f64 {
        match self {
            CorrugationProfile::Sinusoid {
                lambda_c,
                amplitude,
            } => amplitude * (2.0 * PI * x / lambda_c).cos(),
            CorrugationProfile::VGrooves {
                lambda_c,
                depth,
                groove_width,
                ..
            } => {
                let xm = x - lambda_c * (x / lambda_c).round();
                let plateau_half = 0.5 * (lambda_c - groove_width);
                let d = xm.abs() - plateau_half;
                if d <= 0.0 {
                    *depth
                } else {
                    depth * (1.0 - 2.0 * d / groove_width)
                }
            }
            CorrugationProfile::FourierSeries { lambda_c, a0, an } => {
                let kc = 2.0 * PI / lambda_c;
                let mut h = *a0;
                for (i, a) in an.iter().enumerate() {
                    h += a * ((i as f64 + 1.0) * kc * x).cos();
                }
                h
            }
        }
    }

    /// Profile slope dh/dx at x (defined almost everywhere; at the v-groove
    /// kinks one-sided values are returned).
    pub fn slope(&self, x: f64) -> f64 {
        match self {
            CorrugationProfile::Sinusoid {
                lambda_c,
                amplitude,
            } => {
                let kc = 2.0 * PI / lambda_c;
                -amplitude * kc * (kc * x).sin()
            }
            CorrugationProfile::VGrooves {
                lambda_c,
                depth,
                groove_width,
                ..
            } => {
                let xm = x - lambda_c * (x / lambda_c).round();
                let plateau_half = 0.5 * (lambda_c - groove_width);
                if xm.abs() <= plateau_half {
                    0.0
                } else {
                    -(2.0 * depth / groove_width) * xm.signum()
                }
            }
            CorrugationProfile::FourierSeries { lambda_c, an, .. } => {
                let kc = 2.0 * PI / lambda_c;
                let mut s = 0.0;
                for (i, a) in an.iter().enumerate() {
                    let kn = (i as f64 + 1.0) * kc;
                    s -= a * kn * (kn * x).sin();
                }
                s
            }
        }
    }

    /// Profile curvature d²h/dx² at x, almost everywhere. Piecewise-linear
    /// profiles (v-grooves) have zero curvature away from the kink set of
    /// measure zero; the kink contributions are genuinely singular and are
    /// not representable by a pointwise rule.
    pub fn curvature_profile(&self, x: f64) -> f64 {
        match self {
            CorrugationProfile::Sinusoid {
                lambda_c,
                amplitude,
            } => {
                let kc = 2.0 * PI / lambda_c;
                -amplitude * kc * kc * (kc * x).cos()
            }
            CorrugationProfile::VGrooves { .. } => 0.0,
            CorrugationProfile::FourierSeries { lambda_c, an, .. } => {
                let kc = 2.0 * PI / lambda_c;
                let mut s = 0.0;
                for (i, a) in an.iter().enumerate() {
                    let kn = (i as f64 + 1.0) * kc;
                    s -= a * kn * kn * (kn * x).cos();
                }
                s
            }
        }
    }

    /// Cosine coefficient aₙ (n = 0 gives the mean height).
    pub fn fourier_coefficient(&self, n: usize) -> f64 {
        match self {
            CorrugationProfile::Sinusoid { amplitude, .. } => {
                if n == 1 {
                    *amplitude
                } else {
                    0.0
                }
            }
            CorrugationProfile::VGrooves {
                lambda_c,
                depth,
                groove_width,
                ..
            } => {
                if n == 0 {
                    depth * (1.0 - 0.5 * groove_width / lambda_c)
                } else {
                    let nf = n as f64;
                    let sin_half = (nf * PI * groove_width / (2.0 * lambda_c)).sin();
                    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
                    sign * 4.0 * depth * lambda_c * sin_half * sin_half
                        / (PI * PI * groove_width * nf * nf)
                }
            }
            CorrugationProfile::FourierSeries { a0, an, .. } => {
                if n == 0 {
                    *a0
                } else {
                    an.get(n - 1).copied().unwrap_or(0.0)
                }
            }
        }
    }

    /// Mean height a₀ over one period.
    pub fn mean_height(&self) -> f64 {
        self.fourier_coefficient(0)
    }
}

/// Which x-derivative of the lateral interaction an evaluation targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LateralQuantity {
    /// U_lat(x, z), J.
    Potential,
    /// F_x = −∂U_lat/∂x, N.
    Force,
    /// ∂²U_lat/∂x², J/m².
    Curvature,
}

/// Laterally varying interaction energy U_lat(x, z_a), J.
pub fn lateral_potential(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<f64> {
    lateral_potential_with_err(profile, x, z_a, engine).map(|(v, _)| v)
}

pub fn lateral_potential_with_err(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<(f64, f64)> {
    Ok(lateral_scan_with_err(profile, &[x], z_a, engine, LateralQuantity::Potential)?[0])
}

/// Lateral force F_x = −∂U_lat/∂x, N.
pub fn lateral_force(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<f64> {
    lateral_force_with_err(profile, x, z_a, engine).map(|(v, _)| v)
}

pub fn lateral_force_with_err(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<(f64, f64)> {
    Ok(lateral_scan_with_err(profile, &[x], z_a, engine, LateralQuantity::Force)?[0])
}

/// Lateral curvature ∂²U_lat/∂x², J/m². For a PFA engine this is the local
/// rule h″(x)·g(0, z): identically zero almost everywhere for v-grooves.
pub fn lateral_curvature(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<f64> {
    lateral_curvature_with_err(profile, x, z_a, engine).map(|(v, _)| v)
}

pub fn lateral_curvature_with_err(
    profile: &CorrugationProfile,
    x: f64,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<(f64, f64)> {
    Ok(lateral_scan_with_err(profile, &[x], z_a, engine, LateralQuantity::Curvature)?[0])
}

/// Amplitude of the fundamental lateral potential component, a₁·g(k_c, z_a).
/// Maximising this over the groove width is what fixes the optimal v-groove
/// geometry.
pub fn first_harmonic_amplitude(
    profile: &CorrugationProfile,
    z_a: f64,
    engine: &ResponseEngine,
) -> Result<f64> {
    let q = ResponseQuery::new(profile.k_c(), z_a)?;
    Ok(profile.fourier_coefficient(1) * engine.g(&q)?)
}

/// Evaluates the requested lateral quantity at every x in `xs` for a common
/// height, sharing the response evaluations g(n k_c, z_a) across positions.
/// The returned error estimate per point bounds both the response error and
/// the series truncation.
pub fn lateral_scan_with_err(
    profile: &CorrugationProfile,
    xs: &[f64],
    z_a: f64,
    engine: &ResponseEngine,
    quantity: LateralQuantity,
) -> Result<Vec<(f64, f64)>> {
    if engine.method == ResponseMethod::Pfa {
        let (g0, g0_err) = engine.g_pfa_with_err(z_a)?;
        return Ok(xs
            .iter()
            .map(|&x| {
                let local = match quantity {
                    LateralQuantity::Potential => profile.height(x) - profile.mean_height(),
                    LateralQuantity::Force => -profile.slope(x),
                    LateralQuantity::Curvature => profile.curvature_profile(x),
                };
                (local * g0, local.abs() * g0_err)
            })
            .collect());
    }

    let terms = series_terms(profile, z_a, engine, quantity)?;
    let kc = profile.k_c();
    Ok(xs
        .iter()
        .map(|&x| {
            let mut sum = 0.0_f64;
            for t in &terms.terms {
                let kn = t.n as f64 * kc;
                let trig = match quantity {
                    LateralQuantity::Potential => (kn * x).cos(),
                    LateralQuantity::Force => (kn * x).sin(),
                    LateralQuantity::Curvature => -(kn * x).cos(),
                };
                sum += t.coef * trig;
            }
            (sum, terms.err)
        })
        .collect())
}

struct SeriesTerm {
    n: usize,
    /// aₙ·(n k_c)^p·g(n k_c, z), with p set by the quantity.
    coef: f64,
}

struct SeriesTerms {
    terms: Vec<SeriesTerm>,
    /// x-independent bound: accumulated response errors plus truncation.
    err: f64,
}

/// Collects the harmonic terms with their response factors, stopping once two
/// consecutive term magnitudes fall below the tolerance. The stopping rule is
/// x-independent: it compares |aₙ·(n k_c)^p·g(n k_c, z)| against the largest
/// such magnitude seen.
fn series_terms(
    profile: &CorrugationProfile,
    z_a: f64,
    engine: &ResponseEngine,
    quantity: LateralQuantity,
) -> Result<SeriesTerms> {
    let kc = profile.k_c();
    let n_max = profile.n_max();
    let rel_tol = engine.rel_tol;

    let mut terms = Vec::new();
    let mut err = 0.0_f64;
    let mut amp_scale = 0.0_f64;
    let mut small_run = 0_usize;
    let mut last_bound = f64::INFINITY;

    for n in 1..=n_max {
        let an = profile.fourier_coefficient(n);
        let kn = n as f64 * kc;
        let factor = match quantity {
            LateralQuantity::Potential => 1.0,
            LateralQuantity::Force => kn,
            LateralQuantity::Curvature => kn * kn,
        };
        let weight = an.abs() * factor;
        if weight == 0.0 {
            last_bound = 0.0;
            small_run += 1;
            if small_run >= 2 && amp_scale > 0.0 {
                return Ok(SeriesTerms { terms, err });
            }
            continue;
        }
        let (g, g_err) = engine.g_with_err(&ResponseQuery::new(kn, z_a)?)?;
        let bound = weight * g.abs();
        amp_scale = amp_scale.max(bound);
        terms.push(SeriesTerm {
            n,
            coef: an * factor * g,
        });
        err += weight * g_err;
        last_bound = bound;
        if bound <= 0.25 * rel_tol * amp_scale {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 2 {
            return Ok(SeriesTerms {
                terms,
                err: err + 2.0 * bound,
            });
        }
    }

    if profile.series_is_exact() || amp_scale == 0.0 {
        return Ok(SeriesTerms { terms, err });
    }
    // Truncated infinite series that never met the early-stop test: accept
    // only if the final term bound is already negligible.
    if last_bound <= rel_tol * amp_scale {
        return Ok(SeriesTerms {
            terms,
            err: err + 2.0 * last_bound,
        });
    }
    let sum: f64 = terms.iter().map(|t| t.coef).sum();
    Err(LcpError::Accuracy {
        context: format!("harmonic series truncated at n_max = {n_max}"),
        achieved: last_bound / amp_scale,
        requested: rel_tol,
        value: sum,
    })
}

/// Root of u·sin u = 1 − cos u on (0, π), solved to 1e-10 relative accuracy
/// by bisection; u = π·s/λ_c at the stationary point of a₁(s).
fn optimal_width_root() -> f64 {
    let phi = |u: f64| u * u.sin() - (1.0 - u.cos());
    let mut lo = 0.5_f64;
    let mut hi = PI;
    debug_assert!(phi(lo) > 0.0);
    while (hi - lo) > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if phi(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Groove-width fraction s/λ_c that maximises the fundamental Fourier
/// amplitude a₁ of the v-groove profile (≈ 0.742), independent of depth and
/// period.
pub fn optimal_groove_width_fraction() -> f64 {
    optimal_width_root() / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polarizability::PolarizabilityModel;
    use crate::quad;
    use approx::assert_relative_eq;

    fn cp_engine() -> ResponseEngine {
        let model = PolarizabilityModel::static_from_volume(47.3e-30).unwrap();
        ResponseEngine::new(ResponseMethod::AnalyticCp, model)
    }

    fn pfa_engine() -> ResponseEngine {
        let model = PolarizabilityModel::static_from_volume(47.3e-30).unwrap();
        ResponseEngine::new(ResponseMethod::Pfa, model)
    }

    fn grooves(lambda_c: f64, depth: f64, width: f64) -> CorrugationProfile {
        CorrugationProfile::v_grooves(lambda_c, depth, width, 50).unwrap()
    }

    #[test]
    fn vgroove_height_geometry() {
        let lc = 4e-6;
        let a = 250e-9;
        let p = grooves(lc, a, 0.5 * lc);
        // Plateau centre, plateau interior, groove midpoint, groove bottom.
        assert_relative_eq!(p.height(0.0), a);
        assert_relative_eq!(p.height(0.249 * lc), a);
        assert_relative_eq!(p.height(0.375 * lc), 0.5 * a, max_relative = 1e-12);
        assert_relative_eq!(p.height(0.5 * lc), 0.0, epsilon = 1e-30);
        // Periodicity and parity.
        for &x in &[0.1e-6, 0.7e-6, 1.9e-6, 3.3e-6] {
            assert_relative_eq!(p.height(x), p.height(x + lc), max_relative = 1e-12);
            assert_relative_eq!(p.height(x), p.height(-x), max_relative = 1e-12);
            assert!(p.height(x) >= 0.0 && p.height(x) <= a);
        }
    }

    #[test]
    fn vgroove_fourier_against_direct_quadrature() {
        let lc = 4e-6;
        let a = 250e-9;
        for &frac in &[0.3, 0.5, 0.742] {
            let s = frac * lc;
            let p = grooves(lc, a, s);
            let kinks = [0.5 * (lc - s), 0.5 * lc, 0.5 * (lc + s)];
            for n in 0..=20 {
                let mut f = |x: f64| {
                    let c = if n == 0 {
                        1.0
                    } else {
                        (n as f64 * p.k_c() * x).cos()
                    };
                    p.height(x) * c
                };
                let est = quad::adaptive_gl(&mut f, 0.0, lc, &kinks, 1e-13, 1e-25, 400).unwrap();
                let norm = if n == 0 { 1.0 / lc } else { 2.0 / lc };
                let numeric = norm * est.value;
                assert!(
                    (numeric - p.fourier_coefficient(n)).abs() <= 1e-10 * a,
                    "n = {n}, frac = {frac}: numeric {numeric:e} vs closed form {:e}",
                    p.fourier_coefficient(n)
                );
            }
        }
    }

    #[test]
    fn vgroove_half_period_anchors() {
        let lc = 4e-6;
        let a = 250e-9;
        let p = grooves(lc, a, 0.5 * lc);
        assert_relative_eq!(p.fourier_coefficient(0), 0.75 * a, max_relative = 1e-14);
        assert_relative_eq!(
            p.fourier_coefficient(1),
            4.0 * a / (PI * PI),
            max_relative = 1e-14
        );
        // n²·aₙ repeats the pattern {1, −2, 1, 0} × 4a/π².
        let unit = 4.0 * a / (PI * PI);
        let pattern = [1.0, -2.0, 1.0, 0.0];
        for n in 1..=16 {
            let got = (n * n) as f64 * p.fourier_coefficient(n);
            let want = unit * pattern[(n - 1) % 4];
            assert!(
                (got - want).abs() <= 1e-12 * a,
                "n = {n}: n²aₙ = {got:e}, expected {want:e}"
            );
        }
    }

    #[test]
    fn fourier_series_reconstructs_vgroove_height() {
        let lc = 4e-6;
        let a = 250e-9;
        let p = grooves(lc, a, 0.6 * lc);
        for &x in &[0.0, 0.11 * lc, 0.31 * lc, 0.47 * lc] {
            let mut h = p.fourier_coefficient(0);
            for n in 1..=4000 {
                h += p.fourier_coefficient(n) * (n as f64 * p.k_c() * x).cos();
            }
            assert!(
                (h - p.height(x)).abs() <= 1e-3 * a,
                "x = {x:e}: series {h:e} vs height {:e}",
                p.height(x)
            );
        }
    }

    #[test]
    fn pfa_potential_is_affine_in_height() {
        let p = grooves(4e-6, 250e-9, 2e-6);
        let engine = pfa_engine();
        let z = 2e-6;
        let g0 = engine.g_pfa(z).unwrap();
        for &x in &[0.0, 0.3e-6, 1.1e-6, 1.9e-6, 2.0e-6] {
            let u = lateral_potential(&p, x, z, &engine).unwrap();
            let want = (p.height(x) - p.mean_height()) * g0;
            assert_relative_eq!(u, want, max_relative = 1e-13, epsilon = 1e-60);
        }
    }

    #[test]
    fn pfa_curvature_vanishes_for_vgrooves_but_not_sinusoid() {
        let z = 2e-6;
        let engine = pfa_engine();
        let vg = grooves(4e-6, 250e-9, 2e-6);
        for &x in &[0.0, 0.5e-6, 1.3e-6, 2.0e-6] {
            assert_eq!(lateral_curvature(&vg, x, z, &engine).unwrap(), 0.0);
        }
        let sin = CorrugationProfile::sinusoid(4e-6, 100e-9).unwrap();
        let got = lateral_curvature(&sin, 0.0, z, &engine).unwrap();
        let kc = sin.k_c();
        let want = -100e-9 * kc * kc * engine.g_pfa(z).unwrap();
        assert_relative_eq!(got, want, max_relative = 1e-13);
        assert!(got != 0.0);
    }

    #[test]
    fn series_force_matches_potential_finite_difference() {
        let p = CorrugationProfile::fourier_series(
            4e-6,
            0.0,
            vec![80e-9, -25e-9, 10e-9, 0.0, 3e-9],
        )
        .unwrap();
        let engine = cp_engine();
        let z = 1.5e-6;
        let dx = 1e-4 * p.lambda_c();
        for &x in &[0.2e-6, 1.0e-6, 2.7e-6] {
            let up = lateral_potential(&p, x + dx, z, &engine).unwrap();
            let um = lateral_potential(&p, x - dx, z, &engine).unwrap();
            let fd = -(up - um) / (2.0 * dx);
            let f = lateral_force(&p, x, z, &engine).unwrap();
            assert_relative_eq!(f, fd, max_relative = 1e-6, epsilon = 1e-45);
        }
    }

    #[test]
    fn series_curvature_matches_force_finite_difference() {
        let sin = CorrugationProfile::sinusoid(4e-6, 120e-9).unwrap();
        let engine = cp_engine();
        let z = 2e-6;
        let dx = 1e-4 * sin.lambda_c();
        for &x in &[0.0, 0.6e-6, 1.7e-6] {
            let fp = lateral_force(&sin, x + dx, z, &engine).unwrap();
            let fm = lateral_force(&sin, x - dx, z, &engine).unwrap();
            let fd = -(fp - fm) / (2.0 * dx);
            let c = lateral_curvature(&sin, x, z, &engine).unwrap();
            assert_relative_eq!(c, fd, max_relative = 1e-6, epsilon = 1e-40);
        }
    }

    #[test]
    fn early_stop_matches_full_sum_for_vgrooves() {
        let p = grooves(4e-6, 250e-9, 2e-6);
        let engine = cp_engine();
        let z = 2e-6;
        let x = 0.77e-6;
        let (fast, _) = lateral_potential_with_err(&p, x, z, &engine).unwrap();
        // Brute-force full sum over every harmonic the profile carries.
        let mut full = 0.0;
        for n in 1..=p.n_max() {
            let an = p.fourier_coefficient(n);
            if an == 0.0 {
                continue;
            }
            let kn = n as f64 * p.k_c();
            full += an
                * (kn * x).cos()
                * engine.g(&ResponseQuery::new(kn, z).unwrap()).unwrap();
        }
        assert_relative_eq!(fast, full, max_relative = 1e-9);
    }

    #[test]
    fn scan_matches_pointwise_evaluation() {
        let p = grooves(4e-6, 250e-9, 2e-6);
        let engine = cp_engine();
        let z = 2e-6;
        let xs: Vec<f64> = (0..9).map(|i| i as f64 * 0.5e-6).collect();
        for quantity in [
            LateralQuantity::Potential,
            LateralQuantity::Force,
            LateralQuantity::Curvature,
        ] {
            let scan = lateral_scan_with_err(&p, &xs, z, &engine, quantity).unwrap();
            for (i, &x) in xs.iter().enumerate() {
                let single = lateral_scan_with_err(&p, &[x], z, &engine, quantity).unwrap()[0];
                assert_eq!(scan[i].0, single.0, "quantity {quantity:?} at x = {x:e}");
            }
        }
    }

    #[test]
    fn sinusoid_series_is_single_harmonic() {
        let sin = CorrugationProfile::sinusoid(4e-6, 120e-9).unwrap();
        let engine = cp_engine();
        let z = 2e-6;
        let x = 0.9e-6;
        let u = lateral_potential(&sin, x, z, &engine).unwrap();
        let g1 = engine
            .g(&ResponseQuery::new(sin.k_c(), z).unwrap())
            .unwrap();
        assert_relative_eq!(u, 120e-9 * (sin.k_c() * x).cos() * g1, max_relative = 1e-13);
        assert_relative_eq!(
            first_harmonic_amplitude(&sin, z, &engine).unwrap(),
            120e-9 * g1,
            max_relative = 1e-13
        );
    }

    #[test]
    fn optimal_groove_width_fraction_frozen() {
        let frac = optimal_groove_width_fraction();
        assert_relative_eq!(frac, 0.742_019_296_407_103_2, max_relative = 1e-9);
        // The fraction maximises a₁(s): both neighbours must lie below.
        let lc = 4e-6;
        let a = 250e-9;
        let a1 = |f: f64| grooves(lc, a, f * lc).fourier_coefficient(1);
        assert!(a1(frac) > a1(frac - 0.01));
        assert!(a1(frac) > a1(frac + 0.01));
    }

    #[test]
    fn profile_validation() {
        assert!(CorrugationProfile::sinusoid(-1.0, 1e-9).is_err());
        assert!(CorrugationProfile::sinusoid(1e-6, -1e-9).is_err());
        assert!(CorrugationProfile::v_grooves(4e-6, 250e-9, 5e-6, 50).is_err());
        assert!(CorrugationProfile::v_grooves(4e-6, 250e-9, 2e-6, 0).is_err());
        assert!(CorrugationProfile::fourier_series(4e-6, 0.0, vec![f64::NAN]).is_err());
    }

    #[test]
    fn fourier_profile_from_csv() {
        let csv = "n,a_n_m\n0,1.2e-7\n3,-4e-8\n1,2.5e-8\n";
        let p = CorrugationProfile::fourier_from_csv_reader(4e-6, csv.as_bytes()).unwrap();
        assert_eq!(p.n_max(), 3);
        assert_eq!(p.fourier_coefficient(0), 1.2e-7);
        assert_eq!(p.fourier_coefficient(1), 2.5e-8);
        assert_eq!(p.fourier_coefficient(2), 0.0);
        assert_eq!(p.fourier_coefficient(3), -4e-8);

        let bad_header = "k,a\n1,1e-9\n";
        assert!(CorrugationProfile::fourier_from_csv_reader(4e-6, bad_header.as_bytes()).is_err());
        let dup = "n,a_n_m\n1,1e-9\n1,2e-9\n";
        assert!(CorrugationProfile::fourier_from_csv_reader(4e-6, dup.as_bytes()).is_err());
        let empty = "n,a_n_m\n";
        assert!(CorrugationProfile::fourier_from_csv_reader(4e-6, empty.as_bytes()).is_err());
    }
}
