//! Run configuration: a strict `key = value` file format plus programmatic
//! overrides.
//!
//! Rules:
//! - one `key = value` pair per line; blank lines and lines starting with `#`
//!   are ignored (no inline comments);
//! - unknown keys are rejected with the offending line number;
//! - later assignments override earlier ones;
//! - every length-valued key requires an explicit unit suffix (`nm`, `um`,
//!   `mm` or `m`), e.g. `z_a = 2um`; bare numbers are rejected.

use crate::bec::BecConfig;
use crate::corrugation::CorrugationProfile;
use crate::error::{LcpError, Result};
use crate::polarizability::PolarizabilityModel;
use crate::response::ResponseMethod;
use crate::scan::OutputFormat;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AlphaKind {
    Static,
    Lorentz,
    Tabulated,
}

#[derive(Debug, Clone)]
pub struct AlphaConfig {
    pub kind: AlphaKind,
    /// Static polarizability volume α(0)/4πε₀, m³.
    pub alpha0_volume_m3: f64,
    /// Lorentz resonance frequency, rad/s.
    pub omega_a_rad_per_s: f64,
    /// CSV table for `tabulated` (columns `xi_rad_per_s,alpha_si`).
    pub table_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    Sinusoid,
    VGrooves,
    Fourier,
}

#[derive(Debug, Clone)]
pub struct ProfileConfig {
    pub kind: ProfileKind,
    pub lambda_c: f64,
    /// Sinusoid amplitude, m.
    pub amplitude: f64,
    /// V-groove plateau height (groove depth), m.
    pub depth: f64,
    /// Absolute groove width, m; when unset the fraction below applies.
    pub groove_width: Option<f64>,
    pub groove_width_frac: f64,
    pub n_max: usize,
    /// Explicit Fourier data for `fourier`.
    pub a0: f64,
    pub an: Vec<f64>,
    /// Optional CSV (`n,a_n_m`) overriding `a0`/`an` for `fourier`.
    pub table_path: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub kz_min: Option<f64>,
    pub kz_max: Option<f64>,
    pub points: Option<usize>,
    pub kz_list: Option<Vec<f64>>,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
    pub kcz_min: f64,
    pub kcz_max: f64,
    pub r_list: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BecSection {
    pub mass_kg: f64,
    pub omega_x_rad_per_s: f64,
    pub z_cm: f64,
    pub tf_radius: f64,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub method: Option<ResponseMethod>,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub format: OutputFormat,
    /// Atom height above the mean surface plane, m.
    pub z_a: f64,
    /// Lateral atom position, m.
    pub x_a: f64,
    /// Dimensionless k·z_a for single-point commands (exclusive with
    /// `k_rad_per_m`).
    pub kz: Option<f64>,
    pub k_rad_per_m: Option<f64>,
    pub alpha: AlphaConfig,
    pub profile: ProfileConfig,
    pub scan: ScanConfig,
    pub bec: BecSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            method: None,
            rel_tol: 1e-6,
            abs_tol: 0.0,
            format: OutputFormat::Csv,
            z_a: 2e-6,
            x_a: 0.0,
            kz: None,
            k_rad_per_m: None,
            alpha: AlphaConfig {
                kind: AlphaKind::Lorentz,
                alpha0_volume_m3: 47.3e-30,
                omega_a_rad_per_s: 2.414e15,
                table_path: None,
            },
            profile: ProfileConfig {
                kind: ProfileKind::VGrooves,
                lambda_c: 4e-6,
                amplitude: 250e-9,
                depth: 250e-9,
                groove_width: None,
                groove_width_frac: 0.5,
                n_max: 50,
                a0: 0.0,
                an: Vec::new(),
                table_path: None,
            },
            scan: ScanConfig {
                kz_min: None,
                kz_max: None,
                points: None,
                kz_list: None,
                x_min: None,
                x_max: None,
                kcz_min: 0.25,
                kcz_max: 8.0,
                r_list: vec![0.0, 0.5e-6, 1.0e-6],
            },
            bec: BecSection {
                mass_kg: 1.45e-25,
                omega_x_rad_per_s: 2.0 * PI * 229.0,
                z_cm: 2e-6,
                tf_radius: 1e-6,
            },
        }
    }
}

fn parse_f64(key: &str, raw: &str) -> Result<f64> {
    raw.trim().parse::<f64>().map_err(|_| {
        LcpError::Config(format!("key `{key}`: `{raw}` is not a valid number"))
    })
}

fn parse_usize(key: &str, raw: &str) -> Result<usize> {
    raw.trim().parse::<usize>().map_err(|_| {
        LcpError::Config(format!("key `{key}`: `{raw}` is not a valid non-negative integer"))
    })
}

/// Parses a length with a mandatory unit suffix. Negative values are allowed
/// here (Fourier coefficients are signed); range checks belong to the
/// consumers.
pub fn parse_length(key: &str, raw: &str) -> Result<f64> {
    let s = raw.trim();
    let (num, shift) = if let Some(p) = s.strip_suffix("nm") {
        (p, -9i32)
    } else if let Some(p) = s.strip_suffix("um") {
        (p, -6)
    } else if let Some(p) = s.strip_suffix("mm") {
        (p, -3)
    } else if let Some(p) = s.strip_suffix('m') {
        (p, 0)
    } else {
        return Err(LcpError::Config(format!(
            "key `{key}`: length `{raw}` needs a unit suffix (nm|um|mm|m)"
        )));
    };
    // Fold the unit into the decimal exponent and parse once, so e.g.
    // `250nm` rounds like the literal 250e-9 instead of 250.0 × 1e-9.
    let num = num.trim();
    let spliced = match num.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = num[pos + 1..].parse().map_err(|_| {
                LcpError::Config(format!("key `{key}`: `{raw}` is not a valid length"))
            })?;
            format!("{}e{}", &num[..pos], exp + shift)
        }
        None => format!("{num}e{shift}"),
    };
    spliced
        .parse::<f64>()
        .map_err(|_| LcpError::Config(format!("key `{key}`: `{raw}` is not a valid length")))
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',').map(|part| parse_f64(key, part)).collect()
}

fn parse_length_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(',').map(|part| parse_length(key, part)).collect()
}

impl RunConfig {
    /// Loads the configuration file on top of the defaults.
    pub fn from_path(path: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        cfg.merge_file(path)?;
        Ok(cfg)
    }

    pub fn merge_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(LcpError::Config(format!(
                    "{}:{line_no}: expected `key = value`, got `{trimmed}`",
                    path.display()
                )));
            };
            self.apply_kv(key.trim(), value.trim()).map_err(|e| {
                LcpError::Config(format!("{}:{line_no}: {e}", path.display()))
            })?;
        }
        Ok(())
    }

    /// Applies a single assignment; used for both config files and `--set`
    /// command-line overrides.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "method" => self.method = Some(value.parse()?),
            "rel_tol" => self.rel_tol = parse_f64(key, value)?,
            "abs_tol" => self.abs_tol = parse_f64(key, value)?,
            "format" => self.format = value.parse()?,
            "z_a" => self.z_a = parse_length(key, value)?,
            "x_a" => self.x_a = parse_length(key, value)?,
            "kz" => self.kz = Some(parse_f64(key, value)?),
            "k_rad_per_m" => self.k_rad_per_m = Some(parse_f64(key, value)?),
            "alpha.model" => {
                self.alpha.kind = match value.to_ascii_lowercase().as_str() {
                    "static" => AlphaKind::Static,
                    "lorentz" => AlphaKind::Lorentz,
                    "tabulated" => AlphaKind::Tabulated,
                    other => {
                        return Err(LcpError::Config(format!(
                            "alpha.model `{other}` is not one of static|lorentz|tabulated"
                        )))
                    }
                }
            }
            "alpha.alpha0_volume_m3" => self.alpha.alpha0_volume_m3 = parse_f64(key, value)?,
            "alpha.omega_a_rad_per_s" => self.alpha.omega_a_rad_per_s = parse_f64(key, value)?,
            "alpha.table_path" => self.alpha.table_path = Some(PathBuf::from(value)),
            "profile.kind" => {
                self.profile.kind = match value.to_ascii_lowercase().as_str() {
                    "sinusoid" => ProfileKind::Sinusoid,
                    "vgrooves" | "v-grooves" => ProfileKind::VGrooves,
                    "fourier" => ProfileKind::Fourier,
                    other => {
                        return Err(LcpError::Config(format!(
                            "profile.kind `{other}` is not one of sinusoid|vgrooves|fourier"
                        )))
                    }
                }
            }
            "profile.lambda_c" => self.profile.lambda_c = parse_length(key, value)?,
            "profile.amplitude" => self.profile.amplitude = parse_length(key, value)?,
            "profile.depth" => self.profile.depth = parse_length(key, value)?,
            "profile.groove_width" => self.profile.groove_width = Some(parse_length(key, value)?),
            "profile.groove_width_frac" => {
                self.profile.groove_width_frac = parse_f64(key, value)?
            }
            "profile.n_max" => self.profile.n_max = parse_usize(key, value)?,
            "profile.a0" => self.profile.a0 = parse_length(key, value)?,
            "profile.an" => self.profile.an = parse_length_list(key, value)?,
            "profile.table_path" => self.profile.table_path = Some(PathBuf::from(value)),
            "scan.kz_min" => self.scan.kz_min = Some(parse_f64(key, value)?),
            "scan.kz_max" => self.scan.kz_max = Some(parse_f64(key, value)?),
            "scan.points" => self.scan.points = Some(parse_usize(key, value)?),
            "scan.kz_list" => self.scan.kz_list = Some(parse_f64_list(key, value)?),
            "scan.x_min" => self.scan.x_min = Some(parse_length(key, value)?),
            "scan.x_max" => self.scan.x_max = Some(parse_length(key, value)?),
            "scan.kcz_min" => self.scan.kcz_min = parse_f64(key, value)?,
            "scan.kcz_max" => self.scan.kcz_max = parse_f64(key, value)?,
            "scan.r_list" => self.scan.r_list = parse_length_list(key, value)?,
            "bec.mass_kg" => self.bec.mass_kg = parse_f64(key, value)?,
            "bec.omega_x_rad_per_s" => self.bec.omega_x_rad_per_s = parse_f64(key, value)?,
            "bec.z_cm" => self.bec.z_cm = parse_length(key, value)?,
            "bec.tf_radius" => self.bec.tf_radius = parse_length(key, value)?,
            other => {
                return Err(LcpError::Config(format!("unknown configuration key `{other}`")))
            }
        }
        Ok(())
    }

    /// Polarizability model described by the `alpha.*` section.
    pub fn build_model(&self) -> Result<PolarizabilityModel> {
        match self.alpha.kind {
            AlphaKind::Static => {
                PolarizabilityModel::static_from_volume(self.alpha.alpha0_volume_m3)
            }
            AlphaKind::Lorentz => PolarizabilityModel::lorentz_from_volume(
                self.alpha.alpha0_volume_m3,
                self.alpha.omega_a_rad_per_s,
            ),
            AlphaKind::Tabulated => {
                let path = self.alpha.table_path.as_ref().ok_or_else(|| {
                    LcpError::Config(
                        "alpha.model = tabulated requires alpha.table_path".into(),
                    )
                })?;
                PolarizabilityModel::from_csv_path(path)
            }
        }
    }

    /// Corrugation profile described by the `profile.*` section.
    pub fn build_profile(&self) -> Result<CorrugationProfile> {
        self.profile_for_period(self.profile.lambda_c, self.profile.n_max)
    }

    /// As [`Self::build_profile`] but with the period replaced, keeping the
    /// fractional groove geometry (used by sweeps that vary k_c·z).
    /// `n_max_floor` raises the v-groove harmonic cutoff when the rescaled
    /// period makes k_c·z small enough that the configured cutoff would
    /// truncate the slowly-converging curvature series.
    pub fn build_profile_with_period(
        &self,
        lambda_c: f64,
        n_max_floor: usize,
    ) -> Result<CorrugationProfile> {
        self.profile_for_period(lambda_c, self.profile.n_max.max(n_max_floor))
    }

    fn profile_for_period(&self, lambda_c: f64, n_max: usize) -> Result<CorrugationProfile> {
        match self.profile.kind {
            ProfileKind::Sinusoid => {
                CorrugationProfile::sinusoid(lambda_c, self.profile.amplitude)
            }
            ProfileKind::VGrooves => {
                let width = match self.profile.groove_width {
                    Some(w) if lambda_c == self.profile.lambda_c => w,
                    Some(w) => w / self.profile.lambda_c * lambda_c,
                    None => self.profile.groove_width_frac * lambda_c,
                };
                CorrugationProfile::v_grooves(lambda_c, self.profile.depth, width, n_max)
            }
            ProfileKind::Fourier => match &self.profile.table_path {
                Some(path) => CorrugationProfile::fourier_from_csv_path(lambda_c, path),
                None => CorrugationProfile::fourier_series(
                    lambda_c,
                    self.profile.a0,
                    self.profile.an.clone(),
                ),
            },
        }
    }

    /// Trap/cloud parameters from the `bec.*` section.
    pub fn build_bec(&self) -> Result<BecConfig> {
        BecConfig::new(
            self.bec.mass_kg,
            self.bec.omega_x_rad_per_s,
            self.bec.z_cm,
            self.bec.tf_radius,
        )
    }

    /// Wavenumber for single-point commands from `kz` or `k_rad_per_m`.
    pub fn resolved_k(&self) -> Result<Option<f64>> {
        match (self.kz, self.k_rad_per_m) {
            (Some(_), Some(_)) => Err(LcpError::Config(
                "set either `kz` or `k_rad_per_m`, not both".into(),
            )),
            (Some(kz), None) => Ok(Some(kz / self.z_a)),
            (None, Some(k)) => Ok(Some(k)),
            (None, None) => Ok(None),
        }
    }

    /// Resolved configuration as sorted key/value strings for output
    /// metadata. Uses shortest round-trip float formatting, so the block is
    /// byte-deterministic.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let f = |v: f64| format!("{v:?}");
        if let Some(method) = self.method {
            m.insert("method".into(), method.to_string());
        }
        m.insert("rel_tol".into(), f(self.rel_tol));
        m.insert("abs_tol".into(), f(self.abs_tol));
        m.insert("format".into(), self.format.to_string());
        m.insert("z_a".into(), f(self.z_a));
        m.insert("x_a".into(), f(self.x_a));
        if let Some(kz) = self.kz {
            m.insert("kz".into(), f(kz));
        }
        if let Some(k) = self.k_rad_per_m {
            m.insert("k_rad_per_m".into(), f(k));
        }
        m.insert(
            "alpha.model".into(),
            match self.alpha.kind {
                AlphaKind::Static => "static",
                AlphaKind::Lorentz => "lorentz",
                AlphaKind::Tabulated => "tabulated",
            }
            .into(),
        );
        m.insert(
            "alpha.alpha0_volume_m3".into(),
            f(self.alpha.alpha0_volume_m3),
        );
        m.insert(
            "alpha.omega_a_rad_per_s".into(),
            f(self.alpha.omega_a_rad_per_s),
        );
        if let Some(p) = &self.alpha.table_path {
            m.insert("alpha.table_path".into(), p.display().to_string());
        }
        m.insert(
            "profile.kind".into(),
            match self.profile.kind {
                ProfileKind::Sinusoid => "sinusoid",
                ProfileKind::VGrooves => "vgrooves",
                ProfileKind::Fourier => "fourier",
            }
            .into(),
        );
        m.insert("profile.lambda_c".into(), f(self.profile.lambda_c));
        m.insert("profile.amplitude".into(), f(self.profile.amplitude));
        m.insert("profile.depth".into(), f(self.profile.depth));
        if let Some(w) = self.profile.groove_width {
            m.insert("profile.groove_width".into(), f(w));
        }
        m.insert(
            "profile.groove_width_frac".into(),
            f(self.profile.groove_width_frac),
        );
        m.insert("profile.n_max".into(), self.profile.n_max.to_string());
        if self.profile.kind == ProfileKind::Fourier {
            m.insert("profile.a0".into(), f(self.profile.a0));
            m.insert(
                "profile.an".into(),
                self.profile
                    .an
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            if let Some(p) = &self.profile.table_path {
                m.insert("profile.table_path".into(), p.display().to_string());
            }
        }
        if let Some(v) = self.scan.kz_min {
            m.insert("scan.kz_min".into(), f(v));
        }
        if let Some(v) = self.scan.kz_max {
            m.insert("scan.kz_max".into(), f(v));
        }
        if let Some(v) = self.scan.points {
            m.insert("scan.points".into(), v.to_string());
        }
        if let Some(list) = &self.scan.kz_list {
            m.insert(
                "scan.kz_list".into(),
                list.iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
        }
        if let Some(v) = self.scan.x_min {
            m.insert("scan.x_min".into(), f(v));
        }
        if let Some(v) = self.scan.x_max {
            m.insert("scan.x_max".into(), f(v));
        }
        m.insert("scan.kcz_min".into(), f(self.scan.kcz_min));
        m.insert("scan.kcz_max".into(), f(self.scan.kcz_max));
        m.insert(
            "scan.r_list".into(),
            self.scan
                .r_list
                .iter()
                .map(|v| format!("{v:?}"))
                .collect::<Vec<_>>()
                .join(","),
        );
        m.insert("bec.mass_kg".into(), f(self.bec.mass_kg));
        m.insert(
            "bec.omega_x_rad_per_s".into(),
            f(self.bec.omega_x_rad_per_s),
        );
        m.insert("bec.z_cm".into(), f(self.bec.z_cm));
        m.insert("bec.tf_radius".into(), f(self.bec.tf_radius));
        m
    }
}
