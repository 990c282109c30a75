//! Command drivers: each produces a [`ScanResult`] table from a resolved
//! [`RunConfig`].
//!
//! Error policy for sweeps: a point whose evaluator converged only partially
//! (`Accuracy`) keeps its best value and is flagged `tol`; a point whose
//! evaluator failed outright is recorded as `err` with value 0 (never NaN, so
//! JSON stays valid); configuration and domain errors abort the command.
//! Single-point commands (`bec-shift`) propagate every failure.

use crate::bec::{gamma_bec_with_err, gamma_single_atom, BecConfig};
use crate::config::RunConfig;
use crate::corrugation::{lateral_scan_with_err, CorrugationProfile, LateralQuantity};
use crate::error::{LcpError, Result};
use crate::exec;
use crate::response::{ResponseEngine, ResponseMethod, ResponseQuery};
use crate::scan::{ScanMeta, ScanResult, ScanRow};

const TOOL: &str = "lateralcp";
const VERSION: &str = env!("CARGO_PKG_VERSION");

fn meta(command: &str, cfg: &RunConfig, method: Option<ResponseMethod>) -> ScanMeta {
    let mut config = cfg.to_map();
    if let Some(m) = method {
        config.insert("method".into(), m.to_string());
    }
    ScanMeta {
        tool: TOOL.into(),
        version: VERSION.into(),
        command: command.into(),
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        config,
    }
}

/// Columns shared by every row of a sweep.
#[derive(Debug, Clone, Copy, Default)]
struct RowSite {
    k: Option<f64>,
    z: Option<f64>,
    x: Option<f64>,
    kz: Option<f64>,
    r: Option<f64>,
}

/// Converts an evaluation outcome into a row, degrading recoverable failures
/// into flagged rows instead of aborting the sweep.
fn into_row(
    quantity: &str,
    method: &str,
    site: RowSite,
    outcome: Result<(f64, f64)>,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<ScanRow> {
    let mut row = ScanRow {
        quantity: quantity.into(),
        method: method.into(),
        k_rad_per_m: site.k,
        z_m: site.z,
        x_m: site.x,
        kz: site.kz,
        r_tf_m: site.r,
        value_si: 0.0,
        err_est: 0.0,
        flag: "err".into(),
    };
    match outcome {
        Ok((v, e)) => {
            // Normalise the signed zero (e.g. a vanishing curvature scaled by
            // a negative response) so emitted files never contain `-0`.
            row.value_si = if v == 0.0 { 0.0 } else { v };
            row.err_est = e;
            row.set_flag(rel_tol, abs_tol);
        }
        Err(LcpError::Accuracy {
            value, achieved, ..
        }) => {
            row.value_si = if value == 0.0 { 0.0 } else { value };
            row.err_est = achieved * value.abs();
            row.flag = "tol".into();
        }
        Err(e @ (LcpError::Divergent(_) | LcpError::SingularKinematics(_))) => {
            // Value stays 0 with flag `err`: the row records the failure
            // without poisoning the file with non-finite numbers.
            let _ = e;
        }
        Err(e) => return Err(e),
    }
    Ok(row)
}

/// kz values for the response/ratio sweeps: an explicit single point beats a
/// grid specification beats the kz list.
fn kz_points(cfg: &RunConfig) -> Result<Vec<f64>> {
    if let Some(k) = cfg.resolved_k()? {
        return Ok(vec![k * cfg.z_a]);
    }
    match (cfg.scan.kz_min, cfg.scan.kz_max) {
        (Some(lo), Some(hi)) => {
            if !(hi >= lo) {
                return Err(LcpError::Config(
                    "scan.kz_max must be ≥ scan.kz_min".into(),
                ));
            }
            Ok(linspace(lo, hi, cfg.scan.points.unwrap_or(201)))
        }
        (None, None) => Ok(cfg
            .scan
            .kz_list
            .clone()
            .unwrap_or_else(|| vec![1.0, 3.55, 6.0])),
        _ => Err(LcpError::Config(
            "scan.kz_min and scan.kz_max must be set together".into(),
        )),
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n as f64 - 1.0))
        .collect()
}

fn engine_for(cfg: &RunConfig, method: ResponseMethod) -> Result<ResponseEngine> {
    ResponseEngine::new(method, cfg.build_model()?).with_tolerances(cfg.rel_tol, cfg.abs_tol)
}

/// `response`: g(k, z_a) over the configured kz points.
pub fn cmd_response(cfg: &RunConfig) -> Result<ScanResult> {
    let method = cfg.method.unwrap_or(ResponseMethod::QuadratureExact);
    // The ratio rows divide two response values; halving the inner tolerance
    // keeps the quotient's propagated error inside the requested budget.
    let inner_rel = if method == ResponseMethod::QuadratureExact {
        0.5 * cfg.rel_tol
    } else {
        cfg.rel_tol
    };
    let engine =
        ResponseEngine::new(method, cfg.build_model()?).with_tolerances(inner_rel, cfg.abs_tol)?;
    // ρ_PWS compares against the retarded pairwise form, which has no
    // meaningful non-retarded counterpart; omit it for the vdW closed form.
    let emit_pws = method != ResponseMethod::AnalyticVdw;
    let kzs = kz_points(cfg)?;
    let z_a = cfg.z_a;
    let outcomes = exec::map_ordered(&kzs, |&kz| {
        let q = ResponseQuery::new(kz / z_a, z_a)?;
        let g = engine.g_with_err(&q);
        let pfa = engine.rho_pfa_with_err(&q);
        let pws = emit_pws.then(|| engine.rho_pws_with_err(&q));
        Ok::<_, LcpError>((g, pfa, pws))
    });
    let mut rows = Vec::with_capacity(3 * kzs.len());
    for (kz, outcome) in kzs.iter().zip(outcomes) {
        let (g, pfa, pws) = outcome?;
        let site = RowSite {
            k: Some(kz / z_a),
            z: Some(z_a),
            kz: Some(*kz),
            ..Default::default()
        };
        let tag = method.to_string();
        rows.push(into_row("g", &tag, site, g, cfg.rel_tol, cfg.abs_tol)?);
        rows.push(into_row("rho_pfa", &tag, site, pfa, cfg.rel_tol, cfg.abs_tol)?);
        if let Some(pws) = pws {
            rows.push(into_row("rho_pws", &tag, site, pws, cfg.rel_tol, cfg.abs_tol)?);
        }
    }
    Ok(ScanResult {
        meta: meta("response", cfg, Some(method)),
        rows,
    })
}

/// `ratios`: ρ_PFA and ρ_PWS over the configured kz points.
pub fn cmd_ratios(cfg: &RunConfig) -> Result<ScanResult> {
    let method = cfg.method.unwrap_or(ResponseMethod::AnalyticCp);
    // Ratios divide two response values; halving the inner tolerance keeps
    // the quotient inside the requested budget.
    let inner_rel = if method == ResponseMethod::QuadratureExact {
        0.5 * cfg.rel_tol
    } else {
        cfg.rel_tol
    };
    let engine =
        ResponseEngine::new(method, cfg.build_model()?).with_tolerances(inner_rel, cfg.abs_tol)?;
    let kzs = kz_points(cfg)?;
    let z_a = cfg.z_a;
    let outcomes = exec::map_ordered(&kzs, |&kz| {
        let q = ResponseQuery::new(kz / z_a, z_a)?;
        Ok::<_, LcpError>((engine.rho_pfa_with_err(&q), engine.rho_pws_with_err(&q)))
    });
    let mut rows = Vec::with_capacity(2 * kzs.len());
    for (kz, outcome) in kzs.iter().zip(outcomes) {
        let (pfa, pws) = outcome?;
        let site = RowSite {
            k: Some(kz / z_a),
            z: Some(z_a),
            kz: Some(*kz),
            ..Default::default()
        };
        rows.push(into_row(
            "rho_pfa",
            &method.to_string(),
            site,
            pfa,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
        rows.push(into_row(
            "rho_pws",
            &method.to_string(),
            site,
            pws,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
    }
    Ok(ScanResult {
        meta: meta("ratios", cfg, Some(method)),
        rows,
    })
}

fn x_points(cfg: &RunConfig, profile: &CorrugationProfile) -> Vec<f64> {
    match (cfg.scan.x_min, cfg.scan.x_max) {
        (Some(lo), Some(hi)) => linspace(lo, hi, cfg.scan.points.unwrap_or(101)),
        (Some(lo), None) => linspace(lo, lo + profile.lambda_c(), cfg.scan.points.unwrap_or(101)),
        (None, Some(hi)) => linspace(0.0, hi, cfg.scan.points.unwrap_or(101)),
        (None, None) => vec![cfg.x_a],
    }
}

fn lateral_cmd(
    cfg: &RunConfig,
    command: &str,
    quantity: LateralQuantity,
    quantity_name: &str,
) -> Result<ScanResult> {
    let method = cfg.method.unwrap_or(ResponseMethod::AnalyticCp);
    let engine = engine_for(cfg, method)?;
    let profile = cfg.build_profile()?;
    let xs = x_points(cfg, &profile);
    let z_a = cfg.z_a;
    let kc = profile.k_c();
    let values = lateral_scan_with_err(&profile, &xs, z_a, &engine, quantity);
    let mut rows = Vec::with_capacity(xs.len());
    match values {
        Ok(points) => {
            for (&x, &(v, e)) in xs.iter().zip(points.iter()) {
                rows.push(into_row(
                    quantity_name,
                    &method.to_string(),
                    RowSite {
                        k: Some(kc),
                        z: Some(z_a),
                        x: Some(x),
                        kz: Some(kc * z_a),
                        ..Default::default()
                    },
                    Ok((v, e)),
                    cfg.rel_tol,
                    cfg.abs_tol,
                )?);
            }
        }
        Err(e) => {
            // A shared failure applies to every requested position.
            for &x in &xs {
                let outcome = match &e {
                    LcpError::Accuracy {
                        context,
                        achieved,
                        requested,
                        value,
                    } => Err(LcpError::Accuracy {
                        context: context.clone(),
                        achieved: *achieved,
                        requested: *requested,
                        value: *value,
                    }),
                    other => Err(clone_hard_error(other)?),
                };
                rows.push(into_row(
                    quantity_name,
                    &method.to_string(),
                    RowSite {
                        k: Some(kc),
                        z: Some(z_a),
                        x: Some(x),
                        kz: Some(kc * z_a),
                        ..Default::default()
                    },
                    outcome,
                    cfg.rel_tol,
                    cfg.abs_tol,
                )?);
            }
        }
    }
    Ok(ScanResult {
        meta: meta(command, cfg, Some(method)),
        rows,
    })
}

/// Reconstructs recoverable errors for per-row reporting; anything else is
/// returned as the command-level failure.
fn clone_hard_error(e: &LcpError) -> Result<LcpError> {
    match e {
        LcpError::Divergent(m) => Ok(LcpError::Divergent(m.clone())),
        LcpError::SingularKinematics(m) => Ok(LcpError::SingularKinematics(m.clone())),
        LcpError::Range(m) => Err(LcpError::Range(m.clone())),
        LcpError::InvalidParameter(m) => Err(LcpError::InvalidParameter(m.clone())),
        LcpError::Config(m) => Err(LcpError::Config(m.clone())),
        LcpError::CalibrationDomain(m) => Err(LcpError::CalibrationDomain(m.clone())),
        LcpError::SurfaceContact(m) => Err(LcpError::SurfaceContact(m.clone())),
        LcpError::Parse(m) => Err(LcpError::Parse(m.clone())),
        LcpError::Io(err) => Err(LcpError::Parse(format!("I/O failure: {err}"))),
        LcpError::Accuracy { .. } => unreachable!("handled by the caller"),
    }
}

/// `potential`: U_lat at the configured position(s).
pub fn cmd_potential(cfg: &RunConfig) -> Result<ScanResult> {
    lateral_cmd(cfg, "potential", LateralQuantity::Potential, "u_lat")
}

/// `force`: F_x at the configured position(s).
pub fn cmd_force(cfg: &RunConfig) -> Result<ScanResult> {
    lateral_cmd(cfg, "force", LateralQuantity::Force, "f_x")
}

/// `bec-shift`: the condensate dipole-shift coefficient γ alongside its
/// point-cloud limit. All failures abort (single-point command).
pub fn cmd_bec_shift(cfg: &RunConfig) -> Result<ScanResult> {
    let method = cfg.method.unwrap_or(ResponseMethod::AnalyticCp);
    let engine = engine_for(cfg, method)?;
    let profile = cfg.build_profile()?;
    let bec = cfg.build_bec()?;
    let (gamma, gamma_err) = gamma_bec_with_err(&profile, &engine, &bec)?;
    let atom_cfg = BecConfig { tf_radius: 0.0, ..bec };
    let gamma0 = gamma_single_atom(&profile, &engine, &atom_cfg)?;
    let kc = profile.k_c();
    let mut rows = Vec::with_capacity(2);
    rows.push(into_row(
        "gamma_bec",
        &method.to_string(),
        RowSite {
            k: Some(kc),
            z: Some(bec.z_cm),
            kz: Some(kc * bec.z_cm),
            r: Some(bec.tf_radius),
            ..Default::default()
        },
        Ok((gamma, gamma_err)),
        cfg.rel_tol,
        cfg.abs_tol,
    )?);
    rows.push(into_row(
        "gamma_single_atom",
        &method.to_string(),
        RowSite {
            k: Some(kc),
            z: Some(bec.z_cm),
            kz: Some(kc * bec.z_cm),
            r: Some(0.0),
            ..Default::default()
        },
        Ok((gamma0, cfg.rel_tol * gamma0.abs())),
        cfg.rel_tol,
        cfg.abs_tol,
    )?);
    Ok(ScanResult {
        meta: meta("bec-shift", cfg, Some(method)),
        rows,
    })
}

/// `fig1`: the two deviation ratios of the retarded response plus the PFA
/// ratio of the van der Waals limit, on a dimensionless kz grid. The curves
/// of this figure are fixed by design; `--method` does not apply.
pub fn cmd_fig1(cfg: &RunConfig) -> Result<ScanResult> {
    let model = cfg.build_model()?;
    let cp = ResponseEngine::new(ResponseMethod::AnalyticCp, model.clone())
        .with_tolerances(cfg.rel_tol, cfg.abs_tol)?;
    let vdw = ResponseEngine::new(ResponseMethod::AnalyticVdw, model)
        .with_tolerances(cfg.rel_tol, cfg.abs_tol)?;
    let lo = cfg.scan.kz_min.unwrap_or(0.0);
    let hi = cfg.scan.kz_max.unwrap_or(10.0);
    if !(hi >= lo) {
        return Err(LcpError::Config("scan.kz_max must be ≥ scan.kz_min".into()));
    }
    let kzs = linspace(lo, hi, cfg.scan.points.unwrap_or(201));
    let z_a = cfg.z_a;
    let outcomes = exec::map_ordered(&kzs, |&kz| {
        let q = ResponseQuery::new(kz / z_a, z_a)?;
        Ok::<_, LcpError>((
            cp.rho_pfa_with_err(&q),
            cp.rho_pws_with_err(&q),
            vdw.rho_pfa_with_err(&q),
        ))
    });
    let mut rows = Vec::with_capacity(3 * kzs.len());
    for (kz, outcome) in kzs.iter().zip(outcomes) {
        let (cp_pfa, cp_pws, vdw_pfa) = outcome?;
        let site = RowSite {
            k: Some(kz / z_a),
            z: Some(z_a),
            kz: Some(*kz),
            ..Default::default()
        };
        rows.push(into_row(
            "rho_pfa",
            "analytic-cp",
            site,
            cp_pfa,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
        rows.push(into_row(
            "rho_pws",
            "analytic-cp",
            site,
            cp_pws,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
        rows.push(into_row(
            "rho_pfa",
            "analytic-vdw",
            site,
            vdw_pfa,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
    }
    Ok(ScanResult {
        meta: meta("fig1", cfg, None),
        rows,
    })
}

/// `fig3`: the lateral potential across one corrugation period for each kz in
/// the list, comparing the selected exact method against PWS and PFA. The
/// height is set per curve via z_a = kz/k_c at fixed λ_c.
pub fn cmd_fig3(cfg: &RunConfig) -> Result<ScanResult> {
    let exact_method = cfg.method.unwrap_or(ResponseMethod::AnalyticCp);
    let profile = cfg.build_profile()?;
    let kc = profile.k_c();
    let kz_list = cfg
        .scan
        .kz_list
        .clone()
        .unwrap_or_else(|| vec![1.0, 3.55, 6.0]);
    let xs = {
        let lo = cfg.scan.x_min.unwrap_or(0.0);
        let hi = cfg.scan.x_max.unwrap_or(profile.lambda_c());
        linspace(lo, hi, cfg.scan.points.unwrap_or(101))
    };
    let methods = [exact_method, ResponseMethod::Pws, ResponseMethod::Pfa];
    let mut engines = Vec::new();
    for m in methods {
        engines.push(engine_for(cfg, m)?);
    }

    // One task per (kz, method) curve; each shares its response values across
    // the x grid.
    let tasks: Vec<(usize, usize)> = (0..kz_list.len())
        .flat_map(|i| (0..methods.len()).map(move |j| (i, j)))
        .collect();
    let profile_ref = &profile;
    let engines_ref = &engines;
    let kz_ref = &kz_list;
    let xs_ref = &xs;
    let curves = exec::map_ordered(&tasks, |&(i, j)| {
        let z = kz_ref[i] / kc;
        lateral_scan_with_err(
            profile_ref,
            xs_ref,
            z,
            &engines_ref[j],
            LateralQuantity::Potential,
        )
    });

    let mut rows = Vec::with_capacity(tasks.len() * xs.len());
    for (t, curve) in tasks.iter().zip(curves) {
        let (i, j) = *t;
        let kz = kz_list[i];
        let z = kz / kc;
        let method_name = methods[j].to_string();
        let points = curve?;
        for (&x, &(v, e)) in xs.iter().zip(points.iter()) {
            rows.push(into_row(
                "u_lat",
                &method_name,
                RowSite {
                    k: Some(kc),
                    z: Some(z),
                    x: Some(x),
                    kz: Some(kz),
                    ..Default::default()
                },
                Ok((v, e)),
                cfg.rel_tol,
                cfg.abs_tol,
            )?);
        }
    }
    Ok(ScanResult {
        meta: meta("fig3", cfg, Some(exact_method)),
        rows,
    })
}

/// `fig4`: the BEC dipole-shift coefficient γ against k_c·z_cm for each
/// Thomas–Fermi radius in the list, comparing the selected exact method
/// against PWS and PFA at fixed z_cm. The corrugation period is rescaled per
/// point, keeping the fractional groove geometry.
pub fn cmd_fig4(cfg: &RunConfig) -> Result<ScanResult> {
    let exact_method = cfg.method.unwrap_or(ResponseMethod::AnalyticCp);
    let methods = [exact_method, ResponseMethod::Pws, ResponseMethod::Pfa];
    let mut engines = Vec::new();
    for m in methods {
        engines.push(engine_for(cfg, m)?);
    }
    if !(cfg.scan.kcz_max >= cfg.scan.kcz_min) || !(cfg.scan.kcz_min > 0.0) {
        return Err(LcpError::Config(
            "fig4 needs 0 < scan.kcz_min ≤ scan.kcz_max".into(),
        ));
    }
    let kczs = linspace(
        cfg.scan.kcz_min,
        cfg.scan.kcz_max,
        cfg.scan.points.unwrap_or(32),
    );
    let z_cm = cfg.bec.z_cm;
    let base_bec = cfg.build_bec()?;

    struct Task {
        r: f64,
        kcz: f64,
        method_idx: usize,
    }
    let mut tasks = Vec::new();
    for &r in &cfg.scan.r_list {
        for &kcz in &kczs {
            for method_idx in 0..methods.len() {
                tasks.push(Task { r, kcz, method_idx });
            }
        }
    }

    let engines_ref = &engines;
    let cfg_ref = &cfg;
    let outcomes = exec::map_ordered(&tasks, |task| {
        let kc = task.kcz / z_cm;
        // At small k_c·z the n²aₙ curvature series converges only once
        // n·k_c·z ≳ 25, so raise the groove harmonic cutoff accordingly.
        let n_floor = (25.0 / task.kcz).ceil().min(4000.0) as usize;
        let profile =
            cfg_ref.build_profile_with_period(2.0 * std::f64::consts::PI / kc, n_floor)?;
        let bec = BecConfig {
            tf_radius: task.r,
            ..base_bec
        };
        gamma_bec_with_err(&profile, &engines_ref[task.method_idx], &bec)
    });

    let mut rows = Vec::with_capacity(tasks.len());
    for (task, outcome) in tasks.iter().zip(outcomes) {
        rows.push(into_row(
            "gamma",
            &methods[task.method_idx].to_string(),
            RowSite {
                k: Some(task.kcz / z_cm),
                z: Some(z_cm),
                kz: Some(task.kcz),
                r: Some(task.r),
                ..Default::default()
            },
            outcome,
            cfg.rel_tol,
            cfg.abs_tol,
        )?);
    }
    Ok(ScanResult {
        meta: meta("fig4", cfg, Some(exact_method)),
        rows,
    })
}
