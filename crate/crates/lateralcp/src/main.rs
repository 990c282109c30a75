//! `lateralcp` — scans of the lateral Casimir–Polder interaction above a
//! corrugated perfect conductor, emitted as CSV or JSON.
//!
//! Exit codes: 0 success; 2 configuration/usage error; 3 numerical failure.

use clap::{Parser, Subcommand};
use lateralcp::config::RunConfig;
use lateralcp::scan::write_output;
use lateralcp::{sweep, LcpError, Result};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "lateralcp",
    version,
    about = "Lateral Casimir-Polder response of an atom above a corrugated surface",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// key=value configuration file (later flags override it)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Single configuration override, applied after --config (repeatable)
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Write output here instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long, global = true, value_name = "FMT")]
    format: Option<String>,

    /// Response method: exact | analytic-cp | analytic-vdw | pfa | pws
    #[arg(long, global = true, value_name = "NAME")]
    method: Option<String>,

    /// Relative tolerance for numerical evaluation
    #[arg(long, global = true, value_name = "X")]
    rel_tol: Option<f64>,

    /// Worker threads for scan evaluation (defaults to all cores)
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Response g(k, z_A) plus the PFA/PWS ratios at the configured wavenumbers
    Response,
    /// Approximation ratios rho_pfa and rho_pws alone
    Ratios,
    /// Lateral potential U(x, z_A) over the configured x points
    Potential,
    /// Lateral force -dU/dx over the configured x points
    Force,
    /// Relative dipole-frequency shift of a trapped condensate
    BecShift,
    /// Ratio curves vs k z_A: rho_pfa (CP and vdW) and rho_pws (CP)
    Fig1,
    /// Lateral potential over one period for exact/PWS/PFA at fixed k_c z_A
    Fig3,
    /// Condensate shift vs k_c z_CM for several Thomas-Fermi radii
    Fig4,
}

fn run(cli: &Cli) -> Result<()> {
    lateralcp::exec::install_thread_pool(cli.threads)?;

    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    for kv in &cli.set {
        let (key, value) = kv.split_once('=').ok_or_else(|| {
            LcpError::Config(format!("--set expects KEY=VALUE, got `{kv}`"))
        })?;
        cfg.apply_kv(key.trim(), value.trim())?;
    }
    if let Some(m) = &cli.method {
        cfg.method = Some(m.parse()?);
    }
    if let Some(rel) = cli.rel_tol {
        if !(rel > 0.0 && rel < 0.5) {
            return Err(LcpError::Config(format!(
                "--rel-tol must lie in (0, 0.5); got {rel:e}"
            )));
        }
        cfg.rel_tol = rel;
    }
    if let Some(f) = &cli.format {
        cfg.format = f.parse()?;
    }

    let result = match cli.command {
        Command::Response => sweep::cmd_response(&cfg),
        Command::Ratios => sweep::cmd_ratios(&cfg),
        Command::Potential => sweep::cmd_potential(&cfg),
        Command::Force => sweep::cmd_force(&cfg),
        Command::BecShift => sweep::cmd_bec_shift(&cfg),
        Command::Fig1 => sweep::cmd_fig1(&cfg),
        Command::Fig3 => sweep::cmd_fig3(&cfg),
        Command::Fig4 => sweep::cmd_fig4(&cfg),
    }?;
    write_output(cli.out.as_deref(), cfg.format, &result)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lateralcp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
