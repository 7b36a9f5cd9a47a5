//! Implementations of the four subcommands.
//!
//! Each command parses and validates the scenario, runs the computation,
//! and writes a single `report.json` into the output directory. Numerical
//! failures still produce a report (with a `failed` result) before the
//! process exits with code 3; validation failures exit 2 with a diagnostic
//! on stderr and no report.

use std::fs;
use std::path::PathBuf;

use setr_core::market;
use setr_core::setr;
use setr_core::{ArrivalProcess, Tolerances};

use crate::config::{load_config, LoadedConfig, PremiumApplicationSpec, PremiumSpec, SetrMode};
use crate::error::{classify, CliError};
use crate::output::{emit_paths, write_curve_csv, PathsManifest};
use crate::report::{write_report, ReportResult, RunReport, TOOL_VERSION};
use crate::{CommonArgs, OutputFormat, PathArgs};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Compute,
    Curve,
    Simulate,
    Verify,
}

impl CommandKind {
    fn as_str(self) -> &'static str {
        match self {
            CommandKind::Compute => "compute",
            CommandKind::Curve => "curve",
            CommandKind::Simulate => "simulate",
            CommandKind::Verify => "verify",
        }
    }
}

struct RunContext {
    loaded: LoadedConfig,
    out_dir: PathBuf,
    seed: u64,
    tol: Tolerances,
    arrival: ArrivalProcess,
    warnings: Vec<String>,
}

impl RunContext {
    fn report(&self, kind: CommandKind, result: ReportResult) -> RunReport {
        RunReport {
            scenario: self.loaded.config.name.clone(),
            tool_version: TOOL_VERSION,
            config_hash: self.loaded.hash.clone(),
            command: kind.as_str(),
            setr_mode: self.loaded.config.setr_mode.as_str(),
            result,
            warnings: self.warnings.clone(),
        }
    }
}

fn prepare(args: &CommonArgs) -> Result<RunContext, CliError> {
    let loaded = load_config(&args.config)?;
    let out_dir = args
        .out
        .clone()
        .or_else(|| loaded.config.output.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", out_dir.display())))?;
    let seed = args.seed.unwrap_or(loaded.config.seed);
    let tol = loaded.config.tolerances()?;
    let arrival = loaded.config.arrival.build()?;

    let mut warnings = Vec::new();
    if matches!(loaded.config.premium, PremiumSpec::Geometric { .. }) {
        warnings.push(
            "geometric premium: the growth exponent is measured from t0, \
             i.e. rate(s) = p0 * exp(lambda * (s - t0)) with rate(t0) = p0"
                .to_string(),
        );
    }
    if let Some(sim) = &loaded.config.simulation {
        if sim.premium_application == PremiumApplicationSpec::DriftAdjusted {
            warnings.push(
                "premium applied as a drift adjustment (sensitivity variant); \
                 the no-arbitrage identities assume additive level application"
                    .to_string(),
            );
        }
        if sim.clamp_at_zero {
            warnings.push("carbon path clamped at zero after the shock (display mode)".into());
        }
    }

    Ok(RunContext {
        loaded,
        out_dir,
        seed,
        tol,
        arrival,
        warnings,
    })
}

/// Entry point shared by all subcommands: computes, then writes exactly one
/// report (success or numerical failure).
pub fn run_command(kind: CommandKind, args: &PathArgs) -> Result<(), CliError> {
    let mut ctx = prepare(&args.common)?;
    let outcome = match kind {
        CommandKind::Compute => compute_result(&mut ctx, &args.common),
        CommandKind::Curve => curve_result(&mut ctx),
        CommandKind::Simulate => simulate_result(&mut ctx, args),
        CommandKind::Verify => verify_result(&mut ctx, args),
    };
    match outcome {
        Ok(result) => {
            let report = ctx.report(kind, result);
            let path = write_report(&ctx.out_dir, &report)?;
            print_summary(&report, &path);
            Ok(())
        }
        Err(CliError::Numerical(e)) => {
            let report = ctx.report(
                kind,
                ReportResult::Failed {
                    error: e.to_string(),
                },
            );
            write_report(&ctx.out_dir, &report)?;
            Err(CliError::Numerical(e))
        }
        Err(other) => Err(other),
    }
}

fn print_summary(report: &RunReport, report_path: &std::path::Path) {
    match &report.result {
        ReportResult::Setr { method, value, .. } => {
            println!("{}: phi = {value} ({method})", report.scenario);
        }
        ReportResult::Curve {
            points, csv_file, ..
        } => {
            println!("{}: {points} curve points -> {csv_file}", report.scenario);
        }
        ReportResult::Paths {
            n_paths,
            manifest_file,
        } => {
            println!("{}: {n_paths} paths -> {manifest_file}", report.scenario);
        }
        ReportResult::MonteCarlo {
            residual, passed, ..
        } => {
            let verdict = if *passed { "pass" } else { "fail" };
            println!("{}: residual = {residual} -> {verdict}", report.scenario);
        }
        ReportResult::Failed { error } => {
            println!("{}: failed ({error})", report.scenario);
        }
    }
    println!("report: {}", report_path.display());
}

fn compute_result(ctx: &mut RunContext, args: &CommonArgs) -> Result<ReportResult, CliError> {
    let cfg = &ctx.loaded.config;
    let computed = match cfg.setr_mode {
        SetrMode::WeakConstant => {
            let p = cfg.constant_premium_rate()?;
            setr::setr_weak_constant(&ctx.arrival, p, &ctx.tol).map_err(classify)?
        }
        SetrMode::Geometric => {
            let (p0, lambda) = cfg.geometric_premium()?;
            setr::setr_geometric(&ctx.arrival, p0, lambda, &ctx.tol).map_err(classify)?
        }
        SetrMode::Residual => {
            let phi = cfg.phi_override.ok_or_else(|| {
                CliError::Validation("setr_mode residual requires phi_override".into())
            })?;
            let premium = cfg.build_premium(ctx.arrival.t0())?;
            setr::noarb_residual(&ctx.arrival, &premium, phi, &ctx.tol).map_err(classify)?
        }
        SetrMode::StrongCurve => {
            return Err(CliError::Validation(
                "setr_mode strong_curve produces a curve; use the `curve` command".into(),
            ));
        }
    };
    if args.format == OutputFormat::Csv {
        let result = ReportResult::setr(&computed);
        if let ReportResult::Setr {
            method,
            value,
            abs_error_estimate,
        } = &result
        {
            let body =
                format!("method,value,abs_error_estimate\n{method},{value},{abs_error_estimate}\n");
            let path = ctx.out_dir.join("result.csv");
            fs::write(&path, body)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok(ReportResult::setr(&computed))
}

fn curve_result(ctx: &mut RunContext) -> Result<ReportResult, CliError> {
    let cfg = &ctx.loaded.config;
    let p = cfg.constant_premium_rate()?;
    let grid = cfg
        .grid_days
        .as_deref()
        .filter(|g| !g.is_empty())
        .ok_or_else(|| {
            CliError::Validation("strong-curve grid (grid_days) is missing or empty".into())
        })?;
    let curve = setr::setr_strong_curve(&ctx.arrival, p, grid, &ctx.tol).map_err(classify)?;
    if !curve.skipped.is_empty() {
        ctx.warnings.push(format!(
            "skipped {} grid point(s) with undefined hazard: {:?}",
            curve.skipped.len(),
            curve.skipped
        ));
    }
    let csv_path = write_curve_csv(&ctx.out_dir, &curve)?;
    Ok(ReportResult::Curve {
        csv_file: csv_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
        points: curve.values.len(),
        skipped_grid_points: curve.skipped,
    })
}

/// The constant phi a simulation runs against: the override when given,
/// otherwise the scenario's own SETR.
fn resolve_phi(ctx: &RunContext) -> Result<(f64, String), CliError> {
    let cfg = &ctx.loaded.config;
    if let Some(phi) = cfg.phi_override {
        if !(phi.is_finite() && phi >= 0.0) {
            return Err(CliError::Validation(format!(
                "phi_override must be nonnegative and finite (got {phi})"
            )));
        }
        return Ok((phi, "phi_override".to_string()));
    }
    match cfg.setr_mode {
        SetrMode::WeakConstant => {
            let p = cfg.constant_premium_rate()?;
            let r = setr::setr_weak_constant(&ctx.arrival, p, &ctx.tol).map_err(classify)?;
            Ok((r.value, "weak_constant".to_string()))
        }
        SetrMode::Geometric => {
            let (p0, lambda) = cfg.geometric_premium()?;
            let r = setr::setr_geometric(&ctx.arrival, p0, lambda, &ctx.tol).map_err(classify)?;
            Ok((r.value, "geometric".to_string()))
        }
        SetrMode::StrongCurve | SetrMode::Residual => Err(CliError::Validation(
            "this command needs a constant SETR: use setr_mode weak_constant or geometric, \
             or set phi_override"
                .into(),
        )),
    }
}

fn simulate_result(ctx: &mut RunContext, args: &PathArgs) -> Result<ReportResult, CliError> {
    let cfg = ctx.loaded.config.clone();
    let params = cfg.market_params(ctx.seed)?;
    let n_paths = args
        .paths
        .or(cfg.simulation.as_ref().and_then(|s| s.n_paths))
        .unwrap_or(4);
    if n_paths == 0 {
        return Err(CliError::Validation(
            "simulate needs at least one path".into(),
        ));
    }
    let (phi, _) = resolve_phi(ctx)?;
    let premium = cfg.build_premium(ctx.arrival.t0())?;
    let opts = cfg.sim_options();

    let mut paths = Vec::with_capacity(n_paths as usize);
    for i in 0..n_paths {
        paths.push(
            market::simulate_path(&params, &premium, phi, &ctx.arrival, &opts, i)
                .map_err(classify)?,
        );
    }

    let manifest = PathsManifest {
        scenario: cfg.name.clone(),
        config_hash: ctx.loaded.hash.clone(),
        master_seed: ctx.seed,
        phi,
        premium_application: match opts.premium_application {
            market::PremiumApplication::AdditiveLevel => "additive".to_string(),
            market::PremiumApplication::DriftAdjusted => "drift_adjusted".to_string(),
        },
        clamp_at_zero: opts.clamp_at_zero,
        price_model_note: "premium applied additively to the price level; set \
                           simulation.premium_application = \"drift_adjusted\" for the \
                           multiplicative-drift variant"
            .to_string(),
        paths: Vec::new(),
    };
    let manifest_path = emit_paths(
        &ctx.out_dir,
        &paths,
        ctx.arrival.t0() + params.horizon,
        manifest,
    )?;
    Ok(ReportResult::Paths {
        n_paths,
        manifest_file: manifest_path
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default(),
    })
}

fn verify_result(ctx: &mut RunContext, args: &PathArgs) -> Result<ReportResult, CliError> {
    let cfg = ctx.loaded.config.clone();
    let params = cfg.market_params(ctx.seed)?;
    let n_paths = args
        .paths
        .or(cfg.simulation.as_ref().and_then(|s| s.n_paths))
        .unwrap_or(100_000);
    if n_paths < 2 {
        return Err(CliError::Validation("verify needs at least 2 paths".into()));
    }
    let (phi, phi_source) = resolve_phi(ctx)?;
    let premium = cfg.build_premium(ctx.arrival.t0())?;
    let mc =
        market::run_monte_carlo(&params, &premium, phi, &ctx.arrival, n_paths).map_err(classify)?;
    Ok(ReportResult::monte_carlo(&mc, phi, phi_source))
}
