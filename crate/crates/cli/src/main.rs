//! Command-line interface: solves the three stopping problems and runs the
//! Monte Carlo identity checks, writing JSON summaries (with the resolved
//! configuration and seed embedded) and CSV plot data.
//!
//! Exit codes: 0 success, 2 configuration/usage error, 3 solver failure,
//! 4 verification gate failure. Failures print a machine-readable JSON line
//! to stderr.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use stopbound::amput::{
    boundary_residual_gate, eep_value, solve_boundary, BinomialOracle, GridConfig,
};
use stopbound::config::ModelConfig;
use stopbound::invest2d::{boundary_gamma, fit_boundary, uniqueness_gate, FitConfig};
use stopbound::perpetual::{perpetual_value, solve_perpetual, threshold_rule_value};
use stopbound::riesz::CandidateSet;
use stopbound::verify::{check_duality, check_dynkin, McConfig};
use stopbound::Error;

#[derive(Parser)]
#[command(name = "stopbound", version, about = "Optimal stopping boundaries for GBM")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Perpetual put threshold and value function (d = 1).
    Perpetual(CommonArgs),
    /// Two-factor investment boundary fit (d = 2).
    Invest2d(CommonArgs),
    /// Finite-horizon American put boundary and value (d = 1 + horizon).
    Amput(CommonArgs),
    /// Monte Carlo identity checks for the configured model.
    Verify(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Model configuration file (JSON or TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Random seed for every stochastic component.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Time steps (finite-horizon grid).
    #[arg(long)]
    steps: Option<usize>,
    /// Monte Carlo path budget.
    #[arg(long)]
    paths: Option<usize>,
    /// Quadrature relative tolerance override.
    #[arg(long)]
    tol: Option<f64>,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Config(_) | Error::InvalidParameter(_) => 2,
            Error::GateFailure(_) => 4,
            _ => 3,
        };
        Failure { code, message: e.to_string() }
    }
}

fn gate_failure(msg: impl Into<String>) -> Failure {
    Failure { code: 4, message: msg.into() }
}

fn io_failure(msg: String) -> Failure {
    Failure { code: 3, message: msg }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Perpetual(a) => run_perpetual(a),
        Cmd::Invest2d(a) => run_invest2d(a),
        Cmd::Amput(a) => run_amput(a),
        Cmd::Verify(a) => run_verify(a),
    };
    if let Err(f) = result {
        eprintln!("{}", json!({ "error": f.message, "exit_code": f.code }));
        std::process::exit(f.code);
    }
}

fn write_output(path: &Path, contents: &str, force: bool) -> Result<(), Failure> {
    if path.exists() && !force {
        return Err(Failure {
            code: 2,
            message: format!("{} exists; pass --force to overwrite", path.display()),
        });
    }
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)
            .map_err(|e| io_failure(format!("cannot create {}: {e}", dir.display())))?;
    }
    std::fs::write(path, contents)
        .map_err(|e| io_failure(format!("cannot write {}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn load(args: &CommonArgs) -> Result<(ModelConfig, serde_json::Value), Failure> {
    let cfg = ModelConfig::load(&args.config)?;
    let resolved = json!({
        "config": cfg,
        "config_path": args.config.display().to_string(),
        "seed": args.seed,
        "steps": args.steps,
        "paths": args.paths,
        "tol": args.tol,
    });
    Ok((cfg, resolved))
}

fn run_perpetual(args: &CommonArgs) -> Result<(), Failure> {
    let (cfg, resolved) = load(args)?;
    let params = cfg.gbm()?;
    let sol = solve_perpetual(&params)?;

    let k = params.strike;
    let eval_points: Vec<f64> = if cfg.eval_points.is_empty() {
        vec![0.25 * k, 0.5 * k, k, 1.5 * k]
    } else {
        cfg.eval_points.iter().map(|p| p[0]).collect()
    };
    let value_at: Vec<serde_json::Value> = eval_points
        .iter()
        .map(|&x| Ok(json!({ "x": x, "value": perpetual_value(x, &sol)? })))
        .collect::<Result<_, Error>>()?;

    let summary = json!({
        "x_star": sol.x_star,
        "gamma": sol.gamma,
        "lambda_plus": sol.lambda_plus,
        "lambda_minus": sol.lambda_minus,
        "x_star_numeric": sol.x_star_numeric,
        "value_at": value_at,
        "resolved": resolved,
    });
    write_output(
        &args.out.join("perpetual.json"),
        &serde_json::to_string_pretty(&summary).unwrap(),
        args.force,
    )?;

    // Value, payoff, and user-threshold candidate curves on a spot grid.
    let n = 400;
    let mut csv = String::from("x,payoff,value");
    for t in &cfg.thresholds {
        csv.push_str(&format!(",candidate_{t}"));
    }
    csv.push('\n');
    for i in 1..=n {
        let x = 2.0 * k * i as f64 / n as f64;
        csv.push_str(&format!("{x},{},{}", (k - x).max(0.0), perpetual_value(x, &sol)?));
        for &t in &cfg.thresholds {
            csv.push_str(&format!(",{}", threshold_rule_value(t, x, &sol)?));
        }
        csv.push('\n');
    }
    write_output(&args.out.join("perpetual.csv"), &csv, args.force)
}

fn run_invest2d(args: &CommonArgs) -> Result<(), Failure> {
    let (cfg, resolved) = load(args)?;
    let params = cfg.gbm()?;
    let mut fit_cfg = FitConfig::default();
    if let Some(tol) = args.tol {
        fit_cfg.quad.rel_tol = tol;
    }
    let fit = fit_boundary(&params, &fit_cfg)?;
    let gate = uniqueness_gate(&fit, &params, &[0.9, 1.1], &fit_cfg)?;

    let summary = json!({
        "p1": fit.boundary.p1,
        "p2": fit.boundary.p2,
        "q": fit.boundary.q,
        "residual_sup": fit.report.sup_abs,
        "residual_l2": fit.report.l2,
        "one_dim_thresholds": fit.one_dim_thresholds,
        "symmetric_mode": fit.symmetric_mode,
        "gate": gate,
        "resolved": resolved,
    });
    write_output(
        &args.out.join("invest2d.json"),
        &serde_json::to_string_pretty(&summary).unwrap(),
        args.force,
    )?;

    let n = 200;
    let mut csv = String::from("x1,gamma\n");
    for i in 0..=n {
        let x1 = fit.boundary.p1 * i as f64 / n as f64;
        csv.push_str(&format!("{x1},{}\n", boundary_gamma(&fit.boundary, x1)));
    }
    write_output(&args.out.join("invest2d_boundary.csv"), &csv, args.force)?;

    if !gate.passed {
        return Err(gate_failure(format!(
            "uniqueness gate failed: fitted sup {:.3e}, scaled sups {:?}",
            gate.fitted_sup, gate.scaled_sup
        )));
    }
    Ok(())
}

fn run_amput(args: &CommonArgs) -> Result<(), Failure> {
    let (cfg, resolved) = load(args)?;
    let put = cfg.put()?;
    let grid = GridConfig {
        steps: args.steps.unwrap_or(200),
        cluster_near_expiry: put.horizon > 5.0,
    };
    let boundary = solve_boundary(&put, &grid)?;

    let eval: Vec<(f64, f64)> = if cfg.eval_points.is_empty() {
        vec![(0.0, put.strike)]
    } else {
        cfg.eval_points.iter().map(|p| (0.0, p[0])).collect()
    };
    let oracle = BinomialOracle::new(put, 2000)?.solve(eval[0].1);
    let mut value_at = Vec::new();
    let mut rel_err = 0.0;
    for (i, &(s, x)) in eval.iter().enumerate() {
        let v = eep_value(s, x, &boundary, &put)?;
        if i == 0 {
            rel_err = (v.total - oracle.value).abs() / oracle.value.max(1e-12);
        }
        value_at.push(json!({
            "s": s, "x": x,
            "total": v.total, "premium": v.premium, "european": v.european,
        }));
    }
    let gate = boundary_residual_gate(&boundary, &put, 0.02, 10)?;

    let summary = json!({
        "b0": boundary.b[0],
        "value_at": value_at,
        "oracle_value": oracle.value,
        "rel_err": rel_err,
        "gate": gate,
        "resolved": resolved,
    });
    write_output(
        &args.out.join("amput.json"),
        &serde_json::to_string_pretty(&summary).unwrap(),
        args.force,
    )?;

    let mut csv = String::from("t,b\n");
    for (t, b) in boundary.t.iter().zip(&boundary.b) {
        csv.push_str(&format!("{t},{b}\n"));
    }
    write_output(&args.out.join("amput_boundary.csv"), &csv, args.force)?;

    if !gate.passed {
        return Err(gate_failure(format!(
            "boundary residual gate failed: ratio {:.2}",
            gate.ratio
        )));
    }
    Ok(())
}

fn run_verify(args: &CommonArgs) -> Result<(), Failure> {
    let (cfg, resolved) = load(args)?;
    let params = cfg.gbm()?;
    let k = params.strike;
    let mc = McConfig {
        paths: args.paths.unwrap_or(20_000),
        seed: args.seed,
        dt: 1e-3,
        horizon: 50.0,
    };
    let quad = stopbound::quad::QuadConfig {
        rel_tol: args.tol.unwrap_or(1e-6),
        abs_tol: 1e-10,
        max_subdivisions: 4000,
    };

    let (duality, dynkin) = match params.dim() {
        1 => {
            let duality = check_duality(
                &params,
                &[(0.6 * k, 0.9 * k)],
                &[(1.1 * k, 1.5 * k)],
                &mc,
            )?;
            let sol = solve_perpetual(&params)?;
            let set = CandidateSet::Threshold1D { threshold: sol.x_star };
            let dynkin =
                check_dynkin(&params, &set, &[0.9 * k], &[(0.7 * k, 1.2 * k)], &quad, &mc)?;
            (duality, dynkin)
        }
        2 => {
            let duality = check_duality(
                &params,
                &[(0.6 * k, 0.9 * k), (0.7 * k, 1.0 * k)],
                &[(1.0 * k, 1.4 * k), (0.5 * k, 0.8 * k)],
                &mc,
            )?;
            let ellipse =
                stopbound::invest2d::EllipsoidBoundary::new(0.55 * k, 0.55 * k, 1.8)?;
            let set = CandidateSet::Ellipsoid2D { ellipse };
            let mc2 = McConfig { paths: args.paths.unwrap_or(2_000), ..mc };
            let dynkin = check_dynkin(
                &params,
                &set,
                &[0.95 * k, 0.95 * k],
                &[(0.75 * k, 1.25 * k), (0.75 * k, 1.25 * k)],
                &quad,
                &mc2,
            )?;
            (duality, dynkin)
        }
        d => {
            return Err(Failure {
                code: 2,
                message: format!("verify supports d = 1 or 2, got {d}"),
            })
        }
    };

    let passed = duality.passed && dynkin.passed;
    let summary = json!({
        "duality": duality,
        "dynkin": dynkin,
        "passed": passed,
        "resolved": resolved,
    });
    write_output(
        &args.out.join("verify.json"),
        &serde_json::to_string_pretty(&summary).unwrap(),
        args.force,
    )?;
    if !passed {
        return Err(gate_failure(format!(
            "identity check failed: duality z = {:.2}, dynkin z = {:.2}",
            duality.z, dynkin.z
        )));
    }
    Ok(())
}
