use std::fs::OpenOptions;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gradest::bounds::{bound_case1, bound_case2, bound_general, Ball, ProblemSpec};
use gradest::conditions::{check_corollary, check_system, find_lambda, ConditionSystem, Sampling};
use gradest::geometry::ManifoldModel;
use gradest::hexpr::Nonlinearity;
use gradest::solver::{solve_radial, RadialSolution};
use gradest::verify::{
    liouville_scan, run_suite, solve_for_verification, verify_gradient_bound, verify_harnack_for,
    SuiteCase, SuiteTally, VerificationReport,
};
use serde_json::{json, Value};

use crate::config::{parse_list, RunConfig};
use crate::report::{fmt_f64, to_json, value, Outcome, Report};
use crate::{
    BoundArgs, CheckArgs, Command, ExprArgs, FindLambdaArgs, GeometryArgs, LichnerowiczArgs,
    LiouvilleArgs, SolveArgs, SweepArgs, VerifyArgs,
};

/// Liouville tables count as constant within this relative spread.
const DECAY_TOL: f64 = 1e-6;

pub fn run(command: Command, config_path: Option<&Path>) -> Result<u8> {
    match command {
        Command::Check(args) => check(args, config_path),
        Command::FindLambda(args) => find(args, config_path),
        Command::Bound(args) => bound(args, config_path),
        Command::Solve(args) => solve(args, config_path),
        Command::Verify(args) => verify(args, config_path),
        Command::Liouville(args) => liouville(args, config_path),
        Command::Sweep(args) => sweep(args, config_path),
    }
}

fn emit(report: &Report) -> Result<u8> {
    println!("{}", to_json(report)?);
    Ok(report.verdict.exit_code())
}

fn parse_params(items: &[String]) -> Result<Vec<(String, f64)>> {
    items
        .iter()
        .map(|item| {
            let (name, v) = item
                .split_once('=')
                .with_context(|| format!("--param {item:?} is not name=value"))?;
            let v: f64 = v
                .trim()
                .parse()
                .with_context(|| format!("bad value in --param {item:?}"))?;
            Ok((name.trim().to_string(), v))
        })
        .collect()
}

fn nonlinearity(expr: &ExprArgs) -> Result<Option<Nonlinearity>> {
    let Some(text) = expr.h.as_deref() else {
        return Ok(None);
    };
    let params = parse_params(&expr.params)?;
    let borrowed: Vec<(&str, f64)> = params.iter().map(|(n, v)| (n.as_str(), *v)).collect();
    let h = Nonlinearity::parse(text, &borrowed).with_context(|| format!("in h = {text:?}"))?;
    Ok(Some(h))
}

fn require_h(expr: &ExprArgs) -> Result<Nonlinearity> {
    nonlinearity(expr)?.context("--h is required")
}

fn h_inputs(h: &Nonlinearity) -> Value {
    json!({ "h": h.expression().to_string(), "params": value(h.params()) })
}

fn model(geometry: &GeometryArgs, n: usize) -> Result<ManifoldModel> {
    let model = match geometry.geometry.as_str() {
        "euclidean" => {
            if geometry.kappa.is_some_and(|k| k != 0.0) {
                bail!("--kappa needs --geometry hyperbolic");
            }
            ManifoldModel::euclidean(n)?
        }
        "hyperbolic" => {
            let kappa = geometry.kappa.unwrap_or(-1.0);
            if !(kappa < 0.0) {
                bail!("hyperbolic models need kappa < 0, got {kappa}");
            }
            ManifoldModel::hyperbolic(n, kappa)?
        }
        other => bail!("unknown geometry {other:?}, expected euclidean or hyperbolic"),
    };
    Ok(model)
}

fn lichnerowicz(args: &LichnerowiczArgs) -> Result<(f64, f64, f64, f64)> {
    let need = |v: Option<f64>, flag: &str| v.with_context(|| format!("--{flag} is required"));
    Ok((
        need(args.lambda1, "lambda1")?,
        need(args.lambda2, "lambda2")?,
        need(args.b, "b")?,
        need(args.p, "p")?,
    ))
}

/// Fail before any work if `path` cannot be written.
fn ensure_writable(path: &Path) -> Result<()> {
    OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .with_context(|| format!("output {} is not writable", path.display()))?;
    Ok(())
}

fn write_solution(path: &Path, sol: &RadialSolution) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r", "u", "du", "log_grad"])?;
    for (((r, u), du), g) in sol
        .r()
        .iter()
        .zip(sol.u())
        .zip(sol.du())
        .zip(sol.log_gradient())
    {
        w.write_record([fmt_f64(*r), fmt_f64(*u), fmt_f64(*du), fmt_f64(g)])?;
    }
    w.flush()?;
    Ok(())
}

fn solution_summary(sol: &RadialSolution) -> Value {
    let (u_min, u_max) = sol
        .u()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &u| {
            (lo.min(u), hi.max(u))
        });
    json!({
        "termination": value(&sol.termination()),
        "reached": sol.reached(),
        "samples": sol.len(),
        "u_min": u_min,
        "u_max": u_max,
        "residual": sol.residual().ok(),
    })
}

fn check(args: CheckArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    let h = require_h(&args.expr)?;
    let system = ConditionSystem::from_label(&args.system).with_context(|| {
        format!(
            "unknown system {:?}, expected 1.9, cor1.3, cor1.4 or cor1.5",
            args.system
        )
    })?;
    let sampling = Sampling::new(args.n, args.k, config.s_range, config.samples);
    let report = match system {
        ConditionSystem::General => {
            let lambda = args.lambda.context("--lambda is required for system 1.9")?;
            check_system(&h, lambda, &sampling)?
        }
        mode => check_corollary(&h, mode, &sampling)?,
    };
    let mut inputs = h_inputs(&h);
    inputs["system"] = json!(system.label());
    inputs["lambda"] = json!(args.lambda);
    inputs["n"] = json!(args.n);
    inputs["K"] = json!(args.k);
    let verdict = if report.passed() {
        Outcome::Pass
    } else {
        Outcome::Fail
    };
    let mut out = Report::new("check", &config, inputs, verdict);
    out.hypotheses = value(&report);
    out.margin = Some(report.margin);
    emit(&out)
}

fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, count] = parts[..] else {
        bail!("grid {text:?} is not of the form lo:hi:count");
    };
    let lo: f64 = lo
        .parse()
        .with_context(|| format!("bad grid start in {text:?}"))?;
    let hi: f64 = hi
        .parse()
        .with_context(|| format!("bad grid end in {text:?}"))?;
    let count: usize = count
        .parse()
        .with_context(|| format!("bad grid count in {text:?}"))?;
    match count {
        0 => bail!("grid {text:?} is empty"),
        1 => Ok(vec![lo]),
        _ => Ok((0..count)
            .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

fn find(args: FindLambdaArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    let h = require_h(&args.expr)?;
    let grid = parse_grid(&args.lambda_grid)?;
    let sampling = Sampling::new(args.n, args.k, config.s_range, config.samples);
    let feasible = find_lambda(&h, &sampling, &grid)?;
    let mut inputs = h_inputs(&h);
    inputs["n"] = json!(args.n);
    inputs["K"] = json!(args.k);
    inputs["lambda-grid"] = json!(grid);
    let verdict = if feasible.is_empty() {
        Outcome::Fail
    } else {
        Outcome::Pass
    };
    let mut out = Report::new("find-lambda", &config, inputs, verdict);
    out.hypotheses = feasible.first().map_or(Value::Null, |(_, r)| value(r));
    out.statistic = json!({ "feasible": feasible.iter().map(|(l, _)| *l).collect::<Vec<_>>() });
    emit(&out)
}

fn bound(args: BoundArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    let ball = Ball::new(args.n, args.k, args.r)?;
    let cut = config.cutoff();
    let mut inputs = json!({ "case": args.case, "n": args.n, "K": args.k, "R": args.r });
    let rep = match args.case.as_str() {
        "general" => bound_general(&ball, &cut, config.variant)?,
        "case1" | "case2" => {
            let (l1, l2, b, p) = lichnerowicz(&args.lich)?;
            inputs["lambda1"] = json!(l1);
            inputs["lambda2"] = json!(l2);
            inputs["b"] = json!(b);
            inputs["p"] = json!(p);
            if args.case == "case1" {
                bound_case1(&ball, &cut, &ProblemSpec::case1(l1, l2, b, p)?)?
            } else {
                bound_case2(&ball, &cut, &ProblemSpec::case2(l1, l2, b, p)?)?
            }
        }
        other => bail!("unknown case {other:?}, expected case1, case2 or general"),
    };
    let mut out = Report::new("bound", &config, inputs, Outcome::Computed);
    out.bound = value(&rep);
    emit(&out)
}

fn solve(args: SolveArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    ensure_writable(&args.out)?;
    let h = require_h(&args.expr)?;
    let model = model(&args.geometry, args.n)?;
    let sol = solve_radial(&model, &h, args.u0, args.rmax, &config.solver())?;
    write_solution(&args.out, &sol)?;
    let mut inputs = h_inputs(&h);
    inputs["model"] = value(&model);
    inputs["u0"] = json!(args.u0);
    inputs["rmax"] = json!(args.rmax);
    inputs["out"] = json!(args.out);
    let outcome = Outcome::from(sol.termination());
    if outcome == Outcome::StepFailure {
        eprintln!("integration failed; last good r = {}", sol.reached());
    }
    let mut out = Report::new("solve", &config, inputs, outcome);
    out.statistic = solution_summary(&sol);
    emit(&out)
}

fn verify(args: VerifyArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    if let Some(out) = &args.out {
        ensure_writable(out)?;
    }
    let model = model(&args.geometry, args.n)?;
    let k = args.k.unwrap_or(model.ricci_bound());
    let ball = Ball::new(args.n, k, args.r)?;
    let given_h = nonlinearity(&args.expr)?;
    let (spec, h) = match args.theorem.as_str() {
        "thm1.1" => {
            let (l1, l2, b, p) = lichnerowicz(&args.lich)?;
            let spec = ProblemSpec::lichnerowicz(l1, l2, b, p)?;
            let h = given_h.unwrap_or_else(|| spec.nonlinearity());
            (spec, h)
        }
        "thm1.2" | "harnack" => {
            let h = given_h.context("--h is required")?;
            let lambda = args.lambda.context("--lambda is required")?;
            (ProblemSpec::general(h.clone(), lambda)?, h)
        }
        other => bail!("unknown theorem {other:?}, expected thm1.1, thm1.2 or harnack"),
    };

    let sol = solve_for_verification(&model, &h, args.u0, args.r, &config.solver())?;
    if let Some(out) = &args.out {
        write_solution(out, &sol)?;
    }
    let settings = config.verify();
    let report: VerificationReport = if args.theorem == "harnack" {
        verify_harnack_for(&sol, &spec, &ball, &settings)?.1
    } else {
        verify_gradient_bound(&sol, &spec, &ball, &settings)?
    };
    if let Some(reason) = &report.reason {
        eprintln!("note: {reason}");
    }

    let mut inputs = h_inputs(&h);
    inputs["theorem"] = value(&report.theorem);
    inputs["problem"] = value(&spec);
    inputs["model"] = value(&model);
    inputs["u0"] = json!(args.u0);
    inputs["R"] = json!(args.r);
    inputs["solution"] = solution_summary(&sol);
    let mut out = Report::new("verify", &config, inputs, report.verdict.into());
    out.hypotheses = report.hypotheses.as_ref().map_or(Value::Null, value);
    out.bound = value(&report.bound);
    if report.theorem == gradest::verify::Theorem::Harnack {
        out.bound["harnack_factor"] = json!(report.bound_value);
    }
    out.statistic = json!(report.statistic);
    out.margin = report.margin;
    emit(&out)
}

fn liouville(args: LiouvilleArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    if let Some(out) = &args.out {
        ensure_writable(out)?;
    }
    let radii = parse_list(&args.r_list)?;
    let scan = liouville_scan(args.n, &config.cutoff(), config.variant, &radii)?;
    let verdict = if scan.is_constant(DECAY_TOL) {
        Outcome::Pass
    } else {
        Outcome::Fail
    };

    let table = |w: &mut csv::Writer<Box<dyn std::io::Write>>| -> Result<()> {
        w.write_record(["R", "C", "C_R2"])?;
        for row in &scan.rows {
            w.write_record([fmt_f64(row.r), fmt_f64(row.c), fmt_f64(row.c_r2)])?;
        }
        w.flush()?;
        Ok(())
    };
    if let Some(out) = &args.out {
        table(&mut csv::Writer::from_writer(Box::new(
            std::fs::File::create(out)?,
        )))?;
    }
    if args.out.is_some() || args.json {
        let inputs = json!({ "n": args.n, "R-list": radii, "K": 0.0 });
        let mut out = Report::new("liouville", &config, inputs, verdict);
        out.statistic = json!({ "rows": value(&scan.rows), "spread": scan.spread });
        return emit(&out);
    }
    table(&mut csv::Writer::from_writer(Box::new(std::io::stdout())))?;
    Ok(verdict.exit_code())
}

fn sweep(args: SweepArgs, path: Option<&Path>) -> Result<u8> {
    let config = RunConfig::resolve(args.tuning, path)?;
    if let Some(out) = &args.out {
        ensure_writable(out)?;
    }
    let cs = parse_list(&args.c_list)?;
    let ds = parse_list(&args.d_list)?;
    let lambdas = parse_list(&args.lambda_list)?;
    let u0s = parse_list(&args.u0_list)?;
    let kappas = parse_list(&args.kappa_list)?;
    let ns = parse_list(&args.n_list)?;

    let mut models = Vec::new();
    for &kappa in &kappas {
        for &n in &ns {
            if n.fract() != 0.0 || n < 2.0 {
                bail!("dimension {n} in --n-list is not an integer >= 2");
            }
            models.push(ManifoldModel::new(n as usize, kappa)?);
        }
    }
    let mut cases = Vec::new();
    for model in &models {
        for &c in &cs {
            for &d in &ds {
                let h = Nonlinearity::parse("c * exp(d * s)", &[("c", c), ("d", d)])?;
                for &lambda in &lambdas {
                    for &u0 in &u0s {
                        cases.push(SuiteCase {
                            h: h.clone(),
                            lambda,
                            model: *model,
                            u0,
                            r: args.r,
                        });
                    }
                }
            }
        }
    }

    let results = run_suite(&cases, &config.verify(), &config.solver());
    let mut gradient = SuiteTally::default();
    let mut harnack = SuiteTally::default();
    let mut rows = Vec::with_capacity(results.len());
    for (case, result) in cases.iter().zip(&results) {
        let params = case.h.params();
        let mut row = json!({
            "c": params["c"],
            "d": params["d"],
            "lambda": case.lambda,
            "u0": case.u0,
            "n": case.model.dimension(),
            "kappa": case.model.kappa(),
        });
        match result {
            Ok(o) => {
                gradient.add(o.gradient.verdict);
                harnack.add(o.harnack.verdict);
                row["termination"] = value(&o.termination);
                row["reached"] = json!(o.reached);
                row["gradient"] = value(&o.gradient.verdict);
                row["sup_G"] = json!(o.gradient.statistic);
                row["C"] = json!(o.gradient.bound_value);
                row["harnack"] = value(&o.harnack.verdict);
                row["ratio"] = json!(o.harnack.statistic);
                row["factor"] = json!(o.harnack.bound_value);
            }
            Err(e) => {
                gradient.errors += 1;
                harnack.errors += 1;
                row["error"] = json!(e.to_string());
            }
        }
        rows.push(row);
    }

    if let Some(out) = &args.out {
        let mut w = csv::Writer::from_path(out)?;
        let cols = [
            "c",
            "d",
            "lambda",
            "u0",
            "n",
            "kappa",
            "termination",
            "reached",
            "gradient",
            "sup_G",
            "C",
            "harnack",
            "ratio",
            "factor",
        ];
        w.write_record(cols)?;
        for row in &rows {
            w.write_record(cols.iter().map(|k| match &row[*k] {
                Value::Number(x) if x.is_f64() => fmt_f64(x.as_f64().expect("f64 number")),
                Value::String(s) => s.clone(),
                Value::Null => String::new(),
                other => other.to_string(),
            }))?;
        }
        w.flush()?;
    }

    let fails = gradient.fail + harnack.fail;
    let verdict = if fails > 0 {
        Outcome::Fail
    } else if gradient.errors > 0 {
        Outcome::NoVerdict
    } else {
        Outcome::Pass
    };
    let inputs = json!({
        "c-list": cs, "d-list": ds, "lambda-list": lambdas, "u0-list": u0s,
        "n-list": ns, "kappa-list": kappas, "R": args.r,
    });
    let mut out = Report::new("sweep", &config, inputs, verdict);
    out.statistic =
        json!({ "gradient": value(&gradient), "harnack": value(&harnack), "runs": rows });
    if gradient.pass + gradient.fail == 0 {
        eprintln!("note: no run reached a verdict");
    }
    emit(&out)
}
