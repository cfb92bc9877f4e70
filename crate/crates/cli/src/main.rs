//! `entropylab` command-line front end.
//!
//! Exit status: 0 on success (an inconclusive witness search counts as
//! success), 1 when a check reports violations, 2 for usage, input and
//! parse errors, 3 for numerical breakdown.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use entropylab::functionals::{
    gibbs_objective, gt_jensen_rhs, lieb_trace, lieb_trace_derivative_at_zero, multi_trace_exp,
    reduced_relative_entropy, relative_entropy, trace_exp_functional, InstanceFile,
};
use entropylab::matrix::{random_contraction_tuple, random_hermitian, random_pd, MatrixList, RngSeed};
use entropylab::variational::{maximize, Objective, SolverConfig};
use entropylab::verifiers::{run_check, CheckKind, CheckReport, Dims, Outcome, Overrides, Summary, DEFAULT_SEED};
use entropylab::{Error, MatrixJson, MultiInstance64};

#[derive(Parser)]
#[command(
    name = "entropylab",
    version,
    about = "Trace functionals, inequality checks and variational solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a functional on an instance file.
    Eval {
        functional: Functional,
        instance: PathBuf,
        /// Write the JSON record here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one check by name, or `all`.
    Check(CheckArgs),
    /// Maximize a variational objective.
    Optimize(OptimizeArgs),
    /// Generate a random matrix or instance file.
    Gen(GenArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Functional {
    RelativeEntropy,
    ReducedRelativeEntropy,
    LiebTrace,
    LiebDerivative,
    Phi,
    MultiPhi,
    GtJensenRhs,
    GibbsObjective,
}

#[derive(Args)]
struct CheckArgs {
    /// Check name (sh_convexity, phi_concavity, multi_concavity, gt_jensen,
    /// gibbs_identity, derivative_limit, gt_route_gap, homogeneity) or `all`.
    suite: String,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, env = "ENTROPYLAB_SEED", value_parser = parse_seed)]
    seed: Option<u64>,
    #[arg(long)]
    tol_abs: Option<f64>,
    #[arg(long)]
    tol_rel: Option<f64>,
    /// `k,m,n`; repeat to cycle through several shapes.
    #[arg(long, value_parser = parse_dims)]
    dims: Vec<Dims>,
    /// Write `<check>.json` per check and `summary.json` here.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ObjectiveName {
    Gibbs,
    Phi,
}

#[derive(Args)]
struct OptimizeArgs {
    objective: ObjectiveName,
    instance: PathBuf,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    grad_tol: Option<f64>,
    #[arg(long)]
    initial_step: Option<f64>,
    #[arg(long)]
    backtrack_factor: Option<f64>,
    #[arg(long)]
    armijo_c: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GenKind {
    Pd,
    Hermitian,
    ContractionTuple,
    MultiInstance,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    /// Size of a single matrix (`pd`, `hermitian`).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Blocks satisfy sum H_i* H_i = I (needs k*m >= n).
    #[arg(long)]
    sum_identity: bool,
    #[arg(long, default_value_t = 0.05)]
    eig_min: f64,
    #[arg(long, default_value_t = 5.0)]
    eig_max: f64,
    /// Scale of Hermitian draws.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, env = "ENTROPYLAB_SEED", value_parser = parse_seed, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Decimal or `0x`-prefixed hexadecimal.
fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed \"{s}\": {e}"))
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    Dims::parse(s).map_err(|e| e.to_string())
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Numerical(m) => f.write_str(m),
        }
    }
}

fn classify(context: &str, e: Error) -> Failure {
    let msg = format!("{context}: {e}");
    if e.is_numerical() {
        Failure::Numerical(msg)
    } else {
        Failure::Usage(msg)
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    InstanceFile::from_json_str(&text).map_err(|e| classify(&path.display().to_string(), e))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output serializes");
    s.push('\n');
    s
}

/// `%.15g`: 15 significant digits, trailing zeros dropped. The JSON record
/// keeps the full value.
fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let sci = format!("{v:.14e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: String| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    };
    if (-5..15).contains(&exp) {
        trim(format!("{v:.*}", (14 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa.to_string()))
    }
}

fn evaluate(functional: Functional, inst: &InstanceFile) -> entropylab::Result<f64> {
    match functional {
        Functional::RelativeEntropy => relative_entropy(&inst.matrix_a()?, &inst.matrix_b()?),
        Functional::ReducedRelativeEntropy => {
            let (a, b) = (inst.matrix_a()?, inst.matrix_b()?);
            reduced_relative_entropy(&a, &b, &inst.matrix_h_or_identity(a.dim())?)
        }
        Functional::LiebTrace => {
            let (a, b) = (inst.matrix_a()?, inst.matrix_b()?);
            lieb_trace(&a, &b, &inst.matrix_h_or_identity(a.dim())?, inst.power()?)
        }
        Functional::LiebDerivative => {
            let (a, b) = (inst.matrix_a()?, inst.matrix_b()?);
            lieb_trace_derivative_at_zero(&a, &b, &inst.matrix_h_or_identity(a.dim())?)
        }
        Functional::Phi => {
            let (a, l) = (inst.matrix_a()?, inst.matrix_l()?);
            trace_exp_functional(&a, &l, &inst.matrix_h_or_identity(l.dim())?)
        }
        Functional::MultiPhi => multi_trace_exp(&inst.multi_positive()?),
        Functional::GtJensenRhs => gt_jensen_rhs(&inst.multi_hermitian()?),
        Functional::GibbsObjective => gibbs_objective(&inst.matrix_x()?, &inst.matrix_b()?),
    }
}

#[derive(Serialize)]
struct EvalRecord<'a> {
    functional: &'a str,
    inputs: EvalInputs<'a>,
    value: f64,
}

#[derive(Serialize)]
struct EvalInputs<'a> {
    file: String,
    instance: &'a InstanceFile,
}

fn cmd_eval(functional: Functional, path: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let inst = read_instance(path)?;
    let value = evaluate(functional, &inst).map_err(|e| classify(&path.display().to_string(), e))?;
    println!("{}", format_value(value));
    if let Some(out) = out {
        let name = functional
            .to_possible_value()
            .expect("named variant")
            .get_name()
            .to_string();
        let record = EvalRecord {
            functional: &name,
            inputs: EvalInputs {
                file: path.display().to_string(),
                instance: &inst,
            },
            value,
        };
        write_text(out, &to_json(&record))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &CheckArgs) -> Result<ExitCode, Failure> {
    let kinds = if args.suite == "all" {
        CheckKind::ALL.to_vec()
    } else {
        vec![CheckKind::from_name(&args.suite).map_err(|e| Failure::Usage(e.to_string()))?]
    };
    let overrides = Overrides {
        trials: args.trials,
        seed: args.seed,
        tol_abs: args.tol_abs,
        tol_rel: args.tol_rel,
        dims: args.dims.clone(),
    };
    let mut reports: Vec<CheckReport> = Vec::new();
    for kind in kinds {
        let report = run_check(kind, &overrides.apply(kind.default_config())).map_err(|e| classify(kind.name(), e))?;
        let found = if kind == CheckKind::GtRouteGap {
            "witnesses"
        } else {
            "violations"
        };
        println!(
            "{:<18} {:<12} trials={:<5} {found}={:<4} worst_gap={:.3e}",
            report.check_name,
            format!("{:?}", report.outcome).to_lowercase(),
            report.trials_run,
            report.violations.len(),
            report.worst_gap
        );
        reports.push(report);
    }
    let summary = Summary::from_reports(&reports);
    println!(
        "passed={} failed={} inconclusive={}",
        summary.passed, summary.failed, summary.inconclusive
    );
    if let Some(dir) = &args.out_dir {
        fs::create_dir_all(dir).map_err(|e| Failure::Usage(format!("{}: {e}", dir.display())))?;
        for r in &reports {
            write_text(&dir.join(format!("{}.json", r.check_name)), &to_json(r))?;
        }
        write_text(&dir.join("summary.json"), &to_json(&summary))?;
    }
    let errored = reports
        .iter()
        .flat_map(|r| &r.violations)
        .any(|v| v.condition == "error");
    Ok(if reports.iter().any(|r| r.outcome == Outcome::Failed) || errored {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_optimize(args: &OptimizeArgs) -> Result<ExitCode, Failure> {
    let inst = read_instance(&args.instance)?;
    let ctx = args.instance.display().to_string();
    let mut cfg = SolverConfig::default();
    if let Some(v) = args.max_iters {
        cfg.max_iters = v;
    }
    if let Some(v) = args.grad_tol {
        cfg.grad_tol = v;
    }
    if let Some(v) = args.initial_step {
        cfg.initial_step = v;
    }
    if let Some(v) = args.backtrack_factor {
        cfg.backtrack_factor = v;
    }
    if let Some(v) = args.armijo_c {
        cfg.armijo_c = v;
    }
    let report = match args.objective {
        ObjectiveName::Gibbs => {
            let b = inst.matrix_b::<f64>().map_err(|e| classify(&ctx, e))?;
            maximize(Objective::Gibbs { b: &b }, &cfg).map(|r| r.report("gibbs"))
        }
        ObjectiveName::Phi => {
            let run = || {
                let (a, l) = (inst.matrix_a::<f64>()?, inst.matrix_l()?);
                let h = inst.matrix_h_or_identity(l.dim())?;
                maximize(Objective::Phi { a: &a, l: &l, h: &h }, &cfg).map(|r| r.report("phi"))
            };
            run()
        }
    }
    .map_err(|e| classify(&ctx, e))?;
    let text = to_json(&report);
    print!("{text}");
    if let Some(out) = &args.out {
        write_text(out, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_gen(args: &GenArgs) -> Result<ExitCode, Failure> {
    let seed = RngSeed(args.seed);
    let eig = [args.eig_min, args.eig_max];
    let build = || -> entropylab::Result<String> {
        Ok(match args.kind {
            GenKind::Pd => to_json(&MatrixJson::from(&random_pd::<f64>(args.dim, eig, seed)?)),
            GenKind::Hermitian => to_json(&MatrixJson::from(&random_hermitian::<f64>(args.dim, args.scale, seed)?)),
            GenKind::ContractionTuple => {
                let h = random_contraction_tuple::<f64>(args.k, args.m, args.n, args.sum_identity, seed)?;
                let file = InstanceFile {
                    h: Some(MatrixList::Many(h.blocks().iter().map(MatrixJson::from).collect())),
                    sum_is_identity: Some(h.sum_is_identity()),
                    ..Default::default()
                };
                to_json(&file)
            }
            GenKind::MultiInstance => {
                let h = random_contraction_tuple::<f64>(args.k, args.m, args.n, args.sum_identity, seed.derive(0))?;
                let l = random_hermitian::<f64>(args.n, args.scale, seed.derive(1))?;
                let a = (0..args.k)
                    .map(|i| random_pd::<f64>(args.m, eig, seed.derive(2 + i as u64)))
                    .collect::<entropylab::Result<Vec<_>>>()?;
                to_json(&InstanceFile::from_multi(&MultiInstance64::positive(l, h, a)?))
            }
        })
    };
    let text = build().map_err(|e| classify("gen", e))?;
    match &args.out {
        Some(out) => write_text(out, &text)?,
        None => print!("{text}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Eval {
            functional,
            instance,
            out,
        } => cmd_eval(*functional, instance, out.as_deref()),
        Command::Check(args) => cmd_check(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Gen(args) => cmd_gen(args),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_fifteen_digits() {
        assert_eq!(format_value(std::f64::consts::SQRT_2), "1.4142135623731");
        assert_eq!(format_value(6.000000000000003), "6");
        assert_eq!(format_value(123456.7890123456), "123456.789012346");
        assert_eq!(format_value(6.0), "6");
        assert_eq!(format_value(0.0), "0");
        assert_eq!(format_value(-0.25), "-0.25");
        assert_eq!(format_value(1.5e-9), "1.5e-9");
        assert_eq!(format_value(2.0e20), "2e20");
        assert_eq!(format_value(1e15), "1e15");
        assert_eq!(format_value(99999.99999999999999), "100000");
    }

    #[test]
    fn parses_seeds() {
        assert_eq!(parse_seed("0xC0FFEE").unwrap(), 0xC0FFEE);
        assert_eq!(parse_seed("7").unwrap(), 7);
        assert!(parse_seed("x").is_err());
    }
}
