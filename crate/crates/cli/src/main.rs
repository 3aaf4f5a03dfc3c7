use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gista::datagen::{gen_model, sample_data, ModelSpec};
use gista::diagnostics::{export_trace, TraceFormat};
use gista::io::{matrix_to_csv, read_matrix, write_atomic, write_matrix_csv};
use gista::solver::closed_form_rate;
use gista::study::{run_study, StudyConfig, SUMMARY_HEADER};
use gista::{solve, DenseSym, ProblemInstance, SolverConfig, StepRule, Termination};

#[derive(Parser)]
#[command(
    name = "gista",
    version,
    about = "Sparse inverse covariance estimation by proximal gradient descent"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem read from a covariance matrix file.
    Solve(SolveArgs),
    /// Generate a sparse precision matrix and a sample covariance.
    Gen(GenArgs),
    /// Convergence study over several penalties.
    Study(StudyArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Sample covariance, dense CSV or TSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long, default_value_t = 1e-5)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// `bb` or `constant:Z`
    #[arg(long, default_value = "bb", value_parser = parse_step)]
    step: StepRule,
    /// `diag` or a matrix file.
    #[arg(long, default_value = "diag")]
    init: String,
    /// Where to write the solution; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Trace file; `.jsonl`/`.json` gives JSON lines, anything else CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Print the eigenvalue bounds and closed-form rate.
    #[arg(long)]
    bounds: bool,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    p: usize,
    #[arg(long)]
    zero_prob: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_prefix: PathBuf,
}

#[derive(Args)]
struct StudyArgs {
    /// Sample covariance file; otherwise one is generated from the
    /// `--p/--zero-prob/--n/--seed` flags.
    #[arg(long, conflicts_with_all = ["p", "zero_prob", "n"])]
    input: Option<PathBuf>,
    #[arg(long, requires_all = ["zero_prob", "n"])]
    p: Option<usize>,
    #[arg(long)]
    zero_prob: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated penalties.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    rhos: Vec<f64>,
    #[arg(long, default_value_t = 1e-10)]
    ref_tol: f64,
    /// Gap at which the tracked re-solve stops.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    #[arg(long)]
    out: PathBuf,
}

fn parse_step(s: &str) -> Result<StepRule, String> {
    if s == "bb" {
        return Ok(StepRule::BarzilaiBorwein);
    }
    let z = s
        .strip_prefix("constant:")
        .ok_or_else(|| format!("expected `bb` or `constant:Z`, got `{s}`"))?;
    match z.parse::<f64>() {
        Ok(z) if z > 0.0 && z.is_finite() => Ok(StepRule::Constant(z)),
        _ => Err(format!("constant step must be a positive number, got `{z}`")),
    }
}

fn trace_format(path: &Path) -> TraceFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl" | "json") => TraceFormat::JsonLines,
        _ => TraceFormat::Csv,
    }
}

/// Command failure carrying the flag or file it concerns.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn context<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, Failure> {
    r.map_err(|e| Failure(format!("{what}: {e}")))
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode, Failure> {
    let s = context(read_matrix(&args.input), "--input")?;
    let problem = context(ProblemInstance::new(s, args.rho), "--rho")?;
    let cfg = SolverConfig::default()
        .with_tol(args.tol)
        .with_max_iters(args.max_iters)
        .with_step_rule(args.step);
    context(cfg.validate(), "--tol/--max-iters")?;
    let init = match args.init.as_str() {
        "diag" => None,
        path => Some(context(read_matrix(Path::new(path)), "--init")?),
    };
    if let Some(m) = &init {
        if m.dim() != problem.dim() {
            return Err(Failure(format!(
                "--init: dimension {} does not match input dimension {}",
                m.dim(),
                problem.dim()
            )));
        }
    }

    if args.bounds {
        let r = context(closed_form_rate(&problem), "--bounds")?;
        println!("alpha={}", r.bounds.alpha);
        println!("beta={}", r.bounds.beta);
        println!("gamma={}", r.bounds.gamma);
        println!("rate={}", r.rate);
        println!("kappa_upper={}", r.bounds.kappa_upper);
    }

    let res = context(solve(&problem, &cfg, init.as_ref()), "solve")?;
    if let Some(path) = &args.trace {
        context(export_trace(&res.trace, trace_format(path), path), "--trace")?;
    }
    match &args.output {
        Some(path) => context(write_matrix_csv(path, &res.theta_star), "--output")?,
        None => print!("{}", matrix_to_csv(&res.theta_star)),
    }
    eprintln!(
        "iterations={} gap={:e} objective={}",
        res.iterations, res.gap, res.objective
    );
    Ok(match res.termination {
        Termination::GapReached => ExitCode::SUCCESS,
        Termination::MaxIters => ExitCode::from(2),
    })
}

fn generate(spec: &ModelSpec, n: usize) -> Result<(gista::datagen::SyntheticModel, DenseSym), Failure> {
    let model = context(gen_model(spec), "--p/--zero-prob")?;
    let (_, s) = context(sample_data(&model, n, spec.seed.wrapping_add(1)), "--n")?;
    Ok((model, s))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, Failure> {
    let spec = ModelSpec {
        p: args.p,
        zero_prob: args.zero_prob,
        seed: args.seed,
    };
    let (model, s) = generate(&spec, args.n)?;
    let meta = serde_json::json!({
        "spec": spec,
        "n": args.n,
        "seed": args.seed,
        "nnz_frac": model.nnz_frac,
    });
    let mut meta = serde_json::to_string_pretty(&meta)?;
    meta.push('\n');
    context(
        write_matrix_csv(&with_suffix(&args.out_prefix, ".omega.csv"), &model.omega),
        "--out-prefix",
    )?;
    context(
        write_matrix_csv(&with_suffix(&args.out_prefix, ".S.csv"), &s),
        "--out-prefix",
    )?;
    context(
        write_atomic(&with_suffix(&args.out_prefix, ".meta.json"), meta.as_bytes()),
        "--out-prefix",
    )?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_study(args: StudyArgs) -> Result<ExitCode, Failure> {
    if args.rhos.is_empty() {
        return Err(Failure("--rhos: at least one value is required".into()));
    }
    if let Some(r) = args.rhos.iter().find(|r| r.is_nan() || **r <= 0.0 || r.is_infinite()) {
        return Err(Failure(format!("--rhos: penalties must be positive, got {r}")));
    }
    let s = match (&args.input, args.p, args.zero_prob, args.n) {
        (Some(path), ..) => context(read_matrix(path), "--input")?,
        (None, Some(p), Some(zero_prob), Some(n)) => {
            generate(
                &ModelSpec {
                    p,
                    zero_prob,
                    seed: args.seed,
                },
                n,
            )?
            .1
        }
        _ => return Err(Failure("--input or --p/--zero-prob/--n is required".into())),
    };
    let cfg = StudyConfig {
        rhos: args.rhos,
        ref_tol: args.ref_tol,
        solver: SolverConfig::default()
            .with_tol(args.tol)
            .with_max_iters(args.max_iters),
    };
    context(cfg.solver.validate(), "--tol/--max-iters")?;
    let runs = context(run_study(&s, &cfg), "study")?;

    context(std::fs::create_dir_all(&args.out), "--out")?;
    let mut summary = format!("{SUMMARY_HEADER}\n");
    for (k, run) in runs.iter().enumerate() {
        let path = args.out.join(format!("trace_{k}_rho_{}.csv", run.row.rho));
        context(export_trace(&run.trace, TraceFormat::Csv, &path), "--out")?;
        summary.push_str(&run.row.to_csv_line());
        summary.push('\n');
    }
    context(write_atomic(&args.out.join("summary.csv"), summary.as_bytes()), "--out")?;
    print!("{summary}");
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Study(a) => cmd_study(a),
    };
    result.unwrap_or_else(|Failure(msg)| {
        eprintln!("error: {msg}");
        ExitCode::FAILURE
    })
}
