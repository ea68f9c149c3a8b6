use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use mintime::bench::{run_suite, staircase_instance, StaircaseSpec, Sweep, DEFAULT_SEED};
use mintime::format;
use mintime::solver::{self, SolverConfig, SolverOptions, Termination, Trajectory};
use mintime::Error;

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_ANYTIME: u8 = 3;

#[derive(Parser)]
#[command(
    name = "mintime",
    version,
    about = "Minimum-time trajectories through sequences of convex sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem file for the conditions the solver relies on.
    Validate {
        problem: PathBuf,
        /// Also check the set-intersection pattern guaranteeing a feasible initialization.
        #[arg(long)]
        assumption1: bool,
    },
    /// Solve a problem file and write the trajectory.
    Solve(SolveArgs),
    /// Sample a trajectory file at uniform times.
    Sample(SampleArgs),
    /// Run a parameter sweep over staircase instances.
    Bench(BenchArgs),
    /// Write a staircase problem file.
    Staircase {
        #[arg(long)]
        sets: usize,
        #[arg(long)]
        facets: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SolveArgs {
    problem: PathBuf,
    /// Bézier degree of every segment.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(3..))]
    degree: u64,
    /// Relative-decrease termination tolerance.
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    /// Lower bound on every segment duration.
    #[arg(long, default_value_t = 0.0)]
    min_time: f64,
    /// Force zero acceleration at every transition point.
    #[arg(long)]
    zero_accel: bool,
    #[arg(long, default_value_t = 100)]
    max_subproblems: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SampleArgs {
    trajectory: PathBuf,
    /// Time step; the final time is always included.
    #[arg(long, required_unless_present = "count", conflicts_with = "count")]
    dt: Option<f64>,
    /// Number of equally spaced samples, endpoints included.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    count: Option<u64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    sweep: Sweep,
    /// Comma-separated, strictly increasing sweep values.
    #[arg(long, value_delimiter = ',', required = true)]
    values: Vec<usize>,
    /// Base parameters: sets, facets, dim, degree or tol.
    #[arg(long, value_name = "KEY=VAL")]
    fixed: Vec<String>,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

/// Error carrying the process exit code.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_USAGE,
            error: error.into(),
        }
    }

    fn failed(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_FAILURE,
            error: error.into(),
        }
    }
}

/// Input-side errors are usage errors; everything else is a run failure.
fn classify(error: Error) -> Failure {
    match error {
        Error::Parse(_)
        | Error::UnsupportedVersion { .. }
        | Error::Io(_)
        | Error::DimensionMismatch { .. }
        | Error::InvalidSet(_)
        | Error::InvalidArgument(_) => Failure::usage(error),
        _ => Failure::failed(error),
    }
}

fn load_problem(path: &Path) -> Result<solver::ProblemInstance, Failure> {
    format::load_problem(path)
        .map_err(classify)
        .map_err(|f| Failure {
            error: f.error.context(format!("reading {}", path.display())),
            ..f
        })
}

fn cmd_validate(problem: &Path, assumption1: bool) -> Result<u8, Failure> {
    let problem = load_problem(problem)?;
    let config = SolverConfig {
        options: SolverOptions {
            assumption1_check: assumption1,
            ..Default::default()
        },
        ..Default::default()
    };
    let report = solver::validate(&problem, &config);
    print!("{report}");
    Ok(if report.is_ok() { 0 } else { EXIT_FAILURE })
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Failure> {
    let problem = load_problem(&args.problem)?;
    let config = SolverConfig {
        degree: args.degree as usize,
        tolerance: args.tol,
        max_subproblems: args.max_subproblems,
        options: SolverOptions {
            zero_transition_acceleration: args.zero_accel,
            min_traversal_time: args.min_time,
            ..Default::default()
        },
        ..Default::default()
    };
    config.validate().map_err(classify)?;
    let validation = solver::validate(&problem, &config);
    if !validation.is_ok() {
        eprint!("{validation}");
        return Err(Failure::failed(anyhow::anyhow!(
            "problem failed validation"
        )));
    }

    let report = solver::solve(&problem, &config).map_err(Failure::failed)?;
    format::save_trajectory(&args.out, &report.trajectory)
        .with_context(|| format!("writing {}", args.out.display()))
        .map_err(Failure::failed)?;
    if let Some(path) = &args.report {
        format::save_report(path, &report)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::failed)?;
    }

    println!(
        "T = {:.6} (initialization {:.6}), {} subproblems, {:?}",
        report.objective(),
        report.initialization_objective,
        report.num_subproblems(),
        report.termination
    );
    Ok(match report.termination {
        Termination::ToleranceMet | Termination::MaxSubproblems => 0,
        Termination::BackendFailureAnytime => EXIT_ANYTIME,
    })
}

fn sample_times(total: f64, dt: Option<f64>, count: Option<u64>) -> Result<Vec<f64>, Failure> {
    if let Some(n) = count {
        let n = n as usize;
        return Ok((0..n)
            .map(|i| {
                if i + 1 == n {
                    total
                } else {
                    total * i as f64 / (n - 1) as f64
                }
            })
            .collect());
    }
    let dt = dt.unwrap_or(total);
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Failure::usage(anyhow::anyhow!(
            "--dt must be positive, got {dt}"
        )));
    }
    let steps = (total / dt).floor() as usize;
    let mut times: Vec<f64> = (0..=steps)
        .map(|i| i as f64 * dt)
        .filter(|&t| t < total)
        .collect();
    times.push(total);
    Ok(times)
}

fn write_samples(out: impl Write, trajectory: &Trajectory, times: &[f64]) -> anyhow::Result<()> {
    let n = trajectory.dim();
    let mut writer = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for prefix in ["q", "v", "a"] {
        header.extend((0..n).map(|j| format!("{prefix}{j}")));
    }
    writer.write_record(&header)?;
    for &t in times {
        let mut row = vec![t];
        row.extend(trajectory.position(t)?);
        row.extend(trajectory.velocity(t)?);
        row.extend(trajectory.acceleration(t)?);
        writer.write_record(row.iter().map(|x| format!("{x:.17e}")))?;
    }
    writer.flush()?;
    Ok(())
}

fn cmd_sample(args: &SampleArgs) -> Result<u8, Failure> {
    let trajectory = format::load_trajectory(&args.trajectory)
        .map_err(classify)
        .map_err(|f| Failure {
            error: f
                .error
                .context(format!("reading {}", args.trajectory.display())),
            ..f
        })?;
    let times = sample_times(trajectory.total_duration(), args.dt, args.count)?;
    let result = match &args.csv {
        Some(path) => File::create(path)
            .map_err(anyhow::Error::from)
            .and_then(|f| write_samples(f, &trajectory, &times)),
        None => write_samples(io::stdout().lock(), &trajectory, &times),
    };
    result.map_err(Failure::failed)?;
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Failure> {
    let mut spec = StaircaseSpec::new(5, 4, 2).with_seed(args.seed);
    let mut config = SolverConfig::default();
    for item in &args.fixed {
        let (key, value) = item.split_once('=').ok_or_else(|| {
            Failure::usage(anyhow::anyhow!("--fixed expects KEY=VAL, got {item:?}"))
        })?;
        let bad = || Failure::usage(anyhow::anyhow!("invalid value for {key}: {value:?}"));
        match key {
            "tol" => config.tolerance = value.parse().map_err(|_| bad())?,
            _ => {
                let sweep: Sweep = key.parse().map_err(Failure::usage)?;
                let v: usize = value.parse().map_err(|_| bad())?;
                let (s, c) = mintime::bench::sweep_point(sweep, v, &spec, &config);
                spec = s;
                config = c;
            }
        }
    }
    let suite = run_suite(args.sweep, &args.values, &spec, &config, args.jobs).map_err(classify)?;
    print!("{suite}");
    if let Some(path) = &args.csv {
        suite
            .save_csv(path)
            .with_context(|| format!("writing {}", path.display()))
            .map_err(Failure::failed)?;
    }
    Ok(if suite.summary.failures == 0 {
        0
    } else {
        EXIT_FAILURE
    })
}

fn cmd_staircase(spec: StaircaseSpec, out: &Path) -> Result<u8, Failure> {
    let problem = staircase_instance(&spec).map_err(classify)?;
    format::save_problem(out, &problem)
        .with_context(|| format!("writing {}", out.display()))
        .map_err(Failure::failed)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate {
            problem,
            assumption1,
        } => cmd_validate(&problem, assumption1),
        Command::Solve(args) => cmd_solve(&args),
        Command::Sample(args) => cmd_sample(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Staircase {
            sets,
            facets,
            dim,
            seed,
            out,
        } => cmd_staircase(StaircaseSpec::new(sets, facets, dim).with_seed(seed), &out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
