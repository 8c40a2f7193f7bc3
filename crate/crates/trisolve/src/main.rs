//! Command line harness: single solves and convergence studies for the
//! built-in triharmonic benchmark problems.

use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use trisolve::{
    problems, run_convergence_study, study, ProblemSpec, Solution, SolverConfig, StopRule,
    Termination,
};

const EXIT_DIVERGED: u8 = 2;
const EXIT_BAD_ARGS: u8 = 3;

#[derive(Parser)]
#[command(
    name = "trisolve",
    about = "Fourth-order solver for the nonlinear triharmonic Dirichlet problem on the unit square",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one built-in problem on an N x N grid and print K and the
    /// final error metric.
    Solve(SolveArgs),
    /// Solve on a doubling list of grids and write the convergence table
    /// as CSV.
    Study(StudyArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Built-in problem id (1-4).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    example: u8,

    /// Boundary relaxation parameter.
    #[arg(long, default_value_t = 150.0)]
    tau: f64,

    /// Stopping criterion; defaults to exact-error when the problem has an
    /// exact solution and successive-difference otherwise.
    #[arg(long, value_enum)]
    stop: Option<StopArg>,

    /// Threshold for the successive-difference criterion.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,

    #[arg(long, default_value_t = 10_000)]
    max_iter: usize,

    /// Significant digits for printed and emitted floating-point values.
    #[arg(long, default_value_t = 6)]
    precision: usize,

    /// Write the final solution as `x1,x2,U` triples (for studies: the
    /// finest grid).
    #[arg(long)]
    dump_solution: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Grid intervals per side.
    #[arg(long)]
    n: usize,
}

#[derive(Args)]
struct StudyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Comma-separated doubling grid sizes, e.g. 8,16,32,64.
    #[arg(long)]
    n_list: String,

    /// Output CSV path.
    #[arg(long)]
    out: std::path::PathBuf,

    /// Solve the grids on separate threads.
    #[arg(long)]
    parallel: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StopArg {
    Exact,
    Successive,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_BAD_ARGS,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::Study(args) => run_study(args),
    };
    match result {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_BAD_ARGS)
        }
    }
}

fn setup(common: &CommonArgs) -> Result<(ProblemSpec, SolverConfig), String> {
    let problem = problems::example(common.example).ok_or("unknown example id")?;
    let stop = match common.stop {
        Some(StopArg::Exact) => StopRule::ExactError,
        Some(StopArg::Successive) => StopRule::SuccessiveDiff,
        None if problem.has_exact_solution() => StopRule::ExactError,
        None => StopRule::SuccessiveDiff,
    };
    if stop == StopRule::ExactError && !problem.has_exact_solution() {
        return Err(format!(
            "example {} has no exact solution; use --stop successive",
            common.example
        ));
    }
    let config = SolverConfig {
        tau: common.tau,
        stop,
        tol: common.tol,
        max_iter: common.max_iter,
        ..SolverConfig::default()
    };
    config.validate().map_err(|e| e.to_string())?;
    Ok((problem, config))
}

fn dump_solution(path: &std::path::Path, solution: &Solution, precision: usize) -> Result<(), String> {
    let file = File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    study::write_solution_csv(&solution.u, precision, BufWriter::new(file)).map_err(|e| e.to_string())
}

fn run_solve(args: SolveArgs) -> Result<ExitCode, String> {
    let (problem, config) = setup(&args.common)?;
    let grid = trisolve::Grid::unit_square(args.n).map_err(|e| e.to_string())?;
    let solution = trisolve::solve(&problem, &grid, &config).map_err(|e| e.to_string())?;

    let report = &solution.report;
    println!(
        "N={} K={} error={} termination={:?}",
        args.n,
        report.iterations,
        study::format_float(report.final_error, args.common.precision),
        report.termination
    );
    if let Some(path) = &args.common.dump_solution {
        dump_solution(path, &solution, args.common.precision)?;
    }
    Ok(match report.termination {
        Termination::Diverged => ExitCode::from(EXIT_DIVERGED),
        _ => ExitCode::SUCCESS,
    })
}

fn run_study(args: StudyArgs) -> Result<ExitCode, String> {
    let (problem, config) = setup(&args.common)?;
    let sizes = study::parse_grid_list(&args.n_list).map_err(|e| e.to_string())?;
    study::validate_grid_list(&sizes).map_err(|e| e.to_string())?;

    let outcome =
        run_convergence_study(&problem, &sizes, &config, args.parallel).map_err(|e| e.to_string())?;

    let file = File::create(&args.out).map_err(|e| format!("cannot write {}: {e}", args.out.display()))?;
    study::write_study_csv(&outcome.rows, args.common.precision, BufWriter::new(file))
        .map_err(|e| e.to_string())?;

    println!("N,K,error,order");
    for row in &outcome.rows {
        println!(
            "{},{},{},{}",
            row.n,
            row.k,
            study::format_float(row.error, args.common.precision),
            row.order
                .map_or_else(String::new, |o| study::format_float(o, args.common.precision))
        );
    }

    if let Some(n) = outcome.diverged_at {
        eprintln!("solve diverged at N={n}; wrote partial table to {}", args.out.display());
        return Ok(ExitCode::from(EXIT_DIVERGED));
    }

    if let (Some(path), Some(u)) = (&args.common.dump_solution, &outcome.finest_u) {
        let file = File::create(path).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
        study::write_solution_csv(u, args.common.precision, BufWriter::new(file))
            .map_err(|e| e.to_string())?;
    }
    Ok(ExitCode::SUCCESS)
}
