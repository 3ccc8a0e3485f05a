//! Command-line front end. [`run`] returns the process exit code:
//! 0 success, 1 usage, 2 infeasible or unreadable input, 3 size limit.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench;
use crate::error::{Error, Result};
use crate::io::{load_graph, write_report, write_trace, GraphFormat};
use crate::oracle::{brute_force, DEFAULT_LIMIT};
use crate::problems::{
    build_bisection, build_constrained_segmentation, build_dense_subgraph, build_modularity, build_mrf,
    ProblemInstance,
};

#[derive(Debug, Parser)]
#[command(name = "binmpec", version, about = "Binary quadratic optimization by complementarity reformulation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one problem with one method.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        #[command(flatten)]
        problem: ProblemArgs,
        /// Write the convergence trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the full report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Exhaustive enumeration for small instances.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = DEFAULT_LIMIT)]
        limit: usize,
    },
    /// Run a benchmark suite and write a summary table.
    Bench {
        #[arg(long, value_enum, default_value_t = Suite::Desk)]
        suite: Suite,
        #[arg(long, default_value = "bench_desk.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Epm,
    Adm,
    Lp,
    Iht,
    L2box,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Epm => "epm",
            Method::Adm => "adm",
            Method::Lp => "lp",
            Method::Iht => "iht",
            Method::L2box => "l2box",
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProblemKind {
    Bisection,
    Densesub,
    Modularity,
    Mrf,
    Seg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Edgelist,
    Matrixmarket,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Desk,
}

#[derive(Debug, Args)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: ProblemKind,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Edgelist)]
    format: Format,
    /// Subgraph size (densesub) or number of clusters (modularity, default 2).
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Unary costs for mrf, comma-separated, one per node.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    unary: Vec<f64>,
    /// Foreground seed nodes for seg, comma-separated.
    #[arg(long, value_delimiter = ',')]
    fg: Vec<usize>,
    /// Background seed nodes for seg, comma-separated.
    #[arg(long, value_delimiter = ',')]
    bg: Vec<usize>,
}

impl ProblemArgs {
    fn build(&self) -> Result<ProblemInstance> {
        let format = match self.format {
            Format::Edgelist => GraphFormat::EdgeList,
            Format::Matrixmarket => GraphFormat::MatrixMarket,
        };
        let g = load_graph(&self.graph, format)?;
        match self.problem {
            ProblemKind::Bisection => build_bisection(&g),
            ProblemKind::Densesub => {
                let k = self
                    .k
                    .ok_or_else(|| Error::InvalidArgument("densesub needs --k".into()))?;
                build_dense_subgraph(&g, k)
            }
            ProblemKind::Modularity => build_modularity(&g, self.k.unwrap_or(2)),
            ProblemKind::Mrf => {
                if self.unary.is_empty() {
                    return Err(Error::InvalidArgument("mrf needs --unary".into()));
                }
                build_mrf(&g, &self.unary)
            }
            ProblemKind::Seg => build_constrained_segmentation(&g, &self.fg, &self.bg),
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::SizeLimit { .. } => 3,
        Error::InvalidArgument(_) => 1,
        _ => 2,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve {
            method,
            problem,
            trace,
            report,
        } => {
            let p = problem.build()?;
            let r = bench::run_method(method.name(), &p, problem.seed)?;
            if let Some(path) = trace {
                write_trace(path, &r.trace)?;
            }
            if let Some(path) = report {
                write_report(path, &r)?;
            }
            println!(
                "method={} problem={} n={} objective={} {}={} feasible={} outer={} converged={}",
                r.method,
                r.problem.name,
                r.problem.n,
                r.objective_binary,
                r.score_label,
                r.score,
                r.feasible,
                r.outer_iterations,
                r.converged
            );
            Ok(if r.feasible { 0 } else { 2 })
        }
        Command::Oracle { problem, limit } => {
            let p = problem.build()?;
            let r = brute_force(&p, limit)?;
            println!(
                "problem={} n={} objective={} {}={} feasible_points={}",
                p.meta().name,
                p.dim(),
                r.f,
                p.score_spec().label,
                p.score(&r.x),
                r.count_feasible
            );
            let x: Vec<String> = r.x.iter().map(|v| v.to_string()).collect();
            println!("x={}", x.join(","));
            Ok(0)
        }
        Command::Bench {
            suite: Suite::Desk,
            out,
            seed,
        } => {
            let rows = bench::run_desk(bench::threads_from_env(), seed)?;
            let csv = bench::summary_csv(&rows)?;
            std::fs::write(&out, &csv)?;
            for r in &rows {
                let opt = r.oracle_objective.map_or("-".to_string(), |f| format!("{f:.6}"));
                println!(
                    "{:<26} {:<6} n={:<4} f={:<14.6} opt={:<14} feasible={}",
                    r.problem, r.method, r.n, r.objective, opt, r.feasible
                );
            }
            println!("wrote {}", out.display());
            Ok(0)
        }
    }
}
