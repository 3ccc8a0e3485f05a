//! The desk benchmark: every method on a fixed matrix of small problems,
//! with the enumeration optimum alongside whenever it is affordable.

use rayon::prelude::*;
use serde::Serialize;

use crate::adm::{solve_adm, AdmConfig};
use crate::baselines::{solve_baseline, BaselineConfig, BaselineMethod};
use crate::epm::{solve_epm, EpmConfig};
use crate::error::{Error, Result};
use crate::oracle::{brute_force, DEFAULT_LIMIT};
use crate::problems::{
    build_bisection, build_constrained_segmentation, build_dense_subgraph, build_modularity, build_mrf,
    four_gauss_default, generate, Graph, GraphKind, ProblemInstance,
};
use crate::report::SolveReport;

pub const METHODS: [&str; 5] = ["epm", "adm", "lp", "iht", "l2box"];

pub fn run_method(method: &str, problem: &ProblemInstance, seed: u64) -> Result<SolveReport> {
    match method {
        "epm" => solve_epm(problem, &EpmConfig::default(), seed),
        "adm" => solve_adm(problem, &AdmConfig::default(), seed),
        "lp" => solve_baseline(problem, &BaselineConfig::new(BaselineMethod::LpRound)),
        "iht" => solve_baseline(problem, &BaselineConfig::new(BaselineMethod::Iht)),
        "l2box" => solve_baseline(problem, &BaselineConfig::new(BaselineMethod::L2BoxAdmm)),
        other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub problem: String,
    pub method: String,
    pub n: usize,
    pub objective: f64,
    pub oracle_objective: Option<f64>,
    pub score: f64,
    pub feasible: bool,
    pub converged: bool,
    pub outer_iterations: usize,
    pub wall_time_ms: f64,
}

fn desk_problems() -> Result<Vec<(String, ProblemInstance)>> {
    let c4 = generate(&GraphKind::Cycle { n: 4 }, 0)?;
    let k2 = generate(&GraphKind::Complete { n: 2 }, 0)?;
    let k3 = generate(&GraphKind::Complete { n: 3 }, 0)?;
    let two_edges = Graph::new(4, [(0, 1, 1.0), (2, 3, 1.0)])?;
    let star = Graph::new(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])?;
    let mut out = vec![
        ("bisection/c4".to_string(), build_bisection(&c4)?),
        ("bisection/k2".to_string(), build_bisection(&k2)?),
        ("bisection/two_edges".to_string(), build_bisection(&two_edges)?),
        ("densesub/k3_k2".to_string(), build_dense_subgraph(&k3, 2)?),
        ("densesub/star_k2".to_string(), build_dense_subgraph(&star, 2)?),
        ("mrf/edge".to_string(), build_mrf(&k2, &[-1.0, 0.2])?),
        ("modularity/two_edges_k2".to_string(), build_modularity(&two_edges, 2)?),
        (
            "seg/path8".to_string(),
            build_constrained_segmentation(&generate(&GraphKind::Path { n: 8 }, 0)?, &[0], &[7])?,
        ),
    ];
    for seed in 0..3 {
        let g = generate(&GraphKind::ErdosRenyi { n: 14, p: 0.4 }, seed)?;
        out.push((format!("densesub/er14_seed{seed}"), build_dense_subgraph(&g, 5)?));
    }
    let g = generate(&four_gauss_default(), 0)?;
    out.push((
        "bisection/4gauss200".to_string(),
        build_bisection(&g)?.with_provenance("synthetic re-creation"),
    ));
    Ok(out)
}

/// Runs every (problem, method) cell on a pool of `threads` workers
/// (`None` uses all cores). Rows come back sorted by problem then method
/// position, independent of scheduling.
pub fn run_desk(threads: Option<usize>, seed: u64) -> Result<Vec<BenchRow>> {
    let problems = desk_problems()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| Error::InvalidArgument(e.to_string()))?;

    let oracle: Vec<Option<f64>> = pool.install(|| {
        problems
            .par_iter()
            .map(|(_, p)| brute_force(p, DEFAULT_LIMIT).ok().map(|r| r.f))
            .collect()
    });
    let cells: Vec<(usize, usize)> = (0..problems.len())
        .flat_map(|p| (0..METHODS.len()).map(move |m| (p, m)))
        .collect();
    let rows: Result<Vec<BenchRow>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(pi, mi)| {
                let (name, problem) = &problems[pi];
                let r = run_method(METHODS[mi], problem, seed)?;
                Ok(BenchRow {
                    problem: name.clone(),
                    method: METHODS[mi].into(),
                    n: problem.dim(),
                    objective: r.objective_binary,
                    oracle_objective: oracle[pi],
                    score: r.score,
                    feasible: r.feasible,
                    converged: r.converged,
                    outer_iterations: r.outer_iterations,
                    wall_time_ms: r.wall_time_ms,
                })
            })
            .collect()
    });
    rows
}

/// `BINMPEC_THREADS`, if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("BINMPEC_THREADS").ok()?.trim().parse().ok().filter(|&t| t > 0)
}

pub fn summary_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}
