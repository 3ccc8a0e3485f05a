//! Solve reports and per-iteration trace records.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::norm_inf;
use crate::problems::{ProblemInstance, ProblemMeta};
use crate::reformulations::{round_feasible, Domain};

/// One row of a convergence trace. `penalty` is the exact-penalty weight,
/// the Lagrange multiplier, or the splitting penalty, depending on the
/// method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iter: usize,
    pub objective: f64,
    pub gap: f64,
    pub penalty: f64,
    /// `‖x − sign(x)‖∞` of the unrounded iterate in `{−1, +1}` coordinates.
    pub vertex_distance: f64,
}

impl TraceRecord {
    pub(crate) fn new(iter: usize, objective: f64, gap: f64, penalty: f64, x_pm1: &[f64]) -> Self {
        Self {
            iter,
            objective,
            gap,
            penalty,
            vertex_distance: vertex_distance(x_pm1),
        }
    }
}

/// `‖x − sign(x)‖∞` with `sign(0) = +1`.
pub fn vertex_distance(x_pm1: &[f64]) -> f64 {
    x_pm1
        .iter()
        .map(|&v| if v >= 0.0 { (1.0 - v).abs() } else { (1.0 + v).abs() })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: String,
    pub problem: ProblemMeta,
    pub domain: Domain,
    pub x_binary: Vec<f64>,
    /// Final unrounded iterate, in the problem's own domain.
    pub x_relaxed: Vec<f64>,
    pub objective_binary: f64,
    pub objective_relaxed: Option<f64>,
    pub score_label: String,
    pub score: f64,
    pub feasible: bool,
    pub complementarity_gap_final: f64,
    pub outer_iterations: usize,
    pub penalty_increases: usize,
    pub lipschitz_bound: Option<f64>,
    pub converged: bool,
    pub wall_time_ms: f64,
    pub notes: Vec<String>,
    pub trace: Vec<TraceRecord>,
}

impl SolveReport {
    pub fn max_penalty(&self) -> f64 {
        self.trace.iter().map(|t| t.penalty).fold(0.0, f64::max)
    }
}

/// Collects the pieces every solver hands back and turns them into a report.
pub(crate) struct ReportBuilder<'a> {
    pub problem: &'a ProblemInstance,
    pub method: &'static str,
    pub started: Instant,
    pub x_pm1: Vec<f64>,
    pub relaxed_objective: Option<f64>,
    pub gap: f64,
    pub outer_iterations: usize,
    pub penalty_increases: usize,
    pub lipschitz_bound: Option<f64>,
    pub converged: bool,
    pub notes: Vec<String>,
    pub trace: Vec<TraceRecord>,
}

impl<'a> ReportBuilder<'a> {
    pub fn new(problem: &'a ProblemInstance, method: &'static str) -> Self {
        Self {
            problem,
            method,
            started: Instant::now(),
            x_pm1: Vec::new(),
            relaxed_objective: None,
            gap: 0.0,
            outer_iterations: 0,
            penalty_increases: 0,
            lipschitz_bound: None,
            converged: false,
            notes: Vec::new(),
            trace: Vec::new(),
        }
    }

    /// Rounds `x_pm1` onto the binary feasible set and evaluates it.
    pub fn finish(self, set_pm1: &crate::projections::FeasibleSet) -> Result<SolveReport> {
        let binary_pm1 = round_feasible(&self.x_pm1, set_pm1)?;
        self.finish_with(binary_pm1)
    }

    pub fn finish_with(self, binary_pm1: Vec<f64>) -> Result<SolveReport> {
        let p = self.problem;
        let x_binary = p.from_pm1(&binary_pm1);
        let x_relaxed = p.from_pm1(&self.x_pm1);
        let (lo, hi) = p.domain().values();
        let feasible = x_binary.iter().all(|&v| v == lo || v == hi) && p.set().contains(&x_binary, 1e-9);
        debug_assert!(norm_inf(&binary_pm1) <= 1.0);
        Ok(SolveReport {
            method: self.method.into(),
            problem: p.meta().clone(),
            domain: p.domain(),
            objective_binary: p.evaluate(&x_binary),
            objective_relaxed: self.relaxed_objective,
            score_label: p.score_spec().label.clone(),
            score: p.score(&x_binary),
            feasible,
            x_binary,
            x_relaxed,
            complementarity_gap_final: self.gap,
            outer_iterations: self.outer_iterations,
            penalty_increases: self.penalty_increases,
            lipschitz_bound: self.lipschitz_bound,
            converged: self.converged,
            wall_time_ms: self.started.elapsed().as_secs_f64() * 1e3,
            notes: self.notes,
            trace: self.trace,
        })
    }
}
