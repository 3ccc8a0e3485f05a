//! Comparison methods: LP-style box relaxation with rounding, iterative hard
//! thresholding, and ADMM on the ℓ2-box splitting `x ∈ box ∩ Ω`,
//! `‖z‖₂² = n`, `x = z`.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, relative_change};
use crate::problems::ProblemInstance;
use crate::reformulations::{domain_transform, round_feasible, Domain};
use crate::report::{ReportBuilder, SolveReport, TraceRecord};
use crate::subsolver::{minimize, PenalizedQuadratic, SubsolverOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineMethod {
    LpRound,
    Iht,
    L2BoxAdmm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaselineConfig {
    pub method: BaselineMethod,
    /// Subproblem and stopping tolerance.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial splitting penalty (ℓ2-box ADMM only).
    pub penalty0: f64,
    pub sigma: f64,
    pub inner_t: usize,
}

impl BaselineConfig {
    pub fn new(method: BaselineMethod) -> Self {
        Self {
            method,
            tol: 1e-9,
            max_iter: 500,
            penalty0: 0.1,
            sigma: 10f64.sqrt(),
            inner_t: 10,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || self.inner_t == 0 {
            return Err(Error::InvalidArgument("tolerances and counts must be positive".into()));
        }
        if !(self.penalty0 > 0.0) || !(self.sigma > 1.0) {
            return Err(Error::InvalidArgument("penalty0 must be positive and sigma above 1".into()));
        }
        Ok(())
    }
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self::new(BaselineMethod::LpRound)
    }
}

/// Dispatches on `config.method`. IHT starts from the origin of the box.
pub fn solve_baseline(problem: &ProblemInstance, config: &BaselineConfig) -> Result<SolveReport> {
    match config.method {
        BaselineMethod::LpRound => solve_lp_round(problem, config.tol),
        BaselineMethod::Iht => {
            let mid = match problem.domain() {
                Domain::Pm1 => 0.0,
                Domain::ZeroOne => 0.5,
            };
            solve_iht(problem, config, &vec![mid; problem.dim()])
        }
        BaselineMethod::L2BoxAdmm => solve_l2box_admm(problem, config),
    }
}

/// Minimizes `f` over the box hull of the feasible set, then rounds and
/// repairs onto the binary feasible points.
pub fn solve_lp_round(problem: &ProblemInstance, tol: f64) -> Result<SolveReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let mut report = ReportBuilder::new(problem, "lp");
    let (obj, set) = problem.pm1_form()?;
    let n = obj.dim();
    let opts = SubsolverOptions { tol, max_iter: 50_000 };
    let r = minimize(&PenalizedQuadratic::new(&obj), &set, &vec![0.0; n], opts)?;
    report.outer_iterations = 1;
    report.converged = r.converged;
    report.relaxed_objective = Some(r.objective);
    report.gap = n as f64 - (n as f64).sqrt() * norm2(&r.x);
    report.trace.push(TraceRecord::new(r.iterations, r.objective, report.gap, 0.0, &r.x));
    report.x_pm1 = r.x;
    report.finish(&set)
}

/// Projected gradient with projection straight onto the binary feasible
/// points: top-entries indicator under a sum constraint, per-block argmax
/// under block constraints, sign otherwise. The step is `1/L` with `L` the
/// objective's gradient Lipschitz constant. Stops when an iterate repeats.
///
/// `x0` is given in the problem's own domain.
pub fn solve_iht(problem: &ProblemInstance, config: &BaselineConfig, x0: &[f64]) -> Result<SolveReport> {
    config.validate()?;
    check_len(problem.dim(), x0.len())?;
    let mut report = ReportBuilder::new(problem, "iht");
    let (obj, set) = problem.pm1_form()?;
    let n = obj.dim();
    let step = 1.0 / obj.lipschitz();

    let start = domain_transform(x0, problem.domain(), Domain::Pm1);
    let mut x = round_feasible(&start, &set)?;
    let mut seen = vec![x.clone()];
    let mut grad = vec![0.0; n];
    for it in 1..=config.max_iter {
        report.outer_iterations = it;
        obj.gradient_into(&x, &mut grad);
        let trial: Vec<f64> = x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
        let next = round_feasible(&trial, &set)?;
        report.trace.push(TraceRecord::new(it, obj.value(&next), 0.0, step, &next));
        let repeated = seen.contains(&next);
        x = next;
        if repeated {
            report.converged = true;
            break;
        }
        seen.push(x.clone());
    }
    report.relaxed_objective = Some(obj.value(&x));
    report.gap = 0.0;
    report.x_pm1 = x.clone();
    report.finish_with(x)
}

/// Radial projection onto the sphere of radius `√n`; the origin goes to
/// `√n·e₁`.
pub fn project_sphere(a: &[f64]) -> Vec<f64> {
    let n = a.len();
    let r = (n as f64).sqrt();
    let norm = norm2(a);
    if norm == 0.0 {
        let mut z = vec![0.0; n];
        if n > 0 {
            z[0] = r;
        }
        return z;
    }
    a.iter().map(|v| v * r / norm).collect()
}

/// Scaled-dual ADMM: `x` over the box and `Ω` on `f + (μ/2)‖x − z + u‖²`,
/// `z` onto the sphere, `u ← u + x − z`. `μ` grows by `σ` every `T`
/// iterations. The answer is the feasible rounding of the last `x`.
pub fn solve_l2box_admm(problem: &ProblemInstance, config: &BaselineConfig) -> Result<SolveReport> {
    config.validate()?;
    let mut report = ReportBuilder::new(problem, "l2box");
    report.notes.push("standard two-block splitting; step and stopping rule chosen here".into());
    let (obj, set) = problem.pm1_form()?;
    let n = obj.dim();
    let nf = n as f64;

    let mut x = vec![0.0; n];
    let mut z = project_sphere(&x);
    let mut u = vec![0.0; n];
    let mut mu = config.penalty0;
    let mut gap = nf;
    let sub = SubsolverOptions { tol: 1e-7, max_iter: 2000 };

    for it in 1..=config.max_iter {
        report.outer_iterations = it;
        let center: Vec<f64> = z.iter().zip(&u).map(|(zi, ui)| zi - ui).collect();
        let penalized = PenalizedQuadratic::new(&obj).with_prox(center, mu);
        let next = minimize(&penalized, &set, &x, sub)?.x;
        let change = relative_change(&next, &x);
        x = next;
        let shifted: Vec<f64> = x.iter().zip(&u).map(|(a, b)| a + b).collect();
        z = project_sphere(&shifted);
        u.iter_mut().zip(x.iter().zip(&z)).for_each(|(ui, (xi, zi))| *ui += xi - zi);
        gap = (nf - dot(&x, &z)).max(0.0);
        report.trace.push(TraceRecord::new(it, obj.value(&x), gap, mu, &x));
        let primal = x.iter().zip(&z).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if primal <= 1e-6 && change <= config.tol.max(1e-8) {
            report.converged = true;
            break;
        }
        if it % config.inner_t == 0 {
            mu = (mu * config.sigma).min(1e8);
        }
    }

    report.relaxed_objective = Some(obj.value(&x));
    report.gap = gap;
    report.x_pm1 = x;
    report.finish(&set)
}
