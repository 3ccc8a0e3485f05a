//! Alternating direction method on the augmented Lagrangian
//!
//! ```text
//! L(x, v, ρ) = f(x) + ρ (n − ⟨x, v⟩) + (α/2)(n − ⟨x, v⟩)²
//! ```
//!
//! with a multiplier step `ρ ← ρ + α (n − ⟨x, v⟩)` after each pair of
//! primal and dual steps, and `α` grown by `σ` every `T` iterations.

use crate::epm::{initial_point, lipschitz_bound, StallNudge};
use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, relative_change};
use crate::problems::ProblemInstance;
use crate::report::{ReportBuilder, SolveReport, TraceRecord};
use crate::subsolver::{minimize, PenalizedQuadratic, SubsolverOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmConfig {
    pub alpha0: f64,
    pub sigma: f64,
    pub inner_t: usize,
    pub feas_tol: f64,
    pub max_outer: usize,
    /// Ceiling for the quadratic penalty weight.
    pub alpha_max: f64,
    pub lipschitz_override: Option<f64>,
    /// Relative `x` change below which a run with an open gap counts as stalled.
    pub change_tol: f64,
    pub subsolver: SubsolverOptions,
}

impl Default for AdmConfig {
    fn default() -> Self {
        Self {
            alpha0: 0.001,
            sigma: 10f64.sqrt(),
            inner_t: 10,
            feas_tol: 1e-8,
            max_outer: 100,
            alpha_max: 1e6,
            lipschitz_override: None,
            change_tol: 1e-5,
            subsolver: SubsolverOptions::default(),
        }
    }
}

impl AdmConfig {
    fn validate(&self) -> Result<()> {
        if !(self.alpha0 > 0.0) {
            return Err(Error::InvalidArgument("alpha0 must be positive".into()));
        }
        if !(self.sigma > 1.0) {
            return Err(Error::InvalidArgument("sigma must exceed 1".into()));
        }
        if self.inner_t == 0 {
            return Err(Error::InvalidArgument("inner_t must be at least 1".into()));
        }
        if !(self.alpha_max >= self.alpha0) {
            return Err(Error::InvalidArgument("alpha_max must be at least alpha0".into()));
        }
        if let Some(l) = self.lipschitz_override {
            if !(l > 0.0) {
                return Err(Error::InvalidArgument("lipschitz override must be positive".into()));
            }
        }
        Ok(())
    }
}

/// `min ½ xᵀ(γI + bbᵀ)x + ⟨c, x⟩` subject to `‖x‖₂ ≤ β`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneQp {
    pub gamma: f64,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub beta: f64,
}

impl RankOneQp {
    pub fn new(gamma: f64, b: Vec<f64>, c: Vec<f64>, beta: f64) -> Result<Self> {
        check_len(b.len(), c.len())?;
        if !gamma.is_finite() || gamma < 0.0 {
            return Err(Error::InvalidArgument("gamma must be finite and nonnegative".into()));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(Error::InvalidArgument("beta must be finite and positive".into()));
        }
        if let Some(i) = b.iter().chain(&c).position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i % b.len().max(1)));
        }
        Ok(Self { gamma, b, c, beta })
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let bx = dot(&self.b, x);
        0.5 * (self.gamma * dot(x, x) + bx * bx) + dot(&self.c, x)
    }

    /// `−(ηI + bbᵀ)⁻¹ c` by Sherman-Morrison, `η > 0`.
    fn solution_at(&self, eta: f64) -> Vec<f64> {
        let r = dot(&self.b, &self.b);
        let coef = dot(&self.b, &self.c) / (eta + r);
        self.c
            .iter()
            .zip(&self.b)
            .map(|(ci, bi)| -(ci - coef * bi) / eta)
            .collect()
    }

    /// Minimum-norm minimizer of the unconstrained problem, if one exists.
    fn unconstrained(&self) -> Option<Vec<f64>> {
        if self.gamma > 0.0 {
            return Some(self.solution_at(self.gamma));
        }
        // γ = 0: bounded below only when c is parallel to b.
        let r = dot(&self.b, &self.b);
        if r == 0.0 {
            return (norm2(&self.c) == 0.0).then(|| vec![0.0; self.c.len()]);
        }
        let t = dot(&self.b, &self.c) / r;
        let resid: f64 = self
            .c
            .iter()
            .zip(&self.b)
            .map(|(ci, bi)| (ci - t * bi).powi(2))
            .sum::<f64>()
            .sqrt();
        if resid > 1e-12 * norm2(&self.c).max(1.0) {
            return None;
        }
        Some(self.b.iter().map(|bi| -t * bi / r).collect())
    }
}

/// Global minimizer of a [`RankOneQp`] and its ball multiplier `θ`.
///
/// If the unconstrained minimizer lies in the ball it is returned with
/// `θ = 0`. Otherwise `‖x(θ)‖` decreases in `θ` and the boundary root is
/// found by bisection to relative bracket width `tol`. The returned point is
/// the upper bracket end, so it never leaves the ball.
pub fn solve_rank_one_ball_qp(q: &RankOneQp, tol: f64) -> Result<(Vec<f64>, f64)> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tol must be positive".into()));
    }
    let n = q.c.len();
    if norm2(&q.c) == 0.0 {
        return Ok((vec![0.0; n], 0.0));
    }
    if let Some(x) = q.unconstrained() {
        if norm2(&x) <= q.beta {
            return Ok((x, 0.0));
        }
    }

    // ‖x(θ)‖ ≤ ‖c‖/(γ + θ), so this upper end lands inside the ball.
    let mut lo = if q.gamma > 0.0 { 0.0 } else { 1e-14 };
    let mut hi = (norm2(&q.c) / q.beta - q.gamma).max(lo) * 2.0 + 1e-12;
    while norm2(&q.solution_at(q.gamma + hi)) > q.beta {
        hi *= 2.0;
    }
    for _ in 0..500 {
        if hi - lo <= tol * hi.max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if norm2(&q.solution_at(q.gamma + mid)) > q.beta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((q.solution_at(q.gamma + hi), hi))
}

/// Minimizer of `(α/2)⟨x, v⟩² − (ρ + αn)⟨x, v⟩` over `‖v‖₂ ≤ √n`, taken
/// parallel to `x`: `u* = min((ρ + αn)/α, √n‖x‖)`, `v = u*·x/‖x‖²`.
pub fn adm_v_update(x: &[f64], rho: f64, alpha: f64, n: usize) -> Vec<f64> {
    let sq = dot(x, x);
    if sq <= 1e-24 {
        return vec![0.0; x.len()];
    }
    let nf = n as f64;
    let u = ((rho + alpha * nf) / alpha).min(nf.sqrt() * sq.sqrt());
    x.iter().map(|v| v * u / sq).collect()
}

pub fn solve_adm(problem: &ProblemInstance, config: &AdmConfig, seed: u64) -> Result<SolveReport> {
    config.validate()?;
    let mut report = ReportBuilder::new(problem, "adm");
    let (obj, set) = problem.pm1_form()?;
    let n = obj.dim();
    let nf = n as f64;

    let l_hat = match config.lipschitz_override {
        Some(l) => l,
        None => lipschitz_bound(&obj, seed)?,
    };
    let cap = 2.0 * l_hat;
    report.lipschitz_bound = Some(l_hat);

    let mut x = initial_point(n, seed);
    let mut v = vec![0.0; n];
    let mut rho = 0.0_f64;
    let mut alpha = config.alpha0;
    let mut gap = nf;
    let mut iter = 0usize;
    let mut nudge = StallNudge::new(seed);

    'outer: for outer in 1..=config.max_outer {
        report.outer_iterations = outer;
        for _ in 0..config.inner_t {
            iter += 1;
            let coupling: Vec<f64> = v.iter().map(|vi| -rho * vi).collect();
            let penalized = PenalizedQuadratic::new(&obj)
                .with_linear(coupling)
                .with_rank_one(v.clone(), alpha, nf);
            let step = minimize(&penalized, &set, &x, config.subsolver)?;
            let change = relative_change(&step.x, &x);
            x = step.x;
            v = adm_v_update(&x, rho, alpha, n);
            gap = (nf - dot(&x, &v)).max(0.0);
            rho = (rho + alpha * gap).min(cap.max(rho));
            report.trace.push(TraceRecord::new(iter, obj.value(&x), gap, rho, &x));
            if gap <= config.feas_tol {
                report.converged = true;
                break 'outer;
            }
            if change <= config.change_tol && gap > config.feas_tol && rho >= cap {
                nudge.apply(&mut v);
            }
        }
        let next = (alpha * config.sigma).min(config.alpha_max);
        if next > alpha {
            report.penalty_increases += 1;
            alpha = next;
        }
    }

    report.relaxed_objective = Some(obj.value(&x));
    report.gap = gap;
    report.x_pm1 = x;
    report.finish(&set)
}
