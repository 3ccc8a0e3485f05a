//! Exact penalty method on
//!
//! ```text
//! J_ρ(x, v) = f(x) + ρ (n − ⟨x, v⟩),   −1 ≤ x ≤ 1, x ∈ Ω, ‖v‖₂² ≤ n
//! ```
//!
//! Each inner iteration minimizes over `x` (a convex QP with a linear
//! coupling term) and then over `v` in closed form. Every `T` inner
//! iterations the penalty grows by `σ`, capped at `2L̂` where `L̂` bounds the
//! gradient of `f` over the box. Past that cap the penalty is exact, so the
//! iterates settle on binary points.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::linalg::{dot, norm2, relative_change, spectral_norm_estimate};
use crate::problems::ProblemInstance;
use crate::report::{ReportBuilder, SolveReport, TraceRecord};
use crate::subsolver::{minimize, PenalizedQuadratic, QuadraticObjective, SubsolverOptions};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpmConfig {
    pub rho0: f64,
    pub sigma: f64,
    pub inner_t: usize,
    /// Stop once the complementarity gap is at most this.
    pub feas_tol: f64,
    /// Outer iterations = penalty update points.
    pub max_outer: usize,
    pub lipschitz_override: Option<f64>,
    /// Relative `x` change required, together with `feas_tol`, to stop.
    pub change_tol: f64,
    pub subsolver: SubsolverOptions,
}

impl Default for EpmConfig {
    fn default() -> Self {
        Self {
            rho0: 0.01,
            sigma: 10f64.sqrt(),
            inner_t: 10,
            feas_tol: 1e-8,
            max_outer: 100,
            lipschitz_override: None,
            change_tol: 1e-5,
            subsolver: SubsolverOptions::default(),
        }
    }
}

impl EpmConfig {
    fn validate(&self) -> Result<()> {
        use crate::error::Error::InvalidArgument;
        if !(self.rho0 > 0.0) {
            return Err(InvalidArgument("rho0 must be positive".into()));
        }
        if !(self.sigma > 1.0) {
            return Err(InvalidArgument("sigma must exceed 1".into()));
        }
        if self.inner_t == 0 {
            return Err(InvalidArgument("inner_t must be at least 1".into()));
        }
        if let Some(l) = self.lipschitz_override {
            if !(l > 0.0) {
                return Err(InvalidArgument("lipschitz override must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Maximizer of `⟨x, v⟩` over the ball `‖v‖₂ ≤ √n`: `√n·x/‖x‖`, or the zero
/// vector when `x = 0` (every feasible `v` is optimal then).
pub fn epm_v_update(x: &[f64]) -> Vec<f64> {
    let norm = norm2(x);
    if norm <= 1e-12 {
        return vec![0.0; x.len()];
    }
    let scale = (x.len() as f64).sqrt() / norm;
    x.iter().map(|v| v * scale).collect()
}

/// `‖A‖·√n + ‖b‖₂` for the `{−1, +1}` form, estimated with the given seed.
pub(crate) fn lipschitz_bound(obj: &QuadraticObjective, seed: u64) -> Result<f64> {
    let norm = spectral_norm_estimate(obj.matrix(), 1e-8, 20_000, seed)?.value;
    Ok(norm * (obj.dim() as f64).sqrt() + norm2(obj.linear()))
}

/// Starting point handed to the first `x`-subproblem: uniform in the box,
/// from its own stream of the solve seed. With `v⁰ = 0` that subproblem is
/// the plain relaxation; when its minimizer is the symmetric point `0` (as
/// for balanced bisection) the inexact solve leaves a small nonzero `x`
/// whose direction seeds `v`.
pub(crate) fn initial_point(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Seeded perturbation of `v` for runs that stall on a nonbinary fixed point
/// of the alternating steps once the penalty is at its cap. Such points are
/// saddles (the symmetric point of a regular graph is one), and without a
/// kick the iterates leave them only through round-off, if at all.
pub(crate) struct StallNudge {
    rng: ChaCha8Rng,
    scale: f64,
}

impl StallNudge {
    pub(crate) fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(2);
        Self { rng, scale: 1e-2 }
    }

    /// Adds a random vector of norm `scale·√n` to `v`, then pulls the result
    /// back into the ball `‖v‖₂ ≤ √n`.
    pub(crate) fn apply(&mut self, v: &mut [f64]) {
        let n = v.len();
        if n == 0 {
            return;
        }
        let radius = (n as f64).sqrt();
        let d: Vec<f64> = (0..n).map(|_| self.rng.random_range(-1.0..1.0)).collect();
        let dn = norm2(&d).max(f64::MIN_POSITIVE);
        for (vi, di) in v.iter_mut().zip(&d) {
            *vi += self.scale * radius * di / dn;
        }
        let vn = norm2(v);
        if vn > radius {
            v.iter_mut().for_each(|vi| *vi *= radius / vn);
        }
    }
}

/// Upper bound on the number of penalty increases:
/// `⌈(ln(L̂√(2n)) − ln(ε ρ⁰)) / ln σ⌉`.
pub fn penalty_increase_bound(lipschitz: f64, n: usize, feas_tol: f64, rho0: f64, sigma: f64) -> usize {
    let num = (lipschitz * (2.0 * n as f64).sqrt()).ln() - (feas_tol * rho0).ln();
    (num / sigma.ln()).ceil().max(0.0) as usize
}

pub fn solve_epm(problem: &ProblemInstance, config: &EpmConfig, seed: u64) -> Result<SolveReport> {
    config.validate()?;
    let mut report = ReportBuilder::new(problem, "epm");
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
    let mut rho = config.rho0.min(cap.max(f64::MIN_POSITIVE));
    let mut gap = nf;
    let mut iter = 0usize;
    let mut nudge = StallNudge::new(seed);

    'outer: for outer in 1..=config.max_outer {
        report.outer_iterations = outer;
        for _ in 0..config.inner_t {
            iter += 1;
            let coupling: Vec<f64> = v.iter().map(|vi| -rho * vi).collect();
            let penalized = PenalizedQuadratic::new(&obj).with_linear(coupling);
            let step = minimize(&penalized, &set, &x, config.subsolver)?;
            let change = relative_change(&step.x, &x);
            x = step.x;
            v = epm_v_update(&x);
            gap = (nf - dot(&x, &v)).max(0.0);
            report.trace.push(TraceRecord::new(iter, obj.value(&x), gap, rho, &x));
            if gap <= config.feas_tol && change <= config.change_tol {
                report.converged = true;
                break 'outer;
            }
            if change <= config.change_tol && gap > config.feas_tol && rho >= cap {
                nudge.apply(&mut v);
            }
        }
        let next = (rho * config.sigma).min(cap);
        if next > rho {
            report.penalty_increases += 1;
            rho = next;
        }
    }

    report.relaxed_objective = Some(obj.value(&x));
    report.gap = gap;
    report.x_pm1 = x;
    report.finish(&set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn v_update_examples() {
        assert_eq!(epm_v_update(&[1.0, -1.0]), vec![1.0, -1.0]);
        assert_eq!(epm_v_update(&[0.0, 0.0]), vec![0.0, 0.0]);

        let v = epm_v_update(&[0.6, -0.8]);
        let expect = [2f64.sqrt() * 0.6, -(2f64.sqrt()) * 0.8];
        assert!((v[0] - expect[0]).abs() < 1e-12 && (v[1] - expect[1]).abs() < 1e-12);

        // Grid search over the disk of radius √2 for the maximizer of ⟨x, v⟩.
        let x = [0.6, -0.8];
        let r = 2f64.sqrt();
        let mut best = (f64::NEG_INFINITY, [0.0, 0.0]);
        for i in 0..=2000 {
            for j in 0..=2000 {
                let cand = [-r + 2.0 * r * i as f64 / 2000.0, -r + 2.0 * r * j as f64 / 2000.0];
                if cand[0] * cand[0] + cand[1] * cand[1] > 2.0 {
                    continue;
                }
                let val = dot(&x, &cand);
                if val > best.0 {
                    best = (val, cand);
                }
            }
        }
        assert!((best.1[0] - expect[0]).abs() < 5e-3 && (best.1[1] - expect[1]).abs() < 5e-3);
        assert!(dot(&x, &v) >= best.0 - 1e-12);
    }

    #[test]
    fn v_update_stays_in_ball() {
        let x = [0.3, -0.9, 0.1, 0.0];
        let v = epm_v_update(&x);
        assert!(dot(&v, &v) <= 4.0 + 1e-12);
    }

    #[test]
    fn increase_bound_formula() {
        let b = penalty_increase_bound(10.0, 8, 1e-8, 0.01, 10f64.sqrt());
        let expect = (((10.0 * 4.0f64).ln() - (1e-10f64).ln()) / 10f64.sqrt().ln()).ceil() as usize;
        assert_eq!(b, expect);
    }

    #[test]
    fn config_validation() {
        let p = crate::problems::build_mrf(&crate::problems::Graph::new(1, []).unwrap(), &[-1.0]).unwrap();
        let bad = EpmConfig { sigma: 1.0, ..EpmConfig::default() };
        assert!(solve_epm(&p, &bad, 0).is_err());
        let bad = EpmConfig { rho0: 0.0, ..EpmConfig::default() };
        assert!(solve_epm(&p, &bad, 0).is_err());
    }
}
