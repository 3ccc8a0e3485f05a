//! Accelerated projected gradient for the convex `x`-subproblems.
//!
//! Both outer methods reduce each step to minimizing a convex quadratic plus
//! a penalty term over `box ∩ Ω`. The solver is written against the
//! [`SmoothObjective`] trait; [`PenalizedQuadratic`] is the only
//! implementation shipped.

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, norm_estimate, relative_change, SparseMatrix};
use crate::projections::{project_feasible, FeasibleSet};

/// Smallest Lipschitz constant handed out; keeps the step `1/L` finite on
/// purely linear objectives.
const LIPSCHITZ_FLOOR: f64 = 1e-3;

/// `f(x) = ½ xᵀAx + bᵀx + c` with `A` symmetric positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObjective {
    a: SparseMatrix,
    b: Vec<f64>,
    c: f64,
    lipschitz: f64,
}

impl QuadraticObjective {
    /// Validates symmetry and positive semidefiniteness, and sets the
    /// gradient Lipschitz constant to `1.01 × ‖A‖` (estimated).
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: f64) -> Result<Self> {
        let norm = Self::validate(&a, &b, c)?;
        Ok(Self {
            a,
            b,
            c,
            lipschitz: (1.01 * norm).max(LIPSCHITZ_FLOOR),
        })
    }

    /// Uses a caller-supplied Lipschitz constant, which must not undercut the
    /// estimated `‖A‖` by more than 0.1%.
    pub fn with_lipschitz(a: SparseMatrix, b: Vec<f64>, c: f64, lipschitz: f64) -> Result<Self> {
        let norm = Self::validate(&a, &b, c)?;
        if !(lipschitz > 0.0) || lipschitz < 0.999 * norm {
            return Err(Error::InvalidArgument(format!(
                "lipschitz {lipschitz} below spectral estimate {norm}"
            )));
        }
        Ok(Self { a, b, c, lipschitz })
    }

    fn validate(a: &SparseMatrix, b: &[f64], c: f64) -> Result<f64> {
        if a.n_rows() != a.n_cols() {
            return Err(Error::InvalidMatrix("objective matrix must be square".into()));
        }
        check_len(a.n_rows(), b.len())?;
        if let Some(i) = b.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        if !c.is_finite() {
            return Err(Error::InvalidArgument("constant term is not finite".into()));
        }
        if !a.is_symmetric() {
            SparseMatrix::from_triplets_symmetric(a.n_rows(), &a.triplets())?;
        }
        let norm = norm_estimate(a);
        if norm > 0.0 {
            // λ_min(A) = s − ‖sI − A‖ for any s ≥ λ_max(A).
            let s = 1.01 * norm;
            let complement = a.scaled(-1.0).shifted(s);
            let lambda_min = s - norm_estimate(&complement);
            if lambda_min < -1e-7 * norm.max(1.0) {
                return Err(Error::NotPsd(lambda_min));
            }
        }
        Ok(norm)
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.a
    }

    pub fn linear(&self) -> &[f64] {
        &self.b
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        0.5 * self.a.quadratic_form_unchecked(x) + dot(&self.b, x) + self.c
    }

    pub fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        self.a.matvec_into(x, out);
        out.iter_mut().zip(&self.b).for_each(|(o, b)| *o += b);
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim()];
        self.gradient_into(x, &mut g);
        g
    }

    /// Bound on `‖∇f‖` over `[−1, 1]ⁿ`: `‖A‖·√n + ‖b‖₂`.
    pub fn box_lipschitz_bound(&self) -> f64 {
        norm_estimate(&self.a) * (self.dim() as f64).sqrt() + norm2(&self.b)
    }
}

/// A differentiable convex objective with an `L`-Lipschitz gradient.
pub trait SmoothObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn lipschitz(&self) -> f64;
}

impl SmoothObjective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.b.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        QuadraticObjective::value(self, x)
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.gradient_into(x, out)
    }

    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
}

/// `f(x) + ⟨ℓ, x⟩ + (w/2)(t − ⟨r, x⟩)² + (μ/2)‖x − z‖²`.
///
/// The linear term carries the exact-penalty coupling `−ρ v`, the rank-one
/// term the augmented Lagrangian's quadratic penalty, and the proximal term
/// the splitting baseline.
#[derive(Debug, Clone)]
pub struct PenalizedQuadratic<'a> {
    base: &'a QuadraticObjective,
    linear: Vec<f64>,
    rank_one: Option<(Vec<f64>, f64, f64)>,
    prox: Option<(Vec<f64>, f64)>,
}

impl<'a> PenalizedQuadratic<'a> {
    pub fn new(base: &'a QuadraticObjective) -> Self {
        Self {
            base,
            linear: vec![0.0; base.dim()],
            rank_one: None,
            prox: None,
        }
    }

    pub fn with_linear(mut self, linear: Vec<f64>) -> Self {
        debug_assert_eq!(linear.len(), self.base.dim());
        self.linear = linear;
        self
    }

    /// Adds `(weight/2)(target − ⟨direction, x⟩)²`.
    pub fn with_rank_one(mut self, direction: Vec<f64>, weight: f64, target: f64) -> Self {
        self.rank_one = Some((direction, weight, target));
        self
    }

    /// Adds `(weight/2)‖x − center‖²`.
    pub fn with_prox(mut self, center: Vec<f64>, weight: f64) -> Self {
        self.prox = Some((center, weight));
        self
    }
}

impl SmoothObjective for PenalizedQuadratic<'_> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let mut v = self.base.value(x) + dot(&self.linear, x);
        if let Some((r, w, t)) = &self.rank_one {
            let gap = t - dot(r, x);
            v += 0.5 * w * gap * gap;
        }
        if let Some((z, mu)) = &self.prox {
            let d: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
            v += 0.5 * mu * d;
        }
        v
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        self.base.gradient_into(x, out);
        out.iter_mut().zip(&self.linear).for_each(|(o, l)| *o += l);
        if let Some((r, w, t)) = &self.rank_one {
            let coef = -w * (t - dot(r, x));
            out.iter_mut().zip(r).for_each(|(o, ri)| *o += coef * ri);
        }
        if let Some((z, mu)) = &self.prox {
            out.iter_mut()
                .zip(x.iter().zip(z))
                .for_each(|(o, (a, b))| *o += mu * (a - b));
        }
    }

    fn lipschitz(&self) -> f64 {
        let mut l = self.base.lipschitz();
        if let Some((r, w, _)) = &self.rank_one {
            l += w * dot(r, r);
        }
        if let Some((_, mu)) = &self.prox {
            l += mu;
        }
        l
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubproblemResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SubsolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-5,
            max_iter: 2000,
        }
    }
}

/// FISTA with a fixed `1/L` step and a function-value restart: whenever an
/// accelerated step would increase the objective, the momentum is dropped
/// and a plain projected-gradient step is taken from the last iterate. The
/// objective is therefore nonincreasing along the accepted iterates.
pub fn minimize<F: SmoothObjective + ?Sized>(
    obj: &F,
    set: &FeasibleSet,
    x0: &[f64],
    opts: SubsolverOptions,
) -> Result<SubproblemResult> {
    let n = obj.dim();
    check_len(n, x0.len())?;
    check_len(n, set.dim())?;
    set.validate()?;
    let step = 1.0 / obj.lipschitz();

    let mut x = project_feasible(x0, set)?;
    let mut fx = obj.value(&x);
    let mut y = x.clone();
    let mut t = 1.0_f64;
    let mut grad = vec![0.0; n];
    let mut trial = vec![0.0; n];

    for it in 1..=opts.max_iter {
        obj.gradient(&y, &mut grad);
        for i in 0..n {
            trial[i] = y[i] - step * grad[i];
        }
        let mut z = project_feasible(&trial, set)?;
        let mut fz = obj.value(&z);

        if fz > fx {
            obj.gradient(&x, &mut grad);
            for i in 0..n {
                trial[i] = x[i] - step * grad[i];
            }
            z = project_feasible(&trial, set)?;
            fz = obj.value(&z);
            t = 1.0;
            if fz > fx {
                // Rounding-level ascent from a stationary point.
                return Ok(SubproblemResult {
                    x,
                    objective: fx,
                    iterations: it,
                    converged: true,
                });
            }
            y.clone_from(&z);
        } else {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let momentum = (t - 1.0) / t_next;
            for i in 0..n {
                y[i] = z[i] + momentum * (z[i] - x[i]);
            }
            t = t_next;
        }

        let change = relative_change(&z, &x);
        x = z;
        fx = fz;
        if change <= opts.tol {
            return Ok(SubproblemResult {
                x,
                objective: fx,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(SubproblemResult {
        x,
        objective: fx,
        iterations: opts.max_iter,
        converged: false,
    })
}

/// Minimizes `f(x) + ⟨linear_extra, x⟩` over `set`, starting from the
/// projection of `x0`.
pub fn solve_qp(
    obj: &QuadraticObjective,
    linear_extra: &[f64],
    set: &FeasibleSet,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<SubproblemResult> {
    check_len(obj.dim(), linear_extra.len())?;
    let penalized = PenalizedQuadratic::new(obj).with_linear(linear_extra.to_vec());
    minimize(&penalized, set, x0, SubsolverOptions { tol, max_iter })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box2() -> FeasibleSet {
        FeasibleSet::uniform(2, -1.0, 1.0).unwrap()
    }

    #[test]
    fn identity_objective_reaches_interior_minimum() {
        let obj = QuadraticObjective::new(SparseMatrix::identity(2), vec![0.0; 2], 0.0).unwrap();
        let r = solve_qp(&obj, &[0.0; 2], &box2(), &[5.0, -5.0], 1e-10, 10_000).unwrap();
        assert!(r.x.iter().all(|v| v.abs() < 1e-8), "{r:?}");
    }

    #[test]
    fn linear_objective_reaches_corner() {
        let obj = QuadraticObjective::new(SparseMatrix::zeros(2), vec![1.0, -1.0], 0.0).unwrap();
        let r = solve_qp(&obj, &[0.0; 2], &box2(), &[0.0; 2], 1e-5, 100).unwrap();
        assert_eq!(r.x, vec![-1.0, 1.0]);
    }

    #[test]
    fn capped_simplex_qp_hits_kkt_point() {
        let obj = QuadraticObjective::new(SparseMatrix::diagonal(&[2.0, 2.0]), vec![-2.0, -2.0], 0.0)
            .unwrap();
        let set = FeasibleSet::uniform(2, 0.0, 1.0).unwrap().with_sum(1.0).unwrap();
        let r = solve_qp(&obj, &[0.0; 2], &set, &[1.0, 0.0], 1e-10, 10_000).unwrap();
        assert!((r.x[0] - 0.5).abs() < 1e-8 && (r.x[1] - 0.5).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn rejects_indefinite_and_undersized_lipschitz() {
        let indefinite = SparseMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            QuadraticObjective::new(indefinite, vec![0.0; 2], 0.0),
            Err(Error::NotPsd(_))
        ));
        assert!(QuadraticObjective::with_lipschitz(SparseMatrix::identity(2), vec![0.0; 2], 0.0, 0.5).is_err());
        assert!(QuadraticObjective::with_lipschitz(SparseMatrix::identity(2), vec![0.0; 2], 0.0, 1.0).is_ok());
    }

    #[test]
    fn infeasible_set_is_reported() {
        let obj = QuadraticObjective::new(SparseMatrix::identity(2), vec![0.0; 2], 0.0).unwrap();
        let set = FeasibleSet::uniform(2, 0.0, 1.0).unwrap();
        assert!(set.clone().with_sum(5.0).is_err());
        assert!(solve_qp(&obj, &[0.0; 3], &set, &[0.0; 2], 1e-5, 10).is_err());
    }

    fn random_psd(rng: &mut ChaCha8Rng, n: usize) -> SparseMatrix {
        let m: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let dense: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|k| m[k][i] * m[k][j]).sum()).collect())
            .collect();
        SparseMatrix::from_dense(&dense).unwrap()
    }

    fn random_set(rng: &mut ChaCha8Rng, n: usize) -> FeasibleSet {
        let set = FeasibleSet::uniform(n, -1.0, 1.0).unwrap();
        match rng.random_range(0..3) {
            0 => set,
            1 => set.with_sum(rng.random_range(-(n as f64)..n as f64)).unwrap(),
            _ => set.with_pins([(0, 1.0)]).unwrap(),
        }
    }

    /// Plain projected gradient with a fixed step, run long enough to serve
    /// as a reference solution.
    fn projected_gradient_oracle(obj: &QuadraticObjective, extra: &[f64], set: &FeasibleSet) -> Vec<f64> {
        let n = obj.dim();
        let step = 1.0 / obj.lipschitz();
        let mut x = project_feasible(&vec![0.0; n], set).unwrap();
        for _ in 0..100_000 {
            let g = obj.gradient(&x);
            let a: Vec<f64> = (0..n).map(|i| x[i] - step * (g[i] + extra[i])).collect();
            x = project_feasible(&a, set).unwrap();
        }
        x
    }

    #[test]
    fn random_instances_satisfy_optimality_and_match_reference() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for trial in 0..20 {
            let n = rng.random_range(1..=10);
            let a = random_psd(&mut rng, n);
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
            let extra: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let obj = QuadraticObjective::new(a, b, 0.0).unwrap();
            let set = random_set(&mut rng, n);
            let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
            let start = project_feasible(&x0, &set).unwrap();
            let start_val = obj.value(&start) + dot(&extra, &start);

            let r = solve_qp(&obj, &extra, &set, &x0, 1e-12, 100_000).unwrap();
            assert!(set.contains(&r.x, 1e-9), "trial {trial}");
            assert!(r.objective <= start_val + 1e-9);

            let mut g = obj.gradient(&r.x);
            g.iter_mut().zip(&extra).for_each(|(gi, e)| *gi += e);
            for _ in 0..100 {
                let raw: Vec<f64> = (0..n).map(|_| rng.random_range(-1.5..1.5)).collect();
                let y = project_feasible(&raw, &set).unwrap();
                let d: Vec<f64> = y.iter().zip(&r.x).map(|(a, b)| a - b).collect();
                assert!(dot(&g, &d) >= -1e-6, "trial {trial}: VI violated");
            }

            let reference = projected_gradient_oracle(&obj, &extra, &set);
            let ref_val = obj.value(&reference) + dot(&extra, &reference);
            assert!((r.objective - ref_val).abs() <= 1e-5, "trial {trial}: {} vs {ref_val}", r.objective);
        }
    }

    #[test]
    fn penalized_gradient_matches_finite_differences() {
        let obj = QuadraticObjective::new(
            SparseMatrix::from_dense(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
            vec![0.3, -0.7],
            1.0,
        )
        .unwrap();
        let p = PenalizedQuadratic::new(&obj)
            .with_linear(vec![-0.4, 0.2])
            .with_rank_one(vec![0.6, -0.8], 3.0, 2.0)
            .with_prox(vec![0.1, 0.9], 0.5);
        let x = [0.3, -0.2];
        let mut g = [0.0; 2];
        p.gradient(&x, &mut g);
        let h = 1e-6;
        for i in 0..2 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += h;
            xm[i] -= h;
            let fd = (p.value(&xp) - p.value(&xm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6, "coordinate {i}: {fd} vs {}", g[i]);
        }
    }
}
