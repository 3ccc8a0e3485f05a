//! Continuous solvers for binary quadratic programs built on the
//! complementarity reformulation
//!
//! ```text
//! x ∈ {−1, +1}ⁿ  ⇔  ‖x‖∞ ≤ 1, ‖v‖₂² ≤ n, ⟨x, v⟩ = n   for some v
//! ```
//!
//! Two outer methods attack the lifted biconvex problem:
//!
//! - [`epm::solve_epm`] penalizes the gap `n − ⟨x, v⟩` with a weight that
//!   grows geometrically up to twice the objective's Lipschitz bound, after
//!   which the penalty is exact.
//! - [`adm::solve_adm`] runs an augmented Lagrangian with a monotone
//!   multiplier on the same gap.
//!
//! Each outer step alternates a convex `x`-subproblem (accelerated projected
//! gradient, [`subsolver`]) with a closed-form `v`-update. Problems come from
//! the builders in [`problems`]; [`baselines`] holds LP rounding, iterative
//! hard thresholding and an ℓ2-box splitting method for comparison, and
//! [`oracle`] enumerates small instances exactly.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adm;
pub mod baselines;
pub mod bench;
pub mod cli;
pub mod epm;
pub mod error;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod problems;
pub mod projections;
pub mod reformulations;
pub mod report;
pub mod subsolver;

pub use adm::{solve_adm, AdmConfig};
pub use baselines::{solve_iht, solve_l2box_admm, solve_lp_round, BaselineConfig, BaselineMethod};
pub use epm::{solve_epm, EpmConfig};
pub use error::{Error, Result};
pub use linalg::{SparseMatrix, Vector};
pub use oracle::{brute_force, OracleResult};
pub use problems::{Graph, GraphKind, ProblemInstance};
pub use projections::FeasibleSet;
pub use reformulations::{Domain, MpecVariant};
pub use report::{SolveReport, TraceRecord};
pub use subsolver::QuadraticObjective;
