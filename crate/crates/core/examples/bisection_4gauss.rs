//! Balanced bisection of a four-blob kNN graph with both exact-penalty and
//! alternating-direction solvers, plus the baselines for comparison.

use binmpec::bench::run_method;
use binmpec::problems::{build_bisection, four_gauss_default, generate};

fn main() -> binmpec::Result<()> {
    let g = generate(&four_gauss_default(), 0)?;
    let p = build_bisection(&g)?;
    println!("nodes {} edges {}", g.n(), g.edges().len());
    for method in ["epm", "adm", "lp", "iht", "l2box"] {
        let r = run_method(method, &p, 0)?;
        println!(
            "{method:<6} cut {:>10.4}  feasible {}  outer {:>3}  converged {}",
            r.score, r.feasible, r.outer_iterations, r.converged
        );
    }
    Ok(())
}
