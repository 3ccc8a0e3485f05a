//! Compares the continuous solvers with exhaustive enumeration on a small
//! random bisection instance.

use binmpec::problems::{build_bisection, generate, GraphKind};
use binmpec::{brute_force, solve_adm, solve_epm, AdmConfig, EpmConfig};

fn main() -> binmpec::Result<()> {
    let g = generate(&GraphKind::ErdosRenyi { n: 16, p: 0.3 }, 11)?;
    let p = build_bisection(&g)?;
    let exact = brute_force(&p, 22)?;
    println!("oracle: f {} over {} balanced cuts", exact.f, exact.count_feasible);
    let epm = solve_epm(&p, &EpmConfig::default(), 0)?;
    let adm = solve_adm(&p, &AdmConfig::default(), 0)?;
    for r in [epm, adm] {
        println!("{}: f {} (excess {:.3})", r.method, r.objective_binary, r.objective_binary - exact.f);
    }
    Ok(())
}
