//! A binary Markov random field on a noisy 1-D signal: unary costs pull each
//! site toward its observation, the Laplacian smooths.

use binmpec::problems::{build_mrf, generate, GraphKind};
use binmpec::{brute_force, solve_adm, AdmConfig};

fn main() -> binmpec::Result<()> {
    let observed = [1, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0];
    let unary: Vec<f64> = observed.iter().map(|&o| if o == 1 { -0.6 } else { 0.6 }).collect();
    let g = generate(&GraphKind::Path { n: observed.len() }, 0)?;
    let p = build_mrf(&g, &unary)?;

    let r = solve_adm(&p, &AdmConfig::default(), 0)?;
    let exact = brute_force(&p, 22)?;
    let show = |x: &[f64]| x.iter().map(|&v| if v > 0.5 { '1' } else { '0' }).collect::<String>();
    println!("observed  {}", observed.iter().map(|o| o.to_string()).collect::<String>());
    println!("adm       {}  energy {:.3}", show(&r.x_binary), r.objective_binary);
    println!("exact     {}  energy {:.3}", show(&exact.x), exact.f);
    Ok(())
}
