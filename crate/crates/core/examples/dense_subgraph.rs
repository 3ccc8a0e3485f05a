//! Recovering a planted clique as the densest k-subgraph.

use binmpec::problems::{build_dense_subgraph, generate, planted_clique_members, GraphKind};
use binmpec::{solve_adm, solve_epm, AdmConfig, EpmConfig};

fn main() -> binmpec::Result<()> {
    let (n, clique, p, seed) = (60, 8, 0.1, 3);
    let g = generate(&GraphKind::PlantedClique { n, clique, p }, seed)?;
    let planted = planted_clique_members(n, clique, p, seed);
    let problem = build_dense_subgraph(&g, clique)?;

    let epm = solve_epm(&problem, &EpmConfig::default(), 0)?;
    let adm = solve_adm(&problem, &AdmConfig::default(), 0)?;
    for r in [&epm, &adm] {
        let chosen: Vec<usize> = (0..n).filter(|&i| r.x_binary[i] > 0.5).collect();
        let hits = chosen.iter().filter(|i| planted.contains(i)).count();
        println!("{}: density {:.1}, {hits}/{clique} planted nodes, picked {chosen:?}", r.method, r.score);
    }
    Ok(())
}
