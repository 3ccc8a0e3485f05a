//! Seeded segmentation: a path whose two ends are pinned to opposite labels.
//! The minimum cut puts the single boundary on the weakest edge.

use binmpec::problems::build_constrained_segmentation;
use binmpec::{solve_epm, EpmConfig, Graph};

fn main() -> binmpec::Result<()> {
    let weights = [3.0, 2.5, 4.0, 0.4, 3.5, 2.0, 3.0];
    let edges = weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w));
    let g = Graph::new(weights.len() + 1, edges)?;
    let p = build_constrained_segmentation(&g, &[0], &[weights.len()])?;
    let r = solve_epm(&p, &EpmConfig::default(), 0)?;
    println!("labels {:?}", r.x_binary);
    println!("cut objective {}", r.objective_binary);
    Ok(())
}
