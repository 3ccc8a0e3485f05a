//! Two-way modularity clustering of two cliques joined by a single edge.

use binmpec::problems::{build_modularity, modularity_of_labels};
use binmpec::{solve_epm, EpmConfig, Graph};

fn main() -> binmpec::Result<()> {
    let mut edges = Vec::new();
    for block in [0usize, 5] {
        for i in 0..5 {
            for j in i + 1..5 {
                edges.push((block + i, block + j, 1.0));
            }
        }
    }
    edges.push((4, 5, 1.0));
    let g = Graph::new(10, edges)?;

    let k = 2;
    let p = build_modularity(&g, k)?;
    let r = solve_epm(&p, &EpmConfig::default(), 0)?;
    let labels: Vec<usize> = r
        .x_binary
        .chunks(k)
        .map(|row| row.iter().position(|&y| y > 0.5).unwrap_or(0))
        .collect();
    println!("labels {labels:?}");
    println!("modularity {:.4} (recomputed {:.4})", r.score, modularity_of_labels(&g, &labels)?);
    Ok(())
}
