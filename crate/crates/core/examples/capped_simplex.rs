//! Euclidean projection onto {0 <= x <= 1, sum x = k}.

use binmpec::projections::project_capped_simplex;

fn main() -> binmpec::Result<()> {
    let a = [0.9, 1.7, -0.3, 0.4, 0.05, 0.6];
    for k in [1.0, 2.0, 3.5] {
        let x = project_capped_simplex(&a, k)?;
        println!("k {k}: {x:.4?} sum {:.6}", x.iter().sum::<f64>());
    }
    Ok(())
}
