//! The ball-constrained rank-one QP behind the alternating-direction step.

use binmpec::adm::{solve_rank_one_ball_qp, RankOneQp};

fn main() -> binmpec::Result<()> {
    let cases = [
        RankOneQp::new(1.0, vec![1.0, 0.0], vec![-4.0, 1.0], 2.0)?,
        RankOneQp::new(0.5, vec![0.3, -0.7, 1.1], vec![0.1, 0.2, -0.1], 10.0)?,
        RankOneQp::new(0.0, vec![2.0, 1.0], vec![-1.0, 3.0], 1.5)?,
    ];
    for q in &cases {
        let (x, theta) = solve_rank_one_ball_qp(q, 1e-12)?;
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        println!("x {x:.4?}  |x| {norm:.4} (beta {})  theta {theta:.4}  f {:.5}", q.beta, q.objective(&x));
    }
    Ok(())
}
