//! Exhaustive enumeration of the binary feasible points of small instances.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::ProblemInstance;

pub const DEFAULT_LIMIT: usize = 22;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub count_feasible: u64,
}

/// Minimizes over every binary assignment of the free (unpinned)
/// coordinates, in the problem's own domain.
///
/// The walk follows a reflected Gray code so each step flips one coordinate
/// and updates `Ax` in `O(nnz(row))`. Ties are broken toward the assignment
/// whose binary code (bit `j` set when the `j`-th free coordinate takes the
/// upper value) is smallest, so the result does not depend on visit order.
pub fn brute_force(problem: &ProblemInstance, limit_n: usize) -> Result<OracleResult> {
    let set = problem.set();
    let n = problem.dim();
    let (lo, hi) = problem.domain().values();
    let free: Vec<usize> = (0..n).filter(|&i| set.pin(i).is_none()).collect();
    if free.len() > limit_n || free.len() >= 63 {
        return Err(Error::SizeLimit {
            free: free.len(),
            limit: limit_n.min(62),
        });
    }

    let mut x = vec![lo; n];
    for &(i, v) in set.pinned() {
        if v != lo && v != hi {
            return Err(Error::Infeasible(format!("pin {i} = {v} is not binary")));
        }
        x[i] = v;
    }

    let obj = problem.objective();
    let a = obj.matrix();
    let b = obj.linear();
    let mut ax = a.matvec(&x)?;
    let mut f = obj.value(&x);
    let scale = 1.0 + f.abs();

    let eps = 1e-9;
    let mut sum: f64 = x.iter().sum();
    let blocks = set.blocks();
    let mut block_sums: Vec<f64> = match blocks {
        Some(bl) => x.chunks(bl.size).map(|c| c.iter().sum()).collect(),
        None => Vec::new(),
    };
    let mut violated = match blocks {
        Some(bl) => block_sums.iter().filter(|s| (*s - bl.target).abs() > eps).count(),
        None => 0,
    };
    let feasible = |sum: f64, violated: usize| -> bool {
        violated == 0 && set.sum_constraint().is_none_or(|k| (sum - k).abs() <= eps)
    };

    let mut code: u64 = 0;
    let mut best: Option<(f64, u64)> = None;
    let mut count = 0u64;
    let consider = |f: f64, code: u64, best: &mut Option<(f64, u64)>| {
        let tie = 1e-9 * scale.max(f.abs());
        let better = match *best {
            None => true,
            Some((bf, bc)) => f < bf - tie || ((f - bf).abs() <= tie && code < bc),
        };
        if better {
            *best = Some((f, code));
        }
    };

    if feasible(sum, violated) {
        count += 1;
        consider(f, code, &mut best);
    }
    let total: u64 = 1u64 << free.len();
    for step in 1..total {
        let j = step.trailing_zeros() as usize;
        let i = free[j];
        code ^= 1 << j;
        let d = if x[i] == lo { hi - lo } else { lo - hi };

        f += d * (ax[i] + b[i]) + 0.5 * a.get(i, i) * d * d;
        for (col, val) in a.row(i) {
            ax[col] += val * d;
        }
        x[i] += d;
        sum += d;
        if let Some(bl) = blocks {
            let k = i / bl.size;
            let was_ok = (block_sums[k] - bl.target).abs() <= eps;
            block_sums[k] += d;
            let is_ok = (block_sums[k] - bl.target).abs() <= eps;
            match (was_ok, is_ok) {
                (true, false) => violated += 1,
                (false, true) => violated -= 1,
                _ => {}
            }
        }
        if feasible(sum, violated) {
            count += 1;
            consider(f, code, &mut best);
        }
    }

    let (_, code) = best.ok_or_else(|| Error::Infeasible("no binary point satisfies the constraints".into()))?;
    let mut xb = vec![lo; n];
    for &(i, v) in set.pinned() {
        xb[i] = v;
    }
    for (j, &i) in free.iter().enumerate() {
        if code >> j & 1 == 1 {
            xb[i] = hi;
        }
    }
    let fb = obj.value(&xb);
    Ok(OracleResult {
        x: xb,
        f: fb,
        count_feasible: count,
    })
}
