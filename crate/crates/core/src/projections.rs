//! Exact Euclidean projections onto the convex sets the solvers work over:
//! boxes, balls, capped simplices, pinned boxes and row-wise block sums.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::norm2;

const FEAS_TOL: f64 = 1e-9;

/// Every consecutive run of `size` coordinates must sum to `target`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockSum {
    pub size: usize,
    pub target: f64,
}

/// Declarative convex set: a box, optionally intersected with a single sum
/// constraint or with per-block sum constraints, with some coordinates
/// pinned to fixed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    lower: Vec<f64>,
    upper: Vec<f64>,
    sum: Option<f64>,
    pinned: Vec<(usize, f64)>,
    blocks: Option<BlockSum>,
}

impl FeasibleSet {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        check_len(lower.len(), upper.len())?;
        for (i, (l, u)) in lower.iter().zip(&upper).enumerate() {
            if !l.is_finite() || !u.is_finite() {
                return Err(Error::NonFinite(i));
            }
            if l > u {
                return Err(Error::Infeasible(format!("lower bound exceeds upper at {i}")));
            }
        }
        Ok(Self {
            lower,
            upper,
            sum: None,
            pinned: Vec::new(),
            blocks: None,
        })
    }

    pub fn uniform(n: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; n], vec![upper; n])
    }

    /// Adds `Σ x = target`.
    pub fn with_sum(mut self, target: f64) -> Result<Self> {
        self.sum = Some(target);
        self.validate()?;
        Ok(self)
    }

    /// Pins coordinates to fixed values. Pins are kept sorted by index.
    pub fn with_pins(mut self, pins: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        self.pinned.extend(pins);
        self.pinned.sort_by_key(|p| p.0);
        self.validate()?;
        Ok(self)
    }

    pub fn with_blocks(mut self, size: usize, target: f64) -> Result<Self> {
        self.blocks = Some(BlockSum { size, target });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.dim();
        for w in self.pinned.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::Infeasible(format!("coordinate {} pinned twice", w[0].0)));
            }
        }
        for &(i, v) in &self.pinned {
            if i >= n {
                return Err(Error::InvalidArgument(format!("pin index {i} out of range")));
            }
            if v < self.lower[i] - 1e-12 || v > self.upper[i] + 1e-12 {
                return Err(Error::Infeasible(format!("pin {i} = {v} outside its bounds")));
            }
        }
        if self.sum.is_some() && self.blocks.is_some() {
            return Err(Error::InvalidArgument(
                "a set may carry a sum constraint or block sums, not both".into(),
            ));
        }
        if let Some(k) = self.sum {
            let (lo, hi) = self.sum_range(0..n);
            if !k.is_finite() || k < lo - FEAS_TOL || k > hi + FEAS_TOL {
                return Err(Error::Infeasible(format!(
                    "sum target {k} outside attainable range [{lo}, {hi}]"
                )));
            }
        }
        if let Some(b) = self.blocks {
            if !self.pinned.is_empty() {
                return Err(Error::InvalidArgument("pins cannot be combined with block sums".into()));
            }
            if b.size == 0 || !n.is_multiple_of(b.size) {
                return Err(Error::InvalidArgument(format!(
                    "dimension {n} is not a multiple of block size {}",
                    b.size
                )));
            }
            for start in (0..n).step_by(b.size) {
                let (lo, hi) = self.sum_range(start..start + b.size);
                if b.target < lo - FEAS_TOL || b.target > hi + FEAS_TOL {
                    return Err(Error::Infeasible(format!(
                        "block at {start} cannot sum to {}",
                        b.target
                    )));
                }
            }
        }
        Ok(())
    }

    fn sum_range(&self, range: std::ops::Range<usize>) -> (f64, f64) {
        let mut lo = 0.0;
        let mut hi = 0.0;
        for i in range {
            match self.pin(i) {
                Some(v) => {
                    lo += v;
                    hi += v;
                }
                None => {
                    lo += self.lower[i];
                    hi += self.upper[i];
                }
            }
        }
        (lo, hi)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn sum_constraint(&self) -> Option<f64> {
        self.sum
    }

    pub fn pinned(&self) -> &[(usize, f64)] {
        &self.pinned
    }

    pub fn blocks(&self) -> Option<BlockSum> {
        self.blocks
    }

    pub fn pin(&self, i: usize) -> Option<f64> {
        self.pinned
            .binary_search_by_key(&i, |p| p.0)
            .ok()
            .map(|k| self.pinned[k].1)
    }

    /// Uniform scalar bounds `(l, u)` when every coordinate shares them.
    pub fn uniform_bounds(&self) -> Option<(f64, f64)> {
        let l = *self.lower.first()?;
        let u = *self.upper.first()?;
        let same = self.lower.iter().all(|&v| v == l) && self.upper.iter().all(|&v| v == u);
        same.then_some((l, u))
    }

    /// Whether `x` lies in the set to within `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim() {
            return false;
        }
        let in_box = x
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(v, (l, u))| *v >= l - tol && *v <= u + tol);
        let pins_ok = self.pinned.iter().all(|&(i, v)| (x[i] - v).abs() <= tol);
        let sum_ok = self
            .sum
            .is_none_or(|k| (x.iter().sum::<f64>() - k).abs() <= tol * (1.0 + x.len() as f64));
        let blocks_ok = self.blocks.is_none_or(|b| {
            x.chunks(b.size)
                .all(|c| (c.iter().sum::<f64>() - b.target).abs() <= tol * (1.0 + b.size as f64))
        });
        in_box && pins_ok && sum_ok && blocks_ok
    }

    /// Maps this set through the coordinate change `x' = scale·x + offset`
    /// (scale > 0).
    pub(crate) fn affine_image(&self, scale: f64, offset: f64) -> Self {
        let n = self.dim() as f64;
        let map = |v: f64| scale * v + offset;
        Self {
            lower: self.lower.iter().map(|&v| map(v)).collect(),
            upper: self.upper.iter().map(|&v| map(v)).collect(),
            sum: self.sum.map(|k| scale * k + offset * n),
            pinned: self.pinned.iter().map(|&(i, v)| (i, map(v))).collect(),
            blocks: self.blocks.map(|b| BlockSum {
                size: b.size,
                target: scale * b.target + offset * b.size as f64,
            }),
        }
    }
}

/// Clamps `a` to the box and overwrites pinned coordinates.
pub fn project_box(a: &[f64], set: &FeasibleSet) -> Result<Vec<f64>> {
    check_len(set.dim(), a.len())?;
    let mut x: Vec<f64> = a
        .iter()
        .zip(set.lower.iter().zip(&set.upper))
        .map(|(v, (l, u))| v.clamp(*l, *u))
        .collect();
    for &(i, v) in &set.pinned {
        x[i] = v;
    }
    Ok(x)
}

pub fn project_ball(a: &[f64], radius: f64) -> Vec<f64> {
    let norm = norm2(a);
    if norm <= radius {
        a.to_vec()
    } else {
        a.iter().map(|v| radius * v / norm).collect()
    }
}

/// Projection onto `{0 ≤ x ≤ 1, Σ x = k}`.
pub fn project_capped_simplex(a: &[f64], k: f64) -> Result<Vec<f64>> {
    let n = a.len();
    project_box_sum(a, &vec![0.0; n], &vec![1.0; n], k)
}

/// Projection onto `{l ≤ x ≤ u, Σ x = k}` by break-point search.
///
/// `x(τ) = clamp(a − τ, l, u)` has a sum that is piecewise linear and
/// nonincreasing in `τ`, with kinks at `aᵢ − uᵢ` and `aᵢ − lᵢ`. Sorting the
/// kinks and sweeping them once finds the piece that crosses `k`.
pub fn project_box_sum(a: &[f64], lower: &[f64], upper: &[f64], k: f64) -> Result<Vec<f64>> {
    let n = a.len();
    check_len(n, lower.len())?;
    check_len(n, upper.len())?;
    let lo_sum: f64 = lower.iter().sum();
    let hi_sum: f64 = upper.iter().sum();
    let slack = FEAS_TOL * (1.0 + lo_sum.abs().max(hi_sum.abs()));
    if !k.is_finite() || k < lo_sum - slack || k > hi_sum + slack {
        return Err(Error::Infeasible(format!(
            "sum target {k} outside [{lo_sum}, {hi_sum}]"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if k >= hi_sum {
        return Ok(upper.to_vec());
    }
    if k <= lo_sum {
        return Ok(lower.to_vec());
    }

    // (break point, coordinate, entering the free set?)
    let mut kinks: Vec<(f64, usize, bool)> = Vec::with_capacity(2 * n);
    for i in 0..n {
        kinks.push((a[i] - upper[i], i, true));
        kinks.push((a[i] - lower[i], i, false));
    }
    kinks.sort_unstable_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(q.2.cmp(&p.2)));

    // On each piece the sum is `offset − free·τ`.
    let mut offset = hi_sum;
    let mut free = 0usize;
    let mut tau = kinks[0].0;
    for &(bp, i, entering) in &kinks {
        let at_bp = offset - free as f64 * bp;
        if at_bp <= k {
            tau = if free > 0 { (offset - k) / free as f64 } else { bp };
            break;
        }
        if entering {
            offset += a[i] - upper[i];
            free += 1;
        } else {
            offset -= a[i] - lower[i];
            free -= 1;
        }
        tau = bp;
    }
    Ok(a.iter()
        .zip(lower.iter().zip(upper))
        .map(|(v, (l, u))| (v - tau).clamp(*l, *u))
        .collect())
}

/// Exact projection onto the set described by `set`.
pub fn project_feasible(a: &[f64], set: &FeasibleSet) -> Result<Vec<f64>> {
    check_len(set.dim(), a.len())?;
    if let Some(b) = set.blocks {
        let mut x = Vec::with_capacity(a.len());
        for start in (0..a.len()).step_by(b.size) {
            let end = start + b.size;
            x.extend(project_sum_with_bounds(
                &a[start..end],
                &set.lower[start..end],
                &set.upper[start..end],
                b.target,
            )?);
        }
        return Ok(x);
    }
    let Some(k) = set.sum else {
        return project_box(a, set);
    };
    if set.pinned.is_empty() {
        return project_sum_with_bounds(a, &set.lower, &set.upper, k);
    }

    let mut pinned_total = 0.0;
    let mut free_idx = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        match set.pin(i) {
            Some(v) => pinned_total += v,
            None => free_idx.push(i),
        }
    }
    let sub_a: Vec<f64> = free_idx.iter().map(|&i| a[i]).collect();
    let sub_l: Vec<f64> = free_idx.iter().map(|&i| set.lower[i]).collect();
    let sub_u: Vec<f64> = free_idx.iter().map(|&i| set.upper[i]).collect();
    let sub = project_sum_with_bounds(&sub_a, &sub_l, &sub_u, k - pinned_total)?;
    let mut x = vec![0.0; a.len()];
    for &(i, v) in &set.pinned {
        x[i] = v;
    }
    for (&i, v) in free_idx.iter().zip(sub) {
        x[i] = v;
    }
    Ok(x)
}

/// Box-plus-sum projection; a uniform box `[l, u]` is mapped onto the unit
/// cube and handed to [`project_capped_simplex`].
fn project_sum_with_bounds(a: &[f64], lower: &[f64], upper: &[f64], k: f64) -> Result<Vec<f64>> {
    let n = a.len();
    if n > 0 {
        let (l, u) = (lower[0], upper[0]);
        let uniform = u > l && lower.iter().all(|&v| v == l) && upper.iter().all(|&v| v == u);
        if uniform {
            let width = u - l;
            let scaled: Vec<f64> = a.iter().map(|v| (v - l) / width).collect();
            let target = ((k - n as f64 * l) / width).clamp(0.0, n as f64);
            let y = project_capped_simplex(&scaled, target)
                .map_err(|_| Error::Infeasible(format!("sum target {k} unattainable")))?;
            return Ok(y.into_iter().map(|v| (l + width * v).clamp(l, u)).collect());
        }
    }
    project_box_sum(a, lower, upper, k)
}
