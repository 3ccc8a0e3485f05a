//! Membership predicates for the complementarity reformulations of the
//! binary set, plus the sign rounding and domain maps shared by every solver.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{dot, norm2, norm_inf};
use crate::projections::FeasibleSet;

/// Which binary alphabet a problem lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    /// `{−1, +1}ⁿ`
    Pm1,
    /// `{0, 1}ⁿ`
    ZeroOne,
}

impl Domain {
    pub fn values(self) -> (f64, f64) {
        match self {
            Domain::Pm1 => (-1.0, 1.0),
            Domain::ZeroOne => (0.0, 1.0),
        }
    }
}

/// The lifted sets whose `x`-projection is exactly `{−1, +1}ⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MpecVariant {
    /// `⟨x, v⟩ = n, ‖x‖∞ ≤ 1, ‖v‖₂² ≤ n`
    L2BoxNonSep,
    /// `⟨x, v⟩ = n, ‖x‖∞ ≤ 1, ‖v‖∞ ≤ 1`
    LinfBoxNonSep,
    /// `x ⊙ v = 1, ‖x‖∞ ≤ 1, ‖v‖∞ ≤ 1`
    LinfBoxSep,
    /// `x ⊙ v = 1, ‖x‖∞ ≤ 1, ‖v‖₂² ≤ n`
    L2BoxSep,
    /// `‖x‖∞ ≤ 1, ‖x‖₂² = n` (no auxiliary variable; `v` is ignored)
    L2BoxNonSepReform,
}

impl MpecVariant {
    pub const ALL: [MpecVariant; 5] = [
        MpecVariant::L2BoxNonSep,
        MpecVariant::LinfBoxNonSep,
        MpecVariant::LinfBoxSep,
        MpecVariant::L2BoxSep,
        MpecVariant::L2BoxNonSepReform,
    ];
}

/// Whether `(x, v)` satisfies every constraint of `variant` within `tol`.
pub fn membership(variant: MpecVariant, x: &[f64], v: &[f64], tol: f64) -> bool {
    let n = x.len();
    if variant != MpecVariant::L2BoxNonSepReform && v.len() != n {
        return false;
    }
    let nf = n as f64;
    let x_box = norm_inf(x) <= 1.0 + tol;
    match variant {
        MpecVariant::L2BoxNonSep => {
            x_box && (dot(x, v) - nf).abs() <= tol && dot(v, v) <= nf + tol
        }
        MpecVariant::LinfBoxNonSep => {
            x_box && (dot(x, v) - nf).abs() <= tol && norm_inf(v) <= 1.0 + tol
        }
        MpecVariant::LinfBoxSep => {
            x_box && elementwise_unit(x, v, tol) && norm_inf(v) <= 1.0 + tol
        }
        MpecVariant::L2BoxSep => x_box && elementwise_unit(x, v, tol) && dot(v, v) <= nf + tol,
        MpecVariant::L2BoxNonSepReform => x_box && (dot(x, x) - nf).abs() <= tol,
    }
}

fn elementwise_unit(x: &[f64], v: &[f64], tol: f64) -> bool {
    x.iter().zip(v).all(|(a, b)| (a * b - 1.0).abs() <= tol)
}

/// Sign with `sign(0) = +1`; in the zero-one domain, thresholds at `0.5`
/// with ties going to `1`.
pub fn round_sign(x: &[f64], domain: Domain) -> Vec<f64> {
    match domain {
        Domain::Pm1 => x.iter().map(|&v| if v >= 0.0 { 1.0 } else { -1.0 }).collect(),
        Domain::ZeroOne => x.iter().map(|&v| if v >= 0.5 { 1.0 } else { 0.0 }).collect(),
    }
}

/// Sign-rounds a `{−1, +1}`-coordinate point and then repairs it onto the
/// binary points of `set`: pinned coordinates are restored, and when a sum
/// (or block sum) is violated the free entries closest to the threshold are
/// flipped until it holds. Ties flip the lowest index first.
pub fn round_feasible(x: &[f64], set: &FeasibleSet) -> Result<Vec<f64>> {
    check_len(set.dim(), x.len())?;
    let mut s = round_sign(x, Domain::Pm1);
    for &(i, v) in set.pinned() {
        if v != 1.0 && v != -1.0 {
            return Err(Error::Infeasible(format!("pin {i} = {v} is not binary")));
        }
        s[i] = v;
    }
    let free: Vec<usize> = (0..x.len()).filter(|&i| set.pin(i).is_none()).collect();
    if let Some(k) = set.sum_constraint() {
        let total: f64 = s.iter().sum();
        repair_count(x, &mut s, &free, total, k)?;
    }
    if let Some(b) = set.blocks() {
        for start in (0..x.len()).step_by(b.size) {
            let idx: Vec<usize> = (start..start + b.size).collect();
            let total: f64 = idx.iter().map(|&i| s[i]).sum();
            repair_count(x, &mut s, &idx, total, b.target)?;
        }
    }
    Ok(s)
}

/// Flips entries of `s` among `idx` until the constrained sum, currently
/// `total`, equals `target`.
fn repair_count(x: &[f64], s: &mut [f64], idx: &[usize], total: f64, target: f64) -> Result<()> {
    let excess = total - target;
    let flips = excess / 2.0;
    if (flips - flips.round()).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("no binary point sums to {target}")));
    }
    let flips = flips.round() as i64;
    let (from, to) = if flips > 0 { (1.0, -1.0) } else { (-1.0, 1.0) };
    let mut candidates: Vec<usize> = idx.iter().copied().filter(|&i| s[i] == from).collect();
    // Closest to the threshold first.
    if flips > 0 {
        candidates.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    } else {
        candidates.sort_by(|&a, &b| x[b].total_cmp(&x[a]).then(a.cmp(&b)));
    }
    let needed = flips.unsigned_abs() as usize;
    if candidates.len() < needed {
        return Err(Error::Infeasible(format!("cannot reach sum {target} by flipping")));
    }
    for &i in &candidates[..needed] {
        s[i] = to;
    }
    Ok(())
}

/// Exact affine change of alphabet: `y = (x + 1)/2` or `x = 2y − 1`.
pub fn domain_transform(x: &[f64], from: Domain, to: Domain) -> Vec<f64> {
    match (from, to) {
        (Domain::Pm1, Domain::ZeroOne) => x.iter().map(|v| (v + 1.0) / 2.0).collect(),
        (Domain::ZeroOne, Domain::Pm1) => x.iter().map(|v| 2.0 * v - 1.0).collect(),
        _ => x.to_vec(),
    }
}

/// `h(x) = (n − √n‖x‖₂) / ‖sign(x) − x‖₂`, the ratio that bounds the
/// complementarity gap from below by the distance to the nearest vertex.
pub fn h_ratio(x: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    if norm_inf(x) > 1.0 {
        return Err(Error::InvalidArgument("h ratio is defined on the unit box".into()));
    }
    let s = round_sign(x, Domain::Pm1);
    let diff: Vec<f64> = s.iter().zip(x).map(|(a, b)| a - b).collect();
    let denom = norm2(&diff);
    if denom == 0.0 {
        return Err(Error::BinaryPoint);
    }
    Ok((n - n.sqrt() * norm2(x)) / denom)
}

/// Complementarity gap `n − ⟨x, v⟩`.
pub fn complementarity_gap(x: &[f64], v: &[f64]) -> Result<f64> {
    check_len(x.len(), v.len())?;
    Ok(x.len() as f64 - dot(x, v))
}
