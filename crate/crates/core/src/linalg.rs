//! Compressed-row sparse matrices, dense vector helpers, and a seeded power
//! iteration for spectral-norm estimates.
//!
//! Matrices are stored with both triangles present. Every objective in this
//! crate is symmetric, so `matvec` never has to branch on storage layout.

use std::ops::Deref;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};

/// A dense vector whose entries are all finite.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.0
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Relative change `‖new − old‖ / max(‖old‖, 1)`.
pub fn relative_change(new: &[f64], old: &[f64]) -> f64 {
    dist2(new, old) / norm2(old).max(1.0)
}

/// Sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
    symmetric: bool,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets. Duplicate
    /// coordinates are summed.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        let mut sorted: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (k, &(i, j, w)) in triplets.iter().enumerate() {
            if i >= n_rows || j >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({i}, {j}) outside {n_rows}x{n_cols}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite(k));
            }
            sorted.push((i, j, w));
        }
        sorted.sort_by_key(|a| (a.0, a.1));

        let mut row_offsets = vec![0usize; n_rows + 1];
        let mut col_indices = Vec::with_capacity(sorted.len());
        let mut values: Vec<f64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, w) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += w;
                continue;
            }
            last = Some((i, j));
            row_offsets[i + 1] += 1;
            col_indices.push(j);
            values.push(w);
        }
        for i in 0..n_rows {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_offsets,
            col_indices,
            values,
            symmetric: false,
        })
    }

    /// Like [`from_triplets`](Self::from_triplets) but validates that the
    /// result is symmetric to within `1e-12` and sets the symmetry flag.
    pub fn from_triplets_symmetric(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        let mut m = Self::from_triplets(n, n, triplets)?;
        m.check_symmetric(1e-12)?;
        m.symmetric = true;
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_offsets: vec![0; n + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
            symmetric: true,
        }
    }

    pub fn diagonal(d: &[f64]) -> Self {
        Self {
            n_rows: d.len(),
            n_cols: d.len(),
            row_offsets: (0..=d.len()).collect(),
            col_indices: (0..d.len()).collect(),
            values: d.to_vec(),
            symmetric: true,
        }
    }

    /// Square symmetric matrix from a dense row-major array. Exact zeros are
    /// not stored.
    pub fn from_dense(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut triplets = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            check_len(n, row.len())?;
            for (j, &w) in row.iter().enumerate() {
                if w != 0.0 {
                    triplets.push((i, j, w));
                }
            }
        }
        Self::from_triplets_symmetric(n, &triplets)
    }

    fn check_symmetric(&self, tol: f64) -> Result<()> {
        if self.n_rows != self.n_cols {
            return Err(Error::InvalidMatrix("symmetric matrix must be square".into()));
        }
        for i in 0..self.n_rows {
            for (j, w) in self.row(i) {
                let wt = self.get(j, i);
                if (w - wt).abs() > tol {
                    return Err(Error::InvalidMatrix(format!(
                        "asymmetric entry ({i}, {j}): {w} vs {wt}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn row_offsets(&self) -> &[usize] {
        &self.row_offsets
    }

    pub fn col_indices(&self) -> &[usize] {
        &self.col_indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Stored entries of row `i` as `(col, value)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        self.col_indices[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_offsets[i]..self.row_offsets[i + 1];
        match self.col_indices[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.n_rows.min(self.n_cols))
            .map(|i| self.get(i, i))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.n_cols, x.len())?;
        let mut out = vec![0.0; self.n_rows];
        self.matvec_into(x, &mut out);
        Ok(out)
    }

    /// Unchecked `out = M x` for inner loops. Lengths are asserted in debug
    /// builds only.
    pub fn matvec_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(out.len(), self.n_rows);
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            *o = acc;
        }
    }

    /// `xᵀ M x`, summed row by row in the same order as `matvec`.
    pub fn quadratic_form(&self, x: &[f64]) -> Result<f64> {
        if self.n_rows != self.n_cols {
            return Err(Error::InvalidMatrix("quadratic form needs a square matrix".into()));
        }
        check_len(self.n_cols, x.len())?;
        Ok(self.quadratic_form_unchecked(x))
    }

    pub(crate) fn quadratic_form_unchecked(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (i, xi) in x.iter().enumerate() {
            let mut acc = 0.0;
            for k in self.row_offsets[i]..self.row_offsets[i + 1] {
                acc += self.values[k] * x[self.col_indices[k]];
            }
            total += xi * acc;
        }
        total
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut m = self.clone();
        m.values.iter_mut().for_each(|v| *v *= s);
        m
    }

    /// `self + shift·I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let n = self.n_rows;
        let mut triplets = self.triplets();
        triplets.extend((0..n).map(|i| (i, i, shift)));
        let mut m = Self::from_triplets(n, self.n_cols, &triplets)
            .expect("entries of a valid matrix stay in range");
        m.symmetric = self.symmetric;
        m
    }

    /// Block-diagonal `self ⊗ I_k` laid out so that index `i·k + c` addresses
    /// row `i`, block coordinate `c`.
    pub fn kron_identity(&self, k: usize) -> Self {
        let mut triplets = Vec::with_capacity(self.nnz() * k);
        for i in 0..self.n_rows {
            for (j, w) in self.row(i) {
                for c in 0..k {
                    triplets.push((i * k + c, j * k + c, w));
                }
            }
        }
        let mut m = Self::from_triplets(self.n_rows * k, self.n_cols * k, &triplets)
            .expect("kron indices stay in range");
        m.symmetric = self.symmetric;
        m
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.n_rows)
            .flat_map(|i| self.row(i).map(move |(j, w)| (i, j, w)))
            .collect()
    }
}

/// Result of [`spectral_norm_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralEstimate {
    pub value: f64,
    pub iterations: usize,
    /// `false` when `max_iter` ran out before the estimate settled; `value`
    /// is still the best (largest) estimate seen.
    pub converged: bool,
}

/// Estimates `max |λᵢ(M)|` of a symmetric matrix by power iteration from a
/// seeded random start.
///
/// The iterate `‖M x‖` with `‖x‖ = 1` is nondecreasing for symmetric `M`,
/// so the estimate approaches the spectral norm from below.
pub fn spectral_norm_estimate(
    m: &SparseMatrix,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<SpectralEstimate> {
    if m.n_rows() != m.n_cols() {
        return Err(Error::InvalidMatrix("spectral norm needs a square matrix".into()));
    }
    let n = m.n_rows();
    if n == 0 || m.is_zero() {
        return Ok(SpectralEstimate {
            value: 0.0,
            iterations: 0,
            converged: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut y = vec![0.0; n];
    let mut estimate = 0.0_f64;
    let mut prev_delta = 0.0_f64;
    for it in 1..=max_iter {
        m.matvec_into(&x, &mut y);
        let value = norm2(&y);
        if value == 0.0 {
            // Start landed in the null space; the matrix is nonzero so restart
            // along a basis direction.
            x.iter_mut().for_each(|v| *v = 0.0);
            x[it % n] = 1.0;
            continue;
        }
        let prev = estimate;
        estimate = estimate.max(value);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / value;
        }
        // Aitken-style tail: with geometric convergence at ratio r the
        // remaining error is about delta·r/(1 − r), which stays honest when
        // the two largest magnitudes are close.
        let delta = (value - prev).abs();
        let ratio = if prev_delta > 0.0 { (delta / prev_delta).min(0.999_999) } else { 0.0 };
        prev_delta = delta;
        if it > 2 && delta * (1.0 + ratio / (1.0 - ratio)) <= 1e-2 * tol * value {
            return Ok(SpectralEstimate {
                value: estimate,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(SpectralEstimate {
        value: estimate,
        iterations: max_iter,
        converged: false,
    })
}

/// Spectral-norm estimate with the default settings used across the crate.
pub(crate) fn norm_estimate(m: &SparseMatrix) -> f64 {
    spectral_norm_estimate(m, 1e-8, 20_000, 0)
        .map(|e| e.value)
        .unwrap_or(0.0)
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn p3_laplacian() -> SparseMatrix {
        SparseMatrix::from_dense(&[
            vec![1.0, -1.0, 0.0],
            vec![-1.0, 2.0, -1.0],
            vec![0.0, -1.0, 1.0],
        ])
        .unwrap()
    }

    fn c4_laplacian() -> SparseMatrix {
        let mut t = Vec::new();
        for (u, v) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            t.extend([(u, u, 1.0), (v, v, 1.0), (u, v, -1.0), (v, u, -1.0)]);
        }
        SparseMatrix::from_triplets_symmetric(4, &t).unwrap()
    }

    /// Cyclic Jacobi eigenvalue oracle for small dense symmetric matrices.
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if off < 1e-24 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i][i]).collect()
    }

    #[test]
    fn matvec_examples() {
        let id = SparseMatrix::identity(3);
        assert_eq!(id.matvec(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let z = SparseMatrix::zeros(3);
        assert_eq!(z.matvec(&[4.0, -1.0, 2.0]).unwrap(), vec![0.0; 3]);
        assert_eq!(p3_laplacian().matvec(&[1.0; 3]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let err = SparseMatrix::identity(3).matvec(&[1.0, 2.0]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, got: 2 });
        assert!(SparseMatrix::identity(3).quadratic_form(&[1.0]).is_err());
    }

    #[test]
    fn quadratic_form_examples() {
        assert_eq!(p3_laplacian().quadratic_form(&[1.0, -1.0, 1.0]).unwrap(), 8.0);
        assert_eq!(c4_laplacian().quadratic_form(&[1.0, 1.0, -1.0, -1.0]).unwrap(), 8.0);
        assert_eq!(c4_laplacian().quadratic_form(&[0.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn duplicates_are_summed_and_symmetry_validated() {
        let m = SparseMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (0, 1, 2.0), (1, 0, 3.0)]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.nnz(), 2);
        assert!(SparseMatrix::from_triplets_symmetric(2, &[(0, 1, 1.0)]).is_err());
        assert!(SparseMatrix::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
        assert!(Vector::new(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn csr_layout_invariants() {
        let m = c4_laplacian();
        let offs = m.row_offsets();
        assert_eq!(offs.len(), 5);
        assert!(offs.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(*offs.last().unwrap(), m.nnz());
        for i in 0..4 {
            let cols = &m.col_indices()[offs[i]..offs[i + 1]];
            assert!(cols.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn spectral_examples() {
        let tol = 1e-8;
        let d = spectral_norm_estimate(&SparseMatrix::diagonal(&[3.0, 1.0, 2.0]), tol, 10_000, 0).unwrap();
        assert!((d.value - 3.0).abs() <= 3.0 * tol, "{d:?}");
        let k3 = SparseMatrix::from_dense(&[
            vec![0.0, 1.0, 1.0],
            vec![1.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ])
        .unwrap();
        let e = spectral_norm_estimate(&k3, tol, 10_000, 0).unwrap();
        assert!((e.value - 2.0).abs() <= 2.0 * tol, "{e:?}");
        assert_eq!(spectral_norm_estimate(&SparseMatrix::zeros(4), tol, 10, 0).unwrap().value, 0.0);
    }

    #[test]
    fn spectral_estimate_is_deterministic() {
        let m = c4_laplacian();
        let a = spectral_norm_estimate(&m, 1e-6, 1000, 7).unwrap();
        let b = spectral_norm_estimate(&m, 1e-6, 1000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spectral_estimate_matches_jacobi_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tol = 1e-6;
        for trial in 0..200 {
            let n = 1 + trial % 8;
            let mut a = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in i..n {
                    let w: f64 = rng.random_range(-1.0..1.0);
                    a[i][j] = w;
                    a[j][i] = w;
                }
            }
            let exact = jacobi_eigenvalues(a.clone())
                .into_iter()
                .fold(0.0_f64, |m, v| m.max(v.abs()));
            let m = SparseMatrix::from_dense(&a).unwrap();
            let est = spectral_norm_estimate(&m, tol, 200_000, trial as u64).unwrap();
            assert!(
                (est.value - exact).abs() <= tol * exact,
                "trial {trial}: {} vs {exact}",
                est.value
            );
        }
    }

    proptest! {
        #[test]
        fn matvec_is_linear(
            entries in proptest::collection::vec((0usize..6, 0usize..6, -2.0f64..2.0), 0..20),
            x in proptest::collection::vec(-3.0f64..3.0, 6),
            y in proptest::collection::vec(-3.0f64..3.0, 6),
            alpha in -2.0f64..2.0,
            beta in -2.0f64..2.0,
        ) {
            let m = SparseMatrix::from_triplets(6, 6, &entries).unwrap();
            let combo: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect();
            let lhs = m.matvec(&combo).unwrap();
            let mx = m.matvec(&x).unwrap();
            let my = m.matvec(&y).unwrap();
            for i in 0..6 {
                prop_assert!((lhs[i] - (alpha * mx[i] + beta * my[i])).abs() <= 1e-10);
            }
        }

        #[test]
        fn quadratic_form_matches_inner_product(
            entries in proptest::collection::vec((0usize..5, 0usize..5, -2.0f64..2.0), 0..15),
            x in proptest::collection::vec(-3.0f64..3.0, 5),
        ) {
            let m = SparseMatrix::from_triplets(5, 5, &entries).unwrap();
            let q = m.quadratic_form(&x).unwrap();
            let ip = dot(&x, &m.matvec(&x).unwrap());
            prop_assert!((q - ip).abs() <= 1e-12 * (1.0 + q.abs()));
        }
    }
}
