//! Graph containers, the five problem builders, and seeded graph generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::linalg::{norm_estimate, SparseMatrix};
use crate::projections::FeasibleSet;
use crate::reformulations::Domain;
use crate::subsolver::QuadraticObjective;

/// Safety factor applied to power-iteration eigenvalue estimates when they
/// are used to make a shifted matrix positive semidefinite.
pub const EIGEN_SAFETY: f64 = 1.01;

/// Undirected weighted graph with edges stored as `(u, v, w)`, `u < v`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl Graph {
    /// Normalizes each edge to `u < v` and merges duplicates by summing
    /// their weights.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) outside {n} nodes")));
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop at node {u}")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidArgument(format!("edge ({u}, {v}) has weight {w}")));
            }
            list.push((u.min(v), u.max(v), w));
        }
        list.sort_by_key(|a| (a.0, a.1));
        let mut edges: Vec<(usize, usize, f64)> = Vec::with_capacity(list.len());
        for (u, v, w) in list {
            match edges.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => edges.push((u, v, w)),
            }
        }
        Ok(Self { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n];
        for &(u, v, w) in &self.edges {
            d[u] += w;
            d[v] += w;
        }
        d
    }

    pub fn adjacency(&self) -> SparseMatrix {
        let triplets: Vec<_> = self
            .edges
            .iter()
            .flat_map(|&(u, v, w)| [(u, v, w), (v, u, w)])
            .collect();
        SparseMatrix::from_triplets_symmetric(self.n, &triplets).expect("graph edges are in range")
    }
}

/// `L = D − W`.
pub fn laplacian(g: &Graph) -> SparseMatrix {
    let mut triplets = Vec::with_capacity(4 * g.edges.len());
    for &(u, v, w) in &g.edges {
        triplets.extend([(u, u, w), (v, v, w), (u, v, -w), (v, u, -w)]);
    }
    SparseMatrix::from_triplets_symmetric(g.n, &triplets).expect("graph edges are in range")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemMeta {
    pub name: String,
    pub n: usize,
    pub provenance: String,
}

/// How the problem's own figure of merit relates to the minimized objective:
/// `score = scale · f(x) + shift` on binary feasible points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Score {
    pub label: String,
    pub scale: f64,
    pub shift: f64,
}

impl Score {
    fn objective() -> Self {
        Self {
            label: "objective".into(),
            scale: 1.0,
            shift: 0.0,
        }
    }
}

/// `min ½xᵀAx + bᵀx + c` over binary points of the given domain that lie in
/// the feasible set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    objective: QuadraticObjective,
    set: FeasibleSet,
    domain: Domain,
    meta: ProblemMeta,
    score: Score,
}

impl ProblemInstance {
    pub fn new(objective: QuadraticObjective, set: FeasibleSet, domain: Domain, name: &str) -> Result<Self> {
        check_len(objective.dim(), set.dim())?;
        set.validate()?;
        let (lo, hi) = domain.values();
        if set.dim() > 0 && set.uniform_bounds() != Some((lo, hi)) {
            return Err(Error::InvalidArgument(format!(
                "box bounds must be [{lo}, {hi}] for the {domain:?} domain"
            )));
        }
        Ok(Self {
            meta: ProblemMeta {
                name: name.into(),
                n: set.dim(),
                provenance: "user".into(),
            },
            objective,
            set,
            domain,
            score: Score::objective(),
        })
    }

    pub fn with_provenance(mut self, provenance: &str) -> Self {
        self.meta.provenance = provenance.into();
        self
    }

    fn with_score(mut self, score: Score) -> Self {
        self.score = score;
        self
    }

    pub fn objective(&self) -> &QuadraticObjective {
        &self.objective
    }

    pub fn set(&self) -> &FeasibleSet {
        &self.set
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    pub fn score_spec(&self) -> &Score {
        &self.score
    }

    pub fn dim(&self) -> usize {
        self.meta.n
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.objective.value(x)
    }

    /// The problem's own figure of merit (cut value, density, modularity…).
    pub fn score(&self, x: &[f64]) -> f64 {
        self.score.scale * self.evaluate(x) + self.score.shift
    }

    /// Equivalent objective and set in `{−1, +1}` coordinates. For zero-one
    /// problems this substitutes `y = (x + 1)/2`, which keeps `f` convex and
    /// exactly preserves its values.
    pub fn pm1_form(&self) -> Result<(QuadraticObjective, FeasibleSet)> {
        match self.domain {
            Domain::Pm1 => Ok((self.objective.clone(), self.set.clone())),
            Domain::ZeroOne => {
                let a = self.objective.matrix();
                let n = self.dim();
                let a1 = a.matvec(&vec![1.0; n])?;
                let b = self.objective.linear();
                let new_b: Vec<f64> = a1.iter().zip(b).map(|(s, bi)| 0.25 * s + 0.5 * bi).collect();
                let new_c = self.objective.constant()
                    + a1.iter().sum::<f64>() / 8.0
                    + b.iter().sum::<f64>() / 2.0;
                let new_a = a.scaled(0.25);
                let lip = self.objective.lipschitz() * 0.25;
                let obj = QuadraticObjective::with_lipschitz(new_a, new_b, new_c, lip)?;
                Ok((obj, self.set.affine_image(2.0, -1.0)))
            }
        }
    }

    /// Maps a `{−1, +1}`-coordinate point back into this problem's domain.
    pub fn from_pm1(&self, x: &[f64]) -> Vec<f64> {
        match self.domain {
            Domain::Pm1 => x.to_vec(),
            Domain::ZeroOne => x.iter().map(|v| (v + 1.0) / 2.0).collect(),
        }
    }
}

/// Balanced graph bisection: minimize the cut quadratic `xᵀLx` subject to
/// `xᵀ1 = 0` over `{−1, +1}ⁿ`.
pub fn build_bisection(g: &Graph) -> Result<ProblemInstance> {
    if !g.n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "balanced bisection needs an even node count, got {}",
            g.n
        )));
    }
    let a = laplacian(g).scaled(2.0);
    let obj = QuadraticObjective::new(a, vec![0.0; g.n], 0.0)?;
    let set = FeasibleSet::uniform(g.n, -1.0, 1.0)?.with_sum(0.0)?;
    ProblemInstance::new(obj, set, Domain::Pm1, "bisection")
}

/// Densest `k`-subgraph in the convexified form `x ᵀ(λI − W)x` with
/// `λ = 1.01 × λ_max(W)`; the score reports `xᵀWx`.
pub fn build_dense_subgraph(g: &Graph, k: usize) -> Result<ProblemInstance> {
    if k > g.n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds {} nodes", g.n)));
    }
    let w = g.adjacency();
    let lambda = EIGEN_SAFETY * norm_estimate(&w);
    let a = w.scaled(-2.0).shifted(2.0 * lambda);
    let obj = QuadraticObjective::new(a, vec![0.0; g.n], 0.0)?;
    let set = FeasibleSet::uniform(g.n, 0.0, 1.0)?.with_sum(k as f64)?;
    Ok(ProblemInstance::new(obj, set, Domain::ZeroOne, "densesub")?.with_score(Score {
        label: "density".into(),
        scale: -1.0,
        shift: lambda * k as f64,
    }))
}

/// Modularity matrix `Q = W − d dᵀ/(2m)` (dense).
pub fn modularity_matrix(g: &Graph) -> Result<SparseMatrix> {
    let m = g.total_weight();
    if m <= 0.0 {
        return Err(Error::InvalidArgument("modularity is undefined for a graph with no edge weight".into()));
    }
    let d = g.degrees();
    let w = g.adjacency();
    let mut triplets = Vec::with_capacity(g.n * g.n);
    for i in 0..g.n {
        for j in 0..g.n {
            triplets.push((i, j, w.get(i, j) - d[i] * d[j] / (2.0 * m)));
        }
    }
    SparseMatrix::from_triplets_symmetric(g.n, &triplets)
}

/// Modularity clustering into `k_clusters` groups over the assignment matrix
/// `Y ∈ {0,1}^{n×k}` with `Y1 = 1`, stored row-major (`y[i·k + c]`).
///
/// The objective is `(1/2m)(λ‖Y‖² − tr(YᵀQY))`; since `‖Y‖² = n` on every
/// feasible assignment, the score `λn/(2m) − f` is the modularity.
pub fn build_modularity(g: &Graph, k_clusters: usize) -> Result<ProblemInstance> {
    if k_clusters < 2 {
        return Err(Error::InvalidArgument("modularity clustering needs at least 2 clusters".into()));
    }
    let q = modularity_matrix(g)?;
    let m = g.total_weight();
    let lambda = EIGEN_SAFETY * norm_estimate(&q);
    let a = q.scaled(-1.0 / m).shifted(lambda / m).kron_identity(k_clusters);
    let dim = g.n * k_clusters;
    let obj = QuadraticObjective::new(a, vec![0.0; dim], 0.0)?;
    let set = FeasibleSet::uniform(dim, 0.0, 1.0)?.with_blocks(k_clusters, 1.0)?;
    Ok(ProblemInstance::new(obj, set, Domain::ZeroOne, "modularity")?.with_score(Score {
        label: "modularity".into(),
        scale: -1.0,
        shift: lambda * g.n as f64 / (2.0 * m),
    }))
}

/// Modularity of a hard clustering given as cluster labels.
pub fn modularity_of_labels(g: &Graph, labels: &[usize]) -> Result<f64> {
    check_len(g.n, labels.len())?;
    let q = modularity_matrix(g)?;
    let m = g.total_weight();
    let mut total = 0.0;
    for i in 0..g.n {
        for (j, qij) in q.row(i) {
            if labels[i] == labels[j] {
                total += qij;
            }
        }
    }
    Ok(total / (2.0 * m))
}

/// Binary Markov random field `½xᵀLx + xᵀb` over `{0,1}ⁿ`.
pub fn build_mrf(g: &Graph, unary: &[f64]) -> Result<ProblemInstance> {
    check_len(g.n, unary.len())?;
    let obj = QuadraticObjective::new(laplacian(g), unary.to_vec(), 0.0)?;
    let set = FeasibleSet::uniform(g.n, 0.0, 1.0)?;
    ProblemInstance::new(obj, set, Domain::ZeroOne, "mrf")
}

/// Segmentation with seeds: minimize `xᵀLx` with foreground nodes pinned to
/// `+1` and background nodes to `−1`.
pub fn build_constrained_segmentation(g: &Graph, fg: &[usize], bg: &[usize]) -> Result<ProblemInstance> {
    if let Some(i) = fg.iter().find(|i| bg.contains(i)) {
        return Err(Error::Infeasible(format!("node {i} is both foreground and background")));
    }
    let pins = fg.iter().map(|&i| (i, 1.0)).chain(bg.iter().map(|&i| (i, -1.0)));
    let set = FeasibleSet::uniform(g.n, -1.0, 1.0)?.with_pins(pins)?;
    let obj = QuadraticObjective::new(laplacian(g).scaled(2.0), vec![0.0; g.n], 0.0)?;
    ProblemInstance::new(obj, set, Domain::Pm1, "seg")
}

/// Seeded synthetic graph families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphKind {
    ErdosRenyi { n: usize, p: f64 },
    /// Erdős–Rényi background with edge probability `p` plus a clique on a
    /// random subset of `clique` nodes.
    PlantedClique { n: usize, clique: usize, p: f64 },
    /// Four Gaussian blobs in the plane joined by a symmetric
    /// `neighbors`-nearest-neighbor graph with weights `exp(−d²/bandwidth²)`.
    FourGaussKnn {
        n: usize,
        neighbors: usize,
        spread: f64,
        bandwidth: f64,
    },
    Cycle { n: usize },
    Path { n: usize },
    Complete { n: usize },
}

pub fn generate(kind: &GraphKind, seed: u64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *kind {
        GraphKind::ErdosRenyi { n, p } => {
            check_probability(p)?;
            Graph::new(n, erdos_renyi_edges(&mut rng, n, p))
        }
        GraphKind::PlantedClique { n, clique, p } => {
            check_probability(p)?;
            if clique > n {
                return Err(Error::InvalidArgument(format!("clique of {clique} in {n} nodes")));
            }
            let mut edges = erdos_renyi_edges(&mut rng, n, p);
            let members = planted_members(&mut rng, n, clique);
            for (a, &u) in members.iter().enumerate() {
                for &v in &members[a + 1..] {
                    if !edges.iter().any(|e| (e.0, e.1) == (u.min(v), u.max(v))) {
                        edges.push((u.min(v), u.max(v), 1.0));
                    }
                }
            }
            Graph::new(n, edges)
        }
        GraphKind::FourGaussKnn {
            n,
            neighbors,
            spread,
            bandwidth,
        } => four_gauss_knn(&mut rng, n, neighbors, spread, bandwidth),
        GraphKind::Cycle { n } => {
            let edges: Vec<_> = match n {
                0 | 1 => Vec::new(),
                2 => vec![(0, 1, 1.0)],
                _ => (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect(),
            };
            Graph::new(n, edges)
        }
        GraphKind::Path { n } => Graph::new(n, (1..n).map(|i| (i - 1, i, 1.0))),
        GraphKind::Complete { n } => {
            Graph::new(n, (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v, 1.0))))
        }
    }
}

/// Nodes of the clique planted by `generate(PlantedClique { .. }, seed)`.
pub fn planted_clique_members(n: usize, clique: usize, p: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    erdos_renyi_edges(&mut rng, n, p);
    let mut members = planted_members(&mut rng, n, clique);
    members.sort_unstable();
    members
}

fn planted_members(rng: &mut ChaCha8Rng, n: usize, clique: usize) -> Vec<usize> {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    nodes.truncate(clique);
    nodes
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("edge probability {p} outside [0, 1]")))
    }
}

fn erdos_renyi_edges(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<(usize, usize, f64)> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random::<f64>() < p {
                edges.push((u, v, 1.0));
            }
        }
    }
    edges
}

fn four_gauss_knn(
    rng: &mut ChaCha8Rng,
    n: usize,
    neighbors: usize,
    spread: f64,
    bandwidth: f64,
) -> Result<Graph> {
    if !(spread > 0.0) || !(bandwidth > 0.0) {
        return Err(Error::InvalidArgument("spread and bandwidth must be positive".into()));
    }
    let centers = [(-2.0, -2.0), (-2.0, 2.0), (2.0, -2.0), (2.0, 2.0)];
    let noise = Normal::new(0.0, spread).expect("positive spread");
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let (cx, cy) = centers[i % 4];
            (cx + noise.sample(rng), cy + noise.sample(rng))
        })
        .collect();
    let d2 = |i: usize, j: usize| {
        let dx = points[i].0 - points[j].0;
        let dy = points[i].1 - points[j].1;
        dx * dx + dy * dy
    };
    let mut edges = Vec::with_capacity(n * neighbors);
    for i in 0..n {
        let mut others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        others.sort_by(|&a, &b| d2(i, a).total_cmp(&d2(i, b)).then(a.cmp(&b)));
        for &j in others.iter().take(neighbors) {
            edges.push((i.min(j), i.max(j), (-d2(i, j) / (bandwidth * bandwidth)).exp()));
        }
    }
    // Symmetric kNN: keep each pair once even when both ends selected it.
    edges.sort_by_key(|a| (a.0, a.1));
    edges.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
    Graph::new(n, edges)
}

/// The synthetic stand-in for the four-cluster bisection benchmark used by
/// the convergence checks: 200 nodes, 10-NN.
pub fn four_gauss_default() -> GraphKind {
    GraphKind::FourGaussKnn {
        n: 200,
        neighbors: 10,
        spread: 0.7,
        bandwidth: 1.0,
    }
}
