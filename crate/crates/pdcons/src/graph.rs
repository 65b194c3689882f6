//! Agent network topologies and the matrices derived from them.
//!
//! A [`NetworkGraph`] is an undirected, connected, simple graph over `n`
//! agents. Edges are stored as ordered pairs `(i, j)` with `i < j`; the row of
//! the incidence matrix for that edge carries `+1` at column `i` and `-1` at
//! column `j`, so the matrix is reproducible from the edge list alone. Each
//! edge has a unique owning agent (the smaller-index endpoint) that is
//! responsible for updating the corresponding dual variable.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{block_apply, pinv_psd, sym_eigen, Mat};
use crate::scalar::{cast, Scalar};

/// Undirected connected agent graph with oriented edges and dual ownership.
#[derive(Debug, Clone)]
pub struct NetworkGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    owner: Vec<usize>,
}

impl NetworkGraph {
    /// Build a graph from an explicit edge list. Pairs may be given in either
    /// orientation; they are normalized to `i < j`.
    pub fn from_edges(n: usize, raw_edges: &[(usize, usize)]) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!(
                "a network needs at least two agents, got {n}"
            )));
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for &(a, b) in raw_edges {
            if a == b {
                return Err(Error::InvalidTopology(format!("self-loop at agent {a}")));
            }
            if a >= n || b >= n {
                return Err(Error::InvalidTopology(format!(
                    "edge ({a}, {b}) references an agent outside 0..{n}"
                )));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if edges.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidTopology("duplicate edge".into()));
        }

        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in &edges {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let owner = edges.iter().map(|&(i, _)| i).collect();
        let g = Self { n, edges, adjacency, owner };
        if !g.is_connected() {
            return Err(Error::InvalidTopology("graph is disconnected".into()));
        }
        Ok(g)
    }

    /// Cycle over `n >= 3` agents.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidTopology(format!("cycle needs n >= 3, got {n}")));
        }
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, &edges)
    }

    /// Path over `n >= 2` agents.
    pub fn path(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!("path needs n >= 2, got {n}")));
        }
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Self::from_edges(n, &edges)
    }

    /// Complete graph over `n >= 2` agents.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidTopology(format!("complete graph needs n >= 2, got {n}")));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Random `k`-regular graph: agents first form a ring, then the remaining
    /// degree is filled with random chords (a uniformly shuffled stub
    /// matching). Invalid matchings (self-loops, duplicate edges) are
    /// rediscarded wholesale; the whole construction is retried up to a fixed
    /// attempt budget. Deterministic for a given seed.
    pub fn k_regular_random(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k < 2 || !k.is_multiple_of(2) {
            return Err(Error::InvalidTopology(format!(
                "ring-plus-chords construction needs even k >= 2, got {k}"
            )));
        }
        if n <= k {
            return Err(Error::InvalidTopology(format!("need n > k, got n={n}, k={k}")));
        }

        let ring: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        if k == 2 {
            return Self::from_edges(n, &ring);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let extra_per_agent = k - 2;
        const MAX_ATTEMPTS: usize = 1000;

        'attempt: for _ in 0..MAX_ATTEMPTS {
            // One stub per missing unit of degree.
            let mut stubs: Vec<usize> = Vec::with_capacity(n * extra_per_agent);
            for agent in 0..n {
                stubs.extend(std::iter::repeat_n(agent, extra_per_agent));
            }
            stubs.shuffle(&mut rng);

            let mut edges = ring.clone();
            let mut seen: std::collections::HashSet<(usize, usize)> =
                ring.iter().map(|&(i, j)| (i.min(j), i.max(j))).collect();
            for pair in stubs.chunks(2) {
                let (a, b) = (pair[0], pair[1]);
                if a == b {
                    continue 'attempt;
                }
                let e = (a.min(b), a.max(b));
                if !seen.insert(e) {
                    continue 'attempt;
                }
                edges.push(e);
            }

            let g = Self::from_edges(n, &edges)?;
            debug_assert!((0..n).all(|i| g.degree(i) == k));
            return Ok(g);
        }

        Err(Error::ConstructionFailure(format!(
            "no simple {k}-regular graph found for n={n}, seed={seed} within {MAX_ATTEMPTS} attempts"
        )))
    }

    pub fn agent_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(i, j)` pairs with `i < j`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Agent that updates the dual variable of edge `l`.
    pub fn owner(&self, l: usize) -> usize {
        self.owner[l]
    }

    /// Indices of the edges owned by agent `i`.
    pub fn owned_edges(&self, i: usize) -> Vec<usize> {
        (0..self.edges.len()).filter(|&l| self.owner[l] == i).collect()
    }

    /// Indices of the edges incident to agent `i`.
    pub fn incident_edges(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == i || b == i)
            .map(|(l, _)| l)
            .collect()
    }

    fn is_connected(&self) -> bool {
        let mut visited = vec![false; self.n];
        let mut stack = vec![0usize];
        while let Some(v) = stack.pop() {
            if visited[v] {
                continue;
            }
            visited[v] = true;
            stack.extend(self.adjacency[v].iter().copied().filter(|&u| !visited[u]));
        }
        visited.into_iter().all(|v| v)
    }

    /// One `i j` pair per line, 0-indexed.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for &(i, j) in &self.edges {
            out.push_str(&format!("{i} {j}\n"));
        }
        out
    }
}

/// How the augmentation matrix is built.
#[derive(Debug, Clone)]
pub enum BKind<T> {
    /// `B = A'A`, the graph Laplacian.
    Laplacian,
    /// `B = beta * A'A`.
    BetaLaplacian(T),
    /// Caller-supplied matrix, validated against the structural assumptions.
    Custom(Mat<T>),
}

impl<T: Scalar> BKind<T> {
    /// Whether this choice makes the augmentation an exact multiple of `A'A`
    /// with the given dual stepsize (the regime where the dual stepsize upper
    /// bound can be dropped).
    pub fn is_beta_laplacian(&self, beta: T) -> bool {
        match self {
            BKind::Laplacian => beta == T::one(),
            BKind::BetaLaplacian(b) => *b == beta,
            BKind::Custom(_) => false,
        }
    }
}

/// Incidence and augmentation matrices of a network.
#[derive(Debug, Clone)]
pub struct ConstraintMatrices<T> {
    /// Edge-node incidence matrix, one row per edge.
    pub incidence: Mat<T>,
    /// Symmetric PSD augmentation matrix sharing the incidence null space.
    pub augmentation: Mat<T>,
}

impl<T: Scalar> ConstraintMatrices<T> {
    pub fn assemble(g: &NetworkGraph, kind: &BKind<T>) -> Result<Self> {
        let incidence = incidence_matrix(g);
        let augmentation = build_b(g, kind)?;
        Ok(Self { incidence, augmentation })
    }

    /// `A'A`, which equals the graph Laplacian.
    pub fn laplacian(&self) -> Mat<T> {
        self.incidence.transpose().matmul(&self.incidence)
    }
}

/// Edge-node incidence matrix: row `l` for edge `(i, j)` with `i < j` has
/// `+1` at column `i` and `-1` at column `j`.
pub fn incidence_matrix<T: Scalar>(g: &NetworkGraph) -> Mat<T> {
    let mut a = Mat::zeros(g.edge_count(), g.agent_count());
    for (l, &(i, j)) in g.edges().iter().enumerate() {
        a[(l, i)] = T::one();
        a[(l, j)] = -T::one();
    }
    a
}

/// Build the augmentation matrix for the requested kind. Custom matrices are
/// validated; the Laplacian family is valid by construction but checked in
/// debug builds anyway.
pub fn build_b<T: Scalar>(g: &NetworkGraph, kind: &BKind<T>) -> Result<Mat<T>> {
    let b = match kind {
        BKind::Laplacian => laplacian_matrix(g),
        BKind::BetaLaplacian(beta) => {
            if *beta <= T::zero() {
                return Err(Error::InvalidInput(format!(
                    "beta-Laplacian scaling must be positive, got {beta}"
                )));
            }
            laplacian_matrix(g).scale(*beta)
        }
        BKind::Custom(m) => {
            check_assumption2(g, m)?;
            m.clone()
        }
    };
    debug_assert!(check_assumption2(g, &b).is_ok());
    Ok(b)
}

fn laplacian_matrix<T: Scalar>(g: &NetworkGraph) -> Mat<T> {
    let n = g.agent_count();
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        l[(i, i)] = cast(g.degree(i) as f64);
        for &j in g.neighbors(i) {
            l[(i, j)] = -T::one();
        }
    }
    l
}

/// Symmetry tolerance: the double-precision value, degrading gracefully for
/// coarser scalar types.
fn symmetry_tol<T: Scalar>() -> T {
    cast::<T>(1e-12).max(T::epsilon() * cast(1e3))
}

/// Relative threshold below which an eigenvalue counts as zero.
fn zero_eig_tol<T: Scalar>() -> T {
    cast::<T>(1e-9).max(T::epsilon() * cast(1e4))
}

/// Validate a candidate augmentation matrix: symmetric, positive
/// semidefinite, supported on the graph, and with null space equal to the
/// span of the all-ones vector. The error names the first failed check.
pub fn check_assumption2<T: Scalar>(g: &NetworkGraph, b: &Mat<T>) -> Result<()> {
    let n = g.agent_count();
    if b.rows() != n || b.cols() != n {
        return Err(Error::AssumptionViolation {
            check: "shape",
            detail: format!("expected {n}x{n}, got {}x{}", b.rows(), b.cols()),
        });
    }

    let scale = b.max_abs().max(T::one());
    let sym_tol = symmetry_tol::<T>() * scale;
    if b.asymmetry() > sym_tol {
        return Err(Error::AssumptionViolation {
            check: "symmetry",
            detail: format!("max |b_ij - b_ji| = {}", b.asymmetry()),
        });
    }

    for i in 0..n {
        for j in 0..n {
            if i != j && b[(i, j)] != T::zero() && !g.is_edge(i, j) {
                return Err(Error::AssumptionViolation {
                    check: "topology",
                    detail: format!("nonzero entry at non-edge ({i}, {j})"),
                });
            }
        }
    }

    let eig = sym_eigen(b);
    let threshold = zero_eig_tol::<T>() * T::one().max(eig.max());
    if eig.min() < -threshold {
        return Err(Error::AssumptionViolation {
            check: "positive-semidefinite",
            detail: format!("smallest eigenvalue {}", eig.min()),
        });
    }

    // Null space must be exactly span(1): B1 = 0 and a single small eigenvalue.
    let ones = vec![T::one(); n];
    let b_ones = b.matvec(&ones);
    let residual = b_ones.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    if residual > threshold {
        return Err(Error::AssumptionViolation {
            check: "null-space",
            detail: format!("|B 1|_max = {residual}, ones vector not in null space"),
        });
    }
    let small = eig.values.iter().filter(|&&v| v.abs() <= threshold).count();
    if small != 1 {
        return Err(Error::AssumptionViolation {
            check: "null-space",
            detail: format!("expected a one-dimensional null space, found {small} small eigenvalues"),
        });
    }
    Ok(())
}

/// Spectral quantities consumed by the stepsize and rate theory.
#[derive(Debug, Clone, Copy)]
pub struct SpectralBounds<T> {
    /// Largest eigenvalue of the augmentation matrix `B`.
    pub rho_b: T,
    /// Largest eigenvalue of `A'A` (the Laplacian).
    pub rho_ata: T,
    /// Smallest nonzero eigenvalue of `AA'` (equal to that of `A'A`).
    pub s_aat: T,
}

/// Compute spectral bounds with a dense symmetric eigensolver. Eigenvalues
/// below `1e-9 * max(1, lambda_max)` count as zero; a connected graph must
/// show exactly one zero Laplacian eigenvalue.
pub fn spectral<T: Scalar>(
    g: &NetworkGraph,
    matrices: &ConstraintMatrices<T>,
) -> Result<SpectralBounds<T>> {
    if matrices.incidence.cols() != g.agent_count() {
        return Err(Error::InvalidInput(format!(
            "incidence matrix has {} columns for a {}-agent graph",
            matrices.incidence.cols(),
            g.agent_count()
        )));
    }
    let lap = matrices.laplacian();
    let eig_l = sym_eigen(&lap);
    let threshold = zero_eig_tol::<T>() * T::one().max(eig_l.max());

    let zeros = eig_l.values.iter().filter(|&&v| v.abs() <= threshold).count();
    if zeros != 1 {
        return Err(Error::InvalidTopology(format!(
            "expected exactly one zero Laplacian eigenvalue for a connected graph, found {zeros}"
        )));
    }

    let s_aat = eig_l
        .values
        .iter()
        .copied()
        .find(|&v| v > threshold)
        .ok_or_else(|| Error::InvalidTopology("no nonzero Laplacian eigenvalue".into()))?;

    let eig_b = sym_eigen(&matrices.augmentation);
    Ok(SpectralBounds { rho_b: eig_b.max(), rho_ata: eig_l.max(), s_aat })
}

/// Minimum-norm solution of `A' lam = rhs`, applied blockwise over `d`
/// coordinates. The minimum-norm solution is the one lying in the range of
/// `A`, i.e. with zero component in the null space of `A'` — the convention
/// used for optimal dual variables throughout.
pub fn min_norm_dual<T: Scalar>(
    matrices: &ConstraintMatrices<T>,
    rhs: &[T],
    dim: usize,
) -> Vec<T> {
    // lam = A (A'A)^+ rhs solves A' lam = rhs for rhs orthogonal to ones.
    let pinv = pinv_psd(&matrices.laplacian(), cast(1e-12));
    let z = block_apply(&pinv, rhs, dim);
    block_apply(&matrices.incidence, &z, dim)
}

/// Euclidean norm of the component of `lam` in the null space of `A'`
/// (equivalently, outside the range of `A`), blockwise over `d` coordinates.
pub fn dual_null_component<T: Scalar>(
    matrices: &ConstraintMatrices<T>,
    lam: &[T],
    dim: usize,
) -> T {
    let a = &matrices.incidence;
    let pinv = pinv_psd(&matrices.laplacian(), cast(1e-12));
    // Projection onto range(A): A (A'A)^+ A' lam.
    let at_lam = block_apply(&a.transpose(), lam, dim);
    let z = block_apply(&pinv, &at_lam, dim);
    let proj = block_apply(a, &z, dim);
    let mut sq = T::zero();
    for (l, p) in lam.iter().zip(&proj) {
        let r = *l - *p;
        sq = sq + r * r;
    }
    sq.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_cycle_edges() {
        let g = NetworkGraph::cycle(3).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (1, 2)]);
        assert_eq!(g.owner(0), 0);
        assert_eq!(g.owner(2), 1);
    }

    #[test]
    fn cycle_needs_three_vertices() {
        assert!(matches!(NetworkGraph::cycle(2), Err(Error::InvalidTopology(_))));
    }

    #[test]
    fn single_agent_networks_are_rejected() {
        assert!(matches!(NetworkGraph::from_edges(1, &[]), Err(Error::InvalidTopology(_))));
    }

    #[test]
    fn cycle4_laplacian_spectrum() {
        // Cycle eigenvalues are 2 - 2cos(2 pi k / n): {0, 2, 2, 4} for n = 4.
        let g = NetworkGraph::cycle(4).unwrap();
        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let eig = sym_eigen(&m.laplacian());
        let expect = [0.0, 2.0, 2.0, 4.0];
        for (got, want) in eig.values.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "got {got}, want {want}");
        }
    }

    #[test]
    fn k_regular_has_exact_degrees_and_is_deterministic() {
        let g1 = NetworkGraph::k_regular_random(10, 4, 7).unwrap();
        let g2 = NetworkGraph::k_regular_random(10, 4, 7).unwrap();
        assert!((0..10).all(|i| g1.degree(i) == 4));
        assert_eq!(g1.edges(), g2.edges());
    }

    #[test]
    fn four_regular_on_five_vertices_is_complete() {
        let g = NetworkGraph::k_regular_random(5, 4, 3).unwrap();
        let k5 = NetworkGraph::complete(5).unwrap();
        assert_eq!(g.edges(), k5.edges());
    }

    #[test]
    fn k_regular_rejects_infeasible_parameters() {
        assert!(NetworkGraph::k_regular_random(4, 4, 0).is_err()); // n <= k
        assert!(NetworkGraph::k_regular_random(10, 3, 0).is_err()); // odd k
        assert!(NetworkGraph::k_regular_random(10, 0, 0).is_err());
    }

    #[test]
    fn path2_incidence_and_spectra() {
        let g = NetworkGraph::path(2).unwrap();
        let a: Mat<f64> = incidence_matrix(&g);
        assert_eq!(a.rows(), 1);
        assert_eq!(a[(0, 0)], 1.0);
        assert_eq!(a[(0, 1)], -1.0);

        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let lap = m.laplacian();
        assert_eq!(lap[(0, 0)], 1.0);
        assert_eq!(lap[(0, 1)], -1.0);
        let s = spectral(&g, &m).unwrap();
        assert!((s.rho_ata - 2.0).abs() < 1e-12);
        assert!((s.s_aat - 2.0).abs() < 1e-12);
        assert!((s.rho_b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn triangle_laplacian_diagonal_is_degree() {
        let g = NetworkGraph::cycle(3).unwrap();
        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let lap = m.laplacian();
        for i in 0..3 {
            assert_eq!(lap[(i, i)], 2.0);
        }
    }

    #[test]
    fn beta_laplacian_scales() {
        let g = NetworkGraph::path(2).unwrap();
        let b = build_b(&g, &BKind::BetaLaplacian(2.0)).unwrap();
        assert_eq!(b[(0, 0)], 2.0);
        assert_eq!(b[(0, 1)], -2.0);
    }

    #[test]
    fn custom_b_with_non_edge_entry_is_rejected() {
        // Path 0-1-2: entry (0, 2) is not an edge.
        let g = NetworkGraph::path(3).unwrap();
        let mut bad = build_b(&g, &BKind::Laplacian).unwrap();
        bad[(0, 2)] = 0.5;
        bad[(2, 0)] = 0.5;
        match build_b(&g, &BKind::Custom(bad)) {
            Err(Error::AssumptionViolation { check, .. }) => assert_eq!(check, "topology"),
            other => panic!("expected topology violation, got {other:?}"),
        }
    }

    #[test]
    fn custom_b_failing_null_space_is_rejected() {
        // Diagonal matrix is symmetric PSD and trivially topology-compatible,
        // but its null space is empty.
        let g = NetworkGraph::path(2).unwrap();
        let bad = Mat::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        match build_b(&g, &BKind::Custom(bad)) {
            Err(Error::AssumptionViolation { check, .. }) => assert_eq!(check, "null-space"),
            other => panic!("expected null-space violation, got {other:?}"),
        }
    }

    #[test]
    fn cycle4_smallest_nonzero_eigenvalue() {
        let g = NetworkGraph::cycle(4).unwrap();
        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let s = spectral(&g, &m).unwrap();
        assert!((s.s_aat - 2.0).abs() < 1e-12);
    }

    #[test]
    fn complete5_laplacian_top_eigenvalue() {
        // K_n Laplacian spectrum is {0, n, ..., n}.
        let g = NetworkGraph::complete(5).unwrap();
        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let s = spectral(&g, &m).unwrap();
        assert!((s.rho_ata - 5.0).abs() < 1e-11);
    }

    #[test]
    fn edge_list_export_is_zero_indexed_pairs() {
        let g = NetworkGraph::cycle(3).unwrap();
        assert_eq!(g.to_edge_list(), "0 1\n0 2\n1 2\n");
    }
}
