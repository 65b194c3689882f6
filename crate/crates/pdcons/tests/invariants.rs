//! Property tests over randomized graphs, objectives, and stepsize bounds.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdcons::certify::{alpha_bound, t_alpha_limit, t_alpha_table};
use pdcons::graph::{
    check_assumption2, incidence_matrix, spectral, BKind, ConstraintMatrices, NetworkGraph,
};
use pdcons::linalg::{self, Mat};
use pdcons::objective::Objective;

fn arbitrary_graph() -> impl Strategy<Value = NetworkGraph> {
    (3usize..16, 0u64..500, prop::bool::ANY).prop_map(|(n, seed, regular)| {
        if regular && n > 5 {
            NetworkGraph::k_regular_random(n, 4, seed).unwrap()
        } else {
            NetworkGraph::cycle(n).unwrap()
        }
    })
}

proptest! {
    #[test]
    fn incidence_rows_sum_to_zero_exactly(g in arbitrary_graph()) {
        let a: Mat<f64> = incidence_matrix(&g);
        let ones = vec![1.0; g.agent_count()];
        for v in a.matvec(&ones) {
            prop_assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn gram_of_incidence_is_the_laplacian_exactly(g in arbitrary_graph()) {
        let a: Mat<f64> = incidence_matrix(&g);
        let ata = a.transpose().matmul(&a);
        for i in 0..g.agent_count() {
            for j in 0..g.agent_count() {
                let expect = if i == j {
                    g.degree(i) as f64
                } else if g.is_edge(i, j) {
                    -1.0
                } else {
                    0.0
                };
                prop_assert_eq!(ata[(i, j)], expect);
            }
        }
    }

    #[test]
    fn laplacian_family_passes_structural_checks(g in arbitrary_graph(), beta in 0.1f64..5.0) {
        let lap = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        prop_assert!(check_assumption2(&g, &lap.augmentation).is_ok());
        let scaled = ConstraintMatrices::assemble(&g, &BKind::BetaLaplacian(beta)).unwrap();
        prop_assert!(check_assumption2(&g, &scaled.augmentation).is_ok());
    }

    #[test]
    fn non_edge_entries_are_always_rejected(g in arbitrary_graph(), val in 0.01f64..2.0) {
        // Find any non-adjacent pair; cycles of length >= 4 always have one.
        let n = g.agent_count();
        let pair = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .find(|&(i, j)| !g.is_edge(i, j));
        prop_assume!(pair.is_some());
        let (i, j) = pair.unwrap();
        let mut bad = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian)
            .unwrap()
            .augmentation;
        bad[(i, j)] = val;
        bad[(j, i)] = val;
        prop_assert!(check_assumption2(&g, &bad).is_err());
    }

    #[test]
    fn connected_graphs_have_one_small_laplacian_eigenvalue(g in arbitrary_graph()) {
        let m = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
        let eig = linalg::sym_eigen(&m.laplacian());
        let threshold = 1e-9 * eig.max().max(1.0);
        let small = eig.values.iter().filter(|&&v| v.abs() <= threshold).count();
        prop_assert_eq!(small, 1);
    }

    #[test]
    fn alpha_bound_is_positive_and_decreasing_in_smoothness(
        eta in 0.01f64..10.0,
        l in 0.1f64..50.0,
        rho in 0.1f64..20.0,
        t in 1usize..8,
    ) {
        let bound = alpha_bound(eta, l, rho, t).unwrap();
        prop_assert!(bound > 0.0);
        let bigger_l = alpha_bound(eta, l * 1.5, rho, t).unwrap();
        prop_assert!(bigger_l < bound);
    }

    #[test]
    fn t_alpha_products_are_nondecreasing(
        eta in 0.01f64..5.0,
        l in 0.5f64..20.0,
        rho in 0.2f64..10.0,
    ) {
        let table = t_alpha_table(eta, l, rho, 64).unwrap();
        for w in table.windows(2) {
            prop_assert!(w[1].1 >= w[0].1 * (1.0 - 1e-12));
        }
        let limit = t_alpha_limit(eta, l, rho);
        prop_assert!(table.last().unwrap().1 <= limit * (1.0 + 1e-12));
    }
}

#[test]
fn spectral_quantities_are_invariant_under_relabeling() {
    let g = NetworkGraph::k_regular_random(11, 4, 21).unwrap();
    let base = ConstraintMatrices::<f64>::assemble(&g, &BKind::Laplacian).unwrap();
    let s0 = spectral(&g, &base).unwrap();

    let mut rng = ChaCha8Rng::seed_from_u64(500);
    for _ in 0..10 {
        // Random permutation of the vertex labels.
        let n = g.agent_count();
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }
        let edges: Vec<(usize, usize)> =
            g.edges().iter().map(|&(i, j)| (perm[i], perm[j])).collect();
        let relabeled = NetworkGraph::from_edges(n, &edges).unwrap();
        let matrices = ConstraintMatrices::<f64>::assemble(&relabeled, &BKind::Laplacian).unwrap();
        let s = spectral(&relabeled, &matrices).unwrap();
        assert!((s.rho_ata - s0.rho_ata).abs() < 1e-9);
        assert!((s.s_aat - s0.s_aat).abs() < 1e-9);
        assert!((s.rho_b - s0.rho_b).abs() < 1e-9);
    }
}

/// Random obvious-scale objectives for the analytic witnesses.
fn sample_objectives(seed: u64) -> Vec<(Objective<f64>, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let quad = {
        let n = 5;
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..4.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        (Objective::quadratic(&c, &b).unwrap(), 1)
    };
    let logistic = {
        use pdcons::objective::{DataPoint, Dataset};
        let points: Vec<DataPoint<f64>> = (0..30)
            .map(|_| DataPoint {
                features: (0..3).map(|_| rng.random_range(-1.0..1.0)).collect(),
                label: if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            })
            .collect();
        (Objective::logistic(&Dataset::new(points).unwrap(), 3, 0.4).unwrap(), 3)
    };
    vec![quad, logistic]
}

#[test]
fn objective_values_are_midpoint_convex_on_random_segments() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (obj, dim) in sample_objectives(7) {
        for agent in 0..obj.agent_count() {
            for _ in 0..100 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
                let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect();
                let mid: Vec<f64> =
                    x.iter().zip(&y).map(|(&a, &b)| 0.5 * (a + b)).collect();
                let lhs = obj.value(agent, &mid);
                let rhs = 0.5 * (obj.value(agent, &x) + obj.value(agent, &y));
                assert!(lhs <= rhs + 1e-9, "agent {agent}: {lhs} > {rhs}");
            }
        }
    }
}

#[test]
fn gradients_witness_strong_convexity_and_smoothness() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (obj, dim) in sample_objectives(8) {
        for agent in 0..obj.agent_count() {
            let m = obj.strong_convexity(agent);
            let l = obj.smoothness(agent);
            assert!(0.0 < m && m <= l);
            for _ in 0..50 {
                let x: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                let y: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
                let gx = obj.gradient(agent, &x);
                let gy = obj.gradient(agent, &y);
                let dx = linalg::sub(&x, &y);
                let dg = linalg::sub(&gx, &gy);
                let dist_sq = linalg::dot(&dx, &dx);
                assert!(linalg::dot(&dg, &dx) >= m * dist_sq - 1e-9 * dist_sq.max(1.0));
                assert!(linalg::norm2(&dg) <= l * dist_sq.sqrt() + 1e-9);
            }
        }
    }
}

#[test]
fn stacked_gradient_is_block_separable() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (obj, dim) in sample_objectives(9) {
        let n = obj.agent_count();
        let x: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g0 = obj.stacked_gradient(&x);
        for perturbed in 0..n {
            let mut x2 = x.clone();
            for coord in 0..dim {
                x2[perturbed * dim + coord] += rng.random_range(0.1..0.5);
            }
            let g2 = obj.stacked_gradient(&x2);
            for other in 0..n {
                if other == perturbed {
                    continue;
                }
                for coord in 0..dim {
                    assert_eq!(
                        g0[other * dim + coord],
                        g2[other * dim + coord],
                        "perturbing agent {perturbed} leaked into agent {other}"
                    );
                }
            }
        }
    }
}

/// Textbook two-matrix exact first-order recursion used as an independent
/// oracle. Eliminating the dual variable from the primal-dual iteration with
/// one primal step and augmentation `B = beta A'A` gives exactly
///
/// ```text
/// x^1     = W~ x^0 - alpha grad f(x^0)
/// x^{k+1} = (I + W) x^k - W~ x^{k-1} - alpha (grad f(x^k) - grad f(x^{k-1}))
/// ```
///
/// with `W = I - 2 alpha B` and `W~ = (I + W)/2 = I - alpha B`: the dual
/// increment satisfies `lam^k - lam^{k-1} = beta A x^k`, so
/// `alpha A'(lam^k - lam^{k-1}) = alpha B x^k`, and subtracting consecutive
/// primal updates collapses to the two-matrix recursion above.
struct ExtraOracle {
    w: Mat<f64>,
    w_tilde: Mat<f64>,
    alpha: f64,
}

impl ExtraOracle {
    fn new(alpha: f64, b: &Mat<f64>) -> Self {
        let w = b.identity_minus_scaled(2.0 * alpha);
        let w_tilde = b.identity_minus_scaled(alpha);
        Self { w, w_tilde, alpha }
    }

    fn trajectory(&self, x0: &[f64], obj: &Objective<f64>, steps: usize) -> Vec<Vec<f64>> {
        let mut xs = vec![x0.to_vec()];
        let mut first = self.w_tilde.matvec(x0);
        let g0 = obj.stacked_gradient(x0);
        for (v, g) in first.iter_mut().zip(&g0) {
            *v -= self.alpha * g;
        }
        xs.push(first);
        for k in 1..steps {
            let xk = &xs[k];
            let xkm1 = &xs[k - 1];
            let mut next = self.w.matvec(xk);
            for (n, &v) in next.iter_mut().zip(xk.iter()) {
                *n += v; // (I + W) x^k
            }
            let back = self.w_tilde.matvec(xkm1);
            let gk = obj.stacked_gradient(xk);
            let gkm1 = obj.stacked_gradient(xkm1);
            for i in 0..next.len() {
                next[i] -= back[i] + self.alpha * (gk[i] - gkm1[i]);
            }
            xs.push(next);
        }
        xs
    }
}

#[test]
fn single_step_laplacian_multiple_run_matches_extra_oracle() {
    use pdcons::baselines::extra_config;
    use pdcons::engine::{init, CompactEngine, PdEngine};

    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for trial in 0..10 {
        let n = rng.random_range(4..=12);
        let graph = NetworkGraph::cycle(n).unwrap();
        let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..4.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let obj = Objective::quadratic(&c, &b).unwrap();
        let (m, l) = obj.global_moduli();

        // Certified stepsizes keep both recursions contractive, so
        // rounding differences cannot pile up over the comparison window.
        let lap = ConstraintMatrices::<f64>::assemble(&graph, &BKind::Laplacian).unwrap();
        let rho_ata = spectral(&graph, &lap).unwrap().rho_ata;
        let beta =
            rng.random_range(0.3..0.9) * pdcons::certify::beta_bound(m, rho_ata).unwrap();
        let cfg = extra_config(0.0, beta, 1);
        let matrices = ConstraintMatrices::assemble(&graph, &cfg.b_kind).unwrap();
        let spectra = spectral(&graph, &matrices).unwrap();
        let eta = pdcons::certify::default_eta(m, beta, rho_ata, true).unwrap();
        let alpha = rng.random_range(0.3..0.9)
            * alpha_bound(eta, l, spectra.rho_b, 1).unwrap();
        let cfg = extra_config(alpha, beta, 1);

        let x0: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut state = init(&cfg, &graph, &spectra, &obj, x0.clone()).unwrap();
        let engine = CompactEngine::new(&cfg, &matrices);
        let oracle = ExtraOracle::new(alpha, &matrices.augmentation);
        let reference = oracle.trajectory(&x0, &obj, 200);

        for (step, expected) in reference.iter().enumerate().skip(1) {
            engine.step(&mut state, &obj);
            let dev = linalg::max_abs_diff(&state.x, expected);
            assert!(dev <= 1e-8, "trial {trial} step {step}: deviation {dev:.3e}");
        }
    }
}
