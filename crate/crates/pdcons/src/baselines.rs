//! Comparison algorithms sharing the [`Objective`]/[`NetworkGraph`]
//! interfaces and the [`Trajectory`] record type.
//!
//! The decentralized baselines (gradient tracking, NEAR-DGD+, plain DGD) run
//! over a doubly stochastic mixing matrix; the EXTRA-equivalent method is the
//! primal-dual engine itself with one primal step and a Laplacian-multiple
//! augmentation. The method of multipliers is centralized on purpose: its
//! primal minimization couples all agents through the augmentation term.
//!
//! Communication accounting per iteration: gradient tracking exchanges both
//! its iterate and its tracker (2 rounds), DGD exchanges once, NEAR-DGD+
//! performs `k` consensus rounds at iteration `k`, and the method of
//! multipliers is centralized (0 rounds).

use crate::engine::{consensus_gap, ConfigEcho, PdConfig, RunOptions, Snapshot, StopRule, Trajectory};
use crate::error::{Error, Result};
use crate::graph::{BKind, ConstraintMatrices, NetworkGraph};
use crate::linalg::{self, block_apply, block_quad_form, damped_newton, linear_solve, Mat, NewtonOptions};
use crate::objective::Objective;
use crate::scalar::{cast, Scalar};

/// Parameters that make the primal-dual engine coincide with EXTRA: one
/// primal step per iteration and augmentation `B = beta A'A`.
pub fn extra_config<T: Scalar>(alpha: T, beta: T, dim: usize) -> PdConfig<T> {
    PdConfig { alpha, beta, primal_steps: 1, b_kind: BKind::BetaLaplacian(beta), dim }
}

/// Metropolis mixing weights: `w_ij = 1 / (1 + max(deg_i, deg_j))` on edges,
/// diagonal filled so rows sum to one. Symmetric and doubly stochastic with
/// a simple unit eigenvalue on connected graphs.
pub fn metropolis_weights<T: Scalar>(g: &NetworkGraph) -> Mat<T> {
    let n = g.agent_count();
    let mut w = Mat::zeros(n, n);
    for i in 0..n {
        let mut off_sum = T::zero();
        for &j in g.neighbors(i) {
            let denom = 1 + g.degree(i).max(g.degree(j));
            let wij = T::one() / cast(denom as f64);
            w[(i, j)] = wij;
            off_sum = off_sum + wij;
        }
        w[(i, i)] = T::one() - off_sum;
    }
    w
}

/// One gradient-tracking step:
/// `x+ = W x - alpha y`, `y+ = W y + grad f(x+) - grad f(x)`.
///
/// Requires the tracker to have been initialized as `y^0 = grad f(x^0)`;
/// the network mean of `y` then tracks the mean gradient at every step.
pub fn gradient_tracking_step<T: Scalar>(
    x: &[T],
    y: &[T],
    w: &Mat<T>,
    alpha: T,
    obj: &Objective<T>,
) -> (Vec<T>, Vec<T>) {
    let d = obj.dim();
    let mut x_new = block_apply(w, x, d);
    for (xn, &yi) in x_new.iter_mut().zip(y) {
        *xn = *xn - alpha * yi;
    }
    let g_old = obj.stacked_gradient(x);
    let g_new = obj.stacked_gradient(&x_new);
    let mut y_new = block_apply(w, y, d);
    for i in 0..y_new.len() {
        y_new[i] = y_new[i] + g_new[i] - g_old[i];
    }
    (x_new, y_new)
}

/// One NEAR-DGD+ step at outer iteration `k >= 1`:
/// `x+ = W^k (x - alpha grad f(x))`, costing `k` consensus rounds.
pub fn near_dgd_plus_step<T: Scalar>(
    x: &[T],
    k: usize,
    w: &Mat<T>,
    alpha: T,
    obj: &Objective<T>,
) -> Vec<T> {
    debug_assert!(k >= 1);
    let d = obj.dim();
    let g = obj.stacked_gradient(x);
    let mut v: Vec<T> = x.iter().zip(&g).map(|(&xi, &gi)| xi - alpha * gi).collect();
    for _ in 0..k {
        v = block_apply(w, &v, d);
    }
    v
}

/// One distributed-gradient-descent step: `x+ = W x - alpha grad f(x)`.
pub fn dgd_step<T: Scalar>(x: &[T], w: &Mat<T>, alpha: T, obj: &Objective<T>) -> Vec<T> {
    let d = obj.dim();
    let g = obj.stacked_gradient(x);
    let mut x_new = block_apply(w, x, d);
    for (xn, &gi) in x_new.iter_mut().zip(&g) {
        *xn = *xn - alpha * gi;
    }
    x_new
}

/// Shared driver for the decentralized baselines: `step` advances the iterate
/// at outer iteration `k` (1-based) and reports the exchange rounds consumed.
fn run_loop<T: Scalar>(
    mut x: Vec<T>,
    dim: usize,
    stop: &StopRule<T>,
    opts: &RunOptions,
    config: ConfigEcho,
    mut step: impl FnMut(u64, &[T]) -> Result<(Vec<T>, u64, u64)>,
) -> Result<Trajectory<T>> {
    let denom = linalg::norm2(&linalg::sub(&x, &stop.x_star));
    let rel = |v: &[T]| -> T {
        if denom == T::zero() {
            T::zero()
        } else {
            linalg::norm2(&linalg::sub(v, &stop.x_star)) / denom
        }
    };
    let stride = opts.snapshot_stride.max(1);

    let mut comm_rounds = 0u64;
    let mut grad_evals = 0u64;
    let mut snapshots = Vec::new();
    let take = |x: &[T], iter: u64, comm: u64, grads: u64, rel_error: T| Snapshot {
        iter,
        comm_rounds: comm,
        grad_evals: grads,
        rel_error,
        consensus_gap: consensus_gap(x, dim),
        x: if opts.record_states { x.to_vec() } else { Vec::new() },
        lambda: Vec::new(),
    };

    let mut rel_error = rel(&x);
    snapshots.push(take(&x, 0, 0, 0, rel_error));
    let mut steps_to_eps = None;
    let mut comms_to_eps = None;
    let mut iter = 0u64;
    if rel_error < stop.epsilon {
        steps_to_eps = Some(0);
        comms_to_eps = Some(0);
    } else {
        while iter < stop.max_iters {
            iter += 1;
            let (x_new, comm_inc, grad_inc) = step(iter, &x)?;
            x = x_new;
            comm_rounds += comm_inc;
            grad_evals += grad_inc;
            rel_error = rel(&x);
            if rel_error > cast(1e8) {
                return Err(Error::Divergence(format!(
                    "relative error {rel_error} after {iter} iterations under {config:?}"
                )));
            }
            let crossed = rel_error < stop.epsilon;
            if iter.is_multiple_of(stride) || crossed || iter == stop.max_iters {
                snapshots.push(take(&x, iter, comm_rounds, grad_evals, rel_error));
            }
            if crossed {
                steps_to_eps = Some(iter);
                comms_to_eps = Some(comm_rounds);
                break;
            }
        }
    }

    Ok(Trajectory {
        snapshots,
        config,
        steps_to_eps,
        comms_to_eps,
        final_x: x,
        final_lambda: Vec::new(),
        iterations: iter,
        final_comm_rounds: comm_rounds,
        final_grad_evals: grad_evals,
    })
}

/// Run gradient tracking from `x0` until the stop rule fires.
pub fn run_gradient_tracking<T: Scalar>(
    x0: Vec<T>,
    w: &Mat<T>,
    alpha: T,
    obj: &Objective<T>,
    stop: &StopRule<T>,
    opts: &RunOptions,
) -> Result<Trajectory<T>> {
    let mut y = obj.stacked_gradient(&x0);
    let config = ConfigEcho {
        algorithm: "diging".into(),
        alpha: crate::scalar::to_f64(alpha),
        beta: 0.0,
        primal_steps: 1,
        dim: obj.dim(),
    };
    run_loop(x0, obj.dim(), stop, opts, config, |_, x| {
        let (x_new, y_new) = gradient_tracking_step(x, &y, w, alpha, obj);
        y = y_new;
        Ok((x_new, 2, 1))
    })
}

/// Run NEAR-DGD+ from `x0`; iteration `k` performs `k` consensus rounds, so
/// cumulative communication grows as `k (k + 1) / 2`.
pub fn run_near_dgd_plus<T: Scalar>(
    x0: Vec<T>,
    w: &Mat<T>,
    alpha: T,
    obj: &Objective<T>,
    stop: &StopRule<T>,
    opts: &RunOptions,
) -> Result<Trajectory<T>> {
    let config = ConfigEcho {
        algorithm: "near_dgd_plus".into(),
        alpha: crate::scalar::to_f64(alpha),
        beta: 0.0,
        primal_steps: 1,
        dim: obj.dim(),
    };
    run_loop(x0, obj.dim(), stop, opts, config, |k, x| {
        Ok((near_dgd_plus_step(x, k as usize, w, alpha, obj), k, 1))
    })
}

/// Run constant-stepsize DGD from `x0`. With a fixed stepsize this converges
/// to a neighborhood of the optimum, not to it.
pub fn run_dgd<T: Scalar>(
    x0: Vec<T>,
    w: &Mat<T>,
    alpha: T,
    obj: &Objective<T>,
    stop: &StopRule<T>,
    opts: &RunOptions,
) -> Result<Trajectory<T>> {
    let config = ConfigEcho {
        algorithm: "dgd".into(),
        alpha: crate::scalar::to_f64(alpha),
        beta: 0.0,
        primal_steps: 1,
        dim: obj.dim(),
    };
    run_loop(x0, obj.dim(), stop, opts, config, |_, x| Ok((dgd_step(x, w, alpha, obj), 1, 1)))
}

/// Centralized method of multipliers: each outer iteration minimizes the
/// augmented Lagrangian `f(x) + lam' A x + x' B x / 2` exactly (linear solve
/// for quadratic bundles, damped Newton to `inner_tol` otherwise), then
/// ascends the dual. Not implementable distributedly; serves as the
/// benchmark the primal-dual iterations approximate.
pub fn method_of_multipliers<T: Scalar>(
    obj: &Objective<T>,
    matrices: &ConstraintMatrices<T>,
    beta: T,
    inner_tol: T,
    x0: Vec<T>,
    stop: &StopRule<T>,
    opts: &RunOptions,
) -> Result<Trajectory<T>> {
    let n = matrices.augmentation.rows();
    let d = obj.dim();
    let incidence_t = matrices.incidence.transpose();
    let config = ConfigEcho {
        algorithm: "mm".into(),
        alpha: 0.0,
        beta: crate::scalar::to_f64(beta),
        primal_steps: 1,
        dim: d,
    };

    // Quadratic bundles admit an exact inner solve: (H + B) x = H b - A' lam
    // with H = diag(2 c_i).
    let quadratic = obj.quadratic_coefficients();
    let quad_system = quadratic.as_ref().map(|(c, b)| {
        let mut k = matrices.augmentation.clone();
        let mut hb = vec![T::zero(); n];
        for i in 0..n {
            let h = cast::<T>(2.0) * c[i];
            k[(i, i)] = k[(i, i)] + h;
            hb[i] = h * b[i];
        }
        (k, hb)
    });

    let mut lambda = vec![T::zero(); matrices.incidence.rows() * d];
    let mut x_prev = x0.clone();

    run_loop(x0, d, stop, opts, config, |_, _x| {
        let atl = block_apply(&incidence_t, &lambda, d);

        let (x_new, grad_cost): (Vec<T>, u64) = if let Some((k, hb)) = &quad_system {
            let rhs: Vec<T> = hb.iter().zip(&atl).map(|(&h, &a)| h - a).collect();
            let sol = linear_solve(k, &rhs)
                .map_err(|e| Error::InnerSolveFailure(format!("augmented system: {e}")))?;
            (sol, 1)
        } else {
            let grad_count = std::cell::Cell::new(0u64);
            let value = |x: &[T]| {
                obj.stacked_value(x)
                    + linalg::dot(&atl, x)
                    + block_quad_form(&matrices.augmentation, x, d) * cast::<T>(0.5)
            };
            let gradient = |x: &[T]| {
                grad_count.set(grad_count.get() + 1);
                let mut g = obj.stacked_gradient(x);
                let bx = block_apply(&matrices.augmentation, x, d);
                for i in 0..g.len() {
                    g[i] = g[i] + atl[i] + bx[i];
                }
                g
            };
            let hessian = |x: &[T]| {
                let mut h = Mat::zeros(n * d, n * d);
                for i in 0..n {
                    let hi = obj.hessian(i, &x[i * d..(i + 1) * d]);
                    for a in 0..d {
                        for b in 0..d {
                            h[(i * d + a, i * d + b)] = hi[(a, b)];
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..n {
                        let bij = matrices.augmentation[(i, j)];
                        if bij == T::zero() {
                            continue;
                        }
                        for a in 0..d {
                            h[(i * d + a, j * d + a)] = h[(i * d + a, j * d + a)] + bij;
                        }
                    }
                }
                h
            };
            let newton_opts =
                NewtonOptions { grad_tol: inner_tol, max_iters: 200, ..Default::default() };
            let sol = damped_newton(x_prev.clone(), value, gradient, hessian, &newton_opts)?;
            (sol, grad_count.get())
        };

        let flow = block_apply(&matrices.incidence, &x_new, d);
        for (l, f) in lambda.iter_mut().zip(&flow) {
            *l = *l + beta * *f;
        }
        x_prev = x_new.clone();
        Ok((x_new, 0, grad_cost))
    })
}
