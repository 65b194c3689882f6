//! The multi-primal-step primal-dual iteration, executed two ways.
//!
//! One outer iteration evaluates each agent's gradient once, performs a fixed
//! number of primal updates that reuse that gradient (each update consuming
//! one neighbor-exchange round), and finishes with a dual update on every
//! edge, performed by the owning agent.
//!
//! [`AgentEngine`] runs the message-passing form: agent `i` touches only its
//! own block, its neighbors' blocks, and the duals of incident edges, and the
//! per-agent state is limited to local matrix rows. [`CompactEngine`] runs the
//! equivalent dense recursion
//!
//! ```text
//! x+ = (I - aB)^T x - aC grad f(x) - aC A' lam,      lam+ = lam + b A x+
//! ```
//!
//! with `C = sum_{t<T} (I - aB)^t` precomputed. The two trajectories agree to
//! floating-point accuracy, which the test suites exploit in both directions.
//!
//! Communication accounting: `T` rounds per iteration. The exchange of the
//! final inner iterate doubles as the exchange that seeds the next iteration,
//! and dual values piggyback on primal exchanges. Gradient evaluations: one
//! per agent per iteration, independent of `T`.

use crate::error::{Error, Result};
use crate::graph::{BKind, ConstraintMatrices, NetworkGraph, SpectralBounds};
use crate::linalg::{self, block_apply, Mat};
use crate::objective::Objective;
use crate::scalar::{cast, Scalar};

/// Algorithm parameters.
#[derive(Debug, Clone)]
pub struct PdConfig<T> {
    /// Primal stepsize.
    pub alpha: T,
    /// Dual stepsize.
    pub beta: T,
    /// Primal updates per iteration.
    pub primal_steps: usize,
    /// Augmentation matrix choice.
    pub b_kind: BKind<T>,
    /// Decision dimension per agent.
    pub dim: usize,
}

/// Stacked primal/dual iterate plus execution counters.
#[derive(Debug, Clone)]
pub struct RunState<T> {
    /// Stacked primal iterate: `n` blocks of dimension `d`.
    pub x: Vec<T>,
    /// Stacked dual iterate: one block of dimension `d` per edge.
    pub lambda: Vec<T>,
    /// Outer iteration count.
    pub iter: u64,
    /// Neighbor-exchange rounds consumed so far.
    pub comm_rounds: u64,
    /// Gradient evaluations per agent so far.
    pub grad_evals: u64,
}

/// Initialize a run: duals start at zero, counters at zero.
///
/// Rejects dimension mismatches and stepsizes violating the spectral
/// precondition `alpha * rho(B) < 1` (the boundary is excluded).
pub fn init<T: Scalar>(
    cfg: &PdConfig<T>,
    g: &NetworkGraph,
    spectra: &SpectralBounds<T>,
    obj: &Objective<T>,
    x0: Vec<T>,
) -> Result<RunState<T>> {
    if cfg.dim != obj.dim() {
        return Err(Error::InvalidInput(format!(
            "config dimension {} differs from objective dimension {}",
            cfg.dim,
            obj.dim()
        )));
    }
    if obj.agent_count() != g.agent_count() {
        return Err(Error::InvalidInput(format!(
            "objective has {} agents, graph has {}",
            obj.agent_count(),
            g.agent_count()
        )));
    }
    if x0.len() != g.agent_count() * cfg.dim {
        return Err(Error::InvalidInput(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            g.agent_count() * cfg.dim
        )));
    }
    if cfg.alpha <= T::zero() || cfg.beta <= T::zero() || cfg.primal_steps == 0 {
        return Err(Error::InvalidInput("stepsizes must be positive and T >= 1".into()));
    }
    if cfg.alpha * spectra.rho_b >= T::one() {
        return Err(Error::StepsizeViolation(format!(
            "alpha * rho(B) = {} must be strictly below 1",
            cfg.alpha * spectra.rho_b
        )));
    }
    Ok(RunState {
        x: x0,
        lambda: vec![T::zero(); g.edge_count() * cfg.dim],
        iter: 0,
        comm_rounds: 0,
        grad_evals: 0,
    })
}

/// Observer for the agent-wise engine's remote reads. Lets tests prove that
/// no agent ever touches state outside its own neighborhood.
pub trait AccessMonitor {
    /// Agent `by` read the primal block of agent `of`.
    fn primal_read(&mut self, by: usize, of: usize);
    /// Agent `by` read the dual block of edge `edge`.
    fn dual_read(&mut self, by: usize, edge: usize);
}

/// Monitor that ignores everything.
pub struct NoMonitor;

impl AccessMonitor for NoMonitor {
    fn primal_read(&mut self, _by: usize, _of: usize) {}
    fn dual_read(&mut self, _by: usize, _edge: usize) {}
}

/// A single step of the iteration; implemented by both engines.
pub trait PdEngine<T: Scalar> {
    fn step(&self, state: &mut RunState<T>, obj: &Objective<T>);
}

struct AgentLocal<T> {
    /// `(j, B_ij)` over the agent's closed neighborhood, ascending `j`.
    b_row: Vec<(usize, T)>,
    /// `(edge index, A_{l,i})` over incident edges.
    incident: Vec<(usize, T)>,
    /// Owned edges as `(edge index, smaller endpoint, larger endpoint)`.
    owned: Vec<(usize, usize, usize)>,
}

/// Agent-wise message-passing execution. Each agent holds only its own rows
/// of `B` and `A`; every remote read goes through the [`AccessMonitor`].
pub struct AgentEngine<T> {
    locals: Vec<AgentLocal<T>>,
    alpha: T,
    beta: T,
    primal_steps: usize,
    dim: usize,
}

impl<T: Scalar> AgentEngine<T> {
    pub fn new(cfg: &PdConfig<T>, g: &NetworkGraph, matrices: &ConstraintMatrices<T>) -> Self {
        let n = g.agent_count();
        let b = &matrices.augmentation;
        let locals = (0..n)
            .map(|i| {
                let mut b_row: Vec<(usize, T)> = (0..n)
                    .filter(|&j| b[(i, j)] != T::zero())
                    .map(|j| (j, b[(i, j)]))
                    .collect();
                if b[(i, i)] == T::zero() {
                    // Keep the diagonal slot so the closed neighborhood is explicit.
                    b_row.push((i, T::zero()));
                    b_row.sort_unstable_by_key(|&(j, _)| j);
                }
                let incident = g
                    .incident_edges(i)
                    .into_iter()
                    .map(|l| {
                        let (a, _) = g.edges()[l];
                        (l, if a == i { T::one() } else { -T::one() })
                    })
                    .collect();
                let owned = g
                    .owned_edges(i)
                    .into_iter()
                    .map(|l| {
                        let (a, bb) = g.edges()[l];
                        (l, a, bb)
                    })
                    .collect();
                AgentLocal { b_row, incident, owned }
            })
            .collect();
        Self { locals, alpha: cfg.alpha, beta: cfg.beta, primal_steps: cfg.primal_steps, dim: cfg.dim }
    }

    /// One outer iteration with every remote read reported to `monitor`.
    pub fn step_monitored<M: AccessMonitor>(
        &self,
        state: &mut RunState<T>,
        obj: &Objective<T>,
        monitor: &mut M,
    ) {
        let d = self.dim;
        let n = self.locals.len();
        let alpha = self.alpha;

        // Gradient once per agent, held through all primal updates.
        // h_i = alpha * grad f_i(x_i) + alpha * sum over incident edges of
        // A_{l,i} * lam_l; this part of the update does not change inside the
        // inner loop.
        let mut held = vec![T::zero(); n * d];
        for (i, local) in self.locals.iter().enumerate() {
            let gi = obj.gradient(i, &state.x[i * d..(i + 1) * d]);
            for c in 0..d {
                held[i * d + c] = alpha * gi[c];
            }
            for &(l, sign) in &local.incident {
                monitor.dual_read(i, l);
                for c in 0..d {
                    held[i * d + c] = held[i * d + c] + alpha * sign * state.lambda[l * d + c];
                }
            }
        }
        state.grad_evals += 1;

        // T bulk-synchronous primal updates; each one is one exchange round.
        let mut current = state.x.clone();
        let mut next = vec![T::zero(); n * d];
        for _ in 0..self.primal_steps {
            for (i, local) in self.locals.iter().enumerate() {
                for c in 0..d {
                    let mut mix = T::zero();
                    for &(j, bij) in &local.b_row {
                        if j != i {
                            monitor.primal_read(i, j);
                        }
                        mix = mix + bij * current[j * d + c];
                    }
                    next[i * d + c] = current[i * d + c] - held[i * d + c] - alpha * mix;
                }
            }
            std::mem::swap(&mut current, &mut next);
            state.comm_rounds += 1;
        }
        state.x = current;

        // Dual update by the owning agent; the neighbor's final iterate was
        // already exchanged in the last primal round.
        for (i, local) in self.locals.iter().enumerate() {
            for &(l, a, b) in &local.owned {
                let other = if a == i { b } else { a };
                monitor.primal_read(i, other);
                for c in 0..d {
                    state.lambda[l * d + c] = state.lambda[l * d + c]
                        + self.beta * (state.x[a * d + c] - state.x[b * d + c]);
                }
            }
        }
        state.iter += 1;
    }
}

impl<T: Scalar> PdEngine<T> for AgentEngine<T> {
    fn step(&self, state: &mut RunState<T>, obj: &Objective<T>) {
        self.step_monitored(state, obj, &mut NoMonitor);
    }
}

/// Dense compact-form execution with precomputed matrices.
pub struct CompactEngine<T> {
    /// `(I - alpha B)^T`.
    propagate: Mat<T>,
    /// `alpha * C`.
    gain: Mat<T>,
    incidence: Mat<T>,
    incidence_t: Mat<T>,
    beta: T,
    primal_steps: usize,
    dim: usize,
}

impl<T: Scalar> CompactEngine<T> {
    pub fn new(cfg: &PdConfig<T>, matrices: &ConstraintMatrices<T>) -> Self {
        let b = &matrices.augmentation;
        let step = b.identity_minus_scaled(cfg.alpha);
        let propagate = step.pow(cfg.primal_steps);
        let gain = build_c(cfg.alpha, b, cfg.primal_steps).scale(cfg.alpha);
        Self {
            propagate,
            gain,
            incidence: matrices.incidence.clone(),
            incidence_t: matrices.incidence.transpose(),
            beta: cfg.beta,
            primal_steps: cfg.primal_steps,
            dim: cfg.dim,
        }
    }

    /// `alpha * C`, exposed for fixed-point diagnostics.
    pub fn gain(&self) -> &Mat<T> {
        &self.gain
    }
}

impl<T: Scalar> PdEngine<T> for CompactEngine<T> {
    fn step(&self, state: &mut RunState<T>, obj: &Objective<T>) {
        let d = self.dim;
        let mut force = obj.stacked_gradient(&state.x);
        let dual_pull = block_apply(&self.incidence_t, &state.lambda, d);
        for (f, p) in force.iter_mut().zip(&dual_pull) {
            *f = *f + *p;
        }
        let mut x_new = block_apply(&self.propagate, &state.x, d);
        let correction = block_apply(&self.gain, &force, d);
        for (x, c) in x_new.iter_mut().zip(&correction) {
            *x = *x - *c;
        }
        let flow = block_apply(&self.incidence, &x_new, d);
        for (l, f) in state.lambda.iter_mut().zip(&flow) {
            *l = *l + self.beta * *f;
        }
        state.x = x_new;
        state.iter += 1;
        state.comm_rounds += self.primal_steps as u64;
        state.grad_evals += 1;
    }
}

/// `C = sum_{t=0}^{T-1} (I - alpha B)^t`, the inner-loop accumulation matrix.
pub fn build_c<T: Scalar>(alpha: T, b: &Mat<T>, primal_steps: usize) -> Mat<T> {
    assert!(primal_steps >= 1, "need at least one primal step");
    let step = b.identity_minus_scaled(alpha);
    let mut c = Mat::identity(b.rows());
    let mut term = Mat::identity(b.rows());
    for _ in 1..primal_steps {
        term = term.matmul(&step);
        c = c.add(&term);
    }
    c
}

/// The rate-analysis matrices `M = C^{-1} (I - alpha B)^T` and
/// `N = (C^{-1} - M) / alpha`.
///
/// Requires `alpha * rho(B) < 1` so that `C` is symmetric positive definite;
/// a condition number above `1e12` is reported as degenerate.
pub fn build_mn<T: Scalar>(
    alpha: T,
    b: &Mat<T>,
    primal_steps: usize,
) -> Result<(Mat<T>, Mat<T>)> {
    let c = build_c(alpha, b, primal_steps);
    let eig = linalg::sym_eigen(&c);
    let lam_min = eig.min();
    let lam_max = eig.max();
    if lam_min <= T::zero() || lam_max / lam_min > cast::<T>(1e12) {
        return Err(Error::DegenerateConfiguration(format!(
            "inner accumulation matrix has eigenvalues in [{lam_min}, {lam_max}]"
        )));
    }
    let c_inv = eig.map_rebuild(|v| T::one() / v);
    let propagate = b.identity_minus_scaled(alpha).pow(primal_steps);
    let m = c_inv.matmul(&propagate);
    let n = c_inv.sub(&m).scale(T::one() / alpha);
    Ok((m, n))
}

/// Stopping rule for [`run`]: quit once the relative error against the
/// reference drops below `epsilon`, or after `max_iters` iterations.
#[derive(Debug, Clone)]
pub struct StopRule<T> {
    pub max_iters: u64,
    pub epsilon: T,
    /// Stacked reference solution the relative error is measured against.
    pub x_star: Vec<T>,
}

/// Per-iteration record.
#[derive(Debug, Clone)]
pub struct Snapshot<T> {
    pub iter: u64,
    pub comm_rounds: u64,
    pub grad_evals: u64,
    pub rel_error: T,
    pub consensus_gap: T,
    /// Stacked primal iterate (empty when state recording is off).
    pub x: Vec<T>,
    /// Stacked dual iterate (empty when state recording is off).
    pub lambda: Vec<T>,
}

/// Echo of the parameters a trajectory was produced under.
#[derive(Debug, Clone, Default)]
pub struct ConfigEcho {
    pub algorithm: String,
    pub alpha: f64,
    pub beta: f64,
    pub primal_steps: usize,
    pub dim: usize,
}

/// Recorded run: one snapshot per iteration (including iteration zero),
/// stopping metadata, and the final state.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub snapshots: Vec<Snapshot<T>>,
    pub config: ConfigEcho,
    /// First iteration at which the relative error dropped below epsilon.
    pub steps_to_eps: Option<u64>,
    /// Communication rounds consumed up to that iteration.
    pub comms_to_eps: Option<u64>,
    pub final_x: Vec<T>,
    pub final_lambda: Vec<T>,
    pub iterations: u64,
    pub final_comm_rounds: u64,
    pub final_grad_evals: u64,
}

impl<T: Scalar> Trajectory<T> {
    pub fn final_rel_error(&self) -> T {
        self.snapshots.last().map_or_else(T::zero, |s| s.rel_error)
    }

    pub fn final_consensus_gap(&self) -> T {
        self.snapshots.last().map_or_else(T::zero, |s| s.consensus_gap)
    }
}

/// Knobs for [`run`] recording.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Store full `x`/`lambda` per snapshot (needed by the inequality monitors).
    pub record_states: bool,
    /// Keep every `stride`-th snapshot (iteration 0 and the final iteration
    /// are always kept). `1` keeps everything.
    pub snapshot_stride: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { record_states: true, snapshot_stride: 1 }
    }
}

/// Largest distance of an agent block from the network average, `max_i |x_i - mean_j x_j|`.
pub fn consensus_gap<T: Scalar>(x: &[T], dim: usize) -> T {
    let n = x.len() / dim;
    let mut mean = vec![T::zero(); dim];
    for block in x.chunks(dim) {
        for (m, &v) in mean.iter_mut().zip(block) {
            *m = *m + v;
        }
    }
    let inv_n = T::one() / cast(n as f64);
    for m in mean.iter_mut() {
        *m = *m * inv_n;
    }
    let mut worst = T::zero();
    for block in x.chunks(dim) {
        let gap = block
            .iter()
            .zip(&mean)
            .map(|(&v, &m)| (v - m) * (v - m))
            .sum::<T>()
            .sqrt();
        worst = worst.max(gap);
    }
    worst
}

/// Drive an engine until the stop rule fires. The relative error is
/// `|x^k - x*| / |x^0 - x*|`, with `0/0` defined as `0` so a run started at
/// the reference terminates immediately. Relative errors beyond `1e8` abort
/// with a divergence error naming the configuration.
pub fn run<T: Scalar, E: PdEngine<T>>(
    engine: &E,
    mut state: RunState<T>,
    obj: &Objective<T>,
    stop: &StopRule<T>,
    opts: &RunOptions,
    config: ConfigEcho,
) -> Result<Trajectory<T>> {
    let dim = obj.dim();
    let denom = linalg::norm2(&linalg::sub(&state.x, &stop.x_star));
    let rel = |x: &[T]| -> T {
        if denom == T::zero() {
            T::zero()
        } else {
            linalg::norm2(&linalg::sub(x, &stop.x_star)) / denom
        }
    };

    let stride = opts.snapshot_stride.max(1);
    let mut snapshots = Vec::new();
    let take = |state: &RunState<T>, rel_error: T| Snapshot {
        iter: state.iter,
        comm_rounds: state.comm_rounds,
        grad_evals: state.grad_evals,
        rel_error,
        consensus_gap: consensus_gap(&state.x, dim),
        x: if opts.record_states { state.x.clone() } else { Vec::new() },
        lambda: if opts.record_states { state.lambda.clone() } else { Vec::new() },
    };

    let mut rel_error = rel(&state.x);
    snapshots.push(take(&state, rel_error));
    let mut steps_to_eps = None;
    let mut comms_to_eps = None;
    if rel_error < stop.epsilon {
        steps_to_eps = Some(0);
        comms_to_eps = Some(0);
    } else {
        while state.iter < stop.max_iters {
            engine.step(&mut state, obj);
            rel_error = rel(&state.x);
            if rel_error > cast(1e8) {
                return Err(Error::Divergence(format!(
                    "relative error {rel_error} after {} iterations under {:?}",
                    state.iter, config
                )));
            }
            let crossed = rel_error < stop.epsilon;
            if state.iter.is_multiple_of(stride) || crossed || state.iter == stop.max_iters {
                snapshots.push(take(&state, rel_error));
            }
            if crossed {
                steps_to_eps = Some(state.iter);
                comms_to_eps = Some(state.comm_rounds);
                break;
            }
        }
    }

    Ok(Trajectory {
        snapshots,
        config,
        steps_to_eps,
        comms_to_eps,
        final_x: state.x,
        final_lambda: state.lambda,
        iterations: state.iter,
        final_comm_rounds: state.comm_rounds,
        final_grad_evals: state.grad_evals,
    })
}
