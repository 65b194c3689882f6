//! Experiment drivers: assemble instances from config, compute references,
//! run the requested algorithms, and collect records and series.

use pdcons::baselines;
use pdcons::certify::{
    alpha_bound, beta_bound, check_contraction, check_gradient_identity, check_descent_inequality, check_dual_error_bound,
    default_eta, rate_delta, spectral_suite, RateCertificate, TheoryContext,
};
use pdcons::engine::{
    build_mn, init, run, CompactEngine, ConfigEcho, PdConfig, RunOptions, StopRule, Trajectory,
};
use pdcons::graph::{spectral, BKind, ConstraintMatrices, NetworkGraph, SpectralBounds};
use pdcons::objective::{load_libsvm, Objective};

use crate::config::{
    AlgoName, AlgorithmSpec, AlphaMode, AugmentationKind, BetaMode, ExperimentConfig,
    ExperimentKind, GraphSpec, ObjectiveSpec, Topology,
};
use crate::records::{averages, AverageRecord, ResultRecord, SeriesPoint};
use crate::reference::{reference_solution, Reference};
use crate::synth::synthetic_classification;
use crate::{HarnessError, Result};

pub fn build_graph(spec: &GraphSpec, n: usize, seed: u64) -> Result<NetworkGraph> {
    let g = match spec.topology {
        Topology::Cycle => NetworkGraph::cycle(n)?,
        Topology::KRegular => NetworkGraph::k_regular_random(n, spec.k, seed)?,
        Topology::Path => NetworkGraph::path(n)?,
        Topology::Complete => NetworkGraph::complete(n)?,
        Topology::Edges => {
            let edges = spec
                .edges
                .as_ref()
                .ok_or_else(|| HarnessError::Config("edges topology without edges".into()))?;
            NetworkGraph::from_edges(n, edges)?
        }
    };
    Ok(g)
}

pub fn build_objective(spec: &ObjectiveSpec, n: usize, seed: u64) -> Result<Objective<f64>> {
    let obj = match spec {
        ObjectiveSpec::Quadratic { c_range, b_range } => {
            Objective::random_quadratic_ranged(n, seed, *c_range, *b_range)
        }
        ObjectiveSpec::Logistic { dataset_path, nu, subsample, subsample_seed } => {
            let mut data = load_libsvm::<f64>(dataset_path)?;
            if let Some(count) = subsample {
                data = data.subsample(*count, *subsample_seed);
            }
            Objective::logistic(&data, n, *nu)?
        }
        ObjectiveSpec::SyntheticLogistic { points, dim, seed: data_seed, nu } => {
            let data = synthetic_classification(*points, *dim, *data_seed);
            Objective::logistic(&data, n, *nu)?
        }
    };
    Ok(obj)
}

/// A fully resolved primal-dual configuration for one `(instance, T)` pair.
pub struct ResolvedPd {
    pub cfg: PdConfig<f64>,
    pub matrices: ConstraintMatrices<f64>,
    pub spectra: SpectralBounds<f64>,
    pub eta: f64,
    pub beta_laplacian: bool,
    pub certificate: Option<RateCertificate<f64>>,
}

/// Resolve stepsizes for the primal-dual engine. The dual stepsize follows
/// the `T`-rule or a manual value; the primal stepsize is the theoretical
/// bound scaled by a safety factor or a manual value. When the augmentation
/// is a Laplacian multiple, the freshness parameter defaults to the midpoint
/// of `(0, 2m)` (the interval after the dual bound is dropped), otherwise to
/// the midpoint of `(0, 2m - beta rho(A'A))`.
pub fn resolve_pd(
    alg: &AlgorithmSpec,
    t: usize,
    g: &NetworkGraph,
    obj: &Objective<f64>,
) -> Result<ResolvedPd> {
    let beta = match alg.beta {
        BetaMode::TRule => t as f64,
        BetaMode::Manual { value } => value,
    };
    if beta <= 0.0 {
        return Err(HarnessError::Config(format!("beta must be positive, got {beta}")));
    }
    let kind = match alg.b_kind {
        AugmentationKind::Laplacian => BKind::Laplacian,
        AugmentationKind::BetaLaplacian => BKind::BetaLaplacian(beta),
    };
    let beta_laplacian = kind.is_beta_laplacian(beta);
    let matrices = ConstraintMatrices::assemble(g, &kind)?;
    let spectra = spectral(g, &matrices)?;
    let (m, l) = obj.global_moduli();

    let eta = default_eta(m, beta, spectra.rho_ata, beta_laplacian)
        .map_err(HarnessError::Core)?;
    let alpha = match alg.alpha {
        AlphaMode::Theorem { safety } => {
            safety * alpha_bound(eta, l, spectra.rho_b, t).map_err(HarnessError::Core)?
        }
        AlphaMode::Manual { value } => value,
    };

    let cfg = PdConfig { alpha, beta, primal_steps: t, b_kind: kind, dim: obj.dim() };
    let certificate = build_mn(alpha, &matrices.augmentation, t).ok().and_then(|(m_mat, n_mat)| {
        rate_delta(
            alpha,
            beta,
            t,
            m,
            l,
            eta,
            &spectra,
            &m_mat,
            &n_mat,
            &matrices.laplacian(),
            beta_laplacian,
        )
        .ok()
    });
    Ok(ResolvedPd { cfg, matrices, spectra, eta, beta_laplacian, certificate })
}

fn pd_trajectory(
    resolved: &ResolvedPd,
    g: &NetworkGraph,
    obj: &Objective<f64>,
    x0: Vec<f64>,
    stop: &StopRule<f64>,
    opts: &RunOptions,
    name: &str,
) -> Result<Trajectory<f64>> {
    let state = init(&resolved.cfg, g, &resolved.spectra, obj, x0)?;
    let engine = CompactEngine::new(&resolved.cfg, &resolved.matrices);
    let echo = ConfigEcho {
        algorithm: name.to_string(),
        alpha: resolved.cfg.alpha,
        beta: resolved.cfg.beta,
        primal_steps: resolved.cfg.primal_steps,
        dim: resolved.cfg.dim,
    };
    Ok(run(&engine, state, obj, stop, opts, echo)?)
}

/// Smoothness-based stepsize default for the mixing-matrix baselines, which
/// have no certified bound in this codebase.
fn baseline_alpha(alg: &AlgorithmSpec, obj: &Objective<f64>) -> f64 {
    match alg.alpha {
        AlphaMode::Manual { value } => value,
        AlphaMode::Theorem { safety } => {
            let (_, l) = obj.global_moduli();
            safety / l
        }
    }
}

struct RunContext<'a> {
    n: usize,
    seed: u64,
    graph: &'a NetworkGraph,
    objective: &'a Objective<f64>,
    reference: &'a Reference,
    stop: StopRule<f64>,
    opts: RunOptions,
}

fn make_record(
    ctx: &RunContext<'_>,
    algorithm: &str,
    t: usize,
    traj: &Trajectory<f64>,
    resolved: Option<&ResolvedPd>,
) -> ResultRecord {
    let gnorm_error = resolved.and_then(|r| r.certificate.as_ref()).map(|cert| {
        cert.metric
            .error_sq(
                &traj.final_x,
                &traj.final_lambda,
                &ctx.reference.x_star,
                &ctx.reference.lam_star,
                ctx.objective.dim(),
            )
            .sqrt()
    });
    ResultRecord {
        run_id: format!("n{:03}_s{:05}_{algorithm}_T{t:02}", ctx.n, ctx.seed),
        algorithm: algorithm.to_string(),
        t,
        n: ctx.n,
        seed: ctx.seed,
        iter: traj.iterations,
        comm_rounds: traj.final_comm_rounds,
        grad_evals: traj.final_grad_evals,
        rel_error: traj.final_rel_error(),
        gnorm_error,
        consensus_gap: traj.final_consensus_gap(),
        steps_to_eps: traj.steps_to_eps,
        comms_to_eps: traj.comms_to_eps,
        delta_certified: resolved
            .and_then(|r| r.certificate.as_ref())
            .map(|c| c.delta),
    }
}

/// Flag a failed run (divergence or unresolvable stepsizes) without
/// aborting the experiment: infinite error, no reached markers.
fn flagged_record(ctx: &RunContext<'_>, algorithm: &str, t: usize) -> ResultRecord {
    ResultRecord {
        run_id: format!("n{:03}_s{:05}_{algorithm}_T{t:02}", ctx.n, ctx.seed),
        algorithm: algorithm.to_string(),
        t,
        n: ctx.n,
        seed: ctx.seed,
        iter: 0,
        comm_rounds: 0,
        grad_evals: 0,
        rel_error: f64::INFINITY,
        gnorm_error: None,
        consensus_gap: f64::INFINITY,
        steps_to_eps: None,
        comms_to_eps: None,
        delta_certified: None,
    }
}

fn push_series(points: &mut Vec<SeriesPoint>, traj: &Trajectory<f64>, name: &str, t: usize) {
    for s in &traj.snapshots {
        points.push(SeriesPoint {
            algorithm: name.to_string(),
            t,
            iter: s.iter,
            comm_rounds: s.comm_rounds,
            rel_error: s.rel_error,
        });
    }
}

fn run_algorithms_on_instance(
    cfg: &ExperimentConfig,
    ctx: &RunContext<'_>,
    records: &mut Vec<ResultRecord>,
    series: &mut Vec<SeriesPoint>,
) -> Result<()> {
    let dim = ctx.objective.dim();
    let x0 = vec![0.0; ctx.n * dim];

    // The mixing matrix is shared by all gossip baselines on this instance.
    let needs_mixing = cfg.algorithms.iter().any(|a| {
        matches!(a.name, AlgoName::Diging | AlgoName::NearDgdPlus | AlgoName::Dgd)
    });
    let mixing = needs_mixing.then(|| baselines::metropolis_weights::<f64>(ctx.graph));

    for alg in &cfg.algorithms {
        match alg.name {
            AlgoName::Pd | AlgoName::Extra => {
                let name = alg.name.as_str();
                let ts: Vec<usize> =
                    if alg.name == AlgoName::Extra { vec![1] } else { alg.t_values.clone() };
                for t in ts {
                    let mut spec = alg.clone();
                    if alg.name == AlgoName::Extra {
                        spec.b_kind = AugmentationKind::BetaLaplacian;
                    }
                    match resolve_pd(&spec, t, ctx.graph, ctx.objective) {
                        Ok(resolved) => {
                            match pd_trajectory(
                                &resolved,
                                ctx.graph,
                                ctx.objective,
                                x0.clone(),
                                &ctx.stop,
                                &ctx.opts,
                                name,
                            ) {
                                Ok(traj) => {
                                    push_series(series, &traj, name, t);
                                    records.push(make_record(ctx, name, t, &traj, Some(&resolved)));
                                }
                                Err(HarnessError::Core(pdcons::Error::Divergence(_))) => {
                                    records.push(flagged_record(ctx, name, t));
                                }
                                Err(e) => return Err(e),
                            }
                        }
                        Err(HarnessError::Core(pdcons::Error::InvalidEta(_))) => {
                            records.push(flagged_record(ctx, name, t));
                        }
                        Err(e) => return Err(e),
                    }
                }
            }
            AlgoName::Mm => {
                let t = alg.t_values[0];
                let beta = match alg.beta {
                    BetaMode::TRule => t as f64,
                    BetaMode::Manual { value } => value,
                };
                let matrices = ConstraintMatrices::assemble(ctx.graph, &BKind::Laplacian)?;
                match baselines::method_of_multipliers(
                    ctx.objective,
                    &matrices,
                    beta,
                    alg.inner_tol,
                    x0.clone(),
                    &ctx.stop,
                    &ctx.opts,
                ) {
                    Ok(traj) => {
                        push_series(series, &traj, "mm", 0);
                        records.push(make_record(ctx, "mm", 0, &traj, None));
                    }
                    Err(pdcons::Error::Divergence(_)) => {
                        records.push(flagged_record(ctx, "mm", 0));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            AlgoName::Diging | AlgoName::NearDgdPlus | AlgoName::Dgd => {
                let w = mixing.as_ref().expect("mixing matrix built above");
                let alpha = baseline_alpha(alg, ctx.objective);
                let name = alg.name.as_str();
                let result = match alg.name {
                    AlgoName::Diging => baselines::run_gradient_tracking(
                        x0.clone(),
                        w,
                        alpha,
                        ctx.objective,
                        &ctx.stop,
                        &ctx.opts,
                    ),
                    AlgoName::NearDgdPlus => baselines::run_near_dgd_plus(
                        x0.clone(),
                        w,
                        alpha,
                        ctx.objective,
                        &ctx.stop,
                        &ctx.opts,
                    ),
                    AlgoName::Dgd => baselines::run_dgd(
                        x0.clone(),
                        w,
                        alpha,
                        ctx.objective,
                        &ctx.stop,
                        &ctx.opts,
                    ),
                    _ => unreachable!(),
                };
                match result {
                    Ok(traj) => {
                        push_series(series, &traj, name, 0);
                        records.push(make_record(ctx, name, 0, &traj, None));
                    }
                    Err(pdcons::Error::Divergence(_)) => {
                        records.push(flagged_record(ctx, name, 0));
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
    }
    Ok(())
}

/// Output of the multi-seed quadratic sweep.
#[derive(Debug)]
pub struct SweepOutput {
    pub records: Vec<ResultRecord>,
    pub averages: Vec<AverageRecord>,
}

/// Sweep random quadratic instances over network sizes and seeds, running
/// every configured algorithm on each instance.
pub fn run_quadratic_sweep(cfg: &ExperimentConfig) -> Result<SweepOutput> {
    let mut records = Vec::new();
    for &n in &cfg.graph.n {
        for seed in cfg.graph.seeds.iter() {
            let graph = build_graph(&cfg.graph, n, seed)?;
            let objective = build_objective(&cfg.objective, n, seed)?;
            let ref_matrices = ConstraintMatrices::assemble(&graph, &BKind::Laplacian)?;
            let reference = reference_solution(&objective, &ref_matrices)?;
            let ctx = RunContext {
                n,
                seed,
                graph: &graph,
                objective: &objective,
                reference: &reference,
                stop: StopRule {
                    max_iters: cfg.stopping.max_iters,
                    epsilon: cfg.stopping.epsilon,
                    x_star: reference.x_star.clone(),
                },
                opts: RunOptions { record_states: false, snapshot_stride: u64::MAX },
            };
            let mut discard = Vec::new();
            run_algorithms_on_instance(cfg, &ctx, &mut records, &mut discard)?;
        }
    }
    let averages = averages(&records);
    Ok(SweepOutput { records, averages })
}

/// Output of a comparison or single run: per-iteration series plus final records.
#[derive(Debug)]
pub struct CompareOutput {
    pub records: Vec<ResultRecord>,
    pub series: Vec<SeriesPoint>,
}

/// Run every configured algorithm once on one instance, recording the full
/// relative-error series against iterations and communication rounds.
pub fn run_compare(cfg: &ExperimentConfig) -> Result<CompareOutput> {
    let n = cfg.graph.n[0];
    let seed = cfg.graph.seeds.start;
    let graph = build_graph(&cfg.graph, n, seed)?;
    let objective = build_objective(&cfg.objective, n, seed)?;
    let ref_matrices = ConstraintMatrices::assemble(&graph, &BKind::Laplacian)?;
    let reference = reference_solution(&objective, &ref_matrices)?;
    let ctx = RunContext {
        n,
        seed,
        graph: &graph,
        objective: &objective,
        reference: &reference,
        stop: StopRule {
            max_iters: cfg.stopping.max_iters,
            epsilon: cfg.stopping.epsilon,
            x_star: reference.x_star.clone(),
        },
        opts: RunOptions { record_states: false, snapshot_stride: 1 },
    };
    let mut records = Vec::new();
    let mut series = Vec::new();
    run_algorithms_on_instance(cfg, &ctx, &mut records, &mut series)?;
    Ok(CompareOutput { records, series })
}

/// Result of the certificate verification pipeline.
#[derive(Debug)]
pub struct CertifyOutput {
    pub passed: bool,
    pub report: String,
    pub delta: f64,
    pub worst_ratio: Option<f64>,
}

/// Compute the rate certificate for the first configured algorithm (which
/// must be the primal-dual method), run a monitored trajectory, and check
/// the contraction plus every supporting identity and inequality.
pub fn run_certify(cfg: &ExperimentConfig) -> Result<CertifyOutput> {
    let n = cfg.graph.n[0];
    let seed = cfg.graph.seeds.start;
    let graph = build_graph(&cfg.graph, n, seed)?;
    let objective = build_objective(&cfg.objective, n, seed)?;

    let alg = &cfg.algorithms[0];
    if !matches!(alg.name, AlgoName::Pd | AlgoName::Extra) {
        return Err(HarnessError::Config(
            "certify expects the first algorithm to be pd or extra".into(),
        ));
    }
    let t = alg.t_values[0];
    let resolved = resolve_pd(alg, t, &graph, &objective)?;
    let (m, l) = objective.global_moduli();

    let mut report = String::new();
    let beta_max = beta_bound(m, resolved.spectra.rho_ata).map_err(HarnessError::Core)?;
    report.push_str(&format!(
        "instance: n={n} seed={seed} T={t} alpha={} beta={} (beta_max={beta_max})\n",
        resolved.cfg.alpha, resolved.cfg.beta
    ));
    if resolved.beta_laplacian {
        report.push_str(
            "regime: augmentation is a Laplacian multiple; dual stepsize upper bound is removable\n",
        );
    }
    if resolved.cfg.beta >= beta_max {
        if alg.enforce_beta_bound || !resolved.beta_laplacian {
            return Err(HarnessError::Core(pdcons::Error::StepsizeViolation(format!(
                "beta = {} >= beta_max = {beta_max} (enforced; removable only with \
enforce_beta_bound=false in the Laplacian-multiple regime)",
                resolved.cfg.beta
            ))));
        }
        report.push_str("note: beta above the removable bound, accepted by configuration\n");
    }

    // The gate: a certificate must exist before anything runs.
    let (m_mat, n_mat) = build_mn(resolved.cfg.alpha, &resolved.matrices.augmentation, t)?;
    let ata = resolved.matrices.laplacian();
    let cert = rate_delta(
        resolved.cfg.alpha,
        resolved.cfg.beta,
        t,
        m,
        l,
        resolved.eta,
        &resolved.spectra,
        &m_mat,
        &n_mat,
        &ata,
        resolved.beta_laplacian,
    )?;
    report.push_str(&format!(
        "certificate: delta={} contraction_factor={} d_star={} eta={}\n",
        cert.delta,
        cert.contraction_factor(),
        cert.d_star,
        cert.eta
    ));

    let ref_matrices = ConstraintMatrices::assemble(&graph, &BKind::Laplacian)?;
    let reference = reference_solution(&objective, &ref_matrices)?;
    let stop = StopRule {
        max_iters: cfg.stopping.max_iters,
        epsilon: cfg.stopping.epsilon,
        x_star: reference.x_star.clone(),
    };
    let traj = pd_trajectory(
        &resolved,
        &graph,
        &objective,
        vec![0.0; n * objective.dim()],
        &stop,
        &RunOptions { record_states: true, snapshot_stride: 1 },
        alg.name.as_str(),
    )?;
    report.push_str(&format!(
        "trajectory: {} iterations, final rel_error {}\n",
        traj.iterations,
        traj.final_rel_error()
    ));

    let mut passed = true;

    let contraction =
        check_contraction(&traj, &cert, &reference.x_star, &reference.lam_star, objective.dim(), 1e-9)?;
    let ok = contraction.passed();
    passed &= ok;
    report.push_str(&format!(
        "contraction: {} ({} steps, worst ratio {:?}, {} violations)\n",
        if ok { "PASS" } else { "FAIL" },
        contraction.steps_checked,
        contraction.worst_ratio,
        contraction.violations.len()
    ));

    let theory = TheoryContext {
        m_mat: &m_mat,
        n_mat: &n_mat,
        ata: &ata,
        incidence: &resolved.matrices.incidence,
        alpha: resolved.cfg.alpha,
        beta: resolved.cfg.beta,
        dim: objective.dim(),
        x_star: &reference.x_star,
        lam_star: &reference.lam_star,
    };
    let mut worst_identity = 0.0f64;
    let mut descent_failures = 0usize;
    let mut dual_bound_failures = 0usize;
    for pair in traj.snapshots.windows(2) {
        let id = check_gradient_identity(&theory, &objective, &pair[0].x, &pair[1].x, &pair[1].lambda);
        worst_identity = worst_identity.max(id.relative());
        let c3 = check_descent_inequality(
            &theory,
            m,
            l,
            resolved.eta,
            &pair[0].x,
            &pair[0].lambda,
            &pair[1].x,
            &pair[1].lambda,
            1e-9,
        );
        if !c3.holds {
            descent_failures += 1;
        }
        let c4 = check_dual_error_bound(
            &theory,
            l,
            resolved.spectra.s_aat,
            2.0,
            cert.e_opt,
            cert.g_opt,
            &pair[0].x,
            &pair[1].x,
            &pair[1].lambda,
            1e-9,
        );
        if !c4.holds {
            dual_bound_failures += 1;
        }
    }
    let id_ok = worst_identity <= 1e-10;
    passed &= id_ok;
    report.push_str(&format!(
        "gradient identity: {} (worst relative residual {worst_identity:.3e})\n",
        if id_ok { "PASS" } else { "FAIL" }
    ));
    passed &= descent_failures == 0;
    report.push_str(&format!(
        "descent inequality: {} ({descent_failures} violations)\n",
        if descent_failures == 0 { "PASS" } else { "FAIL" }
    ));
    passed &= dual_bound_failures == 0;
    report.push_str(&format!(
        "dual-error bound: {} ({dual_bound_failures} violations)\n",
        if dual_bound_failures == 0 { "PASS" } else { "FAIL" }
    ));

    let suite = spectral_suite(resolved.cfg.alpha, &resolved.matrices.augmentation, t)?;
    let suite_ok = suite.satisfied(1e-12, 1e-10);
    passed &= suite_ok;
    report.push_str(&format!(
        "spectral suite: {} (M spectrum [{}, {}] within [{}, {}], N min eig {})\n",
        if suite_ok { "PASS" } else { "FAIL" },
        suite.m_eig_min,
        suite.m_eig_max,
        suite.m_bound_low,
        suite.m_bound_high,
        suite.n_eig_min
    ));
    report.push_str(&format!("overall: {}\n", if passed { "PASS" } else { "FAIL" }));

    Ok(CertifyOutput { passed, report, delta: cert.delta, worst_ratio: contraction.worst_ratio })
}

/// Dispatch on the experiment kind declared in the config.
pub fn expected_kind(sub: &str) -> Option<ExperimentKind> {
    match sub {
        "run" => Some(ExperimentKind::SingleRun),
        "sweep" => Some(ExperimentKind::QuadraticSweep),
        "compare" => Some(ExperimentKind::LogisticCompare),
        "certify" => Some(ExperimentKind::Certify),
        _ => None,
    }
}
