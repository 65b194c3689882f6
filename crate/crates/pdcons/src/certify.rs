//! Executable certificates for the linear convergence theory.
//!
//! The admissible stepsize region is
//!
//! ```text
//! 0 < beta < 2m / rho(A'A)
//! 0 < alpha < (1 - (L^2 / (L^2 + eta rho(B)))^(1/T)) / rho(B)
//! ```
//!
//! for any `eta` in `(0, 2m - beta rho(A'A))`. Inside it, the iteration
//! contracts in the weighted norm with `G = blockdiag(M, (alpha/beta) I)` by
//! a factor `1/(1 + delta)` per step. [`rate_delta`] computes the guaranteed
//! `delta` as the best crossing of the two bounds the analysis yields, and
//! the `check_*` monitors re-evaluate the supporting identities and
//! inequalities along actual trajectories.
//!
//! When the augmentation is an exact multiple of the Laplacian
//! (`B = beta A'A`), the upper bound on `beta` is droppable and the `eta`
//! interval widens to `(0, 2m)`; the certificate records that regime.

use crate::engine::Trajectory;
use crate::error::{Error, Result};
use crate::graph::SpectralBounds;
use crate::linalg::{self, block_apply, block_quad_form, sym_eigen, Mat};
use crate::objective::Objective;
use crate::scalar::{cast, Scalar};

/// Largest admissible dual stepsize, `2m / rho(A'A)`.
pub fn beta_bound<T: Scalar>(m: T, rho_ata: T) -> Result<T> {
    if m <= T::zero() || rho_ata <= T::zero() {
        return Err(Error::InvalidInput(format!(
            "moduli must be positive: m = {m}, rho(A'A) = {rho_ata}"
        )));
    }
    Ok(cast::<T>(2.0) * m / rho_ata)
}

/// Upper end of the admissible `eta` interval.
pub fn eta_cap<T: Scalar>(m: T, beta: T, rho_ata: T, beta_laplacian: bool) -> T {
    if beta_laplacian {
        cast::<T>(2.0) * m
    } else {
        cast::<T>(2.0) * m - beta * rho_ata
    }
}

/// Midpoint of the admissible `eta` interval.
pub fn default_eta<T: Scalar>(m: T, beta: T, rho_ata: T, beta_laplacian: bool) -> Result<T> {
    let cap = eta_cap(m, beta, rho_ata, beta_laplacian);
    if cap <= T::zero() {
        return Err(Error::InvalidEta(format!(
            "admissible interval is empty: 2m - beta rho(A'A) = {cap}"
        )));
    }
    Ok(cap * cast::<T>(0.5))
}

/// Reject an `eta` outside its admissible interval.
pub fn check_eta<T: Scalar>(eta: T, m: T, beta: T, rho_ata: T, beta_laplacian: bool) -> Result<()> {
    let cap = eta_cap(m, beta, rho_ata, beta_laplacian);
    if eta <= T::zero() || eta >= cap {
        return Err(Error::InvalidEta(format!("eta = {eta} outside (0, {cap})")));
    }
    Ok(())
}

/// Largest admissible primal stepsize for the given `eta`, smoothness, and
/// augmentation spectral radius. Evaluated in a cancellation-free form.
pub fn alpha_bound<T: Scalar>(eta: T, l: T, rho_b: T, primal_steps: usize) -> Result<T> {
    if eta <= T::zero() || l <= T::zero() || rho_b <= T::zero() || primal_steps == 0 {
        return Err(Error::InvalidInput(format!(
            "need eta, L, rho(B) > 0 and T >= 1; got eta = {eta}, L = {l}, rho(B) = {rho_b}, T = {primal_steps}"
        )));
    }
    // 1 - (L^2 / (L^2 + eta rho(B)))^(1/T) = -expm1(-ln1p(q) / T), q = eta rho(B) / L^2.
    let q = eta * rho_b / (l * l);
    let y = q.ln_1p() / cast(primal_steps as f64);
    Ok(-(-y).exp_m1() / rho_b)
}

/// Limit of `T * alpha_bound(T)` as the number of primal steps grows.
pub fn t_alpha_limit<T: Scalar>(eta: T, l: T, rho_b: T) -> T {
    (eta * rho_b / (l * l)).ln_1p() / rho_b
}

/// `(T, T * alpha_bound(T))` for `T` in `1..=t_max`; the products are
/// nondecreasing and approach [`t_alpha_limit`].
pub fn t_alpha_table<T: Scalar>(eta: T, l: T, rho_b: T, t_max: usize) -> Result<Vec<(usize, T)>> {
    (1..=t_max)
        .map(|t| Ok((t, cast::<T>(t as f64) * alpha_bound(eta, l, rho_b, t)?)))
        .collect()
}

/// Weighted norm used by the contraction guarantee:
/// `|z|_G^2 = x' (M x) + (alpha/beta) |lam|^2`, applied blockwise.
#[derive(Debug, Clone)]
pub struct GMetric<T> {
    pub primal_weight: Mat<T>,
    pub dual_weight: T,
}

impl<T: Scalar> GMetric<T> {
    pub fn error_sq(&self, x: &[T], lam: &[T], x_star: &[T], lam_star: &[T], dim: usize) -> T {
        let dx = linalg::sub(x, x_star);
        let dl = linalg::sub(lam, lam_star);
        block_quad_form(&self.primal_weight, &dx, dim) + self.dual_weight * linalg::dot(&dl, &dl)
    }
}

/// Admissible stepsize bounds and the guaranteed contraction constant.
#[derive(Debug, Clone)]
pub struct RateCertificate<T> {
    pub beta_max: T,
    pub eta: T,
    pub alpha_max: T,
    /// Guaranteed rate constant: per-step contraction factor `1/(1+delta)`.
    pub delta: T,
    /// Splitting parameter at which the two rate bounds cross.
    pub d_star: T,
    /// Optimal Young parameter for the primal-difference term.
    pub e_opt: T,
    /// Optimal Young parameter for the distance-to-solution term.
    pub g_opt: T,
    /// Whether the augmentation is an exact `beta`-multiple of the Laplacian,
    /// which lifts the upper bound on `beta`.
    pub beta_laplacian_regime: bool,
    pub metric: GMetric<T>,
}

impl<T: Scalar> RateCertificate<T> {
    pub fn contraction_factor(&self) -> T {
        T::one() / (T::one() + self.delta)
    }
}

/// Compute the guaranteed rate constant for in-bounds stepsizes.
///
/// The two upper bounds on `delta` move in opposite directions as the
/// splitting parameter `d > 1` grows (the first falls as `1/d`, the second
/// rises from zero), so the best guarantee sits at their crossing, located
/// here by bisection on `(1, 1e6]` to relative tolerance `1e-8`.
#[allow(clippy::too_many_arguments)]
pub fn rate_delta<T: Scalar>(
    alpha: T,
    beta: T,
    primal_steps: usize,
    m: T,
    l: T,
    eta: T,
    spectra: &SpectralBounds<T>,
    m_mat: &Mat<T>,
    n_mat: &Mat<T>,
    ata: &Mat<T>,
    beta_laplacian_regime: bool,
) -> Result<RateCertificate<T>> {
    let beta_max = beta_bound(m, spectra.rho_ata)?;
    if beta <= T::zero() || (!beta_laplacian_regime && beta >= beta_max) {
        return Err(Error::StepsizeViolation(format!(
            "beta = {beta} outside (0, {beta_max})"
        )));
    }
    check_eta(eta, m, beta, spectra.rho_ata, beta_laplacian_regime)?;
    let alpha_max = alpha_bound(eta, l, spectra.rho_b, primal_steps)?;
    if alpha <= T::zero() || alpha >= alpha_max {
        return Err(Error::StepsizeViolation(format!(
            "alpha = {alpha} outside (0, {alpha_max})"
        )));
    }

    let t_real = cast::<T>(primal_steps as f64);
    let s = spectra.s_aat;

    // Smallest eigenvalue bound of M: (1 - a rho(B))^T / sum_{t<T} (1 - a rho(B))^t.
    let mu = T::one() - alpha * spectra.rho_b;
    let mu_t = mu.powi(primal_steps as i32);
    let geom_sum = (T::one() - mu_t) / (alpha * spectra.rho_b);
    let m_low = mu_t / geom_sum;

    let rho_m = sym_eigen(m_mat).values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let excess = ata.scale(beta).sub(n_mat);
    let rho_excess = sym_eigen(&excess).values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));

    let e_opt = T::one() + rho_m / (alpha * l);
    let g_opt = T::one() + rho_excess / l;

    // First bound, decreasing in d.
    let lead = alpha * beta * (m_low - alpha * l * l / eta) * s;
    let denom1 = (T::one() / t_real + alpha * l) * (T::one() / t_real + alpha * l);
    let delta1 = move |d: T| lead / (d * denom1);

    // Second bound, increasing in d. In the beta-Laplacian regime the
    // -alpha beta rho(A'A) term is absorbed by the augmentation and drops.
    let num2 = if beta_laplacian_regime {
        beta * (cast::<T>(2.0) * alpha * m - alpha * eta)
    } else {
        beta * (cast::<T>(2.0) * alpha * m - alpha * eta - alpha * beta * spectra.rho_ata)
    };
    let quad = (rho_excess + l) * (rho_excess + l);
    let delta2 =
        move |d: T| num2 / (d / (d - T::one()) * alpha / s * quad + beta / t_real);

    if lead <= T::zero() || num2 <= T::zero() {
        return Err(Error::CertificationFailure(format!(
            "rate bounds are nonpositive (lead = {lead}, num2 = {num2}) for in-bounds stepsizes"
        )));
    }

    let mut lo = T::one() + cast::<T>(1e-9);
    let mut hi = cast::<T>(1e6);
    let crossing = |d: T| delta2(d) - delta1(d);
    let d_star = if crossing(hi) <= T::zero() {
        hi
    } else {
        // crossing(lo) < 0 by construction: delta2 -> 0 as d -> 1.
        let rel_tol = cast::<T>(1e-8);
        while (hi - lo) > rel_tol * lo {
            let mid = (hi + lo) * cast::<T>(0.5);
            if crossing(mid) <= T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (hi + lo) * cast::<T>(0.5)
    };
    let delta = delta1(d_star).min(delta2(d_star));
    if delta <= T::zero() {
        return Err(Error::CertificationFailure(format!(
            "no positive rate constant at d = {d_star}"
        )));
    }

    Ok(RateCertificate {
        beta_max,
        eta,
        alpha_max,
        delta,
        d_star,
        e_opt,
        g_opt,
        beta_laplacian_regime,
        metric: GMetric { primal_weight: m_mat.clone(), dual_weight: alpha / beta },
    })
}

/// One contraction violation along a trajectory.
#[derive(Debug, Clone)]
pub struct ContractionViolation<T> {
    pub iter: u64,
    pub prev_error_sq: T,
    pub next_error_sq: T,
}

/// Result of re-checking the guaranteed contraction along a trajectory.
#[derive(Debug, Clone)]
pub struct ContractionReport<T> {
    /// Worst observed one-step ratio of squared G-errors.
    pub worst_ratio: Option<T>,
    pub violations: Vec<ContractionViolation<T>>,
    pub steps_checked: usize,
}

impl<T> ContractionReport<T> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verify `|z^{k+1} - z*|_G^2 <= |z^k - z*|_G^2 / (1 + delta) + slack` at
/// every recorded step. The trajectory must have been recorded with states.
pub fn check_contraction<T: Scalar>(
    traj: &Trajectory<T>,
    cert: &RateCertificate<T>,
    x_star: &[T],
    lam_star: &[T],
    dim: usize,
    slack: T,
) -> Result<ContractionReport<T>> {
    if traj.snapshots.iter().any(|s| s.x.is_empty()) {
        return Err(Error::InvalidInput(
            "contraction check needs a trajectory recorded with states".into(),
        ));
    }
    let factor = cert.contraction_factor();
    let mut worst: Option<T> = None;
    let mut violations = Vec::new();
    let mut steps = 0usize;

    for pair in traj.snapshots.windows(2) {
        let prev = cert.metric.error_sq(&pair[0].x, &pair[0].lambda, x_star, lam_star, dim);
        let next = cert.metric.error_sq(&pair[1].x, &pair[1].lambda, x_star, lam_star, dim);
        steps += 1;
        if prev > T::zero() {
            let ratio = next / prev;
            worst = Some(worst.map_or(ratio, |w| w.max(ratio)));
        }
        if next > prev * factor + slack {
            violations.push(ContractionViolation {
                iter: pair[1].iter,
                prev_error_sq: prev,
                next_error_sq: next,
            });
        }
    }
    Ok(ContractionReport { worst_ratio: worst, violations, steps_checked: steps })
}

/// Matrices and constants shared by the per-step inequality monitors.
pub struct TheoryContext<'a, T> {
    pub m_mat: &'a Mat<T>,
    pub n_mat: &'a Mat<T>,
    /// `A'A`.
    pub ata: &'a Mat<T>,
    /// Incidence matrix `A`.
    pub incidence: &'a Mat<T>,
    pub alpha: T,
    pub beta: T,
    pub dim: usize,
    pub x_star: &'a [T],
    pub lam_star: &'a [T],
}

impl<'a, T: Scalar> TheoryContext<'a, T> {
    /// `(beta A'A - N) v`, applied blockwise.
    fn excess_apply(&self, v: &[T]) -> Vec<T> {
        let a = block_apply(self.ata, v, self.dim);
        let b = block_apply(self.n_mat, v, self.dim);
        a.iter().zip(&b).map(|(&x, &y)| self.beta * x - y).collect()
    }
}

/// Residual of the exact gradient identity
/// `alpha (grad f(x^k) - grad f(x*)) = M (x^k - x^{k+1})
///  + alpha (beta A'A - N)(x^{k+1} - x*) - alpha A' (lam^{k+1} - lam*)`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityResidual<T> {
    /// Max-norm of the difference between the two sides.
    pub residual: T,
    /// Max-norm of the larger side, for relative comparison.
    pub scale: T,
}

impl<T: Scalar> IdentityResidual<T> {
    pub fn relative(&self) -> T {
        self.residual / T::one().max(self.scale)
    }
}

/// Evaluate the gradient identity at one step of a run.
pub fn check_gradient_identity<T: Scalar>(
    ctx: &TheoryContext<'_, T>,
    obj: &Objective<T>,
    x_k: &[T],
    x_k1: &[T],
    lam_k1: &[T],
) -> IdentityResidual<T> {
    let gk = obj.stacked_gradient(x_k);
    let gs = obj.stacked_gradient(ctx.x_star);
    let lhs: Vec<T> = gk.iter().zip(&gs).map(|(&a, &b)| ctx.alpha * (a - b)).collect();

    let m_term = block_apply(ctx.m_mat, &linalg::sub(x_k, x_k1), ctx.dim);
    let excess_term = ctx.excess_apply(&linalg::sub(x_k1, ctx.x_star));
    let at = ctx.incidence.transpose();
    let dual_term = block_apply(&at, &linalg::sub(lam_k1, ctx.lam_star), ctx.dim);

    let mut residual = T::zero();
    let mut scale = T::zero();
    for i in 0..lhs.len() {
        let rhs = m_term[i] + ctx.alpha * excess_term[i] - ctx.alpha * dual_term[i];
        residual = residual.max((lhs[i] - rhs).abs());
        scale = scale.max(lhs[i].abs()).max(rhs.abs());
    }
    IdentityResidual { residual, scale }
}

/// Outcome of a two-sided inequality check.
#[derive(Debug, Clone, Copy)]
pub struct InequalityCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub holds: bool,
}

/// Evaluate the fundamental descent inequality at one step: with any
/// `eta > 0`,
///
/// ```text
/// (x+ - x*)' (2am I - a eta I + 2a (N - bA'A)) (x+ - x*)
///   + (a/b) |lam+ - lam|^2 + (x+ - x)' (M - (a L^2 / eta) I) (x+ - x)
/// <= x-error drop in M-norm + (a/b) * dual-error drop
/// ```
#[allow(clippy::too_many_arguments)]
pub fn check_descent_inequality<T: Scalar>(
    ctx: &TheoryContext<'_, T>,
    m: T,
    l: T,
    eta: T,
    x_k: &[T],
    lam_k: &[T],
    x_k1: &[T],
    lam_k1: &[T],
    tol: T,
) -> InequalityCheck<T> {
    let two = cast::<T>(2.0);
    let dx1 = linalg::sub(x_k1, ctx.x_star);
    let dx0 = linalg::sub(x_k, ctx.x_star);
    let step = linalg::sub(x_k1, x_k);
    let dlam_step = linalg::sub(lam_k1, lam_k);
    let dlam0 = linalg::sub(lam_k, ctx.lam_star);
    let dlam1 = linalg::sub(lam_k1, ctx.lam_star);
    let ratio = ctx.alpha / ctx.beta;

    // (2am - a eta) |dx1|^2 + 2a dx1' (N - bA'A) dx1
    let excess_dx1 = ctx.excess_apply(&dx1);
    let quad_excess = linalg::dot(&dx1, &excess_dx1);
    let dx1_sq = linalg::dot(&dx1, &dx1);
    let mut lhs = (two * ctx.alpha * m - ctx.alpha * eta) * dx1_sq - two * ctx.alpha * quad_excess;
    lhs = lhs + ratio * linalg::dot(&dlam_step, &dlam_step);
    let m_step = block_quad_form(ctx.m_mat, &step, ctx.dim);
    let step_sq = linalg::dot(&step, &step);
    lhs = lhs + m_step - ctx.alpha * l * l / eta * step_sq;

    let rhs = block_quad_form(ctx.m_mat, &dx0, ctx.dim) - block_quad_form(ctx.m_mat, &dx1, ctx.dim)
        + ratio * (linalg::dot(&dlam0, &dlam0) - linalg::dot(&dlam1, &dlam1));

    let scale = T::one().max(lhs.abs()).max(rhs.abs());
    InequalityCheck { lhs, rhs, holds: lhs <= rhs + tol * scale }
}

/// Evaluate the dual-error bound at one step: for any `d, e, g > 1`,
///
/// ```text
/// |lam+ - lam*|^2 <= (d / (a^2 s(AA'))) (e/(e-1) rho(M)^2 + e a^2 L^2) |x - x+|^2
///   + (d / ((d-1) a^2 s(AA'))) ((g/(g-1)) a^2 rho((bA'A - N)^2) + a^2 g L^2) |x+ - x*|^2
/// ```
#[allow(clippy::too_many_arguments)]
pub fn check_dual_error_bound<T: Scalar>(
    ctx: &TheoryContext<'_, T>,
    l: T,
    s_aat: T,
    d: T,
    e: T,
    g: T,
    x_k: &[T],
    x_k1: &[T],
    lam_k1: &[T],
    tol: T,
) -> InequalityCheck<T> {
    debug_assert!(d > T::one() && e > T::one() && g >= T::one());
    let rho_m = sym_eigen(ctx.m_mat).values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let excess = ctx.ata.scale(ctx.beta).sub(ctx.n_mat);
    let rho_excess = sym_eigen(&excess).values.iter().fold(T::zero(), |a, &v| a.max(v.abs()));
    let rho_excess_sq = rho_excess * rho_excess;

    let dlam = linalg::sub(lam_k1, ctx.lam_star);
    let lhs = linalg::dot(&dlam, &dlam);

    let step = linalg::sub(x_k, x_k1);
    let dx1 = linalg::sub(x_k1, ctx.x_star);
    let a2 = ctx.alpha * ctx.alpha;
    let coeff1 = d / (a2 * s_aat) * (e / (e - T::one()) * rho_m * rho_m + e * a2 * l * l);
    // The optimal g degenerates to 1 when the matrix gap vanishes; the
    // g/(g-1) term then has limit zero rather than 0/0.
    let gap_term = if rho_excess_sq == T::zero() {
        T::zero()
    } else {
        g / (g - T::one()) * a2 * rho_excess_sq
    };
    let coeff2 = d / ((d - T::one()) * a2 * s_aat) * (gap_term + a2 * g * l * l);
    let rhs = coeff1 * linalg::dot(&step, &step) + coeff2 * linalg::dot(&dx1, &dx1);

    let scale = T::one().max(lhs.abs()).max(rhs.abs());
    InequalityCheck { lhs, rhs, holds: lhs <= rhs + tol * scale }
}

/// Spectral facts about the analysis matrices for one `(alpha, B, T)` choice.
#[derive(Debug, Clone)]
pub struct SpectralSuiteReport<T> {
    pub m_asymmetry: T,
    pub m_eig_min: T,
    pub m_eig_max: T,
    /// Guaranteed lower bound `(1 - a rho(B))^T / sum_{t<T} (1 - a rho(B))^t`.
    pub m_bound_low: T,
    /// Guaranteed upper bound `1/T`.
    pub m_bound_high: T,
    pub n_eig_min: T,
}

impl<T: Scalar> SpectralSuiteReport<T> {
    pub fn satisfied(&self, sym_tol: T, eig_tol: T) -> bool {
        self.m_asymmetry <= sym_tol
            && self.m_eig_min >= self.m_bound_low - eig_tol
            && self.m_eig_max <= self.m_bound_high + eig_tol
            && self.n_eig_min >= -eig_tol
    }
}

/// Numerically verify the eigenvalue facts behind the rate analysis:
/// `M` symmetric with spectrum inside its guaranteed interval, `N` PSD.
pub fn spectral_suite<T: Scalar>(
    alpha: T,
    b: &Mat<T>,
    primal_steps: usize,
) -> Result<SpectralSuiteReport<T>> {
    let (m_mat, n_mat) = crate::engine::build_mn(alpha, b, primal_steps)?;
    let rho_b = sym_eigen(b).max();
    let mu = T::one() - alpha * rho_b;
    let mu_t = mu.powi(primal_steps as i32);
    let geom_sum = (T::one() - mu_t) / (alpha * rho_b);
    let eig_m = sym_eigen(&m_mat);
    let eig_n = sym_eigen(&n_mat);
    Ok(SpectralSuiteReport {
        m_asymmetry: m_mat.asymmetry(),
        m_eig_min: eig_m.min(),
        m_eig_max: eig_m.max(),
        m_bound_low: mu_t / geom_sum,
        m_bound_high: T::one() / cast(primal_steps as f64),
        n_eig_min: eig_n.min(),
    })
}
