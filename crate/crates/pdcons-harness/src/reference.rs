//! Internally computed reference solutions: the consensus optimum by closed
//! form or centralized damped Newton, and the matching minimum-norm dual.

use pdcons::graph::{min_norm_dual, ConstraintMatrices};
use pdcons::linalg::{damped_newton, norm2, NewtonOptions};
use pdcons::objective::Objective;

use crate::{HarnessError, Result};

/// Reference solution of a consensus instance.
#[derive(Debug, Clone)]
pub struct Reference {
    /// The shared optimum, one block of dimension `d`.
    pub consensus: Vec<f64>,
    /// The optimum stacked across all agents.
    pub x_star: Vec<f64>,
    /// Minimum-norm dual solving `A' lam = -grad f(x*)` blockwise.
    pub lam_star: Vec<f64>,
}

/// Compute the consensus optimum to gradient norm `1e-12`: closed form for
/// all-quadratic bundles, centralized damped Newton otherwise.
pub fn reference_solution(
    objective: &Objective<f64>,
    matrices: &ConstraintMatrices<f64>,
) -> Result<Reference> {
    let consensus = if let Some((c, b)) = objective.quadratic_coefficients() {
        let num: f64 = c.iter().zip(&b).map(|(&ci, &bi)| ci * bi).sum();
        let den: f64 = c.iter().sum();
        vec![num / den]
    } else {
        let opts = NewtonOptions { grad_tol: 1e-12, max_iters: 500, ..Default::default() };
        damped_newton(
            vec![0.0; objective.dim()],
            |y| objective.central_value(y),
            |y| objective.central_gradient(y),
            |y| objective.central_hessian(y),
            &opts,
        )
        .map_err(|e| HarnessError::Core(pdcons::Error::ReferenceFailure(e.to_string())))?
    };

    let n = objective.agent_count();
    let mut x_star = Vec::with_capacity(n * consensus.len());
    for _ in 0..n {
        x_star.extend_from_slice(&consensus);
    }

    let grad = objective.stacked_gradient(&x_star);
    let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
    let lam_star = min_norm_dual(matrices, &rhs, objective.dim());
    Ok(Reference { consensus, x_star, lam_star })
}

/// Residual of the stationarity system the reference must satisfy:
/// `grad f(x*) + A' lam* = 0`.
pub fn stationarity_residual(
    objective: &Objective<f64>,
    matrices: &ConstraintMatrices<f64>,
    reference: &Reference,
) -> f64 {
    let grad = objective.stacked_gradient(&reference.x_star);
    let pull = pdcons::linalg::block_apply(
        &matrices.incidence.transpose(),
        &reference.lam_star,
        objective.dim(),
    );
    let resid: Vec<f64> = grad.iter().zip(&pull).map(|(&g, &p)| g + p).collect();
    norm2(&resid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use pdcons::graph::{BKind, NetworkGraph};
    use pdcons::objective::{DataPoint, Dataset};

    #[test]
    fn quadratic_reference_is_the_weighted_mean() {
        let g = NetworkGraph::path(2).unwrap();
        let matrices = ConstraintMatrices::assemble(&g, &BKind::Laplacian).unwrap();
        let obj = Objective::quadratic(&[1.0, 3.0], &[4.0, 0.0]).unwrap();
        let r = reference_solution(&obj, &matrices).unwrap();
        assert!((r.consensus[0] - 1.0).abs() < 1e-14);
        assert_eq!(r.x_star, vec![1.0, 1.0]);
        assert!(stationarity_residual(&obj, &matrices, &r) < 1e-10);
    }

    #[test]
    fn strong_regularization_pulls_logistic_reference_to_zero() {
        let points = vec![
            DataPoint { features: vec![0.4, -0.1], label: 1.0 },
            DataPoint { features: vec![-0.3, 0.2], label: -1.0 },
        ];
        let data = Dataset::new(points).unwrap();
        let obj = Objective::logistic(&data, 2, 1000.0).unwrap();
        let g = NetworkGraph::path(2).unwrap();
        let matrices = ConstraintMatrices::assemble(&g, &BKind::Laplacian).unwrap();
        let r = reference_solution(&obj, &matrices).unwrap();
        assert!(norm2(&r.consensus) < 1e-3, "reference {:?}", r.consensus);
        assert!(stationarity_residual(&obj, &matrices, &r) < 1e-9);
    }

    #[test]
    fn separable_data_still_has_unique_minimizer() {
        // Perfectly separable data: the regularizer keeps the optimum finite
        // and Newton converges to it.
        let data = Dataset::new(vec![
            DataPoint { features: vec![1.0], label: 1.0 },
            DataPoint { features: vec![1.0], label: 1.0 },
        ])
        .unwrap();
        let obj = Objective::logistic(&data, 2, 0.1).unwrap();
        let g = NetworkGraph::path(2).unwrap();
        let matrices = ConstraintMatrices::assemble(&g, &BKind::Laplacian).unwrap();
        let r = reference_solution(&obj, &matrices).unwrap();
        assert!(r.consensus[0].is_finite());
        assert!(r.consensus[0] > 0.0);
        assert!(stationarity_residual(&obj, &matrices, &r) < 1e-9);
    }
}
