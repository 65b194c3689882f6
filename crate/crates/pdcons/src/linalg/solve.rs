use crate::error::{Error, Result};
use crate::scalar::{cast, Scalar};

use super::{dot, eigen::sym_eigen, Mat};

/// Solve `a x = b` by Gaussian elimination with partial pivoting.
pub fn linear_solve<T: Scalar>(a: &Mat<T>, b: &[T]) -> Result<Vec<T>> {
    assert!(a.is_square(), "linear_solve needs a square matrix");
    assert_eq!(a.rows(), b.len(), "rhs length mismatch");
    let n = a.rows();
    let mut m = a.clone();
    let mut x: Vec<T> = b.to_vec();
    let scale = m.max_abs().max(T::one());

    for col in 0..n {
        let mut piv = col;
        for r in col + 1..n {
            if m[(r, col)].abs() > m[(piv, col)].abs() {
                piv = r;
            }
        }
        if m[(piv, col)].abs() <= T::epsilon() * scale * cast::<T>(n as f64) {
            return Err(Error::DegenerateConfiguration(format!(
                "singular system at column {col}"
            )));
        }
        if piv != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(piv, j)];
                m[(piv, j)] = tmp;
            }
            x.swap(col, piv);
        }
        for r in col + 1..n {
            let f = m[(r, col)] / m[(col, col)];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                m[(r, j)] = m[(r, j)] - f * m[(col, j)];
            }
            x[r] = x[r] - f * x[col];
        }
    }

    for col in (0..n).rev() {
        let mut s = x[col];
        for j in col + 1..n {
            s = s - m[(col, j)] * x[j];
        }
        x[col] = s / m[(col, col)];
    }
    Ok(x)
}

/// Moore-Penrose pseudo-inverse of a symmetric PSD matrix.
///
/// Eigenvalues below `rel_tol * max(1, lambda_max)` are treated as zero.
pub fn pinv_psd<T: Scalar>(a: &Mat<T>, rel_tol: T) -> Mat<T> {
    let e = sym_eigen(a);
    let cutoff = rel_tol * T::one().max(e.max());
    e.map_rebuild(|lam| if lam > cutoff { T::one() / lam } else { T::zero() })
}

/// Options for the damped Newton solver.
pub struct NewtonOptions<T> {
    /// Stop when the gradient norm drops below this.
    pub grad_tol: T,
    pub max_iters: usize,
    /// Armijo sufficient-decrease constant.
    pub armijo: T,
}

impl<T: Scalar> Default for NewtonOptions<T> {
    fn default() -> Self {
        Self { grad_tol: cast(1e-12), max_iters: 200, armijo: cast(1e-4) }
    }
}

/// Damped Newton with backtracking line search for smooth strongly convex
/// minimization. Returns the minimizer.
pub fn damped_newton<T: Scalar>(
    x0: Vec<T>,
    value: impl Fn(&[T]) -> T,
    gradient: impl Fn(&[T]) -> Vec<T>,
    hessian: impl Fn(&[T]) -> Mat<T>,
    opts: &NewtonOptions<T>,
) -> Result<Vec<T>> {
    let mut x = x0;
    for _ in 0..opts.max_iters {
        let g = gradient(&x);
        let gnorm = super::norm2(&g);
        if gnorm <= opts.grad_tol {
            return Ok(x);
        }
        let h = hessian(&x);
        let neg_g: Vec<T> = g.iter().map(|&v| -v).collect();
        let p = linear_solve(&h, &neg_g)?;
        let slope = dot(&g, &p);
        if slope >= T::zero() {
            return Err(Error::InnerSolveFailure(
                "Newton direction is not a descent direction".into(),
            ));
        }

        let f0 = value(&x);
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<T> = x.iter().zip(&p).map(|(&xi, &pi)| xi + t * pi).collect();
            if value(&cand) <= f0 + opts.armijo * t * slope {
                x = cand;
                accepted = true;
                break;
            }
            t = t * cast::<T>(0.5);
        }
        if !accepted {
            return Err(Error::InnerSolveFailure("line search stalled".into()));
        }
    }

    let g = gradient(&x);
    if super::norm2(&g) <= opts.grad_tol {
        Ok(x)
    } else {
        Err(Error::InnerSolveFailure(format!(
            "gradient norm {} above tolerance {} after {} iterations",
            super::norm2(&g),
            opts.grad_tol,
            opts.max_iters
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let a = Mat::<f64>::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]);
        let x = linear_solve(&a, &[5.0, 10.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14);
        assert!((x[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_singular_system() {
        let a = Mat::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(linear_solve(&a, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn pinv_of_path_laplacian() {
        // L = [[1,-1],[-1,1]] has pinv L/4; L * pinv(L) * L = L.
        let l = Mat::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let p = pinv_psd(&l, 1e-12);
        let lpl = l.matmul(&p).matmul(&l);
        assert!(lpl.sub(&l).max_abs() < 1e-12);
    }

    #[test]
    fn newton_minimizes_quadratic_in_one_step() {
        // f(x) = (x0-1)^2 + 2(x1+2)^2
        let value = |x: &[f64]| (x[0] - 1.0).powi(2) + 2.0 * (x[1] + 2.0).powi(2);
        let gradient = |x: &[f64]| vec![2.0 * (x[0] - 1.0), 4.0 * (x[1] + 2.0)];
        let hessian = |_: &[f64]| Mat::from_rows(&[vec![2.0, 0.0], vec![0.0, 4.0]]);
        let x = damped_newton(vec![10.0, 10.0], value, gradient, hessian, &NewtonOptions::default())
            .unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] + 2.0).abs() < 1e-12);
    }
}
