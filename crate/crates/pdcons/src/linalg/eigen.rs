use crate::scalar::{cast, Scalar};

use super::Mat;

/// Eigendecomposition of a symmetric matrix: `a = V diag(values) V'`.
///
/// `values` are sorted ascending; `vectors` holds the matching eigenvectors
/// as columns.
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> SymEigen<T> {
    /// Largest eigenvalue.
    pub fn max(&self) -> T {
        *self.values.last().expect("empty spectrum")
    }

    /// Smallest eigenvalue.
    pub fn min(&self) -> T {
        *self.values.first().expect("empty spectrum")
    }

    /// Reassemble `V f(diag) V'` with eigenvalues mapped through `f`.
    pub fn map_rebuild(&self, f: impl Fn(T) -> T) -> Mat<T> {
        let n = self.values.len();
        let mut out = Mat::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let flam = f(lam);
            if flam == T::zero() {
                continue;
            }
            for i in 0..n {
                let vik = self.vectors[(i, k)];
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + flam * vik * self.vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Deterministic and accurate at the problem sizes this crate targets
/// (a few hundred rows at most). The caller is responsible for symmetry;
/// only the upper triangle is trusted.
pub fn sym_eigen<T: Scalar>(a: &Mat<T>) -> SymEigen<T> {
    assert!(a.is_square(), "eigensolver needs a square matrix");
    let n = a.rows();
    let mut d = a.clone();
    let mut v = Mat::identity(n);

    if n <= 1 {
        return SymEigen { values: (0..n).map(|i| d[(i, i)]).collect(), vectors: v };
    }

    // Off-diagonal Frobenius mass used as the sweep stopping criterion.
    let off = |m: &Mat<T>| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                s = s + m[(i, j)] * m[(i, j)];
            }
        }
        s
    };

    let scale = d.max_abs().max(T::one());
    let tol = T::epsilon() * T::epsilon() * scale * scale * cast::<T>(n as f64);
    let max_sweeps = 64;

    for _ in 0..max_sweeps {
        if off(&d) <= tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = d[(p, q)];
                if apq.abs() <= T::epsilon() * scale * cast::<T>(1e-3) {
                    continue;
                }
                // Symmetric Schur rotation annihilating d[(p, q)].
                let tau = (d[(q, q)] - d[(p, p)]) / (cast::<T>(2.0) * apq);
                let t = if tau >= T::zero() {
                    T::one() / (tau + (T::one() + tau * tau).sqrt())
                } else {
                    -T::one() / (-tau + (T::one() + tau * tau).sqrt())
                };
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = t * c;

                for i in 0..n {
                    if i != p && i != q {
                        let dip = d[(i, p)];
                        let diq = d[(i, q)];
                        d[(i, p)] = c * dip - s * diq;
                        d[(p, i)] = d[(i, p)];
                        d[(i, q)] = s * dip + c * diq;
                        d[(q, i)] = d[(i, q)];
                    }
                }
                let app = d[(p, p)];
                let aqq = d[(q, q)];
                d[(p, p)] = c * c * app - cast::<T>(2.0) * s * c * apq + s * s * aqq;
                d[(q, q)] = s * s * app + cast::<T>(2.0) * s * c * apq + c * c * aqq;
                d[(p, q)] = T::zero();
                d[(q, p)] = T::zero();

                for i in 0..n {
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = c * vip - s * viq;
                    v[(i, q)] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[(i, i)].partial_cmp(&d[(j, j)]).expect("NaN eigenvalue"));

    let values: Vec<T> = order.iter().map(|&i| d[(i, i)]).collect();
    let mut vectors = Mat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, col)] = v[(i, src)];
        }
    }
    SymEigen { values, vectors }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_hand_check() {
        // Path-graph Laplacian [[1,-1],[-1,1]]: eigenvalues {0, 2}.
        let a = Mat::<f64>::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let e = sym_eigen(&a);
        assert!(e.values[0].abs() < 1e-14);
        assert!((e.values[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruction_is_accurate() {
        let a = Mat::from_rows(&[
            vec![4.0, 1.0, 0.5, 0.0],
            vec![1.0, 3.0, -0.2, 0.1],
            vec![0.5, -0.2, 2.0, 0.3],
            vec![0.0, 0.1, 0.3, 1.0],
        ]);
        let e = sym_eigen(&a);
        let rebuilt = e.map_rebuild(|lam| lam);
        assert!(rebuilt.sub(&a).max_abs() < 1e-13);
        // Eigenvectors are orthonormal.
        let vtv = e.vectors.transpose().matmul(&e.vectors);
        assert!(vtv.sub(&Mat::identity(4)).max_abs() < 1e-13);
    }

    #[test]
    fn trace_is_preserved() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 1.0], vec![1.0, 2.0, 1.0], vec![1.0, 1.0, 2.0]]);
        let e = sym_eigen(&a);
        let trace: f64 = e.values.iter().sum();
        assert!((trace - 6.0).abs() < 1e-13);
    }
}
