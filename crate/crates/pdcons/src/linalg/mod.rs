//! Small dense linear algebra: matrices, a symmetric eigensolver, direct
//! solvers, and blockwise actions on stacked vectors.
//!
//! Everything here is sized for networks of at most a few hundred agents, so
//! dense storage and `O(n^3)` factorizations are deliberate.

mod eigen;
mod matrix;
mod solve;

pub use eigen::{sym_eigen, SymEigen};
pub use matrix::Mat;
pub use solve::{damped_newton, linear_solve, pinv_psd, NewtonOptions};

use crate::scalar::Scalar;

/// Dot product.
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
pub fn norm2<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Elementwise `a - b`.
pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

/// Elementwise `a + s * b`, in place on `a`.
pub fn axpy<T: Scalar>(a: &mut [T], s: T, b: &[T]) {
    debug_assert_eq!(a.len(), b.len());
    for (x, &y) in a.iter_mut().zip(b) {
        *x = *x + s * y;
    }
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
}

/// Largest absolute difference between two vectors.
pub fn max_abs_diff<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |m, (&x, &y)| m.max((x - y).abs()))
}

/// Apply `m ⊗ I_d` to a stacked vector: agent blocks of dimension `d` are
/// mixed by `m` coordinate by coordinate.
pub fn block_apply<T: Scalar>(m: &Mat<T>, v: &[T], d: usize) -> Vec<T> {
    assert_eq!(v.len(), m.cols() * d, "stacked vector length mismatch");
    let mut out = vec![T::zero(); m.rows() * d];
    for i in 0..m.rows() {
        let row = m.row(i);
        for c in 0..d {
            let mut s = T::zero();
            for (j, &mij) in row.iter().enumerate() {
                s = s + mij * v[j * d + c];
            }
            out[i * d + c] = s;
        }
    }
    out
}

/// Blockwise quadratic form `Σ_c v_c' M v_c` for a stacked vector.
pub fn block_quad_form<T: Scalar>(m: &Mat<T>, v: &[T], d: usize) -> T {
    let mv = block_apply(m, v, d);
    dot(v, &mv)
}
