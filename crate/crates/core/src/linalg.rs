//! Hermitian matrix helpers shared by the entropy and micro modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::scalar::{cabs, creal, Cplx, Real};

pub type CMatrix<T> = DMatrix<Cplx<T>>;
pub type CVector<T> = DVector<Cplx<T>>;

/// Eigen-decomposition of a Hermitian matrix (only the lower triangle is read).
pub fn herm_eig<T: Real>(a: &CMatrix<T>) -> (DVector<T>, CMatrix<T>) {
    let e = SymmetricEigen::new(a.clone());
    (e.eigenvalues, e.eigenvectors)
}

/// `U diag(f(w)) U†`.
pub fn recompose<T: Real>(w: &DVector<T>, u: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let mut scaled = u.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= creal(f(w[j]));
    }
    scaled * u.adjoint()
}

/// Applies a real function to a Hermitian matrix.
pub fn herm_fn<T: Real>(a: &CMatrix<T>, f: impl Fn(T) -> T) -> CMatrix<T> {
    let (w, u) = herm_eig(a);
    recompose(&w, &u, f)
}

pub fn trace_re<T: Real>(a: &CMatrix<T>) -> T {
    a.diagonal().iter().fold(T::zero(), |s, z| s + z.re)
}

/// `Re Tr(AB)` without forming the product.
pub fn trace_prod_re<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> T {
    let n = a.nrows();
    let mut s = T::zero();
    for i in 0..n {
        for k in 0..n {
            s += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    s
}

/// Largest absolute entry of `A − A†`.
pub fn hermiticity_defect<T: Real>(a: &CMatrix<T>) -> T {
    let mut m = T::zero();
    for i in 0..a.nrows() {
        for j in 0..=i {
            m = m.max(cabs(a[(i, j)] - a[(j, i)].conj()));
        }
    }
    m
}

pub fn max_abs<T: Real>(a: &CMatrix<T>) -> T {
    a.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
}

/// `log Σ e^{w_i}` without overflow.
pub fn log_sum_exp<T: Real>(w: &DVector<T>) -> T {
    let m = w.iter().fold(T::min_value().unwrap_or(-T::one() / T::machine_eps()), |a, &b| a.max(b));
    m + w.iter().fold(T::zero(), |s, &x| s + (x - m).exp()).ln()
}
