//! Dense complex matrix helpers shared by every module.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::scalar::Real;

/// Dense complex square matrix acting on `C^dim`.
pub type OperatorMatrix<T> = DMatrix<Complex<T>>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn identity<T: Real>(dim: usize) -> OperatorMatrix<T> {
    DMatrix::identity(dim, dim)
}

pub fn zeros<T: Real>(dim: usize) -> OperatorMatrix<T> {
    DMatrix::zeros(dim, dim)
}

pub fn diagonal<T: Real>(values: &[T]) -> OperatorMatrix<T> {
    let d = values.len();
    let mut m = zeros(d);
    for (i, &v) in values.iter().enumerate() {
        m[(i, i)] = cplx(v);
    }
    m
}

/// Pauli matrix `k` in the order `I, X, Y, Z`.
pub fn pauli<T: Real>(k: usize) -> OperatorMatrix<T> {
    let (o, z) = (T::one(), T::zero());
    let c = |re: T, im: T| Complex::new(re, im);
    let entries = match k {
        0 => [c(o, z), c(z, z), c(z, z), c(o, z)],
        1 => [c(z, z), c(o, z), c(o, z), c(z, z)],
        2 => [c(z, z), c(z, -o), c(z, o), c(z, z)],
        3 => [c(o, z), c(z, z), c(z, z), c(-o, z)],
        _ => panic!("pauli index {k} out of range"),
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

pub fn kron<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    a.kronecker(b)
}

pub fn commutator<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    a * b - b * a
}

pub fn anticommutator<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    a * b + b * a
}

/// Normalized trace inner product `Tr(a† b) / dim`.
pub fn hs_inner<T: Real>(a: &OperatorMatrix<T>, b: &OperatorMatrix<T>) -> Complex<T> {
    let d = a.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x.conj() * y;
    }
    acc / T::from_usize(d).unwrap()
}

/// Norm induced by [`hs_inner`]; the identity has norm one.
pub fn hs_norm<T: Real>(a: &OperatorMatrix<T>) -> T {
    hs_inner(a, a).re.max(T::zero()).sqrt()
}

/// `Tr(rho · op)` without forming the product.
pub fn expectation<T: Real>(rho: &OperatorMatrix<T>, op: &OperatorMatrix<T>) -> Complex<T> {
    let d = rho.nrows();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..d {
        for j in 0..d {
            acc += rho[(i, j)] * op[(j, i)];
        }
    }
    acc
}

/// Frobenius norm of `a - a†`.
pub fn hermitian_residual<T: Real>(a: &OperatorMatrix<T>) -> T {
    (a - a.adjoint()).norm()
}

pub fn is_hermitian<T: Real>(a: &OperatorMatrix<T>, tol: T) -> bool {
    a.is_square() && hermitian_residual(a) <= tol
}

pub fn hermitian_part<T: Real>(a: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    (a + a.adjoint()) * cplx(T::lit(0.5))
}

/// Largest singular value.
pub fn op_norm<T: Real>(a: &OperatorMatrix<T>) -> T {
    if a.is_empty() {
        return T::zero();
    }
    a.singular_values().max()
}

pub fn is_contraction<T: Real>(a: &OperatorMatrix<T>, tol: T) -> bool {
    op_norm(a) <= T::one() + tol
}

/// Ascending eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    pub values: Vec<T>,
    /// Columns are the eigenvectors, in the order of `values`.
    pub vectors: OperatorMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        *self.values.last().unwrap()
    }

    /// Rebuilds `Σ f(λ_k) v_k v_k†`.
    pub fn map(&self, mut f: impl FnMut(T) -> T) -> OperatorMatrix<T> {
        let d = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for (k, &lam) in self.values.iter().enumerate() {
            let w = cplx(f(lam));
            for i in 0..d {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

/// Eigen-decomposition of the Hermitian part of `a`, sorted ascending.
pub fn eigh<T: Real>(a: &OperatorMatrix<T>) -> HermitianEigen<T> {
    let eig = SymmetricEigen::new(hermitian_part(a));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = OperatorMatrix::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<DVector<Complex<T>>>>(),
    );
    HermitianEigen { values, vectors }
}

pub fn eigenvalues_hermitian<T: Real>(a: &OperatorMatrix<T>) -> Vec<T> {
    let mut v: Vec<T> = SymmetricEigen::new(hermitian_part(a))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// `Σ |λ|` for a Hermitian matrix.
pub fn trace_norm_hermitian<T: Real>(a: &OperatorMatrix<T>) -> T {
    eigenvalues_hermitian(a)
        .into_iter()
        .fold(T::zero(), |acc, x| acc + x.abs())
}

/// Clips the spectrum of a Hermitian matrix to `[-1, 1]`.
pub fn spectral_clip<T: Real>(a: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    eigh(a).map(|x| x.max(-T::one()).min(T::one()))
}

/// Euclidean projection of a vector onto the probability simplex.
pub fn project_simplex<T: Real>(v: &[T]) -> Vec<T> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut cumsum = T::zero();
    let mut theta = T::zero();
    for (k, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let t = (cumsum - T::one()) / T::from_usize(k + 1).unwrap();
        if u - t > T::zero() {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(T::zero())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn pauli_algebra() {
        let x = pauli::<f64>(1);
        let y = pauli::<f64>(2);
        let z = pauli::<f64>(3);
        let i2 = identity::<f64>(2);
        for p in [&x, &y, &z] {
            assert_abs_diff_eq!((p * p - &i2).norm(), 0.0);
            assert!(is_hermitian(p, 0.0));
        }
        // XY = iZ
        let iz = &z * Complex::new(0.0, 1.0);
        assert_abs_diff_eq!((&x * &y - iz).norm(), 0.0);
    }

    #[test]
    fn eigh_sorted_and_reconstructs() {
        let m = diagonal::<f64>(&[3.0, -2.0, 0.5]);
        let e = eigh(&m);
        assert_eq!(e.values, vec![-2.0, 0.5, 3.0]);
        assert_abs_diff_eq!((e.map(|x| x) - m).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn hs_inner_is_normalized() {
        assert_abs_diff_eq!(hs_norm(&identity::<f64>(7)), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hs_inner(&pauli::<f64>(1), &pauli(3)).norm(), 0.0);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5f64, 0.5, 0.5]);
        for x in &p {
            assert_abs_diff_eq!(*x, 1.0 / 3.0, epsilon = 1e-15);
        }
        let p = project_simplex(&[2.0f64, -1.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn op_norm_of_paulis() {
        assert_abs_diff_eq!(op_norm(&pauli::<f64>(2)), 1.0, epsilon = 1e-14);
        let c = commutator(&pauli::<f64>(1), &pauli(3));
        assert_abs_diff_eq!(op_norm(&c), 2.0, epsilon = 1e-14);
    }
}
