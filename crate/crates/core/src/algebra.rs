//! Finite-dimensional unital *-algebras of matrices.
//!
//! An [`Algebra`] is stored as a basis of Hermitian matrices that is
//! orthonormal under the normalized trace inner product
//! `⟨X, Y⟩ = Tr(X† Y) / dim`, so the identity always has unit norm.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, input_err, Error, Result};
use crate::linalg::{
    commutator, cplx, eigh, hermitian_part, hermitian_residual, hs_inner, hs_norm, identity, kron, op_norm,
    OperatorMatrix,
};
use crate::scalar::Real;

/// Largest ambient dimension accepted by the algebra constructors.
pub const MAX_AMBIENT_DIM: usize = 4096;

#[derive(Debug, Clone)]
pub struct Algebra<T: Real> {
    dim: usize,
    basis: Vec<OperatorMatrix<T>>,
}

/// Coarse structural classification of an algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlgebraStructure {
    pub is_abelian: bool,
    pub is_factor: bool,
    pub center_dimension: usize,
    pub linear_dimension: usize,
}

/// Incremental Gram-Schmidt over Hermitian matrices.
///
/// Candidates are orthogonalized twice against the current basis and kept
/// when the relative residual exceeds `tol`.
struct BasisBuilder<T: Real> {
    dim: usize,
    basis: Vec<OperatorMatrix<T>>,
    tol: T,
}

impl<T: Real> BasisBuilder<T> {
    fn new(dim: usize, tol: T) -> Self {
        Self {
            dim,
            basis: Vec::new(),
            tol,
        }
    }

    fn with_identity(dim: usize, tol: T) -> Self {
        let mut b = Self::new(dim, tol);
        b.basis.push(identity(dim));
        b
    }

    fn full(&self) -> bool {
        self.basis.len() >= self.dim * self.dim
    }

    fn try_push(&mut self, candidate: OperatorMatrix<T>) -> bool {
        if self.full() {
            return false;
        }
        let norm0 = hs_norm(&candidate);
        if norm0 <= self.tol {
            return false;
        }
        let mut r = candidate;
        for _ in 0..2 {
            for e in &self.basis {
                let coef = hs_inner(e, &r);
                r -= e * coef;
            }
        }
        let r = hermitian_part(&r);
        let nr = hs_norm(&r);
        if nr <= self.tol * norm0 {
            return false;
        }
        self.basis.push(r * cplx(T::one() / nr));
        true
    }

    /// Pushes `(m + m†)/2` and `(m - m†)/(2i)`; returns how many were kept.
    fn push_hermitian_parts(&mut self, m: &OperatorMatrix<T>) -> usize {
        let half = cplx(T::lit(0.5));
        let re = (m + m.adjoint()) * half;
        let im = (m - m.adjoint()) * Complex::new(T::zero(), -T::lit(0.5));
        usize::from(self.try_push(re)) + usize::from(self.try_push(im))
    }

    fn finish(self) -> Algebra<T> {
        Algebra {
            dim: self.dim,
            basis: self.basis,
        }
    }
}

fn check_cap(dim: usize) -> Result<()> {
    if dim == 0 {
        return input_err("ambient dimension must be positive");
    }
    if dim > MAX_AMBIENT_DIM {
        return Err(Error::DimensionCap {
            dim,
            cap: MAX_AMBIENT_DIM,
        });
    }
    Ok(())
}

impl<T: Real> Algebra<T> {
    /// Wraps a basis already known to be Hermitian and orthonormal.
    pub(crate) fn from_orthonormal(dim: usize, basis: Vec<OperatorMatrix<T>>) -> Self {
        Self { dim, basis }
    }

    /// Scalar multiples of the identity on `C^dim`.
    pub fn scalars(dim: usize) -> Result<Self> {
        check_cap(dim)?;
        Ok(Self::from_orthonormal(dim, vec![identity(dim)]))
    }

    /// Diagonal matrices on `C^dim` (maximal abelian).
    pub fn diagonal(dim: usize) -> Result<Self> {
        check_cap(dim)?;
        let s = cplx(T::from_usize(dim).unwrap().sqrt());
        let basis = (0..dim)
            .map(|k| {
                let mut m = OperatorMatrix::zeros(dim, dim);
                m[(k, k)] = s;
                m
            })
            .collect();
        Ok(Self::from_orthonormal(dim, basis))
    }

    /// The full matrix algebra `M_dim`, with a generalized Gell-Mann basis.
    pub fn full(dim: usize) -> Result<Self> {
        let mut alg = Self::diagonal(dim)?;
        let s = T::from_usize(dim).unwrap() / T::lit(2.0);
        let s = s.sqrt();
        for j in 0..dim {
            for k in (j + 1)..dim {
                let mut sym = OperatorMatrix::zeros(dim, dim);
                sym[(j, k)] = cplx(s);
                sym[(k, j)] = cplx(s);
                let mut asym = OperatorMatrix::zeros(dim, dim);
                asym[(j, k)] = Complex::new(T::zero(), -s);
                asym[(k, j)] = Complex::new(T::zero(), s);
                alg.basis.push(sym);
                alg.basis.push(asym);
            }
        }
        Ok(alg)
    }

    /// `self ⊗ 1_m`.
    pub fn tensor_identity_right(&self, m: usize) -> Result<Self> {
        check_cap(self.dim * m)?;
        let id = identity(m);
        Ok(Self::from_orthonormal(
            self.dim * m,
            self.basis.iter().map(|e| kron(e, &id)).collect(),
        ))
    }

    /// `1_m ⊗ self`.
    pub fn tensor_identity_left(&self, m: usize) -> Result<Self> {
        check_cap(self.dim * m)?;
        let id = identity(m);
        Ok(Self::from_orthonormal(
            self.dim * m,
            self.basis.iter().map(|e| kron(&id, e)).collect(),
        ))
    }

    /// `(M_n ⊗ 1, 1 ⊗ M_n)` on `C^n ⊗ C^n`.
    pub fn matrix_pair(n: usize) -> Result<(Self, Self)> {
        let full = Self::full(n)?;
        Ok((full.tensor_identity_right(n)?, full.tensor_identity_left(n)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[OperatorMatrix<T>] {
        &self.basis
    }

    pub fn linear_dimension(&self) -> usize {
        self.basis.len()
    }

    /// Orthogonal projection onto the algebra.
    pub fn project(&self, m: &OperatorMatrix<T>) -> OperatorMatrix<T> {
        let mut out = OperatorMatrix::zeros(self.dim, self.dim);
        for e in &self.basis {
            out += e * hs_inner(e, m);
        }
        out
    }

    /// Normalized-trace norm of the component of `m` outside the algebra.
    pub fn membership_residual(&self, m: &OperatorMatrix<T>) -> T {
        hs_norm(&(m - self.project(m)))
    }

    /// Largest membership residual of `other`'s basis; zero iff `other ⊂ self`.
    pub fn containment_residual(&self, other: &Algebra<T>) -> T {
        other
            .basis
            .iter()
            .map(|e| self.membership_residual(e))
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn contains_unit(&self) -> bool {
        self.membership_residual(&identity(self.dim)) <= T::closure_tol()
    }

    /// Largest residuals of the adjoint and product closure conditions.
    pub fn closure_residuals(&self) -> (T, T) {
        let mut adj = T::zero();
        let mut prod = T::zero();
        for (i, e) in self.basis.iter().enumerate() {
            adj = adj.max(self.membership_residual(&e.adjoint()));
            for f in &self.basis[i..] {
                prod = prod.max(self.membership_residual(&(e * f)));
                prod = prod.max(self.membership_residual(&(f * e)));
            }
        }
        (adj, prod)
    }

    /// Largest deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, e) in self.basis.iter().enumerate() {
            for (j, f) in self.basis.iter().enumerate() {
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max((hs_inner(e, f) - cplx(target)).norm_sqr().sqrt());
            }
        }
        worst
    }

    /// Checks the unit, adjoint-closure and product-closure invariants.
    pub fn validate(&self) -> Result<()> {
        let tol = T::closure_tol();
        if !self.contains_unit() {
            return input_err("algebra does not contain the identity");
        }
        let (adj, prod) = self.closure_residuals();
        if adj > tol || prod > tol {
            return input_err(format!(
                "algebra is not closed: adjoint residual {:.3e}, product residual {:.3e}",
                adj.as_f64(),
                prod.as_f64()
            ));
        }
        Ok(())
    }

    /// Random Hermitian element with standard Gaussian basis coefficients.
    pub fn random_hermitian<R: Rng + ?Sized>(&self, rng: &mut R) -> OperatorMatrix<T> {
        let mut out = OperatorMatrix::zeros(self.dim, self.dim);
        for e in &self.basis {
            let g: f64 = rng.sample(StandardNormal);
            out += e * cplx(T::lit(g));
        }
        out
    }

    /// Random element with complex Gaussian basis coefficients.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> OperatorMatrix<T> {
        let mut out = OperatorMatrix::zeros(self.dim, self.dim);
        for e in &self.basis {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            out += e * Complex::new(T::lit(re), T::lit(im));
        }
        out
    }
}

/// Mutual containment residual; zero iff the two algebras span the same subspace.
pub fn subspace_distance<T: Real>(a: &Algebra<T>, b: &Algebra<T>) -> T {
    a.containment_residual(b).max(b.containment_residual(a))
}

/// Smallest unital *-algebra on `C^dim` containing `generators`.
///
/// Closure is reached by repeated passes over pairwise products of the
/// current basis; a pass that adds nothing terminates the loop.
pub fn generate_algebra<T: Real>(generators: &[OperatorMatrix<T>], dim: usize) -> Result<Algebra<T>> {
    check_cap(dim)?;
    for g in generators {
        if g.nrows() != dim || g.ncols() != dim {
            return input_err(format!(
                "generator of shape {}x{} does not act on C^{dim}",
                g.nrows(),
                g.ncols()
            ));
        }
    }
    let mut builder = BasisBuilder::with_identity(dim, T::closure_tol());
    for g in generators {
        builder.push_hermitian_parts(g);
    }
    loop {
        let snapshot = builder.basis.clone();
        let mut added = 0;
        for (i, e) in snapshot.iter().enumerate() {
            for f in &snapshot[i..] {
                added += builder.push_hermitian_parts(&(e * f));
            }
        }
        if added == 0 || builder.full() {
            break;
        }
    }
    Ok(builder.finish())
}

/// Null-space threshold for a positive semidefinite Gram matrix.
fn null_threshold<T: Real>(largest: T) -> T {
    T::lit(1e-8) * largest.max(T::one())
}

/// All matrices commuting with every element of `alg`.
pub fn commutant<T: Real>(alg: &Algebra<T>) -> Algebra<T> {
    let d = alg.dim;
    let n = d * d;
    let id = identity::<T>(d);
    // Column-major vec: vec(EX - XE) = (1 ⊗ E - Eᵀ ⊗ 1) vec(X).
    let mut gram = OperatorMatrix::<T>::zeros(n, n);
    for e in &alg.basis {
        let ad = kron(&id, e) - kron(&e.transpose(), &id);
        gram += ad.adjoint() * ad;
    }
    let eig = eigh(&gram);
    let thr = null_threshold(eig.max());
    let mut builder = BasisBuilder::with_identity(d, T::closure_tol());
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam > thr {
            break;
        }
        let col = eig.vectors.column(k);
        let x = DMatrix::from_column_slice(d, d, col.as_slice());
        builder.push_hermitian_parts(&x);
    }
    builder.finish()
}

/// `alg ∩ alg'`, computed in the coordinates of the algebra's basis.
pub fn center<T: Real>(alg: &Algebra<T>) -> Algebra<T> {
    let k = alg.basis.len();
    let comms: Vec<Vec<OperatorMatrix<T>>> = alg
        .basis
        .iter()
        .map(|ei| alg.basis.iter().map(|ej| commutator(ei, ej)).collect())
        .collect();
    let mut gram = OperatorMatrix::<T>::zeros(k, k);
    for row in &comms {
        for j in 0..k {
            for l in j..k {
                let v = hs_inner(&row[j], &row[l]);
                gram[(j, l)] += v;
                if l != j {
                    gram[(l, j)] += v.conj();
                }
            }
        }
    }
    let eig = eigh(&gram);
    let thr = null_threshold(eig.max());
    let mut builder = BasisBuilder::with_identity(alg.dim, T::closure_tol());
    for (idx, &lam) in eig.values.iter().enumerate() {
        if lam > thr {
            break;
        }
        let mut x = OperatorMatrix::zeros(alg.dim, alg.dim);
        for (j, e) in alg.basis.iter().enumerate() {
            x += e * eig.vectors[(j, idx)];
        }
        builder.push_hermitian_parts(&x);
    }
    builder.finish()
}

pub fn structure_report<T: Real>(alg: &Algebra<T>) -> AlgebraStructure {
    let center_dimension = center(alg).linear_dimension();
    let linear_dimension = alg.linear_dimension();
    AlgebraStructure {
        is_abelian: center_dimension == linear_dimension,
        is_factor: center_dimension == 1,
        center_dimension,
        linear_dimension,
    }
}

/// Trace-preserving orthogonal projection `Σ ⟨E_i, M⟩ E_i`.
pub fn conditional_expectation<T: Real>(alg: &Algebra<T>, m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    check_dim(alg.dim, m.nrows())?;
    check_dim(alg.dim, m.ncols())?;
    Ok(alg.project(m))
}

/// `Σ sign(λ_k) P_k`, with zero eigenvalues mapped to `+1`.
pub fn spectral_sign<T: Real>(m: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    if !m.is_square() {
        return input_err("spectral sign needs a square matrix");
    }
    let scale = m.norm().max(T::one());
    if hermitian_residual(m) > T::closure_tol() * scale {
        return input_err("spectral sign needs a Hermitian matrix");
    }
    Ok(sign_unchecked(m))
}

pub(crate) fn sign_unchecked<T: Real>(m: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    let tie = T::sign_tol();
    eigh(m).map(|x| if x < -tie { -T::one() } else { T::one() })
}

/// Largest operator norm of `[E_i, F_j]` over the two bases.
pub fn check_commuting<T: Real>(a: &Algebra<T>, b: &Algebra<T>) -> Result<T> {
    check_dim(a.dim, b.dim)?;
    let mut worst = T::zero();
    for e in &a.basis {
        for f in &b.basis {
            let c = commutator(e, f);
            if c.iter().any(|z| z.re != T::zero() || z.im != T::zero()) {
                worst = worst.max(op_norm(&c));
            }
        }
    }
    Ok(worst)
}

/// Largest operator norm of `[E_i, x]`; zero iff `x ∈ alg'`.
pub(crate) fn commutation_residual<T: Real>(alg: &Algebra<T>, x: &OperatorMatrix<T>) -> T {
    alg.basis
        .iter()
        .map(|e| op_norm(&commutator(e, x)))
        .fold(T::zero(), |a, b| a.max(b))
}

/// Block-diagonal direct sum `(⊕ A_k, ⊕ B_k)` of commuting pairs.
pub fn direct_sum_pair<T: Real>(pairs: &[(Algebra<T>, Algebra<T>)]) -> Result<(Algebra<T>, Algebra<T>)> {
    if pairs.is_empty() {
        return input_err("direct sum of an empty family");
    }
    let mut total = 0;
    for (a, b) in pairs {
        check_dim(a.dim, b.dim)?;
        let res = check_commuting(a, b)?;
        if res > T::lit(1e-8) {
            return input_err(format!("summand pair does not commute (residual {:.3e})", res.as_f64()));
        }
        total += a.dim;
    }
    check_cap(total)?;
    let embed = |alg: &Algebra<T>, offset: usize| -> Vec<OperatorMatrix<T>> {
        let scale = cplx((T::from_usize(total).unwrap() / T::from_usize(alg.dim).unwrap()).sqrt());
        alg.basis
            .iter()
            .map(|e| {
                let mut m = OperatorMatrix::zeros(total, total);
                m.view_mut((offset, offset), (alg.dim, alg.dim)).copy_from(&(e * scale));
                m
            })
            .collect()
    };
    let mut a_basis = Vec::new();
    let mut b_basis = Vec::new();
    let mut offset = 0;
    for (a, b) in pairs {
        a_basis.extend(embed(a, offset));
        b_basis.extend(embed(b, offset));
        offset += a.dim;
    }
    Ok((
        Algebra::from_orthonormal(total, a_basis),
        Algebra::from_orthonormal(total, b_basis),
    ))
}
