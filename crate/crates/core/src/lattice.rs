//! Open transverse-field Ising chain
//! `H = −J Σ Z_i Z_{i+1} − g Σ X_i` as a finite stand-in for a net of local
//! algebras with a gapped vacuum.
//!
//! Site 0 is the most significant bit of the computational basis index.
//! The Hamiltonian is real in that basis and is only ever applied through
//! matrix-vector products; a dense copy is built on request below the
//! ambient dimension cap.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::algebra::{Algebra, MAX_AMBIENT_DIM};
use crate::bell::{maximize_bell, OptimizerOptions};
use crate::error::{input_err, Error, Result};
use crate::lanczos::{lowest, LanczosOptions};
use crate::linalg::{cplx, identity, kron, pauli, OperatorMatrix};
use crate::scalar::Real;
use crate::states::State;

/// Largest chain length accepted by [`build_chain`].
pub const MAX_SITES: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainModel<T: Real> {
    pub sites: usize,
    pub coupling: T,
    pub field: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegionSpec {
    pub start: usize,
    pub width: usize,
}

impl RegionSpec {
    pub fn new(start: usize, width: usize) -> Self {
        Self { start, width }
    }

    pub fn end(&self) -> usize {
        self.start + self.width
    }

    fn validate(&self, sites: usize) -> Result<()> {
        if self.width == 0 {
            return input_err("region width must be at least 1");
        }
        if self.end() > sites {
            return input_err(format!(
                "region [{}, {}) overflows a chain of {sites} sites",
                self.start,
                self.end()
            ));
        }
        Ok(())
    }
}

pub fn build_chain<T: Real>(sites: usize, coupling: T, field: T) -> Result<ChainModel<T>> {
    if sites < 2 {
        return input_err("a chain needs at least 2 sites");
    }
    if sites > MAX_SITES {
        return input_err(format!("{sites} sites exceeds the cap of {MAX_SITES}"));
    }
    if !coupling.is_finite() || !field.is_finite() {
        return input_err("coupling and field must be finite");
    }
    Ok(ChainModel { sites, coupling, field })
}

impl<T: Real> ChainModel<T> {
    pub fn dim(&self) -> usize {
        1 << self.sites
    }

    fn z(&self, idx: usize, site: usize) -> T {
        if (idx >> (self.sites - 1 - site)) & 1 == 0 {
            T::one()
        } else {
            -T::one()
        }
    }

    fn diagonal_energy(&self, idx: usize) -> T {
        (0..self.sites - 1).fold(T::zero(), |acc, i| acc + self.z(idx, i) * self.z(idx, i + 1)) * -self.coupling
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[T], y: &mut [T]) {
        let n = self.sites;
        for (idx, yi) in y.iter_mut().enumerate() {
            let mut s = self.diagonal_energy(idx) * x[idx];
            let mut flips = T::zero();
            for site in 0..n {
                flips += x[idx ^ (1 << (n - 1 - site))];
            }
            s -= self.field * flips;
            *yi = s;
        }
    }

    /// Dense Hamiltonian, available up to the ambient dimension cap.
    pub fn hamiltonian(&self) -> Result<OperatorMatrix<T>> {
        let d = self.dim();
        if d > MAX_AMBIENT_DIM {
            return Err(Error::DimensionCap {
                dim: d,
                cap: MAX_AMBIENT_DIM,
            });
        }
        let mut h = OperatorMatrix::zeros(d, d);
        let mut e = vec![T::zero(); d];
        let mut col = vec![T::zero(); d];
        for j in 0..d {
            e[j] = T::one();
            self.apply(&e, &mut col);
            e[j] = T::zero();
            for i in 0..d {
                h[(i, j)] = cplx(col[i]);
            }
        }
        Ok(h)
    }

    /// The Hamiltonian assembled term by term from Pauli tensor products.
    pub fn hamiltonian_from_terms(&self) -> Result<OperatorMatrix<T>> {
        let d = self.dim();
        if d > MAX_AMBIENT_DIM {
            return Err(Error::DimensionCap {
                dim: d,
                cap: MAX_AMBIENT_DIM,
            });
        }
        let n = self.sites;
        let mut h = OperatorMatrix::zeros(d, d);
        for i in 0..n - 1 {
            h -= site_string(n, &[(i, 3), (i + 1, 3)]) * cplx(self.coupling);
        }
        for i in 0..n {
            h -= site_string(n, &[(i, 1)]) * cplx(self.field);
        }
        Ok(h)
    }
}

/// Tensor product with the given Paulis at the given sites and identity elsewhere.
fn site_string<T: Real>(sites: usize, ops: &[(usize, usize)]) -> OperatorMatrix<T> {
    let mut m = identity::<T>(1);
    for s in 0..sites {
        let k = ops.iter().find(|(site, _)| *site == s).map_or(0, |(_, k)| *k);
        m = kron(&m, &pauli(k));
    }
    m
}

/// Lowest two levels and the ground vector.
pub struct GroundSolve<T: Real> {
    pub energy: T,
    pub first_excited: T,
    pub vector: Vec<T>,
}

impl<T: Real> GroundSolve<T> {
    pub fn gap(&self) -> T {
        self.first_excited - self.energy
    }
}

/// Ground vector by Lanczos with a deflated second solve for the gap.
///
/// Fails with a degenerate-ground error when the gap is at most `100·tol`.
pub fn ground_vector<T: Real>(chain: &ChainModel<T>, tol: T) -> Result<GroundSolve<T>> {
    if !(tol > T::zero()) {
        return input_err("tolerance must be positive");
    }
    let d = chain.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut draw = || -> Vec<T> { (0..d).map(|_| T::lit(StandardNormal.sample(&mut rng))).collect() };
    let opts = LanczosOptions {
        tol: tol.as_f64(),
        ..LanczosOptions::default()
    };
    let apply = |x: &[T], y: &mut [T]| chain.apply(x, y);
    let (e0, v0) = lowest(d, apply, draw(), &[], &opts)?;
    let (e1, _) = lowest(d, apply, draw(), std::slice::from_ref(&v0), &opts)?;
    let guard = T::lit(100.0) * tol;
    if e1 - e0 <= guard {
        return Err(Error::DegenerateGround {
            gap: (e1 - e0).as_f64(),
            guard: guard.as_f64(),
        });
    }
    Ok(GroundSolve {
        energy: e0,
        first_excited: e1,
        vector: v0,
    })
}

/// Ground state as a dense density matrix, available up to the ambient cap.
pub fn ground_state<T: Real>(chain: &ChainModel<T>, tol: T) -> Result<State<T>> {
    let d = chain.dim();
    if d > MAX_AMBIENT_DIM {
        return Err(Error::DimensionCap {
            dim: d,
            cap: MAX_AMBIENT_DIM,
        });
    }
    let g = ground_vector(chain, tol)?;
    let v: Vec<Complex<T>> = g.vector.iter().map(|&x| cplx(x)).collect();
    State::pure(&v)
}

/// Full matrix algebra on the region's sites, spanned by Pauli strings.
pub fn region_algebra<T: Real>(chain: &ChainModel<T>, region: RegionSpec) -> Result<Algebra<T>> {
    region.validate(chain.sites)?;
    let d = chain.dim();
    if d > MAX_AMBIENT_DIM {
        return Err(Error::DimensionCap {
            dim: d,
            cap: MAX_AMBIENT_DIM,
        });
    }
    let w = region.width;
    let mut basis = Vec::with_capacity(1 << (2 * w));
    for code in 0..(1usize << (2 * w)) {
        let ops: Vec<(usize, usize)> = (0..w).map(|k| (region.start + k, (code >> (2 * k)) & 3)).collect();
        basis.push(site_string(chain.sites, &ops));
    }
    Ok(Algebra::from_orthonormal(d, basis))
}

/// Reduced density matrix of `|ψ⟩` on the ordered sites `keep`.
///
/// The kept sites form the row index with the first listed site most significant.
pub fn reduced_density<T: Real>(sites: usize, psi: &[T], keep: &[usize]) -> Result<OperatorMatrix<T>> {
    if psi.len() != 1 << sites {
        return input_err("vector length does not match the chain");
    }
    if keep.iter().any(|&s| s >= sites) {
        return input_err("kept site outside the chain");
    }
    let k = keep.len();
    let rest: Vec<usize> = (0..sites).filter(|s| !keep.contains(s)).collect();
    let bit = |s: usize| 1usize << (sites - 1 - s);
    let index = |kept: usize, env: usize| -> usize {
        let mut idx = 0;
        for (j, &s) in keep.iter().enumerate() {
            if (kept >> (k - 1 - j)) & 1 == 1 {
                idx |= bit(s);
            }
        }
        for (j, &s) in rest.iter().enumerate() {
            if (env >> (rest.len() - 1 - j)) & 1 == 1 {
                idx |= bit(s);
            }
        }
        idx
    };
    let dk = 1usize << k;
    let de = 1usize << rest.len();
    // psi reshaped as a dk × de matrix
    let m = DMatrix::<T>::from_fn(dk, de, |i, j| psi[index(i, j)]);
    let rho = &m * m.transpose();
    let tr = rho.trace();
    Ok(rho.map(|x| cplx(x / tr)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T: Real> {
    pub separation: usize,
    pub beta: T,
    pub converged: bool,
}

/// `β(ω₀, A([0, w)), A([w + a, 2w + a)))` for each separation `a`.
///
/// Only the reduced state on the two regions enters, so each point is
/// evaluated on `C^{2^w} ⊗ C^{2^w}` with the pair `(M ⊗ 1, 1 ⊗ M)`.
pub fn separation_curve<T: Real>(
    chain: &ChainModel<T>,
    width: usize,
    separations: &[usize],
    tol: T,
    opts: &OptimizerOptions,
) -> Result<Vec<CurvePoint<T>>> {
    if width == 0 {
        return input_err("region width must be at least 1");
    }
    for &a in separations {
        RegionSpec::new(width + a, width).validate(chain.sites)?;
    }
    let local = 1usize << width;
    if local * local > MAX_AMBIENT_DIM {
        return Err(Error::DimensionCap {
            dim: local * local,
            cap: MAX_AMBIENT_DIM,
        });
    }
    let mut seps = separations.to_vec();
    seps.sort_unstable();
    seps.dedup();

    let ground = ground_vector(chain, tol)?;
    let (left, right) = Algebra::<T>::matrix_pair(local)?;
    seps.par_iter()
        .map(|&a| {
            let keep: Vec<usize> = (0..width).chain(width + a..2 * width + a).collect();
            let rho = reduced_density(chain.sites, &ground.vector, &keep)?;
            let rho = (&rho + rho.adjoint()) * cplx(T::lit(0.5));
            let state = State::new(rho)?;
            let report = maximize_bell(&state, &left, &right, opts)?;
            Ok(CurvePoint {
                separation: a,
                beta: report.beta,
                converged: report.converged,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit<T: Real> {
    pub rate: T,
    pub amplitude: T,
    /// Root-mean-square residual of the fit to `log(β − 1)`.
    pub residual: T,
}

/// Least-squares fit of `β(a) = 1 + c e^{−m a}` on `log(β − 1)`.
///
/// Points with `β − 1 ≤ 1e-9` carry no usable information and are dropped;
/// at least three must remain.
pub fn fit_decay<T: Real>(curve: &[(T, T)]) -> Result<DecayFit<T>> {
    if curve.len() < 3 {
        return input_err("a decay fit needs at least 3 points");
    }
    if curve.iter().any(|&(_, b)| !(b >= T::one() - T::lit(1e-6))) {
        return input_err("curve values must be at least 1");
    }
    let pts: Vec<(T, T)> = curve
        .iter()
        .filter(|&&(_, b)| b - T::one() > T::lit(1e-9))
        .map(|&(a, b)| (a, (b - T::one()).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Fit(format!(
            "{} usable points above the floor, need 3",
            pts.len()
        )));
    }
    let n = T::from_usize(pts.len()).unwrap();
    let mx = pts.iter().fold(T::zero(), |s, p| s + p.0) / n;
    let my = pts.iter().fold(T::zero(), |s, p| s + p.1) / n;
    let sxx = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.0 - mx));
    if sxx <= T::zero() {
        return Err(Error::Fit("all usable points share one separation".into()));
    }
    let sxy = pts.iter().fold(T::zero(), |s, p| s + (p.0 - mx) * (p.1 - my));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss = pts.iter().fold(T::zero(), |s, p| {
        let r = p.1 - (intercept + slope * p.0);
        s + r * r
    });
    Ok(DecayFit {
        rate: -slope,
        amplitude: intercept.exp(),
        residual: (ss / n).sqrt(),
    })
}
