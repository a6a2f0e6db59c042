//! Clustering bounds on Bell correlations.
//!
//! Closed-form evaluators for the exponential vacuum bound `1 + 2e^{−md}`,
//! the clustering bound `min{√2 (κ − 1 + Γ)/κ, 1 + √2 Γ}` with
//! `κ = 7 + 4√2`, and its short-distance corollary
//! `√2 − √2/κ · (1 − e^{−md})`. A sampler estimates the clustering constant
//! Γ of a state from below.

use nalgebra::ComplexField;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{check_commuting, Algebra};
use crate::bell::{maximize_bell, OptimizerOptions, MEMBERSHIP_TOL};
use crate::error::{check_dim, input_err, Error, Result};
use crate::linalg::{op_norm, OperatorMatrix};
use crate::scalar::Real;
use crate::states::State;

/// `κ = 7 + 4√2`.
pub fn kappa<T: Real>() -> T {
    T::lit(7.0) + T::lit(4.0) * T::lit(2.0).sqrt()
}

/// Mass gap and separation for the distance-dependent bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundParams<T: Real> {
    pub mass_gap: T,
    pub distance: T,
    pub kappa: T,
}

impl<T: Real> BoundParams<T> {
    pub fn new(mass_gap: T, distance: T) -> Result<Self> {
        if !(mass_gap > T::zero()) || !mass_gap.is_finite() {
            return input_err("mass gap must be positive and finite");
        }
        if !(distance >= T::zero()) {
            return input_err("distance must be non-negative");
        }
        Ok(Self {
            mass_gap,
            distance,
            kappa: kappa(),
        })
    }
}

/// `min{√2 (6 + 4√2 + γ)/(7 + 4√2), 1 + √2 γ}` for `γ ∈ [0, 1]`.
pub fn clustering_bound<T: Real>(gamma: T) -> Result<T> {
    if !(T::zero()..=T::one()).contains(&gamma) {
        return input_err(format!("clustering constant {} outside [0, 1]", gamma.as_f64()));
    }
    let s2 = T::lit(2.0).sqrt();
    let k = kappa::<T>();
    let short = s2 * (k - T::one() + gamma) / k;
    let linear = T::one() + s2 * gamma;
    Ok(short.min(linear))
}

/// `1 + 2 e^{−m d}`.
pub fn vacuum_decay_bound<T: Real>(params: &BoundParams<T>) -> T {
    T::one() + T::lit(2.0) * (-params.mass_gap * params.distance).exp()
}

/// `√2 − √2/κ · (1 − e^{−m d})`.
pub fn distance_bound<T: Real>(params: &BoundParams<T>) -> T {
    let s2 = T::lit(2.0).sqrt();
    s2 - s2 / params.kappa * (T::one() - (-params.mass_gap * params.distance).exp())
}

/// Large-distance limit of [`distance_bound`], `√2 (6 + 4√2)/(7 + 4√2)`.
pub fn distance_bound_limit<T: Real>() -> T {
    let k = kappa::<T>();
    T::lit(2.0).sqrt() * (k - T::one()) / k
}

/// Sampled lower estimate of the clustering constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterEstimate<T: Real> {
    pub gamma_hat: T,
    /// Candidate pairs whose denominator cleared the floor.
    pub samples: usize,
    pub refinement_passes: usize,
    pub is_lower_estimate: bool,
}

impl<T: Real> ClusterEstimate<T> {
    /// True when the estimate exceeds 1 by more than `tol`.
    pub fn exceeds_unit(&self, tol: T) -> bool {
        self.gamma_hat > T::one() + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerOptions {
    pub samples: usize,
    pub refinement_passes: usize,
    pub floor: f64,
    pub seed: u64,
    /// Initial coordinate step of the refinement; shrinks fourfold per pass.
    pub initial_step: f64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            samples: 64,
            refinement_passes: 8,
            floor: 1e-8,
            seed: 0,
            initial_step: 0.5,
        }
    }
}

/// Cap on consecutive moves along one coordinate. The ratio is scale
/// invariant, so a coordinate can otherwise drift off to infinity while
/// creeping towards a supremum.
const MAX_MOVES: usize = 16;

struct Moments<'a, T: Real> {
    rho: &'a OperatorMatrix<T>,
    a: &'a Algebra<T>,
    b: &'a Algebra<T>,
    floor: T,
}

impl<T: Real> Moments<'_, T> {
    fn expect(&self, op: &OperatorMatrix<T>) -> Complex<T> {
        crate::linalg::expectation(self.rho, op)
    }

    fn element(alg: &Algebra<T>, coeffs: &[Complex<T>]) -> OperatorMatrix<T> {
        let mut m = OperatorMatrix::zeros(alg.dim(), alg.dim());
        for (e, c) in alg.basis().iter().zip(coeffs) {
            m += e * *c;
        }
        m
    }

    /// `|ω(AB) − ω(A)ω(B)| / (ω(A*A)ω(AA*)ω(B*B)ω(BB*))^{1/4}`, or `None`
    /// below the floor.
    fn ratio(&self, ca: &[Complex<T>], cb: &[Complex<T>]) -> Option<T> {
        let x = Self::element(self.a, ca);
        let y = Self::element(self.b, cb);
        let (xd, yd) = (x.adjoint(), y.adjoint());
        let den = self.expect(&(&xd * &x)).re.max(T::zero())
            * self.expect(&(&x * &xd)).re.max(T::zero())
            * self.expect(&(&yd * &y)).re.max(T::zero())
            * self.expect(&(&y * &yd)).re.max(T::zero());
        let den = den.sqrt().sqrt();
        if !(den >= self.floor) {
            return None;
        }
        let num = (self.expect(&(&x * &y)) - self.expect(&x) * self.expect(&y)).modulus();
        Some(num / den)
    }

    /// Coordinate ascent over the real and imaginary parts of both coefficient vectors.
    fn refine(&self, ca: &mut [Complex<T>], cb: &mut [Complex<T>], mut value: T, passes: usize, step0: T) -> T {
        let mut step = step0;
        let i = Complex::new(T::zero(), T::one());
        for _ in 0..passes {
            for side in 0..2 {
                let n = if side == 0 { ca.len() } else { cb.len() };
                for idx in 0..n {
                    for dir in [Complex::new(T::one(), T::zero()), i] {
                        for _ in 0..MAX_MOVES {
                            let mut improved = false;
                            for sgn in [T::one(), -T::one()] {
                                let delta = dir * (step * sgn);
                                let coeffs = if side == 0 { &mut *ca } else { &mut *cb };
                                coeffs[idx] += delta;
                                let trial = self.ratio(ca, cb);
                                match trial {
                                    Some(v) if v > value * (T::one() + T::lit(1e-12)) => {
                                        value = v;
                                        improved = true;
                                        break;
                                    }
                                    _ => {
                                        let coeffs = if side == 0 { &mut *ca } else { &mut *cb };
                                        coeffs[idx] -= delta;
                                    }
                                }
                            }
                            if !improved {
                                break;
                            }
                        }
                    }
                }
            }
            step /= T::lit(4.0);
        }
        value
    }
}

/// Lower estimate of the smallest Γ with
/// `|ω(AB) − ω(A)ω(B)| ≤ Γ (ω(A*A)ω(AA*)ω(B*B)ω(BB*))^{1/4}`.
///
/// Candidates are every pair of basis elements followed by `opts.samples`
/// seeded random pairs, alternating Hermitian and general elements. Each
/// candidate is refined by coordinate ascent and the estimate is the
/// running maximum, so it is nondecreasing in `opts.samples`. The ratio is
/// scale invariant, so candidates need not be normalized to contractions.
type Candidate<T> = (Vec<Complex<T>>, Vec<Complex<T>>);

pub fn clustering_coefficient<T: Real>(
    state: &State<T>,
    a: &Algebra<T>,
    b: &Algebra<T>,
    opts: &SamplerOptions,
) -> Result<ClusterEstimate<T>> {
    check_dim(state.dim(), a.dim())?;
    check_dim(state.dim(), b.dim())?;
    if opts.samples == 0 {
        return input_err("at least one sample is required");
    }
    let res = check_commuting(a, b)?;
    if res > T::lit(MEMBERSHIP_TOL) {
        return input_err("algebras do not commute");
    }
    let m = Moments {
        rho: state.rho(),
        a,
        b,
        floor: T::lit(opts.floor),
    };
    let (ka, kb) = (a.linear_dimension(), b.linear_dimension());
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());

    let mut candidates: Vec<Candidate<T>> = Vec::new();
    // Basis pairs, skipping the identity on either side (numerator is zero).
    for i in 1..ka {
        for j in 1..kb {
            let mut ca = vec![zero; ka];
            let mut cb = vec![zero; kb];
            ca[i] = one;
            cb[j] = one;
            candidates.push((ca, cb));
        }
    }
    for s in 0..opts.samples {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64);
        let hermitian = s % 2 == 0;
        let draw = |alg: &Algebra<T>, rng: &mut ChaCha8Rng| -> Vec<Complex<T>> {
            let x = if hermitian {
                alg.random_hermitian(rng)
            } else {
                alg.random_element(rng)
            };
            let norm = op_norm(&x).max(T::lit(f64::MIN_POSITIVE));
            let x = x / Complex::new(norm, T::zero());
            alg.basis().iter().map(|e| crate::linalg::hs_inner(e, &x)).collect()
        };
        let ca = draw(a, &mut rng);
        let cb = draw(b, &mut rng);
        candidates.push((ca, cb));
    }

    let step0 = T::lit(opts.initial_step);
    let mut best: Option<T> = None;
    let mut used = 0;
    for (mut ca, mut cb) in candidates {
        let Some(v0) = m.ratio(&ca, &cb) else { continue };
        used += 1;
        let v = m.refine(&mut ca, &mut cb, v0, opts.refinement_passes, step0);
        best = Some(best.map_or(v, |b: T| b.max(v)));
    }
    let Some(gamma_hat) = best else {
        return Err(Error::Estimation(
            "every candidate pair fell below the denominator floor".into(),
        ));
    };
    Ok(ClusterEstimate {
        gamma_hat,
        samples: used,
        refinement_passes: opts.refinement_passes,
        is_lower_estimate: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub optimizer: OptimizerOptions,
    pub slack: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerOptions::default(),
            slack: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterCheck<T: Real> {
    pub beta: T,
    pub bound: T,
    pub holds: bool,
}

/// Compares `β(ω, A, B)` with the clustering bound for a caller-supplied Γ.
pub fn verify_cluster_bound<T: Real>(
    state: &State<T>,
    a: &Algebra<T>,
    b: &Algebra<T>,
    gamma: T,
    opts: &VerifyOptions,
) -> Result<ClusterCheck<T>> {
    let bound = clustering_bound(gamma)?;
    let beta = maximize_bell(state, a, b, &opts.optimizer)?.beta;
    Ok(ClusterCheck {
        beta,
        bound,
        holds: beta <= bound + T::lit(opts.slack),
    })
}
