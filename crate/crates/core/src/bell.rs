//! Maximal Bell correlation of a state on a commuting pair of algebras.
//!
//! The correlation of a candidate `(a₁, a₂, b₁, b₂)` of Hermitian
//! contractions is `Tr(ρ T)` with the Bell operator
//! `T = ½(a₁(b₁ + b₂) + a₂(b₁ − b₂))`. It is linear in each side separately,
//! so [`maximize_bell`] alternates exact best responses on the two sides
//! (a see-saw) from several seeded starting points.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::algebra::{check_commuting, commutation_residual, sign_unchecked, Algebra};
use crate::error::{check_dim, input_err, Result};
use crate::linalg::{
    anticommutator, cplx, hermitian_part, hermitian_residual, identity, kron, op_norm, pauli, spectral_clip,
    OperatorMatrix,
};
use crate::scalar::Real;
use crate::states::State;

/// Contraction slack accepted for candidate observables.
pub const CONTRACTION_TOL: f64 = 1e-9;
/// Residual accepted for membership and commutation of candidate observables.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

/// Budgets and tolerances for the optimizers.
///
/// The see-saw uses `restarts`, `max_sweeps`, `tol` and `seed`; the
/// invariant solvers additionally use `temperature`, `step`,
/// `max_iterations` and `gap_tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
    pub temperature: f64,
    pub step: f64,
    pub max_iterations: usize,
    pub gap_tol: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_sweeps: 500,
            tol: 1e-10,
            seed: 0,
            temperature: 1e-3 * std::f64::consts::SQRT_2,
            step: 0.1,
            max_iterations: 2000,
            gap_tol: 1e-4,
        }
    }
}

/// Two observables per side.
#[derive(Debug, Clone)]
pub struct BellCandidate<T: Real> {
    pub a1: OperatorMatrix<T>,
    pub a2: OperatorMatrix<T>,
    pub b1: OperatorMatrix<T>,
    pub b2: OperatorMatrix<T>,
}

impl<T: Real> BellCandidate<T> {
    pub fn new(a1: OperatorMatrix<T>, a2: OperatorMatrix<T>, b1: OperatorMatrix<T>, b2: OperatorMatrix<T>) -> Self {
        Self { a1, a2, b1, b2 }
    }

    /// All four observables equal to the identity; its Bell operator is `1`.
    pub fn identity(dim: usize) -> Self {
        let id = identity(dim);
        Self::new(id.clone(), id.clone(), id.clone(), id)
    }

    pub fn dim(&self) -> usize {
        self.a1.nrows()
    }

    fn ops(&self) -> [&OperatorMatrix<T>; 4] {
        [&self.a1, &self.a2, &self.b1, &self.b2]
    }

    /// Hermitian contractions with each `aᵢ` commuting with each `bⱼ`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let herm_tol = T::closure_tol();
        for op in self.ops() {
            check_dim(d, op.nrows())?;
            check_dim(d, op.ncols())?;
            if hermitian_residual(op) > herm_tol {
                return input_err("candidate observable is not Hermitian");
            }
            if op_norm(op) > T::one() + T::lit(CONTRACTION_TOL) {
                return input_err("candidate observable is not a contraction");
            }
        }
        for a in [&self.a1, &self.a2] {
            for b in [&self.b1, &self.b2] {
                if op_norm(&(a * b - b * a)) > T::lit(MEMBERSHIP_TOL) {
                    return input_err("candidate observables of the two sides do not commute");
                }
            }
        }
        Ok(())
    }

    /// [`validate`](Self::validate) plus membership of each side in its algebra.
    pub fn validate_in(&self, a: &Algebra<T>, b: &Algebra<T>) -> Result<()> {
        self.validate()?;
        let tol = T::lit(MEMBERSHIP_TOL);
        if a.membership_residual(&self.a1) > tol || a.membership_residual(&self.a2) > tol {
            return input_err("a-side observable outside its algebra");
        }
        if b.membership_residual(&self.b1) > tol || b.membership_residual(&self.b2) > tol {
            return input_err("b-side observable outside its algebra");
        }
        Ok(())
    }

    /// The same candidate with `a₁, a₂` negated.
    pub fn negate_a(&self) -> Self {
        Self::new(-&self.a1, -&self.a2, self.b1.clone(), self.b2.clone())
    }

    pub(crate) fn operator(&self) -> OperatorMatrix<T> {
        let half = cplx(T::lit(0.5));
        (&self.a1 * (&self.b1 + &self.b2) + &self.a2 * (&self.b1 - &self.b2)) * half
    }
}

/// Optimized value with the maximizing candidate.
#[derive(Debug, Clone)]
pub struct BellReport<T: Real> {
    pub beta: T,
    pub candidate: BellCandidate<T>,
    /// Sweeps performed by the winning restart.
    pub iterations: usize,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Residuals of the algebraic relations satisfied by maximal violators.
#[derive(Debug, Clone, Copy)]
pub struct Diagnostics<T: Real> {
    /// `‖X² − 1‖` for `a₁, a₂, b₁, b₂`.
    pub sq_residuals: [T; 4],
    /// `‖a₁a₂ + a₂a₁‖`, `‖b₁b₂ + b₂b₁‖`.
    pub anticomm_residuals: [T; 2],
    /// Per side, `(‖N²‖, ‖NN† + N†N − 1‖)` for `N = ½(X₁ + iX₂)`.
    pub i2_residuals: [(T, T); 2],
}

impl<T: Real> Diagnostics<T> {
    pub fn max_residual(&self) -> T {
        self.sq_residuals
            .iter()
            .chain(&self.anticomm_residuals)
            .chain(self.i2_residuals.iter().flat_map(|(x, y)| [x, y]))
            .fold(T::zero(), |a, &b| a.max(b))
    }
}

/// `T = ½(a₁(b₁ + b₂) + a₂(b₁ − b₂))`.
pub fn bell_operator<T: Real>(cand: &BellCandidate<T>) -> Result<OperatorMatrix<T>> {
    cand.validate()?;
    Ok(cand.operator())
}

/// `Tr(ρ T)` for the candidate's Bell operator.
pub fn correlation_value<T: Real>(state: &State<T>, cand: &BellCandidate<T>) -> Result<T> {
    check_dim(state.dim(), cand.dim())?;
    let t = bell_operator(cand)?;
    let v = state.expect(&t);
    if v.im.abs() > T::closure_tol() {
        return input_err("correlation has a non-negligible imaginary part");
    }
    Ok(v.re)
}

#[inline]
fn value_unchecked<T: Real>(rho: &OperatorMatrix<T>, cand: &BellCandidate<T>) -> T {
    crate::linalg::expectation(rho, &cand.operator()).re
}

/// Maximizer over Hermitian contractions `A ∈ alg` of `Tr(ρ A X)`.
#[inline]
fn respond<T: Real>(rho: &OperatorMatrix<T>, alg: &Algebra<T>, x: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    // ½(Xρ + ρX) is the Hermitian part of Xρ.
    sign_unchecked(&alg.project(&hermitian_part(&(x * rho))))
}

/// Best Hermitian contraction `A ∈ alg` against `X`: the spectral sign of
/// the projection of `½(Xρ + ρX)` onto the algebra.
pub fn best_response<T: Real>(state: &State<T>, alg: &Algebra<T>, x: &OperatorMatrix<T>) -> Result<OperatorMatrix<T>> {
    check_dim(alg.dim(), state.dim())?;
    check_dim(alg.dim(), x.nrows())?;
    check_dim(alg.dim(), x.ncols())?;
    if hermitian_residual(x) > T::closure_tol() * x.norm().max(T::one()) {
        return input_err("best response needs a Hermitian argument");
    }
    if commutation_residual(alg, x) > T::lit(MEMBERSHIP_TOL) * op_norm(x).max(T::one()) {
        return input_err("argument does not commute with the algebra");
    }
    Ok(respond(state.rho(), alg, x))
}

/// One see-saw run from a given `(b₁, b₂)`.
#[derive(Debug, Clone)]
pub struct SeeSawRun<T: Real> {
    pub value: T,
    pub candidate: BellCandidate<T>,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after every half-step.
    pub history: Vec<T>,
}

/// Alternating maximization starting with the `a` side against `(b₁, b₂)`.
pub fn see_saw<T: Real>(
    state: &State<T>,
    a: &Algebra<T>,
    b: &Algebra<T>,
    b1: OperatorMatrix<T>,
    b2: OperatorMatrix<T>,
    opts: &OptimizerOptions,
) -> SeeSawRun<T> {
    let rho = state.rho();
    let half = cplx(T::lit(0.5));
    let tol = T::lit(opts.tol);
    let d = state.dim();
    let mut cand = BellCandidate::new(identity(d), identity(d), b1, b2);
    let mut history = Vec::new();
    let mut prev: Option<T> = None;
    let mut converged = false;
    let mut sweeps = 0;
    for sweep in 1..=opts.max_sweeps.max(1) {
        sweeps = sweep;
        cand.a1 = respond(rho, a, &(&cand.b1 + &cand.b2));
        cand.a2 = respond(rho, a, &(&cand.b1 - &cand.b2));
        history.push(value_unchecked(rho, &cand));

        let xp = (&cand.a1 + &cand.a2) * half;
        let xm = (&cand.a1 - &cand.a2) * half;
        cand.b1 = respond(rho, b, &xp);
        cand.b2 = respond(rho, b, &xm);
        let v = value_unchecked(rho, &cand);
        history.push(v);

        if let Some(p) = prev {
            if v - p < tol {
                converged = true;
                break;
            }
        }
        prev = Some(v);
    }
    SeeSawRun {
        value: *history.last().unwrap(),
        candidate: cand,
        sweeps,
        converged,
        history,
    }
}

/// Random Hermitian contraction in `alg`, spectrally clipped to `[-1, 1]`.
fn random_observable<T: Real>(alg: &Algebra<T>, rng: &mut ChaCha8Rng) -> OperatorMatrix<T> {
    spectral_clip(&alg.random_hermitian(rng))
}

/// `β(φ, A, B)` by multi-restart see-saw.
///
/// Restart 0 starts from the all-identity candidate; restart `k ≥ 1` draws
/// `(b₁, b₂)` from stream `k` of a generator seeded with `opts.seed`. The
/// best value wins, ties going to the lowest restart index.
pub fn maximize_bell<T: Real>(
    state: &State<T>,
    a: &Algebra<T>,
    b: &Algebra<T>,
    opts: &OptimizerOptions,
) -> Result<BellReport<T>> {
    check_dim(state.dim(), a.dim())?;
    check_dim(state.dim(), b.dim())?;
    let res = check_commuting(a, b)?;
    if res > T::lit(MEMBERSHIP_TOL) {
        return input_err(format!("algebras do not commute (residual {:.3e})", res.as_f64()));
    }
    let restarts = opts.restarts.max(1);
    let d = state.dim();
    let runs: Vec<SeeSawRun<T>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let (b1, b2) = if k == 0 {
                (identity(d), identity(d))
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(k as u64);
                (random_observable(b, &mut rng), random_observable(b, &mut rng))
            };
            see_saw(state, a, b, b1, b2, opts)
        })
        .collect();
    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.value > runs[best].value {
            best = k;
        }
    }
    let run = runs.into_iter().nth(best).unwrap();
    Ok(BellReport {
        beta: run.value,
        candidate: run.candidate,
        iterations: run.sweeps,
        restarts_used: restarts,
        converged: run.converged,
    })
}

/// Which tensor factor each side of a two-qubit pair acts on.
fn qubit_orientation<T: Real>(a: &Algebra<T>, b: &Algebra<T>) -> Option<bool> {
    if a.dim() != 4 || b.dim() != 4 || a.linear_dimension() != 4 || b.linear_dimension() != 4 {
        return None;
    }
    let tol = T::lit(MEMBERSHIP_TOL);
    let id = identity::<T>(2);
    let holds = |alg: &Algebra<T>, left: bool| {
        (1..4).all(|k| {
            let op = if left {
                kron(&pauli(k), &id)
            } else {
                kron(&id, &pauli(k))
            };
            alg.membership_residual(&op) <= tol
        })
    };
    if holds(a, true) && holds(b, false) {
        Some(true)
    } else if holds(a, false) && holds(b, true) {
        Some(false)
    } else {
        None
    }
}

/// Lower bound on `β` by exhaustive search over a grid of qubit observables.
///
/// Only two-qubit pairs `(M₂ ⊗ 1, 1 ⊗ M₂)` (either orientation) are
/// supported. The `a` side ranges over `±1` and `n̂·σ` with `n̂` on a grid of
/// spherical angles (`resolution` azimuthal steps, half as many polar
/// steps). For fixed `a₁, a₂` the `b` side is solved exactly: the best
/// qubit contraction against a linear functional `c·1 + v·σ` has value
/// `max(|c|, |v|)`.
pub fn brute_force_beta<T: Real>(state: &State<T>, a: &Algebra<T>, b: &Algebra<T>, resolution: usize) -> Result<T> {
    if resolution < 8 {
        return input_err("brute-force resolution must be at least 8");
    }
    check_dim(4, state.dim())?;
    let Some(a_left) = qubit_orientation(a, b) else {
        return input_err("brute-force oracle only supports the two-qubit pair");
    };
    // corr[j][k] = Tr(ρ σ_j^A σ_k^B), σ_0 = 1
    let mut corr = [[T::zero(); 4]; 4];
    for (j, row) in corr.iter_mut().enumerate() {
        for (k, c) in row.iter_mut().enumerate() {
            let (pa, pb) = (pauli::<T>(j), pauli::<T>(k));
            let op = if a_left { kron(&pa, &pb) } else { kron(&pb, &pa) };
            *c = state.expect(&op).re;
        }
    }

    // Each observable only matters up to sign, so for an even resolution
    // the grid is reduced to one representative per antipodal pair.
    let r = resolution;
    let h = r.div_ceil(2);
    let pi = T::pi();
    let mut dirs: Vec<[T; 4]> = vec![
        [T::one(), T::zero(), T::zero(), T::zero()],
        [T::zero(), T::zero(), T::zero(), T::one()],
    ];
    if r % 2 == 1 {
        dirs.push([-T::one(), T::zero(), T::zero(), T::zero()]);
        dirs.push([T::zero(), T::zero(), T::zero(), -T::one()]);
    }
    for i in 1..h {
        for j in 0..r {
            if r.is_multiple_of(2) && !(2 * i < h || (2 * i == h && 2 * j < r)) {
                continue;
            }
            let theta = pi * T::from_usize(i).unwrap() / T::from_usize(h).unwrap();
            let phi = T::two_pi() * T::from_usize(j).unwrap() / T::from_usize(r).unwrap();
            let (st, ct) = theta.sin_cos();
            let (sp, cp) = phi.sin_cos();
            dirs.push([T::zero(), st * cp, st * sp, ct]);
        }
    }
    // u_p[k] = Σ_j a_p[j] corr[j][k]: the functional seen by the b side.
    let u: Vec<[T; 4]> = dirs
        .iter()
        .map(|a| {
            let mut out = [T::zero(); 4];
            for (k, o) in out.iter_mut().enumerate() {
                for j in 0..4 {
                    *o += a[j] * corr[j][k];
                }
            }
            out
        })
        .collect();
    let half = T::lit(0.5);
    let side = |w: [T; 4]| -> T {
        let v = (w[1] * w[1] + w[2] * w[2] + w[3] * w[3]).sqrt();
        v.max(w[0].abs())
    };
    let best = (0..u.len())
        .into_par_iter()
        .map(|p| {
            let up = u[p];
            let mut best = T::min_value().unwrap();
            for uq in &u[p..] {
                let mut plus = [T::zero(); 4];
                let mut minus = [T::zero(); 4];
                for k in 0..4 {
                    plus[k] = (up[k] + uq[k]) * half;
                    minus[k] = (up[k] - uq[k]) * half;
                }
                let v = side(plus) + side(minus);
                if v > best {
                    best = v;
                }
            }
            best
        })
        .reduce(|| T::min_value().unwrap(), |x, y| x.max(y));
    Ok(best)
}

/// `(‖N²‖, ‖NN† + N†N − 1‖)` for `N = ½(x₁ + i x₂)`.
pub fn i2_generator_residuals<T: Real>(x1: &OperatorMatrix<T>, x2: &OperatorMatrix<T>) -> (T, T) {
    let n = (x1 + x2 * Complex::new(T::zero(), T::one())) * cplx(T::lit(0.5));
    let nd = n.adjoint();
    let sq = op_norm(&(&n * &n));
    let unit = op_norm(&(&n * &nd + &nd * &n - identity::<T>(n.nrows())));
    (sq, unit)
}

/// Residuals of the optimizer against the relations of maximal violators.
///
/// Never judges: whether the residuals should be small depends on the
/// violation being maximal and the state being faithful on both sides.
pub fn structural_diagnostics<T: Real>(state: &State<T>, report: &BellReport<T>) -> Result<Diagnostics<T>> {
    let c = &report.candidate;
    check_dim(state.dim(), c.dim())?;
    let id = identity::<T>(c.dim());
    let sq = |x: &OperatorMatrix<T>| op_norm(&(x * x - &id));
    Ok(Diagnostics {
        sq_residuals: [sq(&c.a1), sq(&c.a2), sq(&c.b1), sq(&c.b2)],
        anticomm_residuals: [
            op_norm(&anticommutator(&c.a1, &c.a2)),
            op_norm(&anticommutator(&c.b1, &c.b2)),
        ],
        i2_residuals: [
            i2_generator_residuals(&c.a1, &c.a2),
            i2_generator_residuals(&c.b1, &c.b2),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_state, StateSpec};
    use approx::assert_abs_diff_eq;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    fn qubit_pair() -> (Algebra<f64>, Algebra<f64>) {
        Algebra::matrix_pair(2).unwrap()
    }

    fn chsh_candidate() -> BellCandidate<f64> {
        let id = identity::<f64>(2);
        let (x, z) = (pauli::<f64>(1), pauli::<f64>(3));
        let s = cplx(1.0 / SQRT2);
        BellCandidate::new(
            kron(&z, &id),
            kron(&x, &id),
            kron(&id, &((&z + &x) * s)),
            kron(&id, &((&z - &x) * s)),
        )
    }

    #[test]
    fn identity_candidate_gives_unit_operator() {
        let t = bell_operator(&BellCandidate::<f64>::identity(4)).unwrap();
        assert_abs_diff_eq!((t - identity::<f64>(4)).norm(), 0.0);
    }

    #[test]
    fn chsh_operator_spectrum() {
        let t = bell_operator(&chsh_candidate()).unwrap();
        let zz = kron(&pauli::<f64>(3), &pauli(3));
        let xx = kron(&pauli::<f64>(1), &pauli(1));
        assert_abs_diff_eq!((&t - (zz + xx) * cplx(1.0 / SQRT2)).norm(), 0.0, epsilon = 1e-14);
        let ev = crate::linalg::eigenvalues_hermitian(&t);
        for (got, want) in ev.iter().zip([-SQRT2, 0.0, 0.0, SQRT2]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_b_side_gives_zero_operator() {
        let mut c = chsh_candidate();
        c.b1 = OperatorMatrix::zeros(4, 4);
        c.b2 = OperatorMatrix::zeros(4, 4);
        assert_eq!(bell_operator(&c).unwrap().norm(), 0.0);
    }

    #[test]
    fn invalid_candidates_rejected() {
        let mut c = chsh_candidate();
        c.a1 *= cplx(2.0);
        assert!(bell_operator(&c).is_err());
        let mut c = chsh_candidate();
        c.b1 = kron(&pauli::<f64>(1), &identity(2));
        assert!(bell_operator(&c).is_err());
    }

    #[test]
    fn correlation_values() {
        let singlet = make_state(StateSpec::Singlet).unwrap();
        let rnd = make_state::<f64>(StateSpec::Random {
            seed: 2,
            dim: 4,
            rank: 3,
        })
        .unwrap();
        let one = BellCandidate::identity(4);
        assert_abs_diff_eq!(correlation_value(&rnd, &one).unwrap(), 1.0, epsilon = 1e-14);

        let c = chsh_candidate();
        assert_abs_diff_eq!(correlation_value(&singlet, &c).unwrap(), -SQRT2, epsilon = 1e-14);
        assert_abs_diff_eq!(
            correlation_value(&singlet, &c.negate_a()).unwrap(),
            SQRT2,
            epsilon = 1e-14
        );

        let mixed = State::maximally_mixed(4);
        assert_abs_diff_eq!(correlation_value(&mixed, &c).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn best_response_examples() {
        let (a, _) = qubit_pair();
        let singlet = make_state(StateSpec::Singlet).unwrap();

        let r = best_response(&singlet, &a, &OperatorMatrix::zeros(4, 4)).unwrap();
        assert_abs_diff_eq!((r - identity::<f64>(4)).norm(), 0.0, epsilon = 1e-14);

        let x = kron(&identity(2), &pauli::<f64>(3));
        let r = best_response(&singlet, &a, &x).unwrap();
        let want = -kron(&pauli::<f64>(3), &identity(2));
        assert_abs_diff_eq!((&r - want).norm(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(singlet.expect(&(&r * &x)).re, 1.0, epsilon = 1e-12);

        // x outside the commutant
        assert!(best_response(&singlet, &a, &kron(&pauli::<f64>(1), &identity(2))).is_err());
    }

    #[test]
    fn best_response_diagonal_is_componentwise() {
        let diag = Algebra::<f64>::diagonal(3).unwrap();
        let rho = make_state(StateSpec::Random {
            seed: 8,
            dim: 3,
            rank: 3,
        })
        .unwrap();
        let x = crate::linalg::diagonal(&[1.0, -2.0, 0.5]);
        let r = best_response(&rho, &diag, &x).unwrap();
        let y = hermitian_part(&(&x * rho.rho()));
        for i in 0..3 {
            let want = if y[(i, i)].re < 0.0 { -1.0 } else { 1.0 };
            assert_abs_diff_eq!(r[(i, i)].re, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn singlet_reaches_tsirelson() {
        let (a, b) = qubit_pair();
        let singlet = make_state(StateSpec::Singlet).unwrap();
        let rep = maximize_bell(&singlet, &a, &b, &OptimizerOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.beta, SQRT2, epsilon = 1e-6);
        assert!(rep.converged);
        rep.candidate.validate_in(&a, &b).unwrap();
        assert_abs_diff_eq!(
            correlation_value(&singlet, &rep.candidate).unwrap(),
            rep.beta,
            epsilon = 1e-9
        );
    }

    #[test]
    fn product_and_abelian_give_one() {
        let (a, b) = qubit_pair();
        let r1 = make_state(StateSpec::Random {
            seed: 1,
            dim: 2,
            rank: 2,
        })
        .unwrap();
        let r2 = make_state(StateSpec::Random {
            seed: 2,
            dim: 2,
            rank: 1,
        })
        .unwrap();
        let prod = make_state(StateSpec::Product(r1, r2)).unwrap();
        let rep = maximize_bell(&prod, &a, &b, &OptimizerOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.beta, 1.0, epsilon = 1e-9);

        let diag = Algebra::<f64>::diagonal(2).unwrap().tensor_identity_right(2).unwrap();
        let singlet = make_state(StateSpec::Singlet).unwrap();
        let rep = maximize_bell(&singlet, &diag, &b, &OptimizerOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.beta, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn werner_matches_closed_form() {
        let (a, b) = qubit_pair();
        let w = make_state(StateSpec::Werner { w: 0.9 }).unwrap();
        let rep = maximize_bell(&w, &a, &b, &OptimizerOptions::default()).unwrap();
        assert_abs_diff_eq!(rep.beta, 0.9 * SQRT2, epsilon = 1e-5);
    }

    #[test]
    fn non_commuting_pair_rejected() {
        let full = Algebra::<f64>::full(4).unwrap();
        let s = State::maximally_mixed(4);
        assert!(maximize_bell(&s, &full, &full, &OptimizerOptions::default()).is_err());
    }

    #[test]
    fn see_saw_is_monotone() {
        let (a, b) = qubit_pair();
        let s = make_state(StateSpec::Random {
            seed: 17,
            dim: 4,
            rank: 2,
        })
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let b1 = random_observable(&b, &mut rng);
            let b2 = random_observable(&b, &mut rng);
            let run = see_saw(&s, &a, &b, b1, b2, &OptimizerOptions::default());
            for w in run.history.windows(2) {
                assert!(w[1] >= w[0] - 1e-12, "{} -> {}", w[0], w[1]);
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let (a, b) = qubit_pair();
        let singlet = make_state(StateSpec::Singlet).unwrap();
        assert!(brute_force_beta(&singlet, &a, &b, 64).unwrap() >= SQRT2 - 0.01);
        // swapped orientation
        assert!(brute_force_beta(&singlet, &b, &a, 64).unwrap() >= SQRT2 - 0.01);

        let mixed = State::maximally_mixed(4);
        assert_abs_diff_eq!(brute_force_beta(&mixed, &a, &b, 32).unwrap(), 1.0, epsilon = 1e-9);

        let half = make_state(StateSpec::Werner { w: 0.5 }).unwrap();
        assert_abs_diff_eq!(brute_force_beta(&half, &a, &b, 64).unwrap(), 1.0, epsilon = 1e-3);

        let diag = Algebra::<f64>::diagonal(4).unwrap();
        assert!(brute_force_beta(&mixed, &diag, &b, 16).is_err());
        assert!(brute_force_beta(&mixed, &a, &b, 4).is_err());
    }

    #[test]
    fn brute_force_odd_resolution() {
        let (a, b) = qubit_pair();
        let w = make_state(StateSpec::Werner { w: 0.9 }).unwrap();
        let v = brute_force_beta(&w, &a, &b, 41).unwrap();
        assert!(v <= 0.9 * SQRT2 + 1e-12);
        assert!(v >= 0.9 * SQRT2 - 0.02);
    }

    #[test]
    fn diagnostics_at_maximal_violation() {
        let (a, b) = qubit_pair();
        let singlet = make_state(StateSpec::Singlet).unwrap();
        let rep = maximize_bell(&singlet, &a, &b, &OptimizerOptions::default()).unwrap();
        let d = structural_diagnostics(&singlet, &rep).unwrap();
        assert!(d.max_residual() <= 1e-4, "{d:?}");
    }

    #[test]
    fn diagnostics_of_identity_candidate() {
        let s = State::maximally_mixed(4);
        let rep = BellReport {
            beta: 1.0,
            candidate: BellCandidate::identity(4),
            iterations: 0,
            restarts_used: 1,
            converged: true,
        };
        let d = structural_diagnostics(&s, &rep).unwrap();
        assert_eq!(d.sq_residuals, [0.0; 4]);
        assert_abs_diff_eq!(d.anticomm_residuals[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.anticomm_residuals[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_paulis_form_i2_generator() {
        let (sq, unit) = i2_generator_residuals(&pauli::<f64>(3), &pauli(1));
        assert_eq!(sq, 0.0);
        assert_eq!(unit, 0.0);
    }
}
