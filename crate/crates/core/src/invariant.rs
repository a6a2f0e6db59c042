//! State-independent Bell correlation of a commuting pair.
//!
//! Two independent routes bracket the invariant:
//!
//! * [`beta_star`] maximizes the smallest eigenvalue over the convex hull of
//!   Bell operators with a conditional-gradient (Frank-Wolfe) scheme. Every
//!   iterate is an explicit convex combination of Bell operators, so its
//!   smallest eigenvalue is a certified lower bound.
//! * [`beta_inf`] minimizes `φ ↦ β(φ, A, B)` over density matrices by
//!   projected subgradient descent, which yields an upper bound (up to the
//!   accuracy of the inner see-saw).
//!
//! The two agree in exact arithmetic; [`minimax_gap`] reports the difference.

use crate::algebra::{check_commuting, Algebra};
use crate::bell::{maximize_bell, BellCandidate, OptimizerOptions, MEMBERSHIP_TOL};
use crate::error::{check_dim, input_err, Result};
use crate::linalg::{cplx, eigh, expectation, identity, project_simplex, OperatorMatrix};
use crate::scalar::Real;
use crate::states::State;

/// One side of the bracket on the invariant.
#[derive(Debug, Clone)]
pub struct InvariantReport<T: Real> {
    pub value: T,
    /// Hull element whose smallest eigenvalue is `value` (lower-bound route).
    pub witness_operator: Option<OperatorMatrix<T>>,
    /// Convex weights and Bell candidates making up `witness_operator`.
    pub witness_terms: Vec<(T, BellCandidate<T>)>,
    /// State attaining `value` (upper-bound route).
    pub witness_state: Option<State<T>>,
    /// Width of the bracket certified by the run when it stopped.
    pub gap: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Both bracket ends for one pair.
#[derive(Debug, Clone)]
pub struct MinimaxReport<T: Real> {
    pub star: InvariantReport<T>,
    pub inf: InvariantReport<T>,
}

impl<T: Real> MinimaxReport<T> {
    pub fn gap(&self) -> T {
        self.inf.value - self.star.value
    }

    pub fn converged(&self) -> bool {
        self.star.converged && self.inf.converged
    }
}

fn check_pair<T: Real>(a: &Algebra<T>, b: &Algebra<T>) -> Result<()> {
    check_dim(a.dim(), b.dim())?;
    let res = check_commuting(a, b)?;
    if res > T::lit(MEMBERSHIP_TOL) {
        return input_err(format!("algebras do not commute (residual {:.3e})", res.as_f64()));
    }
    Ok(())
}

fn inner_options(opts: &OptimizerOptions, k: usize) -> OptimizerOptions {
    OptimizerOptions {
        seed: opts.seed.wrapping_add(k as u64),
        ..opts.clone()
    }
}

/// Soft-min weighting of the bottom of the spectrum of `t`, as a state.
fn soft_min_state<T: Real>(t: &OperatorMatrix<T>, temperature: T) -> (T, State<T>) {
    let eig = eigh(t);
    let lam_min = eig.min();
    let mut weights: Vec<T> = eig
        .values
        .iter()
        .map(|&l| (-(l - lam_min) / temperature).exp())
        .collect();
    let total = weights.iter().fold(T::zero(), |a, &b| a + b);
    for w in &mut weights {
        *w /= total;
    }
    let mut i = 0;
    let rho = eig.map(|_| {
        let w = weights[i];
        i += 1;
        w
    });
    let rho = (&rho + rho.adjoint()) * cplx(T::lit(0.5));
    (
        lam_min,
        State::new(rho).expect("soft-min weights form a density matrix"),
    )
}

/// Lower bound `β*(A, B) = sup λ_min(T)` over the convex hull of Bell operators.
///
/// Starts from the unit (a Bell operator with `λ_min = 1`). At each step the
/// soft-min state of the iterate selects a vertex via [`maximize_bell`] and
/// the iterate moves toward it with step `2/(k+2)`. The bracket
/// `min_k β(σ_k) − best λ_min` is the stopping gap.
pub fn beta_star<T: Real>(a: &Algebra<T>, b: &Algebra<T>, opts: &OptimizerOptions) -> Result<InvariantReport<T>> {
    check_pair(a, b)?;
    let d = a.dim();
    let temperature = T::lit(opts.temperature);
    let mut terms: Vec<(T, BellCandidate<T>)> = vec![(T::one(), BellCandidate::identity(d))];
    let mut current = identity::<T>(d);

    let mut best_value = T::min_value().unwrap();
    let mut best_operator = current.clone();
    let mut best_terms = terms.clone();
    let mut upper = T::max_value().unwrap();
    let mut converged = false;
    let mut iterations = 0;

    for k in 0..opts.max_iterations.max(1) {
        iterations = k + 1;
        let (lam_min, sigma) = soft_min_state(&current, temperature);
        if lam_min > best_value {
            best_value = lam_min;
            best_operator = current.clone();
            best_terms = terms.clone();
        }
        let vertex = maximize_bell(&sigma, a, b, &inner_options(opts, k))?;
        upper = upper.min(vertex.beta);
        if upper - best_value < T::lit(opts.gap_tol) {
            converged = true;
            break;
        }
        let gamma = T::lit(2.0) / T::from_usize(k + 2).unwrap();
        let keep = T::one() - gamma;
        for (w, _) in &mut terms {
            *w *= keep;
        }
        terms.retain(|(w, _)| *w > T::zero());
        let vertex_op = vertex.candidate.operator();
        current = current * cplx(keep) + vertex_op * cplx(gamma);
        terms.push((gamma, vertex.candidate));
    }
    if !converged {
        let lam_min = eigh(&current).min();
        if lam_min > best_value {
            best_value = lam_min;
            best_operator = current;
            best_terms = terms;
        }
    }
    Ok(InvariantReport {
        value: best_value,
        witness_operator: Some(best_operator),
        witness_terms: best_terms,
        witness_state: None,
        gap: upper - best_value,
        iterations,
        converged,
    })
}

/// Euclidean projection onto density matrices.
fn project_density<T: Real>(h: &OperatorMatrix<T>) -> OperatorMatrix<T> {
    let eig = eigh(h);
    let p = project_simplex(&eig.values);
    let mut i = 0;
    let rho = eig.map(|_| {
        let w = p[i];
        i += 1;
        w
    });
    (&rho + rho.adjoint()) * cplx(T::lit(0.5))
}

/// Upper bound `β(A, B) = inf_φ β(φ, A, B)` by projected subgradient descent.
///
/// Starts at the maximally mixed state. The Bell operator of the inner
/// optimizer is a subgradient; the step is `opts.step / √k`. The running
/// average of subgradients lies in the hull, so its smallest eigenvalue
/// (or 1, whichever is larger) bounds the invariant from below and closes
/// the stopping bracket.
pub fn beta_inf<T: Real>(a: &Algebra<T>, b: &Algebra<T>, opts: &OptimizerOptions) -> Result<InvariantReport<T>> {
    check_pair(a, b)?;
    let d = a.dim();
    let mut phi = State::maximally_mixed(d);
    let mut best_value = T::max_value().unwrap();
    let mut best_state = phi.clone();
    let mut avg = OperatorMatrix::<T>::zeros(d, d);
    let mut lower = T::one();
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=opts.max_iterations.max(1) {
        iterations = k;
        let rep = maximize_bell(&phi, a, b, &inner_options(opts, k))?;
        if rep.beta < best_value {
            best_value = rep.beta;
            best_state = phi.clone();
        }
        let grad = rep.candidate.operator();
        let kf = T::from_usize(k).unwrap();
        avg = avg * cplx((kf - T::one()) / kf) + &grad * cplx(T::one() / kf);
        lower = lower.max(eigh(&avg).min());
        if best_value - lower < T::lit(opts.gap_tol) {
            converged = true;
            break;
        }
        let step = T::lit(opts.step) / kf.sqrt();
        let moved = phi.rho() - grad * cplx(step);
        phi = State::new(project_density(&moved)).expect("projection yields a density matrix");
    }
    Ok(InvariantReport {
        value: best_value,
        witness_operator: None,
        witness_terms: Vec::new(),
        witness_state: Some(best_state),
        gap: best_value - lower,
        iterations,
        converged,
    })
}

/// Runs both routes.
pub fn minimax<T: Real>(a: &Algebra<T>, b: &Algebra<T>, opts: &OptimizerOptions) -> Result<MinimaxReport<T>> {
    Ok(MinimaxReport {
        star: beta_star(a, b, opts)?,
        inf: beta_inf(a, b, opts)?,
    })
}

/// `beta_inf − beta_star`; zero in exact arithmetic.
pub fn minimax_gap<T: Real>(a: &Algebra<T>, b: &Algebra<T>, opts: &OptimizerOptions) -> Result<T> {
    Ok(minimax(a, b, opts)?.gap())
}

/// Smallest value of `Tr(φ T)` over the supplied states; used to check that
/// a witness operator bounds every state from below.
pub fn min_expectation<T: Real>(t: &OperatorMatrix<T>, states: &[State<T>]) -> T {
    states
        .iter()
        .map(|s| expectation(s.rho(), t).re)
        .fold(T::max_value().unwrap(), |a, b| a.min(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::direct_sum_pair;
    use crate::bell::maximize_bell;
    use crate::states::{make_state, StateSpec};
    use approx::assert_abs_diff_eq;

    type A = Algebra<f64>;

    fn opts() -> OptimizerOptions {
        OptimizerOptions {
            restarts: 8,
            ..OptimizerOptions::default()
        }
    }

    #[test]
    fn qubit_pair_is_split() {
        let (a, b) = A::matrix_pair(2).unwrap();
        let star = beta_star(&a, &b, &opts()).unwrap();
        assert_abs_diff_eq!(star.value, 1.0, epsilon = 1e-3);
        let w = star.witness_operator.as_ref().unwrap();
        assert_abs_diff_eq!(eigh(w).min(), star.value, epsilon = 1e-12);
        assert!(star.converged);

        let inf = beta_inf(&a, &b, &opts()).unwrap();
        assert_abs_diff_eq!(inf.value, 1.0, epsilon = 1e-3);
        assert!(inf.value >= star.value - 2e-3);
    }

    #[test]
    fn abelian_side_gives_one() {
        let a = A::diagonal(2).unwrap().tensor_identity_right(2).unwrap();
        let (_, b) = A::matrix_pair(2).unwrap();
        let r = minimax(&a, &b, &opts()).unwrap();
        assert_abs_diff_eq!(r.star.value, 1.0, epsilon = 1e-3);
        assert_abs_diff_eq!(r.inf.value, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn direct_sum_of_split_pairs() {
        let (a, b) = A::matrix_pair(2).unwrap();
        let (sa, sb) = direct_sum_pair(&[(a.clone(), b.clone()), (a, b)]).unwrap();
        let star = beta_star(&sa, &sb, &opts()).unwrap();
        assert_abs_diff_eq!(star.value, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn scalars_have_zero_gap() {
        let s = A::scalars(4).unwrap();
        assert_eq!(minimax_gap(&s, &s, &opts()).unwrap(), 0.0);
    }

    #[test]
    fn witness_is_a_convex_combination() {
        let (a, b) = A::matrix_pair(2).unwrap();
        // Force several conditional-gradient steps by a demanding gap.
        let o = OptimizerOptions {
            gap_tol: -1.0,
            max_iterations: 12,
            restarts: 4,
            ..OptimizerOptions::default()
        };
        let star = beta_star(&a, &b, &o).unwrap();
        assert!(!star.converged);
        let total: f64 = star.witness_terms.iter().map(|(w, _)| *w).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        assert!(star.witness_terms.len() <= star.iterations + 1);
        let mut rebuilt = OperatorMatrix::<f64>::zeros(4, 4);
        for (w, c) in &star.witness_terms {
            rebuilt += crate::bell::bell_operator(c).unwrap() * cplx(*w);
        }
        assert!((rebuilt - star.witness_operator.unwrap()).norm() <= 1e-10);
    }

    #[test]
    fn witness_bounds_states_from_below() {
        let (a, b) = A::matrix_pair(2).unwrap();
        let star = beta_star(&a, &b, &opts()).unwrap();
        let states: Vec<_> = (0..20)
            .map(|s| {
                make_state(StateSpec::Random {
                    seed: s,
                    dim: 4,
                    rank: 1 + (s as usize % 4),
                })
                .unwrap()
            })
            .collect();
        let w = star.witness_operator.unwrap();
        assert!(min_expectation(&w, &states) >= star.value - 1e-12);
        for s in &states {
            let beta = maximize_bell(s, &a, &b, &opts()).unwrap().beta;
            assert!(star.value <= beta + 1e-9);
        }
    }

    #[test]
    fn non_commuting_pair_rejected() {
        let full = A::full(2).unwrap();
        assert!(beta_star(&full, &full, &opts()).is_err());
        assert!(beta_inf(&full, &full, &opts()).is_err());
    }

    #[test]
    fn density_projection() {
        let h = crate::linalg::diagonal(&[2.0f64, -1.0, 0.5]);
        let p = project_density(&h);
        let s = State::new(p).unwrap();
        assert_abs_diff_eq!(s.rho()[(0, 0)].re, 1.0, epsilon = 1e-12);
    }
}
