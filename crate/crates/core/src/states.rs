//! Density matrices.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{check_dim, input_err, Result};
use crate::lattice;
use crate::linalg::{cplx, eigenvalues_hermitian, expectation, hermitian_residual, identity, kron, OperatorMatrix};
use crate::scalar::Real;

/// Minimum eigenvalue above which a state counts as faithful.
pub const FAITHFUL_THRESHOLD: f64 = 1e-8;

/// A density matrix on `C^dim`.
#[derive(Debug, Clone)]
pub struct State<T: Real> {
    rho: OperatorMatrix<T>,
}

/// Recipes accepted by [`make_state`].
#[derive(Debug, Clone)]
pub enum StateSpec<T: Real> {
    /// `(|01⟩ - |10⟩)/√2`.
    Singlet,
    /// `w |ψ⁻⟩⟨ψ⁻| + (1 - w) 1/4`.
    Werner {
        w: T,
    },
    Product(State<T>, State<T>),
    Mixture {
        weights: Vec<T>,
        states: Vec<State<T>>,
    },
    /// `G G† / Tr(G G†)` for a seeded complex Gaussian `dim × rank` matrix `G`.
    Random {
        seed: u64,
        dim: usize,
        rank: usize,
    },
    /// Ground state of an open transverse-field Ising chain.
    TfimGround {
        sites: usize,
        coupling: T,
        field: T,
        tol: T,
    },
    Matrix(OperatorMatrix<T>),
}

impl<T: Real> State<T> {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(rho: OperatorMatrix<T>) -> Result<Self> {
        if !rho.is_square() || rho.nrows() == 0 {
            return input_err("density matrix must be square and non-empty");
        }
        let tol = T::closure_tol();
        if hermitian_residual(&rho) > tol {
            return input_err("density matrix is not Hermitian");
        }
        let tr = rho.trace();
        if (tr.re - T::one()).abs() > tol || tr.im.abs() > tol {
            return input_err(format!("density matrix has trace {:.12}", tr.re.as_f64()));
        }
        let min = eigenvalues_hermitian(&rho)[0];
        if min < -tol {
            return input_err(format!("density matrix has negative eigenvalue {:.3e}", min.as_f64()));
        }
        Ok(Self { rho })
    }

    /// Rank-one state `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &[Complex<T>]) -> Result<Self> {
        let norm2 = v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if norm2 <= T::zero() {
            return input_err("zero vector");
        }
        let d = v.len();
        let rho = DMatrix::from_fn(d, d, |i, j| v[i] * v[j].conj() / norm2);
        Self::new(rho)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            rho: identity(dim) / cplx(T::from_usize(dim).unwrap()),
        }
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn rho(&self) -> &OperatorMatrix<T> {
        &self.rho
    }

    pub fn into_rho(self) -> OperatorMatrix<T> {
        self.rho
    }

    /// `Tr(ρ · op)`.
    pub fn expect(&self, op: &OperatorMatrix<T>) -> Complex<T> {
        expectation(&self.rho, op)
    }

    pub fn min_eigenvalue(&self) -> T {
        eigenvalues_hermitian(&self.rho)[0]
    }

    pub fn is_faithful(&self) -> bool {
        self.min_eigenvalue() >= T::lit(FAITHFUL_THRESHOLD)
    }
}

fn singlet_vector<T: Real>() -> [Complex<T>; 4] {
    let s = T::one() / T::lit(2.0).sqrt();
    [cplx(T::zero()), cplx(s), cplx(-s), cplx(T::zero())]
}

pub fn make_state<T: Real>(spec: StateSpec<T>) -> Result<State<T>> {
    match spec {
        StateSpec::Singlet => State::pure(&singlet_vector::<T>()),
        StateSpec::Werner { w } => {
            if !(T::zero()..=T::one()).contains(&w) {
                return input_err(format!("werner weight {} outside [0, 1]", w.as_f64()));
            }
            let singlet = State::pure(&singlet_vector::<T>())?.rho;
            let mixed = identity::<T>(4) * cplx(T::lit(0.25));
            State::new(singlet * cplx(w) + mixed * cplx(T::one() - w))
        }
        StateSpec::Product(a, b) => State::new(kron(&a.rho, &b.rho)),
        StateSpec::Mixture { weights, states } => {
            if weights.is_empty() || weights.len() != states.len() {
                return input_err("mixture needs one weight per state");
            }
            let tol = T::closure_tol();
            let total = weights.iter().fold(T::zero(), |a, &b| a + b);
            if weights.iter().any(|&w| w < T::zero()) || (total - T::one()).abs() > tol {
                return input_err("mixture weights are not on the simplex");
            }
            let d = states[0].dim();
            let mut rho = OperatorMatrix::zeros(d, d);
            for (w, s) in weights.iter().zip(&states) {
                check_dim(d, s.dim())?;
                rho += &s.rho * cplx(*w);
            }
            State::new(rho)
        }
        StateSpec::Random { seed, dim, rank } => random_state(seed, dim, rank),
        StateSpec::TfimGround {
            sites,
            coupling,
            field,
            tol,
        } => {
            let chain = lattice::build_chain(sites, coupling, field)?;
            lattice::ground_state(&chain, tol)
        }
        StateSpec::Matrix(rho) => State::new(rho),
    }
}

fn random_state<T: Real>(seed: u64, dim: usize, rank: usize) -> Result<State<T>> {
    if dim == 0 || rank == 0 || rank > dim {
        return input_err(format!(
            "random state needs 1 <= rank <= dim, got rank {rank}, dim {dim}"
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = DMatrix::from_fn(dim, rank, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    });
    let gg = &g * g.adjoint();
    let tr = gg.trace().re;
    let mut rho = gg / cplx(tr);
    // exact Hermitian symmetry
    rho = (&rho + rho.adjoint()) * cplx(T::lit(0.5));
    State::new(rho)
}

/// `‖ρ_φ − ρ_ψ‖₁`.
pub fn trace_distance<T: Real>(phi: &State<T>, psi: &State<T>) -> Result<T> {
    check_dim(phi.dim(), psi.dim())?;
    Ok(crate::linalg::trace_norm_hermitian(&(&phi.rho - &psi.rho)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli;
    use approx::assert_abs_diff_eq;

    type S = State<f64>;

    #[test]
    fn singlet_correlations() {
        let s: S = make_state(StateSpec::Singlet).unwrap();
        for k in 1..4 {
            let op = kron(&pauli::<f64>(k), &pauli(k));
            assert_abs_diff_eq!(s.expect(&op).re, -1.0, epsilon = 1e-14);
        }
        assert_abs_diff_eq!((s.rho() * s.rho() - s.rho()).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn werner_zero_is_maximally_mixed() {
        let s: S = make_state(StateSpec::Werner { w: 0.0 }).unwrap();
        assert_abs_diff_eq!((s.rho() - S::maximally_mixed(4).rho()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn werner_out_of_range() {
        assert!(make_state::<f64>(StateSpec::Werner { w: 1.5 }).is_err());
        assert!(make_state::<f64>(StateSpec::Werner { w: -0.1 }).is_err());
    }

    #[test]
    fn mixture_of_identical_states() {
        let rho: S = make_state(StateSpec::Random {
            seed: 4,
            dim: 4,
            rank: 2,
        })
        .unwrap();
        let mix = make_state(StateSpec::Mixture {
            weights: vec![0.5, 0.5],
            states: vec![rho.clone(), rho.clone()],
        })
        .unwrap();
        assert_abs_diff_eq!((mix.rho() - rho.rho()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn mixture_weights_validated() {
        let rho = S::maximally_mixed(2);
        let bad = make_state(StateSpec::Mixture {
            weights: vec![0.7, 0.7],
            states: vec![rho.clone(), rho.clone()],
        });
        assert!(bad.is_err());
        let neg = make_state(StateSpec::Mixture {
            weights: vec![1.5, -0.5],
            states: vec![rho.clone(), rho],
        });
        assert!(neg.is_err());
    }

    #[test]
    fn random_state_is_reproducible_with_requested_rank() {
        let a: S = make_state(StateSpec::Random {
            seed: 9,
            dim: 5,
            rank: 2,
        })
        .unwrap();
        let b: S = make_state(StateSpec::Random {
            seed: 9,
            dim: 5,
            rank: 2,
        })
        .unwrap();
        assert_eq!(a.rho(), b.rho());
        let eig = eigenvalues_hermitian(a.rho());
        assert!(eig[..3].iter().all(|x| x.abs() < 1e-12));
        assert!(eig[3] > 1e-6);
        assert!(!a.is_faithful());
        assert!(make_state::<f64>(StateSpec::Random {
            seed: 9,
            dim: 2,
            rank: 3
        })
        .is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let s: S = make_state(StateSpec::Random {
            seed: 1,
            dim: 3,
            rank: 3,
        })
        .unwrap();
        assert_abs_diff_eq!(trace_distance(&s, &s).unwrap(), 0.0, epsilon = 1e-14);

        let up = S::pure(&[cplx(1.0), cplx(0.0)]).unwrap();
        let down = S::pure(&[cplx(0.0), cplx(1.0)]).unwrap();
        assert_abs_diff_eq!(trace_distance(&up, &down).unwrap(), 2.0, epsilon = 1e-14);

        let w1: S = make_state(StateSpec::Werner { w: 1.0 }).unwrap();
        let w0: S = make_state(StateSpec::Werner { w: 0.0 }).unwrap();
        assert_abs_diff_eq!(trace_distance(&w1, &w0).unwrap(), 1.5, epsilon = 1e-13);

        assert!(trace_distance(&up, &w0).is_err());
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        assert!(S::new(identity(2)).is_err());
        assert!(S::new(crate::linalg::diagonal(&[1.5, -0.5])).is_err());
        let mut nh = S::maximally_mixed(2).into_rho();
        nh[(0, 1)] = cplx(0.1);
        assert!(S::new(nh).is_err());
    }

    #[test]
    fn faithful_flag() {
        assert!(S::maximally_mixed(3).is_faithful());
        let s: S = make_state(StateSpec::Singlet).unwrap();
        assert!(!s.is_faithful());
    }
}
