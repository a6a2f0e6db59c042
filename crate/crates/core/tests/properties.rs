use bellcorr::algebra::subspace_distance;
use bellcorr::linalg::{hs_norm, op_norm};
use bellcorr::{
    commutant, conditional_expectation, generate_algebra, spectral_sign, Algebra, BellCandidate, Matrix,
    OptimizerOptions, State, StateSpec,
};
use num_complex::Complex;
use proptest::prelude::*;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn quick() -> OptimizerOptions {
    OptimizerOptions {
        restarts: 6,
        ..OptimizerOptions::default()
    }
}

fn state(seed: u64, dim: usize, rank: usize) -> State {
    bellcorr::make_state(StateSpec::Random { seed, dim, rank }).unwrap()
}

fn hermitian(entries: &[f64], dim: usize) -> Matrix {
    let mut m = Matrix::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        for j in i..dim {
            let z = if i == j {
                Complex::new(entries[k], 0.0)
            } else {
                Complex::new(entries[k], entries[k + 1])
            };
            k += if i == j { 1 } else { 2 };
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

fn arb_hermitian(dim: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-1.0f64..1.0, dim * dim).prop_map(move |v| hermitian(&v, dim))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bicommutant_recovers_generated_algebra(x in arb_hermitian(3), y in arb_hermitian(3), two in any::<bool>()) {
        let gens = if two { vec![x, y] } else { vec![x] };
        let alg = generate_algebra(&gens, 3).unwrap();
        let bi = commutant(&commutant(&alg));
        prop_assert!(subspace_distance(&alg, &bi) <= 1e-8);
    }

    #[test]
    fn trace_distance_is_a_metric(s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (a, b, c) = (state(s1, 3, 2), state(s2, 3, 3), state(s3, 3, 1));
        let ab = bellcorr::trace_distance(&a, &b).unwrap();
        let bc = bellcorr::trace_distance(&b, &c).unwrap();
        let ac = bellcorr::trace_distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!((ab - bellcorr::trace_distance(&b, &a).unwrap()).abs() <= 1e-12);
        prop_assert!((0.0..=2.0 + 1e-12).contains(&ab));
    }

    #[test]
    fn beta_lies_between_classical_and_tsirelson(seed in any::<u64>(), rank in 1usize..=4) {
        let (a, b) = Algebra::matrix_pair(2).unwrap();
        let beta = bellcorr::maximize_bell(&state(seed, 4, rank), &a, &b, &quick()).unwrap().beta;
        prop_assert!((1.0 - 1e-9..=SQRT2 + 1e-9).contains(&beta), "{}", beta);
    }

    #[test]
    fn beta_monotone_under_algebra_inclusion(seed in any::<u64>(), rank in 1usize..=4) {
        let s = state(seed, 4, rank);
        let (a, b) = Algebra::matrix_pair(2).unwrap();
        let small = Algebra::diagonal(2).unwrap().tensor_identity_right(2).unwrap();
        let big = bellcorr::maximize_bell(&s, &a, &b, &quick()).unwrap().beta;
        let sub = bellcorr::maximize_bell(&s, &small, &b, &quick()).unwrap().beta;
        prop_assert!(sub <= big + 1e-9);
    }

    #[test]
    fn negating_one_side_negates_the_correlation(seed in any::<u64>(), obs in prop::collection::vec(arb_hermitian(2), 4)) {
        let s = state(seed, 4, 4);
        let id = bellcorr::linalg::identity::<f64>(2);
        let c: Vec<Matrix> = obs.iter().map(|m| spectral_sign(m).unwrap()).collect();
        let cand = BellCandidate::new(
            bellcorr::linalg::kron(&c[0], &id),
            bellcorr::linalg::kron(&c[1], &id),
            bellcorr::linalg::kron(&id, &c[2]),
            bellcorr::linalg::kron(&id, &c[3]),
        );
        let v = bellcorr::correlation_value(&s, &cand).unwrap();
        let w = bellcorr::correlation_value(&s, &cand.negate_a()).unwrap();
        prop_assert!((v + w).abs() <= 1e-12);
        prop_assert!(v.abs() <= SQRT2 + 1e-9);
    }

    #[test]
    fn conditional_expectation_is_an_orthogonal_projection(x in arb_hermitian(4)) {
        let (a, _) = Algebra::matrix_pair(2).unwrap();
        let p = conditional_expectation(&a, &x).unwrap();
        let pp = conditional_expectation(&a, &p).unwrap();
        prop_assert!(hs_norm(&(&pp - &p)) <= 1e-12);
        prop_assert!(hs_norm(&p) <= hs_norm(&x) + 1e-12);
        prop_assert!((p.trace() - x.trace()).norm() <= 1e-12);
    }

    #[test]
    fn spectral_sign_is_an_involutive_contraction(x in arb_hermitian(4)) {
        let s = spectral_sign(&x).unwrap();
        prop_assert!(op_norm(&s) <= 1.0 + 1e-12);
        let id = bellcorr::linalg::identity::<f64>(4);
        prop_assert!(hs_norm(&(&s * &s - id)) <= 1e-10);
    }

    #[test]
    fn clustering_bound_monotone_and_bracketed(g1 in 0.0f64..=1.0, g2 in 0.0f64..=1.0) {
        let (lo, hi) = if g1 <= g2 { (g1, g2) } else { (g2, g1) };
        let (b_lo, b_hi) = (bellcorr::clustering_bound(lo).unwrap(), bellcorr::clustering_bound(hi).unwrap());
        prop_assert!(b_lo <= b_hi + 1e-15);
        prop_assert!(b_lo >= 1.0 - 1e-15 && b_hi <= SQRT2 + 1e-15);
    }

    #[test]
    fn decay_fit_recovers_exact_curves(m in 0.05f64..2.0, c in 0.01f64..3.0) {
        let curve: Vec<(f64, f64)> = (0..5).map(|a| (a as f64, 1.0 + c * (-m * a as f64).exp())).collect();
        let f = bellcorr::fit_decay(&curve).unwrap();
        prop_assert!((f.rate - m).abs() <= 1e-9 && (f.amplitude - c).abs() <= 1e-9 * c.max(1.0));
    }
}
