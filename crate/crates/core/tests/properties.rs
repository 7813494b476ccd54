use eof_core::ensembles::{flagged_state, hjw_ensemble, mix, Ensemble, PRUNE_TOL};
use eof_core::eof::{concurrence_2q, eof_pure, eof_wootters_2q};
use eof_core::probes::{check_flagged_identity, ssa_gap, SuiteParams};
use eof_core::qmat::{herm_eig, kron, CMatrix, CVector};
use eof_core::qstate::{
    partial_trace, reduced_state, schmidt, shannon_entropy, tensor, von_neumann_entropy, Cut, DensityMatrix,
};
use eof_core::statezoo::{
    case1_state, random_density, random_density_with, random_isometry, random_pure, random_unitary_with, stream_rng,
    werner_state, Case1Spec,
};
use proptest::prelude::*;

fn frob(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).frobenius_norm()
}

fn local_unitary(seed: u64, d1: usize, d2: usize) -> CMatrix {
    let mut rng = stream_rng(seed, 99);
    let u1 = random_unitary_with(&mut rng, d1).unwrap();
    let u2 = random_unitary_with(&mut rng, d2).unwrap();
    kron(&u1, &u2).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_mixed_product(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let a = random_unitary_with(&mut rng, 2).unwrap();
        let b = random_unitary_with(&mut rng, 3).unwrap();
        let x = random_unitary_with(&mut rng, 2).unwrap();
        let y = random_unitary_with(&mut rng, 3).unwrap();
        let lhs = &kron(&a, &b).unwrap() * &kron(&x, &y).unwrap();
        let rhs = kron(&(&a * &x), &(&b * &y)).unwrap();
        prop_assert!(frob(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 2usize..7) {
        let rho = random_density(d, d, seed).unwrap();
        let e = herm_eig(rho.matrix(), 1e-9).unwrap();
        prop_assert!(frob(&e.reconstruct(), rho.matrix()) < 1e-10);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn isometries_are_isometric(seed in any::<u64>(), n in 1usize..6, extra in 0usize..6) {
        let u = random_isometry(n + extra, n, seed).unwrap();
        prop_assert!(u.matrix().isometry_defect() < 1e-10);
    }

    #[test]
    fn hjw_members_mix_back(seed in any::<u64>(), d in 2usize..7, rank in 1usize..5, extra in 0usize..8) {
        let rank = rank.min(d);
        let rho = random_density(d, rank, seed).unwrap();
        let u = random_isometry(rank + extra, rank, seed ^ 1).unwrap();
        let e = hjw_ensemble(&rho, &u, PRUNE_TOL).unwrap();
        prop_assert!((e.weights().iter().sum::<f64>() - 1.0).abs() < 1e-10);
        prop_assert!(frob(mix(&e).matrix(), rho.matrix()) < 1e-9);
    }

    #[test]
    fn flagged_entropy_splits(seed in any::<u64>(), k in 2usize..5, d in 2usize..5) {
        let mut rng = stream_rng(seed, 0);
        let states: Vec<DensityMatrix> =
            (0..k).map(|i| random_density_with(&mut rng, vec![d], 1 + i % d).unwrap()).collect();
        let raw: Vec<f64> = (0..k).map(|i| 1.0 + ((seed >> (8 * i)) & 0xff) as f64).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rhs = shannon_entropy(&p).unwrap()
            + p.iter().zip(&states).map(|(w, s)| w * von_neumann_entropy(s)).sum::<f64>();
        let lhs = von_neumann_entropy(&flagged_state(&p, &states).unwrap());
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..7) {
        let rho = random_density(d, d, seed).unwrap();
        let w = random_unitary_with(&mut stream_rng(seed, 1), d).unwrap();
        let turned = rho.conjugate_by(&w).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&turned)).abs() < 1e-9);
    }

    #[test]
    fn pure_bipartitions_share_entropy(seed in any::<u64>(), d1 in 2usize..5, d2 in 2usize..5) {
        let psi = random_pure(vec![d1, d2], seed).unwrap();
        let sa = von_neumann_entropy(&reduced_state(&psi, &[0]).unwrap());
        let sb = von_neumann_entropy(&reduced_state(&psi, &[1]).unwrap());
        let dec = schmidt(&psi, &Cut::new([0])).unwrap();
        prop_assert!((sa - sb).abs() < 1e-9);
        prop_assert!((dec.entropy() - sa).abs() < 1e-9);
        prop_assert!((dec.reconstruct() - psi.vector()).norm() < 1e-10);
    }

    #[test]
    fn partial_trace_keeps_unit_trace(seed in any::<u64>()) {
        let rho = random_density_with(&mut stream_rng(seed, 0), vec![2, 3, 2], 5).unwrap();
        for keep in [&[0][..], &[1], &[0, 2], &[2, 1]] {
            let r = partial_trace(&rho, keep).unwrap();
            prop_assert!((r.matrix().trace().re - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn strong_subadditivity_holds(seed in any::<u64>()) {
        let psi = random_pure(vec![2, 2, 2, 2], seed).unwrap();
        let rho = reduced_state(&psi, &[0, 1, 2]).unwrap();
        prop_assert!(ssa_gap(&rho).unwrap() >= -1e-9);
    }

    #[test]
    fn product_extension_saturates_ssa(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 0);
        let r12 = random_density_with(&mut rng, vec![2, 2], 3).unwrap();
        let r3 = random_density_with(&mut rng, vec![2], 2).unwrap();
        prop_assert!(ssa_gap(&tensor(&r12, &r3).unwrap()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn case1_marginals_are_diagonal(seed in any::<u64>(), rows in 1usize..4, cols in 1usize..4) {
        let spec = Case1Spec::random(rows, cols, seed).unwrap();
        let psi = case1_state(&spec).unwrap();
        let expect_a = CMatrix::from_real_diagonal(&spec.row_marginals());
        let expect_a2 = CMatrix::from_real_diagonal(&spec.col_marginals());
        prop_assert!(frob(reduced_state(&psi, &[0]).unwrap().matrix(), &expect_a) < 1e-10);
        prop_assert!(frob(reduced_state(&psi, &[2]).unwrap().matrix(), &expect_a2) < 1e-10);
    }

    #[test]
    fn werner_states_are_twirl_invariant(seed in any::<u64>(), d in 2usize..4, phi in -1.0f64..=1.0) {
        let rho = werner_state(d, phi).unwrap();
        let w = random_unitary_with(&mut stream_rng(seed, 0), d).unwrap();
        let turned = rho.conjugate_by(&kron(&w, &w).unwrap()).unwrap();
        prop_assert!(frob(turned.matrix(), rho.matrix()) < 1e-9);
    }

    #[test]
    fn concurrence_is_local_unitary_invariant(seed in any::<u64>(), rank in 1usize..5) {
        let rho = random_density_with(&mut stream_rng(seed, 0), vec![2, 2], rank).unwrap();
        let c = concurrence_2q(&rho).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&c));
        let turned = rho.conjugate_by(&local_unitary(seed, 2, 2)).unwrap();
        prop_assert!((concurrence_2q(&turned).unwrap() - c).abs() < 1e-7);
        let e = eof_wootters_2q(&rho).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&e));
    }

    #[test]
    fn pure_eof_is_additive(seed in any::<u64>()) {
        let a = random_pure(vec![2, 3], seed).unwrap();
        let b = random_pure(vec![2, 2], seed ^ 7).unwrap();
        let ab = a.tensor(&b).unwrap();
        let sum = eof_pure(&a, &Cut::new([0])).unwrap() + eof_pure(&b, &Cut::new([0])).unwrap();
        prop_assert!((eof_pure(&ab, &Cut::new([0, 2])).unwrap() - sum).abs() < 1e-9);
    }

    #[test]
    fn eigen_ensemble_mixes_back(seed in any::<u64>(), d in 2usize..6) {
        let rho = random_density(d, d, seed).unwrap();
        let e = Ensemble::eigen(&rho);
        prop_assert!(frob(mix(&e).matrix(), rho.matrix()) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn reports_are_reproducible(seed in any::<u64>()) {
        let params = SuiteParams { samples: 12, dims: vec![2, 3], seed, tol: 1e-9 };
        let a = serde_json::to_string(&check_flagged_identity(&params).unwrap()).unwrap();
        let b = serde_json::to_string(&check_flagged_identity(&params).unwrap()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn basis_vectors_have_zero_entropy() {
    let v = CVector::from_fn(4, |i, _| eof_core::qmat::c64(if i == 2 { 1.0 } else { 0.0 }, 0.0));
    let psi = eof_core::qstate::PureState::new(vec![2, 2], v).unwrap();
    assert_eq!(eof_pure(&psi, &Cut::new([0])).unwrap(), 0.0);
}
