//! Property tests: symbolic Pauli algebra against dense matrices, tensor
//! identities, spectral reconstruction, channel representations, and sample
//! planning.

use proptest::prelude::*;

use qpv::channel::QuantumProcess;
use qpv::pauli::{CliffordCircuit, Gate, PauliString};
use qpv::strategy::{confidence, plan_samples, AapvStrategy, Test};
use qpv::tensor::{eig_hermitian, Matrix, Operator, C64};

fn arb_pauli(n: usize) -> impl Strategy<Value = PauliString> {
    let mask = (1u64 << n) - 1;
    (0..=mask, 0..=mask, 0u8..4)
        .prop_map(move |(x, z, k)| PauliString::from_parts(n, x, z, k).unwrap())
}

fn arb_gate(n: usize) -> impl Strategy<Value = Gate> {
    prop_oneof![
        (0..n).prop_map(Gate::H),
        (0..n).prop_map(Gate::S),
        (0..n, 1..n).prop_map(move |(c, shift)| Gate::Cnot(c, (c + shift) % n)),
    ]
}

fn arb_matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), rows * cols).prop_map(move |vals| {
        Matrix::from_iterator(rows, cols, vals.into_iter().map(|(re, im)| C64::new(re, im)))
    })
}

fn arb_operator(dims: Vec<usize>) -> impl Strategy<Value = Operator> {
    let d: usize = dims.iter().product();
    arb_matrix(d, d).prop_map(move |m| Operator::new(m, dims.clone()).unwrap())
}

/// Random density operator: normalized Gram matrix of a random square matrix.
fn arb_density(dims: Vec<usize>) -> impl Strategy<Value = Operator> {
    arb_operator(dims).prop_map(|a| {
        let gram = a.matrix() * a.matrix().adjoint();
        let gram = &gram + Matrix::identity(gram.nrows(), gram.ncols()).scale(1e-6);
        let tr = gram.trace();
        Operator::new(gram / tr, a.dims().to_vec()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn pauli_text_round_trips(p in arb_pauli(4)) {
        let back = PauliString::parse(&p.to_string()).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn pauli_product_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
        let symbolic = a.mul(&b).unwrap().to_matrix().unwrap();
        let dense = a.to_matrix().unwrap().matrix() * b.to_matrix().unwrap().matrix();
        prop_assert!((symbolic.matrix() - dense).camax() < 1e-12);
    }

    #[test]
    fn pauli_commutation_matches_dense(a in arb_pauli(3), b in arb_pauli(3)) {
        let am = a.to_matrix().unwrap();
        let bm = b.to_matrix().unwrap();
        let comm = (am.matrix() * bm.matrix() - bm.matrix() * am.matrix()).camax();
        prop_assert_eq!(a.commutes(&b), comm < 1e-12);
    }

    #[test]
    fn pauli_tensor_matches_kron(a in arb_pauli(2), b in arb_pauli(2)) {
        let symbolic = a.tensor(&b).unwrap().to_matrix().unwrap();
        let dense = a.to_matrix().unwrap().kron(&b.to_matrix().unwrap()).unwrap();
        prop_assert!(symbolic.max_diff(&dense) < 1e-12);
    }

    #[test]
    fn pauli_action_matches_dense_on_basis(p in arb_pauli(3), idx in 0usize..8) {
        let mut v = qpv::tensor::Vector::zeros(8);
        v[idx] = C64::new(1.0, 0.0);
        let applied = p.apply(&v);
        let dense = p.to_matrix().unwrap().matrix() * &v;
        prop_assert!((applied - dense).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::with_cases(64) })]

    #[test]
    fn clifford_conjugation_matches_dense(
        gates in prop::collection::vec(arb_gate(3), 0..8),
        p in arb_pauli(3),
    ) {
        let c = CliffordCircuit::new(3, gates).unwrap();
        let symbolic = c.conjugate(&p).unwrap().to_matrix().unwrap();
        let u = c.unitary().unwrap();
        let dense = u.matrix() * p.to_matrix().unwrap().matrix() * u.matrix().adjoint();
        prop_assert!((symbolic.matrix() - dense).camax() < 1e-12);
    }

    #[test]
    fn kron_mixed_product(
        a in arb_operator(vec![2]),
        b in arb_operator(vec![2]),
        c in arb_operator(vec![2]),
        d in arb_operator(vec![2]),
    ) {
        let lhs_m = a.kron(&b).unwrap().matrix() * c.kron(&d).unwrap().matrix();
        let rhs = Operator::new(a.matrix() * c.matrix(), vec![2]).unwrap()
            .kron(&Operator::new(b.matrix() * d.matrix(), vec![2]).unwrap()).unwrap();
        prop_assert!((lhs_m - rhs.matrix()).camax() < 1e-10);
    }

    #[test]
    fn partial_trace_recovers_kron_factors(a in arb_operator(vec![2, 2]), b in arb_operator(vec![2])) {
        let joint = a.kron(&b).unwrap();
        let reduced = joint.partial_trace(&[0, 1]).unwrap();
        let expected = a.scale(b.trace());
        prop_assert!(reduced.max_diff(&expected) < 1e-10);
        // Tracing out everything leaves the full trace.
        let scalar = joint.partial_trace(&[]).unwrap();
        prop_assert!((scalar.matrix()[(0, 0)] - joint.trace()).norm() < 1e-10);
    }

    #[test]
    fn hermitian_eigendecomposition_reconstructs(op in arb_operator(vec![2, 2])) {
        let herm = Operator::new(
            (op.matrix() + op.matrix().adjoint()).scale(0.5),
            vec![2, 2],
        ).unwrap();
        let spec = eig_hermitian(&herm, true).unwrap();
        let mut rebuilt = Matrix::zeros(4, 4);
        for (i, &lambda) in spec.eigenvalues.iter().enumerate() {
            let v = spec.eigenvector(i).unwrap();
            rebuilt += (&v * v.adjoint()).scale(lambda);
        }
        prop_assert!((rebuilt - herm.matrix()).camax() < 1e-9);
    }

    #[test]
    fn choi_application_matches_direct(
        ks in prop::collection::vec(arb_matrix(2, 2), 1..4),
        rho in arb_density(vec![2]),
    ) {
        // Normalize so the map is trace-nonincreasing: dividing by the total
        // Frobenius weight bounds the largest eigenvalue of sum K^dag K by 1.
        let total: f64 = ks.iter().map(|k| k.norm_squared()).sum::<f64>().max(1e-9);
        let ks: Vec<Matrix> = ks.into_iter().map(|k| k.scale(1.0 / total.sqrt())).collect();
        let e = QuantumProcess::kraus(ks, vec![2], vec![2]).unwrap();
        let direct = e.apply(&rho).unwrap();
        let via_choi = e.apply_via_choi(&rho).unwrap();
        prop_assert!(direct.max_diff(&via_choi) < 1e-10);
    }

    #[test]
    fn random_test_mixtures_accept_the_target(
        raw in prop::collection::vec(0.05f64..1.0, 4),
    ) {
        let strings = ["+ZXZX", "+IZZZ", "+ZZIZ", "+XXXI"];
        let total: f64 = raw.iter().sum();
        let target = qpv::protocols::canned("cnot").unwrap().target().clone();
        let tests = strings
            .iter()
            .zip(&raw)
            .map(|(s, &w)| Ok((w / total, Test::pauli(PauliString::parse(s)?)?)))
            .collect::<qpv::Result<Vec<_>>>()
            .unwrap();
        let s = AapvStrategy::new(tests, target, 2, 2).unwrap();
        prop_assert!((s.pass_probability(&s.target().projector()).unwrap() - 1.0).abs() < 1e-10);
        let gap = s.spectral_gap().unwrap();
        prop_assert!(gap > 0.0 && gap <= 1.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn plan_is_monotone_and_minimal(
        eps in 0.002f64..0.3,
        delta in 0.001f64..0.3,
        nu in 0.05f64..1.0,
        shrink in 0.1f64..0.9,
    ) {
        let plan = plan_samples(eps, delta, nu).unwrap();
        prop_assert!(confidence(eps, nu, plan.n).unwrap() <= delta);
        if plan.n > 0 {
            prop_assert!(confidence(eps, nu, plan.n - 1).unwrap() > delta);
        }
        // Tightening any screw can only cost more rounds.
        prop_assert!(plan_samples(eps * shrink, delta, nu).unwrap().n >= plan.n);
        prop_assert!(plan_samples(eps, delta * shrink, nu).unwrap().n >= plan.n);
        prop_assert!(plan_samples(eps, delta, nu * shrink).unwrap().n >= plan.n);
        // The first-order guide ln(1/delta)/(nu*eps) overestimates the exact
        // ceiling, because ln(1/(1-x)) >= x.
        prop_assert!(plan.n as f64 <= plan.n_approx + 1.0);
    }
}
