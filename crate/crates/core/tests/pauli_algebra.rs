use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use vqnhite_core::exact::apply_sum;
use vqnhite_core::pauli::{parse_bits, IM, ONE};
use vqnhite_core::*;

fn single(p: Pauli) -> DMatrix<Complex64> {
    let z = Complex64::default();
    match p {
        Pauli::I => DMatrix::from_row_slice(2, 2, &[ONE, z, z, ONE]),
        Pauli::X => DMatrix::from_row_slice(2, 2, &[z, ONE, ONE, z]),
        Pauli::Y => DMatrix::from_row_slice(2, 2, &[z, -IM, IM, z]),
        Pauli::Z => DMatrix::from_row_slice(2, 2, &[ONE, z, z, -ONE]),
    }
}

/// Kronecker product with qubit 0 as the most significant factor.
fn kron_oracle(p: &PauliString) -> DMatrix<Complex64> {
    p.letters()
        .iter()
        .fold(DMatrix::from_element(1, 1, ONE), |acc, &l| acc.kronecker(&single(l)))
}

fn pauli() -> impl Strategy<Value = Pauli> {
    prop_oneof![Just(Pauli::I), Just(Pauli::X), Just(Pauli::Y), Just(Pauli::Z)]
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    proptest::collection::vec(pauli(), n).prop_map(|l| PauliString::new(l).unwrap())
}

fn dense_exp(h: &DMatrix<Complex64>, t: f64) -> DMatrix<Complex64> {
    let eig = nalgebra::SymmetricEigen::new(h.clone());
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| Complex64::from((-e * t).exp())));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

fn op_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.max()
}

#[test]
fn spec_examples() {
    let p: PauliString = "XYZ".parse().unwrap();
    let (phase, t) = p.apply(parse_bits("011").unwrap()).unwrap();
    assert_eq!(t, parse_bits("101").unwrap());
    assert!((phase - IM).norm() < 1e-15);

    let (c, q) = "XI"
        .parse::<PauliString>()
        .unwrap()
        .mul(&"YI".parse().unwrap())
        .unwrap();
    assert_eq!(q.to_string(), "ZI");
    assert!((c - IM).norm() < 1e-15);

    let h = build_heisenberg(2, -1.0, &[0.5, -0.25]).unwrap();
    assert_eq!(h.len(), 5);
    assert!((h.coefficient(&"XX".parse().unwrap()) + 1.0).norm() < 1e-15);
    assert!((h.coefficient(&"IZ".parse().unwrap()) + 0.25).norm() < 1e-15);
    assert!(build_heisenberg(3, -1.0, &[0.1]).is_err());
}

#[test]
fn heisenberg_dense_matches_kron_oracle() {
    let fields = [0.3, -0.9, 0.4];
    let h = build_heisenberg(3, -1.0, &fields).unwrap();
    let mut oracle = DMatrix::zeros(8, 8);
    for j in 0..2 {
        for l in [Pauli::X, Pauli::Y, Pauli::Z] {
            oracle -= kron_oracle(&PauliString::from_sparse(3, &[(j, l), (j + 1, l)]).unwrap());
        }
    }
    for (j, hj) in fields.iter().enumerate() {
        oracle += kron_oracle(&PauliString::from_sparse(3, &[(j, Pauli::Z)]).unwrap()) * Complex64::from(*hj);
    }
    assert!((h.to_dense().unwrap() - oracle).norm() < 1e-12);
    assert!(h.is_hermitian());
}

#[test]
fn dense_limit_is_enforced() {
    let h = build_heisenberg(4, -1.0, &[0.0; 4]).unwrap();
    assert!(matches!(h.to_dense_with_limit(3), Err(Error::DenseLimit { .. })));
}

#[test]
fn taylor_error_is_third_order() {
    let h = build_heisenberg(2, -1.0, &[0.7, -0.3]).unwrap();
    let dense = h.to_dense().unwrap();
    let err = |dbeta: f64| {
        let t = taylor_ite_pauli(&h, dbeta, 2).unwrap().to_dense().unwrap();
        op_norm(&(t - dense_exp(&dense, dbeta)))
    };
    for dbeta in [0.2, 0.1, 0.05] {
        let ratio = err(dbeta) / err(dbeta / 2.0);
        assert!((ratio - 8.0).abs() < 1.6, "ratio {ratio} at {dbeta}");
    }
}

#[test]
fn first_order_taylor_is_second_order_accurate() {
    let h = build_heisenberg(2, -1.0, &[0.2, 0.5]).unwrap();
    let dense = h.to_dense().unwrap();
    let err = |dbeta: f64| {
        let t = taylor_ite_pauli(&h, dbeta, 1).unwrap().to_dense().unwrap();
        op_norm(&(t - dense_exp(&dense, dbeta)))
    };
    let ratio = err(0.05) / err(0.025);
    assert!((ratio - 4.0).abs() < 0.8, "{ratio}");
}

#[test]
fn taylor_rejects_bad_input() {
    let h = build_heisenberg(2, -1.0, &[0.2, 0.5]).unwrap();
    assert!(taylor_ite_pauli(&h, -0.1, 2).is_err());
    assert!(taylor_ite_pauli(&h, 0.1, 3).is_err());
    let anti = PauliSum::from_terms(1, vec![(IM, "X".parse().unwrap())]).unwrap();
    assert!(taylor_ite_pauli(&anti, 0.1, 2).is_err());
}

proptest! {
    #[test]
    fn to_dense_matches_kron(p in pauli_string(3)) {
        prop_assert!((p.to_dense().unwrap() - kron_oracle(&p)).norm() < 1e-14);
    }

    #[test]
    fn product_matches_dense(a in pauli_string(3), b in pauli_string(3)) {
        let (c, q) = a.mul(&b).unwrap();
        let lhs = kron_oracle(&a) * kron_oracle(&b);
        prop_assert!((lhs - kron_oracle(&q) * c).norm() < 1e-13);
        prop_assert!((c.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_twice_is_identity(p in pauli_string(4), s in 0usize..16) {
        let (c1, t) = p.apply(s).unwrap();
        let (c2, back) = p.apply(t).unwrap();
        prop_assert_eq!(back, s);
        prop_assert!((c1 * c2 - ONE).norm() < 1e-15);
    }

    #[test]
    fn apply_matches_dense_column(p in pauli_string(3), s in 0usize..8) {
        let (c, t) = p.apply(s).unwrap();
        let m = kron_oracle(&p);
        for r in 0..8 {
            let expected = if r == t { c } else { Complex64::default() };
            prop_assert!((m[(r, s)] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn display_parse_round_trip(p in pauli_string(5)) {
        let q: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(p, q);
    }

    #[test]
    fn taylor_bound_holds(fields in proptest::collection::vec(-1.0f64..1.0, 3), dbeta in 0.001f64..0.2) {
        let h = build_heisenberg(3, -1.0, &fields).unwrap();
        let dense = h.to_dense().unwrap();
        let t = taylor_ite_pauli(&h, dbeta, 2).unwrap().to_dense().unwrap();
        let err = op_norm(&(t - dense_exp(&dense, dbeta)));
        let x = op_norm(&dense) * dbeta;
        // Remainder of the exponential series beyond second order.
        prop_assert!(err <= x.powi(3) * x.exp() / 6.0 + 1e-13);
    }

    #[test]
    fn apply_sum_matches_dense(fields in proptest::collection::vec(-1.0f64..1.0, 3), re in proptest::collection::vec(-1.0f64..1.0, 8)) {
        let h = build_heisenberg(3, -1.0, &fields).unwrap();
        let psi = StateVector::from_real(3, &re).unwrap();
        let out = apply_sum(&h, &psi).unwrap();
        let dense = h.to_dense().unwrap() * nalgebra::DVector::from_column_slice(psi.amplitudes());
        for k in 0..8 {
            prop_assert!((out[k] - dense[k]).norm() < 1e-12);
        }
    }
}
