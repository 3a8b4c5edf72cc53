use dsm_core::linops::{condition_number, matvec, sym_eigen, Condition};
use dsm_core::problems::{
    gen_random_symmetric, gen_spectrum, read_matrix_market, write_matrix_market,
};
use dsm_core::{ComplexState, SymmetricOperator};
use num_complex::Complex64;
use proptest::prelude::*;

fn operator(n: usize) -> impl Strategy<Value = SymmetricOperator> {
    prop::collection::vec(-10.0f64..10.0, n * (n + 1) / 2).prop_map(move |lower| {
        let mut it = lower.into_iter();
        SymmetricOperator::from_lower_fn(n, |_, _| it.next().unwrap()).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstructs(a in (1usize..9).prop_flat_map(operator)) {
        let e = sym_eigen(&a).unwrap();
        let n = a.n();
        let scale = a.frobenius_norm().max(1.0);
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n).map(|k| e.eigenvalues[k] * e.eigenvectors[k][i] * e.eigenvectors[k][j]).sum();
                prop_assert!((r - a.get(i, j)).abs() <= 1e-12 * scale);
            }
        }
        prop_assert!(e.orthonormality_defect() <= 1e-12);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn matvec_is_linear(
        a in operator(5),
        x in prop::collection::vec(-1.0f64..1.0, 10),
        y in prop::collection::vec(-1.0f64..1.0, 10),
        re in -2.0f64..2.0,
        im in -2.0f64..2.0,
    ) {
        let c = Complex64::new(re, im);
        let x = ComplexState::from_parts(&x[..5], &x[5..]).unwrap();
        let y = ComplexState::from_parts(&y[..5], &y[5..]).unwrap();
        let combo: Vec<Complex64> = x.as_slice().iter().zip(y.as_slice()).map(|(p, q)| c * p + q).collect();
        let lhs = matvec(&a, &ComplexState::from(combo)).unwrap();
        let (ax, ay) = (matvec(&a, &x).unwrap(), matvec(&a, &y).unwrap());
        let rhs: Vec<Complex64> = ax.as_slice().iter().zip(ay.as_slice()).map(|(p, q)| c * p + q).collect();
        let tol = 1e-12 * (a.max_abs() * 10.0).max(1.0);
        prop_assert!(lhs.distance(&ComplexState::from(rhs)) <= tol);
    }

    #[test]
    fn condition_is_scale_invariant(seed in any::<u64>(), c in prop_oneof![1e-3f64..1e3, -1e3f64..-1e-3]) {
        let a = gen_random_symmetric(6, seed).unwrap();
        let (Condition::Finite(k1), Condition::Finite(k2)) =
            (condition_number(&a, 1e-12).unwrap(), condition_number(&a.scaled(c), 1e-12).unwrap())
        else {
            return Ok(());
        };
        prop_assert!((k1 - k2).abs() <= 1e-9 * k1);
    }

    #[test]
    fn matrix_market_round_trip(a in (1usize..7).prop_flat_map(operator)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.mtx");
        write_matrix_market(&a, &path).unwrap();
        let b = read_matrix_market(&path).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn generated_problems_are_consistent(
        eig in prop::collection::vec(prop_oneof![Just(0.0), -1.0f64..1.0], 1..7),
        seed in any::<u64>(),
    ) {
        prop_assume!(eig.iter().any(|&l| l.abs() > 1e-6));
        let p = gen_spectrum(&eig, seed).unwrap();
        prop_assert!(p.check_invariants().is_ok());
        prop_assert!(((p.y_true.iter().map(|v| v * v).sum::<f64>()).sqrt() - 1.0).abs() < 1e-12);
    }
}
