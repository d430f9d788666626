use csqar::linalg::{self, eig_hermitian, evolve_density, ComplexMatrix};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-2.0..2.0f64, -2.0..2.0f64), n * n).prop_map(move |v| {
        let a = DMatrix::from_fn(n, n, |r, c| Complex64::new(v[r * n + c].0, v[r * n + c].1));
        (&a + a.adjoint()) * Complex64::new(0.5, 0.0)
    })
}

fn density(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let a = DMatrix::from_fn(n, n, |r, c| Complex64::new(v[r * n + c].0, v[r * n + c].1));
        let rho = &a * a.adjoint() + ComplexMatrix::identity(n, n) * Complex64::new(1e-3, 0.0);
        let tr = linalg::trace(&rho);
        rho / tr
    })
}

fn case() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    (1usize..7).prop_flat_map(|n| (hermitian(n), density(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn evolution_keeps_a_density_matrix((h, rho) in case(), t in 0.0..100.0f64) {
        let out = evolve_density(&h, &rho, t).unwrap();
        prop_assert!((linalg::trace(&out) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(linalg::hermitian_defect(&out) < 1e-12);
        let min = eig_hermitian(&out).unwrap().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert!(min > -1e-10);
    }

    #[test]
    fn propagator_is_unitary(h in (1usize..7).prop_flat_map(hermitian), t in 0.0..100.0f64) {
        let u = eig_hermitian(&h).unwrap().propagator(t);
        let n = u.nrows();
        prop_assert!(linalg::max_abs(&(&u * u.adjoint() - ComplexMatrix::identity(n, n))) < 1e-10);
    }

    #[test]
    fn evolution_composes((h, rho) in case(), t1 in 0.0..50.0f64, t2 in 0.0..50.0f64) {
        let stepped = evolve_density(&h, &evolve_density(&h, &rho, t1).unwrap(), t2).unwrap();
        let direct = evolve_density(&h, &rho, t1 + t2).unwrap();
        prop_assert!(linalg::max_abs(&(stepped - direct)) < 1e-10);
    }

    #[test]
    fn spectrum_reconstructs_matrix(h in (1usize..7).prop_flat_map(hermitian)) {
        let s = eig_hermitian(&h).unwrap();
        let back = s.apply_function(|l| Complex64::new(l, 0.0));
        prop_assert!(linalg::max_abs(&(back - &h)) < 1e-12);
        prop_assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn non_hermitian_input_is_rejected() {
    let mut h = ComplexMatrix::identity(2, 2);
    h[(0, 1)] = Complex64::new(1.0, 0.0);
    assert!(eig_hermitian(&h).is_err());
}
