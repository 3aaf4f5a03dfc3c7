mod common;

use common::{extremes, random_spd, random_symmetric};
use gista::io::{matrix_to_csv, parse_matrix};
use gista::oracle::{eigenvalues, jacobi_eigen};
use gista::{cholesky, inverse_from_chol, log_det_from_chol, power_iter_max_eig, soft_threshold, DenseSym};
use proptest::prelude::*;

fn identity_error(a: &DenseSym, inv: &DenseSym) -> f64 {
    let p = a.dim();
    let prod = a.matmul(inv);
    (0..p * p)
        .map(|k| {
            let want = if k / p == k % p { 1.0 } else { 0.0 };
            (prod[k] - want).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_times_matrix_is_identity(seed in any::<u64>(), p in 1usize..60) {
        let a = random_spd(seed, p, 0.5);
        let inv = inverse_from_chol(&cholesky(&a).unwrap());
        prop_assert!(identity_error(&a, &inv) < 1e-8);
    }

    #[test]
    fn log_det_matches_eigenvalues(seed in any::<u64>(), p in 1usize..=50) {
        let a = random_spd(seed, p, 0.1);
        let from_eig: f64 = eigenvalues(&a).unwrap().iter().map(|e| e.ln()).sum();
        let from_chol = log_det_from_chol(&cholesky(&a).unwrap());
        prop_assert!((from_eig - from_chol).abs() < 1e-8, "{} vs {}", from_eig, from_chol);
    }

    #[test]
    fn jacobi_trace_and_determinant(seed in any::<u64>(), p in 1usize..30) {
        let a = random_spd(seed, p, 0.2);
        let e = eigenvalues(&a).unwrap();
        let tr = a.trace();
        prop_assert!((e.iter().sum::<f64>() - tr).abs() <= 1e-9 * tr.abs().max(1.0));
        let log_prod: f64 = e.iter().map(|x| x.ln()).sum();
        let log_det = log_det_from_chol(&cholesky(&a).unwrap());
        // relative error of the determinant itself
        prop_assert!((log_prod - log_det).exp_m1().abs() < 1e-8);
        prop_assert!(e.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn power_iteration_agrees_with_jacobi(seed in any::<u64>(), p in 1usize..25) {
        let a = random_spd(seed, p, 0.3);
        let top = extremes(&a).1;
        let est = power_iter_max_eig(&a, 1e-12, 100_000).unwrap();
        prop_assert!((est - top).abs() <= 1e-5 * top, "{} vs {}", est, top);
    }

    #[test]
    fn soft_threshold_is_nonexpansive(s1 in any::<u64>(), s2 in any::<u64>(), p in 1usize..20, tau in 0.0f64..2.0) {
        let a = random_symmetric(s1, p);
        let b = random_symmetric(s2, p);
        let lhs = (&soft_threshold(&a, tau) - &soft_threshold(&b, tau)).frob_norm();
        prop_assert!(lhs <= (&a - &b).frob_norm() + 1e-12);
    }

    #[test]
    fn soft_threshold_perturbs_smallest_eigenvalue_by_at_most_p_eps(
        seed in any::<u64>(),
        p in 1usize..=20,
        eps in prop::sample::select(vec![0.01, 0.1, 1.0]),
    ) {
        let a = random_symmetric(seed, p);
        let before = extremes(&a).0;
        let after = extremes(&soft_threshold(&a, eps)).0;
        prop_assert!(after >= before - p as f64 * eps - 1e-9);
    }

    #[test]
    fn csv_round_trip_is_exact(seed in any::<u64>(), p in 1usize..12) {
        let a = random_symmetric(seed, p).map(|x| x * 1e3_f64.powf(x));
        prop_assert_eq!(parse_matrix(&matrix_to_csv(&a), ',').unwrap(), a);
    }
}

#[test]
fn spectral_norm_of_indefinite_matrix() {
    let a = DenseSym::from_row_major(2, &[1.0, 0.0, 0.0, -3.0]).unwrap();
    assert!((a.spectral_norm().unwrap() - 3.0).abs() < 1e-5);
    let m = random_symmetric(9, 12);
    let (lo, hi) = extremes(&m);
    let want = lo.abs().max(hi.abs());
    assert!((m.spectral_norm_with(1e-13, 100_000).unwrap() - want).abs() < 1e-6 * want);
}

#[test]
fn jacobi_handles_already_diagonal_input() {
    let r = jacobi_eigen(&DenseSym::from_diag(&[3.0, -1.0, 2.0]), 1e-15).unwrap();
    assert_eq!(r.eigenvalues, vec![-1.0, 2.0, 3.0]);
}
