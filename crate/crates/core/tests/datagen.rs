mod common;

use common::extremes;
use gista::datagen::{gen_model, sample_data, ModelSpec};
use gista::{solve, ProblemInstance, SolverConfig};

#[test]
fn same_spec_gives_identical_model() {
    let spec = ModelSpec {
        p: 40,
        zero_prob: 0.85,
        seed: 17,
    };
    let a = gen_model(&spec).unwrap();
    let b = gen_model(&spec).unwrap();
    assert_eq!(a.omega.as_slice(), b.omega.as_slice());
    assert_ne!(a.omega, gen_model(&ModelSpec { seed: 18, ..spec }).unwrap().omega);
}

#[test]
fn sample_covariance_converges_to_sigma() {
    let model = gen_model(&ModelSpec {
        p: 5,
        zero_prob: 0.3,
        seed: 2,
    })
    .unwrap();
    let (_, s) = sample_data(&model, 200_000, 3).unwrap();
    let worst = (&s - &model.sigma).max_abs();
    assert!(worst < 0.05, "max entry difference {worst}");
}

#[test]
fn fewer_samples_than_dimensions_is_rank_deficient() {
    let model = gen_model(&ModelSpec {
        p: 20,
        zero_prob: 0.85,
        seed: 5,
    })
    .unwrap();
    let (x, s) = sample_data(&model, 8, 6).unwrap();
    assert_eq!((x.n, x.p), (8, 20));
    let eig = gista::oracle::eigenvalues(&s).unwrap();
    let top = eig[eig.len() - 1];
    let rank = eig.iter().filter(|e| **e > 1e-10 * top).count();
    assert!(rank <= 8, "rank {rank}");
    assert!(gista::cholesky(&s).is_err() || eig[0] < 1e-10 * top);
}

#[test]
fn large_sparse_model_density_within_three_sigma() {
    let model = gen_model(&ModelSpec {
        p: 500,
        zero_prob: 0.97,
        seed: 11,
    })
    .unwrap();
    let pairs = 500.0 * 499.0 / 2.0;
    let sigma = (0.03f64 * 0.97 / pairs).sqrt();
    assert!(
        (model.nnz_frac - 0.03).abs() <= 3.0 * sigma,
        "nnz_frac {}",
        model.nnz_frac
    );
    assert!((model.omega.diag()[0] - model.omega.diag()[1]).abs() < 1e-12);
}

#[test]
fn generated_model_is_well_conditioned() {
    let model = gen_model(&ModelSpec {
        p: 30,
        zero_prob: 0.85,
        seed: 8,
    })
    .unwrap();
    let (lo, hi) = extremes(&model.omega);
    assert!((lo - 1.0).abs() < 1e-8);
    assert!(hi > lo);
}

#[test]
fn larger_penalty_gives_sparser_solution() {
    let model = gen_model(&ModelSpec {
        p: 30,
        zero_prob: 0.85,
        seed: 4,
    })
    .unwrap();
    let (_, s) = sample_data(&model, 40, 5).unwrap();
    let cfg = SolverConfig::default().with_tol(1e-9);
    let nnz: Vec<f64> = [0.05, 0.15, 0.3]
        .iter()
        .map(|&rho| {
            let problem = ProblemInstance::new(s.clone(), rho).unwrap();
            solve(&problem, &cfg, None).unwrap().theta_star.offdiag_nnz_frac()
        })
        .collect();
    assert!(nnz.windows(2).all(|w| w[1] <= w[0]), "{nnz:?}");
    assert!(nnz[0] > nnz[2]);
}
