//! Synthetic sparse precision matrices and Gaussian samples drawn from them.
//!
//! Randomness comes from ChaCha20 (`rand_chacha`) seeded with
//! `seed_from_u64`. Uniforms in `[0, 1)` take the top 53 bits of
//! `next_u64`; normals use the Box-Muller transform on pairs of those
//! uniforms. Both are spelled out here rather than delegated so output is
//! fixed across platforms and dependency upgrades.

use std::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cholesky, inverse_from_chol, power_iter_max_eig, DenseSym};
use crate::oracle;

/// Above this dimension the spectrum shift is found by power iteration and
/// Cholesky bisection instead of a full Jacobi decomposition.
const JACOBI_MAX_DIM: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub p: usize,
    /// Probability that an off-diagonal entry is zeroed.
    pub zero_prob: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct SyntheticModel {
    /// True precision matrix, smallest eigenvalue 1.
    pub omega: DenseSym,
    /// `omega^{-1}`
    pub sigma: DenseSym,
    /// Fraction of nonzero off-diagonal entries of `omega`.
    pub nnz_frac: f64,
}

/// `n x p` sample matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    pub n: usize,
    pub p: usize,
    pub data: Vec<f64>,
}

impl DataMatrix {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.p..(i + 1) * self.p]
    }
}

/// Seeded source of uniform and standard normal draws.
pub struct Sampler {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha20Rng::seed_from_u64(seed),
            spare: None,
        }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform(); // (0, 1]
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Draws a sparse symmetric matrix with off-diagonal entries uniform on
/// `(-1, 1)` (each zeroed with probability `zero_prob`), zero diagonal,
/// then shifts the diagonal so the smallest eigenvalue is exactly 1.
pub fn gen_model(spec: &ModelSpec) -> Result<SyntheticModel> {
    let p = spec.p;
    if p < 2 {
        return Err(Error::InvalidConfig(format!("p must be at least 2, got {p}")));
    }
    if !(0.0..=1.0).contains(&spec.zero_prob) {
        return Err(Error::InvalidConfig(format!(
            "zero_prob must lie in [0, 1], got {}",
            spec.zero_prob
        )));
    }
    let mut sampler = Sampler::new(spec.seed);
    let mut a = DenseSym::zeros(p);
    for i in 0..p {
        for j in (i + 1)..p {
            let value = 2.0 * sampler.uniform() - 1.0;
            let coin = sampler.uniform();
            if coin >= spec.zero_prob {
                a.set(i, j, value);
            }
        }
    }
    let lambda_min = smallest_eigenvalue(&a)?;
    let omega = a.shift_diag(1.0 - lambda_min);
    let sigma = inverse_from_chol(&cholesky(&omega)?);
    Ok(SyntheticModel {
        nnz_frac: omega.offdiag_nnz_frac(),
        omega,
        sigma,
    })
}

fn smallest_eigenvalue(a: &DenseSym) -> Result<f64> {
    if a.max_abs() == 0.0 {
        return Ok(0.0);
    }
    if a.dim() <= JACOBI_MAX_DIM {
        return Ok(oracle::eigenvalues(a)?[0]);
    }
    // power iteration on c I - A (c >= λ_max by Gershgorin) for an estimate,
    // then bisection on the positive definiteness of A - σ I
    let c = (0..a.dim())
        .map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let is_pd_below = |sigma: f64| cholesky(&a.shift_diag(-sigma)).is_ok();
    // trace 0 puts λ_min in [-c, 0]
    let (mut lo, mut hi) = (-c, 0.0f64);
    let shifted = (a * -1.0).shift_diag(c);
    if let Ok(top) = power_iter_max_eig(&shifted, 1e-10, 100_000) {
        let estimate = c - top;
        let delta = 1e-6 * c;
        if is_pd_below(estimate - delta) {
            lo = lo.max(estimate - delta);
        }
        if !is_pd_below(estimate + delta) {
            hi = hi.min(estimate + delta);
        }
    }
    let scale = c.max(1.0);
    while hi - lo > 1e-13 * scale {
        let mid = 0.5 * (lo + hi);
        if is_pd_below(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

/// Draws `n` i.i.d. samples from `N(0, sigma)` as `x = L z` with
/// `L L^T = sigma`, and returns them with `S = (1/n) sum x x^T` (no mean
/// subtraction).
pub fn sample_data(model: &SyntheticModel, n: usize, seed: u64) -> Result<(DataMatrix, DenseSym)> {
    if n == 0 {
        return Err(Error::InvalidConfig("n must be at least 1".into()));
    }
    let p = model.sigma.dim();
    let chol = cholesky(&model.sigma)?;
    let mut sampler = Sampler::new(seed);
    let mut data = vec![0.0; n * p];
    let mut z = vec![0.0; p];
    let mut acc = vec![0.0; p * p];
    for k in 0..n {
        z.iter_mut().for_each(|v| *v = sampler.normal());
        let x = &mut data[k * p..(k + 1) * p];
        for i in 0..p {
            x[i] = (0..=i).map(|j| chol.get(i, j) * z[j]).sum();
        }
        for i in 0..p {
            let xi = x[i];
            for j in i..p {
                acc[i * p + j] += xi * x[j];
            }
        }
    }
    let inv_n = 1.0 / n as f64;
    let s = DenseSym::from_fn(p, |i, j| acc[i * p + j] * inv_n);
    Ok((DataMatrix { n, p, data }, s))
}
