#![allow(dead_code)]

use gista::datagen::{gen_model, sample_data, ModelSpec, Sampler};
use gista::oracle::eigenvalues;
use gista::DenseSym;

pub fn random_symmetric(seed: u64, p: usize) -> DenseSym {
    let mut s = Sampler::new(seed);
    let mut a = DenseSym::zeros(p);
    for i in 0..p {
        for j in i..p {
            a.set(i, j, s.normal());
        }
    }
    a
}

/// `G Gᵀ / p + shift I` for a Gaussian `G`.
pub fn random_spd(seed: u64, p: usize, shift: f64) -> DenseSym {
    let mut s = Sampler::new(seed);
    let g: Vec<f64> = (0..p * p).map(|_| s.normal()).collect();
    DenseSym::from_fn(p, |i, j| {
        (0..p).map(|k| g[i * p + k] * g[j * p + k]).sum::<f64>() / p as f64
    })
    .shift_diag(shift)
}

pub fn synthetic(p: usize, zero_prob: f64, n: usize, seed: u64) -> DenseSym {
    let model = gen_model(&ModelSpec { p, zero_prob, seed }).unwrap();
    sample_data(&model, n, seed.wrapping_add(1)).unwrap().1
}

pub fn extremes(m: &DenseSym) -> (f64, f64) {
    let e = eigenvalues(m).unwrap();
    (e[0], e[e.len() - 1])
}

pub fn spectral(m: &DenseSym) -> f64 {
    let (lo, hi) = extremes(m);
    lo.abs().max(hi.abs())
}
