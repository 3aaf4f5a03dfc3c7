//! Eigenvalue bounds on the optimum and iterates, and the linear
//! convergence rates they imply.

use crate::error::Result;
use crate::matrix::{cholesky, inverse_from_chol, power_iter_max_eig, DenseSym};

use super::ProblemInstance;

// Bounds feed into validity checks, so spectral norms are computed tighter
// than the solver's safe-step default.
const TOL: f64 = 1e-12;
const MAX_ITERS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    /// Lower eigenvalue bound on the optimum.
    pub alpha: f64,
    /// Upper eigenvalue bound on the optimum.
    pub beta: f64,
    pub gamma: f64,
    /// Upper eigenvalue bound on every iterate, `β + √p (β - α)`.
    pub b_prime: f64,
    /// `β / α`
    pub kappa_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateBound {
    /// `1 - 2α² / (α² + (β + √p (β - α))²)`
    pub rate: f64,
    /// `1 - 2 (β/α)^{-2}`, never above `rate`.
    pub floor: f64,
    pub bounds: Bounds,
}

/// `α = 1 / (||S||_2 + p ρ)`
pub fn compute_alpha(problem: &ProblemInstance) -> Result<f64> {
    let norm = problem.s().spectral_norm_with(TOL, MAX_ITERS)?;
    Ok(1.0 / (norm + problem.dim() as f64 * problem.rho()))
}

/// Returns `(β, γ)`.
///
/// When `S` is positive definite,
/// `γ = min{1ᵀ|S⁻¹|1, (p - ρ√p α) ||S⁻¹||_2 - (p - 1) α}`; otherwise
/// `γ = 2·1ᵀ|M|1 - Tr(M)` with `M = (S + ρ/2 I)⁻¹`. If `S + ρ/2 I` is not
/// positive definite either, `γ = +inf` and only the trace bound remains.
pub fn compute_beta(problem: &ProblemInstance) -> Result<(f64, f64)> {
    let s = problem.s();
    let rho = problem.rho();
    let p = problem.dim() as f64;
    let alpha = compute_alpha(problem)?;

    let gamma = match cholesky(s) {
        Ok(chol) => {
            let s_inv = inverse_from_chol(&chol);
            let norm_inv = power_iter_max_eig(&s_inv, TOL, MAX_ITERS)?;
            let first = s_inv.abs_sum_quad();
            let second = (p - rho * p.sqrt() * alpha) * norm_inv - (p - 1.0) * alpha;
            first.min(second)
        }
        Err(_) => match cholesky(&s.shift_diag(0.5 * rho)) {
            Ok(chol) => {
                let m = inverse_from_chol(&chol);
                2.0 * m.abs_sum_quad() - m.trace()
            }
            Err(_) => f64::INFINITY,
        },
    };
    let beta = ((p - alpha * s.trace()) / rho).min(gamma);
    Ok((beta, gamma))
}

/// Worst-case per-iteration contraction `max{|1 - ζ/b²|, |1 - ζ/a²|}` for
/// iterates with spectra in `[a, b]`.
pub fn contraction_bound(a: f64, b: f64, zeta: f64) -> f64 {
    (1.0 - zeta / (b * b)).abs().max((1.0 - zeta / (a * a)).abs())
}

/// Step minimizing [`contraction_bound`], `2 / (a⁻² + b⁻²)`.
pub fn optimal_step(a: f64, b: f64) -> f64 {
    2.0 / (a.powi(-2) + b.powi(-2))
}

/// Contraction at [`optimal_step`], `1 - 2 / (1 + b²/a²)`.
pub fn optimal_rate(a: f64, b: f64) -> f64 {
    1.0 - 2.0 / (1.0 + (b * b) / (a * a))
}

/// Closed-form linear rate for constant steps below `α²`.
pub fn closed_form_rate(problem: &ProblemInstance) -> Result<RateBound> {
    let alpha = compute_alpha(problem)?;
    let (beta, gamma) = compute_beta(problem)?;
    let sqrt_p = (problem.dim() as f64).sqrt();
    let b_prime = beta + sqrt_p * (beta - alpha);
    let rate = 1.0 - 2.0 * alpha * alpha / (alpha * alpha + b_prime * b_prime);
    let kappa_upper = beta / alpha;
    Ok(RateBound {
        rate,
        floor: 1.0 - 2.0 / (kappa_upper * kappa_upper),
        bounds: Bounds {
            alpha,
            beta,
            gamma,
            b_prime,
            kappa_upper,
        },
    })
}

/// Iterate upper bound `||Θ*||_2 + ||Θ0 - Θ*||_F` given the optimum.
pub fn b_prime(theta_star: &DenseSym, theta0: &DenseSym) -> Result<f64> {
    Ok(theta_star.spectral_norm_with(TOL, MAX_ITERS)? + (theta0 - theta_star).frob_norm())
}

/// Range of `x + ζ/x` over `x ∈ [a, b]`.
pub fn x_plus_zeta_over_x_range(a: f64, b: f64, zeta: f64) -> (f64, f64) {
    let fa = a + zeta / a;
    let fb = b + zeta / b;
    let root = zeta.sqrt();
    let lo = if a <= root && root <= b { 2.0 * root } else { fa.min(fb) };
    (lo, fa.max(fb))
}

/// Bounds on the eigenvalues of the gradient half-step
/// `Θ - ζ (S - Θ⁻¹)` when `a I ⪯ Θ ⪯ b I` and the spectrum of `S` lies in
/// `[s_min, s_max]`.
pub fn half_step_eig_bounds(a: f64, b: f64, zeta: f64, s_min: f64, s_max: f64) -> (f64, f64) {
    let (lo, hi) = x_plus_zeta_over_x_range(a, b, zeta);
    (lo - zeta * s_max, hi - zeta * s_min)
}
