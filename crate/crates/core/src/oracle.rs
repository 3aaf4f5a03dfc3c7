//! Independent reference routines used to cross-check the solver at small
//! scale: a cyclic Jacobi eigensolver, a projected-gradient solver for the
//! box-constrained dual, and a first-order optimality checker.
//!
//! Nothing here is on the production solve path.

use crate::error::{Error, Result};
use crate::matrix::{cholesky, inverse_from_chol, log_det_from_chol, power_iter_max_eig, DenseSym};
use crate::solver::ProblemInstance;

const JACOBI_MAX_SWEEPS: usize = 100;
/// Largest dimension accepted by [`dual_solve`].
pub const DUAL_MAX_DIM: usize = 50;

#[derive(Debug, Clone)]
pub struct JacobiEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub rotations: usize,
}

/// Cyclic Jacobi eigenvalue iteration. Stops once the off-diagonal
/// Frobenius mass is at most `tol * ||A||_F`.
pub fn jacobi_eigen(a: &DenseSym, tol: f64) -> Result<JacobiEigen> {
    let n = a.dim();
    let mut m: Vec<f64> = a.as_slice().to_vec();
    let scale = a.frob_norm();
    let mut rotations = 0;
    let idx = |i: usize, j: usize| i * n + j;

    let off = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * m[idx(i, j)] * m[idx(i, j)];
            }
        }
        s.sqrt()
    };

    for sweep in 0..JACOBI_MAX_SWEEPS {
        if off(&m) <= tol * scale {
            let mut eigenvalues: Vec<f64> = (0..n).map(|i| m[idx(i, i)]).collect();
            eigenvalues.sort_by(|x, y| x.total_cmp(y));
            return Ok(JacobiEigen { eigenvalues, rotations });
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                // after a few sweeps, drop entries below the diagonals' resolution
                let g = 100.0 * apq.abs();
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[idx(p, q)] = 0.0;
                    m[idx(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);

                m[idx(p, p)] = app - t * apq;
                m[idx(q, q)] = aqq + t * apq;
                m[idx(p, q)] = 0.0;
                m[idx(q, p)] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[idx(r, p)];
                    let arq = m[idx(r, q)];
                    let new_rp = arp - s * (arq + tau * arp);
                    let new_rq = arq + s * (arp - tau * arq);
                    m[idx(r, p)] = new_rp;
                    m[idx(p, r)] = new_rp;
                    m[idx(r, q)] = new_rq;
                    m[idx(q, r)] = new_rq;
                }
                rotations += 1;
            }
        }
    }
    Err(Error::NoConvergence {
        method: "jacobi eigenvalue iteration",
        iters: JACOBI_MAX_SWEEPS,
    })
}

/// Ascending eigenvalues to working precision.
pub fn eigenvalues(a: &DenseSym) -> Result<Vec<f64>> {
    Ok(jacobi_eigen(a, 1e-15)?.eigenvalues)
}

/// Iterate of the dual problem `min -log det(S + U) - p` s.t. `|U_ij| <= ρ`.
#[derive(Debug, Clone)]
pub struct DualIterate {
    pub u: DenseSym,
    /// `-log det(S + U) - p`
    pub objective: f64,
}

impl DualIterate {
    /// `log det(S + U) + p`, a lower bound on the primal optimum.
    pub fn lower_bound(&self) -> f64 {
        -self.objective
    }
}

#[derive(Debug, Clone)]
pub struct DualSolution {
    /// `(S + U)^{-1}`
    pub theta: DenseSym,
    /// Lower bound `log det(S + U) + p` at the final dual point.
    pub dual_obj: f64,
    pub iterate: DualIterate,
    pub iterations: usize,
}

fn clamp_box(m: &DenseSym, rho: f64) -> DenseSym {
    m.map(|x| x.clamp(-rho, rho))
}

/// Projected gradient on the dual. Each step moves `U` along
/// `(S + U)^{-1}` (the negative gradient of `-log det(S + U)`) with step
/// `0.1 λ_min(S + U)²`, clamps back into the box and halves the step until
/// `S + U` stays positive definite.
///
/// With `Θ = (S + U)^{-1}` and `U` in the box the duality gap reduces to
/// `ρ ||Θ||_1 - <U, Θ>`; iteration stops once that falls to `tol`.
pub fn dual_solve(problem: &ProblemInstance, tol: f64, max_iters: usize) -> Result<DualSolution> {
    let p = problem.dim();
    if p > DUAL_MAX_DIM {
        return Err(Error::InvalidConfig(format!(
            "dual oracle supports p <= {DUAL_MAX_DIM}, got {p}"
        )));
    }
    let s = problem.s();
    let rho = problem.rho();
    let pf = p as f64;

    let start = [rho, 0.5 * rho]
        .into_iter()
        .map(|d| clamp_box(&DenseSym::identity(p).map(|x| x * d), rho))
        .find_map(|u| cholesky(&(s + &u)).ok().map(|c| (u, c)));
    let (mut u, mut chol) = start.ok_or(Error::InfeasibleStart)?;
    let mut theta = inverse_from_chol(&chol);
    let mut objective = -log_det_from_chol(&chol) - pf;

    for it in 0..=max_iters {
        let gap = rho * theta.abs_sum_quad() - u.inner(&theta);
        if gap <= tol {
            return Ok(DualSolution {
                theta,
                dual_obj: -objective,
                iterate: DualIterate { u, objective },
                iterations: it,
            });
        }
        if it == max_iters {
            break;
        }
        let lmax = power_iter_max_eig(&theta, 1e-8, 10_000)?;
        let mut step = 0.1 / (lmax * lmax);
        let mut accepted = None;
        for _ in 0..60 {
            let cand = clamp_box(&u.add_scaled(step, &theta), rho);
            if let Ok(c) = cholesky(&(s + &cand)) {
                accepted = Some((cand, c));
                break;
            }
            step *= 0.5;
        }
        let (next_u, next_chol) = accepted.ok_or(Error::NoConvergence {
            method: "dual projected gradient",
            iters: it,
        })?;
        u = next_u;
        chol = next_chol;
        theta = inverse_from_chol(&chol);
        objective = -log_det_from_chol(&chol) - pf;
    }
    Err(Error::NoConvergence {
        method: "dual projected gradient",
        iters: max_iters,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KktViolation {
    pub i: usize,
    pub j: usize,
    pub on_support: bool,
    /// `|G_ij + ρ sgn(Θ_ij)|` on the support, `|G_ij| - ρ` off it, with
    /// `G = S - Θ^{-1}`.
    pub residual: f64,
}

#[derive(Debug, Clone, Default)]
pub struct KktReport {
    pub violations: Vec<KktViolation>,
    pub max_residual: f64,
}

impl KktReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the subgradient optimality conditions
/// `0 ∈ S - Θ^{-1} + ρ ∂||Θ||_1` entry by entry.
pub fn kkt_check(problem: &ProblemInstance, theta: &DenseSym, zero_tol: f64, grad_tol: f64) -> Result<KktReport> {
    let chol = cholesky(theta)?;
    let theta_inv = inverse_from_chol(&chol);
    let rho = problem.rho();
    let p = problem.dim();
    let mut report = KktReport::default();
    for i in 0..p {
        for j in i..p {
            let g = problem.s().get(i, j) - theta_inv.get(i, j);
            let t = theta.get(i, j);
            let on_support = t.abs() > zero_tol;
            let residual = if on_support {
                (g + rho * t.signum()).abs()
            } else {
                g.abs() - rho
            };
            report.max_residual = report.max_residual.max(residual);
            if residual > grad_tol {
                report.violations.push(KktViolation {
                    i,
                    j,
                    on_support,
                    residual,
                });
            }
        }
    }
    Ok(report)
}
