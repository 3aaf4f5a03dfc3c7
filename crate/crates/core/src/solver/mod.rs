//! Proximal gradient solver for
//!
//! ```text
//! minimize  -log det Θ + <S, Θ> + ρ ||Θ||_1   over Θ ≻ 0
//! ```
//!
//! Each iteration takes a soft-thresholded gradient step
//! `Θ+ = η_{ζρ}(Θ - ζ (S - Θ^{-1}))`, backtracking on `ζ` until `Θ+` is
//! positive definite and the smooth part is majorized by its quadratic
//! model. Steps are seeded with a Barzilai-Borwein estimate and the loop
//! stops once the duality gap falls below the tolerance.

mod bounds;

pub use bounds::{
    b_prime, closed_form_rate, compute_alpha, compute_beta, contraction_bound, half_step_eig_bounds, optimal_rate,
    optimal_step, x_plus_zeta_over_x_range, Bounds, RateBound,
};

use crate::diagnostics::TraceRecord;
use crate::error::{Error, Result};
use crate::matrix::{
    cholesky, inverse_from_chol, log_det_from_chol, power_iter_max_eig, soft, CholFactor, DenseSym,
    POWER_ITER_MAX_ITERS, POWER_ITER_TOL,
};

/// `(S, ρ)` pair defining one problem.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    s: DenseSym,
    rho: f64,
}

impl ProblemInstance {
    pub fn new(s: DenseSym, rho: f64) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidConfig(format!("rho must be positive, got {rho}")));
        }
        Ok(ProblemInstance { s, rho })
    }

    pub fn s(&self) -> &DenseSym {
        &self.s
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn dim(&self) -> usize {
        self.s.dim()
    }

    /// Diagonal starting point `[Θ0]_ii = 1 / (S_ii + ρ)`.
    pub fn default_init(&self) -> DenseSym {
        let d: Vec<f64> = self.s.diag().iter().map(|s| 1.0 / (s + self.rho)).collect();
        DenseSym::from_diag(&d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepRule {
    BarzilaiBorwein,
    Constant(f64),
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Duality-gap target.
    pub tol: f64,
    /// Backtracking factor in (0, 1).
    pub backtrack_c: f64,
    /// Initial step for the first iteration.
    pub zeta_init: f64,
    pub max_backtracks: usize,
    pub max_iters: usize,
    pub step_rule: StepRule,
    /// Compute the duality gap every `gap_every_k` iterations.
    pub gap_every_k: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-5,
            backtrack_c: 0.5,
            zeta_init: 1.0,
            max_backtracks: 20,
            max_iters: 10_000,
            step_rule: StepRule::BarzilaiBorwein,
            gap_every_k: 1,
        }
    }
}

impl SolverConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.backtrack_c > 0.0 && self.backtrack_c < 1.0) {
            return bad(format!("backtrack_c must lie in (0, 1), got {}", self.backtrack_c));
        }
        if !(self.zeta_init > 0.0) || !self.zeta_init.is_finite() {
            return bad(format!("zeta_init must be positive, got {}", self.zeta_init));
        }
        if let StepRule::Constant(z) = self.step_rule {
            if !(z > 0.0) || !z.is_finite() {
                return bad(format!("constant step must be positive, got {z}"));
            }
        }
        if self.max_backtracks == 0 || self.max_iters == 0 || self.gap_every_k == 0 {
            return bad("max_backtracks, max_iters and gap_every_k must be positive".into());
        }
        Ok(())
    }
}

/// Snapshot of one iterate.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub theta: DenseSym,
    pub theta_inv: DenseSym,
    pub chol: CholFactor,
    /// `f + g` at `theta`.
    pub objective: f64,
    /// Accepted step (0 for the initial iterate).
    pub zeta: f64,
    pub iter: usize,
    /// Last computed duality gap (`+inf` when not yet known or dual infeasible).
    pub gap: f64,
}

impl SolverState {
    pub fn new(problem: &ProblemInstance, theta: DenseSym) -> Result<Self> {
        if theta.dim() != problem.dim() {
            return Err(Error::DimensionMismatch {
                expected: problem.dim(),
                found: theta.dim(),
            });
        }
        let chol = cholesky(&theta).map_err(|_| Error::InvalidInit)?;
        let theta_inv = inverse_from_chol(&chol);
        let objective = objective(problem, &theta, &chol);
        Ok(SolverState {
            theta,
            theta_inv,
            chol,
            objective,
            zeta: 0.0,
            iter: 0,
            gap: f64::INFINITY,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    GapReached,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub theta_star: DenseSym,
    pub objective: f64,
    pub gap: f64,
    pub iterations: usize,
    pub trace: Vec<TraceRecord>,
    pub termination: Termination,
}

/// Accepted line-search step.
#[derive(Debug, Clone)]
pub struct LineSearchOutcome {
    pub theta: DenseSym,
    pub chol: CholFactor,
    pub zeta: f64,
    pub backtracks: usize,
}

/// Smooth part `f(Θ) = -log det Θ + <S, Θ>`.
fn smooth_part(problem: &ProblemInstance, theta: &DenseSym, chol: &CholFactor) -> f64 {
    -log_det_from_chol(chol) + problem.s.inner(theta)
}

/// Full objective `-log det Θ + <S, Θ> + ρ ||Θ||_1` (diagonal included in
/// the penalty).
pub fn objective(problem: &ProblemInstance, theta: &DenseSym, chol: &CholFactor) -> f64 {
    smooth_part(problem, theta, chol) + problem.rho * theta.abs_sum_quad()
}

/// `∇f(Θ) = S - Θ^{-1}`
pub fn grad_f(problem: &ProblemInstance, theta_inv: &DenseSym) -> DenseSym {
    &problem.s - theta_inv
}

/// `η_{ζρ}(Θ - ζ (S - Θ^{-1}))`. Positive definiteness is not checked.
pub fn prox_step(problem: &ProblemInstance, theta: &DenseSym, theta_inv: &DenseSym, zeta: f64) -> DenseSym {
    let tau = zeta * problem.rho;
    let p = theta.dim();
    DenseSym::from_fn(p, |i, j| {
        let half = theta.get(i, j) - zeta * (problem.s.get(i, j) - theta_inv.get(i, j));
        soft(half, tau)
    })
}

/// Backtracks `ζ = c^j ζ0` until the proximal step is positive definite and
/// satisfies `f(Θ+) <= Q_ζ(Θ+, Θ)`.
pub fn line_search(
    problem: &ProblemInstance,
    state: &SolverState,
    zeta0: f64,
    cfg: &SolverConfig,
) -> Result<LineSearchOutcome> {
    let grad = grad_f(problem, &state.theta_inv);
    let f_t = smooth_part(problem, &state.theta, &state.chol);
    // round-off allowance on the majorization test
    let slack = 64.0 * f64::EPSILON * (1.0 + f_t.abs());
    let mut zeta = zeta0;
    for j in 0..=cfg.max_backtracks {
        if j > 0 {
            zeta *= cfg.backtrack_c;
        }
        let candidate = prox_step(problem, &state.theta, &state.theta_inv, zeta);
        let Ok(chol) = cholesky(&candidate) else {
            continue;
        };
        let f_next = smooth_part(problem, &candidate, &chol);
        let d = &candidate - &state.theta;
        let dn = d.frob_norm();
        let q = f_t + d.inner(&grad) + dn * dn / (2.0 * zeta);
        if f_next <= q + slack {
            return Ok(LineSearchOutcome {
                theta: candidate,
                chol,
                zeta,
                backtracks: j,
            });
        }
    }
    Err(Error::LineSearchFailed {
        zeta0,
        backtracks: cfg.max_backtracks,
    })
}

/// Barzilai-Borwein step
/// `Tr(ΔΘ ΔΘ) / Tr(ΔΘ (Θ_t^{-1} - Θ_{t+1}^{-1}))`.
pub fn bb_step(
    theta_t: &DenseSym,
    theta_next: &DenseSym,
    theta_inv_t: &DenseSym,
    theta_inv_next: &DenseSym,
) -> Result<f64> {
    let d = theta_next - theta_t;
    let numerator = d.inner(&d);
    let denominator = d.inner(&(theta_inv_t - theta_inv_next));
    if !(denominator > 0.0) || denominator.abs() < 1e-14 * numerator.abs() || numerator == 0.0 {
        return Err(Error::StepUndefined { numerator, denominator });
    }
    Ok(numerator / denominator)
}

/// `λ_min(Θ)^2`, from power iteration on `Θ^{-1}`.
pub fn safe_step(theta_inv: &DenseSym) -> Result<f64> {
    let lmax = power_iter_max_eig(theta_inv, POWER_ITER_TOL, POWER_ITER_MAX_ITERS)?;
    Ok((1.0 / lmax).powi(2))
}

/// Clamped dual point `U_ij = clamp((Θ^{-1})_ij - S_ij, -ρ, ρ)`.
pub fn dual_point(problem: &ProblemInstance, theta_inv: &DenseSym) -> DenseSym {
    let rho = problem.rho;
    let p = problem.dim();
    DenseSym::from_fn(p, |i, j| (theta_inv.get(i, j) - problem.s.get(i, j)).clamp(-rho, rho))
}

fn gap_with_log_det(
    problem: &ProblemInstance,
    theta: &DenseSym,
    theta_inv: &DenseSym,
    log_det_theta: f64,
) -> Result<f64> {
    let u = dual_point(problem, theta_inv);
    let su = &problem.s + &u;
    let chol_su = cholesky(&su).map_err(|_| Error::DualInfeasible)?;
    let p = problem.dim() as f64;
    Ok(-log_det_from_chol(&chol_su) - p - log_det_theta + problem.s.inner(theta) + problem.rho * theta.abs_sum_quad())
}

/// Primal objective at `Θ` minus the dual objective at the clamped dual
/// point. Fails with [`Error::DualInfeasible`] when `S + U` is not
/// positive definite.
pub fn duality_gap(problem: &ProblemInstance, theta: &DenseSym, theta_inv: &DenseSym) -> Result<f64> {
    let chol = cholesky(theta)?;
    gap_with_log_det(problem, theta, theta_inv, log_det_from_chol(&chol))
}

pub fn solve(problem: &ProblemInstance, cfg: &SolverConfig, theta0: Option<&DenseSym>) -> Result<SolveResult> {
    solve_with(problem, cfg, theta0, None, |_| {})
}

/// Runs the solver, recording `||Θ_t - reference||_F` in the trace when a
/// reference is given and calling `observer` on the initial iterate and on
/// every accepted iterate.
pub fn solve_with(
    problem: &ProblemInstance,
    cfg: &SolverConfig,
    theta0: Option<&DenseSym>,
    reference: Option<&DenseSym>,
    mut observer: impl FnMut(&SolverState),
) -> Result<SolveResult> {
    cfg.validate()?;
    let theta0 = theta0.cloned().unwrap_or_else(|| problem.default_init());
    let mut state = SolverState::new(problem, theta0)?;
    observer(&state);

    let mut zeta0 = match cfg.step_rule {
        StepRule::BarzilaiBorwein => cfg.zeta_init,
        StepRule::Constant(z) => z,
    };
    let mut trace = Vec::new();
    let mut termination = Termination::MaxIters;

    for t in 1..=cfg.max_iters {
        let step = match line_search(problem, &state, zeta0, cfg) {
            Ok(step) => step,
            Err(Error::LineSearchFailed { .. }) => {
                let safe = safe_step(&state.theta_inv)?;
                line_search(problem, &state, safe, cfg)?
            }
            Err(e) => return Err(e),
        };
        let theta_inv = inverse_from_chol(&step.chol);

        zeta0 = match cfg.step_rule {
            StepRule::BarzilaiBorwein => match bb_step(&state.theta, &step.theta, &state.theta_inv, &theta_inv) {
                Ok(z) => z,
                Err(_) => safe_step(&theta_inv)?,
            },
            StepRule::Constant(z) => z,
        };

        let log_det = log_det_from_chol(&step.chol);
        let obj = -log_det + problem.s.inner(&step.theta) + problem.rho * step.theta.abs_sum_quad();
        let gap = if t % cfg.gap_every_k == 0 || t == cfg.max_iters {
            match gap_with_log_det(problem, &step.theta, &theta_inv, log_det) {
                Ok(g) => g,
                Err(Error::DualInfeasible) => f64::INFINITY,
                Err(e) => return Err(e),
            }
        } else {
            f64::NAN
        };

        trace.push(TraceRecord {
            iter: t,
            objective: obj,
            gap,
            zeta_accepted: step.zeta,
            backtracks: step.backtracks,
            nnz_frac: step.theta.offdiag_nnz_frac(),
            err_to_ref: reference.map(|r| (&step.theta - r).frob_norm()),
        });

        state = SolverState {
            theta: step.theta,
            theta_inv,
            chol: step.chol,
            objective: obj,
            zeta: step.zeta,
            iter: t,
            gap: if gap.is_nan() { state.gap } else { gap },
        };
        observer(&state);

        if gap <= cfg.tol {
            termination = Termination::GapReached;
            break;
        }
    }

    Ok(SolveResult {
        iterations: state.iter,
        objective: state.objective,
        gap: state.gap,
        theta_star: state.theta,
        trace,
        termination,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_problem(s: &[f64], rho: f64) -> ProblemInstance {
        ProblemInstance::new(DenseSym::from_diag(s), rho).unwrap()
    }

    fn diag_optimum(s: &[f64], rho: f64) -> DenseSym {
        DenseSym::from_diag(&s.iter().map(|x| 1.0 / (x + rho)).collect::<Vec<_>>())
    }

    fn state_at(problem: &ProblemInstance, theta: DenseSym) -> SolverState {
        SolverState::new(problem, theta).unwrap()
    }

    #[test]
    fn rejects_bad_rho_and_config() {
        assert!(ProblemInstance::new(DenseSym::identity(2), 0.0).is_err());
        assert!(ProblemInstance::new(DenseSym::identity(2), f64::NAN).is_err());
        let cfg = SolverConfig {
            backtrack_c: 1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = SolverConfig::default().with_step_rule(StepRule::Constant(-1.0));
        assert!(cfg.validate().is_err());
        assert!(SolverConfig::default().validate().is_ok());
    }

    #[test]
    fn objective_identity() {
        for p in 1..5 {
            let prob = ProblemInstance::new(DenseSym::identity(p), 0.3).unwrap();
            let st = state_at(&prob, DenseSym::identity(p));
            let expected = p as f64 + 0.3 * p as f64;
            assert!((st.objective - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn objective_diagonal_closed_form() {
        let prob = diag_problem(&[1.0, 2.0], 0.1);
        let st = state_at(&prob, diag_optimum(&[1.0, 2.0], 0.1));
        let expected = 1.1f64.ln() + 2.1f64.ln() + 2.0;
        assert!((st.objective - expected).abs() < 1e-14);
    }

    #[test]
    fn gradient_at_diagonal_optimum() {
        let prob = ProblemInstance::new(DenseSym::identity(3), 0.5).unwrap();
        assert_eq!(grad_f(&prob, &DenseSym::identity(3)), DenseSym::zeros(3));

        let prob = diag_problem(&[1.0, 2.0], 0.1);
        let inv = DenseSym::from_diag(&[1.1, 2.1]);
        let g = grad_f(&prob, &inv);
        assert!((&g - &DenseSym::from_diag(&[-0.1, -0.1])).max_abs() < 1e-15);
    }

    #[test]
    fn prox_step_scalar() {
        let prob = ProblemInstance::new(DenseSym::zeros(1), 0.5).unwrap();
        let theta = DenseSym::identity(1);
        let out = prox_step(&prob, &theta, &theta, 0.5);
        assert_eq!(out.get(0, 0), 1.25);
        assert_eq!(prox_step(&prob, &theta, &theta, 0.0), theta);
    }

    #[test]
    fn prox_step_fixed_point() {
        let s = [1.0, 2.0, 3.0];
        let rho = 0.2;
        let prob = diag_problem(&s, rho);
        let opt = diag_optimum(&s, rho);
        let inv = DenseSym::from_diag(&[1.2, 2.2, 3.2]);
        let zmax = (1.0 / 3.2f64).powi(2);
        for zeta in [zmax, 0.5 * zmax, 1e-3] {
            let out = prox_step(&prob, &opt, &inv, zeta);
            assert!((&out - &opt).max_abs() < 1e-15);
        }
    }

    #[test]
    fn line_search_accepts_fixed_point() {
        let s = [1.0, 2.0];
        let rho = 0.1;
        let prob = diag_problem(&s, rho);
        let st = state_at(&prob, diag_optimum(&s, rho));
        let zeta0 = (1.0 / 2.1f64).powi(2);
        let out = line_search(&prob, &st, zeta0, &SolverConfig::default()).unwrap();
        assert_eq!(out.backtracks, 0);
        assert_eq!(out.zeta, zeta0);
        assert!((&out.theta - &st.theta).max_abs() < 1e-15);
    }

    #[test]
    fn line_search_backtracks_from_large_step() {
        // From Θ = I, S = I the gradient vanishes and the candidate is
        // η_{0.1ζ}(I) = (1 - 0.1ζ) I. By hand, f((1-τ)I)/p = -ln(1-τ) + 1 - τ
        // against Q/p = 1 + τ²/(2ζ):
        //   ζ = 10    -> 0 matrix, not PD
        //   ζ = 5     -> 1.1931 > 1.0250
        //   ζ = 2.5   -> 1.0377 > 1.0125
        //   ζ = 1.25  -> 1.0085 > 1.00625
        //   ζ = 0.625 -> 1.00204 <= 1.003125, accepted
        let prob = ProblemInstance::new(DenseSym::identity(3), 0.1).unwrap();
        let st = state_at(&prob, DenseSym::identity(3));
        let out = line_search(&prob, &st, 10.0, &SolverConfig::default()).unwrap();
        assert_eq!(out.backtracks, 4);
        assert_eq!(out.zeta, 0.625);

        // both predicates re-verified independently
        let chol = cholesky(&out.theta).unwrap();
        let f_next = -log_det_from_chol(&chol) + prob.s().inner(&out.theta);
        let d = &out.theta - &st.theta;
        let q = 3.0 + d.inner(&grad_f(&prob, &st.theta_inv)) + d.inner(&d) / (2.0 * out.zeta);
        assert!(f_next <= q);
    }

    #[test]
    fn line_search_gives_up() {
        let prob = ProblemInstance::new(DenseSym::identity(2), 0.1).unwrap();
        let st = state_at(&prob, DenseSym::identity(2));
        let cfg = SolverConfig {
            max_backtracks: 2,
            ..SolverConfig::default()
        };
        assert!(matches!(
            line_search(&prob, &st, 10.0, &cfg),
            Err(Error::LineSearchFailed { backtracks: 2, .. })
        ));
    }

    #[test]
    fn bb_step_examples() {
        let (a, b) = (0.7, 1.9);
        let ta = &DenseSym::identity(4) * a;
        let tb = &DenseSym::identity(4) * b;
        let z = bb_step(
            &ta,
            &tb,
            &(&DenseSym::identity(4) * (1.0 / a)),
            &(&DenseSym::identity(4) * (1.0 / b)),
        )
        .unwrap();
        assert!((z - a * b).abs() < 1e-12);

        assert!(matches!(bb_step(&ta, &ta, &ta, &ta), Err(Error::StepUndefined { .. })));

        let t0 = DenseSym::from_diag(&[1.0, 2.0]);
        let t1 = DenseSym::from_diag(&[2.0, 3.0]);
        let i0 = DenseSym::from_diag(&[1.0, 0.5]);
        let i1 = DenseSym::from_diag(&[0.5, 1.0 / 3.0]);
        // numerator 2, denominator 1·(1 - 1/2) + 1·(1/2 - 1/3) = 2/3
        let z = bb_step(&t0, &t1, &i0, &i1).unwrap();
        assert!((z - 3.0).abs() < 1e-14);
    }

    #[test]
    fn safe_step_examples() {
        let z = safe_step(&(&DenseSym::identity(3) * 2.0)).unwrap();
        assert!((z - 0.25).abs() < 1e-15);
        let z = safe_step(&DenseSym::from_diag(&[1.0, 0.25])).unwrap();
        assert!((z - 1.0).abs() < 1e-5);
    }

    #[test]
    fn gap_zero_at_diagonal_optimum() {
        let s = [0.5, 1.0, 4.0];
        let rho = 0.25;
        let prob = diag_problem(&s, rho);
        let opt = diag_optimum(&s, rho);
        let inv = DenseSym::from_diag(&[0.75, 1.25, 4.25]);
        let gap = duality_gap(&prob, &opt, &inv).unwrap();
        assert!(gap.abs() < 1e-14, "{gap}");
    }

    #[test]
    fn gap_positive_away_from_optimum() {
        // Θ = I, S = diag(2, 3), ρ = 0.1: U = clamp(I - S) = -0.1 I,
        // dual objective log det(S + U) + p = ln 1.9 + ln 2.9 + 2,
        // primal objective 0 + 5 + 0.2.
        let prob = diag_problem(&[2.0, 3.0], 0.1);
        let gap = duality_gap(&prob, &DenseSym::identity(2), &DenseSym::identity(2)).unwrap();
        let expected = 5.2 - (1.9f64.ln() + 2.9f64.ln() + 2.0);
        assert!(gap > 0.0);
        assert!((gap - expected).abs() < 1e-13);
    }

    #[test]
    fn gap_reports_dual_infeasibility() {
        // S = 0 with Θ^{-1} = I gives U = ρ I, fine; force S + U indefinite
        let s = DenseSym::from_row_major(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let prob = ProblemInstance::new(s, 0.1).unwrap();
        let theta = DenseSym::identity(2);
        assert!(matches!(duality_gap(&prob, &theta, &theta), Err(Error::DualInfeasible)));
    }

    #[test]
    fn solve_diagonal() {
        let s = [1.0, 2.0, 3.0];
        let prob = diag_problem(&s, 0.2);
        let res = solve(&prob, &SolverConfig::default().with_tol(1e-8), None).unwrap();
        assert_eq!(res.termination, Termination::GapReached);
        assert!((&res.theta_star - &diag_optimum(&s, 0.2)).frob_norm() < 1e-7);
    }

    #[test]
    fn solve_loose_tolerance_stops_after_one_iteration() {
        let s = DenseSym::from_row_major(2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
        let prob = ProblemInstance::new(s, 0.1).unwrap();
        let res = solve(&prob, &SolverConfig::default().with_tol(1e6), None).unwrap();
        assert_eq!(res.iterations, 1);
        assert_eq!(res.trace.len(), 1);
        assert_eq!(res.termination, Termination::GapReached);
    }

    #[test]
    fn solve_rejects_indefinite_init() {
        let prob = diag_problem(&[1.0, 1.0], 0.1);
        let bad = DenseSym::from_row_major(2, &[1.0, 2.0, 2.0, 1.0]).unwrap();
        assert!(matches!(
            solve(&prob, &SolverConfig::default(), Some(&bad)),
            Err(Error::InvalidInit)
        ));
        assert!(matches!(
            solve(&prob, &SolverConfig::default(), Some(&DenseSym::identity(3))),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn max_iters_termination() {
        let s = DenseSym::from_row_major(2, &[2.0, 0.9, 0.9, 1.0]).unwrap();
        let prob = ProblemInstance::new(s, 0.01).unwrap();
        let cfg = SolverConfig::default().with_tol(1e-300).with_max_iters(3);
        let res = solve(&prob, &cfg, None).unwrap();
        assert_eq!(res.termination, Termination::MaxIters);
        assert_eq!(res.iterations, 3);
        let iters: Vec<usize> = res.trace.iter().map(|r| r.iter).collect();
        assert_eq!(iters, vec![1, 2, 3]);
    }

    #[test]
    fn gap_every_k_skips_gap() {
        let s = DenseSym::from_row_major(2, &[2.0, 0.9, 0.9, 1.0]).unwrap();
        let prob = ProblemInstance::new(s, 0.05).unwrap();
        let mut cfg = SolverConfig::default().with_tol(1e-10);
        cfg.gap_every_k = 3;
        let res = solve(&prob, &cfg, None).unwrap();
        assert_eq!(res.termination, Termination::GapReached);
        assert_eq!(res.iterations % 3, 0);
        assert!(res.trace[0].gap.is_nan());
    }
}
