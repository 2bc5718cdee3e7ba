//! Basis pursuit, `min ‖s‖₁ subject to Θs = y`.
//!
//! The problem is solved as the linear program
//!
//! ```text
//! min Σ uᵢ   s.t.   s − u ≤ 0,  −s − u ≤ 0,  Θs = y
//! ```
//!
//! with a primal-dual interior-point method. Each iteration takes a Newton
//! step on the perturbed KKT conditions; block elimination reduces the
//! `(3N + M)`-dimensional system to an `M × M` positive-definite system
//! `Θ D Θᵀ Δv = r` which is solved by Cholesky. A backtracking line search
//! keeps the inequality slacks strictly feasible, and the barrier parameter
//! is set from the surrogate duality gap each iteration.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::sensing::{MeasurementMatrix, MeasurementVector};

/// Gram matrices with a larger condition estimate count as singular.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;
/// Newton systems with a larger condition estimate abort the solve.
const NEWTON_CONDITION_LIMIT: f64 = 1e14;
/// Smallest step length the line search may take.
const MIN_STEP: f64 = 1e-12;
/// Relative residual a converged solution must reach.
pub const FEASIBILITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Stop once the surrogate duality gap drops below this.
    pub gap_tol: f64,
    pub max_iters: usize,
    /// Barrier scaling: `t = mu · 2N / gap`.
    pub mu: f64,
    /// Sufficient-decrease constant of the line search.
    pub alpha: f64,
    /// Backtracking factor.
    pub beta: f64,
    /// Relative feasibility required of the starting point before a
    /// refinement step is taken.
    pub newton_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            gap_tol: 1e-3,
            max_iters: 50,
            mu: 10.0,
            alpha: 0.01,
            beta: 0.5,
            newton_tol: 1e-8,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(what.to_string()));
        if !(self.gap_tol > 0.0) {
            return bad("gap_tol must be positive");
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return bad("line-search alpha must lie in (0, 0.5)");
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return bad("line-search beta must lie in (0, 1)");
        }
        if !(self.mu > 1.0) {
            return bad("mu must exceed 1");
        }
        if !(self.newton_tol > 0.0) {
            return bad("newton_tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Converged,
    MaxIters,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpSolution {
    pub s: Vec<f64>,
    pub iterations: usize,
    pub final_gap: f64,
    /// `‖Θs − y‖₂`
    pub residual_norm: f64,
    pub status: SolveStatus,
    /// Surrogate duality gap at the start and after every accepted step.
    pub gap_history: Vec<f64>,
}

impl BpSolution {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn l1_norm(&self) -> f64 {
        l1_norm(&self.s)
    }
}

/// An equality-constrained basis-pursuit instance.
#[derive(Debug, Clone, Copy)]
pub struct BpProblem<'a> {
    theta: &'a DMatrix<f64>,
    y: &'a DVector<f64>,
}

impl<'a> BpProblem<'a> {
    pub fn new(theta: &'a MeasurementMatrix, y: &'a MeasurementVector) -> Result<Self> {
        BpProblem::from_parts(theta.matrix(), &y.0)
    }

    pub fn from_parts(theta: &'a DMatrix<f64>, y: &'a DVector<f64>) -> Result<Self> {
        if theta.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: theta.nrows(),
                actual: y.len(),
            });
        }
        if theta.nrows() == 0 || theta.nrows() > theta.ncols() {
            return Err(Error::InvalidParameter(format!(
                "need 0 < M <= N, got {}x{}",
                theta.nrows(),
                theta.ncols()
            )));
        }
        Ok(BpProblem { theta, y })
    }

    pub fn theta(&self) -> &DMatrix<f64> {
        self.theta
    }

    pub fn y(&self) -> &DVector<f64> {
        self.y
    }
}

pub fn l1_norm(s: &[f64]) -> f64 {
    s.iter().map(|v| v.abs()).sum()
}

/// Cholesky factor of an SPD matrix with a cheap condition estimate,
/// `(max Lᵢᵢ / min Lᵢᵢ)²`.
fn factor_spd(matrix: DMatrix<f64>) -> Option<(Cholesky<f64, Dyn>, f64)> {
    let chol = Cholesky::new(matrix)?;
    let diag = chol.l_dirty().diagonal();
    let (lo, hi) = diag
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let condition = if lo > 0.0 { (hi / lo).powi(2) } else { f64::INFINITY };
    Some((chol, condition))
}

/// Minimum-ℓ₂-norm feasible point `Θᵀ(ΘΘᵀ)⁻¹y`.
pub fn least_norm_init(problem: &BpProblem) -> Result<DVector<f64>> {
    let a = problem.theta;
    let (chol, condition) = factor_spd(a * a.transpose()).ok_or(Error::SingularGram {
        condition: f64::INFINITY,
    })?;
    if condition > GRAM_CONDITION_LIMIT {
        return Err(Error::SingularGram { condition });
    }
    Ok(a.tr_mul(&chol.solve(problem.y)))
}

fn kkt_residual_norm(
    lamu1: &DVector<f64>,
    lamu2: &DVector<f64>,
    atv: &DVector<f64>,
    fu1: &DVector<f64>,
    fu2: &DVector<f64>,
    rpri: &DVector<f64>,
    tau: f64,
) -> f64 {
    let inv_tau = 1.0 / tau;
    let mut sum = rpri.norm_squared();
    for i in 0..lamu1.len() {
        let (l1, l2) = (lamu1[i], lamu2[i]);
        let dual_s = l1 - l2 + atv[i];
        let dual_u = 1.0 - l1 - l2;
        let cent1 = -l1 * fu1[i] - inv_tau;
        let cent2 = -l2 * fu2[i] - inv_tau;
        sum += dual_s * dual_s + dual_u * dual_u + cent1 * cent1 + cent2 * cent2;
    }
    sum.sqrt()
}

/// Solves basis pursuit from the least-norm starting point.
pub fn solve_bp(problem: &BpProblem, config: &SolverConfig) -> Result<BpSolution> {
    config.validate()?;
    let a = problem.theta;
    let y = problem.y;
    let n = a.ncols();
    let y_norm = y.norm();

    if y_norm == 0.0 {
        return Ok(BpSolution {
            s: vec![0.0; n],
            iterations: 0,
            final_gap: 0.0,
            residual_norm: 0.0,
            status: SolveStatus::Converged,
            gap_history: vec![0.0],
        });
    }

    let mut x = least_norm_init(problem)?;
    let initial_residual = a * &x - y;
    if initial_residual.norm() / y_norm > config.newton_tol {
        let (chol, _) = factor_spd(a * a.transpose()).ok_or(Error::SingularGram {
            condition: f64::INFINITY,
        })?;
        x -= a.tr_mul(&chol.solve(&initial_residual));
    }

    let max_abs = x.amax();
    let mut u = x.map(|v| 0.95 * v.abs() + 0.10 * max_abs);
    let mut fu1 = &x - &u;
    let mut fu2 = -&x - &u;
    let mut lamu1 = fu1.map(|f| -1.0 / f);
    let mut lamu2 = fu2.map(|f| -1.0 / f);
    let mut v = -(a * (&lamu1 - &lamu2));
    let mut atv = a.tr_mul(&v);
    let mut rpri = a * &x - y;

    let mut sdg = -(fu1.dot(&lamu1) + fu2.dot(&lamu2));
    let mut tau = config.mu * 2.0 * n as f64 / sdg;
    let mut resnorm = kkt_residual_norm(&lamu1, &lamu2, &atv, &fu1, &fu2, &rpri, tau);
    let mut gap_history = vec![sdg];
    let mut iterations = 0;
    let mut status = SolveStatus::MaxIters;

    let mut scaled = DMatrix::<f64>::zeros(a.nrows(), n);
    while !(sdg < config.gap_tol) {
        if iterations >= config.max_iters {
            break;
        }
        iterations += 1;
        let inv_tau = 1.0 / tau;

        let w1 = DVector::from_fn(n, |i, _| -inv_tau * (-1.0 / fu1[i] + 1.0 / fu2[i]) - atv[i]);
        let w2 = DVector::from_fn(n, |i, _| -1.0 - inv_tau * (1.0 / fu1[i] + 1.0 / fu2[i]));
        let sig1 = DVector::from_fn(n, |i, _| -lamu1[i] / fu1[i] - lamu2[i] / fu2[i]);
        let sig2 = DVector::from_fn(n, |i, _| lamu1[i] / fu1[i] - lamu2[i] / fu2[i]);
        let sigx = DVector::from_fn(n, |i, _| sig1[i] - sig2[i] * sig2[i] / sig1[i]);

        // Reduced system (Θ diag(1/σx) Θᵀ) Δv = Θ(w1/σx − w2σ2/(σxσ1)) + w3
        let t = DVector::from_fn(n, |i, _| w1[i] / sigx[i] - w2[i] * sig2[i] / (sigx[i] * sig1[i]));
        let w1p = a * &t + &rpri;
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col.copy_from(&a.column(j));
            col *= (1.0 / sigx[j]).sqrt();
        }
        let h = &scaled * scaled.transpose();
        let Some((chol, condition)) = factor_spd(h) else {
            status = SolveStatus::NumericalFailure;
            break;
        };
        if condition > NEWTON_CONDITION_LIMIT {
            status = SolveStatus::NumericalFailure;
            break;
        }
        let dv = chol.solve(&w1p);
        let atdv = a.tr_mul(&dv);
        let dx = DVector::from_fn(n, |i, _| (w1[i] - w2[i] * sig2[i] / sig1[i] - atdv[i]) / sigx[i]);
        let adx = a * &dx;
        let du = DVector::from_fn(n, |i, _| (w2[i] - sig2[i] * dx[i]) / sig1[i]);
        let dlamu1 = DVector::from_fn(n, |i, _| {
            (lamu1[i] / fu1[i]) * (-dx[i] + du[i]) - lamu1[i] - inv_tau / fu1[i]
        });
        let dlamu2 = DVector::from_fn(n, |i, _| {
            (lamu2[i] / fu2[i]) * (dx[i] + du[i]) - lamu2[i] - inv_tau / fu2[i]
        });

        // Largest step keeping λ > 0 and f(s, u) < 0.
        let mut step = 1.0f64;
        for i in 0..n {
            if dlamu1[i] < 0.0 {
                step = step.min(-lamu1[i] / dlamu1[i]);
            }
            if dlamu2[i] < 0.0 {
                step = step.min(-lamu2[i] / dlamu2[i]);
            }
        }
        for i in 0..n {
            let d1 = dx[i] - du[i];
            let d2 = -dx[i] - du[i];
            if d1 > 0.0 {
                step = step.min(-fu1[i] / d1);
            }
            if d2 > 0.0 {
                step = step.min(-fu2[i] / d2);
            }
        }
        step *= 0.99;

        let accepted = loop {
            let xp = &x + step * &dx;
            let up = &u + step * &du;
            let atvp = &atv + step * &atdv;
            let lamu1p = &lamu1 + step * &dlamu1;
            let lamu2p = &lamu2 + step * &dlamu2;
            let fu1p = &xp - &up;
            let fu2p = -&xp - &up;
            let rpp = &rpri + step * &adx;
            let norm = kkt_residual_norm(&lamu1p, &lamu2p, &atvp, &fu1p, &fu2p, &rpp, tau);
            if norm <= (1.0 - config.alpha * step) * resnorm {
                break Some((xp, up, atvp, lamu1p, lamu2p, fu1p, fu2p, rpp));
            }
            step *= config.beta;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((xp, up, atvp, lamu1p, lamu2p, fu1p, fu2p, rpp)) = accepted else {
            status = SolveStatus::NumericalFailure;
            break;
        };

        x = xp;
        u = up;
        v += step * &dv;
        atv = atvp;
        lamu1 = lamu1p;
        lamu2 = lamu2p;
        fu1 = fu1p;
        fu2 = fu2p;
        rpri = rpp;

        sdg = -(fu1.dot(&lamu1) + fu2.dot(&lamu2));
        tau = config.mu * 2.0 * n as f64 / sdg;
        resnorm = kkt_residual_norm(&lamu1, &lamu2, &atv, &fu1, &fu2, &rpri, tau);
        gap_history.push(sdg);
    }

    let residual_norm = (a * &x - y).norm();
    if sdg < config.gap_tol && status != SolveStatus::NumericalFailure {
        status = if residual_norm / y_norm <= FEASIBILITY_TOL {
            SolveStatus::Converged
        } else {
            SolveStatus::NumericalFailure
        };
    }
    Ok(BpSolution {
        s: x.as_slice().to_vec(),
        iterations,
        final_gap: sdg,
        residual_norm,
        status,
        gap_history,
    })
}
