//! Monte Carlo recovery experiments.
//!
//! One trial draws a fresh sequence, builds Φ from it, draws a k-sparse
//! signal, measures it and runs basis pursuit. Trial `t` at sparsity `k`
//! uses seeds derived from `(master_seed, k, t)` only, so results do not
//! depend on how trials are scheduled.

use crate::dynamics::BATCH_LANES;
use crate::ensembles::{generate, generate_batch, SequenceKind, SequenceSpec};
use crate::error::{Error, Result};
use crate::l1solver::{solve_bp, BpProblem, SolverConfig};
use crate::seed::TrialSeeds;
use crate::sensing::{build_matrix_with, gen_sparse_signal, measure, MatrixOptions};
use crate::sequence::Sequence;
use crate::trials::TrialPool;

use super::histogram::Histogram;

/// Relative errors below this are floored before taking `log10`.
pub const LOG_ERROR_FLOOR: f64 = 1e-12;
/// Range of `log10(e)` covered by error histograms.
pub const LOG_ERROR_RANGE: (f64, f64) = (-12.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    pub error: f64,
    pub success: bool,
}

/// `‖x − x_r‖/‖x‖`, or `‖x_r‖` when `x = 0`.
pub fn relative_error(x: &[f64], x_r: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), x_r.len());
    let x_norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let diff = x.iter().zip(x_r).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if x_norm > 0.0 {
        diff / x_norm
    } else {
        diff
    }
}

pub fn classify_recovery(x: &[f64], x_r: &[f64], epsilon: f64) -> Classification {
    let error = relative_error(x, x_r);
    Classification {
        error,
        success: error < epsilon,
    }
}

/// Everything that defines one point of a recovery experiment except `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryProtocol {
    pub n: usize,
    pub m: usize,
    pub kind: SequenceKind,
    pub trials: usize,
    pub epsilon: f64,
    pub master_seed: u64,
    pub solver: SolverConfig,
    pub matrix: MatrixOptions,
}

impl RecoveryProtocol {
    /// ε = 0.01, default solver, no centering.
    pub fn new(n: usize, m: usize, kind: SequenceKind, trials: usize, master_seed: u64) -> Self {
        RecoveryProtocol {
            n,
            m,
            kind,
            trials,
            epsilon: 0.01,
            master_seed,
            solver: SolverConfig::default(),
            matrix: MatrixOptions::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.n {
            return Err(Error::InvalidParameter(format!(
                "need 0 < M <= N, got M={}, N={}",
                self.m, self.n
            )));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidParameter("epsilon must be positive".into()));
        }
        self.kind.validate()?;
        self.solver.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    /// Relative error of the reconstruction; infinite when no
    /// reconstruction was produced.
    pub error: f64,
    /// The solver did not converge or an upstream step failed.
    pub solver_failed: bool,
    /// σ used to scale the matrix, if one was built.
    pub sigma: Option<f64>,
}

/// Runs a single trial. Errors never escape: they yield an outcome with
/// `solver_failed` set.
pub fn run_trial(protocol: &RecoveryProtocol, k: usize, seeds: TrialSeeds) -> TrialOutcome {
    let spec = SequenceSpec::new(protocol.kind, seeds.sequence);
    run_trial_on(protocol, k, seeds, generate(&spec, protocol.m * protocol.n))
}

fn run_trial_on(protocol: &RecoveryProtocol, k: usize, seeds: TrialSeeds, seq: Result<Sequence>) -> TrialOutcome {
    let failed = |sigma| TrialOutcome {
        error: f64::INFINITY,
        solver_failed: true,
        sigma,
    };
    let Ok(seq) = seq else {
        return failed(None);
    };
    let Ok(phi) = build_matrix_with(&seq, protocol.m, protocol.n, &protocol.matrix) else {
        return failed(None);
    };
    let sigma = Some(phi.sigma_used());
    let Ok(x) = gen_sparse_signal(protocol.n, k, seeds.signal) else {
        return failed(sigma);
    };
    let outcome = measure(&phi, &x).and_then(|y| solve_bp(&BpProblem::new(&phi, &y)?, &protocol.solver));
    match outcome {
        Ok(sol) => TrialOutcome {
            error: relative_error(x.values(), &sol.s),
            solver_failed: !sol.converged(),
            sigma,
        },
        Err(_) => failed(sigma),
    }
}

/// All trial outcomes at sparsity `k`, in trial order.
pub fn trial_outcomes(protocol: &RecoveryProtocol, k: usize, pool: &TrialPool) -> Result<Vec<TrialOutcome>> {
    protocol.validate()?;
    if k > protocol.m {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds M = {}", protocol.m)));
    }
    let seeds = |t| TrialSeeds::new(protocol.master_seed, k, t);
    if protocol.kind.chaotic().is_none() {
        return Ok(pool.map(protocol.trials, |t| run_trial(protocol, k, seeds(t))));
    }
    // Chaotic sequences are integrated a group of trials at a time.
    let groups = protocol.trials.div_ceil(BATCH_LANES);
    let per_group = pool.map(groups, |g| {
        let trials: Vec<usize> = (g * BATCH_LANES..protocol.trials.min((g + 1) * BATCH_LANES)).collect();
        let specs: Vec<SequenceSpec> = trials
            .iter()
            .map(|&t| SequenceSpec::new(protocol.kind, seeds(t).sequence))
            .collect();
        let sequences = generate_batch(&specs, protocol.m * protocol.n);
        trials
            .iter()
            .zip(sequences)
            .map(|(&t, seq)| run_trial_on(protocol, k, seeds(t), seq))
            .collect::<Vec<_>>()
    });
    Ok(per_group.into_iter().flatten().collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryPoint {
    pub k: usize,
    pub trials: usize,
    /// Trials with `e ≥ ε`, including solver failures.
    pub failures: usize,
    pub solver_failures: usize,
    pub error_rate: f64,
    /// `(min, max)` of the σ values used across trials.
    pub sigma_range: Option<(f64, f64)>,
}

impl RecoveryPoint {
    fn from_outcomes(k: usize, epsilon: f64, outcomes: &[TrialOutcome]) -> Self {
        let failures = outcomes
            .iter()
            .filter(|o| o.solver_failed || !(o.error < epsilon))
            .count();
        let solver_failures = outcomes.iter().filter(|o| o.solver_failed).count();
        let sigma_range = outcomes.iter().filter_map(|o| o.sigma).fold(None, |acc, s| {
            Some(match acc {
                None => (s, s),
                Some((lo, hi)) => (f64::min(lo, s), f64::max(hi, s)),
            })
        });
        RecoveryPoint {
            k,
            trials: outcomes.len(),
            failures,
            solver_failures,
            error_rate: failures as f64 / outcomes.len() as f64,
            sigma_range,
        }
    }
}

pub fn recovery_point(protocol: &RecoveryProtocol, k: usize, pool: &TrialPool) -> Result<RecoveryPoint> {
    let outcomes = trial_outcomes(protocol, k, pool)?;
    Ok(RecoveryPoint::from_outcomes(k, protocol.epsilon, &outcomes))
}

/// Failure probability as a function of sparsity.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryCurve {
    pub n: usize,
    pub m: usize,
    pub kind: SequenceKind,
    pub trials: usize,
    pub points: Vec<RecoveryPoint>,
}

impl RecoveryCurve {
    pub fn rate_at(&self, k: usize) -> Option<f64> {
        self.points.iter().find(|p| p.k == k).map(|p| p.error_rate)
    }
}

pub fn recovery_curve(protocol: &RecoveryProtocol, ks: &[usize], pool: &TrialPool) -> Result<RecoveryCurve> {
    if ks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("k values must be strictly increasing".into()));
    }
    let points = ks
        .iter()
        .map(|&k| recovery_point(protocol, k, pool))
        .collect::<Result<Vec<_>>>()?;
    Ok(RecoveryCurve {
        n: protocol.n,
        m: protocol.m,
        kind: protocol.kind,
        trials: protocol.trials,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmaxResult {
    pub n: usize,
    pub m: usize,
    pub ratio: f64,
    pub k_max: f64,
    /// `(k, error rate)` for every swept sparsity.
    pub rates: Vec<(usize, f64)>,
    /// Every swept point, in order of `k`.
    pub points: Vec<RecoveryPoint>,
}

/// Linear interpolation of the first upward crossing of `threshold`.
///
/// `rates` holds `(k, rate)` with increasing `k`; an implicit `(0, 0.0)`
/// point precedes them. A rate equal to the threshold does not count as
/// exceeding it.
pub fn kmax_from_rates(rates: &[(usize, f64)], threshold: f64) -> Option<f64> {
    let mut prev = (0usize, 0.0f64);
    for &(k, rate) in rates {
        if prev.1 <= threshold && rate > threshold {
            let frac = (threshold - prev.1) / (rate - prev.1);
            return Some(prev.0 as f64 + frac * (k - prev.0) as f64);
        }
        prev = (k, rate);
    }
    None
}

/// Sweeps `k = 1, 2, …` until the error rate exceeds `threshold` at two
/// consecutive sparsities (or `k = M`), then interpolates the crossing.
pub fn kmax_estimate(protocol: &RecoveryProtocol, threshold: f64, pool: &TrialPool) -> Result<KmaxResult> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    protocol.validate()?;
    let mut rates = Vec::new();
    let mut points = Vec::new();
    let mut above = 0;
    for k in 1..=protocol.m {
        let point = recovery_point(protocol, k, pool)?;
        let rate = point.error_rate;
        rates.push((k, rate));
        points.push(point);
        above = if rate > threshold { above + 1 } else { 0 };
        if above >= 2 {
            break;
        }
    }
    let k_max = kmax_from_rates(&rates, threshold).ok_or(Error::NoCrossing {
        threshold,
        k_limit: protocol.m,
    })?;
    Ok(KmaxResult {
        n: protocol.n,
        m: protocol.m,
        ratio: protocol.n as f64 / protocol.m as f64,
        k_max,
        rates,
        points,
    })
}

/// Histogram of `log10(max(e, 1e-12))` over [`LOG_ERROR_RANGE`].
pub fn log_error_histogram(errors: &[f64], n_bins: usize) -> Result<Histogram> {
    let logs: Vec<f64> = errors.iter().map(|e| e.max(LOG_ERROR_FLOOR).log10()).collect();
    Histogram::with_range(&logs, n_bins, LOG_ERROR_RANGE.0, LOG_ERROR_RANGE.1)
}

pub fn error_histogram(protocol: &RecoveryProtocol, k: usize, n_bins: usize, pool: &TrialPool) -> Result<Histogram> {
    if protocol.trials < 100 {
        return Err(Error::InvalidParameter(format!(
            "error histograms need at least 100 trials, got {}",
            protocol.trials
        )));
    }
    let errors: Vec<f64> = trial_outcomes(protocol, k, pool)?.iter().map(|o| o.error).collect();
    log_error_histogram(&errors, n_bins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        let x = [1.0, -1.0, 0.0, 0.0];
        let c = classify_recovery(&x, &x, 0.01);
        assert_eq!(c.error, 0.0);
        assert!(c.success);

        let c = classify_recovery(&[1.0, 0.0, 0.0], &[1.02, 0.0, 0.0], 0.01);
        assert!((c.error - 0.02).abs() < 1e-12);
        assert!(!c.success);

        let c = classify_recovery(&x, &[1.005, -1.0, 0.0, 0.0], 0.01);
        assert!((c.error - 0.005 / 2f64.sqrt()).abs() < 1e-12);
        assert!(c.success);

        assert!(classify_recovery(&[0.0; 3], &[0.0, 0.001, 0.0], 0.01).success);
        assert!(!classify_recovery(&[0.0; 3], &[0.0, 0.1, 0.0], 0.01).success);
    }

    #[test]
    fn interpolation_examples() {
        assert_eq!(kmax_from_rates(&[(10, 0.05), (11, 0.15)], 0.1), Some(10.5));
        assert_eq!(kmax_from_rates(&[(7, 0.1), (8, 0.3)], 0.1), Some(7.0));
        assert_eq!(kmax_from_rates(&[(1, 0.0), (2, 0.05)], 0.1), None);
        // first crossing wins over a later one
        let rates = [(1, 0.0), (2, 0.2), (3, 0.05), (4, 0.6)];
        assert_eq!(kmax_from_rates(&rates, 0.1), Some(1.5));
        // already above at k = 1: interpolate from the implicit origin
        assert_eq!(kmax_from_rates(&[(1, 0.4)], 0.1), Some(0.25));
    }

    #[test]
    fn zero_signal_point_never_fails() {
        let protocol = RecoveryProtocol::new(30, 15, SequenceKind::IidGaussian, 20, 3);
        let point = recovery_point(&protocol, 0, &TrialPool::sequential()).unwrap();
        assert_eq!(point.error_rate, 0.0);
        assert_eq!(point.solver_failures, 0);
    }

    #[test]
    fn zero_signal_histogram_sits_on_floor() {
        let protocol = RecoveryProtocol::new(20, 10, SequenceKind::BernoulliPm1, 100, 1);
        let h = error_histogram(&protocol, 0, 26, &TrialPool::sequential()).unwrap();
        assert_eq!(h.counts[0], 100);
        assert!((h.area() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let pool = TrialPool::sequential();
        let protocol = RecoveryProtocol::new(20, 10, SequenceKind::IidGaussian, 5, 1);
        assert!(recovery_point(&protocol, 11, &pool).is_err());
        assert!(recovery_curve(&protocol, &[3, 3], &pool).is_err());
        assert!(error_histogram(&protocol, 2, 10, &pool).is_err());
        assert!(kmax_estimate(&protocol, 1.0, &pool).is_err());
        let zero_trials = RecoveryProtocol { trials: 0, ..protocol };
        assert!(recovery_point(&zero_trials, 1, &pool).is_err());
    }

    #[test]
    fn chaotic_batches_match_single_trials() {
        let mut kind = SequenceKind::lorenz();
        kind.chaotic_mut().unwrap().burn_in = 5.0;
        let protocol = RecoveryProtocol::new(20, 10, kind, 11, 4);
        let outcomes = trial_outcomes(&protocol, 3, &TrialPool::sequential()).unwrap();
        assert_eq!(outcomes.len(), 11);
        for (t, o) in outcomes.iter().enumerate() {
            assert_eq!(*o, run_trial(&protocol, 3, TrialSeeds::new(4, 3, t)));
        }
        let parallel = trial_outcomes(&protocol, 3, &TrialPool::new(3).unwrap()).unwrap();
        assert_eq!(outcomes, parallel);
    }

    #[test]
    fn trial_is_deterministic() {
        let protocol = RecoveryProtocol::new(40, 20, SequenceKind::Uniform01, 1, 5);
        let seeds = TrialSeeds::new(5, 4, 0);
        assert_eq!(run_trial(&protocol, 4, seeds), run_trial(&protocol, 4, seeds));
    }
}
