//! Scalar sequences that fill measurement matrices.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{self, Coordinate, IntegratorConfig, State3, SystemKind};
use crate::error::{Error, Result};
use crate::seed;
use crate::sequence::{Sequence, SequenceSource};

/// Correlation coefficient used for the correlated Gaussian ensemble.
pub const DEFAULT_RHO: f64 = 0.99;

/// Half-width of the seeded perturbation added to a chaotic system's
/// default initial state.
pub const INITIAL_PERTURBATION: f64 = 1e-2;

/// Sampling of `x1` from a chaotic flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaoticSource {
    pub system: SystemKind,
    pub tau: f64,
    pub step: f64,
    pub burn_in: f64,
}

impl ChaoticSource {
    pub fn new(system: SystemKind) -> Self {
        ChaoticSource {
            system,
            tau: system.default_tau(),
            step: dynamics::DEFAULT_STEP,
            burn_in: dynamics::DEFAULT_BURN_IN,
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Integrator settings for a given seed. The seed only moves the initial
    /// state within `±INITIAL_PERTURBATION` of the system default.
    pub fn integrator_config(&self, seed: u64) -> IntegratorConfig {
        let mut rng = seed::rng(seed);
        let mut jitter = || rng.random_range(-INITIAL_PERTURBATION..=INITIAL_PERTURBATION);
        let base = self.system.default_initial_state();
        IntegratorConfig {
            step: self.step,
            burn_in: self.burn_in,
            initial_state: base + State3::new(jitter(), jitter(), jitter()),
            tau: self.tau,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceKind {
    Chaotic(ChaoticSource),
    IidGaussian,
    /// Stationary AR(1) with unit variance and autocorrelation `rho^|i|`.
    Ar1Gaussian {
        rho: f64,
    },
    /// ±1 with equal probability.
    BernoulliPm1,
    Uniform01,
    UniformPmHalf,
}

impl SequenceKind {
    pub fn chua() -> Self {
        SequenceKind::Chaotic(ChaoticSource::new(SystemKind::Chua))
    }

    pub fn lorenz() -> Self {
        SequenceKind::Chaotic(ChaoticSource::new(SystemKind::Lorenz))
    }

    pub fn rossler() -> Self {
        SequenceKind::Chaotic(ChaoticSource::new(SystemKind::Rossler))
    }

    pub fn ar1() -> Self {
        SequenceKind::Ar1Gaussian { rho: DEFAULT_RHO }
    }

    /// The seven ensembles compared in the recovery experiments.
    pub fn comparison_set() -> Vec<SequenceKind> {
        vec![
            SequenceKind::chua(),
            SequenceKind::lorenz(),
            SequenceKind::IidGaussian,
            SequenceKind::ar1(),
            SequenceKind::BernoulliPm1,
            SequenceKind::Uniform01,
            SequenceKind::UniformPmHalf,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            SequenceKind::Chaotic(c) => match c.system {
                SystemKind::Chua => "chua_x1",
                SystemKind::Lorenz => "lorenz_x1",
                SystemKind::Rossler => "rossler_x1",
            },
            SequenceKind::IidGaussian => "iid_gaussian",
            SequenceKind::Ar1Gaussian { .. } => "ar1_gaussian",
            SequenceKind::BernoulliPm1 => "bernoulli_pm1",
            SequenceKind::Uniform01 => "uniform_01",
            SequenceKind::UniformPmHalf => "uniform_pm_half",
        }
    }

    pub fn chaotic(&self) -> Option<&ChaoticSource> {
        match self {
            SequenceKind::Chaotic(c) => Some(c),
            _ => None,
        }
    }

    pub fn chaotic_mut(&mut self) -> Option<&mut ChaoticSource> {
        match self {
            SequenceKind::Chaotic(c) => Some(c),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceKind::Ar1Gaussian { rho } if !(*rho > -1.0 && *rho < 1.0) => {
                Err(Error::InvalidParameter(format!("rho must lie in (-1, 1), got {rho}")))
            }
            SequenceKind::Chaotic(c) => IntegratorConfig {
                step: c.step,
                burn_in: c.burn_in,
                initial_state: c.system.default_initial_state(),
                tau: c.tau,
            }
            .step_counts()
            .map(|_| ()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceKind::Chaotic(c) => write!(f, "{}(tau={},h={},burn_in={})", self.name(), c.tau, c.step, c.burn_in),
            SequenceKind::Ar1Gaussian { rho } => write!(f, "ar1_gaussian(rho={rho})"),
            other => f.write_str(other.name()),
        }
    }
}

/// Parses an ensemble name with default parameters. Short aliases such as
/// `gaussian`, `ar1`, `bernoulli` and `chua` are accepted.
impl FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_lowercase().as_str() {
            "chua" | "chua_x1" => SequenceKind::chua(),
            "lorenz" | "lorenz_x1" => SequenceKind::lorenz(),
            "rossler" | "rossler_x1" | "rössler" => SequenceKind::rossler(),
            "gaussian" | "iid_gaussian" | "normal" => SequenceKind::IidGaussian,
            "ar1" | "ar1_gaussian" | "correlated_gaussian" => SequenceKind::ar1(),
            "bernoulli" | "bernoulli_pm1" => SequenceKind::BernoulliPm1,
            "uniform" | "uniform01" | "uniform_01" => SequenceKind::Uniform01,
            "uniform_pm_half" | "uniform_centered" => SequenceKind::UniformPmHalf,
            other => return Err(Error::InvalidParameter(format!("unknown ensemble `{other}`"))),
        })
    }
}

/// A sequence kind plus the seed that makes it reproducible.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSpec {
    pub kind: SequenceKind,
    pub seed: u64,
}

impl SequenceSpec {
    pub fn new(kind: SequenceKind, seed: u64) -> Self {
        SequenceSpec { kind, seed }
    }
}

impl fmt::Display for SequenceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[seed={}]", self.kind, self.seed)
    }
}

/// Draws `length` samples of the given kind.
pub fn generate(spec: &SequenceSpec, length: usize) -> Result<Sequence> {
    if length == 0 {
        return Err(Error::InvalidParameter("length must be at least 1".into()));
    }
    spec.kind.validate()?;
    let values = match spec.kind {
        SequenceKind::Chaotic(source) => {
            let config = source.integrator_config(spec.seed);
            let system = source.system.with_default_params();
            let trajectory = dynamics::integrate(&system, &config, length)?;
            return Ok(Sequence::new(
                dynamics::extract_scalar(&trajectory, Coordinate::X1).into_values(),
                SequenceSource::Generated(*spec),
            ));
        }
        SequenceKind::IidGaussian => {
            let rng = seed::rng(spec.seed);
            StandardNormal.sample_iter(rng).take(length).collect()
        }
        SequenceKind::Ar1Gaussian { rho } => {
            let mut rng = seed::rng(spec.seed);
            let innovation = (1.0 - rho * rho).sqrt();
            let mut values = Vec::with_capacity(length);
            let mut c: f64 = StandardNormal.sample(&mut rng);
            values.push(c);
            for _ in 1..length {
                let w: f64 = StandardNormal.sample(&mut rng);
                c = rho * c + innovation * w;
                values.push(c);
            }
            values
        }
        SequenceKind::BernoulliPm1 => {
            let mut rng = seed::rng(spec.seed);
            (0..length)
                .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
                .collect()
        }
        SequenceKind::Uniform01 => {
            let mut rng = seed::rng(spec.seed);
            (0..length).map(|_| rng.random::<f64>()).collect()
        }
        SequenceKind::UniformPmHalf => {
            let mut rng = seed::rng(spec.seed);
            (0..length).map(|_| rng.random::<f64>() - 0.5).collect()
        }
    };
    Ok(Sequence::new(values, SequenceSource::Generated(*spec)))
}

/// Generates several sequences of one length. Chaotic specs of the same
/// source are integrated together (see [`dynamics::integrate_batch`]);
/// the output equals calling [`generate`] on each spec.
pub fn generate_batch(specs: &[SequenceSpec], length: usize) -> Vec<Result<Sequence>> {
    let shared_source = specs.first().and_then(|first| {
        let source = *first.kind.chaotic()?;
        specs.iter().all(|s| s.kind == first.kind).then_some(source)
    });
    let Some(source) = shared_source.filter(|_| length > 0 && specs[0].kind.validate().is_ok()) else {
        return specs.iter().map(|s| generate(s, length)).collect();
    };
    let configs: Vec<IntegratorConfig> = specs.iter().map(|s| source.integrator_config(s.seed)).collect();
    let system = source.system.with_default_params();
    match dynamics::integrate_batch(&system, &configs, length) {
        Ok(trajectories) => trajectories
            .iter()
            .zip(specs)
            .map(|(traj, spec)| {
                Ok(Sequence::new(
                    dynamics::extract_scalar(traj, Coordinate::X1).into_values(),
                    SequenceSource::Generated(*spec),
                ))
            })
            .collect(),
        // Divergence in one lane: redo one by one so only that spec fails.
        Err(_) => specs.iter().map(|s| generate(s, length)).collect(),
    }
}

/// Sample mean and biased (divide-by-n) variance.
pub fn sample_stats(values: &[f64]) -> Result<(f64, f64)> {
    if values.len() < 2 {
        return Err(Error::DegenerateSequence(format!(
            "need at least 2 samples, got {}",
            values.len()
        )));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if variance > 0.0 {
        Ok((mean, variance))
    } else {
        Err(Error::DegenerateSequence("zero variance".into()))
    }
}
