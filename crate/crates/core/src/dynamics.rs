//! Fixed-step integration of the three chaotic flows.
//!
//! All three systems are integrated with classical RK4. Sampling takes every
//! `tau / h`-th state after a discarded burn-in interval, so `tau` and
//! `burn_in` must be integer multiples of the step `h`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequence::{Sequence, SequenceSource};

/// Default RK4 step for every system.
pub const DEFAULT_STEP: f64 = 1e-3;
/// Default discarded transient, in time units.
pub const DEFAULT_BURN_IN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct State3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl State3 {
    pub const ZERO: State3 = State3::new(0.0, 0.0, 0.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        State3 { x1, x2, x3 }
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    pub fn get(&self, coordinate: Coordinate) -> f64 {
        match coordinate {
            Coordinate::X1 => self.x1,
            Coordinate::X2 => self.x2,
            Coordinate::X3 => self.x3,
        }
    }

    pub fn max_abs_diff(&self, other: &State3) -> f64 {
        (self.x1 - other.x1)
            .abs()
            .max((self.x2 - other.x2).abs())
            .max((self.x3 - other.x3).abs())
    }
}

impl Add for State3 {
    type Output = State3;
    fn add(self, rhs: State3) -> State3 {
        State3::new(self.x1 + rhs.x1, self.x2 + rhs.x2, self.x3 + rhs.x3)
    }
}

impl Sub for State3 {
    type Output = State3;
    fn sub(self, rhs: State3) -> State3 {
        State3::new(self.x1 - rhs.x1, self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

impl Mul<State3> for f64 {
    type Output = State3;
    fn mul(self, rhs: State3) -> State3 {
        State3::new(self * rhs.x1, self * rhs.x2, self * rhs.x3)
    }
}

impl Neg for State3 {
    type Output = State3;
    fn neg(self) -> State3 {
        State3::new(-self.x1, -self.x2, -self.x3)
    }
}

/// Which state coordinate to read (1-based in the usual notation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Coordinate {
    X1,
    X2,
    X3,
}

impl Coordinate {
    pub fn from_index(index: usize) -> Result<Self> {
        match index {
            1 => Ok(Coordinate::X1),
            2 => Ok(Coordinate::X2),
            3 => Ok(Coordinate::X3),
            _ => Err(Error::InvalidParameter(format!(
                "coordinate index must be 1, 2 or 3, got {index}"
            ))),
        }
    }
}

impl fmt::Display for Coordinate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Coordinate::X1 => "x1",
            Coordinate::X2 => "x2",
            Coordinate::X3 => "x3",
        })
    }
}

/// Right-hand side of an autonomous ODE in three dimensions.
pub trait VectorField {
    fn eval(&self, state: State3) -> State3;
}

impl<F: Fn(State3) -> State3> VectorField for F {
    fn eval(&self, state: State3) -> State3 {
        self(state)
    }
}

/// Dimensionless Chua circuit with a piecewise-linear diode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChuaParams {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for ChuaParams {
    fn default() -> Self {
        ChuaParams {
            a: -1.27,
            b: -0.68,
            alpha: 10.0,
            beta: 14.87,
        }
    }
}

impl ChuaParams {
    /// `g(x1) = b·x1 + ½(a − b)(|x1 + 1| − |x1 − 1|)`
    pub fn nonlinearity(&self, x1: f64) -> f64 {
        self.b * x1 + 0.5 * (self.a - self.b) * ((x1 + 1.0).abs() - (x1 - 1.0).abs())
    }
}

impl VectorField for ChuaParams {
    fn eval(&self, s: State3) -> State3 {
        State3::new(
            self.alpha * (s.x2 - s.x1 - self.nonlinearity(s.x1)),
            s.x1 - s.x2 + s.x3,
            -self.beta * s.x2,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorenzParams {
    pub sigma: f64,
    pub r: f64,
    pub b: f64,
}

impl Default for LorenzParams {
    fn default() -> Self {
        LorenzParams {
            sigma: 16.0,
            r: 45.6,
            b: 4.0,
        }
    }
}

impl VectorField for LorenzParams {
    fn eval(&self, s: State3) -> State3 {
        State3::new(
            self.sigma * (s.x2 - s.x1),
            self.r * s.x1 - s.x1 * s.x3 - s.x2,
            s.x1 * s.x2 - self.b * s.x3,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RosslerParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for RosslerParams {
    fn default() -> Self {
        RosslerParams { a: 0.2, b: 0.2, c: 5.7 }
    }
}

impl VectorField for RosslerParams {
    fn eval(&self, s: State3) -> State3 {
        State3::new(-s.x2 - s.x3, s.x1 + self.a * s.x2, self.b + s.x3 * (s.x1 - self.c))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Chua,
    Lorenz,
    Rossler,
}

impl SystemKind {
    pub const ALL: [SystemKind; 3] = [SystemKind::Chua, SystemKind::Lorenz, SystemKind::Rossler];

    pub fn default_initial_state(self) -> State3 {
        match self {
            SystemKind::Chua => State3::new(0.1, 0.0, 0.0),
            SystemKind::Lorenz => State3::new(1.0, 1.0, 1.0),
            SystemKind::Rossler => State3::new(1.0, 1.0, 0.0),
        }
    }

    /// Sampling distance used for matrix construction when none is given.
    pub fn default_tau(self) -> f64 {
        match self {
            SystemKind::Chua => 1.0,
            SystemKind::Lorenz => 0.5,
            SystemKind::Rossler => 1.0,
        }
    }

    pub fn with_default_params(self) -> System {
        match self {
            SystemKind::Chua => System::Chua(ChuaParams::default()),
            SystemKind::Lorenz => System::Lorenz(LorenzParams::default()),
            SystemKind::Rossler => System::Rossler(RosslerParams::default()),
        }
    }
}

impl fmt::Display for SystemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SystemKind::Chua => "chua",
            SystemKind::Lorenz => "lorenz",
            SystemKind::Rossler => "rossler",
        })
    }
}

impl FromStr for SystemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "chua" => Ok(SystemKind::Chua),
            "lorenz" => Ok(SystemKind::Lorenz),
            "rossler" | "rössler" => Ok(SystemKind::Rossler),
            other => Err(Error::InvalidParameter(format!("unknown system `{other}`"))),
        }
    }
}

/// A chaotic flow together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum System {
    Chua(ChuaParams),
    Lorenz(LorenzParams),
    Rossler(RosslerParams),
}

impl System {
    pub fn kind(&self) -> SystemKind {
        match self {
            System::Chua(_) => SystemKind::Chua,
            System::Lorenz(_) => SystemKind::Lorenz,
            System::Rossler(_) => SystemKind::Rossler,
        }
    }
}

impl VectorField for System {
    fn eval(&self, state: State3) -> State3 {
        match self {
            System::Chua(p) => p.eval(state),
            System::Lorenz(p) => p.eval(state),
            System::Rossler(p) => p.eval(state),
        }
    }
}

#[inline]
fn rk4_advance<F: VectorField + ?Sized>(field: &F, s: State3, h: f64) -> State3 {
    let k1 = field.eval(s);
    let k2 = field.eval(s + (0.5 * h) * k1);
    let k3 = field.eval(s + (0.5 * h) * k2);
    let k4 = field.eval(s + h * k3);
    s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// One classical fourth-order Runge–Kutta step of size `h`.
pub fn rk4_step<F: VectorField + ?Sized>(field: &F, state: State3, h: f64) -> Result<State3> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {h}")));
    }
    let next = rk4_advance(field, state, h);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::Divergence { time: h })
    }
}

/// Step size, transient and sampling distance of an integration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub step: f64,
    pub burn_in: f64,
    pub initial_state: State3,
    pub tau: f64,
}

impl IntegratorConfig {
    /// Default step and burn-in, the system's default initial state and
    /// sampling distance.
    pub fn for_system(kind: SystemKind) -> Self {
        IntegratorConfig {
            step: DEFAULT_STEP,
            burn_in: DEFAULT_BURN_IN,
            initial_state: kind.default_initial_state(),
            tau: kind.default_tau(),
        }
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    /// Number of RK4 steps in the burn-in and between samples.
    pub fn step_counts(&self) -> Result<(u64, u64)> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !self.initial_state.is_finite() {
            return Err(Error::InvalidParameter("initial state is not finite".into()));
        }
        let burn = exact_multiple(self.burn_in, self.step, "burn_in")?;
        let stride = exact_multiple(self.tau, self.step, "tau")?;
        if stride == 0 {
            return Err(Error::InvalidParameter(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        Ok((burn, stride))
    }
}

fn exact_multiple(value: f64, step: f64, name: &str) -> Result<u64> {
    if !(value >= 0.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "{name} must be non-negative, got {value}"
        )));
    }
    let ratio = value / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-9 * rounded.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {value} is not an integer multiple of the step {step}"
        )));
    }
    Ok(rounded as u64)
}

/// Sampled trajectory of one system.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub system: SystemKind,
    pub config: IntegratorConfig,
    samples: Vec<(f64, State3)>,
}

impl Trajectory {
    pub fn samples(&self) -> &[(f64, State3)] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = State3> + '_ {
        self.samples.iter().map(|(_, s)| *s)
    }
}

/// Integrates `system`, discards the burn-in and records `n_samples` states
/// spaced `config.tau` apart.
pub fn integrate(system: &System, config: &IntegratorConfig, n_samples: usize) -> Result<Trajectory> {
    // Dispatch once so the inner loop is monomorphic.
    let samples = match system {
        System::Chua(p) => integrate_field(p, config, n_samples)?,
        System::Lorenz(p) => integrate_field(p, config, n_samples)?,
        System::Rossler(p) => integrate_field(p, config, n_samples)?,
    };
    Ok(Trajectory {
        system: system.kind(),
        config: *config,
        samples,
    })
}

/// Sampling loop for an arbitrary field; returns `(time, state)` pairs.
pub fn integrate_field<F: VectorField + ?Sized>(
    field: &F,
    config: &IntegratorConfig,
    n_samples: usize,
) -> Result<Vec<(f64, State3)>> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let (burn, stride) = config.step_counts()?;
    let h = config.step;
    let mut state = config.initial_state;
    let mut steps: u64 = 0;
    let mut advance = |state: &mut State3, count: u64| -> Result<()> {
        for _ in 0..count {
            *state = rk4_advance(field, *state, h);
            steps += 1;
            if !state.is_finite() {
                return Err(Error::Divergence { time: steps as f64 * h });
            }
        }
        Ok(())
    };

    advance(&mut state, burn)?;
    let mut samples = Vec::with_capacity(n_samples);
    samples.push((config.burn_in, state));
    for i in 1..n_samples {
        advance(&mut state, stride)?;
        samples.push((config.burn_in + i as f64 * config.tau, state));
    }
    Ok(samples)
}

/// Number of trajectories advanced together by [`integrate_batch`].
pub const BATCH_LANES: usize = 8;

/// Integrates several initial states of one system in lockstep.
///
/// All configs must share step, burn-in and sampling distance. Each
/// trajectory is bit-identical to what [`integrate`] returns for it alone;
/// interleaving independent RK4 chains only hides floating-point latency.
pub fn integrate_batch(system: &System, configs: &[IntegratorConfig], n_samples: usize) -> Result<Vec<Trajectory>> {
    let Some(first) = configs.first() else {
        return Ok(Vec::new());
    };
    if configs
        .iter()
        .any(|c| c.step != first.step || c.burn_in != first.burn_in || c.tau != first.tau)
    {
        return Err(Error::InvalidParameter(
            "batched configs must share step, burn-in and tau".into(),
        ));
    }
    let mut out = Vec::with_capacity(configs.len());
    for chunk in configs.chunks(BATCH_LANES) {
        let samples = match system {
            System::Chua(p) => integrate_lanes(p, chunk, n_samples)?,
            System::Lorenz(p) => integrate_lanes(p, chunk, n_samples)?,
            System::Rossler(p) => integrate_lanes(p, chunk, n_samples)?,
        };
        out.extend(chunk.iter().zip(samples).map(|(config, samples)| Trajectory {
            system: system.kind(),
            config: *config,
            samples,
        }));
    }
    Ok(out)
}

fn integrate_lanes<F: VectorField + ?Sized>(
    field: &F,
    configs: &[IntegratorConfig],
    n_samples: usize,
) -> Result<Vec<Vec<(f64, State3)>>> {
    debug_assert!(configs.len() <= BATCH_LANES);
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be at least 1".into()));
    }
    let first = &configs[0];
    for c in configs {
        c.step_counts()?;
    }
    let (burn, stride) = first.step_counts()?;
    let h = first.step;
    let lanes = configs.len();
    // Unused lanes repeat lane 0 and are dropped at the end.
    let mut states = [first.initial_state; BATCH_LANES];
    for (s, c) in states.iter_mut().zip(configs) {
        *s = c.initial_state;
    }
    let mut steps: u64 = 0;
    let mut advance = |states: &mut [State3; BATCH_LANES], count: u64| -> Result<()> {
        for _ in 0..count {
            for s in states.iter_mut() {
                *s = rk4_advance(field, *s, h);
            }
        }
        steps += count;
        // NaN and infinities persist, so checking once per block is enough.
        if states[..lanes].iter().all(State3::is_finite) {
            Ok(())
        } else {
            Err(Error::Divergence { time: steps as f64 * h })
        }
    };

    let mut out: Vec<Vec<(f64, State3)>> = (0..lanes).map(|_| Vec::with_capacity(n_samples)).collect();
    advance(&mut states, burn)?;
    for (lane, samples) in out.iter_mut().enumerate() {
        samples.push((first.burn_in, states[lane]));
    }
    for i in 1..n_samples {
        advance(&mut states, stride)?;
        let t = first.burn_in + i as f64 * first.tau;
        for (lane, samples) in out.iter_mut().enumerate() {
            samples.push((t, states[lane]));
        }
    }
    Ok(out)
}

/// Scalar samples of one coordinate, in time order.
pub fn extract_scalar(trajectory: &Trajectory, coordinate: Coordinate) -> Sequence {
    let values = trajectory.states().map(|s| s.get(coordinate)).collect();
    Sequence::new(
        values,
        SequenceSource::Trajectory {
            system: trajectory.system,
            coordinate,
            tau: trajectory.config.tau,
        },
    )
}
