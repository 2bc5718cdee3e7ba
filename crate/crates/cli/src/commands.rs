use std::path::{Path, PathBuf};
use std::time::Instant;

use chaoscs::analysis::{
    autocorrelation, coherence, dct_basis, empirical_pdf, kmax_estimate, log_error_histogram, recovery_curve,
    rip_constant_bruteforce, trial_outcomes, Histogram, RecoveryProtocol,
};
use chaoscs::dynamics::{extract_scalar, integrate, Coordinate, IntegratorConfig, SystemKind};
use chaoscs::ensembles::{generate, SequenceKind, SequenceSpec};
use chaoscs::sensing::{build_matrix_with, MatrixOptions, MeasurementMatrix};
use chaoscs::trials::TrialPool;
use chaoscs::{Sequence, SolverConfig};
use nalgebra::DMatrix;

use crate::config::{k_list_value, missing, name_list_value, split_names, Resolver};
use crate::output::{csv_bytes, write_atomic, Manifest};
use crate::*;

/// State shared by every command: resolved parameters and timing.
struct Run {
    name: &'static str,
    started: Instant,
    r: Resolver,
    config_file: Option<PathBuf>,
    seed_flag: Option<u64>,
    out_flag: Option<PathBuf>,
    sigma: Vec<(String, Option<(f64, f64)>)>,
    trials: u64,
}

impl Run {
    fn new(name: &'static str, common: CommonArgs) -> Result<Self, CliError> {
        Ok(Run {
            name,
            started: Instant::now(),
            r: Resolver::load(common.config.as_deref())?,
            config_file: common.config,
            seed_flag: common.seed,
            out_flag: common.out,
            sigma: Vec::new(),
            trials: 0,
        })
    }

    fn seed(&mut self) -> Result<u64, CliError> {
        self.r.seed(self.seed_flag)
    }

    fn shape(&mut self, shape: ShapeArgs) -> Result<(usize, usize), CliError> {
        let n = self.r.required("N", shape.n)?;
        let m = self.r.required("M", shape.m)?;
        if n == 0 || m == 0 {
            return Err(CliError::Usage("`N` and `M` must be positive".into()));
        }
        Ok((n, m))
    }

    fn k_list(&mut self, flag: Option<String>) -> Result<Vec<usize>, CliError> {
        let flag = flag
            .map(|s| crate::config::parse_k_list(&s).map_err(|e| CliError::Usage(format!("`k`: {e}"))))
            .transpose()?;
        self.r.get_with("k", flag, k_list_value)?.ok_or_else(|| missing("k"))
    }

    fn overrides(&mut self, s: SourceArgs) -> Result<Overrides, CliError> {
        Ok(Overrides {
            tau: self.r.get("tau", s.tau)?,
            h: self.r.get("h", s.h)?,
            burn_in: self.r.get("burn_in", s.burn_in)?,
            rho: self.r.get("rho", s.rho)?,
        })
    }

    fn ensemble(&mut self, flag: Option<String>, o: &Overrides) -> Result<SequenceKind, CliError> {
        let name: String = self.r.required("ensemble", flag)?;
        o.kind(&name)
    }

    fn matrix_options(&mut self, center: bool) -> Result<MatrixOptions, CliError> {
        let center = self.r.or("center", center.then_some(true), false)?;
        Ok(MatrixOptions {
            center,
            ..MatrixOptions::default()
        })
    }

    fn trial_settings(&mut self, t: TrialArgs) -> Result<TrialSettings, CliError> {
        let trials = self.r.or("trials", t.trials, 500usize)?;
        let epsilon = self.r.or("epsilon", t.epsilon, 0.01f64)?;
        let workers = self.r.or("workers", t.workers, 1usize)?;
        let defaults = SolverConfig::default();
        let solver = SolverConfig {
            gap_tol: self.r.or("gap_tol", t.gap_tol, defaults.gap_tol)?,
            max_iters: self.r.or("max_iters", t.max_iters, defaults.max_iters)?,
            ..defaults
        };
        let matrix = self.matrix_options(t.center)?;
        if trials == 0 {
            return Err(CliError::Usage("`trials` must be positive".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(CliError::Usage(format!("`epsilon` must lie in (0, 1), got {epsilon}")));
        }
        if workers == 0 {
            return Err(CliError::Usage("`workers` must be positive".into()));
        }
        Ok(TrialSettings {
            trials,
            epsilon,
            workers,
            solver,
            matrix,
        })
    }

    fn out(&mut self) -> Result<PathBuf, CliError> {
        let default = PathBuf::from(format!("{}.csv", self.name));
        self.r.or("out", self.out_flag.take(), default)
    }

    /// Writes the CSV and then its manifest.
    fn finish(self, out: &Path, csv: Vec<u8>) -> Result<RunOutput, CliError> {
        write_atomic(out, &csv)?;
        let mut manifest = Manifest::new(self.name, out);
        manifest.config = self.r.resolved().clone();
        manifest.conflicts = self.r.conflicts().clone();
        manifest.config_file = self.config_file;
        for (name, range) in &self.sigma {
            manifest.add_sigma(name, *range);
        }
        manifest.total_trials = self.trials;
        manifest.wall_time_seconds = self.started.elapsed().as_secs_f64();
        let path = manifest.write(out)?;
        Ok(RunOutput {
            csv: out.to_path_buf(),
            manifest: path,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Overrides {
    tau: Option<f64>,
    h: Option<f64>,
    burn_in: Option<f64>,
    rho: Option<f64>,
}

impl Overrides {
    fn kind(&self, name: &str) -> Result<SequenceKind, CliError> {
        let mut kind: SequenceKind = name.parse()?;
        if let Some(c) = kind.chaotic_mut() {
            if let Some(tau) = self.tau {
                c.tau = tau;
            }
            if let Some(h) = self.h {
                c.step = h;
            }
            if let Some(b) = self.burn_in {
                c.burn_in = b;
            }
        }
        if let (SequenceKind::Ar1Gaussian { rho }, Some(r)) = (&mut kind, self.rho) {
            *rho = r;
        }
        kind.validate()?;
        Ok(kind)
    }

    fn integrator(&self, system: SystemKind) -> IntegratorConfig {
        let mut config = IntegratorConfig::for_system(system);
        if let Some(tau) = self.tau {
            config.tau = tau;
        }
        if let Some(h) = self.h {
            config.step = h;
        }
        if let Some(b) = self.burn_in {
            config.burn_in = b;
        }
        config
    }
}

struct TrialSettings {
    trials: usize,
    epsilon: f64,
    workers: usize,
    solver: SolverConfig,
    matrix: MatrixOptions,
}

impl TrialSettings {
    fn protocol(&self, n: usize, m: usize, kind: SequenceKind, seed: u64) -> RecoveryProtocol {
        RecoveryProtocol {
            epsilon: self.epsilon,
            solver: self.solver,
            matrix: self.matrix,
            ..RecoveryProtocol::new(n, m, kind, self.trials, seed)
        }
    }

    fn pool(&self) -> Result<TrialPool, CliError> {
        Ok(TrialPool::new(self.workers)?)
    }
}

pub fn execute(command: Command) -> Result<RunOutput, CliError> {
    match command {
        Command::Generate(a) => generate_cmd(a),
        Command::Autocorr(a) => signal_cmd("autocorr", a),
        Command::Pdf(a) => signal_cmd("pdf", a),
        Command::Coherence(a) => coherence_cmd(a),
        Command::Rip(a) => rip_cmd(a),
        Command::Matrix(a) => matrix_cmd(a),
        Command::RecoveryCurve(a) => curve_cmd(a),
        Command::Kmax(a) => kmax_cmd(a),
        Command::Histogram(a) => histogram_cmd(a),
        Command::Compare(a) => compare_cmd(a),
    }
}

fn generate_cmd(a: GenerateArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("generate", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let length: usize = run.r.required("length", a.length)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    if length == 0 {
        return Err(CliError::Usage("`length` must be positive".into()));
    }
    let seq = generate(&SequenceSpec::new(kind, seed), length)?;
    let rows: Vec<(usize, f64)> = seq.values().iter().copied().enumerate().collect();
    run.finish(&out, csv_bytes(&["index", "value"], &rows)?)
}

fn signal_cmd(name: &'static str, a: SignalArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new(name, a.common)?;
    let o = run.overrides(a.source)?;
    let system: Option<String> = run.r.get("system", a.system)?;
    let ensemble: Option<String> = run.r.get("ensemble", a.ensemble)?;
    let samples = run.r.or("samples", a.samples, 100_000usize)?;
    let seq = match (system, ensemble) {
        (Some(_), Some(_)) => return Err(CliError::Usage("give only one of `system` and `ensemble`".into())),
        (None, None) => {
            return Err(CliError::Usage(
                "missing required parameter `system` or `ensemble`".into(),
            ))
        }
        (Some(system), None) => {
            let coordinate = run.r.or("coordinate", a.coordinate, 1usize)?;
            let coordinate = Coordinate::from_index(coordinate)
                .map_err(|_| CliError::Usage(format!("`coordinate` must be 1, 2 or 3, got {coordinate}")))?;
            let kind: SystemKind = system.parse()?;
            // Integration starts from the default state; the seed is only echoed.
            run.seed()?;
            SignalSource::System(kind, o.integrator(kind), coordinate)
        }
        (None, Some(ensemble)) => {
            let kind = o.kind(&ensemble)?;
            SignalSource::Ensemble(SequenceSpec::new(kind, run.seed()?))
        }
    };
    let csv = if name == "autocorr" {
        let max_lag = run.r.or("max_lag", a.max_lag, 20usize)?;
        let out = run.out()?;
        run.r.check_unused()?;
        let acf = autocorrelation(&seq.draw(samples)?, max_lag)?;
        let rows: Vec<(f64, f64)> = acf.lag_times().into_iter().zip(acf.values).collect();
        (out, csv_bytes(&["lag", "value"], &rows)?)
    } else {
        let bins = run.r.or("bins", a.bins, 50usize)?;
        let out = run.out()?;
        run.r.check_unused()?;
        let pdf = empirical_pdf(&seq.draw(samples)?, bins)?;
        let rows: Vec<(f64, f64, f64)> = (0..pdf.n_bins())
            .map(|i| {
                let (l, r) = pdf.bin(i);
                (l, r, pdf.density[i])
            })
            .collect();
        (out, csv_bytes(&["bin_left", "bin_right", "density"], &rows)?)
    };
    run.finish(&csv.0, csv.1)
}

enum SignalSource {
    System(SystemKind, IntegratorConfig, Coordinate),
    Ensemble(SequenceSpec),
}

impl SignalSource {
    fn draw(&self, samples: usize) -> Result<Sequence, CliError> {
        if samples == 0 {
            return Err(CliError::Usage("`samples` must be positive".into()));
        }
        Ok(match self {
            SignalSource::System(kind, config, coordinate) => {
                extract_scalar(&integrate(&kind.with_default_params(), config, samples)?, *coordinate)
            }
            SignalSource::Ensemble(spec) => generate(spec, samples)?,
        })
    }
}

/// Draws the sequence for a single matrix and builds it.
fn one_matrix(
    kind: SequenceKind,
    seed: u64,
    n: usize,
    m: usize,
    options: &MatrixOptions,
) -> Result<MeasurementMatrix, CliError> {
    let seq = generate(&SequenceSpec::new(kind, seed), m * n)?;
    Ok(build_matrix_with(&seq, m, n, options)?)
}

fn coherence_cmd(a: CoherenceArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("coherence", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let (n, m) = run.shape(a.shape)?;
    let basis = run.r.or("basis", a.basis, "identity".to_string())?;
    let options = run.matrix_options(a.center)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    let psi = match basis.as_str() {
        "identity" => DMatrix::identity(n, n),
        "dct" => dct_basis(n),
        other => {
            return Err(CliError::Usage(format!(
                "unknown `basis` `{other}`; use identity or dct"
            )))
        }
    };
    let phi = one_matrix(kind, seed, n, m, &options)?;
    let mu = coherence(&phi.matrix().transpose(), &psi)?;
    run.sigma
        .push((kind.name().into(), Some((phi.sigma_used(), phi.sigma_used()))));
    let rows = [(n, m, kind.name(), basis.as_str(), mu)];
    run.finish(&out, csv_bytes(&["N", "M", "ensemble", "basis", "coherence"], &rows)?)
}

fn rip_cmd(a: RipArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("rip", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let (n, m) = run.shape(a.shape)?;
    let ks = run.k_list(a.k)?;
    let options = run.matrix_options(a.center)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    let phi = one_matrix(kind, seed, n, m, &options)?;
    let rows = ks
        .iter()
        .map(|&k| Ok((k, rip_constant_bruteforce(phi.matrix(), k)?.delta_k)))
        .collect::<Result<Vec<_>, CliError>>()?;
    run.sigma
        .push((kind.name().into(), Some((phi.sigma_used(), phi.sigma_used()))));
    run.finish(&out, csv_bytes(&["k", "delta_k"], &rows)?)
}

fn matrix_cmd(a: MatrixArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("matrix", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let (n, m) = run.shape(a.shape)?;
    let options = run.matrix_options(a.center)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    let phi = one_matrix(kind, seed, n, m, &options)?;
    let mut csv = Vec::new();
    phi.write_csv(&mut csv).map_err(|e| CliError::Io(e.to_string()))?;
    run.sigma
        .push((kind.name().into(), Some((phi.sigma_used(), phi.sigma_used()))));
    run.finish(&out, csv)
}

fn curve_cmd(a: CurveArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("recovery-curve", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let (n, m) = run.shape(a.shape)?;
    let ks = run.k_list(a.k)?;
    let settings = run.trial_settings(a.trials)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    let curve = recovery_curve(&settings.protocol(n, m, kind, seed), &ks, &settings.pool()?)?;
    let rows: Vec<_> = curve
        .points
        .iter()
        .map(|p| (p.k, p.trials, p.failures, p.error_rate, p.solver_failures))
        .collect();
    for p in &curve.points {
        run.sigma.push((kind.name().into(), p.sigma_range));
        run.trials += p.trials as u64;
    }
    let header = ["k", "trials", "failures", "error_rate", "solver_failures"];
    run.finish(&out, csv_bytes(&header, &rows)?)
}

fn kmax_cmd(a: KmaxArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("kmax", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let n: usize = run.r.required("N", a.n)?;
    let m_flag =
        a.m.map(|s| crate::config::parse_k_list(&s).map_err(|e| CliError::Usage(format!("`M`: {e}"))))
            .transpose()?;
    let ms = run.r.get_with("M", m_flag, k_list_value)?.ok_or_else(|| missing("M"))?;
    let threshold = run.r.or("threshold", a.threshold, 0.1f64)?;
    let settings = run.trial_settings(a.trials)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    let pool = settings.pool()?;
    let mut rows = Vec::new();
    for m in ms {
        let result = kmax_estimate(&settings.protocol(n, m, kind, seed), threshold, &pool)?;
        for p in &result.points {
            run.sigma.push((kind.name().into(), p.sigma_range));
            run.trials += p.trials as u64;
        }
        rows.push((result.n, result.m, result.ratio, result.k_max));
    }
    run.finish(&out, csv_bytes(&["N", "M", "ratio", "k_max"], &rows)?)
}

fn histogram_cmd(a: HistogramArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("histogram", a.common)?;
    let o = run.overrides(a.source)?;
    let kind = run.ensemble(a.ensemble, &o)?;
    let (n, m) = run.shape(a.shape)?;
    let k: usize = run.r.required("k", a.k)?;
    let bins = run.r.or("bins", a.bins, 26usize)?;
    let settings = run.trial_settings(a.trials)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    if settings.trials < 100 {
        return Err(CliError::Usage(format!(
            "`trials` must be at least 100 for a histogram, got {}",
            settings.trials
        )));
    }
    let outcomes = trial_outcomes(&settings.protocol(n, m, kind, seed), k, &settings.pool()?)?;
    let errors: Vec<f64> = outcomes.iter().map(|o| o.error).collect();
    let hist: Histogram = log_error_histogram(&errors, bins)?;
    let sigma = outcomes
        .iter()
        .filter_map(|o| o.sigma)
        .fold(None, |acc: Option<(f64, f64)>, s| {
            Some(acc.map_or((s, s), |(lo, hi)| (lo.min(s), hi.max(s))))
        });
    run.sigma.push((kind.name().into(), sigma));
    run.trials = outcomes.len() as u64;
    let rows: Vec<(f64, f64, u64)> = (0..hist.n_bins())
        .map(|i| {
            let (l, r) = hist.bin(i);
            (l, r, hist.counts[i])
        })
        .collect();
    run.finish(&out, csv_bytes(&["bin_left", "bin_right", "count"], &rows)?)
}

fn compare_cmd(a: CompareArgs) -> Result<RunOutput, CliError> {
    let mut run = Run::new("compare", a.common)?;
    let o = run.overrides(a.source)?;
    let names = run
        .r
        .get_with("ensembles", a.ensembles.map(|s| split_names(&s)), name_list_value)?;
    let kinds = match names {
        Some(names) if names.is_empty() => return Err(CliError::Usage("`ensembles` is empty".into())),
        Some(names) => names.iter().map(|n| o.kind(n)).collect::<Result<Vec<_>, _>>()?,
        None => {
            let kinds = SequenceKind::comparison_set()
                .iter()
                .map(|k| o.kind(k.name()))
                .collect::<Result<Vec<_>, _>>()?;
            run.r
                .note("ensembles", kinds.iter().map(|k| k.name()).collect::<Vec<_>>());
            kinds
        }
    };
    let (n, m) = run.shape(a.shape)?;
    let ks = run.k_list(a.k)?;
    let settings = run.trial_settings(a.trials)?;
    let seed = run.seed()?;
    let out = run.out()?;
    run.r.check_unused()?;

    // Every ensemble shares the master seed, so trial t at sparsity k
    // recovers the same signal under each ensemble.
    let pool = settings.pool()?;
    let mut rows = Vec::new();
    for kind in kinds {
        let curve = recovery_curve(&settings.protocol(n, m, kind, seed), &ks, &pool)?;
        for p in &curve.points {
            run.sigma.push((kind.name().into(), p.sigma_range));
            run.trials += p.trials as u64;
            rows.push((kind.name(), p.k, p.error_rate, p.trials));
        }
    }
    run.finish(&out, csv_bytes(&["ensemble", "k", "error_rate", "trials"], &rows)?)
}
