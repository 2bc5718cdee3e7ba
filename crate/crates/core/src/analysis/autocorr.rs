use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Normalized autocorrelation `R(l)/R(0)` for `l = 0..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrResult {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Time between samples, when known.
    pub sample_distance: Option<f64>,
}

impl AutocorrResult {
    /// Lags in time units (sample lags if the spacing is unknown).
    pub fn lag_times(&self) -> Vec<f64> {
        let dt = self.sample_distance.unwrap_or(1.0);
        self.lags.iter().map(|&l| l as f64 * dt).collect()
    }

    pub fn at_lag(&self, lag: usize) -> Option<f64> {
        self.values.get(lag).copied()
    }

    /// Largest strict local maximum whose lag time lies in `(lo, hi]`.
    pub fn peak_in_window(&self, lo: f64, hi: f64) -> Option<(f64, f64)> {
        let times = self.lag_times();
        let v = &self.values;
        (1..v.len().saturating_sub(1))
            .filter(|&l| times[l] > lo && times[l] <= hi)
            .filter(|&l| v[l] > v[l - 1] && v[l] >= v[l + 1])
            .map(|l| (times[l], v[l]))
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Raw time-average autocorrelation `R(l) = 1/(n−l) Σ c_{i+l} c_i`,
/// normalized by `R(0)`.
pub fn autocorrelation(seq: &Sequence, max_lag: usize) -> Result<AutocorrResult> {
    autocorrelation_with(seq, max_lag, false)
}

/// As [`autocorrelation`]; with `centered` the sample mean is removed first.
pub fn autocorrelation_with(seq: &Sequence, max_lag: usize, centered: bool) -> Result<AutocorrResult> {
    let n = seq.len();
    if n <= 4 * max_lag || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need more than 4·max_lag = {} samples, got {n}",
            4 * max_lag
        )));
    }
    let mean = if centered {
        seq.values().iter().sum::<f64>() / n as f64
    } else {
        0.0
    };
    let c: Vec<f64> = seq.values().iter().map(|v| v - mean).collect();
    let raw = |lag: usize| -> f64 {
        let s: f64 = c[lag..].iter().zip(&c).map(|(a, b)| a * b).sum();
        s / (n - lag) as f64
    };
    let r0 = raw(0);
    if !(r0 > 0.0) {
        return Err(Error::DegenerateSequence("R(0) is zero".into()));
    }
    let mut values = Vec::with_capacity(max_lag + 1);
    values.push(1.0);
    values.extend((1..=max_lag).map(|l| raw(l) / r0));
    Ok(AutocorrResult {
        lags: (0..=max_lag).collect(),
        values,
        sample_distance: seq.source().sample_distance(),
    })
}
