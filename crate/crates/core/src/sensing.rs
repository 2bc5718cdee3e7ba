//! Measurement matrices, sparse test signals and measurements.

use std::io::{self, Write};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::ensembles::sample_stats;
use crate::error::{Error, Result};
use crate::seed;
use crate::sequence::{Sequence, SequenceSource};

/// Construction switches for [`build_matrix_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MatrixOptions {
    /// Subtract the sample mean before scaling.
    pub center: bool,
    /// Use this σ instead of the sample standard deviation.
    pub sigma: Option<f64>,
}

/// `M × N` sensing operator Φ.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementMatrix {
    matrix: DMatrix<f64>,
    source: SequenceSource,
    sigma_used: f64,
    centered: bool,
}

impl MeasurementMatrix {
    /// Wraps an arbitrary matrix (σ recorded as 1, raw source).
    pub fn from_matrix(matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.nrows() == 0 || matrix.ncols() == 0 {
            return Err(Error::InvalidParameter("matrix must be non-empty".into()));
        }
        if matrix.nrows() > matrix.ncols() {
            return Err(Error::InvalidParameter(format!(
                "need M <= N, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        Ok(MeasurementMatrix {
            matrix,
            source: SequenceSource::Raw,
            sigma_used: 1.0,
            centered: false,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn sigma_used(&self) -> f64 {
        self.sigma_used
    }

    pub fn centered(&self) -> bool {
        self.centered
    }

    /// Row-major CSV: a `M,N,sigma,spec` header, one metadata row, then the
    /// `M` matrix rows.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "M,N,sigma,spec")?;
        let spec = self.source.to_string().replace('"', "\"\"");
        writeln!(out, "{},{},{},\"{}\"", self.rows(), self.cols(), self.sigma_used, spec)?;
        for row in self.matrix.row_iter() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Fills an `M × N` matrix columnwise from `seq` and scales every entry by
/// `1/(σ√M)`, σ² being the sample variance of the sequence.
pub fn build_matrix(seq: &Sequence, m: usize, n: usize) -> Result<MeasurementMatrix> {
    build_matrix_with(seq, m, n, &MatrixOptions::default())
}

pub fn build_matrix_with(seq: &Sequence, m: usize, n: usize, options: &MatrixOptions) -> Result<MeasurementMatrix> {
    if m == 0 || n == 0 || m > n {
        return Err(Error::InvalidParameter(format!("need 0 < M <= N, got M={m}, N={n}")));
    }
    let expected = m * n;
    if seq.len() != expected {
        return Err(Error::LengthMismatch {
            expected,
            actual: seq.len(),
        });
    }
    let (mean, sigma) = match options.sigma {
        Some(sigma) if sigma > 0.0 && sigma.is_finite() => {
            let mean = seq.values().iter().sum::<f64>() / expected as f64;
            (mean, sigma)
        }
        Some(sigma) => return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}"))),
        None => {
            let (mean, var) = sample_stats(seq.values())?;
            (mean, var.sqrt())
        }
    };
    let offset = if options.center { mean } else { 0.0 };
    let scale = 1.0 / (sigma * (m as f64).sqrt());
    // Column-major storage is exactly the columnwise fill c[jM + i].
    let matrix = DMatrix::from_iterator(m, n, seq.values().iter().map(|c| (c - offset) * scale));
    Ok(MeasurementMatrix {
        matrix,
        source: seq.source().clone(),
        sigma_used: sigma,
        centered: options.center,
    })
}

/// `k` spikes of random sign at uniformly random positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSignal {
    values: Vec<f64>,
    sparsity: usize,
}

impl SparseSignal {
    /// Validates that `values` holds only 0 and ±1.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !matches!(**v, 0.0 | 1.0 | -1.0)) {
            return Err(Error::InvalidParameter(format!(
                "sparse signal entries must be 0 or ±1, got {bad}"
            )));
        }
        let sparsity = values.iter().filter(|v| **v != 0.0).count();
        Ok(SparseSignal { values, sparsity })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sparsity(&self) -> usize {
        self.sparsity
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, _)| i)
    }
}

pub fn gen_sparse_signal(n: usize, k: usize, seed: u64) -> Result<SparseSignal> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds N = {n}")));
    }
    let mut rng = seed::rng(seed);
    let mut values = vec![0.0; n];
    for v in values.iter_mut().take(k) {
        *v = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    values.shuffle(&mut rng);
    Ok(SparseSignal { values, sparsity: k })
}

/// Measurements `y = Φx`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementVector(pub DVector<f64>);

impl MeasurementVector {
    pub fn values(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<f64>> for MeasurementVector {
    fn from(v: Vec<f64>) -> Self {
        MeasurementVector(DVector::from_vec(v))
    }
}

pub fn measure(phi: &MeasurementMatrix, x: &SparseSignal) -> Result<MeasurementVector> {
    measure_dense(phi, x.values())
}

/// `Φx` for an arbitrary dense vector.
pub fn measure_dense(phi: &MeasurementMatrix, x: &[f64]) -> Result<MeasurementVector> {
    if phi.cols() != x.len() {
        return Err(Error::DimensionMismatch {
            expected: phi.cols(),
            actual: x.len(),
        });
    }
    Ok(MeasurementVector(phi.matrix() * DVector::from_column_slice(x)))
}
