use std::fmt;

use crate::dynamics::{Coordinate, SystemKind};
use crate::ensembles::SequenceSpec;

/// Where the samples of a [`Sequence`] came from.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceSource {
    /// Produced by [`crate::ensembles::generate`].
    Generated(SequenceSpec),
    /// One coordinate of an integrated trajectory.
    Trajectory {
        system: SystemKind,
        coordinate: Coordinate,
        tau: f64,
    },
    /// Values supplied directly by the caller.
    Raw,
}

impl SequenceSource {
    /// Spacing between consecutive samples in time units, when the source
    /// is a sampled continuous-time signal.
    pub fn sample_distance(&self) -> Option<f64> {
        match self {
            SequenceSource::Generated(spec) => spec.kind.chaotic().map(|c| c.tau),
            SequenceSource::Trajectory { tau, .. } => Some(*tau),
            SequenceSource::Raw => None,
        }
    }
}

impl fmt::Display for SequenceSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceSource::Generated(spec) => write!(f, "{spec}"),
            SequenceSource::Trajectory {
                system,
                coordinate,
                tau,
            } => write!(f, "{system}_{coordinate}(tau={tau})"),
            SequenceSource::Raw => f.write_str("raw"),
        }
    }
}

/// Ordered scalar samples with their provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    values: Vec<f64>,
    source: SequenceSource,
}

impl Sequence {
    pub fn new(values: Vec<f64>, source: SequenceSource) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Sequence { values, source }
    }

    /// Wraps caller-supplied values.
    pub fn from_values(values: Vec<f64>) -> Self {
        Sequence::new(values, SequenceSource::Raw)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn source(&self) -> &SequenceSource {
        &self.source
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
