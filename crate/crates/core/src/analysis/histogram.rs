use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Equal-width histogram with counts and a unit-area density.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
}

impl Histogram {
    /// Bins `values` over `[lo, hi]`; values outside the range are clamped
    /// into the first or last bin.
    pub fn with_range(values: &[f64], n_bins: usize, lo: f64, hi: f64) -> Result<Self> {
        if n_bins == 0 {
            return Err(Error::InvalidParameter("need at least one bin".into()));
        }
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::DegenerateSequence(format!("empty range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / n_bins as f64;
        let mut counts = vec![0u64; n_bins];
        for &v in values {
            let idx = ((v - lo) / width).floor();
            let idx = if idx.is_nan() || idx < 0.0 {
                0
            } else {
                (idx as usize).min(n_bins - 1)
            };
            counts[idx] += 1;
        }
        let bin_edges = (0..=n_bins).map(|i| lo + i as f64 * width).collect();
        let total = values.len() as f64;
        let density = counts
            .iter()
            .map(|&c| if total > 0.0 { c as f64 / (total * width) } else { 0.0 })
            .collect();
        Ok(Histogram {
            bin_edges,
            counts,
            density,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// `(left, right)` edges of bin `i`.
    pub fn bin(&self, i: usize) -> (f64, f64) {
        (self.bin_edges[i], self.bin_edges[i + 1])
    }

    /// ∫ density over all bins.
    pub fn area(&self) -> f64 {
        (0..self.n_bins())
            .map(|i| {
                let (l, r) = self.bin(i);
                self.density[i] * (r - l)
            })
            .sum()
    }
}

/// Density histogram over `[min, max]` of the sequence.
pub fn empirical_pdf(seq: &Sequence, n_bins: usize) -> Result<Histogram> {
    if seq.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 samples, got {}",
            seq.len()
        )));
    }
    if n_bins < 2 {
        return Err(Error::InvalidParameter("need at least 2 bins".into()));
    }
    let (lo, hi) = seq
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(hi > lo) {
        return Err(Error::DegenerateSequence("zero range".into()));
    }
    Histogram::with_range(seq.values(), n_bins, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{generate, SequenceKind, SequenceSpec};

    #[test]
    fn uniform_density_is_flat() {
        let seq = generate(&SequenceSpec::new(SequenceKind::Uniform01, 21), 100_000).unwrap();
        let h = empirical_pdf(&seq, 20).unwrap();
        assert_eq!(h.bin_edges.len(), 21);
        assert_eq!(h.total(), 100_000);
        assert!((h.area() - 1.0).abs() < 1e-9);
        for d in &h.density {
            assert!((0.85..=1.15).contains(d), "{d}");
        }
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            empirical_pdf(&Sequence::from_values(vec![2.0; 200]), 10),
            Err(Error::DegenerateSequence(_))
        ));
        assert!(empirical_pdf(&Sequence::from_values(vec![1.0; 50]), 10).is_err());
        let ok = Sequence::from_values((0..200).map(f64::from).collect());
        assert!(empirical_pdf(&ok, 1).is_err());
    }

    #[test]
    fn clamping_and_edges() {
        let h = Histogram::with_range(&[-5.0, 0.0, 0.5, 1.0, 9.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, vec![2, 3]);
        assert!((h.area() - 1.0).abs() < 1e-12);
    }
}
