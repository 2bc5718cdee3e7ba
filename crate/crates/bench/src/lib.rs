//! Fixtures shared by the benchmarks.

use chaoscs::dynamics::{IntegratorConfig, SystemKind};
use chaoscs::ensembles::{generate, SequenceKind, SequenceSpec};
use chaoscs::sensing::{build_matrix, gen_sparse_signal, measure, MeasurementMatrix, MeasurementVector};
use chaoscs::Sequence;

/// Short-transient integrator settings so a benchmark iteration measures
/// sampling rather than burn-in.
pub fn short_config(kind: SystemKind, burn_in: f64) -> IntegratorConfig {
    IntegratorConfig {
        burn_in,
        ..IntegratorConfig::for_system(kind)
    }
}

pub fn sequence(kind: SequenceKind, len: usize, seed: u64) -> Sequence {
    generate(&SequenceSpec::new(kind, seed), len).expect("fixture sequence")
}

/// A Gaussian recovery instance of the given shape and sparsity.
pub fn gaussian_instance(n: usize, m: usize, k: usize, seed: u64) -> (MeasurementMatrix, MeasurementVector) {
    let phi = build_matrix(&sequence(SequenceKind::IidGaussian, m * n, seed), m, n).expect("fixture matrix");
    let x = gen_sparse_signal(n, k, seed ^ 0x5eed).expect("fixture signal");
    let y = measure(&phi, &x).expect("fixture measurement");
    (phi, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_have_requested_shapes() {
        let (phi, y) = gaussian_instance(20, 10, 3, 1);
        assert_eq!((phi.rows(), phi.cols(), y.len()), (10, 20, 10));
        assert_eq!(short_config(SystemKind::Chua, 1.0).burn_in, 1.0);
        assert_eq!(sequence(SequenceKind::BernoulliPm1, 16, 2).len(), 16);
    }
}
