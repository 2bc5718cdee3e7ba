//! Statistical and recovery diagnostics.

mod autocorr;
mod coherence;
mod histogram;
mod recovery;
mod rip;

pub use autocorr::{autocorrelation, autocorrelation_with, AutocorrResult};
pub use coherence::{coherence, dct_basis};
pub use histogram::{empirical_pdf, Histogram};
pub use recovery::{
    classify_recovery, error_histogram, kmax_estimate, kmax_from_rates, log_error_histogram, recovery_curve,
    recovery_point, relative_error, run_trial, trial_outcomes, Classification, KmaxResult, RecoveryCurve,
    RecoveryPoint, RecoveryProtocol, TrialOutcome, LOG_ERROR_RANGE,
};
pub use rip::{rip_constant_bruteforce, RipEstimate};
