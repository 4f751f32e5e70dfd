//! Empirical certification of the regularity, kernel and norm-equivalence estimates.
//!
//! Every check reports the constants it observed; a check passes when those constants are finite
//! and stable under lattice refinement, or when a fitted exponent clears its threshold.

pub mod equivalence;
pub mod family;
pub mod kernels;
pub mod regularity;
pub mod report;
pub mod suite;

pub use equivalence::{norm_equivalence_report, EquivalenceCase, RatioRange};
pub use family::band_limited_family;
pub use kernels::{default_fit_times, kernel_l1_decay, kernel_time_lipschitz, BandKernel, KernelDecay, KernelLipschitz};
pub use regularity::{verify_regularity, verify_time_regularity, CauchyCase};
pub use report::{CheckRecord, Environment, EstimateReport};
pub use suite::{probe_function, run_suite, SuiteContext};
