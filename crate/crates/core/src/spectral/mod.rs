//! Spectral side: the semicircle law, GUE matrix models of chaos elements,
//! empirical `W₂` and free entropy, and the inequality comparators.
//!
//! Matrix work is in `f64` throughout; kernels of any [`Real`](crate::Real)
//! type are converted on entry.

pub mod inequality;
pub mod matrix;
pub mod model;
pub mod sample;
pub mod semicircle;

pub use inequality::{
    inequality_report, test_function_bound_check, wsh_scalar_check, InequalityReport, TestFunctionCheck, WshRow,
    EPSILON_N,
};
pub use matrix::{hermitian_eigenvalues, sample_gue, ComplexMatrix};
pub use model::{kernel_matrix_model, matrix_model, matrix_model_with, GueFamily};
pub use sample::{
    eigenvalues, free_entropy_estimate, free_entropy_estimate_strict, w2_samples, w2_to_semicircle, EntropyEstimate,
    SampleMeta, SpectralSample,
};
pub use semicircle::{semicircle_cdf, semicircle_density, semicircle_quantile, semicircle_quantiles, SemicircleLaw};
