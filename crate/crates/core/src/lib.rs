//! Numerical calculus of Wigner chaoses.
//!
//! Kernels on a uniform step grid represent elements of `L²(ℝ₊ⁿ)` exactly,
//! so contractions, the product formula, moments and the explicit free Stein
//! kernel reduce to finite tensor algebra. The [`spectral`] module closes the
//! loop numerically: it realises chaos elements as GUE matrix polynomials and
//! compares their spectra to the semicircle law in Wasserstein distance and
//! relative free entropy.
//!
//! The algebra is generic over the scalar type ([`Real`], i.e. `f32` or
//! `f64`); the `*64` aliases below fix it to `f64`.

pub mod bichaos;
pub mod chaos;
pub mod error;
pub mod io;
pub mod kernel;
pub mod pairings;
pub mod presets;
pub mod scalar;
pub mod spectral;
pub mod stein;

pub use bichaos::BiChaosElement;
pub use chaos::{fourth_moment_deficit, moment_oracle, Budget, ChaosElement, DEFAULT_BUDGET};
pub use error::{ChaosError, Result};
pub use kernel::{GridSpec, Kernel};
pub use pairings::{BlockStructure, Pairing};
pub use presets::Preset;
pub use scalar::{Cplx, Real};
pub use stein::{stein_discrepancy_sq, stein_kernel, SteinReport};

pub type Kernel64 = Kernel<f64>;
pub type Kernel32 = Kernel<f32>;
pub type ChaosElement64 = ChaosElement<f64>;
pub type ChaosElement32 = ChaosElement<f32>;
pub type BiChaosElement64 = BiChaosElement<f64>;
pub type BiChaosElement32 = BiChaosElement<f32>;
