//! Empirical spectra, one-dimensional `W₂` by monotone coupling, and the
//! off-diagonal log-energy estimator of relative free entropy.

use serde::Serialize;

use super::matrix::{hermitian_eigenvalues, ComplexMatrix};
use super::semicircle::semicircle_quantiles;
use crate::error::{ChaosError, Result};

/// Gaps at or below this are treated as coincident eigenvalues.
pub const DUPLICATE_TOL: f64 = 1e-14;

/// Coincident values are pulled apart by this fraction of the spectral range.
pub const JITTER_FRACTION: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleMeta {
    pub dim: usize,
    pub seed: Option<u64>,
    pub trials: usize,
}

/// Sorted, finite real sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSample {
    values: Vec<f64>,
    meta: SampleMeta,
}

impl SpectralSample {
    pub fn new(mut values: Vec<f64>, meta: SampleMeta) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(ChaosError::InvalidParameter(format!("non-finite sample value {bad}")));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values, meta })
    }

    /// Sample with default provenance (`dim = len`, no seed, one trial).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let dim = values.len();
        Self::new(values, SampleMeta { dim, seed: None, trials: 1 })
    }

    /// The `n` midpoint quantiles of the semicircle law.
    pub fn semicircle_quantiles(n: usize) -> Self {
        Self { values: semicircle_quantiles(n), meta: SampleMeta { dim: n, seed: None, trials: 0 } }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.meta.seed = Some(seed);
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &SampleMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    pub fn mean_sq(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    pub fn rms(&self) -> f64 {
        self.mean_sq().sqrt()
    }

    /// Every value multiplied by `sigma`; order is preserved for `sigma > 0`.
    pub fn scaled(&self, sigma: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| sigma * v).collect(), self.meta.clone())
    }

    pub fn shifted(&self, c: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|v| v + c).collect(), self.meta.clone())
    }
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<SpectralSample> {
    let values = hermitian_eigenvalues(h)?;
    Ok(SpectralSample { meta: SampleMeta { dim: values.len(), seed: None, trials: 1 }, values })
}

/// `√((1/N) Σᵢ (λ_(i) − q_i)²)` against the midpoint semicircle quantiles.
pub fn w2_to_semicircle(s: &SpectralSample) -> f64 {
    rms_gap(s.values(), &semicircle_quantiles(s.len()))
}

/// `W₂` between two equal-size samples under the sorted coupling.
pub fn w2_samples(a: &SpectralSample, b: &SpectralSample) -> Result<f64> {
    if a.len() != b.len() {
        return Err(ChaosError::SizeMismatch(a.len(), b.len()));
    }
    Ok(rms_gap(a.values(), b.values()))
}

fn rms_gap(a: &[f64], b: &[f64]) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    (s / a.len() as f64).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// `χ̂`, unclamped.
    pub value: f64,
    /// Number of values moved by the jitter policy.
    pub jittered: usize,
}

/// `χ̂ = (1/2N) Σ λᵢ² − (1/(N(N−1))) Σ_{i≠j} log|λᵢ − λⱼ| − 3/4`.
///
/// Values within [`DUPLICATE_TOL`] of their predecessor are moved up to
/// `predecessor + JITTER_FRACTION · range`, and the count is reported.
pub fn free_entropy_estimate(s: &SpectralSample) -> Result<EntropyEstimate> {
    let n = s.len();
    if n < 2 {
        return Err(ChaosError::InvalidParameter(format!("entropy estimate needs N >= 2, got {n}")));
    }
    let mut v = s.values().to_vec();
    let range = v[n - 1] - v[0];
    let step = JITTER_FRACTION * if range > 0.0 { range } else { 1.0 };
    let mut jittered = 0;
    for i in 1..n {
        if v[i] - v[i - 1] <= DUPLICATE_TOL {
            v[i] = v[i - 1] + step;
            jittered += 1;
        }
    }
    Ok(EntropyEstimate { value: entropy_of_distinct(&v), jittered })
}

/// As [`free_entropy_estimate`] but refuses coincident values.
pub fn free_entropy_estimate_strict(s: &SpectralSample) -> Result<f64> {
    let count = s.values().windows(2).filter(|w| w[1] - w[0] <= DUPLICATE_TOL).count();
    if count > 0 {
        return Err(ChaosError::DuplicateEigenvalues { count, tol: DUPLICATE_TOL });
    }
    Ok(free_entropy_estimate(s)?.value)
}

fn entropy_of_distinct(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let quad = v.iter().map(|x| x * x).sum::<f64>() / (2.0 * n);
    let mut log_energy = 0.0;
    for (i, x) in v.iter().enumerate() {
        let row: f64 = v[i + 1..].iter().map(|y| (y - x).abs().ln()).sum();
        log_energy += row;
    }
    quad - 2.0 * log_energy / (n * (n - 1.0)) - 0.75
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(v: &[f64]) -> SpectralSample {
        SpectralSample::from_values(v.to_vec()).unwrap()
    }

    #[test]
    fn construction_sorts_and_validates() {
        let s = sample(&[3.0, -1.0, 2.0]);
        assert_eq!(s.values(), &[-1.0, 2.0, 3.0]);
        assert!(SpectralSample::from_values(vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn w2_examples() {
        let s = sample(&[0.3, -1.2, 0.8, 1.9]);
        assert_eq!(w2_samples(&s, &s).unwrap(), 0.0);
        let t = s.shifted(0.25).unwrap();
        assert!((w2_samples(&s, &t).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(w2_samples(&s, &sample(&[1.0])), Err(ChaosError::SizeMismatch(4, 1))));
        assert_eq!(w2_to_semicircle(&SpectralSample::semicircle_quantiles(50)), 0.0);
    }

    #[test]
    fn two_point_entropy() {
        let e = free_entropy_estimate(&sample(&[-1.0, 1.0])).unwrap();
        assert!((e.value - (0.5 - 2f64.ln() - 0.75)).abs() < 1e-15);
        assert_eq!(e.jittered, 0);
        assert!(free_entropy_estimate(&sample(&[1.0])).is_err());
    }

    #[test]
    fn duplicates_are_jittered_or_refused() {
        let s = sample(&[0.0, 1.0, 1.0, 2.0]);
        let e = free_entropy_estimate(&s).unwrap();
        assert_eq!(e.jittered, 1);
        assert!(e.value.is_finite());
        assert!(matches!(free_entropy_estimate_strict(&s), Err(ChaosError::DuplicateEigenvalues { count: 1, .. })));
    }

    #[test]
    fn entropy_scaling_identity() {
        let s = sample(&[-1.7, -0.4, 0.1, 0.9, 1.3, 2.2]);
        let base = free_entropy_estimate(&s).unwrap().value;
        for sigma in [0.5, 1.5, 3.0] {
            let scaled = free_entropy_estimate(&s.scaled(sigma).unwrap()).unwrap().value;
            let want = (sigma * sigma - 1.0) * s.mean_sq() / 2.0 - sigma.ln();
            assert!((scaled - base - want).abs() < 1e-13);
        }
    }
}
