//! Numeric comparators for the transport and entropy inequalities, and the
//! Monte Carlo report that sets a chaos element's matrix model against them.

use rayon::prelude::*;
use serde::Serialize;

use super::model::kernel_matrix_model;
use super::sample::{eigenvalues, free_entropy_estimate, w2_samples, w2_to_semicircle, SpectralSample};
use crate::error::{ChaosError, Result};
use crate::kernel::Kernel;
use crate::scalar::Real;
use crate::stein::stein_discrepancy_sq;

/// Finite-`N` allowance added to the theorem bound before flagging a violation.
pub const EPSILON_N: f64 = 0.1;

/// Slack for the deterministic test-function bound.
pub const TEST_FUNCTION_SLACK: f64 = 1e-9;

/// `arccos(e^{−x})` without cancellation for small `x`.
pub fn arccos_exp_neg(x: f64) -> f64 {
    let c = (-x).exp();
    let s = (-(-2.0 * x).exp_m1()).sqrt();
    s.atan2(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WshRow {
    pub x: f64,
    /// `arccos(e^{−x})`.
    pub lhs: f64,
    /// `√(2x)`.
    pub rhs: f64,
}

impl WshRow {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

/// `(x, arccos(e^{−x}), √(2x))` for every `x > 0`.
pub fn wsh_scalar_check(xs: &[f64]) -> Result<Vec<WshRow>> {
    xs.iter()
        .map(|&x| {
            if !(x > 0.0 && x.is_finite()) {
                return Err(ChaosError::InvalidParameter(format!("x must be positive, got {x}")));
            }
            Ok(WshRow { x, lhs: arccos_exp_neg(x), rhs: (2.0 * x).sqrt() })
        })
        .collect()
}

/// `count` points log-spaced from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TestFunctionCheck {
    pub omega: f64,
    /// `|mean h(a) − mean h(b)|` for `h(x) = −cos(ωx)/ω²`.
    pub lhs: f64,
    /// `½(rms(a) + rms(b))·W₂(a, b)`.
    pub rhs: f64,
}

impl TestFunctionCheck {
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack
    }
}

/// Compares `h(x) = −cos(ωx)/ω²` (`‖h″‖_∞ = 1`, `h′(0) = 0`) on two samples
/// with the `W₂` bound.
pub fn test_function_bound_check(a: &SpectralSample, b: &SpectralSample, omega: f64) -> Result<TestFunctionCheck> {
    if omega == 0.0 || !omega.is_finite() {
        return Err(ChaosError::InvalidParameter(format!("omega must be finite and nonzero, got {omega}")));
    }
    let w2 = w2_samples(a, b)?;
    let h = |s: &SpectralSample| {
        s.values().iter().map(|x| -(omega * x).cos()).sum::<f64>() / (omega * omega * s.len() as f64)
    };
    Ok(TestFunctionCheck { omega, lhs: (h(a) - h(b)).abs(), rhs: 0.5 * (a.rms() + b.rms()) * w2 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InequalityReport {
    pub order: usize,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Mean over trials of `W₂(spectrum, semicircle)`.
    pub w2_est: f64,
    /// Sample standard deviation of the per-trial `W₂`; zero for one trial.
    pub w2_spread: f64,
    pub w2_trials: Vec<f64>,
    /// Mean over trials of `χ̂`, unclamped.
    pub entropy_est: f64,
    pub entropy_trials: Vec<f64>,
    /// Total number of eigenvalues moved by the duplicate jitter.
    pub jittered: usize,
    pub delta_sq: f64,
    /// `Δ = delta_sq^{1/2}`.
    pub sigma_upper: f64,
    /// `√(2·max(χ̂, 0))`.
    pub talagrand_rhs: f64,
    /// `Δ`.
    pub ws_rhs: f64,
    /// `Δ·arccos(exp(−max(χ̂, 0)/Δ²))`, absent when `Δ = 0`.
    pub wsh_rhs: Option<f64>,
    pub deficit: f64,
    /// `n^{3/4}·deficit^{1/4}`.
    pub theorem_rhs: f64,
    pub epsilon_n: f64,
    /// `w2_est > theorem_rhs + epsilon_n`.
    pub violation: bool,
}

struct Trial {
    w2: f64,
    entropy: f64,
    jittered: usize,
}

/// Runs `trials` independent matrix models of `I_n(f)` at dimension `dim`
/// (trial `t` seeded with `seed ^ t`) and assembles every bound.
pub fn inequality_report<T: Real>(f: &Kernel<T>, dim: usize, trials: usize, seed: u64) -> Result<InequalityReport> {
    if trials == 0 {
        return Err(ChaosError::InvalidParameter("trials must be at least 1".into()));
    }
    let stein = stein_discrepancy_sq(f)?;
    let outcomes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let h = kernel_matrix_model(f, dim, seed ^ t)?;
            let spectrum = eigenvalues(&h)?.with_seed(seed ^ t);
            let e = free_entropy_estimate(&spectrum)?;
            Ok(Trial { w2: w2_to_semicircle(&spectrum), entropy: e.value, jittered: e.jittered })
        })
        .collect::<Result<Vec<_>>>()?;

    let w2_trials: Vec<f64> = outcomes.iter().map(|t| t.w2).collect();
    let entropy_trials: Vec<f64> = outcomes.iter().map(|t| t.entropy).collect();
    let w2_est = mean(&w2_trials);
    let entropy_est = mean(&entropy_trials);
    let chi = entropy_est.max(0.0);
    let delta = stein.delta_sq.sqrt();
    let theorem_rhs = stein.theorem_w2_bound;
    Ok(InequalityReport {
        order: f.order(),
        dim,
        trials,
        seed,
        w2_est,
        w2_spread: spread(&w2_trials),
        w2_trials,
        entropy_est,
        entropy_trials,
        jittered: outcomes.iter().map(|t| t.jittered).sum(),
        delta_sq: stein.delta_sq,
        sigma_upper: delta,
        talagrand_rhs: (2.0 * chi).sqrt(),
        ws_rhs: delta,
        wsh_rhs: (delta > 0.0).then(|| delta * arccos_exp_neg(chi / stein.delta_sq)),
        deficit: stein.deficit,
        theorem_rhs,
        epsilon_n: EPSILON_N,
        violation: w2_est > theorem_rhs + EPSILON_N,
    })
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn spread(v: &[f64]) -> f64 {
    if v.len() < 2 {
        return 0.0;
    }
    let m = mean(v);
    (v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GridSpec;
    use crate::presets::basis_power;

    #[test]
    fn arccos_form_matches_naive_away_from_zero() {
        for x in [0.01, 0.5, 1.0, 3.0, 10.0] {
            assert!((arccos_exp_neg(x) - (-x).exp().acos()).abs() < 1e-14);
        }
        assert!((arccos_exp_neg(1.0) - 1.194).abs() < 1e-3);
        assert!((arccos_exp_neg(10.0) - std::f64::consts::FRAC_PI_2).abs() < 1e-4);
    }

    #[test]
    fn wsh_rows() {
        let rows = wsh_scalar_check(&log_spaced(1e-6, 10.0, 50)).unwrap();
        assert_eq!(rows.len(), 50);
        assert!((rows[0].x - 1e-6).abs() < 1e-18 && (rows[49].x - 10.0).abs() < 1e-12);
        assert!(rows.iter().all(WshRow::holds));
        assert!(wsh_scalar_check(&[0.0]).is_err());
    }

    #[test]
    fn test_function_trivial_cases() {
        let a = SpectralSample::from_values(vec![-1.0, 0.2, 0.5, 1.4]).unwrap();
        let c = test_function_bound_check(&a, &a, 2.0).unwrap();
        assert_eq!((c.lhs, c.rhs), (0.0, 0.0));
        let b = a.shifted(0.3).unwrap();
        for omega in [1.0, 2.0, 5.0] {
            assert!(test_function_bound_check(&a, &b, omega).unwrap().holds(TEST_FUNCTION_SLACK));
        }
        assert!(test_function_bound_check(&a, &b, 0.0).is_err());
    }

    #[test]
    fn report_is_reproducible_and_consistent() {
        let f = basis_power::<f64>(GridSpec::unit(1).unwrap(), 2).unwrap();
        let r = inequality_report(&f, 48, 3, 9).unwrap();
        assert_eq!(r, inequality_report(&f, 48, 3, 9).unwrap());
        assert_eq!(r.delta_sq, 2.0);
        assert_eq!(r.deficit, 1.0);
        assert_eq!(r.w2_trials.len(), 3);
        assert!(r.wsh_rhs.unwrap() <= r.ws_rhs * std::f64::consts::FRAC_PI_2);
        assert!(inequality_report(&f, 48, 0, 9).is_err());
    }
}
