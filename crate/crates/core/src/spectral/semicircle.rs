//! The standard semicircle law: density `√(4−t²)/(2π)` on `[−2, 2]`.

use std::f64::consts::PI;

use crate::error::{ChaosError, Result};

/// Target accuracy `|cdf(q) − u|` of [`semicircle_quantile`].
pub const QUANTILE_TOL: f64 = 1e-12;

/// Zero-sized handle for the standard semicircle law (mean 0, variance 1).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SemicircleLaw;

impl SemicircleLaw {
    pub fn density(self, x: f64) -> f64 {
        semicircle_density(x)
    }

    pub fn cdf(self, x: f64) -> f64 {
        semicircle_cdf(x)
    }

    pub fn quantile(self, u: f64) -> Result<f64> {
        semicircle_quantile(u)
    }

    /// `τ(S^k)`: `Catalan(k/2)` for even `k`, zero for odd `k`.
    pub fn moment(self, k: u32) -> u64 {
        if k % 2 == 1 {
            return 0;
        }
        catalan(u64::from(k / 2))
    }
}

fn catalan(k: u64) -> u64 {
    // C_{j+1} = C_j · 2(2j+1)/(j+2), exact in integers
    (0..k).fold(1, |c, j| c * 2 * (2 * j + 1) / (j + 2))
}

pub fn semicircle_density(x: f64) -> f64 {
    if x.abs() >= 2.0 {
        return 0.0;
    }
    (4.0 - x * x).sqrt() / (2.0 * PI)
}

/// `1/2 + x√(4−x²)/(4π) + arcsin(x/2)/π` on `[−2, 2]`, clamped outside.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        return 0.0;
    }
    if x >= 2.0 {
        return 1.0;
    }
    let v = 0.5 + x * (4.0 - x * x).sqrt() / (4.0 * PI) + (x / 2.0).asin() / PI;
    v.clamp(0.0, 1.0)
}

/// Inverse of [`semicircle_cdf`] on `(0, 1)` by Newton steps kept inside a
/// shrinking bisection bracket.
pub fn semicircle_quantile(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(ChaosError::InvalidQuantile(u));
    }
    let (mut lo, mut hi) = (-2.0f64, 2.0f64);
    let mut x = 0.0;
    for _ in 0..200 {
        let r = semicircle_cdf(x) - u;
        if r.abs() <= 0.01 * QUANTILE_TOL {
            break;
        }
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if hi - lo <= 4.0 * f64::EPSILON {
            break;
        }
        let d = semicircle_density(x);
        let newton = x - r / d;
        x = if d > 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
    }
    Ok(x)
}

/// Midpoint quantiles `q_i = quantile((i − 1/2)/n)`, `i = 1..n`.
pub fn semicircle_quantiles(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let u = (i as f64 + 0.5) / n as f64;
            semicircle_quantile(u).expect("midpoint levels lie in (0, 1)")
        })
        .collect()
}
