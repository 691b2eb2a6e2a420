//! Dense complex matrices stored as separate real and imaginary parts, so
//! that products run on real GEMM kernels.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{ChaosError, Result};

/// Absolute tolerance on `max |H_ij − conj(H_ji)|` for Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    re: DMatrix<f64>,
    im: DMatrix<f64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { re: DMatrix::zeros(dim, dim), im: DMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { re: DMatrix::identity(dim, dim), im: DMatrix::zeros(dim, dim) }
    }

    pub fn from_parts(re: DMatrix<f64>, im: DMatrix<f64>) -> Result<Self> {
        if !re.is_square() || re.shape() != im.shape() {
            return Err(ChaosError::ShapeMismatch(format!(
                "real part {:?} and imaginary part {:?} must be equal square shapes",
                re.shape(),
                im.shape()
            )));
        }
        Ok(Self { re, im })
    }

    /// Real diagonal matrix.
    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self { re: DMatrix::from_fn(n, n, |i, j| if i == j { values[i] } else { 0.0 }), im: DMatrix::zeros(n, n) }
    }

    pub fn dim(&self) -> usize {
        self.re.nrows()
    }

    pub fn re(&self) -> &DMatrix<f64> {
        &self.re
    }

    pub fn im(&self) -> &DMatrix<f64> {
        &self.im
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<f64> {
        Complex::new(self.re[(i, j)], self.im[(i, j)])
    }

    pub fn to_complex(&self) -> DMatrix<Complex<f64>> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| self.get(i, j))
    }

    pub fn adjoint(&self) -> Self {
        Self { re: self.re.transpose(), im: -self.im.transpose() }
    }

    /// `max_ij |H_ij − conj(H_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut d = 0.0f64;
        for j in 0..n {
            for i in j..n {
                let dr = self.re[(i, j)] - self.re[(j, i)];
                let di = self.im[(i, j)] + self.im[(j, i)];
                d = d.max(dr.hypot(di));
            }
        }
        d
    }

    /// Replaces `H` by `(H + H†)/2`.
    pub fn symmetrize(&mut self) {
        let n = self.dim();
        for j in 0..n {
            for i in j + 1..n {
                let r = 0.5 * (self.re[(i, j)] + self.re[(j, i)]);
                let m = 0.5 * (self.im[(i, j)] - self.im[(j, i)]);
                self.re[(i, j)] = r;
                self.re[(j, i)] = r;
                self.im[(i, j)] = m;
                self.im[(j, i)] = -m;
            }
            self.im[(j, j)] = 0.0;
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.re.iter().zip(self.im.iter()).fold(0.0, |m, (a, b)| m.max(a.hypot(*b)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.dim());
        out.add_product(self, other);
        out
    }

    /// `self += a · b`.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        self.re.gemm(1.0, &a.re, &b.re, 1.0);
        self.re.gemm(-1.0, &a.im, &b.im, 1.0);
        self.im.gemm(1.0, &a.re, &b.im, 1.0);
        self.im.gemm(1.0, &a.im, &b.re, 1.0);
    }

    /// `self += alpha · x`.
    pub fn add_scaled(&mut self, alpha: Complex<f64>, x: &Self) {
        self.re.zip_zip_apply(&x.re, &x.im, |s, r, i| *s += alpha.re * r - alpha.im * i);
        self.im.zip_zip_apply(&x.re, &x.im, |s, r, i| *s += alpha.re * i + alpha.im * r);
    }

    pub fn scale(&self, alpha: Complex<f64>) -> Self {
        let mut out = Self::zeros(self.dim());
        out.add_scaled(alpha, self);
        out
    }

    pub fn trace(&self) -> Complex<f64> {
        Complex::new(self.re.trace(), self.im.trace())
    }

    /// `tr(H)/N`.
    pub fn normalized_trace(&self) -> Complex<f64> {
        self.trace() / self.dim() as f64
    }
}

/// One `N × N` GUE matrix `(Z + Z†)/√(2N)` drawn from `rng`; `Z` has
/// independent entries with real and imaginary parts `N(0, 1/2)`, drawn in
/// row-major order.
pub fn sample_gue_with<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let half = std::f64::consts::FRAC_1_SQRT_2;
    let mut zr = DMatrix::<f64>::zeros(dim, dim);
    let mut zi = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            zr[(i, j)] = half * a;
            zi[(i, j)] = half * b;
        }
    }
    let c = 1.0 / (2.0 * dim as f64).sqrt();
    let re = DMatrix::from_fn(dim, dim, |i, j| c * (zr[(i, j)] + zr[(j, i)]));
    let im = DMatrix::from_fn(dim, dim, |i, j| c * (zi[(i, j)] - zi[(j, i)]));
    ComplexMatrix { re, im }
}

/// [`sample_gue_with`] driven by a ChaCha8 stream seeded with `seed`.
pub fn sample_gue(dim: usize, seed: u64) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(ChaosError::InvalidParameter(format!("GUE dimension must be at least 2, got {dim}")));
    }
    Ok(sample_gue_with(dim, &mut ChaCha8Rng::seed_from_u64(seed)))
}

/// Sorted eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = h.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(ChaosError::NotHermitian { defect });
    }
    let mut values: Vec<f64> = h.to_complex().symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}
