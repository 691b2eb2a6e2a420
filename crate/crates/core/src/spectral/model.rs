//! Finite-`N` realisation of chaos elements: one independent GUE matrix
//! `G_i` per grid cell stands in for `S(e_i)`, and Wick words obey
//! `W(i₁,…,iₙ) = G_{i₁}·W(i₂,…,iₙ) − δ_{i₁i₂}·W(i₃,…,iₙ)` with `W() = 1`.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::matrix::{sample_gue_with, ComplexMatrix, HERMITIAN_TOL};
use crate::chaos::ChaosElement;
use crate::error::{ChaosError, Result};
use crate::kernel::Kernel;
use crate::scalar::Real;
use crate::stein::MIRROR_TOL;

/// Largest total number of kernel coefficients the model accepts.
pub const MODEL_TERM_BUDGET: usize = 100_000;

/// Largest matrix dimension the model accepts.
pub const MAX_MODEL_DIM: usize = 4096;

/// Independent GUE matrices `G_0, …, G_{m−1}`, drawn in cell order from one
/// ChaCha8 stream.
#[derive(Clone, Debug)]
pub struct GueFamily {
    matrices: Vec<ComplexMatrix>,
}

impl GueFamily {
    pub fn sample(cells: usize, dim: usize, seed: u64) -> Result<Self> {
        check_dim(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok(Self { matrices: (0..cells).map(|_| sample_gue_with(dim, &mut rng)).collect() })
    }

    pub fn dim(&self) -> usize {
        self.matrices.first().map_or(0, ComplexMatrix::dim)
    }

    pub fn cells(&self) -> usize {
        self.matrices.len()
    }

    pub fn matrices(&self) -> &[ComplexMatrix] {
        &self.matrices
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if !(2..=MAX_MODEL_DIM).contains(&dim) {
        return Err(ChaosError::InvalidParameter(format!(
            "matrix dimension must lie in 2..={MAX_MODEL_DIM}, got {dim}"
        )));
    }
    Ok(())
}

/// `F_N = Σₙ Σ_idx fₙ[idx]·W(idx)` for a fresh [`GueFamily`] drawn from `seed`.
pub fn matrix_model<T: Real>(f: &ChaosElement<T>, dim: usize, seed: u64) -> Result<ComplexMatrix> {
    check_model_input(f)?;
    let family = GueFamily::sample(f.grid().cells(), dim, seed)?;
    matrix_model_with(f, &family)
}

/// Single-kernel convenience wrapper around [`matrix_model`].
pub fn kernel_matrix_model<T: Real>(f: &Kernel<T>, dim: usize, seed: u64) -> Result<ComplexMatrix> {
    matrix_model(&ChaosElement::from_kernel(f.clone()), dim, seed)
}

fn check_model_input<T: Real>(f: &ChaosElement<T>) -> Result<()> {
    let terms = f.coefficient_count();
    if terms > MODEL_TERM_BUDGET {
        return Err(ChaosError::BudgetExceeded { needed: terms, budget: MODEL_TERM_BUDGET });
    }
    for k in f.components().values() {
        let defect = k.mirror_defect().to_f64_lossy();
        if defect > MIRROR_TOL {
            return Err(ChaosError::NotMirrorSymmetric { defect });
        }
    }
    Ok(())
}

/// The model evaluated on a given family. The result is checked to be
/// Hermitian up to rounding and then symmetrised.
pub fn matrix_model_with<T: Real>(f: &ChaosElement<T>, family: &GueFamily) -> Result<ComplexMatrix> {
    check_model_input(f)?;
    if family.cells() != f.grid().cells() {
        return Err(ChaosError::ShapeMismatch(format!(
            "{} GUE matrices for a grid of {} cells",
            family.cells(),
            f.grid().cells()
        )));
    }
    let dim = family.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for k in f.components().values() {
        let coeffs: Vec<Complex<f64>> =
            k.coeffs().iter().map(|c| Complex::new(c.re.to_f64_lossy(), c.im.to_f64_lossy())).collect();
        if let Some(m) = words(&coeffs, k.order(), family.matrices(), dim) {
            out.add_scaled(Complex::new(1.0, 0.0), &m);
        }
    }
    let defect = out.hermitian_defect();
    if defect > HERMITIAN_TOL * out.max_abs().max(1.0) {
        return Err(ChaosError::NotHermitian { defect });
    }
    out.symmetrize();
    Ok(out)
}

/// `Σ_idx c[idx]·W(idx)` by expanding the first index:
/// `Σ_i G_i·M(c[i,·]) − M(Σ_i c[i,i,·])`. `None` when `c` vanishes.
fn words(c: &[Complex<f64>], order: usize, gs: &[ComplexMatrix], dim: usize) -> Option<ComplexMatrix> {
    let zero = Complex::new(0.0, 0.0);
    if c.iter().all(|&z| z == zero) {
        return None;
    }
    let m = gs.len();
    match order {
        0 => Some(ComplexMatrix::identity(dim).scale(c[0])),
        1 => {
            let mut out = ComplexMatrix::zeros(dim);
            for (g, &z) in gs.iter().zip(c) {
                if z != zero {
                    out.add_scaled(z, g);
                }
            }
            Some(out)
        }
        _ => {
            let stride = c.len() / m;
            let mut out = ComplexMatrix::zeros(dim);
            for (i, g) in gs.iter().enumerate() {
                if let Some(inner) = words(&c[i * stride..(i + 1) * stride], order - 1, gs, dim) {
                    out.add_product(g, &inner);
                }
            }
            let inner_stride = stride / m;
            let mut h = vec![zero; inner_stride];
            for i in 0..m {
                let base = (i * m + i) * inner_stride;
                for (acc, &z) in h.iter_mut().zip(&c[base..base + inner_stride]) {
                    *acc += z;
                }
            }
            if let Some(low) = words(&h, order - 2, gs, dim) {
                out.add_scaled(Complex::new(-1.0, 0.0), &low);
            }
            Some(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GridSpec;
    use crate::presets::random_mirror;

    fn max_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        let mut d = a.clone();
        d.add_scaled(Complex::new(-1.0, 0.0), b);
        d.max_abs()
    }

    #[test]
    fn unit_and_first_order() {
        let g = GridSpec::unit(2).unwrap();
        let fam = GueFamily::sample(2, 8, 5).unwrap();
        let one = matrix_model_with(&ChaosElement::<f64>::one(g), &fam).unwrap();
        assert_eq!(one, ComplexMatrix::identity(8));
        let e0 = ChaosElement::from_kernel(Kernel::<f64>::basis(g, &[0]).unwrap());
        assert_eq!(matrix_model_with(&e0, &fam).unwrap(), fam.matrices()[0]);
    }

    #[test]
    fn second_order_basis_word() {
        let g = GridSpec::unit(2).unwrap();
        let fam = GueFamily::sample(2, 8, 5).unwrap();
        let f = ChaosElement::from_kernel(Kernel::<f64>::basis(g, &[0, 0]).unwrap());
        let got = matrix_model_with(&f, &fam).unwrap();
        let g0 = &fam.matrices()[0];
        let mut want = g0.mul(g0);
        want.add_scaled(Complex::new(-1.0, 0.0), &ComplexMatrix::identity(8));
        assert!(max_diff(&got, &want) < 1e-14);
    }

    #[test]
    fn model_is_multiplicative() {
        let g = GridSpec::unit(2).unwrap();
        let fam = GueFamily::sample(2, 6, 11).unwrap();
        let a = ChaosElement::from_kernel(random_mirror::<f64>(g, 2, 1).unwrap());
        let b = ChaosElement::from_kernel(random_mirror::<f64>(g, 3, 2).unwrap());
        let ab = a.mul(&b).unwrap().add(&b.mul(&a).unwrap()).unwrap();
        let ma = matrix_model_with(&a, &fam).unwrap();
        let mb = matrix_model_with(&b, &fam).unwrap();
        let mut want = ma.mul(&mb);
        want.add_product(&mb, &ma);
        let got = matrix_model_with(&ab, &fam).unwrap();
        assert!(max_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let g = GridSpec::unit(2).unwrap();
        let not_mirror = ChaosElement::from_kernel(Kernel::<f64>::basis(g, &[0, 1]).unwrap());
        assert!(matches!(matrix_model(&not_mirror, 4, 0), Err(ChaosError::NotMirrorSymmetric { .. })));
        let e0 = ChaosElement::from_kernel(Kernel::<f64>::basis(g, &[0]).unwrap());
        assert!(matrix_model(&e0, 1, 0).is_err());
        assert!(matrix_model(&e0, MAX_MODEL_DIM + 1, 0).is_err());
        let big = GridSpec::unit(7).unwrap();
        let f = ChaosElement::from_kernel(Kernel::<f64>::basis(big, &[0; 6]).unwrap());
        assert!(matches!(matrix_model(&f, 4, 0), Err(ChaosError::BudgetExceeded { .. })));
    }
}
