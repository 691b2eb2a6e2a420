//! Named kernel families used by tests, the acceptance suite and the CLI.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{ChaosError, Result};
use crate::kernel::{GridSpec, Kernel};
use crate::scalar::Real;

/// A named test family with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    /// `e₀^{⊗n}`.
    BasisPower { order: usize },
    /// `k^{-1/2} Σ_{i<k} e_i⊗e_i`.
    DiagonalFamily { k: usize },
    /// `g + g*` for a complex Gaussian `g`, normalised to unit norm.
    RandomMirror { order: usize, seed: u64 },
}

impl Preset {
    /// Builds a preset from its name and integer parameters.
    pub fn from_parts(name: &str, params: &[u64]) -> Result<Self> {
        let param = |i: usize| {
            params
                .get(i)
                .copied()
                .ok_or_else(|| ChaosError::InvalidParameter(format!("preset `{name}` needs parameter #{}", i + 1)))
        };
        match name {
            "basis_power" => Ok(Self::BasisPower { order: param(0)? as usize }),
            "diagonal_family" | "diagonal" => Ok(Self::DiagonalFamily { k: param(0)? as usize }),
            "random_mirror" => {
                Ok(Self::RandomMirror { order: param(0)? as usize, seed: params.get(1).copied().unwrap_or(0) })
            }
            other => Err(ChaosError::UnknownPreset(other.to_string())),
        }
    }

    /// Smallest grid the preset fits on.
    pub fn min_cells(&self) -> usize {
        match *self {
            Self::BasisPower { .. } => 1,
            Self::DiagonalFamily { k } => k.max(1),
            Self::RandomMirror { .. } => 1,
        }
    }

    pub fn build<T: Real>(&self, grid: GridSpec) -> Result<Kernel<T>> {
        match *self {
            Self::BasisPower { order } => basis_power(grid, order),
            Self::DiagonalFamily { k } => diagonal_family(grid, k),
            Self::RandomMirror { order, seed } => random_mirror(grid, order, seed),
        }
    }
}

impl FromStr for Preset {
    type Err = ChaosError;

    /// Parses `name:p1:p2`, e.g. `diagonal:16`, `basis_power:2`, `random_mirror:3:7`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let name = parts.next().unwrap_or_default();
        let params = parts
            .map(|p| {
                p.trim().parse::<u64>().map_err(|_| ChaosError::InvalidParameter(format!("bad preset parameter `{p}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(name, &params)
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BasisPower { order } => write!(f, "basis_power:{order}"),
            Self::DiagonalFamily { k } => write!(f, "diagonal_family:{k}"),
            Self::RandomMirror { order, seed } => write!(f, "random_mirror:{order}:{seed}"),
        }
    }
}

pub fn basis_power<T: Real>(grid: GridSpec, order: usize) -> Result<Kernel<T>> {
    Kernel::basis(grid, &vec![0; order])
}

pub fn diagonal_family<T: Real>(grid: GridSpec, k: usize) -> Result<Kernel<T>> {
    if k == 0 || k > grid.cells() {
        return Err(ChaosError::InvalidParameter(format!("diagonal family needs 1 <= k <= {}, got {k}", grid.cells())));
    }
    let mut f = Kernel::zeros(grid, 2)?;
    let w = T::one() / T::lit(k as f64).sqrt();
    for i in 0..k {
        f.set(&[i, i], Complex::new(w, T::zero()))?;
    }
    Ok(f)
}

fn gaussian_kernel<T: Real>(grid: GridSpec, order: usize, seed: u64, complex: bool) -> Result<Kernel<T>> {
    let len = grid.tensor_len(order).ok_or_else(|| ChaosError::InvalidParameter(format!("order {order} too large")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = if complex { StandardNormal.sample(&mut rng) } else { 0.0 };
            Complex::new(T::lit(re), T::lit(im))
        })
        .collect();
    Kernel::from_coeffs(grid, order, coeffs)
}

fn normalized<T: Real>(f: Kernel<T>) -> Result<Kernel<T>> {
    let norm = f.norm();
    if norm == T::zero() {
        return Err(ChaosError::InvalidParameter("cannot normalise a zero kernel".into()));
    }
    Ok(f.scale_real(T::one() / norm))
}

/// Unit-norm mirror-symmetric kernel `(g + g*)/‖g + g*‖`; generally not fully symmetric.
pub fn random_mirror<T: Real>(grid: GridSpec, order: usize, seed: u64) -> Result<Kernel<T>> {
    if order == 0 {
        return Err(ChaosError::InvalidParameter("random_mirror needs order >= 1".into()));
    }
    let g = gaussian_kernel::<T>(grid, order, seed, true)?;
    let sym = &g + &g.adjoint();
    let f = normalized(sym)?;
    // rescaling rounds each pair of mirrored entries identically, but re-pin
    // the conjugate pairs so the predicate holds bit-exactly
    Ok(exact_mirror(f))
}

/// Unit-norm real kernel averaged over all argument permutations.
pub fn random_fully_symmetric<T: Real>(grid: GridSpec, order: usize, seed: u64) -> Result<Kernel<T>> {
    if order == 0 {
        return Err(ChaosError::InvalidParameter("order must be >= 1".into()));
    }
    let g = gaussian_kernel::<T>(grid, order, seed, false)?;
    let m = grid.cells();
    let mut out = Kernel::<T>::zeros(grid, order)?;
    let mut digits = vec![0usize; order];
    for idx in 0..g.coeffs().len() {
        let mut rest = idx;
        for d in digits.iter_mut().rev() {
            *d = rest % m;
            rest /= m;
        }
        // the sorted multi-index is a canonical representative of the orbit
        let mut sorted = digits.clone();
        sorted.sort_unstable();
        let flat = sorted.iter().fold(0, |acc, &d| acc * m + d);
        out.coeffs_mut()[flat] = out.coeffs()[flat] + g.coeffs()[idx];
    }
    for idx in 0..out.coeffs().len() {
        let mut rest = idx;
        for d in digits.iter_mut().rev() {
            *d = rest % m;
            rest /= m;
        }
        let mut sorted = digits.clone();
        sorted.sort_unstable();
        let flat = sorted.iter().fold(0, |acc, &d| acc * m + d);
        let v = out.coeffs()[flat];
        out.coeffs_mut()[idx] = v;
    }
    normalized(out)
}

fn exact_mirror<T: Real>(mut f: Kernel<T>) -> Kernel<T> {
    let rev = crate::kernel::reversal_map(f.grid().cells(), f.order());
    for (i, &r) in rev.iter().enumerate() {
        if r > i {
            let v = f.coeffs()[i];
            f.coeffs_mut()[r] = v.conj();
        } else if r == i {
            let v = f.coeffs()[i];
            f.coeffs_mut()[i] = Complex::new(v.re, T::zero());
        }
    }
    f
}
