//! Step-function kernels on a uniform grid of `L²(ℝ₊)`.
//!
//! A [`GridSpec`] with `m` cells of width `Δ` induces the orthonormal family
//! `e_i = Δ^{-1/2} · 1_[iΔ,(i+1)Δ)`. An order-`n` [`Kernel`] stores the
//! coefficients `⟨e_{i₁}⊗…⊗e_{iₙ}, f⟩` in a flat row-major buffer (last index
//! fastest). Every integral over step kernels is then an exact finite sum over
//! coefficients, and the width `Δ` never enters the arithmetic: it is carried
//! only so that kernels built on different grids are rejected.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{ChaosError, Result};
use crate::scalar::{czero, Cplx, Real};

/// Uniform discretisation of `ℝ₊` into `cells` intervals of length `width`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSpec {
    cells: usize,
    width: f64,
}

impl GridSpec {
    pub fn new(cells: usize, width: f64) -> Result<Self> {
        if cells == 0 {
            return Err(ChaosError::InvalidGrid("cells must be at least 1".into()));
        }
        if !(width > 0.0 && width.is_finite()) {
            return Err(ChaosError::InvalidGrid(format!("width must be positive, got {width}")));
        }
        Ok(Self { cells, width })
    }

    /// Grid with `cells` cells of unit width.
    pub fn unit(cells: usize) -> Result<Self> {
        Self::new(cells, 1.0)
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Number of coefficients of an order-`order` kernel, or `None` on overflow.
    pub fn tensor_len(&self, order: usize) -> Option<usize> {
        self.cells.checked_pow(u32::try_from(order).ok()?)
    }

    pub(crate) fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(ChaosError::GridMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} cells × {}", self.cells, self.width)
    }
}

/// Order-`n` element of `L²(ℝ₊ⁿ)` in the step basis of its grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T: Real> {
    grid: GridSpec,
    order: usize,
    coeffs: Vec<Cplx<T>>,
}

/// Reverses the base-`m` digits of every flat index of an order-`order` tensor.
pub(crate) fn reversal_map(cells: usize, order: usize) -> Vec<usize> {
    let len = cells.pow(order as u32);
    (0..len)
        .map(|mut idx| {
            let mut rev = 0;
            for _ in 0..order {
                rev = rev * cells + idx % cells;
                idx /= cells;
            }
            rev
        })
        .collect()
}

impl<T: Real> Kernel<T> {
    pub fn zeros(grid: GridSpec, order: usize) -> Result<Self> {
        let len = grid
            .tensor_len(order)
            .ok_or_else(|| ChaosError::ShapeMismatch(format!("order {order} overflows on {grid}")))?;
        Ok(Self { grid, order, coeffs: vec![czero(); len] })
    }

    pub fn from_coeffs(grid: GridSpec, order: usize, coeffs: Vec<Cplx<T>>) -> Result<Self> {
        match grid.tensor_len(order) {
            Some(len) if len == coeffs.len() => Ok(Self { grid, order, coeffs }),
            expected => Err(ChaosError::ShapeMismatch(format!(
                "order {order} on {grid} needs {expected:?} coefficients, got {}",
                coeffs.len()
            ))),
        }
    }

    /// Order-0 kernel holding a single complex scalar.
    pub fn scalar(grid: GridSpec, value: Cplx<T>) -> Self {
        Self { grid, order: 0, coeffs: vec![value] }
    }

    /// Elementary tensor `e_{i₁}⊗…⊗e_{iₙ}`.
    pub fn basis(grid: GridSpec, indices: &[usize]) -> Result<Self> {
        let mut k = Self::zeros(grid, indices.len())?;
        let flat = k.flat_index(indices)?;
        k.coeffs[flat] = Complex::new(T::one(), T::zero());
        Ok(k)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[Cplx<T>] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cplx<T>> {
        self.coeffs
    }

    pub fn flat_index(&self, indices: &[usize]) -> Result<usize> {
        if indices.len() != self.order {
            return Err(ChaosError::ShapeMismatch(format!(
                "{} indices for an order-{} kernel",
                indices.len(),
                self.order
            )));
        }
        let m = self.grid.cells;
        let mut flat = 0;
        for &i in indices {
            if i >= m {
                return Err(ChaosError::ShapeMismatch(format!("index {i} outside {m} cells")));
            }
            flat = flat * m + i;
        }
        Ok(flat)
    }

    pub fn get(&self, indices: &[usize]) -> Result<Cplx<T>> {
        Ok(self.coeffs[self.flat_index(indices)?])
    }

    pub fn set(&mut self, indices: &[usize], value: Cplx<T>) -> Result<()> {
        let flat = self.flat_index(indices)?;
        self.coeffs[flat] = value;
        Ok(())
    }

    /// Value of an order-0 kernel.
    pub fn as_scalar(&self) -> Option<Cplx<T>> {
        (self.order == 0).then(|| self.coeffs[0])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == T::zero() && c.im == T::zero())
    }

    /// `f*(t₁,…,tₙ) = conj f(tₙ,…,t₁)`.
    pub fn adjoint(&self) -> Self {
        let rev = reversal_map(self.grid.cells, self.order);
        let coeffs = rev.iter().map(|&r| self.coeffs[r].conj()).collect();
        Self { grid: self.grid, order: self.order, coeffs }
    }

    /// Conjugates and reverses the first `left` and the last `order − left`
    /// indices separately, keeping the two groups in place.
    ///
    /// This is the kernel of `A₁*⊗B₁*` when the kernel is read as
    /// `(I_left ⊗ I_{order−left})` of a two-legged element.
    pub fn leg_adjoint(&self, left: usize) -> Result<Self> {
        if left > self.order {
            return Err(ChaosError::InvalidParameter(format!("left leg {left} longer than order {}", self.order)));
        }
        let m = self.grid.cells;
        let right = self.order - left;
        let right_len = m.pow(right as u32);
        let rev_left = reversal_map(m, left);
        let rev_right = reversal_map(m, right);
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for &a in &rev_left {
            for &b in &rev_right {
                coeffs.push(self.coeffs[a * right_len + b].conj());
            }
        }
        Ok(Self { grid: self.grid, order: self.order, coeffs })
    }

    /// Contraction of order `p`: glues the last `p` arguments of `self`, taken
    /// in reverse, to the first `p` arguments of `other`.
    ///
    /// `out[i₁..i_{n−p}, j_{p+1}..j_q] = Σ_s self[i₁..i_{n−p}, s_p,…,s₁] · other[s₁,…,s_p, j_{p+1}..j_q]`
    pub fn contract(&self, other: &Self, p: usize) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let (n, q) = (self.order, other.order);
        if p > n.min(q) {
            return Err(ChaosError::ContractionOrder { p, n, q });
        }
        let m = self.grid.cells;
        let rows = m.pow((n - p) as u32);
        let inner = m.pow(p as u32);
        let cols = m.pow((q - p) as u32);
        let rev = reversal_map(m, p);
        let mut out = vec![czero::<T>(); rows * cols];
        for r in 0..rows {
            let f_row = &self.coeffs[r * inner..(r + 1) * inner];
            let out_row = &mut out[r * cols..(r + 1) * cols];
            for (s, &rs) in rev.iter().enumerate() {
                let a = f_row[rs];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                let g_row = &other.coeffs[s * cols..(s + 1) * cols];
                for (o, &b) in out_row.iter_mut().zip(g_row) {
                    *o = *o + a * b;
                }
            }
        }
        Ok(Self { grid: self.grid, order: n + q - 2 * p, coeffs: out })
    }

    /// Tensor product, the `p = 0` contraction.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        self.contract(other, 0)
    }

    /// Freezes argument `k` (1-based) at cell `cell`, returning the order
    /// `n − 1` coefficient slice.
    pub fn slice(&self, k: usize, cell: usize) -> Result<Self> {
        let (n, m) = (self.order, self.grid.cells);
        if n == 0 || k == 0 || k > n || cell >= m {
            return Err(ChaosError::SliceOutOfRange { k, cell, order: n, cells: m });
        }
        let before = m.pow((k - 1) as u32);
        let after = m.pow((n - k) as u32);
        let mut coeffs = Vec::with_capacity(before * after);
        for b in 0..before {
            let base = (b * m + cell) * after;
            coeffs.extend_from_slice(&self.coeffs[base..base + after]);
        }
        Ok(Self { grid: self.grid, order: n - 1, coeffs })
    }

    pub fn norm_sq(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sq().sqrt()
    }

    /// `⟨f, g⟩ = Σ conj(f)·g`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        self.ensure_same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).fold(czero(), |acc, (a, b)| acc + a.conj() * b))
    }

    pub fn scale(&self, factor: Cplx<T>) -> Self {
        Self { grid: self.grid, order: self.order, coeffs: self.coeffs.iter().map(|c| *c * factor).collect() }
    }

    pub fn scale_real(&self, factor: T) -> Self {
        self.scale(Complex::new(factor, T::zero()))
    }

    pub fn add_assign(&mut self, other: &Self) -> Result<()> {
        self.ensure_same_shape(other)?;
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a = *a + b;
        }
        Ok(())
    }

    pub fn ensure_same_shape(&self, other: &Self) -> Result<()> {
        self.grid.ensure_same(&other.grid)?;
        if self.order != other.order {
            return Err(ChaosError::ShapeMismatch(format!("orders {} and {} differ", self.order, other.order)));
        }
        Ok(())
    }

    /// Largest entrywise deviation `|f − g|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.ensure_same_shape(other)?;
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (*a - *b).norm()).fold(T::zero(), T::max))
    }

    /// Exact test of `f = f*`.
    pub fn is_mirror_symmetric(&self) -> bool {
        let rev = reversal_map(self.grid.cells, self.order);
        rev.iter().enumerate().all(|(i, &r)| self.coeffs[i] == self.coeffs[r].conj())
    }

    /// `max |f − f*|`, for kernels produced by floating-point arithmetic.
    pub fn mirror_defect(&self) -> T {
        let rev = reversal_map(self.grid.cells, self.order);
        rev.iter().enumerate().map(|(i, &r)| (self.coeffs[i] - self.coeffs[r].conj()).norm()).fold(T::zero(), T::max)
    }

    /// Real-valued and invariant under every permutation of the arguments.
    pub fn is_fully_symmetric(&self) -> bool {
        if self.coeffs.iter().any(|c| c.im != T::zero()) {
            return false;
        }
        let m = self.grid.cells;
        let n = self.order;
        // adjacent transpositions generate the symmetric group
        (0..n.saturating_sub(1)).all(|pos| {
            let hi = m.pow((n - pos - 1) as u32);
            let lo = m.pow((n - pos - 2) as u32);
            (0..self.coeffs.len()).all(|idx| {
                let a = (idx / hi) % m;
                let b = (idx / lo) % m;
                let swapped = idx - a * hi - b * lo + b * hi + a * lo;
                self.coeffs[idx] == self.coeffs[swapped]
            })
        })
    }
}

impl<T: Real> Add for &Kernel<T> {
    type Output = Kernel<T>;

    /// Panics on shape mismatch; use [`Kernel::add_assign`] for a checked sum.
    fn add(self, rhs: Self) -> Kernel<T> {
        let mut out = self.clone();
        out.add_assign(rhs).expect("kernel shapes differ");
        out
    }
}

impl<T: Real> Sub for &Kernel<T> {
    type Output = Kernel<T>;

    fn sub(self, rhs: Self) -> Kernel<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Neg for &Kernel<T> {
    type Output = Kernel<T>;

    fn neg(self) -> Kernel<T> {
        self.scale_real(-T::one())
    }
}

impl<T: Real> Mul<T> for &Kernel<T> {
    type Output = Kernel<T>;

    fn mul(self, rhs: T) -> Kernel<T> {
        self.scale_real(rhs)
    }
}
