//! Finite sums of Wigner-Itô integrals `Σₙ Iₙ(fₙ)` and their algebra.
//!
//! Multiplication follows the product formula
//! `Iₙ(f)·I_q(g) = Σ_{p=0}^{n∧q} I_{n+q−2p}(f ⌢p g)`, extended bilinearly.
//! The trace is the order-0 component. Moments can also be obtained from the
//! independent pairing-sum [`moment_oracle`].

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex;

use crate::error::{ChaosError, Result};
use crate::kernel::{GridSpec, Kernel};
use crate::pairings::{for_each_pairing, BlockStructure, MAX_POINTS};
use crate::scalar::{cone, czero, Cplx, Real};

/// Default cap on the number of complex coefficients a single product may hold.
pub const DEFAULT_BUDGET: usize = 10_000_000;

/// Cap on the total coefficient count of intermediate chaos elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget(pub usize);

impl Default for Budget {
    fn default() -> Self {
        Self(DEFAULT_BUDGET)
    }
}

impl Budget {
    pub fn check(self, needed: usize) -> Result<()> {
        if needed > self.0 {
            Err(ChaosError::BudgetExceeded { needed, budget: self.0 })
        } else {
            Ok(())
        }
    }
}

/// Element of the Wigner chaos `P_N`, stored by homogeneous component.
#[derive(Clone, Debug, PartialEq)]
pub struct ChaosElement<T: Real> {
    grid: GridSpec,
    components: BTreeMap<usize, Kernel<T>>,
}

impl<T: Real> ChaosElement<T> {
    pub fn zero(grid: GridSpec) -> Self {
        Self { grid, components: BTreeMap::new() }
    }

    /// The unit `1_A = I₀(1)`.
    pub fn one(grid: GridSpec) -> Self {
        Self::from_kernel(Kernel::scalar(grid, cone()))
    }

    /// The Wick integral `Iₙ(f)`.
    pub fn from_kernel(f: Kernel<T>) -> Self {
        let mut out = Self::zero(*f.grid());
        if !f.is_zero() {
            out.components.insert(f.order(), f);
        }
        out
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &BTreeMap<usize, Kernel<T>> {
        &self.components
    }

    pub fn component(&self, order: usize) -> Option<&Kernel<T>> {
        self.components.get(&order)
    }

    pub fn max_order(&self) -> Option<usize> {
        self.components.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.components.values().all(Kernel::is_zero)
    }

    pub fn coefficient_count(&self) -> usize {
        self.components.values().map(|k| k.coeffs().len()).sum()
    }

    /// Adds `Iₙ(f)` in place.
    pub fn add_kernel(&mut self, f: &Kernel<T>) -> Result<()> {
        self.grid.ensure_same(f.grid())?;
        match self.components.get_mut(&f.order()) {
            Some(existing) => {
                existing.add_assign(f)?;
                if existing.is_zero() {
                    self.components.remove(&f.order());
                }
            }
            None if !f.is_zero() => {
                self.components.insert(f.order(), f.clone());
            }
            None => {}
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for f in other.components.values() {
            out.add_kernel(f)?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex::new(-T::one(), T::zero())))
    }

    pub fn scale(&self, factor: Cplx<T>) -> Self {
        Self { grid: self.grid, components: self.components.iter().map(|(&n, k)| (n, k.scale(factor))).collect() }
    }

    /// `Iₙ(f)* = Iₙ(f*)` componentwise.
    pub fn adjoint(&self) -> Self {
        Self { grid: self.grid, components: self.components.iter().map(|(&n, k)| (n, k.adjoint())).collect() }
    }

    /// Every component mirror symmetric up to `tol` (use `0.0` for exact).
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.components.values().all(|k| k.mirror_defect().to_f64_lossy() <= tol)
    }

    /// `‖F‖²_{L²(τ)} = Σₙ ‖fₙ‖²` by orthogonality of the chaoses.
    pub fn norm_sq(&self) -> T {
        self.components.values().map(Kernel::norm_sq).sum()
    }

    /// Product under the default budget.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.mul_with_budget(other, Budget::default())
    }

    pub fn mul_with_budget(&self, other: &Self, budget: Budget) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let orders: BTreeSet<usize> = self
            .components
            .keys()
            .flat_map(|&n| other.components.keys().flat_map(move |&q| (0..=n.min(q)).map(move |p| n + q - 2 * p)))
            .collect();
        let needed =
            orders.iter().try_fold(0usize, |acc, &o| self.grid.tensor_len(o).and_then(|len| acc.checked_add(len)));
        budget.check(needed.unwrap_or(usize::MAX))?;

        let mut out = Self::zero(self.grid);
        for f in self.components.values() {
            for g in other.components.values() {
                for p in 0..=f.order().min(g.order()) {
                    out.add_kernel(&f.contract(g, p)?)?;
                }
            }
        }
        Ok(out)
    }

    /// `τ(F)`: the order-0 component.
    pub fn trace(&self) -> Cplx<T> {
        self.components.get(&0).map_or_else(czero, |k| k.coeffs()[0])
    }

    /// `τ(F·G) = Σₙ fₙ ⌢n gₙ`, the top contraction of each matching pair of
    /// components, without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Cplx<T>> {
        self.grid.ensure_same(&other.grid)?;
        let mut acc = czero();
        for (n, f) in &self.components {
            if let Some(g) = other.components.get(n) {
                acc = acc + f.contract(g, *n)?.coeffs()[0];
            }
        }
        Ok(acc)
    }

    /// `F^k` by repeated multiplication.
    pub fn pow(&self, k: usize, budget: Budget) -> Result<Self> {
        let mut acc = Self::one(self.grid);
        for _ in 0..k {
            acc = acc.mul_with_budget(self, budget)?;
        }
        Ok(acc)
    }

    pub fn moment(&self, k: usize) -> Result<Cplx<T>> {
        self.moment_with_budget(k, Budget::default())
    }

    /// `τ(F^k)`, computed as `τ(F^⌈k/2⌉ · F^⌊k/2⌋)` so that only half the
    /// power is ever materialised.
    pub fn moment_with_budget(&self, k: usize, budget: Budget) -> Result<Cplx<T>> {
        let hi = self.pow(k.div_ceil(2), budget)?;
        if k / 2 == k.div_ceil(2) {
            hi.trace_product(&hi)
        } else {
            let lo = self.pow(k / 2, budget)?;
            hi.trace_product(&lo)
        }
    }
}

/// `τ(I_{n₁}(f₁)⋯I_{n_r}(f_r))` as the sum over non-crossing pairings that
/// respect the interval structure `(n₁,…,n_r)` of the pairing integrals
/// `∫_π f₁⊗…⊗f_r`.
///
/// Independent of the product formula; restricted to a total degree of at
/// most [`MAX_POINTS`]. An odd total degree gives exactly zero.
pub fn moment_oracle<T: Real>(kernels: &[Kernel<T>]) -> Result<Cplx<T>> {
    let Some(first) = kernels.first() else {
        return Ok(cone());
    };
    let grid = *first.grid();
    let mut scalar = cone::<T>();
    let mut active = Vec::new();
    for k in kernels {
        grid.ensure_same(k.grid())?;
        match k.as_scalar() {
            Some(c) => scalar = scalar * c,
            None => active.push(k),
        }
    }
    let points: usize = active.iter().map(|k| k.order()).sum();
    if points % 2 == 1 {
        return Ok(czero());
    }
    if points > MAX_POINTS {
        return Err(ChaosError::SizeGuard { points, guard: MAX_POINTS });
    }
    if active.is_empty() {
        return Ok(scalar);
    }
    let structure = BlockStructure::new(active.iter().map(|k| k.order()).collect())?;
    let m = grid.cells();
    let pairs = points / 2;

    let mut total = czero::<T>();
    let mut block_of = vec![0usize; points];
    let mut cells = vec![0usize; pairs];
    for_each_pairing(points, Some(&structure), true, |blocks| {
        for (b, &(i, j)) in blocks.iter().enumerate() {
            block_of[i] = b;
            block_of[j] = b;
        }
        cells.iter_mut().for_each(|c| *c = 0);
        let mut integral = czero::<T>();
        loop {
            let mut term = cone::<T>();
            let mut pos = 0;
            for k in &active {
                let mut flat = 0;
                for _ in 0..k.order() {
                    flat = flat * m + cells[block_of[pos]];
                    pos += 1;
                }
                term = term * k.coeffs()[flat];
                if term.re == T::zero() && term.im == T::zero() {
                    break;
                }
            }
            integral = integral + term;
            // odometer over block cell assignments
            let mut d = 0;
            while d < pairs {
                cells[d] += 1;
                if cells[d] < m {
                    break;
                }
                cells[d] = 0;
                d += 1;
            }
            if d == pairs {
                break;
            }
        }
        total = total + integral;
    })?;
    Ok(total * scalar)
}

/// Tolerance on `‖f‖ = 1` for routines that assume a normalised kernel.
pub const UNIT_NORM_TOL: f64 = 1e-10;

pub(crate) fn ensure_unit_norm<T: Real>(f: &Kernel<T>) -> Result<()> {
    let norm = f.norm().to_f64_lossy();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(ChaosError::NotUnitNorm { norm, tol: UNIT_NORM_TOL });
    }
    Ok(())
}

/// `Σ_{p=1}^{n−1} ‖f ⌢p f*‖²`, which equals `τ(|Iₙ(f)|⁴) − 2` for unit `f`.
pub fn fourth_moment_deficit<T: Real>(f: &Kernel<T>) -> Result<T> {
    ensure_unit_norm(f)?;
    if f.order() == 0 {
        return Err(ChaosError::InvalidParameter("deficit needs order >= 1".into()));
    }
    let adj = f.adjoint();
    (1..f.order()).try_fold(T::zero(), |acc, p| Ok(acc + f.contract(&adj, p)?.norm_sq()))
}
