//! Elements of `P ⊗ P` written as `Σ (I_a ⊗ I_b)(g_{ab})`.
//!
//! Each component kernel lives in the concrete realisation `L²(ℝ₊^{a+b})`:
//! its first `a` arguments form the left leg and its last `b` the right leg.
//! Inner products are therefore plain kernel inner products, with components
//! of different `(a, b)` orthogonal.

use std::collections::{BTreeMap, BTreeSet};

use crate::chaos::{Budget, ChaosElement};
use crate::error::Result;
use crate::kernel::{reversal_map, GridSpec, Kernel};
use crate::scalar::{cone, czero, Cplx, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct BiChaosElement<T: Real> {
    grid: GridSpec,
    components: BTreeMap<(usize, usize), Kernel<T>>,
}

impl<T: Real> BiChaosElement<T> {
    pub fn zero(grid: GridSpec) -> Self {
        Self { grid, components: BTreeMap::new() }
    }

    /// `1_A ⊗ 1_A`.
    pub fn one(grid: GridSpec) -> Self {
        let mut out = Self::zero(grid);
        out.components.insert((0, 0), Kernel::scalar(grid, cone()));
        out
    }

    /// `X ⊗ Y` for two chaos elements.
    pub fn tensor(left: &ChaosElement<T>, right: &ChaosElement<T>) -> Result<Self> {
        left.grid().ensure_same(right.grid())?;
        let mut out = Self::zero(*left.grid());
        for (&a, x) in left.components() {
            for (&b, y) in right.components() {
                out.add_component(a, b, &x.tensor(y)?)?;
            }
        }
        Ok(out)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &BTreeMap<(usize, usize), Kernel<T>> {
        &self.components
    }

    pub fn component(&self, left: usize, right: usize) -> Option<&Kernel<T>> {
        self.components.get(&(left, right))
    }

    /// Adds `(I_left ⊗ I_right)(g)`; `g` must have order `left + right`.
    pub fn add_component(&mut self, left: usize, right: usize, g: &Kernel<T>) -> Result<()> {
        self.grid.ensure_same(g.grid())?;
        if g.order() != left + right {
            return Err(crate::error::ChaosError::ShapeMismatch(format!(
                "kernel of order {} cannot carry legs ({left}, {right})",
                g.order()
            )));
        }
        match self.components.get_mut(&(left, right)) {
            Some(existing) => {
                existing.add_assign(g)?;
                if existing.is_zero() {
                    self.components.remove(&(left, right));
                }
            }
            None if !g.is_zero() => {
                self.components.insert((left, right), g.clone());
            }
            None => {}
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&(a, b), g) in &other.components {
            out.add_component(a, b, &(-g))?;
        }
        Ok(out)
    }

    /// `⟨A, B⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        self.grid.ensure_same(&other.grid)?;
        let mut acc = czero();
        for (key, g) in &self.components {
            if let Some(h) = other.components.get(key) {
                acc = acc + g.inner(h)?;
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> T {
        self.components.values().map(Kernel::norm_sq).sum()
    }

    /// `(A₁⊗B₁)* = A₁*⊗B₁*`, the adjoint taken on each leg.
    pub fn adjoint(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|(&(a, b), g)| ((a, b), g.leg_adjoint(a).expect("leg fits kernel order")))
            .collect();
        Self { grid: self.grid, components }
    }

    /// `τ ⊗ τ`.
    pub fn trace(&self) -> Cplx<T> {
        self.components.get(&(0, 0)).map_or_else(czero, |k| k.coeffs()[0])
    }

    /// `τ ⊗ id`: keeps the right leg of the components whose left leg is scalar.
    pub fn partial_trace_left(&self) -> ChaosElement<T> {
        let mut out = ChaosElement::zero(self.grid);
        for (&(a, _), g) in &self.components {
            if a == 0 {
                out.add_kernel(g).expect("same grid");
            }
        }
        out
    }

    /// `id ⊗ τ`: keeps the left leg of the components whose right leg is scalar.
    pub fn partial_trace_right(&self) -> ChaosElement<T> {
        let mut out = ChaosElement::zero(self.grid);
        for (&(_, b), g) in &self.components {
            if b == 0 {
                out.add_kernel(g).expect("same grid");
            }
        }
        out
    }

    pub fn sharp(&self, other: &Self) -> Result<Self> {
        self.sharp_with_budget(other, Budget::default())
    }

    /// `(A₁⊗B₁) ♯ (A₂⊗B₂) = A₁A₂ ⊗ B₂B₁`, with both leg products expanded by
    /// the product formula.
    pub fn sharp_with_budget(&self, other: &Self, budget: Budget) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        let mut keys = BTreeSet::new();
        for &(a, b) in self.components.keys() {
            for &(c, d) in other.components.keys() {
                for p1 in 0..=a.min(c) {
                    for p2 in 0..=b.min(d) {
                        keys.insert((a + c - 2 * p1, b + d - 2 * p2));
                    }
                }
            }
        }
        let needed = keys
            .iter()
            .try_fold(0usize, |acc, &(l, r)| self.grid.tensor_len(l + r).and_then(|len| acc.checked_add(len)));
        budget.check(needed.unwrap_or(usize::MAX))?;

        let mut out = Self::zero(self.grid);
        for (&(a, b), g) in &self.components {
            for (&(c, d), h) in &other.components {
                for p1 in 0..=a.min(c) {
                    for p2 in 0..=b.min(d) {
                        let k = sharp_term(g, (a, b), h, (c, d), p1, p2)?;
                        out.add_component(a + c - 2 * p1, b + d - 2 * p2, &k)?;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// One `(p1, p2)` term of `g ♯ h`: the left legs contracted as `g_L ⌢p1 h_L`,
/// the right legs in opposite order as `h_R ⌢p2 g_R`.
fn sharp_term<T: Real>(
    g: &Kernel<T>,
    (a, b): (usize, usize),
    h: &Kernel<T>,
    (c, d): (usize, usize),
    p1: usize,
    p2: usize,
) -> Result<Kernel<T>> {
    let m = g.grid().cells();
    let pw = |e: usize| m.pow(e as u32);
    let (n_alpha, n_sigma, n_gamma) = (pw(a - p1), pw(p1), pw(c - p1));
    let (n_delta, n_rho, n_beta) = (pw(d - p2), pw(p2), pw(b - p2));
    let rev_sigma = reversal_map(m, p1);
    let rev_rho = reversal_map(m, p2);
    let g_right = pw(b);
    let h_right = pw(d);
    let out_order = a + c - 2 * p1 + b + d - 2 * p2;
    let mut out = Kernel::zeros(*g.grid(), out_order)?;
    let gc = g.coeffs();
    let hc = h.coeffs();
    let oc = out.coeffs_mut();
    // output layout: [α', γ' | δ', β']
    for alpha in 0..n_alpha {
        for (sigma, &rs) in rev_sigma.iter().enumerate() {
            let g_row = (alpha * n_sigma + sigma) * g_right;
            for gamma in 0..n_gamma {
                let h_row = (rs * n_gamma + gamma) * h_right;
                let out_left = alpha * n_gamma + gamma;
                for delta in 0..n_delta {
                    for (rho, &rr) in rev_rho.iter().enumerate() {
                        let hv = hc[h_row + delta * n_rho + rho];
                        if hv.re == T::zero() && hv.im == T::zero() {
                            continue;
                        }
                        let g_base = g_row + rr * n_beta;
                        let o_base = (out_left * n_delta + delta) * n_beta;
                        for beta in 0..n_beta {
                            oc[o_base + beta] = oc[o_base + beta] + gc[g_base + beta] * hv;
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}
