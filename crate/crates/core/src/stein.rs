//! Free Stein kernel of a self-adjoint element `F = Iₙ(f)` of the `n`-th
//! homogeneous chaos, and the exact squared discrepancy `‖A − 1⊗1‖²`.
//!
//! The Malliavin derivative only ever appears through its cell slices. For a
//! step kernel, the slice at time `t` in cell `s` is `Δ^{-1/2}` times the
//! coefficient slice, and `dt` contributes `Δ` per cell, so every integrated
//! product of two slices is exactly the plain sum over cells of the
//! coefficient slices.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::bichaos::BiChaosElement;
use crate::chaos::{ensure_unit_norm, fourth_moment_deficit, Budget, ChaosElement};
use crate::error::{ChaosError, Result};
use crate::kernel::Kernel;
use crate::scalar::{czero, Real};

/// Mirror-symmetry tolerance for kernels that come out of arithmetic.
pub const MIRROR_TOL: f64 = 1e-12;

/// Slack allowed on the inequalities checked in this module.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// Largest polynomial degree [`verify_stein_identity`] accepts.
pub const MAX_IDENTITY_DEGREE: usize = 4;

fn ensure_mirror<T: Real>(f: &Kernel<T>) -> Result<()> {
    let defect = f.mirror_defect().to_f64_lossy();
    if defect > MIRROR_TOL {
        return Err(ChaosError::NotMirrorSymmetric { defect });
    }
    Ok(())
}

/// `f̃ᵏ` at cell `s`: the slice at position `k`, with the `k−1` arguments
/// before it and the `n−k` after it each reversed and conjugated in place.
///
/// This is the kernel of `((I_{k−1}⊗I_{n−k})(fᵏ_s))*`.
pub fn tilde_slice<T: Real>(f: &Kernel<T>, k: usize, cell: usize) -> Result<Kernel<T>> {
    f.slice(k, cell)?.leg_adjoint(k - 1)
}

/// `(k, p)` pairs entering `‖A − 1⊗1‖²`, in lexicographic order: every
/// `1 ≤ k ≤ n`, `0 ≤ p ≤ k−1` except the constant term `(n, n−1)`.
pub fn admissible_terms(order: usize) -> Vec<(usize, usize)> {
    (1..=order).flat_map(|k| (0..k).map(move |p| (k, p))).filter(|&(k, p)| !(k == order && p + 1 == order)).collect()
}

fn slice_contraction<T: Real>(f: &Kernel<T>, k: usize, p: usize) -> Result<Kernel<T>> {
    let n = f.order();
    let m = f.grid().cells();
    let mut acc = Kernel::zeros(*f.grid(), 2 * n - 2 - 2 * p)?;
    for s in 0..m {
        let last = f.slice(n, s)?;
        let tilde = tilde_slice(f, k, s)?;
        acc.add_assign(&last.contract(&tilde, p)?)?;
    }
    Ok(acc)
}

/// `G_{k,p} = ∫ fⁿ_t ⌢p f̃ᵏ_t dt`, a kernel of order `2n − 2p − 2`.
pub fn integrated_slice_contraction<T: Real>(f: &Kernel<T>, k: usize, p: usize) -> Result<Kernel<T>> {
    ensure_mirror(f)?;
    let n = f.order();
    if k == 0 || k > n || p >= k || (k == n && p + 1 == n) {
        return Err(ChaosError::InvalidParameter(format!("(k, p) = ({k}, {p}) not admissible for order {n}")));
    }
    slice_contraction(f, k, p)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermNorm {
    pub k: usize,
    pub p: usize,
    /// `‖G_{k,p}‖²`.
    pub norm_sq: f64,
    /// `‖f ⌢^{n−p−1} f‖`, the per-term upper bound.
    pub bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SteinReport {
    pub order: usize,
    /// `‖A − 1⊗1‖²`.
    pub delta_sq: f64,
    /// `τ(F⁴) − 2`.
    pub deficit: f64,
    /// `n^{3/2} · deficit^{1/2}`.
    pub bound_rhs: f64,
    /// `delta_sq^{1/2}`, an upper bound for the Stein discrepancy.
    pub discrepancy_bound: f64,
    /// `n^{3/4} · deficit^{1/4}`.
    pub theorem_w2_bound: f64,
    pub per_term: Vec<TermNorm>,
}

impl SteinReport {
    /// True when `delta_sq ≤ bound_rhs` and every per-term bound hold within `slack`.
    pub fn bounds_hold(&self, slack: f64) -> bool {
        self.delta_sq <= self.bound_rhs + slack && self.per_term.iter().all(|t| t.norm_sq <= t.bound + slack)
    }
}

/// Exact `‖A − 1⊗1‖²` as the sum of `‖G_{k,p}‖²` over [`admissible_terms`],
/// together with the fourth-moment deficit and the bounds derived from it.
pub fn stein_discrepancy_sq<T: Real>(f: &Kernel<T>) -> Result<SteinReport> {
    ensure_unit_norm(f)?;
    ensure_mirror(f)?;
    let n = f.order();
    if n == 0 {
        return Err(ChaosError::InvalidParameter("Stein kernel needs order >= 1".into()));
    }
    let per_term = admissible_terms(n)
        .into_par_iter()
        .map(|(k, p)| {
            let g = slice_contraction(f, k, p)?;
            let bound = f.contract(f, n - p - 1)?.norm().to_f64_lossy();
            Ok(TermNorm { k, p, norm_sq: g.norm_sq().to_f64_lossy(), bound })
        })
        .collect::<Result<Vec<_>>>()?;
    let delta_sq: f64 = per_term.iter().map(|t| t.norm_sq).sum();
    let deficit = fourth_moment_deficit(f)?.to_f64_lossy();
    let nf = n as f64;
    let bound_rhs = nf.powf(1.5) * deficit.sqrt();
    Ok(SteinReport {
        order: n,
        delta_sq,
        deficit,
        bound_rhs,
        discrepancy_bound: delta_sq.sqrt(),
        theorem_w2_bound: nf.powf(0.75) * deficit.powf(0.25),
        per_term,
    })
}

/// The Stein kernel `A = ∫ (id⊗τ)(∇_t F) · (∇_t F)* dt` as a two-legged
/// element: the term `G_{k,p}` sits on legs `(n+k−2−2p, n−k)`, and the
/// `(n, n−1)` term is `‖f‖²·1⊗1`.
pub fn stein_kernel<T: Real>(f: &Kernel<T>) -> Result<BiChaosElement<T>> {
    ensure_unit_norm(f)?;
    ensure_mirror(f)?;
    let n = f.order();
    if n == 0 {
        return Err(ChaosError::InvalidParameter("Stein kernel needs order >= 1".into()));
    }
    let mut a = BiChaosElement::zero(*f.grid());
    for k in 1..=n {
        for p in 0..k {
            let g = slice_contraction(f, k, p)?;
            a.add_component(n + k - 2 - 2 * p, n - k, &g)?;
        }
    }
    Ok(a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub degree: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Checks `τ(P(F)·F) = ⟨A, ∂P(F)⟩` for `P = Xʲ`, `j = 0..=max_degree`, with
/// `∂Xʲ = Σ_{i<j} Fⁱ ⊗ F^{j−1−i}` and both sides computed independently.
pub fn verify_stein_identity<T: Real>(f: &Kernel<T>, max_degree: usize, budget: Budget) -> Result<Vec<IdentityCheck>> {
    if max_degree > MAX_IDENTITY_DEGREE {
        return Err(ChaosError::InvalidParameter(format!("degree {max_degree} above {MAX_IDENTITY_DEGREE}")));
    }
    let a = stein_kernel(f)?;
    let big_f = ChaosElement::from_kernel(f.clone());
    let mut powers = vec![ChaosElement::one(*f.grid())];
    for _ in 1..max_degree {
        let next = powers.last().expect("non-empty").mul_with_budget(&big_f, budget)?;
        powers.push(next);
    }
    (0..=max_degree)
        .map(|j| {
            let lhs = big_f.moment_with_budget(j + 1, budget)?;
            let mut rhs = czero::<T>();
            for i in 0..j {
                let d = BiChaosElement::tensor(&powers[i], &powers[j - 1 - i])?;
                rhs = rhs + a.inner(&d)?;
            }
            let diff = (lhs - rhs).norm().to_f64_lossy();
            Ok(IdentityCheck { degree: j, lhs: lhs.re.to_f64_lossy(), rhs: rhs.re.to_f64_lossy(), abs_diff: diff })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DualityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Both sides of `τ(AB) = τ(∫ (id⊗τ)(∇_t A) · (τ⊗id)(∇_t B) dt)` for
/// `A = Iₙ(f)` and `B = I_q(g)`: the left side by chaos orthogonality, the
/// right side from the last-argument slices of `f` and the first-argument
/// slices of `g`.
pub fn verify_nabla_duality<T: Real>(f: &Kernel<T>, g: &Kernel<T>) -> Result<DualityCheck> {
    f.grid().ensure_same(g.grid())?;
    let (n, q) = (f.order(), g.order());
    if n == 0 || q == 0 {
        return Err(ChaosError::InvalidParameter("duality needs orders >= 1".into()));
    }
    let lhs = if n == q { f.contract(g, n)?.coeffs()[0] } else { czero() };
    let mut rhs = czero::<T>();
    for s in 0..f.grid().cells() {
        let left = ChaosElement::from_kernel(f.slice(n, s)?);
        let right = ChaosElement::from_kernel(g.slice(1, s)?);
        rhs = rhs + left.mul(&right)?.trace();
    }
    let lhs_re = lhs.re.to_f64_lossy();
    let diff = (lhs - rhs).norm().to_f64_lossy();
    Ok(DualityCheck { lhs: lhs_re, rhs: rhs.re.to_f64_lossy(), abs_diff: diff })
}

/// Literal `f̃ᵏ_s` from its defining display
/// `conj f(t₁,…,t_{k−1},s,t_{k+1},…,tₙ) = f̃ᵏ_s(t_{k−1},…,t₁,tₙ,…,t_{k+1})`.
#[doc(hidden)]
pub fn tilde_slice_literal<T: Real>(f: &Kernel<T>, k: usize, cell: usize) -> Result<Kernel<T>> {
    let n = f.order();
    let m = f.grid().cells();
    if n == 0 || k == 0 || k > n || cell >= m {
        return Err(ChaosError::SliceOutOfRange { k, cell, order: n, cells: m });
    }
    let mut out = Kernel::zeros(*f.grid(), n - 1)?;
    let mut t = vec![0usize; n];
    let total = m.pow(n as u32 - 1);
    for flat in 0..total {
        // decode the original arguments t₁..tₙ (position k fixed at `cell`)
        let mut rest = flat;
        let mut others = vec![0usize; n - 1];
        for d in others.iter_mut().rev() {
            *d = rest % m;
            rest /= m;
        }
        t[..k - 1].copy_from_slice(&others[..k - 1]);
        t[k - 1] = cell;
        t[k..].copy_from_slice(&others[k - 1..]);
        let mut target: Vec<usize> = t[..k - 1].iter().rev().copied().collect();
        target.extend(t[k..].iter().rev());
        let v = f.get(&t)?;
        out.set(&target, Complex::new(v.re, -v.im))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::GridSpec;
    use crate::presets::{basis_power, diagonal_family, random_mirror};

    fn e00() -> Kernel<f64> {
        basis_power(GridSpec::unit(2).unwrap(), 2).unwrap()
    }

    #[test]
    fn admissible_sets() {
        assert!(admissible_terms(1).is_empty());
        assert_eq!(admissible_terms(2), vec![(1, 0), (2, 0)]);
        assert_eq!(admissible_terms(3), vec![(1, 0), (2, 0), (2, 1), (3, 0), (3, 1)]);
    }

    #[test]
    fn slice_contraction_examples() {
        let f = e00();
        for k in [1, 2] {
            let g = integrated_slice_contraction(&f, k, 0).unwrap();
            assert_eq!(g, f);
            assert_eq!(g.norm_sq(), 1.0);
        }
        assert!(integrated_slice_contraction(&f, 2, 1).is_err());
        assert!(integrated_slice_contraction(&f, 1, 1).is_err());
        let not_mirror = Kernel::<f64>::basis(GridSpec::unit(2).unwrap(), &[0, 1]).unwrap();
        assert!(matches!(integrated_slice_contraction(&not_mirror, 1, 0), Err(ChaosError::NotMirrorSymmetric { .. })));
    }

    #[test]
    fn tilde_matches_literal_display() {
        let g = GridSpec::unit(3).unwrap();
        for n in 1..=4 {
            let f = random_mirror::<f64>(g, n, 40 + n as u64).unwrap();
            for k in 1..=n {
                for s in 0..3 {
                    assert_eq!(tilde_slice(&f, k, s).unwrap(), tilde_slice_literal(&f, k, s).unwrap());
                }
            }
        }
    }

    #[test]
    fn plain_adjoint_of_slice_agrees_only_at_the_ends() {
        let g = GridSpec::unit(2).unwrap();
        let f = random_mirror::<f64>(g, 3, 5).unwrap();
        for s in 0..2 {
            for k in [1, 3] {
                assert_eq!(f.slice(k, s).unwrap().adjoint(), tilde_slice_literal(&f, k, s).unwrap());
            }
        }
        let mid = f.slice(2, 0).unwrap().adjoint();
        assert_ne!(mid, tilde_slice_literal(&f, 2, 0).unwrap());
    }

    #[test]
    fn semicircular_fixed_point() {
        let f = Kernel::<f64>::basis(GridSpec::unit(3).unwrap(), &[0]).unwrap();
        let r = stein_discrepancy_sq(&f).unwrap();
        assert_eq!(r.delta_sq, 0.0);
        assert!(r.per_term.is_empty());
        assert_eq!(stein_kernel(&f).unwrap(), BiChaosElement::one(*f.grid()));
    }

    #[test]
    fn worked_example_second_chaos() {
        let r = stein_discrepancy_sq(&e00()).unwrap();
        assert_eq!(r.delta_sq, 2.0);
        assert_eq!(r.deficit, 1.0);
        assert!((r.bound_rhs - 2f64.powf(1.5)).abs() < 1e-15);
        assert!((r.theorem_w2_bound - r.bound_rhs.sqrt()).abs() < 1e-15);
        assert!(r.bounds_hold(INEQUALITY_SLACK));
    }

    #[test]
    fn diagonal_family_bound() {
        for k in [1usize, 2, 4, 8] {
            let f = diagonal_family::<f64>(GridSpec::unit(8).unwrap(), k).unwrap();
            let r = stein_discrepancy_sq(&f).unwrap();
            assert!((r.deficit - 1.0 / k as f64).abs() < 1e-15);
            assert!(r.delta_sq <= 2f64.powf(1.5) * (1.0 / k as f64).sqrt() + INEQUALITY_SLACK);
        }
    }

    #[test]
    fn two_routes_to_delta_sq() {
        let g = GridSpec::unit(2).unwrap();
        for (n, seed) in [(2, 1u64), (3, 2), (4, 3)] {
            let f = random_mirror::<f64>(g, n, seed).unwrap();
            let r = stein_discrepancy_sq(&f).unwrap();
            let a = stein_kernel(&f).unwrap();
            let centred = a.sub(&BiChaosElement::one(g)).unwrap();
            let via_bichaos = centred.inner(&centred).unwrap().re;
            assert!((via_bichaos - r.delta_sq).abs() <= 1e-10 * r.delta_sq.max(1.0));
        }
    }

    #[test]
    fn stein_identity_low_degrees() {
        let f = e00();
        let rows = verify_stein_identity(&f, 3, Budget::default()).unwrap();
        assert_eq!(rows[0].lhs, 0.0);
        assert_eq!(rows[0].rhs, 0.0);
        assert!((rows[1].lhs - 1.0).abs() < 1e-12 && (rows[1].rhs - 1.0).abs() < 1e-12);
        assert!((rows[2].lhs - 1.0).abs() < 1e-12);
        assert!(rows[2].abs_diff < 1e-9);
        assert!(rows.iter().all(|r| r.abs_diff < 1e-9));
        assert!(verify_stein_identity(&f, 5, Budget::default()).is_err());
    }

    #[test]
    fn leg_order_in_tilde_changes_delta_not_identity() {
        // the identity only sees symmetric test functions, so it cannot tell the leg order apart
        let g = GridSpec::unit(3).unwrap();
        let f = random_mirror::<f64>(g, 3, 17).unwrap();
        let n = 3;
        let mut wrong = BiChaosElement::zero(g);
        for k in 1..=n {
            for p in 0..k {
                let mut acc = Kernel::zeros(g, 2 * n - 2 - 2 * p).unwrap();
                for s in 0..3 {
                    let t = f.slice(k, s).unwrap().adjoint();
                    acc.add_assign(&f.slice(n, s).unwrap().contract(&t, p).unwrap()).unwrap();
                }
                wrong.add_component(n + k - 2 - 2 * p, n - k, &acc).unwrap();
            }
        }
        let right = stein_kernel(&f).unwrap();
        let big_f = ChaosElement::from_kernel(f.clone());
        let f2 = big_f.mul(&big_f).unwrap();
        let one = ChaosElement::one(g);
        let dp = [(&one, &f2), (&big_f, &big_f), (&f2, &one)];
        let lhs = big_f.moment(4).unwrap().re;
        let rhs = |a: &BiChaosElement<f64>| -> f64 {
            dp.iter().map(|(x, y)| a.inner(&BiChaosElement::tensor(x, y).unwrap()).unwrap().re).sum()
        };
        assert!((lhs - rhs(&right)).abs() < 1e-10);
        assert!((lhs - rhs(&wrong)).abs() < 1e-10);
        let id = BiChaosElement::one(g);
        let d_right = right.sub(&id).unwrap().norm_sq();
        let d_wrong = wrong.sub(&id).unwrap().norm_sq();
        assert!((d_right - stein_discrepancy_sq(&f).unwrap().delta_sq).abs() < 1e-10);
        assert!((d_right - d_wrong).abs() > 1e-3);
    }

    #[test]
    fn duality_examples() {
        let g = GridSpec::unit(2).unwrap();
        let f = Kernel::<f64>::basis(g, &[0, 1]).unwrap();
        let d = verify_nabla_duality(&f, &f).unwrap();
        assert_eq!(d.lhs, f.contract(&f, 2).unwrap().coeffs()[0].re);
        assert!(d.abs_diff < 1e-15);
        let diag = diagonal_family::<f64>(g, 2).unwrap();
        let d = verify_nabla_duality(&diag, &diag).unwrap();
        assert!((d.lhs - 1.0).abs() < 1e-15 && d.abs_diff < 1e-15);
        let a = random_mirror::<f64>(g, 2, 1).unwrap();
        let b = random_mirror::<f64>(g, 3, 2).unwrap();
        let d = verify_nabla_duality(&a, &b).unwrap();
        assert_eq!(d.lhs, 0.0);
        assert!(d.abs_diff < 1e-12);
        let scalar = Kernel::scalar(g, Complex::new(1.0, 0.0));
        assert!(verify_nabla_duality(&scalar, &a).is_err());
    }

    #[test]
    fn stein_rejects_bad_input() {
        let g = GridSpec::unit(2).unwrap();
        let half = &e00() * 0.5;
        assert!(matches!(stein_discrepancy_sq(&half), Err(ChaosError::NotUnitNorm { .. })));
        let not_mirror = Kernel::<f64>::basis(g, &[0, 1]).unwrap();
        assert!(matches!(stein_kernel(&not_mirror), Err(ChaosError::NotMirrorSymmetric { .. })));
    }
}
