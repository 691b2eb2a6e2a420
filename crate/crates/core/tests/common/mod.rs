//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex;
use wigner_chaos::{GridSpec, Kernel64};

pub fn double_factorial(n: u64) -> u64 {
    let mut acc = 1u64;
    let mut k = n;
    while k > 1 {
        acc *= k;
        k -= 2;
    }
    acc
}

/// `binom(2k, k)/(k+1)`.
pub fn catalan(k: u64) -> u64 {
    let mut b: u128 = 1;
    for i in 0..k as u128 {
        b = b * (2 * k as u128 - i) / (i + 1);
    }
    (b / (k as u128 + 1)) as u64
}

pub fn binomial(n: u64, k: u64) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `τ((S² − 1)^r)` by binomial expansion into semicircle moments.
pub fn centred_square_moment(r: u64) -> i64 {
    (0..=r)
        .map(|j| {
            let sign = if (r - j).is_multiple_of(2) { 1 } else { -1 };
            sign * binomial(r, j) * catalan(j) as i64
        })
        .sum()
}

fn digits(mut flat: usize, m: usize, n: usize) -> Vec<usize> {
    let mut idx = vec![0; n];
    for d in (0..n).rev() {
        idx[d] = flat % m;
        flat /= m;
    }
    idx
}

fn flat(idx: &[usize], m: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * m + i)
}

/// `(f ⌢p g)[a, b] = Σ_s f[a, rev s] · g[s, b]` by explicit index loops.
pub fn naive_contract(f: &Kernel64, g: &Kernel64, p: usize) -> Kernel64 {
    let m = f.grid().cells();
    let (n, q) = (f.order(), g.order());
    let out_order = n + q - 2 * p;
    let mut out = vec![Complex::new(0.0, 0.0); m.pow(out_order as u32)];
    for (o, slot) in out.iter_mut().enumerate() {
        let oi = digits(o, m, out_order);
        let (a, b) = oi.split_at(n - p);
        for s in 0..m.pow(p as u32) {
            let si = digits(s, m, p);
            let mut fi = a.to_vec();
            fi.extend(si.iter().rev());
            let mut gi = si.clone();
            gi.extend_from_slice(b);
            *slot += f.coeffs()[flat(&fi, m)] * g.coeffs()[flat(&gi, m)];
        }
    }
    Kernel64::from_coeffs(*f.grid(), out_order, out).unwrap()
}

/// `f*[i₁,…,iₙ] = conj f[iₙ,…,i₁]` by explicit index loops.
pub fn naive_adjoint(f: &Kernel64) -> Kernel64 {
    let m = f.grid().cells();
    let n = f.order();
    let coeffs = (0..f.coeffs().len())
        .map(|o| {
            let mut idx = digits(o, m, n);
            idx.reverse();
            f.coeffs()[flat(&idx, m)].conj()
        })
        .collect();
    Kernel64::from_coeffs(*f.grid(), n, coeffs).unwrap()
}

pub fn grid(m: usize) -> GridSpec {
    GridSpec::unit(m).unwrap()
}
