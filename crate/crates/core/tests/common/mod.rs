//! Oracles shared by the integration tests.

#![allow(dead_code)]

use num_traits::{One, Zero};
use umbrella::foliation::{derive_linear_data, rho, umbrella_jet, DeformationJet};
use umbrella::series::{apply_matrix, compose};
use umbrella::{Rational, Series2};

/// `1/x` for a series with invertible constant term, by the geometric
/// series in `x/x₀ − 1`.
pub fn recip(x: &Series2, order: i32) -> Series2 {
    let c0 = x.constant_term();
    assert!(!c0.is_zero(), "constant term must be invertible");
    let inv0 = Rational::one() / &c0;
    let r = x.scale(&inv0).sub(&Series2::one(order));
    let mut term = Series2::one(order);
    let mut acc = Series2::one(order);
    for _ in 0..order {
        term = term.mul(&r).unwrap().neg();
        acc = acc.add(&term);
    }
    acc.scale(&inv0)
}

/// Solves `m w = g` over power series by Gaussian elimination; `m(0)` must
/// be invertible.
pub fn solve(mut m: Vec<Vec<Series2>>, mut g: Vec<Series2>, order: i32) -> Vec<Series2> {
    let n = g.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].constant_term().is_zero()).expect("invertible at the origin");
        m.swap(col, piv);
        g.swap(col, piv);
        let inv = recip(&m[col][col], order);
        for j in 0..n {
            m[col][j] = m[col][j].mul(&inv).unwrap();
        }
        g[col] = g[col].mul(&inv).unwrap();
        for r in 0..n {
            if r == col {
                continue;
            }
            let factor = m[r][col].clone();
            if factor.is_zero() {
                continue;
            }
            for j in 0..n {
                let d = factor.mul(&m[col][j]).unwrap();
                m[r][j] = m[r][j].sub(&d);
            }
            let d = factor.mul(&g[col]).unwrap();
            g[r] = g[r].sub(&d);
        }
    }
    g
}

/// The characteristic field computed without inverting `Φ`:
/// `∇ρ′(f) = DΦ(π)^{−T} ∇ρ(π)` by the chain rule.
pub fn jacobian_route_field(jet: &DeformationJet, order: i32) -> (Series2, Series2) {
    let lin = derive_linear_data(jet).unwrap();
    let phi = jet.phi(order + 1);
    let big_phi = apply_matrix(&lin.psi, &phi.components);
    let pi = umbrella_jet(order);
    let rho = rho();
    // Pᵀ[j][i] = ∂Φᵢ/∂xⱼ (π)
    let pt: Vec<Vec<Series2>> = (0..4)
        .map(|j| (0..4).map(|i| compose(&big_phi[i].partial(j), &pi).unwrap().with_order(order)).collect())
        .collect();
    let grad: Vec<Series2> = (0..4).map(|j| compose(&rho.partial(j), &pi).unwrap().with_order(order)).collect();
    let w = solve(pt, grad, order);
    let f: Vec<Series2> = (0..4).map(|i| compose(&big_phi[i].with_order(order), &pi).unwrap()).collect();
    let pair = |a: &[Series2]| {
        let terms = [(0, 2, 1), (1, 3, 1), (2, 0, -1), (3, 1, -1)];
        terms.iter().fold(Series2::zero(order), |acc, &(i, j, sgn)| {
            let p = a[i].mul(&w[j]).unwrap();
            if sgn > 0 { acc.add(&p) } else { acc.sub(&p) }
        })
    };
    let ft: Vec<Series2> = f.iter().map(|c| c.partial(0).with_order(order)).collect();
    let fs: Vec<Series2> = f.iter().map(|c| c.partial(1).with_order(order)).collect();
    (pair(&fs), pair(&ft).neg())
}
pub mod props;
