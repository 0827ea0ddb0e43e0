//! Random symplectic matrices and the sign check on the separatrix
//! eigenvalues.

use nalgebra::{Matrix2, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::cpm_closed_forms;

/// `Ω` for `ω = dx∧dy + du∧dv` in coordinates `(x, u, y, v)`.
pub fn omega() -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m[(0, 2)] = 1.0;
    m[(1, 3)] = 1.0;
    m[(2, 0)] = -1.0;
    m[(3, 1)] = -1.0;
    m
}

/// `max |MᵗΩM − Ω|`.
pub fn symplectic_residual(m: &Matrix4<f64>) -> f64 {
    let w = omega();
    (m.transpose() * w * m - w).abs().max()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymplecticSample {
    pub m: Matrix4<f64>,
    pub residual: f64,
}

impl SymplecticSample {
    pub fn a(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 0).into()
    }
    pub fn b(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(0, 2).into()
    }
    pub fn c(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 0).into()
    }
    pub fn d(&self) -> Matrix2<f64> {
        self.m.fixed_view::<2, 2>(2, 2).into()
    }

    /// `G = BᵗB + DᵗD`.
    pub fn g(&self) -> Matrix2<f64> {
        let (b, d) = (self.b(), self.d());
        b.transpose() * b + d.transpose() * d
    }
}

/// `exp(X)` by scaling and squaring a degree-18 Taylor polynomial.
pub fn expm(x: &Matrix4<f64>) -> Matrix4<f64> {
    let norm = x.abs().column_sum().max();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let y = x / 2f64.powi(squarings);
    let mut term = Matrix4::identity();
    let mut sum = Matrix4::identity();
    for k in 1..=18 {
        term = term * y / k as f64;
        sum += term;
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}

/// `M = exp(ΩW)`, `W` symmetric with entries uniform in `[−1, 1]`;
/// resampled in the (unobserved) event that the residual exceeds 10⁻⁹.
pub fn sample_symplectic<R: Rng>(rng: &mut R) -> SymplecticSample {
    loop {
        let mut w = Matrix4::zeros();
        for i in 0..4 {
            for j in i..4 {
                let x: f64 = rng.gen_range(-1.0..=1.0);
                w[(i, j)] = x;
                w[(j, i)] = x;
            }
        }
        let m = expm(&(omega() * w));
        let residual = symplectic_residual(&m);
        if residual <= 1e-9 {
            return SymplecticSample { m, residual };
        }
    }
}

/// The RNG for sample `k` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimMinima {
    /// Smallest `|λ₁λ₂|` over both roots of all admitted samples.
    pub abs_lambda_product: f64,
    /// Smallest `𝒟 − 24Δ`.
    pub disc_minus_24_delta: f64,
    pub delta: f64,
    pub abs_g12: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClaimReport {
    pub seed: u64,
    pub samples: usize,
    pub admitted: usize,
    pub not_admitted: usize,
    pub violations: usize,
    pub max_symplectic_residual: f64,
    pub max_identity_residual: f64,
    pub minima: ClaimMinima,
    pub passed: bool,
}

#[derive(Clone, Copy)]
struct One {
    admitted: bool,
    violation: bool,
    residual: f64,
    identity: f64,
    product: f64,
    gap: f64,
    delta: f64,
    g12: f64,
}

fn check_one(seed: u64, k: u64) -> One {
    let sample = sample_symplectic(&mut sample_rng(seed, k));
    let g = sample.g();
    let (g11, g12, g22) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
    let mut one = One {
        admitted: g12.abs() > 1e-6,
        violation: false,
        residual: sample.residual,
        identity: 0.0,
        product: f64::INFINITY,
        gap: f64::INFINITY,
        delta: f64::INFINITY,
        g12: g12.abs(),
    };
    if !one.admitted {
        return one;
    }
    match cpm_closed_forms(g11, g12, g22) {
        Ok(f) => {
            let p_plus = f.lambda_plus.0 * f.lambda_plus.1;
            let p_minus = f.lambda_minus.0 * f.lambda_minus.1;
            let gap = f.discriminant - 24.0 * f.delta;
            one.violation = !(p_plus < 0.0 && p_minus < 0.0 && gap >= -1e-9 && f.delta > 0.0);
            one.identity = f.identity_residual.abs();
            one.product = p_plus.abs().min(p_minus.abs());
            one.gap = gap;
            one.delta = f.delta;
        }
        Err(_) => one.violation = true,
    }
    one
}

/// Samples `count` symplectic matrices and checks, at both roots of the
/// separatrix quadratic, that `λ₁λ₂ < 0` and `𝒟 ≥ 24Δ > 0`. Samples with
/// `|g₁₂| ≤ 10⁻⁶` are counted separately and never as passes.
pub fn verify_claim(count: usize, seed: u64) -> ClaimReport {
    let results: Vec<One> = (0..count as u64).into_par_iter().map(|k| check_one(seed, k)).collect();
    let admitted: Vec<&One> = results.iter().filter(|o| o.admitted).collect();
    let violations = admitted.iter().filter(|o| o.violation).count();
    let fold = |f: fn(&One) -> f64| admitted.iter().map(|o| f(o)).fold(f64::INFINITY, f64::min);
    let minima = ClaimMinima {
        abs_lambda_product: fold(|o| o.product),
        disc_minus_24_delta: fold(|o| o.gap),
        delta: fold(|o| o.delta),
        abs_g12: fold(|o| o.g12),
    };
    ClaimReport {
        seed,
        samples: count,
        admitted: admitted.len(),
        not_admitted: count - admitted.len(),
        violations,
        max_symplectic_residual: results.iter().map(|o| o.residual).fold(0.0, f64::max),
        max_identity_residual: admitted.iter().map(|o| o.identity).fold(0.0, f64::max),
        minima,
        passed: count > 0 && !admitted.is_empty() && violations == 0,
    }
}
