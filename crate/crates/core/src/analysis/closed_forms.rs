//! Closed forms for the separatrix quadratic `2g₁₂c² + (3g₂₂+2g₁₁)c + 3g₁₂ = 0`
//! of a generic field and the eigenvalues at its roots.

use num_traits::Zero;
use serde::Serialize;

use crate::rational::{int, QMatrix, Rational};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CpmForms {
    /// `𝒟 = 4g₁₁² + 9g₂₂² + 12g₁₁g₂₂ − 24g₁₂²`.
    pub discriminant: f64,
    pub delta: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// `(λ₁, λ₂)` at `c₊`.
    pub lambda_plus: (f64, f64),
    pub lambda_minus: (f64, f64),
    /// `𝒟 − 24Δ − (2g₁₁ − 3g₂₂)²`, zero up to rounding.
    pub identity_residual: f64,
}

/// `G` as `(g₁₁, g₁₂, g₂₂)`; the off-diagonal entries are assumed equal.
pub fn cpm_closed_forms(g11: f64, g12: f64, g22: f64) -> Result<CpmForms> {
    if g12 == 0.0 {
        return Err(Error::Degenerate("g12 = 0: the separatrix quadratic degenerates".into()));
    }
    let delta = g11 * g22 - g12 * g12;
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("G is not positive definite (det = {delta})")));
    }
    let disc = 4.0 * g11 * g11 + 9.0 * g22 * g22 + 12.0 * g11 * g22 - 24.0 * g12 * g12;
    let root = disc.sqrt();
    let b = 3.0 * g22 + 2.0 * g11;
    let c_plus = (-b + root) / (4.0 * g12);
    let c_minus = (-b - root) / (4.0 * g12);
    let base = g11 - 1.5 * g22;
    Ok(CpmForms {
        discriminant: disc,
        delta,
        c_plus,
        c_minus,
        lambda_plus: (base - root / 2.0, 2.0 * root),
        lambda_minus: (base + root / 2.0, -2.0 * root),
        identity_residual: disc - 24.0 * delta - (2.0 * g11 - 3.0 * g22).powi(2),
    })
}

pub fn cpm_from_matrix(g: &[[f64; 2]; 2]) -> Result<CpmForms> {
    cpm_closed_forms(g[0][0], g[0][1], g[1][1])
}

/// Exact `𝒟` for a rational `G`.
pub fn discriminant_exact(g: &QMatrix) -> Result<Rational> {
    if g[(0, 1)].is_zero() {
        return Err(Error::Degenerate("g12 = 0: the separatrix quadratic degenerates".into()));
    }
    let (g11, g12, g22) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 1)]);
    Ok(int(4) * g11 * g11 + int(9) * g22 * g22 + int(12) * g11 * g22 - int(24) * g12 * g12)
}

/// `𝒟 − 24Δ − (2g₁₁ − 3g₂₂)²`, exactly.
pub fn discriminant_identity_exact(g: &QMatrix) -> Result<Rational> {
    let d = discriminant_exact(g)?;
    let two_minus_three = int(2) * &g[(0, 0)] - int(3) * &g[(1, 1)];
    Ok(d - int(24) * g.det2() - &two_minus_three * &two_minus_three)
}
