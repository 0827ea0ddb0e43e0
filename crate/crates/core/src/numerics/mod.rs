//! Floating-point layer: orbit integration, separatrix and transversality
//! checks, random symplectic matrices and the Monte-Carlo checks built on
//! them. Nothing here feeds back into the exact classification.

mod integrate;
mod symplectic;
mod verify;

pub use integrate::{integrate_orbit, integrate_orbit_until, IntegratorConfig, OrbitTrace, Termination};
pub use symplectic::{expm, omega, sample_rng, sample_symplectic, symplectic_residual, verify_claim, ClaimMinima, ClaimReport, SymplecticSample};
pub use verify::{
    check_transversality, model_field, verify_separatrix, SeparatrixReport, TransversalityReport,
};

use crate::foliation::CharField;
use crate::newton::PlanarField;
use crate::rational::to_f64;
use crate::series::Series2;

/// A planar vector field `(ṫ, ṡ)` evaluable at floats.
pub trait VectorField {
    fn eval(&self, t: f64, s: f64) -> (f64, f64);
}

impl<F: VectorField + ?Sized> VectorField for &F {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        (**self).eval(t, s)
    }
}

/// Closure adapter.
pub struct FnField<F>(pub F);

impl<F: Fn(f64, f64) -> (f64, f64)> VectorField for FnField<F> {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        (self.0)(t, s)
    }
}

/// Polynomial field with float coefficients; the fast path for integration.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyField {
    pub alpha: Vec<([i32; 2], f64)>,
    pub beta: Vec<([i32; 2], f64)>,
}

fn float_terms(f: &Series2) -> Vec<([i32; 2], f64)> {
    f.iter().map(|(e, c)| (*e, to_f64(c))).collect()
}

fn eval_terms(terms: &[([i32; 2], f64)], t: f64, s: f64) -> f64 {
    terms.iter().map(|(e, c)| c * t.powi(e[0]) * s.powi(e[1])).sum()
}

impl PolyField {
    pub fn new(alpha: Vec<([i32; 2], f64)>, beta: Vec<([i32; 2], f64)>) -> Self {
        PolyField { alpha, beta }
    }
}

impl From<&CharField> for PolyField {
    fn from(f: &CharField) -> Self {
        PolyField { alpha: float_terms(&f.alpha), beta: float_terms(&f.beta) }
    }
}

impl From<&PlanarField> for PolyField {
    fn from(f: &PlanarField) -> Self {
        let (a, b) = f.to_char();
        PolyField { alpha: float_terms(&a), beta: float_terms(&b) }
    }
}

impl VectorField for PolyField {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        (eval_terms(&self.alpha, t, s), eval_terms(&self.beta, t, s))
    }
}

impl VectorField for CharField {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        (self.alpha.eval_f64(&[t, s]), self.beta.eval_f64(&[t, s]))
    }
}

impl VectorField for PlanarField {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        let (a, b) = self.to_char();
        (a.eval_f64(&[t, s]), b.eval_f64(&[t, s]))
    }
}

/// The field with the roles of `t` and `s` exchanged, so checks written for
/// curves `s = c·t^m` also cover the `s`-axis.
pub struct Swapped<F>(pub F);

impl<F: VectorField> VectorField for Swapped<F> {
    fn eval(&self, t: f64, s: f64) -> (f64, f64) {
        let (a, b) = self.0.eval(s, t);
        (b, a)
    }
}
