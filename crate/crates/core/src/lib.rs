//! Characteristic foliation of a deformed unfolded Whitney umbrella.
//!
//! The pipeline runs from the jet of a deforming map `φ` to a planar vector
//! field `(α, β)` on the umbrella's parameter plane ([`foliation`]), through
//! its Newton diagram ([`newton`]) and sector-by-sector analysis
//! ([`analysis`]) to a phase-portrait verdict, with floating-point cross
//! checks in [`numerics`].

mod error;

pub mod analysis;
pub mod foliation;
pub mod newton;
pub mod numerics;
pub mod rational;
pub mod series;

pub use error::{Error, Result};
pub use rational::{QMatrix, Rational};
pub use series::{MapJet4, Series, Series2, Series4};
