//! Numerical checks of the portrait: orbits on the separatrices reach the
//! origin, orbits off them pass by.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::symplectic::sample_rng;
use super::{integrate_orbit, integrate_orbit_until, IntegratorConfig, OrbitTrace, PolyField, Termination, VectorField};
use crate::analysis::Separatrix;
use crate::{Error, Result};

/// Principal part of a generic field on its edge:
/// `α = −2g₁₂ts − 3g₂₂t³`, `β = 4g₁₁t²s + 6g₁₂t⁴`. The curves `s = c±t²`
/// are exactly invariant for it.
pub fn model_field(g11: f64, g12: f64, g22: f64) -> PolyField {
    PolyField::new(
        vec![([1, 1], -2.0 * g12), ([3, 0], -3.0 * g22)],
        vec![([2, 1], 4.0 * g11), ([4, 0], 6.0 * g12)],
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparatrixReport {
    pub c: f64,
    pub power: i32,
    pub t0: f64,
    pub tolerance: f64,
    /// Time direction (±1) in which the curve approaches the origin.
    pub direction: f64,
    pub sup_deviation: f64,
    pub termination: Termination,
    pub offset: f64,
    pub offset_termination: Termination,
    pub offset_min_radius: f64,
    pub passed: bool,
    #[serde(skip)]
    pub trace: OrbitTrace,
}

fn curve(c: f64, m: i32, t: f64) -> f64 {
    c * t.powi(m)
}

/// Checks that the curve `s = c·t^m` carries an orbit into the core.
///
/// The approach direction is the time sign making `d(t²+s²)/dτ` negative at
/// the seed `(t0, c·t0^m)`. The orbit itself is computed the stable way
/// round: from a point of the curve at radius `2δ`, integrate against that
/// direction out to `|t| = |t0|` (the separatrix attracts there), reverse,
/// and finish with the short hop from `2δ` into the core. A seed offset by
/// `offset` in `s` must not reach the core.
pub fn verify_separatrix<F: VectorField + Sync + ?Sized>(
    field: &F,
    c: f64,
    m: i32,
    t0: f64,
    tolerance: f64,
    offset: f64,
    config: &IntegratorConfig,
) -> Result<SeparatrixReport> {
    let s0 = curve(c, m, t0);
    let (a, b) = field.eval(t0, s0);
    let radial = t0 * a + s0 * b;
    if radial == 0.0 || !radial.is_finite() {
        return Err(Error::Degenerate(format!("radial derivative vanishes at ({t0}, {s0})")));
    }
    let sigma = -radial.signum();

    // Point of the curve at radius 2δ on the side of t0.
    let target = 2.0 * config.core;
    let (mut lo, mut hi) = (0.0f64, t0.abs());
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let t = mid * t0.signum();
        if t.hypot(curve(c, m, t)) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_in = hi * t0.signum();
    let seed_in = (t_in, curve(c, m, t_in));
    let out = integrate_orbit_until(field, seed_in, -sigma, config, |t, _| t.abs() >= t0.abs());
    let mut samples: Vec<[f64; 3]> = out.samples.iter().rev().map(|&[tau, t, s]| [-tau, t, s]).collect();
    let shift = samples[0][0];
    for p in &mut samples {
        p[0] -= shift;
    }
    // Near the core `s` is tiny and the curve repels in this direction: an
    // absolute tolerance sized for the ε-ball would swamp `s/t^m`.
    let fine = IntegratorConfig { atol: config.atol.min(config.rtol * seed_in.1.abs()).max(f64::MIN_POSITIVE), ..config.clone() };
    let hop = integrate_orbit(field, seed_in, sigma, &fine);
    let tau_end = samples.last().unwrap()[0];
    samples.extend(hop.samples.iter().skip(1).map(|&[tau, t, s]| [tau_end + tau.abs(), t, s]));
    let sup_deviation = samples
        .iter()
        .filter(|p| p[1] != 0.0)
        .map(|p| (p[2] / p[1].powi(m) - c).abs())
        .fold(0.0, f64::max);
    let min_radius = samples.iter().map(|p| p[1].hypot(p[2])).fold(f64::INFINITY, f64::min);
    let outward_ok = out.termination == Termination::TimeLimit;
    let termination = if outward_ok { hop.termination } else { out.termination };
    let trace = OrbitTrace { samples, termination, min_radius, rejected: out.rejected + hop.rejected };

    let off = integrate_orbit(field, (t0, s0 + offset), sigma, config);
    let passed = outward_ok && sup_deviation <= tolerance && termination == Termination::EnteredCore && !off.entered_core();
    Ok(SeparatrixReport {
        c,
        power: m,
        t0,
        tolerance,
        direction: sigma,
        sup_deviation,
        termination,
        offset,
        offset_termination: off.termination,
        offset_min_radius: off.min_radius,
        passed,
        trace,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TransversalityReport {
    pub seed: u64,
    pub samples: usize,
    pub violations: usize,
    pub min_radius: f64,
    /// Smallest seed radius used.
    pub min_seed_radius: f64,
    pub passed: bool,
}

/// Seeds at radius in `[δ, ε]`, at least 10⁻² rad from the axes and from
/// the given power curves, integrated both ways with core `δ/100`; each
/// must leave the `ε`-ball in both directions.
pub fn check_transversality<F: VectorField + Sync + ?Sized>(
    field: &F,
    separatrices: &[Separatrix],
    samples: usize,
    seed: u64,
    config: &IntegratorConfig,
) -> TransversalityReport {
    let delta = config.core;
    let eps = config.epsilon;
    let inner = IntegratorConfig { core: delta / 100.0, ..config.clone() };
    let curves: Vec<(f64, i32)> = separatrices.iter().filter_map(|s| s.graph()).filter(|g| g.0 != 0.0).collect();
    let results: Vec<(bool, f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = sample_rng(seed, k);
            let (t, s) = loop {
                // Log-uniform radius so the small end is exercised.
                let r = delta * (eps / delta).powf(rng.gen::<f64>());
                let th = rng.gen_range(0.0..std::f64::consts::TAU);
                let (t, s) = (r * th.cos(), r * th.sin());
                let off_axes = (0..4).all(|q| {
                    let axis = q as f64 * std::f64::consts::FRAC_PI_2;
                    let d = (th - axis).rem_euclid(std::f64::consts::TAU);
                    d.min(std::f64::consts::TAU - d) >= 1e-2
                });
                let off_curves = curves.iter().all(|&(c, m)| (s - c * t.powi(m)).abs() >= 1e-2 * r);
                if off_axes && off_curves {
                    break (t, s);
                }
            };
            let fw = integrate_orbit(field, (t, s), 1.0, &inner);
            let bw = integrate_orbit(field, (t, s), -1.0, &inner);
            let ok = fw.termination == Termination::ExitedBall && bw.termination == Termination::ExitedBall;
            (ok, fw.min_radius.min(bw.min_radius), t.hypot(s))
        })
        .collect();
    let violations = results.iter().filter(|r| !r.0).count();
    let min_radius = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let min_seed_radius = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    TransversalityReport {
        seed,
        samples,
        violations,
        min_radius,
        min_seed_radius,
        passed: samples > 0 && violations == 0 && min_radius > 0.0,
    }
}
