//! Adaptive Dormand–Prince 5(4) integration of planar orbits, switching to
//! arc length near the origin where the field is degenerate.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::VectorField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    ExitedBall,
    EnteredCore,
    StepLimit,
    /// `|τ|` reached `tau_max`, or a caller-supplied stop condition held.
    TimeLimit,
    /// Step size collapsed, or the field vanished exactly.
    StepUnderflow,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Exit radius `ε`.
    pub epsilon: f64,
    /// Core radius `δ`.
    pub core: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub tau_max: Option<f64>,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { epsilon: 0.05, core: 0.05e-4, rtol: 1e-9, atol: 1e-16, max_steps: 200_000, tau_max: None }
    }
}

impl IntegratorConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        IntegratorConfig { epsilon, core: 1e-4 * epsilon, ..Default::default() }
    }

    /// Speed below which the step is taken in arc length.
    fn arc_threshold(&self) -> f64 {
        1e-2 * self.epsilon
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OrbitTrace {
    /// `(τ, t, s)` at the start and after every accepted step.
    pub samples: Vec<[f64; 3]>,
    pub termination: Termination,
    pub min_radius: f64,
    pub rejected: usize,
}

impl OrbitTrace {
    pub fn last(&self) -> [f64; 3] {
        *self.samples.last().expect("trace has a start point")
    }

    pub fn entered_core(&self) -> bool {
        self.termination == Termination::EnteredCore
    }

    /// CSV with header `tau,t,s`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,t,s\n");
        for [tau, t, s] in &self.samples {
            writeln!(out, "{tau:.16e},{t:.16e},{s:.16e}").unwrap();
        }
        out
    }
}

// Autonomous system, so the nodes c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_LOW: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Physical,
    Arc,
}

/// `(dt, ds, dτ)` per unit of the integration parameter.
fn rhs<F: VectorField + ?Sized>(field: &F, y: [f64; 3], dir: f64, mode: Mode) -> Option<[f64; 3]> {
    let (a, b) = field.eval(y[0], y[1]);
    match mode {
        Mode::Physical => Some([dir * a, dir * b, dir]),
        Mode::Arc => {
            let n = a.hypot(b);
            (n > 0.0 && n.is_finite()).then(|| [dir * a / n, dir * b / n, dir / n])
        }
    }
}

/// Integrates from `start` forward (`direction > 0`) or backward in `τ`.
pub fn integrate_orbit<F: VectorField + ?Sized>(
    field: &F,
    start: (f64, f64),
    direction: f64,
    config: &IntegratorConfig,
) -> OrbitTrace {
    integrate_orbit_until(field, start, direction, config, |_, _| false)
}

/// As [`integrate_orbit`], additionally stopping with `TimeLimit` once
/// `stop(t, s)` holds after a step.
pub fn integrate_orbit_until<F: VectorField + ?Sized>(
    field: &F,
    start: (f64, f64),
    direction: f64,
    config: &IntegratorConfig,
    stop: impl Fn(f64, f64) -> bool,
) -> OrbitTrace {
    let dir = direction.signum();
    let mut y = [start.0, start.1, 0.0];
    let radius = |y: &[f64; 3]| y[0].hypot(y[1]);
    let mut trace = OrbitTrace { samples: vec![[0.0, y[0], y[1]]], termination: Termination::StepLimit, min_radius: radius(&y), rejected: 0 };
    let r0 = radius(&y);
    if r0 <= config.core {
        trace.termination = Termination::EnteredCore;
        return trace;
    }
    if r0 >= config.epsilon {
        trace.termination = Termination::ExitedBall;
        return trace;
    }
    let speed = |y: &[f64; 3]| {
        let (a, b) = field.eval(y[0], y[1]);
        a.hypot(b)
    };
    let mut mode = if speed(&y) < config.arc_threshold() { Mode::Arc } else { Mode::Physical };
    // Step kept in arc-length units across mode switches.
    let mut h_arc = 1e-3 * r0;
    for _ in 0..config.max_steps {
        let v = speed(&y);
        if v == 0.0 || !v.is_finite() {
            trace.termination = Termination::StepUnderflow;
            return trace;
        }
        mode = match mode {
            Mode::Physical if v < config.arc_threshold() => Mode::Arc,
            Mode::Arc if v >= 2.0 * config.arc_threshold() => Mode::Physical,
            m => m,
        };
        let r = radius(&y);
        h_arc = h_arc.min(0.1 * r);
        loop {
            if h_arc < 1e-15 * r {
                trace.termination = Termination::StepUnderflow;
                return trace;
            }
            let mut step_mode = mode;
            let mut h = match mode {
                Mode::Physical => h_arc / v,
                Mode::Arc => h_arc,
            };
            if let Some(tmax) = config.tau_max {
                // The last step is taken in physical time so τ lands on tmax.
                let left = tmax - y[2].abs();
                let dtau = match mode {
                    Mode::Physical => h,
                    Mode::Arc => h / v,
                };
                if dtau > left {
                    step_mode = Mode::Physical;
                    h = left;
                }
            }
            let Some((ynew, err)) = dopri_step(field, y, h, dir, step_mode, config) else {
                trace.termination = Termination::StepUnderflow;
                return trace;
            };
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                y = ynew;
                trace.samples.push([y[2], y[0], y[1]]);
                let r = radius(&y);
                trace.min_radius = trace.min_radius.min(r);
                h_arc = match step_mode {
                    Mode::Physical => h * v,
                    Mode::Arc => h,
                } * factor;
                if r <= config.core {
                    trace.termination = Termination::EnteredCore;
                    return trace;
                }
                if r >= config.epsilon {
                    trace.termination = Termination::ExitedBall;
                    return trace;
                }
                if stop(y[0], y[1]) {
                    trace.termination = Termination::TimeLimit;
                    return trace;
                }
                if let Some(tmax) = config.tau_max {
                    if y[2].abs() >= tmax * (1.0 - 1e-14) {
                        trace.termination = Termination::TimeLimit;
                        return trace;
                    }
                }
                break;
            }
            trace.rejected += 1;
            h_arc = match step_mode {
                Mode::Physical => h * v,
                Mode::Arc => h,
            } * factor;
        }
    }
    trace.termination = Termination::StepLimit;
    trace
}

/// One step; returns the 5th-order solution and the scaled error norm.
fn dopri_step<F: VectorField + ?Sized>(
    field: &F,
    y: [f64; 3],
    h: f64,
    dir: f64,
    mode: Mode,
    config: &IntegratorConfig,
) -> Option<([f64; 3], f64)> {
    let mut k = [[0.0; 3]; 7];
    for i in 0..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for d in 0..3 {
                yi[d] += h * A[i][j] * kj[d];
            }
        }
        k[i] = rhs(field, yi, dir, mode)?;
    }
    let mut ynew = y;
    let mut err = 0.0f64;
    for d in 0..3 {
        let mut hi = 0.0;
        let mut lo = 0.0;
        for i in 0..7 {
            hi += B[i] * k[i][d];
            lo += B_LOW[i] * k[i][d];
        }
        ynew[d] = y[d] + h * hi;
        if d < 2 {
            let sc = config.atol + config.rtol * y[d].abs().max(ynew[d].abs());
            err = err.max((h * (hi - lo)).abs() / sc);
        }
    }
    if ynew.iter().any(|x| !x.is_finite()) || !err.is_finite() {
        return None;
    }
    Some((ynew, err))
}
