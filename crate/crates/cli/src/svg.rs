//! Phase-portrait sketch: the ε-box, separatrices in red, sampled orbits in
//! grey.

use std::fmt::Write as _;

use umbrella::analysis::{Separatrix, SeparatrixKind};

const SIZE: f64 = 480.0;
const PAD: f64 = 20.0;

struct Frame {
    eps: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        PAD + (t + self.eps) / (2.0 * self.eps) * SIZE
    }
    fn y(&self, s: f64) -> f64 {
        PAD + (self.eps - s) / (2.0 * self.eps) * SIZE
    }
    fn point(&self, t: f64, s: f64) -> String {
        format!("{:.3},{:.3}", self.x(t), self.y(s))
    }
}

fn polyline(out: &mut String, pts: &[String], style: &str) {
    if pts.len() >= 2 {
        writeln!(out, r#"  <polyline fill="none" {style} points="{}"/>"#, pts.join(" ")).unwrap();
    }
}

/// `orbits` are `(t, s)` traces; points outside the box are clipped.
pub fn portrait_svg(eps: f64, separatrices: &[Separatrix], orbits: &[Vec<(f64, f64)>]) -> String {
    let f = Frame { eps };
    let side = SIZE + 2.0 * PAD;
    let mut out = String::new();
    writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{side}" height="{side}" viewBox="0 0 {side} {side}">"#).unwrap();
    writeln!(out, r#"  <rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#).unwrap();
    let axis = r##"stroke="#bbbbbb" stroke-dasharray="4 3""##;
    writeln!(out, r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {axis}/>"#, f.x(-eps), f.y(0.0), f.x(eps), f.y(0.0)).unwrap();
    writeln!(out, r#"  <line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" {axis}/>"#, f.x(0.0), f.y(-eps), f.x(0.0), f.y(eps)).unwrap();

    let inside = |t: f64, s: f64| t.abs() <= eps && s.abs() <= eps;
    for orbit in orbits {
        let pts: Vec<String> = orbit.iter().filter(|(t, s)| inside(*t, *s)).map(|&(t, s)| f.point(t, s)).collect();
        polyline(&mut out, &pts, r##"stroke="#777777" stroke-width="0.8""##);
    }

    let red = r##"stroke="#c0392b" stroke-width="2""##;
    for sep in separatrices {
        let pts: Vec<String> = match sep.kind {
            SeparatrixKind::TAxis => vec![f.point(-eps, 0.0), f.point(eps, 0.0)],
            SeparatrixKind::SAxis => vec![f.point(0.0, -eps), f.point(0.0, eps)],
            SeparatrixKind::PowerCurve => {
                let (c, m) = sep.graph().expect("power curves are graphs");
                (0..=400)
                    .map(|k| -eps + 2.0 * eps * k as f64 / 400.0)
                    .map(|t| (t, c * t.powi(m)))
                    .filter(|&(t, s)| inside(t, s))
                    .map(|(t, s)| f.point(t, s))
                    .collect()
            }
        };
        polyline(&mut out, &pts, red);
    }
    writeln!(out, "</svg>").unwrap();
    out
}
