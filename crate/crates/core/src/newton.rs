//! Support, Newton diagram and sector decomposition of a planar field in
//! canonical form `ṫ = t f₁(t,s)`, `ṡ = s f₂(t,s)`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use serde::Serialize;

use crate::rational::{format_rational, parse_rational, Rational};
use crate::series::Series2;
use crate::{Error, Result};

pub type Point = [i32; 2];

pub const DEFAULT_EPSILON: f64 = 0.05;

/// `ṫ = t f₁`, `ṡ = s f₂`. Components may carry negative exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanarField {
    pub f1: Series2,
    pub f2: Series2,
}

impl PlanarField {
    pub fn new(f1: Series2, f2: Series2) -> Self {
        PlanarField { f1, f2 }
    }

    /// Canonical form proper: `t f₁` and `s f₂` are power series.
    pub fn canonical(f1: Series2, f2: Series2) -> Result<Self> {
        let field = PlanarField { f1, f2 };
        if !field.is_canonical() {
            return Err(Error::Invalid("t*f1 and s*f2 must be power series".into()));
        }
        Ok(field)
    }

    /// `f₁ = α/t`, `f₂ = β/s`.
    pub fn from_char(alpha: &Series2, beta: &Series2) -> Self {
        PlanarField { f1: alpha.divide_by_monomial([1, 0]), f2: beta.divide_by_monomial([0, 1]) }
    }

    pub fn is_canonical(&self) -> bool {
        self.f1.iter().all(|(e, _)| e[0] >= -1 && e[1] >= 0) && self.f2.iter().all(|(e, _)| e[0] >= 0 && e[1] >= -1)
    }

    /// `𝐃 = {Q : f₁Q ≠ 0 or f₂Q ≠ 0}`.
    pub fn support(&self) -> BTreeSet<Point> {
        let mut s = self.f1.support();
        s.extend(self.f2.support());
        s
    }

    pub fn coeffs_at(&self, q: &Point) -> (Rational, Rational) {
        (self.f1.coeff(q), self.f2.coeff(q))
    }

    pub fn is_zero(&self) -> bool {
        self.f1.is_zero() && self.f2.is_zero()
    }

    /// `(α, β) = (t f₁, s f₂)`.
    pub fn to_char(&self) -> (Series2, Series2) {
        (self.f1.mul_monomial([1, 0]), self.f2.mul_monomial([0, 1]))
    }

    /// Keeps only the terms whose exponent satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(&Point) -> bool) -> Self {
        PlanarField { f1: self.f1.filter(&mut keep), f2: self.f2.filter(&mut keep) }
    }

    /// Text form: header `# component q1 q2 coeff`, then one row per term.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# component q1 q2 coeff\n");
        for (k, f) in [(1, &self.f1), (2, &self.f2)] {
            for (e, c) in f.iter() {
                out.push_str(&format!("{k} {} {} {}\n", e[0], e[1], format_rational(c)));
            }
        }
        out
    }

    /// Parses [`to_text`](Self::to_text) output; blank lines and `#` comments
    /// are skipped. Errors name the offending line.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut t1 = Vec::new();
        let mut t2 = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}: {line:?}", n + 1));
            let cols: Vec<&str> = line.split_whitespace().collect();
            if cols.len() != 4 {
                return Err(err("expected `component q1 q2 coeff`"));
            }
            let q1: i32 = cols[1].parse().map_err(|_| err("bad exponent"))?;
            let q2: i32 = cols[2].parse().map_err(|_| err("bad exponent"))?;
            let c = parse_rational(cols[3]).map_err(|_| err("bad coefficient"))?;
            match cols[0] {
                "1" => t1.push(([q1, q2], c)),
                "2" => t2.push(([q1, q2], c)),
                _ => return Err(err("component must be 1 or 2")),
            }
        }
        if t1.is_empty() && t2.is_empty() {
            return Err(Error::Parse("field file has no terms".into()));
        }
        let field = PlanarField {
            f1: Series2::from_laurent_terms(t1, None),
            f2: Series2::from_laurent_terms(t2, None),
        };
        if field.support().iter().any(|q| q[0] < -1 || q[1] < -1) {
            return Err(Error::Parse("exponents below -1 are not supported".into()));
        }
        Ok(field)
    }
}

impl fmt::Display for PlanarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t' = t*({})\ns' = s*({})", self.f1, self.f2)
    }
}

/// One edge of the diagram: `from` (right/lower end) to `to`, with primitive
/// direction `r = (r₁, r₂)`, `r₁ < 0 < r₂`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Point,
    pub to: Point,
    #[serde(rename = "R")]
    pub r: Point,
}

/// Lower-left boundary chain of the Newton polygon, vertices ordered right
/// to left (from the lowest row to the leftmost column).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NewtonDiagram {
    pub vertices: Vec<Point>,
    pub edges: Vec<Edge>,
}

fn primitive(d: Point) -> Point {
    let g = d[0].gcd(&d[1]).max(1);
    [d[0] / g, d[1] / g]
}

fn cross(a: Point, b: Point) -> i64 {
    a[0] as i64 * b[1] as i64 - a[1] as i64 * b[0] as i64
}

/// Vertex walk: start at the leftmost point of the lowest row; from each
/// vertex, among points strictly to its left take the one whose connecting
/// line is flattest (every other point lies on or above it), preferring the
/// farthest on ties; stop when nothing lies to the left.
pub fn newton_diagram(support: &BTreeSet<Point>) -> Result<NewtonDiagram> {
    let start = support
        .iter()
        .min_by_key(|q| (q[1], q[0]))
        .copied()
        .ok_or_else(|| Error::Invalid("empty support".into()))?;
    let mut vertices = vec![start];
    let mut edges = Vec::new();
    let mut cur = start;
    loop {
        let mut best: Option<Point> = None;
        for &q in support.iter().filter(|q| q[0] < cur[0]) {
            let d = [q[0] - cur[0], q[1] - cur[1]];
            best = Some(match best {
                None => q,
                Some(b) => {
                    let db = [b[0] - cur[0], b[1] - cur[1]];
                    // Both point left; cross(db, d) > 0 means d rises less
                    // per unit of leftward travel, i.e. is flatter.
                    match cross(db, d).cmp(&0) {
                        std::cmp::Ordering::Greater => q,
                        std::cmp::Ordering::Less => b,
                        std::cmp::Ordering::Equal => {
                            if q[0] < b[0] {
                                q
                            } else {
                                b
                            }
                        }
                    }
                }
            });
        }
        let Some(next) = best else { break };
        edges.push(Edge { from: cur, to: next, r: primitive([next[0] - cur[0], next[1] - cur[1]]) });
        vertices.push(next);
        cur = next;
    }
    Ok(NewtonDiagram { vertices, edges })
}

impl NewtonDiagram {
    /// `(R_*, R^*)` for vertex `j`: `R_* = −R` of the edge to its right (or
    /// `(1,0)` at the right end), `R^* = R` of the edge to its left (or
    /// `(0,1)` at the left end).
    pub fn vertex_cone(&self, j: usize) -> (Point, Point) {
        let lower = if j == 0 { [1, 0] } else { let r = self.edges[j - 1].r; [-r[0], -r[1]] };
        let upper = if j == self.edges.len() { [0, 1] } else { self.edges[j].r };
        (lower, upper)
    }

    pub fn is_right_end(&self, j: usize) -> bool {
        j == 0
    }

    pub fn is_left_end(&self, j: usize) -> bool {
        j + 1 == self.vertices.len()
    }

    /// Support points lying on the closed edge segment `k`.
    pub fn points_on_edge(&self, support: &BTreeSet<Point>, k: usize) -> Vec<Point> {
        let e = self.edges[k];
        support
            .iter()
            .filter(|q| {
                let d = [q[0] - e.from[0], q[1] - e.from[1]];
                cross(e.r, d) == 0 && q[0] <= e.from[0] && q[0] >= e.to[0]
            })
            .copied()
            .collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("diagram serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorElement {
    Vertex(usize),
    Edge(usize),
}

impl fmt::Display for SectorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorElement::Vertex(j) => write!(f, "vertex {j}"),
            SectorElement::Edge(k) => write!(f, "edge {k}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorKind {
    /// Vertex sector `(|t|,|s|)^{R*} ≤ ε, (|t|,|s|)^{R_*} ≤ ε`.
    Vertex,
    /// Edge sector `ε ≤ (|t|,|s|)^R ≤ 1/ε`.
    Edge,
}

/// Membership predicate for one sector, always intersected with the box
/// `|t|, |s| ≤ ε`. For edge sectors `r_star` is the edge direction and
/// `r_lower` its negative.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SectorSpec {
    pub element: SectorElement,
    pub r_star: Point,
    pub r_lower: Point,
    pub epsilon: f64,
    pub kind: SectorKind,
}

fn mono_abs(t: f64, s: f64, r: Point) -> f64 {
    t.abs().powi(r[0]) * s.abs().powi(r[1])
}

impl SectorSpec {
    pub fn contains(&self, t: f64, s: f64) -> bool {
        let eps = self.epsilon;
        if t.abs() > eps || s.abs() > eps || (t == 0.0 && s == 0.0) {
            return false;
        }
        // Compare in log space to keep the axes (where powers blow up) sane.
        let le = |r: Point, bound: f64| {
            let lt = t.abs().ln();
            let ls = s.abs().ln();
            let mut v = 0.0;
            for (e, l) in [(r[0], lt), (r[1], ls)] {
                if e != 0 {
                    v += e as f64 * l;
                }
            }
            if v.is_nan() {
                // 0·∞ cannot occur (zero exponents skipped); ∞ − ∞ means both
                // coordinates vanish, excluded above.
                return false;
            }
            v <= bound.ln()
        };
        match self.kind {
            SectorKind::Vertex => le(self.r_star, eps) && le(self.r_lower, eps),
            SectorKind::Edge => le(self.r_lower, 1.0 / eps) && le(self.r_star, 1.0 / eps),
        }
    }

    /// The monomial `(|t|,|s|)^r`, exposed for reporting.
    pub fn monomial(t: f64, s: f64, r: Point) -> f64 {
        mono_abs(t, s, r)
    }
}

/// One vertex sector per vertex and one edge sector per edge.
pub fn diagram_sectors(diagram: &NewtonDiagram, epsilon: f64) -> Vec<SectorSpec> {
    let mut out = Vec::new();
    for j in 0..diagram.vertices.len() {
        let (lower, upper) = diagram.vertex_cone(j);
        out.push(SectorSpec { element: SectorElement::Vertex(j), r_star: upper, r_lower: lower, epsilon, kind: SectorKind::Vertex });
        if j < diagram.edges.len() {
            let r = diagram.edges[j].r;
            out.push(SectorSpec {
                element: SectorElement::Edge(j),
                r_star: r,
                r_lower: [-r[0], -r[1]],
                epsilon,
                kind: SectorKind::Edge,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(points: &[Point]) -> BTreeSet<Point> {
        points.iter().copied().collect()
    }

    #[test]
    fn single_vertex() {
        let d = newton_diagram(&set(&[[1, 1], [1, 2]])).unwrap();
        assert_eq!(d.vertices, vec![[1, 1]]);
        assert!(d.edges.is_empty());
    }

    #[test]
    fn standard_diagram() {
        let d = newton_diagram(&set(&[[2, 0], [4, 0], [0, 2]])).unwrap();
        assert_eq!(d.vertices, vec![[2, 0], [0, 2]]);
        assert_eq!(d.edges[0].r, [-1, 1]);
    }

    #[test]
    fn generic_diagram() {
        let sup = set(&[[0, 1], [-1, 2], [2, 0], [1, 1], [0, 2], [4, -1]]);
        let d = newton_diagram(&sup).unwrap();
        assert_eq!(d.vertices, vec![[4, -1], [0, 1], [-1, 2]]);
        assert_eq!(d.edges[0].r, [-2, 1]);
        assert_eq!(d.edges[1].r, [-1, 1]);
        assert_eq!(d.points_on_edge(&sup, 0), vec![[0, 1], [2, 0], [4, -1]]);
    }

    #[test]
    fn collinear_points_skipped() {
        let d = newton_diagram(&set(&[[4, 0], [2, 1], [0, 2]])).unwrap();
        assert_eq!(d.vertices, vec![[4, 0], [0, 2]]);
        assert_eq!(d.edges[0].r, [-2, 1]);
    }

    #[test]
    fn standard_sectors() {
        let d = newton_diagram(&set(&[[2, 0], [4, 0], [0, 2]])).unwrap();
        assert_eq!(d.vertex_cone(0), ([1, 0], [-1, 1]));
        assert_eq!(d.vertex_cone(1), ([1, -1], [0, 1]));
        let sec = diagram_sectors(&d, 0.05);
        // |t| ≤ ε, |s| ≤ ε|t|
        assert!(sec[0].contains(0.01, 0.0004));
        assert!(!sec[0].contains(0.01, 0.0006));
        // ε ≤ |s|/|t| ≤ 1/ε
        assert!(sec[1].contains(0.01, 0.0006));
        assert!(!sec[1].contains(0.0004, 0.01));
        assert!(sec[2].contains(0.0004, 0.01));
    }

    #[test]
    fn generic_edge_sector() {
        let sup = set(&[[0, 1], [-1, 2], [2, 0], [1, 1], [0, 2], [4, -1]]);
        let d = newton_diagram(&sup).unwrap();
        let sec = diagram_sectors(&d, 0.05);
        let edge = sec.iter().find(|s| s.element == SectorElement::Edge(0)).unwrap();
        // ε t² ≤ |s| ≤ t²/ε at t = 0.01: [5e-6, 2e-3]
        assert!(edge.contains(0.01, 1e-5));
        assert!(edge.contains(-0.01, -1e-3));
        assert!(!edge.contains(0.01, 4e-6));
        assert!(!edge.contains(0.01, 3e-3));
    }

    #[test]
    fn field_text_round_trip() {
        let f1 = Series2::from_laurent_terms([([2, 0], Rational::from_integer((-3).into())), ([-1, 2], Rational::new(1.into(), 2.into()))], None);
        let f2 = Series2::from_laurent_terms([([4, -1], Rational::from_integer(6.into()))], None);
        let field = PlanarField::new(f1, f2);
        let text = field.to_text();
        assert!(text.starts_with("# component q1 q2 coeff\n"));
        assert_eq!(PlanarField::from_text(&text).unwrap(), field);
        assert!(PlanarField::from_text("").is_err());
        let e = PlanarField::from_text("# c\n1 0 x 1\n").unwrap_err();
        assert!(e.to_string().contains("line 2"));
    }
}
