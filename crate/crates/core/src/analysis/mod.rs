//! Sector-by-sector analysis of a canonical planar field: vertex time
//! rescaling and resonance tests, power transformations along edges,
//! elementary singularities on the exceptional axis, and the glued portrait.
//!
//! The classifier is deliberately partial. It knows the rules that settle
//! the umbrella fields (end vertices, hyperbolic resonances, one zero
//! eigenvalue resolved by a neighbour, simple roots on edges) and answers
//! `UNRESOLVED` for everything else.

mod closed_forms;
pub mod poly;

use std::fmt;

use num_traits::Zero;
use serde::Serialize;

pub use closed_forms::{cpm_closed_forms, cpm_from_matrix, discriminant_exact, discriminant_identity_exact, CpmForms};
pub use poly::{isolate_real_roots, sign_at_root, RootInterval, RootReport, UniPoly};

use crate::newton::{
    diagram_sectors, newton_diagram, NewtonDiagram, PlanarField, Point, SectorElement, SectorKind,
    SectorSpec,
};
use crate::rational::{format_rational, sign, to_f64, Rational};
use crate::series::Series2;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    NoCharacteristicOrbitsVertical,
    NoCharacteristicOrbitsHorizontal,
    SaddleBehavior,
    Unresolved,
    /// Edge whose axis polynomial has no nonzero real root, or a vertex
    /// with one zero eigenvalue whose resonance line crosses its cone.
    NoCharacteristicOrbits,
    /// Edge with a node among its singular points.
    NodeBehavior,
    /// Edge with a saddle-node: a parabolic sector, so an open family of
    /// orbits enters the origin.
    SaddleNodeBehavior,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("verdict serializes");
        write!(f, "{}", v.as_str().unwrap_or_default())
    }
}

/// A vertex `Q` after the time change `dτ₁ = (t,s)^Q dτ`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexProblem {
    pub index: usize,
    pub q: Point,
    pub rescaled: PlanarField,
    /// Constant terms `(f₁Q, f₂Q)` of the rescaled field.
    pub lambda: (Rational, Rational),
    /// `(R_*, R^*)`.
    pub cone: (Point, Point),
    pub right_end: bool,
    pub left_end: bool,
}

pub fn vertex_rescale(field: &PlanarField, diagram: &NewtonDiagram, q: Point) -> Result<VertexProblem> {
    let index = diagram
        .vertices
        .iter()
        .position(|v| *v == q)
        .ok_or_else(|| Error::Invalid(format!("{q:?} is not a vertex of the diagram")))?;
    if !field.support().contains(&q) {
        return Err(Error::Invalid(format!("{q:?} is not in the support")));
    }
    let rescaled = PlanarField::new(field.f1.divide_by_monomial(q), field.f2.divide_by_monomial(q));
    let lambda = (rescaled.f1.coeff(&[0, 0]), rescaled.f2.coeff(&[0, 0]));
    Ok(VertexProblem {
        index,
        q,
        rescaled,
        lambda,
        cone: diagram.vertex_cone(index),
        right_end: diagram.is_right_end(index),
        left_end: diagram.is_left_end(index),
    })
}

fn cross_q(r: Point, v: (&Rational, &Rational)) -> i32 {
    sign(&(Rational::from_integer(r[0].into()) * v.1 - Rational::from_integer(r[1].into()) * v.0))
}

/// Whether the line `⟨Q, Λ⟩ = 0` in exponent space meets the open cone
/// swept counter-clockwise from `R_*` to `R^*`.
pub fn resonance_line_meets_cone(lambda: (&Rational, &Rational), cone: (Point, Point)) -> bool {
    let v = (-lambda.1.clone(), lambda.0.clone());
    let w = (lambda.1.clone(), -lambda.0.clone());
    [v, w].iter().any(|d| {
        let inside_lower = cross_q(cone.0, (&d.0, &d.1)) > 0;
        // cross(d, R^*) = −cross(R^*, d)
        let inside_upper = cross_q(cone.1, (&d.0, &d.1)) < 0;
        inside_lower && inside_upper
    })
}

pub fn resonance_classify(p: &VertexProblem) -> Verdict {
    if p.right_end && p.q[1] == -1 {
        return Verdict::NoCharacteristicOrbitsVertical;
    }
    if p.left_end && p.q[0] == -1 {
        return Verdict::NoCharacteristicOrbitsHorizontal;
    }
    let (l1, l2) = (&p.lambda.0, &p.lambda.1);
    let product = sign(l1) * sign(l2);
    if product < 0 && resonance_line_meets_cone((l1, l2), p.cone) {
        return Verdict::SaddleBehavior;
    }
    // One zero eigenvalue at an interior vertex: the same resonance-line
    // test still keeps orbits out of the vertex sector proper. The
    // neighbouring edge sectors are left to their own analysis; they can
    // hold a saddle-node. End-vertex sectors touch an axis, which this test
    // says nothing about.
    let interior = !p.right_end && !p.left_end;
    if product == 0 && interior && !(l1.is_zero() && l2.is_zero()) && resonance_line_meets_cone((l1, l2), p.cone) {
        return Verdict::NoCharacteristicOrbits;
    }
    Verdict::Unresolved
}

/// `y^shift · poly(y)` with `poly(0) ≠ 0` (or `poly = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    pub shift: i32,
    pub poly: UniPoly,
}

impl LaurentPoly {
    /// Terms of `f` with `y₁`-exponent zero, as a Laurent polynomial in `y₂`.
    pub fn axis_restriction(f: &Series2) -> Self {
        let terms: Vec<(i32, &Rational)> = f.iter().filter(|(e, _)| e[0] == 0).map(|(e, c)| (e[1], c)).collect();
        let Some(shift) = terms.iter().map(|(k, _)| *k).min() else {
            return LaurentPoly { shift: 0, poly: UniPoly::zero() };
        };
        let top = terms.iter().map(|(k, _)| *k).max().unwrap();
        let mut coeffs = vec![Rational::zero(); (top - shift + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - shift) as usize] = c.clone();
        }
        LaurentPoly { shift, poly: UniPoly::new(coeffs) }
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        y.powi(self.shift) * self.poly.eval_f64(y)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.shift == 0 {
            write!(f, "{}", self.poly)
        } else {
            write!(f, "y^{} * ({})", self.shift, self.poly)
        }
    }
}

/// An edge after `y₁ = t^{k₁}s^{k₂}`, `y₂ = t^{r₁}s^{r₂}` and division by
/// the largest power of `y₁` common to the whole field.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeProblem {
    pub index: usize,
    pub r: Point,
    pub k: Point,
    /// Rows `(k₁,k₂)`, `(r₁,r₂)`; determinant one.
    pub a: [[i32; 2]; 2],
    /// Power of `y₁` divided out.
    pub shift: i32,
    pub transformed: PlanarField,
    /// The `y₁⁰` part of `transformed`: the image of the edge terms.
    pub truncated: PlanarField,
    pub axis_poly: LaurentPoly,
    /// `f′₁` on the axis, which gives `λ₁` at each root.
    pub axis_f1: LaurentPoly,
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// `k` with `k₁r₂ − k₂r₁ = 1`: `(1, 0)` when `r₂ = 1`, else the solution of
/// least norm.
pub fn unimodular_completion(r: Point) -> Result<Point> {
    if r[1] == 1 {
        return Ok([1, 0]);
    }
    let (r1, r2) = (r[0] as i64, r[1] as i64);
    let (g, x, y) = ext_gcd(r2, -r1);
    if g.abs() != 1 {
        return Err(Error::Invalid(format!("direction {r:?} is not primitive")));
    }
    let (x, y) = (x * g, y * g);
    // k₁ = x − n r₁, k₂ = y − n r₂
    let nn = r1 * r1 + r2 * r2;
    let n0 = ((x * r1 + y * r2) as f64 / nn as f64).round() as i64;
    let k = (n0 - 2..=n0 + 2)
        .map(|n| (x - n * r1, y - n * r2))
        .min_by_key(|&(a, b)| (a * a + b * b, a, b))
        .unwrap();
    debug_assert_eq!(k.0 * r2 - k.1 * r1, 1);
    Ok([k.0 as i32, k.1 as i32])
}

fn map_exponents(f: &Series2, a: [[i32; 2]; 2], shift: i32) -> Series2 {
    let [[k1, k2], [r1, r2]] = a;
    Series2::from_laurent_terms(
        f.iter().map(|(q, c)| ([r2 * q[0] - r1 * q[1] - shift, -k2 * q[0] + k1 * q[1]], c.clone())),
        None,
    )
}

pub fn edge_power_transform(field: &PlanarField, diagram: &NewtonDiagram, index: usize) -> Result<EdgeProblem> {
    let edge = diagram
        .edges
        .get(index)
        .ok_or_else(|| Error::Invalid(format!("diagram has no edge {index} ({} edges)", diagram.edges.len())))?;
    let r = edge.r;
    let k = unimodular_completion(r)?;
    let a = [[k[0], k[1]], [r[0], r[1]]];
    let comb = |c1: i32, c2: i32| {
        field
            .f1
            .with_order(None)
            .scale(&Rational::from_integer(c1.into()))
            .add(&field.f2.with_order(None).scale(&Rational::from_integer(c2.into())))
    };
    let g1 = comb(k[0], k[1]);
    let g2 = comb(r[0], r[1]);
    let shift = field
        .support()
        .iter()
        .map(|q| r[1] * q[0] - r[0] * q[1])
        .min()
        .ok_or_else(|| Error::Invalid("empty field".into()))?;
    let transformed = PlanarField::new(map_exponents(&g1, a, shift), map_exponents(&g2, a, shift));
    let truncated = transformed.restrict(|q| q[0] == 0);
    let axis_poly = LaurentPoly::axis_restriction(&transformed.f2);
    let axis_f1 = LaurentPoly::axis_restriction(&transformed.f1);
    Ok(EdgeProblem { index, r, k, a, shift, transformed, truncated, axis_poly, axis_f1 })
}

/// Keeps the terms lying on the closed edge segment.
pub fn edge_truncate(field: &PlanarField, diagram: &NewtonDiagram, index: usize) -> Result<PlanarField> {
    if index >= diagram.edges.len() {
        return Err(Error::Invalid(format!("diagram has no edge {index} ({} edges)", diagram.edges.len())));
    }
    let keep: std::collections::BTreeSet<Point> = diagram.points_on_edge(&field.support(), index).into_iter().collect();
    Ok(field.restrict(|q| keep.contains(q)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SingularityType {
    Saddle,
    Node,
    /// `λ₁ = 0 ≠ λ₂` with a nonzero quadratic term on the centre manifold.
    SaddleNode,
    Degenerate,
}

/// Singular point `(y₁, y₂) = (0, c)` of an edge chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ElementarySingularity {
    pub edge: usize,
    pub root: RootInterval,
    pub c: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Exact signs of `λ₁`, `λ₂`.
    pub signs: (i32, i32),
    /// When `λ₁ = 0`: `μ` in `ẏ₁ = μy₁² + …` on the centre manifold.
    pub centre: Option<f64>,
    pub kind: SingularityType,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SingularityReport {
    pub edge: usize,
    pub c: f64,
    pub interval: RootReport,
    pub lambda1: f64,
    pub lambda2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub centre: Option<f64>,
    #[serde(rename = "type")]
    pub kind: SingularityType,
}

impl ElementarySingularity {
    pub fn report(&self) -> SingularityReport {
        SingularityReport {
            edge: self.edge,
            c: self.c,
            interval: RootReport::from(&self.root),
            lambda1: self.lambda1,
            lambda2: self.lambda2,
            centre: self.centre,
            kind: self.kind,
        }
    }
}

fn parity_sign(c_sign: i32, power: i32) -> i32 {
    if power.rem_euclid(2) == 1 {
        c_sign
    } else {
        1
    }
}

/// `∂₁F₁·∂₂G₂ − ∂₂F₁·∂₁G₂` on the axis, where `G₂ = y₂F₂` is the second
/// component. Where `λ₁ = 0` the centre manifold is
/// `y₂ = c − (∂₁G₂/∂₂G₂)y₁ + …` and the flow on it is `μy₁² + …` with
/// `μ = this / λ₂`.
fn centre_numerator(problem: &EdgeProblem) -> LaurentPoly {
    let t = &problem.transformed;
    let g2 = t.f2.mul_monomial([0, 1]);
    let row = |f: &Series2, k: i32| f.filter(|e| e[0] == k).divide_by_monomial([k, 0]);
    let (a0, a1) = (row(&t.f1, 0), row(&t.f1, 1));
    let (b0, b1) = (row(&g2, 0), row(&g2, 1));
    let lhs = a1.mul(&b0.partial(1)).expect("order-free series");
    let rhs = a0.partial(1).mul(&b1).expect("order-free series");
    LaurentPoly::axis_restriction(&lhs.sub(&rhs))
}

/// Linearization at a root `c` of the axis polynomial `y^k P(y)`:
/// the Jacobian is triangular with `λ₁ = f′₁(0, c)` and
/// `λ₂ = d/dy (y^{k+1} P(y)) |_c = c^{k+1} P′(c)`. All signs are exact.
pub fn classify_root(problem: &EdgeProblem, root: &RootInterval) -> ElementarySingularity {
    let p = &problem.axis_poly.poly;
    let k = problem.axis_poly.shift;
    let c_sign = if root.is_exact() { sign(&root.lo) } else if root.hi <= Rational::zero() { -1 } else { 1 };
    let c = if root.is_exact() { to_f64(&root.lo) } else { root.approx() };
    let dp = p.derivative();
    let s2 = sign_at_root(p, root, &dp) * parity_sign(c_sign, k + 1);
    let f1 = &problem.axis_f1;
    let s1 = if f1.is_zero() { 0 } else { sign_at_root(p, root, &f1.poly) * parity_sign(c_sign, f1.shift) };
    let lambda1 = f1.eval_f64(c);
    let lambda2 = c.powi(k + 1) * dp.eval_f64(c);
    let mut centre = None;
    let kind = if s1 * s2 < 0 {
        SingularityType::Saddle
    } else if s1 * s2 > 0 {
        SingularityType::Node
    } else if s1 == 0 && s2 != 0 {
        let n = centre_numerator(problem);
        let sn = if n.is_zero() { 0 } else { sign_at_root(p, root, &n.poly) * parity_sign(c_sign, n.shift) };
        centre = Some(n.eval_f64(c) / lambda2);
        if sn != 0 {
            SingularityType::SaddleNode
        } else {
            SingularityType::Degenerate
        }
    } else {
        SingularityType::Degenerate
    };
    ElementarySingularity { edge: problem.index, root: root.clone(), c, lambda1, lambda2, signs: (s1, s2), centre, kind }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeAnalysis {
    pub problem: EdgeProblem,
    pub singularities: Vec<ElementarySingularity>,
    pub verdict: Verdict,
}

pub fn analyze_edge(field: &PlanarField, diagram: &NewtonDiagram, index: usize) -> Result<EdgeAnalysis> {
    let problem = edge_power_transform(field, diagram, index)?;
    if problem.axis_poly.is_zero() {
        return Ok(EdgeAnalysis { problem, singularities: vec![], verdict: Verdict::Unresolved });
    }
    let roots = isolate_real_roots(&problem.axis_poly.poly)?;
    let singularities: Vec<_> = roots.iter().map(|r| classify_root(&problem, r)).collect();
    let verdict = if singularities.is_empty() {
        Verdict::NoCharacteristicOrbits
    } else if problem.r[1] != 1 || singularities.iter().any(|s| s.kind == SingularityType::Degenerate) {
        Verdict::Unresolved
    } else if singularities.iter().any(|s| s.kind == SingularityType::Node) {
        Verdict::NodeBehavior
    } else if singularities.iter().any(|s| s.kind == SingularityType::SaddleNode) {
        Verdict::SaddleNodeBehavior
    } else {
        Verdict::SaddleBehavior
    };
    Ok(EdgeAnalysis { problem, singularities, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeparatrixKind {
    TAxis,
    SAxis,
    PowerCurve,
}

/// A characteristic curve through the origin: an axis, or `s = c·t^power`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separatrix {
    pub kind: SeparatrixKind,
    pub c: Option<f64>,
    pub power: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interval: Option<RootReport>,
}

impl Separatrix {
    pub fn t_axis() -> Self {
        Separatrix { kind: SeparatrixKind::TAxis, c: Some(0.0), power: Some(1), interval: None }
    }

    pub fn s_axis() -> Self {
        Separatrix { kind: SeparatrixKind::SAxis, c: None, power: None, interval: None }
    }

    /// `(c, m)` for curves of the form `s = c·t^m`.
    pub fn graph(&self) -> Option<(f64, i32)> {
        Some((self.c?, self.power?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Saddle,
    Other,
    Unresolved,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = serde_json::to_value(self).expect("classification serializes");
        write!(f, "{}", v.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorConclusion {
    pub element: SectorElement,
    pub kind: SectorKind,
    pub verdict: Verdict,
    /// `(λ₁, λ₂)` for vertices, as rationals.
    pub lambda: Option<[String; 2]>,
    #[serde(skip)]
    pub sector: SectorSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Portrait {
    pub diagram: NewtonDiagram,
    pub sectors: Vec<SectorConclusion>,
    pub singularities: Vec<SingularityReport>,
    pub separatrices: Vec<Separatrix>,
    pub classification: Classification,
}

impl Portrait {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("portrait serializes")
    }

    pub fn verdict(&self, element: SectorElement) -> Option<Verdict> {
        self.sectors.iter().find(|s| s.element == element).map(|s| s.verdict)
    }
}

/// Assembles the separatrices and settles the classification. Vertex and
/// edge sectors together cover a punctured neighbourhood of the origin, so
/// each is judged on its own; sectors come out in diagram order, right to
/// left.
pub fn glue_portrait(
    field: &PlanarField,
    diagram: &NewtonDiagram,
    vertices: &[(VertexProblem, Verdict)],
    edges: &[EdgeAnalysis],
    epsilon: f64,
) -> Portrait {
    let specs = diagram_sectors(diagram, epsilon);
    let spec_of = |el: SectorElement| *specs.iter().find(|s| s.element == el).expect("sector exists");
    let nv = vertices.len();

    let (alpha, beta) = field.to_char();
    let mut separatrices = Vec::new();
    if vertices[0].1 == Verdict::SaddleBehavior && beta.is_divisible_by(1) {
        separatrices.push(Separatrix::t_axis());
    }
    let mut singularities = Vec::new();
    for e in edges {
        singularities.extend(e.singularities.iter().map(ElementarySingularity::report));
        if e.verdict == Verdict::Unresolved {
            continue;
        }
        for s in e.singularities.iter().filter(|s| s.kind == SingularityType::Saddle) {
            separatrices.push(Separatrix {
                kind: SeparatrixKind::PowerCurve,
                c: Some(s.c),
                power: Some(-e.problem.r[0]),
                interval: Some(RootReport::from(&s.root)),
            });
        }
    }
    if vertices[nv - 1].1 == Verdict::SaddleBehavior && alpha.is_divisible_by(0) {
        separatrices.push(Separatrix::s_axis());
    }

    let mut sectors = Vec::new();
    for (j, (vp, verdict)) in vertices.iter().enumerate() {
        let spec = spec_of(SectorElement::Vertex(j));
        let (l1, l2) = &vp.lambda;
        sectors.push(SectorConclusion {
            element: spec.element,
            kind: spec.kind,
            verdict: *verdict,
            lambda: Some([format_rational(l1), format_rational(l2)]),
            sector: spec,
        });
        if let Some(e) = edges.get(j) {
            let spec = spec_of(SectorElement::Edge(j));
            sectors.push(SectorConclusion { element: spec.element, kind: spec.kind, verdict: e.verdict, lambda: None, sector: spec });
        }
    }

    let all: Vec<Verdict> = sectors.iter().map(|s| s.verdict).collect();
    let open_family = all.contains(&Verdict::NodeBehavior) || all.contains(&Verdict::SaddleNodeBehavior);
    let classification = if all.contains(&Verdict::Unresolved) {
        Classification::Unresolved
    } else if separatrices.len() == 2 && !open_family {
        Classification::Saddle
    } else {
        Classification::Other
    };
    Portrait { diagram: diagram.clone(), sectors, singularities, separatrices, classification }
}

/// Full analysis of a canonical field.
pub fn analyze(field: &PlanarField, epsilon: f64) -> Result<Portrait> {
    if field.is_zero() {
        return Err(Error::Invalid("the zero field has no Newton diagram".into()));
    }
    let diagram = newton_diagram(&field.support())?;
    let vertices = diagram
        .vertices
        .iter()
        .map(|&q| {
            let p = vertex_rescale(field, &diagram, q)?;
            let v = resonance_classify(&p);
            Ok((p, v))
        })
        .collect::<Result<Vec<_>>>()?;
    let edges = (0..diagram.edges.len()).map(|k| analyze_edge(field, &diagram, k)).collect::<Result<Vec<_>>>()?;
    Ok(glue_portrait(field, &diagram, &vertices, &edges, epsilon))
}

/// `Λ` as floats, for reporting.
pub fn lambda_f64(p: &VertexProblem) -> (f64, f64) {
    (to_f64(&p.lambda.0), to_f64(&p.lambda.1))
}
