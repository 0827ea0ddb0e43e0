//! From the jet of the deforming map `φ` to the characteristic-foliation
//! field `(α, β)` on the umbrella's parameter plane.
//!
//! Coordinates on ℝ⁴ are ordered `(x, u, y, v)`, `J(a,b,c,d) = (−c,−d,a,b)`,
//! the umbrella is `π(t,s) = (ts, 2t³/3, t², s)` and it lies on
//! `ρ = x² − yv² + (9/4)u² − y³ = 0`. With `Φ = ψ∘φ`, `f = Φ∘π` and
//! `ρ′ = ρ∘Φ⁻¹`, the field is `α = ⟨J ∂f/∂s, ∇ρ′(f)⟩`,
//! `β = −⟨J ∂f/∂t, ∇ρ′(f)⟩`.

use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::newton::PlanarField;
use crate::numerics::VectorField;
use crate::rational::{format_rational, int, parse_rational, rat, QMatrix, Rational};
use crate::series::{apply_matrix, compose, compose_many, MapJet4, Series2, Series4};
use crate::{Error, Result};

pub const DEFAULT_ORDER: i32 = 7;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JetMode {
    /// Matrix identities plus the jet-level check that φ*ω = ω.
    Symplectic,
    /// Only the linear part is required to be symplectic.
    #[default]
    LinearSymplecticOnly,
}

/// A degree ≥ 2 coefficient of φ: `coeff · x^j u^k y^l v^m` in component
/// `component` (0-based: x, u, y, v).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HigherTerm {
    pub component: usize,
    pub exp: [i32; 4],
    pub coeff: Rational,
}

/// Jet of `φ`: `Dφ(0) = [[A, B], [C, D]]` plus higher-order terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformationJet {
    a: QMatrix,
    b: QMatrix,
    c: QMatrix,
    d: QMatrix,
    higher: Vec<HigherTerm>,
    mode: JetMode,
}

impl DeformationJet {
    /// Validates the symplectic identities `AᵗD − CᵗB = I`, `AᵗC = CᵗA`,
    /// `DᵗB = BᵗD` (and, in [`JetMode::Symplectic`], the jet-level pullback
    /// of ω).
    pub fn new(
        a: QMatrix,
        b: QMatrix,
        c: QMatrix,
        d: QMatrix,
        higher: Vec<HigherTerm>,
        mode: JetMode,
    ) -> Result<Self> {
        for (name, m) in [("A", &a), ("B", &b), ("C", &c), ("D", &d)] {
            if m.rows() != 2 || m.cols() != 2 {
                return Err(Error::Shape(format!("block {name} must be 2x2")));
            }
        }
        for h in &higher {
            if h.component > 3 {
                return Err(Error::Invalid(format!("component {} out of range", h.component + 1)));
            }
            if h.exp.iter().any(|&q| q < 0) || h.exp.iter().sum::<i32>() < 2 {
                return Err(Error::Invalid(format!("higher term exponent {:?} must be nonnegative of degree >= 2", h.exp)));
            }
        }
        let (at, ct, dt) = (a.transpose(), c.transpose(), d.transpose());
        if at.mul(&d).sub(&ct.mul(&b)) != QMatrix::identity(2) {
            return Err(Error::Symplectic("A^t D - C^t B != I".into()));
        }
        if at.mul(&c) != ct.mul(&a) {
            return Err(Error::Symplectic("A^t C != C^t A".into()));
        }
        if dt.mul(&b) != b.transpose().mul(&d) {
            return Err(Error::Symplectic("D^t B != B^t D".into()));
        }
        let jet = DeformationJet { a, b, c, d, higher, mode };
        if mode == JetMode::Symplectic {
            jet.check_pullback()?;
        }
        Ok(jet)
    }

    pub fn identity() -> Self {
        let (i, z) = (QMatrix::identity(2), QMatrix::zeros(2, 2));
        DeformationJet::new(i.clone(), z.clone(), z, i, vec![], JetMode::Symplectic).expect("identity is symplectic")
    }

    /// Symplectic linear map `m` (4×4) with optional higher terms.
    pub fn from_matrix(m: &QMatrix, higher: Vec<HigherTerm>, mode: JetMode) -> Result<Self> {
        DeformationJet::new(m.block(0, 0, 2, 2), m.block(0, 2, 2, 2), m.block(2, 0, 2, 2), m.block(2, 2, 2, 2), higher, mode)
    }

    pub fn a(&self) -> &QMatrix {
        &self.a
    }
    pub fn b(&self) -> &QMatrix {
        &self.b
    }
    pub fn c(&self) -> &QMatrix {
        &self.c
    }
    pub fn d(&self) -> &QMatrix {
        &self.d
    }
    pub fn higher(&self) -> &[HigherTerm] {
        &self.higher
    }
    pub fn mode(&self) -> JetMode {
        self.mode
    }

    /// `Dφ(0)` as a 4×4 matrix.
    pub fn linear_matrix(&self) -> QMatrix {
        QMatrix::from_blocks(&self.a, &self.b, &self.c, &self.d)
    }

    /// φ as a map jet truncated at `order`.
    pub fn phi(&self, order: i32) -> MapJet4 {
        let mut map = MapJet4::linear(&self.linear_matrix(), order);
        for h in &self.higher {
            let comp = &map.components[h.component];
            map.components[h.component] = comp.add(&Series4::monomial(h.exp, h.coeff.clone(), order));
        }
        map
    }

    fn max_higher_degree(&self) -> i32 {
        self.higher.iter().map(|h| h.exp.iter().sum()).max().unwrap_or(1)
    }

    /// `φ*ω = ω` through degree (highest higher-term degree − 1), with
    /// `ω = dx∧dy + du∧dv`.
    fn check_pullback(&self) -> Result<()> {
        let k = self.max_higher_degree() - 1;
        if k < 1 {
            return Ok(());
        }
        let phi = self.phi(k + 1);
        let grads: Vec<Vec<Series4>> =
            phi.components.iter().map(|p| (0..4).map(|i| p.partial(i)).collect()).collect();
        for a in 0..4 {
            for b in (a + 1)..4 {
                let mut w = Series4::zero(k);
                for (p, q) in [(0, 2), (1, 3)] {
                    let ab = grads[p][a].with_order(k).mul(&grads[q][b].with_order(k))?;
                    let ba = grads[p][b].with_order(k).mul(&grads[q][a].with_order(k))?;
                    w = w.add(&ab).sub(&ba);
                }
                let target = if (a, b) == (0, 2) || (a, b) == (1, 3) { Rational::one() } else { Rational::zero() };
                let w = w.sub(&Series4::constant(target, k));
                if !w.is_zero() {
                    return Err(Error::Symplectic(format!(
                        "jet-level pullback of omega differs from omega in the dx{a}^dx{b} component"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `ψ`, `E`, `G` and `Δ = det G` derived from the linear part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedLinearData {
    pub psi: QMatrix,
    pub e: QMatrix,
    pub g: QMatrix,
    pub delta: Rational,
}

/// `J` on ℝ⁴ in `(x,u,y,v)` order.
pub fn j_matrix() -> QMatrix {
    QMatrix::from_i64(&[&[0, 0, -1, 0], &[0, 0, 0, -1], &[1, 0, 0, 0], &[0, 1, 0, 0]])
}

/// `ψ = [[Dᵗ, −Bᵗ], [Bᵗ, Dᵗ]]`, `D(ψ∘φ)(0) = [[I, 0], [E, G]]`,
/// `G = BᵗB + DᵗD`.
pub fn derive_linear_data(jet: &DeformationJet) -> Result<DerivedLinearData> {
    let (bt, dt) = (jet.b.transpose(), jet.d.transpose());
    let psi = QMatrix::from_blocks(&dt, &bt.scale(&int(-1)), &bt, &dt);
    let j = j_matrix();
    if psi.mul(&j) != j.mul(&psi) {
        return Err(Error::Symplectic("psi does not commute with J".into()));
    }
    let l = psi.mul(&jet.linear_matrix());
    if l.block(0, 0, 2, 2) != QMatrix::identity(2) || l.block(0, 2, 2, 2) != QMatrix::zeros(2, 2) {
        return Err(Error::Symplectic("D(psi o phi)(0) is not of the form [[I, 0], [E, G]]".into()));
    }
    let e = l.block(2, 0, 2, 2);
    let g = l.block(2, 2, 2, 2);
    if g != bt.mul(&jet.b).add(&dt.mul(&jet.d)) || !g.is_symmetric() {
        return Err(Error::Symplectic("G != B^t B + D^t D".into()));
    }
    let delta = g.det2();
    if delta <= Rational::zero() {
        return Err(Error::Symplectic(format!("Delta = {delta} is not positive")));
    }
    Ok(DerivedLinearData { psi, e, g, delta })
}

/// `π(t,s) = (ts, 2t³/3, t², s)`.
pub fn umbrella_jet(order: i32) -> [Series2; 4] {
    [
        Series2::monomial([1, 1], int(1), order),
        Series2::monomial([3, 0], rat(2, 3), order),
        Series2::monomial([2, 0], int(1), order),
        Series2::monomial([0, 1], int(1), order),
    ]
}

/// `ρ = x² − yv² + (9/4)u² − y³`.
pub fn rho() -> Series4 {
    Series4::from_terms(
        [([2, 0, 0, 0], int(1)), ([0, 0, 1, 2], int(-1)), ([0, 2, 0, 0], rat(9, 4)), ([0, 0, 3, 0], int(-1))],
        None,
    )
    .expect("nonnegative exponents")
}

/// Intermediate jets of the pipeline, kept for coefficient bookkeeping.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub order: i32,
    pub linear: DerivedLinearData,
    /// `Φ = ψ∘φ`, truncated at `order + 1`.
    pub big_phi: MapJet4,
    /// `H = Φ⁻¹`, truncated at `order`: `ρ` has no terms below degree 2, so
    /// degree `order + 1` of `ρ∘H` only sees `H` through degree `order`.
    pub inverse: MapJet4,
    /// `ρ′ = ρ∘H`.
    pub rho_prime: Series4,
    /// `f = Φ∘π`, truncated at `order`.
    pub f: [Series2; 4],
}

impl Pipeline {
    pub fn run(jet: &DeformationJet, order: i32) -> Result<Self> {
        if order < 3 {
            return Err(Error::Invalid(format!("truncation order {order} is below 3")));
        }
        let linear = derive_linear_data(jet)?;
        let phi = jet.phi(order + 1);
        let big_phi = MapJet4::new(apply_matrix(&linear.psi, &phi.components))?;
        let inverse = big_phi.with_order(order).invert()?;
        let rho_prime = compose(&rho(), &inverse.with_order(order + 1).components)?;
        let low: Vec<Series4> = big_phi.components.iter().map(|c| c.with_order(order)).collect();
        let lows: Vec<&Series4> = low.iter().collect();
        let f: [Series2; 4] = compose_many(&lows, &umbrella_jet(order))?.try_into().expect("4");
        Ok(Pipeline { order, linear, big_phi, inverse, rho_prime, f })
    }

    /// `(α, β)` exact through degree `order`.
    pub fn field(&self) -> Result<(Series2, Series2)> {
        let n = self.order;
        let grads: Vec<Series4> = (0..4).map(|i| self.rho_prime.partial(i)).collect();
        let gs: Vec<&Series4> = grads.iter().collect();
        let r = compose_many(&gs, &self.f)?;
        // ∂f has constant terms but ∇ρ′(f) starts in degree 1, so products
        // at order n stay exact through n.
        let xt: Vec<Series2> = self.f.iter().map(|c| c.partial(0).with_order(n)).collect();
        let xs: Vec<Series2> = self.f.iter().map(|c| c.partial(1).with_order(n)).collect();
        let alpha = pair_j(&xs, &r)?;
        let beta = pair_j(&xt, &r)?.neg();
        Ok((alpha, beta))
    }
}

/// `⟨J a, r⟩` with `J(a₀,a₁,a₂,a₃) = (−a₂, −a₃, a₀, a₁)`.
fn pair_j(a: &[Series2], r: &[Series2]) -> Result<Series2> {
    let mut acc = a[0].mul(&r[2])?;
    acc = acc.add(&a[1].mul(&r[3])?);
    acc = acc.sub(&a[2].mul(&r[0])?);
    acc = acc.sub(&a[3].mul(&r[1])?);
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharField {
    pub alpha: Series2,
    pub beta: Series2,
    pub canonical: PlanarField,
}

impl CharField {
    pub fn new(alpha: Series2, beta: Series2) -> Self {
        let canonical = PlanarField::from_char(&alpha, &beta);
        CharField { alpha, beta, canonical }
    }

    pub fn order(&self) -> Option<i32> {
        self.alpha.order()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        CharField::new(self.alpha.scale(c), self.beta.scale(c))
    }

    /// Both axes invariant: `α` divisible by `t` and `β` by `s`.
    pub fn axes_invariant(&self) -> bool {
        self.alpha.is_divisible_by(0) && self.beta.is_divisible_by(1)
    }
}

/// The characteristic field of the deformed umbrella, exact through `order`.
pub fn characteristic_field(jet: &DeformationJet, order: i32) -> Result<CharField> {
    if order < 5 {
        return Err(Error::Invalid(format!("truncation order {order} is below 5")));
    }
    let (alpha, beta) = Pipeline::run(jet, order)?.field()?;
    Ok(CharField::new(alpha, beta))
}

/// The seven low-order coefficients that shape the Newton diagram
/// (`alpha_jk` multiplies `t^j s^k`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldCoefficients {
    pub alpha11: Rational,
    pub alpha02: Rational,
    pub alpha30: Rational,
    pub beta21: Rational,
    pub beta12: Rational,
    pub beta03: Rational,
    pub beta_t4: Rational,
}

impl FieldCoefficients {
    pub const NAMES: [&'static str; 7] = ["alpha11", "alpha02", "alpha30", "beta21", "beta12", "beta03", "beta_t4"];

    pub fn values(&self) -> [&Rational; 7] {
        [&self.alpha11, &self.alpha02, &self.alpha30, &self.beta21, &self.beta12, &self.beta03, &self.beta_t4]
    }

    /// Names of the entries where `self` and `other` differ.
    pub fn mismatches(&self, other: &FieldCoefficients) -> Vec<&'static str> {
        let (mine, theirs) = (self.values(), other.values());
        (0..7).filter(|&i| mine[i] != theirs[i]).map(|i| Self::NAMES[i]).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let map: serde_json::Map<String, serde_json::Value> = Self::NAMES
            .iter()
            .zip(self.values())
            .map(|(n, v)| (n.to_string(), serde_json::Value::String(format_rational(v))))
            .collect();
        serde_json::Value::Object(map)
    }
}

pub fn extract_coefficients(field: &CharField) -> FieldCoefficients {
    let a = |j, k| field.alpha.coeff(&[j, k]);
    let b = |j, k| field.beta.coeff(&[j, k]);
    FieldCoefficients {
        alpha11: a(1, 1),
        alpha02: a(0, 2),
        alpha30: a(3, 0),
        beta21: b(2, 1),
        beta12: b(1, 2),
        beta03: b(0, 3),
        beta_t4: b(4, 0),
    }
}

/// Inputs of the closed-form coefficient expressions: linear data plus the
/// `f` and `h` coefficients they reference. `f_i_jk` is the coefficient of
/// `t^j s^k` in `f_i`; `h2_jklm` that of `x^j u^k y^l v^m` in the
/// `u`-component of `Φ⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaInputs {
    pub g: QMatrix,
    pub e: QMatrix,
    pub f1_02: Rational,
    pub f2_02: Rational,
    pub h2_0002: Rational,
    pub h2_0020: Rational,
}

impl FormulaInputs {
    pub fn from_pipeline(p: &Pipeline) -> Self {
        FormulaInputs {
            g: p.linear.g.clone(),
            e: p.linear.e.clone(),
            f1_02: p.f[0].coeff(&[0, 2]),
            f2_02: p.f[1].coeff(&[0, 2]),
            h2_0002: p.inverse.components[1].coeff(&[0, 0, 0, 2]),
            h2_0020: p.inverse.components[1].coeff(&[0, 0, 2, 0]),
        }
    }

    pub fn from_jet(jet: &DeformationJet) -> Result<Self> {
        Ok(Self::from_pipeline(&Pipeline::run(jet, 3)?))
    }
}

/// The closed forms as originally stated:
/// `α₁₁ = −2g₁₂`, `α₀₂ = (9/2)(h²₀₀₀₂g₂₂² + f²₀₂ + h²₀₀₂₀g₁₂²)`,
/// `α₃₀ = −3g₂₂`, `β₂₁ = 4g₁₁`, `β₁₂ = 2e₁₁ + 6g₁₂f²₀₂`,
/// `β₀₃ = 2e₁₁f¹₀₂ + (9/2)e₂₁f²₀₂`, t⁴-coefficient `6g₁₂`.
///
/// The α₀₂, β₁₂ and β₀₃ expressions disagree with the computed field for
/// generic jets; see [`linear_part_coefficients`].
pub fn coefficient_formulas(x: &FormulaInputs) -> FieldCoefficients {
    let (g11, g12, g22) = (&x.g[(0, 0)], &x.g[(0, 1)], &x.g[(1, 1)]);
    let (e11, e21) = (&x.e[(0, 0)], &x.e[(1, 0)]);
    let nine_halves = rat(9, 2);
    FieldCoefficients {
        alpha11: int(-2) * g12,
        alpha02: &nine_halves * (&x.h2_0002 * g22 * g22 + &x.f2_02 + &x.h2_0020 * g12 * g12),
        alpha30: int(-3) * g22,
        beta21: int(4) * g11,
        beta12: int(2) * e11 + int(6) * g12 * &x.f2_02,
        beta03: int(2) * e11 * &x.f1_02 + &nine_halves * e21 * &x.f2_02,
        beta_t4: int(6) * g12,
    }
}

/// Closed forms that match the computed field for every jet.
///
/// Because `Φ⁻¹∘f = π`, `∇ρ′(f) = DΦ(π)^{-T} ∇ρ(π)`, so the low-order
/// coefficients only see the linear part. With `E′ = −G⁻¹E`, `G′ = G⁻¹`:
/// `α₀₂ = (E′G)₁₂`, `β₁₂ = 2e₁₁ − 2(E′G)₁₁`, `β₀₃ = g′₁₁ − e₁₁e′₁₁ − e₂₁e′₁₂`.
pub fn linear_part_coefficients(data: &DerivedLinearData) -> FieldCoefficients {
    let g = &data.g;
    let gi = g.inverse().expect("G is positive definite");
    let ep = gi.mul(&data.e).scale(&int(-1));
    let epg = ep.mul(g);
    let (g11, g12, g22) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 1)]);
    let (e11, e21) = (&data.e[(0, 0)], &data.e[(1, 0)]);
    FieldCoefficients {
        alpha11: int(-2) * g12,
        alpha02: epg[(0, 1)].clone(),
        alpha30: int(-3) * g22,
        beta21: int(4) * g11,
        beta12: int(2) * e11 - int(2) * &epg[(0, 0)],
        beta03: &gi[(0, 0)] - e11 * &ep[(0, 0)] - e21 * &ep[(0, 1)],
        beta_t4: int(6) * g12,
    }
}

/// `g₁₂ ≠ 0` and `α₀₂, β₁₂, β₀₃` all nonzero.
pub fn is_generic(g: &QMatrix, c: &FieldCoefficients) -> bool {
    !g[(0, 1)].is_zero() && !c.alpha02.is_zero() && !c.beta12.is_zero() && !c.beta03.is_zero()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonvanishingReport {
    pub samples: usize,
    pub r0: f64,
    pub r1: f64,
    pub min_norm: f64,
    pub max_norm: f64,
    pub argmin: (f64, f64),
    pub passed: bool,
}

/// Samples `|(α, β)|` on a deterministic sunflower lattice covering the
/// annulus `r0 ≤ r ≤ r1`; fails if any sample is ≤ 10⁻¹² times the largest.
pub fn check_nonvanishing<F: VectorField + Sync>(field: &F, r0: f64, r1: f64, samples: usize) -> NonvanishingReport {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let (min, max) = (0..samples)
        .into_par_iter()
        .map(|k| {
            let frac = (k as f64 + 0.5) / samples as f64;
            let r = (r0 * r0 + frac * (r1 * r1 - r0 * r0)).sqrt();
            let th = golden * k as f64;
            let (t, s) = (r * th.cos(), r * th.sin());
            let (a, b) = field.eval(t, s);
            let n = a.hypot(b);
            ((n, t, s), n)
        })
        .fold(
            || ((f64::INFINITY, 0.0, 0.0), 0.0f64),
            |(m, mx), (p, n)| (if p.0 < m.0 { p } else { m }, mx.max(n)),
        )
        .reduce(
            || ((f64::INFINITY, 0.0, 0.0), 0.0f64),
            |(m1, x1), (m2, x2)| {
                // Ties broken by position so the reduction is order independent.
                let m = if (m2.0, m2.1, m2.2) < (m1.0, m1.1, m1.2) { m2 } else { m1 };
                (m, x1.max(x2))
            },
        );
    let passed = samples > 0 && min.0 > 0.0 && min.0 > 1e-12 * max;
    NonvanishingReport { samples, r0, r1, min_norm: min.0, max_norm: max, argmin: (min.1, min.2), passed }
}

/// Parameters for random rational jets.
#[derive(Clone, Debug)]
pub struct JetSampler {
    /// Number of shear pairs multiplied into the linear part.
    pub shears: usize,
    /// Coefficients are `k / denom` with `|k| ≤ denom`.
    pub denom: i64,
    /// Number of random degree-2..3 terms.
    pub higher_terms: usize,
}

impl Default for JetSampler {
    fn default() -> Self {
        JetSampler { shears: 2, denom: 4, higher_terms: 6 }
    }
}

impl JetSampler {
    fn entry<R: Rng>(&self, rng: &mut R) -> Rational {
        rat(rng.gen_range(-self.denom..=self.denom), self.denom)
    }

    /// Random symplectic matrix as a product of shears `[[I,S],[0,I]]`,
    /// `[[I,0],[S,I]]` with `S` symmetric.
    pub fn symplectic<R: Rng>(&self, rng: &mut R) -> QMatrix {
        let (i2, z) = (QMatrix::identity(2), QMatrix::zeros(2, 2));
        let mut m = QMatrix::identity(4);
        for _ in 0..self.shears {
            for lower in [false, true] {
                let (a, b, c) = (self.entry(rng), self.entry(rng), self.entry(rng));
                let s = QMatrix::from_rows(vec![vec![a, b.clone()], vec![b, c]]).expect("2x2");
                let shear = if lower {
                    QMatrix::from_blocks(&i2, &z, &s, &i2)
                } else {
                    QMatrix::from_blocks(&i2, &s, &z, &i2)
                };
                m = m.mul(&shear);
            }
        }
        m
    }

    pub fn higher<R: Rng>(&self, rng: &mut R) -> Vec<HigherTerm> {
        let mut out = Vec::new();
        while out.len() < self.higher_terms {
            let deg = rng.gen_range(2..=3);
            let mut exp = [0; 4];
            for _ in 0..deg {
                exp[rng.gen_range(0..4)] += 1;
            }
            let coeff = self.entry(rng);
            if !coeff.is_zero() {
                out.push(HigherTerm { component: rng.gen_range(0..4), exp, coeff });
            }
        }
        out
    }

    pub fn jet<R: Rng>(&self, rng: &mut R) -> DeformationJet {
        let m = self.symplectic(rng);
        let higher = self.higher(rng);
        DeformationJet::from_matrix(&m, higher, JetMode::LinearSymplecticOnly).expect("shear products are symplectic")
    }

    /// Resamples until the jet is generic (decided from the linear data).
    pub fn generic_jet<R: Rng>(&self, rng: &mut R) -> DeformationJet {
        loop {
            let jet = self.jet(rng);
            let data = derive_linear_data(&jet).expect("symplectic");
            if is_generic(&data.g, &linear_part_coefficients(&data)) {
                return jet;
            }
        }
    }
}

// --- JSON interchange ------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Scalar {
    Text(String),
    Int(i64),
    Float(f64),
}

impl Scalar {
    fn to_rational(&self) -> Result<Rational> {
        match self {
            Scalar::Text(s) => parse_rational(s),
            Scalar::Int(n) => Ok(int(*n)),
            Scalar::Float(x) => parse_rational(&format!("{x}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct HigherRecord {
    component: usize,
    exp: [i32; 4],
    coeff: Scalar,
}

/// On-disk form of a [`DeformationJet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JetRecord {
    #[serde(rename = "A")]
    a: Vec<Vec<Scalar>>,
    #[serde(rename = "B")]
    b: Vec<Vec<Scalar>>,
    #[serde(rename = "C")]
    c: Vec<Vec<Scalar>>,
    #[serde(rename = "D")]
    d: Vec<Vec<Scalar>>,
    #[serde(default)]
    higher: Vec<HigherRecord>,
    #[serde(default)]
    mode: JetMode,
}

fn matrix_from(rows: &[Vec<Scalar>]) -> Result<QMatrix> {
    let rows = rows.iter().map(|r| r.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?;
    QMatrix::from_rows(rows)
}

fn matrix_to(m: &QMatrix) -> Vec<Vec<Scalar>> {
    m.to_rows().iter().map(|r| r.iter().map(|q| Scalar::Text(format_rational(q))).collect()).collect()
}

impl JetRecord {
    pub fn to_jet(&self) -> Result<DeformationJet> {
        let higher = self
            .higher
            .iter()
            .map(|h| {
                if !(1..=4).contains(&h.component) {
                    return Err(Error::Invalid(format!("component {} must be 1-4", h.component)));
                }
                Ok(HigherTerm { component: h.component - 1, exp: h.exp, coeff: h.coeff.to_rational()? })
            })
            .collect::<Result<Vec<_>>>()?;
        DeformationJet::new(
            matrix_from(&self.a)?,
            matrix_from(&self.b)?,
            matrix_from(&self.c)?,
            matrix_from(&self.d)?,
            higher,
            self.mode,
        )
    }

    pub fn from_jet(jet: &DeformationJet) -> Self {
        JetRecord {
            a: matrix_to(&jet.a),
            b: matrix_to(&jet.b),
            c: matrix_to(&jet.c),
            d: matrix_to(&jet.d),
            higher: jet
                .higher
                .iter()
                .map(|h| HigherRecord { component: h.component + 1, exp: h.exp, coeff: Scalar::Text(format_rational(&h.coeff)) })
                .collect(),
            mode: jet.mode,
        }
    }
}

impl DeformationJet {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<JetRecord>(text)?.to_jet()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&JetRecord::from_jet(self)).expect("jet serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(terms: &[([i32; 2], i64, i64)], n: i32) -> Series2 {
        Series2::from_terms(terms.iter().map(|&(e, p, q)| (e, rat(p, q))), n).unwrap()
    }

    #[test]
    fn umbrella_lies_on_hypersurface() {
        let pi = umbrella_jet(7);
        assert_eq!(pi[1].coeff(&[3, 0]), rat(2, 3));
        assert!(compose(&rho(), &pi).unwrap().is_zero());
    }

    #[test]
    fn rho_u_partial() {
        let d = rho().partial(1);
        assert_eq!(d, Series4::from_terms([([0, 1, 0, 0], rat(9, 2))], None).unwrap());
    }

    #[test]
    fn identity_linear_data() {
        let d = derive_linear_data(&DeformationJet::identity()).unwrap();
        assert_eq!(d.psi, QMatrix::identity(4));
        assert_eq!(d.e, QMatrix::zeros(2, 2));
        assert_eq!(d.g, QMatrix::identity(2));
        assert_eq!(d.delta, int(1));
    }

    #[test]
    fn sheared_d_block() {
        let d = QMatrix::from_i64(&[&[1, 1], &[0, 1]]);
        let a = d.inverse().unwrap().transpose();
        let z = QMatrix::zeros(2, 2);
        let jet = DeformationJet::new(a, z.clone(), z, d, vec![], JetMode::Symplectic).unwrap();
        let data = derive_linear_data(&jet).unwrap();
        assert_eq!(data.g, QMatrix::from_i64(&[&[1, 1], &[1, 2]]));
        assert_eq!(data.delta, int(1));
    }

    #[test]
    fn rejects_non_symplectic() {
        let i = QMatrix::identity(2);
        let z = QMatrix::zeros(2, 2);
        let err = DeformationJet::new(i.scale(&int(2)), z.clone(), z, i, vec![], JetMode::LinearSymplecticOnly).unwrap_err();
        assert!(err.to_string().contains("A^t D - C^t B"));
    }

    #[test]
    fn pullback_check() {
        let i = QMatrix::identity(2);
        let z = QMatrix::zeros(2, 2);
        // u ↦ u + v² is symplectic (a shear along the Hamiltonian flow of v³/3).
        let ok = HigherTerm { component: 1, exp: [0, 0, 0, 2], coeff: int(1) };
        assert!(DeformationJet::new(i.clone(), z.clone(), z.clone(), i.clone(), vec![ok], JetMode::Symplectic).is_ok());
        let bad = HigherTerm { component: 1, exp: [0, 0, 2, 0], coeff: int(1) };
        assert!(DeformationJet::new(i.clone(), z.clone(), z.clone(), i.clone(), vec![bad.clone()], JetMode::Symplectic).is_err());
        assert!(DeformationJet::new(i.clone(), z.clone(), z, i, vec![bad], JetMode::LinearSymplecticOnly).is_ok());
    }

    #[test]
    fn standard_field() {
        let f = characteristic_field(&DeformationJet::identity(), 7).unwrap();
        assert_eq!(f.alpha, poly(&[([3, 0], -3, 1), ([1, 2], -1, 1), ([5, 0], -3, 1)], 7));
        assert_eq!(f.beta, poly(&[([0, 3], 1, 1), ([2, 1], 4, 1), ([4, 1], 7, 1)], 7));
        assert!(f.axes_invariant());
    }

    #[test]
    fn identity_formulas() {
        let inputs = FormulaInputs::from_jet(&DeformationJet::identity()).unwrap();
        let c = coefficient_formulas(&inputs);
        let z = Rational::zero();
        assert_eq!(c.values(), [&z, &z, &int(-3), &int(4), &z, &z, &z]);
    }

    #[test]
    fn jet_json_round_trip() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let jet = JetSampler::default().jet(&mut rng);
        assert_eq!(DeformationJet::from_json(&jet.to_json()).unwrap(), jet);
    }

    use rand::SeedableRng;
}
