//! Sparse truncated power and Laurent series with exact rational
//! coefficients, in a fixed number of variables.
//!
//! A series carries an optional truncation order `N`: terms of total degree
//! above `N` are never stored. `None` means "exact polynomial". Products of
//! truncated series are exact through degree `N` as long as no factor has
//! negative exponents.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational, to_f64, QMatrix, Rational};
use crate::{Error, Result};

pub type Series2 = Series<2>;
pub type Series4 = Series<4>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series<const V: usize> {
    terms: BTreeMap<[i32; V], Rational>,
    order: Option<i32>,
    /// Set when negative exponents are permitted (canonical-form and
    /// power-transformed components).
    laurent: bool,
}

fn degree<const V: usize>(e: &[i32; V]) -> i32 {
    e.iter().sum()
}

fn within(order: Option<i32>, d: i32) -> bool {
    order.map_or(true, |n| d <= n)
}

fn min_order(a: Option<i32>, b: Option<i32>) -> Option<i32> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl<const V: usize> Series<V> {
    pub fn zero(order: impl Into<Option<i32>>) -> Self {
        Series { terms: BTreeMap::new(), order: order.into(), laurent: false }
    }

    pub fn constant(c: Rational, order: impl Into<Option<i32>>) -> Self {
        Self::monomial([0; V], c, order)
    }

    pub fn one(order: impl Into<Option<i32>>) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// The coordinate function `x_i`.
    pub fn variable(i: usize, order: impl Into<Option<i32>>) -> Self {
        let mut e = [0; V];
        e[i] = 1;
        Self::monomial(e, Rational::one(), order)
    }

    /// Monomial; negative exponents mark the result as Laurent.
    pub fn monomial(exp: [i32; V], c: Rational, order: impl Into<Option<i32>>) -> Self {
        let mut s = Self::zero(order);
        s.laurent = exp.iter().any(|&q| q < 0);
        s.add_term(exp, c);
        s
    }

    /// Power series from explicit terms; rejects negative exponents.
    pub fn from_terms(
        terms: impl IntoIterator<Item = ([i32; V], Rational)>,
        order: impl Into<Option<i32>>,
    ) -> Result<Self> {
        let mut s = Self::zero(order);
        for (e, c) in terms {
            if e.iter().any(|&q| q < 0) {
                return Err(Error::NegativeExponent(e.to_vec()));
            }
            s.add_term(e, c);
        }
        Ok(s)
    }

    pub fn from_laurent_terms(
        terms: impl IntoIterator<Item = ([i32; V], Rational)>,
        order: impl Into<Option<i32>>,
    ) -> Self {
        let mut s = Self::zero(order);
        s.laurent = true;
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Accumulates `c·x^e`, dropping it if beyond the truncation order and
    /// removing the entry if the sum cancels.
    pub(crate) fn add_term(&mut self, e: [i32; V], c: Rational) {
        if c.is_zero() || !within(self.order, degree(&e)) {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn order(&self) -> Option<i32> {
        self.order
    }

    pub fn is_laurent(&self) -> bool {
        self.laurent
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: &[i32; V]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn get(&self, e: &[i32; V]) -> Option<&Rational> {
        self.terms.get(e)
    }

    /// Terms in lexicographic exponent order.
    pub fn iter(&self) -> impl Iterator<Item = (&[i32; V], &Rational)> {
        self.terms.iter()
    }

    pub fn support(&self) -> BTreeSet<[i32; V]> {
        self.terms.keys().copied().collect()
    }

    pub fn min_degree(&self) -> Option<i32> {
        self.terms.keys().map(degree).min()
    }

    pub fn max_degree(&self) -> Option<i32> {
        self.terms.keys().map(degree).max()
    }

    pub fn min_exponent(&self, var: usize) -> Option<i32> {
        self.terms.keys().map(|e| e[var]).min()
    }

    /// Every term carries at least one factor of `x_var`.
    pub fn is_divisible_by(&self, var: usize) -> bool {
        self.terms.keys().all(|e| e[var] >= 1)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&[0; V])
    }

    /// Same terms, new truncation bound (terms beyond it are dropped).
    pub fn with_order(&self, order: impl Into<Option<i32>>) -> Self {
        let order = order.into();
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| within(order, degree(e)))
            .map(|(e, c)| (*e, c.clone()))
            .collect();
        Series { terms, order, laurent: self.laurent }
    }

    /// Drops every term of degree > m; the order becomes min(order, m).
    pub fn truncate(&self, m: i32) -> Self {
        self.with_order(min_order(self.order, Some(m)))
    }

    pub fn homogeneous_part(&self, d: i32) -> Self {
        let mut s = Self::zero(self.order);
        s.laurent = self.laurent;
        for (e, c) in &self.terms {
            if degree(e) == d {
                s.terms.insert(*e, c.clone());
            }
        }
        s
    }

    pub fn filter(&self, mut keep: impl FnMut(&[i32; V]) -> bool) -> Self {
        let mut s = Self::zero(self.order);
        s.laurent = self.laurent;
        for (e, c) in &self.terms {
            if keep(e) {
                s.terms.insert(*e, c.clone());
            }
        }
        s
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            let mut z = Self::zero(self.order);
            z.laurent = self.laurent;
            return z;
        }
        let terms = self.terms.iter().map(|(e, a)| (*e, a * c)).collect();
        Series { terms, order: self.order, laurent: self.laurent }
    }

    /// Sum; the result keeps the smaller truncation order.
    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.with_order(min_order(self.order, other.order));
        s.laurent |= other.laurent;
        for (e, c) in &other.terms {
            s.add_term(*e, c.clone());
        }
        s
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    /// Truncated product.
    ///
    /// # Errors
    /// Both operands truncated, at different orders.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let order = match (self.order, other.order) {
            (Some(a), Some(b)) if a != b => return Err(Error::OrderMismatch(Some(a), Some(b))),
            (a, b) => min_order(a, b),
        };
        Ok(self.mul_unchecked(other, order))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self, order: Option<i32>) -> Self {
        let mut out = Self::zero(order);
        out.laurent = self.laurent || other.laurent;
        if self.is_zero() || other.is_zero() {
            return out;
        }
        // Multiply integer numerators over common denominators and reduce
        // once per output term: one gcd per term instead of per product.
        let (la, na) = self.integer_form();
        let (lb, nb) = other.integer_form();
        let mut rhs: Vec<(i32, &[i32; V], &BigInt)> = nb.iter().map(|(e, c)| (degree(e), *e, c)).collect();
        rhs.sort_by_key(|t| t.0);
        let mut acc: HashMap<[i32; V], BigInt> = HashMap::new();
        for (ea, ca) in &na {
            let da = degree(ea);
            for &(db, eb, cb) in &rhs {
                if !within(order, da + db) {
                    break;
                }
                let mut e = **ea;
                for k in 0..V {
                    e[k] += eb[k];
                }
                let p = ca * cb;
                match acc.get_mut(&e) {
                    Some(v) => *v += p,
                    None => {
                        acc.insert(e, p);
                    }
                }
            }
        }
        let den = la * lb;
        out.terms =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(e, c)| (e, Rational::new(c, den.clone()))).collect();
        out
    }

    /// `(L, {e: L·c_e})` with `L` the lcm of the coefficient denominators.
    fn integer_form(&self) -> (BigInt, Vec<(&[i32; V], BigInt)>) {
        let l = self.terms.values().fold(BigInt::one(), |l, c| l.lcm(c.denom()));
        let nums = self.terms.iter().map(|(e, c)| (e, c.numer() * (&l / c.denom()))).collect();
        (l, nums)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut r = Self::one(self.order);
        for _ in 0..k {
            r = r.mul(self)?;
        }
        Ok(r)
    }

    /// Multiplies by the monomial `x^e` (any integer exponents). Degrees
    /// shift, so the truncation order shifts by |e| too.
    pub fn mul_monomial(&self, e: [i32; V]) -> Self {
        let shift = degree(&e);
        let terms = self
            .terms
            .iter()
            .map(|(q, c)| {
                let mut r = *q;
                for k in 0..V {
                    r[k] += e[k];
                }
                (r, c.clone())
            })
            .collect::<BTreeMap<_, _>>();
        let laurent = self.laurent || terms.keys().any(|q: &[i32; V]| q.iter().any(|&x| x < 0));
        Series { terms, order: self.order.map(|n| n + shift), laurent }
    }

    pub fn divide_by_monomial(&self, e: [i32; V]) -> Self {
        let mut neg = e;
        for x in &mut neg {
            *x = -*x;
        }
        let mut s = self.mul_monomial(neg);
        s.laurent = true;
        s
    }

    /// Term-wise derivative; the order drops by one.
    pub fn partial(&self, var: usize) -> Self {
        let mut s = Self::zero(self.order.map(|n| n - 1));
        s.laurent = self.laurent;
        for (e, c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let mut d = *e;
            d[var] -= 1;
            s.add_term(d, c * Rational::from_integer(e[var].into()));
        }
        s
    }

    pub fn eval_f64(&self, x: &[f64; V]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut m = to_f64(c);
                for k in 0..V {
                    m *= x[k].powi(e[k]);
                }
                m
            })
            .sum()
    }

    /// Exact evaluation at a rational point (all exponents must be usable:
    /// negative exponents need nonzero coordinates).
    pub fn eval_exact(&self, x: &[Rational; V]) -> Rational {
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for k in 0..V {
                m *= num_traits::pow::Pow::pow(&x[k], e[k]);
            }
            total += m;
        }
        total
    }

    /// Coefficients as floats, for fast numeric evaluation.
    pub fn to_float_terms(&self) -> Vec<([i32; V], f64)> {
        self.terms.iter().map(|(e, c)| (*e, to_f64(c))).collect()
    }
}

/// Substitutes `args` into `g`: returns `g(args[0], …, args[V-1])`.
///
/// The arguments must be power series without constant term sharing one
/// truncation order, which becomes the order of the result.
pub fn compose<const V: usize, const W: usize>(g: &Series<V>, args: &[Series<W>; V]) -> Result<Series<W>> {
    Ok(compose_many(&[g], args)?.pop().expect("one input"))
}

/// Like [`compose`] for several outer series at once, sharing the cache of
/// argument monomials.
pub fn compose_many<const V: usize, const W: usize>(
    gs: &[&Series<V>],
    args: &[Series<W>; V],
) -> Result<Vec<Series<W>>> {
    let order = args[0].order;
    for (i, a) in args.iter().enumerate() {
        if a.order != order {
            return Err(Error::OrderMismatch(order, a.order));
        }
        if a.laurent {
            return Err(Error::NegativeExponent(vec![i as i32]));
        }
        if !a.constant_term().is_zero() {
            return Err(Error::ConstantTerm(i));
        }
    }
    let mut cache: HashMap<[i32; V], Series<W>> = HashMap::new();
    cache.insert([0; V], Series::one(order));
    let mut out = Vec::with_capacity(gs.len());
    for g in gs {
        if g.laurent {
            return Err(Error::NegativeExponent(vec![]));
        }
        let mut r = Series::zero(order);
        for (e, c) in &g.terms {
            // Arguments have no constant term, so x^e contributes only in
            // degrees ≥ |e|.
            if !within(order, degree(e)) {
                continue;
            }
            let m = monomial_value(*e, args, &mut cache, order);
            for (q, a) in &m.terms {
                r.add_term(*q, a * c);
            }
        }
        out.push(r);
    }
    Ok(out)
}

fn monomial_value<'c, const V: usize, const W: usize>(
    e: [i32; V],
    args: &[Series<W>; V],
    cache: &'c mut HashMap<[i32; V], Series<W>>,
    order: Option<i32>,
) -> &'c Series<W> {
    if !cache.contains_key(&e) {
        let j = (0..V).rev().find(|&k| e[k] > 0).expect("nonzero exponent");
        let mut prev = e;
        prev[j] -= 1;
        monomial_value(prev, args, cache, order);
        let v = cache[&prev].mul_unchecked(&args[j], order);
        cache.insert(e, v);
    }
    &cache[&e]
}

/// Polynomial map ℝᵛ → ℝᵛ given by its component series; used for φ, ψ∘φ
/// and formal inverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapJet<const V: usize> {
    pub components: [Series<V>; V],
}

pub type MapJet4 = MapJet<4>;

impl<const V: usize> MapJet<V> {
    /// Validates: no constant terms, nonnegative exponents, shared order.
    pub fn new(components: [Series<V>; V]) -> Result<Self> {
        let order = components[0].order;
        for (i, c) in components.iter().enumerate() {
            if c.order != order {
                return Err(Error::OrderMismatch(order, c.order));
            }
            if c.laurent {
                return Err(Error::NegativeExponent(vec![i as i32]));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::ConstantTerm(i));
            }
        }
        Ok(MapJet { components })
    }

    pub fn identity(order: i32) -> Self {
        MapJet { components: std::array::from_fn(|i| Series::variable(i, order)) }
    }

    /// `x ↦ M x`.
    pub fn linear(m: &QMatrix, order: i32) -> Self {
        let x: [Series<V>; V] = std::array::from_fn(|i| Series::variable(i, order));
        MapJet { components: apply_matrix(m, &x) }
    }

    pub fn order(&self) -> Option<i32> {
        self.components[0].order
    }

    /// Matrix of degree-1 coefficients (the differential at the origin).
    pub fn linear_part(&self) -> QMatrix {
        let mut m = QMatrix::zeros(V, V);
        for i in 0..V {
            for j in 0..V {
                let mut e = [0; V];
                e[j] = 1;
                m[(i, j)] = self.components[i].coeff(&e);
            }
        }
        m
    }

    /// Components with their linear parts removed.
    pub fn nonlinear_part(&self) -> [Series<V>; V] {
        std::array::from_fn(|i| self.components[i].filter(|e| degree(e) >= 2))
    }

    pub fn with_order(&self, order: i32) -> Self {
        MapJet { components: std::array::from_fn(|i| self.components[i].with_order(order)) }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &MapJet<V>) -> Result<MapJet<V>> {
        let gs: Vec<&Series<V>> = self.components.iter().collect();
        let r = compose_many(&gs, &inner.components)?;
        Ok(MapJet { components: r.try_into().expect("V components") })
    }

    /// Formal inverse through the truncation order.
    ///
    /// Writing the map as `L x + Q(x)`, the inverse solves
    /// `H = L⁻¹ (x − Q(H))`; each pass fixes one more degree, so the
    /// iteration runs degree by degree with the products truncated to the
    /// degree being settled.
    pub fn invert(&self) -> Result<MapJet<V>> {
        let n = self.order().ok_or_else(|| Error::Invalid("inversion needs a truncation order".into()))?;
        let l_inv = self.linear_part().inverse().ok_or(Error::SingularLinearPart)?;
        let q = self.nonlinear_part();
        let qs: Vec<&Series<V>> = q.iter().collect();
        let mut h = MapJet::<V>::linear(&l_inv, 1).components;
        for d in 2..=n {
            let h_d: [Series<V>; V] = std::array::from_fn(|i| h[i].with_order(d));
            let qh = compose_many(&qs, &h_d)?;
            let rhs: [Series<V>; V] =
                std::array::from_fn(|i| Series::variable(i, d).sub(&qh[i]));
            h = apply_matrix(&l_inv, &rhs);
        }
        let components = std::array::from_fn(|i| h[i].with_order(n));
        Ok(MapJet { components })
    }
}

/// `(M s)_i = Σ_j M_ij s_j` for a vector of series.
pub fn apply_matrix<const V: usize, const W: usize>(m: &QMatrix, s: &[Series<W>; V]) -> [Series<W>; V] {
    std::array::from_fn(|i| {
        let mut acc = Series::zero(s[0].order);
        for (j, sj) in s.iter().enumerate() {
            let c = &m[(i, j)];
            if !c.is_zero() {
                acc = acc.add(&sj.scale(c));
            }
        }
        acc
    })
}

/// One serialized term: `{"exp": [..], "coeff": "p/q"}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermRecord {
    pub exp: Vec<i32>,
    pub coeff: String,
}

impl<const V: usize> Series<V> {
    /// Records sorted lexicographically by exponent.
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|(e, c)| TermRecord { exp: e.to_vec(), coeff: format_rational(c) })
            .collect()
    }

    pub fn from_records(records: &[TermRecord], order: impl Into<Option<i32>>) -> Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            let e: [i32; V] = r
                .exp
                .clone()
                .try_into()
                .map_err(|_| Error::Parse(format!("exponent {:?} must have {V} entries", r.exp)))?;
            terms.push((e, parse_rational(&r.coeff)?));
        }
        Ok(Self::from_laurent_terms(terms, order).normalize_flag())
    }

    fn normalize_flag(mut self) -> Self {
        self.laurent = self.terms.keys().any(|e| e.iter().any(|&q| q < 0));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_records()).expect("records serialize")
    }
}

const NAMES2: [&str; 2] = ["t", "s"];
const NAMES4: [&str; 4] = ["x", "u", "y", "v"];

impl<const V: usize> fmt::Display for Series<V> {
    /// Human-readable sum in graded order, e.g. `-3*t^3 - t*s^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names: Vec<String> = match V {
            2 => NAMES2.iter().map(|s| s.to_string()).collect(),
            4 => NAMES4.iter().map(|s| s.to_string()).collect(),
            _ => (0..V).map(|i| format!("x{i}")).collect(),
        };
        let mut keys: Vec<&[i32; V]> = self.terms.keys().collect();
        keys.sort_by_key(|e| (degree(*e), std::cmp::Reverse(**e)));
        for (n, e) in keys.into_iter().enumerate() {
            let c = &self.terms[e];
            let neg = c < &Rational::zero();
            let a = if neg { -c.clone() } else { c.clone() };
            match (n, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = (0..V)
                .filter(|&k| e[k] != 0)
                .map(|k| if e[k] == 1 { names[k].clone() } else { format!("{}^{}", names[k], e[k]) })
                .collect();
            if vars.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{a}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn s2(terms: &[([i32; 2], i64, i64)], n: i32) -> Series2 {
        Series::from_laurent_terms(terms.iter().map(|&(e, p, q)| (e, rat(p, q))), n).normalize_flag()
    }

    #[test]
    fn telescoping_product() {
        let a = s2(&[([0, 0], 1, 1), ([1, 0], 1, 1)], 5);
        let b = s2(&[([0, 0], 1, 1), ([1, 0], -1, 1)], 5);
        assert_eq!(a.mul(&b).unwrap(), s2(&[([0, 0], 1, 1), ([2, 0], -1, 1)], 5));
    }

    #[test]
    fn canonical_exponent_addition() {
        let a = s2(&[([1, -1], 1, 1)], 5);
        assert!(a.is_laurent());
        let b = Series2::variable(1, 5);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.iter().collect::<Vec<_>>(), vec![(&[1, 0], &int(1))]);
    }

    #[test]
    fn monomial_square() {
        let ts = s2(&[([1, 1], 1, 1)], 5);
        assert_eq!(ts.mul(&ts).unwrap(), s2(&[([2, 2], 1, 1)], 5));
    }

    #[test]
    fn product_truncates() {
        let ts = s2(&[([1, 1], 1, 1)], 3);
        assert!(ts.mul(&ts).unwrap().is_zero());
    }

    #[test]
    fn mismatched_orders_rejected() {
        let a = Series2::variable(0, 3);
        let b = Series2::variable(0, 4);
        assert!(matches!(a.mul(&b), Err(Error::OrderMismatch(..))));
    }

    #[test]
    fn partials() {
        let ts = s2(&[([1, 1], 1, 1)], 5);
        assert_eq!(ts.partial(0), s2(&[([0, 1], 1, 1)], 4));
        let t2s3 = s2(&[([2, 3], 1, 1)], 5);
        assert_eq!(t2s3.partial(1), s2(&[([2, 2], 3, 1)], 4));
    }

    #[test]
    fn compose_substitutes_monomials() {
        let g = Series4::from_terms([([2, 0, 0, 0], int(1))], None).unwrap();
        let args = [
            s2(&[([1, 1], 1, 1)], 7),
            Series2::zero(7),
            Series2::zero(7),
            Series2::zero(7),
        ];
        assert_eq!(compose(&g, &args).unwrap(), s2(&[([2, 2], 1, 1)], 7));

        let g = Series4::from_terms([([0, 2, 0, 0], rat(9, 4))], None).unwrap();
        let args = [
            Series2::zero(7),
            s2(&[([3, 0], 2, 3)], 7),
            Series2::zero(7),
            Series2::zero(7),
        ];
        assert_eq!(compose(&g, &args).unwrap(), s2(&[([6, 0], 1, 1)], 7));
    }

    #[test]
    fn compose_rejects_constant_argument() {
        let g = Series4::variable(0, None);
        let mut args: [Series2; 4] = std::array::from_fn(|_| Series2::zero(5));
        args[2] = Series2::one(5);
        assert!(matches!(compose(&g, &args), Err(Error::ConstantTerm(2))));
    }

    #[test]
    fn invert_perturbation() {
        // (x, u + a v², y, v)⁻¹ = (x, u − a v², y, v)
        let a = rat(1, 3);
        let mut phi = MapJet4::identity(6);
        phi.components[1] = phi.components[1].add(&Series4::monomial([0, 0, 0, 2], a.clone(), 6));
        let inv = phi.invert().unwrap();
        let mut expect = MapJet4::identity(6);
        expect.components[1] = expect.components[1].add(&Series4::monomial([0, 0, 0, 2], -a, 6));
        assert_eq!(inv, expect);
    }

    #[test]
    fn invert_block_linear() {
        // [[I,0],[E,G]]⁻¹ = [[I,0],[−G⁻¹E, G⁻¹]]
        let e = QMatrix::from_i64(&[&[1, 2], &[0, -1]]);
        let g = QMatrix::from_i64(&[&[1, 1], &[1, 2]]);
        let i2 = QMatrix::identity(2);
        let z = QMatrix::zeros(2, 2);
        let m = QMatrix::from_blocks(&i2, &z, &e, &g);
        let inv = MapJet4::linear(&m, 4).invert().unwrap();
        let gi = g.inverse().unwrap();
        let expect = QMatrix::from_blocks(&i2, &z, &gi.mul(&e).scale(&int(-1)), &gi);
        assert_eq!(inv.linear_part(), expect);
        assert!(inv.nonlinear_part().iter().all(Series::is_zero));
    }

    #[test]
    fn display_and_records() {
        let a = s2(&[([3, 0], -3, 1), ([1, 2], -1, 1), ([5, 0], -3, 1)], 7);
        assert_eq!(a.to_string(), "-3*t^3 - t*s^2 - 3*t^5");
        let recs = a.to_records();
        assert_eq!(recs[0].exp, vec![1, 2]);
        assert_eq!(Series2::from_records(&recs, 7).unwrap(), a);
    }
}
