//! Univariate polynomials over ℚ with Sturm-sequence root isolation.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::rational::{int, sign, to_f64, Rational};
use crate::{Error, Result};

/// Dense coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rational>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| int(x)).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial has none.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn lead(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + to_f64(c))
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c * int(k as i64)).collect())
    }

    fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&(Rational::one() / self.lead()))
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.coeffs.len() - 1;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::zero(); r.len() - dd];
        let lead = d.lead();
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `p / gcd(p, p′)`: same roots, all simple.
    pub fn squarefree(&self) -> UniPoly {
        let g = self.gcd(&self.derivative());
        if g.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        self.div_rem(&g).0
    }

    /// `p₀ = p, p₁ = p′, p_{k+1} = −rem(p_{k−1}, p_k)`.
    pub fn sturm_sequence(&self) -> Vec<UniPoly> {
        let mut seq = vec![self.clone(), self.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1.neg();
            seq.push(r);
        }
        seq.pop();
        seq
    }

    /// Cauchy bound: every real root has `|x| < bound`.
    pub fn root_bound(&self) -> Rational {
        let lead = self.lead().abs();
        let m = self.coeffs[..self.coeffs.len() - 1].iter().map(|c| c.abs() / &lead).max().unwrap_or_else(Rational::zero);
        m + Rational::one()
    }

    /// Max-abs coefficient norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(c).abs()).fold(0.0, f64::max)
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("{c}"),
                1 => format!("{c}*y"),
                _ => format!("{c}*y^{k}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn variations(seq: &[UniPoly], x: &Rational) -> usize {
    count_changes(seq.iter().map(|p| sign(&p.eval(x))))
}

fn variations_at_infinity(seq: &[UniPoly], positive: bool) -> usize {
    count_changes(seq.iter().map(|p| {
        let s = sign(&p.lead());
        let odd = p.degree().unwrap_or(0) % 2 == 1;
        if !positive && odd {
            -s
        } else {
            s
        }
    }))
}

fn count_changes(signs: impl Iterator<Item = i32>) -> usize {
    let mut last = 0;
    let mut n = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Number of distinct real roots in `(a, b]`.
fn count_in(seq: &[UniPoly], a: &Rational, b: &Rational) -> usize {
    variations(seq, a) - variations(seq, b)
}

/// A real root pinned to `(lo, hi]`, or exactly `lo = hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn approx(&self) -> f64 {
        to_f64(&((&self.lo + &self.hi) / int(2)))
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / int(2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootReport {
    pub lo: String,
    pub hi: String,
    pub approx: f64,
}

impl From<&RootInterval> for RootReport {
    fn from(r: &RootInterval) -> Self {
        RootReport { lo: crate::rational::format_rational(&r.lo), hi: crate::rational::format_rational(&r.hi), approx: r.approx() }
    }
}

pub fn default_width() -> Rational {
    Rational::new(BigInt::one(), num_traits::pow(BigInt::from(10), 12))
}

/// Isolates every distinct real root of `p` and refines each interval to
/// width ≤ `width`. Intervals come out in increasing order.
pub fn isolate_real_roots_to(p: &UniPoly, width: &Rational) -> Result<Vec<RootInterval>> {
    if p.is_zero() {
        return Err(Error::Invalid("cannot isolate the roots of the zero polynomial".into()));
    }
    let sf = p.squarefree();
    if sf.degree() == Some(0) {
        return Ok(vec![]);
    }
    let seq = sf.sturm_sequence();
    let total = variations_at_infinity(&seq, false) - variations_at_infinity(&seq, true);
    let bound = sf.root_bound();
    let mut pending = vec![(-bound.clone(), bound)];
    let mut found = Vec::new();
    while let Some((a, b)) = pending.pop() {
        let n = count_in(&seq, &a, &b);
        if n == 0 {
            continue;
        }
        if n == 1 {
            found.push(refine(&sf, &seq, RootInterval { lo: a, hi: b }, width));
            continue;
        }
        let m = (&a + &b) / int(2);
        pending.push((a, m.clone()));
        pending.push((m, b));
    }
    found.sort_by(|x, y| x.lo.cmp(&y.lo));
    debug_assert_eq!(found.len(), total);
    Ok(found)
}

pub fn isolate_real_roots(p: &UniPoly) -> Result<Vec<RootInterval>> {
    isolate_real_roots_to(p, &default_width())
}

/// Bisects a single-root interval of the squarefree `p` down to `width`.
fn refine(p: &UniPoly, seq: &[UniPoly], mut r: RootInterval, width: &Rational) -> RootInterval {
    if p.eval(&r.hi).is_zero() {
        return RootInterval { lo: r.hi.clone(), hi: r.hi };
    }
    while r.width() > *width {
        let m = r.midpoint();
        if p.eval(&m).is_zero() {
            return RootInterval { lo: m.clone(), hi: m };
        }
        if count_in(seq, &r.lo, &m) == 1 {
            r.hi = m;
        } else {
            r.lo = m;
        }
    }
    r
}

/// Sign of `q` at the unique root of `p` inside `root`, decided exactly:
/// zero when `gcd(p, q)` vanishes there, otherwise the interval is shrunk
/// until `q` has no root in it and `q` is evaluated at an endpoint.
pub fn sign_at_root(p: &UniPoly, root: &RootInterval, q: &UniPoly) -> i32 {
    if q.is_zero() {
        return 0;
    }
    if root.is_exact() {
        return sign(&q.eval(&root.lo));
    }
    let g = p.gcd(q);
    if g.degree().unwrap_or(0) > 0 {
        let gseq = g.squarefree().sturm_sequence();
        if count_in(&gseq, &root.lo, &root.hi) > 0 {
            return 0;
        }
    }
    let sf = p.squarefree();
    let pseq = sf.sturm_sequence();
    let qsf = q.squarefree();
    let qseq = qsf.sturm_sequence();
    let mut r = root.clone();
    loop {
        if qsf.degree() == Some(0) || count_in(&qseq, &r.lo, &r.hi) == 0 {
            return sign(&q.eval(&r.hi));
        }
        let m = r.midpoint();
        if sf.eval(&m).is_zero() {
            return sign(&q.eval(&m));
        }
        if count_in(&pseq, &r.lo, &m) == 1 {
            r.hi = m;
        } else {
            r.lo = m;
        }
    }
}
