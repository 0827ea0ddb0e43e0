//! Property suites, run with a deterministic RNG so the acceptance runner
//! and the test target see the same cases.

use std::collections::BTreeSet;
use std::fmt::Debug;

use num_traits::{Signed, Zero};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use umbrella::analysis::{discriminant_identity_exact, isolate_real_roots, UniPoly};
use umbrella::foliation::{characteristic_field, DeformationJet, JetSampler};
use umbrella::newton::{newton_diagram, NewtonDiagram};
use umbrella::rational::{int, rat};
use umbrella::series::{compose, MapJet};
use umbrella::{QMatrix, Rational, Series2};

pub const ORDER: i32 = 6;

/// Runs `test` on `cases` values of `strategy`; the error names the
/// shrunk counterexample.
pub fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: Debug,
{
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

/// One value of `strategy` from the deterministic RNG.
pub fn sample<S: Strategy>(strategy: S) -> S::Value {
    let mut runner = TestRunner::new_with_rng(Config::default(), TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    strategy.new_tree(&mut runner).unwrap().current()
}

fn term() -> impl Strategy<Value = ([i32; 2], Rational)> {
    (0..4i32, 0..4i32, -6..=6i64, 1..=4i64).prop_map(|(a, b, n, d)| ([a, b], rat(n, d)))
}

fn series_with(order: Option<i32>) -> impl Strategy<Value = Series2> {
    prop::collection::vec(term(), 0..6).prop_map(move |ts| Series2::from_terms(ts, order).unwrap())
}

/// No constant term, so it can be substituted.
fn substitutable(order: Option<i32>) -> impl Strategy<Value = Series2> {
    prop::collection::vec(term(), 1..5)
        .prop_map(move |ts| Series2::from_terms(ts.into_iter().filter(|(e, _)| e[0] + e[1] > 0), order).unwrap())
}

fn point() -> impl Strategy<Value = [Rational; 2]> {
    ((-5..=5i64, 1..=3i64), (-5..=5i64, 1..=3i64)).prop_map(|((a, b), (c, d))| [rat(a, b), rat(c, d)])
}

pub fn ring_laws(cases: u32) -> Result<(), String> {
    let s = || series_with(Some(ORDER));
    check(cases, (s(), s(), s()), |(a, b, c)| {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c)).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()));
        prop_assert_eq!(a.add(&b).sub(&b), a);
        Ok(())
    })
}

/// Untruncated arithmetic and composition agree with pointwise evaluation.
pub fn evaluation(cases: u32) -> Result<(), String> {
    let strategy = (series_with(None), series_with(None), substitutable(None), substitutable(None), point());
    check(cases, strategy, |(a, b, g0, g1, x)| {
        let (ea, eb) = (a.eval_exact(&x), b.eval_exact(&x));
        prop_assert_eq!(a.mul(&b).unwrap().eval_exact(&x), &ea * &eb);
        prop_assert_eq!(a.add(&b).eval_exact(&x), ea + eb);
        let g = [g0, g1];
        let y = [g[0].eval_exact(&x), g[1].eval_exact(&x)];
        prop_assert_eq!(compose(&a, &g).unwrap().eval_exact(&x), a.eval_exact(&y));
        Ok(())
    })
}

pub fn chain_rule(cases: u32) -> Result<(), String> {
    let strategy = (series_with(Some(ORDER)), substitutable(Some(ORDER)), substitutable(Some(ORDER)), 0..2usize);
    check(cases, strategy, |(f, g0, g1, j)| {
        let g = [g0, g1];
        let lhs = compose(&f, &g).unwrap().partial(j).with_order(ORDER - 1);
        let mut rhs = Series2::zero(ORDER - 1);
        for (i, gi) in g.iter().enumerate() {
            let outer = compose(&f.partial(i), &g).unwrap().with_order(ORDER - 1);
            rhs = rhs.add(&outer.mul(&gi.partial(j)).unwrap());
        }
        prop_assert_eq!(lhs, rhs.with_order(ORDER - 1));
        Ok(())
    })
}

pub fn inversion(cases: u32) -> Result<(), String> {
    let linear = (-3..=3i64, -3..=3i64, -3..=3i64, -3..=3i64).prop_filter("invertible", |(a, b, c, d)| a * d != b * c);
    let strategy = (linear, prop::collection::vec(term(), 0..4), prop::collection::vec(term(), 0..4));
    check(cases, strategy, |(l, q0, q1)| {
        let nonlinear = |ts: Vec<([i32; 2], Rational)>| ts.into_iter().filter(|(e, _)| e[0] + e[1] >= 2);
        let x = Series2::variable(0, ORDER);
        let y = Series2::variable(1, ORDER);
        let c0 = x.scale(&int(l.0)).add(&y.scale(&int(l.1))).add(&Series2::from_terms(nonlinear(q0), ORDER).unwrap());
        let c1 = x.scale(&int(l.2)).add(&y.scale(&int(l.3))).add(&Series2::from_terms(nonlinear(q1), ORDER).unwrap());
        let map = MapJet::new([c0, c1]).unwrap();
        let inv = map.invert().unwrap();
        prop_assert_eq!(map.compose(&inv).unwrap(), MapJet::identity(ORDER));
        prop_assert_eq!(inv.compose(&map).unwrap(), MapJet::identity(ORDER));
        Ok(())
    })
}

// --- Newton diagram against a brute-force hull ------------------------------

/// Whether some weight `w = (λ, 1 − λ)`, `0 < λ < 1`, makes `p` the unique
/// minimiser of `⟨w, q⟩` over the support: exactly the vertices of the
/// lower-left chain.
fn is_chain_vertex(p: [i32; 2], support: &BTreeSet<[i32; 2]>) -> bool {
    let mut lo = Rational::zero();
    let mut hi = int(1);
    for q in support.iter().filter(|&&q| q != p) {
        // λ(a − b) + b > 0
        let (a, b) = (int((q[0] - p[0]) as i64), int((q[1] - p[1]) as i64));
        let slope = &a - &b;
        if slope.is_zero() {
            if !b.is_positive() {
                return false;
            }
        } else {
            let bound = -&b / &slope;
            if slope.is_positive() {
                lo = lo.max(bound);
            } else {
                hi = hi.min(bound);
            }
        }
    }
    lo < hi
}

pub fn oracle_vertices(support: &BTreeSet<[i32; 2]>) -> Vec<[i32; 2]> {
    let mut v: Vec<[i32; 2]> = support.iter().copied().filter(|&p| is_chain_vertex(p, support)).collect();
    v.sort_by_key(|p| std::cmp::Reverse(p[0]));
    v
}

pub fn check_diagram(d: &NewtonDiagram, support: &BTreeSet<[i32; 2]>) -> Result<(), TestCaseError> {
    prop_assert_eq!(&d.vertices, &oracle_vertices(support));
    prop_assert_eq!(d.edges.len() + 1, d.vertices.len());
    for (k, e) in d.edges.iter().enumerate() {
        prop_assert_eq!((e.from, e.to), (d.vertices[k], d.vertices[k + 1]));
        let (dx, dy) = (e.to[0] - e.from[0], e.to[1] - e.from[1]);
        let g = num_integer::gcd(dx, dy);
        prop_assert_eq!(e.r, [dx / g, dy / g]);
        prop_assert!(e.r[0] < 0 && e.r[1] > 0);
        // Every support point lies on or above the edge's line.
        for q in support {
            let n = [e.r[1] as i64, -e.r[0] as i64];
            prop_assert!(n[0] * (q[0] - e.from[0]) as i64 + n[1] * (q[1] - e.from[1]) as i64 >= 0);
        }
    }
    Ok(())
}

pub fn diagrams(cases: u32) -> Result<(), String> {
    let support = prop::collection::btree_set((-1..7i32, -1..7i32).prop_map(|(a, b)| [a, b]), 1..=12);
    check(cases, support, |pts| check_diagram(&newton_diagram(&pts).unwrap(), &pts))
}

pub fn quadratic_roots(cases: u32) -> Result<(), String> {
    let strategy = (-20..=20i64, -40..=40i64, -20..=20i64).prop_filter("quadratic", |(a, _, _)| *a != 0);
    check(cases, strategy, |(a, b, c)| {
        let roots = isolate_real_roots(&UniPoly::from_i64(&[c, b, a])).unwrap();
        let disc = b * b - 4 * a * c;
        let expected: Vec<f64> = if disc < 0 {
            vec![]
        } else if disc == 0 {
            vec![-(b as f64) / (2.0 * a as f64)]
        } else {
            // The cancellation-free pair.
            let sign = if b >= 0 { 1.0 } else { -1.0 };
            let q = -0.5 * (b as f64 + sign * (disc as f64).sqrt());
            let mut r = vec![q / a as f64, c as f64 / q];
            r.sort_by(f64::total_cmp);
            r
        };
        prop_assert_eq!(roots.len(), expected.len());
        for (r, x) in roots.iter().zip(&expected) {
            prop_assert!((r.approx() - x).abs() <= 1e-12, "{} vs {}", r.approx(), x);
        }
        Ok(())
    })
}

pub fn discriminant_identity(cases: u32) -> Result<(), String> {
    let q = |lo: i64, hi: i64| (lo..=hi, 1..=8i64).prop_map(|(n, d)| rat(n, d));
    let strategy = (q(1, 40), q(-40, 40).prop_filter("g12 ≠ 0", |g| !g.is_zero()), q(1, 40));
    check(cases, strategy, |(g11, g12, g22)| {
        let g = QMatrix::from_rows(vec![vec![g11, g12.clone()], vec![g12, g22]]).unwrap();
        prop_assert!(discriminant_identity_exact(&g).unwrap().is_zero());
        Ok(())
    })
}

pub fn jet_round_trip(cases: u32) -> Result<(), String> {
    check(cases, any::<u64>(), |seed| {
        let jet = JetSampler::default().jet(&mut ChaCha8Rng::seed_from_u64(seed));
        prop_assert_eq!(DeformationJet::from_json(&jet.to_json()).unwrap(), jet);
        Ok(())
    })
}

/// The pipeline against the inversion-free Jacobian route; each case runs
/// the full exact computation twice.
pub fn jacobian_route(cases: u32) -> Result<(), String> {
    check(cases, any::<u64>(), |seed| {
        let sampler = JetSampler { higher_terms: 4, ..Default::default() };
        let jet = sampler.jet(&mut ChaCha8Rng::seed_from_u64(seed));
        let order = 6;
        let field = characteristic_field(&jet, order).unwrap();
        let (alpha, beta) = super::jacobian_route_field(&jet, order);
        prop_assert_eq!(field.alpha, alpha);
        prop_assert_eq!(field.beta, beta);
        Ok(())
    })
}
