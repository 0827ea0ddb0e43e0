//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 3 and 6 fail on the mathematics, not the code; see
//! `KNOWN_FAILURES`. The binary exits nonzero if any other criterion fails,
//! or if a known failure starts passing (so the list cannot go stale).

mod common;

use std::process::ExitCode;
use std::sync::OnceLock;
use std::time::Instant;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use umbrella::analysis::{
    analyze, discriminant_identity_exact, edge_power_transform, edge_truncate, Classification, SeparatrixKind,
};
use umbrella::foliation::{
    characteristic_field, coefficient_formulas, derive_linear_data, extract_coefficients, linear_part_coefficients,
    CharField, DeformationJet, FormulaInputs, HigherTerm, JetMode, JetSampler,
};
use umbrella::newton::{newton_diagram, PlanarField};
use umbrella::numerics::{
    check_transversality, model_field, verify_claim, verify_separatrix, IntegratorConfig, PolyField,
};
use umbrella::rational::{int, rat, to_f64};
use umbrella::{QMatrix, Rational, Series2};

use common::props;

const ORDER: i32 = 7;
/// Everything the sampled jets are checked on lives in degree ≤ 4; one
/// order above the minimum keeps the run short.
const SAMPLE_ORDER: i32 = 6;
const JETS: usize = 100;
const JET_SEED: u64 = 20_240_611;

const KNOWN_FAILURES: &[(u32, &str)] = &[
    (3, "the stated closed forms for α₀₂, β₁₂, β₀₃ carry degree-2 terms of φ that cancel in the exact field; \
         the exact coefficients match the linear-part forms instead"),
    (6, "a generic jet has α₀₂ ≠ 0, which puts a saddle-node on the edge (0,1)–(−1,2); \
         its parabolic sector is an open family of orbits entering along s = (2g₁₂/α₀₂)t"),
];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

struct Sample {
    jet: DeformationJet,
    g: QMatrix,
    field: CharField,
}

/// The seeded generic jets shared by criteria 3–8.
fn samples() -> &'static [Sample] {
    static CELL: OnceLock<Vec<Sample>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(JET_SEED);
        let sampler = JetSampler::default();
        (0..JETS)
            .map(|_| {
                let jet = sampler.generic_jet(&mut rng);
                let g = derive_linear_data(&jet).unwrap().g;
                let field = characteristic_field(&jet, SAMPLE_ORDER).unwrap();
                Sample { jet, g, field }
            })
            .collect()
    })
}

fn series(terms: &[([i32; 2], Rational)]) -> Series2 {
    Series2::from_terms(terms.iter().cloned(), ORDER).unwrap()
}

fn laurent(terms: &[([i32; 2], Rational)]) -> Series2 {
    Series2::from_laurent_terms(terms.iter().cloned(), None)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = characteristic_field(&DeformationJet::identity(), ORDER).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let alpha = series(&[([3, 0], int(-3)), ([1, 2], int(-1)), ([5, 0], int(-3))]);
    let beta = series(&[([0, 3], int(1)), ([2, 1], int(4)), ([4, 1], int(7))]);
    let exact = f.alpha == alpha && f.beta == beta;
    outcome(exact && secs < 1.0, format!("exact = {exact}, {secs:.3} s"))
}

fn criterion_2() -> Outcome {
    let bump = HigherTerm { component: 1, exp: [0, 0, 0, 2], coeff: rat(1, 3) };
    let jet = DeformationJet::from_matrix(&QMatrix::identity(4), vec![bump], JetMode::LinearSymplecticOnly).unwrap();
    let f = characteristic_field(&jet, ORDER).unwrap();
    let alpha = series(&[
        ([3, 0], int(-3)),
        ([1, 2], int(-1)),
        ([5, 0], int(-3)),
        ([2, 2], rat(-4, 3)),
        ([3, 2], rat(-4, 3)),
    ]);
    let beta = series(&[([2, 1], int(4)), ([0, 3], int(1)), ([4, 1], int(7)), ([5, 1], int(4))]);
    outcome(f.alpha == alpha && f.beta == beta, format!("alpha = {}; beta = {}", f.alpha, f.beta))
}

fn criterion_3() -> Outcome {
    let mut stated_ok = 0;
    let mut linear_ok = 0;
    let mut bad: std::collections::BTreeMap<&str, usize> = Default::default();
    for s in samples() {
        let coeffs = extract_coefficients(&s.field);
        let stated = coefficient_formulas(&FormulaInputs::from_jet(&s.jet).unwrap());
        let mismatches = coeffs.mismatches(&stated);
        if mismatches.is_empty() {
            stated_ok += 1;
        }
        for m in mismatches {
            *bad.entry(m).or_default() += 1;
        }
        let data = derive_linear_data(&s.jet).unwrap();
        if coeffs.mismatches(&linear_part_coefficients(&data)).is_empty() {
            linear_ok += 1;
        }
    }
    outcome(
        stated_ok == JETS,
        format!("stated forms exact on {stated_ok}/{JETS} (mismatches {bad:?}); linear-part forms exact on {linear_ok}/{JETS}"),
    )
}

fn criterion_4() -> Outcome {
    let standard = characteristic_field(&DeformationJet::identity(), ORDER).unwrap().canonical;
    let support = standard.support();
    let d = newton_diagram(&support).unwrap();
    let standard_ok =
        d.vertices == [[2, 0], [0, 2]] && d.edges.len() == 1 && support.contains(&[4, 0]) && !d.vertices.contains(&[4, 0]);

    let want = vec![[4, -1], [0, 1], [-1, 2]];
    let generic_ok = samples()
        .iter()
        .filter(|s| {
            let d = newton_diagram(&s.field.canonical.support()).unwrap();
            d.vertices == want && d.edges.len() == 2
        })
        .count();
    outcome(
        standard_ok && generic_ok == JETS,
        format!("standard {:?}; generic {{(4,-1),(0,1),(-1,2)}} on {generic_ok}/{JETS}", d.vertices),
    )
}

fn criterion_5() -> Outcome {
    let f = characteristic_field(&DeformationJet::identity(), ORDER).unwrap().canonical;
    let d = newton_diagram(&f.support()).unwrap();
    let e = edge_power_transform(&f, &d, 0).unwrap();
    let want = PlanarField::new(
        laurent(&[([0, 0], int(-3)), ([0, 2], int(-1)), ([2, 0], int(-3))]),
        laurent(&[([0, 0], int(7)), ([0, 2], int(2)), ([2, 0], int(10))]),
    );
    let standard_ok = e.transformed.f1 == want.f1 && e.transformed.f2 == want.f2;

    // y₁(−2g₁₂y₂ − 3g₂₂), y₂(4g₁₂y₂ + (6g₂₂ + 4g₁₁) + 6g₁₂/y₂)
    let generic_ok = samples()
        .iter()
        .filter(|s| {
            let f = &s.field.canonical;
            let d = newton_diagram(&f.support()).unwrap();
            let e = edge_power_transform(&edge_truncate(f, &d, 0).unwrap(), &d, 0).unwrap();
            let (g11, g12, g22) = (&s.g[(0, 0)], &s.g[(0, 1)], &s.g[(1, 1)]);
            let f1 = laurent(&[([0, 1], int(-2) * g12), ([0, 0], int(-3) * g22)]);
            let f2 = laurent(&[
                ([0, 1], int(4) * g12),
                ([0, 0], int(6) * g22 + int(4) * g11),
                ([0, -1], int(6) * g12),
            ]);
            e.transformed.f1 == f1 && e.transformed.f2 == f2
        })
        .count();
    outcome(standard_ok && generic_ok == JETS, format!("standard exact = {standard_ok}; generic exact on {generic_ok}/{JETS}"))
}

fn criterion_6() -> Outcome {
    let standard = analyze(&characteristic_field(&DeformationJet::identity(), ORDER).unwrap().canonical, 0.05).unwrap();
    let kinds: Vec<_> = standard.separatrices.iter().map(|s| s.kind).collect();
    let standard_ok =
        standard.classification == Classification::Saddle && kinds == [SeparatrixKind::TAxis, SeparatrixKind::SAxis];

    let (mut saddle, mut other, mut unresolved, mut parabolas) = (0, 0, 0, 0);
    for s in samples() {
        let p = analyze(&s.field.canonical, 0.05).unwrap();
        match p.classification {
            Classification::Saddle => saddle += 1,
            Classification::Other => other += 1,
            Classification::Unresolved => unresolved += 1,
        }
        if p.separatrices.iter().filter(|s| s.power == Some(2)).count() == 2 {
            parabolas += 1;
        }
    }
    outcome(
        standard_ok && saddle == JETS && unresolved == 0,
        format!(
            "standard SADDLE with axes = {standard_ok}; generic SADDLE {saddle}, OTHER {other}, UNRESOLVED {unresolved} \
             of {JETS}; both s = c±t² found on {parabolas}/{JETS}"
        ),
    )
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let claim = verify_claim(10_000, JET_SEED);
    let secs = start.elapsed().as_secs_f64();
    let exact = samples().iter().all(|s| discriminant_identity_exact(&s.g).unwrap().is_zero());
    let ok = claim.passed
        && claim.violations == 0
        && claim.max_symplectic_residual <= 1e-9
        && claim.max_identity_residual <= 1e-9
        && exact
        && secs < 30.0;
    outcome(
        ok,
        format!(
            "{} admitted, {} not admitted, {} violations; residuals {:.1e} / {:.1e}; exact identity = {exact}; {secs:.2} s",
            claim.admitted, claim.not_admitted, claim.violations, claim.max_symplectic_residual, claim.max_identity_residual
        ),
    )
}

fn criterion_8() -> Outcome {
    let cfg = IntegratorConfig::with_epsilon(0.05);
    let mut checked = 0;
    let mut failed = Vec::new();
    for (k, s) in samples().iter().take(10).enumerate() {
        let (g11, g12, g22) = (to_f64(&s.g[(0, 0)]), to_f64(&s.g[(0, 1)]), to_f64(&s.g[(1, 1)]));
        let model = model_field(g11, g12, g22);
        let p = analyze(&s.field.canonical, 0.05).unwrap();
        for sep in p.separatrices.iter().filter(|s| s.power == Some(2)) {
            let (c, m) = sep.graph().unwrap();
            for t0 in [0.02, -0.02] {
                let rep = verify_separatrix(&model, c, m, t0, 1e-4, 1e-3, &cfg).unwrap();
                checked += 1;
                if !rep.passed {
                    failed.push(format!("jet {k} c = {c:.4} t0 = {t0}"));
                }
            }
        }
    }
    let standard_field = characteristic_field(&DeformationJet::identity(), ORDER).unwrap();
    let standard = analyze(&standard_field.canonical, 0.05).unwrap();
    let tr = check_transversality(&PolyField::from(&standard_field), &standard.separatrices, 1000, JET_SEED, &cfg);
    outcome(
        checked == 40 && failed.is_empty() && tr.passed && tr.min_radius > 0.0,
        format!(
            "{} of {checked} separatrix branches pass{}; standard field: {} seeds, {} violations, min radius {:.2e}",
            checked - failed.len(),
            if failed.is_empty() { String::new() } else { format!(" (failed: {failed:?})") },
            tr.samples,
            tr.violations,
            tr.min_radius
        ),
    )
}

fn criterion_9() -> Outcome {
    let suites: [(&str, fn(u32) -> Result<(), String>); 6] = [
        ("ring", props::ring_laws),
        ("chain rule", props::chain_rule),
        ("inversion", props::inversion),
        ("evaluation", props::evaluation),
        ("diagram vs hull", props::diagrams),
        ("quadratic roots", props::quadratic_roots),
    ];
    let mut failed = Vec::new();
    for (name, run) in suites {
        if let Err(e) = run(1000) {
            failed.push(format!("{name}: {e}"));
        }
    }
    let names: Vec<_> = suites.iter().map(|s| s.0).collect();
    outcome(failed.is_empty(), if failed.is_empty() { format!("1000 cases each: {names:?}") } else { failed.join("; ") })
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 9] = [
        (1, "golden undeformed field", criterion_1),
        (2, "golden perturbed field", criterion_2),
        (3, "coefficient closed forms", criterion_3),
        (4, "Newton diagrams", criterion_4),
        (5, "edge transforms", criterion_5),
        (6, "portrait classification", criterion_6),
        (7, "eigenvalue-sign Monte-Carlo", criterion_7),
        (8, "separatrix numerics", criterion_8),
        (9, "property suites", criterion_9),
    ];
    let mut unexpected = Vec::new();
    for (id, name, run) in criteria {
        let start = Instant::now();
        let o = run();
        let secs = start.elapsed().as_secs_f64();
        println!("criterion {id} {}: {name} [{secs:.1} s] {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        let known = KNOWN_FAILURES.iter().find(|k| k.0 == id);
        match (o.passed, known) {
            (false, Some((_, why))) => println!("    known failure: {why}"),
            (false, None) => unexpected.push(format!("criterion {id} failed")),
            (true, Some(_)) => unexpected.push(format!("criterion {id} passed but is listed as a known failure")),
            (true, None) => {}
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all criteria as expected ({} known failures)", KNOWN_FAILURES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {}", unexpected.join("; "));
        ExitCode::FAILURE
    }
}
