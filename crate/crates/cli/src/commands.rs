use std::f64::consts::TAU;
use std::fs;
use std::path::PathBuf;

use anyhow::Context as _;
use serde::Serialize;
use serde_json::{json, Value};
use umbrella::analysis::{analyze, cpm_closed_forms, Classification, Portrait, SeparatrixKind};
use umbrella::foliation::{
    characteristic_field, check_nonvanishing, coefficient_formulas, derive_linear_data, extract_coefficients,
    is_generic, linear_part_coefficients, CharField, DeformationJet, FormulaInputs, HigherTerm, JetMode,
};
use umbrella::newton::{newton_diagram, PlanarField};
use umbrella::numerics::{
    check_transversality, integrate_orbit, model_field, verify_claim, verify_separatrix, IntegratorConfig, OrbitTrace,
    PolyField, Swapped, VectorField,
};
use umbrella::rational::{format_rational, rat, to_f64};
use umbrella::{QMatrix, Series2};

use crate::svg::portrait_svg;
use crate::{Context, Failure, Format};

fn write_file(ctx: &Context, name: &str, contents: &str) -> anyhow::Result<PathBuf> {
    let dir = &ctx.config.out;
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(path)
}

fn pretty<T: Serialize + ?Sized>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn matrix_json(m: &QMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// The `--field` file if given, else the canonical form of the configured
/// jet's field.
fn load_field(ctx: &Context) -> anyhow::Result<PlanarField> {
    if let Some(p) = &ctx.field {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        return PlanarField::from_text(&text).with_context(|| format!("parsing {}", p.display()));
    }
    let jet = ctx.config.jet()?;
    Ok(characteristic_field(&jet, ctx.config.order)?.canonical)
}

pub fn derive(ctx: &Context) -> Result<(), Failure> {
    let jet = ctx.config.jet()?;
    let data = derive_linear_data(&jet)?;
    let field = characteristic_field(&jet, ctx.config.order)?;
    let coeffs = extract_coefficients(&field);
    let linear = linear_part_coefficients(&data);
    let stated = coefficient_formulas(&FormulaInputs::from_jet(&jet)?);
    println!("alpha = {}", field.alpha);
    println!("beta  = {}", field.beta);

    write_file(ctx, "field.txt", &field.canonical.to_text())?;
    if ctx.wants(Format::Json) {
        let series = json!({
            "order": ctx.config.order,
            "alpha": field.alpha.to_records(),
            "beta": field.beta.to_records(),
        });
        write_file(ctx, "field.json", &pretty(&series))?;
        let report = json!({
            "psi": matrix_json(&data.psi),
            "E": matrix_json(&data.e),
            "G": matrix_json(&data.g),
            "Delta": format_rational(&data.delta),
            "generic": is_generic(&data.g, &coeffs),
            "coefficients": coeffs.to_json(),
            "linear_part_forms": linear.to_json(),
            "linear_part_mismatches": coeffs.mismatches(&linear),
            "stated_form_mismatches": coeffs.mismatches(&stated),
        });
        write_file(ctx, "linear_data.json", &pretty(&report))?;
    }
    Ok(())
}

pub fn diagram(ctx: &Context) -> Result<(), Failure> {
    let field = load_field(ctx)?;
    let support = field.support();
    let diagram = newton_diagram(&support)?;
    println!("vertices: {:?}", diagram.vertices);
    if ctx.wants(Format::Json) {
        let edge_points: Vec<_> = (0..diagram.edges.len()).map(|k| diagram.points_on_edge(&support, k)).collect();
        let out = json!({
            "support": support,
            "vertices": diagram.vertices,
            "edges": diagram.edges,
            "edge_points": edge_points,
        });
        write_file(ctx, "diagram.json", &pretty(&out))?;
    }
    Ok(())
}

/// Seeds evenly spaced on a circle, kept off the axes.
fn ring(n: usize, radius: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|k| {
            let th = (k as f64 + 0.5) / n as f64 * TAU;
            [radius * th.cos(), radius * th.sin()]
        })
        .collect()
}

fn trace_both<F: VectorField>(field: &F, seed: [f64; 2], cfg: &IntegratorConfig) -> (OrbitTrace, OrbitTrace) {
    let p = (seed[0], seed[1]);
    (integrate_orbit(field, p, 1.0, cfg), integrate_orbit(field, p, -1.0, cfg))
}

/// Backward trace reversed, then forward: one polyline per seed.
fn polyline(fw: &OrbitTrace, bw: &OrbitTrace) -> Vec<(f64, f64)> {
    bw.samples.iter().rev().chain(fw.samples.iter().skip(1)).map(|p| (p[1], p[2])).collect()
}

fn sketch(ctx: &Context, field: &PolyField, portrait: Option<&Portrait>, seeds: &[[f64; 2]]) -> String {
    let cfg = ctx.config.integrator();
    let orbits: Vec<_> = seeds
        .iter()
        .map(|&s| {
            let (fw, bw) = trace_both(field, s, &cfg);
            polyline(&fw, &bw)
        })
        .collect();
    let seps = portrait.map(|p| p.separatrices.as_slice()).unwrap_or(&[]);
    portrait_svg(ctx.config.epsilon, seps, &orbits)
}

pub fn classify(ctx: &Context) -> Result<(), Failure> {
    let field = load_field(ctx)?;
    let eps = ctx.config.epsilon;
    let portrait = analyze(&field, eps)?;
    println!("classification: {}", portrait.classification);
    for s in &portrait.separatrices {
        match s.graph() {
            Some((c, m)) if s.kind == SeparatrixKind::PowerCurve => println!("separatrix: s = {c:.12} t^{m}"),
            _ => println!("separatrix: {}", if s.kind == SeparatrixKind::TAxis { "t-axis" } else { "s-axis" }),
        }
    }
    if ctx.wants(Format::Json) {
        write_file(ctx, "diagram.json", &pretty(&portrait.diagram))?;
        write_file(ctx, "portrait.json", &pretty(&portrait.to_json()))?;
    }
    if ctx.wants(Format::Svg) {
        let poly = PolyField::from(&field);
        let svg = sketch(ctx, &poly, Some(&portrait), &ring(24, 0.9 * eps));
        write_file(ctx, "portrait.svg", &svg)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct TraceSummary {
    termination: umbrella::numerics::Termination,
    min_radius: f64,
    samples: usize,
    end: [f64; 3],
}

impl From<&OrbitTrace> for TraceSummary {
    fn from(t: &OrbitTrace) -> Self {
        TraceSummary { termination: t.termination, min_radius: t.min_radius, samples: t.samples.len(), end: t.last() }
    }
}

pub fn orbits(ctx: &Context) -> Result<(), Failure> {
    let field = load_field(ctx)?;
    let poly = PolyField::from(&field);
    let cfg = ctx.config.integrator();
    let seeds =
        if ctx.config.orbit_seeds.is_empty() { ring(16, 0.5 * ctx.config.epsilon) } else { ctx.config.orbit_seeds.clone() };
    let mut summary = Vec::new();
    for (k, &seed) in seeds.iter().enumerate() {
        if seed == [0.0, 0.0] {
            return Err(Failure::Validation(anyhow::anyhow!("orbit seed {k} is the origin")));
        }
        let (fw, bw) = trace_both(&poly, seed, &cfg);
        if ctx.wants(Format::Csv) {
            write_file(ctx, &format!("orbit_{k:03}_forward.csv"), &fw.to_csv())?;
            write_file(ctx, &format!("orbit_{k:03}_backward.csv"), &bw.to_csv())?;
        }
        summary.push(json!({
            "index": k,
            "seed": seed,
            "forward": TraceSummary::from(&fw),
            "backward": TraceSummary::from(&bw),
        }));
    }
    println!("{} orbits traced", seeds.len());
    if ctx.wants(Format::Json) {
        write_file(ctx, "orbits.json", &pretty(&summary))?;
    }
    if ctx.wants(Format::Svg) {
        let portrait = analyze(&field, ctx.config.epsilon).ok();
        write_file(ctx, "orbits.svg", &sketch(ctx, &poly, portrait.as_ref(), &seeds))?;
    }
    Ok(())
}

fn series(terms: &[([i32; 2], i64, i64)], order: i32) -> Series2 {
    Series2::from_terms(terms.iter().map(|&(e, p, q)| (e, rat(p, q))), order).expect("valid terms")
}

/// The undeformed umbrella and the `u + v²/3` perturbation, against their
/// hand-computed fields.
fn golden_fields() -> anyhow::Result<Vec<(&'static str, bool)>> {
    let n = 7;
    let standard = characteristic_field(&DeformationJet::identity(), n)?;
    let standard_ok = standard.alpha == series(&[([3, 0], -3, 1), ([1, 2], -1, 1), ([5, 0], -3, 1)], n)
        && standard.beta == series(&[([0, 3], 1, 1), ([2, 1], 4, 1), ([4, 1], 7, 1)], n);

    let bump = HigherTerm { component: 1, exp: [0, 0, 0, 2], coeff: rat(1, 3) };
    let jet = DeformationJet::from_matrix(&QMatrix::identity(4), vec![bump], JetMode::LinearSymplecticOnly)?;
    let perturbed = characteristic_field(&jet, n)?;
    let perturbed_ok = perturbed.alpha
        == series(&[([3, 0], -3, 1), ([1, 2], -1, 1), ([5, 0], -3, 1), ([2, 2], -4, 3), ([3, 2], -4, 3)], n)
        && perturbed.beta == series(&[([2, 1], 4, 1), ([0, 3], 1, 1), ([4, 1], 7, 1), ([5, 1], 4, 1)], n);
    Ok(vec![("standard", standard_ok), ("perturbed", perturbed_ok)])
}

fn g_entries(g: &QMatrix) -> (f64, f64, f64) {
    (to_f64(&g[(0, 0)]), to_f64(&g[(0, 1)]), to_f64(&g[(1, 1)]))
}

/// Separatrix and transversality checks for a SADDLE portrait. Power
/// curves are checked on the principal part of the field, where they are
/// exactly invariant; the axes on the full field.
fn separatrix_checks(
    ctx: &Context,
    field: &CharField,
    portrait: &Portrait,
    g: (f64, f64, f64),
    failures: &mut Vec<String>,
) -> anyhow::Result<Value> {
    let cfg = ctx.config.integrator();
    let sc = &ctx.config.separatrix;
    let poly = PolyField::from(field);
    let model = model_field(g.0, g.1, g.2);
    let mut checks = Vec::new();
    for sep in &portrait.separatrices {
        for t0 in [sc.t0, -sc.t0] {
            let (rep, on) = match sep.kind {
                SeparatrixKind::TAxis => (verify_separatrix(&poly, 0.0, 1, t0, sc.tolerance, sc.offset, &cfg)?, "full"),
                SeparatrixKind::SAxis => {
                    (verify_separatrix(&Swapped(&poly), 0.0, 1, t0, sc.tolerance, sc.offset, &cfg)?, "full")
                }
                SeparatrixKind::PowerCurve => {
                    let (c, m) = sep.graph().expect("power curves are graphs");
                    if m == 2 && g.1 != 0.0 {
                        (verify_separatrix(&model, c, m, t0, sc.tolerance, sc.offset, &cfg)?, "principal-part")
                    } else {
                        (verify_separatrix(&poly, c, m, t0, sc.tolerance, sc.offset, &cfg)?, "full")
                    }
                }
            };
            if !rep.passed {
                failures.push(format!("separatrix {:?} branch t0 = {t0}", sep.kind));
            }
            checks.push(json!({ "kind": sep.kind, "field": on, "report": rep }));
        }
    }
    let transversality =
        check_transversality(&poly, &portrait.separatrices, ctx.config.transversality_samples, ctx.config.seed, &cfg);
    if !transversality.passed {
        failures.push(format!("transversality: {} violations", transversality.violations));
    }
    Ok(json!({ "checks": checks, "transversality": transversality }))
}

pub fn verify(ctx: &Context) -> Result<(), Failure> {
    let cfg = &ctx.config;
    let mut failures: Vec<String> = Vec::new();

    let golden = golden_fields()?;
    for (name, ok) in &golden {
        println!("golden {name}: {}", if *ok { "PASS" } else { "FAIL" });
        if !ok {
            failures.push(format!("golden {name} field"));
        }
    }

    let jet = cfg.jet()?;
    let data = derive_linear_data(&jet)?;
    let field = characteristic_field(&jet, cfg.order)?;
    let coeffs = extract_coefficients(&field);
    let linear = linear_part_coefficients(&data);
    let stated = coefficient_formulas(&FormulaInputs::from_jet(&jet)?);
    let coeff_mismatch = coeffs.mismatches(&linear);
    println!("coefficients: {}", if coeff_mismatch.is_empty() { "PASS" } else { "FAIL" });
    if !coeff_mismatch.is_empty() {
        failures.push(format!("coefficients {coeff_mismatch:?}"));
    }

    let claim = verify_claim(cfg.claim_samples, cfg.seed);
    println!("claim: {} admitted, {} violations", claim.admitted, claim.violations);
    if !claim.passed {
        failures.push(format!("claim: {} violations", claim.violations));
    }
    let g = g_entries(&data.g);
    let jet_claim = if g.1.abs() <= 1e-6 {
        json!({ "status": "not admitted", "g12": g.1 })
    } else {
        match cpm_closed_forms(g.0, g.1, g.2) {
            Ok(f) => {
                let ok = f.lambda_plus.0 * f.lambda_plus.1 < 0.0
                    && f.lambda_minus.0 * f.lambda_minus.1 < 0.0
                    && f.discriminant - 24.0 * f.delta >= -1e-9;
                if !ok {
                    failures.push("claim fails for the configured jet".into());
                }
                json!({ "status": "admitted", "passed": ok, "forms": f })
            }
            Err(e) => {
                failures.push(format!("claim for the configured jet: {e}"));
                json!({ "status": "admitted", "passed": false, "error": e.to_string() })
            }
        }
    };

    let portrait = analyze(&field.canonical, cfg.epsilon)?;
    println!("classification: {}", portrait.classification);
    let mut separatrices = match portrait.classification {
        Classification::Saddle => {
            let mut sub = separatrix_checks(ctx, &field, &portrait, g, &mut failures)?;
            sub["status"] = json!("CHECKED");
            sub
        }
        Classification::Unresolved => json!({ "status": "UNRESOLVED" }),
        Classification::Other => {
            failures.push("portrait is not a saddle".into());
            json!({ "status": "OTHER" })
        }
    };
    // A deformed jet with g₁₂ = 0 is off the generic stratum: the curves
    // s = c±t² are undefined, whatever the exact portrait turns out to be.
    // (G = I is the undeformed umbrella, whose separatrices are the axes.)
    if g.1.abs() <= 1e-6 && data.g != QMatrix::identity(2) {
        separatrices = json!({
            "status": "UNRESOLVED",
            "reason": "g12 = 0: the curves s = c±t² are undefined",
            "portrait": separatrices,
        });
    }
    if separatrices["status"] == "UNRESOLVED" {
        println!("separatrices: UNRESOLVED");
        separatrices["counted_as_failure"] = json!(cfg.fail_on_unresolved);
        if cfg.fail_on_unresolved {
            failures.push("separatrices UNRESOLVED".into());
        }
    }

    let poly = PolyField::from(&field);
    let integ = cfg.integrator();
    let nonvanishing = check_nonvanishing(&poly, integ.core, integ.epsilon, 10_000);
    if !nonvanishing.passed {
        failures.push("field vanishes on the annulus".into());
    }

    println!("{}", if failures.is_empty() { "verify: PASS" } else { "verify: FAIL" });
    let report = json!({
        "seed": cfg.seed,
        "order": cfg.order,
        "golden": golden.iter().map(|(n, ok)| json!({ "field": n, "passed": ok })).collect::<Vec<_>>(),
        "coefficients": {
            "extracted": coeffs.to_json(),
            "linear_part_mismatches": coeff_mismatch,
            "stated_form_mismatches": coeffs.mismatches(&stated),
        },
        "claim": { "monte_carlo": claim, "configured_jet": jet_claim },
        "classification": portrait.classification,
        "separatrices": separatrices,
        "nonvanishing": nonvanishing,
        "failures": failures,
        "passed": failures.is_empty(),
    });
    if ctx.wants(Format::Json) {
        write_file(ctx, "verify.json", &pretty(&report))?;
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}
