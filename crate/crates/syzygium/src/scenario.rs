//! Executable scenario encodings: each one builds curves, bundles and
//! classes from integer parameters, runs a fixed list of named checks, and
//! produces a reproducible report with attached certificates.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::bundle::{curve_from_texts, BundleFile, BundleSpec, FamilySpec, Section};
use crate::cech::{
    self, connecting_class, frobenius_on_class, hasse_witt, is_zero_in_h1_bundle, CechClass,
};
use crate::certificate::{Certificate, DestabilizerFile};
use crate::curve::{PlaneCurve, RingElement};
use crate::error::{Result, SyzError};

use crate::linalg;
use crate::poly::{parse_poly, parse_poly_graded, HomogeneousPoly};
use crate::report::{
    assumed, fail, inconclusive, pass, pass_with, Report, ReportBuilder,
};

const DEG11_S1: &str = include_str!("../data/deg11_s1.txt");
const DEG11_S2: &str = include_str!("../data/deg11_s2.txt");

const SEMISTABILITY_INPUT: &str =
    "semistability of the special-fiber syzygy bundle (external input); stability of a \
     rank-2 semistable bundle with a pullback destabilizer follows";

#[derive(Debug, Clone)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub params: &'static [(&'static str, &'static str)],
    pub summary: &'static str,
}

pub fn scenario_list() -> Vec<ScenarioInfo> {
    vec![
        ScenarioInfo {
            name: "thm-char2",
            params: &[("n", "n >= 2"), ("l", "0 <= l <= floor((2^n - 3)/6)")],
            summary: "char-2 family Syz(x^2,y^2,tz^2+sxy)(3) on the degree 2^n+2l+1 Fermat \
                      curve: trivializing syzygies of the n-th pullback, fiber dichotomy",
        },
        ScenarioInfo {
            name: "cor-char2",
            params: &[("n", "n >= 2"), ("l", "0 <= l <= floor((2^n - 3)/6)")],
            summary: "one-parameter specialization s -> 1-t of thm-char2 with the same checks \
                      on generic and special fibers",
        },
        ScenarioInfo {
            name: "rem-deg11",
            params: &[],
            summary: "degree-11 Fermat curve: the two explicit degree-96 syzygies of the 5th \
                      pullback verify and are generically independent",
        },
        ScenarioInfo {
            name: "rem-nonordinary",
            params: &[("n", "n >= 2"), ("l", "0 <= l <= floor((2^n - 3)/6)")],
            summary: "non-ordinarity of the char-2 curves: an explicit H^1 class with vanishing \
                      Frobenius image",
        },
        ScenarioInfo {
            name: "lemma-p-general",
            params: &[("p", "prime >= 2"), ("l", "1 <= l <= floor(p/2)")],
            summary: "rank-2 extension on the degree 3pl-1 curve: destabilizer at t=1, \
                      nowhere-vanishing section, connecting class, coboundary witness",
        },
        ScenarioInfo {
            name: "lemma-fitting",
            params: &[("p", "prime >= 3"), ("l", "1 <= l <= floor(p/2)")],
            summary: "Fitting decomposition of the Hasse-Witt action and nilpotent projections \
                      of the extension class",
        },
        ScenarioInfo {
            name: "ex-335",
            params: &[],
            summary: "p = 3 special fiber: explicit degree-9 sections of the second pullback \
                      and a rank-2 triviality certificate",
        },
        ScenarioInfo {
            name: "ex-quintic-family",
            params: &[],
            summary: "quintic family over F_3(t): 2-dimensional section space of the third \
                      pullback with a unit-wedge frame; destabilized special fiber",
        },
        ScenarioInfo {
            name: "family-scan-demo",
            params: &[],
            summary: "family scan over the cor-char2 fibers {0, 1} reproducing the \
                      triviality dichotomy",
        },
        ScenarioInfo {
            name: "rem-deg-stretch",
            params: &[("d", "one of 171, 173, 175, 177")],
            summary: "stretch search for trivializing syzygies of the 9th pullback on very \
                      large Fermat curves (resource-guarded)",
        },
    ]
}

pub fn scenario_run(name: &str, params: &BTreeMap<String, i64>) -> Result<Report> {
    match name {
        "thm-char2" => thm_char2(params),
        "cor-char2" => cor_char2(params),
        "rem-deg11" => rem_deg11(params),
        "rem-nonordinary" => rem_nonordinary(params),
        "lemma-p-general" => lemma_p_general(params),
        "lemma-fitting" => lemma_fitting(params),
        "ex-335" => ex_335(params),
        "ex-quintic-family" => ex_quintic_family(params),
        "family-scan-demo" => family_scan_demo(params),
        "rem-deg-stretch" => rem_deg_stretch(params),
        other => Err(SyzError::UnknownScenario(other.to_string())),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Quick,
    Full,
    Stretch,
}

impl Profile {
    pub fn parse(s: &str) -> Result<Profile> {
        match s {
            "quick" => Ok(Profile::Quick),
            "full" => Ok(Profile::Full),
            "stretch" => Ok(Profile::Stretch),
            other => Err(SyzError::Invalid(format!("unknown profile {other:?}"))),
        }
    }

    pub fn plan(self) -> Vec<(&'static str, BTreeMap<String, i64>)> {
        let p = |pairs: &[(&str, i64)]| -> BTreeMap<String, i64> {
            pairs
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect()
        };
        let mut plan = vec![
            ("thm-char2", p(&[("n", 2), ("l", 0)])),
            ("lemma-p-general", p(&[("p", 3), ("l", 1)])),
            ("ex-335", p(&[])),
            ("rem-nonordinary", p(&[("n", 2), ("l", 0)])),
        ];
        if self == Profile::Quick {
            return plan;
        }
        plan.extend([
            ("thm-char2", p(&[("n", 3), ("l", 0)])),
            ("thm-char2", p(&[("n", 4), ("l", 0)])),
            ("thm-char2", p(&[("n", 4), ("l", 1)])),
            ("thm-char2", p(&[("n", 4), ("l", 2)])),
            ("lemma-p-general", p(&[("p", 5), ("l", 1)])),
            ("lemma-p-general", p(&[("p", 5), ("l", 2)])),
            ("rem-deg11", p(&[])),
            ("ex-quintic-family", p(&[])),
            ("lemma-fitting", p(&[("p", 3), ("l", 1)])),
            ("lemma-fitting", p(&[("p", 5), ("l", 1)])),
            ("cor-char2", p(&[("n", 2), ("l", 0)])),
            ("family-scan-demo", p(&[])),
        ]);
        if self == Profile::Stretch {
            for d in [171, 173, 175, 177] {
                plan.push(("rem-deg-stretch", p(&[("d", d)])));
            }
        }
        plan
    }
}

/// Run a suite profile; scenarios are independent and run on a worker pool.
pub fn suite_run(profile: Profile, jobs: Option<usize>) -> Vec<Report> {
    use rayon::prelude::*;
    let plan = profile.plan();
    let run_one = |(name, params): &(&'static str, BTreeMap<String, i64>)| -> Report {
        scenario_run(name, params).unwrap_or_else(|e| {
            let mut b = ReportBuilder::new(name, params.clone());
            b.check("setup", "scenario-construction", || fail(format!("{e}")));
            b.finish()
        })
    };
    match jobs {
        Some(1) => plan.iter().map(run_one).collect(),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("worker pool");
            pool.install(|| plan.par_iter().map(run_one).collect())
        }
        None => plan.par_iter().map(run_one).collect(),
    }
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn get_param(params: &BTreeMap<String, i64>, key: &str) -> Result<i64> {
    params
        .get(key)
        .copied()
        .ok_or_else(|| SyzError::BadParameter(format!("missing parameter {key}")))
}

fn char2_l_max(n: u32) -> i64 {
    ((1i64 << n) - 3) / 6
}

fn validate_char2_params(params: &BTreeMap<String, i64>) -> Result<(u32, u32)> {
    let n = get_param(params, "n")?;
    let l = get_param(params, "l")?;
    if n < 2 || n > 16 {
        return Err(SyzError::BadParameter(format!("n = {n} out of range [2, 16]")));
    }
    let lmax = char2_l_max(n as u32);
    if l < 0 || l > lmax {
        return Err(SyzError::BadParameter(format!(
            "l = {l} violates 0 <= l <= floor(2^(n-1)/3 - 1/2) = {lmax} for n = {n}"
        )));
    }
    Ok((n as u32, l as u32))
}

fn char2_family(n: u32, l: u32) -> Result<FamilySpec> {
    let d = 2u32.pow(n) + 2 * l + 1;
    let curve = curve_from_texts("GF(2)(s)(t)", &format!("x^{d}+y^{d}+z^{d}"), ("x", "z"))?;
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field)?),
        curve.element(&parse_poly("y^2", &field)?),
        curve.element(&parse_poly("t*z^2+s*x*y", &field)?),
    ];
    let spec = BundleSpec::new(curve, gens, 3)?;
    FamilySpec::new(spec, vec!["s".into(), "t".into()])
}

/// The two candidate readings of the trivializing syzygies. The "corrected"
/// variant resolves the printed exponents consistently with the Frobenius
/// structure; the "literal" variant is the transcription as printed.
fn char2_syzygy_texts(n: u32, l: u32, literal: bool) -> (Vec<String>, Vec<String>) {
    let q = 2u32.pow(n);
    let (t_mid, s_mid, s_last) = if literal {
        (q + 1, "s".to_string(), q + 1)
    } else {
        (2 * q, format!("s^{q}"), 2 * q)
    };
    let s_third = if literal {
        format!("s^{}", 2 * n)
    } else {
        format!("s^{q}")
    };
    let s1 = vec![
        format!("x^{}*z^{}*t^{}", 3 + 6 * l, q - 3 - 6 * l, 2 * q),
        format!(
            "x^{}*y^{}*z^{}*t^{} + y^{}*z^{}*t^{q}*{} + x^{q}*s^{}",
            1 + 2 * l,
            2 + 4 * l,
            q - 3 - 6 * l,
            t_mid,
            1 + 2 * l,
            q - 2 * l - 1,
            s_mid,
            s_last
        ),
        format!("x^{}*z^{}*t^{q} + {}*y^{q}", 1 + 2 * l, q - 2 * l - 1, s_third),
    ];
    let s2 = vec![
        format!(
            "y^{}*x^{}*z^{}*t^{} + x^{}*z^{}*t^{q}*{} + y^{q}*s^{}",
            1 + 2 * l,
            2 + 4 * l,
            q - 3 - 6 * l,
            t_mid,
            1 + 2 * l,
            q - 2 * l - 1,
            s_mid,
            s_last
        ),
        format!("y^{}*z^{}*t^{}", 3 + 6 * l, q - 3 - 6 * l, 2 * q),
        format!("y^{}*z^{}*t^{q} + s^{q}*x^{q}", 1 + 2 * l, q - 2 * l - 1),
    ];
    (s1, s2)
}

fn section_from_owned(spec: &BundleSpec, texts: &[String], j: u32) -> Result<Section> {
    let refs: Vec<&str> = texts.iter().map(|s| s.as_str()).collect();
    spec.section_from_texts(&refs, Some(j))
}

/// Try the corrected reading first, fall back to the literal one, and record
/// which variant satisfied the syzygy identity.
fn resolve_char2_syzygies(
    pb: &BundleSpec,
    n: u32,
    l: u32,
) -> Result<(Section, Section, &'static str)> {
    let j = pb.twist as u32;
    for (label, literal) in [("corrected-exponents", false), ("literal", true)] {
        let (t1, t2) = char2_syzygy_texts(n, l, literal);
        let s1 = section_from_owned(pb, &t1, j)?;
        let s2 = section_from_owned(pb, &t2, j)?;
        if pb.verify_syzygy(&s1.components)? && pb.verify_syzygy(&s2.components)? {
            return Ok((s1, s2, label));
        }
    }
    Err(SyzError::Invalid(
        "no exponent variant satisfies the syzygy identity".into(),
    ))
}

fn independence_detail(spec: &BundleSpec, a: &Section, b: &Section) -> Result<(bool, String)> {
    let field = spec.field().clone();
    let mut coords = Vec::new();
    for s in [a, b] {
        let mut v = Vec::new();
        for (c, &d) in s.components.iter().zip(&spec.degrees) {
            v.extend(spec.curve.coords(&c.rep, s.total_degree - d));
        }
        coords.push(v);
    }
    let m = linalg::Matrix::from_rows(field, coords);
    let rank = m.rank();
    Ok((rank == 2, format!("coordinate rank {rank} of 2")))
}

fn smoothness_check_row(
    b: &mut ReportBuilder,
    curve: &Arc<PlaneCurve>,
) {
    let curve = curve.clone();
    b.check("curve-smooth", "curve-smoothness-saturation", move || {
        match curve.smoothness_check(None) {
            crate::curve::SmoothnessResult::Smooth {
                exponent,
                specialization,
            } => {
                let at = specialization
                    .map(|s| format!(" (witnessed at {s})"))
                    .unwrap_or_default();
                pass(format!("jacobian ideal saturates at N = {exponent}{at}"))
            }
            crate::curve::SmoothnessResult::Inconclusive { n_max } => {
                inconclusive(format!("no saturation up to N = {n_max}"))
            }
        }
    });
}

fn destabilizer_rows(
    b: &mut ReportBuilder,
    prefix: &str,
    spec: &BundleSpec,
    e_max: u32,
) {
    let verdict = spec.semistability_verdict(e_max);
    let id = format!("{prefix}-destabilizer");
    let spec_file = BundleFile::of(spec);
    match verdict {
        crate::bundle::SemistabilityVerdict::NotStronglySemistable {
            witness,
            derived_stable_rank2,
        } => {
            let cert = Certificate::Destabilizer(DestabilizerFile {
                bundle: spec_file,
                frobenius_exponent: witness.e,
                total_degree: witness.total_degree,
                section: witness.section.component_strings(),
            });
            let sum: u32 = spec
                .pullback(witness.e)
                .degrees
                .iter()
                .sum();
            b.check(&id, "pullback-destabilizing-syzygy", move || {
                pass_with(
                    format!(
                        "witness at e = {}, total degree {} < {}/2",
                        witness.e,
                        witness.total_degree,
                        sum
                    ),
                    cert.to_value(),
                )
            });
            if derived_stable_rank2 {
                b.check(
                    &format!("{prefix}-stable"),
                    "rank2-stability-from-semistability",
                    move || {
                        assumed(
                            SEMISTABILITY_INPUT,
                            "not strongly semistable; stable granted the semistability input",
                        )
                    },
                );
            }
        }
        crate::bundle::SemistabilityVerdict::Destabilized { witness } => {
            b.check(&id, "pullback-destabilizing-syzygy", move || {
                fail(format!(
                    "destabilized already at e = 0 (degree {})",
                    witness.total_degree
                ))
            });
        }
        crate::bundle::SemistabilityVerdict::NoSyzygyDestabilizerUpTo { e_max } => {
            b.check(&id, "pullback-destabilizing-syzygy", move || {
                inconclusive(format!("no syzygy destabilizer up to e = {e_max}"))
            });
        }
    }
}

// ---------------------------------------------------------------------------
// scenarios
// ---------------------------------------------------------------------------

fn thm_char2(params: &BTreeMap<String, i64>) -> Result<Report> {
    let (n, l) = validate_char2_params(params)?;
    let mut b = ReportBuilder::new("thm-char2", params.clone());
    let family = char2_family(n, l)?;
    let spec = &family.spec;
    smoothness_check_row(&mut b, &spec.curve);

    let pb = spec.pullback(n);
    let resolved = resolve_char2_syzygies(&pb, n, l);
    let mut sections: Option<(Section, Section)> = None;
    match resolved {
        Ok((s1, s2, variant)) => {
            b.check("s1-s2-verify", "pullback-syzygies-verify", || {
                pass(format!("both syzygies verify; exponent variant: {variant}"))
            });
            sections = Some((s1, s2));
        }
        Err(e) => {
            b.check("s1-s2-verify", "pullback-syzygies-verify", || {
                fail(format!("{e}"))
            });
        }
    }

    if let Some((s1, s2)) = &sections {
        let w = pb.wedge_scalar(s1, s2)?;
        let wz = pb.field().is_zero(&w);
        let ws = pb.field().elem_to_string(&w);
        b.check("wedge-unit-generic", "frame-wedge-is-unit", move || {
            if wz {
                fail("wedge vanishes")
            } else {
                pass(format!("wedge(s1, s2) = {ws}, a unit"))
            }
        });

        // independence at (t, s) = (0, 1)
        let mut assign = BTreeMap::new();
        assign.insert("s".to_string(), "1".to_string());
        assign.insert("t".to_string(), "0".to_string());
        let fam_pb = FamilySpec::new(pb.clone(), vec!["s".into(), "t".into()])?;
        let sp = fam_pb.specialize(&assign)?;
        let s1_sp = fam_pb.specialize_section(&sp, &assign, s1)?;
        let s2_sp = fam_pb.specialize_section(&sp, &assign, s2)?;
        let (ind, detail) = independence_detail(&sp, &s1_sp, &s2_sp)?;
        b.check(
            "independent-at-t0-s1",
            "specialized-sections-independent",
            move || {
                if ind {
                    pass(detail)
                } else {
                    fail(detail)
                }
            },
        );
    }

    // fiber (s, t) = (1, 0): the split bundle, trivial at e = 0
    let mut a10 = BTreeMap::new();
    a10.insert("s".to_string(), "1".to_string());
    a10.insert("t".to_string(), "0".to_string());
    let fiber10 = family.specialize(&a10)?;
    let cert10 = fiber10.triviality_certificate(0)?;
    b.check("fiber-s1-t0-trivial", "special-fiber-splits", move || {
        match cert10 {
            Some(c) => pass_with(
                "triviality certificate at e = 0".to_string(),
                Certificate::from(&c).to_value(),
            ),
            None => fail("no certificate at e = 0"),
        }
    });

    // fiber (s, t) = (0, 1): not strongly semistable
    let mut a01 = BTreeMap::new();
    a01.insert("s".to_string(), "0".to_string());
    a01.insert("t".to_string(), "1".to_string());
    let fiber01 = family.specialize(&a01)?;
    destabilizer_rows(&mut b, "fiber-s0-t1", &fiber01, n);

    Ok(b.finish())
}

fn cor_char2(params: &BTreeMap<String, i64>) -> Result<Report> {
    let (n, l) = validate_char2_params(params)?;
    let mut b = ReportBuilder::new("cor-char2", params.clone());
    let family = char2_family(n, l)?;

    // substitute s -> 1 - t
    let mut sub = BTreeMap::new();
    sub.insert("s".to_string(), "1-t".to_string());
    let cor = family.specialize(&sub)?;
    smoothness_check_row(&mut b, &cor.curve);

    // generic syzygies: specialize the theorem's resolved sections
    let pb_thm = family.spec.pullback(n);
    let pb_cor = cor.pullback(n);
    let resolved = resolve_char2_syzygies(&pb_thm, n, l)?;
    let fam_pb = FamilySpec::new(pb_thm, vec!["s".into(), "t".into()])?;
    let s1 = fam_pb.specialize_section(&pb_cor, &sub, &resolved.0)?;
    let s2 = fam_pb.specialize_section(&pb_cor, &sub, &resolved.1)?;
    let ok1 = pb_cor.verify_syzygy(&s1.components)?;
    let ok2 = pb_cor.verify_syzygy(&s2.components)?;
    let variant = resolved.2;
    b.check("generic-s1-s2-verify", "pullback-syzygies-verify", move || {
        if ok1 && ok2 {
            pass(format!(
                "both syzygies verify after s -> 1-t; exponent variant: {variant}"
            ))
        } else {
            fail("specialized syzygies do not verify")
        }
    });

    let w = pb_cor.wedge_scalar(&s1, &s2)?;
    let wz = pb_cor.field().is_zero(&w);
    b.check("generic-wedge-unit", "frame-wedge-is-unit", move || {
        if wz {
            fail("wedge vanishes")
        } else {
            pass("wedge of the specialized frame is a unit")
        }
    });

    // independence at t = 0 (so s = 1)
    let mut at0 = BTreeMap::new();
    at0.insert("t".to_string(), "0".to_string());
    let fam_cor = FamilySpec::new(pb_cor.clone(), vec!["t".into()])?;
    let sp = fam_cor.specialize(&at0)?;
    let s1_sp = fam_cor.specialize_section(&sp, &at0, &s1)?;
    let s2_sp = fam_cor.specialize_section(&sp, &at0, &s2)?;
    let (ind, detail) = independence_detail(&sp, &s1_sp, &s2_sp)?;
    b.check(
        "generic-independent-at-t0",
        "specialized-sections-independent",
        move || if ind { pass(detail) } else { fail(detail) },
    );

    // fibers
    let fam = FamilySpec::new(cor.clone(), vec!["t".into()])?;
    let mut t0 = BTreeMap::new();
    t0.insert("t".to_string(), "0".to_string());
    let fiber0 = fam.specialize(&t0)?;
    let cert0 = fiber0.triviality_certificate(0)?;
    b.check("fiber-t0-trivial", "special-fiber-splits", move || {
        match cert0 {
            Some(c) => pass_with(
                "triviality certificate at e = 0".to_string(),
                Certificate::from(&c).to_value(),
            ),
            None => fail("no certificate at e = 0"),
        }
    });
    let mut t1 = BTreeMap::new();
    t1.insert("t".to_string(), "1".to_string());
    let fiber1 = fam.specialize(&t1)?;
    destabilizer_rows(&mut b, "fiber-t1", &fiber1, n);

    Ok(b.finish())
}

/// Parse a data-file section (three `;`-separated component blocks), keeping
/// only degree-`deg` pieces; returns the components and a list of dropped
/// off-degree terms per component.
fn parse_data_section(
    raw: &str,
    curve: &Arc<PlaneCurve>,
    deg: u32,
) -> Result<(Vec<RingElement>, Vec<(usize, String)>)> {
    let field = curve.field().clone();
    let mut comps = Vec::new();
    let mut dropped = Vec::new();
    for (idx, block) in raw.split("\n;\n").enumerate() {
        let pieces = parse_poly_graded(block, &field)?;
        let mut keep = HomogeneousPoly::zero(field.clone(), deg);
        for p in pieces {
            if p.degree == deg {
                keep = keep.add(&p)?;
            } else {
                dropped.push((idx, p.to_string()));
            }
        }
        comps.push(curve.element(&keep));
    }
    Ok((comps, dropped))
}

/// Re-solve one component of a candidate syzygy from the other two; unique
/// in the domain curve ring when it exists.
fn solve_component(
    spec: &BundleSpec,
    comps: &[RingElement],
    fix: usize,
    j: u32,
) -> Result<Option<RingElement>> {
    let curve = &spec.curve;
    let field = spec.field().clone();
    let mut acc = HomogeneousPoly::zero(field.clone(), j);
    for (i, c) in comps.iter().enumerate() {
        if i == fix || c.is_zero() {
            continue;
        }
        acc = acc.add(&spec.generators[i].rep.mul(&c.rep))?;
    }
    let target = curve.nf(&acc.neg());
    let deg_fix = j - spec.degrees[fix];
    let m = curve.mult_map(&spec.generators[fix], deg_fix);
    let rhs = curve.coords(&target, j);
    Ok(linalg::solve(&m, &rhs).map(|x| RingElement {
        curve: curve.clone(),
        rep: curve.from_coords(&x, deg_fix),
    }))
}

fn rem_deg11(params: &BTreeMap<String, i64>) -> Result<Report> {
    let mut b = ReportBuilder::new("rem-deg11", params.clone());
    let curve = curve_from_texts("GF(2)(t)", "x^11+y^11+z^11", ("x", "z"))?;
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field)?),
        curve.element(&parse_poly("y^2", &field)?),
        curve.element(&parse_poly("t*z^2+(1-t)*x*y", &field)?),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3)?;
    smoothness_check_row(&mut b, &spec.curve);
    let pb = spec.pullback(5);

    let mut resolved: Vec<Section> = Vec::new();
    for (name, raw) in [("s1", DEG11_S1), ("s2", DEG11_S2)] {
        let (mut comps, dropped) = parse_data_section(raw, &curve, 32)?;
        let mut notes: Vec<String> = dropped
            .iter()
            .map(|(idx, term)| format!("dropped off-degree term in component {idx}: {term}"))
            .collect();
        let mut ok = pb.verify_syzygy(&comps)?;
        if !ok {
            // resolve the single damaged component
            let candidates: Vec<usize> = if dropped.is_empty() {
                (0..3).collect()
            } else {
                dropped.iter().map(|(i, _)| *i).collect()
            };
            for fix in candidates {
                if let Some(g) = solve_component(&pb, &comps, fix, 96)? {
                    let diff = g.rep.sub(&comps[fix].rep)?;
                    notes.push(format!(
                        "component {fix} re-solved; correction: {}",
                        curve.nf(&diff)
                    ));
                    comps[fix] = g;
                    ok = pb.verify_syzygy(&comps)?;
                    break;
                }
            }
        }
        let detail = if notes.is_empty() {
            "verifies as printed".to_string()
        } else {
            notes.join("; ")
        };
        let id = format!("{name}-verify");
        b.check(&id, "deg96-syzygy-verifies", move || {
            if ok {
                pass(detail)
            } else {
                fail(detail)
            }
        });
        if ok {
            resolved.push(Section {
                total_degree: 96,
                components: comps,
            });
        }
    }

    if resolved.len() == 2 {
        let w = pb.wedge_scalar(&resolved[0], &resolved[1])?;
        let wz = pb.field().is_zero(&w);
        b.check(
            "generic-independence",
            "frame-wedge-is-unit",
            move || {
                if wz {
                    fail("wedge vanishes: sections are proportional")
                } else {
                    pass("wedge is a unit, so the sections are generically independent and frame the 5th pullback")
                }
            },
        );
    }
    Ok(b.finish())
}

fn rem_nonordinary(params: &BTreeMap<String, i64>) -> Result<Report> {
    let (n, l) = validate_char2_params(params)?;
    let mut b = ReportBuilder::new("rem-nonordinary", params.clone());
    let d = 2u32.pow(n) + 2 * l + 1;
    // this computation uses the cover D_+(x), D_+(y)
    let curve = curve_from_texts("GF(2)", &format!("x^{d}+y^{d}+z^{d}"), ("x", "y"))?;
    let field = curve.field().clone();
    let a = 2u32.pow(n - 2);
    let b_exp = 2u32.pow(n - 2) + l + 1;
    let mut class = CechClass::zero(curve.clone(), 0);
    class.add_coeff(a, b_exp, field.one());
    let m = 2u32.pow(n - 1) + l + 1;
    let basis = cech::h1_basis(&curve, 0);
    let is_basis = basis.contains(&(a, b_exp, m));
    b.check("class-nonzero-basis", "h1-class-is-basis-monomial", move || {
        if is_basis {
            pass(format!(
                "z^{m}/(x^{a}*y^{b_exp}) is a basis monomial of H^1(O)"
            ))
        } else {
            fail("not a basis monomial")
        }
    });
    let image = frobenius_on_class(&class, 1)?;
    let img_zero = image.is_zero();
    let img_str = image.pretty();
    b.check("class-frobenius-image-zero", "frobenius-image-vanishes", move || {
        if img_zero {
            pass("first Frobenius image normal-forms to 0")
        } else {
            fail(format!("image is {img_str}"))
        }
    });
    let hw = hasse_witt(&curve)?;
    let fit = hw.fitting()?;
    let (s_dim, n_dim) = (fit.semisimple_dim(), fit.nilpotent_dim());
    b.check("non-ordinary", "hasse-witt-not-bijective", move || {
        if n_dim > 0 {
            pass(format!(
                "fitting dimensions: semisimple {s_dim}, nilpotent {n_dim}"
            ))
        } else {
            fail("hasse-witt action is bijective")
        }
    });
    Ok(b.finish())
}

fn validate_lemma_params(params: &BTreeMap<String, i64>) -> Result<(u64, u32)> {
    let p = get_param(params, "p")?;
    let l = get_param(params, "l")?;
    if p < 2 || !crate::field::is_prime(p as u64) {
        return Err(SyzError::BadParameter(format!("p = {p} is not a prime")));
    }
    if l < 1 || l > p / 2 {
        return Err(SyzError::BadParameter(format!(
            "l = {l} violates 1 <= l <= floor(p/2) = {}",
            p / 2
        )));
    }
    Ok((p as u64, l as u32))
}

struct LemmaSetup {
    base: BundleSpec,
    pullback: BundleSpec,
    s1: Section,
    class: CechClass,
}

fn lemma_setup(p: u64, l: u32) -> Result<LemmaSetup> {
    let pl = p as u32 * l;
    let d = 3 * pl - 1;
    let eq = format!("x^{d}+y^{d}+z^{d}+x^{pl}*z^{}", 2 * pl - 1);
    let curve = curve_from_texts(&format!("GF({p})(t)"), &eq, ("x", "z"))?;
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly(&format!("x^{}", 2 * l), &field)?),
        curve.element(&parse_poly(&format!("y^{}", 2 * l), &field)?),
        curve.element(&parse_poly(&format!("z^{} + t*x^{l}*z^{l}", 2 * l), &field)?),
    ];
    let base = BundleSpec::new(curve.clone(), gens, 3 * l as i64)?;
    let pullback = base.pullback(1);
    let s1 = pullback.section_from_texts(
        &[
            &format!("(t^{p}-t^{})*z^{pl} - x^{}*z", 2 * p, pl - 1),
            &format!("-y^{}*z", pl - 1),
            &format!("(t^{p}-1)*x^{pl} - z^{pl}"),
        ],
        Some(3 * pl),
    )?;
    let class = lemma_class(&curve, p, l)?;
    Ok(LemmaSetup {
        base,
        pullback,
        s1,
        class,
    })
}

/// The explicit extension class: two sums of fractional monomials
/// `y^{2pl}/(x^a z^b)` with coefficients in `(t^p - 1)` and `(t^p - t^{2p})`.
fn lemma_class(curve: &Arc<PlaneCurve>, p: u64, l: u32) -> Result<CechClass> {
    let field = curve.field().clone();
    if field.transcendentals().is_empty() {
        return Err(SyzError::Invalid("the class needs the parameter t".into()));
    }
    let pl = p as u32 * l;
    let mut c = CechClass::zero(curve.clone(), 0);
    for i in 1..=pl {
        let coeff = field.parse_elem(&format!(
            "(t^{p}-1)^{}*(t^{p}-t^{})^{}",
            i - 1,
            2 * p,
            i - 1
        ))?;
        c.add_coeff(2 * pl - i, i, coeff);
    }
    for i in 1..=(pl - 1) {
        let coeff = field.parse_elem(&format!("(t^{p}-1)^{i}*(t^{p}-t^{})^{}", 2 * p, i - 1))?;
        c.add_coeff(pl - i, pl + i, coeff);
    }
    Ok(c)
}

fn lemma_p_general(params: &BTreeMap<String, i64>) -> Result<Report> {
    let (p, l) = validate_lemma_params(params)?;
    let mut b = ReportBuilder::new("lemma-p-general", params.clone());
    let setup = lemma_setup(p, l)?;
    let pl = p as u32 * l;
    smoothness_check_row(&mut b, &setup.base.curve);

    // special fiber t = 1: destabilizer of the first pullback
    let fam = FamilySpec::new(setup.base.clone(), vec!["t".into()])?;
    let mut t1 = BTreeMap::new();
    t1.insert("t".to_string(), "1".to_string());
    let fiber1 = fam.specialize(&t1)?;
    destabilizer_rows(&mut b, "special-fiber", &fiber1, 1);

    // the classical witness verifies explicitly
    let fiber_pb = fiber1.pullback(1);
    let classical = fiber_pb.section_from_texts(
        &[
            &format!("x^{}", pl - 1),
            &format!("y^{}", pl - 1),
            &format!("z^{}", pl - 1),
        ],
        Some(3 * pl - 1),
    )?;
    let cl_ok = fiber_pb.verify_syzygy(&classical.components)?
        && 2 * (3 * pl - 1) < fiber_pb.degrees.iter().sum::<u32>();
    b.check(
        "classical-destabilizer-verifies",
        "explicit-destabilizing-syzygy",
        move || {
            if cl_ok {
                pass(format!(
                    "(x^{0}, y^{0}, z^{0}) is a syzygy of total degree {1} below the slope bound",
                    pl - 1,
                    3 * pl - 1
                ))
            } else {
                fail("classical witness fails")
            }
        },
    );

    // generic fiber: s1 verifies and has no zeros
    let s1_ok = setup.pullback.verify_syzygy(&setup.s1.components)?;
    b.check("s1-verifies", "pullback-section-verifies", move || {
        if s1_ok {
            pass("s1 satisfies the syzygy identity")
        } else {
            fail("s1 fails the syzygy identity")
        }
    });
    let nv = setup.pullback.nowhere_vanishing(&setup.s1, None);
    let nv_detail = format!("{nv:?}");
    let nv_ok = nv.is_yes();
    b.check("s1-nowhere-vanishing", "section-without-zeros", move || {
        if nv_ok {
            pass(nv_detail)
        } else {
            inconclusive(nv_detail)
        }
    });

    // connecting class matches the explicit class projectively
    let computed = connecting_class(&setup.pullback, &setup.s1, None)?;
    let matches = computed.projectively_equal(&setup.class);
    let comp_str = computed.pretty();
    b.check(
        "connecting-class-matches",
        "extension-class-projective-match",
        move || {
            if matches {
                pass("delta(1) is projectively equal to the explicit class")
            } else {
                fail(format!("computed class differs: {comp_str}"))
            }
        },
    );

    let nonzero = !setup.class.is_zero();
    b.check("class-nonzero", "extension-class-nonzero", move || {
        if nonzero {
            pass("the class is a nonzero combination of basis monomials (non-split extension)")
        } else {
            fail("class is zero")
        }
    });

    // the coboundary witness of the membership claims
    let cob = is_zero_in_h1_bundle(&setup.class, &setup.pullback, &setup.s1, None)?;
    let detail = match &cob {
        cech::CoboundaryResult::Yes(w) => format!(
            "witness with denominator exponent {}",
            w.denominator_exponent
        ),
        cech::CoboundaryResult::NoWitnessUpTo { n_max } => {
            format!("no witness up to N = {n_max}")
        }
    };
    let ok = cob.is_yes();
    b.check("coboundary-witness", "section-class-coboundary", move || {
        if ok {
            pass(detail)
        } else {
            fail(detail)
        }
    });

    Ok(b.finish())
}

fn lemma_fitting(params: &BTreeMap<String, i64>) -> Result<Report> {
    let (p, l) = validate_lemma_params(params)?;
    if p < 3 {
        return Err(SyzError::BadParameter(
            "the fitting checks need p >= 3".into(),
        ));
    }
    let mut b = ReportBuilder::new("lemma-fitting", params.clone());
    let pl = p as u32 * l;
    let d = 3 * pl - 1;
    // constant-field curve
    let eq = format!("x^{d}+y^{d}+z^{d}+x^{pl}*z^{}", 2 * pl - 1);
    let curve0 = curve_from_texts(&format!("GF({p})"), &eq, ("x", "z"))?;
    let hw = hasse_witt(&curve0)?;
    let genus = curve0.genus() as usize;
    let dim_ok = hw.dim() == genus;
    b.check("hasse-witt-dims", "h1-dimension-genus", move || {
        if dim_ok {
            pass(format!("hasse-witt matrix is {genus} x {genus}"))
        } else {
            fail("dimension mismatch")
        }
    });
    let fit = hw.fitting()?;
    let (sd, nd, stab) = (
        fit.semisimple_dim(),
        fit.nilpotent_dim(),
        fit.stabilization_exponent,
    );
    let full = sd + nd == genus;
    b.check("fitting-direct-sum", "fitting-decomposition-full", move || {
        if full {
            pass(format!(
                "V_s dim {sd}, V_n dim {nd}, stabilization exponent {stab}"
            ))
        } else {
            fail("semisimple and nilpotent parts do not fill the space")
        }
    });

    // the class lives over F_p(t); build it on the relative curve
    let curve_t = curve_from_texts(&format!("GF({p})(t)"), &eq, ("x", "z"))?;
    let class = lemma_class(&curve_t, p, l)?;
    let deg0 = class.transcendental_component(0)?;
    let (s_part, n_part) = cech::class_fitting_projection(&deg0, &fit, &curve0)?;
    let n_nonzero = !n_part.is_zero();
    let s_zero = s_part.is_zero();
    b.check(
        "deg0-nilpotent-part-nonzero",
        "degree-zero-part-not-semisimple",
        move || {
            if n_nonzero {
                pass("nilpotent projection of the degree-0 part is nonzero")
            } else {
                fail("degree-0 part lies in the semisimple subspace")
            }
        },
    );
    if p == 3 && l == 1 {
        b.check(
            "deg0-fully-nilpotent",
            "degree-zero-part-nilpotent",
            move || {
                if s_zero {
                    pass("the degree-0 part has zero semisimple projection")
                } else {
                    fail("degree-0 part has a semisimple component")
                }
            },
        );
        // F^2(y^6/(x^3 z^3)) = -y^6/(x^3 z^3)
        let f0 = curve0.field().clone();
        let mut top = CechClass::zero(curve0.clone(), 0);
        top.add_coeff(3, 3, f0.one());
        let img = frobenius_on_class(&top, 2)?;
        let expect = top.scale(&f0.from_int(-1));
        let eig = img == expect;
        b.check(
            "top-term-eigenrelation",
            "second-frobenius-negates-class",
            move || {
                if eig {
                    pass("F^2(y^6/(x^3 z^3)) = -y^6/(x^3 z^3)")
                } else {
                    fail("eigenrelation fails")
                }
            },
        );
    }

    // the Frobenius-fixed subspace behind the covering construction
    let fixed = hw.fixed_subspace()?;
    let mut contained = true;
    let f0 = curve0.field().clone();
    for v in &fixed {
        let fv = hw.apply(v);
        if fv != *v {
            contained = false;
        }
        let (_, npart) = fit.project(&f0, v)?;
        if npart.iter().any(|c| !f0.is_zero(c)) {
            contained = false;
        }
    }
    let k = fixed.len();
    b.check("f-fixed-subspace", "frobenius-fixed-subspace", move || {
        if contained {
            pass(format!(
                "ker(F - id) has dimension {k} and lies in the semisimple part"
            ))
        } else {
            fail("fixed subspace verification failed")
        }
    });

    Ok(b.finish())
}

/// The unique syzygy supported on the printed monomials, when one exists.
/// Returns the resolved section and a diff description against the printed
/// coefficients.
fn support_constrained_resolution(
    spec: &BundleSpec,
    printed: &[HomogeneousPoly],
    j: u32,
) -> Result<Option<(Section, String)>> {
    let curve = &spec.curve;
    let field = spec.field().clone();
    // columns: printed monomials (with unknown coefficients), per component
    let mut cols: Vec<(usize, crate::poly::Exps)> = Vec::new();
    for (i, p) in printed.iter().enumerate() {
        for (e, _) in p.terms() {
            cols.push((i, *e));
        }
    }
    let rows = curve.graded_dim(j);
    let mut m = linalg::Matrix::zero(field.clone(), rows, cols.len());
    let dst: BTreeMap<crate::poly::Exps, usize> = curve
        .graded_basis(j)
        .into_iter()
        .enumerate()
        .map(|(i, e)| (e, i))
        .collect();
    for (cidx, (i, e)) in cols.iter().enumerate() {
        let prod = curve.nf(&spec.generators[*i].rep.mul_monomial(*e, &field.one()));
        for (ex, c) in prod.terms() {
            *m.at_mut(dst[ex], cidx) = c.clone();
        }
    }
    let kernel = linalg::kernel(&m);
    let Some(first) = kernel.first() else {
        return Ok(None);
    };
    // choose the scalar multiple minimizing coefficient differences
    let p_char = field.characteristic();
    let mut best: Option<(u64, usize)> = None;
    for scale in 1..p_char {
        let s = field.from_int(scale as i64);
        let mut diffs = 0usize;
        for (cidx, (i, e)) in cols.iter().enumerate() {
            let got = field.mul(&first[cidx], &s);
            if got != printed[*i].coeff(e) {
                diffs += 1;
            }
        }
        if best.map(|(_, d)| diffs < d).unwrap_or(true) {
            best = Some((scale, diffs));
        }
    }
    let (scale, diffs) = best.unwrap();
    let s = field.from_int(scale as i64);
    let mut components = Vec::with_capacity(spec.generators.len());
    for (i, &di) in spec.degrees.iter().enumerate() {
        let mut poly = HomogeneousPoly::zero(field.clone(), j - di);
        for (cidx, (ci, e)) in cols.iter().enumerate() {
            if ci == &i {
                poly.add_term(*e, field.mul(&first[cidx], &s));
            }
        }
        components.push(curve.element(&poly));
    }
    let section = Section {
        total_degree: j,
        components,
    };
    if !spec.verify_syzygy(&section.components)? {
        return Ok(None);
    }
    let detail = format!(
        "resolved on the printed support; {diffs} of {} printed coefficients adjusted",
        cols.len()
    );
    Ok(Some((section, detail)))
}

fn ex_335(params: &BTreeMap<String, i64>) -> Result<Report> {
    let mut b = ReportBuilder::new("ex-335", params.clone());
    let curve = curve_from_texts("GF(3)", "x^8+y^8+z^8+x^3*z^5", ("x", "z"))?;
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field)?),
        curve.element(&parse_poly("y^2", &field)?),
        curve.element(&parse_poly("z^2", &field)?),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3)?;
    smoothness_check_row(&mut b, &spec.curve);
    let pb = spec.pullback(2);

    let listed: [(&str, [&str; 3]); 2] = [
        ("s1", ["x^6*z^3", "y^6*z^3", "x*y^8 - x^4*z^5 + x*z^8 + z^9"]),
        (
            "s2",
            [
                "x^7*y^2 - x^3*y^2*z^4 - y^2*z^7",
                "x*y^8 + x^5*z^4 + x^2*z^7 - z^9",
                "x^6*y^2*z + x^5*y^2*z^2 + x^3*y^2*z^4 - x^2*y^2*z^5 + x*y^2*z^6 + y^2*z^7",
            ],
        ),
    ];
    let mut resolved_sections = Vec::new();
    for (name, texts) in &listed {
        let printed: Vec<HomogeneousPoly> = texts
            .iter()
            .map(|t| parse_poly(t, &field))
            .collect::<Result<_>>()?;
        let cand = pb.section_from_texts(texts, Some(27))?;
        let id = format!("{name}-verify");
        if pb.verify_syzygy(&cand.components)? {
            b.check(&id, "listed-section-verifies", || pass("verifies as printed"));
            resolved_sections.push(cand);
            continue;
        }
        match support_constrained_resolution(&pb, &printed, 27)? {
            Some((section, detail)) => {
                b.check(&id, "listed-section-verifies", move || {
                    pass(format!("printed coefficients are sign-garbled; {detail}"))
                });
                resolved_sections.push(section);
            }
            None => {
                b.check(&id, "listed-section-verifies", || {
                    fail("no syzygy exists on the printed monomial support")
                });
            }
        }
    }

    // diagnostic: both printed tuples verify on the sign-flipped curve
    let curve_m = curve_from_texts("GF(3)", "x^8+y^8+z^8-x^3*z^5", ("x", "z"))?;
    let fm = curve_m.field().clone();
    let gens_m = vec![
        curve_m.element(&parse_poly("x^2", &fm)?),
        curve_m.element(&parse_poly("y^2", &fm)?),
        curve_m.element(&parse_poly("z^2", &fm)?),
    ];
    let spec_m = BundleSpec::new(curve_m, gens_m, 3)?;
    let pb_m = spec_m.pullback(2);
    let mut both = true;
    for (_, texts) in &listed {
        let cand = pb_m.section_from_texts(texts, Some(27))?;
        if !pb_m.verify_syzygy(&cand.components)? {
            both = false;
        }
    }
    b.check(
        "printed-sections-on-sign-flipped-curve",
        "sign-transcription-diagnostic",
        move || {
            if both {
                pass("both printed tuples verify literally on the curve with -x^3*z^5, locating the sign discrepancy")
            } else {
                inconclusive("printed tuples do not verify on the sign-flipped curve either")
            }
        },
    );

    // triviality certificate from the resolved frame (unit wedge), with the
    // searched certificate as a fallback
    if resolved_sections.len() == 2 {
        let w = pb.wedge_scalar(&resolved_sections[0], &resolved_sections[1])?;
        if !pb.field().is_zero(&w) {
            let cert = crate::bundle::TrivialityCertificate {
                bundle: BundleFile::of(&spec),
                frobenius_exponent: 2,
                total_degree: 27,
                frame: resolved_sections.clone(),
                wedge: Some(pb.field().elem_to_string(&w)),
                nowhere_vanishing: Vec::new(),
                section_space_dim: pb.sections_dim(27),
            };
            b.check("triviality-certificate-e2", "rank2-triviality-frame", move || {
                pass_with(
                    "resolved sections frame the second pullback (unit wedge)".to_string(),
                    Certificate::from(&cert).to_value(),
                )
            });
            return Ok(b.finish());
        }
    }
    let cert = spec.triviality_certificate(2)?;
    b.check("triviality-certificate-e2", "rank2-triviality-frame", move || {
        match cert {
            Some(c) => pass_with(
                "certificate found from the computed section space".to_string(),
                Certificate::from(&c).to_value(),
            ),
            None => fail("no triviality certificate at e = 2"),
        }
    });
    Ok(b.finish())
}

fn ex_quintic_family(params: &BTreeMap<String, i64>) -> Result<Report> {
    let mut b = ReportBuilder::new("ex-quintic-family", params.clone());
    let curve = curve_from_texts("GF(3)(t)", "x^5+y^5+z^5+t*x^2*y^3", ("x", "z"))?;
    let field = curve.field().clone();
    let gens = vec![
        curve.element(&parse_poly("x^2", &field)?),
        curve.element(&parse_poly("y^2", &field)?),
        curve.element(&parse_poly("z^2", &field)?),
    ];
    let spec = BundleSpec::new(curve.clone(), gens, 3)?;
    smoothness_check_row(&mut b, &spec.curve);

    let pb = spec.pullback(3);
    let secs = pb.sections(81);
    let dim = secs.len();
    b.check("generic-sections-dim2", "pullback-section-space-dimension", move || {
        if dim == 2 {
            pass("dim H^0 of the third pullback (total degree 81) is 2")
        } else {
            fail(format!("dimension is {dim}, expected 2"))
        }
    });
    if secs.len() == 2 {
        let w = pb.wedge_scalar(&secs[0], &secs[1])?;
        if !pb.field().is_zero(&w) {
            let cert = crate::bundle::TrivialityCertificate {
                bundle: BundleFile::of(&spec),
                frobenius_exponent: 3,
                total_degree: 81,
                frame: secs.clone(),
                wedge: Some(pb.field().elem_to_string(&w)),
                nowhere_vanishing: Vec::new(),
                section_space_dim: 2,
            };
            b.check("generic-triviality-e3", "rank2-triviality-frame", move || {
                pass_with(
                    "the two syzygies frame the third pullback (unit wedge)".to_string(),
                    Certificate::from(&cert).to_value(),
                )
            });
        } else {
            b.check("generic-triviality-e3", "rank2-triviality-frame", || {
                fail("wedge of the computed basis vanishes")
            });
        }
    }

    // special fiber t = 0
    let fam = FamilySpec::new(spec.clone(), vec!["t".into()])?;
    let mut t0 = BTreeMap::new();
    t0.insert("t".to_string(), "0".to_string());
    let fiber = fam.specialize(&t0)?;
    destabilizer_rows(&mut b, "special-fiber", &fiber, 1);

    let fiber_pb = fiber.pullback(1);
    let s = fiber_pb.section_from_texts(&["z*y", "x*z", "x*y"], Some(8))?;
    let ok = fiber_pb.verify_syzygy(&s.components)?;
    let below = 2 * 8 < fiber_pb.degrees.iter().sum::<u32>();
    b.check("listed-syzygy-verifies", "explicit-destabilizing-syzygy", move || {
        if ok && below {
            pass("(zy, xz, xy) is a syzygy of total degree 8 < 9")
        } else {
            fail("listed syzygy fails")
        }
    });
    let nv = fiber_pb.nowhere_vanishing(&s, None);
    let nv_ok = nv.is_yes();
    let nv_detail = format!("{nv:?}");
    b.check(
        "listed-syzygy-nowhere-vanishing",
        "section-without-zeros",
        move || {
            if nv_ok {
                pass(nv_detail)
            } else {
                inconclusive(nv_detail)
            }
        },
    );
    Ok(b.finish())
}

fn family_scan_demo(params: &BTreeMap<String, i64>) -> Result<Report> {
    let mut b = ReportBuilder::new("family-scan-demo", params.clone());
    let family = char2_family(2, 0)?;
    let mut sub = BTreeMap::new();
    sub.insert("s".to_string(), "1-t".to_string());
    let cor = family.specialize(&sub)?;
    let fam = FamilySpec::new(cor, vec!["t".into()])?;
    let fibers: Vec<BTreeMap<String, String>> = ["0", "1"]
        .iter()
        .map(|v| {
            let mut m = BTreeMap::new();
            m.insert("t".to_string(), v.to_string());
            m
        })
        .collect();
    let table = fam.scan(&fibers, 2)?;
    let rows = table.rows.clone();
    let t0_ok = rows.iter().any(|r| r.fiber == "t=0" && r.minimal_e == Some(0));
    let t1_ok = rows
        .iter()
        .any(|r| r.fiber == "t=1" && r.minimal_e.is_none() && r.error.is_none());
    let gen_ok = rows
        .iter()
        .any(|r| r.fiber == "generic" && r.minimal_e == Some(2));
    let table_json = serde_json::to_value(&table)?;
    b.check("fiber-t0-trivial-e0", "scan-special-fiber-trivial", move || {
        if t0_ok {
            pass("t = 0 fiber trivializes at e = 0")
        } else {
            fail("unexpected minimal exponent at t = 0")
        }
    });
    b.check("fiber-t1-no-certificate", "scan-special-fiber-obstructed", move || {
        if t1_ok {
            pass("t = 1 fiber admits no certificate up to e = 2")
        } else {
            fail("unexpected certificate at t = 1")
        }
    });
    b.check("generic-minimal-e", "scan-generic-fiber-minimal-exponent", move || {
        if gen_ok {
            pass_with(
                "generic fiber trivializes first at e = 2".to_string(),
                table_json,
            )
        } else {
            fail("generic minimal exponent differs from 2")
        }
    });
    Ok(b.finish())
}

fn rem_deg_stretch(params: &BTreeMap<String, i64>) -> Result<Report> {
    let d = get_param(params, "d")?;
    if ![171, 173, 175, 177].contains(&d) {
        return Err(SyzError::BadParameter(format!(
            "d = {d} is not one of 171, 173, 175, 177"
        )));
    }
    let mut b = ReportBuilder::new("rem-deg-stretch", params.clone());
    // the ninth pullback works in total degree 3 * 512 = 1536; the section
    // matrix has ~ d * 1536 rows, beyond desk scale, so this row reports
    // INCONCLUSIVE with the size estimate instead of attempting the kernel
    let q: u64 = 512;
    let rows_estimate = (d as u64) * 3 * q;
    let guard_limit: u64 = 60_000;
    b.check("e9-section-search", "stretch-triviality-search", move || {
        if rows_estimate > guard_limit {
            inconclusive(format!(
                "resource guard: the degree-{} section system has about {rows_estimate} rows \
                 (limit {guard_limit}); not attempted on this profile",
                3 * q
            ))
        } else {
            fail("guard misconfigured")
        }
    });
    Ok(b.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_list_contains_required_names() {
        let names: Vec<&str> = scenario_list().iter().map(|s| s.name).collect();
        for required in [
            "thm-char2",
            "lemma-p-general",
            "ex-quintic-family",
            "cor-char2",
            "rem-deg11",
            "rem-nonordinary",
            "lemma-fitting",
            "ex-335",
            "family-scan-demo",
        ] {
            assert!(names.contains(&required), "{required} missing");
        }
    }

    #[test]
    fn out_of_range_parameters_rejected() {
        let mut p = BTreeMap::new();
        p.insert("n".to_string(), 2i64);
        p.insert("l".to_string(), 1i64);
        assert!(matches!(
            scenario_run("thm-char2", &p),
            Err(SyzError::BadParameter(_))
        ));
        let mut p2 = BTreeMap::new();
        p2.insert("n".to_string(), 3i64);
        p2.insert("l".to_string(), 1i64);
        assert!(matches!(
            scenario_run("thm-char2", &p2),
            Err(SyzError::BadParameter(_))
        ));
        assert!(matches!(
            scenario_run("nope", &BTreeMap::new()),
            Err(SyzError::UnknownScenario(_))
        ));
    }

    #[test]
    fn nonordinary_quick_scenario_passes() {
        let mut p = BTreeMap::new();
        p.insert("n".to_string(), 2i64);
        p.insert("l".to_string(), 0i64);
        let r = scenario_run("rem-nonordinary", &p).unwrap();
        assert!(r.passed(), "{}", r.render_text());
    }

    #[test]
    fn reports_are_deterministic() {
        let mut p = BTreeMap::new();
        p.insert("n".to_string(), 2i64);
        p.insert("l".to_string(), 0i64);
        let a = scenario_run("rem-nonordinary", &p).unwrap();
        let b = scenario_run("rem-nonordinary", &p).unwrap();
        assert_eq!(a.canonical_json().unwrap(), b.canonical_json().unwrap());
    }
}
