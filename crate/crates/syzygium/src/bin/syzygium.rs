//! Command-line surface: every library operation plus the scenario suite,
//! with text or JSON output.
//!
//! Exit codes: 0 success/PASS, 1 FAIL, 2 usage or parse error,
//! 3 INCONCLUSIVE-only.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use syzygium::bundle::{BundleFile, BundleSpec, NowhereVanishing, Section};
use syzygium::cech::{self, CechClass, Cochain};
use syzygium::certificate::{Certificate, DestabilizerFile, NowhereVanishingFile};
use syzygium::curve::{PlaneCurve, SmoothnessResult, Var};
use syzygium::error::{Result, SyzError};
use syzygium::field::Field;
use syzygium::poly::parse_poly;
use syzygium::report::Report;
use syzygium::scenario::{self, Profile};

#[derive(Parser)]
#[command(
    name = "syzygium",
    version,
    about = "Exact syzygy bundles on plane curves: sections, Frobenius pullbacks, Cech H^1, \
             Hasse-Witt actions and machine-checkable certificates"
)]
struct Cli {
    /// Output format for structured results
    #[arg(long, global = true, value_enum, default_value_t = Output::Text)]
    output: Output,

    /// Directory for report/certificate files (default: SYZYGIUM_OUT_DIR)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Args, Clone)]
struct CurveArgs {
    /// Field descriptor, e.g. GF(2), GF(3)(t), GF(4)=GF(2)[a]/(a^2+a+1)
    #[arg(long)]
    field: String,
    /// Curve equation (inline polynomial text or @file)
    #[arg(long)]
    curve: String,
    /// Chart cover variables, e.g. x,z
    #[arg(long, default_value = "x,z")]
    cover: String,
}

#[derive(Args, Clone)]
struct BundleArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Semicolon-separated generators (inline or @file with one per line)
    #[arg(long)]
    generators: String,
    /// Twist of the bundle
    #[arg(long)]
    twist: i64,
}

#[derive(Subcommand)]
enum Command {
    /// Basis of the syzygies of a total degree
    Sections {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        degree: u32,
    },
    /// Frobenius pullback of a bundle spec
    Pullback {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        e: u32,
    },
    /// Check a candidate syzygy tuple
    VerifySyzygy {
        #[command(flatten)]
        bundle: BundleArgs,
        /// Semicolon-separated components (inline or @file)
        #[arg(long)]
        candidate: String,
        #[arg(long)]
        degree: Option<u32>,
    },
    /// Certify that a section has no zeros on the curve
    NowhereVanishing {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        section: String,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Search pullbacks for a destabilizing syzygy
    Destabilizer {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 2)]
        emax: u32,
    },
    /// Search for a trivializing frame of the e-th pullback
    Trivialize {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long)]
        e: u32,
    },
    /// Monomial basis of H^1(O(twist)) for the two-chart cover
    H1Basis {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long, default_value_t = 0)]
        twist: i64,
    },
    /// Reduce a fractional cochain to H^1 coordinates
    CechNf {
        #[command(flatten)]
        curve: CurveArgs,
        /// Sum of terms P/(u^a*v^b), e.g. "z^3/(x^1*y^2) + z^2/(x*y)"
        #[arg(long)]
        cochain: String,
    },
    /// Matrix of the Frobenius action on H^1(O)
    HasseWitt {
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Fitting decomposition of the Hasse-Witt action
    Fitting {
        #[command(flatten)]
        curve: CurveArgs,
    },
    /// Connecting class delta(1) of a nowhere-vanishing section
    ConnectingClass {
        #[command(flatten)]
        bundle: BundleArgs,
        #[arg(long, default_value_t = 0)]
        e: u32,
        #[arg(long)]
        section: String,
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Scan fibers of a family for minimal trivializing exponents
    ScanFamily {
        /// Bundle spec JSON file
        #[arg(long)]
        spec: PathBuf,
        /// Semicolon-separated fibers, e.g. "t=0;t=1"
        #[arg(long)]
        fibers: String,
        #[arg(long, default_value_t = 2)]
        emax: u32,
    },
    /// Saturation smoothness check of a curve
    Smoothness {
        #[command(flatten)]
        curve: CurveArgs,
        #[arg(long)]
        nmax: Option<u32>,
    },
    /// Scenario operations
    Scenario {
        #[command(subcommand)]
        cmd: ScenarioCmd,
    },
    /// Run a scenario profile
    Suite {
        #[arg(long, default_value = "quick")]
        profile: String,
        /// Worker pool size
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Re-verify a certificate file without recomputing kernels
    CheckCertificate { file: PathBuf },
}

#[derive(Subcommand)]
enum ScenarioCmd {
    /// List scenarios and their parameter ranges
    List,
    /// Run one scenario
    Run {
        name: String,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        l: Option<i64>,
        #[arg(long)]
        p: Option<i64>,
        #[arg(long)]
        d: Option<i64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| std::env::var_os("SYZYGIUM_OUT_DIR").map(PathBuf::from));
    match run(cli, out_dir) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                SyzError::Parse { .. }
                | SyzError::BadParameter(_)
                | SyzError::UnknownScenario(_)
                | SyzError::Degree(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn indirect(text: &str) -> Result<String> {
    if let Some(path) = text.strip_prefix('@') {
        Ok(std::fs::read_to_string(path)?)
    } else {
        Ok(text.to_string())
    }
}

fn build_curve(args: &CurveArgs) -> Result<Arc<PlaneCurve>> {
    let field = Field::parse(&args.field)?;
    let eq_text = indirect(&args.curve)?;
    let eq = parse_poly(&eq_text, &field)?;
    let mut cover = args.cover.split(',');
    let u = Var::parse(cover.next().unwrap_or(""))?;
    let v = Var::parse(cover.next().unwrap_or(""))?;
    PlaneCurve::new(eq, (u, v))
}

fn build_bundle(args: &BundleArgs) -> Result<BundleSpec> {
    let curve = build_curve(&args.curve)?;
    let field = curve.field().clone();
    let gen_text = indirect(&args.generators)?;
    let mut gens = Vec::new();
    for part in split_list(&gen_text) {
        gens.push(curve.element(&parse_poly(&part, &field)?));
    }
    BundleSpec::new(curve, gens, args.twist)
}

/// Split a semicolon- or newline-separated list of polynomial texts.
fn split_list(text: &str) -> Vec<String> {
    text.split(';')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| s.to_string())
        .collect()
}

fn parse_section_arg(spec: &BundleSpec, text: &str, degree: Option<u32>) -> Result<Section> {
    let body = indirect(text)?;
    let parts = split_list(&body);
    let refs: Vec<&str> = parts.iter().map(|s| s.as_str()).collect();
    spec.section_from_texts(&refs, degree)
}

fn emit<T: Serialize>(output: Output, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    match output {
        Output::Json => println!("{}", serde_json::to_string_pretty(value)?),
        Output::Text => println!("{}", text()),
    }
    Ok(())
}

#[derive(Serialize)]
struct SectionsOut {
    bundle: BundleFile,
    degree: u32,
    dimension: usize,
    sections: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct VerifyOut {
    verified: bool,
    total_degree: u32,
}

#[derive(Serialize)]
struct ClassOut {
    twist: i64,
    entries: Vec<cech::ClassEntry>,
    pretty: String,
}

#[derive(Serialize)]
struct MatrixOut {
    dim: usize,
    rows: Vec<Vec<String>>,
}

#[derive(Serialize)]
struct FittingOut {
    dim: usize,
    semisimple_dim: usize,
    nilpotent_dim: usize,
    stabilization_exponent: u32,
    semisimple_basis: Vec<Vec<String>>,
    nilpotent_basis: Vec<Vec<String>>,
}

fn class_out(class: &CechClass) -> ClassOut {
    ClassOut {
        twist: class.twist,
        entries: class.serialize_entries(),
        pretty: class.pretty(),
    }
}

fn write_out(out_dir: &Option<PathBuf>, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn run(cli: Cli, out_dir: Option<PathBuf>) -> Result<ExitCode> {
    let output = cli.output;
    match cli.command {
        Command::Sections { bundle, degree } => {
            let spec = build_bundle(&bundle)?;
            let secs = spec.sections(degree);
            let out = SectionsOut {
                bundle: BundleFile::of(&spec),
                degree,
                dimension: secs.len(),
                sections: secs.iter().map(|s| s.component_strings()).collect(),
            };
            emit(output, &out, || {
                let mut s = format!("dimension {} in total degree {degree}\n", out.dimension);
                for (i, sec) in out.sections.iter().enumerate() {
                    s.push_str(&format!("  [{i}] ({})\n", sec.join(", ")));
                }
                s
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Pullback { bundle, e } => {
            let spec = build_bundle(&bundle)?;
            let pb = spec.pullback(e);
            let out = BundleFile::of(&pb);
            emit(output, &out, || {
                format!(
                    "Syz({})({}) on {}",
                    out.generators.join(", "),
                    out.twist,
                    out.curve.equation
                )
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::VerifySyzygy {
            bundle,
            candidate,
            degree,
        } => {
            let spec = build_bundle(&bundle)?;
            let section = parse_section_arg(&spec, &candidate, degree)?;
            let verified = spec.verify_syzygy(&section.components)?;
            let out = VerifyOut {
                verified,
                total_degree: section.total_degree,
            };
            emit(output, &out, || {
                format!(
                    "{} (total degree {})",
                    if verified { "verified" } else { "NOT a syzygy" },
                    out.total_degree
                )
            })?;
            Ok(if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::NowhereVanishing {
            bundle,
            section,
            degree,
            nmax,
        } => {
            let spec = build_bundle(&bundle)?;
            let s = parse_section_arg(&spec, &section, degree)?;
            if !spec.verify_syzygy(&s.components)? {
                return Err(SyzError::Invalid("candidate is not a syzygy".into()));
            }
            let nv = spec.nowhere_vanishing(&s, nmax);
            let code = match &nv {
                NowhereVanishing::Yes {
                    exponent,
                    specialization,
                } => {
                    let cert = Certificate::NowhereVanishing(NowhereVanishingFile {
                        bundle: BundleFile::of(&spec),
                        total_degree: s.total_degree,
                        section: s.component_strings(),
                        exponent: *exponent,
                        specialization: specialization.clone(),
                    });
                    write_out(&out_dir, "nowhere_vanishing.json", &cert.to_json()?)?;
                    ExitCode::SUCCESS
                }
                NowhereVanishing::Inconclusive { .. } => ExitCode::from(3),
            };
            emit(output, &nv, || format!("{nv:?}"))?;
            Ok(code)
        }
        Command::Destabilizer { bundle, emax } => {
            let spec = build_bundle(&bundle)?;
            match spec.find_destabilizer(emax) {
                Some(w) => {
                    let cert = Certificate::Destabilizer(DestabilizerFile {
                        bundle: BundleFile::of(&spec),
                        frobenius_exponent: w.e,
                        total_degree: w.total_degree,
                        section: w.section.component_strings(),
                    });
                    write_out(&out_dir, "destabilizer.json", &cert.to_json()?)?;
                    emit(output, &cert, || {
                        format!(
                            "destabilizer at e = {}, total degree {}: ({})",
                            w.e,
                            w.total_degree,
                            w.section.component_strings().join(", ")
                        )
                    })?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    #[derive(Serialize)]
                    struct NoWitness {
                        no_syzygy_destabilizer_up_to: u32,
                    }
                    emit(
                        output,
                        &NoWitness {
                            no_syzygy_destabilizer_up_to: emax,
                        },
                        || {
                            format!(
                                "no syzygy destabilizer up to e = {emax} (evidence, not proof)"
                            )
                        },
                    )?;
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::Trivialize { bundle, e } => {
            let spec = build_bundle(&bundle)?;
            match spec.triviality_certificate(e)? {
                Some(cert) => {
                    let file = Certificate::from(&cert);
                    write_out(&out_dir, "triviality.json", &file.to_json()?)?;
                    emit(output, &file, || {
                        format!(
                            "trivializing frame at e = {e} with wedge {}",
                            cert.wedge.clone().unwrap_or_else(|| "-".into())
                        )
                    })?;
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    emit(output, &serde_json::json!({ "certificate": null }), || {
                        format!("no trivializing frame found at e = {e}")
                    })?;
                    Ok(ExitCode::from(3))
                }
            }
        }
        Command::H1Basis { curve, twist } => {
            let c = build_curve(&curve)?;
            let basis = cech::h1_basis(&c, twist);
            #[derive(Serialize)]
            struct BasisOut {
                twist: i64,
                dimension: usize,
                basis: Vec<(u32, u32, u32)>,
            }
            let out = BasisOut {
                twist,
                dimension: basis.len(),
                basis: basis.clone(),
            };
            let (u, v, w) = (c.cover.0.name(), c.cover.1.name(), c.w.name());
            emit(output, &out, || {
                let mons: Vec<String> = basis
                    .iter()
                    .map(|(a, b, m)| format!("{w}^{m}/({u}^{a}*{v}^{b})"))
                    .collect();
                format!("dimension {}:\n  {}", out.dimension, mons.join("\n  "))
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CechNf { curve, cochain } => {
            let c = build_curve(&curve)?;
            let text = indirect(&cochain)?;
            let cochain = parse_cochain(&c, &text)?;
            let class = cochain.nf()?;
            emit(output, &class_out(&class), || class.pretty())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::HasseWitt { curve } => {
            let c = build_curve(&curve)?;
            let hw = cech::hasse_witt(&c)?;
            let field = c.field().clone();
            let rows: Vec<Vec<String>> = (0..hw.dim())
                .map(|i| {
                    (0..hw.dim())
                        .map(|j| field.elem_to_string(hw.matrix.at(i, j)))
                        .collect()
                })
                .collect();
            let out = MatrixOut {
                dim: hw.dim(),
                rows,
            };
            emit(output, &out, || {
                let mut s = format!("{0} x {0} matrix:\n", out.dim);
                for r in &out.rows {
                    s.push_str(&format!("  [{}]\n", r.join(", ")));
                }
                s
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fitting { curve } => {
            let c = build_curve(&curve)?;
            let hw = cech::hasse_witt(&c)?;
            let fit = hw.fitting()?;
            let field = c.field().clone();
            let basis_strings = |basis: &[Vec<syzygium::field::Elem>]| -> Vec<Vec<String>> {
                basis
                    .iter()
                    .map(|v| v.iter().map(|e| field.elem_to_string(e)).collect())
                    .collect()
            };
            let out = FittingOut {
                dim: fit.dim,
                semisimple_dim: fit.semisimple_dim(),
                nilpotent_dim: fit.nilpotent_dim(),
                stabilization_exponent: fit.stabilization_exponent,
                semisimple_basis: basis_strings(&fit.semisimple_basis),
                nilpotent_basis: basis_strings(&fit.nilpotent_basis),
            };
            emit(output, &out, || {
                format!(
                    "dim {}: semisimple {}, nilpotent {}, stabilization exponent {}",
                    out.dim, out.semisimple_dim, out.nilpotent_dim, out.stabilization_exponent
                )
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ConnectingClass {
            bundle,
            e,
            section,
            degree,
            nmax,
        } => {
            let spec = build_bundle(&bundle)?.pullback(e);
            let s = parse_section_arg(&spec, &section, degree)?;
            if !spec.verify_syzygy(&s.components)? {
                return Err(SyzError::Invalid("candidate is not a syzygy".into()));
            }
            let class = cech::connecting_class(&spec, &s, nmax)?;
            emit(output, &class_out(&class), || class.pretty())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ScanFamily { spec, fibers, emax } => {
            let text = std::fs::read_to_string(&spec)?;
            let file: BundleFile = serde_json::from_str(&text)?;
            let family = file.build_family()?;
            let fiber_list = parse_fibers(&fibers)?;
            let table = family.scan(&fiber_list, emax)?;
            emit(output, &table, || {
                let mut s = String::new();
                for row in &table.rows {
                    let e = row
                        .minimal_e
                        .map(|e| format!("e = {e}"))
                        .unwrap_or_else(|| "none".into());
                    s.push_str(&format!("  {:<12} minimal {}\n", row.fiber, e));
                }
                s
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Smoothness { curve, nmax } => {
            let c = build_curve(&curve)?;
            let r = c.smoothness_check(nmax);
            emit(output, &r, || format!("{r:?}"))?;
            Ok(match r {
                SmoothnessResult::Smooth { .. } => ExitCode::SUCCESS,
                SmoothnessResult::Inconclusive { .. } => ExitCode::from(3),
            })
        }
        Command::Scenario { cmd } => match cmd {
            ScenarioCmd::List => {
                let list = scenario::scenario_list();
                #[derive(Serialize)]
                struct InfoOut {
                    name: String,
                    params: Vec<(String, String)>,
                    summary: String,
                }
                let out: Vec<InfoOut> = list
                    .iter()
                    .map(|i| InfoOut {
                        name: i.name.to_string(),
                        params: i
                            .params
                            .iter()
                            .map(|(a, b)| (a.to_string(), b.to_string()))
                            .collect(),
                        summary: i.summary.to_string(),
                    })
                    .collect();
                emit(output, &out, || {
                    let mut s = String::new();
                    for i in &list {
                        let params: Vec<String> = i
                            .params
                            .iter()
                            .map(|(a, b)| format!("{a} ({b})"))
                            .collect();
                        s.push_str(&format!(
                            "{:<18} params: {}\n    {}\n",
                            i.name,
                            if params.is_empty() {
                                "none".to_string()
                            } else {
                                params.join(", ")
                            },
                            i.summary
                        ));
                    }
                    s
                })?;
                Ok(ExitCode::SUCCESS)
            }
            ScenarioCmd::Run { name, n, l, p, d } => {
                let mut params = BTreeMap::new();
                for (k, v) in [("n", n), ("l", l), ("p", p), ("d", d)] {
                    if let Some(v) = v {
                        params.insert(k.to_string(), v);
                    }
                }
                let report = scenario::scenario_run(&name, &params)?;
                write_out(&out_dir, "scenario.json", &report.to_json()?)?;
                emit(output, &report, || report.render_text())?;
                Ok(report_exit(&report))
            }
        },
        Command::Suite { profile, jobs } => {
            let profile = Profile::parse(&profile)?;
            let reports = scenario::suite_run(profile, jobs);
            if let Some(dir) = &out_dir {
                std::fs::create_dir_all(dir)?;
                for (i, r) in reports.iter().enumerate() {
                    let name = format!("suite_{i:02}_{}.json", r.name);
                    std::fs::write(dir.join(name), r.to_json()?)?;
                }
            }
            emit(output, &reports, || {
                let mut s = String::new();
                for r in &reports {
                    s.push_str(&r.render_text());
                    s.push('\n');
                }
                let pass = reports.iter().filter(|r| r.passed()).count();
                s.push_str(&format!("{}/{} scenarios passed\n", pass, reports.len()));
                s
            })?;
            if reports.iter().any(|r| !r.passed()) {
                Ok(ExitCode::from(1))
            } else if reports.iter().any(|r| r.inconclusive_only()) {
                Ok(ExitCode::from(3))
            } else {
                Ok(ExitCode::SUCCESS)
            }
        }
        Command::CheckCertificate { file } => {
            let text = std::fs::read_to_string(&file)?;
            let cert = Certificate::from_json(&text)?;
            match cert.check() {
                Ok(summary) => {
                    emit(
                        output,
                        &serde_json::json!({ "ok": true, "summary": summary }),
                        || summary.clone(),
                    )?;
                    Ok(ExitCode::SUCCESS)
                }
                Err(e) => {
                    emit(
                        output,
                        &serde_json::json!({ "ok": false, "error": e.to_string() }),
                        || format!("certificate REJECTED: {e}"),
                    )?;
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn report_exit(report: &Report) -> ExitCode {
    if !report.passed() {
        ExitCode::from(1)
    } else if report.inconclusive_only() {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

/// Parse "t=0;t=1"-style fiber lists into assignment maps.
fn parse_fibers(text: &str) -> Result<Vec<BTreeMap<String, String>>> {
    let mut out = Vec::new();
    for fiber in text.split(';').map(|s| s.trim()).filter(|s| !s.is_empty()) {
        let mut m = BTreeMap::new();
        for assign in fiber.split(',').map(|s| s.trim()) {
            let (k, v) = assign.split_once('=').ok_or_else(|| SyzError::Parse {
                pos: 0,
                msg: format!("expected name=value in fiber {fiber:?}"),
            })?;
            m.insert(k.trim().to_string(), v.trim().to_string());
        }
        out.push(m);
    }
    Ok(out)
}

/// Parse a sum of fractional terms `P/(u^a*v^b)` into a cochain.
fn parse_cochain(curve: &Arc<PlaneCurve>, text: &str) -> Result<Cochain> {
    let field = curve.field().clone();
    let mut terms = Vec::new();
    for (term, negate) in split_signed_terms(text) {
        let (num_text, den) = match term.rsplit_once('/') {
            Some((n, d)) => (n.trim().to_string(), Some(d.trim().to_string())),
            None => (term.clone(), None),
        };
        let mut num = parse_poly(&num_text, &field)?;
        if negate {
            num = num.neg();
        }
        let (a, b) = match den {
            None => (0, 0),
            Some(d) => {
                let d = d
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .map(|s| s.to_string())
                    .unwrap_or(d);
                let mono = parse_poly(&d, &field)?;
                if mono.num_terms() != 1 {
                    return Err(SyzError::Parse {
                        pos: 0,
                        msg: "denominator must be a single monomial in the cover variables"
                            .into(),
                    });
                }
                let (exps, _) = mono.terms().next().unwrap();
                let exp_of = |v: Var| match v {
                    Var::X => exps.0,
                    Var::Y => exps.1,
                    Var::Z => exps.2,
                };
                if exp_of(curve.w) != 0 {
                    return Err(SyzError::Parse {
                        pos: 0,
                        msg: "denominator may only involve the cover variables".into(),
                    });
                }
                (exp_of(curve.cover.0), exp_of(curve.cover.1))
            }
        };
        terms.push((num, a, b));
    }
    Ok(Cochain {
        curve: curve.clone(),
        terms,
    })
}

/// Split into top-level summands, tracking parentheses; returns each term
/// with its sign.
fn split_signed_terms(text: &str) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut cur = String::new();
    let mut negate = false;
    for ch in text.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                cur.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if !cur.trim().is_empty() {
                    out.push((cur.trim().to_string(), negate));
                }
                cur = String::new();
                negate = ch == '-';
            }
            _ => cur.push(ch),
        }
    }
    if !cur.trim().is_empty() {
        out.push((cur.trim().to_string(), negate));
    }
    out
}
