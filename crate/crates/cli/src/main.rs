//! Command-line front end for the rank-jump toolkit.
//!
//! Wires the family builders, rank certificates, base-change engine, and
//! specialization surveys into reproducible batch runs. Every command emits
//! JSON (a single document for certificates, JSON lines for surveys), writes
//! it to stdout or `--out`, and prints a one-line verdict on stderr.
//!
//! Exit codes: 0 on PASS or completion, 1 on FAIL verdicts, 2 on usage or
//! input errors, 3 on internal invariant violations (bugs).

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;
use std::{env, fs, thread};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use rankjump_core::conic::{
    conic_base_change, double_base_change, double_jump_report, new_section_independence,
    quadratic_pullback, search_points_on_cab_threaded, CabPoint, ConicBaseChange,
    DoubleJumpReport,
};
use rankjump_core::counting::nontorsion_witness_by_orders;
use rankjump_core::curve::CurvePoint;
use rankjump_core::error::Error;
use rankjump_core::families::{Family, FamilyConfig, FamilySection, ShiodaFamily};
use rankjump_core::field::Field;
use rankjump_core::heights::HeightSettings;
use rankjump_core::jacobian::embed;
use rankjump_core::rational::Rational;
use rankjump_core::specialize::{rank_jump_search, specialize_family};
use rankjump_core::surface::{
    conic_bundle_rho, generic_rank_table, shioda_tate_rank, FamilyKind, FibrationData,
};
use rankjump_core::twotorsion::{certify_biquadratic_ranks, certify_generic_rank};

#[derive(Parser)]
#[command(
    name = "rankjump",
    version,
    about = "Certify and survey rank jumps in families of hyperelliptic Jacobians"
)]
struct Cli {
    /// Write the JSON output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify the exact divisor-class relation suite of a family.
    Verify(FamilyArg),
    /// Certify generic ranks: matching lower and upper bounds.
    Certify(CertifyArgs),
    /// Base changes: conic extension with a new section, or, with --b, the
    /// double extension with a rational-point search.
    Basechange(BasechangeArgs),
    /// Survey integer specializations of the conic extension for rank jumps.
    Search(SearchArgs),
    /// Scan double extensions over a grid of (a, b) for rational points.
    CabScan(CabScanArgs),
    /// Fibration rank bookkeeping: rho = r + 2 + sum(m_v - 1) + trace.
    ShiodaTate(ShiodaTateArgs),
}

#[derive(Args)]
struct FamilyArg {
    /// Family configuration file (JSON with p_roots and optional q, a).
    #[arg(long)]
    family: PathBuf,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    family: FamilyArg,

    /// Odd primes for the supplementary non-torsion witnesses at the first
    /// good integer fiber.
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7, 11])]
    primes: Vec<u64>,
}

#[derive(Args)]
struct BasechangeArgs {
    #[command(flatten)]
    family: FamilyArg,

    /// First parameter: x-coordinate of the new section (e.g. 2 or -1/2).
    #[arg(long, allow_hyphen_values = true)]
    a: String,

    /// Second parameter: switch to the double extension through (a, b).
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,

    /// Height bound on t for the double-extension point search.
    #[arg(long, default_value_t = 200)]
    height: i64,

    /// Specialization parameters s for the new-section witnesses.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true,
          default_values_t = ["2".to_string(), "3".to_string()])]
    s: Vec<String>,

    /// Witness primes for the new-section specializations.
    #[arg(long, value_delimiter = ',', default_values_t = [5u64, 7, 11])]
    primes: Vec<u64>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    family: FamilyArg,

    /// x-coordinate of the new section.
    #[arg(long, allow_hyphen_values = true)]
    a: String,

    /// Range "LO..HI" (inclusive integers) or comma list of rational s.
    #[arg(long = "s-num", allow_hyphen_values = true)]
    s_num: String,

    /// Gram-determinant threshold for certifying a fiber.
    #[arg(long, default_value_t = 1e-2)]
    eps: f64,

    /// Doubling budget for canonical heights.
    #[arg(long, default_value_t = 6)]
    doublings: u32,

    /// Target error for the height computation (best effort at the budget).
    #[arg(long, default_value_t = 1e-3)]
    target_error: f64,

    /// Coefficient bound for the exhaustive relation search.
    #[arg(long, default_value_t = 10)]
    relation_bound: i64,
}

#[derive(Args)]
struct CabScanArgs {
    #[command(flatten)]
    family: FamilyArg,

    /// Bound on |a| over the integer grid.
    #[arg(long, default_value_t = 5)]
    a_bound: i64,

    /// Bound on |b| over the integer grid.
    #[arg(long, default_value_t = 5)]
    b_bound: i64,

    /// Height bound on t for each point search.
    #[arg(long, default_value_t = 200)]
    height: i64,

    /// Cap on the points fed into the double-jump report.
    #[arg(long, default_value_t = 3)]
    report_points: usize,
}

#[derive(Args)]
struct ShiodaTateArgs {
    /// Neron-Severi rank of the fibered surface.
    #[arg(long)]
    rho: i64,

    /// Component counts m_v per singular fiber; at most one entry may be the
    /// symbol m_inf for the unknown fiber at infinity.
    #[arg(long, value_delimiter = ',')]
    fibers: Vec<String>,

    /// Rank of the constant part.
    #[arg(long, default_value_t = 0)]
    trace: i64,

    /// Degenerate-fiber count of a second conic-bundle fibration of the same
    /// surface; eliminates m_inf via rho - m_inf = that count.
    #[arg(long)]
    conic_degenerate: Option<i64>,
}

/// Outcome of a command: the JSON artifact plus the verdict that drives the
/// exit code.
struct Outcome {
    /// Pretty-printed document or newline-separated JSON records.
    text: String,
    /// One-line human verdict for stderr.
    verdict: String,
    /// False only for FAIL verdicts (exit 1).
    passed: bool,
}

/// A failure before any artifact is produced: exit 2 (input) or 3 (bug).
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Internal(_) => 3,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Display) -> Failure {
    Failure {
        code: 2,
        message: message.to_string(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Cmd::Verify(args) => run_verify(args),
        Cmd::Certify(args) => run_certify(args),
        Cmd::Basechange(args) => run_basechange(args),
        Cmd::Search(args) => run_search(args),
        Cmd::CabScan(args) => run_cab_scan(args),
        Cmd::ShiodaTate(args) => run_shioda_tate(args),
    };
    match result {
        Ok(outcome) => {
            if let Some(path) = &cli.out {
                if let Err(e) = fs::write(path, &outcome.text) {
                    eprintln!("rankjump: cannot write {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            } else {
                print!("{}", outcome.text);
            }
            eprintln!("{}", outcome.verdict);
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(f) => {
            eprintln!("rankjump: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

/// Worker-pool size: RANKJUMP_THREADS when set, else the machine parallelism.
fn worker_threads() -> Result<usize, Failure> {
    match env::var("RANKJUMP_THREADS") {
        Ok(raw) => match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(n),
            _ => Err(usage(format!(
                "RANKJUMP_THREADS must be a positive integer, got {raw:?}"
            ))),
        },
        Err(_) => Ok(thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn load_family(path: &PathBuf) -> Result<(FamilyConfig, Family), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let config = FamilyConfig::from_json(&text)?;
    let family = config.build()?;
    Ok((config, family))
}

fn parse_rational(text: &str, what: &str) -> Result<Rational, Failure> {
    text.trim()
        .parse::<Rational>()
        .map_err(|e| usage(format!("{what} {text:?} is not a rational number: {e}")))
}

/// "LO..HI" (inclusive integer range) or a comma list of rationals.
fn parse_s_values(text: &str) -> Result<Vec<Rational>, Failure> {
    let bad = |detail: &str| usage(format!("bad --s-num {text:?}: {detail}"));
    if let Some((lo, hi)) = text.split_once("..") {
        let lo: i64 = lo.trim().parse().map_err(|_| bad("start is not an integer"))?;
        let hi: i64 = hi.trim().parse().map_err(|_| bad("end is not an integer"))?;
        if lo > hi {
            return Err(bad("empty range"));
        }
        return Ok((lo..=hi).map(Rational::from_i64).collect());
    }
    text.split(',')
        .map(|part| parse_rational(part, "s value"))
        .collect()
}

fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("document serializes");
    text.push('\n');
    text
}

fn jsonl(records: &[Value]) -> String {
    let mut text = String::new();
    for record in records {
        text.push_str(&serde_json::to_string(record).expect("record serializes"));
        text.push('\n');
    }
    text
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("value serializes")
}

/// Affine section coordinates as display strings.
fn section_json(section: &FamilySection) -> Value {
    match &section.point {
        CurvePoint::Infinity => json!({ "label": section.label, "at_infinity": true }),
        CurvePoint::Affine { x, y } => json!({
            "label": section.label,
            "x": x.to_string(),
            "y": y.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn run_verify(args: &FamilyArg) -> Result<Outcome, Failure> {
    let (config, family) = load_family(&args.family)?;
    let (described, certificates) = match &family {
        Family::Shioda(fam) => (fam.describe(), vec![fam.verify_relations()]),
        Family::Biquadratic(fam) => (
            fam.describe(),
            vec![fam.x1.verify_relations(), fam.verify_relations()],
        ),
    };
    let passed = certificates.iter().all(|c| c.passed());
    let doc = json!({
        "claim": "relation-suite.family",
        "command": "verify",
        "config": to_value(&config),
        "family": described,
        "certificates": certificates.iter().map(to_value).collect::<Vec<_>>(),
        "verdict": if passed { "PASS" } else { "FAIL" },
    });
    Ok(Outcome {
        text: pretty(&doc),
        verdict: if passed {
            "PASS".into()
        } else {
            "FAIL: a relation check does not hold".into()
        },
        passed,
    })
}

// ---------------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------------

/// Non-torsion witnesses for every section at the first good integer fiber:
/// a supplementary, independently-routed check on top of the exact
/// two-torsion certificate.
fn section_witnesses(fam: &ShiodaFamily, primes: &[u64]) -> Value {
    let fiber = (1..=50)
        .map(Rational::from_i64)
        .find_map(|t0| specialize_family(fam, &t0).ok());
    let Some(fiber) = fiber else {
        return json!({ "note": "no good integer fiber in 1..=50" });
    };
    let mut witnesses = Vec::new();
    for labeled in &fiber.points {
        let entry = embed(&fiber.curve, &labeled.point)
            .and_then(|class| nontorsion_witness_by_orders(&fiber.curve, &class, primes));
        match entry {
            Ok(w) => witnesses.push(json!({
                "label": labeled.label,
                "witness": to_value(&w),
            })),
            Err(e) => witnesses.push(json!({
                "label": labeled.label,
                "error": e.to_string(),
            })),
        }
    }
    json!({ "t": to_value(&fiber.t0), "sections": witnesses })
}

fn run_certify(args: &CertifyArgs) -> Result<Outcome, Failure> {
    let (config, family) = load_family(&args.family.family)?;
    match family {
        Family::Shioda(fam) => {
            let certificate = certify_generic_rank(&fam)?;
            let table = generic_rank_table(FamilyKind::Shioda { d: fam.degree() })?;
            let passed = certificate.conclusion_rank.is_some();
            let conclusion = certificate.conclusion_rank;
            let doc = json!({
                "claim": "generic-rank.matched-bounds",
                "command": "certify",
                "config": to_value(&config),
                "primes": args.primes,
                "certificate": to_value(&certificate),
                "rank_table": to_value(&table),
                "section_witnesses": section_witnesses(&fam, &args.primes),
                "conclusion_rank": conclusion,
                "verdict": if passed { "PASS" } else { "FAIL" },
            });
            Ok(Outcome {
                text: pretty(&doc),
                verdict: match conclusion {
                    Some(r) => format!("PASS: conclusion_rank {r}"),
                    None => "FAIL: bounds do not meet".into(),
                },
                passed,
            })
        }
        Family::Biquadratic(fam) => {
            let certificate = certify_biquadratic_ranks(&fam)?;
            let table = generic_rank_table(FamilyKind::Biquadratic {
                d1: fam.d1(),
                d2: fam.d2(),
            })?;
            let passed = certificate.total_rank.is_some();
            let total = certificate.total_rank;
            let doc = json!({
                "claim": "rank-table.layered",
                "command": "certify",
                "config": to_value(&config),
                "primes": args.primes,
                "certificate": to_value(&certificate),
                "rank_table": to_value(&table),
                "section_witnesses": section_witnesses(&fam.x1, &args.primes),
                "conclusion_rank": total,
                "verdict": if passed { "PASS" } else { "FAIL" },
            });
            Ok(Outcome {
                text: pretty(&doc),
                verdict: match total {
                    Some(r) => format!("PASS: total rank {r}"),
                    None => "FAIL: a rank-table leg does not certify".into(),
                },
                passed,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// basechange
// ---------------------------------------------------------------------------

fn conic_json(bc: &ConicBaseChange) -> Value {
    json!({
        "a": to_value(&bc.a),
        "c": to_value(&bc.parametrization.c),
        "t_of_s": bc.parametrization.t_of_s.to_string(),
        "v_of_s": bc.parametrization.v_of_s.to_string(),
        "excluded_s": bc.parametrization.excluded.iter().map(to_value).collect::<Vec<_>>(),
        "curve": format!("y^2 = {}", bc.curve.f()),
        "new_section": section_json(&bc.new_section),
        "pulled_back": bc.pulled_back.iter().map(section_json).collect::<Vec<_>>(),
    })
}

fn run_basechange(args: &BasechangeArgs) -> Result<Outcome, Failure> {
    let (config, family) = load_family(&args.family.family)?;
    let a = parse_rational(&args.a, "--a")?;
    match &args.b {
        None => {
            let fam = match &family {
                Family::Shioda(f) => f,
                Family::Biquadratic(f) => &f.x1,
            };
            let s_values = args
                .s
                .iter()
                .map(|s| parse_rational(s, "--s entry"))
                .collect::<Result<Vec<_>, _>>()?;
            let bc = conic_base_change(fam, &a)?;
            let pullback = quadratic_pullback(fam)?;
            let certificate = new_section_independence(fam, &a, &s_values, &args.primes)?;
            let passed = certificate.passed();
            let verdict = certificate.verdict.clone();
            let doc = json!({
                "claim": "base-change.new-section",
                "command": "basechange",
                "config": to_value(&config),
                "base_change": conic_json(&bc),
                "quadratic_pullback": to_value(&pullback),
                "certificate": to_value(&certificate),
                "verdict": verdict,
            });
            Ok(Outcome {
                text: pretty(&doc),
                verdict: if passed {
                    format!("PASS: rank at least {}", certificate.claimed_rank)
                } else {
                    format!("FAIL: verdict {}", certificate.verdict)
                },
                passed,
            })
        }
        Some(b_text) => {
            let Family::Biquadratic(fam) = &family else {
                return Err(usage(
                    "the double extension needs a double-cover family (config with q)",
                ));
            };
            let b = parse_rational(b_text, "--b")?;
            let threads = worker_threads()?;
            let curve = double_base_change(fam, &a, &b);
            let points = search_points_on_cab_threaded(&curve, args.height, threads)?;
            let report: Option<DoubleJumpReport> = if curve.degenerate_reasons.is_empty()
                && fam.d1() == 3
                && fam.d2() == 4
                && !points.is_empty()
            {
                let cap = points.len().min(3);
                Some(double_jump_report(
                    fam,
                    &a,
                    &b,
                    &points[..cap],
                    &HeightSettings::default(),
                    1e-2,
                    10,
                )?)
            } else {
                None
            };
            let doc = json!({
                "claim": "base-change.double-extension",
                "command": "basechange",
                "config": to_value(&config),
                "height": args.height,
                "curve": to_value(&curve),
                "points_found": points.len(),
                "points": points.iter().map(to_value).collect::<Vec<_>>(),
                "report": report.as_ref().map(to_value),
            });
            Ok(Outcome {
                text: pretty(&doc),
                verdict: format!(
                    "COMPLETE: {} point(s) at height <= {}",
                    points.len(),
                    args.height
                ),
                passed: true,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn run_search(args: &SearchArgs) -> Result<Outcome, Failure> {
    let (config, family) = load_family(&args.family.family)?;
    let Family::Shioda(fam) = &family else {
        return Err(usage("the rank-jump survey needs a split family"));
    };
    let a = parse_rational(&args.a, "--a")?;
    let s_values = parse_s_values(&args.s_num)?;
    let settings = HeightSettings {
        budget: args.doublings,
        target_error: args.target_error,
        strict: false,
    };
    let threads = worker_threads()?;
    let survey = rank_jump_search(
        fam,
        &a,
        &s_values,
        &settings,
        args.eps,
        args.relation_bound,
        threads,
    )?;

    let mut records = Vec::with_capacity(survey.records.len() + 2);
    records.push(json!({
        "claim": "survey.rank-jump",
        "record": "header",
        "command": "search",
        "config": to_value(&config),
        "family": survey.family,
        "a": to_value(&survey.a),
        "s_num": args.s_num,
        "eps": survey.eps,
        "relation_bound": survey.relation_bound,
        "doublings": settings.budget,
        "target_error": settings.target_error,
        "generic_rank": survey.generic_rank,
        "target_rank": survey.target_rank,
        "fibers": survey.records.len(),
    }));
    for record in &survey.records {
        let mut line = to_value(record);
        let map = line.as_object_mut().expect("fiber record is an object");
        map.insert("claim".into(), "survey.rank-jump".into());
        map.insert("record".into(), "fiber".into());
        records.push(line);
    }
    records.push(json!({
        "claim": "survey.rank-jump",
        "record": "summary",
        "certified_count": survey.certified_count,
        "density": survey.density.iter().map(to_value).collect::<Vec<_>>(),
    }));

    Ok(Outcome {
        text: jsonl(&records),
        verdict: format!(
            "COMPLETE: {} of {} fibers certified rank >= {}",
            survey.certified_count,
            survey.records.len(),
            survey.target_rank
        ),
        passed: true,
    })
}

// ---------------------------------------------------------------------------
// cab-scan
// ---------------------------------------------------------------------------

fn run_cab_scan(args: &CabScanArgs) -> Result<Outcome, Failure> {
    let (config, family) = load_family(&args.family.family)?;
    let Family::Biquadratic(fam) = &family else {
        return Err(usage(
            "the double-extension scan needs a double-cover family (config with q)",
        ));
    };
    if args.a_bound < 0 || args.b_bound < 0 {
        return Err(usage("grid bounds must be nonnegative"));
    }
    let threads = worker_threads()?;

    let mut records = Vec::new();
    records.push(json!({
        "claim": "scan.double-extension",
        "record": "header",
        "command": "cab-scan",
        "config": to_value(&config),
        "family": fam.describe(),
        "a_bound": args.a_bound,
        "b_bound": args.b_bound,
        "height": args.height,
    }));

    let mut pairs = 0usize;
    let mut nondegenerate = 0usize;
    let mut with_points = 0usize;
    let mut report: Option<DoubleJumpReport> = None;
    for a_int in -args.a_bound..=args.a_bound {
        for b_int in -args.b_bound..=args.b_bound {
            let a = Rational::from_i64(a_int);
            let b = Rational::from_i64(b_int);
            let curve = double_base_change(fam, &a, &b);
            let degenerate = !curve.degenerate_reasons.is_empty();
            let points: Vec<CabPoint> =
                search_points_on_cab_threaded(&curve, args.height, threads)?;
            pairs += 1;
            if !degenerate {
                nondegenerate += 1;
                if !points.is_empty() {
                    with_points += 1;
                }
            }
            records.push(json!({
                "claim": "scan.double-extension",
                "record": "pair",
                "a": a_int,
                "b": b_int,
                "degenerate": degenerate,
                "degenerate_reasons": curve.degenerate_reasons,
                "points_found": points.len(),
                "first_point": points.first().map(to_value),
            }));
            if report.is_none()
                && !degenerate
                && !points.is_empty()
                && fam.d1() == 3
                && fam.d2() == 4
                && args.report_points > 0
            {
                let cap = points.len().min(args.report_points);
                report = Some(double_jump_report(
                    fam,
                    &a,
                    &b,
                    &points[..cap],
                    &HeightSettings::default(),
                    1e-2,
                    10,
                )?);
            }
        }
    }

    records.push(json!({
        "claim": "scan.double-extension",
        "record": "summary",
        "pairs": pairs,
        "nondegenerate_pairs": nondegenerate,
        "nondegenerate_with_points": with_points,
        "report": report.as_ref().map(to_value),
    }));

    Ok(Outcome {
        text: jsonl(&records),
        verdict: format!(
            "COMPLETE: {with_points} of {nondegenerate} nondegenerate pairs have points at height <= {}",
            args.height
        ),
        passed: true,
    })
}

// ---------------------------------------------------------------------------
// shioda-tate
// ---------------------------------------------------------------------------

fn run_shioda_tate(args: &ShiodaTateArgs) -> Result<Outcome, Failure> {
    let mut known = Vec::new();
    let mut unknown_at_infinity = 0usize;
    for entry in &args.fibers {
        let entry = entry.trim();
        if entry == "m_inf" {
            unknown_at_infinity += 1;
        } else {
            let m: i64 = entry
                .parse()
                .map_err(|_| usage(format!("fiber entry {entry:?} is neither an integer nor m_inf")))?;
            known.push(m);
        }
    }
    if unknown_at_infinity > 1 {
        return Err(usage("at most one m_inf entry is allowed"));
    }

    let doc = if unknown_at_infinity == 0 {
        let mut data = FibrationData::new(args.rho, known.clone());
        data.trace_rank_contribution = args.trace;
        let rank = shioda_tate_rank(&data)?;
        json!({
            "claim": "fibration.rank-identity",
            "command": "shioda-tate",
            "rho": args.rho,
            "fiber_components": known,
            "trace": args.trace,
            "rank": rank,
            "identity": format!(
                "{} = {} + 2 + {} + {}",
                args.rho,
                rank,
                known.iter().map(|m| m - 1).sum::<i64>(),
                args.trace
            ),
        })
    } else {
        // One unknown component count at infinity: report the rank as an
        // affine function of m_inf, and eliminate it when a second
        // conic-bundle fibration of the same surface supplies rho - m_inf.
        for (i, &m) in known.iter().enumerate() {
            if m < 1 {
                return Err(usage(format!("fiber {i} has component count {m} < 1")));
            }
        }
        let correction: i64 = known.iter().map(|m| m - 1).sum();
        // r = rho - 2 - correction - (m_inf - 1) - trace
        let constant = args.rho - 1 - correction - args.trace;
        let eliminated = match args.conic_degenerate {
            Some(d) => {
                let rho_minus_m_inf = conic_bundle_rho(d, 0)? - 2;
                let rank = rho_minus_m_inf - 1 - correction - args.trace;
                if rank < 0 {
                    return Err(usage(format!(
                        "inconsistent data: elimination gives negative rank {rank}"
                    )));
                }
                let m_inf = args.rho - rho_minus_m_inf;
                if m_inf < 1 {
                    return Err(usage(format!(
                        "inconsistent data: elimination gives m_inf = {m_inf} < 1"
                    )));
                }
                Some(json!({
                    "rho_minus_m_inf": rho_minus_m_inf,
                    "m_inf": m_inf,
                    "rank": rank,
                }))
            }
            None => None,
        };
        json!({
            "claim": "fibration.rank-identity",
            "command": "shioda-tate",
            "rho": args.rho,
            "fiber_components": known,
            "trace": args.trace,
            "rank_in_terms_of_m_inf": format!("r = {constant} - m_inf"),
            "eliminated": eliminated,
        })
    };

    let verdict = match doc.get("rank") {
        Some(r) => format!("COMPLETE: rank {r}"),
        None => match doc.pointer("/eliminated/rank") {
            Some(r) => format!("COMPLETE: rank {r} after eliminating m_inf"),
            None => "COMPLETE: rank left in terms of m_inf".into(),
        },
    };
    Ok(Outcome {
        text: pretty(&doc),
        verdict,
        passed: true,
    })
}
