use std::ops::RangeInclusive;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use fourfold::catalog::Catalog;
use fourfold::expr::{FamilyExpression, SumExpression};
use fourfold::geography::{reports_to_csv, reports_to_json, scan, ScanOptions, TheoremTag};
use fourfold::monopole::{family_certificate, monopole_set_of, FamilyVerdict};
use fourfold::obstruction::{assess, hitchin_thorpe, hitchin_thorpe_margin};
use fourfold::reproduce::run_reproduce;
use fourfold::{ManifoldSpec, UnimodularForm};

/// Smooth simply connected 4-manifolds: invariants, homeotypes and
/// obstructions to Einstein metrics, in exact integer arithmetic.
#[derive(Parser)]
#[command(name = "fourfold", version)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Betti numbers, χ, τ, intersection form and characteristic numbers.
    Invariants { expr: String },
    /// Whether two sums are homeomorphic (isomorphic intersection forms).
    Homeo { a: String, b: String },
    /// Hitchin–Thorpe status 2χ vs 3|τ|.
    HitchinThorpe { expr: String },
    /// Hitchin–Thorpe, the curvature obstruction, and known Einstein metrics.
    CheckEinstein { expr: String },
    /// Bandwidth lower bound; with a `l` placeholder and --ell-list, a family certificate.
    Bandwidth {
        expr: String,
        #[arg(long, value_delimiter = ',')]
        ell_list: Vec<i64>,
    },
    /// Claimed and certified regions over a grid of m·CP2 # n·CP2bar.
    Scan {
        #[arg(long, value_parser = parse_range)]
        m: RangeInclusive<u64>,
        #[arg(long, value_parser = parse_range)]
        n: RangeInclusive<u64>,
        #[arg(long)]
        certify: bool,
        #[arg(long, default_value_t = 1)]
        ell: i64,
    },
    /// Rank, signature, parity and definiteness of a form like `-2E8 + 3H + 1<-1>`.
    ClassifyForm {
        #[arg(allow_hyphen_values = true)]
        form: String,
    },
    /// Re-run every reproduced claim; exit 1 if any fails.
    Reproduce {
        #[arg(long)]
        filter: Option<String>,
        /// Run all sections (the default when no filter is given).
        #[arg(long, conflicts_with = "filter")]
        all: bool,
    },
}

/// `A..B` and `A..=B` are both inclusive; a bare `A` is a single value.
fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u64>()
            .map_err(|e| format!("bad bound `{t}`: {e}"))
    };
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = num(s)?;
            Ok(v..=v)
        }
    }
}

enum Failure {
    /// A check ran and failed.
    Check,
    /// Bad input.
    Usage(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn evaluate(text: &str, catalog: &Catalog) -> Result<ManifoldSpec, Failure> {
    let expr: SumExpression = text.parse()?;
    Ok(expr.evaluate(catalog)?)
}

/// Prints ordered key/value pairs in the chosen format.
fn emit(format: Format, fields: &[(&str, Value)]) {
    match format {
        Format::Json => {
            let map: serde_json::Map<String, Value> = fields
                .iter()
                .map(|(k, v)| (k.to_string(), v.clone()))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&Value::Object(map)).unwrap()
            );
        }
        Format::Table | Format::Csv => {
            if format == Format::Csv {
                println!("field,value");
            }
            for (k, v) in fields {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    Value::Null => "-".into(),
                    other => other.to_string(),
                };
                if format == Format::Csv {
                    println!("{k},{}", csv_cell(&shown));
                } else {
                    println!("{k:<24}{shown}");
                }
            }
        }
    }
}

fn csv_cell(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn invariants(text: &str, format: Format, catalog: &Catalog) -> Outcome {
    let m = evaluate(text, catalog)?;
    let cn = m.char_numbers();
    let pieces: Vec<Value> = m
        .pieces()
        .iter()
        .map(|p| json!({"name": p.name, "c1_squared": p.c1_squared, "b_plus": p.b_plus, "b_minus": p.b_minus}))
        .collect();
    let class = m.form().classify().ok();
    emit(
        format,
        &[
            ("manifold", json!(m.label())),
            ("b_plus", json!(m.b_plus())),
            ("b_minus", json!(m.b_minus())),
            ("chi", json!(cn.chi)),
            ("tau", json!(cn.tau)),
            ("two_chi_plus_three_tau", json!(cn.two_chi_plus_three_tau)),
            ("todd_genus", json!(cn.todd_genus.to_string())),
            ("spin", json!(m.spin())),
            ("form", json!(m.form().to_string())),
            (
                "parity",
                json!(class.map(|c| format!("{:?}", c.parity).to_lowercase())),
            ),
            ("symplectic_pieces", Value::Array(pieces)),
            ("blowups", json!(m.blowups())),
            (
                "einstein_known",
                json!(m.einstein_known().map(|c| c.to_string())),
            ),
        ],
    );
    Ok(())
}

fn homeo(a: &str, b: &str, format: Format, catalog: &Catalog) -> Outcome {
    let (ma, mb) = (evaluate(a, catalog)?, evaluate(b, catalog)?);
    let h = ma.homeomorphic(&mb)?;
    emit(
        format,
        &[
            ("a", json!(ma.label())),
            ("form_a", json!(ma.form().to_string())),
            ("b", json!(mb.label())),
            ("form_b", json!(mb.form().to_string())),
            ("homeomorphic", json!(h)),
        ],
    );
    Ok(())
}

fn ht(text: &str, format: Format, catalog: &Catalog) -> Outcome {
    let m = evaluate(text, catalog)?;
    emit(
        format,
        &[
            ("manifold", json!(m.label())),
            ("two_chi", json!(2 * m.chi())),
            ("three_abs_tau", json!(3 * m.tau().abs())),
            ("margin", json!(hitchin_thorpe_margin(&m))),
            ("hitchin_thorpe", json!(hitchin_thorpe(&m).to_string())),
        ],
    );
    Ok(())
}

fn check_einstein(text: &str, format: Format, catalog: &Catalog) -> Outcome {
    let m = evaluate(text, catalog)?;
    let a = assess(&m)?;
    let known = a.einstein_known.map(|c| c.to_string());
    match format {
        Format::Json => {
            let record = a.verdict.record();
            let v = json!({
                "manifold": a.label,
                "hitchin_thorpe": a.hitchin_thorpe.to_string(),
                "verdict": record,
                "einstein_known": known,
                "nonexistence": a.nonexistence(),
            });
            println!("{}", serde_json::to_string_pretty(&v).unwrap());
        }
        _ => emit(
            format,
            &[
                ("hitchin_thorpe", json!(a.hitchin_thorpe.to_string())),
                ("obstruction", json!(a.verdict.to_string())),
                ("einstein_known", json!(known)),
            ],
        ),
    }
    Ok(())
}

fn bandwidth(text: &str, ells: &[i64], format: Format, catalog: &Catalog) -> Outcome {
    let family: FamilyExpression = text.parse()?;
    if family.has_placeholder() {
        if ells.is_empty() {
            return Err(Failure::Usage(
                "expression has an `l` placeholder; pass --ell-list".into(),
            ));
        }
        let cert = family_certificate(&family, ells, catalog)?;
        match format {
            Format::Json => println!("{}", serde_json::to_string_pretty(&cert).unwrap()),
            Format::Csv => {
                println!("ell,expression,bandwidth_lower_bound");
                for r in &cert.rows {
                    println!(
                        "{},{},{}",
                        r.ell,
                        csv_cell(&r.expression),
                        r.bandwidth_lower_bound
                    );
                }
            }
            Format::Table => {
                println!("family {}", cert.family);
                for r in &cert.rows {
                    println!(
                        "  l={:<4} bw>={:<6} {}",
                        r.ell, r.bandwidth_lower_bound, r.expression
                    );
                }
                println!(
                    "verdict {}",
                    serde_json::to_value(cert.verdict)
                        .unwrap()
                        .as_str()
                        .unwrap()
                );
            }
        }
        return match cert.verdict {
            FamilyVerdict::UnboundedCertified => Ok(()),
            FamilyVerdict::NotCertified => Err(Failure::Check),
        };
    }
    if !ells.is_empty() {
        return Err(Failure::Usage(
            "--ell-list needs an `l` placeholder in the expression".into(),
        ));
    }
    let m = evaluate(text, catalog)?;
    let set = monopole_set_of(&m)?;
    let bw = set.bandwidth();
    let (a, b) = match &bw.witness {
        Some((a, b)) => (json!(a.to_string()), json!(b.to_string())),
        None => (Value::Null, Value::Null),
    };
    emit(
        format,
        &[
            ("manifold", json!(m.label())),
            ("monopole_classes", json!(set.len().map(|n| n.to_string()))),
            ("bandwidth_lower_bound", json!(bw.lower_bound)),
            ("witness_a", a),
            ("witness_b", b),
        ],
    );
    Ok(())
}

fn run_scan(
    m: RangeInclusive<u64>,
    n: RangeInclusive<u64>,
    certify: bool,
    ell: i64,
    format: Format,
    catalog: &Catalog,
) -> Outcome {
    let reports = scan(m, n, ScanOptions { certify, ell }, catalog);
    match format {
        Format::Json => println!("{}", reports_to_json(&reports)),
        Format::Csv => print!("{}", reports_to_csv(&reports)),
        Format::Table => {
            println!(
                "{:>4} {:>5}  {:<18} {:<4} certified",
                "m", "n", "claimed", "ht"
            );
            for r in &reports {
                let claimed: Vec<String> = r.claimed.iter().map(TheoremTag::to_string).collect();
                let certified: Vec<String> = r
                    .certified
                    .iter()
                    .map(|(t, w)| format!("{t}: {w}"))
                    .chain(r.gaps.iter().map(|(t, g)| format!("{t}: gap {g}")))
                    .collect();
                println!(
                    "{:>4} {:>5}  {:<18} {:<4} {}",
                    r.m,
                    r.n,
                    if claimed.is_empty() {
                        "-".into()
                    } else {
                        claimed.join(",")
                    },
                    if r.strict_ht { "yes" } else { "no" },
                    certified.join("; ")
                );
            }
        }
    }
    Ok(())
}

fn classify_form(text: &str, format: Format) -> Outcome {
    let form: UnimodularForm = text.parse()?;
    let class = form.classify()?;
    let mut fields = vec![
        ("form", json!(form.to_string())),
        ("rank", json!(class.rank)),
        ("signature", json!(class.signature)),
        (
            "parity",
            json!(format!("{:?}", class.parity).to_lowercase()),
        ),
        (
            "definiteness",
            json!(format!("{:?}", class.definiteness).to_lowercase()),
        ),
    ];
    if let Some(w) = form.realizability_warning() {
        fields.push(("warning", json!(w)));
    }
    emit(format, &fields);
    Ok(())
}

fn reproduce(filter: Option<&str>, format: Format, catalog: &Catalog) -> Outcome {
    let report = run_reproduce(catalog, filter)?;
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).unwrap()),
        Format::Csv => {
            println!("tag,claim,computed,expected,pass");
            for r in &report.rows {
                println!(
                    "{},{},{},{},{}",
                    r.tag,
                    csv_cell(&r.claim),
                    csv_cell(&r.computed),
                    csv_cell(&r.expected),
                    r.pass
                );
            }
        }
        Format::Table => {
            for r in &report.rows {
                println!("{r}");
            }
            let failed = report.failures().count();
            println!("{} checks, {} failed", report.rows.len(), failed);
        }
    }
    if report.all_pass() {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn run(cli: Cli) -> Outcome {
    let catalog = Catalog::from_env()?;
    for w in catalog.warnings() {
        eprintln!("warning: {w}");
    }
    let f = cli.format;
    match cli.command {
        Command::Invariants { expr } => invariants(&expr, f, &catalog),
        Command::Homeo { a, b } => homeo(&a, &b, f, &catalog),
        Command::HitchinThorpe { expr } => ht(&expr, f, &catalog),
        Command::CheckEinstein { expr } => check_einstein(&expr, f, &catalog),
        Command::Bandwidth { expr, ell_list } => bandwidth(&expr, &ell_list, f, &catalog),
        Command::Scan { m, n, certify, ell } => run_scan(m, n, certify, ell, f, &catalog),
        Command::ClassifyForm { form } => classify_form(&form, f),
        Command::Reproduce { filter, all: _ } => reproduce(filter.as_deref(), f, &catalog),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
