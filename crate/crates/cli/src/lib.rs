//! The `cmnc` command line tool: thin orchestration over `cmnc-core` with
//! JSON/CSV/text rendering, an on-disk class-polynomial cache, and stable
//! exit codes (0 success, 1 usage or validation error, 2 computation error).

pub mod report;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use cmnc_core::certify::{certify_range, constants_audit, main_theorem_check, Case};
use cmnc_core::classpoly::{
    cache_get, cache_put, hilbert_poly, norm_diff_rational_alpha, pair_product_log,
    ClassPolynomial, NormMode,
};
use cmnc_core::cmcount::{cor_bound_eps, exact_count_eps, thm_bound_eps, EpsQuery};
use cmnc_core::forms::{class_number, enumerate_reduced, point_of_form, CMPoint, QForm};
use cmnc_core::heights::{height_singular, lower_bound_51, lower_bound_52};
use cmnc_core::intarith::{f_of_disc, isqrt_u64, SpfTable};
use cmnc_core::jeval::eval_j;
use cmnc_core::{Discriminant, Error};
use rug::{Integer, Rational};
use serde_json::{json, Value};

use report::{audit_csv, audit_json, audit_text, dec, range_csv, range_json, range_text};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Parser, Debug)]
#[command(
    name = "cmnc",
    version,
    about = "Singular moduli toolkit",
    disable_help_subcommand = true
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    pub prec: u32,
    /// Omit the timestamp field so identical runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    /// Worker thread count (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Class-polynomial cache directory (CMNC_CACHE overrides).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    #[command(allow_negative_numbers = true)]
    /// Validate a discriminant and show its fundamental part and conductor.
    Disc { delta: i64 },
    #[command(allow_negative_numbers = true)]
    /// List the reduced primitive forms of a discriminant.
    Forms { delta: i64 },
    #[command(allow_negative_numbers = true)]
    /// Class number.
    Classnum { delta: i64 },
    #[command(allow_negative_numbers = true)]
    /// Certified j-invariant value at a CM point of the discriminant.
    J {
        delta: i64,
        /// Evaluate at this reduced form instead of the principal one.
        #[arg(long, value_name = "a,b,c")]
        form: Option<String>,
    },
    #[command(allow_negative_numbers = true)]
    /// Hilbert class polynomial (cached when a cache directory is set).
    Hilbert { delta: i64 },
    #[command(allow_negative_numbers = true)]
    /// Exact C_eps(tau, Delta) with witnesses and certified bounds.
    CountEps {
        delta: i64,
        /// Center tau: a discriminant (principal point) or a form "a,b,c".
        #[arg(long)]
        tau: String,
        /// Radius as an exact rational "p/q".
        #[arg(long)]
        eps: String,
    },
    #[command(allow_negative_numbers = true)]
    /// Only the certified counting bounds, without the exact count.
    BoundsEps {
        delta: i64,
        #[arg(long)]
        tau: String,
        #[arg(long)]
        eps: String,
    },
    #[command(allow_negative_numbers = true)]
    /// Weil height of a singular modulus, with its certified lower bounds.
    Height { delta: i64 },
    #[command(allow_negative_numbers = true)]
    /// log |N(x - alpha)| for singular moduli of the two discriminants.
    Norm {
        #[arg(long)]
        alpha_disc: i64,
        #[arg(long)]
        disc: i64,
    },
    #[command(allow_negative_numbers = true)]
    /// Margin reports for one of the three main inequalities over a range.
    Certify {
        #[arg(long, value_parser = ["1", "2", "3"])]
        case: String,
        #[arg(long)]
        alpha_disc: i64,
        /// Discriminant range "a..b" (inclusive, either order).
        #[arg(long, allow_hyphen_values = true)]
        range: String,
    },
    /// Interval audit of every hard-coded decimal constant.
    AuditConstants,
}

/// A rendered result, ready for any of the three formats.
struct Rendered {
    json: Value,
    csv: String,
    text: String,
}

enum Failure {
    Usage(String),
    Computation(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::NonPositive(_)
            | Error::ZeroArgument
            | Error::NotNegative(_)
            | Error::InvalidResidue(_)
            | Error::InvalidForm { .. }
            | Error::EpsilonOutOfRange
            | Error::SameDiscriminant
            | Error::HypothesisNotMet(_) => Failure::Usage(e.to_string()),
            other => Failure::Computation(other),
        }
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn parse_disc(delta: i64) -> Result<Discriminant, Failure> {
    Ok(Discriminant::new(delta)?)
}

/// Epsilon is accepted only as an exact rational "p/q" (or an integer);
/// decimal-point input is rejected so the counting predicate stays exact.
fn parse_eps(s: &str) -> Result<Rational, Failure> {
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return usage(format!("eps must be an exact rational \"p/q\", got {s}"));
    }
    match s.parse::<Rational>() {
        Ok(r) if r > 0 => Ok(r),
        _ => usage(format!("eps must be a positive rational \"p/q\", got {s}")),
    }
}

fn parse_form(s: &str) -> Result<QForm, Failure> {
    let parts: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Usage(format!("form must be \"a,b,c\", got {s}")))?;
    if parts.len() != 3 {
        return usage(format!("form must have three components, got {s}"));
    }
    Ok(QForm::new(parts[0], parts[1], parts[2])?)
}

fn parse_range(s: &str) -> Result<(i64, i64), Failure> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| Failure::Usage(format!("range must be \"a..b\", got {s}")))?;
    match (a.trim().parse::<i64>(), b.trim().parse::<i64>()) {
        (Ok(x), Ok(y)) => Ok((x, y)),
        _ => usage(format!("range endpoints must be integers, got {s}")),
    }
}

/// A tau argument: either a discriminant (its principal point) or "a,b,c".
fn parse_tau(s: &str) -> Result<CMPoint, Failure> {
    if s.contains(',') {
        return Ok(point_of_form(&parse_form(s)?));
    }
    let delta: i64 = s
        .trim()
        .parse()
        .map_err(|_| Failure::Usage(format!("tau must be a discriminant or \"a,b,c\", got {s}")))?;
    let d = parse_disc(delta)?;
    let principal = enumerate_reduced(&d)
        .into_iter()
        .find(|f| f.a == 1)
        .expect("every discriminant has a principal form");
    Ok(point_of_form(&principal))
}

fn principal_point(d: &Discriminant) -> CMPoint {
    point_of_form(
        &enumerate_reduced(d)
            .into_iter()
            .find(|f| f.a == 1)
            .expect("every discriminant has a principal form"),
    )
}

fn case_of(s: &str) -> Case {
    match s {
        "1" => Case::Part1,
        "2" => Case::Part2,
        _ => Case::Part3,
    }
}

/// Human-readable monic polynomial in X, constant term last.
fn poly_text(p: &ClassPolynomial) -> String {
    let n = p.degree();
    let mut out = String::new();
    for k in (0..=n).rev() {
        let c = &p.coeffs[k];
        if k < n && *c == 0 {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "X".into(),
            _ => format!("X^{k}"),
        };
        if out.is_empty() {
            if k == n {
                out.push_str(&mono); // monic leading term
            } else {
                out.push_str(&c.to_string());
            }
        } else {
            let sign = if *c < 0 { " - " } else { " + " };
            out.push_str(sign);
            let mag = c.clone().abs();
            if k == 0 || mag != 1 {
                out.push_str(&mag.to_string());
            }
            if k > 0 {
                out.push_str(&mono);
            }
        }
    }
    out
}

fn scalar(pairs: &[(&str, Value)], text: String) -> Rendered {
    let mut obj = serde_json::Map::new();
    let mut header = String::new();
    let mut row = String::new();
    for (i, (k, v)) in pairs.iter().enumerate() {
        obj.insert((*k).into(), v.clone());
        if i > 0 {
            header.push(',');
            row.push(',');
        }
        header.push_str(k);
        let cell = match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        row.push_str(&cell.replace(',', ";"));
    }
    Rendered {
        json: Value::Object(obj),
        csv: format!("{header}\n{row}\n"),
        text,
    }
}

fn run_cmd(cli: &Cli) -> Result<Rendered, Failure> {
    let prec = cli.prec.max(64);
    match &cli.cmd {
        Cmd::Disc { delta } => {
            let d = parse_disc(*delta)?;
            Ok(scalar(
                &[
                    ("delta", json!(d.delta())),
                    ("fundamental", json!(d.d_fund())),
                    ("conductor", json!(d.conductor())),
                    ("conductor_mod", json!(d.conductor_mod())),
                    ("class_number", json!(class_number(&d))),
                ],
                format!(
                    "delta = {} = {} * {}^2, conductor_mod = {}, class number {}",
                    d.delta(),
                    d.d_fund(),
                    d.conductor(),
                    d.conductor_mod(),
                    class_number(&d)
                ),
            ))
        }
        Cmd::Forms { delta } => {
            let d = parse_disc(*delta)?;
            let forms = enumerate_reduced(&d);
            let mut csv = String::from("a,b,c\n");
            let mut text = String::new();
            for f in &forms {
                csv.push_str(&format!("{},{},{}\n", f.a, f.b, f.c));
                text.push_str(&format!("({}, {}, {})\n", f.a, f.b, f.c));
            }
            text.push_str(&format!("{} reduced forms", forms.len()));
            Ok(Rendered {
                json: json!({
                    "delta": d.delta(),
                    "forms": forms.iter().map(|f| json!([f.a, f.b, f.c])).collect::<Vec<_>>(),
                    "class_number": forms.len(),
                }),
                csv,
                text,
            })
        }
        Cmd::Classnum { delta } => {
            let d = parse_disc(*delta)?;
            let h = class_number(&d);
            Ok(scalar(
                &[("delta", json!(d.delta())), ("class_number", json!(h))],
                format!("{h}"),
            ))
        }
        Cmd::J { delta, form } => {
            let d = parse_disc(*delta)?;
            let point = match form {
                Some(s) => {
                    let f = parse_form(s)?;
                    if f.disc() != d.delta() {
                        return usage(format!(
                            "form ({},{},{}) has discriminant {}, expected {}",
                            f.a,
                            f.b,
                            f.c,
                            f.disc(),
                            d.delta()
                        ));
                    }
                    point_of_form(&f)
                }
                None => principal_point(&d),
            };
            let j = eval_j(&point, prec)?;
            let err = j.err_abs().to_f64();
            Ok(scalar(
                &[
                    ("delta", json!(d.delta())),
                    ("re", json!(dec(j.value.re.mid_f64()))),
                    ("im", json!(dec(j.value.im.mid_f64()))),
                    ("err_abs", json!(dec(err))),
                    ("terms_used", json!(j.terms_used)),
                ],
                format!(
                    "j = {} + {} i (+- {})",
                    dec(j.value.re.mid_f64()),
                    dec(j.value.im.mid_f64()),
                    dec(err)
                ),
            ))
        }
        Cmd::Hilbert { delta } => {
            let d = parse_disc(*delta)?;
            let cache = std::env::var_os("CMNC_CACHE")
                .map(PathBuf::from)
                .or_else(|| cli.cache_dir.clone());
            let poly = match &cache {
                Some(dir) => match cache_get(dir, &d) {
                    Ok(p) => p,
                    Err(_) => {
                        let p = hilbert_poly(&d)?;
                        cache_put(dir, &p)?;
                        p
                    }
                },
                None => hilbert_poly(&d)?,
            };
            let mut csv = String::from("k,coeff\n");
            for (k, c) in poly.coeffs.iter().enumerate() {
                csv.push_str(&format!("{k},{c}\n"));
            }
            Ok(Rendered {
                json: json!({
                    "delta": d.delta(),
                    "degree": poly.degree(),
                    "coeffs": poly.coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "prec_bits_used": poly.cert.prec_bits_used,
                    "max_rounding_residual": dec(poly.cert.max_rounding_residual),
                }),
                csv,
                text: poly_text(&poly),
            })
        }
        Cmd::CountEps { delta, tau, eps } => {
            let d = parse_disc(*delta)?;
            let q = EpsQuery::new(parse_tau(tau)?, parse_eps(eps)?, d)?;
            let r = exact_count_eps(&q)?;
            let mut csv = String::from("a,b,c\n");
            for w in &r.witnesses {
                csv.push_str(&format!("{},{},{}\n", w.a, w.b, w.c));
            }
            Ok(Rendered {
                json: json!({
                    "delta": d.delta(),
                    "eps": q.eps.to_string(),
                    "exact_count": r.exact_count,
                    "thm_bound": dec(r.thm_bound),
                    "cor_bound": r.cor_bound.map(dec),
                    "a_interval": [dec(r.a_interval.0), dec(r.a_interval.1)],
                    "witnesses": r.witnesses.iter()
                        .map(|w| json!([w.a, w.b, w.c])).collect::<Vec<_>>(),
                }),
                csv,
                text: format!(
                    "count = {} (bound {}{})",
                    r.exact_count,
                    dec(r.thm_bound),
                    r.cor_bound
                        .map(|c| format!(", simplified bound {}", dec(c)))
                        .unwrap_or_default()
                ),
            })
        }
        Cmd::BoundsEps { delta, tau, eps } => {
            let d = parse_disc(*delta)?;
            let q = EpsQuery::new(parse_tau(tau)?, parse_eps(eps)?, d)?;
            let table = SpfTable::build(isqrt_u64(d.abs().unsigned_abs()) + 1);
            let f_val = f_of_disc(&d, &table)?;
            let thm = thm_bound_eps(&q, f_val)?;
            let cor = if d.abs() >= 100_000_000_000_000 {
                Some(cor_bound_eps(&q, f_val)?)
            } else {
                None
            };
            Ok(scalar(
                &[
                    ("delta", json!(d.delta())),
                    ("eps", json!(q.eps.to_string())),
                    ("f_value", json!(f_val)),
                    ("thm_bound", json!(dec(thm))),
                    ("cor_bound", json!(cor.map(dec))),
                ],
                format!(
                    "F = {f_val}, bound = {}{}",
                    dec(thm),
                    cor.map(|c| format!(", simplified bound {}", dec(c)))
                        .unwrap_or_default()
                ),
            ))
        }
        Cmd::Height { delta } => {
            let d = parse_disc(*delta)?;
            let h = height_singular(&d, prec)?;
            let lb51 = if d.abs() >= 16 {
                Some(lower_bound_51(&d)?)
            } else {
                None
            };
            let lb52 = lower_bound_52(&d);
            Ok(scalar(
                &[
                    ("delta", json!(d.delta())),
                    ("h", json!(dec(h.h))),
                    ("err", json!(dec(h.err))),
                    ("lower_bound_51", json!(lb51.map(dec))),
                    ("lower_bound_52", json!(dec(lb52))),
                ],
                format!("h = {} (+- {})", dec(h.h), dec(h.err)),
            ))
        }
        Cmd::Norm { alpha_disc, disc } => {
            let da = parse_disc(*alpha_disc)?;
            let d = parse_disc(*disc)?;
            if d.delta() == da.delta() {
                return Err(Error::SameDiscriminant.into());
            }
            let r = if class_number(&da) == 1 {
                let h = hilbert_poly(&da)?;
                norm_diff_rational_alpha(&d, &(-Integer::from(&h.coeffs[0])))?
            } else {
                pair_product_log(&d, &da)?
            };
            let mode = match r.mode {
                NormMode::ExactRationalAlpha => "exact-rational-alpha",
                NormMode::PairProduct => "pair-product",
            };
            Ok(scalar(
                &[
                    ("alpha_disc", json!(da.delta())),
                    ("disc", json!(d.delta())),
                    ("log_abs", json!(dec(r.log_abs))),
                    ("exact", json!(r.exact.as_ref().map(|n| n.to_string()))),
                    ("mode", json!(mode)),
                ],
                format!(
                    "log|N| = {} ({mode}){}",
                    dec(r.log_abs),
                    r.exact
                        .as_ref()
                        .map(|n| format!(", N = {n}"))
                        .unwrap_or_default()
                ),
            ))
        }
        Cmd::Certify {
            case,
            alpha_disc,
            range,
        } => {
            let da = parse_disc(*alpha_disc)?;
            let c = case_of(case);
            let (from, to) = parse_range(range)?;
            // surface precondition failures of the case itself as usage
            // errors rather than one failed row per discriminant
            if let Err(e @ Error::HypothesisNotMet(_)) =
                main_theorem_check(c, &da, &Discriminant::new(-163).unwrap(), 64)
            {
                return Err(e.into());
            }
            let items = certify_range(c, &da, from, to, prec);
            Ok(Rendered {
                json: range_json(&items),
                csv: range_csv(&items),
                text: range_text(&items),
            })
        }
        Cmd::AuditConstants => {
            let audit = constants_audit(prec);
            let all = audit.all_pass();
            let r = Rendered {
                json: audit_json(&audit),
                csv: audit_csv(&audit),
                text: audit_text(&audit),
            };
            if all {
                Ok(r)
            } else {
                print_rendered(cli, &r);
                Err(Failure::Computation(Error::HypothesisNotMet(
                    "one or more constant checks failed".into(),
                )))
            }
        }
    }
}

fn print_rendered(cli: &Cli, r: &Rendered) {
    match cli.format {
        Format::Json => {
            let body = if cli.no_timestamp {
                r.json.clone()
            } else {
                let ts = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                json!({ "timestamp": ts, "result": r.json })
            };
            println!(
                "{}",
                serde_json::to_string_pretty(&body).expect("valid json")
            );
        }
        Format::Csv => print!("{}", r.csv),
        Format::Text => {
            if !cli.no_timestamp {
                let ts = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                println!("# timestamp: {ts}");
            }
            println!("{}", r.text);
        }
    }
}

fn print_failure(cli: &Cli, code: i32, reason: &str) {
    if cli.format == Format::Json {
        let body = json!({ "error": true, "exit_code": code, "reason": reason });
        println!(
            "{}",
            serde_json::to_string_pretty(&body).expect("valid json")
        );
    } else {
        eprintln!("error: {reason}");
    }
}

/// Full argv-to-exit-code entry point.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Some(n) = cli.threads {
        // a pool may already exist in-process (tests); that is fine
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match run_cmd(&cli) {
        Ok(r) => {
            print_rendered(&cli, &r);
            0
        }
        Err(Failure::Usage(reason)) => {
            print_failure(&cli, 1, &reason);
            1
        }
        Err(Failure::Computation(e)) => {
            print_failure(&cli, 2, &e.to_string());
            2
        }
    }
}
