//! Report serialization: JSON (real numbers as decimal strings), CSV
//! (flat columns with a header row), and plain text. Identical inputs
//! serialize to identical bytes.

use cmnc_core::certify::{AuditCheck, Case, CertReport, ConstantsAudit, RangeItem};
use rug::Rational;
use serde_json::{json, Value};

/// Shortest decimal string that parses back to exactly this f64.
pub fn dec(v: f64) -> String {
    format!("{v}")
}

fn case_of_str(s: &str) -> Option<Case> {
    match s {
        "part1" => Some(Case::Part1),
        "part2" => Some(Case::Part2),
        "part3" => Some(Case::Part3),
        _ => None,
    }
}

/// JSON object for one certification report; keys are exactly the report's
/// field names, real numbers are decimal strings.
pub fn cert_report_json(r: &CertReport) -> Value {
    json!({
        "case": r.case.to_string(),
        "disc": r.disc,
        "disc_alpha": r.disc_alpha,
        "x": dec(r.x),
        "y": dec(r.y),
        "a": dec(r.a),
        "c_const": dec(r.c_const),
        "eps_used": r.eps_used.as_ref().map(|e| e.to_string()),
        "terms": r.terms.iter()
            .map(|(k, v)| json!([k, dec(*v)]))
            .collect::<Vec<_>>(),
        "norm_log": dec(r.norm_log),
        "norm_exact": r.norm_exact,
        "norm_mode": r.norm_mode,
        "threshold": dec(r.threshold),
        "hypothesis_ok": r.hypothesis_ok,
        "margin": dec(r.margin),
        "margin_label": r.margin_label,
        "bound_on_bound": r.bound_on_bound,
    })
}

/// Inverse of [`cert_report_json`]; used to guarantee the round-trip.
pub fn cert_report_from_json(v: &Value) -> Option<CertReport> {
    let f = |k: &str| v.get(k)?.as_str()?.parse::<f64>().ok();
    let b = |k: &str| v.get(k)?.as_bool();
    let terms = v
        .get("terms")?
        .as_array()?
        .iter()
        .map(|t| {
            let pair = t.as_array()?;
            Some((
                pair[0].as_str()?.to_string(),
                pair[1].as_str()?.parse::<f64>().ok()?,
            ))
        })
        .collect::<Option<Vec<_>>>()?;
    let eps_used = match v.get("eps_used")? {
        Value::Null => None,
        Value::String(s) => Some(s.parse::<Rational>().ok()?),
        _ => return None,
    };
    Some(CertReport {
        case: case_of_str(v.get("case")?.as_str()?)?,
        disc: v.get("disc")?.as_i64()?,
        disc_alpha: v.get("disc_alpha")?.as_i64()?,
        x: f("x")?,
        y: f("y")?,
        a: f("a")?,
        c_const: f("c_const")?,
        eps_used,
        terms,
        norm_log: f("norm_log")?,
        norm_exact: b("norm_exact")?,
        norm_mode: match v.get("norm_mode")?.as_str()? {
            "exact-rational-alpha" => "exact-rational-alpha",
            "pair-product" => "pair-product",
            _ => return None,
        },
        threshold: f("threshold")?,
        hypothesis_ok: b("hypothesis_ok")?,
        margin: f("margin")?,
        margin_label: match v.get("margin_label")?.as_str()? {
            "certified" => "certified",
            "empirical" => "empirical",
            _ => return None,
        },
        bound_on_bound: b("bound_on_bound")?,
    })
}

pub const CERT_CSV_HEADER: &str = "case,disc,disc_alpha,x,y,a,c_const,eps_used,norm_log,\
norm_exact,norm_mode,threshold,hypothesis_ok,margin,margin_label,bound_on_bound,terms";

pub fn cert_report_csv_row(r: &CertReport) -> String {
    let terms = r
        .terms
        .iter()
        .map(|(k, v)| format!("{k}={}", dec(*v)))
        .collect::<Vec<_>>()
        .join(";");
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.case,
        r.disc,
        r.disc_alpha,
        dec(r.x),
        dec(r.y),
        dec(r.a),
        dec(r.c_const),
        r.eps_used
            .as_ref()
            .map(|e| e.to_string())
            .unwrap_or_default(),
        dec(r.norm_log),
        r.norm_exact,
        r.norm_mode,
        dec(r.threshold),
        r.hypothesis_ok,
        dec(r.margin),
        r.margin_label,
        r.bound_on_bound,
        terms,
    )
}

pub fn cert_report_text(r: &CertReport) -> String {
    let mut s = format!(
        "{} disc={} disc_alpha={}: log|N| = {} ({}), threshold = {}, margin = {} [{}]",
        r.case,
        r.disc,
        r.disc_alpha,
        dec(r.norm_log),
        r.norm_mode,
        dec(r.threshold),
        dec(r.margin),
        r.margin_label,
    );
    if let Some(e) = &r.eps_used {
        s.push_str(&format!(" eps={e}"));
    }
    s
}

pub fn range_json(items: &[RangeItem]) -> Value {
    Value::Array(
        items
            .iter()
            .map(|item| match item {
                RangeItem::Report(r) => cert_report_json(r),
                RangeItem::Failed { disc, reason } => json!({
                    "disc": disc,
                    "error": true,
                    "reason": reason,
                }),
            })
            .collect(),
    )
}

pub fn range_csv(items: &[RangeItem]) -> String {
    let mut out = String::from(CERT_CSV_HEADER);
    out.push_str(",error\n");
    for item in items {
        match item {
            RangeItem::Report(r) => {
                out.push_str(&cert_report_csv_row(r));
                out.push_str(",\n");
            }
            RangeItem::Failed { disc, reason } => {
                out.push_str(&format!(
                    ",{disc},,,,,,,,,,,,,,,,{}\n",
                    reason.replace(',', ";")
                ));
            }
        }
    }
    out
}

pub fn range_text(items: &[RangeItem]) -> String {
    items
        .iter()
        .map(|item| match item {
            RangeItem::Report(r) => cert_report_text(r),
            RangeItem::Failed { disc, reason } => format!("disc={disc}: error: {reason}"),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn audit_check_json(c: &AuditCheck) -> Value {
    json!({
        "id": c.id,
        "location": c.location,
        "lo": dec(c.lo),
        "hi": dec(c.hi),
        "bound": c.bound,
        "pass": c.pass,
    })
}

pub fn audit_json(a: &ConstantsAudit) -> Value {
    json!({
        "checks": a.checks.iter().map(audit_check_json).collect::<Vec<_>>(),
        "all_pass": a.all_pass(),
    })
}

pub fn audit_csv(a: &ConstantsAudit) -> String {
    let mut out = String::from("id,location,lo,hi,bound,pass\n");
    for c in &a.checks {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            c.id,
            c.location,
            dec(c.lo),
            dec(c.hi),
            c.bound.replace(',', ";"),
            c.pass
        ));
    }
    out
}

pub fn audit_text(a: &ConstantsAudit) -> String {
    let mut out = String::new();
    for c in &a.checks {
        out.push_str(&format!(
            "{:<28} {:>4}  [{}, {}] {}  {}\n",
            c.id,
            c.location,
            dec(c.lo),
            dec(c.hi),
            c.bound,
            if c.pass { "pass" } else { "FAIL" }
        ));
    }
    out.push_str(&format!(
        "{} checks, all pass: {}",
        a.checks.len(),
        a.all_pass()
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmnc_core::certify::{main_theorem_check, Case};
    use cmnc_core::Discriminant;

    fn sample() -> CertReport {
        main_theorem_check(
            Case::Part2,
            &Discriminant::new(-4).unwrap(),
            &Discriminant::new(-8).unwrap(),
            96,
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_identity() {
        let r = sample();
        let v = cert_report_json(&r);
        let back = cert_report_from_json(&v).unwrap();
        assert_eq!(cert_report_json(&back), v);
        assert_eq!(back.disc, r.disc);
        assert_eq!(back.margin.to_bits(), r.margin.to_bits());
        assert_eq!(back.terms, r.terms);
    }

    #[test]
    fn json_has_margin_field_as_decimal_string() {
        let v = cert_report_json(&sample());
        assert!(v.get("margin").unwrap().is_string());
        assert!(v
            .get("norm_log")
            .unwrap()
            .as_str()
            .unwrap()
            .parse::<f64>()
            .is_ok());
    }

    #[test]
    fn empty_range_csv_is_header_only() {
        let s = range_csv(&[]);
        assert_eq!(s.lines().count(), 1);
        assert!(s.starts_with("case,disc,"));
    }

    #[test]
    fn serialization_is_deterministic() {
        let r = sample();
        let a = serde_json::to_string(&cert_report_json(&r)).unwrap();
        let b = serde_json::to_string(&cert_report_json(&r)).unwrap();
        assert_eq!(a, b);
        assert_eq!(cert_report_csv_row(&r), cert_report_csv_row(&r));
    }
}
