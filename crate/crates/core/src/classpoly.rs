//! Certified construction of Hilbert class polynomials H_Delta in Z[X],
//! exact evaluation, exact resultants, and exact norms of x - alpha for
//! rational alpha; plus the on-disk cache.
//!
//! Construction multiplies one real factor per Galois-conjugate pair:
//! ambiguous forms contribute a real linear factor X - j(z), and each
//! conjugate pair (a, +-b, c) contributes X^2 - 2 Re j(z) X + |j(z)|^2.
//! Coefficients are accumulated in outward-rounded interval arithmetic,
//! rounded to integers, and certified by a full recompute at +64 bits.

use std::collections::HashMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock};

use rug::ops::Pow;
use rug::{Float, Integer};
use sha2::{Digest, Sha256};

use crate::disc::Discriminant;
use crate::error::{Error, Result};
use crate::forms::{enumerate_reduced, point_of_form, QForm};
use crate::interval::Interval;
use crate::jeval::eval_j;

/// Certification record attached to a constructed polynomial.
#[derive(Clone, Copy, Debug)]
pub struct Cert {
    /// Working precision that produced the certified coefficients.
    pub prec_bits_used: u32,
    /// Largest distance from an interval midpoint to its rounded integer.
    pub max_rounding_residual: f64,
    /// Largest |Im j| midpoint seen on a root that must be real.
    pub max_imag_residual: f64,
}

/// A Hilbert class polynomial with exact integer coefficients,
/// constant term first, monic of degree C(Delta).
#[derive(Clone, Debug)]
pub struct ClassPolynomial {
    pub disc: Discriminant,
    pub coeffs: Vec<Integer>,
    pub cert: Cert,
}

/// How a norm was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMode {
    /// N_{K/Q}(x - alpha) = +-H_Delta(alpha) for rational alpha.
    ExactRationalAlpha,
    /// The full conjugate pair product |Res(H_1, H_2)|.
    PairProduct,
}

/// An exact (or certified-log) norm value.
#[derive(Clone, Debug)]
pub struct NormResult {
    pub log_abs: f64,
    pub exact: Option<Integer>,
    pub mode: NormMode,
}

const MAX_ESCALATIONS: u32 = 4;

impl ClassPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Exact Horner evaluation at an integer point.
    pub fn eval_at_integer(&self, m: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= m;
            acc += c;
        }
        acc
    }
}

/// Natural log of |n| (n nonzero) with ~2^-60 relative accuracy.
pub fn log_abs_integer(n: &Integer) -> f64 {
    debug_assert!(n != &Integer::new());
    Float::with_val(96, n).abs().ln().to_f64()
}

/// One interval-coefficient polynomial times another (dense, constant first).
fn poly_mul(a: &[Interval], b: &[Interval], prec: u32) -> Vec<Interval> {
    let mut out = vec![Interval::zero(prec); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

/// A single construction pass at a fixed output precision. Returns the
/// rounded integer coefficients and residuals, or None if any coefficient
/// interval fails to pin down a unique integer.
fn build_at(forms: &[QForm], bits: u32) -> Option<(Vec<Integer>, f64, f64)> {
    let prec = bits + 32;
    let mut poly = vec![Interval::from_i64(1, prec)];
    let mut max_imag = 0f64;

    for f in forms {
        if f.b < 0 {
            continue; // covered by its conjugate's quadratic factor
        }
        let j = eval_j(&point_of_form(f), bits).ok()?;
        let ambiguous = f.b == 0 || f.b == f.a || f.a == f.c;
        if ambiguous {
            // j is real here; the imaginary enclosure is a residual check.
            let im_mid = j.value.im.mid_f64().abs();
            if im_mid > max_imag {
                max_imag = im_mid;
            }
            let factor = [j.value.re.neg(), Interval::from_i64(1, prec)];
            poly = poly_mul(&poly, &factor, prec);
        } else {
            let two = Interval::from_i64(2, prec);
            let factor = [
                j.value.norm_sq(),
                j.value.re.mul(&two).neg(),
                Interval::from_i64(1, prec),
            ];
            poly = poly_mul(&poly, &factor, prec);
        }
    }

    let mut coeffs = Vec::with_capacity(poly.len());
    let mut max_res = 0f64;
    for c in &poly {
        let mid = c.mid();
        let n = mid.to_integer()?; // nearest integer
        if !c.contains_integer(&n) {
            return None;
        }
        let res = (Float::with_val(64, &mid - Float::with_val(mid.prec(), &n)))
            .abs()
            .to_f64();
        if res >= 0.25 || c.width() >= 0.5 {
            return None;
        }
        if res > max_res {
            max_res = res;
        }
        coeffs.push(n);
    }
    if max_imag >= 0.25 {
        return None;
    }
    Some((coeffs, max_res, max_imag))
}

/// Small-discriminant polynomials are memoized in memory: callers like the
/// norm and certification pipelines request the same H_Delta repeatedly.
const MEMO_MAX_ABS: i64 = 1 << 20;
const MEMO_MAX_ENTRIES: usize = 1 << 15;

fn memo() -> &'static Mutex<HashMap<i64, ClassPolynomial>> {
    static MEMO: OnceLock<Mutex<HashMap<i64, ClassPolynomial>>> = OnceLock::new();
    MEMO.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Constructs H_Delta with certified integer coefficients: the rounding
/// residuals must be < 0.25 and a full recompute at +64 bits must yield
/// identical integers; otherwise the precision is doubled (at most 4 times).
pub fn hilbert_poly(d: &Discriminant) -> Result<ClassPolynomial> {
    let memoizable = d.abs() <= MEMO_MAX_ABS;
    if memoizable {
        if let Some(p) = memo().lock().expect("memo lock").get(&d.delta()) {
            return Ok(p.clone());
        }
    }
    let p = hilbert_poly_uncached(d)?;
    if memoizable {
        let mut m = memo().lock().expect("memo lock");
        if m.len() < MEMO_MAX_ENTRIES {
            m.insert(d.delta(), p.clone());
        }
    }
    Ok(p)
}

fn hilbert_poly_uncached(d: &Discriminant) -> Result<ClassPolynomial> {
    let forms = enumerate_reduced(d);
    let x = d.abs() as f64;
    let sum_inv_a: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let heuristic =
        (std::f64::consts::PI * x.sqrt() * sum_inv_a / std::f64::consts::LN_2).ceil() as u32;
    let mut bits = heuristic + 10 * forms.len() as u32 + 64;

    for _ in 0..=MAX_ESCALATIONS {
        if let Some((coeffs, max_res, max_imag)) = build_at(&forms, bits) {
            if let Some((check, _, _)) = build_at(&forms, bits + 64) {
                if check == coeffs {
                    debug_assert_eq!(coeffs.len(), forms.len() + 1);
                    debug_assert_eq!(*coeffs.last().unwrap(), 1);
                    return Ok(ClassPolynomial {
                        disc: *d,
                        coeffs,
                        cert: Cert {
                            prec_bits_used: bits,
                            max_rounding_residual: max_res,
                            max_imag_residual: max_imag,
                        },
                    });
                }
            }
        }
        bits *= 2;
    }
    Err(Error::PrecisionExhausted(bits))
}

/// N_{K/Q}(x - alpha) for rational alpha: K = Q(x) and the norm is
/// +-H_Delta(alpha), reported as an exact absolute value.
pub fn norm_diff_rational_alpha(d: &Discriminant, alpha: &Integer) -> Result<NormResult> {
    let h = hilbert_poly(d)?;
    let v = h.eval_at_integer(alpha).abs();
    if v == 0 {
        return Err(Error::ZeroNorm);
    }
    Ok(NormResult {
        log_abs: log_abs_integer(&v),
        exact: Some(v),
        mode: NormMode::ExactRationalAlpha,
    })
}

/// Sum over all conjugate pairs of log |alpha_i - x_j|, obtained exactly as
/// log |Res(H_Delta1, H_Delta2)|.
pub fn pair_product_log(d1: &Discriminant, d2: &Discriminant) -> Result<NormResult> {
    if d1.delta() == d2.delta() {
        return Err(Error::SameDiscriminant);
    }
    let h1 = hilbert_poly(d1)?;
    let h2 = hilbert_poly(d2)?;
    let r = resultant_abs(&h1.coeffs, &h2.coeffs);
    debug_assert!(r != 0);
    Ok(NormResult {
        log_abs: log_abs_integer(&r),
        exact: Some(r),
        mode: NormMode::PairProduct,
    })
}

// ---------------------------------------------------------------------------
// Exact resultant via the primitive-part subresultant PRS.
// ---------------------------------------------------------------------------

fn trim(mut v: Vec<Integer>) -> Vec<Integer> {
    while v.last().is_some_and(|c| *c == 0) {
        v.pop();
    }
    v
}

fn content(v: &[Integer]) -> Integer {
    let mut g = Integer::new();
    for c in v {
        g = g.gcd(c);
    }
    g
}

/// Pseudo-remainder prem(a, b) = lc(b)^(deg a - deg b + 1) * a mod b.
fn prem(a: &[Integer], b: &[Integer]) -> Vec<Integer> {
    let db = b.len() - 1;
    let lb = b.last().unwrap();
    let mut r = a.to_vec();
    let mut e = (a.len() - 1 - db) as u32 + 1;
    while r.len() > db {
        let lr = r.pop().unwrap();
        for c in r.iter_mut() {
            *c *= lb;
        }
        let shift = r.len() - db;
        for (i, bc) in b[..db].iter().enumerate() {
            r[shift + i] -= Integer::from(&lr * bc);
        }
        r = trim(r);
        e -= 1;
        if r.is_empty() {
            break;
        }
    }
    if e > 0 && !r.is_empty() {
        let scale = Integer::from(lb.pow(e));
        for c in r.iter_mut() {
            *c *= &scale;
        }
    }
    r
}

/// |Res(a, b)| for integer polynomials (constant term first).
pub fn resultant_abs(pa: &[Integer], pb: &[Integer]) -> Integer {
    let mut a = trim(pa.to_vec());
    let mut b = trim(pb.to_vec());
    if a.is_empty() || b.is_empty() {
        return Integer::new();
    }
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    let da = (a.len() - 1) as u32;
    let db = (b.len() - 1) as u32;
    let ca = content(&a);
    let cb = content(&b);
    for c in a.iter_mut() {
        c.div_exact_mut(&ca);
    }
    for c in b.iter_mut() {
        c.div_exact_mut(&cb);
    }
    // Scale factor from pulling out contents: cont(A)^deg B * cont(B)^deg A.
    let mut t = ca.pow(db) * cb.pow(da);

    if b.len() == 1 {
        t *= b[0].clone().pow(da);
        return t.abs();
    }

    let mut g = Integer::from(1);
    let mut h = Integer::from(1);
    loop {
        let delta = (a.len() - b.len()) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return Integer::new(); // common factor: resultant is zero
        }
        a = b;
        let divisor = &g * h.clone().pow(delta);
        b = r.into_iter().map(|c| c.div_exact(&divisor)).collect();
        g = a.last().unwrap().clone();
        h = if delta == 0 {
            h
        } else {
            g.clone().pow(delta).div_exact(&h.pow(delta - 1))
        };
        if b.len() == 1 {
            let dlast = (a.len() - 1) as u32;
            let num = b[0].clone().pow(dlast);
            let core = if dlast == 0 {
                num * &h
            } else {
                num.div_exact(&h.pow(dlast - 1))
            };
            return (t * core).abs();
        }
    }
}

// ---------------------------------------------------------------------------
// On-disk cache: UTF-8 text, header + sha256 of the coefficient lines,
// one coefficient per line (constant term first), atomic writes.
// ---------------------------------------------------------------------------

/// Path of the cache entry for a discriminant inside `dir`.
pub fn cache_path(dir: &Path, d: &Discriminant) -> PathBuf {
    dir.join(format!("hcp_{}.txt", d.abs()))
}

fn coeff_payload(coeffs: &[Integer]) -> String {
    let mut s = String::new();
    for c in coeffs {
        s.push_str(&c.to_string());
        s.push('\n');
    }
    s
}

/// Writes a cache entry atomically (temp file in the same directory, then
/// rename), so readers never observe a partial file.
pub fn cache_put(dir: &Path, poly: &ClassPolynomial) -> Result<()> {
    fs::create_dir_all(dir)?;
    let payload = coeff_payload(&poly.coeffs);
    let digest = hex_digest(payload.as_bytes());
    let text = format!(
        "HCP v1\ndisc={}\ndegree={}\nprec_bits={}\nsha256={}\n{}",
        poly.disc.delta(),
        poly.degree(),
        poly.cert.prec_bits_used,
        digest,
        payload
    );
    let final_path = cache_path(dir, &poly.disc);
    let tmp_path = final_path.with_extension("txt.tmp");
    let mut f = fs::File::create(&tmp_path)?;
    f.write_all(text.as_bytes())?;
    f.sync_all()?;
    fs::rename(&tmp_path, &final_path)?;
    Ok(())
}

/// Reads and verifies a cache entry; `CacheMiss` if absent, `CacheCorrupt`
/// if the checksum or structure does not hold.
pub fn cache_get(dir: &Path, d: &Discriminant) -> Result<ClassPolynomial> {
    let path = cache_path(dir, d);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Error::CacheMiss),
        Err(e) => return Err(e.into()),
    };
    parse_cache_entry(&text, d)
}

fn parse_cache_entry(text: &str, d: &Discriminant) -> Result<ClassPolynomial> {
    let corrupt = |m: &str| Error::CacheCorrupt(m.to_string());
    let mut lines = text.split_inclusive('\n');
    let header = |l: Option<&str>| l.map(|s| s.trim_end_matches('\n').to_string());

    if header(lines.next()).as_deref() != Some("HCP v1") {
        return Err(corrupt("bad magic"));
    }
    let disc_line = header(lines.next()).ok_or_else(|| corrupt("missing disc"))?;
    let degree_line = header(lines.next()).ok_or_else(|| corrupt("missing degree"))?;
    let prec_line = header(lines.next()).ok_or_else(|| corrupt("missing prec_bits"))?;
    let sha_line = header(lines.next()).ok_or_else(|| corrupt("missing sha256"))?;

    let disc: i64 = disc_line
        .strip_prefix("disc=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| corrupt("bad disc line"))?;
    let degree: usize = degree_line
        .strip_prefix("degree=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| corrupt("bad degree line"))?;
    let prec_bits: u32 = prec_line
        .strip_prefix("prec_bits=")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| corrupt("bad prec_bits line"))?;
    let sha = sha_line
        .strip_prefix("sha256=")
        .ok_or_else(|| corrupt("bad sha256 line"))?;

    if disc != d.delta() {
        return Err(corrupt("discriminant mismatch"));
    }

    let payload: String = lines.collect();
    if hex_digest(payload.as_bytes()) != sha {
        return Err(corrupt("checksum mismatch"));
    }

    let mut coeffs = Vec::new();
    for l in payload.lines() {
        let c: Integer = l.parse().map_err(|_| corrupt("bad coefficient"))?;
        coeffs.push(c);
    }
    if coeffs.len() != degree + 1 || coeffs.last().map(|c| c == &1) != Some(true) {
        return Err(corrupt("degree/monicity mismatch"));
    }
    Ok(ClassPolynomial {
        disc: *d,
        coeffs,
        cert: Cert {
            prec_bits_used: prec_bits,
            max_rounding_residual: 0.0,
            max_imag_residual: 0.0,
        },
    })
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let out = hasher.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interval::ComplexInterval;
    use crate::jeval::eval_j;

    fn disc(delta: i64) -> Discriminant {
        Discriminant::new(delta).unwrap()
    }

    fn hp(delta: i64) -> ClassPolynomial {
        hilbert_poly(&disc(delta)).unwrap()
    }

    fn coeffs_i64(vals: &[i64]) -> Vec<Integer> {
        vals.iter().map(|&v| Integer::from(v)).collect()
    }

    #[test]
    fn class_number_one_polys() {
        assert_eq!(hp(-3).coeffs, coeffs_i64(&[0, 1]));
        assert_eq!(hp(-4).coeffs, coeffs_i64(&[-1728, 1]));
        assert_eq!(hp(-7).coeffs, coeffs_i64(&[3375, 1]));
        assert_eq!(hp(-8).coeffs, coeffs_i64(&[-8000, 1]));
        assert_eq!(hp(-12).coeffs, coeffs_i64(&[-54000, 1]));
    }

    #[test]
    fn all_thirteen_class_number_one_discs_round() {
        for delta in [-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67, -163] {
            let h = hp(delta);
            assert_eq!(h.degree(), 1);
            assert!(h.cert.max_rounding_residual < 0.25);
        }
    }

    #[test]
    fn degree_two_example() {
        assert_eq!(hp(-15).coeffs, coeffs_i64(&[-121287375, 191025, 1]));
    }

    #[test]
    fn eval_at_integer_examples() {
        assert_eq!(hp(-4).eval_at_integer(&Integer::new()), -1728);
        assert_eq!(hp(-7).eval_at_integer(&Integer::from(1728)), 5103);
        assert_eq!(hp(-3).eval_at_integer(&Integer::new()), 0);
    }

    #[test]
    fn norm_examples() {
        let n = norm_diff_rational_alpha(&disc(-4), &Integer::new()).unwrap();
        assert_eq!(n.exact.as_ref().unwrap(), &1728);
        assert_eq!(n.mode, NormMode::ExactRationalAlpha);
        assert!((n.log_abs - 1728f64.ln()).abs() < 1e-10);

        let n = norm_diff_rational_alpha(&disc(-8), &Integer::from(1728)).unwrap();
        assert_eq!(n.exact.as_ref().unwrap(), &6272);

        assert!(matches!(
            norm_diff_rational_alpha(&disc(-3), &Integer::new()),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn resultant_examples() {
        let n = pair_product_log(&disc(-3), &disc(-4)).unwrap();
        assert_eq!(n.exact.as_ref().unwrap(), &1728);
        assert_eq!(n.mode, NormMode::PairProduct);

        let n = pair_product_log(&disc(-7), &disc(-8)).unwrap();
        assert_eq!(n.exact.as_ref().unwrap(), &11375);

        let n = pair_product_log(&disc(-15), &disc(-4)).unwrap();
        let expect = hp(-15).eval_at_integer(&Integer::from(1728)).abs();
        assert_eq!(n.exact.as_ref().unwrap(), &expect);

        assert!(matches!(
            pair_product_log(&disc(-15), &disc(-15)),
            Err(Error::SameDiscriminant)
        ));
    }

    #[test]
    fn resultant_symmetric_in_absolute_value() {
        for (d1, d2) in [(-15, -23), (-23, -15), (-20, -24), (-31, -4)] {
            let a = hp(d1).coeffs;
            let b = hp(d2).coeffs;
            assert_eq!(resultant_abs(&a, &b), resultant_abs(&b, &a));
        }
    }

    #[test]
    fn roots_match_j_values() {
        for delta in [-15i64, -20, -23, -31, -47, -71] {
            let d = disc(delta);
            let h = hilbert_poly(&d).unwrap();
            assert_eq!(h.degree() as u64, crate::forms::class_number(&d));
            for f in enumerate_reduced(&d) {
                let j = eval_j(&point_of_form(&f), 128).unwrap().value;
                // Horner in complex intervals; result must enclose 0.
                let prec = j.prec();
                let mut acc = ComplexInterval::from_i64(0, prec);
                for c in h.coeffs.iter().rev() {
                    acc = acc.mul(&j);
                    acc = acc.add(&ComplexInterval::new(
                        Interval::from_integer(c, prec),
                        Interval::zero(prec),
                    ));
                }
                assert!(acc.re.contains_zero() && acc.im.contains_zero());
            }
        }
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = disc(-15);
        let h = hilbert_poly(&d).unwrap();
        assert!(matches!(cache_get(dir.path(), &d), Err(Error::CacheMiss)));
        cache_put(dir.path(), &h).unwrap();
        let back = cache_get(dir.path(), &d).unwrap();
        assert_eq!(back.coeffs, h.coeffs);
        assert_eq!(back.cert.prec_bits_used, h.cert.prec_bits_used);

        // Byte-identical on re-put.
        let bytes1 = fs::read(cache_path(dir.path(), &d)).unwrap();
        cache_put(dir.path(), &back).unwrap();
        let bytes2 = fs::read(cache_path(dir.path(), &d)).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn cache_detects_tampering() {
        let dir = tempfile::tempdir().unwrap();
        let d = disc(-15);
        cache_put(dir.path(), &hilbert_poly(&d).unwrap()).unwrap();
        let path = cache_path(dir.path(), &d);
        let mut text = fs::read_to_string(&path).unwrap();
        text = text.replace("191025", "191026");
        fs::write(&path, text).unwrap();
        assert!(matches!(
            cache_get(dir.path(), &d),
            Err(Error::CacheCorrupt(_))
        ));
    }
}
