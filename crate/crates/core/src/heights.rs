//! Weil heights of singular moduli and of differences x - alpha, the
//! archimedean height decomposition, the explicit lower bounds, and the
//! imported separation inequalities as checkable predicates.
//!
//! Singular moduli are algebraic integers with monic minimal polynomial
//! H_Delta, so h(x) = (1/C(Delta)) sum_k log+ |x_k| over the conjugates;
//! there are no finite places to account for.

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::classpoly::norm_diff_rational_alpha;
use crate::disc::Discriminant;
use crate::error::{Error, Result};
use crate::forms::{enumerate_reduced, point_of_form, QForm};
use crate::interval::{ComplexInterval, Interval};
use crate::jeval::eval_j;

/// A height value with its per-conjugate breakdown and a rigorous error
/// radius.
#[derive(Clone, Debug)]
pub struct HeightReport {
    pub disc: Discriminant,
    pub h: f64,
    pub per_conjugate: Vec<(QForm, f64)>,
    pub err: f64,
}

/// Refinement ceiling for deciding log+ at the |x| = 1 boundary.
const MAX_REFINE_BITS: u32 = 1 << 12;

/// log+ of a positive magnitude interval: zero when |x| <= 1, ln when
/// |x| >= 1, and the bracket [0, ln hi] when the enclosure straddles 1
/// (the caller widens err accordingly instead of guessing).
fn log_plus(ab: &Interval) -> Interval {
    let p = ab.lo().prec();
    let one = Interval::from_i64(1, p);
    if ab.hi().clone() <= 1 {
        Interval::zero(p)
    } else if ab.lo().clone() >= 1 {
        ab.ln()
    } else {
        Interval::zero(p).hull(&ab.hull(&one).ln())
    }
}

/// Whether the magnitude enclosure still straddles 1.
fn straddles_one(ab: &Interval) -> bool {
    ab.lo().clone() < 1 && ab.hi().clone() > 1
}

/// One conjugate's log+ term, refining precision while the |x| = 1 boundary
/// is undecided; shift is subtracted from the real part before taking |.|.
fn conjugate_term(f: &QForm, shift: &Integer, prec_bits: u32) -> Result<Interval> {
    let mut p = prec_bits;
    loop {
        let j = eval_j(&point_of_form(f), p)?;
        let prec = j.value.prec();
        let shifted = ComplexInterval::new(
            j.value.re.sub(&Interval::from_integer(shift, prec)),
            j.value.im.clone(),
        );
        let ab = shifted.abs();
        if !straddles_one(&ab) || p >= MAX_REFINE_BITS {
            return Ok(log_plus(&ab));
        }
        p *= 2;
    }
}

fn report_from_terms(
    d: &Discriminant,
    forms: &[QForm],
    terms: &[Interval],
    extra: Option<&Interval>,
) -> HeightReport {
    let p = terms.first().map(|t| t.lo().prec()).unwrap_or(96);
    let mut total = Interval::zero(p);
    for t in terms {
        total = total.add(t);
    }
    if let Some(e) = extra {
        total = total.add(e);
    }
    let mean = total.div(&Interval::from_i64(forms.len() as i64, p));
    HeightReport {
        disc: *d,
        h: mean.mid_f64(),
        per_conjugate: forms
            .iter()
            .zip(terms)
            .map(|(f, t)| (*f, t.mid_f64()))
            .collect(),
        err: mean.rad().to_f64() + 1e-15,
    }
}

/// h(x) for the singular moduli of discriminant Delta.
pub fn height_singular(d: &Discriminant, prec_bits: u32) -> Result<HeightReport> {
    let forms = enumerate_reduced(d);
    let zero = Integer::new();
    let terms: Vec<Interval> = forms
        .par_iter()
        .map(|f| conjugate_term(f, &zero, prec_bits))
        .collect::<Result<_>>()?;
    Ok(report_from_terms(d, &forms, &terms, None))
}

/// h(x - alpha) for integer (rational singular modulus) alpha, computed by
/// the direct route (1/C) sum log+ |x_k - alpha| and cross-validated against
/// the inverse route (1/C)(sum log+ |x_k - alpha|^-1 + log |N(x - alpha)|).
pub fn height_diff_rational(
    d: &Discriminant,
    alpha: &Integer,
    prec_bits: u32,
) -> Result<HeightReport> {
    let forms = enumerate_reduced(d);
    let terms: Vec<Interval> = forms
        .par_iter()
        .map(|f| conjugate_term(f, alpha, prec_bits))
        .collect::<Result<_>>()?;
    let direct = report_from_terms(d, &forms, &terms, None);

    // Inverse route: h(u) = h(1/u) = (1/C)(sum log+ |1/u_k| + log |N(u)|).
    let norm = norm_diff_rational_alpha(d, alpha)?; // ZeroNorm iff x = alpha
    let inv_terms: Vec<Interval> = forms
        .par_iter()
        .map(|f| -> Result<Interval> {
            let mut p = prec_bits;
            loop {
                let j = eval_j(&point_of_form(f), p)?;
                let prec = j.value.prec();
                let shifted = ComplexInterval::new(
                    j.value.re.sub(&Interval::from_integer(alpha, prec)),
                    j.value.im.clone(),
                );
                let ab = Interval::from_i64(1, prec).div(&shifted.abs());
                if !straddles_one(&ab) || p >= MAX_REFINE_BITS {
                    return Ok(log_plus(&ab));
                }
                p *= 2;
            }
        })
        .collect::<Result<_>>()?;
    let log_n = Interval::point(rug::Float::with_val(96, norm.log_abs))
        .widen(&rug::Float::with_val(32, 1e-9));
    let inverse = report_from_terms(d, &forms, &inv_terms, Some(&log_n));

    let combined = direct.err + inverse.err + 1e-9;
    if (direct.h - inverse.h).abs() > combined {
        // The two routes are an algebraic identity; disagreement beyond the
        // certified radii signals a computation bug, not an input condition.
        return Err(Error::PrecisionExhausted(prec_bits));
    }
    Ok(direct)
}

/// h(x) >= (pi |Delta|^(1/2) - 0.01) / C(Delta) for |Delta| >= 16.
/// The returned value is an upper enclosure of the bound, so `h >= returned`
/// rigorously implies the inequality.
pub fn lower_bound_51(d: &Discriminant) -> Result<f64> {
    if d.abs() < 16 {
        return Err(Error::HypothesisNotMet(format!(
            "|Delta| = {} < 16",
            d.abs()
        )));
    }
    let p = 96;
    let c = crate::forms::class_number(d) as i64;
    let bound = Interval::pi(p)
        .mul(&Interval::from_i64(d.abs(), p).sqrt())
        .sub(&Interval::from_rational(&Rational::from((1, 100)), p))
        .div(&Interval::from_i64(c, p));
    Ok(bound.hi_f64())
}

/// h(x) >= max(3/sqrt(5) log |Delta| - 9.79, 1/(4 sqrt 5) log |Delta| - 5.93),
/// valid for every discriminant (possibly vacuous for tiny |Delta|).
pub fn lower_bound_52(d: &Discriminant) -> f64 {
    let p = 96;
    let logx = Interval::from_i64(d.abs(), p).ln();
    let s5 = Interval::from_i64(5, p).sqrt();
    let b1 = Interval::from_i64(3, p)
        .div(&s5)
        .mul(&logx)
        .sub(&Interval::from_rational(&Rational::from((979, 100)), p));
    let b2 = Interval::from_i64(1, p)
        .div(&Interval::from_i64(4, p).mul(&s5))
        .mul(&logx)
        .sub(&Interval::from_rational(&Rational::from((593, 100)), p));
    b1.hi_f64().max(b2.hi_f64())
}

/// Lower bound for h(x - alpha) via h(x - alpha) >= h(x) - h(alpha) - log 2,
/// with h(x) replaced by the best applicable explicit bound.
pub fn diff_height_lower(d: &Discriminant, d_alpha: &Discriminant) -> Result<f64> {
    let hx = if d.abs() >= 16 {
        lower_bound_51(d)?.max(lower_bound_52(d))
    } else {
        lower_bound_52(d)
    };
    let h_alpha = height_singular(d_alpha, 128)?;
    Ok(hx - (h_alpha.h + h_alpha.err) - std::f64::consts::LN_2)
}

/// Margins of the imported separation inequalities over all conjugate pairs.
/// Every margin is expected to be nonnegative; negative values falsify the
/// corresponding inequality on this pair of discriminants.
#[derive(Clone, Debug)]
pub struct SeparationReport {
    /// Smallest |x - alpha| over all conjugate pairs (lower enclosure).
    pub min_abs_diff: f64,
    /// min |x - alpha| - 800 max(|Delta|, |Delta_alpha|)^-4.
    pub margin_sep: f64,
    /// For alpha = 1728 only: min of |x - 1728| - 20000 min(|z - i|, 0.01)^2.
    pub margin_near_i: Option<f64>,
    /// For alpha = 1728 only: min of |x - 1728| - 2000 |Delta|^-2.
    pub margin_disc_i: Option<f64>,
    /// For Im tau >= 1.3 pairs: min of |x - alpha| - e^(2.6 pi) min(0.4 |z' - tau|, 0.04)
    /// with z' the nearest SL2(Z)-translate of z among a candidate set.
    pub margin_tall: Option<f64>,
}

/// Euclidean distance (interval) between two complex enclosures.
fn dist(a: &ComplexInterval, b: &ComplexInterval) -> Interval {
    a.sub(b).abs()
}

pub fn separation_audit(
    d: &Discriminant,
    d_alpha: &Discriminant,
    prec_bits: u32,
) -> Result<SeparationReport> {
    if d.delta() == d_alpha.delta() {
        return Err(Error::SameDiscriminant);
    }
    let p = prec_bits.max(64);
    let zs = enumerate_reduced(d);
    let taus = enumerate_reduced(d_alpha);

    let sep_bound = {
        let m = Interval::from_i64(d.abs().max(d_alpha.abs()), p);
        Interval::from_i64(800, p).div(&m.pow_u32(4))
    };
    let disc_bound = Interval::from_i64(2000, p).div(&Interval::from_i64(d.abs(), p).square());
    let e26pi = Interval::pi(p)
        .mul(&Interval::from_rational(&Rational::from((26, 10)), p))
        .exp();

    let mut min_abs = f64::INFINITY;
    let mut margin_sep = f64::INFINITY;
    let mut margin_near_i: Option<f64> = None;
    let mut margin_disc_i: Option<f64> = None;
    let mut margin_tall: Option<f64> = None;

    for fz in &zs {
        let pz = point_of_form(fz);
        let x = eval_j(&pz, p)?.value;
        let z = pz.to_complex(p);
        for ft in &taus {
            let pt = point_of_form(ft);
            let alpha = eval_j(&pt, p)?.value;
            let tau = pt.to_complex(p);
            let diff = dist(&x, &alpha);
            let lo = diff.lo_f64();
            min_abs = min_abs.min(lo);
            margin_sep = margin_sep.min(lo - sep_bound.hi_f64());

            // Lemma bounds around i apply when alpha = 1728 and z != i.
            if d_alpha.delta() == -4 && fz.disc() != -4 {
                let zi = dist(
                    &z,
                    &ComplexInterval::from_i64(0, p).add(&ComplexInterval::new(
                        Interval::zero(p),
                        Interval::from_i64(1, p),
                    )),
                );
                let cutoff = Interval::from_rational(&Rational::from((1, 100)), p);
                let m = if zi.hi_f64() <= cutoff.lo_f64() {
                    zi.clone()
                } else {
                    cutoff
                };
                let near = Interval::from_i64(20000, p).mul(&m.square());
                let v = lo - near.hi_f64();
                margin_near_i = Some(margin_near_i.map_or(v, |w| w.min(v)));
                let v2 = lo - disc_bound.hi_f64();
                margin_disc_i = Some(margin_disc_i.map_or(v2, |w| w.min(v2)));
            }

            // Tall-tau lemma: Im tau >= 1.3, audited with the nearest of a
            // small candidate set of SL2(Z)-translates of z.
            if pt.im_sq() >= (169, 100) {
                let one = ComplexInterval::from_i64(1, p);
                let minus_inv = ComplexInterval::from_i64(-1, p).div(&z);
                let candidates = [
                    z.clone(),
                    z.add(&one),
                    z.sub(&one),
                    minus_inv.clone(),
                    minus_inv.add(&one),
                    minus_inv.sub(&one),
                ];
                let dmin = candidates
                    .iter()
                    .map(|c| dist(c, &tau))
                    .min_by(|a, b| a.lo_f64().total_cmp(&b.lo_f64()))
                    .unwrap();
                let scaled = dmin.mul(&Interval::from_rational(&Rational::from((2, 5)), p));
                let capped = if scaled.hi_f64() <= 0.04 {
                    scaled
                } else {
                    Interval::from_rational(&Rational::from((1, 25)), p)
                };
                let rhs = e26pi.mul(&capped);
                let v = lo - rhs.hi_f64();
                margin_tall = Some(margin_tall.map_or(v, |w| w.min(v)));
            }
        }
    }

    Ok(SeparationReport {
        min_abs_diff: min_abs,
        margin_sep,
        margin_near_i,
        margin_disc_i,
        margin_tall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(delta: i64) -> Discriminant {
        Discriminant::new(delta).unwrap()
    }

    #[test]
    fn height_of_named_moduli() {
        let h = height_singular(&disc(-3), 128).unwrap();
        assert!(h.h.abs() < 1e-14 && h.err < 1e-14);

        let h = height_singular(&disc(-4), 128).unwrap();
        assert!((h.h - 1728f64.ln()).abs() < 1e-12);

        let h = height_singular(&disc(-15), 128).unwrap();
        assert_eq!(h.per_conjugate.len(), 2);
        // Cross-check against the explicit lower bound shape for this size.
        let ref_bound = (std::f64::consts::PI * 15f64.sqrt() - 0.01) / 2.0;
        assert!(h.h >= ref_bound);
    }

    #[test]
    fn height_nonnegative_and_bounded_small_range() {
        for delta in (-400..=-3i64).rev() {
            let Ok(d) = Discriminant::new(delta) else {
                continue;
            };
            let h = height_singular(&d, 96).unwrap();
            assert!(h.h >= -h.err, "negative height at {delta}");
            if d.abs() >= 16 {
                assert!(
                    h.h + h.err >= lower_bound_51(&d).unwrap(),
                    "5.1 fails at {delta}"
                );
            }
            assert!(h.h + h.err >= lower_bound_52(&d), "5.2 fails at {delta}");
        }
    }

    #[test]
    fn diff_height_identity() {
        for (delta, alpha) in [
            (-4i64, 0i64),
            (-8, 1728),
            (-15, 0),
            (-15, 1728),
            (-23, -3375),
        ] {
            let r = height_diff_rational(&disc(delta), &Integer::from(alpha), 160).unwrap();
            assert!(r.err < 1e-9, "wide error at {delta}, {alpha}");
        }
        let r = height_diff_rational(&disc(-4), &Integer::new(), 160).unwrap();
        assert!((r.h - 1728f64.ln()).abs() < 1e-10);
        let r = height_diff_rational(&disc(-8), &Integer::from(1728), 160).unwrap();
        assert!((r.h - 6272f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn diff_height_zero_rejected() {
        assert!(matches!(
            height_diff_rational(&disc(-3), &Integer::new(), 128),
            Err(Error::ZeroNorm)
        ));
    }

    #[test]
    fn explicit_bounds() {
        assert!(matches!(
            lower_bound_51(&disc(-15)),
            Err(Error::HypothesisNotMet(_))
        ));
        let b = lower_bound_51(&disc(-16)).unwrap();
        assert!((b - (4.0 * std::f64::consts::PI - 0.01)).abs() < 1e-9);
        let b = lower_bound_51(&disc(-23)).unwrap();
        assert!((b - (std::f64::consts::PI * 23f64.sqrt() - 0.01) / 3.0).abs() < 1e-9);

        let d1000 = disc(-1000);
        let expect = (3.0 / 5f64.sqrt() * 1000f64.ln() - 9.79)
            .max(1.0 / (4.0 * 5f64.sqrt()) * 1000f64.ln() - 5.93);
        assert!((lower_bound_52(&d1000) - expect).abs() < 1e-9);
    }

    #[test]
    fn diff_lower_examples() {
        let b = diff_height_lower(&disc(-16), &disc(-3)).unwrap();
        assert!((b - (4.0 * std::f64::consts::PI - 0.01 - std::f64::consts::LN_2)).abs() < 1e-6);

        let b = diff_height_lower(&disc(-16), &disc(-4)).unwrap();
        let expect = 4.0 * std::f64::consts::PI - 0.01 - 1728f64.ln() - std::f64::consts::LN_2;
        assert!((b - expect).abs() < 1e-6);
    }

    #[test]
    fn diff_lower_is_actually_lower() {
        for delta in [-16i64, -20, -23, -47, -84, -163] {
            for da in [-3i64, -4, -7] {
                let bound = diff_height_lower(&disc(delta), &disc(da)).unwrap();
                let alpha = match da {
                    -3 => 0,
                    -4 => 1728,
                    _ => -3375,
                };
                let actual =
                    height_diff_rational(&disc(delta), &Integer::from(alpha), 128).unwrap();
                assert!(
                    actual.h + actual.err >= bound,
                    "delta={delta} da={da}: {} < {bound}",
                    actual.h
                );
            }
        }
    }

    #[test]
    fn separation_examples() {
        let r = separation_audit(&disc(-8), &disc(-4), 96).unwrap();
        assert!((r.min_abs_diff - 6272.0).abs() < 1e-6);
        assert!(r.margin_sep > 6271.0);
        assert!(r.margin_near_i.unwrap() > 0.0);
        assert!(r.margin_disc_i.unwrap() > 2000f64.mul_add(-(1.0 / 64.0), 6272.0) - 1.0);

        let r = separation_audit(&disc(-7), &disc(-3), 96).unwrap();
        assert!((r.min_abs_diff - 3375.0).abs() < 1e-6);
        assert!(r.margin_sep > 0.0);

        let r = separation_audit(&disc(-7), &disc(-4), 96).unwrap();
        assert!((r.min_abs_diff - 5103.0).abs() < 1e-6);
        assert!(r.margin_disc_i.unwrap() > 5103.0 - 2000.0 / 49.0 - 1.0);
    }

    #[test]
    fn separation_small_sweep() {
        for delta in (-60..=-3i64).rev() {
            let Ok(d) = Discriminant::new(delta) else {
                continue;
            };
            for da in [-3i64, -4, -7, -8] {
                if delta == da {
                    continue;
                }
                let r = separation_audit(&d, &disc(da), 96).unwrap();
                assert!(r.margin_sep >= 0.0, "Thm 5.2 fails at ({delta}, {da})");
                if let Some(m) = r.margin_near_i {
                    assert!(m >= 0.0, "near-i bound fails at ({delta}, {da})");
                }
                if let Some(m) = r.margin_disc_i {
                    assert!(m >= 0.0, "disc bound fails at ({delta}, {da})");
                }
                if let Some(m) = r.margin_tall {
                    assert!(m >= 0.0, "tall-tau bound fails at ({delta}, {da})");
                }
            }
        }
    }
}
