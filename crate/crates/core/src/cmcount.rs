//! Exact computation of the counting function C_eps(tau, Delta) — the number
//! of imaginary quadratic points of discriminant Delta within distance eps of
//! tau — together with its certified upper bounds.
//!
//! Membership is decided exactly: for CM points tau and z the squared
//! distance is r - s sqrt(m) with r, s rational and m a positive integer, so
//! the strict comparison against eps^2 reduces to rational sign tests. The
//! a/b enumeration windows are used only as necessary conditions (padded
//! outward in floating point), so no candidate point is ever missed.

use rayon::prelude::*;
use rug::{Integer, Rational};

use crate::disc::Discriminant;
use crate::error::{Error, Result};
use crate::forms::{CMPoint, QForm};
use crate::intarith::{gcd2, gcd_u64, isqrt_u64, sigma0, sigma1};
use crate::interval::Interval;

/// A validated counting query.
#[derive(Clone, Debug)]
pub struct EpsQuery {
    pub tau: CMPoint,
    pub eps: Rational,
    pub disc: Discriminant,
}

impl EpsQuery {
    /// eps must lie in (0, 1/2) and tau in the fundamental domain.
    pub fn new(tau: CMPoint, eps: Rational, disc: Discriminant) -> Result<EpsQuery> {
        if eps <= 0 || eps >= (1, 2) {
            return Err(Error::EpsilonOutOfRange);
        }
        if !tau.in_fundamental_domain() {
            return Err(Error::OutsideFundamentalDomain);
        }
        Ok(EpsQuery { tau, eps, disc })
    }
}

/// Result of an exact count, with the certified bounds alongside.
#[derive(Clone, Debug)]
pub struct EpsCountResult {
    pub exact_count: u64,
    pub thm_bound: f64,
    pub cor_bound: Option<f64>,
    pub a_interval: (f64, f64),
    pub witnesses: Vec<QForm>,
}

/// Exact strict predicate |tau(a,b,.) - tau| < eps.
///
/// With x = |Delta|, xt = |Delta_tau|, the squared distance is
/// r - s sqrt(x xt) where r = (b/2a - bt/2at)^2 + x/4a^2 + xt/4at^2 and
/// s = 1/(2 a at) > 0. Writing t = r - eps^2, the condition t < s sqrt(m)
/// holds iff t < 0, or t >= 0 and t^2 < s^2 m.
fn strictly_within(tau: &CMPoint, a: i64, b: i64, delta: i64, eps: &Rational) -> bool {
    let at = tau.form().a;
    let bt = tau.form().b;
    let x = Integer::from(delta.unsigned_abs());
    let xt = Integer::from(tau.disc().unsigned_abs());

    let dre = Rational::from((b, 2 * a)) - Rational::from((bt, 2 * at));
    let r = dre.square()
        + Rational::from((x.clone(), Integer::from(4) * a * a))
        + Rational::from((xt.clone(), Integer::from(4) * at * at));
    let m = x * xt;
    let t = r - eps.clone().square();
    if t < 0 {
        return true;
    }
    let s_sq = Rational::from((Integer::from(1), Integer::from(4) * a * a * at * at));
    t.square() < s_sq * m
}

/// All witnesses with a fixed leading coefficient a, scanning the padded
/// b-window and applying the exact predicate.
fn witnesses_for_a(q: &EpsQuery, a: i64) -> Vec<QForm> {
    let delta = q.disc.delta();
    let re_tau = Rational::from((q.tau.form().b, 2 * q.tau.form().a)).to_f64();
    let eps = q.eps.to_f64();
    let b_lo = (2.0 * a as f64 * (re_tau - eps)).floor() as i64 - 2;
    let b_hi = (2.0 * a as f64 * (re_tau + eps)).ceil() as i64 + 2;

    let mut out = Vec::new();
    for b in b_lo..=b_hi {
        let num = (b as i128) * (b as i128) - delta as i128;
        if num % (4 * a as i128) != 0 {
            continue;
        }
        let c = num / (4 * a as i128);
        if c <= 0 || c > i64::MAX as i128 {
            continue;
        }
        let c = c as i64;
        let g = gcd_u64(gcd_u64(a as u64, b.unsigned_abs()), c as u64);
        if g != 1 {
            continue;
        }
        if strictly_within(&q.tau, a, b, delta, &q.eps) {
            out.push(QForm::new(a, b, c).expect("witness satisfies form invariants"));
        }
    }
    out
}

/// Exact value of C_eps(tau, Delta) with witnesses, plus the certified
/// upper bounds evaluated for the same query.
pub fn exact_count_eps(q: &EpsQuery) -> Result<EpsCountResult> {
    let x = q.disc.abs() as f64;
    let sx = x.sqrt();
    let im_tau = q.tau.im_sq().to_f64().sqrt();
    let eps = q.eps.to_f64();

    let a_lo = sx / (2.0 * (im_tau + eps));
    let a_hi = sx / (2.0 * (im_tau - eps));
    let a_min = ((a_lo.floor() as i64) - 2).max(1);
    let a_max = (a_hi.ceil() as i64) + 2;

    let mut witnesses: Vec<QForm> = (a_min..=a_max)
        .into_par_iter()
        .flat_map_iter(|a| witnesses_for_a(q, a))
        .collect();
    witnesses.sort_by_key(|f| (f.a, f.b));

    let table = crate::intarith::SpfTable::build(isqrt_u64(q.disc.abs().unsigned_abs()) + 1);
    let f_val = crate::intarith::f_of_disc(&q.disc, &table)?;
    let thm_bound = thm_bound_eps(q, f_val)?;
    let cor_bound = if q.disc.abs() >= 100_000_000_000_000 {
        Some(cor_bound_eps(q, f_val)?)
    } else {
        None
    };

    Ok(EpsCountResult {
        exact_count: witnesses.len() as u64,
        thm_bound,
        cor_bound,
        a_interval: (a_lo, a_hi),
        witnesses,
    })
}

/// The four-term counting bound
///
/// ```text
/// F ((48+16 sqrt 3)/3 (sigma1(f~)/f~) |D|^(1/2) eps^2
///    + (12+4 sqrt 3)/3 |D|^(1/2) eps
///    + 8 |D|^(1/4) / (sqrt 3 - 1)^(1/2) sigma0(f~) eps + 2),
/// ```
///
/// evaluated in interval arithmetic and rounded up.
pub fn thm_bound_eps(q: &EpsQuery, f_val: u64) -> Result<f64> {
    let p = 96u32;
    let ft = q.disc.conductor_mod();
    let s1_over = Interval::from_rational(&Rational::from((sigma1(ft)?, ft)), p);
    let s0 = Interval::from_i64(sigma0(ft)? as i64, p);
    let eps = Interval::from_rational(&q.eps, p);
    let sx = Interval::from_i64(q.disc.abs(), p).sqrt();
    let qx = sx.sqrt();
    let s3 = Interval::from_i64(3, p).sqrt();
    let three = Interval::from_i64(3, p);

    let term1 = Interval::from_i64(48, p)
        .add(&Interval::from_i64(16, p).mul(&s3))
        .div(&three)
        .mul(&s1_over)
        .mul(&sx)
        .mul(&eps.square());
    let term2 = Interval::from_i64(12, p)
        .add(&Interval::from_i64(4, p).mul(&s3))
        .div(&three)
        .mul(&sx)
        .mul(&eps);
    let term3 = Interval::from_i64(8, p)
        .mul(&qx)
        .div(&s3.sub(&Interval::from_i64(1, p)).sqrt())
        .mul(&s0)
        .mul(&eps);
    let total = term1
        .add(&term2)
        .add(&term3)
        .add(&Interval::from_i64(2, p))
        .mul(&Interval::from_i64(f_val as i64, p));
    Ok(total.hi_f64())
}

/// The simplified large-discriminant bound
/// F (46.488 |D|^(1/2) eps^2 loglog |D|^(1/2) + 7.752 |D|^(1/2) eps + 2),
/// valid only for |Delta| >= 10^14.
pub fn cor_bound_eps(q: &EpsQuery, f_val: u64) -> Result<f64> {
    if q.disc.abs() < 100_000_000_000_000 {
        return Err(Error::HypothesisNotMet(format!(
            "|Delta| = {} < 10^14",
            q.disc.abs()
        )));
    }
    let p = 96u32;
    let eps = Interval::from_rational(&q.eps, p);
    let sx = Interval::from_i64(q.disc.abs(), p).sqrt();
    let loglog = sx.ln().ln();
    let c1 = Interval::from_rational(&Rational::from((46488, 1000)), p);
    let c2 = Interval::from_rational(&Rational::from((7752, 1000)), p);

    let total = c1
        .mul(&sx)
        .mul(&eps.square())
        .mul(&loglog)
        .add(&c2.mul(&sx).mul(&eps))
        .add(&Interval::from_i64(2, p))
        .mul(&Interval::from_i64(f_val as i64, p));
    Ok(total.hi_f64())
}

/// Brute-force audit of the residue-class lemma: the set
/// {b mod a : b^2 = Delta mod a} is a union of residue classes modulo
/// a / gcd2(a, Delta); returns (number of classes, modulus).
pub fn residue_class_audit(a: u64, delta: i64) -> Result<(u64, u64)> {
    let g2 = gcd2(a, delta)?;
    let modulus = a / g2;
    let mut classes = std::collections::BTreeSet::new();
    for b in 0..a {
        let bb = ((b as i128 * b as i128 - delta as i128) % a as i128 + a as i128) % a as i128;
        if bb == 0 {
            classes.insert(b % modulus);
        }
    }
    Ok((classes.len() as u64, modulus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::point_of_form;
    use crate::intarith::omega;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(tau: (i64, i64, i64), eps: (i64, i64), delta: i64) -> EpsQuery {
        EpsQuery::new(
            point_of_form(&QForm::new(tau.0, tau.1, tau.2).unwrap()),
            Rational::from(eps),
            Discriminant::new(delta).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn named_counts() {
        // Around i: only the point i itself is within 3/10 for disc -4.
        let r = exact_count_eps(&q((1, 0, 1), (3, 10), -4)).unwrap();
        assert_eq!(r.exact_count, 1);
        assert_eq!(r.witnesses, vec![QForm::new(1, 0, 1).unwrap()]);

        // Nearest disc -3 point to i is zeta6 at distance ~0.518.
        let r = exact_count_eps(&q((1, 0, 1), (1, 20), -3)).unwrap();
        assert_eq!(r.exact_count, 0);

        // zeta6 counts itself; zeta3 is at distance 1.
        let r = exact_count_eps(&q((1, 1, 1), (3, 10), -3)).unwrap();
        assert_eq!(r.exact_count, 1);
    }

    #[test]
    fn witnesses_satisfy_definition() {
        let query = q((1, 0, 1), (2, 5), -23);
        let r = exact_count_eps(&query).unwrap();
        assert_eq!(r.exact_count, r.witnesses.len() as u64);
        for w in &r.witnesses {
            assert_eq!(w.disc(), -23);
            assert!(strictly_within(&query.tau, w.a, w.b, -23, &query.eps));
        }
    }

    /// Independent oracle: full scan over a wide (a, b) box with the same
    /// exact predicate but none of the window logic.
    fn brute_count(query: &EpsQuery) -> u64 {
        let delta = query.disc.delta();
        let x = query.disc.abs() as f64;
        let mut n = 0;
        let a_cap =
            (x.sqrt() / (2.0 * (query.tau.im_sq().to_f64().sqrt() - 0.5))).ceil() as i64 + 4;
        for a in 1..=a_cap.max(4) {
            let b_cap = 2 * a + (x.sqrt() as i64) + 4;
            for b in -b_cap..=b_cap {
                let num = (b as i128) * (b as i128) - delta as i128;
                if num <= 0 || num % (4 * a as i128) != 0 {
                    continue;
                }
                let c = (num / (4 * a as i128)) as i64;
                if gcd_u64(gcd_u64(a as u64, b.unsigned_abs()), c as u64) != 1 {
                    continue;
                }
                if strictly_within(&query.tau, a, b, delta, &query.eps) {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn oracle_agreement_and_soundness() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let taus = [(1, 0, 1), (1, 1, 1), (1, 1, 2), (2, 1, 3), (3, 1, 2)];
        let mut checked = 0;
        while checked < 60 {
            let delta = -rng.gen_range(3..=1200i64);
            if Discriminant::new(delta).is_err() {
                continue;
            }
            let t = taus[rng.gen_range(0..taus.len())];
            if !QForm::new(t.0, t.1, t.2).unwrap().is_reduced() {
                continue;
            }
            let den = rng.gen_range(5..40i64);
            let query = q(t, (1, den), delta);
            let r = exact_count_eps(&query).unwrap();
            assert_eq!(
                r.exact_count,
                brute_count(&query),
                "delta={delta} eps=1/{den}"
            );
            if query.eps < (1, 4) {
                assert!(
                    (r.exact_count as f64) <= r.thm_bound,
                    "bound violated at delta={delta}"
                );
            }
            checked += 1;
        }
    }

    #[test]
    fn thm_bound_limits_and_monotonicity() {
        // As eps -> 0 only the constant term survives: bound -> 2F.
        let r = thm_bound_eps(&q((1, 0, 1), (1, 1_000_000_000), -4), 2).unwrap();
        assert!((4.0..4.001).contains(&r));

        let lo = thm_bound_eps(&q((1, 0, 1), (1, 10), -4), 2).unwrap();
        let hi = thm_bound_eps(&q((1, 0, 1), (2, 10), -4), 2).unwrap();
        assert!(hi > lo);
    }

    #[test]
    fn cor_bound_examples() {
        // Delta = -10^14, c = |Delta|/4.
        let big = q(
            (1, 0, 25_000_000_000_000),
            (1, 1_000_000_000_000),
            -100_000_000_000_000,
        );
        let r = cor_bound_eps(&big, 256).unwrap();
        assert!((512.0..513.0).contains(&r));

        let r = cor_bound_eps(&big, 256).unwrap();
        let tiny = q(
            (1, 0, 25_000_000_000_000),
            (1, 1_000_000_000),
            -100_000_000_000_000,
        );
        let r2 = cor_bound_eps(&tiny, 256).unwrap();
        assert!(r2 > r);

        let small = q((1, 0, 2_500_000_000_000), (1, 10), -10_000_000_000_000);
        assert!(matches!(
            cor_bound_eps(&small, 256),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn residue_audit_examples() {
        assert_eq!(residue_class_audit(4, -4).unwrap(), (1, 2));
        assert_eq!(residue_class_audit(3, 1).unwrap(), (2, 3));
        assert_eq!(residue_class_audit(1, -7).unwrap(), (1, 1));
    }

    #[test]
    fn residue_audit_respects_lemma_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let a = rng.gen_range(1..500u64);
            let delta = rng.gen_range(-500..500i64);
            if delta == 0 {
                continue;
            }
            let (count, _) = residue_class_audit(a, delta).unwrap();
            let g = gcd_u64(a, delta.unsigned_abs());
            let cap = 1u64 << (omega((a / g).max(1)).unwrap() + 1);
            assert!(count <= cap, "a={a} delta={delta}: {count} > {cap}");
        }
    }

    #[test]
    fn interval_counting_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..2000 {
            let alpha = rng.gen_range(-1000.0..1000.0f64);
            let beta = alpha + rng.gen_range(0.0..500.0f64);
            let m = rng.gen_range(1..60i64);
            let r = rng.gen_range(0..m);
            let mut count = 0;
            let mut k = ((alpha / m as f64).floor() as i64 - 2) * m + r;
            while (k as f64) <= beta {
                if k as f64 >= alpha {
                    count += 1;
                }
                k += m;
            }
            assert!(count as f64 <= (beta - alpha) / m as f64 + 1.0);
        }
    }

    #[test]
    fn eps_validation() {
        let tau = point_of_form(&QForm::new(1, 0, 1).unwrap());
        let d = Discriminant::new(-4).unwrap();
        assert!(matches!(
            EpsQuery::new(tau, Rational::from((1, 2)), d),
            Err(Error::EpsilonOutOfRange)
        ));
        assert!(matches!(
            EpsQuery::new(tau, Rational::from(0), d),
            Err(Error::EpsilonOutOfRange)
        ));
        let z = point_of_form(&QForm::new(2, 2, 1).unwrap());
        assert!(matches!(
            EpsQuery::new(z, Rational::from((1, 10)), d),
            Err(Error::OutsideFundamentalDomain)
        ));
    }
}
