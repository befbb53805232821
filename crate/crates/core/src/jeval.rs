//! Rigorous arbitrary-precision evaluation of the Klein j-function at CM
//! points, with guaranteed absolute error bounds.
//!
//! The j-function is evaluated as E4(tau)^3 / eta(tau)^24 where
//! eta(tau)^24 = q * P(q)^24 with q = e^{2 pi i tau} and P the pentagonal
//! number series. All series are summed in outward-rounded interval
//! arithmetic with explicit geometric tail bounds, so the returned
//! enclosure always contains the true value.

use rug::float::Round;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::forms::{reduce_point_exact, CMPoint};
use crate::intarith::sigma3;
use crate::interval::{ComplexInterval, Interval};

/// A certified value of j(tau).
#[derive(Clone, Debug)]
pub struct JValue {
    /// Rectangular enclosure of j(tau).
    pub value: ComplexInterval,
    /// The (reduced) point at which j was evaluated.
    pub tau: CMPoint,
    /// Total number of series terms summed (eta plus E4).
    pub terms_used: usize,
}

impl JValue {
    /// Guaranteed absolute error radius of `value`.
    pub fn err_abs(&self) -> Float {
        self.value.err_abs()
    }
}

/// Maximum number of precision doublings before giving up. Escalation is
/// only ever triggered by a denominator enclosure touching zero or an
/// enclosure wider than the promised tolerance, neither of which should
/// survive a couple of doublings; exhaustion signals a bug.
const MAX_ESCALATIONS: u32 = 4;

/// q = e^{2 pi i tau} at working precision `wp`, evaluated from the exact
/// coordinates tau = (b + sqrt(Delta)) / (2a):
/// q = exp(-pi sqrt|Delta| / a) * (cos(pi b / a) + i sin(pi b / a)).
fn q_at(tau: &CMPoint, wp: u32) -> ComplexInterval {
    let a = tau.form().a;
    let b = tau.form().b;
    let x = tau.disc().unsigned_abs();

    let pi = Interval::pi(wp);
    let av = Interval::from_i64(a, wp);
    let sx = Interval::from_i64(x as i64, wp).sqrt();
    let mag = pi.mul(&sx).div(&av).neg().exp();
    // b/a lies in (-1, 1], so the angle is within (-pi, pi].
    let ang = pi.mul(&Interval::from_i64(b, wp)).div(&av);
    let re = ang.cos().mul(&mag);
    let im = ang.sin().mul(&mag);
    ComplexInterval::new(re, im)
}

/// Upper bound on |z| as a directed-rounding Float.
fn abs_upper(z: &ComplexInterval) -> Float {
    z.abs().hi().clone()
}

/// Pentagonal number series P(q) = sum_{k in Z} (-1)^k q^{k(3k-1)/2},
/// summed until the geometric tail drops below 2^-(target_bits + 16)
/// relative to the partial sum, then widened by the tail bound.
/// Requires |q| < 1/2 (guaranteed for reduced points: |q| <= e^{-pi sqrt 3}).
fn pentagonal_series(q: &ComplexInterval, target_bits: u32) -> (ComplexInterval, usize) {
    let wp = q.prec();
    let qa = abs_upper(q);
    debug_assert!(qa < 0.5);

    let mut sum = ComplexInterval::from_i64(1, wp);
    let mut terms = 1usize;
    let mut k: i64 = 1;
    loop {
        let e1 = (k * (3 * k - 1) / 2) as u32;
        let e2 = (k * (3 * k + 1) / 2) as u32;
        let pair = q.pow_u32(e1).add(&q.pow_u32(e2));
        sum = if k % 2 == 1 {
            sum.sub(&pair)
        } else {
            sum.add(&pair)
        };
        terms += 2;

        // Remaining terms have exponents >= (k+1)(3k+2)/2 and alternate in
        // pairs; bound them by 2 |q|^e_next / (1 - |q|) <= 4 |q|^e_next.
        let e_next = ((k + 1) * (3 * k + 2) / 2) as u32;
        let mut tail = Float::with_val_round(wp, (&qa).pow(e_next), Round::Up).0;
        tail = Float::with_val_round(wp, 4u32 * &tail, Round::Up).0;

        let scale = {
            let m = sum.abs();
            if m.lo().is_sign_positive() && !m.lo().is_zero() {
                m.lo().clone()
            } else {
                Float::with_val(wp, 1)
            }
        };
        let thresh = Float::with_val_round(
            wp,
            &scale * Float::with_val(wp, Float::i_exp(1, -((target_bits + 16) as i32))),
            Round::Down,
        )
        .0;
        if tail < thresh {
            return (sum.widen(&tail), terms);
        }
        k += 1;
    }
}

/// E4(tau) = 1 + 240 sum_{n>=1} sigma3(n) q^n, with a rigorous geometric
/// tail: for |q| <= e^{-pi sqrt 3} the term ratio 240 (n+1)^3 |q|^{n+1} /
/// (240 n^3 |q|^n) = ((n+1)/n)^3 |q| <= 8 |q| < 1/2, so the tail after the
/// bound 240 (n+1)^3 |q|^{n+1} is at most twice that bound.
fn e4_series(q: &ComplexInterval, target_bits: u32) -> (ComplexInterval, usize) {
    let wp = q.prec();
    let qa = abs_upper(q);
    debug_assert!(Float::with_val(wp, 8u32 * qa.clone()) < 0.5);

    let mut sum = ComplexInterval::from_i64(1, wp);
    let mut qn = q.clone();
    let mut terms = 1usize;
    let mut n: u64 = 1;
    loop {
        let coeff = Interval::from_i64((240 * sigma3(n)) as i64, wp);
        sum = sum.add(&qn.scale(&coeff));
        terms += 1;

        let m = n + 1;
        let head = Float::with_val_round(
            wp,
            240 * m * m * m * Float::with_val_round(wp, (&qa).pow(m as u32), Round::Up).0,
            Round::Up,
        )
        .0;
        let tail = Float::with_val_round(wp, 2u32 * &head, Round::Up).0;

        let scale = {
            let mag = sum.abs();
            if mag.lo().is_sign_positive() && !mag.lo().is_zero() {
                mag.lo().clone()
            } else {
                Float::with_val(wp, 1)
            }
        };
        let thresh = Float::with_val_round(
            wp,
            &scale * Float::with_val(wp, Float::i_exp(1, -((target_bits + 16) as i32))),
            Round::Down,
        )
        .0;
        if tail < thresh {
            return (sum.widen(&tail), terms);
        }
        n = m;
        qn = qn.mul(q);
    }
}

/// q = e^{2 pi i tau} with relative error at most 2^-prec_bits.
///
/// Requires tau to lie in the standard fundamental domain.
pub fn eval_q(tau: &CMPoint, prec_bits: u32) -> Result<ComplexInterval> {
    if !tau.in_fundamental_domain() {
        return Err(Error::OutsideFundamentalDomain);
    }
    let mut wp = prec_bits + 32;
    for _ in 0..=MAX_ESCALATIONS {
        let q = q_at(tau, wp);
        let err = q.err_abs();
        let qlo = q.abs().lo().clone();
        let tol = Float::with_val_round(
            wp,
            &qlo * Float::with_val(wp, Float::i_exp(1, -(prec_bits as i32))),
            Round::Down,
        )
        .0;
        if qlo.is_sign_positive() && !qlo.is_zero() && err <= tol {
            return Ok(q);
        }
        wp *= 2;
    }
    Err(Error::PrecisionExhausted(wp))
}

/// Extra working bits needed because |j(tau)| grows like e^{pi sqrt|Delta| / a}.
fn lead_growth_bits(tau: &CMPoint) -> u32 {
    let x = tau.disc().unsigned_abs() as f64;
    let a = tau.form().a as f64;
    (std::f64::consts::PI * x.sqrt() / (a * std::f64::consts::LN_2)).ceil() as u32 + 4
}

/// j(tau) = E4(tau)^3 / eta(tau)^24 with a certified enclosure.
///
/// The returned error radius is at most 2^{8 - prec_bits} * max(1, |j(tau)|).
/// Requires tau in the fundamental domain; use [`eval_j_any`] otherwise.
pub fn eval_j(tau: &CMPoint, prec_bits: u32) -> Result<JValue> {
    if !tau.in_fundamental_domain() {
        return Err(Error::OutsideFundamentalDomain);
    }
    let mut wp = prec_bits + 64 + lead_growth_bits(tau);
    for _ in 0..=MAX_ESCALATIONS {
        let q = q_at(tau, wp);
        let (p, terms_p) = pentagonal_series(&q, wp);
        let (e4, terms_e) = e4_series(&q, wp);

        // eta^24 = q * P(q)^24; eta never vanishes on H, so a denominator
        // enclosure touching zero just means the precision was too low.
        let eta24 = q.mul(&p.pow_u32(24));
        let den_lo = eta24.norm_sq().lo().clone();
        if !den_lo.is_sign_positive() || den_lo.is_zero() {
            wp *= 2;
            continue;
        }
        let j = e4.pow_u32(3).div(&eta24);

        let err = j.err_abs();
        let jmag = {
            let lo = j.abs().lo().clone();
            if lo > 1 {
                lo
            } else {
                Float::with_val(wp, 1)
            }
        };
        let tol = Float::with_val_round(
            wp,
            &jmag * Float::with_val(wp, Float::i_exp(1, 8 - prec_bits as i32)),
            Round::Down,
        )
        .0;
        if err <= tol {
            return Ok(JValue {
                value: j,
                tau: *tau,
                terms_used: terms_p + terms_e,
            });
        }
        wp *= 2;
    }
    Err(Error::PrecisionExhausted(wp))
}

/// j at an arbitrary CM point: reduces exactly to the fundamental domain
/// first, then evaluates there (j is SL2(Z)-invariant).
pub fn eval_j_any(z: &CMPoint, prec_bits: u32) -> Result<JValue> {
    let (reduced, _) = reduce_point_exact(z);
    eval_j(&reduced, prec_bits)
}
