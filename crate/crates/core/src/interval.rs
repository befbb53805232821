//! Outward-rounded real and complex interval arithmetic on MPFR floats.
//!
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so the true value of any expression is always contained in the computed
//! interval. Transcendental endpoints rely on MPFR's correct rounding.

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};
use std::cmp::Ordering;
use std::fmt;

/// A closed real interval [lo, hi] with MPFR endpoints.
#[derive(Clone, PartialEq)]
pub struct Interval {
    lo: Float,
    hi: Float,
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}

impl Interval {
    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn point(f: Float) -> Interval {
        Interval {
            lo: f.clone(),
            hi: f,
        }
    }

    pub fn from_endpoints(lo: Float, hi: Float) -> Interval {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn from_i64(v: i64, prec: u32) -> Interval {
        // i64 fits exactly in a 64-bit mantissa
        let p = prec.max(64);
        Interval::point(Float::with_val(p, v))
    }

    pub fn from_integer(v: &Integer, prec: u32) -> Interval {
        let lo = Float::with_val_round(prec, v, Round::Down).0;
        let hi = Float::with_val_round(prec, v, Round::Up).0;
        Interval { lo, hi }
    }

    pub fn from_rational(v: &Rational, prec: u32) -> Interval {
        let lo = Float::with_val_round(prec, v, Round::Down).0;
        let hi = Float::with_val_round(prec, v, Round::Up).0;
        Interval { lo, hi }
    }

    pub fn zero(prec: u32) -> Interval {
        Interval::point(Float::with_val(prec, 0))
    }

    pub fn pi(prec: u32) -> Interval {
        let lo = Float::with_val_round(prec, Constant::Pi, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Pi, Round::Up).0;
        Interval { lo, hi }
    }

    pub fn ln2(prec: u32) -> Interval {
        let lo = Float::with_val_round(prec, Constant::Log2, Round::Down).0;
        let hi = Float::with_val_round(prec, Constant::Log2, Round::Up).0;
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn lo_f64(&self) -> f64 {
        let mut f = self.lo.clone();
        f.subnormalize_ieee_round(Ordering::Equal, Round::Down);
        f.to_f64_round(Round::Down)
    }

    pub fn hi_f64(&self) -> f64 {
        let mut f = self.hi.clone();
        f.subnormalize_ieee_round(Ordering::Equal, Round::Up);
        f.to_f64_round(Round::Up)
    }

    pub fn mid(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, &self.lo + &self.hi) / 2
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid().to_f64()
    }

    /// Upper bound on the radius (half-width).
    pub fn rad(&self) -> Float {
        let p = self.prec();
        let w = Float::with_val_round(p, &self.hi - &self.lo, Round::Up).0;
        w / 2
    }

    pub fn width(&self) -> Float {
        let p = self.prec();
        Float::with_val_round(p, &self.hi - &self.lo, Round::Up).0
    }

    pub fn contains_zero(&self) -> bool {
        self.lo <= 0 && self.hi >= 0
    }

    pub fn contains_integer(&self, v: &Integer) -> bool {
        self.lo <= *v && self.hi >= *v
    }

    /// True if every point of the interval is strictly less than every point of rhs.
    pub fn strictly_below(&self, rhs: &Interval) -> bool {
        self.hi < rhs.lo
    }

    pub fn add(&self, rhs: &Interval) -> Interval {
        let p = self.prec().max(rhs.prec());
        Interval {
            lo: Float::with_val_round(p, &self.lo + &rhs.lo, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi + &rhs.hi, Round::Up).0,
        }
    }

    pub fn sub(&self, rhs: &Interval) -> Interval {
        let p = self.prec().max(rhs.prec());
        Interval {
            lo: Float::with_val_round(p, &self.lo - &rhs.hi, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi - &rhs.lo, Round::Up).0,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: -self.hi.clone(),
            hi: -self.lo.clone(),
        }
    }

    pub fn mul(&self, rhs: &Interval) -> Interval {
        let p = self.prec().max(rhs.prec());
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = Float::with_val_round(p, a * b, Round::Down).0;
            let u = Float::with_val_round(p, a * b, Round::Up).0;
            lo = Some(match lo {
                None => d,
                Some(cur) => {
                    if d < cur {
                        d
                    } else {
                        cur
                    }
                }
            });
            hi = Some(match hi {
                None => u,
                Some(cur) => {
                    if u > cur {
                        u
                    } else {
                        cur
                    }
                }
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    /// Division; panics if rhs contains zero (callers must guard and escalate).
    pub fn div(&self, rhs: &Interval) -> Interval {
        assert!(
            !rhs.contains_zero(),
            "interval division by interval containing zero"
        );
        let p = self.prec().max(rhs.prec());
        let pairs = [
            (&self.lo, &rhs.lo),
            (&self.lo, &rhs.hi),
            (&self.hi, &rhs.lo),
            (&self.hi, &rhs.hi),
        ];
        let mut lo: Option<Float> = None;
        let mut hi: Option<Float> = None;
        for (a, b) in pairs {
            let d = Float::with_val_round(p, a / b, Round::Down).0;
            let u = Float::with_val_round(p, a / b, Round::Up).0;
            lo = Some(match lo {
                None => d,
                Some(cur) => {
                    if d < cur {
                        d
                    } else {
                        cur
                    }
                }
            });
            hi = Some(match hi {
                None => u,
                Some(cur) => {
                    if u > cur {
                        u
                    } else {
                        cur
                    }
                }
            });
        }
        Interval {
            lo: lo.unwrap(),
            hi: hi.unwrap(),
        }
    }

    pub fn square(&self) -> Interval {
        let m = self.mul(self);
        // squares are nonnegative; tighten the spurious negative lower bound
        if m.lo < 0 && !self.contains_zero() {
            m
        } else if m.lo < 0 {
            Interval {
                lo: Float::with_val(m.prec(), 0),
                hi: m.hi,
            }
        } else {
            m
        }
    }

    /// Integer power by repeated squaring.
    pub fn pow_u32(&self, e: u32) -> Interval {
        let p = self.prec();
        let mut acc = Interval::point(Float::with_val(p, 1));
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// sqrt, requires lo >= 0.
    pub fn sqrt(&self) -> Interval {
        assert!(self.lo >= 0, "sqrt of interval with negative lower bound");
        let mut lo = self.lo.clone();
        lo.sqrt_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.sqrt_round(Round::Up);
        Interval { lo, hi }
    }

    /// Natural log, requires lo > 0.
    pub fn ln(&self) -> Interval {
        assert!(self.lo > 0, "ln of interval not strictly positive");
        let mut lo = self.lo.clone();
        lo.ln_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.ln_round(Round::Up);
        Interval { lo, hi }
    }

    pub fn exp(&self) -> Interval {
        let mut lo = self.lo.clone();
        lo.exp_round(Round::Down);
        let mut hi = self.hi.clone();
        hi.exp_round(Round::Up);
        Interval { lo, hi }
    }

    /// Enclosure of cos over the interval: midpoint value widened by the
    /// full width (|cos'| <= 1 and the rounded midpoint may sit anywhere in
    /// the interval), valid regardless of enclosed extrema.
    pub fn cos(&self) -> Interval {
        let p = self.prec();
        let m = self.mid();
        let lo = Float::with_val_round(p, m.cos_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, m.cos_ref(), Round::Up).0;
        let r = self.width();
        let mut out = Interval {
            lo: Float::with_val_round(p, &lo - &r, Round::Down).0,
            hi: Float::with_val_round(p, &hi + &r, Round::Up).0,
        };
        out.clamp_unit();
        out
    }

    pub fn sin(&self) -> Interval {
        let p = self.prec();
        let m = self.mid();
        let lo = Float::with_val_round(p, m.sin_ref(), Round::Down).0;
        let hi = Float::with_val_round(p, m.sin_ref(), Round::Up).0;
        let r = self.width();
        let mut out = Interval {
            lo: Float::with_val_round(p, &lo - &r, Round::Down).0,
            hi: Float::with_val_round(p, &hi + &r, Round::Up).0,
        };
        out.clamp_unit();
        out
    }

    fn clamp_unit(&mut self) {
        if self.lo < -1 {
            self.lo = Float::with_val(self.lo.prec(), -1);
        }
        if self.hi > 1 {
            self.hi = Float::with_val(self.hi.prec(), 1);
        }
    }

    /// Widens both endpoints outward by t (t >= 0).
    pub fn widen(&self, t: &Float) -> Interval {
        let p = self.prec();
        Interval {
            lo: Float::with_val_round(p, &self.lo - t, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi + t, Round::Up).0,
        }
    }

    /// |x| as an interval.
    pub fn abs(&self) -> Interval {
        if self.lo >= 0 {
            self.clone()
        } else if self.hi <= 0 {
            self.neg()
        } else {
            let hi = if self.hi.clone().abs() > self.lo.clone().abs() {
                self.hi.clone()
            } else {
                -self.lo.clone()
            };
            Interval {
                lo: Float::with_val(self.prec(), 0),
                hi,
            }
        }
    }

    /// Convex hull.
    pub fn hull(&self, rhs: &Interval) -> Interval {
        Interval {
            lo: if self.lo < rhs.lo {
                self.lo.clone()
            } else {
                rhs.lo.clone()
            },
            hi: if self.hi > rhs.hi {
                self.hi.clone()
            } else {
                rhs.hi.clone()
            },
        }
    }

    /// 10^x computed as exp(x * ln 10).
    pub fn exp10(&self) -> Interval {
        let p = self.prec();
        let ten = Interval::from_i64(10, p);
        self.mul(&ten.ln()).exp()
    }

    /// Raises a positive interval to a rational power via exp(q * ln x).
    pub fn pow_rational(&self, q: &Rational) -> Interval {
        let p = self.prec();
        let e = Interval::from_rational(q, p);
        self.ln().mul(&e).exp()
    }
}

/// A rectangular complex interval (re and im are independent real intervals).
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexInterval {
    pub re: Interval,
    pub im: Interval,
}

impl ComplexInterval {
    pub fn new(re: Interval, im: Interval) -> ComplexInterval {
        ComplexInterval { re, im }
    }

    pub fn from_i64(v: i64, prec: u32) -> ComplexInterval {
        ComplexInterval {
            re: Interval::from_i64(v, prec),
            im: Interval::zero(prec),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn add(&self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.add(&rhs.re),
            im: self.im.add(&rhs.im),
        }
    }

    pub fn sub(&self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.sub(&rhs.re),
            im: self.im.sub(&rhs.im),
        }
    }

    pub fn mul(&self, rhs: &ComplexInterval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im)),
            im: self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re)),
        }
    }

    pub fn norm_sq(&self) -> Interval {
        self.re.square().add(&self.im.square())
    }

    /// |z| as a real interval.
    pub fn abs(&self) -> Interval {
        self.norm_sq().sqrt()
    }

    pub fn conj(&self) -> ComplexInterval {
        ComplexInterval {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    pub fn neg(&self) -> ComplexInterval {
        ComplexInterval {
            re: self.re.neg(),
            im: self.im.neg(),
        }
    }

    /// Division; panics if |rhs|^2 may be zero. Callers escalate precision.
    pub fn div(&self, rhs: &ComplexInterval) -> ComplexInterval {
        let n = rhs.norm_sq();
        assert!(n.lo() > &0, "complex interval division by possible zero");
        let num = self.mul(&rhs.conj());
        ComplexInterval {
            re: num.re.div(&n),
            im: num.im.div(&n),
        }
    }

    pub fn pow_u32(&self, e: u32) -> ComplexInterval {
        let p = self.prec();
        let mut acc = ComplexInterval::from_i64(1, p);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, k: &Interval) -> ComplexInterval {
        ComplexInterval {
            re: self.re.mul(k),
            im: self.im.mul(k),
        }
    }

    /// Adds [-t, t] to both components (series tail bounds).
    pub fn widen(&self, t: &Float) -> ComplexInterval {
        ComplexInterval {
            re: self.re.widen(t),
            im: self.im.widen(t),
        }
    }

    /// Upper bound on the radius of the enclosing disc around the midpoint.
    pub fn err_abs(&self) -> Float {
        let p = self.prec();
        let rr = self.re.rad();
        let ri = self.im.rad();
        let a = Float::with_val_round(p, rr.square_ref(), Round::Up).0;
        let b = Float::with_val_round(p, ri.square_ref(), Round::Up).0;
        let mut s = Float::with_val_round(p, &a + &b, Round::Up).0;
        s.sqrt_round(Round::Up);
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops_contain_truth() {
        let p = 64;
        let a = Interval::from_rational(&Rational::from((1, 3)), p);
        let b = Interval::from_rational(&Rational::from((1, 7)), p);
        let s = a.add(&b); // 10/21
        let truth = Rational::from((10, 21));
        let t = Interval::from_rational(&truth, 256);
        assert!(s.lo() <= t.hi() && s.hi() >= t.lo());
        assert!(s.lo() < s.hi()); // genuinely outward
        let m = a.mul(&b); // 1/21
        let t = Float::with_val(256, Rational::from((1, 21)));
        assert!(*m.lo() <= t && t <= *m.hi());
    }

    #[test]
    fn sqrt_ln_exp_enclose() {
        let p = 128;
        let two = Interval::from_i64(2, p);
        let r = two.sqrt();
        let sq = r.square();
        assert!(*sq.lo() <= 2 && *sq.hi() >= 2);
        let l = two.ln();
        let e = l.exp();
        assert!(*e.lo() <= 2 && *e.hi() >= 2);
    }

    #[test]
    fn pi_encloses() {
        let pi = Interval::pi(128);
        assert!(pi.lo_f64() < std::f64::consts::PI + 1e-15);
        assert!(pi.hi_f64() > std::f64::consts::PI - 1e-15);
        assert!(pi.width() < 1e-30);
    }

    #[test]
    fn trig_enclosure_with_wide_input() {
        // an interval around pi (cos has an extremum there)
        let pi = Interval::pi(64);
        let c = pi.cos();
        assert!(*c.lo() <= -1 && *c.hi() >= -1);
        assert!(c.lo() >= &-1.000001);
    }

    #[test]
    fn complex_mul_div_roundtrip() {
        let p = 128;
        let z = ComplexInterval::new(Interval::from_i64(3, p), Interval::from_i64(4, p));
        let w = ComplexInterval::new(Interval::from_i64(1, p), Interval::from_i64(2, p));
        let r = z.mul(&w).div(&w);
        assert!(r.re.lo_f64() <= 3.0 && r.re.hi_f64() >= 3.0);
        assert!(r.im.lo_f64() <= 4.0 && r.im.hi_f64() >= 4.0);
    }

    #[test]
    fn pow_matches_repeated_mul() {
        let p = 128;
        let z = ComplexInterval::new(
            Interval::from_rational(&Rational::from((1, 2)), p),
            Interval::from_rational(&Rational::from((1, 3)), p),
        );
        let a = z.pow_u32(5);
        let mut b = z.clone();
        for _ in 0..4 {
            b = b.mul(&z);
        }
        // both enclose the true value; midpoints must be close
        assert!((a.re.mid_f64() - b.re.mid_f64()).abs() < 1e-30);
        assert!((a.im.mid_f64() - b.im.mid_f64()).abs() < 1e-30);
    }
}
