//! Primitive positive-definite binary quadratic forms, Gauss reduction with
//! the transformation matrix, class-group enumeration, and the dictionary
//! between forms and CM points on the upper half plane.

use crate::disc::Discriminant;
use crate::error::{Error, Result};
use crate::intarith::{gcd_u64, isqrt_u64};
use crate::interval::{ComplexInterval, Interval};
use rug::Rational;

/// A primitive positive-definite integral form a x^2 + b x y + c y^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl QForm {
    pub fn new(a: i64, b: i64, c: i64) -> Result<QForm> {
        if a <= 0 {
            return Err(Error::InvalidForm {
                a,
                b,
                c,
                reason: "a must be positive",
            });
        }
        let disc = b
            .checked_mul(b)
            .and_then(|b2| {
                4i64.checked_mul(a)
                    .and_then(|x| x.checked_mul(c))
                    .map(|ac4| b2 - ac4)
            })
            .ok_or(Error::InvalidForm {
                a,
                b,
                c,
                reason: "overflow",
            })?;
        if disc >= 0 {
            return Err(Error::InvalidForm {
                a,
                b,
                c,
                reason: "discriminant not negative",
            });
        }
        let g = gcd_u64(
            gcd_u64(a.unsigned_abs(), b.unsigned_abs()),
            c.unsigned_abs(),
        );
        if g != 1 {
            return Err(Error::InvalidForm {
                a,
                b,
                c,
                reason: "not primitive",
            });
        }
        Ok(QForm { a, b, c })
    }

    pub fn disc(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// Reduced under the boundary convention: -a < b <= a <= c, and b >= 0
    /// when a == c (equivalently b >= 0 when |b| == a or a == c).
    pub fn is_reduced(&self) -> bool {
        let (a, b, c) = (self.a, self.b, self.c);
        -a < b && b <= a && a <= c && (a != c || b >= 0)
    }
}

/// Element of SL2(Z), acting on H by Moebius transformations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sl2 {
    pub p: i64,
    pub q: i64,
    pub r: i64,
    pub s: i64,
}

impl Sl2 {
    pub const IDENTITY: Sl2 = Sl2 {
        p: 1,
        q: 0,
        r: 0,
        s: 1,
    };

    pub fn translation(k: i64) -> Sl2 {
        Sl2 {
            p: 1,
            q: k,
            r: 0,
            s: 1,
        }
    }

    pub const INVERSION: Sl2 = Sl2 {
        p: 0,
        q: -1,
        r: 1,
        s: 0,
    };

    pub fn det(&self) -> i64 {
        self.p * self.s - self.q * self.r
    }

    /// self ∘ rhs (matrix product).
    pub fn compose(&self, rhs: &Sl2) -> Sl2 {
        Sl2 {
            p: self.p * rhs.p + self.q * rhs.r,
            q: self.p * rhs.q + self.q * rhs.s,
            r: self.r * rhs.p + self.s * rhs.r,
            s: self.r * rhs.q + self.s * rhs.s,
        }
    }

    /// Moebius action on a complex interval point.
    pub fn apply(&self, z: &ComplexInterval) -> ComplexInterval {
        let prec = z.prec();
        let p = ComplexInterval::from_i64(self.p, prec);
        let q = ComplexInterval::from_i64(self.q, prec);
        let r = ComplexInterval::from_i64(self.r, prec);
        let s = ComplexInterval::from_i64(self.s, prec);
        let num = p.mul(z).add(&q);
        let den = r.mul(z).add(&s);
        num.div(&den)
    }
}

/// Gauss reduction. Returns the reduced form and the matrix U in SL2(Z) with
/// tau(reduced) = U * tau(input) as a Moebius map.
pub fn reduce_form(f: &QForm) -> (QForm, Sl2) {
    let mut a = f.a;
    let mut b = f.b;
    let mut c = f.c;
    let mut u = Sl2::IDENTITY;
    loop {
        // normalize: bring b into (-a, a] by translations
        if b > a || b <= -a {
            // k = round towards the normalized window
            let k = (-(b - a)).div_euclid(2 * a); // smallest k with b + 2ka <= a
            let nb = b + 2 * k * a;
            let nc = a * k * k + b * k + c;
            b = nb;
            c = nc;
            u = Sl2::translation(k).compose(&u);
        }
        if a > c {
            // invert
            let (na, nb, nc) = (c, -b, a);
            a = na;
            b = nb;
            c = nc;
            u = Sl2::INVERSION.compose(&u);
            continue;
        }
        if a == c && b < 0 {
            let (na, nb, nc) = (c, -b, a);
            a = na;
            b = nb;
            c = nc;
            u = Sl2::INVERSION.compose(&u);
        }
        let g = QForm { a, b, c };
        if g.is_reduced() {
            debug_assert_eq!(g.disc(), f.disc());
            debug_assert_eq!(u.det(), 1);
            return (g, u);
        }
    }
}

/// All reduced primitive forms of discriminant delta, sorted by (a, b).
pub fn enumerate_reduced(d: &Discriminant) -> Vec<QForm> {
    let delta = d.delta();
    let x = delta.unsigned_abs();
    let mut out = Vec::new();
    let parity = (delta.rem_euclid(2)) as u64;
    let mut b = parity as i64;
    while 3 * (b * b) as u64 <= x {
        let n = (b * b) as u64 + x; // = 4ac
        debug_assert_eq!(n % 4, 0);
        let m = n / 4;
        // a runs over divisors of m with b <= a <= sqrt(m)
        let amax = isqrt_u64(m);
        let amin = if b == 0 { 1 } else { b as u64 };
        for a in amin.max(1)..=amax {
            if !m.is_multiple_of(a) {
                continue;
            }
            let c = (m / a) as i64;
            let ai = a as i64;
            if gcd_u64(gcd_u64(a, b.unsigned_abs()), c.unsigned_abs()) != 1 {
                continue;
            }
            out.push(QForm { a: ai, b, c });
            // the (a, -b, c) mate exists unless on a boundary
            if b > 0 && b < ai && ai < c {
                out.push(QForm { a: ai, b: -b, c });
            }
        }
        b += 2;
    }
    out.sort_unstable_by_key(|f| (f.a, f.b));
    out
}

/// Class number C(delta) = number of reduced forms.
pub fn class_number(d: &Discriminant) -> u64 {
    enumerate_reduced(d).len() as u64
}

/// The CM point tau(a,b,c) = (b + sqrt(delta)) / (2a), kept exact:
/// re = b/(2a), im^2 = |delta|/(4 a^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMPoint {
    form: QForm,
}

impl CMPoint {
    pub fn form(&self) -> &QForm {
        &self.form
    }

    pub fn disc(&self) -> i64 {
        self.form.disc()
    }

    /// Real part as an exact rational b/(2a).
    pub fn re(&self) -> Rational {
        Rational::from((self.form.b, 2 * self.form.a))
    }

    /// Squared imaginary part as an exact rational |delta|/(4a^2).
    pub fn im_sq(&self) -> Rational {
        Rational::from((
            self.form.disc().unsigned_abs(),
            (2 * self.form.a as u64) * (2 * self.form.a as u64),
        ))
    }

    /// Interval enclosure at the given precision.
    pub fn to_complex(&self, prec: u32) -> ComplexInterval {
        ComplexInterval::new(
            Interval::from_rational(&self.re(), prec),
            Interval::from_rational(&self.im_sq(), prec).sqrt(),
        )
    }

    /// Exact membership in the fundamental domain (the boundary convention of
    /// reduced forms matches the included geodesics of F).
    pub fn in_fundamental_domain(&self) -> bool {
        self.form.is_reduced()
    }
}

/// tau(a,b,c) for a valid form.
pub fn point_of_form(f: &QForm) -> CMPoint {
    CMPoint { form: *f }
}

/// Membership and reduction for the standard fundamental domain F:
/// the open triangle with vertices zeta3, zeta6, i*infinity together with
/// the geodesics [i, zeta6] and [zeta6, i*infinity).
pub struct FundamentalDomain;

impl FundamentalDomain {
    /// Exact predicate on CM points.
    pub fn contains(p: &CMPoint) -> bool {
        p.in_fundamental_domain()
    }

    /// Interval predicate: Ok(true/false) when decidable, error when the
    /// enclosure straddles a boundary of F.
    pub fn contains_interval(z: &ComplexInterval) -> Result<bool> {
        let prec = z.prec();
        let half = Interval::from_rational(&Rational::from((1, 2)), prec);
        let neg_half = half.neg();
        let one = Interval::from_i64(1, prec);
        let nsq = z.norm_sq();

        // clearly outside?
        if z.re.strictly_below(&neg_half) || half.strictly_below(&z.re) {
            return Ok(false);
        }
        if nsq.strictly_below(&one) {
            return Ok(false);
        }
        // interior?
        let interior = neg_half.strictly_below(&z.re)
            && z.re.strictly_below(&half)
            && one.strictly_below(&nsq);
        if interior {
            return Ok(true);
        }
        Err(Error::UndecidableBoundary(prec))
    }
}

/// Reduces a point of H to the fundamental domain. Returns the reduced point
/// and the SL2(Z) matrix applied. Boundary placement must be decidable from
/// the interval; otherwise UndecidableBoundary is returned.
pub fn reduce_to_fundamental(z: &ComplexInterval) -> Result<(ComplexInterval, Sl2)> {
    let prec = z.prec();
    let mut cur = z.clone();
    let mut u = Sl2::IDENTITY;
    if cur.im.lo().partial_cmp(&0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::OutsideFundamentalDomain);
    }
    for _ in 0..10_000 {
        // translate re into [-1/2, 1/2] if clearly off
        let m = cur.re.mid_f64();
        let k = m.round() as i64;
        if k != 0 {
            let t = Sl2::translation(-k);
            cur = t.apply(&cur);
            u = t.compose(&u);
        }
        let one = Interval::from_i64(1, prec);
        let nsq = cur.norm_sq();
        if nsq.strictly_below(&one) {
            cur = Sl2::INVERSION.apply(&cur);
            u = Sl2::INVERSION.compose(&u);
            continue;
        }
        // candidate: check membership, resolving the boundary convention
        match FundamentalDomain::contains_interval(&cur) {
            Ok(true) => return Ok((cur, u)),
            Ok(false) => continue,
            Err(e) => {
                // on-boundary cases: allowed boundary pieces are re = 1/2
                // (with |z| > 1) and the arc |z| = 1 with re in [0, 1/2];
                // exact inputs should use the form-reduction path instead
                let half = Interval::from_rational(&Rational::from((1, 2)), prec);
                let neg_half = half.neg();
                if cur.re == half && one.strictly_below(&nsq) {
                    return Ok((cur, u));
                }
                if cur.re == neg_half && one.strictly_below(&nsq) {
                    let t = Sl2::translation(1);
                    cur = t.apply(&cur);
                    u = t.compose(&u);
                    continue;
                }
                if nsq == one {
                    // exact unit circle: re >= 0 stays, re < 0 inverts
                    if cur.re.lo() >= &0 {
                        return Ok((cur, u));
                    }
                    if cur.re.hi() < &0 {
                        cur = Sl2::INVERSION.apply(&cur);
                        u = Sl2::INVERSION.compose(&u);
                        continue;
                    }
                }
                return Err(e);
            }
        }
    }
    Err(Error::UndecidableBoundary(prec))
}

/// Exact reduction of a CM point via form reduction: no floating error.
pub fn reduce_point_exact(p: &CMPoint) -> (CMPoint, Sl2) {
    let (g, u) = reduce_form(p.form());
    (point_of_form(&g), u)
}
