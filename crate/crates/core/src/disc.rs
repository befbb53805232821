//! Discriminant validation and the decomposition delta = f^2 * D with the
//! modified conductor.

use crate::error::{Error, Result};
use crate::intarith;

/// A validated negative discriminant together with its fundamental part,
/// conductor and modified conductor. `delta / f_mod^2` is square-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Discriminant {
    delta: i64,
    d_fund: i64,
    f: u64,
    f_mod: u64,
}

impl Discriminant {
    /// Validates delta and computes D, f and the modified conductor.
    pub fn new(delta: i64) -> Result<Discriminant> {
        if delta >= 0 {
            return Err(Error::NotNegative(delta));
        }
        let r = delta.rem_euclid(4);
        if r != 0 && r != 1 {
            return Err(Error::InvalidResidue(delta));
        }
        let abs = delta.unsigned_abs();
        let fact = intarith::factorize(abs)?;
        // largest f with f^2 | delta and delta/f^2 still a discriminant
        let mut f = 1u64;
        for &(p, e) in &fact.factors {
            f *= p.pow(e / 2);
        }
        let mut d_fund = delta / (f * f) as i64;
        // d_fund is now square-free (up to sign); fix up the mod-4 condition
        if d_fund.rem_euclid(4) != 1 {
            // need 4 | fundamental discriminant; pull one factor 2 out of f
            debug_assert_eq!(f % 2, 0, "delta = 0,1 mod 4 guarantees this");
            f /= 2;
            d_fund = delta / (f * f) as i64;
        }
        debug_assert!(d_fund.rem_euclid(4) == 0 || d_fund.rem_euclid(4) == 1);
        let f_mod = if d_fund.rem_euclid(4) == 1 { f } else { 2 * f };
        Ok(Discriminant {
            delta,
            d_fund,
            f,
            f_mod,
        })
    }

    pub fn delta(&self) -> i64 {
        self.delta
    }

    /// |delta|
    pub fn abs(&self) -> i64 {
        self.delta.unsigned_abs() as i64
    }

    /// Fundamental discriminant D with delta = f^2 D.
    pub fn d_fund(&self) -> i64 {
        self.d_fund
    }

    /// Conductor f.
    pub fn conductor(&self) -> u64 {
        self.f
    }

    /// Modified conductor: f if D = 1 mod 4, else 2f.
    pub fn conductor_mod(&self) -> u64 {
        self.f_mod
    }

    /// Sorted divisors of the modified conductor; equals { d >= 1 : d^2 | delta }.
    pub fn quadratic_divisors(&self) -> Vec<u64> {
        let mut divs = divisors(self.f_mod);
        divs.sort_unstable();
        debug_assert!(divs.iter().all(|&d| (self.delta % (d * d) as i64) == 0));
        divs
    }
}

/// All divisors of n (unsorted).
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    let fact = intarith::factorize(n).expect("n >= 1");
    for (p, e) in fact.factors {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 1..=e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out
}
