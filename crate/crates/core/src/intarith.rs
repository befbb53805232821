//! Exact integer arithmetic: factorization, divisor functions, the greatest
//! common quadratic divisor, a smallest-prime-factor sieve, and the quantity
//! F = max { 2^omega(a) : a^2 <= |delta| }.

use crate::disc::Discriminant;
use crate::error::{Error, Result};

/// Prime factorization of a positive integer, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Multiplies the factorization back together.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }
}

/// Deterministic Miller-Rabin, valid for all n < 3.3 * 10^24 with this
/// witness set (we only ever call it for u64).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Pollard's rho with a fixed polynomial x^2 + c, deterministic retry on the
/// increment. Input must be composite, odd, and not a prime power handled by
/// trial division already.
fn pollard_rho(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u64(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Factorize n >= 1. Trial division to 10^6, then rho + Miller-Rabin.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::NonPositive(0));
    }
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    let push = |p: u64, e: u32, factors: &mut Vec<(u64, u32)>| {
        factors.push((p, e));
    };
    for p in TrialPrimes::new() {
        if p > 1_000_000 || p * p > m {
            break;
        }
        if m.is_multiple_of(p) {
            let mut e = 0;
            while m.is_multiple_of(p) {
                m /= p;
                e += 1;
            }
            push(p, e, &mut factors);
        }
    }
    if m > 1 {
        // trial division already removed everything below 10^6, so a
        // remaining m < 10^12 is prime or a product of two primes
        if is_prime(m) {
            push(m, 1, &mut factors);
        } else {
            // composite remainder: split recursively with rho
            let mut stack = vec![m];
            let mut found: Vec<u64> = Vec::new();
            while let Some(v) = stack.pop() {
                if is_prime(v) {
                    found.push(v);
                    continue;
                }
                let d = pollard_rho(v);
                stack.push(d);
                stack.push(v / d);
            }
            found.sort_unstable();
            let mut i = 0;
            while i < found.len() {
                let p = found[i];
                let mut e = 0;
                while i < found.len() && found[i] == p {
                    e += 1;
                    i += 1;
                }
                push(p, e, &mut factors);
            }
        }
    }
    factors.sort_unstable_by_key(|&(p, _)| p);
    Ok(Factorization { n, factors })
}

/// Odd numbers plus 2; cheap stand-in for a prime iterator in trial division.
struct TrialPrimes {
    next: u64,
}

impl TrialPrimes {
    fn new() -> Self {
        TrialPrimes { next: 2 }
    }
}

impl Iterator for TrialPrimes {
    type Item = u64;
    fn next(&mut self) -> Option<u64> {
        let v = self.next;
        self.next = if v == 2 { 3 } else { v + 2 };
        Some(v)
    }
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.factors.len() as u32)
}

/// Number of divisors.
pub fn sigma0(n: u64) -> Result<u64> {
    Ok(factorize(n)?
        .factors
        .iter()
        .map(|&(_, e)| e as u64 + 1)
        .product())
}

/// Sum of divisors.
pub fn sigma1(n: u64) -> Result<u64> {
    Ok(factorize(n)?
        .factors
        .iter()
        .map(|&(p, e)| (0..=e).map(|k| p.pow(k)).sum::<u64>())
        .product())
}

/// Sum of cubes of divisors (used by the Eisenstein series E4).
pub fn sigma3(n: u64) -> u64 {
    let mut s = 0u64;
    let mut d = 1u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            s += d * d * d;
            let q = n / d;
            if q != d {
                s += q * q * q;
            }
        }
        d += 1;
    }
    s
}

/// Greatest d >= 1 with d^2 | m and d^2 | |n|.
pub fn gcd2(m: u64, n: i64) -> Result<u64> {
    if m == 0 {
        return Err(Error::NonPositive(0));
    }
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let fm = factorize(m)?;
    let fn_ = factorize(n.unsigned_abs())?;
    let mut d = 1u64;
    for &(p, em) in &fm.factors {
        if let Some(&(_, en)) = fn_.factors.iter().find(|&&(q, _)| q == p) {
            d *= p.pow((em / 2).min(en / 2));
        }
    }
    Ok(d)
}

/// Smallest-prime-factor table for 2..=limit, built by a linear sieve.
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn build(limit: u64) -> SpfTable {
        assert!(limit >= 2 && limit <= u32::MAX as u64);
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::new();
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            for &p in &primes {
                let ip = i * p as usize;
                if p > spf[i] || ip > n {
                    break;
                }
                spf[ip] = p;
            }
        }
        SpfTable { limit, spf }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of k, 2 <= k <= limit.
    pub fn spf(&self, k: u64) -> u32 {
        self.spf[k as usize]
    }

    /// omega(k) by repeated spf division.
    pub fn omega(&self, k: u64) -> u32 {
        let mut k = k as usize;
        let mut w = 0;
        while k > 1 {
            let p = self.spf[k];
            w += 1;
            while k > 1 && self.spf[k] == p {
                k /= p as usize;
            }
            // spf[k] == p can miss k == p^j tails when k itself is prime p
            while k.is_multiple_of(p as usize) {
                k /= p as usize;
            }
        }
        w
    }
}

/// F(delta) = max { 2^omega(a) : 1 <= a, a^2 <= |delta| }.
///
/// The limit check and the scan bound are exact: a is included iff a^2 <= |delta|.
pub fn f_of_disc(d: &Discriminant, table: &SpfTable) -> Result<u64> {
    let abs = d.abs();
    let bound = isqrt_u64(abs as u64);
    if table.limit() < bound {
        return Err(Error::TableTooSmall {
            limit: table.limit(),
            required: bound,
        });
    }
    let mut max_w = 0u32;
    for a in 2..=bound {
        let w = table.omega(a);
        if w > max_w {
            max_w = w;
        }
    }
    Ok(1u64 << max_w)
}

/// Floor of the square root, exact for all u64.
pub fn isqrt_u64(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut x = (n as f64).sqrt() as u64;
    while x > 0 && x.checked_mul(x).is_none_or(|v| v > n) {
        x -= 1;
    }
    while (x + 1).checked_mul(x + 1).is_some_and(|v| v <= n) {
        x += 1;
    }
    x
}
