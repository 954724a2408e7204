//! Exact modular arithmetic over odd prime moduli.
//!
//! [`PrimeModulus`] bundles a prime `p` with its least primitive root and a
//! discrete-logarithm table, which turns inverses, Legendre symbols, and
//! character evaluation into table lookups — every downstream sum calls these
//! in an inner loop.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::{Error, Result};

/// Exact rational number; always in lowest terms with positive denominator
/// (both invariants are maintained by the representation itself).
pub type Rational = BigRational;

/// Build a rational from machine integers.
pub fn rat(num: i128, den: i128) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Deterministic trial-division primality test; adequate for desk-scale
/// moduli (everything here stays below 10^5).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// All primes in the inclusive range `[lo, hi]`.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi.max(lo.saturating_sub(1))).filter(|&n| is_prime(n)).collect()
}

/// Smallest prime `>= n`.
pub fn next_prime_at_or_above(n: u64) -> u64 {
    let mut m = n.max(2);
    while !is_prime(m) {
        m += 1;
    }
    m
}

/// Largest prime `<= n`, if any.
pub fn prev_prime_at_or_below(n: u64) -> Option<u64> {
    let mut m = n;
    while m >= 2 {
        if is_prime(m) {
            return Some(m);
        }
        m -= 1;
    }
    None
}

/// Prime factorization by trial division, as (prime, exponent) pairs.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Modular exponentiation by repeated squaring.
pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m > 0);
    let mut base = (base % m) as u128;
    let m = m as u128;
    let mut acc = 1u128 % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc as u64
}

/// Least primitive root modulo the odd prime `p`.
///
/// Candidate `g` generates the full group iff `g^((p-1)/d) != 1` for every
/// prime `d | p-1`.
pub fn primitive_root(p: u64) -> Result<u64> {
    if !is_prime(p) || p < 3 {
        return Err(Error::NotOddPrime(p));
    }
    let phi = p - 1;
    let prime_divisors: Vec<u64> = factorize(phi).into_iter().map(|(d, _)| d).collect();
    'candidate: for g in 2..p {
        for &d in &prime_divisors {
            if pow_mod(g, phi / d, p) == 1 {
                continue 'candidate;
            }
        }
        return Ok(g);
    }
    unreachable!("every prime has a primitive root")
}

/// An odd prime together with discrete-log and power tables for its unit
/// group. Immutable after construction and safe to share across workers.
pub struct PrimeModulus {
    p: u64,
    g: u64,
    /// `dlog[a] = t` with `g^t == a (mod p)` for `1 <= a < p`; `dlog[0]` is
    /// a sentinel and never read.
    dlog: Vec<u32>,
    /// `antilog[t] = g^t mod p` for `0 <= t < p-1`.
    antilog: Vec<u32>,
}

impl PrimeModulus {
    pub fn new(p: u64) -> Result<Self> {
        let g = primitive_root(p)?; // rejects non-primes and p = 2
        let mut dlog = vec![u32::MAX; p as usize];
        let mut antilog = vec![0u32; (p - 1) as usize];
        let mut x = 1u64;
        for t in 0..p - 1 {
            antilog[t as usize] = x as u32;
            dlog[x as usize] = t as u32;
            x = x * g % p;
        }
        debug_assert_eq!(x, 1, "g must have order exactly p-1");
        Ok(Self { p, g, dlog, antilog })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Group order p - 1.
    pub fn phi(&self) -> u64 {
        self.p - 1
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Reduce a signed integer into `[0, p)`.
    pub fn reduce(&self, a: i64) -> u64 {
        a.rem_euclid(self.p as i64) as u64
    }

    /// Discrete log of a nonzero residue to base `g`.
    pub fn dlog(&self, a: u64) -> Result<u64> {
        let a = a % self.p;
        if a == 0 {
            return Err(Error::ZeroResidue);
        }
        Ok(self.dlog[a as usize] as u64)
    }

    /// `g^t mod p` by table lookup (`t` taken mod p-1).
    pub fn antilog(&self, t: u64) -> u64 {
        self.antilog[(t % self.phi()) as usize] as u64
    }

    /// Multiplicative inverse of a nonzero residue: `g^(p-1-dlog(a))`.
    pub fn inverse(&self, a: u64) -> Result<u64> {
        let t = self.dlog(a)?;
        Ok(self.antilog((self.phi() - t) % self.phi()))
    }

    /// Legendre symbol `(a|p)` in {-1, 0, +1}: the nonzero squares are
    /// exactly the residues with even discrete log.
    pub fn legendre(&self, a: i64) -> i32 {
        let a = self.reduce(a);
        if a == 0 {
            0
        } else if self.dlog[a as usize] % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

/// The asymptotic error envelope `exp(3 ln p / ln ln p)` that scales every
/// residual in the theorem and L-moment comparisons.
pub fn asymptotic_envelope(p: u64) -> f64 {
    let lp = (p as f64).ln();
    (3.0 * lp / lp.ln()).exp()
}

/// Sawtooth function `((x))`: `x - floor(x) - 1/2` off the integers, `0` at
/// integers.
pub fn sawtooth(x: &Rational) -> Rational {
    if x.is_integer() {
        return Rational::zero();
    }
    x - x.floor() - rat(1, 2)
}
