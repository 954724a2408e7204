//! The three primitive objects: the two-term exponential sum `C(m,n,k,h;q)`,
//! the Dedekind sum `S(h,q)`, and the alpha constant.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::Zero;

use crate::arith::{pow_mod, rat, sawtooth, PrimeModulus, Rational};
use crate::kahan::CompensatedSum;
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// Parameters of `C(m,n,k,h;q) = sum_(a=0)^(q-1) e((m·a^k + n·a^h)/q)`.
#[derive(Clone, Copy, Debug)]
pub struct ExpSumParams {
    pub m: i64,
    pub n: i64,
    pub k: u32,
    pub h: u32,
    pub q: u64,
}

impl ExpSumParams {
    pub fn validate(&self) -> Result<()> {
        if self.q < 3 {
            return Err(Error::ModulusTooSmall { min: 3, got: self.q });
        }
        if self.k < 1 || self.h < 1 {
            return Err(Error::BadExponent);
        }
        Ok(())
    }
}

/// Evaluate `C(m,n,k,h;q)` directly from the definition, with the q-th roots
/// of unity precomputed and `a^k`, `a^h` reduced once per term.
pub fn two_term_exponential_sum(params: &ExpSumParams) -> Result<Complex64> {
    params.validate()?;
    let q = params.q;
    let m = params.m.rem_euclid(q as i64) as u64;
    let n = params.n.rem_euclid(q as i64) as u64;
    let roots: Vec<Complex64> =
        (0..q).map(|j| Complex64::from_polar(1.0, TAU * j as f64 / q as f64)).collect();
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for a in 0..q {
        let s = pow_mod(a, params.k as u64, q);
        let t = pow_mod(a, params.h as u64, q);
        let idx = (m * s + n * t) % q;
        re.add(roots[idx as usize].re);
        im.add(roots[idx as usize].im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Evaluation strategy for [`dedekind_sum`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DedekindMethod {
    /// The O(q) definitional sum over exact sawtooth products.
    Direct,
    /// The Euclidean recursion built on the reciprocity law
    /// `S(h,q) + S(q,h) = -1/4 + (h^2 + q^2 + 1)/(12hq)`.
    Reciprocity,
}

/// Exact Dedekind sum `S(h,q) = sum_(a=0)^(q-1) ((a/q))((ah/q))`.
///
/// `h` may be any integer coprime to `q`; the sum only depends on `h mod q`.
pub fn dedekind_sum(h: i64, q: u64, method: DedekindMethod) -> Result<Rational> {
    if q < 2 {
        return Err(Error::ModulusTooSmall { min: 2, got: q });
    }
    let hr = h.rem_euclid(q as i64) as u64;
    if hr.gcd(&q) != 1 {
        return Err(Error::NotCoprime { h, q });
    }
    Ok(match method {
        DedekindMethod::Direct => direct_dedekind(hr, q),
        DedekindMethod::Reciprocity => reciprocity_dedekind(hr, q),
    })
}

/// Definitional sum; the a = 0 term contributes 0 but belongs to the range.
fn direct_dedekind(h: u64, q: u64) -> Rational {
    let mut acc = Rational::zero();
    for a in 1..q {
        let first = sawtooth(&rat(a as i128, q as i128));
        let second = sawtooth(&rat((a as i128) * (h as i128), q as i128));
        acc += first * second;
    }
    acc
}

/// Euclidean recursion: peel with reciprocity until the first argument is 1,
/// where `S(1,q) = (q-1)(q-2)/(12q)` closes the chain.
fn reciprocity_dedekind(h: u64, q: u64) -> Rational {
    if h == 1 || q <= 2 {
        return s_one(q);
    }
    let (h, q) = (h as i128, q as i128);
    rat(-1, 4) + rat(h * h + q * q + 1, 12 * h * q)
        - reciprocity_dedekind((q % h) as u64, h as u64)
}

/// `S(1,q) = (q-1)(q-2)/(12q)`.
fn s_one(q: u64) -> Rational {
    let q = q as i128;
    rat((q - 1) * (q - 2), 12 * q)
}

/// `S(a,p)` recovered through the odd-character L-value route.
///
/// Summing `chi(a)·Lambda(chi)` over odd characters and applying the
/// odd-character counting identity collapses the transcendental pieces into
/// the exact rational form
/// `S(a,p) = (1/(2p^2)) · sum_(b=1)^(p-1) b·(2·(ab mod p) - p)`,
/// which this function evaluates in integer arithmetic.
pub fn dedekind_from_l_functions(a: i64, pm: &PrimeModulus) -> Result<Rational> {
    let p = pm.p();
    let ar = pm.reduce(a);
    if ar == 0 {
        return Err(Error::ZeroResidue);
    }
    let mut acc: i128 = 0;
    for b in 1..p {
        let r = ar * b % p;
        acc += b as i128 * (2 * r as i128 - p as i128);
    }
    Ok(Rational::new(BigInt::from(acc), BigInt::from(2) * BigInt::from(p).pow(2)))
}

/// The alpha constant `sum_(a=1)^((p-1)/2) legendre(a + a^(-1))`.
pub fn alpha_constant(pm: &PrimeModulus) -> i64 {
    let p = pm.p();
    (1..=(p - 1) / 2)
        .map(|a| pm.legendre((a + pm.inverse(a).unwrap()) as i64) as i64)
        .sum()
}

/// Per-prime cache of every `S(h,p)` (h = 1..p-1), exact values built by the
/// reciprocity fast path plus their doubles, converted once at the boundary.
pub struct DedekindCache {
    exact: Vec<Rational>,
    float: Vec<f64>,
}

impl DedekindCache {
    pub fn new(p: u64) -> Result<Self> {
        use num_traits::ToPrimitive;
        let mut exact = Vec::with_capacity(p as usize);
        let mut float = Vec::with_capacity(p as usize);
        exact.push(Rational::zero()); // padding so h indexes directly
        float.push(0.0);
        for h in 1..p {
            let v = dedekind_sum(h as i64, p, DedekindMethod::Reciprocity)?;
            float.push(v.to_f64().unwrap());
            exact.push(v);
        }
        Ok(Self { exact, float })
    }

    pub fn exact(&self, h: u64) -> &Rational {
        &self.exact[h as usize]
    }

    pub fn float(&self, h: u64) -> f64 {
        self.float[h as usize]
    }
}
