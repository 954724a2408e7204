//! Dirichlet characters modulo an odd prime, Gauss sums, and exact
//! pi-normalized L-values.
//!
//! Characters are indexed against the least primitive root `g`:
//! `chi_k(g^t) = e(k·t/(p-1))`. Each character carries both an exact
//! root-of-unity index (authoritative for rational reductions) and a
//! precomputed complex-double value table (for float paths).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;

use crate::arith::{rat, PrimeModulus, Rational};
use crate::cyclotomic::reduce_mod_cyclotomic;
use crate::kahan::CompensatedSum;
use crate::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// A Dirichlet character mod `p`, defined by its index `k` in `[0, p-2]`.
pub struct DirichletCharacter<'a> {
    pm: &'a PrimeModulus,
    k: u64,
    /// `values[a] = chi(a)` for `0 <= a < p` (zero at `a = 0`).
    values: Vec<Complex64>,
}

impl<'a> DirichletCharacter<'a> {
    pub fn new(pm: &'a PrimeModulus, index: u64) -> Self {
        let p = pm.p();
        let phi = pm.phi();
        let k = index % phi;
        let mut values = vec![Complex64::new(0.0, 0.0); p as usize];
        for a in 1..p {
            let j = k * pm.dlog(a).unwrap() % phi;
            values[a as usize] = Complex64::from_polar(1.0, TAU * j as f64 / phi as f64);
        }
        Self { pm, k, values }
    }

    pub fn modulus(&self) -> &PrimeModulus {
        self.pm
    }

    pub fn index(&self) -> u64 {
        self.k
    }

    /// Multiplicative order: (p-1)/gcd(p-1, k).
    pub fn order(&self) -> u64 {
        self.pm.phi() / self.pm.phi().gcd(&self.k)
    }

    pub fn is_principal(&self) -> bool {
        self.k == 0
    }

    /// chi(-1) = (-1)^k, so odd characters are exactly the odd indices.
    pub fn is_odd(&self) -> bool {
        self.k % 2 == 1
    }

    pub fn is_quadratic(&self) -> bool {
        self.k == self.pm.phi() / 2
    }

    pub fn conjugate(&self) -> DirichletCharacter<'a> {
        DirichletCharacter::new(self.pm, (self.pm.phi() - self.k) % self.pm.phi())
    }

    /// chi(a) as a complex double; 0 when p | a.
    pub fn value(&self, a: i64) -> Complex64 {
        self.values[self.pm.reduce(a) as usize]
    }

    /// Exact representation: `chi(a) = e(j/(p-1))` for the returned `j`;
    /// `None` when p | a.
    pub fn root_index(&self, a: i64) -> Option<u64> {
        let a = self.pm.reduce(a);
        if a == 0 {
            return None;
        }
        Some(self.k * self.pm.dlog(a).unwrap() % self.pm.phi())
    }
}

/// Character selection filters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharFilter {
    All,
    Odd,
    Even,
    Principal,
    Quadratic,
    FourthOrder,
}

/// Enumerate the characters mod p matching `filter`, sorted by index.
///
/// `FourthOrder` asks for the two characters of exact order 4 (indices
/// (p-1)/4 and 3(p-1)/4) and signals their absence when 4 does not divide
/// p-1.
pub fn select_characters<'a>(
    pm: &'a PrimeModulus,
    filter: CharFilter,
) -> Result<Vec<DirichletCharacter<'a>>> {
    let phi = pm.phi();
    let indices: Vec<u64> = match filter {
        CharFilter::All => (0..phi).collect(),
        CharFilter::Odd => (0..phi).filter(|k| k % 2 == 1).collect(),
        CharFilter::Even => (0..phi).filter(|k| k % 2 == 0).collect(),
        CharFilter::Principal => vec![0],
        CharFilter::Quadratic => vec![phi / 2],
        CharFilter::FourthOrder => {
            if phi % 4 != 0 {
                return Err(Error::NoFourthOrderCharacter(pm.p()));
            }
            vec![phi / 4, 3 * phi / 4]
        }
    };
    Ok(indices.into_iter().map(|k| DirichletCharacter::new(pm, k)).collect())
}

/// Gauss sum `tau(chi) = sum_(a=1)^(p-1) chi(a) e(a/p)`; float-only, rejects
/// the principal character.
pub fn gauss_sum(chi: &DirichletCharacter) -> Result<Complex64> {
    if chi.is_principal() {
        return Err(Error::PrincipalCharacter);
    }
    let p = chi.modulus().p();
    let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
    for a in 1..p {
        let term = chi.value(a as i64) * Complex64::from_polar(1.0, TAU * a as f64 / p as f64);
        re.add(term.re);
        im.add(term.im);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Exact pi-normalized squared L-value for an odd character:
/// `Lambda(chi) := |L(1,chi)|^2 · p^3/pi^2 = |sum_(a=1)^(p-1) a·chi(a)|^2`.
///
/// The squared magnitude is computed in the ring Z[zeta_n] (n = order of
/// chi) and reduced modulo the n-th cyclotomic polynomial. When the reduced
/// representative is a constant, that constant is the exact (integer) value.
/// Otherwise Lambda(chi) is irrational — it lies in a real subfield of
/// degree > 1 — and no rational answer exists; this is reported as an error
/// rather than approximated.
pub fn l_one_sq_pi_normalized(chi: &DirichletCharacter) -> Result<Rational> {
    if !chi.is_odd() {
        return Err(Error::EvenCharacter);
    }
    let p = chi.modulus().p();
    let phi = chi.modulus().phi();
    let n = chi.order();
    let step = phi / n;
    // z = sum a·chi(a) as a coefficient vector over zeta_n.
    let mut c = vec![0i128; n as usize];
    for a in 1..p {
        let j = chi.root_index(a as i64).unwrap();
        debug_assert_eq!(j % step, 0);
        c[(j / step) as usize] += a as i128;
    }
    // |z|^2 = z·conj(z): coefficient of zeta^d is sum_i c[(i+d) mod n]·c[i].
    let nn = n as usize;
    let mut w = vec![0i128; nn];
    for (d, wd) in w.iter_mut().enumerate() {
        let mut acc = 0i128;
        for i in 0..nn {
            acc += c[(i + d) % nn] * c[i];
        }
        *wd = acc;
    }
    let w_big: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
    let reduced = reduce_mod_cyclotomic(&w_big, n);
    match reduced.len() {
        0 => Ok(Rational::from_integer(BigInt::from(0))),
        1 => Ok(Rational::from_integer(reduced[0].clone())),
        _ => Err(Error::NotRational {
            p,
            index: chi.index(),
            degree: (reduce_degree(n) / 2).max(1),
        }),
    }
}

/// Degree phi(n) of the ambient cyclotomic field.
fn reduce_degree(n: u64) -> usize {
    (1..=n).filter(|k| k.gcd(&n) == 1).count()
}

/// Report produced by [`l_fourth_moment`].
#[derive(Clone, Copy, Debug)]
pub struct L4Report {
    pub p: u64,
    /// Exact integer `sum_(chi odd) Lambda(chi)^2`.
    pub exact_numerator: i128,
    /// `exact_numerator / p^6` — the pi-normalized fourth-moment sum.
    pub exact_sum: f64,
    /// `(5/144)(p-1)(p^2-1)^3 / (p^4(p^2+1))` in the same normalization.
    pub main_term: f64,
    /// `(exact_sum - main_term) · p / ((p-1) · exp(3 ln p / ln ln p))`.
    pub normalized_residual: f64,
}

/// Fourth moment of `L(1,chi)` over odd characters, pi-normalized so the
/// comparison against the main term is transcendental-free.
///
/// The exact numerator avoids per-character irrationals entirely: summing
/// `Lambda(chi)^2` over ALL odd characters is Galois-stable, and the odd-
/// character counting identity collapses it to an integer expression in
/// `H(u) = sum_(ab == u mod p) a·b`, namely
/// `((p-1)/2)·(sum_u H(u)^2 - sum_u H(u)·H(p-u))`.
pub fn l_fourth_moment(pm: &PrimeModulus) -> L4Report {
    let p = pm.p();
    let mut h = vec![0i128; p as usize];
    for a in 1..p {
        for b in 1..p {
            h[(a * b % p) as usize] += (a * b) as i128;
        }
    }
    let mut sum_sq = 0i128;
    let mut sum_cross = 0i128;
    for u in 1..p as usize {
        sum_sq += h[u] * h[u];
        sum_cross += h[u] * h[p as usize - u];
    }
    let exact_numerator = (p as i128 - 1) / 2 * (sum_sq - sum_cross);

    let pb = BigInt::from(p);
    let one = BigInt::from(1);
    let p2 = &pb * &pb;
    let exact_rat = Rational::new(BigInt::from(exact_numerator), p2.pow(3));
    let main_rat = rat(5, 144)
        * Rational::from_integer(&pb - &one)
        * Rational::new((&p2 - &one).pow(3), p2.pow(2) * (&p2 + &one));
    let diff = &exact_rat - &main_rat;
    let envelope = crate::arith::asymptotic_envelope(p);
    let normalized_residual =
        diff.to_f64().unwrap() * p as f64 / ((p - 1) as f64 * envelope);
    L4Report {
        p,
        exact_numerator,
        exact_sum: exact_rat.to_f64().unwrap(),
        main_term: main_rat.to_f64().unwrap(),
        normalized_residual,
    }
}
