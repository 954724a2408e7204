//! Cyclotomic polynomials and exact reduction of integer combinations of
//! roots of unity.
//!
//! A value `sum_j w_j zeta_n^j` with integer `w_j` is rational iff the
//! remainder of `sum w_j x^j` modulo the n-th cyclotomic polynomial is a
//! constant; the powers `zeta^0..zeta^(phi(n)-1)` form a Q-basis of the
//! cyclotomic field. Coefficients grow during reduction, so this module works
//! in arbitrary precision throughout — it only runs on cold paths.

use num_bigint::BigInt;
use num_traits::{One, Zero};

fn trim(mut v: Vec<BigInt>) -> Vec<BigInt> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// Exact polynomial division (coefficients ascending, divisor monic);
/// panics if the division leaves a remainder.
fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    assert!(den.last().is_some_and(|c| c.is_one()), "divisor must be monic");
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    assert!(rem.len() - 1 >= dd);
    let mut quot = vec![BigInt::zero(); rem.len() - dd];
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        quot[i - dd] = c.clone();
        for (j, dcoef) in den.iter().enumerate() {
            let idx = i - dd + j;
            rem[idx] -= &c * dcoef;
        }
    }
    assert!(rem.iter().all(|c| c.is_zero()), "division must be exact");
    trim(quot)
}

/// Coefficients (ascending) of the n-th cyclotomic polynomial, computed as
/// `(x^n - 1) / prod_(d | n, d < n) Phi_d`.
pub fn cyclotomic(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    // x^n - 1
    let mut f = vec![BigInt::zero(); n as usize + 1];
    f[0] = -BigInt::one();
    f[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            f = poly_div_exact(&f, &cyclotomic(d));
        }
    }
    f
}

/// Remainder of the polynomial `w` (ascending coefficients) modulo `Phi_n`,
/// trimmed of leading zeros. An empty result means the zero polynomial.
pub fn reduce_mod_cyclotomic(w: &[BigInt], n: u64) -> Vec<BigInt> {
    let phi = cyclotomic(n);
    let dd = phi.len() - 1;
    let mut rem = w.to_vec();
    for i in (dd..rem.len()).rev() {
        let c = rem[i].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dcoef) in phi.iter().enumerate() {
            let idx = i - dd + j;
            rem[idx] -= &c * dcoef;
        }
        debug_assert!(rem[i].is_zero());
    }
    rem.truncate(dd);
    trim(rem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeffs(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), coeffs(&[-1, 1]));
        assert_eq!(cyclotomic(2), coeffs(&[1, 1]));
        assert_eq!(cyclotomic(4), coeffs(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), coeffs(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), coeffs(&[1, 0, -1, 0, 1]));
        // prime index: 1 + x + ... + x^(p-1)
        assert_eq!(cyclotomic(7), coeffs(&[1, 1, 1, 1, 1, 1, 1]));
    }

    #[test]
    fn degree_is_euler_phi() {
        let phi = |n: u64| (1..=n).filter(|k| num_integer::gcd(*k, n) == 1).count();
        for n in 1..=120u64 {
            assert_eq!(cyclotomic(n).len() - 1, phi(n), "n = {n}");
        }
    }

    /// The 105th cyclotomic polynomial famously has a coefficient of -2 at
    /// x^7 — a sanity check that coefficients beyond {-1, 0, 1} survive.
    #[test]
    fn coefficient_minus_two_at_105() {
        let c = cyclotomic(105);
        assert_eq!(c[7], BigInt::from(-2));
        // palindromic: coefficient 41 = 48 - 7 mirrors the -2
        assert_eq!(c[41], BigInt::from(-2));
    }

    #[test]
    fn reduction_examples() {
        // 30 + 25x + 20x^2 + 25x^3 mod (x^2 + 1) = 10: the norm computation
        // for the order-4 character mod 5.
        let r = reduce_mod_cyclotomic(&coeffs(&[30, 25, 20, 25]), 4);
        assert_eq!(r, coeffs(&[10]));
        // x^2 mod Phi_4 = -1
        let r = reduce_mod_cyclotomic(&coeffs(&[0, 0, 1]), 4);
        assert_eq!(r, coeffs(&[-1]));
        // 1 + x + x^2 + ... + x^4 mod Phi_5 = 0
        let r = reduce_mod_cyclotomic(&coeffs(&[1, 1, 1, 1, 1]), 5);
        assert!(r.is_empty());
        // a genuinely irrational combination: zeta_5 + zeta_5^4 = (sqrt(5)-1)/2
        let r = reduce_mod_cyclotomic(&coeffs(&[0, 1, 0, 0, 1]), 5);
        assert!(r.len() > 1);
    }
}
