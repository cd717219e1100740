//! Exact integers and rationals, p-adic valuations, and p-local numbers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Rationals are kept in lowest terms with a positive denominator by `num-rational`.
pub type Fraction = BigRational;

/// p-adic valuation of a rational; zero has infinite valuation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization by trial division, primes ascending. `factorize(1)` is empty.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exponent of `p` in a nonzero integer. Caller guarantees `n != 0` and `p` prime.
pub(crate) fn ord_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    if let Some(mut small) = n.abs().to_u64() {
        let mut k = 0;
        while small % p == 0 {
            small /= p;
            k += 1;
        }
        return k;
    }
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}

/// Valuation without the primality check; `None` for zero.
pub(crate) fn ord(x: &Fraction, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    Some(ord_int(x.numer(), p) as i64 - ord_int(x.denom(), p) as i64)
}

/// True when `x` lies in `p^a Z_(p)`. Zero lies in every such ideal.
pub(crate) fn ord_at_least(x: &Fraction, p: u64, a: u32) -> bool {
    match ord(x, p) {
        None => true,
        Some(v) => v >= a as i64,
    }
}

pub fn padic_valuation(x: &Fraction, p: u64) -> Result<Valuation> {
    check_prime(p)?;
    Ok(match ord(x, p) {
        None => Valuation::Infinite,
        Some(v) => Valuation::Finite(v),
    })
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `(i + j)! / (i! j!)`.
pub fn multinomial_coefficient(i: u64, j: u64) -> BigInt {
    binomial(i + j, i)
}

pub fn pow_u64(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn frac(n: i64) -> Fraction {
    Fraction::from_integer(BigInt::from(n))
}

pub fn frac_big(n: BigInt) -> Fraction {
    Fraction::from_integer(n)
}

pub fn frac_ratio(n: i64, d: i64) -> Fraction {
    Fraction::new(BigInt::from(n), BigInt::from(d))
}

/// Representative of a p-local `x` modulo `p^k` in the symmetric range `(-p^k/2, p^k/2]`.
pub(crate) fn symmetric_residue(x: &Fraction, p: u64, k: u32) -> Fraction {
    let modulus = pow_u64(p, k);
    let inv = mod_inverse(x.denom(), &modulus);
    let mut r = (x.numer() * inv).mod_floor(&modulus);
    if &r * 2 > modulus {
        r -= &modulus;
    }
    frac_big(r)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    if m.is_one() {
        return BigInt::zero();
    }
    let e = a.mod_floor(m).extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

/// Parses `n`, `-n` or `a/b` in decimal.
pub fn parse_fraction(s: &str) -> Result<Fraction> {
    let t = s.trim();
    let bad = || Error::Parse(format!("malformed number '{s}'"));
    if let Some((a, b)) = t.split_once('/') {
        let a = BigInt::from_str(a.trim()).map_err(|_| bad())?;
        let b = BigInt::from_str(b.trim()).map_err(|_| bad())?;
        if b.is_zero() {
            return Err(Error::Parse(format!("zero denominator in '{s}'")));
        }
        Ok(Fraction::new(a, b))
    } else {
        BigInt::from_str(t).map(frac_big).map_err(|_| bad())
    }
}

pub fn format_fraction(x: &Fraction) -> String {
    x.to_string()
}

/// An element of the local ring `Z_(p)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLocalNumber {
    value: Fraction,
    prime: u64,
}

impl PLocalNumber {
    pub fn new(value: Fraction, prime: u64) -> Result<Self> {
        check_prime(prime)?;
        if value.denom() % prime == BigInt::zero() {
            return Err(Error::NotLocal { value: value.to_string(), prime });
        }
        Ok(PLocalNumber { value, prime })
    }

    pub fn parse(s: &str, prime: u64) -> Result<Self> {
        Self::new(parse_fraction(s)?, prime)
    }

    pub fn value(&self) -> &Fraction {
        &self.value
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn valuation(&self) -> Valuation {
        match ord(&self.value, self.prime) {
            None => Valuation::Infinite,
            Some(v) => Valuation::Finite(v),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == Valuation::Finite(0)
    }

    fn same_prime(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::Precondition(format!(
                "mixing Z_({}) and Z_({})",
                self.prime, other.prime
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(PLocalNumber { value: &self.value + &other.value, prime: self.prime })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(PLocalNumber { value: &self.value - &other.value, prime: self.prime })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        Ok(PLocalNumber { value: &self.value * &other.value, prime: self.prime })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.same_prime(other)?;
        if !other.is_unit() {
            return Err(Error::NonUnit { value: other.value.to_string(), prime: self.prime });
        }
        Ok(PLocalNumber { value: &self.value / &other.value, prime: self.prime })
    }
}

impl fmt::Display for PLocalNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}
