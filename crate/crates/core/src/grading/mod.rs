//! Sparse graded polynomials over the v-, m- and t-alphabets.
//!
//! Generator `i` of every alphabet has homotopy degree `2(p^i - 1)`.

mod basis;
mod ideal;
mod literal;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::arith::{frac, ord, Fraction};
use crate::error::{Error, Result};

pub use basis::{hazewinkel_v_in_m, m_in_v, to_m_basis, to_v_basis, Substitution, MAX_BASIS_INDEX};
pub use ideal::{divide_exact, reduce_mod, TermIdeal};
pub use literal::parse_poly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    V,
    M,
    T,
}

impl Tag {
    pub fn letter(self) -> char {
        match self {
            Tag::V => 'v',
            Tag::M => 'm',
            Tag::T => 't',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Alphabet {
    pub tag: Tag,
    pub generators: usize,
    pub prime: u64,
}

impl Alphabet {
    pub fn new(tag: Tag, generators: usize, prime: u64) -> Result<Self> {
        crate::arith::check_prime(prime)?;
        if generators == 0 {
            return Err(Error::Precondition("an alphabet needs at least one generator".into()));
        }
        Ok(Alphabet { tag, generators, prime })
    }

    pub fn with_tag(self, tag: Tag) -> Self {
        Alphabet { tag, ..self }
    }

    /// `q = 2(p - 1)`.
    pub fn q(&self) -> u64 {
        2 * (self.prime - 1)
    }

    pub fn generator_degree(&self, i: usize) -> u64 {
        generator_degree(self.prime, i)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.generators {
            return Err(Error::Truncation { index: i, limit: self.generators });
        }
        Ok(())
    }

    pub fn gen(&self, i: usize) -> Result<Poly> {
        self.check_index(i)?;
        Ok(Poly::monomial(*self, Monomial::var(i, 1), frac(1)))
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}1..{}{} (p = {})", self.tag.letter(), self.tag.letter(), self.generators, self.prime)
    }
}

pub fn generator_degree(p: u64, i: usize) -> u64 {
    2 * (p.pow(i as u32) - 1)
}

/// Exponent vector; trailing zeros are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_exponents(e: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 4]> = e.iter().copied().collect();
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    /// `x_i^e` with 1-based `i`.
    pub fn var(i: usize, e: u32) -> Self {
        assert!(i >= 1);
        let mut v: SmallVec<[u32; 4]> = SmallVec::from_elem(0, i);
        v[i - 1] = e;
        Self::from_exponents(&v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i - 1).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index present, 0 for the constant monomial.
    pub fn max_index(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn degree(&self, p: u64) -> u64 {
        self.0.iter().enumerate().map(|(k, &e)| e as u64 * generator_degree(p, k + 1)).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let mut v: SmallVec<[u32; 4]> = SmallVec::with_capacity(n);
        for k in 0..n {
            v.push(self.0.get(k).copied().unwrap_or(0) + other.0.get(k).copied().unwrap_or(0));
        }
        Monomial(v)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|&e| e * k).collect::<SmallVec<_>>()).trimmed()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() <= other.0.len() && self.0.iter().zip(other.0.iter()).all(|(a, b)| a <= b)
    }

    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        let v: SmallVec<[u32; 4]> =
            self.0.iter().enumerate().map(|(k, &e)| e - other.0.get(k).copied().unwrap_or(0)).collect();
        Some(Monomial(v).trimmed())
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let v: SmallVec<[u32; 4]> = self.0.iter().zip(other.0.iter()).map(|(a, b)| *a.min(b)).collect();
        Monomial(v).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn format(&self, letter: char) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let mut parts = Vec::new();
        for (k, &e) in self.0.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("{letter}{}", k + 1)),
                _ => parts.push(format!("{letter}{}^{e}", k + 1)),
            }
        }
        parts.join("*")
    }
}

/// Finite sum of monomials with nonzero rational coefficients, all over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly {
    alphabet: Alphabet,
    terms: BTreeMap<Monomial, Fraction>,
}

impl Poly {
    pub fn zero(alphabet: Alphabet) -> Self {
        Poly { alphabet, terms: BTreeMap::new() }
    }

    pub fn one(alphabet: Alphabet) -> Self {
        Self::constant(alphabet, frac(1))
    }

    pub fn constant(alphabet: Alphabet, c: Fraction) -> Self {
        Self::monomial(alphabet, Monomial::one(), c)
    }

    pub fn monomial(alphabet: Alphabet, m: Monomial, c: Fraction) -> Self {
        let mut p = Self::zero(alphabet);
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, Fraction)>>(alphabet: Alphabet, terms: I) -> Result<Self> {
        let mut p = Self::zero(alphabet);
        for (m, c) in terms {
            if m.max_index() > alphabet.generators {
                return Err(Error::Truncation { index: m.max_index(), limit: alphabet.generators });
            }
            p.add_term(m, c);
        }
        Ok(p)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn prime(&self) -> u64 {
        self.alphabet.prime
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, Fraction> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<Monomial, Fraction> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Fraction {
        self.terms.get(m).cloned().unwrap_or_else(Fraction::zero)
    }

    /// The constant term, if the polynomial is a constant.
    pub fn as_constant(&self) -> Option<Fraction> {
        match self.terms.len() {
            0 => Some(Fraction::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Fraction) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn ensure_same(&self, other: &Poly) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::AlphabetMismatch(self.alphabet.to_string(), other.alphabet.to_string()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        self.ensure_same(other)?;
        Ok(self + other)
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        self.ensure_same(other)?;
        Ok(self - other)
    }

    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        self.ensure_same(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Fraction) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.alphabet);
        }
        Poly { alphabet: self.alphabet, terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Fraction) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.alphabet);
        }
        Poly { alphabet: self.alphabet, terms: self.terms.iter().map(|(n, a)| (n.mul(m), a * c)).collect() }
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.alphabet);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Degrees of the monomials present, ascending.
    pub fn degrees(&self) -> Vec<u64> {
        let mut d: Vec<u64> = self.terms.keys().map(|m| m.degree(self.alphabet.prime)).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    pub fn is_homogeneous(&self) -> bool {
        self.degrees().len() <= 1
    }

    /// Common degree of a nonzero homogeneous polynomial.
    pub fn homogeneous_degree(&self) -> Option<u64> {
        match self.degrees().as_slice() {
            [d] => Some(*d),
            _ => None,
        }
    }

    pub fn max_index(&self) -> usize {
        self.terms.keys().map(Monomial::max_index).max().unwrap_or(0)
    }

    pub fn is_integral(&self) -> bool {
        let p = self.alphabet.prime;
        self.terms.values().all(|c| ord(c, p).is_none_or(|v| v >= 0))
    }

    /// Sort key used for printing: higher degree first, then reverse monomial order.
    fn print_order(&self) -> Vec<(&Monomial, &Fraction)> {
        let p = self.alphabet.prime;
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| b.0.degree(p).cmp(&a.0.degree(p)).then_with(|| b.0.cmp(a.0)));
        v
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let letter = self.alphabet.tag.letter();
        for (k, (m, c)) in self.print_order().into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                f.write_str(&m.format(letter))?;
            } else {
                write!(f, "{a}*{}", m.format(letter))?;
            }
        }
        Ok(())
    }
}

impl<'a> Add<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn add(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn sub(self, rhs: &'a Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.alphabet, rhs.alphabet, "alphabet mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.alphabet, rhs.alphabet, "alphabet mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl<'a> Mul<&'a Poly> for &'a Poly {
    type Output = Poly;
    fn mul(self, rhs: &'a Poly) -> Poly {
        assert_eq!(self.alphabet, rhs.alphabet, "alphabet mismatch");
        let mut out = Poly::zero(self.alphabet);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { alphabet: self.alphabet, terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

/// Every exponent vector over the alphabet whose degree is exactly `d`.
pub fn monomials_of_degree(d: u64, alphabet: Alphabet) -> Vec<Monomial> {
    let p = alphabet.prime;
    let degs: Vec<u64> = (1..=alphabet.generators).map(|i| generator_degree(p, i)).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u32; degs.len()];
    fn rec(k: usize, rest: u64, degs: &[u64], exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if k == 0 {
            if rest == 0 {
                out.push(Monomial::from_exponents(exps));
            }
            return;
        }
        let d = degs[k - 1];
        let mut e = 0u32;
        while e as u64 * d <= rest {
            exps[k - 1] = e;
            rec(k - 1, rest - e as u64 * d, degs, exps, out);
            e += 1;
        }
        exps[k - 1] = 0;
    }
    rec(degs.len(), d, &degs, &mut exps, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac_ratio;
    use proptest::prelude::*;

    pub(crate) fn va(p: u64) -> Alphabet {
        Alphabet::new(Tag::V, 4, p).unwrap()
    }

    #[test]
    fn square_of_sum() {
        let a = va(7);
        let (v1, v2) = (a.gen(1).unwrap(), a.gen(2).unwrap());
        let s = &v1 + &v2;
        let expect = parse_poly("v1^2 + 2*v1*v2 + v2^2", 7, 4).unwrap();
        assert_eq!(s.pow(2), expect);
        assert!((&v1 * &Poly::zero(a)).is_zero());
    }

    #[test]
    fn alphabet_mismatch_is_an_error() {
        let v = va(7).gen(1).unwrap();
        let m = va(7).with_tag(Tag::M).gen(1).unwrap();
        assert!(matches!(v.try_add(&m), Err(Error::AlphabetMismatch(..))));
        assert!(matches!(v.try_mul(&m), Err(Error::AlphabetMismatch(..))));
    }

    #[test]
    fn truncation_is_detected() {
        let a = Alphabet::new(Tag::V, 3, 5).unwrap();
        assert_eq!(a.gen(4), Err(Error::Truncation { index: 4, limit: 3 }));
    }

    #[test]
    fn degrees_increase() {
        let a = va(5);
        let d: Vec<u64> = (1..=4).map(|i| a.generator_degree(i)).collect();
        assert_eq!(d, vec![8, 48, 248, 1248]);
    }

    #[test]
    fn integrality() {
        let a = va(7);
        assert!(!a.gen(1).unwrap().scale(&frac_ratio(1, 7)).is_integral());
        assert!(Poly::zero(a).is_integral());
        assert!(a.gen(1).unwrap().scale(&frac_ratio(3, 2)).is_integral());
    }

    #[test]
    fn monomial_enumeration_small_cases() {
        let a = va(7);
        assert_eq!(monomials_of_degree(0, a), vec![Monomial::one()]);
        let q = a.q();
        for m in monomials_of_degree(39 * q, a) {
            assert!(m.exponent(1) >= 7, "{m:?}");
        }
        for m in monomials_of_degree(33 * q, a) {
            assert!(m.exponent(1) >= 1, "{m:?}");
        }
        assert!(monomials_of_degree(q + 2, a).is_empty());
    }

    #[test]
    fn monomial_enumeration_matches_nested_loops() {
        for p in [3u64, 5] {
            let a = Alphabet::new(Tag::V, 3, p).unwrap();
            let q = a.q();
            let (d1, d2, d3) = (1, p + 1, p * p + p + 1);
            for units in 0..60u64 {
                let mut count = 0;
                for e3 in 0..=units / d3 {
                    for e2 in 0..=units / d2 {
                        for e1 in 0..=units {
                            if e1 * d1 + e2 * d2 + e3 * d3 == units {
                                count += 1;
                            }
                        }
                    }
                }
                let got = monomials_of_degree(units * q, a);
                assert_eq!(got.len(), count);
                let mut dedup = got.clone();
                dedup.dedup();
                assert_eq!(dedup.len(), got.len());
            }
        }
    }

    fn arb_poly(p: u64) -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..4, 0u32..3, 0u32..2), -20i64..20, 1i64..5), 0..5).prop_map(move |ts| {
            let mut x = Poly::zero(va(p));
            for ((a, b, c), n, d) in ts {
                x.add_term(Monomial::from_exponents(&[a, b, c]), frac_ratio(n, d));
            }
            x
        })
    }

    fn arb_homogeneous(p: u64) -> impl Strategy<Value = Poly> {
        (0u64..12, prop::collection::vec(-9i64..9, 1..6)).prop_map(move |(units, cs)| {
            let a = va(p);
            let ms = monomials_of_degree(units * a.q(), a);
            let mut x = Poly::zero(a);
            for (m, c) in ms.into_iter().zip(cs) {
                x.add_term(m, frac(c));
            }
            x
        })
    }

    proptest! {
        #[test]
        fn ring_laws(x in arb_poly(5), y in arb_poly(5), z in arb_poly(5)) {
            prop_assert_eq!(&(&x + &y) * &z, &(&x * &z) + &(&y * &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert!((&x - &x).is_zero());
            prop_assert_eq!(x.pow(3), &(&x * &x) * &x);
        }

        #[test]
        fn products_of_homogeneous_are_homogeneous(x in arb_homogeneous(5), y in arb_homogeneous(5)) {
            let xy = &x * &y;
            if let (Some(a), Some(b)) = (x.homogeneous_degree(), y.homogeneous_degree()) {
                prop_assert_eq!(xy.homogeneous_degree(), Some(a + b));
            }
        }

        #[test]
        fn literal_round_trip(x in arb_poly(7)) {
            let s = x.to_string();
            let back = parse_poly(&s, 7, 4).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
