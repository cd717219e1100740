//! Polynomials in the t-generators with coefficients written on the left.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed};

use crate::grading::{Alphabet, Monomial, Poly};

/// Basis keys: single t-monomials, pairs for the tensor square, triples for the cube.
pub trait TKey: Ord + Clone + fmt::Debug {
    fn unit() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn t_degree(&self, p: u64) -> u64;
    fn divides(&self, other: &Self) -> bool;
    fn render(&self) -> String;
}

impl TKey for Monomial {
    fn unit() -> Self {
        Monomial::one()
    }
    fn mul(&self, other: &Self) -> Self {
        Monomial::mul(self, other)
    }
    fn t_degree(&self, p: u64) -> u64 {
        self.degree(p)
    }
    fn divides(&self, other: &Self) -> bool {
        Monomial::divides(self, other)
    }
    fn render(&self) -> String {
        self.format('t')
    }
}

impl TKey for (Monomial, Monomial) {
    fn unit() -> Self {
        (Monomial::one(), Monomial::one())
    }
    fn mul(&self, other: &Self) -> Self {
        (self.0.mul(&other.0), self.1.mul(&other.1))
    }
    fn t_degree(&self, p: u64) -> u64 {
        self.0.degree(p) + self.1.degree(p)
    }
    fn divides(&self, other: &Self) -> bool {
        self.0.divides(&other.0) && self.1.divides(&other.1)
    }
    fn render(&self) -> String {
        format!("{}(x){}", self.0.format('t'), self.1.format('t'))
    }
}

impl TKey for (Monomial, Monomial, Monomial) {
    fn unit() -> Self {
        (Monomial::one(), Monomial::one(), Monomial::one())
    }
    fn mul(&self, other: &Self) -> Self {
        (self.0.mul(&other.0), self.1.mul(&other.1), self.2.mul(&other.2))
    }
    fn t_degree(&self, p: u64) -> u64 {
        self.0.degree(p) + self.1.degree(p) + self.2.degree(p)
    }
    fn divides(&self, other: &Self) -> bool {
        self.0.divides(&other.0) && self.1.divides(&other.1) && self.2.divides(&other.2)
    }
    fn render(&self) -> String {
        format!("{}(x){}(x){}", self.0.format('t'), self.1.format('t'), self.2.format('t'))
    }
}

/// Finite sum `sum_K c_K * K` with coefficient polynomials over one alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sparse<K: TKey> {
    coeff: Alphabet,
    terms: BTreeMap<K, Poly>,
}

/// Element of `BP_*(BP) = pi_*(BP)[t_1, t_2, ...]`.
pub type TPoly = Sparse<Monomial>;
/// Element of `BP_*(BP) (x) BP_*(BP)`, coefficient on the left factor.
pub type TensorPoly = Sparse<(Monomial, Monomial)>;
/// Element of the triple tensor power, coefficient on the left factor.
pub type TriplePoly = Sparse<(Monomial, Monomial, Monomial)>;

impl<K: TKey> Sparse<K> {
    pub fn zero(coeff: Alphabet) -> Self {
        Sparse { coeff, terms: BTreeMap::new() }
    }

    pub fn one(coeff: Alphabet) -> Self {
        Self::term(K::unit(), Poly::one(coeff))
    }

    pub fn term(key: K, c: Poly) -> Self {
        let mut s = Self::zero(c.alphabet());
        s.add_term(key, c);
        s
    }

    pub fn coeff_alphabet(&self) -> Alphabet {
        self.coeff
    }

    pub fn terms(&self) -> &BTreeMap<K, Poly> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &K) -> Poly {
        self.terms.get(key).cloned().unwrap_or_else(|| Poly::zero(self.coeff))
    }

    pub fn add_term(&mut self, key: K, c: Poly) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.alphabet(), self.coeff, "coefficient alphabet mismatch");
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.coeff);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                out.add_term(k1.mul(k2), c1 * c2);
            }
        }
        out
    }

    /// Product keeping only keys dividing `bound`.
    pub fn mul_truncated(&self, other: &Self, bound: &K) -> Self {
        let mut out = Self::zero(self.coeff);
        for (k1, c1) in &self.terms {
            for (k2, c2) in &other.terms {
                let k = k1.mul(k2);
                if k.divides(bound) {
                    out.add_term(k, c1 * c2);
                }
            }
        }
        out
    }

    pub fn truncate(&self, bound: &K) -> Self {
        Sparse {
            coeff: self.coeff,
            terms: self.terms.iter().filter(|(k, _)| k.divides(bound)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(self.coeff);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn pow_truncated(&self, mut e: u64, bound: &K) -> Self {
        let mut base = self.truncate(bound);
        let mut acc = Self::one(self.coeff);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_truncated(&base, bound);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_truncated(&base, bound);
            }
        }
        acc
    }

    /// Multiplies every coefficient by `c` on the left.
    pub fn scale(&self, c: &Poly) -> Self {
        let mut out = Self::zero(self.coeff);
        if c.is_zero() {
            return out;
        }
        for (k, d) in &self.terms {
            out.add_term(k.clone(), c * d);
        }
        out
    }

    pub fn map_coefficients<E>(&self, target: Alphabet, mut f: impl FnMut(&Poly) -> Result<Poly, E>) -> Result<Self, E> {
        let mut out = Self::zero(target);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c)?);
        }
        Ok(out)
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(Poly::is_integral)
    }

    /// Total degrees `deg(coefficient) + deg(key)` that occur.
    pub fn degrees(&self) -> Vec<u64> {
        let p = self.coeff.prime;
        let mut d: Vec<u64> = self
            .terms
            .iter()
            .flat_map(|(k, c)| c.degrees().into_iter().map(move |e| e + k.t_degree(p)))
            .collect();
        d.sort_unstable();
        d.dedup();
        d
    }
}

impl<K: TKey> fmt::Display for Sparse<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let p = self.coeff.prime;
        let mut items: Vec<(&K, &Poly)> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.t_degree(p).cmp(&a.0.t_degree(p)).then_with(|| b.0.cmp(a.0)));
        let mut first = true;
        for (k, c) in items {
            let key = k.render();
            let unit_key = key.chars().all(|ch| ch == '1' || ch == '(' || ch == ')' || ch == 'x');
            if c.len() == 1 {
                let (m, a) = c.terms().iter().next().expect("one term");
                let neg = a.is_negative();
                let a = a.abs();
                let sign = match (first, neg) {
                    (true, true) => "-",
                    (true, false) => "",
                    (false, true) => " - ",
                    (false, false) => " + ",
                };
                let mut factors = Vec::new();
                if !a.is_one() || (m.is_one() && unit_key) {
                    factors.push(a.to_string());
                }
                if !m.is_one() {
                    factors.push(m.format(c.alphabet().tag.letter()));
                }
                if !unit_key || factors.is_empty() {
                    factors.push(key);
                }
                write!(f, "{sign}{}", factors.join("*"))?;
            } else {
                let sign = if first { "" } else { " + " };
                if unit_key {
                    write!(f, "{sign}({c})")?;
                } else {
                    write!(f, "{sign}({c})*{key}")?;
                }
            }
            first = false;
        }
        Ok(())
    }
}
