//! Ideals generated by terms `p^a * monomial`, and normal forms modulo them.

use std::fmt;

use super::{Monomial, Poly, Tag};
use crate::arith::{ord, ord_at_least, symmetric_residue, Fraction};
use crate::error::{Error, Result};

/// Ideal of `Z_(p)[v_1, v_2, ...]` generated by terms `p^a * g`.
///
/// The component of the ideal on a monomial `m` is `p^k Z_(p)` with
/// `k = min { a : (a, g) generator, g | m }`, so a term survives reduction iff
/// its coefficient has valuation below `k`; surviving coefficients are replaced
/// by their symmetric residue mod `p^k`, which makes the normal form canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermIdeal {
    prime: u64,
    gens: Vec<(u32, Monomial)>,
}

impl TermIdeal {
    pub fn new(prime: u64, gens: Vec<(u32, Monomial)>) -> Result<Self> {
        crate::arith::check_prime(prime)?;
        let mut ideal = TermIdeal { prime, gens };
        ideal.minimize();
        Ok(ideal)
    }

    fn minimize(&mut self) {
        let gens = std::mem::take(&mut self.gens);
        let mut keep: Vec<(u32, Monomial)> = Vec::new();
        for (i, (a, g)) in gens.iter().enumerate() {
            let redundant = gens.iter().enumerate().any(|(j, (b, h))| {
                j != i && *b <= *a && h.divides(g) && ((*b, h) != (*a, g) || j < i)
            });
            if !redundant {
                keep.push((*a, g.clone()));
            }
        }
        keep.sort_by(|x, y| x.1.cmp(&y.1).then(x.0.cmp(&y.0)));
        self.gens = keep;
    }

    pub fn zero(prime: u64) -> Self {
        TermIdeal { prime, gens: Vec::new() }
    }

    pub fn unit(prime: u64) -> Self {
        TermIdeal { prime, gens: vec![(0, Monomial::one())] }
    }

    /// `(p^a)`.
    pub fn p_power(prime: u64, a: u32) -> Self {
        TermIdeal { prime, gens: vec![(a, Monomial::one())] }
    }

    /// `(p, v_1, ..., v_k)`.
    pub fn p_and_v(prime: u64, k: usize) -> Self {
        let mut gens = vec![(1, Monomial::one())];
        gens.extend((1..=k).map(|i| (0, Monomial::var(i, 1))));
        let mut ideal = TermIdeal { prime, gens };
        ideal.minimize();
        ideal
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn generators(&self) -> &[(u32, Monomial)] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Exponent `k` with `I ∩ Z_(p) m = p^k Z_(p) m`, or `None` if that intersection is zero.
    pub fn exponent_at(&self, m: &Monomial) -> Option<u32> {
        self.gens.iter().filter(|(_, g)| g.divides(m)).map(|(a, _)| *a).min()
    }

    pub fn contains_term(&self, c: &Fraction, m: &Monomial) -> bool {
        match self.exponent_at(m) {
            None => c == &Fraction::from_integer(0.into()),
            Some(k) => ord_at_least(c, self.prime, k),
        }
    }

    pub fn contains(&self, x: &Poly) -> Result<bool> {
        Ok(reduce_mod(x, self)?.is_zero())
    }

    /// The colon ideal `(I : c m)`.
    pub fn colon(&self, c: &Fraction, m: &Monomial) -> Result<TermIdeal> {
        let vc = ord(c, self.prime).ok_or_else(|| Error::NotDivisible("division by zero".into()))?;
        if vc < 0 {
            return Err(Error::NotIntegral(format!("divisor coefficient {c}")));
        }
        let gens = self
            .gens
            .iter()
            .map(|(a, g)| {
                let rest = g.div(&g.gcd(m)).expect("gcd divides");
                ((*a as i64 - vc).max(0) as u32, rest)
            })
            .collect();
        TermIdeal::new(self.prime, gens)
    }
}

impl fmt::Display for TermIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.gens.is_empty() {
            return f.write_str("(0)");
        }
        let parts: Vec<String> = self
            .gens
            .iter()
            .map(|(a, g)| {
                let pp = match a {
                    0 => String::new(),
                    1 => "p".to_string(),
                    _ => format!("p^{a}"),
                };
                match (pp.is_empty(), g.is_one()) {
                    (true, true) => "1".to_string(),
                    (true, false) => g.format('v'),
                    (false, true) => pp,
                    (false, false) => format!("{pp}*{}", g.format('v')),
                }
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Normal form of an integral v-polynomial modulo a term ideal.
pub fn reduce_mod(x: &Poly, ideal: &TermIdeal) -> Result<Poly> {
    if x.alphabet().tag != Tag::V {
        return Err(Error::AlphabetMismatch(x.alphabet().to_string(), "v-alphabet".into()));
    }
    if x.prime() != ideal.prime {
        return Err(Error::Precondition(format!("ideal over p = {} applied at p = {}", ideal.prime, x.prime())));
    }
    if !x.is_integral() {
        return Err(Error::NotIntegral(x.to_string()));
    }
    let mut out = Poly::zero(x.alphabet());
    for (m, c) in x.terms() {
        match ideal.exponent_at(m) {
            None => out.add_term(m.clone(), c.clone()),
            Some(k) => {
                if !ord_at_least(c, ideal.prime, k) {
                    out.add_term(m.clone(), symmetric_residue(c, ideal.prime, k));
                }
            }
        }
    }
    Ok(out)
}

/// Solves `q * (c m) = x` in `Z_(p)[v]/I`.
///
/// Returns `q` in normal form modulo the colon ideal `(I : c m)`, which is
/// exactly the ambiguity of the solution, together with that ideal.
pub fn divide_exact(x: &Poly, c: &Fraction, m: &Monomial, ideal: &TermIdeal) -> Result<(Poly, TermIdeal)> {
    let p = ideal.prime;
    let xr = reduce_mod(x, ideal)?;
    let colon = ideal.colon(c, m)?;
    let vc = ord(c, p).expect("nonzero divisor");
    let mut q = Poly::zero(x.alphabet());
    for (n, d) in xr.terms() {
        let Some(rest) = n.div(m) else {
            return Err(Error::NotDivisible(format!("{x} by {c}*{} modulo {ideal}", m.format('v'))));
        };
        if ord(d, p).expect("nonzero term") < vc {
            return Err(Error::NotDivisible(format!("{x} by {c}*{} modulo {ideal}", m.format('v'))));
        }
        q.add_term(rest, d / c);
    }
    let q = reduce_mod(&q, &colon)?;
    debug_assert!(reduce_mod(&(&q.mul_monomial(m, c) - x), ideal).map(|r| r.is_zero()).unwrap_or(false));
    Ok((q, colon))
}
