//! Operations `R_I`, their left-linear combinations, and the Kronecker pairing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed};

use super::{Hopf, TPoly};
use crate::arith::Fraction;
use crate::error::{Error, Result};
use crate::grading::{Alphabet, Monomial, Poly};

/// Index `(i_1, ..., i_n)` of `R_I`, stored as the exponent vector of the dual monomial `t^I`.
pub type OpIndex = Monomial;

/// Composite `R_{I_1} R_{I_2} ... R_{I_n}`; the empty word is the identity.
pub type Word = Vec<OpIndex>;

fn normalize(word: Word) -> Word {
    word.into_iter().filter(|i| !i.is_one()).collect()
}

fn render_index(i: &OpIndex) -> String {
    if i.is_one() {
        return "R[0]".into();
    }
    let parts: Vec<String> = i.exponents().iter().map(u32::to_string).collect();
    format!("R[{}]", parts.join(","))
}

fn render_word(w: &[OpIndex]) -> String {
    if w.is_empty() {
        return "R[0]".into();
    }
    w.iter().map(render_index).collect()
}

/// `sum c_w R_w` with coefficients in `pi_*(BP)` on the left.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperationCombo {
    coeff: Alphabet,
    terms: BTreeMap<Word, Poly>,
}

impl OperationCombo {
    pub fn zero(coeff: Alphabet) -> Self {
        OperationCombo { coeff, terms: BTreeMap::new() }
    }

    pub fn identity(coeff: Alphabet) -> Self {
        Self::word(coeff, Vec::new())
    }

    /// The dual basis element `R_I`.
    pub fn basis(coeff: Alphabet, index: OpIndex) -> Self {
        Self::word(coeff, vec![index])
    }

    /// `R_I` for `I = (entries)`.
    pub fn r(coeff: Alphabet, entries: &[u32]) -> Self {
        Self::basis(coeff, Monomial::from_exponents(entries))
    }

    pub fn word(coeff: Alphabet, w: Word) -> Self {
        let mut out = Self::zero(coeff);
        out.add_term(w, Poly::one(coeff));
        out
    }

    pub fn coeff_alphabet(&self) -> Alphabet {
        self.coeff
    }

    pub fn terms(&self) -> &BTreeMap<Word, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, w: Word, c: Poly) {
        if c.is_zero() {
            return;
        }
        assert_eq!(c.alphabet(), self.coeff, "coefficient alphabet mismatch");
        let w = normalize(w);
        let entry = self.terms.entry(w).or_insert_with(|| Poly::zero(c.alphabet()));
        *entry += &c;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Fraction::one()))
    }

    pub fn scale(&self, c: &Fraction) -> Self {
        let mut out = Self::zero(self.coeff);
        for (w, d) in &self.terms {
            out.add_term(w.clone(), d.scale(c));
        }
        out
    }

    /// Left multiplication by a coefficient.
    pub fn scale_poly(&self, c: &Poly) -> Self {
        let mut out = Self::zero(self.coeff);
        for (w, d) in &self.terms {
            out.add_term(w.clone(), c * d);
        }
        out
    }

    /// Formal product `self . other`; `other` must have constant coefficients, since
    /// a coefficient cannot be moved past an operation on its left.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.coeff);
        for (w2, c2) in &other.terms {
            let c = c2
                .as_constant()
                .ok_or_else(|| Error::Precondition(format!("right factor has a non-constant coefficient {c2}")))?;
            for (w1, c1) in &self.terms {
                let mut w = w1.clone();
                w.extend(w2.iter().cloned());
                out.add_term(w, c1.scale(&c));
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Self> {
        let mut acc = Self::identity(self.coeff);
        for _ in 0..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Cohomological degree `sum |t^I| - |c|` of one term.
    pub fn term_degree(&self, w: &[OpIndex], c: &Poly) -> Result<i64> {
        let p = self.coeff.prime;
        let d = c
            .homogeneous_degree()
            .ok_or_else(|| Error::Degree(format!("inhomogeneous coefficient {c}")))?;
        Ok(w.iter().map(|i| i.degree(p) as i64).sum::<i64>() - d as i64)
    }

    /// Common degree of all terms; `None` for the zero combination.
    pub fn degree(&self) -> Result<Option<i64>> {
        let mut deg = None;
        for (w, c) in &self.terms {
            let d = self.term_degree(w, c)?;
            match deg {
                None => deg = Some(d),
                Some(e) if e != d => return Err(Error::Degree(format!("operation {self} mixes degrees {e} and {d}"))),
                _ => {}
            }
        }
        Ok(deg)
    }

    pub fn max_index(&self) -> usize {
        self.terms.keys().flat_map(|w| w.iter().map(Monomial::max_index)).max().unwrap_or(0)
    }
}

impl fmt::Display for OperationCombo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (w, c)) in self.terms.iter().enumerate() {
            let word = render_word(w);
            match c.as_constant() {
                Some(a) => {
                    let sign = match (n == 0, a.is_negative()) {
                        (true, true) => "-",
                        (true, false) => "",
                        (false, true) => " - ",
                        (false, false) => " + ",
                    };
                    let a = a.abs();
                    if a.is_one() {
                        write!(f, "{sign}{word}")?;
                    } else {
                        write!(f, "{sign}{a}*{word}")?;
                    }
                }
                None => {
                    let sign = if n == 0 { "" } else { " + " };
                    write!(f, "{sign}({c})*{word}")?;
                }
            }
        }
        Ok(())
    }
}

impl Hopf {
    /// `sum_{B = I} c d t^A` over `psi(x) = sum c d t^A (x) t^B`.
    pub fn slice(&self, x: &TPoly, index: &OpIndex) -> Result<TPoly> {
        let p = self.prime();
        let floor = index.degree(p);
        let mut out = TPoly::zero(self.v_alphabet());
        for (j, c) in x.terms() {
            if j.degree(p) < floor {
                continue;
            }
            for ((a, b), d) in self.psi_monomial(j)?.terms() {
                if b == index {
                    out.add_term(a.clone(), c * d);
                }
            }
        }
        Ok(out)
    }

    /// `<R_w, x>`, peeling the rightmost operation through the coproduct.
    pub fn pair_word(&self, word: &[OpIndex], x: &TPoly) -> Result<Poly> {
        match word.split_last() {
            None => Ok(x.coefficient(&Monomial::one())),
            Some((last, prefix)) => self.pair_word(prefix, &self.slice(x, last)?),
        }
    }

    /// `<a, x>`, left-linear in both arguments.
    pub fn pair(&self, a: &OperationCombo, x: &TPoly) -> Result<Poly> {
        let mut out = Poly::zero(self.v_alphabet());
        for (w, c) in a.terms() {
            let y = if w.len() == 1 {
                x.coefficient(&w[0])
            } else {
                self.pair_word(w, x)?
            };
            out += &(c * &y);
        }
        Ok(out)
    }

    /// `<ab, x> = sum <a, e_i eta_R(<b, x_i>)>` over `psi(x) = sum e_i (x) x_i`.
    pub fn compose_pair(&self, a: &OperationCombo, b: &OperationCombo, x: &TPoly) -> Result<Poly> {
        let mut y = TPoly::zero(self.v_alphabet());
        let mut inner: HashMap<Monomial, Poly> = HashMap::new();
        for (j, c) in x.terms() {
            for ((lt, rt), d) in self.psi_monomial(j)?.terms() {
                if !inner.contains_key(rt) {
                    let unit = TPoly::term(rt.clone(), Poly::one(self.v_alphabet()));
                    inner.insert(rt.clone(), self.pair(b, &unit)?);
                }
                let beta = &inner[rt];
                if beta.is_zero() {
                    continue;
                }
                let cd = c * d;
                match beta.as_constant() {
                    Some(k) => y.add_term(lt.clone(), cd.scale(&k)),
                    None => {
                        let moved = TPoly::term(lt.clone(), cd).mul(&self.eta_r(beta)?);
                        for (key, e) in moved.terms() {
                            y.add_term(key.clone(), e.clone());
                        }
                    }
                }
            }
        }
        self.pair(a, &y)
    }

    /// `sum_J <a, t^J> R_J` over all `t^J` of degree at most `max_degree`.
    pub fn expand_in_basis(&self, a: &OperationCombo, max_degree: u64) -> Result<OperationCombo> {
        let mut out = OperationCombo::zero(self.v_alphabet());
        for j in self.t_monomials(max_degree) {
            let unit = TPoly::term(j.clone(), Poly::one(self.v_alphabet()));
            out.add_term(vec![j], self.pair(a, &unit)?);
        }
        Ok(out)
    }

    /// `sum_J <ab, t^J> R_J` over all `t^J` of degree at most `max_degree`.
    pub fn product_in_basis(&self, a: &OperationCombo, b: &OperationCombo, max_degree: u64) -> Result<OperationCombo> {
        let mut out = OperationCombo::zero(self.v_alphabet());
        for j in self.t_monomials(max_degree) {
            let unit = TPoly::term(j.clone(), Poly::one(self.v_alphabet()));
            out.add_term(vec![j], self.compose_pair(a, b, &unit)?);
        }
        Ok(out)
    }

    /// `a(x) = sum c_w R_w(x)`.
    pub fn act(&self, a: &OperationCombo, x: &Poly) -> Result<Poly> {
        let mut out = Poly::zero(self.v_alphabet());
        for (w, c) in a.terms() {
            out += &(c * &self.apply_word(w, x)?);
        }
        Ok(out)
    }

    /// First `t^J` (in the given order) on which `a` pairs nontrivially.
    pub fn first_nonzero_pairing(&self, a: &OperationCombo, monomials: &[Monomial]) -> Result<Option<(Monomial, Poly)>> {
        for j in monomials {
            let unit = TPoly::term(j.clone(), Poly::one(self.v_alphabet()));
            let y = self.pair(a, &unit)?;
            if !y.is_zero() {
                return Ok(Some((j.clone(), y)));
            }
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::frac;

    fn setup(p: u64) -> (Hopf, Alphabet) {
        let h = Hopf::new(p, 4).unwrap();
        let a = h.v_alphabet();
        (h, a)
    }

    fn unit(h: &Hopf, e: &[u32]) -> TPoly {
        TPoly::term(Monomial::from_exponents(e), Poly::one(h.v_alphabet()))
    }

    #[test]
    fn dual_basis_pairing() {
        let (h, a) = setup(7);
        let r01 = OperationCombo::r(a, &[0, 1]);
        assert_eq!(h.pair(&r01, &unit(&h, &[0, 1])).unwrap(), h.constant(1));
        let v3 = h.v(3).unwrap();
        let x = TPoly::term(Monomial::from_exponents(&[0, 1]), v3.clone());
        assert_eq!(h.pair(&r01, &x).unwrap(), v3);
        assert!(h.pair(&OperationCombo::r(a, &[1]), &unit(&h, &[7])).unwrap().is_zero());
    }

    #[test]
    fn composite_pairings() {
        let (h, a) = setup(7);
        let r1 = OperationCombo::r(a, &[1]);
        let rp = OperationCombo::r(a, &[7]);
        let v1 = h.v(1).unwrap();
        assert_eq!(h.compose_pair(&r1, &rp, &unit(&h, &[1, 1])).unwrap(), -&v1);
        assert_eq!(h.compose_pair(&rp, &r1, &unit(&h, &[1, 1])).unwrap(), -&v1);
        assert_eq!(h.compose_pair(&r1, &rp, &unit(&h, &[8])).unwrap(), h.constant(8));
        assert_eq!(h.compose_pair(&rp, &r1, &unit(&h, &[8])).unwrap(), h.constant(8));
        // The word pairing agrees with the composition formula.
        let w = r1.compose(&rp).unwrap();
        assert_eq!(h.pair(&w, &unit(&h, &[1, 1])).unwrap(), -&v1);
    }

    #[test]
    fn identity_is_a_two_sided_unit() {
        let (h, a) = setup(5);
        let id = OperationCombo::identity(a);
        let b = OperationCombo::r(a, &[2]).add(&OperationCombo::r(a, &[0, 1]).scale(&frac(3)));
        let bound = 12 * h.q();
        let expanded = h.expand_in_basis(&b, bound).unwrap();
        assert_eq!(h.product_in_basis(&id, &b, bound).unwrap(), expanded);
        assert_eq!(h.product_in_basis(&b, &id, bound).unwrap(), expanded);
    }

    #[test]
    fn product_in_basis_is_dual_to_composition() {
        let (h, a) = setup(5);
        let r1 = OperationCombo::r(a, &[1]);
        let rp = OperationCombo::r(a, &[5]);
        let bound = 14 * h.q();
        let prod = h.product_in_basis(&r1, &rp, bound).unwrap();
        for j in h.t_monomials(bound) {
            let u = unit(&h, j.exponents());
            assert_eq!(h.pair(&prod, &u).unwrap(), h.compose_pair(&r1, &rp, &u).unwrap());
        }
        let comm = prod.sub(&h.product_in_basis(&rp, &r1, bound).unwrap());
        assert_eq!(comm, OperationCombo::r(a, &[0, 1]));
    }

    #[test]
    fn non_constant_inner_coefficients_go_through_the_right_unit() {
        let (h, a) = setup(3);
        let v1 = h.v(1).unwrap();
        let b = OperationCombo::r(a, &[1]).scale_poly(&v1);
        let r1 = OperationCombo::r(a, &[1]);
        // R_1 (v_1 R_1) applied to x equals R_1(v_1 R_1 x).
        let x = h.v(2).unwrap();
        let direct = h.r_action(&Monomial::var(1, 1), &(&v1 * &h.r_action(&Monomial::var(1, 1), &x).unwrap())).unwrap();
        let eta = h.eta_r(&x).unwrap();
        assert_eq!(h.compose_pair(&r1, &b, &eta).unwrap(), direct);
    }

    #[test]
    fn degrees_and_display() {
        let (_, a) = setup(7);
        let r1 = OperationCombo::r(a, &[1]);
        let rp = OperationCombo::r(a, &[7]);
        let c = rp.compose(&r1).unwrap().sub(&r1.compose(&rp).unwrap().scale(&frac(2)));
        assert_eq!(c.degree().unwrap(), Some(8 * 12));
        assert_eq!(c.to_string(), "-2*R[1]R[7] + R[7]R[1]");
        assert_eq!(OperationCombo::identity(a).to_string(), "R[0]");
        assert!(r1.add(&rp).degree().is_err());
        let v1 = Poly::monomial(a, Monomial::var(1, 1), frac(1));
        assert!(r1.compose(&rp.scale_poly(&v1)).is_err());
    }
}
