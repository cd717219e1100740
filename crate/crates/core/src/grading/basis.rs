//! Change of basis between the integral v-generators and the rational m-generators.
//!
//! `v_1 = p m_1`, `v_2 = p m_2 - v_1^p m_1`, `v_3 = p m_3 - v_1^{p^2} m_2 - v_2^p m_1`.

use std::collections::HashMap;

use super::{Alphabet, Monomial, Poly, Tag};
use crate::arith::{frac, frac_ratio};
use crate::error::{Error, Result};

/// Largest generator index covered by the relation table.
pub const MAX_BASIS_INDEX: usize = 3;

fn check_basis_index(alphabet: Alphabet, i: usize) -> Result<()> {
    alphabet.check_index(i)?;
    if i > MAX_BASIS_INDEX {
        return Err(Error::UnsupportedIndex(i));
    }
    Ok(())
}

/// `v_i` written in the m-basis.
pub fn hazewinkel_v_in_m(alphabet: Alphabet, i: usize) -> Result<Poly> {
    let a = alphabet.with_tag(Tag::M);
    check_basis_index(a, i)?;
    let p = a.prime;
    let pf = frac(p as i64);
    let m = |k: usize| a.gen(k).expect("index checked");
    let v1 = m(1).scale(&pf);
    Ok(match i {
        1 => v1,
        2 => &m(2).scale(&pf) - &(&v1.pow(p as u32) * &m(1)),
        _ => {
            let v2 = &m(2).scale(&pf) - &(&v1.pow(p as u32) * &m(1));
            let t1 = &v1.pow((p * p) as u32) * &m(2);
            let t2 = &v2.pow(p as u32) * &m(1);
            &(&m(3).scale(&pf) - &t1) - &t2
        }
    })
}

/// `m_i` written in the v-basis, with rational coefficients.
pub fn m_in_v(alphabet: Alphabet, i: usize) -> Result<Poly> {
    let a = alphabet.with_tag(Tag::V);
    check_basis_index(a, i)?;
    let p = a.prime;
    let inv_p = frac_ratio(1, p as i64);
    let v = |k: usize| a.gen(k).expect("index checked");
    let m1 = v(1).scale(&inv_p);
    if i == 1 {
        return Ok(m1);
    }
    let m2 = (&v(2) + &(&v(1).pow(p as u32) * &m1)).scale(&inv_p);
    if i == 2 {
        return Ok(m2);
    }
    let s = &(&v(3) + &(&v(1).pow((p * p) as u32) * &m2)) + &(&v(2).pow(p as u32) * &m1);
    Ok(s.scale(&inv_p))
}

/// Ring homomorphism determined by generator images, with cached powers and monomials.
pub struct Substitution {
    target: Alphabet,
    source: Alphabet,
    images: Vec<Poly>,
    powers: Vec<Vec<Poly>>,
    cache: HashMap<Monomial, Poly>,
}

impl Substitution {
    pub fn new(source: Alphabet, target: Alphabet, images: Vec<Poly>) -> Self {
        let powers = images.iter().map(|_| vec![Poly::one(target)]).collect();
        Substitution { target, source, images, powers, cache: HashMap::new() }
    }

    pub fn target(&self) -> Alphabet {
        self.target
    }

    fn power(&mut self, i: usize, e: u32) -> &Poly {
        let row = &mut self.powers[i - 1];
        while row.len() <= e as usize {
            let next = row.last().expect("nonempty") * &self.images[i - 1];
            row.push(next);
        }
        &self.powers[i - 1][e as usize]
    }

    pub fn monomial_image(&mut self, m: &Monomial) -> Result<Poly> {
        if let Some(x) = self.cache.get(m) {
            return Ok(x.clone());
        }
        let top = m.max_index();
        if top > self.source.generators {
            return Err(Error::Truncation { index: top, limit: self.source.generators });
        }
        if top > self.images.len() {
            return Err(Error::UnsupportedIndex(top));
        }
        let mut acc = Poly::one(self.target);
        for (k, &e) in m.exponents().iter().enumerate() {
            if e > 0 {
                let pw = self.power(k + 1, e).clone();
                acc = &acc * &pw;
            }
        }
        self.cache.insert(m.clone(), acc.clone());
        Ok(acc)
    }

    pub fn apply(&mut self, x: &Poly) -> Result<Poly> {
        let mut out = Poly::zero(self.target);
        for (m, c) in x.terms() {
            let img = self.monomial_image(m)?;
            for (n, d) in img.terms() {
                out.add_term(n.clone(), d * c);
            }
        }
        Ok(out)
    }

    /// m-to-v conversion for the given shape of alphabet.
    pub fn m_to_v(alphabet: Alphabet) -> Result<Self> {
        let src = alphabet.with_tag(Tag::M);
        let dst = alphabet.with_tag(Tag::V);
        let n = src.generators.min(MAX_BASIS_INDEX);
        let images = (1..=n).map(|i| m_in_v(dst, i)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(src, dst, images))
    }

    /// v-to-m conversion for the given shape of alphabet.
    pub fn v_to_m(alphabet: Alphabet) -> Result<Self> {
        let src = alphabet.with_tag(Tag::V);
        let dst = alphabet.with_tag(Tag::M);
        let n = src.generators.min(MAX_BASIS_INDEX);
        let images = (1..=n).map(|i| hazewinkel_v_in_m(dst, i)).collect::<Result<Vec<_>>>()?;
        Ok(Self::new(src, dst, images))
    }
}

fn expect_tag(x: &Poly, tag: Tag) -> Result<()> {
    if x.alphabet().tag != tag {
        return Err(Error::AlphabetMismatch(x.alphabet().to_string(), x.alphabet().with_tag(tag).to_string()));
    }
    Ok(())
}

pub fn to_v_basis(x: &Poly) -> Result<Poly> {
    expect_tag(x, Tag::M)?;
    Substitution::m_to_v(x.alphabet())?.apply(x)
}

pub fn to_m_basis(x: &Poly) -> Result<Poly> {
    expect_tag(x, Tag::V)?;
    Substitution::v_to_m(x.alphabet())?.apply(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn term(alphabet: Alphabet, i: usize, e: u32, c: Fraction) -> Poly {
        Poly::monomial(alphabet, Monomial::var(i, e), c)
    }
    use crate::arith::{pow_u64, Fraction};
    use crate::grading::parse_poly;
    use num_traits::One;
    use proptest::prelude::*;

    fn ma(p: u64) -> Alphabet {
        Alphabet::new(Tag::M, 4, p).unwrap()
    }

    #[test]
    fn hazewinkel_low_degrees() {
        for p in [3u64, 5, 7] {
            let a = ma(p);
            assert_eq!(hazewinkel_v_in_m(a, 1).unwrap(), term(a, 1, 1, frac(p as i64)));
            let v2 = hazewinkel_v_in_m(a, 2).unwrap();
            let mut expect = term(a, 2, 1, frac(p as i64));
            expect.add_term(Monomial::var(1, p as u32 + 1), -crate::arith::frac_big(pow_u64(p, p as u32)));
            assert_eq!(v2, expect);
            let v3 = hazewinkel_v_in_m(a, 3).unwrap();
            assert_eq!(v3.coeff(&Monomial::var(3, 1)), frac(p as i64));
            assert!(v3.terms().values().all(|c| c.denom().is_one()));
            assert_eq!(v3.homogeneous_degree(), Some(a.generator_degree(3)));
        }
    }

    #[test]
    fn index_limits() {
        assert_eq!(hazewinkel_v_in_m(ma(5), 4), Err(Error::UnsupportedIndex(4)));
        let small = Alphabet::new(Tag::M, 2, 5).unwrap();
        assert_eq!(hazewinkel_v_in_m(small, 3), Err(Error::Truncation { index: 3, limit: 2 }));
        let v4 = Alphabet::new(Tag::V, 4, 5).unwrap().gen(4).unwrap();
        assert_eq!(to_m_basis(&v4), Err(Error::UnsupportedIndex(4)));
    }

    #[test]
    fn inverse_relations() {
        let p = 7;
        let va = ma(p).with_tag(Tag::V);
        assert_eq!(m_in_v(va, 1).unwrap(), parse_poly("1/7*v1", p, 4).unwrap());
        assert_eq!(m_in_v(va, 2).unwrap(), parse_poly("1/7*v2 + 1/49*v1^8", p, 4).unwrap());
        let m3 = m_in_v(va, 3).unwrap();
        let p3 = frac((p * p * p) as i64);
        assert!(m3.terms().values().all(|c| (c * &p3).denom().is_one()));
        for i in 1..=3 {
            let back = to_m_basis(&m_in_v(va, i).unwrap()).unwrap();
            assert_eq!(back, ma(p).gen(i).unwrap());
        }
    }

    #[test]
    fn examples_in_v_basis() {
        let p = 7;
        let a = ma(p);
        assert_eq!(to_v_basis(&term(a, 1, 1, frac(7))).unwrap(), a.with_tag(Tag::V).gen(1).unwrap());
        // p m_2 - m_1 v_1^p with v_1^p = p^p m_1^p
        let mut x = term(a, 2, 1, frac(7));
        x.add_term(Monomial::var(1, 8), -crate::arith::frac_big(pow_u64(7, 7)));
        assert_eq!(to_v_basis(&x).unwrap(), a.with_tag(Tag::V).gen(2).unwrap());
        let v2p = parse_poly("v2^7", p, 4).unwrap();
        assert_eq!(to_v_basis(&to_m_basis(&v2p).unwrap()).unwrap(), v2p);
    }

    fn arb_v(p: u64) -> impl Strategy<Value = Poly> {
        prop::collection::vec(((0u32..5, 0u32..3, 0u32..2), -30i64..30, 1i64..4), 0..5).prop_map(move |ts| {
            let a = Alphabet::new(Tag::V, 4, p).unwrap();
            let mut x = Poly::zero(a);
            for ((e1, e2, e3), n, d) in ts {
                x.add_term(Monomial::from_exponents(&[e1, e2, e3]), frac_ratio(n, d));
            }
            x
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn round_trip_v_m_v(x in arb_v(3)) {
            let m = to_m_basis(&x).unwrap();
            prop_assert_eq!(to_v_basis(&m).unwrap(), x);
        }

        #[test]
        fn round_trip_degree_preserving(x in arb_v(5)) {
            let m = to_m_basis(&x).unwrap();
            prop_assert_eq!(m.degrees(), x.degrees());
        }
    }
}
