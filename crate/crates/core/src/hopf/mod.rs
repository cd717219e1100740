//! The Brown-Peterson Hopf algebroid `(pi_*(BP), BP_*(BP))`.
//!
//! Coproducts are solved in the rational m-basis and converted to the v-basis.
//! The right unit is available two ways: by substituting `eta_R(m_k)` into the
//! m-basis form of a polynomial (`eta_r`), and by the Cartan formula applied to
//! the series of the v-generators (`r_action`, `r_action_series`).

mod algebra;
pub mod literal;
pub mod ops;
pub mod verify;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

pub use algebra::{Sparse, TKey, TPoly, TensorPoly, TriplePoly};
pub use literal::{parse_op, parse_tensor, parse_tpoly};
pub use ops::{OpIndex, OperationCombo, Word};

use crate::grading::{monomials_of_degree, Alphabet, Monomial, Poly, Substitution, Tag, MAX_BASIS_INDEX};
use crate::error::{Error, Result};

/// Coproduct and right-unit data for one prime and truncation, with memoized kernels.
pub struct Hopf {
    v: Alphabet,
    m: Alphabet,
    t: Alphabet,
    eta_m: Vec<TPoly>,
    psi_m: Mutex<Vec<Arc<TensorPoly>>>,
    psi_v: Mutex<HashMap<usize, Arc<TensorPoly>>>,
    psi_mono: Mutex<HashMap<Monomial, Arc<TensorPoly>>>,
    eta_m_pow: Mutex<HashMap<(usize, u32), Arc<TPoly>>>,
    eta_v: Mutex<HashMap<usize, Arc<TPoly>>>,
}

impl std::fmt::Debug for Hopf {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hopf").field("prime", &self.v.prime).field("generators", &self.v.generators).finish()
    }
}

fn power_exponent(p: u64, e: u32) -> Result<u32> {
    p.checked_pow(e)
        .and_then(|x| u32::try_from(x).ok())
        .ok_or_else(|| Error::Bound(format!("exponent {p}^{e} does not fit in 32 bits")))
}

impl Hopf {
    pub fn new(prime: u64, generators: usize) -> Result<Self> {
        let v = Alphabet::new(Tag::V, generators, prime)?;
        let m = v.with_tag(Tag::M);
        let t = v.with_tag(Tag::T);
        let mut eta_m = Vec::new();
        // eta_R(m_k) = sum_{i+j=k} m_i t_j^{p^i}
        for k in 1..=generators.min(MAX_BASIS_INDEX) {
            let mut x = TPoly::zero(m);
            for i in 0..=k {
                let j = k - i;
                let c = if i == 0 { Poly::one(m) } else { m.gen(i)? };
                let key = if j == 0 { Monomial::one() } else { Monomial::var(j, power_exponent(prime, i as u32)?) };
                x.add_term(key, c);
            }
            eta_m.push(x);
        }
        Ok(Hopf {
            v,
            m,
            t,
            eta_m,
            psi_m: Mutex::new(Vec::new()),
            psi_v: Mutex::new(HashMap::new()),
            psi_mono: Mutex::new(HashMap::new()),
            eta_m_pow: Mutex::new(HashMap::new()),
            eta_v: Mutex::new(HashMap::new()),
        })
    }

    pub fn prime(&self) -> u64 {
        self.v.prime
    }

    pub fn generators(&self) -> usize {
        self.v.generators
    }

    pub fn q(&self) -> u64 {
        self.v.q()
    }

    pub fn v_alphabet(&self) -> Alphabet {
        self.v
    }

    pub fn m_alphabet(&self) -> Alphabet {
        self.m
    }

    pub fn t_alphabet(&self) -> Alphabet {
        self.t
    }

    /// `v_i`, or a truncation error.
    pub fn v(&self, i: usize) -> Result<Poly> {
        self.v.gen(i)
    }

    pub fn constant(&self, c: i64) -> Poly {
        Poly::constant(self.v, crate::arith::frac(c))
    }

    pub(crate) fn check_t_monomial(&self, j: &Monomial) -> Result<()> {
        let top = j.max_index();
        if top > self.t.generators {
            return Err(Error::Truncation { index: top, limit: self.t.generators });
        }
        Ok(())
    }

    fn expect_v(&self, x: &Poly) -> Result<()> {
        if x.alphabet() != self.v {
            return Err(Error::AlphabetMismatch(x.alphabet().to_string(), self.v.to_string()));
        }
        Ok(())
    }

    /// All t-monomials of degree at most `max_degree`, in increasing degree.
    pub fn t_monomials(&self, max_degree: u64) -> Vec<Monomial> {
        let q = self.q();
        (0..=max_degree / q).flat_map(|k| monomials_of_degree(k * q, self.t)).collect()
    }

    /// `psi(t_k)` in the m-basis; index 0 is `1 (x) 1`.
    pub fn psi_t_m(&self, k: usize) -> Result<Arc<TensorPoly>> {
        if k > 0 {
            self.t.check_index(k)?;
        }
        let mut cache = self.psi_m.lock().expect("psi cache poisoned");
        while cache.len() <= k {
            let j = cache.len();
            let next = if j == 0 { TensorPoly::one(self.m) } else { self.solve_psi(j, &cache)? };
            cache.push(Arc::new(next));
        }
        Ok(cache[k].clone())
    }

    // sum_{i+j=k} m_i (psi t_j)^{p^i} = sum_{h+i+j=k} m_h t_i^{p^h} (x) t_j^{p^{h+i}};
    // the m_k (1 (x) 1) terms on both sides cancel.
    fn solve_psi(&self, k: usize, lower: &[Arc<TensorPoly>]) -> Result<TensorPoly> {
        let p = self.prime();
        let mut out = TensorPoly::zero(self.m);
        for h in 0..k {
            let c = if h == 0 { Poly::one(self.m) } else { self.m.gen(h)? };
            for i in 0..=(k - h) {
                let j = k - h - i;
                let left = if i == 0 { Monomial::one() } else { Monomial::var(i, power_exponent(p, h as u32)?) };
                let right = if j == 0 { Monomial::one() } else { Monomial::var(j, power_exponent(p, (h + i) as u32)?) };
                out.add_term((left, right), c.clone());
            }
        }
        for i in 1..k {
            let pw = lower[k - i].pow(p.pow(i as u32));
            out = out.sub(&pw.scale(&self.m.gen(i)?));
        }
        Ok(out)
    }

    /// `psi(t_k)` with coefficients in the v-basis.
    pub fn psi_t(&self, k: usize) -> Result<Arc<TensorPoly>> {
        if k == 0 {
            return Ok(Arc::new(TensorPoly::one(self.v)));
        }
        if let Some(x) = self.psi_v.lock().expect("psi cache poisoned").get(&k) {
            return Ok(x.clone());
        }
        let xm = self.psi_t_m(k)?;
        let mut sub = Substitution::m_to_v(self.v)?;
        let xv = Arc::new(xm.map_coefficients(self.v, |c| sub.apply(c))?);
        self.psi_v.lock().expect("psi cache poisoned").insert(k, xv.clone());
        Ok(xv)
    }

    /// `psi(t^J)` in the v-basis.
    pub fn psi_monomial(&self, j: &Monomial) -> Result<Arc<TensorPoly>> {
        self.check_t_monomial(j)?;
        if j.is_one() {
            return Ok(Arc::new(TensorPoly::one(self.v)));
        }
        if let Some(x) = self.psi_mono.lock().expect("psi cache poisoned").get(j) {
            return Ok(x.clone());
        }
        let i = j.exponents().iter().position(|&e| e > 0).expect("non-unit monomial") + 1;
        let rest = j.div(&Monomial::var(i, 1)).expect("divisible");
        let x = Arc::new(self.psi_monomial(&rest)?.mul(&*self.psi_t(i)?));
        self.psi_mono.lock().expect("psi cache poisoned").insert(j.clone(), x.clone());
        Ok(x)
    }

    /// Extends the coproduct left-linearly and multiplicatively.
    pub fn psi(&self, x: &TPoly) -> Result<TensorPoly> {
        self.expect_v_t(x)?;
        let mut out = TensorPoly::zero(self.v);
        for (j, c) in x.terms() {
            for (key, d) in self.psi_monomial(j)?.terms() {
                out.add_term(key.clone(), c * d);
            }
        }
        Ok(out)
    }

    fn expect_v_t<K: TKey>(&self, x: &Sparse<K>) -> Result<()> {
        if x.coeff_alphabet() != self.v {
            return Err(Error::AlphabetMismatch(x.coeff_alphabet().to_string(), self.v.to_string()));
        }
        Ok(())
    }

    fn eta_m_power(&self, i: usize, e: u32) -> Result<Arc<TPoly>> {
        if let Some(x) = self.eta_m_pow.lock().expect("eta cache poisoned").get(&(i, e)) {
            return Ok(x.clone());
        }
        let base = self.eta_m.get(i - 1).ok_or(Error::UnsupportedIndex(i))?;
        let x = Arc::new(base.pow(e as u64));
        self.eta_m_pow.lock().expect("eta cache poisoned").insert((i, e), x.clone());
        Ok(x)
    }

    /// Right unit: rewrite `x` in the m-basis, substitute `eta_R(m_k)`, convert back.
    pub fn eta_r(&self, x: &Poly) -> Result<TPoly> {
        self.expect_v(x)?;
        let xm = Substitution::v_to_m(self.v)?.apply(x)?;
        let mut acc = TPoly::zero(self.m);
        for (mono, c) in xm.terms() {
            let mut term = TPoly::term(Monomial::one(), Poly::constant(self.m, c.clone()));
            for (k, &e) in mono.exponents().iter().enumerate() {
                if e > 0 {
                    term = term.mul(&*self.eta_m_power(k + 1, e)?);
                }
            }
            for (key, d) in term.terms() {
                acc.add_term(key.clone(), d.clone());
            }
        }
        let mut sub = Substitution::m_to_v(self.v)?;
        acc.map_coefficients(self.v, |c| sub.apply(c))
    }

    /// `eta_R(v_i) = sum_I (R_I v_i) t^I`.
    pub fn eta_generator(&self, i: usize) -> Result<Arc<TPoly>> {
        self.v.check_index(i)?;
        if i > MAX_BASIS_INDEX {
            return Err(Error::UnsupportedIndex(i));
        }
        if let Some(x) = self.eta_v.lock().expect("eta cache poisoned").get(&i) {
            return Ok(x.clone());
        }
        let x = Arc::new(self.eta_r(&self.v.gen(i)?)?);
        self.eta_v.lock().expect("eta cache poisoned").insert(i, x.clone());
        Ok(x)
    }

    fn check_action_input(&self, x: &Poly) -> Result<()> {
        self.expect_v(x)?;
        let top = x.max_index();
        if top > MAX_BASIS_INDEX {
            return Err(Error::UnsupportedIndex(top));
        }
        Ok(())
    }

    /// `R_I(x)` by the Cartan formula on the generator series, truncated to divisors of `t^I`.
    pub fn r_action(&self, index: &OpIndex, x: &Poly) -> Result<Poly> {
        self.check_t_monomial(index)?;
        self.check_action_input(x)?;
        let series: Vec<TPoly> = (1..=x.max_index())
            .map(|i| Ok(self.eta_generator(i)?.truncate(index)))
            .collect::<Result<_>>()?;
        let mut powers: HashMap<(usize, u32), TPoly> = HashMap::new();
        let mut out = Poly::zero(self.v);
        for (mono, c) in x.terms() {
            let mut acc = TPoly::one(self.v);
            for (k, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let pw = powers.entry((k, e)).or_insert_with(|| series[k].pow_truncated(e as u64, index));
                acc = acc.mul_truncated(pw, index);
            }
            out += &acc.coefficient(index).scale(c);
        }
        Ok(out)
    }

    /// `sum_I R_I(x) t^I` over all `I`, by the Cartan formula in the v-basis.
    pub fn r_action_series(&self, x: &Poly) -> Result<TPoly> {
        self.check_action_input(x)?;
        let p = self.prime();
        let cap = x.degrees().last().copied().unwrap_or(0);
        let mut powers: HashMap<(usize, u32), TPoly> = HashMap::new();
        let mut out = TPoly::zero(self.v);
        for (mono, c) in x.terms() {
            let mut acc = TPoly::one(self.v);
            for (k, &e) in mono.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !powers.contains_key(&(k, e)) {
                    let base = self.eta_generator(k + 1)?;
                    let mut pw = TPoly::one(self.v);
                    for _ in 0..e {
                        pw = mul_upto(&pw, &base, cap, p);
                    }
                    powers.insert((k, e), pw);
                }
                acc = mul_upto(&acc, &powers[&(k, e)], cap, p);
            }
            for (key, d) in acc.terms() {
                out.add_term(key.clone(), d.scale(c));
            }
        }
        Ok(out)
    }

    /// `R_{I_1} ... R_{I_n}(x)`, rightmost first.
    pub fn apply_word(&self, word: &[OpIndex], x: &Poly) -> Result<Poly> {
        let mut y = x.clone();
        for idx in word.iter().rev() {
            y = self.r_action(idx, &y)?;
        }
        Ok(y)
    }

    /// `(psi (x) 1) psi(t_k) - (1 (x) psi) psi(t_k)`. The middle coefficients of the
    /// second expansion pass through the right unit.
    pub fn coassociativity_defect(&self, k: usize) -> Result<TriplePoly> {
        let x = self.psi_t(k)?;
        let mut lhs = TriplePoly::zero(self.v);
        let mut rhs = TriplePoly::zero(self.v);
        for ((a, b), c) in x.terms() {
            for ((a1, a2), d) in self.psi_monomial(a)?.terms() {
                lhs.add_term((a1.clone(), a2.clone(), b.clone()), c * d);
            }
            for ((b1, b2), e) in self.psi_monomial(b)?.terms() {
                let moved = TPoly::term(a.clone(), c.clone()).mul(&self.eta_r(e)?);
                for (a0, f) in moved.terms() {
                    rhs.add_term((a0.clone(), b1.clone(), b2.clone()), f.clone());
                }
            }
        }
        Ok(lhs.sub(&rhs))
    }
}

/// Product keeping only keys of degree at most `cap`.
fn mul_upto(a: &TPoly, b: &TPoly, cap: u64, p: u64) -> TPoly {
    let mut out = TPoly::zero(a.coeff_alphabet());
    for (k1, c1) in a.terms() {
        let d1 = k1.degree(p);
        if d1 > cap {
            continue;
        }
        for (k2, c2) in b.terms() {
            if d1 + k2.degree(p) <= cap {
                out.add_term(k1.mul(k2), c1 * c2);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{binomial, frac, frac_big, frac_ratio, ord};
    use crate::grading::parse_poly;
    use proptest::prelude::*;

    fn t(i: usize, e: u32) -> Monomial {
        Monomial::var(i, e)
    }

    fn key(a: &[u32], b: &[u32]) -> (Monomial, Monomial) {
        (Monomial::from_exponents(a), Monomial::from_exponents(b))
    }

    #[test]
    fn psi_t1_is_primitive() {
        let h = Hopf::new(7, 4).unwrap();
        assert_eq!(h.psi_t(1).unwrap().to_string(), "t1(x)1 + 1(x)t1");
    }

    #[test]
    fn psi_t2_matches_closed_form() {
        for p in [3u64, 5, 7] {
            let h = Hopf::new(p, 4).unwrap();
            let x = h.psi_t(2).unwrap();
            let pe = p as u32;
            let mut expect = TensorPoly::zero(h.v_alphabet());
            let one = Poly::one(h.v_alphabet());
            expect.add_term(key(&[0, 1], &[]), one.clone());
            expect.add_term(key(&[1], &[pe]), one.clone());
            expect.add_term(key(&[], &[0, 1]), one);
            for i in 1..pe {
                let c = frac_big(binomial(p, i as u64)) / frac(p as i64);
                expect.add_term(key(&[i], &[pe - i]), -&h.v(1).unwrap().scale(&c));
            }
            assert_eq!(*x, expect, "p = {p}");
        }
    }

    #[test]
    fn psi_is_integral_counital_and_homogeneous() {
        for (p, kmax) in [(3u64, 4usize), (5, 3), (7, 3)] {
            let h = Hopf::new(p, 4).unwrap();
            for k in 1..=kmax {
                let x = h.psi_t(k).unwrap();
                assert!(x.is_integral(), "p = {p}, k = {k}");
                assert_eq!(x.degrees(), vec![t(k, 1).degree(p)]);
                let mut left = TPoly::zero(h.v_alphabet());
                let mut right = TPoly::zero(h.v_alphabet());
                for ((a, b), c) in x.terms() {
                    if a.is_one() {
                        right.add_term(b.clone(), c.clone());
                    }
                    if b.is_one() {
                        left.add_term(a.clone(), c.clone());
                    }
                }
                let tk = TPoly::term(t(k, 1), Poly::one(h.v_alphabet()));
                assert_eq!(left, tk);
                assert_eq!(right, tk);
            }
        }
    }

    #[test]
    fn psi_t3_coefficient_is_minus_v2_mod_p_cubed_m2() {
        for p in [5u64, 7] {
            let h = Hopf::new(p, 4).unwrap();
            let pe = p as u32;
            let c = h.psi_t_m(3).unwrap().coefficient(&key(&[pe], &[pe * pe - pe]));
            let v2 = crate::grading::hazewinkel_v_in_m(h.m_alphabet(), 2).unwrap();
            let rest = &c + &v2;
            assert_eq!(rest.len(), 1);
            let (mono, lam) = rest.terms().iter().next().unwrap();
            assert_eq!(*mono, t(2, 1));
            assert!(ord(lam, p).unwrap() >= 3);
            assert_eq!(*lam, frac(p as i64) - frac_big(binomial(p * p, p)));
        }
    }

    #[test]
    fn psi_beyond_truncation_is_an_error() {
        let h = Hopf::new(5, 2).unwrap();
        assert!(matches!(h.psi_t(3), Err(Error::Truncation { index: 3, limit: 2 })));
        assert!(h.psi_monomial(&t(3, 1)).is_err());
    }

    #[test]
    fn psi_of_small_monomials() {
        let h = Hopf::new(7, 4).unwrap();
        assert_eq!(h.psi_monomial(&Monomial::one()).unwrap().to_string(), "1");
        assert_eq!(h.psi_monomial(&t(1, 2)).unwrap().to_string(), "t1^2(x)1 + 2*t1(x)t1 + 1(x)t1^2");
        let x = h.psi_monomial(&Monomial::from_exponents(&[1, 1])).unwrap();
        assert_eq!(x.coefficient(&key(&[1], &[7])), -&h.v(1).unwrap());
    }

    #[test]
    fn coassociative_in_low_degrees() {
        for p in [3u64, 5] {
            let h = Hopf::new(p, 4).unwrap();
            for k in 1..=3 {
                assert!(h.coassociativity_defect(k).unwrap().is_zero(), "p = {p}, k = {k}");
            }
        }
        let h = Hopf::new(7, 4).unwrap();
        for k in 1..=2 {
            assert!(h.coassociativity_defect(k).unwrap().is_zero());
        }
    }

    #[test]
    fn right_unit_examples() {
        let h = Hopf::new(7, 4).unwrap();
        let v1 = h.v(1).unwrap();
        assert_eq!(h.eta_r(&v1).unwrap().to_string(), "7*t1 + v1");
        assert_eq!(h.eta_r(&h.constant(1)).unwrap(), TPoly::one(h.v_alphabet()));
        // eta_R(m_2) = m_2 + m_1 t_1^p + t_2, read in the v-basis.
        let m2 = crate::grading::m_in_v(h.v_alphabet(), 2).unwrap();
        let m1 = crate::grading::m_in_v(h.v_alphabet(), 1).unwrap();
        let mut expect = TPoly::term(Monomial::one(), m2.clone());
        expect.add_term(t(1, 7), m1);
        expect.add_term(t(2, 1), Poly::one(h.v_alphabet()));
        assert_eq!(h.eta_r(&m2).unwrap(), expect);
    }

    #[test]
    fn action_on_generators() {
        for p in [3u64, 5, 7] {
            let h = Hopf::new(p, 4).unwrap();
            let pi = p as i64;
            let v1 = h.v(1).unwrap();
            let v2 = h.v(2).unwrap();
            assert_eq!(h.r_action(&t(1, 1), &v1).unwrap(), h.constant(pi));
            assert_eq!(h.r_action(&t(1, 1), &v2).unwrap(), v1.pow(p as u32).scale(&frac(-(pi + 1))));
            assert_eq!(h.r_action(&t(2, 1), &v2).unwrap(), h.constant(pi));
            let ppm1 = frac_big(crate::arith::pow_u64(p, p as u32 - 1));
            let rp = v1.scale(&(frac(1) - frac(pi + 1) * ppm1));
            assert_eq!(h.r_action(&t(1, p as u32), &v2).unwrap(), rp);
            // R_i v_2 = -binom(p+1, i) p^{i-1} v_1^{p+1-i}
            for i in 1..=(p as u32 + 1) {
                let c = -frac_big(binomial(p + 1, i as u64) * crate::arith::pow_u64(p, i - 1));
                let expect = v1.pow(p as u32 + 1 - i).scale(&c);
                if i == p as u32 {
                    continue;
                }
                assert_eq!(h.r_action(&t(1, i), &v2).unwrap(), expect, "p = {p}, i = {i}");
            }
            assert_eq!(h.r_action(&Monomial::one(), &v2).unwrap(), v2);
        }
    }

    #[test]
    fn cartan_matches_right_unit_on_small_monomials() {
        let h = Hopf::new(3, 4).unwrap();
        let q = h.q();
        for d in 0..=30 {
            for m in monomials_of_degree(d * q, h.v_alphabet()) {
                let x = Poly::monomial(h.v_alphabet(), m, frac(1));
                let a = h.r_action_series(&x).unwrap();
                let b = h.eta_r(&x).unwrap();
                assert_eq!(a, b, "{x}");
            }
        }
    }

    #[test]
    fn word_action_equals_word_pairing_with_right_unit() {
        let h = Hopf::new(5, 4).unwrap();
        let x = parse_poly("v1^3*v2 + 2*v2^2", 5, 4).unwrap();
        let eta = h.eta_r(&x).unwrap();
        for w in [vec![t(1, 1), t(1, 5)], vec![t(1, 5), t(1, 1)], vec![t(2, 1), t(1, 1), t(1, 2)]] {
            assert_eq!(h.apply_word(&w, &x).unwrap(), h.pair_word(&w, &eta).unwrap(), "{w:?}");
        }
    }

    #[test]
    fn unsupported_generators_are_rejected() {
        let h = Hopf::new(3, 4).unwrap();
        assert!(matches!(h.r_action(&t(1, 1), &h.v(4).unwrap()), Err(Error::UnsupportedIndex(4))));
        assert!(matches!(h.r_action(&t(5, 1), &h.v(1).unwrap()), Err(Error::Truncation { .. })));
        let _ = frac_ratio(1, 2);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn right_unit_is_multiplicative(a in 0u32..4, b in 0u32..3, c in 0u32..4, d in 0u32..2) {
            let h = Hopf::new(3, 4).unwrap();
            let x = Poly::monomial(h.v_alphabet(), Monomial::from_exponents(&[a, b]), frac(1));
            let y = &Poly::monomial(h.v_alphabet(), Monomial::from_exponents(&[c, d]), frac(2)) + &h.v(1).unwrap();
            let lhs = h.eta_r(&(&x * &y)).unwrap();
            let rhs = h.eta_r(&x).unwrap().mul(&h.eta_r(&y).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn psi_is_multiplicative(a in 0u32..4, b in 0u32..2, c in 0u32..3, d in 0u32..2) {
            let h = Hopf::new(3, 4).unwrap();
            let j = Monomial::from_exponents(&[a, b]);
            let k = Monomial::from_exponents(&[c, d]);
            let lhs = h.psi_monomial(&j.mul(&k)).unwrap();
            let rhs = h.psi_monomial(&j).unwrap().mul(&h.psi_monomial(&k).unwrap());
            prop_assert_eq!((*lhs).clone(), rhs);
        }
    }
}
