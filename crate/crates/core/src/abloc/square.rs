//! Element-level localization of finite groups: the arithmetic square and exactness.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::oracle::structure_from_kernel_counts;
use super::{localize, CyclicProduct, FGAbelianGroup, GroupHom, InvertedSet, PrimePower};
use crate::arith::{factorize, Fraction};
use crate::error::{Error, Result};
use crate::report::CheckRecord;

/// `M -> M/K`, `K` the elements killed by some element of `S`.
#[derive(Debug, Clone)]
pub struct FiniteLocalization {
    pub group: CyclicProduct,
    pub in_kernel: Vec<bool>,
    /// Coset label of every element, labels `0..cosets`.
    pub coset: Vec<u32>,
    pub cosets: usize,
}

impl FiniteLocalization {
    /// Structure of `M/K` from the counts `#{[x] : q^j [x] = 0}`.
    pub fn structure(&self) -> Result<Vec<PrimePower>> {
        let g = &self.group;
        let k = self.in_kernel.iter().filter(|&&b| b).count() as u64;
        let mut kernel = |q: u64, j: u32| {
            let qj = q.pow(j);
            (0..g.order()).filter(|&x| self.in_kernel[g.scale(qj, x)]).count() as u64 / k
        };
        structure_from_kernel_counts(self.cosets as u64, &mut kernel)
    }
}

pub fn localize_finite(m: &CyclicProduct, s: &InvertedSet) -> Result<FiniteLocalization> {
    let n = m.order();
    // The largest element of S that can matter: prod p^(v_p |M|) over inverted p.
    let killer: u64 = factorize(n as u64).into_iter().filter(|&(p, _)| s.inverts(p)).map(|(p, e)| p.pow(e)).product();
    let in_kernel: Vec<bool> = (0..n).map(|x| m.scale(killer, x) == 0).collect();
    // K is the product of the subgroups (n_i / gcd(n_i, killer)) Z/n_i, so cosets are read coordinatewise.
    let steps: Vec<u64> = m.moduli().iter().map(|&ni| ni / ni.gcd(&killer)).collect();
    let quotient = CyclicProduct::new(steps.clone())?;
    let coset: Vec<u32> = (0..n)
        .map(|x| {
            let c: Vec<u64> = m.coords(x).iter().zip(&steps).map(|(a, st)| a % st).collect();
            quotient.index(&c) as u32
        })
        .collect();
    if (0..n).any(|x| in_kernel[x] != (coset[x] == 0)) {
        return Err(Error::Precondition("coset labels disagree with the S-torsion subgroup".into()));
    }
    Ok(FiniteLocalization { group: m.clone(), in_kernel, coset, cosets: quotient.order() })
}

pub fn torsion_subgroup(m: &FGAbelianGroup) -> FGAbelianGroup {
    FGAbelianGroup::from_primary(0, m.torsion().to_vec())
}

fn in_ring(x: &Fraction, s: &InvertedSet) -> bool {
    let d = x.denom();
    let mut rest = d.clone();
    for p in 2u64.. {
        if rest.is_one() {
            return true;
        }
        let pb = BigInt::from(p);
        if (&rest % &pb).is_zero() {
            if !s.inverts(p) {
                return false;
            }
            while (&rest % &pb).is_zero() {
                rest /= &pb;
            }
        }
    }
    unreachable!()
}

const GRID: i64 = 60;

fn grid() -> impl Iterator<Item = Fraction> {
    (1..=GRID).flat_map(|b| (-GRID..=GRID).map(move |a| Fraction::new(a.into(), b.into())))
}

/// `Z[1/P1] x_Q Z[1/P2] = Z` and `Z[1/P1] + Z[1/P2] = Q`, tested on the rationals `a/b`, `|a|, b <= 60`.
fn free_part_checks(s1: &InvertedSet, s2: &InvertedSet) -> (bool, bool, String) {
    let mut pull = None;
    let mut push = None;
    for x in grid() {
        let both = in_ring(&x, s1) && in_ring(&x, s2);
        if pull.is_none() && both != x.is_integer() {
            pull = Some(format!("{x} lies in both rings = {both}"));
        }
        // a/b = a u / b2 + a v / b1 with b = b1 b2 split by the primes inverted in s1, and u b1 + v b2 = 1.
        let b = x.denom().clone();
        let mut b1 = BigInt::one();
        let mut b2 = b.clone();
        for (p, _) in factorize(b.to_u64().expect("grid denominators are small")) {
            let pb = BigInt::from(p);
            if s1.inverts(p) {
                while (&b2 % &pb).is_zero() {
                    b2 /= &pb;
                    b1 *= &pb;
                }
            }
        }
        let g = b1.extended_gcd(&b2);
        let (u, v) = (g.x, g.y);
        let y1 = Fraction::new(x.numer() * &v, b1.clone());
        let y2 = Fraction::new(x.numer() * &u, b2.clone());
        let ok = g.gcd.is_one() && in_ring(&y1, s1) && in_ring(&y2, s2) && &y1 + &y2 == x;
        if push.is_none() && !ok {
            push = Some(format!("{x} does not split as {y1} + {y2}"));
        }
    }
    let note = format!("{} rationals a/b with |a|, b <= {GRID}", GRID * (2 * GRID + 1));
    match (pull, push) {
        (None, None) => (true, true, note),
        (a, b) => (a.is_none(), b.is_none(), format!("{note}; {}", a.or(b).unwrap_or_default())),
    }
}

/// The square `M -> M[1/P1], M[1/P2] -> M tensor Q` for a partition `P1 | P2` of the primes.
pub fn arithmetic_square(m: &FGAbelianGroup, p1: &BTreeSet<u64>) -> Result<Vec<CheckRecord>> {
    let s1 = InvertedSet::primes(p1.iter().copied())?;
    let s2 = s1.complement();
    let s12 = InvertedSet::rationalize();
    let (c1, c2, c12) = (localize(m, &s1), localize(m, &s2), localize(m, &s12));
    let t = CyclicProduct::from_group(&torsion_subgroup(m))?;
    if t.order() > 1_000_000 {
        return Err(Error::Bound(format!("torsion of order {} is too large for element-level checks", t.order())));
    }
    let (l1, l2, l12) = (localize_finite(&t, &s1)?, localize_finite(&t, &s2)?, localize_finite(&t, &s12)?);
    let n = t.order();

    let corners_ok = l1.structure()? == c1.torsion && l2.structure()? == c2.torsion && l12.structure()? == c12.torsion;
    let mut out = vec![CheckRecord::new("abloc.square.corners", "M -> M[1/P1], M[1/P2] -> M tensor Q", corners_ok)
        .expected("element-level quotients agree with localize")
        .computed(format!("M = {m}; M[1/P1] = {c1}; M[1/P2] = {c2}; M tensor Q = {c12}"))
        .witness(format!("P1 = {s1}, P2 = {s2}"))];

    // Torsion: M -> M1 x_{M12} M2 bijective.
    let pairs: BTreeSet<(u32, u32)> = (0..n).map(|x| (l1.coset[x], l2.coset[x])).collect();
    let mut fiber1 = vec![0usize; l12.cosets];
    let mut fiber2 = vec![0usize; l12.cosets];
    let mut seen1 = vec![false; l1.cosets];
    let mut seen2 = vec![false; l2.cosets];
    for x in 0..n {
        let c = l12.coset[x] as usize;
        if !std::mem::replace(&mut seen1[l1.coset[x] as usize], true) {
            fiber1[c] += 1;
        }
        if !std::mem::replace(&mut seen2[l2.coset[x] as usize], true) {
            fiber2[c] += 1;
        }
    }
    let pullback_size: usize = fiber1.iter().zip(&fiber2).map(|(a, b)| a * b).sum();
    let torsion_pullback = pairs.len() == n && pullback_size == n;
    // Pushout: (a, b) -> a - b onto M12, kernel the image of M. For finite M the pushout order is |M1||M2|/|M|.
    let image_of_m = pairs.len();
    let onto = fiber1.iter().all(|&c| c > 0);
    let kernel_size: usize = fiber1.iter().zip(&fiber2).map(|(a, b)| a * b).sum();
    let torsion_pushout = onto && kernel_size == image_of_m;

    let (free_pull, free_push, free_note) = if m.rank() > 0 { free_part_checks(&s1, &s2) } else { (true, true, "no free part".into()) };
    out.push(
        CheckRecord::new("abloc.square.pullback", "M = M[1/P1] x_{M tensor Q} M[1/P2]", torsion_pullback && free_pull)
            .expected(format!("pullback {m}"))
            .computed(format!(
                "torsion: |M| = {n}, |image| = {}, |pullback| = {pullback_size}; free part: {}",
                pairs.len(),
                if free_pull { "Z[1/P1] x_Q Z[1/P2] = Z" } else { "fails" }
            ))
            .witness(free_note.clone()),
    );
    out.push(
        CheckRecord::new("abloc.square.pushout", "M[1/P1] + M[1/P2] / M = M tensor Q", torsion_pushout && free_push)
            .expected(format!("pushout {c12}"))
            .computed(format!(
                "torsion: difference map onto = {onto}, |kernel| = {kernel_size}, |image of M| = {image_of_m}; free part: {}",
                if free_push { "Z[1/P1] + Z[1/P2] = Q" } else { "fails" }
            ))
            .witness(free_note),
    );
    Ok(out)
}

fn image_set(f: &GroupHom) -> BTreeSet<usize> {
    (0..f.source.order()).map(|x| f.apply(x)).collect()
}

fn kernel_set(f: &GroupHom) -> BTreeSet<usize> {
    (0..f.source.order()).filter(|&x| f.apply(x) == 0).collect()
}

fn sequence_text(groups: &[String]) -> String {
    groups.join(" -> ")
}

/// `0 -> <gens> -> B -> B / <gens> -> 0` with its four maps.
pub fn short_exact_sequence(b: &CyclicProduct, gens: &[Vec<u64>]) -> Result<(Vec<CyclicProduct>, Vec<GroupHom>)> {
    let (a, inclusion) = b.subgroup(gens)?;
    let (c, projection) = b.quotient(gens)?;
    let zero = CyclicProduct::trivial();
    let terms = vec![zero.clone(), a.clone(), b.clone(), c.clone(), zero.clone()];
    let maps = vec![GroupHom::zero(zero.clone(), a), inclusion, projection, GroupHom::zero(c, zero)];
    Ok((terms, maps))
}

/// Localizes every term and map of `terms[0] -> terms[1] -> ...` and checks exactness.
/// A non-exact input is an error.
pub fn exactness_check(terms: &[CyclicProduct], maps: &[GroupHom], s: &InvertedSet) -> Result<Vec<CheckRecord>> {
    if terms.len() != maps.len() + 1 {
        return Err(Error::Shape(format!("{} terms need {} maps, got {}", terms.len(), terms.len().saturating_sub(1), maps.len())));
    }
    for (i, f) in maps.iter().enumerate() {
        if f.source != terms[i] || f.target != terms[i + 1] {
            return Err(Error::Shape(format!("map {i} does not run from term {i} to term {}", i + 1)));
        }
    }
    for i in 1..terms.len().saturating_sub(1) {
        if image_set(&maps[i - 1]) != kernel_set(&maps[i]) {
            return Err(Error::Precondition(format!("input sequence is not exact at term {i} ({})", terms[i].canonical())));
        }
    }
    let interior = terms.len().saturating_sub(2);
    let mut out = vec![CheckRecord::new("abloc.exactness.input", "im f_i = ker f_(i+1)", true)
        .expected("exact")
        .computed(format!("exact at {interior} interior terms of {}", sequence_text(&terms.iter().map(|t| t.canonical().to_string()).collect::<Vec<_>>())))];

    let locs = terms.iter().map(|t| localize_finite(t, s)).collect::<Result<Vec<_>>>()?;
    let mut structures = Vec::new();
    let mut terms_ok = true;
    for (t, l) in terms.iter().zip(&locs) {
        let st = l.structure()?;
        terms_ok &= st == localize(&t.canonical(), s).torsion;
        structures.push(FGAbelianGroup::from_primary(0, st).to_string());
    }
    out.push(
        CheckRecord::new("abloc.exactness.terms", "S^-1 M_i = M_i / S-torsion", terms_ok)
            .expected("element-level quotients agree with localize")
            .computed(sequence_text(&structures)),
    );

    // Induced maps on cosets, and exactness there.
    let mut witness = None;
    let mut induced: Vec<Vec<Option<u32>>> = Vec::new();
    for (i, f) in maps.iter().enumerate() {
        let (a, b) = (&locs[i], &locs[i + 1]);
        let mut table = vec![None; a.cosets];
        for x in 0..f.source.order() {
            let img = b.coset[f.apply(x)];
            match table[a.coset[x] as usize] {
                None => table[a.coset[x] as usize] = Some(img),
                Some(prev) if prev != img => {
                    witness.get_or_insert_with(|| format!("induced map {i} is not well defined"));
                }
                _ => {}
            }
        }
        induced.push(table);
    }
    for i in 1..terms.len().saturating_sub(1) {
        let image: BTreeSet<u32> = induced[i - 1].iter().flatten().copied().collect();
        let kernel: BTreeSet<u32> = (0..locs[i].cosets as u32).filter(|&c| induced[i][c as usize] == Some(0)).collect();
        if image != kernel {
            witness.get_or_insert_with(|| format!("localized sequence is not exact at term {i}: |im| = {}, |ker| = {}", image.len(), kernel.len()));
        }
    }
    let mut rec = CheckRecord::new("abloc.exactness.localized", "S^-1 preserves exactness", witness.is_none())
        .expected("exact")
        .computed(format!("exact at {interior} interior terms of {}", sequence_text(&structures)));
    if let Some(w) = witness {
        rec = rec.witness(w);
    }
    out.push(rec);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(m: &[u64]) -> CyclicProduct {
        CyclicProduct::new(m.to_vec()).unwrap()
    }

    #[test]
    fn square_for_twelve() {
        let recs = arithmetic_square(&"Z/12".parse().unwrap(), &[2].into_iter().collect()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed), "{recs:#?}");
        assert!(recs[0].computed.contains("M[1/P1] = Z/3; M[1/P2] = Z/4; M tensor Q = 0"), "{}", recs[0].computed);
        assert!(recs[1].expected.contains("Z/4 + Z/3"));
    }

    #[test]
    fn square_for_free_and_zero() {
        let recs = arithmetic_square(&"Z".parse().unwrap(), &[2].into_iter().collect()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed), "{recs:#?}");
        assert!(recs[0].computed.contains("M[1/P1] = Z[1/2]; M[1/P2] = Z_(2); M tensor Q = Q"));
        let recs = arithmetic_square(&FGAbelianGroup::zero(), &[3, 5].into_iter().collect()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed));
        let recs = arithmetic_square(&"Z^2 + Z/8 + Z/45".parse().unwrap(), &[3, 7].into_iter().collect()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed), "{recs:#?}");
    }

    #[test]
    fn exactness_examples() {
        let (z0, z2, z3, z4, z12) = (CyclicProduct::trivial(), cp(&[2]), cp(&[3]), cp(&[4]), cp(&[12]));
        let seq = |a: &CyclicProduct, b: &CyclicProduct, c: &CyclicProduct, i: u64, p: u64| {
            let terms = vec![z0.clone(), a.clone(), b.clone(), c.clone(), z0.clone()];
            let maps = vec![
                GroupHom::zero(z0.clone(), a.clone()),
                GroupHom::new(a.clone(), b.clone(), vec![vec![i]]).unwrap(),
                GroupHom::new(b.clone(), c.clone(), vec![vec![p]]).unwrap(),
                GroupHom::zero(c.clone(), z0.clone()),
            ];
            (terms, maps)
        };
        let (terms, maps) = seq(&z2, &z4, &z2, 2, 1);
        let recs = exactness_check(&terms, &maps, &InvertedSet::primes([3]).unwrap()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed));
        assert_eq!(recs[1].computed, "0 -> Z/2 -> Z/4 -> Z/2 -> 0");
        let recs = exactness_check(&terms, &maps, &InvertedSet::primes([2]).unwrap()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed));
        assert_eq!(recs[1].computed, "0 -> 0 -> 0 -> 0 -> 0");

        let (terms, maps) = seq(&z3, &z12, &z4, 4, 1);
        let recs = exactness_check(&terms, &maps, &InvertedSet::primes([2]).unwrap()).unwrap();
        assert!(recs.iter().all(CheckRecord::passed));
        assert_eq!(recs[1].computed, "0 -> Z/3 -> Z/3 -> 0 -> 0");

        // Z/2 -> Z/4 by 2, then Z/4 -> Z/2 by 0: not exact in the middle.
        let (terms, maps) = seq(&z2, &z4, &z2, 2, 0);
        assert!(matches!(exactness_check(&terms, &maps, &InvertedSet::primes([3]).unwrap()), Err(Error::Precondition(_))));
    }
}
