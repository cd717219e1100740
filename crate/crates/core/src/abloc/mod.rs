//! Localization of finitely generated abelian groups at sets of primes.

mod finite;
mod oracle;
mod square;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use finite::{smith_normal_form, CyclicProduct, GroupHom, Smith};
pub use oracle::{abelian_groups_of_order, fraction_oracle, structure_from_kernel_counts};
pub use square::{arithmetic_square, exactness_check, localize_finite, short_exact_sequence, torsion_subgroup, FiniteLocalization};

use crate::arith::{check_prime, factorize};
use crate::error::{Error, Result};

/// Cyclic group of prime-power order `prime^exponent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PrimePower {
    pub prime: u64,
    pub exponent: u32,
}

impl PrimePower {
    pub fn order(&self) -> u64 {
        self.prime.pow(self.exponent)
    }
}

fn primary_parts(n: u64) -> Vec<PrimePower> {
    factorize(n).into_iter().map(|(prime, exponent)| PrimePower { prime, exponent }).collect()
}

fn format_terms(free: Option<String>, torsion: &[PrimePower]) -> String {
    let mut terms: Vec<String> = free.into_iter().collect();
    terms.extend(torsion.iter().map(|t| format!("Z/{}", t.order())));
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// `Z^rank` plus a sorted list of cyclic prime-power summands.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct FGAbelianGroup {
    rank: u32,
    torsion: Vec<PrimePower>,
}

impl FGAbelianGroup {
    /// `Z^rank + Z/n_1 + ...`; `Z/1` is dropped and `Z/0` counts as `Z`.
    pub fn new(rank: u32, orders: &[u64]) -> Self {
        let mut rank = rank;
        let mut torsion = Vec::new();
        for &n in orders {
            if n == 0 {
                rank += 1;
            } else {
                torsion.extend(primary_parts(n));
            }
        }
        torsion.sort();
        FGAbelianGroup { rank, torsion }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn free(rank: u32) -> Self {
        FGAbelianGroup { rank, torsion: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        Self::new(0, &[n])
    }

    pub fn from_primary(rank: u32, mut torsion: Vec<PrimePower>) -> Self {
        torsion.retain(|t| t.exponent > 0);
        torsion.sort();
        FGAbelianGroup { rank, torsion }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn torsion(&self) -> &[PrimePower] {
        &self.torsion
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    /// Order of the torsion subgroup, `None` on overflow.
    pub fn torsion_order(&self) -> Option<u64> {
        self.torsion.iter().try_fold(1u64, |acc, t| acc.checked_mul(t.order()))
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut torsion = self.torsion.clone();
        torsion.extend_from_slice(&other.torsion);
        Self::from_primary(self.rank + other.rank, torsion)
    }

    /// Invariant factors `d_1 | d_2 | ...` of the torsion subgroup.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let primes: BTreeSet<u64> = self.torsion.iter().map(|t| t.prime).collect();
        let mut columns: Vec<Vec<u64>> = primes
            .iter()
            .map(|&p| {
                let mut v: Vec<u64> = self.torsion.iter().filter(|t| t.prime == p).map(|t| t.order()).collect();
                v.sort_unstable_by(|a, b| b.cmp(a));
                v
            })
            .collect();
        let len = columns.iter().map(Vec::len).max().unwrap_or(0);
        for c in columns.iter_mut() {
            c.resize(len, 1);
        }
        let mut out: Vec<u64> = (0..len).map(|i| columns.iter().map(|c| c[i]).product()).collect();
        out.reverse();
        out
    }
}

impl fmt::Display for FGAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let free = match self.rank {
            0 => None,
            1 => Some("Z".to_string()),
            r => Some(format!("Z^{r}")),
        };
        f.write_str(&format_terms(free, &self.torsion))
    }
}

impl FromStr for FGAbelianGroup {
    type Err = Error;

    /// `Z^r + Z/n1 + Z/n2 ...`, or `0`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::Parse(format!("bad group term {t:?} in {s:?}"));
        let mut rank = 0u32;
        let mut orders = Vec::new();
        if s.trim().is_empty() {
            return Err(Error::Parse("empty group literal".into()));
        }
        for term in s.split('+').map(str::trim) {
            if term == "0" {
                continue;
            } else if term == "Z" {
                rank += 1;
            } else if let Some(r) = term.strip_prefix("Z^") {
                rank += r.parse::<u32>().map_err(|_| bad(term))?;
            } else if let Some(n) = term.strip_prefix("Z/") {
                let n: u64 = n.parse().map_err(|_| bad(term))?;
                orders.push(n);
            } else {
                return Err(bad(term));
            }
        }
        Ok(Self::new(rank, &orders))
    }
}

/// The primes made invertible: an explicit finite set, or all primes outside a finite set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InvertedSet {
    Primes(BTreeSet<u64>),
    AllBut(BTreeSet<u64>),
}

fn prime_set(ps: impl IntoIterator<Item = u64>) -> Result<BTreeSet<u64>> {
    let set: BTreeSet<u64> = ps.into_iter().collect();
    for &p in &set {
        check_prime(p)?;
    }
    Ok(set)
}

impl InvertedSet {
    pub fn primes(ps: impl IntoIterator<Item = u64>) -> Result<Self> {
        Ok(InvertedSet::Primes(prime_set(ps)?))
    }

    /// Inverts every prime outside `ps`: localization at `ps`.
    pub fn all_but(ps: impl IntoIterator<Item = u64>) -> Result<Self> {
        Ok(InvertedSet::AllBut(prime_set(ps)?))
    }

    pub fn rationalize() -> Self {
        InvertedSet::AllBut(BTreeSet::new())
    }

    pub fn nothing() -> Self {
        InvertedSet::Primes(BTreeSet::new())
    }

    pub fn inverts(&self, p: u64) -> bool {
        match self {
            InvertedSet::Primes(ps) => ps.contains(&p),
            InvertedSet::AllBut(ps) => !ps.contains(&p),
        }
    }

    pub fn inverts_any(&self) -> bool {
        !matches!(self, InvertedSet::Primes(ps) if ps.is_empty())
    }

    pub fn union(&self, other: &Self) -> Self {
        use InvertedSet::*;
        match (self, other) {
            (Primes(a), Primes(b)) => Primes(a | b),
            (Primes(a), AllBut(b)) | (AllBut(b), Primes(a)) => AllBut(b - a),
            (AllBut(a), AllBut(b)) => AllBut(a & b),
        }
    }

    pub fn complement(&self) -> Self {
        match self {
            InvertedSet::Primes(ps) => InvertedSet::AllBut(ps.clone()),
            InvertedSet::AllBut(ps) => InvertedSet::Primes(ps.clone()),
        }
    }

    /// `Z[1/2,1/3]`, `Z_(2)`, `Q`, or `Z`.
    pub fn ring_name(&self) -> String {
        let list = |ps: &BTreeSet<u64>, f: &dyn Fn(u64) -> String| ps.iter().map(|&p| f(p)).collect::<Vec<_>>().join(",");
        match self {
            InvertedSet::Primes(ps) if ps.is_empty() => "Z".into(),
            InvertedSet::Primes(ps) => format!("Z[{}]", list(ps, &|p| format!("1/{p}"))),
            InvertedSet::AllBut(ps) if ps.is_empty() => "Q".into(),
            InvertedSet::AllBut(ps) => format!("Z_({})", list(ps, &|p| p.to_string())),
        }
    }
}

impl fmt::Display for InvertedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |ps: &BTreeSet<u64>| ps.iter().map(u64::to_string).collect::<Vec<_>>().join(",");
        match self {
            InvertedSet::Primes(ps) => write!(f, "{{{}}}", list(ps)),
            InvertedSet::AllBut(ps) => write!(f, "all primes except {{{}}}", list(ps)),
        }
    }
}

/// `S^-1 M`: a free module over the localized ring plus the surviving torsion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LocalizedGroup {
    pub rank: u32,
    pub torsion: Vec<PrimePower>,
    pub inverted: InvertedSet,
}

impl LocalizedGroup {
    /// Localizes further; the inverted set becomes the union.
    pub fn localize(&self, s: &InvertedSet) -> LocalizedGroup {
        LocalizedGroup {
            rank: self.rank,
            torsion: self.torsion.iter().copied().filter(|t| !s.inverts(t.prime)).collect(),
            inverted: self.inverted.union(s),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn order(&self) -> Option<u64> {
        if self.rank > 0 {
            return None;
        }
        self.torsion.iter().try_fold(1u64, |acc, t| acc.checked_mul(t.order()))
    }

    /// The underlying abelian group when it is finitely generated over `Z`.
    pub fn as_group(&self) -> Option<FGAbelianGroup> {
        (self.rank == 0 || !self.inverted.inverts_any()).then(|| FGAbelianGroup::from_primary(self.rank, self.torsion.clone()))
    }
}

impl fmt::Display for LocalizedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ring = self.inverted.ring_name();
        let free = match self.rank {
            0 => None,
            1 => Some(ring),
            r => Some(format!("{ring}^{r}")),
        };
        f.write_str(&format_terms(free, &self.torsion))
    }
}

/// Rank is preserved; a summand `Z/p^k` survives iff `p` is not inverted.
pub fn localize(m: &FGAbelianGroup, s: &InvertedSet) -> LocalizedGroup {
    LocalizedGroup {
        rank: m.rank,
        torsion: m.torsion.iter().copied().filter(|t| !s.inverts(t.prime)).collect(),
        inverted: s.clone(),
    }
}

/// Whether multiplication by every inverted prime is bijective on `m`.
pub fn is_s_local(m: &FGAbelianGroup, s: &InvertedSet) -> bool {
    (m.rank == 0 || !s.inverts_any()) && m.torsion.iter().all(|t| !s.inverts(t.prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(s: &str) -> FGAbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn literals() {
        assert_eq!(g("Z/12").to_string(), "Z/4 + Z/3");
        assert_eq!(g("Z^2 + Z/6 + Z/4").to_string(), "Z^2 + Z/2 + Z/4 + Z/3");
        assert_eq!(g("Z/1").to_string(), "0");
        assert_eq!(g("0"), FGAbelianGroup::zero());
        assert_eq!(g("Z + Z/0"), FGAbelianGroup::free(2));
        assert!("Z/x".parse::<FGAbelianGroup>().is_err());
        assert!("Q".parse::<FGAbelianGroup>().is_err());
        assert!("".parse::<FGAbelianGroup>().is_err());
        assert_eq!(g("Z/12 + Z/18").invariant_factors(), vec![6, 36]);
    }

    #[test]
    fn localization_examples() {
        let z12 = g("Z/12");
        assert_eq!(localize(&z12, &InvertedSet::all_but([2]).unwrap()).to_string(), "Z/4");
        assert_eq!(localize(&z12, &InvertedSet::primes([2]).unwrap()).to_string(), "Z/3");
        let l = localize(&g("Z + Z/5"), &InvertedSet::rationalize());
        assert_eq!((l.rank, l.torsion.len()), (1, 0));
        assert_eq!(l.to_string(), "Q");
        assert_eq!(localize(&g("Z^2"), &InvertedSet::primes([2, 3]).unwrap()).to_string(), "Z[1/2,1/3]^2");
        assert_eq!(localize(&g("Z"), &InvertedSet::all_but([2]).unwrap()).to_string(), "Z_(2)");
        assert!(InvertedSet::primes([4]).is_err());
    }

    #[test]
    fn locality() {
        let two = InvertedSet::primes([2]).unwrap();
        assert!(is_s_local(&g("Z/3"), &two));
        assert!(!is_s_local(&g("Z"), &two));
        assert!(!is_s_local(&g("Z/4"), &two));
        assert!(is_s_local(&g("Z"), &InvertedSet::nothing()));
    }

    #[test]
    fn set_algebra() {
        let a = InvertedSet::primes([2]).unwrap();
        let b = InvertedSet::all_but([2, 3]).unwrap();
        assert_eq!(a.union(&b), InvertedSet::all_but([3]).unwrap());
        assert_eq!(b.union(&InvertedSet::all_but([3, 5]).unwrap()), InvertedSet::all_but([3]).unwrap());
        assert_eq!(a.complement().complement(), a);
        assert_eq!(a.ring_name(), "Z[1/2]");
    }
}
