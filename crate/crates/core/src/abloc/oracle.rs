//! `S^-1 M` built literally from pairs `(m, s)` for a finite group `M`.

use std::collections::{BTreeSet, HashMap};

use petgraph::unionfind::UnionFind;

use super::{CyclicProduct, FGAbelianGroup, InvertedSet, LocalizedGroup, PrimePower};
use crate::arith::factorize;
use crate::error::{Error, Result};

/// Recovers a finite abelian group from `order` and the sizes of its `q^j`-torsion.
///
/// `kernel(q, j)` must return `#{x : q^j x = 0}`.
pub fn structure_from_kernel_counts(order: u64, kernel: &mut dyn FnMut(u64, u32) -> u64) -> Result<Vec<PrimePower>> {
    let mut out = Vec::new();
    for (q, e) in factorize(order) {
        // c_j = |G[q^j]|; the number of cyclic factors of order >= q^j is log_q(c_j / c_{j-1}).
        let mut counts = vec![1u64];
        for j in 1..=e {
            counts.push(kernel(q, j));
        }
        let mut at_least = Vec::new();
        for j in 1..=e as usize {
            let ratio = counts[j] / counts[j - 1];
            if counts[j] % counts[j - 1] != 0 {
                return Err(Error::Precondition(format!("kernel counts {counts:?} are not those of a group")));
            }
            let mut k = 0u32;
            let mut r = ratio;
            while r > 1 && r % q == 0 {
                r /= q;
                k += 1;
            }
            if r != 1 {
                return Err(Error::Precondition(format!("kernel counts {counts:?} are not powers of {q}")));
            }
            at_least.push(k);
        }
        at_least.push(0);
        for j in 1..=e as usize {
            let exactly = at_least[j - 1].checked_sub(at_least[j]).ok_or_else(|| Error::Precondition("kernel counts decrease".into()))?;
            out.extend(std::iter::repeat(PrimePower { prime: q, exponent: j as u32 }).take(exactly as usize));
        }
    }
    out.sort();
    Ok(out)
}

/// Primes used for the denominators: `P` itself, or for a co-finite set the
/// inverted primes dividing `|M|` and the least inverted prime that does not.
/// Primes prime to `|M|` act bijectively, so one of them stands for all.
fn denominator_primes(order: u64, s: &InvertedSet) -> Vec<u64> {
    match s {
        InvertedSet::Primes(ps) => ps.iter().copied().collect(),
        InvertedSet::AllBut(excluded) => {
            let divisors: Vec<u64> = factorize(order).into_iter().map(|(p, _)| p).collect();
            let mut out: Vec<u64> = divisors.iter().copied().filter(|p| !excluded.contains(p)).collect();
            let extra = (2u64..).find(|&p| crate::arith::is_prime(p) && !excluded.contains(&p) && !divisors.contains(&p));
            out.extend(extra);
            out
        }
    }
}

const CELL_BUDGET: usize = 4_000_000;

struct Classes {
    count: u64,
    torsion: Vec<PrimePower>,
}

/// Pairs `(m, s)` with `s = prod p^(e_p)`, `e_p <= 3k`, modulo the relation generated by
/// `(m, s) ~ (pm, ps)`; classes are read off on pairs with `e_p <= k`.
fn classes_at(m: &CyclicProduct, primes: &[u64], scale: &[Vec<u32>], k: usize) -> Result<Classes> {
    let n = m.order();
    let width = 3 * k + 1;
    let slots = width.checked_pow(primes.len() as u32).filter(|&s| s.saturating_mul(n) <= CELL_BUDGET).ok_or_else(|| {
        Error::Bound(format!("fraction construction on {n} elements with {} denominator primes at depth {k}", primes.len()))
    })?;
    let node = |x: usize, slot: usize| slot * n + x;
    let mut uf = UnionFind::<usize>::new(slots * n);
    let mut digits = vec![0usize; primes.len()];
    for slot in 0..slots {
        let mut r = slot;
        for d in digits.iter_mut() {
            *d = r % width;
            r /= width;
        }
        let mut stride = 1;
        for (i, &d) in digits.iter().enumerate() {
            if d + 1 < width {
                let up = slot + stride;
                for x in 0..n {
                    uf.union(node(x, slot), node(scale[i][x] as usize, up));
                }
            }
            stride *= width;
        }
    }
    let low_slots: Vec<usize> = (0..slots)
        .filter(|&slot| {
            let mut r = slot;
            (0..primes.len()).all(|_| {
                let d = r % width;
                r /= width;
                d <= k
            })
        })
        .collect();
    // One representative pair per class.
    let mut reps: HashMap<usize, (usize, usize)> = HashMap::new();
    for &slot in &low_slots {
        for x in 0..n {
            reps.entry(uf.find(node(x, slot))).or_insert((x, slot));
        }
    }
    let count = reps.len() as u64;
    let zero = uf.find(node(0, 0));
    let mut kernel = |q: u64, j: u32| -> u64 {
        let qj = q.pow(j);
        reps.values().filter(|&&(x, slot)| uf.find(node(m.scale(qj, x), slot)) == zero).count() as u64
    };
    let torsion = structure_from_kernel_counts(count, &mut kernel)?;
    Ok(Classes { count, torsion })
}

/// `S^-1 M` for a finite group `M` given element by element, independent of [`super::localize`].
///
/// Denominators range over products of the denominator primes; when that grid is
/// too large they range over powers of the single product of those primes, a
/// cofinal part of `S`. The depth `k` grows until the class count and structure
/// repeat, starting where `3k` reaches every exponent in `|M|`.
pub fn fraction_oracle(m: &CyclicProduct, s: &InvertedSet, bound: usize) -> Result<LocalizedGroup> {
    let n = m.order();
    if n > bound {
        return Err(Error::Bound(format!("group of order {n} exceeds the bound {bound}")));
    }
    let primes = denominator_primes(n as u64, s);
    let deepest = factorize(n as u64).iter().map(|&(_, e)| e as usize).max().unwrap_or(0);
    let width = 3 * (deepest.div_ceil(3) + 2) + 1;
    let grid: Vec<u64> = if width.saturating_pow(primes.len() as u32).saturating_mul(n) <= CELL_BUDGET {
        primes
    } else {
        vec![primes.iter().fold(1u64, |acc, &p| acc.saturating_mul(p))]
    };
    let scale: Vec<Vec<u32>> = grid.iter().map(|&p| m.scale_table(p)).collect();
    let mut previous: Option<Classes> = None;
    for k in deepest.div_ceil(3).max(1)..=64 {
        let now = classes_at(m, &grid, &scale, k)?;
        if let Some(prev) = &previous {
            if prev.count == now.count && prev.torsion == now.torsion {
                return Ok(LocalizedGroup { rank: 0, torsion: now.torsion, inverted: s.clone() });
            }
        }
        previous = Some(now);
    }
    Err(Error::Bound("fraction construction did not stabilize".into()))
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Every abelian group of order `n`, up to isomorphism.
pub fn abelian_groups_of_order(n: u64) -> Vec<FGAbelianGroup> {
    let mut groups = vec![Vec::<PrimePower>::new()];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for g in &groups {
            for part in partitions(e, e) {
                let mut h = g.clone();
                h.extend(part.iter().map(|&k| PrimePower { prime: p, exponent: k }));
                next.push(h);
            }
        }
        groups = next;
    }
    let set: BTreeSet<Vec<PrimePower>> = groups
        .into_iter()
        .map(|mut g| {
            g.sort();
            g
        })
        .collect();
    set.into_iter().map(|g| FGAbelianGroup::from_primary(0, g)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abloc::localize;

    fn cp(m: &[u64]) -> CyclicProduct {
        CyclicProduct::new(m.to_vec()).unwrap()
    }

    #[test]
    fn twelve() {
        let z12 = cp(&[12]);
        let two = fraction_oracle(&z12, &InvertedSet::primes([2]).unwrap(), 1000).unwrap();
        assert_eq!(two.order(), Some(3));
        let three = fraction_oracle(&z12, &InvertedSet::primes([3]).unwrap(), 1000).unwrap();
        assert_eq!(three.order(), Some(4));
        assert_eq!(three.to_string(), "Z/4");
        let trivial = fraction_oracle(&cp(&[]), &InvertedSet::primes([5]).unwrap(), 1000).unwrap();
        assert!(trivial.is_zero());
        let at2 = fraction_oracle(&cp(&[12, 30]), &InvertedSet::all_but([2]).unwrap(), 1000).unwrap();
        assert_eq!(at2.to_string(), "Z/2 + Z/4");
        assert!(matches!(fraction_oracle(&cp(&[2000]), &InvertedSet::nothing(), 1000), Err(Error::Bound(_))));
    }

    #[test]
    fn agrees_with_localize_on_small_groups() {
        for n in 1..=64u64 {
            for g in abelian_groups_of_order(n) {
                let table = CyclicProduct::from_group(&g).unwrap();
                for s in [InvertedSet::primes([2]).unwrap(), InvertedSet::primes([3, 5]).unwrap(), InvertedSet::all_but([2]).unwrap(), InvertedSet::nothing()] {
                    assert_eq!(fraction_oracle(&table, &s, 10_000).unwrap(), localize(&g, &s), "{g} at {s}");
                }
            }
        }
    }

    #[test]
    fn group_counts() {
        let counts: Vec<usize> = (1..=16).map(|n| abelian_groups_of_order(n).len()).collect();
        assert_eq!(counts, [1, 1, 1, 2, 1, 1, 1, 3, 2, 1, 1, 2, 1, 1, 1, 5]);
        assert_eq!(abelian_groups_of_order(10_000).len(), 25);
        let kernel_counts = structure_from_kernel_counts(16, &mut |_, j| [1, 4, 8, 16, 16][j as usize]).unwrap();
        assert_eq!(FGAbelianGroup::from_primary(0, kernel_counts).to_string(), "Z/2 + Z/8");
    }
}
