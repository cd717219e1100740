//! Finite abelian groups `Z/n_1 x ... x Z/n_k` at the level of elements.

use super::FGAbelianGroup;
use crate::error::{Error, Result};

/// `Z/n_1 x ... x Z/n_k`, elements indexed in mixed radix with `n_1` fastest.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicProduct {
    moduli: Vec<u64>,
}

impl CyclicProduct {
    pub fn new(moduli: Vec<u64>) -> Result<Self> {
        if moduli.contains(&0) {
            return Err(Error::Precondition("moduli must be positive".into()));
        }
        moduli
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .filter(|&o| o <= u32::MAX as u64)
            .ok_or_else(|| Error::Bound("group order exceeds 2^32".into()))?;
        Ok(CyclicProduct { moduli })
    }

    pub fn trivial() -> Self {
        CyclicProduct { moduli: Vec::new() }
    }

    /// Invariant-factor form of a finite group.
    pub fn from_group(g: &FGAbelianGroup) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::Precondition(format!("{g} is infinite")));
        }
        Self::new(g.invariant_factors())
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product::<u64>() as usize
    }

    pub fn coords(&self, mut idx: usize) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&n| {
                let c = idx as u64 % n;
                idx /= n as usize;
                c
            })
            .collect()
    }

    pub fn index(&self, x: &[u64]) -> usize {
        let mut idx = 0usize;
        for (c, &n) in x.iter().zip(&self.moduli).rev() {
            idx = idx * n as usize + (c % n) as usize;
        }
        idx
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (x, y) = (self.coords(a), self.coords(b));
        let z: Vec<u64> = x.iter().zip(&y).zip(&self.moduli).map(|((a, b), n)| (a + b) % n).collect();
        self.index(&z)
    }

    pub fn neg(&self, a: usize) -> usize {
        let z: Vec<u64> = self.coords(a).iter().zip(&self.moduli).map(|(a, n)| (n - a) % n).collect();
        self.index(&z)
    }

    pub fn scale(&self, k: u64, a: usize) -> usize {
        let z: Vec<u64> = self.coords(a).iter().zip(&self.moduli).map(|(a, &n)| ((*a as u128 * k as u128) % n as u128) as u64).collect();
        self.index(&z)
    }

    /// Multiplication by `k` as a table on element indices.
    pub fn scale_table(&self, k: u64) -> Vec<u32> {
        // Index of k*x built one coordinate at a time, first coordinate fastest.
        let mut out = vec![0u32];
        let mut stride = 1u64;
        for &n in &self.moduli {
            let mut next = Vec::with_capacity(out.len() * n as usize);
            for c in 0..n {
                let shift = ((c as u128 * k as u128) % n as u128) as u64 * stride;
                next.extend(out.iter().map(|&x| x + shift as u32));
            }
            out = next;
            stride *= n;
        }
        out
    }

    /// Primary decomposition of this group.
    pub fn canonical(&self) -> FGAbelianGroup {
        FGAbelianGroup::new(0, &self.moduli)
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        Self::new(self.moduli.iter().chain(&other.moduli).copied().collect())
    }

    /// `B / <gens>` and the projection.
    pub fn quotient(&self, gens: &[Vec<u64>]) -> Result<(CyclicProduct, GroupHom)> {
        let n = self.moduli.len();
        let mut m = vec![vec![0i128; n + gens.len()]; n];
        for i in 0..n {
            m[i][i] = self.moduli[i] as i128;
            for (j, g) in gens.iter().enumerate() {
                m[i][n + j] = g[i] as i128;
            }
        }
        let snf = smith_normal_form(&m);
        let keep: Vec<usize> = (0..n).filter(|&i| snf.diagonal[i] != 1).collect();
        let q = CyclicProduct::new(keep.iter().map(|&i| snf.diagonal[i] as u64).collect())?;
        let images = (0..n)
            .map(|j| keep.iter().map(|&i| snf.u[i][j].rem_euclid(snf.diagonal[i]) as u64).collect())
            .collect();
        let hom = GroupHom::new(self.clone(), q.clone(), images)?;
        Ok((q, hom))
    }

    /// `<gens>` as an abstract group with its inclusion.
    pub fn subgroup(&self, gens: &[Vec<u64>]) -> Result<(CyclicProduct, GroupHom)> {
        let n = self.moduli.len();
        let k = gens.len();
        let mut m = vec![vec![0i128; n + k]; n];
        for i in 0..n {
            m[i][i] = self.moduli[i] as i128;
            for (j, g) in gens.iter().enumerate() {
                m[i][n + j] = g[i] as i128;
            }
        }
        // Relations among the generators: the gens-part of ker m, spanned by the last k columns of v.
        let snf = smith_normal_form(&m);
        let rel: Vec<Vec<i128>> = (0..k).map(|r| (0..k).map(|c| snf.v[n + r][n + c]).collect()).collect();
        let snf2 = smith_normal_form(&rel);
        let keep: Vec<usize> = (0..k).filter(|&i| snf2.diagonal[i] != 1).collect();
        if keep.iter().any(|&i| snf2.diagonal[i] == 0) {
            return Err(Error::Precondition("subgroup of a finite group cannot be infinite".into()));
        }
        let a = CyclicProduct::new(keep.iter().map(|&i| snf2.diagonal[i] as u64).collect())?;
        let images = keep
            .iter()
            .map(|&i| {
                (0..n)
                    .map(|row| {
                        let s: i128 = (0..k).map(|j| gens[j][row] as i128 * snf2.u_inv[j][i]).sum();
                        s.rem_euclid(self.moduli[row] as i128) as u64
                    })
                    .collect()
            })
            .collect();
        let hom = GroupHom::new(a.clone(), self.clone(), images)?;
        Ok((a, hom))
    }
}

/// A homomorphism given by the images of the standard generators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    pub source: CyclicProduct,
    pub target: CyclicProduct,
    pub images: Vec<Vec<u64>>,
}

impl GroupHom {
    /// Checks that `n_j` times the image of generator `j` vanishes.
    pub fn new(source: CyclicProduct, target: CyclicProduct, images: Vec<Vec<u64>>) -> Result<Self> {
        if images.len() != source.moduli.len() || images.iter().any(|v| v.len() != target.moduli.len()) {
            return Err(Error::Shape(format!(
                "a map from {} generators to {} needs {} images of length {}",
                source.moduli.len(),
                target.moduli.len(),
                source.moduli.len(),
                target.moduli.len()
            )));
        }
        let images: Vec<Vec<u64>> = images.into_iter().map(|v| v.iter().zip(&target.moduli).map(|(a, n)| a % n).collect()).collect();
        for (j, img) in images.iter().enumerate() {
            let idx = target.index(img);
            if target.scale(source.moduli[j], idx) != 0 {
                return Err(Error::Precondition(format!("generator {j} has order {} but its image does not", source.moduli[j])));
            }
        }
        Ok(GroupHom { source, target, images })
    }

    pub fn zero(source: CyclicProduct, target: CyclicProduct) -> Self {
        let images = vec![vec![0; target.moduli.len()]; source.moduli.len()];
        GroupHom { source, target, images }
    }

    pub fn apply(&self, a: usize) -> usize {
        let x = self.source.coords(a);
        let mut y = vec![0u128; self.target.moduli.len()];
        for (c, img) in x.iter().zip(&self.images) {
            for (i, v) in img.iter().enumerate() {
                y[i] = (y[i] + *c as u128 * *v as u128) % self.target.moduli[i] as u128;
            }
        }
        let y: Vec<u64> = y.into_iter().map(|v| v as u64).collect();
        self.target.index(&y)
    }

    pub fn table(&self) -> Vec<u32> {
        (0..self.source.order()).map(|a| self.apply(a) as u32).collect()
    }
}

/// `u a v = diag(diagonal)` with `u`, `v` unimodular.
#[derive(Debug, Clone)]
pub struct Smith {
    pub diagonal: Vec<i128>,
    pub u: Vec<Vec<i128>>,
    pub u_inv: Vec<Vec<i128>>,
    pub v: Vec<Vec<i128>>,
}

fn identity(n: usize) -> Vec<Vec<i128>> {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// Smith normal form over `Z`, with `d_1 | d_2 | ...` nonnegative.
pub fn smith_normal_form(a: &[Vec<i128>]) -> Smith {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<i128>> = a.to_vec();
    let mut u = identity(m);
    let mut u_inv = identity(m);
    let mut v = identity(n);

    // Elementary operations, mirrored on u, u_inv and v.
    let swap_rows = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, ui: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        a.swap(i, j);
        u.swap(i, j);
        for row in ui.iter_mut() {
            row.swap(i, j);
        }
    };
    // row_i += q row_j
    let add_row = |a: &mut Vec<Vec<i128>>, u: &mut Vec<Vec<i128>>, ui: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for k in 0..a[0].len() {
            a[i][k] += q * a[j][k];
        }
        for k in 0..u[0].len() {
            u[i][k] += q * u[j][k];
        }
        for row in ui.iter_mut() {
            row[j] -= q * row[i];
        }
    };
    let swap_cols = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize| {
        for row in a.iter_mut().chain(v.iter_mut()) {
            row.swap(i, j);
        }
    };
    // col_i += q col_j
    let add_col = |a: &mut Vec<Vec<i128>>, v: &mut Vec<Vec<i128>>, i: usize, j: usize, q: i128| {
        for row in a.iter_mut().chain(v.iter_mut()) {
            row[i] += q * row[j];
        }
    };

    let r = m.min(n);
    for t in 0..r {
        loop {
            let pivot = (t..m)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| a[i][j] != 0)
                .min_by_key(|&(i, j)| a[i][j].abs());
            let Some((pi, pj)) = pivot else { break };
            swap_rows(&mut a, &mut u, &mut u_inv, t, pi);
            swap_cols(&mut a, &mut v, t, pj);
            let mut clean = true;
            for i in t + 1..m {
                let q = a[i][t].div_euclid(a[t][t]);
                if q != 0 {
                    add_row(&mut a, &mut u, &mut u_inv, i, t, -q);
                }
                clean &= a[i][t] == 0;
            }
            for j in t + 1..n {
                let q = a[t][j].div_euclid(a[t][t]);
                if q != 0 {
                    add_col(&mut a, &mut v, j, t, -q);
                }
                clean &= a[t][j] == 0;
            }
            if !clean {
                continue;
            }
            let d = a[t][t];
            if let Some(i) = (t + 1..m).find(|&i| (t + 1..n).any(|j| a[i][j] % d != 0)) {
                add_row(&mut a, &mut u, &mut u_inv, t, i, 1);
                continue;
            }
            break;
        }
        if a[t][t] < 0 {
            for k in 0..n {
                a[t][k] = -a[t][k];
            }
            for k in 0..m {
                u[t][k] = -u[t][k];
            }
            for row in u_inv.iter_mut() {
                row[t] = -row[t];
            }
        }
    }
    let diagonal = (0..r).map(|i| a[i][i]).collect();
    Smith { diagonal, u, u_inv, v }
}


#[cfg(test)]
mod tests {
    use super::*;

    fn mul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
        let (m, k, n) = (a.len(), b.len(), b[0].len());
        (0..m).map(|i| (0..n).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
    }

    #[test]
    fn smith_form() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal, vec![2, 6, 12]);
        let d = mul(&mul(&s.u, &a), &s.v);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[i][j], if i == j { s.diagonal[i] } else { 0 });
            }
        }
        assert_eq!(mul(&s.u, &s.u_inv), identity(3));
        let rect = vec![vec![4, 6, 8]];
        assert_eq!(smith_normal_form(&rect).diagonal, vec![2]);
    }

    #[test]
    fn scale_table_agrees_with_scale() {
        let g = CyclicProduct::new(vec![4, 6, 9]).unwrap();
        for k in [0, 1, 2, 3, 5, 12] {
            let t = g.scale_table(k);
            assert!((0..g.order()).all(|a| t[a] as usize == g.scale(k, a)), "k = {k}");
        }
    }

    #[test]
    fn elements_and_maps() {
        let g = CyclicProduct::new(vec![4, 6]).unwrap();
        assert_eq!(g.order(), 24);
        for a in 0..24 {
            assert_eq!(g.index(&g.coords(a)), a);
            assert_eq!(g.add(a, g.neg(a)), 0);
        }
        assert_eq!(g.canonical().to_string(), "Z/2 + Z/4 + Z/3");
        let z4 = CyclicProduct::new(vec![4]).unwrap();
        let z2 = CyclicProduct::new(vec![2]).unwrap();
        assert!(GroupHom::new(z2.clone(), z4.clone(), vec![vec![1]]).is_err());
        let h = GroupHom::new(z2, z4, vec![vec![2]]).unwrap();
        assert_eq!(h.table(), vec![0, 2]);
    }

    #[test]
    fn quotients_and_subgroups() {
        let z12 = CyclicProduct::new(vec![12]).unwrap();
        let (q, p) = z12.quotient(&[vec![4]]).unwrap();
        assert_eq!(q.order(), 4);
        assert_eq!(p.apply(1), p.apply(5));
        let (a, i) = z12.subgroup(&[vec![4]]).unwrap();
        assert_eq!(a.order(), 3);
        let image: std::collections::BTreeSet<usize> = (0..3).map(|x| i.apply(x)).collect();
        assert_eq!(image, [0, 4, 8].into_iter().collect());

        let g = CyclicProduct::new(vec![6, 10]).unwrap();
        let gens = vec![vec![2, 5], vec![3, 0]];
        let (a, i) = g.subgroup(&gens).unwrap();
        let (q, p) = g.quotient(&gens).unwrap();
        assert_eq!(a.order() * q.order(), g.order());
        let image: std::collections::BTreeSet<usize> = (0..a.order()).map(|x| i.apply(x)).collect();
        assert_eq!(image.len(), a.order());
        let kernel: std::collections::BTreeSet<usize> = (0..g.order()).filter(|&x| p.apply(x) == 0).collect();
        assert_eq!(image, kernel);
    }
}
