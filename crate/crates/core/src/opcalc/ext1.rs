//! Ext^1 in degree `rq`, `p^2 < r < p^2 + p`: the class of `R_{p^2}` on the
//! bottom cell is not a coboundary of an integral cochain.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{binomial, frac, frac_big, pow_u64, Fraction};
use crate::error::{Error, Result};
use crate::grading::{reduce_mod, Monomial, Poly, TermIdeal};
use crate::hopf::Hopf;
use crate::report::CheckRecord;

/// Residue of a p-integral rational modulo `p`, `None` if not p-integral.
fn residue(x: &Fraction, p: u64) -> Option<u64> {
    let pb = BigInt::from(p);
    let d = x.denom().mod_floor(&pb);
    if d.is_zero() {
        return None;
    }
    let n = x.numer().mod_floor(&pb).to_u64()?;
    let d = d.to_u64()?;
    let inv = (1..p).find(|k| d * k % p == 1)?;
    Some(n * inv % p)
}

fn rank_mod_p(cols: &[Vec<u64>], p: u64) -> usize {
    let Some(rows) = cols.first().map(Vec::len) else { return 0 };
    // Work on the transpose so that columns become rows of the elimination.
    let mut m: Vec<Vec<u64>> = cols.to_vec();
    let mut rank = 0;
    for c in 0..rows {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = (1..p).find(|k| m[rank][c] * k % p == 1).expect("nonzero residue is invertible");
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                for k in 0..rows {
                    m[i][k] = (m[i][k] + p * p - f * m[rank][k] % p) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn rank_rational(cols: &[Vec<Fraction>]) -> usize {
    let Some(rows) = cols.first().map(Vec::len) else { return 0 };
    let mut m: Vec<Vec<Fraction>> = cols.to_vec();
    let mut rank = 0;
    for c in 0..rows {
        let Some(piv) = (rank..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(rank, piv);
        let lead = m[rank][c].clone();
        for x in m[rank].iter_mut() {
            *x = &*x / &lead;
        }
        for i in 0..m.len() {
            if i != rank && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in 0..rows {
                    let sub = &f * &m[rank][k];
                    m[i][k] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Checks, for `p^2 < r < p^2 + p`:
///
/// * `R_{p^2} v_1^r = binom(r, p^2) p^{p^2} v_1^{r-p^2}`, which vanishes mod `p^p`;
/// * the coboundaries `d_0 = [R_1; R_p; R_{p^2}]` of the monomials `v_1^i v_2^j` of degree `rq`;
/// * that an integral value of `d_0(c v_1^r + sum c_ij v_1^i v_2^j)` forces `c_ij` and `pc` integral.
pub fn ext1_invariant(h: &Hopf, r: u64) -> Result<Vec<CheckRecord>> {
    let p = h.prime();
    if !(p * p < r && r < p * p + p) {
        return Err(Error::Precondition(format!("r = {r} must satisfy {} < r < {}", p * p, p * p + p)));
    }
    if h.generators() < 2 {
        return Err(Error::Truncation { index: 2, limit: h.generators() });
    }
    let pe = p as u32;
    let ru = r as u32;
    let v1 = h.v(1)?;
    let ops = [Monomial::var(1, 1), Monomial::var(1, pe), Monomial::var(1, pe * pe)];
    let mono = |i: u32, j: u32| Poly::monomial(h.v_alphabet(), Monomial::from_exponents(&[i, j]), frac(1));
    let d0 = |x: &Poly| ops.iter().map(|o| h.r_action(o, x)).collect::<Result<Vec<Poly>>>();
    let mut out = Vec::new();

    let top = h.r_action(&ops[2], &v1.pow(ru))?;
    let c = binomial(r, p * p);
    let oracle = v1.pow(ru - pe * pe).scale(&frac_big(&c * pow_u64(p, pe * pe)));
    out.push(CheckRecord::compare(
        "ext1.top-on-v1-power",
        "R_{p^2}v1^r=binom(r,p^2)p^(p^2)v1^(r-p^2)",
        &oracle,
        &top,
    ));
    let pp = TermIdeal::p_power(p, pe);
    out.push(
        CheckRecord::new("ext1.top-vanishes", "R_{p^2}h=0 mod p^p", reduce_mod(&top, &pp)?.is_zero())
            .expected("0")
            .computed(reduce_mod(&top, &pp)?)
            .modulus(&pp)
            .witness(format!("constant binom(r,p^2) = {c}, exponent r-p^2 = {}", r - p * p)),
    );

    // Basis of degree rq: v1^i v2^j with i + j(p+1) = r.
    let basis: Vec<(u32, u32)> = (0..=ru / (pe + 1)).map(|j| (ru - j * (pe + 1), j)).collect();
    let row2_ideal = TermIdeal::new(p, vec![(pe - 1, Monomial::one()), (1, Monomial::var(1, pe))])?;
    let row2_literal = TermIdeal::p_power(p, pe - 1);
    let (mut row1, mut row2, mut row2_lit, mut row3) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let (mut ok1, mut ok2, mut ok2_lit, mut ok3) = (true, true, true, true);
    let mut columns: Vec<Vec<Poly>> = Vec::new();
    let mut pure = None;
    for &(i, j) in &basis {
        let x = mono(i, j);
        let rows = d0(&x)?;
        if j == 0 {
            pure = Some(rows);
            continue;
        }
        let jj = frac(j as i64);
        let e1 = mono(i + pe, j - 1).scale(&-jj.clone());
        let e2 = mono(i + 1, j - 1).scale(&jj);
        let r1 = reduce_mod(&(&rows[0] - &e1), &TermIdeal::p_power(p, 1))?;
        let r2 = reduce_mod(&(&rows[1] - &e2), &row2_ideal)?;
        let r2l = reduce_mod(&(&rows[1] - &e2), &row2_literal)?;
        let r3 = reduce_mod(&rows[2], &pp)?;
        ok1 &= r1.is_zero();
        ok2 &= r2.is_zero();
        ok2_lit &= r2l.is_zero();
        ok3 &= r3.is_zero();
        let name = x.to_string();
        row1.push(format!("R1({name}) = {e1} + ({r1})"));
        row2.push(format!("Rp({name}) = {e2} + ({r2})"));
        row2_lit.push(format!("Rp({name}) - {e2} = {r2l} mod p^{}", pe - 1));
        row3.push(format!("R_p^2({name}) = {r3} mod p^{pe}"));
        columns.push(rows);
    }
    let modp = TermIdeal::p_power(p, 1);
    out.push(CheckRecord::new("ext1.row1", "R1(v1^i v2^j)=-j v1^(i+p)v2^(j-1) mod p", ok1).expected("residual 0").computed(row1.join("; ")).modulus(&modp));
    out.push(
        CheckRecord::new("ext1.row2", "Rp(v1^i v2^j)=j v1^(i+1)v2^(j-1) mod (p^(p-1),p v1^p)", ok2)
            .expected("residual 0")
            .computed(row2.join("; "))
            .modulus(&row2_ideal)
            .witness(format!(
                "modulo p^(p-1) alone the congruence {}: {}",
                if ok2_lit { "also holds" } else { "fails" },
                row2_lit.join("; ")
            )),
    );
    out.push(CheckRecord::new("ext1.row3", "R_{p^2}(v1^i v2^j)=0 mod p^p", ok3).expected("0").computed(row3.join("; ")).modulus(&pp));

    let pure = pure.expect("j = 0 is always present");
    let r1_exact = v1.pow(ru - 1).scale(&frac((p * r) as i64));
    let pure_ok = pure[0] == r1_exact
        && reduce_mod(&pure[1], &pp)?.is_zero()
        && reduce_mod(&pure[2], &TermIdeal::p_power(p, pe * pe))?.is_zero();
    out.push(
        CheckRecord::new("ext1.pure-power", "d0(v1^r)=[p r v1^(r-1);0 mod p^p;0 mod p^(p^2)]", pure_ok)
            .expected(format!("[{r1_exact}; 0 mod p^{pe}; 0 mod p^{}]", pe * pe))
            .computed(format!("[{}; {}; {}]", pure[0], pure[1], pure[2])),
    );

    // Unknowns (c_ij, pc): scale the pure-power column by 1/p.
    let inv_p = Fraction::new(1.into(), BigInt::from(p));
    columns.push(pure.iter().map(|x| x.scale(&inv_p)).collect());
    let keys: BTreeSet<(usize, Monomial)> = columns
        .iter()
        .flat_map(|col| col.iter().enumerate().flat_map(|(k, x)| x.terms().keys().map(move |m| (k, m.clone()))))
        .collect();
    let dense: Vec<Vec<Fraction>> = columns
        .iter()
        .map(|col| keys.iter().map(|(k, m)| col[*k].coeff(m)).collect())
        .collect();
    let integral = dense.iter().flatten().all(|x| residue(x, p).is_some());
    let rank_q = rank_rational(&dense);
    let rank_p = if integral {
        let reduced: Vec<Vec<u64>> = dense.iter().map(|c| c.iter().map(|x| residue(x, p).unwrap_or(0)).collect()).collect();
        rank_mod_p(&reduced, p)
    } else {
        0
    };
    let n = dense.len();
    out.push(
        CheckRecord::new(
            "ext1.integrality",
            "d0(c v1^r + sum c_ij v1^i v2^j) integral => c_ij, pc integral",
            integral && rank_q == n && rank_p == n,
        )
        .expected(format!("integral matrix of full column rank {n} over Q and mod p"))
        .computed(format!("integral = {integral}, rank over Q = {rank_q}, rank mod p = {rank_p}, {} rows", keys.len())),
    );
    Ok(out)
}
