//! Operation identities checked by pairing against every t-monomial in a degree window,
//! and the values of single operations on the generators `v_i`.

use std::fmt::Write as _;

use super::{parse_op, Hopf, OperationCombo, TPoly};
use crate::arith::{frac, frac_big, pow_u64};
use crate::error::Result;
use crate::grading::{divide_exact, reduce_mod, to_m_basis, to_v_basis, Monomial, Poly, TermIdeal};
use crate::report::CheckRecord;

/// A claimed identity `lhs = rhs` between operation combinations.
#[derive(Debug, Clone)]
pub struct Relation {
    pub id: &'static str,
    pub anchor: &'static str,
    pub lhs: OperationCombo,
    pub rhs: OperationCombo,
}

/// The commutation relations among `R_1`, `R_p`, `R_{01}` and the two cubic relations they imply.
pub fn commutation_relations(h: &Hopf) -> Result<Vec<Relation>> {
    let (p, n) = (h.prime(), h.generators());
    let op = |s: &str| parse_op(s, p, n);
    let zero = OperationCombo::zero(h.v_alphabet());
    Ok(vec![
        Relation { id: "relation.r1-rp", anchor: "R1Rp-RpR1=R01", lhs: op("R[1]R[p] - R[p]R[1]")?, rhs: op("R[0,1]")? },
        Relation { id: "relation.r1-r01", anchor: "R1R01-R01R1=0", lhs: op("R[1]R[0,1] - R[0,1]R[1]")?, rhs: zero.clone() },
        Relation { id: "relation.rp-r01", anchor: "RpR01-R01Rp=0", lhs: op("R[p]R[0,1] - R[0,1]R[p]")?, rhs: zero.clone() },
        Relation {
            id: "relation.cubic-r1",
            anchor: "RpR1^2-2R1RpR1+R1^2Rp=0",
            lhs: op("R[p]R[1]^2 - 2*R[1]R[p]R[1] + R[1]^2R[p]")?,
            rhs: zero.clone(),
        },
        Relation {
            id: "relation.cubic-rp",
            anchor: "Rp^2R1-2RpR1Rp+R1Rp^2=0",
            lhs: op("R[p]^2R[1] - 2*R[p]R[1]R[p] + R[1]R[p]^2")?,
            rhs: zero,
        },
    ])
}

fn window_text(h: &Hopf, bound_q: u64, count: usize) -> String {
    format!("all {count} t-monomials of degree <= {bound_q}q (q = {})", h.q())
}

/// Pairs `lhs - rhs` against every monomial; the witness is the first nonzero pairing.
pub fn check_relation(h: &Hopf, rel: &Relation, monomials: &[Monomial], bound_q: u64) -> Result<CheckRecord> {
    let residual = rel.lhs.sub(&rel.rhs);
    let hit = h.first_nonzero_pairing(&residual, monomials)?;
    let computed = match &hit {
        None => "0".to_string(),
        Some((j, c)) => format!("<residual, {}> = {c}", j.format('t')),
    };
    let mut rec = CheckRecord::new(rel.id, rel.anchor, hit.is_none())
        .expected("0")
        .computed(computed)
        .modulus(window_text(h, bound_q, monomials.len()));
    if let Some((j, _)) = hit {
        rec = rec.witness(j.format('t'));
    }
    Ok(rec)
}

fn unit(h: &Hopf, j: &Monomial) -> TPoly {
    TPoly::term(j.clone(), Poly::one(h.v_alphabet()))
}

/// Recomputed pairings of the quadratic words against the monomials of degrees `(p+1)q` and `(p+2)q`.
pub fn pairing_table(h: &Hopf) -> Result<String> {
    let (p, n) = (h.prime(), h.generators());
    let q = h.q();
    let rows = ["R[1]R[p]", "R[p]R[1]", "R[0,1]", "R[1]R[0,1]", "R[0,1]R[1]"];
    let cols: Vec<Monomial> = [(p + 1) * q, (p + 2) * q]
        .iter()
        .flat_map(|&d| crate::grading::monomials_of_degree(d, h.t_alphabet()))
        .collect();
    let mut out = String::new();
    for r in rows {
        let a = parse_op(r, p, n)?;
        let cells = cols
            .iter()
            .map(|j| Ok(format!("{}: {}", j.format('t'), h.pair(&a, &unit(h, j))?)))
            .collect::<Result<Vec<_>>>()?;
        let _ = write!(out, "{}{r} -> {}", if out.is_empty() { "" } else { "; " }, cells.join(", "));
    }
    Ok(out)
}

/// All commutation checks on the window `t`-degree `<= bound_q * q`.
pub fn verify_commutation_relations(h: &Hopf, bound_q: u64) -> Result<Vec<CheckRecord>> {
    let (p, n) = (h.prime(), h.generators());
    let monomials = h.t_monomials(bound_q * h.q());
    let mut out = Vec::new();
    for rel in commutation_relations(h)? {
        out.push(check_relation(h, &rel, &monomials, bound_q)?);
    }

    // Same commutator through the composition formula instead of word pairing.
    let (r1, rp) = (parse_op("R[1]", p, n)?, parse_op("R[p]", p, n)?);
    let bound = bound_q * h.q();
    let comm = h.product_in_basis(&r1, &rp, bound)?.sub(&h.product_in_basis(&rp, &r1, bound)?);
    out.push(
        CheckRecord::compare("relation.r1-rp-product", "R1Rp-RpR1=R01", "R[0,1]", comm.to_string())
            .modulus(window_text(h, bound_q, monomials.len())),
    );

    let mutated = Relation {
        id: "relation.mutated",
        anchor: "R1Rp-RpR1=2R01 is rejected",
        lhs: parse_op("R[1]R[p] - R[p]R[1]", p, n)?,
        rhs: parse_op("2*R[0,1]", p, n)?,
    };
    let rec = check_relation(h, &mutated, &monomials, bound_q)?;
    let witness = rec.witness.clone().unwrap_or_default();
    let mut neg = CheckRecord::new(mutated.id, mutated.anchor, witness == "t2")
        .expected("nonzero residual witnessed at t2")
        .computed(rec.computed)
        .modulus(window_text(h, bound_q, monomials.len()));
    if !witness.is_empty() {
        neg = neg.witness(witness);
    }
    out.push(neg);

    let t1t2 = Monomial::from_exponents(&[1, 1]);
    let t1p1 = Monomial::var(1, p as u32 + 1);
    let v1 = h.v(1)?;
    let a = h.compose_pair(&r1, &rp, &unit(h, &t1t2))?;
    let b = h.compose_pair(&rp, &r1, &unit(h, &t1t2))?;
    let c = h.compose_pair(&r1, &rp, &unit(h, &t1p1))?;
    let d = h.compose_pair(&rp, &r1, &unit(h, &t1p1))?;
    let pp1 = h.constant(p as i64 + 1);
    let ok = a == -&v1 && b == -&v1 && c == pp1 && d == pp1;
    out.push(
        CheckRecord::new("table.quadratic", "<R1Rp,t1t2>=<RpR1,t1t2>=-v1", ok)
            .expected(format!("-v1, -v1, {pp1}, {pp1}"))
            .computed(format!("{a}, {b}, {c}, {d}"))
            .witness(format!("recomputed table: {}", pairing_table(h)?)),
    );
    Ok(out)
}

/// Values of `R_I` on `v_1, v_2, v_3`, exact or modulo the stated ideals.
pub fn verify_coefficient_actions(h: &Hopf) -> Result<Vec<CheckRecord>> {
    let p = h.prime();
    let pe = p as u32;
    let (v1, v2, v3) = (h.v(1)?, h.v(2)?, h.v(3)?);
    let r = |e: &[u32], x: &Poly| h.r_action(&Monomial::from_exponents(e), x);
    let mut out = Vec::new();

    out.push(CheckRecord::compare("action.r1-v1", "R1v1=p", h.constant(p as i64), r(&[1], &v1)?));
    let exp = v1.pow(pe).scale(&frac(-(p as i64 + 1)));
    out.push(CheckRecord::compare("action.r1-v2", "R1v2=-(p+1)v1^p", exp, r(&[1], &v2)?));
    out.push(CheckRecord::compare("action.r01-v2", "R01v2=p", h.constant(p as i64), r(&[0, 1], &v2)?));

    let rp_v2 = r(&[pe], &v2)?;
    let modulus = TermIdeal::new(p, vec![(pe - 1, Monomial::var(1, 1))])?;
    let diff = reduce_mod(&(&rp_v2 - &v1), &modulus)?;
    out.push(
        CheckRecord::new("action.rp-v2", "Rpv2=v1 mod p^(p-1)v1", diff.is_zero())
            .expected(&v1)
            .computed(&rp_v2)
            .modulus(&modulus),
    );
    let exact = v1.scale(&(frac(1) - frac(p as i64 + 1) * frac_big(pow_u64(p, pe - 1))));
    out.push(CheckRecord::compare("action.rp-v2-exact", "Rpv2=(1-(p+1)p^(p-1))v1", exact, &rp_v2));

    for i in 2..pe {
        let x = r(&[i], &v2)?;
        let ideal = TermIdeal::p_power(p, i);
        let ok = reduce_mod(&x, &ideal)?.is_zero();
        out.push(
            CheckRecord::new(format!("action.r{i}-v2"), format!("R{i}v2=0 mod p^{i}"), ok)
                .expected("0")
                .computed(&x)
                .modulus(&ideal),
        );
    }

    let pv1 = TermIdeal::p_and_v(p, 1);
    let r1v3 = r(&[1], &v3)?;
    let red = reduce_mod(&r1v3, &pv1)?;
    out.push(
        CheckRecord::compare("action.r1-v3", "R1v3=-v2^p mod (p,v1)", -&v2.pow(pe), &red)
            .modulus(&pv1)
            .witness(format!("{} terms before reduction", r1v3.len())),
    );
    let rpv3 = reduce_mod(&r(&[pe], &v3)?, &pv1)?;
    out.push(CheckRecord::compare("action.rp-v3", "Rpv3=0 mod (p,v1)", "0", &rpv3).modulus(&pv1));

    // Coefficient of t1^p (x) t1^(p^2-p) in psi(t3), compared in the m-basis.
    let key = (Monomial::var(1, pe), Monomial::var(1, pe * pe - pe));
    let c = h.psi_t_m(3)?.coefficient(&key);
    let v2m = crate::grading::hazewinkel_v_in_m(h.m_alphabet(), 2)?;
    let rest = &c + &v2m;
    let m2 = Monomial::var(2, 1);
    let ideal_ok = rest.terms().keys().all(|k| *k == m2)
        && rest.terms().values().all(|a| crate::arith::ord_at_least(a, p, 3));
    out.push(
        CheckRecord::new("coproduct.t3-coefficient", "coefficient of t1^p(x)t1^(p^2-p) in psi(t3) = -v2 mod p^3m2", ideal_ok)
            .expected("-v2 + (multiple of p^3) m2")
            .computed(format!("-v2 + ({rest})")),
    );

    out.push(action_table(h)?);
    Ok(out)
}

/// All nonzero `R_I v_1` and `R_I v_2`; `R_I v_1` vanishes beyond `I = (1)` but `R_I v_2` does not.
pub fn action_table(h: &Hopf) -> Result<CheckRecord> {
    let mut lines = Vec::new();
    let mut v1_ok = true;
    for i in 1..=2 {
        let series = h.eta_generator(i)?;
        let mut entries: Vec<(&Monomial, &Poly)> = series.terms().iter().filter(|(k, _)| !k.is_one()).collect();
        entries.sort_by_key(|(k, _)| k.degree(h.prime()));
        for (k, c) in &entries {
            if i == 1 && k.total_degree() > 1 {
                v1_ok = false;
            }
            lines.push(format!("R[{}]v{i} = {c}", k.exponents().iter().map(u32::to_string).collect::<Vec<_>>().join(",")));
        }
    }
    Ok(CheckRecord::new("action.table", "RIv1=0 for |I|>1", v1_ok)
        .expected("RIv1 = 0 for |I| > 1; RIv2 listed")
        .computed(lines.join("; ")))
}

/// Basis change, integrality of `psi(t_k)`, and the Cartan action against `eta_R`,
/// on every v-monomial of degree `<= max_degree`.
pub fn verify_structure(h: &Hopf, max_degree: u64) -> Result<Vec<CheckRecord>> {
    let (v, q) = (h.v_alphabet(), h.q());
    let top = h.generators().min(crate::grading::MAX_BASIS_INDEX);
    let monomials: Vec<Monomial> = (0..=max_degree / q).flat_map(|k| crate::grading::monomials_of_degree(k * q, v)).collect();
    let window = format!("all {} v-monomials of degree <= {max_degree}", monomials.len());
    let mut out = Vec::new();

    let mut round_trip = None;
    for i in 1..=top {
        let vi = h.v(i)?;
        let mi = crate::grading::m_in_v(v, i)?;
        if to_v_basis(&to_m_basis(&vi)?)? != vi || to_m_basis(&mi)? != h.m_alphabet().gen(i)? {
            round_trip.get_or_insert(format!("generator {i}"));
        }
    }
    for m in &monomials {
        let x = Poly::monomial(v, m.clone(), frac(1));
        if round_trip.is_none() && to_v_basis(&to_m_basis(&x)?)? != x {
            round_trip = Some(x.to_string());
        }
    }
    let mut rec = CheckRecord::new("structure.hazewinkel", "v -> m -> v = id", round_trip.is_none())
        .expected("identity")
        .computed(if round_trip.is_none() { "identity" } else { "differs" })
        .modulus(&window);
    if let Some(w) = round_trip {
        rec = rec.witness(w);
    }
    out.push(rec);

    let mut bad = Vec::new();
    let mut sizes = Vec::new();
    for k in 1..=top {
        let x = h.psi_t(k)?;
        sizes.push(format!("psi(t{k}): {} terms", x.len()));
        if !x.is_integral() {
            bad.push(format!("t{k}"));
        }
    }
    let mut rec = CheckRecord::new("structure.psi-integral", "psi(t_k) in Z_(p)[v] (x) for k <= 3", bad.is_empty())
        .expected("integral")
        .computed(sizes.join(", "));
    if !bad.is_empty() {
        rec = rec.witness(bad.join(", "));
    }
    out.push(rec);

    let mut cartan = None;
    for m in &monomials {
        let x = Poly::monomial(v, m.clone(), frac(1));
        if h.r_action_series(&x)? != h.eta_r(&x)? {
            cartan = Some(x.to_string());
            break;
        }
    }
    let mut rec = CheckRecord::new("structure.cartan", "sum_I R_I(x) t^I = eta_R(x)", cartan.is_none())
        .expected("equal series")
        .computed(if cartan.is_none() { "equal series" } else { "differs" })
        .modulus(&window);
    if let Some(w) = cartan {
        rec = rec.witness(w);
    }
    out.push(rec);
    Ok(out)
}

/// `x / (c m)` modulo `ideal`, re-multiplied to confirm the division.
pub fn checked_division(x: &Poly, c: i64, m: &Monomial, ideal: &TermIdeal) -> Result<(Poly, TermIdeal)> {
    let (qt, colon) = divide_exact(x, &frac(c), m, ideal)?;
    debug_assert!(reduce_mod(&(&qt.mul_monomial(m, &frac(c)) - x), ideal)?.is_zero());
    Ok((qt, colon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relations_hold_at_small_primes() {
        for p in [3u64, 5] {
            let h = Hopf::new(p, 4).unwrap();
            let recs = verify_commutation_relations(&h, 2 * p + 4).unwrap();
            for r in &recs {
                assert!(r.passed(), "p = {p}: {r:?}");
            }
        }
    }

    #[test]
    fn coefficient_actions_at_small_primes() {
        for p in [3u64, 5] {
            let h = Hopf::new(p, 4).unwrap();
            for r in verify_coefficient_actions(&h).unwrap() {
                assert!(r.passed(), "p = {p}: {r:?}");
            }
        }
    }

    #[test]
    fn mutated_relation_fails_at_t2() {
        let h = Hopf::new(5, 4).unwrap();
        let rel = Relation {
            id: "x",
            anchor: "x",
            lhs: parse_op("R[1]R[p] - R[p]R[1]", 5, 4).unwrap(),
            rhs: parse_op("2*R[0,1]", 5, 4).unwrap(),
        };
        let rec = check_relation(&h, &rel, &h.t_monomials(14 * h.q()), 14).unwrap();
        assert!(!rec.passed());
        assert_eq!(rec.witness.as_deref(), Some("t2"));
    }
}
