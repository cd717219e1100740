//! Idempotent monads `(E, eta)` on finite categories and the classes `S`, `D` they determine.

use std::collections::BTreeSet;

use super::fractions::{check_fraction_axioms, check_saturation, localize};
use super::{FiniteCategory, MorId, MorphismClass, ObjId};
use crate::error::{Error, Result};
use crate::report::CheckRecord;

/// An endofunctor given by its tables on objects and morphisms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctorData {
    pub objects: Vec<ObjId>,
    pub morphisms: Vec<MorId>,
}

impl FunctorData {
    pub fn identity(c: &FiniteCategory) -> Self {
        FunctorData { objects: (0..c.objects().len()).collect(), morphisms: (0..c.morphisms().len()).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonadData {
    pub functor: FunctorData,
    /// `eta[X]: X -> EX`.
    pub eta: Vec<MorId>,
}

fn record(id: &str, anchor: &str, witness: Option<String>, checked: usize) -> CheckRecord {
    let rec = CheckRecord::new(id, anchor, witness.is_none())
        .expected("holds everywhere")
        .computed(format!("{checked} instances checked"));
    match witness {
        Some(w) => rec.witness(w),
        None => rec,
    }
}

fn well_typed(c: &FiniteCategory, m: &MonadData) -> Option<String> {
    let (no, nm) = (c.objects().len(), c.morphisms().len());
    let e = &m.functor;
    if e.objects.len() != no || e.morphisms.len() != nm || m.eta.len() != no {
        return Some("tables have the wrong length".into());
    }
    if e.objects.iter().any(|&x| x >= no) || e.morphisms.iter().chain(&m.eta).any(|&f| f >= nm) {
        return Some("table entry out of range".into());
    }
    for f in 0..nm {
        let (ef, mf) = (c.mor(e.morphisms[f]), c.mor(f));
        if ef.source != e.objects[mf.source] || ef.target != e.objects[mf.target] {
            return Some(format!("E{} = {} does not run from E{} to E{}", mf.name, ef.name, c.objects()[mf.source], c.objects()[mf.target]));
        }
    }
    for x in 0..no {
        let h = c.mor(m.eta[x]);
        if h.source != x || h.target != e.objects[x] {
            let ex = &c.objects()[e.objects[x]];
            let reason = if c.hom(x, e.objects[x]).is_empty() { format!("no morphism {} -> {ex} exists", c.objects()[x]) } else { format!("{} has the wrong endpoints", h.name) };
            return Some(format!("eta_{}: {reason}", c.objects()[x]));
        }
    }
    None
}

/// Functoriality, naturality, `E eta_X = eta_EX`, and invertibility of that map.
pub fn check_monad(c: &FiniteCategory, m: &MonadData) -> Vec<CheckRecord> {
    let e = &m.functor;
    if let Some(w) = well_typed(c, m) {
        return vec![record("monad.functoriality", "E(gf) = Eg Ef, E1 = 1, eta_X: X -> EX", Some(w), 0)];
    }
    let (no, nm) = (c.objects().len(), c.morphisms().len());

    let mut witness = None;
    let mut checked = 0;
    for x in 0..no {
        checked += 1;
        if e.morphisms[c.id(x)] != c.id(e.objects[x]) {
            witness = Some(format!("E{} is not an identity", c.name(c.id(x))));
            break;
        }
    }
    'functor: for f in 0..nm {
        if witness.is_some() {
            break;
        }
        for g in c.out_of(c.mor(f).target) {
            checked += 1;
            let lhs = e.morphisms[c.compose(g, f)];
            let rhs = c.compose(e.morphisms[g], e.morphisms[f]);
            if lhs != rhs {
                witness = Some(format!("E({} {}) = {} but E{} E{} = {}", c.name(g), c.name(f), c.name(lhs), c.name(g), c.name(f), c.name(rhs)));
                break 'functor;
            }
        }
    }
    let functorial = witness.is_none();
    let mut out = vec![record("monad.functoriality", "E(gf) = Eg Ef, E1 = 1, eta_X: X -> EX", witness, checked)];
    if !functorial {
        return out;
    }

    let mut witness = None;
    for f in 0..nm {
        let (x, y) = (c.mor(f).source, c.mor(f).target);
        let lhs = c.compose(e.morphisms[f], m.eta[x]);
        let rhs = c.compose(m.eta[y], f);
        if lhs != rhs {
            witness = Some(format!("E{} eta_{} = {} but eta_{} {} = {}", c.name(f), c.objects()[x], c.name(lhs), c.objects()[y], c.name(f), c.name(rhs)));
            break;
        }
    }
    out.push(record("monad.naturality", "Ef eta_X = eta_Y f", witness, nm));

    let mut witness = None;
    for x in 0..no {
        let (a, b) = (e.morphisms[m.eta[x]], m.eta[e.objects[x]]);
        if a != b {
            witness = Some(format!("E eta_{} = {} but eta_E{} = {}", c.objects()[x], c.name(a), c.objects()[x], c.name(b)));
            break;
        }
    }
    out.push(record("monad.idempotence", "E eta_X = eta_EX", witness, no));

    let mut witness = None;
    for x in 0..no {
        let f = m.eta[e.objects[x]];
        if !c.is_iso(f) {
            witness = Some(format!("eta_E{} = {} is not invertible", c.objects()[x], c.name(f)));
            break;
        }
    }
    out.push(record("monad.equivalence", "eta_EX: EX -> EEX invertible", witness, no));
    out
}

fn require_monad(c: &FiniteCategory, m: &MonadData) -> Result<()> {
    match check_monad(c, m).into_iter().find(|r| !r.passed()) {
        Some(r) => Err(Error::Precondition(format!("{} fails: {}", r.id, r.witness.unwrap_or_default()))),
        None => Ok(()),
    }
}

/// `S = {f : Ef invertible}` and `D`, computed as `{X : X iso EY}` and as
/// `{X : eta_X invertible}`; the two must agree.
pub fn derive_s_d(c: &FiniteCategory, m: &MonadData) -> Result<(MorphismClass, Vec<ObjId>)> {
    require_monad(c, m)?;
    let e = &m.functor;
    let s = MorphismClass { members: (0..c.morphisms().len()).filter(|&f| c.is_iso(e.morphisms[f])).collect() };
    let no = c.objects().len();
    let by_image: Vec<ObjId> =
        (0..no).filter(|&x| (0..no).any(|y| c.hom(x, e.objects[y]).into_iter().any(|f| c.is_iso(f)))).collect();
    let by_unit: Vec<ObjId> = (0..no).filter(|&x| c.is_iso(m.eta[x])).collect();
    if by_image != by_unit {
        let names = |v: &[ObjId]| v.iter().map(|&x| c.objects()[x].clone()).collect::<Vec<_>>().join(" ");
        return Err(Error::Category(format!(
            "D is {{{}}} as objects iso to some EY but {{{}}} as objects with eta invertible",
            names(&by_image),
            names(&by_unit)
        )));
    }
    Ok((s, by_unit))
}

/// Injectivity and surjectivity of `f^*: [Y, Z] -> [X, Z]`.
fn precompose(c: &FiniteCategory, f: MorId, z: ObjId) -> (bool, bool) {
    let (x, y) = (c.mor(f).source, c.mor(f).target);
    let image: Vec<MorId> = c.hom(y, z).into_iter().map(|g| c.compose(g, f)).collect();
    let distinct: BTreeSet<MorId> = image.iter().copied().collect();
    (distinct.len() == image.len(), distinct.len() == c.hom(x, z).len())
}

fn bijective(c: &FiniteCategory, f: MorId, z: ObjId) -> bool {
    let (i, s) = precompose(c, f, z);
    i && s
}

/// Exhaustive checks of the universal properties of `eta`, of the mutual
/// determination of `S` and `D`, and of the factorization of `E` through `S^-1 C`.
pub fn verify_universal_props(c: &FiniteCategory, m: &MonadData) -> Result<Vec<CheckRecord>> {
    let (s, d) = derive_s_d(c, m)?;
    let e = &m.functor;
    let no = c.objects().len();
    let nm = c.morphisms().len();
    let in_d = |x: ObjId| d.contains(&x);
    let obj = |x: ObjId| c.objects()[x].as_str();
    let mut out = Vec::new();

    let mut witness = None;
    let mut checked = 0;
    'adj: for x in 0..no {
        for &y in &d {
            checked += 1;
            if !bijective(c, m.eta[x], y) {
                witness = Some(format!("eta_{}^*: [E{}, {}] -> [{}, {}] is not bijective", obj(x), obj(x), obj(y), obj(x), obj(y)));
                break 'adj;
            }
        }
    }
    out.push(record("monad.reflection", "eta_X^*: [EX, Y] -> [X, Y] bijective for Y in D", witness, checked));

    let mut witness = None;
    for f in 0..nm {
        let local = d.iter().all(|&z| bijective(c, f, z));
        if local != s.contains(f) {
            witness = Some(format!("{}: in S = {}, f^* bijective on D = {local}", c.name(f), s.contains(f)));
            break;
        }
    }
    out.push(record("monad.s-from-d", "f in S <=> f^*: [Y, Z] -> [X, Z] bijective for all Z in D", witness, nm));

    let mut witness = None;
    for z in 0..no {
        let iso = s.members.iter().all(|&f| bijective(c, f, z));
        let epi = s.members.iter().all(|&f| precompose(c, f, z).1);
        if iso != in_d(z) || epi != in_d(z) {
            witness = Some(format!("{}: in D = {}, all f^* bijective = {iso}, all f^* onto = {epi}", obj(z), in_d(z)));
            break;
        }
    }
    out.push(record("monad.d-from-s", "Z in D <=> f^* bijective (equivalently onto) for all f in S", witness, no));

    // Four characterizations of "f is eta_X up to equivalence".
    let mut witness = None;
    let mut hits = 0;
    for f in 0..nm {
        let (x, y) = (c.mor(f).source, c.mor(f).target);
        let up_to_iso = c.hom(e.objects[x], y).into_iter().any(|u| c.is_iso(u) && c.compose(u, m.eta[x]) == f);
        let s_and_d = s.contains(f) && in_d(y);
        let couniversal = s.contains(f)
            && s.members.iter().filter(|&&t| c.mor(t).source == x).all(|&t| {
                c.hom(c.mor(t).target, y).into_iter().filter(|&h| c.compose(h, t) == f).count() == 1
            });
        let universal = in_d(y)
            && d.iter().all(|&z| c.hom(x, z).into_iter().all(|g| c.hom(y, z).into_iter().filter(|&h| c.compose(h, f) == g).count() == 1));
        let all = [up_to_iso, s_and_d, couniversal, universal];
        hits += usize::from(up_to_iso);
        if all.iter().any(|&b| b != up_to_iso) {
            witness = Some(format!("{}: conditions evaluate to {all:?}", c.name(f)));
            break;
        }
    }
    let note = format!("finite-scale verification only; {hits} morphisms are eta up to equivalence");
    out.push(
        CheckRecord::new("monad.eta-characterizations", "f ~ eta_X <=> f in S, Y in D <=> couniversal in S <=> universal to D", witness.is_none())
            .expected("the four conditions agree on every morphism")
            .computed(format!("{nm} morphisms checked"))
            .witness(match witness {
                Some(w) => format!("{w}; {note}"),
                None => note,
            }),
    );

    let mut sub = check_fraction_axioms(c, &s);
    sub.push(check_saturation(c, &s));
    let failing: Vec<String> = sub.iter().filter(|r| !r.passed()).map(|r| format!("{}: {}", r.id, r.witness.clone().unwrap_or_default())).collect();
    out.push(
        CheckRecord::new("monad.derived-s-axioms", "S closed, Ore, cancellation, gf, hg in S => g in S", failing.is_empty())
            .expected("all pass")
            .computed(if failing.is_empty() { "all pass".to_string() } else { failing.join("; ") }),
    );
    if !failing.is_empty() {
        return Ok(out);
    }

    let loc = localize(c, &s)?;
    let inverted = loc.inverted();
    out.push(
        CheckRecord::new("monad.q-inverts-s", "Qf invertible <=> f in S", inverted == s)
            .expected(format!("{{{}}}", s.names(c).join(", ")))
            .computed(format!("{{{}}}", inverted.names(c).join(", "))),
    );

    out.push(factorization(c, m, &s, &d, &loc));
    Ok(out)
}

/// `U: S^-1 C -> D`, `[(f, s)] -> (Es)^-1 Ef`, is well defined, a functor with
/// `UQ = E`, full, faithful and essentially surjective.
fn factorization(c: &FiniteCategory, m: &MonadData, s: &MorphismClass, d: &[ObjId], loc: &super::Localization) -> CheckRecord {
    let e = &m.functor;
    let l = &loc.category;
    let anchor = "E = I U Q with U: S^-1 C -> D an equivalence";
    let fail = |w: String| CheckRecord::new("monad.factorization", anchor, false).expected("U well defined, UQ = E, full, faithful, essentially surjective").computed("failed").witness(w);

    let mut u = Vec::with_capacity(l.morphisms().len());
    for (k, class) in loc.classes.iter().enumerate() {
        let mut value = None;
        for w in class {
            let es = e.morphisms[w.backward];
            let Some(inv) = c.inverse(es) else {
                return fail(format!("E{} is not invertible although {} is in S", c.name(es), c.name(w.backward)));
            };
            let v = c.compose(inv, e.morphisms[w.forward]);
            match value {
                None => value = Some(v),
                Some(prev) if prev != v => return fail(format!("U is not well defined on {}", l.name(k))),
                _ => {}
            }
        }
        u.push(value.expect("classes are nonempty"));
    }
    for f in 0..c.morphisms().len() {
        if u[loc.q[f]] != e.morphisms[f] {
            return fail(format!("UQ{} = {} but E{} = {}", c.name(f), c.name(u[loc.q[f]]), c.name(f), c.name(e.morphisms[f])));
        }
    }
    for a in 0..l.morphisms().len() {
        for b in l.out_of(l.mor(a).target) {
            if u[l.compose(b, a)] != c.compose(u[b], u[a]) {
                return fail(format!("U({} {}) differs from U{} U{}", l.name(b), l.name(a), l.name(b), l.name(a)));
            }
        }
    }
    let no = c.objects().len();
    for x in 0..no {
        for y in 0..no {
            let image: BTreeSet<MorId> = l.hom(x, y).into_iter().map(|a| u[a]).collect();
            if image.len() != l.hom(x, y).len() {
                return fail(format!("U is not faithful on [{}, {}]", c.objects()[x], c.objects()[y]));
            }
            if image.len() != c.hom(e.objects[x], e.objects[y]).len() {
                return fail(format!("U is not full on [{}, {}]", c.objects()[x], c.objects()[y]));
            }
        }
    }
    for &z in d {
        if !(0..no).any(|x| c.hom(z, e.objects[x]).into_iter().any(|f| c.is_iso(f))) {
            return fail(format!("{} is not isomorphic to any EX", c.objects()[z]));
        }
    }
    CheckRecord::new("monad.factorization", anchor, true)
        .expected("U well defined, UQ = E, full, faithful, essentially surjective")
        .computed(format!("{} morphisms of S^-1 C, |S| = {}, |D| = {}", l.morphisms().len(), s.members.len(), d.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn interval() -> FiniteCategory {
        FiniteCategory::poset(&["a", "b"], &[("a", "b")]).unwrap()
    }

    fn constant_at_b(c: &FiniteCategory) -> MonadData {
        let (ab, idb) = (c.find_mor("a_b").unwrap(), c.id(1));
        MonadData { functor: FunctorData { objects: vec![1, 1], morphisms: vec![idb; 3] }, eta: vec![ab, idb] }
    }

    #[test]
    fn interval_reflection() {
        let c = interval();
        let m = constant_at_b(&c);
        assert!(check_monad(&c, &m).iter().all(CheckRecord::passed));
        let (s, d) = derive_s_d(&c, &m).unwrap();
        assert_eq!(s, c.all_morphisms());
        assert_eq!(d, vec![1]);
        for rec in verify_universal_props(&c, &m).unwrap() {
            assert!(rec.passed(), "{rec:?}");
        }
    }

    #[test]
    fn identity_monad() {
        let c = FiniteCategory::poset(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        let m = MonadData { functor: FunctorData::identity(&c), eta: (0..3).map(|x| c.id(x)).collect() };
        let (s, d) = derive_s_d(&c, &m).unwrap();
        assert_eq!(s, c.isomorphisms());
        assert_eq!(d, vec![0, 1, 2]);
        assert!(verify_universal_props(&c, &m).unwrap().iter().all(CheckRecord::passed));
    }

    #[test]
    fn constant_at_a_is_rejected() {
        let c = interval();
        let ida = c.id(0);
        let m = MonadData { functor: FunctorData { objects: vec![0, 0], morphisms: vec![ida; 3] }, eta: vec![ida, c.id(1)] };
        let recs = check_monad(&c, &m);
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].id, "monad.functoriality");
        assert!(recs[0].witness.as_deref().unwrap().contains("no morphism b -> a"));
        assert!(matches!(verify_universal_props(&c, &m), Err(Error::Precondition(_))));
    }

    #[test]
    fn non_natural_unit() {
        // {1, c0, c1} with c_i g = c_i.
        let c = FiniteCategory::monoid("*", &["1", "c0", "c1"], &|g, f| if g == 0 { f } else { g }).unwrap();
        let m = MonadData { functor: FunctorData::identity(&c), eta: vec![1] };
        let recs = check_monad(&c, &m);
        let nat = recs.iter().find(|r| r.id == "monad.naturality").unwrap();
        assert!(!nat.passed());
        assert!(verify_universal_props(&c, &m).is_err());
    }
}
