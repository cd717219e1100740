//! Regression library of small categories, marked classes and monads.

use super::{parse_category_file, FiniteCategory, FunctorData, MonadData, MorphismClass};
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct ClassEntry {
    pub name: &'static str,
    pub category: FiniteCategory,
    pub class: MorphismClass,
    /// Whether the class admits a calculus of fractions.
    pub admits_fractions: bool,
}

#[derive(Debug, Clone)]
pub struct MonadEntry {
    pub name: &'static str,
    pub category: FiniteCategory,
    pub monad: MonadData,
    /// Whether the data is a valid idempotent monad.
    pub valid: bool,
}

const FORK: &str = "\
objects: a b c
mor f : a -> b
mor g : a -> b
mor t : b -> c
mor h : a -> c
compose t f = h
compose t g = h
class S = {id_a, id_b, id_c, t}
";

const INTERVAL_MONAD: &str = "\
objects: a b
mor u : a -> b
functor E a -> b
functor E b -> b
functor E u -> id_b
nat eta a = u
nat eta b = id_b
";

fn chain() -> Result<FiniteCategory> {
    FiniteCategory::poset(&["0", "1", "2"], &[("0", "1"), ("1", "2")])
}

fn interval(a: &str, b: &str) -> Result<FiniteCategory> {
    FiniteCategory::poset(&[a, b], &[(a, b)])
}

fn square() -> Result<FiniteCategory> {
    interval("a", "b")?.product(&interval("c", "d")?)
}

pub fn classes() -> Result<Vec<ClassEntry>> {
    let chain = chain()?;
    let z2 = FiniteCategory::monoid("*", &["1", "x"], &|g, f| (g + f) % 2)?;
    let z3 = FiniteCategory::monoid("*", &["0", "1", "2"], &|g, f| (g + f) % 3)?;
    let fork = parse_category_file(FORK)?;
    let sq = square()?;
    let span = FiniteCategory::poset(&["0", "1", "2"], &[("0", "1"), ("0", "2")])?;
    let entry = |name, category: &FiniteCategory, class, admits_fractions| ClassEntry { name, category: category.clone(), class, admits_fractions };
    Ok(vec![
        entry("chain, all arrows", &chain, chain.all_morphisms(), true),
        entry("chain, 0 -> 1", &chain, MorphismClass::from_names(&chain, &["0_1"])?.with_identities(&chain), true),
        entry("chain, identities", &chain, chain.identities(), true),
        entry("Z/2, all arrows", &z2, z2.all_morphisms(), true),
        entry("Z/3, identities", &z3, z3.identities(), true),
        entry("fork, t", &fork.category, fork.class("S")?.clone(), true),
        entry("square, vertical arrows", &sq, MorphismClass::from_names(&sq, &["id_a.c_d", "id_b.c_d"])?.with_identities(&sq), true),
        entry("span, 0 -> 1", &span, MorphismClass::from_names(&span, &["0_1"])?.with_identities(&span), false),
    ])
}

pub fn monads() -> Result<Vec<MonadEntry>> {
    let interval_file = parse_category_file(INTERVAL_MONAD)?;
    let chain = chain()?;
    let identity = MonadData { functor: FunctorData::identity(&chain), eta: (0..3).map(|x| chain.id(x)).collect() };

    // Collapse the second factor of [a -> b] x [c -> d] onto d.
    let sq = square()?;
    let obj = |n: &str| sq.find_object(n);
    let m = |n: &str| sq.find_mor(n);
    let collapse = MonadData {
        functor: FunctorData {
            objects: vec![obj("a.d")?, obj("a.d")?, obj("b.d")?, obj("b.d")?],
            morphisms: sq
                .morphisms()
                .iter()
                .map(|f| {
                    let first = if sq.objects()[f.source].starts_with('a') && sq.objects()[f.target].starts_with('b') { "a_b.id_d" } else if sq.objects()[f.source].starts_with('a') { "id_a.d" } else { "id_b.d" };
                    m(first)
                })
                .collect::<Result<_>>()?,
        },
        eta: vec![m("id_a.c_d")?, m("id_a.d")?, m("id_b.c_d")?, m("id_b.d")?],
    };

    let interval = interval("a", "b")?;
    let constant_a = MonadData { functor: FunctorData { objects: vec![0, 0], morphisms: vec![interval.id(0); 3] }, eta: vec![interval.id(0), interval.id(1)] };
    let idempotent = FiniteCategory::monoid("*", &["1", "e"], &|g, f| g.max(f))?;
    let left_zero = FiniteCategory::monoid("*", &["1", "c0", "c1"], &|g, f| if g == 0 { f } else { g })?;

    Ok(vec![
        MonadEntry { name: "interval, constant at b", monad: interval_file.monad("E", "eta")?, category: interval_file.category, valid: true },
        MonadEntry { name: "identity", category: chain, monad: identity, valid: true },
        MonadEntry { name: "square, collapse second factor", category: sq, monad: collapse, valid: true },
        MonadEntry { name: "interval, constant at a", category: interval, monad: constant_a, valid: false },
        MonadEntry {
            name: "idempotent e, unit e",
            monad: MonadData { functor: FunctorData::identity(&idempotent), eta: vec![1] },
            category: idempotent,
            valid: false,
        },
        MonadEntry {
            name: "constant maps, unit c0",
            monad: MonadData { functor: FunctorData::identity(&left_zero), eta: vec![1] },
            category: left_zero,
            valid: false,
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catfrac::{check_fraction_axioms, check_monad, derive_s_d, localize, verify_universal_props, zigzag_oracle};

    #[test]
    fn library_matches_oracle() {
        let lib = classes().unwrap();
        assert!(lib.len() >= 6);
        for e in &lib {
            let ok = check_fraction_axioms(&e.category, &e.class).iter().all(|r| r.passed());
            assert_eq!(ok, e.admits_fractions, "{}", e.name);
            if !ok {
                continue;
            }
            let loc = localize(&e.category, &e.class).unwrap();
            let n = e.category.objects().len();
            for x in 0..n {
                for y in 0..n {
                    assert_eq!(zigzag_oracle(&e.category, &e.class, x, y).unwrap(), loc.hom_classes(x, y), "{}: {x} -> {y}", e.name);
                }
            }
        }
    }

    #[test]
    fn fork_identifies_parallel_arrows() {
        let lib = classes().unwrap();
        let fork = lib.iter().find(|e| e.name.starts_with("fork")).unwrap();
        let loc = localize(&fork.category, &fork.class).unwrap();
        let (a, b) = (fork.category.find_object("a").unwrap(), fork.category.find_object("b").unwrap());
        assert_eq!(fork.category.hom(a, b).len(), 2);
        assert_eq!(loc.category.hom(a, b).len(), 1);
    }

    #[test]
    fn monad_library() {
        for e in monads().unwrap() {
            let ok = check_monad(&e.category, &e.monad).iter().all(|r| r.passed());
            assert_eq!(ok, e.valid, "{}", e.name);
            if ok {
                for rec in verify_universal_props(&e.category, &e.monad).unwrap() {
                    assert!(rec.passed(), "{}: {rec:?}", e.name);
                }
            } else {
                assert!(verify_universal_props(&e.category, &e.monad).is_err());
            }
        }
    }

    #[test]
    fn collapse_monad_recovers_vertical_class() {
        let lib = monads().unwrap();
        let e = lib.iter().find(|e| e.name.starts_with("square")).unwrap();
        let (s, d) = derive_s_d(&e.category, &e.monad).unwrap();
        let expected = MorphismClass::from_names(&e.category, &["id_a.c_d", "id_b.c_d"]).unwrap().with_identities(&e.category);
        assert_eq!(s, expected);
        let names: Vec<&str> = d.iter().map(|&x| e.category.objects()[x].as_str()).collect();
        assert_eq!(names, ["a.d", "b.d"]);
    }
}
