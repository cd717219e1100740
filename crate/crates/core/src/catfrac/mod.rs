//! Finite categories, classes of morphisms, categories of fractions, and idempotent monads.

mod fractions;
pub mod library;
mod monad;
mod parse;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

pub use fractions::{check_fraction_axioms, check_saturation, localize, zigzag_oracle, HomClasses, Localization, ShortWord};
pub use monad::{check_monad, derive_s_d, verify_universal_props, FunctorData, MonadData};
pub use parse::{parse_category_file, CategoryFile};

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mor {
    pub name: String,
    pub source: ObjId,
    pub target: ObjId,
}

/// A category with finitely many objects and morphisms and a total composition table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<String>,
    mors: Vec<Mor>,
    ids: Vec<MorId>,
    /// `table[g][f] = g f` when `target f = source g`.
    table: Vec<Vec<Option<MorId>>>,
}

fn cat_err(msg: impl Into<String>) -> Error {
    Error::Category(msg.into())
}

impl FiniteCategory {
    /// Builds and validates: endpoints, identities, closure and associativity.
    pub fn from_parts(
        objects: Vec<String>,
        mors: Vec<Mor>,
        ids: Vec<MorId>,
        compose: &dyn Fn(MorId, MorId) -> Option<MorId>,
    ) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for o in &objects {
            if !seen.insert(o.clone()) {
                return Err(cat_err(format!("duplicate object {o}")));
            }
        }
        let mut seen = BTreeSet::new();
        for m in &mors {
            if !seen.insert(m.name.clone()) {
                return Err(cat_err(format!("duplicate morphism {}", m.name)));
            }
            if m.source >= objects.len() || m.target >= objects.len() {
                return Err(cat_err(format!("morphism {} has an unknown endpoint", m.name)));
            }
        }
        if ids.len() != objects.len() {
            return Err(cat_err("one identity per object is required"));
        }
        for (x, &i) in ids.iter().enumerate() {
            if i >= mors.len() || mors[i].source != x || mors[i].target != x {
                return Err(cat_err(format!("identity of {} is not an endomorphism of it", objects[x])));
            }
        }
        let n = mors.len();
        let mut table = vec![vec![None; n]; n];
        for g in 0..n {
            for f in 0..n {
                if mors[f].target != mors[g].source {
                    continue;
                }
                let h = compose(g, f).ok_or_else(|| cat_err(format!("composite {} {} is undefined", mors[g].name, mors[f].name)))?;
                if h >= n || mors[h].source != mors[f].source || mors[h].target != mors[g].target {
                    return Err(cat_err(format!("composite {} {} has the wrong endpoints", mors[g].name, mors[f].name)));
                }
                table[g][f] = Some(h);
            }
        }
        let c = FiniteCategory { objects, mors, ids, table };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        for f in 0..self.mors.len() {
            let (s, t) = (self.mors[f].source, self.mors[f].target);
            if self.compose(self.ids[t], f) != f || self.compose(f, self.ids[s]) != f {
                return Err(cat_err(format!("identities are not neutral on {}", self.mors[f].name)));
            }
        }
        for f in 0..self.mors.len() {
            for g in self.out_of(self.mors[f].target) {
                let gf = self.compose(g, f);
                for h in self.out_of(self.mors[g].target) {
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f) {
                        return Err(cat_err(format!(
                            "composition is not associative on ({}, {}, {})",
                            self.mors[h].name, self.mors[g].name, self.mors[f].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The poset on `names` generated by the relations `a <= b`, one morphism `a_b` per pair.
    pub fn poset(names: &[&str], relations: &[(&str, &str)]) -> Result<Self> {
        let n = names.len();
        let idx = |s: &str| names.iter().position(|x| *x == s).ok_or_else(|| cat_err(format!("unknown object {s}")));
        let mut le = vec![vec![false; n]; n];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in relations {
            le[idx(a)?][idx(b)?] = true;
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if le[i][k] && le[k][j] {
                        le[i][j] = true;
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] {
                    return Err(cat_err(format!("{} and {} are identified; not a poset", names[i], names[j])));
                }
            }
        }
        let mut mors = Vec::new();
        let mut ids = vec![0; n];
        let mut at = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                if le[i][j] {
                    let name = if i == j { format!("id_{}", names[i]) } else { format!("{}_{}", names[i], names[j]) };
                    if i == j {
                        ids[i] = mors.len();
                    }
                    at.insert((i, j), mors.len());
                    mors.push(Mor { name, source: i, target: j });
                }
            }
        }
        let objects = names.iter().map(|s| s.to_string()).collect();
        let m2 = mors.clone();
        Self::from_parts(objects, mors, ids, &|g, f| at.get(&(m2[f].source, m2[g].target)).copied())
    }

    /// One-object category on a monoid; element 0 must be the unit.
    pub fn monoid(object: &str, elements: &[&str], mul: &dyn Fn(usize, usize) -> usize) -> Result<Self> {
        let mors = elements.iter().map(|e| Mor { name: e.to_string(), source: 0, target: 0 }).collect();
        Self::from_parts(vec![object.to_string()], mors, vec![0], &|g, f| Some(mul(g, f)))
    }

    /// Product category; objects `x.y`, morphisms `f.g`.
    pub fn product(&self, other: &FiniteCategory) -> Result<Self> {
        let m2 = other.mors.len();
        let mut objects = Vec::new();
        for a in &self.objects {
            for b in &other.objects {
                objects.push(format!("{a}.{b}"));
            }
        }
        let no = other.objects.len();
        let ids: Vec<MorId> = (0..objects.len()).map(|o| self.ids[o / no] * m2 + other.ids[o % no]).collect();
        let mut mors = Vec::new();
        for f in &self.mors {
            for g in &other.mors {
                let (source, target) = (f.source * no + g.source, f.target * no + g.target);
                let name = if ids[source] == mors.len() { format!("id_{}", objects[source]) } else { format!("{}.{}", f.name, g.name) };
                mors.push(Mor { name, source, target });
            }
        }
        Self::from_parts(objects, mors, ids, &|g, f| {
            let a = self.table[g / m2][f / m2]?;
            let b = other.table[g % m2][f % m2]?;
            Some(a * m2 + b)
        })
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Mor] {
        &self.mors
    }

    pub fn mor(&self, f: MorId) -> &Mor {
        &self.mors[f]
    }

    pub fn name(&self, f: MorId) -> &str {
        &self.mors[f].name
    }

    pub fn id(&self, x: ObjId) -> MorId {
        self.ids[x]
    }

    pub fn is_identity(&self, f: MorId) -> bool {
        self.ids[self.mors[f].source] == f
    }

    /// `g f`; panics unless composable.
    pub fn compose(&self, g: MorId, f: MorId) -> MorId {
        self.table[g][f].expect("composable morphisms")
    }

    pub fn try_compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.table[g][f]
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> Vec<MorId> {
        (0..self.mors.len()).filter(|&f| self.mors[f].source == x && self.mors[f].target == y).collect()
    }

    pub fn out_of(&self, x: ObjId) -> Vec<MorId> {
        (0..self.mors.len()).filter(|&f| self.mors[f].source == x).collect()
    }

    pub fn into_obj(&self, y: ObjId) -> Vec<MorId> {
        (0..self.mors.len()).filter(|&f| self.mors[f].target == y).collect()
    }

    pub fn inverse(&self, f: MorId) -> Option<MorId> {
        let m = &self.mors[f];
        self.hom(m.target, m.source)
            .into_iter()
            .find(|&g| self.compose(g, f) == self.ids[m.source] && self.compose(f, g) == self.ids[m.target])
    }

    pub fn is_iso(&self, f: MorId) -> bool {
        self.inverse(f).is_some()
    }

    pub fn find_object(&self, name: &str) -> Result<ObjId> {
        self.objects.iter().position(|o| o == name).ok_or_else(|| cat_err(format!("unknown object {name}")))
    }

    pub fn find_mor(&self, name: &str) -> Result<MorId> {
        self.mors.iter().position(|m| m.name == name).ok_or_else(|| cat_err(format!("unknown morphism {name}")))
    }

    pub fn all_morphisms(&self) -> MorphismClass {
        MorphismClass { members: (0..self.mors.len()).collect() }
    }

    pub fn identities(&self) -> MorphismClass {
        MorphismClass { members: self.ids.iter().copied().collect() }
    }

    pub fn isomorphisms(&self) -> MorphismClass {
        MorphismClass { members: (0..self.mors.len()).filter(|&f| self.is_iso(f)).collect() }
    }

    /// Text in the category file format.
    pub fn to_text(&self) -> String {
        let mut out = format!("objects: {}\n", self.objects.join(" "));
        for (f, m) in self.mors.iter().enumerate() {
            if !self.is_identity(f) {
                let _ = writeln!(out, "mor {} : {} -> {}", m.name, self.objects[m.source], self.objects[m.target]);
            }
        }
        for g in 0..self.mors.len() {
            for f in 0..self.mors.len() {
                if self.is_identity(f) || self.is_identity(g) {
                    continue;
                }
                if let Some(h) = self.table[g][f] {
                    let _ = writeln!(out, "compose {} {} = {}", self.mors[g].name, self.mors[f].name, self.mors[h].name);
                }
            }
        }
        out
    }
}

/// A set of morphisms of one category.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MorphismClass {
    pub members: BTreeSet<MorId>,
}

impl MorphismClass {
    pub fn new(c: &FiniteCategory, members: impl IntoIterator<Item = MorId>) -> Result<Self> {
        let members: BTreeSet<MorId> = members.into_iter().collect();
        if let Some(&m) = members.iter().find(|&&m| m >= c.mors.len()) {
            return Err(cat_err(format!("morphism id {m} is out of range")));
        }
        Ok(MorphismClass { members })
    }

    pub fn from_names(c: &FiniteCategory, names: &[&str]) -> Result<Self> {
        let ids = names.iter().map(|n| c.find_mor(n)).collect::<Result<Vec<_>>>()?;
        Self::new(c, ids)
    }

    /// The class together with all identities.
    pub fn with_identities(mut self, c: &FiniteCategory) -> Self {
        self.members.extend(c.ids.iter().copied());
        self
    }

    pub fn contains(&self, f: MorId) -> bool {
        self.members.contains(&f)
    }

    pub fn names(&self, c: &FiniteCategory) -> Vec<String> {
        self.members.iter().map(|&f| c.name(f).to_string()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poset_and_monoid_construction() {
        let c = FiniteCategory::poset(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        assert_eq!(c.morphisms().len(), 6);
        let f = c.find_mor("0_1").unwrap();
        let g = c.find_mor("1_2").unwrap();
        assert_eq!(c.name(c.compose(g, f)), "0_2");
        assert!(!c.is_iso(f));
        assert!(FiniteCategory::poset(&["a", "b"], &[("a", "b"), ("b", "a")]).is_err());

        let z2 = FiniteCategory::monoid("*", &["1", "x"], &|a, b| (a + b) % 2).unwrap();
        assert!(z2.is_iso(1));
        assert_eq!(z2.inverse(1), Some(1));
    }

    #[test]
    fn validation_rejects_bad_tables() {
        // Not associative: a "monoid" with x*y defined as subtraction mod 3.
        let r = FiniteCategory::monoid("*", &["0", "1", "2"], &|a, b| (a + 3 - b) % 3);
        assert!(r.is_err());
        let objects = vec!["a".to_string()];
        let mors = vec![Mor { name: "id".into(), source: 0, target: 0 }, Mor { name: "e".into(), source: 0, target: 0 }];
        assert!(FiniteCategory::from_parts(objects.clone(), mors.clone(), vec![0], &|g, f| if g == 0 { Some(f) } else if f == 0 { Some(g) } else { None }).is_err());
        // Identity that is not neutral.
        assert!(FiniteCategory::from_parts(objects, mors, vec![0], &|_, _| Some(1)).is_err());
    }

    #[test]
    fn product_of_intervals() {
        let i = FiniteCategory::poset(&["a", "b"], &[("a", "b")]).unwrap();
        let j = FiniteCategory::poset(&["c", "d"], &[("c", "d")]).unwrap();
        let p = i.product(&j).unwrap();
        assert_eq!(p.objects().len(), 4);
        assert_eq!(p.morphisms().len(), 9);
        let x = p.find_object("a.c").unwrap();
        let y = p.find_object("b.d").unwrap();
        assert_eq!(p.hom(x, y).len(), 1);
        assert!(p.is_identity(p.id(x)));
    }

    #[test]
    fn text_round_trip() {
        let c = FiniteCategory::poset(&["0", "1", "2"], &[("0", "1"), ("1", "2")]).unwrap();
        let back = parse_category_file(&c.to_text()).unwrap();
        assert_eq!(back.category.morphisms().len(), c.morphisms().len());
        for f in 0..c.morphisms().len() {
            for g in 0..c.morphisms().len() {
                let (bf, bg) = (back.category.find_mor(c.name(f)).unwrap(), back.category.find_mor(c.name(g)).unwrap());
                let want = c.try_compose(g, f).map(|h| c.name(h).to_string());
                let got = back.category.try_compose(bg, bf).map(|h| back.category.name(h).to_string());
                assert_eq!(want, got);
            }
        }
    }
}
