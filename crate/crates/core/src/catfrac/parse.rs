//! The category description format.
//!
//! ```text
//! objects: a b c
//! mor f : a -> b
//! compose g f = h
//! class S = {f, g}
//! functor E a -> b
//! functor E f -> id_b
//! nat eta a = f
//! ```
//!
//! Identities `id_x` are created for every object. Every composable pair of
//! non-identity morphisms needs a `compose` line.

use std::collections::{BTreeMap, HashMap};

use super::{FiniteCategory, FunctorData, Mor, MonadData, MorId, MorphismClass, ObjId};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct CategoryFile {
    pub category: FiniteCategory,
    pub classes: BTreeMap<String, MorphismClass>,
    pub functors: BTreeMap<String, FunctorData>,
    pub nats: BTreeMap<String, Vec<MorId>>,
}

impl CategoryFile {
    pub fn class(&self, name: &str) -> Result<&MorphismClass> {
        self.classes.get(name).ok_or_else(|| Error::Category(format!("no class named {name}")))
    }

    pub fn monad(&self, functor: &str, nat: &str) -> Result<MonadData> {
        let e = self.functors.get(functor).ok_or_else(|| Error::Category(format!("no functor named {functor}")))?;
        let eta = self.nats.get(nat).ok_or_else(|| Error::Category(format!("no transformation named {nat}")))?;
        Ok(MonadData { functor: e.clone(), eta: eta.clone() })
    }
}

fn perr(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

fn ident(s: &str, line: usize) -> Result<String> {
    let ok = !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || "_.'-^".contains(c));
    if ok && s != "->" {
        Ok(s.to_string())
    } else {
        Err(perr(line, format!("bad name {s:?}")))
    }
}

enum FunctorLine {
    Map(String, String),
}

pub fn parse_category_file(text: &str) -> Result<CategoryFile> {
    let mut objects: Vec<String> = Vec::new();
    let mut mors: Vec<(String, String, String, usize)> = Vec::new();
    let mut compose: Vec<(String, String, String, usize)> = Vec::new();
    let mut classes: Vec<(String, Vec<String>, usize)> = Vec::new();
    let mut functors: BTreeMap<String, Vec<(FunctorLine, usize)>> = BTreeMap::new();
    let mut nats: BTreeMap<String, Vec<(String, String, usize)>> = BTreeMap::new();

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        if let Some(rest) = s.strip_prefix("objects:") {
            if !objects.is_empty() {
                return Err(perr(line, "objects declared twice"));
            }
            objects = rest.split_whitespace().map(|o| ident(o, line)).collect::<Result<_>>()?;
            continue;
        }
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            ["mor", f, ":", a, "->", b] => mors.push((ident(f, line)?, ident(a, line)?, ident(b, line)?, line)),
            ["compose", g, f, "=", h] => compose.push((ident(g, line)?, ident(f, line)?, ident(h, line)?, line)),
            ["class", name, "=", ..] => {
                let body = s.split_once('=').map(|x| x.1.trim()).unwrap_or("");
                let inner = body
                    .strip_prefix('{')
                    .and_then(|b| b.strip_suffix('}'))
                    .ok_or_else(|| perr(line, "class body must be {f, g, ...}"))?;
                let members = inner
                    .split(',')
                    .map(str::trim)
                    .filter(|m| !m.is_empty())
                    .map(|m| ident(m, line))
                    .collect::<Result<Vec<_>>>()?;
                classes.push((ident(name, line)?, members, line));
            }
            ["functor", name, x, "->", y] => {
                functors.entry(ident(name, line)?).or_default().push((FunctorLine::Map(ident(x, line)?, ident(y, line)?), line))
            }
            ["nat", name, x, "=", f] => nats.entry(ident(name, line)?).or_default().push((ident(x, line)?, ident(f, line)?, line)),
            _ => return Err(perr(line, format!("unrecognized line {s:?}"))),
        }
    }
    if objects.is_empty() {
        return Err(Error::Parse("no objects declared".into()));
    }

    let obj_index: HashMap<String, ObjId> = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
    let obj = |name: &str, line: usize| obj_index.get(name).copied().ok_or_else(|| perr(line, format!("unknown object {name}")));
    let mut all: Vec<Mor> = objects.iter().enumerate().map(|(i, o)| Mor { name: format!("id_{o}"), source: i, target: i }).collect();
    let ids: Vec<MorId> = (0..objects.len()).collect();
    for (f, a, b, line) in &mors {
        all.push(Mor { name: f.clone(), source: obj(a, *line)?, target: obj(b, *line)? });
    }
    let mor_index: HashMap<String, MorId> = all.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
    if mor_index.len() != all.len() {
        return Err(Error::Parse("duplicate morphism name".into()));
    }
    let mor = |name: &str, line: usize| mor_index.get(name).copied().ok_or_else(|| perr(line, format!("unknown morphism {name}")));

    let mut table: HashMap<(MorId, MorId), MorId> = HashMap::new();
    for (g, f, h, line) in &compose {
        let key = (mor(g, *line)?, mor(f, *line)?);
        let h = mor(h, *line)?;
        if all[key.1].target != all[key.0].source {
            return Err(perr(*line, format!("{g} and {f} are not composable")));
        }
        if let Some(prev) = table.insert(key, h) {
            if prev != h {
                return Err(perr(*line, format!("conflicting composite for {g} {f}")));
            }
        }
    }
    let is_id = |m: MorId| m < objects.len();
    for (&(g, f), &h) in &table {
        let implied = if is_id(g) { Some(f) } else if is_id(f) { Some(g) } else { None };
        if implied.is_some_and(|x| x != h) {
            return Err(Error::Category(format!("composite {} {} contradicts the identity law", all[g].name, all[f].name)));
        }
    }
    let category = FiniteCategory::from_parts(objects.clone(), all.clone(), ids, &|g, f| {
        if is_id(g) {
            Some(f)
        } else if is_id(f) {
            Some(g)
        } else {
            table.get(&(g, f)).copied()
        }
    })?;

    let mut class_map = BTreeMap::new();
    for (name, members, line) in classes {
        let ids = members.iter().map(|m| mor(m, line)).collect::<Result<Vec<_>>>()?;
        if class_map.insert(name.clone(), MorphismClass::new(&category, ids)?).is_some() {
            return Err(perr(line, format!("class {name} declared twice")));
        }
    }

    let mut functor_map = BTreeMap::new();
    for (name, lines) in functors {
        let mut on_obj: Vec<Option<ObjId>> = vec![None; objects.len()];
        let mut on_mor: Vec<Option<MorId>> = vec![None; all.len()];
        for (FunctorLine::Map(x, y), line) in &lines {
            if let Some(&o) = obj_index.get(x.as_str()) {
                on_obj[o] = Some(obj(y, *line)?);
            } else {
                on_mor[mor(x, *line)?] = Some(mor(y, *line)?);
            }
        }
        let objs = on_obj
            .iter()
            .enumerate()
            .map(|(i, o)| o.ok_or_else(|| Error::Category(format!("functor {name} does not map object {}", objects[i]))))
            .collect::<Result<Vec<_>>>()?;
        let ms = on_mor
            .iter()
            .enumerate()
            .map(|(i, m)| match m {
                Some(m) => Ok(*m),
                None if is_id(i) => Ok(objs[i]),
                None => Err(Error::Category(format!("functor {name} does not map morphism {}", all[i].name))),
            })
            .collect::<Result<Vec<_>>>()?;
        functor_map.insert(name, FunctorData { objects: objs, morphisms: ms });
    }

    let mut nat_map = BTreeMap::new();
    for (name, lines) in nats {
        let mut comps: Vec<Option<MorId>> = vec![None; objects.len()];
        for (x, f, line) in &lines {
            comps[obj(x, *line)?] = Some(mor(f, *line)?);
        }
        let comps = comps
            .iter()
            .enumerate()
            .map(|(i, c)| c.ok_or_else(|| Error::Category(format!("transformation {name} has no component at {}", objects[i]))))
            .collect::<Result<Vec<_>>>()?;
        nat_map.insert(name, comps);
    }

    Ok(CategoryFile { category, classes: class_map, functors: functor_map, nats: nat_map })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FORK: &str = "
        # two parallel arrows equalized by t
        objects: a b c
        mor f : a -> b
        mor g : a -> b
        mor t : b -> c
        mor h : a -> c
        compose t f = h
        compose t g = h
        class S = {t, id_a, id_b, id_c}
    ";

    #[test]
    fn parses_fork() {
        let file = parse_category_file(FORK).unwrap();
        let c = &file.category;
        assert_eq!(c.objects().len(), 3);
        assert_eq!(c.morphisms().len(), 7);
        assert_eq!(file.class("S").unwrap().members.len(), 4);
    }

    #[test]
    fn rejects_partial_table() {
        let partial = FORK.replace("compose t g = h", "");
        assert!(matches!(parse_category_file(&partial), Err(Error::Category(_))));
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(parse_category_file("objects: a\nmor f a -> a"), Err(Error::Parse(_))));
        assert!(matches!(parse_category_file("objects: a\nclass S = f"), Err(Error::Parse(_))));
        assert!(matches!(parse_category_file("mor f : a -> a"), Err(Error::Parse(_))));
        assert!(matches!(parse_category_file("objects: a\nmor f : a -> b"), Err(Error::Parse(_))));
        assert!(matches!(parse_category_file("objects: a\ncompose id_a id_a = x"), Err(Error::Parse(_))));
    }

    #[test]
    fn functor_and_transformation() {
        let text = "objects: a b\nmor u : a -> b\nfunctor E a -> b\nfunctor E b -> b\nfunctor E u -> id_b\nnat eta a = u\nnat eta b = id_b\n";
        let file = parse_category_file(text).unwrap();
        let m = file.monad("E", "eta").unwrap();
        assert_eq!(m.functor.objects, vec![1, 1]);
        assert_eq!(m.eta, vec![2, 1]);
        let missing = "objects: a b\nmor u : a -> b\nfunctor E a -> b\n";
        assert!(parse_category_file(missing).is_err());
    }
}
