//! Cyclic modules over `pi_*(BP)`, matrices of operations between wedges of
//! suspended `BP`s, and the pipelines that evaluate secondary operations on them.
//!
//! Degrees in this module are cohomological and measured in units of `q = 2(p-1)`.

mod ext1;
mod pipelines;

use std::fmt;

pub use ext1::ext1_invariant;
pub use pipelines::{betap_pipeline, gamma1_pipeline, gamma1_pipeline_with, indeterminacy_scan, PipelineReport};

use crate::error::{Error, Result};
use crate::grading::{reduce_mod, Alphabet, Poly, TermIdeal};
use crate::hopf::{parse_op, Hopf, OperationCombo};
use crate::report::CheckRecord;

/// `pi_*(BP)/I` on one generator of a fixed degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicModule {
    pub name: String,
    pub degree: i64,
    pub ideal: TermIdeal,
    /// Other generators of the ambient cohomology, by degree. Used only by the primitivity check.
    pub ambient: Vec<(String, i64)>,
}

impl CyclicModule {
    pub fn new(name: impl Into<String>, degree: i64, ideal: TermIdeal) -> Self {
        CyclicModule { name: name.into(), degree, ideal, ambient: Vec::new() }
    }

    pub fn with_ambient(mut self, name: impl Into<String>, degree: i64) -> Self {
        self.ambient.push((name.into(), degree));
        self
    }

    pub fn element(&self, coeff: &Poly) -> Result<ModuleElement> {
        ModuleElement::new(self.clone(), coeff)
    }

    pub fn zero(&self, alphabet: Alphabet) -> ModuleElement {
        ModuleElement { coeff: Poly::zero(alphabet), home: self.clone() }
    }
}

/// `c * g` with `c` in normal form modulo the ideal of the home module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleElement {
    coeff: Poly,
    home: CyclicModule,
}

fn degree_in_q(d: i64, q: u64) -> Result<i64> {
    if d % q as i64 != 0 {
        return Err(Error::Degree(format!("degree {d} is not a multiple of q = {q}")));
    }
    Ok(d / q as i64)
}

impl ModuleElement {
    pub fn new(home: CyclicModule, coeff: &Poly) -> Result<Self> {
        if !coeff.is_homogeneous() {
            return Err(Error::Degree(format!("inhomogeneous coefficient {coeff} on {}", home.name)));
        }
        let coeff = reduce_mod(coeff, &home.ideal)?;
        Ok(ModuleElement { coeff, home })
    }

    pub fn coeff(&self) -> &Poly {
        &self.coeff
    }

    pub fn home(&self) -> &CyclicModule {
        &self.home
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    /// Generator degree minus coefficient degree; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        let q = self.coeff.alphabet().q();
        self.coeff.homogeneous_degree().map(|d| self.home.degree - (d / q) as i64)
    }
}

impl fmt::Display for ModuleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coeff;
        if c.is_zero() {
            f.write_str("0")
        } else if c.as_constant().is_some_and(|a| num_traits::One::is_one(&a)) {
            f.write_str(&self.home.name)
        } else if c.len() == 1 {
            write!(f, "{c}*{}", self.home.name)
        } else {
            write!(f, "({c})*{}", self.home.name)
        }
    }
}

/// Degree in q-units of a homogeneous combination, `None` for zero.
fn op_degree(op: &OperationCombo) -> Result<Option<i64>> {
    let q = op.coeff_alphabet().q();
    op.degree()?.map(|d| degree_in_q(d, q)).transpose()
}

/// `op(e)`, acting on the coefficient only.
///
/// This is valid when `R_J g = 0` for every `J != 0`, which the grading forces when no
/// generator of the ambient cohomology sits above `g`.
pub fn act(h: &Hopf, op: &OperationCombo, e: &ModuleElement) -> Result<ModuleElement> {
    let Some(d) = op_degree(op)? else {
        return Ok(e.home.zero(h.v_alphabet()));
    };
    let home = &e.home;
    for (name, deg) in &home.ambient {
        if d > 0 && *deg > home.degree {
            return Err(Error::Degree(format!(
                "R_J {} may have a component on {name} in degree {deg}; coefficient action is not justified",
                home.name
            )));
        }
    }
    let out = ModuleElement::new(home.clone(), &h.act(op, &e.coeff)?)?;
    if let (Some(a), Some(b)) = (e.degree(), out.degree()) {
        if b != a + d {
            return Err(Error::Degree(format!("{op} sent degree {a} to {b}")));
        }
    }
    Ok(out)
}

/// Matrix of operations from `V_j S^{source_j} BP` to `V_i S^{target_i} BP`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpMatrix {
    entries: Vec<Vec<OperationCombo>>,
    source: Vec<i64>,
    target: Vec<i64>,
}

impl OpMatrix {
    /// Validated: each nonzero entry `(i, j)` has degree `target_i - source_j`.
    pub fn new(entries: Vec<Vec<OperationCombo>>, source: Vec<i64>, target: Vec<i64>) -> Result<Self> {
        let m = Self::new_unchecked(entries, source, target)?;
        if let Some(defect) = m.degree_defects().into_iter().next() {
            return Err(Error::Degree(defect));
        }
        Ok(m)
    }

    /// Checks only the shape.
    pub fn new_unchecked(entries: Vec<Vec<OperationCombo>>, source: Vec<i64>, target: Vec<i64>) -> Result<Self> {
        if entries.len() != target.len() || entries.iter().any(|row| row.len() != source.len()) {
            return Err(Error::Shape(format!(
                "{} rows for {} targets, {} sources",
                entries.len(),
                target.len(),
                source.len()
            )));
        }
        Ok(OpMatrix { entries, source, target })
    }

    pub fn rows(&self) -> usize {
        self.target.len()
    }

    pub fn cols(&self) -> usize {
        self.source.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &OperationCombo {
        &self.entries[i][j]
    }

    pub fn source(&self) -> &[i64] {
        &self.source
    }

    pub fn target(&self) -> &[i64] {
        &self.target
    }

    /// Entries whose degree disagrees with the declared shifts.
    pub fn degree_defects(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, row) in self.entries.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                let want = self.target[i] - self.source[j];
                match op_degree(a) {
                    Ok(None) => {}
                    Ok(Some(d)) if d == want => {}
                    Ok(Some(d)) => out.push(format!("entry ({}, {}) = {a} has degree {d}q, shifts require {want}q", i + 1, j + 1)),
                    Err(e) => out.push(format!("entry ({}, {}) = {a}: {e}", i + 1, j + 1)),
                }
            }
        }
        out
    }

    /// `self * inner`: apply `inner` first.
    pub fn compose(&self, inner: &OpMatrix) -> Result<OpMatrix> {
        if inner.rows() != self.cols() {
            return Err(Error::Shape(format!("{}x{} after {}x{}", self.rows(), self.cols(), inner.rows(), inner.cols())));
        }
        let alphabet = self.entries.first().and_then(|r| r.first()).map(OperationCombo::coeff_alphabet);
        let alphabet = alphabet.or_else(|| inner.entries.first().and_then(|r| r.first()).map(OperationCombo::coeff_alphabet));
        let Some(alphabet) = alphabet else {
            return OpMatrix::new_unchecked(vec![Vec::new(); self.rows()], inner.source.clone(), self.target.clone());
        };
        let mut entries = Vec::with_capacity(self.rows());
        for row in &self.entries {
            let mut out_row = Vec::with_capacity(inner.cols());
            for l in 0..inner.cols() {
                let mut acc = OperationCombo::zero(alphabet);
                for (j, a) in row.iter().enumerate() {
                    acc = acc.add(&a.compose(&inner.entries[j][l])?);
                }
                out_row.push(acc);
            }
            entries.push(out_row);
        }
        OpMatrix::new_unchecked(entries, inner.source.clone(), self.target.clone())
    }
}

impl fmt::Display for OpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// Applies the matrix to a column vector of elements sharing one home module.
pub fn apply_matrix(h: &Hopf, m: &OpMatrix, v: &[ModuleElement]) -> Result<Vec<ModuleElement>> {
    if v.len() != m.cols() {
        return Err(Error::Shape(format!("matrix with {} columns applied to {} entries", m.cols(), v.len())));
    }
    let Some(home) = v.first().map(|e| e.home.clone()) else {
        return Ok(Vec::new());
    };
    for (j, e) in v.iter().enumerate() {
        if e.home != home {
            return Err(Error::Shape(format!("entries live on {} and {}", home.name, e.home.name)));
        }
        if let Some(d) = e.degree() {
            if d != m.source[j] {
                return Err(Error::Degree(format!("entry {} has degree {d}q, source shift is {}q", j + 1, m.source[j])));
            }
        }
    }
    let mut out = Vec::with_capacity(m.rows());
    for (i, row) in m.entries.iter().enumerate() {
        let mut acc = Poly::zero(h.v_alphabet());
        for (a, e) in row.iter().zip(v) {
            acc += act(h, a, e)?.coeff();
        }
        let y = ModuleElement::new(home.clone(), &acc)?;
        if let Some(d) = y.degree() {
            if d != m.target[i] {
                return Err(Error::Degree(format!("row {} landed in degree {d}q, target shift is {}q", i + 1, m.target[i])));
            }
        }
        out.push(y);
    }
    Ok(out)
}

/// `d_0 = [R_1; R_p]`, `d_1`, `d_2 = [R_p, R_1]` between `BP`, `S^q BP v S^{pq} BP`,
/// `S^{(p+2)q} BP v S^{(2p+1)q} BP` and `S^{(2p+2)q} BP`.
///
/// `d_1 = [[R_pR_1 - 2R_1R_p, R_1^2], [R_p^2, -2R_pR_1 + R_1R_p]]`.
pub fn differentials(h: &Hopf) -> Result<Vec<OpMatrix>> {
    let (p, n) = (h.prime(), h.generators());
    let op = |s: &str| parse_op(s, p, n);
    let pi = p as i64;
    Ok(vec![
        OpMatrix::new(vec![vec![op("R[1]")?], vec![op("R[p]")?]], vec![0], vec![1, pi])?,
        OpMatrix::new(
            vec![
                vec![op("R[p]R[1] - 2*R[1]R[p]")?, op("R[1]^2")?],
                vec![op("R[p]^2")?, op("-2*R[p]R[1] + R[1]R[p]")?],
            ],
            vec![1, pi],
            vec![pi + 2, 2 * pi + 1],
        )?,
        OpMatrix::new(vec![vec![op("R[p]")?, op("R[1]")?]], vec![pi + 2, 2 * pi + 1], vec![2 * pi + 2])?,
    ])
}

/// The same complex with the displayed variant of `d_1`, entries `(1,2) = R_1` and `(2,2) = R_1R_p`.
pub fn printed_differentials(h: &Hopf) -> Result<Vec<OpMatrix>> {
    let (p, n) = (h.prime(), h.generators());
    let op = |s: &str| parse_op(s, p, n);
    let pi = p as i64;
    let mut ds = differentials(h)?;
    ds[1] = OpMatrix::new_unchecked(
        vec![vec![op("R[p]R[1] - 2*R[1]R[p]")?, op("R[1]")?], vec![op("R[p]^2")?, op("R[1]R[p]")?]],
        vec![1, pi],
        vec![pi + 2, 2 * pi + 1],
    )?;
    Ok(ds)
}

/// For consecutive matrices, checks declared degrees and that every entry of
/// `d_{k+1} d_k` pairs to zero with all t-monomials of degree `<= bound_q * q`.
pub fn check_complex(h: &Hopf, mats: &[OpMatrix], bound_q: u64, label: &str) -> Result<Vec<CheckRecord>> {
    let monomials = h.t_monomials(bound_q * h.q());
    let window = format!("all {} t-monomials of degree <= {bound_q}q (q = {})", monomials.len(), h.q());
    let mut out = Vec::new();
    for (k, m) in mats.iter().enumerate() {
        let defects = m.degree_defects();
        out.push(
            CheckRecord::new(format!("{label}.d{k}.degrees"), format!("deg d{k}(i,j) = target_i - source_j"), defects.is_empty())
                .expected("all entries consistent with the shifts")
                .computed(if defects.is_empty() { format!("{m}") } else { defects.join("; ") }),
        );
    }
    for k in 0..mats.len().saturating_sub(1) {
        let comp = mats[k + 1].compose(&mats[k])?;
        let mut witness = None;
        let mut shown = Vec::new();
        for i in 0..comp.rows() {
            for j in 0..comp.cols() {
                let e = comp.entry(i, j);
                shown.push(format!("({}, {}) = {e}", i + 1, j + 1));
                if witness.is_none() {
                    if let Some((t, c)) = h.first_nonzero_pairing(e, &monomials)? {
                        witness = Some(format!("entry ({}, {}) pairs to {c} with {}", i + 1, j + 1, t.format('t')));
                    }
                }
            }
        }
        let mut rec = CheckRecord::new(format!("{label}.d{}d{k}", k + 1), format!("d{}d{k}=0", k + 1), witness.is_none())
            .expected("every entry pairs to 0")
            .computed(shown.join("; "))
            .modulus(&window);
        if let Some(w) = witness {
            rec = rec.witness(w);
        }
        out.push(rec);
    }
    Ok(out)
}

/// `name = coeff * target` between classes of the stated degrees, e.g. `h1 i = v3 gbar1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRelation {
    pub source: String,
    pub source_degree: i64,
    pub coeff: Poly,
    pub target: String,
    pub target_degree: i64,
}

impl ClassRelation {
    pub fn check(&self) -> Result<()> {
        let q = self.coeff.alphabet().q();
        let d = self
            .coeff
            .homogeneous_degree()
            .ok_or_else(|| Error::Degree(format!("coefficient {} of {} is not a nonzero homogeneous term", self.coeff, self.source)))?;
        let implied = self.target_degree - (d / q) as i64;
        if d % q != 0 || implied != self.source_degree {
            return Err(Error::Degree(format!(
                "{} has degree {}q but {}*{} has degree {}",
                self.source,
                self.source_degree,
                self.coeff,
                self.target,
                if d % q == 0 { format!("{implied}q") } else { format!("{}", self.target_degree * q as i64 - d as i64) }
            )));
        }
        Ok(())
    }
}

impl fmt::Display for ClassRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}*{}", self.source, self.coeff, self.target)
    }
}

/// Named relations among the distinguished classes used by one pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSpec {
    pub relations: Vec<ClassRelation>,
}

impl GeneratorSpec {
    fn rel(source: &str, sd: i64, coeff: Poly, target: &str, td: i64) -> ClassRelation {
        ClassRelation { source: source.into(), source_degree: sd, coeff, target: target.into(), target_degree: td }
    }

    /// Self maps of `V(0), V(1), V(2)` and the restrictions along the cofibres used for `gamma_1`.
    pub fn gamma1(h: &Hopf) -> Result<Self> {
        let p = h.prime() as i64;
        let (v1, v2, v3) = (h.v(1)?, h.v(2)?, h.v(3)?);
        Ok(GeneratorSpec {
            relations: vec![
                Self::rel("A*g0", -1, v1.clone(), "g0", 0),
                Self::rel("B*g1", -(p + 1), v2.clone(), "g1", 0),
                Self::rel("C*g2", -(p * p + p + 1), v3.clone(), "g2", 0),
                Self::rel("h1*i", 0, v3, "gbar1", p * p + p + 1),
                Self::rel("g1*i", p * p, v2, "gbar1", p * p + p + 1),
                Self::rel("g0*i", p * p - 1, v1, "gbar0", p * p),
                Self::rel("l*S2i", p * p - 1, h.constant(p), "lbar", p * p - 1),
            ],
        })
    }

    /// Restrictions used for `beta_p`, with `r = p^2 + p - 1`.
    pub fn betap(h: &Hopf) -> Result<Self> {
        let p = h.prime() as i64;
        Ok(GeneratorSpec {
            relations: vec![
                Self::rel("h*i", 0, h.v(2)?.pow(p as u32), "gbar0", p * p + p),
                Self::rel("g0*i", p * p + p - 1, h.v(1)?, "gbar0", p * p + p),
            ],
        })
    }

    pub fn check(&self) -> Result<()> {
        self.relations.iter().try_for_each(ClassRelation::check)
    }

    pub fn get(&self, source: &str) -> Result<&ClassRelation> {
        self.relations
            .iter()
            .find(|r| r.source == source)
            .ok_or_else(|| Error::Precondition(format!("no relation for {source}")))
    }

    /// Copy with the coefficient of one relation replaced.
    pub fn with_coefficient(&self, source: &str, coeff: Poly) -> Result<Self> {
        let mut out = self.clone();
        let rel = out
            .relations
            .iter_mut()
            .find(|r| r.source == source)
            .ok_or_else(|| Error::Precondition(format!("no relation for {source}")))?;
        rel.coeff = coeff;
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::Monomial;

    fn setup(p: u64) -> Hopf {
        Hopf::new(p, 4).unwrap()
    }

    #[test]
    fn coefficient_action_on_cyclic_module() {
        let h = setup(7);
        let m = CyclicModule::new("gbar1", 57, TermIdeal::p_and_v(7, 1));
        let e = m.element(&h.v(3).unwrap()).unwrap();
        let r1 = parse_op("R[1]", 7, 4).unwrap();
        let rp = parse_op("R[p]", 7, 4).unwrap();
        let y = act(&h, &r1, &e).unwrap();
        assert_eq!(y.coeff(), &-&h.v(2).unwrap().pow(7));
        assert_eq!(y.degree(), Some(1));
        assert_eq!(y.to_string(), "-v2^7*gbar1");
        assert!(act(&h, &rp, &e).unwrap().is_zero());
        let id = OperationCombo::identity(h.v_alphabet());
        assert_eq!(act(&h, &id, &e).unwrap(), e);
    }

    #[test]
    fn primitivity_guard() {
        let h = setup(5);
        let m = CyclicModule::new("g", 0, TermIdeal::p_power(5, 1)).with_ambient("k", 3);
        let e = m.element(&h.v(1).unwrap()).unwrap();
        let r1 = parse_op("R[1]", 5, 4).unwrap();
        assert!(matches!(act(&h, &r1, &e), Err(Error::Degree(_))));
    }

    #[test]
    fn elements_reduce_and_keep_degrees() {
        let h = setup(5);
        let m = CyclicModule::new("g", 10, TermIdeal::p_and_v(5, 1));
        let x = &h.v(2).unwrap().scale(&crate::arith::frac(6)) + &h.v(1).unwrap().pow(6);
        let e = m.element(&x).unwrap();
        assert_eq!(e.coeff(), &h.v(2).unwrap());
        assert_eq!(e.degree(), Some(4));
        assert!(m.element(&(&h.v(1).unwrap() + &h.v(2).unwrap())).is_err());
        assert_eq!(m.zero(h.v_alphabet()).degree(), None);
    }

    #[test]
    fn matrix_degrees_are_validated() {
        let h = setup(5);
        for d in differentials(&h).unwrap() {
            assert!(d.degree_defects().is_empty());
        }
        let printed = printed_differentials(&h).unwrap();
        assert_eq!(printed[1].degree_defects().len(), 1);
        let a = h.v_alphabet();
        let bad = OpMatrix::new(vec![vec![parse_op("R[1]", 5, 4).unwrap()]], vec![0], vec![2]);
        assert!(matches!(bad, Err(Error::Degree(_))));
        let shape = OpMatrix::new(vec![vec![OperationCombo::zero(a)]], vec![0, 1], vec![2]);
        assert!(matches!(shape, Err(Error::Shape(_))));
    }

    #[test]
    fn complex_composites_vanish_only_with_corrected_d1() {
        for p in [3u64, 5] {
            let h = setup(p);
            let good = check_complex(&h, &differentials(&h).unwrap(), 2 * p + 4, "c").unwrap();
            assert!(good.iter().all(CheckRecord::passed), "{good:?}");
            let bad = check_complex(&h, &printed_differentials(&h).unwrap(), 2 * p + 4, "c").unwrap();
            let d2d1 = bad.iter().find(|r| r.id == "c.d2d1").unwrap();
            assert!(!d2d1.passed());
            assert!(d2d1.witness.is_some());
            assert!(!bad.iter().find(|r| r.id == "c.d1.degrees").unwrap().passed());
        }
    }

    #[test]
    fn apply_matrix_checks_shape_and_degree() {
        let h = setup(5);
        let ds = differentials(&h).unwrap();
        let m = CyclicModule::new("gbar1", 31, TermIdeal::p_and_v(5, 1));
        let e = m.element(&h.v(3).unwrap()).unwrap();
        let out = apply_matrix(&h, &ds[0], std::slice::from_ref(&e)).unwrap();
        assert_eq!(out[0].coeff(), &-&h.v(2).unwrap().pow(5));
        assert!(out[1].is_zero());
        assert!(matches!(apply_matrix(&h, &ds[1], &[e.clone()]), Err(Error::Shape(_))));
        let shifted = m.element(&h.v(2).unwrap()).unwrap();
        assert!(matches!(apply_matrix(&h, &ds[0], &[shifted]), Err(Error::Degree(_))));
    }

    #[test]
    fn generator_specs_are_degree_consistent() {
        for p in [5u64, 7] {
            let h = setup(p);
            GeneratorSpec::gamma1(&h).unwrap().check().unwrap();
            GeneratorSpec::betap(&h).unwrap().check().unwrap();
            let v3 = h.v(3).unwrap();
            let bad = GeneratorSpec::gamma1(&h).unwrap().with_coefficient("h1*i", v3.pow(2)).unwrap();
            assert!(matches!(bad.check(), Err(Error::Degree(_))));
        }
        let h = setup(5);
        let s = GeneratorSpec::gamma1(&h).unwrap();
        assert_eq!(s.get("g1*i").unwrap().to_string(), "g1*i = v2*gbar1");
        assert_eq!(s.get("g1*i").unwrap().coeff.terms().keys().next(), Some(&Monomial::var(2, 1)));
    }
}
