//! Literals for co-operations (`v1*t1^2 + t2`), tensors (`t1^2(x)t2`) and
//! operations (`R[1]R[p] - R[p]R[1]`, `2*R[p^2]`, `R[0,1]`).

use num_bigint::BigInt;
use num_traits::Zero;

use super::{OperationCombo, TPoly, TensorPoly};
use crate::arith::{frac, Fraction};
use crate::error::{Error, Result};
use crate::grading::{Alphabet, Monomial, Poly, Tag};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Gen(char, usize),
    Op(Vec<u32>),
    Tensor,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

fn lex(s: &str, prime: u64) -> Result<Vec<Tok>> {
    let err = |what: String| Error::Parse(format!("{what} in '{s}'"));
    let b = s.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    let digits = |i: &mut usize| -> Option<BigInt> {
        let start = *i;
        while *i < b.len() && b[*i].is_ascii_digit() {
            *i += 1;
        }
        (start < *i).then(|| s[start..*i].parse().expect("digits"))
    };
    while i < b.len() {
        match b[i] {
            b' ' | b'\t' | b'\n' => i += 1,
            b'+' => {
                out.push(Tok::Plus);
                i += 1
            }
            b'-' => {
                out.push(Tok::Minus);
                i += 1
            }
            b'*' => {
                out.push(Tok::Star);
                i += 1
            }
            b'/' => {
                out.push(Tok::Slash);
                i += 1
            }
            b'^' => {
                out.push(Tok::Caret);
                i += 1
            }
            b'(' if s[i..].starts_with("(x)") => {
                out.push(Tok::Tensor);
                i += 3
            }
            b'0'..=b'9' => out.push(Tok::Num(digits(&mut i).expect("digit"))),
            c @ (b'v' | b't') => {
                i += 1;
                let idx = digits(&mut i).ok_or_else(|| err(format!("generator '{}' needs an index", c as char)))?;
                let idx = usize::try_from(idx).map_err(|_| err("index too large".into()))?;
                if idx == 0 {
                    return Err(err("generator indices start at 1".into()));
                }
                out.push(Tok::Gen(c as char, idx));
            }
            b'R' => {
                i += 1;
                if b.get(i) != Some(&b'[') {
                    return Err(err("expected '[' after R".into()));
                }
                i += 1;
                let close = s[i..].find(']').ok_or_else(|| err("unclosed '['".into()))? + i;
                let mut entries = Vec::new();
                for part in s[i..close].split(',') {
                    entries.push(index_entry(part.trim(), prime).map_err(|e| err(e))?);
                }
                out.push(Tok::Op(entries));
                i = close + 1;
            }
            c => return Err(err(format!("unexpected character '{}'", c as char))),
        }
    }
    Ok(out)
}

/// `7`, `p`, `p^2` or `3p`.
fn index_entry(part: &str, prime: u64) -> std::result::Result<u32, String> {
    let bad = || format!("bad operation index entry '{part}'");
    let value: u64 = if let Some(rest) = part.strip_suffix('p') {
        let k: u64 = if rest.is_empty() { 1 } else { rest.parse().map_err(|_| bad())? };
        k.checked_mul(prime).ok_or_else(bad)?
    } else if let Some(e) = part.strip_prefix("p^") {
        prime.checked_pow(e.parse().map_err(|_| bad())?).ok_or_else(bad)?
    } else {
        part.parse().map_err(|_| bad())?
    };
    u32::try_from(value).map_err(|_| bad())
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

enum Factor {
    Coeff(Fraction),
    Gen(char, usize, u32),
    Op(Vec<u32>, u32),
    Tensor,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in '{}'", self.pos, self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn exponent(&mut self) -> Result<u32> {
        if self.peek() != Some(&Tok::Caret) {
            return Ok(1);
        }
        self.pos += 1;
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                u32::try_from(n).map_err(|_| self.err("exponent too large"))
            }
            _ => Err(self.err("expected an exponent")),
        }
    }

    fn factor(&mut self) -> Result<Factor> {
        let tok = self.toks.get(self.pos).cloned();
        self.pos += 1;
        match tok {
            Some(Tok::Num(n)) => {
                let mut c = Fraction::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.toks.get(self.pos).cloned() {
                        Some(Tok::Num(d)) if !d.is_zero() => {
                            self.pos += 1;
                            c /= Fraction::from_integer(d);
                        }
                        _ => return Err(self.err("expected a nonzero denominator")),
                    }
                }
                Ok(Factor::Coeff(c))
            }
            Some(Tok::Gen(c, i)) => Ok(Factor::Gen(c, i, self.exponent()?)),
            Some(Tok::Op(e)) => Ok(Factor::Op(e, self.exponent()?)),
            Some(Tok::Tensor) => Ok(Factor::Tensor),
            _ => {
                self.pos -= 1;
                Err(self.err("expected a factor"))
            }
        }
    }

    /// Signed terms, each a list of factors. Operations may be juxtaposed without `*`.
    fn terms(&mut self) -> Result<Vec<(bool, Vec<Factor>)>> {
        if self.toks.is_empty() {
            return Err(Error::Parse("empty literal".into()));
        }
        let mut out = Vec::new();
        let mut neg = match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                true
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        loop {
            let mut fs = vec![self.factor()?];
            loop {
                match self.peek() {
                    Some(Tok::Star) => {
                        self.pos += 1;
                        fs.push(self.factor()?);
                    }
                    Some(Tok::Tensor) => {
                        self.pos += 1;
                        fs.push(Factor::Tensor);
                        fs.push(self.factor()?);
                    }
                    Some(Tok::Op(_)) if matches!(fs.last(), Some(Factor::Op(..))) => fs.push(self.factor()?),
                    _ => break,
                }
            }
            out.push((neg, fs));
            match self.peek() {
                None => return Ok(out),
                Some(Tok::Plus) => neg = false,
                Some(Tok::Minus) => neg = true,
                _ => return Err(self.err("expected '+' or '-'")),
            }
            self.pos += 1;
        }
    }
}

fn parse(s: &str, prime: u64) -> Result<Vec<(bool, Vec<Factor>)>> {
    let mut p = Parser { toks: lex(s, prime)?, pos: 0, src: s };
    p.terms()
}

fn bump(exps: &mut Vec<u32>, i: usize, e: u32) {
    if exps.len() < i {
        exps.resize(i, 0);
    }
    exps[i - 1] += e;
}

/// Parses `sum c * t^J (x) t^K`; v-generators must precede the tensor sign.
pub fn parse_tensor(s: &str, prime: u64, generators: usize) -> Result<TensorPoly> {
    let v = Alphabet::new(Tag::V, generators, prime)?;
    let t = v.with_tag(Tag::T);
    let mut out = TensorPoly::zero(v);
    for (neg, fs) in parse(s, prime)? {
        let mut c = frac(if neg { -1 } else { 1 });
        let (mut ve, mut le, mut re) = (Vec::new(), Vec::new(), Vec::new());
        let mut right = false;
        for f in fs {
            match f {
                Factor::Coeff(a) => c *= a,
                Factor::Gen('v', _, _) if right => {
                    return Err(Error::Parse(format!("coefficients belong to the left factor in '{s}'")))
                }
                Factor::Gen('v', i, e) => bump(&mut ve, i, e),
                Factor::Gen(_, i, e) => bump(if right { &mut re } else { &mut le }, i, e),
                Factor::Tensor if right => return Err(Error::Parse(format!("more than one tensor sign in '{s}'"))),
                Factor::Tensor => right = true,
                Factor::Op(..) => return Err(Error::Parse(format!("operation in a tensor literal '{s}'"))),
            }
        }
        let coeff = Poly::from_terms(v, [(Monomial::from_exponents(&ve), c)])?;
        let (l, r) = (Monomial::from_exponents(&le), Monomial::from_exponents(&re));
        for m in [&l, &r] {
            if m.max_index() > generators {
                t.check_index(m.max_index())?;
            }
        }
        out.add_term((l, r), coeff);
    }
    Ok(out)
}

/// Parses `sum c * t^J` with v-polynomial coefficients.
pub fn parse_tpoly(s: &str, prime: u64, generators: usize) -> Result<TPoly> {
    let x = parse_tensor(s, prime, generators)?;
    let mut out = TPoly::zero(x.coeff_alphabet());
    for ((l, r), c) in x.terms() {
        if !r.is_one() {
            return Err(Error::Parse(format!("unexpected tensor sign in '{s}'")));
        }
        out.add_term(l.clone(), c.clone());
    }
    Ok(out)
}

/// Parses a combination of operation words with v-polynomial coefficients on the left.
pub fn parse_op(s: &str, prime: u64, generators: usize) -> Result<OperationCombo> {
    let v = Alphabet::new(Tag::V, generators, prime)?;
    let mut out = OperationCombo::zero(v);
    for (neg, fs) in parse(s, prime)? {
        let mut c = frac(if neg { -1 } else { 1 });
        let mut ve = Vec::new();
        let mut word = Vec::new();
        for f in fs {
            match f {
                Factor::Coeff(a) => c *= a,
                Factor::Gen('v', _, _) if !word.is_empty() => {
                    return Err(Error::Parse(format!("coefficients must precede operations in '{s}'")))
                }
                Factor::Gen('v', i, e) => bump(&mut ve, i, e),
                Factor::Op(entries, e) => {
                    if entries.len() > generators {
                        return Err(Error::Truncation { index: entries.len(), limit: generators });
                    }
                    for _ in 0..e {
                        word.push(Monomial::from_exponents(&entries));
                    }
                }
                _ => return Err(Error::Parse(format!("unexpected factor in operation literal '{s}'"))),
            }
        }
        out.add_term(word, Poly::from_terms(v, [(Monomial::from_exponents(&ve), c)])?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operation_literals() {
        let a = parse_op("R[1]R[p] - R[p]R[1]", 7, 4).unwrap();
        assert_eq!(a.to_string(), "R[1]R[7] - R[7]R[1]");
        let b = parse_op("R[p]*R[1]^2 - 2*R[1]*R[p]*R[1] + R[1]^2*R[p]", 5, 4).unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(parse_op("R[p^2]", 5, 4).unwrap().to_string(), "R[25]");
        assert_eq!(parse_op("v1*R[0,1]", 5, 4).unwrap().to_string(), "(v1)*R[0,1]");
        assert_eq!(parse_op("R[0]", 5, 4).unwrap().to_string(), "R[0]");
        assert_eq!(parse_op("R[2p]", 3, 4).unwrap().to_string(), "R[6]");
        assert_eq!(parse_op("R[1]R[p] - R[p]R[1]", 7, 4).unwrap().to_string(), a.to_string());
    }

    #[test]
    fn operation_literal_errors() {
        for bad in ["", "R", "R[", "R[q]", "R[1] R[", "R[1]v1", "t1", "R[1] +"] {
            assert!(parse_op(bad, 7, 4).is_err(), "{bad}");
        }
        assert!(matches!(parse_op("R[0,0,0,0,1]", 7, 4), Err(Error::Truncation { .. })));
    }

    #[test]
    fn tensor_literals() {
        let x = parse_tensor("t1(x)1 + 1(x)t1", 7, 4).unwrap();
        assert_eq!(x.to_string(), "t1(x)1 + 1(x)t1");
        let y = parse_tensor("-v1*t1(x)t1^6 + t1^2(x)t2", 7, 4).unwrap();
        assert_eq!(y.len(), 2);
        assert!(parse_tensor("t1(x)v1", 7, 4).is_err());
        assert!(parse_tensor("t1(x)t1(x)t1", 7, 4).is_err());
        assert!(parse_tensor("t5(x)1", 7, 4).is_err());
        let z = parse_tpoly("v3*t2 + 2", 7, 4).unwrap();
        assert_eq!(z.to_string(), "v3*t2 + 2");
        assert!(parse_tpoly("t1(x)t1", 7, 4).is_err());
    }
}
