//! Polynomial literals such as `-2*v2^4 + 1/7*v1*v3`.

use num_bigint::BigInt;

use super::{Alphabet, Monomial, Poly, Tag};
use crate::arith::{frac, Fraction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(BigInt),
    Gen(Tag, usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
}

pub(crate) fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |i: &mut usize| -> String {
        let start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        chars[start..*i].iter().collect()
    };
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' | '\n' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1
            }
            '*' => {
                out.push(Tok::Star);
                i += 1
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1
            }
            '^' => {
                out.push(Tok::Caret);
                i += 1
            }
            '0'..='9' => {
                let d = digits(&mut i);
                out.push(Tok::Num(d.parse().expect("digits")));
            }
            'v' | 'm' | 't' => {
                i += 1;
                let d = digits(&mut i);
                if d.is_empty() {
                    return Err(Error::Parse(format!("generator '{c}' needs an index in '{s}'")));
                }
                let idx: usize = d.parse().map_err(|_| Error::Parse(format!("index too large in '{s}'")))?;
                if idx == 0 {
                    return Err(Error::Parse(format!("generator indices start at 1 in '{s}'")));
                }
                let tag = match c {
                    'v' => Tag::V,
                    'm' => Tag::M,
                    _ => Tag::T,
                };
                out.push(Tok::Gen(tag, idx));
            }
            _ => return Err(Error::Parse(format!("unexpected character '{c}' in '{s}'"))),
        }
    }
    Ok(out)
}

/// One monomial term: coefficient, alphabet tag if any generator appeared, exponents.
pub(crate) struct RawTerm {
    pub coeff: Fraction,
    pub tag: Option<Tag>,
    pub exps: Vec<u32>,
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} in '{}'", self.pos, self.src))
    }

    fn number(&mut self) -> Result<BigInt> {
        match self.toks.get(self.pos) {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(n.clone())
            }
            _ => Err(self.err("expected a number")),
        }
    }

    fn factor(&mut self, term: &mut RawTerm) -> Result<()> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                let mut c = Fraction::from_integer(n);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    let d = self.number()?;
                    if d == BigInt::from(0) {
                        return Err(self.err("zero denominator"));
                    }
                    c /= Fraction::from_integer(d);
                }
                term.coeff *= c;
                Ok(())
            }
            Some(Tok::Gen(tag, idx)) => {
                self.pos += 1;
                match term.tag {
                    Some(t) if t != tag => return Err(self.err("mixed alphabets")),
                    _ => term.tag = Some(tag),
                }
                let mut e = 1u32;
                if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    e = u32::try_from(self.number()?).map_err(|_| self.err("exponent too large"))?;
                }
                if term.exps.len() < idx {
                    term.exps.resize(idx, 0);
                }
                term.exps[idx - 1] += e;
                Ok(())
            }
            _ => Err(self.err("expected a coefficient or generator")),
        }
    }

    fn term(&mut self) -> Result<RawTerm> {
        let mut t = RawTerm { coeff: frac(1), tag: None, exps: Vec::new() };
        self.factor(&mut t)?;
        while self.peek() == Some(&Tok::Star) {
            self.pos += 1;
            self.factor(&mut t)?;
        }
        Ok(t)
    }

    fn sum(&mut self) -> Result<Vec<RawTerm>> {
        let mut out = Vec::new();
        let mut sign = 1;
        match self.peek() {
            Some(Tok::Minus) => {
                sign = -1;
                self.pos += 1
            }
            Some(Tok::Plus) => self.pos += 1,
            _ => {}
        }
        loop {
            let mut t = self.term()?;
            if sign < 0 {
                t.coeff = -t.coeff;
            }
            out.push(t);
            match self.peek() {
                Some(Tok::Plus) => sign = 1,
                Some(Tok::Minus) => sign = -1,
                None => return Ok(out),
                _ => return Err(self.err("expected '+' or '-'")),
            }
            self.pos += 1;
        }
    }
}

pub(crate) fn parse_terms(s: &str) -> Result<Vec<RawTerm>> {
    let toks = tokenize(s)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial literal".into()));
    }
    let mut p = Parser { toks: &toks, pos: 0, src: s };
    p.sum()
}

/// Parses a polynomial over one alphabet; constants default to the v-alphabet.
pub fn parse_poly(s: &str, prime: u64, generators: usize) -> Result<Poly> {
    let terms = parse_terms(s)?;
    let mut tag = None;
    for t in &terms {
        if let Some(tt) = t.tag {
            if tag.is_some_and(|x| x != tt) {
                return Err(Error::Parse(format!("mixed alphabets in '{s}'")));
            }
            tag = Some(tt);
        }
    }
    let alphabet = Alphabet::new(tag.unwrap_or(Tag::V), generators, prime)?;
    Poly::from_terms(alphabet, terms.into_iter().map(|t| (Monomial::from_exponents(&t.exps), t.coeff)))
}
