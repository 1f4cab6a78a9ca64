//! Lattice expressions such as `U^3 + E8(-1)^2 + <-4>`.
//!
//! ```text
//! expr := term ("+" term)*
//! term := atom ("^" nat)?
//! atom := NAME ("(" int ")")? | "<" int ">" | "gram[" row (";" row)* "]"
//! row  := int ("," int)*
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use quadlat_core::catalog::named_lattice;
use quadlat_core::matrix::IntMatrix;
use quadlat_core::Lattice;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub terms: Vec<Term>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub atom: Atom,
    /// `None` when no exponent was written.
    pub power: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Named { name: String, scale: Option<BigInt> },
    RankOne(BigInt),
    Gram(Vec<Vec<BigInt>>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: expected {}", expected.join(" or "))]
pub struct ParseError {
    pub offset: usize,
    pub expected: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("{0}")]
    Lattice(#[from] quadlat_core::Error),
}

/// Whether `name` is a builtin: `U`, `A1`..`A24`, `D4`..`D24`, `E6`, `E7`, `E8`, `E6v`.
pub fn is_builtin(name: &str) -> bool {
    let indexed = |prefix: &str, lo: u32, hi: u32| {
        name.strip_prefix(prefix)
            .filter(|r| !r.is_empty() && !r.starts_with('0') && r.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|r| r.parse::<u32>().ok())
            .is_some_and(|k| (lo..=hi).contains(&k))
    };
    matches!(name, "U" | "E6" | "E7" | "E8" | "E6v") || indexed("A", 1, 24) || indexed("D", 4, 24)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn fail<T>(&mut self, expected: &[&str]) -> Result<T, ParseError> {
        self.skip_ws();
        Err(ParseError { offset: self.pos, expected: expected.iter().map(|s| s.to_string()).collect() })
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.fail(&[&format!("'{}'", c as char)])
        }
    }

    fn int(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.src.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        let digits = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == digits {
            self.pos = start;
            return self.fail(&["integer"]);
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(text.parse().unwrap())
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<u32>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => {
                self.pos = start;
                self.fail(&["positive exponent"])
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat(b'+') {
            terms.push(self.term()?);
        }
        Ok(Expr { terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let atom = self.atom()?;
        let power = if self.eat(b'^') { Some(self.nat()?) } else { None };
        Ok(Term { atom, power })
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        match self.peek() {
            Some(b'<') => {
                self.pos += 1;
                self.skip_ws();
                let start = self.pos;
                let q = self.int()?;
                if q.is_zero() {
                    self.pos = start;
                    return self.fail(&["nonzero integer"]);
                }
                self.expect(b'>')?;
                Ok(Atom::RankOne(q))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
                if name == "gram" {
                    return self.gram();
                }
                if !is_builtin(&name) {
                    self.pos = start;
                    return self.fail(&["lattice name"]);
                }
                let scale = if self.eat(b'(') {
                    let s = self.int()?;
                    self.expect(b')')?;
                    Some(s)
                } else {
                    None
                };
                Ok(Atom::Named { name, scale })
            }
            _ => self.fail(&["lattice name", "'<'", "'gram['"]),
        }
    }

    fn gram(&mut self) -> Result<Atom, ParseError> {
        self.expect(b'[')?;
        let start = self.pos;
        let mut rows = vec![self.row()?];
        while self.eat(b';') {
            rows.push(self.row()?);
        }
        self.expect(b']')?;
        let n = rows.len();
        let symmetric = rows.iter().all(|r| r.len() == n) && (0..n).all(|i| (0..i).all(|j| rows[i][j] == rows[j][i]));
        if !symmetric {
            self.pos = start;
            return self.fail(&["square symmetric matrix"]);
        }
        Ok(Atom::Gram(rows))
    }

    fn row(&mut self) -> Result<Vec<BigInt>, ParseError> {
        let mut row = vec![self.int()?];
        while self.eat(b',') {
            row.push(self.int()?);
        }
        Ok(row)
    }
}

pub fn parse_lattice_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    if p.peek().is_some() {
        return p.fail(&["'+'", "'^'", "end of input"]);
    }
    Ok(e)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::Named { name, scale: None } => write!(f, "{name}"),
            Atom::Named { name, scale: Some(s) } => write!(f, "{name}({s})"),
            Atom::RankOne(q) => write!(f, "<{q}>"),
            Atom::Gram(rows) => {
                let rows: Vec<String> =
                    rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")).collect();
                write!(f, "gram[{}]", rows.join(";"))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            Some(k) => write!(f, "{}^{k}", self.atom),
            None => write!(f, "{}", self.atom),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self.terms.iter().map(|t| t.to_string()).collect();
        write!(f, "{}", terms.join(" + "))
    }
}

impl Atom {
    pub fn eval(&self) -> Result<Lattice, quadlat_core::Error> {
        match self {
            Atom::Named { name, scale } => {
                if name == "E6v" {
                    return named_lattice("e6v", Some(scale.as_ref().unwrap_or(&BigInt::from(1))), None);
                }
                named_lattice(name, scale.as_ref(), None)
            }
            Atom::RankOne(q) => Lattice::rank_one(q.clone()),
            Atom::Gram(rows) => Lattice::new(IntMatrix::from_rows(rows.clone())?),
        }
    }
}

impl Term {
    pub fn eval(&self) -> Result<Lattice, quadlat_core::Error> {
        Ok(self.atom.eval()?.power(self.power.unwrap_or(1) as usize))
    }
}

impl Expr {
    pub fn eval(&self) -> Result<Lattice, quadlat_core::Error> {
        let mut out = Lattice::zero();
        for t in &self.terms {
            out = out.direct_sum(&t.eval()?);
        }
        Ok(out)
    }

    /// Whether some term is an unscaled `U` (or `U(±1)`).
    pub fn has_u_term(&self) -> bool {
        self.terms.iter().any(|t| match &t.atom {
            Atom::Named { name, scale } => name == "U" && scale.as_ref().is_none_or(|s| s.abs() == BigInt::from(1)),
            _ => false,
        })
    }

    /// Coordinates at which each term's block starts in the evaluated lattice.
    pub fn offsets(&self) -> Result<Vec<usize>, quadlat_core::Error> {
        let mut at = 0;
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            out.push(at);
            at += t.eval()?.rank();
        }
        Ok(out)
    }
}

pub fn eval_str(text: &str) -> Result<(Expr, Lattice), EvalError> {
    let e = parse_lattice_expr(text)?;
    let l = e.eval()?;
    Ok((e, l))
}
