//! Parser for the expression grammar shared by the CLI and file inputs.
//!
//! Grammar, loosest binding first:
//!   expr    := `['-'] term (('+' | '-') term)*`
//!   term    := factor (('*')? factor)*        (juxtaposition multiplies)
//!   factor  := atom ('^' integer)*
//!   atom    := integer | variable | 'a' | '(' expr ')'
//!            | `'[' expr (',' expr)+ ']'`
//! Variables are `y<k>`, `z<k>`, or the parity-generic `x<k>`; brackets build
//! left-normed commutators; integer coefficients reduce mod p; `a` is the
//! extension-field generator (only in GF(p^n) with n >= 2).

use crate::field::FieldSpec;
use crate::freealg::{left_normed_polys, FreePolynomial, Variable};
use crate::grassmann::{BasisMonomial, GrassmannAlgebra, GrassmannElement};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("parse error at position {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FieldSpec,
}

pub fn parse_polynomial(src: &str, field: &FieldSpec) -> Result<FreePolynomial, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        field,
    };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<FreePolynomial, ParseError> {
        let mut acc = if self.eat(b'-') {
            self.term()?.neg(self.field)
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?, self.field);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?, self.field);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FreePolynomial, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = acc.mul(&self.factor()?, self.field);
                continue;
            }
            // Juxtaposition: another factor starts right here.
            match self.peek() {
                Some(c)
                    if c.is_ascii_digit()
                        || c == b'('
                        || c == b'['
                        || matches!(c, b'y' | b'z' | b'x' | b'a') =>
                {
                    acc = acc.mul(&self.factor()?, self.field);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<FreePolynomial, ParseError> {
        let mut acc = self.atom()?;
        while self.eat(b'^') {
            let e = self.integer()?;
            if e > 10_000 {
                return Err(self.err("exponent too large"));
            }
            acc = acc.pow(e as u32, self.field);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<FreePolynomial, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(FreePolynomial::scalar(self.field.element(v as i64)))
            }
            Some(b'y') | Some(b'z') | Some(b'x') => {
                let kind = self.src[self.pos];
                self.pos += 1;
                let idx = self.integer()?;
                if idx == 0 || idx > 1_000_000 {
                    return Err(self.err("variable index out of range"));
                }
                self.skip_ws();
                let v = match kind {
                    b'y' => Variable::y(idx as u32),
                    b'z' => Variable::z(idx as u32),
                    _ => Variable::x(idx as u32),
                };
                Ok(FreePolynomial::var(v, self.field))
            }
            Some(b'a') => {
                self.pos += 1;
                self.skip_ws();
                if self.field.n() < 2 {
                    return Err(self.err("extension generator `a` needs GF(p^n) with n >= 2"));
                }
                Ok(FreePolynomial::scalar(self.field.generator()))
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            Some(b'[') => {
                self.pos += 1;
                self.skip_ws();
                let mut entries = vec![self.expr()?];
                while self.eat(b',') {
                    entries.push(self.expr()?);
                }
                if !self.eat(b']') {
                    return Err(self.err("expected ']' or ','"));
                }
                if entries.len() < 2 {
                    return Err(self.err("commutator needs at least two entries"));
                }
                left_normed_polys(&entries, self.field)
                    .map_err(|e| self.err(&e.to_string()))
            }
            _ => Err(self.err("expected a term")),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        let v = s.parse().map_err(|_| self.err("integer too large"))?;
        self.skip_ws();
        Ok(v)
    }
}

// ---------------------------------------------------------------------------
// Grassmann element expressions ("2*e1e2 + e3"), used by witness replay.
// ---------------------------------------------------------------------------

struct ElementParser<'a> {
    src: &'a [u8],
    pos: usize,
    alg: &'a GrassmannAlgebra,
}

/// Parse the element text form: sums/differences of optionally scaled
/// blades like `2*e1e2 + e3`, with `(...)` grouping, `a` the extension
/// generator, and juxtaposition for products.
pub fn parse_element(src: &str, alg: &GrassmannAlgebra) -> Result<GrassmannElement, ParseError> {
    let mut p = ElementParser { src: src.as_bytes(), pos: 0, alg };
    p.skip_ws();
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(ParseError { pos: p.pos, msg: "unexpected trailing input".to_string() });
    }
    Ok(e)
}

impl<'a> ElementParser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            self.skip_ws();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<GrassmannElement, ParseError> {
        let mut acc = if self.eat(b'-') {
            self.alg.neg(&self.term()?)
        } else {
            self.term()?
        };
        loop {
            if self.eat(b'+') {
                acc = self.alg.add(&acc, &self.term()?);
            } else if self.eat(b'-') {
                acc = self.alg.sub(&acc, &self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GrassmannElement, ParseError> {
        let mut acc = self.atom()?;
        loop {
            if self.eat(b'*') {
                acc = self.alg.mul(&acc, &self.atom()?);
                continue;
            }
            match self.peek() {
                Some(c) if c.is_ascii_digit() || c == b'(' || c == b'e' || c == b'a' => {
                    acc = self.alg.mul(&acc, &self.atom()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn atom(&mut self) -> Result<GrassmannElement, ParseError> {
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let v = self.integer()?;
                Ok(self.alg.scalar(self.alg.field().element(v as i64)))
            }
            Some(b'a') => {
                self.pos += 1;
                self.skip_ws();
                if self.alg.field().n() < 2 {
                    return Err(self.err("extension generator `a` needs n >= 2"));
                }
                Ok(self.alg.scalar(self.alg.field().generator()))
            }
            Some(b'e') => {
                let mut indices = Vec::new();
                while self.peek() == Some(b'e') {
                    self.pos += 1;
                    let i = self.integer_no_ws()?;
                    indices.push(i as u32);
                }
                self.skip_ws();
                let blade = BasisMonomial::from_indices(&indices)
                    .map_err(|e| self.err(&e.to_string()))?;
                if blade.max_index() > self.alg.n_gens() {
                    return Err(self.err("generator index beyond the truncation"));
                }
                Ok(self.alg.monomial(blade, self.alg.field().one()))
            }
            Some(b'(') => {
                self.pos += 1;
                self.skip_ws();
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("expected a coefficient or a blade")),
        }
    }

    fn integer(&mut self) -> Result<u64, ParseError> {
        let v = self.integer_no_ws()?;
        self.skip_ws();
        Ok(v)
    }

    fn integer_no_ws(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse().map_err(|_| self.err("integer too large"))
    }
}
