//! Text input for polynomials and scalars.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := ['+'|'-'] term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | atom ['^' integer]
//! atom   := integer | variable | 'sqrt' '(' expr ')' | '(' expr ')'
//! ```
//!
//! Division and `sqrt` only accept constant operands. A square root that does
//! not exist in the current tower adjoins a new generator; one [`PolyParser`]
//! shares its tower across every string it parses.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::field::{FieldElement, TowerRef};
use super::poly::{HomoPoly, Vars};
use crate::error::{Error, Result};

pub const GRAMMAR: &str = "\
polynomial := ['+'|'-'] term (('+'|'-') term)*
term       := factor (('*'|'/') factor)*
factor     := '-' factor | atom ['^' integer]
atom       := integer | variable | sqrt(expr) | (expr)
division and sqrt take constant operands only; every term must have the same degree
examples:  x^2+y^2+z^2-t^2    sqrt(2)/2*u*v^5 - 1/2*v^6    (1+sqrt(3))*x*t";

type Sparse = BTreeMap<Vec<u32>, FieldElement>;

/// Parser state shared across inputs so that radicals land in one tower.
#[derive(Clone, Debug, Default)]
pub struct PolyParser {
    tower: TowerRef,
}

impl PolyParser {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn tower(&self) -> &TowerRef {
        &self.tower
    }

    pub fn parse_poly(&mut self, text: &str, vars: &Vars) -> Result<HomoPoly> {
        let sparse = self.parse_sparse(text, vars)?;
        HomoPoly::from_terms(vars, sparse)
    }

    /// Parse a constant expression such as `-3/4*sqrt(2)`.
    pub fn parse_scalar(&mut self, text: &str) -> Result<FieldElement> {
        let vars = Vars::new::<&str>(&[]);
        let sparse = self.parse_sparse(text, &vars)?;
        Ok(sparse.into_values().next().unwrap_or_else(FieldElement::zero))
    }

    fn parse_sparse(&mut self, text: &str, vars: &Vars) -> Result<Sparse> {
        let mut p = Cursor { src: text.as_bytes(), pos: 0, vars, nvars: vars.len(), ctx: self };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected character"));
        }
        Ok(out)
    }

    /// Square root in the shared tower, adjoining a generator if needed.
    pub fn sqrt(&mut self, c: &FieldElement) -> FieldElement {
        let c = &FieldElement::zero_in(&self.tower) + c;
        let s = c.sqrt_or_extend();
        if s.depth() > self.tower.as_ref().map_or(0, |t| t.depth()) {
            self.tower = s.tower().clone();
        }
        s
    }
}

/// Parse with a fresh tower.
pub fn parse_poly(text: &str, vars: &Vars) -> Result<HomoPoly> {
    PolyParser::new().parse_poly(text, vars)
}

pub fn parse_scalar(text: &str) -> Result<FieldElement> {
    PolyParser::new().parse_scalar(text)
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a Vars,
    nvars: usize,
    ctx: &'a mut PolyParser,
}

fn constant(n: usize, c: FieldElement) -> Sparse {
    let mut m = Sparse::new();
    if !c.is_zero() {
        m.insert(vec![0; n], c);
    }
    m
}

fn add_into(acc: &mut Sparse, other: Sparse, sign: bool) {
    for (e, c) in other {
        let entry = acc.entry(e).or_insert_with(FieldElement::zero);
        *entry = if sign { &*entry + &c } else { &*entry - &c };
    }
    acc.retain(|_, c| !c.is_zero());
}

fn mul(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (e1, c1) in a {
        for (e2, c2) in b {
            let e: Vec<u32> = e1.iter().zip(e2).map(|(x, y)| x + y).collect();
            let entry = out.entry(e).or_insert_with(FieldElement::zero);
            *entry = &*entry + &(c1 * c2);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

impl Cursor<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, ch: u8) -> Result<()> {
        if self.peek() == Some(ch) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", ch as char)))
        }
    }

    fn expr(&mut self) -> Result<Sparse> {
        let mut acc = Sparse::new();
        let mut sign = true;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                self.pos += 1;
                sign = false;
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            add_into(&mut acc, t, sign);
            match self.peek() {
                Some(b'+') => sign = true,
                Some(b'-') => sign = false,
                _ => return Ok(acc),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Sparse> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = mul(&acc, &f);
                }
                Some(b'/') => {
                    self.pos += 1;
                    let at = self.pos;
                    let f = self.factor()?;
                    let c = self.as_constant(&f, at, "division by a non-constant")?;
                    let inv = c.inv().map_err(|_| Error::Syntax { pos: at, msg: "division by zero".into() })?;
                    acc = mul(&acc, &constant(self.nvars, inv));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn as_constant(&self, p: &Sparse, at: usize, msg: &str) -> Result<FieldElement> {
        match p.len() {
            0 => Ok(FieldElement::zero()),
            1 => {
                let (e, c) = p.iter().next().unwrap();
                if e.iter().all(|&k| k == 0) {
                    Ok(c.clone())
                } else {
                    Err(Error::Syntax { pos: at, msg: msg.into() })
                }
            }
            _ => Err(Error::Syntax { pos: at, msg: msg.into() }),
        }
    }

    fn factor(&mut self) -> Result<Sparse> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let f = self.factor()?;
            return Ok(mul(&f, &constant(self.nvars, FieldElement::from_int(-1))));
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k: u32 = k.try_into().map_err(|_| self.err("exponent too large"))?;
            let mut acc = constant(self.nvars, FieldElement::one());
            for _ in 0..k {
                acc = mul(&acc, &base);
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(s.parse().unwrap())
    }

    fn atom(&mut self) -> Result<Sparse> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(constant(self.nvars, FieldElement::from_rational(BigRational::from_integer(n))))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if let Some(i) = self.vars.index(name) {
                    let mut e = vec![0; self.nvars];
                    e[i] = 1;
                    let mut m = Sparse::new();
                    m.insert(e, FieldElement::one());
                    return Ok(m);
                }
                if name == "sqrt" {
                    self.expect(b'(')?;
                    let at = self.pos;
                    let inner = self.expr()?;
                    self.expect(b')')?;
                    let c = self.as_constant(&inner, at, "sqrt of a non-constant")?;
                    let s = self.ctx.sqrt(&c);
                    return Ok(constant(self.nvars, s));
                }
                Err(Error::UnknownVariable { name: name.to_string(), pos: start })
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }
}
