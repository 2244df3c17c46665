//! Polynomially bounded unary functions on the naturals.
//!
//! Every game is parametrized by such functions: string lengths, oracle
//! budgets, copy bounds of exponentials. Expressions are built from the
//! identity, the ceiling base-2 logarithm and constants, closed under `+`,
//! `*` and composition.
//!
//! Text syntax: `id`, `lg`, integer literals, `+`, `*`, `@` (composition,
//! `p @ q` is `n ↦ p(q(n))`) and parentheses. `@` binds tighter than `*`,
//! which binds tighter than `+`.

use alloc::boxed::Box;
use alloc::string::String;
use core::fmt;
use core::ops::{Add, Mul};
use core::str::FromStr;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Poly {
    Id,
    CeilLog2,
    Const(u64),
    Add(Box<Poly>, Box<Poly>),
    Mul(Box<Poly>, Box<Poly>),
    /// `Compose(outer, inner)` evaluates `outer(inner(n))`.
    Compose(Box<Poly>, Box<Poly>),
}

/// `⌈log2 n⌉`, with `0` and `1` both mapped to `0`.
#[inline]
pub fn ceil_lg(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(64 - (n - 1).leading_zeros())
    }
}

impl Poly {
    pub fn id() -> Self {
        Poly::Id
    }

    pub fn lg() -> Self {
        Poly::CeilLog2
    }

    pub fn constant(c: u64) -> Self {
        Poly::Const(c)
    }

    /// `self ∘ inner`.
    pub fn compose(self, inner: Poly) -> Self {
        Poly::Compose(Box::new(self), Box::new(inner))
    }

    /// Evaluates at `n`. Arithmetic saturates at `u64::MAX`.
    pub fn eval(&self, n: u64) -> u64 {
        match self {
            Poly::Id => n,
            Poly::CeilLog2 => ceil_lg(n),
            Poly::Const(c) => *c,
            Poly::Add(a, b) => a.eval(n).saturating_add(b.eval(n)),
            Poly::Mul(a, b) => a.eval(n).saturating_mul(b.eval(n)),
            Poly::Compose(outer, inner) => outer.eval(inner.eval(n)),
        }
    }

    /// [`Poly::eval`] narrowed to `usize`.
    pub fn eval_usize(&self, n: u64) -> usize {
        usize::try_from(self.eval(n)).unwrap_or(usize::MAX)
    }

    /// Pointwise order restricted to `0..=horizon`.
    ///
    /// Callers pick a horizon covering every `n` they evaluate at.
    pub fn leq(&self, other: &Poly, horizon: u64) -> bool {
        (0..=horizon).all(|n| self.eval(n) <= other.eval(n))
    }

    fn precedence(&self) -> u8 {
        match self {
            Poly::Add(..) => 0,
            Poly::Mul(..) => 1,
            Poly::Compose(..) => 2,
            _ => 3,
        }
    }
}

/// Pointwise order on `0..=horizon`.
pub fn leq(p: &Poly, q: &Poly, horizon: u64) -> bool {
    p.leq(q, horizon)
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        Poly::Add(Box::new(self), Box::new(rhs))
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        Poly::Mul(Box::new(self), Box::new(rhs))
    }
}

impl From<u64> for Poly {
    fn from(c: u64) -> Self {
        Poly::Const(c)
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, p: &Poly, min: u8) -> fmt::Result {
    if p.precedence() < min {
        write!(f, "({p})")
    } else {
        write!(f, "{p}")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Poly::Id => f.write_str("id"),
            Poly::CeilLog2 => f.write_str("lg"),
            Poly::Const(c) => write!(f, "{c}"),
            Poly::Add(a, b) => {
                write_operand(f, a, 0)?;
                f.write_str(" + ")?;
                write_operand(f, b, 1)
            }
            Poly::Mul(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" * ")?;
                write_operand(f, b, 2)
            }
            Poly::Compose(a, b) => {
                write_operand(f, a, 3)?;
                f.write_str(" @ ")?;
                write_operand(f, b, 2)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid polynomial at byte {position}: {message}")]
pub struct PolyParseError {
    pub position: usize,
    pub message: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, message: &str) -> Result<T, PolyParseError> {
        Err(PolyParseError {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.skip_ws();
        if self.src.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.term()?;
        while self.eat(b'+') {
            acc = acc + self.term()?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, PolyParseError> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc * self.factor()?;
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Poly, PolyParseError> {
        let outer = self.atom()?;
        if self.eat(b'@') {
            Ok(outer.compose(self.factor()?))
        } else {
            Ok(outer)
        }
    }

    fn atom(&mut self) -> Result<Poly, PolyParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if rest.starts_with(b"id") {
            self.pos += 2;
            Ok(Poly::Id)
        } else if rest.starts_with(b"lg") {
            self.pos += 2;
            Ok(Poly::CeilLog2)
        } else if rest.first().is_some_and(u8::is_ascii_digit) {
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let digits = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
            match digits.parse() {
                Ok(c) => Ok(Poly::Const(c)),
                Err(_) => self.err("integer literal out of range"),
            }
        } else if self.eat(b'(') {
            let inner = self.expr()?;
            if !self.eat(b')') {
                return self.err("expected `)`");
            }
            Ok(inner)
        } else {
            self.err("expected `id`, `lg`, an integer or `(`")
        }
    }
}

impl FromStr for Poly {
    type Err = PolyParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
        };
        let poly = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.err("trailing input");
        }
        Ok(poly)
    }
}
