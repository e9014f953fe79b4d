//! Polynomial phase-space symbols `a(x, p) = sum c_rs x^r p^s`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::phase_space::{Kind, Lattice, PhaseSpaceFunction};

pub const MAX_DEGREE: u32 = 8;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolynomialSymbol {
    terms: BTreeMap<(u32, u32), Complex64>,
}

impl PolynomialSymbol {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial(0, 0, Complex64::new(c, 0.0))
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Complex64::new(1.0, 0.0))
    }

    pub fn p() -> Self {
        Self::monomial(0, 1, Complex64::new(1.0, 0.0))
    }

    pub fn monomial(r: u32, s: u32, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert((r, s), c);
        }
        Self { terms }
    }

    /// Harmonic oscillator `(x^2 + p^2) / 2`.
    pub fn harmonic() -> Self {
        Self::monomial(2, 0, Complex64::new(0.5, 0.0)).add(&Self::monomial(0, 2, Complex64::new(0.5, 0.0)))
    }

    /// Builds a symbol from `(r, s, c)` triples, merging repeated keys.
    pub fn from_terms(terms: impl IntoIterator<Item = (u32, u32, Complex64)>) -> Result<Self> {
        let mut out = Self::zero();
        for (r, s, c) in terms {
            out = out.add(&Self::monomial(r, s, c));
        }
        out.check_degree()?;
        Ok(out)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, u32, Complex64)> + '_ {
        self.terms.iter().map(|(&(r, s), &c)| (r, s, c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(r, s)| r + s).max().unwrap_or(0)
    }

    pub fn check_degree(&self) -> Result<()> {
        match self.degree() {
            d if d > MAX_DEGREE => Err(Error::DegreeTooHigh(d)),
            _ => Ok(()),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im == 0.0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (&key, &c) in &other.terms {
            let v = terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
            *v += c;
            if *v == Complex64::new(0.0, 0.0) {
                terms.remove(&key);
            }
        }
        Self { terms }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        if c == Complex64::new(0.0, 0.0) {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(&k, &v)| (k, v * c)).collect() }
    }

    /// Pointwise (commutative) product of symbols.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(r1, s1), &c1) in &self.terms {
            for (&(r2, s2), &c2) in &other.terms {
                out = out.add(&Self::monomial(r1 + r2, s1 + s2, c1 * c2));
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(1.0), |acc, _| acc.mul(self))
    }

    /// `d^a/dx^a d^b/dp^b`
    pub fn derivative(&self, a: u32, b: u32) -> Self {
        let falling = |n: u32, k: u32| (0..k).map(|j| (n - j) as f64).product::<f64>();
        let mut out = Self::zero();
        for (&(r, s), &c) in &self.terms {
            if r >= a && s >= b {
                out = out.add(&Self::monomial(r - a, s - b, c * falling(r, a) * falling(s, b)));
            }
        }
        out
    }

    /// Moyal product, the Weyl symbol of the operator product:
    /// `a * b = sum_n (i hbar / 2)^n / n! sum_k C(n, k) (-1)^k (d_x^(n-k) d_p^k a)(d_p^(n-k) d_x^k b)`.
    pub fn star(&self, other: &Self, hbar: f64) -> Self {
        let mut out = Self::zero();
        let max_n = self.degree().max(other.degree());
        let mut pref = Complex64::new(1.0, 0.0);
        for n in 0..=max_n {
            if n > 0 {
                pref *= Complex64::new(0.0, hbar / 2.0) / n as f64;
            }
            let mut binom = 1.0;
            for k in 0..=n {
                if k > 0 {
                    binom = binom * (n - k + 1) as f64 / k as f64;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let term = self.derivative(n - k, k).mul(&other.derivative(k, n - k));
                out = out.add(&term.scale(pref * binom * sign));
            }
        }
        out
    }

    pub fn evaluate(&self, x: f64, p: f64) -> Complex64 {
        self.terms.iter().map(|(&(r, s), &c)| c * x.powi(r as i32) * p.powi(s as i32)).sum()
    }

    pub fn sample(&self, lattice: &Lattice) -> PhaseSpaceFunction {
        PhaseSpaceFunction::sample(*lattice, Kind::Symbol, |x, p| self.evaluate(x, p))
    }

    /// Parses text such as `0.5*x^2 + 0.5*p^2`, `x*p - 0.5*i*hbar`,
    /// `H`, `H2` (the classical square of `H`) or `sq(x + p)`.
    /// `hbar` is replaced by the given value.
    pub fn parse(text: &str, hbar: f64) -> Result<Self> {
        let mut parser = Parser { tokens: tokenize(text)?, pos: 0, hbar };
        let out = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("unexpected trailing input in symbol `{text}`")));
        }
        out.check_degree()?;
        Ok(out)
    }
}

impl fmt::Display for PolynomialSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (&(r, s), c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            if c.im == 0.0 {
                write!(f, "{}", c.re)?;
            } else {
                write!(f, "({}+{}*i)", c.re, c.im)?;
            }
            match r {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{r}")?,
            }
            match s {
                0 => {}
                1 => write!(f, "*p")?,
                _ => write!(f, "*p^{s}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<f64>().map_err(|e| Error::Parse(format!("number `{s}`: {e}")))?;
            out.push(Token::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in symbol")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    hbar: f64,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<PolynomialSymbol> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.add(&self.term()?.scale(Complex64::new(-1.0, 0.0)));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<PolynomialSymbol> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if self.eat('/') {
                let d = self.unary()?;
                let c = match (d.degree(), d.terms().next()) {
                    (0, Some((_, _, c))) => c,
                    _ => return Err(Error::Parse("division by a non-constant".into())),
                };
                acc = acc.scale(1.0 / c);
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<PolynomialSymbol> {
        if self.eat('-') {
            return Ok(self.unary()?.scale(Complex64::new(-1.0, 0.0)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.tokens.get(self.pos) {
                Some(Token::Num(e)) if e.fract() == 0.0 && *e >= 0.0 && *e <= MAX_DEGREE as f64 => {
                    let e = *e as u32;
                    self.pos += 1;
                    return Ok(base.pow(e));
                }
                _ => return Err(Error::Parse("exponent must be an integer between 0 and 8".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<PolynomialSymbol> {
        let tok = self.tokens.get(self.pos).cloned().ok_or_else(|| Error::Parse("unexpected end of symbol".into()))?;
        self.pos += 1;
        match tok {
            Token::Num(v) => Ok(PolynomialSymbol::constant(v)),
            Token::Op('(') => {
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            Token::Ident(name) => match name.as_str() {
                "x" => Ok(PolynomialSymbol::x()),
                "p" => Ok(PolynomialSymbol::p()),
                "i" => Ok(PolynomialSymbol::monomial(0, 0, Complex64::new(0.0, 1.0))),
                "hbar" => Ok(PolynomialSymbol::constant(self.hbar)),
                "H" => Ok(PolynomialSymbol::harmonic()),
                "H2" => Ok(PolynomialSymbol::harmonic().square()),
                "sq" => {
                    if !self.eat('(') {
                        return Err(Error::Parse("expected `(` after sq".into()));
                    }
                    let inner = self.expr()?;
                    if !self.eat(')') {
                        return Err(Error::Parse("missing `)`".into()));
                    }
                    Ok(inner.square())
                }
                other => Err(Error::Parse(format!("unknown name `{other}` in symbol"))),
            },
            Token::Op(c) => Err(Error::Parse(format!("unexpected `{c}` in symbol"))),
        }
    }
}
