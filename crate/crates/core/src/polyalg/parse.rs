//! Text grammar for polynomials in `z1`, `z2` with Gaussian-rational
//! coefficients, and the matching printer.
//!
//! ```text
//! expr   := ['-'|'+'] term (('+'|'-') term)*
//! term   := unary (('*'|'/') unary | unary)*      juxtaposition multiplies
//! unary  := '-' unary | power
//! power  := atom ['^' uint]
//! atom   := number | 'i' | 'z1' | 'z2' | '(' expr ')'
//! number := digits ['.' digits] [('e'|'E') ['+'|'-'] digits]
//! ```
//!
//! Decimal literals are read as exact rationals. Division is only allowed by
//! a nonzero constant.

use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::coeff::{Coeff, GaussRat};
use super::poly2::{ExactPoly, Poly2};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub message: String,
    /// Byte offset into `input`.
    pub position: usize,
    pub input: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let col = self.input[..self.position.min(self.input.len())].chars().count();
        writeln!(f, "parse error at column {}: {}", col + 1, self.message)?;
        writeln!(f, "  {}", self.input)?;
        write!(f, "  {}^", " ".repeat(col))
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational, bool),
    I,
    Z1,
    Z2,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
}

impl<'a> Lexer<'a> {
    fn err(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        ParseError { message: msg.into(), position: pos, input: self.src.to_string() }
    }

    fn run(mut self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let b = self.src.as_bytes();
        let mut i = 0;
        while i < b.len() {
            let c = b[i];
            let start = i;
            let single = match c {
                b' ' | b'\t' | b'\n' | b'\r' => {
                    i += 1;
                    continue;
                }
                b'+' => Some(Tok::Plus),
                b'-' => Some(Tok::Minus),
                b'*' => Some(Tok::Star),
                b'/' => Some(Tok::Slash),
                b'^' => Some(Tok::Caret),
                b'(' => Some(Tok::LParen),
                b')' => Some(Tok::RParen),
                b'i' => Some(Tok::I),
                _ => None,
            };
            if let Some(t) = single {
                self.toks.push((t, start));
                i += 1;
                continue;
            }
            if c == b'z' {
                match b.get(i + 1) {
                    Some(b'1') => self.toks.push((Tok::Z1, start)),
                    Some(b'2') => self.toks.push((Tok::Z2, start)),
                    _ => return Err(self.err(start, "expected variable z1 or z2")),
                }
                i += 2;
                if b.get(i).is_some_and(|c| c.is_ascii_digit()) {
                    return Err(self.err(start, "unknown variable"));
                }
                continue;
            }
            if c.is_ascii_digit() || c == b'.' {
                let (num, integral, end) = self.number(i)?;
                self.toks.push((Tok::Num(num, integral), start));
                i = end;
                continue;
            }
            let ch = self.src[i..].chars().next().unwrap_or('?');
            return Err(self.err(start, format!("unexpected character '{}'", ch)));
        }
        self.toks.push((Tok::End, b.len()));
        Ok(self.toks)
    }

    fn number(&self, mut i: usize) -> Result<(BigRational, bool, usize), ParseError> {
        let b = self.src.as_bytes();
        let start = i;
        let mut digits = String::new();
        let mut frac_len: i64 = 0;
        let mut integral = true;
        while i < b.len() && b[i].is_ascii_digit() {
            digits.push(b[i] as char);
            i += 1;
        }
        if i < b.len() && b[i] == b'.' {
            integral = false;
            i += 1;
            while i < b.len() && b[i].is_ascii_digit() {
                digits.push(b[i] as char);
                frac_len += 1;
                i += 1;
            }
        }
        if digits.is_empty() {
            return Err(self.err(start, "malformed number"));
        }
        let mut exp: i64 = 0;
        if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
            integral = false;
            let mut j = i + 1;
            let neg = match b.get(j) {
                Some(b'-') => {
                    j += 1;
                    true
                }
                Some(b'+') => {
                    j += 1;
                    false
                }
                _ => false,
            };
            let es = j;
            while j < b.len() && b[j].is_ascii_digit() {
                j += 1;
            }
            if j == es {
                return Err(self.err(i, "malformed exponent"));
            }
            exp = self.src[es..j].parse().map_err(|_| self.err(es, "exponent too large"))?;
            if neg {
                exp = -exp;
            }
            i = j;
        }
        let mantissa: BigInt = digits.parse().map_err(|_| self.err(start, "malformed number"))?;
        let e = exp - frac_len;
        if e.abs() > 10_000 {
            return Err(self.err(start, "exponent too large"));
        }
        let ten = BigInt::from(10);
        let r = if e >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, e as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-e) as usize))
        };
        Ok((r, integral, i))
    }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: impl Into<String>) -> ParseError {
        ParseError { message: msg.into(), position: self.offset(), input: self.src.to_string() }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Num(..) | Tok::I | Tok::Z1 | Tok::Z2 | Tok::LParen)
    }

    fn expr(&mut self) -> Result<ExactPoly, ParseError> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Minus => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<ExactPoly, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Slash => {
                    self.bump();
                    let at = self.offset();
                    let d = self.unary()?;
                    let c = constant_value(&d).filter(|c| !c.is_zero()).ok_or_else(|| ParseError {
                        message: "division is only allowed by a nonzero constant".into(),
                        position: at,
                        input: self.src.to_string(),
                    })?;
                    acc = acc.scale(&c.inv().expect("nonzero"));
                }
                _ if self.starts_atom() => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<ExactPoly, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExactPoly, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        match self.peek().clone() {
            Tok::Num(n, true) => {
                let e: u32 = n
                    .to_integer()
                    .try_into()
                    .ok()
                    .filter(|&e: &u32| e <= 64)
                    .ok_or_else(|| self.err("exponent must be an integer between 0 and 64"))?;
                self.bump();
                let mut out = ExactPoly::constant(GaussRat::one());
                for _ in 0..e {
                    out = &out * &base;
                }
                Ok(out)
            }
            _ => Err(self.err("expected a nonnegative integer exponent")),
        }
    }

    fn atom(&mut self) -> Result<ExactPoly, ParseError> {
        match self.peek().clone() {
            Tok::Num(n, _) => {
                self.bump();
                Ok(ExactPoly::constant(GaussRat::new(n, BigRational::zero())))
            }
            Tok::I => {
                self.bump();
                Ok(ExactPoly::constant(GaussRat::i()))
            }
            Tok::Z1 => {
                self.bump();
                Ok(ExactPoly::monomial(GaussRat::one(), 1, 0))
            }
            Tok::Z2 => {
                self.bump();
                Ok(ExactPoly::monomial(GaussRat::one(), 0, 1))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.err("expected ')'"));
                }
                self.bump();
                Ok(e)
            }
            Tok::End => Err(self.err("unexpected end of input")),
            t => Err(self.err(format!("unexpected {}", tok_name(&t)))),
        }
    }
}

fn tok_name(t: &Tok) -> &'static str {
    match t {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Slash => "'/'",
        Tok::Caret => "'^'",
        Tok::RParen => "')'",
        _ => "token",
    }
}

fn constant_value(p: &ExactPoly) -> Option<GaussRat> {
    if p.actual_bidegree() == (0, 0) {
        Some(p.coeff(0, 0))
    } else {
        None
    }
}

/// Parses a polynomial. The declared bidegree is the actual one.
pub fn parse_poly(s: &str) -> Result<ExactPoly, ParseError> {
    let toks = Lexer { src: s, toks: Vec::new() }.run()?;
    let mut p = Parser { src: s, toks, pos: 0 };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(out)
}

/// Parses a constant expression such as `-1`, `3/5 + 4/5*i`.
pub fn parse_coeff(s: &str) -> Result<GaussRat, ParseError> {
    let p = parse_poly(s)?;
    constant_value(&p).ok_or_else(|| ParseError {
        message: "expected a constant".into(),
        position: 0,
        input: s.to_string(),
    })
}

/// Splits a coefficient into a sign and a magnitude text readable by the
/// grammar; the magnitude `"1"` is elided in front of monomials.
pub trait TermFormat {
    fn sign_and_magnitude(&self) -> (bool, String);
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl TermFormat for GaussRat {
    fn sign_and_magnitude(&self) -> (bool, String) {
        if self.im.is_zero() {
            (self.re.is_negative(), fmt_rat(&self.re.abs()))
        } else if self.re.is_zero() {
            let a = self.im.abs();
            let body = if a.is_one() {
                "i".to_string()
            } else if a.is_integer() {
                format!("{}i", a.numer())
            } else {
                format!("{}*i", fmt_rat(&a))
            };
            (self.im.is_negative(), body)
        } else {
            (false, self.to_string())
        }
    }
}

impl TermFormat for Complex64 {
    fn sign_and_magnitude(&self) -> (bool, String) {
        if self.im == 0.0 {
            (self.re < 0.0, format!("{}", self.re.abs()))
        } else if self.re == 0.0 {
            let a = self.im.abs();
            let body = if a == 1.0 { "i".to_string() } else { format!("{}*i", a) };
            (self.im < 0.0, body)
        } else {
            let sign = if self.im < 0.0 { '-' } else { '+' };
            (false, format!("({} {} {}*i)", self.re, sign, self.im.abs()))
        }
    }
}

fn monomial_text(j: u32, k: u32) -> String {
    let var = |name: &str, e: u32| match e {
        0 => None,
        1 => Some(name.to_string()),
        e => Some(format!("{}^{}", name, e)),
    };
    [var("z1", j), var("z2", k)].into_iter().flatten().collect::<Vec<_>>().join("*")
}

/// Terms in graded descending order, `z1` before `z2`.
impl<C: Coeff + TermFormat> fmt::Display for Poly2<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms().collect();
        if terms.is_empty() {
            return write!(f, "0");
        }
        terms.sort_by_key(|(&(j, k), _)| (std::cmp::Reverse(j + k), std::cmp::Reverse(j)));
        for (idx, (&(j, k), c)) in terms.into_iter().enumerate() {
            let (neg, mag) = c.sign_and_magnitude();
            let mono = monomial_text(j, k);
            let body = match (mono.is_empty(), mag == "1") {
                (true, _) => mag,
                (false, true) => mono,
                (false, false) => format!("{}*{}", mag, mono),
            };
            match (idx, neg) {
                (0, false) => write!(f, "{}", body)?,
                (0, true) => write!(f, "-{}", body)?,
                (_, false) => write!(f, " + {}", body)?,
                (_, true) => write!(f, " - {}", body)?,
            }
        }
        Ok(())
    }
}
