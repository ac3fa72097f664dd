//! Expression grammar for the CLI: polynomials in `z, y1..y9`, operators
//! in `D` and `z`, vector fields as semicolon-separated `yj' = expr`
//! lists, and small series expressions built from the Airy basis.
//!
//! Parsing is precedence climbing over a hand-rolled lexer; errors carry
//! line/column and the expected-token set.

use num::traits::{ToPrimitive, Zero};
use num::BigInt;

use crate::exact::{rat, BigRat, UniPoly};
use crate::linode::DiffOperator;
use crate::mpoly::{MultiPoly, Var};
use crate::series::{airy_basis, TruncSeries};
use crate::vfield::PolyVectorField;

const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Prime,
    Equals,
    Semi,
    Comma,
    End,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Int(n) => return write!(f, "integer {}", n),
            Tok::Ident(s) => return write!(f, "identifier {}", s),
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Star => "'*'",
            Tok::Slash => "'/'",
            Tok::Caret => "'^'",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::Prime => "'''",
            Tok::Equals => "'='",
            Tok::Semi => "';'",
            Tok::Comma => "','",
            Tok::End => "end of input",
        };
        write!(f, "{}", s)
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Lexer {
    fn new(text: &str) -> Result<Self, ParseError> {
        let mut toks = Vec::new();
        let mut line = 1usize;
        let mut col = 1usize;
        let mut chars = text.chars().peekable();
        while let Some(&c) = chars.peek() {
            let (tline, tcol) = (line, col);
            let advance = |chars: &mut std::iter::Peekable<std::str::Chars>,
                           line: &mut usize,
                           col: &mut usize| {
                let c = chars.next().unwrap();
                if c == '\n' {
                    *line += 1;
                    *col = 1;
                } else {
                    *col += 1;
                }
                c
            };
            if c.is_whitespace() {
                advance(&mut chars, &mut line, &mut col);
                continue;
            }
            if c.is_ascii_digit() {
                let mut s = String::new();
                while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                    s.push(advance(&mut chars, &mut line, &mut col));
                }
                toks.push((Tok::Int(s.parse().unwrap()), tline, tcol));
                continue;
            }
            if c.is_ascii_alphabetic() {
                let mut s = String::new();
                while chars
                    .peek()
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
                {
                    s.push(advance(&mut chars, &mut line, &mut col));
                }
                toks.push((Tok::Ident(s), tline, tcol));
                continue;
            }
            let tok = match c {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '\'' => Tok::Prime,
                '=' => Tok::Equals,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                other => {
                    return Err(ParseError {
                        line: tline,
                        col: tcol,
                        message: format!("unexpected character '{}'", other),
                    })
                }
            };
            advance(&mut chars, &mut line, &mut col);
            toks.push((tok, tline, tcol));
        }
        toks.push((Tok::End, line, col));
        Ok(Lexer { toks, pos: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn error(&self, expected: &str) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: format!("expected {}, found {}", expected, self.peek()),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.next();
            Ok(())
        } else {
            Err(self.error(&tok.to_string()))
        }
    }
}

/// What identifiers mean while evaluating an expression.
trait Domain {
    type Value: Clone;
    fn lookup(&mut self, name: &str, lex: &mut Lexer) -> Result<Self::Value, ParseError>;
    fn constant(&self, c: BigRat) -> Self::Value;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn mul(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    /// Division; only constant divisors are accepted in polynomial domains.
    fn div(&self, a: Self::Value, b: Self::Value) -> Result<Self::Value, String>;
    fn pow(&self, a: Self::Value, k: u32) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    /// Postfix prime; only series support it.
    fn prime(&self, _a: Self::Value) -> Result<Self::Value, String> {
        Err("derivative (') is not allowed here".into())
    }
}

fn parse_expr<D: Domain>(
    lex: &mut Lexer,
    dom: &mut D,
    min_prec: u8,
) -> Result<D::Value, ParseError> {
    let mut lhs = parse_primary(lex, dom)?;
    loop {
        let (prec, tok) = match lex.peek() {
            Tok::Plus => (1, Tok::Plus),
            Tok::Minus => (1, Tok::Minus),
            Tok::Star => (2, Tok::Star),
            Tok::Slash => (2, Tok::Slash),
            Tok::Caret => (3, Tok::Caret),
            _ => break,
        };
        if prec < min_prec {
            break;
        }
        let (line, col) = lex.here();
        lex.next();
        if tok == Tok::Caret {
            // exponent: a nonnegative integer literal
            let k = match lex.peek().clone() {
                Tok::Int(n) => {
                    lex.next();
                    n
                }
                _ => return Err(lex.error("a nonnegative integer exponent")),
            };
            let k = k
                .to_u32()
                .filter(|&k| k <= MAX_EXPONENT)
                .ok_or(ParseError {
                    line,
                    col,
                    message: format!("exponent overflow (max {})", MAX_EXPONENT),
                })?;
            lhs = dom.pow(lhs, k);
            continue;
        }
        // left-associative binary operators
        let rhs = parse_expr(lex, dom, prec + 1)?;
        lhs = match tok {
            Tok::Plus => dom.add(lhs, rhs),
            Tok::Minus => dom.sub(lhs, rhs),
            Tok::Star => dom.mul(lhs, rhs),
            Tok::Slash => dom
                .div(lhs, rhs)
                .map_err(|message| ParseError { line, col, message })?,
            _ => unreachable!(),
        };
    }
    // postfix primes
    while lex.peek() == &Tok::Prime {
        let (line, col) = lex.here();
        lex.next();
        lhs = dom
            .prime(lhs)
            .map_err(|message| ParseError { line, col, message })?;
    }
    Ok(lhs)
}

fn parse_primary<D: Domain>(lex: &mut Lexer, dom: &mut D) -> Result<D::Value, ParseError> {
    match lex.peek().clone() {
        Tok::Int(n) => {
            lex.next();
            Ok(dom.constant(BigRat::from_integer(n)))
        }
        Tok::Ident(name) => {
            lex.next();
            let mut v = dom.lookup(&name, lex)?;
            while lex.peek() == &Tok::Prime {
                let (line, col) = lex.here();
                lex.next();
                v = dom
                    .prime(v)
                    .map_err(|message| ParseError { line, col, message })?;
            }
            Ok(v)
        }
        Tok::Minus => {
            lex.next();
            let v = parse_expr(lex, dom, 3)?;
            Ok(dom.neg(v))
        }
        Tok::LParen => {
            lex.next();
            let v = parse_expr(lex, dom, 1)?;
            lex.expect(Tok::RParen)?;
            Ok(v)
        }
        _ => Err(lex.error("a number, variable, '-' or '('")),
    }
}

struct PolyDomain {
    nvars: usize,
}

impl Domain for PolyDomain {
    type Value = MultiPoly;

    fn lookup(&mut self, name: &str, lex: &mut Lexer) -> Result<MultiPoly, ParseError> {
        let v = var_from_name(name).ok_or_else(|| {
            let (line, col) = lex.here();
            ParseError {
                line,
                col,
                message: format!("unknown variable '{}' (expected z or y1..y9)", name),
            }
        })?;
        MultiPoly::var(self.nvars, v).map_err(|e| {
            let (line, col) = lex.here();
            ParseError {
                line,
                col,
                message: e.to_string(),
            }
        })
    }

    fn constant(&self, c: BigRat) -> MultiPoly {
        MultiPoly::constant(self.nvars, c)
    }

    fn add(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a + &b
    }

    fn sub(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a - &b
    }

    fn mul(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
        &a * &b
    }

    fn div(&self, a: MultiPoly, b: MultiPoly) -> Result<MultiPoly, String> {
        if !b.is_constant() {
            return Err("division is only allowed by nonzero constants".into());
        }
        let c = b.constant_part();
        if c.is_zero() {
            return Err("division by zero".into());
        }
        Ok(a.scale(&c.recip()))
    }

    fn pow(&self, a: MultiPoly, k: u32) -> MultiPoly {
        a.pow(k)
    }

    fn neg(&self, a: MultiPoly) -> MultiPoly {
        -&a
    }
}

fn var_from_name(name: &str) -> Option<Var> {
    if name == "z" {
        return Some(Var::Z);
    }
    let rest = name.strip_prefix('y')?;
    let j: usize = rest.parse().ok()?;
    (1..=9).contains(&j).then_some(Var::Y(j))
}

/// Largest y-index mentioned in the text (0 when none).
fn max_y_index(text: &str) -> usize {
    let mut lex = match Lexer::new(text) {
        Ok(l) => l,
        Err(_) => return 0,
    };
    let mut max = 0;
    loop {
        match lex.next() {
            Tok::Ident(name) => {
                if let Some(Var::Y(j)) = var_from_name(&name) {
                    max = max.max(j);
                }
            }
            Tok::End => break,
            _ => {}
        }
    }
    max
}

/// Parse a polynomial in z, y1..yn. When `nvars` is None it is inferred
/// as the largest y-index mentioned.
pub fn parse_polynomial(text: &str, nvars: Option<usize>) -> Result<MultiPoly, ParseError> {
    let nvars = nvars.unwrap_or_else(|| max_y_index(text));
    let mut lex = Lexer::new(text)?;
    let mut dom = PolyDomain { nvars };
    let p = parse_expr(&mut lex, &mut dom, 1)?;
    lex.expect(Tok::End)?;
    Ok(p)
}

/// Parse an operator expression in D and z, e.g. `D^2 - z` or `z*D + 1`.
/// The expression is read as a commutative polynomial in (z, D) and
/// reassembled with z-coefficients on the left of each power of D.
pub fn parse_operator(text: &str) -> Result<DiffOperator, ParseError> {
    struct OpDomain;
    impl Domain for OpDomain {
        type Value = MultiPoly; // nvars = 1, y1 plays the role of D
        fn lookup(&mut self, name: &str, lex: &mut Lexer) -> Result<MultiPoly, ParseError> {
            match name {
                "z" => Ok(MultiPoly::var(1, Var::Z).unwrap()),
                "D" => Ok(MultiPoly::var(1, Var::Y(1)).unwrap()),
                _ => {
                    let (line, col) = lex.here();
                    Err(ParseError {
                        line,
                        col,
                        message: format!("unknown symbol '{}' (expected z or D)", name),
                    })
                }
            }
        }
        fn constant(&self, c: BigRat) -> MultiPoly {
            MultiPoly::constant(1, c)
        }
        fn add(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
            &a + &b
        }
        fn sub(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
            &a - &b
        }
        fn mul(&self, a: MultiPoly, b: MultiPoly) -> MultiPoly {
            &a * &b
        }
        fn div(&self, a: MultiPoly, b: MultiPoly) -> Result<MultiPoly, String> {
            if !b.is_constant() {
                return Err("division is only allowed by nonzero constants".into());
            }
            let c = b.constant_part();
            if c.is_zero() {
                return Err("division by zero".into());
            }
            Ok(a.scale(&c.recip()))
        }
        fn pow(&self, a: MultiPoly, k: u32) -> MultiPoly {
            a.pow(k)
        }
        fn neg(&self, a: MultiPoly) -> MultiPoly {
            -&a
        }
    }
    let mut lex = Lexer::new(text)?;
    let p = parse_expr(&mut lex, &mut OpDomain, 1)?;
    lex.expect(Tok::End)?;
    let coeffs: Vec<UniPoly> = p
        .coefficients_in(1)
        .unwrap()
        .iter()
        .map(|q| q.as_unipoly().unwrap())
        .collect();
    DiffOperator::new(coeffs).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}

/// Parse a vector field `y1' = f1; y2' = f2; …`. The components must cover
/// y1..yn exactly once.
pub fn parse_field(text: &str) -> Result<PolyVectorField, ParseError> {
    let parts: Vec<&str> = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let nvars = parts.len();
    if nvars == 0 {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: "empty vector field".into(),
        });
    }
    let mut components: Vec<Option<MultiPoly>> = vec![None; nvars];
    for part in parts {
        let mut lex = Lexer::new(part)?;
        let j = match lex.next() {
            Tok::Ident(name) => match var_from_name(&name) {
                Some(Var::Y(j)) if j <= nvars => j,
                _ => {
                    return Err(ParseError {
                        line: 1,
                        col: 1,
                        message: format!("expected y1..y{} on the left of '=', got '{}'", nvars, name),
                    })
                }
            },
            other => {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    message: format!("expected a component like y1' = …, found {}", other),
                })
            }
        };
        lex.expect(Tok::Prime)?;
        lex.expect(Tok::Equals)?;
        let mut dom = PolyDomain { nvars };
        let rhs = parse_expr(&mut lex, &mut dom, 1)?;
        lex.expect(Tok::End)?;
        if components[j - 1].is_some() {
            return Err(ParseError {
                line: 1,
                col: 1,
                message: format!("component y{} defined twice", j),
            });
        }
        components[j - 1] = Some(rhs);
    }
    let components: Option<Vec<MultiPoly>> = components.into_iter().collect();
    let components = components.ok_or(ParseError {
        line: 1,
        col: 1,
        message: "missing component".into(),
    })?;
    PolyVectorField::new(components).map_err(|e| ParseError {
        line: 1,
        col: 1,
        message: e.to_string(),
    })
}

/// Series expressions for relation checks: `u1`, `u2`, postfix `'` for the
/// derivative, `int(expr)` for the antiderivative with constant 0, plus
/// the usual arithmetic. Evaluated as exact truncated series.
pub fn parse_series_expr(text: &str, order: usize) -> Result<TruncSeries, ParseError> {
    struct SeriesDomain {
        order: usize,
        u1: TruncSeries,
        u2: TruncSeries,
    }
    impl Domain for SeriesDomain {
        type Value = TruncSeries;
        fn lookup(&mut self, name: &str, lex: &mut Lexer) -> Result<TruncSeries, ParseError> {
            match name {
                "u1" => Ok(self.u1.clone()),
                "u2" => Ok(self.u2.clone()),
                "z" => Ok(TruncSeries::identity(self.order)),
                "int" => {
                    lex.expect(Tok::LParen)?;
                    let inner = parse_expr(lex, self, 1)?;
                    lex.expect(Tok::RParen)?;
                    Ok(inner.antiderivative(BigRat::zero()))
                }
                _ => {
                    let (line, col) = lex.here();
                    Err(ParseError {
                        line,
                        col,
                        message: format!("unknown series '{}' (expected u1, u2, z, int(…))", name),
                    })
                }
            }
        }
        fn constant(&self, c: BigRat) -> TruncSeries {
            TruncSeries::constant(c, self.order)
        }
        fn add(&self, a: TruncSeries, b: TruncSeries) -> TruncSeries {
            a.add(&b)
        }
        fn sub(&self, a: TruncSeries, b: TruncSeries) -> TruncSeries {
            a.sub(&b)
        }
        fn mul(&self, a: TruncSeries, b: TruncSeries) -> TruncSeries {
            a.mul(&b)
        }
        fn div(&self, a: TruncSeries, b: TruncSeries) -> Result<TruncSeries, String> {
            let c = b.coeff(0);
            if b.coeffs()[1..].iter().any(|x| !x.is_zero()) || c.is_zero() {
                return Err("series division is only allowed by nonzero constants".into());
            }
            Ok(a.scale(&c.recip()))
        }
        fn pow(&self, a: TruncSeries, k: u32) -> TruncSeries {
            a.pow(k)
        }
        fn neg(&self, a: TruncSeries) -> TruncSeries {
            a.scale(&rat(-1))
        }
        fn prime(&self, a: TruncSeries) -> Result<TruncSeries, String> {
            Ok(a.derivative())
        }
    }
    // slack so derivatives inside the expression still reach `order`
    let base = order + 8;
    let (u1, u2) = airy_basis(base);
    let mut dom = SeriesDomain { order: base, u1, u2 };
    let mut lex = Lexer::new(text)?;
    let s = parse_expr(&mut lex, &mut dom, 1)?;
    lex.expect(Tok::End)?;
    Ok(s.truncate(order))
}

/// Comma-separated list of series expressions.
pub fn parse_series_list(text: &str, order: usize) -> Result<Vec<TruncSeries>, ParseError> {
    text.split(',')
        .map(|part| parse_series_expr(part.trim(), order))
        .collect()
}
