//! Recursive-descent parser for operator expressions.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor ('*'? factor)*
//! factor  := '-' factor | atom ('^' uint)?
//! atom    := gen | scalar | '(' expr ')'
//! gen     := 'a' | 'adag' | 'F' | 'Fdag' | 'N' | 'M' | 'psi' | 'psibar'
//!          | 'qN(' rat ')' | 'qM(' rat ')' | 'fq' | 'fqdag'
//! scalar  := rational ('*' 's' ('^' int)?)? | 's' ('^' int)? | 'q' ('^' int)?
//! ```
//!
//! A `-` directly followed by a number is a negative literal. Sums whose terms
//! are all scalars fold into one scalar, which keeps `render` and `parse`
//! inverse to each other on syntax trees.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

use super::{Letter, OpExpr};
use crate::qnumbers::LaurentCoeff;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// 1-based column of the offending token.
    pub column: usize,
    pub found: String,
    pub expected: Vec<&'static str>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "syntax error at column {}: found {}, expected one of {}",
            self.column,
            self.found,
            self.expected.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    /// Unsigned literal `p` or `p/r`.
    Number(BigRational),
    Sym(char),
    Unknown(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(r) => format!("'{r}'"),
            Tok::Sym(c) | Tok::Unknown(c) => format!("'{c}'"),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let num: BigInt = chars[start..i].iter().collect::<String>().parse().expect("digits");
            let mut den = BigInt::from(1);
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                let s = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                den = chars[s..i].iter().collect::<String>().parse().expect("digits");
                if den.is_zero() {
                    return Err(ParseError {
                        column: s + 1,
                        found: "'0'".into(),
                        expected: vec!["nonzero denominator"],
                    });
                }
            }
            out.push((Tok::Number(BigRational::new(num, den)), col));
        } else if "+-*^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            out.push((Tok::Unknown(c), col));
            i += 1;
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

const FACTOR_START: [&str; 4] = ["generator", "scalar", "'('", "'-'"];

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let (tok, col) = &self.toks[self.pos];
        ParseError {
            column: *col,
            found: tok.describe(),
            expected: expected.to_vec(),
        }
    }

    fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Sym(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[match c {
                ')' => "')'",
                '(' => "'('",
                _ => "symbol",
            }]))
        }
    }

    fn after_term_expected(&self) -> Vec<&'static str> {
        let mut e = vec!["generator", "scalar", "'('", "'*'", "'^'", "'+'", "'-'"];
        e.push(if self.depth > 0 { "')'" } else { "end of input" });
        e
    }

    fn expr(&mut self) -> Result<OpExpr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Sym('-') => {
                    self.bump();
                    terms.push(OpExpr::Neg(Box::new(self.term()?)));
                }
                _ => break,
            }
        }
        Ok(fold_sum(terms))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Number(_) | Tok::Sym('('))
    }

    fn term(&mut self) -> Result<OpExpr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            if *self.peek() == Tok::Sym('*') {
                self.bump();
                factors.push(self.factor()?);
            } else if self.starts_factor() {
                factors.push(self.factor()?);
            } else {
                break;
            }
        }
        match self.peek() {
            Tok::Sym('+') | Tok::Sym('-') | Tok::End => {}
            Tok::Sym(')') if self.depth > 0 => {}
            _ => return Err(self.error(&self.after_term_expected())),
        }
        Ok(if factors.len() == 1 {
            factors.pop().expect("one factor")
        } else {
            OpExpr::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<OpExpr, ParseError> {
        if *self.peek() == Tok::Sym('-') {
            if let Tok::Number(r) = self.peek_at(1).clone() {
                self.bump();
                self.bump();
                let c = self.scalar_tail(-r)?;
                return self.with_power(OpExpr::Scalar(c));
            }
            self.bump();
            return Ok(OpExpr::Neg(Box::new(self.factor()?)));
        }
        let atom = self.atom()?;
        self.with_power(atom)
    }

    fn with_power(&mut self, base: OpExpr) -> Result<OpExpr, ParseError> {
        if *self.peek() != Tok::Sym('^') {
            return Ok(base);
        }
        self.bump();
        match self.bump() {
            (Tok::Number(r), _) if r.is_integer() => {
                let k: u32 = r
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.error(&["small exponent"]))?;
                Ok(OpExpr::Pow(Box::new(base), k))
            }
            _ => {
                self.pos -= 1;
                Err(self.error(&["nonnegative integer exponent"]))
            }
        }
    }

    /// Optional `* s^k` after a rational literal.
    fn scalar_tail(&mut self, r: BigRational) -> Result<LaurentCoeff, ParseError> {
        if *self.peek() == Tok::Sym('*') && *self.peek_at(1) == Tok::Ident("s".into()) {
            self.bump();
            self.bump();
            let k = self.int_power()?;
            return Ok(LaurentCoeff::rational_monomial(r, k));
        }
        Ok(LaurentCoeff::rational_monomial(r, 0))
    }

    /// `('^' int)?`, defaulting to 1.
    fn int_power(&mut self) -> Result<i32, ParseError> {
        if *self.peek() != Tok::Sym('^') {
            return Ok(1);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Number(r) if r.is_integer() => {
                let k: i32 = r
                    .to_integer()
                    .try_into()
                    .map_err(|_| self.error(&["small exponent"]))?;
                self.bump();
                Ok(if neg { -k } else { k })
            }
            _ => Err(self.error(&["integer exponent"])),
        }
    }

    fn rational_arg(&mut self) -> Result<i32, ParseError> {
        self.expect_sym('(')?;
        let neg = if *self.peek() == Tok::Sym('-') {
            self.bump();
            true
        } else {
            false
        };
        let r = match self.peek().clone() {
            Tok::Number(r) => r,
            _ => return Err(self.error(&["rational exponent"])),
        };
        let quarters = &r * BigRational::from_integer(BigInt::from(4));
        if !quarters.is_integer() {
            return Err(self.error(&["multiple of 1/4"]));
        }
        let k: i32 = quarters
            .to_integer()
            .try_into()
            .map_err(|_| self.error(&["small exponent"]))?;
        self.bump();
        self.expect_sym(')')?;
        Ok(if neg { -k } else { k })
    }

    fn atom(&mut self) -> Result<OpExpr, ParseError> {
        match self.peek().clone() {
            Tok::Number(r) => {
                self.bump();
                Ok(OpExpr::Scalar(self.scalar_tail(r)?))
            }
            Tok::Sym('(') => {
                self.bump();
                self.depth += 1;
                let e = self.expr()?;
                self.depth -= 1;
                self.expect_sym(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let col = self.toks[self.pos].1;
                self.bump();
                let g = OpExpr::Gen;
                Ok(match name.as_str() {
                    "a" => g(Letter::A),
                    "adag" => g(Letter::Adag),
                    "F" => g(Letter::F),
                    "Fdag" => g(Letter::Fdag),
                    "N" => g(Letter::N),
                    "M" => g(Letter::M),
                    "psi" => g(Letter::Psi),
                    "psibar" => g(Letter::PsiBar),
                    "fq" => OpExpr::Product(vec![g(Letter::QM(-1)), g(Letter::F)]),
                    "fqdag" => OpExpr::Product(vec![g(Letter::Fdag), g(Letter::QM(-1))]),
                    "qN" => g(Letter::QN(self.rational_arg()?)),
                    "qM" => g(Letter::QM(self.rational_arg()?)),
                    "s" => OpExpr::Scalar(LaurentCoeff::s_pow(self.int_power()?)),
                    "q" => OpExpr::Scalar(LaurentCoeff::q_pow(self.int_power()?)),
                    _ => {
                        return Err(ParseError {
                            column: col,
                            found: format!("'{name}'"),
                            expected: FACTOR_START.to_vec(),
                        })
                    }
                })
            }
            _ => Err(self.error(&FACTOR_START)),
        }
    }
}

fn fold_sum(terms: Vec<OpExpr>) -> OpExpr {
    if terms.len() == 1 {
        return terms.into_iter().next().expect("one term");
    }
    let scalars: Option<Vec<LaurentCoeff>> = terms
        .iter()
        .map(|t| match t {
            OpExpr::Scalar(c) => Some(c.clone()),
            OpExpr::Neg(b) => match b.as_ref() {
                OpExpr::Scalar(c) => Some(-c.clone()),
                _ => None,
            },
            _ => None,
        })
        .collect();
    match scalars {
        Some(cs) => OpExpr::Scalar(cs.iter().fold(LaurentCoeff::zero(), |acc, c| &acc + c)),
        None => OpExpr::Sum(terms),
    }
}

pub fn parse(text: &str) -> Result<OpExpr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["'+'", "'-'", "end of input"]));
    }
    Ok(e)
}

fn render_scalar_monomial(exp: i32, c: &BigRational) -> String {
    match exp {
        0 => c.to_string(),
        e => format!("{c}*s^{e}"),
    }
}

fn render_scalar(c: &LaurentCoeff) -> String {
    let parts: Vec<String> = c.terms().map(|(e, r)| render_scalar_monomial(e, r)).collect();
    match parts.len() {
        0 => "0".into(),
        1 => parts.into_iter().next().expect("one part"),
        _ => format!("({})", parts.join(" + ")),
    }
}

fn render_factor(e: &OpExpr) -> String {
    match e {
        OpExpr::Product(_) | OpExpr::Sum(_) | OpExpr::Neg(_) | OpExpr::Pow(..) => format!("({})", render(e)),
        OpExpr::Scalar(c) if c.terms().next().map(|(_, r)| r.is_negative()).unwrap_or(false) && c.terms().count() == 1 => {
            format!("({})", render(e))
        }
        _ => render(e),
    }
}

/// Source text that parses back to an equal tree.
pub fn render(e: &OpExpr) -> String {
    match e {
        OpExpr::Gen(l) => l.name(),
        OpExpr::Scalar(c) => render_scalar(c),
        OpExpr::Product(fs) => fs.iter().map(render_factor).collect::<Vec<_>>().join(" "),
        OpExpr::Sum(ts) => ts.iter().map(render).collect::<Vec<_>>().join(" + "),
        OpExpr::Neg(b) => format!("-({})", render(b)),
        OpExpr::Pow(b, k) => format!("{}^{k}", render_factor(b)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_products() {
        assert_eq!(
            parse("a adag").unwrap(),
            OpExpr::Product(vec![OpExpr::Gen(Letter::A), OpExpr::Gen(Letter::Adag)])
        );
        assert_eq!(parse("  a*adag ").unwrap(), parse("a adag").unwrap());
    }

    #[test]
    fn macros_expand() {
        assert_eq!(
            parse("fq").unwrap(),
            OpExpr::Product(vec![OpExpr::Gen(Letter::QM(-1)), OpExpr::Gen(Letter::F)])
        );
        assert_eq!(
            parse("fqdag").unwrap(),
            OpExpr::Product(vec![OpExpr::Gen(Letter::Fdag), OpExpr::Gen(Letter::QM(-1))])
        );
    }

    #[test]
    fn scalars() {
        assert_eq!(
            parse("3/2*s^-2").unwrap(),
            OpExpr::Scalar(LaurentCoeff::rational_monomial(BigRational::new(3.into(), 2.into()), -2))
        );
        assert_eq!(parse("q^2").unwrap(), OpExpr::Scalar(LaurentCoeff::s_pow(8)));
        assert_eq!(
            parse("1 + s").unwrap(),
            OpExpr::Scalar(&LaurentCoeff::one() + &LaurentCoeff::s_pow(1))
        );
        assert_eq!(parse("qN(-1/2)").unwrap(), OpExpr::Gen(Letter::QN(-2)));
    }

    #[test]
    fn unclosed_bracket() {
        let err = parse("a [unclosed").unwrap_err();
        assert_eq!(err.column, 3);
        assert_eq!(err.found, "'['");
        assert!(err.expected.contains(&"end of input"));
    }

    #[test]
    fn other_errors() {
        assert_eq!(parse("(a adag").unwrap_err().column, 8);
        assert_eq!(parse("a^x").unwrap_err().column, 3);
        assert!(parse("qN(1/3)").is_err());
        assert!(parse("b").is_err());
        assert!(parse("").is_err());
        assert!(parse("1/0").is_err());
    }

    #[test]
    fn round_trips() {
        for src in [
            "a adag",
            "F Fdag Fdag + -3/2*s^2 psi psibar",
            "(a + adag)^3 - qN(1/4) M",
            "-(a) + -2",
            "2 s q^-1 fq fqdag",
            "(1 + s^3) a - (2 - s)",
            "-a^2",
        ] {
            let e = parse(src).unwrap();
            let text = render(&e);
            assert_eq!(parse(&text).unwrap(), e, "{src} -> {text}");
        }
    }
}
