//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := ('+' | '-') factor | base ('^' factor)?
//! base     := number | 'i' | variable | parameter | function '(' expr ')' | '(' expr ')'
//! ```
//!
//! Offsets in errors count characters from the start of the input.

use num_complex::Complex64;
use num_rational::Rational64;

use super::{Expr, Func, Node, Number, Symbols};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnknownFunction(String),
    VariableOutOfRange { index: usize, dimension: usize },
    BadNumber(String),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at offset {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "syntax error: unexpected character `{c}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "syntax error: unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "syntax error: unexpected `{t}`"),
            ParseErrorKind::UnknownFunction(name) => write!(f, "unknown function `{name}`"),
            ParseErrorKind::VariableOutOfRange { index, dimension } => write!(
                f,
                "variable x{index} out of range for dimension n = {dimension}"
            ),
            ParseErrorKind::BadNumber(t) => write!(f, "malformed number `{t}`"),
        }
    }
}

/// Parses an expression in the coordinates `x0..xn`. Any other identifier
/// not followed by `(` is a named parameter.
pub fn parse(text: &str, dimension: usize) -> Result<Expr, ParseError> {
    Parser::new(text, Mode::Coordinates(dimension)).run()
}

/// Parses an expression whose variables are named by `symbols`.
pub fn parse_with(text: &str, symbols: &Symbols) -> Result<Expr, ParseError> {
    let mode = match symbols {
        Symbols::Coordinates => Mode::Coordinates(usize::MAX - 1),
        named => Mode::Named(named),
    };
    Parser::new(text, mode).run()
}

enum Mode<'a> {
    Coordinates(usize),
    Named(&'a Symbols),
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(Number),
    Ident(String),
    Op(char),
    End,
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    mode: Mode<'a>,
    token: Token,
    token_start: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &str, mode: Mode<'a>) -> Self {
        Parser {
            chars: text.chars().collect(),
            pos: 0,
            mode,
            token: Token::End,
            token_start: 0,
        }
    }

    fn run(mut self) -> Result<Expr, ParseError> {
        self.advance()?;
        let e = self.expr()?;
        if self.token != Token::End {
            return Err(self.unexpected());
        }
        Ok(e)
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            offset: self.token_start,
        }
    }

    fn unexpected(&self) -> ParseError {
        match &self.token {
            Token::End => self.error(ParseErrorKind::UnexpectedEnd),
            Token::Op(c) => self.error(ParseErrorKind::UnexpectedToken(c.to_string())),
            Token::Ident(s) => self.error(ParseErrorKind::UnexpectedToken(s.clone())),
            Token::Number(_) => self.error(ParseErrorKind::UnexpectedToken(
                self.chars[self.token_start..self.pos].iter().collect(),
            )),
        }
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
        self.token_start = self.pos;
        let Some(&c) = self.chars.get(self.pos) else {
            self.token = Token::End;
            return Ok(());
        };
        if c.is_ascii_digit() || c == '.' {
            self.token = Token::Number(self.number()?);
        } else if c.is_alphabetic() || c == '_' {
            let start = self.pos;
            while self
                .chars
                .get(self.pos)
                .is_some_and(|c| c.is_alphanumeric() || *c == '_')
            {
                self.pos += 1;
            }
            self.token = Token::Ident(self.chars[start..self.pos].iter().collect());
        } else if "+-*/^()".contains(c) {
            self.pos += 1;
            self.token = Token::Op(c);
        } else {
            return Err(ParseError {
                kind: ParseErrorKind::UnexpectedChar(c),
                offset: self.pos,
            });
        }
        Ok(())
    }

    fn number(&mut self) -> Result<Number, ParseError> {
        let start = self.pos;
        let mut digits = String::new();
        let mut frac_len: i32 = 0;
        let mut seen_dot = false;
        while let Some(&c) = self.chars.get(self.pos) {
            if c.is_ascii_digit() {
                digits.push(c);
                if seen_dot {
                    frac_len += 1;
                }
            } else if c == '.' && !seen_dot {
                seen_dot = true;
            } else {
                break;
            }
            self.pos += 1;
        }
        let mut exponent: i32 = 0;
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let save = self.pos;
            self.pos += 1;
            let mut sign = 1;
            if let Some(&s @ ('+' | '-')) = self.chars.get(self.pos) {
                sign = if s == '-' { -1 } else { 1 };
                self.pos += 1;
            }
            let exp_start = self.pos;
            while self.chars.get(self.pos).is_some_and(char::is_ascii_digit) {
                self.pos += 1;
            }
            if exp_start == self.pos {
                // Not an exponent after all (e.g. `2e` followed by an identifier).
                self.pos = save;
            } else {
                let text: String = self.chars[exp_start..self.pos].iter().collect();
                exponent = sign * text.parse::<i32>().unwrap_or(i32::MAX);
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if digits.is_empty() {
            return Err(ParseError {
                kind: ParseErrorKind::BadNumber(text),
                offset: start,
            });
        }
        Ok(exact_decimal(&digits, exponent - frac_len).unwrap_or_else(|| {
            Number::Inexact(Complex64::new(text.parse::<f64>().unwrap_or(f64::NAN), 0.0))
        }))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.token {
                Token::Op('+') => {
                    self.advance()?;
                    lhs = lhs + self.term()?;
                }
                Token::Op('-') => {
                    self.advance()?;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.token {
                Token::Op('*') => {
                    self.advance()?;
                    lhs = lhs * self.factor()?;
                }
                Token::Op('/') => {
                    self.advance()?;
                    lhs = lhs / self.factor()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        match self.token {
            Token::Op('-') => {
                self.advance()?;
                Ok(-self.factor()?)
            }
            Token::Op('+') => {
                self.advance()?;
                self.factor()
            }
            _ => {
                let base = self.base()?;
                if self.token == Token::Op('^') {
                    self.advance()?;
                    let exponent = self.factor()?;
                    Ok(base.pow(exponent))
                } else {
                    Ok(base)
                }
            }
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.token.clone() {
            Token::Number(n) => {
                self.advance()?;
                Ok(Expr::num(n))
            }
            Token::Op('(') => {
                self.advance()?;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Token::Ident(name) => {
                let start = self.token_start;
                self.advance()?;
                if self.token == Token::Op('(') {
                    let func = Func::from_name(&name).ok_or(ParseError {
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                        offset: start,
                    })?;
                    self.advance()?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::call(func, arg));
                }
                self.identifier(&name, start)
            }
            _ => Err(self.unexpected()),
        }
    }

    fn identifier(&self, name: &str, start: usize) -> Result<Expr, ParseError> {
        match &self.mode {
            Mode::Named(symbols) => {
                if let Some(i) = symbols.lookup(name) {
                    return Ok(Expr::var(i));
                }
            }
            Mode::Coordinates(dimension) => {
                if let Some(index) = coordinate_index(name) {
                    if index > *dimension {
                        return Err(ParseError {
                            kind: ParseErrorKind::VariableOutOfRange {
                                index,
                                dimension: *dimension,
                            },
                            offset: start,
                        });
                    }
                    return Ok(Expr::var(index));
                }
            }
        }
        if name == "i" {
            return Ok(Expr::num(Number::Inexact(Complex64::new(0.0, 1.0))));
        }
        Ok(Expr::new(Node::Param(name.to_string())))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.token == Token::Op(c) {
            self.advance()
        } else {
            Err(self.unexpected())
        }
    }
}

fn coordinate_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

/// `digits * 10^exp10` as an exact rational when it has at most 15
/// significant digits and fits in 64 bits.
fn exact_decimal(digits: &str, exp10: i32) -> Option<Number> {
    let trimmed = digits.trim_start_matches('0');
    if trimmed.len() > 15 {
        return None;
    }
    let mantissa: i64 = if trimmed.is_empty() { 0 } else { trimmed.parse().ok()? };
    if mantissa == 0 {
        return Some(Number::Exact(Rational64::from_integer(0)));
    }
    let scale = 10i64.checked_pow(exp10.unsigned_abs())?;
    let r = if exp10 >= 0 {
        Rational64::from_integer(mantissa.checked_mul(scale)?)
    } else {
        Rational64::new(mantissa, scale)
    };
    Some(Number::Exact(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares_tree() {
        let e = parse("x0^2 - x1^2", 1).unwrap();
        let expected = Expr::var(0).powi(2) - Expr::var(1).powi(2);
        assert_eq!(e, expected);
    }

    #[test]
    fn radial_root_needs_three_space_variables() {
        assert!(parse("sqrt(x1^2 + x2^2 + x3^2)", 3).is_ok());
        let err = parse("sqrt(x1^2 + x2^2 + x3^2)", 2).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::VariableOutOfRange {
                index: 3,
                dimension: 2
            }
        );
        assert_eq!(err.offset, 19);
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("x0 + @", 0).unwrap_err();
        assert_eq!(err.offset, 5);
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('@'));
    }

    #[test]
    fn unknown_function() {
        let err = parse("tanh(x0)", 0).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownFunction("tanh".into()));
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn incomplete_input() {
        assert_eq!(parse("x0 +", 0).unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert!(matches!(
            parse("(x0", 0).unwrap_err().kind,
            ParseErrorKind::UnexpectedEnd
        ));
        assert!(parse("x0 x1", 1).is_err());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(parse("0.5", 0).unwrap(), Expr::rational(1, 2));
        assert_eq!(parse("1e-3", 0).unwrap(), Expr::rational(1, 1000));
        assert_eq!(parse("2.5E2", 0).unwrap(), Expr::int(250));
        let long = parse("1.2551690056309432", 0).unwrap();
        assert!(!long.as_number().unwrap().is_exact());
    }

    #[test]
    fn whitespace_insensitive_and_unary() {
        let a = parse(" - x0 ^ 2 *  3 ", 0).unwrap();
        let b = parse("-x0^2*3", 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, (-(Expr::var(0).powi(2))) * Expr::int(3));
    }

    #[test]
    fn power_is_right_associative() {
        let e = parse("x0^2^3", 0).unwrap();
        assert_eq!(e, Expr::var(0).pow(Expr::int(2).powi(3)));
    }

    #[test]
    fn imaginary_unit_and_params() {
        let e = parse("x0 + i*k", 0).unwrap();
        assert_eq!(e.params().len(), 1);
        let named = parse_with("v*vstar", &Symbols::v_vstar()).unwrap();
        assert_eq!(named, Expr::var(0) * Expr::var(1));
        let alias = parse_with("sin(φ)", &Symbols::phi()).unwrap();
        assert_eq!(alias, Expr::var(0).sin());
    }
}
