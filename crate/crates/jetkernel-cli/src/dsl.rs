//! The operator surface syntax: a small expression language that is explicit
//! about the divided-power convention.
//!
//! ```text
//! expr      := ['-'] term (('+'|'-') term)*
//! term      := factor ('*' factor)*
//! factor    := base ('^' posint)*
//! base      := rational | var | hasse | classical | '(' expr ')'
//! rational  := digits ('/' digits)?
//! var       := 'x' posint                 (multiplication by x_i)
//! hasse     := 'h(' varindex ',' order ')'  (the divided power d^[order * e_i])
//! classical := 'd(' varindex ')'          (d/dx_i; characteristic zero only)
//! ```
//!
//! `*` is operator composition, so `x1*h(1,1)` is the Euler-type term
//! `x d^[1]` while `h(1,1)*x1` normalizes to `x d^[1] + 1` by the Leibniz
//! rule. Products of `h` tokens in distinct variables combine to mixed
//! indices with no extra factors. The printer emits this same syntax, so
//! printed operators re-parse to equal values.

use num_bigint::BigInt;

use jetkernel_core::field::FieldSpec;
use jetkernel_core::multiindex::MultiIndex;
use jetkernel_core::operator::{classical_to_hasse, MatrixOperator, ScalarOperator};
use jetkernel_core::poly::Poly;

/// A parse failure with the character position where it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at position {}: {}", self.position, self.message)
    }
}

impl std::error::Error for ParseError {}

pub struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    nvars: usize,
    field: FieldSpec,
    text: &'a str,
}

impl<'a> Parser<'a> {
    pub fn new(text: &'a str, nvars: usize, field: FieldSpec) -> Self {
        Parser { chars: text.chars().collect(), pos: 0, nvars, field, text }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: message.into() })
    }

    fn core_err<T>(&self, e: jetkernel_core::Error) -> Result<T, ParseError> {
        Err(ParseError { position: self.pos, message: e.to_string() })
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn eat(&mut self, expected: char) -> Result<(), ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c == expected => {
                self.pos += 1;
                Ok(())
            }
            Some(c) => self.err(format!("expected '{expected}', found '{c}'")),
            None => self.err(format!("expected '{expected}', found end of input")),
        }
    }

    fn parse_digits(&mut self) -> Result<BigInt, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse::<BigInt>().map_err(|e| ParseError { position: start, message: e.to_string() })
    }

    fn parse_posint(&mut self, what: &str) -> Result<usize, ParseError> {
        let n = self.parse_digits()?;
        let v = usize::try_from(&n)
            .map_err(|_| ParseError { position: self.pos, message: format!("{what} too large") })?;
        if v == 0 {
            return self.err(format!("{what} must be positive"));
        }
        if v > 10_000 {
            return self.err(format!("{what} {v} is unreasonably large"));
        }
        Ok(v)
    }

    /// Parses a full expression and requires the input to be consumed.
    pub fn parse_expression(&mut self) -> Result<ScalarOperator, ParseError> {
        let op = self.parse_expr()?;
        self.skip_ws();
        if self.pos != self.chars.len() {
            return self.err(format!("unexpected trailing input '{}'", self.rest_snippet()));
        }
        Ok(op)
    }

    fn rest_snippet(&self) -> String {
        self.chars[self.pos..].iter().take(12).collect()
    }

    fn parse_expr(&mut self) -> Result<ScalarOperator, ParseError> {
        self.skip_ws();
        let mut acc = if self.peek() == Some('-') {
            self.bump();
            self.parse_term()?.neg()
        } else {
            self.parse_term()?
        };
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.try_add(&t).or_else(|e| self.core_err(e))?;
                }
                Some('-') => {
                    self.bump();
                    let t = self.parse_term()?;
                    acc = acc.try_sub(&t).or_else(|e| self.core_err(e))?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<ScalarOperator, ParseError> {
        let mut acc = self.parse_factor()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('*') {
                self.bump();
                let f = self.parse_factor()?;
                acc = acc.compose(&f).or_else(|e| self.core_err(e))?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_factor(&mut self) -> Result<ScalarOperator, ParseError> {
        let mut base = self.parse_base()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('^') {
                self.bump();
                let e = self.parse_posint("exponent")?;
                let mut acc = base.clone();
                for _ in 1..e {
                    acc = acc.compose(&base).or_else(|er| self.core_err(er))?;
                }
                base = acc;
            } else {
                return Ok(base);
            }
        }
    }

    fn parse_base(&mut self) -> Result<ScalarOperator, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some('(') => {
                self.bump();
                let inner = self.parse_expr()?;
                self.eat(')')?;
                Ok(inner)
            }
            Some('x') => {
                self.bump();
                let index = self.parse_posint("variable index")?;
                if index > self.nvars {
                    return self.err(format!(
                        "variable index {index} exceeds the declared {} variable(s)",
                        self.nvars
                    ));
                }
                Ok(ScalarOperator::multiplication(Poly::var(self.nvars, index - 1, self.field)))
            }
            Some('h') => {
                self.bump();
                self.eat('(')?;
                let var = self.parse_posint("variable index")?;
                if var > self.nvars {
                    return self.err(format!(
                        "variable index {var} exceeds the declared {} variable(s)",
                        self.nvars
                    ));
                }
                self.eat(',')?;
                let order = self.parse_posint("derivative order")?;
                self.eat(')')?;
                let mut exps = vec![0u32; self.nvars];
                exps[var - 1] = order as u32;
                ScalarOperator::hasse(self.nvars, self.field, MultiIndex::new(exps))
                    .or_else(|e| self.core_err(e))
            }
            Some('d') => {
                self.bump();
                if self.field.characteristic() != 0 {
                    return self.err(
                        "classical derivative token d(i) requires characteristic zero; \
                         use h(i,k) divided powers instead",
                    );
                }
                self.eat('(')?;
                let var = self.parse_posint("variable index")?;
                if var > self.nvars {
                    return self.err(format!(
                        "variable index {var} exceeds the declared {} variable(s)",
                        self.nvars
                    ));
                }
                self.eat(')')?;
                let mut exps = vec![0u32; self.nvars];
                exps[var - 1] = 1;
                let mut terms = std::collections::BTreeMap::new();
                terms.insert(MultiIndex::new(exps), Poly::one(self.nvars, self.field));
                classical_to_hasse(self.nvars, self.field, &terms).or_else(|e| self.core_err(e))
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.parse_digits()?;
                self.skip_ws();
                let value = if self.peek() == Some('/') {
                    self.bump();
                    let den = self.parse_digits()?;
                    let d = self.field.from_bigint(&den);
                    let inv = d.inverse().or_else(|_| {
                        self.err(format!("denominator {den} is zero in {}", self.field))
                    })?;
                    self.field.from_bigint(&num).mul(&inv)
                } else {
                    self.field.from_bigint(&num)
                };
                Ok(ScalarOperator::multiplication(Poly::constant(self.nvars, value)))
            }
            Some(c) => self.err(format!("unexpected character '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }

    /// Parses a matrix literal `[ e, e ; e, e ]`; a bare expression is a 1x1
    /// matrix.
    pub fn parse_matrix(&mut self) -> Result<MatrixOperator, ParseError> {
        self.skip_ws();
        if self.peek() != Some('[') {
            let entry = self.parse_expression()?;
            return Ok(MatrixOperator::scalar(entry));
        }
        self.bump();
        let mut rows: Vec<Vec<ScalarOperator>> = Vec::new();
        let mut current = Vec::new();
        loop {
            let entry = self.parse_expr()?;
            current.push(entry);
            self.skip_ws();
            match self.bump() {
                Some(',') => continue,
                Some(';') => {
                    rows.push(std::mem::take(&mut current));
                    continue;
                }
                Some(']') => {
                    rows.push(std::mem::take(&mut current));
                    break;
                }
                Some(c) => return self.err(format!("expected ',', ';' or ']', found '{c}'")),
                None => return self.err("unterminated matrix literal"),
            }
        }
        self.skip_ws();
        if self.pos != self.chars.len() {
            return self.err(format!("unexpected trailing input '{}'", self.rest_snippet()));
        }
        let width = rows[0].len();
        if rows.len() != width || rows.iter().any(|r| r.len() != width) {
            return Err(ParseError {
                position: self.text.len(),
                message: format!(
                    "matrix must be square: got {} row(s) of widths {:?}",
                    rows.len(),
                    rows.iter().map(Vec::len).collect::<Vec<_>>()
                ),
            });
        }
        MatrixOperator::new(rows).map_err(|e| ParseError {
            position: 0,
            message: e.to_string(),
        })
    }
}

/// Parses one scalar-operator expression.
pub fn parse_scalar_operator(
    text: &str,
    nvars: usize,
    field: FieldSpec,
) -> Result<ScalarOperator, ParseError> {
    Parser::new(text, nvars, field).parse_expression()
}

/// Parses a matrix operator (matrix literal or bare scalar expression).
pub fn parse_matrix_operator(
    text: &str,
    nvars: usize,
    field: FieldSpec,
) -> Result<MatrixOperator, ParseError> {
    Parser::new(text, nvars, field).parse_matrix()
}

fn hasse_token(index: &MultiIndex) -> String {
    index
        .exponents()
        .iter()
        .enumerate()
        .filter(|&(_, &e)| e > 0)
        .map(|(k, &e)| format!("h({},{})", k + 1, e))
        .collect::<Vec<_>>()
        .join("*")
}

/// One summand as (is_negative, magnitude_text).
fn term_strings(index: &MultiIndex, coeff: &Poly) -> (bool, String) {
    let h = hasse_token(index);
    if coeff.num_terms() > 1 {
        // Multi-term coefficients keep their own signs inside parentheses.
        let inner = coeff.to_string();
        if h.is_empty() {
            (false, format!("({inner})"))
        } else {
            (false, format!("({inner})*{h}"))
        }
    } else {
        let s = coeff.to_string();
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest.to_string()),
            None => (false, s),
        };
        if h.is_empty() {
            (neg, body)
        } else if body == "1" {
            (neg, h)
        } else {
            (neg, format!("{body}*{h}"))
        }
    }
}

/// Prints a scalar operator in the DSL syntax; output re-parses to an equal
/// operator.
pub fn print_scalar_operator(op: &ScalarOperator) -> String {
    if op.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (pos, (index, coeff)) in op.terms().enumerate() {
        let (neg, body) = term_strings(index, coeff);
        if pos == 0 {
            if neg {
                out.push('-');
            }
        } else if neg {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
    out
}

/// Prints a matrix operator as a matrix literal (or a bare expression for
/// rank 1).
pub fn print_matrix_operator(d: &MatrixOperator) -> String {
    if d.rank() == 1 {
        return print_scalar_operator(d.entry(0, 0));
    }
    let rows: Vec<String> = (0..d.rank())
        .map(|i| {
            (0..d.rank())
                .map(|j| print_scalar_operator(d.entry(i, j)))
                .collect::<Vec<_>>()
                .join(", ")
        })
        .collect();
    format!("[ {} ]", rows.join(" ; "))
}
