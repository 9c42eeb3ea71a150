//! Boolean expression language for the update and output functions.
//!
//! Grammar, loosest binding first:
//!
//! ```text
//! iff     := implies ( "<->" implies )*
//! implies := or ( "->" implies )?          right-associative
//! or      := xor ( "|" xor )*
//! xor     := and ( "^" and )*
//! and     := unary ( "&" unary )*
//! unary   := "!" unary | atom
//! atom    := ident | "0" | "1" | "true" | "false" | "(" iff ")"
//! ident   := [A-Za-z_][A-Za-z0-9_]*
//! ```
//!
//! The lexer also accepts `¬ ∧ ∨ ⊕ ⊻ → ↔`, the two-character `∨̄` (read as
//! exclusive or) and the doubled forms `&&`, `||`.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::stp::bit_of;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Var(String),
    Const(bool),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Xor(Box<Expr>, Box<Expr>),
    Implies(Box<Expr>, Box<Expr>),
    Iff(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {column}: expected {expected}, found {found}")]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("truth table over {vars} variables needs {expected} values, got {actual}")]
    TableLength {
        vars: usize,
        expected: usize,
        actual: usize,
    },
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr, b: Expr) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr, b: Expr) -> Self {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn xor(a: Expr, b: Expr) -> Self {
        Expr::Xor(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Expr, b: Expr) -> Self {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Expr, b: Expr) -> Self {
        Expr::Iff(Box::new(a), Box::new(b))
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> Vec<&str> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a str>) {
            match e {
                Expr::Var(v) => {
                    if !out.contains(&v.as_str()) {
                        out.push(v);
                    }
                }
                Expr::Const(_) => {}
                Expr::Not(a) => walk(a, out),
                Expr::And(a, b)
                | Expr::Or(a, b)
                | Expr::Xor(a, b)
                | Expr::Implies(a, b)
                | Expr::Iff(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }

    pub fn eval<F>(&self, lookup: &F) -> Result<bool, ExprError>
    where
        F: Fn(&str) -> Option<bool>,
    {
        Ok(match self {
            Expr::Var(v) => lookup(v).ok_or_else(|| ExprError::UnboundVariable(v.clone()))?,
            Expr::Const(c) => *c,
            Expr::Not(a) => !a.eval(lookup)?,
            Expr::And(a, b) => a.eval(lookup)? & b.eval(lookup)?,
            Expr::Or(a, b) => a.eval(lookup)? | b.eval(lookup)?,
            Expr::Xor(a, b) => a.eval(lookup)? ^ b.eval(lookup)?,
            Expr::Implies(a, b) => !a.eval(lookup)? | b.eval(lookup)?,
            Expr::Iff(a, b) => a.eval(lookup)? == b.eval(lookup)?,
        })
    }

    pub fn eval_map(&self, assignment: &HashMap<String, bool>) -> Result<bool, ExprError> {
        self.eval(&|name: &str| assignment.get(name).copied())
    }

    /// Resolves variable names against `vars` so the expression can be
    /// evaluated from a packed index without string lookups.
    pub(crate) fn compile(&self, vars: &[String]) -> Result<Compiled, ExprError> {
        let bin = |a: &Expr, b: &Expr| -> Result<(Box<Compiled>, Box<Compiled>), ExprError> {
            Ok((Box::new(a.compile(vars)?), Box::new(b.compile(vars)?)))
        };
        Ok(match self {
            Expr::Var(v) => Compiled::Var(
                vars.iter()
                    .position(|x| x == v)
                    .ok_or_else(|| ExprError::UnboundVariable(v.clone()))?,
            ),
            Expr::Const(c) => Compiled::Const(*c),
            Expr::Not(a) => Compiled::Not(Box::new(a.compile(vars)?)),
            Expr::And(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::And(a, b)
            }
            Expr::Or(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Or(a, b)
            }
            Expr::Xor(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Xor(a, b)
            }
            Expr::Implies(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Implies(a, b)
            }
            Expr::Iff(a, b) => {
                let (a, b) = bin(a, b)?;
                Compiled::Iff(a, b)
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Iff(..) => 1,
            Expr::Implies(..) => 2,
            Expr::Or(..) => 3,
            Expr::Xor(..) => 4,
            Expr::And(..) => 5,
            Expr::Not(_) => 6,
            Expr::Var(_) | Expr::Const(_) => 7,
        }
    }
}

pub(crate) enum Compiled {
    Var(usize),
    Const(bool),
    Not(Box<Compiled>),
    And(Box<Compiled>, Box<Compiled>),
    Or(Box<Compiled>, Box<Compiled>),
    Xor(Box<Compiled>, Box<Compiled>),
    Implies(Box<Compiled>, Box<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
}

impl Compiled {
    pub(crate) fn eval<F: Fn(usize) -> bool + Copy>(&self, value: F) -> bool {
        match self {
            Compiled::Var(i) => value(*i),
            Compiled::Const(c) => *c,
            Compiled::Not(a) => !a.eval(value),
            Compiled::And(a, b) => a.eval(value) && b.eval(value),
            Compiled::Or(a, b) => a.eval(value) || b.eval(value),
            Compiled::Xor(a, b) => a.eval(value) ^ b.eval(value),
            Compiled::Implies(a, b) => !a.eval(value) || b.eval(value),
            Compiled::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, e: &Expr, parens: bool) -> fmt::Result {
            if parens {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        let p = self.precedence();
        match self {
            Expr::Var(v) => f.write_str(v),
            Expr::Const(true) => f.write_str("1"),
            Expr::Const(false) => f.write_str("0"),
            Expr::Not(a) => {
                f.write_str("!")?;
                child(f, a, a.precedence() < p)
            }
            Expr::Implies(a, b) => {
                child(f, a, a.precedence() <= p)?;
                f.write_str(" -> ")?;
                child(f, b, b.precedence() < p)
            }
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Xor(a, b) | Expr::Iff(a, b) => {
                let op = match self {
                    Expr::And(..) => " & ",
                    Expr::Or(..) => " | ",
                    Expr::Xor(..) => " ^ ",
                    _ => " <-> ",
                };
                child(f, a, a.precedence() < p)?;
                f.write_str(op)?;
                child(f, b, b.precedence() <= p)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Const(bool),
    Not,
    And,
    Or,
    Xor,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Ident(s) => write!(f, "identifier `{s}`"),
            Token::Const(b) => write!(f, "constant `{}`", u8::from(*b)),
            Token::Not => f.write_str("`!`"),
            Token::And => f.write_str("`&`"),
            Token::Or => f.write_str("`|`"),
            Token::Xor => f.write_str("`^`"),
            Token::Implies => f.write_str("`->`"),
            Token::Iff => f.write_str("`<->`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Token, usize)>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |col: usize, found: String| ParseError {
        column: col + 1,
        expected: "an operator, operand or parenthesis".into(),
        found,
    };
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        let next = chars.get(i + 1).copied();
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '(' => Token::LParen,
            ')' => Token::RParen,
            '!' | '¬' | '~' => Token::Not,
            '&' | '∧' => {
                if c == '&' && next == Some('&') {
                    i += 1;
                }
                Token::And
            }
            '|' => {
                if next == Some('|') {
                    i += 1;
                }
                Token::Or
            }
            '∨' => {
                // ∨ followed by a combining macron is the "∨̄" connective
                if next == Some('\u{0304}') {
                    i += 1;
                    Token::Xor
                } else {
                    Token::Or
                }
            }
            '^' | '⊕' | '⊻' => Token::Xor,
            '→' => Token::Implies,
            '↔' => Token::Iff,
            '-' if next == Some('>') => {
                i += 1;
                Token::Implies
            }
            '<' if next == Some('-') && chars.get(i + 2) == Some(&'>') => {
                i += 2;
                Token::Iff
            }
            '0' | '1' => {
                if next.is_some_and(|n| n.is_ascii_alphanumeric() || n == '_') {
                    return Err(err(start, format!("`{c}{}`", next.unwrap_or(' '))));
                }
                Token::Const(c == '1')
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                i = j - 1;
                match word.as_str() {
                    "true" => Token::Const(true),
                    "false" => Token::Const(false),
                    _ => Token::Ident(word),
                }
            }
            other => return Err(err(start, format!("`{other}`"))),
        };
        out.push((tok, start + 1));
        i += 1;
    }
    out.push((Token::End, chars.len() + 1));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].0.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        let (tok, column) = &self.tokens[self.pos];
        ParseError {
            column: *column,
            expected: expected.into(),
            found: tok.to_string(),
        }
    }

    fn iff(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.implies()?;
        while *self.peek() == Token::Iff {
            self.bump();
            lhs = Expr::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Expr, ParseError> {
        let lhs = self.or()?;
        if *self.peek() == Token::Implies {
            self.bump();
            return Ok(Expr::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.xor()?;
        while *self.peek() == Token::Or {
            self.bump();
            lhs = Expr::or(lhs, self.xor()?);
        }
        Ok(lhs)
    }

    fn xor(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.and()?;
        while *self.peek() == Token::Xor {
            self.bump();
            lhs = Expr::xor(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            lhs = Expr::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Token::Not {
            self.bump();
            return Ok(Expr::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Expr::Var(name))
            }
            Token::Const(b) => {
                self.bump();
                Ok(Expr::Const(b))
            }
            Token::LParen => {
                self.bump();
                let e = self.iff()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(e)
            }
            _ => Err(self.error("a variable, constant, `!` or `(`")),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let e = p.iff()?;
    if *p.peek() != Token::End {
        return Err(p.error("an operator or end of input"));
    }
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}

/// Values of a Boolean function over `vars`, indexed by the 0-based packed
/// index of the argument vector (first variable most significant, True first).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    vars: Vec<String>,
    values: Vec<bool>,
}

impl TruthTable {
    pub fn new(vars: Vec<String>, values: Vec<bool>) -> Result<Self, ExprError> {
        let expected = 1usize << vars.len();
        if values.len() != expected {
            return Err(ExprError::TableLength {
                vars: vars.len(),
                expected,
                actual: values.len(),
            });
        }
        Ok(Self { vars, values })
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    fn depends_on(&self, i: usize) -> bool {
        let k = self.vars.len();
        let stride = 1usize << (k - 1 - i);
        (0..self.values.len())
            .filter(|z| z & stride == 0)
            .any(|z| self.values[z] != self.values[z | stride])
    }

    /// Restriction to the variables the function actually depends on.
    fn support(&self) -> TruthTable {
        let keep: Vec<usize> = (0..self.vars.len())
            .filter(|&i| self.depends_on(i))
            .collect();
        let k = self.vars.len();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let values = (0..1usize << keep.len())
            .map(|z| {
                // dropped variables are irrelevant, so packing them as True is fine
                let full = keep.iter().enumerate().fold(0usize, |acc, (pos, &i)| {
                    if bit_of(z, keep.len(), pos) {
                        acc
                    } else {
                        acc | 1 << (k - 1 - i)
                    }
                });
                self.values[full]
            })
            .collect();
        TruthTable { vars, values }
    }
}

/// Tabulates `e` over `vars`.
pub fn to_truth_table(e: &Expr, vars: &[String]) -> Result<TruthTable, ExprError> {
    let compiled = e.compile(vars)?;
    let k = vars.len();
    let values = (0..1usize << k)
        .map(|z| compiled.eval(|i| bit_of(z, k, i)))
        .collect();
    Ok(TruthTable {
        vars: vars.to_vec(),
        values,
    })
}

/// Disjunction of minterms over the variables the table depends on.
///
/// Constant tables become `0`/`1` and a table equal to a single literal
/// collapses to that literal. No further minimization is attempted.
pub fn table_to_dnf(t: &TruthTable) -> Expr {
    let t = t.support();
    if t.values.iter().all(|&v| !v) {
        return Expr::Const(false);
    }
    if t.values.iter().all(|&v| v) {
        return Expr::Const(true);
    }
    if t.vars.len() == 1 {
        let v = Expr::Var(t.vars[0].clone());
        return if t.values[0] { v } else { Expr::not(v) };
    }
    let k = t.vars.len();
    let minterm = |z: usize| {
        t.vars
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let v = Expr::Var(name.clone());
                if bit_of(z, k, i) {
                    v
                } else {
                    Expr::not(v)
                }
            })
            .reduce(Expr::and)
            .expect("at least one variable")
    };
    t.values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v)
        .map(|(z, _)| minterm(z))
        .reduce(Expr::or)
        .expect("at least one true row")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    const EXAMPLE_Y: &str = "(x1 <-> x3) -> (x2 ^ x3)";

    #[test]
    fn parses_simple_or() {
        assert_eq!(
            parse("x3 | u").unwrap(),
            Expr::or(Expr::var("x3"), Expr::var("u"))
        );
    }

    #[test]
    fn implication_is_right_associative() {
        assert_eq!(
            parse("a -> b -> c").unwrap(),
            Expr::implies(
                Expr::var("a"),
                Expr::implies(Expr::var("b"), Expr::var("c"))
            )
        );
    }

    #[test]
    fn parses_output_equation() {
        let expected = Expr::implies(
            Expr::iff(Expr::var("x1"), Expr::var("x3")),
            Expr::xor(Expr::var("x2"), Expr::var("x3")),
        );
        assert_eq!(parse(EXAMPLE_Y).unwrap(), expected);
        assert_eq!(parse("(x1 ↔ x3) → (x2 ∨\u{0304} x3)").unwrap(), expected);
        assert_eq!(parse("(x1 ↔ x3) → (x2 ⊕ x3)").unwrap(), expected);
    }

    #[test]
    fn precedence_levels() {
        // ! > & > ^ > | > -> > <->
        let e = parse("!a & b ^ c | d -> e <-> f").unwrap();
        let expected = Expr::iff(
            Expr::implies(
                Expr::or(
                    Expr::xor(
                        Expr::and(Expr::not(Expr::var("a")), Expr::var("b")),
                        Expr::var("c"),
                    ),
                    Expr::var("d"),
                ),
                Expr::var("e"),
            ),
            Expr::var("f"),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn literals() {
        assert_eq!(parse("true").unwrap(), Expr::Const(true));
        assert_eq!(parse("0").unwrap(), Expr::Const(false));
        assert_eq!(
            parse("1 & false").unwrap(),
            Expr::and(Expr::Const(true), Expr::Const(false))
        );
    }

    #[test]
    fn rejects_malformed_input_with_position() {
        let e = parse("(a & b").unwrap_err();
        assert_eq!(e.column, 7);
        assert!(e.expected.contains(')'));
        let e = parse("a &").unwrap_err();
        assert_eq!(e.column, 4);
        let e = parse("a)").unwrap_err();
        assert_eq!(e.column, 2);
        let e = parse("a $ b").unwrap_err();
        assert_eq!(e.column, 3);
        assert!(parse("").is_err());
        assert!(parse("-> a").is_err());
        assert!(parse("10").is_err());
    }

    #[test]
    fn eval_semantics() {
        let none = |_: &str| None;
        assert!(!Expr::implies(Expr::Const(true), Expr::Const(false))
            .eval(&none)
            .unwrap());
        let y = parse(EXAMPLE_Y).unwrap();
        let at = |x1, x2, x3| {
            let m: HashMap<String, bool> = [("x1", x1), ("x2", x2), ("x3", x3)]
                .iter()
                .map(|(k, v)| (k.to_string(), *v))
                .collect();
            y.eval_map(&m).unwrap()
        };
        assert!(!at(true, true, true));
        assert!(at(true, true, false));
        assert_eq!(
            Expr::var("q").eval(&none),
            Err(ExprError::UnboundVariable("q".into()))
        );
    }

    #[test]
    fn truth_tables() {
        let t = to_truth_table(&Expr::var("x"), &names(&["x"])).unwrap();
        assert_eq!(t.values(), &[true, false]);
        let t = to_truth_table(&parse("a ^ b").unwrap(), &names(&["a", "b"])).unwrap();
        assert_eq!(t.values(), &[false, true, true, false]);
        let t = to_truth_table(&parse(EXAMPLE_Y).unwrap(), &names(&["x1", "x2", "x3"])).unwrap();
        // δ_2[2,1,1,1,1,1,1,2] with true ↦ 1
        let h = [2, 1, 1, 1, 1, 1, 1, 2];
        let expected: Vec<bool> = h.iter().map(|&d| d == 1).collect();
        assert_eq!(t.values(), expected.as_slice());
        assert!(to_truth_table(&Expr::var("z"), &names(&["x"])).is_err());
    }

    #[test]
    fn dnf_examples() {
        let x = TruthTable::new(names(&["x"]), vec![true, false]).unwrap();
        assert_eq!(table_to_dnf(&x), Expr::var("x"));
        let f = TruthTable::new(names(&["a", "b"]), vec![false; 4]).unwrap();
        assert_eq!(table_to_dnf(&f), Expr::Const(false));
        let t = TruthTable::new(names(&["a", "b"]), vec![true; 4]).unwrap();
        assert_eq!(table_to_dnf(&t), Expr::Const(true));
        let xor = TruthTable::new(names(&["a", "b"]), vec![false, true, true, false]).unwrap();
        assert_eq!(table_to_dnf(&xor).to_string(), "a & !b | !a & b");
        let neg = TruthTable::new(names(&["a", "b"]), vec![false, false, true, true]).unwrap();
        assert_eq!(table_to_dnf(&neg), Expr::not(Expr::var("a")));
    }

    #[test]
    fn dnf_round_trip_exhaustive_small() {
        for k in 0..=2usize {
            let vars: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
            let rows = 1usize << k;
            for bits in 0..(1u64 << rows) {
                let values: Vec<bool> = (0..rows).map(|r| bits >> r & 1 == 1).collect();
                let t = TruthTable::new(vars.clone(), values).unwrap();
                assert_eq!(to_truth_table(&table_to_dnf(&t), &vars).unwrap(), t);
            }
        }
    }

    #[test]
    fn table_length_checked() {
        assert!(TruthTable::new(names(&["a"]), vec![true]).is_err());
    }

    #[test]
    fn printer_parenthesizes_by_precedence() {
        let e = Expr::and(Expr::or(Expr::var("a"), Expr::var("b")), Expr::var("c"));
        assert_eq!(e.to_string(), "(a | b) & c");
        let e = Expr::implies(
            Expr::implies(Expr::var("a"), Expr::var("b")),
            Expr::var("c"),
        );
        assert_eq!(e.to_string(), "(a -> b) -> c");
        let e = Expr::not(Expr::and(Expr::var("a"), Expr::var("b")));
        assert_eq!(e.to_string(), "!(a & b)");
    }
}
