//! MATH notation: `(x1 ∨ ¬x2 ∨ x3) ∧ (x1)`.
//!
//! The parser accepts both the Unicode and the ASCII (`|`, `&`, `~`) symbol
//! sets and any whitespace between tokens.

use thiserror::Error;

use super::Symbols;
use crate::cnf::{Clause, CnfError, CnfFormula, Literal};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MathParseError {
    #[error("at character {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

pub(super) fn render(formula: &CnfFormula, symbols: Symbols) -> String {
    let or = format!(" {} ", symbols.disj());
    let and = format!(" {} ", symbols.conj());
    formula
        .clauses()
        .iter()
        .map(|clause| {
            let lits: Vec<String> = clause
                .literals()
                .iter()
                .map(|lit| {
                    if lit.is_positive() {
                        format!("x{}", lit.var())
                    } else {
                        format!("{}x{}", symbols.neg_sign(), lit.var())
                    }
                })
                .collect();
            format!("({})", lits.join(&or))
        })
        .collect::<Vec<_>>()
        .join(&and)
}

/// Parses MATH text; the variable count is the largest index mentioned.
pub fn parse_math(text: &str) -> Result<CnfFormula, MathParseError> {
    let clauses = parse_clauses(text)?;
    let n = clauses
        .iter()
        .flat_map(|c| c.literals())
        .map(|l| l.var() as usize)
        .max()
        .unwrap_or(0);
    Ok(CnfFormula::new(n, clauses)?)
}

/// Parses MATH text over a known variable count (MATH text alone cannot
/// express variables that occur in no clause).
pub fn parse_math_with_vars(text: &str, num_vars: usize) -> Result<CnfFormula, MathParseError> {
    Ok(CnfFormula::new(num_vars, parse_clauses(text)?)?)
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Or,
    And,
    Lit(Literal),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, MathParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = i;
        i += 1;
        let token = match c {
            c if c.is_whitespace() => continue,
            '(' => Token::Open,
            ')' => Token::Close,
            '∨' | '|' => Token::Or,
            '∧' | '&' => Token::And,
            '¬' | '~' | 'x' => {
                let positive = c == 'x';
                if !positive {
                    while i < chars.len() && chars[i].is_whitespace() {
                        i += 1;
                    }
                    if chars.get(i) != Some(&'x') {
                        return Err(syntax(i, "expected `x` after negation"));
                    }
                    i += 1;
                }
                let digits_start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[digits_start..i].iter().collect();
                let var: u32 = digits
                    .parse()
                    .ok()
                    .filter(|&v| v >= 1)
                    .ok_or_else(|| syntax(digits_start, "expected a positive variable index"))?;
                Token::Lit(Literal::new(var, positive))
            }
            other => return Err(syntax(start, &format!("unexpected character `{other}`"))),
        };
        tokens.push((start, token));
    }
    Ok(tokens)
}

fn syntax(pos: usize, msg: &str) -> MathParseError {
    MathParseError::Syntax {
        pos,
        msg: msg.to_string(),
    }
}

fn parse_clauses(text: &str) -> Result<Vec<Clause>, MathParseError> {
    let tokens = tokenize(text)?;
    let end = text.chars().count();
    let mut iter = tokens.into_iter().peekable();
    let mut clauses = Vec::new();
    loop {
        match iter.next() {
            Some((_, Token::Open)) => {}
            Some((pos, _)) => return Err(syntax(pos, "expected `(`")),
            None => return Err(syntax(end, "expected a clause")),
        }
        let mut lits = Vec::new();
        loop {
            match iter.next() {
                Some((_, Token::Lit(lit))) => lits.push(lit),
                Some((pos, _)) => return Err(syntax(pos, "expected a literal")),
                None => return Err(syntax(end, "unterminated clause")),
            }
            match iter.next() {
                Some((_, Token::Or)) => continue,
                Some((_, Token::Close)) => break,
                Some((pos, _)) => return Err(syntax(pos, "expected `∨` or `)`")),
                None => return Err(syntax(end, "unterminated clause")),
            }
        }
        let index = clauses.len();
        clauses.push(Clause::new(lits).map_err(|e| match e {
            CnfError::DuplicateVariable { var, .. } => CnfError::DuplicateVariable { clause: index + 1, var },
            other => other,
        })?);
        match iter.next() {
            Some((_, Token::And)) => continue,
            Some((pos, _)) => return Err(syntax(pos, "expected `∧` between clauses")),
            None => break,
        }
    }
    Ok(clauses)
}
