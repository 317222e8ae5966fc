//! DIMACS CNF reading and writing.
//!
//! The reader accepts comment lines (`c ...`) anywhere before or between
//! clauses and arbitrary whitespace, and lets a clause span several lines.
//! The writer emits the header, then one clause per line, no comments, and a
//! trailing newline.

use std::fmt::Write as _;

use super::{Clause, CnfError, CnfFormula, Literal};

pub fn parse_dimacs(text: &str) -> Result<CnfFormula, CnfError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses: Vec<Clause> = Vec::new();
    let mut current: Vec<Literal> = Vec::new();

    for (line_no, raw) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(CnfError::Header {
                    line: line_no,
                    msg: "duplicate problem line".into(),
                });
            }
            if !clauses.is_empty() || !current.is_empty() {
                return Err(CnfError::Header {
                    line: line_no,
                    msg: "problem line after clauses".into(),
                });
            }
            header = Some(parse_header(line, line_no)?);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(CnfError::Header {
                line: line_no,
                msg: "clause data before `p cnf` line".into(),
            });
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| CnfError::InvalidLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                let lits = std::mem::take(&mut current);
                clauses.push(Clause::checked(lits, clauses.len())?);
                continue;
            }
            if value.unsigned_abs() > num_vars as u64 {
                return Err(CnfError::LiteralOutOfRange {
                    literal: value,
                    num_vars,
                });
            }
            let lit = Literal::from_dimacs(value).ok_or_else(|| CnfError::InvalidLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            current.push(lit);
        }
    }

    let Some((num_vars, num_clauses)) = header else {
        return Err(CnfError::Header {
            line: 0,
            msg: "missing `p cnf` line".into(),
        });
    };
    if !current.is_empty() {
        return Err(CnfError::MissingTerminator);
    }
    if clauses.len() != num_clauses {
        return Err(CnfError::ClauseCountMismatch {
            declared: num_clauses,
            found: clauses.len(),
        });
    }
    CnfFormula::new(num_vars, clauses)
}

fn parse_header(line: &str, line_no: usize) -> Result<(usize, usize), CnfError> {
    let bad = |msg: &str| CnfError::Header {
        line: line_no,
        msg: msg.to_string(),
    };
    let fields: Vec<&str> = line.split_whitespace().collect();
    match fields.as_slice() {
        ["p", "cnf", n, m] => {
            let n = n.parse().map_err(|_| bad("variable count is not a number"))?;
            let m = m.parse().map_err(|_| bad("clause count is not a number"))?;
            Ok((n, m))
        }
        _ => Err(bad("expected `p cnf <vars> <clauses>`")),
    }
}

pub fn serialize_dimacs(formula: &CnfFormula) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses());
    for clause in formula.clauses() {
        for lit in clause.literals() {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}
