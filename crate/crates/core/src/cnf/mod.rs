//! CNF formulas, truth assignments and clause subsets.
//!
//! Variables are 1-based everywhere a user can see them (DIMACS, answer
//! strings, rendered prompts) and 0-based inside vectors. Clause order is
//! significant: MCS/MUS answers address clauses by position.

mod dimacs;

pub use dimacs::{parse_dimacs, serialize_dimacs};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("line {line}: malformed header: {msg}")]
    Header { line: usize, msg: String },
    #[error("line {line}: invalid literal `{token}`")]
    InvalidLiteral { line: usize, token: String },
    #[error("literal {literal} exceeds declared variable count {num_vars}")]
    LiteralOutOfRange { literal: i64, num_vars: usize },
    #[error("header declares {declared} clauses but {found} were found")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("last clause is missing its terminating 0")]
    MissingTerminator,
    #[error("variable {var} occurs more than once in clause {clause}")]
    DuplicateVariable { clause: usize, var: u32 },
    #[error("clause {clause} is empty")]
    EmptyClause { clause: usize },
    #[error("formula has no clauses")]
    NoClauses,
    #[error("formula has no variables")]
    NoVariables,
    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("restriction eliminates every clause")]
    AllClausesEliminated,
    #[error("invalid bit `{0}` (expected '0' or '1')")]
    InvalidBit(char),
}

/// A variable occurrence. `var` is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    /// Panics if `var` is zero.
    pub fn new(var: u32, positive: bool) -> Self {
        assert!(var >= 1, "variables are 1-based");
        Self { var, positive }
    }

    pub fn pos(var: u32) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: u32) -> Self {
        Self::new(var, false)
    }

    /// Signed DIMACS encoding; `None` for 0 or values outside `u32`.
    pub fn from_dimacs(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        let var = u32::try_from(value.unsigned_abs()).ok()?;
        Some(Self::new(var, value > 0))
    }

    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            i64::from(self.var)
        } else {
            -i64::from(self.var)
        }
    }

    pub fn var(self) -> u32 {
        self.var
    }

    /// 0-based variable index.
    pub fn index(self) -> usize {
        self.var as usize - 1
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Self {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Truth value of this literal under `assignment`.
    pub fn eval(self, assignment: &Assignment) -> bool {
        assignment.value(self.index()) == self.positive
    }
}

impl std::ops::Not for Literal {
    type Output = Literal;

    fn not(self) -> Literal {
        self.negated()
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A non-empty disjunction over distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Rejects empty clauses and clauses mentioning a variable twice.
    pub fn new(literals: Vec<Literal>) -> Result<Self, CnfError> {
        Self::checked(literals, 0)
    }

    fn checked(literals: Vec<Literal>, position: usize) -> Result<Self, CnfError> {
        if literals.is_empty() {
            return Err(CnfError::EmptyClause { clause: position + 1 });
        }
        for (i, lit) in literals.iter().enumerate() {
            if literals[..i].iter().any(|other| other.var == lit.var) {
                return Err(CnfError::DuplicateVariable {
                    clause: position + 1,
                    var: lit.var,
                });
            }
        }
        Ok(Self { literals })
    }

    /// Builds a clause from signed DIMACS integers.
    pub fn from_dimacs(values: &[i64]) -> Result<Self, CnfError> {
        let literals = values
            .iter()
            .map(|&v| {
                Literal::from_dimacs(v).ok_or(CnfError::InvalidLiteral {
                    line: 0,
                    token: v.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(literals)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> bool {
        self.literals.iter().any(|lit| lit.eval(assignment))
    }

    pub fn contains_var(&self, var: u32) -> bool {
        self.literals.iter().any(|lit| lit.var == var)
    }

    pub(crate) fn literals_mut(&mut self) -> &mut [Literal] {
        &mut self.literals
    }
}

/// Conjunction of clauses over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, CnfError> {
        if num_vars == 0 {
            return Err(CnfError::NoVariables);
        }
        if clauses.is_empty() {
            return Err(CnfError::NoClauses);
        }
        for clause in &clauses {
            for lit in clause.literals() {
                if lit.var as usize > num_vars {
                    return Err(CnfError::LiteralOutOfRange {
                        literal: lit.to_dimacs(),
                        num_vars,
                    });
                }
            }
        }
        Ok(Self { num_vars, clauses })
    }

    /// Convenience constructor from signed DIMACS clause lists.
    pub fn from_dimacs_clauses(num_vars: usize, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let lits = c
                    .iter()
                    .map(|&v| {
                        Literal::from_dimacs(v).ok_or(CnfError::InvalidLiteral {
                            line: i + 1,
                            token: v.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Clause::checked(lits, i)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(num_vars, clauses)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, index: usize) -> &Clause {
        &self.clauses[index]
    }

    pub(crate) fn clauses_mut(&mut self) -> &mut [Clause] {
        &mut self.clauses
    }

    pub fn num_literals(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    /// Sorted clause widths, used to compare pair members structurally.
    pub fn width_multiset(&self) -> Vec<usize> {
        let mut widths: Vec<usize> = self.clauses.iter().map(Clause::len).collect();
        widths.sort_unstable();
        widths
    }

    /// Number of satisfied clauses and the per-clause truth vector.
    pub fn evaluate(&self, assignment: &Assignment) -> Result<Evaluation, CnfError> {
        self.check_assignment(assignment)?;
        let per_clause: Vec<bool> = self.clauses.iter().map(|c| c.is_satisfied_by(assignment)).collect();
        let satisfied_count = per_clause.iter().filter(|&&b| b).count();
        Ok(Evaluation {
            satisfied_count,
            per_clause,
        })
    }

    pub fn is_satisfied_by(&self, assignment: &Assignment) -> Result<bool, CnfError> {
        self.check_assignment(assignment)?;
        Ok(self.clauses.iter().all(|c| c.is_satisfied_by(assignment)))
    }

    fn check_assignment(&self, assignment: &Assignment) -> Result<(), CnfError> {
        if assignment.len() != self.num_vars {
            return Err(CnfError::LengthMismatch {
                expected: self.num_vars,
                actual: assignment.len(),
            });
        }
        Ok(())
    }

    /// Keeps or removes the clauses flagged in `subset`, preserving order and
    /// the variable count.
    pub fn restrict(&self, subset: &ClauseSubset, mode: RestrictMode) -> Result<CnfFormula, CnfError> {
        if subset.len() != self.clauses.len() {
            return Err(CnfError::LengthMismatch {
                expected: self.clauses.len(),
                actual: subset.len(),
            });
        }
        let keep_flag = mode == RestrictMode::Keep;
        let clauses: Vec<Clause> = self
            .clauses
            .iter()
            .zip(subset.mask())
            .filter(|(_, &in_subset)| in_subset == keep_flag)
            .map(|(c, _)| c.clone())
            .collect();
        if clauses.is_empty() {
            return Err(CnfError::AllClausesEliminated);
        }
        Ok(CnfFormula {
            num_vars: self.num_vars,
            clauses,
        })
    }

    /// Clauses selected by `keep`, without the non-empty requirement of
    /// [`CnfFormula::restrict`]. Oracles use this: the empty conjunction is
    /// trivially satisfiable.
    pub(crate) fn select(&self, keep: impl Fn(usize) -> bool) -> Vec<Clause> {
        self.clauses
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, c)| c.clone())
            .collect()
    }
}

/// Result of [`CnfFormula::evaluate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfied_count: usize,
    pub per_clause: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RestrictMode {
    /// Drop the clauses in the subset.
    Remove,
    /// Keep only the clauses in the subset.
    Keep,
}

/// Truth values for `x1..xn`; index `i` holds `x_{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn all_false(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// Bit `i` of `mask` (least significant first) becomes `x_{i+1}`.
    pub fn from_mask(mask: u64, n: usize) -> Self {
        Self((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn from_bits(bits: &str) -> Result<Self, CnfError> {
        parse_bits(bits).map(Self)
    }

    pub fn to_bits(&self) -> String {
        bits_to_string(&self.0)
    }

    pub fn value(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flip(&mut self, index: usize) {
        self.0[index] = !self.0[index];
    }
}

/// A set of clause positions, stored as a membership mask of length m.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseSubset(Vec<bool>);

impl ClauseSubset {
    pub fn new(mask: Vec<bool>) -> Self {
        Self(mask)
    }

    pub fn empty(m: usize) -> Self {
        Self(vec![false; m])
    }

    pub fn full(m: usize) -> Self {
        Self(vec![true; m])
    }

    /// From 0-based clause indices. Panics on an index `>= m`.
    pub fn from_indices(m: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut mask = vec![false; m];
        for i in indices {
            mask[i] = true;
        }
        Self(mask)
    }

    /// Bit `i` of `mask` (least significant first) marks clause `i`.
    pub fn from_mask(mask: u64, m: usize) -> Self {
        Self((0..m).map(|i| mask >> i & 1 == 1).collect())
    }

    /// Bit string where position `i` refers to clause `i + 1`.
    pub fn from_bits(bits: &str) -> Result<Self, CnfError> {
        parse_bits(bits).map(Self)
    }

    pub fn to_bits(&self) -> String {
        bits_to_string(&self.0)
    }

    pub fn mask(&self) -> &[bool] {
        &self.0
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0[index]
    }

    pub fn insert(&mut self, index: usize) {
        self.0[index] = true;
    }

    pub fn remove(&mut self, index: usize) {
        self.0[index] = false;
    }

    /// 0-based member indices in increasing order.
    pub fn indices(&self) -> Vec<usize> {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i).collect()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    pub fn complement(&self) -> Self {
        Self(self.0.iter().map(|b| !b).collect())
    }
}

fn parse_bits(bits: &str) -> Result<Vec<bool>, CnfError> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(CnfError::InvalidBit(other)),
        })
        .collect()
}

fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}
