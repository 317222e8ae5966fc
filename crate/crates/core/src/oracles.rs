//! Ground-truth oracles over a formula: MaxSAT optimum, MCS/MUS membership
//! checks, one-witness finders and an exhaustive reference solver.
//!
//! Minimality is checked with single-element deletions only. For MCS, if
//! removing `S \ {i}` leaves an unsatisfiable formula for every `i`, then
//! removing any proper subset `S' ⊂ S` leaves a superset of one of those
//! formulas, which is unsatisfiable too. For MUS the argument is mirrored:
//! every proper subset lies inside some `S \ {i}`, and subsets of a
//! satisfiable clause set are satisfiable.
//!
//! Every check re-solves the restricted clause set from scratch.

use thiserror::Error;

use crate::cnf::{Assignment, ClauseSubset, CnfFormula};
use crate::engine::{self, SatStatus};

/// Largest variable count accepted by [`brute_force_solve`].
pub const BRUTE_FORCE_MAX_VARS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("formula is satisfiable; the query needs an unsatisfiable formula")]
    Satisfiable,
    #[error("subset length {actual} does not match clause count {expected}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{0} variables is too many for exhaustive enumeration (max {BRUTE_FORCE_MAX_VARS})")]
    TooManyVariables(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxSatResult {
    pub optimum: usize,
    /// Lexicographically smallest assignment (x1 first, 0 < 1) reaching
    /// `optimum`.
    pub witness: Assignment,
    /// Search nodes expanded by the branch and bound.
    pub nodes: u64,
}

/// Exact MaxSAT by depth-first branch and bound.
///
/// Variables are fixed in index order, `false` before `true`. A node is
/// pruned when `satisfied + undecided` clauses cannot beat the incumbent.
/// Since leaves are visited in lexicographic order and the incumbent only
/// changes on strict improvement, the witness is the lexicographically
/// smallest optimal assignment.
pub fn maxsat_optimum(formula: &CnfFormula) -> MaxSatResult {
    let n = formula.num_vars();
    let m = formula.num_clauses();
    let mut occurs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for (ci, clause) in formula.clauses().iter().enumerate() {
        for lit in clause.literals() {
            occurs[lit.index()].push((ci, lit.is_positive()));
        }
    }
    let remaining: Vec<usize> = formula.clauses().iter().map(|c| c.len()).collect();

    let mut search = MaxSatSearch {
        occurs: &occurs,
        m,
        satisfied_by: vec![0; m],
        remaining,
        satisfied: 0,
        falsified: 0,
        values: vec![false; n],
        best: None,
        best_witness: vec![false; n],
        nodes: 0,
    };
    search.descend(0);
    let optimum = search.best.unwrap_or(0);
    MaxSatResult {
        optimum,
        witness: Assignment::new(search.best_witness),
        nodes: search.nodes,
    }
}

struct MaxSatSearch<'a> {
    occurs: &'a [Vec<(usize, bool)>],
    m: usize,
    // how many assigned literals currently satisfy each clause
    satisfied_by: Vec<u32>,
    // unassigned literal count per clause
    remaining: Vec<usize>,
    satisfied: usize,
    falsified: usize,
    values: Vec<bool>,
    best: Option<usize>,
    best_witness: Vec<bool>,
    nodes: u64,
}

impl MaxSatSearch<'_> {
    fn descend(&mut self, var: usize) {
        self.nodes += 1;
        let upper = self.m - self.falsified;
        if let Some(best) = self.best {
            if upper <= best {
                return;
            }
        }
        if var == self.values.len() || self.satisfied == self.m {
            // remaining variables stay false: smallest completion
            for v in &mut self.values[var..] {
                *v = false;
            }
            self.best = Some(self.satisfied);
            self.best_witness.clone_from(&self.values);
            return;
        }
        for value in [false, true] {
            self.values[var] = value;
            self.apply(var, value);
            self.descend(var + 1);
            self.retract(var, value);
            if self.best == Some(self.m) {
                return;
            }
        }
    }

    fn apply(&mut self, var: usize, value: bool) {
        for &(ci, positive) in &self.occurs[var] {
            self.remaining[ci] -= 1;
            if positive == value {
                if self.satisfied_by[ci] == 0 {
                    self.satisfied += 1;
                }
                self.satisfied_by[ci] += 1;
            } else if self.remaining[ci] == 0 && self.satisfied_by[ci] == 0 {
                self.falsified += 1;
            }
        }
    }

    fn retract(&mut self, var: usize, value: bool) {
        for &(ci, positive) in &self.occurs[var] {
            if positive == value {
                self.satisfied_by[ci] -= 1;
                if self.satisfied_by[ci] == 0 {
                    self.satisfied -= 1;
                }
            } else if self.remaining[ci] == 0 && self.satisfied_by[ci] == 0 {
                self.falsified -= 1;
            }
            self.remaining[ci] += 1;
        }
    }
}

/// Exhaustive MaxSAT, used as a cross-check in tests.
pub fn brute_force_maxsat(formula: &CnfFormula) -> Result<usize, OracleError> {
    guard_vars(formula)?;
    let n = formula.num_vars();
    Ok((0u64..1 << n)
        .map(|mask| {
            let a = lex_assignment(mask, n);
            formula.clauses().iter().filter(|c| c.is_satisfied_by(&a)).count()
        })
        .max()
        .unwrap_or(0))
}

/// Exact verdict by enumerating all assignments in lexicographic order; the
/// model returned is the smallest satisfying one.
pub fn brute_force_solve(formula: &CnfFormula) -> Result<(SatStatus, Option<Assignment>), OracleError> {
    guard_vars(formula)?;
    let n = formula.num_vars();
    for mask in 0u64..1 << n {
        let a = lex_assignment(mask, n);
        if formula.clauses().iter().all(|c| c.is_satisfied_by(&a)) {
            return Ok((SatStatus::Sat, Some(a)));
        }
    }
    Ok((SatStatus::Unsat, None))
}

fn guard_vars(formula: &CnfFormula) -> Result<(), OracleError> {
    if formula.num_vars() > BRUTE_FORCE_MAX_VARS {
        return Err(OracleError::TooManyVariables(formula.num_vars()));
    }
    Ok(())
}

// x1 is the most significant bit so that counting up is lexicographic
fn lex_assignment(mask: u64, n: usize) -> Assignment {
    Assignment::new((0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect())
}

/// Counts engine invocations made by the subset oracles.
#[derive(Debug, Default)]
struct CallCounter(u64);

impl CallCounter {
    fn satisfiable(&mut self, formula: &CnfFormula, keep: impl Fn(usize) -> bool) -> bool {
        self.0 += 1;
        let clauses = formula.select(keep);
        engine::solve_clauses(formula.num_vars(), &clauses).is_sat()
    }
}

fn require_unsat(formula: &CnfFormula, calls: &mut CallCounter) -> Result<(), OracleError> {
    if calls.satisfiable(formula, |_| true) {
        return Err(OracleError::Satisfiable);
    }
    Ok(())
}

fn check_len(formula: &CnfFormula, subset: &ClauseSubset) -> Result<(), OracleError> {
    if subset.len() != formula.num_clauses() {
        return Err(OracleError::LengthMismatch {
            expected: formula.num_clauses(),
            actual: subset.len(),
        });
    }
    Ok(())
}

/// True iff removing `subset` restores satisfiability and no proper subset
/// does. The empty subset is never an MCS of an unsatisfiable formula.
pub fn check_mcs(formula: &CnfFormula, subset: &ClauseSubset) -> Result<bool, OracleError> {
    check_len(formula, subset)?;
    let mut calls = CallCounter::default();
    require_unsat(formula, &mut calls)?;
    if subset.is_empty() {
        return Ok(false);
    }
    if !calls.satisfiable(formula, |i| !subset.contains(i)) {
        return Ok(false);
    }
    for i in subset.indices() {
        if calls.satisfiable(formula, |j| j == i || !subset.contains(j)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff `subset` is unsatisfiable and every proper subset is
/// satisfiable.
pub fn check_mus(formula: &CnfFormula, subset: &ClauseSubset) -> Result<bool, OracleError> {
    check_len(formula, subset)?;
    let mut calls = CallCounter::default();
    require_unsat(formula, &mut calls)?;
    if subset.is_empty() {
        return Ok(false);
    }
    if calls.satisfiable(formula, |i| subset.contains(i)) {
        return Ok(false);
    }
    for i in subset.indices() {
        if !calls.satisfiable(formula, |j| j != i && subset.contains(j)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A subset found by one of the `find_one_*` routines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetWitness {
    pub subset: ClauseSubset,
    pub solver_calls: u64,
}

/// Linear-search MCS.
///
/// Grows a maximal satisfiable clause set by trying each clause in index
/// order, takes its complement, then drops any clause whose return still
/// leaves the remainder satisfiable.
pub fn find_one_mcs(formula: &CnfFormula) -> Result<ClauseSubset, OracleError> {
    find_one_mcs_counted(formula).map(|w| w.subset)
}

pub fn find_one_mcs_counted(formula: &CnfFormula) -> Result<SubsetWitness, OracleError> {
    let m = formula.num_clauses();
    let mut calls = CallCounter::default();
    require_unsat(formula, &mut calls)?;

    let mut satisfiable_set = ClauseSubset::empty(m);
    for i in 0..m {
        satisfiable_set.insert(i);
        if !calls.satisfiable(formula, |j| satisfiable_set.contains(j)) {
            satisfiable_set.remove(i);
        }
    }
    let mut correction = satisfiable_set.complement();
    for i in correction.indices() {
        correction.remove(i);
        if !calls.satisfiable(formula, |j| !correction.contains(j)) {
            correction.insert(i);
        }
    }
    Ok(SubsetWitness {
        subset: correction,
        solver_calls: calls.0,
    })
}

/// Deletion-based MUS extraction in clause index order.
pub fn find_one_mus(formula: &CnfFormula) -> Result<ClauseSubset, OracleError> {
    find_one_mus_counted(formula).map(|w| w.subset)
}

pub fn find_one_mus_counted(formula: &CnfFormula) -> Result<SubsetWitness, OracleError> {
    let m = formula.num_clauses();
    let mut calls = CallCounter::default();
    require_unsat(formula, &mut calls)?;

    let mut core = ClauseSubset::full(m);
    for i in 0..m {
        core.remove(i);
        if calls.satisfiable(formula, |j| core.contains(j)) {
            core.insert(i);
        }
    }
    Ok(SubsetWitness {
        subset: core,
        solver_calls: calls.0,
    })
}
