//! Instrumented DPLL solver.
//!
//! Two watched literals per clause, chronological backtracking, no learning
//! and no restarts. Branching always picks the lowest-index unassigned
//! variable and tries `true` first, so runs are fully deterministic.
//!
//! Counter definitions:
//! - `decisions`: one per branching choice (the first branch of a variable).
//!   Taking the second branch after backtracking is not a decision.
//! - `conflicts`: one per falsified clause discovered, including a
//!   contradictory unit clause in the input.
//! - `propagations`: one per literal assigned because a clause became unit,
//!   input unit clauses included.

use serde::{Deserialize, Serialize};

use crate::cnf::{Assignment, Clause, CnfFormula, Literal};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolverStats {
    pub decisions: u64,
    pub conflicts: u64,
    pub propagations: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SatStatus {
    Sat,
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub status: SatStatus,
    /// Present iff `status` is SAT.
    pub model: Option<Assignment>,
    pub stats: SolverStats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        self.status == SatStatus::Sat
    }
}

pub fn solve(formula: &CnfFormula) -> SolveResult {
    solve_clauses(formula.num_vars(), formula.clauses())
}

pub fn is_satisfiable(formula: &CnfFormula) -> bool {
    solve(formula).is_sat()
}

/// Solves an arbitrary clause list over `num_vars` variables. An empty list
/// is satisfiable.
pub(crate) fn solve_clauses(num_vars: usize, clauses: &[Clause]) -> SolveResult {
    Solver::new(num_vars, clauses).run()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Value {
    Unassigned,
    True,
    False,
}

// literal code: 2 * var_index + (negative as usize)
fn code(lit: Literal) -> usize {
    2 * lit.index() + usize::from(!lit.is_positive())
}

fn var_of(code: usize) -> usize {
    code >> 1
}

struct Level {
    trail_start: usize,
    decision: usize,
    flipped: bool,
}

struct Solver {
    values: Vec<Value>,
    clauses: Vec<Vec<usize>>,
    units: Vec<usize>,
    watches: Vec<Vec<usize>>,
    trail: Vec<usize>,
    queue_head: usize,
    levels: Vec<Level>,
    stats: SolverStats,
}

impl Solver {
    fn new(num_vars: usize, input: &[Clause]) -> Self {
        let mut clauses = Vec::with_capacity(input.len());
        let mut units = Vec::new();
        let mut watches = vec![Vec::new(); 2 * num_vars];
        for clause in input {
            let lits: Vec<usize> = clause.literals().iter().map(|&l| code(l)).collect();
            if lits.len() == 1 {
                units.push(lits[0]);
                continue;
            }
            let idx = clauses.len();
            watches[lits[0]].push(idx);
            watches[lits[1]].push(idx);
            clauses.push(lits);
        }
        Self {
            values: vec![Value::Unassigned; num_vars],
            clauses,
            units,
            watches,
            trail: Vec::with_capacity(num_vars),
            queue_head: 0,
            levels: Vec::new(),
            stats: SolverStats::default(),
        }
    }

    fn lit_value(&self, lit: usize) -> Value {
        match self.values[var_of(lit)] {
            Value::Unassigned => Value::Unassigned,
            Value::True if lit & 1 == 0 => Value::True,
            Value::False if lit & 1 == 1 => Value::True,
            _ => Value::False,
        }
    }

    fn assign(&mut self, lit: usize) {
        self.values[var_of(lit)] = if lit & 1 == 0 { Value::True } else { Value::False };
        self.trail.push(lit);
    }

    /// Returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.queue_head < self.trail.len() {
            let falsified = self.trail[self.queue_head] ^ 1;
            self.queue_head += 1;
            let mut watchers = std::mem::take(&mut self.watches[falsified]);
            let mut i = 0;
            let mut conflict = false;
            while i < watchers.len() {
                let ci = watchers[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                if self.lit_value(other) == Value::True {
                    i += 1;
                    continue;
                }
                let replacement =
                    (2..self.clauses[ci].len()).find(|&k| self.lit_value(self.clauses[ci][k]) != Value::False);
                if let Some(k) = replacement {
                    let clause = &mut self.clauses[ci];
                    clause.swap(1, k);
                    let new_watch = clause[1];
                    self.watches[new_watch].push(ci);
                    watchers.swap_remove(i);
                    continue;
                }
                if self.lit_value(other) == Value::False {
                    self.stats.conflicts += 1;
                    conflict = true;
                    break;
                }
                self.stats.propagations += 1;
                self.assign(other);
                i += 1;
            }
            self.watches[falsified].extend(watchers);
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, trail_len: usize) {
        for &lit in &self.trail[trail_len..] {
            self.values[var_of(lit)] = Value::Unassigned;
        }
        self.trail.truncate(trail_len);
        self.queue_head = trail_len;
    }

    fn unsat(&self) -> SolveResult {
        SolveResult {
            status: SatStatus::Unsat,
            model: None,
            stats: self.stats,
        }
    }

    fn run(mut self) -> SolveResult {
        for unit in std::mem::take(&mut self.units) {
            match self.lit_value(unit) {
                Value::True => {}
                Value::False => {
                    self.stats.conflicts += 1;
                    return self.unsat();
                }
                Value::Unassigned => {
                    self.stats.propagations += 1;
                    self.assign(unit);
                }
            }
        }

        let mut next_var = 0;
        loop {
            if !self.propagate() {
                // chronological backtracking: reopen the deepest untried branch
                loop {
                    let Some(level) = self.levels.pop() else {
                        return self.unsat();
                    };
                    self.undo_to(level.trail_start);
                    if !level.flipped {
                        let lit = level.decision ^ 1;
                        self.levels.push(Level {
                            trail_start: level.trail_start,
                            decision: lit,
                            flipped: true,
                        });
                        self.assign(lit);
                        break;
                    }
                }
                next_var = 0;
                continue;
            }
            while next_var < self.values.len() && self.values[next_var] != Value::Unassigned {
                next_var += 1;
            }
            if next_var == self.values.len() {
                let model = Assignment::new(self.values.iter().map(|&v| v == Value::True).collect());
                return SolveResult {
                    status: SatStatus::Sat,
                    model: Some(model),
                    stats: self.stats,
                };
            }
            self.stats.decisions += 1;
            let lit = 2 * next_var;
            self.levels.push(Level {
                trail_start: self.trail.len(),
                decision: lit,
                flipped: false,
            });
            self.assign(lit);
        }
    }
}
