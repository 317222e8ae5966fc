//! Brute-force reference oracles shared by the integration tests.
//!
//! Everything here works directly from assignments and clause masks and never
//! calls the engine or the oracles module, so it can be used to check them.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use satreason::{Clause, CnfFormula, Literal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula with `n` in `1..=max_n`, `m` in `1..=max_m` and clause
/// widths in `1..=min(n, 4)`.
pub fn random_formula(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> CnfFormula {
    let n = rng.gen_range(1..=max_n);
    let m = rng.gen_range(1..=max_m);
    random_formula_with(rng, n, m, 4)
}

pub fn random_formula_with(rng: &mut ChaCha8Rng, n: usize, m: usize, max_width: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let k = rng.gen_range(1..=n.min(max_width));
            let mut vars: Vec<u32> = (1..=n as u32).collect();
            for i in 0..k {
                let j = rng.gen_range(i..n);
                vars.swap(i, j);
            }
            Clause::new(vars[..k].iter().map(|&v| Literal::new(v, rng.gen_bool(0.5))).collect()).unwrap()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// Draws random formulas until one is unsatisfiable by exhaustive check.
pub fn random_unsat_formula(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> CnfFormula {
    loop {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(2..=max_m);
        let f = random_formula_with(rng, n, m, 3);
        if !exhaustive_sat(&f) {
            return f;
        }
    }
}

/// Assignment from a mask where bit `i` holds `x_{i+1}`.
pub fn assignment_bits(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| mask >> i & 1 == 1).collect()
}

pub fn clause_true(clause: &Clause, bits: &[bool]) -> bool {
    clause.literals().iter().any(|l| bits[l.index()] == l.is_positive())
}

/// Mask of clauses satisfied by the assignment `alpha`.
pub fn satisfied_mask(f: &CnfFormula, alpha: u64) -> u64 {
    let bits = assignment_bits(alpha, f.num_vars());
    f.clauses()
        .iter()
        .enumerate()
        .filter(|(_, c)| clause_true(c, &bits))
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

pub fn exhaustive_sat(f: &CnfFormula) -> bool {
    let full = (1u64 << f.num_clauses()) - 1;
    (0..1u64 << f.num_vars()).any(|a| satisfied_mask(f, a) == full)
}

pub fn exhaustive_models(f: &CnfFormula) -> Vec<u64> {
    let full = (1u64 << f.num_clauses()) - 1;
    (0..1u64 << f.num_vars())
        .filter(|&a| satisfied_mask(f, a) == full)
        .collect()
}

pub fn exhaustive_max(f: &CnfFormula) -> usize {
    (0..1u64 << f.num_vars())
        .map(|a| satisfied_mask(f, a).count_ones() as usize)
        .max()
        .unwrap()
}

/// `sat[mask]` says whether the clauses in `mask` are jointly satisfiable.
pub struct SubsetTable {
    pub m: usize,
    sat: Vec<bool>,
}

impl SubsetTable {
    pub fn new(f: &CnfFormula) -> Self {
        let m = f.num_clauses();
        assert!(m <= 20);
        let mut sat = vec![false; 1 << m];
        for a in 0..1u64 << f.num_vars() {
            sat[satisfied_mask(f, a) as usize] = true;
        }
        // close downward: any subset of a satisfiable set is satisfiable
        for bit in 0..m {
            for mask in 0..1usize << m {
                if mask & 1 << bit == 0 && sat[mask | 1 << bit] {
                    sat[mask] = true;
                }
            }
        }
        Self { m, sat }
    }

    pub fn full(&self) -> usize {
        (1 << self.m) - 1
    }

    pub fn keep_sat(&self, mask: usize) -> bool {
        self.sat[mask]
    }

    pub fn remove_sat(&self, mask: usize) -> bool {
        self.sat[self.full() ^ mask]
    }

    /// Every proper subset of `s`, including the empty set.
    fn proper_subsets(s: usize) -> impl Iterator<Item = usize> {
        let mut next = if s == 0 { None } else { Some((s - 1) & s) };
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == 0 { None } else { Some((cur - 1) & s) };
            Some(cur)
        })
    }

    /// The MCS definition checked literally against every proper subset.
    pub fn is_mcs(&self, s: usize) -> bool {
        self.remove_sat(s) && Self::proper_subsets(s).all(|sub| !self.remove_sat(sub))
    }

    /// The MUS definition checked literally against every proper subset.
    pub fn is_mus(&self, s: usize) -> bool {
        !self.keep_sat(s) && Self::proper_subsets(s).all(|sub| self.keep_sat(sub))
    }
}

pub fn mask_to_bits(mask: usize, m: usize) -> String {
    (0..m).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// Reference format rewards: (text, tag_count_reward, format_match_reward),
/// computed with the original Python reward functions.
pub const REWARD_GOLDEN: [(&str, f64, f64); 25] = [
    ("", 0.0, 0.0),
    ("<think>a</think>\n<answer>b</answer>", 1.0, 1.0),
    ("<think>a</think><answer>b</answer>", 1.0, 1.0),
    ("<think></think><think>", 0.25, 0.0),
    ("<think>reason</think>", 0.5, 0.0),
    ("<answer>0101</answer>", 0.5, 0.0),
    ("<think>x</think>\n\n<answer>1</answer>", 1.0, 0.0),
    (
        "<think>x</think> <answer>1</answer> trailing text",
        1.0,
        0.7142857142857143,
    ),
    ("prefix <think>x</think>\n<answer>1</answer>", 1.0, 0.8333333333333334),
    (
        "<think>a</think>\n<answer>b</answer><think>c</think>\n<answer>d</answer>",
        0.0,
        0.5,
    ),
    (
        "<think>multi\nline\nreasoning</think>\n<answer>\n0110\n</answer>\n",
        1.0,
        0.9833333333333333,
    ),
    (
        "<think>\u{e9} unicode \u{fc}</think>\n<answer>\u{3bb}</answer>xyz",
        1.0,
        0.9375,
    ),
    ("<answer>1</answer><think>x</think>", 1.0, 0.0),
    ("<think><think>nested</think></think>\n<answer>1</answer>", 0.5, 1.0),
    ("<think>a</think>\t<answer>b</answer>", 1.0, 1.0),
    ("<think>a</think>\r\n<answer>b</answer>", 1.0, 0.0),
    ("just some text without tags", 0.0, 0.0),
    ("</think></answer>", 0.5, 0.0),
    (
        "<think>a</think>\n<answer>b</answer>zzzzzzzzzzzzzzzzzzzzzzzzzzzzzzzzzz",
        1.0,
        0.5072463768115942,
    ),
    (
        "<think></think><answer></answer>zzzzzzzzzzzzzzzzzzzzzzzzzzzzzzzz",
        1.0,
        0.5,
    ),
    ("<THINK>a</THINK>\n<ANSWER>b</ANSWER>", 0.0, 0.0),
    ("<think>a</think>\u{2003}<answer>b</answer>", 1.0, 1.0),
    ("<think>a</think>\u{1c}<answer>b</answer>", 1.0, 1.0),
    ("<think>a</think>\n<answer>b", 0.75, 0.0),
    (
        "Answer: 0101\n<think>ok</think>\n<answer>0101</answer>\nAnswer: 0101",
        1.0,
        0.6,
    ),
];
