//! Paired SAT/UNSAT formula generation.
//!
//! Phase 1 draws whole m-clause formulas until one is unsatisfiable; a
//! satisfiable candidate is thrown away entirely. Phase 2 copies that
//! formula and flips one random literal at a time, re-solving after each
//! flip, until it becomes satisfiable. Both members therefore share n, m and
//! every clause's variables and width.
//!
//! Randomness comes from ChaCha8 seeded with `seed` and positioned on stream
//! `stream`. Grid builders keep one master seed and give pair `i` stream `i`,
//! so pairs can be generated in any order or in parallel with identical
//! output. All range draws go through `u32` so the stream does not depend on
//! the platform's pointer width.

use rand::{seq::index, Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Literal};
use crate::engine;

pub const DEFAULT_P_K2: f64 = 0.3;
pub const DEFAULT_P_GEO: f64 = 0.4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GenError {
    #[error("invalid generation parameters: {0}")]
    InvalidParams(String),
    #[error("clause width {k} is outside 1..={n}")]
    InvalidWidth { k: usize, n: usize },
    #[error("no unsatisfiable formula after {0} attempts (n={1}, m={2})")]
    UnsatRetriesExceeded(u32, usize, usize),
    #[error("formula still unsatisfiable after {0} polarity flips")]
    FlipLimitExceeded(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub p_k2: f64,
    pub p_geo: f64,
    pub seed: u64,
    #[serde(default)]
    pub stream: u64,
}

impl GenParams {
    /// Parameters with the default width distribution.
    pub fn new(n: usize, m: usize, seed: u64) -> Self {
        Self {
            n,
            m,
            p_k2: DEFAULT_P_K2,
            p_geo: DEFAULT_P_GEO,
            seed,
            stream: 0,
        }
    }

    pub fn with_stream(mut self, stream: u64) -> Self {
        self.stream = stream;
        self
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |msg: String| Err(GenError::InvalidParams(msg));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_k2) {
            return bad(format!("p_k2 = {} is not in [0, 1]", self.p_k2));
        }
        if !(self.p_geo > 0.0 && self.p_geo <= 1.0) {
            return bad(format!("p_geo = {} is not in (0, 1]", self.p_geo));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// Caps on the two generation loops.
///
/// Flip counts are heavy-tailed: formulas with many repeated unit clauses
/// need every unit on a variable to agree before anything else matters. At
/// n = 14..16, m = 4n roughly one pair in a thousand needs more than 600k
/// flips and the worst seen needed 1.9M, so the default flip cap sits an
/// order of magnitude above that.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenLimits {
    pub max_unsat_attempts: u32,
    pub max_flips: u32,
}

impl Default for GenLimits {
    fn default() -> Self {
        Self {
            max_unsat_attempts: 100_000,
            max_flips: 20_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CnfPair {
    pub sat: CnfFormula,
    pub unsat: CnfFormula,
    pub params: GenParams,
    pub flip_count: u32,
}

/// Number of Bernoulli(p) trials up to and including the first success, so
/// the support is {1, 2, ...}.
fn geometric<R: Rng + ?Sized>(p: f64, rng: &mut R) -> usize {
    let mut trials = 1;
    while rng.gen::<f64>() >= p {
        trials += 1;
    }
    trials
}

/// Width 1 with probability `p_k2`, otherwise `2 + Geometric(p_geo)`;
/// clamped to `n`.
pub fn sample_clause_width<R: Rng + ?Sized>(params: &GenParams, rng: &mut R) -> usize {
    let k = if rng.gen::<f64>() < params.p_k2 {
        1
    } else {
        2 + geometric(params.p_geo, rng)
    };
    k.min(params.n)
}

/// `k` distinct variables drawn uniformly from `1..=n`, each negated with
/// probability 1/2.
pub fn random_clause<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Clause, GenError> {
    if k == 0 || k > n {
        return Err(GenError::InvalidWidth { k, n });
    }
    let vars = index::sample(rng, n, k);
    let literals = vars
        .iter()
        .map(|v| Literal::new(v as u32 + 1, rng.gen_bool(0.5)))
        .collect();
    Ok(Clause::new(literals).expect("sampled variables are distinct"))
}

fn random_formula<R: Rng + ?Sized>(params: &GenParams, rng: &mut R) -> CnfFormula {
    let clauses = (0..params.m)
        .map(|_| {
            let k = sample_clause_width(params, rng);
            random_clause(params.n, k, rng).expect("width is clamped to n")
        })
        .collect();
    CnfFormula::new(params.n, clauses).expect("generated formula is well formed")
}

/// Inverts the polarity of one literal: clause uniform, then literal
/// uniform within it.
pub fn flip_random_literal<R: Rng + ?Sized>(formula: &CnfFormula, rng: &mut R) -> CnfFormula {
    let mut out = formula.clone();
    let ci = rng.gen_range(0..formula.num_clauses() as u32) as usize;
    let clause = &mut out.clauses_mut()[ci];
    let li = rng.gen_range(0..clause.len() as u32) as usize;
    let lits = clause.literals_mut();
    lits[li] = !lits[li];
    out
}

pub fn gen_cnf_pair(params: &GenParams) -> Result<CnfPair, GenError> {
    gen_cnf_pair_with_limits(params, GenLimits::default())
}

pub fn gen_cnf_pair_with_limits(params: &GenParams, limits: GenLimits) -> Result<CnfPair, GenError> {
    params.validate()?;
    let mut rng = params.rng();

    let mut attempts = 0;
    let unsat = loop {
        if attempts == limits.max_unsat_attempts {
            return Err(GenError::UnsatRetriesExceeded(attempts, params.n, params.m));
        }
        attempts += 1;
        let candidate = random_formula(params, &mut rng);
        if !engine::is_satisfiable(&candidate) {
            break candidate;
        }
    };

    let mut sat = unsat.clone();
    let mut flip_count = 0;
    while !engine::is_satisfiable(&sat) {
        if flip_count == limits.max_flips {
            return Err(GenError::FlipLimitExceeded(flip_count));
        }
        sat = flip_random_literal(&sat, &mut rng);
        flip_count += 1;
    }

    Ok(CnfPair {
        sat,
        unsat,
        params: *params,
        flip_count,
    })
}
