//! Paired SAT/UNSAT CNF generation, ground-truth oracles, question rendering
//! and answer verification for logical-reasoning evaluation and
//! reward-driven fine-tuning.
//!
//! The usual flow: [`generator::gen_cnf_pair`] (or a grid builder in
//! [`dataset`]) produces a [`CnfPair`]; [`render::render_question`] turns it
//! into prompts; [`verify`] checks the model's answer and scores it.

pub mod cnf;
pub mod dataset;
pub mod engine;
pub mod generator;
pub mod oracles;
pub mod render;
pub mod verify;

pub use cnf::{
    parse_dimacs, serialize_dimacs, Assignment, Clause, ClauseSubset, CnfError, CnfFormula, Evaluation, Literal,
    RestrictMode,
};
pub use dataset::{Dataset, DatasetError, DatasetRecord, DifficultyStats};
pub use engine::{is_satisfiable, solve, SatStatus, SolveResult, SolverStats};
pub use generator::{gen_cnf_pair, CnfPair, GenError, GenParams};
pub use oracles::{
    brute_force_solve, check_mcs, check_mus, find_one_mcs, find_one_mus, maxsat_optimum, MaxSatResult, OracleError,
};
pub use render::{
    render_formula, render_question, ExtractionMode, Member, ProblemType, QuestionFormat, RenderedQuestion, Task,
    Template,
};
pub use verify::{combined_reward, extract_answer, verify, RewardWeights, Verdict};
