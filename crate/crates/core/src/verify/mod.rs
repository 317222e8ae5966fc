//! Answer verification and scalar rewards.
//!
//! Answers are binary strings: 1 bit for each SATDP sub-task ('1' =
//! satisfiable), n bits for SATSP/MAXSAT (bit i is x_{i+1}), m bits for
//! MCS/MUS (bit i = '1' puts clause i+1 in the subset). Any answer meeting
//! the task definition is accepted, not only the oracle's own witness.

mod extract;
mod reward;

pub use extract::{check_bits, extract_answer, FormatError};
pub use reward::{format_match_reward, tag_count_reward, RewardWeights};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, ClauseSubset};
use crate::generator::CnfPair;
use crate::oracles::{self, OracleError};
use crate::render::{ExtractionMode, Member, ProblemType, QuestionFormat, Task};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    /// A well-formed answer of the right length was found.
    pub format_ok: bool,
    /// The answer meets the task definition. Implies `format_ok`.
    pub semantic_ok: bool,
    pub detail: String,
    /// The answer string that was judged. For SATDP: the sat bit followed by
    /// the unsat bit.
    pub extracted: Option<String>,
}

impl Verdict {
    fn format_error(err: &FormatError) -> Self {
        Verdict {
            format_ok: false,
            semantic_ok: false,
            detail: format!("format error: {err}"),
            extracted: None,
        }
    }

    fn judged(answer: &str, semantic_ok: bool, detail: String) -> Self {
        Verdict {
            format_ok: true,
            semantic_ok,
            detail,
            extracted: Some(answer.to_string()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("{ptype} expects {expected} answer(s), got {actual}")]
    AnswerCount {
        ptype: ProblemType,
        expected: usize,
        actual: usize,
    },
}

/// Checks one bare answer string for a single task.
pub fn verify_task(pair: &CnfPair, task: Task, answer: &str) -> Verdict {
    let formula = task.formula(pair);
    let answer = answer.trim();
    if let Err(err) = check_bits(answer, task.answer_len(formula)) {
        return Verdict::format_error(&err);
    }
    match judge(pair, task, answer) {
        Ok((ok, detail)) => Verdict::judged(answer, ok, detail),
        Err(err) => Verdict::judged(answer, false, format!("oracle error: {err}")),
    }
}

fn judge(pair: &CnfPair, task: Task, answer: &str) -> Result<(bool, String), OracleError> {
    let formula = task.formula(pair);
    Ok(match task {
        Task::SatDp(member) => {
            let claims_sat = answer == "1";
            let truth = member == Member::Sat;
            let word = |sat: bool| if sat { "satisfiable" } else { "unsatisfiable" };
            (
                claims_sat == truth,
                format!("answered {}, formula is {}", word(claims_sat), word(truth)),
            )
        }
        Task::SatSp => {
            let assignment = Assignment::from_bits(answer).expect("bits already checked");
            let eval = formula.evaluate(&assignment).expect("length already checked");
            let m = formula.num_clauses();
            (
                eval.satisfied_count == m,
                format!("{} of {m} clauses satisfied", eval.satisfied_count),
            )
        }
        Task::MaxSat => {
            let assignment = Assignment::from_bits(answer).expect("bits already checked");
            let eval = formula.evaluate(&assignment).expect("length already checked");
            let optimum = oracles::maxsat_optimum(formula).optimum;
            (
                eval.satisfied_count == optimum,
                format!("{} clauses satisfied, optimum is {optimum}", eval.satisfied_count),
            )
        }
        Task::Mcs => {
            let subset = ClauseSubset::from_bits(answer).expect("bits already checked");
            let ok = oracles::check_mcs(formula, &subset)?;
            let verdict = if ok { "is" } else { "is not" };
            (ok, format!("clause set {verdict} a minimal correction subset"))
        }
        Task::Mus => {
            let subset = ClauseSubset::from_bits(answer).expect("bits already checked");
            let ok = oracles::check_mus(formula, &subset)?;
            let verdict = if ok { "is" } else { "is not" };
            (ok, format!("clause set {verdict} a minimal unsatisfiable subset"))
        }
    })
}

/// Pair-level verdict. SATDP takes two answers (sat member, then unsat
/// member) and is correct only when both are; every other type takes one.
pub fn verify(pair: &CnfPair, ptype: ProblemType, answers: &[&str]) -> Result<Verdict, VerifyError> {
    let tasks = ptype.tasks();
    if answers.len() != tasks.len() {
        return Err(VerifyError::AnswerCount {
            ptype,
            expected: tasks.len(),
            actual: answers.len(),
        });
    }
    let verdicts: Vec<Verdict> = tasks
        .iter()
        .zip(answers)
        .map(|(&task, answer)| verify_task(pair, task, answer))
        .collect();
    Ok(merge(&tasks, verdicts))
}

fn merge(tasks: &[Task], mut verdicts: Vec<Verdict>) -> Verdict {
    if verdicts.len() == 1 {
        return verdicts.pop().expect("one verdict");
    }
    let format_ok = verdicts.iter().all(|v| v.format_ok);
    let semantic_ok = verdicts.iter().all(|v| v.semantic_ok);
    let extracted = verdicts
        .iter()
        .map(|v| v.extracted.clone())
        .collect::<Option<Vec<_>>>()
        .map(|parts| parts.concat());
    let detail = tasks
        .iter()
        .zip(&verdicts)
        .map(|(task, v)| format!("{task}: {}", v.detail))
        .collect::<Vec<_>>()
        .join("; ");
    Verdict {
        format_ok,
        semantic_ok,
        detail,
        extracted,
    }
}

/// Extracts the answer from a raw response and verifies it.
pub fn verify_response(pair: &CnfPair, task: Task, text: &str, mode: ExtractionMode) -> Verdict {
    let expected = task.answer_len(task.formula(pair));
    match extract_answer(text, mode, expected) {
        Ok(answer) => verify_task(pair, task, &answer),
        Err(err) => Verdict::format_error(&err),
    }
}

/// Pair-level verdict from raw responses (two for SATDP).
pub fn verify_responses(
    pair: &CnfPair,
    ptype: ProblemType,
    texts: &[&str],
    mode: ExtractionMode,
) -> Result<Verdict, VerifyError> {
    let tasks = ptype.tasks();
    if texts.len() != tasks.len() {
        return Err(VerifyError::AnswerCount {
            ptype,
            expected: tasks.len(),
            actual: texts.len(),
        });
    }
    let verdicts = tasks
        .iter()
        .zip(texts)
        .map(|(&task, text)| verify_response(pair, task, text, mode))
        .collect();
    Ok(merge(&tasks, verdicts))
}

/// Correctness plus weighted format rewards for a tagged response. Never
/// fails: an unextractable answer simply scores zero correctness.
pub fn combined_reward(text: &str, pair: &CnfPair, task: Task, weights: &RewardWeights) -> f64 {
    let verdict = verify_response(pair, task, text, ExtractionMode::Tag);
    weights.combine(verdict.semantic_ok, text)
}

/// One item of a batch: a response to one task of one pair.
#[derive(Debug, Clone, Copy)]
pub struct BatchItem<'a> {
    pub pair: &'a CnfPair,
    pub task: Task,
    pub text: &'a str,
}

/// Verifies items in parallel; output order follows input order.
pub fn verify_batch(items: &[BatchItem<'_>], mode: ExtractionMode) -> Vec<Verdict> {
    items
        .par_iter()
        .map(|item| verify_response(item.pair, item.task, item.text, mode))
        .collect()
}

/// [`combined_reward`] over many items, in parallel and order-preserving.
pub fn batch_reward(items: &[BatchItem<'_>], weights: &RewardWeights) -> Vec<f64> {
    items
        .par_iter()
        .map(|item| combined_reward(item.text, item.pair, item.task, weights))
        .collect()
}

/// Serialized verdict, one per verified question.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub pair_id: String,
    pub ptype: ProblemType,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sub_task: Option<Member>,
    pub format: Option<QuestionFormat>,
    pub format_ok: bool,
    pub semantic_ok: bool,
    pub reward: f64,
    pub detail: String,
}

impl VerdictRecord {
    pub fn new(
        pair_id: impl Into<String>,
        ptype: ProblemType,
        sub_task: Option<Member>,
        format: Option<QuestionFormat>,
        verdict: &Verdict,
        reward: f64,
    ) -> Self {
        Self {
            pair_id: pair_id.into(),
            ptype,
            sub_task,
            format,
            format_ok: verdict.format_ok,
            semantic_ok: verdict.semantic_ok,
            reward,
            detail: verdict.detail.clone(),
        }
    }
}
