//! Question rendering: formula text in four formats, task instructions and
//! the evaluation / fine-tuning prompt templates.

mod math;
mod story;

pub use math::{parse_math, parse_math_with_vars};
pub use story::{parse_story_annotations, StoryVocabulary};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cnf::{serialize_dimacs, CnfFormula};
use crate::generator::CnfPair;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ProblemType {
    SatDp,
    SatSp,
    MaxSat,
    Mcs,
    Mus,
}

impl ProblemType {
    pub const ALL: [ProblemType; 5] = [
        ProblemType::SatDp,
        ProblemType::SatSp,
        ProblemType::MaxSat,
        ProblemType::Mcs,
        ProblemType::Mus,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemType::SatDp => "SATDP",
            ProblemType::SatSp => "SATSP",
            ProblemType::MaxSat => "MAXSAT",
            ProblemType::Mcs => "MCS",
            ProblemType::Mus => "MUS",
        }
    }

    /// The questions this problem type produces for one pair.
    pub fn tasks(self) -> Vec<Task> {
        match self {
            ProblemType::SatDp => vec![Task::SatDp(Member::Sat), Task::SatDp(Member::Unsat)],
            ProblemType::SatSp => vec![Task::SatSp],
            ProblemType::MaxSat => vec![Task::MaxSat],
            ProblemType::Mcs => vec![Task::Mcs],
            ProblemType::Mus => vec![Task::Mus],
        }
    }
}

impl fmt::Display for ProblemType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ProblemType::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown problem type `{s}`"))
    }
}

/// Which member of a pair a question is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Member {
    Sat,
    Unsat,
}

impl Member {
    pub fn as_str(self) -> &'static str {
        match self {
            Member::Sat => "sat",
            Member::Unsat => "unsat",
        }
    }
}

impl FromStr for Member {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sat" => Ok(Member::Sat),
            "unsat" => Ok(Member::Unsat),
            _ => Err(format!("unknown pair member `{s}` (expected sat or unsat)")),
        }
    }
}

/// A single question: a problem type bound to one pair member. SATDP splits
/// into two sub-tasks, one per member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    SatDp(Member),
    SatSp,
    MaxSat,
    Mcs,
    Mus,
}

impl Task {
    pub fn ptype(self) -> ProblemType {
        match self {
            Task::SatDp(_) => ProblemType::SatDp,
            Task::SatSp => ProblemType::SatSp,
            Task::MaxSat => ProblemType::MaxSat,
            Task::Mcs => ProblemType::Mcs,
            Task::Mus => ProblemType::Mus,
        }
    }

    pub fn member(self) -> Member {
        match self {
            Task::SatDp(member) => member,
            Task::SatSp => Member::Sat,
            Task::MaxSat | Task::Mcs | Task::Mus => Member::Unsat,
        }
    }

    pub fn sub_task(self) -> Option<Member> {
        match self {
            Task::SatDp(member) => Some(member),
            _ => None,
        }
    }

    /// Builds a task from a problem type plus the SATDP sub-task selector.
    pub fn from_parts(ptype: ProblemType, sub_task: Option<Member>) -> Result<Self, String> {
        match (ptype, sub_task) {
            (ProblemType::SatDp, Some(member)) => Ok(Task::SatDp(member)),
            (ProblemType::SatDp, None) => Err("SATDP needs a sub-task (sat or unsat)".into()),
            (ProblemType::SatSp, None) => Ok(Task::SatSp),
            (ProblemType::MaxSat, None) => Ok(Task::MaxSat),
            (ProblemType::Mcs, None) => Ok(Task::Mcs),
            (ProblemType::Mus, None) => Ok(Task::Mus),
            (other, Some(_)) => Err(format!("{other} has no sub-tasks")),
        }
    }

    pub fn formula(self, pair: &CnfPair) -> &CnfFormula {
        match self.member() {
            Member::Sat => &pair.sat,
            Member::Unsat => &pair.unsat,
        }
    }

    /// Answer bits: 1 for SATDP, n for SATSP/MAXSAT, m for MCS/MUS.
    pub fn answer_len(self, formula: &CnfFormula) -> usize {
        match self {
            Task::SatDp(_) => 1,
            Task::SatSp | Task::MaxSat => formula.num_vars(),
            Task::Mcs | Task::Mus => formula.num_clauses(),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Task::SatDp(member) => write!(f, "SATDP-{}", member.as_str()),
            other => f.write_str(other.ptype().as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum QuestionFormat {
    Math,
    Dimacs,
    Story,
    DualStory,
}

impl QuestionFormat {
    pub const ALL: [QuestionFormat; 4] = [
        QuestionFormat::Math,
        QuestionFormat::Dimacs,
        QuestionFormat::Story,
        QuestionFormat::DualStory,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuestionFormat::Math => "MATH",
            QuestionFormat::Dimacs => "DIMACS",
            QuestionFormat::Story => "STORY",
            QuestionFormat::DualStory => "DUALSTORY",
        }
    }
}

impl fmt::Display for QuestionFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuestionFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QuestionFormat::ALL
            .into_iter()
            .find(|q| q.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown question format `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Template {
    /// Chain-of-thought prompt ending in an `Answer:` line.
    Eval,
    /// `<think>`/`<answer>` tagged prompt used for reward-driven fine-tuning.
    Rft,
}

impl Template {
    pub fn extraction_mode(self) -> ExtractionMode {
        match self {
            Template::Eval => ExtractionMode::AnswerLine,
            Template::Rft => ExtractionMode::Tag,
        }
    }
}

impl FromStr for Template {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "eval" => Ok(Template::Eval),
            "rft" => Ok(Template::Rft),
            _ => Err(format!("unknown template `{s}` (expected eval or rft)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExtractionMode {
    AnswerLine,
    Tag,
}

impl FromStr for ExtractionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "answer-line" => Ok(ExtractionMode::AnswerLine),
            "tag" => Ok(ExtractionMode::Tag),
            _ => Err(format!("unknown extraction mode `{s}` (expected answer-line or tag)")),
        }
    }
}

/// Logic symbols used by the MATH format and story annotations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Symbols {
    #[default]
    Unicode,
    Ascii,
}

impl Symbols {
    pub fn conj(self) -> &'static str {
        match self {
            Symbols::Unicode => "∧",
            Symbols::Ascii => "&",
        }
    }

    pub fn disj(self) -> &'static str {
        match self {
            Symbols::Unicode => "∨",
            Symbols::Ascii => "|",
        }
    }

    pub fn neg_sign(self) -> &'static str {
        match self {
            Symbols::Unicode => "¬",
            Symbols::Ascii => "~",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RenderedQuestion {
    pub pair_id: Option<String>,
    pub ptype: ProblemType,
    pub sub_task: Option<Member>,
    pub format: QuestionFormat,
    pub template: Template,
    /// System message to send alongside `prompt`, if any.
    pub system_prompt: Option<String>,
    pub prompt: String,
    pub expected_answer_len: usize,
    pub extraction_mode: ExtractionMode,
}

impl RenderedQuestion {
    pub fn task(&self) -> Task {
        Task::from_parts(self.ptype, self.sub_task).expect("rendered questions carry consistent task parts")
    }

    /// The prompt wrapped in ChatML turns, ending with an open assistant turn.
    pub fn to_chatml(&self) -> String {
        let mut out = String::new();
        if let Some(system) = &self.system_prompt {
            out.push_str("<|im_start|>system\n");
            out.push_str(system);
            out.push_str("\n<|im_end|>\n");
        }
        out.push_str("<|im_start|>user\n");
        out.push_str(&self.prompt);
        out.push_str("\n<|im_end|>\n<|im_start|>assistant\n");
        out
    }
}

pub const EVAL_SYSTEM_PROMPT: &str = "You are a helpful assistant.";

const EVAL_PREFIX: &str = "Solve the following problem step by step. The last line of your response should be of the form Answer: $ANSWER (without quotes) where $ANSWER is the answer to the problem.";

const EVAL_SUFFIX: &str =
    "Remember to put your answer on its own line after \"Answer:\", and you do not need to use a \\boxed command.";

pub const RFT_SYSTEM_PROMPT: &str = "You are a helpful AI Assistant that provides well-reasoned and detailed responses. You first think about the reasoning process as an internal monologue and then provide the user with the answer. Respond in the following format: <think>\n...\n</think>\n<answer>\n...\n</answer>";

const RFT_SUFFIX: &str = "Show your work in <think> </think> tags. And return the final answer in <answer> </answer> tags, for example <answer> 0101 </answer>.";

pub fn render_formula(formula: &CnfFormula, format: QuestionFormat) -> String {
    render_formula_with(formula, format, Symbols::default())
}

pub fn render_formula_with(formula: &CnfFormula, format: QuestionFormat, symbols: Symbols) -> String {
    match format {
        QuestionFormat::Math => math::render(formula, symbols),
        QuestionFormat::Dimacs => serialize_dimacs(formula),
        QuestionFormat::Story => story::render(formula, symbols, false),
        QuestionFormat::DualStory => story::render(formula, symbols, true),
    }
}

fn formula_block(formula: &CnfFormula, format: QuestionFormat, symbols: Symbols) -> String {
    let n = formula.num_vars();
    let m = formula.num_clauses();
    let body = render_formula_with(formula, format, symbols);
    let body = body.trim_end();
    match format {
        QuestionFormat::Math => {
            format!("Given a CNF formula with {n} variables and {m} clauses in mathematical notation:\n\n{body}")
        }
        QuestionFormat::Dimacs => {
            format!("Given a CNF formula with {n} variables and {m} clauses in DIMACS format:\n\n{body}")
        }
        QuestionFormat::Story => format!(
            "{}\n\nThere are {m} friends, and each one says what would make them happy. \
             A friend is happy if at least one of the cookies they mention is served. \
             Statement i is clause i of a CNF formula with {n} variables and {m} clauses, \
             and the formula is satisfied exactly when every friend is happy:\n\n{body}",
            story::intro(n, symbols)
        ),
        QuestionFormat::DualStory => format!(
            "{}\n\nThere are {m} friends, and each one says what would make them unhappy. \
             A friend is unhappy exactly when every cookie they mention is served, and happy otherwise. \
             Statement i is clause i of a CNF formula with {n} variables and {m} clauses, \
             and the formula is satisfied exactly when every friend is happy:\n\n{body}",
            story::intro(n, symbols)
        ),
    }
}

fn task_instruction(task: Task, formula: &CnfFormula) -> String {
    let len = task.answer_len(formula);
    match task {
        Task::SatDp(_) => format!(
            "Determine whether the formula is satisfiable.\n\
             Output a binary string of length {len} ('1' if the formula is satisfiable, '0' if it is unsatisfiable)."
        ),
        Task::SatSp => format!(
            "Find a satisfying assignment for the formula.\n\
             Output a binary string of length {len} ('1' for true, '0' for false)."
        ),
        Task::MaxSat => format!(
            "Find an assignment that satisfies the maximum possible number of clauses.\n\
             Output a binary string of length {len} ('1' for true, '0' for false)."
        ),
        Task::Mcs => format!(
            "Find a minimal correction subset: a set of clauses whose removal makes the formula satisfiable, \
             such that removing any proper subset of it leaves the formula unsatisfiable.\n\
             Output a binary string of length {len} (the i-th bit is '1' if clause i is in the subset, '0' otherwise)."
        ),
        Task::Mus => format!(
            "Find a minimal unsatisfiable subset: a set of clauses that is unsatisfiable on its own, \
             such that every proper subset of it is satisfiable.\n\
             Output a binary string of length {len} (the i-th bit is '1' if clause i is in the subset, '0' otherwise)."
        ),
    }
}

/// Renders a single task against its pair member.
pub fn render_task(
    pair: &CnfPair,
    task: Task,
    format: QuestionFormat,
    template: Template,
    symbols: Symbols,
) -> RenderedQuestion {
    let formula = task.formula(pair);
    let body = format!(
        "{}\n\n{}",
        formula_block(formula, format, symbols),
        task_instruction(task, formula)
    );
    let (system_prompt, prompt) = match template {
        Template::Eval => (EVAL_SYSTEM_PROMPT, format!("{EVAL_PREFIX}\n\n{body}\n\n{EVAL_SUFFIX}")),
        Template::Rft => (RFT_SYSTEM_PROMPT, format!("{body}\n\n{RFT_SUFFIX}")),
    };
    RenderedQuestion {
        pair_id: None,
        ptype: task.ptype(),
        sub_task: task.sub_task(),
        format,
        template,
        system_prompt: Some(system_prompt.to_string()),
        prompt,
        expected_answer_len: task.answer_len(formula),
        extraction_mode: template.extraction_mode(),
    }
}

/// One question per task of `ptype`; SATDP yields the sat sub-task first.
pub fn render_question(
    pair: &CnfPair,
    ptype: ProblemType,
    format: QuestionFormat,
    template: Template,
) -> Vec<RenderedQuestion> {
    ptype
        .tasks()
        .into_iter()
        .map(|task| render_task(pair, task, format, template, Symbols::default()))
        .collect()
}
