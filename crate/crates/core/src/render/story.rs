//! Cookie-day narratives.
//!
//! Variable `x_i` is flavor `i`; true means the flavor is baked crunchy,
//! false means chewy. A positive literal reads "crunchy <flavor> (xi)", a
//! negative one "chewy <flavor> (¬xi)". STORY renders clause j as a happy
//! condition over its literals joined by "or". DUALSTORY renders the De
//! Morgan dual: the friend is unhappy exactly when the negations of all
//! literals hold, joined by "and".

use std::sync::LazyLock;

use regex::Regex;

use super::Symbols;
use crate::cnf::{CnfFormula, Literal};

/// Flavor and name tables; stable across releases since rendered prompts
/// must not change.
#[derive(Debug, Clone, Copy)]
pub struct StoryVocabulary;

const FLAVORS: [&str; 16] = [
    "choco",
    "vanilla",
    "peanut",
    "lemon",
    "caramel",
    "oatmeal",
    "coconut",
    "almond",
    "ginger",
    "matcha",
    "strawberry",
    "cinnamon",
    "hazelnut",
    "mint",
    "raisin",
    "maple",
];

const NAMES: [&str; 16] = [
    "Alice", "Bob", "Carol", "Dave", "Eve", "Frank", "Grace", "Heidi", "Ivan", "Judy", "Mallory", "Niaj", "Olivia",
    "Peggy", "Rupert", "Sybil",
];

impl StoryVocabulary {
    /// Flavor for 0-based variable `index`. Past the table, flavors repeat
    /// with a round number ("choco 2").
    pub fn flavor(index: usize) -> String {
        let base = FLAVORS[index % FLAVORS.len()];
        match index / FLAVORS.len() {
            0 => base.to_string(),
            round => format!("{base} {}", round + 1),
        }
    }

    /// Person for 0-based clause `index`; names cycle with a round number
    /// so every clause still has its own person.
    pub fn person(index: usize) -> String {
        let base = NAMES[index % NAMES.len()];
        match index / NAMES.len() {
            0 => base.to_string(),
            round => format!("{base} {}", round + 1),
        }
    }

    pub fn texture(positive: bool) -> &'static str {
        if positive {
            "crunchy"
        } else {
            "chewy"
        }
    }

    /// "crunchy choco (x1)" / "chewy vanilla (¬x2)".
    pub fn describe(lit: Literal, symbols: Symbols) -> String {
        let sign = if lit.is_positive() { "" } else { symbols.neg_sign() };
        format!(
            "{} {} ({sign}x{})",
            Self::texture(lit.is_positive()),
            Self::flavor(lit.index()),
            lit.var()
        )
    }
}

fn join_list(items: &[String], conjunction: &str) -> String {
    match items {
        [] => String::new(),
        [one] => one.clone(),
        [a, b] => format!("{a} {conjunction} {b}"),
        [init @ .., last] => format!("{}, {conjunction} {last}", init.join(", ")),
    }
}

pub(super) fn intro(n: usize, symbols: Symbols) -> String {
    let legend: Vec<String> = (0..n)
        .map(|i| format!("x{} = {}", i + 1, StoryVocabulary::flavor(i)))
        .collect();
    format!(
        "Today is cookie day. The bakery bakes {n} cookie flavors, and each flavor is baked either crunchy or chewy, never both. \
         Variable xi is 1 (true) if flavor i is baked crunchy and 0 (false) if it is baked chewy, \
         so crunchy flavor i is marked (xi) and chewy flavor i is marked ({}xi). The flavors are: {}.",
        symbols.neg_sign(),
        legend.join(", ")
    )
}

pub(super) fn render(formula: &CnfFormula, symbols: Symbols, dual: bool) -> String {
    let mut out = String::new();
    for (j, clause) in formula.clauses().iter().enumerate() {
        let person = StoryVocabulary::person(j);
        let line = if dual {
            let items: Vec<String> = clause
                .literals()
                .iter()
                .map(|&l| StoryVocabulary::describe(!l, symbols))
                .collect();
            format!(
                "{}. {person} will be unhappy only if they are served {}.",
                j + 1,
                join_list(&items, "and")
            )
        } else {
            let items: Vec<String> = clause
                .literals()
                .iter()
                .map(|&l| StoryVocabulary::describe(l, symbols))
                .collect();
            format!(
                "{}. {person} will be happy if they get {}.",
                j + 1,
                join_list(&items, "or")
            )
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

static STATEMENT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\d+\. ").unwrap());
static ANNOTATION: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\((¬|~)?x(\d+)\)").unwrap());

/// Literal annotations of each numbered statement, in order. Used to check
/// that a story mirrors its formula clause for clause.
pub fn parse_story_annotations(text: &str) -> Vec<Vec<Literal>> {
    text.lines()
        .filter(|line| STATEMENT.is_match(line))
        .map(|line| {
            ANNOTATION
                .captures_iter(line)
                .map(|cap| {
                    let var: u32 = cap[2].parse().expect("regex matched digits");
                    Literal::new(var, cap.get(1).is_none())
                })
                .collect()
        })
        .collect()
}
