use std::sync::LazyLock;

use regex::Regex;
use thiserror::Error;

use crate::render::ExtractionMode;

/// Why no usable answer string could be pulled out of a response.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("no answer found")]
    NoMatch,
    #[error("answer has wrong length: expected {expected} bits, got {actual}")]
    WrongLength { expected: usize, actual: usize },
    #[error("answer `{0}` contains characters other than '0' and '1'")]
    NonBinary(String),
}

static ANSWER_LINE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)Answer\s*:\s*([^\n]+)").unwrap());
static ANSWER_TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?s)<answer>(.*?)</answer>").unwrap());
static BOXED: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"^\$?\\boxed\{\s*([^{}]*?)\s*\}\$?$").unwrap());

/// Pulls the answer bit string out of a free-form response.
///
/// The last `Answer:` line (or last `<answer>` span) wins, since responses
/// often restate intermediate guesses. A surrounding `\boxed{...}` is
/// stripped even though the prompt asks for none.
pub fn extract_answer(text: &str, mode: ExtractionMode, expected_len: usize) -> Result<String, FormatError> {
    let pattern = match mode {
        ExtractionMode::AnswerLine => &*ANSWER_LINE,
        ExtractionMode::Tag => &*ANSWER_TAG,
    };
    let raw = pattern
        .captures_iter(text)
        .last()
        .and_then(|cap| cap.get(1))
        .ok_or(FormatError::NoMatch)?
        .as_str()
        .trim();
    let candidate = BOXED
        .captures(raw)
        .and_then(|cap| cap.get(1))
        .map_or(raw, |m| m.as_str());
    check_bits(candidate, expected_len)?;
    Ok(candidate.to_string())
}

/// Validates a bare answer string.
pub fn check_bits(candidate: &str, expected_len: usize) -> Result<(), FormatError> {
    if candidate.is_empty() {
        return Err(FormatError::NoMatch);
    }
    if !candidate.chars().all(|c| c == '0' || c == '1') {
        return Err(FormatError::NonBinary(candidate.to_string()));
    }
    let actual = candidate.chars().count();
    if actual != expected_len {
        return Err(FormatError::WrongLength {
            expected: expected_len,
            actual,
        });
    }
    Ok(())
}
