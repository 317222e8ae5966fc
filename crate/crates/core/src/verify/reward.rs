//! Format rewards for `<think>`/`<answer>` responses.
//!
//! Lengths are counted in Unicode scalar values and `\s` also covers
//! U+001C..U+001F, matching how Python's `len` and `re` treat `str`.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

static FORMAT_PATTERN: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?s)<think>.*?</think>[\s\x1C-\x1F]?<answer>.*?</answer>").unwrap());

/// 0.25 for each of `<think>`, `</think>`, `<answer>`, `</answer>` that
/// occurs exactly once.
pub fn tag_count_reward(text: &str) -> f64 {
    ["<think>", "</think>", "<answer>", "</answer>"]
        .iter()
        .filter(|tag| text.matches(*tag).count() == 1)
        .count() as f64
        * 0.25
}

/// Length of the first `<think>…</think>\s?<answer>…</answer>` match over
/// the length of the whole text.
pub fn format_match_reward(text: &str) -> f64 {
    let total = text.chars().count();
    if total == 0 {
        return 0.0;
    }
    let matched = FORMAT_PATTERN.find(text).map_or(0, |m| m.as_str().chars().count());
    matched as f64 / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardWeights {
    pub correctness: f64,
    pub tag_count: f64,
    pub format_match: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        Self {
            correctness: 1.0,
            tag_count: 0.05,
            format_match: 0.05,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), String> {
        for (name, w) in [
            ("correctness", self.correctness),
            ("tag_count", self.tag_count),
            ("format_match", self.format_match),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(format!("{name} weight must be a finite value >= 0, got {w}"));
            }
        }
        Ok(())
    }

    pub fn combine(&self, correct: bool, text: &str) -> f64 {
        let correctness = if correct { 1.0 } else { 0.0 };
        self.correctness * correctness
            + self.tag_count * tag_count_reward(text)
            + self.format_match * format_match_reward(text)
    }
}
