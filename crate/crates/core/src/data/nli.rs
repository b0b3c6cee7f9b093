use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use crate::data::tokenize::tokenize;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NliLabel {
    Entailment = 0,
    Neutral = 1,
    Contradiction = 2,
}

impl NliLabel {
    pub const ALL: [NliLabel; 3] = [NliLabel::Entailment, NliLabel::Neutral, NliLabel::Contradiction];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            NliLabel::Entailment => "entailment",
            NliLabel::Neutral => "neutral",
            NliLabel::Contradiction => "contradiction",
        }
    }
}

impl fmt::Display for NliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "entailment" => Ok(NliLabel::Entailment),
            "neutral" => Ok(NliLabel::Neutral),
            "contradiction" => Ok(NliLabel::Contradiction),
            other => Err(Error::invalid(format!("unknown NLI label `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NliExample {
    pub premise: Vec<String>,
    pub hypothesis: Vec<String>,
    pub label: NliLabel,
}

impl NliExample {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.premise.iter().chain(&self.hypothesis).map(String::as_str)
    }
}

fn prepare(text: &str, lowercase: bool) -> Vec<String> {
    if lowercase {
        tokenize(&text.to_lowercase())
    } else {
        tokenize(text)
    }
}

/// Reads SNLI/MultiNLI-style JSON lines (`sentence1`, `sentence2`,
/// `gold_label`). Pairs labelled `-` (no annotator consensus) are skipped.
pub fn load_nli(path: impl AsRef<Path>, lowercase: bool) -> Result<Vec<NliExample>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| Error::parse(path, lineno, format!("invalid JSON: {e}")))?;
        let field = |name: &str| -> Result<&str> {
            value
                .get(name)
                .and_then(serde_json::Value::as_str)
                .ok_or_else(|| Error::parse(path, lineno, format!("missing string field `{name}`")))
        };
        let (s1, s2, gold) = (field("sentence1")?, field("sentence2")?, field("gold_label")?);
        if gold == "-" {
            continue;
        }
        let label = gold
            .parse::<NliLabel>()
            .map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        let premise = prepare(s1, lowercase);
        let hypothesis = prepare(s2, lowercase);
        if premise.is_empty() || hypothesis.is_empty() {
            return Err(Error::parse(path, lineno, "sentence has no tokens"));
        }
        out.push(NliExample {
            premise,
            hypothesis,
            label,
        });
    }
    Ok(out)
}

/// Serializes `examples` in the layout [`load_nli`] reads, tokens joined by
/// single spaces.
pub fn nli_jsonl(examples: &[NliExample]) -> String {
    let mut s = String::new();
    for ex in examples {
        let line = serde_json::json!({
            "sentence1": ex.premise.join(" "),
            "sentence2": ex.hypothesis.join(" "),
            "gold_label": ex.label.as_str(),
        });
        s.push_str(&line.to_string());
        s.push('\n');
    }
    s
}
