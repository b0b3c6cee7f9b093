use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Two words and a human similarity/relatedness score.
#[derive(Clone, Debug, PartialEq)]
pub struct WordSimPair {
    pub word1: String,
    pub word2: String,
    pub gold: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct WordSimOptions {
    pub lowercase: bool,
    /// Skip the first line when its score column is not a number.
    pub detect_header: bool,
}

impl Default for WordSimOptions {
    fn default() -> Self {
        Self {
            lowercase: true,
            detect_header: true,
        }
    }
}

/// Reads `word1 TAB word2 TAB score` lines.
pub fn load_wordsim(path: impl AsRef<Path>, opts: WordSimOptions) -> Result<Vec<WordSimPair>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_wordsim(&text, path, opts)
}

pub fn parse_wordsim(text: &str, origin: &Path, opts: WordSimOptions) -> Result<Vec<WordSimPair>> {
    let mut out = Vec::new();
    let mut first = true;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let is_first = std::mem::replace(&mut first, false);
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let score = fields[2].trim();
        let gold = match score.parse::<f64>() {
            Ok(v) if v.is_finite() => v,
            Ok(_) => return Err(Error::parse(origin, lineno, format!("non-finite score `{score}`"))),
            Err(_) if is_first && opts.detect_header => continue,
            Err(_) => return Err(Error::parse(origin, lineno, format!("cannot parse score `{score}`"))),
        };
        let (w1, w2) = (fields[0].trim(), fields[1].trim());
        if w1.is_empty() || w2.is_empty() {
            return Err(Error::parse(origin, lineno, "empty word"));
        }
        let norm = |w: &str| {
            if opts.lowercase {
                w.to_lowercase()
            } else {
                w.to_string()
            }
        };
        out.push(WordSimPair {
            word1: norm(w1),
            word2: norm(w2),
            gold,
        });
    }
    Ok(out)
}
