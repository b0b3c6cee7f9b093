//! Flat `key = value` run configuration.
//!
//! One setting per line; blank lines and lines starting with `#` are ignored.
//! Keys are those of [`CONFIG_KEYS`]. Unknown or repeated keys are errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::autodiff::ClipMode;
use crate::error::{Error, Result};
use crate::trainer::{LossReduction, TrainConfig};

/// Every accepted key with a one-line description.
pub const CONFIG_KEYS: [(&str, &str); 22] = [
    ("method", "w, c, cat, sg or vg"),
    ("batch_size", "examples per SGD step"),
    ("initial_lr", "starting learning rate"),
    (
        "lr_divisor",
        "learning-rate divisor applied after a validation drop (> 1)",
    ),
    ("min_lr", "training stops once the learning rate falls below this"),
    ("max_epochs", "upper bound on epochs"),
    (
        "target_val_acc",
        "optional early stop once validation accuracy reaches this (0..1)",
    ),
    ("clip_threshold", "gradient clipping threshold"),
    ("clip_mode", "global_norm or elementwise"),
    ("loss_reduction", "mean or sum over the minibatch"),
    ("seeds", "`a..b` (inclusive) or a comma list"),
    ("parallel_seeds", "seed workers run concurrently"),
    ("word_dim", "word embedding size d"),
    ("char_dim", "character embedding size"),
    (
        "char_hidden",
        "character BiLSTM output size (must equal word_dim for cat, sg, vg)",
    ),
    ("sentence_dim", "sentence vector size (even; split over two directions)"),
    ("classifier_hidden", "NLI classifier hidden units"),
    ("min_freq", "minimum training count for a word to enter the vocabulary"),
    ("lowercase", "true or false"),
    ("data", "directory holding train.jsonl and dev.jsonl"),
    ("embeddings", "GloVe-format text vectors for the word table"),
    ("out", "output directory"),
];

/// Training settings plus the paths a run reads and writes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub data: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

/// Parses `1..7` (inclusive) or `1,2,5`.
pub fn parse_seeds(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::invalid(format!("cannot parse seeds `{s}` (use `a..b` or a comma list)"));
    let s = s.trim();
    let seeds: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    let mut sorted = seeds.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if seeds.is_empty() || sorted.len() != seeds.len() {
        return Err(Error::invalid(format!("seeds `{s}` must be non-empty and distinct")));
    }
    Ok(seeds)
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}`: cannot parse `{value}`")))
}

fn parse_clip_mode(value: &str) -> Result<ClipMode> {
    match value {
        "global_norm" => Ok(ClipMode::GlobalNorm),
        "elementwise" => Ok(ClipMode::Elementwise),
        other => Err(Error::invalid(format!(
            "unknown clip_mode `{other}` (expected global_norm or elementwise)"
        ))),
    }
}

fn clip_mode_str(mode: ClipMode) -> &'static str {
    match mode {
        ClipMode::GlobalNorm => "global_norm",
        ClipMode::Elementwise => "elementwise",
    }
}

impl RunConfig {
    /// Sets one key. The value is trimmed; errors name the key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        let t = &mut self.train;
        match key {
            "method" => t.method = value.parse()?,
            "batch_size" => t.batch_size = num(key, value)?,
            "initial_lr" => t.initial_lr = num(key, value)?,
            "lr_divisor" => t.lr_divisor = num(key, value)?,
            "min_lr" => t.min_lr = num(key, value)?,
            "max_epochs" => t.max_epochs = num(key, value)?,
            "target_val_acc" => {
                t.target_val_acc = match value {
                    "" | "none" => None,
                    v => Some(num(key, v)?),
                }
            }
            "clip_threshold" => t.clip_threshold = num(key, value)?,
            "clip_mode" => t.clip_mode = parse_clip_mode(value)?,
            "loss_reduction" => t.loss_reduction = value.parse::<LossReduction>()?,
            "seeds" => t.seeds = parse_seeds(value)?,
            "parallel_seeds" => t.parallel_seeds = num(key, value)?,
            "word_dim" => t.dims.word_dim = num(key, value)?,
            "char_dim" => t.dims.char_dim = num(key, value)?,
            "char_hidden" => t.dims.char_hidden = num(key, value)?,
            "sentence_dim" => t.dims.sentence_dim = num(key, value)?,
            "classifier_hidden" => t.dims.classifier_hidden = num(key, value)?,
            "min_freq" => t.min_freq = num(key, value)?,
            "lowercase" => t.lowercase = num(key, value)?,
            "data" => self.data = Some(PathBuf::from(value)),
            "embeddings" => self.embeddings = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            other => {
                let known: Vec<&str> = CONFIG_KEYS.iter().map(|(k, _)| *k).collect();
                return Err(Error::invalid(format!(
                    "unknown config key `{other}`; known keys: {}",
                    known.join(", ")
                )));
            }
        }
        Ok(())
    }

    /// Applies the settings in `text` on top of `self`.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        let mut seen = std::collections::BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::parse(path, i + 1, "expected `key = value`"));
            };
            let key = key.trim();
            if !seen.insert(key.to_string()) {
                return Err(Error::parse(path, i + 1, format!("`{key}` is set twice")));
            }
            self.set(key, value)
                .map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, path)?;
        Ok(cfg)
    }

    /// Every key with its resolved value, in [`CONFIG_KEYS`] order. Parsing
    /// the result reproduces `self`.
    pub fn to_text(&self) -> String {
        let t = &self.train;
        let seeds: Vec<String> = t.seeds.iter().map(u64::to_string).collect();
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let values: [Option<String>; 22] = [
            Some(t.method.abbrev().to_string()),
            Some(t.batch_size.to_string()),
            Some(t.initial_lr.to_string()),
            Some(t.lr_divisor.to_string()),
            Some(t.min_lr.to_string()),
            Some(t.max_epochs.to_string()),
            Some(t.target_val_acc.map_or_else(|| "none".to_string(), |v| v.to_string())),
            Some(t.clip_threshold.to_string()),
            Some(clip_mode_str(t.clip_mode).to_string()),
            Some(t.loss_reduction.as_str().to_string()),
            Some(seeds.join(",")),
            Some(t.parallel_seeds.to_string()),
            Some(t.dims.word_dim.to_string()),
            Some(t.dims.char_dim.to_string()),
            Some(t.dims.char_hidden.to_string()),
            Some(t.dims.sentence_dim.to_string()),
            Some(t.dims.classifier_hidden.to_string()),
            Some(t.min_freq.to_string()),
            Some(t.lowercase.to_string()),
            path(&self.data),
            path(&self.embeddings),
            path(&self.out),
        ];
        let mut s = String::new();
        for ((key, _), value) in CONFIG_KEYS.iter().zip(values) {
            if let Some(v) = value {
                let _ = writeln!(s, "{key} = {v}");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinators::CombinationMethod;

    #[test]
    fn seeds_ranges_and_lists() {
        assert_eq!(parse_seeds("1..7").unwrap(), (1..=7).collect::<Vec<_>>());
        assert_eq!(parse_seeds("1..=3").unwrap(), [1, 2, 3]);
        assert_eq!(parse_seeds("4, 2,9").unwrap(), [4, 2, 9]);
        assert!(parse_seeds("3..1").is_err());
        assert!(parse_seeds("1,1").is_err());
        assert!(parse_seeds("x").is_err());
    }

    #[test]
    fn file_settings_apply() {
        let mut c = RunConfig::default();
        let text = "# comment\nmethod = sg\nbatch_size=32\n\nlowercase = true\nseeds = 1..3\n";
        c.apply_text(text, Path::new("c.cfg")).unwrap();
        assert_eq!(c.train.method, CombinationMethod::ScalarGate);
        assert_eq!(c.train.batch_size, 32);
        assert!(c.train.lowercase);
        assert_eq!(c.train.seeds, [1, 2, 3]);
        assert_eq!(c.train.initial_lr, 0.1);
    }

    #[test]
    fn bad_files_are_rejected() {
        let p = Path::new("c.cfg");
        let mut c = RunConfig::default();
        let err = c.apply_text("learning_rate = 1\n", p).unwrap_err().to_string();
        assert!(err.contains("c.cfg:1") && err.contains("unknown config key"), "{err}");
        assert!(RunConfig::default().apply_text("method = xx\n", p).is_err());
        assert!(RunConfig::default()
            .apply_text("batch_size = 2\nbatch_size = 3\n", p)
            .is_err());
        assert!(RunConfig::default().apply_text("just text\n", p).is_err());
        assert!(RunConfig::default().apply_text("clip_mode = none\n", p).is_err());
    }

    #[test]
    fn text_round_trips() {
        let mut c = RunConfig::default();
        c.apply_text(
            "method = c\ntarget_val_acc = 0.9\ndata = some/dir\nclip_mode = elementwise\n",
            Path::new("x"),
        )
        .unwrap();
        let mut back = RunConfig::default();
        back.apply_text(&c.to_text(), Path::new("y")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn every_documented_key_is_accepted() {
        let samples = [
            "vg",
            "8",
            "0.5",
            "4",
            "1e-6",
            "3",
            "0.5",
            "1",
            "global_norm",
            "sum",
            "1..2",
            "2",
            "6",
            "5",
            "6",
            "8",
            "7",
            "1",
            "false",
            "d",
            "e",
            "o",
        ];
        let mut c = RunConfig::default();
        for ((k, _), v) in CONFIG_KEYS.iter().zip(samples) {
            c.set(k, v).unwrap_or_else(|e| panic!("{k}: {e}"));
        }
    }
}
