use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::data::vocab::WordVocab;
use crate::error::{Error, Result};
use crate::rng::{SeededRng, INIT_RANGE};
use crate::tensor::Tensor;

/// Word embedding table aligned with a [`WordVocab`].
#[derive(Clone, Debug, PartialEq)]
pub struct PretrainedEmbeddings {
    /// `[|W|, d]`
    pub table: Tensor,
    /// Fraction of regular vocabulary words found in the pretrained file.
    pub coverage: f64,
    /// Rows copied from the pretrained file.
    pub found: Vec<bool>,
}

impl PretrainedEmbeddings {
    /// Every row sampled uniformly from `(-0.05, 0.05)`.
    pub fn random(vocab: &WordVocab, d: usize, rng: &mut SeededRng) -> Self {
        Self {
            table: rng.init_tensor(&[vocab.len(), d]),
            coverage: 0.0,
            found: vec![false; vocab.len()],
        }
    }

    /// Every row drawn uniformly from `(-range, range)` and marked found: a
    /// stand-in for pretrained vectors of a given magnitude.
    pub fn uniform(vocab: &WordVocab, d: usize, range: f64, rng: &mut SeededRng) -> Self {
        Self {
            table: rng.uniform_tensor(&[vocab.len(), d], range),
            coverage: 1.0,
            found: vec![true; vocab.len()],
        }
    }

    /// Redraws every row that did not come from the pretrained file.
    pub fn reinitialize_missing(&mut self, rng: &mut SeededRng) {
        let d = self.table.cols();
        for (i, &found) in self.found.iter().enumerate() {
            if !found {
                for v in &mut self.table.data_mut()[i * d..(i + 1) * d] {
                    *v = rng.uniform(-INIT_RANGE, INIT_RANGE);
                }
            }
        }
    }
}

/// Distributional vectors learned from `sentences` alone, by random indexing.
///
/// Each vocabulary word gets a fixed random index vector; a word's row is the
/// sum of the index vectors of the words sharing a sentence with it, weighted
/// by positive pointwise mutual information. Rows are then rescaled by one
/// global factor so the mean per-coordinate magnitude of the non-empty rows is
/// `scale`. Words that never share a sentence with another vocabulary word are
/// left unfound and drawn from `(-0.05, 0.05)`.
pub fn cooccurrence_embeddings<S: AsRef<str>>(
    sentences: &[Vec<S>],
    vocab: &WordVocab,
    d: usize,
    scale: f64,
    rng: &mut SeededRng,
) -> Result<PretrainedEmbeddings> {
    if d == 0 || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::invalid(format!(
            "cooccurrence_embeddings: need d > 0 and a positive scale, got d={d}, scale={scale}"
        )));
    }
    let n = vocab.len();
    let index = rng.uniform_tensor(&[n, d], 3f64.sqrt());
    let mut pair_counts: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut marginal = vec![0.0; n];
    let mut total = 0.0;
    for sentence in sentences {
        let ids: Vec<usize> = sentence
            .iter()
            .map(|w| vocab.index(w.as_ref()))
            .filter(|&i| i != WordVocab::UNK_INDEX)
            .collect();
        for (a, &i) in ids.iter().enumerate() {
            for (b, &j) in ids.iter().enumerate() {
                if a != b {
                    *pair_counts.entry((i, j)).or_default() += 1.0;
                    marginal[i] += 1.0;
                    total += 1.0;
                }
            }
        }
    }
    let mut table = Tensor::zeros(&[n, d]);
    let mut found = vec![false; n];
    for (&(i, j), &c) in &pair_counts {
        let pmi = (c * total / (marginal[i] * marginal[j])).ln();
        if pmi <= 0.0 {
            continue;
        }
        found[i] = true;
        for k in 0..d {
            let v = pmi * index.data()[j * d + k];
            table.data_mut()[i * d + k] += v;
        }
    }
    let filled = found.iter().filter(|&&f| f).count();
    if filled > 0 {
        let mag = table.data().iter().map(|v| v.abs()).sum::<f64>() / (filled * d) as f64;
        if mag > 0.0 {
            for v in table.data_mut() {
                *v *= scale / mag;
            }
        }
    }
    let regular = n.saturating_sub(2);
    let coverage = if regular == 0 {
        0.0
    } else {
        filled as f64 / regular as f64
    };
    let mut out = PretrainedEmbeddings { table, coverage, found };
    out.reinitialize_missing(rng);
    Ok(out)
}

/// Reads GloVe-style text vectors (`word v1 ... vd` per line, no header).
///
/// Rows of vocabulary words present in the file are copied verbatim; every
/// other row is drawn uniformly from `(-0.05, 0.05)` using `rng`. When
/// `lowercase` is set, file words are lowercased before matching and the
/// first match wins.
pub fn load_embeddings(
    path: impl AsRef<Path>,
    vocab: &WordVocab,
    d: usize,
    lowercase: bool,
    rng: &mut SeededRng,
) -> Result<PretrainedEmbeddings> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut table = rng.uniform_tensor(&[vocab.len(), d], INIT_RANGE);
    let mut filled = vec![false; vocab.len()];

    for (i, line) in BufReader::new(file).lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim_end_matches(['\n', '\r']);
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(' ').filter(|f| !f.is_empty()).collect();
        if fields.len() != d + 1 {
            let msg = if lineno == 1 {
                format!(
                    "vectors have dimension {}, expected {d}",
                    fields.len().saturating_sub(1)
                )
            } else {
                format!("expected a word and {d} values, found {} fields", fields.len())
            };
            return Err(Error::parse(path, lineno, msg));
        }
        let word = if lowercase {
            fields[0].to_lowercase()
        } else {
            fields[0].to_string()
        };
        let idx = vocab.index(&word);
        let mut values = Vec::with_capacity(d);
        for f in &fields[1..] {
            let v: f64 = f
                .parse()
                .map_err(|_| Error::parse(path, lineno, format!("cannot parse `{f}` as a number")))?;
            if !v.is_finite() {
                return Err(Error::parse(path, lineno, format!("non-finite value `{f}`")));
            }
            values.push(v);
        }
        if idx != WordVocab::UNK_INDEX && !filled[idx] {
            filled[idx] = true;
            table.data_mut()[idx * d..(idx + 1) * d].copy_from_slice(&values);
        }
    }

    let regular = vocab.len() - 2;
    let found = filled.iter().skip(2).filter(|&&f| f).count();
    Ok(PretrainedEmbeddings {
        table,
        coverage: if regular == 0 {
            0.0
        } else {
            found as f64 / regular as f64
        },
        found: filled,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn copies_rows_verbatim() {
        let vocab = WordVocab::build(["cat"], 1);
        let f = file("cat 1.0 2.0\n");
        let e = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(0)).unwrap();
        assert_eq!(e.table.row(vocab.index("cat")), &[1.0, 2.0]);
        assert_eq!(e.coverage, 1.0);
    }

    #[test]
    fn missing_words_are_small_random() {
        let vocab = WordVocab::build(["cat", "dog"], 1);
        let f = file("cat 1.0 2.0\nbird 3 4\n");
        let e = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(0)).unwrap();
        assert!(e.table.row(vocab.index("dog")).iter().all(|v| v.abs() < 0.05));
        assert_eq!(e.coverage, 0.5);
    }

    #[test]
    fn reproducible_with_seed() {
        let vocab = WordVocab::build(["cat", "dog", "eel"], 1);
        let f = file("cat 1.0 2.0\n");
        let a = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(9)).unwrap();
        let b = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn field_count_errors_carry_line_numbers() {
        let vocab = WordVocab::build(["cat"], 1);
        let f = file("cat 1.0\n");
        let err = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(0)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");

        let f = file("cat 1.0 2.0\ndog 1.0 x\n");
        let err = load_embeddings(f.path(), &vocab, 2, false, &mut SeededRng::new(0)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn lowercase_matching() {
        let vocab = WordVocab::build(["cat"], 1);
        let f = file("Cat 1.0 2.0\ncat 5 6\n");
        let e = load_embeddings(f.path(), &vocab, 2, true, &mut SeededRng::new(0)).unwrap();
        assert_eq!(e.table.row(vocab.index("cat")), &[1.0, 2.0]);
    }
}
