//! Seed-level significance tables, gate-versus-frequency profiles and
//! word/sentence performance correlation matrices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::combinators::CombinationMethod;
use crate::data::synthetic::{zipf_corpus, ZipfConfig};
use crate::data::{cooccurrence_embeddings, load_nli, tokenize};
use crate::error::{Error, Result};
use crate::eval_word::spearman;
use crate::model::{Model, ModelDims};
use crate::rng::SeededRng;
use crate::stats::{mean, sample_variance, welch_t_test};
use crate::trainer::{train_one, TrainConfig, TrainData, TrainRun};

/// Per-seed metric values of one (dataset, task, method) condition.
#[derive(Clone, Debug, PartialEq)]
pub struct SeedGroupResult {
    pub dataset: String,
    pub task: String,
    pub method: String,
    pub seeds: Vec<u64>,
    pub values: Vec<f64>,
}

#[derive(Deserialize)]
struct ResultRow {
    dataset: String,
    task: String,
    method: String,
    seed: u64,
    value: f64,
}

/// Reads a `dataset,task,method,seed,value` CSV. Lines starting with `#` are
/// comments. Groups come back sorted by (dataset, task, method) with values
/// ordered by seed.
pub fn load_results(path: impl AsRef<Path>) -> Result<Vec<SeedGroupResult>> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut groups: BTreeMap<(String, String, String), BTreeMap<u64, f64>> = BTreeMap::new();
    for (i, row) in reader.deserialize::<ResultRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| Error::parse(path, line, e.to_string()))?;
        if !row.value.is_finite() {
            return Err(Error::parse(path, line, "non-finite value"));
        }
        let seeds = groups.entry((row.dataset, row.task, row.method)).or_default();
        if seeds.insert(row.seed, row.value).is_some() {
            return Err(Error::parse(path, line, format!("duplicate seed {}", row.seed)));
        }
    }
    Ok(groups
        .into_iter()
        .map(|((dataset, task, method), by_seed)| SeedGroupResult {
            dataset,
            task,
            method,
            seeds: by_seed.keys().copied().collect(),
            values: by_seed.values().copied().collect(),
        })
        .collect())
}

/// One cell of the significance table.
#[derive(Clone, Debug, PartialEq)]
pub struct SignificanceRow {
    pub dataset: String,
    pub task: String,
    pub method: String,
    pub n: usize,
    pub mean: f64,
    pub std: f64,
    /// Best-mean method of this (dataset, task).
    pub best_method: String,
    pub t: Option<f64>,
    pub dof: Option<f64>,
    pub p: Option<f64>,
    /// `p < alpha` against the best method.
    pub significant: bool,
    /// Set when the comparison could not be computed.
    pub note: Option<String>,
}

/// For every (dataset, task), finds the best-mean method (ties go to the
/// lexicographically first method) and Welch-tests every other method
/// against it. Per-cell test failures are recorded in `note`.
pub fn significance_table(groups: &[SeedGroupResult], alpha: f64) -> Result<Vec<SignificanceRow>> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let mut by_cell: BTreeMap<(&str, &str), Vec<&SeedGroupResult>> = BTreeMap::new();
    for g in groups {
        if g.values.is_empty() {
            return Err(Error::invalid(format!(
                "{}/{}/{}: no values",
                g.dataset, g.task, g.method
            )));
        }
        by_cell.entry((&g.dataset, &g.task)).or_default().push(g);
    }
    let mut out = Vec::new();
    for ((dataset, task), mut cell) in by_cell {
        cell.sort_by(|a, b| a.method.cmp(&b.method));
        let n = cell[0].values.len();
        if let Some(g) = cell.iter().find(|g| g.values.len() != n) {
            return Err(Error::invalid(format!(
                "{dataset}/{task}: method `{}` has {} seeds, `{}` has {n}",
                g.method,
                g.values.len(),
                cell[0].method
            )));
        }
        let mut best = cell[0];
        for g in &cell[1..] {
            if mean(&g.values) > mean(&best.values) {
                best = g;
            }
        }
        for g in &cell {
            let std = if n >= 2 { sample_variance(&g.values).sqrt() } else { 0.0 };
            let mut row = SignificanceRow {
                dataset: dataset.to_string(),
                task: task.to_string(),
                method: g.method.clone(),
                n,
                mean: mean(&g.values),
                std,
                best_method: best.method.clone(),
                t: None,
                dof: None,
                p: None,
                significant: false,
                note: None,
            };
            if g.method != best.method {
                match welch_t_test(&g.values, &best.values) {
                    Ok(w) => {
                        row.t = Some(w.t);
                        row.dof = Some(w.dof);
                        row.p = Some(w.p_two_sided);
                        row.significant = w.p_two_sided < alpha;
                    }
                    Err(e) => row.note = Some(e.to_string()),
                }
            }
            out.push(row);
        }
    }
    Ok(out)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn significance_csv(rows: &[SignificanceRow]) -> String {
    let mut s = String::from("dataset,task,method,n,mean,std,best_method,t,dof,p,significant,note\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.dataset),
            csv_field(&r.task),
            csv_field(&r.method),
            r.n,
            r.mean,
            r.std,
            csv_field(&r.best_method),
            opt(r.t),
            opt(r.dof),
            opt(r.p),
            r.significant,
            csv_field(r.note.as_deref().unwrap_or(""))
        );
    }
    s
}

/// Gate activation of one word.
#[derive(Clone, Debug, PartialEq)]
pub struct GateProfile {
    pub word: String,
    pub frequency: u64,
    pub mean_gate: f64,
    pub gate: Vec<f64>,
}

/// Gate values for `words` (duplicates dropped), sorted by decreasing
/// frequency and then by word. Words missing from `frequencies` count as 0;
/// words outside the model vocabulary use the unknown-word embedding.
pub fn gate_profile<S: AsRef<str>>(
    model: &Model,
    words: &[S],
    frequencies: &BTreeMap<String, u64>,
) -> Result<Vec<GateProfile>> {
    if !model.method.is_gate() {
        return Err(Error::invalid(format!(
            "gate analysis needs a gated model (sg or vg), checkpoint uses `{}`",
            model.method
        )));
    }
    let unique: BTreeSet<&str> = words.iter().map(AsRef::as_ref).collect();
    let mut out = unique
        .into_iter()
        .map(|w| {
            let g = model.gate_for_word(w)?;
            Ok(GateProfile {
                word: w.to_string(),
                frequency: frequencies.get(w).copied().unwrap_or(0),
                mean_gate: g.mean(),
                gate: g.into_data(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| b.frequency.cmp(&a.frequency).then_with(|| a.word.cmp(&b.word)));
    Ok(out)
}

/// Spearman correlation between rarity (rarest word = highest rank) and mean
/// gate value. Positive means rarer words lean on their characters more.
pub fn rarity_gate_spearman(profiles: &[GateProfile]) -> Result<f64> {
    let rarity: Vec<f64> = profiles.iter().map(|p| -(p.frequency as f64)).collect();
    let gates: Vec<f64> = profiles.iter().map(|p| p.mean_gate).collect();
    spearman(&rarity, &gates)
}

pub fn gate_profile_csv(profiles: &[GateProfile], per_dimension: bool) -> String {
    let mut s = String::from("word,frequency,mean_gate");
    if per_dimension {
        let d = profiles.first().map_or(0, |p| p.gate.len());
        for i in 0..d {
            let _ = write!(s, ",g{i}");
        }
    }
    s.push('\n');
    for p in profiles {
        let _ = write!(s, "{},{},{}", csv_field(&p.word), p.frequency, p.mean_gate);
        if per_dimension {
            for g in &p.gate {
                let _ = write!(s, ",{g}");
            }
        }
        s.push('\n');
    }
    s
}

/// Settings for [`frequency_gate_trend`].
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGateSetup {
    pub corpus: ZipfConfig,
    pub dims: ModelDims,
    pub max_epochs: usize,
    /// Mean coordinate magnitude of the distributional word vectors the word
    /// table starts from.
    pub pretrained_scale: f64,
}

impl Default for FrequencyGateSetup {
    fn default() -> Self {
        Self {
            corpus: ZipfConfig::default(),
            dims: ModelDims {
                word_dim: 32,
                char_dim: 8,
                char_hidden: 32,
                sentence_dim: 64,
                classifier_hidden: 32,
            },
            max_epochs: 40,
            pretrained_scale: 1.0,
        }
    }
}

/// Outcome of one [`frequency_gate_trend`] run.
#[derive(Clone, Debug)]
pub struct FrequencyGateTrend {
    pub seed: u64,
    pub run: TrainRun,
    pub profile: Vec<GateProfile>,
    /// Spearman correlation between rarity and mean gate.
    pub spearman: f64,
}

/// Trains a vector-gate model on a Zipfian corpus generated from `seed` and
/// profiles the gates of every training word. The word table starts from
/// co-occurrence vectors of the training sentences; everything else follows
/// the default training configuration.
pub fn frequency_gate_trend(setup: &FrequencyGateSetup, seed: u64) -> Result<FrequencyGateTrend> {
    let corpus = zipf_corpus(&ZipfConfig {
        seed,
        ..setup.corpus.clone()
    });
    let mut data = TrainData::new(corpus.train.clone(), corpus.dev.clone(), 1);
    let mut rng = SeededRng::derived(seed, 2);
    data.embeddings = Some(cooccurrence_embeddings(
        &corpus.train_sentences(),
        &data.word_vocab,
        setup.dims.word_dim,
        setup.pretrained_scale,
        &mut rng,
    )?);
    let config = TrainConfig {
        method: CombinationMethod::VectorGate,
        max_epochs: setup.max_epochs,
        min_freq: 1,
        dims: setup.dims,
        ..TrainConfig::default()
    };
    let run = train_one(&config, &data, seed, None)?;
    let freqs = corpus.train_frequencies();
    let words: Vec<&String> = freqs.keys().collect();
    let profile = gate_profile(&run.best_model, &words, &freqs)?;
    let spearman = rarity_gate_spearman(&profile)?;
    Ok(FrequencyGateTrend {
        seed,
        run,
        profile,
        spearman,
    })
}

/// Token counts of a corpus. `.jsonl` files are read as NLI pairs (both
/// sentences counted); anything else as plain text, one or more sentences
/// per line, tokenized the same way.
pub fn corpus_frequencies(path: impl AsRef<Path>, lowercase: bool) -> Result<BTreeMap<String, u64>> {
    let path = path.as_ref();
    let mut counts = BTreeMap::new();
    if path.extension().is_some_and(|e| e == "jsonl") {
        for ex in load_nli(path, lowercase)? {
            for t in ex.tokens() {
                *counts.entry(t.to_string()).or_insert(0) += 1;
            }
        }
    } else {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for line in text.lines() {
            let line = if lowercase {
                line.to_lowercase()
            } else {
                line.to_string()
            };
            for t in tokenize(&line) {
                *counts.entry(t).or_insert(0) += 1;
            }
        }
    }
    Ok(counts)
}

/// Metric table: one row per trained model, one column per task.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    pub row_labels: Vec<String>,
    pub columns: Vec<String>,
    /// `values[row][column]`
    pub values: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn new(row_labels: Vec<String>, columns: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != row_labels.len() || values.iter().any(|r| r.len() != columns.len()) {
            return Err(Error::invalid(
                "result table: values do not match row and column labels",
            ));
        }
        Ok(Self {
            row_labels,
            columns,
            values,
        })
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    fn select(&self, rows: &[usize]) -> Self {
        Self {
            row_labels: rows.iter().map(|&i| self.row_labels[i].clone()).collect(),
            columns: self.columns.clone(),
            values: rows.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }
}

/// Spearman correlations between every word-task column (rows) and every
/// sentence-task column (columns). `None` marks a pair with a constant column.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    pub word_tasks: Vec<String>,
    pub sentence_tasks: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

pub fn performance_correlation_matrix(word: &ResultTable, sent: &ResultTable) -> Result<CorrelationMatrix> {
    if word.row_labels != sent.row_labels {
        return Err(Error::invalid("word and sentence result tables list different models"));
    }
    let mut values = Vec::with_capacity(word.columns.len());
    for i in 0..word.columns.len() {
        let wc = word.column(i);
        let row = (0..sent.columns.len())
            .map(|j| match spearman(&wc, &sent.column(j)) {
                Ok(r) => Ok(Some(r)),
                Err(Error::ZeroVariance(_)) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    Ok(CorrelationMatrix {
        word_tasks: word.columns.clone(),
        sentence_tasks: sent.columns.clone(),
        values,
    })
}

/// One matrix per group, where `groups[i]` names the group (typically the
/// combination method) of row `i`.
pub fn grouped_correlation_matrices(
    word: &ResultTable,
    sent: &ResultTable,
    groups: &[String],
) -> Result<BTreeMap<String, CorrelationMatrix>> {
    if groups.len() != word.row_labels.len() {
        return Err(Error::invalid("one group label per result row is required"));
    }
    let mut rows: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, g) in groups.iter().enumerate() {
        rows.entry(g).or_default().push(i);
    }
    rows.into_iter()
        .map(|(g, idx)| {
            Ok((
                g.to_string(),
                performance_correlation_matrix(&word.select(&idx), &sent.select(&idx))?,
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_encoder::CharVocab;
    use crate::combinators::{CombinationMethod, GateParams};
    use crate::data::WordVocab;
    use crate::model::ModelDims;
    use crate::rng::SeededRng;

    fn group(method: &str, values: &[f64]) -> SeedGroupResult {
        SeedGroupResult {
            dataset: "snli".into(),
            task: "sick-r".into(),
            method: method.into(),
            seeds: (1..=values.len() as u64).collect(),
            values: values.to_vec(),
        }
    }

    #[test]
    fn identical_groups_not_flagged() {
        let rows = significance_table(&[group("vg", &[1.0, 2.0, 3.0]), group("w", &[1.0, 2.0, 3.0])], 0.05).unwrap();
        let w = rows.iter().find(|r| r.method == "w").unwrap();
        assert_eq!(w.best_method, "vg");
        assert_eq!(w.p, Some(1.0));
        assert!(!w.significant);
    }

    #[test]
    fn clear_gap_flagged() {
        let rows = significance_table(
            &[group("vg", &[10.0, 10.0, 10.0]), group("w", &[0.0, 0.0, 0.0001])],
            0.05,
        )
        .unwrap();
        let w = rows.iter().find(|r| r.method == "w").unwrap();
        assert!(w.significant, "{w:?}");
        let vg = rows.iter().find(|r| r.method == "vg").unwrap();
        assert!(vg.p.is_none() && !vg.significant);
    }

    #[test]
    fn single_group_has_no_comparisons() {
        let rows = significance_table(&[group("vg", &[1.0, 2.0])], 0.05).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].p.is_none());
    }

    #[test]
    fn cell_errors_are_notes() {
        let rows = significance_table(&[group("a", &[1.0, 1.0]), group("b", &[2.0, 2.0])], 0.05).unwrap();
        assert!(rows.iter().any(|r| r.note.is_some()));
        let bad = significance_table(&[group("a", &[1.0, 2.0]), group("b", &[2.0, 2.0, 3.0])], 0.05);
        assert!(bad.is_err());
    }

    fn gated(bias: f64) -> Model {
        let words = ["a", "b", "a", "c"];
        let dims = ModelDims {
            word_dim: 3,
            char_dim: 2,
            char_hidden: 3,
            sentence_dim: 2,
            classifier_hidden: 2,
        };
        let mut m = Model::new(
            CombinationMethod::VectorGate,
            dims,
            WordVocab::build(words, 1),
            CharVocab::build(words),
            false,
            None,
            &mut SeededRng::new(0),
        )
        .unwrap();
        m.params.gate = GateParams::constant(CombinationMethod::VectorGate, 3, bias);
        m
    }

    #[test]
    fn untrained_gate_is_half_and_sorted() {
        let freqs = BTreeMap::from([("a".to_string(), 10), ("b".to_string(), 5)]);
        let p = gate_profile(&gated(0.0), &["b", "a", "zzz"], &freqs).unwrap();
        let words: Vec<&str> = p.iter().map(|g| g.word.as_str()).collect();
        assert_eq!(words, ["a", "b", "zzz"]);
        assert!(p.iter().all(|g| g.mean_gate == 0.5));
    }

    #[test]
    fn word_only_reduction_gates_vanish() {
        let p = gate_profile(&gated(-50.0), &["a", "b"], &BTreeMap::new()).unwrap();
        assert!(p.iter().all(|g| g.mean_gate < 1e-20));
    }

    #[test]
    fn non_gate_model_rejected() {
        let mut m = gated(0.0);
        m.method = CombinationMethod::Concat;
        assert!(gate_profile(&m, &["a"], &BTreeMap::new()).is_err());
    }

    fn table(cols: &[(&str, &[f64])]) -> ResultTable {
        let n = cols[0].1.len();
        ResultTable::new(
            (0..n).map(|i| format!("run{i}")).collect(),
            cols.iter().map(|c| c.0.to_string()).collect(),
            (0..n).map(|i| cols.iter().map(|c| c.1[i]).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn self_and_negated_correlation() {
        let x: &[f64] = &[1.0, 3.0, 2.0, 5.0];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let w = table(&[("simlex", x)]);
        let s = table(&[("same", x), ("neg", &neg)]);
        let m = performance_correlation_matrix(&w, &s).unwrap();
        assert_eq!(m.values[0][0], Some(1.0));
        assert_eq!(m.values[0][1], Some(-1.0));
    }

    #[test]
    fn misaligned_tables_rejected() {
        let w = table(&[("a", &[1.0, 2.0])]);
        let s = table(&[("b", &[1.0, 2.0, 3.0])]);
        assert!(performance_correlation_matrix(&w, &s).is_err());
    }
}
