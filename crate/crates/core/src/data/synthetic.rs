//! Synthetic NLI corpora for smoke tests and frequency experiments.
//!
//! Two generators:
//!
//! * [`overfit_fixture`]: a small, perfectly separable set where the label is
//!   fixed by a marker word in the hypothesis.
//! * [`zipf_corpus`]: sentences over an invented vocabulary whose word
//!   frequencies follow a power law. Every word belongs to one of three
//!   classes; the class is usually, but not always, spelled out by the word's
//!   suffix. The label of a pair is the class of its hypothesis; the premise
//!   is a distractor.
//!   Frequent words can be learned exactly from their own embeddings, rare
//!   ones only through their spelling.

use std::collections::{BTreeMap, BTreeSet};

use crate::data::nli::{NliExample, NliLabel};
use crate::rng::SeededRng;

const CONSONANTS: &[u8] = b"bdfgjprstvz";
const VOWELS: &[u8] = b"aeiou";
const SUFFIXES: [&str; 3] = ["ka", "lo", "mi"];

fn stem(rng: &mut SeededRng, syllables: usize) -> String {
    let mut s = String::new();
    for _ in 0..syllables {
        s.push(CONSONANTS[rng.below(CONSONANTS.len())] as char);
        s.push(VOWELS[rng.below(VOWELS.len())] as char);
    }
    s
}

/// 64-example (by default) separable fixture. Premises are two random filler
/// words; hypotheses are one filler word followed by one of six marker words,
/// two per label.
pub fn overfit_fixture(n: usize, seed: u64) -> Vec<NliExample> {
    let mut rng = SeededRng::new(seed);
    let fillers = ["tom", "ann", "cat", "dog", "sun", "sea", "red", "big"];
    let markers = [["yes", "true"], ["maybe", "perhaps"], ["no", "never"]];
    (0..n)
        .map(|i| {
            let label = NliLabel::ALL[i % 3];
            let marker = markers[label.index()][rng.below(2)];
            NliExample {
                premise: vec![
                    fillers[rng.below(fillers.len())].to_string(),
                    fillers[rng.below(fillers.len())].to_string(),
                ],
                hypothesis: vec![fillers[rng.below(fillers.len())].to_string(), marker.to_string()],
                label,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZipfConfig {
    pub vocab_size: usize,
    pub train_pairs: usize,
    pub dev_pairs: usize,
    /// Power-law exponent of the word distribution.
    pub exponent: f64,
    /// Probability that a word's suffix names its true class.
    pub suffix_reliability: f64,
    /// Sentences hold between 1 and this many words.
    pub max_sentence_len: usize,
    pub seed: u64,
}

impl Default for ZipfConfig {
    fn default() -> Self {
        Self {
            vocab_size: 500,
            train_pairs: 1000,
            dev_pairs: 200,
            exponent: 1.0,
            suffix_reliability: 0.7,
            max_sentence_len: 6,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ZipfCorpus {
    pub train: Vec<NliExample>,
    pub dev: Vec<NliExample>,
    /// Words in Zipf rank order (most probable first).
    pub words: Vec<String>,
    pub word_class: BTreeMap<String, usize>,
}

impl ZipfCorpus {
    /// Every premise and hypothesis of the training pairs.
    pub fn train_sentences(&self) -> Vec<Vec<String>> {
        self.train
            .iter()
            .flat_map(|ex| [ex.premise.clone(), ex.hypothesis.clone()])
            .collect()
    }

    /// Token counts over the training pairs.
    pub fn train_frequencies(&self) -> BTreeMap<String, u64> {
        let mut counts = BTreeMap::new();
        for ex in &self.train {
            for t in ex.tokens() {
                *counts.entry(t.to_string()).or_insert(0) += 1;
            }
        }
        counts
    }
}

struct Sampler {
    cumulative: Vec<f64>,
}

impl Sampler {
    fn new(weights: &[f64]) -> Self {
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        Self { cumulative }
    }

    fn sample(&self, rng: &mut SeededRng) -> usize {
        let u = rng.unit();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }
}

pub fn zipf_corpus(cfg: &ZipfConfig) -> ZipfCorpus {
    let mut rng = SeededRng::new(cfg.seed);
    let mut seen = BTreeSet::new();
    let mut words = Vec::with_capacity(cfg.vocab_size);
    let mut classes = Vec::with_capacity(cfg.vocab_size);
    while words.len() < cfg.vocab_size {
        let class = words.len() % 3;
        let shown = if rng.unit() < cfg.suffix_reliability {
            class
        } else {
            (class + 1 + rng.below(2)) % 3
        };
        let syllables = 1 + rng.below(2);
        let w = format!("{}{}", stem(&mut rng, syllables), SUFFIXES[shown]);
        if seen.insert(w.clone()) {
            words.push(w);
            classes.push(class);
        }
    }
    // interleave classes across ranks so every class spans the frequency range
    let weights: Vec<f64> = (0..words.len())
        .map(|r| 1.0 / ((r + 1) as f64).powf(cfg.exponent))
        .collect();
    let by_class: Vec<Vec<usize>> = (0..3)
        .map(|c| (0..words.len()).filter(|&i| classes[i] == c).collect())
        .collect();
    let class_samplers: Vec<Sampler> = by_class
        .iter()
        .map(|ids| Sampler::new(&ids.iter().map(|&i| weights[i]).collect::<Vec<_>>()))
        .collect();
    let global = Sampler::new(&weights);

    let sentence = |rng: &mut SeededRng| -> (Vec<String>, usize) {
        let first = global.sample(rng);
        let class = classes[first];
        let len = 1 + rng.below(cfg.max_sentence_len);
        let mut out = vec![words[first].clone()];
        for _ in 1..len {
            let j = by_class[class][class_samplers[class].sample(rng)];
            out.push(words[j].clone());
        }
        (out, class)
    };
    let pairs = |n: usize, rng: &mut SeededRng| -> Vec<NliExample> {
        (0..n)
            .map(|_| {
                let (premise, _) = sentence(rng);
                let (hypothesis, class) = sentence(rng);
                NliExample {
                    premise,
                    hypothesis,
                    label: NliLabel::ALL[class],
                }
            })
            .collect()
    };
    let train = pairs(cfg.train_pairs, &mut rng);
    let dev = pairs(cfg.dev_pairs, &mut rng);
    let word_class = words.iter().cloned().zip(classes).collect();
    ZipfCorpus {
        train,
        dev,
        words,
        word_class,
    }
}
