use std::collections::{BTreeMap, HashMap};

use sha2::{Digest, Sha256};

pub const PAD: &str = "<pad>";
pub const UNK: &str = "<unk>";

/// Word vocabulary with frequency cutoff.
///
/// Index 0 is padding, index 1 is UNK; remaining words follow in order of
/// decreasing corpus count, ties broken lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordVocab {
    index_to_word: Vec<String>,
    word_to_index: HashMap<String, usize>,
    counts: Vec<u64>,
    min_freq: u64,
}

impl WordVocab {
    pub const PAD_INDEX: usize = 0;
    pub const UNK_INDEX: usize = 1;

    /// Keeps every token seen at least `min_freq` times.
    pub fn build<S: AsRef<str>>(tokens: impl IntoIterator<Item = S>, min_freq: u64) -> Self {
        assert!(min_freq >= 1, "min_freq must be at least 1");
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t.as_ref().to_string()).or_default() += 1;
        }
        let mut kept: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c >= min_freq).collect();
        // BTreeMap iteration is lexicographic, so a stable sort keeps ties in that order
        kept.sort_by_key(|e| std::cmp::Reverse(e.1));
        Self::from_counts(kept, min_freq)
    }

    /// Rebuilds a vocabulary from `(word, count)` entries in index order (specials excluded).
    pub fn from_counts(entries: Vec<(String, u64)>, min_freq: u64) -> Self {
        let mut index_to_word = vec![PAD.to_string(), UNK.to_string()];
        let mut counts = vec![0, 0];
        for (w, c) in entries {
            index_to_word.push(w);
            counts.push(c);
        }
        let word_to_index = index_to_word.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        Self {
            index_to_word,
            word_to_index,
            counts,
            min_freq,
        }
    }

    pub fn index(&self, word: &str) -> usize {
        match self.word_to_index.get(word) {
            Some(&i) if i >= 2 => i,
            _ => Self::UNK_INDEX,
        }
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index(word) != Self::UNK_INDEX
    }

    pub fn word(&self, index: usize) -> Option<&str> {
        self.index_to_word.get(index).map(String::as_str)
    }

    pub fn count(&self, index: usize) -> u64 {
        self.counts.get(index).copied().unwrap_or(0)
    }

    pub fn min_freq(&self) -> u64 {
        self.min_freq
    }

    /// Number of entries including the two specials.
    pub fn len(&self) -> usize {
        self.index_to_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 2
    }

    /// Regular (non-special) words with their counts, in index order.
    pub fn entries(&self) -> impl Iterator<Item = (&str, u64)> {
        self.index_to_word[2..]
            .iter()
            .map(String::as_str)
            .zip(self.counts[2..].iter().copied())
    }

    /// SHA-256 over the words in index order, hex encoded.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        for w in &self.index_to_word {
            h.update(w.as_bytes());
            h.update([0u8]);
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_drops_singletons() {
        let v = WordVocab::build(["a", "a", "b"], 2);
        assert!(v.contains("a"));
        assert_eq!(v.index("b"), WordVocab::UNK_INDEX);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn min_freq_one_keeps_everything() {
        let v = WordVocab::build(["a", "a", "b", "c"], 1);
        assert_eq!(v.len(), 5);
    }

    #[test]
    fn ties_are_lexicographic() {
        let v = WordVocab::build(["b", "b", "a", "a"], 1);
        assert_eq!(v.index("a"), 2);
        assert_eq!(v.index("b"), 3);
        let v = WordVocab::build(["b", "b", "b", "a", "a"], 1);
        assert_eq!(v.index("b"), 2);
    }

    #[test]
    fn empty_stream_has_specials_only() {
        let v = WordVocab::build(Vec::<String>::new(), 2);
        assert!(v.is_empty());
        assert_eq!(v.word(0), Some(PAD));
        assert_eq!(v.word(1), Some(UNK));
    }

    #[test]
    fn specials_never_match_as_words() {
        let v = WordVocab::build(["x", "x"], 1);
        assert_eq!(v.index(PAD), WordVocab::UNK_INDEX);
    }

    #[test]
    fn fingerprint_tracks_order() {
        let a = WordVocab::build(["a", "a", "b"], 1);
        let b = WordVocab::build(["a", "b", "b"], 1);
        assert_ne!(a.fingerprint(), b.fingerprint());
        assert_eq!(a.fingerprint(), WordVocab::build(["b", "a", "a"], 1).fingerprint());
    }
}
