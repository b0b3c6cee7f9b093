//! Intrinsic word evaluation: cosine similarity between word vectors
//! correlated against human similarity judgements.

use crate::data::{WordSimPair, WordVocab};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::tensor::Tensor;

/// `u·v / (‖u‖‖v‖)`. Zero vectors are an error.
pub fn cosine_similarity(u: &Tensor, v: &Tensor) -> Result<f64> {
    if u.shape() != v.shape() || !u.is_vector() {
        return Err(Error::shape("cosine_similarity", u.shape(), v.shape()));
    }
    cosine_slices(u.data(), v.data())
}

pub(crate) fn cosine_slices(u: &[f64], v: &[f64]) -> Result<f64> {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::invalid("cosine similarity of a zero vector"));
    }
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Sample Pearson correlation coefficient.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!("pearson: {} values vs {}", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::invalid("pearson needs at least two points"));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("pearson input".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance("pearson: an input has zero variance".into()));
    }
    // one square root of the product so identical inputs give exactly 1
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks; tied values share the mean of their ranks.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation: Pearson over average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::invalid(format!("spearman: {} values vs {}", xs.len(), ys.len())));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("spearman input".into()));
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Correlation on the reported `[-100, 100]` scale.
pub fn scaled(raw: f64) -> f64 {
    raw * 100.0
}

#[derive(Clone, Debug, PartialEq)]
pub struct WordEvalReport {
    pub dataset: String,
    pub n_pairs: usize,
    pub pearson: f64,
    pub spearman: f64,
    pub pearson_x100: f64,
    pub spearman_x100: f64,
    /// Fraction of distinct dataset words present in the word vocabulary.
    pub coverage: f64,
    pub oov_note: String,
}

fn coverage(vocab: &WordVocab, pairs: &[WordSimPair]) -> f64 {
    let mut words: Vec<&str> = pairs
        .iter()
        .flat_map(|p| [p.word1.as_str(), p.word2.as_str()])
        .collect();
    words.sort_unstable();
    words.dedup();
    if words.is_empty() {
        return 0.0;
    }
    words.iter().filter(|w| vocab.contains(w)).count() as f64 / words.len() as f64
}

/// Cosine of each pair's final word vectors against the gold scores. No pair
/// is dropped: words outside the vocabulary use the unknown-word embedding
/// (plus their characters, for methods that read them).
pub fn evaluate_wordsim(model: &Model, dataset: &str, pairs: &[WordSimPair]) -> Result<WordEvalReport> {
    if pairs.is_empty() {
        return Err(Error::invalid(format!("{dataset}: no word pairs")));
    }
    let mut cache = std::collections::HashMap::new();
    let mut rep = |w: &str| -> Result<Tensor> {
        if let Some(t) = cache.get(w) {
            return Ok(Tensor::clone(t));
        }
        let t = model.word_representation(w)?;
        cache.insert(w.to_string(), t.clone());
        Ok(t)
    };
    let mut predicted = Vec::with_capacity(pairs.len());
    let mut gold = Vec::with_capacity(pairs.len());
    for p in pairs {
        let (a, b) = (rep(&p.word1)?, rep(&p.word2)?);
        predicted.push(cosine_similarity(&a, &b)?);
        gold.push(p.gold);
    }
    let r = pearson(&predicted, &gold)?;
    let rho = spearman(&predicted, &gold)?;
    let cov = coverage(&model.word_vocab, pairs);
    let oov_note = if model.method.uses_chars() {
        "out-of-vocabulary words: unknown-word embedding plus character encoding"
    } else {
        "out-of-vocabulary words: unknown-word embedding"
    };
    Ok(WordEvalReport {
        dataset: dataset.to_string(),
        n_pairs: pairs.len(),
        pearson: r,
        spearman: rho,
        pearson_x100: scaled(r),
        spearman_x100: scaled(rho),
        coverage: cov,
        oov_note: oov_note.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> Tensor {
        Tensor::vector(xs.to_vec()).unwrap()
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine_similarity(&v(&[1.0, 0.0]), &v(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
        let c = cosine_similarity(&v(&[1.0, 1.0]), &v(&[1.0, 0.0])).unwrap();
        assert!((c - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(cosine_similarity(&v(&[0.0, 0.0]), &v(&[1.0, 0.0])).is_err());
    }

    #[test]
    fn pearson_examples() {
        let xs = [1.0, 2.0, 3.0];
        assert!((pearson(&xs, &[2.0, 4.0, 6.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((pearson(&xs, &[-1.0, -2.0, -3.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((pearson(&xs, &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(pearson(&xs, &[1.0, 1.0, 1.0]), Err(Error::ZeroVariance(_))));
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&xs, &[1.0]).is_err());
    }

    #[test]
    fn spearman_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(spearman(&xs, &xs).unwrap(), 1.0);
        assert!((spearman(&xs, &[4.0, 3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&xs, &[1.0, 2.0, 4.0, 3.0]).unwrap() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn ties_share_ranks() {
        assert_eq!(average_ranks(&[10.0, 20.0, 10.0, 5.0]), [2.5, 4.0, 2.5, 1.0]);
    }

    #[test]
    fn scaling_is_times_100() {
        assert_eq!(scaled(0.5), 50.0);
        assert_eq!(scaled(-1.0), -100.0);
    }
}
