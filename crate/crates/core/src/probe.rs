//! Linear probes over frozen sentence representations.
//!
//! Task files are tab-separated, one example per line:
//! `label TAB sentence [TAB sentence2]`. Every line of a file has the same
//! number of columns. Classification labels are arbitrary strings; relatedness
//! and similarity labels are finite numbers. Sentences are tokenized with
//! [`crate::data::tokenize`].

use std::fs;
use std::path::Path;

use crate::autodiff::softmax_raw;
use crate::data::tokenize;
use crate::error::{Error, Result};
use crate::eval_word::{cosine_slices, pearson, scaled};
use crate::model::{argmax, Model};
use crate::tensor::Tensor;

/// Gradient-norm threshold at which probe training stops.
pub const PROBE_GRAD_TOLERANCE: f64 = 1e-6;
pub const PROBE_MAX_ITERATIONS: usize = 10_000;
/// L2 penalty used by the command line when none is given.
pub const DEFAULT_PROBE_L2: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    /// Logistic regression, scored by accuracy (%).
    Classification,
    /// Ridge regression, scored by Pearson ×100.
    Relatedness,
    /// No training: cosine of the two sentence vectors against the gold
    /// score, Pearson ×100.
    DirectSimilarity,
}

impl ProbeKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Classification => "cls",
            Self::Relatedness => "rel",
            Self::DirectSimilarity => "sts",
        }
    }

    fn metric_name(self) -> &'static str {
        match self {
            Self::Classification => "accuracy",
            Self::Relatedness | Self::DirectSimilarity => "pearson_x100",
        }
    }
}

impl std::str::FromStr for ProbeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cls" => Ok(Self::Classification),
            "rel" => Ok(Self::Relatedness),
            "sts" => Ok(Self::DirectSimilarity),
            other => Err(Error::invalid(format!(
                "unknown probe kind `{other}` (expected cls, rel or sts)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeExample {
    pub sentence: Vec<String>,
    pub sentence2: Option<Vec<String>>,
    /// Raw label column.
    pub label: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeTask {
    pub name: String,
    pub kind: ProbeKind,
    pub examples: Vec<ProbeExample>,
}

impl ProbeTask {
    pub fn is_pair_task(&self) -> bool {
        self.examples.first().is_some_and(|e| e.sentence2.is_some())
    }

    /// Sorted distinct labels of a classification task.
    pub fn classes(&self) -> Vec<String> {
        let mut c: Vec<String> = self.examples.iter().map(|e| e.label.clone()).collect();
        c.sort();
        c.dedup();
        c
    }

    /// Numeric targets: class indices into `classes` for classification,
    /// parsed scores otherwise.
    pub fn targets(&self, classes: &[String]) -> Result<Vec<f64>> {
        self.examples
            .iter()
            .map(|e| match self.kind {
                ProbeKind::Classification => classes
                    .iter()
                    .position(|c| *c == e.label)
                    .map(|i| i as f64)
                    .ok_or_else(|| Error::invalid(format!("{}: label `{}` not seen in training", self.name, e.label))),
                _ => e.label.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                    Error::invalid(format!("{}: label `{}` is not a finite number", self.name, e.label))
                }),
            })
            .collect()
    }

    /// Splits off every fifth example (indices 4, 9, ...) as held-out data.
    pub fn holdout_split(&self) -> (ProbeTask, ProbeTask) {
        let (mut train, mut held) = (Vec::new(), Vec::new());
        for (i, e) in self.examples.iter().enumerate() {
            if i % 5 == 4 {
                held.push(e.clone());
            } else {
                train.push(e.clone());
            }
        }
        let part = |examples| ProbeTask {
            name: self.name.clone(),
            kind: self.kind,
            examples,
        };
        (part(train), part(held))
    }
}

/// Parses task text; `path` is only used in error messages.
pub fn parse_probe_task(name: &str, kind: ProbeKind, text: &str, path: &Path) -> Result<ProbeTask> {
    let mut examples = Vec::new();
    let mut columns = None;
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 2 or 3 tab-separated columns, found {}", fields.len()),
            ));
        }
        if *columns.get_or_insert(fields.len()) != fields.len() {
            return Err(Error::parse(path, lineno, "column count differs from the first line"));
        }
        let label = fields[0].trim();
        if label.is_empty() {
            return Err(Error::parse(path, lineno, "empty label"));
        }
        if kind != ProbeKind::Classification && !label.parse::<f64>().is_ok_and(f64::is_finite) {
            return Err(Error::parse(
                path,
                lineno,
                format!("label `{label}` is not a finite number"),
            ));
        }
        let sentence = tokenize(fields[1]);
        let sentence2 = fields.get(2).map(|s| tokenize(s));
        if sentence.is_empty() || sentence2.as_ref().is_some_and(|s| s.is_empty()) {
            return Err(Error::parse(path, lineno, "empty sentence"));
        }
        examples.push(ProbeExample {
            sentence,
            sentence2,
            label: label.to_string(),
        });
    }
    if examples.is_empty() {
        return Err(Error::parse(path, 0, "no examples"));
    }
    if kind == ProbeKind::DirectSimilarity && columns != Some(3) {
        return Err(Error::parse(path, 1, "sts tasks need two sentences per line"));
    }
    Ok(ProbeTask {
        name: name.to_string(),
        kind,
        examples,
    })
}

pub fn load_probe_task(path: impl AsRef<Path>, kind: ProbeKind) -> Result<ProbeTask> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map_or_else(|| "task".to_string(), |s| s.to_string_lossy().into_owned());
    parse_probe_task(&name, kind, &text, path)
}

/// A fitted linear probe.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    pub kind: ProbeKind,
    /// `[d, k]`; `k` is the class count, or 1 for regression.
    pub weights: Tensor,
    pub bias: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Probe {
    pub fn input_dim(&self) -> usize {
        self.weights.rows()
    }

    fn scores(&self, x: &[f64]) -> Vec<f64> {
        let k = self.bias.len();
        let mut z = self.bias.clone();
        for (j, &xj) in x.iter().enumerate() {
            if xj != 0.0 {
                let row = self.weights.row(j);
                for c in 0..k {
                    z[c] += xj * row[c];
                }
            }
        }
        z
    }

    /// Class index (as f64) or regression output for every row of `reps`.
    pub fn predict(&self, reps: &Tensor) -> Result<Vec<f64>> {
        check_reps(reps, Some(self.input_dim()))?;
        Ok((0..reps.rows())
            .map(|i| {
                let z = self.scores(reps.row(i));
                match self.kind {
                    ProbeKind::Classification => argmax(&z) as f64,
                    _ => z[0],
                }
            })
            .collect())
    }
}

fn check_reps(reps: &Tensor, dim: Option<usize>) -> Result<()> {
    if !reps.is_matrix() {
        return Err(Error::invalid(format!(
            "probe representations must be a matrix, got shape {:?}",
            reps.shape()
        )));
    }
    if let Some(d) = dim {
        if reps.cols() != d {
            return Err(Error::shape("probe", reps.shape(), &[reps.rows(), d]));
        }
    }
    if !reps.all_finite() {
        return Err(Error::NonFinite("probe representations".into()));
    }
    Ok(())
}

/// Fits a probe by full-batch gradient descent from zero weights.
///
/// Classification minimises mean cross-entropy plus `l2/2·‖W‖²`; relatedness
/// minimises mean squared error over two plus the same penalty. Biases are not
/// penalised. Weight and bias blocks take separate fixed steps of one over
/// twice their curvature bound, which keeps the iteration monotone. Training
/// stops when the gradient norm drops below [`PROBE_GRAD_TOLERANCE`] or after
/// [`PROBE_MAX_ITERATIONS`] steps.
pub fn train_probe(reps: &Tensor, labels: &[f64], l2: f64, kind: ProbeKind) -> Result<Probe> {
    check_reps(reps, None)?;
    let (n, d) = (reps.rows(), reps.cols());
    if n < 2 {
        return Err(Error::invalid(format!("a probe needs at least two examples, got {n}")));
    }
    if labels.len() != n {
        return Err(Error::invalid(format!(
            "{n} representations but {} labels",
            labels.len()
        )));
    }
    if !(l2 >= 0.0 && l2.is_finite()) {
        return Err(Error::invalid(format!("l2 must be finite and non-negative, got {l2}")));
    }
    if labels.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("probe labels".into()));
    }
    let k = match kind {
        ProbeKind::Classification => {
            if labels.iter().any(|&y| y < 0.0 || y.fract() != 0.0) {
                return Err(Error::invalid(
                    "classification labels must be non-negative class indices",
                ));
            }
            let mut distinct: Vec<u64> = labels.iter().map(|&y| y as u64).collect();
            distinct.sort_unstable();
            distinct.dedup();
            if distinct.len() < 2 {
                return Err(Error::invalid("classification probe needs at least two classes"));
            }
            *distinct.last().unwrap() as usize + 1
        }
        ProbeKind::Relatedness => 1,
        ProbeKind::DirectSimilarity => return Err(Error::invalid("sts tasks are evaluated directly, not trained")),
    };

    let max_sq = (0..n)
        .map(|i| reps.row(i).iter().map(|v| v * v).sum::<f64>())
        .fold(0.0, f64::max);
    // curvature of the data term per unit of ‖x‖²: 1/2 for softmax CE, 1 for squared error
    let c = if kind == ProbeKind::Classification { 0.5 } else { 1.0 };
    let step_w = 1.0 / (2.0 * c * max_sq + l2).max(f64::MIN_POSITIVE);
    let step_b = 1.0 / (2.0 * c);

    let mut probe = Probe {
        kind,
        weights: Tensor::zeros(&[d, k]),
        bias: vec![0.0; k],
        iterations: 0,
        converged: false,
    };
    let inv_n = 1.0 / n as f64;
    let mut gw = vec![0.0; d * k];
    let mut gb = vec![0.0; k];
    for it in 0..=PROBE_MAX_ITERATIONS {
        gw.iter_mut().for_each(|g| *g = 0.0);
        gb.iter_mut().for_each(|g| *g = 0.0);
        for i in 0..n {
            let x = reps.row(i);
            let z = probe.scores(x);
            let dz: Vec<f64> = match kind {
                ProbeKind::Classification => {
                    let mut p = softmax_raw(&z);
                    p[labels[i] as usize] -= 1.0;
                    p
                }
                _ => vec![z[0] - labels[i]],
            };
            for (j, &xj) in x.iter().enumerate() {
                if xj != 0.0 {
                    for c in 0..k {
                        gw[j * k + c] += xj * dz[c] * inv_n;
                    }
                }
            }
            for c in 0..k {
                gb[c] += dz[c] * inv_n;
            }
        }
        for (g, w) in gw.iter_mut().zip(probe.weights.data()) {
            *g += l2 * w;
        }
        let norm = gw.iter().chain(&gb).map(|g| g * g).sum::<f64>().sqrt();
        if !norm.is_finite() {
            return Err(Error::NonFinite(format!("probe gradient at iteration {it}")));
        }
        probe.iterations = it;
        if norm < PROBE_GRAD_TOLERANCE {
            probe.converged = true;
            break;
        }
        if it == PROBE_MAX_ITERATIONS {
            break;
        }
        for (w, g) in probe.weights.data_mut().iter_mut().zip(&gw) {
            *w -= step_w * g;
        }
        for (b, g) in probe.bias.iter_mut().zip(&gb) {
            *b -= step_b * g;
        }
    }
    Ok(probe)
}

/// Accuracy (%) for classification probes, Pearson ×100 for regression.
pub fn evaluate_probe(probe: &Probe, reps: &Tensor, labels: &[f64]) -> Result<f64> {
    let predicted = probe.predict(reps)?;
    if predicted.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} representations but {} labels",
            predicted.len(),
            labels.len()
        )));
    }
    match probe.kind {
        ProbeKind::Classification => accuracy_percent(&predicted, labels),
        _ => Ok(scaled(pearson(&predicted, labels)?)),
    }
}

/// Percentage of exact matches.
pub fn accuracy_percent(predicted: &[f64], gold: &[f64]) -> Result<f64> {
    if predicted.len() != gold.len() || gold.is_empty() {
        return Err(Error::invalid(
            "accuracy needs equally long, non-empty prediction and gold lists",
        ));
    }
    let hits = predicted.iter().zip(gold).filter(|(p, g)| p == g).count();
    Ok(100.0 * hits as f64 / gold.len() as f64)
}

/// Probe input for one example: the sentence vector, or `[|u−v|; u⊙v]` for
/// sentence pairs.
pub fn features(model: &Model, example: &ProbeExample) -> Result<Vec<f64>> {
    let u = model.encode_sentence(&example.sentence)?.into_data();
    Ok(match &example.sentence2 {
        None => u,
        Some(s2) => {
            let v = model.encode_sentence(s2)?.into_data();
            let mut f: Vec<f64> = u.iter().zip(&v).map(|(a, b)| (a - b).abs()).collect();
            f.extend(u.iter().zip(&v).map(|(a, b)| a * b));
            f
        }
    })
}

/// Centres every column of `train` and `eval` on the training mean and scales
/// it by the training standard deviation. Constant columns are only centred.
pub fn standardize(train: &mut Tensor, eval: &mut Tensor) -> Result<()> {
    if train.cols() != eval.cols() {
        return Err(Error::shape("standardize", eval.shape(), &[eval.rows(), train.cols()]));
    }
    let (n, d) = (train.rows(), train.cols());
    for j in 0..d {
        let col = (0..n).map(|i| train.row(i)[j]);
        let mean = col.clone().sum::<f64>() / n as f64;
        let var = col.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let scale = if var > 0.0 { 1.0 / var.sqrt() } else { 1.0 };
        for t in [&mut *train, &mut *eval] {
            let cols = t.cols();
            for row in t.data_mut().chunks_mut(cols) {
                row[j] = (row[j] - mean) * scale;
            }
        }
    }
    Ok(())
}

pub fn feature_matrix(model: &Model, task: &ProbeTask) -> Result<Tensor> {
    let rows = task
        .examples
        .iter()
        .map(|e| features(model, e))
        .collect::<Result<Vec<_>>>()?;
    Tensor::from_rows(&rows)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub task: String,
    pub kind: ProbeKind,
    pub n_train: usize,
    pub n_eval: usize,
    pub metric: &'static str,
    pub value: f64,
    /// Probe iterations; 0 for direct similarity.
    pub iterations: usize,
    pub converged: bool,
}

pub const PROBE_REPORT_HEADER: &str = "task,kind,n_train,n_eval,metric,value,iterations,converged";

impl ProbeReport {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.task,
            self.kind.as_str(),
            self.n_train,
            self.n_eval,
            self.metric,
            self.value,
            self.iterations,
            self.converged
        )
    }
}

/// Evaluates `model` on `task`. Trained kinds fit on `task` and score on
/// `dev`; without `dev`, every fifth example of `task` is held out instead.
/// Probe features are standardized with training statistics first.
/// Direct similarity scores every example of `dev` (or `task`).
pub fn evaluate_task(model: &Model, task: &ProbeTask, dev: Option<&ProbeTask>, l2: f64) -> Result<ProbeReport> {
    if let Some(dev) = dev {
        if dev.kind != task.kind || dev.is_pair_task() != task.is_pair_task() {
            return Err(Error::invalid(format!(
                "{}: dev file does not match the task format",
                task.name
            )));
        }
    }
    if task.kind == ProbeKind::DirectSimilarity {
        let eval = dev.unwrap_or(task);
        let mut cos = Vec::with_capacity(eval.examples.len());
        for e in &eval.examples {
            let u = model.encode_sentence(&e.sentence)?;
            let v = model.encode_sentence(e.sentence2.as_ref().expect("sts tasks are pair tasks"))?;
            cos.push(cosine_slices(u.data(), v.data())?);
        }
        let gold = eval.targets(&[])?;
        return Ok(ProbeReport {
            task: task.name.clone(),
            kind: task.kind,
            n_train: 0,
            n_eval: gold.len(),
            metric: task.kind.metric_name(),
            value: scaled(pearson(&cos, &gold)?),
            iterations: 0,
            converged: true,
        });
    }
    let (train, eval) = match dev {
        Some(d) => (task.clone(), d.clone()),
        None => task.holdout_split(),
    };
    if eval.examples.is_empty() {
        return Err(Error::invalid(format!("{}: no held-out examples", task.name)));
    }
    let classes = train.classes();
    let train_y = train.targets(&classes)?;
    let eval_y = eval.targets(&classes)?;
    let (mut train_x, mut eval_x) = (feature_matrix(model, &train)?, feature_matrix(model, &eval)?);
    standardize(&mut train_x, &mut eval_x)?;
    let probe = train_probe(&train_x, &train_y, l2, task.kind)?;
    let value = evaluate_probe(&probe, &eval_x, &eval_y)?;
    Ok(ProbeReport {
        task: task.name.clone(),
        kind: task.kind,
        n_train: train_y.len(),
        n_eval: eval_y.len(),
        metric: task.kind.metric_name(),
        value,
        iterations: probe.iterations,
        converged: probe.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Tensor {
        Tensor::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn separable_data_is_fit_perfectly() {
        let x = m(&[
            &[1.0, 0.2],
            &[0.9, -0.1],
            &[-1.0, 0.3],
            &[-0.8, 0.0],
            &[1.2, 0.5],
            &[-1.1, -0.4],
        ]);
        let y = [1.0, 1.0, 0.0, 0.0, 1.0, 0.0];
        let p = train_probe(&x, &y, 0.0, ProbeKind::Classification).unwrap();
        assert_eq!(evaluate_probe(&p, &x, &y).unwrap(), 100.0);
    }

    #[test]
    fn huge_penalty_predicts_majority() {
        let x = m(&[&[1.0], &[2.0], &[3.0], &[-1.0], &[-2.0]]);
        let y = [1.0, 1.0, 1.0, 0.0, 0.0];
        let p = train_probe(&x, &y, 1e6, ProbeKind::Classification).unwrap();
        assert!(p.weights.data().iter().all(|w| w.abs() < 1e-5), "{:?}", p.weights);
        assert_eq!(p.predict(&x).unwrap(), vec![1.0; 5]);
        assert_eq!(evaluate_probe(&p, &x, &y).unwrap(), 60.0);
    }

    #[test]
    fn ridge_recovers_slope() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 / 3.0 - 1.0).collect();
        let x = m(&xs.iter().map(std::slice::from_ref).collect::<Vec<_>>());
        let y: Vec<f64> = xs.iter().map(|v| 2.0 * v).collect();
        let p = train_probe(&x, &y, 0.0, ProbeKind::Relatedness).unwrap();
        assert!(p.converged);
        assert!((p.weights.item() - 2.0).abs() < 1e-5, "{}", p.weights.item());
        assert!(p.bias[0].abs() < 1e-5);
        let loose = train_probe(&x, &y, 1e-3, ProbeKind::Relatedness).unwrap();
        assert!(loose.weights.item() < p.weights.item());
    }

    #[test]
    fn single_class_is_rejected() {
        let x = m(&[&[1.0], &[2.0]]);
        assert!(train_probe(&x, &[1.0, 1.0], 0.0, ProbeKind::Classification).is_err());
        assert!(train_probe(&m(&[&[1.0]]), &[1.0], 0.0, ProbeKind::Relatedness).is_err());
    }

    #[test]
    fn constant_predictor_scores_half() {
        assert_eq!(accuracy_percent(&[0.0; 4], &[0.0, 1.0, 0.0, 1.0]).unwrap(), 50.0);
        assert_eq!(accuracy_percent(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), 100.0);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let x = m(&[&[1.0], &[-1.0]]);
        let p = train_probe(&x, &[1.0, 0.0], 0.0, ProbeKind::Classification).unwrap();
        assert!(evaluate_probe(&p, &m(&[&[1.0, 2.0]]), &[1.0]).is_err());
    }

    #[test]
    fn regression_metric_is_eval_word_pearson() {
        let x = m(&[&[0.0, 1.0], &[1.0, 0.5], &[2.0, -1.0], &[3.0, 0.2], &[4.0, 0.0]]);
        let y = [0.1, 1.3, 1.9, 3.2, 3.9];
        let p = train_probe(&x, &y, 0.1, ProbeKind::Relatedness).unwrap();
        let pred = p.predict(&x).unwrap();
        assert_eq!(evaluate_probe(&p, &x, &y).unwrap(), pearson(&pred, &y).unwrap() * 100.0);
    }

    #[test]
    fn training_is_deterministic() {
        let x = m(&[&[0.3, 1.0], &[1.0, -0.5], &[-0.2, 0.1], &[0.7, 0.7]]);
        let y = [0.0, 1.0, 2.0, 1.0];
        let a = train_probe(&x, &y, 0.01, ProbeKind::Classification).unwrap();
        let b = train_probe(&x, &y, 0.01, ProbeKind::Classification).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn task_files_parse() {
        let p = Path::new("t.tsv");
        let t = parse_probe_task("t", ProbeKind::Classification, "pos\tGood film.\nneg\tBad film.\n", p).unwrap();
        assert_eq!(t.classes(), ["neg", "pos"]);
        assert_eq!(t.examples[0].sentence, ["Good", "film", "."]);
        assert_eq!(t.targets(&t.classes()).unwrap(), [1.0, 0.0]);
        assert!(!t.is_pair_task());
        assert!(parse_probe_task("t", ProbeKind::Relatedness, "x\ta b\tc\n", p).is_err());
        assert!(parse_probe_task("t", ProbeKind::DirectSimilarity, "0.5\ta b\n", p).is_err());
        assert!(parse_probe_task("t", ProbeKind::Classification, "a\tb\nc\td\te\n", p).is_err());
        assert!(parse_probe_task("t", ProbeKind::Relatedness, "NaN\ta\tb\n", p).is_err());
        let sts = parse_probe_task("t", ProbeKind::DirectSimilarity, "4.5\ta b\ta c\n", p).unwrap();
        assert!(sts.is_pair_task());
    }

    #[test]
    fn holdout_takes_every_fifth() {
        let text: String = (0..10).map(|i| format!("{}\ts{i}\n", i % 2)).collect();
        let t = parse_probe_task("t", ProbeKind::Classification, &text, Path::new("t")).unwrap();
        let (train, held) = t.holdout_split();
        assert_eq!(train.examples.len(), 8);
        let held_words: Vec<&str> = held.examples.iter().map(|e| e.sentence[0].as_str()).collect();
        assert_eq!(held_words, ["s4", "s9"]);
    }

    #[test]
    fn standardize_uses_training_statistics() {
        let mut train = m(&[&[1.0, 5.0], &[3.0, 5.0]]);
        let mut eval = m(&[&[2.0, 7.0], &[5.0, 5.0]]);
        standardize(&mut train, &mut eval).unwrap();
        assert_eq!(train.data(), [-1.0, 0.0, 1.0, 0.0]);
        assert_eq!(eval.data(), [0.0, 2.0, 3.0, 0.0]);
        assert!(standardize(&mut train, &mut m(&[&[1.0]])).is_err());
    }
}
