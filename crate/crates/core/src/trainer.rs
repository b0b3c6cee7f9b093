//! Minibatch SGD training on NLI pairs, multi-seed orchestration and
//! best-validation checkpointing.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::autodiff::{clip_with, ClipMode, Tape};
use crate::char_encoder::CharVocab;
use crate::checkpoint::save_model;
use crate::combinators::CombinationMethod;
use crate::data::{load_embeddings, NliExample, PretrainedEmbeddings, WordVocab};
use crate::error::{Error, Result};
use crate::model::{argmax, Model, ModelDims};
use crate::rng::SeededRng;

/// How per-example losses in a minibatch are reduced to the scalar that is
/// differentiated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossReduction {
    Sum,
    /// Sum scaled by `1/B`, matching the reference trainer's gradient
    /// division by the batch size.
    #[default]
    Mean,
}

impl std::str::FromStr for LossReduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sum" => Ok(Self::Sum),
            "mean" => Ok(Self::Mean),
            other => Err(Error::invalid(format!(
                "unknown loss reduction `{other}` (expected sum or mean)"
            ))),
        }
    }
}

impl LossReduction {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sum => "sum",
            Self::Mean => "mean",
        }
    }
}

/// Hyperparameters of one training job.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub method: CombinationMethod,
    pub batch_size: usize,
    pub initial_lr: f64,
    /// The learning rate is divided by this after every epoch whose
    /// validation accuracy is below the previous epoch's.
    pub lr_divisor: f64,
    pub clip_threshold: f64,
    pub clip_mode: ClipMode,
    pub loss_reduction: LossReduction,
    pub max_epochs: usize,
    /// Training stops once the learning rate falls below this.
    pub min_lr: f64,
    /// Optional early stop once validation accuracy reaches this value.
    pub target_val_acc: Option<f64>,
    pub seeds: Vec<u64>,
    pub dims: ModelDims,
    pub min_freq: u64,
    pub lowercase: bool,
    /// Worker threads for [`run_seeds`]; each seed itself runs on one thread.
    pub parallel_seeds: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            method: CombinationMethod::VectorGate,
            batch_size: 64,
            initial_lr: 0.1,
            lr_divisor: 5.0,
            clip_threshold: 5.0,
            clip_mode: ClipMode::GlobalNorm,
            loss_reduction: LossReduction::Mean,
            max_epochs: 20,
            min_lr: 1e-5,
            target_val_acc: None,
            seeds: (1..=7).collect(),
            dims: ModelDims::default(),
            min_freq: 2,
            lowercase: false,
            parallel_seeds: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("batch_size", self.batch_size as f64),
            ("initial_lr", self.initial_lr),
            ("clip_threshold", self.clip_threshold),
            ("max_epochs", self.max_epochs as f64),
            ("min_lr", self.min_lr),
            ("min_freq", self.min_freq as f64),
            ("parallel_seeds", self.parallel_seeds as f64),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.lr_divisor > 1.0 && self.lr_divisor.is_finite()) {
            return Err(Error::invalid(format!(
                "lr_divisor must be > 1, got {}",
                self.lr_divisor
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::invalid("at least one seed is required"));
        }
        if let Some(t) = self.target_val_acc {
            if !(0.0..=1.0).contains(&t) {
                return Err(Error::invalid(format!("target_val_acc must lie in [0, 1], got {t}")));
            }
        }
        self.dims.validate(self.method)
    }
}

/// Training and validation pairs plus everything derived from them that is
/// shared between seeds.
#[derive(Clone, Debug)]
pub struct TrainData {
    pub train: Vec<NliExample>,
    pub dev: Vec<NliExample>,
    pub word_vocab: WordVocab,
    pub char_vocab: CharVocab,
    /// Pretrained vectors; rows missing from the file are redrawn per seed.
    pub embeddings: Option<PretrainedEmbeddings>,
}

impl TrainData {
    /// Builds both vocabularies from the training pairs.
    pub fn new(train: Vec<NliExample>, dev: Vec<NliExample>, min_freq: u64) -> Self {
        let word_vocab = WordVocab::build(train.iter().flat_map(|e| e.tokens()), min_freq);
        let char_vocab = CharVocab::build(train.iter().flat_map(|e| e.tokens()));
        Self {
            train,
            dev,
            word_vocab,
            char_vocab,
            embeddings: None,
        }
    }

    /// Attaches pretrained vectors in GloVe text format.
    pub fn with_embeddings(mut self, path: impl AsRef<Path>, dim: usize, lowercase: bool) -> Result<Self> {
        self.embeddings = Some(load_embeddings(
            path,
            &self.word_vocab,
            dim,
            lowercase,
            &mut SeededRng::new(0),
        )?);
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochLog {
    pub epoch: usize,
    /// Mean minibatch loss over the epoch.
    pub train_loss: f64,
    /// Accuracy of the forward passes made during the epoch, before each update.
    pub train_acc: f64,
    pub val_acc: f64,
    /// Learning rate used during the epoch.
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainState {
    pub epoch: usize,
    /// Learning rate for the next epoch.
    pub lr: f64,
    pub best_val_acc: f64,
    pub best_epoch: usize,
    pub best_checkpoint: Option<PathBuf>,
    pub log: Vec<EpochLog>,
}

impl TrainState {
    /// Per-epoch log as CSV with a header row.
    pub fn log_csv(&self) -> String {
        let mut s = String::from("epoch,train_loss,train_acc,val_acc,lr\n");
        for e in &self.log {
            let _ = writeln!(s, "{},{},{},{},{}", e.epoch, e.train_loss, e.train_acc, e.val_acc, e.lr);
        }
        s
    }
}

/// A finished run.
#[derive(Clone, Debug)]
pub struct TrainRun {
    pub seed: u64,
    pub state: TrainState,
    /// The model as it was after its best validation epoch.
    pub best_model: Model,
    /// The model after the last epoch.
    pub final_model: Model,
}

/// Fraction of `data` whose argmax prediction equals the gold label. Ties go
/// to the lowest class index.
pub fn evaluate_accuracy(model: &Model, data: &[NliExample]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::invalid("cannot evaluate accuracy on an empty dataset"));
    }
    let mut correct = 0usize;
    for ex in data {
        if model.predict(ex)? == ex.label.index() {
            correct += 1;
        }
    }
    Ok(correct as f64 / data.len() as f64)
}

/// Fresh model for `seed`, before any training.
pub fn init_model(config: &TrainConfig, data: &TrainData, seed: u64) -> Result<Model> {
    let mut rng = SeededRng::derived(seed, 0);
    let table = match &data.embeddings {
        Some(e) if config.method.uses_words() => {
            if e.table.cols() != config.dims.word_dim {
                return Err(Error::invalid(format!(
                    "embeddings have dimension {}, word_dim is {}",
                    e.table.cols(),
                    config.dims.word_dim
                )));
            }
            let mut e = e.clone();
            e.reinitialize_missing(&mut rng);
            Some(e.table)
        }
        _ => None,
    };
    Model::new(
        config.method,
        config.dims,
        data.word_vocab.clone(),
        data.char_vocab.clone(),
        config.lowercase,
        table,
        &mut rng,
    )
}

struct BatchOutcome {
    loss: f64,
    correct: usize,
}

fn train_batch(model: &mut Model, batch: &[&NliExample], config: &TrainConfig, lr: f64) -> Result<BatchOutcome> {
    let grads = {
        let mut tape = Tape::new();
        let mut fwd = model.bind(&mut tape);
        let mut losses = Vec::with_capacity(batch.len());
        let mut correct = 0;
        for ex in batch {
            let z = fwd.logits(&mut tape, ex)?;
            if argmax(tape.value(z).data()) == ex.label.index() {
                correct += 1;
            }
            losses.push(tape.cross_entropy(z, ex.label.index())?);
        }
        let total = tape.sum(&losses)?;
        let objective = match config.loss_reduction {
            LossReduction::Sum => total,
            LossReduction::Mean => tape.affine(total, 1.0 / batch.len() as f64, 0.0),
        };
        // logged loss is always the per-example mean
        let loss = tape.value(total).item() / batch.len() as f64;
        if !loss.is_finite() {
            return Ok(BatchOutcome { loss, correct });
        }
        let grads = tape.backward(objective)?;
        (grads, loss, correct)
    };
    let (grads, loss, correct) = grads;
    if !grads.all_finite() {
        return Ok(BatchOutcome {
            loss: f64::NAN,
            correct,
        });
    }
    let grads = clip_with(grads, config.clip_threshold, config.clip_mode);
    model.sgd_step(&grads, lr)?;
    Ok(BatchOutcome { loss, correct })
}

/// Trains one model from scratch. When `out_dir` is given, the best model is
/// written to `out_dir/best.ckpt` each time validation accuracy improves and
/// the metric log to `out_dir/metrics.csv` after every epoch.
pub fn train_one(config: &TrainConfig, data: &TrainData, seed: u64, out_dir: Option<&Path>) -> Result<TrainRun> {
    config.validate()?;
    let model = init_model(config, data, seed)?;
    train_from(config, data, seed, model, out_dir)
}

/// Like [`train_one`] but starts from `model`. `seed` still drives shuffling.
pub fn train_from(
    config: &TrainConfig,
    data: &TrainData,
    seed: u64,
    mut model: Model,
    out_dir: Option<&Path>,
) -> Result<TrainRun> {
    config.validate()?;
    if model.method != config.method || model.dims != config.dims {
        return Err(Error::invalid("model does not match the training configuration"));
    }
    if data.train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if data.dev.is_empty() {
        return Err(Error::invalid("validation set is empty"));
    }
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut shuffle_rng = SeededRng::derived(seed, 1);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut state = TrainState {
        epoch: 0,
        lr: config.initial_lr,
        best_val_acc: f64::NEG_INFINITY,
        best_epoch: 0,
        best_checkpoint: None,
        log: Vec::new(),
    };
    let mut best_model = model.clone();
    let mut prev_val: Option<f64> = None;

    for epoch in 1..=config.max_epochs {
        if state.lr < config.min_lr {
            break;
        }
        shuffle_rng.shuffle(&mut order);
        let mut loss_sum = 0.0;
        let mut batches = 0usize;
        let mut correct = 0usize;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<&NliExample> = chunk.iter().map(|&i| &data.train[i]).collect();
            let out = train_batch(&mut model, &batch, config, state.lr)?;
            if !out.loss.is_finite() {
                return Err(Error::NonFinite(format!(
                    "seed {seed}, epoch {epoch}, batch {b}: loss is {}",
                    out.loss
                )));
            }
            loss_sum += out.loss;
            batches += 1;
            correct += out.correct;
        }
        let val_acc = evaluate_accuracy(&model, &data.dev)?;
        state.log.push(EpochLog {
            epoch,
            train_loss: loss_sum / batches as f64,
            train_acc: correct as f64 / data.train.len() as f64,
            val_acc,
            lr: state.lr,
        });
        state.epoch = epoch;
        if val_acc > state.best_val_acc {
            state.best_val_acc = val_acc;
            state.best_epoch = epoch;
            best_model = model.clone();
            if let Some(dir) = out_dir {
                let path = dir.join("best.ckpt");
                save_model(&model, &path)?;
                state.best_checkpoint = Some(path);
            }
        }
        if prev_val.is_some_and(|p| val_acc < p) {
            state.lr /= config.lr_divisor;
        }
        prev_val = Some(val_acc);
        if let Some(dir) = out_dir {
            let path = dir.join("metrics.csv");
            fs::write(&path, state.log_csv()).map_err(|e| Error::io(&path, e))?;
        }
        if config.target_val_acc.is_some_and(|t| val_acc >= t) {
            break;
        }
    }
    Ok(TrainRun {
        seed,
        state,
        best_model,
        final_model: model,
    })
}

/// Outcome of one seed inside [`run_seeds`].
#[derive(Debug)]
pub struct SeedOutcome {
    pub seed: u64,
    pub result: Result<TrainRun>,
}

impl SeedOutcome {
    pub fn failed(&self) -> bool {
        self.result.is_err()
    }
}

/// Runs `runner` for each seed on a pool of `workers` threads. Failures are
/// kept in place and never stop the remaining seeds. Results come back in
/// seed-list order regardless of scheduling.
pub fn run_seeds_with<F>(seeds: &[u64], workers: usize, runner: F) -> Result<Vec<SeedOutcome>>
where
    F: Fn(u64) -> Result<TrainRun> + Sync,
{
    if seeds.is_empty() {
        return Err(Error::invalid("at least one seed is required"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| {
        seeds
            .par_iter()
            .map(|&seed| SeedOutcome {
                seed,
                result: runner(seed),
            })
            .collect()
    }))
}

/// Trains one model per configured seed. With `out_dir`, each seed writes
/// into `out_dir/seed-<n>/`.
pub fn run_seeds(config: &TrainConfig, data: &TrainData, out_dir: Option<&Path>) -> Result<Vec<SeedOutcome>> {
    config.validate()?;
    run_seeds_with(&config.seeds, config.parallel_seeds, |seed| {
        let dir = out_dir.map(|d| d.join(format!("seed-{seed}")));
        train_one(config, data, seed, dir.as_deref())
    })
}

/// Per-seed results in the `dataset,task,method,seed,value` layout read by
/// the significance analysis. `value` is the best validation accuracy in
/// percent; failed seeds are listed in a trailing comment line each.
pub fn results_csv(dataset: &str, method: CombinationMethod, outcomes: &[SeedOutcome]) -> String {
    let mut s = String::from("dataset,task,method,seed,value\n");
    for o in outcomes {
        if let Ok(run) = &o.result {
            let _ = writeln!(
                s,
                "{dataset},nli,{},{},{}",
                method.abbrev(),
                o.seed,
                run.state.best_val_acc * 100.0
            );
        }
    }
    for o in outcomes {
        if let Err(e) = &o.result {
            let _ = writeln!(s, "# seed {} failed: {}", o.seed, e.to_string().replace('\n', " "));
        }
    }
    s
}
