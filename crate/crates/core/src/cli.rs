//! Command-line entry point.
//!
//! Every subcommand first validates its arguments and inputs, then does its
//! work. Exit codes: 0 on success (including `--help` and `--version`), 1 when
//! arguments, configuration or inputs are rejected before any output is
//! written, 2 when the work itself fails.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::analysis::{corpus_frequencies, gate_profile, gate_profile_csv, load_results, rarity_gate_spearman};
use crate::analysis::{significance_csv, significance_table};
use crate::checkpoint::load_model;
use crate::config::{parse_seeds, RunConfig};
use crate::data::{load_nli, load_wordsim, WordSimOptions, WordSimPair};
use crate::error::{Error, Result};
use crate::eval_word::evaluate_wordsim;
use crate::gradcheck_suite::{run_suite, GRADCHECK_POINTS, GRADCHECK_THRESHOLD};
use crate::model::Model;
use crate::probe::{evaluate_task, load_probe_task, ProbeKind, ProbeTask, DEFAULT_PROBE_L2, PROBE_REPORT_HEADER};
use crate::trainer::{results_csv, run_seeds, TrainData};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_FAILURE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "wordgate",
    version,
    about = "Train and evaluate character/word combination models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train one model per seed on an NLI dataset.
    Train(TrainArgs),
    /// Word-similarity evaluation of a checkpoint.
    EvalWords(EvalWordsArgs),
    /// Linear-probe or direct-similarity evaluation of sentence vectors.
    EvalSentences(EvalSentencesArgs),
    /// Gate values of a gated checkpoint against corpus frequency.
    AnalyzeGates(AnalyzeGatesArgs),
    /// Welch t-tests of per-seed results against the best method.
    Significance(SignificanceArgs),
    /// Central-difference gradient checks of every component.
    GradCheck(GradCheckArgs),
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Combination method: w, c, cat, sg or vg.
    #[arg(long)]
    method: Option<String>,
    /// Directory holding train.jsonl and dev.jsonl.
    #[arg(long)]
    data: Option<PathBuf>,
    /// `key = value` configuration file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seeds as `a..b` (inclusive) or a comma list.
    #[arg(long, conflicts_with = "seed")]
    seeds: Option<String>,
    /// A single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seeds trained concurrently.
    #[arg(long)]
    parallel_seeds: Option<usize>,
    /// GloVe-format vectors for the word table.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    /// Any configuration key, as `key=value`; may be repeated.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args, Debug)]
struct EvalWordsArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Directory of `word1 TAB word2 TAB score` files, one dataset per file.
    #[arg(long)]
    datasets: PathBuf,
    /// Report CSV to write.
    #[arg(long)]
    out: PathBuf,
    /// Keep dataset words as written instead of lowercasing them.
    #[arg(long)]
    keep_case: bool,
}

#[derive(Args, Debug)]
struct EvalSentencesArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// Task file: `label TAB sentence [TAB sentence2]` per line.
    #[arg(long)]
    task: PathBuf,
    /// cls (logistic probe), rel (ridge probe) or sts (direct cosine).
    #[arg(long)]
    kind: String,
    /// Held-out file in the same format; without it every fifth example of
    /// the task is held out.
    #[arg(long)]
    dev: Option<PathBuf>,
    /// L2 penalty of the probe.
    #[arg(long, default_value_t = DEFAULT_PROBE_L2)]
    l2: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct AnalyzeGatesArgs {
    #[arg(long)]
    checkpoint: PathBuf,
    /// One word per line.
    #[arg(long)]
    wordlist: PathBuf,
    /// Corpus to count frequencies in (`.jsonl` NLI data or plain text).
    #[arg(long)]
    freq_from: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Add one column per gate dimension.
    #[arg(long)]
    per_dimension: bool,
}

#[derive(Args, Debug)]
struct SignificanceArgs {
    /// `dataset,task,method,seed,value` CSV.
    #[arg(long)]
    results: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct GradCheckArgs {
    /// Random points per component.
    #[arg(long, default_value_t = GRADCHECK_POINTS)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Optional CSV report.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Where a subcommand failed.
enum Failure {
    Invalid(Error),
    Runtime(Error),
}

trait Stage<T> {
    fn invalid(self) -> std::result::Result<T, Failure>;
    fn runtime(self) -> std::result::Result<T, Failure>;
}

impl<T> Stage<T> for Result<T> {
    fn invalid(self) -> std::result::Result<T, Failure> {
        self.map_err(Failure::Invalid)
    }
    fn runtime(self) -> std::result::Result<T, Failure> {
        self.map_err(Failure::Runtime)
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    let outcome = match cli.command {
        Command::Train(a) => train(a),
        Command::EvalWords(a) => eval_words(a),
        Command::EvalSentences(a) => eval_sentences(a),
        Command::AnalyzeGates(a) => analyze_gates(a),
        Command::Significance(a) => significance(a),
        Command::GradCheck(a) => grad_check(a),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

fn require_file(path: &Path, what: &str) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} `{}` is not a readable file",
            path.display()
        )))
    }
}

/// Output files go into an existing directory; nothing else is created.
fn check_out_file(path: &Path) -> Result<()> {
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    if !parent.is_dir() {
        return Err(Error::invalid(format!(
            "output directory `{}` does not exist",
            parent.display()
        )));
    }
    if path.is_dir() {
        return Err(Error::invalid(format!("output `{}` is a directory", path.display())));
    }
    Ok(())
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn train(a: TrainArgs) -> Outcome {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::from_file(p).invalid()?,
        None => RunConfig::default(),
    };
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::invalid(format!("--set expects KEY=VALUE, got `{kv}`")))
            .invalid()?;
        cfg.set(k.trim(), v).invalid()?;
    }
    if let Some(m) = &a.method {
        cfg.set("method", m).invalid()?;
    }
    if let Some(s) = &a.seeds {
        cfg.train.seeds = parse_seeds(s).invalid()?;
    }
    if let Some(s) = a.seed {
        cfg.train.seeds = vec![s];
    }
    if let Some(n) = a.parallel_seeds {
        cfg.train.parallel_seeds = n;
    }
    cfg.data = a.data.or(cfg.data);
    cfg.out = a.out.or(cfg.out);
    cfg.embeddings = a.embeddings.or(cfg.embeddings);
    cfg.train.validate().invalid()?;

    let data_dir = cfg
        .data
        .clone()
        .ok_or_else(|| Error::invalid("--data is required"))
        .invalid()?;
    let out = cfg
        .out
        .clone()
        .ok_or_else(|| Error::invalid("--out is required"))
        .invalid()?;
    let (train_path, dev_path) = (data_dir.join("train.jsonl"), data_dir.join("dev.jsonl"));
    require_file(&train_path, "training data").invalid()?;
    require_file(&dev_path, "validation data").invalid()?;
    if let Some(e) = &cfg.embeddings {
        require_file(e, "embeddings").invalid()?;
    }
    let lower = cfg.train.lowercase;
    let train_set = load_nli(&train_path, lower).invalid()?;
    let dev_set = load_nli(&dev_path, lower).invalid()?;
    if train_set.is_empty() || dev_set.is_empty() {
        return Err(Failure::Invalid(Error::invalid(
            "training and validation data must be non-empty",
        )));
    }
    let mut data = TrainData::new(train_set, dev_set, cfg.train.min_freq);
    if let Some(e) = &cfg.embeddings {
        data = data.with_embeddings(e, cfg.train.dims.word_dim, lower).invalid()?;
    }
    if out.exists() && !out.is_dir() {
        return Err(Failure::Invalid(Error::invalid(format!(
            "--out `{}` is not a directory",
            out.display()
        ))));
    }

    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e)).runtime()?;
    write_file(&out.join("config.txt"), &cfg.to_text()).runtime()?;
    let outcomes = run_seeds(&cfg.train, &data, Some(&out)).runtime()?;
    let dataset = data_dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "data".to_string());
    write_file(
        &out.join("results.csv"),
        &results_csv(&dataset, cfg.train.method, &outcomes),
    )
    .runtime()?;
    let mut failed = 0;
    for o in &outcomes {
        match &o.result {
            Ok(run) => println!(
                "seed {}: best val acc {:.4} at epoch {} ({} epochs)",
                o.seed,
                run.state.best_val_acc,
                run.state.best_epoch,
                run.state.log.len()
            ),
            Err(e) => {
                failed += 1;
                println!("seed {}: FAILED: {e}", o.seed);
            }
        }
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

fn load_checkpoint(path: &Path) -> std::result::Result<Model, Failure> {
    require_file(path, "checkpoint").invalid()?;
    load_model(path).invalid()
}

fn eval_words(a: EvalWordsArgs) -> Outcome {
    let model = load_checkpoint(&a.checkpoint)?;
    check_out_file(&a.out).invalid()?;
    if !a.datasets.is_dir() {
        return Err(Failure::Invalid(Error::invalid(format!(
            "--datasets `{}` is not a directory",
            a.datasets.display()
        ))));
    }
    let mut files: Vec<PathBuf> = fs::read_dir(&a.datasets)
        .map_err(|e| Error::io(&a.datasets, e))
        .invalid()?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && !p.file_name().is_some_and(|n| n.to_string_lossy().starts_with('.')))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Failure::Invalid(Error::invalid("no dataset files found")));
    }
    let opts = WordSimOptions {
        lowercase: !a.keep_case,
        ..WordSimOptions::default()
    };
    let datasets: Vec<(String, Vec<WordSimPair>)> = files
        .iter()
        .map(|p| {
            let name = p
                .file_stem()
                .map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            load_wordsim(p, opts).map(|pairs| (name, pairs))
        })
        .collect::<Result<_>>()
        .invalid()?;

    let mut csv = String::from("dataset,n_pairs,pearson_x100,spearman_x100,coverage\n");
    for (name, pairs) in &datasets {
        let r = evaluate_wordsim(&model, name, pairs).runtime()?;
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.dataset, r.n_pairs, r.pearson_x100, r.spearman_x100, r.coverage
        );
        println!(
            "{:<20} pairs {:>5}  pearson {:>7.2}  spearman {:>7.2}  coverage {:.3}",
            r.dataset, r.n_pairs, r.pearson_x100, r.spearman_x100, r.coverage
        );
    }
    write_file(&a.out, &csv).runtime()?;
    Ok(EXIT_OK)
}

fn eval_sentences(a: EvalSentencesArgs) -> Outcome {
    let kind: ProbeKind = a.kind.parse().invalid()?;
    if !(a.l2 >= 0.0 && a.l2.is_finite()) {
        return Err(Failure::Invalid(Error::invalid(format!(
            "--l2 must be finite and non-negative, got {}",
            a.l2
        ))));
    }
    let model = load_checkpoint(&a.checkpoint)?;
    check_out_file(&a.out).invalid()?;
    require_file(&a.task, "task").invalid()?;
    let task = load_probe_task(&a.task, kind).invalid()?;
    let dev: Option<ProbeTask> = match &a.dev {
        Some(p) => {
            require_file(p, "dev task").invalid()?;
            Some(load_probe_task(p, kind).invalid()?)
        }
        None => None,
    };
    let report = evaluate_task(&model, &task, dev.as_ref(), a.l2).runtime()?;
    write_file(&a.out, &format!("{PROBE_REPORT_HEADER}\n{}\n", report.csv_row())).runtime()?;
    println!(
        "{} ({}): {} {:.2} on {} examples",
        report.task,
        kind.as_str(),
        report.metric,
        report.value,
        report.n_eval
    );
    Ok(EXIT_OK)
}

fn analyze_gates(a: AnalyzeGatesArgs) -> Outcome {
    let model = load_checkpoint(&a.checkpoint)?;
    if !model.method.is_gate() {
        return Err(Failure::Invalid(Error::invalid(format!(
            "gate analysis needs a gated model (sg or vg), checkpoint uses `{}`",
            model.method
        ))));
    }
    check_out_file(&a.out).invalid()?;
    require_file(&a.wordlist, "word list").invalid()?;
    require_file(&a.freq_from, "frequency corpus").invalid()?;
    let text = fs::read_to_string(&a.wordlist)
        .map_err(|e| Error::io(&a.wordlist, e))
        .invalid()?;
    let words: Vec<&str> = text.lines().map(str::trim).filter(|w| !w.is_empty()).collect();
    if words.is_empty() {
        return Err(Failure::Invalid(Error::invalid("word list is empty")));
    }
    let freqs = corpus_frequencies(&a.freq_from, model.lowercase).invalid()?;

    let profile = gate_profile(&model, &words, &freqs).runtime()?;
    write_file(&a.out, &gate_profile_csv(&profile, a.per_dimension)).runtime()?;
    match rarity_gate_spearman(&profile) {
        Ok(rho) => println!("{} words, spearman(rarity, mean gate) = {rho:.4}", profile.len()),
        Err(e) => println!("{} words, spearman(rarity, mean gate) undefined: {e}", profile.len()),
    }
    Ok(EXIT_OK)
}

fn significance(a: SignificanceArgs) -> Outcome {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(Failure::Invalid(Error::invalid(format!(
            "--alpha must lie in (0, 1), got {}",
            a.alpha
        ))));
    }
    check_out_file(&a.out).invalid()?;
    require_file(&a.results, "results").invalid()?;
    let groups = load_results(&a.results).invalid()?;
    let rows = significance_table(&groups, a.alpha).invalid()?;
    write_file(&a.out, &significance_csv(&rows)).runtime()?;
    let flagged = rows.iter().filter(|r| r.significant).count();
    println!(
        "{} conditions, {flagged} significantly below their best method",
        rows.len()
    );
    Ok(EXIT_OK)
}

fn grad_check(a: GradCheckArgs) -> Outcome {
    if a.points == 0 {
        return Err(Failure::Invalid(Error::invalid("--points must be positive")));
    }
    if let Some(out) = &a.out {
        check_out_file(out).invalid()?;
    }
    let results = run_suite(a.points, a.seed).runtime()?;
    let mut csv = String::from("component,points,max_rel_error,passed\n");
    for c in &results {
        println!(
            "{:<26} max relative error {:.3e}  {}",
            c.component,
            c.max_rel_error,
            if c.passed() { "ok" } else { "FAIL" }
        );
        let _ = writeln!(csv, "{},{},{:e},{}", c.component, c.points, c.max_rel_error, c.passed());
    }
    if let Some(out) = &a.out {
        write_file(out, &csv).runtime()?;
    }
    let all_passed = results.iter().all(|c| c.passed());
    if !all_passed {
        eprintln!("gradient check failed: some component reached {GRADCHECK_THRESHOLD:e}");
    }
    Ok(if all_passed { EXIT_OK } else { EXIT_FAILURE })
}
