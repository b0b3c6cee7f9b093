mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{tree, write_nli_dir};

const TINY: [&str; 16] = [
    "--set",
    "max_epochs=2",
    "--set",
    "batch_size=8",
    "--set",
    "word_dim=6",
    "--set",
    "char_dim=4",
    "--set",
    "char_hidden=6",
    "--set",
    "sentence_dim=6",
    "--set",
    "classifier_hidden=5",
    "--set",
    "min_freq=1",
];

fn wordgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wordgate"))
        .args(args)
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Trains a tiny model with `method` and returns the seed-1 checkpoint.
fn train_tiny(root: &Path, method: &str) -> std::path::PathBuf {
    let data = root.join("data");
    if !data.exists() {
        write_nli_dir(&data, 40, 12);
    }
    let out = root.join(format!("run-{method}"));
    let mut args = vec![
        "train",
        "--method",
        method,
        "--data",
        s(&data),
        "--seed",
        "1",
        "--out",
        s(&out),
    ];
    args.extend(TINY);
    let o = wordgate(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    out.join("seed-1/best.ckpt")
}

#[test]
fn help_and_version_exit_zero() {
    let o = wordgate(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for sub in [
        "train",
        "eval-words",
        "eval-sentences",
        "analyze-gates",
        "significance",
        "grad-check",
    ] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
    assert_eq!(wordgate(&["--version"]).status.code(), Some(0));
    assert_eq!(wordgate(&["train", "--help"]).status.code(), Some(0));
}

#[test]
fn unknown_subcommand_or_flag_exits_one() {
    assert_eq!(wordgate(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(wordgate(&["grad-check", "--bogus"]).status.code(), Some(1));
    assert_eq!(wordgate(&[]).status.code(), Some(1));
}

#[test]
fn bad_method_lists_valid_methods() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = wordgate(&["train", "--method", "xx", "--data", s(tmp.path()), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    for m in ["w", "c", "cat", "sg", "vg"] {
        assert!(err.contains(&format!("`{m}`")) || err.contains(m), "{err}");
    }
    assert!(err.contains("xx"), "{err}");
    assert!(!out.exists());
}

#[test]
fn validation_failures_write_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    // no data directory
    let o = wordgate(&[
        "train",
        "--method",
        "vg",
        "--data",
        s(&tmp.path().join("none")),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
    // incompatible dims
    write_nli_dir(&tmp.path().join("d"), 10, 5);
    let o = wordgate(&[
        "train",
        "--method",
        "vg",
        "--data",
        s(&tmp.path().join("d")),
        "--out",
        s(&out),
        "--set",
        "word_dim=8",
        "--set",
        "char_hidden=6",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    let o = wordgate(&[
        "train",
        "--method",
        "vg",
        "--data",
        s(&tmp.path().join("d")),
        "--out",
        s(&out),
        "--set",
        "lr=3",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown config key"));
    assert!(!out.exists());
}

#[test]
fn train_writes_only_inside_out() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_nli_dir(&data, 30, 9);
    let before = tree(tmp.path());
    let out = tmp.path().join("out");
    let mut args = vec![
        "train",
        "--method",
        "sg",
        "--data",
        s(&data),
        "--seeds",
        "1,2",
        "--out",
        s(&out),
        "--parallel-seeds",
        "2",
    ];
    args.extend(TINY);
    let o = wordgate(&args);
    assert!(o.status.success(), "{}", stderr(&o));
    let after: Vec<_> = tree(tmp.path()).into_iter().filter(|p| !p.starts_with("out")).collect();
    assert_eq!(before, after);
    let written: Vec<String> = tree(&out).iter().map(|p| p.display().to_string()).collect();
    assert_eq!(
        written,
        [
            "config.txt",
            "results.csv",
            "seed-1/best.ckpt",
            "seed-1/metrics.csv",
            "seed-2/best.ckpt",
            "seed-2/metrics.csv"
        ]
    );
    let results = fs::read_to_string(out.join("results.csv")).unwrap();
    assert!(
        results.starts_with("dataset,task,method,seed,value\ndata,nli,sg,1,"),
        "{results}"
    );
    let log = fs::read_to_string(out.join("seed-1/metrics.csv")).unwrap();
    assert!(log.starts_with("epoch,train_loss,train_acc,val_acc,lr\n1,"));
    assert_eq!(log.lines().count(), 3);
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_nli_dir(&data, 20, 6);
    let cfg = tmp.path().join("run.cfg");
    let mut text = String::from("# tiny\nmethod = cat\nseeds = 3\n");
    for pair in TINY.chunks(2) {
        text.push_str(&pair[1].replace('=', " = "));
        text.push('\n');
    }
    fs::write(&cfg, text).unwrap();
    let out = tmp.path().join("out");
    let o = wordgate(&[
        "train",
        "--config",
        s(&cfg),
        "--method",
        "w",
        "--data",
        s(&data),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let resolved = fs::read_to_string(out.join("config.txt")).unwrap();
    assert!(
        resolved.contains("method = w\n") && resolved.contains("seeds = 3\n"),
        "{resolved}"
    );
    assert!(out.join("seed-3/best.ckpt").exists());

    fs::write(&cfg, "method = cat\nmethod = vg\n").unwrap();
    let o = wordgate(&["train", "--config", s(&cfg), "--data", s(&data), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("run.cfg:2"), "{}", stderr(&o));
}

#[test]
fn eval_words_report() {
    let tmp = tempfile::tempdir().unwrap();
    let ckpt = train_tiny(tmp.path(), "vg");
    let sets = tmp.path().join("sets");
    fs::create_dir(&sets).unwrap();
    fs::write(
        sets.join("toy.txt"),
        "word1\tword2\tscore\nyes\ttrue\t9\nno\tnever\t8.5\nyes\tno\t1\ncat\tdog\t5\n",
    )
    .unwrap();
    fs::write(sets.join("other.tsv"), "Tom\tann\t3\nsun\tsea\t4\nzebra\tred\t2\n").unwrap();
    let report = tmp.path().join("report.csv");
    let o = wordgate(&[
        "eval-words",
        "--checkpoint",
        s(&ckpt),
        "--datasets",
        s(&sets),
        "--out",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "dataset,n_pairs,pearson_x100,spearman_x100,coverage");
    assert!(
        lines[1].starts_with("other,3,") && lines[2].starts_with("toy,4,"),
        "{text}"
    );
    assert!(
        lines[1].ends_with(",0.8333333333333334"),
        "zebra is the one unknown word of six: {text}"
    );

    let o = wordgate(&[
        "eval-words",
        "--checkpoint",
        s(&ckpt),
        "--datasets",
        s(&sets),
        "--out",
        s(&tmp.path().join("no/r.csv")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = wordgate(&[
        "eval-words",
        "--checkpoint",
        s(&sets.join("toy.txt")),
        "--datasets",
        s(&sets),
        "--out",
        s(&report),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn eval_sentences_kinds() {
    let tmp = tempfile::tempdir().unwrap();
    let ckpt = train_tiny(tmp.path(), "cat");
    let cls = tmp.path().join("cls.tsv");
    let mut text = String::new();
    for i in 0..20 {
        let (label, sent) = if i % 2 == 0 {
            ("pos", "yes tom is big")
        } else {
            ("neg", "no ann is red")
        };
        text.push_str(&format!("{label}\t{sent}\n"));
    }
    fs::write(&cls, text).unwrap();
    let report = tmp.path().join("cls.csv");
    let o = wordgate(&[
        "eval-sentences",
        "--checkpoint",
        s(&ckpt),
        "--task",
        s(&cls),
        "--kind",
        "cls",
        "--out",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&report).unwrap();
    assert!(
        text.starts_with("task,kind,n_train,n_eval,metric,value,iterations,converged\ncls,cls,16,4,accuracy,"),
        "{text}"
    );

    let sts = tmp.path().join("sts.tsv");
    fs::write(
        &sts,
        "4.5\tyes tom\tyes ann\n1\tno sun\tbig dog\n3\tred cat\tred sea\n2.5\ttom\tann\n",
    )
    .unwrap();
    let report = tmp.path().join("sts.csv");
    let o = wordgate(&[
        "eval-sentences",
        "--checkpoint",
        s(&ckpt),
        "--task",
        s(&sts),
        "--kind",
        "sts",
        "--out",
        s(&report),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&report)
        .unwrap()
        .contains("sts,sts,0,4,pearson_x100,"));

    let o = wordgate(&[
        "eval-sentences",
        "--checkpoint",
        s(&ckpt),
        "--task",
        s(&sts),
        "--kind",
        "xyz",
        "--out",
        s(&report),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_gates_needs_gated_model() {
    let tmp = tempfile::tempdir().unwrap();
    let ckpt = train_tiny(tmp.path(), "vg");
    let words = tmp.path().join("words.txt");
    fs::write(&words, "yes\nno\ntom\nunseenword\n").unwrap();
    let out = tmp.path().join("gates.csv");
    let train = tmp.path().join("data/train.jsonl");
    let o = wordgate(&[
        "analyze-gates",
        "--checkpoint",
        s(&ckpt),
        "--wordlist",
        s(&words),
        "--freq-from",
        s(&train),
        "--out",
        s(&out),
        "--per-dimension",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 5, "{text}");

    let w = train_tiny(tmp.path(), "w");
    let o = wordgate(&[
        "analyze-gates",
        "--checkpoint",
        s(&w),
        "--wordlist",
        s(&words),
        "--freq-from",
        s(&train),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn significance_table() {
    let tmp = tempfile::tempdir().unwrap();
    let results = tmp.path().join("results.csv");
    let mut text = String::from("dataset,task,method,seed,value\n");
    for (m, base) in [("vg", 80.0), ("w", 70.0), ("sg", 79.9)] {
        for seed in 1..=4 {
            text.push_str(&format!("snli,nli,{m},{seed},{}\n", base + (seed as f64) * 0.3));
        }
    }
    fs::write(&results, text).unwrap();
    let out = tmp.path().join("sig.csv");
    let o = wordgate(&[
        "significance",
        "--results",
        s(&results),
        "--alpha",
        "0.05",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(
        text.lines()
            .any(|l| l.starts_with("snli,nli,w,4,") && l.contains(",true,")),
        "{text}"
    );
    assert_eq!(
        wordgate(&[
            "significance",
            "--results",
            s(&results),
            "--alpha",
            "2",
            "--out",
            s(&out)
        ])
        .status
        .code(),
        Some(1)
    );
}

#[test]
fn grad_check_subcommand() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("gc.csv");
    let o = wordgate(&["grad-check", "--points", "2", "--seed", "3", "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 9);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
    assert_eq!(wordgate(&["grad-check", "--points", "0"]).status.code(), Some(1));
}

#[test]
fn in_process_dispatch_matches_binary_codes() {
    assert_eq!(wordgate::cli::dispatch(["wordgate", "--help"]), 0);
    assert_eq!(wordgate::cli::dispatch(["wordgate", "train", "--method", "xx"]), 1);
}
