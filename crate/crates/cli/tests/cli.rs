use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn oovcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oovcat"))
        .args(args)
        .env("RUST_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = oovcat(args);
    assert!(
        out.status.success(),
        "{args:?} failed with {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(oovcat(&["tokenize", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(oovcat(&[]).status.code(), Some(2));
    assert_eq!(oovcat(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn missing_input_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oovcat(&["rank-features", "--features", s(&tmp.path().join("absent.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_matrix_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.csv");
    fs::write(&bad, "word,con.length,label\nfoo,notanumber,expression\n").unwrap();
    assert_eq!(oovcat(&["rank-features", "--features", s(&bad)]).status.code(), Some(1));
}

#[test]
fn run_with_missing_dictionary_fails_validation() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    let out_dir = tmp.path().join("out");
    fs::write(
        &cfg,
        format!(
            "synth = {:?}\ndictionary = \"nowhere/dict.txt\"\nliwc = {:?}\ngazetteer = {:?}\noutput = {:?}\n",
            s(&data("synth.toml")),
            s(&data("liwc_demo.txt")),
            s(&data("gazetteer.txt")),
            s(&out_dir)
        ),
    )
    .unwrap();
    let out = oovcat(&["run", "--config", s(&cfg)]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dict"));
    assert!(!out_dir.join("corpus.jsonl").exists());
    assert!(!out_dir.join("oov_inventory.tsv").exists());
}

#[test]
fn tokenize_prints_kinds() {
    let out = ok(&["tokenize", "--text", "RT @bob loooove it :) #yolo http://t.co/x"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let kinds: Vec<&str> = text.lines().map(|l| l.split('\t').nth(1).unwrap()).collect();
    assert_eq!(
        kinds,
        ["retweet_marker", "mention", "word", "word", "punct_cluster", "hashtag", "url"]
    );
}

#[test]
fn synth_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let corpus = tmp.path().join(format!("c{run}.jsonl"));
        let labels = tmp.path().join(format!("l{run}.tsv"));
        ok(&[
            "synth",
            "--config",
            s(&data("synth.toml")),
            "--seed",
            "7",
            "--dictionary",
            s(&data("dict.txt")),
            "--output",
            s(&corpus),
            "--labels-output",
            s(&labels),
        ]);
        outputs.push((fs::read(&corpus).unwrap(), fs::read(&labels).unwrap()));
    }
    assert!(!outputs[0].0.is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn subcommands_chain_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let p = |name: &str| dir.join(name);
    let dict = data("dict.txt");

    ok(&[
        "synth",
        "--config",
        s(&data("synth.toml")),
        "--dictionary",
        s(&dict),
        "--output",
        s(&p("corpus.jsonl")),
        "--labels-output",
        s(&p("labels.tsv")),
    ]);
    ok(&[
        "detect-oov",
        "--corpus",
        s(&p("corpus.jsonl")),
        "--dictionary",
        s(&dict),
        "--output-dir",
        s(dir),
    ]);
    let stable = fs::read_to_string(p("stable_oov.txt")).unwrap();
    assert!(stable.lines().count() >= 300);

    ok(&[
        "rule-classify",
        "--words",
        s(&p("stable_oov.txt")),
        "--dictionary",
        s(&dict),
        "--labels",
        s(&p("labels.tsv")),
        "--output-dir",
        s(dir),
    ]);
    assert!(fs::read_to_string(p("rule_report.txt")).unwrap().contains("emoticon"));

    let (corpus, labels, lda) = (p("corpus.jsonl"), p("labels.tsv"), p("lda.txt"));
    let (liwc, gazetteer) = (data("liwc_demo.txt"), data("gazetteer.txt"));
    let (features, timeseries) = (p("features.csv"), p("timeseries.csv"));
    let corpus_args = ["--corpus", s(&corpus), "--dictionary", s(&dict), "--labels", s(&labels)];
    let lda_args = [
        "--k",
        "4",
        "--iterations",
        "60",
        "--burn-in",
        "20",
        "--lag",
        "5",
        "--sample-cap",
        "100",
    ];
    let mut args = vec!["lda-train"];
    args.extend(corpus_args);
    args.extend(lda_args);
    args.extend(["--output", s(&lda)]);
    ok(&args);
    assert!(fs::read_to_string(p("lda.txt")).unwrap().starts_with("oovcat-lda"));

    let mut args = vec!["featurize"];
    args.extend(corpus_args);
    args.extend(["--sample-cap", "100", "--lda", s(&lda)]);
    args.extend(["--liwc", s(&liwc), "--gazetteer", s(&gazetteer)]);
    args.extend(["--output", s(&features)]);
    ok(&args);
    let matrix = fs::read_to_string(p("features.csv")).unwrap();
    assert!(matrix.starts_with("word,"));
    assert_eq!(matrix.lines().count(), 201);

    ok(&[
        "rank-features",
        "--features",
        s(&p("features.csv")),
        "--output",
        s(&p("ranking.tsv")),
    ]);
    let ranking = fs::read_to_string(p("ranking.tsv")).unwrap();
    let header_cols = matrix.lines().next().unwrap().split(',').count();
    assert_eq!(ranking.lines().count(), header_cols - 2 + 1);
    assert!(ranking.starts_with("rank\tfeature\tchi2"));

    ok(&[
        "train",
        "--features",
        s(&p("features.csv")),
        "--classifier",
        "linear_svm",
        "--output",
        s(&p("model.txt")),
    ]);
    ok(&[
        "evaluate",
        "--features",
        s(&p("features.csv")),
        "--model",
        s(&p("model.txt")),
        "--output",
        s(&p("scored.txt")),
    ]);
    ok(&[
        "evaluate",
        "--features",
        s(&p("features.csv")),
        "--folds",
        "3",
        "--output",
        s(&p("cv.txt")),
    ]);
    for f in ["scored.txt", "cv.txt"] {
        assert!(fs::read_to_string(p(f)).unwrap().contains("accuracy"), "{f}");
    }
    ok(&[
        "ablate",
        "--features",
        s(&p("features.csv")),
        "--families",
        "content",
        "--folds",
        "3",
        "--output",
        s(&p("ablation.tsv")),
    ]);
    assert_eq!(fs::read_to_string(p("ablation.tsv")).unwrap().lines().count(), 2);

    let mut args = vec!["timeseries"];
    args.extend(corpus_args);
    args.extend(["--output", s(&timeseries)]);
    ok(&args);
    let grid = fs::read_to_string(p("timeseries.csv")).unwrap();
    let rows: Vec<&str> = grid.lines().collect();
    assert_eq!(rows.len(), 7);
    assert!(rows.iter().all(|r| r.split(',').count() == 7));
}
