mod common;

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn mbridge(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mbridge"))
        .args(args)
        .arg("--log=warn")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(mbridge(&["--help"], "").status.code(), Some(0));
    assert_eq!(mbridge(&["--version"], "").status.code(), Some(0));
    assert_eq!(mbridge(&["frobnicate"], "").status.code(), Some(1));
    assert_eq!(mbridge(&["tag", "--src", "bn"], "").status.code(), Some(1));
    assert_eq!(mbridge(&["tag", "--src", "xx", "--tgt", "hi"], "").status.code(), Some(1));
    assert_eq!(mbridge(&["apply-bpe", "--model", "/nonexistent/codes"], "").status.code(), Some(2));
    assert_eq!(mbridge(&["run", "--config", "/nonexistent.toml"], "").status.code(), Some(2));
    // A reserved token in the payload is a data error.
    let o = mbridge(&["tag", "--src", "bn", "--tgt", "hi"], "a __tgt_ta__ b\n");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn tag_and_untag_filter_stdin() {
    let o = mbridge(&["tag", "--src", "bn", "--tgt", "hi"], "a b\nc\n");
    assert!(o.status.success());
    assert_eq!(stdout(&o), "__src_bn__ __tgt_hi__ a b\n__src_bn__ __tgt_hi__ c\n");
    let back = mbridge(&["tag", "--untag"], &stdout(&o));
    assert_eq!(stdout(&back), "a b\nc\n");
}

#[test]
fn preprocess_round_trip() {
    let text = "আমি ভাত খাই।\n";
    let o = mbridge(&["preprocess", "--lang", "bn", "--to-devanagari", "--tokenize"], text);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "आमि भात खाइ ।\n");
    let back = mbridge(&["preprocess", "--lang", "bn", "--from-devanagari", "--detokenize"], &stdout(&o));
    assert_eq!(stdout(&back), text);
}

#[test]
fn bpe_learn_apply_revert() {
    let dir = tempfile::tempdir().unwrap();
    let codes = dir.path().join("codes.txt");
    let corpus = dir.path().join("corpus.txt");
    std::fs::write(&corpus, "low lower lowest\nnewer newest wider\nlow low\n").unwrap();
    let o = mbridge(&["learn-bpe", "--merges", "20", "--min-freq", "1", "--out", codes.to_str().unwrap(), corpus.to_str().unwrap()], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(std::fs::read_to_string(&codes).unwrap().starts_with("#version: 0.2 num_merges=20 min_frequency=1\n"));
    let seg = mbridge(&["apply-bpe", "--model", codes.to_str().unwrap()], "lowest newest\n");
    assert!(seg.status.success());
    assert!(stdout(&seg).contains("@@"));
    let back = mbridge(&["apply-bpe", "--revert"], &stdout(&seg));
    assert_eq!(stdout(&back), "lowest newest\n");
}

#[test]
fn evaluate_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    std::fs::write(p("hyp"), "a b c d e\n").unwrap();
    std::fs::write(p("ref"), "a b c x e f\n").unwrap();
    let o = mbridge(&["evaluate", "--metric", "bleu,chrf2", "--hyp", &p("hyp"), "--ref", &p("ref"), "--direction", "bn-hi", "--json", &p("bn-hi.json")], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let tsv = stdout(&o);
    assert!(tsv.starts_with("metric\tscore\tsignature\nbleu\t34.9833\t"), "{tsv}");
    std::fs::write(p("en-hi.json"), std::fs::read_to_string(p("bn-hi.json")).unwrap().replace("\"bn\"", "\"en\"")).unwrap();
    let c = mbridge(&["compare", &p("bn-hi.json"), &p("en-hi.json")], "");
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
    let table = stdout(&c);
    assert!(table.contains("\nbn\t-\t27.4\t35.0\t-\t1\t1\n"), "{table}");
    assert!(table.contains("\nen\t-\t27.4\t35.0\t-\t1\t1\n"), "{table}");

    let missing = mbridge(&["evaluate", "--metric", "cosine"], "");
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn stage_subcommands_reproduce_run() {
    let fx = common::fixtures().join("pipeline");
    let golden = fx.join("golden");
    let dir = tempfile::tempdir().unwrap();
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let raw = fx.join("raw").to_str().unwrap().to_string();

    let o = mbridge(&["extract", "--inputs", &raw, "--out", &p("mined"), "--xprod-cap", "8"], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mbridge(&["stats", "--inputs", &raw, "--mined", &p("mined"), "--out", &p("stats/table.tsv")], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = mbridge(&["sample", "--strategy", "sample-fraction", "--per-pair", "120", "--seed", "2021", "--inputs", &raw, "--mined", &p("mined"), "--out", &p("sampled")], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    for sub in ["mined", "stats"] {
        let diff = common::tree_diff(&common::tree(&golden.join(sub)), &common::tree(&dir.path().join(sub)));
        assert!(diff.is_empty(), "{sub}: {diff:?}");
    }
    let mut expected = common::tree(&golden.join("sampled"));
    expected.retain(|k, _| k.starts_with("train/") || k == "manifest.json");
    let diff = common::tree_diff(&expected, &common::tree(&dir.path().join("sampled")));
    assert!(diff.is_empty(), "sampled: {diff:?}");

    let o = mbridge(&["stats", "--matrix", common::fixtures().join("pair_counts.tsv").to_str().unwrap(), "--out", &p("t1.tsv")], "");
    assert!(o.status.success());
    assert!(std::fs::read_to_string(p("t1.tsv")).unwrap().ends_with("TOTAL\t\t28812\n"));
}

#[test]
fn run_subcommand_with_work_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = common::fixtures().join("pipeline/config.toml");
    let o = mbridge(&["run", "--config", config.to_str().unwrap(), "--work", dir.path().to_str().unwrap()], "");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("run_report.json").exists());
    assert!(o.stdout.is_empty(), "data goes to files, not stdout");
}
