mod common;

use multibridge::pipeline::run_pipeline;

#[test]
fn run_matches_golden_tree() {
    let work = tempfile::tempdir().unwrap();
    let config = common::pipeline_config(work.path());
    let report = run_pipeline(&config).expect("pipeline run");

    let mut actual = common::tree(work.path());
    assert!(actual.remove("run_report.json").is_some());
    let expected = common::tree(&common::fixtures().join("pipeline/golden"));
    let diffs = common::tree_diff(&expected, &actual);
    assert!(diffs.is_empty(), "{} differences:\n{}", diffs.len(), diffs.join("\n"));

    assert_eq!(report.outputs.len(), expected.len());
    assert_eq!(report.seed, 2021);
}

#[test]
fn report_summarises_run() {
    let work = tempfile::tempdir().unwrap();
    let report = run_pipeline(&common::pipeline_config(work.path())).unwrap();
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(work.path().join("run_report.json")).unwrap()).unwrap();
    assert_eq!(json["pivot"], "en");
    assert_eq!(report.stats.english_total, 742);
    assert_eq!(report.stats.grand_total, 1184);
    assert_eq!(report.stats.unique_pairs, 592);
    assert_eq!(report.train.non_pivot_pairs, 720);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut config = common::pipeline_config(a.path());
    run_pipeline(&config).unwrap();
    config.paths.work = b.path().to_path_buf();
    config.threads = 3;
    run_pipeline(&config).unwrap();
    let (ta, tb) = (common::tree(a.path()), common::tree(b.path()));
    assert_eq!(common::tree_diff(&ta, &tb), Vec::<String>::new());
}

#[test]
fn missing_corpus_path_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let work = dir.path().join("work");
    let mut config = common::pipeline_config(&work);
    config.paths.raw = dir.path().join("does-not-exist");
    let err = run_pipeline(&config).unwrap_err();
    assert!(err.to_string().contains("does-not-exist"), "{err}");
    assert!(!work.exists());
}

#[test]
fn artifacts_reload() {
    use multibridge::bpe::BpeModel;
    use multibridge::corpus::{LanguageRegistry, TrainingManifest};
    use multibridge::pipeline::load_mined;

    let work = tempfile::tempdir().unwrap();
    let report = run_pipeline(&common::pipeline_config(work.path())).unwrap();
    let mined = load_mined(&work.path().join("mined"), LanguageRegistry::builtin()).unwrap();
    for m in &report.mined {
        let pair = m.pair.parse().unwrap();
        let got = mined.get(&pair).unwrap();
        assert_eq!(got.corpus.len() as u64, m.pairs);
        assert_eq!(got.raw_pairs, m.raw_pairs);
        assert_eq!(got.capped_keys.len(), m.capped_keys);
    }
    for name in ["manifest.json", "valid_manifest.json"] {
        let sampled = work.path().join("sampled");
        TrainingManifest::load(sampled.join(name)).unwrap().verify_counts(&sampled).unwrap();
        let tagged = work.path().join("tagged");
        TrainingManifest::load(tagged.join(name)).unwrap().verify_counts(&tagged).unwrap();
    }
    let model = BpeModel::load(&work.path().join("bpe/codes.txt")).unwrap();
    assert_eq!(model.merges().len(), report.bpe.merges);
}
