mod common;

use proptest::prelude::*;

use multibridge::bpe::{learn_bpe, revert_line, BpeConfig, BpeModel};

fn model() -> BpeModel {
    let mut rng = common::rng(3);
    let lines = common::random_toy_corpus(&mut rng, 2_000);
    learn_bpe(&lines, &BpeConfig { num_merges: 150, min_frequency: 2, merge_floor: 2 }).unwrap()
}

#[test]
fn learner_matches_recount_reference() {
    for seed in 0..20 {
        let mut rng = common::rng(seed);
        let lines = common::random_toy_corpus(&mut rng, 3_000);
        let got = learn_bpe(&lines, &BpeConfig { num_merges: 120, min_frequency: 1, merge_floor: 2 }).unwrap();
        assert_eq!(got.merges(), common::brute_force_bpe(&lines, 120, 2).as_slice(), "seed {seed}");
    }
}

#[test]
fn save_load_round_trip() {
    let m = model();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("codes.txt");
    m.save(&path).unwrap();
    assert!(BpeModel::vocab_path(&path).exists());
    let loaded = BpeModel::load(&path).unwrap();
    assert_eq!(loaded.merges(), m.merges());
    assert_eq!(loaded.vocab(), m.vocab());
    assert_eq!(loaded.num_merges(), m.num_merges());
    assert_eq!(loaded.min_frequency(), m.min_frequency());
    let line = "abc लमन dead";
    assert_eq!(loaded.apply_line(line), m.apply_line(line));
}

#[test]
fn tags_are_never_split() {
    let m = model();
    let out = m.apply_line("__src_bn__ __tgt_hi__ abcde");
    assert!(out.starts_with("__src_bn__ __tgt_hi__ "), "{out}");
}

proptest! {
    #[test]
    fn revert_inverts_apply(words in prop::collection::vec("[abcde@लमनक]{1,9}", 1..40)) {
        let m = model();
        let line = words.join(" ");
        prop_assert_eq!(revert_line(&m.apply_line(&line)).unwrap(), line);
    }

    #[test]
    fn apply_only_splits(words in prop::collection::vec("[abcdeलमन]{1,9}", 1..20)) {
        let m = model();
        let line = words.join(" ");
        let joined: String = m.apply_line(&line).replace("@@ ", "");
        prop_assert_eq!(joined, line);
    }
}
