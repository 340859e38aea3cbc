use std::collections::BTreeSet;
use vizmend::corpus::{generate_corpus, load_corpus, write_corpus, CorpusMix};
use vizmend::deconstruct::GroupKind;

#[test]
fn generation_is_byte_identical() {
    let a = generate_corpus(30, 7, &CorpusMix::default()).unwrap();
    let b = generate_corpus(30, 7, &CorpusMix::default()).unwrap();
    assert_eq!(a, b);
    let c = generate_corpus(30, 8, &CorpusMix::default()).unwrap();
    assert_ne!(a, c);
}

#[test]
fn a_third_carry_several_defects() {
    let corpus = generate_corpus(90, 1, &CorpusMix::default()).unwrap();
    let multi = corpus.iter().filter(|e| e.chart.manifest.defects.len() >= 2).count();
    assert!(multi * 3 >= corpus.len(), "{multi} of {}", corpus.len());
}

#[test]
fn every_group_kind_appears() {
    let kinds: BTreeSet<String> = generate_corpus(81, 3, &CorpusMix::default())
        .unwrap()
        .iter()
        .flat_map(|e| e.chart.manifest.groups.iter().map(|g| format!("{:?}", g.kind)))
        .collect();
    assert_eq!(kinds.len(), GroupKind::ALL.len(), "{kinds:?}");
}

#[test]
fn written_corpus_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = generate_corpus(10, 5, &CorpusMix::held_out()).unwrap();
    write_corpus(dir.path(), &corpus, 5, &CorpusMix::held_out()).unwrap();
    let loaded = load_corpus(dir.path()).unwrap();
    assert_eq!(loaded.len(), corpus.len());
    for (l, e) in loaded.iter().zip(&corpus) {
        assert_eq!(l.name, e.name);
        assert_eq!(l.svg, e.chart.svg);
        assert_eq!(l.manifest.as_ref(), Some(&e.chart.manifest));
    }
}

#[test]
fn empty_directory_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_corpus(dir.path()).is_err());
}
