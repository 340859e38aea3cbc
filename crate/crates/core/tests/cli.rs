mod common;

use common::{max_bbox_shift, spec_of, thresholds};
use std::path::Path;
use std::process::{Command, Output};
use vizmend::corpus::{generate, ChartKind, ChartRecipe, Defect};
use vizmend::interpret::{detect_state, Side};
use vizmend::svg::parse_svg;

fn vizmend(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vizmend")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_chart(dir: &Path, name: &str, recipe: &ChartRecipe) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, generate(recipe).unwrap().svg).unwrap();
    path
}

#[test]
fn corpus_train_eval_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let out = dir.path().join("out");
    assert!(vizmend(&["gen-corpus", "--output", s(&corpus), "--count", "8", "--seed", "3"]).status.success());
    assert!(corpus.join("index.json").exists());

    let r = vizmend(&["train", "--corpus", s(&corpus), "--out-dir", s(&out), "--steps", "30"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for i in 0..5 {
        assert!(out.join(format!("policy-run{i}.json")).exists());
    }
    let metrics = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("run,step,"));

    let policy = out.join("policy-run0.json");
    let r = vizmend(&["eval", "--corpus", s(&corpus), "--policy", s(&policy), "--max-steps", "20"]);
    assert!(r.status.success());
    let report: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert_eq!(report["outcomes"].as_array().unwrap().len(), 8);

    let heat = dir.path().join("heat.csv");
    assert!(vizmend(&["heatmap", "--policy", s(&policy), "--output", s(&heat)]).status.success());
    assert_eq!(std::fs::read_to_string(&heat).unwrap().lines().count(), 1 + 28 * 23);
}

#[test]
fn fixing_a_top_margin() {
    let dir = tempfile::tempdir().unwrap();
    let recipe = ChartRecipe::clean(ChartKind::Bar, 6, 2).with_defect(Defect::WhiteSpace { side: Side::Top, excess: 20.0 });
    let input = write_chart(dir.path(), "in.svg", &recipe);
    let original = std::fs::read(&input).unwrap();
    let output = dir.path().join("out.svg");
    let trace = dir.path().join("trace.json");
    let r = vizmend(&["fix", "--input", s(&input), "--output", s(&output), "--trace", s(&trace)]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert_eq!(std::fs::read(&input).unwrap(), original);

    let fixed = spec_of(&std::fs::read_to_string(&output).unwrap());
    assert_eq!(detect_state(&fixed, &thresholds()).unwrap().0.total, 0.0);

    let r = vizmend(&["explain", "--trace", s(&trace)]);
    assert!(r.status.success());
    let text = String::from_utf8(r.stdout).unwrap();
    assert!(!text.is_empty());
    for (k, line) in text.lines().enumerate() {
        assert!(line.starts_with(&format!("step {}: state=", k + 1)) || line.starts_with(&format!("step {k}: state=")), "{line}");
        assert!(line.contains(" action=") && line.contains(" reward="));
    }
}

#[test]
fn clean_chart_comes_back_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_chart(dir.path(), "clean.svg", &ChartRecipe::clean(ChartKind::Line, 8, 1));
    let output = dir.path().join("out.svg");
    assert_eq!(vizmend(&["fix", "--input", s(&input), "--output", s(&output)]).status.code(), Some(0));
    let a = parse_svg(&std::fs::read(&input).unwrap()).unwrap();
    let b = parse_svg(&std::fs::read(&output).unwrap()).unwrap();
    assert!(max_bbox_shift(&a, &b) <= 1e-6);
}

#[test]
fn unsolved_and_failing_runs_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let recipe = ChartRecipe::clean(ChartKind::Bar, 6, 2).with_defect(Defect::OutOfViewport { side: Side::Right, amount: 40.0 });
    let input = write_chart(dir.path(), "in.svg", &recipe);
    let output = dir.path().join("out.svg");
    let r = vizmend(&["fix", "--input", s(&input), "--output", s(&output), "--max-steps", "1", "--frozen", "--seed", "1"]);
    assert!(matches!(r.status.code(), Some(0 | 2)));
    let r = vizmend(&["fix", "--input", s(&input), "--output", s(&output), "--max-steps", "1", "--tau", "40"]);
    assert_eq!(r.status.code(), Some(2));

    let missing = dir.path().join("missing.svg");
    let r = vizmend(&["fix", "--input", s(&missing), "--output", s(&output)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).starts_with("error:"));
}

#[test]
fn multi_view_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let one = generate(&ChartRecipe::clean(ChartKind::Bar, 4, 1)).unwrap().svg;
    let body = |p: &str| one[one.find('>').unwrap() + 1..one.rfind("</svg>").unwrap()].replace("id=\"", &format!("id=\"{p}"));
    let svg = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="750" height="400"><g>{}</g><g transform="translate(375,0)">{}</g></svg>"#,
        body("a-"),
        body("b-")
    );
    let input = dir.path().join("two.svg");
    std::fs::write(&input, svg).unwrap();
    let output = dir.path().join("out.svg");
    let r = vizmend(&["fix", "--input", s(&input), "--output", s(&output)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("single-view"));
    assert!(!output.exists());
}

#[test]
fn inspect_prints_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_chart(dir.path(), "c.svg", &ChartRecipe::clean(ChartKind::Scatter, 10, 2));
    let r = vizmend(&["inspect", "--input", s(&input)]);
    assert!(r.status.success());
    let v: serde_json::Value = serde_json::from_slice(&r.stdout).unwrap();
    assert!(v["groups"].as_array().is_some_and(|g| !g.is_empty()));
}
