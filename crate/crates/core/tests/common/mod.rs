#![allow(dead_code)]

use vizmend::corpus::{generate, ChartKind, ChartRecipe, Defect};
use vizmend::deconstruct::{build_spec, DeclarativeSpec, ElementClass};
use vizmend::interpret::{IssueState, Thresholds};
use vizmend::policy::{run_episode, EpisodeConfig, EpisodeTrace, Policy};
use vizmend::svg::{parse_svg, DocumentModel, Rect2D, TextMetricsConfig, Viewport};
use vizmend::actions::StepSize;

pub const VP: Viewport = Viewport { width: 375.0, height: 812.0 };

pub fn thresholds() -> Thresholds {
    Thresholds::for_viewport(VP)
}

pub fn spec_of(svg: &str) -> DeclarativeSpec {
    let doc = parse_svg(svg.as_bytes()).expect("parses");
    build_spec(&doc, VP, &TextMetricsConfig::default()).expect("deconstructs")
}

pub fn recipe_spec(recipe: &ChartRecipe) -> DeclarativeSpec {
    spec_of(&generate(recipe).expect("valid recipe").svg)
}

pub fn state(name: &str) -> IssueState {
    IssueState::from_name(name).unwrap_or_else(|| panic!("unknown state {name}"))
}

/// Largest edge displacement between same-id elements of two documents.
pub fn max_bbox_shift(a: &DocumentModel, b: &DocumentModel) -> f64 {
    let m = TextMetricsConfig::default();
    let mut worst: f64 = 0.0;
    for id in a.document_order() {
        match (a.bbox(&id, &m), b.bbox(&id, &m)) {
            (Some(p), Some(q)) => worst = worst.max(edge_distance(&p, &q)),
            (None, None) => {}
            _ => return f64::INFINITY,
        }
    }
    worst
}

pub fn edge_distance(p: &Rect2D, q: &Rect2D) -> f64 {
    [(p.x_min - q.x_min), (p.x_max - q.x_max), (p.y_min - q.y_min), (p.y_max - q.y_max)]
        .iter()
        .fold(0.0f64, |m, d| m.max(d.abs()))
}

/// Bar chart whose 9 px axis labels sit half a pixel from the left edge:
/// raising the font pushes the y labels out of the viewport and lowering it
/// brings them back, so the two issues can hand the episode back and forth.
pub fn oscillation_spec() -> DeclarativeSpec {
    let mut r = ChartRecipe::clean(ChartKind::Bar, 5, 1);
    r.large_values = true;
    r.margins.left = 0.5;
    recipe_spec(&r.with_defect(Defect::SmallFont { class: ElementClass::Axis, size: 9.0 }))
}

/// Policy that takes the oscillating action in each of the two states as
/// often as all other actions together.
pub fn oscillating_policy(beta: f64) -> Policy {
    let mut p = Policy::new(5.0, beta);
    let bias = 22f64.ln();
    p.theta[state("FontSize@Axis").index][17] = bias;
    p.theta[state("LeftOutOfViewport@Axis").index][16] = bias;
    p
}

pub fn oscillation_episode(beta: f64, seed: u64, max_steps: usize) -> EpisodeTrace {
    let mut p = oscillating_policy(beta);
    let cfg = EpisodeConfig { thresholds: thresholds(), steps: StepSize::default(), max_steps, seed, learn: true };
    run_episode(&mut p, &oscillation_spec(), &cfg).expect("episode runs").1
}
