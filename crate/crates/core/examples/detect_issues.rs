//! Score a chart against every issue state and report the one to fix first.

use vizmend::corpus::{generate, ChartKind, ChartRecipe, Defect};
use vizmend::deconstruct::{build_spec, ElementClass};
use vizmend::interpret::{detect_state, IssueState, Side, Thresholds};
use vizmend::svg::{parse_svg, TextMetricsConfig, Viewport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let recipe = ChartRecipe::clean(ChartKind::Line, 8, 4)
        .with_defect(Defect::OutOfViewport { side: Side::Right, amount: 25.0 })
        .with_defect(Defect::SmallFont { class: ElementClass::Title, size: 10.0 });
    let viewport = Viewport::new(375.0, 812.0).expect("positive size");
    let doc = parse_svg(generate(&recipe)?.svg.as_bytes())?;
    let spec = build_spec(&doc, viewport, &TextMetricsConfig::default())?;
    let (report, _) = detect_state(&spec, &Thresholds::for_viewport(viewport))?;
    for s in IssueState::all().iter().filter(|s| report.cost(s) > 0.0) {
        println!("{:<28} {:.2}", s.name(), report.cost(s));
    }
    println!("total {:.2}; first to fix: {}", report.total, report.active.map(|s| s.name()).unwrap_or_else(|| "none".into()));
    Ok(())
}
