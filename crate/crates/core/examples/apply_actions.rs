//! Apply single actions to a chart with too much space above the plot and
//! watch the top margin cost fall.

use vizmend::actions::{apply_action, Action, StepSize};
use vizmend::corpus::{generate, ChartKind, ChartRecipe, Defect};
use vizmend::deconstruct::{build_spec, render_spec};
use vizmend::interpret::{detect_state, IssueState, Side, Thresholds};
use vizmend::svg::{parse_svg, serialize, TextMetricsConfig, Viewport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let viewport = Viewport::new(375.0, 812.0).expect("positive size");
    let t = Thresholds::for_viewport(viewport);
    let steps = StepSize::default();
    let recipe = ChartRecipe::clean(ChartKind::Bar, 6, 2).with_defect(Defect::WhiteSpace { side: Side::Top, excess: 18.0 });
    let doc = parse_svg(generate(&recipe)?.svg.as_bytes())?;
    let mut spec = build_spec(&doc, viewport, &TextMetricsConfig::default())?;
    let top = IssueState::from_name("TopMargin").expect("known state");
    for _ in 0..6 {
        let (report, _) = detect_state(&spec, &t)?;
        println!("TopMargin cost {:.1}", report.cost(&top));
        if report.solved() {
            break;
        }
        let action = Action::get(4).expect("known action");
        println!("  apply A{}: {}", action.id, action.describe(&steps));
        spec = apply_action(&spec, action.id, &top, &steps)?;
    }
    std::fs::write("fixed-top.svg", serialize(&render_spec(&spec)?.document))?;
    println!("wrote fixed-top.svg");
    Ok(())
}
