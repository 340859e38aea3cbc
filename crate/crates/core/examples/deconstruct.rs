//! Recover visual groups, axes and layout dependencies from a chart.

use vizmend::corpus::{generate, ChartKind, ChartRecipe};
use vizmend::deconstruct::build_spec;
use vizmend::svg::{parse_svg, TextMetricsConfig, Viewport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let svg = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => generate(&ChartRecipe::clean(ChartKind::GroupedBar, 6, 3))?.svg,
    };
    let doc = parse_svg(svg.as_bytes())?;
    let viewport = Viewport::new(375.0, 812.0).expect("positive size");
    let spec = build_spec(&doc, viewport, &TextMetricsConfig::default())?;
    for g in &spec.groups {
        println!("group {:>2}  {:?}/{:?}  {} members  {:?}", g.id, g.class, g.kind, g.members.len(), g.layout);
    }
    for a in &spec.axes {
        println!("axis {:?}: {} ticks", a.orientation, a.tick_count);
    }
    println!("x range {:?}, y range {:?}", spec.x_scale.range(), spec.y_scale.range());
    Ok(())
}
