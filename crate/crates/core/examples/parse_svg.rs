//! Parse an SVG and list every visible element with its bounding box.
//!
//! cargo run --example parse_svg -- chart.svg

use vizmend::corpus::{generate, ChartKind, ChartRecipe};
use vizmend::svg::{parse_svg, TextMetricsConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let svg = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => generate(&ChartRecipe::clean(ChartKind::Bar, 5, 1))?.svg,
    };
    let doc = parse_svg(svg.as_bytes())?;
    let metrics = TextMetricsConfig::default();
    for id in doc.visible_leaves() {
        let el = doc.get(&id).expect("leaf exists");
        match doc.bbox(&id, &metrics) {
            Some(b) => println!("{:<14} {:?} [{:.1}, {:.1}] x [{:.1}, {:.1}]", id.as_str(), el.kind, b.x_min, b.x_max, b.y_min, b.y_max),
            None => println!("{:<14} {:?} (no geometry)", id.as_str(), el.kind),
        }
    }
    for d in &doc.diagnostics {
        eprintln!("warning: {d}");
    }
    Ok(())
}
