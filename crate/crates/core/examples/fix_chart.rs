//! Run one repair episode with the uniform policy and print its trace.
//!
//! cargo run --example fix_chart -- in.svg out.svg

use vizmend::cli::{fix_svg, Tuning};
use vizmend::corpus::{generate, ChartKind, ChartRecipe, Defect};
use vizmend::deconstruct::ElementClass;
use vizmend::interpret::Side;
use vizmend::policy::Policy;
use vizmend::svg::Viewport;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let svg = match args.next() {
        Some(path) => std::fs::read(path)?,
        None => {
            let recipe = ChartRecipe::clean(ChartKind::Bar, 7, 5)
                .with_defect(Defect::WhiteSpace { side: Side::Left, excess: 15.0 })
                .with_defect(Defect::SmallFont { class: ElementClass::Axis, size: 9.0 });
            generate(&recipe)?.svg.into_bytes()
        }
    };
    let output = args.next().unwrap_or_else(|| "fixed.svg".into());
    let tuning = Tuning {
        viewport: Viewport::new(375.0, 812.0).expect("positive size"),
        delta: 5.0,
        tau: 12.0,
        alpha: 5.0,
        beta: 0.005,
        seed: 0,
    };
    let out = fix_svg(&svg, &mut Policy::default(), &tuning, 1000, true)?;
    for line in out.trace.explain() {
        println!("{line}");
    }
    println!("{:?} after {} steps, cost {:.2} -> {:.2}", out.trace.terminal, out.trace.steps.len(), out.trace.initial_total_cost, out.trace.final_total_cost);
    std::fs::write(&output, out.svg)?;
    Ok(())
}
