//! Evaluate a policy on a held-out corpus and export its action heatmap.
//!
//! cargo run --example evaluate_policy -- policy.json

use vizmend::actions::StepSize;
use vizmend::corpus::{generate_corpus, CorpusMix};
use vizmend::policy::Policy;
use vizmend::svg::{TextMetricsConfig, Viewport};
use vizmend::train::{evaluate, heatmap_csv, prepare, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let policy = match std::env::args().nth(1) {
        Some(path) => Policy::from_json(&std::fs::read_to_string(path)?)?,
        None => Policy::default(),
    };
    let viewport = Viewport::new(375.0, 812.0).expect("positive size");
    let charts = generate_corpus(20, 7, &CorpusMix::held_out())?
        .iter()
        .map(|e| prepare(&e.name, &e.chart.svg, viewport, &TextMetricsConfig::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let report = evaluate(&charts, &policy, &TrainConfig::default(), 100, 0)?;
    for o in &report.outcomes {
        println!("{:<10} solved={:<5} steps={:>3} cost {:.1} -> {:.1}", o.name, o.solved, o.steps, o.initial_cost, o.final_cost);
    }
    println!("solve rate {:.1}%, median steps {:?}", 100.0 * report.solve_rate, report.median_steps);
    std::fs::write("heatmap.csv", heatmap_csv(&policy, &StepSize::default()))?;
    println!("wrote heatmap.csv");
    Ok(())
}
