//! Train a policy on a small generated corpus and print the learning curve.

use vizmend::actions::StepSize;
use vizmend::corpus::{generate_corpus, CorpusMix};
use vizmend::svg::{TextMetricsConfig, Viewport};
use vizmend::train::{metrics_csv, prepare, train, TrainConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let viewport = Viewport::new(375.0, 812.0).expect("positive size");
    let charts = generate_corpus(27, 42, &CorpusMix::default())?
        .iter()
        .map(|e| prepare(&e.name, &e.chart.svg, viewport, &TextMetricsConfig::default()))
        .collect::<Result<Vec<_>, _>>()?;
    let config = TrainConfig { total_steps: 300, runs: 2, ..TrainConfig::default() };
    let outcome = train(&charts, &config)?;
    print!("{}", metrics_csv(&outcome.metrics));
    std::fs::write("policy.json", outcome.policies[0].to_json(&StepSize::default(), 12.0))?;
    println!("wrote policy.json");
    Ok(())
}
