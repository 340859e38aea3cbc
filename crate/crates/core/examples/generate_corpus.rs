//! Write a synthetic corpus with ground-truth manifests to a directory.
//!
//! cargo run --example generate_corpus -- out-dir [count] [seed]

use vizmend::corpus::{generate_corpus, write_corpus, CorpusMix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let dir = args.next().unwrap_or_else(|| "corpus".into());
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(81);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);
    let mix = CorpusMix::default();
    let entries = generate_corpus(count, seed, &mix)?;
    write_corpus(std::path::Path::new(&dir), &entries, seed, &mix)?;
    let defects: usize = entries.iter().map(|e| e.chart.manifest.defects.len()).sum();
    println!("{count} charts, {defects} seeded defects in {dir}");
    Ok(())
}
