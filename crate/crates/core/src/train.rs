//! Training runs over a corpus, frozen-policy evaluation and policy export.

use crate::actions::{Action, ActionError, StepSize};
use crate::corpus::{load_corpus, CorpusError};
use crate::deconstruct::{build_spec_shared, DeclarativeSpec, DeconstructError};
use crate::interpret::{IssueState, Thresholds};
use crate::policy::{run_episode, EpisodeConfig, EpisodeTrace, Policy, DEFAULT_ALPHA, DEFAULT_BETA};
use crate::svg::{parse_svg, SvgError, TextMetricsConfig, Viewport};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

pub const REPORT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{chart}: {source}")]
    Svg { chart: String, source: SvgError },
    #[error("{chart}: {source}")]
    Deconstruct { chart: String, source: DeconstructError },
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error("empty corpus")]
    EmptyCorpus,
}

/// A corpus chart deconstructed once and reused across episodes.
#[derive(Debug, Clone)]
pub struct PreparedChart {
    pub name: String,
    pub spec: DeclarativeSpec,
}

pub fn prepare(name: &str, svg: &str, viewport: Viewport, metrics: &TextMetricsConfig) -> Result<PreparedChart, TrainError> {
    let doc = parse_svg(svg.as_bytes()).map_err(|source| TrainError::Svg { chart: name.to_string(), source })?;
    let spec = build_spec_shared(Arc::new(doc), viewport, metrics)
        .map_err(|source| TrainError::Deconstruct { chart: name.to_string(), source })?;
    Ok(PreparedChart { name: name.to_string(), spec })
}

/// Load and deconstruct every chart of a corpus directory.
pub fn prepare_corpus(dir: &Path, viewport: Viewport, metrics: &TextMetricsConfig) -> Result<Vec<PreparedChart>, TrainError> {
    let charts = load_corpus(dir)?;
    charts.par_iter().map(|c| prepare(&c.name, &c.svg, viewport, metrics)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub corpus: Option<PathBuf>,
    /// Environment steps per run, summed over episodes.
    pub total_steps: usize,
    pub runs: usize,
    pub alpha: f64,
    pub beta: f64,
    pub steps: StepSize,
    pub thresholds: Thresholds,
    pub seed: u64,
    /// Step budget of a single training episode.
    pub episode_max_steps: usize,
    /// Step budget of each evaluation episode at a checkpoint.
    pub eval_max_steps: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            corpus: None,
            total_steps: 1000,
            runs: 5,
            alpha: DEFAULT_ALPHA,
            beta: DEFAULT_BETA,
            steps: StepSize::default(),
            thresholds: Thresholds::for_viewport(Viewport { width: 375.0, height: 812.0 }),
            seed: 0,
            episode_max_steps: 100,
            eval_max_steps: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub run: usize,
    pub step: usize,
    pub normalized_return_pct: f64,
    pub solve_rate_pct: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub policies: Vec<Policy>,
    pub metrics: Vec<MetricPoint>,
}

/// 0, then 1-2-5 steps per decade up to and including `budget`.
pub fn checkpoints(budget: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut decade = 1;
    'outer: loop {
        for m in [1, 2, 5] {
            let c = m * decade;
            if c >= budget {
                break 'outer;
            }
            out.push(c);
        }
        decade *= 10;
    }
    if budget > 0 {
        out.push(budget);
    }
    out
}

fn mix(seed: u64, a: u64, b: u64) -> u64 {
    seed ^ a.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ b.wrapping_mul(0xC2B2_AE3D_27D4_EB4F)
}

/// Train `config.runs` independent policies.
pub fn train(charts: &[PreparedChart], config: &TrainConfig) -> Result<TrainOutcome, TrainError> {
    if charts.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let results: Vec<Result<(Policy, Vec<MetricPoint>), TrainError>> =
        (0..config.runs).into_par_iter().map(|run| train_run(charts, config, run)).collect();
    let mut policies = Vec::new();
    let mut metrics = Vec::new();
    for r in results {
        let (p, m) = r?;
        policies.push(p);
        metrics.extend(m);
    }
    Ok(TrainOutcome { policies, metrics })
}

fn train_run(charts: &[PreparedChart], config: &TrainConfig, run: usize) -> Result<(Policy, Vec<MetricPoint>), TrainError> {
    let mut policy = Policy::new(config.alpha, config.beta);
    let mut rng = ChaCha8Rng::seed_from_u64(mix(config.seed, run as u64, 1));
    let eval_seed = mix(config.seed, run as u64, 2);
    let marks = checkpoints(config.total_steps);
    let mut next_mark = 0;
    let mut metrics = Vec::new();
    let record = |policy: &Policy, step: usize, metrics: &mut Vec<MetricPoint>| -> Result<(), TrainError> {
        let r = evaluate(charts, policy, config, config.eval_max_steps, eval_seed)?;
        metrics.push(MetricPoint {
            run,
            step,
            normalized_return_pct: 100.0 * r.mean_normalized_return,
            solve_rate_pct: 100.0 * r.solve_rate,
        });
        log::info!("run {run} step {step}: solve rate {:.1}%", 100.0 * r.solve_rate);
        Ok(())
    };

    let mut used = 0;
    let mut episodes = 0;
    while used < config.total_steps && episodes < config.total_steps.max(1) * 4 {
        while next_mark < marks.len() && marks[next_mark] <= used {
            record(&policy, marks[next_mark], &mut metrics)?;
            next_mark += 1;
        }
        let chart = &charts[rng.gen_range(0..charts.len())];
        let episode = EpisodeConfig {
            thresholds: config.thresholds,
            steps: config.steps,
            max_steps: config.episode_max_steps.min(config.total_steps - used),
            seed: rng.gen(),
            learn: true,
        };
        let (_, trace) = run_episode(&mut policy, &chart.spec, &episode)?;
        used += trace.steps.len();
        episodes += 1;
    }
    while next_mark < marks.len() {
        record(&policy, marks[next_mark], &mut metrics)?;
        next_mark += 1;
    }
    Ok((policy, metrics))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartOutcome {
    pub name: String,
    pub solved: bool,
    pub steps: usize,
    pub initial_cost: f64,
    pub final_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub format_version: u32,
    pub episode_budget: usize,
    pub solve_rate: f64,
    /// Median steps over solved charts.
    pub median_steps: Option<f64>,
    /// Mean fraction of the initial total cost removed.
    pub mean_normalized_return: f64,
    pub outcomes: Vec<ChartOutcome>,
}

/// Episode seed for chart `i` of an evaluation pass.
pub fn eval_seed(seed: u64, i: usize) -> u64 {
    mix(seed, i as u64, 3)
}

/// Run one frozen-policy episode per chart.
pub fn evaluate(
    charts: &[PreparedChart],
    policy: &Policy,
    config: &TrainConfig,
    episode_budget: usize,
    seed: u64,
) -> Result<EvalReport, TrainError> {
    let outcomes: Vec<Result<(ChartOutcome, EpisodeTrace), TrainError>> = charts
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let mut p = policy.clone();
            let cfg = EpisodeConfig {
                thresholds: config.thresholds,
                steps: config.steps,
                max_steps: episode_budget,
                seed: eval_seed(seed, i),
                learn: false,
            };
            let (_, trace) = run_episode(&mut p, &c.spec, &cfg)?;
            let outcome = ChartOutcome {
                name: c.name.clone(),
                solved: trace.solved(),
                steps: trace.steps.len(),
                initial_cost: trace.initial_total_cost,
                final_cost: trace.final_total_cost,
            };
            Ok((outcome, trace))
        })
        .collect();
    let mut list = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        list.push(o?.0);
    }
    Ok(summarize(list, episode_budget))
}

fn summarize(outcomes: Vec<ChartOutcome>, episode_budget: usize) -> EvalReport {
    let n = outcomes.len().max(1) as f64;
    let solved: Vec<usize> = outcomes.iter().filter(|o| o.solved).map(|o| o.steps).collect();
    let ret: f64 = outcomes
        .iter()
        .map(|o| if o.initial_cost > 0.0 { ((o.initial_cost - o.final_cost) / o.initial_cost).max(-1.0) } else { 1.0 })
        .sum();
    EvalReport {
        format_version: REPORT_FORMAT_VERSION,
        episode_budget,
        solve_rate: solved.len() as f64 / n,
        median_steps: median(solved.iter().map(|&s| s as f64).collect()),
        mean_normalized_return: ret / n,
        outcomes,
    }
}

pub fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[m] } else { (v[m - 1] + v[m]) / 2.0 })
}

/// One (state, action, probability) row per table cell.
pub fn export_policy_heatmap(policy: &Policy, steps: &StepSize) -> Vec<(String, String, f64)> {
    let actions = Action::all();
    let mut out = Vec::new();
    for s in IssueState::all() {
        let p = policy.action_probs(s.index);
        for a in &actions {
            out.push((s.name(), a.label(steps), p[a.id]));
        }
    }
    out
}

pub fn heatmap_csv(policy: &Policy, steps: &StepSize) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["state", "action", "probability"]).expect("in-memory write");
    for (s, a, p) in export_policy_heatmap(policy, steps) {
        w.write_record([s, a, format!("{p:.6}")]).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

pub fn metrics_csv(points: &[MetricPoint]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run", "step", "normalized_return_pct", "solve_rate_pct"]).expect("in-memory write");
    for p in points {
        w.write_record([
            p.run.to_string(),
            p.step.to_string(),
            format!("{:.3}", p.normalized_return_pct),
            format!("{:.3}", p.solve_rate_pct),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_schedule() {
        assert_eq!(checkpoints(1000), vec![0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000]);
        assert_eq!(checkpoints(0), vec![0]);
        assert_eq!(checkpoints(7), vec![0, 1, 2, 5, 7]);
    }

    #[test]
    fn medians() {
        assert_eq!(median(vec![]), None);
        assert_eq!(median(vec![3.0, 1.0, 2.0]), Some(2.0));
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), Some(2.5));
    }

    #[test]
    fn zero_policy_heatmap() {
        let rows = export_policy_heatmap(&Policy::default(), &StepSize::default());
        assert_eq!(rows.len(), 28 * 23);
        assert!(rows.iter().all(|r| (r.2 - 1.0 / 23.0).abs() < 1e-12));
        let csv = heatmap_csv(&Policy::default(), &StepSize::default());
        assert!(csv.starts_with("state,action,probability\n"));
    }
}
