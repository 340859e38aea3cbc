//! Command-line front end: argument definitions and subcommand handlers.

use crate::actions::StepSize;
use crate::corpus::{generate_corpus, write_atomic, write_corpus, CorpusError, CorpusMix, DEFAULT_CORPUS_SIZE};
use crate::deconstruct::{build_spec_shared, render_spec, DeconstructError};
use crate::interpret::Thresholds;
use crate::policy::{run_episode, EpisodeConfig, EpisodeTrace, Policy, PolicyError, TerminalStatus};
use crate::svg::{parse_svg, serialize, SvgError, TextMetricsConfig, Viewport};
use crate::train::{evaluate, heatmap_csv, metrics_csv, prepare_corpus, train, TrainConfig, TrainError};
use clap::{Args, Parser, Subcommand};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use thiserror::Error;

/// Exit code of `fix` when the step budget ran out before every issue was solved.
pub const EXIT_UNSOLVED: i32 = 2;
pub const EXIT_ERROR: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Svg(#[from] SvgError),
    #[error(transparent)]
    Deconstruct(#[from] DeconstructError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("malformed trace: {0}")]
    Trace(String),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Parser)]
#[command(name = "vizmend", version, about = "Repair SVG charts for small screens")]
pub struct Cli {
    /// Increase log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by the optimizing subcommands.
#[derive(Debug, Clone, Args)]
pub struct Tuning {
    /// Target viewport as WIDTHxHEIGHT in px.
    #[arg(long, default_value = "375x812", value_parser = parse_viewport)]
    pub viewport: Viewport,
    /// Scale and offset step of incremental actions, px.
    #[arg(long, default_value_t = 5.0)]
    pub delta: f64,
    /// Minimum readable font size, px.
    #[arg(long, default_value_t = 12.0)]
    pub tau: f64,
    /// Learning rate.
    #[arg(long, default_value_t = crate::policy::DEFAULT_ALPHA)]
    pub alpha: f64,
    /// Deadlock penalty rate.
    #[arg(long, default_value_t = crate::policy::DEFAULT_BETA)]
    pub beta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl Tuning {
    pub fn steps(&self) -> StepSize {
        StepSize { delta: self.delta, ..StepSize::default() }
    }

    pub fn thresholds(&self) -> Thresholds {
        Thresholds { min_font_size: self.tau, ..Thresholds::for_viewport(self.viewport) }
    }

    fn validate(&self) -> Result<(), CliError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CliError::Invalid(format!("--{name} must be a positive number, got {v}")))
            }
        };
        positive("delta", self.delta)?;
        positive("tau", self.tau)?;
        positive("alpha", self.alpha)?;
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(CliError::Invalid(format!("--beta must be non-negative, got {}", self.beta)));
        }
        Ok(())
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repair one chart and write the patched SVG.
    Fix {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        /// Trained policy; the uniform policy when omitted.
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Also write the episode trace as JSON.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        /// Keep the policy fixed instead of updating it after every step.
        #[arg(long)]
        frozen: bool,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Train policies on a corpus directory.
    Train {
        #[arg(long)]
        corpus: PathBuf,
        /// Directory receiving one policy per run and metrics.csv.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        /// Environment steps per run.
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        /// Step budget of one training episode and of checkpoint evaluations.
        #[arg(long, default_value_t = 100)]
        episode_steps: usize,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Evaluate a frozen policy on a corpus directory.
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Report path; printed to stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        max_steps: usize,
        #[command(flatten)]
        tuning: Tuning,
    },
    /// Generate a synthetic corpus with manifests.
    GenCorpus {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CORPUS_SIZE)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the reweighted held-out mix.
        #[arg(long)]
        held_out: bool,
    },
    /// Print the deconstructed spec of a chart as JSON.
    Inspect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "375x812", value_parser = parse_viewport)]
        viewport: Viewport,
    },
    /// Print an episode trace as one decision per line.
    Explain {
        #[arg(long)]
        trace: PathBuf,
    },
    /// Export a policy's action probabilities as CSV.
    Heatmap {
        #[arg(long)]
        policy: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
}

pub fn parse_viewport(s: &str) -> Result<Viewport, String> {
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Viewport::new(num(w)?, num(h)?).ok_or_else(|| format!("viewport dimensions must be positive: {s:?}"))
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    write_atomic(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// Print to stdout, treating a closed pipe as success.
fn emit(text: &str) -> Result<(), CliError> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io { path: "<stdout>".into(), source: e }),
        _ => Ok(()),
    }
}

fn load_policy(path: Option<&Path>, tuning: &Tuning) -> Result<Policy, CliError> {
    let mut policy = match path {
        Some(p) => Policy::from_json(&String::from_utf8_lossy(&read(p)?))?,
        None => Policy::default(),
    };
    policy.alpha = tuning.alpha;
    policy.beta = tuning.beta;
    Ok(policy)
}

/// Result of `fix`: the patched SVG and the episode that produced it.
pub struct FixOutcome {
    pub svg: String,
    pub trace: EpisodeTrace,
}

pub fn fix_svg(svg: &[u8], policy: &mut Policy, tuning: &Tuning, max_steps: usize, learn: bool) -> Result<FixOutcome, CliError> {
    let doc = parse_svg(svg)?;
    let spec = build_spec_shared(Arc::new(doc), tuning.viewport, &TextMetricsConfig::default())?;
    let config =
        EpisodeConfig { thresholds: tuning.thresholds(), steps: tuning.steps(), max_steps, seed: tuning.seed, learn };
    let (fixed, trace) = run_episode(policy, &spec, &config).map_err(|e| match e {
        crate::actions::ActionError::Render(d) => CliError::Deconstruct(d),
        other => CliError::Invalid(other.to_string()),
    })?;
    let rendered = render_spec(&fixed)?;
    Ok(FixOutcome { svg: serialize(&rendered.document), trace })
}

/// Run a parsed command line, returning the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Fix { input, output, policy, trace, max_steps, frozen, tuning } => {
            tuning.validate()?;
            if max_steps == 0 {
                return Err(CliError::Invalid("--max-steps must be at least 1".into()));
            }
            let mut p = load_policy(policy.as_deref(), &tuning)?;
            let out = fix_svg(&read(&input)?, &mut p, &tuning, max_steps, !frozen)?;
            write(&output, out.svg.as_bytes())?;
            if let Some(t) = trace {
                write(&t, out.trace.to_json().as_bytes())?;
            }
            log::info!("{} steps, total cost {:.3} -> {:.3}", out.trace.steps.len(), out.trace.initial_total_cost, out.trace.final_total_cost);
            Ok(match out.trace.terminal {
                TerminalStatus::Solved => 0,
                TerminalStatus::StepBudgetExhausted => EXIT_UNSOLVED,
            })
        }
        Command::Train { corpus, out_dir, runs, steps, episode_steps, tuning } => {
            tuning.validate()?;
            let charts = prepare_corpus(&corpus, tuning.viewport, &TextMetricsConfig::default())?;
            let config = TrainConfig {
                corpus: Some(corpus),
                total_steps: steps,
                runs,
                alpha: tuning.alpha,
                beta: tuning.beta,
                steps: tuning.steps(),
                thresholds: tuning.thresholds(),
                seed: tuning.seed,
                episode_max_steps: episode_steps.max(1),
                eval_max_steps: episode_steps.max(1),
            };
            let outcome = train(&charts, &config)?;
            std::fs::create_dir_all(&out_dir).map_err(|source| CliError::Io { path: out_dir.clone(), source })?;
            for (i, p) in outcome.policies.iter().enumerate() {
                write(&out_dir.join(format!("policy-run{i}.json")), p.to_json(&config.steps, tuning.tau).as_bytes())?;
            }
            write(&out_dir.join("metrics.csv"), metrics_csv(&outcome.metrics).as_bytes())?;
            Ok(0)
        }
        Command::Eval { corpus, policy, output, max_steps, tuning } => {
            tuning.validate()?;
            let p = load_policy(policy.as_deref(), &tuning)?;
            let charts = prepare_corpus(&corpus, tuning.viewport, &TextMetricsConfig::default())?;
            let config = TrainConfig { steps: tuning.steps(), thresholds: tuning.thresholds(), ..TrainConfig::default() };
            let report = evaluate(&charts, &p, &config, max_steps, tuning.seed)?;
            let json = serde_json::to_string_pretty(&report).expect("report serializes");
            match output {
                Some(path) => write(&path, json.as_bytes())?,
                None => emit(&json)?,
            }
            Ok(0)
        }
        Command::GenCorpus { output, count, seed, held_out } => {
            if count == 0 {
                return Err(CliError::Invalid("--count must be at least 1".into()));
            }
            let mix = if held_out { CorpusMix::held_out() } else { CorpusMix::default() };
            let entries = generate_corpus(count, seed, &mix)?;
            write_corpus(&output, &entries, seed, &mix)?;
            Ok(0)
        }
        Command::Inspect { input, viewport } => {
            let doc = parse_svg(&read(&input)?)?;
            let spec = build_spec_shared(Arc::new(doc), viewport, &TextMetricsConfig::default())?;
            emit(&spec.to_json())?;
            Ok(0)
        }
        Command::Explain { trace } => {
            let t: EpisodeTrace =
                serde_json::from_slice(&read(&trace)?).map_err(|e| CliError::Trace(e.to_string()))?;
            emit(&t.explain().join("\n"))?;
            Ok(0)
        }
        Command::Heatmap { policy, output } => {
            let bytes = read(&policy)?;
            let file: crate::policy::PolicyFile =
                serde_json::from_slice(&bytes).map_err(|e| PolicyError::Malformed(e.to_string()))?;
            let p = Policy::from_file(&file)?;
            let steps = StepSize { delta: file.delta, ..StepSize::default() };
            write(&output, heatmap_csv(&p, &steps).as_bytes())?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viewport_flag() {
        assert_eq!(parse_viewport("375x812").unwrap(), Viewport { width: 375.0, height: 812.0 });
        assert_eq!(parse_viewport("360X640").unwrap(), Viewport { width: 360.0, height: 640.0 });
        assert!(parse_viewport("375").is_err());
        assert!(parse_viewport("0x812").is_err());
        assert!(parse_viewport("ax1").is_err());
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["vizmend", "fix", "--input", "a.svg", "--output", "b.svg"]).unwrap();
        let Command::Fix { max_steps, tuning, policy, frozen, .. } = cli.command else { panic!("not fix") };
        assert_eq!(max_steps, 1000);
        assert_eq!(tuning.delta, 5.0);
        assert_eq!(tuning.tau, 12.0);
        assert_eq!(tuning.alpha, 5.0);
        assert_eq!(tuning.beta, 0.005);
        assert_eq!(tuning.viewport, Viewport { width: 375.0, height: 812.0 });
        assert!(policy.is_none() && !frozen);
    }

    #[test]
    fn rejects_bad_tuning() {
        let cli = Cli::try_parse_from(["vizmend", "fix", "--input", "a", "--output", "b", "--tau=-1"]).unwrap();
        let Command::Fix { tuning, .. } = cli.command else { panic!("not fix") };
        assert!(tuning.validate().is_err());
    }
}
