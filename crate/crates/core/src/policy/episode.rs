use super::{compute_reward, Policy};
use crate::actions::{apply_action, Action, ActionError, StepSize};
use crate::deconstruct::DeclarativeSpec;
use crate::interpret::{detect_state, Thresholds};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const TRACE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeConfig {
    pub thresholds: Thresholds,
    pub steps: StepSize,
    pub max_steps: usize,
    pub seed: u64,
    /// Update the policy while acting.
    pub learn: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalStatus {
    Solved,
    StepBudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub state: String,
    pub state_index: usize,
    pub action: usize,
    pub action_label: String,
    /// Cost of the state before and after the action.
    pub cost_before: f64,
    pub cost_after: f64,
    /// Cost of the state when it was entered.
    pub entry_cost: f64,
    pub reward: f64,
    /// The step led back into an already visited state.
    pub deadlock_penalty: bool,
    pub total_cost_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    pub format_version: u32,
    pub seed: u64,
    pub initial_state: Option<String>,
    pub initial_total_cost: f64,
    pub final_total_cost: f64,
    pub steps: Vec<StepRecord>,
    pub terminal: TerminalStatus,
}

impl EpisodeTrace {
    pub fn solved(&self) -> bool {
        self.terminal == TerminalStatus::Solved
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    /// One line per decision, e.g. `step 3: state=TopMargin action=A4(y-range-min −5) reward=+0.25`.
    pub fn explain(&self) -> Vec<String> {
        self.steps
            .iter()
            .map(|r| {
                let mut line = format!("step {}: state={} action={} reward={:+.2}", r.step, r.state, r.action_label, r.reward);
                if r.deadlock_penalty {
                    line.push_str(" (revisit penalized)");
                }
                line
            })
            .collect()
    }
}

/// Repeatedly work on the first unsolved issue until none is left or the
/// step budget runs out.
pub fn run_episode(
    policy: &mut Policy,
    spec: &DeclarativeSpec,
    config: &EpisodeConfig,
) -> Result<(DeclarativeSpec, EpisodeTrace), ActionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut spec = spec.clone();
    let (mut report, _) = detect_state(&spec, &config.thresholds)?;
    let mut trace = EpisodeTrace {
        format_version: TRACE_FORMAT_VERSION,
        seed: config.seed,
        initial_state: report.active.map(|s| s.name()),
        initial_total_cost: report.total,
        final_total_cost: report.total,
        steps: Vec::new(),
        terminal: TerminalStatus::Solved,
    };
    let Some(mut state) = report.active else { return Ok((spec, trace)) };
    let mut visited = [false; crate::interpret::STATE_COUNT];
    visited[state.index] = true;
    let mut entry_cost = report.cost(&state);
    let mut path: Vec<(usize, usize)> = Vec::new();

    for step in 1..=config.max_steps {
        let action = policy.sample_action(state.index, &mut rng);
        let next = apply_action(&spec, action, &state, &config.steps)?;
        let (next_report, _) = detect_state(&next, &config.thresholds)?;
        let before = report.cost(&state);
        let after = next_report.cost(&state);
        let reward = compute_reward(after, before, entry_cost);
        if config.learn {
            policy.reinforce_update(state.index, action, reward);
        }
        path.push((state.index, action));
        let mut record = StepRecord {
            step,
            state: state.name(),
            state_index: state.index,
            action,
            action_label: Action::get(action).map(|a| a.label(&config.steps)).unwrap_or_default(),
            cost_before: before,
            cost_after: after,
            entry_cost,
            reward,
            deadlock_penalty: false,
            total_cost_after: next_report.total,
        };
        spec = next;
        report = next_report;
        match report.active {
            None => {
                trace.steps.push(record);
                trace.final_total_cost = report.total;
                trace.terminal = TerminalStatus::Solved;
                return Ok((spec, trace));
            }
            Some(s) if s != state => {
                if visited[s.index] {
                    record.deadlock_penalty = true;
                    if config.learn {
                        policy.penalize_deadlock(&path);
                    }
                }
                visited[s.index] = true;
                path.clear();
                state = s;
                entry_cost = report.cost(&s);
            }
            Some(_) => {}
        }
        trace.steps.push(record);
    }
    trace.final_total_cost = report.total;
    trace.terminal = TerminalStatus::StepBudgetExhausted;
    Ok((spec, trace))
}
