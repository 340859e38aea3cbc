//! Tabular softmax policy over issue states and actions, trained with
//! per-step REINFORCE updates and a penalty for revisiting states.

mod episode;

pub use episode::{run_episode, EpisodeConfig, EpisodeTrace, StepRecord, TerminalStatus, TRACE_FORMAT_VERSION};

use crate::actions::{Action, StepSize, ACTION_COUNT};
use crate::interpret::{IssueState, STATE_COUNT};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const POLICY_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_ALPHA: f64 = 5.0;
pub const DEFAULT_BETA: f64 = 0.005;

#[derive(Debug, Error)]
pub enum PolicyError {
    #[error("malformed policy file: {0}")]
    Malformed(String),
    #[error("unsupported policy format version {0}")]
    Version(u32),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    /// One row of action preferences per state.
    pub theta: Vec<[f64; ACTION_COUNT]>,
    pub alpha: f64,
    pub beta: f64,
}

impl Default for Policy {
    fn default() -> Self {
        Policy::new(DEFAULT_ALPHA, DEFAULT_BETA)
    }
}

/// On-disk form of a policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicyFile {
    pub format_version: u32,
    pub state_names: Vec<String>,
    pub action_names: Vec<String>,
    pub theta: Vec<Vec<f64>>,
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub tau: f64,
    pub rng_note: String,
}

impl Policy {
    pub fn new(alpha: f64, beta: f64) -> Policy {
        Policy { theta: vec![[0.0; ACTION_COUNT]; STATE_COUNT], alpha, beta }
    }

    /// Softmax of the state's row.
    pub fn action_probs(&self, state: usize) -> [f64; ACTION_COUNT] {
        softmax(&self.theta[state])
    }

    pub fn sample_action<R: Rng>(&self, state: usize, rng: &mut R) -> usize {
        let p = self.action_probs(state);
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (a, &pa) in p.iter().enumerate() {
            acc += pa;
            if u < acc {
                return a;
            }
        }
        ACTION_COUNT - 1
    }

    /// `θ[s] += coef · ∇ log π(a|s)`.
    fn step_log_prob(&mut self, state: usize, action: usize, coef: f64) {
        if coef == 0.0 {
            return;
        }
        let g = log_prob_gradient(&self.theta[state], action);
        for (t, gi) in self.theta[state].iter_mut().zip(g) {
            *t += coef * gi;
        }
    }

    pub fn reinforce_update(&mut self, state: usize, action: usize, reward: f64) {
        self.step_log_prob(state, action, self.alpha * reward);
    }

    /// Lower the probability of every (state, action) pair on `path`.
    pub fn penalize_deadlock(&mut self, path: &[(usize, usize)]) {
        for &(s, a) in path {
            self.step_log_prob(s, a, -self.beta);
        }
    }

    pub fn to_file(&self, steps: &StepSize, tau: f64) -> PolicyFile {
        PolicyFile {
            format_version: POLICY_FORMAT_VERSION,
            state_names: IssueState::all().iter().map(|s| s.name()).collect(),
            action_names: Action::all().iter().map(|a| a.label(steps)).collect(),
            theta: self.theta.iter().map(|r| r.to_vec()).collect(),
            alpha: self.alpha,
            beta: self.beta,
            delta: steps.delta,
            tau,
            rng_note: "actions sampled by inverse CDF from a ChaCha8 stream seeded per episode".to_string(),
        }
    }

    pub fn to_json(&self, steps: &StepSize, tau: f64) -> String {
        serde_json::to_string_pretty(&self.to_file(steps, tau)).expect("policy serializes")
    }

    pub fn from_file(f: &PolicyFile) -> Result<Policy, PolicyError> {
        if f.format_version != POLICY_FORMAT_VERSION {
            return Err(PolicyError::Version(f.format_version));
        }
        if f.theta.len() != STATE_COUNT {
            return Err(PolicyError::Malformed(format!("expected {STATE_COUNT} rows, found {}", f.theta.len())));
        }
        let mut theta = Vec::with_capacity(STATE_COUNT);
        for (i, row) in f.theta.iter().enumerate() {
            let r: [f64; ACTION_COUNT] = row
                .as_slice()
                .try_into()
                .map_err(|_| PolicyError::Malformed(format!("row {i} has {} entries, expected {ACTION_COUNT}", row.len())))?;
            if r.iter().any(|v| !v.is_finite()) {
                return Err(PolicyError::Malformed(format!("row {i} has a non-finite entry")));
            }
            theta.push(r);
        }
        Ok(Policy { theta, alpha: f.alpha, beta: f.beta })
    }

    pub fn from_json(s: &str) -> Result<Policy, PolicyError> {
        let f: PolicyFile = serde_json::from_str(s).map_err(|e| PolicyError::Malformed(e.to_string()))?;
        Policy::from_file(&f)
    }
}

pub fn softmax(row: &[f64; ACTION_COUNT]) -> [f64; ACTION_COUNT] {
    let m = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out = [0.0; ACTION_COUNT];
    let mut z = 0.0;
    for (o, &t) in out.iter_mut().zip(row) {
        *o = (t - m).exp();
        z += *o;
    }
    for o in &mut out {
        *o /= z;
    }
    out
}

/// Gradient of `log softmax(row)[action]` with respect to the row.
pub fn log_prob_gradient(row: &[f64; ACTION_COUNT], action: usize) -> [f64; ACTION_COUNT] {
    let p = softmax(row);
    let mut g = [0.0; ACTION_COUNT];
    for (i, gi) in g.iter_mut().enumerate() {
        *gi = if i == action { 1.0 } else { 0.0 } - p[i];
    }
    g
}

/// Cost reduction since the previous step, relative to the cost on entering the state.
pub fn compute_reward(j_t: f64, j_prev: f64, j_0: f64) -> f64 {
    (j_prev - j_t) / j_0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_start() {
        let p = Policy::default();
        for s in 0..STATE_COUNT {
            for q in p.action_probs(s) {
                assert!((q - 1.0 / 23.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_hot_row() {
        let mut p = Policy::default();
        p.theta[0][0] = 1.0;
        let e = std::f64::consts::E;
        assert!((p.action_probs(0)[0] - e / (e + 22.0)).abs() < 1e-12);
        assert!((p.action_probs(0)[0] - 0.1100).abs() < 1e-4);
    }

    #[test]
    fn update_from_zero_row() {
        let mut p = Policy::default();
        p.reinforce_update(4, 3, 0.2);
        assert!((p.theta[4][3] - 0.9565).abs() < 1e-4);
        assert!((p.theta[4][3] - 22.0 / 23.0).abs() < 1e-12);
        for a in (0..ACTION_COUNT).filter(|&a| a != 3) {
            assert!((p.theta[4][a] + 1.0 / 23.0).abs() < 1e-12);
        }
        assert!(p.theta[5].iter().all(|&t| t == 0.0));
        let before = p.clone();
        p.reinforce_update(4, 3, 0.0);
        assert_eq!(p, before);
    }

    #[test]
    fn penalty_lowers_probability() {
        let mut p = Policy::default();
        p.penalize_deadlock(&[(2, 7)]);
        assert!((p.theta[2][7] + 0.005 * 22.0 / 23.0).abs() < 1e-12);
        assert!((p.theta[2][7] + 0.004783).abs() < 1e-6);
        assert!(p.action_probs(2)[7] < 1.0 / 23.0);
        let mut z = Policy::new(5.0, 0.0);
        z.penalize_deadlock(&[(2, 7), (2, 8)]);
        assert_eq!(z, Policy::new(5.0, 0.0));
    }

    #[test]
    fn rewards() {
        assert_eq!(compute_reward(80.0, 100.0, 100.0), 0.2);
        assert_eq!(compute_reward(50.0, 50.0, 100.0), 0.0);
        assert_eq!(compute_reward(0.0, 7.5, 7.5), 1.0);
    }

    #[test]
    fn file_round_trip() {
        let mut p = Policy::default();
        p.reinforce_update(0, 4, 1.0);
        let steps = StepSize::default();
        let q = Policy::from_json(&p.to_json(&steps, 12.0)).unwrap();
        assert_eq!(p, q);
        let f = p.to_file(&steps, 12.0);
        assert_eq!(f.state_names[0], "TopMargin");
        assert_eq!(f.action_names[4], "A4(y-range-min −5)");
    }
}
