mod common;

use common::{oscillation_spec, recipe_spec, state, thresholds};
use proptest::prelude::*;
use vizmend::actions::{StepSize, ACTION_COUNT};
use vizmend::corpus::{generate_corpus, ChartKind, ChartRecipe, CorpusMix, Defect};
use vizmend::interpret::{Side, STATE_COUNT};
use vizmend::policy::{log_prob_gradient, run_episode, softmax, EpisodeConfig, Policy, TerminalStatus};

fn config(seed: u64, max_steps: usize, learn: bool) -> EpisodeConfig {
    EpisodeConfig { thresholds: thresholds(), steps: StepSize::default(), max_steps, seed, learn }
}

fn row() -> impl Strategy<Value = [f64; ACTION_COUNT]> {
    prop::array::uniform23(-6.0f64..6.0)
}

proptest! {
    #[test]
    fn probabilities_sum_to_one(r in row()) {
        let p = softmax(&r);
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!(p.iter().all(|&q| q > 0.0));
    }

    #[test]
    fn gradient_matches_finite_differences(r in row(), a in 0..ACTION_COUNT) {
        let g = log_prob_gradient(&r, a);
        let h = 1e-5;
        for i in 0..ACTION_COUNT {
            let (mut up, mut down) = (r, r);
            up[i] += h;
            down[i] -= h;
            let numeric = (softmax(&up)[a].ln() - softmax(&down)[a].ln()) / (2.0 * h);
            prop_assert!((numeric - g[i]).abs() < 1e-6, "component {i}: {numeric} vs {}", g[i]);
        }
    }

    #[test]
    fn positive_reward_raises_the_chosen_action(r in row(), s in 0..STATE_COUNT, a in 0..ACTION_COUNT, reward in 0.001f64..2.0) {
        let mut p = Policy::default();
        p.theta[s] = r;
        let before = p.action_probs(s)[a];
        p.reinforce_update(s, a, reward);
        prop_assert!(p.action_probs(s)[a] > before);
    }
}

#[test]
fn penalties_accumulate_along_the_path() {
    let mut once = Policy::default();
    once.penalize_deadlock(&[(3, 5)]);
    let mut twice = once.clone();
    twice.penalize_deadlock(&[(3, 5)]);
    let mut path = Policy::default();
    path.penalize_deadlock(&[(3, 5), (3, 5)]);
    assert_eq!(path, twice);
    let mut three = Policy::default();
    three.penalize_deadlock(&[(3, 5), (3, 5), (3, 5)]);
    assert!(three.theta[3][5] < path.theta[3][5]);
    assert!(three.theta.iter().enumerate().all(|(s, r)| s == 3 || r.iter().all(|&t| t == 0.0)));
}

#[test]
fn clean_chart_needs_no_steps() {
    let spec = recipe_spec(&ChartRecipe::clean(ChartKind::Line, 6, 2));
    let (out, trace) = run_episode(&mut Policy::default(), &spec, &config(0, 100, true)).unwrap();
    assert!(trace.solved());
    assert!(trace.steps.is_empty());
    assert_eq!(out, spec);
}

#[test]
fn top_margin_shrinks_in_steps_of_delta() {
    let spec = recipe_spec(&ChartRecipe::clean(ChartKind::Bar, 6, 2).with_defect(Defect::WhiteSpace { side: Side::Top, excess: 20.0 }));
    let mut p = Policy::default();
    p.theta[state("TopMargin").index][4] = 100.0;
    let (_, trace) = run_episode(&mut p, &spec, &config(1, 100, false)).unwrap();
    assert!(trace.solved());
    assert!(trace.steps.len() <= 4, "{} steps", trace.steps.len());
    assert!(trace.steps.iter().all(|r| r.action == 4 && r.state == "TopMargin"));
}

#[test]
fn fixed_oscillating_policy_never_finishes() {
    let mut p = Policy::new(5.0, 0.0);
    p.theta[state("FontSize@Axis").index][17] = 100.0;
    p.theta[state("LeftOutOfViewport@Axis").index][16] = 100.0;
    let (_, trace) = run_episode(&mut p, &oscillation_spec(), &config(0, 200, false)).unwrap();
    assert_eq!(trace.terminal, TerminalStatus::StepBudgetExhausted);
    assert!(trace.steps.iter().filter(|r| r.deadlock_penalty).count() > 50);
}

#[test]
fn same_seed_same_episode() {
    let corpus = generate_corpus(6, 3, &CorpusMix::default()).unwrap();
    for e in &corpus {
        let spec = common::spec_of(&e.chart.svg);
        let (mut a, mut b) = (Policy::default(), Policy::default());
        let ta = run_episode(&mut a, &spec, &config(17, 150, true)).unwrap();
        let tb = run_episode(&mut b, &spec, &config(17, 150, true)).unwrap();
        assert_eq!(ta, tb);
        assert_eq!(a, b);
    }
}

/// Within one visit of a state the normalized rewards add up to the share of
/// the entry cost removed during the visit.
#[test]
fn rewards_telescope() {
    let corpus = generate_corpus(20, 8, &CorpusMix::default()).unwrap();
    let mut visits = 0;
    for (i, e) in corpus.iter().enumerate() {
        let spec = common::spec_of(&e.chart.svg);
        let (_, trace) = run_episode(&mut Policy::default(), &spec, &config(i as u64, 120, true)).unwrap();
        let mut k = 0;
        while k < trace.steps.len() {
            let first = &trace.steps[k];
            let mut j = k;
            while j + 1 < trace.steps.len()
                && trace.steps[j + 1].state == first.state
                && trace.steps[j + 1].entry_cost == first.entry_cost
                && trace.steps[j].cost_after == trace.steps[j + 1].cost_before
            {
                j += 1;
            }
            let sum: f64 = trace.steps[k..=j].iter().map(|r| r.reward).sum();
            let expected = (first.entry_cost - trace.steps[j].cost_after) / first.entry_cost;
            assert!((sum - expected).abs() < 1e-9, "{} steps {k}..={j}", e.name);
            visits += 1;
            k = j + 1;
        }
    }
    assert!(visits > 20);
}
