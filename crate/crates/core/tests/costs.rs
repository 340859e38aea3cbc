mod common;

use common::{recipe_spec, state, thresholds};
use proptest::prelude::*;
use vizmend::actions::{apply_action, StepSize};
use vizmend::corpus::{generate, generate_corpus, ChartKind, ChartRecipe, CorpusMix, Defect};
use vizmend::deconstruct::{render_spec, ElementClass};
use vizmend::interpret::{cost_font_size, cost_out_of_viewport, detect_state, font_deficit, state_cost, IssueState, Side};

#[test]
fn clean_chart_has_no_active_state() {
    let (report, _) = detect_state(&recipe_spec(&ChartRecipe::clean(ChartKind::Scatter, 30, 4)), &thresholds()).unwrap();
    assert_eq!(report.active, None);
    assert_eq!(report.total, 0.0);
}

#[test]
fn margins_come_before_text_issues() {
    let mut r = ChartRecipe::clean(ChartKind::Bar, 7, 3);
    r.long_labels = true;
    let r = r
        .with_defect(Defect::WhiteSpace { side: Side::Left, excess: 20.0 })
        .with_defect(Defect::OverlappingText { class: ElementClass::Axis });
    let (report, _) = detect_state(&recipe_spec(&r), &thresholds()).unwrap();
    assert!(report.cost(&state("OverlappingText@Axis")) > 0.0);
    assert_eq!(report.active, Some(state("LeftMargin")));
}

#[test]
fn label_collisions_alone_select_the_label_state() {
    let mut r = ChartRecipe::clean(ChartKind::Bar, 12, 8);
    r.large_values = true;
    let (report, _) =
        detect_state(&recipe_spec(&r.with_defect(Defect::OverlappingText { class: ElementClass::Label })), &thresholds()).unwrap();
    assert_eq!(report.active, Some(state("OverlappingText@Label")));
}

#[test]
fn right_overflow_of_bars() {
    let r = ChartRecipe::clean(ChartKind::Bar, 12, 2).with_defect(Defect::OutOfViewport { side: Side::Right, amount: 30.0 });
    let spec = recipe_spec(&r);
    let rendered = render_spec(&spec).unwrap();
    let per_class: Vec<f64> = ElementClass::ALL.iter().map(|&c| cost_out_of_viewport(&spec, &rendered, c, Side::Right)).collect();
    // the axis line spans the outer band padding, so it sticks out furthest
    assert!((per_class.iter().copied().fold(0.0, f64::max) - 30.0).abs() < 1e-6);
    let mark = cost_out_of_viewport(&spec, &rendered, ElementClass::Mark, Side::Right);
    let band = spec.x_scale.range().1 - spec.x_scale.range().0;
    assert!(mark > 30.0 - band / 12.0 && mark <= 30.0);
}

#[test]
fn small_axis_font() {
    let r = ChartRecipe::clean(ChartKind::Line, 6, 2).with_defect(Defect::SmallFont { class: ElementClass::Axis, size: 8.0 });
    let spec = recipe_spec(&r);
    let rendered = render_spec(&spec).unwrap();
    assert_eq!(cost_font_size(&spec, &rendered, ElementClass::Axis, 12.0), 4.0);
}

/// Compressing the plot vertically shrinks the area a horizontally
/// overflowing element covers outside the viewport, but not how far it sticks out.
#[test]
fn height_compression_never_lowers_horizontal_overflow() {
    let steps = StepSize::default();
    let mut checked = 0;
    for e in generate_corpus(81, 21, &CorpusMix::default()).unwrap() {
        let spec = common::spec_of(&e.chart.svg);
        let overflow: Vec<IssueState> = IssueState::all()
            .into_iter()
            .filter(|s| matches!(s.class, Some(ElementClass::Mark | ElementClass::Label)))
            .filter(|s| s.name().starts_with("LeftOutOfViewport") || s.name().starts_with("RightOutOfViewport"))
            .filter(|s| e.chart.manifest.expected_cost(s) > 0.0)
            .collect();
        for s in overflow {
            let (before, _) = detect_state(&spec, &thresholds()).unwrap();
            let mut squeezed = spec.clone();
            for _ in 0..20 {
                squeezed = apply_action(&squeezed, 5, &s, &steps).unwrap();
                squeezed = apply_action(&squeezed, 6, &s, &steps).unwrap();
                let r = render_spec(&squeezed).unwrap();
                assert!(state_cost(&squeezed, &r, &s, &thresholds()) >= before.cost(&s) - 1e-9, "{} {}", e.name, s.name());
            }
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn hiding_small_texts_keeps_the_font_cost() {
    let mut r = ChartRecipe::clean(ChartKind::Bar, 8, 6);
    r.value_labels = true;
    let spec = recipe_spec(&r.with_defect(Defect::SmallFont { class: ElementClass::Label, size: 9.0 }));
    let li = spec.groups.iter().position(|g| g.class == ElementClass::Label).unwrap();
    let members = spec.groups[li].members.clone();
    for k in 0..members.len() {
        let mut hidden = spec.clone();
        hidden.groups[li].hidden.extend(members[..k].iter().cloned());
        let rendered = render_spec(&hidden).unwrap();
        assert_eq!(cost_font_size(&hidden, &rendered, ElementClass::Label, 12.0), 3.0, "{k} hidden");
    }
}

#[test]
fn label_placement_never_lowers_font_cost() {
    let steps = StepSize::default();
    for e in generate_corpus(81, 31, &CorpusMix::default()).unwrap() {
        let spec = common::spec_of(&e.chart.svg);
        for class in ElementClass::ALL {
            let before = cost_font_size(&spec, &render_spec(&spec).unwrap(), class, 12.0);
            let out = apply_action(&spec, 21, &state(&format!("OverlappingText@{}", class.name())), &steps).unwrap();
            let after = cost_font_size(&out, &render_spec(&out).unwrap(), class, 12.0);
            assert!(after >= before - 1e-9, "{} {class:?}", e.name);
        }
    }
}

#[test]
fn seeded_defects_are_measured() {
    let t = thresholds();
    for e in generate_corpus(81, 41, &CorpusMix::default()).unwrap() {
        let (report, _) = detect_state(&common::spec_of(&e.chart.svg), &t).unwrap();
        for d in &e.chart.manifest.defects {
            for name in &d.states {
                assert!(report.cost(&state(name)) > 0.0, "{} {name}", e.name);
            }
        }
        if e.chart.manifest.defects.is_empty() {
            assert!(report.solved(), "{}", e.name);
        }
    }
}

proptest! {
    /// Removing texts from a class never brings the mean deficit below that
    /// of its least deficient text.
    #[test]
    fn mean_deficit_bounded_by_smallest(sizes in prop::collection::vec(4.0f64..20.0, 1..30), keep in prop::collection::vec(any::<bool>(), 30)) {
        let kept: Vec<f64> = sizes.iter().zip(&keep).filter(|(_, k)| **k).map(|(s, _)| *s).collect();
        prop_assume!(!kept.is_empty());
        let floor = sizes.iter().map(|s| (12.0 - s).max(0.0)).fold(f64::INFINITY, f64::min);
        prop_assert!(font_deficit(&kept, 12.0) >= floor - 1e-12);
    }

    #[test]
    fn uniform_sizes_ignore_deletion(size in 4.0f64..12.0, n in 1usize..40, k in 1usize..40) {
        let all = vec![size; n];
        let some = vec![size; k.min(n)];
        prop_assert!((font_deficit(&all, 12.0) - font_deficit(&some, 12.0)).abs() < 1e-12);
    }
}

#[test]
fn generator_examples_are_valid() {
    assert!(generate(&ChartRecipe::clean(ChartKind::Bar, 0, 1)).is_err());
}
