mod common;

use common::{max_bbox_shift, recipe_spec, spec_of, state, thresholds};
use vizmend::actions::{apply_action, place_labels, Action, StepSize};
use vizmend::corpus::{generate_corpus, ChartKind, ChartRecipe, CorpusMix, Defect};
use vizmend::deconstruct::{render_spec, ElementClass, Orientation};
use vizmend::interpret::{cost_overlap, detect_state, IssueNotation, IssueState};
use vizmend::svg::VisualElement;

const STEPS: StepSize = StepSize { delta: 5.0, font_step: 1.0, tick_step: 1 };

fn y_axis_chart() -> String {
    let mut svg = String::from(
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="375" height="300" font-family="sans-serif">
  <g class="axis x-axis">
    <line id="x-domain" class="domain" x1="60" y1="250" x2="360" y2="250" stroke="#333"/>"##,
    );
    for (i, (x, name)) in [(110.0, "A"), (210.0, "B"), (310.0, "C")].iter().enumerate() {
        svg += &format!(
            r##"<line id="x-tick-{i}" class="tick" x1="{x}" y1="250" x2="{x}" y2="256" stroke="#333"/>
<text id="x-label-{i}" class="tick-label" x="{x}" y="262" dy="0.71em" text-anchor="middle" font-size="12" fill="#333">{name}</text>"##
        );
    }
    svg += r##"</g><g class="axis y-axis"><line id="y-domain" class="domain" x1="60" y1="50" x2="60" y2="250" stroke="#333"/>"##;
    for (i, v) in [0, 25, 50, 75, 100].iter().enumerate() {
        let y = 250.0 - 2.0 * *v as f64;
        svg += &format!(
            r##"<line id="y-tick-{i}" class="tick" x1="54" y1="{y}" x2="60" y2="{y}" stroke="#333"/>
<text id="y-label-{i}" class="tick-label" x="51" y="{y}" dy="0.32em" text-anchor="end" font-size="12" fill="#333">{v}</text>"##
        );
    }
    svg += r##"</g><g class="marks">
    <rect id="bar-0" class="bar" x="90" y="150" width="40" height="100" fill="#4e79a7"/>
    <rect id="bar-1" class="bar" x="190" y="90" width="40" height="160" fill="#4e79a7"/>
    <rect id="bar-2" class="bar" x="290" y="130" width="40" height="120" fill="#4e79a7"/>
  </g></svg>"##;
    svg
}

#[test]
fn x_range_min_step() {
    let mut spec = spec_of(&y_axis_chart());
    spec.x_scale.set_range(40.0, 400.0);
    let out = apply_action(&spec, 0, &state("LeftMargin"), &STEPS).unwrap();
    assert_eq!(out.x_scale.range(), (35.0, 400.0));
    assert_eq!(out.y_scale, spec.y_scale);
}

#[test]
fn x_range_step_only_touches_layout_attributes() {
    let spec = spec_of(&y_axis_chart());
    let out = apply_action(&spec, 0, &state("LeftMargin"), &STEPS).unwrap();
    let before = render_spec(&spec).unwrap().document;
    let after = render_spec(&out).unwrap().document;
    let layout = ["x", "y", "x1", "x2", "y1", "y2", "width", "height", "cx", "cy", "d", "dx", "dy", "transform"];
    for id in before.document_order() {
        let (a, b): (&VisualElement, &VisualElement) = (before.get(&id).unwrap(), after.get(&id).unwrap());
        assert_eq!(a.text_lines(), b.text_lines());
        for (name, value) in &a.attributes {
            if !layout.contains(&name.as_str()) {
                assert_eq!(Some(value), b.attributes.get(name), "{id:?} {name}");
            }
        }
    }
}

#[test]
fn font_steps_cancel() {
    for e in generate_corpus(27, 5, &CorpusMix::default()).unwrap() {
        let spec = common::spec_of(&e.chart.svg);
        for class in ElementClass::ALL {
            let s = IssueState::all().into_iter().find(|s| s.notation == IssueNotation::FontSize && s.class == Some(class)).unwrap();
            let down = apply_action(&spec, 16, &s, &STEPS).unwrap();
            let back = apply_action(&down, 17, &s, &STEPS).unwrap();
            let a = render_spec(&spec).unwrap().document;
            let b = render_spec(&back).unwrap().document;
            assert!(max_bbox_shift(&a, &b) <= 1e-6, "{} {class:?}", e.name);
        }
    }
}

#[test]
fn extra_tick_regenerates_evenly() {
    let spec = spec_of(&y_axis_chart());
    let y = &spec.axes[spec.axis(Orientation::Vertical).unwrap()];
    assert_eq!(y.tick_count, 5);
    let out = apply_action(&spec, 19, &state("TopMargin"), &STEPS).unwrap();
    let r = render_spec(&out).unwrap();
    let labels = out.axes[out.axis(Orientation::Vertical).unwrap()].labels;
    let mut ticks: Vec<(f64, String)> = r.members[labels]
        .iter()
        .zip(&r.boxes[labels])
        .filter_map(|(id, b)| b.map(|b| (b.center().1, r.document.get(id).unwrap().text_lines().concat())))
        .collect();
    ticks.sort_by(|a, b| b.0.total_cmp(&a.0));
    let texts: Vec<&str> = ticks.iter().map(|t| t.1.as_str()).collect();
    assert_eq!(texts, ["0", "20", "40", "60", "80", "100"]);
    let first = ticks[0].0;
    for (k, (y, _)) in ticks.iter().enumerate() {
        assert!((y - (first - 40.0 * k as f64)).abs() < 1e-6, "tick {k} at {y}");
    }
}

#[test]
fn placing_labels_clears_overlaps() {
    let mut r = ChartRecipe::clean(ChartKind::Bar, 12, 8);
    r.large_values = true;
    let spec = recipe_spec(&r.with_defect(Defect::OverlappingText { class: ElementClass::Label }));
    let before = render_spec(&spec).unwrap();
    assert!(cost_overlap(&spec, &before, ElementClass::Label) > 0.0);
    let placed = place_labels(&spec, ElementClass::Label).unwrap();
    let after = render_spec(&placed).unwrap();
    assert_eq!(cost_overlap(&placed, &after, ElementClass::Label), 0.0);
    let li = placed.groups.iter().position(|g| g.class == ElementClass::Label).unwrap();
    assert!(after.visible_boxes(li).count() >= 1);
}

#[test]
fn two_colliding_labels_both_stay_visible() {
    let svg = r##"<svg xmlns="http://www.w3.org/2000/svg" width="375" height="300" font-family="sans-serif">
  <g class="marks">
    <rect id="bar-0" class="bar" x="100" y="100" width="20" height="150" fill="#4e79a7"/>
    <rect id="bar-1" class="bar" x="122" y="200" width="20" height="50" fill="#4e79a7"/>
  </g>
  <g class="labels">
    <text id="label-0" class="value" x="110" y="96" text-anchor="middle" font-size="12">12345</text>
    <text id="label-1" class="value" x="132" y="96" text-anchor="middle" font-size="12">6789</text>
  </g></svg>"##;
    let spec = spec_of(svg);
    let li = spec.groups.iter().position(|g| g.class == ElementClass::Label).expect("label group");
    assert!(cost_overlap(&spec, &render_spec(&spec).unwrap(), ElementClass::Label) > 0.0);
    let placed = place_labels(&spec, ElementClass::Label).unwrap();
    let r = render_spec(&placed).unwrap();
    assert_eq!(cost_overlap(&placed, &r, ElementClass::Label), 0.0);
    assert_eq!(r.visible_boxes(li).count(), 2);
}

#[test]
fn clean_chart_is_left_alone_by_label_placement() {
    let spec = recipe_spec(&ChartRecipe::clean(ChartKind::Bar, 5, 2));
    assert_eq!(place_labels(&spec, ElementClass::Label).unwrap(), spec);
}

#[test]
fn dense_labels_hide_rather_than_overlap() {
    let mut svg = String::from(r##"<svg xmlns="http://www.w3.org/2000/svg" width="375" height="300" font-family="sans-serif"><g class="marks">"##);
    for i in 0..20 {
        svg += &format!(r##"<rect id="bar-{i}" class="bar" x="{}" y="20" width="8" height="270" fill="#4e79a7"/>"##, 20 + 9 * i);
    }
    svg += r#"</g><g class="labels">"#;
    for i in 0..20 {
        svg += &format!(r#"<text id="label-{i}" class="value" x="{}" y="16" text-anchor="middle" font-size="12">100000</text>"#, 24 + 9 * i);
    }
    svg += "</g></svg>";
    let spec = spec_of(&svg);
    let placed = place_labels(&spec, ElementClass::Label).unwrap();
    let r = render_spec(&placed).unwrap();
    let li = placed.groups.iter().position(|g| g.class == ElementClass::Label).unwrap();
    assert_eq!(cost_overlap(&placed, &r, ElementClass::Label), 0.0);
    assert!(r.visible_boxes(li).count() < 20);
    assert!(!placed.groups[li].hidden.is_empty());
}

#[test]
fn every_action_keeps_the_spec_renderable() {
    let t = thresholds();
    for e in generate_corpus(12, 9, &CorpusMix::default()).unwrap() {
        let spec = common::spec_of(&e.chart.svg);
        for s in IssueState::all() {
            for a in Action::all() {
                let out = apply_action(&spec, a.id, &s, &STEPS).unwrap();
                let (report, _) = detect_state(&out, &t).unwrap();
                assert!(report.total.is_finite(), "{} {} {}", e.name, s.name(), a.id);
            }
        }
    }
    assert!(apply_action(&common::spec_of(&y_axis_chart()), 23, &state("TopMargin"), &STEPS).is_err());
}
