//! The 23 edits the agent can make to a spec.

mod labels;
mod wrap;

pub use labels::place_labels;
pub use wrap::{wrap_text, wrap_width};

use crate::deconstruct::{
    AxisLayout, DeclarativeSpec, DeconstructError, ElementClass, Orientation, RgTuple, Scale,
};
use crate::deconstruct::render_spec;
use crate::interpret::{exceed_length, IssueNotation, IssueState, Side};
use crate::svg::Rect2D;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const ACTION_COUNT: usize = 23;

/// Scale ranges are never narrowed below this many px.
pub const MIN_RANGE_WIDTH: f64 = 10.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("invalid action id {0} (expected 0..23)")]
    InvalidActionId(usize),
    #[error(transparent)]
    Render(#[from] DeconstructError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionCategory {
    GlobalScale,
    LocalOrRG,
    FontSize,
    TickNumber,
    AnchorSwitch,
    Algorithm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepSize {
    /// Scale and offset increment, px.
    pub delta: f64,
    pub font_step: f64,
    pub tick_step: usize,
}

impl Default for StepSize {
    fn default() -> Self {
        StepSize { delta: 5.0, font_step: 1.0, tick_step: 1 }
    }
}

/// Which quantity an incremental action edits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Target {
    GlobalMin(Orientation),
    GlobalMax(Orientation),
    Offset(Orientation),
    LocalMin,
    LocalMax,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action {
    pub id: usize,
    pub category: ActionCategory,
    /// Short name with `Δ`, `f` or `n` standing for the step amount.
    pub name: &'static str,
}

const CATALOG: [(ActionCategory, &str); ACTION_COUNT] = [
    (ActionCategory::GlobalScale, "x-range-min −Δ"),
    (ActionCategory::GlobalScale, "x-range-min +Δ"),
    (ActionCategory::GlobalScale, "x-range-max −Δ"),
    (ActionCategory::GlobalScale, "x-range-max +Δ"),
    (ActionCategory::GlobalScale, "y-range-min −Δ"),
    (ActionCategory::GlobalScale, "y-range-min +Δ"),
    (ActionCategory::GlobalScale, "y-range-max −Δ"),
    (ActionCategory::GlobalScale, "y-range-max +Δ"),
    (ActionCategory::LocalOrRG, "offset-x −Δ"),
    (ActionCategory::LocalOrRG, "offset-x +Δ"),
    (ActionCategory::LocalOrRG, "offset-y −Δ"),
    (ActionCategory::LocalOrRG, "offset-y +Δ"),
    (ActionCategory::LocalOrRG, "local-range-min −Δ"),
    (ActionCategory::LocalOrRG, "local-range-min +Δ"),
    (ActionCategory::LocalOrRG, "local-range-max −Δ"),
    (ActionCategory::LocalOrRG, "local-range-max +Δ"),
    (ActionCategory::FontSize, "font-size −f"),
    (ActionCategory::FontSize, "font-size +f"),
    (ActionCategory::TickNumber, "tick-count −n"),
    (ActionCategory::TickNumber, "tick-count +n"),
    (ActionCategory::AnchorSwitch, "anchor-switch"),
    (ActionCategory::Algorithm, "place-labels"),
    (ActionCategory::Algorithm, "wrap-text"),
];

impl Action {
    pub fn get(id: usize) -> Option<Action> {
        CATALOG.get(id).map(|&(category, name)| Action { id, category, name })
    }

    pub fn all() -> Vec<Action> {
        (0..ACTION_COUNT).filter_map(Action::get).collect()
    }

    /// Name with step amounts filled in, e.g. `y-range-min −5`.
    pub fn describe(&self, steps: &StepSize) -> String {
        self.name
            .replace('Δ', &crate::svg::fmt_num(steps.delta))
            .replace(" −f", &format!(" −{}", crate::svg::fmt_num(steps.font_step)))
            .replace(" +f", &format!(" +{}", crate::svg::fmt_num(steps.font_step)))
            .replace(" −n", &format!(" −{}", steps.tick_step))
            .replace(" +n", &format!(" +{}", steps.tick_step))
    }

    pub fn label(&self, steps: &StepSize) -> String {
        format!("A{}({})", self.id, self.describe(steps))
    }
}

fn incremental(id: usize) -> Option<(Target, f64)> {
    use Orientation::{Horizontal as H, Vertical as V};
    let sign = if id.is_multiple_of(2) { -1.0 } else { 1.0 };
    let t = match id {
        0 | 1 => Target::GlobalMin(H),
        2 | 3 => Target::GlobalMax(H),
        4 | 5 => Target::GlobalMin(V),
        6 | 7 => Target::GlobalMax(V),
        8 | 9 => Target::Offset(H),
        10 | 11 => Target::Offset(V),
        12 | 13 => Target::LocalMin,
        14 | 15 => Target::LocalMax,
        _ => return None,
    };
    Some((t, sign))
}

/// Move one end of a scale's range, refusing to narrow it below the minimum.
fn nudge_range(scale: &mut Scale, min_end: bool, d: f64) -> bool {
    let (lo, hi) = scale.range();
    let (lo, hi) = if min_end { (lo + d, hi) } else { (lo, hi + d) };
    if hi - lo < MIN_RANGE_WIDTH {
        return false;
    }
    scale.set_range(lo, hi);
    true
}

/// Groups of `class` positioned by reactive geometry along `o` whose anchor
/// is not itself anchored along `o` within the class, so that moving them
/// carries their dependents along.
fn rg_roots(spec: &DeclarativeSpec, class: ElementClass, o: Orientation) -> Vec<usize> {
    spec.groups
        .iter()
        .enumerate()
        .filter(|(_, g)| g.class == class)
        .filter_map(|(i, g)| {
            let rg = g.layout.axis(o).rg()?;
            let anchor = &spec.groups[rg.anchor_group];
            let chained = anchor.class == class && anchor.layout.axis(o).rg().is_some();
            (!chained).then_some(i)
        })
        .collect()
}

/// Axis a tick-count edit applies to for `state`.
fn tick_axis(spec: &DeclarativeSpec, state: &IssueState) -> Option<usize> {
    state
        .axis_hint()
        .and_then(|o| spec.axis(o))
        .or_else(|| spec.axis(Orientation::Horizontal))
        .or_else(|| spec.axis(Orientation::Vertical))
}

/// Axis along which a group's anchoring is switched: the one with a
/// non-centre anchor, vertical first.
fn switch_axis(tuple_h: Option<&RgTuple>, tuple_v: Option<&RgTuple>) -> Option<Orientation> {
    let sided = |t: Option<&RgTuple>| t.is_some_and(|t| !t.p_a.is_center() || !t.p.is_center());
    if sided(tuple_v) {
        Some(Orientation::Vertical)
    } else if sided(tuple_h) {
        Some(Orientation::Horizontal)
    } else if tuple_v.is_some() {
        Some(Orientation::Vertical)
    } else if tuple_h.is_some() {
        Some(Orientation::Horizontal)
    } else {
        None
    }
}

/// Groups of the state's class that take part in its issue: those
/// extending past the viewport side, or text groups with an overlapping
/// member. Every group of the class for other issues.
fn implicated_groups(spec: &DeclarativeSpec, state: &IssueState) -> Result<Vec<bool>, DeconstructError> {
    let n = spec.groups.len();
    let Some(class) = state.class else { return Ok(vec![false; n]) };
    let in_class: Vec<bool> = spec.groups.iter().map(|g| g.class == class).collect();
    let side = match state.notation {
        IssueNotation::LeftOutOfViewport => Some(Side::Left),
        IssueNotation::RightOutOfViewport => Some(Side::Right),
        IssueNotation::TopOutOfViewport => Some(Side::Top),
        IssueNotation::OverlappingText => None,
        _ => return Ok(in_class),
    };
    let r = render_spec(spec)?;
    let mut out = vec![false; n];
    match side {
        Some(side) => {
            for (i, flag) in out.iter_mut().enumerate().filter(|(i, _)| in_class[*i]) {
                *flag = exceed_length(r.visible_boxes(i), spec.viewport, side) > 0.0;
            }
        }
        None => {
            let texts: Vec<(usize, Rect2D)> = (0..n)
                .filter(|&i| in_class[i] && spec.groups[i].is_text())
                .flat_map(|i| r.visible_boxes(i).map(move |b| (i, b)))
                .collect();
            for (k, (gi, a)) in texts.iter().enumerate() {
                for (gj, b) in &texts[k + 1..] {
                    if a.intersection_area(b) > 0.0 {
                        out[*gi] = true;
                        out[*gj] = true;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Tuple for step `cycle` of the anchor-switch sequence starting at `base`.
/// Sided anchors alternate with their mirror image; centred anchors visit
/// before, after, then centre again.
pub fn switched_tuple(base: RgTuple, cycle: u8) -> RgTuple {
    let gap = if base.offset == 0.0 { 3.0 } else { base.offset.abs() };
    if base.p_a.is_center() && base.p.is_center() {
        let (lo, hi) = base.p.sides();
        match cycle % 3 {
            0 => base,
            1 => RgTuple { p: hi, p_a: lo, offset: -gap },
            _ => RgTuple { p: lo, p_a: hi, offset: gap },
        }
    } else if cycle.is_multiple_of(2) {
        base
    } else {
        RgTuple { p: base.p.opposite(), p_a: base.p_a.opposite(), offset: -base.offset }
    }
}

/// Apply action `id` to `spec` in the context of the active `state`.
/// Inapplicable actions return an unchanged copy.
pub fn apply_action(
    spec: &DeclarativeSpec,
    id: usize,
    state: &IssueState,
    steps: &StepSize,
) -> Result<DeclarativeSpec, ActionError> {
    if id >= ACTION_COUNT {
        return Err(ActionError::InvalidActionId(id));
    }
    let mut out = spec.clone();
    let class = state.class;

    if let Some((target, sign)) = incremental(id) {
        let d = sign * steps.delta;
        match target {
            Target::GlobalMin(o) => {
                nudge_range(out.scale_mut(o), true, d);
            }
            Target::GlobalMax(o) => {
                nudge_range(out.scale_mut(o), false, d);
            }
            Target::Offset(o) => {
                let Some(class) = class else { return Ok(out) };
                for g in rg_roots(spec, class, o) {
                    let group = &mut out.groups[g];
                    if let Some(rg) = group.layout.axis_mut(o).rg_mut() {
                        rg.tuple.offset += d;
                    }
                    for p in group.placements.values_mut() {
                        match o {
                            Orientation::Horizontal => p.horizontal.offset += d,
                            Orientation::Vertical => p.vertical.offset += d,
                        }
                    }
                }
            }
            Target::LocalMin | Target::LocalMax => {
                let Some(class) = class else { return Ok(out) };
                for g in out.groups.iter_mut().filter(|g| g.class == class) {
                    for o in [Orientation::Horizontal, Orientation::Vertical] {
                        if let AxisLayout::LocalScale { scale, .. } = g.layout.axis_mut(o) {
                            nudge_range(scale, target == Target::LocalMin, d);
                        }
                    }
                }
            }
        }
        return Ok(out);
    }

    match id {
        16 | 17 => {
            let Some(class) = class else { return Ok(out) };
            let d = if id == 16 { -steps.font_step } else { steps.font_step };
            let texts = out.groups.iter().filter(|g| g.class == class && g.font_size.is_some());
            if texts.clone().any(|g| g.font_size.unwrap() + d < 1.0) {
                return Ok(out);
            }
            for g in out.groups.iter_mut().filter(|g| g.class == class) {
                if let Some(fs) = g.font_size.as_mut() {
                    *fs += d;
                }
            }
        }
        18 | 19 => {
            let Some(ai) = tick_axis(spec, state) else { return Ok(out) };
            let o = out.axes[ai].orientation;
            let max = out.axes[ai].max_ticks(out.base_scale(o)).max(2);
            let axis = &mut out.axes[ai];
            let n = axis.tick_count as i64 + if id == 18 { -(steps.tick_step as i64) } else { steps.tick_step as i64 };
            if n >= 2 && n as usize <= max {
                axis.tick_count = n as usize;
            }
        }
        20 => {
            let Some(class) = class else { return Ok(out) };
            let involved = implicated_groups(spec, state)?;
            for (g, _) in out.groups.iter_mut().zip(involved).filter(|(g, inv)| *inv && g.class == class) {
                let h = g.layout.horizontal.rg().map(|r| &r.base_tuple);
                let v = g.layout.vertical.rg().map(|r| &r.base_tuple);
                let Some(o) = switch_axis(h, v) else { continue };
                if let Some(rg) = g.layout.axis_mut(o).rg_mut() {
                    rg.cycle = (rg.cycle + 1) % if rg.base_tuple.p.is_center() && rg.base_tuple.p_a.is_center() { 3 } else { 2 };
                    rg.tuple = switched_tuple(rg.base_tuple, rg.cycle);
                }
            }
        }
        21 => {
            let Some(class) = class else { return Ok(out) };
            out = place_labels(&out, class)?;
        }
        22 => {
            let Some(class) = class else { return Ok(out) };
            out = wrap_text(&out, class)?;
        }
        _ => unreachable!("incremental ids handled above"),
    }
    Ok(out)
}
