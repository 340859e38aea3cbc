//! Mobile-friendliness costs over a rendered spec and the greedy choice of
//! which issue to work on next.

use crate::deconstruct::{render_spec, DeclarativeSpec, DeconstructError, ElementClass, Orientation, Rendered};
use crate::svg::{Rect2D, Viewport};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Number of issue states: 3 global plus 5 local notations for each of 5 classes.
pub const STATE_COUNT: usize = 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueScope {
    Global,
    Local,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IssueNotation {
    LeftMargin,
    RightMargin,
    TopMargin,
    LeftOutOfViewport,
    RightOutOfViewport,
    TopOutOfViewport,
    FontSize,
    OverlappingText,
}

impl IssueNotation {
    pub const GLOBAL: [IssueNotation; 3] = [IssueNotation::LeftMargin, IssueNotation::RightMargin, IssueNotation::TopMargin];
    pub const LOCAL: [IssueNotation; 5] = [
        IssueNotation::LeftOutOfViewport,
        IssueNotation::RightOutOfViewport,
        IssueNotation::TopOutOfViewport,
        IssueNotation::FontSize,
        IssueNotation::OverlappingText,
    ];

    pub fn scope(self) -> IssueScope {
        if Self::GLOBAL.contains(&self) {
            IssueScope::Global
        } else {
            IssueScope::Local
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            IssueNotation::LeftMargin => "LeftMargin",
            IssueNotation::RightMargin => "RightMargin",
            IssueNotation::TopMargin => "TopMargin",
            IssueNotation::LeftOutOfViewport => "LeftOutOfViewport",
            IssueNotation::RightOutOfViewport => "RightOutOfViewport",
            IssueNotation::TopOutOfViewport => "TopOutOfViewport",
            IssueNotation::FontSize => "FontSize",
            IssueNotation::OverlappingText => "OverlappingText",
        }
    }
}

/// Viewport side an out-of-viewport or margin cost is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
    Top,
}

/// One MDP state: an issue, scoped to a class for local issues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IssueState {
    pub notation: IssueNotation,
    pub class: Option<ElementClass>,
    /// Position in the greedy order, 0..28.
    pub index: usize,
}

impl IssueState {
    /// All states in greedy order: top, left and right margins; then the
    /// three out-of-viewport sides per class; then font size per class;
    /// then overlapping text per class.
    pub fn all() -> Vec<IssueState> {
        let mut out = Vec::with_capacity(STATE_COUNT);
        for n in [IssueNotation::TopMargin, IssueNotation::LeftMargin, IssueNotation::RightMargin] {
            out.push((n, None));
        }
        for c in ElementClass::ALL {
            for n in [IssueNotation::LeftOutOfViewport, IssueNotation::RightOutOfViewport, IssueNotation::TopOutOfViewport] {
                out.push((n, Some(c)));
            }
        }
        for n in [IssueNotation::FontSize, IssueNotation::OverlappingText] {
            for c in ElementClass::ALL {
                out.push((n, Some(c)));
            }
        }
        out.into_iter().enumerate().map(|(index, (notation, class))| IssueState { notation, class, index }).collect()
    }

    pub fn from_index(i: usize) -> Option<IssueState> {
        Self::all().get(i).copied()
    }

    pub fn from_name(name: &str) -> Option<IssueState> {
        Self::all().into_iter().find(|s| s.name() == name)
    }

    /// `TopMargin`, `FontSize@Axis`, ...
    pub fn name(&self) -> String {
        match self.class {
            None => self.notation.name().to_string(),
            Some(c) => format!("{}@{}", self.notation.name(), c.name()),
        }
    }

    /// Scale axis an action on this state should touch (for tick-count edits).
    pub fn axis_hint(&self) -> Option<Orientation> {
        match self.notation {
            IssueNotation::TopMargin | IssueNotation::TopOutOfViewport => Some(Orientation::Vertical),
            IssueNotation::LeftMargin
            | IssueNotation::RightMargin
            | IssueNotation::LeftOutOfViewport
            | IssueNotation::RightOutOfViewport => Some(Orientation::Horizontal),
            IssueNotation::FontSize | IssueNotation::OverlappingText => None,
        }
    }
}

impl fmt::Display for IssueState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// Minimum readable font size τ, px.
    pub min_font_size: f64,
    /// Allowed left/right whitespace, px.
    pub margin_horizontal: f64,
    /// Allowed top whitespace, px.
    pub margin_top: f64,
}

impl Thresholds {
    /// τ = 12 px and 10% of the viewport dimension for margins.
    pub fn for_viewport(v: Viewport) -> Thresholds {
        Thresholds { min_font_size: 12.0, margin_horizontal: 0.1 * v.width, margin_top: 0.1 * v.height }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    /// Cost per state, indexed by greedy order.
    pub costs: Vec<f64>,
    pub total: f64,
    pub active: Option<IssueState>,
}

impl CostReport {
    pub fn solved(&self) -> bool {
        self.active.is_none()
    }

    pub fn cost(&self, s: &IssueState) -> f64 {
        self.costs[s.index]
    }
}

/// Largest distance any box extends past `side` of the viewport.
pub fn exceed_length(boxes: impl IntoIterator<Item = Rect2D>, viewport: Viewport, side: Side) -> f64 {
    boxes
        .into_iter()
        .map(|b| match side {
            Side::Left => -b.x_min,
            Side::Right => b.x_max - viewport.width,
            Side::Top => -b.y_min,
        })
        .fold(0.0, f64::max)
}

/// Whitespace beyond `threshold` between the viewport edge and the content.
pub fn margin_excess(content: Option<Rect2D>, viewport: Viewport, threshold: f64, side: Side) -> f64 {
    let Some(c) = content else { return 0.0 };
    let margin = match side {
        Side::Left => c.x_min,
        Side::Right => viewport.width - c.x_max,
        Side::Top => c.y_min,
    };
    (margin - threshold).max(0.0)
}

/// Mean shortfall of font sizes below `tau`.
pub fn font_deficit(sizes: &[f64], tau: f64) -> f64 {
    if sizes.is_empty() {
        return 0.0;
    }
    sizes.iter().map(|s| (tau - s).max(0.0)).sum::<f64>() / sizes.len() as f64
}

/// Sum of pairwise intersection areas.
pub fn overlap_area(boxes: &[Rect2D]) -> f64 {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    order.sort_by(|&a, &b| boxes[a].x_min.total_cmp(&boxes[b].x_min));
    let mut total = 0.0;
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if boxes[j].x_min >= boxes[i].x_max {
                break;
            }
            total += boxes[i].intersection_area(&boxes[j]);
        }
    }
    total
}

fn class_boxes<'a>(spec: &'a DeclarativeSpec, r: &'a Rendered, class: ElementClass) -> impl Iterator<Item = Rect2D> + 'a {
    spec.groups.iter().enumerate().filter(move |(_, g)| g.class == class).flat_map(move |(i, _)| r.visible_boxes(i))
}

fn class_text_boxes(spec: &DeclarativeSpec, r: &Rendered, class: ElementClass) -> Vec<Rect2D> {
    spec.groups
        .iter()
        .enumerate()
        .filter(|(_, g)| g.class == class && g.is_text())
        .flat_map(|(i, _)| r.visible_boxes(i))
        .collect()
}

fn class_font_sizes(spec: &DeclarativeSpec, r: &Rendered, class: ElementClass) -> Vec<f64> {
    let mut out = Vec::new();
    for (i, g) in spec.groups.iter().enumerate() {
        if g.class != class || !g.is_text() {
            continue;
        }
        for (id, b) in r.members[i].iter().zip(&r.boxes[i]) {
            if b.is_some() {
                if let Some(e) = r.document.get(id) {
                    out.push(e.font_size());
                }
            }
        }
    }
    out
}

pub fn cost_out_of_viewport(spec: &DeclarativeSpec, r: &Rendered, class: ElementClass, side: Side) -> f64 {
    exceed_length(class_boxes(spec, r, class), spec.viewport, side)
}

pub fn cost_white_space(spec: &DeclarativeSpec, r: &Rendered, t: &Thresholds, side: Side) -> f64 {
    let threshold = if side == Side::Top { t.margin_top } else { t.margin_horizontal };
    margin_excess(r.extent(), spec.viewport, threshold, side)
}

pub fn cost_font_size(spec: &DeclarativeSpec, r: &Rendered, class: ElementClass, tau: f64) -> f64 {
    font_deficit(&class_font_sizes(spec, r, class), tau)
}

pub fn cost_overlap(spec: &DeclarativeSpec, r: &Rendered, class: ElementClass) -> f64 {
    overlap_area(&class_text_boxes(spec, r, class))
}

/// Cost of one state on an already rendered spec.
pub fn state_cost(spec: &DeclarativeSpec, r: &Rendered, state: &IssueState, t: &Thresholds) -> f64 {
    let side = |n: IssueNotation| match n {
        IssueNotation::LeftMargin | IssueNotation::LeftOutOfViewport => Side::Left,
        IssueNotation::RightMargin | IssueNotation::RightOutOfViewport => Side::Right,
        _ => Side::Top,
    };
    match (state.notation, state.class) {
        (n @ (IssueNotation::LeftMargin | IssueNotation::RightMargin | IssueNotation::TopMargin), _) => {
            cost_white_space(spec, r, t, side(n))
        }
        (IssueNotation::FontSize, Some(c)) => cost_font_size(spec, r, c, t.min_font_size),
        (IssueNotation::OverlappingText, Some(c)) => cost_overlap(spec, r, c),
        (n, Some(c)) => cost_out_of_viewport(spec, r, c, side(n)),
        (_, None) => 0.0,
    }
}

/// Costs of all states and the first nonzero one in greedy order.
pub fn report(spec: &DeclarativeSpec, r: &Rendered, t: &Thresholds) -> CostReport {
    let costs: Vec<f64> = IssueState::all().iter().map(|s| state_cost(spec, r, s, t)).collect();
    let active = costs.iter().position(|&c| c > 0.0).and_then(IssueState::from_index);
    CostReport { total: costs.iter().sum(), costs, active }
}

/// Render `spec` and report its costs.
pub fn detect_state(spec: &DeclarativeSpec, t: &Thresholds) -> Result<(CostReport, Rendered), DeconstructError> {
    let r = render_spec(spec)?;
    Ok((report(spec, &r, t), r))
}

#[cfg(test)]
mod tests {
    use super::*;

    const VP: Viewport = Viewport { width: 375.0, height: 812.0 };

    #[test]
    fn twenty_eight_states_in_order() {
        let all = IssueState::all();
        assert_eq!(all.len(), STATE_COUNT);
        assert_eq!(all[0].name(), "TopMargin");
        assert_eq!(all[1].name(), "LeftMargin");
        assert_eq!(all[3].name(), "LeftOutOfViewport@Title");
        assert_eq!(all[18].name(), "FontSize@Title");
        assert_eq!(all[27].name(), "OverlappingText@Label");
        assert_eq!(IssueNotation::GLOBAL.len(), 3);
        assert_eq!(IssueNotation::LOCAL.len(), 5);
        for s in &all {
            assert_eq!(IssueState::from_name(&s.name()), Some(*s));
        }
    }

    #[test]
    fn right_overflow_by_25() {
        let b = Rect2D::new(300.0, 10.0, 400.0, 20.0);
        assert_eq!(exceed_length([b], VP, Side::Right), 25.0);
        assert_eq!(exceed_length([b], VP, Side::Left), 0.0);
    }

    #[test]
    fn inside_boxes_cost_nothing() {
        let b = Rect2D::new(0.0, 0.0, 375.0, 900.0);
        for side in [Side::Left, Side::Right, Side::Top] {
            assert_eq!(exceed_length([b], VP, side), 0.0);
        }
    }

    #[test]
    fn label_above_top_edge() {
        assert_eq!(exceed_length([Rect2D::new(10.0, -8.0, 20.0, 4.0)], VP, Side::Top), 8.0);
    }

    #[test]
    fn left_margin_excess() {
        let c = Some(Rect2D::new(80.0, 10.0, 300.0, 100.0));
        assert_eq!(margin_excess(c, VP, 37.5, Side::Left), 42.5);
        let at = Some(Rect2D::new(37.5, 10.0, 300.0, 100.0));
        assert_eq!(margin_excess(at, VP, 37.5, Side::Left), 0.0);
        let over = Some(Rect2D::new(-5.0, 10.0, 300.0, 100.0));
        assert_eq!(margin_excess(over, VP, 37.5, Side::Left), 0.0);
    }

    #[test]
    fn font_deficit_examples() {
        assert!((font_deficit(&[8.0, 12.0, 16.0], 12.0) - 4.0 / 3.0).abs() < 1e-9);
        assert_eq!(font_deficit(&[12.0, 14.0], 12.0), 0.0);
        assert_eq!(font_deficit(&[6.0], 12.0), 6.0);
    }

    #[test]
    fn overlap_examples() {
        let a = Rect2D::new(0.0, 0.0, 20.0, 10.0);
        assert_eq!(overlap_area(&[a, a.translated(10.0, 0.0)]), 100.0);
        assert_eq!(overlap_area(&[a, a.translated(30.0, 0.0)]), 0.0);
        assert_eq!(overlap_area(&[a, a, a]), 600.0);
    }
}
