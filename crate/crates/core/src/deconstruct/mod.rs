//! Recovers a declarative chart specification from an SVG document model:
//! visual groups, axes and scales, and the layout dependencies between groups.

mod anchor;
mod axes;
mod groups;
mod render;

pub use anchor::{infer_reactive_geometry, RgCandidate};
pub use axes::{detect_axes, infer_scale, AxisCandidate};
pub use groups::{detect_groups, RawGroup, SignatureEntry};
pub use render::{render_spec, wrap_words, Rendered};

use crate::svg::{DocumentModel, ElementId, ElementKind, Rect2D, TextMetricsConfig, Viewport};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;
use thiserror::Error;

pub const SPEC_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeconstructError {
    #[error("document has no visible elements")]
    EmptyDocument,
    #[error("unsupported chart: {0}")]
    UnsupportedChart(String),
    #[error("degenerate scale: all ticks at one position")]
    DegenerateScale,
    #[error("cyclic layout dependency involving group g{0}")]
    CyclicDependency(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementClass {
    Title,
    Axis,
    Legend,
    Mark,
    Label,
}

impl ElementClass {
    pub const ALL: [ElementClass; 5] =
        [ElementClass::Title, ElementClass::Axis, ElementClass::Legend, ElementClass::Mark, ElementClass::Label];

    pub fn name(self) -> &'static str {
        match self {
            ElementClass::Title => "Title",
            ElementClass::Axis => "Axis",
            ElementClass::Legend => "Legend",
            ElementClass::Mark => "Mark",
            ElementClass::Label => "Label",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    TitleText,
    AxisTick,
    AxisLabel,
    AxisLine,
    AxisTitle,
    Grid,
    LegendShape,
    LegendText,
    Shape,
    LabelText,
}

impl GroupKind {
    pub const ALL: [GroupKind; 10] = [
        GroupKind::TitleText,
        GroupKind::AxisTick,
        GroupKind::AxisLabel,
        GroupKind::AxisLine,
        GroupKind::AxisTitle,
        GroupKind::Grid,
        GroupKind::LegendShape,
        GroupKind::LegendText,
        GroupKind::Shape,
        GroupKind::LabelText,
    ];

    pub fn class(self) -> ElementClass {
        match self {
            GroupKind::TitleText => ElementClass::Title,
            GroupKind::AxisTick
            | GroupKind::AxisLabel
            | GroupKind::AxisLine
            | GroupKind::AxisTitle
            | GroupKind::Grid => ElementClass::Axis,
            GroupKind::LegendShape | GroupKind::LegendText => ElementClass::Legend,
            GroupKind::Shape => ElementClass::Mark,
            GroupKind::LabelText => ElementClass::Label,
        }
    }

    /// Whether members are laid out rigidly (moved, never resized) under a
    /// scale change.
    pub fn is_rigid(self) -> bool {
        !matches!(self, GroupKind::Shape | GroupKind::Grid | GroupKind::AxisLine)
    }

    /// Adjustable parameters per kind, with the SVG attributes each controls.
    pub fn parameters(self) -> &'static [(&'static str, &'static [&'static str])] {
        const TEXT_LAYOUT: &[&str] = &["x", "y", "dx", "dy"];
        const FONT: &[&str] = &["font-size"];
        const ORIENT: &[&str] = &["transform", "text-anchor"];
        const LINE_GEOM: &[&str] = &["x1", "y1", "x2", "y2", "d", "points", "x", "y", "width", "height"];
        match self {
            GroupKind::TitleText | GroupKind::AxisTitle | GroupKind::LegendText | GroupKind::LabelText => {
                &[("layout", TEXT_LAYOUT), ("fontSize", FONT), ("orient", ORIENT)]
            }
            GroupKind::AxisTick | GroupKind::Grid => &[("layout", LINE_GEOM), ("number", &["display"])],
            GroupKind::AxisLabel => {
                &[("layout", TEXT_LAYOUT), ("number", &["display"]), ("fontSize", FONT), ("orient", ORIENT)]
            }
            GroupKind::AxisLine => &[("layout", LINE_GEOM), ("height", &["y1", "y2", "height", "d"]), ("width", &["x1", "x2", "width", "d"])],
            GroupKind::LegendShape => &[
                ("layout", &["x", "y", "cx", "cy", "x1", "y1", "x2", "y2", "d"]),
                ("height", &["height", "ry"]),
                ("width", &["width", "rx"]),
                ("radius", &["r"]),
            ],
            GroupKind::Shape => &[("layout", &["x", "y", "width", "height", "cx", "cy", "r", "x1", "y1", "x2", "y2", "d", "points"])],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    /// Runs left to right: the x axis.
    Horizontal,
    /// Runs top to bottom: the y axis.
    Vertical,
}

impl Orientation {
    pub fn other(self) -> Orientation {
        match self {
            Orientation::Horizontal => Orientation::Vertical,
            Orientation::Vertical => Orientation::Horizontal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnchorPosition {
    Left,
    XCenter,
    Right,
    Top,
    YCenter,
    Bottom,
}

impl AnchorPosition {
    pub const HORIZONTAL: [AnchorPosition; 3] = [AnchorPosition::Left, AnchorPosition::XCenter, AnchorPosition::Right];
    pub const VERTICAL: [AnchorPosition; 3] = [AnchorPosition::Top, AnchorPosition::YCenter, AnchorPosition::Bottom];

    pub fn orientation(self) -> Orientation {
        match self {
            AnchorPosition::Left | AnchorPosition::XCenter | AnchorPosition::Right => Orientation::Horizontal,
            _ => Orientation::Vertical,
        }
    }

    /// Coordinate of this anchor on `r`.
    pub fn of(self, r: &Rect2D) -> f64 {
        match self {
            AnchorPosition::Left => r.x_min,
            AnchorPosition::XCenter => (r.x_min + r.x_max) / 2.0,
            AnchorPosition::Right => r.x_max,
            AnchorPosition::Top => r.y_min,
            AnchorPosition::YCenter => (r.y_min + r.y_max) / 2.0,
            AnchorPosition::Bottom => r.y_max,
        }
    }

    pub fn opposite(self) -> AnchorPosition {
        match self {
            AnchorPosition::Left => AnchorPosition::Right,
            AnchorPosition::Right => AnchorPosition::Left,
            AnchorPosition::Top => AnchorPosition::Bottom,
            AnchorPosition::Bottom => AnchorPosition::Top,
            c => c,
        }
    }

    pub fn is_center(self) -> bool {
        matches!(self, AnchorPosition::XCenter | AnchorPosition::YCenter)
    }

    /// Low-side and high-side positions on this anchor's axis.
    pub fn sides(self) -> (AnchorPosition, AnchorPosition) {
        match self.orientation() {
            Orientation::Horizontal => (AnchorPosition::Left, AnchorPosition::Right),
            Orientation::Vertical => (AnchorPosition::Top, AnchorPosition::Bottom),
        }
    }

    pub fn center_of(o: Orientation) -> AnchorPosition {
        match o {
            Orientation::Horizontal => AnchorPosition::XCenter,
            Orientation::Vertical => AnchorPosition::YCenter,
        }
    }
}

/// `⟨p, p_a, offset⟩`: the member's `p` sits at the anchor's `p_a` plus `offset` px.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RgTuple {
    pub p: AnchorPosition,
    pub p_a: AnchorPosition,
    pub offset: f64,
}

/// How members of a group are matched to members of their anchor group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Pairing {
    /// Every member anchors to the anchor group's bounding box.
    Union,
    /// Member `i` anchors to anchor member `pairs[i]`.
    OneToOne(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReactiveGeometry {
    pub anchor_group: usize,
    pub tuple: RgTuple,
    pub pairing: Pairing,
    /// Per-member deviation from the mean offset, preserved on re-render.
    pub residuals: Vec<f64>,
    /// Tuple as inferred, used as the home position of the anchor-switch cycle.
    pub base_tuple: RgTuple,
    /// Position in the anchor-switch cycle (0 = as inferred).
    pub cycle: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AxisLayout {
    GlobalScale,
    /// Group-private linear scale along this axis, composed with the global scale.
    LocalScale { scale: Scale, base: Scale },
    ReactiveGeometry(ReactiveGeometry),
}

impl AxisLayout {
    pub fn rg(&self) -> Option<&ReactiveGeometry> {
        match self {
            AxisLayout::ReactiveGeometry(r) => Some(r),
            _ => None,
        }
    }

    pub fn rg_mut(&mut self) -> Option<&mut ReactiveGeometry> {
        match self {
            AxisLayout::ReactiveGeometry(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutVariant {
    GlobalScale,
    LocalScale,
    ReactiveGeometry,
}

/// Layout dependency of a group, one per axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutDependency {
    pub horizontal: AxisLayout,
    pub vertical: AxisLayout,
}

impl LayoutDependency {
    pub fn global() -> Self {
        LayoutDependency { horizontal: AxisLayout::GlobalScale, vertical: AxisLayout::GlobalScale }
    }

    pub fn axis(&self, o: Orientation) -> &AxisLayout {
        match o {
            Orientation::Horizontal => &self.horizontal,
            Orientation::Vertical => &self.vertical,
        }
    }

    pub fn axis_mut(&mut self, o: Orientation) -> &mut AxisLayout {
        match o {
            Orientation::Horizontal => &mut self.horizontal,
            Orientation::Vertical => &mut self.vertical,
        }
    }

    /// Summary variant: reactive geometry on either axis wins, then local scale.
    pub fn variant(&self) -> LayoutVariant {
        let both = [&self.horizontal, &self.vertical];
        if both.iter().any(|a| matches!(a, AxisLayout::ReactiveGeometry(_))) {
            LayoutVariant::ReactiveGeometry
        } else if both.iter().any(|a| matches!(a, AxisLayout::LocalScale { .. })) {
            LayoutVariant::LocalScale
        } else {
            LayoutVariant::GlobalScale
        }
    }

    pub fn anchor_groups(&self) -> Vec<usize> {
        [&self.horizontal, &self.vertical].iter().filter_map(|a| a.rg().map(|r| r.anchor_group)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Scale {
    Linear {
        domain_min: f64,
        domain_max: f64,
        range_min: f64,
        range_max: f64,
        /// True when `domain_min` maps to `range_max` (e.g. a y axis growing upward).
        inverted: bool,
    },
    Discrete {
        categories: Vec<String>,
        range_min: f64,
        range_max: f64,
        step: f64,
    },
}

impl Scale {
    /// Identity-domain linear scale over a pixel extent.
    pub fn identity(min: f64, max: f64) -> Scale {
        Scale::Linear { domain_min: min, domain_max: max, range_min: min, range_max: max, inverted: false }
    }

    pub fn range(&self) -> (f64, f64) {
        match self {
            Scale::Linear { range_min, range_max, .. } | Scale::Discrete { range_min, range_max, .. } => {
                (*range_min, *range_max)
            }
        }
    }

    pub fn set_range(&mut self, min: f64, max: f64) {
        match self {
            Scale::Linear { range_min, range_max, .. } => {
                *range_min = min;
                *range_max = max;
            }
            Scale::Discrete { range_min, range_max, step, categories } => {
                *range_min = min;
                *range_max = max;
                *step = (max - min) / categories.len().max(1) as f64;
            }
        }
    }

    pub fn is_linear(&self) -> bool {
        matches!(self, Scale::Linear { .. })
    }

    /// Pixel position of a linear data value.
    pub fn map_value(&self, v: f64) -> Option<f64> {
        match self {
            Scale::Linear { domain_min, domain_max, range_min, range_max, inverted } => {
                let t = (v - domain_min) / (domain_max - domain_min);
                Some(if *inverted { range_max - t * (range_max - range_min) } else { range_min + t * (range_max - range_min) })
            }
            Scale::Discrete { .. } => None,
        }
    }

    /// Affine map taking positions under `base` to positions under `self`.
    pub fn remap_from(&self, base: &Scale) -> impl Fn(f64) -> f64 {
        let (b0, b1) = base.range();
        let (c0, c1) = self.range();
        let k = if (b1 - b0).abs() > 1e-12 { (c1 - c0) / (b1 - b0) } else { 1.0 };
        move |x| c0 + (x - b0) * k
    }
}

/// One axis: its line, ticks, labels and optional title and grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisAssembly {
    pub orientation: Orientation,
    pub line: Option<usize>,
    pub ticks: usize,
    pub labels: usize,
    pub title: Option<usize>,
    pub grid: Option<usize>,
    pub tick_count: usize,
    pub base_tick_count: usize,
    pub label_format: LabelFormat,
}

impl AxisAssembly {
    pub fn max_ticks(&self, scale: &Scale) -> usize {
        match scale {
            Scale::Discrete { categories, .. } => categories.len(),
            Scale::Linear { .. } => (self.base_tick_count * 2).max(11),
        }
    }
}

/// How numeric tick labels are written, so regenerated ticks match.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct LabelFormat {
    pub prefix: String,
    pub suffix: String,
    pub decimals: usize,
    pub thousands: bool,
}

impl LabelFormat {
    pub fn format(&self, v: f64) -> String {
        let mut s = format!("{:.*}", self.decimals, v);
        if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
            s.remove(0);
        }
        if self.thousands {
            let (sign, rest) = if let Some(r) = s.strip_prefix('-') { ("-", r.to_string()) } else { ("", s.clone()) };
            let (int, frac) = match rest.split_once('.') {
                Some((i, f)) => (i.to_string(), format!(".{f}")),
                None => (rest.clone(), String::new()),
            };
            let mut grouped = String::new();
            for (i, ch) in int.chars().enumerate() {
                if i > 0 && (int.len() - i) % 3 == 0 {
                    grouped.push(',');
                }
                grouped.push(ch);
            }
            s = format!("{sign}{grouped}{frac}");
        }
        format!("{}{}{}", self.prefix, s, self.suffix)
    }
}

/// Per-member placement chosen by the label-placement action; replaces the
/// group's reactive geometry for that member.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Placement {
    pub horizontal: RgTuple,
    pub vertical: RgTuple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VisualGroup {
    pub id: usize,
    pub class: ElementClass,
    pub kind: GroupKind,
    pub element_kind: ElementKind,
    pub members: Vec<ElementId>,
    pub encoding_signature: Vec<SignatureEntry>,
    pub layout: LayoutDependency,
    /// Current font size (text groups only).
    pub font_size: Option<f64>,
    pub base_font_size: Option<f64>,
    /// Maximum line width for word wrapping, when wrapping is on.
    pub wrap_width: Option<f64>,
    pub hidden: BTreeSet<ElementId>,
    pub placements: BTreeMap<ElementId, Placement>,
    /// Owning axis assembly, for axis-class groups.
    pub axis: Option<usize>,
}

impl VisualGroup {
    pub fn is_text(&self) -> bool {
        self.element_kind == ElementKind::Text
    }
}

/// Which SVG attributes a spec parameter controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterBinding {
    pub group: usize,
    pub parameter: String,
    pub attributes: Vec<String>,
}

/// Originating document, shared between spec copies.
#[derive(Debug, Clone)]
pub struct SpecSource {
    pub document: Arc<DocumentModel>,
}

impl PartialEq for SpecSource {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.document, &other.document) || self.document == other.document
    }
}

/// The reduced parameter space a chart is optimized over.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeclarativeSpec {
    pub format_version: u32,
    pub x_scale: Scale,
    pub y_scale: Scale,
    pub base_x_scale: Scale,
    pub base_y_scale: Scale,
    pub groups: Vec<VisualGroup>,
    pub axes: Vec<AxisAssembly>,
    pub viewport: Viewport,
    pub metrics: TextMetricsConfig,
    pub bindings: Vec<ParameterBinding>,
    #[serde(skip)]
    pub source: SpecSource,
}

impl DeclarativeSpec {
    pub fn document(&self) -> &DocumentModel {
        &self.source.document
    }

    pub fn scale(&self, o: Orientation) -> &Scale {
        match o {
            Orientation::Horizontal => &self.x_scale,
            Orientation::Vertical => &self.y_scale,
        }
    }

    pub fn scale_mut(&mut self, o: Orientation) -> &mut Scale {
        match o {
            Orientation::Horizontal => &mut self.x_scale,
            Orientation::Vertical => &mut self.y_scale,
        }
    }

    pub fn base_scale(&self, o: Orientation) -> &Scale {
        match o {
            Orientation::Horizontal => &self.base_x_scale,
            Orientation::Vertical => &self.base_y_scale,
        }
    }

    pub fn axis(&self, o: Orientation) -> Option<usize> {
        self.axes.iter().position(|a| a.orientation == o)
    }

    pub fn groups_of(&self, class: ElementClass) -> impl Iterator<Item = &VisualGroup> {
        self.groups.iter().filter(move |g| g.class == class)
    }

    pub fn group_of_kind(&self, kind: GroupKind) -> Option<&VisualGroup> {
        self.groups.iter().find(|g| g.kind == kind)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

/// Deconstruct `model` into a declarative spec.
pub fn build_spec(
    model: &DocumentModel,
    viewport: Viewport,
    metrics: &TextMetricsConfig,
) -> Result<DeclarativeSpec, DeconstructError> {
    build_spec_shared(Arc::new(model.clone()), viewport, metrics)
}

/// As [`build_spec`], reusing an already shared document.
pub fn build_spec_shared(
    model: Arc<DocumentModel>,
    viewport: Viewport,
    metrics: &TextMetricsConfig,
) -> Result<DeclarativeSpec, DeconstructError> {
    let bboxes = model.all_bboxes(metrics);
    let bbox_of = |id: &ElementId| model.index_of(id).and_then(|i| bboxes[i]);
    let raw = detect_groups(&model, metrics)?;
    let axis_found = detect_axes(&model, &raw, &bboxes);

    let repeated = axes::has_repeated_ticks(&model, &raw);
    for o in [Orientation::Horizontal, Orientation::Vertical] {
        if repeated || axis_found.iter().filter(|a| a.orientation == o).count() > 1 {
            return Err(DeconstructError::UnsupportedChart(
                "multiple plotting areas detected; only single-view charts are supported".to_string(),
            ));
        }
    }

    let mut kinds: Vec<Option<GroupKind>> = vec![None; raw.len()];
    let mut axis_of: Vec<Option<usize>> = vec![None; raw.len()];
    let mut scales: [Option<(Scale, LabelFormat)>; 2] = [None, None];
    for (ai, a) in axis_found.iter().enumerate() {
        kinds[a.ticks] = Some(GroupKind::AxisTick);
        kinds[a.labels] = Some(GroupKind::AxisLabel);
        axis_of[a.ticks] = Some(ai);
        axis_of[a.labels] = Some(ai);
        for (slot, kind) in [(a.line, GroupKind::AxisLine), (a.title, GroupKind::AxisTitle), (a.grid, GroupKind::Grid)] {
            if let Some(g) = slot {
                kinds[g] = Some(kind);
                axis_of[g] = Some(ai);
            }
        }
        let idx = match a.orientation {
            Orientation::Horizontal => 0,
            Orientation::Vertical => 1,
        };
        scales[idx] = Some(infer_scale(&model, &raw, a, &bboxes)?);
    }

    // plot rectangle: axis extents where known, mark extents otherwise
    let unassigned_shapes: Vec<usize> =
        (0..raw.len()).filter(|&i| kinds[i].is_none() && raw[i].element_kind.is_shape()).collect();
    let union_of = |groups: &[usize]| -> Option<Rect2D> {
        groups.iter().flat_map(|&g| raw[g].members.iter()).filter_map(&bbox_of).reduce(|a, b| a.union(&b))
    };
    let axis_extent = |o: Orientation| -> Option<Rect2D> {
        let a = axis_found.iter().find(|a| a.orientation == o)?;
        let mut gs = vec![a.ticks];
        gs.extend(a.line);
        gs.extend(a.grid);
        union_of(&gs)
    };
    let marks_box = union_of(&unassigned_shapes);
    let xa = axis_extent(Orientation::Horizontal);
    let ya = axis_extent(Orientation::Vertical);
    let (px0, px1) = xa.or(marks_box).map(|r| (r.x_min, r.x_max)).unwrap_or((0.0, viewport.width));
    let (py0, py1) = ya.or(marks_box).map(|r| (r.y_min, r.y_max)).unwrap_or((0.0, viewport.height));
    let plot = Rect2D::new(px0, py0, px1, py1);

    // legends: shape groups entirely outside the plot, paired with an equal-count text group
    let text_groups: Vec<usize> =
        (0..raw.len()).filter(|&i| kinds[i].is_none() && raw[i].element_kind == ElementKind::Text).collect();
    for &s in &unassigned_shapes {
        let boxes: Vec<Rect2D> = raw[s].members.iter().filter_map(&bbox_of).collect();
        let outside = !boxes.is_empty() && boxes.iter().all(|b| !overlaps_interior(b, &plot));
        if !outside {
            continue;
        }
        let partner = text_groups.iter().copied().filter(|&t| kinds[t].is_none() && raw[t].members.len() == raw[s].members.len()).min_by(|&a, &b| {
            let d = |t: usize| nearest_distance(&raw[t].members, &raw[s].members, &bbox_of);
            d(a).total_cmp(&d(b))
        });
        if let Some(t) = partner {
            let fs = raw[t].font_size.unwrap_or(12.0);
            if nearest_distance(&raw[t].members, &raw[s].members, &bbox_of) <= 3.0 * fs {
                kinds[s] = Some(GroupKind::LegendShape);
                kinds[t] = Some(GroupKind::LegendText);
            }
        }
    }
    let mut mark_count = 0;
    for &s in &unassigned_shapes {
        if kinds[s].is_none() {
            kinds[s] = Some(GroupKind::Shape);
            mark_count += 1;
        }
    }
    if mark_count == 0 {
        return Err(DeconstructError::UnsupportedChart("no mark group found".to_string()));
    }

    // title: topmost singleton text lying above the plot
    let title = text_groups
        .iter()
        .copied()
        .filter(|&t| kinds[t].is_none() && raw[t].members.len() == 1)
        .filter_map(|t| bbox_of(&raw[t].members[0]).map(|b| (t, b)))
        .filter(|(_, b)| b.y_max <= plot.y_min + 1.0)
        .min_by(|a, b| a.1.y_min.total_cmp(&b.1.y_min))
        .map(|(t, _)| t);
    if let Some(t) = title {
        kinds[t] = Some(GroupKind::TitleText);
    }
    for &t in &text_groups {
        if kinds[t].is_none() {
            kinds[t] = Some(GroupKind::LabelText);
        }
    }
    for k in kinds.iter_mut().filter(|k| k.is_none()) {
        // leftover non-text, non-shape groups (e.g. images) count as marks
        *k = Some(GroupKind::Shape);
    }

    let [xs, ys] = scales;
    let (x_scale, x_fmt) = xs.unwrap_or_else(|| (Scale::identity(plot.x_min, plot.x_max), LabelFormat::default()));
    let (y_scale, y_fmt) = ys.unwrap_or_else(|| (Scale::identity(plot.y_min, plot.y_max), LabelFormat::default()));

    let mut groups: Vec<VisualGroup> = raw
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let kind = kinds[i].unwrap();
            VisualGroup {
                id: i,
                class: kind.class(),
                kind,
                element_kind: r.element_kind,
                members: r.members.clone(),
                encoding_signature: r.signature.clone(),
                layout: LayoutDependency::global(),
                font_size: r.font_size,
                base_font_size: r.font_size,
                wrap_width: None,
                hidden: BTreeSet::new(),
                placements: BTreeMap::new(),
                axis: axis_of[i],
            }
        })
        .collect();

    let axes: Vec<AxisAssembly> = axis_found
        .iter()
        .map(|a| {
            let n = raw[a.ticks].members.len();
            AxisAssembly {
                orientation: a.orientation,
                line: a.line,
                ticks: a.ticks,
                labels: a.labels,
                title: a.title,
                grid: a.grid,
                tick_count: n,
                base_tick_count: n,
                label_format: match a.orientation {
                    Orientation::Horizontal => x_fmt.clone(),
                    Orientation::Vertical => y_fmt.clone(),
                },
            }
        })
        .collect();

    anchor::assign_layouts(&mut groups, &axes, &model, &bbox_of);

    let bindings = groups
        .iter()
        .flat_map(|g| {
            g.kind.parameters().iter().map(move |(name, attrs)| ParameterBinding {
                group: g.id,
                parameter: name.to_string(),
                attributes: attrs.iter().map(|s| s.to_string()).collect(),
            })
        })
        .collect();

    let spec = DeclarativeSpec {
        format_version: SPEC_FORMAT_VERSION,
        base_x_scale: x_scale.clone(),
        base_y_scale: y_scale.clone(),
        x_scale,
        y_scale,
        groups,
        axes,
        viewport,
        metrics: *metrics,
        bindings,
        source: SpecSource { document: model },
    };
    render::topological_order(&spec)?;
    Ok(spec)
}

fn nearest_distance(a: &[ElementId], b: &[ElementId], bbox_of: &dyn Fn(&ElementId) -> Option<Rect2D>) -> f64 {
    let bb: Vec<Rect2D> = b.iter().filter_map(bbox_of).collect();
    a.iter()
        .filter_map(bbox_of)
        .map(|ra| bb.iter().map(|rb| rect_gap(&ra, rb)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

fn overlaps_interior(b: &Rect2D, plot: &Rect2D) -> bool {
    b.x_max > plot.x_min + 0.5 && b.x_min < plot.x_max - 0.5 && b.y_max > plot.y_min + 0.5 && b.y_min < plot.y_max - 0.5
}

/// Euclidean gap between two rectangles (0 when they touch or overlap).
pub(crate) fn rect_gap(a: &Rect2D, b: &Rect2D) -> f64 {
    let dx = (b.x_min - a.x_max).max(a.x_min - b.x_max).max(0.0);
    let dy = (b.y_min - a.y_max).max(a.y_min - b.y_max).max(0.0);
    (dx * dx + dy * dy).sqrt()
}

/// Group kinds present, keyed by kind, for manifest comparison and reports.
pub fn kind_census(spec: &DeclarativeSpec) -> IndexMap<GroupKind, usize> {
    let mut m = IndexMap::new();
    for g in &spec.groups {
        *m.entry(g.kind).or_insert(0) += 1;
    }
    m
}
