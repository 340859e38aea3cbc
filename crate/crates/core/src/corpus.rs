//! Synthetic D3-style SVG charts with ground-truth manifests and seeded
//! mobile-friendliness defects.
//!
//! Geometry is computed here independently of the SVG layer, so the
//! expected costs in a manifest can check the interpreter.

use crate::deconstruct::{AnchorPosition, ElementClass, GroupKind, LabelFormat, Orientation};
use crate::interpret::{IssueNotation, IssueState, Side};
use crate::svg::{fmt_num, Rect2D};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

pub const MANIFEST_FORMAT_VERSION: u32 = 1;
pub const INDEX_FORMAT_VERSION: u32 = 1;
pub const DEFAULT_CORPUS_SIZE: usize = 81;

/// Layout is built for this viewport.
const WIDTH: f64 = 375.0;
const HEIGHT: f64 = 812.0;
const MARGIN_H: f64 = WIDTH * 0.1;
const MARGIN_TOP: f64 = HEIGHT * 0.1;
const TAU: f64 = 12.0;

const CHAR_W: f64 = 0.6;
const LINE_H: f64 = 1.2;
const BASELINE: f64 = 0.8;
const TICK: f64 = 6.0;
const TICK_GAP: f64 = 3.0;
/// Axis titles are placed clear of the tick labels as they would be at this size.
const READABLE: f64 = 12.0;
const LABEL_LIFT: f64 = 4.0;
const SWATCH: f64 = 10.0;
const DOT_R: f64 = 3.5;

const PALETTE: [&str; 4] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2"];
const MONTHS: [&str; 12] = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"];
const PLACES: [&str; 14] = [
    "North East", "South West", "Park Lane", "Outer Ring", "River Side", "Hill Top", "Lake View", "Old Town",
    "New Port", "East Gate", "West End", "Mid Field", "Bay Area", "Elm Grove",
];
const SERIES_NAMES: [&str; 4] = ["2021", "2022", "2023", "2024"];
const TITLES: [&str; 6] =
    ["Monthly Revenue", "Active Users", "Sales by Region", "Visitors", "Orders per Month", "Survey Results"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("invalid recipe: {0}")]
    InvalidRecipe(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed corpus file: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChartKind {
    Bar,
    GroupedBar,
    Line,
    Scatter,
}

impl ChartKind {
    pub const ALL: [ChartKind; 4] = [ChartKind::Bar, ChartKind::GroupedBar, ChartKind::Line, ChartKind::Scatter];

    fn categorical(self) -> bool {
        self != ChartKind::Scatter
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Defect {
    /// Content sits `excess` px further from the edge than the margin threshold allows.
    WhiteSpace { side: Side, excess: f64 },
    /// Content extends `amount` px past the edge.
    OutOfViewport { side: Side, amount: f64 },
    /// Every text of the class is set at `size`.
    SmallFont { class: ElementClass, size: f64 },
    /// Texts of the class collide.
    OverlappingText { class: ElementClass },
}

impl Defect {
    /// Whether a cost on `state` is explained by this defect.
    pub fn explains(&self, state: &IssueState) -> bool {
        use IssueNotation::*;
        match *self {
            Defect::WhiteSpace { side, .. } => {
                state.notation == match side {
                    Side::Left => LeftMargin,
                    Side::Right => RightMargin,
                    Side::Top => TopMargin,
                }
            }
            Defect::OutOfViewport { side, .. } => {
                state.notation == match side {
                    Side::Left => LeftOutOfViewport,
                    Side::Right => RightOutOfViewport,
                    Side::Top => TopOutOfViewport,
                }
            }
            Defect::SmallFont { class, .. } => state.notation == FontSize && state.class == Some(class),
            Defect::OverlappingText { class } => state.notation == OverlappingText && state.class == Some(class),
        }
    }

    fn conflicts(&self, other: &Defect) -> bool {
        let side = |d: &Defect| match *d {
            Defect::WhiteSpace { side, .. } | Defect::OutOfViewport { side, .. } => Some(side),
            _ => None,
        };
        match (self, other) {
            (Defect::SmallFont { class: a, .. }, Defect::SmallFont { class: b, .. }) => a == b,
            (Defect::OverlappingText { class: a }, Defect::OverlappingText { class: b }) => a == b,
            _ => side(self).is_some() && side(self) == side(other),
        }
    }
}

/// Distance of the content from each viewport edge in the defect-free layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub left: f64,
    pub right: f64,
    pub top: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartRecipe {
    pub kind: ChartKind,
    /// Categories, or points per series for scatter plots.
    pub points: usize,
    pub series: usize,
    /// Two-word category names instead of month abbreviations.
    pub long_labels: bool,
    /// Values in the tens of thousands, written with separators.
    pub large_values: bool,
    pub value_labels: bool,
    pub axis_titles: bool,
    pub grid: bool,
    pub font_size: f64,
    pub plot_height: f64,
    pub margins: Margins,
    pub defects: Vec<Defect>,
    /// Stretched aspect ratio; recorded only, never costed.
    pub distorted_ratio: bool,
    pub seed: u64,
}

impl ChartRecipe {
    /// Defect-free recipe of the given kind with default styling.
    pub fn clean(kind: ChartKind, points: usize, seed: u64) -> ChartRecipe {
        ChartRecipe {
            kind,
            points,
            series: if kind == ChartKind::GroupedBar { 2 } else { 1 },
            long_labels: false,
            large_values: false,
            value_labels: matches!(kind, ChartKind::Bar),
            axis_titles: true,
            grid: true,
            font_size: 12.0,
            plot_height: 240.0,
            margins: Margins { left: 10.0, right: 12.0, top: 16.0 },
            defects: Vec::new(),
            distorted_ratio: false,
            seed,
        }
    }

    pub fn with_defect(mut self, d: Defect) -> ChartRecipe {
        self.defects.push(d);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestGroup {
    pub name: String,
    pub kind: GroupKind,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant")]
pub enum ManifestScale {
    Linear { domain: (f64, f64), range: (f64, f64), inverted: bool },
    Discrete { categories: Vec<String>, range: (f64, f64) },
}

/// Expected reactive-geometry relation of a group along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestAnchor {
    pub group: String,
    pub orientation: Orientation,
    pub anchor: String,
    pub p: AnchorPosition,
    pub p_a: AnchorPosition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeededDefect {
    pub defect: Defect,
    /// States whose expected cost is positive because of this defect.
    pub states: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub recipe: ChartRecipe,
    pub groups: Vec<ManifestGroup>,
    pub x_scale: ManifestScale,
    pub y_scale: ManifestScale,
    pub anchors: Vec<ManifestAnchor>,
    pub defects: Vec<SeededDefect>,
    /// Positive per-state costs at a 375×812 viewport, by state name.
    pub expected_costs: BTreeMap<String, f64>,
    pub element_count: usize,
}

impl Manifest {
    pub fn group(&self, name: &str) -> Option<&ManifestGroup> {
        self.groups.iter().find(|g| g.name == name)
    }

    pub fn expected_cost(&self, state: &IssueState) -> f64 {
        self.expected_costs.get(&state.name()).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedChart {
    pub svg: String,
    pub manifest: Manifest,
}

// ---------------------------------------------------------------------------
// geometry oracle

fn r3(v: f64) -> f64 {
    (v * 1000.0).round() / 1000.0
}

#[derive(Clone, Copy, PartialEq)]
enum Anchor {
    Start,
    Middle,
    End,
}

impl Anchor {
    fn name(self) -> &'static str {
        match self {
            Anchor::Start => "start",
            Anchor::Middle => "middle",
            Anchor::End => "end",
        }
    }
}

struct TextSpec<'a> {
    id: String,
    class: &'a str,
    x: f64,
    y: f64,
    anchor: Anchor,
    /// Baseline shift in em.
    dy: Option<f64>,
    middle: bool,
    rotate: bool,
    fs: f64,
    content: &'a str,
}

/// Box of a single-line text under the fixed metrics model.
fn text_box(t: &TextSpec) -> Rect2D {
    let w = t.content.chars().count() as f64 * CHAR_W * t.fs;
    let lh = LINE_H * t.fs;
    let y = t.y + t.dy.unwrap_or(0.0) * t.fs;
    let x0 = match t.anchor {
        Anchor::Start => t.x,
        Anchor::Middle => t.x - w / 2.0,
        Anchor::End => t.x - w,
    };
    let top = if t.middle { y - 0.5 * lh } else { y - BASELINE * lh };
    if t.rotate {
        // rotate(-90): (x, y) -> (y, -x)
        Rect2D::new(top, -(x0 + w), top + lh, -x0)
    } else {
        Rect2D::new(x0, top, x0 + w, top + lh)
    }
}

struct Item {
    id: String,
    class: ElementClass,
    font: Option<f64>,
    bbox: Rect2D,
    markup: String,
}

fn text_item(class: ElementClass, t: TextSpec) -> Item {
    let t = TextSpec { x: r3(t.x), y: r3(t.y), ..t };
    let mut m = format!(r#"<text id="{}" class="{}" x="{}" y="{}""#, t.id, t.class, fmt_num(t.x), fmt_num(t.y));
    if let Some(dy) = t.dy {
        let _ = write!(m, r#" dy="{}em""#, fmt_num(dy));
    }
    let _ = write!(m, r#" text-anchor="{}""#, t.anchor.name());
    if t.middle {
        m.push_str(r#" dominant-baseline="middle""#);
    }
    let _ = write!(m, r#" font-size="{}""#, fmt_num(t.fs));
    if t.rotate {
        m.push_str(r#" transform="rotate(-90)""#);
    }
    let _ = write!(m, r##" fill="#333">{}</text>"##, t.content);
    Item { id: t.id.clone(), class, font: Some(t.fs), bbox: text_box(&t), markup: m }
}

fn rect_item(class: ElementClass, id: String, css: &str, x: f64, y: f64, w: f64, h: f64, fill: &str) -> Item {
    let (x, y, w, h) = (r3(x), r3(y), r3(w), r3(h));
    let markup = format!(
        r#"<rect id="{id}" class="{css}" x="{}" y="{}" width="{}" height="{}" fill="{fill}"/>"#,
        fmt_num(x),
        fmt_num(y),
        fmt_num(w),
        fmt_num(h)
    );
    Item { id, class, font: None, bbox: Rect2D::new(x, y, x + w, y + h), markup }
}

fn line_item(class: ElementClass, id: String, css: &str, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str) -> Item {
    let (x1, y1, x2, y2) = (r3(x1), r3(y1), r3(x2), r3(y2));
    let markup = format!(
        r#"<line id="{id}" class="{css}" x1="{}" y1="{}" x2="{}" y2="{}" stroke="{stroke}"/>"#,
        fmt_num(x1),
        fmt_num(y1),
        fmt_num(x2),
        fmt_num(y2)
    );
    Item { id, class, font: None, bbox: Rect2D::new(x1, y1, x2, y2), markup }
}

fn circle_item(class: ElementClass, id: String, cx: f64, cy: f64, r: f64, fill: &str) -> Item {
    let (cx, cy) = (r3(cx), r3(cy));
    let markup =
        format!(r#"<circle id="{id}" class="dot" cx="{}" cy="{}" r="{}" fill="{fill}"/>"#, fmt_num(cx), fmt_num(cy), fmt_num(r));
    Item { id, class, font: None, bbox: Rect2D::new(cx - r, cy - r, cx + r, cy + r), markup }
}

fn path_item(class: ElementClass, id: String, pts: &[(f64, f64)], stroke: &str) -> Item {
    let pts: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (r3(x), r3(y))).collect();
    let mut d = String::new();
    for (i, (x, y)) in pts.iter().enumerate() {
        let _ = write!(d, "{}{},{}", if i == 0 { "M" } else { "L" }, fmt_num(*x), fmt_num(*y));
    }
    let bbox = pts.iter().map(|&(x, y)| Rect2D::new(x, y, x, y)).reduce(|a, b| a.union(&b)).unwrap();
    let markup = format!(r#"<path id="{id}" class="line" d="{d}" fill="none" stroke="{stroke}" stroke-width="2"/>"#);
    Item { id, class, font: None, bbox, markup }
}

// ---------------------------------------------------------------------------
// data

#[derive(Clone)]
enum XData {
    Categories(Vec<String>),
    Linear { max: f64, ticks: Vec<f64> },
}

#[derive(Clone)]
struct Data {
    title: String,
    x: XData,
    x_format: LabelFormat,
    y_max: f64,
    y_ticks: Vec<f64>,
    y_format: LabelFormat,
    /// Per series: (category index or x value, y value).
    series: Vec<Vec<(f64, f64)>>,
    x_title: String,
    y_title: String,
}

/// Smallest 1-2-2.5-5 step giving `intervals` intervals that cover `max`.
fn nice_step(max: f64, intervals: usize) -> f64 {
    let raw = max / intervals as f64;
    let mag = 10f64.powf(raw.log10().floor());
    for m in [1.0, 2.0, 2.5, 5.0, 10.0] {
        if m * mag >= raw - 1e-9 {
            return m * mag;
        }
    }
    10.0 * mag
}

fn ticks_to(max: f64, intervals: usize) -> (f64, Vec<f64>) {
    let step = nice_step(max, intervals);
    let top = step * intervals as f64;
    (top, (0..=intervals).map(|i| step * i as f64).collect())
}

fn make_data(recipe: &ChartRecipe, rng: &mut ChaCha8Rng) -> Data {
    let magnitude = if recipe.large_values { 1000.0 } else { 1.0 };
    let fmt = LabelFormat { thousands: recipe.large_values, ..LabelFormat::default() };
    let y_cap = rng.gen_range(40.0..99.0) * magnitude;
    let draw = |rng: &mut ChaCha8Rng| (rng.gen_range(0.12..1.0f64) * y_cap).round();
    let (x, series) = if recipe.kind.categorical() {
        let names: Vec<String> = if recipe.long_labels {
            let mut p: Vec<&str> = PLACES.to_vec();
            p.shuffle(rng);
            p.into_iter().cycle().take(recipe.points).map(String::from).collect()
        } else {
            MONTHS.iter().cycle().take(recipe.points).map(|s| s.to_string()).collect()
        };
        let series: Vec<Vec<(f64, f64)>> = (0..recipe.series).map(|_| (0..recipe.points).map(|i| (i as f64, draw(rng))).collect()).collect();
        (XData::Categories(names), series)
    } else {
        let x_cap = rng.gen_range(20.0..99.0) * magnitude;
        let (max, ticks) = ticks_to(x_cap, 5);
        let series: Vec<Vec<(f64, f64)>> = (0..recipe.series)
            .map(|_| (0..recipe.points).map(|_| ((rng.gen_range(0.0..1.0f64) * x_cap).round(), draw(rng))).collect())
            .collect();
        (XData::Linear { max, ticks }, series)
    };
    let y_peak = series.iter().flatten().map(|p: &(f64, f64)| p.1).fold(1.0, f64::max);
    let (y_max, y_ticks) = ticks_to(y_peak, 5);
    Data {
        title: TITLES.choose(rng).unwrap().to_string(),
        x,
        x_format: fmt.clone(),
        y_max,
        y_ticks,
        y_format: fmt,
        series,
        x_title: if recipe.kind.categorical() { "Period" } else { "Spend" }.to_string(),
        y_title: "Value".to_string(),
    }
}

// ---------------------------------------------------------------------------
// layout

struct Fonts {
    title: f64,
    axis: f64,
    legend: f64,
    label: f64,
}

struct Section {
    class_attr: Option<&'static str>,
    items: Vec<Item>,
}

struct Built {
    sections: Vec<Section>,
    groups: Vec<ManifestGroup>,
    anchors: Vec<ManifestAnchor>,
    x_scale: ManifestScale,
    y_scale: ManifestScale,
    height: f64,
}

impl Built {
    fn items(&self) -> impl Iterator<Item = &Item> {
        self.sections.iter().flat_map(|s| s.items.iter())
    }

    fn extent(&self) -> Rect2D {
        self.items().map(|i| i.bbox).reduce(|a, b| a.union(&b)).unwrap()
    }
}

fn group(name: &str, kind: GroupKind, items: &[Item]) -> ManifestGroup {
    ManifestGroup { name: name.to_string(), kind, members: items.iter().map(|i| i.id.clone()).collect() }
}

fn anchor(group: &str, o: Orientation, anchor: &str, p: AnchorPosition, p_a: AnchorPosition) -> ManifestAnchor {
    ManifestAnchor { group: group.to_string(), orientation: o, anchor: anchor.to_string(), p, p_a }
}

/// Lay the chart out with the plot spanning `left..right` horizontally and
/// the title's top at `top`.
fn build(recipe: &ChartRecipe, data: &Data, fonts: &Fonts, left: f64, right: f64, top: f64) -> Built {
    use AnchorPosition::*;
    use ElementClass as C;
    use Orientation::{Horizontal as H, Vertical as V};
    let mut groups = Vec::new();
    let mut anchors = Vec::new();
    let mut sections = Vec::new();
    let legend = recipe.series >= 2;
    let cx = (left + right) / 2.0;

    // title
    let title = text_item(
        C::Title,
        TextSpec {
            id: "title".into(),
            class: "chart-title",
            x: cx,
            y: top + BASELINE * LINE_H * fonts.title,
            anchor: Anchor::Middle,
            dy: None,
            middle: false,
            rotate: false,
            fs: fonts.title,
            content: &data.title,
        },
    );
    let mut header_bottom = title.bbox.y_max;
    groups.push(group("title", GroupKind::TitleText, std::slice::from_ref(&title)));
    anchors.push(anchor("title", H, "x-domain", XCenter, XCenter));
    anchors.push(anchor("title", V, "y-domain", Bottom, Top));
    sections.push(Section { class_attr: None, items: vec![title] });

    // legend row
    if legend {
        let row_top = header_bottom + 8.0;
        let row_mid = row_top + 0.5 * LINE_H * fonts.legend;
        let mut x = left;
        let mut swatches = Vec::new();
        let mut texts = Vec::new();
        for s in 0..recipe.series {
            swatches.push(rect_item(
                C::Legend,
                format!("legend-swatch-{s}"),
                "swatch",
                x,
                row_mid - SWATCH / 2.0,
                SWATCH,
                SWATCH,
                PALETTE[s % PALETTE.len()],
            ));
            let t = text_item(
                C::Legend,
                TextSpec {
                    id: format!("legend-text-{s}"),
                    class: "legend-label",
                    x: x + SWATCH + 4.0,
                    y: row_mid,
                    anchor: Anchor::Start,
                    dy: None,
                    middle: true,
                    rotate: false,
                    fs: fonts.legend,
                    content: SERIES_NAMES[s % SERIES_NAMES.len()],
                },
            );
            x = t.bbox.x_max + 16.0;
            texts.push(t);
        }
        header_bottom = texts[0].bbox.y_max.max(swatches[0].bbox.y_max);
        groups.push(group("legend-swatches", GroupKind::LegendShape, &swatches));
        groups.push(group("legend-labels", GroupKind::LegendText, &texts));
        anchors.push(anchor("legend-swatches", V, "y-domain", Bottom, Top));
        anchors.push(anchor("legend-labels", H, "legend-swatches", Left, Right));
        anchors.push(anchor("legend-labels", V, "legend-swatches", YCenter, YCenter));
        swatches.extend(texts);
        sections.push(Section { class_attr: Some("legend"), items: swatches });
    }

    let label_room = match recipe.kind {
        ChartKind::Bar | ChartKind::GroupedBar if recipe.value_labels => LINE_H * fonts.label + LABEL_LIFT + 2.0,
        ChartKind::Line if recipe.value_labels => LINE_H * fonts.label + LABEL_LIFT + DOT_R + 2.0,
        _ => DOT_R + 2.0,
    };
    let plot_top = header_bottom + 14.0 + label_room.max(0.6 * LINE_H * fonts.axis);
    let plot_h = if recipe.distorted_ratio { recipe.plot_height * 1.8 } else { recipe.plot_height };
    let plot_bottom = plot_top + plot_h;
    let y_of = |v: f64| plot_bottom - v / data.y_max * plot_h;

    // x mapping
    let (x_positions, x_texts, step): (Vec<f64>, Vec<String>, f64) = match &data.x {
        XData::Categories(c) => {
            let step = (right - left) / c.len() as f64;
            ((0..c.len()).map(|i| left + step * (i as f64 + 0.5)).collect(), c.clone(), step)
        }
        XData::Linear { max, ticks } => (
            ticks.iter().map(|t| left + t / max * (right - left)).collect(),
            ticks.iter().map(|&t| data.x_format.format(t)).collect(),
            0.0,
        ),
    };
    let x_of = |v: f64| match &data.x {
        XData::Categories(_) => left + step * (v + 0.5),
        XData::Linear { max, .. } => left + v / max * (right - left),
    };

    // grid
    if recipe.grid {
        let lines: Vec<Item> = data
            .y_ticks
            .iter()
            .enumerate()
            .map(|(i, &v)| line_item(C::Axis, format!("grid-{i}"), "gridline", left, y_of(v), right, y_of(v), "#e0e0e0"))
            .collect();
        groups.push(group("y-grid", GroupKind::Grid, &lines));
        sections.push(Section { class_attr: Some("grid"), items: lines });
    }

    // x axis
    {
        let mut items = Vec::new();
        let domain = line_item(C::Axis, "x-domain".into(), "domain", left, plot_bottom, right, plot_bottom, "#333");
        groups.push(group("x-domain", GroupKind::AxisLine, std::slice::from_ref(&domain)));
        items.push(domain);
        let ticks: Vec<Item> = x_positions
            .iter()
            .enumerate()
            .map(|(i, &x)| line_item(C::Axis, format!("x-tick-{i}"), "tick", x, plot_bottom, x, plot_bottom + TICK, "#333"))
            .collect();
        let label_top = plot_bottom + TICK + TICK_GAP;
        let labels: Vec<Item> = x_positions
            .iter()
            .zip(&x_texts)
            .enumerate()
            .map(|(i, (&x, s))| {
                text_item(
                    C::Axis,
                    TextSpec {
                        id: format!("x-label-{i}"),
                        class: "tick-label",
                        x,
                        y: label_top + (BASELINE * LINE_H - 0.71) * fonts.axis,
                        anchor: Anchor::Middle,
                        dy: Some(0.71),
                        middle: false,
                        rotate: false,
                        fs: fonts.axis,
                        content: s,
                    },
                )
            })
            .collect();
        groups.push(group("x-ticks", GroupKind::AxisTick, &ticks));
        groups.push(group("x-labels", GroupKind::AxisLabel, &labels));
        anchors.push(anchor("x-labels", H, "x-ticks", XCenter, XCenter));
        anchors.push(anchor("x-labels", V, "x-ticks", Top, Bottom));
        let reserve = fonts.axis.max(READABLE);
        let labels_bottom = label_top + LINE_H * reserve;
        // categorical charts leave a line free under the labels for wrapping
        let title_gap = if recipe.kind.categorical() { 6.0 + LINE_H * reserve } else { 6.0 };
        items.extend(ticks);
        items.extend(labels);
        if recipe.axis_titles {
            let t = text_item(
                C::Axis,
                TextSpec {
                    id: "x-title".into(),
                    class: "axis-title",
                    x: cx,
                    y: labels_bottom + title_gap + BASELINE * LINE_H * reserve,
                    anchor: Anchor::Middle,
                    dy: None,
                    middle: false,
                    rotate: false,
                    fs: fonts.axis,
                    content: &data.x_title,
                },
            );
            groups.push(group("x-title", GroupKind::AxisTitle, std::slice::from_ref(&t)));
            anchors.push(anchor("x-title", H, "x-domain", XCenter, XCenter));
            anchors.push(anchor("x-title", V, "x-domain", Top, Bottom));
            items.push(t);
        }
        sections.push(Section { class_attr: Some("axis x-axis"), items });
    }

    // y axis
    {
        let mut items = Vec::new();
        let domain = line_item(C::Axis, "y-domain".into(), "domain", left, plot_top, left, plot_bottom, "#333");
        groups.push(group("y-domain", GroupKind::AxisLine, std::slice::from_ref(&domain)));
        items.push(domain);
        let ticks: Vec<Item> = data
            .y_ticks
            .iter()
            .enumerate()
            .map(|(i, &v)| line_item(C::Axis, format!("y-tick-{i}"), "tick", left - TICK, y_of(v), left, y_of(v), "#333"))
            .collect();
        let texts: Vec<String> = data.y_ticks.iter().map(|&v| data.y_format.format(v)).collect();
        let labels: Vec<Item> = data
            .y_ticks
            .iter()
            .zip(&texts)
            .enumerate()
            .map(|(i, (&v, s))| {
                text_item(
                    C::Axis,
                    TextSpec {
                        id: format!("y-label-{i}"),
                        class: "tick-label",
                        x: left - TICK - TICK_GAP,
                        y: y_of(v),
                        anchor: Anchor::End,
                        dy: Some(0.32),
                        middle: false,
                        rotate: false,
                        fs: fonts.axis,
                        content: s,
                    },
                )
            })
            .collect();
        groups.push(group("y-ticks", GroupKind::AxisTick, &ticks));
        groups.push(group("y-labels", GroupKind::AxisLabel, &labels));
        anchors.push(anchor("y-labels", H, "y-ticks", Right, Left));
        anchors.push(anchor("y-labels", V, "y-ticks", YCenter, YCenter));
        let reserve = fonts.axis.max(READABLE);
        let widest = texts.iter().map(|t| t.chars().count()).max().unwrap_or(0) as f64;
        let labels_left = left - TICK - TICK_GAP - widest * CHAR_W * reserve;
        items.extend(ticks);
        items.extend(labels);
        if recipe.axis_titles {
            let lh = LINE_H * reserve;
            let t = text_item(
                C::Axis,
                TextSpec {
                    id: "y-title".into(),
                    class: "axis-title",
                    x: -(plot_top + plot_bottom) / 2.0,
                    y: labels_left - 6.0 - (1.0 - BASELINE) * lh,
                    anchor: Anchor::Middle,
                    dy: None,
                    middle: false,
                    rotate: true,
                    fs: fonts.axis,
                    content: &data.y_title,
                },
            );
            groups.push(group("y-title", GroupKind::AxisTitle, std::slice::from_ref(&t)));
            anchors.push(anchor("y-title", H, "y-domain", Right, Left));
            anchors.push(anchor("y-title", V, "y-domain", YCenter, YCenter));
            items.push(t);
        }
        sections.push(Section { class_attr: Some("axis y-axis"), items });
    }

    // marks and value labels
    let fmt_value = |v: f64| data.y_format.format(v);
    let mut marks = Vec::new();
    let mut values = Vec::new();
    let value_label = |id: String, x: f64, bottom: f64, text: &str| {
        text_item(
            C::Label,
            TextSpec {
                id,
                class: "value-label",
                x,
                y: bottom - (1.0 - BASELINE) * LINE_H * fonts.label,
                anchor: Anchor::Middle,
                dy: None,
                middle: false,
                rotate: false,
                fs: fonts.label,
                content: text,
            },
        )
    };
    match recipe.kind {
        ChartKind::Bar | ChartKind::GroupedBar => {
            let n = recipe.series as f64;
            let band = if recipe.kind == ChartKind::Bar { 0.7 } else { 0.8 } * step;
            let w = band / n;
            for (s, pts) in data.series.iter().enumerate() {
                for (i, &(c, v)) in pts.iter().enumerate() {
                    let x0 = x_of(c) - band / 2.0 + w * s as f64;
                    let top = y_of(v);
                    marks.push(rect_item(
                        C::Mark,
                        format!("bar-{s}-{i}"),
                        "bar",
                        x0,
                        top,
                        w,
                        plot_bottom - top,
                        PALETTE[s % PALETTE.len()],
                    ));
                    if recipe.value_labels {
                        values.push(value_label(format!("value-{s}-{i}"), x0 + w / 2.0, top - LABEL_LIFT, &fmt_value(v)));
                    }
                }
            }
            groups.push(group("bars", GroupKind::Shape, &marks));
            if recipe.value_labels {
                anchors.push(anchor("value-labels", H, "bars", XCenter, XCenter));
                anchors.push(anchor("value-labels", V, "bars", Bottom, Top));
            }
        }
        ChartKind::Line | ChartKind::Scatter => {
            let mut paths = Vec::new();
            let r = if recipe.kind == ChartKind::Line { DOT_R } else { 4.0 };
            for (s, pts) in data.series.iter().enumerate() {
                let xy: Vec<(f64, f64)> = pts.iter().map(|&(x, y)| (x_of(x), y_of(y))).collect();
                if recipe.kind == ChartKind::Line {
                    paths.push(path_item(C::Mark, format!("line-{s}"), &xy, PALETTE[s % PALETTE.len()]));
                }
                for (i, &(x, y)) in xy.iter().enumerate() {
                    marks.push(circle_item(C::Mark, format!("dot-{s}-{i}"), x, y, r, PALETTE[s % PALETTE.len()]));
                    if recipe.value_labels {
                        values.push(value_label(format!("value-{s}-{i}"), x, y - r - LABEL_LIFT, &fmt_value(pts[i].1)));
                    }
                }
            }
            if !paths.is_empty() {
                groups.push(group("lines", GroupKind::Shape, &paths));
            }
            groups.push(group("dots", GroupKind::Shape, &marks));
            if recipe.value_labels {
                anchors.push(anchor("value-labels", H, "dots", XCenter, XCenter));
                anchors.push(anchor("value-labels", V, "dots", Bottom, Top));
            }
            paths.extend(marks);
            marks = paths;
        }
    }
    sections.push(Section { class_attr: Some("marks"), items: marks });
    if !values.is_empty() {
        groups.push(group("value-labels", GroupKind::LabelText, &values));
        sections.push(Section { class_attr: Some("labels"), items: values });
    }

    let x_scale = match &data.x {
        XData::Categories(c) => ManifestScale::Discrete { categories: c.clone(), range: (left, right) },
        XData::Linear { max, .. } => ManifestScale::Linear { domain: (0.0, *max), range: (left, right), inverted: false },
    };
    let y_scale = ManifestScale::Linear { domain: (0.0, data.y_max), range: (plot_top, plot_bottom), inverted: true };
    let mut built = Built { sections, groups, anchors, x_scale, y_scale, height: 0.0 };
    built.height = (built.extent().y_max + 20.0).ceil().max(100.0);
    built
}

/// Expected positive cost of every state, from the oracle boxes.
fn expected_costs(built: &Built) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    let ext = built.extent();
    for s in IssueState::all() {
        let class_items = || built.items().filter(move |i| Some(i.class) == s.class);
        let exceed = |f: &dyn Fn(&Rect2D) -> f64| class_items().map(|i| f(&i.bbox)).fold(0.0, f64::max);
        let cost = match s.notation {
            IssueNotation::LeftMargin => (ext.x_min - MARGIN_H).max(0.0),
            IssueNotation::RightMargin => (WIDTH - ext.x_max - MARGIN_H).max(0.0),
            IssueNotation::TopMargin => (ext.y_min - MARGIN_TOP).max(0.0),
            IssueNotation::LeftOutOfViewport => exceed(&|b| -b.x_min),
            IssueNotation::RightOutOfViewport => exceed(&|b| b.x_max - WIDTH),
            IssueNotation::TopOutOfViewport => exceed(&|b| -b.y_min),
            IssueNotation::FontSize => {
                let fonts: Vec<f64> = class_items().filter_map(|i| i.font).collect();
                if fonts.is_empty() {
                    0.0
                } else {
                    fonts.iter().map(|f| (TAU - f).max(0.0)).sum::<f64>() / fonts.len() as f64
                }
            }
            IssueNotation::OverlappingText => {
                let boxes: Vec<Rect2D> = class_items().filter(|i| i.font.is_some()).map(|i| i.bbox).collect();
                let mut area = 0.0;
                for a in 0..boxes.len() {
                    for b in a + 1..boxes.len() {
                        let w = boxes[a].x_max.min(boxes[b].x_max) - boxes[a].x_min.max(boxes[b].x_min);
                        let h = boxes[a].y_max.min(boxes[b].y_max) - boxes[a].y_min.max(boxes[b].y_min);
                        if w > 0.0 && h > 0.0 {
                            area += w * h;
                        }
                    }
                }
                area
            }
        };
        if cost > 1e-9 {
            out.insert(s.name(), cost);
        }
    }
    out
}

fn serialize_chart(built: &Built) -> String {
    let mut s = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" font-family="sans-serif">"#,
        fmt_num(WIDTH),
        fmt_num(built.height)
    );
    s.push('\n');
    for sec in &built.sections {
        let indent = if let Some(c) = sec.class_attr {
            let _ = writeln!(s, r#"  <g class="{c}">"#);
            "    "
        } else {
            "  "
        };
        for it in &sec.items {
            let _ = writeln!(s, "{indent}{}", it.markup);
        }
        if sec.class_attr.is_some() {
            s.push_str("  </g>\n");
        }
    }
    s.push_str("</svg>\n");
    s
}

fn validate(recipe: &ChartRecipe) -> Result<(), CorpusError> {
    let bad = |m: &str| Err(CorpusError::InvalidRecipe(m.to_string()));
    if recipe.points == 0 || recipe.series == 0 {
        return bad("chart needs at least one data point and one series");
    }
    if recipe.kind.categorical() && recipe.points < 2 {
        return bad("categorical charts need at least two categories");
    }
    if recipe.kind == ChartKind::Bar && recipe.series != 1 {
        return bad("bar charts have exactly one series");
    }
    if recipe.kind == ChartKind::Scatter && recipe.value_labels {
        return bad("scatter plots carry no value labels");
    }
    if recipe.kind == ChartKind::Line && recipe.value_labels && recipe.series > 1 {
        return bad("value labels on line charts need a single series");
    }
    if recipe.series > SERIES_NAMES.len() {
        return bad("at most four series");
    }
    if !(recipe.font_size >= TAU && recipe.font_size <= 20.0) {
        return bad("base font size must lie in 12..=20");
    }
    if recipe.plot_height < 60.0 {
        return bad("plot height must be at least 60 px");
    }
    for (i, d) in recipe.defects.iter().enumerate() {
        if recipe.defects[..i].iter().any(|e| e.conflicts(d)) {
            return bad("two defects act on the same edge or class");
        }
        match *d {
            Defect::WhiteSpace { excess: m, .. } | Defect::OutOfViewport { amount: m, .. } if !(m > 0.0 && m <= 120.0) => {
                return bad("defect magnitude must lie in (0, 120] px");
            }
            Defect::SmallFont { size, class } => {
                if !(4.0..TAU).contains(&size) {
                    return bad("small font size must lie in [4, 12)");
                }
                if class == ElementClass::Mark {
                    return bad("marks carry no text");
                }
            }
            Defect::OverlappingText { class } if class != ElementClass::Axis && class != ElementClass::Label => {
                return bad("overlaps are seeded on axis or value labels only");
            }
            _ => {}
        }
    }
    Ok(())
}

/// Build the chart a recipe describes.
pub fn generate(recipe: &ChartRecipe) -> Result<GeneratedChart, CorpusError> {
    validate(recipe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(recipe.seed);
    let data = make_data(recipe, &mut rng);
    let fs = recipe.font_size;
    let mut fonts = Fonts { title: fs + 4.0, axis: fs, legend: fs, label: fs };
    for d in &recipe.defects {
        if let Defect::SmallFont { class, size } = *d {
            match class {
                ElementClass::Title => fonts.title = size,
                ElementClass::Axis => fonts.axis = size,
                ElementClass::Legend => fonts.legend = size,
                ElementClass::Label => fonts.label = size,
                ElementClass::Mark => {}
            }
        }
    }
    let mut target = (recipe.margins.left, WIDTH - recipe.margins.right, recipe.margins.top);
    for d in &recipe.defects {
        match *d {
            Defect::WhiteSpace { side: Side::Left, excess } => target.0 = MARGIN_H + excess,
            Defect::WhiteSpace { side: Side::Right, excess } => target.1 = WIDTH - MARGIN_H - excess,
            Defect::WhiteSpace { side: Side::Top, excess } => target.2 = MARGIN_TOP + excess,
            Defect::OutOfViewport { side: Side::Left, amount } => target.0 = -amount,
            Defect::OutOfViewport { side: Side::Right, amount } => target.1 = WIDTH + amount,
            Defect::OutOfViewport { side: Side::Top, amount } => target.2 = -amount,
            _ => {}
        }
    }

    // solve for the plot edges that put the content edges on target
    let (mut left, mut right) = (target.0 + 60.0, target.1 - 20.0);
    let mut built = build(recipe, &data, &fonts, left, right, target.2);
    for _ in 0..60 {
        let ext = built.extent();
        let (el, er) = (target.0 - ext.x_min, target.1 - ext.x_max);
        if el.abs() < 1e-6 && er.abs() < 1e-6 {
            break;
        }
        left += el;
        right += er;
        if right - left < 40.0 {
            return Err(CorpusError::InvalidRecipe("margins leave no room for the plot".into()));
        }
        built = build(recipe, &data, &fonts, left, right, target.2);
    }
    let ext = built.extent();
    if (ext.x_min - target.0).abs() > 0.01 || (ext.x_max - target.1).abs() > 0.01 {
        return Err(CorpusError::InvalidRecipe("layout did not converge".into()));
    }

    let costs = expected_costs(&built);
    let states = IssueState::all();
    let mut seeded = Vec::new();
    for d in &recipe.defects {
        let hit: Vec<String> = states.iter().filter(|s| d.explains(s) && costs.contains_key(&s.name())).map(|s| s.name()).collect();
        if hit.is_empty() {
            return Err(CorpusError::InvalidRecipe(format!("defect {d:?} has no measurable cost")));
        }
        seeded.push(SeededDefect { defect: *d, states: hit });
    }
    for s in &states {
        if costs.contains_key(&s.name()) && !recipe.defects.iter().any(|d| d.explains(s)) {
            return Err(CorpusError::InvalidRecipe(format!("layout has an unseeded issue: {}", s.name())));
        }
    }

    let svg = serialize_chart(&built);
    let element_count = built.items().count();
    let manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        recipe: recipe.clone(),
        groups: built.groups,
        x_scale: built.x_scale,
        y_scale: built.y_scale,
        anchors: built.anchors,
        defects: seeded,
        expected_costs: costs,
        element_count,
    };
    Ok(GeneratedChart { svg, manifest })
}

// ---------------------------------------------------------------------------
// corpora

/// Proportions a corpus is drawn with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMix {
    /// Relative weight of bar, grouped bar, line and scatter charts.
    pub kind_weights: [f64; 4],
    /// Every n-th chart (from the first) carries two or three defects.
    pub multi_defect_every: usize,
    /// Every n-th chart (offset by half) is defect-free; 0 disables.
    pub clean_every: usize,
    pub max_magnitude: f64,
}

impl Default for CorpusMix {
    fn default() -> Self {
        CorpusMix { kind_weights: [1.0, 1.0, 1.0, 1.0], multi_defect_every: 3, clean_every: 9, max_magnitude: 60.0 }
    }
}

impl CorpusMix {
    /// A differently weighted mix for held-out evaluation.
    pub fn held_out() -> CorpusMix {
        CorpusMix { kind_weights: [2.0, 1.0, 1.5, 0.5], multi_defect_every: 2, clean_every: 12, max_magnitude: 50.0 }
    }
}

fn sample_defect(kind: ChartKind, recipe: &ChartRecipe, rng: &mut ChaCha8Rng, max_mag: f64) -> Defect {
    let sides = [Side::Left, Side::Right, Side::Top];
    let mag = |rng: &mut ChaCha8Rng| (rng.gen_range(10.0..max_mag.max(10.5)) * 2.0).round() / 2.0;
    match rng.gen_range(0..4) {
        0 => Defect::WhiteSpace { side: *sides.choose(rng).unwrap(), excess: mag(rng) },
        1 => Defect::OutOfViewport { side: *sides.choose(rng).unwrap(), amount: mag(rng) },
        2 => {
            let mut classes = vec![ElementClass::Title, ElementClass::Axis];
            if recipe.series >= 2 {
                classes.push(ElementClass::Legend);
            }
            if recipe.value_labels {
                classes.push(ElementClass::Label);
            }
            let class = *classes.choose(rng).unwrap();
            let size = if class == ElementClass::Title { rng.gen_range(9..=11) } else { rng.gen_range(8..=10) } as f64;
            Defect::SmallFont { class, size }
        }
        _ => {
            if kind == ChartKind::Bar && rng.gen_bool(0.5) || !kind.categorical() {
                if kind == ChartKind::Bar {
                    Defect::OverlappingText { class: ElementClass::Label }
                } else {
                    Defect::SmallFont { class: ElementClass::Axis, size: rng.gen_range(8..=10) as f64 }
                }
            } else {
                Defect::OverlappingText { class: ElementClass::Axis }
            }
        }
    }
}

/// Draw the recipe for chart `index` of a corpus.
pub fn sample_recipe(seed: u64, index: usize, mix: &CorpusMix) -> ChartRecipe {
    for attempt in 0u64.. {
        let s = seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ attempt.wrapping_mul(0xD1B5_4A32_D192_ED03);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let total: f64 = mix.kind_weights.iter().sum();
        let mut pick = rng.gen_range(0.0..total);
        let mut kind = ChartKind::Bar;
        for (k, w) in ChartKind::ALL.iter().zip(mix.kind_weights) {
            if pick < w {
                kind = *k;
                break;
            }
            pick -= w;
        }
        let (points, series) = match kind {
            ChartKind::Bar => (rng.gen_range(4..=9), 1),
            ChartKind::GroupedBar => (rng.gen_range(3..=5), rng.gen_range(2..=3)),
            ChartKind::Line => (rng.gen_range(5..=10), rng.gen_range(1..=2)),
            ChartKind::Scatter => (rng.gen_range(15..=60), rng.gen_range(1..=3)),
        };
        let mut recipe = ChartRecipe {
            kind,
            points,
            series,
            long_labels: false,
            large_values: false,
            value_labels: match kind {
                ChartKind::Bar => rng.gen_bool(0.7),
                ChartKind::GroupedBar => rng.gen_bool(0.4),
                ChartKind::Line => series == 1 && rng.gen_bool(0.5),
                ChartKind::Scatter => false,
            },
            axis_titles: rng.gen_bool(0.7),
            grid: rng.gen_bool(0.6),
            font_size: *[12.0, 12.0, 13.0, 14.0].choose(&mut rng).unwrap(),
            plot_height: rng.gen_range(200.0..300.0f64).round(),
            margins: Margins {
                left: rng.gen_range(4.0..30.0f64).round(),
                right: rng.gen_range(4.0..30.0f64).round(),
                top: rng.gen_range(6.0..40.0f64).round(),
            },
            defects: Vec::new(),
            distorted_ratio: rng.gen_bool(0.1),
            seed: rng.gen(),
        };
        recipe.large_values = kind != ChartKind::GroupedBar && !recipe.value_labels && rng.gen_bool(0.25);
        let wanted = if mix.clean_every > 0 && index % mix.clean_every == mix.clean_every / 2 {
            0
        } else if mix.multi_defect_every > 0 && index.is_multiple_of(mix.multi_defect_every) {
            rng.gen_range(2..=3)
        } else {
            1
        };
        let mut guard = 0;
        let mut drawn = 0;
        while drawn < wanted && guard < 50 {
            guard += 1;
            let d = sample_defect(kind, &recipe, &mut rng, mix.max_magnitude);
            if recipe.defects.iter().any(|e| e.conflicts(&d)) {
                continue;
            }
            drawn += 1;
            match d {
                // a chart scaled down as a whole has every text too small
                Defect::SmallFont { size, .. } if rng.gen_bool(0.4) => {
                    let mut classes = vec![ElementClass::Title, ElementClass::Axis];
                    if recipe.series >= 2 {
                        classes.push(ElementClass::Legend);
                    }
                    if recipe.value_labels {
                        classes.push(ElementClass::Label);
                    }
                    for class in classes {
                        let size = if class == ElementClass::Title { (size + 1.0).min(11.0) } else { size };
                        let extra = Defect::SmallFont { class, size };
                        if !recipe.defects.iter().any(|e| e.conflicts(&extra)) {
                            recipe.defects.push(extra);
                        }
                    }
                    continue;
                }
                Defect::OverlappingText { class: ElementClass::Axis } => {
                    recipe.long_labels = true;
                    recipe.points = rng.gen_range(6..=7);
                }
                Defect::OverlappingText { class: ElementClass::Label } => {
                    recipe.value_labels = true;
                    recipe.large_values = true;
                    recipe.points = rng.gen_range(10..=14);
                }
                _ => {}
            }
            recipe.defects.push(d);
        }
        if drawn == wanted && generate(&recipe).is_ok() {
            return recipe;
        }
        log::debug!("recipe {index} attempt {attempt} rejected");
    }
    unreachable!()
}

/// Large defect-free scatter plot of roughly `elements` SVG elements.
pub fn large_scatter(elements: usize, seed: u64) -> ChartRecipe {
    let mut r = ChartRecipe::clean(ChartKind::Scatter, elements.saturating_sub(40).max(1), seed);
    r.value_labels = false;
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: String,
    pub chart: GeneratedChart,
}

pub fn generate_corpus(count: usize, seed: u64, mix: &CorpusMix) -> Result<Vec<CorpusEntry>, CorpusError> {
    use rayon::prelude::*;
    (0..count)
        .into_par_iter()
        .map(|i| {
            let recipe = sample_recipe(seed, i, mix);
            Ok(CorpusEntry { name: format!("chart-{i:03}"), chart: generate(&recipe)? })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub name: String,
    pub svg: String,
    pub manifest: String,
    pub recipe: ChartRecipe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusIndex {
    pub format_version: u32,
    pub seed: u64,
    pub mix: CorpusMix,
    pub charts: Vec<IndexEntry>,
}

/// Write `file` atomically: a temporary sibling renamed into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path)
}

/// Write SVGs, manifests and `index.json` into `dir`.
pub fn write_corpus(dir: &Path, entries: &[CorpusEntry], seed: u64, mix: &CorpusMix) -> Result<(), CorpusError> {
    std::fs::create_dir_all(dir)?;
    let mut charts = Vec::new();
    for e in entries {
        let svg = format!("{}.svg", e.name);
        let manifest = format!("{}.manifest.json", e.name);
        write_atomic(&dir.join(&svg), e.chart.svg.as_bytes())?;
        let json = serde_json::to_string_pretty(&e.chart.manifest).expect("manifest serializes");
        write_atomic(&dir.join(&manifest), json.as_bytes())?;
        charts.push(IndexEntry { name: e.name.clone(), svg, manifest, recipe: e.chart.manifest.recipe.clone() });
    }
    let index = CorpusIndex { format_version: INDEX_FORMAT_VERSION, seed, mix: mix.clone(), charts };
    write_atomic(&dir.join("index.json"), serde_json::to_string_pretty(&index).expect("index serializes").as_bytes())?;
    Ok(())
}

/// A chart loaded from disk: its name, SVG text and manifest if present.
#[derive(Debug, Clone)]
pub struct LoadedChart {
    pub name: String,
    pub svg: String,
    pub manifest: Option<Manifest>,
}

/// Load a corpus directory: the charts listed in `index.json`, or every
/// `.svg` file in name order when there is no index.
pub fn load_corpus(dir: &Path) -> Result<Vec<LoadedChart>, CorpusError> {
    let index_path = dir.join("index.json");
    let mut out = Vec::new();
    if index_path.exists() {
        let index: CorpusIndex = serde_json::from_str(&std::fs::read_to_string(&index_path)?)
            .map_err(|e| CorpusError::Malformed(format!("{}: {e}", index_path.display())))?;
        for c in index.charts {
            let svg = std::fs::read_to_string(dir.join(&c.svg))?;
            let text = std::fs::read_to_string(dir.join(&c.manifest))?;
            let manifest = serde_json::from_str(&text).map_err(|e| CorpusError::Malformed(format!("{}: {e}", c.manifest)))?;
            out.push(LoadedChart { name: c.name, svg, manifest: Some(manifest) });
        }
    } else {
        let mut paths: Vec<_> = std::fs::read_dir(dir)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "svg"))
            .collect();
        paths.sort();
        for p in paths {
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            out.push(LoadedChart { name, svg: std::fs::read_to_string(&p)?, manifest: None });
        }
    }
    if out.is_empty() {
        return Err(CorpusError::Malformed(format!("{}: no charts found", dir.display())));
    }
    Ok(out)
}

/// How well a deconstruction agrees with a manifest.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct ManifestMatch {
    /// Manifest groups plus the two scales.
    pub total: usize,
    pub matched: usize,
    pub mismatches: Vec<String>,
}

impl ManifestMatch {
    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.matched as f64 / self.total as f64
        }
    }
}

/// Compare group kinds and members, reactive-geometry anchors and scale
/// variants of `spec` against `manifest`.
pub fn compare_with_manifest(spec: &crate::deconstruct::DeclarativeSpec, manifest: &Manifest) -> ManifestMatch {
    use std::collections::BTreeSet;
    let set = |ids: &[String]| ids.iter().cloned().collect::<BTreeSet<String>>();
    let spec_sets: Vec<BTreeSet<String>> =
        spec.groups.iter().map(|g| g.members.iter().map(|m| m.0.clone()).collect()).collect();
    let find = |name: &str| manifest.group(name).and_then(|g| spec_sets.iter().position(|s| *s == set(&g.members)));
    let mut m = ManifestMatch::default();
    for mg in &manifest.groups {
        m.total += 1;
        let Some(gi) = find(&mg.name) else {
            m.mismatches.push(format!("{}: no group with the same members", mg.name));
            continue;
        };
        let g = &spec.groups[gi];
        if g.kind != mg.kind {
            m.mismatches.push(format!("{}: kind {:?}, expected {:?}", mg.name, g.kind, mg.kind));
            continue;
        }
        let mut ok = true;
        for a in manifest.anchors.iter().filter(|a| a.group == mg.name) {
            let got = g.layout.axis(a.orientation).rg();
            let expected_anchor = find(&a.anchor);
            match got {
                Some(rg) if Some(rg.anchor_group) == expected_anchor && rg.tuple.p == a.p && rg.tuple.p_a == a.p_a => {}
                Some(rg) => {
                    ok = false;
                    m.mismatches.push(format!(
                        "{} {:?}: anchored to group {} with ({:?}, {:?}), expected {} with ({:?}, {:?})",
                        mg.name, a.orientation, rg.anchor_group, rg.tuple.p, rg.tuple.p_a, a.anchor, a.p, a.p_a
                    ));
                }
                None => {
                    ok = false;
                    m.mismatches.push(format!("{} {:?}: no reactive geometry, expected anchor {}", mg.name, a.orientation, a.anchor));
                }
            }
        }
        if ok {
            m.matched += 1;
        }
    }
    for (name, expected, got) in [("x scale", &manifest.x_scale, &spec.x_scale), ("y scale", &manifest.y_scale, &spec.y_scale)] {
        m.total += 1;
        let same = match (expected, got) {
            (ManifestScale::Linear { inverted, .. }, crate::deconstruct::Scale::Linear { inverted: i, .. }) => inverted == i,
            (ManifestScale::Discrete { categories, .. }, crate::deconstruct::Scale::Discrete { categories: c, .. }) => categories == c,
            _ => false,
        };
        if same {
            m.matched += 1;
        } else {
            m.mismatches.push(format!("{name}: variant differs"));
        }
    }
    m
}
