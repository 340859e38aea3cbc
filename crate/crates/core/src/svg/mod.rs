//! SVG document model: parsed element tree with resolved presentation
//! properties, accumulated transforms, geometric bounds, and serialization.

mod bbox;
mod parse;
pub mod path;
pub mod style;
pub mod transform;
mod write;

pub use bbox::compute_bbox;
pub use parse::parse_svg;
pub use transform::Affine;
pub use write::serialize;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SvgError {
    #[error("malformed document: {0}")]
    MalformedDocument(String),
}

/// Stable element identifier, unique within a document.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ElementId(pub String);

impl ElementId {
    pub fn new(id: impl Into<String>) -> Self {
        ElementId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ElementKind {
    Text,
    Rect,
    Circle,
    Ellipse,
    Line,
    Path,
    Group,
    Other,
}

impl ElementKind {
    pub fn from_tag(tag: &str) -> ElementKind {
        match tag {
            "text" => ElementKind::Text,
            "rect" => ElementKind::Rect,
            "circle" => ElementKind::Circle,
            "ellipse" => ElementKind::Ellipse,
            "line" => ElementKind::Line,
            "path" | "polyline" | "polygon" => ElementKind::Path,
            "g" | "svg" | "a" | "switch" => ElementKind::Group,
            _ => ElementKind::Other,
        }
    }

    pub fn is_shape(self) -> bool {
        matches!(
            self,
            ElementKind::Rect | ElementKind::Circle | ElementKind::Ellipse | ElementKind::Line | ElementKind::Path
        )
    }
}

/// Axis-aligned rectangle in viewport pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2D {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect2D {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Rect2D {
            x_min: x_min.min(x_max),
            y_min: y_min.min(y_max),
            x_max: x_max.max(x_min),
            y_max: y_max.max(y_min),
        }
    }

    pub fn from_points(points: impl IntoIterator<Item = (f64, f64)>) -> Option<Rect2D> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect2D { x_min: first.0, y_min: first.1, x_max: first.0, y_max: first.1 };
        for (x, y) in it {
            r.x_min = r.x_min.min(x);
            r.y_min = r.y_min.min(y);
            r.x_max = r.x_max.max(x);
            r.y_max = r.y_max.max(y);
        }
        Some(r)
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> (f64, f64) {
        ((self.x_min + self.x_max) / 2.0, (self.y_min + self.y_max) / 2.0)
    }

    pub fn union(&self, other: &Rect2D) -> Rect2D {
        Rect2D {
            x_min: self.x_min.min(other.x_min),
            y_min: self.y_min.min(other.y_min),
            x_max: self.x_max.max(other.x_max),
            y_max: self.y_max.max(other.y_max),
        }
    }

    pub fn intersection_area(&self, other: &Rect2D) -> f64 {
        let w = self.x_max.min(other.x_max) - self.x_min.max(other.x_min);
        let h = self.y_max.min(other.y_max) - self.y_min.max(other.y_min);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Rect2D {
        Rect2D { x_min: self.x_min + dx, y_min: self.y_min + dy, x_max: self.x_max + dx, y_max: self.y_max + dy }
    }

    pub fn transformed(&self, m: &Affine) -> Rect2D {
        if m.is_identity() {
            return *self;
        }
        let corners = [
            m.apply(self.x_min, self.y_min),
            m.apply(self.x_max, self.y_min),
            m.apply(self.x_min, self.y_max),
            m.apply(self.x_max, self.y_max),
        ];
        Rect2D::from_points(corners).expect("four corners")
    }

    /// Largest per-edge distance to `other`.
    pub fn max_edge_distance(&self, other: &Rect2D) -> f64 {
        (self.x_min - other.x_min)
            .abs()
            .max((self.y_min - other.y_min).abs())
            .max((self.x_max - other.x_max).abs())
            .max((self.y_max - other.y_max).abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Viewport {
    pub width: f64,
    pub height: f64,
}

impl Default for Viewport {
    fn default() -> Self {
        Viewport { width: 375.0, height: 812.0 }
    }
}

impl Viewport {
    pub fn new(width: f64, height: f64) -> Option<Viewport> {
        (width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()).then_some(Viewport { width, height })
    }
}

impl std::str::FromStr for Viewport {
    type Err = String;

    /// `WIDTHxHEIGHT` in px, e.g. `375x812`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (w, h) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
        let w: f64 = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
        let h: f64 = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
        Viewport::new(w, h).ok_or_else(|| format!("viewport must be positive, got {s:?}"))
    }
}

/// Fixed-ratio text measurement used in place of a browser layout engine.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TextMetricsConfig {
    /// Advance width per character, as a multiple of the font size.
    pub avg_char_width_ratio: f64,
    /// Line box height, as a multiple of the font size.
    pub line_height_ratio: f64,
}

impl Default for TextMetricsConfig {
    fn default() -> Self {
        TextMetricsConfig { avg_char_width_ratio: 0.6, line_height_ratio: 1.2 }
    }
}

impl TextMetricsConfig {
    /// Baseline sits at this fraction of the line box, measured from its top.
    pub const BASELINE_RATIO: f64 = 0.8;

    pub fn text_width(&self, text: &str, font_size: f64) -> f64 {
        text.chars().count() as f64 * font_size * self.avg_char_width_ratio
    }

    pub fn line_height(&self, font_size: f64) -> f64 {
        font_size * self.line_height_ratio
    }
}

/// One node of the document tree.
#[derive(Debug, Clone, PartialEq)]
pub struct VisualElement {
    pub id: ElementId,
    pub tag: String,
    pub kind: ElementKind,
    /// Raw attributes as written in the source, in source order.
    pub attributes: IndexMap<String, String>,
    /// Resolved presentation properties after cascade and inheritance.
    pub computed: IndexMap<String, String>,
    /// Properties whose winning declaration came from a stylesheet or inline style.
    pub(crate) cascaded: Vec<String>,
    /// Text of a `<text>` element; wrapped lines are separated by `\n`.
    pub text_content: Option<String>,
    /// Accumulated transform: own `transform` composed with all ancestors'.
    pub transform: Affine,
    pub parent: Option<ElementId>,
    pub children: Vec<ElementId>,
    /// Whether `id` came from the source (and is therefore written back).
    pub explicit_id: bool,
    /// False inside non-rendering containers such as `<defs>`.
    pub rendered: bool,
    pub(crate) ancestor_hidden: bool,
    /// Source markup between the start and end tag, for content we do not model.
    pub(crate) inner_raw: Option<String>,
    pub(crate) text_dirty: bool,
    /// Whole-element markup for skipped unsupported subtrees.
    pub(crate) opaque: Option<String>,
}

/// Format a number with at most 3 decimals and no trailing zeros.
pub fn fmt_num(v: f64) -> String {
    let r = (v * 1000.0).round() / 1000.0;
    let mut s = format!("{r:.3}");
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    if s == "-0" {
        s = "0".to_string();
    }
    s
}

/// Parse a CSS/SVG length to px. `em` is relative to `font_size`.
pub fn parse_length(src: &str, font_size: f64) -> Option<f64> {
    let s = src.trim();
    let split = s.find(|c: char| c.is_ascii_alphabetic() || c == '%').unwrap_or(s.len());
    let (num, unit) = s.split_at(split);
    let v: f64 = num.trim().parse().ok()?;
    let px = match unit.trim() {
        "" | "px" => v,
        "pt" => v * 4.0 / 3.0,
        "pc" => v * 16.0,
        "in" => v * 96.0,
        "cm" => v * 96.0 / 2.54,
        "mm" => v * 96.0 / 25.4,
        "em" | "rem" => v * font_size,
        "ex" => v * font_size / 2.0,
        "%" => v * font_size / 100.0,
        _ => return None,
    };
    px.is_finite().then_some(px)
}

impl VisualElement {
    pub(crate) fn new(id: ElementId, tag: &str) -> Self {
        VisualElement {
            id,
            tag: tag.to_string(),
            kind: ElementKind::from_tag(tag),
            attributes: IndexMap::new(),
            computed: IndexMap::new(),
            cascaded: Vec::new(),
            text_content: None,
            transform: Affine::IDENTITY,
            parent: None,
            children: Vec::new(),
            explicit_id: false,
            rendered: true,
            ancestor_hidden: false,
            inner_raw: None,
            text_dirty: false,
            opaque: None,
        }
    }

    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes.get(name).map(String::as_str)
    }

    pub fn property(&self, name: &str) -> Option<&str> {
        self.computed.get(name).map(String::as_str)
    }

    /// First number of an attribute (lists such as `x="1 2 3"` yield 1).
    pub fn num_attr(&self, name: &str) -> Option<f64> {
        let raw = self.attributes.get(name)?;
        let first = raw.split([' ', ',']).find(|t| !t.is_empty())?;
        parse_length(first, self.font_size())
    }

    pub fn num_attr_or(&self, name: &str, default: f64) -> f64 {
        self.num_attr(name).unwrap_or(default)
    }

    pub fn set_num_attr(&mut self, name: &str, value: f64) {
        self.attributes.insert(name.to_string(), fmt_num(value));
    }

    /// Resolved font size in px (16 when nothing sets it).
    pub fn font_size(&self) -> f64 {
        self.computed.get("font-size").and_then(|v| v.parse().ok()).unwrap_or(16.0)
    }

    /// Set a presentation property so that it wins the cascade on re-parse.
    pub fn set_property(&mut self, name: &str, value: &str) {
        if self.cascaded.iter().any(|p| p == name) || self.inline_style_has(name) {
            let mut decls = self.attributes.get("style").map(|s| style::parse_declarations(s)).unwrap_or_default();
            match decls.iter_mut().find(|(k, _)| k == name) {
                Some(d) => d.1 = value.to_string(),
                None => decls.push((name.to_string(), value.to_string())),
            }
            let joined = decls.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(";");
            self.attributes.insert("style".to_string(), joined);
        } else {
            self.attributes.insert(name.to_string(), value.to_string());
        }
        self.computed.insert(name.to_string(), value.to_string());
    }

    fn inline_style_has(&self, name: &str) -> bool {
        self.attributes
            .get("style")
            .map(|s| style::parse_declarations(s).iter().any(|(k, _)| k == name))
            .unwrap_or(false)
    }

    pub fn set_font_size(&mut self, px: f64) {
        self.set_property("font-size", &fmt_num(px.max(0.001)));
    }

    /// Rendered and not hidden by `display` or `visibility`.
    pub fn is_visible(&self) -> bool {
        self.rendered
            && !self.ancestor_hidden
            && self.property("display") != Some("none")
            && self.property("visibility") != Some("hidden")
    }

    pub fn set_hidden(&mut self, hidden: bool) {
        if hidden {
            self.set_property("display", "none");
        } else if self.property("display") == Some("none") {
            self.attributes.shift_remove("display");
            self.computed.shift_remove("display");
        }
    }

    /// Text lines (a single line unless wrapped).
    pub fn text_lines(&self) -> Vec<&str> {
        match &self.text_content {
            Some(t) => t.split('\n').collect(),
            None => Vec::new(),
        }
    }

    pub fn set_text(&mut self, text: &str) {
        self.text_content = Some(text.to_string());
        self.text_dirty = true;
    }

    pub fn has_class(&self, class: &str) -> bool {
        self.attr("class").map(|c| c.split_whitespace().any(|t| t == class)).unwrap_or(false)
    }

    /// Shift the element by `(dx, dy)` in viewport coordinates.
    pub fn translate_global(&mut self, dx: f64, dy: f64) {
        if dx == 0.0 && dy == 0.0 {
            return;
        }
        let (lx, ly) = match self.transform.inverse() {
            Some(inv) => inv.apply_vector(dx, dy),
            None => return,
        };
        self.translate_local(lx, ly);
    }

    /// Shift the element's own geometry attributes by a local-space vector.
    pub fn translate_local(&mut self, dx: f64, dy: f64) {
        match self.tag.as_str() {
            "rect" | "text" | "image" | "use" | "foreignObject" => {
                if dx != 0.0 {
                    let x = self.num_attr_or("x", 0.0);
                    self.set_num_attr("x", x + dx);
                }
                if dy != 0.0 {
                    let y = self.num_attr_or("y", 0.0);
                    self.set_num_attr("y", y + dy);
                }
                if self.kind == ElementKind::Text && self.text_content.as_deref().is_some_and(|t| t.contains('\n')) {
                    self.text_dirty = true;
                }
            }
            "circle" | "ellipse" => {
                if dx != 0.0 {
                    let x = self.num_attr_or("cx", 0.0);
                    self.set_num_attr("cx", x + dx);
                }
                if dy != 0.0 {
                    let y = self.num_attr_or("cy", 0.0);
                    self.set_num_attr("cy", y + dy);
                }
            }
            "line" => {
                for (k, d) in [("x1", dx), ("x2", dx), ("y1", dy), ("y2", dy)] {
                    if d != 0.0 {
                        let v = self.num_attr_or(k, 0.0);
                        self.set_num_attr(k, v + d);
                    }
                }
            }
            "path" | "polyline" | "polygon" => self.map_local_points(|x, y| (x + dx, y + dy)),
            _ => {}
        }
    }

    fn map_local_points(&mut self, mut f: impl FnMut(f64, f64) -> (f64, f64)) {
        if self.tag == "path" {
            if let Some(d) = self.attributes.get("d") {
                let mut data = path::PathData::parse(d);
                data.map_points(&mut f);
                self.attributes.insert("d".to_string(), data.to_svg());
            }
        } else if let Some(points) = self.attributes.get("points") {
            let nums = transform::parse_number_list(points).unwrap_or_default();
            let mapped: Vec<String> = nums
                .chunks_exact(2)
                .map(|c| {
                    let (x, y) = f(c[0], c[1]);
                    format!("{},{}", fmt_num(x), fmt_num(y))
                })
                .collect();
            self.attributes.insert("points".to_string(), mapped.join(" "));
        }
    }

    /// Remap the element through `f` (viewport → viewport). Stretchable
    /// geometry (rect extents, line endpoints, path vertices) is mapped point
    /// by point; anchored geometry (text, circles) moves with its anchor.
    pub fn map_global(&mut self, f: &dyn Fn(f64, f64) -> (f64, f64)) {
        let m = self.transform;
        let Some(inv) = m.inverse() else { return };
        let g = |x: f64, y: f64| {
            let (gx, gy) = m.apply(x, y);
            let (nx, ny) = f(gx, gy);
            inv.apply(nx, ny)
        };
        match self.tag.as_str() {
            "rect" | "image" | "use" | "foreignObject" => {
                let x = self.num_attr_or("x", 0.0);
                let y = self.num_attr_or("y", 0.0);
                let (Some(w), Some(h)) = (self.num_attr("width"), self.num_attr("height")) else {
                    let (nx, ny) = g(x, y);
                    self.translate_local(nx - x, ny - y);
                    return;
                };
                let (ax, ay) = g(x, y);
                let (bx, by) = g(x + w, y + h);
                self.set_num_attr("x", ax.min(bx));
                self.set_num_attr("y", ay.min(by));
                self.set_num_attr("width", (bx - ax).abs());
                self.set_num_attr("height", (by - ay).abs());
            }
            "line" => {
                let (x1, y1) = (self.num_attr_or("x1", 0.0), self.num_attr_or("y1", 0.0));
                let (x2, y2) = (self.num_attr_or("x2", 0.0), self.num_attr_or("y2", 0.0));
                let a = g(x1, y1);
                let b = g(x2, y2);
                for (k, old, new) in [("x1", x1, a.0), ("y1", y1, a.1), ("x2", x2, b.0), ("y2", y2, b.1)] {
                    if (old - new).abs() > 1e-9 {
                        self.set_num_attr(k, new);
                    }
                }
            }
            "path" | "polyline" | "polygon" => self.map_local_points(g),
            _ => self.map_rigid(f),
        }
    }

    /// Move the element so that its reference point follows `f`, keeping its shape.
    pub fn map_rigid(&mut self, f: &dyn Fn(f64, f64) -> (f64, f64)) {
        let (rx, ry) = self.reference_point();
        let (gx, gy) = self.transform.apply(rx, ry);
        let (nx, ny) = f(gx, gy);
        self.translate_global(nx - gx, ny - gy);
    }

    /// Local-space point that identifies the element's position.
    pub fn reference_point(&self) -> (f64, f64) {
        match self.tag.as_str() {
            "circle" | "ellipse" => (self.num_attr_or("cx", 0.0), self.num_attr_or("cy", 0.0)),
            "line" => (self.num_attr_or("x1", 0.0), self.num_attr_or("y1", 0.0)),
            "path" | "polyline" | "polygon" => {
                let pts = match self.attributes.get("d") {
                    Some(d) => path::PathData::parse(d).hull_points(),
                    None => transform::parse_number_list(self.attr("points").unwrap_or(""))
                        .unwrap_or_default()
                        .chunks_exact(2)
                        .map(|c| (c[0], c[1]))
                        .collect(),
                };
                pts.first().copied().unwrap_or((0.0, 0.0))
            }
            _ => (self.num_attr_or("x", 0.0), self.num_attr_or("y", 0.0)),
        }
    }
}

impl style::Selectable for VisualElement {
    fn tag(&self) -> &str {
        &self.tag
    }
    fn id_attr(&self) -> Option<&str> {
        self.attr("id")
    }
    fn has_class(&self, class: &str) -> bool {
        VisualElement::has_class(self, class)
    }
}

/// Parsed SVG document. Elements are stored in an insertion-ordered map;
/// document order is the pre-order traversal from `root`.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentModel {
    pub root: ElementId,
    pub elements: IndexMap<ElementId, VisualElement>,
    /// Non-fatal problems found while parsing (unsupported features, etc.).
    pub diagnostics: Vec<String>,
    pub(crate) namespaces: Vec<(String, String)>,
}

impl DocumentModel {
    pub fn get(&self, id: &ElementId) -> Option<&VisualElement> {
        self.elements.get(id)
    }

    pub fn get_mut(&mut self, id: &ElementId) -> Option<&mut VisualElement> {
        self.elements.get_mut(id)
    }

    pub fn index_of(&self, id: &ElementId) -> Option<usize> {
        self.elements.get_index_of(id)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.len() <= 1
    }

    /// Element ids in document (pre-order) order, root first.
    pub fn document_order(&self) -> Vec<ElementId> {
        let mut out = Vec::with_capacity(self.elements.len());
        let mut stack = vec![self.root.clone()];
        while let Some(id) = stack.pop() {
            if let Some(e) = self.elements.get(&id) {
                stack.extend(e.children.iter().rev().cloned());
            }
            out.push(id);
        }
        out
    }

    /// Leaf elements that are drawn: rendered, visible, and not containers.
    pub fn visible_leaves(&self) -> Vec<ElementId> {
        self.document_order()
            .into_iter()
            .filter(|id| {
                let e = &self.elements[id];
                e.is_visible() && e.kind != ElementKind::Group && e.kind != ElementKind::Other && e.opaque.is_none()
            })
            .collect()
    }

    /// Bounding boxes for every element, indexed like `elements`. Groups get
    /// the union of their children.
    pub fn all_bboxes(&self, metrics: &TextMetricsConfig) -> Vec<Option<Rect2D>> {
        let mut out: Vec<Option<Rect2D>> = self.elements.values().map(|e| compute_bbox(e, metrics)).collect();
        let order = self.document_order();
        for id in order.iter().rev() {
            let idx = self.elements.get_index_of(id).unwrap();
            let e = &self.elements[idx];
            if e.kind == ElementKind::Group && e.is_visible() {
                let mut acc: Option<Rect2D> = None;
                for c in &e.children {
                    let ci = self.elements.get_index_of(c).unwrap();
                    if !self.elements[ci].is_visible() {
                        continue;
                    }
                    if let Some(b) = out[ci] {
                        acc = Some(acc.map_or(b, |a| a.union(&b)));
                    }
                }
                out[idx] = acc;
            }
        }
        out
    }

    /// Bounding box of a single element; groups are the union of their subtree.
    pub fn bbox(&self, id: &ElementId, metrics: &TextMetricsConfig) -> Option<Rect2D> {
        let e = self.elements.get(id)?;
        if e.kind == ElementKind::Group {
            let mut acc: Option<Rect2D> = None;
            for c in &e.children {
                if !self.elements.get(c).is_some_and(|x| x.is_visible()) {
                    continue;
                }
                if let Some(b) = self.bbox(c, metrics) {
                    acc = Some(acc.map_or(b, |a| a.union(&b)));
                }
            }
            acc
        } else {
            compute_bbox(e, metrics)
        }
    }

    /// Insert a copy of `template` under the same parent, right after
    /// `after` in the child list, with a new explicit id.
    pub fn insert_clone(&mut self, template: &ElementId, after: &ElementId, new_id: ElementId) -> Option<()> {
        let mut el = self.elements.get(template)?.clone();
        if !el.children.is_empty() || self.elements.contains_key(&new_id) {
            return None;
        }
        el.id = new_id.clone();
        el.explicit_id = true;
        el.attributes.insert("id".to_string(), new_id.0.clone());
        let parent = el.parent.clone()?;
        self.elements.insert(new_id.clone(), el);
        let p = self.elements.get_mut(&parent)?;
        let pos = p.children.iter().position(|c| c == after).map(|i| i + 1).unwrap_or(p.children.len());
        p.children.insert(pos, new_id);
        Some(())
    }

    /// Remove a leaf element.
    pub fn remove_leaf(&mut self, id: &ElementId) {
        if let Some(e) = self.elements.shift_remove(id) {
            if let Some(p) = e.parent.and_then(|p| self.elements.get_mut(&p)) {
                p.children.retain(|c| c != id);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_num_trims() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(1.23456), "1.235");
        assert_eq!(fmt_num(-0.0001), "0");
        assert_eq!(fmt_num(12.5), "12.5");
    }

    #[test]
    fn lengths() {
        assert_eq!(parse_length("12px", 10.0), Some(12.0));
        assert_eq!(parse_length(".71em", 10.0), Some(7.1));
        assert_eq!(parse_length("9pt", 10.0), Some(12.0));
        assert_eq!(parse_length("abc", 10.0), None);
    }

    #[test]
    fn viewport_from_str() {
        let v: Viewport = "375x812".parse().unwrap();
        assert_eq!(v, Viewport { width: 375.0, height: 812.0 });
        assert!("0x10".parse::<Viewport>().is_err());
        assert!("375".parse::<Viewport>().is_err());
    }

    #[test]
    fn rect_intersection() {
        let a = Rect2D::new(0.0, 0.0, 20.0, 10.0);
        let b = a.translated(10.0, 0.0);
        assert_eq!(a.intersection_area(&b), 100.0);
        assert_eq!(a.intersection_area(&a.translated(20.0, 0.0)), 0.0);
    }
}
