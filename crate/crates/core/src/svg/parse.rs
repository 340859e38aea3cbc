use super::style::{parse_declarations, Stylesheet, INHERITED_PROPERTIES, PRESENTATION_PROPERTIES};
use super::transform::{parse_number_list, parse_transform};
use super::{parse_length, Affine, DocumentModel, ElementId, ElementKind, SvgError, VisualElement};
use indexmap::IndexMap;
use std::collections::HashSet;

const SVG_NS: &str = "http://www.w3.org/2000/svg";

/// Containers whose content is never drawn directly.
const NON_RENDERING: &[&str] = &[
    "defs",
    "clipPath",
    "mask",
    "marker",
    "pattern",
    "symbol",
    "linearGradient",
    "radialGradient",
    "filter",
    "style",
    "title",
    "desc",
    "script",
    "metadata",
];

/// Parse an SVG document into a [`DocumentModel`].
///
/// Unsupported content (`foreignObject`, external stylesheet imports) is
/// reported in `diagnostics` and otherwise skipped.
pub fn parse_svg(bytes: &[u8]) -> Result<DocumentModel, SvgError> {
    let text = std::str::from_utf8(bytes).map_err(|e| SvgError::MalformedDocument(format!("not UTF-8: {e}")))?;
    let opts = roxmltree::ParsingOptions { allow_dtd: true, ..Default::default() };
    let doc = roxmltree::Document::parse_with_options(text, opts)
        .map_err(|e| SvgError::MalformedDocument(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "svg" {
        return Err(SvgError::MalformedDocument(format!("root element is <{}>, expected <svg>", root.tag_name().name())));
    }

    let mut diagnostics = Vec::new();
    let css: String = doc
        .descendants()
        .filter(|n| n.is_element() && n.tag_name().name() == "style")
        .flat_map(|n| n.children().filter_map(|c| c.text()))
        .collect::<Vec<_>>()
        .join("\n");
    let sheet = Stylesheet::parse(&css, &mut diagnostics);

    let taken: HashSet<String> =
        doc.descendants().filter_map(|n| n.attribute("id")).map(str::to_string).collect();

    let namespaces = root
        .namespaces()
        .map(|ns| (ns.name().map(|p| format!("xmlns:{p}")).unwrap_or_else(|| "xmlns".to_string()), ns.uri().to_string()))
        .collect();

    let mut b = Builder { text, sheet, taken, seen: HashSet::new(), next_gen: 0, elements: IndexMap::new(), diagnostics };
    let root_id = b.visit(root, None, true);
    Ok(DocumentModel { root: root_id, elements: b.elements, diagnostics: b.diagnostics, namespaces })
}

struct Builder<'t> {
    text: &'t str,
    sheet: Stylesheet,
    taken: HashSet<String>,
    seen: HashSet<String>,
    next_gen: usize,
    elements: IndexMap<ElementId, VisualElement>,
    diagnostics: Vec<String>,
}

impl Builder<'_> {
    fn fresh_id(&mut self) -> ElementId {
        loop {
            let cand = format!("e{}", self.next_gen);
            self.next_gen += 1;
            if !self.taken.contains(&cand) && !self.seen.contains(&cand) {
                self.seen.insert(cand.clone());
                return ElementId(cand);
            }
        }
    }

    fn qualified_name(node: roxmltree::Node) -> String {
        let tn = node.tag_name();
        match tn.namespace() {
            Some(ns) if ns != SVG_NS => match node.lookup_prefix(ns) {
                Some(p) if !p.is_empty() => format!("{p}:{}", tn.name()),
                _ => tn.name().to_string(),
            },
            _ => tn.name().to_string(),
        }
    }

    fn visit(&mut self, node: roxmltree::Node, parent: Option<&ElementId>, rendered_ctx: bool) -> ElementId {
        let tag = Self::qualified_name(node);
        let explicit = node.attribute("id").filter(|id| !id.is_empty() && !self.seen.contains(*id));
        let id = match explicit {
            Some(v) => {
                self.seen.insert(v.to_string());
                ElementId(v.to_string())
            }
            None => self.fresh_id(),
        };
        let mut el = VisualElement::new(id.clone(), &tag);
        el.explicit_id = explicit.is_some();
        el.parent = parent.cloned();
        if node.tag_name().namespace().is_some_and(|ns| ns != SVG_NS) {
            el.kind = ElementKind::Other;
        }
        for a in node.attributes() {
            let name = match a.namespace() {
                Some(ns) => match node.lookup_prefix(ns) {
                    Some(p) if !p.is_empty() => format!("{p}:{}", a.name()),
                    _ => a.name().to_string(),
                },
                None => a.name().to_string(),
            };
            el.attributes.insert(name, a.value().to_string());
        }
        el.rendered = rendered_ctx && !NON_RENDERING.contains(&tag.as_str());

        let parent_el = parent.and_then(|p| self.elements.get(p));
        if let Some(d) = cascade(&self.sheet, &self.elements, &mut el, parent_el) {
            self.diagnostics.push(d);
        }
        el.ancestor_hidden = parent_el.is_some_and(|p| p.ancestor_hidden || p.property("display") == Some("none"));

        let own = match el.attributes.get("transform") {
            Some(t) => parse_transform(t).unwrap_or_else(|| {
                self.diagnostics.push(format!("{id}: unparseable transform {t:?} ignored"));
                Affine::IDENTITY
            }),
            None => Affine::IDENTITY,
        };
        let base = parent_el.map(|p| p.transform).unwrap_or(Affine::IDENTITY);
        el.transform = base.then_apply(&own);
        if tag == "svg" {
            el.transform = el.transform.then_apply(&viewport_transform(&el, parent.is_none()));
        }

        if tag == "foreignObject" {
            self.diagnostics.push(format!("{id}: unsupported feature <foreignObject> skipped"));
            el.opaque = Some(self.text[node.range()].to_string());
            self.elements.insert(id.clone(), el);
            return id;
        }

        let has_element_children = node.children().any(|c| c.is_element());
        if el.kind == ElementKind::Text {
            el.text_content = Some(text_lines(node).join("\n"));
            el.inner_raw = Some(self.inner_source(node));
            self.elements.insert(id.clone(), el);
            return id;
        }
        if !has_element_children {
            if node.has_children() {
                el.inner_raw = Some(self.inner_source(node));
            }
            self.elements.insert(id.clone(), el);
            return id;
        }

        let rendered = el.rendered;
        self.elements.insert(id.clone(), el);
        let mut children = Vec::new();
        for c in node.children().filter(|c| c.is_element()) {
            children.push(self.visit(c, Some(&id), rendered));
        }
        self.elements.get_mut(&id).unwrap().children = children;
        id
    }

    fn inner_source(&self, node: roxmltree::Node) -> String {
        match (node.first_child(), node.last_child()) {
            (Some(f), Some(l)) => self.text[f.range().start..l.range().end].to_string(),
            _ => String::new(),
        }
    }
}

/// Resolve presentation properties: inherited values, then presentation
/// attributes, stylesheet rules, and inline style. Returns a diagnostic for
/// an unusable font-size.
fn cascade(
    sheet: &Stylesheet,
    elements: &IndexMap<ElementId, VisualElement>,
    el: &mut VisualElement,
    parent: Option<&VisualElement>,
) -> Option<String> {
    let parent_fs = parent.map(|p| p.font_size()).unwrap_or(16.0);
    let mut props: IndexMap<String, String> = IndexMap::new();
    if let Some(p) = parent {
        for name in INHERITED_PROPERTIES {
            if let Some(v) = p.computed.get(*name) {
                props.insert(name.to_string(), v.clone());
            }
        }
    }
    for name in PRESENTATION_PROPERTIES {
        if let Some(v) = el.attributes.get(*name) {
            props.insert(name.to_string(), v.trim().to_string());
        }
    }
    let mut ancestors: Vec<&VisualElement> = Vec::new();
    let mut cur = parent;
    while let Some(p) = cur {
        ancestors.push(p);
        cur = p.parent.as_ref().and_then(|pid| elements.get(pid));
    }
    let mut cascaded = Vec::new();
    if !sheet.is_empty() {
        for (k, v) in sheet.matching(el, &ancestors) {
            for (k, v) in expand_shorthand(k, v) {
                cascaded.push(k.clone());
                props.insert(k, v);
            }
        }
    }
    if let Some(style) = el.attributes.get("style") {
        for (k, v) in parse_declarations(style) {
            for (k, v) in expand_shorthand(&k, &v) {
                cascaded.push(k.clone());
                props.insert(k, v);
            }
        }
    }
    // inherit keyword resolves to the parent value
    let inherit: Vec<String> = props.iter().filter(|(_, v)| v.as_str() == "inherit").map(|(k, _)| k.clone()).collect();
    for k in inherit {
        match parent.and_then(|p| p.computed.get(&k)) {
            Some(v) => props.insert(k, v.clone()),
            None => props.shift_remove(&k),
        };
    }
    let mut diagnostic = None;
    let own_fs = match props.get("font-size") {
        Some(v) => resolve_font_size(v, parent_fs).unwrap_or_else(|| {
            diagnostic = Some(format!("{}: unrecognized font-size {v:?}", el.id));
            parent_fs
        }),
        None => parent_fs,
    };
    if parent.is_some() || props.contains_key("font-size") {
        props.insert("font-size".to_string(), own_fs.to_string());
    }
    cascaded.sort();
    cascaded.dedup();
    el.computed = props;
    el.cascaded = cascaded;
    diagnostic
}


/// Split the `font` shorthand into the longhands the metrics model reads.
fn expand_shorthand(k: &str, v: &str) -> Vec<(String, String)> {
    if k != "font" {
        return vec![(k.to_string(), v.to_string())];
    }
    let mut out = Vec::new();
    let mut tokens = v.split_whitespace().peekable();
    while let Some(t) = tokens.next() {
        let size = t.split('/').next().unwrap_or(t);
        if parse_length(size, 16.0).is_some() && size.chars().any(|c| c.is_ascii_alphabetic() || c == '%') {
            out.push(("font-size".to_string(), size.to_string()));
            let family: Vec<&str> = tokens.by_ref().collect();
            if !family.is_empty() {
                out.push(("font-family".to_string(), family.join(" ")));
            }
            break;
        }
        match t {
            "bold" | "bolder" | "lighter" => out.push(("font-weight".to_string(), t.to_string())),
            "italic" | "oblique" => out.push(("font-style".to_string(), t.to_string())),
            _ if t.parse::<u32>().is_ok() => out.push(("font-weight".to_string(), t.to_string())),
            _ => {}
        }
    }
    out
}

fn resolve_font_size(v: &str, parent_fs: f64) -> Option<f64> {
    let keyword = match v.trim() {
        "xx-small" => Some(9.0),
        "x-small" => Some(10.0),
        "small" => Some(13.0),
        "medium" => Some(16.0),
        "large" => Some(18.0),
        "x-large" => Some(24.0),
        "xx-large" => Some(32.0),
        "smaller" => Some(parent_fs / 1.2),
        "larger" => Some(parent_fs * 1.2),
        _ => None,
    };
    keyword.or_else(|| parse_length(v, parent_fs)).filter(|s| *s >= 0.0)
}

/// Transform established by an `<svg>` element's position and viewBox.
fn viewport_transform(el: &VisualElement, is_root: bool) -> Affine {
    let offset = if is_root {
        Affine::IDENTITY
    } else {
        Affine::translate(el.num_attr_or("x", 0.0), el.num_attr_or("y", 0.0))
    };
    let Some(vb) = el.attr("viewBox").and_then(parse_number_list).filter(|v| v.len() == 4) else {
        return offset;
    };
    let (minx, miny, vw, vh) = (vb[0], vb[1], vb[2], vb[3]);
    if vw <= 0.0 || vh <= 0.0 {
        return offset;
    }
    let w = el.num_attr("width").unwrap_or(vw);
    let h = el.num_attr("height").unwrap_or(vh);
    let par = el.attr("preserveAspectRatio").unwrap_or("xMidYMid meet");
    let (sx, sy, tx, ty) = if par.trim_start().starts_with("none") {
        (w / vw, h / vh, 0.0, 0.0)
    } else {
        let s = if par.contains("slice") { (w / vw).max(h / vh) } else { (w / vw).min(h / vh) };
        let align = par.split_whitespace().next().unwrap_or("xMidYMid");
        let fx = if align.contains("xMin") { 0.0 } else if align.contains("xMax") { 1.0 } else { 0.5 };
        let fy = if align.contains("YMin") { 0.0 } else if align.contains("YMax") { 1.0 } else { 0.5 };
        (s, s, (w - vw * s) * fx, (h - vh * s) * fy)
    };
    offset
        .then_apply(&Affine::translate(tx, ty))
        .then_apply(&Affine::scale(sx, sy))
        .then_apply(&Affine::translate(-minx, -miny))
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lines of a `<text>` element. Child spans that reposition vertically
/// (`y` or `dy`) start a new line.
fn text_lines(node: roxmltree::Node) -> Vec<String> {
    let mut lines: Vec<String> = vec![String::new()];
    for child in node.children() {
        if child.is_text() {
            lines.last_mut().unwrap().push_str(child.text().unwrap_or(""));
        } else if child.is_element() {
            let breaks = child.has_attribute("y") || child.has_attribute("dy");
            let content: String = child.descendants().filter(|d| d.is_text()).filter_map(|d| d.text()).collect();
            if breaks && !collapse(lines.last().unwrap()).is_empty() {
                lines.push(content);
            } else {
                lines.last_mut().unwrap().push_str(&content);
            }
        }
    }
    let out: Vec<String> = lines.iter().map(|l| collapse(l)).filter(|l| !l.is_empty()).collect();
    if out.is_empty() {
        vec![String::new()]
    } else {
        out
    }
}
