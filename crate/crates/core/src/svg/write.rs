use super::{fmt_num, DocumentModel, ElementId, ElementKind, TextMetricsConfig, VisualElement};
use std::fmt::Write as _;

/// Serialize the model back to SVG markup.
///
/// Untouched text content and unmodeled inner markup are written verbatim;
/// wrapped text is emitted as one `<tspan>` per line.
pub fn serialize(model: &DocumentModel) -> String {
    let mut out = String::with_capacity(model.len() * 96);
    write_element(model, &model.root, true, &mut out);
    out.push('\n');
    out
}

fn escape_attr(v: &str) -> String {
    v.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn escape_text(v: &str) -> String {
    v.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write_element(model: &DocumentModel, id: &ElementId, is_root: bool, out: &mut String) {
    let Some(e) = model.get(id) else { return };
    if let Some(raw) = &e.opaque {
        out.push_str(raw);
        return;
    }
    let _ = write!(out, "<{}", e.tag);
    if is_root {
        let mut has_default = false;
        for (k, v) in &model.namespaces {
            has_default |= k == "xmlns";
            let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
        }
        if !has_default {
            out.push_str(" xmlns=\"http://www.w3.org/2000/svg\"");
        }
        let uses_xlink = model.elements.values().any(|el| el.attributes.keys().any(|k| k.starts_with("xlink:")));
        if uses_xlink && !model.namespaces.iter().any(|(k, _)| k == "xmlns:xlink") {
            out.push_str(" xmlns:xlink=\"http://www.w3.org/1999/xlink\"");
        }
    }
    for (k, v) in &e.attributes {
        if k == "xmlns" || k.starts_with("xmlns:") {
            continue;
        }
        let _ = write!(out, " {k}=\"{}\"", escape_attr(v));
    }

    let inner = inner_markup(model, e);
    if inner.is_empty() {
        out.push_str("/>");
    } else {
        out.push('>');
        out.push_str(&inner);
        let _ = write!(out, "</{}>", e.tag);
    }
}

fn inner_markup(model: &DocumentModel, e: &VisualElement) -> String {
    if e.kind == ElementKind::Text && e.text_dirty {
        return text_markup(e);
    }
    if let Some(raw) = &e.inner_raw {
        return raw.clone();
    }
    let mut s = String::new();
    for c in &e.children {
        s.push('\n');
        write_element(model, c, false, &mut s);
    }
    if !s.is_empty() {
        s.push('\n');
    }
    s
}

fn text_markup(e: &VisualElement) -> String {
    let lines = e.text_lines();
    if lines.len() <= 1 {
        return escape_text(lines.first().copied().unwrap_or(""));
    }
    let x = e.attr("x").map(str::to_string).unwrap_or_else(|| "0".to_string());
    let lh = TextMetricsConfig::default().line_height_ratio;
    let mut s = String::new();
    for (i, line) in lines.iter().enumerate() {
        if i == 0 {
            let _ = write!(s, "<tspan x=\"{}\">{}</tspan>", escape_attr(&x), escape_text(line));
        } else {
            let _ = write!(s, "<tspan x=\"{}\" dy=\"{}em\">{}</tspan>", escape_attr(&x), fmt_num(lh), escape_text(line));
        }
    }
    s
}
