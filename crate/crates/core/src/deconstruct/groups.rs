use super::DeconstructError;
use crate::svg::{compute_bbox, style::parse_declarations, DocumentModel, ElementId, ElementKind, TextMetricsConfig, VisualElement};
use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

/// Typographic properties whose values (not just presence) split groups.
const TYPOGRAPHIC: &[&str] = &["font-size", "font-family", "font-weight", "text-anchor", "dominant-baseline"];

/// A property of the shared encoding and whether all members agree on its value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignatureEntry {
    pub property: String,
    pub shared: bool,
}

/// A cluster of elements with the same encoding, before classification.
#[derive(Debug, Clone, PartialEq)]
pub struct RawGroup {
    pub element_kind: ElementKind,
    pub members: Vec<ElementId>,
    pub signature: Vec<SignatureEntry>,
    pub key: String,
    pub font_size: Option<f64>,
}

/// Partition visible leaf elements with computable geometry into groups
/// keyed by element kind and encoding signature. Groups are ordered by their
/// first member in document order.
pub fn detect_groups(model: &DocumentModel, metrics: &TextMetricsConfig) -> Result<Vec<RawGroup>, DeconstructError> {
    let mut clusters: IndexMap<String, Vec<ElementId>> = IndexMap::new();
    for id in model.visible_leaves() {
        let e = &model.elements[&id];
        if compute_bbox(e, metrics).is_none() {
            continue;
        }
        clusters.entry(group_key(model, e)).or_default().push(id);
    }
    if clusters.is_empty() {
        return Err(DeconstructError::EmptyDocument);
    }
    Ok(clusters
        .into_iter()
        .map(|(key, members)| {
            let first = &model.elements[&members[0]];
            let props = property_names(first);
            let value = |e: &VisualElement, p: &str| -> Option<String> {
                if p == "#text" {
                    e.text_content.clone()
                } else {
                    e.attr(p).map(str::to_string).or_else(|| e.property(p).map(str::to_string))
                }
            };
            let mut names: Vec<String> = props;
            if first.kind == ElementKind::Text {
                names.push("#text".to_string());
            }
            let signature = names
                .into_iter()
                .map(|p| {
                    let v0 = value(first, &p);
                    let shared = members.iter().all(|m| value(&model.elements[m], &p) == v0);
                    SignatureEntry { property: p, shared }
                })
                .collect();
            RawGroup {
                element_kind: first.kind,
                font_size: (first.kind == ElementKind::Text).then(|| first.font_size()),
                members,
                signature,
                key,
            }
        })
        .collect())
}

/// Attribute and inline-style property names present on `e`, sorted.
fn property_names(e: &VisualElement) -> Vec<String> {
    let mut names: Vec<String> = e.attributes.keys().filter(|k| *k != "id" && *k != "style").cloned().collect();
    if let Some(style) = e.attr("style") {
        names.extend(parse_declarations(style).into_iter().map(|(k, _)| k));
    }
    names.sort();
    names.dedup();
    names
}

/// Kind, tag, own and parent class, property names, typographic values and,
/// for lines, orientation and length. Colors are deliberately left out so
/// that multi-series marks share a group.
fn group_key(model: &DocumentModel, e: &VisualElement) -> String {
    let parent_class = e.parent.as_ref().and_then(|p| model.get(p)).and_then(|p| p.attr("class")).unwrap_or("");
    let mut key = format!(
        "{:?}|{}|{}|{}|{}",
        e.kind,
        e.tag,
        e.attr("class").unwrap_or("").trim(),
        parent_class.trim(),
        property_names(e).join(",")
    );
    if e.kind == ElementKind::Text {
        for p in TYPOGRAPHIC {
            key.push('|');
            key.push_str(e.property(p).unwrap_or(""));
        }
    }
    if e.kind == ElementKind::Line {
        let (x1, y1) = e.transform.apply(e.num_attr_or("x1", 0.0), e.num_attr_or("y1", 0.0));
        let (x2, y2) = e.transform.apply(e.num_attr_or("x2", 0.0), e.num_attr_or("y2", 0.0));
        let (dx, dy) = ((x2 - x1).abs(), (y2 - y1).abs());
        let orient = if dx < 0.5 && dy < 0.5 {
            "point"
        } else if dx < 0.5 {
            "v"
        } else if dy < 0.5 {
            "h"
        } else {
            "d"
        };
        key.push_str(&format!("|{orient}|{}", (dx.hypot(dy)).round()));
    }
    key
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::svg::parse_svg;

    fn groups(src: &str) -> Vec<RawGroup> {
        detect_groups(&parse_svg(src.as_bytes()).unwrap(), &TextMetricsConfig::default()).unwrap()
    }

    #[test]
    fn bars_and_labels_form_two_groups() {
        let mut s = String::from("<svg>");
        for i in 0..12 {
            s += &format!(r#"<rect x="{}" y="{}" width="10" height="{}" fill="steelblue"/>"#, i * 20, 100 - i, i + 1);
        }
        for i in 0..12 {
            s += &format!(r#"<text x="{}" y="120" font-size="10">L{i}</text>"#, i * 20 + 5);
        }
        s += "</svg>";
        let g = groups(&s);
        assert_eq!(g.len(), 2);
        assert!(g.iter().all(|g| g.members.len() == 12));
        let fill = g[0].signature.iter().find(|e| e.property == "fill").unwrap();
        assert!(fill.shared);
        assert!(!g[0].signature.iter().find(|e| e.property == "x").unwrap().shared);
    }

    #[test]
    fn lone_text_is_a_singleton() {
        let g = groups(r#"<svg><text x="1" y="10">hi</text></svg>"#);
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].members.len(), 1);
    }

    #[test]
    fn differing_property_sets_split() {
        let g = groups(r#"<svg><rect width="5" height="5" fill="red"/><rect width="5" height="5" fill="blue" stroke="black"/></svg>"#);
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn empty_document() {
        let m = parse_svg(b"<svg/>").unwrap();
        assert_eq!(detect_groups(&m, &TextMetricsConfig::default()), Err(DeconstructError::EmptyDocument));
    }
}
