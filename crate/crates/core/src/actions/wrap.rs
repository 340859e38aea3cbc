use crate::deconstruct::{render_spec, wrap_words, DeclarativeSpec, DeconstructError, ElementClass, GroupKind, Rendered, Scale};
use crate::svg::compute_bbox;

/// Width text of group `gi` wraps to: the band step of a discrete axis,
/// else the typical width of the anchor's members, else a quarter of the
/// viewport.
pub fn wrap_width(spec: &DeclarativeSpec, r: &Rendered, gi: usize) -> f64 {
    let g = &spec.groups[gi];
    if g.kind == GroupKind::AxisLabel {
        if let Some(a) = g.axis {
            if let Scale::Discrete { step, .. } = spec.scale(spec.axes[a].orientation) {
                return *step;
            }
        }
    }
    let anchor = g.layout.horizontal.rg().or(g.layout.vertical.rg()).map(|rg| rg.anchor_group);
    if let Some(a) = anchor {
        let mut widths: Vec<f64> = r.members[a]
            .iter()
            .filter_map(|id| r.document.get(id).and_then(|e| compute_bbox(e, &spec.metrics)))
            .map(|b| b.width())
            .collect();
        widths.sort_by(f64::total_cmp);
        if let Some(&w) = widths.get(widths.len() / 2) {
            if w >= 1.0 {
                return w;
            }
        }
    }
    spec.viewport.width / 4.0
}

/// Word-wrap the class's text groups whose text exceeds their wrap width.
pub fn wrap_text(spec: &DeclarativeSpec, class: ElementClass) -> Result<DeclarativeSpec, DeconstructError> {
    let r = render_spec(spec)?;
    let mut out = spec.clone();
    let base = spec.document();
    for (gi, g) in spec.groups.iter().enumerate() {
        if g.class != class || !g.is_text() {
            continue;
        }
        let w = wrap_width(spec, &r, gi);
        let changes = r.members[gi].iter().any(|id| {
            let Some(e) = r.document.get(id) else { return false };
            let original = base.get(id).and_then(|b| b.text_content.clone()).or_else(|| e.text_content.clone()).unwrap_or_default();
            let joined = original.split_whitespace().collect::<Vec<_>>().join(" ");
            wrap_words(&joined, e.font_size(), w, &spec.metrics).len() != e.text_lines().len()
        });
        if changes {
            out.groups[gi].wrap_width = Some(w);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use crate::deconstruct::wrap_words;
    use crate::svg::TextMetricsConfig;

    #[test]
    fn greedy_fill() {
        let m = TextMetricsConfig::default();
        // 8 characters at 10 px and 0.6 ratio
        let lines = wrap_words("Monthly Active Users", 10.0, 48.0, &m);
        assert_eq!(lines, vec!["Monthly", "Active", "Users"]);
        assert_eq!(wrap_words("short", 10.0, 48.0, &m), vec!["short"]);
        let long = "x".repeat(30);
        assert_eq!(wrap_words(&long, 10.0, 48.0, &m), vec![long.clone()]);
    }
}
