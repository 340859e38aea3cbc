use super::path::PathData;
use super::transform::parse_number_list;
use super::{parse_length, ElementKind, Rect2D, TextMetricsConfig, VisualElement};

/// Bounds of a single non-group element in viewport coordinates.
///
/// Returns `None` when required geometry is missing; such elements are
/// excluded from costs. Groups are handled by `DocumentModel::bbox`.
pub fn compute_bbox(e: &VisualElement, metrics: &TextMetricsConfig) -> Option<Rect2D> {
    if e.opaque.is_some() {
        return None;
    }
    let local = match e.kind {
        ElementKind::Rect => {
            let w = e.num_attr("width")?;
            let h = e.num_attr("height")?;
            if w < 0.0 || h < 0.0 {
                return None;
            }
            let x = e.num_attr_or("x", 0.0);
            let y = e.num_attr_or("y", 0.0);
            Rect2D::new(x, y, x + w, y + h)
        }
        ElementKind::Circle => {
            let r = e.num_attr("r")?;
            let cx = e.num_attr_or("cx", 0.0);
            let cy = e.num_attr_or("cy", 0.0);
            Rect2D::new(cx - r, cy - r, cx + r, cy + r)
        }
        ElementKind::Ellipse => {
            let rx = e.num_attr("rx")?;
            let ry = e.num_attr("ry")?;
            let cx = e.num_attr_or("cx", 0.0);
            let cy = e.num_attr_or("cy", 0.0);
            Rect2D::new(cx - rx, cy - ry, cx + rx, cy + ry)
        }
        ElementKind::Line => {
            let x1 = e.num_attr_or("x1", 0.0);
            let y1 = e.num_attr_or("y1", 0.0);
            let x2 = e.num_attr_or("x2", 0.0);
            let y2 = e.num_attr_or("y2", 0.0);
            Rect2D::new(x1, y1, x2, y2)
        }
        ElementKind::Path => {
            let pts: Vec<(f64, f64)> = match e.attr("d") {
                Some(d) => PathData::parse(d).hull_points(),
                None => parse_number_list(e.attr("points")?)?.chunks_exact(2).map(|c| (c[0], c[1])).collect(),
            };
            // transform each hull point, not the local box, to stay tight under rotation
            return Rect2D::from_points(pts.into_iter().map(|(x, y)| e.transform.apply(x, y)));
        }
        ElementKind::Text => text_box(e, metrics)?,
        ElementKind::Group => return None,
        ElementKind::Other => {
            let w = e.num_attr("width")?;
            let h = e.num_attr("height")?;
            let x = e.num_attr_or("x", 0.0);
            let y = e.num_attr_or("y", 0.0);
            Rect2D::new(x, y, x + w, y + h)
        }
    };
    Some(local.transformed(&e.transform))
}

fn text_box(e: &VisualElement, metrics: &TextMetricsConfig) -> Option<Rect2D> {
    let lines = e.text_lines();
    let longest = lines.iter().map(|l| l.chars().count()).max()?;
    if longest == 0 {
        return None;
    }
    let fs = e.font_size();
    let lh = metrics.line_height(fs);
    let width = longest as f64 * fs * metrics.avg_char_width_ratio;
    let height = lines.len() as f64 * lh;
    let shift = |name: &str| {
        e.attr(name)
            .and_then(|v| v.split([' ', ',']).find(|t| !t.is_empty()))
            .and_then(|t| parse_length(t, fs))
            .unwrap_or(0.0)
    };
    let x = e.num_attr_or("x", 0.0) + shift("dx");
    let y = e.num_attr_or("y", 0.0) + shift("dy");
    let x_min = match e.property("text-anchor") {
        Some("middle") => x - width / 2.0,
        Some("end") => x - width,
        _ => x,
    };
    let baseline = e.property("dominant-baseline").or_else(|| e.property("alignment-baseline"));
    let top = match baseline {
        Some("middle") | Some("central") => y - 0.5 * lh,
        Some("hanging") | Some("text-before-edge") => y,
        Some("text-after-edge") | Some("ideographic") => y - lh,
        _ => y - TextMetricsConfig::BASELINE_RATIO * lh,
    };
    Some(Rect2D::new(x_min, top, x_min + width, top + height))
}
