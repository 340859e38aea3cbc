use crate::deconstruct::{
    render_spec, AnchorPosition, DeclarativeSpec, DeconstructError, ElementClass, Orientation, Pairing, Placement,
    Rendered, RgTuple,
};
use crate::interpret::overlap_area;
use crate::svg::{compute_bbox, ElementId, Rect2D};
use std::collections::HashMap;

use AnchorPosition::{Bottom, Left, Right, Top, XCenter, YCenter};

/// Anchor-adjacent positions tried after the current one: above, below,
/// left, right, above-left, above-right.
fn candidate_tuples(gap: f64) -> [(RgTuple, RgTuple); 6] {
    let t = |p, p_a, offset| RgTuple { p, p_a, offset };
    let above = t(Bottom, Top, -gap);
    let below = t(Top, Bottom, gap);
    let centre_x = t(XCenter, XCenter, 0.0);
    let centre_y = t(YCenter, YCenter, 0.0);
    let left = t(Right, Left, -gap);
    let right = t(Left, Right, gap);
    [(centre_x, above), (centre_x, below), (left, centre_y), (right, centre_y), (left, above), (right, above)]
}

/// Start coordinate of a span of `size` placed so that `t` holds against `anchor`.
fn place_span(t: &RgTuple, anchor: &Rect2D, size: f64) -> f64 {
    let target = t.p_a.of(anchor) + t.offset;
    if t.p.is_center() {
        target - size / 2.0
    } else if t.p == t.p.sides().0 {
        target
    } else {
        target - size
    }
}

/// Anchor box of member `i` of group `gi` along `o`, from the rendered document.
fn anchor_of(spec: &DeclarativeSpec, r: &Rendered, gi: usize, i: usize, o: Orientation) -> Option<Rect2D> {
    let rg = spec.groups[gi].layout.axis(o).rg()?;
    let a = rg.anchor_group;
    let boxes: Vec<Option<Rect2D>> =
        r.members[a].iter().map(|id| r.document.get(id).and_then(|e| compute_bbox(e, &spec.metrics))).collect();
    let fresh = r.members[gi] != spec.groups[gi].members || r.members[a] != spec.groups[a].members;
    match &rg.pairing {
        _ if boxes.len() == 1 => boxes[0],
        Pairing::Union if !fresh => boxes.iter().flatten().copied().reduce(|x, y| x.union(&y)),
        Pairing::OneToOne(p) if !fresh => p.get(i).and_then(|&j| boxes.get(j).copied().flatten()),
        _ => boxes.get(i.min(boxes.len().saturating_sub(1))).copied().flatten(),
    }
}

/// Greedy occupancy placement of the class's text: each label, in document
/// order, keeps the first of its current or six anchor-adjacent positions
/// that collides with no label already placed and stays within the viewport
/// horizontally; labels with no such position are hidden.
pub fn place_labels(spec: &DeclarativeSpec, class: ElementClass) -> Result<DeclarativeSpec, DeconstructError> {
    let r = render_spec(spec)?;
    let groups: Vec<usize> = (0..spec.groups.len()).filter(|&g| spec.groups[g].class == class && spec.groups[g].is_text()).collect();
    let all: Vec<Rect2D> = groups.iter().flat_map(|&g| r.visible_boxes(g)).collect();
    if overlap_area(&all) <= 0.0 {
        return Ok(spec.clone());
    }

    let order: HashMap<ElementId, usize> = r.document.document_order().into_iter().enumerate().map(|(i, id)| (id, i)).collect();
    let mut labels: Vec<(usize, usize)> = groups.iter().flat_map(|&g| (0..r.members[g].len()).map(move |i| (g, i))).collect();
    labels.sort_by_key(|&(g, i)| order.get(&r.members[g][i]).copied().unwrap_or(usize::MAX));

    let mut out = spec.clone();
    let width = spec.viewport.width;
    let mut placed: Vec<Rect2D> = Vec::new();
    for (gi, i) in labels {
        let Some(cur) = r.boxes[gi][i] else { continue };
        let id = r.members[gi][i].clone();
        let mut candidates: Vec<(Option<Placement>, Rect2D)> = vec![(None, cur)];
        let layout = &spec.groups[gi].layout;
        if let (Some(h), Some(v), Some(ah), Some(av)) = (
            layout.horizontal.rg(),
            layout.vertical.rg(),
            anchor_of(spec, &r, gi, i, Orientation::Horizontal),
            anchor_of(spec, &r, gi, i, Orientation::Vertical),
        ) {
            let current = spec.groups[gi].placements.get(&id).copied();
            let (oh, ov) = current.map_or((h.tuple.offset, v.tuple.offset), |p| (p.horizontal.offset, p.vertical.offset));
            let gap = oh.abs().max(ov.abs()).max(2.0);
            for (th, tv) in candidate_tuples(gap) {
                let x0 = place_span(&th, &ah, cur.width());
                let y0 = place_span(&tv, &av, cur.height());
                let rect = Rect2D::new(x0, y0, x0 + cur.width(), y0 + cur.height());
                candidates.push((Some(Placement { horizontal: th, vertical: tv }), rect));
            }
        }
        let fits = |b: &Rect2D| b.x_min >= -1e-9 && b.x_max <= width + 1e-9 && placed.iter().all(|p| p.intersection_area(b) <= 0.0);
        match candidates.into_iter().find(|(_, b)| fits(b)) {
            Some((placement, b)) => {
                if let Some(p) = placement {
                    out.groups[gi].placements.insert(id, p);
                }
                placed.push(b);
            }
            None => {
                out.groups[gi].hidden.insert(id);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spans_follow_tuple_side() {
        let a = Rect2D::new(10.0, 100.0, 30.0, 200.0);
        let above = RgTuple { p: Bottom, p_a: Top, offset: -4.0 };
        assert_eq!(place_span(&above, &a, 12.0), 100.0 - 4.0 - 12.0);
        let below = RgTuple { p: Top, p_a: Bottom, offset: 4.0 };
        assert_eq!(place_span(&below, &a, 12.0), 204.0);
        let centre = RgTuple { p: XCenter, p_a: XCenter, offset: 0.0 };
        assert_eq!(place_span(&centre, &a, 8.0), 16.0);
    }
}
