use super::{
    AnchorPosition, AxisAssembly, AxisLayout, GroupKind, LayoutDependency, Orientation, Pairing, ReactiveGeometry,
    RgTuple, Scale, VisualGroup,
};
use crate::svg::{DocumentModel, ElementId, Rect2D};

/// Offsets varying more than this (px²) are not a consistent anchoring.
pub const MAX_OFFSET_VARIANCE: f64 = 25.0;
/// Variances within this many px² count as tied.
const VARIANCE_TIE: f64 = 0.25;

/// A scored anchoring of one group to one candidate along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RgCandidate {
    pub anchor_group: usize,
    pub tuple: RgTuple,
    pub pairing: Pairing,
    pub residuals: Vec<f64>,
    pub variance: f64,
}

impl RgCandidate {
    pub fn into_layout(self) -> AxisLayout {
        AxisLayout::ReactiveGeometry(ReactiveGeometry {
            anchor_group: self.anchor_group,
            tuple: self.tuple,
            base_tuple: self.tuple,
            pairing: self.pairing,
            residuals: self.residuals,
            cycle: 0,
        })
    }
}

/// Position pairs in preference order: same side, opposite sides, then mixed.
fn position_pairs(o: Orientation) -> Vec<(AnchorPosition, AnchorPosition)> {
    let ps = match o {
        Orientation::Horizontal => AnchorPosition::HORIZONTAL,
        Orientation::Vertical => AnchorPosition::VERTICAL,
    };
    let mut out: Vec<_> = ps.iter().map(|&p| (p, p)).collect();
    out.push((ps[2], ps[0]));
    out.push((ps[0], ps[2]));
    for &p in &ps {
        for &q in &ps {
            if !out.contains(&(p, q)) {
                out.push((p, q));
            }
        }
    }
    out
}

fn spread(boxes: &[Rect2D], o: Orientation) -> f64 {
    let cs = boxes.iter().map(|b| match o {
        Orientation::Horizontal => b.center().0,
        Orientation::Vertical => b.center().1,
    });
    let (lo, hi) = cs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| (lo.min(c), hi.max(c)));
    if hi >= lo {
        hi - lo
    } else {
        0.0
    }
}

fn sort_order(boxes: &[Rect2D], primary: Orientation) -> Vec<usize> {
    let key = |b: &Rect2D| {
        let (x, y) = b.center();
        match primary {
            Orientation::Horizontal => (x, y),
            Orientation::Vertical => (y, x),
        }
    };
    let mut idx: Vec<usize> = (0..boxes.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ka, kb) = (key(&boxes[a]), key(&boxes[b]));
        ka.0.total_cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    idx
}

/// Match members to anchor members: one-to-one by order along the axis on
/// which the members spread most when counts agree, otherwise the anchor
/// group's union box.
pub fn pair_members(members: &[Rect2D], anchors: &[Rect2D]) -> Pairing {
    if anchors.len() == 1 || members.len() != anchors.len() {
        return Pairing::Union;
    }
    let primary = if spread(members, Orientation::Horizontal) >= spread(members, Orientation::Vertical) {
        Orientation::Horizontal
    } else {
        Orientation::Vertical
    };
    let mo = sort_order(members, primary);
    let ao = sort_order(anchors, primary);
    let mut pairs = vec![0; members.len()];
    for (m, a) in mo.into_iter().zip(ao) {
        pairs[m] = a;
    }
    Pairing::OneToOne(pairs)
}

/// The anchor box for member `i` under `pairing`.
pub fn anchor_box(pairing: &Pairing, anchors: &[Rect2D], i: usize) -> Option<Rect2D> {
    match pairing {
        Pairing::Union => anchors.iter().copied().reduce(|a, b| a.union(&b)),
        Pairing::OneToOne(p) => p.get(i).and_then(|&j| anchors.get(j)).copied(),
    }
}

/// Choose the anchoring of `members` along `o` with the least offset
/// variance over all candidate groups and position pairs. `None` when no
/// candidate is consistent enough.
pub fn infer_reactive_geometry(
    members: &[Rect2D],
    candidates: &[(usize, Vec<Rect2D>)],
    o: Orientation,
) -> Option<RgCandidate> {
    if members.is_empty() {
        return None;
    }
    let mut best: Option<RgCandidate> = None;
    for (anchor_group, anchors) in candidates {
        if anchors.is_empty() {
            continue;
        }
        let pairing = pair_members(members, anchors);
        let Some(abox): Option<Vec<Rect2D>> = (0..members.len()).map(|i| anchor_box(&pairing, anchors, i)).collect() else {
            continue;
        };
        for (p, p_a) in position_pairs(o) {
            let offsets: Vec<f64> = members.iter().zip(&abox).map(|(m, a)| p.of(m) - p_a.of(a)).collect();
            let n = offsets.len() as f64;
            let mean = offsets.iter().sum::<f64>() / n;
            let variance = offsets.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n;
            let better = match &best {
                None => true,
                Some(b) => {
                    variance < b.variance - VARIANCE_TIE
                        || (variance <= b.variance + VARIANCE_TIE && mean.abs() < b.tuple.offset.abs() - 1e-9)
                }
            };
            if better {
                best = Some(RgCandidate {
                    anchor_group: *anchor_group,
                    tuple: RgTuple { p, p_a, offset: mean },
                    pairing: pairing.clone(),
                    residuals: offsets.iter().map(|d| d - mean).collect(),
                    variance,
                });
            }
        }
    }
    let mut best = best.filter(|b| b.variance <= MAX_OFFSET_VARIANCE)?;
    // on an anchor with no extent along `o` all three positions coincide;
    // name the side that faces the member
    let flat = candidates
        .iter()
        .find(|(g, _)| *g == best.anchor_group)
        .is_some_and(|(_, a)| a.iter().all(|r| best.tuple.p_a.sides().0.of(r) == best.tuple.p_a.sides().1.of(r)));
    if flat && best.tuple.offset != 0.0 && !best.tuple.p_a.is_center() {
        let (lo, hi) = best.tuple.p_a.sides();
        best.tuple.p_a = if best.tuple.offset < 0.0 { lo } else { hi };
    }
    Some(best)
}

/// Assign a layout dependency to every group according to its kind.
pub(crate) fn assign_layouts(
    groups: &mut [VisualGroup],
    axes: &[AxisAssembly],
    _model: &DocumentModel,
    bbox_of: &dyn Fn(&ElementId) -> Option<Rect2D>,
) {
    let boxes: Vec<Option<Vec<Rect2D>>> =
        groups.iter().map(|g| g.members.iter().map(bbox_of).collect::<Option<Vec<_>>>()).collect();
    let of_kind = |k: GroupKind| -> Vec<usize> { groups.iter().filter(|g| g.kind == k).map(|g| g.id).collect() };
    let axis_lines = of_kind(GroupKind::AxisLine);
    let legend_shapes = of_kind(GroupKind::LegendShape);
    let shapes = of_kind(GroupKind::Shape);

    for gi in 0..groups.len() {
        let Some(own) = boxes[gi].as_ref() else { continue };
        let g = &groups[gi];
        let axis = g.axis.map(|a| &axes[a]);
        let candidates: Vec<usize> = match g.kind {
            GroupKind::TitleText => axis_lines.clone(),
            GroupKind::AxisLabel => axis.map(|a| vec![a.ticks]).unwrap_or_default(),
            GroupKind::AxisTitle => axis.map(|a| a.line.map(|l| vec![l]).unwrap_or_else(|| vec![a.labels])).unwrap_or_default(),
            GroupKind::LegendShape => axis_lines.clone(),
            GroupKind::LegendText => legend_shapes.clone(),
            GroupKind::LabelText => {
                shapes.iter().copied().filter(|&s| groups[s].members.len() == g.members.len()).collect()
            }
            _ => Vec::new(),
        };
        let cands: Vec<(usize, Vec<Rect2D>)> = candidates
            .into_iter()
            .filter(|&c| c != gi)
            .filter_map(|c| boxes[c].clone().map(|b| (c, b)))
            .collect();
        if cands.is_empty() {
            continue;
        }
        let mut layout = LayoutDependency::global();
        if g.kind == GroupKind::LegendShape {
            let stacking = if spread(own, Orientation::Horizontal) > spread(own, Orientation::Vertical) {
                Orientation::Horizontal
            } else {
                Orientation::Vertical
            };
            if let Some(c) = infer_reactive_geometry(own, &cands, stacking.other()) {
                *layout.axis_mut(stacking.other()) = c.into_layout();
            }
            let ext = own.iter().copied().reduce(|a, b| a.union(&b)).unwrap();
            let (lo, hi) = match stacking {
                Orientation::Horizontal => (ext.x_min, ext.x_max),
                Orientation::Vertical => (ext.y_min, ext.y_max),
            };
            let s = Scale::identity(lo, hi);
            *layout.axis_mut(stacking) = AxisLayout::LocalScale { scale: s.clone(), base: s };
        } else {
            for o in [Orientation::Horizontal, Orientation::Vertical] {
                if let Some(c) = infer_reactive_geometry(own, &cands, o) {
                    *layout.axis_mut(o) = c.into_layout();
                }
            }
        }
        groups[gi].layout = layout;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect2D {
        Rect2D::new(x0, y0, x1, y1)
    }

    #[test]
    fn bar_labels_centered_above() {
        let bars: Vec<Rect2D> = (0..4).map(|i| r(i as f64 * 30.0, 100.0 - 10.0 * i as f64, i as f64 * 30.0 + 20.0, 200.0)).collect();
        // label widths differ so only center alignment is exact horizontally
        let labels: Vec<Rect2D> = bars
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let w = 6.0 * (i + 1) as f64;
                let cx = b.center().0;
                r(cx - w / 2.0, b.y_min - 4.0 - 12.0, cx + w / 2.0, b.y_min - 4.0)
            })
            .collect();
        let cands = vec![(7, bars)];
        let h = infer_reactive_geometry(&labels, &cands, Orientation::Horizontal).unwrap();
        assert_eq!((h.tuple.p, h.tuple.p_a), (AnchorPosition::XCenter, AnchorPosition::XCenter));
        assert!(h.tuple.offset.abs() < 1e-9);
        let v = infer_reactive_geometry(&labels, &cands, Orientation::Vertical).unwrap();
        assert_eq!((v.tuple.p, v.tuple.p_a), (AnchorPosition::Bottom, AnchorPosition::Top));
        assert!((v.tuple.offset + 4.0).abs() < 1e-9);
        assert_eq!(v.anchor_group, 7);
        assert!(matches!(v.pairing, Pairing::OneToOne(_)));
    }

    #[test]
    fn title_above_axis_line() {
        let line = vec![r(40.0, 60.0, 340.0, 60.0)];
        let title = vec![r(150.0, 34.0, 230.0, 50.0)];
        let v = infer_reactive_geometry(&title, &[(3, line)], Orientation::Vertical).unwrap();
        assert_eq!(v.tuple, RgTuple { p: AnchorPosition::Bottom, p_a: AnchorPosition::Top, offset: -10.0 });
    }

    #[test]
    fn no_candidates_means_no_anchor() {
        assert!(infer_reactive_geometry(&[r(0.0, 0.0, 1.0, 1.0)], &[], Orientation::Vertical).is_none());
    }

    #[test]
    fn inconsistent_offsets_are_rejected() {
        let anchors: Vec<Rect2D> = (0..3).map(|i| r(i as f64 * 50.0, 0.0, i as f64 * 50.0 + 10.0, 10.0)).collect();
        let members: Vec<Rect2D> = (0..3).map(|i| r(i as f64 * 50.0, 20.0 + 40.0 * (i % 2) as f64, i as f64 * 50.0 + 10.0, 30.0 + 40.0 * (i % 2) as f64)).collect();
        assert!(infer_reactive_geometry(&members, &[(0, anchors)], Orientation::Vertical).is_none());
    }

    #[test]
    fn pairing_follows_spread_axis() {
        let anchors = vec![r(100.0, 0.0, 110.0, 10.0), r(0.0, 0.0, 10.0, 10.0)];
        let members = vec![r(0.0, 20.0, 10.0, 30.0), r(100.0, 20.0, 110.0, 30.0)];
        assert_eq!(pair_members(&members, &anchors), Pairing::OneToOne(vec![1, 0]));
    }
}
