use super::anchor::anchor_box;
use super::{AxisLayout, DeclarativeSpec, DeconstructError, Orientation, Pairing, RgTuple, Scale};
use crate::svg::{compute_bbox, DocumentModel, ElementId, Rect2D, TextMetricsConfig};

/// Output of rendering a spec: the document plus per-group geometry.
#[derive(Debug, Clone)]
pub struct Rendered {
    pub document: DocumentModel,
    /// Members per group (after tick regeneration), parallel to `spec.groups`.
    pub members: Vec<Vec<ElementId>>,
    /// Boxes of members, `None` for hidden members or those without geometry.
    pub boxes: Vec<Vec<Option<Rect2D>>>,
}

impl Rendered {
    /// Visible member boxes of group `g`.
    pub fn visible_boxes(&self, g: usize) -> impl Iterator<Item = Rect2D> + '_ {
        self.boxes[g].iter().flatten().copied()
    }

    /// Union of every visible member box.
    pub fn extent(&self) -> Option<Rect2D> {
        self.boxes.iter().flatten().flatten().copied().reduce(|a, b| a.union(&b))
    }
}

/// Groups in an order where every anchor precedes its dependents.
pub(crate) fn topological_order(spec: &DeclarativeSpec) -> Result<Vec<usize>, DeconstructError> {
    let n = spec.groups.len();
    let mut indegree = vec![0usize; n];
    let mut dependents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, g) in spec.groups.iter().enumerate() {
        for a in g.layout.anchor_groups() {
            if a >= n || a == i {
                return Err(DeconstructError::CyclicDependency(i));
            }
            indegree[i] += 1;
            dependents[a].push(i);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut ready: std::collections::BTreeSet<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
    while let Some(i) = ready.pop_first() {
        order.push(i);
        for &d in &dependents[i] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                ready.insert(d);
            }
        }
    }
    if order.len() < n {
        let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
        return Err(DeconstructError::CyclicDependency(stuck));
    }
    Ok(order)
}

fn coord(o: Orientation, r: &Rect2D) -> f64 {
    match o {
        Orientation::Horizontal => r.center().0,
        Orientation::Vertical => r.center().1,
    }
}

fn shift(doc: &mut DocumentModel, id: &ElementId, o: Orientation, d: f64) {
    if d.abs() < 1e-9 {
        return;
    }
    if let Some(e) = doc.get_mut(id) {
        match o {
            Orientation::Horizontal => e.translate_global(d, 0.0),
            Orientation::Vertical => e.translate_global(0.0, d),
        }
    }
}

fn bbox(doc: &DocumentModel, id: &ElementId, metrics: &TextMetricsConfig) -> Option<Rect2D> {
    doc.get(id).and_then(|e| compute_bbox(e, metrics))
}

/// Tick values and label strings for `n` ticks over the base scale.
fn tick_values(scale: &Scale, n: usize, fmt: &super::LabelFormat) -> Vec<(f64, String)> {
    let n = n.max(2);
    match scale {
        Scale::Linear { domain_min, domain_max, .. } => (0..n)
            .map(|k| {
                let v = domain_min + (domain_max - domain_min) * k as f64 / (n - 1) as f64;
                (scale.map_value(v).unwrap(), fmt.format(v))
            })
            .collect(),
        Scale::Discrete { categories, range_min, step, .. } => {
            let c = categories.len();
            let n = n.min(c);
            let idx: Vec<usize> = if n <= 1 {
                vec![0]
            } else {
                (0..n).map(|k| ((k * (c - 1)) as f64 / (n - 1) as f64).round() as usize).collect()
            };
            idx.into_iter().map(|i| (range_min + step * (i as f64 + 0.5), categories[i].clone())).collect()
        }
    }
}

/// Re-create tick, label and grid members of axis `ai` at its current tick count.
fn regenerate_ticks(spec: &DeclarativeSpec, ai: usize, doc: &mut DocumentModel, members: &mut [Vec<ElementId>]) {
    let axis = &spec.axes[ai];
    let o = axis.orientation;
    let scale = spec.base_scale(o);
    let n = axis.tick_count.clamp(2, axis.max_ticks(scale).max(2));
    let values = tick_values(scale, n, &axis.label_format);
    let metrics = &spec.metrics;
    for (gi, is_label) in [(Some(axis.ticks), false), (Some(axis.labels), true), (axis.grid, false)] {
        let Some(gi) = gi else { continue };
        let old = spec.groups[gi].members.clone();
        let Some(template) = old.first().cloned() else { continue };
        let mut new = Vec::with_capacity(values.len());
        for (k, (pos, text)) in values.iter().enumerate() {
            let id = if k < old.len() {
                old[k].clone()
            } else {
                let id = ElementId::new(format!("{}~{k}", template.as_str()));
                let after = new.last().cloned().unwrap_or_else(|| template.clone());
                if doc.insert_clone(&template, &after, id.clone()).is_none() {
                    continue;
                }
                id
            };
            if is_label {
                if let Some(e) = doc.get_mut(&id) {
                    if e.text_content.as_deref() != Some(text.as_str()) {
                        e.set_text(text);
                    }
                }
            }
            if let Some(b) = bbox(doc, &id, metrics) {
                shift(doc, &id, o, pos - coord(o, &b));
            }
            new.push(id);
        }
        for id in old.iter().skip(values.len()) {
            if let Some(e) = doc.get_mut(id) {
                e.set_hidden(true);
            }
        }
        members[gi] = new;
    }
}

/// Greedy word wrap: fewest lines with each line no wider than `max_width`;
/// words are never broken.
pub fn wrap_words(text: &str, font_size: f64, max_width: f64, metrics: &TextMetricsConfig) -> Vec<String> {
    let mut lines: Vec<String> = Vec::new();
    let mut cur = String::new();
    for word in text.split_whitespace() {
        if cur.is_empty() {
            cur.push_str(word);
            continue;
        }
        let candidate = format!("{cur} {word}");
        if metrics.text_width(&candidate, font_size) <= max_width + 1e-9 {
            cur = candidate;
        } else {
            lines.push(std::mem::take(&mut cur));
            cur.push_str(word);
        }
    }
    if !cur.is_empty() || lines.is_empty() {
        lines.push(cur);
    }
    lines
}

/// Apply the spec's parameters to a copy of its source document.
pub fn render_spec(spec: &DeclarativeSpec) -> Result<Rendered, DeconstructError> {
    let order = topological_order(spec)?;
    let metrics = spec.metrics;
    let mut doc = spec.document().clone();
    let mut members: Vec<Vec<ElementId>> = spec.groups.iter().map(|g| g.members.clone()).collect();
    let mut regenerated = vec![false; spec.groups.len()];

    for (ai, axis) in spec.axes.iter().enumerate() {
        if axis.tick_count != axis.base_tick_count {
            regenerate_ticks(spec, ai, &mut doc, &mut members);
            for g in [Some(axis.ticks), Some(axis.labels), axis.grid].into_iter().flatten() {
                regenerated[g] = true;
            }
        }
    }

    // scales: local (in base coordinates) first, then the global remap
    let global: Vec<Option<Box<dyn Fn(f64) -> f64>>> = [Orientation::Horizontal, Orientation::Vertical]
        .iter()
        .map(|&o| {
            let (cur, base) = (spec.scale(o), spec.base_scale(o));
            (cur.range() != base.range()).then(|| Box::new(cur.remap_from(base)) as Box<dyn Fn(f64) -> f64>)
        })
        .collect();
    for (gi, g) in spec.groups.iter().enumerate() {
        let mut maps: Vec<Option<Box<dyn Fn(f64) -> f64 + '_>>> = Vec::with_capacity(2);
        for (k, o) in [Orientation::Horizontal, Orientation::Vertical].into_iter().enumerate() {
            let gf = global[k].as_deref();
            let m: Option<Box<dyn Fn(f64) -> f64 + '_>> = match g.layout.axis(o) {
                AxisLayout::ReactiveGeometry(_) => None,
                AxisLayout::GlobalScale => gf.map(|f| Box::new(f) as Box<dyn Fn(f64) -> f64>),
                AxisLayout::LocalScale { scale, base } => {
                    let local = (scale.range() != base.range()).then(|| scale.remap_from(base));
                    match (local, gf) {
                        (None, None) => None,
                        (Some(l), None) => Some(Box::new(l)),
                        (None, Some(f)) => Some(Box::new(f)),
                        (Some(l), Some(f)) => Some(Box::new(move |x| f(l(x)))),
                    }
                }
            };
            maps.push(m);
        }
        if maps.iter().all(Option::is_none) {
            continue;
        }
        let fx = |x: f64| maps[0].as_ref().map_or(x, |f| f(x));
        let fy = |y: f64| maps[1].as_ref().map_or(y, |f| f(y));
        for id in &members[gi] {
            if g.kind.is_rigid() {
                let Some(b) = bbox(&doc, id, &metrics) else { continue };
                let (cx, cy) = b.center();
                if let Some(e) = doc.get_mut(id) {
                    let (dx, dy) = (fx(cx) - cx, fy(cy) - cy);
                    if dx.abs() > 1e-9 || dy.abs() > 1e-9 {
                        e.translate_global(dx, dy);
                    }
                }
            } else if let Some(e) = doc.get_mut(id) {
                e.map_global(&|x, y| (fx(x), fy(y)));
            }
        }
    }

    let base = spec.document();
    for (gi, g) in spec.groups.iter().enumerate() {
        if let (Some(fs), Some(base_fs)) = (g.font_size, g.base_font_size) {
            if (fs - base_fs).abs() > 1e-9 {
                for id in &members[gi] {
                    if let Some(e) = doc.get_mut(id) {
                        e.set_font_size(fs);
                    }
                }
            }
        }
        if let Some(w) = g.wrap_width {
            for id in &members[gi] {
                let Some(e) = doc.get_mut(id) else { continue };
                let original = base.get(id).and_then(|b| b.text_content.clone()).or_else(|| e.text_content.clone());
                let Some(original) = original else { continue };
                let joined = original.split_whitespace().collect::<Vec<_>>().join(" ");
                let lines = wrap_words(&joined, e.font_size(), w, &metrics).join("\n");
                if e.text_content.as_deref() != Some(lines.as_str()) {
                    e.set_text(&lines);
                }
            }
        }
        for id in &g.hidden {
            if let Some(e) = doc.get_mut(id) {
                e.set_hidden(true);
            }
        }
    }

    for &gi in &order {
        let g = &spec.groups[gi];
        for o in [Orientation::Horizontal, Orientation::Vertical] {
            let AxisLayout::ReactiveGeometry(rg) = g.layout.axis(o) else { continue };
            let a = rg.anchor_group;
            let anchors: Vec<Rect2D> = members[a].iter().filter_map(|id| bbox(&doc, id, &metrics)).collect();
            if anchors.is_empty() {
                continue;
            }
            let fresh = regenerated[gi] || regenerated[a];
            let pairing = if fresh {
                if anchors.len() == 1 {
                    Pairing::Union
                } else {
                    Pairing::OneToOne((0..members[gi].len()).map(|i| i.min(anchors.len() - 1)).collect())
                }
            } else {
                rg.pairing.clone()
            };
            for (i, id) in members[gi].iter().enumerate() {
                let (tuple, residual): (RgTuple, f64) = match g.placements.get(id) {
                    Some(p) => (
                        match o {
                            Orientation::Horizontal => p.horizontal,
                            Orientation::Vertical => p.vertical,
                        },
                        0.0,
                    ),
                    None => (rg.tuple, if fresh { 0.0 } else { rg.residuals.get(i).copied().unwrap_or(0.0) }),
                };
                let Some(abox) = anchor_box(&pairing, &anchors, i) else { continue };
                let Some(mbox) = bbox(&doc, id, &metrics) else { continue };
                let target = tuple.p_a.of(&abox) + tuple.offset + residual;
                shift(&mut doc, id, o, target - tuple.p.of(&mbox));
            }
        }
    }

    let boxes = members
        .iter()
        .map(|ms| {
            ms.iter()
                .map(|id| doc.get(id).filter(|e| e.is_visible()).and_then(|e| compute_bbox(e, &metrics)))
                .collect()
        })
        .collect();
    Ok(Rendered { document: doc, members, boxes })
}
