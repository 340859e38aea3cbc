use super::{DeconstructError, LabelFormat, Orientation, RawGroup, Scale};
use crate::svg::{DocumentModel, ElementId, ElementKind, Rect2D};

/// Tick labels must sit within this distance of their tick along the axis.
const ALIGN_TOLERANCE: f64 = 3.0;
/// Maximum least-squares residual for a numeric axis to count as linear.
const LINEAR_RESIDUAL: f64 = 1.0;

/// Group indices making up one detected axis.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisCandidate {
    pub orientation: Orientation,
    pub ticks: usize,
    pub labels: usize,
    pub line: Option<usize>,
    pub title: Option<usize>,
    pub grid: Option<usize>,
}

struct LineSet {
    group: usize,
    orientation: Orientation,
    /// Sorted tick positions along the axis.
    positions: Vec<f64>,
    cross_min: f64,
    cross_max: f64,
    length: f64,
}

fn line_endpoints(model: &DocumentModel, id: &ElementId) -> Option<((f64, f64), (f64, f64))> {
    let e = model.get(id)?;
    if e.kind != ElementKind::Line {
        return None;
    }
    let a = e.transform.apply(e.num_attr_or("x1", 0.0), e.num_attr_or("y1", 0.0));
    let b = e.transform.apply(e.num_attr_or("x2", 0.0), e.num_attr_or("y2", 0.0));
    Some((a, b))
}

/// Line groups whose members are parallel, equally long, share a baseline,
/// and sit at two or more distinct positions.
fn line_sets(model: &DocumentModel, groups: &[RawGroup]) -> Vec<LineSet> {
    let mut out = Vec::new();
    'groups: for (gi, g) in groups.iter().enumerate() {
        if g.element_kind != ElementKind::Line || g.members.len() < 2 {
            continue;
        }
        let mut orientation = None;
        let mut positions = Vec::new();
        let mut cross: Option<(f64, f64)> = None;
        for m in &g.members {
            let Some(((x1, y1), (x2, y2))) = line_endpoints(model, m) else { continue 'groups };
            let (o, pos, c0, c1) = if (x1 - x2).abs() < 0.5 && (y1 - y2).abs() >= 0.5 {
                (Orientation::Horizontal, (x1 + x2) / 2.0, y1.min(y2), y1.max(y2))
            } else if (y1 - y2).abs() < 0.5 && (x1 - x2).abs() >= 0.5 {
                (Orientation::Vertical, (y1 + y2) / 2.0, x1.min(x2), x1.max(x2))
            } else {
                continue 'groups;
            };
            if orientation.is_some_and(|p| p != o) {
                continue 'groups;
            }
            orientation = Some(o);
            match cross {
                None => cross = Some((c0, c1)),
                Some((a, b)) if (a - c0).abs() <= 1.0 && (b - c1).abs() <= 1.0 => {}
                Some(_) => continue 'groups,
            }
            positions.push(pos);
        }
        positions.sort_by(f64::total_cmp);
        let spread = positions.last().unwrap() - positions.first().unwrap();
        if spread < 0.5 {
            continue;
        }
        let (c0, c1) = cross.unwrap();
        out.push(LineSet { group: gi, orientation: orientation.unwrap(), positions, cross_min: c0, cross_max: c1, length: c1 - c0 });
    }
    out.sort_by(|a, b| a.length.total_cmp(&b.length));
    out
}

/// Whether some line group repeats the same tick pattern on two or more
/// separate baselines, as the axes of side-by-side or stacked charts do.
pub fn has_repeated_ticks(model: &DocumentModel, groups: &[RawGroup]) -> bool {
    groups.iter().filter(|g| g.element_kind == ElementKind::Line && g.members.len() >= 4).any(|g| {
        let mut lines: Vec<(Orientation, f64, f64)> = Vec::new();
        for m in &g.members {
            let Some(((x1, y1), (x2, y2))) = line_endpoints(model, m) else { return false };
            if (x1 - x2).abs() < 0.5 && (y1 - y2).abs() >= 0.5 {
                lines.push((Orientation::Horizontal, (x1 + x2) / 2.0, y1.min(y2)));
            } else if (y1 - y2).abs() < 0.5 && (x1 - x2).abs() >= 0.5 {
                lines.push((Orientation::Vertical, (y1 + y2) / 2.0, x1.min(x2)));
            } else {
                return false;
            }
        }
        if lines.iter().any(|l| l.0 != lines[0].0) {
            return false;
        }
        let mut bands: Vec<(f64, Vec<f64>)> = Vec::new();
        for &(_, pos, base) in &lines {
            match bands.iter_mut().find(|b| (b.0 - base).abs() <= 1.0) {
                Some(b) => b.1.push(pos),
                None => bands.push((base, vec![pos])),
            }
        }
        if bands.len() < 2 || bands.iter().any(|b| b.1.len() < 2) {
            return false;
        }
        for b in &mut bands {
            b.1.sort_by(f64::total_cmp);
        }
        let first = &bands[0].1;
        bands[1..].iter().all(|b| b.1.len() == first.len() && b.1.iter().zip(first).all(|(a, c)| (a - c).abs() <= 1.0))
    })
}

fn member_boxes(group: &RawGroup, model: &DocumentModel, bboxes: &[Option<Rect2D>]) -> Vec<Rect2D> {
    group.members.iter().filter_map(|m| model.index_of(m).and_then(|i| bboxes[i])).collect()
}

fn along(o: Orientation, r: &Rect2D) -> f64 {
    match o {
        Orientation::Horizontal => (r.x_min + r.x_max) / 2.0,
        Orientation::Vertical => (r.y_min + r.y_max) / 2.0,
    }
}

fn union(boxes: &[Rect2D]) -> Option<Rect2D> {
    boxes.iter().copied().reduce(|a, b| a.union(&b))
}

/// Find axes by scanning for tick-line groups with one-to-one aligned labels.
pub fn detect_axes(model: &DocumentModel, groups: &[RawGroup], bboxes: &[Option<Rect2D>]) -> Vec<AxisCandidate> {
    let sets = line_sets(model, groups);
    let mut used = vec![false; groups.len()];
    let mut axes = Vec::new();

    for set in &sets {
        if used[set.group] {
            continue;
        }
        let n = set.positions.len();
        let cross_mid = (set.cross_min + set.cross_max) / 2.0;
        let label = (0..groups.len())
            .filter(|&g| !used[g] && groups[g].element_kind == ElementKind::Text && groups[g].members.len() == n)
            .filter_map(|g| {
                let boxes = member_boxes(&groups[g], model, bboxes);
                if boxes.len() != n {
                    return None;
                }
                let mut centers: Vec<f64> = boxes.iter().map(|b| along(set.orientation, b)).collect();
                centers.sort_by(f64::total_cmp);
                let aligned = centers.iter().zip(&set.positions).all(|(c, p)| (c - p).abs() <= ALIGN_TOLERANCE);
                if !aligned {
                    return None;
                }
                let u = union(&boxes)?;
                let cross_dist = match set.orientation {
                    Orientation::Horizontal => ((u.y_min + u.y_max) / 2.0 - cross_mid).abs(),
                    Orientation::Vertical => ((u.x_min + u.x_max) / 2.0 - cross_mid).abs(),
                };
                Some((g, cross_dist))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(g, _)| g);
        let Some(labels) = label else { continue };
        used[set.group] = true;
        used[labels] = true;

        let grid = sets
            .iter()
            .filter(|s| {
                !used[s.group]
                    && s.orientation == set.orientation
                    && s.positions.len() == n
                    && s.length > 2.0 * set.length
                    && s.positions.iter().zip(&set.positions).all(|(a, b)| (a - b).abs() <= 1.0)
            })
            .max_by(|a, b| a.length.total_cmp(&b.length))
            .map(|s| s.group);
        if let Some(g) = grid {
            used[g] = true;
        }

        let first = set.positions[0];
        let last = set.positions[n - 1];
        let line = (0..groups.len())
            .filter(|&g| !used[g] && groups[g].members.len() == 1)
            .filter(|&g| matches!(groups[g].element_kind, ElementKind::Line | ElementKind::Path))
            .filter_map(|g| {
                let b = member_boxes(&groups[g], model, bboxes).first().copied()?;
                let (a0, a1, c0, c1) = match set.orientation {
                    Orientation::Horizontal => (b.x_min, b.x_max, b.y_min, b.y_max),
                    Orientation::Vertical => (b.y_min, b.y_max, b.x_min, b.x_max),
                };
                let thin = c1 - c0 <= set.length.max(1.0) + 1.0;
                let touches = c0 <= set.cross_max + 1.0 && c1 >= set.cross_min - 1.0;
                let covers = a0 <= first + 1.0 && a1 >= last - 1.0;
                let dist = ((c0 + c1) / 2.0 - (set.cross_min + set.cross_max) / 2.0).abs();
                (thin && touches && covers).then_some((g, dist))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(g, _)| g);
        if let Some(g) = line {
            used[g] = true;
        }

        axes.push(AxisCandidate { orientation: set.orientation, ticks: set.group, labels, line, title: None, grid });
    }

    // axis titles: the nearest free singleton text beyond the labels, centred on the axis span
    for axis in axes.iter_mut() {
        let lb = union(&member_boxes(&groups[axis.labels], model, bboxes));
        let tb = union(&member_boxes(&groups[axis.ticks], model, bboxes));
        let lineb = axis.line.and_then(|g| union(&member_boxes(&groups[g], model, bboxes)));
        let (Some(lb), Some(tb)) = (lb, tb) else { continue };
        let span = lineb.map(|l| l.union(&tb)).unwrap_or(tb);
        let title = (0..groups.len())
            .filter(|&g| !used[g] && groups[g].element_kind == ElementKind::Text && groups[g].members.len() == 1)
            .filter_map(|g| {
                let b = member_boxes(&groups[g], model, bboxes).first().copied()?;
                let (cx, cy) = b.center();
                let gap = match axis.orientation {
                    Orientation::Horizontal if b.y_min >= lb.y_max - 2.0 && cx >= span.x_min && cx <= span.x_max => {
                        b.y_min - lb.y_max
                    }
                    Orientation::Vertical if b.x_max <= lb.x_min + 2.0 && cy >= span.y_min && cy <= span.y_max => {
                        lb.x_min - b.x_max
                    }
                    _ => return None,
                };
                let fs = groups[g].font_size.unwrap_or(12.0);
                (gap <= 4.0 * fs).then_some((g, gap))
            })
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(g, _)| g);
        if let Some(g) = title {
            used[g] = true;
            axis.title = Some(g);
        }
    }
    axes
}

/// Infer the scale of a detected axis from its tick positions and label text.
pub fn infer_scale(
    model: &DocumentModel,
    groups: &[RawGroup],
    axis: &AxisCandidate,
    bboxes: &[Option<Rect2D>],
) -> Result<(Scale, LabelFormat), DeconstructError> {
    let o = axis.orientation;
    let mut ticks: Vec<f64> = groups[axis.ticks]
        .members
        .iter()
        .filter_map(|m| line_endpoints(model, m))
        .map(|((x1, y1), (x2, y2))| match o {
            Orientation::Horizontal => (x1 + x2) / 2.0,
            Orientation::Vertical => (y1 + y2) / 2.0,
        })
        .collect();
    ticks.sort_by(f64::total_cmp);
    let mut labels: Vec<(f64, String)> = groups[axis.labels]
        .members
        .iter()
        .filter_map(|m| {
            let i = model.index_of(m)?;
            let b = bboxes[i]?;
            Some((along(o, &b), model.elements[i].text_content.clone().unwrap_or_default()))
        })
        .collect();
    labels.sort_by(|a, b| a.0.total_cmp(&b.0));
    let positions = if ticks.len() == labels.len() { ticks } else { labels.iter().map(|l| l.0).collect() };
    let texts: Vec<String> = labels.into_iter().map(|l| l.1).collect();
    fit_scale(&texts, &positions)
}

/// Fit a scale to labels at pixel positions (both in the same order).
///
/// All-numeric labels whose positions are affine in value within 1 px give
/// a linear scale; anything else is discrete with categories in pixel order.
pub fn fit_scale(labels: &[String], positions: &[f64]) -> Result<(Scale, LabelFormat), DeconstructError> {
    assert_eq!(labels.len(), positions.len(), "one position per label");
    let lo = positions.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = positions.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if positions.is_empty() || hi - lo < 0.5 {
        return Err(DeconstructError::DegenerateScale);
    }
    let parsed: Option<Vec<ParsedNumber>> = labels.iter().map(|l| parse_numeric(l)).collect();
    if let Some(nums) = parsed {
        if let Some(scale) = fit_linear(&nums, positions) {
            let fmt = LabelFormat {
                prefix: nums[0].prefix.clone(),
                suffix: nums[0].suffix.clone(),
                decimals: nums.iter().map(|n| n.decimals).max().unwrap_or(0),
                thousands: nums.iter().any(|n| n.thousands),
            };
            return Ok((scale, fmt));
        }
    }
    let mut order: Vec<usize> = (0..labels.len()).collect();
    order.sort_by(|&a, &b| positions[a].total_cmp(&positions[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| positions[i]).collect();
    let mut gaps: Vec<f64> = sorted.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(f64::total_cmp);
    let step = if gaps.is_empty() { hi - lo } else { gaps[gaps.len() / 2] };
    Ok((
        Scale::Discrete {
            categories: order.iter().map(|&i| labels[i].clone()).collect(),
            range_min: sorted[0] - step / 2.0,
            range_max: sorted[sorted.len() - 1] + step / 2.0,
            step,
        },
        LabelFormat::default(),
    ))
}

fn fit_linear(nums: &[ParsedNumber], positions: &[f64]) -> Option<Scale> {
    let n = nums.len() as f64;
    if nums.len() < 2 {
        return None;
    }
    let mv = nums.iter().map(|p| p.value).sum::<f64>() / n;
    let mp = positions.iter().sum::<f64>() / n;
    let svv: f64 = nums.iter().map(|p| (p.value - mv).powi(2)).sum();
    if svv < 1e-12 {
        return None;
    }
    let svp: f64 = nums.iter().zip(positions).map(|(p, x)| (p.value - mv) * (x - mp)).sum();
    let a = svp / svv;
    let b = mp - a * mv;
    let worst = nums.iter().zip(positions).map(|(p, x)| (a * p.value + b - x).abs()).fold(0.0, f64::max);
    if worst >= LINEAR_RESIDUAL || a.abs() < 1e-12 {
        return None;
    }
    let vmin = nums.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let vmax = nums.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let (p0, p1) = (a * vmin + b, a * vmax + b);
    Some(Scale::Linear { domain_min: vmin, domain_max: vmax, range_min: p0.min(p1), range_max: p0.max(p1), inverted: a < 0.0 })
}

#[derive(Debug, Clone, PartialEq)]
struct ParsedNumber {
    value: f64,
    prefix: String,
    suffix: String,
    decimals: usize,
    thousands: bool,
}

/// Parse labels such as `1,200`, `$5`, `40%`, `−3.5`.
fn parse_numeric(label: &str) -> Option<ParsedNumber> {
    let s = label.trim().replace('\u{2212}', "-");
    let start = s.find(|c: char| c.is_ascii_digit() || c == '-' || c == '.')?;
    let end = s.rfind(|c: char| c.is_ascii_digit())? + 1;
    if end <= start {
        return None;
    }
    let (prefix, body, suffix) = (&s[..start], &s[start..end], &s[end..]);
    if prefix.chars().any(|c| c.is_ascii_alphanumeric()) || suffix.chars().any(|c| c.is_ascii_digit()) || suffix.len() > 2 {
        return None;
    }
    let thousands = body.contains(',');
    let clean = body.replace(',', "");
    let value: f64 = clean.parse().ok()?;
    let decimals = clean.split_once('.').map(|(_, f)| f.len()).unwrap_or(0);
    Some(ParsedNumber { value, prefix: prefix.to_string(), suffix: suffix.to_string(), decimals, thousands })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn numeric_labels_fit_linear() {
        let (s, _) = fit_scale(&strings(&["0", "50", "100"]), &[40.0, 220.0, 400.0]).unwrap();
        assert_eq!(s, Scale::Linear { domain_min: 0.0, domain_max: 100.0, range_min: 40.0, range_max: 400.0, inverted: false });
    }

    #[test]
    fn upward_axis_is_inverted() {
        let (s, _) = fit_scale(&strings(&["0", "10", "20"]), &[300.0, 200.0, 100.0]).unwrap();
        assert!(matches!(s, Scale::Linear { inverted: true, range_min, range_max, .. } if range_min == 100.0 && range_max == 300.0));
        assert_eq!(s.map_value(10.0), Some(200.0));
    }

    #[test]
    fn month_labels_are_discrete() {
        let labels = strings(&["Jan", "Feb", "Mar", "Apr", "May", "Jun"]);
        let pos: Vec<f64> = (0..6).map(|i| 30.0 + 60.0 * i as f64).collect();
        let (s, _) = fit_scale(&labels, &pos).unwrap();
        match s {
            Scale::Discrete { categories, step, range_min, range_max } => {
                assert_eq!(categories.len(), 6);
                assert_eq!(step, 60.0);
                assert_eq!((range_min, range_max), (0.0, 360.0));
            }
            _ => panic!("expected discrete"),
        }
    }

    #[test]
    fn nonlinear_numbers_are_discrete() {
        let (s, _) = fit_scale(&strings(&["1", "2", "3"]), &[0.0, 10.0, 50.0]).unwrap();
        assert!(!s.is_linear());
    }

    #[test]
    fn identical_positions_are_degenerate() {
        assert_eq!(fit_scale(&strings(&["0", "10"]), &[5.0, 5.0]), Err(DeconstructError::DegenerateScale));
    }

    #[test]
    fn numeric_formats() {
        let n = parse_numeric("$1,200").unwrap();
        assert_eq!((n.value, n.prefix.as_str(), n.thousands), (1200.0, "$", true));
        assert_eq!(parse_numeric("40%").unwrap().suffix, "%");
        assert_eq!(parse_numeric("\u{2212}2.5").unwrap().value, -2.5);
        assert!(parse_numeric("Q1").is_none());
        assert!(parse_numeric("2019-2020").is_none());
    }
}
