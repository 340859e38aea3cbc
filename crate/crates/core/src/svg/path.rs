//! Path data: parsing to absolute segments, control-polygon flattening, and
//! point-wise remapping for re-layout.

use super::transform::NumberScanner;
use std::f64::consts::PI;
use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    MoveTo(f64, f64),
    LineTo(f64, f64),
    Cubic { c1: (f64, f64), c2: (f64, f64), to: (f64, f64) },
    Quad { c: (f64, f64), to: (f64, f64) },
    Arc { rx: f64, ry: f64, rotation: f64, large: bool, sweep: bool, to: (f64, f64) },
    Close,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathData {
    pub segments: Vec<Segment>,
}

impl PathData {
    /// Parse SVG path data. Relative commands are resolved to absolute ones.
    /// Parsing stops at the first error, keeping the segments read so far
    /// (the SVG error-handling rule).
    pub fn parse(src: &str) -> PathData {
        let mut sc = NumberScanner::new(src);
        let mut segs = Vec::new();
        let mut cur = (0.0, 0.0);
        let mut start = (0.0, 0.0);
        let mut last_ctrl: Option<(f64, f64)> = None;
        let mut last_qctrl: Option<(f64, f64)> = None;
        let mut cmd: Option<u8> = None;

        macro_rules! num {
            () => {
                match sc.next_number() {
                    Some(Some(v)) => v,
                    _ => return PathData { segments: segs },
                }
            };
        }

        loop {
            let Some(b) = sc.peek() else { break };
            if b.is_ascii_alphabetic() {
                sc.bump();
                cmd = Some(b);
            } else if cmd.is_none() {
                break;
            }
            let c = cmd.unwrap();
            let rel = c.is_ascii_lowercase();
            let (ox, oy) = if rel { cur } else { (0.0, 0.0) };
            match c.to_ascii_uppercase() {
                b'M' => {
                    let p = (num!() + ox, num!() + oy);
                    segs.push(Segment::MoveTo(p.0, p.1));
                    cur = p;
                    start = p;
                    // subsequent pairs are implicit lineto
                    cmd = Some(if rel { b'l' } else { b'L' });
                    last_ctrl = None;
                    last_qctrl = None;
                }
                b'L' => {
                    let p = (num!() + ox, num!() + oy);
                    segs.push(Segment::LineTo(p.0, p.1));
                    cur = p;
                    last_ctrl = None;
                    last_qctrl = None;
                }
                b'H' => {
                    let x = num!() + ox;
                    cur = (x, cur.1);
                    segs.push(Segment::LineTo(cur.0, cur.1));
                    last_ctrl = None;
                    last_qctrl = None;
                }
                b'V' => {
                    let y = num!() + oy;
                    cur = (cur.0, y);
                    segs.push(Segment::LineTo(cur.0, cur.1));
                    last_ctrl = None;
                    last_qctrl = None;
                }
                b'C' => {
                    let c1 = (num!() + ox, num!() + oy);
                    let c2 = (num!() + ox, num!() + oy);
                    let to = (num!() + ox, num!() + oy);
                    segs.push(Segment::Cubic { c1, c2, to });
                    last_ctrl = Some(c2);
                    last_qctrl = None;
                    cur = to;
                }
                b'S' => {
                    let c1 = match last_ctrl {
                        Some(lc) => (2.0 * cur.0 - lc.0, 2.0 * cur.1 - lc.1),
                        None => cur,
                    };
                    let c2 = (num!() + ox, num!() + oy);
                    let to = (num!() + ox, num!() + oy);
                    segs.push(Segment::Cubic { c1, c2, to });
                    last_ctrl = Some(c2);
                    last_qctrl = None;
                    cur = to;
                }
                b'Q' => {
                    let c = (num!() + ox, num!() + oy);
                    let to = (num!() + ox, num!() + oy);
                    segs.push(Segment::Quad { c, to });
                    last_qctrl = Some(c);
                    last_ctrl = None;
                    cur = to;
                }
                b'T' => {
                    let c = match last_qctrl {
                        Some(lc) => (2.0 * cur.0 - lc.0, 2.0 * cur.1 - lc.1),
                        None => cur,
                    };
                    let to = (num!() + ox, num!() + oy);
                    segs.push(Segment::Quad { c, to });
                    last_qctrl = Some(c);
                    last_ctrl = None;
                    cur = to;
                }
                b'A' => {
                    let rx = num!().abs();
                    let ry = num!().abs();
                    let rotation = num!();
                    let Some(large) = sc.next_flag() else { break };
                    let Some(sweep) = sc.next_flag() else { break };
                    let to = (num!() + ox, num!() + oy);
                    segs.push(Segment::Arc { rx, ry, rotation, large, sweep, to });
                    cur = to;
                    last_ctrl = None;
                    last_qctrl = None;
                }
                b'Z' => {
                    segs.push(Segment::Close);
                    cur = start;
                    last_ctrl = None;
                    last_qctrl = None;
                    cmd = None;
                }
                _ => break,
            }
        }
        PathData { segments: segs }
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Points whose convex hull contains the path: vertices, control points,
    /// and a sampling of arcs.
    pub fn hull_points(&self) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(self.segments.len() * 2);
        let mut cur = (0.0, 0.0);
        for seg in &self.segments {
            match *seg {
                Segment::MoveTo(x, y) | Segment::LineTo(x, y) => {
                    pts.push((x, y));
                    cur = (x, y);
                }
                Segment::Cubic { c1, c2, to } => {
                    pts.extend([c1, c2, to]);
                    cur = to;
                }
                Segment::Quad { c, to } => {
                    pts.extend([c, to]);
                    cur = to;
                }
                Segment::Arc { rx, ry, rotation, large, sweep, to } => {
                    pts.extend(sample_arc(cur, rx, ry, rotation, large, sweep, to));
                    pts.push(to);
                    cur = to;
                }
                Segment::Close => {}
            }
        }
        pts
    }

    /// Apply `f` to every vertex and control point. Arc radii are kept.
    pub fn map_points(&mut self, mut f: impl FnMut(f64, f64) -> (f64, f64)) {
        for seg in &mut self.segments {
            match seg {
                Segment::MoveTo(x, y) | Segment::LineTo(x, y) => {
                    let p = f(*x, *y);
                    *x = p.0;
                    *y = p.1;
                }
                Segment::Cubic { c1, c2, to } => {
                    *c1 = f(c1.0, c1.1);
                    *c2 = f(c2.0, c2.1);
                    *to = f(to.0, to.1);
                }
                Segment::Quad { c, to } => {
                    *c = f(c.0, c.1);
                    *to = f(to.0, to.1);
                }
                Segment::Arc { to, .. } => *to = f(to.0, to.1),
                Segment::Close => {}
            }
        }
    }

    pub fn to_svg(&self) -> String {
        let mut s = String::new();
        let n = super::fmt_num;
        for seg in &self.segments {
            if !s.is_empty() {
                s.push(' ');
            }
            let _ = match *seg {
                Segment::MoveTo(x, y) => write!(s, "M{},{}", n(x), n(y)),
                Segment::LineTo(x, y) => write!(s, "L{},{}", n(x), n(y)),
                Segment::Cubic { c1, c2, to } => write!(
                    s,
                    "C{},{} {},{} {},{}",
                    n(c1.0),
                    n(c1.1),
                    n(c2.0),
                    n(c2.1),
                    n(to.0),
                    n(to.1)
                ),
                Segment::Quad { c, to } => write!(s, "Q{},{} {},{}", n(c.0), n(c.1), n(to.0), n(to.1)),
                Segment::Arc { rx, ry, rotation, large, sweep, to } => write!(
                    s,
                    "A{},{} {} {} {} {},{}",
                    n(rx),
                    n(ry),
                    n(rotation),
                    large as u8,
                    sweep as u8,
                    n(to.0),
                    n(to.1)
                ),
                Segment::Close => write!(s, "Z"),
            };
        }
        s
    }
}

/// Sample an elliptical arc via the endpoint-to-center conversion.
fn sample_arc(
    from: (f64, f64),
    rx: f64,
    ry: f64,
    rotation: f64,
    large: bool,
    sweep: bool,
    to: (f64, f64),
) -> Vec<(f64, f64)> {
    if rx == 0.0 || ry == 0.0 || from == to {
        return vec![from];
    }
    let phi = rotation.to_radians();
    let (sin_p, cos_p) = phi.sin_cos();
    let dx = (from.0 - to.0) / 2.0;
    let dy = (from.1 - to.1) / 2.0;
    let x1p = cos_p * dx + sin_p * dy;
    let y1p = -sin_p * dx + cos_p * dy;
    let (mut rx, mut ry) = (rx, ry);
    let lambda = (x1p * x1p) / (rx * rx) + (y1p * y1p) / (ry * ry);
    if lambda > 1.0 {
        rx *= lambda.sqrt();
        ry *= lambda.sqrt();
    }
    let num = rx * rx * ry * ry - rx * rx * y1p * y1p - ry * ry * x1p * x1p;
    let den = rx * rx * y1p * y1p + ry * ry * x1p * x1p;
    let mut coef = if den == 0.0 { 0.0 } else { (num / den).max(0.0).sqrt() };
    if large == sweep {
        coef = -coef;
    }
    let cxp = coef * rx * y1p / ry;
    let cyp = -coef * ry * x1p / rx;
    let cx = cos_p * cxp - sin_p * cyp + (from.0 + to.0) / 2.0;
    let cy = sin_p * cxp + cos_p * cyp + (from.1 + to.1) / 2.0;
    let angle = |ux: f64, uy: f64, vx: f64, vy: f64| {
        
        (ux * vy - uy * vx).atan2(ux * vx + uy * vy)
    };
    let theta1 = angle(1.0, 0.0, (x1p - cxp) / rx, (y1p - cyp) / ry);
    let mut dtheta = angle((x1p - cxp) / rx, (y1p - cyp) / ry, (-x1p - cxp) / rx, (-y1p - cyp) / ry);
    if !sweep && dtheta > 0.0 {
        dtheta -= 2.0 * PI;
    } else if sweep && dtheta < 0.0 {
        dtheta += 2.0 * PI;
    }
    const STEPS: usize = 16;
    (0..=STEPS)
        .map(|i| {
            let t = theta1 + dtheta * i as f64 / STEPS as f64;
            let (st, ct) = t.sin_cos();
            (cx + rx * ct * cos_p - ry * st * sin_p, cy + rx * ct * sin_p + ry * st * cos_p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_and_shorthand_commands() {
        let p = PathData::parse("m10 10 h 20 v5 l-5-5z");
        assert_eq!(
            p.segments,
            vec![
                Segment::MoveTo(10.0, 10.0),
                Segment::LineTo(30.0, 10.0),
                Segment::LineTo(30.0, 15.0),
                Segment::LineTo(25.0, 10.0),
                Segment::Close
            ]
        );
    }

    #[test]
    fn implicit_lineto_after_move() {
        let p = PathData::parse("M0,0 10,0 10,10");
        assert_eq!(p.segments.len(), 3);
        assert_eq!(p.segments[2], Segment::LineTo(10.0, 10.0));
    }

    #[test]
    fn semicircle_arc_reaches_its_apex() {
        let p = PathData::parse("M0,0 A10,10 0 0 1 20,0");
        let min_y = p.hull_points().iter().map(|q| q.1).fold(f64::INFINITY, f64::min);
        assert!((min_y + 10.0).abs() < 1e-6, "{min_y}");
    }

    #[test]
    fn error_keeps_prefix() {
        let p = PathData::parse("M0,0 L10,10 L5");
        assert_eq!(p.segments.len(), 2);
    }

    #[test]
    fn serialize_round_trip() {
        let p = PathData::parse("M0.5,6V0.5H890.5V6");
        let q = PathData::parse(&p.to_svg());
        assert_eq!(p, q);
    }
}
