//! 2D affine transforms and the SVG `transform` attribute grammar.

use serde::{Deserialize, Serialize};

/// Affine matrix `[a c e; b d f; 0 0 1]`, mapping `(x, y)` to
/// `(a*x + c*y + e, b*x + d*y + f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Affine {
    pub const IDENTITY: Affine = Affine { a: 1.0, b: 0.0, c: 0.0, d: 1.0, e: 0.0, f: 0.0 };

    pub fn translate(tx: f64, ty: f64) -> Self {
        Affine { e: tx, f: ty, ..Self::IDENTITY }
    }

    pub fn scale(sx: f64, sy: f64) -> Self {
        Affine { a: sx, d: sy, ..Self::IDENTITY }
    }

    pub fn rotate_deg(angle: f64) -> Self {
        let (s, c) = angle.to_radians().sin_cos();
        Affine { a: c, b: s, c: -s, d: c, e: 0.0, f: 0.0 }
    }

    /// `self ∘ rhs`: apply `rhs` first, then `self`.
    pub fn then_apply(&self, rhs: &Affine) -> Affine {
        Affine {
            a: self.a * rhs.a + self.c * rhs.b,
            b: self.b * rhs.a + self.d * rhs.b,
            c: self.a * rhs.c + self.c * rhs.d,
            d: self.b * rhs.c + self.d * rhs.d,
            e: self.a * rhs.e + self.c * rhs.f + self.e,
            f: self.b * rhs.e + self.d * rhs.f + self.f,
        }
    }

    pub fn apply(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.c * y + self.e, self.b * x + self.d * y + self.f)
    }

    /// Apply only the linear part (for displacement vectors).
    pub fn apply_vector(&self, x: f64, y: f64) -> (f64, f64) {
        (self.a * x + self.c * y, self.b * x + self.d * y)
    }

    pub fn determinant(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn inverse(&self) -> Option<Affine> {
        let det = self.determinant();
        if det.abs() < 1e-12 {
            return None;
        }
        let a = self.d / det;
        let b = -self.b / det;
        let c = -self.c / det;
        let d = self.a / det;
        let e = -(a * self.e + c * self.f);
        let f = -(b * self.e + d * self.f);
        Some(Affine { a, b, c, d, e, f })
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// True when the matrix has no rotation or skew component.
    pub fn is_axis_aligned(&self) -> bool {
        self.b.abs() < 1e-12 && self.c.abs() < 1e-12
    }
}

/// Parse an SVG transform list such as `translate(10,20) rotate(-45 5 5)`.
///
/// Unknown functions or malformed argument lists yield `None`.
pub fn parse_transform(src: &str) -> Option<Affine> {
    let mut result = Affine::IDENTITY;
    let mut rest = src.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c.is_whitespace() || c == ',');
        if rest.is_empty() {
            break;
        }
        let open = rest.find('(')?;
        let name = rest[..open].trim();
        let close = rest[open..].find(')')? + open;
        let args = parse_number_list(&rest[open + 1..close])?;
        let m = match (name, args.as_slice()) {
            ("matrix", [a, b, c, d, e, f]) => Affine { a: *a, b: *b, c: *c, d: *d, e: *e, f: *f },
            ("translate", [tx]) => Affine::translate(*tx, 0.0),
            ("translate", [tx, ty]) => Affine::translate(*tx, *ty),
            ("scale", [s]) => Affine::scale(*s, *s),
            ("scale", [sx, sy]) => Affine::scale(*sx, *sy),
            ("rotate", [angle]) => Affine::rotate_deg(*angle),
            ("rotate", [angle, cx, cy]) => Affine::translate(*cx, *cy)
                .then_apply(&Affine::rotate_deg(*angle))
                .then_apply(&Affine::translate(-cx, -cy)),
            ("skewX", [angle]) => Affine { c: angle.to_radians().tan(), ..Affine::IDENTITY },
            ("skewY", [angle]) => Affine { b: angle.to_radians().tan(), ..Affine::IDENTITY },
            _ => return None,
        };
        result = result.then_apply(&m);
        rest = &rest[close + 1..];
    }
    Some(result)
}

/// Parse a whitespace/comma separated list of numbers (SVG number grammar).
pub fn parse_number_list(src: &str) -> Option<Vec<f64>> {
    let mut out = Vec::new();
    let mut scanner = NumberScanner::new(src);
    while let Some(tok) = scanner.next_number() {
        out.push(tok?);
    }
    Some(out)
}

/// Tokenizer for SVG numbers that tolerates the compact forms allowed in
/// path data (`1-2`, `.5.5`, `1e-3`).
pub(crate) struct NumberScanner<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> NumberScanner<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        NumberScanner { bytes: src.as_bytes(), pos: 0 }
    }

    pub(crate) fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() || b == b',' {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    pub(crate) fn peek(&mut self) -> Option<u8> {
        self.skip_separators();
        self.bytes.get(self.pos).copied()
    }

    pub(crate) fn bump(&mut self) -> Option<u8> {
        let b = self.peek()?;
        self.pos += 1;
        Some(b)
    }

    /// Returns `None` at end of input, `Some(None)` on a malformed token.
    pub(crate) fn next_number(&mut self) -> Option<Option<f64>> {
        let b = self.peek()?;
        if !(b.is_ascii_digit() || b == b'-' || b == b'+' || b == b'.') {
            return Some(None);
        }
        let start = self.pos;
        let mut i = self.pos;
        if matches!(self.bytes[i], b'-' | b'+') {
            i += 1;
        }
        let mut seen_dot = false;
        let mut seen_digit = false;
        while i < self.bytes.len() {
            let c = self.bytes[i];
            if c.is_ascii_digit() {
                seen_digit = true;
                i += 1;
            } else if c == b'.' && !seen_dot {
                seen_dot = true;
                i += 1;
            } else {
                break;
            }
        }
        if i < self.bytes.len() && matches!(self.bytes[i], b'e' | b'E') {
            let mut j = i + 1;
            if j < self.bytes.len() && matches!(self.bytes[j], b'-' | b'+') {
                j += 1;
            }
            if j < self.bytes.len() && self.bytes[j].is_ascii_digit() {
                while j < self.bytes.len() && self.bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        if !seen_digit {
            return Some(None);
        }
        self.pos = i;
        let text = std::str::from_utf8(&self.bytes[start..i]).ok()?;
        Some(text.parse().ok())
    }

    /// Arc flags are single characters `0`/`1` and may be packed without separators.
    pub(crate) fn next_flag(&mut self) -> Option<bool> {
        match self.peek()? {
            b'0' => {
                self.pos += 1;
                Some(false)
            }
            b'1' => {
                self.pos += 1;
                Some(true)
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: (f64, f64), b: (f64, f64)) -> bool {
        (a.0 - b.0).abs() < 1e-9 && (a.1 - b.1).abs() < 1e-9
    }

    #[test]
    fn translate_then_scale_composes_left_to_right() {
        let m = parse_transform("translate(5,5) scale(2)").unwrap();
        assert!(close(m.apply(1.0, 1.0), (7.0, 7.0)));
    }

    #[test]
    fn rotate_about_point() {
        let m = parse_transform("rotate(90 10 10)").unwrap();
        assert!(close(m.apply(20.0, 10.0), (10.0, 20.0)));
    }

    #[test]
    fn inverse_round_trips() {
        let m = parse_transform("matrix(2 0.5 -0.3 1.5 7 -3)").unwrap();
        let inv = m.inverse().unwrap();
        let p = m.apply(3.0, 4.0);
        assert!(close(inv.apply(p.0, p.1), (3.0, 4.0)));
    }

    #[test]
    fn compact_numbers() {
        assert_eq!(parse_number_list("1-2.5.5e1,3").unwrap(), vec![1.0, -2.5, 5.0, 3.0]);
        assert!(parse_transform("translate(1").is_none());
        assert!(parse_transform("wobble(1)").is_none());
    }
}
