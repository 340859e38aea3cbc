//! A small CSS subset: embedded `<style>` rules with type, class, id and
//! descendant selectors, plus inline `style` declarations.

/// Presentation properties that participate in the cascade.
pub const PRESENTATION_PROPERTIES: &[&str] = &[
    "fill",
    "fill-opacity",
    "stroke",
    "stroke-width",
    "stroke-opacity",
    "stroke-dasharray",
    "opacity",
    "font-size",
    "font-family",
    "font-weight",
    "font-style",
    "text-anchor",
    "dominant-baseline",
    "alignment-baseline",
    "display",
    "visibility",
    "shape-rendering",
];

/// Properties inherited from the parent when not set on the element.
pub const INHERITED_PROPERTIES: &[&str] = &[
    "fill",
    "fill-opacity",
    "stroke",
    "stroke-width",
    "stroke-opacity",
    "stroke-dasharray",
    "font-size",
    "font-family",
    "font-weight",
    "font-style",
    "text-anchor",
    "visibility",
];

#[derive(Debug, Clone, PartialEq)]
struct Compound {
    tag: Option<String>,
    id: Option<String>,
    classes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
struct Selector {
    /// Descendant chain, outermost first.
    parts: Vec<Compound>,
    specificity: (u32, u32, u32),
}

#[derive(Debug, Clone, PartialEq)]
struct Rule {
    selector: Selector,
    declarations: Vec<(String, String)>,
    order: usize,
}

/// What a selector needs to know about an element.
pub trait Selectable {
    fn tag(&self) -> &str;
    fn id_attr(&self) -> Option<&str>;
    fn has_class(&self, class: &str) -> bool;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Stylesheet {
    rules: Vec<Rule>,
}

impl Stylesheet {
    /// Parse CSS text. At-rules are skipped; `@import` is reported through
    /// `warnings` because external sheets are not fetched.
    pub fn parse(css: &str, warnings: &mut Vec<String>) -> Stylesheet {
        let css = strip_comments(css);
        let mut rules = Vec::new();
        let bytes = css.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            if bytes[i] == b'@' {
                let rest = &css[i..];
                if rest.starts_with("@import") {
                    warnings.push("external stylesheet import ignored".to_string());
                }
                // skip to ';' or a balanced block, whichever comes first
                let semi = rest.find(';');
                let brace = rest.find('{');
                match (semi, brace) {
                    (Some(s), Some(b)) if s < b => i += s + 1,
                    (Some(s), None) => i += s + 1,
                    (_, Some(b)) => i += b + skip_block(&rest[b..]),
                    (None, None) => break,
                }
                continue;
            }
            let Some(open) = css[i..].find('{') else { break };
            let selectors = &css[i..i + open];
            let Some(close) = css[i + open..].find('}') else { break };
            let body = &css[i + open + 1..i + open + close];
            let declarations = parse_declarations(body);
            for sel in selectors.split(',') {
                if let Some(selector) = parse_selector(sel.trim()) {
                    let order = rules.len();
                    rules.push(Rule { selector, declarations: declarations.clone(), order });
                }
            }
            i += open + close + 1;
        }
        Stylesheet { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Declarations matching `element` (with `ancestors` innermost first),
    /// ordered from lowest to highest precedence.
    pub fn matching<'s, E: Selectable>(&'s self, element: &E, ancestors: &[&E]) -> Vec<&'s (String, String)> {
        let mut hits: Vec<&Rule> = self
            .rules
            .iter()
            .filter(|r| selector_matches(&r.selector, element, ancestors))
            .collect();
        hits.sort_by_key(|r| (r.selector.specificity, r.order));
        hits.iter().flat_map(|r| r.declarations.iter()).collect()
    }
}

fn skip_block(src: &str) -> usize {
    let mut depth = 0usize;
    for (i, c) in src.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth = depth.saturating_sub(1);
                if depth == 0 {
                    return i + 1;
                }
            }
            _ => {}
        }
    }
    src.len()
}

fn strip_comments(css: &str) -> String {
    let mut out = String::with_capacity(css.len());
    let mut rest = css;
    while let Some(start) = rest.find("/*") {
        out.push_str(&rest[..start]);
        match rest[start + 2..].find("*/") {
            Some(end) => rest = &rest[start + 2 + end + 2..],
            None => {
                rest = "";
                break;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Parse `a: b; c: d` declaration lists (inline styles and rule bodies).
pub fn parse_declarations(body: &str) -> Vec<(String, String)> {
    body.split(';')
        .filter_map(|decl| {
            let (k, v) = decl.split_once(':')?;
            let k = k.trim().to_ascii_lowercase();
            let v = v.trim().trim_end_matches("!important").trim().to_string();
            (!k.is_empty() && !v.is_empty()).then_some((k, v))
        })
        .collect()
}

fn parse_selector(src: &str) -> Option<Selector> {
    if src.is_empty() || src.contains(['>', '+', '~', '[', ':']) {
        return None;
    }
    let mut parts = Vec::new();
    let mut spec = (0, 0, 0);
    for token in src.split_whitespace() {
        let mut compound = Compound { tag: None, id: None, classes: Vec::new() };
        let mut buf = String::new();
        let mut mode = b't';
        let flush = |mode: u8, buf: &mut String, c: &mut Compound| {
            if buf.is_empty() {
                return;
            }
            let v = std::mem::take(buf);
            match mode {
                b't' if v != "*" => c.tag = Some(v),
                b'.' => c.classes.push(v),
                b'#' => c.id = Some(v),
                _ => {}
            }
        };
        for ch in token.chars() {
            if ch == '.' || ch == '#' {
                flush(mode, &mut buf, &mut compound);
                mode = ch as u8;
            } else {
                buf.push(ch);
            }
        }
        flush(mode, &mut buf, &mut compound);
        spec.0 += compound.id.is_some() as u32;
        spec.1 += compound.classes.len() as u32;
        spec.2 += compound.tag.is_some() as u32;
        parts.push(compound);
    }
    Some(Selector { parts, specificity: spec })
}

fn compound_matches<E: Selectable>(c: &Compound, e: &E) -> bool {
    if let Some(tag) = &c.tag {
        if tag != e.tag() {
            return false;
        }
    }
    if let Some(id) = &c.id {
        if Some(id.as_str()) != e.id_attr() {
            return false;
        }
    }
    c.classes.iter().all(|cls| e.has_class(cls))
}

fn selector_matches<E: Selectable>(sel: &Selector, element: &E, ancestors: &[&E]) -> bool {
    let Some((last, outer)) = sel.parts.split_last() else { return false };
    if !compound_matches(last, element) {
        return false;
    }
    // match remaining compounds right-to-left against the ancestor chain
    let mut anc = ancestors.iter();
    'outer: for part in outer.iter().rev() {
        for a in anc.by_ref() {
            if compound_matches(part, *a) {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    struct E {
        tag: &'static str,
        id: Option<&'static str>,
        classes: Vec<&'static str>,
    }

    impl Selectable for E {
        fn tag(&self) -> &str {
            self.tag
        }
        fn id_attr(&self) -> Option<&str> {
            self.id
        }
        fn has_class(&self, class: &str) -> bool {
            self.classes.contains(&class)
        }
    }

    #[test]
    fn descendant_and_specificity() {
        let mut w = Vec::new();
        let sheet = Stylesheet::parse(
            "/* c */ text { fill: red } .tick text { fill: blue; font-size: 10px } #t { fill: green }",
            &mut w,
        );
        let g = E { tag: "g", id: None, classes: vec!["tick"] };
        let t = E { tag: "text", id: None, classes: vec![] };
        let hits = sheet.matching(&t, &[&g]);
        let fill: Vec<_> = hits.iter().filter(|d| d.0 == "fill").map(|d| d.1.as_str()).collect();
        assert_eq!(fill, vec!["red", "blue"]);
        let lone = sheet.matching(&t, &[]);
        assert_eq!(lone.len(), 1);
        let byid = E { tag: "text", id: Some("t"), classes: vec![] };
        assert_eq!(sheet.matching(&byid, &[]).last().unwrap().1, "green");
    }

    #[test]
    fn import_is_reported_and_media_skipped() {
        let mut w = Vec::new();
        let sheet = Stylesheet::parse("@import url(x.css); @media print { rect { fill: red } } rect { fill: blue }", &mut w);
        assert_eq!(w.len(), 1);
        assert_eq!(sheet.rules.len(), 1);
    }
}
