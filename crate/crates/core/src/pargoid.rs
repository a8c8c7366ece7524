//! Finite partial groupoids: carrier, product table, text and JSON formats.
//!
//! Text format:
//!
//! ```text
//! # comment
//! elements: a b c
//! a a = a
//! b c = c
//! ```
//!
//! JSON format: `{"elements": ["a", ...], "products": [["a", "a", "a"], ...]}`.
//!
//! Serialization is canonical: elements in declaration order, product lines
//! sorted lexicographically.

use std::collections::HashMap;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, ParseError, Result};

/// Index of a carrier element. Indices are dense, `0..size`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub u32);

impl ElementId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for ElementId {
    fn from(i: usize) -> Self {
        ElementId(i as u32)
    }
}

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

impl Format {
    /// Guesses the format from content: JSON documents start with `{`.
    pub fn sniff(bytes: &[u8]) -> Format {
        match bytes.iter().find(|b| !b.is_ascii_whitespace()) {
            Some(b'{') => Format::Json,
            _ => Format::Text,
        }
    }
}

/// Sentinel for an undefined product in the raw table.
pub(crate) const UNDEF: u32 = u32::MAX;

/// A finite carrier with a partial binary product. Immutable once built.
#[derive(Clone, PartialEq, Eq)]
pub struct Pargoid {
    names: Vec<String>,
    by_name: HashMap<String, ElementId>,
    /// Row-major `size * size`, `UNDEF` where the product diverges.
    table: Vec<u32>,
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

impl Pargoid {
    /// A pargoid with the given element names and an empty (void) product.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(ParseError::unlocated("carrier must be nonempty").into());
        }
        let mut by_name = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if !is_valid_name(name) {
                return Err(ParseError::unlocated(format!("invalid element name `{name}`")).into());
            }
            if by_name.insert(name.clone(), ElementId::from(i)).is_some() {
                return Err(
                    ParseError::unlocated(format!("duplicate element name `{name}`")).into(),
                );
            }
        }
        let n = names.len();
        Ok(Pargoid {
            names,
            by_name,
            table: vec![UNDEF; n * n],
        })
    }

    /// Defines `a·b = result`, replacing any existing entry.
    pub fn set_product(&mut self, a: ElementId, b: ElementId, result: ElementId) -> Result<()> {
        self.check(a)?;
        self.check(b)?;
        self.check(result)?;
        let n = self.size();
        self.table[a.index() * n + b.index()] = result.0;
        Ok(())
    }

    /// Builds a pargoid from names and `(left, right, result)` name triples.
    pub fn from_products<'a>(
        names: &[&str],
        products: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
    ) -> Result<Self> {
        let mut g = Pargoid::new(names.iter().copied())?;
        for (l, r, v) in products {
            let (l, r, v) = (g.lookup(l)?, g.lookup(r)?, g.lookup(v)?);
            if g.apply(l, r)?.is_some() {
                return Err(ParseError::unlocated(format!(
                    "duplicate product `{} {}`",
                    g.name(l),
                    g.name(r)
                ))
                .into());
            }
            g.set_product(l, r, v)?;
        }
        Ok(g)
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn elements(&self) -> impl ExactSizeIterator<Item = ElementId> + Clone {
        (0..self.size()).map(ElementId::from)
    }

    pub fn name(&self, e: ElementId) -> &str {
        &self.names[e.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Result<ElementId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    fn check(&self, e: ElementId) -> Result<()> {
        if e.index() < self.size() {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange {
                index: e.index(),
                size: self.size(),
            })
        }
    }

    /// The product `ab`, or `None` when it diverges.
    pub fn apply(&self, a: ElementId, b: ElementId) -> Result<Option<ElementId>> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.get(a, b))
    }

    /// Unchecked variant of [`Pargoid::apply`] for in-range arguments.
    pub fn get(&self, a: ElementId, b: ElementId) -> Option<ElementId> {
        match self.table[a.index() * self.size() + b.index()] {
            UNDEF => None,
            v => Some(ElementId(v)),
        }
    }

    pub(crate) fn raw_table(&self) -> &[u32] {
        &self.table
    }

    /// All defined products `(a, b, ab)` in row-major order.
    pub fn products(&self) -> impl Iterator<Item = (ElementId, ElementId, ElementId)> + '_ {
        let n = self.size();
        self.table
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v != UNDEF)
            .map(move |(i, &v)| (ElementId::from(i / n), ElementId::from(i % n), ElementId(v)))
    }

    pub fn product_count(&self) -> usize {
        self.table.iter().filter(|&&v| v != UNDEF).count()
    }

    /// Whether `a` applies to nothing.
    pub fn row_is_empty(&self, a: ElementId) -> bool {
        let n = self.size();
        self.table[a.index() * n..(a.index() + 1) * n]
            .iter()
            .all(|&v| v == UNDEF)
    }

    /// `b <_A a`: `ab` is defined, or `b = ac` for some `c`.
    pub fn less_than(&self, b: ElementId, a: ElementId) -> bool {
        self.get(a, b).is_some() || self.elements().any(|c| self.get(a, c) == Some(b))
    }

    /// Every `b` with `b <_A a`, sorted by index.
    pub fn below(&self, a: ElementId) -> Vec<ElementId> {
        let mut out = vec![false; self.size()];
        for c in self.elements() {
            if let Some(v) = self.get(a, c) {
                out[c.index()] = true;
                out[v.index()] = true;
            }
        }
        self.elements().filter(|e| out[e.index()]).collect()
    }

    pub fn parse(text: &[u8], format: Format) -> Result<Self> {
        let text = std::str::from_utf8(text).map_err(|e| {
            ParseError::unlocated(format!("input is not UTF-8 (byte {})", e.valid_up_to()))
        })?;
        match format {
            Format::Text => parse_text(text),
            Format::Json => parse_json(text),
        }
    }

    pub fn serialize(&self, format: Format) -> String {
        match format {
            Format::Text => self.to_text(),
            Format::Json => self.to_json(),
        }
    }

    fn sorted_product_names(&self) -> Vec<[&str; 3]> {
        let mut lines: Vec<[&str; 3]> = self
            .products()
            .map(|(a, b, v)| [self.name(a), self.name(b), self.name(v)])
            .collect();
        // A space sorts before every name character, so ordering by the
        // (left, right) pair is the same as ordering the rendered lines.
        lines.sort_unstable();
        lines
    }

    fn to_text(&self) -> String {
        let mut out = String::from("elements:");
        for name in &self.names {
            out.push(' ');
            out.push_str(name);
        }
        out.push('\n');
        for [l, r, v] in self.sorted_product_names() {
            out.push_str(&format!("{l} {r} = {v}\n"));
        }
        out
    }

    fn to_json(&self) -> String {
        let quote = |s: &str| serde_json::to_string(s).expect("string serialization");
        let elements: Vec<String> = self.names.iter().map(|n| quote(n)).collect();
        let products: Vec<String> = self
            .sorted_product_names()
            .into_iter()
            .map(|[l, r, v]| format!("    [{}, {}, {}]", quote(l), quote(r), quote(v)))
            .collect();
        let mut out = format!("{{\n  \"elements\": [{}],\n", elements.join(", "));
        if products.is_empty() {
            out.push_str("  \"products\": []\n}\n");
        } else {
            out.push_str(&format!(
                "  \"products\": [\n{}\n  ]\n}}\n",
                products.join(",\n")
            ));
        }
        out
    }
}

impl fmt::Debug for Pargoid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Whitespace-separated tokens with their 1-based character columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (col, (i, ch)) in line.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((col + 1, i)),
            (true, Some((c, s))) => {
                out.push((c, &line[s..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((c, s)) = start {
        out.push((c, &line[s..]));
    }
    out
}

fn parse_text(text: &str) -> Result<Pargoid> {
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header) = lines
        .next()
        .ok_or_else(|| ParseError::unlocated("missing `elements:` header"))?;
    let body = header.trim_start();
    let indent = header.chars().count() - body.chars().count();
    let rest = body
        .strip_prefix("elements:")
        .ok_or_else(|| ParseError::at(header_line, indent + 1, "expected `elements:` header"))?;
    let offset = indent + "elements:".len();
    let decl = tokens(rest);
    if decl.is_empty() {
        return Err(ParseError::at(header_line, offset + 1, "carrier must be nonempty").into());
    }

    let mut names = Vec::with_capacity(decl.len());
    let mut seen = HashMap::new();
    for &(col, name) in &decl {
        if !is_valid_name(name) {
            return Err(ParseError::at(
                header_line,
                offset + col,
                format!("invalid element name `{name}`"),
            )
            .into());
        }
        if seen.insert(name, ()).is_some() {
            return Err(ParseError::at(
                header_line,
                offset + col,
                format!("duplicate element name `{name}`"),
            )
            .into());
        }
        names.push(name);
    }
    let mut g = Pargoid::new(names.iter().copied())?;

    for (line_no, line) in lines {
        let toks = tokens(line);
        let eq = toks.iter().position(|&(_, t)| t == "=");
        let (lhs, rhs) = match eq {
            Some(i) => (&toks[..i], &toks[i + 1..]),
            None => {
                let col = toks.first().map_or(1, |t| t.0);
                return Err(
                    ParseError::at(line_no, col, "expected `<left> <right> = <result>`").into(),
                );
            }
        };
        if lhs.len() != 2 || rhs.len() != 1 {
            let col = toks.first().map_or(1, |t| t.0);
            return Err(
                ParseError::at(line_no, col, "expected `<left> <right> = <result>`").into(),
            );
        }
        let resolve = |&(col, name): &(usize, &str)| {
            g.by_name
                .get(name)
                .copied()
                .ok_or_else(|| ParseError::at(line_no, col, format!("unknown element `{name}`")))
        };
        let (a, b, v) = (resolve(&lhs[0])?, resolve(&lhs[1])?, resolve(&rhs[0])?);
        if g.get(a, b).is_some() {
            return Err(ParseError::at(
                line_no,
                lhs[0].0,
                format!("duplicate product `{} {}`", lhs[0].1, lhs[1].1),
            )
            .into());
        }
        g.set_product(a, b, v)?;
    }
    Ok(g)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonPargoid {
    elements: Vec<String>,
    #[serde(default)]
    products: Vec<(String, String, String)>,
}

fn parse_json(text: &str) -> Result<Pargoid> {
    let doc: JsonPargoid = serde_json::from_str(text)
        .map_err(|e| ParseError::at(e.line(), e.column(), e.to_string()))?;
    let mut g = Pargoid::new(doc.elements)?;
    for (i, (l, r, v)) in doc.products.iter().enumerate() {
        let resolve = |name: &str| {
            g.by_name.get(name).copied().ok_or_else(|| {
                ParseError::unlocated(format!("products[{i}]: unknown element `{name}`"))
            })
        };
        let (a, b, v) = (resolve(l)?, resolve(r)?, resolve(v)?);
        if g.get(a, b).is_some() {
            return Err(ParseError::unlocated(format!(
                "products[{i}]: duplicate product `{l} {r}`"
            ))
            .into());
        }
        g.set_product(a, b, v)?;
    }
    Ok(g)
}
