//! Simple arrow types over ground names, and typings of a carrier.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::pargoid::{ElementId, Pargoid};

/// Name of a ground (free generator) type.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroundName(pub String);

impl GroundName {
    pub fn new(s: impl Into<String>) -> Self {
        GroundName(s.into())
    }

    /// Ground name for the congruence class whose smallest member is `rep`.
    pub fn for_class(rep: ElementId) -> Self {
        GroundName(format!("g{}", rep.0))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for GroundName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A term of the absolutely free algebra generated by the ground names
/// under `->`. Equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TypeTerm {
    Ground(GroundName),
    Arrow(Arc<TypeTerm>, Arc<TypeTerm>),
}

impl TypeTerm {
    pub fn ground(name: impl Into<String>) -> Self {
        TypeTerm::Ground(GroundName::new(name))
    }

    pub fn arrow(from: TypeTerm, to: TypeTerm) -> Self {
        TypeTerm::Arrow(Arc::new(from), Arc::new(to))
    }

    /// `(antecedent, consequent)` of a function type.
    pub fn as_arrow(&self) -> Option<(&TypeTerm, &TypeTerm)> {
        match self {
            TypeTerm::Arrow(a, b) => Some((a, b)),
            TypeTerm::Ground(_) => None,
        }
    }

    /// Number of nodes: grounds count 1, arrows add 1 to their parts.
    pub fn size(&self) -> usize {
        match self {
            TypeTerm::Ground(_) => 1,
            TypeTerm::Arrow(a, b) => a.size() + b.size() + 1,
        }
    }

    /// Arrow nesting depth; grounds have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            TypeTerm::Ground(_) => 0,
            TypeTerm::Arrow(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    pub fn grounds(&self, out: &mut Vec<GroundName>) {
        match self {
            TypeTerm::Ground(g) => out.push(g.clone()),
            TypeTerm::Arrow(a, b) => {
                a.grounds(out);
                b.grounds(out);
            }
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let mut p = TypeParser {
            chars: s.chars().collect(),
            pos: 0,
        };
        let t = p.arrow()?;
        p.skip_ws();
        if p.pos < p.chars.len() {
            return Err(p.error("unexpected trailing input").into());
        }
        Ok(t)
    }
}

/// Right-associative arrow syntax; parentheses only around arrows on the
/// left of an arrow.
impl fmt::Display for TypeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeTerm::Ground(g) => write!(f, "{g}"),
            TypeTerm::Arrow(a, b) => match **a {
                TypeTerm::Arrow(..) => write!(f, "({a}) -> {b}"),
                TypeTerm::Ground(_) => write!(f, "{a} -> {b}"),
            },
        }
    }
}

impl fmt::Debug for TypeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

pub fn format_type(t: &TypeTerm) -> String {
    t.to_string()
}

pub fn parse_type(s: &str) -> Result<TypeTerm> {
    TypeTerm::parse(s)
}

struct TypeParser {
    chars: Vec<char>,
    pos: usize,
}

impl TypeParser {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::at(1, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn arrow(&mut self) -> Result<TypeTerm, ParseError> {
        let left = self.atom()?;
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&'-') {
            if self.chars.get(self.pos + 1) != Some(&'>') {
                return Err(self.error("expected `->`"));
            }
            self.pos += 2;
            let right = self.arrow()?;
            return Ok(TypeTerm::arrow(left, right));
        }
        Ok(left)
    }

    fn atom(&mut self) -> Result<TypeTerm, ParseError> {
        self.skip_ws();
        match self.chars.get(self.pos) {
            Some('(') => {
                self.pos += 1;
                let t = self.arrow()?;
                self.skip_ws();
                if self.chars.get(self.pos) != Some(&')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(t)
            }
            Some(c) if is_name_char(*c) => {
                let start = self.pos;
                while self.chars.get(self.pos).is_some_and(|c| is_name_char(*c)) {
                    self.pos += 1;
                }
                Ok(TypeTerm::Ground(GroundName(
                    self.chars[start..self.pos].iter().collect(),
                )))
            }
            Some(_) => Err(self.error("expected a type name or `(`")),
            None => Err(self.error("unexpected end of type")),
        }
    }
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Whether every arrow in the set has both of its parts in the set.
pub fn strict_closure_check<'a>(inhabited: impl IntoIterator<Item = &'a TypeTerm>) -> bool {
    let set: HashSet<&TypeTerm> = inhabited.into_iter().collect();
    set.iter().all(|t| match t {
        TypeTerm::Ground(_) => true,
        TypeTerm::Arrow(a, b) => set.contains(&**a) && set.contains(&**b),
    })
}

// JSON encoding: a ground is a string, an arrow a two-element array.
impl Serialize for TypeTerm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            TypeTerm::Ground(g) => s.serialize_str(&g.0),
            TypeTerm::Arrow(a, b) => {
                let mut seq = s.serialize_seq(Some(2))?;
                seq.serialize_element(&**a)?;
                seq.serialize_element(&**b)?;
                seq.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for TypeTerm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct TermVisitor;

        impl<'de> Visitor<'de> for TermVisitor {
            type Value = TypeTerm;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a ground name or a two-element array")
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<TypeTerm, E> {
                if v.is_empty() || !v.chars().all(is_name_char) {
                    return Err(E::custom(format!("invalid ground name `{v}`")));
                }
                Ok(TypeTerm::ground(v))
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<TypeTerm, A::Error> {
                let a = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let b = seq
                    .next_element()?
                    .ok_or_else(|| de::Error::invalid_length(1, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(3, &self));
                }
                Ok(TypeTerm::arrow(a, b))
            }
        }

        d.deserialize_any(TermVisitor)
    }
}

/// A total assignment of types to the elements of a carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Typing {
    assignment: Vec<TypeTerm>,
    /// Ground names and the elements they classify.
    pub ground_classes: BTreeMap<GroundName, Vec<ElementId>>,
}

impl Typing {
    /// Typing with `ground_classes` derived from the ground-typed elements.
    pub fn new(assignment: Vec<TypeTerm>) -> Self {
        let mut ground_classes: BTreeMap<GroundName, Vec<ElementId>> = BTreeMap::new();
        for (i, t) in assignment.iter().enumerate() {
            if let TypeTerm::Ground(g) = t {
                ground_classes
                    .entry(g.clone())
                    .or_default()
                    .push(ElementId::from(i));
            }
        }
        Typing {
            assignment,
            ground_classes,
        }
    }

    pub fn with_ground_classes(
        assignment: Vec<TypeTerm>,
        ground_classes: BTreeMap<GroundName, Vec<ElementId>>,
    ) -> Self {
        Typing {
            assignment,
            ground_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn type_of(&self, e: ElementId) -> &TypeTerm {
        &self.assignment[e.index()]
    }

    pub fn assignment(&self) -> &[TypeTerm] {
        &self.assignment
    }

    /// Distinct inhabited types, in order of first occurrence.
    pub fn inhabited(&self) -> Vec<&TypeTerm> {
        let mut seen = HashSet::new();
        self.assignment.iter().filter(|t| seen.insert(*t)).collect()
    }

    /// Reads `{"types": {"<element>": "<type>"}}`, optionally with
    /// `"schema": 1`. Every element must be typed and every key must name an
    /// element.
    pub fn from_json(g: &Pargoid, text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Doc {
            #[serde(default)]
            schema: Option<u64>,
            types: BTreeMap<String, String>,
        }
        let doc: Doc = serde_json::from_str(text)
            .map_err(|e| ParseError::at(e.line(), e.column(), e.to_string()))?;
        if let Some(v) = doc.schema.filter(|&v| v != 1) {
            return Err(ParseError::unlocated(format!("unsupported schema version {v}")).into());
        }
        let mut slots: Vec<Option<TypeTerm>> = vec![None; g.size()];
        for (name, syntax) in &doc.types {
            let e = g.lookup(name)?;
            let t = TypeTerm::parse(syntax).map_err(|err| match err {
                Error::Parse(p) => {
                    Error::Parse(ParseError::unlocated(format!("type of `{name}`: {p}")))
                }
                other => other,
            })?;
            slots[e.index()] = Some(t);
        }
        let assignment = slots
            .into_iter()
            .enumerate()
            .map(|(i, t)| t.ok_or_else(|| Error::MissingType(g.names()[i].clone())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Typing::new(assignment))
    }

    /// `{"types": {...}}` with keys in declaration order.
    pub fn to_json_value(&self, g: &Pargoid) -> serde_json::Value {
        let mut types = serde_json::Map::new();
        for e in g.elements() {
            types.insert(
                g.name(e).to_string(),
                serde_json::Value::String(self.type_of(e).to_string()),
            );
        }
        serde_json::json!({ "types": types })
    }
}
