//! Independent checks of a typing against the typed-algebra axioms.
//!
//! Nothing here depends on how a typing was produced; this module is the
//! oracle for the decision procedure.

use std::collections::HashMap;
use std::fmt;

use crate::congruence::Partition;
use crate::error::{Error, Result};
use crate::pargoid::{ElementId, Pargoid};
use crate::polyclone::{CloneResult, OpIndex};
use crate::types::{strict_closure_check, GroundName, TypeTerm, Typing};

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq)]
pub enum VerifyMode {
    /// `ab` defined implies `type(a) = type(b) -> type(ab)`.
    #[default]
    Literal,
    /// Additionally, matching types force the product to be defined.
    Strong,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// Two elements share a type block yet the blocks are not a partition.
    Partition(String),
    /// Distinct types with the same block of elements.
    Injectivity { left: TypeTerm, right: TypeTerm },
    /// An inhabited arrow type whose part is uninhabited.
    NotStrict { arrow: TypeTerm, missing: TypeTerm },
    /// `ab` is defined but the types do not fit.
    Product {
        a: ElementId,
        b: ElementId,
        ab: ElementId,
    },
    /// `type(a) = type(b) -> β` yet `ab` is undefined.
    MissingProduct { a: ElementId, b: ElementId },
}

impl Violation {
    pub fn describe(&self, g: &Pargoid, typing: &Typing) -> String {
        match self {
            Violation::Partition(msg) => format!("type blocks do not partition the carrier: {msg}"),
            Violation::Injectivity { left, right } => {
                format!("types `{left}` and `{right}` name the same block")
            }
            Violation::NotStrict { arrow, missing } => {
                format!("`{arrow}` is inhabited but `{missing}` is not")
            }
            Violation::Product { a, b, ab } => format!(
                "`{} {} = {}` but the types are `{}`, `{}`, `{}`",
                g.name(*a),
                g.name(*b),
                g.name(*ab),
                typing.type_of(*a),
                typing.type_of(*b),
                typing.type_of(*ab)
            ),
            Violation::MissingProduct { a, b } => format!(
                "`{} {}` is undefined although `{}` has type `{}` and `{}` has type `{}`",
                g.name(*a),
                g.name(*b),
                g.name(*a),
                typing.type_of(*a),
                g.name(*b),
                typing.type_of(*b)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: VerifyMode,
    pub partition_ok: bool,
    pub strictness_ok: bool,
    pub injectivity_ok: bool,
    pub axiom1_forward_ok: bool,
    pub axiom1_totality_ok: bool,
    pub failures: Vec<Violation>,
}

impl VerifyReport {
    /// Acceptance under the report's mode. Totality only counts in strong mode.
    pub fn accepted(&self) -> bool {
        let literal = self.partition_ok
            && self.strictness_ok
            && self.injectivity_ok
            && self.axiom1_forward_ok;
        match self.mode {
            VerifyMode::Literal => literal,
            VerifyMode::Strong => literal && self.axiom1_totality_ok,
        }
    }
}

/// Checks the typing. Every check runs regardless of mode; `mode` only
/// decides what [`VerifyReport::accepted`] requires.
pub fn verify(g: &Pargoid, typing: &Typing, mode: VerifyMode) -> Result<VerifyReport> {
    if typing.len() != g.size() {
        let missing = g.names().get(typing.len()).cloned().unwrap_or_default();
        return Err(Error::MissingType(missing));
    }
    let mut failures = Vec::new();

    // Blocks A_α: elements grouped by structurally equal type.
    let mut blocks: HashMap<&TypeTerm, Vec<ElementId>> = HashMap::new();
    for e in g.elements() {
        blocks.entry(typing.type_of(e)).or_default().push(e);
    }
    let mut covered = vec![0usize; g.size()];
    for members in blocks.values() {
        for e in members {
            covered[e.index()] += 1;
        }
    }
    let partition_ok = covered.iter().all(|&c| c == 1);
    if !partition_ok {
        failures.push(Violation::Partition(
            "an element is in zero or several blocks".into(),
        ));
    }

    let mut by_block: HashMap<&[ElementId], &TypeTerm> = HashMap::new();
    let mut injectivity_ok = true;
    let mut sorted: Vec<(&TypeTerm, &Vec<ElementId>)> =
        blocks.iter().map(|(t, m)| (*t, m)).collect();
    sorted.sort_by_key(|(_, m)| m[0]);
    for (t, members) in &sorted {
        if let Some(other) = by_block.insert(members.as_slice(), t) {
            injectivity_ok = false;
            failures.push(Violation::Injectivity {
                left: other.clone(),
                right: (*t).clone(),
            });
        }
    }

    let inhabited = typing.inhabited();
    let strictness_ok = strict_closure_check(inhabited.iter().copied());
    if !strictness_ok {
        for t in &inhabited {
            if let TypeTerm::Arrow(a, b) = t {
                for part in [&**a, &**b] {
                    if !blocks.contains_key(part) {
                        failures.push(Violation::NotStrict {
                            arrow: (*t).clone(),
                            missing: part.clone(),
                        });
                    }
                }
            }
        }
    }

    let mut axiom1_forward_ok = true;
    for (a, b, ab) in g.products() {
        let fits = typing
            .type_of(a)
            .as_arrow()
            .is_some_and(|(from, to)| from == typing.type_of(b) && to == typing.type_of(ab));
        if !fits {
            axiom1_forward_ok = false;
            failures.push(Violation::Product { a, b, ab });
        }
    }

    let mut axiom1_totality_ok = true;
    for a in g.elements() {
        let Some((from, _)) = typing.type_of(a).as_arrow() else {
            continue;
        };
        for &b in blocks.get(from).map(Vec::as_slice).unwrap_or_default() {
            if g.get(a, b).is_none() {
                axiom1_totality_ok = false;
                if mode == VerifyMode::Strong {
                    failures.push(Violation::MissingProduct { a, b });
                }
            }
        }
    }

    Ok(VerifyReport {
        mode,
        partition_ok,
        strictness_ok,
        injectivity_ok,
        axiom1_forward_ok,
        axiom1_totality_ok,
        failures,
    })
}

/// Two same-typed elements that ϖ separates, with a separating operation.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct SameTypeViolation {
    pub a: ElementId,
    pub b: ElementId,
    pub separator: OpIndex,
}

impl fmt::Display for SameTypeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} and {} share a type but op {} separates them",
            self.a, self.b, self.separator.0
        )
    }
}

/// Elements of the same type must be ϖ-equivalent. Returns the first pair
/// that is not, with a separating operation from the (closed) clone.
pub fn same_type_equivalence_violation(
    g: &Pargoid,
    typing: &Typing,
    clone: &CloneResult,
    varpi: &Partition,
) -> Option<SameTypeViolation> {
    for a in g.elements() {
        for b in g.elements().skip(a.index() + 1) {
            if typing.type_of(a) == typing.type_of(b) && !varpi.equivalent(a, b) {
                let separator = clone
                    .ops()
                    .find(|&op| clone.converges(op, a) != clone.converges(op, b))?;
                return Some(SameTypeViolation { a, b, separator });
            }
        }
    }
    None
}

/// Whether a bijective renaming of ground names maps `t1` onto `t2`
/// element by element.
pub fn typing_isomorphic(t1: &Typing, t2: &Typing) -> bool {
    if t1.len() != t2.len() {
        return false;
    }
    let mut forward: HashMap<&GroundName, &GroundName> = HashMap::new();
    let mut backward: HashMap<&GroundName, &GroundName> = HashMap::new();
    t1.assignment()
        .iter()
        .zip(t2.assignment())
        .all(|(x, y)| unify(x, y, &mut forward, &mut backward))
}

fn unify<'a>(
    x: &'a TypeTerm,
    y: &'a TypeTerm,
    forward: &mut HashMap<&'a GroundName, &'a GroundName>,
    backward: &mut HashMap<&'a GroundName, &'a GroundName>,
) -> bool {
    match (x, y) {
        (TypeTerm::Ground(p), TypeTerm::Ground(q)) => {
            *forward.entry(p).or_insert(q) == q && *backward.entry(q).or_insert(p) == p
        }
        (TypeTerm::Arrow(a, b), TypeTerm::Arrow(c, d)) => {
            unify(a, c, forward, backward) && unify(b, d, forward, backward)
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::congruence::leibniz;
    use crate::pargoid::Format;
    use crate::polyclone::compute_clone;

    fn six() -> Pargoid {
        Pargoid::parse(
            b"elements: a b c ab cb d\na b = ab\nc b = cb\nab d = d\n",
            Format::Text,
        )
        .unwrap()
    }

    fn typing(types: &[&str]) -> Typing {
        Typing::new(types.iter().map(|s| TypeTerm::parse(s).unwrap()).collect())
    }

    fn reference_six_typing() -> Typing {
        typing(&["β -> (δ -> δ)", "β", "β -> γ", "δ -> δ", "γ", "δ"])
    }

    #[test]
    fn six_element_typing_verifies_in_both_modes() {
        let g = six();
        let t = reference_six_typing();
        let literal = verify(&g, &t, VerifyMode::Literal).unwrap();
        assert!(literal.accepted(), "{:?}", literal.failures);
        let strong = verify(&g, &t, VerifyMode::Strong).unwrap();
        assert!(strong.accepted(), "{:?}", strong.failures);
    }

    #[test]
    fn altered_typing_is_rejected() {
        let g = six();
        let t = typing(&["β -> (δ -> δ)", "β", "β -> (δ -> δ)", "δ -> δ", "γ", "δ"]);
        let r = verify(&g, &t, VerifyMode::Literal).unwrap();
        assert!(!r.accepted());
        assert!(!r.axiom1_forward_ok);
        let c = g.lookup("c").unwrap();
        let b = g.lookup("b").unwrap();
        assert!(r.failures.contains(&Violation::Product {
            a: c,
            b,
            ab: g.lookup("cb").unwrap()
        }));
    }

    #[test]
    fn self_application_is_never_typable() {
        let g = Pargoid::parse(b"elements: a b\na a = b\n", Format::Text).unwrap();
        for types in [["g0 -> g1", "g1"], ["g0", "g0"], ["(g0 -> g1) -> g1", "g1"]] {
            let r = verify(&g, &typing(&types), VerifyMode::Literal).unwrap();
            assert!(!r.axiom1_forward_ok);
        }
    }

    #[test]
    fn strictness_and_totality() {
        let g = Pargoid::new(["x", "y"]).unwrap();
        let r = verify(&g, &typing(&["g0 -> g1", "g0"]), VerifyMode::Literal).unwrap();
        assert!(!r.strictness_ok);
        assert!(!r.accepted());

        // f has type u -> v and u is inhabited, but f u is undefined.
        let g = Pargoid::new(["f", "u", "v"]).unwrap();
        let t = typing(&["u -> v", "u", "v"]);
        let literal = verify(&g, &t, VerifyMode::Literal).unwrap();
        assert!(literal.accepted());
        assert!(!literal.axiom1_totality_ok);
        let strong = verify(&g, &t, VerifyMode::Strong).unwrap();
        assert!(!strong.accepted());
        assert_eq!(
            strong.failures,
            [Violation::MissingProduct {
                a: ElementId(0),
                b: ElementId(1)
            }]
        );
    }

    #[test]
    fn missing_types_are_input_errors() {
        let g = six();
        let t = typing(&["β"]);
        assert!(matches!(
            verify(&g, &t, VerifyMode::Literal),
            Err(Error::MissingType(_))
        ));
    }

    #[test]
    fn same_type_pairs_are_equivalent() {
        let g = six();
        let clone = compute_clone(&g, 1000).unwrap();
        let varpi = leibniz(&clone).unwrap();
        assert_eq!(
            same_type_equivalence_violation(&g, &reference_six_typing(), &clone, &varpi),
            None
        );
        let void = Pargoid::new(["x", "y"]).unwrap();
        let clone = compute_clone(&void, 1000).unwrap();
        let varpi = leibniz(&clone).unwrap();
        assert_eq!(
            same_type_equivalence_violation(&void, &typing(&["g0", "g0"]), &clone, &varpi),
            None
        );
        // Forcing a and c into one type conflicts with ϖ.
        let g = six();
        let clone = compute_clone(&g, 1000).unwrap();
        let varpi = leibniz(&clone).unwrap();
        let t = typing(&["β -> γ", "β", "β -> γ", "δ -> δ", "γ", "δ"]);
        let v = same_type_equivalence_violation(&g, &t, &clone, &varpi).unwrap();
        assert_eq!((v.a, v.b), (ElementId(0), ElementId(2)));
    }

    #[test]
    fn isomorphism() {
        let a = typing(&["g0", "g0"]);
        let b = typing(&["g0", "g1"]);
        assert!(!typing_isomorphic(&a, &b));
        assert!(!typing_isomorphic(&b, &a));
        assert!(typing_isomorphic(&a, &a));
        let x = typing(&["p -> q", "p", "q"]);
        let y = typing(&["s -> r", "s", "r"]);
        let z = typing(&["s -> s", "s", "s"]);
        assert!(typing_isomorphic(&x, &y));
        assert!(!typing_isomorphic(&x, &z));
        assert!(!typing_isomorphic(&typing(&["p -> q"]), &typing(&["p"])));
    }
}
