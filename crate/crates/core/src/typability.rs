//! The typability decision.
//!
//! A finite pargoid is typable iff
//!
//! * every definite polynomial operation converges only on ϖ-equivalent
//!   elements, and
//! * the relation `b <_A a` (`ab` defined, or `b = ac` for some `c`) is
//!   well-founded, which on a finite carrier means acyclic.
//!
//! When both hold, [`construct_typing`] builds a typing: ϖ-classes that
//! contain an element applying to nothing become ground types, and every
//! other element `a` gets `type(b) -> type(ab)` for the smallest `b` with
//! `ab` defined, working upward along `<_A`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, VecDeque};

use crate::congruence::{self, Partition};
use crate::error::{Error, Result};
use crate::pargoid::{ElementId, Pargoid};
use crate::polyclone::{self, CloneResult, ConstantReading, OpIndex, UnaryPolyOp};
use crate::types::{GroundName, TypeTerm, Typing};
use crate::verifier::{self, VerifyMode};

/// Checkable evidence that a pargoid is not typable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certificate {
    /// A definite operation converging on two elements that `separator`
    /// tells apart.
    DefiniteViolation {
        op: UnaryPolyOp,
        a: ElementId,
        c: ElementId,
        separator: UnaryPolyOp,
    },
    /// `path[0] = path[k]` and `path[i+1] <_A path[i]` for each `i`.
    Cycle { path: Vec<ElementId> },
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::DefiniteViolation { .. } => "definite_violation",
            Certificate::Cycle { .. } => "cycle",
        }
    }
}

/// Pipeline stage at which the operation budget ran out.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Stage {
    Clone,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Clone => "clone",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Typable(Typing),
    Untypable(Certificate),
    ResourceExhausted { stage: Stage, budget: usize },
}

impl Decision {
    pub fn verdict(&self) -> &'static str {
        match self {
            Decision::Typable(_) => "typable",
            Decision::Untypable(_) => "untypable",
            Decision::ResourceExhausted { .. } => "resource_exhausted",
        }
    }

    pub fn is_typable(&self) -> bool {
        matches!(self, Decision::Typable(_))
    }
}

/// A decision together with the intermediate results that produced it.
#[derive(Debug)]
pub struct Analysis {
    pub decision: Decision,
    /// `None` when a cycle settled the verdict before the clone was needed.
    /// Classified when it closed within budget.
    pub clone: Option<CloneResult>,
    /// `None` unless the clone closed.
    pub varpi: Option<Partition>,
}

/// The first definite operation whose domain meets two ϖ-classes, with the
/// smallest such pair `(a, c)` in its domain and a separator for them.
pub fn check_definite_coherence(clone: &CloneResult, varpi: &Partition) -> Option<Certificate> {
    for op in clone.ops() {
        if !clone.is_definite(op) {
            continue;
        }
        let domain = clone.domain(op);
        for (i, &a) in domain.iter().enumerate() {
            if let Some(&c) = domain[i + 1..].iter().find(|&&c| !varpi.equivalent(a, c)) {
                let sep = congruence::separator(clone, a, c)
                    .expect("inequivalent elements always have a separator");
                return Some(Certificate::DefiniteViolation {
                    op: clone.op(op),
                    a,
                    c,
                    separator: clone.op(sep),
                });
            }
        }
    }
    None
}

/// Elements in an order where everything below `a` comes before `a`
/// (smallest index first among the ready ones), or `None` if `<_A` has a cycle.
pub fn bottom_up_order(g: &Pargoid) -> Option<Vec<ElementId>> {
    let n = g.size();
    let below: Vec<Vec<ElementId>> = g.elements().map(|a| g.below(a)).collect();
    let mut pending: Vec<usize> = below.iter().map(Vec::len).collect();
    let mut above: Vec<Vec<ElementId>> = vec![Vec::new(); n];
    for a in g.elements() {
        for &b in &below[a.index()] {
            above[b.index()].push(a);
        }
    }
    let mut ready: BinaryHeap<Reverse<ElementId>> = g
        .elements()
        .filter(|a| pending[a.index()] == 0)
        .map(Reverse)
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(b)) = ready.pop() {
        order.push(b);
        for &a in &above[b.index()] {
            pending[a.index()] -= 1;
            if pending[a.index()] == 0 {
                ready.push(Reverse(a));
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// A shortest `<_A`-cycle, if any. Among shortest cycles, the one through
/// the smallest element, starting there.
pub fn check_well_founded(g: &Pargoid) -> Option<Certificate> {
    if bottom_up_order(g).is_some() {
        return None;
    }
    let below: Vec<Vec<ElementId>> = g.elements().map(|a| g.below(a)).collect();
    let mut best: Option<Vec<ElementId>> = None;
    for start in g.elements() {
        let limit = best.as_ref().map_or(usize::MAX, Vec::len);
        if let Some(path) = shortest_cycle_through(&below, start, limit) {
            best = Some(path);
        }
    }
    best.map(|path| Certificate::Cycle { path })
}

/// BFS from `start` back to itself; only returns cycles with fewer than
/// `limit - 1` edges.
fn shortest_cycle_through(
    below: &[Vec<ElementId>],
    start: ElementId,
    limit: usize,
) -> Option<Vec<ElementId>> {
    let mut parent: Vec<Option<ElementId>> = vec![None; below.len()];
    let mut depth = vec![usize::MAX; below.len()];
    let mut queue = VecDeque::new();
    depth[start.index()] = 0;
    queue.push_back(start);
    while let Some(a) = queue.pop_front() {
        // A cycle closing here has depth[a] + 1 edges and as many + 1 nodes.
        if depth[a.index()] + 2 >= limit {
            return None;
        }
        for &b in &below[a.index()] {
            if b == start {
                let mut inner = Vec::new();
                let mut cur = a;
                while cur != start {
                    inner.push(cur);
                    cur = parent[cur.index()].expect("BFS tree reaches the start");
                }
                let mut path = vec![start];
                path.extend(inner.into_iter().rev());
                path.push(start);
                return Some(path);
            }
            if depth[b.index()] == usize::MAX {
                depth[b.index()] = depth[a.index()] + 1;
                parent[b.index()] = Some(a);
                queue.push_back(b);
            }
        }
    }
    None
}

/// Builds the typing from ϖ. Both decision conditions must already hold;
/// a violated precondition surfaces as [`Error::Internal`].
pub fn construct_typing(g: &Pargoid, varpi: &Partition) -> Result<Typing> {
    let mut assignment: Vec<Option<TypeTerm>> = vec![None; g.size()];
    let mut ground_classes = BTreeMap::new();
    for block in varpi.blocks() {
        if block.iter().any(|&a| g.row_is_empty(a)) {
            let name = GroundName::for_class(block[0]);
            for &a in block {
                assignment[a.index()] = Some(TypeTerm::Ground(name.clone()));
            }
            ground_classes.insert(name, block.clone());
        }
    }
    let order = bottom_up_order(g)
        .ok_or_else(|| Error::Internal("construction reached a <_A-cycle".into()))?;
    for a in order {
        if assignment[a.index()].is_some() {
            continue;
        }
        let (b, ab) = g
            .elements()
            .find_map(|b| g.get(a, b).map(|ab| (b, ab)))
            .ok_or_else(|| {
                Error::Internal(format!(
                    "`{}` applies to nothing but lies outside every ground class",
                    g.name(a)
                ))
            })?;
        let typed = |e: ElementId| {
            assignment[e.index()].clone().ok_or_else(|| {
                Error::Internal(format!(
                    "`{}` is untyped when `{}` needs it",
                    g.name(e),
                    g.name(a)
                ))
            })
        };
        let t = TypeTerm::arrow(typed(b)?, typed(ab)?);
        assignment[a.index()] = Some(t);
    }
    let assignment = assignment
        .into_iter()
        .map(|t| t.expect("every element is processed"))
        .collect();
    Ok(Typing::with_ground_classes(assignment, ground_classes))
}

/// Runs the whole pipeline. Well-foundedness needs no clone and is checked
/// first, so cyclic inputs never pay for the clone; acyclic inputs go through
/// the clone, classification, ϖ and the definite-operation condition, then
/// the construction, which must pass the verifier before it is returned.
pub fn analyze(g: &Pargoid, budget: usize, reading: ConstantReading) -> Result<Analysis> {
    if let Some(cycle) = check_well_founded(g) {
        return Ok(Analysis {
            decision: Decision::Untypable(cycle),
            clone: None,
            varpi: None,
        });
    }
    let mut clone = polyclone::compute_clone(g, budget)?;
    if clone.budget_hit() {
        return Ok(Analysis {
            decision: Decision::ResourceExhausted {
                stage: Stage::Clone,
                budget,
            },
            clone: Some(clone),
            varpi: None,
        });
    }
    clone.classify(reading)?;
    let varpi = congruence::leibniz(&clone)?;
    let decision = if let Some(cert) = check_definite_coherence(&clone, &varpi) {
        Decision::Untypable(cert)
    } else {
        let typing = construct_typing(g, &varpi)?;
        let report = verifier::verify(g, &typing, VerifyMode::Literal)?;
        if !report.accepted() {
            return Err(Error::Internal(format!(
                "constructed typing rejected by the verifier: {:?}",
                report.failures
            )));
        }
        Decision::Typable(typing)
    };
    Ok(Analysis {
        decision,
        clone: Some(clone),
        varpi: Some(varpi),
    })
}

/// The classified clone and ϖ regardless of the verdict, for diagnostics.
/// Fails with [`Error::ResourceExhausted`] when the clone does not close.
pub fn clone_and_varpi(
    g: &Pargoid,
    budget: usize,
    reading: ConstantReading,
) -> Result<(CloneResult, Partition)> {
    let mut clone = polyclone::compute_clone_exact(g, budget)?;
    clone.classify(reading)?;
    let varpi = congruence::leibniz(&clone)?;
    Ok((clone, varpi))
}

pub fn decide(g: &Pargoid, budget: usize, reading: ConstantReading) -> Result<Decision> {
    analyze(g, budget, reading).map(|a| a.decision)
}

/// Evaluation of the naive characterization that the decision refines:
/// ϖ-equivalence coincides with co-convergence under some nontrivial
/// operation, and every element diverges after finitely many arguments.
/// Informational only; it never changes a verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaiveClaimReport {
    /// A nontrivial operation converging on two ϖ-inequivalent elements.
    pub equivalence_if_violation: Option<(OpIndex, ElementId, ElementId)>,
    /// ϖ-equivalent elements on which no nontrivial operation converges.
    pub equivalence_only_if_violation: Option<(ElementId, ElementId)>,
    /// An element `a` with `a b0 … bn` defined for every argument sequence.
    pub divergence_violation: Option<ElementId>,
}

impl NaiveClaimReport {
    pub fn equivalence_holds(&self) -> bool {
        self.equivalence_if_violation.is_none() && self.equivalence_only_if_violation.is_none()
    }

    pub fn divergence_holds(&self) -> bool {
        self.divergence_violation.is_none()
    }

    pub fn holds(&self) -> bool {
        self.equivalence_holds() && self.divergence_holds()
    }
}

/// Requires a classified clone.
pub fn check_naive_claim(g: &Pargoid, clone: &CloneResult, varpi: &Partition) -> NaiveClaimReport {
    let n = g.size();
    let mut co_converge = vec![false; n * n];
    let mut if_violation = None;
    for op in clone.ops().filter(|&op| !clone.is_trivial(op)) {
        let domain = clone.domain(op);
        for (i, &a) in domain.iter().enumerate() {
            for &c in &domain[i..] {
                co_converge[a.index() * n + c.index()] = true;
                if if_violation.is_none() && !varpi.equivalent(a, c) {
                    if_violation = Some((op, a, c));
                }
            }
        }
    }
    let pairs = g
        .elements()
        .flat_map(|a| g.elements().filter(move |&c| a < c).map(move |c| (a, c)));
    let only_if_violation = pairs
        .chain(g.elements().map(|a| (a, a)))
        .find(|&(a, c)| varpi.equivalent(a, c) && !co_converge[a.index() * n + c.index()]);

    // Least fixpoint: a diverges eventually iff some ab is undefined or
    // diverges eventually.
    let mut diverges = vec![false; n];
    let mut changed = true;
    while changed {
        changed = false;
        for a in g.elements() {
            if !diverges[a.index()]
                && g.elements()
                    .any(|b| g.get(a, b).is_none_or(|ab| diverges[ab.index()]))
            {
                diverges[a.index()] = true;
                changed = true;
            }
        }
    }
    NaiveClaimReport {
        equivalence_if_violation: if_violation,
        equivalence_only_if_violation: only_if_violation,
        divergence_violation: g.elements().find(|a| !diverges[a.index()]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pargoid::Format;
    use crate::polyclone::compute_clone;
    use crate::verifier::typing_isomorphic;

    fn parse(s: &str) -> Pargoid {
        Pargoid::parse(s.as_bytes(), Format::Text).unwrap()
    }

    fn three() -> Pargoid {
        parse("elements: a b c\na a = a\nb c = c\n")
    }

    fn six() -> Pargoid {
        parse("elements: a b c ab cb d\na b = ab\nc b = cb\nab d = d\n")
    }

    fn names(g: &Pargoid, es: &[ElementId]) -> Vec<String> {
        es.iter().map(|&e| g.name(e).to_string()).collect()
    }

    fn analysis(g: &Pargoid) -> Analysis {
        analyze(g, 10_000, ConstantReading::Total).unwrap()
    }

    fn full(g: &Pargoid) -> (CloneResult, Partition) {
        clone_and_varpi(g, 10_000, ConstantReading::Total).unwrap()
    }

    #[test]
    fn definite_coherence_examples() {
        for g in [three(), six(), Pargoid::new(["x", "y"]).unwrap()] {
            let (clone, varpi) = full(&g);
            assert_eq!(check_definite_coherence(&clone, &varpi), None);
        }
        // The six-element definite domains are all singletons.
        let (clone, _) = full(&six());
        for op in clone.ops().filter(|&op| clone.is_definite(op)) {
            assert!(clone.domain(op).len() <= 1);
        }
    }

    #[test]
    fn definite_violation_certificate() {
        // f·u = v and f·w = v, with u and w told apart by g·x.
        let g = parse("elements: f u v w h\nf u = v\nf w = v\nh u = v\n");
        let a = analysis(&g);
        match &a.decision {
            Decision::Untypable(Certificate::DefiniteViolation {
                op,
                a: x,
                c,
                separator,
            }) => {
                assert!(op.is_definite);
                assert!(op.graph[x.index()].is_some() && op.graph[c.index()].is_some());
                assert_ne!(
                    separator.graph[x.index()].is_some(),
                    separator.graph[c.index()].is_some()
                );
                assert_eq!(names(&g, &[*x, *c]), ["u", "w"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn well_foundedness_examples() {
        let g = three();
        match check_well_founded(&g) {
            Some(Certificate::Cycle { path }) => assert_eq!(names(&g, &path), ["a", "a"]),
            other => panic!("{other:?}"),
        }
        let g = six();
        assert_eq!(check_well_founded(&g), None);
        let order = names(&g, &bottom_up_order(&g).unwrap());
        assert_eq!(order, ["b", "cb", "c", "d", "ab", "a"]);
        assert_eq!(check_well_founded(&Pargoid::new(["x"]).unwrap()), None);
    }

    #[test]
    fn cycle_paths_follow_the_relation() {
        // p·q = r, r·p = s: r <_A p? no; build p <_A q <_A p.
        let g = parse("elements: p q z\nq p = z\np q = z\n");
        match check_well_founded(&g) {
            Some(Certificate::Cycle { path }) => {
                assert_eq!(names(&g, &path), ["p", "q", "p"]);
                for w in path.windows(2) {
                    assert!(g.less_than(w[1], w[0]));
                }
            }
            other => panic!("{other:?}"),
        }
        let g = parse("elements: a b c d\nb c = a\nc d = b\nd a = d\n");
        match check_well_founded(&g) {
            Some(Certificate::Cycle { path }) => {
                assert_eq!(path.first(), path.last());
                for w in path.windows(2) {
                    assert!(g.less_than(w[1], w[0]));
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn six_element_typing() {
        let g = six();
        let a = analysis(&g);
        let typing = match &a.decision {
            Decision::Typable(t) => t.clone(),
            other => panic!("{other:?}"),
        };
        let shown: Vec<String> = g
            .elements()
            .map(|e| format!("{}: {}", g.name(e), typing.type_of(e)))
            .collect();
        assert_eq!(
            shown,
            [
                "a: g1 -> g5 -> g5",
                "b: g1",
                "c: g1 -> g4",
                "ab: g5 -> g5",
                "cb: g4",
                "d: g5"
            ]
        );
        let fixture = Typing::new(
            ["β -> (δ -> δ)", "β", "β -> γ", "δ -> δ", "γ", "δ"]
                .iter()
                .map(|s| TypeTerm::parse(s).unwrap())
                .collect(),
        );
        assert!(typing_isomorphic(&typing, &fixture));
        assert_eq!(typing.ground_classes.len(), 3);
    }

    #[test]
    fn void_and_chain_typings() {
        let g = Pargoid::new(["x", "y"]).unwrap();
        match decide(&g, 1000, ConstantReading::Total).unwrap() {
            Decision::Typable(t) => {
                assert_eq!(t.type_of(ElementId(0)).to_string(), "g0");
                assert_eq!(t.type_of(ElementId(1)).to_string(), "g0");
            }
            other => panic!("{other:?}"),
        }
        let g = parse("elements: f u v\nf u = v\n");
        match decide(&g, 1000, ConstantReading::Total).unwrap() {
            Decision::Typable(t) => {
                let shown: Vec<String> = t.assignment().iter().map(|t| t.to_string()).collect();
                assert_eq!(shown, ["g1 -> g2", "g1", "g2"]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn three_element_is_untypable() {
        let g = three();
        assert!(full(&g).1.is_discrete());
        let a = analysis(&g);
        assert!(a.clone.is_none());
        match a.decision {
            Decision::Untypable(Certificate::Cycle { path }) => {
                assert_eq!(names(&g, &path), ["a", "a"])
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn exhausted_budget() {
        let g = six();
        assert!(matches!(
            clone_and_varpi(&g, 8, ConstantReading::Total),
            Err(Error::ResourceExhausted { budget: 8 })
        ));
        assert_eq!(
            decide(&g, 8, ConstantReading::Total).unwrap(),
            Decision::ResourceExhausted {
                stage: Stage::Clone,
                budget: 8
            }
        );
        // A cycle is still found without the clone.
        let g = three();
        let d = decide(&g, 4, ConstantReading::Total).unwrap();
        assert!(matches!(d, Decision::Untypable(Certificate::Cycle { .. })));
    }

    #[test]
    fn naive_claim_examples() {
        let g = three();
        let (clone, varpi) = full(&g);
        assert!(check_naive_claim(&g, &clone, &varpi).holds());
        assert!(!analysis(&g).decision.is_typable());

        let g = six();
        let (clone, varpi) = full(&g);
        let r = check_naive_claim(&g, &clone, &varpi);
        let (op, x, c) = r.equivalence_if_violation.unwrap();
        assert_eq!(clone.witness_string(op), "(prod var (const b))");
        assert_eq!(names(&g, &[x, c]), ["a", "c"]);
        assert!(analysis(&g).decision.is_typable());

        let g = Pargoid::new(["x", "y"]).unwrap();
        let (clone, varpi) = full(&g);
        let r = check_naive_claim(&g, &clone, &varpi);
        assert_eq!(
            r.equivalence_only_if_violation,
            Some((ElementId(0), ElementId(1)))
        );
        assert!(r.divergence_holds());

        let g = parse("elements: a\na a = a\n");
        let (clone, varpi) = full(&g);
        let r = check_naive_claim(&g, &clone, &varpi);
        assert_eq!(r.divergence_violation, Some(ElementId(0)));
    }

    #[test]
    fn construction_rejects_a_cycle() {
        let g = three();
        let clone = compute_clone(&g, 1000).unwrap();
        let varpi = congruence::leibniz(&clone).unwrap();
        assert!(matches!(
            construct_typing(&g, &varpi),
            Err(Error::Internal(_))
        ));
    }
}
