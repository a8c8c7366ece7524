//! The Leibniz congruence ϖ and congruence checks.
//!
//! `a ≡ b (ϖ)` iff every unary polynomial operation converges on both or on
//! neither. ϖ is computed by refining the one-block partition by the domain
//! of each operation of a closed clone.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::pargoid::{ElementId, Pargoid};
use crate::polyclone::{CloneResult, OpIndex};

/// An equivalence relation on the carrier, as canonically ordered blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<ElementId>>,
    class_of: Vec<usize>,
}

impl Partition {
    /// Builds a partition from one key per element: equal keys, same block.
    pub fn from_keys<K: Eq + std::hash::Hash>(keys: impl IntoIterator<Item = K>) -> Self {
        let mut first_seen: HashMap<K, usize> = HashMap::new();
        let mut blocks: Vec<Vec<ElementId>> = Vec::new();
        let mut class_of = Vec::new();
        for (i, key) in keys.into_iter().enumerate() {
            let next = blocks.len();
            let b = *first_seen.entry(key).or_insert(next);
            if b == next {
                blocks.push(Vec::new());
            }
            blocks[b].push(ElementId::from(i));
            class_of.push(b);
        }
        // Blocks are created in order of their smallest member, and members
        // are pushed in index order, so the result is already canonical.
        Partition { blocks, class_of }
    }

    /// Builds a partition from explicit blocks; they must be disjoint and
    /// cover `0..size`.
    pub fn from_blocks(size: usize, blocks: Vec<Vec<ElementId>>) -> Result<Self> {
        let mut owner = vec![usize::MAX; size];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidConfig("empty block".into()));
            }
            for e in block {
                if e.index() >= size {
                    return Err(Error::ElementOutOfRange {
                        index: e.index(),
                        size,
                    });
                }
                if owner[e.index()] != usize::MAX {
                    return Err(Error::InvalidConfig(format!("element {e} in two blocks")));
                }
                owner[e.index()] = b;
            }
        }
        if let Some(i) = owner.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidConfig(format!(
                "element {} is in no block",
                ElementId::from(i)
            )));
        }
        Ok(Partition::from_keys(owner))
    }

    pub fn discrete(size: usize) -> Self {
        Partition::from_keys(0..size)
    }

    pub fn blocks(&self) -> &[Vec<ElementId>] {
        &self.blocks
    }

    pub fn class_of(&self, e: ElementId) -> usize {
        self.class_of[e.index()]
    }

    pub fn block_of(&self, e: ElementId) -> &[ElementId] {
        &self.blocks[self.class_of(e)]
    }

    pub fn equivalent(&self, a: ElementId, b: ElementId) -> bool {
        self.class_of(a) == self.class_of(b)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn is_discrete(&self) -> bool {
        self.blocks.len() == self.class_of.len()
    }

    /// Splits every block by membership in `subset`.
    pub fn refine_by(&self, subset: impl Fn(ElementId) -> bool) -> Self {
        Partition::from_keys(
            (0..self.class_of.len()).map(|i| (self.class_of[i], subset(ElementId::from(i)))),
        )
    }
}

/// ϖ of `g`, from a closed clone.
pub fn leibniz(clone: &CloneResult) -> Result<Partition> {
    if clone.budget_hit() {
        return Err(Error::ResourceExhausted {
            budget: clone.budget(),
        });
    }
    let mut part = Partition::from_keys(std::iter::repeat_n((), clone.carrier_size()));
    for op in clone.ops() {
        if part.is_discrete() {
            break;
        }
        part = part.refine_by(|e| clone.converges(op, e));
    }
    Ok(part)
}

/// A witness that a partition does not respect the product:
/// `a ≡ b`, `c ≡ d`, `ac` and `bd` defined, yet `ac ≢ bd`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct CongruenceViolation {
    pub a: ElementId,
    pub b: ElementId,
    pub c: ElementId,
    pub d: ElementId,
}

/// Returns the first violating quadruple in `(a, b, c, d)` index order.
pub fn congruence_violation(g: &Pargoid, part: &Partition) -> Option<CongruenceViolation> {
    for a in g.elements() {
        for &b in part.block_of(a) {
            for c in g.elements() {
                let Some(ac) = g.get(a, c) else { continue };
                for &d in part.block_of(c) {
                    if let Some(bd) = g.get(b, d) {
                        if !part.equivalent(ac, bd) {
                            return Some(CongruenceViolation { a, b, c, d });
                        }
                    }
                }
            }
        }
    }
    None
}

pub fn is_congruence(g: &Pargoid, part: &Partition) -> bool {
    congruence_violation(g, part).is_none()
}

/// The first operation (in clone order) converging on exactly one of `a`
/// and `c`. `None` exactly when `a ≡ c (ϖ)`.
pub fn separator(clone: &CloneResult, a: ElementId, c: ElementId) -> Option<OpIndex> {
    clone
        .ops()
        .find(|&op| clone.converges(op, a) != clone.converges(op, c))
}
