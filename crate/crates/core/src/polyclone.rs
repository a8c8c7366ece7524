//! The unary polynomial clone of a finite pargoid.
//!
//! Every unary polynomial operation is a partial self-map of the carrier. The
//! clone is the least set of such maps containing the identity and every
//! constant, closed under the pointwise product `x ↦ p(x)·q(x)`. It is built
//! level by level on witness-term size, so each operation keeps a witness of
//! minimal size. Witnesses of equal size are ordered `var` first, then
//! constants by element index, then products by (left, right) operation
//! index. Operation indices follow the same order.

use std::fmt;
use std::ops::Range;

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::pargoid::{ElementId, Pargoid, UNDEF};

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpIndex(pub u32);

impl OpIndex {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A polynomial term in the single variable `x`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PolyTerm {
    Var,
    Const(ElementId),
    Prod(Box<PolyTerm>, Box<PolyTerm>),
}

impl PolyTerm {
    pub fn prod(left: PolyTerm, right: PolyTerm) -> Self {
        PolyTerm::Prod(Box::new(left), Box::new(right))
    }

    pub fn size(&self) -> usize {
        match self {
            PolyTerm::Var | PolyTerm::Const(_) => 1,
            PolyTerm::Prod(l, r) => l.size() + r.size() + 1,
        }
    }

    pub fn is_product_free(&self) -> bool {
        !matches!(self, PolyTerm::Prod(..))
    }

    pub fn eval(&self, g: &Pargoid, e: ElementId) -> Option<ElementId> {
        match self {
            PolyTerm::Var => Some(e),
            PolyTerm::Const(c) => Some(*c),
            PolyTerm::Prod(l, r) => g.get(l.eval(g, e)?, r.eval(g, e)?),
        }
    }

    /// Value table of the term over the whole carrier.
    pub fn graph(&self, g: &Pargoid) -> Vec<Option<ElementId>> {
        g.elements().map(|e| self.eval(g, e)).collect()
    }

    /// Prefix syntax, e.g. `(prod (prod var (const b)) (const d))`.
    pub fn display<'a>(&'a self, g: &'a Pargoid) -> impl fmt::Display + 'a {
        TermDisplay { term: self, g }
    }
}

struct TermDisplay<'a> {
    term: &'a PolyTerm,
    g: &'a Pargoid,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            PolyTerm::Var => f.write_str("var"),
            PolyTerm::Const(c) => write!(f, "(const {})", self.g.name(*c)),
            PolyTerm::Prod(l, r) => write!(
                f,
                "(prod {} {})",
                TermDisplay { term: l, g: self.g },
                TermDisplay { term: r, g: self.g }
            ),
        }
    }
}

/// Value of `t` at `e`; `None` means divergence.
pub fn eval_term(g: &Pargoid, t: &PolyTerm, e: ElementId) -> Option<ElementId> {
    t.eval(g, e)
}

/// How "constant operation" is read when classifying.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum ConstantReading {
    /// Only total constant maps are constant. A map that is constant on a
    /// proper subdomain is nonconstant.
    #[default]
    Total,
    /// Any map taking at most one value on its domain is constant,
    /// including the nowhere-defined map.
    OnDomain,
}

impl ConstantReading {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstantReading::Total => "total",
            ConstantReading::OnDomain => "on-domain",
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Witness {
    Var,
    Const(ElementId),
    Prod(OpIndex, OpIndex),
}

#[derive(Clone, Debug)]
struct Flags {
    reading: ConstantReading,
    trivial: Vec<bool>,
    constant: Vec<bool>,
    definite: Vec<bool>,
}

/// A unary polynomial operation with its classification and witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryPolyOp {
    pub index: OpIndex,
    pub graph: Vec<Option<ElementId>>,
    pub is_trivial: bool,
    pub is_constant: bool,
    pub is_definite: bool,
    pub witness: PolyTerm,
}

impl UnaryPolyOp {
    pub fn domain(&self) -> Vec<ElementId> {
        self.graph
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|_| ElementId::from(i)))
            .collect()
    }
}

/// The closed (or budget-truncated) set of unary polynomial operations.
#[derive(Clone)]
pub struct CloneResult {
    n: usize,
    table: Vec<u32>,
    graphs: Vec<u32>,
    lookup: FxHashMap<Box<[u32]>, OpIndex>,
    names: Vec<String>,
    witnesses: Vec<Witness>,
    term_sizes: Vec<u32>,
    identity: OpIndex,
    constants: Vec<OpIndex>,
    budget: usize,
    budget_hit: bool,
    flags: Option<Flags>,
}

impl fmt::Debug for CloneResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CloneResult")
            .field("ops", &self.len())
            .field("budget_hit", &self.budget_hit)
            .finish()
    }
}

fn product_into(table: &[u32], n: usize, p: &[u32], q: &[u32], out: &mut [u32]) {
    for ((o, &a), &b) in out.iter_mut().zip(p).zip(q) {
        *o = if a == UNDEF || b == UNDEF {
            UNDEF
        } else {
            table[a as usize * n + b as usize]
        };
    }
}

/// Computes the unary polynomial clone of `g`, stopping once more than
/// `budget` operations would be needed.
pub fn compute_clone(g: &Pargoid, budget: usize) -> Result<CloneResult> {
    let n = g.size();
    if budget < n + 1 {
        return Err(Error::InvalidConfig(format!(
            "budget {budget} is below the {} generator operations",
            n + 1
        )));
    }
    let mut clone = CloneResult {
        n,
        table: g.raw_table().to_vec(),
        graphs: Vec::new(),
        lookup: FxHashMap::default(),
        names: g.names().to_vec(),
        witnesses: Vec::new(),
        term_sizes: Vec::new(),
        identity: OpIndex(0),
        constants: vec![OpIndex(0); n],
        budget,
        budget_hit: false,
        flags: None,
    };

    // Size-1 level: the identity, then constants in element order. On a
    // one-element carrier the identity is also the only constant.
    let identity: Vec<u32> = (0..n as u32).collect();
    clone.identity = clone.push(identity.into_boxed_slice(), Witness::Var, 1);
    for c in g.elements() {
        let graph = vec![c.0; n];
        clone.constants[c.index()] = match clone.lookup.get(graph.as_slice()) {
            Some(&idx) => idx,
            None => clone.push(graph.into_boxed_slice(), Witness::Const(c), 1),
        };
    }

    // levels[k] holds the operations whose smallest witness has size 2k+1.
    let mut levels: Vec<Range<usize>> = Vec::new();
    levels.push(0..clone.len());
    let mut max_level = 0;
    let mut buf = vec![0u32; n];
    let mut level = 1;
    'levels: while level <= 2 * max_level + 1 {
        // Pairs are visited in increasing (left, right) index order, so the
        // first pair reaching a new graph is its smallest witness and new
        // operations can be appended as they are found.
        let start = clone.len();
        let size = 2 * level as u32 + 1;
        for left in 0..level {
            let right = level - 1 - left;
            let (Some(lr), Some(rr)) = (levels.get(left).cloned(), levels.get(right).cloned())
            else {
                continue;
            };
            for i in lr {
                for j in rr.clone() {
                    product_into(&clone.table, n, clone.graph(i), clone.graph(j), &mut buf);
                    if clone.lookup.contains_key(buf.as_slice()) {
                        continue;
                    }
                    if clone.len() >= budget {
                        clone.budget_hit = true;
                        break 'levels;
                    }
                    let witness = Witness::Prod(OpIndex(i as u32), OpIndex(j as u32));
                    clone.push(buf.clone().into_boxed_slice(), witness, size);
                }
            }
        }
        if clone.len() > start {
            max_level = level;
        }
        levels.push(start..clone.len());
        level += 1;
    }
    Ok(clone)
}

/// Like [`compute_clone`], but a budget overrun is an error.
pub fn compute_clone_exact(g: &Pargoid, budget: usize) -> Result<CloneResult> {
    let clone = compute_clone(g, budget)?;
    if clone.budget_hit {
        return Err(Error::ResourceExhausted { budget });
    }
    Ok(clone)
}

impl CloneResult {
    fn push(&mut self, graph: Box<[u32]>, witness: Witness, size: u32) -> OpIndex {
        let idx = OpIndex(self.witnesses.len() as u32);
        self.graphs.extend_from_slice(&graph);
        self.lookup.insert(graph, idx);
        self.witnesses.push(witness);
        self.term_sizes.push(size);
        idx
    }

    pub fn len(&self) -> usize {
        self.witnesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.witnesses.is_empty()
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Whether the cap was reached before the clone closed.
    pub fn budget_hit(&self) -> bool {
        self.budget_hit
    }

    pub fn ops(&self) -> impl ExactSizeIterator<Item = OpIndex> {
        (0..self.len() as u32).map(OpIndex)
    }

    pub fn identity(&self) -> OpIndex {
        self.identity
    }

    pub fn constant(&self, c: ElementId) -> OpIndex {
        self.constants[c.index()]
    }

    pub(crate) fn graph(&self, i: usize) -> &[u32] {
        &self.graphs[i * self.n..(i + 1) * self.n]
    }

    pub fn value(&self, op: OpIndex, e: ElementId) -> Option<ElementId> {
        match self.graph(op.index())[e.index()] {
            UNDEF => None,
            v => Some(ElementId(v)),
        }
    }

    pub fn converges(&self, op: OpIndex, e: ElementId) -> bool {
        self.graph(op.index())[e.index()] != UNDEF
    }

    pub fn domain(&self, op: OpIndex) -> Vec<ElementId> {
        self.graph(op.index())
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != UNDEF)
            .map(|(i, _)| ElementId::from(i))
            .collect()
    }

    pub fn graph_of(&self, op: OpIndex) -> Vec<Option<ElementId>> {
        self.graph(op.index())
            .iter()
            .map(|&v| (v != UNDEF).then_some(ElementId(v)))
            .collect()
    }

    /// Finds the operation with the given value table.
    pub fn find(&self, graph: &[Option<ElementId>]) -> Option<OpIndex> {
        let raw: Vec<u32> = graph.iter().map(|v| v.map_or(UNDEF, |e| e.0)).collect();
        self.lookup.get(raw.as_slice()).copied()
    }

    /// Index of the pointwise product `p·q`. Always present in a closed clone.
    pub fn product(&self, p: OpIndex, q: OpIndex) -> Option<OpIndex> {
        let mut buf = vec![0u32; self.n];
        self.product_with(p, q, &mut buf)
    }

    fn product_with(&self, p: OpIndex, q: OpIndex, buf: &mut [u32]) -> Option<OpIndex> {
        product_into(
            &self.table,
            self.n,
            self.graph(p.index()),
            self.graph(q.index()),
            buf,
        );
        self.lookup.get(&*buf).copied()
    }

    /// Size of the operation's witness term.
    pub fn witness_size(&self, op: OpIndex) -> usize {
        self.term_sizes[op.index()] as usize
    }

    /// Prefix serialization of the witness term.
    pub fn witness_string(&self, op: OpIndex) -> String {
        let mut out = String::new();
        self.write_witness(op, &mut out);
        out
    }

    fn write_witness(&self, op: OpIndex, out: &mut String) {
        match self.witnesses[op.index()] {
            Witness::Var => out.push_str("var"),
            Witness::Const(c) => {
                out.push_str("(const ");
                out.push_str(&self.names[c.index()]);
                out.push(')');
            }
            Witness::Prod(l, r) => {
                out.push_str("(prod ");
                self.write_witness(l, out);
                out.push(' ');
                self.write_witness(r, out);
                out.push(')');
            }
        }
    }

    pub fn witness_term(&self, op: OpIndex) -> PolyTerm {
        match self.witnesses[op.index()] {
            Witness::Var => PolyTerm::Var,
            Witness::Const(c) => PolyTerm::Const(c),
            Witness::Prod(l, r) => PolyTerm::prod(self.witness_term(l), self.witness_term(r)),
        }
    }

    /// The recorded factorization `(left, right)` of the witness, if any.
    pub fn witness_factors(&self, op: OpIndex) -> Option<(OpIndex, OpIndex)> {
        match self.witnesses[op.index()] {
            Witness::Prod(l, r) => Some((l, r)),
            _ => None,
        }
    }

    pub fn is_identity_map(&self, op: OpIndex) -> bool {
        self.graph(op.index())
            .iter()
            .enumerate()
            .all(|(i, &v)| v == i as u32)
    }

    pub fn is_total_constant_map(&self, op: OpIndex) -> bool {
        let g = self.graph(op.index());
        g[0] != UNDEF && g.iter().all(|&v| v == g[0])
    }

    fn is_constant_on_domain(&self, op: OpIndex) -> bool {
        let mut values = self.graph(op.index()).iter().filter(|&&v| v != UNDEF);
        match values.next() {
            Some(&first) => values.all(|&v| v == first),
            None => true,
        }
    }

    /// Fills the trivial, constant and definite flags under `reading`,
    /// replacing any earlier classification.
    ///
    /// Definiteness is the least fixpoint over every factorization `r = p·q`
    /// in the closed clone: a nontrivial `r` is definite when `p` is definite
    /// or `q` is nonconstant.
    pub fn classify(&mut self, reading: ConstantReading) -> Result<()> {
        if self.budget_hit {
            return Err(Error::ResourceExhausted {
                budget: self.budget,
            });
        }
        let m = self.len();
        let trivial: Vec<bool> = self
            .ops()
            .map(|op| self.is_identity_map(op) || self.is_total_constant_map(op))
            .collect();
        let constant: Vec<bool> = self
            .ops()
            .map(|op| match reading {
                ConstantReading::Total => self.is_total_constant_map(op),
                ConstantReading::OnDomain => self.is_constant_on_domain(op),
            })
            .collect();

        let mut definite = vec![false; m];
        let mut queue = Vec::new();
        let mut buf = vec![0u32; self.n];
        let mark = |r: OpIndex, definite: &mut Vec<bool>, queue: &mut Vec<OpIndex>| {
            if !trivial[r.index()] && !definite[r.index()] {
                definite[r.index()] = true;
                queue.push(r);
            }
        };
        for q in self.ops().filter(|q| !constant[q.index()]) {
            for p in self.ops() {
                let r = self.closed_product(p, q, &mut buf)?;
                mark(r, &mut definite, &mut queue);
            }
        }
        while let Some(p) = queue.pop() {
            for q in self.ops() {
                let r = self.closed_product(p, q, &mut buf)?;
                mark(r, &mut definite, &mut queue);
            }
        }
        self.flags = Some(Flags {
            reading,
            trivial,
            constant,
            definite,
        });
        Ok(())
    }

    fn closed_product(&self, p: OpIndex, q: OpIndex, buf: &mut [u32]) -> Result<OpIndex> {
        self.product_with(p, q, buf).ok_or_else(|| {
            Error::Internal(format!(
                "clone not closed: product of ops {} and {} is missing",
                p.0, q.0
            ))
        })
    }

    fn flags(&self) -> &Flags {
        self.flags
            .as_ref()
            .expect("clone must be classified before querying flags")
    }

    pub fn is_classified(&self) -> bool {
        self.flags.is_some()
    }

    pub fn reading(&self) -> Option<ConstantReading> {
        self.flags.as_ref().map(|f| f.reading)
    }

    /// Panics if the clone has not been classified.
    pub fn is_trivial(&self, op: OpIndex) -> bool {
        self.flags().trivial[op.index()]
    }

    /// Panics if the clone has not been classified.
    pub fn is_constant(&self, op: OpIndex) -> bool {
        self.flags().constant[op.index()]
    }

    /// Panics if the clone has not been classified.
    pub fn is_definite(&self, op: OpIndex) -> bool {
        self.flags().definite[op.index()]
    }

    /// Owned view of one operation. Panics if the clone is unclassified.
    pub fn op(&self, op: OpIndex) -> UnaryPolyOp {
        UnaryPolyOp {
            index: op,
            graph: self.graph_of(op),
            is_trivial: self.is_trivial(op),
            is_constant: self.is_constant(op),
            is_definite: self.is_definite(op),
            witness: self.witness_term(op),
        }
    }

    /// Checks that every nonconstant, indefinite operation other than the
    /// identity has the shape `x b1 … bn`, i.e. equals `q·(const b)` for some
    /// nonconstant, indefinite `q` and element `b`. Returns the first
    /// operation without such a factorization.
    pub fn indefinite_shape_violation(&self) -> Option<OpIndex> {
        let flags = self.flags();
        let candidate = |op: OpIndex| !flags.constant[op.index()] && !flags.definite[op.index()];
        let mut explained = vec![false; self.len()];
        explained[self.identity.index()] = true;
        let mut buf = vec![0u32; self.n];
        for q in self.ops().filter(|&q| candidate(q)) {
            for &c in &self.constants {
                if let Some(r) = self.product_with(q, c, &mut buf) {
                    explained[r.index()] = true;
                }
            }
        }
        self.ops()
            .find(|&op| candidate(op) && !explained[op.index()])
    }
}
