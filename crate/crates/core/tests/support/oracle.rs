//! Independent reference implementations used to check the library.
//!
//! Everything here is deliberately naive: direct fixpoint iteration over
//! plain vectors, no sharing of code or data structures with the crate
//! beyond the raw product table.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use pargoid_core::{ConstantReading, ElementId, Pargoid, PolyTerm};
use rand::Rng;

pub type Graph = Vec<Option<u32>>;

/// The product table as a dense matrix, read only through `products()`.
pub fn table(g: &Pargoid) -> Vec<Vec<Option<u32>>> {
    let n = g.size();
    let mut t = vec![vec![None; n]; n];
    for (a, b, c) in g.products() {
        t[a.index()][b.index()] = Some(c.0);
    }
    t
}

fn mul(t: &[Vec<Option<u32>>], p: &Graph, q: &Graph) -> Graph {
    p.iter()
        .zip(q)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => t[*x as usize][*y as usize],
            _ => None,
        })
        .collect()
}

pub fn identity(n: usize) -> Graph {
    (0..n as u32).map(Some).collect()
}

pub fn constant(n: usize, c: u32) -> Graph {
    vec![Some(c); n]
}

/// The unary clone by repeated all-pairs products until nothing new
/// appears. `None` if it grows past `limit` graphs.
pub fn naive_clone(g: &Pargoid, limit: usize) -> Option<BTreeSet<Graph>> {
    let n = g.size();
    let t = table(g);
    let mut set: BTreeSet<Graph> = BTreeSet::new();
    set.insert(identity(n));
    for c in 0..n as u32 {
        set.insert(constant(n, c));
    }
    loop {
        let cur: Vec<Graph> = set.iter().cloned().collect();
        let before = set.len();
        for p in &cur {
            for q in &cur {
                set.insert(mul(&t, p, q));
                if set.len() > limit {
                    return None;
                }
            }
        }
        if set.len() == before {
            return Some(set);
        }
    }
}

pub fn is_trivial(g: &Graph) -> bool {
    let n = g.len();
    *g == identity(n) || (0..n as u32).any(|c| *g == constant(n, c))
}

pub fn is_constant(g: &Graph, reading: ConstantReading) -> bool {
    let n = g.len();
    match reading {
        ConstantReading::Total => (0..n as u32).any(|c| *g == constant(n, c)),
        ConstantReading::OnDomain => {
            let vals: BTreeSet<u32> = g.iter().flatten().copied().collect();
            vals.len() <= 1
        }
    }
}

/// Definite graphs by Jacobi iteration from the empty set: each round
/// recomputes membership for every graph from the previous round's set.
pub fn naive_definite(
    g: &Pargoid,
    clone: &BTreeSet<Graph>,
    reading: ConstantReading,
) -> BTreeSet<Graph> {
    let t = table(g);
    let ops: Vec<&Graph> = clone.iter().collect();
    let mut factorizations: BTreeMap<Graph, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, p) in ops.iter().enumerate() {
        for (j, q) in ops.iter().enumerate() {
            factorizations
                .entry(mul(&t, p, q))
                .or_default()
                .push((i, j));
        }
    }
    let mut definite: BTreeSet<Graph> = BTreeSet::new();
    loop {
        let next: BTreeSet<Graph> = ops
            .iter()
            .filter(|r| !is_trivial(r))
            .filter(|r| {
                factorizations.get(**r).is_some_and(|fs| {
                    fs.iter()
                        .any(|&(i, j)| definite.contains(ops[i]) || !is_constant(ops[j], reading))
                })
            })
            .map(|r| (*r).clone())
            .collect();
        if next == definite {
            return definite;
        }
        definite = next;
    }
}

/// The coarsest partition whose classes agree on row and column
/// definedness and are preserved by multiplying on either side, computed by
/// signature refinement without any clone. Returns class ids per element.
pub fn bisimulation_classes(g: &Pargoid) -> Vec<usize> {
    let n = g.size();
    let t = table(g);
    let mut class = vec![0usize; n];
    loop {
        let mut ids: HashMap<Vec<Option<usize>>, usize> = HashMap::new();
        let mut next = vec![0; n];
        for a in 0..n {
            let mut sig = vec![Some(class[a])];
            for (ac, row) in t[a].iter().zip(&t) {
                sig.push(ac.map(|v| class[v as usize]));
                sig.push(row[a].map(|v| class[v as usize]));
            }
            let k = ids.len();
            next[a] = *ids.entry(sig).or_insert(k);
        }
        let count = |v: &[usize]| v.iter().collect::<BTreeSet<_>>().len();
        if count(&next) == count(&class) {
            return next;
        }
        class = next;
    }
}

/// The relation `b < a`, straight from its definition.
pub fn below(g: &Pargoid, b: usize, a: usize) -> bool {
    let t = table(g);
    t[a][b].is_some() || (0..g.size()).any(|c| t[a][c] == Some(b as u32))
}

/// Acyclicity of the relation by repeatedly deleting minimal elements.
pub fn acyclic(g: &Pargoid) -> bool {
    let n = g.size();
    let rel: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| below(g, b, a)).collect())
        .collect();
    let mut alive = vec![true; n];
    loop {
        let minimal: Vec<usize> = (0..n)
            .filter(|&a| alive[a] && !(0..n).any(|b| alive[b] && rel[a][b]))
            .collect();
        if minimal.is_empty() {
            return !alive.iter().any(|&x| x);
        }
        for a in minimal {
            alive[a] = false;
        }
    }
}

/// Every `a` applies only to pairwise equivalent arguments. Necessary for
/// typability (the map `x ↦ ax` is definite once the relation is acyclic)
/// but not sufficient.
pub fn rows_coherent(g: &Pargoid) -> bool {
    let class = bisimulation_classes(g);
    let t = table(g);
    (0..g.size()).all(|a| {
        let cls: BTreeSet<usize> = (0..g.size())
            .filter(|&b| t[a][b].is_some())
            .map(|b| class[b])
            .collect();
        cls.len() <= 1
    })
}

/// Typability recomputed from scratch: acyclicity, then every naive
/// definite graph has its domain inside one bisimulation class. `None` when
/// the naive clone exceeds `limit`.
pub fn typable_by_conditions(g: &Pargoid, reading: ConstantReading, limit: usize) -> Option<bool> {
    if !acyclic(g) {
        return Some(false);
    }
    let clone = naive_clone(g, limit)?;
    let class = bisimulation_classes(g);
    let definite = naive_definite(g, &clone, reading);
    Some(definite.iter().all(|r| {
        let cls: BTreeSet<usize> = (0..g.size())
            .filter(|&x| r[x].is_some())
            .map(|x| class[x])
            .collect();
        cls.len() <= 1
    }))
}

pub fn graph_of_term(g: &Pargoid, term: &PolyTerm) -> Graph {
    let t = table(g);
    fn ev(t: &[Vec<Option<u32>>], term: &PolyTerm, x: u32) -> Option<u32> {
        match term {
            PolyTerm::Var => Some(x),
            PolyTerm::Const(c) => Some(c.0),
            PolyTerm::Prod(l, r) => t[ev(t, l, x)? as usize][ev(t, r, x)? as usize],
        }
    }
    (0..g.size() as u32).map(|x| ev(&t, term, x)).collect()
}

/// A random term with at most `max_size` nodes, sized uniformly among the
/// attainable odd sizes.
pub fn random_term(rng: &mut impl Rng, n: usize, max_size: usize) -> PolyTerm {
    let sizes: Vec<usize> = (1..=max_size).filter(|s| s % 2 == 1).collect();
    let size = sizes[rng.random_range(0..sizes.len())];
    random_term_of_size(rng, n, size)
}

fn random_term_of_size(rng: &mut impl Rng, n: usize, size: usize) -> PolyTerm {
    if size == 1 {
        let k = rng.random_range(0..=n);
        return if k == n {
            PolyTerm::Var
        } else {
            PolyTerm::Const(ElementId(k as u32))
        };
    }
    let inner = size - 1;
    let left = 2 * rng.random_range(0..inner / 2) + 1;
    PolyTerm::prod(
        random_term_of_size(rng, n, left),
        random_term_of_size(rng, n, inner - left),
    )
}

/// Every term with at most `max_size` nodes.
pub fn all_terms(n: usize, max_size: usize) -> Vec<PolyTerm> {
    let mut by_size: Vec<Vec<PolyTerm>> = vec![Vec::new(); max_size + 1];
    if max_size >= 1 {
        by_size[1].push(PolyTerm::Var);
        by_size[1].extend((0..n as u32).map(|c| PolyTerm::Const(ElementId(c))));
    }
    for s in 2..=max_size {
        let mut level = Vec::new();
        for l in 1..s - 1 {
            let r = s - 1 - l;
            for a in &by_size[l] {
                for b in &by_size[r] {
                    level.push(PolyTerm::prod(a.clone(), b.clone()));
                }
            }
        }
        by_size[s] = level;
    }
    by_size.into_iter().flatten().collect()
}

/// Checks that `path` is a closed walk of the relation, using only the raw
/// table.
pub fn is_cycle(g: &Pargoid, path: &[ElementId]) -> bool {
    path.len() >= 2
        && path.first() == path.last()
        && path
            .windows(2)
            .all(|w| below(g, w[1].index(), w[0].index()))
}

/// [`naive_clone`] with a generous cap, for inputs known to close.
pub fn naive_closure_or_panic(g: &Pargoid) -> BTreeSet<Graph> {
    naive_clone(g, 200_000).expect("clone should close")
}

/// Every nonconstant indefinite graph other than the identity is `q·const b`
/// for a nonconstant indefinite `q`. Returns a graph without that shape.
pub fn indefinite_shape_counterexample(
    g: &Pargoid,
    clone: &BTreeSet<Graph>,
    definite: &BTreeSet<Graph>,
    reading: ConstantReading,
) -> Option<Graph> {
    let n = g.size();
    let t = table(g);
    let candidates: Vec<&Graph> = clone
        .iter()
        .filter(|r| !is_constant(r, reading) && !definite.contains(*r))
        .collect();
    candidates
        .iter()
        .find(|r| {
            ***r != identity(n)
                && !candidates
                    .iter()
                    .any(|q| (0..n as u32).any(|b| mul(&t, q, &constant(n, b)) == ***r))
        })
        .map(|r| (*r).clone())
}
