//! Deterministic pseudo-random pargoids.
//!
//! All randomness comes from `ChaCha8Rng` seeded with the config's seed:
//! stream 0 drives product tables, stream 1 drives type sampling and the
//! element-to-type assignment. Identical configs give identical output on
//! every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pargoid::{ElementId, Pargoid};
use crate::types::{TypeTerm, Typing};

const TABLE_STREAM: u64 = 0;
const TYPE_STREAM: u64 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum GenMode {
    /// Every product defined independently with probability `density`.
    Arbitrary,
    /// Typed from a sampled typing; every type-matching product defined.
    TypedStrong,
    /// Typed; each type-matching product defined with probability `density`.
    TypedLiteral,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GenConfig {
    pub size: usize,
    pub density: f64,
    pub seed: u64,
    pub mode: GenMode,
    /// Maximum arrow nesting depth of sampled types.
    pub type_depth: usize,
    pub ground_count: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            size: 5,
            density: 0.3,
            seed: 0,
            mode: GenMode::Arbitrary,
            type_depth: 2,
            ground_count: 2,
        }
    }
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn element_names(size: usize) -> Vec<String> {
    (0..size).map(|i| format!("e{i}")).collect()
}

fn check_common(cfg: &GenConfig) -> Result<()> {
    if cfg.size == 0 {
        return Err(Error::InvalidConfig("size must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.density) {
        return Err(Error::InvalidConfig(format!(
            "density {} is outside [0, 1]",
            cfg.density
        )));
    }
    Ok(())
}

pub fn gen_arbitrary(cfg: &GenConfig) -> Result<Pargoid> {
    if cfg.mode != GenMode::Arbitrary {
        return Err(Error::InvalidConfig(
            "gen_arbitrary needs arbitrary mode".into(),
        ));
    }
    check_common(cfg)?;
    let mut g = Pargoid::new(element_names(cfg.size))?;
    let mut rng = rng(cfg.seed, TABLE_STREAM);
    let n = cfg.size;
    for a in 0..n {
        for b in 0..n {
            if rng.random_bool(cfg.density) {
                let v = rng.random_range(0..n);
                g.set_product(a.into(), b.into(), v.into())?;
            }
        }
    }
    Ok(g)
}

/// Samples a strict set of types, a type for every element (each sampled
/// type inhabited), and a product table consistent with the typing.
pub fn gen_typed(cfg: &GenConfig) -> Result<(Pargoid, Typing)> {
    let strong = match cfg.mode {
        GenMode::TypedStrong => true,
        GenMode::TypedLiteral => false,
        GenMode::Arbitrary => {
            return Err(Error::InvalidConfig("gen_typed needs a typed mode".into()))
        }
    };
    check_common(cfg)?;
    if cfg.ground_count == 0 {
        return Err(Error::InvalidConfig(
            "ground_count must be at least 1".into(),
        ));
    }
    if cfg.ground_count > cfg.size {
        return Err(Error::InvalidConfig(format!(
            "{} ground types cannot all be inhabited by {} elements",
            cfg.ground_count, cfg.size
        )));
    }

    let mut trng = rng(cfg.seed, TYPE_STREAM);
    let mut types: Vec<TypeTerm> = (0..cfg.ground_count)
        .map(|i| TypeTerm::ground(format!("t{i}")))
        .collect();
    let target = if cfg.type_depth == 0 {
        cfg.ground_count
    } else {
        trng.random_range(cfg.ground_count..=cfg.size)
    };
    // Arrows are built from types already in the set, so it stays strict.
    let mut attempts = 64 * cfg.size;
    while types.len() < target && attempts > 0 {
        attempts -= 1;
        let from = &types[trng.random_range(0..types.len())];
        let to = &types[trng.random_range(0..types.len())];
        if from.depth().max(to.depth()) + 1 > cfg.type_depth {
            continue;
        }
        let t = TypeTerm::arrow(from.clone(), to.clone());
        if !types.contains(&t) {
            types.push(t);
        }
    }

    let mut slots: Vec<usize> = (0..types.len()).collect();
    slots.extend((types.len()..cfg.size).map(|_| trng.random_range(0..types.len())));
    slots.shuffle(&mut trng);
    let assignment: Vec<TypeTerm> = slots.iter().map(|&s| types[s].clone()).collect();

    let mut members: Vec<Vec<ElementId>> = vec![Vec::new(); types.len()];
    for (e, &s) in slots.iter().enumerate() {
        members[s].push(ElementId::from(e));
    }
    let index_of = |t: &TypeTerm| types.iter().position(|u| u == t);

    let mut g = Pargoid::new(element_names(cfg.size))?;
    let mut prng = rng(cfg.seed, TABLE_STREAM);
    for (a, ta) in assignment.iter().enumerate() {
        let Some((from, to)) = ta.as_arrow() else {
            continue;
        };
        let to_members = &members[index_of(to).expect("sampled types are strict")];
        for (b, tb) in assignment.iter().enumerate() {
            if tb != from {
                continue;
            }
            if strong || prng.random_bool(cfg.density) {
                let v = to_members[prng.random_range(0..to_members.len())];
                g.set_product(a.into(), b.into(), v)?;
            }
        }
    }
    Ok((g, Typing::new(assignment)))
}
