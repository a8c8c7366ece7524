//! Text and JSON renderings of results. Every JSON document carries
//! `"schema": 1`; the matching JSON Schemas live in `schemas/`.

use std::fmt::Write as _;

use pargoid_core::generators::{gen_arbitrary, gen_typed};
use pargoid_core::typability::{analyze, NaiveClaimReport};
use pargoid_core::verifier::verify;
use pargoid_core::{
    Certificate, CloneResult, ConstantReading, Decision, ElementId, GenConfig, GenMode, Pargoid,
    Partition, Typing, VerifyMode, VerifyReport,
};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

/// Puts `"schema"` first in an object.
pub fn with_schema(v: Value) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), SCHEMA_VERSION.into());
    if let Value::Object(rest) = v {
        m.extend(rest);
    }
    Value::Object(m)
}

fn names(g: &Pargoid, es: &[ElementId]) -> Vec<String> {
    es.iter().map(|&e| g.name(e).to_string()).collect()
}

pub fn typing_text(g: &Pargoid, t: &Typing) -> String {
    g.elements()
        .map(|e| format!("{}: {}\n", g.name(e), t.type_of(e)))
        .collect()
}

/// A cycle reads left to right as `x < y < … < x`.
fn cycle_text(g: &Pargoid, path: &[ElementId]) -> String {
    let mut ns = names(g, path);
    ns.reverse();
    ns.join(" < ")
}

fn domain_names(g: &Pargoid, graph: &[Option<ElementId>]) -> Vec<String> {
    g.elements()
        .filter(|e| graph[e.index()].is_some())
        .map(|e| g.name(e).to_string())
        .collect()
}

pub fn certificate_text(g: &Pargoid, c: &Certificate) -> String {
    match c {
        Certificate::Cycle { path } => format!("cycle: {}\n", cycle_text(g, path)),
        Certificate::DefiniteViolation {
            op,
            a,
            c,
            separator,
        } => {
            let converges = |e: ElementId| separator.graph[e.index()].is_some();
            let (on, off) = if converges(*a) { (*a, *c) } else { (*c, *a) };
            format!(
                "definite operation: {}\nconverges on: {} {}\nseparator: {}\nseparator converges on {} but not on {}\n",
                op.witness.display(g),
                g.name(*a),
                g.name(*c),
                separator.witness.display(g),
                g.name(on),
                g.name(off),
            )
        }
    }
}

pub fn certificate_json(g: &Pargoid, c: &Certificate) -> Value {
    match c {
        Certificate::Cycle { path } => json!({
            "kind": c.kind(),
            "path": names(g, path),
        }),
        Certificate::DefiniteViolation {
            op,
            a,
            c: c2,
            separator,
        } => json!({
            "kind": c.kind(),
            "op": {
                "witness": op.witness.display(g).to_string(),
                "domain": domain_names(g, &op.graph),
            },
            "pair": [g.name(*a), g.name(*c2)],
            "separator": {
                "witness": separator.witness.display(g).to_string(),
                "domain": domain_names(g, &separator.graph),
            },
        }),
    }
}

fn typing_map(g: &Pargoid, t: &Typing) -> Value {
    t.to_json_value(g)["types"].clone()
}

pub fn decision_json(g: &Pargoid, d: &Decision, reading: ConstantReading) -> Value {
    let mut v = json!({
        "schema": SCHEMA_VERSION,
        "verdict": d.verdict(),
        "constant_reading": reading.as_str(),
    });
    match d {
        Decision::Typable(t) => v["types"] = typing_map(g, t),
        Decision::Untypable(c) => v["certificate"] = certificate_json(g, c),
        Decision::ResourceExhausted { stage, budget } => {
            v["stage"] = stage.as_str().into();
            v["budget"] = (*budget).into();
        }
    }
    v
}

fn mode_str(m: VerifyMode) -> &'static str {
    match m {
        VerifyMode::Literal => "literal",
        VerifyMode::Strong => "strong",
    }
}

pub fn verify_text(g: &Pargoid, t: &Typing, r: &VerifyReport) -> String {
    let mut out = String::new();
    let verdict = if r.accepted() { "accepted" } else { "rejected" };
    let _ = writeln!(out, "{verdict} ({} mode)", mode_str(r.mode));
    for f in &r.failures {
        let _ = writeln!(out, "  {}", f.describe(g, t));
    }
    out
}

pub fn verify_json(g: &Pargoid, t: &Typing, r: &VerifyReport) -> Value {
    json!({
        "schema": SCHEMA_VERSION,
        "mode": mode_str(r.mode),
        "accepted": r.accepted(),
        "checks": {
            "partition": r.partition_ok,
            "strictness": r.strictness_ok,
            "injectivity": r.injectivity_ok,
            "axiom1_forward": r.axiom1_forward_ok,
            "axiom1_totality": r.axiom1_totality_ok,
        },
        "failures": r.failures.iter().map(|f| f.describe(g, t)).collect::<Vec<_>>(),
    })
}

pub fn clone_json(g: &Pargoid, clone: &CloneResult) -> Value {
    let ops: Vec<Value> = clone
        .ops()
        .map(|op| {
            let graph: Vec<Value> = g
                .elements()
                .map(|e| clone.value(op, e).map_or(Value::Null, |v| g.name(v).into()))
                .collect();
            json!({
                "index": op.0,
                "witness": clone.witness_string(op),
                "graph": graph,
                "trivial": clone.is_trivial(op),
                "constant": clone.is_constant(op),
                "definite": clone.is_definite(op),
            })
        })
        .collect();
    json!({
        "schema": SCHEMA_VERSION,
        "elements": g.names(),
        "constant_reading": clone.reading().map(ConstantReading::as_str),
        "ops": ops,
    })
}

pub fn partition_json(g: &Pargoid, p: &Partition) -> Value {
    let blocks: Vec<Vec<String>> = p.blocks().iter().map(|b| names(g, b)).collect();
    json!({ "schema": SCHEMA_VERSION, "blocks": blocks })
}

pub fn claim_text(
    g: &Pargoid,
    clone: &CloneResult,
    r: &NaiveClaimReport,
    verdict: &Decision,
) -> String {
    let mut out = String::new();
    let holds = |b: bool| if b { "holds" } else { "fails" };
    let _ = writeln!(out, "claim (*): {}", holds(r.holds()));
    match r.equivalence_if_violation {
        None => out.push_str("  equivalence, if: holds\n"),
        Some((op, a, c)) => {
            let _ = writeln!(
                out,
                "  equivalence, if: fails: {} converges on {} and {}, which are not equivalent",
                clone.witness_string(op),
                g.name(a),
                g.name(c)
            );
        }
    }
    match r.equivalence_only_if_violation {
        None => out.push_str("  equivalence, only if: holds\n"),
        Some((a, c)) => {
            let _ = writeln!(
                out,
                "  equivalence, only if: fails: {} and {} are equivalent but no nontrivial operation converges on both",
                g.name(a),
                g.name(c)
            );
        }
    }
    match r.divergence_violation {
        None => out.push_str("  divergence: holds\n"),
        Some(a) => {
            let _ = writeln!(
                out,
                "  divergence: fails: {} never diverges under repeated application",
                g.name(a)
            );
        }
    }
    let _ = writeln!(out, "verdict: {}", verdict.verdict());
    out
}

pub fn claim_json(
    g: &Pargoid,
    clone: &CloneResult,
    r: &NaiveClaimReport,
    verdict: &Decision,
) -> Value {
    let if_part = match r.equivalence_if_violation {
        None => json!({ "holds": true }),
        Some((op, a, c)) => json!({
            "holds": false,
            "op": clone.witness_string(op),
            "pair": [g.name(a), g.name(c)],
        }),
    };
    let only_if = match r.equivalence_only_if_violation {
        None => json!({ "holds": true }),
        Some((a, c)) => json!({ "holds": false, "pair": [g.name(a), g.name(c)] }),
    };
    let divergence = match r.divergence_violation {
        None => json!({ "holds": true }),
        Some(a) => json!({ "holds": false, "element": g.name(a) }),
    };
    json!({
        "schema": SCHEMA_VERSION,
        "claim_holds": r.holds(),
        "equivalence_if": if_part,
        "equivalence_only_if": only_if,
        "divergence": divergence,
        "verdict": verdict.verdict(),
    })
}

pub struct StatsRow {
    pub seed: u64,
    pub n: usize,
    pub density: f64,
    pub verdict: &'static str,
    pub certificate_kind: Option<&'static str>,
    /// Absent when a cycle settled the verdict without a clone.
    pub clone_size: Option<usize>,
    pub varpi_classes: Option<usize>,
    /// Whether the constructed typing also passes the strong check.
    pub strong_1_holds: Option<bool>,
}

pub fn stats_row(
    cfg: &GenConfig,
    budget: usize,
    reading: ConstantReading,
) -> pargoid_core::Result<StatsRow> {
    let g = match cfg.mode {
        GenMode::Arbitrary => gen_arbitrary(cfg)?,
        _ => gen_typed(cfg)?.0,
    };
    let a = analyze(&g, budget, reading)?;
    let (certificate_kind, strong_1_holds) = match &a.decision {
        Decision::Untypable(c) => (Some(c.kind()), None),
        Decision::Typable(t) => (None, Some(verify(&g, t, VerifyMode::Strong)?.accepted())),
        Decision::ResourceExhausted { .. } => (None, None),
    };
    Ok(StatsRow {
        seed: cfg.seed,
        n: g.size(),
        density: cfg.density,
        verdict: a.decision.verdict(),
        certificate_kind,
        clone_size: a.clone.as_ref().map(CloneResult::len),
        varpi_classes: a.varpi.as_ref().map(Partition::len),
        strong_1_holds,
    })
}

fn cell<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn stats_csv(rows: &[StatsRow]) -> String {
    let mut out = String::from(
        "seed,n,density,verdict,certificate_kind,clone_size,varpi_classes,strong_1_holds\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.seed,
            r.n,
            r.density,
            r.verdict,
            cell(r.certificate_kind),
            cell(r.clone_size),
            cell(r.varpi_classes),
            cell(r.strong_1_holds),
        );
    }
    out
}

pub fn stats_summary(rows: &[StatsRow]) -> String {
    let count = |v: &str| rows.iter().filter(|r| r.verdict == v).count();
    let typable = count("typable");
    let strong = rows
        .iter()
        .filter(|r| r.strong_1_holds == Some(true))
        .count();
    format!(
        "{} instances: {} typable, {} untypable, {} exhausted; strong check passes on {}/{} typable\n",
        rows.len(),
        typable,
        count("untypable"),
        count("resource_exhausted"),
        strong,
        typable
    )
}
