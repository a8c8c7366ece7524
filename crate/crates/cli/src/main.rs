//! `pargoid`: decide typability of finite partial groupoids.
//!
//! Results go to stdout, diagnostics to stderr. Exit codes: 0 typable /
//! accepted / ok, 1 untypable / rejected, 2 input or usage error, 3 resource
//! exhausted.

mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pargoid_core::congruence::leibniz;
use pargoid_core::generators::{gen_arbitrary, gen_typed};
use pargoid_core::polyclone::compute_clone_exact;
use pargoid_core::typability::{analyze, check_naive_claim, clone_and_varpi, Decision};
use pargoid_core::verifier::verify;
use pargoid_core::{
    ConstantReading, Format, GenConfig, GenMode, Pargoid, Typing, VerifyMode, DEFAULT_BUDGET,
};
use rayon::prelude::*;

#[derive(Parser)]
#[command(
    name = "pargoid",
    version,
    about = "Typability of finite partial groupoids"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of operations in a computed clone.
    #[arg(long, global = true, env = "PARGOID_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Which maps count as constant when classifying operations.
    #[arg(long, global = true, value_enum, default_value_t = Reading::Total)]
    constant_reading: Reading,
    /// Seed for generated instances (first seed of a `stats` range).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Copy, Clone, ValueEnum)]
enum Reading {
    Total,
    OnDomain,
}

impl From<Reading> for ConstantReading {
    fn from(r: Reading) -> Self {
        match r {
            Reading::Total => ConstantReading::Total,
            Reading::OnDomain => ConstantReading::OnDomain,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum Mode {
    Arbitrary,
    TypedStrong,
    TypedLiteral,
}

impl From<Mode> for GenMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Arbitrary => GenMode::Arbitrary,
            Mode::TypedStrong => GenMode::TypedStrong,
            Mode::TypedLiteral => GenMode::TypedLiteral,
        }
    }
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value_t = 5)]
    size: usize,
    /// Probability that a candidate product is defined.
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, value_enum, default_value_t = Mode::Arbitrary)]
    mode: Mode,
    /// Maximum arrow nesting of sampled types (typed modes).
    #[arg(long, default_value_t = 2)]
    type_depth: usize,
    /// Number of ground types (typed modes).
    #[arg(long, default_value_t = 2)]
    ground_count: usize,
}

impl GenArgs {
    fn config(&self, seed: u64) -> GenConfig {
        GenConfig {
            size: self.size,
            density: self.density,
            seed,
            mode: self.mode.into(),
            type_depth: self.type_depth,
            ground_count: self.ground_count,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide typability; print the typing or the verdict.
    Decide {
        file: PathBuf,
        /// Print the certificate of untypability.
        #[arg(long)]
        cert: bool,
    },
    /// Print a typing file for a typable pargoid.
    Type { file: PathBuf },
    /// Check a typing file against a pargoid.
    Verify {
        file: PathBuf,
        typing: PathBuf,
        /// Also require matching types to force products to be defined.
        #[arg(long)]
        strong: bool,
    },
    /// Dump the unary polynomial clone as JSON.
    Clone { file: PathBuf },
    /// Print the Leibniz congruence, one block per line.
    Congruence { file: PathBuf },
    /// Generate a random pargoid.
    Gen {
        #[command(flatten)]
        args: GenArgs,
        /// Also write the generating typing (typed modes) to this file.
        #[arg(long)]
        with_typing: Option<PathBuf>,
    },
    /// Decide a range of generated pargoids and print CSV.
    Stats {
        #[command(flatten)]
        args: GenArgs,
        /// Number of seeds, starting at --seed.
        #[arg(long, default_value_t = 100)]
        count: u64,
    },
    /// Evaluate the naive characterization of typability alongside the verdict.
    ClaimStar { file: PathBuf },
}

/// Process exit status; the numbers are a stable interface.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
enum Status {
    Ok = 0,
    Negative = 1,
    InputError = 2,
    Exhausted = 3,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                Status::InputError as u8
            } else {
                0
            });
        }
    };
    let status = match run(&cli) {
        Ok((out, status)) => {
            print!("{out}");
            status
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<pargoid_core::Error>() {
                Some(pargoid_core::Error::ResourceExhausted { .. }) => Status::Exhausted,
                _ => Status::InputError,
            }
        }
    };
    ExitCode::from(status as u8)
}

fn read_pargoid(path: &Path) -> Result<Pargoid> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    Pargoid::parse(&bytes, Format::sniff(&bytes)).with_context(|| path.display().to_string())
}

fn json(value: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&value).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn run(cli: &Cli) -> Result<(String, Status)> {
    let g = &cli.global;
    let reading: ConstantReading = g.constant_reading.into();
    let mut out = String::new();
    let status = match &cli.command {
        Command::Decide { file, cert } => {
            let p = read_pargoid(file)?;
            let analysis = analyze(&p, g.budget, reading)?;
            let status = match &analysis.decision {
                Decision::Typable(_) => Status::Ok,
                Decision::Untypable(_) => Status::Negative,
                Decision::ResourceExhausted { stage, budget } => {
                    eprintln!(
                        "{} did not close within {budget} operations",
                        stage.as_str()
                    );
                    Status::Exhausted
                }
            };
            if g.json {
                out = json(report::decision_json(&p, &analysis.decision, reading));
            } else {
                match &analysis.decision {
                    Decision::Typable(t) => out = report::typing_text(&p, t),
                    Decision::Untypable(c) => {
                        writeln!(out, "untypable: {}", c.kind())?;
                        if *cert {
                            out.push_str(&report::certificate_text(&p, c));
                        }
                    }
                    Decision::ResourceExhausted { .. } => out.push_str("resource exhausted\n"),
                }
            }
            status
        }
        Command::Type { file } => {
            let p = read_pargoid(file)?;
            match decision(&p, g.budget, reading)? {
                Decision::Typable(t) => {
                    let mut v = t.to_json_value(&p);
                    if g.json {
                        v = report::with_schema(v);
                    }
                    out = json(v);
                    Status::Ok
                }
                Decision::Untypable(c) => {
                    eprintln!("not typable ({})", c.kind());
                    eprint!("{}", report::certificate_text(&p, &c));
                    Status::Negative
                }
                Decision::ResourceExhausted { stage, budget } => {
                    eprintln!(
                        "{} did not close within {budget} operations",
                        stage.as_str()
                    );
                    Status::Exhausted
                }
            }
        }
        Command::Verify {
            file,
            typing,
            strong,
        } => {
            let p = read_pargoid(file)?;
            let text = std::fs::read_to_string(typing)
                .with_context(|| format!("cannot read {}", typing.display()))?;
            let t = Typing::from_json(&p, &text).with_context(|| typing.display().to_string())?;
            let mode = if *strong {
                VerifyMode::Strong
            } else {
                VerifyMode::Literal
            };
            let r = verify(&p, &t, mode)?;
            if g.json {
                out = json(report::verify_json(&p, &t, &r));
            } else {
                out = report::verify_text(&p, &t, &r);
            }
            if r.accepted() {
                Status::Ok
            } else {
                Status::Negative
            }
        }
        Command::Clone { file } => {
            let p = read_pargoid(file)?;
            let mut clone = compute_clone_exact(&p, g.budget)?;
            clone.classify(reading)?;
            out = json(report::clone_json(&p, &clone));
            Status::Ok
        }
        Command::Congruence { file } => {
            let p = read_pargoid(file)?;
            let clone = compute_clone_exact(&p, g.budget)?;
            let varpi = leibniz(&clone)?;
            if g.json {
                out = json(report::partition_json(&p, &varpi));
            } else {
                for block in varpi.blocks() {
                    let names: Vec<&str> = block.iter().map(|&e| p.name(e)).collect();
                    writeln!(out, "{}", names.join(" "))?;
                }
            }
            Status::Ok
        }
        Command::Gen { args, with_typing } => {
            let cfg = args.config(g.seed);
            let format = if g.json { Format::Json } else { Format::Text };
            if cfg.mode == GenMode::Arbitrary {
                if with_typing.is_some() {
                    anyhow::bail!("--with-typing needs a typed mode");
                }
                out = gen_arbitrary(&cfg)?.serialize(format);
            } else {
                let (p, t) = gen_typed(&cfg)?;
                if let Some(path) = with_typing {
                    std::fs::write(path, json(t.to_json_value(&p)))
                        .with_context(|| format!("cannot write {}", path.display()))?;
                }
                out = p.serialize(format);
            }
            Status::Ok
        }
        Command::Stats { args, count } => {
            let rows: Vec<report::StatsRow> = (g.seed..g.seed.saturating_add(*count))
                .into_par_iter()
                .map(|seed| report::stats_row(&args.config(seed), g.budget, reading))
                .collect::<pargoid_core::Result<_>>()?;
            out = report::stats_csv(&rows);
            eprint!("{}", report::stats_summary(&rows));
            Status::Ok
        }
        Command::ClaimStar { file } => {
            let p = read_pargoid(file)?;
            let (clone, varpi) = clone_and_varpi(&p, g.budget, reading)?;
            let claim = check_naive_claim(&p, &clone, &varpi);
            let verdict = decision(&p, g.budget, reading)?;
            if g.json {
                out = json(report::claim_json(&p, &clone, &claim, &verdict));
            } else {
                out = report::claim_text(&p, &clone, &claim, &verdict);
            }
            Status::Ok
        }
    };
    Ok((out, status))
}

fn decision(p: &Pargoid, budget: usize, reading: ConstantReading) -> Result<Decision> {
    Ok(analyze(p, budget, reading)?.decision)
}
