mod records;
mod report;
mod table;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::thread;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};
use triqent::campaign::SuiteRegistry;
use triqent::ensemble::EnsembleRegistry;
use triqent::state::PureState;
use triqent::Tolerances;

use records::{parse_records, StateRecord};
use report::Kind;

#[derive(Parser)]
#[command(name = "triqent", version, about = "Canonical form, entanglement measures and LU class of pure three-qubit states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Treat qubit k (1-based) as the distinguished party by swapping it with qubit 1.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    split: u8,
    #[arg(long, global = true, env = "TRIQENT_SEED", default_value_t = 1)]
    seed: u64,
    /// Render aligned text instead of JSON.
    #[arg(long, global = true)]
    table: bool,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Add wall-clock milliseconds to each report (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args)]
struct TolArgs {
    #[arg(long, global = true)]
    tol_product: Option<f64>,
    #[arg(long, global = true)]
    tol_degenerate: Option<f64>,
    #[arg(long, global = true)]
    tol_tangle: Option<f64>,
    #[arg(long, global = true)]
    tol_j6: Option<f64>,
    #[arg(long, global = true)]
    tol_clu: Option<f64>,
    #[arg(long, global = true)]
    tol_inv: Option<f64>,
    #[arg(long, global = true)]
    tol_e6: Option<f64>,
    #[arg(long, global = true)]
    tol_lemma1: Option<f64>,
    #[arg(long, global = true)]
    tol_poly: Option<f64>,
    #[arg(long, global = true)]
    tol_omega: Option<f64>,
}

impl TolArgs {
    fn resolve(&self) -> Result<Tolerances> {
        let mut t = Tolerances::default();
        let slots = [
            (self.tol_product, &mut t.product, "product"),
            (self.tol_degenerate, &mut t.degenerate, "degenerate"),
            (self.tol_tangle, &mut t.tangle, "tangle"),
            (self.tol_j6, &mut t.j6, "j6"),
            (self.tol_clu, &mut t.clu, "clu"),
            (self.tol_inv, &mut t.inv, "inv"),
            (self.tol_e6, &mut t.e6, "e6"),
            (self.tol_lemma1, &mut t.lemma1, "lemma1"),
            (self.tol_poly, &mut t.poly, "poly"),
            (self.tol_omega, &mut t.omega, "omega"),
        ];
        for (value, slot, name) in slots {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    bail!("--tol-{name} must be a finite nonnegative number, got {v}");
                }
                *slot = v;
            }
        }
        Ok(t)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Everything: canonical form, measures, bipartite data, standard form, invariants, class.
    Analyze(Input),
    /// Canonical parameters and the local unitary reaching them.
    Decompose(Input),
    /// E1..E6.
    Measures(Input),
    /// CLU verdict and subclass with evidence.
    Classify(Input),
    /// Five-amplitude standard form and its invariants.
    StandardForm(Input),
    /// Enumerate all Bell outcomes of the generation protocol for each state's canonical form.
    Gensim(Input),
    /// Emit random state records.
    Random {
        /// One of haar, real, class2, class3, class4.
        ensemble: String,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Run a verification suite; exit status 0 iff it passes.
    Verify {
        /// One of invariance, monogamy, oracles, gensim, roundtrip.
        suite: String,
        #[arg(long, default_value_t = 100)]
        count: usize,
    },
}

#[derive(Args)]
struct Input {
    /// JSON array or newline-delimited StateRecords; stdin when absent or `-`.
    input: Option<PathBuf>,
}

fn read_input(input: &Input) -> Result<String> {
    match &input.input {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

/// Swaps qubit `split` (1-based) into position 0.
fn relabel(state: &PureState, split: u8) -> Result<PureState> {
    let order = match split {
        1 => return Ok(state.clone()),
        2 => [1, 0, 2],
        _ => [2, 1, 0],
    };
    Ok(state.permute_qubits(&order)?)
}

/// Maps `f` over `items` on all cores, keeping input order.
fn parallel_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    if workers < 2 || items.len() < 2 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<_>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn analyze_records(kind: Kind, input: &Input, common: &Common, tol: &Tolerances) -> Result<Vec<Value>> {
    let recs = parse_records(&read_input(input)?)?;
    let mut states = Vec::with_capacity(recs.len());
    for r in &recs {
        let (s, warning) = r.to_state()?;
        if let Some(w) = warning {
            eprintln!("warning: {w}");
        }
        states.push((r.id.as_str(), relabel(&s, common.split)?));
    }
    Ok(parallel_map(&states, |(id, s)| {
        let t0 = Instant::now();
        let mut v = report::report(kind, id, s, tol);
        if common.split != 1 {
            v["split"] = json!(common.split);
        }
        if common.timing {
            v["timing_ms"] = json!(t0.elapsed().as_secs_f64() * 1e3);
        }
        v
    }))
}

fn random_records(ensemble: &str, count: usize, seed: u64) -> Result<Vec<Value>> {
    if count == 0 {
        bail!("--count must be at least 1");
    }
    let reg = EnsembleRegistry::default();
    if reg.get(ensemble).is_err() {
        bail!("unknown ensemble `{ensemble}` (expected one of {})", reg.names().join(", "));
    }
    let states = reg.generate(ensemble, count, seed)?;
    Ok(states
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let mut meta = Map::new();
            meta.insert("ensemble".into(), json!(ensemble));
            meta.insert("seed".into(), json!(seed));
            meta.insert("index".into(), json!(k));
            json!(StateRecord::from_state(format!("{ensemble}-{seed}-{k}"), s, meta))
        })
        .collect())
}

fn emit(values: &[Value], common: &Common, pretty: bool) -> Result<()> {
    let text = if common.table {
        table::render(values)
    } else {
        let mut s = String::new();
        for v in values {
            s.push_str(&if pretty { serde_json::to_string_pretty(v)? } else { serde_json::to_string(v)? });
            s.push('\n');
        }
        s
    };
    match &common.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    let tol = common.tol.resolve()?;
    let kind = match &cli.command {
        Command::Analyze(i) => Some((Kind::Analyze, i)),
        Command::Decompose(i) => Some((Kind::Decompose, i)),
        Command::Measures(i) => Some((Kind::Measures, i)),
        Command::Classify(i) => Some((Kind::Classify, i)),
        Command::StandardForm(i) => Some((Kind::StandardForm, i)),
        Command::Gensim(i) => Some((Kind::Gensim, i)),
        _ => None,
    };
    if let Some((kind, input)) = kind {
        emit(&analyze_records(kind, input, common, &tol)?, common, false)?;
        return Ok(ExitCode::SUCCESS);
    }
    match &cli.command {
        Command::Random { ensemble, count } => {
            emit(&random_records(ensemble, *count, common.seed)?, common, false)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { suite, count } => {
            let reg = SuiteRegistry::default();
            if reg.get(suite).is_err() {
                bail!("unknown suite `{suite}` (expected one of {})", reg.names().join(", "));
            }
            let t0 = Instant::now();
            let rep = reg.run(suite, *count, common.seed, &tol)?;
            let mut v = json!(rep);
            if common.timing {
                v["timing_ms"] = json!(t0.elapsed().as_secs_f64() * 1e3);
            }
            emit(&[v], common, true)?;
            Ok(if rep.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        _ => unreachable!("analysis commands handled above"),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
