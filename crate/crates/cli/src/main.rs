use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freeiso::isogroup::{Caps, Mode};
use serde_json::{json, Value};

mod caps;
mod commands;

const SCHEMAS: &str = "\
INPUT SCHEMAS (numbers are always JSON strings, decimal or \"p/q\"):
  metric    {\"kind\":\"metric\",\"points\":[\"a\",\"b\"],\"d\":[[\"0\",\"1\"],[\"1\",\"0\"]]}
  graph     {\"kind\":\"graph\",\"vertices\":[\"a\",\"b\"],\"edges\":[[\"a\",\"b\"]]}
            (undirected; a graph stands for its shortest-path metric)
  molecule  {\"coeffs\":{\"a\":\"1\",\"b\":\"-1\"}}   coefficients must sum to zero
  sigma     {\"sigma\":[[[\"a\",\"b\"],[\"c\",\"d\"]],...]}
            directed edge (a,b) goes to (c,d); one orientation per edge suffices

OUTPUT:
  Every report is one JSON object with sorted keys and a \"settings\" echo.
  cycles      {\"cycles\":[[[\"a\",\"b\"],[\"b\",\"c\"],[\"c\",\"a\"]],...],\"count\":n}
  connectivity  includes the minimum vertex cut found (\"min_cut\")
  isogroup    {\"order\":\"48\",\"structure\":\"S_4 x Z2\",\"generators\":[sigma,...],
               \"rigid\":true,\"witness\":null|sigma}
  construct   a metric or graph document plus \"recipe\" and \"warnings\"

EXIT CODES:
  0  success
  2  malformed input, failed validation or violated precondition (error JSON on stderr)
  3  a cap was exhausted; partial report on stdout with \"incomplete\":true

ENVIRONMENT:
  FREEISO_CAPS  default caps as comma-separated key=value pairs, e.g.
                \"max_cycles=100000,max_cycle_len=8,search_nodes=5000000,closure_limit=100000\".
                Command-line flags take precedence.";

#[derive(Parser)]
#[command(name = "freeiso", version, about = "Linear isometries of Lipschitz-free spaces over finite metric spaces")]
#[command(after_long_help = SCHEMAS)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug)]
pub struct Global {
    /// Exact rational arithmetic (the default).
    #[arg(long, global = true, conflicts_with = "tol")]
    exact: bool,
    /// Floating point arithmetic with this comparison tolerance.
    #[arg(long, global = true, value_name = "FLOAT")]
    tol: Option<f64>,
    /// Stop cycle enumeration after this many cycles.
    #[arg(long, global = true, value_name = "N")]
    max_cycles: Option<usize>,
    /// Longest cycle to enumerate.
    #[arg(long, global = true, value_name = "N")]
    max_cycle_len: Option<usize>,
    /// Node budget for the σ search.
    #[arg(long, global = true, value_name = "N")]
    cap_search: Option<u64>,
    /// Check every basis in the star-complement test instead of a sample.
    #[arg(long, global = true)]
    exhaustive_bases: bool,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Add wall-clock time to the report (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Check that the input is a valid metric space or graph.
    Validate { input: PathBuf },
    /// Preserved extreme pairs and their weights.
    Extgraph { input: PathBuf },
    /// Prague / weak Prague classification.
    Prague { input: PathBuf },
    /// Norm of a molecule with an optimal 1-Lipschitz witness.
    Norm {
        input: PathBuf,
        #[arg(long)]
        molecule: PathBuf,
    },
    /// Simple directed cycles of the graph (or of E_ext for a metric).
    Cycles {
        input: PathBuf,
        #[arg(long, default_value_t = 3)]
        min_len: usize,
    },
    /// 2- and 3-connectivity with separating sets.
    Connectivity { input: PathBuf },
    /// Edge components (blocks).
    Components { input: PathBuf },
    /// Star-complement recognition, or vertex map reconstruction for --sigma.
    Whitney {
        input: PathBuf,
        #[arg(long)]
        sigma: Option<PathBuf>,
    },
    /// Check a σ against the isometry conditions, or enumerate all of them.
    Sigma {
        input: PathBuf,
        /// Target space; defaults to the input.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        sigma: Option<PathBuf>,
        /// Map this molecule through the checked σ.
        #[arg(long, requires = "sigma")]
        molecule: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ModeArg::Sasbsc)]
        mode: ModeArg,
        /// Stop after this many σ when enumerating.
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Whether every isometry of the free space comes from a sign and an isometry.
    Rigidity { input: PathBuf },
    /// Order, generators and structure of the linear isometry group.
    Isogroup { input: PathBuf },
    /// Additivity of the norm over the blocks of a graph.
    L1check {
        input: PathBuf,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Build spaces and graphs from the standard constructions.
    #[command(subcommand)]
    Construct(Construct),
}

#[derive(Subcommand)]
pub enum Construct {
    /// ℓ_p-sum M ⊕_p N.
    LpSum {
        m: PathBuf,
        n: PathBuf,
        #[arg(long)]
        p: String,
    },
    /// Disjoint union with all cross distances 1 + max diameter.
    UnionBounded { m: PathBuf, n: PathBuf },
    /// M and N glued through their base points with the ℓ_p rule.
    UnionBasepoint {
        m: PathBuf,
        n: PathBuf,
        #[arg(long)]
        base_m: String,
        #[arg(long)]
        base_n: String,
        #[arg(long)]
        p: String,
    },
    /// Three cliques joined through three connector vertices.
    ThreeClique {
        /// Clique sizes, e.g. 11,12,13.
        #[arg(long, value_delimiter = ',')]
        cliques: Vec<usize>,
        /// Rows of the connector multiplicity matrix separated by ';', e.g. "0,3,4;5,0,6;7,8,0".
        /// Row j gives how many vertices of each clique connector j is joined to.
        #[arg(long)]
        connectors: String,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Sasb,
    Sasbsc,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Sasb => Mode::SaSb,
            ModeArg::Sasbsc => Mode::SaSbSc,
        }
    }
}

/// Settings shared by every command.
pub struct Ctx {
    pub caps: Caps,
    pub exhaustive_bases: bool,
    pub seed: u64,
}

/// What a command produced.
pub enum Outcome {
    Done(Value),
    /// A cap was hit part way; the value holds whatever was computed.
    Partial(Value),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let caps = match caps::resolve(&cli.global) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if let Some(t) = cli.global.tol {
        if !(t.is_finite() && t >= 0.0) {
            return fail(&freeiso::Error::Input(format!("invalid tolerance {t}")));
        }
        freeiso::scalar::set_tolerance(t);
    }
    let ctx = Ctx { caps, exhaustive_bases: cli.global.exhaustive_bases, seed: cli.global.seed };
    let result = if cli.global.tol.is_some() {
        commands::run::<freeiso::Approx>(&cli.command, &ctx)
    } else {
        commands::run::<freeiso::Rational>(&cli.command, &ctx)
    };
    let settings = settings_json(&cli.global, &ctx);
    let (mut report, code) = match result {
        Ok(Outcome::Done(v)) => (v, 0),
        Ok(Outcome::Partial(v)) => (v, 3),
        Err(e) if e.is_cap() => (json!({ "error": error_json(&e) }), 3),
        Err(e) => return fail(&e),
    };
    if let Value::Object(map) = &mut report {
        if code == 3 {
            map.insert("incomplete".into(), json!(true));
        }
        map.insert("settings".into(), settings);
        if cli.global.timing {
            map.insert("timing_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
        }
    }
    let text = serde_json::to_string_pretty(&report).expect("reports serialize");
    // A closed pipe downstream is not our failure.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    ExitCode::from(code)
}

fn settings_json(g: &Global, ctx: &Ctx) -> Value {
    let arithmetic = match g.tol {
        Some(t) => json!({ "tolerance": t }),
        None => json!("exact"),
    };
    json!({
        "arithmetic": arithmetic,
        "caps": caps::to_json(&ctx.caps),
        "exhaustive_bases": ctx.exhaustive_bases,
        "seed": ctx.seed,
    })
}

fn error_json(e: &freeiso::Error) -> Value {
    let debug = format!("{e:?}");
    let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
    json!({ "kind": kind, "message": e.to_string() })
}

fn fail(e: &freeiso::Error) -> ExitCode {
    eprintln!("{}", json!({ "error": error_json(e) }));
    ExitCode::from(2)
}
