mod input;

use std::path::PathBuf;
use std::process::ExitCode;

use blowuplab::blowup::{
    persistence_probe, positive_profile, sample_model, tind_blowup, DensityValue, Mode, ModelSource, Verdict,
};
use blowuplab::dimension::dim_report;
use blowuplab::families::{
    agreement_graph, gen_pi, hereditary_tests, perm_structures, perm_substitute, poset_report,
};
use blowuplab::registry::{generators, graph_classes, suites};
use blowuplab::substitution::{
    closure_enumerate, closure_member, is_prime, minimal_obstructions, modular_decomposition, Family,
    DEFAULT_BUDGET,
};
use blowuplab::verify::{self, Context, Status, VerifyReport};
use blowuplab::{densities, graph6, Error, Structure};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde_json::{json, Value};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Io(String),
    Lib(Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Lib(_) => 2,
            CliError::Input(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Io(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    G6,
}

#[derive(Parser)]
#[command(name = "blowuplab", version, about = "Substitution closures, recursive blow-ups and motif densities")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Interval tolerance, e.g. 1e-9 or 1/1000.
    #[arg(long, global = true)]
    eps: Option<String>,
    #[arg(long, global = true)]
    depth: Option<usize>,
    /// Enumeration cap; defaults to BLOWUPLAB_BUDGET or 1000000.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Human-readable output instead of compact JSON.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embedding count and induced densities of a motif in a structure.
    Density {
        #[arg(long)]
        motif: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Recursive blow-ups: densities, samples, profiles and probes
    #[command(subcommand)]
    Blowup(BlowupCmd),
    /// Whether a structure has only trivial modules.
    Prime {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Modular decomposition tree of a graph.
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Substitution closures of prime families
    #[command(subcommand)]
    Closure(ClosureCmd),
    /// VC and VC' dimension with witnesses.
    Vc {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Cograph and perfectness tests.
    Hereditary {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Named graph constructions; `pin` gives the permutation family.
    Gen {
        kind: String,
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "graph")]
        emit: Emit,
    },
    /// Substructure order on a family file.
    Poset {
        #[arg(long)]
        family: PathBuf,
    },
    /// Agreement graph of a permutation, optionally after substituting another.
    Perm {
        #[arg(long)]
        sigma: String,
        /// 1-based position to substitute at.
        #[arg(long, requires = "tau")]
        at: Option<usize>,
        #[arg(long, requires = "at")]
        tau: Option<String>,
    },
    /// Applies an open interpretation to a structure.
    Interpret {
        #[arg(long)]
        interp: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Runs a verification suite: substitution, blowup, dimension, families or all.
    Verify { suite: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Emit {
    Graph,
    Perm,
}

#[derive(Args)]
struct SpecArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    mask: Option<PathBuf>,
}

#[derive(Subcommand)]
enum BlowupCmd {
    /// Induced density of a motif, exact or bracketed to `--eps`
    Density {
        #[arg(long)]
        motif: PathBuf,
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long)]
        exact: bool,
    },
    /// Seeded finite sample
    Sample {
        #[arg(long, required_unless_present = "graphon")]
        spec: Option<PathBuf>,
        #[arg(long, conflicts_with = "graphon")]
        mask: Option<PathBuf>,
        /// Step graphon file instead of a blow-up spec.
        #[arg(long)]
        graphon: Option<PathBuf>,
        #[arg(long)]
        n: usize,
    },
    /// Positive-density structures up to `kmax` vertices.
    Profile {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// Random masks that might drop profile members
    Probe {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
    },
    /// The finite blow-up after `d` levels.
    Finite {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        d: usize,
    },
}

#[derive(Subcommand)]
enum ClosureCmd {
    /// Closure members up to `nmax` vertices
    Enum {
        #[arg(long)]
        primes: PathBuf,
        #[arg(long)]
        nmax: usize,
    },
    /// Membership of one structure in the closure.
    Member {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        primes: PathBuf,
    },
    /// Minimal graphs outside a named hereditary class.
    Obstructions {
        #[arg(long)]
        class: String,
        #[arg(long)]
        nmax: usize,
    },
}

enum Output {
    Json(Value),
    Lines(Vec<String>),
    Report(VerifyReport),
}

fn structure_value(s: &Structure) -> Value {
    match s.to_graph() {
        Ok(g) => Value::String(graph6::encode(&g)),
        Err(_) => serde_json::from_str(&s.to_json()).expect("structure JSON"),
    }
}

fn family_output(f: &Family, format: Format) -> Output {
    match format {
        Format::G6 => Output::Lines(
            f.sorted()
                .into_iter()
                .filter_map(|s| s.to_graph().ok().map(|g| graph6::encode(&g)))
                .collect(),
        ),
        Format::Json => Output::Json(Value::Array(f.sorted().into_iter().map(structure_value).collect())),
    }
}

fn structure_output(s: &Structure, format: Format) -> Output {
    match (format, s.to_graph()) {
        (Format::G6, Ok(g)) => Output::Lines(vec![graph6::encode(&g)]),
        _ => Output::Json(structure_value(s)),
    }
}

fn budget(cli: &Cli) -> Result<usize, CliError> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var("BLOWUPLAB_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("BLOWUPLAB_BUDGET must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn eps(cli: &Cli) -> Result<BigRational, CliError> {
    input::rational(cli.eps.as_deref().unwrap_or("1e-9")).map_err(CliError::Usage)
}

fn rational_str(r: &BigRational) -> Value {
    Value::String(r.to_string())
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let format = cli.format;
    Ok(match &cli.command {
        Command::Density { motif, input } => {
            let h = input::structure(motif)?;
            let g = input::structure(input)?;
            Output::Json(serde_json::to_value(densities(&h, &g)?).expect("report"))
        }
        Command::Blowup(cmd) => blowup(cli, cmd)?,
        Command::Prime { input } => Output::Json(json!({ "prime": is_prime(&input::structure(input)?)? })),
        Command::Decompose { input } => Output::Json(modular_decomposition(&input::graph(input)?)?.to_json()),
        Command::Closure(cmd) => closure(cli, cmd)?,
        Command::Vc { input } => {
            let r = dim_report(&input::graph(input)?)?;
            let one = |w: &[usize]| w.iter().map(|v| v + 1).collect::<Vec<_>>();
            Output::Json(json!({
                "vc": r.vc,
                "vc_prime": r.vc_prime,
                "vc_witness": one(&r.vc_witness),
                "vc_prime_witness": one(&r.vc_prime_witness),
            }))
        }
        Command::Hereditary { input } => {
            Output::Json(serde_json::to_value(hereditary_tests(&input::graph(input)?)?).expect("report"))
        }
        Command::Gen { kind, n, emit } => {
            if kind == "pin" {
                let pi = gen_pi(*n)?;
                match emit {
                    Emit::Perm => Output::Json(json!({ "perm": pi.values() })),
                    Emit::Graph => structure_output(&agreement_graph(&pi).to_structure(), format),
                }
            } else {
                if *emit == Emit::Perm {
                    return Err(CliError::Usage("--emit perm only applies to `pin`".into()));
                }
                let g = generators().get(kind)?.generate(*n)?;
                structure_output(&g.to_structure(), format)
            }
        }
        Command::Poset { family } => {
            let f = input::family(family)?;
            let members: Vec<Structure> = f.sorted().into_iter().cloned().collect();
            let r = poset_report(&members)?;
            Output::Json(json!({
                "members": members.iter().map(structure_value).collect::<Vec<_>>(),
                "below": r.below,
                "antichain": r.antichain,
                "chain": r.chain,
                "covers": r.covers.iter().map(|(a, b)| [a + 1, b + 1]).collect::<Vec<_>>(),
            }))
        }
        Command::Perm { sigma, at, tau } => {
            let s = input::permutation(sigma)?;
            let p = match (at, tau) {
                (Some(v), Some(t)) => {
                    let t = input::permutation(t)?;
                    if *v == 0 {
                        return Err(CliError::Usage("--at is 1-based".into()));
                    }
                    perm_substitute(&s, v - 1, &t)?
                }
                _ => s,
            };
            let (m, g) = perm_structures(&p)?;
            match format {
                Format::G6 => Output::Lines(vec![graph6::encode(&g)]),
                Format::Json => Output::Json(json!({
                    "perm": p.values(),
                    "agreement": graph6::encode(&g),
                    "structure": structure_value(&m),
                })),
            }
        }
        Command::Interpret { interp, input } => {
            let i = input::interpretation(interp)?;
            structure_output(&i.apply(&input::structure(input)?)?, format)
        }
        Command::Verify { suite } => {
            let ctx = Context {
                seed: cli.seed,
                budget: budget(cli)?,
            };
            let report = if suite == "all" {
                verify::run_checks("all", &verify::all_checks(), &ctx)
            } else {
                let s = suites().get(suite).map_err(|e| CliError::Usage(e.to_string()))?;
                verify::run_suite(s.as_ref(), &ctx)
            };
            Output::Report(report)
        }
    })
}

fn blowup(cli: &Cli, cmd: &BlowupCmd) -> Result<Output, CliError> {
    Ok(match cmd {
        BlowupCmd::Density { motif, spec, exact } => {
            let h = input::structure(motif)?;
            let src = input::pruned(&spec.spec, spec.mask.as_deref())?;
            let mode = if *exact { Mode::Exact } else { Mode::Interval(eps(cli)?) };
            match tind_blowup(&h, &src, &mode)? {
                DensityValue::Exact(v) => Output::Json(rational_str(&v)),
                DensityValue::Interval(iv) => Output::Json(serde_json::to_value(iv).expect("interval")),
            }
        }
        BlowupCmd::Sample { spec, mask, graphon, n } => {
            let source: Box<dyn ModelSource> = match (graphon, spec) {
                (Some(g), _) => Box::new(input::step_graphon(g)?),
                (None, Some(s)) => Box::new(input::pruned(s, mask.as_deref())?),
                (None, None) => return Err(CliError::Usage("need --spec or --graphon".into())),
            };
            structure_output(&sample_model(source.as_ref(), *n, cli.seed)?, cli.format)
        }
        BlowupCmd::Profile { spec, kmax } => {
            let src = input::pruned(&spec.spec, spec.mask.as_deref())?;
            let depth = cli.depth.unwrap_or(8 * kmax);
            let r = positive_profile(&src, *kmax, depth)?;
            if let Some(w) = r.warning() {
                eprintln!("warning: {w}");
            }
            match cli.format {
                Format::G6 => family_output(&r.family, Format::G6),
                Format::Json => Output::Json(r.to_json()),
            }
        }
        BlowupCmd::Probe { spec, kmax, trials } => {
            let s = input::spec(spec)?;
            let r = persistence_probe(&s, *kmax, *trials, cli.seed)?;
            if let Verdict::Witness { .. } = r.verdict {
                eprintln!("separating witness found");
            }
            Output::Json(r.to_json())
        }
        BlowupCmd::Finite { spec, d } => structure_output(&input::spec(spec)?.finite_blowup(*d)?, cli.format),
    })
}

fn closure(cli: &Cli, cmd: &ClosureCmd) -> Result<Output, CliError> {
    Ok(match cmd {
        ClosureCmd::Enum { primes, nmax } => {
            let p = input::family(primes)?;
            family_output(&closure_enumerate(&p, *nmax, budget(cli)?)?, cli.format)
        }
        ClosureCmd::Member { input: path, primes } => {
            let m = input::structure(path)?;
            let p = input::family(primes)?;
            Output::Json(json!({ "member": closure_member(&m, &p)? }))
        }
        ClosureCmd::Obstructions { class, nmax } => {
            let c = graph_classes().get(class).map_err(|e| CliError::Usage(e.to_string()))?;
            let member = |s: &Structure| s.to_graph().map(|g| c.contains(&g).unwrap_or(false)).unwrap_or(false);
            let o = minimal_obstructions(&blowuplab::Language::graph(), &member, *nmax, budget(cli)?)?;
            match cli.format {
                Format::G6 => family_output(&o.family, Format::G6),
                Format::Json => Output::Json(json!({
                    "obstructions": o.family.sorted().into_iter().map(structure_value).collect::<Vec<_>>(),
                    "all_prime": o.all_prime,
                    "scanned": o.scanned,
                })),
            }
        }
    })
}

fn print(out: &Output, pretty: bool) -> bool {
    match out {
        Output::Json(v) => {
            if pretty {
                println!("{}", serde_json::to_string_pretty(v).expect("json"));
            } else {
                println!("{v}");
            }
            true
        }
        Output::Lines(lines) => {
            for l in lines {
                println!("{l}");
            }
            true
        }
        Output::Report(r) => {
            if pretty {
                for c in &r.checks {
                    let status = match c.status {
                        Status::Pass => "pass",
                        Status::Fail => "FAIL",
                        Status::Skipped => "skip",
                    };
                    println!("{status:<5} {:<32} {:>7} ms  {}", c.id, c.millis, c.details);
                }
                println!("{}: {} passed, {} failed", r.suite, r.passed, r.failed);
            } else {
                println!("{}", serde_json::to_string(r).expect("report"));
            }
            r.ok
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if print(&out, cli.pretty) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
