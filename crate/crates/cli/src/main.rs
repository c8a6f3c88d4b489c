//! `qsamp`: command-line front end for the stationary-state laboratory.
//!
//! Exit codes: 0 on success, 1 on an I/O failure while writing output,
//! 2 on bad input, 3 when an algorithm ran but reported failure.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use qsamp_core::families::{Family, FamilySpec};
use qsamp_core::qff::{make_plan, qff_residual};
use qsamp_core::reflect::{reflection_errors, CheckMode};
use qsamp_core::report::{emit_table, emit_trial, to_json, Cell, Format, Table};
use qsamp_core::sampler::{amplitude_amplify, prepare_unknown, PiLowerBound, SamplerConfig, TrialReport};
use qsamp_core::scaling::{run_scaling, run_scaling_averaged, Quantity, ScalingConfig};
use qsamp_core::spectral::{classical_mixing_time, hitting_times_all};
use qsamp_core::{from_edge_list, hitting_time_oracle, random_walk_chain, sym_eig, Error, MarkovChain, Result};

#[derive(Parser, Debug)]
#[command(name = "qsamp", version, about = "Stationary-state preparation with interpolated quantum walks")]
struct Cli {
    /// Use the lazy walk (I + P)/2.
    #[arg(long, global = true)]
    lazy: bool,
    /// Write the document here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Output format; `qff` defaults to json, everything else to csv.
    #[arg(long, global = true, value_name = "csv|json")]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stationary distribution, hitting times, spectral gap and mixing time.
    Analyze(AnalyzeArgs),
    /// Residual of the fast-forwarding circuit against Dᵗ.
    Qff(QffArgs),
    /// Reflection error on every eigenvector of the discriminant.
    Reflect(ReflectArgs),
    /// Prepare the stationary state from one vertex.
    Sample(SampleArgs),
    /// Scaling sweep over a graph family.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GraphArg {
    /// Edge-list file or family spec such as `cycle:8`.
    #[arg(long, value_name = "file|family:spec")]
    graph: String,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Comma-separated marked set; adds a row for its hitting time.
    #[arg(long, value_delimiter = ',')]
    marked: Vec<usize>,
    /// Total-variation target of the mixing time.
    #[arg(long, default_value_t = 0.25)]
    mixing_eps: f64,
}

#[derive(Args, Debug)]
struct QffArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Power of D to simulate.
    #[arg(long)]
    t: usize,
    #[arg(long)]
    eps1: f64,
    /// Input state: a vertex index or `pi` for √π.
    #[arg(long, default_value = "0")]
    psi: StartState,
}

#[derive(Args, Debug)]
struct ReflectArgs {
    #[command(flatten)]
    graph: GraphArg,
    #[arg(long, default_value_t = 0.1)]
    eps2: f64,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    graph: GraphArg,
    /// Starting vertex, or `random` to draw it from the seed.
    #[arg(long, default_value = "random", value_name = "vertex|random")]
    g: VertexChoice,
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Known π_g, or `unknown` to search for it.
    #[arg(long, default_value = "unknown", value_name = "f|unknown")]
    pig: PigChoice,
    #[arg(long, default_value = "sampled", value_name = "exact|sampled")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Copies per comparison round.
    #[arg(long, default_value_t = 100)]
    copies: usize,
    /// Interval constant: the search runs on [0, C/n].
    #[arg(long = "C", default_value_t = 100.0, value_name = "C")]
    interval: f64,
    /// Lower bound on π_min; defaults to 1/(C n²).
    #[arg(long, value_name = "f|oracle")]
    pi_lb: Option<PiLbArg>,
    /// Same as `--format json`.
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Family name with optional parameters, e.g. `cycle`, `balanced-r-tree,r=3`
    /// or `gnp,p=0.2`.
    #[arg(long)]
    family: String,
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "ht,delta")]
    quantities: Vec<Quantity>,
    /// Average over seeds 0..k (meaningful for gnp).
    #[arg(long)]
    seeds: Option<u64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0.25)]
    mixing_eps: f64,
    /// Largest statevector the sampling cost may simulate.
    #[arg(long, default_value_t = 1 << 22)]
    max_dim: usize,
}

#[derive(Debug, Clone, Copy)]
enum StartState {
    Vertex(usize),
    Pi,
}

impl FromStr for StartState {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "pi" => Ok(StartState::Pi),
            _ => s.parse().map(StartState::Vertex).map_err(|_| format!("expected a vertex or `pi`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum VertexChoice {
    Vertex(usize),
    Random,
}

impl FromStr for VertexChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "random" => Ok(VertexChoice::Random),
            _ => s.parse().map(VertexChoice::Vertex).map_err(|_| format!("expected a vertex or `random`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum PigChoice {
    Known(f64),
    Unknown,
}

impl FromStr for PigChoice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "unknown" => Ok(PigChoice::Unknown),
            _ => s.parse().map(PigChoice::Known).map_err(|_| format!("expected a number or `unknown`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct ModeArg(CheckMode);

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(ModeArg(CheckMode::Exact)),
            "sampled" => Ok(ModeArg(CheckMode::Sampled)),
            _ => Err(format!("expected `exact` or `sampled`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct PiLbArg(PiLowerBound);

impl FromStr for PiLbArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "oracle" => Ok(PiLbArg(PiLowerBound::Oracle)),
            _ => s
                .parse()
                .map(|v| PiLbArg(PiLowerBound::Value(v)))
                .map_err(|_| format!("expected a number or `oracle`, got `{s}`")),
        }
    }
}

/// Whether the command's algorithm reported success.
enum Outcome {
    Done,
    Failed,
}

fn load_chain(arg: &str, lazy: bool) -> Result<MarkovChain> {
    let is_family = arg.split_once(':').is_some_and(|(name, _)| name.parse::<Family>().is_ok());
    if is_family {
        return arg.parse::<FamilySpec>()?.chain(lazy);
    }
    let text =
        std::fs::read_to_string(arg).map_err(|e| Error::Domain(format!("cannot read graph file '{arg}': {e}")))?;
    random_walk_chain(&from_edge_list(&text)?, lazy)
}

/// `name`, `name:n,...` or `name,key=value,...`; the size is replaced per sweep point.
fn parse_family(arg: &str) -> Result<FamilySpec> {
    if arg.contains(':') {
        return arg.parse();
    }
    match arg.split_once(',') {
        Some((name, rest)) => format!("{name}:0,{rest}").parse(),
        None => Ok(FamilySpec::new(arg.parse()?, 0)),
    }
}

fn write_output(out: Option<&PathBuf>, doc: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, doc)?,
        None => print!("{doc}"),
    }
    Ok(())
}

fn analyze(args: &AnalyzeArgs, lazy: bool, format: Format) -> Result<String> {
    let c = load_chain(&args.graph.graph, lazy)?;
    let spec = sym_eig(&qsamp_core::discriminant(&c))?;
    // Periodic chains have no mixing time; leave the cells empty.
    let mixing = classical_mixing_time(&c, args.mixing_eps).ok();
    let mut t = Table::new("analysis", &["quantity", "vertex", "value"]);
    let global = |name: &str, v: Cell| vec![Cell::from(name), Cell::Missing, v];
    t.push(global("n", c.n().into()))?;
    t.push(global("delta", spec.gap().into()))?;
    t.push(global("absolute_gap", spec.absolute_gap().into()))?;
    t.push(global("mixing", mixing.map_or(Cell::Missing, |m| m.steps.into())))?;
    t.push(global("mixing_bound", mixing.map(|m| m.bound).into()))?;
    for (x, p) in c.pi().iter().enumerate() {
        t.push(vec!["pi".into(), x.into(), (*p).into()])?;
    }
    if c.n() >= 2 {
        for (x, h) in hitting_times_all(&c)?.into_iter().enumerate() {
            t.push(vec!["ht".into(), x.into(), h.into()])?;
        }
    }
    if !args.marked.is_empty() {
        t.push(global("ht_marked", hitting_time_oracle(&c, &args.marked)?.into()))?;
    }
    emit_table(&t, format)
}

fn qff(args: &QffArgs, lazy: bool, format: Format) -> Result<String> {
    let c = load_chain(&args.graph.graph, lazy)?;
    let plan = make_plan(args.t, args.eps1)?;
    let psi: Vec<f64> = match args.psi {
        StartState::Pi => c.sqrt_pi().iter().copied().collect(),
        StartState::Vertex(x) if x < c.n() => (0..c.n()).map(|y| if y == x { 1.0 } else { 0.0 }).collect(),
        StartState::Vertex(x) => return Err(Error::Domain(format!("vertex {x} out of range for n = {}", c.n()))),
    };
    let residual = qff_residual(&c, &plan, &psi)?;
    match format {
        Format::Json => to_json(&serde_json::json!({
            "t": plan.t(),
            "eps1": plan.eps1(),
            "gamma": plan.gamma(),
            "tau": plan.tau(),
            "residual": residual,
        })),
        Format::Csv => {
            let mut t = Table::new("qff", &["t", "eps1", "gamma", "tau", "residual"]);
            let tau = u64::from(plan.tau());
            t.push(vec![plan.t().into(), plan.eps1().into(), plan.gamma().into(), tau.into(), residual.into()])?;
            emit_table(&t, format)
        }
    }
}

fn reflect(args: &ReflectArgs, lazy: bool, format: Format) -> Result<String> {
    let c = load_chain(&args.graph.graph, lazy)?;
    let mut t = Table::new("reflection", &["j", "lambda", "norm"]);
    for row in reflection_errors(&c, args.eps2)? {
        t.push(vec![row.j.into(), row.lambda.into(), row.norm.into()])?;
    }
    emit_table(&t, format)
}

fn sample(args: &SampleArgs, lazy: bool) -> Result<TrialReport> {
    let c = load_chain(&args.graph.graph, lazy)?;
    let config = SamplerConfig {
        eps: args.eps,
        copies: args.copies,
        interval: args.interval,
        pi_lb: args.pi_lb.map_or(PiLowerBound::Default, |p| p.0),
        seed: args.seed,
        mode: args.mode.0,
        ..SamplerConfig::default()
    };
    let g = match args.g {
        VertexChoice::Vertex(g) => Some(g),
        VertexChoice::Random => None,
    };
    match (args.pig, g) {
        (PigChoice::Unknown, g) => prepare_unknown(&c, g, &config),
        (PigChoice::Known(pig), Some(g)) => {
            if g >= c.n() {
                return Err(Error::Domain(format!("vertex {g} out of range for n = {}", c.n())));
            }
            amplitude_amplify(g, pig, args.eps, &c, &config)
        }
        (PigChoice::Known(_), None) => Err(Error::Domain("a known π_g needs a fixed --g vertex".into())),
    }
}

fn bench(args: &BenchArgs, lazy: bool, format: Format) -> Result<String> {
    let spec = parse_family(&args.family)?;
    let config = ScalingConfig { lazy, eps: args.eps, mixing_eps: args.mixing_eps, max_dim: args.max_dim };
    let table = match args.seeds {
        Some(k) => {
            let seeds: Vec<u64> = (0..k).collect();
            run_scaling_averaged(&spec, &args.sizes, &args.quantities, &config, &seeds)?
        }
        None => run_scaling(&spec, &args.sizes, &args.quantities, &config)?,
    };
    emit_table(&table.to_table(), format)
}

fn run(cli: &Cli) -> Result<Outcome> {
    let format = cli.format.unwrap_or_default();
    let doc = match &cli.command {
        Command::Analyze(a) => analyze(a, cli.lazy, format)?,
        Command::Qff(a) => qff(a, cli.lazy, cli.format.unwrap_or(Format::Json))?,
        Command::Reflect(a) => reflect(a, cli.lazy, format)?,
        Command::Bench(a) => bench(a, cli.lazy, format)?,
        Command::Sample(a) => {
            let report = sample(a, cli.lazy)?;
            let format = if a.json { Format::Json } else { format };
            write_output(cli.out.as_ref(), &emit_trial(&report, format)?)?;
            return Ok(if report.succeeded() { Outcome::Done } else { Outcome::Failed });
        }
    };
    write_output(cli.out.as_ref(), &doc)?;
    Ok(Outcome::Done)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(1),
                e if e.is_validation() => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}
