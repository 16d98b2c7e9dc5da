//! `tensorql`: load N-Triples graphs, run queries against their tensor
//! encoding, explain join plans with cardinality estimates, and compute
//! Boolean CP decompositions.
//!
//! Graphs for a run are supplied with the repeatable global
//! `--load <alias>=<file>` option; the first one is the default graph.
//! Queries are read from files or stdin (`-`), never from argv.
//!
//! Exit codes: 0 success, 1 parse/IO/evaluation errors, 2 unsupported query
//! feature (named in the message).

use std::fs;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tensorql_core::cardinality::{CardBundle, CardEstimate, KmvSketch, DEFAULT_KMV_SEED};
use tensorql_core::cp::{
    export_factors, greedy_cp, naive_decomposition, verify_sparsity, DecompReport, GreedyOptions,
};
use tensorql_core::query::{
    evaluate_traced, parse, plan, GraphSet, Modifier, Query, QueryForm, QueryOutcome, StepOp,
};
use tensorql_core::store::{load_ntriples, write_ntriples, Graph};
use tensorql_core::Error;

#[derive(Parser)]
#[command(
    name = "tensorql",
    version,
    about = "RDF as a Boolean tensor: store, query, estimate, decompose"
)]
struct Cli {
    /// Load a graph as ALIAS=FILE (repeatable). The first is the default graph.
    #[arg(long = "load", value_name = "ALIAS=FILE", global = true)]
    load: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Tsv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Ingest an N-Triples file and print its dimensions and triple count
    Load { alias: String, file: PathBuf },
    /// Dimensions, triple count, sparsity and marginal-matrix totals
    Stats { alias: String },
    /// Evaluate a query from FILE or `-` (stdin) and print the solutions
    Query {
        source: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Tsv)]
        format: OutputFormat,
    },
    /// Print the join plan with per-step case and cardinality estimates
    Explain {
        source: String,
        /// Execute the query and print actual counts beside the estimates
        #[arg(long)]
        check: bool,
    },
    /// Boolean CP decomposition of a loaded graph's tensor
    Decompose {
        alias: String,
        #[arg(long)]
        rank: usize,
        /// Seed for the greedy heuristic (default: TENSORQL_SEED or 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Use the exact unfolding construction instead of the greedy cover
        #[arg(long)]
        naive: bool,
        /// Write factor files (factors.meta, A/B/C.coords) to this directory
        #[arg(long, value_name = "DIR")]
        export: Option<PathBuf>,
    },
    /// Estimate the number of distinct solutions with a k-minimum-values sketch
    EstimateDistinct {
        source: String,
        /// Sketch size (number of minima kept)
        #[arg(long)]
        sketch: usize,
        /// Hash seed (default: TENSORQL_SEED or the built-in constant)
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err.downcast_ref::<Error>() {
                Some(Error::Unsupported(_)) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let session = Session::load(&cli.load)?;
    match cli.command {
        Command::Load { alias, file } => {
            let graph = load_graph(&file)?;
            let (n, m, l) = graph.dims();
            println!(
                "loaded {alias}: dims {n} x {m} x {l}, {} triples",
                graph.nnz()
            );
        }
        Command::Stats { alias } => {
            let graphs = session.graph_set()?;
            let g = graphs.resolve(Some(&alias))?;
            let (n, m, l) = g.dims();
            println!("graph {alias}: dims {n} x {m} x {l}, {} triples", g.nnz());
            println!("sparsity: {}", fmt_float(g.tensor().sparsity()));
            let stats = g.stats();
            let (tp, tq, tr) = stats.totals();
            println!(
                "marginals: P {} nonzeros (total {tp}), Q {} nonzeros (total {tq}), R {} nonzeros (total {tr})",
                stats.p().nnz(),
                stats.q().nnz(),
                stats.r().nnz()
            );
            println!(
                "marginal support: {} <= 3 * {} triples",
                stats.support(),
                g.nnz()
            );
        }
        Command::Query { source, format } => {
            let query = parse_query_source(&source)?;
            let graphs = session.graph_set()?;
            let (outcome, _) = evaluate_traced(&query, &graphs)?;
            print_outcome(&outcome, format)?;
        }
        Command::Explain { source, check } => {
            let query = parse_query_source(&source)?;
            let graphs = session.graph_set()?;
            let query_plan = plan(&query, &graphs)?;
            let actuals = if check {
                let (outcome, trace) = evaluate_traced(&query, &graphs)?;
                Some((outcome, trace))
            } else {
                None
            };
            print_plan(&query_plan, actuals.as_ref().map(|(_, t)| t.as_slice()));
            if let Some((outcome, _)) = &actuals {
                match outcome {
                    QueryOutcome::Solutions(seq) => println!("result: {} solutions", seq.len()),
                    QueryOutcome::Boolean(b) => println!("result: {b}"),
                    QueryOutcome::Graph(g) => println!("result: {} triples", g.nnz()),
                }
            }
        }
        Command::Decompose {
            alias,
            rank,
            seed,
            naive,
            export,
        } => {
            let graphs = session.graph_set()?;
            let g = graphs.resolve(Some(&alias))?;
            let seed = seed.unwrap_or_else(|| env_seed().unwrap_or(0));
            let (factors, report) = if naive {
                let f = naive_decomposition(g.tensor())?;
                let r = verify_sparsity(&f, g.tensor());
                (f, r)
            } else {
                greedy_cp(g.tensor(), &GreedyOptions::new(rank, seed))
            };
            print_report(&alias, &report);
            if let Some(dir) = export {
                export_factors(&dir, &factors, seed)?;
                println!("factors written to {}", dir.display());
            }
        }
        Command::EstimateDistinct {
            source,
            sketch,
            seed,
        } => {
            let query = parse_query_source(&source)?;
            let graphs = session.graph_set()?;
            let QueryForm::Select { projection, .. } = &query.form else {
                anyhow::bail!("estimate-distinct needs a SELECT query");
            };
            // stream the raw (pre-DISTINCT) solution rows through the sketch
            let raw = Query {
                form: QueryForm::Select {
                    projection: projection.clone(),
                    modifier: Modifier::None,
                },
                where_clause: query.where_clause.clone(),
            };
            let (outcome, _) = evaluate_traced(&raw, &graphs)?;
            let QueryOutcome::Solutions(seq) = outcome else {
                unreachable!("SELECT yields solutions");
            };
            let seed = seed.unwrap_or_else(|| env_seed().unwrap_or(DEFAULT_KMV_SEED));
            let mut kmv = KmvSketch::new(sketch, seed)?;
            for row in seq.rows() {
                let mut key = Vec::new();
                for term in row {
                    match term {
                        Some(t) => key.extend_from_slice(t.to_string().as_bytes()),
                        None => key.push(0),
                    }
                    key.push(0x1f);
                }
                kmv.insert_bytes(&key);
            }
            println!("rows seen: {}", seq.len());
            println!(
                "estimated distinct solutions: {}",
                fmt_float(kmv.estimate())
            );
        }
    }
    Ok(())
}

struct Session {
    graphs: Vec<(String, Graph)>,
}

impl Session {
    fn load(specs: &[String]) -> anyhow::Result<Session> {
        let mut graphs = Vec::new();
        for spec in specs {
            let Some((alias, path)) = spec.split_once('=') else {
                anyhow::bail!("--load takes ALIAS=FILE, got `{spec}`");
            };
            let graph = load_graph(&PathBuf::from(path))?;
            graphs.push((alias.to_string(), graph));
        }
        Ok(Session { graphs })
    }

    fn graph_set(&self) -> anyhow::Result<GraphSet<'_>> {
        let mut set = GraphSet::new();
        for (alias, graph) in &self.graphs {
            set.add(alias.clone(), graph)?;
        }
        Ok(set)
    }
}

fn load_graph(path: &PathBuf) -> anyhow::Result<Graph> {
    let file =
        fs::File::open(path).map_err(|e| anyhow::anyhow!("cannot open {}: {e}", path.display()))?;
    Ok(load_ntriples(std::io::BufReader::new(file))?)
}

fn parse_query_source(source: &str) -> anyhow::Result<Query> {
    let text = if source == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        buf
    } else {
        fs::read_to_string(source).map_err(|e| anyhow::anyhow!("cannot read {source}: {e}"))?
    };
    Ok(parse(&text)?)
}

fn env_seed() -> Option<u64> {
    std::env::var("TENSORQL_SEED").ok()?.parse().ok()
}

fn print_outcome(outcome: &QueryOutcome, format: OutputFormat) -> anyhow::Result<()> {
    match outcome {
        QueryOutcome::Solutions(seq) => match format {
            OutputFormat::Tsv => print!("{}", seq.to_tsv()),
            OutputFormat::Jsonl => print!("{}", seq.to_jsonl()),
        },
        QueryOutcome::Boolean(b) => println!("{b}"),
        QueryOutcome::Graph(g) => {
            let mut out = Vec::new();
            write_ntriples(g, &mut out)?;
            print!("{}", String::from_utf8_lossy(&out));
        }
    }
    Ok(())
}

fn print_plan(query_plan: &tensorql_core::query::QueryPlan, actuals: Option<&[usize]>) {
    let n = query_plan.steps.len();
    println!("plan: {n} step{}", if n == 1 { "" } else { "s" });
    for (i, step) in query_plan.steps.iter().enumerate() {
        println!("step {}: {} {} * {}", i + 1, step.op, step.left, step.right);
        if let Some(case) = &step.case {
            println!("  case: {case}");
        }
        if step.op == StepOp::Union {
            println!("  case: solution sequence concatenation");
        }
        if let Some(path) = &step.distinct {
            println!("  {path}");
        }
        if step.op != StepOp::Union {
            match (&step.estimate, &step.no_estimate_reason) {
                (Some(bundle), _) => print_bundle(bundle),
                (None, Some(reason)) => println!("  no estimate: {reason}"),
                (None, None) => println!("  no estimate"),
            }
        }
        if let Some(actuals) = actuals {
            if let Some(actual) = actuals.get(i) {
                println!("  actual: {actual}");
            }
        }
    }
}

fn print_bundle(bundle: &CardBundle) {
    let line = |label: &str, est: &CardEstimate| {
        println!("  {label}: {} (cost {})", fmt_float(est.value), est.cost);
    };
    if let Some(e) = &bundle.exact {
        line("exact", e);
    }
    if let Some(e) = &bundle.cosine_upper {
        line("cosine upper bound", e);
    }
    if let Some(e) = &bundle.lower {
        line("lower bound", e);
    }
    if let Some(e) = &bundle.upper {
        line("upper bound", e);
    }
    if let Some(e) = &bundle.expected_uniform {
        line("expected (uniform density)", e);
    }
    if let Some(e) = &bundle.expected_rank1 {
        line("expected (per-component density)", e);
    }
}

fn print_report(alias: &str, report: &DecompReport) {
    println!(
        "decomposition of {alias}: rank {} (upper bound {})",
        report.rank, report.rank_upper_bound
    );
    println!("exact: {}", report.exact);
    println!("factor nonzeros: {}", report.factor_nnz);
    println!(
        "sparsity: A {} B {} C {} tensor {}",
        fmt_float(report.sparsity_a),
        fmt_float(report.sparsity_b),
        fmt_float(report.sparsity_c),
        fmt_float(report.sparsity_t)
    );
    println!(
        "absolute bound (factor nonzeros <= 3x tensor): {}",
        if report.absolute_bound_holds {
            "holds"
        } else {
            "violated"
        }
    );
    println!(
        "relative bound (factor sparsities sum >= tensor sparsity): {}",
        if report.relative_bound_holds {
            "holds"
        } else {
            "violated"
        }
    );
    println!("irreducible: {}", report.irreducible);
}

/// Renders floats with up to six digits, trimming trailing zeros so integer
/// values print bare.
fn fmt_float(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}
