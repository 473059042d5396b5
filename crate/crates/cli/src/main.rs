mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use ratpath::cfrac::{best_approx, continued_fraction};
use ratpath::distcmp::DistCmpConstants;
use ratpath::graph::{
    gen_planted_negative_cycle, gen_random, gen_small_diff_chain, parse_graph, parse_tree, serialize_graph,
    serialize_tree_annotated, verify_sssp, CycleWitness, NegativeMode, Verdict, VerifyMode, WeightClass,
    WeightedDigraph,
};
use ratpath::ratnum::{BigRational, WordBudget};
use ratpath::scaling::{eps_feasible_price_with, BellmanFord, ScalingOutcome, ScalingStats};
use ratpath::sssp::{
    cut_dijkstra, dijkstra_nonneg_with, negative_sssp_with, run_seed, NegConfig, NegOutcome, NonnegConfig, Strategy,
};
use ratpath::stats::Snapshot;

/// Exact shortest paths on digraphs with short rational weights.
#[derive(Debug, Parser)]
#[command(name = "ratpath", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Shortest-path tree from a source, or a negative cycle (exit 2).
    Solve(SolveArgs),
    /// Write a generated instance.
    Gen(GenArgs),
    /// Check a tree against an instance (exit 0 valid, 2 invalid).
    Verify(VerifyArgs),
    /// Time the solvers against exact baselines and report counters.
    Bench(bench::BenchArgs),
    /// Best approximations of a rational with a bounded denominator.
    Approx(ApproxArgs),
    /// A 2^-k-feasible price function, or a negative cycle (exit 2).
    Price(PriceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Non-negative solver when every weight is non-negative, else the negative pipeline.
    Auto,
    Nonneg,
    Neg,
}

#[derive(Debug, Clone, Args)]
struct Tuning {
    /// `C` in `K = ⌈C log n⌉`.
    #[arg(long, default_value_t = 2)]
    c_factor: u32,
    /// Cover copies and BFS slack factor.
    #[arg(long, default_value_t = 4)]
    lambda: u32,
    /// Hitting-set oversampling.
    #[arg(long, default_value_t = 2)]
    gamma: u32,
    /// Fan-out bound factor.
    #[arg(long, default_value_t = 64)]
    kappa: u32,
    /// Word size in bits; fitted to the weights when absent.
    #[arg(long)]
    word_bits: Option<u32>,
}

impl Tuning {
    fn consts(&self) -> DistCmpConstants {
        DistCmpConstants { c_factor: self.c_factor, lambda: self.lambda, gamma: self.gamma, kappa: self.kappa }
    }

    fn budget(&self) -> Result<Option<WordBudget>> {
        self.word_bits.map(|b| WordBudget::new(b).map_err(|e| anyhow!("{e}"))).transpose()
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Overrides the instance's `s` line; vertex 0 when neither is given.
    #[arg(long)]
    source: Option<usize>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    mode: Mode,
    /// Comparison strategy of the non-negative solver: exact, distcmp or pairwise.
    #[arg(long, default_value = "distcmp")]
    strategy: Strategy,
    #[arg(long, env = "RATPATH_SEED", default_value_t = 0)]
    seed: u64,
    /// Hop parameter of the negative pipeline; ⌈√n⌉ by default.
    #[arg(long)]
    k: Option<usize>,
    /// Threads for the cut Dijkstra runs of the negative pipeline.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write a counter snapshot here.
    #[arg(long)]
    stats: Option<PathBuf>,
    /// Annotate each tree arc with its distance to this many decimal places.
    #[arg(long)]
    decimal: Option<u32>,
    /// Tree or cycle output; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[command(flatten)]
    tuning: Tuning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// Chained two-path gadgets whose paths differ by a tiny exact gap.
    Smalldiff,
    /// Random simple digraph with non-negative weights.
    Random,
    /// Random graph reweighted by a potential; negative edges, no negative cycle.
    Priced,
    /// Priced graph plus a planted negative cycle.
    Planted,
}

#[derive(Debug, Args)]
struct GenArgs {
    #[arg(value_enum)]
    family: Family,
    #[arg(long, default_value_t = 16)]
    n: usize,
    #[arg(long, default_value_t = 48)]
    m: usize,
    #[arg(long, env = "RATPATH_SEED", default_value_t = 0)]
    seed: u64,
    /// `int:MAX`, `rat:NUM/DEN` or `word:BITS`.
    #[arg(long, default_value = "rat:9/6")]
    weights: String,
    /// Smalldiff: primes below this bound weight each gadget.
    #[arg(long, default_value_t = 6)]
    prime_bound: u64,
    /// Smalldiff: gadgets in series.
    #[arg(long, default_value_t = 1)]
    copies: usize,
    /// Smalldiff: give every gadget its own primes.
    #[arg(long)]
    fresh_primes: bool,
    /// Smalldiff: pad both paths to equal hop length.
    #[arg(long)]
    padding: bool,
    /// Planted: vertices on the negative cycle.
    #[arg(long, default_value_t = 3)]
    cycle_len: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short)]
    tree: PathBuf,
    /// Judge with exact tree distances instead of the comparison structure.
    #[arg(long)]
    exact: bool,
}

#[derive(Debug, Args)]
struct ApproxArgs {
    /// A rational `a/b`.
    value: String,
    /// Denominators stay below `2^bits`.
    #[arg(long, short, default_value_t = 8)]
    bits: u32,
}

#[derive(Debug, Args)]
struct PriceArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, default_value_t = 8)]
    k: u32,
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Result of a command that ran to completion.
enum Outcome {
    Ok,
    /// Negative cycle or invalid tree.
    Rejected,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Solve(a) => cmd_solve(&a),
        Cmd::Gen(a) => cmd_gen(&a),
        Cmd::Verify(a) => cmd_verify(&a),
        Cmd::Bench(a) => bench::cmd_bench(&a).map(|_| Outcome::Ok),
        Cmd::Approx(a) => cmd_approx(&a),
        Cmd::Price(a) => cmd_price(&a),
    };
    match res {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Rejected) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn read_graph(path: &Path) -> Result<WeightedDigraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => std::io::stdout().write_all(text.as_bytes()).context("writing stdout"),
    }
}

fn cycle_text(c: &CycleWitness) -> String {
    let vs: Vec<String> = c.vertices.iter().map(ToString::to_string).collect();
    format!("c {} {}\n", c.weight, vs.join(" "))
}

fn write_stats(path: Option<&Path>, snap: &Snapshot) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, snap.to_string()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn cmd_solve(a: &SolveArgs) -> Result<Outcome> {
    let g = read_graph(&a.input)?;
    if g.n() == 0 {
        bail!("instance has no vertices");
    }
    let s = a.source.or(g.source()).unwrap_or(0);
    if s >= g.n() {
        bail!("source {s} out of range for {} vertices", g.n());
    }
    let mode = match a.mode {
        Mode::Auto if g.has_negative_edge() => Mode::Neg,
        Mode::Auto => Mode::Nonneg,
        m => m,
    };
    let mut snap = Snapshot::new();
    snap.set("mode", if mode == Mode::Nonneg { "nonneg" } else { "neg" });
    snap.set("n", g.n());
    snap.set("m", g.m());
    snap.set("source", s);
    snap.set("seed", a.seed);
    let (result, dist) = if mode == Mode::Nonneg {
        let cfg = NonnegConfig { strategy: a.strategy, seed: a.seed, consts: a.tuning.consts(), budget: a.tuning.budget()? };
        let run = dijkstra_nonneg_with(&g, s, &cfg)?;
        snap.set("budget_bits", run.stats.budget_bits);
        snap.set("heap_inserts", run.stats.heap_inserts);
        snap.set("relaxations", run.stats.relaxations);
        snap.set("comparisons", run.stats.comparisons);
        snap.extend("", run.stats.comparator.iter().map(|(k, v)| (k, *v)));
        let dist = run.result.distances()?;
        (run.result, dist)
    } else {
        let cfg = NegConfig {
            k: a.k,
            gamma: a.tuning.gamma as f64,
            seed: a.seed,
            verify: VerifyMode::Fast,
            consts: a.tuning.consts(),
            budget: a.tuning.budget()?,
        };
        let out = if a.jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(a.jobs).build()?;
            negative_sssp_with(&g, s, &cfg, |ctx, zs| {
                pool.install(|| zs.par_iter().map(|&z| cut_dijkstra(ctx, &g, z, run_seed(cfg.seed, z))).collect())
            })?
        } else {
            negative_sssp_with(&g, s, &cfg, |ctx, zs| {
                zs.iter().map(|&z| cut_dijkstra(ctx, &g, z, run_seed(cfg.seed, z))).collect()
            })?
        };
        let stats = match &out {
            NegOutcome::Tree(run) => &run.stats,
            NegOutcome::NegativeCycle(_, st) => st,
        };
        snap.set("k", stats.k);
        snap.set("budget_bits", stats.budget_bits);
        snap.set("hitting_set", stats.hitting_set);
        snap.set("scaling_iterations", stats.scaling_iterations);
        snap.set("scaling_pruned", stats.scaling_pruned);
        snap.set("heap_inserts_total", stats.heap_inserts_total);
        snap.set("heap_inserts_max", stats.heap_inserts_max);
        snap.set("forced_inserts", stats.forced_inserts);
        snap.set("relaxations", stats.relaxations);
        snap.set("witness_fallbacks", stats.witness_fallbacks);
        snap.extend("", stats.comparator.iter().map(|(k, v)| (k, *v)));
        match out {
            NegOutcome::Tree(run) => (run.result, run.distances),
            NegOutcome::NegativeCycle(c, _) => {
                snap.set("outcome", "negative_cycle");
                write_stats(a.stats.as_deref(), &snap)?;
                emit(a.output.as_deref(), &cycle_text(&c))?;
                eprintln!("negative cycle of weight {} through {} vertices", c.weight, c.vertices.len());
                return Ok(Outcome::Rejected);
            }
        }
    };
    snap.set("outcome", "tree");
    snap.set("reachable", (0..g.n()).filter(|&v| result.is_reachable(v)).count());
    write_stats(a.stats.as_deref(), &snap)?;
    let text = serialize_tree_annotated(&result, a.decimal.map(|d| (d, dist.as_slice())));
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn parse_class(desc: &str) -> Result<WeightClass> {
    let (kind, arg) = desc.split_once(':').ok_or_else(|| anyhow!("weight class `{desc}` needs `kind:arg`"))?;
    let int = |x: &str| x.parse::<u64>().with_context(|| format!("bad number `{x}` in `{desc}`"));
    Ok(match kind {
        "int" => WeightClass::Integer { max: int(arg)? },
        "rat" => {
            let (a, b) = arg.split_once('/').ok_or_else(|| anyhow!("`rat:` needs NUM/DEN"))?;
            WeightClass::Rational { max_num: int(a)?, max_den: int(b)? }
        }
        "word" => WeightClass::Word { bits: int(arg)? as u32 },
        _ => bail!("unknown weight class `{kind}` (int, rat, word)"),
    })
}

fn cmd_gen(a: &GenArgs) -> Result<Outcome> {
    let text = match a.family {
        Family::Smalldiff => {
            let sd = gen_small_diff_chain(a.prime_bound, a.padding, a.copies, a.fresh_primes)?;
            let mut g = sd.graph.clone();
            g.set_source(sd.source)?;
            eprintln!("gap {}", sd.gap());
            eprintln!("distance {} to {}", sd.distance(), sd.target);
            format!("# gap {}\n# target {} distance {}\n{}", sd.gap(), sd.target, sd.distance(), serialize_graph(&g))
        }
        Family::Random | Family::Priced => {
            let mode = if a.family == Family::Random { NegativeMode::None } else { NegativeMode::Priced };
            serialize_graph(&gen_random(a.n, a.m, a.seed, parse_class(&a.weights)?, mode)?)
        }
        Family::Planted => {
            serialize_graph(&gen_planted_negative_cycle(a.n, a.m, a.seed, parse_class(&a.weights)?, a.cycle_len)?)
        }
    };
    emit(a.output.as_deref(), &text)?;
    Ok(Outcome::Ok)
}

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let g = read_graph(&a.input)?;
    let text = fs::read_to_string(&a.tree).with_context(|| format!("reading {}", a.tree.display()))?;
    let tree = parse_tree(&text).with_context(|| format!("parsing {}", a.tree.display()))?;
    let mode = if a.exact { VerifyMode::Exact } else { VerifyMode::Fast };
    // a tree that does not hang together is invalid, not unreadable
    match verify_sssp(&g, &tree, mode) {
        Ok(Verdict::Valid) => {
            println!("valid");
            Ok(Outcome::Ok)
        }
        Ok(Verdict::Invalid { tail, head }) => {
            println!("invalid {tail} {head}");
            Ok(Outcome::Rejected)
        }
        Err(e) => {
            println!("invalid: {e}");
            Ok(Outcome::Rejected)
        }
    }
}

fn cmd_approx(a: &ApproxArgs) -> Result<Outcome> {
    let x: BigRational = a.value.parse().map_err(|e| anyhow!("bad rational `{}`: {e}", a.value))?;
    let ap = best_approx(&x, a.bits)?;
    let cf = continued_fraction(&x);
    let qs: Vec<String> = cf.quotients().iter().map(ToString::to_string).collect();
    println!("value {x}");
    println!("cf {}", qs.join(" "));
    println!("lo {}", ap.lo);
    println!("hi {}", ap.hi);
    println!("exact {}", ap.is_exact());
    Ok(Outcome::Ok)
}

fn cmd_price(a: &PriceArgs) -> Result<Outcome> {
    let g = read_graph(&a.input)?;
    let mut stats = ScalingStats::default();
    let out = eps_feasible_price_with(&g, a.k, &BellmanFord, &mut stats)?;
    let mut snap = Snapshot::new();
    snap.set("k", a.k);
    snap.set("iterations", stats.iterations);
    snap.set("pruned_edges", stats.pruned_edges);
    snap.set("max_abs_price", stats.max_abs_price);
    write_stats(a.stats.as_deref(), &snap)?;
    match out {
        ScalingOutcome::Price(p) => {
            let mut text = format!("k {}\n", a.k);
            for (v, x) in p.0.iter().enumerate() {
                text.push_str(&format!("p {v} {x}\n"));
            }
            emit(a.output.as_deref(), &text)?;
            Ok(Outcome::Ok)
        }
        ScalingOutcome::NegativeCycle(c) => {
            emit(a.output.as_deref(), &cycle_text(&c))?;
            eprintln!("negative cycle of weight {}", c.weight);
            Ok(Outcome::Rejected)
        }
    }
}
