//! Command-line driver for the small-set expansion toolkit.
//!
//! Subcommands cover the full pipeline: instance generation, relaxation
//! solving, separator rounding, exact oracles, the graph reduction, the
//! statistical verification suites, and a benchmark table generator. All
//! randomness descends from `--seed`, every report embeds its resolved
//! configuration, and identical invocations produce byte-identical output
//! regardless of `--threads`.
//!
//! Exit codes: `2` usage or parameter-domain errors, `3` unreadable or
//! malformed instance files, `4` solver non-convergence, `5` every sampled
//! set truncated to empty, `1` other failures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::FromPrimitive;
use serde::Serialize;

use hsse_core::hypergraph::{Graph, Hypergraph, VertexSet};
use hsse_core::io;
use hsse_core::oracle::{
    brute_force_hsse, brute_force_ssve, gen_gap_instance, gen_planted, gen_random_graph,
    gen_random_hypergraph, SizeLaw, MAX_ORACLE_VERTICES,
};
use hsse_core::reductions::{ssve_solve, vertex_to_hypergraph};
use hsse_core::rounding::{solve_hsse, CutReport, RoundingConfig, RoundingError, SCHEMA_VERSION};
use hsse_core::scalar::{ratio_to_f64, Rational};
use hsse_core::sdp::{build_relaxation, solve_with_options, SdpError, SdpSolution, SolverOptions};
use hsse_core::separators::SeparatorVariant;
use hsse_core::verify::{run_suites, VerifyLevel};

const EXIT_USAGE: u8 = 2;
const EXIT_FORMAT: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;
const EXIT_EMPTY: u8 = 5;

/// A failure carrying the exit code it maps to.
struct Failure {
    code: u8,
    msg: String,
}

fn fail(code: u8, msg: impl Into<String>) -> Failure {
    Failure { code, msg: msg.into() }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(
    name = "hsse",
    version,
    about = "Small-set expansion in hypergraphs: SDP relaxation, separator rounding, exact oracles"
)]
struct Cli {
    /// Bound the worker-thread pool (default: one per core). Results are
    /// identical for any value.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate instances in the standard file formats.
    Gen(GenArgs),
    /// Build and solve the relaxation; dump the solution as JSON.
    Sdp(SdpArgs),
    /// Full pipeline: solve the relaxation, round with separator samples.
    Round(RoundArgs),
    /// Exact brute-force optimum (instances up to 24 vertices).
    Oracle(OracleArgs),
    /// Reduce a graph to its closed-neighborhood hypergraph.
    Reduce(ReduceArgs),
    /// Run the statistical verification suites.
    Verify(VerifyArgs),
    /// Ratio tables over a generated corpus (JSON or CSV).
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    /// Word sampler from distance-threshold cuts against random nets.
    L1,
    /// Word sampler from Gaussian-projection Poisson parities.
    L2,
}

impl From<VariantArg> for SeparatorVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::L1 => SeparatorVariant::L1Words,
            VariantArg::L2 => SeparatorVariant::L2Poisson,
        }
    }
}

/// Parse `p/q` or a decimal literal into an exact fraction.
fn parse_fraction(s: &str) -> Result<Rational, String> {
    if let Some((num, den)) = s.split_once('/') {
        let p: i64 = num.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
        let q: i64 = den.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
        if q == 0 {
            return Err(format!("zero denominator in `{s}`"));
        }
        Ok(Rational::new(p, q))
    } else {
        let x: f64 = s.parse().map_err(|_| format!("`{s}` is neither p/q nor a number"))?;
        Rational::from_f64(x).ok_or_else(|| format!("`{s}` is not a finite fraction"))
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(subcommand)]
    kind: GenKind,
}

#[derive(Subcommand)]
enum GenKind {
    /// One hyperedge covering all r vertices (hard at delta = 1/r).
    Gap {
        /// Vertex count (>= 2).
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Independent uniform hyperedges.
    Random {
        /// Vertex count.
        #[arg(long)]
        n: usize,
        /// Hyperedge count.
        #[arg(long)]
        m: usize,
        /// Smallest edge size.
        #[arg(long, default_value_t = 2)]
        arity_lo: usize,
        /// Largest edge size.
        #[arg(long, default_value_t = 4)]
        arity_hi: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clustered instance with a planted sparse structure.
    Planted {
        /// Vertex count.
        #[arg(long)]
        n: usize,
        /// Number of planted clusters.
        #[arg(long, default_value_t = 2)]
        clusters: usize,
        /// Intra-cluster edges per cluster vertex.
        #[arg(long, default_value_t = 1.0)]
        intra: f64,
        /// Cross-cluster edges per instance vertex.
        #[arg(long, default_value_t = 0.25)]
        inter: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Erdős–Rényi random graph (graph format).
    Gnp {
        /// Vertex count.
        #[arg(long)]
        n: usize,
        /// Edge probability.
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SolverArgs {
    /// Solver residual tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Solver iteration budget.
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
}

impl SolverArgs {
    fn options(&self, seed: u64) -> SolverOptions<f64> {
        SolverOptions { tol: self.tol, max_iters: self.max_iters, seed, ..Default::default() }
    }
}

#[derive(Args)]
struct SdpArgs {
    /// Instance file (hypergraph text or JSON).
    file: PathBuf,
    /// Size parameter, e.g. `1/8` or `0.125`.
    #[arg(long, value_parser = parse_fraction)]
    delta: Rational,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoundArgs {
    /// Instance file: hypergraph (text/JSON), or graph text with --graph.
    file: PathBuf,
    /// Size parameter delta in (0, 1/2], e.g. `1/3` or `0.25`.
    #[arg(long, value_parser = parse_fraction)]
    delta: Rational,
    /// Bi-criteria slack eps in (0, 1); returned sets obey |S'| <= (1+eps)*delta*n.
    #[arg(long, value_parser = parse_fraction)]
    eps: Rational,
    /// Separator sampler.
    #[arg(long, value_enum, default_value_t = VariantArg::L2)]
    variant: VariantArg,
    /// Sample budget override (default derives from the probability scale).
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Distortion estimate; attaches the threshold diagnostic to the report.
    #[arg(long)]
    d_star: Option<f64>,
    /// Treat the input as a graph and minimize vertex expansion via the
    /// reduction.
    #[arg(long)]
    graph: bool,
    /// Attach the exact optimum at the relaxed cap (instances with <= 24
    /// vertices).
    #[arg(long)]
    oracle: bool,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    /// Instance file: hypergraph (text/JSON), or graph text with --graph.
    file: PathBuf,
    /// Size cap as a fraction of n, e.g. `1/2`.
    #[arg(long, value_parser = parse_fraction)]
    delta: Rational,
    /// Treat the input as a graph and report vertex-expansion optima.
    #[arg(long)]
    graph: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReduceArgs {
    /// Graph file (text format).
    file: PathBuf,
    /// Emit JSON instead of the text format.
    #[arg(long)]
    json: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Sampling effort: quick (smoke) or full.
    #[arg(long, default_value = "quick")]
    level: VerifyLevel,
    /// Override the per-suite sample count.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct BenchArgs {
    /// Vertex counts of the generated corpus.
    #[arg(long, value_delimiter = ',', default_values_t = vec![8usize, 10, 12])]
    sizes: Vec<usize>,
    /// Instances per size.
    #[arg(long, default_value_t = 3)]
    count: usize,
    #[arg(long, value_parser = parse_fraction, default_value = "1/3")]
    delta: Rational,
    #[arg(long, value_parser = parse_fraction, default_value = "1/2")]
    eps: Rational,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample budget override for each rounding run.
    #[arg(long)]
    budget: Option<usize>,
    /// Experiment-grade solver tolerance.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 50_000)]
    max_iters: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if threads == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(EXIT_USAGE);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Sdp(args) => run_sdp(args),
        Command::Round(args) => run_round(args),
        Command::Oracle(args) => run_oracle(args),
        Command::Reduce(args) => run_reduce(args),
        Command::Verify(args) => run_verify(args),
        Command::Bench(args) => run_bench(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

/// Write to `out` or stdout; content is expected to end with a newline.
fn emit(out: &Option<PathBuf>, content: &str) -> CmdResult {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| fail(1, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| fail(1, format!("cannot serialize report: {e}")))?;
    text.push('\n');
    emit(out, &text)
}

fn read_instance_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_FORMAT, format!("cannot read {}: {e}", path.display())))
}

fn load_hypergraph(path: &Path) -> Result<Hypergraph, Failure> {
    let text = read_instance_file(path)?;
    io::parse_hypergraph_auto(&text)
        .map_err(|e| fail(EXIT_FORMAT, format!("{}: {e}", path.display())))
}

fn load_graph(path: &Path) -> Result<Graph, Failure> {
    let text = read_instance_file(path)?;
    io::parse_graph_text(&text).map_err(|e| fail(EXIT_FORMAT, format!("{}: {e}", path.display())))
}

fn usage_if<E: std::fmt::Display>(e: E) -> Failure {
    fail(EXIT_USAGE, e.to_string())
}

fn rounding_failure(e: RoundingError) -> Failure {
    let code = match &e {
        RoundingError::BadEps { .. }
        | RoundingError::BadDelta { .. }
        | RoundingError::NoValidTarget { .. } => EXIT_USAGE,
        RoundingError::AllSamplesEmpty { .. } => EXIT_EMPTY,
        RoundingError::Sdp(inner) => return sdp_failure_ref(inner, e.to_string()),
        RoundingError::Embedding(_) | RoundingError::Separator(_) | RoundingError::Hypergraph(_) => 1,
    };
    fail(code, e.to_string())
}

fn sdp_failure_ref(e: &SdpError, msg: String) -> Failure {
    let code = match e {
        SdpError::BadDelta(_) | SdpError::DegenerateCap { .. } => EXIT_USAGE,
        SdpError::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        SdpError::EmptySet | SdpError::SetTooLarge { .. } => 1,
    };
    fail(code, msg)
}

fn run_gen(args: GenArgs) -> CmdResult {
    match args.kind {
        GenKind::Gap { r, seed, out } => {
            let (h, delta) = gen_gap_instance(r).map_err(usage_if)?;
            let comments = vec![
                format!("generator: gap r={r} (hard at delta = {delta})"),
                format!("seed: {seed}"),
            ];
            emit(&out, &io::write_hypergraph_text(&h, &comments))
        }
        GenKind::Random { n, m, arity_lo, arity_hi, seed, out } => {
            if arity_lo == 0 || arity_lo > arity_hi {
                return Err(fail(EXIT_USAGE, "need 1 <= arity-lo <= arity-hi"));
            }
            let law = if arity_lo == arity_hi {
                SizeLaw::Constant(arity_lo)
            } else {
                SizeLaw::Uniform { lo: arity_lo, hi: arity_hi }
            };
            let h = gen_random_hypergraph(n, m, law, seed).map_err(usage_if)?;
            let comments = vec![
                format!("generator: random n={n} m={m} arity={arity_lo}..={arity_hi}"),
                format!("seed: {seed}"),
            ];
            emit(&out, &io::write_hypergraph_text(&h, &comments))
        }
        GenKind::Planted { n, clusters, intra, inter, seed, out } => {
            let inst = gen_planted(n, clusters, intra, inter, seed).map_err(usage_if)?;
            let mut comments = vec![
                format!("generator: planted n={n} clusters={clusters} intra={intra} inter={inter}"),
                format!("seed: {seed}"),
            ];
            for (i, c) in inst.clusters.iter().enumerate() {
                comments.push(format!(
                    "cluster {i}: {}",
                    c.members().iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
                ));
            }
            emit(&out, &io::write_hypergraph_text(&inst.hypergraph, &comments))
        }
        GenKind::Gnp { n, p, seed, out } => {
            let g = gen_random_graph(n, p, seed).map_err(usage_if)?;
            let comments =
                vec![format!("generator: gnp n={n} p={p}"), format!("seed: {seed}")];
            emit(&out, &io::write_graph_text(&g, &comments))
        }
    }
}

#[derive(Serialize)]
struct SdpDump {
    schema_version: u32,
    n: usize,
    num_edges: usize,
    delta: Rational,
    solution: SdpSolution<f64>,
}

fn run_sdp(args: SdpArgs) -> CmdResult {
    let h = load_hypergraph(&args.file)?;
    let spec = build_relaxation(&h, args.delta).map_err(|e| sdp_failure_ref(&e, e.to_string()))?;
    let sol = solve_with_options(&spec, &args.solver.options(args.seed))
        .map_err(|e| sdp_failure_ref(&e, e.to_string()))?;
    let dump = SdpDump {
        schema_version: SCHEMA_VERSION,
        n: h.num_vertices(),
        num_edges: h.num_edges(),
        delta: args.delta,
        solution: sol,
    };
    emit_json(&args.out, &dump)
}

/// Attach the exact optimum at the relaxed cap `(1+ε)δ` to a report.
fn attach_oracle(report: &mut CutReport, h: &Hypergraph, cfg: &RoundingConfig) -> CmdResult {
    use num_traits::One;
    let relaxed = (Rational::one() + cfg.eps) * cfg.delta;
    let (_, optimum) = brute_force_hsse(h, relaxed).map_err(usage_if)?;
    report.oracle_optimum = Some(optimum);
    Ok(())
}

fn run_round(args: RoundArgs) -> CmdResult {
    let mut cfg = RoundingConfig::new(args.delta, args.eps, args.variant.into(), args.seed)
        .map_err(rounding_failure)?;
    cfg.budget = args.budget;
    cfg.d_star = args.d_star;
    let solver = args.solver.options(args.seed);

    if args.graph {
        let g = load_graph(&args.file)?;
        let mut report = ssve_solve(&g, &cfg, &solver).map_err(rounding_failure)?;
        if args.oracle {
            attach_oracle(&mut report.cut, &vertex_to_hypergraph(&g), &cfg)?;
        }
        emit_json(&args.out, &report)
    } else {
        let h = load_hypergraph(&args.file)?;
        let mut report = solve_hsse(&h, &cfg, &solver).map_err(rounding_failure)?;
        if args.oracle {
            attach_oracle(&mut report, &h, &cfg)?;
        }
        emit_json(&args.out, &report)
    }
}

#[derive(Serialize)]
struct HsseOracleDump {
    schema_version: u32,
    n: usize,
    num_edges: usize,
    delta_cap: Rational,
    minimizer: VertexSet,
    optimum: Rational,
    optimum_value: f64,
}

#[derive(Serialize)]
struct SsveOracleDump {
    schema_version: u32,
    n: usize,
    num_edges: usize,
    delta_cap: Rational,
    minimizer: VertexSet,
    vertex_expansion_optimum: Rational,
    vertex_expansion_optimum_value: f64,
    symmetric_optimum: Rational,
    symmetric_optimum_value: f64,
}

fn run_oracle(args: OracleArgs) -> CmdResult {
    if args.graph {
        let g = load_graph(&args.file)?;
        let (set, phi_v, phi_sym) = brute_force_ssve(&g, args.delta).map_err(usage_if)?;
        let dump = SsveOracleDump {
            schema_version: SCHEMA_VERSION,
            n: g.num_vertices(),
            num_edges: g.num_edges(),
            delta_cap: args.delta,
            minimizer: set,
            vertex_expansion_optimum: phi_v,
            vertex_expansion_optimum_value: ratio_to_f64(phi_v),
            symmetric_optimum: phi_sym,
            symmetric_optimum_value: ratio_to_f64(phi_sym),
        };
        emit_json(&args.out, &dump)
    } else {
        let h = load_hypergraph(&args.file)?;
        let (set, phi) = brute_force_hsse(&h, args.delta).map_err(usage_if)?;
        let dump = HsseOracleDump {
            schema_version: SCHEMA_VERSION,
            n: h.num_vertices(),
            num_edges: h.num_edges(),
            delta_cap: args.delta,
            minimizer: set,
            optimum: phi,
            optimum_value: ratio_to_f64(phi),
        };
        emit_json(&args.out, &dump)
    }
}

fn run_reduce(args: ReduceArgs) -> CmdResult {
    let g = load_graph(&args.file)?;
    let h = vertex_to_hypergraph(&g);
    if args.json {
        emit(&args.out, &(io::write_hypergraph_json(&h) + "\n"))
    } else {
        let comments = vec![format!(
            "reduced from a graph on {} vertices: one closed-neighborhood edge per vertex",
            g.num_vertices()
        )];
        emit(&args.out, &io::write_hypergraph_text(&h, &comments))
    }
}

fn run_verify(args: VerifyArgs) -> CmdResult {
    let report = run_suites(args.level, args.samples, args.seed)
        .map_err(|e| fail(1, format!("verification could not run: {e}")))?;
    let pass = report.pass;
    emit_json(&args.out, &report)?;
    if pass {
        Ok(())
    } else {
        Err(fail(1, "one or more verification suites failed (see report)"))
    }
}

#[derive(Serialize)]
struct BenchRow {
    n: usize,
    edges: usize,
    instance_seed: u64,
    variant: SeparatorVariant,
    /// `ok`, `nonconverged`, or `all_samples_empty`.
    status: &'static str,
    sdpcost: Option<f64>,
    set_size: Option<usize>,
    expansion: Option<f64>,
    /// Exact optimum at the target cap δ (instances small enough to
    /// enumerate).
    oracle_optimum: Option<f64>,
    /// Exact optimum at the relaxed cap (1+ε)δ.
    oracle_relaxed_optimum: Option<f64>,
    /// `φ(S') / φ*_δ`; absent when the optimum is zero or unknown.
    ratio_vs_oracle: Option<f64>,
    ratio_vs_sdp: Option<f64>,
    /// `φ*_{(1+ε)δ} ≤ φ(S')` (the guarantee the pipeline promises).
    bicriteria_ok: Option<bool>,
}

#[derive(Serialize)]
struct BenchTable {
    schema_version: u32,
    delta: Rational,
    eps: Rational,
    seed: u64,
    budget: Option<usize>,
    rows: Vec<BenchRow>,
}

fn run_bench(args: BenchArgs) -> CmdResult {
    if args.count == 0 || args.sizes.is_empty() {
        return Err(fail(EXIT_USAGE, "bench needs at least one size and --count >= 1"));
    }
    let mut rows = Vec::new();
    for (si, &n) in args.sizes.iter().enumerate() {
        for k in 0..args.count {
            let instance_seed = args.seed.wrapping_add((si * args.count + k) as u64);
            let h = gen_random_hypergraph(n, 2 * n, SizeLaw::Uniform { lo: 2, hi: 4 }, instance_seed)
                .map_err(usage_if)?;
            let oracle = if n <= MAX_ORACLE_VERTICES {
                use num_traits::One;
                let relaxed = (Rational::one() + args.eps) * args.delta;
                let at_delta = brute_force_hsse(&h, args.delta).map_err(usage_if)?.1;
                let at_relaxed = brute_force_hsse(&h, relaxed).map_err(usage_if)?.1;
                Some((at_delta, at_relaxed))
            } else {
                None
            };
            for variant in [VariantArg::L1, VariantArg::L2] {
                let mut cfg =
                    RoundingConfig::new(args.delta, args.eps, variant.into(), instance_seed)
                        .map_err(rounding_failure)?;
                cfg.budget = args.budget;
                let solver = SolverOptions {
                    tol: args.tol,
                    max_iters: args.max_iters,
                    seed: instance_seed,
                    ..Default::default()
                };
                let row = match solve_hsse(&h, &cfg, &solver) {
                    Ok(report) => bench_row(n, &h, instance_seed, variant.into(), &report, oracle),
                    Err(RoundingError::Sdp(SdpError::NonConvergence { .. })) => BenchRow {
                        n,
                        edges: h.num_edges(),
                        instance_seed,
                        variant: variant.into(),
                        status: "nonconverged",
                        sdpcost: None,
                        set_size: None,
                        expansion: None,
                        oracle_optimum: oracle.map(|(d, _)| ratio_to_f64(d)),
                        oracle_relaxed_optimum: oracle.map(|(_, r)| ratio_to_f64(r)),
                        ratio_vs_oracle: None,
                        ratio_vs_sdp: None,
                        bicriteria_ok: None,
                    },
                    Err(RoundingError::AllSamplesEmpty { .. }) => BenchRow {
                        n,
                        edges: h.num_edges(),
                        instance_seed,
                        variant: variant.into(),
                        status: "all_samples_empty",
                        sdpcost: None,
                        set_size: None,
                        expansion: None,
                        oracle_optimum: oracle.map(|(d, _)| ratio_to_f64(d)),
                        oracle_relaxed_optimum: oracle.map(|(_, r)| ratio_to_f64(r)),
                        ratio_vs_oracle: None,
                        ratio_vs_sdp: None,
                        bicriteria_ok: None,
                    },
                    Err(other) => return Err(rounding_failure(other)),
                };
                rows.push(row);
            }
        }
    }
    let table = BenchTable {
        schema_version: SCHEMA_VERSION,
        delta: args.delta,
        eps: args.eps,
        seed: args.seed,
        budget: args.budget,
        rows,
    };
    match args.format {
        FormatArg::Json => emit_json(&args.out, &table),
        FormatArg::Csv => emit(&args.out, &bench_csv(&table)),
    }
}

fn bench_row(
    n: usize,
    h: &Hypergraph,
    instance_seed: u64,
    variant: SeparatorVariant,
    report: &CutReport,
    oracle: Option<(Rational, Rational)>,
) -> BenchRow {
    use num_traits::Zero;
    let ratio_vs_oracle = oracle.and_then(|(at_delta, _)| {
        (!at_delta.is_zero()).then(|| report.expansion_value / ratio_to_f64(at_delta))
    });
    let bicriteria_ok = oracle.map(|(_, at_relaxed)| at_relaxed <= report.expansion);
    BenchRow {
        n,
        edges: h.num_edges(),
        instance_seed,
        variant,
        status: "ok",
        sdpcost: Some(report.sdpcost),
        set_size: Some(report.set_size),
        expansion: Some(report.expansion_value),
        oracle_optimum: oracle.map(|(d, _)| ratio_to_f64(d)),
        oracle_relaxed_optimum: oracle.map(|(_, r)| ratio_to_f64(r)),
        ratio_vs_oracle,
        ratio_vs_sdp: report.ratio_vs_sdp,
        bicriteria_ok,
    }
}

fn bench_csv(table: &BenchTable) -> String {
    fn opt<T: std::fmt::Display>(v: &Option<T>) -> String {
        v.as_ref().map(|x| x.to_string()).unwrap_or_default()
    }
    let mut out = String::from(
        "n,edges,instance_seed,variant,status,sdpcost,set_size,expansion,\
         oracle_optimum,oracle_relaxed_optimum,ratio_vs_oracle,ratio_vs_sdp,bicriteria_ok\n",
    );
    for r in &table.rows {
        let variant = match r.variant {
            SeparatorVariant::L1Words => "l1_words",
            SeparatorVariant::L2Poisson => "l2_poisson",
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.edges,
            r.instance_seed,
            variant,
            r.status,
            opt(&r.sdpcost),
            opt(&r.set_size),
            opt(&r.expansion),
            opt(&r.oracle_optimum),
            opt(&r.oracle_relaxed_optimum),
            opt(&r.ratio_vs_oracle),
            opt(&r.ratio_vs_sdp),
            opt(&r.bicriteria_ok),
        )
        .expect("writing to a String cannot fail");
    }
    out
}
