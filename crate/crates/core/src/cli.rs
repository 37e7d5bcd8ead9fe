//! Command-line front end.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Read as _, Write as _};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::arena::{Arena, Colour, Player, Strategy};
use crate::baseline::{simulate_lower_bound, verify_solution, zielonka, Verdict};
use crate::pgio::{
    emit_pgsolver, emit_solution, gen_random, gen_ring, parse_pgsolver, parse_solution, Game,
    LiftSummary, SolutionDocument,
};
use crate::solver::{solve, solve_traced, SolveError, SolveOptions, WorklistOrder};
use crate::witness::{count_w, Compression, RuleVariant, UpdateMode, Witness};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_FAILED: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

pub const BENCH_SCHEMA: u32 = 1;
pub const THREADS_ENV: &str = "PARIGRADE_THREADS";

#[derive(Parser, Debug)]
#[command(
    name = "parigrade",
    version,
    about = "Parity games by value iteration over succinct witnesses"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve a PGSolver game and write the solution.
    Solve(SolveArgs),
    /// Generate a game.
    Gen {
        #[command(subcommand)]
        family: GenFamily,
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Check a solution file against a game.
    Verify { game: PathBuf, solution: PathBuf },
    /// Run both solvers over a corpus and cross-check their winners.
    Bench(BenchArgs),
    /// Number of witnesses for `r` relevant colours and length `l`.
    Count { r: u64, l: u64 },
    /// Play Odd's delaying strategy on the lower-bound ring.
    Simulate {
        n: usize,
        #[arg(value_enum, default_value_t = Variant::Calude)]
        variant: Variant,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        /// Write the trace as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum GenFamily {
    Ring {
        n: usize,
    },
    Random {
        n: usize,
        min_outdeg: usize,
        max_outdeg: usize,
        max_colour: Colour,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Qpt,
    Zielonka,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Paper,
    Calude,
}

impl From<Variant> for RuleVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Paper => RuleVariant::ThisPaper,
            Variant::Calude => RuleVariant::CaludeOriginal,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = Variant::Paper)]
    pub mode: Variant,
    #[arg(long)]
    pub no_compress: bool,
    /// Per-edge update cache; a bare flag means `on`.
    #[arg(long, value_enum, default_value_t = Switch::On, num_args = 0..=1, default_missing_value = "on")]
    pub edge_cache: Switch,
    /// Wall-clock limit in seconds.
    #[arg(long, value_parser = parse_timeout)]
    pub timeout: Option<f64>,
    /// Seed for a shuffled worklist; FIFO when absent.
    #[arg(long)]
    pub seed: Option<u64>,
}

impl EngineArgs {
    pub fn options(&self, verify: bool) -> SolveOptions {
        SolveOptions {
            mode: UpdateMode {
                rule: self.mode.into(),
                compression: if self.no_compress {
                    Compression::Off
                } else {
                    Compression::On
                },
            },
            edge_cache: self.edge_cache == Switch::On,
            verify,
            timeout: self.timeout.map(Duration::from_secs_f64),
            order: self
                .seed
                .map_or(WorklistOrder::Fifo, WorklistOrder::Shuffled),
        }
    }
}

fn parse_timeout(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err("timeout must be a positive number of seconds".into())
    }
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    /// Game file, or `-` for standard input.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Algo::Qpt)]
    pub algo: Algo,
    #[command(flatten)]
    pub engine: EngineArgs,
    #[arg(long)]
    pub no_verify: bool,
    /// Log every lift to standard error.
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).multiple(true).args(["inputs", "rings", "random"])))]
pub struct BenchArgs {
    /// Game files, directories of `.pg` files, or manifests listing one path
    /// per line.
    pub inputs: Vec<PathBuf>,
    /// Ring sweep `A..B` (inclusive).
    #[arg(long)]
    pub rings: Option<String>,
    /// Number of seeded random games of `--size` vertices.
    #[arg(long)]
    pub random: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub size: usize,
    #[arg(long, default_value_t = 6)]
    pub max_outdeg: usize,
    #[arg(long, default_value_t = 8)]
    pub max_colour: Colour,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Algo::Qpt, Algo::Zielonka])]
    pub algo: Vec<Algo>,
    #[command(flatten)]
    pub engine: EngineArgs,
    /// Output prefix; writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long, default_value = "bench")]
    pub out: PathBuf,
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args),
        Command::Gen { family, out } => {
            let game = match family {
                GenFamily::Ring { n } => {
                    if n == 0 {
                        return Err("ring size must be at least 1".into());
                    }
                    gen_ring(n)
                }
                GenFamily::Random {
                    n,
                    min_outdeg,
                    max_outdeg,
                    max_colour,
                    seed,
                } => gen_random(n, min_outdeg, max_outdeg, max_colour, seed)
                    .map_err(|e| e.to_string())?,
            };
            write_output(out.as_deref(), &emit_pgsolver(&game))?;
            Ok(EXIT_OK)
        }
        Command::Verify { game, solution } => cmd_verify(&game, &solution),
        Command::Bench(args) => cmd_bench(&args).map(|(_, code)| code),
        Command::Count { r, l } => {
            if r == 0 {
                return Err("r must be at least 1".into());
            }
            println!("{}", count_w(r, l));
            Ok(EXIT_OK)
        }
        Command::Simulate {
            n,
            variant,
            max_steps,
            trace,
            out,
        } => {
            if n == 0 {
                return Err("n must be at least 1".into());
            }
            let t = simulate_lower_bound(n, variant.into(), max_steps);
            if trace {
                for (i, s) in t.steps.iter().enumerate() {
                    println!(
                        "{:>8} {:>4} {}",
                        i + 1,
                        s.vertex,
                        t.space.display(&s.witness)
                    );
                }
            }
            println!(
                "n={} rule={} steps={} reached_top={}",
                n,
                t.rule,
                t.steps.len(),
                t.reached_top
            );
            println!(
                "distinct={} odd_free_visited={}/{} follows_odd_free_order={}",
                t.distinct, t.odd_free_distinct, t.odd_free_total, t.follows_odd_free_order
            );
            for f in t.flags.iter().take(10) {
                println!("flag: {f}");
            }
            if let Some(path) = out {
                write_output(Some(&path), &t.to_csv())?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn read_input(path: &Path) -> Result<String, String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| format!("stdin: {e}"))?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn load_game(path: &Path) -> Result<Game, String> {
    let text = read_input(path)?;
    parse_pgsolver(&text).map_err(|e| format!("{}: {e}", path.display()))
}

/// One strategy column: Even's choice where Even wins, Odd's elsewhere.
fn merge_strategies(winner: &[Player], even: &Strategy, odd: &Strategy) -> Vec<Option<usize>> {
    winner
        .iter()
        .enumerate()
        .map(|(v, w)| match w {
            Player::Even => even.get(v),
            Player::Odd => odd.get(v),
        })
        .collect()
}

fn split_strategies(arena: &Arena, doc: &SolutionDocument) -> (Strategy, Strategy) {
    let n = arena.num_vertices();
    let mut even = Strategy::empty(Player::Even, n);
    let mut odd = Strategy::empty(Player::Odd, n);
    for v in 0..n {
        if let Some(s) = doc.strategy[v] {
            match arena.owner(v) {
                Player::Even => even.set(v, s),
                Player::Odd => odd.set(v, s),
            }
        }
    }
    (even, odd)
}

pub fn cmd_solve(args: &SolveArgs) -> Result<i32, String> {
    let game = match load_game(&args.input) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let arena = &game.arena;
    let verify = !args.no_verify;
    let (winner, even, odd, stats, verdict) = match args.algo {
        Algo::Zielonka => {
            let start = Instant::now();
            let r = zielonka(arena);
            let verdict = verify
                .then(|| verify_solution(arena, &r.winner, &r.even_strategy, &r.odd_strategy));
            let stats = LiftSummary {
                wall_time_secs: start.elapsed().as_secs_f64(),
                ..LiftSummary::default()
            };
            (r.winner, r.even_strategy, r.odd_strategy, stats, verdict)
        }
        Algo::Qpt => {
            let opts = args.engine.options(verify);
            let ids = &game.ids;
            let result = if args.trace {
                let space = crate::witness::WitnessSpace::for_arena(arena, opts.mode);
                let mut log = |v: usize, old: &Witness, new: &Witness| {
                    eprintln!(
                        "lift {} {} -> {}",
                        ids[v],
                        space.display(old),
                        space.display(new)
                    );
                };
                solve_traced(arena, &opts, Some(&mut log))
            } else {
                solve(arena, &opts)
            };
            match result {
                Ok(s) => {
                    if s.fallback_used {
                        eprintln!("warning: even strategy taken from the baseline solver");
                    }
                    let stats = LiftSummary {
                        total_lifts: s.stats.total_lifts,
                        max_vertex_lifts: s.stats.max_vertex_lifts(),
                        wall_time_secs: s.stats.wall_time.as_secs_f64(),
                    };
                    (s.winner, s.even_strategy, s.odd_strategy, stats, s.verdict)
                }
                Err(e @ SolveError::Timeout { .. }) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_TIMEOUT);
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(EXIT_FAILED);
                }
            }
        }
    };
    let doc = SolutionDocument {
        strategy: merge_strategies(&winner, &even, &odd),
        winners: winner,
        stats: Some(stats.clone()),
    };
    write_output(args.out.as_deref(), &emit_solution(&doc, &game))?;
    let even_count = doc.winners.iter().filter(|&&w| w == Player::Even).count();
    eprintln!(
        "even wins {even_count}/{}, lifts {}, max per vertex {}, {:.3}s",
        doc.winners.len(),
        stats.total_lifts,
        stats.max_vertex_lifts,
        stats.wall_time_secs
    );
    match verdict {
        Some(Verdict::Fail(f)) => {
            eprintln!("verification failed: {f}");
            Ok(EXIT_FAILED)
        }
        Some(Verdict::Pass) => {
            eprintln!("verification passed");
            Ok(EXIT_OK)
        }
        None => Ok(EXIT_OK),
    }
}

pub fn cmd_verify(game: &Path, solution: &Path) -> Result<i32, String> {
    let game = match load_game(game) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_INPUT);
        }
    };
    let doc = match read_input(solution)
        .and_then(|t| parse_solution(&t, &game).map_err(|e| e.to_string()))
    {
        Ok(d) => d,
        Err(e) => {
            eprintln!("error: {}: {e}", solution.display());
            return Ok(EXIT_INPUT);
        }
    };
    let (even, odd) = split_strategies(&game.arena, &doc);
    match verify_solution(&game.arena, &doc.winners, &even, &odd) {
        Verdict::Pass => {
            println!("pass");
            Ok(EXIT_OK)
        }
        Verdict::Fail(f) => {
            println!("fail: {f}");
            Ok(EXIT_FAILED)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub colours: usize,
    pub algorithm: Algo,
    pub wall_time_secs: f64,
    pub lifts: Option<u64>,
    /// Truncated SHA-256 of the winner vector; empty on timeout.
    pub verdict_hash: String,
    /// `ok`, `timeout`, `unverified` or `disagree`.
    pub status: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub schema: u32,
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "instance,n,m,colours,algorithm,wall_time_secs,lifts,verdict_hash,status\n",
        );
        for r in &self.rows {
            let algo = match r.algorithm {
                Algo::Qpt => "qpt",
                Algo::Zielonka => "zielonka",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{:.6},{},{},{}",
                r.instance,
                r.n,
                r.m,
                r.colours,
                algo,
                r.wall_time_secs,
                r.lifts.map_or(String::new(), |l| l.to_string()),
                r.verdict_hash,
                r.status
            );
        }
        out
    }

    pub fn disagreements(&self) -> usize {
        self.rows.iter().filter(|r| r.status == "disagree").count()
    }
}

pub fn verdict_hash(winner: &[Player]) -> String {
    let bytes: Vec<u8> = winner.iter().map(|p| b'0' + p.index() as u8).collect();
    Sha256::digest(&bytes)[..8]
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn worker_count() -> usize {
    let hw = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        Some(cap) if cap > 0 => cap.min(hw),
        _ => hw,
    }
}

fn collect_paths(inputs: &[PathBuf]) -> Result<Vec<PathBuf>, String> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| format!("{}: {e}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "pg"))
                .collect();
            files.sort();
            out.extend(files);
        } else if p.extension().is_some_and(|x| x == "pg") {
            out.push(p.clone());
        } else {
            // manifest: one path per line, relative to the manifest
            let text = read_input(p)?;
            let base = p.parent().unwrap_or(Path::new("."));
            for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
                out.push(base.join(line));
            }
        }
    }
    Ok(out)
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: usize = a.parse().map_err(|_| "bad range start")?;
    let b: usize = b.parse().map_err(|_| "bad range end")?;
    if a == 0 || a > b {
        return Err(format!("empty or invalid ring range {s}"));
    }
    Ok((a, b))
}

/// Bench instances named and in report order.
pub fn bench_instances(args: &BenchArgs) -> Result<Vec<(String, Game)>, String> {
    let mut out = Vec::new();
    for path in collect_paths(&args.inputs)? {
        out.push((path.display().to_string(), load_game(&path)?));
    }
    if let Some(r) = &args.rings {
        let (a, b) = parse_range(r)?;
        out.extend((a..=b).map(|n| (format!("ring-{n}"), gen_ring(n))));
    }
    if let Some(count) = args.random {
        let base = args.engine.seed.unwrap_or(0);
        for i in 0..count as u64 {
            let g = gen_random(args.size, 1, args.max_outdeg, args.max_colour, base + i)
                .map_err(|e| e.to_string())?;
            out.push((format!("random-{}-{}", args.size, base + i), g));
        }
    }
    Ok(out)
}

fn bench_one(
    name: &str,
    game: &Game,
    algo: Algo,
    opts: &SolveOptions,
) -> (BenchRow, Option<Vec<Player>>) {
    let arena = &game.arena;
    let start = Instant::now();
    let (winner, lifts, status) = match algo {
        Algo::Zielonka => {
            let r = zielonka(arena);
            let ok = verify_solution(arena, &r.winner, &r.even_strategy, &r.odd_strategy).passed();
            (Some(r.winner), None, if ok { "ok" } else { "unverified" })
        }
        Algo::Qpt => match solve(arena, opts) {
            Ok(s) => {
                let ok = s.verdict.as_ref().is_none_or(Verdict::passed);
                (
                    Some(s.winner),
                    Some(s.stats.total_lifts),
                    if ok { "ok" } else { "unverified" },
                )
            }
            Err(SolveError::Timeout { .. }) => (None, None, "timeout"),
            Err(SolveError::BoundViolated { .. }) => (None, None, "unverified"),
        },
    };
    let row = BenchRow {
        instance: name.to_string(),
        n: arena.num_vertices(),
        m: arena.num_edges(),
        colours: arena.colours().len(),
        algorithm: algo,
        wall_time_secs: start.elapsed().as_secs_f64(),
        lifts,
        verdict_hash: winner.as_deref().map_or(String::new(), verdict_hash),
        status: status.to_string(),
    };
    (row, winner)
}

/// Runs the bench and writes its reports. Exit code 2 when two algorithms
/// disagree on an instance or a solution fails verification.
pub fn cmd_bench(args: &BenchArgs) -> Result<(BenchReport, i32), String> {
    let instances = bench_instances(args)?;
    let opts = args.engine.options(true);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| e.to_string())?;
    let per_instance: Vec<Vec<(BenchRow, Option<Vec<Player>>)>> = pool.install(|| {
        instances
            .par_iter()
            .map(|(name, game)| {
                args.algo
                    .iter()
                    .map(|&a| bench_one(name, game, a, &opts))
                    .collect()
            })
            .collect()
    });
    let mut rows = Vec::new();
    for mut group in per_instance {
        let hashes: Vec<&String> = group
            .iter()
            .filter(|(_, w)| w.is_some())
            .map(|(r, _)| &r.verdict_hash)
            .collect();
        let disagree = hashes.windows(2).any(|w| w[0] != w[1]);
        if disagree {
            for (r, _) in group.iter_mut() {
                r.status = "disagree".into();
            }
        }
        rows.extend(group.into_iter().map(|(r, _)| r));
    }
    let report = BenchReport {
        schema: BENCH_SCHEMA,
        rows,
    };
    let csv = args.out.with_extension("csv");
    let json = args.out.with_extension("json");
    write_output(Some(&csv), &report.to_csv())?;
    let body = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?;
    write_output(Some(&json), &(body + "\n"))?;
    let failed = report
        .rows
        .iter()
        .any(|r| r.status == "disagree" || r.status == "unverified");
    eprintln!(
        "{} rows, {} disagreements; wrote {} and {}",
        report.rows.len(),
        report.disagreements(),
        csv.display(),
        json.display()
    );
    Ok((report, if failed { EXIT_FAILED } else { EXIT_OK }))
}
