use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gensupport::engine::{propagate_to_fixpoint, OccMode};
use gensupport::oracle::gac_signature;
use gensupport::search::SearchConfig;
use gensupport::ConstraintSpec;
use gensupport_cli::verify::{Check, Family, Verdict};
use gensupport_cli::{bench, instance, stats, verify};

#[derive(Parser)]
#[command(name = "gensupport", version, about = "Generalized-support propagation solver")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Watched,
    Static,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search an instance file.
    Solve {
        file: PathBuf,
        /// Enumerate every solution instead of stopping at the first.
        #[arg(long)]
        all: bool,
        #[arg(long)]
        node_limit: Option<u64>,
        #[arg(long, value_enum, default_value = "watched")]
        occ_mode: Mode,
        #[arg(long)]
        stats_json: Option<PathBuf>,
        /// Do not print solutions.
        #[arg(long)]
        quiet: bool,
    },
    /// Compare root propagation of each constraint with its GAC signature.
    CheckGac { file: PathBuf },
    /// Run the brute-force oracle over a family of small constraints.
    Verify {
        #[arg(long, value_parser = clap::value_parser!(Family))]
        family: Family,
        #[arg(long)]
        max_vars: usize,
        /// Largest value; element domains are 0..=V, occurrence domains 1..=V.
        #[arg(long)]
        max_val: i64,
        /// Only this check (default: all).
        #[arg(long, value_parser = clap::value_parser!(Check))]
        check: Option<Check>,
    },
    /// Watched against static occurrence propagation on the generated benchmark.
    Bench {
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        copies: usize,
        #[arg(long, value_delimiter = ',', default_value = "100000,1000000")]
        limits: Vec<u64>,
        /// Timed runs per (limit, mode); the median is reported.
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long)]
        report_csv: Option<PathBuf>,
        /// Print the generated instance instead of running it.
        #[arg(long)]
        emit: bool,
    },
}

fn read_instance(path: &PathBuf) -> Result<gensupport::Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    instance::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

fn solve(
    file: PathBuf,
    all: bool,
    node_limit: Option<u64>,
    mode: Mode,
    stats_json: Option<PathBuf>,
    quiet: bool,
) -> Result<ExitCode> {
    let inst = read_instance(&file)?;
    let occ_mode = match mode {
        Mode::Watched => OccMode::Watched,
        Mode::Static => OccMode::Static,
    };
    let cfg = SearchConfig { node_limit, find_all: all, occ_mode, leaf_check: true };
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let s = stats::run(&inst, &cfg, |vals| {
        if !quiet {
            let line: Vec<String> = inst.vars.iter().zip(vals).map(|(v, a)| format!("{v}={a}")).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
    })?;
    writeln!(out, "nodes={} solutions={} limit_hit={} wall_ms={}", s.nodes, s.solutions, s.limit_hit, s.wall_ms)?;
    out.flush()?;
    if let Some(p) = stats_json {
        fs::write(&p, s.to_json() + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn check_gac(file: PathBuf) -> Result<ExitCode> {
    let inst = read_instance(&file)?;
    let mut ok = true;
    for (ci, c) in inst.constraints.iter().enumerate() {
        if matches!(c, ConstraintSpec::Table { .. }) {
            println!("c{ci} table: check-only propagator, skipped");
            continue;
        }
        let scope = c.scope();
        let distinct = scope.distinct().len() == scope.len();
        let gac = gac_signature(c, &inst.signature)?;
        for mode in [OccMode::Watched, OccMode::Static] {
            let fix = propagate_to_fixpoint(std::slice::from_ref(c), &inst.signature, mode)?;
            let agrees = match &fix {
                Some(f) => *f == gac,
                None => !gac.is_nonempty(),
            };
            let verdict = match (agrees, distinct) {
                (true, _) => "gac",
                (false, true) => {
                    ok = false;
                    "NOT GAC"
                }
                (false, false) => "weaker than gac (repeated variables)",
            };
            println!("c{ci} {} [{}]: {verdict}", c.kind(), mode.as_str());
            if !agrees {
                for v in scope.distinct() {
                    let got = fix.as_ref().map(|f| format!("{:?}", f.get(&v).expect("scope var")));
                    println!("    {v}: propagated {} gac {:?}", got.unwrap_or_else(|| "failure".into()), gac.get(&v)?);
                }
            }
        }
    }
    let all = propagate_to_fixpoint(&inst.constraints, &inst.signature, OccMode::Watched)?;
    match all {
        Some(sig) => {
            println!("root fixpoint:");
            for (v, d) in sig.iter() {
                println!("    {v}: {d:?}");
            }
        }
        None => println!("root propagation fails"),
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_verify(family: Family, max_vars: usize, max_val: i64, check: Option<Check>) -> Result<ExitCode> {
    let checks: Vec<Check> = check.map_or_else(|| Check::ALL.to_vec(), |c| vec![c]);
    let outcomes = verify::verify(family, max_vars, max_val, &checks)?;
    let mut failed = 0;
    for o in &outcomes {
        println!("{o}");
        // backtrack stability is a property to report, not a requirement
        if matches!(o.verdict, Verdict::Fail(_)) && o.check != Check::Btstable {
            failed += 1;
        }
    }
    println!("{} results, {} counterexamples to required properties", outcomes.len(), failed);
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

fn run_bench(
    n: usize,
    copies: usize,
    limits: Vec<u64>,
    repeats: usize,
    report_csv: Option<PathBuf>,
    emit: bool,
) -> Result<ExitCode> {
    if n == 0 {
        anyhow::bail!("--n must be at least 1");
    }
    if emit {
        print!("{}", bench::benchmark_text(n, copies));
        return Ok(ExitCode::SUCCESS);
    }
    let rows = bench::bench_compare(n, copies, &limits, repeats)?;
    println!("{:>10} {:>8} {:>10} {:>10} {:>14} {:>14} {:>12}", "limit", "mode", "nodes", "solutions", "occ_calls", "total_calls", "wall_ms");
    for r in &rows {
        println!(
            "{:>10} {:>8} {:>10} {:>10} {:>14} {:>14} {:>12.3}",
            r.limit, r.mode, r.nodes, r.solutions, r.occ_calls, r.total_calls, r.wall_ms
        );
    }
    for pair in rows.chunks(2) {
        println!("limit {}: watched/static time ratio {:.3}", pair[0].limit, pair[0].wall_ms / pair[1].wall_ms);
    }
    if let Some(p) = report_csv {
        let f = fs::File::create(&p).with_context(|| format!("creating {}", p.display()))?;
        bench::write_csv(&rows, f)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match cli.cmd {
        Cmd::Solve { file, all, node_limit, occ_mode, stats_json, quiet } => {
            solve(file, all, node_limit, occ_mode, stats_json, quiet)
        }
        Cmd::CheckGac { file } => check_gac(file),
        Cmd::Verify { family, max_vars, max_val, check } => run_verify(family, max_vars, max_val, check),
        Cmd::Bench { n, copies, limits, repeats, report_csv, emit } => {
            run_bench(n, copies, limits, repeats, report_csv, emit)
        }
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
