//! Command-line surface: graph generation, solving, verification,
//! benchmarking and the min-plus/APSP reduction demos.
//!
//! Exit codes: 0 ok, 1 usage, 2 verification failure, 3 internal assertion.

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ssrp::graph::{parse_graph, write_graph, ExtDist, WeightFunction};
use ssrp::minplus::{
    apsp_via_minplus, floyd_warshall, minplus_direct, minplus_via_ssrp, parse_matrix, write_matrix,
    FixedRational, MinPlusMatrix,
};
use ssrp::oracle::ssrp_oracle;
use ssrp::random::gnm_reachable;
use ssrp::tree::build_bfs_tree;
use ssrp::{solve_ssrp, RpBackend, SolveConfig};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "ssrp", about = "Single-source replacement paths toolkit")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a random simple directed graph, reachable from vertex 0.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve SSRP and emit the estimate table as TSV plus metrics.
    Solve {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        c: u32,
        #[arg(long, default_value = "sampled")]
        rp_backend: RpBackend,
        #[arg(long)]
        debug_checks: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Metrics JSON-lines path; defaults to `<out>.metrics.jsonl`.
        #[arg(long)]
        metrics: Option<PathBuf>,
    },
    /// Compare a solve TSV against the exact oracle.
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        source: u32,
        #[arg(long)]
        results: PathBuf,
    },
    /// Time the solver across sizes; CSV on stdout or --out.
    Bench {
        /// Comma-separated sizes, e.g. 1024,2048,4096.
        #[arg(long)]
        n: String,
        #[arg(long, default_value_t = 4)]
        avg_degree: usize,
        #[arg(long, default_value_t = 1)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = "sampled")]
        rp_backend: RpBackend,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Min-plus product of two random [1,2) matrices via the SSRP gadget.
    Minplus {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against the direct triple loop; nonzero exit on mismatch.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// APSP of a matrix file by repeated min-plus squaring through the gadget.
    Apsp {
        #[arg(long)]
        matrix: PathBuf,
        /// Compare against Floyd-Warshall; nonzero exit on mismatch.
        #[arg(long)]
        check: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> std::process::ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { 1 } else { 0 };
            return std::process::ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(code)) => std::process::ExitCode::from(code),
        Ok(Err(err)) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<ssrp::Error>() {
                Some(ssrp::Error::Internal(_))
                | Some(ssrp::Error::WeightRequirement(_))
                | Some(ssrp::Error::SamplingBudget) => 3,
                _ => 1,
            };
            std::process::ExitCode::from(code)
        }
        Err(_) => {
            eprintln!("error: internal assertion failed");
            std::process::ExitCode::from(3)
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {path:?}"))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    match cli.cmd {
        Cmd::Gen { n, m, seed, out } => {
            let g = gnm_reachable(n, m, seed)?;
            emit(&out, &write_graph(&g))?;
            Ok(0)
        }
        Cmd::Solve {
            graph,
            source,
            seed,
            c,
            rp_backend,
            debug_checks,
            out,
            metrics,
        } => {
            let text =
                std::fs::read_to_string(&graph).with_context(|| format!("reading {graph:?}"))?;
            let g = parse_graph(&text)?;
            let cfg = SolveConfig {
                c,
                seed,
                rp_backend,
                debug_checks,
            };
            let report = solve_ssrp(&g, source, &cfg)?;
            emit(&out, &report.table.to_tsv())?;
            let metrics_path =
                metrics.or_else(|| out.as_ref().map(|p| p.with_extension("metrics.jsonl")));
            if let Some(path) = metrics_path {
                let mut f = std::fs::File::create(&path)?;
                for node in &report.metrics {
                    writeln!(f, "{}", serde_json::to_string(node)?)?;
                }
            }
            Ok(0)
        }
        Cmd::Verify {
            graph,
            source,
            results,
        } => {
            let text = std::fs::read_to_string(&graph)?;
            let g = parse_graph(&text)?;
            let results = std::fs::read_to_string(&results)?;
            cmd_verify(&g, source, &results)
        }
        Cmd::Bench {
            n,
            avg_degree,
            repeats,
            seed,
            rp_backend,
            out,
        } => {
            let sizes: Vec<usize> = n
                .split(',')
                .map(|tok| tok.trim().parse().context("malformed --n list"))
                .collect::<anyhow::Result<_>>()?;
            let csv = cmd_bench(&sizes, avg_degree, repeats, seed, rp_backend)?;
            emit(&out, &csv)?;
            Ok(0)
        }
        Cmd::Minplus {
            size,
            seed,
            check,
            out,
        } => {
            let (x, y) = random_unit_matrices(size, seed);
            let z = minplus_via_ssrp(&x, &y)?;
            emit(&out, &write_matrix(&z))?;
            if check {
                let reference = minplus_direct(&x, &y)?;
                if z != reference {
                    eprintln!("mismatch against the direct product");
                    return Ok(2);
                }
                eprintln!("minplus check passed: {}x{} identical", size, size);
            }
            Ok(0)
        }
        Cmd::Apsp { matrix, check, out } => {
            let text = std::fs::read_to_string(&matrix)?;
            let m = parse_matrix(&text)?;
            let d = apsp_via_minplus(&m, true)?;
            emit(&out, &write_matrix(&d))?;
            if check {
                if d != floyd_warshall(&m) {
                    eprintln!("mismatch against floyd-warshall");
                    return Ok(2);
                }
                eprintln!("apsp check passed");
            }
            Ok(0)
        }
    }
}

fn cmd_verify(g: &ssrp::Graph, source: u32, results: &str) -> anyhow::Result<u8> {
    if source as usize >= g.n() {
        bail!("source {source} out of range (n = {})", g.n());
    }
    let tree = build_bfs_tree(g, source)?;
    let mut edges: Vec<(u32, u32)> = tree.edges().collect();
    edges.sort_unstable();

    let mut lines = results.lines();
    match lines.next() {
        Some("eu\tev\tx\tdist") => {}
        other => bail!("bad TSV header: {other:?}"),
    }
    let mut table = std::collections::HashMap::new();
    for (no, line) in lines.enumerate() {
        let mut f = line.split('\t');
        let parse_u32 = |tok: Option<&str>| -> anyhow::Result<u32> {
            tok.with_context(|| format!("short row {}", no + 2))?
                .parse()
                .with_context(|| format!("bad field in row {}", no + 2))
        };
        let eu = parse_u32(f.next())?;
        let ev = parse_u32(f.next())?;
        let x = parse_u32(f.next())?;
        let dist = match f.next() {
            Some("inf") => ExtDist::INFINITY,
            Some(tok) => ExtDist::finite(
                tok.parse()
                    .with_context(|| format!("bad dist in row {}", no + 2))?,
            ),
            None => bail!("short row {}", no + 2),
        };
        if table.insert((eu, ev, x), dist).is_some() {
            bail!("duplicate row for ({eu}, {ev}, {x})");
        }
    }

    let w = WeightFunction::infinite(source, g.n());
    let oracle = ssrp_oracle(g, &w, &edges);
    let mut exact = 0u64;
    let mut over = 0u64;
    let mut under = 0u64;
    for (&(eu, ev), row) in edges.iter().zip(&oracle) {
        for (x, &truth) in row.iter().enumerate() {
            let got = match table.get(&(eu, ev, x as u32)) {
                Some(&d) => d,
                None => {
                    eprintln!("coverage gap: missing ({eu}, {ev}, {x})");
                    return Ok(2);
                }
            };
            match got.cmp(&truth) {
                std::cmp::Ordering::Equal => exact += 1,
                std::cmp::Ordering::Greater => over += 1,
                std::cmp::Ordering::Less => {
                    under += 1;
                    eprintln!("UNDERESTIMATE at e=({eu},{ev}) x={x}: {got} < {truth}");
                }
            }
        }
    }
    println!("exact {exact}\noverestimate {over}\nunderestimate {under}");
    Ok(if under > 0 { 2 } else { 0 })
}

fn cmd_bench(
    sizes: &[usize],
    avg_degree: usize,
    repeats: usize,
    seed: u64,
    rp_backend: RpBackend,
) -> anyhow::Result<String> {
    let mut csv = String::from(
        "n,m,repeat,seed,solve_ms,oracle_ms,traversals,work,nodes,max_depth,budget_ok\n",
    );
    for &n in sizes {
        for rep in 0..repeats {
            let inst_seed = seed ^ ((n as u64) << 20) ^ rep as u64;
            let g = gnm_reachable(n, avg_degree * n, inst_seed)?;
            let cfg = SolveConfig {
                seed: inst_seed,
                rp_backend,
                ..Default::default()
            };
            let t0 = std::time::Instant::now();
            let report = solve_ssrp(&g, 0, &cfg)?;
            let solve_ms = t0.elapsed().as_secs_f64() * 1e3;

            let oracle_ms = if n <= 512 {
                let tree = build_bfs_tree(&g, 0)?;
                let edges: Vec<(u32, u32)> = tree.edges().collect();
                let w = WeightFunction::infinite(0, n);
                let t1 = std::time::Instant::now();
                let _ = ssrp_oracle(&g, &w, &edges);
                format!("{:.3}", t1.elapsed().as_secs_f64() * 1e3)
            } else {
                String::new()
            };

            let traversals: u64 = report.metrics.iter().map(|m| m.traversals).sum();
            let work: u64 = report.metrics.iter().map(|m| m.work).sum();
            let max_depth = report.metrics.iter().map(|m| m.depth).max().unwrap_or(0);
            let lnn = (n as f64).ln();
            let budget_ok = report.metrics.iter().all(|m| {
                m.base_case
                    || (m.w_t == m.n_w + 1
                        && m.w_s == m.n_w + 1 + m.b_total
                        && (m.new_queries as f64) <= 40.0 * (m.n_h as f64).powi(2) * lnn)
            }) && ssrp::metrics::level_totals(&report.metrics)
                .iter()
                .all(|&(nh, mh, _)| nh <= 2 * n as u64 && mh <= g.m() as u64)
                && (max_depth as f64) <= 4.0 * (n as f64).log2();
            csv.push_str(&format!(
                "{n},{m},{rep},{inst_seed},{solve_ms:.3},{oracle_ms},{traversals},{work},{nodes},{max_depth},{budget_ok}\n",
                m = g.m(),
                nodes = report.metrics.len(),
            ));
        }
    }
    Ok(csv)
}

/// Two random matrices over [1,2) rationals with short binary fractions.
fn random_unit_matrices(n: usize, seed: u64) -> (MinPlusMatrix, MinPlusMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = |rng: &mut ChaCha8Rng| {
        MinPlusMatrix::from_rows(
            (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if rng.gen_bool(0.25) {
                                FixedRational::INFINITY
                            } else {
                                let bits = rng.gen_range(0..=5u32);
                                let num = rng.gen_range(0..1u64 << bits);
                                FixedRational::from_scaled(
                                    (1u64 << ssrp::minplus::SCALE_BITS)
                                        + (num << (ssrp::minplus::SCALE_BITS - bits)),
                                )
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    };
    let x = gen(&mut rng);
    let y = gen(&mut rng);
    (x, y)
}
