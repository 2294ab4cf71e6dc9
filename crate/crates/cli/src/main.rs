//! `dagrel`: estimate, exactly compute, generate, validate, and reduce
//! s-t reliability instances on DAGs.
//!
//! Exit codes: 0 success, 1 usage/parse error, 2 refusal (cap or preset),
//! 3 validation failure, 4 crashed estimation run.

use clap::{Parser, Subcommand};
use dag_reliability::bitset::BitSet;
use dag_reliability::config::Config;
use dag_reliability::exact::{exact_reliability, ExactCtx, DEFAULT_EDGE_CAP};
use dag_reliability::instance::{preprocess, Instance, Preprocessed};
use dag_reliability::reductions::{
    bis_to_unreliability, count_accepting_strings, count_disconnected_subsets_bruteforce,
    count_independent_sets_bruteforce, dag_to_nfa, exact_vertex_reliability,
    vertex_to_edge_failures, SplitMode,
};
use dag_reliability::{fpras, generate, io as instfile, validate};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

const EXIT_USAGE: u8 = 1;
const EXIT_REFUSAL: u8 = 2;
const EXIT_VALIDATION: u8 = 3;
const EXIT_CRASH: u8 = 4;

/// Largest per-vertex sample budget the estimator will allocate.
const SAMPLE_BUDGET_CAP: u64 = 10_000_000;

#[derive(Parser)]
#[command(name = "dagrel", about = "s-t reliability in DAGs: estimation, exact oracles, reductions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Estimate s-t reliability with the sampling-based scheme.
    Estimate {
        file: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "scaled" (desk-scale constants) or "paper" (the published
        /// constants; refused when the budget is unallocatable).
        #[arg(long, default_value = "scaled")]
        preset: String,
        /// Also write the report to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact reliability by brute-force enumeration (small instances).
    Exact {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EDGE_CAP)]
        cap: usize,
    },
    /// Generate benchmark instances.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
    },
    /// Run a statistical validation suite against the exact oracles.
    Validate {
        /// estimator | sampler | reductions | end2end
        suite: String,
        /// Trials per experiment (suite-specific default when omitted).
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a reduction artifact (with verification when caps permit).
    Reduce {
        /// nfa | bis | vertex2edge
        kind: String,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// vertex2edge: replace never-failing edges by k-bundles of this q.
        #[arg(long)]
        bundle_k: Option<usize>,
        #[arg(long, default_value_t = 0.5)]
        bundle_q: f64,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// Chain of k diamonds in series.
    DiamondChain {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fully connected layers between s and t.
    Layered {
        #[arg(long, default_value_t = 2)]
        layers: usize,
        #[arg(long, default_value_t = 2)]
        width: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Disjoint parallel s-t paths.
    SeriesParallel {
        #[arg(long, default_value_t = 2)]
        series: usize,
        #[arg(long, default_value_t = 2)]
        parallel: usize,
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded random DAG over a fixed vertex order.
    RandomDag {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 0.4)]
        density: f64,
        #[arg(long, default_value_t = 0.2)]
        q_lo: f64,
        #[arg(long, default_value_t = 0.8)]
        q_hi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Keep instances where s cannot reach t.
        #[arg(long)]
        allow_trivial: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successes, not usage errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.cmd {
        Cmd::Estimate { file, eps, seed, preset, out } => cmd_estimate(file, eps, seed, &preset, out),
        Cmd::Exact { file, cap } => cmd_exact(file, cap),
        Cmd::Gen { kind } => cmd_gen(kind),
        Cmd::Validate { suite, trials, seed } => cmd_validate(&suite, trials, seed),
        Cmd::Reduce { kind, file, out, bundle_k, bundle_q } => {
            cmd_reduce(&kind, file, out, bundle_k, bundle_q)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| fail(EXIT_USAGE, format!("cannot read {}: {e}", path.display())))
}

fn write_artifact(out: Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(&path, content)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_instance(path: &PathBuf, eps: f64) -> Result<Preprocessed, Failure> {
    let text = read_file(path)?;
    let raw = instfile::parse_instance(&text)
        .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    preprocess(&raw, eps).map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn whole_exact(inst: &Instance, cap: usize) -> Result<f64, Failure> {
    let ctx = ExactCtx::new(&inst.dag, &inst.q, inst.t);
    let v = BitSet::full(inst.vertex_count());
    let e = BitSet::full(inst.edge_count());
    let l = BitSet::singleton(inst.vertex_count(), inst.s);
    exact_reliability(ctx, &v, &e, &l, cap).map_err(|e| fail(EXIT_REFUSAL, e.to_string()))
}

fn cmd_estimate(
    file: PathBuf,
    eps: f64,
    seed: u64,
    preset: &str,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let started = Instant::now();
    let pre = load_instance(&file, eps)?;
    let mut report = String::new();
    report.push_str(&format!("file={}\n", file.display()));
    report.push_str(&format!("preset={preset}\n"));
    report.push_str(&format!("eps={eps}\n"));
    report.push_str(&format!("seed={seed}\n"));

    let inst = match pre {
        Preprocessed::TrivialZero => {
            report.push_str("trivial_zero=true\nestimate=0\ncrash=none\n");
            finish_estimate(report, out, started)?;
            return Ok(());
        }
        Preprocessed::Ready(inst) => inst,
    };
    let (n, m) = (inst.vertex_count(), inst.edge_count());
    report.push_str(&format!("n={n}\nm={m}\n"));

    let config = match preset {
        "scaled" => Config::scaled(),
        "paper" => {
            let cfg = Config::paper(n as u64, m as u64, eps)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            let ell = cfg.per_vertex_samples();
            if ell > SAMPLE_BUDGET_CAP {
                return Err(fail(
                    EXIT_REFUSAL,
                    format!(
                        "paper preset needs l={ell} samples per vertex \
                         (B={}, l1={}, l2={}), beyond the {SAMPLE_BUDGET_CAP}-sample budget; \
                         use --preset scaled",
                        cfg.block_count, cfg.round1_len, cfg.ell2
                    ),
                ));
            }
            cfg
        }
        other => return Err(fail(EXIT_USAGE, format!("unknown preset `{other}`"))),
    };

    let run = fpras::run(&inst, &config, seed);
    report.push_str(&format!("estimate={}\n", run.estimate));
    match run.crash {
        None => report.push_str("crash=none\n"),
        Some((v, kind)) => report.push_str(&format!("crash={kind}@vertex{v}\n")),
    }
    report.push_str(&format!(
        "memo.entries={}\nmemo.computed={}\nmemo.hits={}\nmemo.duplicates={}\n",
        run.memo_entries, run.memo_computed, run.memo_hits, run.memo_duplicates
    ));
    for v in &run.vertices {
        report.push_str(&format!(
            "vertex.{}.estimate={}\nvertex.{}.trajectories={}\nvertex.{}.rejections={}\n",
            v.vertex, v.estimate, v.vertex, v.trajectories, v.vertex, v.rejections
        ));
    }
    let crashed = run.crashed();
    finish_estimate(report, out, started)?;
    if crashed {
        return Err(fail(EXIT_CRASH, "estimation run crashed; reported estimate is 0"));
    }
    Ok(())
}

fn finish_estimate(
    mut report: String,
    out: Option<PathBuf>,
    started: Instant,
) -> Result<(), Failure> {
    // Timing lives in its own trailing section so the section above is
    // byte-identical across repeated runs.
    print!("{report}");
    println!("# timing");
    println!("timing.total_ms={}", started.elapsed().as_millis());
    if let Some(path) = out {
        report.push_str("# timing omitted in file output\n");
        std::fs::write(&path, report)
            .map_err(|e| fail(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_exact(file: PathBuf, cap: usize) -> Result<(), Failure> {
    let pre = load_instance(&file, 0.5)?;
    match pre {
        Preprocessed::TrivialZero => {
            println!("trivial_zero=true");
            println!("exact=0");
        }
        Preprocessed::Ready(inst) => {
            let r = whole_exact(&inst, cap)?;
            println!("n={}", inst.vertex_count());
            println!("m={}", inst.edge_count());
            println!("exact={r:.14e}");
        }
    }
    Ok(())
}

fn cmd_gen(kind: GenKind) -> Result<(), Failure> {
    let (raw, out) = match kind {
        GenKind::DiamondChain { k, q, out } => (generate::diamond_chain(k, q), out),
        GenKind::Layered { layers, width, q, out } => (generate::layered(layers, width, q), out),
        GenKind::SeriesParallel { series, parallel, q, out } => {
            (generate::series_parallel(series, parallel, q), out)
        }
        GenKind::RandomDag { n, density, q_lo, q_hi, seed, allow_trivial, out } => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            (generate::random_dag(n, density, q_lo, q_hi, allow_trivial, &mut rng), out)
        }
    };
    write_artifact(out, &instfile::render_instance(&raw))
}

fn cmd_validate(suite: &str, trials: Option<u64>, seed: u64) -> Result<(), Failure> {
    let report = match suite {
        "estimator" => validate::estimator_suite(seed, trials.unwrap_or(100_000), 20),
        "sampler" => validate::sampler_suite(seed, trials.unwrap_or(100_000), 10),
        "reductions" => validate::reductions_suite(seed, trials.unwrap_or(50) as usize),
        "end2end" => validate::end2end_suite(seed, trials.unwrap_or(100)),
        other => return Err(fail(EXIT_USAGE, format!("unknown suite `{other}`"))),
    };
    print!("{}", report.render());
    if !report.passed() {
        return Err(fail(EXIT_VALIDATION, format!("suite {suite} failed")));
    }
    Ok(())
}

fn cmd_reduce(
    kind: &str,
    file: PathBuf,
    out: Option<PathBuf>,
    bundle_k: Option<usize>,
    bundle_q: f64,
) -> Result<(), Failure> {
    match kind {
        "nfa" => {
            let inst = match load_instance(&file, 0.5)? {
                Preprocessed::TrivialZero => {
                    return Err(fail(EXIT_REFUSAL, "s cannot reach t; no automaton to build"))
                }
                Preprocessed::Ready(inst) => inst,
            };
            let m = inst.edge_count();
            let nfa = dag_to_nfa(&inst.dag);
            write_artifact(out, &dag_reliability::reductions::render_nfa(&nfa))?;
            let uniform_half = inst.q.iter().all(|&q| q == 0.5);
            if !uniform_half {
                println!("verification=skipped (q not uniformly 1/2)");
            } else if m <= 10 {
                let count = count_accepting_strings(&nfa, m + 1)
                    .map_err(|e| fail(EXIT_REFUSAL, e.to_string()))?;
                let r = whole_exact(&inst, DEFAULT_EDGE_CAP)?;
                let expected = (r * (1u64 << m) as f64).round() as u128;
                if count != expected {
                    return Err(fail(
                        EXIT_VALIDATION,
                        format!("accepting({})={count} != {expected}", m + 1),
                    ));
                }
                println!("verification=accepting({})={count} == {expected}", m + 1);
            } else {
                println!("verification=skipped (m={m} above cap)");
            }
        }
        "bis" => {
            let text = read_file(&file)?;
            let g = instfile::parse_bipartite(&text)
                .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", file.display())))?;
            let d = bis_to_unreliability(&g).map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
            write_artifact(out, &instfile::render_vertex_instance(&d))?;
            if g.left + g.right <= 20 {
                let is = count_independent_sets_bruteforce(&g)
                    .map_err(|e| fail(EXIT_REFUSAL, e.to_string()))?;
                let disc = count_disconnected_subsets_bruteforce(&d)
                    .map_err(|e| fail(EXIT_REFUSAL, e.to_string()))?;
                if is != disc {
                    return Err(fail(EXIT_VALIDATION, format!("IS={is} != disconnected={disc}")));
                }
                println!("verification=IS={is} == disconnected={disc}");
            } else {
                println!("verification=skipped (above cap)");
            }
        }
        "vertex2edge" => {
            let text = read_file(&file)?;
            let d = instfile::parse_vertex_instance(&text)
                .map_err(|e| fail(EXIT_USAGE, format!("{}: {e}", file.display())))?;
            let mode = match bundle_k {
                Some(k) => SplitMode::Bundle { k, q: bundle_q },
                None => SplitMode::KeepZero,
            };
            let raw = vertex_to_edge_failures(&d, mode);
            write_artifact(out, &instfile::render_instance(&raw))?;
            let small = d.n <= 12 && raw.edges.len() <= 64;
            if !small {
                println!("verification=skipped (above cap)");
                return Ok(());
            }
            let truth =
                exact_vertex_reliability(&d).map_err(|e| fail(EXIT_REFUSAL, e.to_string()))?;
            let got = match preprocess(&raw, 0.5)
                .map_err(|e| fail(EXIT_USAGE, e.to_string()))?
            {
                Preprocessed::TrivialZero => 0.0,
                Preprocessed::Ready(inst) => whole_exact(&inst, DEFAULT_EDGE_CAP)?,
            };
            let tol = match mode {
                SplitMode::KeepZero => 1e-12,
                SplitMode::Bundle { k, q } => {
                    d.edges.len() as f64 * q.powi(k as i32) + 1e-12
                }
            };
            if (got - truth).abs() > tol {
                return Err(fail(
                    EXIT_VALIDATION,
                    format!("reliability {got} differs from {truth} beyond {tol:e}"),
                ));
            }
            println!("verification=reliability {got:.12} == {truth:.12} (tol {tol:.1e})");
        }
        other => return Err(fail(EXIT_USAGE, format!("unknown reduction `{other}`"))),
    }
    Ok(())
}
