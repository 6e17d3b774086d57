use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pfev::benchmarks::{reference_cache_path, reference_frontier, ProblemSpec};
use pfev::harness::output::{write_csv, write_jsonl};
use pfev::harness::{
    emit_results, estimator_study, gap_study, run_bench, run_bo_partial, summarize_gap,
    BenchConfig, EstimatorStudyConfig, RunConfig, Strategy,
};
use pfev::{Error, Result};

const OUT_ENV: &str = "PFEV_OUT_DIR";

#[derive(Parser)]
#[command(name = "pfev", version, about = "Multi-objective Bayesian optimization by Pareto-frontier truncation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (defaults to $PFEV_OUT_DIR, then ./results).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one optimization.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Run a matrix of problems, strategies and seeds.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Restrict the matrix to one strategy.
        #[arg(long)]
        strategy: Option<Strategy>,
        #[arg(long)]
        iterations: Option<usize>,
    },
    /// Over/under truncation volumes of sampled simplex frontiers.
    GapStudy {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        objectives: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "10,100,1000")]
        sizes: Vec<usize>,
        /// Number of seeds per setting.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
    },
    /// Error of the lower-bound estimators against a large-sample reference.
    EstimatorStudy {
        #[command(flatten)]
        common: Common,
        /// Number of seeds (overrides the configuration).
        #[arg(long)]
        seeds: Option<u64>,
        #[arg(long)]
        truth_samples: Option<usize>,
    },
    /// Build and cache the reference frontier of a problem.
    RefFrontier {
        #[command(flatten)]
        common: Common,
        /// Named problem such as `fonseca` or `fes3+kursawe` (instead of --config).
        #[arg(long)]
        problem: Option<String>,
        #[arg(long)]
        generations: Option<usize>,
        #[arg(long)]
        population: Option<usize>,
    },
}

fn out_root(common: &Common, configured: Option<&Path>) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| configured.map(Path::to_path_buf))
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"))
}

fn set_threads(common: &Common) -> Result<()> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(e.to_string()))?;
    }
    Ok(())
}

fn load_run_config(common: &Common) -> Result<RunConfig> {
    match &common.config {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run {
            common,
            strategy,
            iterations,
        } => {
            set_threads(&common)?;
            let mut cfg = load_run_config(&common)?;
            if let Some(s) = common.seed {
                cfg.seed = s;
            }
            if let Some(s) = strategy {
                cfg.strategy = s;
            }
            if let Some(t) = iterations {
                cfg.iterations = t;
            }
            let out = out_root(&common, cfg.output.as_deref());
            if cfg.reference_cache.is_none() {
                cfg.reference_cache = Some(out.join("reference-cache"));
            }
            cfg.validate()?;
            match run_bo_partial(&cfg) {
                Ok(h) => {
                    emit_results(&h, &out)?;
                    println!(
                        "{} {} seed {}: {} observations, final RHV {:.6} -> {}",
                        h.meta.problem,
                        h.meta.strategy,
                        h.meta.seed,
                        h.observations(),
                        h.final_rhv(),
                        out.display()
                    );
                    Ok(())
                }
                Err(f) => {
                    if let Some(h) = &f.history {
                        emit_results(h, &out)?;
                        eprintln!("partial history written to {}", out.display());
                    }
                    Err(f.error)
                }
            }
        }
        Command::Bench {
            common,
            strategy,
            iterations,
        } => {
            set_threads(&common)?;
            let path = common
                .config
                .as_ref()
                .ok_or_else(|| Error::Config("bench requires --config".into()))?;
            let mut cfg = BenchConfig::load(path)?;
            if let Some(s) = common.seed {
                cfg.seeds = vec![s];
            }
            if let Some(s) = strategy {
                cfg.strategies = vec![s];
            }
            if let Some(t) = iterations {
                cfg.base.iterations = t;
            }
            let out = out_root(&common, cfg.base.output.as_deref());
            if cfg.base.reference_cache.is_none() {
                cfg.base.reference_cache = Some(out.join("reference-cache"));
            }
            let hs = run_bench(&cfg, &out)?;
            for h in &hs {
                println!(
                    "{} {} seed {}: final RHV {:.6}",
                    h.meta.problem,
                    h.meta.strategy,
                    h.meta.seed,
                    h.final_rhv()
                );
            }
            Ok(())
        }
        Command::GapStudy {
            common,
            objectives,
            sizes,
            seeds,
        } => {
            set_threads(&common)?;
            let base = common.seed.unwrap_or(0);
            let seed_list: Vec<u64> = (base..base + seeds).collect();
            let mut rows = Vec::new();
            for l in objectives {
                rows.extend(gap_study(l, &sizes, &seed_list)?);
            }
            let summary = summarize_gap(&rows);
            let out = out_root(&common, None);
            write_jsonl::<(), _>(&out.join("gap.jsonl"), "pfev-gap", None, &rows)?;
            write_csv(&out.join("gap_summary.csv"), "pfev-gap-summary", &summary)?;
            for s in &summary {
                println!(
                    "L={} |F|={}: over {:.4} under {:.4} gap {:.4}",
                    s.objectives, s.size, s.over_ratio, s.under_ratio, s.gap
                );
            }
            Ok(())
        }
        Command::EstimatorStudy {
            common,
            seeds,
            truth_samples,
        } => {
            set_threads(&common)?;
            let mut cfg = match &common.config {
                Some(p) => {
                    let text = std::fs::read_to_string(p)
                        .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
                    toml::from_str::<EstimatorStudyConfig>(&text)
                        .map_err(|e| Error::Config(e.to_string()))?
                }
                None => EstimatorStudyConfig::default(),
            };
            if let Some(n) = seeds {
                let base = common.seed.unwrap_or(0);
                cfg.seeds = (base..base + n).collect();
            }
            if let Some(k) = truth_samples {
                cfg.truth_samples = k;
            }
            let rows = estimator_study(&cfg)?;
            let out = out_root(&common, None);
            write_csv(&out.join("estimator.csv"), "pfev-estimator", &rows)?;
            for r in &rows {
                println!(
                    "K={:<5} {:<9} MSE {:.6e} ± {:.1e}",
                    r.samples,
                    r.estimator.as_str(),
                    r.mse,
                    r.mse_se
                );
            }
            Ok(())
        }
        Command::RefFrontier {
            common,
            problem,
            generations,
            population,
        } => {
            set_threads(&common)?;
            let mut cfg = load_run_config(&common)?;
            if let Some(name) = problem {
                cfg.problem = ProblemSpec::parse_named(&name)?;
            }
            if let Some(s) = common.seed {
                cfg.reference.seed = s;
            }
            if let Some(g) = generations {
                cfg.reference.generations = g;
            }
            if let Some(p) = population {
                cfg.reference.population = p;
            }
            let p = cfg.problem.build()?;
            let dir = common
                .out
                .clone()
                .or(cfg.reference_cache.clone())
                .unwrap_or_else(|| out_root(&common, None).join("reference-cache"));
            let front = reference_frontier(&p, &cfg.reference, Some(&dir))?;
            println!(
                "{}: {} points -> {}",
                p.id(),
                front.len(),
                reference_cache_path(&dir, &p, &cfg.reference).display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
