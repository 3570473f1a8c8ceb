use std::path::PathBuf;
use std::process::ExitCode;

use akb_harness::{
    cmd_list, cmd_metaopt, cmd_plotdata, cmd_run, load_model, HarnessConfig, HarnessError, ListKind, Result,
    VariantSpec,
};
use anakatabatic::pso::Variant;
use clap::{Args, Parser, Subcommand};

/// Anakatabatic PSO benchmark harness.
///
/// Exit codes: 0 success, 1 usage error, 2 runtime abort.
#[derive(Parser)]
#[command(name = "akb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON configuration file; flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Master seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Worker threads.
    #[arg(long, value_name = "N")]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Model JSON file or built-in model name; repeatable.
    #[arg(long = "model", value_name = "PATH")]
    models: Vec<String>,
    /// Problem dimension.
    #[arg(long, value_name = "D")]
    dims: Option<usize>,
    /// Runs per problem (per variant, or per F_M evaluation for metaopt).
    #[arg(long, value_name = "R")]
    runs: Option<usize>,
    /// Engine for --model variants and metaoptimization: standard or tvac.
    #[arg(long, value_name = "NAME")]
    engine: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Benchmark the configured variants on the suite.
    Run {
        #[command(flatten)]
        common: Common,
        /// Evaluations per run (default 1000 D).
        #[arg(long, value_name = "N")]
        max_evals: Option<usize>,
        /// Use only the first K suite problems.
        #[arg(long, value_name = "K")]
        problems: Option<usize>,
    },
    /// List built-in models or suite functions.
    List {
        /// `models` or `functions`.
        kind: String,
        #[arg(long, value_name = "D", default_value_t = 10)]
        dims: usize,
        #[arg(long, value_name = "N", default_value_t = 1)]
        seed: u64,
    },
    /// Search for a new anakatabatic model; --model adds warm starts.
    Metaopt {
        #[command(flatten)]
        common: Common,
        /// Outer budget in F_M evaluations.
        #[arg(long, value_name = "N")]
        outer_budget: Option<usize>,
        /// Outer swarm size.
        #[arg(long, value_name = "N")]
        outer_swarm: Option<usize>,
        /// Use only the first K suite problems.
        #[arg(long, value_name = "K")]
        problems: Option<usize>,
    },
    /// Write plot data for a results directory.
    Plotdata {
        /// Results directory (defaults to --out, then `results`).
        dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

fn engine(name: &str) -> Result<Variant> {
    name.parse().map_err(|e: anakatabatic::Error| HarnessError::Usage(e.to_string()))
}

fn configure(common: &Common) -> Result<HarnessConfig> {
    let mut cfg = match &common.config {
        Some(path) => HarnessConfig::load(path)?,
        None => HarnessConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.master_seed = seed;
    }
    if let Some(jobs) = common.jobs {
        cfg.jobs = jobs;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(d) = common.dims {
        cfg.suite.dims = d;
    }
    if let Some(r) = common.runs {
        cfg.runs = r;
        cfg.metaopt.runs_per_function = r;
    }
    if let Some(name) = &common.engine {
        cfg.metaopt.engine = engine(name)?;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run { common, max_evals, problems } => {
            let mut cfg = configure(&common)?;
            if !common.models.is_empty() {
                let eng = engine(common.engine.as_deref().unwrap_or("tvac"))?;
                cfg.variants = vec![VariantSpec::baseline(eng)];
                for m in &common.models {
                    cfg.variants.push(VariantSpec::with_model(eng, load_model(m)?));
                }
            }
            if max_evals.is_some() {
                cfg.max_evals = max_evals;
            }
            if problems.is_some() {
                cfg.suite.problems = problems;
            }
            let outcome = cmd_run(&cfg)?;
            println!("{} runs written to {}", outcome.rows.len(), outcome.dir.display());
            if let Some(s) = outcome.summary {
                println!("alpha_avg = {:.4}  omega_avg = {:.4}", s.alpha_avg, s.omega_avg);
            }
        }
        Command::List { kind, dims, seed } => {
            print!("{}", cmd_list(kind.parse::<ListKind>()?, dims, seed)?);
        }
        Command::Metaopt { common, outer_budget, outer_swarm, problems } => {
            let mut cfg = configure(&common)?;
            for m in &common.models {
                cfg.metaopt.warm_starts.push(load_model(m)?);
            }
            if let Some(b) = outer_budget {
                cfg.metaopt.outer_budget = b;
            }
            if let Some(n) = outer_swarm {
                cfg.metaopt.outer_swarm = n;
            }
            if problems.is_some() {
                cfg.suite.problems = problems;
            }
            let outcome = cmd_metaopt(&cfg)?;
            println!("best F_M = {:.6} after {} outer evaluations", outcome.best_fitness, outcome.provenance.outer_evals_used);
            println!("model written to {}", cfg.out.join("model.json").display());
        }
        Command::Plotdata { dir, common } => {
            let dir = dir.or(common.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
            let models = common.models.iter().map(|m| load_model(m)).collect::<Result<Vec<_>>>()?;
            let files = cmd_plotdata(&dir, &models)?;
            println!("{} plot files written to {}", files.len(), dir.join("plots").display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
