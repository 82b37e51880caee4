use std::path::PathBuf;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use catglm::report::{
    benchmark_summary, fit_summary, report_to_json, resolve_family, run_benchmark, run_cluster,
    run_fit,
};
use catglm::{load_csv, Family, FitConfig, GraspConfig, LoadOptions, RclRule, Schema, SplitPlan};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    /// Bernoulli response with the logit link.
    Logit,
    /// Poisson response with the log link.
    Poisson,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Logit => Family::BernoulliLogit,
            FamilyArg::Poisson => Family::PoissonLog,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "catglm",
    about = "GLMs with clustered categorical predictors",
    version
)]
struct Cli {
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Parser)]
struct CommonArgs {
    /// CSV dataset with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON schema declaring predictors and the response.
    #[arg(long)]
    schema: PathBuf,
    /// Response family; defaults to the schema's canonical choice.
    #[arg(long, value_enum)]
    family: Option<FamilyArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.7)]
    train_frac: f64,
    /// Directory for output files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Parser)]
struct GraspArgs {
    /// Number of clusters per predictor.
    #[arg(long, default_value_t = 2)]
    kprime: usize,
    /// GRASP repeats.
    #[arg(long, default_value_t = 100)]
    m: usize,
    /// Fixed restricted-candidate-list size, overriding the adaptive rule.
    #[arg(long)]
    rcl: Option<usize>,
    /// Fraction of the training sample held out for payoff evaluation;
    /// 0 scores payoffs on the test sample directly.
    #[arg(long, default_value_t = 0.25)]
    payoff_split: f64,
}

impl GraspArgs {
    fn to_config(&self, seed: u64) -> GraspConfig {
        GraspConfig {
            m: self.m,
            k_prime: self.kprime,
            rcl_rule: self.rcl.map_or(RclRule::Adaptive, RclRule::Fixed),
            seed,
            payoff_split: self.payoff_split,
            fit: FitConfig::default(),
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the plain one-hot GLM and report reshuffled test metrics.
    Fit {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 10)]
        reshuffles: usize,
    },
    /// Run the clustering search once and write model, clusterings and
    /// proximity files.
    Cluster {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grasp: GraspArgs,
    },
    /// Compare original and clustered models over reshuffled splits.
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        grasp: GraspArgs,
        #[arg(long, default_value_t = 10)]
        reshuffles: usize,
        /// Row label in the summary table; defaults to the data file stem.
        #[arg(long)]
        name: Option<String>,
    },
}

fn load_inputs(common: &CommonArgs) -> anyhow::Result<(Schema, catglm::Dataset, Family)> {
    let schema = Schema::from_json_file(&common.schema)
        .with_context(|| format!("reading schema {}", common.schema.display()))?;
    let dataset = load_csv(&common.data, &schema, &LoadOptions::default())
        .with_context(|| format!("loading data {}", common.data.display()))?;
    let family = resolve_family(&schema, common.family.map(Family::from));
    Ok((schema, dataset, family))
}

fn dataset_name(common: &CommonArgs, name: &Option<String>) -> String {
    name.clone().unwrap_or_else(|| {
        common
            .data
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    })
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .expect("rayon pool already initialized");
    }
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Fit { common, reshuffles } => {
            let (schema, dataset, family) = load_inputs(&common)?;
            let plan = SplitPlan {
                train_fraction: common.train_frac,
                n_reshuffles: reshuffles,
                seed: common.seed,
            };
            let name = dataset_name(&common, &None);
            let report = run_fit(
                &name,
                &schema,
                &dataset,
                family,
                &plan,
                &FitConfig::default(),
            )?;
            print!("{}", fit_summary(&report));
            if let Some(dir) = &common.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("model.json");
                std::fs::write(&path, serde_json::to_string_pretty(&report.model)?)?;
                println!("wrote {}", path.display());
            }
        }
        Command::Cluster { common, grasp } => {
            let (schema, dataset, family) = load_inputs(&common)?;
            let out_dir = common
                .out
                .clone()
                .ok_or_else(|| anyhow::anyhow!("--out is required for cluster"))?;
            let plan = SplitPlan {
                train_fraction: common.train_frac,
                n_reshuffles: 1,
                seed: common.seed,
            };
            let config = grasp.to_config(common.seed);
            let started = std::time::Instant::now();
            let (output, paths) = run_cluster(&schema, &dataset, family, &plan, &config, &out_dir)?;
            let best = output.best();
            println!(
                "best repeat {} payoff {:.4}; test {:?} {:.4} ({:.1}s)",
                best.repeat_index,
                best.payoff,
                output.test_metric.kind,
                output.test_metric.value,
                started.elapsed().as_secs_f64()
            );
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Command::Benchmark {
            common,
            grasp,
            reshuffles,
            name,
        } => {
            let (schema, dataset, family) = load_inputs(&common)?;
            let plan = SplitPlan {
                train_fraction: common.train_frac,
                n_reshuffles: reshuffles,
                seed: common.seed,
            };
            let config = grasp.to_config(common.seed);
            let label = dataset_name(&common, &name);
            let report = run_benchmark(&label, &schema, &dataset, family, &plan, &config)?;
            print!("{}", benchmark_summary(&report));
            println!("elapsed: {:.1}s", report.wall_clock_secs);
            if let Some(dir) = &common.out {
                std::fs::create_dir_all(dir)?;
                let path = dir.join("report.json");
                std::fs::write(&path, report_to_json(&report)?)?;
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
