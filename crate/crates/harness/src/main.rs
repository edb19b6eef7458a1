use std::io;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use par_core::actor::{train_baseline, ActorConfig, BaselineConfig, ScriptedActor};
use par_core::planner::oracle_factory;
use par_core::protocol::{run_episode, Limits};
use par_core::reporter::{evaluate_agreement, train_reporter, Reporter, ReporterKind, ReporterTrainConfig};
use par_core::tasks::{generate, TaskKind};
use par_harness::config::ExperimentConfig;
use par_harness::human::HumanPlanner;
use par_harness::logs::read_records;
use par_harness::mock::{serve_forever, MockOptions};
use par_harness::sweep::{condition_of, replay, run_sweep};
use par_harness::tables::{report_tables, summary_table, write_curve, write_summary, write_text};

#[derive(Parser)]
#[command(name = "par", version, about = "Planner-actor-reporter gridworld experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded sweep.
    Run(RunArgs),
    /// Run the cross product of several conditions and print one table.
    Grid(GridArgs),
    /// Train the learned reporter on a visual task.
    TrainReporter(TrainReporterArgs),
    /// Train the flat linear baseline on a secret-property task.
    TrainBaseline(TrainBaselineArgs),
    /// Serve the oracle behind the completion wire format.
    ServeMock(ServeMockArgs),
    /// Print a logged episode's transcript, optionally re-simulating it.
    Replay(ReplayArgs),
    /// Play the planner yourself from the terminal.
    Interactive(InteractiveArgs),
    /// Summarize one or more episode logs per condition.
    Tables(TablesArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// TOML experiment config. Defaults apply when omitted.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Override any config field, e.g. `--set reporter.noise=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    task: Option<String>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    planner: Option<String>,
    #[arg(long)]
    reporter: Option<String>,
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long)]
    error_rate: Option<f64>,
    #[arg(long)]
    parallelism: Option<usize>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let text = match &self.config {
            Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            None => String::new(),
        };
        let mut overrides = Vec::new();
        let mut add = |key: &str, value: Option<String>| {
            if let Some(v) = value {
                overrides.push(format!("{key}={v}"));
            }
        };
        add("task", self.task.as_ref().map(|t| format!("\"{t}\"")));
        add("episodes", self.episodes.map(|v| v.to_string()));
        add("base_seed", self.seed.map(|v| v.to_string()));
        add("planner.kind", self.planner.as_ref().map(|v| format!("\"{v}\"")));
        add("reporter.kind", self.reporter.as_ref().map(|v| format!("\"{v}\"")));
        add("reporter.noise", self.noise.map(|v| format!("{v:?}")));
        add("actor.error_rate", self.error_rate.map(|v| format!("{v:?}")));
        add("parallelism", self.parallelism.map(|v| v.to_string()));
        overrides.extend(self.overrides.iter().cloned());
        Ok(ExperimentConfig::from_toml_with(&text, &overrides)?)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Episode log (JSONL).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Summary table (TSV).
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Also write the resolved config next to the results.
    #[arg(long)]
    save_config: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_delimiter = ',')]
    tasks: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    planners: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    reporters: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    noises: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    error_rates: Vec<f64>,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Directory for one JSONL log per condition.
    #[arg(long)]
    log_dir: Option<PathBuf>,
}

#[derive(Args)]
struct TrainReporterArgs {
    #[arg(long, default_value = "visual-location")]
    task: TaskKind,
    #[arg(long, default_value_t = 2000)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    learning_rate: f64,
    #[arg(long, default_value_t = 100)]
    eval_every: usize,
    /// Fit the truthful label directly instead of the episode reward.
    #[arg(long)]
    supervised: bool,
    #[arg(long)]
    weights: Option<PathBuf>,
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct TrainBaselineArgs {
    #[arg(long, default_value = "conditional-secret")]
    task: TaskKind,
    #[arg(long, default_value_t = 4000)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.2)]
    learning_rate: f64,
    #[arg(long)]
    curve: Option<PathBuf>,
}

#[derive(Args)]
struct ServeMockArgs {
    #[arg(long, default_value = "127.0.0.1:8089")]
    addr: String,
    /// Answer the first N requests with 503.
    #[arg(long, default_value_t = 0)]
    fail_first: usize,
}

#[derive(Args)]
struct ReplayArgs {
    #[arg(long)]
    log: PathBuf,
    /// Record index in the log.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Pick the record with this seed instead of by index.
    #[arg(long)]
    seed: Option<u64>,
    /// Re-simulate the episode and check it matches the log.
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct InteractiveArgs {
    #[arg(long, default_value = "conditional-secret")]
    task: TaskKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0.0)]
    error_rate: f64,
    #[arg(long, default_value_t = 12)]
    max_turns: u32,
}

#[derive(Args)]
struct TablesArgs {
    #[arg(required = true)]
    logs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> Result<()> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(io::stderr)
        .init();

    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Grid(args) => grid(args),
        Command::TrainReporter(args) => train_reporter_cmd(args),
        Command::TrainBaseline(args) => train_baseline_cmd(args),
        Command::ServeMock(args) => Ok(serve_forever(&args.addr, MockOptions { fail_first: args.fail_first })?),
        Command::Replay(args) => replay_cmd(args),
        Command::Interactive(args) => interactive(args),
        Command::Tables(args) => tables(args),
    }
}

fn run(args: RunArgs) -> Result<()> {
    let mut config = args.config.load()?;
    if args.log.is_some() {
        config.output.log = args.log;
    }
    if args.summary.is_some() {
        config.output.summary = args.summary;
    }
    if let Some(path) = &args.save_config {
        write_text(path, &config.to_toml())?;
    }
    let outcome = run_sweep(&config)?;
    print!("{}", summary_table(&[(condition_of(&config), config.task, outcome.summary)]));
    Ok(())
}

fn grid(args: GridArgs) -> Result<()> {
    let base = args.config.load()?;
    let or_base = |values: Vec<String>, base: String| if values.is_empty() { vec![base] } else { values };
    let tasks = or_base(args.tasks, base.task.to_string());
    let planners = or_base(args.planners, format!("{:?}", base.planner.kind).to_lowercase());
    let reporters = or_base(args.reporters, format!("{:?}", base.reporter.kind).to_lowercase());
    let noises = if args.noises.is_empty() { vec![base.reporter.noise] } else { args.noises };
    let errors = if args.error_rates.is_empty() { vec![base.actor.error_rate] } else { args.error_rates };

    let base_text = base.to_toml();
    let mut rows = Vec::new();
    for task in &tasks {
        for planner in &planners {
            for reporter in &reporters {
                for &noise in &noises {
                    for &error in &errors {
                        let name = format!("{task}/{planner}/{reporter}/p{noise}/e{error}");
                        let mut overrides = vec![
                            format!("task=\"{task}\""),
                            format!("planner.kind=\"{planner}\""),
                            format!("reporter.kind=\"{reporter}\""),
                            format!("reporter.noise={noise:?}"),
                            format!("actor.error_rate={error:?}"),
                            format!("name=\"{name}\""),
                        ];
                        if let Some(dir) = &args.log_dir {
                            let file = dir.join(format!("{}.jsonl", name.replace('/', "_")));
                            overrides.push(format!("output.log={:?}", file.display().to_string()));
                        }
                        let config = ExperimentConfig::from_toml_with(&base_text, &overrides)?;
                        let outcome = run_sweep(&config)?;
                        tracing::info!(%name, rate = outcome.summary.success_rate, "condition done");
                        rows.push((condition_of(&config), config.task, outcome.summary));
                    }
                }
            }
        }
    }
    print!("{}", summary_table(&rows));
    if let Some(path) = &args.summary {
        write_summary(path, &rows)?;
    }
    Ok(())
}

fn train_reporter_cmd(args: TrainReporterArgs) -> Result<()> {
    let config = ReporterTrainConfig {
        episodes: args.episodes,
        learning_rate: args.learning_rate,
        base_seed: args.seed,
        eval_every: args.eval_every,
        supervised: args.supervised,
        ..ReporterTrainConfig::default()
    };
    let (model, curve) = train_reporter(args.task, &oracle_factory, &ActorConfig::default(), &config)?;
    print!("{}", curve.to_table());
    let agreement = evaluate_agreement(&model, 1000, 9_000_000)?;
    eprintln!("agreement with the environment on 1000 fresh layouts: {agreement:.3}");
    if let Some(path) = &args.weights {
        write_text(path, &format!("{}\n", model.to_record()))?;
    }
    if let Some(path) = &args.curve {
        write_curve(path, &curve)?;
    }
    Ok(())
}

fn train_baseline_cmd(args: TrainBaselineArgs) -> Result<()> {
    let config = BaselineConfig {
        episodes: args.episodes,
        learning_rate: args.learning_rate,
        base_seed: args.seed,
        ..BaselineConfig::default()
    };
    let (_, curve) = train_baseline(args.task, &config)?;
    print!("{}", curve.to_table());
    if let Some(path) = &args.curve {
        write_curve(path, &curve)?;
    }
    Ok(())
}

fn replay_cmd(args: ReplayArgs) -> Result<()> {
    let records = read_records(&args.log)?;
    let record = match args.seed {
        Some(seed) => records.iter().find(|r| r.seed == seed).with_context(|| format!("no record with seed {seed}"))?,
        None => records.get(args.index).with_context(|| format!("log has {} records", records.len()))?,
    };
    println!("{}", record.transcript.render_block()?);
    println!("reward={} failure={:?} turns={} steps={}", record.reward, record.failure_tag, record.planner_turns, record.env_steps);
    if args.verify {
        let rerun = replay(record)?;
        if rerun.transcript != record.transcript || rerun.reward != record.reward {
            bail!("re-simulation diverged from the log");
        }
        println!("verified: re-simulation matches the log");
    }
    Ok(())
}

fn interactive(args: InteractiveArgs) -> Result<()> {
    let (world, spec) = generate(args.task, args.seed)?;
    let stdin = io::stdin();
    let mut planner = HumanPlanner::new(stdin.lock(), io::stdout());
    let mut actor = ScriptedActor::new(ActorConfig { error_rate: args.error_rate, ..ActorConfig::default() }, args.seed);
    let kind = if args.noise > 0.0 { ReporterKind::Noisy { p: args.noise } } else { ReporterKind::Truthful };
    let mut reporter = Reporter::new(kind, args.seed);
    println!("Objects: {}", spec.object_names.join(", "));
    println!("Type instructions like `Examine <object>.` or `Pickup <object>.`");
    let limits = Limits { max_planner_turns: args.max_turns, ..Limits::default() };
    let result = run_episode(&mut planner, &mut actor, &mut reporter, world, &spec, &limits);
    println!("\n{}", result.transcript.render_block()?);
    println!("reward={} failure={:?}", result.reward, result.failure_tag);
    Ok(())
}

fn tables(args: TablesArgs) -> Result<()> {
    let mut records = Vec::new();
    for path in &args.logs {
        records.extend(read_records(path)?);
    }
    let table = report_tables(&records)?;
    print!("{table}");
    if let Some(path) = &args.out {
        write_text(path, &table)?;
    }
    Ok(())
}
