//! Seeded episode sweeps: episode `i` uses seed `base_seed + i`, so results
//! do not depend on how episodes are spread over threads.

use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use rayon::prelude::*;

use par_core::actor::ScriptedActor;
use par_core::gridworld::{GridWorld, Layout};
use par_core::planner::{
    default_corpus, sample_corpus, CompletionBackend, LlmPlanner, Planner, ScriptedPlanner,
};
use par_core::protocol::{run_episode, EpisodeResult, Limits, Transcript};
use par_core::reporter::{LearnedReporter, Reporter, ReporterKind};
use par_core::tasks::{assemble, generate, TaskKind, TaskSpec};
use par_core::PlannerError;

use crate::config::{ExperimentConfig, FewShotMode, PlannerKind, ReporterChoice, ScopeName};
use crate::error::HarnessError;
use crate::http::HttpBackend;
use crate::logs::{write_records, Condition, EpisodeRecord};
use crate::metrics::MetricsSummary;
use crate::tables::write_summary;

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub summary: MetricsSummary,
    pub records: Vec<EpisodeRecord>,
}

impl SweepOutcome {
    pub fn results(&self) -> Vec<EpisodeResult> {
        self.records.iter().map(EpisodeRecord::result).collect()
    }
}

pub fn condition_of(config: &ExperimentConfig) -> Condition {
    Condition {
        name: config.name.clone(),
        planner: serde_name(&config.planner.kind),
        reporter: serde_name(&config.reporter.kind),
        noise: if config.reporter.kind == ReporterChoice::Noisy { config.reporter.noise } else { 0.0 },
        error_rate: config.actor.error_rate,
        error_scope: serde_name(&config.actor.error_scope),
        budget: config.actor.budget,
        max_planner_turns: config.limits.max_planner_turns,
        step_limit: config.limits.step_limit,
    }
}

fn serde_name<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_value(value).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default()
}

pub fn reporter_kind(config: &ExperimentConfig) -> Result<ReporterKind, HarnessError> {
    Ok(match config.reporter.kind {
        ReporterChoice::Truthful => ReporterKind::Truthful,
        ReporterChoice::Noisy => ReporterKind::Noisy { p: config.reporter.noise },
        ReporterChoice::Learned => {
            let path = config.reporter.weights.as_deref().expect("validated");
            ReporterKind::Learned(load_weights(path)?)
        }
    })
}

pub fn load_weights(path: &Path) -> Result<LearnedReporter, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or_default();
    Ok(LearnedReporter::from_record(line)?)
}

/// Runs the sweep described by `config`, connecting to its endpoint if the
/// planner is a language model.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome, HarnessError> {
    match (config.planner.kind, &config.endpoint) {
        (PlannerKind::Llm, Some(endpoint)) => {
            let backend = HttpBackend::new(endpoint.clone())?;
            run_sweep_with(config, Some(&backend))
        }
        _ => run_sweep_with(config, None),
    }
}

/// Runs the sweep with an explicit completion backend for `llm` planners.
/// Logs and summary are written even when the run is cut short.
pub fn run_sweep_with(
    config: &ExperimentConfig,
    backend: Option<&dyn CompletionBackend>,
) -> Result<SweepOutcome, HarnessError> {
    config.validate()?;
    if config.planner.kind == PlannerKind::Human {
        return Err(HarnessError::Config("the human planner only runs under `par interactive`".into()));
    }
    if config.planner.kind == PlannerKind::Llm && backend.is_none() {
        return Err(HarnessError::Config("llm planner needs a completion backend".into()));
    }
    let reporter = reporter_kind(config)?;
    let fixed_shots = match (config.planner.kind, config.planner.few_shot) {
        (PlannerKind::Llm, FewShotMode::Fixed) => default_corpus(config.task),
        _ => Vec::new(),
    };
    let condition = condition_of(config);
    let stop = AtomicBool::new(false);

    let run_one = |i: usize| -> Option<Result<EpisodeRecord, HarnessError>> {
        if stop.load(Ordering::SeqCst) {
            return None;
        }
        let seed = config.base_seed + i as u64;
        let (world, spec) = match generate(config.task, seed) {
            Ok(pair) => pair,
            Err(e) => return Some(Err(e.into())),
        };
        let layout = world.layout().to_record();
        let shots = || match config.planner.few_shot {
            FewShotMode::Fixed => fixed_shots.clone(),
            FewShotMode::Sampled => sample_corpus(config.task, seed, config.planner.few_shot_count),
            FewShotMode::None => Vec::new(),
        };
        let mut planner: Box<dyn Planner + '_> = match (config.planner.kind.strategy(), backend) {
            (Some(strategy), _) => Box::new(ScriptedPlanner::new(strategy, &spec, seed)),
            (None, Some(backend)) => Box::new(LlmPlanner::new(backend, shots(), config.endpoint.clone().unwrap_or_default().llm_settings())),
            (None, None) => unreachable!("checked above"),
        };
        let mut actor = ScriptedActor::new(config.actor.actor_config(), seed);
        let mut reporter = Reporter::new(reporter.clone(), seed);
        let result = run_episode(planner.as_mut(), &mut actor, &mut reporter, world, &spec, &config.limits);
        if result.planner_turns > 0 && result.transport_failures == result.planner_turns {
            stop.store(true, Ordering::SeqCst);
        }
        Some(Ok(EpisodeRecord::new(&condition, &spec, layout, &result)))
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let outputs: Vec<Option<Result<EpisodeRecord, HarnessError>>> =
        pool.install(|| (0..config.episodes).into_par_iter().map(run_one).collect());

    let mut records = Vec::with_capacity(outputs.len());
    for output in outputs.into_iter().flatten() {
        records.push(output?);
    }
    let summary = MetricsSummary::from_results(records.iter().map(|r| r.result()).collect::<Vec<_>>().iter());
    if let Some(path) = &config.output.log {
        write_records(path, &records)?;
    }
    if let Some(path) = &config.output.summary {
        write_summary(path, &[(condition.clone(), config.task, summary.clone())])?;
    }
    if stop.load(Ordering::SeqCst) {
        return Err(HarnessError::EndpointUnreachable { completed: records.len(), requested: config.episodes });
    }
    Ok(SweepOutcome { summary, records })
}

/// Planner that replays logged LM turns in order.
struct LoggedPlanner {
    turns: std::vec::IntoIter<String>,
}

impl Planner for LoggedPlanner {
    fn next_instruction(&mut self, _: &Transcript) -> Result<String, PlannerError> {
        self.turns.next().ok_or(PlannerError::Finished)
    }
}

/// Rebuilds a logged episode's world and re-runs it with the logged LM turns.
/// Matches the log exactly for every reporter except the learned one, whose
/// weights are not part of the record.
pub fn replay(record: &EpisodeRecord) -> Result<EpisodeResult, HarnessError> {
    let layout = Layout::from_record(&record.layout).map_err(par_core::TaskError::from)?;
    let kind: TaskKind = record.task.kind.parse().map_err(HarnessError::Config)?;
    let (world, spec): (GridWorld, TaskSpec) =
        assemble(GridWorld::try_from_layout(layout).map_err(par_core::TaskError::from)?, kind, record.task.binding.clone())?;
    let c = &record.condition;
    let reporter = match c.reporter.as_str() {
        "truthful" => ReporterKind::Truthful,
        "noisy" => ReporterKind::Noisy { p: c.noise },
        other => return Err(HarnessError::Config(format!("cannot replay with the {other} reporter"))),
    };
    let scope = if c.error_scope == "examine-only" { ScopeName::ExamineOnly } else { ScopeName::All };
    let actor_config = crate::config::ActorSection { error_rate: c.error_rate, error_scope: scope, budget: c.budget }.actor_config();
    let lm_turns: Vec<String> = record
        .transcript
        .dialogue()
        .iter()
        .filter(|t| t.role == par_core::protocol::Role::Lm)
        .map(|t| t.text.clone())
        .collect();
    let mut planner = LoggedPlanner { turns: lm_turns.into_iter() };
    let mut actor = ScriptedActor::new(actor_config, record.seed);
    let mut reporter = Reporter::new(reporter, record.seed);
    let limits = Limits { max_planner_turns: c.max_planner_turns, step_limit: c.step_limit };
    Ok(run_episode(&mut planner, &mut actor, &mut reporter, world, &spec, &limits))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(planner: PlannerKind, episodes: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig { episodes, ..ExperimentConfig::default() };
        c.planner.kind = planner;
        c
    }

    #[test]
    fn parallelism_does_not_change_results() {
        let mut a = config(PlannerKind::Repeat, 60);
        a.reporter.kind = ReporterChoice::Noisy;
        a.actor.error_rate = 0.2;
        let mut b = a.clone();
        a.parallelism = 1;
        b.parallelism = 4;
        let (ra, rb) = (run_sweep(&a).unwrap(), run_sweep(&b).unwrap());
        assert_eq!(ra.records, rb.records);
        assert_eq!(ra.summary, rb.summary);
    }

    #[test]
    fn histogram_and_successes_cover_all_episodes() {
        let mut c = config(PlannerKind::Random, 200);
        c.task = TaskKind::ConditionalSecret;
        let s = run_sweep(&c).unwrap().summary;
        assert_eq!(s.successes + s.failures.values().sum::<usize>(), s.episodes);
    }

    #[test]
    fn replay_reproduces_logged_episode() {
        let mut c = config(PlannerKind::Cycle, 20);
        c.reporter.kind = ReporterChoice::Noisy;
        c.actor.error_rate = 0.3;
        for record in run_sweep(&c).unwrap().records {
            assert_eq!(replay(&record).unwrap(), record.result());
        }
    }

    #[test]
    fn human_planner_is_rejected() {
        assert!(matches!(run_sweep(&config(PlannerKind::Human, 1)), Err(HarnessError::Config(_))));
    }
}
