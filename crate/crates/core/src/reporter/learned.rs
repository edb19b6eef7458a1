//! Binary-head reporter trained from episode reward.
//!
//! The head scores the observation with a logistic model and picks one of two
//! fixed sentences. Only a truthful sentence steers the oracle planner to the
//! rewarded pickup, so maximizing reward teaches the head to tell the truth.

use serde::{Deserialize, Serialize};

use crate::actor::{ActorConfig, ScriptedActor};
use crate::curve::LearningCurve;
use crate::error::TrainError;
use crate::gridworld::{Direction, GridWorld, Observation};
use crate::planner::PlannerFactory;
use crate::protocol::{run_episode, Limits, Report};
use crate::reporter::{truthful_choice, HeadMode, ReportDecision, Reporter, ReporterKind};
use crate::tasks::{close_to_wall, generate, TaskKind, TaskSpec};
use crate::vocab::{Color, ColorGroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VisualTask {
    /// "The object is close to / far from the wall."
    Location,
    /// "I am a warm / cool color."
    Color,
}

impl VisualTask {
    pub fn from_kind(kind: TaskKind) -> Option<VisualTask> {
        match kind {
            TaskKind::VisualLocationConditional => Some(VisualTask::Location),
            TaskKind::VisualColorConditional => Some(VisualTask::Color),
            _ => None,
        }
    }

    pub fn kind(self) -> TaskKind {
        match self {
            VisualTask::Location => TaskKind::VisualLocationConditional,
            VisualTask::Color => TaskKind::VisualColorConditional,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            VisualTask::Location => "location",
            VisualTask::Color => "color",
        }
    }

    pub fn feature_len(self) -> usize {
        match self {
            VisualTask::Location => 1 + Direction::ALL.len(),
            VisualTask::Color => 1 + Color::ALL.len(),
        }
    }
}

/// The two sentences a head can emit. `First` is "close" / "warm".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReportChoice {
    First,
    Second,
}

impl ReportChoice {
    pub fn from_first(first: bool) -> Self {
        if first {
            ReportChoice::First
        } else {
            ReportChoice::Second
        }
    }

    pub fn is_first(self) -> bool {
        self == ReportChoice::First
    }

    pub fn report(self, task: VisualTask) -> Report {
        match task {
            VisualTask::Location => Report::WallProximity { close: self.is_first() },
            VisualTask::Color => Report::AgentColor(if self.is_first() { ColorGroup::Warm } else { ColorGroup::Cool }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnedReporter {
    pub task: VisualTask,
    pub weights: Vec<f64>,
}

impl LearnedReporter {
    /// Zero weights: both reports equally likely.
    pub fn new(task: VisualTask) -> Self {
        Self { task, weights: vec![0.0; task.feature_len()] }
    }

    /// Bias, then wall adjacency per direction (location) or a one-hot agent
    /// color (color).
    pub fn features(&self, observation: &Observation) -> Vec<f64> {
        let mut x = vec![1.0];
        match self.task {
            VisualTask::Location => {
                x.extend(Direction::ALL.iter().map(|&d| f64::from(observation.wall_distance(d) == Some(1))));
            }
            VisualTask::Color => {
                let mut onehot = vec![0.0; Color::ALL.len()];
                onehot[observation.agent_color.index()] = 1.0;
                x.extend(onehot);
            }
        }
        x
    }

    pub fn prob_first_from(&self, features: &[f64]) -> f64 {
        let z: f64 = self.weights.iter().zip(features).map(|(w, x)| w * x).sum();
        1.0 / (1.0 + (-z).exp())
    }

    pub fn prob_first(&self, observation: &Observation) -> f64 {
        self.prob_first_from(&self.features(observation))
    }

    /// Argmax report text for an observation.
    pub fn learned_report(&self, observation: &Observation) -> String {
        ReportChoice::from_first(self.prob_first(observation) >= 0.5)
            .report(self.task)
            .to_string()
    }

    pub fn to_record(&self) -> String {
        let w: Vec<String> = self.weights.iter().map(|w| format!("{w:?}")).collect();
        format!("reporter task={} weights={}", self.task.as_str(), w.join(","))
    }

    pub fn from_record(line: &str) -> Result<Self, TrainError> {
        let err = || TrainError::Record(line.to_string());
        let rest = line.trim().strip_prefix("reporter task=").ok_or_else(err)?;
        let (task, weights) = rest.split_once(" weights=").ok_or_else(err)?;
        let task = match task {
            "location" => VisualTask::Location,
            "color" => VisualTask::Color,
            _ => return Err(err()),
        };
        let weights = weights
            .split(',')
            .map(|w| w.parse::<f64>().map_err(|_| err()))
            .collect::<Result<Vec<_>, _>>()?;
        if weights.len() != task.feature_len() {
            return Err(err());
        }
        Ok(Self { task, weights })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReporterTrainConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    /// Step size of the moving-average reward baseline.
    pub baseline_decay: f64,
    pub base_seed: u64,
    pub eval_every: usize,
    pub eval_layouts: usize,
    pub eval_seed: u64,
    /// Episodes before the divergence guard is armed.
    pub patience: usize,
    pub min_success: f64,
    /// Ablation: fit the truthful label directly instead of using reward.
    pub supervised: bool,
    pub limits: Limits,
}

impl Default for ReporterTrainConfig {
    fn default() -> Self {
        Self {
            episodes: 2000,
            learning_rate: 0.5,
            baseline_decay: 0.05,
            base_seed: 0,
            eval_every: 100,
            eval_layouts: 200,
            eval_seed: 1_000_000,
            patience: 500,
            min_success: 0.4,
            supervised: false,
            limits: Limits::default(),
        }
    }
}

/// Rewards of an eval episode under each forced report, plus the features
/// the head saw. Neither depends on the weights.
struct EvalCase {
    features: Option<Vec<f64>>,
    reward_first: f64,
    reward_second: f64,
}

#[allow(clippy::too_many_arguments)]
fn forced_episode(
    model: &LearnedReporter,
    choice: ReportChoice,
    world: GridWorld,
    spec: &TaskSpec,
    seed: u64,
    planners: &PlannerFactory<'_>,
    actor_config: &ActorConfig,
    limits: &Limits,
) -> (f64, Option<Vec<f64>>) {
    let mut planner = planners(spec, seed);
    let mut actor = ScriptedActor::new(*actor_config, seed);
    let mut reporter = Reporter::new(ReporterKind::Learned(model.clone()), seed).with_mode(HeadMode::Forced(choice));
    let result = run_episode(planner.as_mut(), &mut actor, &mut reporter, world, spec, limits);
    let features = reporter.take_decisions().into_iter().next().map(|d| d.features);
    (result.reward, features)
}

/// Expected success of the sampled head on a fixed set of eval layouts.
fn expected_success(model: &LearnedReporter, cases: &[EvalCase]) -> f64 {
    let total: f64 = cases
        .iter()
        .map(|c| match &c.features {
            Some(x) => {
                let p = model.prob_first_from(x);
                p * c.reward_first + (1.0 - p) * c.reward_second
            }
            None => c.reward_first,
        })
        .sum();
    total / cases.len().max(1) as f64
}

/// Trains a reporter head by REINFORCE with a moving-average baseline.
///
/// Each episode runs the given planner and actor with the head sampling its
/// report; the episode reward scales the log-probability gradient of the
/// chosen report. The curve tracks the head's expected success on held-out
/// layouts.
pub fn train_reporter(
    kind: TaskKind,
    planners: &PlannerFactory<'_>,
    actor_config: &ActorConfig,
    config: &ReporterTrainConfig,
) -> Result<(LearnedReporter, LearningCurve), TrainError> {
    let task = VisualTask::from_kind(kind).ok_or(TrainError::UnsupportedTask(kind))?;
    let mut model = LearnedReporter::new(task);

    let mut cases = Vec::with_capacity(config.eval_layouts);
    for j in 0..config.eval_layouts {
        let seed = config.eval_seed + j as u64;
        let (world, spec) = generate(kind, seed)?;
        let run = |choice| {
            forced_episode(&model, choice, world.clone(), &spec, seed, planners, actor_config, &config.limits)
        };
        let (reward_first, features) = run(ReportChoice::First);
        let (reward_second, _) = run(ReportChoice::Second);
        cases.push(EvalCase { features, reward_first, reward_second });
    }

    let mut curve = LearningCurve::default();
    curve.push(0, expected_success(&model, &cases));
    let mut baseline = 0.5;

    for i in 0..config.episodes {
        let seed = config.base_seed + i as u64;
        let (world, spec) = generate(kind, seed)?;
        let mut planner = planners(&spec, seed);
        let mut actor = ScriptedActor::new(*actor_config, seed);
        let mut reporter =
            Reporter::new(ReporterKind::Learned(model.clone()), seed).with_mode(HeadMode::Sample);
        let result = run_episode(planner.as_mut(), &mut actor, &mut reporter, world, &spec, &config.limits);
        let decisions: Vec<ReportDecision> = reporter.take_decisions();

        for d in &decisions {
            let chose_first = f64::from(d.choice.is_first());
            let scale = if config.supervised {
                f64::from(d.truthful.is_first()) - d.prob_first
            } else {
                (result.reward - baseline) * (chose_first - d.prob_first)
            };
            for (w, x) in model.weights.iter_mut().zip(&d.features) {
                *w += config.learning_rate * scale * x;
            }
        }
        baseline += config.baseline_decay * (result.reward - baseline);

        let done = i + 1;
        if done % config.eval_every == 0 || done == config.episodes {
            let rate = expected_success(&model, &cases);
            curve.push(done, rate);
            if done >= config.patience && rate < config.min_success {
                return Err(TrainError::Diverged { rate, threshold: config.min_success, episodes: done });
            }
        }
    }
    Ok((model, curve))
}

/// Fraction of fresh layouts on which the greedy head matches the truth.
/// For the location task the agent is placed on the decider, where the
/// report is normally made.
pub fn evaluate_agreement(model: &LearnedReporter, layouts: usize, base_seed: u64) -> Result<f64, TrainError> {
    let mut agree = 0;
    for j in 0..layouts {
        let (world, spec) = generate(model.task.kind(), base_seed + j as u64)?;
        let (observation, truth) = match model.task {
            VisualTask::Location => {
                let decider = spec.decider().expect("location task has a decider");
                let mut layout = world.layout().clone();
                layout.agent = world.object(decider).expect("decider present").position;
                let on_decider = GridWorld::from_layout(layout);
                (on_decider.observe(), close_to_wall(&world, decider)?)
            }
            VisualTask::Color => (world.observe(), world.agent_color().group() == ColorGroup::Warm),
        };
        debug_assert_eq!(truthful_choice(model.task, &observation).is_first(), truth);
        let predicted = model.prob_first(&observation) >= 0.5;
        agree += usize::from(predicted == truth);
    }
    Ok(agree as f64 / layouts.max(1) as f64)
}
