//! Turns environment events into the text the Planner reads.

mod learned;

pub use learned::{
    evaluate_agreement, train_reporter, LearnedReporter, ReportChoice, ReporterTrainConfig, VisualTask,
};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::gridworld::{Direction, EnvEvent, Observation};
use crate::protocol::Report;
use crate::rng::{stream_rng, Stream};
use crate::tasks::{Condition, TaskBinding, TaskSpec};

#[derive(Debug, Clone, PartialEq)]
pub enum ReporterKind {
    Truthful,
    /// Truthful, plus each movement independently reported with probability `p`.
    Noisy { p: f64 },
    Learned(LearnedReporter),
}

/// How the learned head turns probabilities into a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeadMode {
    #[default]
    Greedy,
    Sample,
    /// Always emit the given choice. Used to score both branches of a report.
    Forced(ReportChoice),
}

/// A binary report made by the learned head, kept for policy-gradient updates.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportDecision {
    pub features: Vec<f64>,
    pub choice: ReportChoice,
    pub prob_first: f64,
    /// What an accurate reporter would have said.
    pub truthful: ReportChoice,
}

#[derive(Debug, Clone)]
pub struct Reporter {
    kind: ReporterKind,
    mode: HeadMode,
    rng: ChaCha8Rng,
    decisions: Vec<ReportDecision>,
}

impl Reporter {
    pub fn new(kind: ReporterKind, seed: u64) -> Self {
        Self { kind, mode: HeadMode::default(), rng: stream_rng(seed, Stream::Reporter), decisions: Vec::new() }
    }

    pub fn truthful() -> Self {
        Self::new(ReporterKind::Truthful, 0)
    }

    pub fn with_mode(mut self, mode: HeadMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn kind(&self) -> &ReporterKind {
        &self.kind
    }

    /// Decisions made by the learned head since the last call.
    pub fn take_decisions(&mut self) -> Vec<ReportDecision> {
        std::mem::take(&mut self.decisions)
    }

    /// Report available at spawn, before any instruction. Only the color task
    /// has one: the agent's color is visible from the first frame.
    pub fn initial_report(&mut self, observation: &Observation, spec: &TaskSpec) -> Option<String> {
        match &spec.binding {
            TaskBinding::Conditional { condition: Condition::WarmColor, .. } => {
                Some(self.visual_report(VisualTask::Color, observation).to_string())
            }
            _ => None,
        }
    }

    pub fn report(&mut self, event: &EnvEvent, observation: &Observation, spec: &TaskSpec) -> Option<String> {
        let report = match event {
            EnvEvent::Examined { name, secret } => {
                let is_location_decider = matches!(
                    &spec.binding,
                    TaskBinding::Conditional { condition: Condition::CloseToWall, decider: Some(d), .. } if d == name
                );
                if is_location_decider {
                    self.visual_report(VisualTask::Location, observation)
                } else {
                    Report::Examined { name: name.clone(), value: *secret }
                }
            }
            EnvEvent::PickedUp { name } => Report::PickedUp { name: name.clone() },
            EnvEvent::Moved { direction } => match self.kind {
                ReporterKind::Noisy { p } if self.rng.random_bool(p.clamp(0.0, 1.0)) => Report::Moved(*direction),
                _ => return None,
            },
            EnvEvent::Bumped | EnvEvent::NoOp => return None,
        };
        Some(report.to_string())
    }

    fn visual_report(&mut self, task: VisualTask, observation: &Observation) -> Report {
        let choice = match &self.kind {
            ReporterKind::Learned(model) if model.task == task => {
                let features = model.features(observation);
                let prob_first = model.prob_first_from(&features);
                let choice = match self.mode {
                    HeadMode::Greedy => ReportChoice::from_first(prob_first >= 0.5),
                    HeadMode::Sample => ReportChoice::from_first(self.rng.random_bool(prob_first)),
                    HeadMode::Forced(c) => c,
                };
                let truthful = truthful_choice(task, observation);
                self.decisions.push(ReportDecision { features, choice, prob_first, truthful });
                choice
            }
            _ => truthful_choice(task, observation),
        };
        choice.report(task)
    }
}

/// What an accurate reporter says, read off the observation.
pub fn truthful_choice(task: VisualTask, observation: &Observation) -> ReportChoice {
    let first = match task {
        VisualTask::Location => Direction::ALL
            .iter()
            .any(|&d| observation.wall_distance(d) == Some(1)),
        VisualTask::Color => observation.agent_color.group() == crate::vocab::ColorGroup::Warm,
    };
    ReportChoice::from_first(first)
}
