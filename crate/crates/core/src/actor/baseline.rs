//! Flat policy baseline: a linear softmax over object-level macro actions,
//! trained from episode reward alone with no Planner or Reporter.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::actor::{ActorConfig, ScriptedActor};
use crate::curve::LearningCurve;
use crate::error::TrainError;
use crate::gridworld::{EnvEvent, GridWorld, SecretValue, Termination};
use crate::protocol::Instruction;
use crate::rng::{stream_rng, Stream};
use crate::tasks::{generate, TaskKind, TaskSpec};

const SLOTS: usize = 4;
const BLOCK: usize = SLOTS + 1 + 4 + 1;
const FEATURES: usize = 2 * BLOCK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MacroAction {
    Examine(usize),
    Pickup(usize),
}

impl MacroAction {
    pub const ALL: [MacroAction; 2 * SLOTS] = [
        MacroAction::Examine(0),
        MacroAction::Examine(1),
        MacroAction::Examine(2),
        MacroAction::Examine(3),
        MacroAction::Pickup(0),
        MacroAction::Pickup(1),
        MacroAction::Pickup(2),
        MacroAction::Pickup(3),
    ];
}

/// What the policy can see: which slots it has examined and the value
/// returned by the latest examine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BaselineState {
    pub examined: [bool; SLOTS],
    pub last_value: Option<SecretValue>,
}

/// Features of one action: a per-verb block holding the slot one-hot, the
/// slot's examined flag, the latest examine value one-hot, and a bias.
pub fn baseline_features(state: &BaselineState, action: MacroAction) -> [f64; FEATURES] {
    let (offset, slot) = match action {
        MacroAction::Examine(j) => (0, j),
        MacroAction::Pickup(j) => (BLOCK, j),
    };
    let mut x = [0.0; FEATURES];
    x[offset + slot] = 1.0;
    x[offset + SLOTS] = f64::from(u8::from(state.examined[slot]));
    let last = match state.last_value {
        None => 0,
        Some(SecretValue::Good) => 1,
        Some(SecretValue::Bad) => 2,
        Some(SecretValue::Unknown) => 3,
    };
    x[offset + SLOTS + 1 + last] = 1.0;
    x[offset + BLOCK - 1] = 1.0;
    x
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePolicy {
    pub weights: Vec<f64>,
}

impl Default for BaselinePolicy {
    fn default() -> Self {
        Self { weights: vec![0.0; FEATURES] }
    }
}

impl BaselinePolicy {
    pub fn probabilities(&self, state: &BaselineState) -> [f64; 2 * SLOTS] {
        let mut scores = MacroAction::ALL.map(|a| dot(&self.weights, &baseline_features(state, a)));
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for s in &mut scores {
            *s = (*s - max).exp();
            total += *s;
        }
        scores.map(|s| s / total)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineConfig {
    pub episodes: usize,
    pub learning_rate: f64,
    pub baseline_decay: f64,
    /// Macro actions allowed per episode.
    pub max_decisions: usize,
    pub base_seed: u64,
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub eval_seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            episodes: 4000,
            learning_rate: 0.2,
            baseline_decay: 0.05,
            max_decisions: 6,
            base_seed: 0,
            eval_every: 250,
            eval_episodes: 400,
            eval_seed: 2_000_000,
        }
    }
}

struct Step {
    state: BaselineState,
    action: usize,
}

fn rollout(
    policy: &BaselinePolicy,
    mut world: GridWorld,
    spec: &TaskSpec,
    seed: u64,
    max_decisions: usize,
) -> (f64, Vec<Step>) {
    let mut rng = stream_rng(seed, Stream::Trainer);
    let mut actor = ScriptedActor::new(ActorConfig::default(), seed);
    let mut state = BaselineState::default();
    let mut steps = Vec::new();
    for _ in 0..max_decisions {
        if world.is_done() {
            break;
        }
        let probs = policy.probabilities(&state);
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let action = probs
            .iter()
            .position(|p| {
                acc += p;
                u < acc
            })
            .unwrap_or(probs.len() - 1);
        steps.push(Step { state, action });
        let instruction = match MacroAction::ALL[action] {
            MacroAction::Examine(j) => Instruction::examine(&spec.object_names[j]),
            MacroAction::Pickup(j) => Instruction::pickup(&spec.object_names[j]),
        };
        for event in actor.execute(&instruction, &mut world) {
            if let EnvEvent::Examined { name, secret } = event {
                if let Some(j) = spec.object_names.iter().position(|n| *n == name) {
                    state.examined[j] = true;
                }
                state.last_value = Some(secret);
            }
        }
    }
    let reward = match world.termination() {
        Some(Termination::Pickup { reward }) => reward,
        _ => 0.0,
    };
    (reward, steps)
}

fn evaluate(policy: &BaselinePolicy, kind: TaskKind, config: &BaselineConfig) -> Result<f64, TrainError> {
    let mut total = 0.0;
    for j in 0..config.eval_episodes {
        let seed = config.eval_seed + j as u64;
        let (world, spec) = generate(kind, seed)?;
        total += rollout(policy, world, &spec, seed, config.max_decisions).0;
    }
    Ok(total / config.eval_episodes.max(1) as f64)
}

/// REINFORCE with a moving-average baseline on a secret-property task.
pub fn train_baseline(kind: TaskKind, config: &BaselineConfig) -> Result<(BaselinePolicy, LearningCurve), TrainError> {
    if !matches!(kind, TaskKind::ConditionalSecret | TaskKind::SearchSecret) {
        return Err(TrainError::UnsupportedTask(kind));
    }
    let mut policy = BaselinePolicy::default();
    let mut curve = LearningCurve::default();
    curve.push(0, evaluate(&policy, kind, config)?);
    let mut baseline = 0.0;

    for i in 0..config.episodes {
        let seed = config.base_seed + i as u64;
        let (world, spec) = generate(kind, seed)?;
        let (reward, steps) = rollout(&policy, world, &spec, seed, config.max_decisions);
        let advantage = reward - baseline;
        let mut grad = vec![0.0; FEATURES];
        for step in &steps {
            let probs = policy.probabilities(&step.state);
            for (b, &action) in MacroAction::ALL.iter().enumerate() {
                let indicator = if b == step.action { 1.0 } else { 0.0 };
                let x = baseline_features(&step.state, action);
                for (g, xi) in grad.iter_mut().zip(x) {
                    *g += (indicator - probs[b]) * xi;
                }
            }
        }
        for (w, g) in policy.weights.iter_mut().zip(grad) {
            *w += config.learning_rate * advantage * g;
        }
        baseline += config.baseline_decay * (reward - baseline);

        let done = i + 1;
        if done % config.eval_every == 0 || done == config.episodes {
            curve.push(done, evaluate(&policy, kind, config)?);
        }
    }
    Ok((policy, curve))
}

/// Success of a single uniformly random pickup, by enumeration.
pub fn uniform_pickup_success(spec: &TaskSpec) -> f64 {
    let hits = spec.object_names.iter().filter(|n| n.as_str() == spec.correct()).count();
    hits as f64 / spec.object_names.len() as f64
}
