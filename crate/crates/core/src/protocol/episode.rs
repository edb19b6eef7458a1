use serde::{Deserialize, Serialize};

use crate::actor::ScriptedActor;
use crate::error::PlannerError;
use crate::gridworld::{EnvEvent, GridWorld, Termination, DEFAULT_STEP_LIMIT};
use crate::planner::Planner;
use crate::protocol::instruction::{parse_instruction, truncate_output};
use crate::protocol::report::PARSE_FAILURE_REPORT;
use crate::protocol::transcript::Transcript;
use crate::reporter::Reporter;
use crate::tasks::{reward_of, TaskSpec};

pub const DEFAULT_MAX_PLANNER_TURNS: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Limits {
    pub max_planner_turns: u32,
    pub step_limit: u32,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_planner_turns: DEFAULT_MAX_PLANNER_TURNS, step_limit: DEFAULT_STEP_LIMIT }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FailureTag {
    /// Turn budget spent without the Planner ever producing a usable instruction.
    ParseFailure,
    TurnLimit,
    StepLimit,
    WrongPickup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub seed: u64,
    pub reward: f64,
    pub env_steps: u32,
    pub planner_turns: u32,
    pub transcript: Transcript,
    pub events: Vec<EnvEvent>,
    pub failure_tag: Option<FailureTag>,
    /// Planner turns lost to completion-endpoint failures.
    pub transport_failures: u32,
}

/// Runs one Planner-Actor-Reporter episode.
///
/// Each planner turn yields one instruction, which the actor carries out in
/// full (or until its budget or the episode runs out). Only the first report
/// produced along the way becomes the Agent turn, so a movement report can
/// mask the result the Planner asked for. If nothing was reported the Agent
/// turn is empty.
pub fn run_episode(
    planner: &mut dyn Planner,
    actor: &mut ScriptedActor,
    reporter: &mut Reporter,
    mut world: GridWorld,
    spec: &TaskSpec,
    limits: &Limits,
) -> EpisodeResult {
    world.set_step_limit(limits.step_limit);
    let mut transcript = Transcript::new(spec.question.clone());
    let mut events = Vec::new();
    let mut planner_turns = 0;
    let mut parsed_turns = 0;
    let mut transport_failures = 0;
    let mut turn_limited = false;

    if let Some(text) = reporter.initial_report(&world.observe(), spec) {
        transcript.push_agent(text);
    }

    while !world.is_done() {
        if planner_turns >= limits.max_planner_turns {
            turn_limited = true;
            break;
        }
        planner_turns += 1;

        let raw = match planner.next_instruction(&transcript) {
            Ok(raw) => raw,
            Err(PlannerError::Transport { .. }) => {
                transport_failures += 1;
                String::new()
            }
            Err(_) => String::new(),
        };
        transcript.push_lm(truncate_output(&raw));
        let instruction = match parse_instruction(&raw, &spec.object_names) {
            Ok(instruction) => instruction,
            Err(_) => {
                transcript.push_agent(PARSE_FAILURE_REPORT);
                continue;
            }
        };
        parsed_turns += 1;

        let mut agent_text = String::new();
        match actor.plan(&instruction, &world) {
            None => events.push(EnvEvent::NoOp),
            Some(plan) => {
                let budget = actor.config().budget as usize;
                for action in plan.actions.into_iter().take(budget) {
                    let Ok(outcome) = world.step(action) else { break };
                    let report = reporter.report(&outcome.event, &outcome.observation, spec);
                    events.push(outcome.event);
                    if let (true, Some(text)) = (agent_text.is_empty(), report) {
                        agent_text = text;
                    }
                    if outcome.done {
                        break;
                    }
                }
            }
        }
        transcript.push_agent(agent_text);
    }

    let (reward, failure_tag) = match world.termination() {
        Some(Termination::Pickup { .. }) => {
            let picked = world.inventory().last().cloned().unwrap_or_default();
            let reward = reward_of(spec, &picked, &events);
            (reward, (reward == 0.0).then_some(FailureTag::WrongPickup))
        }
        Some(Termination::StepLimit) => (0.0, Some(FailureTag::StepLimit)),
        None => {
            debug_assert!(turn_limited);
            let tag = if planner_turns > 0 && parsed_turns == 0 {
                FailureTag::ParseFailure
            } else {
                FailureTag::TurnLimit
            };
            (0.0, Some(tag))
        }
    };
    transcript.done = world.is_done();

    EpisodeResult {
        seed: world.seed(),
        reward,
        env_steps: world.step_count(),
        planner_turns,
        transcript,
        events,
        failure_tag,
        transport_failures,
    }
}
