//! Planner backends: scripted oracles, noise-handling strategies, and a
//! completion-endpoint client.

mod fewshot;
mod llm;
mod oracle;

pub use fewshot::{
    conditional_corpus, default_corpus, example_pool, example_world, fixture_body, sample_corpus, search_corpus,
    CONDITIONAL_FIXTURE, FEW_SHOT_COUNT, MIN_POOL_SIZE, SEARCH_FIXTURE,
};
pub use llm::{CompletionBackend, CompletionRequest, LlmPlanner, LlmSettings};
pub use oracle::{naive_next, oracle_next, OracleState};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::PlannerError;
use crate::protocol::{parse_instruction, Report, Role, Transcript, Verb};
use crate::rng::{stream_rng, Stream};
use crate::tasks::{TaskBinding, TaskSpec};

pub trait Planner {
    /// Raw text for the next LM turn.
    fn next_instruction(&mut self, transcript: &Transcript) -> Result<String, PlannerError>;
}

/// Builds a fresh planner for one episode.
pub type PlannerFactory<'a> = dyn Fn(&TaskSpec, u64) -> Box<dyn Planner> + Sync + 'a;

pub fn oracle_factory(spec: &TaskSpec, _seed: u64) -> Box<dyn Planner> {
    Box::new(ScriptedPlanner::new(Strategy::Oracle, spec, 0))
}

/// Scripted policies that need no model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    Oracle,
    /// Re-issue the last instruction after a movement report or silence.
    Repeat,
    /// After a movement report or silence, examine the next object in turn.
    Cycle,
    /// Oracle that takes every Agent turn as the answer it asked for.
    Naive,
    /// One uniformly random pickup.
    RandomPickup,
}

impl Strategy {
    pub const ALL: [Strategy; 5] =
        [Strategy::Oracle, Strategy::Repeat, Strategy::Cycle, Strategy::Naive, Strategy::RandomPickup];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Oracle => "oracle",
            Strategy::Repeat => "repeat",
            Strategy::Cycle => "cycle",
            Strategy::Naive => "naive",
            Strategy::RandomPickup => "random",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown planner strategy {s:?}"))
    }
}

#[derive(Debug, Clone)]
pub struct ScriptedPlanner {
    strategy: Strategy,
    binding: TaskBinding,
    object_names: Vec<String>,
    rng: ChaCha8Rng,
}

impl ScriptedPlanner {
    pub fn new(strategy: Strategy, spec: &TaskSpec, seed: u64) -> Self {
        Self {
            strategy,
            binding: spec.binding.clone(),
            object_names: spec.object_names.clone(),
            rng: stream_rng(seed, Stream::Planner),
        }
    }

    fn cycle_next(&self, state: &OracleState, transcript: &Transcript) -> Option<String> {
        let last = state.pending.as_deref()?;
        let instruction = parse_instruction(last, &self.object_names).ok()?;
        if instruction.verb != Verb::Examine || !newest_agent_turn_is_noise(transcript) {
            return None;
        }
        let ring = &self.object_names[..self.object_names.len().min(4)];
        let at = ring.iter().position(|o| *o == instruction.object)?;
        let next = &ring[(at + 1) % ring.len()];
        Some(crate::protocol::Instruction::examine(next).to_string())
    }
}

impl Planner for ScriptedPlanner {
    fn next_instruction(&mut self, transcript: &Transcript) -> Result<String, PlannerError> {
        let state = OracleState::from_transcript(self.binding.clone(), transcript);
        let instruction = match self.strategy {
            Strategy::Oracle => oracle_next(&state)?,
            Strategy::Naive => naive_next(&state, transcript)?,
            Strategy::Repeat => {
                if state.is_finished() {
                    return Err(PlannerError::Finished);
                }
                match &state.pending {
                    Some(last) if newest_agent_turn_is_noise(transcript) => return Ok(last.clone()),
                    _ => oracle_next(&state)?,
                }
            }
            Strategy::Cycle => {
                if state.is_finished() {
                    return Err(PlannerError::Finished);
                }
                match self.cycle_next(&state, transcript) {
                    Some(text) => return Ok(text),
                    None => oracle_next(&state)?,
                }
            }
            Strategy::RandomPickup => {
                if transcript.count(Role::Lm) > 0 {
                    return Err(PlannerError::Finished);
                }
                let pick = &self.object_names[self.rng.random_range(0..self.object_names.len())];
                crate::protocol::Instruction::pickup(pick)
            }
        };
        Ok(instruction.to_string())
    }
}

/// True when the newest turn is an Agent turn that is empty or movement chatter.
fn newest_agent_turn_is_noise(transcript: &Transcript) -> bool {
    match transcript.last() {
        Some(turn) if turn.role == Role::Agent => {
            turn.text.is_empty() || Report::parse(&turn.text).is_some_and(|r| r.is_irrelevant())
        }
        _ => false,
    }
}
