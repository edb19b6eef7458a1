use std::collections::HashMap;

use crate::error::PlannerError;
use crate::gridworld::SecretValue;
use crate::protocol::{Instruction, Report, Role, Transcript};
use crate::tasks::{Condition, TaskBinding};
use crate::vocab::ColorGroup;

/// Everything the dialogue so far has revealed, read back from Agent turns.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleState {
    pub binding: TaskBinding,
    pub examined: HashMap<String, SecretValue>,
    pub picked: Vec<String>,
    /// Latest wall-proximity report.
    pub close_to_wall: Option<bool>,
    /// Latest color report.
    pub color: Option<ColorGroup>,
    /// Last LM text, parsed if it was a well-formed instruction.
    pub pending: Option<String>,
}

impl OracleState {
    pub fn from_transcript(binding: TaskBinding, transcript: &Transcript) -> Self {
        let mut state = OracleState {
            binding,
            examined: HashMap::new(),
            picked: Vec::new(),
            close_to_wall: None,
            color: None,
            pending: None,
        };
        for turn in transcript.dialogue() {
            match turn.role {
                Role::Lm => state.pending = Some(turn.text.clone()),
                Role::Agent => state.observe(&turn.text),
                Role::Question => {}
            }
        }
        state
    }

    fn observe(&mut self, text: &str) {
        match Report::parse(text) {
            Some(Report::Examined { name, value }) => {
                self.examined.insert(name, value);
            }
            Some(Report::PickedUp { name }) => self.picked.push(name),
            Some(Report::WallProximity { close }) => self.close_to_wall = Some(close),
            Some(Report::AgentColor(group)) => self.color = Some(group),
            Some(Report::Moved(_) | Report::CouldNotFollow) | None => {}
        }
    }

    pub fn value_of(&self, name: &str) -> Option<SecretValue> {
        self.examined.get(name).copied()
    }

    pub fn is_finished(&self) -> bool {
        match &self.binding {
            TaskBinding::Steps { sequence } => self.picked.len() >= sequence.len(),
            _ => !self.picked.is_empty(),
        }
    }
}

/// The optimal next instruction given what the transcript has revealed.
pub fn oracle_next(state: &OracleState) -> Result<Instruction, PlannerError> {
    if state.is_finished() {
        return Err(PlannerError::Finished);
    }
    let choose = |condition: bool, if_true: &str, if_false: &str| {
        Instruction::pickup(if condition { if_true } else { if_false })
    };
    Ok(match &state.binding {
        TaskBinding::Conditional { condition, decider, if_true, if_false } => {
            let decider = decider.as_deref().unwrap_or_default();
            match condition {
                Condition::SecretGood => match state.value_of(decider) {
                    Some(value @ (SecretValue::Good | SecretValue::Bad)) => {
                        choose(value == SecretValue::Good, if_true, if_false)
                    }
                    _ => Instruction::examine(decider),
                },
                Condition::CloseToWall => match state.close_to_wall {
                    Some(close) => choose(close, if_true, if_false),
                    None => Instruction::examine(decider),
                },
                Condition::WarmColor => {
                    choose(state.color.is_none_or(|g| g == ColorGroup::Warm), if_true, if_false)
                }
            }
        }
        TaskBinding::Search { order } => {
            if let Some(good) = order.iter().find(|o| state.value_of(o) == Some(SecretValue::Good)) {
                Instruction::pickup(good)
            } else if let Some(next) = order.iter().find(|o| state.value_of(o).is_none()) {
                Instruction::examine(next)
            } else {
                Instruction::pickup(&order[order.len() - 1])
            }
        }
        TaskBinding::Elimination { .. } => {
            Instruction::pickup(state.binding.remaining().unwrap_or_default())
        }
        TaskBinding::Steps { sequence } => Instruction::pickup(&sequence[state.picked.len()]),
    })
}

/// Oracle that trusts every Agent turn: it treats whatever came back after an
/// examine as that examine's answer and moves on.
pub fn naive_next(state: &OracleState, transcript: &Transcript) -> Result<Instruction, PlannerError> {
    if state.is_finished() {
        return Err(PlannerError::Finished);
    }
    let answered = answered_turns(transcript);
    match &state.binding {
        TaskBinding::Search { order } => {
            if let Some(good) = order.iter().find(|o| state.value_of(o) == Some(SecretValue::Good)) {
                return Ok(Instruction::pickup(good));
            }
            if answered < order.len() {
                return Ok(Instruction::examine(&order[answered]));
            }
            let fallback = order
                .iter()
                .rev()
                .find(|o| state.value_of(o) != Some(SecretValue::Bad))
                .unwrap_or(&order[order.len() - 1]);
            Ok(Instruction::pickup(fallback))
        }
        TaskBinding::Conditional { condition: Condition::SecretGood, decider, if_true, if_false } if answered > 0 => {
            let good = decider.as_deref().and_then(|d| state.value_of(d)) == Some(SecretValue::Good);
            Ok(Instruction::pickup(if good { if_true } else { if_false }))
        }
        _ => oracle_next(state),
    }
}

/// Agent turns that answer an LM turn.
fn answered_turns(transcript: &Transcript) -> usize {
    let dialogue = transcript.dialogue();
    dialogue
        .windows(2)
        .filter(|w| w[0].role == Role::Lm && w[1].role == Role::Agent)
        .count()
}
