use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::InstructionError;
use crate::protocol::transcript::EOS;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verb {
    Examine,
    Pickup,
}

/// A parsed Planner command naming one object in the room.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Instruction {
    pub verb: Verb,
    pub object: String,
}

impl Instruction {
    pub fn examine(object: impl Into<String>) -> Self {
        Self { verb: Verb::Examine, object: object.into() }
    }

    pub fn pickup(object: impl Into<String>) -> Self {
        Self { verb: Verb::Pickup, object: object.into() }
    }
}

/// Canonical Planner phrasing, e.g. `Pickup checker brown tee.`
impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.verb {
            Verb::Examine => write!(f, "Examine {}.", self.object),
            Verb::Pickup => write!(f, "Pickup {}.", self.object),
        }
    }
}

/// Cuts raw Planner output at the first `<EOS>` or newline and trims it.
pub fn truncate_output(raw: &str) -> &str {
    let eos = raw.find(EOS).unwrap_or(raw.len());
    let newline = raw.find('\n').unwrap_or(raw.len());
    raw[..eos.min(newline)].trim()
}

/// Parses raw Planner text into an instruction over the room's objects.
pub fn parse_instruction(raw: &str, known_objects: &[String]) -> Result<Instruction, InstructionError> {
    let line = truncate_output(raw);
    let lower = line.to_lowercase();

    let (verb, rest) = [("examine", Verb::Examine), ("pickup", Verb::Pickup), ("pick up", Verb::Pickup)]
        .iter()
        .find_map(|(word, verb)| {
            let rest = lower.strip_prefix(word)?;
            (rest.is_empty() || rest.starts_with(char::is_whitespace)).then_some((*verb, rest))
        })
        .ok_or_else(|| InstructionError::NoVerb(line.to_string()))?;

    let mut object = rest.trim();
    object = object.strip_suffix('.').unwrap_or(object).trim_end();
    if let Some(stripped) = object.strip_prefix("the ") {
        // keep "the" only if some object name itself starts with it
        if !known_objects.iter().any(|k| k.to_lowercase() == object) {
            object = stripped.trim_start();
        }
    }

    let matches: Vec<&String> = known_objects.iter().filter(|k| k.to_lowercase() == object).collect();
    match matches.as_slice() {
        [] => Err(InstructionError::NoObject(line.to_string())),
        [one] => Ok(Instruction { verb, object: (*one).clone() }),
        _ => Err(InstructionError::Ambiguous(line.to_string())),
    }
}
