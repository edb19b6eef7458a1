//! The fixed report sentences the Reporter can produce.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::gridworld::{Direction, SecretValue};
use crate::vocab::ColorGroup;

/// Agent-turn text appended when Planner output cannot be parsed.
pub const PARSE_FAILURE_REPORT: &str = "I could not follow that instruction.";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Report {
    Examined { name: String, value: SecretValue },
    PickedUp { name: String },
    Moved(Direction),
    WallProximity { close: bool },
    AgentColor(ColorGroup),
    CouldNotFollow,
}

impl Report {
    /// Movement chatter carries nothing the Planner needs.
    pub fn is_irrelevant(&self) -> bool {
        matches!(self, Report::Moved(_))
    }

    pub fn parse(text: &str) -> Option<Report> {
        if text == PARSE_FAILURE_REPORT {
            return Some(Report::CouldNotFollow);
        }
        if let Some(rest) = text.strip_prefix("I examined ") {
            let (name, value) = rest.split_once(". Its secret property has value ")?;
            let value = SecretValue::parse(value.strip_suffix('.')?)?;
            return Some(Report::Examined { name: name.to_string(), value });
        }
        if let Some(name) = text.strip_prefix("I picked up ").and_then(|r| r.strip_suffix('.')) {
            return Some(Report::PickedUp { name: name.to_string() });
        }
        if let Some(dir) = text.strip_prefix("I have moved ").and_then(|r| r.strip_suffix('.')) {
            return Direction::ALL.iter().find(|d| d.as_str() == dir).map(|&d| Report::Moved(d));
        }
        match text {
            "The object is close to the wall." => Some(Report::WallProximity { close: true }),
            "The object is far from the wall." => Some(Report::WallProximity { close: false }),
            "I am a warm color." => Some(Report::AgentColor(ColorGroup::Warm)),
            "I am a cool color." => Some(Report::AgentColor(ColorGroup::Cool)),
            _ => None,
        }
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Report::Examined { name, value } => {
                write!(f, "I examined {name}. Its secret property has value {}.", value.as_str())
            }
            Report::PickedUp { name } => write!(f, "I picked up {name}."),
            Report::Moved(d) => write!(f, "I have moved {}.", d.as_str()),
            Report::WallProximity { close: true } => f.write_str("The object is close to the wall."),
            Report::WallProximity { close: false } => f.write_str("The object is far from the wall."),
            Report::AgentColor(g) => write!(f, "I am a {} color.", g.as_str()),
            Report::CouldNotFollow => f.write_str(PARSE_FAILURE_REPORT),
        }
    }
}
