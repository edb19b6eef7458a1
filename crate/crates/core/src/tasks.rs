//! Task families, their question strings, and reward predicates.
//!
//! Every task instance fixes its correct pickup sequence at generation time:
//! secrets, starting positions and the agent color never change during an
//! episode, so `TaskSpec::targets` is the whole reward predicate.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::seq::SliceRandom;
use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{EnvError, TaskError};
use crate::gridworld::{Cell, EnvEvent, GridWorld, LayoutRequest, SecretValue, GRID_SIZE};
use crate::rng::{stream_rng, Stream};
use crate::vocab::{ColorGroup, ObjectAttributes};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskKind {
    ConditionalSecret,
    SearchSecret,
    OptionElimination,
    /// Pick up this many named objects in order (2 or 3).
    BasicSteps(u8),
    VisualColorConditional,
    VisualLocationConditional,
}

impl TaskKind {
    pub const ALL: [TaskKind; 7] = [
        TaskKind::ConditionalSecret,
        TaskKind::SearchSecret,
        TaskKind::OptionElimination,
        TaskKind::BasicSteps(2),
        TaskKind::BasicSteps(3),
        TaskKind::VisualColorConditional,
        TaskKind::VisualLocationConditional,
    ];

    pub fn is_visual(self) -> bool {
        matches!(self, TaskKind::VisualColorConditional | TaskKind::VisualLocationConditional)
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TaskKind::ConditionalSecret => f.write_str("conditional-secret"),
            TaskKind::SearchSecret => f.write_str("search-secret"),
            TaskKind::OptionElimination => f.write_str("option-elimination"),
            TaskKind::BasicSteps(n) => write!(f, "basic-steps-{n}"),
            TaskKind::VisualColorConditional => f.write_str("visual-color"),
            TaskKind::VisualLocationConditional => f.write_str("visual-location"),
        }
    }
}

impl FromStr for TaskKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "conditional-secret" | "conditional" => Ok(TaskKind::ConditionalSecret),
            "search-secret" | "search" => Ok(TaskKind::SearchSecret),
            "option-elimination" | "elimination" => Ok(TaskKind::OptionElimination),
            "basic-steps-2" => Ok(TaskKind::BasicSteps(2)),
            "basic-steps-3" => Ok(TaskKind::BasicSteps(3)),
            "visual-color" => Ok(TaskKind::VisualColorConditional),
            "visual-location" => Ok(TaskKind::VisualLocationConditional),
            other => Err(format!("unknown task kind {other:?}")),
        }
    }
}

/// What a conditional task branches on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Condition {
    /// The decider's secret is good.
    SecretGood,
    /// The decider starts next to the border wall.
    CloseToWall,
    /// The agent's color is in the warm half of the palette.
    WarmColor,
}

/// Names bound into a task's question.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TaskBinding {
    Conditional {
        condition: Condition,
        /// Absent for the color task, which has no decider object.
        decider: Option<String>,
        if_true: String,
        if_false: String,
    },
    Search {
        order: Vec<String>,
    },
    Elimination {
        template: usize,
        options: Vec<String>,
        eliminated: Vec<String>,
    },
    Steps {
        sequence: Vec<String>,
    },
}

impl TaskBinding {
    pub fn question(&self) -> String {
        match self {
            TaskBinding::Conditional { condition, decider, if_true, if_false } => match condition {
                Condition::SecretGood => format!(
                    "If the {} is good, pickup {if_true}. Otherwise, pickup {if_false}.",
                    decider.as_deref().unwrap_or_default()
                ),
                Condition::CloseToWall => format!(
                    "If the {} is close to the wall, pick up {if_true}, otherwise pick up {if_false}.",
                    decider.as_deref().unwrap_or_default()
                ),
                Condition::WarmColor => {
                    format!("If you are a warm color, pick up {if_true}, otherwise pick up {if_false}.")
                }
            },
            TaskBinding::Search { order } => format!(
                "The objects in the room are {}. Get the object with a good secret property.",
                join_and(order)
            ),
            TaskBinding::Elimination { template, options, eliminated } => {
                ELIMINATION_TEMPLATES[*template].render(options, eliminated)
            }
            TaskBinding::Steps { sequence } => {
                format!("Pick up {} in that order.", join_and(sequence))
            }
        }
    }

    /// Recovers the binding from a question produced by [`TaskBinding::question`].
    pub fn parse(question: &str) -> Result<TaskBinding, TaskError> {
        let q = question.trim();
        let unrecognized = || TaskError::UnrecognizedQuestion(q.to_string());
        let patterns = question_patterns();

        if let Some(c) = patterns.secret.captures(q) {
            return Ok(TaskBinding::Conditional {
                condition: Condition::SecretGood,
                decider: Some(checked_name(&c["d"]).ok_or_else(unrecognized)?),
                if_true: checked_name(&c["t"]).ok_or_else(unrecognized)?,
                if_false: checked_name(&c["f"]).ok_or_else(unrecognized)?,
            });
        }
        if let Some(c) = patterns.location.captures(q) {
            return Ok(TaskBinding::Conditional {
                condition: Condition::CloseToWall,
                decider: Some(checked_name(&c["d"]).ok_or_else(unrecognized)?),
                if_true: checked_name(&c["t"]).ok_or_else(unrecognized)?,
                if_false: checked_name(&c["f"]).ok_or_else(unrecognized)?,
            });
        }
        if let Some(c) = patterns.color.captures(q) {
            return Ok(TaskBinding::Conditional {
                condition: Condition::WarmColor,
                decider: None,
                if_true: checked_name(&c["t"]).ok_or_else(unrecognized)?,
                if_false: checked_name(&c["f"]).ok_or_else(unrecognized)?,
            });
        }
        if let Some(c) = patterns.search.captures(q) {
            let order = split_and(&c["list"]).ok_or_else(unrecognized)?;
            if order.len() == 4 {
                return Ok(TaskBinding::Search { order });
            }
        }
        if let Some(c) = patterns.steps.captures(q) {
            let sequence = split_and(&c["list"]).ok_or_else(unrecognized)?;
            if (2..=3).contains(&sequence.len()) {
                return Ok(TaskBinding::Steps { sequence });
            }
        }
        for (template, t) in ELIMINATION_TEMPLATES.iter().enumerate() {
            if let Some((options, eliminated)) = t.parse(q) {
                return Ok(TaskBinding::Elimination { template, options, eliminated });
            }
        }
        Err(unrecognized())
    }

    pub fn decider(&self) -> Option<&str> {
        match self {
            TaskBinding::Conditional { decider, .. } => decider.as_deref(),
            _ => None,
        }
    }

    pub fn branch_targets(&self) -> Option<(&str, &str)> {
        match self {
            TaskBinding::Conditional { if_true, if_false, .. } => Some((if_true, if_false)),
            _ => None,
        }
    }

    pub fn kind(&self) -> TaskKind {
        match self {
            TaskBinding::Conditional { condition: Condition::SecretGood, .. } => TaskKind::ConditionalSecret,
            TaskBinding::Conditional { condition: Condition::CloseToWall, .. } => {
                TaskKind::VisualLocationConditional
            }
            TaskBinding::Conditional { condition: Condition::WarmColor, .. } => TaskKind::VisualColorConditional,
            TaskBinding::Search { .. } => TaskKind::SearchSecret,
            TaskBinding::Elimination { .. } => TaskKind::OptionElimination,
            TaskBinding::Steps { sequence } => TaskKind::BasicSteps(sequence.len() as u8),
        }
    }

    /// Every object the question names, in question order.
    pub fn named_objects(&self) -> Vec<String> {
        match self {
            TaskBinding::Conditional { decider, if_true, if_false, .. } => {
                decider.iter().chain([if_true, if_false]).cloned().collect()
            }
            TaskBinding::Search { order } => order.clone(),
            TaskBinding::Elimination { options, .. } => options.clone(),
            TaskBinding::Steps { sequence } => sequence.clone(),
        }
    }

    /// The single option not eliminated, for elimination tasks.
    pub fn remaining(&self) -> Option<&str> {
        match self {
            TaskBinding::Elimination { options, eliminated, .. } => {
                let mut left = options.iter().filter(|o| !eliminated.contains(o));
                match (left.next(), left.next()) {
                    (Some(only), None) => Some(only),
                    _ => None,
                }
            }
            _ => None,
        }
    }
}

fn checked_name(text: &str) -> Option<String> {
    text.parse::<ObjectAttributes>().ok().map(|a| a.name())
}

fn join_and(names: &[String]) -> String {
    match names {
        [] => String::new(),
        [one] => one.clone(),
        [init @ .., last] => format!("{} and {last}", init.join(", ")),
    }
}

fn split_and(list: &str) -> Option<Vec<String>> {
    let (init, last) = list.rsplit_once(" and ")?;
    init.split(", ").chain(std::iter::once(last)).map(checked_name).collect()
}

struct QuestionPatterns {
    secret: Regex,
    location: Regex,
    color: Regex,
    search: Regex,
    steps: Regex,
}

fn question_patterns() -> &'static QuestionPatterns {
    static PATTERNS: OnceLock<QuestionPatterns> = OnceLock::new();
    PATTERNS.get_or_init(|| {
        let n = "[a-z ]+?";
        QuestionPatterns {
            secret: Regex::new(&format!(
                r"^If the (?P<d>{n}) is good, pickup (?P<t>{n})\. Otherwise, pickup (?P<f>{n})\.$"
            ))
            .unwrap(),
            location: Regex::new(&format!(
                r"^If the (?P<d>{n}) is close to the wall, pick up (?P<t>{n}), otherwise pick up (?P<f>{n})\.$"
            ))
            .unwrap(),
            color: Regex::new(&format!(
                r"^If you are a warm color, pick up (?P<t>{n}), otherwise pick up (?P<f>{n})\.$"
            ))
            .unwrap(),
            search: Regex::new(
                r"^The objects in the room are (?P<list>[a-z ,]+?)\. Get the object with a good secret property\.$",
            )
            .unwrap(),
            steps: Regex::new(r"^Pick up (?P<list>[a-z ,]+?) in that order\.$").unwrap(),
        }
    })
}

/// One phrasing of the option-elimination task.
///
/// Placeholders `{o0}`..`{o3}` are the four options in question order and
/// `{e0}`..`{e2}` the eliminated ones; each appears exactly once.
#[derive(Debug)]
pub struct EliminationTemplate {
    pub text: &'static str,
    /// Held-out phrasings never appear in few-shot prompts.
    pub held_out: bool,
}

pub const ELIMINATION_TEMPLATE_COUNT: usize = 10;
pub const ELIMINATION_TRAIN_TEMPLATES: usize = 7;

static ELIMINATION_TEMPLATES: [EliminationTemplate; ELIMINATION_TEMPLATE_COUNT] = [
    EliminationTemplate {
        text: "The target is one of the {o0}, {o1}, {o2} and {o3}. It is not the {e0}, the {e1} or the {e2}. Pick up the target.",
        held_out: false,
    },
    EliminationTemplate {
        text: "The objects in the room are {o0}, {o1}, {o2} and {o3}. I checked the {e0}, the {e1} and the {e2}, and none of them is the one I want. Get me the right object.",
        held_out: false,
    },
    EliminationTemplate {
        text: "The options are {o0}, {o1}, {o2} and {o3}. The {e0} is eliminated. The {e1} is eliminated. The {e2} is eliminated. Get the object that is left.",
        held_out: false,
    },
    EliminationTemplate {
        text: "What I need is the {o0}, the {o1}, the {o2} or the {o3}. It isn't the {e0}. It isn't the {e1} either, and it isn't the {e2}. Can you find it for me?",
        held_out: false,
    },
    EliminationTemplate {
        text: "Among the {o0}, {o1}, {o2} and {o3}, rule out the {e0}, the {e1} and the {e2}, then pick up what is left.",
        held_out: false,
    },
    EliminationTemplate {
        text: "Neither the {e0} nor the {e1} nor the {e2} is correct. The candidates are {o0}, {o1}, {o2} and {o3}. Pick up the correct one.",
        held_out: false,
    },
    EliminationTemplate {
        text: "Pick up one of {o0}, {o1}, {o2} and {o3}, but not the {e0}, not the {e1} and not the {e2}.",
        held_out: false,
    },
    EliminationTemplate {
        text: "The {e0}, the {e1} and the {e2} are all wrong. Which of the {o0}, {o1}, {o2} and {o3} is right? Get it.",
        held_out: true,
    },
    EliminationTemplate {
        text: "There are four objects: {o0}, {o1}, {o2} and {o3}. Three are ruled out: {e0}; {e1}; {e2}. Bring me the remaining one.",
        held_out: true,
    },
    EliminationTemplate {
        text: "You may skip the {e0}, the {e1} and the {e2}. Of the {o0}, {o1}, {o2} and {o3}, pick up the only one still in play.",
        held_out: true,
    },
];

const SLOTS: [&str; 7] = ["o0", "o1", "o2", "o3", "e0", "e1", "e2"];

impl EliminationTemplate {
    pub fn render(&self, options: &[String], eliminated: &[String]) -> String {
        let mut out = self.text.to_string();
        for (slot, name) in SLOTS.iter().zip(options.iter().chain(eliminated)) {
            out = out.replace(&format!("{{{slot}}}"), name);
        }
        out
    }

    fn pattern(&self) -> Regex {
        let mut pattern = String::from("^");
        let mut rest = self.text;
        while let Some(start) = rest.find('{') {
            let end = rest[start..].find('}').expect("closed placeholder") + start;
            pattern.push_str(&regex::escape(&rest[..start]));
            pattern.push_str(&format!("(?P<{}>[a-z ]+?)", &rest[start + 1..end]));
            rest = &rest[end + 1..];
        }
        pattern.push_str(&regex::escape(rest));
        pattern.push('$');
        Regex::new(&pattern).expect("template pattern compiles")
    }

    fn parse(&self, question: &str) -> Option<(Vec<String>, Vec<String>)> {
        static PATTERNS: OnceLock<Vec<Regex>> = OnceLock::new();
        let patterns = PATTERNS.get_or_init(|| ELIMINATION_TEMPLATES.iter().map(|t| t.pattern()).collect());
        let idx = ELIMINATION_TEMPLATES.iter().position(|t| std::ptr::eq(t, self))?;
        let caps = patterns[idx].captures(question)?;
        let names: Vec<String> = SLOTS
            .iter()
            .map(|slot| checked_name(&caps[*slot]))
            .collect::<Option<_>>()?;
        let (options, eliminated) = names.split_at(4);
        if !eliminated.iter().all(|e| options.contains(e)) {
            return None;
        }
        Some((options.to_vec(), eliminated.to_vec()))
    }
}

/// The ten elimination phrasings; indices 0–6 are for prompts, 7–9 held out.
pub fn elimination_templates() -> &'static [EliminationTemplate] {
    &ELIMINATION_TEMPLATES
}

/// A generated task instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub kind: TaskKind,
    pub question: String,
    /// All object names in the room: question order first, then the rest.
    pub object_names: Vec<String>,
    pub binding: TaskBinding,
    /// Correct pickup sequence.
    pub targets: Vec<String>,
}

impl TaskSpec {
    pub fn decider(&self) -> Option<&str> {
        self.binding.decider()
    }

    pub fn branch_targets(&self) -> Option<(&str, &str)> {
        self.binding.branch_targets()
    }

    pub fn template_id(&self) -> Option<usize> {
        match self.binding {
            TaskBinding::Elimination { template, .. } => Some(template),
            _ => None,
        }
    }

    /// The name the final pickup must match.
    pub fn correct(&self) -> &str {
        self.targets.last().expect("targets never empty")
    }
}

/// Generation knobs beyond the task kind.
#[derive(Debug, Clone, Default)]
pub struct TaskOptions {
    /// Force one elimination phrasing instead of sampling among all ten.
    pub template: Option<usize>,
    pub layout: LayoutRequest,
}

pub fn generate(kind: TaskKind, seed: u64) -> Result<(GridWorld, TaskSpec), TaskError> {
    generate_with(kind, seed, &TaskOptions::default())
}

pub fn generate_with(
    kind: TaskKind,
    seed: u64,
    options: &TaskOptions,
) -> Result<(GridWorld, TaskSpec), TaskError> {
    let mut world = GridWorld::new_episode(seed, &options.layout)?;
    let mut rng = stream_rng(seed, Stream::Task);
    let mut names = world.object_names();
    names.shuffle(&mut rng);

    let binding = match kind {
        TaskKind::ConditionalSecret => {
            let good = rng.random_bool(0.5);
            let secret = if good { SecretValue::Good } else { SecretValue::Bad };
            world.set_secret(&names[0], secret)?;
            TaskBinding::Conditional {
                condition: Condition::SecretGood,
                decider: Some(names[0].clone()),
                if_true: names[1].clone(),
                if_false: names[2].clone(),
            }
        }
        TaskKind::SearchSecret => {
            let good = rng.random_range(0..names.len());
            for (i, name) in names.iter().enumerate() {
                let secret = if i == good { SecretValue::Good } else { SecretValue::Bad };
                world.set_secret(name, secret)?;
            }
            TaskBinding::Search { order: names.clone() }
        }
        TaskKind::OptionElimination => {
            let template = match options.template {
                Some(t) if t < ELIMINATION_TEMPLATE_COUNT => t,
                Some(t) => return Err(TaskError::BadTemplate(t)),
                None => rng.random_range(0..ELIMINATION_TEMPLATE_COUNT),
            };
            let keep = rng.random_range(0..names.len());
            let mut eliminated: Vec<String> =
                names.iter().enumerate().filter(|&(i, _)| i != keep).map(|(_, n)| n.clone()).collect();
            eliminated.shuffle(&mut rng);
            TaskBinding::Elimination { template, options: names.clone(), eliminated }
        }
        TaskKind::BasicSteps(n) => {
            let n = n as usize;
            if !(2..=3).contains(&n) {
                return Err(TaskError::BadStepCount(n));
            }
            TaskBinding::Steps { sequence: names[..n].to_vec() }
        }
        TaskKind::VisualColorConditional => TaskBinding::Conditional {
            condition: Condition::WarmColor,
            decider: None,
            if_true: names[0].clone(),
            if_false: names[1].clone(),
        },
        TaskKind::VisualLocationConditional => TaskBinding::Conditional {
            condition: Condition::CloseToWall,
            decider: Some(names[0].clone()),
            if_true: names[1].clone(),
            if_false: names[2].clone(),
        },
    };

    assemble(world, kind, binding)
}

/// Binds a task to an already-populated world: computes the correct pickup
/// sequence and installs it as the world's goal.
pub fn assemble(
    mut world: GridWorld,
    kind: TaskKind,
    binding: TaskBinding,
) -> Result<(GridWorld, TaskSpec), TaskError> {
    let lookup = |name: &str| {
        world
            .layout()
            .objects
            .iter()
            .find(|o| o.name() == name)
            .ok_or_else(|| EnvError::UnknownObject(name.to_string()))
    };

    let targets = match &binding {
        TaskBinding::Conditional { condition, decider, if_true, if_false } => {
            lookup(if_true)?;
            lookup(if_false)?;
            let holds = match condition {
                Condition::SecretGood => {
                    let d = decider.as_deref().ok_or_else(|| TaskError::UnrecognizedQuestion(binding.question()))?;
                    lookup(d)?.secret == SecretValue::Good
                }
                Condition::CloseToWall => {
                    let d = decider.as_deref().ok_or_else(|| TaskError::UnrecognizedQuestion(binding.question()))?;
                    close_to_wall(&world, d)?
                }
                Condition::WarmColor => world.agent_color().group() == ColorGroup::Warm,
            };
            vec![if holds { if_true.clone() } else { if_false.clone() }]
        }
        TaskBinding::Search { order } => {
            let good: Vec<&String> = order
                .iter()
                .map(|n| lookup(n).map(|o| (n, o.secret)))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .filter(|(_, s)| *s == SecretValue::Good)
                .map(|(n, _)| n)
                .collect();
            match good.as_slice() {
                [only] => vec![(*only).clone()],
                _ => return Err(TaskError::UnrecognizedQuestion(binding.question())),
            }
        }
        TaskBinding::Elimination { .. } => {
            let remaining = binding
                .remaining()
                .ok_or_else(|| TaskError::UnrecognizedQuestion(binding.question()))?;
            lookup(remaining)?;
            vec![remaining.to_string()]
        }
        TaskBinding::Steps { sequence } => {
            for n in sequence {
                lookup(n)?;
            }
            sequence.clone()
        }
    };

    let mut object_names = binding.named_objects();
    for name in world.object_names() {
        if !object_names.contains(&name) {
            object_names.push(name);
        }
    }

    world.set_goal(targets.clone());
    let spec = TaskSpec { kind, question: binding.question(), object_names, binding, targets };
    Ok((world, spec))
}

/// A world built around a given binding: the named objects are placed by
/// `seed`, padded with sampled ones, and given the listed secrets. Search
/// objects without a listed secret are bad.
pub fn world_for_binding(
    binding: TaskBinding,
    secrets: &[(String, SecretValue)],
    seed: u64,
) -> Result<(GridWorld, TaskSpec), TaskError> {
    let fixed = binding
        .named_objects()
        .iter()
        .map(|n| n.parse::<ObjectAttributes>().map_err(|_| EnvError::UnknownObject(n.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let request = LayoutRequest { fixed, ..LayoutRequest::default() };
    let mut world = GridWorld::new_episode(seed, &request)?;
    if let TaskBinding::Search { order } = &binding {
        for name in order {
            world.set_secret(name, SecretValue::Bad)?;
        }
    }
    for (name, value) in secrets {
        world.set_secret(name, *value)?;
    }
    let kind = binding.kind();
    assemble(world, kind, binding)
}

/// Reward for an episode whose last pickup was `picked`, given the full
/// event history: 1.0 iff the pickups made are exactly the target sequence.
pub fn reward_of(spec: &TaskSpec, picked: &str, history: &[EnvEvent]) -> f64 {
    let pickups: Vec<&str> = history
        .iter()
        .filter_map(|e| match e {
            EnvEvent::PickedUp { name } => Some(name.as_str()),
            _ => None,
        })
        .collect();
    let in_order = pickups.len() == spec.targets.len()
        && pickups.iter().zip(&spec.targets).all(|(p, t)| *p == t);
    if in_order && pickups.last() == Some(&picked) {
        1.0
    } else {
        0.0
    }
}

/// Whether a cell touches the border wall (interior ring of the grid).
pub fn cell_close_to_wall(cell: Cell) -> bool {
    cell.is_interior()
        && (cell.col == 1 || cell.row == 1 || cell.col == GRID_SIZE - 2 || cell.row == GRID_SIZE - 2)
}

/// Whether the named object started next to the border wall.
pub fn close_to_wall(world: &GridWorld, name: &str) -> Result<bool, TaskError> {
    let obj = world
        .layout()
        .objects
        .iter()
        .find(|o| o.name() == name)
        .ok_or_else(|| EnvError::UnknownObject(name.to_string()))?;
    Ok(cell_close_to_wall(obj.position))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{Direction, Layout, WorldObject};
    use crate::vocab::{Color, Shape, Texture};

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn search_question_matches_prompt_corpus() {
        let b = TaskBinding::Search {
            order: names(&[
                "checker brown tee",
                "horizontal striped light green inverse plus",
                "solid dark blue h",
                "vertical striped blue tee",
            ]),
        };
        assert_eq!(
            b.question(),
            "The objects in the room are checker brown tee, horizontal striped light green inverse plus, \
             solid dark blue h and vertical striped blue tee. Get the object with a good secret property."
        );
        assert_eq!(TaskBinding::parse(&b.question()).unwrap(), b);
    }

    #[test]
    fn conditional_question_matches_prompt_corpus() {
        let b = TaskBinding::Conditional {
            condition: Condition::SecretGood,
            decider: Some("solid dark blue h".into()),
            if_true: "horizontal striped light green inverse plus".into(),
            if_false: "checker brown tee".into(),
        };
        assert_eq!(
            b.question(),
            "If the solid dark blue h is good, pickup horizontal striped light green inverse plus. \
             Otherwise, pickup checker brown tee."
        );
        assert_eq!(TaskBinding::parse(&b.question()).unwrap(), b);
    }

    #[test]
    fn visual_location_question() {
        let b = TaskBinding::Conditional {
            condition: Condition::CloseToWall,
            decider: Some("grid teal h".into()),
            if_true: "solid orange circle".into(),
            if_false: "noisy green plus".into(),
        };
        assert_eq!(
            b.question(),
            "If the grid teal h is close to the wall, pick up solid orange circle, otherwise pick up noisy green plus."
        );
    }

    #[test]
    fn basic_steps_question() {
        let b = TaskBinding::Steps { sequence: names(&["grid teal h", "solid orange circle"]) };
        assert_eq!(b.question(), "Pick up grid teal h and solid orange circle in that order.");
        let b3 = TaskBinding::Steps {
            sequence: names(&["grid teal h", "solid orange circle", "noisy green plus"]),
        };
        assert_eq!(
            b3.question(),
            "Pick up grid teal h, solid orange circle and noisy green plus in that order."
        );
        assert_eq!(TaskBinding::parse(&b3.question()).unwrap(), b3);
    }

    #[test]
    fn every_kind_round_trips_through_its_question() {
        for kind in TaskKind::ALL {
            for seed in 0..50 {
                let (_, spec) = generate(kind, seed).unwrap();
                assert_eq!(TaskBinding::parse(&spec.question).unwrap(), spec.binding, "{kind} {seed}");
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        for kind in TaskKind::ALL {
            let (w1, s1) = generate(kind, 42).unwrap();
            let (w2, s2) = generate(kind, 42).unwrap();
            assert_eq!(w1, w2);
            assert_eq!(s1, s2);
        }
    }

    #[test]
    fn conditional_secret_invariants() {
        let mut good = 0;
        for seed in 0..400 {
            let (w, spec) = generate(TaskKind::ConditionalSecret, seed).unwrap();
            let d = spec.decider().unwrap();
            let (t, f) = spec.branch_targets().unwrap();
            assert!(d != t && d != f && t != f);
            for o in w.objects() {
                if o.name() == d {
                    assert_ne!(o.secret, SecretValue::Unknown);
                } else {
                    assert_eq!(o.secret, SecretValue::Unknown);
                }
            }
            let decider_good = w.object(d).unwrap().secret == SecretValue::Good;
            good += decider_good as usize;
            assert_eq!(spec.correct(), if decider_good { t } else { f });
        }
        // roughly balanced branches
        assert!((150..250).contains(&good), "{good}");
    }

    #[test]
    fn flipping_decider_flips_target() {
        let (w, spec) = generate(TaskKind::ConditionalSecret, 9).unwrap();
        let d = spec.decider().unwrap().to_string();
        let mut flipped = w.layout().clone();
        for o in &mut flipped.objects {
            if o.name() == d {
                o.secret = match o.secret {
                    SecretValue::Good => SecretValue::Bad,
                    _ => SecretValue::Good,
                };
            }
        }
        let (_, spec2) =
            assemble(GridWorld::from_layout(flipped), spec.kind, spec.binding.clone()).unwrap();
        let (t, f) = spec.branch_targets().unwrap();
        assert_eq!(spec2.question, spec.question);
        assert_ne!(spec2.correct(), spec.correct());
        assert!([t, f].contains(&spec2.correct()));
    }

    #[test]
    fn search_has_one_good_object() {
        for seed in 0..200 {
            let (w, spec) = generate(TaskKind::SearchSecret, seed).unwrap();
            let good: Vec<_> = w.objects().iter().filter(|o| o.secret == SecretValue::Good).collect();
            assert_eq!(good.len(), 1);
            assert_eq!(w.objects().iter().filter(|o| o.secret == SecretValue::Bad).count(), 3);
            assert_eq!(spec.correct(), good[0].name());
        }
    }

    #[test]
    fn search_answer_independent_of_listing_order() {
        let (w, spec) = generate(TaskKind::SearchSecret, 5).unwrap();
        let mut order = match &spec.binding {
            TaskBinding::Search { order } => order.clone(),
            _ => unreachable!(),
        };
        order.reverse();
        let (_, reversed) = assemble(w, spec.kind, TaskBinding::Search { order }).unwrap();
        assert_eq!(reversed.correct(), spec.correct());
        assert_ne!(reversed.question, spec.question);
    }

    #[test]
    fn elimination_templates_partition_and_parse() {
        let templates = elimination_templates();
        assert_eq!(templates.len(), 10);
        let held_out = templates.iter().filter(|t| t.held_out).count();
        assert_eq!((templates.len() - held_out, held_out), (7, 3));
        assert!(templates[..7].iter().all(|t| !t.held_out));

        let opts = names(&["grid teal h", "solid orange circle", "noisy green plus", "checker brown tee"]);
        let elim = names(&["solid orange circle", "grid teal h", "noisy green plus"]);
        let mut texts = std::collections::HashSet::new();
        for i in 0..templates.len() {
            let b = TaskBinding::Elimination { template: i, options: opts.clone(), eliminated: elim.clone() };
            let q = b.question();
            for n in &opts {
                assert_eq!(q.matches(n.as_str()).count(), if elim.contains(n) { 2 } else { 1 }, "{q}");
            }
            assert_eq!(b.remaining(), Some("checker brown tee"));
            assert_eq!(TaskBinding::parse(&q).unwrap(), b);
            texts.insert(q);
        }
        assert_eq!(texts.len(), 10);
    }

    #[test]
    fn elimination_forced_template() {
        for t in 0..10 {
            let opts = TaskOptions { template: Some(t), ..TaskOptions::default() };
            let (_, spec) = generate_with(TaskKind::OptionElimination, 3, &opts).unwrap();
            assert_eq!(spec.template_id(), Some(t));
        }
        let bad = TaskOptions { template: Some(10), ..TaskOptions::default() };
        assert_eq!(
            generate_with(TaskKind::OptionElimination, 3, &bad).unwrap_err(),
            TaskError::BadTemplate(10)
        );
    }

    #[test]
    fn reward_predicate() {
        let (_, search) = generate(TaskKind::SearchSecret, 1).unwrap();
        let good = search.correct().to_string();
        let picked = |n: &str| vec![EnvEvent::PickedUp { name: n.to_string() }];
        assert_eq!(reward_of(&search, &good, &picked(&good)), 1.0);
        let wrong = search.object_names.iter().find(|n| **n != good).unwrap();
        assert_eq!(reward_of(&search, wrong, &picked(wrong)), 0.0);

        let (_, steps) = generate(TaskKind::BasicSteps(2), 1).unwrap();
        let (x, y) = (steps.targets[0].clone(), steps.targets[1].clone());
        let history = |a: &str, b: &str| {
            vec![
                EnvEvent::Moved { direction: Direction::Up },
                EnvEvent::PickedUp { name: a.to_string() },
                EnvEvent::PickedUp { name: b.to_string() },
            ]
        };
        assert_eq!(reward_of(&steps, &y, &history(&x, &y)), 1.0);
        assert_eq!(reward_of(&steps, &x, &history(&y, &x)), 0.0);

        let (_, cond) = generate(TaskKind::ConditionalSecret, 1).unwrap();
        let d = cond.decider().unwrap().to_string();
        assert_eq!(reward_of(&cond, &d, &picked(&d)), 0.0);
    }

    #[test]
    fn close_to_wall_cells() {
        assert!(cell_close_to_wall(Cell::new(1, 5)));
        assert!(cell_close_to_wall(Cell::new(9, 9)));
        assert!(!cell_close_to_wall(Cell::new(5, 5)));
        assert!(!cell_close_to_wall(Cell::new(2, 8)));
    }

    #[test]
    fn close_fraction_by_enumeration() {
        // count interior cells that have a wall among their 4 neighbours
        let close = Cell::interior()
            .filter(|c| Direction::ALL.iter().any(|&d| c.step(d).is_border()))
            .count();
        let via_predicate = Cell::interior().filter(|&c| cell_close_to_wall(c)).count();
        assert_eq!((close, via_predicate), (32, 32));
        assert_eq!(Cell::interior().count(), 81);
    }

    #[test]
    fn close_to_wall_lookup() {
        let layout = Layout {
            seed: 0,
            agent: Cell::new(5, 4),
            agent_color: Color::Blue,
            objects: vec![
                (Texture::Solid, Cell::new(1, 5)),
                (Texture::Noisy, Cell::new(5, 5)),
                (Texture::Grid, Cell::new(3, 3)),
                (Texture::Checker, Cell::new(7, 9)),
            ]
            .into_iter()
            .map(|(t, p)| WorldObject {
                attributes: ObjectAttributes::new(t, Color::Blue, Shape::H),
                secret: SecretValue::Unknown,
                position: p,
            })
            .collect(),
        };
        let w = GridWorld::from_layout(layout);
        assert!(close_to_wall(&w, "solid blue h").unwrap());
        assert!(!close_to_wall(&w, "noisy blue h").unwrap());
        assert!(close_to_wall(&w, "checker blue h").unwrap());
        assert!(close_to_wall(&w, "solid red h").is_err());
    }

    #[test]
    fn visual_location_target_follows_predicate() {
        for seed in 0..200 {
            let (w, spec) = generate(TaskKind::VisualLocationConditional, seed).unwrap();
            let close = close_to_wall(&w, spec.decider().unwrap()).unwrap();
            let (t, f) = spec.branch_targets().unwrap();
            assert_eq!(spec.correct(), if close { t } else { f });
        }
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in TaskKind::ALL {
            assert_eq!(kind.to_string().parse::<TaskKind>().unwrap(), kind);
        }
    }
}
