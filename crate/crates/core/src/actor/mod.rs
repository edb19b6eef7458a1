//! Instruction execution: walk to the named object by BFS, then act on it.

mod baseline;

pub use baseline::{
    baseline_features, train_baseline, uniform_pickup_success, BaselineConfig, BaselinePolicy, MacroAction,
};

use std::collections::{HashMap, VecDeque};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::gridworld::{Cell, Direction, EnvAction, EnvEvent, GridWorld};
use crate::protocol::{Instruction, Verb};
use crate::rng::{stream_rng, Stream};

pub const DEFAULT_INSTRUCTION_BUDGET: u32 = 40;

/// Which instructions the error rate applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErrorScope {
    #[default]
    AllVerbs,
    /// Only `Examine` goes astray; pickups always hit the commanded object.
    ExamineOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActorConfig {
    /// Probability of acting on a uniformly chosen other object.
    pub error_rate: f64,
    pub error_scope: ErrorScope,
    /// Environment steps allowed per instruction.
    pub budget: u32,
}

impl Default for ActorConfig {
    fn default() -> Self {
        Self { error_rate: 0.0, error_scope: ErrorScope::AllVerbs, budget: DEFAULT_INSTRUCTION_BUDGET }
    }
}

/// Primitive actions the actor intends to take for one instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionPlan {
    /// Object actually acted on (differs from the command after an error).
    pub target: String,
    pub actions: VecDeque<EnvAction>,
}

#[derive(Debug, Clone)]
pub struct ScriptedActor {
    config: ActorConfig,
    rng: ChaCha8Rng,
}

impl ScriptedActor {
    pub fn new(config: ActorConfig, seed: u64) -> Self {
        Self { config, rng: stream_rng(seed, Stream::Actor) }
    }

    pub fn config(&self) -> &ActorConfig {
        &self.config
    }

    /// Picks the object to act on and the path there. `None` when the
    /// commanded object is no longer in the world.
    pub fn plan(&mut self, instruction: &Instruction, world: &GridWorld) -> Option<ActionPlan> {
        let commanded = world.object(&instruction.object)?;
        let applies = match self.config.error_scope {
            ErrorScope::AllVerbs => true,
            ErrorScope::ExamineOnly => instruction.verb == Verb::Examine,
        };
        let slip = self.rng.random_bool(self.config.error_rate.clamp(0.0, 1.0)) && applies;
        let target = if slip {
            let others: Vec<_> = world.objects().iter().filter(|o| o.name() != instruction.object).collect();
            if others.is_empty() {
                commanded
            } else {
                others[self.rng.random_range(0..others.len())]
            }
        } else {
            commanded
        };

        let mut actions: VecDeque<EnvAction> = bfs_path(world.agent_position(), target.position)
            .unwrap_or_default()
            .into_iter()
            .map(EnvAction::Move)
            .collect();
        actions.push_back(match instruction.verb {
            Verb::Examine => EnvAction::Examine,
            Verb::Pickup => EnvAction::Pickup,
        });
        Some(ActionPlan { target: target.name(), actions })
    }

    /// Runs an instruction to completion (or until the budget or episode
    /// ends) and returns every event in order.
    pub fn execute(&mut self, instruction: &Instruction, world: &mut GridWorld) -> Vec<EnvEvent> {
        let Some(plan) = self.plan(instruction, world) else {
            return vec![EnvEvent::NoOp];
        };
        let mut events = Vec::new();
        for action in plan.actions.into_iter().take(self.config.budget as usize) {
            match world.step(action) {
                Ok(outcome) => {
                    events.push(outcome.event);
                    if outcome.done {
                        break;
                    }
                }
                Err(_) => break,
            }
        }
        events
    }
}

/// Shortest path between interior cells, as a move sequence. `None` if either
/// cell is not interior.
pub fn bfs_path(from: Cell, to: Cell) -> Option<Vec<Direction>> {
    if !from.is_interior() || !to.is_interior() {
        return None;
    }
    let mut came_from: HashMap<Cell, (Cell, Direction)> = HashMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = vec![from];
    while let Some(cell) = queue.pop_front() {
        if cell == to {
            break;
        }
        for direction in Direction::ALL {
            let next = cell.step(direction);
            if next.is_interior() && !seen.contains(&next) {
                seen.push(next);
                came_from.insert(next, (cell, direction));
                queue.push_back(next);
            }
        }
    }
    let mut path = Vec::new();
    let mut cell = to;
    while cell != from {
        let (prev, direction) = came_from[&cell];
        path.push(direction);
        cell = prev;
    }
    path.reverse();
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::{Layout, SecretValue, WorldObject};
    use crate::tasks::{generate, TaskKind};
    use crate::vocab::{Color, ObjectAttributes, Shape, Texture};

    fn layout(agent: Cell) -> Layout {
        let objs = [
            (Texture::Grid, Color::Teal, Shape::H, SecretValue::Good, Cell::new(9, 9)),
            (Texture::Solid, Color::Orange, Shape::Circle, SecretValue::Unknown, Cell::new(2, 7)),
            (Texture::Noisy, Color::Green, Shape::Plus, SecretValue::Unknown, Cell::new(5, 5)),
            (Texture::Checker, Color::Brown, Shape::Tee, SecretValue::Unknown, Cell::new(8, 1)),
        ];
        Layout {
            seed: 0,
            agent,
            agent_color: Color::Blue,
            objects: objs
                .into_iter()
                .map(|(t, c, s, secret, position)| WorldObject {
                    attributes: ObjectAttributes::new(t, c, s),
                    secret,
                    position,
                })
                .collect(),
        }
    }

    #[test]
    fn corner_to_corner_is_sixteen_moves() {
        assert_eq!(bfs_path(Cell::new(1, 1), Cell::new(9, 9)).unwrap().len(), 16);
        assert_eq!(bfs_path(Cell::new(0, 1), Cell::new(9, 9)), None);
    }

    #[test]
    fn bfs_equals_manhattan_for_all_pairs() {
        let cells: Vec<Cell> = Cell::interior().collect();
        for &a in &cells {
            for &b in &cells {
                let path = bfs_path(a, b).unwrap();
                assert_eq!(path.len() as u32, a.manhattan(b));
                let end = path.iter().fold(a, |c, &d| c.step(d));
                assert_eq!(end, b);
            }
        }
    }

    #[test]
    fn examine_reaches_commanded_object() {
        let mut world = GridWorld::from_layout(layout(Cell::new(1, 1)));
        let mut actor = ScriptedActor::new(ActorConfig::default(), 0);
        let events = actor.execute(&Instruction::examine("grid teal h"), &mut world);
        assert_eq!(events.len(), 17);
        assert_eq!(
            events.last(),
            Some(&EnvEvent::Examined { name: "grid teal h".into(), secret: SecretValue::Good })
        );
        assert_eq!(world.agent_position(), Cell::new(9, 9));
    }

    #[test]
    fn exact_once_when_error_free() {
        for seed in 0..50 {
            let (mut world, spec) = generate(TaskKind::SearchSecret, seed).unwrap();
            let mut actor = ScriptedActor::new(ActorConfig::default(), seed);
            let name = &spec.object_names[(seed % 4) as usize];
            let events = actor.execute(&Instruction::examine(name), &mut world);
            let examined: Vec<_> = events.iter().filter(|e| matches!(e, EnvEvent::Examined { .. })).collect();
            assert_eq!(examined.len(), 1);
            assert!(matches!(examined[0], EnvEvent::Examined { name: n, .. } if n == name));
        }
    }

    #[test]
    fn forced_errors_never_hit_commanded_object() {
        let config = ActorConfig { error_rate: 1.0, ..ActorConfig::default() };
        for seed in 0..100 {
            let mut world = GridWorld::from_layout(layout(Cell::new(3, 3)));
            let mut actor = ScriptedActor::new(config, seed);
            let verb = if seed % 2 == 0 { Instruction::examine("noisy green plus") } else { Instruction::pickup("noisy green plus") };
            let events = actor.execute(&verb, &mut world);
            match events.last().unwrap() {
                EnvEvent::Examined { name, .. } | EnvEvent::PickedUp { name } => assert_ne!(name, "noisy green plus"),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn examine_only_scope_spares_pickups() {
        let config = ActorConfig { error_rate: 1.0, error_scope: ErrorScope::ExamineOnly, ..ActorConfig::default() };
        let mut world = GridWorld::from_layout(layout(Cell::new(3, 3)));
        let mut actor = ScriptedActor::new(config, 1);
        let events = actor.execute(&Instruction::pickup("noisy green plus"), &mut world);
        assert_eq!(events.last(), Some(&EnvEvent::PickedUp { name: "noisy green plus".into() }));
    }

    #[test]
    fn absent_object_is_noop() {
        let mut world = GridWorld::from_layout(layout(Cell::new(3, 3)));
        let mut actor = ScriptedActor::new(ActorConfig::default(), 0);
        assert_eq!(actor.execute(&Instruction::pickup("solid red h"), &mut world), vec![EnvEvent::NoOp]);
        assert_eq!(world.step_count(), 0);
    }

    #[test]
    fn budget_stops_early() {
        let config = ActorConfig { budget: 5, ..ActorConfig::default() };
        let mut world = GridWorld::from_layout(layout(Cell::new(1, 1)));
        let mut actor = ScriptedActor::new(config, 0);
        let events = actor.execute(&Instruction::examine("grid teal h"), &mut world);
        assert_eq!(events.len(), 5);
        assert!(events.iter().all(|e| matches!(e, EnvEvent::Moved { .. })));
    }
}
