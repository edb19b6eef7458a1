//! Browser bindings: play an episode as the planner, compare scripted
//! planners under report noise, and train the visual reporter in the page.
//!
//! Every export returns a JSON string; failures come back as `{"error": ...}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use par_core::actor::{ActorConfig, ScriptedActor};
use par_core::gridworld::{Cell, EnvEvent, Layout, GRID_SIZE};
use par_core::planner::{oracle_factory, Planner, ScriptedPlanner, Strategy};
use par_core::protocol::{run_episode, EpisodeResult, Limits, Transcript, DEFAULT_MAX_PLANNER_TURNS};
use par_core::reporter::{evaluate_agreement, train_reporter, Reporter, ReporterKind, ReporterTrainConfig};
use par_core::tasks::{generate, TaskKind, TaskSpec};
use par_core::PlannerError;

const GLYPHS: [char; 4] = ['A', 'B', 'C', 'D'];

fn to_json(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn reporter_kind(noise: f64) -> ReporterKind {
    if noise > 0.0 {
        ReporterKind::Noisy { p: noise }
    } else {
        ReporterKind::Truthful
    }
}

struct Typed {
    lines: std::vec::IntoIter<String>,
}

impl Planner for Typed {
    fn next_instruction(&mut self, _: &Transcript) -> Result<String, PlannerError> {
        self.lines.next().ok_or(PlannerError::Finished)
    }
}

/// One episode driven by instructions typed in the page. The episode is
/// re-simulated from its seed after every instruction.
#[wasm_bindgen]
pub struct Session {
    kind: TaskKind,
    seed: u64,
    noise: f64,
    error_rate: f64,
    typed: Vec<String>,
}

struct Snapshot {
    layout: Layout,
    spec: TaskSpec,
    result: EpisodeResult,
}

#[wasm_bindgen]
impl Session {
    #[wasm_bindgen(constructor)]
    pub fn new(task: &str, seed: u64, noise: f64, error_rate: f64) -> Session {
        let kind = task.parse().unwrap_or(TaskKind::ConditionalSecret);
        Session { kind, seed, noise: noise.clamp(0.0, 1.0), error_rate: error_rate.clamp(0.0, 1.0), typed: Vec::new() }
    }

    pub fn state(&self) -> String {
        to_json(self.snapshot().map(|s| self.describe(&s)))
    }

    /// Sends one instruction and returns the new state.
    pub fn instruct(&mut self, text: &str) -> String {
        let finished = match self.snapshot() {
            Ok(s) => self.finished(&s),
            Err(e) => return to_json(Err(e)),
        };
        if finished {
            return to_json(Err("the episode is over".into()));
        }
        self.typed.push(text.trim().to_string());
        self.state()
    }

    /// What the oracle planner would say next.
    pub fn hint(&self) -> String {
        to_json(self.snapshot().and_then(|s| {
            ScriptedPlanner::new(Strategy::Oracle, &s.spec, self.seed)
                .next_instruction(&s.result.transcript)
                .map(|text| json!({ "hint": text }))
                .map_err(|e| e.to_string())
        }))
    }
}

impl Session {
    fn snapshot(&self) -> Result<Snapshot, String> {
        let (world, spec) = generate(self.kind, self.seed).map_err(|e| e.to_string())?;
        let layout = world.layout().clone();
        let mut planner = Typed { lines: self.typed.clone().into_iter() };
        let mut actor = ScriptedActor::new(ActorConfig { error_rate: self.error_rate, ..ActorConfig::default() }, self.seed);
        let mut reporter = Reporter::new(reporter_kind(self.noise), self.seed);
        let limits = Limits { max_planner_turns: self.typed.len() as u32, ..Limits::default() };
        let result = run_episode(&mut planner, &mut actor, &mut reporter, world, &spec, &limits);
        Ok(Snapshot { layout, spec, result })
    }

    fn finished(&self, s: &Snapshot) -> bool {
        s.result.transcript.done || s.result.planner_turns >= DEFAULT_MAX_PLANNER_TURNS
    }

    fn describe(&self, s: &Snapshot) -> Value {
        let objects: Vec<Value> = s
            .layout
            .objects
            .iter()
            .zip(GLYPHS)
            .map(|(o, g)| json!({ "glyph": g.to_string(), "name": o.name() }))
            .collect();
        let finished = self.finished(s);
        json!({
            "question": s.spec.question,
            "objects": objects,
            "grid": render_grid(&s.layout, &s.result.events),
            "block": s.result.transcript.render_block().unwrap_or_default(),
            "turns": s.result.planner_turns,
            "max_turns": DEFAULT_MAX_PLANNER_TURNS,
            "finished": finished,
            "reward": finished.then_some(s.result.reward),
        })
    }
}

/// Text picture of the room after `events`: `#` wall, `@` agent, letters for
/// objects still on the floor.
pub fn render_grid(layout: &Layout, events: &[EnvEvent]) -> Vec<String> {
    let mut agent = layout.agent;
    let mut taken: Vec<String> = Vec::new();
    for event in events {
        match event {
            EnvEvent::Moved { direction } => agent = agent.step(*direction),
            EnvEvent::PickedUp { name } => taken.push(name.clone()),
            _ => {}
        }
    }
    (0..GRID_SIZE)
        .map(|row| {
            (0..GRID_SIZE)
                .map(|col| {
                    let cell = Cell::new(col, row);
                    if cell == agent {
                        return '@';
                    }
                    if cell.is_border() {
                        return '#';
                    }
                    layout
                        .objects
                        .iter()
                        .zip(GLYPHS)
                        .find(|(o, _)| o.position == cell && !taken.contains(&o.name()))
                        .map_or('.', |(_, g)| g)
                })
                .collect()
        })
        .collect()
}

/// Success rate of every scripted planner on `episodes` seeded episodes.
#[wasm_bindgen]
pub fn compare_planners(task: &str, noise: f64, error_rate: f64, episodes: u32) -> String {
    to_json((|| {
        let kind: TaskKind = task.parse()?;
        let episodes = episodes.clamp(1, 2000) as u64;
        let actor_config = ActorConfig { error_rate: error_rate.clamp(0.0, 1.0), ..ActorConfig::default() };
        let mut rows = Vec::new();
        for strategy in Strategy::ALL {
            let mut wins = 0.0;
            let mut turns = 0u64;
            for seed in 0..episodes {
                let (world, spec) = generate(kind, seed).map_err(|e| e.to_string())?;
                let mut planner = ScriptedPlanner::new(strategy, &spec, seed);
                let mut actor = ScriptedActor::new(actor_config, seed);
                let mut reporter = Reporter::new(reporter_kind(noise.clamp(0.0, 1.0)), seed);
                let r = run_episode(&mut planner, &mut actor, &mut reporter, world, &spec, &Limits::default());
                wins += r.reward;
                turns += r.planner_turns as u64;
            }
            rows.push(json!({
                "planner": strategy.as_str(),
                "success": wins / episodes as f64,
                "mean_turns": turns as f64 / episodes as f64,
            }));
        }
        Ok(json!({ "episodes": episodes, "rows": rows }))
    })())
}

/// Trains the wall-proximity reporter and returns its learning curve.
#[wasm_bindgen]
pub fn train_location_reporter(episodes: u32, seed: u64) -> String {
    to_json((|| {
        let episodes = episodes.clamp(20, 5000) as usize;
        let config = ReporterTrainConfig {
            episodes,
            base_seed: seed,
            eval_every: (episodes / 20).max(1),
            ..ReporterTrainConfig::default()
        };
        let (model, curve) = train_reporter(
            TaskKind::VisualLocationConditional,
            &oracle_factory,
            &ActorConfig::default(),
            &config,
        )
        .map_err(|e| e.to_string())?;
        let agreement = evaluate_agreement(&model, 300, seed.wrapping_add(9_000_000)).map_err(|e| e.to_string())?;
        let points: Vec<[f64; 2]> = curve.points.iter().map(|p| [p.episodes as f64, p.success_rate]).collect();
        Ok(json!({ "curve": points, "agreement": agreement, "weights": model.to_record() }))
    })())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn following_hints_wins() {
        let mut session = Session::new("search-secret", 4, 0.0, 0.0);
        for _ in 0..6 {
            let state = parse(&session.state());
            if state["finished"] == true {
                assert_eq!(state["reward"], 1.0);
                return;
            }
            let hint = parse(&session.hint())["hint"].as_str().unwrap().to_string();
            session.instruct(&hint);
        }
        panic!("oracle hints did not finish the episode");
    }

    #[test]
    fn grid_has_walls_agent_and_objects() {
        let state = parse(&Session::new("conditional-secret", 1, 0.0, 0.0).state());
        let rows: Vec<String> = serde_json::from_value(state["grid"].clone()).unwrap();
        assert_eq!(rows.len(), GRID_SIZE as usize);
        let all: String = rows.concat();
        assert_eq!(all.matches('@').count(), 1);
        assert_eq!(all.matches(|c| GLYPHS.contains(&c)).count(), 4);
        assert!(rows[0].chars().all(|c| c == '#'));
    }

    #[test]
    fn unparseable_instruction_is_a_turn() {
        let mut session = Session::new("conditional-secret", 2, 0.0, 0.0);
        let state = parse(&session.instruct("sing"));
        assert_eq!(state["turns"], 1);
        assert!(state["block"].as_str().unwrap().contains("I could not follow that instruction."));
    }

    #[test]
    fn comparison_lists_every_planner() {
        let out = parse(&compare_planners("search-secret", 0.2, 0.0, 20));
        assert_eq!(out["rows"].as_array().unwrap().len(), Strategy::ALL.len());
        assert!(parse(&compare_planners("nope", 0.0, 0.0, 1))["error"].is_string());
    }
}
