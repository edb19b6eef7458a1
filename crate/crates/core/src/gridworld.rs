//! The 11×11 walled grid with four objects and one agent.
//!
//! Cells are addressed as `(col, row)` with row 0 at the top. The outer ring
//! is wall; the 9×9 interior has no obstacles. The agent may stand on an
//! object's cell, which is the only place `Examine` and `Pickup` do anything.

use std::collections::HashSet;
use std::fmt;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::EnvError;
use crate::rng::{stream_rng, Stream};
use crate::vocab::{Color, ObjectAttributes, Shape, Texture};

pub const GRID_SIZE: i32 = 11;
pub const VIEW_RADIUS: i32 = 5;
pub const VIEW_SIZE: usize = (2 * VIEW_RADIUS + 1) as usize;
pub const OBJECT_COUNT: usize = 4;
pub const DEFAULT_STEP_LIMIT: u32 = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub col: i32,
    pub row: i32,
}

impl Cell {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }

    pub fn in_bounds(self) -> bool {
        (0..GRID_SIZE).contains(&self.col) && (0..GRID_SIZE).contains(&self.row)
    }

    pub fn is_border(self) -> bool {
        self.in_bounds()
            && (self.col == 0 || self.row == 0 || self.col == GRID_SIZE - 1 || self.row == GRID_SIZE - 1)
    }

    pub fn is_interior(self) -> bool {
        self.in_bounds() && !self.is_border()
    }

    pub fn step(self, direction: Direction) -> Cell {
        let (dc, dr) = direction.delta();
        Cell::new(self.col + dc, self.row + dr)
    }

    pub fn manhattan(self, other: Cell) -> u32 {
        self.col.abs_diff(other.col) + self.row.abs_diff(other.row)
    }

    /// All 81 interior cells in row-major order.
    pub fn interior() -> impl Iterator<Item = Cell> {
        (1..GRID_SIZE - 1).flat_map(|row| (1..GRID_SIZE - 1).map(move |col| Cell::new(col, row)))
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.col, self.row)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn delta(self) -> (i32, i32) {
        match self {
            Direction::Up => (0, -1),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
            Direction::Right => (1, 0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

/// Hidden per-object value revealed by `Examine`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SecretValue {
    Good,
    Bad,
    Unknown,
}

impl SecretValue {
    pub fn as_str(self) -> &'static str {
        match self {
            SecretValue::Good => "good",
            SecretValue::Bad => "bad",
            SecretValue::Unknown => "unknown",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "good" => Some(SecretValue::Good),
            "bad" => Some(SecretValue::Bad),
            "unknown" => Some(SecretValue::Unknown),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldObject {
    pub attributes: ObjectAttributes,
    pub secret: SecretValue,
    pub position: Cell,
}

impl WorldObject {
    pub fn name(&self) -> String {
        self.attributes.name()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnvAction {
    Move(Direction),
    Examine,
    Pickup,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum EnvEvent {
    Examined { name: String, secret: SecretValue },
    PickedUp { name: String },
    Moved { direction: Direction },
    Bumped,
    NoOp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CellToken {
    OutOfBounds,
    Wall,
    Empty,
    Object(ObjectAttributes),
    Agent,
}

/// Egocentric 11×11 symbolic view with the agent at the center.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    cells: Vec<CellToken>,
    pub agent_color: Color,
    /// The object sharing the agent's cell, hidden under the agent token.
    pub underfoot: Option<ObjectAttributes>,
}

impl Observation {
    pub fn size(&self) -> usize {
        VIEW_SIZE
    }

    /// Token at offset `(dx, dy)` from the agent, each in `-5..=5`.
    pub fn relative(&self, dx: i32, dy: i32) -> CellToken {
        assert!(dx.abs() <= VIEW_RADIUS && dy.abs() <= VIEW_RADIUS, "offset outside view");
        let col = (dx + VIEW_RADIUS) as usize;
        let row = (dy + VIEW_RADIUS) as usize;
        self.cells[row * VIEW_SIZE + col]
    }

    pub fn center(&self) -> CellToken {
        self.relative(0, 0)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[CellToken]> {
        self.cells.chunks(VIEW_SIZE)
    }

    /// Distance from the agent to the nearest wall along each axis direction,
    /// read off the view. Returns `None` for a direction with no wall in sight.
    pub fn wall_distance(&self, direction: Direction) -> Option<i32> {
        let (dx, dy) = direction.delta();
        (1..=VIEW_RADIUS).find(|&k| self.relative(dx * k, dy * k) == CellToken::Wall)
    }
}

/// Attribute constraints for sampling a layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayoutRequest {
    pub textures: Vec<Texture>,
    pub colors: Vec<Color>,
    pub shapes: Vec<Shape>,
    /// Objects that must appear, in this order, before sampled ones.
    pub fixed: Vec<ObjectAttributes>,
    /// Triples that may not be sampled (e.g. held-out combinations).
    pub excluded: Vec<ObjectAttributes>,
}

impl Default for LayoutRequest {
    fn default() -> Self {
        Self {
            textures: Texture::ALL.to_vec(),
            colors: Color::ALL.to_vec(),
            shapes: Shape::ALL.to_vec(),
            fixed: Vec::new(),
            excluded: Vec::new(),
        }
    }
}

/// Serializable starting state of an episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub seed: u64,
    pub agent: Cell,
    pub agent_color: Color,
    pub objects: Vec<WorldObject>,
}

impl Layout {
    pub fn sample(seed: u64, request: &LayoutRequest) -> Result<Layout, EnvError> {
        let mut rng = stream_rng(seed, Stream::Layout);

        let mut chosen: Vec<ObjectAttributes> = Vec::with_capacity(OBJECT_COUNT);
        for attrs in &request.fixed {
            if !chosen.contains(attrs) {
                chosen.push(*attrs);
            }
        }
        let excluded: HashSet<_> = request.excluded.iter().chain(chosen.iter()).copied().collect();
        let mut pool = Vec::new();
        for &t in &request.textures {
            for &c in &request.colors {
                for &s in &request.shapes {
                    let a = ObjectAttributes::new(t, c, s);
                    if !excluded.contains(&a) && !pool.contains(&a) {
                        pool.push(a);
                    }
                }
            }
        }
        let missing = OBJECT_COUNT.saturating_sub(chosen.len());
        if chosen.len() > OBJECT_COUNT || pool.len() < missing {
            return Err(EnvError::Unsatisfiable {
                available: chosen.len().min(OBJECT_COUNT) + pool.len(),
                needed: OBJECT_COUNT,
            });
        }
        for i in index::sample(&mut rng, pool.len(), missing) {
            chosen.push(pool[i]);
        }

        let interior: Vec<Cell> = Cell::interior().collect();
        let cells: Vec<Cell> = index::sample(&mut rng, interior.len(), OBJECT_COUNT + 1)
            .into_iter()
            .map(|i| interior[i])
            .collect();
        let agent_color = Color::ALL[rng.random_range(0..Color::ALL.len())];

        Ok(Layout {
            seed,
            agent: cells[OBJECT_COUNT],
            agent_color,
            objects: chosen
                .into_iter()
                .zip(cells)
                .map(|(attributes, position)| WorldObject {
                    attributes,
                    secret: SecretValue::Unknown,
                    position,
                })
                .collect(),
        })
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let invalid = |m: String| Err(EnvError::InvalidLayout(m));
        if self.objects.len() != OBJECT_COUNT {
            return invalid(format!("expected {OBJECT_COUNT} objects, got {}", self.objects.len()));
        }
        if !self.agent.is_interior() {
            return invalid(format!("agent at non-interior cell {}", self.agent));
        }
        let mut cells = HashSet::new();
        let mut names = HashSet::new();
        for obj in &self.objects {
            if !obj.position.is_interior() {
                return invalid(format!("{} at non-interior cell {}", obj.name(), obj.position));
            }
            if !cells.insert(obj.position) {
                return invalid(format!("two objects share cell {}", obj.position));
            }
            if !names.insert(obj.attributes) {
                return invalid(format!("duplicate object {}", obj.name()));
            }
        }
        Ok(())
    }

    /// One-line text record: `layout seed=.. agent=c,r agent_color=.. objects=name@c,r:secret|..`
    pub fn to_record(&self) -> String {
        let objects: Vec<String> = self
            .objects
            .iter()
            .map(|o| format!("{}@{}:{}", o.name(), o.position, o.secret.as_str()))
            .collect();
        format!(
            "layout seed={} agent={} agent_color={} objects={}",
            self.seed,
            self.agent,
            self.agent_color,
            objects.join("|")
        )
    }

    pub fn from_record(line: &str) -> Result<Layout, EnvError> {
        let err = |m: &str| EnvError::Record(format!("{m}: {line:?}"));
        let rest = line.trim().strip_prefix("layout ").ok_or_else(|| err("missing prefix"))?;
        let rest = rest.strip_prefix("seed=").ok_or_else(|| err("missing seed"))?;
        let (seed, rest) = rest.split_once(" agent=").ok_or_else(|| err("missing agent"))?;
        let (agent, rest) = rest.split_once(" agent_color=").ok_or_else(|| err("missing agent_color"))?;
        let (color, objects) = rest.split_once(" objects=").ok_or_else(|| err("missing objects"))?;

        let parse_cell = |s: &str| -> Result<Cell, EnvError> {
            let (c, r) = s.split_once(',').ok_or_else(|| err("bad cell"))?;
            Ok(Cell::new(
                c.parse().map_err(|_| err("bad column"))?,
                r.parse().map_err(|_| err("bad row"))?,
            ))
        };

        let objects = objects
            .split('|')
            .map(|entry| {
                let (name, rest) = entry.split_once('@').ok_or_else(|| err("bad object entry"))?;
                let (cell, secret) = rest.split_once(':').ok_or_else(|| err("bad object entry"))?;
                Ok(WorldObject {
                    attributes: name.parse().map_err(|_| err("bad object name"))?,
                    secret: SecretValue::parse(secret).ok_or_else(|| err("bad secret"))?,
                    position: parse_cell(cell)?,
                })
            })
            .collect::<Result<Vec<_>, EnvError>>()?;

        let layout = Layout {
            seed: seed.parse().map_err(|_| err("bad seed"))?,
            agent: parse_cell(agent)?,
            agent_color: color.parse().map_err(|_| err("bad agent color"))?,
            objects,
        };
        layout.validate()?;
        Ok(layout)
    }
}

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Pickup { reward: f64 },
    StepLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub event: EnvEvent,
    pub observation: Observation,
    pub done: bool,
    pub reward: f64,
}

/// Full mutable state of one episode.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWorld {
    layout: Layout,
    objects: Vec<WorldObject>,
    agent: Cell,
    inventory: Vec<String>,
    step_count: u32,
    step_limit: u32,
    /// Names that must be picked up, in order, for reward. Empty means any
    /// pickup ends the episode unrewarded.
    goal: Vec<String>,
    termination: Option<Termination>,
}

impl GridWorld {
    pub fn new_episode(seed: u64, request: &LayoutRequest) -> Result<GridWorld, EnvError> {
        Ok(GridWorld::from_layout(Layout::sample(seed, request)?))
    }

    pub fn from_layout(layout: Layout) -> GridWorld {
        GridWorld {
            objects: layout.objects.clone(),
            agent: layout.agent,
            layout,
            inventory: Vec::new(),
            step_count: 0,
            step_limit: DEFAULT_STEP_LIMIT,
            goal: Vec::new(),
            termination: None,
        }
    }

    pub fn try_from_layout(layout: Layout) -> Result<GridWorld, EnvError> {
        layout.validate()?;
        Ok(GridWorld::from_layout(layout))
    }

    /// Starting layout, including secrets assigned before the first step.
    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn seed(&self) -> u64 {
        self.layout.seed
    }

    pub fn objects(&self) -> &[WorldObject] {
        &self.objects
    }

    pub fn object(&self, name: &str) -> Option<&WorldObject> {
        self.objects.iter().find(|o| o.name() == name)
    }

    pub fn object_names(&self) -> Vec<String> {
        self.objects.iter().map(WorldObject::name).collect()
    }

    pub fn agent_position(&self) -> Cell {
        self.agent
    }

    pub fn agent_color(&self) -> Color {
        self.layout.agent_color
    }

    pub fn inventory(&self) -> &[String] {
        &self.inventory
    }

    pub fn step_count(&self) -> u32 {
        self.step_count
    }

    pub fn step_limit(&self) -> u32 {
        self.step_limit
    }

    pub fn set_step_limit(&mut self, limit: u32) {
        self.step_limit = limit;
    }

    pub fn goal(&self) -> &[String] {
        &self.goal
    }

    pub fn is_done(&self) -> bool {
        self.termination.is_some()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.termination
    }

    /// Assigns a secret before the episode starts; the starting layout is
    /// updated too so logs replay the same world.
    pub(crate) fn set_secret(&mut self, name: &str, secret: SecretValue) -> Result<(), EnvError> {
        let mut found = false;
        for obj in self.objects.iter_mut().chain(self.layout.objects.iter_mut()) {
            if obj.name() == name {
                obj.secret = secret;
                found = true;
            }
        }
        found.then_some(()).ok_or_else(|| EnvError::UnknownObject(name.to_string()))
    }

    pub(crate) fn set_goal(&mut self, goal: Vec<String>) {
        self.goal = goal;
    }

    fn object_at(&self, cell: Cell) -> Option<usize> {
        self.objects.iter().position(|o| o.position == cell)
    }

    pub fn observe(&self) -> Observation {
        let mut cells = Vec::with_capacity(VIEW_SIZE * VIEW_SIZE);
        for dy in -VIEW_RADIUS..=VIEW_RADIUS {
            for dx in -VIEW_RADIUS..=VIEW_RADIUS {
                let cell = Cell::new(self.agent.col + dx, self.agent.row + dy);
                let token = if dx == 0 && dy == 0 {
                    CellToken::Agent
                } else if !cell.in_bounds() {
                    CellToken::OutOfBounds
                } else if cell.is_border() {
                    CellToken::Wall
                } else if let Some(i) = self.object_at(cell) {
                    CellToken::Object(self.objects[i].attributes)
                } else {
                    CellToken::Empty
                };
                cells.push(token);
            }
        }
        Observation {
            cells,
            agent_color: self.layout.agent_color,
            underfoot: self.object_at(self.agent).map(|i| self.objects[i].attributes),
        }
    }

    pub fn step(&mut self, action: EnvAction) -> Result<StepOutcome, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeDone);
        }
        self.step_count += 1;
        let mut reward = 0.0;

        let event = match action {
            EnvAction::Move(direction) => {
                let next = self.agent.step(direction);
                if next.is_interior() {
                    self.agent = next;
                    EnvEvent::Moved { direction }
                } else {
                    EnvEvent::Bumped
                }
            }
            EnvAction::Examine => match self.object_at(self.agent) {
                Some(i) => EnvEvent::Examined {
                    name: self.objects[i].name(),
                    secret: self.objects[i].secret,
                },
                None => EnvEvent::NoOp,
            },
            EnvAction::Pickup => match self.object_at(self.agent) {
                Some(i) => {
                    let name = self.objects.remove(i).name();
                    self.inventory.push(name.clone());
                    let on_track = self.goal.starts_with(&self.inventory);
                    if on_track && self.inventory.len() == self.goal.len() {
                        reward = 1.0;
                        self.termination = Some(Termination::Pickup { reward });
                    } else if !on_track {
                        self.termination = Some(Termination::Pickup { reward: 0.0 });
                    }
                    EnvEvent::PickedUp { name }
                }
                None => EnvEvent::NoOp,
            },
        };

        if self.termination.is_none() && self.step_count >= self.step_limit {
            self.termination = Some(Termination::StepLimit);
        }

        Ok(StepOutcome {
            event,
            observation: self.observe(),
            done: self.is_done(),
            reward,
        })
    }
}
