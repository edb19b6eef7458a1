//! Episode logs: one JSON object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use par_core::gridworld::EnvEvent;
use par_core::protocol::{EpisodeResult, FailureTag, Transcript};
use par_core::tasks::{TaskBinding, TaskSpec};

use crate::error::HarnessError;

/// Conditions an episode ran under, enough to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub name: String,
    pub planner: String,
    pub reporter: String,
    pub noise: f64,
    pub error_rate: f64,
    pub error_scope: String,
    pub budget: u32,
    pub max_planner_turns: u32,
    pub step_limit: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub kind: String,
    pub question: String,
    pub template_id: Option<usize>,
    pub binding: TaskBinding,
    pub object_names: Vec<String>,
    pub correct: String,
}

impl TaskRecord {
    pub fn new(spec: &TaskSpec) -> Self {
        Self {
            kind: spec.kind.to_string(),
            question: spec.question.clone(),
            template_id: spec.template_id(),
            binding: spec.binding.clone(),
            object_names: spec.object_names.clone(),
            correct: spec.correct().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub condition: Condition,
    pub task: TaskRecord,
    /// Starting layout as a `layout ...` line record.
    pub layout: String,
    pub transcript: Transcript,
    pub events: Vec<EnvEvent>,
    pub reward: f64,
    pub failure_tag: Option<FailureTag>,
    pub planner_turns: u32,
    pub env_steps: u32,
    pub transport_failures: u32,
}

impl EpisodeRecord {
    pub fn new(condition: &Condition, spec: &TaskSpec, layout: String, result: &EpisodeResult) -> Self {
        Self {
            seed: result.seed,
            condition: condition.clone(),
            task: TaskRecord::new(spec),
            layout,
            transcript: result.transcript.clone(),
            events: result.events.clone(),
            reward: result.reward,
            failure_tag: result.failure_tag,
            planner_turns: result.planner_turns,
            env_steps: result.env_steps,
            transport_failures: result.transport_failures,
        }
    }

    pub fn result(&self) -> EpisodeResult {
        EpisodeResult {
            seed: self.seed,
            reward: self.reward,
            env_steps: self.env_steps,
            planner_turns: self.planner_turns,
            transcript: self.transcript.clone(),
            events: self.events.clone(),
            failure_tag: self.failure_tag,
            transport_failures: self.transport_failures,
        }
    }
}

pub fn write_records(path: &Path, records: &[EpisodeRecord]) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    let file = File::create(path).map_err(|e| HarnessError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for record in records {
        let line = serde_json::to_string(record).expect("record serializes");
        writeln!(out, "{line}").map_err(|e| HarnessError::io(path, e))?;
    }
    out.flush().map_err(|e| HarnessError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<EpisodeRecord>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| HarnessError::Log { line: i + 1, message: e.to_string() })?;
        records.push(record);
    }
    Ok(records)
}
