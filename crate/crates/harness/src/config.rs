//! Experiment configuration: a TOML file plus `section.key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use par_core::actor::{ActorConfig, ErrorScope, DEFAULT_INSTRUCTION_BUDGET};
use par_core::planner::{LlmSettings, Strategy};
use par_core::protocol::Limits;
use par_core::tasks::TaskKind;

use crate::error::HarnessError;

/// Serde adapter for types with matching `Display` and `FromStr`.
pub(crate) mod by_name {
    use std::fmt::Display;
    use std::str::FromStr;

    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PlannerKind {
    Oracle,
    Repeat,
    Cycle,
    Naive,
    Random,
    Llm,
    Human,
}

impl PlannerKind {
    pub fn strategy(self) -> Option<Strategy> {
        match self {
            PlannerKind::Oracle => Some(Strategy::Oracle),
            PlannerKind::Repeat => Some(Strategy::Repeat),
            PlannerKind::Cycle => Some(Strategy::Cycle),
            PlannerKind::Naive => Some(Strategy::Naive),
            PlannerKind::Random => Some(Strategy::RandomPickup),
            PlannerKind::Llm | PlannerKind::Human => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FewShotMode {
    /// The fixed default examples for the task.
    Fixed,
    /// Examples drawn from the task's pool by episode seed.
    Sampled,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerSection {
    pub kind: PlannerKind,
    pub few_shot: FewShotMode,
    pub few_shot_count: usize,
}

impl Default for PlannerSection {
    fn default() -> Self {
        Self { kind: PlannerKind::Oracle, few_shot: FewShotMode::Fixed, few_shot_count: 5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReporterChoice {
    Truthful,
    Noisy,
    Learned,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReporterSection {
    pub kind: ReporterChoice,
    /// Per-movement probability of an irrelevant report (noisy only).
    pub noise: f64,
    /// Weight record written by `train-reporter` (learned only).
    pub weights: Option<PathBuf>,
}

impl Default for ReporterSection {
    fn default() -> Self {
        Self { kind: ReporterChoice::Truthful, noise: 0.2, weights: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScopeName {
    All,
    ExamineOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ActorSection {
    pub error_rate: f64,
    pub error_scope: ScopeName,
    pub budget: u32,
}

impl Default for ActorSection {
    fn default() -> Self {
        Self { error_rate: 0.0, error_scope: ScopeName::All, budget: DEFAULT_INSTRUCTION_BUDGET }
    }
}

impl ActorSection {
    pub fn actor_config(&self) -> ActorConfig {
        ActorConfig {
            error_rate: self.error_rate,
            error_scope: match self.error_scope {
                ScopeName::All => ErrorScope::AllVerbs,
                ScopeName::ExamineOnly => ErrorScope::ExamineOnly,
            },
            budget: self.budget,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// Episode log, one JSON record per line.
    pub log: Option<PathBuf>,
    /// Tab-separated summary row with header.
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EndpointConfig {
    /// Full URL the completion request is POSTed to.
    pub url: String,
    /// Environment variable holding the bearer token. Unset variable means
    /// no Authorization header.
    pub token_env: String,
    pub timeout_secs: f64,
    pub retries: u32,
    /// Pause before each retry, doubled every attempt.
    pub backoff_ms: u64,
    /// Most requests in flight at once across all episodes.
    pub max_in_flight: usize,
    /// JSON body with `{{prompt}}`, `{{stop}}`, `{{max_tokens}}` and
    /// `{{temperature}}` placeholders, each replaced by a JSON value.
    pub request_template: String,
    /// JSON pointer to the completion text in the response.
    pub response_pointer: String,
    pub max_tokens: u32,
    pub temperature: f64,
}

pub const DEFAULT_REQUEST_TEMPLATE: &str =
    r#"{"prompt": {{prompt}}, "stop": {{stop}}, "max_tokens": {{max_tokens}}, "temperature": {{temperature}}}"#;

impl Default for EndpointConfig {
    fn default() -> Self {
        let llm = LlmSettings::default();
        Self {
            url: "http://127.0.0.1:8089/v1/completions".into(),
            token_env: "PAR_API_TOKEN".into(),
            timeout_secs: 30.0,
            retries: llm.retries,
            backoff_ms: 200,
            max_in_flight: 8,
            request_template: DEFAULT_REQUEST_TEMPLATE.into(),
            response_pointer: "/choices/0/text".into(),
            max_tokens: llm.max_tokens,
            temperature: llm.temperature,
        }
    }
}

impl EndpointConfig {
    pub fn llm_settings(&self) -> LlmSettings {
        LlmSettings { temperature: self.temperature, max_tokens: self.max_tokens, retries: self.retries }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Label used in summary tables.
    pub name: String,
    #[serde(with = "by_name")]
    pub task: TaskKind,
    pub episodes: usize,
    pub base_seed: u64,
    /// Worker threads; 0 means one per available core.
    pub parallelism: usize,
    pub planner: PlannerSection,
    pub reporter: ReporterSection,
    pub actor: ActorSection,
    pub limits: Limits,
    pub output: OutputSection,
    pub endpoint: Option<EndpointConfig>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: "default".into(),
            task: TaskKind::SearchSecret,
            episodes: 500,
            base_seed: 0,
            parallelism: 0,
            planner: PlannerSection::default(),
            reporter: ReporterSection::default(),
            actor: ActorSection::default(),
            limits: Limits::default(),
            output: OutputSection::default(),
            endpoint: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        Self::from_toml_with(text, &[])
    }

    /// Parses `text`, then applies `section.key=value` overrides. Values are
    /// read as TOML scalars; anything that does not parse is taken as a string.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self, HarnessError> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        for item in overrides {
            apply_override(&mut table, item)?;
        }
        let config: ExperimentConfig =
            table.try_into().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_with(&text, overrides)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if !(0.0..=1.0).contains(&self.actor.error_rate) {
            return bad(format!("actor.error_rate {} outside [0, 1]", self.actor.error_rate));
        }
        if !(0.0..=1.0).contains(&self.reporter.noise) {
            return bad(format!("reporter.noise {} outside [0, 1]", self.reporter.noise));
        }
        if self.limits.step_limit == 0 {
            return bad("limits.step_limit must be positive".into());
        }
        if self.planner.kind == PlannerKind::Llm && self.endpoint.is_none() {
            return bad("planner.kind = \"llm\" needs an [endpoint] section".into());
        }
        if self.reporter.kind == ReporterChoice::Learned && self.reporter.weights.is_none() {
            return bad("reporter.kind = \"learned\" needs reporter.weights".into());
        }
        Ok(())
    }
}

fn apply_override(table: &mut toml::Table, item: &str) -> Result<(), HarnessError> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| HarnessError::Config(format!("override {item:?} is not key=value")))?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut node = table;
    for key in parents {
        node = node
            .entry(key.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| HarnessError::Config(format!("{key} is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_uses_defaults() {
        let c = ExperimentConfig::from_toml("task = \"conditional-secret\"\n").unwrap();
        assert_eq!(c.task, TaskKind::ConditionalSecret);
        assert_eq!(c.limits, Limits::default());
        assert_eq!(c.planner.kind, PlannerKind::Oracle);
    }

    #[test]
    fn overrides_reach_nested_fields() {
        let c = ExperimentConfig::from_toml_with(
            "task = \"search\"\n[reporter]\nkind = \"noisy\"\n",
            &["reporter.noise=0.5".into(), "planner.kind=repeat".into(), "limits.max_planner_turns=20".into()],
        )
        .unwrap();
        assert_eq!(c.reporter.noise, 0.5);
        assert_eq!(c.planner.kind, PlannerKind::Repeat);
        assert_eq!(c.limits.max_planner_turns, 20);
    }

    #[test]
    fn serialized_config_reloads() {
        let c = ExperimentConfig { endpoint: Some(EndpointConfig::default()), ..ExperimentConfig::default() };
        assert_eq!(ExperimentConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ExperimentConfig::from_toml("[actor]\nerror_rate = 1.5\n").is_err());
        assert!(ExperimentConfig::from_toml("[planner]\nkind = \"llm\"\n").is_err());
        assert!(ExperimentConfig::from_toml("typo = 1\n").is_err());
        assert!(ExperimentConfig::from_toml_with("", &["noequals".into()]).is_err());
    }
}
