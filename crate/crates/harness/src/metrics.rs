use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use par_core::protocol::EpisodeResult;

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub episodes: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_planner_turns: f64,
    pub mean_env_steps: f64,
    /// Failure tag name to count.
    pub failures: BTreeMap<String, usize>,
    pub transport_failures: usize,
}

impl MetricsSummary {
    pub fn from_results<'a>(results: impl IntoIterator<Item = &'a EpisodeResult>) -> Self {
        let mut episodes = 0;
        let mut successes = 0;
        let mut turns = 0u64;
        let mut steps = 0u64;
        let mut transport_failures = 0;
        let mut failures = BTreeMap::new();
        for r in results {
            episodes += 1;
            if r.reward == 1.0 {
                successes += 1;
            }
            if let Some(tag) = r.failure_tag {
                *failures.entry(format!("{tag:?}")).or_insert(0) += 1;
            }
            turns += u64::from(r.planner_turns);
            steps += u64::from(r.env_steps);
            transport_failures += r.transport_failures as usize;
        }
        let n = episodes.max(1) as f64;
        let (ci_low, ci_high) = wilson_interval(successes, episodes, Z_95);
        Self {
            episodes,
            successes,
            success_rate: successes as f64 / n,
            ci_low,
            ci_high,
            mean_planner_turns: turns as f64 / n,
            mean_env_steps: steps as f64 / n,
            failures,
            transport_failures,
        }
    }

    /// `Tag:count` pairs joined by commas, or `-` when every episode succeeded.
    pub fn failure_column(&self) -> String {
        if self.failures.is_empty() {
            return "-".into();
        }
        self.failures.iter().map(|(k, v)| format!("{k}:{v}")).collect::<Vec<_>>().join(",")
    }
}
