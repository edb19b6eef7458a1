//! Tab-separated summary tables and learning-curve files.

use std::path::Path;

use par_core::curve::LearningCurve;
use par_core::tasks::TaskKind;

use crate::error::HarnessError;
use crate::logs::{Condition, EpisodeRecord};
use crate::metrics::MetricsSummary;

pub const SUMMARY_HEADER: &str = "condition\ttask\tplanner\treporter\tnoise\terror_rate\tepisodes\tsuccesses\tsuccess_rate\tci_low\tci_high\tmean_turns\tmean_steps\tfailures";

pub type SummaryRow = (Condition, TaskKind, MetricsSummary);

pub fn summary_line(condition: &Condition, task: TaskKind, s: &MetricsSummary) -> String {
    format!(
        "{}\t{task}\t{}\t{}\t{:.3}\t{:.3}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}\t{:.3}\t{:.2}\t{}",
        condition.name,
        condition.planner,
        condition.reporter,
        condition.noise,
        condition.error_rate,
        s.episodes,
        s.successes,
        s.success_rate,
        s.ci_low,
        s.ci_high,
        s.mean_planner_turns,
        s.mean_env_steps,
        s.failure_column(),
    )
}

pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut out = format!("{SUMMARY_HEADER}\n");
    for (condition, task, summary) in rows {
        out.push_str(&summary_line(condition, *task, summary));
        out.push('\n');
    }
    out
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), HarnessError> {
    write_text(path, &summary_table(rows))
}

pub fn write_curve(path: &Path, curve: &LearningCurve) -> Result<(), HarnessError> {
    write_text(path, &curve.to_table())
}

pub fn write_text(path: &Path, text: &str) -> Result<(), HarnessError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

/// One summary row per (condition, task) group, in first-seen order.
pub fn report_rows(records: &[EpisodeRecord]) -> Result<Vec<SummaryRow>, HarnessError> {
    if records.is_empty() {
        return Err(HarnessError::EmptyLogs);
    }
    let mut groups: Vec<(Condition, String, Vec<par_core::protocol::EpisodeResult>)> = Vec::new();
    for record in records {
        let result = record.result();
        match groups.iter_mut().find(|(c, k, _)| *c == record.condition && *k == record.task.kind) {
            Some((_, _, results)) => results.push(result),
            None => groups.push((record.condition.clone(), record.task.kind.clone(), vec![result])),
        }
    }
    groups
        .into_iter()
        .map(|(condition, kind, results)| {
            let task: TaskKind = kind.parse().map_err(HarnessError::Config)?;
            Ok((condition, task, MetricsSummary::from_results(&results)))
        })
        .collect()
}

pub fn report_tables(records: &[EpisodeRecord]) -> Result<String, HarnessError> {
    Ok(summary_table(&report_rows(records)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{ExperimentConfig, PlannerKind};
    use crate::sweep::run_sweep;

    #[test]
    fn identical_logs_give_identical_rows() {
        let config = ExperimentConfig { episodes: 30, ..ExperimentConfig::default() };
        let records = run_sweep(&config).unwrap().records;
        let mut renamed = records.clone();
        for r in &mut renamed {
            r.condition.name = "copy".into();
        }
        let all: Vec<_> = records.iter().chain(&renamed).cloned().collect();
        let table = report_tables(&all).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1].split_once('\t').unwrap().1, lines[2].split_once('\t').unwrap().1);
    }

    #[test]
    fn empty_logs_are_an_error() {
        assert!(matches!(report_tables(&[]), Err(HarnessError::EmptyLogs)));
    }

    #[test]
    fn header_matches_row_width() {
        let mut config = ExperimentConfig { episodes: 5, ..ExperimentConfig::default() };
        config.planner.kind = PlannerKind::Random;
        let table = report_tables(&run_sweep(&config).unwrap().records).unwrap();
        let widths: Vec<usize> = table.lines().map(|l| l.split('\t').count()).collect();
        assert!(widths.iter().all(|&w| w == widths[0]));
    }

    #[test]
    fn curve_rows_match_checkpoints() {
        let mut curve = LearningCurve::default();
        for i in 0..7 {
            curve.push(i * 10, 0.5);
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.txt");
        write_curve(&path, &curve).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count() - 1, curve.points.len());
    }
}
