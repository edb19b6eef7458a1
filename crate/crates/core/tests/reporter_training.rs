use statrs::distribution::{Beta, ContinuousCDF};

use par_core::actor::ActorConfig;
use par_core::gridworld::{Cell, GridWorld};
use par_core::planner::oracle_factory;
use par_core::reporter::{train_reporter, ReporterTrainConfig};
use par_core::tasks::{cell_close_to_wall, generate, TaskKind};

/// Exact two-sided binomial interval.
fn clopper_pearson(successes: u64, trials: u64, alpha: f64) -> (f64, f64) {
    let (k, n) = (successes as f64, trials as f64);
    let lo = if successes == 0 { 0.0 } else { Beta::new(k, n - k + 1.0).unwrap().inverse_cdf(alpha / 2.0) };
    let hi = if successes == trials { 1.0 } else { Beta::new(k + 1.0, n - k).unwrap().inverse_cdf(1.0 - alpha / 2.0) };
    (lo, hi)
}

#[test]
fn close_cells_are_32_of_81() {
    let close = Cell::interior().filter(|&c| cell_close_to_wall(c)).count();
    assert_eq!((close, Cell::interior().count()), (32, 81));
}

#[test]
fn supervised_ablation_bounds_reinforce() {
    let quick = ReporterTrainConfig { episodes: 600, eval_layouts: 100, ..ReporterTrainConfig::default() };
    let supervised = ReporterTrainConfig { supervised: true, ..quick.clone() };
    let kind = TaskKind::VisualLocationConditional;
    let (_, rl) = train_reporter(kind, &oracle_factory, &ActorConfig::default(), &quick).unwrap();
    let (_, sup) = train_reporter(kind, &oracle_factory, &ActorConfig::default(), &supervised).unwrap();
    assert_eq!(rl.points.len(), sup.points.len());
    for (a, b) in rl.points.iter().zip(&sup.points) {
        assert_eq!(a.episodes, b.episodes);
        assert!(b.success_rate + 1e-9 >= a.success_rate, "at {}: {} < {}", a.episodes, b.success_rate, a.success_rate);
    }
}

#[test]
fn converged_labels_follow_close_rate() {
    let (model, curve) = train_reporter(
        TaskKind::VisualLocationConditional,
        &oracle_factory,
        &ActorConfig::default(),
        &ReporterTrainConfig::default(),
    )
    .unwrap();
    assert_eq!(curve.first(), Some(0.5));

    let n = 1000;
    let mut close = 0;
    for seed in 0..n {
        let (world, spec) = generate(TaskKind::VisualLocationConditional, 7_000_000 + seed).unwrap();
        let mut layout = world.layout().clone();
        layout.agent = world.object(spec.decider().unwrap()).unwrap().position;
        close += u64::from(model.prob_first(&GridWorld::from_layout(layout).observe()) >= 0.5);
    }
    let (lo, hi) = clopper_pearson(close, n, 0.01);
    let expected = 32.0 / 81.0;
    assert!(lo <= expected && expected <= hi, "{close}/{n} close, interval [{lo}, {hi}]");
}

#[test]
fn interval_matches_reference_values() {
    // Reference values from scipy.stats.binomtest(...).proportion_ci(method="exact").
    let (lo, hi) = clopper_pearson(5, 10, 0.05);
    assert!((lo - 0.1870860284474045).abs() < 1e-9 && (hi - 0.8129139715525955).abs() < 1e-9);
}
