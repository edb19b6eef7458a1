use std::collections::HashMap;

use proptest::prelude::*;

use par_core::actor::{ActorConfig, ErrorScope, ScriptedActor};
use par_core::gridworld::{CellToken, VIEW_SIZE};
use par_core::planner::{ScriptedPlanner, Strategy as Plan};
use par_core::protocol::{
    parse_instruction, parse_prompt, render_prompt, run_episode, EpisodeResult, FailureTag, Instruction, Limits,
    Report, Role, Transcript, PARSE_FAILURE_REPORT,
};
use par_core::reporter::{Reporter, ReporterKind};
use par_core::tasks::{generate, TaskKind};
use par_core::vocab::ObjectAttributes;

fn kind_strategy() -> impl Strategy<Value = TaskKind> {
    prop::sample::select(TaskKind::ALL.to_vec())
}

fn planner_strategy() -> impl Strategy<Value = Plan> {
    prop::sample::select(Plan::ALL.to_vec())
}

fn episode(
    kind: TaskKind,
    seed: u64,
    strategy: Plan,
    error_rate: f64,
    noise: f64,
    limits: Limits,
) -> EpisodeResult {
    let (world, spec) = generate(kind, seed).unwrap();
    let mut planner = ScriptedPlanner::new(strategy, &spec, seed);
    let config = ActorConfig { error_rate, ..ActorConfig::default() };
    let mut actor = ScriptedActor::new(config, seed);
    let mut reporter = Reporter::new(ReporterKind::Noisy { p: noise }, seed);
    run_episode(&mut planner, &mut actor, &mut reporter, world, &spec, &limits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn episodes_respect_limits_and_tags(
        kind in kind_strategy(),
        seed in any::<u64>(),
        strategy in planner_strategy(),
        error_rate in 0.0..=1.0f64,
        noise in 0.0..=1.0f64,
        turns in 0u32..15,
        steps in 1u32..120,
    ) {
        let limits = Limits { max_planner_turns: turns, step_limit: steps };
        let result = episode(kind, seed, strategy, error_rate, noise, limits);
        prop_assert!(result.planner_turns <= turns);
        prop_assert!(result.env_steps <= steps);
        prop_assert!(result.reward == 0.0 || result.reward == 1.0);
        prop_assert_eq!(result.failure_tag.is_some(), result.reward == 0.0);
        result.transcript.validate().unwrap();
        for turn in result.transcript.dialogue() {
            if turn.role == Role::Agent {
                prop_assert!(turn.text.is_empty() || turn.text == PARSE_FAILURE_REPORT || Report::parse(&turn.text).is_some(),
                    "agent text {:?}", turn.text);
            }
        }
    }

    #[test]
    fn episodes_are_deterministic(kind in kind_strategy(), seed in any::<u64>(), strategy in planner_strategy()) {
        let a = episode(kind, seed, strategy, 0.3, 0.3, Limits::default());
        let b = episode(kind, seed, strategy, 0.3, 0.3, Limits::default());
        prop_assert_eq!(a, b);
    }

    #[test]
    fn repeat_equals_oracle_without_noise(kind in kind_strategy(), seed in any::<u64>()) {
        let a = episode(kind, seed, Plan::Oracle, 0.0, 0.0, Limits::default());
        let b = episode(kind, seed, Plan::Repeat, 0.0, 0.0, Limits::default());
        prop_assert_eq!(a.transcript, b.transcript);
    }

    #[test]
    fn noise_free_oracle_always_succeeds(kind in kind_strategy(), seed in any::<u64>()) {
        let result = episode(kind, seed, Plan::Oracle, 0.0, 0.0, Limits::default());
        prop_assert_eq!(result.reward, 1.0);
    }

    #[test]
    fn canonical_instructions_parse_back(seed in any::<u64>(), pick in 0usize..4, examine in any::<bool>()) {
        let (_, spec) = generate(TaskKind::SearchSecret, seed).unwrap();
        let name = &spec.object_names[pick];
        let instruction = if examine { Instruction::examine(name) } else { Instruction::pickup(name) };
        let raw = format!("{instruction}<EOS>\nAgent:");
        prop_assert_eq!(parse_instruction(&raw, &spec.object_names).unwrap(), instruction);
    }

    #[test]
    fn observation_is_centered(seed in any::<u64>()) {
        let (world, _) = generate(TaskKind::SearchSecret, seed).unwrap();
        let obs = world.observe();
        prop_assert_eq!(obs.size(), VIEW_SIZE);
        prop_assert_eq!(obs.rows().count(), VIEW_SIZE);
        prop_assert!(obs.rows().all(|r| r.len() == VIEW_SIZE));
        prop_assert_eq!(obs.center(), CellToken::Agent);
    }
}

#[test]
fn zero_turn_budget_is_turn_limit() {
    let result = episode(TaskKind::ConditionalSecret, 1, Plan::Oracle, 0.0, 0.0,
        Limits { max_planner_turns: 0, ..Limits::default() });
    assert_eq!((result.reward, result.failure_tag), (0.0, Some(FailureTag::TurnLimit)));
}

#[test]
fn always_wrong_actor_never_wins_search() {
    for seed in 0..200 {
        let result = episode(TaskKind::SearchSecret, seed, Plan::Oracle, 1.0, 0.0, Limits::default());
        assert_eq!(result.reward, 0.0, "seed {seed}");
    }
}

#[test]
fn examine_only_errors_spare_pickups() {
    for seed in 0..200 {
        let (world, spec) = generate(TaskKind::SearchSecret, seed).unwrap();
        let mut planner = ScriptedPlanner::new(Plan::Oracle, &spec, seed);
        let config = ActorConfig { error_rate: 0.5, error_scope: ErrorScope::ExamineOnly, ..ActorConfig::default() };
        let mut actor = ScriptedActor::new(config, seed);
        let result = run_episode(&mut planner, &mut actor, &mut Reporter::truthful(), world, &spec, &Limits::default());
        assert_ne!(result.failure_tag, Some(FailureTag::WrongPickup));
    }
}

#[test]
fn oracle_turn_counts() {
    for seed in 0..300 {
        let r = episode(TaskKind::ConditionalSecret, seed, Plan::Oracle, 0.0, 0.0, Limits::default());
        assert_eq!(r.planner_turns, 2);
        let (_, spec) = generate(TaskKind::SearchSecret, seed).unwrap();
        let k = spec.object_names.iter().position(|n| n == spec.correct()).unwrap() as u32 + 1;
        let r = episode(TaskKind::SearchSecret, seed, Plan::Oracle, 0.0, 0.0, Limits::default());
        assert_eq!(r.planner_turns, k + 1);
    }
}

/// Random alternating transcript over one room's vocabulary.
fn fuzz_transcript(rng: &mut impl rand::Rng, names: &[String]) -> Transcript {
    let mut t = Transcript::new(format!("Get {}.", names[rng.random_range(0..names.len())]));
    let turns = rng.random_range(0..7);
    let mut lm = rng.random_bool(0.8);
    for _ in 0..turns {
        let name = &names[rng.random_range(0..names.len())];
        if lm {
            let verb = if rng.random_bool(0.5) { "Examine" } else { "Pickup" };
            t.push_lm(format!("{verb} {name}."));
        } else {
            let text = match rng.random_range(0..4) {
                0 => format!("I picked up {name}."),
                1 => format!("I examined {name}. Its secret property has value good."),
                2 => "I have moved up.".to_string(),
                _ => String::new(),
            };
            t.push_agent(text);
        }
        lm = !lm;
    }
    t.done = t.last().is_some_and(|x| x.role == Role::Agent) && rng.random_bool(0.5);
    t
}

#[test]
fn rendering_is_injective_on_fuzzed_transcripts() {
    use rand::SeedableRng;
    use std::hash::{DefaultHasher, Hash, Hasher};

    let names: Vec<String> = ObjectAttributes::all().take(6).map(|a| a.name()).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut by_hash: HashMap<u64, Transcript> = HashMap::new();
    for _ in 0..1000 {
        let t = fuzz_transcript(&mut rng, &names);
        let text = render_prompt(&[], &t).unwrap();
        let mut h = DefaultHasher::new();
        text.hash(&mut h);
        if let Some(prev) = by_hash.insert(h.finish(), t.clone()) {
            assert_eq!(prev, t, "two transcripts rendered identically");
        }
        assert_eq!(parse_prompt(&text).unwrap().1, t);
    }
    assert!(by_hash.len() > 500);
}
