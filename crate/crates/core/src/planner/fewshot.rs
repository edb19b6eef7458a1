use rand::seq::index;

use crate::actor::{ActorConfig, ScriptedActor};
use crate::error::{TaskError, TranscriptError};
use crate::gridworld::GridWorld;
use crate::planner::oracle_factory;
use crate::protocol::{run_episode, Limits, Report, Role, Transcript, BLOCK_SEPARATOR};
use crate::reporter::Reporter;
use crate::rng::{stream_rng, Stream};
use crate::tasks::{
    generate_with, world_for_binding, TaskBinding, TaskKind, TaskOptions, TaskSpec, ELIMINATION_TRAIN_TEMPLATES,
};

pub const CONDITIONAL_FIXTURE: &str = include_str!("../../fixtures/conditional_prompt.txt");
pub const SEARCH_FIXTURE: &str = include_str!("../../fixtures/search_prompt.txt");

pub const FEW_SHOT_COUNT: usize = 5;
pub const MIN_POOL_SIZE: usize = 8;

const POOL_SEED_BASE: u64 = 0x5eed_0000;

/// The corpus bytes of a fixture file: everything after the `# ---` line,
/// without the file's final newline.
pub fn fixture_body(file: &str) -> &str {
    let start = file.find("# ---\n").map_or(0, |i| i + "# ---\n".len());
    let body = &file[start..];
    body.strip_suffix('\n').unwrap_or(body)
}

fn parse_corpus(text: &str) -> Result<Vec<Transcript>, TranscriptError> {
    text.split(BLOCK_SEPARATOR).map(Transcript::parse_block).collect()
}

/// The published five conditional-task examples.
pub fn conditional_corpus() -> Vec<Transcript> {
    parse_corpus(fixture_body(CONDITIONAL_FIXTURE)).expect("conditional fixture parses")
}

/// The published five search-task examples.
pub fn search_corpus() -> Vec<Transcript> {
    parse_corpus(fixture_body(SEARCH_FIXTURE)).expect("search fixture parses")
}

/// A world in which the oracle reproduces `example`: its question's objects
/// with the secrets its reports reveal, placed by `seed`.
pub fn example_world(example: &Transcript, seed: u64) -> Result<(GridWorld, TaskSpec), TaskError> {
    let binding = TaskBinding::parse(example.question())?;
    let secrets: Vec<_> = example
        .dialogue()
        .iter()
        .filter(|t| t.role == Role::Agent)
        .filter_map(|t| match Report::parse(&t.text) {
            Some(Report::Examined { name, value }) => Some((name, value)),
            _ => None,
        })
        .collect();
    world_for_binding(binding, &secrets, seed)
}

/// Task family whose examples prompt `kind`. Three-object collection is
/// prompted with two-object examples.
fn prompt_family(kind: TaskKind) -> TaskKind {
    match kind {
        TaskKind::BasicSteps(_) => TaskKind::BasicSteps(2),
        other => other,
    }
}

/// Finished transcripts for `kind`: the published examples where they exist,
/// topped up with oracle episodes to at least `size`.
pub fn example_pool(kind: TaskKind, size: usize) -> Vec<Transcript> {
    let kind = prompt_family(kind);
    let mut pool = match kind {
        TaskKind::ConditionalSecret => conditional_corpus(),
        TaskKind::SearchSecret => search_corpus(),
        _ => Vec::new(),
    };
    let mut seed = POOL_SEED_BASE;
    while pool.len() < size {
        let options = TaskOptions {
            template: (kind == TaskKind::OptionElimination)
                .then_some((seed as usize) % ELIMINATION_TRAIN_TEMPLATES),
            ..TaskOptions::default()
        };
        if let Ok((world, spec)) = generate_with(kind, seed, &options) {
            let mut planner = oracle_factory(&spec, seed);
            let mut actor = ScriptedActor::new(ActorConfig::default(), seed);
            let mut reporter = Reporter::truthful();
            let result = run_episode(planner.as_mut(), &mut actor, &mut reporter, world, &spec, &Limits::default());
            if result.reward == 1.0 {
                pool.push(result.transcript);
            }
        }
        seed += 1;
    }
    pool
}

/// Fixed default prompt examples for `kind`.
pub fn default_corpus(kind: TaskKind) -> Vec<Transcript> {
    let mut pool = example_pool(kind, FEW_SHOT_COUNT);
    pool.truncate(FEW_SHOT_COUNT);
    pool
}

/// `count` examples drawn without replacement from a pool of at least
/// [`MIN_POOL_SIZE`], chosen by `seed`.
pub fn sample_corpus(kind: TaskKind, seed: u64, count: usize) -> Vec<Transcript> {
    let pool = example_pool(kind, MIN_POOL_SIZE.max(count));
    let mut rng = stream_rng(seed, Stream::Planner);
    let mut picks = index::sample(&mut rng, pool.len(), count).into_vec();
    picks.sort_unstable();
    picks.into_iter().map(|i| pool[i].clone()).collect()
}
