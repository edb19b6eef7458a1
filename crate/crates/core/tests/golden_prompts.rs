use par_core::actor::{ActorConfig, ScriptedActor};
use par_core::planner::{
    conditional_corpus, example_world, fixture_body, oracle_factory, search_corpus, CONDITIONAL_FIXTURE,
    SEARCH_FIXTURE,
};
use par_core::protocol::{render_corpus, render_prompt, run_episode, Limits, Transcript};
use par_core::reporter::Reporter;

/// Replays each published example as a live oracle episode and renders the
/// resulting transcripts.
fn rebuild(corpus: &[Transcript]) -> String {
    let mut rebuilt = Vec::new();
    for (i, example) in corpus.iter().enumerate() {
        let seed = 100 + i as u64;
        let (world, spec) = example_world(example, seed).unwrap();
        let mut planner = oracle_factory(&spec, seed);
        let mut actor = ScriptedActor::new(ActorConfig::default(), seed);
        let result =
            run_episode(planner.as_mut(), &mut actor, &mut Reporter::truthful(), world, &spec, &Limits::default());
        assert_eq!(result.reward, 1.0);
        assert_eq!(&result.transcript, example);
        rebuilt.push(result.transcript);
    }
    render_corpus(&rebuilt).unwrap()
}

#[test]
fn conditional_corpus_is_byte_exact() {
    assert_eq!(rebuild(&conditional_corpus()), fixture_body(CONDITIONAL_FIXTURE));
}

#[test]
fn search_corpus_is_byte_exact() {
    assert_eq!(rebuild(&search_corpus()), fixture_body(SEARCH_FIXTURE));
}

#[test]
fn fixture_bodies_have_documented_edges() {
    for file in [CONDITIONAL_FIXTURE, SEARCH_FIXTURE] {
        let body = fixture_body(file);
        assert!(body.starts_with("QUESTION: "));
        assert!(body.ends_with("<EOS>\nDONE "));
        assert_eq!(body.matches("\nDONE \n\n\n\nQUESTION: ").count(), 4);
        assert!(!body.contains("DONE}"));
        assert!(file.ends_with("DONE \n"));
    }
}

#[test]
fn fresh_question_follows_corpus() {
    let q = "If the grid teal h is good, pickup solid orange circle. Otherwise, pickup checker brown tee.";
    let prompt = render_prompt(&conditional_corpus(), &Transcript::new(q)).unwrap();
    let expected = format!("{}\n\n\n\nQUESTION: {q}\nANSWER:\nLM:\n", fixture_body(CONDITIONAL_FIXTURE));
    assert_eq!(prompt, expected);
}

#[test]
fn first_conditional_example_turns() {
    let example = &conditional_corpus()[0];
    let texts: Vec<&str> = example.dialogue().iter().map(|t| t.text.as_str()).collect();
    assert_eq!(
        texts,
        [
            "Examine solid dark blue h.",
            "I examined solid dark blue h. Its secret property has value bad.",
            "Pickup checker brown tee.",
            "I picked up checker brown tee.",
        ]
    );
}
