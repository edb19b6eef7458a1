use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("unknown vocabulary token {0:?}")]
    UnknownToken(String),
    #[error("not a canonical object name: {0:?}")]
    BadObjectName(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnvError {
    #[error("only {available} unique attribute triples satisfy the request, need {needed}")]
    Unsatisfiable { available: usize, needed: usize },
    #[error("step called after the episode finished")]
    EpisodeDone,
    #[error("invalid layout: {0}")]
    InvalidLayout(String),
    #[error("no object named {0:?} in the world")]
    UnknownObject(String),
    #[error("malformed layout record: {0}")]
    Record(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("question does not match any task template: {0:?}")]
    UnrecognizedQuestion(String),
    #[error("elimination template index {0} out of range")]
    BadTemplate(usize),
    #[error("basic steps task needs 2 or 3 objects, got {0}")]
    BadStepCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstructionError {
    #[error("no recognized verb in {0:?}")]
    NoVerb(String),
    #[error("no known object named in {0:?}")]
    NoObject(String),
    #[error("{0:?} matches more than one object")]
    Ambiguous(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptError {
    #[error("turn {index}: expected {expected}, found {found}")]
    Alternation {
        index: usize,
        expected: &'static str,
        found: &'static str,
    },
    #[error("few-shot transcript {0} is not complete")]
    IncompleteFewShot(usize),
    #[error("malformed prompt: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlannerError {
    #[error("planner has nothing left to do")]
    Finished,
    #[error("completion endpoint failed after {attempts} attempts: {message}")]
    Transport { attempts: u32, message: String },
    #[error("planner input closed")]
    InputClosed,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TrainError {
    #[error("{0:?} is not trainable by this routine")]
    UnsupportedTask(crate::tasks::TaskKind),
    #[error("success rate {rate:.3} below {threshold} after {episodes} episodes")]
    Diverged {
        rate: f64,
        threshold: f64,
        episodes: usize,
    },
    #[error(transparent)]
    Task(#[from] TaskError),
    #[error("malformed weight record: {0}")]
    Record(String),
}

/// One failed call to a completion endpoint.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompletionError {
    #[error("transport error: {0}")]
    Transport(String),
    #[error("request timed out")]
    Timeout,
    #[error("endpoint returned status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("unexpected response body: {0}")]
    BadResponse(String),
}
