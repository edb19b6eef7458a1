//! Dialogue transcripts, prompt layout, instruction grammar, and the episode loop.

mod episode;
mod instruction;
mod report;
mod transcript;

pub use episode::{run_episode, EpisodeResult, FailureTag, Limits, DEFAULT_MAX_PLANNER_TURNS};
pub use instruction::{parse_instruction, truncate_output, Instruction, Verb};
pub use report::{Report, PARSE_FAILURE_REPORT};
pub use transcript::{
    parse_prompt, render_corpus, render_prompt, Role, Transcript, Turn, BLOCK_SEPARATOR, DONE_LINE, EOS,
};
