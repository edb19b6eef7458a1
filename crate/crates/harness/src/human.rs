use std::io::{BufRead, Write};

use par_core::planner::Planner;
use par_core::protocol::Transcript;
use par_core::PlannerError;

/// Planner that shows the current block on a terminal and reads each
/// instruction from a line of input.
pub struct HumanPlanner<R, W> {
    input: R,
    output: W,
}

impl<R: BufRead, W: Write> HumanPlanner<R, W> {
    pub fn new(input: R, output: W) -> Self {
        Self { input, output }
    }
}

impl<R: BufRead, W: Write> Planner for HumanPlanner<R, W> {
    fn next_instruction(&mut self, transcript: &Transcript) -> Result<String, PlannerError> {
        let block = transcript.render_block().unwrap_or_default();
        let closed = |_| PlannerError::InputClosed;
        write!(self.output, "\n{block}").map_err(closed)?;
        self.output.flush().map_err(closed)?;
        let mut line = String::new();
        match self.input.read_line(&mut line) {
            Ok(0) | Err(_) => Err(PlannerError::InputClosed),
            Ok(_) => Ok(line.trim_end_matches(['\n', '\r']).to_string()),
        }
    }
}
