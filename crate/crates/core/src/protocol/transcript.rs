use serde::{Deserialize, Serialize};

use crate::error::TranscriptError;

/// End-of-turn marker written after every LM and Agent line.
pub const EOS: &str = "<EOS>";
/// Line closing a finished example block. The trailing space is part of the
/// published prompt layout.
pub const DONE_LINE: &str = "DONE ";
/// Text between two blocks: the newline ending `DONE ` plus three blank lines.
pub const BLOCK_SEPARATOR: &str = "\n\n\n\n";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    Question,
    Lm,
    Agent,
}

impl Role {
    fn label(self) -> &'static str {
        match self {
            Role::Question => "QUESTION",
            Role::Lm => "LM",
            Role::Agent => "Agent",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub text: String,
}

/// One episode's dialogue: the question, then alternating LM and Agent turns.
///
/// The first turn after the question is normally LM; tasks whose Reporter
/// speaks at spawn start with an Agent turn instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transcript {
    turns: Vec<Turn>,
    pub done: bool,
}

impl Transcript {
    pub fn new(question: impl Into<String>) -> Self {
        Self {
            turns: vec![Turn { role: Role::Question, text: question.into() }],
            done: false,
        }
    }

    pub fn question(&self) -> &str {
        &self.turns[0].text
    }

    /// All turns including the leading question.
    pub fn turns(&self) -> &[Turn] {
        &self.turns
    }

    /// Turns after the question.
    pub fn dialogue(&self) -> &[Turn] {
        &self.turns[1..]
    }

    pub fn push_lm(&mut self, text: impl Into<String>) {
        self.turns.push(Turn { role: Role::Lm, text: text.into() });
    }

    pub fn push_agent(&mut self, text: impl Into<String>) {
        self.turns.push(Turn { role: Role::Agent, text: text.into() });
    }

    pub fn last(&self) -> Option<&Turn> {
        self.dialogue().last()
    }

    pub fn last_of(&self, role: Role) -> Option<&Turn> {
        self.dialogue().iter().rev().find(|t| t.role == role)
    }

    pub fn count(&self, role: Role) -> usize {
        self.dialogue().iter().filter(|t| t.role == role).count()
    }

    pub fn validate(&self) -> Result<(), TranscriptError> {
        let mut prev = Role::Question;
        for (index, turn) in self.turns.iter().enumerate() {
            let ok = match (index, turn.role) {
                (0, Role::Question) => true,
                (0, _) | (_, Role::Question) => false,
                (_, role) => role != prev,
            };
            if !ok {
                let expected = match (index, prev) {
                    (0, _) => Role::Question,
                    (_, Role::Lm) => Role::Agent,
                    _ => Role::Lm,
                };
                return Err(TranscriptError::Alternation {
                    index,
                    expected: expected.label(),
                    found: turn.role.label(),
                });
            }
            prev = turn.role;
        }
        Ok(())
    }

    /// Renders this transcript as one prompt block.
    ///
    /// Finished blocks end with `DONE `; an unfinished block ends with an
    /// `LM:` cue whenever the Planner is next to speak.
    pub fn render_block(&self) -> Result<String, TranscriptError> {
        self.validate()?;
        let mut out = format!("QUESTION: {}\nANSWER:\n", self.question());
        for turn in self.dialogue() {
            out.push_str(turn.role.label());
            out.push_str(":\n");
            out.push_str(&turn.text);
            out.push_str(EOS);
            out.push('\n');
        }
        if self.done {
            out.push_str(DONE_LINE);
        } else if self.last().is_none_or(|t| t.role == Role::Agent) {
            out.push_str("LM:\n");
        }
        Ok(out)
    }

    /// Inverse of [`Transcript::render_block`].
    pub fn parse_block(block: &str) -> Result<Transcript, TranscriptError> {
        let malformed = |m: &str| TranscriptError::Malformed(m.to_string());
        let mut lines = block.split('\n').peekable();
        let question = lines
            .next()
            .and_then(|l| l.strip_prefix("QUESTION: "))
            .ok_or_else(|| malformed("block must start with QUESTION:"))?;
        if lines.next() != Some("ANSWER:") {
            return Err(malformed("missing ANSWER: line"));
        }
        let mut transcript = Transcript::new(question);
        while let Some(line) = lines.next() {
            let role = match line {
                "LM:" => Role::Lm,
                "Agent:" => Role::Agent,
                "DONE " | "DONE" => {
                    if lines.any(|l| !l.is_empty()) {
                        return Err(malformed("text after DONE"));
                    }
                    transcript.done = true;
                    break;
                }
                "" if lines.peek().is_none() => break,
                other => return Err(TranscriptError::Malformed(format!("unexpected line {other:?}"))),
            };
            match lines.next() {
                Some(text) if text.ends_with(EOS) => {
                    let text = &text[..text.len() - EOS.len()];
                    transcript.turns.push(Turn { role, text: text.to_string() });
                }
                // trailing `LM:` cue
                Some("") if role == Role::Lm && lines.peek().is_none() => break,
                _ => return Err(malformed("turn text must end with <EOS>")),
            }
        }
        transcript.validate()?;
        Ok(transcript)
    }
}

/// Joins finished example transcripts into a few-shot corpus.
pub fn render_corpus(blocks: &[Transcript]) -> Result<String, TranscriptError> {
    let mut parts = Vec::with_capacity(blocks.len());
    for (i, block) in blocks.iter().enumerate() {
        if !block.done {
            return Err(TranscriptError::IncompleteFewShot(i));
        }
        parts.push(block.render_block()?);
    }
    Ok(parts.join(BLOCK_SEPARATOR))
}

/// Few-shot examples followed by the in-progress episode.
pub fn render_prompt(few_shots: &[Transcript], current: &Transcript) -> Result<String, TranscriptError> {
    let tail = current.render_block()?;
    if few_shots.is_empty() {
        return Ok(tail);
    }
    Ok(format!("{}{BLOCK_SEPARATOR}{tail}", render_corpus(few_shots)?))
}

/// Splits a prompt back into its finished examples and the final block.
pub fn parse_prompt(prompt: &str) -> Result<(Vec<Transcript>, Transcript), TranscriptError> {
    let mut blocks = prompt
        .split(BLOCK_SEPARATOR)
        .map(Transcript::parse_block)
        .collect::<Result<Vec<_>, _>>()?;
    let current = blocks.pop().ok_or_else(|| TranscriptError::Malformed("empty prompt".into()))?;
    if let Some(i) = blocks.iter().position(|b| !b.done) {
        return Err(TranscriptError::IncompleteFewShot(i));
    }
    Ok((blocks, current))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn finished() -> Transcript {
        let mut t = Transcript::new("If the solid dark blue h is good, pickup a. Otherwise, pickup b.");
        t.push_lm("Examine solid dark blue h.");
        t.push_agent("I examined solid dark blue h. Its secret property has value bad.");
        t.push_lm("Pickup checker brown tee.");
        t.push_agent("I picked up checker brown tee.");
        t.done = true;
        t
    }

    #[test]
    fn question_only_base_case() {
        let t = Transcript::new("Q?");
        assert_eq!(render_prompt(&[], &t).unwrap(), "QUESTION: Q?\nANSWER:\nLM:\n");
    }

    #[test]
    fn finished_block_layout() {
        let text = finished().render_block().unwrap();
        assert_eq!(
            text,
            "QUESTION: If the solid dark blue h is good, pickup a. Otherwise, pickup b.\nANSWER:\nLM:\n\
             Examine solid dark blue h.<EOS>\nAgent:\n\
             I examined solid dark blue h. Its secret property has value bad.<EOS>\nLM:\n\
             Pickup checker brown tee.<EOS>\nAgent:\nI picked up checker brown tee.<EOS>\nDONE "
        );
    }

    #[test]
    fn prompt_ends_with_lm_cue_after_agent() {
        let mut t = Transcript::new("Q?");
        t.push_lm("Examine x.");
        t.push_agent("I have moved left.");
        let text = render_prompt(&[finished()], &t).unwrap();
        assert!(text.ends_with("DONE \n\n\n\nQUESTION: Q?\nANSWER:\nLM:\nExamine x.<EOS>\nAgent:\nI have moved left.<EOS>\nLM:\n"));
    }

    #[test]
    fn alternation_is_enforced() {
        let mut t = Transcript::new("Q?");
        t.push_lm("a");
        t.push_lm("b");
        assert!(matches!(t.validate(), Err(TranscriptError::Alternation { index: 2, .. })));
        assert!(t.render_block().is_err());
    }

    #[test]
    fn leading_agent_turn_allowed() {
        let mut t = Transcript::new("Q?");
        t.push_agent("I am a warm color.");
        t.validate().unwrap();
        assert_eq!(t.render_block().unwrap(), "QUESTION: Q?\nANSWER:\nAgent:\nI am a warm color.<EOS>\nLM:\n");
    }

    #[test]
    fn unfinished_few_shot_rejected() {
        let t = Transcript::new("Q?");
        assert_eq!(render_prompt(std::slice::from_ref(&t), &t), Err(TranscriptError::IncompleteFewShot(0)));
    }

    #[test]
    fn prompt_round_trips() {
        let mut cur = Transcript::new("Q?");
        cur.push_lm("Examine x.");
        cur.push_agent("");
        let shots = vec![finished(), finished()];
        let text = render_prompt(&shots, &cur).unwrap();
        let (parsed_shots, parsed_cur) = parse_prompt(&text).unwrap();
        assert_eq!(parsed_shots, shots);
        assert_eq!(parsed_cur, cur);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(Transcript::parse_block("hello").is_err());
        assert!(Transcript::parse_block("QUESTION: q\nANSWER:\nLM:\nno eos\n").is_err());
        assert!(Transcript::parse_block("QUESTION: q\nANSWER:\nDONE \nLM:\n").is_err());
    }
}
