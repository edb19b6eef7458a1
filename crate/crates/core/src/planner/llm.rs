use serde::{Deserialize, Serialize};

use crate::error::{CompletionError, PlannerError};
use crate::planner::Planner;
use crate::protocol::{render_prompt, Transcript, EOS};

/// A text-completion call: prompt in, text out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: String,
    pub stop: Vec<String>,
    pub max_tokens: u32,
    pub temperature: f64,
}

/// Anything that can complete a prompt. Implementations must be safe to share
/// across concurrently running episodes.
pub trait CompletionBackend: Send + Sync {
    fn complete(&self, request: &CompletionRequest) -> Result<String, CompletionError>;
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LlmSettings {
    pub temperature: f64,
    pub max_tokens: u32,
    /// Extra attempts after the first failure.
    pub retries: u32,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self { temperature: 0.0, max_tokens: 64, retries: 2 }
    }
}

/// Planner that asks a completion backend, prompting with few-shot examples
/// followed by the live transcript.
pub struct LlmPlanner<'a> {
    backend: &'a dyn CompletionBackend,
    few_shots: Vec<Transcript>,
    settings: LlmSettings,
}

impl<'a> LlmPlanner<'a> {
    pub fn new(backend: &'a dyn CompletionBackend, few_shots: Vec<Transcript>, settings: LlmSettings) -> Self {
        Self { backend, few_shots, settings }
    }

    pub fn request_for(&self, transcript: &Transcript) -> Result<CompletionRequest, PlannerError> {
        let prompt = render_prompt(&self.few_shots, transcript)
            .map_err(|e| PlannerError::Transport { attempts: 0, message: e.to_string() })?;
        Ok(CompletionRequest {
            prompt,
            stop: vec![EOS.to_string()],
            max_tokens: self.settings.max_tokens,
            temperature: self.settings.temperature,
        })
    }
}

impl Planner for LlmPlanner<'_> {
    fn next_instruction(&mut self, transcript: &Transcript) -> Result<String, PlannerError> {
        let request = self.request_for(transcript)?;
        let attempts = self.settings.retries + 1;
        let mut last = None;
        for _ in 0..attempts {
            match self.backend.complete(&request) {
                Ok(text) => return Ok(text),
                Err(e) => last = Some(e),
            }
        }
        Err(PlannerError::Transport {
            attempts,
            message: last.map(|e| e.to_string()).unwrap_or_default(),
        })
    }
}

#[cfg(test)]
mod tests {
    use std::sync::atomic::{AtomicU32, Ordering};

    use super::*;

    struct Flaky {
        failures: u32,
        calls: AtomicU32,
    }

    impl CompletionBackend for Flaky {
        fn complete(&self, request: &CompletionRequest) -> Result<String, CompletionError> {
            assert_eq!(request.stop, vec!["<EOS>".to_string()]);
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.failures {
                Err(CompletionError::Timeout)
            } else {
                Ok("Examine x.".into())
            }
        }
    }

    #[test]
    fn retries_then_succeeds() {
        let backend = Flaky { failures: 2, calls: AtomicU32::new(0) };
        let mut p = LlmPlanner::new(&backend, vec![], LlmSettings::default());
        assert_eq!(p.next_instruction(&Transcript::new("q")).unwrap(), "Examine x.");
        assert_eq!(backend.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn gives_up_after_retries() {
        let backend = Flaky { failures: 10, calls: AtomicU32::new(0) };
        let mut p = LlmPlanner::new(&backend, vec![], LlmSettings { retries: 1, ..LlmSettings::default() });
        let err = p.next_instruction(&Transcript::new("q")).unwrap_err();
        assert!(matches!(err, PlannerError::Transport { attempts: 2, .. }));
        assert_eq!(backend.calls.load(Ordering::SeqCst), 2);
    }
}
