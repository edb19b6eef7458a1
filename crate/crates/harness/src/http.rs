//! Blocking HTTP completion client driven by a request template.

use std::sync::{Condvar, Mutex};
use std::time::Duration;

use reqwest::blocking::Client;
use reqwest::header::{AUTHORIZATION, CONTENT_TYPE};

use par_core::planner::{CompletionBackend, CompletionRequest};
use par_core::CompletionError;

use crate::config::EndpointConfig;
use crate::error::HarnessError;

/// Counting gate bounding concurrent requests.
struct Gate {
    free: Mutex<usize>,
    freed: Condvar,
}

impl Gate {
    fn new(slots: usize) -> Self {
        Self { free: Mutex::new(slots.max(1)), freed: Condvar::new() }
    }

    fn enter(&self) -> GatePass<'_> {
        let mut free = self.free.lock().unwrap_or_else(|p| p.into_inner());
        while *free == 0 {
            free = self.freed.wait(free).unwrap_or_else(|p| p.into_inner());
        }
        *free -= 1;
        GatePass(self)
    }
}

struct GatePass<'a>(&'a Gate);

impl Drop for GatePass<'_> {
    fn drop(&mut self) {
        *self.0.free.lock().unwrap_or_else(|p| p.into_inner()) += 1;
        self.0.freed.notify_one();
    }
}

pub struct HttpBackend {
    client: Client,
    config: EndpointConfig,
    token: Option<String>,
    gate: Gate,
}

impl HttpBackend {
    pub fn new(config: EndpointConfig) -> Result<Self, HarnessError> {
        let token = std::env::var(&config.token_env).ok().filter(|t| !t.is_empty());
        Self::with_token(config, token)
    }

    /// Like [`HttpBackend::new`] but with the token given directly.
    pub fn with_token(config: EndpointConfig, token: Option<String>) -> Result<Self, HarnessError> {
        let client = Client::builder()
            .timeout(Duration::from_secs_f64(config.timeout_secs))
            .build()
            .map_err(|e| HarnessError::Endpoint(e.to_string()))?;
        let gate = Gate::new(config.max_in_flight);
        Ok(Self { client, config, token, gate })
    }

    pub fn body(&self, request: &CompletionRequest) -> String {
        render_template(&self.config.request_template, request)
    }

    fn attempt(&self, body: &str) -> Result<String, CompletionError> {
        let _pass = self.gate.enter();
        let mut call = self.client.post(&self.config.url).header(CONTENT_TYPE, "application/json").body(body.to_string());
        if let Some(token) = &self.token {
            call = call.header(AUTHORIZATION, format!("Bearer {token}"));
        }
        let response = call.send().map_err(|e| {
            if e.is_timeout() {
                CompletionError::Timeout
            } else {
                CompletionError::Transport(e.to_string())
            }
        })?;
        let status = response.status();
        let text = response.text().map_err(|e| CompletionError::Transport(e.to_string()))?;
        if !status.is_success() {
            return Err(CompletionError::Status { status: status.as_u16(), body: text });
        }
        extract_text(&text, &self.config.response_pointer)
    }
}

impl CompletionBackend for HttpBackend {
    /// One logical call: the first attempt plus `retries` more with
    /// exponential backoff. The planner's own retry loop sits on top.
    fn complete(&self, request: &CompletionRequest) -> Result<String, CompletionError> {
        let body = self.body(request);
        let mut delay = Duration::from_millis(self.config.backoff_ms);
        let mut result = self.attempt(&body);
        for _ in 0..self.config.retries {
            match &result {
                Ok(_) | Err(CompletionError::BadResponse(_)) => break,
                Err(CompletionError::Status { status, .. }) if *status < 500 && *status != 429 => break,
                Err(_) => {}
            }
            std::thread::sleep(delay);
            delay *= 2;
            result = self.attempt(&body);
        }
        result
    }
}

/// Fills `{{prompt}}`, `{{stop}}`, `{{max_tokens}}` and `{{temperature}}`
/// with JSON-encoded values.
pub fn render_template(template: &str, request: &CompletionRequest) -> String {
    let json = |v: serde_json::Value| v.to_string();
    template
        .replace("{{prompt}}", &json(request.prompt.clone().into()))
        .replace("{{stop}}", &json(request.stop.clone().into()))
        .replace("{{max_tokens}}", &json(request.max_tokens.into()))
        .replace("{{temperature}}", &json(request.temperature.into()))
}

pub fn extract_text(body: &str, pointer: &str) -> Result<String, CompletionError> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| CompletionError::BadResponse(e.to_string()))?;
    value
        .pointer(pointer)
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .ok_or_else(|| CompletionError::BadResponse(format!("no string at {pointer}")))
}
