//! In-process completion server whose "model" is the oracle planner.
//!
//! All episode state travels in the prompt, so the server is stateless: it
//! parses the final block, recovers the task from its question, and answers
//! with the oracle's next instruction.

use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use axum::extract::State;
use axum::http::StatusCode;
use axum::routing::post;
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::sync::oneshot;

use par_core::planner::{oracle_next, OracleState};
use par_core::protocol::parse_prompt;
use par_core::tasks::TaskBinding;

use crate::error::HarnessError;

pub const COMPLETIONS_PATH: &str = "/v1/completions";

#[derive(Debug, Clone, Copy, Default)]
pub struct MockOptions {
    /// Answer this many initial requests with 503.
    pub fail_first: usize,
}

#[derive(Default)]
struct MockState {
    options: MockOptions,
    requests: AtomicUsize,
    last_prompt: Mutex<Option<String>>,
}

/// The oracle's answer to a prompt, without the `<EOS>` terminator.
pub fn respond(prompt: &str) -> Result<String, String> {
    let (_, current) = parse_prompt(prompt).map_err(|e| format!("malformed prompt: {e}"))?;
    let binding = TaskBinding::parse(current.question()).map_err(|e| e.to_string())?;
    let state = OracleState::from_transcript(binding, &current);
    oracle_next(&state).map(|i| i.to_string()).map_err(|e| e.to_string())
}

fn error_body(message: &str) -> Json<Value> {
    Json(json!({ "error": { "message": message } }))
}

async fn complete(State(state): State<Arc<MockState>>, body: String) -> (StatusCode, Json<Value>) {
    let n = state.requests.fetch_add(1, Ordering::SeqCst);
    if n < state.options.fail_first {
        return (StatusCode::SERVICE_UNAVAILABLE, error_body("warming up"));
    }
    let prompt = match serde_json::from_str::<Value>(&body) {
        Ok(v) => match v.get("prompt").and_then(Value::as_str) {
            Some(p) => p.to_string(),
            None => return (StatusCode::BAD_REQUEST, error_body("request has no string field \"prompt\"")),
        },
        Err(e) => return (StatusCode::BAD_REQUEST, error_body(&format!("request is not JSON: {e}"))),
    };
    *state.last_prompt.lock().unwrap_or_else(|p| p.into_inner()) = Some(prompt.clone());
    match respond(&prompt) {
        Ok(text) => (StatusCode::OK, Json(json!({ "choices": [{ "text": text, "index": 0 }] }))),
        Err(message) => {
            tracing::warn!(%message, "rejected prompt");
            (StatusCode::UNPROCESSABLE_ENTITY, error_body(&message))
        }
    }
}

fn router(state: Arc<MockState>) -> Router {
    Router::new().route(COMPLETIONS_PATH, post(complete)).with_state(state)
}

/// Serves until the process exits. Used by `par serve-mock`.
pub fn serve_forever(addr: &str, options: MockOptions) -> Result<(), HarnessError> {
    let runtime = tokio::runtime::Runtime::new().map_err(|e| HarnessError::Endpoint(e.to_string()))?;
    runtime.block_on(async {
        let listener =
            tokio::net::TcpListener::bind(addr).await.map_err(|e| HarnessError::Endpoint(format!("{addr}: {e}")))?;
        let local = listener.local_addr().map_err(|e| HarnessError::Endpoint(e.to_string()))?;
        tracing::info!("mock completion server on http://{local}{COMPLETIONS_PATH}");
        let state = Arc::new(MockState { options, ..MockState::default() });
        axum::serve(listener, router(state)).await.map_err(|e| HarnessError::Endpoint(e.to_string()))
    })
}

/// A mock server running on its own thread, stopped on drop.
pub struct MockServer {
    addr: SocketAddr,
    state: Arc<MockState>,
    shutdown: Option<oneshot::Sender<()>>,
    thread: Option<JoinHandle<()>>,
}

impl MockServer {
    /// Binds `addr` (use port 0 for any free port) and starts serving.
    pub fn start(addr: &str, options: MockOptions) -> Result<Self, HarnessError> {
        let listener = std::net::TcpListener::bind(addr).map_err(|e| HarnessError::Endpoint(format!("{addr}: {e}")))?;
        listener.set_nonblocking(true).map_err(|e| HarnessError::Endpoint(e.to_string()))?;
        let addr = listener.local_addr().map_err(|e| HarnessError::Endpoint(e.to_string()))?;
        let state = Arc::new(MockState { options, ..MockState::default() });
        let (tx, rx) = oneshot::channel::<()>();
        let app = router(state.clone());
        let runtime = tokio::runtime::Builder::new_multi_thread()
            .worker_threads(2)
            .enable_all()
            .build()
            .map_err(|e| HarnessError::Endpoint(e.to_string()))?;
        let thread = std::thread::spawn(move || {
            runtime.block_on(async move {
                let listener = tokio::net::TcpListener::from_std(listener).expect("listener converts");
                let _ = axum::serve(listener, app)
                    .with_graceful_shutdown(async {
                        let _ = rx.await;
                    })
                    .await;
            });
        });
        Ok(Self { addr, state, shutdown: Some(tx), thread: Some(thread) })
    }

    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn url(&self) -> String {
        format!("http://{}{COMPLETIONS_PATH}", self.addr)
    }

    pub fn requests(&self) -> usize {
        self.state.requests.load(Ordering::SeqCst)
    }

    pub fn last_prompt(&self) -> Option<String> {
        self.state.last_prompt.lock().unwrap_or_else(|p| p.into_inner()).clone()
    }
}

impl Drop for MockServer {
    fn drop(&mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(thread) = self.thread.take() {
            let _ = thread.join();
        }
    }
}
