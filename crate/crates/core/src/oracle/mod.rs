//! The LLM boundary: prompt construction, response parsing, an HTTP
//! chat-completions backend, and a deterministic mock backend.
//!
//! Everything upstream of this module talks to a backend only through
//! [`OracleBackend`], so pipelines run identically against a live
//! service or the offline mock.

pub mod mock;
mod parse;
mod prompt;
mod wire;

pub use parse::{parse_answers, parse_questions};
pub use prompt::{
    build_evaluation_prompt, build_feedback_prompt, build_generation_prompt,
    build_insight_prompt, QuestionPerformance,
};
pub use wire::{WireBackend, WireConfig};

use thiserror::Error;

/// Questions requested per generation round.
pub const QUESTIONS_PER_ROUND: usize = 10;
/// Founder profiles per evaluation prompt.
pub const EVAL_BATCH_SIZE: usize = 20;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("malformed response ({detail}); raw response:\n{raw}")]
    MalformedResponse { detail: String, raw: String },
    #[error("invalid oracle configuration: {0}")]
    Config(String),
    #[error("feedback prompt requires at least one prior-round stat")]
    EmptyFeedbackStats,
    #[error("mock backend has no predicate for question {0:?}")]
    UnknownQuestion(String),
    #[error("mock backend cannot serve this prompt: {0}")]
    UnsupportedPrompt(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("backend rejected request with status {status}: {body}")]
    Http { status: u16, body: String },
}

impl OracleError {
    fn malformed(detail: impl Into<String>, raw: &str) -> Self {
        OracleError::MalformedResponse { detail: detail.into(), raw: raw.to_string() }
    }

    /// Whether resending the identical request could plausibly succeed.
    pub fn is_retryable(&self) -> bool {
        matches!(self, OracleError::MalformedResponse { .. } | OracleError::Transport(_))
    }
}

/// A chat-completion style backend.
///
/// `answer_batch` returns exactly one answer per input profile, in input
/// order. Implementations must be shareable across threads.
pub trait OracleBackend: Send + Sync {
    /// Send one prompt, return the completion text.
    fn complete(&self, prompt: &str) -> Result<String, OracleError>;

    /// Answer one YES/NO question for each rendered profile.
    fn answer_batch(&self, question: &str, profiles: &[String]) -> Result<Vec<bool>, OracleError>;
}

/// Ask for a completion that parses into exactly `expected` nonempty
/// lines, resending the identical prompt up to `attempts` times.
pub fn request_lines(
    backend: &dyn OracleBackend,
    prompt: &str,
    expected: usize,
    attempts: u32,
) -> Result<Vec<String>, OracleError> {
    let attempts = attempts.max(1);
    let mut last = None;
    for _ in 0..attempts {
        match backend.complete(prompt).and_then(|raw| parse::expect_lines(&raw, expected)) {
            Ok(lines) => return Ok(lines),
            Err(e) if e.is_retryable() => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Ask for one round of questions, retrying malformed responses with the
/// identical prompt.
pub fn request_questions(
    backend: &dyn OracleBackend,
    prompt: &str,
    attempts: u32,
) -> Result<Vec<String>, OracleError> {
    request_lines(backend, prompt, QUESTIONS_PER_ROUND, attempts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::atomic::{AtomicU32, Ordering};

    struct FlakyBackend {
        calls: AtomicU32,
        fail_first: u32,
    }

    impl OracleBackend for FlakyBackend {
        fn complete(&self, _prompt: &str) -> Result<String, OracleError> {
            let n = self.calls.fetch_add(1, Ordering::SeqCst);
            if n < self.fail_first {
                Err(OracleError::Transport("connection reset".into()))
            } else {
                Ok("only line".into())
            }
        }

        fn answer_batch(&self, _q: &str, _p: &[String]) -> Result<Vec<bool>, OracleError> {
            unimplemented!()
        }
    }

    #[test]
    fn request_lines_retries_then_succeeds() {
        let backend = FlakyBackend { calls: AtomicU32::new(0), fail_first: 2 };
        let lines = request_lines(&backend, "p", 1, 3).unwrap();
        assert_eq!(lines, vec!["only line".to_string()]);
        assert_eq!(backend.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn request_lines_gives_up_after_budget() {
        let backend = FlakyBackend { calls: AtomicU32::new(0), fail_first: 10 };
        let err = request_lines(&backend, "p", 1, 3).unwrap_err();
        assert!(matches!(err, OracleError::Transport(_)));
        assert_eq!(backend.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn request_lines_rejects_wrong_count_after_retries() {
        let backend = FlakyBackend { calls: AtomicU32::new(0), fail_first: 0 };
        let err = request_lines(&backend, "p", 2, 2).unwrap_err();
        assert!(matches!(err, OracleError::MalformedResponse { .. }));
    }
}
