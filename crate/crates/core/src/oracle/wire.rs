//! HTTP backend targeting the common chat-completions request shape:
//! POST with bearer auth, a model name, a message list, and an optional
//! temperature; the completion is the first choice's message content.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use super::prompt::build_evaluation_prompt;
use super::{parse_answers, OracleBackend, OracleError, EVAL_BATCH_SIZE};

/// Connection settings for [`WireBackend`]. The API key is never stored
/// in config files; it is read from the named environment variable.
#[derive(Debug, Clone)]
pub struct WireConfig {
    pub endpoint: String,
    pub model: String,
    pub api_key_env: String,
    pub temperature: Option<f64>,
    /// Attempts per request (transport failures and malformed responses
    /// are retried with the identical prompt).
    pub retries: u32,
    /// Maximum in-flight evaluation requests.
    pub parallelism: usize,
    pub timeout: Duration,
}

impl Default for WireConfig {
    fn default() -> Self {
        Self {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "OPENAI_API_KEY".into(),
            temperature: None,
            retries: 3,
            parallelism: 4,
            timeout: Duration::from_secs(120),
        }
    }
}

pub struct WireBackend {
    config: WireConfig,
    api_key: String,
    client: reqwest::blocking::Client,
}

impl WireBackend {
    pub fn new(config: WireConfig) -> Result<Self, OracleError> {
        let api_key = std::env::var(&config.api_key_env).map_err(|_| {
            OracleError::Config(format!(
                "environment variable {} is not set (expected the API key there)",
                config.api_key_env
            ))
        })?;
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| OracleError::Config(format!("http client: {e}")))?;
        Ok(Self { config, api_key, client })
    }

    fn post_once(&self, prompt: &str) -> Result<String, OracleError> {
        let mut body = serde_json::json!({
            "model": self.config.model,
            "messages": [{"role": "user", "content": prompt}],
        });
        if let Some(t) = self.config.temperature {
            body["temperature"] = serde_json::json!(t);
        }
        let response = self
            .client
            .post(&self.config.endpoint)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .map_err(|e| OracleError::Transport(e.to_string()))?;
        let status = response.status();
        let text = response.text().map_err(|e| OracleError::Transport(e.to_string()))?;
        if !status.is_success() {
            // Rate limits and server faults are worth a retry; other
            // client errors are not.
            if status.as_u16() == 429 || status.is_server_error() {
                return Err(OracleError::Transport(format!("status {status}: {text}")));
            }
            return Err(OracleError::Http { status: status.as_u16(), body: text });
        }
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| OracleError::malformed(format!("response is not JSON: {e}"), &text))?;
        value["choices"][0]["message"]["content"]
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| OracleError::malformed("missing choices[0].message.content", &text))
    }

    fn with_retries<T>(
        &self,
        mut call: impl FnMut() -> Result<T, OracleError>,
    ) -> Result<T, OracleError> {
        let attempts = self.config.retries.max(1);
        let mut last = None;
        for attempt in 0..attempts {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100 * u64::from(attempt)));
            }
            match call() {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn answer_chunk(&self, question: &str, chunk: &[String]) -> Result<Vec<bool>, OracleError> {
        self.with_retries(|| {
            let prompt = build_evaluation_prompt(question, chunk);
            let raw = self.post_once(&prompt)?;
            parse_answers(&raw, chunk.len())
        })
    }
}

impl OracleBackend for WireBackend {
    fn complete(&self, prompt: &str) -> Result<String, OracleError> {
        self.with_retries(|| self.post_once(prompt))
    }

    /// One evaluation prompt per batch of [`EVAL_BATCH_SIZE`] profiles,
    /// with at most `parallelism` requests in flight. Results come back
    /// in input order regardless of completion order.
    fn answer_batch(&self, question: &str, profiles: &[String]) -> Result<Vec<bool>, OracleError> {
        if profiles.is_empty() {
            return Ok(Vec::new());
        }
        let chunks: Vec<&[String]> = profiles.chunks(EVAL_BATCH_SIZE).collect();
        let results: Mutex<Vec<Option<Result<Vec<bool>, OracleError>>>> =
            Mutex::new((0..chunks.len()).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        let workers = self.config.parallelism.max(1).min(chunks.len());
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= chunks.len() {
                        break;
                    }
                    let outcome = self.answer_chunk(question, chunks[i]);
                    results.lock().expect("results lock")[i] = Some(outcome);
                });
            }
        });
        let mut answers = Vec::with_capacity(profiles.len());
        for slot in results.into_inner().expect("results lock") {
            answers.extend(slot.expect("every chunk visited")?);
        }
        Ok(answers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::{Read, Write};
    use std::net::TcpListener;
    use std::sync::Arc;

    /// Minimal HTTP stub. Each incoming request body is passed to
    /// `respond`, which returns (status, body). Captured request bodies
    /// and auth headers are recorded for assertions.
    struct Stub {
        addr: String,
        seen: Arc<Mutex<Vec<(String, String)>>>,
        handle: Option<std::thread::JoinHandle<()>>,
    }

    fn read_request(stream: &mut std::net::TcpStream) -> (String, String) {
        let mut buf = Vec::new();
        let mut tmp = [0u8; 1024];
        let header_end = loop {
            let n = stream.read(&mut tmp).unwrap();
            buf.extend_from_slice(&tmp[..n]);
            if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                break pos + 4;
            }
        };
        let headers = String::from_utf8_lossy(&buf[..header_end]).to_string();
        let content_length: usize = headers
            .lines()
            .find_map(|l| l.to_ascii_lowercase().strip_prefix("content-length:").map(|v| v.trim().parse().unwrap()))
            .unwrap_or(0);
        let mut body = buf[header_end..].to_vec();
        while body.len() < content_length {
            let n = stream.read(&mut tmp).unwrap();
            body.extend_from_slice(&tmp[..n]);
        }
        let auth = headers
            .lines()
            .find_map(|l| l.strip_prefix("authorization: ").or_else(|| l.strip_prefix("Authorization: ")))
            .unwrap_or("")
            .to_string();
        (auth, String::from_utf8(body).unwrap())
    }

    fn serve(
        requests: usize,
        respond: impl Fn(usize, &str) -> (u16, String) + Send + Sync + 'static,
    ) -> Stub {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = format!("http://{}", listener.local_addr().unwrap());
        let seen: Arc<Mutex<Vec<(String, String)>>> = Arc::new(Mutex::new(Vec::new()));
        let seen_clone = Arc::clone(&seen);
        let respond = Arc::new(respond);
        let handle = std::thread::spawn(move || {
            let mut workers = Vec::new();
            for i in 0..requests {
                let (mut stream, _) = listener.accept().unwrap();
                let seen = Arc::clone(&seen_clone);
                let respond = Arc::clone(&respond);
                workers.push(std::thread::spawn(move || {
                    let (auth, body) = read_request(&mut stream);
                    let (status, reply) = respond(i, &body);
                    seen.lock().unwrap().push((auth, body));
                    let response = format!(
                        "HTTP/1.1 {status} X\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                        reply.len()
                    );
                    stream.write_all(response.as_bytes()).unwrap();
                }));
            }
            for w in workers {
                w.join().unwrap();
            }
        });
        Stub { addr, seen, handle: Some(handle) }
    }

    impl Stub {
        fn finish(mut self) -> Vec<(String, String)> {
            self.handle.take().unwrap().join().unwrap();
            Arc::try_unwrap(self.seen).unwrap().into_inner().unwrap()
        }
    }

    fn completion_json(content: &str) -> String {
        serde_json::json!({
            "choices": [{"message": {"role": "assistant", "content": content}}]
        })
        .to_string()
    }

    fn backend(addr: &str, key_env: &str, retries: u32, parallelism: usize) -> WireBackend {
        WireBackend::new(WireConfig {
            endpoint: addr.to_string(),
            model: "test-model".into(),
            api_key_env: key_env.into(),
            temperature: Some(0.2),
            retries,
            parallelism,
            timeout: Duration::from_secs(5),
        })
        .unwrap()
    }

    #[test]
    fn complete_posts_model_prompt_and_bearer_token() {
        let stub = serve(1, |_, _| (200, completion_json("the completion")));
        std::env::set_var("WIRE_TEST_KEY_A", "key-abc-123");
        let backend = backend(&stub.addr, "WIRE_TEST_KEY_A", 1, 1);
        let out = backend.complete("hello oracle").unwrap();
        assert_eq!(out, "the completion");
        let seen = stub.finish();
        assert_eq!(seen.len(), 1);
        let (auth, body) = &seen[0];
        assert_eq!(auth, "Bearer key-abc-123");
        let body: serde_json::Value = serde_json::from_str(body).unwrap();
        assert_eq!(body["model"], "test-model");
        assert_eq!(body["messages"][0]["content"], "hello oracle");
        assert_eq!(body["temperature"], 0.2);
    }

    #[test]
    fn complete_retries_server_errors() {
        let stub = serve(2, |i, _| {
            if i == 0 {
                (500, "{\"error\": \"boom\"}".to_string())
            } else {
                (200, completion_json("recovered"))
            }
        });
        std::env::set_var("WIRE_TEST_KEY_B", "k");
        let backend = backend(&stub.addr, "WIRE_TEST_KEY_B", 3, 1);
        assert_eq!(backend.complete("p").unwrap(), "recovered");
        stub.finish();
    }

    #[test]
    fn complete_fails_fast_on_auth_errors() {
        let stub = serve(1, |_, _| (401, "{\"error\": \"bad key\"}".to_string()));
        std::env::set_var("WIRE_TEST_KEY_C", "k");
        let backend = backend(&stub.addr, "WIRE_TEST_KEY_C", 3, 1);
        let err = backend.complete("p").unwrap_err();
        assert!(matches!(err, OracleError::Http { status: 401, .. }));
        stub.finish();
    }

    #[test]
    fn missing_key_env_is_a_config_error() {
        let result = WireBackend::new(WireConfig {
            api_key_env: "WIRE_TEST_KEY_DEFINITELY_UNSET".into(),
            ..WireConfig::default()
        });
        assert!(matches!(result.err(), Some(OracleError::Config(_))));
    }

    /// Stub that answers Yes/No per founder based on markers planted in
    /// the profile text, so responses are correct regardless of which
    /// worker thread sends which chunk first.
    fn marker_responder(_: usize, body: &str) -> (u16, String) {
        let body: serde_json::Value = serde_json::from_str(body).unwrap();
        let prompt = body["messages"][0]["content"].as_str().unwrap();
        let answers: Vec<&str> = prompt
            .match_indices("MARK-")
            .map(|(i, _)| if prompt[i..].starts_with("MARK-YES") { "Yes" } else { "No" })
            .collect();
        (200, completion_json(&answers.join("\n")))
    }

    #[test]
    fn answer_batch_chunks_by_twenty_and_preserves_order() {
        let stub = serve(3, marker_responder);
        std::env::set_var("WIRE_TEST_KEY_D", "k");
        let backend = backend(&stub.addr, "WIRE_TEST_KEY_D", 1, 3);
        let profiles: Vec<String> = (0..45)
            .map(|i| format!("Education: {}", if i % 3 == 0 { "MARK-YES" } else { "MARK-NO" }))
            .collect();
        let answers = backend.answer_batch("Any signal?", &profiles).unwrap();
        assert_eq!(answers.len(), 45);
        for (i, &a) in answers.iter().enumerate() {
            assert_eq!(a, i % 3 == 0, "answer {i}");
        }
        let seen = stub.finish();
        assert_eq!(seen.len(), 3, "45 profiles should need 3 evaluation calls");
        let mut founder_counts: Vec<usize> = seen
            .iter()
            .map(|(_, body)| {
                let v: serde_json::Value = serde_json::from_str(body).unwrap();
                v["messages"][0]["content"].as_str().unwrap().matches("Founder ").count()
            })
            .collect();
        founder_counts.sort_unstable();
        assert_eq!(founder_counts, vec![5, 20, 20]);
    }

    #[test]
    fn answer_batch_retries_malformed_responses() {
        let stub = serve(2, |i, body| {
            if i == 0 {
                (200, completion_json("Maybe"))
            } else {
                marker_responder(i, body)
            }
        });
        std::env::set_var("WIRE_TEST_KEY_E", "k");
        let backend = backend(&stub.addr, "WIRE_TEST_KEY_E", 3, 1);
        let profiles = vec!["Education: MARK-NO".to_string()];
        let answers = backend.answer_batch("q?", &profiles).unwrap();
        assert_eq!(answers, vec![false]);
        stub.finish();
    }
}
