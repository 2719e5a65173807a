use std::sync::{Condvar, Mutex, OnceLock};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{parse_response, render_messages, Provider, ProviderError, ProviderRequest, ProviderResponse};

pub const TOKEN_ENV: &str = "HACKFORGE_PROVIDER_TOKEN";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RemoteProviderConfig {
    pub endpoint: String,
    pub model: String,
    pub temperature: f64,
    pub timeout_ms: u64,
    pub max_retries: u32,
    /// Process-wide cap on concurrent requests.
    pub max_in_flight: usize,
}

impl Default for RemoteProviderConfig {
    fn default() -> Self {
        RemoteProviderConfig {
            endpoint: String::new(),
            model: String::new(),
            temperature: 0.7,
            timeout_ms: 120_000,
            max_retries: 3,
            max_in_flight: 4,
        }
    }
}

impl RemoteProviderConfig {
    pub fn validate(&self) -> Result<(), ProviderError> {
        if !(0.0..=2.0).contains(&self.temperature) {
            return Err(ProviderError::InvalidRequest(format!("temperature {} outside [0, 2]", self.temperature)));
        }
        if self.endpoint.is_empty() {
            return Err(ProviderError::InvalidRequest("remote provider needs an endpoint".into()));
        }
        if self.max_in_flight == 0 {
            return Err(ProviderError::InvalidRequest("max_in_flight must be at least 1".into()));
        }
        Ok(())
    }
}

/// Counting semaphore bounding in-flight requests across all sessions.
pub struct RequestLimiter {
    state: Mutex<(usize, usize)>,
    freed: Condvar,
}

pub struct Permit<'a>(&'a RequestLimiter);

impl RequestLimiter {
    pub fn new(cap: usize) -> Self {
        RequestLimiter { state: Mutex::new((0, cap.max(1))), freed: Condvar::new() }
    }

    pub fn global() -> &'static RequestLimiter {
        static GLOBAL: OnceLock<RequestLimiter> = OnceLock::new();
        GLOBAL.get_or_init(|| RequestLimiter::new(RemoteProviderConfig::default().max_in_flight))
    }

    pub fn set_cap(&self, cap: usize) {
        self.state.lock().unwrap().1 = cap.max(1);
        self.freed.notify_all();
    }

    pub fn in_flight(&self) -> usize {
        self.state.lock().unwrap().0
    }

    pub fn acquire(&self) -> Permit<'_> {
        let mut state = self.state.lock().unwrap();
        while state.0 >= state.1 {
            state = self.freed.wait(state).unwrap();
        }
        state.0 += 1;
        Permit(self)
    }
}

impl Drop for Permit<'_> {
    fn drop(&mut self) {
        self.0.state.lock().unwrap().0 -= 1;
        self.0.freed.notify_one();
    }
}

/// Chat-completion client. One `respond` is one completion call, retried on
/// transport failures and 429/5xx statuses.
pub struct RemoteProvider {
    config: RemoteProviderConfig,
    agent: ureq::Agent,
    token: Option<String>,
}

impl RemoteProvider {
    pub fn new(config: RemoteProviderConfig) -> Result<Self, ProviderError> {
        config.validate()?;
        RequestLimiter::global().set_cap(config.max_in_flight);
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_millis(config.timeout_ms)))
            .http_status_as_error(false)
            .build()
            .into();
        let token = std::env::var(TOKEN_ENV).ok().filter(|t| !t.is_empty());
        Ok(RemoteProvider { config, agent, token })
    }

    pub fn config(&self) -> &RemoteProviderConfig {
        &self.config
    }

    fn call_once(&self, body: &Value) -> Result<String, (bool, String)> {
        let _permit = RequestLimiter::global().acquire();
        let mut request = self.agent.post(&self.config.endpoint);
        if let Some(token) = &self.token {
            request = request.header("Authorization", format!("Bearer {token}"));
        }
        let mut resp = request.send_json(body).map_err(|e| (true, e.to_string()))?;
        let status = resp.status().as_u16();
        let text = resp.body_mut().read_to_string().map_err(|e| (true, e.to_string()))?;
        if status == 429 || status >= 500 {
            return Err((true, format!("HTTP {status}: {text}")));
        }
        if !(200..300).contains(&status) {
            return Err((false, format!("HTTP {status}: {text}")));
        }
        let envelope: Value = serde_json::from_str(&text).map_err(|e| (false, format!("bad envelope: {e}")))?;
        envelope
            .pointer("/choices/0/message/content")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| (false, "envelope lacks choices[0].message.content".to_string()))
    }
}

impl Provider for RemoteProvider {
    fn respond(&mut self, req: &ProviderRequest) -> Result<ProviderResponse, ProviderError> {
        req.validate()?;
        let body = json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": render_messages(req),
        });
        let mut last = String::new();
        for attempt in 0..=self.config.max_retries {
            if attempt > 0 {
                std::thread::sleep(Duration::from_millis(100 << attempt.min(6)));
            }
            match self.call_once(&body) {
                Ok(content) => return parse_response(req.kind, &content),
                Err((true, msg)) => last = msg,
                Err((false, msg)) => return Err(ProviderError::Transport(msg)),
            }
        }
        Err(ProviderError::Transport(format!("gave up after {} retries: {last}", self.config.max_retries)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn temperature_range_enforced() {
        let mut cfg = RemoteProviderConfig { endpoint: "http://127.0.0.1:1/".into(), ..Default::default() };
        assert!(cfg.validate().is_ok());
        cfg.temperature = 2.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn limiter_bounds_concurrency() {
        let limiter = Arc::new(RequestLimiter::new(2));
        let peak = Arc::new(Mutex::new(0usize));
        let handles: Vec<_> = (0..6)
            .map(|_| {
                let (limiter, peak) = (limiter.clone(), peak.clone());
                std::thread::spawn(move || {
                    let _p = limiter.acquire();
                    let now = limiter.in_flight();
                    let mut m = peak.lock().unwrap();
                    *m = (*m).max(now);
                    drop(m);
                    std::thread::sleep(Duration::from_millis(10));
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
        assert!(*peak.lock().unwrap() <= 2);
        assert_eq!(limiter.in_flight(), 0);
    }
}
