//! Blocking client for the LMFDB elliptic-curve API with an on-disk cache.

use std::path::PathBuf;
use std::time::Duration;

use serde_json::Value;
use x0n::catalog::{parse_lmfdb_response, valid_label, RefCurve};
use x0n::error::{Error, Result};

const DEFAULT_URL: &str = "https://www.lmfdb.org/api/ec_curvedata/";
const DEFAULT_TIMEOUT_SECS: u64 = 20;

pub struct Client {
    base: String,
    timeout: Duration,
    cache: Option<PathBuf>,
}

impl Client {
    /// `X0N_LMFDB_URL`, `X0N_LMFDB_TIMEOUT` (seconds) and the cache directory.
    pub fn from_env() -> Client {
        let base = std::env::var("X0N_LMFDB_URL").unwrap_or_else(|_| DEFAULT_URL.to_string());
        let secs = std::env::var("X0N_LMFDB_TIMEOUT").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_TIMEOUT_SECS);
        Client { base, timeout: Duration::from_secs(secs), cache: cache_dir() }
    }

    fn url(&self, label: &str) -> String {
        let sep = if self.base.contains('?') { '&' } else { '?' };
        format!("{}{sep}lmfdb_label={label}&_format=json&_fields=lmfdb_label,ainvs,jinv,isogeny_degrees", self.base)
    }

    fn cached(&self, label: &str) -> Option<PathBuf> {
        self.cache.as_ref().map(|d| d.join("lmfdb").join(format!("{label}.json")))
    }

    /// Network fetch; successful bodies are written to the cache.
    pub fn fetch(&self, label: &str) -> Result<RefCurve> {
        if !valid_label(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let agent = ureq::AgentBuilder::new().timeout(self.timeout).build();
        let body: Value = match agent.get(&self.url(label)).call() {
            Ok(resp) => resp.into_json().map_err(|e| Error::SchemaMismatch {
                label: label.to_string(),
                reason: format!("response is not JSON: {e}"),
            })?,
            Err(ureq::Error::Status(code, _)) => {
                return Err(Error::NetworkUnavailable(format!("HTTP status {code} for {label}")))
            }
            Err(e) => return Err(Error::NetworkUnavailable(e.to_string())),
        };
        let curve = parse_lmfdb_response(label, &body)?;
        if let Some(path) = self.cached(label) {
            // the cache is an optimization; failing to write it is not an error
            let _ = path.parent().map(std::fs::create_dir_all);
            let _ = std::fs::write(&path, body.to_string());
        }
        Ok(curve)
    }

    /// Cached response if present, else the network.
    pub fn get(&self, label: &str) -> Result<RefCurve> {
        if let Some(path) = self.cached(label) {
            if let Ok(text) = std::fs::read_to_string(&path) {
                if let Ok(body) = serde_json::from_str::<Value>(&text) {
                    if let Ok(c) = parse_lmfdb_response(label, &body) {
                        return Ok(c);
                    }
                }
            }
        }
        self.fetch(label)
    }
}

/// `X0N_CACHE_DIR`, else `$XDG_CACHE_HOME/x0n`, else `~/.cache/x0n`.
pub fn cache_dir() -> Option<PathBuf> {
    if let Ok(d) = std::env::var("X0N_CACHE_DIR") {
        return Some(PathBuf::from(d));
    }
    if let Ok(d) = std::env::var("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("x0n"));
    }
    std::env::var("HOME").ok().map(|h| PathBuf::from(h).join(".cache").join("x0n"))
}

/// Where `catalog refresh` writes and `catalog get` looks first.
pub fn snapshot_path() -> Option<PathBuf> {
    cache_dir().map(|d| d.join("curves.txt"))
}
