use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use roebench::metric::VerdictTag;
use serde::Serialize;
use serde_json::{Map, Value};

/// Outcome of one asserted check. Ordered so that `max` picks the worst.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }

    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// A verdict asserted to be `expect`; without an expectation only
    /// Inconclusive is flagged.
    pub fn from_verdict(tag: VerdictTag, expect: Option<VerdictTag>) -> Status {
        match (tag, expect) {
            (VerdictTag::Inconclusive, _) => Status::Inconclusive,
            (t, Some(e)) => Status::from_bool(t == e),
            (_, None) => Status::Pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: String,
    config: Value,
    checks: Vec<Check>,
    result: Map<String, Value>,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize) -> Report {
        Report {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            checks: Vec::new(),
            result: Map::new(),
        }
    }

    pub fn check(&mut self, name: &str, status: Status, detail: impl Into<String>) -> Status {
        self.checks.push(Check { name: name.to_string(), status, detail: detail.into() });
        status
    }

    pub fn assert(&mut self, name: &str, ok: bool, detail: impl Into<String>) -> bool {
        self.check(name, Status::from_bool(ok), detail);
        ok
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).with_context(|| format!("serializing {key}"))?;
        self.result.insert(key.to_string(), v);
        Ok(())
    }

    pub fn status(&self) -> Status {
        self.checks.iter().map(|c| c.status).max().unwrap_or(Status::Pass)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        let worst = self.status();
        self.checks.iter().find(|c| c.status == worst && worst != Status::Pass)
    }

    pub fn to_value(&self, elapsed_ms: Option<u128>) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("config".into(), self.config.clone());
        m.insert("checks".into(), serde_json::to_value(&self.checks).unwrap_or(Value::Null));
        m.insert("result".into(), Value::Object(self.result.clone()));
        m.insert("status".into(), serde_json::to_value(self.status()).unwrap_or(Value::Null));
        if let Some(ms) = elapsed_ms {
            m.insert("elapsed_ms".into(), Value::from(ms as u64));
        }
        Value::Object(m)
    }
}

/// Sorted-key JSON: compact with a trailing newline when canonical, pretty otherwise.
pub fn render(value: &Value, canonical: bool) -> String {
    // serde_json's default map is a BTreeMap, so keys come out sorted.
    let mut s = if canonical {
        serde_json::to_string(value).expect("a Value always serializes")
    } else {
        serde_json::to_string_pretty(value).expect("a Value always serializes")
    };
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
