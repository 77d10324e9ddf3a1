use std::time::Instant;

use serde_json::{json, Map, Value};

pub const SCHEMA: &str = "endolab.report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

/// A machine-readable command result. Key order in the output is fixed by
/// `serde_json`'s sorted maps, so equal inputs give byte-identical reports.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub parameters: Map<String, Value>,
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub result: Value,
    pub timing: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>, parameters: Map<String, Value>) -> Self {
        Report { command: command.into(), parameters, status: Status::Pass, witnesses: vec![], result: Value::Null, timing: None }
    }

    pub fn error(command: impl Into<String>, parameters: Map<String, Value>, message: String) -> Self {
        let mut r = Report::new(command, parameters);
        r.status = Status::Error;
        r.result = json!({ "error": message });
        r
    }

    /// Records one named check; a failing check turns the report to `fail`.
    pub fn check(&mut self, name: &str, passed: bool, detail: Value) {
        if !passed {
            if self.status == Status::Pass {
                self.status = Status::Fail;
            }
            self.witnesses.push(json!({ "check": name, "detail": detail }));
        }
    }

    /// Stores wall-clock time since `start` when `enabled`.
    pub fn set_timing(&mut self, start: Instant, enabled: bool) {
        if enabled {
            self.timing = Some(start.elapsed().as_secs_f64());
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "parameters": Value::Object(self.parameters.clone()),
            "status": self.status.as_str(),
            "witnesses": self.witnesses,
            "result": self.result,
            "timing": self.timing.map_or(Value::Null, |t| json!({ "seconds": t })),
        })
    }
}
