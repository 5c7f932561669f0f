//! The JSON report printed by every command. Key order is fixed and no timing
//! data is included, so a report depends only on the inputs and the seed.

use serde::Serialize;
use serde_json::{json, Value};
use tcsp_core::Caps;

use crate::error::CliError;

pub const TOOL: &str = "tcsp";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Positive,
    Negative,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Positive => 0,
            Status::Negative => 1,
            Status::Error => 2,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub seed: u64,
    pub caps: Caps,
    pub time_budget: Option<u64>,
    pub status: Status,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, seed: u64, caps: Caps, time_budget: Option<u64>, status: Status, result: Value) -> Self {
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            seed,
            caps,
            time_budget,
            status,
            result,
        }
    }

    pub fn error(command: &str, seed: u64, caps: Caps, time_budget: Option<u64>, err: &CliError) -> Self {
        let result = json!({
            "error": {
                "module": err.module(),
                "kind": err.kind(),
                "message": err.to_string(),
            }
        });
        Report::new(command, seed, caps, time_budget, Status::Error, result)
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_report_carries_module_tag() {
        let err = CliError::Core(tcsp_core::Error::Resource {
            what: "oracle variables",
            got: 9,
            cap: 8,
        });
        let r = Report::error("solve", 0, Caps::default(), None, &err);
        let v: Value = serde_json::from_str(&r.render()).unwrap();
        assert_eq!(v["result"]["error"]["module"], "solvers");
        assert_eq!(v["status"], "error");
    }
}
