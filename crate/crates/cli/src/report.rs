use iwk_core::suite::{Check, Status};
use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Debug, Serialize, PartialEq, Eq)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub config: RunConfig,
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub checks: Vec<Check>,
    pub summary: Summary,
}

impl Report {
    pub fn new(config: RunConfig, command: &str, result: Option<Value>, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let pass = checks.iter().filter(|c| c.status == Status::Pass).count();
        let fail = checks.len() - pass;
        Report { config, command: command.into(), result, checks, summary: Summary { pass, fail } }
    }

    pub fn all_passed(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn emit(&self) -> String {
        match self.config.format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Text => self.text(),
        }
    }

    fn text(&self) -> String {
        let c = &self.config;
        let mut out = format!("{} p={} N={} D={} D_T={} k={} seed={}\n", self.command, c.p, c.prec, c.deg, c.tdeg, c.level, c.seed);
        if let Some(r) = &self.result {
            if let Value::Object(map) = r {
                for (k, v) in map {
                    out.push_str(&format!("{k}: {v}\n"));
                }
            }
        }
        for ch in &self.checks {
            let tag = if ch.status == Status::Pass { "PASS" } else { "FAIL" };
            out.push_str(&format!("{tag} {} [{}] {} = {} ({} digits)\n", ch.id, ch.paper_anchor, ch.lhs, ch.rhs, ch.precision_attained));
        }
        out.push_str(&format!("pass {} fail {}\n", self.summary.pass, self.summary.fail));
        out
    }
}
