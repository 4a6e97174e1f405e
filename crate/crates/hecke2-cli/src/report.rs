//! Report assembly and serialization. JSON output is byte-deterministic for
//! a fixed (config, version); wall times therefore appear in text mode only.

use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub level: u32,
    pub prec: usize,
    pub mdeg: usize,
    pub chunk: u32,
    pub checks: Vec<String>,
    pub cache_dir: Option<String>,
    pub format: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub parameters: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip)]
    pub wall_ms: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub version: String,
    pub config: ConfigEcho,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn assemble(config: ConfigEcho, mut checks: Vec<CheckRecord>) -> Report {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let summary = Summary {
            pass: checks.iter().filter(|c| c.status == Status::Pass).count(),
            fail: checks.iter().filter(|c| c.status == Status::Fail).count(),
            skipped: checks
                .iter()
                .filter(|c| c.status == Status::Skipped)
                .count(),
        };
        Report {
            version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            checks,
            summary,
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.fail > 0 {
            1
        } else {
            0
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "hecke2 {} level={} prec={} mdeg={} chunk={}\n",
            self.version, self.config.level, self.config.prec, self.config.mdeg, self.config.chunk
        ));
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skipped => "SKIP",
            };
            out.push_str(&format!(
                "{:<24} {:<4} {:>8} ms  {}",
                c.name, status, c.wall_ms, c.parameters
            ));
            if let Some(w) = &c.witness {
                out.push_str(&format!("  [{w}]"));
            }
            out.push('\n');
        }
        out.push_str(&format!(
            "summary: pass={} fail={} skipped={}\n",
            self.summary.pass, self.summary.fail, self.summary.skipped
        ));
        out
    }

    pub fn render_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
