use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::failure::{CliResult, Failure};
use crate::settings::Settings;

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: &'static str,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Alternance certificate: `sum cone_i signs_i u(points_i)` is a positive
/// multiple of the functional, and the bound `lower` follows from it.
#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub context: String,
    pub horizon: f64,
    pub lower: f64,
    pub upper: f64,
    pub points: Vec<f64>,
    pub signs: Vec<i8>,
    pub cone: Vec<f64>,
    pub condition: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub name: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub total_seconds: f64,
    pub phases: Vec<Phase>,
}

/// Machine-readable result of one command. Field order is fixed; everything
/// but `timings` is a deterministic function of inputs, config and seed.
#[derive(Debug, Clone, Serialize)]
pub struct Report<R> {
    pub command: CommandEcho,
    pub inputs: Vec<InputDigest>,
    pub results: R,
    pub certificates: Vec<Certificate>,
    pub config: Settings,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

pub struct Clock {
    start: Instant,
    last: Instant,
    phases: Vec<Phase>,
}

impl Clock {
    pub fn start() -> Self {
        let now = Instant::now();
        Self {
            start: now,
            last: now,
            phases: Vec::new(),
        }
    }

    pub fn lap(&mut self, name: &str) {
        let now = Instant::now();
        self.phases.push(Phase {
            name: name.to_string(),
            seconds: (now - self.last).as_secs_f64(),
        });
        self.last = now;
    }

    pub fn finish(self) -> Timings {
        Timings {
            total_seconds: self.start.elapsed().as_secs_f64(),
            phases: self.phases,
        }
    }
}

/// Destination and layout of the report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Default)]
pub enum Format {
    /// The JSON report only.
    #[default]
    Json,
    /// A human-readable summary followed by the JSON report.
    Text,
}

pub struct Output {
    pub path: Option<String>,
    pub format: Format,
    pub timings: bool,
}

impl Output {
    pub fn emit<R: Serialize>(&self, mut report: Report<R>, clock: Clock, summary: &str) -> CliResult<()> {
        if self.timings {
            report.timings = Some(clock.finish());
        }
        let mut body = serde_json::to_string_pretty(&report)
            .map_err(|e| Failure::new("internal", crate::failure::EXIT_NUMERICAL, e.to_string()))?;
        body.push('\n');
        let text = match self.format {
            Format::Json => body,
            Format::Text => format!("{summary}\n{body}"),
        };
        match &self.path {
            Some(p) => std::fs::write(p, text).map_err(|e| Failure::io(p, &e)),
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::io("<stdout>", &e)),
        }
    }
}
