use std::path::Path;
use std::time::Instant;

use anyhow::Context;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Informational lines are recorded but never fail the run.
    pub informational: bool,
    pub value: f64,
    pub tol: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub wall_time_s: f64,
    pub config: ExperimentConfig,
}

pub struct Recorder {
    command: String,
    started: Instant,
    checks: Vec<Check>,
}

impl Recorder {
    pub fn new(command: &str) -> Self {
        Self { command: command.to_string(), started: Instant::now(), checks: Vec::new() }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, value: f64, tol: Option<f64>, detail: impl Into<String>) {
        let c = Check { name: name.into(), pass, informational: false, value, tol, detail: detail.into() };
        println!("{:<44} {:<4} {:>12.4e}  {}", c.name, if c.pass { "PASS" } else { "FAIL" }, c.value, c.detail);
        self.checks.push(c);
    }

    /// Like `check`, but records `value <= tol`.
    pub fn bound(&mut self, name: impl Into<String>, value: f64, tol: f64, detail: impl Into<String>) {
        self.check(name, value <= tol, value, Some(tol), detail);
    }

    pub fn info(&mut self, name: impl Into<String>, value: f64, detail: impl Into<String>) {
        let c = Check { name: name.into(), pass: true, informational: true, value, tol: None, detail: detail.into() };
        println!("{:<44} {:<4} {:>12.4e}  {}", c.name, "INFO", c.value, c.detail);
        self.checks.push(c);
    }

    pub fn absorb(&mut self, other: RunReport) {
        self.checks.extend(other.checks);
    }

    pub fn finish(self, config: &ExperimentConfig) -> RunReport {
        let pass = self.checks.iter().all(|c| c.pass);
        RunReport {
            command: self.command,
            seed: config.seed,
            pass,
            checks: self.checks,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            config: config.clone(),
        }
    }
}

impl RunReport {
    pub fn write_json(&self, dir: &Path) -> anyhow::Result<std::path::PathBuf> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let path = dir.join(format!("report-{}.json", self.command));
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
