//! TOML experiment configuration.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub output: OutputConfig,
    pub coisotropy: CoisotropyConfig,
    pub brackets: BracketsConfig,
    pub flows: FlowsConfig,
    pub lifts: LiftsConfig,
    pub norms: NormsConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            output: OutputConfig::default(),
            coisotropy: CoisotropyConfig::default(),
            brackets: BracketsConfig::default(),
            flows: FlowsConfig::default(),
            lifts: LiftsConfig::default(),
            norms: NormsConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: String,
    pub table_csv: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { dir: "contactlab-out".into(), table_csv: "table.csv".into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoisotropyConfig {
    /// Fixture names, including `local-model-<a|b>:n:k` and `circle-point:p`.
    pub fixtures: Vec<String>,
    pub tol: f64,
    /// Optional invariance experiment: push every fixture on `chart` through this flow.
    pub flow: Option<FlowSpec>,
    pub verbose: bool,
}

impl Default for CoisotropyConfig {
    fn default() -> Self {
        Self {
            fixtures: ["legendrian-axis", "z-axis", "plane-y0", "sphere", "non-coiso-surface-n2"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            tol: 1e-8,
            flow: None,
            verbose: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub chart: String,
    pub hamiltonian: String,
    pub time: f64,
    #[serde(default = "default_flow_step")]
    pub step: f64,
    #[serde(default = "default_rank_tol")]
    pub rank_tol: f64,
    #[serde(default = "default_invariance_tol")]
    pub tol: f64,
}

fn default_flow_step() -> f64 {
    1e-2
}

fn default_rank_tol() -> f64 {
    1e-6
}

fn default_invariance_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BracketsConfig {
    pub samples: usize,
    pub flows: usize,
    pub flow_step: f64,
    pub tol: f64,
    pub identity_tol: f64,
    /// Random vanishing-ideal pairs per coisotropy fixture.
    pub ideal_pairs: usize,
    pub ideal_rel_tol: f64,
    /// Optional explicit pair evaluated at the samples on `chart`.
    pub pair: Option<PairSpec>,
}

impl Default for BracketsConfig {
    fn default() -> Self {
        Self { samples: 50, flows: 20, flow_step: 2.5e-3, tol: 1e-5, identity_tol: 1e-8, ideal_pairs: 100, ideal_rel_tol: 1e-6, pair: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    pub chart: String,
    pub f: String,
    pub g: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowsConfig {
    pub points: usize,
    pub closed_form_tol: f64,
    pub k_list: Vec<u32>,
    pub times: Vec<f64>,
    pub step: f64,
    pub conformal_rel_tol: f64,
    pub chart: String,
    pub hamiltonian: String,
    pub time: f64,
    pub fd_step: f64,
    pub contact_tol: f64,
    pub contact_samples: usize,
}

impl Default for FlowsConfig {
    fn default() -> Self {
        Self {
            points: 1000,
            closed_form_tol: 1e-12,
            k_list: vec![1, 2, 4, 8],
            times: vec![0.25, 0.5, 1.0],
            step: 1e-3,
            conformal_rel_tol: 1e-6,
            chart: "darboux:1".into(),
            hamiltonian: "coordinate:z".into(),
            time: 1.0,
            fd_step: 1e-4,
            contact_tol: 1e-6,
            contact_samples: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LiftsConfig {
    pub fixtures: Vec<String>,
    pub thetas: Vec<f64>,
    pub tol: f64,
    pub pairs: usize,
    pub lift_tol: f64,
    pub prequant_tol: f64,
    /// Lifted cost bound: orbit of this fixture under `cost_hamiltonian` on darboux:1.
    pub cost_fixture: String,
    pub cost_hamiltonian: String,
    pub window: Option<f64>,
    pub time_samples: usize,
    pub step: f64,
}

impl Default for LiftsConfig {
    fn default() -> Self {
        Self {
            fixtures: Vec::new(),
            thetas: vec![-1.0, 0.0, 0.5, 2.0],
            tol: 1e-8,
            pairs: 50,
            lift_tol: 1e-6,
            prequant_tol: 1e-8,
            cost_fixture: "legendrian-axis".into(),
            cost_hamiltonian: "bump".into(),
            window: None,
            time_samples: 20,
            step: 1e-2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormsConfig {
    pub k_list: Vec<u32>,
    pub resolution: usize,
    pub conformal_resolution: usize,
    pub time_steps: usize,
    pub step: f64,
    pub circle_pairs: Vec<[f64; 2]>,
    pub circle_paths: usize,
    pub circle_time_steps: usize,
    pub rotation_tol: f64,
    pub symmetry_tol: f64,
    /// Optional path cost for a named Hamiltonian on `chart`.
    pub hamiltonian: Option<String>,
    pub chart: String,
    pub conjugation: ConjugationConfig,
}

impl Default for NormsConfig {
    fn default() -> Self {
        Self {
            k_list: vec![1, 2, 4, 8],
            resolution: 201,
            conformal_resolution: 11,
            time_steps: 100,
            step: 1e-3,
            circle_pairs: vec![[0.0, 0.25], [0.0, 0.75], [0.3, 0.3]],
            circle_paths: 100,
            circle_time_steps: 10_000,
            rotation_tol: 1e-9,
            symmetry_tol: 1e-9,
            hamiltonian: None,
            chart: "darboux:1".into(),
            conjugation: ConjugationConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugationConfig {
    pub hamiltonian: String,
    pub psi: String,
    pub tau: f64,
    pub resolution: usize,
    pub tol: f64,
}

impl Default for ConjugationConfig {
    fn default() -> Self {
        Self { hamiltonian: "bump".into(), psi: "coordinate:z".into(), tau: 0.3, resolution: 7, tol: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "config error at line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "config error at line {l}: {}", self.message),
            _ => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Line of `key = ...` inside `[section]` (top level when `section` is empty).
fn key_line(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            continue;
        }
        if current == section && line.split('=').next().map(str::trim) == Some(key) {
            return Some(i + 1);
        }
    }
    None
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map(|s| line_col(text, s.start)).unzip();
            ConfigError { line, column, message: e.message().to_string() }
        })?;
        cfg.validate().map_err(|(section, key, message)| ConfigError {
            line: key_line(text, section, key),
            column: None,
            message,
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError { line: None, column: None, message: format!("{}: {e}", path.display()) })?;
        Self::parse(&text)
    }

    /// Every numeric knob must be positive (angles and time offsets excepted).
    pub fn validate(&self) -> Result<(), (&'static str, &'static str, String)> {
        fn pos(section: &'static str, key: &'static str, v: f64) -> Result<(), (&'static str, &'static str, String)> {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                let name = if section.is_empty() { key.to_string() } else { format!("{section}.{key}") };
                Err((section, key, format!("`{name}` must be positive, got {v}")))
            }
        }
        let c = &self.coisotropy;
        pos("coisotropy", "tol", c.tol)?;
        if let Some(f) = &c.flow {
            pos("coisotropy.flow", "time", f.time)?;
            pos("coisotropy.flow", "step", f.step)?;
            pos("coisotropy.flow", "rank_tol", f.rank_tol)?;
            pos("coisotropy.flow", "tol", f.tol)?;
        }
        let b = &self.brackets;
        pos("brackets", "samples", b.samples as f64)?;
        pos("brackets", "flows", b.flows as f64)?;
        pos("brackets", "flow_step", b.flow_step)?;
        pos("brackets", "tol", b.tol)?;
        pos("brackets", "identity_tol", b.identity_tol)?;
        pos("brackets", "ideal_pairs", b.ideal_pairs as f64)?;
        pos("brackets", "ideal_rel_tol", b.ideal_rel_tol)?;
        let f = &self.flows;
        pos("flows", "points", f.points as f64)?;
        pos("flows", "closed_form_tol", f.closed_form_tol)?;
        pos("flows", "step", f.step)?;
        pos("flows", "conformal_rel_tol", f.conformal_rel_tol)?;
        pos("flows", "time", f.time)?;
        pos("flows", "fd_step", f.fd_step)?;
        pos("flows", "contact_tol", f.contact_tol)?;
        pos("flows", "contact_samples", f.contact_samples as f64)?;
        for &t in &f.times {
            pos("flows", "times", t)?;
        }
        for &k in &f.k_list {
            pos("flows", "k_list", k as f64)?;
        }
        let l = &self.lifts;
        pos("lifts", "tol", l.tol)?;
        pos("lifts", "pairs", l.pairs as f64)?;
        pos("lifts", "lift_tol", l.lift_tol)?;
        pos("lifts", "prequant_tol", l.prequant_tol)?;
        pos("lifts", "time_samples", l.time_samples as f64)?;
        pos("lifts", "step", l.step)?;
        if let Some(w) = l.window {
            pos("lifts", "window", w)?;
        }
        let n = &self.norms;
        for &k in &n.k_list {
            pos("norms", "k_list", k as f64)?;
        }
        pos("norms", "resolution", n.resolution as f64)?;
        pos("norms", "conformal_resolution", n.conformal_resolution as f64)?;
        pos("norms", "time_steps", n.time_steps as f64)?;
        pos("norms", "step", n.step)?;
        pos("norms", "circle_time_steps", n.circle_time_steps as f64)?;
        pos("norms", "rotation_tol", n.rotation_tol)?;
        pos("norms", "symmetry_tol", n.symmetry_tol)?;
        pos("norms.conjugation", "tau", n.conjugation.tau)?;
        pos("norms.conjugation", "resolution", n.conjugation.resolution as f64)?;
        pos("norms.conjugation", "tol", n.conjugation.tol)?;
        Ok(())
    }

    /// `--tol` replaces the headline tolerance of every command.
    pub fn override_tol(&mut self, tol: f64) {
        self.coisotropy.tol = tol;
        self.brackets.tol = tol;
        self.flows.contact_tol = tol;
        self.lifts.tol = tol;
        self.norms.conjugation.tol = tol;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(ExperimentConfig::parse("").unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn sections_override_defaults() {
        let cfg = ExperimentConfig::parse("seed = 9\n[norms]\nk_list = [1, 3]\nresolution = 21\n").unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.norms.k_list, vec![1, 3]);
        assert_eq!(cfg.norms.resolution, 21);
        assert_eq!(cfg.norms.time_steps, 100);
    }

    #[test]
    fn syntax_errors_carry_line() {
        let err = ExperimentConfig::parse("seed = 1\n[norms]\nresolution = = 3\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn unknown_keys_rejected_with_line() {
        let err = ExperimentConfig::parse("[flows]\npoints = 10\nbogus = 1\n").unwrap_err();
        assert_eq!(err.line, Some(3), "{err}");
    }

    #[test]
    fn non_positive_knobs_rejected_with_line() {
        let err = ExperimentConfig::parse("[brackets]\nsamples = 5\ntol = -1e-3\n").unwrap_err();
        assert_eq!(err.line, Some(3));
        assert!(err.message.contains("brackets.tol"));
        let err = ExperimentConfig::parse("[norms]\nk_list = [0]\n").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn tol_override() {
        let mut cfg = ExperimentConfig::default();
        cfg.override_tol(1e-3);
        assert_eq!((cfg.coisotropy.tol, cfg.brackets.tol, cfg.lifts.tol), (1e-3, 1e-3, 1e-3));
    }
}
