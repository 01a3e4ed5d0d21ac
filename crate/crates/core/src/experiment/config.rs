use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ansatz::{AnsatzSpec, Family, Parity};
use crate::error::{Error, Result};
use crate::noise::{symmetric_readout, NoiseModel, ZneMode};
use crate::optimize::{Method, OptimizerConfig};
use crate::problems::{Problem, MAX_REFERENCE_QUBITS};

fn problem_by_name_or_table<'de, D: serde::Deserializer<'de>>(
    d: D,
) -> std::result::Result<Problem, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Form {
        Name(String),
        Table(Problem),
    }
    match Form::deserialize(d)? {
        Form::Name(name) => Problem::from_name(&name)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown problem '{name}'"))),
        Form::Table(p) => Ok(p),
    }
}

/// One experiment file. Lists span a Cartesian sweep over
/// `qubits × optimizer × ansatz × shots`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Either a bare name with default parameters or a `[problem]` table.
    #[serde(deserialize_with = "problem_by_name_or_table")]
    pub problem: Problem,
    pub qubits: Vec<usize>,
    /// `"zgr"` or `"ry<depth>"`.
    #[serde(default = "default_ansatz")]
    pub ansatz: Vec<String>,
    #[serde(default = "yes")]
    pub symmetrized: bool,
    #[serde(default)]
    pub parity: Parity,
    /// `"adam"`, `"spsa"` or `"nelder_mead"`.
    #[serde(default = "default_optimizer")]
    pub optimizer: Vec<String>,
    /// Hyperparameters shared by every optimizer cell; `method` is set per cell.
    #[serde(default)]
    pub optimizer_settings: Option<OptimizerConfig>,
    /// Shots per circuit per energy evaluation; 0 means exact expectations.
    #[serde(default = "default_shots")]
    pub shots: Vec<u64>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    /// Write one trajectory CSV per run.
    #[serde(default)]
    pub trajectories: bool,
    /// Noise applied during optimization.
    #[serde(default)]
    pub noise: Option<NoiseConfig>,
    #[serde(default)]
    pub zne: Option<ZneConfig>,
}

fn yes() -> bool {
    true
}

fn default_ansatz() -> Vec<String> {
    vec!["zgr".into()]
}

fn default_optimizer() -> Vec<String> {
    vec!["adam".into()]
}

fn default_shots() -> Vec<u64> {
    vec![0]
}

fn default_repetitions() -> usize {
    20
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// `"santiago_like"`, `"thermal"` or `"ideal"`; the fields below override it.
    #[serde(default = "default_preset")]
    pub preset: String,
    pub t1_us: Option<f64>,
    pub t2_us: Option<f64>,
    pub readout_flip: Option<f64>,
    pub single_qubit_ns: Option<f64>,
    pub two_qubit_ns: Option<f64>,
    pub depolarizing_1q: Option<f64>,
    pub depolarizing_2q: Option<f64>,
}

fn default_preset() -> String {
    "santiago_like".into()
}

impl NoiseConfig {
    pub fn model(&self) -> Result<NoiseModel> {
        let mut m = match self.preset.as_str() {
            "santiago_like" => NoiseModel::santiago_like(),
            "thermal" => NoiseModel::thermal(100e-6),
            "ideal" => NoiseModel::ideal(),
            other => {
                return Err(Error::config(
                    "noise.preset",
                    format!("unknown preset {other:?}; expected santiago_like, thermal or ideal"),
                ))
            }
        };
        if let Some(t1) = self.t1_us {
            m = m.with_t1(t1 / 1e6);
        }
        if let Some(t2) = self.t2_us {
            m.t2 = vec![t2 / 1e6; m.t1.len()];
        }
        if let Some(p) = self.readout_flip {
            m.readout = vec![symmetric_readout(p)];
        }
        if let Some(ns) = self.single_qubit_ns {
            m.single_qubit_time = ns / 1e9;
        }
        if let Some(ns) = self.two_qubit_ns {
            m.two_qubit_time = ns / 1e9;
        }
        if let Some(p) = self.depolarizing_1q {
            m.depolarizing_1q = p;
        }
        if let Some(p) = self.depolarizing_2q {
            m.depolarizing_2q = p;
        }
        m.validate().map_err(|e| Error::config("noise", e.to_string()))?;
        Ok(m)
    }
}

/// Zero-noise extrapolation over a relaxation-only `T1` grid (`T2 = T1`, perfect readout).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZneConfig {
    pub t1_us: Vec<f64>,
    #[serde(default = "default_zne_shots")]
    pub shots: u64,
    #[serde(default = "default_zne_reps")]
    pub repetitions: usize,
    #[serde(default = "default_zne_mode")]
    pub mode: ZneMode,
    /// Points with smaller `T1` are left out of the fit.
    #[serde(default)]
    pub validity_floor_us: f64,
    /// Inline parameters; otherwise read from `optimum` or `<output>/optimum.json`.
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub optimum: Option<PathBuf>,
}

fn default_zne_shots() -> u64 {
    8192
}

fn default_zne_reps() -> usize {
    100
}

fn default_zne_mode() -> ZneMode {
    ZneMode::LeastSquares { degree: 1 }
}

/// One point of the sweep grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub index: usize,
    pub n_qubits: usize,
    pub ansatz: AnsatzSpec,
    pub optimizer: OptimizerConfig,
    pub shots: u64,
}

impl Cell {
    /// File-name-safe identifier, e.g. `n3_zgr_adam_s8192`.
    pub fn label(&self) -> String {
        format!(
            "n{}_{}_{}_s{}",
            self.n_qubits,
            self.ansatz.to_string().to_lowercase(),
            self.optimizer.method.name(),
            self.shots
        )
    }
}

pub fn parse_family(name: &str) -> Option<Family> {
    let lower = name.trim().to_ascii_lowercase();
    if lower == "zgr" {
        return Some(Family::Zgr);
    }
    let depth = lower.strip_prefix("ry")?.parse().ok()?;
    Some(Family::Ry { depth })
}

impl ExperimentConfig {
    /// Minimal config for a problem and qubit list; everything else at defaults.
    pub fn new(problem: Problem, qubits: Vec<usize>) -> Self {
        ExperimentConfig {
            problem,
            qubits,
            ansatz: default_ansatz(),
            symmetrized: true,
            parity: Parity::default(),
            optimizer: default_optimizer(),
            optimizer_settings: None,
            shots: default_shots(),
            repetitions: default_repetitions(),
            base_seed: 0,
            output: default_output(),
            trajectories: false,
            noise: None,
            zne: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| {
                    let line = text[..s.start].lines().count().max(1);
                    format!("line {line}")
                })
                .unwrap_or_else(|| "config".into());
            Error::config(field, e.message().to_string())
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config("config", format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.problem
            .validate()
            .map_err(|e| Error::config("problem", e.to_string()))?;
        if self.qubits.is_empty() {
            return Err(Error::config("qubits", "empty list"));
        }
        if let Some(&n) = self
            .qubits
            .iter()
            .find(|&&n| !(2..=MAX_REFERENCE_QUBITS).contains(&n))
        {
            return Err(Error::config(
                "qubits",
                format!("{n} outside 2..={MAX_REFERENCE_QUBITS}"),
            ));
        }
        if self.ansatz.is_empty() {
            return Err(Error::config("ansatz", "empty list"));
        }
        if let Some(bad) = self.ansatz.iter().find(|a| parse_family(a).is_none()) {
            return Err(Error::config(
                "ansatz",
                format!("unknown ansatz {bad:?}; expected zgr or ry<depth>"),
            ));
        }
        if self.optimizer.is_empty() {
            return Err(Error::config("optimizer", "empty list"));
        }
        if let Some(bad) = self.optimizer.iter().find(|o| Method::from_name(o).is_none()) {
            return Err(Error::config(
                "optimizer",
                format!("unknown optimizer {bad:?}; expected adam, spsa or nelder_mead"),
            ));
        }
        if let Some(s) = &self.optimizer_settings {
            s.validate()?;
        }
        if self.shots.is_empty() {
            return Err(Error::config("shots", "empty list"));
        }
        if self.repetitions == 0 {
            return Err(Error::config("repetitions", "must be at least 1"));
        }
        if let Some(noise) = &self.noise {
            noise.model()?;
        }
        if let Some(zne) = &self.zne {
            if zne.t1_us.is_empty() {
                return Err(Error::config("zne.t1_us", "empty list"));
            }
            if zne.t1_us.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(Error::config("zne.t1_us", "values must be positive and finite"));
            }
            if zne.shots == 0 {
                return Err(Error::config("zne.shots", "must be positive"));
            }
            if zne.repetitions == 0 {
                return Err(Error::config("zne.repetitions", "must be at least 1"));
            }
        }
        for cell in self.cells()? {
            cell.ansatz.validate().map_err(|e| {
                Error::config(
                    "ansatz",
                    format!("{} at {} qubits: {e}", cell.ansatz, cell.n_qubits),
                )
            })?;
            if self.noise.is_some() && cell.n_qubits > crate::noise::MAX_DENSITY_QUBITS {
                return Err(Error::config(
                    "noise",
                    format!(
                        "density-matrix runs support at most {} qubits",
                        crate::noise::MAX_DENSITY_QUBITS
                    ),
                ));
            }
        }
        Ok(())
    }

    /// Sweep cells in a fixed order: qubits, then optimizer, ansatz, shots.
    pub fn cells(&self) -> Result<Vec<Cell>> {
        let base = self.optimizer_settings.unwrap_or_default();
        let mut cells = Vec::new();
        for &n in &self.qubits {
            for opt in &self.optimizer {
                let method = Method::from_name(opt)
                    .ok_or_else(|| Error::config("optimizer", format!("unknown optimizer {opt:?}")))?;
                let mut optimizer = OptimizerConfig { method, ..base };
                if self.optimizer_settings.is_none() {
                    optimizer.max_iterations = OptimizerConfig::for_method(method).max_iterations;
                }
                for a in &self.ansatz {
                    let family = parse_family(a)
                        .ok_or_else(|| Error::config("ansatz", format!("unknown ansatz {a:?}")))?;
                    let mut ansatz = AnsatzSpec::new(family, n, self.symmetrized);
                    ansatz.parity = self.parity;
                    for &shots in &self.shots {
                        cells.push(Cell {
                            index: cells.len(),
                            n_qubits: n,
                            ansatz,
                            optimizer,
                            shots,
                        });
                    }
                }
            }
        }
        Ok(cells)
    }

    pub fn noise_model(&self) -> Result<Option<NoiseModel>> {
        self.noise.as_ref().map(NoiseConfig::model).transpose()
    }

    /// First 16 hex digits of the SHA-256 of the config's canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(self).unwrap_or_default();
        let digest = Sha256::digest(&canonical);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
qubits = [2, 3]
ansatz = ["zgr", "ry1"]
optimizer = ["adam", "spsa"]
shots = [0, 8192]
repetitions = 3
base_seed = 7

[problem]
name = "transmon"
"#;

    #[test]
    fn parses_and_expands() {
        let cfg = ExperimentConfig::from_toml(SAMPLE).unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.problem, Problem::transmon());
        let cells = cfg.cells().unwrap();
        assert_eq!(cells.len(), 16);
        assert_eq!(cells[0].label(), "n2_zgr_adam_s0");
        assert_eq!(cells[15].label(), "n3_ry1_spsa_s8192");
        assert_eq!(cells[15].optimizer.max_iterations, 500);
        assert!(cells.iter().enumerate().all(|(i, c)| c.index == i));
    }

    #[test]
    fn errors_name_the_field() {
        let field_of = |text: &str| match ExperimentConfig::from_toml(text).and_then(|c| c.validate()) {
            Err(Error::Config { field, .. }) => field,
            other => panic!("{other:?}"),
        };
        assert_eq!(
            field_of(&SAMPLE.replace("qubits = [2, 3]", "qubits = []")),
            "qubits"
        );
        assert_eq!(field_of(&SAMPLE.replace("\"ry1\"", "\"rz\"")), "ansatz");
        assert_eq!(field_of(&SAMPLE.replace("\"spsa\"", "\"bfgs\"")), "optimizer");
        assert_eq!(
            field_of(&SAMPLE.replace("repetitions = 3", "repetitions = 0")),
            "repetitions"
        );
        assert_eq!(
            field_of(&SAMPLE.replace("shots = [0, 8192]", "shots = []")),
            "shots"
        );
        assert!(field_of(&SAMPLE.replace("transmon", "pendulum")).starts_with("line"));
    }

    #[test]
    fn problem_by_name_or_table() {
        let short = ExperimentConfig::from_toml("problem = \"flux_qubit\"\nqubits = [4]\n").unwrap();
        assert_eq!(short.problem, Problem::flux_qubit());
        let table =
            ExperimentConfig::from_toml("qubits = [3]\n[problem]\nname = \"transmon\"\nec = 0.05\n").unwrap();
        assert_eq!(table.problem, Problem::Transmon { ej: 1.0, ec: 0.05 });
        assert!(ExperimentConfig::from_toml("problem = \"duffing\"\nqubits = [3]\n").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.base_seed += 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
    }

    #[test]
    fn noise_overrides() {
        let cfg = NoiseConfig {
            preset: "santiago_like".into(),
            t1_us: Some(50.0),
            t2_us: None,
            readout_flip: Some(0.02),
            single_qubit_ns: None,
            two_qubit_ns: None,
            depolarizing_1q: None,
            depolarizing_2q: None,
        };
        let m = cfg.model().unwrap();
        assert_eq!(m.t1, vec![50e-6]);
        assert_eq!(m.t2, vec![50e-6]);
        assert_eq!(m.readout[0][0][1], 0.02);
        let bad = NoiseConfig {
            t2_us: Some(500.0),
            ..cfg
        };
        assert!(matches!(bad.model(), Err(Error::Config { .. })));
    }
}
