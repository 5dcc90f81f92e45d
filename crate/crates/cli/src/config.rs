//! Experiment configuration: command-line flags over a TOML file over defaults.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use holonomy::invariants::MODULUS_FLOOR;
use holonomy::{LoopSign, MeshGrid, Mode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_MU: f64 = 1.9;
pub const DEFAULT_SHOTS: u32 = 5120;
pub const DEFAULT_MESH: usize = 8;
pub const DEFAULT_BETA: f64 = 2.1;
/// eps1 sweep used by `mistake-ratio` when none is given: 0.005..=0.015 step 0.001.
pub const DEFAULT_EPS1_SWEEP: [f64; 11] = [
    0.005, 0.006, 0.007, 0.008, 0.009, 0.010, 0.011, 0.012, 0.013, 0.014, 0.015,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Chern,
    MistakeRatio,
    Nfield,
    Zak,
    Egp,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Chern => "chern",
            Command::MistakeRatio => "mistake-ratio",
            Command::Nfield => "nfield",
            Command::Zak => "zak",
            Command::Egp => "egp",
        }
    }

    fn single_mu(self) -> bool {
        self != Command::Chern
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}` (expected csv or json)")),
        }
    }
}

/// Mesh size written as `8x8`, or `8` for a square mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MeshSpec {
    pub n_kx: usize,
    pub n_ky: usize,
}

impl FromStr for MeshSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad mesh `{s}` (expected NxM or N)");
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
        match s.split_once(['x', 'X']) {
            Some((a, b)) => Ok(MeshSpec { n_kx: parse(a)?, n_ky: parse(b)? }),
            None => {
                let n = parse(s)?;
                Ok(MeshSpec { n_kx: n, n_ky: n })
            }
        }
    }
}

impl fmt::Display for MeshSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.n_kx, self.n_ky)
    }
}

impl<'de> Deserialize<'de> for MeshSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Side(usize),
            Pair([usize; 2]),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Side(n) => Ok(MeshSpec { n_kx: n, n_ky: n }),
            Raw::Pair([a, b]) => Ok(MeshSpec { n_kx: a, n_ky: b }),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse::<Mode>().map_err(|e| e.to_string())
}

pub fn parse_loop_sign(s: &str) -> Result<LoopSign, String> {
    match s {
        "plain" => Ok(LoopSign::Plain),
        "fermion-ordering" => Ok(LoopSign::FermionOrdering),
        _ => Err(format!("unknown loop sign `{s}` (expected plain or fermion-ordering)")),
    }
}

pub fn loop_sign_str(s: LoopSign) -> &'static str {
    match s {
        LoopSign::Plain => "plain",
        LoopSign::FermionOrdering => "fermion-ordering",
    }
}

/// Flags shared by every subcommand. Unset flags fall through to the config file.
#[derive(Args, Clone, Debug, Default)]
pub struct Flags {
    /// TOML config file; flags take precedence over its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Single chemical potential (shorthand for a one-element --mu-list).
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mu_list")]
    pub mu: Option<f64>,
    /// Comma-separated chemical potentials.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1..)]
    pub mu_list: Option<Vec<f64>>,
    /// Mesh size, `NxM` or `N`.
    #[arg(long)]
    pub mesh: Option<MeshSpec>,
    #[arg(long)]
    pub shots: Option<u32>,
    /// Single-qubit depolarizing probability.
    #[arg(long)]
    pub eps1: Option<f64>,
    /// Two-qubit depolarizing probability (default 10·eps1).
    #[arg(long)]
    pub eps2: Option<f64>,
    /// Comma-separated eps1 sweep for mistake-ratio.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub eps1_list: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// exact-oracle, noise-free-circuit or noisy-circuit.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Inverse temperature for egp.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Loop length N_L (sets the kx mesh size).
    #[arg(long)]
    pub nl: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<Format>,
    /// Smallest accepted raw link modulus.
    #[arg(long)]
    pub modulus_floor: Option<f64>,
    /// EGP loop sign: plain or fermion-ordering.
    #[arg(long, value_parser = parse_loop_sign)]
    pub loop_sign: Option<LoopSign>,
}

/// Contents of a TOML config file. Every key is optional.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub mu: Option<f64>,
    pub mu_list: Option<Vec<f64>>,
    pub mesh: Option<MeshSpec>,
    pub shots: Option<u32>,
    pub eps1: Option<f64>,
    pub eps2: Option<f64>,
    pub eps1_list: Option<Vec<f64>>,
    pub trials: Option<u32>,
    pub seed: Option<u64>,
    pub mode: Option<String>,
    pub beta: Option<f64>,
    pub nl: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub modulus_floor: Option<f64>,
    pub loop_sign: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }
}

/// Fully resolved and validated configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub mu_list: Vec<f64>,
    pub mesh: MeshGrid,
    pub shots: u32,
    pub eps1: f64,
    /// `None` means 10·eps1 for every eps1 used.
    pub eps2: Option<f64>,
    pub eps1_list: Vec<f64>,
    pub trials: u32,
    pub seed: u64,
    pub mode: Mode,
    pub beta: f64,
    pub n_l: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub modulus_floor: f64,
    pub loop_sign: LoopSign,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl ExperimentConfig {
    /// Defaults for `command` with nothing overridden.
    pub fn defaults(command: Command) -> Self {
        let mode = match command {
            Command::MistakeRatio => Mode::NoisyCircuit,
            _ => Mode::ExactOracle,
        };
        Self {
            command,
            mu_list: vec![DEFAULT_MU],
            mesh: MeshGrid::square(DEFAULT_MESH).expect("default mesh"),
            shots: DEFAULT_SHOTS,
            eps1: 0.0,
            eps2: None,
            eps1_list: Vec::new(),
            trials: 1,
            seed: 0,
            mode,
            beta: DEFAULT_BETA,
            n_l: DEFAULT_MESH,
            out: None,
            format: Format::Csv,
            modulus_floor: MODULUS_FLOOR,
            loop_sign: LoopSign::Plain,
        }
    }

    /// Layers `flags` over the config file (if any) over the defaults, then validates.
    pub fn resolve(command: Command, flags: &Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        Self::layer(command, flags, &file)
    }

    pub fn layer(command: Command, flags: &Flags, file: &FileConfig) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(command);

        let file_mode = file.mode.as_deref().map(parse_mode).transpose().map_err(config_err)?;
        let file_sign = file.loop_sign.as_deref().map(parse_loop_sign).transpose().map_err(config_err)?;
        if file.mu.is_some() && file.mu_list.is_some() {
            return Err(config_err("config file sets both mu and mu_list"));
        }

        let mu_list = match (&flags.mu, &flags.mu_list) {
            (Some(mu), _) => Some(vec![*mu]),
            (None, Some(list)) => Some(list.clone()),
            (None, None) => file.mu.map(|m| vec![m]).or_else(|| file.mu_list.clone()),
        };
        if let Some(list) = mu_list {
            cfg.mu_list = list;
        }

        let mesh = flags.mesh.or(file.mesh);
        let n_l = flags.nl.or(file.nl);
        let mesh = match (mesh, n_l) {
            (Some(m), Some(n)) if m.n_kx != n => {
                return Err(config_err(format!(
                    "nl = {n} disagrees with mesh {m}; the loop runs over the kx points"
                )))
            }
            (Some(m), _) => m,
            (None, Some(n)) => MeshSpec { n_kx: n, n_ky: DEFAULT_MESH },
            (None, None) => MeshSpec { n_kx: DEFAULT_MESH, n_ky: DEFAULT_MESH },
        };
        cfg.mesh = MeshGrid::new(mesh.n_kx, mesh.n_ky).map_err(|e| config_err(e.to_string()))?;
        cfg.n_l = mesh.n_kx;

        macro_rules! pick {
            ($field:ident) => {
                if let Some(v) = flags.$field.clone().or(file.$field.clone()) {
                    cfg.$field = v;
                }
            };
        }
        pick!(shots);
        pick!(eps1);
        pick!(eps1_list);
        pick!(trials);
        pick!(seed);
        pick!(beta);
        pick!(format);
        pick!(modulus_floor);
        cfg.eps2 = flags.eps2.or(file.eps2);
        cfg.out = flags.out.clone().or(file.out.clone());
        if let Some(m) = flags.mode.or(file_mode) {
            cfg.mode = m;
        }
        if let Some(s) = flags.loop_sign.or(file_sign) {
            cfg.loop_sign = s;
        }

        if command == Command::MistakeRatio && cfg.eps1_list.is_empty() {
            let explicit = flags.eps1.or(file.eps1);
            cfg.eps1_list = match explicit {
                Some(e) => vec![e],
                None => DEFAULT_EPS1_SWEEP.to_vec(),
            };
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.mu_list.is_empty() {
            return Err(config_err("mu list is empty"));
        }
        if let Some(mu) = self.mu_list.iter().find(|m| !m.is_finite()) {
            return Err(config_err(format!("mu must be finite (got {mu})")));
        }
        if self.command.single_mu() && self.mu_list.len() != 1 {
            return Err(config_err(format!(
                "{} takes a single mu (got {})",
                self.command.as_str(),
                self.mu_list.len()
            )));
        }
        if self.shots == 0 {
            return Err(config_err("shots must be at least 1"));
        }
        if self.trials == 0 {
            return Err(config_err("trials must be at least 1"));
        }
        if self.command == Command::Nfield && self.trials != 1 {
            return Err(config_err("nfield dumps a single trial; set trials = 1"));
        }
        let prob = |name: &str, e: f64| {
            if (0.0..=1.0).contains(&e) {
                Ok(())
            } else {
                Err(config_err(format!("{name} must lie in [0, 1] (got {e})")))
            }
        };
        prob("eps1", self.eps1)?;
        for &e in &self.eps1_list {
            prob("eps1", e)?;
        }
        if let Some(e2) = self.eps2 {
            prob("eps2", e2)?;
        }
        for e1 in self.eps1_values() {
            prob("eps2", self.eps2_for(e1))?;
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(config_err(format!("beta must be positive (got {})", self.beta)));
        }
        if !(0.0..1.0).contains(&self.modulus_floor) {
            return Err(config_err(format!(
                "modulus_floor must lie in [0, 1) (got {})",
                self.modulus_floor
            )));
        }
        Ok(())
    }

    /// eps1 values this command runs at.
    pub fn eps1_values(&self) -> Vec<f64> {
        match self.command {
            Command::MistakeRatio => self.eps1_list.clone(),
            _ => vec![self.eps1],
        }
    }

    pub fn eps2_for(&self, eps1: f64) -> f64 {
        self.eps2.unwrap_or(10.0 * eps1)
    }

    pub fn mu(&self) -> f64 {
        self.mu_list[0]
    }

    /// Config echo for the JSON `meta` header. The output path is left out.
    pub fn echo(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), self.command.as_str().into());
        m.insert("mu_list".into(), self.mu_list.clone().into());
        m.insert("mesh".into(), vec![self.mesh.n_kx, self.mesh.n_ky].into());
        m.insert("shots".into(), self.shots.into());
        m.insert("eps1".into(), self.eps1.into());
        m.insert("eps2".into(), self.eps2_for(self.eps1).into());
        if self.command == Command::MistakeRatio {
            m.insert("eps1_list".into(), self.eps1_list.clone().into());
        }
        m.insert("trials".into(), self.trials.into());
        m.insert("seed".into(), self.seed.into());
        m.insert("mode".into(), self.mode.as_str().into());
        m.insert("beta".into(), self.beta.into());
        m.insert("n_l".into(), self.n_l.into());
        m.insert("format".into(), serde_json::to_value(self.format).expect("format"));
        m.insert("modulus_floor".into(), self.modulus_floor.into());
        m.insert("loop_sign".into(), loop_sign_str(self.loop_sign).into());
        serde_json::Value::Object(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mesh_spec_forms() {
        assert_eq!("8x6".parse::<MeshSpec>().unwrap(), MeshSpec { n_kx: 8, n_ky: 6 });
        assert_eq!("4".parse::<MeshSpec>().unwrap(), MeshSpec { n_kx: 4, n_ky: 4 });
        assert!("8y8".parse::<MeshSpec>().is_err());
        let f = FileConfig::parse("mesh = [6, 4]").unwrap();
        assert_eq!(f.mesh, Some(MeshSpec { n_kx: 6, n_ky: 4 }));
        let f = FileConfig::parse("mesh = \"5x5\"").unwrap();
        assert_eq!(f.mesh, Some(MeshSpec { n_kx: 5, n_ky: 5 }));
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = FileConfig::parse("shots = 100\nseed = 3\nmode = \"noisy-circuit\"").unwrap();
        let flags = Flags { seed: Some(9), ..Default::default() };
        let cfg = ExperimentConfig::layer(Command::Chern, &flags, &file).unwrap();
        assert_eq!(cfg.shots, 100);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.mode, Mode::NoisyCircuit);
        assert_eq!(cfg.trials, 1);
    }

    #[test]
    fn eps2_follows_eps1() {
        let flags = Flags { eps1: Some(0.004), ..Default::default() };
        let cfg = ExperimentConfig::layer(Command::Chern, &flags, &FileConfig::default()).unwrap();
        assert!((cfg.eps2_for(cfg.eps1) - 0.04).abs() < 1e-15);
        let flags = Flags { eps1: Some(0.004), eps2: Some(0.01), ..Default::default() };
        let cfg = ExperimentConfig::layer(Command::Chern, &flags, &FileConfig::default()).unwrap();
        assert_eq!(cfg.eps2_for(cfg.eps1), 0.01);
    }

    #[test]
    fn validation_errors() {
        let none = FileConfig::default();
        let bad = [
            Flags { mu_list: Some(vec![]), ..Default::default() },
            Flags { trials: Some(0), ..Default::default() },
            Flags { shots: Some(0), ..Default::default() },
            Flags { eps1: Some(0.2), ..Default::default() },
            Flags { beta: Some(-1.0), ..Default::default() },
            Flags { mesh: Some(MeshSpec { n_kx: 8, n_ky: 8 }), nl: Some(6), ..Default::default() },
        ];
        for f in &bad {
            assert!(ExperimentConfig::layer(Command::Chern, f, &none).is_err(), "{f:?}");
        }
        let two = Flags { mu_list: Some(vec![1.0, 2.1]), ..Default::default() };
        assert!(ExperimentConfig::layer(Command::Zak, &two, &none).is_err());
        assert!(FileConfig::parse("colour = 1").is_err());
    }

    #[test]
    fn mistake_ratio_sweep_defaults() {
        let none = FileConfig::default();
        let cfg = ExperimentConfig::layer(Command::MistakeRatio, &Flags::default(), &none).unwrap();
        assert_eq!(cfg.eps1_list.len(), 11);
        assert_eq!(cfg.mode, Mode::NoisyCircuit);
        let one = Flags { eps1: Some(0.0), ..Default::default() };
        let cfg = ExperimentConfig::layer(Command::MistakeRatio, &one, &none).unwrap();
        assert_eq!(cfg.eps1_list, vec![0.0]);
    }

    #[test]
    fn nl_sets_loop_length() {
        let flags = Flags { nl: Some(6), ..Default::default() };
        let cfg = ExperimentConfig::layer(Command::Egp, &flags, &FileConfig::default()).unwrap();
        assert_eq!((cfg.mesh.n_kx, cfg.mesh.n_ky, cfg.n_l), (6, 8, 6));
    }
}
