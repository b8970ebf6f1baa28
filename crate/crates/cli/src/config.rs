//! Command arguments, TOML config files and their resolution into library
//! settings.
//!
//! A config file is a flat TOML table whose keys are the long flag names
//! with `-` replaced by `_`. Flags given on the command line win.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use herding::herding::{RateSource, DEFAULT_WEIGHT_SEED};
use herding::io::{read_dataset_file, read_enumerated_model_file, read_state_indices_file, DatasetOptions};
use herding::fig1::SinCosSystem;
use herding::maximize::DEFAULT_JOINT_CAP;
use herding::model::DEFAULT_GRAY_THRESHOLD;
use herding::{EnumeratedModel, JointSearch, RbmModel, Spin};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Overlays the flags in `cli` onto the table read from `file`.
pub fn merge_with_file<T>(cli: &T, file: Option<&Path>) -> CliResult<T>
where
    T: Args + Serialize + DeserializeOwned,
{
    let flags = toml::Table::try_from(cli).map_err(|e| CliError::config(e.to_string()))?;
    let mut merged = match file {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| CliError::from(e).at(path))?;
            let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::config(e.to_string()).at(path))?;
            let known: BTreeSet<String> = T::augment_args(clap::Command::new("cfg"))
                .get_arguments()
                .map(|a| a.get_id().as_str().to_string())
                .filter(|id| id != "config")
                .collect();
            if let Some(bad) = table.keys().find(|k| !known.contains(*k)) {
                return Err(CliError::config(format!("unknown key `{bad}`")).at(path));
            }
            table
        }
        None => toml::Table::new(),
    };
    merged.extend(flags);
    toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| CliError::config(e.message().to_string()))
}

/// Writes the resolved configuration so a run can be repeated.
pub fn write_effective_config<T: Serialize>(out: &Path, cfg: &T) -> CliResult<()> {
    let text = toml::to_string(cfg).map_err(|e| CliError::config(e.to_string()))?;
    fs::write(out.join("effective_config.toml"), text)?;
    Ok(())
}

pub fn prepare_out_dir(out: &Path) -> CliResult<()> {
    fs::create_dir_all(out).map_err(|e| CliError::from(e).at(out))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Rbm { visible: usize, hidden: usize },
    Enumerated(PathBuf),
    Fig1,
}

impl FromStr for ModelSpec {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        let bad = || CliError::config(format!("model `{s}` is not `rbm:DxK`, `enumerated:PATH` or `fig1`"));
        if s == "fig1" {
            return Ok(ModelSpec::Fig1);
        }
        if let Some(path) = s.strip_prefix("enumerated:") {
            return Ok(ModelSpec::Enumerated(PathBuf::from(path)));
        }
        let dims = s.strip_prefix("rbm:").ok_or_else(bad)?;
        let (d, k) = dims.split_once('x').ok_or_else(bad)?;
        Ok(ModelSpec::Rbm {
            visible: d.parse().map_err(|_| bad())?,
            hidden: k.parse().map_err(|_| bad())?,
        })
    }
}

pub fn parse_search(s: &str) -> CliResult<JointSearch> {
    match s {
        "exhaustive" => Ok(JointSearch::Exhaustive),
        "warm-start" => Ok(JointSearch::WarmStart),
        "lowest-energy" => Ok(JointSearch::LowestEnergyCase),
        _ => Err(CliError::config(format!(
            "search `{s}` is not exhaustive, warm-start or lowest-energy"
        ))),
    }
}

pub fn parse_rate_source(s: &str) -> CliResult<RateSource> {
    match s {
        "driving" => Ok(RateSource::Driving),
        "samples" => Ok(RateSource::PseudoSamples),
        _ => Err(CliError::config(format!("rate source `{s}` is not driving or samples"))),
    }
}

/// `HxW`.
pub fn parse_dims(s: &str) -> CliResult<(usize, usize)> {
    let bad = || CliError::config(format!("dims `{s}` is not HxW"));
    let (h, w) = s.split_once('x').ok_or_else(bad)?;
    Ok((h.parse().map_err(|_| bad())?, w.parse().map_err(|_| bad())?))
}

fn require_file(path: &Path) -> CliResult<()> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::config(format!("missing file {}", path.display())))
    }
}

/// Reads a file with a library loader, tagging errors with the path.
pub fn load<T>(path: &Path, f: impl FnOnce(&Path) -> herding::Result<T>) -> CliResult<T> {
    require_file(path)?;
    f(path).map_err(|e| CliError::from(e).at(path))
}

pub fn dataset_options(zero_one: Option<bool>, gray_threshold: Option<f64>) -> DatasetOptions {
    DatasetOptions {
        zero_one: zero_one.unwrap_or(false),
        gray_threshold: gray_threshold.unwrap_or(DEFAULT_GRAY_THRESHOLD),
    }
}

/// A model with the data it is driven by; data may be empty for data-free
/// chains.
#[derive(Debug)]
pub enum Loaded {
    Rbm(RbmModel, Vec<Vec<Spin>>),
    Table(EnumeratedModel, Vec<usize>),
}

pub fn load_model(spec: &ModelSpec, data: Option<&Path>, opts: &DatasetOptions) -> CliResult<Loaded> {
    match spec {
        ModelSpec::Rbm { visible, hidden } => {
            let model = RbmModel::new(*visible, *hidden)?;
            let cases = match data {
                Some(p) => {
                    let d = load(p, |p| read_dataset_file(p, opts))?;
                    if d.dim() != *visible {
                        return Err(CliError::Data(format!(
                            "{}: cases have {} spins, model has {visible} visible units",
                            p.display(),
                            d.dim()
                        )));
                    }
                    d.into_cases()
                }
                None => Vec::new(),
            };
            Ok(Loaded::Rbm(model, cases))
        }
        ModelSpec::Enumerated(path) => {
            let model = load(path, |p| read_enumerated_model_file(p))?;
            let idx = match data {
                Some(p) => load(p, |p| read_state_indices_file(p))?,
                None => Vec::new(),
            };
            Ok(Loaded::Table(model, idx))
        }
        ModelSpec::Fig1 => {
            if data.is_some() {
                return Err(CliError::config("the fig1 model has built-in data"));
            }
            let sys = SinCosSystem::new(1.0)?;
            Ok(Loaded::Table(sys.model().clone(), sys.data().to_vec()))
        }
    }
}

/// Options shared by every command that builds a herding chain.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ChainArgs {
    /// `rbm:DxK`, `enumerated:PATH` or `fig1`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Dataset file (spins for RBMs, state indices for enumerated models).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Dataset tokens are 0/1 rather than -1/+1.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zero_one: Option<bool>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gray_threshold: Option<f64>,
    /// idealized, local, safe, fully-observed or decoupled.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    /// Joint search of fully-observed and decoupled chains.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Weight offset file.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub offset: Option<PathBuf>,
    /// Keep RBM hidden-bias weights at their initial values.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub freeze_hidden_bias: Option<bool>,
    /// Initial weight file; the seeded default otherwise.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weights: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_sweeps: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint_cap: Option<u64>,
    /// Rate file driving a decoupled chain.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rates: Option<PathBuf>,
}

impl ChainArgs {
    pub fn resolve(&mut self) {
        self.variant.get_or_insert_with(|| "idealized".into());
        self.search.get_or_insert_with(|| "exhaustive".into());
        self.steps.get_or_insert(1000);
        self.record_every.get_or_insert(1);
        self.eta.get_or_insert(1.0);
        self.gamma.get_or_insert(1.0);
        self.zero_one.get_or_insert(false);
        self.gray_threshold.get_or_insert(DEFAULT_GRAY_THRESHOLD);
        self.freeze_hidden_bias.get_or_insert(false);
        self.seed.get_or_insert(DEFAULT_WEIGHT_SEED);
        self.max_sweeps.get_or_insert(10);
        self.joint_cap.get_or_insert(DEFAULT_JOINT_CAP as u64);
    }

    pub fn model_spec(&self) -> CliResult<ModelSpec> {
        self.model
            .as_deref()
            .ok_or_else(|| CliError::config("--model is required"))?
            .parse()
    }

    pub fn steps(&self) -> CliResult<u64> {
        match self.steps {
            Some(0) => Err(CliError::config("steps must be at least 1")),
            Some(n) => Ok(n),
            None => Err(CliError::config("--steps is required")),
        }
    }

    pub fn record_every(&self) -> CliResult<u64> {
        match self.record_every.unwrap_or(1) {
            0 => Err(CliError::config("record_every must be at least 1")),
            n => Ok(n),
        }
    }

    pub fn dataset_options(&self) -> DatasetOptions {
        dataset_options(self.zero_one, self.gray_threshold)
    }

    /// Checks every referenced file up front.
    pub fn check_files(&self) -> CliResult<()> {
        for p in [&self.data, &self.offset, &self.weights, &self.rates].into_iter().flatten() {
            require_file(p)?;
        }
        if let Ok(ModelSpec::Enumerated(p)) = self.model_spec() {
            require_file(&p)?;
        }
        Ok(())
    }
}

/// Train/valid/test dataset files of one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassFiles {
    pub train: PathBuf,
    pub valid: PathBuf,
    pub test: PathBuf,
}

impl FromStr for ClassFiles {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(',').collect();
        match parts[..] {
            [train, valid, test] => Ok(ClassFiles {
                train: train.into(),
                valid: valid.into(),
                test: test.into(),
            }),
            _ => Err(format!("`{s}` is not TRAIN,VALID,TEST")),
        }
    }
}
