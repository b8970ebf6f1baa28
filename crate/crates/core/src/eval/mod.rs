//! Energy-based classification: one herding chain per class, per-iteration
//! Z-scored case energies averaged online, then a linear classifier on top.

mod knn;
mod mlr;
mod pipeline;

pub use knn::{knn1_manhattan, manhattan};
pub use mlr::{mlr_train, MlrConfig, MlrModel};
pub use pipeline::{
    accuracy, classify, ClassSplit, ClassifyConfig, ClassifyReport, EnergyFeatureTable, Method,
};

use log::warn;

use crate::error::{check_len, HerdError, Result};
use crate::exec::map_slice;
use crate::herding::{ChainConfig, Herder};
use crate::model::FeatureModel;

/// `E(x) = −score(x, z*(x))` under the given (effective) weights.
pub fn case_energy<M: FeatureModel>(model: &M, w: &[f64], x: &M::Visible) -> Result<f64> {
    check_len("weight vector", model.n_features(), w.len())?;
    model.check_visible(x)?;
    Ok(-model.score(w, x, &model.argmax_hidden(w, x)))
}

/// Mean and population standard deviation of one iteration's training
/// energies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStandardizer {
    pub mean: f64,
    pub std_dev: f64,
}

impl EnergyStandardizer {
    pub fn fit(train_energies: &[f64]) -> Result<Self> {
        if train_energies.is_empty() {
            return Err(HerdError::EmptyDataset);
        }
        let n = train_energies.len() as f64;
        let mean = train_energies.iter().sum::<f64>() / n;
        let var = train_energies.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
        Ok(Self {
            mean,
            std_dev: var.sqrt(),
        })
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.std_dev > 0.0)
    }

    pub fn standardize(&self, energies: &[f64]) -> Result<Vec<f64>> {
        if self.is_degenerate() {
            return Err(HerdError::InvalidParameter(
                "cannot standardize with zero training spread".into(),
            ));
        }
        Ok(energies.iter().map(|e| (e - self.mean) / self.std_dev).collect())
    }
}

/// Which iterations of a class chain feed the averaged energies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PipelineSchedule {
    pub total_iters: u64,
    /// First iteration (1-based) inside the averaging window.
    pub window_start: u64,
}

impl Default for PipelineSchedule {
    fn default() -> Self {
        Self {
            total_iters: 2000,
            window_start: 1001,
        }
    }
}

impl PipelineSchedule {
    pub fn new(total_iters: u64, window_len: u64) -> Result<Self> {
        let s = Self {
            total_iters,
            window_start: total_iters.saturating_sub(window_len) + 1,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.total_iters == 0 || self.window_start == 0 || self.window_start > self.total_iters {
            return Err(HerdError::InvalidParameter(format!(
                "averaging window must lie inside 1..={} (starts at {})",
                self.total_iters, self.window_start
            )));
        }
        Ok(())
    }

    pub fn window_len(&self) -> u64 {
        self.total_iters - self.window_start + 1
    }
}

/// Averaged standardized energies of the evaluation cases under one class
/// chain, plus per-iteration checks of the training Z-scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassEnergies {
    pub eval_means: Vec<f64>,
    pub iterations: u64,
    pub skipped: u64,
    /// Largest `|mean|` of the training Z-scores over the window.
    pub max_train_z_mean: f64,
    /// Largest `|variance − 1|` of the training Z-scores over the window.
    pub max_train_z_var_dev: f64,
}

/// Herds on one class's training cases and averages, over the window, the
/// evaluation energies standardized by that iteration's training energies.
/// Energies use the weights after each update.
pub fn run_class_pipeline<M: FeatureModel>(
    model: &M,
    class_train: &[M::Visible],
    eval_cases: &[M::Visible],
    chain: ChainConfig,
    schedule: PipelineSchedule,
) -> Result<ClassEnergies> {
    schedule.validate()?;
    for x in eval_cases {
        model.check_visible(x)?;
    }
    let exec = chain.execution;
    let herder = Herder::new(model, class_train, chain)?;
    let mut state = herder.init(None)?;
    let mut out = ClassEnergies {
        eval_means: vec![0.0; eval_cases.len()],
        iterations: 0,
        skipped: 0,
        max_train_z_mean: 0.0,
        max_train_z_var_dev: 0.0,
    };
    let mut eff = Vec::new();
    for t in 1..=schedule.total_iters {
        herder.step(&mut state);
        if t < schedule.window_start {
            continue;
        }
        herder.config().transform.effective_into(state.weights(), &mut eff);
        let energy = |x: &M::Visible| -model.score(&eff, x, &model.argmax_hidden(&eff, x));
        let train_e = map_slice(exec, class_train, energy);
        let std = EnergyStandardizer::fit(&train_e)?;
        if std.is_degenerate() {
            warn!("iteration {t}: training energies have zero spread, skipped");
            out.skipped += 1;
            continue;
        }
        let zt = std.standardize(&train_e)?;
        let n = zt.len() as f64;
        let zmean = zt.iter().sum::<f64>() / n;
        let zvar = zt.iter().map(|z| (z - zmean) * (z - zmean)).sum::<f64>() / n;
        out.max_train_z_mean = out.max_train_z_mean.max(zmean.abs());
        out.max_train_z_var_dev = out.max_train_z_var_dev.max((zvar - 1.0).abs());

        let eval_e = map_slice(exec, eval_cases, energy);
        let ze = std.standardize(&eval_e)?;
        out.iterations += 1;
        let k = out.iterations as f64;
        for (m, z) in out.eval_means.iter_mut().zip(&ze) {
            *m += (z - *m) / k;
        }
    }
    Ok(out)
}
