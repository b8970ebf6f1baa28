//! Maximizers used by herding: conditional hidden maximization, exhaustive
//! joint search, coordinate ascent and the lowest-energy data case.
//!
//! Tie rules: per-unit signs prefer `+1`, scans keep the lowest canonical
//! index, coordinate flips keep the current value unless the score strictly
//! increases. All three survive positive rescaling of the weights.

use crate::error::{check_len, HerdError, Result};
use crate::model::{FeatureModel, JointState, StateOf};

/// Largest joint search an exhaustive maximization will attempt by default.
pub const DEFAULT_JOINT_CAP: u128 = 1 << 20;

/// Coordinate-ascent budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AscentConfig {
    /// Full sweeps before giving up; `usize::MAX` runs to convergence.
    pub max_sweeps: usize,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self { max_sweeps: 10 }
    }
}

impl AscentConfig {
    pub fn new(max_sweeps: usize) -> Result<Self> {
        if max_sweeps == 0 {
            return Err(HerdError::InvalidParameter("max_sweeps must be at least 1".into()));
        }
        Ok(Self { max_sweeps })
    }

    pub fn until_converged() -> Self {
        Self {
            max_sweeps: usize::MAX,
        }
    }
}

pub fn argmax_hidden<M: FeatureModel>(model: &M, w: &[f64], x: &M::Visible) -> Result<M::Hidden> {
    check_len("weight vector", model.n_features(), w.len())?;
    model.check_visible(x)?;
    Ok(model.argmax_hidden(w, x))
}

pub fn argmax_joint_exhaustive<M: FeatureModel>(model: &M, w: &[f64], cap: u128) -> Result<StateOf<M>> {
    check_len("weight vector", model.n_features(), w.len())?;
    check_exhaustive(model, cap)?;
    Ok(model.argmax_joint_unchecked(w))
}

pub(crate) fn check_exhaustive<M: FeatureModel>(model: &M, cap: u128) -> Result<()> {
    let states = model.exhaustive_search_size();
    if states > cap {
        Err(HerdError::CapExceeded { states, cap })
    } else {
        Ok(())
    }
}

pub fn ascend_joint<M: FeatureModel>(
    model: &M,
    w: &[f64],
    start: StateOf<M>,
    cfg: &AscentConfig,
) -> Result<StateOf<M>> {
    check_len("weight vector", model.n_features(), w.len())?;
    model.check_visible(&start.visible)?;
    model.check_hidden(&start.hidden)?;
    Ok(model.ascend_joint(w, start, cfg))
}

/// The data case with the lowest energy `-score(x_n, z*_n)`, lowest index
/// on ties, together with its imputed joint state.
pub fn lowest_energy_case<M: FeatureModel>(
    model: &M,
    w: &[f64],
    data: &[M::Visible],
) -> Result<(usize, StateOf<M>)> {
    check_len("weight vector", model.n_features(), w.len())?;
    if data.is_empty() {
        return Err(HerdError::EmptyDataset);
    }
    for x in data {
        model.check_visible(x)?;
    }
    let hidden: Vec<M::Hidden> = data.iter().map(|x| model.argmax_hidden(w, x)).collect();
    let n = lowest_energy_index(model, w, data, &hidden);
    Ok((n, JointState::new(data[n].clone(), hidden[n].clone())))
}

/// Index minimizing `-score(x_n, z_n)` for precomputed imputations.
pub(crate) fn lowest_energy_index<M: FeatureModel>(
    model: &M,
    w: &[f64],
    data: &[M::Visible],
    hidden: &[M::Hidden],
) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (n, (x, z)) in data.iter().zip(hidden).enumerate() {
        let s = model.score(w, x, z);
        if s > best.1 {
            best = (n, s);
        }
    }
    best.0
}
